//! Media: token systems satisfying the four media axioms, together with their
//! representations as well-graded set families and partial cubes, and two
//! families of example media (linear orders and line arrangements).

pub mod arrangements;
pub mod bitset;
pub mod error;
pub mod lin_orders;
pub mod pcube;
pub mod representation;
pub mod token_core;
pub mod wg_sets;

pub use bitset::BitSet;
pub use error::{MediaError, Result};
pub use token_core::{check_axioms, Message, TokenSystem};
