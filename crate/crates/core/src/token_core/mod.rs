mod axioms;
mod message;
mod system;

pub(crate) use axioms::check_m1;
pub use axioms::{check_axioms, default_bound, AxiomReport, AxiomResult, Verdict, Witness};
pub use message::Message;
pub use system::{Reduction, TokenSpec, TokenSystem, TokenSystemJson};
