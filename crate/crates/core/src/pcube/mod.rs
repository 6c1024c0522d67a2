//! Graphs of media and partial cubes.

mod graph;
mod iso;
mod isometry;
mod recognize;

pub use graph::{medium_graph, GraphJson, LabeledGraph, VertexLabels};
pub use iso::{media_isomorphic, media_isomorphic_capped, MediaIsomorphism, DEFAULT_ISO_CAP};
pub use isometry::{extend_isometry, rank_table, CubeIsometry, RankTable};
pub use recognize::{graph_to_medium, is_partial_cube, Labeling, NotPartialCube, PartialCube};
