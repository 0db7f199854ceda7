//! Network graphs, path systems, topology generators and the text file format.

mod format;
mod generators;
mod network;

pub use format::{parse_network, serialize_network};
pub use generators::{
    build_crossover_example, build_lscheme, build_mnop, build_single_link, lscheme_node, mnop_node,
    LSchemeParams, ENDPOINT_A, ENDPOINT_B,
};
pub use network::{Network, NetworkBuilder, NodeId, PathSystem};
