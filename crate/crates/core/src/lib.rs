//! Security analysis of multi-path key relay in trusted-node QKD networks.

pub mod analysis;
pub mod attack_sim;
pub mod cut_combinatorics;
pub mod error;
pub mod graph;
pub mod key_protocol;
pub mod net_model;
pub mod path_routing;

pub use error::{Error, Result};
