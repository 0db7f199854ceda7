//! Executable models of the key relay protocols and an exact leakage oracle.
//!
//! Every key symbol is tracked twice: as a GF(2) combination over the
//! independent link keys and subkeys, and as concrete bits. The oracle works
//! on combinations only, so its verdicts are exact.

mod gf2;
mod keys;
mod leakage;
mod protocols;

pub use gf2::{GfVec, Span};
pub use keys::{BitString, KeySpace, Symbol, Value};
pub use leakage::{
    leakage_oracle, leakage_sweep, write_leakage_csv, AdversaryView, Leakage, SWEEP_CAP,
};
pub use protocols::{
    run_hop_by_hop, run_hop_by_hop_combined, run_mops_broadcast, run_mops_pathcover, run_zeroed,
    Message, Scheme, Transcript,
};

use crate::error::Result;
use crate::net_model::{Network, NodeId, PathSystem};

/// Two rows `1-2-3` and `4-5-6` joined by rungs `1-4`, `2-5`, `3-6`, with
/// the rows as a spanning path cover.
pub fn ladder_example() -> Result<(Network, PathSystem)> {
    let mut b = Network::builder("A", "B");
    for v in ["1", "2", "3", "4", "5", "6"] {
        b.node(v, 0.0)?;
    }
    for (u, v) in [
        ("A", "1"),
        ("1", "2"),
        ("2", "3"),
        ("3", "B"),
        ("A", "4"),
        ("4", "5"),
        ("5", "6"),
        ("6", "B"),
        ("1", "4"),
        ("2", "5"),
        ("3", "6"),
    ] {
        b.edge(u, v)?;
    }
    let net = b.build()?;
    let rows = vec![
        ["1", "2", "3"].map(NodeId::from).to_vec(),
        ["4", "5", "6"].map(NodeId::from).to_vec(),
    ];
    let cover = PathSystem::new(&net, rows)?;
    Ok((net, cover))
}
