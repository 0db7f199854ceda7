use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::gf2::{GfVec, Span};
use super::protocols::Transcript;
use crate::error::{invalid, Error, Result};
use crate::net_model::NodeId;

/// Largest intermediate count accepted by [`leakage_sweep`].
pub const SWEEP_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Leakage {
    Compromised,
    Secure,
}

impl fmt::Display for Leakage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Leakage::Compromised => "compromised",
            Leakage::Secure => "secure",
        })
    }
}

/// What a set of compromised relays knows: their link keys, subkeys they see
/// in plaintext, and every public message.
#[derive(Debug, Clone)]
pub struct AdversaryView {
    pub compromised: BTreeSet<NodeId>,
    pub known_vectors: Vec<GfVec>,
    span: Span,
}

impl AdversaryView {
    pub fn new(t: &Transcript, compromised: &BTreeSet<NodeId>) -> Result<Self> {
        let mut view = public_view(t);
        for id in compromised {
            if *id == t.endpoint_a || *id == t.endpoint_b {
                return Err(invalid(format!("endpoint `{id}` cannot be compromised")));
            }
            let links = t
                .incident
                .get(id)
                .ok_or_else(|| Error::UnknownNode(id.to_string()))?;
            let plain = t.plaintext.get(id).map(Vec::as_slice).unwrap_or(&[]);
            for &i in links.iter().chain(plain) {
                view.learn(GfVec::unit(t.space.len(), i));
            }
        }
        view.compromised = compromised.clone();
        Ok(view)
    }

    fn learn(&mut self, v: GfVec) {
        self.span.insert(v.clone());
        self.known_vectors.push(v);
    }

    pub fn learns(&self, v: &GfVec) -> bool {
        self.span.contains(v)
    }
}

fn public_view(t: &Transcript) -> AdversaryView {
    let mut view = AdversaryView {
        compromised: BTreeSet::new(),
        known_vectors: Vec::new(),
        span: Span::new(t.space.len()),
    };
    for m in &t.messages {
        view.learn(m.value.combination.clone());
    }
    view
}

/// Decides exactly whether `compromised` plus the public messages determine
/// the final key, by a GF(2) span test.
pub fn leakage_oracle(t: &Transcript, compromised: &BTreeSet<NodeId>) -> Result<Leakage> {
    let view = AdversaryView::new(t, compromised)?;
    Ok(if view.learns(&t.alice_key.combination) {
        Leakage::Compromised
    } else {
        Leakage::Secure
    })
}

/// Runs the oracle on every subset of intermediates, ordered by bitmask over
/// the sorted node ids.
pub fn leakage_sweep(t: &Transcript) -> Result<Vec<(Vec<NodeId>, Leakage)>> {
    let ids: Vec<&NodeId> = t.incident.keys().collect();
    if ids.len() > SWEEP_CAP {
        return Err(Error::SizeCap {
            nodes: ids.len(),
            cap: SWEEP_CAP,
        });
    }
    let base = public_view(t);
    let key = &t.alice_key.combination;
    Ok((0u64..1 << ids.len())
        .into_par_iter()
        .map(|mask| {
            let subset: Vec<NodeId> = (0..ids.len())
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| ids[v].clone())
                .collect();
            let mut span = base.span.clone();
            for id in &subset {
                let plain = t.plaintext.get(id).map(Vec::as_slice).unwrap_or(&[]);
                for &i in t.incident[id].iter().chain(plain) {
                    span.insert(GfVec::unit(t.space.len(), i));
                }
            }
            let verdict = if span.contains(key) {
                Leakage::Compromised
            } else {
                Leakage::Secure
            };
            (subset, verdict)
        })
        .collect())
}

/// Writes `subset,leaks` with subset members joined by `;`.
pub fn write_leakage_csv<W: Write>(
    rows: &[(Vec<NodeId>, Leakage)],
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subset", "leaks"])?;
    for (subset, verdict) in rows {
        let names: Vec<&str> = subset.iter().map(NodeId::as_str).collect();
        w.write_record([
            names.join(";"),
            (*verdict == Leakage::Compromised).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
