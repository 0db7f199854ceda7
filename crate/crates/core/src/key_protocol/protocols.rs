use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use super::keys::{subscript, KeySpace, Symbol, Value};
use crate::error::{invalid, Error, Result};
use crate::graph::CompactGraph;
use crate::net_model::{Network, NodeId, PathSystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    HopByHop,
    HopByHopCombined,
    MopsBroadcast,
    MopsPathcover,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::HopByHop => "hop-by-hop",
            Scheme::HopByHopCombined => "hop-by-hop-combined",
            Scheme::MopsBroadcast => "mops-broadcast",
            Scheme::MopsPathcover => "mops-pathcover",
        })
    }
}

/// A public classical message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub sender: NodeId,
    pub receiver: NodeId,
    /// `M_{12}` for relayed XORs, `C_{12}` for one-time-pad ciphertexts.
    pub label: String,
    /// Label of the earlier message folded into this one, if any.
    pub relayed: Option<String>,
    /// Symbols the sender XORs in, in the order it applies them.
    pub terms: Vec<usize>,
    /// Full expansion over the symbol basis, with concrete bits.
    pub value: Value,
}

impl Message {
    /// The message as the sender builds it, e.g. `M_{12} ^ K_{23} ^ K_{25}`.
    pub fn relay_form(&self, space: &KeySpace) -> String {
        self.relayed
            .iter()
            .cloned()
            .chain(self.terms.iter().map(|&i| space.symbols()[i].to_string()))
            .collect::<Vec<_>>()
            .join(" ^ ")
    }
}

/// Everything observable in one protocol run, plus the derived keys.
#[derive(Debug, Clone)]
pub struct Transcript {
    pub scheme: Scheme,
    pub space: KeySpace,
    pub messages: Vec<Message>,
    pub alice_key: Value,
    pub bob_key: Value,
    /// Subkey symbols each relay holds in plaintext (hop-by-hop only).
    pub plaintext: BTreeMap<NodeId, Vec<usize>>,
    /// Link symbols incident to each intermediate node.
    pub incident: BTreeMap<NodeId, Vec<usize>>,
    pub endpoint_a: NodeId,
    pub endpoint_b: NodeId,
}

impl Transcript {
    fn new(scheme: Scheme, net: &Network, space: KeySpace) -> Self {
        let incident = net
            .intermediates()
            .map(|v| (v.clone(), space.incident(net, v)))
            .collect();
        Transcript {
            scheme,
            alice_key: space.zero_value(),
            bob_key: space.zero_value(),
            space,
            messages: Vec::new(),
            plaintext: BTreeMap::new(),
            incident,
            endpoint_a: net.endpoint_a().clone(),
            endpoint_b: net.endpoint_b().clone(),
        }
    }

    pub fn keys_agree(&self) -> bool {
        self.alice_key == self.bob_key
    }

    pub fn message(&self, label: &str) -> Option<&Message> {
        self.messages.iter().find(|m| m.label == label)
    }

    /// Writes `sender,receiver,symbolic,bits_hex`, one row per message.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["sender", "receiver", "symbolic", "bits_hex"])?;
        for m in &self.messages {
            w.write_record([
                m.sender.as_str(),
                m.receiver.as_str(),
                &self.space.render(&m.value.combination),
                &m.value.bits.to_hex(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    fn push(
        &mut self,
        sender: &NodeId,
        receiver: &NodeId,
        prefix: char,
        relayed: Option<String>,
        terms: Vec<usize>,
        value: Value,
    ) {
        self.messages.push(Message {
            sender: sender.clone(),
            receiver: receiver.clone(),
            label: format!("{prefix}_{{{}}}", subscript(sender, receiver)),
            relayed,
            terms,
            value,
        });
    }

    fn finish(self) -> Result<Self> {
        if self.keys_agree() {
            Ok(self)
        } else {
            Err(Error::ProtocolFailure(format!(
                "{} run derived different keys: alice {} vs bob {}",
                self.scheme,
                self.space.render(&self.alice_key.combination),
                self.space.render(&self.bob_key.combination)
            )))
        }
    }
}

fn full_path<'a>(net: &'a Network, path: &'a [NodeId]) -> Vec<&'a NodeId> {
    std::iter::once(net.endpoint_a())
        .chain(path.iter())
        .chain(std::iter::once(net.endpoint_b()))
        .collect()
}

fn link(space: &KeySpace, net: &Network, u: &NodeId, v: &NodeId) -> Result<usize> {
    space
        .link_index(net, u, v)
        .ok_or_else(|| invalid(format!("path uses missing edge `{u}`-`{v}`")))
}

fn check_system(net: &Network, sys: &PathSystem) -> Result<()> {
    if sys.is_empty() {
        return Err(invalid("path system is empty"));
    }
    PathSystem::new(net, sys.paths().to_vec()).map(|_| ())
}

/// Alice splits the key into one subkey per path; every hop decrypts and
/// re-encrypts it with the next link key.
pub fn run_hop_by_hop(
    net: &Network,
    sys: &PathSystem,
    key_length: usize,
    seed: u64,
) -> Result<Transcript> {
    check_system(net, sys)?;
    let space = KeySpace::new(net, sys.len(), key_length, seed)?;
    hop_by_hop(net, sys, space)
}

pub(crate) fn hop_by_hop(net: &Network, sys: &PathSystem, space: KeySpace) -> Result<Transcript> {
    let mut t = Transcript::new(Scheme::HopByHop, net, space);
    for (j, path) in sys.paths().iter().enumerate() {
        let sub = t.space.index_of(&Symbol::Subkey(j + 1)).expect("subkey");
        let subkey = t.space.value(sub);
        t.alice_key.xor(&subkey);
        let hops = full_path(net, path);
        let mut plain = subkey;
        for pair in hops.windows(2) {
            let k = t.space.value(link(&t.space, net, pair[0], pair[1])?);
            let mut cipher = plain.clone();
            cipher.xor(&k);
            t.push(
                pair[0],
                pair[1],
                'C',
                None,
                vec![sub, link(&t.space, net, pair[0], pair[1])?],
                cipher.clone(),
            );
            plain = cipher;
            plain.xor(&k);
            if !net.is_endpoint(pair[1]) {
                t.plaintext.entry(pair[1].clone()).or_default().push(sub);
            }
        }
        t.bob_key.xor(&plain);
    }
    t.finish()
}

/// Hop-by-hop relay where each node forwards `M_prev ^ K_in ^ K_out` in one
/// step instead of decrypting. Alice's first message is her subkey encrypted
/// with the first link key, so the derived key equals [`run_hop_by_hop`]'s.
pub fn run_hop_by_hop_combined(
    net: &Network,
    sys: &PathSystem,
    key_length: usize,
    seed: u64,
) -> Result<Transcript> {
    check_system(net, sys)?;
    let space = KeySpace::new(net, sys.len(), key_length, seed)?;
    hop_by_hop_combined(net, sys, space)
}

pub(crate) fn hop_by_hop_combined(
    net: &Network,
    sys: &PathSystem,
    space: KeySpace,
) -> Result<Transcript> {
    let mut t = Transcript::new(Scheme::HopByHopCombined, net, space);
    for (j, path) in sys.paths().iter().enumerate() {
        let sub = t.space.index_of(&Symbol::Subkey(j + 1)).expect("subkey");
        let subkey = t.space.value(sub);
        t.alice_key.xor(&subkey);
        let hops = full_path(net, path);
        let first = link(&t.space, net, hops[0], hops[1])?;
        let mut msg = subkey;
        msg.xor(&t.space.value(first));
        t.push(hops[0], hops[1], 'M', None, vec![sub, first], msg.clone());
        for w in hops.windows(3) {
            let k_in = link(&t.space, net, w[0], w[1])?;
            let k_out = link(&t.space, net, w[1], w[2])?;
            let prev = t.messages.last().expect("message").label.clone();
            msg.xor(&t.space.value(k_in));
            msg.xor(&t.space.value(k_out));
            t.push(w[1], w[2], 'M', Some(prev), vec![k_in, k_out], msg.clone());
        }
        let last = link(&t.space, net, hops[hops.len() - 2], hops[hops.len() - 1])?;
        msg.xor(&t.space.value(last));
        t.bob_key.xor(&msg);
    }
    t.finish()
}

fn check_connected(net: &Network) -> Result<()> {
    if net.has_edge(net.endpoint_a(), net.endpoint_b()) {
        return Err(Error::DirectLink);
    }
    let g = CompactGraph::new(net);
    let connected = if g.supports_masks() {
        g.connected_without(0)
    } else {
        g.connected_avoiding(&vec![false; g.len()], &mut Default::default())
    };
    if connected {
        Ok(())
    } else {
        Err(Error::ProtocolFailure("A and B are not connected".into()))
    }
}

fn alice_link_key(t: &mut Transcript, net: &Network) {
    for i in t.space.incident(net, net.endpoint_a()) {
        let v = t.space.value(i);
        t.alice_key.xor(&v);
    }
}

fn bob_cancels_own_links(t: &mut Transcript, net: &Network, mut received: Value) {
    for i in t.space.incident(net, net.endpoint_b()) {
        received.xor(&t.space.value(i));
    }
    t.bob_key = received;
}

/// Every intermediate publishes the XOR of its incident link keys. Alice's key
/// is the XOR of her link keys; Bob XORs all messages and removes his own.
pub fn run_mops_broadcast(net: &Network, key_length: usize, seed: u64) -> Result<Transcript> {
    check_connected(net)?;
    mops_broadcast(net, KeySpace::new(net, 0, key_length, seed)?)
}

pub(crate) fn mops_broadcast(net: &Network, space: KeySpace) -> Result<Transcript> {
    let mut t = Transcript::new(Scheme::MopsBroadcast, net, space);
    alice_link_key(&mut t, net);
    let mut received = t.space.zero_value();
    for v in net.intermediates() {
        let terms = t.space.incident(net, v);
        let mut msg = t.space.zero_value();
        terms.iter().for_each(|&i| msg.xor(&t.space.value(i)));
        received.xor(&msg);
        t.push(v, net.endpoint_b(), 'M', None, terms, msg);
    }
    bob_cancels_own_links(&mut t, net, received);
    t.finish()
}

/// The broadcast scheme routed along a cover of disjoint paths: each node
/// forwards the previous message XORed with all of its link keys, and Bob
/// receives one message per path.
pub fn run_mops_pathcover(
    net: &Network,
    cover: &PathSystem,
    key_length: usize,
    seed: u64,
) -> Result<Transcript> {
    check_connected(net)?;
    check_system(net, cover)?;
    if !cover.spans(net) {
        return Err(invalid(format!(
            "cover visits {} of {} intermediate nodes",
            cover.total_nodes(),
            net.intermediate_count()
        )));
    }
    mops_pathcover(net, cover, KeySpace::new(net, 0, key_length, seed)?)
}

pub(crate) fn mops_pathcover(
    net: &Network,
    cover: &PathSystem,
    space: KeySpace,
) -> Result<Transcript> {
    let mut t = Transcript::new(Scheme::MopsPathcover, net, space);
    alice_link_key(&mut t, net);
    let mut received = t.space.zero_value();
    for path in cover.paths() {
        let hops = full_path(net, path);
        let mut msg = t.space.zero_value();
        let mut prev = None;
        for w in hops.windows(3) {
            let k_in = link(&t.space, net, w[0], w[1])?;
            let k_out = link(&t.space, net, w[1], w[2])?;
            let others: Vec<usize> = t
                .space
                .incident(net, w[1])
                .into_iter()
                .filter(|&i| i != k_in && i != k_out)
                .collect();
            // The first node starts from its link to A; later nodes list the
            // incoming key last, after the outgoing key and the interlinks.
            let terms: Vec<usize> = if prev.is_none() {
                [k_in, k_out].into_iter().chain(others).collect()
            } else {
                std::iter::once(k_out).chain(others).chain([k_in]).collect()
            };
            terms.iter().for_each(|&i| msg.xor(&t.space.value(i)));
            t.push(w[1], w[2], 'M', prev.take(), terms, msg.clone());
            prev = Some(t.messages.last().expect("message").label.clone());
        }
        received.xor(&msg);
    }
    bob_cancels_own_links(&mut t, net, received);
    t.finish()
}

/// Runs `scheme` with every key forced to zero.
pub fn run_zeroed(
    scheme: Scheme,
    net: &Network,
    sys: Option<&PathSystem>,
    key_length: usize,
) -> Result<Transcript> {
    let need = || sys.ok_or_else(|| invalid(format!("{scheme} needs a path system")));
    match scheme {
        Scheme::HopByHop => {
            let sys = need()?;
            check_system(net, sys)?;
            hop_by_hop(net, sys, KeySpace::zeroed(net, sys.len(), key_length)?)
        }
        Scheme::HopByHopCombined => {
            let sys = need()?;
            check_system(net, sys)?;
            hop_by_hop_combined(net, sys, KeySpace::zeroed(net, sys.len(), key_length)?)
        }
        Scheme::MopsBroadcast => {
            check_connected(net)?;
            mops_broadcast(net, KeySpace::zeroed(net, 0, key_length)?)
        }
        Scheme::MopsPathcover => {
            let sys = need()?;
            check_connected(net)?;
            check_system(net, sys)?;
            if !sys.spans(net) {
                return Err(invalid("cover does not visit every intermediate node"));
            }
            mops_pathcover(net, sys, KeySpace::zeroed(net, 0, key_length)?)
        }
    }
}
