use std::collections::BTreeMap;
use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gf2::GfVec;
use crate::error::{invalid, Result};
use crate::net_model::{Network, NodeId};

/// An independent uniformly random key symbol.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// The QKD key `K_uv = K_vu` of an edge, stored with A first and B last.
    Link(NodeId, NodeId),
    /// Alice's subkey for path `j` (1-based).
    Subkey(usize),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Link(u, v)
                if u.as_str().chars().count() == 1 && v.as_str().chars().count() == 1 =>
            {
                write!(f, "K_{{{u}{v}}}")
            }
            Symbol::Link(u, v) => write!(f, "K_{{{u},{v}}}"),
            Symbol::Subkey(j) => write!(f, "K_{{{j}}}"),
        }
    }
}

/// Message and key names use the same compact subscript convention.
pub(crate) fn subscript(u: &NodeId, v: &NodeId) -> String {
    if u.as_str().chars().count() == 1 && v.as_str().chars().count() == 1 {
        format!("{u}{v}")
    } else {
        format!("{u},{v}")
    }
}

/// A bitstring of fixed length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn zero(len: usize) -> Self {
        BitString {
            bytes: vec![0; len.div_ceil(8)],
            len,
        }
    }

    fn random(len: usize, rng: &mut impl RngCore) -> Self {
        let mut s = BitString::zero(len);
        rng.fill_bytes(&mut s.bytes);
        if !len.is_multiple_of(8) {
            let last = s.bytes.len() - 1;
            s.bytes[last] &= (1u8 << (len % 8)) - 1;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bytes.iter().all(|&b| b == 0)
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "bitstrings of different lengths");
        self.bytes
            .iter_mut()
            .zip(&other.bytes)
            .for_each(|(a, b)| *a ^= b);
    }

    /// Lowercase hex, least significant byte first.
    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A value known both as a GF(2) combination of symbols and as concrete bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Value {
    pub combination: GfVec,
    pub bits: BitString,
}

impl Value {
    pub fn xor(&mut self, other: &Value) {
        self.combination ^= &other.combination;
        self.bits.xor_assign(&other.bits);
    }
}

/// The symbol basis of one protocol run together with sampled key material.
#[derive(Debug, Clone)]
pub struct KeySpace {
    symbols: Vec<Symbol>,
    index: BTreeMap<Symbol, usize>,
    bits: Vec<BitString>,
    key_length: usize,
}

impl KeySpace {
    /// One link symbol per edge of `net` (in edge order) followed by
    /// `subkeys` subkey symbols. Bits are drawn from ChaCha8 seeded with `seed`,
    /// symbol by symbol in basis order.
    pub fn new(net: &Network, subkeys: usize, key_length: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::build(net, subkeys, key_length, |len| {
            BitString::random(len, &mut rng)
        })
    }

    /// Same basis with every key equal to zero.
    pub fn zeroed(net: &Network, subkeys: usize, key_length: usize) -> Result<Self> {
        Self::build(net, subkeys, key_length, BitString::zero)
    }

    fn build(
        net: &Network,
        subkeys: usize,
        key_length: usize,
        mut sample: impl FnMut(usize) -> BitString,
    ) -> Result<Self> {
        if key_length == 0 {
            return Err(invalid("key_length must be at least 1"));
        }
        let mut symbols: Vec<Symbol> = net.edges().map(|(u, v)| link_symbol(net, u, v)).collect();
        symbols.extend((1..=subkeys).map(Symbol::Subkey));
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let bits = symbols.iter().map(|_| sample(key_length)).collect();
        Ok(KeySpace {
            symbols,
            index,
            bits,
            key_length,
        })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn key_length(&self) -> usize {
        self.key_length
    }

    pub fn index_of(&self, symbol: &Symbol) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    pub fn link_index(&self, net: &Network, u: &NodeId, v: &NodeId) -> Option<usize> {
        self.index_of(&link_symbol(net, u, v))
    }

    pub fn bits(&self, i: usize) -> &BitString {
        &self.bits[i]
    }

    pub fn value(&self, i: usize) -> Value {
        Value {
            combination: GfVec::unit(self.len(), i),
            bits: self.bits[i].clone(),
        }
    }

    pub fn zero_value(&self) -> Value {
        Value {
            combination: GfVec::zero(self.len()),
            bits: BitString::zero(self.key_length),
        }
    }

    /// Symbol indices of every link incident to `node`.
    pub fn incident(&self, net: &Network, node: &NodeId) -> Vec<usize> {
        net.neighbors(node)
            .filter_map(|v| self.link_index(net, node, v))
            .collect()
    }

    /// Concrete bits of a combination, for checking transcript consistency.
    pub fn evaluate(&self, combination: &GfVec) -> BitString {
        let mut out = BitString::zero(self.key_length);
        combination
            .support()
            .for_each(|i| out.xor_assign(&self.bits[i]));
        out
    }

    /// `K_{A1} ^ K_{12}`-style rendering of a combination.
    pub fn render(&self, combination: &GfVec) -> String {
        let parts: Vec<String> = combination
            .support()
            .map(|i| self.symbols[i].to_string())
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" ^ ")
        }
    }
}

pub(crate) fn link_symbol(net: &Network, u: &NodeId, v: &NodeId) -> Symbol {
    let rank = |x: &NodeId| {
        if x == net.endpoint_a() {
            0
        } else if x == net.endpoint_b() {
            2
        } else {
            1
        }
    };
    if (rank(u), u) <= (rank(v), v) {
        Symbol::Link(u.clone(), v.clone())
    } else {
        Symbol::Link(v.clone(), u.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net_model::build_mnop;

    #[test]
    fn symbol_names_put_endpoints_outside() {
        let net = build_mnop(&[1], 0.0).unwrap();
        let space = KeySpace::zeroed(&net, 1, 8).unwrap();
        let names: Vec<String> = space.symbols().iter().map(ToString::to_string).collect();
        assert_eq!(names, ["K_{A,p1_1}", "K_{p1_1,B}", "K_{1}"]);
    }

    #[test]
    fn seeded_bits() {
        let net = build_mnop(&[2, 2], 0.0).unwrap();
        let a = KeySpace::new(&net, 2, 13, 9).unwrap();
        let b = KeySpace::new(&net, 2, 13, 9).unwrap();
        let c = KeySpace::new(&net, 2, 13, 10).unwrap();
        assert_eq!(a.bits, b.bits);
        assert_ne!(a.bits, c.bits);
        assert!(a
            .bits
            .iter()
            .all(|s| s.to_hex().len() == 4 && s.bytes[1] < 32));
        assert!(KeySpace::new(&net, 0, 0, 1).is_err());
    }

    #[test]
    fn evaluate_matches_xor() {
        let net = build_mnop(&[2], 0.0).unwrap();
        let space = KeySpace::new(&net, 0, 64, 3).unwrap();
        let mut v = space.value(0);
        v.xor(&space.value(2));
        assert_eq!(space.evaluate(&v.combination), v.bits);
        v.xor(&space.value(2));
        assert_eq!(v.bits, *space.bits(0));
    }
}
