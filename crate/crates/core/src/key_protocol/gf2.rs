use std::ops::BitXorAssign;

/// A vector over GF(2), one bit per key symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GfVec {
    words: Vec<u64>,
    len: usize,
}

impl GfVec {
    pub fn zero(len: usize) -> Self {
        GfVec {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = GfVec::zero(len);
        v.flip(i);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Indices of the set coordinates, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    fn highest(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(k, &w)| k * 64 + 63 - w.leading_zeros() as usize)
    }
}

impl BitXorAssign<&GfVec> for GfVec {
    fn bitxor_assign(&mut self, rhs: &GfVec) {
        assert_eq!(self.len, rhs.len, "GF(2) vectors of different lengths");
        self.words
            .iter_mut()
            .zip(&rhs.words)
            .for_each(|(a, b)| *a ^= b);
    }
}

/// Row-echelon basis of a subspace, kept reduced by leading coordinate.
#[derive(Debug, Clone)]
pub struct Span {
    pivots: Vec<Option<GfVec>>,
    rank: usize,
}

impl Span {
    pub fn new(len: usize) -> Self {
        Span {
            pivots: vec![None; len],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn reduce(&self, mut v: GfVec) -> GfVec {
        while let Some(h) = v.highest() {
            match &self.pivots[h] {
                Some(row) => v ^= row,
                None => break,
            }
        }
        v
    }

    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: GfVec) -> bool {
        let v = self.reduce(v);
        match v.highest() {
            Some(h) => {
                self.pivots[h] = Some(v);
                self.rank += 1;
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &GfVec) -> bool {
        self.reduce(v.clone()).is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(len: usize, bits: &[usize]) -> GfVec {
        let mut v = GfVec::zero(len);
        bits.iter().for_each(|&b| v.flip(b));
        v
    }

    #[test]
    fn span_membership() {
        let mut s = Span::new(5);
        assert!(s.insert(vec_of(5, &[0, 1])));
        assert!(s.insert(vec_of(5, &[1, 2])));
        assert!(!s.insert(vec_of(5, &[0, 2])));
        assert_eq!(s.rank(), 2);
        assert!(s.contains(&vec_of(5, &[0, 2])));
        assert!(s.contains(&GfVec::zero(5)));
        assert!(!s.contains(&vec_of(5, &[0])));
        assert!(!s.contains(&vec_of(5, &[3])));
    }

    #[test]
    fn wide_vectors() {
        let mut s = Span::new(130);
        s.insert(vec_of(130, &[3, 70, 129]));
        s.insert(vec_of(130, &[70]));
        assert!(s.contains(&vec_of(130, &[3, 129])));
        assert!(!s.contains(&vec_of(130, &[3])));
        assert_eq!(
            vec_of(130, &[3, 70, 129]).support().collect::<Vec<_>>(),
            vec![3, 70, 129]
        );
    }

    #[test]
    fn rank_matches_brute_force() {
        // Rank equals log2 of the number of distinct XOR combinations.
        let rows = [0b10110u64, 0b01101, 0b11011, 0b00111, 0b10001];
        let mut s = Span::new(5);
        for r in rows {
            s.insert(vec_of(
                5,
                &(0..5).filter(|&i| r >> i & 1 == 1).collect::<Vec<_>>(),
            ));
        }
        let mut reachable = std::collections::BTreeSet::new();
        for sel in 0u32..32 {
            reachable.insert(
                (0..5)
                    .filter(|&i| sel >> i & 1 == 1)
                    .fold(0u64, |a, i| a ^ rows[i]),
            );
        }
        assert_eq!(1usize << s.rank(), reachable.len());
    }
}
