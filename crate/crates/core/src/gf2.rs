//! Dense bit vectors over GF(2) and incremental Gaussian elimination.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> BitVec {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.len);
        let w = &mut self.words[i / 64];
        let bit = 1u64 << (i % 64);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set index.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

struct PivotRow {
    vec: BitVec,
    combo: u64,
    pivot: usize,
}

/// Row-echelon basis built one vector at a time, tracking which inputs
/// combine to each stored row. At most 64 inputs.
pub struct Eliminator {
    len: usize,
    inputs: usize,
    rows: Vec<PivotRow>,
}

impl Eliminator {
    pub fn new(len: usize) -> Eliminator {
        Eliminator { len, inputs: 0, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Reduces `v` against the stored rows in insertion order; returns the
    /// residue and the input combination that was subtracted.
    fn reduce(&self, v: &BitVec) -> (BitVec, u64) {
        let mut v = v.clone();
        let mut combo = 0u64;
        for r in &self.rows {
            if v.get(r.pivot) {
                v.xor_assign(&r.vec);
                combo ^= r.combo;
            }
        }
        (v, combo)
    }

    /// Adds the next input vector. Returns `true` if it raised the rank.
    pub fn push(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.len, "bit vector length mismatch");
        assert!(self.inputs < 64, "at most 64 input vectors");
        let (v, combo) = self.reduce(v);
        let own = 1u64 << self.inputs;
        self.inputs += 1;
        match v.first_one() {
            Some(pivot) => {
                self.rows.push(PivotRow { vec: v, combo: combo ^ own, pivot });
                true
            }
            None => false,
        }
    }

    /// If `target` lies in the span of the inputs, a mask of inputs summing to it.
    pub fn solve(&self, target: &BitVec) -> Option<u64> {
        assert_eq!(target.len(), self.len, "bit vector length mismatch");
        let (residue, combo) = self.reduce(target);
        residue.is_zero().then_some(combo)
    }
}
