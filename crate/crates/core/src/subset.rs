//! Subsets of a finite index set `{0, .., m-1}` as the `Z_2`-algebra with
//! symmetric difference as addition and intersection as multiplication.
//!
//! Indices are 0-based in the API; text and JSON forms are 1-based.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::salgebra::Bit;

pub const MAX_UNIVERSE: usize = 64;

#[inline]
pub fn full_mask(m: usize) -> u64 {
    if m == 0 {
        0
    } else {
        u64::MAX >> (64 - m)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    mask: u64,
    universe: u8,
}

impl Subset {
    pub fn empty(universe: usize) -> Subset {
        assert!(universe <= MAX_UNIVERSE, "universe too large");
        Subset { mask: 0, universe: universe as u8 }
    }

    pub fn full(universe: usize) -> Subset {
        assert!(universe <= MAX_UNIVERSE, "universe too large");
        Subset { mask: full_mask(universe), universe: universe as u8 }
    }

    pub fn from_mask(mask: u64, universe: usize) -> Result<Subset> {
        if universe > MAX_UNIVERSE {
            return Err(Error::TooLarge(universe));
        }
        if mask & !full_mask(universe) != 0 {
            return Err(Error::IndexOutOfRange {
                what: "subset element",
                index: 63 - mask.leading_zeros() as usize,
                len: universe,
            });
        }
        Ok(Subset { mask, universe: universe as u8 })
    }

    /// Unchecked constructor for internal hot loops; stray high bits are cleared.
    #[inline]
    pub(crate) fn raw(mask: u64, universe: usize) -> Subset {
        Subset { mask: mask & full_mask(universe), universe: universe as u8 }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I, universe: usize) -> Result<Subset> {
        if universe > MAX_UNIVERSE {
            return Err(Error::TooLarge(universe));
        }
        let mut mask = 0u64;
        for i in indices {
            if i >= universe {
                return Err(Error::IndexOutOfRange { what: "subset element", index: i, len: universe });
            }
            mask |= 1 << i;
        }
        Ok(Subset { mask, universe: universe as u8 })
    }

    pub fn singleton(i: usize, universe: usize) -> Result<Subset> {
        Subset::from_indices([i], universe)
    }

    /// `{0, .., k-1}`.
    pub fn prefix(k: usize, universe: usize) -> Subset {
        assert!(k <= universe && universe <= MAX_UNIVERSE);
        Subset { mask: full_mask(k), universe: universe as u8 }
    }

    #[inline]
    pub fn mask(self) -> u64 {
        self.mask
    }

    #[inline]
    pub fn universe(self) -> usize {
        self.universe as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn is_full(self) -> bool {
        self.mask == full_mask(self.universe())
    }

    /// `|U| mod 2`.
    #[inline]
    pub fn parity(self) -> Bit {
        Bit::from_u64_parity(self.mask.count_ones() as u64)
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.mask >> i & 1 == 1
    }

    pub fn complement(self) -> Subset {
        Subset { mask: !self.mask & full_mask(self.universe()), universe: self.universe }
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.mask & !other.mask == 0
    }

    pub fn iter(self) -> SubsetIter {
        SubsetIter { mask: self.mask }
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// 1-based sorted indices, the external representation.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// Image under a permutation given as `perm[i] = sigma(i)`.
    pub fn permute(self, perm: &[usize]) -> Subset {
        debug_assert_eq!(perm.len(), self.universe());
        let mut mask = 0u64;
        for i in self.iter() {
            mask |= 1 << perm[i];
        }
        Subset { mask, universe: self.universe }
    }

    /// Iterates all subsets of `{0, .., m-1}` in increasing mask order.
    pub fn all(universe: usize) -> impl Iterator<Item = Subset> {
        assert!(universe < 64, "cannot enumerate the power set of 64 elements");
        (0..1u64 << universe).map(move |mask| Subset { mask, universe: universe as u8 })
    }
}

impl Add for Subset {
    type Output = Subset;
    fn add(self, rhs: Subset) -> Subset {
        debug_assert_eq!(self.universe, rhs.universe);
        Subset { mask: self.mask ^ rhs.mask, universe: self.universe }
    }
}

impl AddAssign for Subset {
    fn add_assign(&mut self, rhs: Subset) {
        debug_assert_eq!(self.universe, rhs.universe);
        self.mask ^= rhs.mask;
    }
}

impl Mul for Subset {
    type Output = Subset;
    fn mul(self, rhs: Subset) -> Subset {
        debug_assert_eq!(self.universe, rhs.universe);
        Subset { mask: self.mask & rhs.mask, universe: self.universe }
    }
}

pub struct SubsetIter {
    mask: u64,
}

impl Iterator for SubsetIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.mask == 0 {
            return None;
        }
        let i = self.mask.trailing_zeros() as usize;
        self.mask &= self.mask - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.mask.count_ones() as usize;
        (n, Some(n))
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self, self.universe)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

/// Deserializes from a 1-based index list; the universe is taken as the
/// largest index, so callers needing a specific universe should rebuild.
impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Subset, D::Error> {
        let v: Vec<usize> = Vec::deserialize(deserializer)?;
        let universe = v.iter().copied().max().unwrap_or(0);
        if v.contains(&0) {
            return Err(serde::de::Error::custom("subset indices are 1-based"));
        }
        Subset::from_indices(v.iter().map(|i| i - 1), universe).map_err(serde::de::Error::custom)
    }
}

/// Walks all subsets of `{0, .., m-1}` in reflected Gray-code order.
///
/// Yields `(subset_mask, flipped_index)`; the first item is the empty set with
/// no flip. Each later item differs from its predecessor in one element.
pub struct GrayWalk {
    step: u64,
    end: u64,
    current: u64,
}

impl GrayWalk {
    pub fn new(m: usize) -> GrayWalk {
        assert!(m < 64);
        GrayWalk { step: 0, end: 1u64 << m, current: 0 }
    }
}

impl Iterator for GrayWalk {
    type Item = (u64, Option<usize>);

    fn next(&mut self) -> Option<(u64, Option<usize>)> {
        if self.step >= self.end {
            return None;
        }
        let out = if self.step == 0 {
            (0, None)
        } else {
            let bit = self.step.trailing_zeros() as usize;
            self.current ^= 1 << bit;
            (self.current, Some(bit))
        };
        self.step += 1;
        Some(out)
    }
}

/// `binom(m, 2) mod 2`: one iff `m = 2, 3 (mod 4)`.
pub fn binom2_parity(m: usize) -> Bit {
    Bit(m & 2 == 2)
}
