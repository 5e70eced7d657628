//! The four-element alphabet `{0, 1, 2, 3}` and its Klein four-group structure.
//!
//! Element `i` stands for the circle automorphism `g_i`; the group law is
//! `g_i g_j = g_k  <=>  i + j = k`. With the index encoding used here the
//! addition table is exactly bitwise xor of the indices, and the two linear
//! functionals read off single bits:
//!
//! | elem | lo | hi | alpha | beta | alpha+beta | conj |
//! |------|----|----|-------|------|------------|------|
//! | 0    | 0  | 0  | 0     | 0    | 0          | 0    |
//! | 1    | 1  | 0  | 1     | 1    | 0          | 1    |
//! | 2    | 0  | 1  | 1     | 0    | 1          | 3    |
//! | 3    | 1  | 1  | 0     | 1    | 1          | 2    |

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use crate::error::Error;

/// Element of the field with two elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bit(pub bool);

impl Bit {
    pub const ZERO: Bit = Bit(false);
    pub const ONE: Bit = Bit(true);

    pub fn from_u64_parity(x: u64) -> Bit {
        Bit(x & 1 == 1)
    }

    pub fn as_u8(self) -> u8 {
        self.0 as u8
    }

    /// The embedding `Z_2 -> S` onto the subgroup `{0, 1}`.
    pub fn to_selem(self) -> SElem {
        if self.0 {
            SElem::ONE
        } else {
            SElem::ZERO
        }
    }
}

impl Add for Bit {
    type Output = Bit;
    fn add(self, rhs: Bit) -> Bit {
        Bit(self.0 ^ rhs.0)
    }
}

impl AddAssign for Bit {
    fn add_assign(&mut self, rhs: Bit) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Bit {
    type Output = Bit;
    fn mul(self, rhs: Bit) -> Bit {
        Bit(self.0 & rhs.0)
    }
}

impl From<bool> for Bit {
    fn from(b: bool) -> Self {
        Bit(b)
    }
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Element of the Klein four-group `S = {0, 1, 2, 3}`.
///
/// Ordered `0 < 1 < 2 < 3`; the matrix canonical order relies on this.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SElem(u8);

impl SElem {
    pub const ZERO: SElem = SElem(0);
    pub const ONE: SElem = SElem(1);
    pub const TWO: SElem = SElem(2);
    pub const THREE: SElem = SElem(3);

    pub const ALL: [SElem; 4] = [SElem::ZERO, SElem::ONE, SElem::TWO, SElem::THREE];

    pub fn new(index: u8) -> Result<SElem, Error> {
        if index < 4 {
            Ok(SElem(index))
        } else {
            Err(Error::InvalidElement(index))
        }
    }

    /// Builds an element from its two index bits.
    #[inline]
    pub fn from_bits(lo: bool, hi: bool) -> SElem {
        SElem(lo as u8 | (hi as u8) << 1)
    }

    #[inline]
    pub fn index(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn lo(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn hi(self) -> bool {
        self.0 & 2 == 2
    }

    /// The involution fixing `0` and `1` and swapping `2` and `3`.
    #[inline]
    pub fn conj(self) -> SElem {
        SElem(self.0 ^ (self.0 >> 1))
    }

    #[inline]
    pub fn alpha(self) -> Bit {
        Bit(self.lo() ^ self.hi())
    }

    #[inline]
    pub fn beta(self) -> Bit {
        Bit(self.lo())
    }

    /// Coefficient of `alpha + beta`: one exactly on `{2, 3}`.
    #[inline]
    pub fn alpha_plus_beta(self) -> Bit {
        Bit(self.hi())
    }

    /// `k * self`, i.e. `self` added to itself `k` times.
    pub fn times(self, k: usize) -> SElem {
        if k % 2 == 0 {
            SElem::ZERO
        } else {
            self
        }
    }

    pub fn to_digit(self) -> char {
        (b'0' + self.0) as char
    }

    pub fn from_digit(c: char) -> Option<SElem> {
        match c {
            '0'..='3' => Some(SElem(c as u8 - b'0')),
            _ => None,
        }
    }
}

impl Add for SElem {
    type Output = SElem;
    #[inline]
    fn add(self, rhs: SElem) -> SElem {
        SElem(self.0 ^ rhs.0)
    }
}

impl AddAssign for SElem {
    #[inline]
    fn add_assign(&mut self, rhs: SElem) {
        self.0 ^= rhs.0;
    }
}

impl std::iter::Sum for SElem {
    fn sum<I: Iterator<Item = SElem>>(iter: I) -> SElem {
        iter.fold(SElem::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for SElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
