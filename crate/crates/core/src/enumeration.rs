//! Exhaustive generation of HW-matrices of a given odd degree.
//!
//! Column conjugations fix the diagonal, so every HW-matrix is obtained from
//! exactly one matrix with first row `[1, 2, .., 2]` by conjugating a subset of
//! the columns `2..n`. The search therefore fixes row 1, fills rows
//! `2..n-1` by backtracking, rejects a partial matrix as soon as some
//! nonempty set `U` of filled rows has `J(U)` empty, and appends the forced
//! last row. Subsets containing row `n` need no check: for zero column sums
//! `J(U) = J(complement of U)`.

use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{canonical_form, for_each_permutation, GroupElement};
use crate::error::{Error, Result};
use crate::smatrix::{Row, SMatrix};
use crate::subset::full_mask;

/// Largest degree enumerated without [`EnumOptions::allow_long`].
pub const DEFAULT_MAX_DEGREE: usize = 7;
/// Hard limit: the incremental check keeps `2^(n-1)` row sums.
pub const HARD_MAX_DEGREE: usize = 11;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Raw,
    Canonical,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "raw" => Ok(Mode::Raw),
            "canonical" => Ok(Mode::Canonical),
            _ => Err(Error::Precondition(format!("unknown mode `{s}`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Raw => "raw",
            Mode::Canonical => "canonical",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumOptions {
    /// Permit degrees above [`DEFAULT_MAX_DEGREE`].
    pub allow_long: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwCounts {
    pub degree: usize,
    pub raw_count: u64,
    pub class_count: u64,
    /// Matrices with first row `[1, 2, .., 2]`.
    pub normalized_count: u64,
}

pub fn check_degree(n: usize, opts: EnumOptions) -> Result<()> {
    if n < 3 || n % 2 == 0 {
        return Err(Error::Precondition(format!("HW-matrices exist only in odd degree n >= 3, got {n}")));
    }
    if n > HARD_MAX_DEGREE {
        return Err(Error::Precondition(format!("degree {n} exceeds the enumeration limit {HARD_MAX_DEGREE}")));
    }
    if n > DEFAULT_MAX_DEGREE && !opts.allow_long {
        return Err(Error::Precondition(format!(
            "degree {n} is a long-running enumeration; enable it explicitly"
        )));
    }
    Ok(())
}

/// Distinguished row `i` of width `n` with `3` exactly at the columns of `threes`.
#[inline]
pub(crate) fn distinguished_row(i: usize, n: usize, threes: u64) -> Row {
    let diag = 1u64 << i;
    Row { lo: diag | (threes & !diag), hi: full_mask(n) & !diag }
}

/// Spreads the low `n-1` bits of `c` over the columns other than `i`.
#[inline]
pub(crate) fn spread(c: u64, i: usize) -> u64 {
    let low = c & ((1u64 << i) - 1);
    let high = (c >> i) << (i + 1);
    low | high
}

struct Search {
    n: usize,
    rows: Vec<Row>,
    /// `sums[u]`: sum of the filled rows in the bit set `u`.
    sums: Vec<Row>,
}

impl Search {
    fn new(n: usize) -> Search {
        let mut s = Search { n, rows: Vec::with_capacity(n), sums: vec![Row::ZERO; 1 << (n - 1)] };
        s.rows.push(distinguished_row(0, n, 0));
        s.sums[1] = s.rows[0];
        s
    }

    /// Adds row `r` if every new subset keeps a nonempty J-set.
    fn try_push(&mut self, row: Row) -> bool {
        let r = self.rows.len();
        let base = 1usize << r;
        for u in 0..base {
            let s = self.sums[u] + row;
            if s.ones() == 0 {
                return false;
            }
            self.sums[base | u] = s;
        }
        self.rows.push(row);
        true
    }

    fn pop(&mut self) {
        self.rows.pop();
    }

    fn descend<F: FnMut(SMatrix)>(&mut self, emit: &mut F) {
        let n = self.n;
        let r = self.rows.len();
        if r == n - 1 {
            let total = self.sums[(1 << r) - 1];
            // column n over the defining rows must sum to 1
            if total.get(n - 1).index() != 1 {
                return;
            }
            let mut rows = self.rows.clone();
            rows.push(total);
            emit(SMatrix::from_planes_unchecked(rows, n));
            return;
        }
        for c in 0..1u64 << (n - 1) {
            if self.try_push(distinguished_row(r, n, spread(c, r))) {
                self.descend(emit);
                self.pop();
            }
        }
    }
}

/// HW-matrices of degree `n` with first row `[1, 2, .., 2]`, in search order.
/// Sharded by the second row.
pub fn enumerate_normalized(n: usize, opts: EnumOptions) -> Result<Vec<SMatrix>> {
    check_degree(n, opts)?;
    let shards: Vec<Vec<SMatrix>> = (0..1u64 << (n - 1))
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut s = Search::new(n);
            if s.try_push(distinguished_row(1, n, spread(c, 1))) {
                s.descend(&mut |m| out.push(m));
            }
            out
        })
        .collect();
    Ok(shards.into_iter().flatten().collect())
}

/// Calls `f` on every HW-matrix of degree `n`: each normalized matrix in
/// search order, followed by its column conjugations by ascending mask.
pub fn for_each_hw<F: FnMut(&SMatrix)>(n: usize, opts: EnumOptions, mut f: F) -> Result<()> {
    for m in enumerate_normalized(n, opts)? {
        for mask in 0..1u64 << (n - 1) {
            f(&m.conj_columns(mask << 1));
        }
    }
    Ok(())
}

/// One canonical representative per `G_n`-orbit, ascending.
pub fn enumerate_classes(n: usize, opts: EnumOptions) -> Result<Vec<SMatrix>> {
    Ok(classes_of_normalized(&enumerate_normalized(n, opts)?))
}

/// Conjugates the columns whose first-row entry is `3`.
pub fn normalize_first_row(m: &SMatrix) -> SMatrix {
    let r = m.row(0);
    m.conj_columns(r.lo & r.hi)
}

/// Orbit representatives of a set closed under `G_n` intersected with first
/// row `[1, 2, .., 2]`. Canonicalizes one matrix per orbit and marks the
/// rest of its normalized orbit as seen: for each permutation the column
/// conjugations are forced except in column 1.
fn classes_of_normalized(normalized: &[SMatrix]) -> Vec<SMatrix> {
    let mut seen: HashSet<SMatrix> = HashSet::with_capacity(normalized.len());
    let mut reps = BTreeSet::new();
    for m in normalized {
        if seen.contains(m) {
            continue;
        }
        reps.insert(canonical_form(m).expect("HW-matrices are square"));
        for_each_permutation(m.n_rows(), |p| {
            let g = GroupElement::from_perm(p.to_vec()).expect("a permutation");
            let img = normalize_first_row(&g.act(m).expect("degree matches"));
            seen.insert(img.conj_columns(1));
            seen.insert(img);
        });
    }
    reps.into_iter().collect()
}

/// Sorted canonical forms of `matrices`, deduplicated.
pub fn classes_of(matrices: &[SMatrix]) -> Vec<SMatrix> {
    let set = matrices
        .par_iter()
        .fold(BTreeSet::new, |mut acc, m| {
            acc.insert(canonical_form(m).expect("HW-matrices are square"));
            acc
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    set.into_iter().collect()
}

/// All HW-matrices of degree `n` in the given mode. Raw mode materializes
/// `2^(n-1)` times the normalized count; prefer [`for_each_hw`] for streaming.
pub fn enumerate_hw(n: usize, mode: Mode, opts: EnumOptions) -> Result<Vec<SMatrix>> {
    match mode {
        Mode::Canonical => enumerate_classes(n, opts),
        Mode::Raw => {
            let mut out = Vec::new();
            for_each_hw(n, opts, |m| out.push(m.clone()))?;
            Ok(out)
        }
    }
}

pub fn count_hw(n: usize, opts: EnumOptions) -> Result<HwCounts> {
    let normalized = enumerate_normalized(n, opts)?;
    let count = normalized.len() as u64;
    Ok(HwCounts {
        degree: n,
        raw_count: count << (n - 1),
        class_count: classes_of_normalized(&normalized).len() as u64,
        normalized_count: count,
    })
}

/// Corpus text: `#` header lines followed by the matrices in digit format.
pub fn corpus_text(n: usize, mode: Mode, matrices: &[SMatrix]) -> String {
    let mut out = format!(
        "# HW-matrices\n# n = {n}\n# mode = {mode}\n# count = {}\n# version = {}\n\n",
        matrices.len(),
        env!("CARGO_PKG_VERSION")
    );
    out.push_str(&crate::smatrix::format_matrices(matrices));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spread_skips_diagonal() {
        assert_eq!(spread(0b11, 0), 0b110);
        assert_eq!(spread(0b11, 1), 0b101);
        assert_eq!(spread(0b111, 3), 0b0111);
        assert_eq!(spread(0b1111, 2), 0b11011);
    }

    #[test]
    fn rows_are_distinguished() {
        let r = distinguished_row(1, 3, spread(0b10, 1));
        assert_eq!(r.to_vec(3).iter().map(|e| e.to_digit()).collect::<String>(), "213");
    }

    #[test]
    fn degree_checks() {
        assert!(check_degree(4, EnumOptions::default()).is_err());
        assert!(check_degree(1, EnumOptions::default()).is_err());
        assert!(check_degree(9, EnumOptions::default()).is_err());
        assert!(check_degree(9, EnumOptions { allow_long: true }).is_ok());
        assert!(check_degree(13, EnumOptions { allow_long: true }).is_err());
    }

    #[test]
    fn degree_three() {
        let norm = enumerate_normalized(3, EnumOptions::default()).unwrap();
        assert!(norm.iter().all(|m| m.is_hw_matrix().unwrap()));
        let classes = enumerate_classes(3, EnumOptions::default()).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].to_digit_rows(), vec!["122", "213", "331"]);
    }
}
