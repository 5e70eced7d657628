//! Matrices over `S`, stored as two bit-planes per row.
//!
//! Row `i` keeps the low and high index bits of its entries in two `u64`
//! masks, so adding rows is two xors and the set of columns holding `1` is
//! `lo & !hi`. Both dimensions are limited to 64.
//!
//! Text format: one row per line, digits `0`-`3`, whitespace between digits
//! ignored, `#` starts a comment, blank lines separate matrices.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::salgebra::SElem;
use crate::subset::{full_mask, GrayWalk, Subset, MAX_UNIVERSE};

/// One row (or a sum of rows) as two bit-planes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Row {
    pub lo: u64,
    pub hi: u64,
}

impl Row {
    pub const ZERO: Row = Row { lo: 0, hi: 0 };

    #[inline]
    pub fn get(self, j: usize) -> SElem {
        SElem::from_bits(self.lo >> j & 1 == 1, self.hi >> j & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, j: usize, v: SElem) {
        let bit = 1u64 << j;
        self.lo = (self.lo & !bit) | ((v.lo() as u64) << j);
        self.hi = (self.hi & !bit) | ((v.hi() as u64) << j);
    }

    /// Columns holding `1`.
    #[inline]
    pub fn ones(self) -> u64 {
        self.lo & !self.hi
    }

    /// Columns holding `2` or `3`.
    #[inline]
    pub fn twos_or_threes(self) -> u64 {
        self.hi
    }

    /// Columns holding `0`.
    #[inline]
    pub fn zeros(self, cols: usize) -> u64 {
        !(self.lo | self.hi) & full_mask(cols)
    }

    /// Conjugates the entries in the columns of `mask`.
    #[inline]
    pub fn conj_columns(self, mask: u64) -> Row {
        Row { lo: self.lo ^ (self.hi & mask), hi: self.hi }
    }

    /// Sum of the entries in the columns of `mask`.
    #[inline]
    pub fn sum_over(self, mask: u64) -> SElem {
        SElem::from_bits(
            (self.lo & mask).count_ones() & 1 == 1,
            (self.hi & mask).count_ones() & 1 == 1,
        )
    }

    pub fn to_vec(self, cols: usize) -> Vec<SElem> {
        (0..cols).map(|j| self.get(j)).collect()
    }
}

impl std::ops::Add for Row {
    type Output = Row;
    #[inline]
    fn add(self, rhs: Row) -> Row {
        Row { lo: self.lo ^ rhs.lo, hi: self.hi ^ rhs.hi }
    }
}

impl std::ops::AddAssign for Row {
    #[inline]
    fn add_assign(&mut self, rhs: Row) {
        self.lo ^= rhs.lo;
        self.hi ^= rhs.hi;
    }
}

/// A `d x n` matrix over `S` with `1 <= d, n <= 64`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SMatrix {
    rows: Vec<Row>,
    cols: usize,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::Precondition("matrix dimensions must be positive".into()));
    }
    if rows > MAX_UNIVERSE {
        return Err(Error::TooLarge(rows));
    }
    if cols > MAX_UNIVERSE {
        return Err(Error::TooLarge(cols));
    }
    Ok(())
}

impl SMatrix {
    pub fn from_rows(rows: Vec<Vec<SElem>>) -> Result<SMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        check_dims(rows.len(), cols)?;
        let mut out = Vec::with_capacity(rows.len());
        for r in &rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            let mut row = Row::ZERO;
            for (j, &v) in r.iter().enumerate() {
                row.set(j, v);
            }
            out.push(row);
        }
        Ok(SMatrix { rows: out, cols })
    }

    pub fn from_planes(rows: Vec<Row>, cols: usize) -> Result<SMatrix> {
        check_dims(rows.len(), cols)?;
        let m = full_mask(cols);
        if rows.iter().any(|r| (r.lo | r.hi) & !m != 0) {
            return Err(Error::Precondition("row planes have bits beyond the column count".into()));
        }
        Ok(SMatrix { rows, cols })
    }

    pub(crate) fn from_planes_unchecked(rows: Vec<Row>, cols: usize) -> SMatrix {
        SMatrix { rows, cols }
    }

    /// Builds from digit strings, e.g. `["132", "213"]`.
    pub fn from_digit_rows<S: AsRef<str>>(rows: &[S]) -> Result<SMatrix> {
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(k, r)| parse_row(r.as_ref(), k + 1))
            .collect::<Result<Vec<_>>>()?;
        SMatrix::from_rows(parsed)
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows.len() == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> SElem {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, v: SElem) {
        assert!(j < self.cols);
        self.rows[i].set(j, v);
    }

    #[inline]
    pub fn row(&self, i: usize) -> Row {
        self.rows[i]
    }

    pub fn planes(&self) -> &[Row] {
        &self.rows
    }

    pub fn to_digit_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| (0..self.cols).map(|j| r.get(j).to_digit()).collect())
            .collect()
    }

    /// Entries in row-major order, the order used to compare matrices.
    pub fn entries(&self) -> impl Iterator<Item = SElem> + '_ {
        self.rows.iter().flat_map(move |r| (0..self.cols).map(move |j| r.get(j)))
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if i >= self.n_rows() {
            return Err(Error::IndexOutOfRange { what: "row", index: i, len: self.n_rows() });
        }
        Ok(())
    }

    fn check_col(&self, j: usize) -> Result<()> {
        if j >= self.cols {
            return Err(Error::IndexOutOfRange { what: "column", index: j, len: self.cols });
        }
        Ok(())
    }

    fn check_universe(&self, s: Subset, expected: usize) -> Result<()> {
        if s.universe() != expected {
            return Err(Error::DimensionMismatch { expected, found: s.universe() });
        }
        Ok(())
    }

    /// Sum of row `i` over the columns in `s`.
    pub fn row_sum(&self, i: usize, s: Subset) -> Result<SElem> {
        self.check_row(i)?;
        self.check_universe(s, self.cols)?;
        Ok(self.rows[i].sum_over(s.mask()))
    }

    /// Sum of column `j` over the rows in `u`.
    pub fn col_sum(&self, j: usize, u: Subset) -> Result<SElem> {
        self.check_col(j)?;
        self.check_universe(u, self.n_rows())?;
        Ok(self.combination_mask(u.mask()).get(j))
    }

    pub fn row_sums(&self) -> Vec<SElem> {
        let all = full_mask(self.cols);
        self.rows.iter().map(|r| r.sum_over(all)).collect()
    }

    pub fn col_sums(&self) -> Row {
        self.combination_mask(full_mask(self.n_rows()))
    }

    #[inline]
    pub(crate) fn combination_mask(&self, mut mask: u64) -> Row {
        let mut acc = Row::ZERO;
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            acc += self.rows[i];
            mask &= mask - 1;
        }
        acc
    }

    /// `M_U`, the sum of the rows in `u`.
    pub fn row_combination(&self, u: Subset) -> Result<Vec<SElem>> {
        self.check_universe(u, self.n_rows())?;
        Ok(self.combination_mask(u.mask()).to_vec(self.cols))
    }

    /// `J(U)`: the columns whose sum over the rows in `u` equals `1`.
    pub fn j_map(&self, u: Subset) -> Result<Subset> {
        self.check_universe(u, self.n_rows())?;
        Ok(Subset::raw(self.combination_mask(u.mask()).ones(), self.cols))
    }

    /// Every nonempty combination of rows contains a `1`.
    ///
    /// Walks all `2^d` row subsets; exponential in the row count.
    pub fn is_free(&self) -> bool {
        self.all_combinations(|r| r.ones() != 0)
    }

    /// Every nonempty combination of rows contains a `2` or a `3`.
    ///
    /// Walks all `2^d` row subsets; exponential in the row count.
    pub fn is_effective(&self) -> bool {
        self.all_combinations(|r| r.twos_or_threes() != 0)
    }

    fn all_combinations<F: Fn(Row) -> bool>(&self, pred: F) -> bool {
        let d = self.n_rows();
        assert!(d < 64, "row subsets of a 64-row matrix cannot be enumerated");
        let mut acc = Row::ZERO;
        for (_, flip) in GrayWalk::new(d) {
            if let Some(i) = flip {
                acc += self.rows[i];
                if !pred(acc) {
                    return false;
                }
            }
        }
        true
    }

    /// `1` at positions `(i, i)` and `2` or `3` everywhere else; defined for `d <= n`.
    pub fn is_distinguished(&self) -> Result<bool> {
        if self.n_rows() > self.cols {
            return Err(Error::Precondition(format!(
                "distinguished requires rows <= cols, got {}x{}",
                self.n_rows(),
                self.cols
            )));
        }
        Ok(self.is_distinguished_shape())
    }

    pub(crate) fn is_distinguished_shape(&self) -> bool {
        let all = full_mask(self.cols);
        self.rows.iter().enumerate().all(|(i, r)| {
            let diag = 1u64 << i;
            r.hi == all & !diag && r.lo & diag == diag
        })
    }

    /// `M_ij = conj(M_ji)` for all `i, j`.
    pub fn is_self_conjugate(&self) -> Result<bool> {
        self.require_square()?;
        let n = self.cols;
        for i in 0..n {
            for j in i..n {
                if self.get(i, j) != self.get(j, i).conj() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.n_rows(), cols: self.cols });
        }
        Ok(())
    }

    pub fn transpose(&self) -> SMatrix {
        let mut rows = vec![Row::ZERO; self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, t) in rows.iter_mut().enumerate() {
                t.set(i, r.get(j));
            }
        }
        SMatrix { rows, cols: self.n_rows() }
    }

    /// Rows and columns restricted to `idx`, order preserved.
    pub fn principal_submatrix(&self, idx: Subset) -> Result<SMatrix> {
        self.require_square()?;
        self.check_universe(idx, self.cols)?;
        if idx.is_empty() {
            return Err(Error::Precondition("principal submatrix needs a nonempty index set".into()));
        }
        let keep = idx.to_vec();
        let rows = keep
            .iter()
            .map(|&i| {
                let mut r = Row::ZERO;
                for (k, &j) in keep.iter().enumerate() {
                    r.set(k, self.get(i, j));
                }
                r
            })
            .collect();
        Ok(SMatrix { rows, cols: keep.len() })
    }

    /// Distinguished, all column sums zero, and `J(U)` nonempty for every
    /// proper nonempty row subset `U`.
    pub fn is_hw_matrix(&self) -> Result<bool> {
        self.require_square()?;
        Ok(self.is_distinguished_shape() && self.col_sums() == Row::ZERO && self.j_nonvanishing())
    }

    fn j_nonvanishing(&self) -> bool {
        let n = self.n_rows();
        let full = full_mask(n);
        let mut acc = Row::ZERO;
        for (mask, flip) in GrayWalk::new(n) {
            if let Some(i) = flip {
                acc += self.rows[i];
                if mask != full && acc.ones() == 0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn drop_row(&self, i: usize) -> Result<SMatrix> {
        self.check_row(i)?;
        if self.n_rows() == 1 {
            return Err(Error::Precondition("cannot drop the only row".into()));
        }
        let mut rows = self.rows.clone();
        rows.remove(i);
        Ok(SMatrix { rows, cols: self.cols })
    }

    /// Appends the row forced by zero column sums and checks the result is a
    /// HW-matrix. Inverse of `drop_row(·, n-1)`.
    pub fn complete_to_hw(&self) -> Result<SMatrix> {
        let n = self.cols;
        if self.n_rows() + 1 != n {
            return Err(Error::Precondition(format!(
                "completion needs an (n-1)xn matrix, got {}x{}",
                self.n_rows(),
                n
            )));
        }
        if !self.is_distinguished_shape() {
            return Err(Error::Precondition("matrix is not distinguished".into()));
        }
        if !self.is_free() {
            return Err(Error::Precondition("matrix is not free".into()));
        }
        if !self.is_effective() {
            return Err(Error::Precondition("matrix is not effective".into()));
        }
        let mut rows = self.rows.clone();
        rows.push(self.col_sums());
        let m = SMatrix { rows, cols: n };
        if !m.is_distinguished_shape() {
            let last = m.row(n - 1).to_vec(n);
            return Err(Error::Precondition(format!(
                "forced last row {} is not distinguished",
                last.iter().map(|e| e.to_digit()).collect::<String>()
            )));
        }
        if !m.is_hw_matrix()? {
            return Err(Error::Precondition("completion is not a HW-matrix".into()));
        }
        Ok(m)
    }

    /// Conjugates the entries of the columns in `mask`.
    pub fn conj_columns(&self, mask: u64) -> SMatrix {
        SMatrix { rows: self.rows.iter().map(|r| r.conj_columns(mask)).collect(), cols: self.cols }
    }

    /// Uniformly random distinguished `rows x cols` matrix.
    pub fn random_distinguished<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> SMatrix {
        assert!(rows >= 1 && rows <= cols && cols <= MAX_UNIVERSE);
        let all = full_mask(cols);
        let rows = (0..rows)
            .map(|i| {
                let diag = 1u64 << i;
                Row { lo: (rng.gen::<u64>() & all & !diag) | diag, hi: all & !diag }
            })
            .collect();
        SMatrix { rows, cols }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> SMatrix {
        assert!(rows >= 1 && cols >= 1 && rows <= MAX_UNIVERSE && cols <= MAX_UNIVERSE);
        let all = full_mask(cols);
        let rows = (0..rows).map(|_| Row { lo: rng.gen::<u64>() & all, hi: rng.gen::<u64>() & all }).collect();
        SMatrix { rows, cols }
    }

    /// Digit text, one row per line, each line newline-terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.n_rows() * (self.cols + 1));
        for r in self.to_digit_rows() {
            s.push_str(&r);
            s.push('\n');
        }
        s
    }
}

impl PartialOrd for SMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Dimensions first, then row-major entries with `0 < 1 < 2 < 3`.
impl Ord for SMatrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n_rows(), self.cols)
            .cmp(&(other.n_rows(), other.cols))
            .then_with(|| self.entries().cmp(other.entries()))
    }
}

impl fmt::Debug for SMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SMatrix[{}]", self.to_digit_rows().join(" "))
    }
}

impl fmt::Display for SMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for SMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_digit_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<SMatrix, D::Error> {
        let rows: Vec<String> = Vec::deserialize(deserializer)?;
        SMatrix::from_digit_rows(&rows).map_err(serde::de::Error::custom)
    }
}

fn parse_row(text: &str, line: usize) -> Result<Vec<SElem>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| {
            SElem::from_digit(c).ok_or_else(|| Error::Parse {
                line,
                message: format!("unexpected character {c:?}, expected a digit 0-3"),
            })
        })
        .collect()
}

/// Parses every matrix in a digit-format document.
pub fn parse_matrices(text: &str) -> Result<Vec<SMatrix>> {
    let mut out = Vec::new();
    let mut block: Vec<Vec<SElem>> = Vec::new();
    let mut block_start = 0;
    let flush = |block: &mut Vec<Vec<SElem>>, start: usize, out: &mut Vec<SMatrix>| -> Result<()> {
        if block.is_empty() {
            return Ok(());
        }
        let rows = std::mem::take(block);
        let width = rows[0].len();
        if let Some(k) = rows.iter().position(|r| r.len() != width) {
            return Err(Error::Parse {
                line: start + k,
                message: format!("row has {} entries, expected {}", rows[k].len(), width),
            });
        }
        let m = SMatrix::from_rows(rows).map_err(|e| Error::Parse { line: start, message: e.to_string() })?;
        out.push(m);
        Ok(())
    };
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            // A comment-only line does not end a block.
            if raw.trim().is_empty() {
                flush(&mut block, block_start, &mut out)?;
            }
            continue;
        }
        if block.is_empty() {
            block_start = line;
        }
        block.push(parse_row(content, line)?);
    }
    flush(&mut block, block_start, &mut out)?;
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

/// Renders matrices as blocks separated by blank lines.
pub fn format_matrices<'a, I: IntoIterator<Item = &'a SMatrix>>(matrices: I) -> String {
    let mut s = String::new();
    for (k, m) in matrices.into_iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        s.push_str(&m.to_text());
    }
    s
}

impl FromStr for SMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<SMatrix> {
        let mut ms = parse_matrices(s)?;
        if ms.len() != 1 {
            return Err(Error::Parse { line: 1, message: format!("expected one matrix, found {}", ms.len()) });
        }
        Ok(ms.remove(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&str]) -> SMatrix {
        SMatrix::from_digit_rows(rows).unwrap()
    }

    fn sub(idx: &[usize], universe: usize) -> Subset {
        Subset::from_indices(idx.iter().map(|i| i - 1), universe).unwrap()
    }

    fn example_a() -> SMatrix {
        m(&["132", "213"])
    }

    fn circulant3() -> SMatrix {
        m(&["132", "213", "321"])
    }

    #[test]
    fn row_sums() {
        let a = example_a();
        assert_eq!(a.row_sum(0, Subset::full(3)).unwrap(), SElem::ZERO);
        assert_eq!(a.row_sum(0, Subset::empty(3)).unwrap(), SElem::ZERO);
        assert_eq!(a.row_sum(1, sub(&[1, 2], 3)).unwrap(), SElem::THREE);
        assert!(a.row_sum(2, Subset::full(3)).is_err());
        assert!(a.row_sum(0, Subset::full(4)).is_err());
    }

    #[test]
    fn col_sums() {
        let a = example_a();
        assert_eq!(a.col_sum(0, sub(&[1, 2], 2)).unwrap(), SElem::THREE);
        assert_eq!(a.col_sum(0, Subset::empty(2)).unwrap(), SElem::ZERO);
        assert_eq!(circulant3().col_sum(0, Subset::full(3)).unwrap(), SElem::ZERO);
        assert!(a.col_sum(3, Subset::full(2)).is_err());
    }

    #[test]
    fn row_combination_and_j_map() {
        let a = example_a();
        assert_eq!(a.row_combination(sub(&[1], 2)).unwrap(), a.row(0).to_vec(3));
        assert_eq!(
            a.row_combination(sub(&[1, 2], 2)).unwrap(),
            vec![SElem::THREE, SElem::TWO, SElem::ONE]
        );
        assert_eq!(a.row_combination(Subset::empty(2)).unwrap(), vec![SElem::ZERO; 3]);
        assert_eq!(a.j_map(sub(&[1, 2], 2)).unwrap(), sub(&[3], 3));
        assert_eq!(a.j_map(Subset::empty(2)).unwrap(), Subset::empty(3));
        let c = circulant3();
        for i in 0..3 {
            let u = Subset::singleton(i, 3).unwrap();
            assert_eq!(c.j_map(u).unwrap(), u);
        }
    }

    #[test]
    fn free_and_effective() {
        assert!(example_a().is_free());
        assert!(!m(&["22"]).is_free());
        assert!(m(&["11"]).is_free());
        assert!(example_a().is_effective());
        assert!(!m(&["11"]).is_effective());
        assert!(!m(&["23", "32"]).is_effective());
    }

    #[test]
    fn distinguished() {
        assert!(circulant3().is_distinguished().unwrap());
        assert!(example_a().is_distinguished().unwrap());
        assert!(!m(&["10", "21"]).is_distinguished().unwrap());
        assert!(example_a().transpose().is_distinguished().is_err());
    }

    #[test]
    fn self_conjugate() {
        assert!(m(&["12", "31"]).is_self_conjugate().unwrap());
        assert!(!m(&["12", "21"]).is_self_conjugate().unwrap());
        assert!(m(&["123", "312", "231"]).is_self_conjugate().unwrap());
        assert!(example_a().is_self_conjugate().is_err());
    }

    #[test]
    fn principal_submatrices() {
        let c = circulant3();
        assert_eq!(c.principal_submatrix(Subset::full(3)).unwrap(), c);
        assert_eq!(c.principal_submatrix(sub(&[2], 3)).unwrap(), m(&["1"]));
        assert!(c.principal_submatrix(Subset::empty(3)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let big = SMatrix::random_distinguished(5, 5, &mut rng);
        let s = big.principal_submatrix(sub(&[2, 4, 5], 5)).unwrap();
        assert_eq!(s.n_rows(), 3);
        assert!(s.is_distinguished().unwrap());
        assert_eq!(s.get(0, 1), big.get(1, 3));
        assert_eq!(s.get(2, 0), big.get(4, 1));
    }

    #[test]
    fn hw_matrices() {
        assert!(circulant3().is_hw_matrix().unwrap());
        assert!(!m(&["1222", "2122", "2212", "2221"]).is_hw_matrix().unwrap());
        // column 1 sums to 1
        assert!(!m(&["100", "010", "001"]).is_hw_matrix().unwrap());
        assert!(example_a().is_hw_matrix().is_err());
    }

    #[test]
    fn even_degree_distinguished_is_never_hw() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 6] {
            for _ in 0..200 {
                assert!(!SMatrix::random_distinguished(n, n, &mut rng).is_hw_matrix().unwrap());
            }
        }
    }

    #[test]
    fn drop_and_complete() {
        let c = circulant3();
        assert_eq!(c.drop_row(2).unwrap(), example_a());
        assert_eq!(example_a().complete_to_hw().unwrap(), c);
        assert!(c.drop_row(3).is_err());
        // even degree: the forced row holds 0 or 1 off the diagonal
        let a = m(&["1222", "2122", "2212"]);
        let err = a.complete_to_hw().unwrap_err();
        assert!(matches!(err, Error::Precondition(_)), "{err}");
        assert!(m(&["22", "22"]).complete_to_hw().is_err());
    }

    #[test]
    fn text_format() {
        let text = "# header\n1 3 2\n213\n321   # trailing\n\n132\n213\n";
        let ms = parse_matrices(text).unwrap();
        assert_eq!(ms.len(), 2);
        assert_eq!(ms[0], circulant3());
        assert_eq!(ms[1], example_a());
        assert_eq!(format_matrices(&ms), "132\n213\n321\n\n132\n213\n");
        assert_eq!(parse_matrices("").unwrap_err(), Error::EmptyInput);
        assert_eq!(parse_matrices("# nothing\n\n").unwrap_err(), Error::EmptyInput);
        match parse_matrices("12\n1x\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        match parse_matrices("\n12\n123\n").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn json_format() {
        let j = serde_json::to_string(&example_a()).unwrap();
        assert_eq!(j, r#"["132","213"]"#);
        let back: SMatrix = serde_json::from_str(&j).unwrap();
        assert_eq!(back, example_a());
        assert!(serde_json::from_str::<SMatrix>(r#"["12","4"]"#).is_err());
    }

    fn any_matrix() -> impl Strategy<Value = SMatrix> {
        (1usize..8, 1usize..8, any::<u64>())
            .prop_map(|(r, c, seed)| SMatrix::random(r, c, &mut ChaCha8Rng::seed_from_u64(seed)))
    }

    fn distinguished_matrix(max_n: usize) -> impl Strategy<Value = SMatrix> {
        (1usize..=max_n, any::<u64>()).prop_flat_map(|(n, seed)| {
            (1usize..=n, Just(n), Just(seed)).prop_map(|(k, n, seed)| {
                SMatrix::random_distinguished(k, n, &mut ChaCha8Rng::seed_from_u64(seed))
            })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(a in any_matrix()) {
            let text = a.to_text();
            let back: SMatrix = text.parse().unwrap();
            prop_assert_eq!(&back, &a);
            prop_assert_eq!(back.to_text(), text);
        }

        #[test]
        fn column_sum_table(a in distinguished_matrix(12)) {
            let k = a.n_rows();
            let sums = a.col_sums();
            for j in 0..a.n_cols() {
                let v = sums.get(j);
                let in_23 = v == SElem::TWO || v == SElem::THREE;
                let expect_23 = (k % 2 == 0) == (j < k);
                prop_assert_eq!(in_23, expect_23, "k={} j={} v={}", k, j, v);
            }
        }

        #[test]
        fn j_map_agrees_with_column_sums(a in any_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = a.n_rows();
            let u = Subset::from_mask(rng.gen::<u64>() & full_mask(d), d).unwrap();
            let j = a.j_map(u).unwrap();
            for c in 0..a.n_cols() {
                prop_assert_eq!(j.contains(c), a.col_sum(c, u).unwrap() == SElem::ONE);
            }
        }
    }
}
