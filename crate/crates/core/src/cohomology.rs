//! Polynomials of degree at most two over `Z_2[x_1, .., x_d]`.
//!
//! A [`QuadForm`] is packed as one bit vector with a fixed monomial order:
//! the squares `x_1^2, .., x_d^2` first, then the cross terms `x_i x_j`
//! (`i < j`) in lexicographic order. Printing follows the same order, e.g.
//! `x1^2 + x2^2 + x1*x2`.

use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::gf2::{BitVec, Eliminator};
use crate::salgebra::Bit;
use crate::smatrix::SMatrix;
use crate::subset::{full_mask, Subset};

/// Linear form `sum c_k x_k`; coefficient `k` is bit `k` of the mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinForm {
    coeffs: u64,
    vars: usize,
}

impl LinForm {
    pub fn zero(vars: usize) -> LinForm {
        assert!(vars <= 64);
        LinForm { coeffs: 0, vars }
    }

    pub fn from_mask(coeffs: u64, vars: usize) -> Result<LinForm> {
        if vars > 64 {
            return Err(Error::TooLarge(vars));
        }
        if coeffs & !full_mask(vars) != 0 {
            return Err(Error::Precondition("coefficient beyond the variable count".into()));
        }
        Ok(LinForm { coeffs, vars })
    }

    /// `x_k` (0-based).
    pub fn var(k: usize, vars: usize) -> LinForm {
        assert!(k < vars && vars <= 64);
        LinForm { coeffs: 1 << k, vars }
    }

    pub fn coeffs(self) -> u64 {
        self.coeffs
    }

    pub fn vars(self) -> usize {
        self.vars
    }

    pub fn coeff(self, k: usize) -> Bit {
        Bit(self.coeffs >> k & 1 == 1)
    }

    pub fn is_zero(self) -> bool {
        self.coeffs == 0
    }

    /// Value at `x_i := [i in U]`.
    pub fn eval(self, u: Subset) -> Bit {
        Bit::from_u64_parity((self.coeffs & u.mask()).count_ones() as u64)
    }

    /// Product of two linear forms; `x_k x_k` lands on the square `x_k^2`.
    pub fn mul(self, other: LinForm) -> Result<QuadForm> {
        if self.vars != other.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: other.vars });
        }
        let mut q = QuadForm::zero(self.vars);
        let mut f = self.coeffs;
        while f != 0 {
            let i = f.trailing_zeros() as usize;
            f &= f - 1;
            let mut g = other.coeffs;
            while g != 0 {
                let j = g.trailing_zeros() as usize;
                g &= g - 1;
                q.bits.flip(q.monomial_index(i, j));
            }
        }
        Ok(q)
    }
}

impl Add for LinForm {
    type Output = LinForm;
    fn add(self, rhs: LinForm) -> LinForm {
        assert_eq!(self.vars, rhs.vars, "linear forms over different variable counts");
        LinForm { coeffs: self.coeffs ^ rhs.coeffs, vars: self.vars }
    }
}

impl fmt::Debug for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinForm({self})")
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs == 0 {
            return f.write_str("0");
        }
        let terms: Vec<String> = Subset::raw(self.coeffs, self.vars).iter().map(|k| format!("x{}", k + 1)).collect();
        f.write_str(&terms.join(" + "))
    }
}

/// Homogeneous quadratic polynomial over `Z_2` in `d` variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadForm {
    vars: usize,
    bits: BitVec,
}

impl QuadForm {
    pub fn zero(vars: usize) -> QuadForm {
        assert!(vars <= 64);
        QuadForm { vars, bits: BitVec::zeros(vars + vars * vars.saturating_sub(1) / 2) }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn n_monomials(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    /// Position of `x_i x_j` in the monomial order.
    pub fn monomial_index(&self, i: usize, j: usize) -> usize {
        let d = self.vars;
        debug_assert!(i < d && j < d);
        if i == j {
            return i;
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        // cross terms preceding row i: sum_{a < i} (d - 1 - a)
        d + i * (2 * d - i - 1) / 2 + (j - i - 1)
    }

    /// Inverse of [`monomial_index`](Self::monomial_index): `(i, j)` with `i <= j`.
    pub fn monomial(&self, index: usize) -> (usize, usize) {
        let d = self.vars;
        if index < d {
            return (index, index);
        }
        let mut rest = index - d;
        for i in 0..d {
            let row = d - 1 - i;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
        }
        panic!("monomial index {index} out of range");
    }

    pub fn coeff(&self, i: usize, j: usize) -> Bit {
        Bit(self.bits.get(self.monomial_index(i, j)))
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: Bit) {
        let k = self.monomial_index(i, j);
        self.bits.set(k, v.0);
    }

    /// `x_i^2`.
    pub fn square(i: usize, vars: usize) -> QuadForm {
        let mut q = QuadForm::zero(vars);
        q.set_coeff(i, i, Bit::ONE);
        q
    }

    pub fn is_zero(&self) -> bool {
        self.bits.is_zero()
    }

    pub fn has_squares(&self) -> bool {
        (0..self.vars).any(|i| self.bits.get(i))
    }

    /// Nonzero monomials `(i, j)`, `i <= j`, in the canonical order.
    pub fn monomials(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones().map(|k| self.monomial(k))
    }

    /// Projection onto the square-free part: square coefficients zeroed.
    pub fn strip_squares(&self) -> QuadForm {
        let mut q = self.clone();
        for i in 0..self.vars {
            q.bits.set(i, false);
        }
        q
    }

    /// Value at `x_i := [i in U]`.
    pub fn kappa_eval(&self, u: Subset) -> Bit {
        let m = u.mask();
        Bit(self
            .monomials()
            .fold(false, |acc, (i, j)| acc ^ (m >> i & 1 == 1 && m >> j & 1 == 1)))
    }

    fn check_vars(&self, other: &QuadForm) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::DimensionMismatch { expected: self.vars, found: other.vars });
        }
        Ok(())
    }
}

impl Add for QuadForm {
    type Output = QuadForm;
    fn add(mut self, rhs: QuadForm) -> QuadForm {
        self += &rhs;
        self
    }
}

impl Add<&QuadForm> for QuadForm {
    type Output = QuadForm;
    fn add(mut self, rhs: &QuadForm) -> QuadForm {
        self += rhs;
        self
    }
}

impl AddAssign<&QuadForm> for QuadForm {
    fn add_assign(&mut self, rhs: &QuadForm) {
        assert_eq!(self.vars, rhs.vars, "quadratic forms over different variable counts");
        self.bits.xor_assign(&rhs.bits);
    }
}

impl fmt::Debug for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadForm[{}]({self})", self.vars)
    }
}

impl fmt::Display for QuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, j) in self.monomials() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if i == j {
                write!(f, "x{}^2", i + 1)?;
            } else {
                write!(f, "x{}*x{}", i + 1, j + 1)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn check_col(a: &SMatrix, j: usize) -> Result<()> {
    if j >= a.n_cols() {
        return Err(Error::IndexOutOfRange { what: "column", index: j, len: a.n_cols() });
    }
    Ok(())
}

fn column_form(a: &SMatrix, j: usize, pick: impl Fn(crate::smatrix::Row) -> u64) -> LinForm {
    let mut coeffs = 0u64;
    for (k, &r) in a.planes().iter().enumerate() {
        coeffs |= (pick(r) >> j & 1) << k;
    }
    LinForm { coeffs, vars: a.n_rows() }
}

/// `alpha_j = sum_k alpha(A_kj) x_k`.
pub fn alpha_form(a: &SMatrix, j: usize) -> Result<LinForm> {
    check_col(a, j)?;
    Ok(column_form(a, j, |r| r.lo ^ r.hi))
}

/// `beta_j = sum_k beta(A_kj) x_k`.
pub fn beta_form(a: &SMatrix, j: usize) -> Result<LinForm> {
    check_col(a, j)?;
    Ok(column_form(a, j, |r| r.lo))
}

/// `alpha_j + beta_j`, the degree-one factor of column `j`.
pub fn ell_form(a: &SMatrix, j: usize) -> Result<LinForm> {
    check_col(a, j)?;
    Ok(column_form(a, j, |r| r.hi))
}

/// `theta_j = alpha_j * beta_j`.
pub fn theta(a: &SMatrix, j: usize) -> Result<QuadForm> {
    alpha_form(a, j)?.mul(beta_form(a, j)?)
}

pub fn thetas(a: &SMatrix) -> Vec<QuadForm> {
    (0..a.n_cols()).map(|j| theta(a, j).expect("column in range")).collect()
}

/// Degree-two part of `prod_j (1 + alpha_j + beta_j)`.
///
/// Accumulated column by column as `e2 += e1 * l_j; e1 += l_j`, so only the
/// elementary symmetric pieces of degree one and two are ever held.
pub fn sw2(a: &SMatrix) -> QuadForm {
    let d = a.n_rows();
    let mut e1 = LinForm::zero(d);
    let mut e2 = QuadForm::zero(d);
    for j in 0..a.n_cols() {
        let l = ell_form(a, j).expect("column in range");
        e2 += &e1.mul(l).expect("same variable count");
        e1 = e1 + l;
    }
    e2
}

/// `sum_{i<j} x_i x_j`.
pub fn sigma2(vars: usize) -> QuadForm {
    let mut q = QuadForm::zero(vars);
    for k in vars..q.n_monomials() {
        q.bits.set(k, true);
    }
    q
}

/// Decides whether `target` is a sum of a subset of `basis`.
///
/// Returns the indices of one such subset. Elimination processes the basis in
/// the given order, so the answer is deterministic. At most 64 basis forms.
pub fn in_span(target: &QuadForm, basis: &[QuadForm]) -> Result<Option<Subset>> {
    if basis.len() > 64 {
        return Err(Error::TooLarge(basis.len()));
    }
    let mut e = Eliminator::new(target.n_monomials());
    for b in basis {
        target.check_vars(b)?;
        e.push(&b.bits);
    }
    Ok(e.solve(&target.bits).map(|mask| Subset::raw(mask, basis.len())))
}

/// Sum of the basis forms selected by `coeffs`.
pub fn combine(basis: &[QuadForm], coeffs: Subset, vars: usize) -> QuadForm {
    let mut q = QuadForm::zero(vars);
    for k in coeffs.iter() {
        q += &basis[k];
    }
    q
}
