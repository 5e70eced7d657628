//! Entrywise reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use hwspinc::action::orbit;
use hwspinc::{SElem, SMatrix};

pub fn col_sum(m: &SMatrix, rows: &[usize], j: usize) -> SElem {
    rows.iter().map(|&i| m.get(i, j)).sum()
}

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

/// `J(U)` as a sorted index list.
pub fn j_set(m: &SMatrix, rows: &[usize]) -> Vec<usize> {
    (0..m.n_cols()).filter(|&j| col_sum(m, rows, j) == SElem::ONE).collect()
}

pub fn is_hw(m: &SMatrix) -> bool {
    let n = m.n_rows();
    if m.n_cols() != n {
        return false;
    }
    let dist = (0..n).all(|i| {
        (0..n).all(|j| {
            let e = m.get(i, j);
            if i == j {
                e == SElem::ONE
            } else {
                e == SElem::TWO || e == SElem::THREE
            }
        })
    });
    let all: Vec<usize> = (0..n).collect();
    dist && (0..n).all(|j| col_sum(m, &all, j) == SElem::ZERO)
        && subsets(n).filter(|u| !u.is_empty() && u.len() < n).all(|u| !j_set(m, &u).is_empty())
}

/// Matrix with diagonal `1` and off-diagonal entries read in base 4 from `code`.
pub fn from_offdiag_base4(n: usize, mut code: u64) -> SMatrix {
    let mut rows = vec![vec![SElem::ONE; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if i != j {
                *e = SElem::new((code & 3) as u8).unwrap();
                code >>= 2;
            }
        }
    }
    SMatrix::from_rows(rows).unwrap()
}

/// Distinguished matrix with off-diagonal `3` where `code` has a one bit.
pub fn distinguished_from_bits(n: usize, mut code: u64) -> SMatrix {
    let mut rows = vec![vec![SElem::ONE; n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            if i != j {
                *e = if code & 1 == 1 { SElem::THREE } else { SElem::TWO };
                code >>= 1;
            }
        }
    }
    SMatrix::from_rows(rows).unwrap()
}

/// Orbit reduction: repeatedly take the least remaining matrix and remove
/// its full orbit. Returns the orbit minima and the orbit sizes.
pub fn orbit_reduce(set: &BTreeSet<SMatrix>) -> Vec<(SMatrix, usize)> {
    let mut rest = set.clone();
    let mut out = Vec::new();
    while let Some(m) = rest.iter().next().cloned() {
        let o = orbit(&m).unwrap();
        assert!(o.is_subset(&rest), "input is not closed under the group action");
        for x in &o {
            rest.remove(x);
        }
        out.push((o.iter().next().unwrap().clone(), o.len()));
    }
    out
}

/// All permutations of `0..n`, lexicographic.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn conj_digit(d: u8) -> u8 {
    [0, 1, 3, 2][d as usize]
}

/// Digit rows of `g.M`: conjugate the columns in `conj`, then move entry
/// `(i, j)` to `(perm[i], perm[j])`.
pub fn act_digits(m: &SMatrix, conj: u64, perm: &[usize]) -> Vec<Vec<u8>> {
    let n = m.n_rows();
    let mut out = vec![vec![0u8; n]; n];
    for i in 0..n {
        for j in 0..n {
            let e = m.get(i, j).index();
            out[perm[i]][perm[j]] = if conj >> j & 1 == 1 { conj_digit(e) } else { e };
        }
    }
    out
}

/// Least image of `m` over all `2^n n!` group elements, as digit rows.
pub fn brute_orbit_min(m: &SMatrix, perms: &[Vec<usize>]) -> Vec<Vec<u8>> {
    let n = m.n_rows();
    let mut best: Option<Vec<Vec<u8>>> = None;
    for p in perms {
        for conj in 0..1u64 << n {
            let img = act_digits(m, conj, p);
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.unwrap()
}

pub fn digits(m: &SMatrix) -> Vec<Vec<u8>> {
    (0..m.n_rows()).map(|i| (0..m.n_cols()).map(|j| m.get(i, j).index()).collect()).collect()
}

/// `|(J(U) + U) S| = binom(|U|, 2) mod 2` for every `U` inside the first
/// `rows` rows, evaluated entrywise.
pub fn spinc_condition(m: &SMatrix, rows: usize, s: &[usize]) -> bool {
    subsets(rows).all(|u| {
        let j = j_set(m, &u);
        let lhs = s.iter().filter(|c| j.contains(c) != u.contains(c)).count();
        lhs % 2 == (u.len() * u.len().saturating_sub(1) / 2) % 2
    })
}

fn alpha(d: u8) -> u8 {
    (d == 1 || d == 2) as u8
}

fn beta(d: u8) -> u8 {
    (d == 1 || d == 3) as u8
}

/// Degree-2 polynomial in `x_1..x_d` over GF(2): `q[k][l]` (`k <= l`) is the
/// coefficient of `x_k x_l`.
pub type Quad = Vec<Vec<u8>>;

fn product(a: &[u8], b: &[u8]) -> Quad {
    let d = a.len();
    let mut q = vec![vec![0u8; d]; d];
    for (k, &ak) in a.iter().enumerate() {
        for (l, &bl) in b.iter().enumerate() {
            let (lo, hi) = if k <= l { (k, l) } else { (l, k) };
            q[lo][hi] ^= ak & bl;
        }
    }
    q
}

fn add(p: &mut Quad, q: &Quad) {
    for (rp, rq) in p.iter_mut().zip(q) {
        for (x, y) in rp.iter_mut().zip(rq) {
            *x ^= y;
        }
    }
}

/// `theta_j = alpha_j beta_j` for every column of `a`.
pub fn thetas(a: &SMatrix) -> Vec<Quad> {
    (0..a.n_cols())
        .map(|j| {
            let col: Vec<u8> = (0..a.n_rows()).map(|k| a.get(k, j).index()).collect();
            let al: Vec<u8> = col.iter().map(|&e| alpha(e)).collect();
            let be: Vec<u8> = col.iter().map(|&e| beta(e)).collect();
            product(&al, &be)
        })
        .collect()
}

/// Degree-2 part of `prod_j (1 + alpha_j + beta_j)`.
pub fn sw2(a: &SMatrix) -> Quad {
    let d = a.n_rows();
    let lin: Vec<Vec<u8>> = (0..a.n_cols())
        .map(|j| (0..d).map(|k| alpha(a.get(k, j).index()) ^ beta(a.get(k, j).index())).collect())
        .collect();
    let mut q = vec![vec![0u8; d]; d];
    for j in 0..lin.len() {
        for k in j + 1..lin.len() {
            add(&mut q, &product(&lin[j], &lin[k]));
        }
    }
    q
}

pub fn quad_sum<'a, I: IntoIterator<Item = &'a Quad>>(d: usize, qs: I) -> Quad {
    let mut out = vec![vec![0u8; d]; d];
    for q in qs {
        add(&mut out, q);
    }
    out
}
