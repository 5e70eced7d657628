//! The wreath product `G_n = C_2 wr S_n` acting on square matrices over `S`.
//!
//! An element `(mask, sigma)` first conjugates the columns in `mask`, then
//! permutes rows and columns simultaneously: `N[sigma(i)][sigma(j)] = M[i][j]`.
//! With that convention the product satisfying
//! `act(g * h, M) = act(g, act(h, M))` is
//! `(m2, s2) * (m1, s1) = (m1 + s1^-1(m2), s2 s1)`.
//!
//! Canonical forms are orbit minima under the row-major order `0 < 1 < 2 < 3`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smatrix::{Row, SMatrix};
use crate::subset::Subset;

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    /// Columns conjugated before permuting.
    pub conj_mask: Subset,
    /// `perm[i] = sigma(i)`, 0-based.
    pub perm: Vec<usize>,
}

fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = 0u64;
    perm.len() <= 64
        && perm.iter().all(|&p| {
            let fresh = p < perm.len() && seen >> p & 1 == 0;
            seen |= 1u64.checked_shl(p as u32).unwrap_or(0);
            fresh
        })
}

impl GroupElement {
    pub fn identity(n: usize) -> GroupElement {
        GroupElement { conj_mask: Subset::empty(n), perm: (0..n).collect() }
    }

    pub fn new(conj_mask: Subset, perm: Vec<usize>) -> Result<GroupElement> {
        if !is_permutation(&perm) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
        if conj_mask.universe() != perm.len() {
            return Err(Error::DimensionMismatch { expected: perm.len(), found: conj_mask.universe() });
        }
        Ok(GroupElement { conj_mask, perm })
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<GroupElement> {
        let n = perm.len();
        GroupElement::new(Subset::empty(n), perm)
    }

    pub fn from_conj(conj_mask: Subset) -> GroupElement {
        GroupElement { perm: (0..conj_mask.universe()).collect(), conj_mask }
    }

    pub fn degree(&self) -> usize {
        self.perm.len()
    }

    pub fn is_identity(&self) -> bool {
        self.conj_mask.is_empty() && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        inv
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        assert_eq!(self.degree(), other.degree(), "group elements of different degree");
        let other_inv = other.inverse_perm();
        let mask = other.conj_mask + self.conj_mask.permute(&other_inv);
        let perm = other.perm.iter().map(|&p| self.perm[p]).collect();
        GroupElement { conj_mask: mask, perm }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement { conj_mask: self.conj_mask.permute(&self.perm), perm: self.inverse_perm() }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> GroupElement {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        GroupElement { conj_mask: Subset::raw(rng.gen(), n), perm }
    }

    /// Image of a subset of indices; conjugations do not move subsets.
    pub fn act_subset(&self, s: Subset) -> Subset {
        s.permute(&self.perm)
    }

    /// `act(self, m)`.
    pub fn act(&self, m: &SMatrix) -> Result<SMatrix> {
        m.require_square()?;
        if m.n_rows() != self.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), found: m.n_rows() });
        }
        Ok(act_unchecked(self, m))
    }

    /// `(act(self, m), sigma(s))`.
    pub fn act_pair(&self, m: &SMatrix, s: Subset) -> Result<(SMatrix, Subset)> {
        if s.universe() != self.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), found: s.universe() });
        }
        Ok((self.act(m)?, self.act_subset(s)))
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let perm: Vec<usize> = self.perm.iter().map(|p| p + 1).collect();
        write!(f, "(conj {}, perm {:?})", self.conj_mask, perm)
    }
}

#[inline]
fn permute_bits(x: u64, perm: &[usize]) -> u64 {
    let mut out = 0u64;
    let mut x = x;
    while x != 0 {
        let j = x.trailing_zeros() as usize;
        x &= x - 1;
        out |= 1 << perm[j];
    }
    out
}

fn act_unchecked(g: &GroupElement, m: &SMatrix) -> SMatrix {
    let n = m.n_rows();
    let mut rows = vec![Row::ZERO; n];
    for (i, r) in m.planes().iter().enumerate() {
        let r = r.conj_columns(g.conj_mask.mask());
        rows[g.perm[i]] = Row { lo: permute_bits(r.lo, &g.perm), hi: permute_bits(r.hi, &g.perm) };
    }
    SMatrix::from_planes_unchecked(rows, n)
}

pub fn act(g: &GroupElement, m: &SMatrix) -> Result<SMatrix> {
    g.act(m)
}

pub fn act_pair(g: &GroupElement, m: &SMatrix, s: Subset) -> Result<(SMatrix, Subset)> {
    g.act_pair(m, s)
}

/// Column state during canonical search: not yet fixed, kept, or conjugated.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum ColState {
    Open,
    Keep,
    Flip,
}

#[inline]
fn normalize(raw: u8, state: &mut ColState) -> u8 {
    if raw < 2 {
        return raw;
    }
    match *state {
        ColState::Open => {
            *state = if raw == 2 { ColState::Keep } else { ColState::Flip };
            2
        }
        ColState::Keep => raw,
        ColState::Flip => raw ^ 1,
    }
}

#[derive(Clone)]
struct SearchState {
    order: Vec<usize>,
    /// Remaining indices as an ordered partition; position `order.len()` is in `cells[0]`.
    cells: Vec<Vec<usize>>,
    cols: Vec<ColState>,
}

/// Canonical representative of the `G_n`-orbit of `m`, and an element
/// mapping `m` onto it.
///
/// For a fixed permutation the best column conjugations are forced: each
/// column is conjugated so that its first `2`/`3` entry in row-major order
/// reads `2`. The search therefore only ranges over permutations. It fixes
/// rows one at a time, keeping every partial permutation whose rows so far
/// equal the running minimum; positions not yet fixed are kept as an ordered
/// partition that each new row refines by value. All minimizing branches are
/// kept, so matrices with large automorphism groups cost more.
pub fn canonical_form_with_element(m: &SMatrix) -> Result<(SMatrix, GroupElement)> {
    m.require_square()?;
    let n = m.n_rows();
    let entry = |i: usize, j: usize| m.get(i, j).index();

    let mut states = vec![SearchState {
        order: Vec::with_capacity(n),
        cells: vec![(0..n).collect()],
        cols: vec![ColState::Open; n],
    }];

    for _ in 0..n {
        let mut best: Option<Vec<u8>> = None;
        let mut next: Vec<SearchState> = Vec::new();
        for st in &states {
            let first = &st.cells[0];
            for (ci, &p) in first.iter().enumerate() {
                let mut cols = st.cols.clone();
                let mut row = Vec::with_capacity(n);
                for &q in &st.order {
                    row.push(normalize(entry(p, q), &mut cols[q]));
                }
                row.push(normalize(entry(p, p), &mut cols[p]));
                // remaining cells: the rest of the first cell, then the others
                let mut refined: Vec<Vec<usize>> = Vec::new();
                let rest_first: Vec<usize> =
                    first.iter().enumerate().filter(|&(k, _)| k != ci).map(|(_, &q)| q).collect();
                let tail = std::iter::once(&rest_first).chain(st.cells[1..].iter());
                for cell in tail {
                    if cell.is_empty() {
                        continue;
                    }
                    let mut keyed: Vec<(u8, usize)> =
                        cell.iter().map(|&q| (normalize(entry(p, q), &mut cols[q]), q)).collect();
                    keyed.sort_by_key(|&(v, _)| v);
                    let mut start = 0;
                    while start < keyed.len() {
                        let v = keyed[start].0;
                        let end = start + keyed[start..].iter().take_while(|x| x.0 == v).count();
                        refined.push(keyed[start..end].iter().map(|&(_, q)| q).collect());
                        row.extend(std::iter::repeat_n(v, end - start));
                        start = end;
                    }
                }
                let ord = match &best {
                    None => Ordering::Less,
                    Some(b) => row.cmp(b),
                };
                if ord == Ordering::Greater {
                    continue;
                }
                if ord == Ordering::Less {
                    best = Some(row);
                    next.clear();
                }
                let mut order = st.order.clone();
                order.push(p);
                next.push(SearchState { order, cells: refined, cols });
            }
        }
        states = next;
    }

    let st = &states[0];
    let mut perm = vec![0; n];
    for (pos, &p) in st.order.iter().enumerate() {
        perm[p] = pos;
    }
    let mask = st
        .cols
        .iter()
        .enumerate()
        .filter(|(_, &c)| c == ColState::Flip)
        .fold(0u64, |acc, (q, _)| acc | 1 << q);
    let g = GroupElement { conj_mask: Subset::raw(mask, n), perm };
    Ok((act_unchecked(&g, m), g))
}

pub fn canonical_form(m: &SMatrix) -> Result<SMatrix> {
    canonical_form_with_element(m).map(|(c, _)| c)
}

pub fn are_equivalent(a: &SMatrix, b: &SMatrix) -> Result<bool> {
    a.require_square()?;
    b.require_square()?;
    if a.n_rows() != b.n_rows() {
        return Err(Error::DimensionMismatch { expected: a.n_rows(), found: b.n_rows() });
    }
    Ok(canonical_form(a)? == canonical_form(b)?)
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Every element of `G_n`; `2^n n!` of them.
pub fn for_each_group_element<F: FnMut(&GroupElement)>(n: usize, mut f: F) {
    assert!(n <= 10, "G_n too large to enumerate");
    for_each_permutation(n, |perm| {
        for mask in 0..1u64 << n {
            f(&GroupElement { conj_mask: Subset::raw(mask, n), perm: perm.to_vec() });
        }
    });
}

/// The full orbit of `m`.
pub fn orbit(m: &SMatrix) -> Result<BTreeSet<SMatrix>> {
    m.require_square()?;
    let mut out = BTreeSet::new();
    for_each_group_element(m.n_rows(), |g| {
        out.insert(act_unchecked(g, m));
    });
    Ok(out)
}

/// Orbit minimum by exhaustive enumeration of `G_n`; the reference for
/// [`canonical_form`].
pub fn canonical_form_brute(m: &SMatrix) -> Result<SMatrix> {
    m.require_square()?;
    let mut best: Option<SMatrix> = None;
    for_each_group_element(m.n_rows(), |g| {
        let img = act_unchecked(g, m);
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    });
    Ok(best.expect("group is nonempty"))
}

/// `|G_n| = 2^n n!`.
pub fn group_order(n: usize) -> u128 {
    (1..=n as u128).product::<u128>() << n
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn circulant3() -> SMatrix {
        SMatrix::from_digit_rows(&["132", "213", "321"]).unwrap()
    }

    #[test]
    fn identity_and_transposition() {
        let c = circulant3();
        assert_eq!(GroupElement::identity(3).act(&c).unwrap(), c);
        let t = GroupElement::from_perm(vec![1, 0, 2]).unwrap();
        let img = t.act(&c).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(img.get(t.perm[i], t.perm[j]), c.get(i, j));
            }
        }
        assert_eq!(img, SMatrix::from_digit_rows(&["123", "312", "231"]).unwrap());
    }

    #[test]
    fn conjugation_keeps_distinguished() {
        let c = circulant3();
        for k in 0..3 {
            let g = GroupElement::from_conj(Subset::singleton(k, 3).unwrap());
            let img = g.act(&c).unwrap();
            assert!(img.is_distinguished().unwrap());
            for i in 0..3 {
                assert_eq!(img.get(i, k), c.get(i, k).conj());
            }
        }
    }

    #[test]
    fn circulant_canonical_golden() {
        let c = circulant3();
        let brute = canonical_form_brute(&c).unwrap();
        assert_eq!(canonical_form(&c).unwrap(), brute);
        assert_eq!(brute.to_digit_rows(), vec!["122", "213", "331"]);
        assert!(orbit(&c).unwrap().len() <= 48);
    }

    #[test]
    fn orbit_size_divides_group_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut samples = vec![circulant3()];
        for _ in 0..20 {
            samples.push(SMatrix::random(3, 3, &mut rng));
            samples.push(SMatrix::random_distinguished(3, 3, &mut rng));
        }
        for m in samples {
            let o = orbit(&m).unwrap().len() as u128;
            assert_eq!(group_order(3) % o, 0, "{m:?}");
        }
    }

    #[test]
    fn size_mismatch() {
        let g = GroupElement::identity(4);
        assert!(g.act(&circulant3()).is_err());
        let a = SMatrix::from_digit_rows(&["1"]).unwrap();
        assert!(are_equivalent(&a, &circulant3()).is_err());
        assert!(GroupElement::from_perm(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn heap_enumerates_all() {
        let mut seen = BTreeSet::new();
        for_each_permutation(5, |p| {
            seen.insert(p.to_vec());
        });
        assert_eq!(seen.len(), 120);
    }

    fn square(max_n: usize) -> impl Strategy<Value = (SMatrix, u64)> {
        (1usize..=max_n, any::<u64>(), any::<bool>(), any::<u64>()).prop_map(|(n, seed, dist, s2)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = if dist { SMatrix::random_distinguished(n, n, &mut rng) } else { SMatrix::random(n, n, &mut rng) };
            (m, s2)
        })
    }

    proptest! {
        #[test]
        fn action_law((m, seed) in square(8)) {
            let n = m.n_rows();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = GroupElement::random(n, &mut rng);
            let h = GroupElement::random(n, &mut rng);
            let lhs = g.compose(&h).act(&m).unwrap();
            let rhs = g.act(&h.act(&m).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(g.inverse().act(&g.act(&m).unwrap()).unwrap(), m.clone());
            prop_assert!(g.compose(&g.inverse()).is_identity());
            let s = Subset::raw(rng.gen(), n);
            prop_assert_eq!(g.compose(&h).act_subset(s), g.act_subset(h.act_subset(s)));
        }

        #[test]
        fn canonical_matches_brute_force((m, _seed) in square(4)) {
            prop_assert_eq!(canonical_form(&m).unwrap(), canonical_form_brute(&m).unwrap());
        }

        #[test]
        fn canonical_is_orbit_constant((m, seed) in square(7)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = GroupElement::random(m.n_rows(), &mut rng);
            let (c, h) = canonical_form_with_element(&m).unwrap();
            prop_assert_eq!(h.act(&m).unwrap(), c.clone());
            prop_assert_eq!(canonical_form(&g.act(&m).unwrap()).unwrap(), c.clone());
            prop_assert_eq!(canonical_form(&c).unwrap(), c);
        }

        #[test]
        fn action_preserves_structure((m, seed) in square(7)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = GroupElement::random(m.n_rows(), &mut rng);
            let img = g.act(&m).unwrap();
            prop_assert_eq!(img.is_distinguished().unwrap(), m.is_distinguished().unwrap());
            prop_assert_eq!(img.is_hw_matrix().unwrap(), m.is_hw_matrix().unwrap());
            // column conjugations break self-conjugacy, permutations keep it
            let p = GroupElement::from_perm(g.perm.clone()).unwrap().act(&m).unwrap();
            prop_assert_eq!(p.is_self_conjugate().unwrap(), m.is_self_conjugate().unwrap());
        }
    }
}
