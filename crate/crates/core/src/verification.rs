//! Finite checks of the structural lemmas on HW- and distinguished matrices,
//! and standard forms of spin^c pairs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::GroupElement;
use crate::enumeration::{distinguished_row, enumerate_classes, enumerate_normalized, spread, EnumOptions};
use crate::error::{Error, Result};
use crate::salgebra::SElem;
use crate::smatrix::SMatrix;
use crate::structures::{find_spinc_set, has_spinc_linear, is_spinc_set, spinc_sets, Scope, SpincConditions};
use crate::subset::{full_mask, Subset};

pub const DEFAULT_SEED: u64 = 0x5eed_2019;
pub const DEFAULT_CASES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LemmaId {
    NotExistence,
    Jmap,
    ColumnSums,
    JmapHw,
    AlmostSpinc,
    SpincPairN,
    SpincPairN1,
    SpincPairN2,
    Main,
}

impl LemmaId {
    pub const ALL: [LemmaId; 9] = [
        LemmaId::NotExistence,
        LemmaId::Jmap,
        LemmaId::ColumnSums,
        LemmaId::JmapHw,
        LemmaId::AlmostSpinc,
        LemmaId::SpincPairN,
        LemmaId::SpincPairN1,
        LemmaId::SpincPairN2,
        LemmaId::Main,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LemmaId::NotExistence => "not-existence",
            LemmaId::Jmap => "jmap",
            LemmaId::ColumnSums => "column-sums",
            LemmaId::JmapHw => "jmap-hw",
            LemmaId::AlmostSpinc => "almost-spinc",
            LemmaId::SpincPairN => "spinc-pair-n",
            LemmaId::SpincPairN1 => "spinc-pair-n1",
            LemmaId::SpincPairN2 => "spinc-pair-n2",
            LemmaId::Main => "main",
        }
    }

    /// Degrees accepted by [`verify_lemma`] without the long-running flag.
    pub fn valid_degree(self, n: usize) -> bool {
        match self {
            LemmaId::NotExistence => (2..=8).contains(&n),
            LemmaId::Jmap | LemmaId::ColumnSums => (1..=16).contains(&n),
            LemmaId::JmapHw | LemmaId::AlmostSpinc => n % 2 == 1 && (3..=7).contains(&n),
            LemmaId::SpincPairN | LemmaId::SpincPairN1 | LemmaId::SpincPairN2 | LemmaId::Main => {
                n % 2 == 1 && (5..=7).contains(&n)
            }
        }
    }
}

impl FromStr for LemmaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<LemmaId> {
        LemmaId::ALL.into_iter().find(|l| l.as_str() == s).ok_or_else(|| Error::UnknownLemma(s.to_string()))
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Random cases for the randomized lemmas.
    pub cases: u64,
    pub seed: u64,
    /// Lift the default degree limit of the corpus-based lemmas.
    pub allow_long: bool,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { cases: DEFAULT_CASES, seed: DEFAULT_SEED, allow_long: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub matrix: SMatrix,
    /// Row subset `U`, when the statement quantifies over one.
    pub u: Option<Subset>,
    /// Column subset `S`, when the statement quantifies over one.
    pub s: Option<Subset>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationResult {
    pub lemma: LemmaId,
    pub degree: usize,
    pub passed: bool,
    /// Whether the whole search space was covered.
    pub exhaustive: bool,
    /// Cardinality of the search space after pruning.
    pub search_space: u64,
    /// Instances that reached the final check.
    pub checked: u64,
    pub seed: Option<u64>,
    pub counterexample: Option<Counterexample>,
    pub notes: Vec<String>,
}

impl VerificationResult {
    pub fn status(&self) -> &'static str {
        if self.passed {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

impl fmt::Display for VerificationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} n={} search_space={} checked={}{}",
            self.status(),
            self.lemma,
            self.degree,
            self.search_space,
            self.checked,
            if self.exhaustive { " exhaustive" } else { "" }
        )?;
        for note in &self.notes {
            write!(f, "; {note}")?;
        }
        if let Some(c) = &self.counterexample {
            write!(f, "\ncounterexample: {}\n{}", c.detail, c.matrix.to_text())?;
        }
        Ok(())
    }
}

struct Outcome {
    exhaustive: bool,
    search_space: u64,
    checked: u64,
    seed: Option<u64>,
    counterexample: Option<Counterexample>,
    notes: Vec<String>,
}

impl Outcome {
    fn exhaustive(search_space: u64, checked: u64, counterexample: Option<Counterexample>) -> Outcome {
        Outcome { exhaustive: true, search_space, checked, seed: None, counterexample, notes: Vec::new() }
    }
}

pub fn verify_lemma(id: LemmaId, n: usize, budget: Budget) -> Result<VerificationResult> {
    if !id.valid_degree(n) && !(budget.allow_long && long_degree(id, n)) {
        return Err(Error::Precondition(format!("degree {n} is outside the range checked for `{id}`")));
    }
    let opts = EnumOptions { allow_long: budget.allow_long };
    let out = match id {
        LemmaId::NotExistence => check_not_existence(n),
        LemmaId::Jmap => check_jmap(n, budget),
        LemmaId::ColumnSums => check_column_sums(n, budget),
        LemmaId::JmapHw => check_jmap_hw(n, opts)?,
        LemmaId::AlmostSpinc => check_almost_spinc(n, opts)?,
        LemmaId::SpincPairN => check_spinc_pair(n, n, opts)?,
        LemmaId::SpincPairN1 => check_spinc_pair(n, n - 1, opts)?,
        LemmaId::SpincPairN2 => check_spinc_pair(n, n - 2, opts)?,
        LemmaId::Main => check_main(n, opts)?,
    };
    Ok(VerificationResult {
        lemma: id,
        degree: n,
        passed: out.counterexample.is_none(),
        exhaustive: out.exhaustive,
        search_space: out.search_space,
        checked: out.checked,
        seed: out.seed,
        counterexample: out.counterexample,
        notes: out.notes,
    })
}

fn long_degree(id: LemmaId, n: usize) -> bool {
    match id {
        LemmaId::JmapHw | LemmaId::AlmostSpinc | LemmaId::SpincPairN | LemmaId::SpincPairN1 | LemmaId::SpincPairN2 | LemmaId::Main => {
            n % 2 == 1 && (9..=crate::enumeration::HARD_MAX_DEGREE).contains(&n)
        }
        _ => false,
    }
}

fn sub(mask: u64, universe: usize) -> Subset {
    Subset::from_mask(mask, universe).expect("mask inside the universe")
}

// ---------------------------------------------------------------------------
// not-existence

/// Conditions (A1)-(A3) and (A4) of the self-conjugate non-existence lemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NotExistenceFlags {
    /// Distinguished and self-conjugate.
    pub a1: bool,
    /// First row `[1, 2, .., 2]`.
    pub a2: bool,
    /// All column sums `1`.
    pub a3: bool,
    /// Every odd principal submatrix has a column summing to `1`.
    pub a4: bool,
}

/// Evaluates each condition directly on the entries.
pub fn not_existence_flags(m: &SMatrix) -> Result<NotExistenceFlags> {
    m.require_square()?;
    let n = m.n_rows();
    let a1 = m.is_distinguished()? && m.is_self_conjugate()?;
    let a2 = (0..n).all(|j| m.get(0, j) == if j == 0 { SElem::ONE } else { SElem::TWO });
    let a3 = (0..n).all(|j| (0..n).map(|i| m.get(i, j)).sum::<SElem>() == SElem::ONE);
    let a4 = (1u64..1 << n).filter(|u| u.count_ones() % 2 == 1).all(|u| {
        let idx = sub(u, n).to_vec();
        idx.iter().any(|&j| idx.iter().map(|&i| m.get(i, j)).sum::<SElem>() == SElem::ONE)
    });
    Ok(NotExistenceFlags { a1, a2, a3, a4 })
}

/// Self-conjugate distinguished matrix with first row `[1, 2, .., 2]` and the
/// strict upper triangle of rows `2..n` read from `bits` (`1` means `3`).
pub fn self_conjugate_with_first_row(n: usize, bits: u64) -> SMatrix {
    let mut m = SMatrix::from_planes(
        (0..n).map(|i| distinguished_row(i, n, if i == 0 { 0 } else { 1 })).collect(),
        n,
    )
    .expect("distinguished rows");
    let mut k = 0;
    for i in 1..n {
        for j in i + 1..n {
            let v = if bits >> k & 1 == 1 { SElem::THREE } else { SElem::TWO };
            m.set(i, j, v);
            m.set(j, i, v.conj());
            k += 1;
        }
    }
    m
}

fn check_not_existence(n: usize) -> Outcome {
    let free = (n - 1) * (n - 2) / 2;
    let space = 1u64 << free;
    let (a3_count, cex) = (0..space)
        .into_par_iter()
        .map(|bits| {
            let m = self_conjugate_with_first_row(n, bits);
            let f = not_existence_flags(&m).expect("square");
            debug_assert!(f.a1 && f.a2);
            (f.a3 as u64, (f.a3 && f.a4).then_some(m))
        })
        .reduce(
            || (0, None),
            |(c1, m1), (c2, m2)| (c1 + c2, m1.or(m2)),
        );
    let mut out = Outcome::exhaustive(
        space,
        space,
        cex.map(|m| Counterexample { matrix: m, u: None, s: None, detail: "satisfies (A1)-(A4)".into() }),
    );
    out.notes.push(format!("matrices satisfying (A1)-(A3): {a3_count}"));
    out
}

/// Unpruned oracle: every distinguished `n x n` matrix, returning those
/// satisfying (A1)-(A3) and those satisfying (A1)-(A4).
pub fn not_existence_unpruned(n: usize) -> Result<(Vec<SMatrix>, Vec<SMatrix>)> {
    if !(1..=5).contains(&n) {
        return Err(Error::Precondition("the unpruned search is limited to n <= 5".into()));
    }
    let mut a123 = Vec::new();
    let mut all = Vec::new();
    for c in 0..1u64 << (n * (n - 1)) {
        let rows = (0..n).map(|i| distinguished_row(i, n, spread(c >> (i * (n - 1)) & full_mask(n - 1), i))).collect();
        let m = SMatrix::from_planes(rows, n)?;
        let f = not_existence_flags(&m)?;
        if f.a1 && f.a2 && f.a3 {
            if f.a4 {
                all.push(m.clone());
            }
            a123.push(m);
        }
    }
    Ok((a123, all))
}

// ---------------------------------------------------------------------------
// jmap

fn brute_row_combination(m: &SMatrix, u: &[usize]) -> Vec<SElem> {
    (0..m.n_cols()).map(|j| u.iter().map(|&i| m.get(i, j)).sum()).collect()
}

fn bit(b: bool) -> SElem {
    if b {
        SElem::ONE
    } else {
        SElem::ZERO
    }
}

/// Statements (1)-(7) about `J_M(U)` for one distinguished square `M`, one
/// `U` and one `S`, against entrywise evaluation. Returns the first violated
/// statement.
pub fn jmap_statements(m: &SMatrix, u: Subset, s: Subset) -> Option<String> {
    let n = m.n_rows();
    let uv = u.to_vec();
    let mu = brute_row_combination(m, &uv);
    let j: Vec<bool> = mu.iter().map(|&e| e == SElem::ONE).collect();
    let lib = m.j_map(u).expect("dimensions checked");
    if (0..n).any(|c| lib.contains(c) != j[c]) {
        return Some("J(U) differs from entrywise evaluation".into());
    }
    let odd = uv.len() % 2 == 1;
    let in_u = |c: usize| u.contains(c);
    if uv.len() == 1 && (0..n).any(|c| j[c] != in_u(c)) {
        return Some("(1) J({i}) != {i}".into());
    }
    if odd && (0..n).any(|c| j[c] && !in_u(c)) {
        return Some("(2) J(U) not inside U".into());
    }
    if !odd && (0..n).any(|c| j[c] && in_u(c)) {
        return Some("(3) J(U) meets U".into());
    }
    let j_parity = bit(j.iter().filter(|&&b| b).count() % 2 == 1);
    let js_parity = bit((0..n).filter(|&c| j[c] && s.contains(c)).count() % 2 == 1);
    let block: SElem = uv.iter().flat_map(|&a| uv.iter().map(move |&b| (a, b))).map(|(a, b)| m.get(a, b)).sum();
    let row_sums: SElem = uv.iter().flat_map(|&a| (0..n).map(move |b| (a, b))).map(|(a, b)| m.get(a, b)).sum();
    let row_sums_s: SElem =
        uv.iter().flat_map(|&a| s.iter().map(move |b| (a, b))).map(|(a, b)| m.get(a, b)).sum();
    let anchor: SElem = uv.iter().filter(|&&c| s.contains(c)).map(|&c| mu[c]).sum();
    if odd {
        if j_parity != block {
            return Some("(4) |J(U)| parity".into());
        }
        if js_parity != anchor {
            return Some("(6) |J(U) S| parity".into());
        }
    } else {
        if j_parity != block + row_sums {
            return Some("(5) |J(U)| parity".into());
        }
        if js_parity != anchor + row_sums_s {
            return Some("(7) |J(U) S| parity".into());
        }
    }
    None
}

/// All `U` when `n <= 10`, otherwise 1024 random ones.
fn check_jmap(n: usize, budget: Budget) -> Outcome {
    let all_u = n <= 10;
    let per_case: u64 = if all_u { 1 << n } else { 1024 };
    let cex = (0..budget.cases).into_par_iter().find_map_first(|case| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ case.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let m = SMatrix::random_distinguished(n, n, &mut rng);
        let s = sub(rng.gen::<u64>() & full_mask(n), n);
        (0..per_case).find_map(|k| {
            let u = if all_u { sub(k, n) } else { sub(rng.gen::<u64>() & full_mask(n), n) };
            jmap_statements(&m, u, s).map(|detail| Counterexample { matrix: m.clone(), u: Some(u), s: Some(s), detail })
        })
    });
    Outcome {
        exhaustive: false,
        search_space: budget.cases.saturating_mul(per_case),
        checked: budget.cases,
        seed: Some(budget.seed),
        counterexample: cex,
        notes: vec![format!("{per_case} sets U per matrix")],
    }
}

// ---------------------------------------------------------------------------
// column-sums

/// Allowed values of column `j` (0-based) for a distinguished `k x n` matrix.
pub fn column_sum_table(k: usize, j: usize) -> [SElem; 2] {
    if (k % 2 == 0) == (j < k) {
        [SElem::TWO, SElem::THREE]
    } else {
        [SElem::ZERO, SElem::ONE]
    }
}

fn column_sums_violation(m: &SMatrix) -> Option<Counterexample> {
    let k = m.n_rows();
    (0..m.n_cols()).find_map(|j| {
        let v: SElem = (0..k).map(|i| m.get(i, j)).sum();
        (!column_sum_table(k, j).contains(&v)).then(|| Counterexample {
            matrix: m.clone(),
            u: None,
            s: None,
            detail: format!("column {} sums to {}", j + 1, v.to_digit()),
        })
    })
}

/// Largest bit count enumerated exhaustively per row count.
const COLUMN_SUMS_EXHAUSTIVE_BITS: usize = 24;

/// Exhaustive for `k <= 4` rows where `2^(k(n-1))` stays small, randomized
/// over every `k <= n` beyond.
fn check_column_sums(n: usize, budget: Budget) -> Outcome {
    let mut space = 0u64;
    let mut checked = 0u64;
    let mut exhaustive_rows = Vec::new();
    for k in 1..=n.min(4) {
        let bits = k * (n - 1);
        if bits > COLUMN_SUMS_EXHAUSTIVE_BITS {
            continue;
        }
        exhaustive_rows.push(k);
        space += 1 << bits;
        checked += 1 << bits;
        let cex = (0..1u64 << bits).into_par_iter().find_map_first(|c| {
            let rows = (0..k).map(|i| distinguished_row(i, n, spread(c >> (i * (n - 1)) & full_mask(n - 1), i))).collect();
            column_sums_violation(&SMatrix::from_planes(rows, n).expect("k <= n"))
        });
        if cex.is_some() {
            return Outcome { exhaustive: false, search_space: space, checked, seed: Some(budget.seed), counterexample: cex, notes: vec![] };
        }
    }
    let cex = (0..budget.cases).into_par_iter().find_map_first(|case| {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ case.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let k = rng.gen_range(1..=n);
        column_sums_violation(&SMatrix::random_distinguished(k, n, &mut rng))
    });
    Outcome {
        exhaustive: false,
        search_space: space + budget.cases,
        checked: checked + budget.cases,
        seed: Some(budget.seed),
        counterexample: cex,
        notes: vec![format!("exhaustive for k in {exhaustive_rows:?}"), format!("{} random k x {n}", budget.cases)],
    }
}

// ---------------------------------------------------------------------------
// HW corpus lemmas

/// HW-matrices up to column conjugation, which fixes every `J(U)` and
/// every condition below.
fn hw_corpus(n: usize, opts: EnumOptions) -> Result<Vec<SMatrix>> {
    enumerate_normalized(n, opts)
}

fn jmap_hw_violation(m: &SMatrix) -> Option<Counterexample> {
    let n = m.n_rows();
    let full = Subset::full(n);
    let cex = |u: Subset, detail: &str| Counterexample { matrix: m.clone(), u: Some(u), s: None, detail: detail.into() };
    if !m.j_map(full).expect("square").is_empty() {
        return Some(cex(full, "(i) J(1) is nonempty"));
    }
    (1..(1u64 << n) - 1).find_map(|mask| {
        let u = sub(mask, n);
        let j = m.j_map(u).expect("square");
        if j.is_empty() {
            Some(cex(u, "(ii) J(U) is empty"))
        } else if j != m.j_map(u.complement()).expect("square") {
            Some(cex(u, "(iii) J(U) != J(1 + U)"))
        } else {
            None
        }
    })
}

fn check_jmap_hw(n: usize, opts: EnumOptions) -> Result<Outcome> {
    let corpus = hw_corpus(n, opts)?;
    let cex = corpus.par_iter().find_map_first(jmap_hw_violation);
    let mut out = Outcome::exhaustive(corpus.len() as u64, corpus.len() as u64, cex);
    out.notes.push(format!("{} matrices with first row [1,2,..,2]", corpus.len()));
    Ok(out)
}

fn almost_spinc_violation(m: &SMatrix) -> Option<Counterexample> {
    let n = m.n_rows();
    let parity = (n - 1) / 2 % 2;
    let all_u = SpincConditions::new(m, Scope::AllU).expect("square");
    spinc_sets(m, Scope::OmitLast).expect("square").into_iter().find_map(|s| {
        let detail = if s.len() % 2 != parity {
            "(1) almost spin^c set of the wrong parity"
        } else if !all_u.holds(s) {
            "(2) almost spin^c set is not a spin^c set"
        } else {
            return None;
        };
        Some(Counterexample { matrix: m.clone(), u: None, s: Some(s), detail: detail.into() })
    })
}

fn check_almost_spinc(n: usize, opts: EnumOptions) -> Result<Outcome> {
    let corpus = hw_corpus(n, opts)?;
    let found: u64 = corpus.par_iter().map(|m| spinc_sets(m, Scope::OmitLast).expect("square").len() as u64).sum();
    let cex = corpus.par_iter().find_map_first(almost_spinc_violation);
    let mut out = Outcome::exhaustive(corpus.len() as u64, corpus.len() as u64, cex);
    out.notes.push(format!("almost spin^c sets found: {found}"));
    Ok(out)
}

/// Subsets of `{0..n-1}` of size `size`, ascending by mask.
fn subsets_of_size(n: usize, size: usize) -> Vec<Subset> {
    (0..1u64 << n).filter(|m| m.count_ones() as usize == size).map(|m| sub(m, n)).collect()
}

fn check_spinc_pair(n: usize, size: usize, opts: EnumOptions) -> Result<Outcome> {
    let corpus = hw_corpus(n, opts)?;
    let candidates = subsets_of_size(n, size);
    let cex = corpus.par_iter().find_map_first(|m| {
        let conds = SpincConditions::new(m, Scope::AllU).expect("square");
        candidates.iter().find(|&&s| conds.holds(s)).map(|&s| Counterexample {
            matrix: m.clone(),
            u: None,
            s: Some(s),
            detail: format!("spin^c set of size {size}"),
        })
    });
    let mut out = Outcome::exhaustive(
        corpus.len() as u64 * candidates.len() as u64,
        corpus.len() as u64,
        cex,
    );
    out.notes.push(format!("{} candidate sets per matrix", candidates.len()));
    Ok(out)
}

fn check_main(n: usize, opts: EnumOptions) -> Result<Outcome> {
    let classes = enumerate_classes(n, opts)?;
    let cex = classes.par_iter().find_map_first(|m| {
        if let Some(s) = find_spinc_set(m).expect("HW corpus") {
            return Some(Counterexample { matrix: m.clone(), u: None, s: Some(s), detail: "spin^c set found".into() });
        }
        let a = m.drop_row(n - 1).expect("n >= 1");
        match has_spinc_linear(&a).expect("HW corpus") {
            (true, _) => Some(Counterexample {
                matrix: m.clone(),
                u: None,
                s: None,
                detail: "linear spin^c criterion holds".into(),
            }),
            _ => None,
        }
    });
    let mut out = Outcome::exhaustive(classes.len() as u64, classes.len() as u64, cex);
    out.notes.push(format!("classes: {}", classes.len()));
    Ok(out)
}

// ---------------------------------------------------------------------------
// standard forms

/// A spin^c pair moved into standard form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardFormCert {
    pub g: GroupElement,
    /// `g M`.
    pub matrix: SMatrix,
    /// `g S = {1..k+l}`.
    pub s: Subset,
    pub k: usize,
    pub l: usize,
    pub r: usize,
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

impl StandardFormCert {
    /// Checks every invariant of a standard form, plus `g (M, S) = (M', S')`.
    pub fn validate(&self, m: &SMatrix, s: Subset) -> Result<()> {
        let (gm, gs) = self.g.act_pair(m, s)?;
        if gm != self.matrix || gs != self.s {
            return Err(precondition("g does not map (M, S) onto the certificate"));
        }
        self.validate_form()?;
        if !is_spinc_set(&self.matrix, self.s, Scope::AllU)? {
            return Err(precondition("S' is not a spin^c set for M'"));
        }
        Ok(())
    }

    /// Shape invariants only.
    pub fn validate_form(&self) -> Result<()> {
        let m = &self.matrix;
        let n = m.n_rows();
        let (k, l) = (self.k, self.l);
        if k + l + self.r != n || self.s != Subset::prefix(k + l, n) {
            return Err(precondition("S' is not the prefix {1..k+l}"));
        }
        if !m.is_distinguished()? {
            return Err(precondition("M' is not distinguished"));
        }
        if (1..n).any(|j| m.get(0, j) != SElem::TWO) {
            return Err(precondition("first row is not [1,2,..,2]"));
        }
        if k < l {
            return Err(precondition("k < l"));
        }
        for (lo, hi) in [(0, k), (k, k + l)] {
            if hi > lo && !m.principal_submatrix(sub(full_mask(hi) & !full_mask(lo), n))?.is_self_conjugate()? {
                return Err(precondition(format!("diagonal block {}..{} is not self-conjugate", lo + 1, hi)));
            }
        }
        for i in 0..k {
            for j in k..k + l {
                if m.get(i, j) != SElem::TWO || m.get(j, i) != SElem::TWO {
                    return Err(precondition(format!("cross block entry ({}, {}) is not 2", i + 1, j + 1)));
                }
            }
        }
        let sums: Vec<SElem> = (0..k + l).map(|i| m.row_sum(i, self.s)).collect::<Result<_>>()?;
        if sums[..k].iter().any(|&v| v != sums[0]) || sums[k..].iter().any(|&v| v != sums[k]) {
            return Err(precondition("row sums over S' are not constant on the blocks"));
        }
        if l > 0 && sums[0] == sums[k] {
            return Err(precondition("row sums over S' agree across the blocks"));
        }
        Ok(())
    }

    /// `[a, .., a, conj(a), .., conj(a)]` on the first `k + l` columns of row `m`.
    pub fn row_has_form(&self, m: usize, a: SElem) -> bool {
        (0..self.k).all(|j| self.matrix.get(m, j) == a)
            && (self.k..self.k + self.l).all(|j| self.matrix.get(m, j) == a.conj())
    }
}

/// Moves a spin^c pair into standard form.
///
/// Steps: put `S` first (stable) and conjugate the columns carrying `3` in
/// row 1; split the indices of `S` by their row sum over `S`, conjugating
/// column 1 when the class of row 1 is the smaller one; put that class first.
pub fn to_standard_form(m: &SMatrix, s: Subset) -> Result<StandardFormCert> {
    m.require_square()?;
    let n = m.n_rows();
    if s.universe() != n {
        return Err(Error::DimensionMismatch { expected: n, found: s.universe() });
    }
    if !m.is_distinguished()? {
        return Err(precondition("M is not distinguished"));
    }
    if !is_spinc_set(m, s, Scope::AllU)? {
        return Err(precondition(format!("{s} is not a spin^c set")));
    }
    let elems = s.to_vec();
    for a in 0..elems.len() {
        for b in a + 1..elems.len() {
            for c in b + 1..elems.len() {
                let u = Subset::from_indices([elems[a], elems[b], elems[c]], n)?;
                if m.j_map(u)?.is_empty() {
                    return Err(precondition(format!("J(U) is empty for U = {u} inside S")));
                }
            }
        }
    }

    // S to the front, then normalize row 1.
    let order: Vec<usize> = elems.iter().copied().chain(s.complement().iter()).collect();
    let mut perm = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        perm[old] = new;
    }
    let g1 = GroupElement::from_perm(perm)?;
    let m1 = g1.act(m)?;
    let c1 = GroupElement::from_conj(sub(m1.row(0).lo & m1.row(0).hi, n));
    let mut g = c1.compose(&g1);
    let mut cur = c1.act(&m1)?;

    let size = elems.len();
    let prefix = Subset::prefix(size, n);
    let mut k = 0;
    if size > 0 {
        let sums = |x: &SMatrix| (0..size).map(|i| x.row_sum(i, prefix)).collect::<Result<Vec<SElem>>>();
        let mut rs = sums(&cur)?;
        let same = rs.iter().filter(|&&v| v == rs[0]).count();
        if 2 * same < size {
            let c = GroupElement::from_conj(sub(1, n));
            cur = c.act(&cur)?;
            g = c.compose(&g);
            rs = sums(&cur)?;
        }
        let mut distinct: Vec<SElem> = rs.clone();
        distinct.sort();
        distinct.dedup();
        if distinct.len() > 2 {
            return Err(precondition("row sums over S take more than two values"));
        }
        let first: Vec<usize> = (0..size).filter(|&i| rs[i] == rs[0]).collect();
        let second: Vec<usize> = (0..size).filter(|&i| rs[i] != rs[0]).collect();
        k = first.len();
        let mut perm = vec![0; n];
        for (new, &old) in first.iter().chain(&second).chain(&(size..n).collect::<Vec<_>>()).enumerate() {
            perm[old] = new;
        }
        let p = GroupElement::from_perm(perm)?;
        cur = p.act(&cur)?;
        g = p.compose(&g);
    }
    let cert = StandardFormCert { g, matrix: cur, s: prefix, k, l: size - k, r: n - size };
    debug_assert_eq!(cert.g.act(m)?, cert.matrix);
    cert.validate(m, s)?;
    Ok(cert)
}

/// Values `a` in `{2, 3}` solving `k a + l conj(a) + (k - l - 1) 2 = a`.
/// Coefficients act through their parity.
pub fn forced_entry_solutions(k: usize, l: usize) -> Vec<SElem> {
    let c = (k + l + 1) % 2;
    [SElem::TWO, SElem::THREE]
        .into_iter()
        .filter(|&a| a.times(k) + a.conj().times(l) + SElem::TWO.times(c) == a)
        .collect()
}

/// The `a` predicted for row `m` (0-based, `k + l <= m < n`) of a standard
/// form. When both values solve the equation the row's own first entry is
/// returned; it is an error when neither does.
pub fn forced_row_form(cert: &StandardFormCert, m: usize) -> Result<SElem> {
    let n = cert.matrix.n_rows();
    if m < cert.k + cert.l || m >= n {
        return Err(Error::IndexOutOfRange { what: "row outside S", index: m, len: n });
    }
    let sols = forced_entry_solutions(cert.k, cert.l);
    match sols.as_slice() {
        [] => Err(precondition(format!("no a in {{2,3}} solves the equation for k = {}, l = {}", cert.k, cert.l))),
        [a] => Ok(*a),
        _ => {
            let a = cert.matrix.get(m, 0);
            if sols.contains(&a) {
                Ok(a)
            } else {
                Err(precondition(format!("row {} starts with {}", m + 1, a.to_digit())))
            }
        }
    }
}
