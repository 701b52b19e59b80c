//! Bell-system feasibility for four dichotomic observables.
//!
//! [`bell_values`] evaluates the four two-sided Bell expressions whose
//! satisfaction is necessary and sufficient for a joint distribution of
//! `(A1, A2, B1, B2)` to exist. [`fine_construct`] builds such a distribution
//! explicitly, and [`lp_feasible`] answers the same question with a linear
//! program over the sixteen deterministic strategies, independently of both.

pub mod simplex;

use crate::corrbox::{
    deterministic_strategies, ensure_valid, stats, BoxError, BoxStats, EntryIndex, JointProbBox,
    Outcome, DEFAULT_TOL,
};
use serde::{Deserialize, Serialize};
use simplex::{phase_one, PhaseOne, SimplexError, SimplexOptions};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FineError {
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error("not constructible: {0}")]
    NotConstructible(NotConstructible),
    #[error("linear feasibility solver failed: {0}")]
    Solver(String),
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("malformed joint distribution: {0}")]
    MalformedDistribution(String),
}

impl From<SimplexError> for FineError {
    fn from(e: SimplexError) -> Self {
        FineError::Solver(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NotConstructible {
    /// Strict mode refuses boxes outside the Bell system.
    BellViolated { violations: Vec<BellViolation> },
    /// A constructed probability came out below `-tolerance`.
    NegativeEntry { entry: String, value: f64 },
}

impl fmt::Display for NotConstructible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotConstructible::BellViolated { violations } => {
                write!(f, "Bell system violated at")?;
                for v in violations {
                    write!(f, " {} ({} side, value {:.6})", v.index, v.side, v.value)?;
                }
                Ok(())
            }
            NotConstructible::NegativeEntry { entry, value } => {
                write!(f, "{entry} = {value:e} is negative")
            }
        }
    }
}

/// Setting choice `(i, j, i', j')` of a Bell expression, zero-based with
/// `i' = 1 - i` and `j' = 1 - j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BellIndex {
    pub i: usize,
    pub j: usize,
}

impl BellIndex {
    pub const ALL: [BellIndex; 4] = [
        BellIndex { i: 0, j: 0 },
        BellIndex { i: 0, j: 1 },
        BellIndex { i: 1, j: 0 },
        BellIndex { i: 1, j: 1 },
    ];

    pub fn i_prime(self) -> usize {
        1 - self.i
    }

    pub fn j_prime(self) -> usize {
        1 - self.j
    }

    /// One-based `(i, j, i', j')`.
    pub fn one_based(self) -> [usize; 4] {
        [self.i + 1, self.j + 1, self.i_prime() + 1, self.j_prime() + 1]
    }

    /// The index after swapping setting labels 1 and 2 for both parties.
    pub fn relabeled(self) -> BellIndex {
        BellIndex {
            i: 1 - self.i,
            j: 1 - self.j,
        }
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.one_based();
        write!(f, "(i={a},j={b},i'={c},j'={d})")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellSide {
    /// `value >= -1`
    Lower,
    /// `value <= 0`
    Upper,
}

impl fmt::Display for BellSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BellSide::Lower => write!(f, "lower"),
            BellSide::Upper => write!(f, "upper"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellTerm {
    pub index: BellIndex,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellViolation {
    pub index: BellIndex,
    pub side: BellSide,
    pub value: f64,
}

/// Four Bell expressions, each bounded on both sides: eight inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BellSystemReport {
    pub terms: [BellTerm; 4],
    pub violations: Vec<BellViolation>,
    pub satisfied: bool,
    pub tolerance: f64,
}

impl BellSystemReport {
    pub fn value(&self, index: BellIndex) -> f64 {
        self.terms
            .iter()
            .find(|t| t.index == index)
            .map(|t| t.value)
            .expect("all four indices present")
    }

    /// Slack of each of the eight inequalities; negative slack means violated.
    pub fn inequality_slacks(&self) -> [(BellIndex, BellSide, f64); 8] {
        let mut out = [(BellIndex { i: 0, j: 0 }, BellSide::Lower, 0.0); 8];
        for (k, t) in self.terms.iter().enumerate() {
            out[2 * k] = (t.index, BellSide::Lower, t.value + 1.0);
            out[2 * k + 1] = (t.index, BellSide::Upper, -t.value);
        }
        out
    }

    /// Largest amount by which any inequality is exceeded (zero when none is).
    pub fn max_violation(&self) -> f64 {
        self.inequality_slacks()
            .iter()
            .map(|(_, _, s)| (-s).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// `P(A_i B_j) + P(A_i B_j') + P(A_i' B_j') - P(A_i' B_j) - P(A_i) - P(B_j')`.
pub fn bell_expression(b: &JointProbBox, st: &BoxStats, idx: BellIndex) -> f64 {
    let (i, j, ip, jp) = (idx.i, idx.j, idx.i_prime(), idx.j_prime());
    b.pp(i, j) + b.pp(i, jp) + b.pp(ip, jp) - b.pp(ip, j) - st.pa[i] - st.pb[jp]
}

pub fn bell_values(b: &JointProbBox, tol: f64) -> Result<BellSystemReport, BoxError> {
    ensure_valid(b, tol)?;
    let st = stats(b, tol)?;
    Ok(bell_report_from_stats(b, &st, tol))
}

fn bell_report_from_stats(b: &JointProbBox, st: &BoxStats, tol: f64) -> BellSystemReport {
    let terms = BellIndex::ALL.map(|index| BellTerm {
        index,
        value: bell_expression(b, st, index),
    });
    let mut violations = Vec::new();
    for t in &terms {
        if t.value < -1.0 - tol {
            violations.push(BellViolation {
                index: t.index,
                side: BellSide::Lower,
                value: t.value,
            });
        }
        if t.value > tol {
            violations.push(BellViolation {
                index: t.index,
                side: BellSide::Upper,
                value: t.value,
            });
        }
    }
    BellSystemReport {
        terms,
        satisfied: violations.is_empty(),
        violations,
        tolerance: tol,
    }
}

/// Inputs of the three-observable system for `A`, `B`, `B'`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleInputs {
    pub pa: f64,
    pub pb: f64,
    pub pb2: f64,
    pub pab: f64,
    pub pab2: f64,
    pub pbb2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleSystemReport {
    /// Left side minus right side of the four inequalities.
    pub residuals: [f64; 4],
    pub satisfied: bool,
    pub tolerance: f64,
}

pub fn triple_values(t: TripleInputs, tol: f64) -> Result<TripleSystemReport, FineError> {
    let named = [
        ("P(A)", t.pa),
        ("P(B)", t.pb),
        ("P(B')", t.pb2),
        ("P(AB)", t.pab),
        ("P(AB')", t.pab2),
        ("P(BB')", t.pbb2),
    ];
    for (name, v) in named {
        if !(0.0..=1.0).contains(&v) {
            return Err(FineError::OutOfRange { name, value: v });
        }
    }
    let residuals = [
        t.pa + t.pb + t.pb2 - 1.0 - t.pab - t.pab2 - t.pbb2,
        t.pab + t.pab2 - t.pa - t.pbb2,
        t.pab + t.pbb2 - t.pb - t.pab2,
        t.pab2 + t.pbb2 - t.pb2 - t.pab,
    ];
    Ok(TripleSystemReport {
        satisfied: residuals.iter().all(|r| *r <= tol),
        residuals,
        tolerance: tol,
    })
}

/// How the `P(B1 B2)` value is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaMode {
    /// Minimum of `P(A_n B_m) + P(B_k) - P(A_n B_k)` over `n`, `m != k`,
    /// together with `P(B1)` and `P(B2)`.
    FineLiteral,
    /// Same expressions, with every marginal summed over both settings of the
    /// other party and `P(A_n B_m)` replaced by the product of those sums.
    /// Gives 1 on both Cereceda sets. Never used as ground truth.
    SummedMarginals,
}

impl fmt::Display for GammaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaMode::FineLiteral => write!(f, "fine-literal"),
            GammaMode::SummedMarginals => write!(f, "summed-marginals"),
        }
    }
}

/// How `alpha = P(A1 B1 B2)` and `beta = P(A2 B1 B2)` are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaRule {
    /// `alpha = gamma P(A1)`, `beta = gamma P(A2)`, regardless of feasibility.
    GammaTimesMarginal,
    /// `gamma P(A_n)` clamped into the interval on which every entry of the
    /// three-observable table is nonnegative.
    FeasibleProjection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineIntermediates {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `P(B1 B2), P(B1 B̄2), P(B̄1 B2), P(B̄1 B̄2)`.
    pub b_pair: [f64; 4],
    pub gamma_mode: GammaMode,
    pub alpha_rule: AlphaRule,
    pub gamma_candidates: Vec<f64>,
    /// `gamma P(A1)` and `gamma P(A2)`.
    pub alpha_product: f64,
    pub beta_product: f64,
    /// Nonnegativity intervals for `alpha` and `beta`; `lo > hi` when empty.
    pub alpha_interval: [f64; 2],
    pub beta_interval: [f64; 2],
}

impl FineIntermediates {
    pub fn alpha_is_product(&self) -> bool {
        self.alpha == self.alpha_product && self.beta == self.beta_product
    }
}

/// `P(B1 B̄2)` and `P(B̄1 B2)` exactly as printed alongside the construction,
/// which swaps the two marginals relative to [`FineIntermediates::b_pair`].
pub fn printed_b_pair_fill(gamma: f64, pb: [f64; 2]) -> [f64; 4] {
    [gamma, pb[1] - gamma, pb[0] - gamma, 1.0 - pb[0] - pb[1] + gamma]
}

pub fn gamma_candidates(b: &JointProbBox, st: &BoxStats, mode: GammaMode) -> Vec<f64> {
    const MK: [(usize, usize); 2] = [(0, 1), (1, 0)];
    match mode {
        GammaMode::FineLiteral => {
            let mut c: Vec<f64> = (0..2)
                .flat_map(|n| MK.iter().map(move |&(m, k)| (n, m, k)))
                .map(|(n, m, k)| b.pp(n, m) + st.pb[k] - b.pp(n, k))
                .collect();
            c.extend(st.pb);
            c
        }
        GammaMode::SummedMarginals => {
            let ma = [0, 1].map(|n| b.alice_marginal_from(n, 0) + b.alice_marginal_from(n, 1));
            let mb = [0, 1].map(|m| b.bob_marginal_from(0, m) + b.bob_marginal_from(1, m));
            let mut c: Vec<f64> = (0..2)
                .flat_map(|n| MK.iter().map(move |&(m, k)| (n, m, k)))
                .map(|(n, m, k)| ma[n] * mb[m] + mb[k] - ma[n] * mb[k])
                .collect();
            c.extend(mb);
            c
        }
    }
}

fn feasible_interval(b: &JointProbBox, st: &BoxStats, n: usize, gamma: f64) -> [f64; 2] {
    let (p1, p2) = (b.pp(n, 0), b.pp(n, 1));
    let lo = 0.0_f64
        .max(p1 + p2 - st.pa[n])
        .max(p1 + gamma - st.pb[0])
        .max(p2 + gamma - st.pb[1]);
    let hi = p1
        .min(p2)
        .min(gamma)
        .min(1.0 - st.pa[n] - st.pb[0] - st.pb[1] + p1 + p2 + gamma);
    [lo, hi]
}

/// Computes `gamma`, `alpha`, `beta` and the `B1 B2` table.
pub fn intermediates(
    b: &JointProbBox,
    mode: GammaMode,
    rule: AlphaRule,
    tol: f64,
) -> Result<FineIntermediates, BoxError> {
    ensure_valid(b, tol)?;
    let st = stats(b, tol)?;
    Ok(intermediates_from_stats(b, &st, mode, rule))
}

pub(crate) fn intermediates_from_stats(
    b: &JointProbBox,
    st: &BoxStats,
    mode: GammaMode,
    rule: AlphaRule,
) -> FineIntermediates {
    let gamma_candidates = gamma_candidates(b, st, mode);
    let gamma = gamma_candidates.iter().copied().fold(f64::INFINITY, f64::min);
    let alpha_product = gamma * st.pa[0];
    let beta_product = gamma * st.pa[1];
    let alpha_interval = feasible_interval(b, st, 0, gamma);
    let beta_interval = feasible_interval(b, st, 1, gamma);
    let (alpha, beta) = match rule {
        AlphaRule::GammaTimesMarginal => (alpha_product, beta_product),
        AlphaRule::FeasibleProjection => (
            project(alpha_product, alpha_interval),
            project(beta_product, beta_interval),
        ),
    };
    FineIntermediates {
        gamma,
        alpha,
        beta,
        b_pair: [
            gamma,
            st.pb[0] - gamma,
            st.pb[1] - gamma,
            1.0 - st.pb[0] - st.pb[1] + gamma,
        ],
        gamma_mode: mode,
        alpha_rule: rule,
        gamma_candidates,
        alpha_product,
        beta_product,
        alpha_interval,
        beta_interval,
    }
}

fn project(v: f64, [lo, hi]: [f64; 2]) -> f64 {
    if v < lo {
        lo.min(hi)
    } else if v > hi {
        hi
    } else {
        v
    }
}

/// Distribution of `(A_n, B1, B2)` indexed `[a][b1][b2]`.
pub type TripleTable = [[[f64; 2]; 2]; 2];

fn triple_table(b: &JointProbBox, st: &BoxStats, n: usize, gamma: f64, alpha: f64) -> TripleTable {
    let (p1, p2, pa) = (b.pp(n, 0), b.pp(n, 1), st.pa[n]);
    let (pb1, pb2) = (st.pb[0], st.pb[1]);
    [
        [[alpha, p1 - alpha], [p2 - alpha, pa - p1 - p2 + alpha]],
        [
            [gamma - alpha, pb1 - p1 - gamma + alpha],
            [pb2 - p2 - gamma + alpha, 1.0 - pa - pb1 - pb2 + p1 + p2 + gamma - alpha],
        ],
    ]
}

/// Probability distribution over `(a1, a2, b1, b2)`, indexed `[a1][a2][b1][b2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointDist16 {
    q: [[[[f64; 2]; 2]; 2]; 2],
}

impl JointDist16 {
    /// Checks entries against `-tol` and the total against `1 ± tol`; small
    /// negatives are clamped to zero and the table renormalized.
    pub fn new(q: [[[[f64; 2]; 2]; 2]; 2], tol: f64) -> Result<Self, FineError> {
        let mut flat = flatten(&q);
        for (k, v) in flat.iter().enumerate() {
            if !v.is_finite() {
                return Err(FineError::MalformedDistribution(format!(
                    "{} is not finite",
                    outcome_label(k)
                )));
            }
            if *v < -tol {
                return Err(FineError::MalformedDistribution(format!(
                    "{} = {v:e} is negative",
                    outcome_label(k)
                )));
            }
        }
        let total: f64 = flat.iter().sum();
        if (total - 1.0).abs() > tol {
            return Err(FineError::MalformedDistribution(format!(
                "entries sum to {total}"
            )));
        }
        Ok(Self::clamped(&mut flat))
    }

    fn clamped(flat: &mut [f64; 16]) -> Self {
        if flat.iter().any(|v| *v < 0.0) {
            flat.iter_mut().for_each(|v| *v = v.max(0.0));
            let total: f64 = flat.iter().sum();
            flat.iter_mut().for_each(|v| *v /= total);
        }
        Self::from_flat(flat)
    }

    /// Weights in [`deterministic_strategies`] order; the flattened index of
    /// this table uses the same bit layout.
    pub fn from_flat(w: &[f64; 16]) -> Self {
        let mut q = [[[[0.0; 2]; 2]; 2]; 2];
        for (k, v) in w.iter().enumerate() {
            q[(k >> 3) & 1][(k >> 2) & 1][(k >> 1) & 1][k & 1] = *v;
        }
        JointDist16 { q }
    }

    pub fn to_flat(&self) -> [f64; 16] {
        flatten(&self.q)
    }

    pub fn point_mass(s: [Outcome; 4]) -> Self {
        let mut q = [[[[0.0; 2]; 2]; 2]; 2];
        q[s[0].index()][s[1].index()][s[2].index()][s[3].index()] = 1.0;
        JointDist16 { q }
    }

    pub fn uniform() -> Self {
        JointDist16 {
            q: [[[[1.0 / 16.0; 2]; 2]; 2]; 2],
        }
    }

    pub fn as_array(&self) -> &[[[[f64; 2]; 2]; 2]; 2] {
        &self.q
    }

    pub fn get(&self, a1: Outcome, a2: Outcome, b1: Outcome, b2: Outcome) -> f64 {
        self.q[a1.index()][a2.index()][b1.index()][b2.index()]
    }

    /// Probability by sign pattern, e.g. `"+-+-"` for `A1 Ā2 B1 B̄2`.
    pub fn by_pattern(&self, pattern: &str) -> f64 {
        let idx: Vec<usize> = pattern
            .chars()
            .map(|c| Outcome::from_char(c).expect("pattern uses + and -").index())
            .collect();
        assert_eq!(idx.len(), 4, "pattern must have four signs");
        self.q[idx[0]][idx[1]][idx[2]][idx[3]]
    }

    /// Sums out the unobserved pair for each of the sixteen pairwise joints.
    pub fn marginalize(&self) -> JointProbBox {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for idx in EntryIndex::all() {
            let mut s = 0.0;
            for k in 0..16 {
                let bits = [(k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1];
                if bits[idx.i] == idx.a && bits[2 + idx.j] == idx.b {
                    s += self.q[bits[0]][bits[1]][bits[2]][bits[3]];
                }
            }
            p[idx.i][idx.j][idx.a][idx.b] = s;
        }
        JointProbBox::from_array(p)
    }
}

fn flatten(q: &[[[[f64; 2]; 2]; 2]; 2]) -> [f64; 16] {
    let mut out = [0.0; 16];
    for (k, v) in out.iter_mut().enumerate() {
        *v = q[(k >> 3) & 1][(k >> 2) & 1][(k >> 1) & 1][k & 1];
    }
    out
}

fn outcome_label(k: usize) -> String {
    let s = |bit: usize| if (k >> bit) & 1 == 0 { '+' } else { '-' };
    format!("q(A1{} A2{} B1{} B2{})", s(3), s(2), s(1), s(0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineOptions {
    pub gamma_mode: GammaMode,
    pub alpha_rule: AlphaRule,
    /// Refuse boxes outside the Bell system before constructing anything.
    pub strict: bool,
    pub tol: f64,
}

impl FineOptions {
    pub fn new(gamma_mode: GammaMode) -> Self {
        FineOptions {
            gamma_mode,
            alpha_rule: AlphaRule::FeasibleProjection,
            strict: false,
            tol: DEFAULT_TOL,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn alpha_rule(mut self, rule: AlphaRule) -> Self {
        self.alpha_rule = rule;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineConstruction {
    pub intermediates: FineIntermediates,
    /// Distributions of `(A1, B1, B2)` and `(A2, B1, B2)`.
    pub triples: [TripleTable; 2],
    pub dist: JointDist16,
}

/// [`fine_construct_with`] using the default options for `mode`.
pub fn fine_construct(b: &JointProbBox, mode: GammaMode) -> Result<FineConstruction, FineError> {
    fine_construct_with(b, FineOptions::new(mode))
}

/// Builds a distribution of `(A1, A2, B1, B2)` whose pairwise marginals are
/// the box. `A1` and `A2` are combined conditionally independently given
/// `(B1, B2)`.
pub fn fine_construct_with(
    b: &JointProbBox,
    opts: FineOptions,
) -> Result<FineConstruction, FineError> {
    ensure_valid(b, opts.tol)?;
    let st = stats(b, opts.tol)?;
    if opts.strict {
        let bell = bell_report_from_stats(b, &st, opts.tol);
        if !bell.satisfied {
            return Err(FineError::NotConstructible(NotConstructible::BellViolated {
                violations: bell.violations,
            }));
        }
    }
    let inter = intermediates_from_stats(b, &st, opts.gamma_mode, opts.alpha_rule);
    let check = |label: String, v: f64| -> Result<(), FineError> {
        if v < -opts.tol || !v.is_finite() {
            Err(FineError::NotConstructible(NotConstructible::NegativeEntry {
                entry: label,
                value: v,
            }))
        } else {
            Ok(())
        }
    };
    const BP: [&str; 4] = ["P(B1 B2)", "P(B1 ~B2)", "P(~B1 B2)", "P(~B1 ~B2)"];
    for (label, v) in BP.iter().zip(inter.b_pair) {
        check(label.to_string(), v)?;
    }
    let triples = [
        triple_table(b, &st, 0, inter.gamma, inter.alpha),
        triple_table(b, &st, 1, inter.gamma, inter.beta),
    ];
    for (n, t) in triples.iter().enumerate() {
        for a in 0..2 {
            for b1 in 0..2 {
                for b2 in 0..2 {
                    let sym = |x: usize| if x == 0 { "" } else { "~" };
                    check(
                        format!("P({}A{} {}B1 {}B2)", sym(a), n + 1, sym(b1), sym(b2)),
                        t[a][b1][b2],
                    )?;
                }
            }
        }
    }
    let pb = [[inter.b_pair[0], inter.b_pair[1]], [inter.b_pair[2], inter.b_pair[3]]];
    let mut flat = [0.0; 16];
    for (k, v) in flat.iter_mut().enumerate() {
        let (a1, a2, b1, b2) = ((k >> 3) & 1, (k >> 2) & 1, (k >> 1) & 1, k & 1);
        let denom = pb[b1][b2];
        *v = if denom > 0.0 {
            triples[0][a1][b1][b2] * triples[1][a2][b1][b2] / denom
        } else {
            0.0
        };
    }
    let dist = JointDist16::new(JointDist16::from_flat(&flat).q, opts.tol)?;
    Ok(FineConstruction {
        intermediates: inter,
        triples,
        dist,
    })
}

/// Outcome of the linear feasibility oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FeasibilityVerdict {
    /// Weights over the sixteen deterministic strategies (see
    /// [`deterministic_strategies`]) reproducing the box.
    Local { weights: Vec<f64> },
    /// No such weights exist; the certificate lists the Bell violations.
    Nonlocal {
        violations: Vec<BellViolation>,
        infeasibility: f64,
    },
}

impl FeasibilityVerdict {
    pub fn is_local(&self) -> bool {
        matches!(self, FeasibilityVerdict::Local { .. })
    }
}

/// Decides whether the box is a mixture of deterministic local strategies.
pub fn lp_feasible(b: &JointProbBox, tol: f64) -> Result<FeasibilityVerdict, FineError> {
    lp_feasible_with(b, tol, SimplexOptions::default())
}

pub fn lp_feasible_with(
    b: &JointProbBox,
    tol: f64,
    opts: SimplexOptions,
) -> Result<FeasibilityVerdict, FineError> {
    ensure_valid(b, tol)?;
    let strategies = deterministic_strategies();
    let mut rows = Vec::with_capacity(16);
    let mut rhs = Vec::with_capacity(16);
    for idx in EntryIndex::all() {
        let row: Vec<f64> = strategies
            .iter()
            .map(|s| {
                let hit = s[idx.i].index() == idx.a && s[2 + idx.j].index() == idx.b;
                if hit {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        rows.push(row);
        rhs.push(b.at(idx));
    }
    match phase_one(&rows, &rhs, opts)? {
        PhaseOne::Feasible { x, .. } => {
            let mut w = [0.0; 16];
            w.copy_from_slice(&x);
            let rebuilt = crate::corrbox::mixture_of_deterministic(&w);
            let err = rebuilt.max_abs_diff(b);
            if err > tol + 1e-12 {
                return Err(FineError::Solver(format!(
                    "weights reproduce the box only to {err:e}"
                )));
            }
            Ok(FeasibilityVerdict::Local { weights: x })
        }
        PhaseOne::Infeasible { infeasibility } => {
            let st = stats(b, tol)?;
            let bell = bell_report_from_stats(b, &st, tol);
            Ok(FeasibilityVerdict::Nonlocal {
                violations: bell.violations,
                infeasibility,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrbox::{
        cereceda_box, deterministic_box, pr_box, product_box, random_local, random_nosignaling,
        CerecedaSet,
    };
    use std::f64::consts::SQRT_2;

    const DET: [Outcome; 4] = [Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus];

    #[test]
    fn product_box_bell_values_are_minus_half() {
        let r = bell_values(&product_box([0.5; 4]).unwrap(), DEFAULT_TOL).unwrap();
        for t in r.terms {
            assert_eq!(t.value, -0.5);
        }
        assert!(r.satisfied);
        assert_eq!(r.inequality_slacks().len(), 8);
    }

    #[test]
    fn cereceda_first_set_violates_at_1221() {
        let r = bell_values(&cereceda_box(CerecedaSet::First), DEFAULT_TOL).unwrap();
        let v = r.value(BellIndex { i: 0, j: 1 });
        assert!((v - (SQRT_2 - 1.0) / 2.0).abs() < 1e-15);
        assert!(!r.satisfied);
        assert!(r
            .violations
            .iter()
            .any(|x| x.index == BellIndex { i: 0, j: 1 } && x.side == BellSide::Upper));
    }

    #[test]
    fn boxes_with_silent_second_settings_satisfy_bell() {
        // P(A2) = P(B2) = 0 on a handful of A1/B1 blocks, confirmed by the LP
        for (pa, pb, pab) in [(0.3, 0.6, 0.2), (1.0, 1.0, 1.0), (0.5, 0.5, 0.0), (0.9, 0.2, 0.15)] {
            let fp = crate::corrbox::FreeParams8 {
                pa: [pa, 0.0],
                pb: [pb, 0.0],
                pp: [[pab, 0.0], [0.0, 0.0]],
            };
            let b = fp.reconstruct(DEFAULT_TOL).unwrap();
            assert!(bell_values(&b, DEFAULT_TOL).unwrap().satisfied);
            assert!(lp_feasible(&b, DEFAULT_TOL).unwrap().is_local());
        }
    }

    #[test]
    fn triple_examples() {
        let fair = TripleInputs {
            pa: 0.5,
            pb: 0.5,
            pb2: 0.5,
            pab: 0.25,
            pab2: 0.25,
            pbb2: 0.25,
        };
        assert!(triple_values(fair, DEFAULT_TOL).unwrap().satisfied);

        let bad = TripleInputs {
            pab: 0.5,
            pab2: 0.5,
            pbb2: 0.0,
            ..fair
        };
        let r = triple_values(bad, DEFAULT_TOL).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.residuals[1], 0.5);
        assert!(r.residuals[0] <= 0.0 && r.residuals[2] <= 0.0 && r.residuals[3] <= 0.0);

        let ones = TripleInputs {
            pa: 1.0,
            pb: 1.0,
            pb2: 1.0,
            pab: 1.0,
            pab2: 1.0,
            pbb2: 1.0,
        };
        let r = triple_values(ones, DEFAULT_TOL).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.residuals, [-1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn triple_rejects_out_of_range() {
        let t = TripleInputs {
            pa: 1.2,
            pb: 0.5,
            pb2: 0.5,
            pab: 0.25,
            pab2: 0.25,
            pbb2: 0.25,
        };
        assert!(matches!(
            triple_values(t, DEFAULT_TOL),
            Err(FineError::OutOfRange { name: "P(A)", .. })
        ));
    }

    #[test]
    fn product_box_intermediates() {
        let c = fine_construct(&product_box([0.5; 4]).unwrap(), GammaMode::FineLiteral).unwrap();
        let i = &c.intermediates;
        assert_eq!(i.gamma, 0.5);
        assert_eq!(i.alpha, 0.25);
        assert_eq!(i.beta, 0.25);
        assert_eq!(i.b_pair[0], 0.5);
        assert_eq!(i.b_pair[1], 0.0);
        assert!(i.alpha_is_product());
    }

    #[test]
    fn deterministic_box_constructs_point_mass() {
        let c = fine_construct(&deterministic_box(DET), GammaMode::FineLiteral).unwrap();
        assert_eq!(c.intermediates.gamma, 0.0);
        assert_eq!(c.dist, JointDist16::point_mass(DET));
    }

    #[test]
    fn strict_mode_refuses_cereceda() {
        let err = fine_construct_with(
            &cereceda_box(CerecedaSet::First),
            FineOptions::new(GammaMode::FineLiteral).strict(),
        )
        .unwrap_err();
        match err {
            FineError::NotConstructible(NotConstructible::BellViolated { violations }) => {
                assert!(!violations.is_empty())
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn lenient_mode_still_fails_on_cereceda() {
        let err = fine_construct(&cereceda_box(CerecedaSet::First), GammaMode::FineLiteral).unwrap_err();
        assert!(matches!(
            err,
            FineError::NotConstructible(NotConstructible::NegativeEntry { .. })
        ));
    }

    #[test]
    fn cereceda_gamma_in_both_modes() {
        let b = cereceda_box(CerecedaSet::First);
        let lit = intermediates(&b, GammaMode::FineLiteral, AlphaRule::GammaTimesMarginal, DEFAULT_TOL)
            .unwrap();
        assert!((lit.gamma - (2.0 - SQRT_2) / 4.0).abs() < 1e-15);
        let summed =
            intermediates(&b, GammaMode::SummedMarginals, AlphaRule::GammaTimesMarginal, DEFAULT_TOL)
                .unwrap();
        assert!((summed.gamma - 1.0).abs() < 1e-15);
        assert!((summed.alpha - 0.5).abs() < 1e-15);
    }

    #[test]
    fn marginalize_examples() {
        assert_eq!(JointDist16::point_mass(DET).marginalize(), deterministic_box(DET));
        let u = JointDist16::uniform().marginalize();
        assert!(u.max_abs_diff(&product_box([0.5; 4]).unwrap()) == 0.0);
    }

    #[test]
    fn distribution_rejects_large_negatives_and_clamps_small_ones() {
        let mut w = [1.0 / 16.0; 16];
        w[0] += 5e-10;
        w[1] -= 5e-10;
        assert!(JointDist16::new(JointDist16::from_flat(&w).q, DEFAULT_TOL).is_ok());
        let mut w = [1.0 / 15.0; 16];
        w[3] = -1e-6;
        w[4] += 1e-6 - 1.0 / 15.0;
        assert!(JointDist16::new(JointDist16::from_flat(&w).q, DEFAULT_TOL).is_err());
        let mut w = [0.0; 16];
        w[0] = 1.0 + 5e-10;
        w[1] = -5e-10;
        let d = JointDist16::new(JointDist16::from_flat(&w).q, DEFAULT_TOL).unwrap();
        assert_eq!(d.to_flat()[1], 0.0);
        assert!((d.to_flat().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lp_verdicts() {
        assert!(lp_feasible(&random_local(5), DEFAULT_TOL).unwrap().is_local());
        match lp_feasible(&pr_box(), DEFAULT_TOL).unwrap() {
            FeasibilityVerdict::Nonlocal { violations, .. } => assert!(!violations.is_empty()),
            v => panic!("{v:?}"),
        }
        assert!(!lp_feasible(&cereceda_box(CerecedaSet::First), DEFAULT_TOL)
            .unwrap()
            .is_local());
    }

    #[test]
    fn pr_box_has_no_deterministic_mixture_by_brute_force() {
        // every deterministic strategy gets at most 3 of the 4 PR constraints
        // right, so any mixture misses at least 1/4 of the PR winning mass
        let pr = pr_box();
        for s in deterministic_strategies() {
            let wins = (0..2)
                .flat_map(|i| (0..2).map(move |j| (i, j)))
                .filter(|&(i, j)| pr.get(i, j, s[i], s[2 + j]) > 0.0)
                .count();
            assert!(wins <= 3);
        }
    }

    #[test]
    fn round_trip_on_random_local_boxes() {
        for seed in 0..200 {
            let b = random_local(seed);
            let c = fine_construct(&b, GammaMode::FineLiteral).unwrap();
            assert!(c.dist.marginalize().max_abs_diff(&b) < 1e-12, "seed {seed}");
            let i = &c.intermediates;
            assert!(i.gamma >= -1e-15 && i.gamma <= st_min_pb(&b) + 1e-15);
        }
    }

    fn st_min_pb(b: &JointProbBox) -> f64 {
        let s = stats(b, DEFAULT_TOL).unwrap();
        s.pb[0].min(s.pb[1])
    }

    #[test]
    fn lp_agrees_with_bell_on_nosignaling_samples() {
        for seed in 0..300 {
            let b = random_nosignaling(seed).unwrap();
            let bell = bell_values(&b, DEFAULT_TOL).unwrap().satisfied;
            assert_eq!(lp_feasible(&b, DEFAULT_TOL).unwrap().is_local(), bell, "seed {seed}");
        }
    }
}
