//! Joint-probability boxes for two parties with two dichotomic settings each.
//!
//! A box stores the sixteen probabilities `P(A_i = a, B_j = b)` for the four
//! setting pairs. Setting and outcome indices are zero-based throughout:
//! setting `0` is `A1`/`B1`, outcome index `0` is `+1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default absolute tolerance used by validation and derived checks.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Attempts allowed before `random_nosignaling` gives up.
pub const NOSIGNALING_MAX_ATTEMPTS: usize = 10_000;

/// A dichotomic measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Outcome {
    pub const ALL: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn index(self) -> usize {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_index(idx: usize) -> Outcome {
        if idx == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Outcome {
        match self {
            Outcome::Plus => Outcome::Minus,
            Outcome::Minus => Outcome::Plus,
        }
    }

    pub fn from_char(c: char) -> Option<Outcome> {
        match c {
            '+' => Some(Outcome::Plus),
            '-' => Some(Outcome::Minus),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        }
    }
}

/// Position of one entry in a box: setting pair `(i, j)` and outcomes `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntryIndex {
    pub i: usize,
    pub j: usize,
    pub a: usize,
    pub b: usize,
}

impl EntryIndex {
    pub fn all() -> impl Iterator<Item = EntryIndex> {
        (0..16).map(|k| EntryIndex {
            i: (k >> 3) & 1,
            j: (k >> 2) & 1,
            a: (k >> 1) & 1,
            b: k & 1,
        })
    }
}

impl fmt::Display for EntryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P(A{}={} B{}={})",
            self.i + 1,
            Outcome::from_index(self.a).symbol(),
            self.j + 1,
            Outcome::from_index(self.b).symbol()
        )
    }
}

pub type BoxArray = [[[[f64; 2]; 2]; 2]; 2];

/// The sixteen joint probabilities `p[i][j][a][b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointProbBox {
    p: BoxArray,
}

impl JointProbBox {
    /// Wraps raw entries. No validation happens here; see [`validate`].
    pub fn from_array(p: BoxArray) -> Self {
        JointProbBox { p }
    }

    pub fn as_array(&self) -> &BoxArray {
        &self.p
    }

    pub fn get(&self, i: usize, j: usize, a: Outcome, b: Outcome) -> f64 {
        self.p[i][j][a.index()][b.index()]
    }

    pub fn at(&self, idx: EntryIndex) -> f64 {
        self.p[idx.i][idx.j][idx.a][idx.b]
    }

    pub fn set(&mut self, idx: EntryIndex, value: f64) {
        self.p[idx.i][idx.j][idx.a][idx.b] = value;
    }

    /// `P(A_i B_j)`: both observables take `+1`.
    pub fn pp(&self, i: usize, j: usize) -> f64 {
        self.p[i][j][0][0]
    }

    /// Four entries of a setting pair in the order `++, +-, -+, --`.
    pub fn pair(&self, i: usize, j: usize) -> [f64; 4] {
        let q = &self.p[i][j];
        [q[0][0], q[0][1], q[1][0], q[1][1]]
    }

    /// `P(A_i = +)` as read from setting pair `(i, j)`.
    pub fn alice_marginal_from(&self, i: usize, j: usize) -> f64 {
        self.p[i][j][0][0] + self.p[i][j][0][1]
    }

    /// `P(B_j = +)` as read from setting pair `(i, j)`.
    pub fn bob_marginal_from(&self, i: usize, j: usize) -> f64 {
        self.p[i][j][0][0] + self.p[i][j][1][0]
    }

    /// Correlation `E_ij = p(++) + p(--) - p(+-) - p(-+)`.
    pub fn correlation(&self, i: usize, j: usize) -> f64 {
        let q = &self.p[i][j];
        q[0][0] + q[1][1] - q[0][1] - q[1][0]
    }

    /// Swaps setting labels 1 and 2 for both parties at once.
    pub fn relabel_settings(&self) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for idx in EntryIndex::all() {
            p[1 - idx.i][1 - idx.j][idx.a][idx.b] = self.at(idx);
        }
        JointProbBox { p }
    }

    /// Exchanges Bob's `+1` and `-1` outcome labels for both of his settings.
    pub fn flip_bob_outcomes(&self) -> Self {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for idx in EntryIndex::all() {
            p[idx.i][idx.j][idx.a][1 - idx.b] = self.at(idx);
        }
        JointProbBox { p }
    }

    /// Largest entrywise absolute difference to another box.
    pub fn max_abs_diff(&self, other: &JointProbBox) -> f64 {
        EntryIndex::all()
            .map(|idx| (self.at(idx) - other.at(idx)).abs())
            .fold(0.0, f64::max)
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &JointProbBox, w: f64) -> Self {
        let mut out = *self;
        for idx in EntryIndex::all() {
            out.set(idx, w * self.at(idx) + (1.0 - w) * other.at(idx));
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum BoxError {
    #[error("entry {index} is not finite ({value})")]
    NonFinite { index: EntryIndex, value: f64 },
    #[error("box is not valid at tolerance {tolerance:e}: {summary}")]
    Invalid { tolerance: f64, summary: String },
    #[error(
        "signaling box: marginal of {party}{setting} reads {first} and {second} depending on the other party's setting"
    )]
    Signaling {
        party: char,
        setting: usize,
        first: f64,
        second: f64,
    },
    #[error("free parameters reconstruct {index} = {value}, outside [0, 1]")]
    InfeasibleParameters { index: EntryIndex, value: f64 },
    #[error("parameter {name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("no valid no-signaling box after {attempts} attempts")]
    SamplingExhausted { attempts: usize },
}

/// One of the sixteen entries fell outside `[0, 1]` by more than the tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RangeViolation {
    pub index: EntryIndex,
    pub value: f64,
}

/// A single constraint family that a validation can flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    /// Sum rule of setting pair `(i, j)`, flattened as `2 * i + j`.
    Normalization(usize),
    /// One of the eight no-signaling equalities, in [`NOSIGNALING_ROWS`] order.
    NoSignaling(usize),
    Range(EntryIndex),
}

/// A marginal that must not depend on the other party's setting:
/// `(party, setting, outcome index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoSignalingRow {
    pub party: char,
    pub setting: usize,
    pub outcome: usize,
}

/// The eight no-signaling equalities, ordered as they are usually printed:
/// A1+, B1+, A2+, B2+, A1-, A2-, B1-, B2-.
pub const NOSIGNALING_ROWS: [NoSignalingRow; 8] = [
    NoSignalingRow { party: 'A', setting: 0, outcome: 0 },
    NoSignalingRow { party: 'B', setting: 0, outcome: 0 },
    NoSignalingRow { party: 'A', setting: 1, outcome: 0 },
    NoSignalingRow { party: 'B', setting: 1, outcome: 0 },
    NoSignalingRow { party: 'A', setting: 0, outcome: 1 },
    NoSignalingRow { party: 'A', setting: 1, outcome: 1 },
    NoSignalingRow { party: 'B', setting: 0, outcome: 1 },
    NoSignalingRow { party: 'B', setting: 1, outcome: 1 },
];

impl NoSignalingRow {
    /// Signed residual: reading with the other party's setting 1 minus setting 2.
    fn residual(&self, b: &JointProbBox) -> f64 {
        let p = b.as_array();
        let (s, o) = (self.setting, self.outcome);
        match self.party {
            'A' => (p[s][0][o][0] + p[s][0][o][1]) - (p[s][1][o][0] + p[s][1][o][1]),
            _ => (p[0][s][0][o] + p[0][s][1][o]) - (p[1][s][0][o] + p[1][s][1][o]),
        }
    }

    /// Whether the entry takes part in this equality.
    pub fn involves(&self, idx: EntryIndex) -> bool {
        match self.party {
            'A' => idx.i == self.setting && idx.a == self.outcome,
            _ => idx.j == self.setting && idx.b == self.outcome,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `sum - 1` per setting pair, order 11, 12, 21, 22.
    pub normalization_residuals: [f64; 4],
    /// Signed residuals of [`NOSIGNALING_ROWS`].
    pub nosignaling_residuals: [f64; 8],
    pub range_violations: Vec<RangeViolation>,
    pub tolerance: f64,
    pub valid: bool,
}

impl ValidationReport {
    pub fn failing_channels(&self) -> Vec<Channel> {
        let mut out = Vec::new();
        for (k, r) in self.normalization_residuals.iter().enumerate() {
            if r.abs() > self.tolerance {
                out.push(Channel::Normalization(k));
            }
        }
        for (k, r) in self.nosignaling_residuals.iter().enumerate() {
            if r.abs() > self.tolerance {
                out.push(Channel::NoSignaling(k));
            }
        }
        out.extend(self.range_violations.iter().map(|v| Channel::Range(v.index)));
        out
    }

    pub fn summary(&self) -> String {
        let chans = self.failing_channels();
        if chans.is_empty() {
            return "valid".to_string();
        }
        let parts: Vec<String> = chans
            .iter()
            .map(|c| match *c {
                Channel::Normalization(k) => format!(
                    "normalization of pair {}{} off by {:e}",
                    k / 2 + 1,
                    k % 2 + 1,
                    self.normalization_residuals[k]
                ),
                Channel::NoSignaling(k) => {
                    let row = NOSIGNALING_ROWS[k];
                    format!(
                        "no-signaling for {}{}{} off by {:e}",
                        row.party,
                        row.setting + 1,
                        Outcome::from_index(row.outcome).symbol(),
                        self.nosignaling_residuals[k]
                    )
                }
                Channel::Range(idx) => {
                    let v = self
                        .range_violations
                        .iter()
                        .find(|r| r.index == idx)
                        .map(|r| r.value)
                        .unwrap_or(f64::NAN);
                    format!("{idx} = {v} outside [0, 1]")
                }
            })
            .collect();
        parts.join("; ")
    }
}

/// Checks normalization, no-signaling and the entry range at `tol`.
pub fn validate(b: &JointProbBox, tol: f64) -> Result<ValidationReport, BoxError> {
    for idx in EntryIndex::all() {
        let v = b.at(idx);
        if !v.is_finite() {
            return Err(BoxError::NonFinite { index: idx, value: v });
        }
    }
    let mut normalization_residuals = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            normalization_residuals[2 * i + j] = b.pair(i, j).iter().sum::<f64>() - 1.0;
        }
    }
    let mut nosignaling_residuals = [0.0; 8];
    for (k, row) in NOSIGNALING_ROWS.iter().enumerate() {
        nosignaling_residuals[k] = row.residual(b);
    }
    let range_violations: Vec<RangeViolation> = EntryIndex::all()
        .filter_map(|idx| {
            let v = b.at(idx);
            (v < -tol || v > 1.0 + tol).then_some(RangeViolation { index: idx, value: v })
        })
        .collect();
    let valid = range_violations.is_empty()
        && normalization_residuals.iter().all(|r| r.abs() <= tol)
        && nosignaling_residuals.iter().all(|r| r.abs() <= tol);
    Ok(ValidationReport {
        normalization_residuals,
        nosignaling_residuals,
        range_violations,
        tolerance: tol,
        valid,
    })
}

/// Validates and turns an invalid verdict into an error.
pub fn ensure_valid(b: &JointProbBox, tol: f64) -> Result<(), BoxError> {
    let report = validate(b, tol)?;
    if report.valid {
        Ok(())
    } else {
        Err(BoxError::Invalid {
            tolerance: tol,
            summary: report.summary(),
        })
    }
}

/// Marginals, correlations and CHSH sums of a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub pa: [f64; 2],
    pub pb: [f64; 2],
    pub e: [[f64; 2]; 2],
    /// `S_k`: the four correlations summed with the minus sign on pair `k`
    /// (order 11, 12, 21, 22).
    pub chsh: [f64; 4],
    pub chsh_max_abs: f64,
}

/// Computes [`BoxStats`]. Marginals are averaged over the two readings the box
/// offers; readings that disagree beyond `tol` are reported as signaling.
pub fn stats(b: &JointProbBox, tol: f64) -> Result<BoxStats, BoxError> {
    for idx in EntryIndex::all() {
        let v = b.at(idx);
        if !v.is_finite() {
            return Err(BoxError::NonFinite { index: idx, value: v });
        }
    }
    let mut pa = [0.0; 2];
    let mut pb = [0.0; 2];
    for s in 0..2 {
        let (a0, a1) = (b.alice_marginal_from(s, 0), b.alice_marginal_from(s, 1));
        if (a0 - a1).abs() > tol {
            return Err(BoxError::Signaling {
                party: 'A',
                setting: s + 1,
                first: a0,
                second: a1,
            });
        }
        pa[s] = 0.5 * (a0 + a1);
        let (b0, b1) = (b.bob_marginal_from(0, s), b.bob_marginal_from(1, s));
        if (b0 - b1).abs() > tol {
            return Err(BoxError::Signaling {
                party: 'B',
                setting: s + 1,
                first: b0,
                second: b1,
            });
        }
        pb[s] = 0.5 * (b0 + b1);
    }
    let e = [
        [b.correlation(0, 0), b.correlation(0, 1)],
        [b.correlation(1, 0), b.correlation(1, 1)],
    ];
    let flat = [e[0][0], e[0][1], e[1][0], e[1][1]];
    let total: f64 = flat.iter().sum();
    let mut chsh = [0.0; 4];
    for k in 0..4 {
        chsh[k] = total - 2.0 * flat[k];
    }
    let chsh_max_abs = chsh.iter().map(|s| s.abs()).fold(0.0, f64::max);
    Ok(BoxStats {
        pa,
        pb,
        e,
        chsh,
        chsh_max_abs,
    })
}

/// The eight numbers from which a no-signaling box is rebuilt:
/// the four `+1` marginals and the four `P(A_i B_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeParams8 {
    pub pa: [f64; 2],
    pub pb: [f64; 2],
    pub pp: [[f64; 2]; 2],
}

impl FreeParams8 {
    /// Reads the parameters off a box. Marginals are taken from the pair with
    /// the other party's first setting.
    pub fn from_box(b: &JointProbBox) -> Self {
        FreeParams8 {
            pa: [b.alice_marginal_from(0, 0), b.alice_marginal_from(1, 0)],
            pb: [b.bob_marginal_from(0, 0), b.bob_marginal_from(0, 1)],
            pp: [[b.pp(0, 0), b.pp(0, 1)], [b.pp(1, 0), b.pp(1, 1)]],
        }
    }

    /// Rebuilds all sixteen entries; an entry outside `[-tol, 1 + tol]` is an error.
    pub fn reconstruct(&self, tol: f64) -> Result<JointProbBox, BoxError> {
        let mut p = [[[[0.0; 2]; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let pab = self.pp[i][j];
                p[i][j][0][0] = pab;
                p[i][j][0][1] = self.pa[i] - pab;
                p[i][j][1][0] = self.pb[j] - pab;
                p[i][j][1][1] = 1.0 - self.pa[i] - self.pb[j] + pab;
            }
        }
        let b = JointProbBox::from_array(p);
        for idx in EntryIndex::all() {
            let v = b.at(idx);
            if !v.is_finite() {
                return Err(BoxError::NonFinite { index: idx, value: v });
            }
            if v < -tol || v > 1.0 + tol {
                return Err(BoxError::InfeasibleParameters { index: idx, value: v });
            }
        }
        Ok(b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CerecedaSet {
    First,
    Second,
}

impl CerecedaSet {
    pub fn from_number(n: u8) -> Option<CerecedaSet> {
        match n {
            1 => Some(CerecedaSet::First),
            2 => Some(CerecedaSet::Second),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            CerecedaSet::First => 1,
            CerecedaSet::Second => 2,
        }
    }
}

/// Whether entry `(i, j, a, b)` belongs to the set mu: equal outcomes on the
/// pairs 11, 12, 21 and opposite outcomes on pair 22.
pub fn in_mu_set(idx: EntryIndex) -> bool {
    let equal = idx.a == idx.b;
    if idx.i == 1 && idx.j == 1 {
        !equal
    } else {
        equal
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoxSpec {
    /// Independent parties with the given `+1` probabilities `(pA1, pA2, pB1, pB2)`.
    Product([f64; 4]),
    /// Outcomes fixed for `(A1, A2, B1, B2)`.
    Deterministic([Outcome; 4]),
    Cereceda(CerecedaSet),
    Pr,
    FromFreeParams(FreeParams8),
    RandomLocal(u64),
    RandomNoSignaling(u64),
}

pub fn make_box(spec: BoxSpec) -> Result<JointProbBox, BoxError> {
    match spec {
        BoxSpec::Product(m) => product_box(m),
        BoxSpec::Deterministic(s) => Ok(deterministic_box(s)),
        BoxSpec::Cereceda(set) => Ok(cereceda_box(set)),
        BoxSpec::Pr => Ok(pr_box()),
        BoxSpec::FromFreeParams(fp) => fp.reconstruct(DEFAULT_TOL),
        BoxSpec::RandomLocal(seed) => Ok(random_local(seed)),
        BoxSpec::RandomNoSignaling(seed) => random_nosignaling(seed),
    }
}

pub fn product_box(m: [f64; 4]) -> Result<JointProbBox, BoxError> {
    const NAMES: [&str; 4] = ["pA1", "pA2", "pB1", "pB2"];
    for (k, v) in m.iter().enumerate() {
        if !(0.0..=1.0).contains(v) {
            return Err(BoxError::ParameterOutOfRange {
                name: NAMES[k],
                value: *v,
            });
        }
    }
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for idx in EntryIndex::all() {
        let pa = if idx.a == 0 { m[idx.i] } else { 1.0 - m[idx.i] };
        let pb = if idx.b == 0 { m[2 + idx.j] } else { 1.0 - m[2 + idx.j] };
        p[idx.i][idx.j][idx.a][idx.b] = pa * pb;
    }
    Ok(JointProbBox::from_array(p))
}

/// Point-mass box for the assignment `(A1, A2, B1, B2)`.
pub fn deterministic_box(s: [Outcome; 4]) -> JointProbBox {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            p[i][j][s[i].index()][s[2 + j].index()] = 1.0;
        }
    }
    JointProbBox::from_array(p)
}

/// All sixteen deterministic assignments, enumerated with `A1` as the most
/// significant bit and `+` before `-`.
pub fn deterministic_strategies() -> [[Outcome; 4]; 16] {
    let mut out = [[Outcome::Plus; 4]; 16];
    for (k, s) in out.iter_mut().enumerate() {
        for (bit, o) in s.iter_mut().enumerate() {
            *o = Outcome::from_index((k >> (3 - bit)) & 1);
        }
    }
    out
}

pub fn cereceda_box(set: CerecedaSet) -> JointProbBox {
    let hi = (2.0 + std::f64::consts::SQRT_2) / 8.0;
    let lo = (2.0 - std::f64::consts::SQRT_2) / 8.0;
    let (mu, nu) = match set {
        CerecedaSet::First => (hi, lo),
        CerecedaSet::Second => (lo, hi),
    };
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for idx in EntryIndex::all() {
        p[idx.i][idx.j][idx.a][idx.b] = if in_mu_set(idx) { mu } else { nu };
    }
    JointProbBox::from_array(p)
}

/// Perfect correlation on pairs 11, 12, 21 and perfect anticorrelation on 22.
pub fn pr_box() -> JointProbBox {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for idx in EntryIndex::all() {
        let same = idx.a == idx.b;
        let want_same = !(idx.i == 1 && idx.j == 1);
        p[idx.i][idx.j][idx.a][idx.b] = if same == want_same { 0.5 } else { 0.0 };
    }
    JointProbBox::from_array(p)
}

/// Mixture of the sixteen deterministic boxes with Dirichlet(1/2) weights.
pub fn random_local(seed: u64) -> JointProbBox {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma = Gamma::new(0.5, 1.0).expect("valid gamma parameters");
    let mut w = [0.0; 16];
    loop {
        for x in w.iter_mut() {
            *x = gamma.sample(&mut rng);
        }
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            w.iter_mut().for_each(|x| *x /= total);
            break;
        }
    }
    mixture_of_deterministic(&w)
}

/// Box produced by weighting the deterministic strategies of
/// [`deterministic_strategies`] with `w`.
pub fn mixture_of_deterministic(w: &[f64; 16]) -> JointProbBox {
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (s, wk) in deterministic_strategies().iter().zip(w) {
        for i in 0..2 {
            for j in 0..2 {
                p[i][j][s[i].index()][s[2 + j].index()] += wk;
            }
        }
    }
    JointProbBox::from_array(p)
}

/// Rejection sampler over the free parameters: marginals uniform on `[0, 1]`,
/// each `P(A_i B_j)` uniform on `[0, min(P(A_i), P(B_j))]`; a draw is rejected
/// when a reconstructed `P(Ā_i B̄_j)` would be negative.
pub fn random_nosignaling(seed: u64) -> Result<JointProbBox, BoxError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..NOSIGNALING_MAX_ATTEMPTS {
        let pa = [rng.gen::<f64>(), rng.gen::<f64>()];
        let pb = [rng.gen::<f64>(), rng.gen::<f64>()];
        let mut pp = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                pp[i][j] = rng.gen::<f64>() * pa[i].min(pb[j]);
            }
        }
        let fp = FreeParams8 { pa, pb, pp };
        if let Ok(b) = fp.reconstruct(0.0) {
            return Ok(b);
        }
    }
    Err(BoxError::SamplingExhausted {
        attempts: NOSIGNALING_MAX_ATTEMPTS,
    })
}
