//! End-to-end reproductions of the prisoner's dilemma and matching pennies
//! analyses, plus an audit that evaluates each printed reduction against a
//! direct recomputation.
//!
//! Printed forms are evaluated verbatim. Ground truth is always the direct
//! value computed from the box, the constructed joint distribution, or the
//! equilibrium enumerators.

use crate::corrbox::{
    cereceda_box, deterministic_box, stats, BoxError, BoxStats, CerecedaSet, FreeParams8,
    JointProbBox, Outcome, DEFAULT_TOL,
};
use crate::fine::{
    fine_construct, intermediates, AlphaRule, FineError, FineIntermediates, GammaMode,
    JointDist16,
};
use crate::gamecore::{
    corner_payoffs_unchecked, deltas, enumerate_nash_corners, grid_bruteforce_nash, hausdorff,
    nash_check, omega, CornerPayoffs, Game2x2, GridNash, NashSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const AUDIT_TOL: f64 = 1e-12;
pub const GRID_N: usize = 101;
pub const GRID_EPS: f64 = 1e-9;

const MODES: [GammaMode; 2] = [GammaMode::FineLiteral, GammaMode::SummedMarginals];

#[derive(Debug, Error)]
pub enum PaperlabError {
    #[error("game does not satisfy a3 > a1 > a4 > a2: {0:?}")]
    NotPdOrdering([f64; 4]),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Fine(#[from] FineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Match,
    Mismatch,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    /// Direct value.
    pub lhs: Option<f64>,
    /// Printed form.
    pub rhs: Option<f64>,
    pub residual: Option<f64>,
    pub status: CheckStatus,
    pub gamma_mode: Option<GammaMode>,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl IdentityCheck {
    fn evaluate(name: &str, lhs: f64, rhs: f64, mode: Option<GammaMode>) -> Self {
        let residual = (lhs - rhs).abs();
        IdentityCheck {
            name: name.to_string(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            residual: Some(residual),
            status: if residual <= AUDIT_TOL {
                CheckStatus::Match
            } else {
                CheckStatus::Mismatch
            },
            gamma_mode: mode,
            tolerance: AUDIT_TOL,
            note: None,
        }
    }

    fn skipped(name: &str, mode: Option<GammaMode>, why: &str) -> Self {
        IdentityCheck {
            name: name.to_string(),
            lhs: None,
            rhs: None,
            residual: None,
            status: CheckStatus::Skipped,
            gamma_mode: mode,
            tolerance: AUDIT_TOL,
            note: Some(why.to_string()),
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.to_string());
        self
    }

    pub fn is_match(&self) -> bool {
        self.status == CheckStatus::Match
    }
}

/// Everything the audit formulas read from one box.
struct Ctx<'a> {
    b: &'a JointProbBox,
    st: BoxStats,
    dist: Result<JointDist16, String>,
    inter: [FineIntermediates; 2],
}

impl<'a> Ctx<'a> {
    fn new(b: &'a JointProbBox) -> Result<Self, BoxError> {
        let st = stats(b, DEFAULT_TOL)?;
        let dist = fine_construct(b, GammaMode::FineLiteral)
            .map(|c| c.dist)
            .map_err(|e| e.to_string());
        let inter = MODES.map(|m| {
            intermediates(b, m, AlphaRule::GammaTimesMarginal, DEFAULT_TOL)
                .expect("box validated by stats")
        });
        Ok(Ctx { b, st, dist, inter })
    }

    fn pa(&self, i: usize) -> f64 {
        self.st.pa[i]
    }

    fn pb(&self, j: usize) -> f64 {
        self.st.pb[j]
    }

    fn pp(&self, i: usize, j: usize) -> f64 {
        self.b.pp(i, j)
    }

    fn inter(&self, mode: GammaMode) -> &FineIntermediates {
        &self.inter[MODES.iter().position(|m| *m == mode).expect("known mode")]
    }
}

/// Signed sum of joint-distribution entries given as `(sign, pattern)`.
fn qsum(q: &JointDist16, terms: &[(f64, &str)]) -> f64 {
    terms.iter().map(|(s, p)| s * q.by_pattern(p)).sum()
}

const UNCONSTRUCTIBLE: &str = "no joint distribution constructed for this box";

fn with_dist(
    ctx: &Ctx,
    name: &str,
    f: impl FnOnce(&JointDist16) -> (f64, f64),
) -> IdentityCheck {
    match &ctx.dist {
        Ok(q) => {
            let (l, r) = f(q);
            IdentityCheck::evaluate(name, l, r, Some(GammaMode::FineLiteral))
        }
        Err(e) => IdentityCheck::skipped(
            name,
            Some(GammaMode::FineLiteral),
            &format!("{UNCONSTRUCTIBLE}: {e}"),
        ),
    }
}

fn pd_identity_block(ctx: &Ctx) -> Vec<IdentityCheck> {
    let (pa1, pa2, pb1, pb2) = (ctx.pa(0), ctx.pa(1), ctx.pb(0), ctx.pb(1));
    vec![
        with_dist(ctx, "pd-identity-1", |q| {
            let l = qsum(q, &[(1.0, "+-++"), (1.0, "+--+"), (-1.0, "-+++"), (-1.0, "-+-+")]);
            (l, (pa1 - pa2) * pb2)
        }),
        with_dist(ctx, "pd-identity-2", |q| {
            let l = qsum(q, &[(1.0, "+-+-"), (1.0, "+---"), (-1.0, "-++-"), (-1.0, "-+--")]);
            (l, (pa1 - pa2) * (1.0 - pb2))
        }),
        with_dist(ctx, "pd-identity-3", |q| {
            let l = qsum(q, &[(1.0, "+++-"), (1.0, "-++-"), (-1.0, "++-+"), (-1.0, "-+-+")]);
            (l, (pb1 - pb2) * pa2)
        }),
        with_dist(ctx, "pd-identity-4", |q| {
            let l = qsum(q, &[(1.0, "+-+-"), (1.0, "--+-"), (-1.0, "---+"), (-1.0, "+--+")]);
            (l, (pb1 - pb2) * (1.0 - pa2))
        }),
    ]
}

/// Deviation losses at the origin, `Π_A(0,0) − Π_A(1,0)` and
/// `Π_B(0,0) − Π_B(0,1)`, i.e. the coefficients of `x` and `y`.
fn origin_losses(c: &CornerPayoffs) -> (f64, f64) {
    (c.pi_a[1][1] - c.pi_a[0][1], c.pi_b[1][1] - c.pi_b[1][0])
}

fn pd_checks(ctx: &Ctx, game: &Game2x2) -> Vec<IdentityCheck> {
    let c = corner_payoffs_unchecked(game, ctx.b);
    let d = deltas(game);
    let (pa1, pa2, pb1, pb2) = (ctx.pa(0), ctx.pa(1), ctx.pb(0), ctx.pb(1));
    let (loss_x, loss_y) = origin_losses(&c);
    let mut out = pd_identity_block(ctx);

    out.push(with_dist(ctx, "pd-nash-x-joint", |q| {
        let r = d.d1 * qsum(q, &[(1.0, "+-++"), (-1.0, "-+++"), (-1.0, "-+-+"), (1.0, "+--+")])
            + d.d2 * qsum(q, &[(1.0, "+-+-"), (-1.0, "-++-"), (-1.0, "-+--"), (1.0, "+---")]);
        (loss_x, r)
    }));
    let y_joint = with_dist(ctx, "pd-nash-y-joint", |q| {
        let r = d.d1 * qsum(q, &[(1.0, "+++-"), (-1.0, "++-+"), (-1.0, "-+-+"), (1.0, "-++-")])
            + d.d2 * qsum(q, &[(1.0, "+-+-"), (-1.0, "+--+"), (-1.0, "---+"), (1.0, "--+-")]);
        (loss_y, r)
    });
    out.push(if game.is_symmetric() {
        y_joint
    } else {
        y_joint.with_note("printed form uses Alice's deltas; exact only for symmetric games")
    });

    if d.d2 == 0.0 {
        for name in ["pd-nash-x-reduced", "pd-nash-y-reduced"] {
            out.push(IdentityCheck::skipped(name, None, "delta_2 = 0"));
        }
    } else {
        let ratio = d.d1 / d.d2;
        out.push(IdentityCheck::evaluate(
            "pd-nash-x-reduced",
            loss_x,
            (pa1 - pa2) * ((ratio - 1.0) * pb2 + 1.0) * d.d2,
            None,
        ));
        out.push(IdentityCheck::evaluate(
            "pd-nash-y-reduced",
            loss_y,
            (pb1 - pb2) * ((ratio - 1.0) * pa2 + 1.0) * d.d2,
            None,
        ));
    }

    let (pi_a, pi_b) = (c.pi_a[1][1], c.pi_b[1][1]);
    for (name, w, direct) in [("pd-payoff-joint-a", &game.a, pi_a), ("pd-payoff-joint-b", &game.b, pi_b)] {
        out.push(with_dist(ctx, name, |q| {
            let groups = [
                ["++++", "++-+", "-+++", "-+-+"],
                ["+++-", "++--", "-++-", "-+--"],
                ["+-++", "+--+", "--++", "---+"],
                ["+-+-", "+---", "--+-", "----"],
            ];
            let r = (0..4)
                .map(|k| w[k] * groups[k].iter().map(|p| q.by_pattern(p)).sum::<f64>())
                .sum();
            (direct, r)
        }));
    }
    let p22 = ctx.pp(1, 1);
    for (name, w, direct) in [("pd-payoff-after-a", &game.a, pi_a), ("pd-payoff-after-b", &game.b, pi_b)] {
        let r = (w[1] - w[3]) * pa2 + (w[2] - w[3]) * pb2 + (w[0] - w[1] - w[2] + w[3]) * p22 + w[3];
        out.push(IdentityCheck::evaluate(name, direct, r, None));
    }

    // slope of the deviation gain at y* = 1 (x* = 1 for Bob); the printed
    // form only applies once P(A2) = P(B2) = 0
    let constraints_a = pa2.abs() <= DEFAULT_TOL && pb2.abs() <= DEFAULT_TOL;
    if !constraints_a || d.d2 == 0.0 {
        let why = if d.d2 == 0.0 {
            "delta_2 = 0"
        } else {
            "requires P(A2) = 0 = P(B2)"
        };
        out.push(IdentityCheck::skipped("pd-new-ne-x", None, why));
        out.push(IdentityCheck::skipped("pd-new-ne-y", None, why));
    } else {
        let r = c.response();
        let ratio = d.d1 / d.d2;
        out.push(IdentityCheck::evaluate(
            "pd-new-ne-x",
            -(r.kappa_a + r.lambda_a),
            ((1.0 - ratio) * pb1 - 1.0) * d.d2 * pa1,
            None,
        ));
        out.push(IdentityCheck::evaluate(
            "pd-new-ne-y",
            -(r.kappa_b + r.lambda_b),
            ((1.0 - ratio) * pa1 - 1.0) * d.d2 * pb1,
            None,
        ));
    }
    out
}

fn mp_checks(ctx: &Ctx) -> Vec<IdentityCheck> {
    let mp = Game2x2::matching_pennies();
    let c = corner_payoffs_unchecked(&mp, ctx.b);
    let r = c.response();
    let e = |i: usize, j: usize| c.pi_a[i][j];
    let (pa1, pa2, pb1, pb2) = (ctx.pa(0), ctx.pa(1), ctx.pb(0), ctx.pb(1));
    let coef_x = 0.5 * r.kappa_a + r.lambda_a;
    let coef_y = 0.5 * r.kappa_b + r.lambda_b;
    let direct_hh = c.payoff(0.5, 0.5).0;
    let mut out = vec![
        IdentityCheck::evaluate(
            "mp-nash-x-expanded",
            coef_x,
            0.5 * (e(0, 0) - e(1, 0) + e(0, 1) - e(1, 1)),
            None,
        ),
        IdentityCheck::evaluate(
            "mp-nash-y-expanded",
            coef_y,
            0.5 * (-e(0, 0) + e(0, 1) - e(1, 0) + e(1, 1)),
            None,
        ),
        with_dist(ctx, "mp-nash-x-joint", |q| {
            let s = qsum(q, &[(1.0, "+-++"), (-1.0, "+---"), (-1.0, "-+++"), (1.0, "-+--")]);
            (coef_x, 2.0 * s)
        }),
        with_dist(ctx, "mp-nash-y-joint", |q| {
            let s = qsum(q, &[(1.0, "++-+"), (-1.0, "+++-"), (-1.0, "---+"), (1.0, "--+-")]);
            (coef_y, 2.0 * s)
        }),
        IdentityCheck::evaluate(
            "mp-nash-x-reduced",
            coef_x,
            2.0 * (pa2 - pa1) * (1.0 - pb1 - pb2),
            None,
        ),
        IdentityCheck::evaluate(
            "mp-nash-y-reduced",
            coef_y,
            2.0 * (pb1 - pb2) * (1.0 - pa1 - pa2),
            None,
        ),
        IdentityCheck::evaluate(
            "mp-hh-payoff-expanded",
            direct_hh,
            0.25 * (e(0, 0) + e(0, 1) + e(1, 0) + e(1, 1)),
            None,
        ),
        with_dist(ctx, "mp-hh-payoff-joint", |q| {
            (
                direct_hh,
                qsum(q, &[(1.0, "++++"), (-1.0, "++--"), (-1.0, "--++"), (1.0, "----")]),
            )
        }),
        IdentityCheck::evaluate(
            "mp-constraint-1",
            (pa2 - pa1) * (1.0 - pb1 - pb2),
            0.0,
            None,
        ),
        IdentityCheck::evaluate(
            "mp-constraint-2",
            (pb1 - pb2) * (1.0 - pa1 - pa2),
            0.0,
            None,
        ),
    ];

    for mode in MODES {
        let i = ctx.inter(mode);
        let (al, be) = (i.alpha, i.beta);
        let paper_hh = (pb1 + pb2) * (pa1 + pa2 - 1.0) - ((1.0 + be) * pa1 + (1.0 - al) * pa2);
        out.push(IdentityCheck::evaluate("mp-hh-payoff-reduced", direct_hh, paper_hh, Some(mode)));
        out.push(IdentityCheck::evaluate(
            "mp-constraint-3",
            (pb1 + pb2) * (pa1 + pa2 - 1.0),
            (1.0 + be) * pa1 + (1.0 - al) * pa2,
            Some(mode),
        ));
        let p11 = ctx.pp(0, 0);
        out.push(IdentityCheck::evaluate(
            "mp-const-a",
            ctx.pp(0, 1),
            ((2.0 + be) * pa1 + pb1 + pb2 - al * pa2) / 2.0 - p11,
            Some(mode),
        ));
        out.push(IdentityCheck::evaluate(
            "mp-const-b",
            ctx.pp(1, 0),
            ((1.0 - al) * pa2 + 2.0 * pb1 + (1.0 + be) * pa1 - 2.0 * p11) / 2.0,
            Some(mode),
        ));
        out.push(IdentityCheck::evaluate(
            "mp-const-c",
            ctx.pp(1, 1),
            (2.0 * p11 + pa2 + pb2 - pa1 - pb1) / 2.0,
            Some(mode),
        ));
    }

    out.push(IdentityCheck::evaluate(
        "mp-diff-a-1",
        e(0, 0) - e(1, 0) - e(0, 1) + e(1, 1),
        4.0 * (ctx.pp(0, 0) - ctx.pp(1, 0) - ctx.pp(0, 1)),
        None,
    ));
    out.push(IdentityCheck::evaluate(
        "mp-diff-a-2",
        e(0, 1) - e(1, 1),
        2.0 * (2.0 * (ctx.pp(0, 1) - ctx.pp(1, 1)) + (pa2 - pa1)),
        None,
    ));

    for mode in MODES {
        let w = omega(ctx.b, ctx.inter(mode));
        for (name, direct, printed) in [
            ("mp-qne-x-slope", r.kappa_a, 4.0 * w),
            ("mp-qne-x-offset", r.lambda_a, -2.0 * w),
            ("mp-qne-y-slope", r.kappa_b, -4.0 * w),
            ("mp-qne-y-offset", r.lambda_b, 2.0 * w),
        ] {
            out.push(IdentityCheck::evaluate(name, direct, printed, Some(mode)));
        }
    }
    out
}

/// Evaluates every printed reduction on `b`. PD-derived checks use `game`;
/// matching-pennies checks always use the matching-pennies payoffs.
pub fn audit_identities(b: &JointProbBox, game: &Game2x2) -> Result<Vec<IdentityCheck>, BoxError> {
    let ctx = Ctx::new(b)?;
    let mut out = pd_checks(&ctx, game);
    out.extend(mp_checks(&ctx));
    Ok(out)
}

/// Box with `P(A2) = P(B2) = 0` and a random no-signaling `A1`/`B1` block.
pub fn pd_family_box(seed: u64) -> JointProbBox {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pa1: f64 = rng.gen();
    let pb1: f64 = rng.gen();
    let lo = (pa1 + pb1 - 1.0).max(0.0);
    let hi = pa1.min(pb1);
    let p11 = lo + (hi - lo) * rng.gen::<f64>();
    FreeParams8 {
        pa: [pa1, 0.0],
        pb: [pb1, 0.0],
        pp: [[p11, 0.0], [0.0, 0.0]],
    }
    .reconstruct(DEFAULT_TOL)
    .expect("block lies in the no-signaling polytope")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdBoxResult {
    pub index: usize,
    pub probs: JointProbBox,
    pub bell_satisfied: bool,
    /// `P(A1) ≥ P(A2)` and `P(B1) ≥ P(B2)`.
    pub constraints_b: bool,
    /// `P(A2) = 0 = P(B2)`.
    pub constraints_a: bool,
    pub identity_block: Vec<IdentityCheck>,
    pub reduced_nash: Vec<IdentityCheck>,
    /// Deviation losses at the origin are nonnegative.
    pub reduced_nash_sign_ok: bool,
    pub payoff_after: Vec<IdentityCheck>,
    pub new_ne: Vec<IdentityCheck>,
    pub nash_set: NashSet,
    /// `None` when exactly one of the two sets is empty.
    pub grid_hausdorff: Option<f64>,
    pub grid_confirmed: bool,
    pub payoff_origin: (f64, f64),
    pub payoff_origin_matches: bool,
    /// `Some(true)` when the NE set is exactly the origin; `None` when the
    /// constraints fail and no conclusion is drawn.
    pub no_new_ne: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdSummary {
    pub n_boxes: usize,
    pub bell_all_satisfied: bool,
    pub constraints_all_hold: bool,
    pub origin_only_all: bool,
    pub payoff_all_a4_b4: bool,
    pub identity_block_all_match: bool,
    pub identity_block_max_residual: f64,
    pub reduced_nash_all_ok: bool,
    pub payoff_after_all_match: bool,
    pub new_ne_mismatches: usize,
    pub grid_confirmed_all: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdReport {
    pub game: Game2x2,
    pub seed: u64,
    pub boxes: Vec<PdBoxResult>,
    pub summary: PdSummary,
}

fn within_resolution(h: f64) -> bool {
    h <= 1.0 / (GRID_N - 1) as f64 + 1e-12
}

fn finite(h: f64) -> Option<f64> {
    h.is_finite().then_some(h)
}

fn is_origin_only(set: &NashSet) -> bool {
    matches!(set, NashSet::Points { points } if points.len() == 1
        && points[0].x == 0.0 && points[0].y == 0.0)
}

pub fn evaluate_pd_box(game: &Game2x2, b: &JointProbBox, index: usize) -> Result<PdBoxResult, BoxError> {
    let ctx = Ctx::new(b)?;
    let bell_satisfied = crate::fine::bell_values(b, DEFAULT_TOL)?.satisfied;
    let (pa1, pa2, pb1, pb2) = (ctx.pa(0), ctx.pa(1), ctx.pb(0), ctx.pb(1));
    let constraints_b = pa1 >= pa2 - DEFAULT_TOL && pb1 >= pb2 - DEFAULT_TOL;
    let constraints_a = pa2.abs() <= DEFAULT_TOL && pb2.abs() <= DEFAULT_TOL;

    let checks = pd_checks(&ctx, game);
    let pick = |prefix: &str| -> Vec<IdentityCheck> {
        checks.iter().filter(|c| c.name.starts_with(prefix)).cloned().collect()
    };
    let c = corner_payoffs_unchecked(game, b);
    let (loss_x, loss_y) = origin_losses(&c);

    let nash_set = enumerate_nash_corners(&c, DEFAULT_TOL);
    let grid = grid_bruteforce_nash(game, b, GRID_N, GRID_EPS);
    let grid_hausdorff = hausdorff(&nash_set, &grid, 0.5 / (GRID_N - 1) as f64);
    let payoff_origin = c.payoff(0.0, 0.0);
    let payoff_origin_matches = (payoff_origin.0 - game.a[3]).abs() <= AUDIT_TOL
        && (payoff_origin.1 - game.b[3]).abs() <= AUDIT_TOL;
    let origin_ok = nash_check(&c, 0.0, 0.0, DEFAULT_TOL).ok;
    Ok(PdBoxResult {
        index,
        probs: *b,
        bell_satisfied,
        constraints_b,
        constraints_a,
        identity_block: pick("pd-identity"),
        reduced_nash: pick("pd-nash-"),
        reduced_nash_sign_ok: loss_x >= -DEFAULT_TOL && loss_y >= -DEFAULT_TOL,
        payoff_after: pick("pd-payoff-after"),
        new_ne: pick("pd-new-ne"),
        grid_confirmed: within_resolution(grid_hausdorff),
        grid_hausdorff: finite(grid_hausdorff),
        payoff_origin,
        payoff_origin_matches,
        no_new_ne: (constraints_a && constraints_b)
            .then(|| origin_ok && is_origin_only(&nash_set)),
        nash_set,
    })
}

/// Runs the prisoner's dilemma reproduction over `n_boxes` boxes from
/// [`pd_family_box`].
pub fn pd_report(game: &Game2x2, n_boxes: usize, seed: u64) -> Result<PdReport, PaperlabError> {
    if !game.has_pd_ordering() {
        return Err(PaperlabError::NotPdOrdering(game.a));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_boxes).map(|_| rng.gen()).collect();
    let boxes = seeds
        .par_iter()
        .enumerate()
        .map(|(k, s)| evaluate_pd_box(game, &pd_family_box(*s), k))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize_pd(&boxes);
    Ok(PdReport {
        game: *game,
        seed,
        boxes,
        summary,
    })
}

pub fn summarize_pd(boxes: &[PdBoxResult]) -> PdSummary {
    let all = |f: &dyn Fn(&PdBoxResult) -> bool| boxes.iter().all(f);
    let match_all = |v: &[IdentityCheck]| v.iter().all(|c| c.status != CheckStatus::Mismatch);
    PdSummary {
        n_boxes: boxes.len(),
        bell_all_satisfied: all(&|r| r.bell_satisfied),
        constraints_all_hold: all(&|r| r.constraints_a && r.constraints_b),
        origin_only_all: all(&|r| r.no_new_ne == Some(true)),
        payoff_all_a4_b4: all(&|r| r.payoff_origin_matches),
        identity_block_all_match: all(&|r| r.identity_block.iter().all(|c| c.is_match())),
        identity_block_max_residual: boxes
            .iter()
            .flat_map(|r| r.identity_block.iter().filter_map(|c| c.residual))
            .fold(0.0, f64::max),
        reduced_nash_all_ok: all(&|r| r.reduced_nash_sign_ok && match_all(&r.reduced_nash)),
        payoff_after_all_match: all(&|r| r.payoff_after.iter().all(|c| c.is_match())),
        new_ne_mismatches: boxes
            .iter()
            .flat_map(|r| &r.new_ne)
            .filter(|c| c.status == CheckStatus::Mismatch)
            .count(),
        grid_confirmed_all: all(&|r| r.grid_confirmed),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpClassical {
    pub nash_set: NashSet,
    pub grid_points: Vec<(f64, f64)>,
    /// `None` when exactly one of the two sets is empty.
    pub grid_hausdorff: Option<f64>,
    pub payoff: (f64, f64),
    /// Unique equilibrium at (1/2, 1/2) paying (0, 0).
    pub reproduces_classical: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub name: String,
    pub gamma_mode: Option<GammaMode>,
    pub evaluated: usize,
    pub matches: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpRandomSummary {
    pub n_boxes: usize,
    pub constructible: usize,
    pub checks: Vec<ResidualStats>,
}

impl MpRandomSummary {
    pub fn get(&self, name: &str, mode: Option<GammaMode>) -> Option<&ResidualStats> {
        self.checks.iter().find(|s| s.name == name && s.gamma_mode == mode)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeAudit {
    pub gamma_mode: GammaMode,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub checks: Vec<IdentityCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CerecedaAudit {
    pub set: u8,
    pub chsh_max_abs: f64,
    pub modes: Vec<ModeAudit>,
    pub claimed_gamma: f64,
    pub claimed_omega: f64,
    pub constraint_checks: Vec<IdentityCheck>,
    pub exact_nash: NashSet,
    pub grid_nash: GridNash,
    /// `None` when exactly one of the two sets is empty.
    pub grid_hausdorff: Option<f64>,
    pub oracle_agrees: bool,
    /// True when every profile is an equilibrium, which is what a vanishing
    /// `Ω` would imply.
    pub every_profile_is_nash: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub name: String,
    pub set: Option<u8>,
    pub gamma_mode: Option<GammaMode>,
    pub claimed: String,
    pub recomputed: String,
    pub oracle: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpReport {
    pub seed: u64,
    pub classical: MpClassical,
    pub random_local: MpRandomSummary,
    pub cereceda: Vec<CerecedaAudit>,
    pub discrepancies: Vec<Discrepancy>,
}

pub fn mp_report(seed: u64) -> MpReport {
    mp_report_with(seed, 200)
}

pub fn mp_report_with(seed: u64, n_boxes: usize) -> MpReport {
    let mp = Game2x2::matching_pennies();
    let classical = mp_classical(&mp);
    let random_local = mp_random_summary(seed, n_boxes);

    let mut cereceda = Vec::new();
    let mut discrepancies = Vec::new();
    for set in [CerecedaSet::First, CerecedaSet::Second] {
        let audit = cereceda_audit(&mp, set);
        let n = set.number();
        for m in &audit.modes {
            if (m.gamma - audit.claimed_gamma).abs() > AUDIT_TOL {
                discrepancies.push(Discrepancy {
                    name: "gamma".into(),
                    set: Some(n),
                    gamma_mode: Some(m.gamma_mode),
                    claimed: format!("{}", audit.claimed_gamma),
                    recomputed: format!("{:.17}", m.gamma),
                    oracle: "minimum over the gamma candidates of this mode".into(),
                });
            }
            if (m.omega - audit.claimed_omega).abs() > AUDIT_TOL {
                discrepancies.push(Discrepancy {
                    name: "omega".into(),
                    set: Some(n),
                    gamma_mode: Some(m.gamma_mode),
                    claimed: format!("{}", audit.claimed_omega),
                    recomputed: format!("{:.17}", m.omega),
                    oracle: "direct substitution with alpha = gamma P(A1), beta = gamma P(A2)"
                        .into(),
                });
            }
            for c in m.checks.iter().filter(|c| c.status == CheckStatus::Mismatch) {
                discrepancies.push(Discrepancy {
                    name: c.name.clone(),
                    set: Some(n),
                    gamma_mode: Some(m.gamma_mode),
                    claimed: "constraint satisfied".into(),
                    recomputed: format!("residual {:e}", c.residual.unwrap_or(f64::NAN)),
                    oracle: "joint probabilities of the box".into(),
                });
            }
        }
        if !audit.every_profile_is_nash {
            discrepancies.push(Discrepancy {
                name: "nash-set".into(),
                set: Some(n),
                gamma_mode: None,
                claimed: "every profile is an equilibrium".into(),
                recomputed: describe_set(&audit.exact_nash),
                oracle: format!(
                    "enumerate_nash, confirmed by grid_bruteforce_nash n={GRID_N} eps={GRID_EPS:e} (Hausdorff {:.3e})",
                    audit.grid_hausdorff.unwrap_or(f64::INFINITY)
                ),
            });
        }
        cereceda.push(audit);
    }
    MpReport {
        seed,
        classical,
        random_local,
        cereceda,
        discrepancies,
    }
}

pub fn describe_set(set: &NashSet) -> String {
    match set {
        NashSet::FullSquare => "every profile".into(),
        _ => {
            let mut parts: Vec<String> = set
                .segments()
                .iter()
                .map(|s| {
                    let (fixed, free) = match s.fixed {
                        crate::gamecore::Axis::X => ("x", "y"),
                        crate::gamecore::Axis::Y => ("y", "x"),
                    };
                    format!("{fixed} = {}, {free} in [{}, {}]", s.value, s.from, s.to)
                })
                .collect();
            parts.extend(set.points().iter().map(|p| format!("({}, {})", p.x, p.y)));
            if parts.is_empty() {
                "no equilibrium".into()
            } else {
                parts.join("; ")
            }
        }
    }
}

fn mp_classical(mp: &Game2x2) -> MpClassical {
    let b = deterministic_box([Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus]);
    let c = corner_payoffs_unchecked(mp, &b);
    let nash_set = enumerate_nash_corners(&c, DEFAULT_TOL);
    let grid = grid_bruteforce_nash(mp, &b, GRID_N, GRID_EPS);
    let grid_hausdorff = hausdorff(&nash_set, &grid, 0.5 / (GRID_N - 1) as f64);
    let payoff = c.payoff(0.5, 0.5);
    let unique_half = matches!(&nash_set, NashSet::Points { points }
        if points.len() == 1 && points[0].x == 0.5 && points[0].y == 0.5);
    MpClassical {
        reproduces_classical: unique_half && payoff == (0.0, 0.0),
        nash_set,
        grid_points: grid.points,
        grid_hausdorff: finite(grid_hausdorff),
        payoff,
    }
}

fn mp_random_summary(seed: u64, n_boxes: usize) -> MpRandomSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..n_boxes).map(|_| rng.gen()).collect();
    let per_box: Vec<(bool, Vec<IdentityCheck>)> = seeds
        .par_iter()
        .map(|s| {
            let b = crate::corrbox::random_local(*s);
            let ctx = Ctx::new(&b).expect("local mixtures are valid");
            (ctx.dist.is_ok(), mp_checks(&ctx))
        })
        .collect();
    let mut checks: Vec<ResidualStats> = Vec::new();
    for (_, list) in &per_box {
        for c in list {
            let slot = match checks
                .iter_mut()
                .position(|s| s.name == c.name && s.gamma_mode == c.gamma_mode)
            {
                Some(k) => &mut checks[k],
                None => {
                    checks.push(ResidualStats {
                        name: c.name.clone(),
                        gamma_mode: c.gamma_mode,
                        evaluated: 0,
                        matches: 0,
                        max_residual: 0.0,
                    });
                    checks.last_mut().expect("just pushed")
                }
            };
            if let Some(r) = c.residual {
                slot.evaluated += 1;
                slot.matches += usize::from(c.is_match());
                slot.max_residual = slot.max_residual.max(r);
            }
        }
    }
    MpRandomSummary {
        n_boxes,
        constructible: per_box.iter().filter(|(ok, _)| *ok).count(),
        checks,
    }
}

fn cereceda_audit(mp: &Game2x2, set: CerecedaSet) -> CerecedaAudit {
    let b = cereceda_box(set);
    let ctx = Ctx::new(&b).expect("Cereceda sets are valid boxes");
    let all = mp_checks(&ctx);
    let modes = MODES
        .iter()
        .map(|&m| {
            let i = ctx.inter(m);
            ModeAudit {
                gamma_mode: m,
                gamma: i.gamma,
                alpha: i.alpha,
                beta: i.beta,
                omega: omega(&b, i),
                checks: all
                    .iter()
                    .filter(|c| c.gamma_mode == Some(m) && c.name.starts_with("mp-const"))
                    .chain(all.iter().filter(|c| {
                        c.gamma_mode == Some(m) && c.name == "mp-constraint-3"
                    }))
                    .cloned()
                    .collect(),
            }
        })
        .collect();
    let constraint_checks = all
        .iter()
        .filter(|c| c.name == "mp-constraint-1" || c.name == "mp-constraint-2")
        .cloned()
        .collect();
    let c = corner_payoffs_unchecked(mp, &b);
    let exact_nash = enumerate_nash_corners(&c, DEFAULT_TOL);
    let grid_nash = grid_bruteforce_nash(mp, &b, GRID_N, GRID_EPS);
    let grid_hausdorff = hausdorff(&exact_nash, &grid_nash, 0.5 / (GRID_N - 1) as f64);
    CerecedaAudit {
        set: set.number(),
        chsh_max_abs: ctx.st.chsh_max_abs,
        modes,
        claimed_gamma: 1.0,
        claimed_omega: 0.0,
        constraint_checks,
        every_profile_is_nash: exact_nash == NashSet::FullSquare,
        oracle_agrees: within_resolution(grid_hausdorff),
        exact_nash,
        grid_nash,
        grid_hausdorff: finite(grid_hausdorff),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrbox::{product_box, random_local};
    use std::f64::consts::SQRT_2;

    fn find<'a>(v: &'a [IdentityCheck], name: &str, mode: Option<GammaMode>) -> &'a IdentityCheck {
        v.iter()
            .find(|c| c.name == name && c.gamma_mode == mode)
            .unwrap_or_else(|| panic!("missing {name} {mode:?}"))
    }

    #[test]
    fn product_box_audit() {
        let b = product_box([0.5; 4]).unwrap();
        let v = audit_identities(&b, &Game2x2::prisoners_dilemma()).unwrap();
        for k in 1..=4 {
            let c = find(&v, &format!("pd-identity-{k}"), Some(GammaMode::FineLiteral));
            assert_eq!(c.residual, Some(0.0));
        }
        let hh = find(&v, "mp-hh-payoff-reduced", Some(GammaMode::FineLiteral));
        assert_eq!((hh.lhs, hh.rhs), (Some(0.0), Some(-1.0)));
        assert_eq!(hh.status, CheckStatus::Mismatch);
        assert!(find(&v, "mp-hh-payoff-joint", Some(GammaMode::FineLiteral)).is_match());
    }

    #[test]
    fn deterministic_box_const_b_mismatch() {
        let b = deterministic_box([Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus]);
        let v = audit_identities(&b, &Game2x2::prisoners_dilemma()).unwrap();
        let c = find(&v, "mp-const-b", Some(GammaMode::FineLiteral));
        assert_eq!((c.lhs, c.rhs), (Some(0.0), Some(0.5)));
        assert_eq!(c.status, CheckStatus::Mismatch);
        assert!(find(&v, "mp-const-c", Some(GammaMode::FineLiteral)).is_match());
    }

    #[test]
    fn exact_reductions_hold_on_random_local_boxes() {
        let pd = Game2x2::prisoners_dilemma();
        for seed in 0..100 {
            let v = audit_identities(&random_local(seed), &pd).unwrap();
            for name in [
                "pd-nash-x-joint",
                "pd-nash-y-joint",
                "pd-payoff-joint-a",
                "pd-payoff-joint-b",
                "mp-nash-x-joint",
                "mp-nash-y-joint",
                "mp-hh-payoff-joint",
            ] {
                assert!(find(&v, name, Some(GammaMode::FineLiteral)).is_match(), "{name} seed {seed}");
            }
            for name in [
                "pd-payoff-after-a",
                "pd-payoff-after-b",
                "mp-nash-x-expanded",
                "mp-nash-y-expanded",
                "mp-hh-payoff-expanded",
                "mp-diff-a-2",
            ] {
                assert!(find(&v, name, None).is_match(), "{name} seed {seed}");
            }
        }
    }

    #[test]
    fn identity_block_fails_on_correlated_box() {
        // A1 and B2 perfectly correlated, everything else independent and fair
        let mut w = [0.0; 16];
        for (k, s) in crate::corrbox::deterministic_strategies().iter().enumerate() {
            if s[0] == s[3] {
                w[k] = 1.0 / 8.0;
            }
        }
        let b = crate::corrbox::mixture_of_deterministic(&w);
        let v = audit_identities(&b, &Game2x2::prisoners_dilemma()).unwrap();
        let c = find(&v, "pd-identity-1", Some(GammaMode::FineLiteral));
        assert!((c.residual.unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unconstructible_box_skips_joint_checks() {
        let v = audit_identities(&cereceda_box(CerecedaSet::First), &Game2x2::prisoners_dilemma())
            .unwrap();
        assert_eq!(
            find(&v, "pd-identity-1", Some(GammaMode::FineLiteral)).status,
            CheckStatus::Skipped
        );
        assert_ne!(find(&v, "mp-diff-a-2", None).status, CheckStatus::Skipped);
    }

    #[test]
    fn pd_report_small() {
        let r = pd_report(&Game2x2::prisoners_dilemma(), 50, 3).unwrap();
        let s = &r.summary;
        assert!(s.bell_all_satisfied && s.origin_only_all && s.payoff_all_a4_b4);
        assert!(s.identity_block_all_match && s.reduced_nash_all_ok && s.payoff_after_all_match);
        assert!(s.grid_confirmed_all);
        assert_eq!(r, pd_report(&Game2x2::prisoners_dilemma(), 50, 3).unwrap());
        assert!(pd_report(&Game2x2::matching_pennies(), 1, 0).is_err());
    }

    #[test]
    fn pd_injected_boxes() {
        let pd = Game2x2::prisoners_dilemma();
        let bad = FreeParams8 {
            pa: [0.5, 0.3],
            pb: [0.5, 0.0],
            pp: [[0.25, 0.0], [0.15, 0.0]],
        }
        .reconstruct(DEFAULT_TOL)
        .unwrap();
        let r = evaluate_pd_box(&pd, &bad, 0).unwrap();
        assert!(!r.constraints_a);
        assert_eq!(r.no_new_ne, None);
        let det = deterministic_box([Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus]);
        let r = evaluate_pd_box(&pd, &det, 0).unwrap();
        assert_eq!(r.payoff_origin, (1.0, 1.0));
        assert_eq!(r.no_new_ne, Some(true));
    }

    #[test]
    fn mp_report_contents() {
        let r = mp_report_with(9, 40);
        assert!(r.classical.reproduces_classical);
        let c1 = &r.cereceda[0];
        let lit = c1.modes.iter().find(|m| m.gamma_mode == GammaMode::FineLiteral).unwrap();
        assert!((lit.gamma - (2.0 - SQRT_2) / 4.0).abs() < 1e-15);
        assert!((lit.omega - (SQRT_2 - 2.0) / 2.0).abs() < 1e-15);
        let pap = c1.modes.iter().find(|m| m.gamma_mode == GammaMode::SummedMarginals).unwrap();
        assert!((pap.gamma - 1.0).abs() < 1e-15);
        assert!(c1.oracle_agrees && !c1.every_profile_is_nash);
        assert!(r
            .discrepancies
            .iter()
            .any(|d| d.name == "omega" && d.set == Some(1)));
        let hh = r.random_local.get("mp-hh-payoff-joint", Some(GammaMode::FineLiteral)).unwrap();
        assert_eq!(hh.matches, hh.evaluated);
        assert_eq!(hh.evaluated, 40);
    }
}
