//! Two-player 2×2 games played over a shared correlation box.
//!
//! Alice picks setting 1 with probability `x`, Bob picks setting 1 with
//! probability `y`. Each pure pair of settings pays a convex combination of
//! the game entries weighted by that pair's joint outcome probabilities, and
//! mixed profiles interpolate bilinearly between the four corners.

use crate::corrbox::{ensure_valid, BoxError, JointProbBox, DEFAULT_TOL};
use crate::fine::FineIntermediates;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("payoff entry {player}{index} is not finite: {value}")]
    NonFinite {
        player: char,
        index: usize,
        value: f64,
    },
    #[error("{name} = {value} is outside [0, 1]")]
    ProfileOutOfRange { name: char, value: f64 },
    #[error("affine scale must be positive, got {0}")]
    NonPositiveScale(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Alice,
    Bob,
}

/// Payoff entries in the order `(S1,S1′), (S1,S2′), (S2,S1′), (S2,S2′)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Game2x2 {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

impl Game2x2 {
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Result<Self, GameError> {
        for (player, arr) in [('a', &a), ('b', &b)] {
            if let Some((k, v)) = arr.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(GameError::NonFinite {
                    player,
                    index: k + 1,
                    value: *v,
                });
            }
        }
        Ok(Game2x2 { a, b })
    }

    /// Symmetric game: Bob's matrix is the transpose of Alice's.
    pub fn symmetric(a: [f64; 4]) -> Result<Self, GameError> {
        Self::new(a, [a[0], a[2], a[1], a[3]])
    }

    /// Prisoner's dilemma with entries 3, 0, 5, 1.
    pub fn prisoners_dilemma() -> Self {
        Self::symmetric([3.0, 0.0, 5.0, 1.0]).expect("finite")
    }

    pub fn matching_pennies() -> Self {
        let a = [1.0, -1.0, -1.0, 1.0];
        Game2x2 { a, b: a.map(|v| -v) }
    }

    pub fn is_symmetric(&self) -> bool {
        self.b == [self.a[0], self.a[2], self.a[1], self.a[3]]
    }

    pub fn is_zero_sum(&self) -> bool {
        self.a.iter().zip(&self.b).all(|(x, y)| x + y == 0.0)
    }

    /// `a3 > a1 > a4 > a2`.
    pub fn has_pd_ordering(&self) -> bool {
        let [a1, a2, a3, a4] = self.a;
        a3 > a1 && a1 > a4 && a4 > a2
    }

    /// Applies `v -> scale * v + shift` to one player's entries.
    pub fn affine(&self, player: Player, scale: f64, shift: f64) -> Result<Self, GameError> {
        if !(scale > 0.0) {
            return Err(GameError::NonPositiveScale(scale));
        }
        let mut g = *self;
        let target = match player {
            Player::Alice => &mut g.a,
            Player::Bob => &mut g.b,
        };
        target.iter_mut().for_each(|v| *v = scale * *v + shift);
        Self::new(g.a, g.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedProfile {
    pub x: f64,
    pub y: f64,
}

impl MixedProfile {
    pub fn new(x: f64, y: f64) -> Result<Self, GameError> {
        for (name, v) in [('x', x), ('y', y)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(GameError::ProfileOutOfRange { name, value: v });
            }
        }
        Ok(MixedProfile { x, y })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

pub fn deltas(g: &Game2x2) -> Deltas {
    let d1 = g.a[2] - g.a[0];
    let d2 = g.a[3] - g.a[1];
    Deltas { d1, d2, d3: d2 - d1 }
}

/// Payoffs of the four pure setting pairs, indexed `[i][j]` with `i` Alice's
/// setting and `j` Bob's (zero-based).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerPayoffs {
    pub pi_a: [[f64; 2]; 2],
    pub pi_b: [[f64; 2]; 2],
}

pub fn corner_payoffs(g: &Game2x2, b: &JointProbBox) -> Result<CornerPayoffs, BoxError> {
    ensure_valid(b, DEFAULT_TOL)?;
    Ok(corner_payoffs_unchecked(g, b))
}

/// Same as [`corner_payoffs`] without validating the box.
pub fn corner_payoffs_unchecked(g: &Game2x2, b: &JointProbBox) -> CornerPayoffs {
    let mut pi_a = [[0.0; 2]; 2];
    let mut pi_b = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let w = b.pair(i, j);
            pi_a[i][j] = (0..4).map(|k| g.a[k] * w[k]).sum();
            pi_b[i][j] = (0..4).map(|k| g.b[k] * w[k]).sum();
        }
    }
    CornerPayoffs { pi_a, pi_b }
}

fn bilinear(c: &[[f64; 2]; 2], x: f64, y: f64) -> f64 {
    x * y * c[0][0] + x * (1.0 - y) * c[0][1] + (1.0 - x) * y * c[1][0]
        + (1.0 - x) * (1.0 - y) * c[1][1]
}

impl CornerPayoffs {
    pub fn payoff(&self, x: f64, y: f64) -> (f64, f64) {
        (bilinear(&self.pi_a, x, y), bilinear(&self.pi_b, x, y))
    }

    pub fn response(&self) -> ResponseCoefficients {
        let (a, b) = (&self.pi_a, &self.pi_b);
        ResponseCoefficients {
            kappa_a: a[0][0] - a[0][1] - a[1][0] + a[1][1],
            lambda_a: a[0][1] - a[1][1],
            kappa_b: b[0][0] - b[0][1] - b[1][0] + b[1][1],
            lambda_b: b[1][0] - b[1][1],
        }
    }
}

/// `∂Π_A/∂x = κ_A y + λ_A` and `∂Π_B/∂y = κ_B x + λ_B`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseCoefficients {
    pub kappa_a: f64,
    pub lambda_a: f64,
    pub kappa_b: f64,
    pub lambda_b: f64,
}

pub fn payoff(g: &Game2x2, b: &JointProbBox, p: MixedProfile) -> (f64, f64) {
    corner_payoffs_unchecked(g, b).payoff(p.x, p.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashCheck {
    pub ok: bool,
    pub worst_deviation_a: f64,
    pub worst_deviation_b: f64,
}

pub fn is_nash(g: &Game2x2, b: &JointProbBox, p: MixedProfile, tol: f64) -> NashCheck {
    nash_check(&corner_payoffs_unchecked(g, b), p.x, p.y, tol)
}

pub fn nash_check(c: &CornerPayoffs, x: f64, y: f64, tol: f64) -> NashCheck {
    let (pa, pb) = c.payoff(x, y);
    let best_a = c.payoff(0.0, y).0.max(c.payoff(1.0, y).0);
    let best_b = c.payoff(x, 0.0).1.max(c.payoff(x, 1.0).1);
    let worst_deviation_a = best_a - pa;
    let worst_deviation_b = best_b - pb;
    NashCheck {
        ok: worst_deviation_a <= tol && worst_deviation_b <= tol,
        worst_deviation_a,
        worst_deviation_b,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashPoint {
    pub x: f64,
    pub y: f64,
    pub payoff_a: f64,
    pub payoff_b: f64,
}

/// `fixed = value` while the other coordinate runs over `[from, to]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashSegment {
    pub fixed: Axis,
    pub value: f64,
    pub from: f64,
    pub to: f64,
}

impl NashSegment {
    pub fn endpoints(&self) -> [(f64, f64); 2] {
        match self.fixed {
            Axis::X => [(self.value, self.from), (self.value, self.to)],
            Axis::Y => [(self.from, self.value), (self.to, self.value)],
        }
    }

    pub fn at(&self, t: f64) -> (f64, f64) {
        let s = self.from + t * (self.to - self.from);
        match self.fixed {
            Axis::X => (self.value, s),
            Axis::Y => (s, self.value),
        }
    }

    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let (along, across) = match self.fixed {
            Axis::X => (y, x),
            Axis::Y => (x, y),
        };
        let d_along = if along < self.from {
            self.from - along
        } else if along > self.to {
            along - self.to
        } else {
            0.0
        };
        d_along.hypot(across - self.value)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NashSet {
    Points {
        points: Vec<NashPoint>,
    },
    /// Segments along edges or through the interior, plus any isolated points.
    EdgeSegments {
        segments: Vec<NashSegment>,
        points: Vec<NashPoint>,
    },
    FullSquare,
}

impl NashSet {
    pub fn points(&self) -> &[NashPoint] {
        match self {
            NashSet::Points { points } | NashSet::EdgeSegments { points, .. } => points,
            NashSet::FullSquare => &[],
        }
    }

    pub fn segments(&self) -> &[NashSegment] {
        match self {
            NashSet::EdgeSegments { segments, .. } => segments,
            _ => &[],
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, NashSet::Points { points } if points.is_empty())
    }

    /// Euclidean distance from `(x, y)` to the set; infinite for the empty set.
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        if let NashSet::FullSquare = self {
            let dx = (0.0 - x).max(x - 1.0).max(0.0);
            let dy = (0.0 - y).max(y - 1.0).max(0.0);
            return dx.hypot(dy);
        }
        let p = self
            .points()
            .iter()
            .map(|p| (p.x - x).hypot(p.y - y))
            .fold(f64::INFINITY, f64::min);
        self.segments()
            .iter()
            .map(|s| s.distance(x, y))
            .fold(p, f64::min)
    }

    /// Points covering the set with spacing at most `step`.
    pub fn sample(&self, step: f64) -> Vec<(f64, f64)> {
        let n = (1.0 / step).ceil().max(1.0) as usize;
        match self {
            NashSet::FullSquare => (0..=n)
                .flat_map(|i| (0..=n).map(move |j| (i as f64 / n as f64, j as f64 / n as f64)))
                .collect(),
            _ => {
                let mut out: Vec<(f64, f64)> =
                    self.points().iter().map(|p| (p.x, p.y)).collect();
                for s in self.segments() {
                    out.extend((0..=n).map(|k| s.at(k as f64 / n as f64)));
                }
                out
            }
        }
    }
}

const GEOM_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
enum Piece {
    Seg(NashSegment),
    Full,
}

/// Best-response graph of one player as closed axis-aligned pieces.
///
/// `slope` and `offset` give the derivative of the player's payoff in their
/// own variable as a function of the opponent's; `own` is the axis the player
/// controls.
fn best_response_graph(slope: f64, offset: f64, own: Axis, tol: f64) -> Vec<Piece> {
    if slope.abs() <= tol && offset.abs() <= tol {
        return vec![Piece::Full];
    }
    let g = |t: f64| slope * t + offset;
    let mut pieces = Vec::new();
    // `own` fixed at `v` while the opponent's variable runs over [from, to]
    let fixed_own = |v: f64, from: f64, to: f64| Piece::Seg(NashSegment {
        fixed: own,
        value: v,
        from,
        to,
    });
    let other = match own {
        Axis::X => Axis::Y,
        Axis::Y => Axis::X,
    };
    let indifferent_at = |t: f64| Piece::Seg(NashSegment {
        fixed: other,
        value: t,
        from: 0.0,
        to: 1.0,
    });

    let root = if slope.abs() > tol { Some(-offset / slope) } else { None };
    match root {
        Some(r) if r > 0.0 && r < 1.0 => {
            let (lo, hi) = if slope > 0.0 { (0.0, 1.0) } else { (1.0, 0.0) };
            pieces.push(fixed_own(lo, 0.0, r));
            pieces.push(fixed_own(hi, r, 1.0));
            pieces.push(indifferent_at(r));
        }
        _ => {
            // one sign across the whole range, up to a tolerance-sized zero
            // at an end
            let mid = g(0.5);
            let sign = if mid.abs() > tol {
                mid
            } else if g(0.0).abs() > g(1.0).abs() {
                g(0.0)
            } else {
                g(1.0)
            };
            pieces.push(fixed_own(if sign > 0.0 { 1.0 } else { 0.0 }, 0.0, 1.0));
            for t in [0.0, 1.0] {
                if g(t).abs() <= tol {
                    pieces.push(indifferent_at(t));
                }
            }
        }
    }
    pieces
}

fn intersect(p: &Piece, q: &Piece) -> Option<Piece> {
    match (p, q) {
        (Piece::Full, other) | (other, Piece::Full) => Some(*other),
        (Piece::Seg(s), Piece::Seg(t)) => {
            if s.fixed == t.fixed {
                if (s.value - t.value).abs() > GEOM_EPS {
                    return None;
                }
                let from = s.from.max(t.from);
                let to = s.to.min(t.to);
                if from > to + GEOM_EPS {
                    return None;
                }
                Some(Piece::Seg(NashSegment {
                    fixed: s.fixed,
                    value: s.value,
                    from,
                    to: to.max(from),
                }))
            } else {
                let (v, h) = if s.fixed == Axis::X { (s, t) } else { (t, s) };
                let (x, y) = (v.value, h.value);
                let inside = |c: f64, seg: &NashSegment| {
                    c >= seg.from - GEOM_EPS && c <= seg.to + GEOM_EPS
                };
                if inside(y, v) && inside(x, h) {
                    Some(Piece::Seg(NashSegment {
                        fixed: Axis::X,
                        value: x,
                        from: y,
                        to: y,
                    }))
                } else {
                    None
                }
            }
        }
    }
}

/// Exact equilibrium set of the bilinear game induced by `g` on `b`.
///
/// Response coefficients with magnitude at most `tol` are treated as zero,
/// and indifference is reported as the full tie set.
pub fn enumerate_nash(g: &Game2x2, b: &JointProbBox, tol: f64) -> NashSet {
    enumerate_nash_corners(&corner_payoffs_unchecked(g, b), tol)
}

pub fn enumerate_nash_corners(c: &CornerPayoffs, tol: f64) -> NashSet {
    let r = c.response();
    let alice = best_response_graph(r.kappa_a, r.lambda_a, Axis::X, tol);
    let bob = best_response_graph(r.kappa_b, r.lambda_b, Axis::Y, tol);

    let mut segments: Vec<NashSegment> = Vec::new();
    let mut raw_points: Vec<(f64, f64)> = Vec::new();
    for p in &alice {
        for q in &bob {
            match intersect(p, q) {
                Some(Piece::Full) => return NashSet::FullSquare,
                Some(Piece::Seg(s)) if s.to - s.from <= GEOM_EPS => {
                    raw_points.push(s.endpoints()[0])
                }
                Some(Piece::Seg(s)) => segments.push(s),
                None => {}
            }
        }
    }

    let segments = merge_segments(segments);
    let mut points: Vec<NashPoint> = Vec::new();
    for (x, y) in raw_points {
        let (x, y) = (snap(x), snap(y));
        let covered = segments.iter().any(|s| s.distance(x, y) <= GEOM_EPS)
            || points
                .iter()
                .any(|p| (p.x - x).abs() <= GEOM_EPS && (p.y - y).abs() <= GEOM_EPS);
        if !covered {
            let (payoff_a, payoff_b) = c.payoff(x, y);
            points.push(NashPoint {
                x,
                y,
                payoff_a,
                payoff_b,
            });
        }
    }
    points.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    if segments.is_empty() {
        NashSet::Points { points }
    } else {
        NashSet::EdgeSegments { segments, points }
    }
}

fn snap(v: f64) -> f64 {
    if v.abs() <= GEOM_EPS {
        0.0
    } else if (v - 1.0).abs() <= GEOM_EPS {
        1.0
    } else {
        v
    }
}

fn merge_segments(mut segs: Vec<NashSegment>) -> Vec<NashSegment> {
    segs.sort_by(|s, t| {
        (s.fixed as u8)
            .cmp(&(t.fixed as u8))
            .then(s.value.total_cmp(&t.value))
            .then(s.from.total_cmp(&t.from))
    });
    let mut out: Vec<NashSegment> = Vec::new();
    for s in segs {
        if let Some(last) = out.last_mut() {
            if last.fixed == s.fixed
                && (last.value - s.value).abs() <= GEOM_EPS
                && s.from <= last.to + GEOM_EPS
            {
                last.to = last.to.max(s.to);
                continue;
            }
        }
        out.push(s);
    }
    out
}

/// `Ω = 4P(A1B1) − (2+β)P(A1) + αP(A2) − 2P(B1)`.
pub fn omega(b: &JointProbBox, interm: &FineIntermediates) -> f64 {
    let pa = |i: usize| 0.5 * (b.alice_marginal_from(i, 0) + b.alice_marginal_from(i, 1));
    let pb1 = 0.5 * (b.bob_marginal_from(0, 0) + b.bob_marginal_from(1, 0));
    4.0 * b.pp(0, 0) - (2.0 + interm.beta) * pa(0) + interm.alpha * pa(1) - 2.0 * pb1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridNash {
    pub n: usize,
    pub eps: f64,
    pub points: Vec<(f64, f64)>,
}

impl GridNash {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        self.points
            .iter()
            .map(|(px, py)| (px - x).hypot(py - y))
            .fold(f64::INFINITY, f64::min)
    }
}

/// All grid profiles whose most profitable deviation within the grid is at
/// most `eps`. The grid includes both endpoints of each axis.
pub fn grid_bruteforce_nash(g: &Game2x2, b: &JointProbBox, n: usize, eps: f64) -> GridNash {
    assert!(n >= 2, "grid needs at least two points per axis");
    let c = corner_payoffs_unchecked(g, b);
    let grid: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
    let mut pa = vec![vec![0.0; n]; n];
    let mut pb = vec![vec![0.0; n]; n];
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            let (u, v) = c.payoff(x, y);
            pa[i][j] = u;
            pb[i][j] = v;
        }
    }
    let best_a: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| pa[i][j]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let best_b: Vec<f64> = (0..n)
        .map(|i| pb[i].iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let mut points = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if best_a[j] - pa[i][j] <= eps && best_b[i] - pb[i][j] <= eps {
                points.push((grid[i], grid[j]));
            }
        }
    }
    GridNash { n, eps, points }
}

/// Hausdorff distance between an exact set and a grid set, measured with
/// segments sampled at `step`. Infinite when exactly one side is empty.
pub fn hausdorff(set: &NashSet, grid: &GridNash, step: f64) -> f64 {
    let samples = set.sample(step);
    match (samples.is_empty(), grid.points.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return f64::INFINITY,
        _ => {}
    }
    let forward = samples
        .iter()
        .map(|&(x, y)| grid.distance(x, y))
        .fold(0.0, f64::max);
    let backward = grid
        .points
        .iter()
        .map(|&(x, y)| set.distance(x, y))
        .fold(0.0, f64::max);
    forward.max(backward)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrbox::{cereceda_box, deterministic_box, product_box, CerecedaSet, Outcome};
    use crate::fine::{intermediates, AlphaRule, GammaMode};
    use std::f64::consts::SQRT_2;

    fn det() -> JointProbBox {
        deterministic_box([Outcome::Plus, Outcome::Minus, Outcome::Plus, Outcome::Minus])
    }

    #[test]
    fn corner_examples() {
        let mp = Game2x2::matching_pennies();
        let c1 = cereceda_box(CerecedaSet::First);
        let c = corner_payoffs(&mp, &c1).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((c.pi_a[i][j] - c1.correlation(i, j)).abs() < 1e-15);
                assert_eq!(c.pi_b[i][j], -c.pi_a[i][j]);
            }
        }
        let h = SQRT_2 / 2.0;
        let want = [[h, h], [h, -h]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((c.pi_a[i][j] - want[i][j]).abs() < 1e-15);
            }
        }
        let pd = corner_payoffs(&Game2x2::prisoners_dilemma(), &det()).unwrap();
        assert_eq!(pd.pi_a, [[3.0, 0.0], [5.0, 1.0]]);
        assert_eq!(pd.pi_b, [[3.0, 5.0], [0.0, 1.0]]);
    }

    #[test]
    fn payoff_examples() {
        let pd = Game2x2::prisoners_dilemma();
        assert_eq!(payoff(&pd, &det(), MixedProfile::new(0.0, 0.0).unwrap()), (1.0, 1.0));
        let mp = Game2x2::matching_pennies();
        assert_eq!(payoff(&mp, &det(), MixedProfile::new(0.5, 0.5).unwrap()), (0.0, 0.0));
    }

    #[test]
    fn deltas_examples() {
        let d = deltas(&Game2x2::prisoners_dilemma());
        assert_eq!((d.d1, d.d2, d.d3), (2.0, 1.0, -1.0));
        let d = deltas(&Game2x2::matching_pennies());
        assert_eq!((d.d1, d.d2, d.d3), (-2.0, 2.0, 4.0));
        let g = Game2x2::prisoners_dilemma();
        assert!(g.is_symmetric());
        assert_eq!(d_from_b(&g), (deltas(&g).d1, deltas(&g).d2));
    }

    fn d_from_b(g: &Game2x2) -> (f64, f64) {
        (g.b[1] - g.b[0], g.b[3] - g.b[2])
    }

    #[test]
    fn nash_checks() {
        let pd = Game2x2::prisoners_dilemma();
        assert!(is_nash(&pd, &det(), MixedProfile { x: 0.0, y: 0.0 }, 1e-9).ok);
        let c = is_nash(&pd, &det(), MixedProfile { x: 1.0, y: 1.0 }, 1e-9);
        assert!(!c.ok);
        assert_eq!(c.worst_deviation_a, 2.0);
        let mp = Game2x2::matching_pennies();
        assert!(is_nash(&mp, &det(), MixedProfile { x: 0.5, y: 0.5 }, 1e-9).ok);
    }

    #[test]
    fn enumeration_examples() {
        let pd = enumerate_nash(&Game2x2::prisoners_dilemma(), &det(), 1e-9);
        assert_eq!(
            pd,
            NashSet::Points {
                points: vec![NashPoint {
                    x: 0.0,
                    y: 0.0,
                    payoff_a: 1.0,
                    payoff_b: 1.0
                }]
            }
        );
        let mp = enumerate_nash(&Game2x2::matching_pennies(), &det(), 1e-9);
        let pts = mp.points();
        assert_eq!(pts.len(), 1);
        assert_eq!((pts[0].x, pts[0].y), (0.5, 0.5));
        assert!(mp.segments().is_empty());
    }

    #[test]
    fn cereceda_sets_give_edge_segments() {
        let mp = Game2x2::matching_pennies();
        let s1 = enumerate_nash(&mp, &cereceda_box(CerecedaSet::First), 1e-9);
        assert_eq!(s1.segments().len(), 1);
        let seg = s1.segments()[0];
        assert_eq!((seg.fixed, seg.value, seg.from, seg.to), (Axis::X, 1.0, 0.0, 1.0));
        let s2 = enumerate_nash(&mp, &cereceda_box(CerecedaSet::Second), 1e-9);
        let seg = s2.segments()[0];
        assert_eq!((seg.fixed, seg.value), (Axis::Y, 1.0));
        for (set, which) in [(&s1, CerecedaSet::First), (&s2, CerecedaSet::Second)] {
            let b = cereceda_box(which);
            for (x, y) in set.sample(0.05) {
                assert!(is_nash(&mp, &b, MixedProfile { x, y }, 1e-9).ok);
            }
        }
        let grid = grid_bruteforce_nash(&mp, &cereceda_box(CerecedaSet::First), 101, 1e-9);
        assert!(hausdorff(&s1, &grid, 0.005) <= 0.01);
    }

    #[test]
    fn constant_game_is_full_square() {
        let g = Game2x2::new([2.0; 4], [-1.0; 4]).unwrap();
        let b = product_box([0.3, 0.6, 0.2, 0.9]).unwrap();
        assert_eq!(enumerate_nash(&g, &b, 1e-9), NashSet::FullSquare);
        let grid = grid_bruteforce_nash(&g, &b, 11, 1e-9);
        assert_eq!(grid.points.len(), 121);
    }

    #[test]
    fn grid_examples() {
        let pd = grid_bruteforce_nash(&Game2x2::prisoners_dilemma(), &det(), 101, 1e-9);
        assert_eq!(pd.points, vec![(0.0, 0.0)]);
        let mp = grid_bruteforce_nash(&Game2x2::matching_pennies(), &det(), 101, 1e-9);
        assert_eq!(mp.points, vec![(0.5, 0.5)]);
    }

    #[test]
    fn omega_examples() {
        let rule = AlphaRule::GammaTimesMarginal;
        let d = det();
        let i = intermediates(&d, GammaMode::FineLiteral, rule, 1e-9).unwrap();
        assert_eq!(omega(&d, &i), 0.0);
        let p = product_box([0.5; 4]).unwrap();
        let i = intermediates(&p, GammaMode::FineLiteral, rule, 1e-9).unwrap();
        assert_eq!(omega(&p, &i), -1.0);
        for mode in [GammaMode::FineLiteral, GammaMode::SummedMarginals] {
            let c1 = cereceda_box(CerecedaSet::First);
            let i = intermediates(&c1, mode, rule, 1e-9).unwrap();
            assert!((omega(&c1, &i) - (SQRT_2 - 2.0) / 2.0).abs() < 1e-15);
            let c2 = cereceda_box(CerecedaSet::Second);
            let i = intermediates(&c2, mode, rule, 1e-9).unwrap();
            assert!((omega(&c2, &i) + (2.0 + SQRT_2) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn affine_rejects_nonpositive_scale() {
        let g = Game2x2::prisoners_dilemma();
        assert_eq!(
            g.affine(Player::Alice, 0.0, 1.0),
            Err(GameError::NonPositiveScale(0.0))
        );
        assert!(Game2x2::new([f64::NAN, 0.0, 0.0, 0.0], [0.0; 4]).is_err());
        assert!(MixedProfile::new(1.5, 0.0).is_err());
    }
}
