//! Dense phase-one simplex for small equality systems `A x = b, x >= 0`.
//!
//! Bland's rule is used for both the entering and the leaving variable, so the
//! method terminates on degenerate problems without perturbation.

use thiserror::Error;

#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            pivot_tol: 1e-11,
            feasibility_tol: 1e-9,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("simplex did not converge within {0} iterations")]
    IterationLimit(usize),
    #[error("constraint matrix has {rows} rows but right-hand side has {rhs}")]
    Shape { rows: usize, rhs: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseOne {
    /// A nonnegative solution; `infeasibility` is the remaining artificial mass.
    Feasible { x: Vec<f64>, infeasibility: f64 },
    Infeasible { infeasibility: f64 },
}

/// Minimizes the sum of artificial variables over `A x + s = b`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], opts: SimplexOptions) -> Result<PhaseOne, SimplexError> {
    let m = a.len();
    if b.len() != m {
        return Err(SimplexError::Shape { rows: m, rhs: b.len() });
    }
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let rhs = width - 1;

    // rows 0..m are constraints, row m is the phase-one objective
    let mut t = vec![vec![0.0; width]; m + 1];
    for (r, row) in a.iter().enumerate() {
        let flip = if b[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..n {
            t[r][c] = flip * row[c];
        }
        t[r][n + r] = 1.0;
        t[r][rhs] = flip * b[r];
    }
    for c in 0..n {
        t[m][c] = -(0..m).map(|r| t[r][c]).sum::<f64>();
    }
    t[m][rhs] = -(0..m).map(|r| t[r][rhs]).sum::<f64>();
    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut iterations = 0;
    loop {
        let entering = (0..n + m).find(|&c| t[m][c] < -opts.pivot_tol);
        let Some(col) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            let coef = t[r][col];
            if coef > opts.pivot_tol {
                let ratio = t[r][rhs] / coef;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-15
                            || ((ratio - lratio).abs() <= 1e-15 && basis[r] < basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
        }
        // phase one is bounded below by zero, so a missing pivot row only
        // happens through roundoff; treat the column as ineligible
        let Some((row, _)) = leave else {
            t[m][col] = 0.0;
            continue;
        };
        pivot(&mut t, row, col);
        basis[row] = col;
        iterations += 1;
        if iterations >= opts.max_iterations {
            return Err(SimplexError::IterationLimit(opts.max_iterations));
        }
    }

    let infeasibility = -t[m][rhs];
    if infeasibility > opts.feasibility_tol {
        return Ok(PhaseOne::Infeasible { infeasibility });
    }
    let mut x = vec![0.0; n];
    for (r, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = t[r][rhs].max(0.0);
        }
    }
    Ok(PhaseOne::Feasible {
        x,
        infeasibility: infeasibility.max(0.0),
    })
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t[row].clone();
    for (r, line) in t.iter_mut().enumerate() {
        if r == row {
            continue;
        }
        let f = line[col];
        if f != 0.0 {
            for (v, pv) in line.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            line[col] = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_point_in_simplex() {
        let a = vec![vec![1.0, 1.0, 1.0], vec![1.0, 0.0, 0.0]];
        let b = vec![1.0, 0.25];
        match phase_one(&a, &b, SimplexOptions::default()).unwrap() {
            PhaseOne::Feasible { x, .. } => {
                assert!((x[0] - 0.25).abs() < 1e-12);
                assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                assert!(x.iter().all(|v| *v >= 0.0));
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_infeasible_system() {
        // x + y = 1 and x + y = 2
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        let b = vec![1.0, 2.0];
        match phase_one(&a, &b, SimplexOptions::default()).unwrap() {
            PhaseOne::Infeasible { infeasibility } => assert!((infeasibility - 1.0).abs() < 1e-12),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // -x = -0.5
        let a = vec![vec![-1.0, 0.0]];
        let b = vec![-0.5];
        match phase_one(&a, &b, SimplexOptions::default()).unwrap() {
            PhaseOne::Feasible { x, .. } => assert!((x[0] - 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn redundant_rows_are_fine() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![1.0, 0.0]];
        let b = vec![1.0, 2.0, 0.3];
        assert!(matches!(
            phase_one(&a, &b, SimplexOptions::default()).unwrap(),
            PhaseOne::Feasible { .. }
        ));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let a = vec![vec![1.0, 1.0], vec![1.0, 0.0]];
        let b = vec![1.0, 0.5];
        let opts = SimplexOptions {
            max_iterations: 1,
            ..SimplexOptions::default()
        };
        assert_eq!(phase_one(&a, &b, opts), Err(SimplexError::IterationLimit(1)));
    }
}
