//! Boxes from two-qubit states measured along spin directions.

use crate::corrbox::{JointProbBox, Outcome};
use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;
use thiserror::Error;

const STATE_TOL: f64 = 1e-9;
const DIRECTION_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QuantumError {
    #[error("state contains a non-finite amplitude")]
    NonFinite,
    #[error("state vector has norm {0}, expected 1")]
    NotNormalized(f64),
    #[error("density matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix has trace {0}, expected 1")]
    TraceNotOne(f64),
    #[error("density matrix has negative eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("direction {label} has length {length}, expected 1")]
    NonUnitDirection { label: &'static str, length: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantumState {
    /// Amplitudes on `|00⟩, |01⟩, |10⟩, |11⟩`, Alice's qubit first.
    Pure([Complex64; 4]),
    Density([[Complex64; 4]; 4]),
}

impl QuantumState {
    pub fn phi_plus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        QuantumState::Pure([h, z, z, h])
    }

    pub fn psi_minus() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        QuantumState::Pure([z, h, -h, z])
    }

    /// `|00⟩`
    pub fn zero_zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        QuantumState::Pure([Complex64::new(1.0, 0.0), z, z, z])
    }

    /// Product of two single-qubit pure states.
    pub fn product(alice: [Complex64; 2], bob: [Complex64; 2]) -> Self {
        QuantumState::Pure([
            alice[0] * bob[0],
            alice[0] * bob[1],
            alice[1] * bob[0],
            alice[1] * bob[1],
        ])
    }

    pub fn density_matrix(&self) -> Matrix4<Complex64> {
        match self {
            QuantumState::Pure(amps) => {
                let v = Vector4::from_column_slice(amps);
                v * v.adjoint()
            }
            QuantumState::Density(m) => Matrix4::from_fn(|r, c| m[r][c]),
        }
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        match self {
            QuantumState::Pure(amps) => {
                if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                    return Err(QuantumError::NonFinite);
                }
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > STATE_TOL {
                    return Err(QuantumError::NotNormalized(norm));
                }
                Ok(())
            }
            QuantumState::Density(m) => {
                if m.iter().flatten().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                    return Err(QuantumError::NonFinite);
                }
                let rho = self.density_matrix();
                let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                if herm > STATE_TOL {
                    return Err(QuantumError::NotHermitian(herm));
                }
                let tr = rho.trace().re;
                if (tr - 1.0).abs() > STATE_TOL {
                    return Err(QuantumError::TraceNotOne(tr));
                }
                let min_eig = rho.symmetric_eigenvalues().min();
                if min_eig < -STATE_TOL {
                    return Err(QuantumError::NotPositive(min_eig));
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Direction {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Direction { x, y, z }
    }

    /// Unit vector in the x–z plane at `theta` radians from the z axis.
    pub fn planar(theta: f64) -> Self {
        Direction {
            x: theta.sin(),
            y: 0.0,
            z: theta.cos(),
        }
    }

    pub fn planar_degrees(deg: f64) -> Self {
        Self::planar(deg.to_radians())
    }

    pub fn length(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn negated(&self) -> Self {
        Direction::new(-self.x, -self.y, -self.z)
    }

    /// `(I + s n·σ)/2` for outcome sign `s`.
    fn projector(&self, o: Outcome) -> Matrix2<Complex64> {
        let s = o.sign();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Matrix2::new(
            c(0.5 * (1.0 + s * self.z), 0.0),
            c(0.5 * s * self.x, -0.5 * s * self.y),
            c(0.5 * s * self.x, 0.5 * s * self.y),
            c(0.5 * (1.0 - s * self.z), 0.0),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumSetup {
    pub state: QuantumState,
    pub alice: [Direction; 2],
    pub bob: [Direction; 2],
}

impl QuantumSetup {
    pub fn new(
        state: QuantumState,
        alice: [Direction; 2],
        bob: [Direction; 2],
    ) -> Result<Self, QuantumError> {
        let s = QuantumSetup { state, alice, bob };
        s.validate()?;
        Ok(s)
    }

    /// Planar angles in degrees: Alice's two settings, then Bob's.
    pub fn planar_degrees(state: QuantumState, angles: [f64; 4]) -> Result<Self, QuantumError> {
        let d = angles.map(Direction::planar_degrees);
        Self::new(state, [d[0], d[1]], [d[2], d[3]])
    }

    pub fn validate(&self) -> Result<(), QuantumError> {
        self.state.validate()?;
        let labels = ["A1", "A2", "B1", "B2"];
        for (label, d) in labels.into_iter().zip(self.alice.iter().chain(&self.bob)) {
            let length = d.length();
            if !length.is_finite() || (length - 1.0).abs() > DIRECTION_TOL {
                return Err(QuantumError::NonUnitDirection { label, length });
            }
        }
        Ok(())
    }
}

fn kron(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

pub fn born_box(setup: &QuantumSetup) -> Result<JointProbBox, QuantumError> {
    setup.validate()?;
    let rho = setup.state.density_matrix();
    let mut p = [[[[0.0; 2]; 2]; 2]; 2];
    for (i, da) in setup.alice.iter().enumerate() {
        for (j, db) in setup.bob.iter().enumerate() {
            for a in Outcome::ALL {
                for b in Outcome::ALL {
                    let op = kron(&da.projector(a), &db.projector(b));
                    p[i][j][a.index()][b.index()] = (rho * op).trace().re;
                }
            }
        }
    }
    Ok(JointProbBox::from_array(p))
}

/// `|Φ+⟩` with settings reaching the CHSH maximum. The second preset
/// reverses Bob's directions, which flips his outcome labels.
pub fn chsh_optimal_setup(which: u8) -> Option<QuantumSetup> {
    let base = QuantumSetup::planar_degrees(QuantumState::phi_plus(), [0.0, 90.0, 45.0, -45.0])
        .expect("preset is valid");
    match which {
        1 => Some(base),
        2 => Some(QuantumSetup {
            bob: base.bob.map(|d| d.negated()),
            ..base
        }),
        _ => None,
    }
}

/// Haar-distributed pure state and uniformly random directions.
pub fn random_setup(seed: u64) -> QuantumSetup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps = [Complex64::new(0.0, 0.0); 4];
    for a in amps.iter_mut() {
        *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    let dirs: [Direction; 4] = std::array::from_fn(|_| random_direction(&mut rng));
    QuantumSetup {
        state: QuantumState::Pure(amps),
        alice: [dirs[0], dirs[1]],
        bob: [dirs[2], dirs[3]],
    }
}

/// Product of two random single-qubit states, random directions.
pub fn random_product_setup(seed: u64) -> QuantumSetup {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut qubit = || {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        for a in v.iter_mut() {
            *a = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        }
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        v.map(|a| a / n)
    };
    let (qa, qb) = (qubit(), qubit());
    let dirs: [Direction; 4] = std::array::from_fn(|_| random_direction(&mut rng));
    QuantumSetup {
        state: QuantumState::product(qa, qb),
        alice: [dirs[0], dirs[1]],
        bob: [dirs[2], dirs[3]],
    }
}

fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return Direction::new(v[0] / n, v[1] / n, v[2] / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corrbox::{cereceda_box, deterministic_box, stats, validate, CerecedaSet};
    use crate::fine::bell_values;
    use std::f64::consts::SQRT_2;

    #[test]
    fn phi_plus_preset_is_first_cereceda_set() {
        let b = born_box(&chsh_optimal_setup(1).unwrap()).unwrap();
        assert!(b.max_abs_diff(&cereceda_box(CerecedaSet::First)) < 1e-12);
        let s = stats(&b, 1e-9).unwrap();
        assert!((s.chsh_max_abs - 2.0 * SQRT_2).abs() < 1e-12);
        let b2 = born_box(&chsh_optimal_setup(2).unwrap()).unwrap();
        assert!(b2.max_abs_diff(&cereceda_box(CerecedaSet::Second)) < 1e-12);
        assert!(b.flip_bob_outcomes().max_abs_diff(&b2) < 1e-12);
        assert!(chsh_optimal_setup(3).is_none());
    }

    #[test]
    fn zero_zero_along_z_is_deterministic() {
        let s = QuantumSetup::planar_degrees(QuantumState::zero_zero(), [0.0; 4]).unwrap();
        let b = born_box(&s).unwrap();
        assert!(b.max_abs_diff(&deterministic_box([Outcome::Plus; 4])) < 1e-15);
    }

    #[test]
    fn singlet_anticorrelates_on_equal_angles() {
        let s = QuantumSetup::planar_degrees(QuantumState::psi_minus(), [10.0, 70.0, 10.0, 70.0])
            .unwrap();
        let b = born_box(&s).unwrap();
        assert!((b.correlation(0, 0) + 1.0).abs() < 1e-12);
        assert!((b.correlation(1, 1) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_input_matches_pure_input() {
        let pure = chsh_optimal_setup(1).unwrap();
        let rho = pure.state.density_matrix();
        let dens = QuantumState::Density(std::array::from_fn(|r| std::array::from_fn(|c| rho[(r, c)])));
        let s = QuantumSetup::new(dens, pure.alice, pure.bob).unwrap();
        assert!(born_box(&s).unwrap().max_abs_diff(&born_box(&pure).unwrap()) < 1e-15);
    }

    #[test]
    fn malformed_states_are_rejected() {
        let c = |r: f64| Complex64::new(r, 0.0);
        let bad = QuantumState::Pure([c(1.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(bad.validate(), Err(QuantumError::NotNormalized(_))));
        let mut m = [[c(0.0); 4]; 4];
        m[0][0] = c(1.5);
        m[1][1] = c(-0.5);
        assert!(matches!(
            QuantumState::Density(m).validate(),
            Err(QuantumError::NotPositive(_))
        ));
        m[1][1] = c(0.0);
        assert!(matches!(
            QuantumState::Density(m).validate(),
            Err(QuantumError::TraceNotOne(_))
        ));
        let dirs = [Direction::new(1.0, 1.0, 0.0), Direction::planar(0.0)];
        assert!(matches!(
            QuantumSetup::new(QuantumState::phi_plus(), dirs, dirs),
            Err(QuantumError::NonUnitDirection { label: "A1", .. })
        ));
    }

    #[test]
    fn random_setups_are_valid_and_below_tsirelson() {
        for seed in 0..1000 {
            let b = born_box(&random_setup(seed)).unwrap();
            assert!(validate(&b, 1e-9).unwrap().valid, "seed {seed}");
            let s = stats(&b, 1e-9).unwrap();
            assert!(s.chsh_max_abs <= 2.0 * SQRT_2 + 1e-9);
        }
    }

    #[test]
    fn product_states_satisfy_bell() {
        for seed in 0..300 {
            let b = born_box(&random_product_setup(seed)).unwrap();
            assert!(bell_values(&b, 1e-9).unwrap().satisfied, "seed {seed}");
        }
    }
}
