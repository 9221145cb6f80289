//! Coherent fabrication-error models for programmed meshes.
//!
//! Every coupling in a mesh deviates from its programmed splitting angle by
//! beamsplitter offsets `(alpha, beta)`. The three models differ in how the
//! offsets are shared across a circuit:
//!
//! * [`NoiseKind::Correlated`]: one offset pair per circuit evaluation,
//!   shared by every coupling. This is the time-bin regime, where each
//!   layer revisits the same physical interferometer.
//! * [`NoiseKind::Uncorrelated`]: a fresh pair per coupling, as in a
//!   spatial mesh with independently fabricated devices.
//! * [`NoiseKind::Hybrid`]: a shared pair plus independent per-coupling
//!   jitter, modelling slow drift on top of a common miscalibration.
//!
//! `sigma` is the RMS deviation, in radians, of each splitter's *physical*
//! splitting angle: a coupler fabricated at `pi/2 + delta` instead of a
//! perfect 50:50 implements `exp(-i (pi/2 + delta)/2 sigma_x)`, so the
//! generator offset handed to the transfer-matrix model is `delta / 2`.
//! With this convention the small-error median infidelity of an n-mode
//! Haar-random circuit is `n sigma^2 / 2` for independent offsets (see
//! [`predicted_median_infidelity`]).
//!
//! Draws are keyed by `(seed, sample)` so a circuit's noise realization is
//! reproducible and identical whether the mesh is evaluated abstractly or
//! through the hardware timeline simulator.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::mesh::MeshProgram;
use crate::mzi::noisy_block;
use crate::numerics::{keyed_rng, ComplexMatrix};
use crate::{Error, Result};

/// How beamsplitter offsets are shared across the couplings of one circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Correlated,
    Uncorrelated,
    Hybrid,
}

/// Beamsplitter-offset distribution: `alpha, beta ~ N(0, sigma^2)`, with an
/// extra per-coupling `N(0, sigma_jitter^2)` term in the hybrid model.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub sigma: f64,
    #[serde(default)]
    pub sigma_jitter: f64,
    pub seed: u64,
}

/// Offsets assigned to one coupling for one circuit evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OffsetDraw {
    pub alpha: f64,
    pub beta: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, sigma: f64, seed: u64) -> Self {
        Self {
            kind,
            sigma,
            sigma_jitter: 0.0,
            seed,
        }
    }

    pub fn with_jitter(mut self, sigma_jitter: f64) -> Self {
        self.sigma_jitter = sigma_jitter;
        self
    }

    /// Zero-spread model: every draw is a zero offset. The noiseless
    /// baseline for simulators that always take a model.
    pub fn zero() -> Self {
        Self::new(NoiseKind::Uncorrelated, 0.0, 0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::Input(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.sigma_jitter.is_finite() && self.sigma_jitter >= 0.0) {
            return Err(Error::Input(format!(
                "sigma_jitter must be >= 0, got {}",
                self.sigma_jitter
            )));
        }
        Ok(())
    }

    /// Generator offsets for circuit evaluation `sample`, one entry per
    /// coupling in mesh traversal order. Physical angle deviations are drawn
    /// at RMS `sigma` and halved (see module docs). The same
    /// `(seed, sample)` always yields the same draws, independent of how
    /// the circuit is later executed.
    pub fn draws(&self, sample: u64, n_couplings: usize) -> Vec<OffsetDraw> {
        let mut rng = keyed_rng(self.seed, sample, 0);
        // Half of the physical splitting-angle deviation.
        let scale = 0.5 * self.sigma;
        let jitter_scale = 0.5 * self.sigma_jitter;
        let mut normal = || -> f64 {
            let z: f64 = rng.sample(StandardNormal);
            z
        };
        match self.kind {
            NoiseKind::Correlated => {
                let shared = OffsetDraw {
                    alpha: scale * normal(),
                    beta: scale * normal(),
                };
                vec![shared; n_couplings]
            }
            NoiseKind::Uncorrelated => (0..n_couplings)
                .map(|_| OffsetDraw {
                    alpha: scale * normal(),
                    beta: scale * normal(),
                })
                .collect(),
            NoiseKind::Hybrid => {
                let base = (scale * normal(), scale * normal());
                (0..n_couplings)
                    .map(|_| OffsetDraw {
                        alpha: base.0 + jitter_scale * normal(),
                        beta: base.1 + jitter_scale * normal(),
                    })
                    .collect()
            }
        }
    }
}

/// Dense unitary the mesh realizes under noise draw `sample`.
///
/// Offsets perturb each coupling's splitting; the transfer stays unitary
/// because the offsets are coherent (no loss here - loss belongs to the
/// hardware timeline simulator).
pub fn noisy_unitary(
    mesh: &MeshProgram,
    model: &NoiseModel,
    sample: u64,
) -> Result<ComplexMatrix> {
    mesh.validate()?;
    model.validate()?;
    let draws = model.draws(sample, mesh.n_couplings());
    let mut u = ComplexMatrix::identity(mesh.n_modes);
    let mut k = 0;
    for layer in &mesh.layers {
        for c in layer {
            let d = draws[k];
            u.apply_pair_rows(&noisy_block(c.theta, c.phi, d.alpha, d.beta), c.i, c.j);
            k += 1;
        }
    }
    for (r, p) in mesh.output_phases.iter().enumerate() {
        u.scale_row(r, Complex64::from_polar(1.0, *p));
    }
    Ok(u)
}

/// Applies the noisy mesh directly to a state vector (same draws as
/// [`noisy_unitary`], without forming the matrix).
pub fn apply_noisy_to_state(
    mesh: &MeshProgram,
    model: &NoiseModel,
    sample: u64,
    amps: &mut [Complex64],
) {
    let draws = model.draws(sample, mesh.n_couplings());
    let mut k = 0;
    for layer in &mesh.layers {
        for c in layer {
            let d = draws[k];
            let t = noisy_block(c.theta, c.phi, d.alpha, d.beta);
            let (a, b) = (amps[c.i], amps[c.j]);
            amps[c.i] = t[0][0] * a + t[0][1] * b;
            amps[c.j] = t[1][0] * a + t[1][1] * b;
            k += 1;
        }
    }
    for (a, p) in amps.iter_mut().zip(&mesh.output_phases) {
        *a *= Complex64::from_polar(1.0, *p);
    }
}

/// Small-error prediction for the median single-photon infidelity of an
/// n-mode Haar-random programmed circuit: `n sigma^2 / 2` for independent
/// splitter errors and a factor `1/sqrt(2)` smaller when every coupling
/// shares one error pair, with the hybrid model combining both
/// contributions. The shared-error discount is a median effect: the mean
/// matches the independent case, but the error is a quadratic form in just
/// two Gaussians, whose median sits near `ln 2 ~ 0.69 ~ 1/sqrt(2)` of the
/// mean.
pub fn predicted_median_infidelity(n_modes: usize, model: &NoiseModel) -> f64 {
    let n = n_modes as f64;
    let s2 = model.sigma * model.sigma;
    let j2 = model.sigma_jitter * model.sigma_jitter;
    match model.kind {
        NoiseKind::Uncorrelated => n * s2 / 2.0,
        NoiseKind::Correlated => n * s2 / (2.0 * std::f64::consts::SQRT_2),
        NoiseKind::Hybrid => n * s2 / (2.0 * std::f64::consts::SQRT_2) + n * j2 / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{clements_topology, scf_topology, ScfVariant};
    use crate::numerics::{haar_random_unitary, keyed_rng, state_infidelity, StateVector};

    fn test_mesh(n: usize) -> MeshProgram {
        crate::mesh::clements_decompose(&haar_random_unitary(n, 42).unwrap()).unwrap()
    }

    #[test]
    fn zero_sigma_reproduces_ideal_unitary() {
        let mesh = test_mesh(6);
        let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.0, 1);
        let noisy = noisy_unitary(&mesh, &model, 0).unwrap();
        assert!(noisy.max_abs_diff(&mesh.unitary().unwrap()) < 1e-13);
    }

    #[test]
    fn correlated_draws_are_shared_uncorrelated_are_not() {
        let model = NoiseModel::new(NoiseKind::Correlated, 0.05, 7);
        let d = model.draws(3, 10);
        assert!(d.iter().all(|x| x == &d[0]));
        assert!(d[0].alpha != 0.0 && d[0].beta != 0.0);

        let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.05, 7);
        let d = model.draws(3, 10);
        assert!(d[0] != d[1] || d[1] != d[2]);
    }

    #[test]
    fn hybrid_jitter_spreads_around_shared_base() {
        let model = NoiseModel::new(NoiseKind::Hybrid, 0.05, 11).with_jitter(0.001);
        let d = model.draws(0, 200);
        let mean_alpha: f64 = d.iter().map(|x| x.alpha).sum::<f64>() / 200.0;
        // Jitter is 50x smaller than the shared part, so draws cluster
        // tightly around their mean.
        assert!(d.iter().all(|x| (x.alpha - mean_alpha).abs() < 0.01));
        assert!(d.iter().any(|x| x.alpha != mean_alpha));

        let no_jitter = NoiseModel::new(NoiseKind::Hybrid, 0.05, 11);
        let d0 = no_jitter.draws(0, 5);
        assert!(d0.iter().all(|x| x == &d0[0]));
    }

    #[test]
    fn draws_are_reproducible_and_sample_keyed() {
        let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.02, 9);
        assert_eq!(model.draws(4, 6), model.draws(4, 6));
        assert_ne!(model.draws(4, 6), model.draws(5, 6));
        let other_seed = NoiseModel::new(NoiseKind::Uncorrelated, 0.02, 10);
        assert_ne!(model.draws(4, 6), other_seed.draws(4, 6));
    }

    #[test]
    fn noisy_unitary_stays_unitary() {
        let mesh = test_mesh(5);
        for kind in [NoiseKind::Correlated, NoiseKind::Uncorrelated, NoiseKind::Hybrid] {
            let model = NoiseModel::new(kind, 0.1, 3).with_jitter(0.02);
            let u = noisy_unitary(&mesh, &model, 1).unwrap();
            assert!(u.is_unitary(1e-11), "{kind:?}");
        }
    }

    #[test]
    fn state_application_matches_matrix_application() {
        let mesh = test_mesh(6);
        let model = NoiseModel::new(NoiseKind::Hybrid, 0.05, 21).with_jitter(0.01);
        let u = noisy_unitary(&mesh, &model, 8).unwrap();
        let mut rng = keyed_rng(1, 2, 3);
        let psi = StateVector::haar_random(6, &mut rng);
        let expect = u.mul_vec(psi.amplitudes());
        let mut got = psi.amplitudes().to_vec();
        apply_noisy_to_state(&mesh, &model, 8, &mut got);
        for (a, b) in expect.iter().zip(&got) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn median_infidelity_tracks_prediction_for_uncorrelated_noise() {
        let n = 16;
        let mesh = test_mesh(n);
        let ideal = mesh.unitary().unwrap();
        let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.05, 2);
        let mut rng = keyed_rng(50, 0, 0);
        let psi = StateVector::haar_random(n, &mut rng);
        let mut infids: Vec<f64> = (0..300)
            .map(|s| {
                let u = noisy_unitary(&mesh, &model, s).unwrap();
                state_infidelity(&ideal, &u, &psi).unwrap()
            })
            .collect();
        infids.sort_by(f64::total_cmp);
        let median = infids[infids.len() / 2];
        let predicted = predicted_median_infidelity(n, &model);
        assert!(
            median > 0.5 * predicted && median < 2.0 * predicted,
            "median {median} vs predicted {predicted}"
        );
    }

    #[test]
    fn correlated_noise_is_softer_than_uncorrelated_on_average() {
        let n = 8;
        let mesh = test_mesh(n);
        let ideal = mesh.unitary().unwrap();
        let mut rng = keyed_rng(51, 0, 0);
        let psi = StateVector::haar_random(n, &mut rng);
        let median = |kind: NoiseKind| -> f64 {
            let model = NoiseModel::new(kind, 0.04, 13);
            let mut v: Vec<f64> = (0..400)
                .map(|s| {
                    let u = noisy_unitary(&mesh, &model, s).unwrap();
                    state_infidelity(&ideal, &u, &psi).unwrap()
                })
                .collect();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        assert!(median(NoiseKind::Correlated) < median(NoiseKind::Uncorrelated));
    }

    #[test]
    fn rejects_negative_sigma() {
        let model = NoiseModel::new(NoiseKind::Correlated, -0.1, 0);
        assert!(model.validate().is_err());
        let mesh = scf_topology(4, ScfVariant::Minimal).unwrap();
        assert!(noisy_unitary(&mesh, &model, 0).is_err());
    }

    #[test]
    fn noise_respects_mesh_traversal_order() {
        // Same draws must land on the same couplings regardless of how the
        // caller later executes the circuit; flat order is the contract.
        let mesh = clements_topology(4).unwrap().randomized(3);
        let model = NoiseModel::new(NoiseKind::Uncorrelated, 0.05, 77);
        let draws = model.draws(2, mesh.n_couplings());
        let mut u = ComplexMatrix::identity(4);
        for (k, c) in mesh.flat_couplings().enumerate() {
            u.apply_pair_rows(
                &noisy_block(c.theta, c.phi, draws[k].alpha, draws[k].beta),
                c.i,
                c.j,
            );
        }
        for (r, p) in mesh.output_phases.iter().enumerate() {
            u.scale_row(r, Complex64::from_polar(1.0, *p));
        }
        assert!(u.max_abs_diff(&noisy_unitary(&mesh, &model, 2).unwrap()) < 1e-14);
    }
}
