//! Scratch probe: quadratic-form structure of correlated-noise infidelity.

use ggm_core::mesh::{clements_decompose, clements_topology, MeshProgram};
use ggm_core::mzi::noisy_block;
use ggm_core::numerics::{haar_random_unitary, keyed_rng, StateVector};
use num_complex::Complex64;

fn apply_with(mesh: &MeshProgram, alpha: f64, beta: f64, amps: &mut [Complex64]) {
    for layer in &mesh.layers {
        for c in layer {
            let t = noisy_block(c.theta, c.phi, alpha, beta);
            let (a, b) = (amps[c.i], amps[c.j]);
            amps[c.i] = t[0][0] * a + t[0][1] * b;
            amps[c.j] = t[1][0] * a + t[1][1] * b;
        }
    }
    for (a, p) in amps.iter_mut().zip(&mesh.output_phases) {
        *a *= Complex64::from_polar(1.0, *p);
    }
}

fn infid(mesh: &MeshProgram, alpha: f64, beta: f64, psi: &[Complex64], ideal: &[Complex64]) -> f64 {
    let mut amps = psi.to_vec();
    apply_with(mesh, alpha, beta, &mut amps);
    let ov: Complex64 = ideal.iter().zip(&amps).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ov.norm_sqr()).max(0.0)
}

fn probe(label: &str, n: usize, build: impl Fn(u64) -> MeshProgram) {
    let eps = 1e-4;
    let mut corr_sum = 0.0;
    let mut ab_sum = 0.0;
    let mut cos_sum = 0.0;
    let mut count = 0usize;
    let trials = 40;
    // Monte Carlo of the median over the mixture.
    let mut q_draws: Vec<f64> = Vec::new();
    let mut rng = keyed_rng(999, 0, 0);
    use rand::Rng;
    for t in 0..trials {
        let mesh = build(t as u64);
        let psi = StateVector::haar_random(n, &mut keyed_rng(1000 + t as u64, 0, 0));
        let psi = psi.amplitudes().to_vec();
        let mut ideal = psi.clone();
        apply_with(&mesh, 0.0, 0.0, &mut ideal);
        let a = infid(&mesh, eps, 0.0, &psi, &ideal) / (eps * eps);
        let b = infid(&mesh, 0.0, eps, &psi, &ideal) / (eps * eps);
        let q11 = infid(&mesh, eps, eps, &psi, &ideal) / (eps * eps);
        let c = (q11 - a - b) / 2.0;
        corr_sum += c / (a * b).sqrt();
        ab_sum += a + b;
        for layer in &mesh.layers {
            for cc in layer {
                cos_sum += cc.theta.cos();
                count += 1;
            }
        }
        // draw (alpha, beta) at sigma = 1 scale (scale 0.5 each), record q
        for _ in 0..200 {
            let al: f64 = 0.5 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            let be: f64 = 0.5 * rng.sample::<f64, _>(rand_distr::StandardNormal);
            q_draws.push(a * al * al + b * be * be + 2.0 * c * al * be);
        }
    }
    q_draws.sort_by(f64::total_cmp);
    let mean = q_draws.iter().sum::<f64>() / q_draws.len() as f64;
    let median = q_draws[q_draws.len() / 2];
    println!(
        "{label} n={n}: corr={:.3} (a+b)/2n={:.3} <cos theta>={:.3} mean/(n/2)={:.3} median/mean={:.3} median/(n/(2sqrt2))={:.3}",
        corr_sum / trials as f64,
        ab_sum / (2.0 * n as f64) / trials as f64,
        cos_sum / count as f64,
        mean / (n as f64 / 2.0),
        median / mean,
        median / (n as f64 / (2.0 * std::f64::consts::SQRT_2))
    );
}

fn main() {
    for n in [16usize, 64] {
        probe("haar-decomposed", n, |t| {
            clements_decompose(&haar_random_unitary(n, 7000 + t).unwrap()).unwrap()
        });
        probe("randomized-prog", n, |t| {
            clements_topology(n).unwrap().randomized(8000 + t)
        });
    }
}
