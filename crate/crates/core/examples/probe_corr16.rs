//! Scratch probe: seed-to-seed spread of the small-n correlated median.

use ggm_core::mesh::clements_decompose;
use ggm_core::noise::{apply_noisy_to_state, predicted_median_infidelity, NoiseKind, NoiseModel};
use ggm_core::numerics::{haar_random_unitary_with, keyed_rng, StateVector};

fn median(v: &mut Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn main() {
    let samples = 500usize;
    let n = 16usize;
    let sigma = 0.01;
    for master in 0..10u64 {
        let prep: Vec<_> = (0..samples)
            .map(|s| {
                let mut rng = keyed_rng(master, n as u64, s as u64);
                let u = haar_random_unitary_with(n, &mut rng).expect("haar");
                let mesh = clements_decompose(&u).expect("decompose");
                let psi = StateVector::haar_random(n, &mut rng);
                (mesh, psi)
            })
            .collect();
        let mut meds = Vec::new();
        let mut means = Vec::new();
        for kind in [NoiseKind::Correlated, NoiseKind::Uncorrelated] {
            let model = NoiseModel::new(kind, sigma, master.wrapping_mul(7919).wrapping_add(13));
            let mut infids: Vec<f64> = prep
                .iter()
                .enumerate()
                .map(|(s, (mesh, psi))| {
                    let mut ideal = psi.amplitudes().to_vec();
                    mesh.apply_to_state(&mut ideal);
                    let mut noisy = psi.amplitudes().to_vec();
                    apply_noisy_to_state(mesh, &model, s as u64, &mut noisy);
                    let overlap: num_complex::Complex64 =
                        ideal.iter().zip(&noisy).map(|(a, b)| a.conj() * b).sum();
                    (1.0 - overlap.norm_sqr()).max(0.0)
                })
                .collect();
            means.push(infids.iter().sum::<f64>() / infids.len() as f64);
            let pred = predicted_median_infidelity(n, &model);
            meds.push(median(&mut infids) / pred);
        }
        println!(
            "master={master}: corr_ratio={:.3} uncorr_ratio={:.3} mean_corr/mean_unc={:.3} med_ratio={:.3}",
            meds[0],
            meds[1],
            means[0] / means[1],
            (meds[0] / meds[1]) * (1.0 / std::f64::consts::SQRT_2)
        );
    }
}
