//! Scratch probe: scaling-experiment medians vs closed forms.

use ggm_core::experiments::{scaling_experiment, ScalingConfig};
use ggm_core::noise::NoiseKind;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let n_samples: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(500);
    let seed: u64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(20);
    let max_n: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(256);
    let cfg = ScalingConfig {
        mode_counts: [16, 64, 256].into_iter().filter(|&n| n <= max_n).collect(),
        sigmas: vec![1e-3, 3e-3, 1e-2, 3e-2],
        kinds: vec![NoiseKind::Uncorrelated, NoiseKind::Correlated],
        n_samples,
        seed,
    };
    let t0 = std::time::Instant::now();
    let points = scaling_experiment(&cfg).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let mut worst: f64 = 0.0;
    for p in &points {
        let rel = p.median_infidelity / p.predicted_median - 1.0;
        worst = worst.max(rel.abs());
        println!(
            "n={:3} sigma={:<6} {:12?} med/pred={:+.3}",
            p.n_modes, p.sigma, p.kind, rel
        );
    }
    // ratio check per (n, sigma)
    let mut worst_ratio: f64 = 0.0;
    for pu in points.iter().filter(|p| p.kind == NoiseKind::Uncorrelated) {
        let pc = points
            .iter()
            .find(|p| {
                p.kind == NoiseKind::Correlated && p.n_modes == pu.n_modes && p.sigma == pu.sigma
            })
            .unwrap();
        let ratio = pc.median_infidelity / pu.median_infidelity;
        let rel = ratio / std::f64::consts::FRAC_1_SQRT_2 - 1.0;
        worst_ratio = worst_ratio.max(rel.abs());
        println!(
            "ratio n={:3} sigma={:<6} {:.4} rel={:+.3}",
            pu.n_modes, pu.sigma, ratio, rel
        );
    }
    println!("seed={seed} worst_cell={worst:.3} worst_ratio={worst_ratio:.3} elapsed={elapsed:.1}s");
}
