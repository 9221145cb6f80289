use ggm_core::bsm::{benchmark, build_bsm_circuit, decode_circuit, BsmArchitecture};

fn main() {
    for depth in 3..=7 {
        let circuit = build_bsm_circuit(depth).unwrap();
        let u = circuit.program.unitary().unwrap();
        let ideal = decode_circuit(&circuit, &u, 0.95).unwrap();
        println!(
            "depth {depth}: noiseless success={:.9} error={:?}",
            ideal.success_rate, ideal.error_given_heralded
        );
    }
    for depth in 3..=7 {
        let report = benchmark(BsmArchitecture::GreenMachine, depth, 0.02, 0.95, 400, 43).unwrap();
        println!(
            "depth {depth}: sigma=0.02 mean={:.5} q25={:.5} med={:.5} q75={:.5} | err={:?}",
            report.success.mean,
            report.success.q25,
            report.success.median,
            report.success.q75,
            report.error.map(|q| (q.mean * 1e5).round() / 1e5),
        );
    }
}
