use ggm_core::mesh::{scf_layer, scf_topology, MeshProgram, ScfVariant, Topology};
use nalgebra::DMatrix;

fn jacobian_svs(template: &MeshProgram, seed: u64) -> Vec<f64> {
    let m0 = template.randomized(seed);
    let n = m0.n_modes;
    let h = 1e-5;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let eval = |m: &MeshProgram| -> Vec<f64> {
        let u = m.unitary().unwrap();
        let mut v = Vec::with_capacity(2 * n * n);
        for r in 0..n {
            for c in 0..n {
                v.push(u[(r, c)].re);
                v.push(u[(r, c)].im);
            }
        }
        v
    };
    let mut push_fd = |plus: &MeshProgram, minus: &MeshProgram| {
        let (a, b) = (eval(plus), eval(minus));
        columns.push(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect());
    };
    for l in 0..m0.layers.len() {
        for k in 0..m0.layers[l].len() {
            for which in 0..2 {
                let mut p = m0.clone();
                let mut q = m0.clone();
                if which == 0 {
                    p.layers[l][k].theta += h;
                    q.layers[l][k].theta -= h;
                } else {
                    p.layers[l][k].phi += h;
                    q.layers[l][k].phi -= h;
                }
                push_fd(&p, &q);
            }
        }
    }
    for r in 0..n {
        let mut p = m0.clone();
        let mut q = m0.clone();
        p.output_phases[r] += h;
        q.output_phases[r] -= h;
        push_fd(&p, &q);
    }
    let rows = columns[0].len();
    let j = DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r]);
    let mut sv: Vec<f64> = j.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

fn main() {
    let ruler = scf_topology(8, ScfVariant::Full).unwrap();
    let cyclic = MeshProgram::new(
        8,
        Topology::Custom,
        [4usize, 2, 1, 4, 2, 1, 4]
            .iter()
            .map(|&d| scf_layer(8, d))
            .collect(),
        vec![0.0; 8],
    )
    .unwrap();
    for (name, t) in [("ruler ", &ruler), ("cyclic", &cyclic)] {
        for seed in [3, 11] {
            let sv = jacobian_svs(t, seed);
            let rank = sv.iter().filter(|s| **s > 1e-7 * sv[0]).count();
            println!(
                "{name} seed {seed}: params={} rank={rank} sv[0]={:.3e} sv[62]={:.3e} sv[63]={:.3e}",
                sv.len(),
                sv[0],
                sv[62],
                sv[63]
            );
        }
    }
}
