//! Coupling-layer mesh programs: the abstract circuit representation between
//! a target unitary and a hardware schedule.
//!
//! A [`MeshProgram`] is a list of layers, each a set of disjoint two-mode
//! couplings, followed by per-mode output phases. Supported topologies:
//!
//! * `clements`: n layers of alternating even/odd nearest-neighbour pairs,
//!   n(n-1)/2 couplings; programmed analytically by [`clements_decompose`].
//! * `scf`: sine-cosine fractal layers coupling mode pairs at power-of-two
//!   distances. The minimal variant has log2(n) layers (distances n/2 .. 1)
//!   and realizes flat-magnitude transforms; the fully expressive variant
//!   cycles the distance pattern out to n-1 layers and is programmed
//!   numerically by [`fit_mesh`].
//! * `pruned`: the first `depth` layers of the eight-mode fully expressive
//!   schedule, used by the Bell-measurement depth study.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;

use crate::mzi::{ideal_block, Block2};
use crate::numerics::{keyed_rng, ComplexMatrix, MAX_DIM};
use crate::{Error, Result};

const TAU: f64 = 2.0 * PI;

/// One programmable two-mode coupling inside a layer.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
    pub phi: f64,
}

impl Coupling {
    pub fn new(i: usize, j: usize, theta: f64, phi: f64) -> Self {
        Self {
            i,
            j,
            theta,
            phi: phi.rem_euclid(TAU),
        }
    }

    /// Pair distance `j - i`.
    pub fn distance(&self) -> usize {
        self.j - self.i
    }
}

/// Mesh family tag, preserved through serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Clements,
    Scf,
    Pruned { depth: usize },
    Custom,
}

/// Layered coupling program plus output phases.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MeshProgram {
    #[serde(rename = "n")]
    pub n_modes: usize,
    pub topology: Topology,
    pub layers: Vec<Vec<Coupling>>,
    pub output_phases: Vec<f64>,
}

impl MeshProgram {
    pub fn new(
        n_modes: usize,
        topology: Topology,
        layers: Vec<Vec<Coupling>>,
        output_phases: Vec<f64>,
    ) -> Result<Self> {
        let m = Self {
            n_modes,
            topology,
            layers,
            output_phases,
        };
        m.validate()?;
        Ok(m)
    }

    /// Checks the structural invariants: mode indices in range, `i < j`,
    /// no mode appears twice within a layer, couplings sorted by ascending
    /// `i` within each layer (the canonical storage order that fixes how
    /// noise draws and hardware slots line up), `theta` in `[0, pi]`, `phi`
    /// in `[0, 2 pi)`, and one output phase per mode.
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 || self.n_modes > MAX_DIM {
            return Err(Error::Program(format!(
                "mode count {} outside 1..={MAX_DIM}",
                self.n_modes
            )));
        }
        if self.output_phases.len() != self.n_modes {
            return Err(Error::Program(format!(
                "{} output phases for {} modes",
                self.output_phases.len(),
                self.n_modes
            )));
        }
        if !self.output_phases.iter().all(|p| p.is_finite()) {
            return Err(Error::Program("output phases must be finite".into()));
        }
        let mut seen = vec![usize::MAX; self.n_modes];
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.windows(2).any(|w| w[0].i >= w[1].i) {
                return Err(Error::Program(format!(
                    "layer {l} couplings not sorted by ascending first mode"
                )));
            }
            for c in layer {
                if c.i >= c.j || c.j >= self.n_modes {
                    return Err(Error::Program(format!(
                        "coupling ({}, {}) invalid for {} modes",
                        c.i, c.j, self.n_modes
                    )));
                }
                if seen[c.i] == l || seen[c.j] == l {
                    return Err(Error::Program(format!(
                        "layer {l} couples mode {} or {} twice",
                        c.i, c.j
                    )));
                }
                seen[c.i] = l;
                seen[c.j] = l;
                if !(-1e-12..=PI + 1e-12).contains(&c.theta) || !c.theta.is_finite() {
                    return Err(Error::Program(format!(
                        "theta {} outside [0, pi] in layer {l}",
                        c.theta
                    )));
                }
                if !(0.0..TAU + 1e-12).contains(&c.phi) || !c.phi.is_finite() {
                    return Err(Error::Program(format!(
                        "phi {} outside [0, 2 pi) in layer {l}",
                        c.phi
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_couplings(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Couplings in traversal order (layer by layer, ascending first mode).
    /// Noise draws are assigned in this order.
    pub fn flat_couplings(&self) -> impl Iterator<Item = &Coupling> {
        self.layers.iter().flatten()
    }

    /// Evaluates the mesh as a dense unitary: layers applied in listed
    /// order (earliest first), then the output phases.
    pub fn unitary(&self) -> Result<ComplexMatrix> {
        self.validate()?;
        let mut u = ComplexMatrix::identity(self.n_modes);
        for layer in &self.layers {
            for c in layer {
                u.apply_pair_rows(&ideal_block(c.theta, c.phi), c.i, c.j);
            }
        }
        for (r, p) in self.output_phases.iter().enumerate() {
            u.scale_row(r, Complex64::from_polar(1.0, *p));
        }
        Ok(u)
    }

    /// Applies the mesh to a state vector in place (no validation).
    pub fn apply_to_state(&self, amps: &mut [Complex64]) {
        debug_assert_eq!(amps.len(), self.n_modes);
        for layer in &self.layers {
            for c in layer {
                let t = ideal_block(c.theta, c.phi);
                let (a, b) = (amps[c.i], amps[c.j]);
                amps[c.i] = t[0][0] * a + t[0][1] * b;
                amps[c.j] = t[1][0] * a + t[1][1] * b;
            }
        }
        for (a, p) in amps.iter_mut().zip(&self.output_phases) {
            *a *= Complex64::from_polar(1.0, *p);
        }
    }

    /// Copy of the mesh with every coupling programmed to `(theta, phi)`.
    pub fn uniformly_programmed(&self, theta: f64, phi: f64) -> Self {
        let mut out = self.clone();
        for layer in &mut out.layers {
            for c in layer {
                c.theta = theta;
                c.phi = phi.rem_euclid(TAU);
            }
        }
        out
    }

    /// Copy with uniform settings applied to the listed layers only.
    pub fn with_layers_programmed(&self, layer_ids: &[usize], theta: f64, phi: f64) -> Self {
        let mut out = self.clone();
        for &l in layer_ids {
            for c in &mut out.layers[l] {
                c.theta = theta;
                c.phi = phi.rem_euclid(TAU);
            }
        }
        out
    }

    /// Distances used by each layer, deduplicated per layer.
    pub fn layer_distances(&self) -> Vec<Vec<usize>> {
        self.layers
            .iter()
            .map(|layer| {
                let mut ds: Vec<usize> = layer.iter().map(Coupling::distance).collect();
                ds.sort_unstable();
                ds.dedup();
                ds
            })
            .collect()
    }

    /// Random settings on the same topology: `theta ~ U[0, pi]`,
    /// `phi ~ U[0, 2 pi)`, output phases `~ U[0, 2 pi)`.
    pub fn randomized(&self, seed: u64) -> Self {
        let mut rng = keyed_rng(seed, 0x6d65_7368, 0);
        let mut out = self.clone();
        for layer in &mut out.layers {
            for c in layer {
                c.theta = rng.random::<f64>() * PI;
                c.phi = rng.random::<f64>() * TAU;
            }
        }
        for p in &mut out.output_phases {
            *p = rng.random::<f64>() * TAU;
        }
        out
    }
}

/// Rectangular nearest-neighbour topology: `n` layers alternating
/// even-aligned and odd-aligned pairs, `n(n-1)/2` couplings, all angles zero.
pub fn clements_topology(n: usize) -> Result<MeshProgram> {
    if n < 2 {
        return Err(Error::Input(format!("clements topology needs n >= 2, got {n}")));
    }
    let layers = (0..n)
        .map(|l| {
            (l % 2..n.saturating_sub(1))
                .step_by(2)
                .map(|i| Coupling::new(i, i + 1, 0.0, 0.0))
                .collect()
        })
        .collect();
    MeshProgram::new(n, Topology::Clements, layers, vec![0.0; n])
}

/// One fractal layer on `n` modes: pairs `(i, i + d)` for every `i` with
/// `(i mod 2d) < d`, covering all modes when `d` divides `n/2`.
pub fn scf_layer(n: usize, distance: usize) -> Vec<Coupling> {
    (0..n)
        .filter(|i| (i % (2 * distance)) < distance && i + distance < n)
        .map(|i| Coupling::new(i, i + distance, 0.0, 0.0))
        .collect()
}

fn require_power_of_two(n: usize) -> Result<u32> {
    if n >= 2 && n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::Input(format!(
            "fractal topology needs a power-of-two mode count >= 2, got {n}"
        )))
    }
}

/// Stage distance sequence of the fully expressive fractal schedule: stage
/// `L` (1-based) couples at distance `n >> (1 + v)` where `v` is the number
/// of trailing zero bits of `L` (reduced mod log2 n so the sequence extends
/// past `n - 1` stages). The sequence is self-similar — for n = 8 it reads
/// 4,2,4,1,4,2,4 — and `n - 1` stages of `n/2` couplings exhaust the full
/// `n(n-1)/2` budget. Hallmarks of this ordering (balanced couplings, one
/// photon): an 8-mode input is spread uniformly after stage 5 and confined
/// to two modes after stage 7; two photons entering modes 15 and 16 of a
/// 32-mode mesh first reach the same mode after stage 21.
pub fn scf_stage_distances(n: usize, stages: usize) -> Result<Vec<usize>> {
    let log2n = require_power_of_two(n)?;
    Ok((1..=stages)
        .map(|stage| n >> (1 + (stage.trailing_zeros() % log2n)))
        .collect())
}

/// Fractal mesh variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScfVariant {
    /// log2(n) stages, distances n/2 .. 1: the flat-transform depth.
    Minimal,
    /// n - 1 stages: enough couplings for arbitrary unitaries.
    Full,
}

/// Sine-cosine fractal topology on a power-of-two mode count. The minimal
/// variant visits each distance once, `n/2` down to `1`; the full variant
/// follows [`scf_stage_distances`].
pub fn scf_topology(n: usize, variant: ScfVariant) -> Result<MeshProgram> {
    let log2n = require_power_of_two(n)?;
    let distances = match variant {
        ScfVariant::Minimal => (0..log2n).map(|k| n >> (1 + k)).collect(),
        ScfVariant::Full => scf_stage_distances(n, n - 1)?,
    };
    let layers = distances.into_iter().map(|d| scf_layer(n, d)).collect();
    MeshProgram::new(n, Topology::Scf, layers, vec![0.0; n])
}

/// Depth-pruned eight-mode fractal family: the minimal distance cycle
/// `4, 2, 1` repeated for `depth` stages. Depth 3 is the minimal mesh;
/// each extra stage appends the next layer of the cycle, so programs form
/// a chain under inclusion (unlike the self-similar full schedule, which
/// is not a chain extension of the minimal mesh).
pub fn prune_to_depth(depth: usize) -> Result<MeshProgram> {
    const N: usize = 8;
    if !(3..=7).contains(&depth) {
        return Err(Error::Depth {
            got: depth,
            min: 3,
            max: 7,
        });
    }
    let layers = (0..depth)
        .map(|s| scf_layer(N, N >> (1 + (s % 3))))
        .collect();
    MeshProgram::new(N, Topology::Pruned { depth }, layers, vec![0.0; N])
}

fn dagger_block(t: &Block2) -> Block2 {
    [
        [t[0][0].conj(), t[1][0].conj()],
        [t[0][1].conj(), t[1][1].conj()],
    ]
}

/// Packs an ordered coupling sequence into layers as early as possible,
/// commuting only mode-disjoint couplings; preserves the realized product.
fn pack_layers(n: usize, couplings: impl IntoIterator<Item = Coupling>) -> Vec<Vec<Coupling>> {
    let mut next_free = vec![0usize; n];
    let mut layers: Vec<Vec<Coupling>> = Vec::new();
    for c in couplings {
        let l = next_free[c.i].max(next_free[c.j]);
        if l == layers.len() {
            layers.push(Vec::new());
        }
        layers[l].push(c);
        next_free[c.i] = l + 1;
        next_free[c.j] = l + 1;
    }
    for layer in &mut layers {
        layer.sort_by_key(|c| c.i);
    }
    layers
}

/// Decomposes a unitary into a nearest-neighbour rectangular mesh.
///
/// Off-diagonal elements are nulled diagonal by diagonal, alternating
/// column operations (acting from the output side) and row operations
/// (acting from the input side); the input-side factors are then commuted
/// through the residual diagonal so all couplings act before the output
/// phases. Exact up to floating point: reconstruction error is at the
/// 1e-13 scale for n <= 32.
pub fn clements_decompose(u: &ComplexMatrix) -> Result<MeshProgram> {
    if !u.is_square() {
        return Err(Error::Dimension(format!(
            "decomposition needs a square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    let n = u.rows();
    if !u.is_unitary(1e-10) {
        return Err(Error::Input(
            "decomposition target is not unitary within 1e-10".into(),
        ));
    }
    if n == 1 {
        return MeshProgram::new(1, Topology::Clements, vec![], vec![u[(0, 0)].arg()]);
    }

    let mut v = u.clone();
    // (modes, theta, phi) in performance order.
    let mut right_ops: Vec<(usize, f64, f64)> = Vec::new();
    let mut left_ops: Vec<(usize, f64, f64)> = Vec::new();

    for k in 0..n - 1 {
        for j in 0..=k {
            if k % 2 == 0 {
                // Null v[r, c] with a column operation on (c, c+1).
                let r = n - 1 - j;
                let c = k - j;
                let theta = 2.0 * v[(r, c + 1)].norm().atan2(v[(r, c)].norm());
                let phi = (v[(r, c)].arg() - v[(r, c + 1)].arg() - PI).rem_euclid(TAU);
                v.apply_pair_cols(&dagger_block(&ideal_block(theta, phi)), c, c + 1);
                debug_assert!(v[(r, c)].norm() < 1e-9);
                right_ops.push((c, theta, phi));
            } else {
                // Null v[r, c] with a row operation on (r-1, r).
                let r = n - 1 - k + j;
                let c = j;
                let theta = 2.0 * v[(r - 1, c)].norm().atan2(v[(r, c)].norm());
                let phi = (v[(r, c)].arg() - v[(r - 1, c)].arg()).rem_euclid(TAU);
                v.apply_pair_rows(&ideal_block(theta, phi), r - 1, r);
                debug_assert!(v[(r, c)].norm() < 1e-9);
                left_ops.push((r - 1, theta, phi));
            }
        }
    }

    // v is now diagonal with unit-modulus entries.
    let mut diag: Vec<Complex64> = (0..n).map(|i| v[(i, i)]).collect();
    debug_assert!(diag.iter().all(|d| (d.norm() - 1.0).abs() < 1e-9));

    // U = L_1^+ .. L_p^+ D R_q .. R_1. Absorb input-side factors into the
    // diagonal, innermost first: T(theta, phi)^+ diag(a, b) =
    // diag(-e^{-i theta} e^{-i phi} b, -e^{-i theta} b) T(theta, arg(a/b)).
    let mut absorbed: Vec<(usize, f64, f64)> = Vec::with_capacity(left_ops.len());
    for &(m, theta, phi) in left_ops.iter().rev() {
        let (a, b) = (diag[m], diag[m + 1]);
        let phase = -Complex64::from_polar(1.0, -theta);
        diag[m] = phase * Complex64::from_polar(1.0, -phi) * b;
        diag[m + 1] = phase * b;
        absorbed.push((m, theta, (a.arg() - b.arg()).rem_euclid(TAU)));
    }

    // Application order: all column ops first, then the absorbed row ops.
    let ordered = right_ops
        .into_iter()
        .chain(absorbed)
        .map(|(m, theta, phi)| Coupling::new(m, m + 1, theta.clamp(0.0, PI), phi));
    let layers = pack_layers(n, ordered);
    let output_phases = diag.iter().map(|d| d.arg()).collect();
    MeshProgram::new(n, Topology::Clements, layers, output_phases)
}

/// Options for numerical mesh programming.
#[derive(Clone, Copy, Debug)]
pub struct FitOptions {
    pub max_iters: usize,
    pub restarts: usize,
    /// Convergence threshold on the squared Frobenius residual.
    pub tolerance: f64,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iters: 30_000,
            restarts: 8,
            tolerance: 1e-9,
            learning_rate: 0.08,
            seed: 0,
        }
    }
}

/// Internal parameter vector: one (x, phi) per coupling with
/// `theta = pi (1 - cos x) / 2` keeping theta in range, plus output phases.
struct FitParams {
    x: Vec<f64>,
    phi: Vec<f64>,
    out: Vec<f64>,
}

fn fit_unitary(template: &MeshProgram, p: &FitParams) -> MeshProgram {
    let mut mesh = template.clone();
    let mut k = 0;
    for layer in &mut mesh.layers {
        for c in layer {
            c.theta = (PI * (1.0 - p.x[k].cos()) / 2.0).clamp(0.0, PI);
            c.phi = p.phi[k].rem_euclid(TAU);
            k += 1;
        }
    }
    mesh.output_phases = p.out.iter().map(|v| v.rem_euclid(TAU)).collect();
    mesh
}

/// Squared-residual objective and its analytic gradient.
fn fit_objective(
    template: &MeshProgram,
    target: &ComplexMatrix,
    p: &FitParams,
) -> (f64, FitParams) {
    let n = template.n_modes;
    let n_layers = template.layers.len();
    let mesh = fit_unitary(template, p);

    // Forward prefixes a[k] = L_k .. L_1 (a[0] = I).
    let mut prefixes: Vec<ComplexMatrix> = Vec::with_capacity(n_layers + 1);
    prefixes.push(ComplexMatrix::identity(n));
    for layer in &mesh.layers {
        let mut m = prefixes.last().unwrap().clone();
        for c in layer {
            m.apply_pair_rows(&ideal_block(c.theta, c.phi), c.i, c.j);
        }
        prefixes.push(m);
    }
    // Full product with output phases.
    let mut full = prefixes[n_layers].clone();
    for (r, ph) in mesh.output_phases.iter().enumerate() {
        full.scale_row(r, Complex64::from_polar(1.0, *ph));
    }
    let delta = full.sub(target);
    let f = delta.frobenius_norm_sq();

    // Backward suffixes b[k] = D L_K .. L_{k+1} (b[K] = D).
    let mut suffixes: Vec<ComplexMatrix> =
        vec![ComplexMatrix::identity(n); n_layers + 1];
    let mut b = ComplexMatrix::identity(n);
    for (r, ph) in mesh.output_phases.iter().enumerate() {
        b.scale_row(r, Complex64::from_polar(1.0, *ph));
    }
    suffixes[n_layers] = b.clone();
    for k in (0..n_layers).rev() {
        let mut m = suffixes[k + 1].clone();
        // Multiply by L_{k+1} from the right: column operations.
        for c in &mesh.layers[k] {
            m.apply_pair_cols(&ideal_block(c.theta, c.phi), c.i, c.j);
        }
        suffixes[k] = m;
    }

    let gdag = delta.dagger();
    let mut grad = FitParams {
        x: vec![0.0; p.x.len()],
        phi: vec![0.0; p.phi.len()],
        out: vec![0.0; p.out.len()],
    };
    let mut flat = 0usize;
    for (k, layer) in mesh.layers.iter().enumerate() {
        // z = A_{k-1} (M - U)^+ B_k  (layer index k is 1-based here).
        let z = prefixes[k].mul(&gdag).mul(&suffixes[k + 1]);
        for c in layer {
            let half = c.theta / 2.0;
            let (s, cs) = half.sin_cos();
            let pre = Complex64::i() * Complex64::from_polar(1.0, half);
            let ephi = Complex64::from_polar(1.0, c.phi);
            let t = ideal_block(c.theta, c.phi);
            // dT/dtheta = (i/2) T + pre * (1/2) [[e^{i phi} c, -s], [-e^{i phi} s, -c]]
            let dt_theta = [
                [
                    Complex64::i() * 0.5 * t[0][0] + pre * 0.5 * ephi * cs,
                    Complex64::i() * 0.5 * t[0][1] - pre * 0.5 * s,
                ],
                [
                    Complex64::i() * 0.5 * t[1][0] - pre * 0.5 * ephi * s,
                    Complex64::i() * 0.5 * t[1][1] - pre * 0.5 * cs,
                ],
            ];
            let dt_phi = [
                [Complex64::i() * t[0][0], Complex64::ZERO],
                [Complex64::i() * t[1][0], Complex64::ZERO],
            ];
            let contract = |dt: &Block2| -> f64 {
                2.0 * (z[(c.i, c.i)] * dt[0][0]
                    + z[(c.i, c.j)] * dt[1][0]
                    + z[(c.j, c.i)] * dt[0][1]
                    + z[(c.j, c.j)] * dt[1][1])
                    .re
            };
            let dtheta_dx = PI / 2.0 * p.x[flat].sin();
            grad.x[flat] = contract(&dt_theta) * dtheta_dx;
            grad.phi[flat] = contract(&dt_phi);
            flat += 1;
        }
    }
    for r in 0..n {
        let mut acc = 0.0;
        for c2 in 0..n {
            acc += (delta[(r, c2)].conj() * Complex64::i() * full[(r, c2)]).re;
        }
        grad.out[r] = 2.0 * acc;
    }
    (f, grad)
}

/// Result of numerical mesh programming.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub mesh: MeshProgram,
    /// Final squared Frobenius residual.
    pub residual: f64,
    pub iterations: usize,
    pub restarts_used: usize,
}

/// Programs a mesh topology to realize `target` by minimizing the squared
/// Frobenius distance with Adam over analytic gradients, restarting from
/// fresh random settings until the residual passes `opts.tolerance`.
pub fn fit_mesh(
    template: &MeshProgram,
    target: &ComplexMatrix,
    opts: &FitOptions,
) -> Result<FitResult> {
    let fit = fit_mesh_best_effort(template, target, opts)?;
    if fit.residual > opts.tolerance {
        return Err(Error::NoConvergence(fit.residual));
    }
    Ok(fit)
}

/// Like [`fit_mesh`], but keeps the best parameters found even when the
/// residual never reaches `opts.tolerance` — the caller inspects
/// [`FitResult::residual`]. This is how depth-limited topologies are
/// programmed toward targets they cannot express exactly.
pub fn fit_mesh_best_effort(
    template: &MeshProgram,
    target: &ComplexMatrix,
    opts: &FitOptions,
) -> Result<FitResult> {
    template.validate()?;
    if !target.is_square() || target.rows() != template.n_modes {
        return Err(Error::Dimension(format!(
            "target is {}x{} but mesh has {} modes",
            target.rows(),
            target.cols(),
            template.n_modes
        )));
    }
    if !target.is_unitary(1e-10) {
        return Err(Error::Input("fit target is not unitary within 1e-10".into()));
    }
    let n_params = template.n_couplings();
    let mut best: Option<(f64, FitParams, usize, usize)> = None;

    for restart in 0..opts.restarts.max(1) {
        let mut rng = keyed_rng(opts.seed, 0x6669_74, restart as u64);
        let mut p = FitParams {
            x: (0..n_params)
                .map(|_| 0.15 + rng.random::<f64>() * (PI - 0.3))
                .collect(),
            phi: (0..n_params).map(|_| rng.random::<f64>() * TAU).collect(),
            out: (0..template.n_modes)
                .map(|_| rng.random::<f64>() * TAU)
                .collect(),
        };
        let dim = n_params * 2 + template.n_modes;
        let (mut m1, mut m2) = (vec![0.0; dim], vec![0.0; dim]);
        let (b1, b2, eps): (f64, f64, f64) = (0.9, 0.999, 1e-9);
        let mut f_last = f64::INFINITY;
        let mut iters = 0;
        for t in 1..=opts.max_iters {
            let (f, g) = fit_objective(template, target, &p);
            f_last = f;
            iters = t;
            if f < opts.tolerance {
                break;
            }
            // Decay the step once the residual is small to polish the tail.
            let lr = if f < 1e-6 {
                opts.learning_rate * 0.1
            } else {
                opts.learning_rate
            };
            let flat_g: Vec<f64> = g
                .x
                .iter()
                .chain(g.phi.iter())
                .chain(g.out.iter())
                .copied()
                .collect();
            let bc1 = 1.0 - b1.powi(t as i32);
            let bc2 = 1.0 - b2.powi(t as i32);
            for (d, gd) in flat_g.iter().enumerate() {
                m1[d] = b1 * m1[d] + (1.0 - b1) * gd;
                m2[d] = b2 * m2[d] + (1.0 - b2) * gd * gd;
                let step = lr * (m1[d] / bc1) / ((m2[d] / bc2).sqrt() + eps);
                let slot = if d < n_params {
                    &mut p.x[d]
                } else if d < 2 * n_params {
                    &mut p.phi[d - n_params]
                } else {
                    &mut p.out[d - 2 * n_params]
                };
                *slot -= step;
            }
        }
        let better = best.as_ref().map_or(true, |(bf, ..)| f_last < *bf);
        if better {
            best = Some((f_last, p, iters, restart + 1));
        }
        if f_last < opts.tolerance {
            break;
        }
    }

    let (residual, p, iterations, restarts_used) = best.expect("at least one restart");
    Ok(FitResult {
        mesh: fit_unitary(template, &p),
        residual,
        iterations,
        restarts_used,
    })
}
