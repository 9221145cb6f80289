//! Stage-resolved photon transport through balanced meshes.
//!
//! One or two photons propagate through a stage schedule whose couplings
//! all sit at the 50:50 point, optionally perturbed by coherent splitter
//! noise and averaged over many circuit draws. After every stage the run
//! records the mode-occupation distribution, the per-mode probability of
//! finding two photons together, and the inverse participation ratio (IPR)
//! of the occupation distribution.
//!
//! IPR is this module's localization quantifier: it equals the mode count
//! for uniform spreading and small integers for concentrated states, so
//! "diffused" and "localized" regimes can be read off numerically rather
//! than visually. The self-similar schedule produces alternating regimes —
//! for 8 modes the occupation passes through an exactly uniform stage and
//! later re-concentrates onto two modes — while nearest-neighbor schedules
//! diffuse monotonically inside a light cone.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{evolve, OccupationVector};
use crate::mesh::{prune_to_depth, scf_layer, scf_stage_distances, Coupling, Topology};
use crate::mzi::noisy_block;
use crate::noise::NoiseModel;
use crate::numerics::ComplexMatrix;

/// Transport runs track at most two photons; larger Fock spaces are out of
/// scope for the stage-by-stage marginals recorded here.
pub const MAX_TRANSPORT_PHOTONS: u32 = 2;

/// Stage-by-stage transport observables, averaged over circuit draws.
///
/// Rows index stages (row `s` describes the state after stage `s + 1`),
/// columns index modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportRecord {
    pub n_modes: usize,
    pub stages: usize,
    pub n_photons: u32,
    /// Noise model the circuits were drawn from (records the seed).
    pub noise: NoiseModel,
    /// Number of circuit draws averaged into the heatmaps.
    pub n_circuits: usize,
    /// Mode-occupation distribution per stage: expected photon number per
    /// mode divided by the photon total, so each lossless row sums to 1.
    pub single_photon_heatmap: Vec<Vec<f64>>,
    /// Probability of finding both photons in the same mode, per mode.
    /// Identically zero for single-photon runs.
    pub coincidence_heatmap: Vec<Vec<f64>>,
    /// Total same-mode (bunching) probability per stage: the row sums of
    /// the coincidence heatmap.
    pub bunching_per_stage: Vec<f64>,
    /// Inverse participation ratio of each occupation row.
    pub ipr_per_stage: Vec<f64>,
}

/// Inverse participation ratio `1 / sum p_i^2` of a probability
/// distribution: the effective number of occupied modes (equal to the mode
/// count for a uniform distribution and 1 for a point mass).
pub fn ipr(probabilities: &[f64]) -> Result<f64> {
    let total: f64 = probabilities.iter().sum();
    if probabilities.is_empty() || (total - 1.0).abs() > 1e-6 {
        return Err(Error::Distribution(format!(
            "ipr needs a normalized distribution; probabilities sum to {total}"
        )));
    }
    if let Some(p) = probabilities.iter().find(|p| **p < -1e-12 || !p.is_finite()) {
        return Err(Error::Distribution(format!(
            "ipr needs nonnegative probabilities, found {p}"
        )));
    }
    Ok(1.0 / probabilities.iter().map(|p| p * p).sum::<f64>())
}

/// Balanced per-stage coupling layers realizing `topology` on `n_modes`
/// modes for `stages` stages.
///
/// The fractal schedule follows [`scf_stage_distances`]; the depth-pruned
/// family requires `stages` to equal its depth; nearest-neighbor schedules
/// alternate even and odd pairings indefinitely.
pub fn stage_layers(
    topology: Topology,
    n_modes: usize,
    stages: usize,
) -> Result<Vec<Vec<Coupling>>> {
    if stages == 0 {
        return Err(Error::Input("transport needs at least one stage".into()));
    }
    match topology {
        Topology::Scf => Ok(scf_stage_distances(n_modes, stages)?
            .into_iter()
            .map(|d| scf_layer(n_modes, d))
            .collect()),
        Topology::Pruned { depth } => {
            let mesh = prune_to_depth(depth)?;
            if n_modes != mesh.n_modes || stages != depth {
                return Err(Error::Input(format!(
                    "depth-{depth} pruned transport runs on {} modes for exactly {depth} \
                     stages, got {n_modes} modes / {stages} stages",
                    mesh.n_modes
                )));
            }
            Ok(mesh.layers)
        }
        Topology::Clements => {
            if n_modes < 2 {
                return Err(Error::Input(format!(
                    "nearest-neighbor transport needs >= 2 modes, got {n_modes}"
                )));
            }
            Ok((0..stages)
                .map(|s| {
                    (s % 2..n_modes.saturating_sub(1))
                        .step_by(2)
                        .map(|i| Coupling::new(i, i + 1, 0.0, 0.0))
                        .collect()
                })
                .collect())
        }
        Topology::Custom => Err(Error::Input(
            "transport needs a named stage schedule (fractal, pruned, or nearest-neighbor)"
                .into(),
        )),
    }
}

/// Propagates `input` through `stages` balanced layers of `topology`,
/// averaging the stage-by-stage observables over `n_circuits` noise draws.
///
/// Every coupling runs at 50:50 with the drawn splitter offsets applied;
/// draw order matches mesh traversal order, so a given `(seed, circuit)`
/// pair is reproducible. Inputs carry one or two photons.
pub fn run_transport(
    topology: Topology,
    n_modes: usize,
    stages: usize,
    input: &OccupationVector,
    noise: &NoiseModel,
    n_circuits: usize,
) -> Result<TransportRecord> {
    noise.validate()?;
    if input.n_modes() != n_modes {
        return Err(Error::Dimension(format!(
            "input occupies {} modes but the schedule has {n_modes}",
            input.n_modes()
        )));
    }
    let n_photons = input.n_photons();
    if n_photons == 0 {
        return Err(Error::Input("transport needs at least one photon".into()));
    }
    if n_photons > MAX_TRANSPORT_PHOTONS {
        return Err(Error::SizeLimit(format!(
            "transport tracks at most {MAX_TRANSPORT_PHOTONS} photons, got {n_photons}"
        )));
    }
    if n_circuits == 0 {
        return Err(Error::Input(
            "transport needs at least one circuit draw".into(),
        ));
    }
    let layers = stage_layers(topology, n_modes, stages)?;
    let n_couplings: usize = layers.iter().map(Vec::len).sum();

    let mut occupation = vec![vec![0.0; n_modes]; stages];
    let mut coincidence = vec![vec![0.0; n_modes]; stages];
    let weight = 1.0 / n_circuits as f64;
    for circuit in 0..n_circuits {
        let draws = noise.draws(circuit as u64, n_couplings);
        let mut u = ComplexMatrix::identity(n_modes);
        let mut k = 0;
        for (s, layer) in layers.iter().enumerate() {
            for c in layer {
                let d = draws[k];
                u.apply_pair_rows(&noisy_block(FRAC_PI_2, 0.0, d.alpha, d.beta), c.i, c.j);
                k += 1;
            }
            let dist = evolve(&u, input)?;
            for (i, occ) in dist.mode_occupancy().into_iter().enumerate() {
                occupation[s][i] += weight * occ / f64::from(n_photons);
            }
            if n_photons == 2 {
                for (i, p) in dist.count_probability(2).into_iter().enumerate() {
                    coincidence[s][i] += weight * p;
                }
            }
        }
    }

    let bunching_per_stage = coincidence.iter().map(|row| row.iter().sum()).collect();
    let ipr_per_stage = occupation
        .iter()
        .map(|row| ipr(row))
        .collect::<Result<Vec<f64>>>()?;
    Ok(TransportRecord {
        n_modes,
        stages,
        n_photons,
        noise: noise.clone(),
        n_circuits,
        single_photon_heatmap: occupation,
        coincidence_heatmap: coincidence,
        bunching_per_stage,
        ipr_per_stage,
    })
}
