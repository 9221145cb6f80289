//! Closed-form architecture cost models.
//!
//! Compares recirculating time-bin processors against spatial meshes on
//! four axes: hardware component count, throughput density (multiply-
//! accumulate operations per pass per hardware unit), compilation time
//! (how long one pass over all time bins takes to realize a full unitary),
//! and the per-bin optical loss budget.
//!
//! Loss formulas mirror [`crate::hwsim::loss_budget`] exactly for
//! compiled schedules without phase-trim rounds: `rounds` interferometer
//! and double-switch passes, `c·tau` meters of inner delay fiber per delay
//! slot, and one `c·tau·N`-meter feedback-loop traversal per round. The
//! recirculating architectures pay the outer loop `N` times, giving the
//! quadratic `c·tau·eta_o·N^2` term that dominates at large `N`; at
//! `N = 100`, `tau = 100 ps`, and 0.2 dB/km fiber it evaluates to 0.04 dB
//! (about 200 m of loop fiber). Compile time is `rounds · N · tau`; at
//! `N = 100` and `tau = 4.3 ps` the nearest-neighbor configuration takes
//! 43 ns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hwsim::HardwareConfig;

/// Architectures compared by the cost model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    /// Recirculating time-bin machine running nearest-neighbor layers.
    GgmClements,
    /// Recirculating time-bin machine running the fractal schedule from a
    /// power-of-two delay bank.
    GgmScf,
    /// Spatial mesh of nearest-neighbor interferometers.
    ClementsSpatial,
    /// Nested fiber-loop time-bin processor (half-rate throughput).
    MotesLoops,
    /// Cascade of per-stage nonlinear elements, one per mode.
    BouchardCascade,
}

impl Architecture {
    pub const ALL: [Architecture; 5] = [
        Architecture::GgmClements,
        Architecture::GgmScf,
        Architecture::ClementsSpatial,
        Architecture::MotesLoops,
        Architecture::BouchardCascade,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Architecture::GgmClements => "ggm_clements",
            Architecture::GgmScf => "ggm_scf",
            Architecture::ClementsSpatial => "clements_spatial",
            Architecture::MotesLoops => "motes_loops",
            Architecture::BouchardCascade => "bouchard_cascade",
        }
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| {
                Error::Input(format!(
                    "unknown architecture {s:?}; expected one of {}",
                    Architecture::ALL.map(|a| a.tag()).join(", ")
                ))
            })
    }
}

/// Breakdown of the hardware component count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentCounts {
    pub switches: usize,
    pub interferometers: usize,
    pub delay_lines: usize,
}

impl ComponentCounts {
    pub fn total(&self) -> usize {
        self.switches + self.interferometers + self.delay_lines
    }
}

/// Cost-model evaluation for one architecture at one size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub architecture: Architecture,
    pub n_modes: usize,
    /// Total programmable components; see `components` for the split.
    pub hardware_count: usize,
    pub components: ComponentCounts,
    /// Multiply-accumulate operations per pass per hardware unit.
    pub throughput_density: f64,
    /// Seconds to realize one full unitary.
    pub compile_time: f64,
    /// Per-bin optical loss of that realization, in dB.
    pub loss_db: f64,
}

fn log2_exact(n: usize) -> Result<usize> {
    if n >= 2 && n.is_power_of_two() {
        Ok(n.trailing_zeros() as usize)
    } else {
        Err(Error::Input(format!(
            "fractal configuration needs a power-of-two mode count >= 2, got {n}"
        )))
    }
}

/// Per-bin loss of a recirculating schedule: `rounds` interferometer and
/// double-switch passes, `inner_slots` delay-line slots of `c·tau` meters
/// each, and one loop traversal of `c·tau·n` meters per round.
fn recirculating_loss_db(hw: &HardwareConfig, n: usize, rounds: usize, inner_slots: f64) -> f64 {
    let meters_per_slot = hw.light_speed * hw.tau;
    let rounds_f = rounds as f64;
    rounds_f * (hw.eta_bs + 2.0 * hw.switch_loss)
        + inner_slots * meters_per_slot * hw.eta_i
        + rounds_f * (n as f64) * meters_per_slot * hw.eta_o
}

/// Evaluates the cost model for `arch` at `n` modes under `hw`.
///
/// Constants are concrete, not asymptotic: recirculating architectures run
/// `N` (nearest-neighbor) or `N - 1` (fractal) rounds of `N·tau` each, the
/// fractal delay budget is the self-similar schedule's exact slot total
/// `sum_k (N/2^(k+1))^2`, and the spatial mesh pays one interferometer per
/// coupling with no recirculation.
pub fn architecture_cost(
    arch: Architecture,
    n: usize,
    hw: &HardwareConfig,
) -> Result<CostReport> {
    hw.validate()?;
    if n < 2 {
        return Err(Error::Input(format!(
            "cost model needs at least 2 modes, got {n}"
        )));
    }
    let nf = n as f64;
    let pass_time = nf * hw.tau;
    let (components, throughput_density, compile_time, loss_db) = match arch {
        Architecture::GgmClements => (
            ComponentCounts {
                switches: 2,
                interferometers: 1,
                delay_lines: 1,
            },
            nf,
            nf * pass_time,
            recirculating_loss_db(hw, n, n, nf),
        ),
        Architecture::GgmScf => {
            let log2n = log2_exact(n)?;
            // Slot total of the self-similar schedule: distance n/2^(k+1)
            // occurs n/2^(k+1) times across the n - 1 stages.
            let inner_slots: usize = (0..log2n).map(|k| (n >> (1 + k)).pow(2)).sum();
            (
                ComponentCounts {
                    switches: 2,
                    interferometers: 1,
                    delay_lines: log2n,
                },
                nf / log2n as f64,
                (nf - 1.0) * pass_time,
                recirculating_loss_db(hw, n, n - 1, inner_slots as f64),
            )
        }
        Architecture::ClementsSpatial => (
            ComponentCounts {
                switches: 0,
                interferometers: n * (n - 1) / 2,
                delay_lines: 0,
            },
            1.0,
            // One light-flight through the n-layer mesh programs it.
            nf * hw.tau,
            nf * hw.eta_bs,
        ),
        Architecture::MotesLoops => (
            ComponentCounts {
                switches: 0,
                interferometers: 1,
                delay_lines: 2,
            },
            nf / 2.0,
            nf * pass_time,
            recirculating_loss_db(hw, n, n, nf),
        ),
        Architecture::BouchardCascade => (
            ComponentCounts {
                switches: 0,
                interferometers: n,
                delay_lines: 0,
            },
            nf,
            pass_time,
            // One pass through n stages, each with one bin of medium.
            nf * (hw.eta_bs + hw.light_speed * hw.tau * hw.eta_i),
        ),
    };
    Ok(CostReport {
        architecture: arch,
        n_modes: n,
        hardware_count: components.total(),
        components,
        throughput_density,
        compile_time,
        loss_db,
    })
}

/// Multiplexed matrix-product throughput query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacRateQuery {
    pub n_modes: usize,
    /// Time-bin spacing in seconds.
    pub tau: f64,
    /// Spatial copies stacked side by side.
    pub multiplex: usize,
}

impl MacRateQuery {
    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 2 {
            return Err(Error::Input(format!(
                "mac rate needs at least 2 modes, got {}",
                self.n_modes
            )));
        }
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Input(format!(
                "bin spacing must be positive, got {}",
                self.tau
            )));
        }
        if self.multiplex == 0 {
            return Err(Error::Input("multiplex factor must be >= 1".into()));
        }
        Ok(())
    }
}

/// Multiply-accumulate operations per second for an `M`-way multiplexed
/// stack on `N` bins: `M^2 N^2` operations per compiled unitary divided by
/// the `N^2 tau` compile time — `M^2 / tau`, exactly inverse in the bin
/// width and independent of `N`.
pub fn mac_rate(q: &MacRateQuery) -> Result<f64> {
    q.validate()?;
    let m = q.multiplex as f64;
    Ok(m * m / q.tau)
}
