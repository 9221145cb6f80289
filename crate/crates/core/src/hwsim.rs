//! Time-domain simulator of the physical machine.
//!
//! [`simulate`] steps a schedule slot by slot: bins enter the input switch,
//! traverse the selectable delay or the direct arm, interfere (or pass
//! through) at the interferometer, re-serialize, and either feed back or
//! drop to the tap. Amplitudes accumulate loss per element traversed, so
//! the returned matrix is the realized end-to-end transfer over time-bin
//! modes — unitary only when every loss knob is zero.
//!
//! Conventions: dB-to-amplitude conversion is `10^(-dB/20)`; the inner
//! delay and the re-serialization delay are `d * tau * light_speed` meters
//! of fiber each (every bin traverses exactly one of the two per round);
//! the feedback loop holds the whole sequence, `n * tau * light_speed`
//! meters, and is traversed once per round by every bin because the tap
//! sits at its far end. An idle interferometer slot passes the direct arm
//! with the bar-point through amplitude (exactly 1 for lossless arms);
//! programmed couplings consume coherent-noise draws in slot order, which
//! matches the mesh's flat coupling order, so a lossless simulation under a
//! noise model reproduces [`crate::noise::noisy_unitary`] to rounding.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mzi::{self, MZIParams};
use crate::noise::NoiseModel;
use crate::numerics::ComplexMatrix;
use crate::schedule::{MziSlot, OutSwitchState, RoundKind, Schedule, SwitchState};
use crate::{Error, Result};

/// Physical parameters of one machine.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareConfig {
    /// Bin spacing in seconds (guard band included).
    pub tau: f64,
    /// Selectable delay lengths, in units of `tau`.
    pub delay_set: Vec<usize>,
    /// dB lost per interferometer pass.
    pub eta_bs: f64,
    /// dB per meter of delay fiber.
    pub eta_i: f64,
    /// dB per meter of feedback-loop fiber.
    pub eta_o: f64,
    /// Signal speed in fiber, m/s.
    pub light_speed: f64,
    /// Static interferometer imperfections applied to every pass.
    pub mzi: MZIParams,
    /// dB lost per switch pass (two passes per round).
    pub switch_loss: f64,
}

impl Default for HardwareConfig {
    fn default() -> Self {
        Self {
            tau: 100e-12,
            delay_set: vec![1],
            eta_bs: 0.0,
            eta_i: 0.0,
            eta_o: 0.0,
            light_speed: 2e8,
            mzi: MZIParams::default(),
            switch_loss: 0.0,
        }
    }
}

impl HardwareConfig {
    /// Lossless machine with the single unit delay that nearest-neighbour
    /// (Clements-style) programs need.
    pub fn ideal_clements(tau: f64) -> Self {
        Self {
            tau,
            ..Self::default()
        }
    }

    /// Lossless machine with the power-of-two delay bank
    /// `{1, 2, .., n/2}` that fractal programs on `n` modes need.
    pub fn ideal_scf(n_modes: usize, tau: f64) -> Result<Self> {
        if !n_modes.is_power_of_two() || n_modes < 2 {
            return Err(Error::Input(format!(
                "delay bank needs a power-of-two mode count, got {n_modes}"
            )));
        }
        let bank = (0..n_modes.trailing_zeros()).map(|k| 1usize << k).collect();
        Ok(Self {
            tau,
            delay_set: bank,
            ..Self::default()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::Input(format!("bin spacing {} not positive", self.tau)));
        }
        if !(self.light_speed.is_finite() && self.light_speed > 0.0) {
            return Err(Error::Input(format!(
                "light speed {} not positive",
                self.light_speed
            )));
        }
        for (name, v) in [
            ("eta_bs", self.eta_bs),
            ("eta_i", self.eta_i),
            ("eta_o", self.eta_o),
            ("switch_loss", self.switch_loss),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Input(format!("{name} = {v} must be >= 0")));
            }
        }
        if self.delay_set.is_empty() || self.delay_set.contains(&0) {
            return Err(Error::Input(
                "delay set must list at least one positive length".into(),
            ));
        }
        for (name, g) in [("gamma1", self.mzi.gamma1), ("gamma2", self.mzi.gamma2)] {
            if !(0.0..=1.0).contains(&g) {
                return Err(Error::Input(format!(
                    "{name} = {g} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    fn delay_meters(&self, d: usize) -> f64 {
        d as f64 * self.tau * self.light_speed
    }

    fn loop_meters(&self, n_modes: usize) -> f64 {
        n_modes as f64 * self.tau * self.light_speed
    }
}

/// Amplitude factor for a path loss in dB.
fn amp_from_db(db: f64) -> f64 {
    10f64.powf(-db / 20.0)
}

/// Per-component path loss (dB seen by each bin; uniform across bins by
/// construction of the schedules).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossBudget {
    pub mzi_db: f64,
    pub inner_delay_db: f64,
    pub outer_loop_db: f64,
    pub switch_db: f64,
    pub total_db: f64,
}

/// Closed-form per-bin loss budget of a schedule: one interferometer pass,
/// one `d`-slot delay traversal, two switch passes and one loop traversal
/// per round.
pub fn loss_budget(s: &Schedule, hw: &HardwareConfig) -> Result<LossBudget> {
    s.validate()?;
    hw.validate()?;
    let rounds = s.rounds.len() as f64;
    let delay_slots: usize = s.rounds.iter().map(|r| r.delay_length).sum();
    let mzi_db = rounds * hw.eta_bs;
    let inner_delay_db = hw.delay_meters(delay_slots) * hw.eta_i;
    let outer_loop_db = rounds * hw.loop_meters(s.n_modes) * hw.eta_o;
    let switch_db = 2.0 * rounds * hw.switch_loss;
    Ok(LossBudget {
        mzi_db,
        inner_delay_db,
        outer_loop_db,
        switch_db,
        total_db: mzi_db + inner_delay_db + outer_loop_db + switch_db,
    })
}

type Row = Vec<Complex64>;

fn scale_row(row: &mut Row, g: Complex64) {
    for a in row {
        *a *= g;
    }
}

/// Runs a schedule with zero coherent noise.
pub fn simulate_ideal(s: &Schedule, hw: &HardwareConfig) -> Result<ComplexMatrix> {
    simulate(s, hw, &NoiseModel::zero(), 0)
}

/// Slot-stepped simulation of a schedule; returns the realized transfer
/// matrix over time-bin modes (entry `(b, j)` maps input bin `j` to output
/// bin `b`).
///
/// `sample` selects the coherent-noise draw; programmed couplings consume
/// offsets in firing order. Phase-trim rounds apply calibrated settings and
/// draw no noise.
pub fn simulate(
    s: &Schedule,
    hw: &HardwareConfig,
    noise: &NoiseModel,
    sample: u64,
) -> Result<ComplexMatrix> {
    s.validate()?;
    hw.validate()?;
    noise.validate()?;
    let n = s.n_modes;
    let draws = noise.draws(sample, s.n_couplings());
    let mut next_draw = 0usize;

    let g_sw = Complex64::from(amp_from_db(hw.switch_loss));
    let g_bs = Complex64::from(amp_from_db(hw.eta_bs));
    let g_loop = Complex64::from(amp_from_db(hw.loop_meters(n) * hw.eta_o));
    // Idle slots pass the direct arm through the parked (bar-point)
    // interferometer; exactly 1 for lossless arms.
    let park = mzi::lossy_block(PI, 0.0, 0.0, 0.0, hw.mzi.gamma1, hw.mzi.gamma2)[1][1];

    let mut rows: Vec<Row> = (0..n)
        .map(|b| {
            let mut r = vec![Complex64::ZERO; n];
            r[b] = Complex64::ONE;
            r
        })
        .collect();
    let mut dropped: Vec<Option<Row>> = vec![None; n];

    for (ri, round) in s.rounds.iter().enumerate() {
        if !hw.delay_set.contains(&round.delay_length) {
            return Err(Error::Simulation(format!(
                "round {ri} needs delay {} but the hardware offers {:?}",
                round.delay_length, hw.delay_set
            )));
        }
        let d = round.delay_length;
        let g_delay = Complex64::from(amp_from_db(hw.delay_meters(d) * hw.eta_i));
        let mut arriving: Vec<Option<Row>> = rows.drain(..).map(Some).collect();
        let mut fed_back: Vec<Option<Row>> = vec![None; n];
        let mut inner: VecDeque<Option<(usize, Row)>> = (0..d).map(|_| None).collect();
        let mut reserial: VecDeque<Option<(usize, Row)>> = (0..d).map(|_| None).collect();

        for slot in 0..(n + 2 * d) {
            let from_delay = inner.pop_front().expect("inner FIFO holds d entries");
            let from_reserial = reserial.pop_front().expect("reserial FIFO holds d entries");

            // Input switch.
            let mut into_delay: Option<(usize, Row)> = None;
            let mut direct: Option<(usize, Row)> = None;
            if slot < n {
                let mut row = arriving[slot].take().expect("bin arrives at its own slot");
                scale_row(&mut row, g_sw);
                match round.switch1_states[slot] {
                    SwitchState::Cross => into_delay = Some((slot, row)),
                    SwitchState::Bar => direct = Some((slot, row)),
                }
            }
            inner.push_back(into_delay);

            // Interferometer.
            let top_in = from_delay.map(|(b, mut row)| {
                scale_row(&mut row, g_delay);
                (b, row)
            });
            let mut to_tap_rail: Option<(usize, Row)> = None; // undelayed output rail
            let mut into_reserial: Option<(usize, Row)> = None;
            match round.kind {
                RoundKind::Couplings => {
                    let setting = if slot < n {
                        round.mzi_settings[slot]
                    } else {
                        MziSlot::Idle
                    };
                    match setting {
                        MziSlot::Couple { theta, phi } => {
                            let (Some((bt, top)), Some((bb, bot))) = (top_in, direct) else {
                                return Err(Error::Simulation(format!(
                                    "round {ri} slot {slot}: coupling fired without both bins"
                                )));
                            };
                            if bt + d != bb {
                                return Err(Error::Simulation(format!(
                                    "round {ri} slot {slot}: bins {bt} and {bb} are not {d} apart"
                                )));
                            }
                            let dr = draws[next_draw];
                            next_draw += 1;
                            let t = mzi::lossy_block(
                                theta,
                                phi,
                                dr.alpha,
                                dr.beta,
                                hw.mzi.gamma1,
                                hw.mzi.gamma2,
                            );
                            let mut out_top = vec![Complex64::ZERO; n];
                            let mut out_bot = vec![Complex64::ZERO; n];
                            for k in 0..n {
                                out_top[k] = t[0][0] * top[k] + t[0][1] * bot[k];
                                out_bot[k] = t[1][0] * top[k] + t[1][1] * bot[k];
                            }
                            scale_row(&mut out_top, g_bs);
                            scale_row(&mut out_bot, g_bs);
                            to_tap_rail = Some((bt, out_top));
                            into_reserial = Some((bb, out_bot));
                        }
                        MziSlot::Idle => {
                            if let Some((b, _)) = top_in {
                                return Err(Error::Simulation(format!(
                                    "round {ri} slot {slot}: bin {b} left the delay with no coupling"
                                )));
                            }
                            if let Some((b, mut row)) = direct {
                                scale_row(&mut row, park * g_bs);
                                into_reserial = Some((b, row));
                            }
                        }
                    }
                }
                RoundKind::OutputPhases => {
                    if let Some((b, _)) = direct {
                        return Err(Error::Simulation(format!(
                            "round {ri}: bin {b} took the direct arm in a phase-trim round"
                        )));
                    }
                    if let Some((b, mut row)) = top_in {
                        let MziSlot::Couple { theta, phi } = round.mzi_settings[b] else {
                            return Err(Error::Simulation(format!(
                                "round {ri}: bin {b} has no phase trim"
                            )));
                        };
                        let t = mzi::lossy_block(
                            theta,
                            phi,
                            0.0,
                            0.0,
                            hw.mzi.gamma1,
                            hw.mzi.gamma2,
                        );
                        scale_row(&mut row, t[0][0] * g_bs);
                        to_tap_rail = Some((b, row));
                    }
                }
            }
            reserial.push_back(into_reserial);

            // Output switch: at most one rail carries a bin per slot.
            let delayed_rail = from_reserial.map(|(b, mut row)| {
                scale_row(&mut row, g_delay);
                (b, row)
            });
            if to_tap_rail.is_some() && delayed_rail.is_some() {
                return Err(Error::Simulation(format!(
                    "round {ri} slot {slot}: two bins collided at the output switch"
                )));
            }
            for (on_undelayed_rail, arrival) in
                [(true, to_tap_rail), (false, delayed_rail)]
            {
                let Some((b, mut row)) = arrival else { continue };
                let state = round.switch2_states[b];
                let rail_ok = match state {
                    OutSwitchState::Bar => on_undelayed_rail,
                    OutSwitchState::Cross => !on_undelayed_rail,
                    OutSwitchState::Drop => true,
                };
                if !rail_ok {
                    return Err(Error::Simulation(format!(
                        "round {ri}: bin {b} reached the output switch on the wrong rail"
                    )));
                }
                scale_row(&mut row, g_sw);
                scale_row(&mut row, g_loop);
                if state == OutSwitchState::Drop {
                    dropped[b] = Some(row);
                } else {
                    fed_back[b] = Some(row);
                }
            }
        }

        if ri == s.drop_round {
            break;
        }
        rows = fed_back
            .into_iter()
            .enumerate()
            .map(|(b, r)| {
                r.ok_or_else(|| {
                    Error::Simulation(format!("bin {b} lost after round {ri}"))
                })
            })
            .collect::<Result<_>>()?;
    }

    if s.rounds.is_empty() {
        return Ok(ComplexMatrix::identity(n));
    }
    let out_rows: Vec<Row> = dropped
        .into_iter()
        .enumerate()
        .map(|(b, r)| r.ok_or_else(|| Error::Simulation(format!("bin {b} never dropped"))))
        .collect::<Result<_>>()?;
    ComplexMatrix::new(n, n, out_rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{
        clements_decompose, clements_topology, prune_to_depth, scf_topology, MeshProgram,
        ScfVariant, Topology,
    };
    use crate::noise::{NoiseKind, NoiseModel};
    use crate::numerics::{
        distance_up_to_global_phase, haar_random_unitary, ComplexMatrix,
    };
    use crate::schedule::compile_schedule;
    use std::f64::consts::FRAC_PI_2;

    fn scf_hw(n: usize) -> HardwareConfig {
        HardwareConfig::ideal_scf(n, 1e-9).unwrap()
    }

    fn assert_matches_mesh(m: &MeshProgram, hw: &HardwareConfig) {
        let s = compile_schedule(m, hw).unwrap();
        let sim = simulate_ideal(&s, hw).unwrap();
        let want = m.unitary().unwrap();
        assert!(
            sim.max_abs_diff(&want) < 1e-12,
            "simulated transfer departs from the mesh by {}",
            sim.max_abs_diff(&want)
        );
    }

    #[test]
    fn simulation_reproduces_random_meshes_across_topologies() {
        for seed in 0..10 {
            for n in [4usize, 8, 16] {
                assert_matches_mesh(
                    &clements_topology(n).unwrap().randomized(seed),
                    &HardwareConfig::ideal_clements(1e-9),
                );
                assert_matches_mesh(
                    &scf_topology(n, ScfVariant::Minimal).unwrap().randomized(seed),
                    &scf_hw(n),
                );
            }
            for depth in 3..=7 {
                assert_matches_mesh(
                    &prune_to_depth(depth).unwrap().randomized(seed),
                    &scf_hw(8),
                );
            }
        }
    }

    #[test]
    fn output_phase_trims_realize_the_decomposed_unitary_exactly() {
        let target = haar_random_unitary(6, 77).unwrap();
        let m = clements_decompose(&target).unwrap();
        let hw = HardwareConfig::ideal_clements(1e-9);
        let s = compile_schedule(&m, &hw).unwrap();
        assert_eq!(s.n_rounds(), m.layers.len() + 1);
        let sim = simulate_ideal(&s, &hw).unwrap();
        assert!(sim.max_abs_diff(&m.unitary().unwrap()) < 1e-12);
        assert!(sim.max_abs_diff(&target) < 1e-12);
        assert!(distance_up_to_global_phase(&sim, &target).unwrap() < 1e-12);
    }

    #[test]
    fn lossless_noisy_simulation_equals_the_noisy_mesh() {
        let model = NoiseModel::new(NoiseKind::Correlated, 0.05, 31);
        let uncorr = NoiseModel::new(NoiseKind::Uncorrelated, 0.05, 32);
        for (m, hw) in [
            (
                scf_topology(8, ScfVariant::Minimal).unwrap().randomized(4),
                scf_hw(8),
            ),
            (
                clements_decompose(&haar_random_unitary(8, 5).unwrap()).unwrap(),
                HardwareConfig::ideal_clements(1e-9),
            ),
        ] {
            let s = compile_schedule(&m, &hw).unwrap();
            for noise in [&model, &uncorr] {
                for sample in [0u64, 9] {
                    let sim = simulate(&s, &hw, noise, sample).unwrap();
                    let want = crate::noise::noisy_unitary(&m, noise, sample).unwrap();
                    assert!(sim.max_abs_diff(&want) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hadamard_program_gives_flat_magnitudes_in_log2_rounds() {
        for n in [8usize, 16, 32] {
            let m = scf_topology(n, ScfVariant::Minimal)
                .unwrap()
                .uniformly_programmed(FRAC_PI_2, 0.0);
            let hw = scf_hw(n);
            let s = compile_schedule(&m, &hw).unwrap();
            assert_eq!(s.n_rounds(), n.trailing_zeros() as usize);
            let sim = simulate_ideal(&s, &hw).unwrap();
            let want = (n as f64).sqrt().recip();
            for b in 0..n {
                for j in 0..n {
                    assert!((sim[(b, j)].norm() - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn interferometer_loss_attenuates_every_column_per_round() {
        let m = scf_topology(8, ScfVariant::Minimal)
            .unwrap()
            .uniformly_programmed(FRAC_PI_2, 0.0);
        let hw = HardwareConfig {
            eta_bs: 0.1,
            ..scf_hw(8)
        };
        let s = compile_schedule(&m, &hw).unwrap();
        let sim = simulate_ideal(&s, &hw).unwrap();
        let want = 10f64.powf(-0.1 * 3.0 / 10.0);
        for p in sim.column_norms_sq() {
            assert!((p - want).abs() < 1e-10);
        }
    }

    #[test]
    fn per_pass_uniform_losses_factor_out_of_the_transfer() {
        // Interferometer, switch and loop losses hit every bin identically
        // each round, so they pull out as one scalar.
        let m = prune_to_depth(5).unwrap().randomized(21);
        let hw0 = scf_hw(8);
        let hw = HardwareConfig {
            eta_bs: 0.2,
            eta_o: 2e-4,
            switch_loss: 0.05,
            ..scf_hw(8)
        };
        let s = compile_schedule(&m, &hw).unwrap();
        let lossless = simulate_ideal(&compile_schedule(&m, &hw0).unwrap(), &hw0).unwrap();
        let lossy = simulate_ideal(&s, &hw).unwrap();
        let budget = loss_budget(&s, &hw).unwrap();
        let g = 10f64.powf(-budget.total_db / 20.0);
        let scaled = lossless.scale(g.into());
        assert!(lossy.max_abs_diff(&scaled) < 1e-10);
    }

    #[test]
    fn delay_fiber_loss_is_path_dependent_but_tracks_the_budget() {
        // A bin's direct-arm component skips the delay fiber that round, so
        // inner loss does not factor out; the closed-form budget is the
        // per-bin nominal figure and stays accurate to first order.
        let m = prune_to_depth(5).unwrap().randomized(21);
        let hw = HardwareConfig {
            eta_i: 1e-3,
            ..scf_hw(8)
        };
        let s = compile_schedule(&m, &hw).unwrap();
        let lossless =
            simulate_ideal(&compile_schedule(&m, &scf_hw(8)).unwrap(), &scf_hw(8)).unwrap();
        let lossy = simulate_ideal(&s, &hw).unwrap();
        let budget = loss_budget(&s, &hw).unwrap();
        let g2 = 10f64.powf(-budget.total_db / 10.0);
        let ratios: Vec<f64> = lossy
            .column_norms_sq()
            .iter()
            .zip(lossless.column_norms_sq())
            .map(|(a, b)| a / b / g2)
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, 0f64), |(lo, hi), &r| (lo.min(r), hi.max(r)));
        assert!(hi - lo > 1e-6, "expected path spread, got {lo}..{hi}");
        assert!(lo > 0.999 && hi < 1.001, "budget drifted: {lo}..{hi}");
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((mean - 1.0).abs() < 1e-3);
    }

    #[test]
    fn lossless_simulation_conserves_energy() {
        let m = clements_topology(8).unwrap().randomized(13);
        let hw = HardwareConfig::ideal_clements(1e-9);
        let sim = simulate_ideal(&compile_schedule(&m, &hw).unwrap(), &hw).unwrap();
        for p in sim.column_norms_sq() {
            assert!((p - 1.0).abs() < 1e-10);
        }
        assert!(sim.is_unitary(1e-10));
    }

    #[test]
    fn loop_loss_budget_hits_the_fiber_anchor() {
        // 100 bins at 100 ps and 0.2 dB/km: the loop holds 2 m of fiber,
        // traversed once per round over 100 rounds -> 0.04 dB.
        let hw = HardwareConfig {
            eta_o: 0.2e-3,
            ..HardwareConfig::ideal_clements(100e-12)
        };
        let mut m = clements_topology(100).unwrap().randomized(1);
        m.output_phases = vec![0.0; 100]; // keep the schedule at exactly 100 rounds
        let s = compile_schedule(&m, &hw).unwrap();
        let budget = loss_budget(&s, &hw).unwrap();
        assert!((budget.outer_loop_db - 0.04).abs() < 1e-9);
        assert_eq!(budget.mzi_db, 0.0);
        // The slot-stepper agrees with the closed form.
        let sim = simulate_ideal(&s, &hw).unwrap();
        let want = 10f64.powf(-budget.total_db / 10.0);
        for p in sim.column_norms_sq() {
            assert!((p - want).abs() < 1e-9);
        }
    }

    #[test]
    fn arm_imbalance_is_masked_by_ideal_couplers_and_exposed_by_offsets() {
        // With perfect 50:50 couplers every input column sees the average arm
        // transmission (g1^2 + g2^2)/2 regardless of the programmed angles;
        // coupler offsets break that symmetry and make loss path-dependent.
        let mut m = scf_topology(8, ScfVariant::Minimal).unwrap().randomized(3);
        m.output_phases = vec![0.0; 8];
        let hw = HardwareConfig {
            mzi: MZIParams {
                gamma1: 0.9,
                gamma2: 1.0,
                ..MZIParams::default()
            },
            ..scf_hw(8)
        };
        let s = compile_schedule(&m, &hw).unwrap();

        let spread_of = |mat: &ComplexMatrix| {
            let (lo, hi) = mat
                .column_norms_sq()
                .iter()
                .fold((f64::INFINITY, 0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
            (lo, hi)
        };

        let ideal = simulate_ideal(&s, &hw).unwrap();
        let (lo, hi) = spread_of(&ideal);
        assert!(hi - lo < 1e-12, "masking broken: {lo}..{hi}");
        let per_pass = (0.9f64.powi(2) + 1.0) / 2.0;
        assert!((hi - per_pass.powi(3)).abs() < 1e-12);

        let noise = NoiseModel::new(NoiseKind::Uncorrelated, 0.2, 11);
        let noisy = simulate(&s, &hw, &noise, 0).unwrap();
        let (lo, hi) = spread_of(&noisy);
        assert!(hi <= 1.0 + 1e-12);
        assert!(hi - lo > 1e-4, "expected path spread, got {lo}..{hi}");
    }

    #[test]
    fn zero_round_schedule_is_the_identity() {
        let m = MeshProgram::new(5, Topology::Custom, vec![], vec![0.0; 5]).unwrap();
        let hw = HardwareConfig::ideal_clements(1e-9);
        let s = compile_schedule(&m, &hw).unwrap();
        let sim = simulate_ideal(&s, &hw).unwrap();
        assert!(sim.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-15);
    }

    #[test]
    fn schedule_needing_an_absent_delay_fails_to_simulate() {
        let m = scf_topology(8, ScfVariant::Minimal).unwrap().randomized(2);
        let s = compile_schedule(&m, &scf_hw(8)).unwrap();
        let err = simulate_ideal(&s, &HardwareConfig::ideal_clements(1e-9)).unwrap_err();
        assert!(matches!(err, Error::Simulation(_)), "{err:?}");
    }

    #[test]
    fn config_validation_rejects_bad_parameters() {
        let mut hw = HardwareConfig::default();
        hw.tau = 0.0;
        assert!(hw.validate().is_err());
        let mut hw = HardwareConfig::default();
        hw.eta_i = -1.0;
        assert!(hw.validate().is_err());
        let mut hw = HardwareConfig::default();
        hw.delay_set.clear();
        assert!(hw.validate().is_err());
        let mut hw = HardwareConfig::default();
        hw.mzi.gamma1 = 1.5;
        assert!(hw.validate().is_err());
    }
}
