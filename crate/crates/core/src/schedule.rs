//! Hardware schedules: the per-round, per-slot program the physical machine
//! executes, and the compiler that lowers a [`MeshProgram`] onto it.
//!
//! Machine model: a sequence of `n` time bins (bin 0 earliest, one bin per
//! slot of width `tau`) circulates through
//!
//! ```text
//! switch1 --> selectable delay (d slots) --\
//!         \-> direct arm ------------------ MZI --> direct ----------\
//!                                               \-> re-serialization  switch2 --> loop --> (tap)
//!                                                   delay (d slots) -/
//! ```
//!
//! One round realizes one mesh layer whose couplings all share a single
//! distance `d`: switch1 sends each pair-leading bin `i` into the delay so it
//! meets its partner `i + d` at the interferometer, after which the trailing
//! bin is re-serialized through the fixed output-side delay. Idle bins take
//! the direct arm and the output-side delay. Every bin therefore lags by
//! exactly `d` slots per round and the sequence order is preserved, so bin
//! labels are stable across rounds.
//!
//! The output tap sits at the far end of the feedback loop: a dropped bin
//! still traverses the loop once, so a schedule with `r` rounds costs `r`
//! loop passes for every bin.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::hwsim::HardwareConfig;
use crate::mesh::MeshProgram;
use crate::{Error, Result};

/// Input-side switch state for one slot.
///
/// `Cross` routes the arriving bin into the selectable delay arm; `Bar`
/// sends it down the direct arm to the interferometer's second port.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchState {
    Bar,
    Cross,
}

/// Output-side switch state for one bin.
///
/// `Bar` passes the undelayed rail (the interferometer's first output) into
/// the feedback loop, `Cross` passes the re-serialized rail, and `Drop`
/// routes whichever rail carries the bin to the output tap at the end of
/// the loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutSwitchState {
    Bar,
    Cross,
    Drop,
}

/// Interferometer setting for one slot: either idle (the direct arm passes
/// straight through) or programmed with a splitting/phase pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MziSlot {
    Idle,
    Couple { theta: f64, phi: f64 },
}

/// What a round computes.
///
/// `Couplings` rounds realize one mesh layer; their `Couple` slots consume
/// noise draws in slot order. An `OutputPhases` round applies per-bin phase
/// trims with the interferometer parked at the bar point; the trims are
/// calibration constants, not programmed couplings, so they draw no noise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Couplings,
    OutputPhases,
}

/// One pass of the whole bin sequence through the hardware.
///
/// Slot indexing: `switch1_states[s]` is the input switch state while bin
/// `s` arrives (slot `s` relative to the round start). In a `Couplings`
/// round, `mzi_settings[t]` is the interferometer state at slot `t`; a
/// `Couple` there acts on the delayed bin `t - d` and the direct bin `t`.
/// In an `OutputPhases` round `mzi_settings[b]` holds bin `b`'s trim
/// (applied when it exits the delay at slot `b + d`). `switch2_states[b]`
/// is the output switch state when bin `b` reaches it (slot `b + d`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub kind: RoundKind,
    /// Selected delay, in units of `tau`.
    pub delay_length: usize,
    pub switch1_states: Vec<SwitchState>,
    pub mzi_settings: Vec<MziSlot>,
    pub switch2_states: Vec<OutSwitchState>,
}

impl Round {
    /// Number of programmed couplings fired during this round.
    pub fn n_couplings(&self) -> usize {
        if self.kind != RoundKind::Couplings {
            return 0;
        }
        self.mzi_settings
            .iter()
            .filter(|m| matches!(m, MziSlot::Couple { .. }))
            .count()
    }

    fn validate(&self, n_modes: usize, index: usize, is_drop_round: bool) -> Result<()> {
        if self.delay_length == 0 {
            return Err(Error::Program(format!(
                "round {index} selects a zero-length delay"
            )));
        }
        for (name, len) in [
            ("switch1_states", self.switch1_states.len()),
            ("mzi_settings", self.mzi_settings.len()),
            ("switch2_states", self.switch2_states.len()),
        ] {
            if len != n_modes {
                return Err(Error::Program(format!(
                    "round {index}: {name} has {len} slots for {n_modes} bins"
                )));
            }
        }
        let drops = self
            .switch2_states
            .iter()
            .filter(|s| **s == OutSwitchState::Drop)
            .count();
        if is_drop_round && drops != n_modes {
            return Err(Error::Program(format!(
                "round {index} is the drop round but keeps {} bins circulating",
                n_modes - drops
            )));
        }
        if !is_drop_round && drops != 0 {
            return Err(Error::Program(format!(
                "round {index} drops {drops} bins before the drop round"
            )));
        }
        Ok(())
    }
}

/// Complete program for the machine: an ordered list of rounds over a fixed
/// bin count, with the final (drop) round routing every bin to the tap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub n_modes: usize,
    pub rounds: Vec<Round>,
    /// Index of the round whose output switch drops every bin. Equals
    /// `rounds.len() - 1` for non-empty schedules and 0 for empty ones
    /// (bins pass straight to the output).
    pub drop_round: usize,
}

impl Schedule {
    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Delay selected by each round, in units of `tau`.
    pub fn delay_lengths(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.delay_length).collect()
    }

    /// Total programmed couplings across all rounds (phase trims excluded).
    pub fn n_couplings(&self) -> usize {
        self.rounds.iter().map(Round::n_couplings).sum()
    }

    /// Structural checks: slot vectors sized to the bin count, positive
    /// delays, and drops confined to (and covering) the drop round.
    pub fn validate(&self) -> Result<()> {
        if self.n_modes == 0 {
            return Err(Error::Program("schedule over zero bins".into()));
        }
        if self.rounds.is_empty() {
            if self.drop_round != 0 {
                return Err(Error::Program(
                    "empty schedule must drop at round 0".into(),
                ));
            }
            return Ok(());
        }
        if self.drop_round != self.rounds.len() - 1 {
            return Err(Error::Program(format!(
                "drop round {} is not the final round {}",
                self.drop_round,
                self.rounds.len() - 1
            )));
        }
        for (i, round) in self.rounds.iter().enumerate() {
            round.validate(self.n_modes, i, i == self.drop_round)?;
        }
        Ok(())
    }
}

/// Wall-clock and pass-count summary of a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStats {
    /// Seconds from the first bin entering to the last bin leaving:
    /// each round clocks the whole sequence through the loop (`n` slots)
    /// plus that round's delay lag.
    pub total_time: f64,
    /// Interferometer traversals summed over bins (`n` per round).
    pub mzi_passes: usize,
    /// Feedback-loop traversals per bin (one per round; the tap sits at the
    /// loop's far end).
    pub outer_loop_passes: usize,
}

/// Summarizes timing and pass counts for a schedule on given hardware.
pub fn schedule_stats(s: &Schedule, hw: &HardwareConfig) -> Result<ScheduleStats> {
    s.validate()?;
    hw.validate()?;
    let slots: usize = s
        .rounds
        .iter()
        .map(|r| s.n_modes + r.delay_length)
        .sum();
    Ok(ScheduleStats {
        total_time: slots as f64 * hw.tau,
        mzi_passes: s.n_modes * s.rounds.len(),
        outer_loop_passes: s.rounds.len(),
    })
}

fn trivial_phase(p: f64) -> bool {
    let r = p.rem_euclid(TAU);
    r.abs() < 1e-15 || TAU - r < 1e-15
}

/// Lowers a mesh program onto the hardware.
///
/// Each mesh layer becomes one `Couplings` round: all couplings in a layer
/// must share a single distance `d` (available in the hardware delay set),
/// pair-leading bins are routed into the delay, and the interferometer
/// fires at each trailing bin's slot. Layers left empty are skipped. If the
/// program carries nontrivial output phases, one extra `OutputPhases` round
/// realizes them as bar-point phase trims. The final round drops every bin
/// to the tap.
pub fn compile_schedule(m: &MeshProgram, hw: &HardwareConfig) -> Result<Schedule> {
    m.validate()?;
    hw.validate()?;
    let n = m.n_modes;
    let mut rounds = Vec::new();

    for (l, layer) in m.layers.iter().enumerate() {
        if layer.is_empty() {
            continue;
        }
        let distances: BTreeSet<usize> = layer.iter().map(|c| c.distance()).collect();
        if distances.len() > 1 {
            return Err(Error::Program(format!(
                "layer {l} mixes coupling distances {distances:?}; one round handles one distance"
            )));
        }
        let d = *distances.iter().next().expect("nonempty layer");
        if !hw.delay_set.contains(&d) {
            return Err(Error::MissingDelay {
                needed: d,
                available: hw.delay_set.clone(),
            });
        }
        let mut switch1 = vec![SwitchState::Bar; n];
        let mut mzi = vec![MziSlot::Idle; n];
        let mut switch2 = vec![OutSwitchState::Cross; n];
        for c in layer {
            switch1[c.i] = SwitchState::Cross;
            mzi[c.j] = MziSlot::Couple {
                theta: c.theta,
                phi: c.phi,
            };
            switch2[c.i] = OutSwitchState::Bar;
        }
        rounds.push(Round {
            kind: RoundKind::Couplings,
            delay_length: d,
            switch1_states: switch1,
            mzi_settings: mzi,
            switch2_states: switch2,
        });
    }

    if !m.output_phases.iter().copied().all(trivial_phase) {
        let d = *hw
            .delay_set
            .iter()
            .min()
            .expect("hardware validation guarantees a delay");
        let mzi = m
            .output_phases
            .iter()
            .map(|p| MziSlot::Couple {
                theta: PI,
                phi: (p - PI).rem_euclid(TAU),
            })
            .collect();
        rounds.push(Round {
            kind: RoundKind::OutputPhases,
            delay_length: d,
            switch1_states: vec![SwitchState::Cross; n],
            mzi_settings: mzi,
            switch2_states: vec![OutSwitchState::Bar; n],
        });
    }

    if let Some(last) = rounds.last_mut() {
        for s in &mut last.switch2_states {
            *s = OutSwitchState::Drop;
        }
    }
    let schedule = Schedule {
        n_modes: n,
        drop_round: rounds.len().saturating_sub(1),
        rounds,
    };
    schedule.validate()?;
    Ok(schedule)
}
