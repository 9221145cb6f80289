//! Multi-photon interference engine.
//!
//! Evolves few-photon Fock states through an `n`-mode linear-optical
//! transfer matrix. Two independent routes are provided:
//!
//! * [`output_amplitude`] computes a single transition amplitude from the
//!   matrix permanent of the row/column-repeated submatrix
//!   (`Perm(U_{T,S}) / sqrt(prod T_i! prod S_j!)`),
//! * [`evolve`] builds the full output distribution by inserting photons one
//!   at a time (each creation operator maps through a column of `U`), which
//!   is much cheaper than a permanent per output pattern.
//!
//! The two agree to machine precision; the test suite pins that.
//!
//! Scope guards keep everything at desk scale: permanents up to 8x8, at most
//! 6 photons over 32 modes, and a one-million-pattern ceiling on the output
//! Hilbert space.
//!
//! Loss convention: a sub-unitary transfer matrix yields unnormalized
//! amplitudes whose total probability is the probability that *all* photons
//! survive (postselected loss). A uniform amplitude factor `sqrt(eta)` per
//! mode therefore scales every pattern probability by `eta^N_ph`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

/// Maximum matrix size accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 8;
/// Maximum total photon number accepted by [`evolve`].
pub const MAX_PHOTONS: u32 = 6;
/// Maximum mode count accepted by [`evolve`].
pub const MAX_MODES: usize = 32;
/// Maximum number of output patterns a distribution may hold.
pub const MAX_PATTERNS: usize = 1_000_000;

/// Factorials 0! ..= 8!, covering every occupation the size guards admit.
const FACTORIALS: [f64; 9] = [
    1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0,
];

fn factorial(k: u32) -> f64 {
    FACTORIALS[k as usize]
}

/// Photon counts per mode; a basis vector of the bosonic Fock space.
///
/// Ordered colexicographically (last differing mode decides) so that
/// map-backed distributions iterate in a deterministic, mode-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector {
    counts: Vec<u32>,
}

impl OccupationVector {
    pub fn new(counts: Vec<u32>) -> Self {
        Self { counts }
    }

    /// Vacuum over `n_modes` modes.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            counts: vec![0; n_modes],
        }
    }

    /// Single excitations in the given modes: `single_photons(4, &[1, 3])`
    /// is `|0101⟩`. Repeated modes stack photons.
    pub fn single_photons(n_modes: usize, modes: &[usize]) -> Result<Self> {
        let mut counts = vec![0u32; n_modes];
        for &m in modes {
            if m >= n_modes {
                return Err(Error::Input(format!(
                    "photon mode {m} out of range for {n_modes} modes"
                )));
            }
            counts[m] += 1;
        }
        Ok(Self { counts })
    }

    pub fn n_modes(&self) -> usize {
        self.counts.len()
    }

    pub fn n_photons(&self) -> u32 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, mode: usize) -> u32 {
        self.counts[mode]
    }

    /// Product of factorials of the per-mode counts.
    fn count_factorial_product(&self) -> f64 {
        self.counts.iter().map(|&c| factorial(c)).product()
    }

    fn with_added_photon(&self, mode: usize) -> Self {
        let mut counts = self.counts.clone();
        counts[mode] += 1;
        Self { counts }
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩")
    }
}

impl Ord for OccupationVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Colexicographic: the highest differing mode decides.
        match self.counts.len().cmp(&other.counts.len()) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.counts.iter().rev().zip(other.counts.iter().rev()) {
            match a.cmp(b) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl PartialOrd for OccupationVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All occupation patterns of `n_photons` photons over `n_modes` modes, in
/// colexicographic order.
pub fn enumerate_patterns(n_modes: usize, n_photons: u32) -> Vec<OccupationVector> {
    fn rec(out: &mut Vec<Vec<u32>>, prefix: &mut Vec<u32>, modes_left: usize, photons_left: u32) {
        if modes_left == 1 {
            prefix.push(photons_left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=photons_left {
            prefix.push(k);
            rec(out, prefix, modes_left - 1, photons_left - k);
            prefix.pop();
        }
    }
    if n_modes == 0 {
        return if n_photons == 0 {
            vec![OccupationVector::new(vec![])]
        } else {
            vec![]
        };
    }
    let mut raw = Vec::new();
    rec(&mut raw, &mut Vec::new(), n_modes, n_photons);
    let mut pats: Vec<OccupationVector> = raw.into_iter().map(OccupationVector::new).collect();
    pats.sort();
    pats
}

/// Number of patterns of `n_photons` photons over `n_modes` modes
/// (multiset coefficient), saturating instead of overflowing.
pub fn pattern_count(n_modes: usize, n_photons: u32) -> usize {
    // C(n_modes + n_photons - 1, n_photons)
    let mut acc: u128 = 1;
    for i in 0..n_photons as u128 {
        acc = acc.saturating_mul(n_modes as u128 + i) / (i + 1);
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// Sparse complex amplitudes over occupation patterns of a fixed photon
/// number, iterated in colexicographic pattern order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockDistribution {
    n_modes: usize,
    n_photons: u32,
    amplitudes: BTreeMap<OccupationVector, Complex64>,
}

impl FockDistribution {
    pub fn new(n_modes: usize, n_photons: u32) -> Self {
        Self {
            n_modes,
            n_photons,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_photons(&self) -> u32 {
        self.n_photons
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude of a pattern (zero when absent).
    pub fn amplitude(&self, pattern: &OccupationVector) -> Complex64 {
        self.amplitudes
            .get(pattern)
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    /// Probability of a pattern (zero when absent).
    pub fn probability(&self, pattern: &OccupationVector) -> f64 {
        self.amplitude(pattern).norm_sqr()
    }

    pub fn total_probability(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.amplitudes.iter()
    }

    fn insert_checked(&mut self, pattern: OccupationVector, amp: Complex64) -> Result<()> {
        if pattern.n_modes() != self.n_modes {
            return Err(Error::Dimension(format!(
                "pattern has {} modes, distribution has {}",
                pattern.n_modes(),
                self.n_modes
            )));
        }
        if pattern.n_photons() != self.n_photons {
            return Err(Error::Input(format!(
                "pattern has {} photons, distribution holds {}",
                pattern.n_photons(),
                self.n_photons
            )));
        }
        if self.amplitudes.len() >= MAX_PATTERNS && !self.amplitudes.contains_key(&pattern) {
            return Err(Error::SizeLimit(format!(
                "distribution exceeds {MAX_PATTERNS} patterns"
            )));
        }
        *self.amplitudes.entry(pattern).or_insert(Complex64::ZERO) += amp;
        Ok(())
    }

    /// Adds `amp` to the pattern's amplitude.
    pub fn add(&mut self, pattern: OccupationVector, amp: Complex64) -> Result<()> {
        self.insert_checked(pattern, amp)
    }

    /// Expected photon number per mode.
    pub fn mode_occupancy(&self) -> Vec<f64> {
        let mut occ = vec![0.0; self.n_modes];
        for (pat, amp) in &self.amplitudes {
            let p = amp.norm_sqr();
            for (o, &c) in occ.iter_mut().zip(pat.counts()) {
                *o += p * c as f64;
            }
        }
        occ
    }

    /// Probability that mode `i` holds exactly `k` photons, for each mode.
    pub fn count_probability(&self, k: u32) -> Vec<f64> {
        let mut out = vec![0.0; self.n_modes];
        for (pat, amp) in &self.amplitudes {
            let p = amp.norm_sqr();
            for (o, &c) in out.iter_mut().zip(pat.counts()) {
                if c == k {
                    *o += p;
                }
            }
        }
        out
    }

    /// Drops patterns whose probability is below `rel_floor` times the
    /// largest pattern probability. Keeps detection statistics free of
    /// numerically-zero clutter.
    pub fn prune_relative(&mut self, rel_floor: f64) {
        let max_p = self
            .amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .fold(0.0f64, f64::max);
        if max_p == 0.0 {
            return;
        }
        let cut = rel_floor * max_p;
        self.amplitudes.retain(|_, a| a.norm_sqr() >= cut);
    }
}

/// Matrix permanent via Ryser's inclusion-exclusion formula with Gray-code
/// subset updates, `O(2^n n)`.
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if n > MAX_PERMANENT_DIM {
        return Err(Error::SizeLimit(format!(
            "permanent limited to {MAX_PERMANENT_DIM}x{MAX_PERMANENT_DIM}, got {n}x{n}"
        )));
    }
    if n == 0 {
        return Ok(Complex64::ONE);
    }
    // Row sums over the current column subset, updated one column at a time
    // following the Gray-code sequence.
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut total = Complex64::ZERO;
    let mut gray: u64 = 0;
    for k in 1u64..(1 << n) {
        let next = k ^ (k >> 1);
        let changed = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << changed) != 0;
        for (r, sum) in row_sums.iter_mut().enumerate() {
            let v = m[(r, changed)];
            if added {
                *sum += v;
            } else {
                *sum -= v;
            }
        }
        gray = next;
        let prod: Complex64 = row_sums.iter().product();
        let parity = next.count_ones() as usize;
        let sign = if (n - parity) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    Ok(total)
}

fn check_transfer_shape(u: &ComplexMatrix, pattern: &OccupationVector) -> Result<()> {
    if u.rows() != u.cols() {
        return Err(Error::Dimension(format!(
            "transfer matrix must be square, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    if pattern.n_modes() != u.rows() {
        return Err(Error::Dimension(format!(
            "pattern spans {} modes but the matrix acts on {}",
            pattern.n_modes(),
            u.rows()
        )));
    }
    Ok(())
}

/// Transition amplitude `⟨output| U |input⟩` for indistinguishable photons:
/// `Perm(U_{output,input}) / sqrt(prod out_i! prod in_j!)`, where the
/// submatrix repeats row `i` `out_i` times and column `j` `in_j` times.
pub fn output_amplitude(
    u: &ComplexMatrix,
    input: &OccupationVector,
    output: &OccupationVector,
) -> Result<Complex64> {
    check_transfer_shape(u, input)?;
    check_transfer_shape(u, output)?;
    if input.n_photons() != output.n_photons() {
        return Err(Error::Input(format!(
            "photon-number mismatch: input has {}, output has {}",
            input.n_photons(),
            output.n_photons()
        )));
    }
    let k = input.n_photons() as usize;
    let rows: Vec<usize> = output
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize))
        .collect();
    let cols: Vec<usize> = input
        .counts()
        .iter()
        .enumerate()
        .flat_map(|(j, &c)| std::iter::repeat_n(j, c as usize))
        .collect();
    let sub = ComplexMatrix::from_fn(k, k, |r, c| u[(rows[r], cols[c])]);
    let perm = permanent(&sub)?;
    let norm = (output.count_factorial_product() * input.count_factorial_product()).sqrt();
    Ok(perm / norm)
}

fn check_evolve_limits(u: &ComplexMatrix, n_photons: u32) -> Result<()> {
    let n = u.rows();
    if n_photons > MAX_PHOTONS {
        return Err(Error::SizeLimit(format!(
            "at most {MAX_PHOTONS} photons supported, got {n_photons}"
        )));
    }
    if n > MAX_MODES {
        return Err(Error::SizeLimit(format!(
            "at most {MAX_MODES} modes supported, got {n}"
        )));
    }
    let dim = pattern_count(n, n_photons);
    if dim > MAX_PATTERNS {
        return Err(Error::SizeLimit(format!(
            "output space has {dim} patterns, limit is {MAX_PATTERNS}"
        )));
    }
    Ok(())
}

/// Evolves a Fock basis state through the transfer matrix, returning the
/// full output distribution.
///
/// Photons are inserted one at a time: each input creation operator on mode
/// `m` maps to the superposition of output creation operators weighted by
/// column `m` of `u`. For unitary `u` the result is normalized; for
/// sub-unitary `u` the total probability is the all-photon survival
/// probability (postselected loss).
pub fn evolve(u: &ComplexMatrix, input: &OccupationVector) -> Result<FockDistribution> {
    check_transfer_shape(u, input)?;
    check_evolve_limits(u, input.n_photons())?;
    let n = u.rows();
    let mut dist = FockDistribution::new(n, 0);
    dist.amplitudes
        .insert(OccupationVector::vacuum(n), Complex64::ONE);
    for (mode, &count) in input.counts().iter().enumerate() {
        for _ in 0..count {
            let mut next = FockDistribution::new(n, dist.n_photons + 1);
            for (pat, &amp) in &dist.amplitudes {
                for j in 0..n {
                    let w = u[(j, mode)];
                    if w == Complex64::ZERO {
                        continue;
                    }
                    let boost = ((pat.count(j) + 1) as f64).sqrt();
                    next.insert_checked(pat.with_added_photon(j), amp * w * boost)?;
                }
            }
            dist = next;
        }
    }
    let norm = input.count_factorial_product().sqrt();
    for amp in dist.amplitudes.values_mut() {
        *amp /= norm;
    }
    Ok(dist)
}

/// Evolves a superposition of Fock basis states: `Σ c_k |S_k⟩` evolves to
/// `Σ c_k evolve(U, S_k)` by linearity. All terms must share the photon
/// number and mode count.
pub fn evolve_superposition(
    u: &ComplexMatrix,
    terms: &[(Complex64, OccupationVector)],
) -> Result<FockDistribution> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::Input("empty superposition".into()));
    };
    let n_photons = first.n_photons();
    let n_modes = first.n_modes();
    let mut out = FockDistribution::new(n_modes, n_photons);
    for (coeff, term) in terms {
        if term.n_photons() != n_photons || term.n_modes() != n_modes {
            return Err(Error::Input(
                "superposition terms must share photon and mode counts".into(),
            ));
        }
        let part = evolve(u, term)?;
        for (pat, amp) in part.amplitudes {
            out.insert_checked(pat, coeff * amp)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mzi;
    use crate::numerics::{haar_random_unitary, keyed_rng};
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Reference permanent: explicit sum over all `n!` permutations.
    fn naive_permanent(m: &ComplexMatrix) -> Complex64 {
        fn rec(m: &ComplexMatrix, row: usize, used: &mut Vec<bool>) -> Complex64 {
            let n = m.rows();
            if row == n {
                return Complex64::ONE;
            }
            let mut acc = Complex64::ZERO;
            for col in 0..n {
                if !used[col] {
                    used[col] = true;
                    acc += m[(row, col)] * rec(m, row + 1, used);
                    used[col] = false;
                }
            }
            acc
        }
        rec(m, 0, &mut vec![false; m.rows()])
    }

    #[test]
    fn permanent_matches_hand_cases() {
        assert_eq!(
            permanent(&ComplexMatrix::identity(2)).unwrap(),
            Complex64::ONE
        );
        let m = ComplexMatrix::from_fn(2, 2, |r, c2| {
            c([[1.0, 2.0], [3.0, 4.0]][r][c2], 0.0)
        });
        // ad + bc
        assert_eq!(permanent(&m).unwrap(), c(1.0 * 4.0 + 2.0 * 3.0, 0.0));
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| Complex64::ONE);
        assert!((permanent(&ones).unwrap() - c(6.0, 0.0)).norm() < 1e-12);
        let empty = ComplexMatrix::from_fn(0, 0, |_, _| Complex64::ZERO);
        assert_eq!(permanent(&empty).unwrap(), Complex64::ONE);
    }

    #[test]
    fn ryser_matches_naive_enumeration() {
        let mut rng = keyed_rng(2024, 0, 0);
        for trial in 0..100 {
            let n = 1 + (trial % 6);
            let m = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let fast = permanent(&m).unwrap();
            let slow = naive_permanent(&m);
            let denom = slow.norm().max(1e-30);
            assert!(
                (fast - slow).norm() / denom < 1e-10,
                "n={n} trial={trial}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn permanent_rejects_oversized_matrices() {
        let m = ComplexMatrix::identity(9);
        assert!(matches!(permanent(&m), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn hong_ou_mandel_dip_is_exact() {
        let u = splitter_50_50();
        let one_one = OccupationVector::new(vec![1, 1]);
        let amp = output_amplitude(&u, &one_one, &one_one).unwrap();
        assert!(amp.norm() < 1e-15, "HOM coincidence amplitude {amp}");
        // The photons bunch: two in either mode with probability 1/2 each.
        let two_zero = OccupationVector::new(vec![2, 0]);
        let zero_two = OccupationVector::new(vec![0, 2]);
        let p20 = output_amplitude(&u, &one_one, &two_zero).unwrap().norm_sqr();
        let p02 = output_amplitude(&u, &one_one, &zero_two).unwrap().norm_sqr();
        assert!((p20 - 0.5).abs() < 1e-12);
        assert!((p02 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn distinguishable_photons_restore_the_classical_coincidence() {
        // Same splitter, but photons treated as classical balls: each lands
        // in a mode with the matrix-element probability independently.
        let u = splitter_50_50();
        let p = |r: usize, col: usize| u[(r, col)].norm_sqr();
        let coincidence = p(0, 0) * p(1, 1) + p(1, 0) * p(0, 1);
        assert!((coincidence - 0.5).abs() < 1e-12);
    }

    fn splitter_50_50() -> ComplexMatrix {
        let b = mzi::ideal_block(FRAC_PI_2, 0.0);
        ComplexMatrix::from_fn(2, 2, |r, c2| b[r][c2])
    }

    #[test]
    fn identity_preserves_any_pattern() {
        let u = ComplexMatrix::identity(4);
        let pat = OccupationVector::new(vec![2, 0, 1, 0]);
        let amp = output_amplitude(&u, &pat, &pat).unwrap();
        assert!((amp - Complex64::ONE).norm() < 1e-12);
    }

    #[test]
    fn photon_number_mismatch_is_rejected() {
        let u = ComplexMatrix::identity(2);
        let err = output_amplitude(
            &u,
            &OccupationVector::new(vec![1, 0]),
            &OccupationVector::new(vec![1, 1]),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn haar_two_photon_amplitudes_sum_to_one() {
        let u = haar_random_unitary(4, 12).unwrap();
        let input = OccupationVector::new(vec![1, 1, 0, 0]);
        let patterns = enumerate_patterns(4, 2);
        assert_eq!(patterns.len(), 10);
        let total: f64 = patterns
            .iter()
            .map(|t| output_amplitude(&u, &input, t).unwrap().norm_sqr())
            .sum();
        assert!((total - 1.0).abs() < 1e-10, "total {total}");
    }

    #[test]
    fn evolve_matches_the_permanent_route() {
        let u = haar_random_unitary(5, 3).unwrap();
        let input = OccupationVector::new(vec![1, 0, 2, 0, 0]);
        let dist = evolve(&u, &input).unwrap();
        for pat in enumerate_patterns(5, 3) {
            let direct = output_amplitude(&u, &input, &pat).unwrap();
            assert!(
                (dist.amplitude(&pat) - direct).norm() < 1e-12,
                "pattern {pat}"
            );
        }
    }

    #[test]
    fn unitary_evolution_preserves_probability() {
        for n in [4usize, 8] {
            let u = haar_random_unitary(n, 7 + n as u64).unwrap();
            for n_ph in 1u32..=3 {
                let modes: Vec<usize> = (0..n_ph as usize).collect();
                let input = OccupationVector::single_photons(n, &modes).unwrap();
                let dist = evolve(&u, &input).unwrap();
                let total = dist.total_probability();
                assert!((total - 1.0).abs() < 1e-10, "n={n} n_ph={n_ph}: {total}");
            }
        }
    }

    #[test]
    fn single_photon_evolution_is_the_matrix_column() {
        let u = haar_random_unitary(6, 21).unwrap();
        let k = 2;
        let input = OccupationVector::single_photons(6, &[k]).unwrap();
        let dist = evolve(&u, &input).unwrap();
        for j in 0..6 {
            let pat = OccupationVector::single_photons(6, &[j]).unwrap();
            assert!((dist.amplitude(&pat) - u[(j, k)]).norm() < 1e-14);
        }
    }

    #[test]
    fn hom_bunching_inside_a_32_mode_layer() {
        // 50:50 coupling on modes (15,16) of a 32-mode identity: photons
        // entering that pair always bunch.
        let b = mzi::ideal_block(FRAC_PI_2, 0.0);
        let mut u = ComplexMatrix::identity(32);
        let (i, j) = (15usize, 16usize);
        u.apply_pair_rows(&b, i, j);
        let input = OccupationVector::single_photons(32, &[i, j]).unwrap();
        let dist = evolve(&u, &input).unwrap();
        let p_same: f64 = dist.count_probability(2).iter().sum();
        assert!((p_same - 1.0).abs() < 1e-12);
        let coincidence = dist.probability(&input);
        assert!(coincidence < 1e-24);
    }

    #[test]
    fn uniform_loss_scales_six_photon_survival_as_g12() {
        let g = 0.9;
        let u = ComplexMatrix::identity(8).scale(c(g, 0.0));
        let input = OccupationVector::new(vec![1, 1, 1, 1, 1, 1, 0, 0]);
        let dist = evolve(&u, &input).unwrap();
        let total = dist.total_probability();
        assert!((total - g.powi(12)).abs() < 1e-12, "total {total}");
    }

    #[test]
    fn evolve_guards_its_size_envelope() {
        let u = ComplexMatrix::identity(8);
        let seven = OccupationVector::new(vec![7, 0, 0, 0, 0, 0, 0, 0]);
        assert!(matches!(evolve(&u, &seven), Err(Error::SizeLimit(_))));
        let u_big = ComplexMatrix::identity(33);
        let one = OccupationVector::single_photons(33, &[0]).unwrap();
        assert!(matches!(evolve(&u_big, &one), Err(Error::SizeLimit(_))));
        // 32 modes with 6 photons would need C(37,6) > 2e6 patterns.
        let u32m = ComplexMatrix::identity(32);
        let six = OccupationVector::new({
            let mut v = vec![0u32; 32];
            v[..6].fill(1);
            v
        });
        assert!(matches!(evolve(&u32m, &six), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn superposition_evolution_is_linear() {
        let u = haar_random_unitary(4, 9).unwrap();
        let a = OccupationVector::new(vec![1, 1, 0, 0]);
        let b = OccupationVector::new(vec![0, 0, 1, 1]);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        let terms = vec![(c(inv_sqrt2, 0.0), a.clone()), (c(0.0, inv_sqrt2), b.clone())];
        let dist = evolve_superposition(&u, &terms).unwrap();
        let da = evolve(&u, &a).unwrap();
        let db = evolve(&u, &b).unwrap();
        assert!((dist.total_probability() - 1.0).abs() < 1e-10);
        for pat in enumerate_patterns(4, 2) {
            let want = c(inv_sqrt2, 0.0) * da.amplitude(&pat)
                + c(0.0, inv_sqrt2) * db.amplitude(&pat);
            assert!((dist.amplitude(&pat) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn superposition_rejects_mixed_photon_numbers() {
        let u = ComplexMatrix::identity(3);
        let terms = vec![
            (Complex64::ONE, OccupationVector::new(vec![1, 0, 0])),
            (Complex64::ONE, OccupationVector::new(vec![1, 1, 0])),
        ];
        assert!(matches!(
            evolve_superposition(&u, &terms),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn patterns_enumerate_in_colex_order() {
        let pats = enumerate_patterns(3, 2);
        let counts: Vec<Vec<u32>> = pats.iter().map(|p| p.counts().to_vec()).collect();
        assert_eq!(
            counts,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![0, 2, 0],
                vec![1, 0, 1],
                vec![0, 1, 1],
                vec![0, 0, 2],
            ]
        );
        assert_eq!(pats.len(), pattern_count(3, 2));
        assert_eq!(pattern_count(32, 2), 528);
        assert_eq!(pattern_count(13, 6), 18564);
        assert_eq!(pattern_count(8, 6), 1716);
    }

    #[test]
    fn prune_removes_numerical_dust() {
        let mut d = FockDistribution::new(2, 1);
        d.add(OccupationVector::new(vec![1, 0]), c(1.0, 0.0)).unwrap();
        d.add(OccupationVector::new(vec![0, 1]), c(1e-13, 0.0))
            .unwrap();
        d.prune_relative(1e-12);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn mode_occupancy_matches_hand_case() {
        let mut d = FockDistribution::new(2, 2);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        d.add(OccupationVector::new(vec![2, 0]), c(inv_sqrt2, 0.0))
            .unwrap();
        d.add(OccupationVector::new(vec![1, 1]), c(0.0, inv_sqrt2))
            .unwrap();
        let occ = d.mode_occupancy();
        assert!((occ[0] - 1.5).abs() < 1e-12);
        assert!((occ[1] - 0.5).abs() < 1e-12);
        let p2 = d.count_probability(2);
        assert!((p2[0] - 0.5).abs() < 1e-12);
        assert!(p2[1].abs() < 1e-12);
    }
}
