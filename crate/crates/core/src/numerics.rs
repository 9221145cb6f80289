//! Dense complex linear algebra sized for interferometer work (n up to a few
//! thousand), Haar-random unitary sampling, and the error metrics used by
//! every benchmark in the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Largest mode count accepted by constructors and file loaders.
pub const MAX_DIM: usize = 4096;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major data, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::Dimension(format!(
                "matrix shape {rows}x{cols} outside 1..={MAX_DIM}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Input("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, z) in entries.iter().enumerate() {
            m[(i, i)] = *z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Matrix product `self * rhs`. Panics on shape mismatch: shapes are
    /// structural program invariants, not runtime data.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let mut out = vec![Complex64::ZERO; self.rows];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * z).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius_norm_sq().sqrt()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Left-multiplies by a 2x2 block acting on rows `i` and `j`:
    /// `self <- Embed(t, i, j) * self`.
    pub fn apply_pair_rows(&mut self, t: &[[Complex64; 2]; 2], i: usize, j: usize) {
        debug_assert!(i != j && i < self.rows && j < self.rows);
        let cols = self.cols;
        for c in 0..cols {
            let a = self.data[i * cols + c];
            let b = self.data[j * cols + c];
            self.data[i * cols + c] = t[0][0] * a + t[0][1] * b;
            self.data[j * cols + c] = t[1][0] * a + t[1][1] * b;
        }
    }

    /// Right-multiplies by a 2x2 block acting on columns `i` and `j`:
    /// `self <- self * Embed(t, i, j)`.
    pub fn apply_pair_cols(&mut self, t: &[[Complex64; 2]; 2], i: usize, j: usize) {
        debug_assert!(i != j && i < self.cols && j < self.cols);
        let cols = self.cols;
        for r in 0..self.rows {
            let a = self.data[r * cols + i];
            let b = self.data[r * cols + j];
            self.data[r * cols + i] = a * t[0][0] + b * t[1][0];
            self.data[r * cols + j] = a * t[0][1] + b * t[1][1];
        }
    }

    /// Scales row `i` by `z`.
    pub fn scale_row(&mut self, i: usize, z: Complex64) {
        for c in 0..self.cols {
            self.data[i * self.cols + c] *= z;
        }
    }

    /// Max deviation of `self * self^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        assert!(self.is_square());
        let gram = self.mul(&self.dagger());
        gram.max_abs_diff(&Self::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && self.unitarity_defect() <= tol
    }

    /// Squared 2-norms of each column (intensity transmission per input mode).
    pub fn column_norms_sq(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[c] += self[(r, c)].norm_sqr();
            }
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Normalized pure state on `dim` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes, requiring unit norm within 1e-12.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension("state vector must be non-empty".into()));
        }
        let norm_sq: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!(
                "state vector norm^2 = {norm_sq:.15}, expected 1 within 1e-12"
            )));
        }
        Ok(Self { amps })
    }

    /// Basis state `|k>` on `dim` modes.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut amps = vec![Complex64::ZERO; dim];
        amps[k] = Complex64::ONE;
        Self { amps }
    }

    /// Haar-random pure state (normalized complex Gaussian vector).
    pub fn haar_random(dim: usize, rng: &mut impl Rng) -> Self {
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Deterministic RNG stream for `(master seed, stream, element)` keys.
///
/// Stream splitting uses a SplitMix64-style mix so neighbouring keys give
/// statistically independent ChaCha streams; results are identical regardless
/// of thread scheduling.
pub fn keyed_rng(master: u64, stream: u64, element: u64) -> ChaCha12Rng {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    let k = splitmix(master ^ splitmix(stream ^ splitmix(element)));
    ChaCha12Rng::seed_from_u64(k)
}

/// Haar-random `n x n` unitary for a fixed seed.
pub fn haar_random_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = keyed_rng(seed, 0, 0);
    haar_random_unitary_with(n, &mut rng)
}

/// Haar-random unitary drawn from the supplied RNG: QR of a complex Gaussian
/// matrix, with the R-diagonal phase correction that makes the distribution
/// exactly Haar.
pub fn haar_random_unitary_with(n: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    if n == 0 || n > MAX_DIM {
        return Err(Error::Dimension(format!("unitary size {n} outside 1..={MAX_DIM}")));
    }
    let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases: Vec<Complex64> = (0..n)
        .map(|j| {
            let d = r[(j, j)];
            if d.norm() < f64::MIN_POSITIVE {
                Complex64::ONE
            } else {
                d / d.norm()
            }
        })
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j]))
}

fn check_same_square(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::Dimension(format!(
            "expected equal square matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// State infidelity `1 - |<psi| U_ideal^dagger U_actual |psi>|^2`.
///
/// Invariant under a global phase on either matrix.
pub fn state_infidelity(
    u_ideal: &ComplexMatrix,
    u_actual: &ComplexMatrix,
    psi: &StateVector,
) -> Result<f64> {
    check_same_square(u_ideal, u_actual)?;
    if psi.dim() != u_ideal.rows() {
        return Err(Error::Dimension(format!(
            "state dim {} does not match matrix dim {}",
            psi.dim(),
            u_ideal.rows()
        )));
    }
    let a = u_ideal.mul_vec(psi.amplitudes());
    let b = u_actual.mul_vec(psi.amplitudes());
    let overlap: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
    Ok((1.0 - overlap.norm_sqr()).max(0.0))
}

/// Frobenius matrix error `||U_actual - U_ideal||_F^2 / (4 n)`: the
/// state-averaged infidelity to leading order in the perturbation.
pub fn matrix_error(u_ideal: &ComplexMatrix, u_actual: &ComplexMatrix) -> Result<f64> {
    check_same_square(u_ideal, u_actual)?;
    let n = u_ideal.rows() as f64;
    Ok(u_actual.sub(u_ideal).frobenius_norm_sq() / (4.0 * n))
}

/// Frobenius distance minimized over a global phase:
/// `min_gamma || U - e^{i gamma} V ||_F`.
pub fn distance_up_to_global_phase(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<f64> {
    check_same_square(u, v)?;
    // Align the phase first, then take the residual entrywise; expanding
    // ||U||^2 + ||V||^2 - 2|tr| instead cancels catastrophically when the
    // matrices nearly coincide.
    let phase = global_phase_between(u, v)?;
    Ok(u.sub(&v.scale(phase)).frobenius_norm_sq().sqrt())
}

/// Phase `e^{i gamma}` minimizing `||U - e^{i gamma} V||_F`.
pub fn global_phase_between(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<Complex64> {
    check_same_square(u, v)?;
    let t = v.dagger().mul(u).trace();
    if t.norm() < f64::MIN_POSITIVE {
        return Ok(Complex64::ONE);
    }
    Ok(t / t.norm())
}
