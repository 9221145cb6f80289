//! Transfer matrices for the programmable Mach-Zehnder interferometer (MZI).
//!
//! Conventions: `theta` is the internal (splitting) phase with `theta = 0`
//! full cross, `theta = pi` full bar, `theta = pi/2` balanced; `phi` is the
//! external phase applied to the first input port. Splitter fabrication
//! offsets `alpha` (input splitter) and `beta` (output splitter) deform the
//! two 50:50 couplers; `gamma1`, `gamma2` are amplitude transmissions of the
//! two interferometer arms.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_4;

use crate::numerics::ComplexMatrix;
use crate::{Error, Result};

/// 2x2 complex block, row-major.
pub type Block2 = [[Complex64; 2]; 2];

/// Full parameter set of one MZI pass.
///
/// `theta`/`phi` are programmed per schedule slot; the remaining fields are
/// device properties. Defaults describe an ideal device.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct MZIParams {
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for MZIParams {
    fn default() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            alpha: 0.0,
            beta: 0.0,
            gamma1: 1.0,
            gamma2: 1.0,
        }
    }
}

fn to_matrix(b: Block2) -> ComplexMatrix {
    ComplexMatrix::new(2, 2, vec![b[0][0], b[0][1], b[1][0], b[1][1]])
        .expect("2x2 block entries are finite")
}

/// Ideal transfer block:
/// `i e^{i theta/2} [[e^{i phi} sin(theta/2), cos(theta/2)],
///                   [e^{i phi} cos(theta/2), -sin(theta/2)]]`.
pub fn ideal_block(theta: f64, phi: f64) -> Block2 {
    let s = (theta / 2.0).sin();
    let c = (theta / 2.0).cos();
    let g = Complex64::i() * Complex64::from_polar(1.0, theta / 2.0);
    let ephi = Complex64::from_polar(1.0, phi);
    [
        [g * ephi * s, g * c],
        [g * ephi * c, -g * s],
    ]
}

/// [`ideal_block`] as a [`ComplexMatrix`].
pub fn ideal_transfer(theta: f64, phi: f64) -> ComplexMatrix {
    to_matrix(ideal_block(theta, phi))
}

/// Transfer block with splitter offsets and arm losses:
/// the two imperfect couplers `e^{-i(beta + pi/4) sigma_x}`,
/// `e^{-i(alpha + pi/4) sigma_x}` sandwich the arm propagator
/// `diag(gamma1 e^{-i theta/2}, gamma2 e^{i theta/2})`, followed by the
/// external phase and a scalar chosen so that zero offsets and unit
/// transmissions reproduce [`ideal_block`] exactly.
pub fn lossy_block(theta: f64, phi: f64, alpha: f64, beta: f64, gamma1: f64, gamma2: f64) -> Block2 {
    let (sa, ca) = (alpha + FRAC_PI_4).sin_cos();
    let (sb, cb) = (beta + FRAC_PI_4).sin_cos();
    let em = Complex64::from_polar(1.0, -theta / 2.0);
    let ep = Complex64::from_polar(1.0, theta / 2.0);
    let (g1, g2) = (gamma1, gamma2);
    let mi = -Complex64::i();
    // [[cb, -i sb], [-i sb, cb]] * diag(g1 em, g2 ep) * [[ca, -i sa], [-i sa, ca]]
    let core = [
        [
            Complex64::from(cb * ca) * em * g1 - Complex64::from(sb * sa) * ep * g2,
            mi * (Complex64::from(cb * sa) * em * g1 + Complex64::from(sb * ca) * ep * g2),
        ],
        [
            mi * (Complex64::from(sb * ca) * em * g1 + Complex64::from(cb * sa) * ep * g2),
            -Complex64::from(sb * sa) * em * g1 + Complex64::from(cb * ca) * ep * g2,
        ],
    ];
    let scalar = -ep;
    let ephi = Complex64::from_polar(1.0, phi);
    [
        [scalar * core[0][0] * ephi, scalar * core[0][1]],
        [scalar * core[1][0] * ephi, scalar * core[1][1]],
    ]
}

/// Unitary transfer block with splitter offsets only.
pub fn noisy_block(theta: f64, phi: f64, alpha: f64, beta: f64) -> Block2 {
    lossy_block(theta, phi, alpha, beta, 1.0, 1.0)
}

/// [`noisy_block`] as a [`ComplexMatrix`].
pub fn noisy_transfer(theta: f64, phi: f64, alpha: f64, beta: f64) -> ComplexMatrix {
    to_matrix(noisy_block(theta, phi, alpha, beta))
}

/// [`lossy_block`] as a [`ComplexMatrix`].
pub fn lossy_transfer(params: &MZIParams) -> ComplexMatrix {
    to_matrix(lossy_block(
        params.theta,
        params.phi,
        params.alpha,
        params.beta,
        params.gamma1,
        params.gamma2,
    ))
}

/// Magnitude of the realized splitting ratio `|T11 / T12|`.
/// Returns infinity when the cross amplitude vanishes.
pub fn splitting_ratio(block: &Block2) -> f64 {
    let t11 = block[0][0].norm();
    let t12 = block[0][1].norm();
    if t12 < f64::MIN_POSITIVE {
        f64::INFINITY
    } else {
        t11 / t12
    }
}

/// Achievable range of `|T11 / T12|` over the internal phase for a device
/// with fixed splitter offsets and arm transmissions.
///
/// With `a = alpha + pi/4`, `b = beta + pi/4` and the arm amplitudes
/// `x = G1 cos b cos a`, `y = G2 sin b sin a`, `u = G1 cos b sin a`,
/// `v = G2 sin b cos a`, the squared ratio
/// `(x^2 + y^2 - 2xy cos t) / (u^2 + v^2 + 2uv cos t)` is monotone in
/// `cos t`, so its extremes sit at `t = 0` and `t = pi`:
/// `|x - y| / |u + v|` and `|x + y| / |u - v|`, returned sorted. In the
/// lossless limit this is `tan|alpha + beta| .. cot|alpha - beta|`; with no
/// coherent error it is `|G1 - G2|/(G1 + G2) .. (G1 + G2)/|G1 - G2|`. A
/// vanishing denominator means the ratio is unbounded on that side. Both
/// transmissions zero is a device with no output at all.
pub fn splitting_bounds(alpha: f64, beta: f64, gamma1: f64, gamma2: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&gamma1) || !(0.0..=1.0).contains(&gamma2) {
        return Err(Error::Input(format!(
            "transmissions must lie in [0, 1], got ({gamma1}, {gamma2})"
        )));
    }
    if gamma1 == 0.0 && gamma2 == 0.0 {
        return Err(Error::DegenerateDevice(
            "both arm transmissions are zero".into(),
        ));
    }
    let (sa, ca) = (alpha + FRAC_PI_4).sin_cos();
    let (sb, cb) = (beta + FRAC_PI_4).sin_cos();
    let x = gamma1 * cb * ca;
    let y = gamma2 * sb * sa;
    let u = gamma1 * cb * sa;
    let v = gamma2 * sb * ca;

    let ratio = |num: f64, den: f64| -> f64 {
        if den.abs() < 1e-300 {
            f64::INFINITY
        } else {
            (num / den).abs()
        }
    };
    let at_cross = ratio(x - y, u + v);
    let at_bar = ratio(x + y, u - v);
    Ok(if at_cross <= at_bar {
        (at_cross, at_bar)
    } else {
        (at_bar, at_cross)
    })
}
