//! Closed-form zero-gravity wave family and the flow beneath it.
//!
//! The surface `z(alpha) = alpha - 4iA e^{-i alpha} / (1 + A e^{-i alpha})`
//! with `Omega(A)` and `B(A)` below solves the Bernoulli problem exactly at
//! `G = 0`. Everything here is evaluated from rational closed forms and is
//! used as the reference for the spectral code.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ProfileCurve;
use crate::spectral::{grid_alpha, GridFn, HolomorphicBoundaryFn};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dimensionless parameters of one wave configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub amplitude: f64,
    pub gravity: f64,
    pub omega: f64,
    pub bernoulli: f64,
}

impl ParamSet {
    /// `(A, 0, Omega(A), B(A))`.
    pub fn zero_gravity(amplitude: f64) -> Result<Self> {
        Self::with_gravity(amplitude, 0.0)
    }

    /// `Omega` and `B` slaved to the amplitude, gravity set freely.
    pub fn with_gravity(amplitude: f64, gravity: f64) -> Result<Self> {
        check_amplitude(amplitude)?;
        Ok(Self {
            amplitude,
            gravity,
            omega: omega_of_a(amplitude)?,
            bernoulli: bernoulli_of_a(amplitude)?,
        })
    }
}

/// Rejects amplitudes outside `[0, 1/2)`.
pub fn check_amplitude(amplitude: f64) -> Result<()> {
    if (0.0..0.5).contains(&amplitude) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "A",
            value: amplitude,
            range: "[0, 1/2)",
        })
    }
}

fn check_formula_domain(amplitude: f64) -> Result<()> {
    if amplitude >= 0.0 && 1.0 - 3.0 * amplitude * amplitude > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "A",
            value: amplitude,
            range: "[0, 1/sqrt(3))",
        })
    }
}

/// `Omega(A) = (1 - A^2) / (1 - 3A^2)`.
pub fn omega_of_a(amplitude: f64) -> Result<f64> {
    check_formula_domain(amplitude)?;
    let a2 = amplitude * amplitude;
    Ok((1.0 - a2) / (1.0 - 3.0 * a2))
}

/// `B(A) = 1/2 ((1 + A^2) / (1 - 3A^2))^2`.
pub fn bernoulli_of_a(amplitude: f64) -> Result<f64> {
    check_formula_domain(amplitude)?;
    let a2 = amplitude * amplitude;
    let r = (1.0 + a2) / (1.0 - 3.0 * a2);
    Ok(0.5 * r * r)
}

/// Smallest `N` with `A^N < 1e-17`.
pub fn default_mode_count(amplitude: f64) -> usize {
    if amplitude <= 0.0 {
        return 1;
    }
    ((1e-17f64).ln() / amplitude.ln()).ceil().max(1.0) as usize
}

/// Truncation of `w(zeta; A) = -4iA zeta / (1 + A zeta)` to modes `1..=N`.
///
/// The coefficient of `zeta^n` is `-4i (-1)^{n-1} A^n`.
pub fn crapper_w(amplitude: f64, modes: usize) -> Result<HolomorphicBoundaryFn> {
    check_amplitude(amplitude)?;
    if modes == 0 {
        return Err(Error::Domain {
            name: "N",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let mut coeffs = vec![0.0; modes + 1];
    let mut power = 4.0;
    for c in coeffs.iter_mut().skip(1) {
        // 4 (-A)^n == -4 (-1)^{n-1} A^n
        power *= -amplitude;
        *c = power;
    }
    Ok(HolomorphicBoundaryFn::new(coeffs))
}

/// Closed-form `w(zeta; A)` at any point of the closed disk.
pub fn crapper_w_at(amplitude: f64, zeta: Complex64) -> Complex64 {
    -4.0 * I * amplitude * zeta / (1.0 + amplitude * zeta)
}

/// `zeta w_zeta` of the closed form.
fn crapper_zeta_wz(amplitude: f64, zeta: Complex64) -> Complex64 {
    let d = 1.0 + amplitude * zeta;
    -4.0 * I * amplitude * zeta / (d * d)
}

/// Samples `z(alpha; A)` directly from its rational form.
pub fn profile_z_exact(amplitude: f64, points: usize) -> Result<ProfileCurve> {
    check_amplitude(amplitude)?;
    if points < 4 || !points.is_multiple_of(2) {
        return Err(Error::InvalidGrid(points));
    }
    let mut alpha = Vec::with_capacity(points);
    let mut x = Vec::with_capacity(points);
    let mut y = Vec::with_capacity(points);
    let mut margin = f64::INFINITY;
    for j in 0..points {
        let a = grid_alpha(points, j);
        let zeta = Complex64::from_polar(1.0, -a);
        let z = a + crapper_w_at(amplitude, zeta);
        let za = 1.0 - I * crapper_zeta_wz(amplitude, zeta);
        margin = margin.min(za.norm());
        alpha.push(a);
        x.push(z.re);
        y.push(z.im);
    }
    Ok(ProfileCurve::new(alpha, x, y, margin))
}

/// Thresholds of the zero-gravity family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAmplitudes {
    /// `sqrt(2) - 1`: above it the profile overhangs.
    pub overhang_threshold: f64,
    /// Amplitude of the self-touching profile.
    pub a_max: f64,
    /// Argmax of `2 sin(a)/a - cos(a)` on `(0, pi]`.
    pub maximizer_alpha: f64,
}

/// `2 sin(a)/a - cos(a)`, with the removable value 1 at the origin.
pub fn touching_auxiliary(alpha: f64) -> f64 {
    if alpha.abs() < 1e-8 {
        // 2 sin a / a = 2 - a^2/3 + ..., cos a = 1 - a^2/2 + ...
        1.0 + alpha * alpha / 6.0
    } else {
        2.0 * alpha.sin() / alpha - alpha.cos()
    }
}

fn touching_auxiliary_slope(alpha: f64) -> f64 {
    2.0 * (alpha * alpha.cos() - alpha.sin()) / (alpha * alpha) + alpha.sin()
}

/// Maximizes the auxiliary function (it is even, so `(0, pi]` suffices) and
/// returns `m - sqrt(m^2 - 1)` together with `sqrt(2) - 1`.
pub fn a_max() -> CriticalAmplitudes {
    let (mut lo, mut hi) = (0.01, PI);
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (touching_auxiliary(c), touching_auxiliary(d));
    while hi - lo > 1e-6 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = touching_auxiliary(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = touching_auxiliary(d);
        }
    }
    // the slope changes sign from + to - across the maximizer
    let (mut lo, mut hi) = (lo - 1e-5, hi + 1e-5);
    debug_assert!(touching_auxiliary_slope(lo) > 0.0 && touching_auxiliary_slope(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if touching_auxiliary_slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = 0.5 * (lo + hi);
    let m = touching_auxiliary(alpha);
    CriticalAmplitudes {
        overhang_threshold: 2.0f64.sqrt() - 1.0,
        a_max: m - (m * m - 1.0).sqrt(),
        maximizer_alpha: alpha,
    }
}

/// `Q(w(zeta; A)) = -8 (A - 1/A)^{-2} (A/(zeta + A) - (1/A)/(zeta + 1/A))`
/// on the circle, written without `1/A` so that `A = 0` gives the zero function.
pub fn exact_q_at(amplitude: f64, zeta: Complex64) -> f64 {
    let a = amplitude;
    let a2 = a * a;
    let pref = -8.0 * a2 / ((1.0 - a2) * (1.0 - a2));
    (pref * (a / (zeta + a) - 1.0 / (1.0 + a * zeta))).re
}

pub fn exact_q_closed_form(amplitude: f64, points: usize) -> Result<GridFn> {
    check_amplitude(amplitude)?;
    Ok(GridFn::from_fn(points, |alpha| {
        exact_q_at(amplitude, Complex64::from_polar(1.0, -alpha))
    }))
}

/// Max-norm discrepancies between the two sides of each boundary identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactIdentityResiduals {
    /// `1 + Omega (Im w + Q) = (1 - 2 Omega) (z - A)(z - 1/A) / ((z + A)(z + 1/A))`
    pub bernoulli_numerator: f64,
    /// `1 - i zeta w_zeta = ((zeta - 1/A)/(zeta + 1/A))^2`
    pub conformal_derivative: f64,
    /// `|1 - i zeta w_zeta|^2 = ((z - A)(z - 1/A) / ((z + A)(z + 1/A)))^2`
    pub speed_squared: f64,
    /// The dynamic condition written through the stream function.
    pub dynamic_condition: f64,
}

impl ExactIdentityResiduals {
    pub fn max(&self) -> f64 {
        self.bernoulli_numerator
            .max(self.conformal_derivative)
            .max(self.speed_squared)
            .max(self.dynamic_condition)
    }
}

pub fn verify_exact_identities(amplitude: f64, points: usize) -> Result<ExactIdentityResiduals> {
    check_amplitude(amplitude)?;
    let a = amplitude;
    let a2 = a * a;
    let omega = omega_of_a(a)?;
    let bern = bernoulli_of_a(a)?;
    let mut out = ExactIdentityResiduals {
        bernoulli_numerator: 0.0,
        conformal_derivative: 0.0,
        speed_squared: 0.0,
        dynamic_condition: 0.0,
    };
    for j in 0..points {
        let zeta = Complex64::from_polar(1.0, -grid_alpha(points, j));
        // (zeta - A)(zeta - 1/A) / ((zeta + A)(zeta + 1/A)), cleared of 1/A
        let ratio = (zeta - a) * (a * zeta - 1.0) / ((zeta + a) * (a * zeta + 1.0));

        let lhs = 1.0 + omega * (crapper_w_at(a, zeta).im + exact_q_at(a, zeta));
        let rhs = (1.0 - 2.0 * omega) * ratio;
        out.bernoulli_numerator = out.bernoulli_numerator.max((lhs - rhs).norm());

        let za = 1.0 - I * crapper_zeta_wz(a, zeta);
        let m = (a * zeta - 1.0) / (a * zeta + 1.0);
        out.conformal_derivative = out.conformal_derivative.max((za - m * m).norm());
        out.speed_squared = out
            .speed_squared
            .max((za.norm_sqr() - ratio * ratio).norm());

        let inner = (zeta * zeta - 2.0 * a * (1.0 + a2) / (1.0 - a2) * zeta + 1.0) * a
            / ((zeta + a) * (a * zeta + 1.0));
        let left = (1.0 - 2.0 * omega * inner).powi(2);
        let right = 2.0 * bern * ratio * ratio;
        out.dynamic_condition = out.dynamic_condition.max((left - right).norm());
    }
    Ok(out)
}

/// Stream function and its harmonic part at a point `(alpha, beta)` of the
/// conformal lower half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowField {
    pub alpha: f64,
    pub beta: f64,
    pub psi: f64,
    pub psi_beta: f64,
    /// `f = -Omega y^2 / 2 - y - psi`, harmonic in the fluid.
    pub harmonic: f64,
    /// `|grad f|` in `(alpha, beta)`.
    pub harmonic_gradient: f64,
}

/// Evaluates the zero-gravity stream function with `zeta = exp(-i(alpha + i beta))`.
pub fn stream_function(amplitude: f64, alpha: f64, beta: f64) -> Result<FlowField> {
    check_amplitude(amplitude)?;
    if beta > 0.0 {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            range: "(-inf, 0]",
        });
    }
    let a = amplitude;
    let a2 = a * a;
    let omega = omega_of_a(a)?;
    let zeta = Complex64::from_polar(beta.exp(), -alpha);
    let w = crapper_w_at(a, zeta);
    let y = beta + w.im;
    let x_alpha = (1.0 - I * crapper_zeta_wz(a, zeta)).re;

    let c = 1.0 - 2.0 * a2;
    let d = a * zeta + 1.0;
    // 4 Omega/(A^2 - 1) ((1 - 2A^2) zeta^2 + 1) / (zeta + 1/A)^2
    let g = 4.0 * omega * a2 * (c * zeta * zeta + 1.0) / ((a2 - 1.0) * d * d);
    let g_prime = 8.0 * omega * a2 * (c * zeta - a) / ((a2 - 1.0) * d * d * d);

    let psi = -beta - 0.5 * omega * y * y - g.re;
    let psi_beta = -1.0 - omega * y * x_alpha - (zeta * g_prime).re;

    // f = Re(i w + g); the gradient modulus of Re Phi(zeta(s)) is |zeta Phi'(zeta)|
    let harmonic = (I * w + g).re;
    let phi_prime = 4.0 * a / (d * d) + g_prime;
    Ok(FlowField {
        alpha,
        beta,
        psi,
        psi_beta,
        harmonic,
        harmonic_gradient: (zeta * phi_prime).norm(),
    })
}

/// Dimensionless groups of a dimensional configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    pub omega: f64,
    pub gravity: f64,
    pub bernoulli: f64,
}

impl Dimensionless {
    pub fn with_amplitude(self, amplitude: f64) -> ParamSet {
        ParamSet {
            amplitude,
            gravity: self.gravity,
            omega: self.omega,
            bernoulli: self.bernoulli,
        }
    }
}

/// `Omega = omega/(c k)`, `G = g/(k c^2)`, `B = b/c^2`.
pub fn nondimensionalize(
    vorticity: f64,
    gravity: f64,
    bernoulli: f64,
    speed: f64,
    wavenumber: f64,
) -> Result<Dimensionless> {
    if !(speed > 0.0) {
        return Err(Error::Domain {
            name: "c",
            value: speed,
            range: "(0, inf)",
        });
    }
    if !(wavenumber > 0.0) {
        return Err(Error::Domain {
            name: "k",
            value: wavenumber,
            range: "(0, inf)",
        });
    }
    Ok(Dimensionless {
        omega: vorticity / (speed * wavenumber),
        gravity: gravity / (wavenumber * speed * speed),
        bernoulli: bernoulli / (speed * speed),
    })
}
