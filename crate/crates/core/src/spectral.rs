//! Fourier-grid machinery on the unit circle.
//!
//! Boundary quantities are sampled at `alpha_j = 2 pi j / M`, which the disk
//! variable maps to `zeta_j = exp(-i alpha_j)`. Holomorphic functions in the
//! disk carry the reflection symmetry `w(conj z) = -conj(w(z))`, so they are
//! stored as real numbers `c_n` with `w(zeta) = sum i c_n zeta^n`. On the
//! circle this gives `Im w = sum c_n cos(n alpha)` and `Re w = sum c_n sin(n alpha)`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ParamSet;

/// Minimum admissible `|1 - i zeta w_zeta|` on the circle.
pub const STAGNATION_TOLERANCE: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real 2π-periodic function sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn zeros(m: usize) -> Self {
        Self::new(vec![0.0; m])
    }

    /// Samples `f` at `alpha_j = 2 pi j / m`.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        Self::new((0..m).map(|j| f(grid_alpha(m, j))).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest value of `|f(alpha) - f(-alpha)| / 2` over the grid.
    pub fn odd_part_max(&self) -> f64 {
        let m = self.len();
        (1..m)
            .map(|j| 0.5 * (self.values[j] - self.values[m - j]).abs())
            .fold(0.0, f64::max)
    }

    /// True when `values[j] == values[M - j]` to within `tol`.
    pub fn is_even(&self, tol: f64) -> bool {
        self.odd_part_max() <= tol
    }

    pub fn max_abs_diff(&self, other: &GridFn) -> f64 {
        assert_eq!(self.len(), other.len(), "grid functions on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    pub fn zip_with(&self, other: &GridFn, f: impl Fn(f64, f64) -> f64) -> GridFn {
        assert_eq!(self.len(), other.len(), "grid functions on different grids");
        GridFn::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFn {
        GridFn::new(self.values.iter().map(|&v| f(v)).collect())
    }
}

pub fn grid_alpha(m: usize, j: usize) -> f64 {
    2.0 * PI * j as f64 / m as f64
}

/// Truncated power series `w(zeta) = sum_{n=0}^N i c_n zeta^n` with real `c_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolomorphicBoundaryFn {
    coeffs: Vec<f64>,
}

impl HolomorphicBoundaryFn {
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a series needs at least the constant term"
        );
        Self { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![0.0; order + 1])
    }

    /// `i zeta^n` truncated at `order`.
    pub fn monomial(n: usize, order: usize) -> Self {
        assert!(n <= order);
        let mut coeffs = vec![0.0; order + 1];
        coeffs[n] = 1.0;
        Self::new(coeffs)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Copy truncated or zero-padded to `order`.
    pub fn resized(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Self::new(coeffs)
    }

    /// `self + scale * other`, padding to the larger order.
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Self {
        let order = self.order().max(other.order());
        let mut out = self.resized(order);
        for (c, o) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *c += scale * o;
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let order = self.order().max(other.order());
        let (a, b) = (self.resized(order), other.resized(order));
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .fold(0.0, |acc, (x, y)| acc.max((x - y).abs()))
    }

    pub fn eval(&self, zeta: Complex64) -> Complex64 {
        let s = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * zeta + c);
        I * s
    }

    /// `w_zeta`.
    pub fn eval_derivative(&self, zeta: Complex64) -> Complex64 {
        let s = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, (n, &c)| {
                acc * zeta + c * n as f64
            });
        I * s
    }
}

/// Boundary values of a series on the grid.
#[derive(Clone, Debug)]
pub struct BoundaryTrace {
    /// `w(zeta_j)`
    pub value: Vec<Complex64>,
    /// `zeta_j w_zeta(zeta_j)`
    pub zeta_derivative: Vec<Complex64>,
}

impl BoundaryTrace {
    pub fn imag_part(&self) -> GridFn {
        GridFn::new(self.value.iter().map(|w| w.im).collect())
    }

    /// `1 - i zeta w_zeta`, the conformal derivative `z_alpha`.
    pub fn conformal_derivative(&self) -> Vec<Complex64> {
        self.zeta_derivative.iter().map(|d| 1.0 - I * d).collect()
    }
}

/// FFT plans for a grid of `M` points and its 3M/2 dealiasing grid.
///
/// Plans are immutable and shareable across threads; every transform
/// allocates its own buffers.
#[derive(Clone)]
pub struct SpectralGrid {
    m: usize,
    fine: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    fine_forward: Arc<dyn Fft<f64>>,
    fine_inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid")
            .field("m", &self.m)
            .field("fine", &self.fine)
            .finish()
    }
}

impl SpectralGrid {
    pub fn new(m: usize) -> Result<Self> {
        if m < 4 || !m.is_multiple_of(2) {
            return Err(Error::InvalidGrid(m));
        }
        let fine = 3 * m / 2;
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            fine,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            fine_forward: planner.plan_fft_forward(fine),
            fine_inverse: planner.plan_fft_inverse(fine),
        })
    }

    pub fn points(&self) -> usize {
        self.m
    }

    pub fn alpha(&self, j: usize) -> f64 {
        grid_alpha(self.m, j)
    }

    /// `zeta_j = exp(-i alpha_j)`.
    pub fn zeta(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, -self.alpha(j))
    }

    pub fn zetas(&self) -> Vec<Complex64> {
        (0..self.m).map(|j| self.zeta(j)).collect()
    }

    /// Largest series order whose boundary trace the grid resolves.
    pub fn max_order(&self) -> usize {
        self.m / 2 - 1
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_order() {
            return Err(Error::Aliasing {
                modes: order,
                points: self.m,
                needed: 2 * order + 2,
            });
        }
        Ok(())
    }

    fn wavenumber(&self, j: usize, len: usize) -> i64 {
        if j <= len / 2 {
            j as i64
        } else {
            j as i64 - len as i64
        }
    }

    /// Normalized Fourier coefficients `f = sum_k c_k e^{i k alpha}`.
    fn coefficients(&self, f: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(f.len(), self.m);
        let mut buf: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    fn synthesize(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut coeffs);
        coeffs.into_iter().map(|c| c.re).collect()
    }

    /// Multiplies mode `k` by `symbol(k)`; the Nyquist mode is dropped.
    fn apply_symbol(&self, f: &GridFn, symbol: impl Fn(i64) -> Complex64) -> GridFn {
        self.check_len(f);
        let mut c = self.coefficients(&f.values);
        for (j, cj) in c.iter_mut().enumerate() {
            if j == self.m / 2 {
                *cj = Complex64::new(0.0, 0.0);
            } else {
                *cj *= symbol(self.wavenumber(j, self.m));
            }
        }
        GridFn::new(self.synthesize(c))
    }

    fn check_len(&self, f: &GridFn) {
        assert_eq!(
            f.len(),
            self.m,
            "grid function has {} samples, grid has {}",
            f.len(),
            self.m
        );
    }

    /// Periodic Hilbert transform, symbol `-i sgn(k)`.
    pub fn hilbert(&self, f: &GridFn) -> GridFn {
        self.apply_symbol(f, |k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    /// Finite-depth transform with symbol `-i coth(k H)` for `k != 0`.
    pub fn hilbert_finite_depth(&self, f: &GridFn, depth: f64) -> Result<GridFn> {
        if !(depth > 0.0 && depth.is_finite()) {
            return Err(Error::Domain {
                name: "depth",
                value: depth,
                range: "(0, inf)",
            });
        }
        Ok(self.apply_symbol(f, |k| {
            if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -1.0 / (k as f64 * depth).tanh())
            }
        }))
    }

    pub fn derivative(&self, f: &GridFn) -> GridFn {
        self.apply_symbol(f, |k| Complex64::new(0.0, k as f64))
    }

    /// Values on the 3M/2 grid of the band-limited function with coarse
    /// coefficients `c` (Nyquist excluded).
    fn to_fine(&self, c: &[Complex64]) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fine];
        let half = self.m / 2;
        for (j, &cj) in c.iter().enumerate() {
            if j == half {
                continue;
            }
            let k = self.wavenumber(j, self.m);
            let idx = if k >= 0 {
                k as usize
            } else {
                (self.fine as i64 + k) as usize
            };
            buf[idx] = cj;
        }
        self.fine_inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Coarse-layout coefficients of fine-grid samples, keeping `|k| < M/2`.
    fn fine_spectrum(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fine_forward.process(&mut buf);
        let scale = 1.0 / self.fine as f64;
        let half = self.m / 2;
        (0..self.m)
            .map(|j| {
                if j == half {
                    return Complex64::new(0.0, 0.0);
                }
                let k = self.wavenumber(j, self.m);
                let idx = if k >= 0 {
                    k as usize
                } else {
                    (self.fine as i64 + k) as usize
                };
                buf[idx] * scale
            })
            .collect()
    }

    /// `(y, H y_alpha)` on the fine grid.
    fn fine_pair(&self, y: &GridFn) -> (Vec<f64>, Vec<f64>) {
        let c = self.coefficients(&y.values);
        let hya: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(j, &cj)| cj * self.wavenumber(j, self.m).unsigned_abs() as f64)
            .collect();
        (self.to_fine(&c), self.to_fine(&hya))
    }

    /// Assembles `P1 - |k| P2` from fine-grid products and returns it on the grid.
    fn combine_products(&self, p1: &[f64], p2: &[f64]) -> GridFn {
        let c1 = self.fine_spectrum(p1);
        let c2 = self.fine_spectrum(p2);
        let c: Vec<Complex64> = c1
            .iter()
            .zip(&c2)
            .enumerate()
            .map(|(j, (&a, &b))| a - b * self.wavenumber(j, self.m).unsigned_abs() as f64)
            .collect();
        GridFn::new(self.synthesize(c))
    }

    /// Commutator `y H y_alpha - H(y y_alpha)` with 3/2-rule dealiased products.
    pub fn commutator_q(&self, y: &GridFn) -> GridFn {
        self.check_len(y);
        let (yf, hyaf) = self.fine_pair(y);
        let p1: Vec<f64> = yf.iter().zip(&hyaf).map(|(a, b)| a * b).collect();
        let p2: Vec<f64> = yf.iter().map(|a| 0.5 * a * a).collect();
        self.combine_products(&p1, &p2)
    }

    /// Directional derivative of [`commutator_q`](Self::commutator_q) at `y`
    /// in direction `eta`: `eta H y_a + y H eta_a - H((y eta)_a)`.
    pub fn commutator_q_derivative(&self, y: &GridFn, eta: &GridFn) -> GridFn {
        self.check_len(y);
        self.check_len(eta);
        let (yf, hyaf) = self.fine_pair(y);
        self.commutator_q_derivative_fine(&yf, &hyaf, eta)
    }

    fn commutator_q_derivative_fine(&self, yf: &[f64], hyaf: &[f64], eta: &GridFn) -> GridFn {
        let (ef, heaf) = self.fine_pair(eta);
        let p1: Vec<f64> = (0..self.fine)
            .map(|i| ef[i] * hyaf[i] + yf[i] * heaf[i])
            .collect();
        let p2: Vec<f64> = yf.iter().zip(&ef).map(|(a, b)| a * b).collect();
        self.combine_products(&p1, &p2)
    }

    /// Trapezoid evaluation of
    /// `(1/8pi) int (y(a) - y(a'))^2 csc^2((a - a')/2) da'`,
    /// with the diagonal sample replaced by its limit `4 y_alpha(a)^2`.
    pub fn commutator_q_quadrature(&self, y: &GridFn) -> GridFn {
        self.check_len(y);
        let m = self.m;
        let ya = self.derivative(y);
        let csc2: Vec<f64> = (0..m)
            .map(|d| {
                if d == 0 {
                    0.0
                } else {
                    let s = (0.5 * grid_alpha(m, d)).sin();
                    1.0 / (s * s)
                }
            })
            .collect();
        let weight = (2.0 * PI / m as f64) / (8.0 * PI);
        let v = &y.values;
        GridFn::new(
            (0..m)
                .map(|j| {
                    let mut sum = 4.0 * ya.values[j] * ya.values[j];
                    for (i, &vi) in v.iter().enumerate() {
                        if i != j {
                            let d = v[j] - vi;
                            sum += d * d * csc2[(j + m - i) % m];
                        }
                    }
                    weight * sum
                })
                .collect(),
        )
    }

    /// Boundary values of `w` and `zeta w_zeta` by one FFT each.
    pub fn boundary_trace(&self, w: &HolomorphicBoundaryFn) -> Result<BoundaryTrace> {
        self.check_order(w.order())?;
        let mut s = vec![Complex64::new(0.0, 0.0); self.m];
        let mut t = vec![Complex64::new(0.0, 0.0); self.m];
        for (n, &c) in w.coeffs().iter().enumerate() {
            s[n] = Complex64::new(c, 0.0);
            t[n] = Complex64::new(c * n as f64, 0.0);
        }
        // forward DFT: sum_n c_n exp(-i n alpha_j) = sum_n c_n zeta_j^n
        self.forward.process(&mut s);
        self.forward.process(&mut t);
        Ok(BoundaryTrace {
            value: s.into_iter().map(|v| I * v).collect(),
            zeta_derivative: t.into_iter().map(|v| I * v).collect(),
        })
    }

    /// Nonlinear residual
    /// `1/2 (1 + Omega (Im w + Q(w)))^2 / |1 - i zeta w_zeta|^2 + G Im w - B`.
    pub fn residual(&self, w: &HolomorphicBoundaryFn, params: &ParamSet) -> Result<GridFn> {
        Ok(self.linearize(w, params)?.residual)
    }

    /// Residual at `w` together with the state needed to apply its derivative.
    pub fn linearize<'g>(
        &'g self,
        w: &HolomorphicBoundaryFn,
        params: &ParamSet,
    ) -> Result<Linearization<'g>> {
        let trace = self.boundary_trace(w)?;
        let y = trace.imag_part();
        let speed = trace.conformal_derivative();
        let margin = speed.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        if !(margin > STAGNATION_TOLERANCE) {
            return Err(Error::Stagnation {
                margin,
                threshold: STAGNATION_TOLERANCE,
            });
        }
        let (yf, hyaf) = self.fine_pair(&y);
        let p1: Vec<f64> = yf.iter().zip(&hyaf).map(|(a, b)| a * b).collect();
        let p2: Vec<f64> = yf.iter().map(|a| 0.5 * a * a).collect();
        let q = self.combine_products(&p1, &p2);
        let omega = params.omega;
        let kin: Vec<f64> = (0..self.m)
            .map(|j| 1.0 + omega * (y.values[j] + q.values[j]))
            .collect();
        let speed2: Vec<f64> = speed.iter().map(|d| d.norm_sqr()).collect();
        let residual = GridFn::new(
            (0..self.m)
                .map(|j| {
                    0.5 * kin[j] * kin[j] / speed2[j] + params.gravity * y.values[j]
                        - params.bernoulli
                })
                .collect(),
        );
        Ok(Linearization {
            grid: self,
            params: *params,
            order: w.order(),
            y_fine: yf,
            hya_fine: hyaf,
            kin,
            speed,
            speed2,
            margin,
            residual,
        })
    }

    /// Cosine coefficients `a_0..a_n` of an even grid function.
    pub fn project_even(&self, f: &GridFn, n: usize) -> Result<Vec<f64>> {
        self.check_len(f);
        self.check_order(n)?;
        let c = self.coefficients(&f.values);
        Ok((0..=n)
            .map(|k| if k == 0 { c[0].re } else { 2.0 * c[k].re })
            .collect())
    }

    /// Sine coefficients `b_1..b_n` of a grid function.
    pub fn project_odd(&self, f: &GridFn, n: usize) -> Result<Vec<f64>> {
        self.check_len(f);
        self.check_order(n)?;
        let c = self.coefficients(&f.values);
        Ok((1..=n).map(|k| -2.0 * c[k].im).collect())
    }

    /// `sum_n a_n cos(n alpha)` on the grid; inverse of [`project_even`](Self::project_even).
    pub fn synthesize_even(&self, a: &[f64]) -> Result<GridFn> {
        if a.is_empty() {
            return Ok(GridFn::zeros(self.m));
        }
        self.check_order(a.len() - 1)?;
        let mut c = vec![Complex64::new(0.0, 0.0); self.m];
        c[0] = Complex64::new(a[0], 0.0);
        for (k, &ak) in a.iter().enumerate().skip(1) {
            c[k] = Complex64::new(0.5 * ak, 0.0);
            c[self.m - k] = Complex64::new(0.5 * ak, 0.0);
        }
        Ok(GridFn::new(self.synthesize(c)))
    }
}

/// Residual of the Bernoulli condition at a fixed `w` plus what is needed to
/// evaluate its Gâteaux derivative in many directions.
#[derive(Debug)]
pub struct Linearization<'g> {
    grid: &'g SpectralGrid,
    params: ParamSet,
    order: usize,
    y_fine: Vec<f64>,
    hya_fine: Vec<f64>,
    kin: Vec<f64>,
    speed: Vec<Complex64>,
    speed2: Vec<f64>,
    margin: f64,
    residual: GridFn,
}

impl Linearization<'_> {
    pub fn residual(&self) -> &GridFn {
        &self.residual
    }

    pub fn into_residual(self) -> GridFn {
        self.residual
    }

    /// `min |1 - i zeta w_zeta|` on the grid.
    pub fn stagnation_margin(&self) -> f64 {
        self.margin
    }

    /// `F_w(w) v` on the grid.
    pub fn apply(&self, v: &HolomorphicBoundaryFn) -> Result<GridFn> {
        let trace = self.grid.boundary_trace(v)?;
        Ok(self.apply_trace(&trace.imag_part(), &trace.zeta_derivative))
    }

    /// `F_w(w) (i zeta^n)`.
    pub fn apply_mode(&self, n: usize) -> GridFn {
        let m = self.grid.points();
        let mut eta = Vec::with_capacity(m);
        let mut zvz = Vec::with_capacity(m);
        for j in 0..m {
            let zn = Complex64::from_polar(1.0, -(n as f64) * self.grid.alpha(j));
            // i zeta^n has imaginary part cos(n alpha); zeta d/dzeta gives i n zeta^n
            eta.push(zn.re);
            zvz.push(I * zn * n as f64);
        }
        self.apply_trace(&GridFn::new(eta), &zvz)
    }

    fn apply_trace(&self, eta: &GridFn, zeta_vz: &[Complex64]) -> GridFn {
        let qw = self
            .grid
            .commutator_q_derivative_fine(&self.y_fine, &self.hya_fine, eta);
        let omega = self.params.omega;
        let g = self.params.gravity;
        GridFn::new(
            (0..self.grid.points())
                .map(|j| {
                    let k = self.kin[j];
                    let s2 = self.speed2[j];
                    let cross = (self.speed[j].conj() * zeta_vz[j]).im;
                    k * omega * (eta.values[j] + qw.values[j]) / s2 - k * k * cross / (s2 * s2)
                        + g * eta.values[j]
                })
                .collect(),
        )
    }

    /// Dense `(order+1)^2` Jacobian in cosine-mode rows and `i zeta^n` columns.
    pub fn jacobian(&self) -> Result<nalgebra::DMatrix<f64>> {
        let n = self.order;
        let mut jac = nalgebra::DMatrix::zeros(n + 1, n + 1);
        for col in 0..=n {
            let proj = self.grid.project_even(&self.apply_mode(col), n)?;
            for (row, v) in proj.into_iter().enumerate() {
                jac[(row, col)] = v;
            }
        }
        Ok(jac)
    }
}

/// `Im(-4 A zeta (v(zeta) - v(-A)) / (zeta + A)^2)` on the grid: the derivative
/// of the commutator at the zero-gravity solution in closed form.
pub fn closed_form_qw_at_crapper(
    grid: &SpectralGrid,
    amplitude: f64,
    v: &HolomorphicBoundaryFn,
) -> Result<GridFn> {
    let trace = grid.boundary_trace(v)?;
    let v_neg = v.eval(Complex64::new(-amplitude, 0.0));
    Ok(GridFn::new(
        (0..grid.points())
            .map(|j| {
                let z = grid.zeta(j);
                let zp = z + amplitude;
                (-4.0 * amplitude * z * (trace.value[j] - v_neg) / (zp * zp)).im
            })
            .collect(),
    ))
}
