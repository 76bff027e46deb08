//! The generalized Riemann–Hilbert operator obtained by linearizing the
//! Bernoulli residual about the zero-gravity solution, its truncations, and
//! a numerical replay of the residue calculus behind its invertibility.
//!
//! With `c(zeta) = (1 - 2 Omega) zeta (zeta - A)(zeta + 1/A) / ((zeta + A)(zeta - 1/A))`
//! the operator is
//!
//! ```text
//! L(A) v = Im( c v_zeta - Omega v + 4 A Omega zeta (v - v(-A)) / (zeta + A)^2 )
//! ```
//!
//! and `L0(A) v = Im(c v_zeta)` is its principal part.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{check_amplitude, crapper_w, omega_of_a, ParamSet};
use crate::spectral::{GridFn, HolomorphicBoundaryFn, SpectralGrid};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `c(zeta) / zeta`, with `1/A` cleared so that `A = 0` is admissible.
fn principal_ratio(amplitude: f64, omega: f64, zeta: Complex64) -> Complex64 {
    let a = amplitude;
    (1.0 - 2.0 * omega) * (zeta - a) * (a * zeta + 1.0) / ((zeta + a) * (a * zeta - 1.0))
}

fn apply_l_trace(
    grid: &SpectralGrid,
    amplitude: f64,
    value: &[Complex64],
    zeta_derivative: &[Complex64],
    v_neg: Complex64,
    principal_only: bool,
) -> Result<GridFn> {
    check_amplitude(amplitude)?;
    let a = amplitude;
    let omega = omega_of_a(a)?;
    Ok(GridFn::new(
        (0..grid.points())
            .map(|j| {
                let z = grid.zeta(j);
                let mut s = principal_ratio(a, omega, z) * zeta_derivative[j];
                if !principal_only {
                    let zp = z + a;
                    s += -omega * value[j] + 4.0 * a * omega * z * (value[j] - v_neg) / (zp * zp);
                }
                s.im
            })
            .collect(),
    ))
}

/// `L(A) v` on the grid.
pub fn apply_l(grid: &SpectralGrid, amplitude: f64, v: &HolomorphicBoundaryFn) -> Result<GridFn> {
    let tr = grid.boundary_trace(v)?;
    let v_neg = v.eval(Complex64::new(-amplitude, 0.0));
    apply_l_trace(
        grid,
        amplitude,
        &tr.value,
        &tr.zeta_derivative,
        v_neg,
        false,
    )
}

/// Principal part `L0(A) v = Im(c v_zeta)` on the grid.
pub fn apply_l0(grid: &SpectralGrid, amplitude: f64, v: &HolomorphicBoundaryFn) -> Result<GridFn> {
    let tr = grid.boundary_trace(v)?;
    apply_l_trace(
        grid,
        amplitude,
        &tr.value,
        &tr.zeta_derivative,
        Complex64::new(0.0, 0.0),
        true,
    )
}

fn apply_l_mode(grid: &SpectralGrid, amplitude: f64, n: usize) -> Result<GridFn> {
    let m = grid.points();
    let value: Vec<Complex64> = (0..m)
        .map(|j| I * Complex64::from_polar(1.0, -(n as f64) * grid.alpha(j)))
        .collect();
    let zvz: Vec<Complex64> = value.iter().map(|v| v * n as f64).collect();
    let v_neg = I * (-amplitude).powi(n as i32);
    apply_l_trace(grid, amplitude, &value, &zvz, v_neg, false)
}

/// `min |c(zeta)|` over the grid; positive for every `A` in `[0, 1/2)`.
pub fn principal_coefficient_inf(amplitude: f64, points: usize) -> Result<f64> {
    check_amplitude(amplitude)?;
    let omega = omega_of_a(amplitude)?;
    Ok((0..points)
        .map(|j| {
            let z = Complex64::from_polar(1.0, -2.0 * PI * j as f64 / points as f64);
            principal_ratio(amplitude, omega, z).norm()
        })
        .fold(f64::INFINITY, f64::min))
}

/// Dense truncation of `L(A)`: column `n` holds the cosine coefficients of `L(A)(i zeta^n)`.
#[derive(Clone, Debug)]
pub struct LinearMatrix {
    pub entries: DMatrix<f64>,
    pub amplitude: f64,
    pub modes: usize,
}

impl LinearMatrix {
    pub fn min_singular_value(&self) -> f64 {
        min_singular_value(self)
    }
}

/// Grid size used for matrix truncations with `modes` modes.
pub fn default_points(modes: usize) -> usize {
    (4 * modes).max(16)
}

pub fn assemble_l_matrix(amplitude: f64, modes: usize) -> Result<LinearMatrix> {
    let grid = SpectralGrid::new(default_points(modes))?;
    assemble_l_matrix_on(&grid, amplitude, modes)
}

pub fn assemble_l_matrix_on(
    grid: &SpectralGrid,
    amplitude: f64,
    modes: usize,
) -> Result<LinearMatrix> {
    check_amplitude(amplitude)?;
    let mut entries = DMatrix::zeros(modes + 1, modes + 1);
    for n in 0..=modes {
        let col = grid.project_even(&apply_l_mode(grid, amplitude, n)?, modes)?;
        for (row, v) in col.into_iter().enumerate() {
            entries[(row, n)] = v;
        }
    }
    Ok(LinearMatrix {
        entries,
        amplitude,
        modes,
    })
}

pub fn min_singular_value(matrix: &LinearMatrix) -> f64 {
    matrix
        .entries
        .clone()
        .svd(false, false)
        .singular_values
        .min()
}

/// Max-norm of `F_w(w(A); 0, A) v + (1 - 2 Omega) R(zeta) L(A) v` on the grid,
/// with `R = (zeta + A)(zeta + 1/A) / ((zeta - A)(zeta - 1/A))`.
pub fn factorization_residual(
    grid: &SpectralGrid,
    amplitude: f64,
    v: &HolomorphicBoundaryFn,
) -> Result<f64> {
    let params = ParamSet::zero_gravity(amplitude)?;
    let w = crapper_w(amplitude, grid.max_order())?;
    let lin = grid.linearize(&w, &params)?;
    let fw = lin.apply(v)?;
    let l = apply_l(grid, amplitude, v)?;
    let a = amplitude;
    let omega = params.omega;
    Ok((0..grid.points())
        .map(|j| {
            let z = grid.zeta(j);
            let r = ((z + a) * (a * z + 1.0) / ((z - a) * (a * z - 1.0))).re;
            (fw.values()[j] + (1.0 - 2.0 * omega) * r * l.values()[j]).abs()
        })
        .fold(0.0, f64::max))
}

/// Settings for trapezoid contour quadrature on a circle.
#[derive(Clone, Copy, Debug)]
pub struct ContourOptions {
    pub nodes: usize,
    pub max_nodes: usize,
    /// Relative change under node doubling accepted as converged.
    pub tolerance: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            nodes: 256,
            max_nodes: 1 << 16,
            tolerance: 1e-13,
        }
    }
}

fn trapezoid_laurent(
    f: &impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    power: i32,
    nodes: usize,
) -> Complex64 {
    // a_j = (1/2 pi i) oint f (zeta - c)^{-j-1} d zeta = mean of f (zeta - c)^{-j}
    let sum: Complex64 = (0..nodes)
        .map(|k| {
            let d = Complex64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
            f(center + d) * d.powi(-power)
        })
        .sum();
    sum / nodes as f64
}

/// Laurent coefficient of `f` at `center` of the given power, from the
/// trapezoid rule on a circle, doubling the node count until it settles.
pub fn contour_laurent(
    f: impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
    power: i32,
    opts: ContourOptions,
) -> Result<Complex64> {
    let mut nodes = opts.nodes.max(4);
    let mut prev = trapezoid_laurent(&f, center, radius, power, nodes);
    let mut change = f64::INFINITY;
    while nodes < opts.max_nodes {
        nodes *= 2;
        let next = trapezoid_laurent(&f, center, radius, power, nodes);
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        change = (next - prev).norm();
        if change <= opts.tolerance * next.norm().max(1.0) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature {
        change,
        points: nodes,
    })
}

/// `(1/2 pi i) oint f d zeta` around `center`.
pub fn contour_residue(
    f: impl Fn(Complex64) -> Complex64,
    center: Complex64,
    radius: f64,
) -> Result<Complex64> {
    contour_laurent(f, center, radius, -1, ContourOptions::default())
}

/// Half the distance from `center` to the nearest other pole of `{0, A, -A, -1/A}`.
pub fn default_radius(amplitude: f64, center: Complex64) -> f64 {
    [0.0, amplitude, -amplitude, -1.0 / amplitude]
        .iter()
        .map(|&p| (Complex64::new(p, 0.0) - center).norm())
        .filter(|&d| d > 1e-12)
        .fold(f64::INFINITY, f64::min)
        * 0.5
}

/// Coefficient `p` of the ODE `v_zeta + p v = q` in product form.
pub fn ode_p(amplitude: f64, zeta: Complex64) -> Complex64 {
    let a = amplitude;
    let omega = (1.0 - a * a) / (1.0 - 3.0 * a * a);
    -omega / (1.0 - 2.0 * omega) * (zeta - a) * (a * zeta - 1.0)
        / (zeta * (zeta + a) * (a * zeta + 1.0))
}

/// Right-hand side `q` in product form for a given `v(-A)` and residue weight `f_{-1}`.
pub fn ode_q(amplitude: f64, v_at_neg_a: Complex64, f_minus1: f64, zeta: Complex64) -> Complex64 {
    let a = amplitude;
    let omega = (1.0 - a * a) / (1.0 - 3.0 * a * a);
    let zp = zeta + a;
    let bracket = 4.0 * a * omega * v_at_neg_a * zeta / (zp * zp)
        + I * f_minus1 / zp
        + I * f_minus1 / (a * (a * zeta + 1.0))
        - I * f_minus1 / a;
    zp * (a * zeta - 1.0) / ((1.0 - 2.0 * omega) * zeta * (zeta - a) * (a * zeta + 1.0)) * bracket
}

/// `q` after eliminating `f_{-1}`:
/// `2 v(-A) (1/z - 1/(z + A) - 1/(z + 1/A) + 2(1 - A^2)/(A(1 + A^2)) / (z + 1/A)^2)`.
pub fn ode_q_eliminated(amplitude: f64, v_at_neg_a: Complex64, zeta: Complex64) -> Complex64 {
    let a = amplitude;
    let a2 = a * a;
    let d = a * zeta + 1.0;
    2.0 * v_at_neg_a
        * (1.0 / zeta - 1.0 / (zeta + a) - a / d + 2.0 * a * (1.0 - a2) / ((1.0 + a2) * d * d))
}

/// The same expression with the alternate last coefficient
/// `2A(1 - A^2)/(1 + A^2)`; kept to show that it disagrees.
fn ode_q_eliminated_alternate(amplitude: f64, v_at_neg_a: Complex64, zeta: Complex64) -> Complex64 {
    let a = amplitude;
    let a2 = a * a;
    let d = a * zeta + 1.0;
    2.0 * v_at_neg_a
        * (1.0 / zeta - 1.0 / (zeta + a) - a / d + 2.0 * a * a2 * (1.0 - a2) / ((1.0 + a2) * d * d))
}

/// `f_{-1} = sign * 2iA(1 + A^2) v(-A) / (1 - 3A^exponent)`.
pub fn f_minus1_candidate(
    amplitude: f64,
    v_at_neg_a: Complex64,
    sign: f64,
    exponent: i32,
) -> Complex64 {
    let a = amplitude;
    sign * 2.0 * I * a * (1.0 + a * a) * v_at_neg_a / (1.0 - 3.0 * a.powi(exponent))
}

/// Residues and expansion coefficients of `p` and `q` in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeromorphicCoefficients {
    pub amplitude: f64,
    pub f_minus1: f64,
    pub v_at_neg_a: Complex64,
    pub p_res_0: Complex64,
    pub p_res_a: Complex64,
    pub p_res_neg_a: Complex64,
    pub p0: Complex64,
    pub p1: Complex64,
    pub q_res_a: Complex64,
    pub q_res_neg_a: Complex64,
    pub q0: Complex64,
    pub q1: Complex64,
}

impl MeromorphicCoefficients {
    /// `(p0^2 + p1) v(-A) - p0 q0 - q1`.
    pub fn holomorphy_combination(&self) -> Complex64 {
        (self.p0 * self.p0 + self.p1) * self.v_at_neg_a - self.p0 * self.q0 - self.q1
    }
}

pub fn ode_coefficients(
    amplitude: f64,
    v_at_neg_a: Complex64,
    f_minus1: f64,
) -> Result<MeromorphicCoefficients> {
    if !(amplitude > 0.0 && amplitude < 0.5) {
        return Err(Error::Domain {
            name: "A",
            value: amplitude,
            range: "(0, 1/2)",
        });
    }
    let a = amplitude;
    let a2 = a * a;
    let (a4, a6) = (a2 * a2, a2 * a2 * a2);
    let (m, p) = (1.0 - a2, 1.0 + a2);
    let v = v_at_neg_a;
    let c = |x: f64| Complex64::new(x, 0.0);
    Ok(MeromorphicCoefficients {
        amplitude,
        f_minus1,
        v_at_neg_a,
        p_res_0: c(m / p),
        p_res_a: c(0.0),
        p_res_neg_a: c(-2.0),
        p0: c(-(1.0 - 4.0 * a2 - a4) / (a * m * p)),
        p1: c(-(1.0 - 3.0 * a2 + 5.0 * a4 + a6) / (a2 * m * m * p)),
        q_res_a: 2.0 * m * m / (p * p) * v
            + I * m * m * (1.0 - 3.0 * a2) / (a * p * p * p) * f_minus1,
        q_res_neg_a: -2.0 * v,
        q0: -2.0 * v / (a * p),
        q1: -2.0 * (1.0 - a2 + 2.0 * a4) * v / (a2 * m * m * p),
    })
}

/// One numerically replayed identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaItem {
    pub name: String,
    pub computed: Complex64,
    pub expected: Complex64,
    pub error: f64,
}

/// Residue of `q` at `A` for one candidate form of `f_{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenominatorCandidate {
    pub sign: f64,
    pub exponent: i32,
    pub residue_abs: f64,
}

/// Which form of `f_{-1}` makes `Res(q, A)` vanish.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenominatorVerdict {
    pub exponent: i32,
    pub sign: f64,
    pub candidates: Vec<DenominatorCandidate>,
    /// Whether `-2iA(1 + A^2) v(-A) / (1 - 3A^3)` annihilates the residue.
    pub cubic_form_vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub amplitude: f64,
    pub v_at_neg_a: Complex64,
    pub f_minus1: f64,
    pub verdict: DenominatorVerdict,
    pub items: Vec<LemmaItem>,
    pub res_p_at_0_in_unit_interval: bool,
    /// Exponent `(A^2 - 1)/(A^2 + 1)` of the multi-valued kernel candidate.
    pub monodromy_exponent: f64,
    /// Max deviation of the eliminated `q` with the alternate coefficient.
    pub alternate_q_coefficient_error: f64,
}

impl LemmaReport {
    pub fn max_error(&self) -> f64 {
        self.items.iter().map(|i| i.error).fold(0.0, f64::max)
    }

    pub fn item(&self, name: &str) -> Option<&LemmaItem> {
        self.items.iter().find(|i| i.name == name)
    }
}

fn item(name: &str, computed: Complex64, expected: Complex64) -> LemmaItem {
    LemmaItem {
        name: name.to_string(),
        computed,
        expected,
        error: (computed - expected).norm(),
    }
}

/// Replays the residue identities of the invertibility argument with contour
/// quadrature as the independent route. `v_at_neg_a` should be purely
/// imaginary, as the symmetry of the function space forces.
pub fn lemma_checks(amplitude: f64, v_at_neg_a: Complex64) -> Result<LemmaReport> {
    let a = amplitude;
    let closed = ode_coefficients(a, v_at_neg_a, 0.0)?;
    let opts = ContourOptions::default();
    let at_a = Complex64::new(a, 0.0);
    let at_neg_a = Complex64::new(-a, 0.0);
    let origin = Complex64::new(0.0, 0.0);
    let r_a = default_radius(a, at_a);
    let r_neg = default_radius(a, at_neg_a);
    let r_0 = default_radius(a, origin);

    // verdict on the form of f_{-1}, probed with v(-A) = i
    let probe = I;
    let mut candidates = Vec::new();
    for exponent in [2, 3] {
        for sign in [1.0, -1.0] {
            let f = f_minus1_candidate(a, probe, sign, exponent).re;
            let res = contour_residue(|z| ode_q(a, probe, f, z), at_a, r_a)?;
            candidates.push(DenominatorCandidate {
                sign,
                exponent,
                residue_abs: res.norm(),
            });
        }
    }
    let best = *candidates
        .iter()
        .min_by(|x, y| x.residue_abs.total_cmp(&y.residue_abs))
        .expect("four candidates");
    let cubic = candidates
        .iter()
        .find(|c| c.exponent == 3 && c.sign < 0.0)
        .expect("cubic candidate");
    let verdict = DenominatorVerdict {
        exponent: best.exponent,
        sign: best.sign,
        cubic_form_vanishes: cubic.residue_abs < 1e-10,
        candidates,
    };

    let f_minus1 = f_minus1_candidate(a, v_at_neg_a, verdict.sign, verdict.exponent).re;
    let p = |z| ode_p(a, z);
    let q = |z| ode_q(a, v_at_neg_a, f_minus1, z);
    let zero = Complex64::new(0.0, 0.0);

    let mut items = vec![
        item("res_p_at_A", contour_residue(p, at_a, r_a)?, closed.p_res_a),
        item(
            "res_p_at_minus_A",
            contour_residue(p, at_neg_a, r_neg)?,
            closed.p_res_neg_a,
        ),
        item(
            "res_p_at_0",
            contour_residue(p, origin, r_0)?,
            closed.p_res_0,
        ),
        item("res_q_at_A", contour_residue(q, at_a, r_a)?, zero),
    ];

    // pointwise agreement of q with its eliminated form on a circle between A and 1
    let radius = 0.5 * (a + 1.0);
    let mut worst = (zero, zero, 0.0);
    let mut alternate_err: f64 = 0.0;
    for k in 0..64 {
        let z = Complex64::from_polar(radius, 2.0 * PI * (k as f64 + 0.5) / 64.0);
        let (lhs, rhs) = (q(z), ode_q_eliminated(a, v_at_neg_a, z));
        if (lhs - rhs).norm() >= worst.2 {
            worst = (lhs, rhs, (lhs - rhs).norm());
        }
        alternate_err =
            alternate_err.max((lhs - ode_q_eliminated_alternate(a, v_at_neg_a, z)).norm());
    }
    items.push(item("eliminated_q", worst.0, worst.1));
    items.push(item(
        "res_q_at_minus_A",
        contour_residue(q, at_neg_a, r_neg)?,
        closed.q_res_neg_a,
    ));

    let p0 = contour_laurent(p, at_neg_a, r_neg, 0, opts)?;
    let p1 = contour_laurent(p, at_neg_a, r_neg, 1, opts)?;
    let q0 = contour_laurent(q, at_neg_a, r_neg, 0, opts)?;
    let q1 = contour_laurent(q, at_neg_a, r_neg, 1, opts)?;
    items.push(item("p0", p0, closed.p0));
    items.push(item("p1", p1, closed.p1));
    items.push(item("q0", q0, closed.q0));
    items.push(item("q1", q1, closed.q1));
    let combination = (p0 * p0 + p1) * v_at_neg_a - p0 * q0 - q1;
    let m = 1.0 - a * a;
    items.push(item(
        "final_identity",
        combination,
        4.0 * v_at_neg_a / (m * m),
    ));

    let res_p0 = items[2].computed;
    Ok(LemmaReport {
        amplitude: a,
        v_at_neg_a,
        f_minus1,
        verdict,
        items,
        res_p_at_0_in_unit_interval: res_p0.re > 0.0 && res_p0.re < 1.0 && res_p0.im.abs() < 1e-10,
        monodromy_exponent: (a * a - 1.0) / (a * a + 1.0),
        alternate_q_coefficient_error: alternate_err,
    })
}
