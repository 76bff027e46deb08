//! Profile reconstruction, overhang and self-intersection analysis, and the
//! bisection for the amplitude at which a profile first touches itself.
//!
//! Self-intersections are zeros of
//! `f(a, b) = (z(a) - z(b)) / (a - b)` with `b` ranging over the real line and
//! `z(b + 2 pi) = z(b) + 2 pi`. For profiles symmetric about the trough line,
//! pairs `(a, 2 pi m - a)` reduce `f` to the real gap `(x(a) - m pi) / (a - m pi)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{continue_in_g, ContinuationOptions};
use crate::spectral::{grid_alpha, HolomorphicBoundaryFn, SpectralGrid};

const TWO_PI: f64 = 2.0 * PI;

/// Samples of `z(alpha) = x + i y` on `alpha_j = 2 pi j / M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub alpha: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `min |z_alpha|` over the samples.
    pub stagnation_margin: f64,
}

impl ProfileCurve {
    pub fn new(alpha: Vec<f64>, x: Vec<f64>, y: Vec<f64>, stagnation_margin: f64) -> Self {
        assert!(alpha.len() == x.len() && x.len() == y.len());
        Self {
            alpha,
            x,
            y,
            stagnation_margin,
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn interpolant(&self) -> ProfileInterpolant {
        ProfileInterpolant::new(self)
    }

    /// `(x_alpha, y_alpha)` on the samples by spectral differentiation.
    pub fn derivatives(&self) -> (Vec<f64>, Vec<f64>) {
        let it = self.interpolant();
        self.alpha
            .iter()
            .map(|&a| {
                let d = it.eval_derivative(a);
                (d.re, d.im)
            })
            .unzip()
    }

    /// Max deviation from `x(-a) = -x(a)`, `y(-a) = y(a)` on the samples.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.len();
        (1..m)
            .map(|j| {
                let k = m - j;
                let dx = (self.x[k] - (TWO_PI - self.x[j])).abs();
                let dy = (self.y[k] - self.y[j]).abs();
                dx.max(dy)
            })
            .fold(self.x.first().map_or(0.0, |x| x.abs()), f64::max)
    }
}

/// Trigonometric interpolant of the periodic part `z(alpha) - alpha`.
#[derive(Clone, Debug)]
pub struct ProfileInterpolant {
    mean: Complex64,
    /// `(k, c_k, c_{-k})` for `k >= 1`.
    modes: Vec<(f64, Complex64, Complex64)>,
    nyquist: Option<(f64, Complex64)>,
}

impl ProfileInterpolant {
    pub fn new(p: &ProfileCurve) -> Self {
        let m = p.len();
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(p.x[j] - p.alpha[j], p.y[j]))
            .collect();
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        for c in buf.iter_mut() {
            *c /= m as f64;
        }
        let scale = buf.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let cut = 1e-18 * scale;
        let half = m / 2;
        let last = (1..half)
            .rev()
            .find(|&k| buf[k].norm() + buf[m - k].norm() > cut)
            .unwrap_or(0);
        let modes = (1..=last).map(|k| (k as f64, buf[k], buf[m - k])).collect();
        let nyquist =
            (m.is_multiple_of(2) && buf[half].norm() > cut).then(|| (half as f64, buf[half]));
        Self {
            mean: buf[0],
            modes,
            nyquist,
        }
    }

    /// `(z, z_alpha, z_alpha_alpha)` at any `alpha`.
    pub fn eval_all(&self, alpha: f64) -> (Complex64, Complex64, Complex64) {
        let e = Complex64::from_polar(1.0, alpha);
        let mut p = Complex64::new(1.0, 0.0);
        let mut z = self.mean;
        let mut dz = Complex64::new(0.0, 0.0);
        let mut ddz = Complex64::new(0.0, 0.0);
        for &(k, cp, cm) in &self.modes {
            p *= e;
            let pc = p.conj();
            let (a, b) = (cp * p, cm * pc);
            z += a + b;
            dz += Complex64::new(0.0, k) * (a - b);
            ddz -= k * k * (a + b);
        }
        if let Some((k, c)) = self.nyquist {
            let (s, co) = (k * alpha).sin_cos();
            z += c * co;
            dz -= c * (k * s);
            ddz -= c * (k * k * co);
        }
        (z + alpha, dz + 1.0, ddz)
    }

    pub fn eval(&self, alpha: f64) -> Complex64 {
        self.eval_all(alpha).0
    }

    pub fn eval_derivative(&self, alpha: f64) -> Complex64 {
        self.eval_all(alpha).1
    }
}

/// `z(alpha) = alpha + w(e^{-i alpha})` on `M` points.
pub fn reconstruct_profile(w: &HolomorphicBoundaryFn, points: usize) -> Result<ProfileCurve> {
    let grid = SpectralGrid::new(points)?;
    let tr = grid.boundary_trace(w)?;
    let margin = tr
        .conformal_derivative()
        .iter()
        .map(|d| d.norm())
        .fold(f64::INFINITY, f64::min);
    if !(margin > 0.0) {
        return Err(Error::Stagnation {
            margin,
            threshold: 0.0,
        });
    }
    let alpha: Vec<f64> = (0..points).map(|j| grid_alpha(points, j)).collect();
    let x = alpha.iter().zip(&tr.value).map(|(a, v)| a + v.re).collect();
    let y = tr.value.iter().map(|v| v.im).collect();
    Ok(ProfileCurve::new(alpha, x, y, margin))
}

/// `y(pi) - y(0)` from the samples.
pub fn crest_trough_height(p: &ProfileCurve) -> f64 {
    p.y[p.len() / 2] - p.y[0]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OverhangReport {
    pub overhanging: bool,
    /// Parameter value where `x_alpha` is smallest.
    pub witness_alpha: f64,
    pub min_x_alpha: f64,
}

/// Whether `x_alpha` changes sign, from a grid scan refined by golden section.
pub fn is_overhanging(p: &ProfileCurve) -> OverhangReport {
    let it = p.interpolant();
    let m = p.len();
    let xa: Vec<f64> = p.alpha.iter().map(|&a| it.eval_derivative(a).re).collect();
    let lowest = xa.iter().copied().fold(f64::INFINITY, f64::min);
    // the mirror image of the minimizer ties with it; take the first
    let j = (0..m)
        .find(|&j| xa[j] <= lowest + 1e-12 * (1.0 + lowest.abs()))
        .unwrap_or(0);
    let h = TWO_PI / m as f64;
    let (a, v) = golden_min(
        |a| it.eval_derivative(a).re,
        p.alpha[j] - h,
        p.alpha[j] + h,
        1e-12,
    );
    let (witness_alpha, min_x_alpha) = if v < xa[j] {
        (a, v)
    } else {
        (p.alpha[j], xa[j])
    };
    OverhangReport {
        overhanging: min_x_alpha < 0.0,
        witness_alpha: witness_alpha.rem_euclid(TWO_PI),
        min_x_alpha,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    None,
    Transversal,
    Tangential,
}

/// Which vertical symmetry line an intersection lies on, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryLine {
    Trough,
    Crest,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub alpha: f64,
    pub alpha_prime: f64,
    pub x: f64,
    pub y: f64,
    pub tangential: bool,
    pub line: SymmetryLine,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub count: usize,
    pub locations: Vec<IntersectionPoint>,
    pub classification: Classification,
    /// Smallest `|f|` met by the search, zero when the curve crosses itself.
    pub min_gap: f64,
    /// Whether the one-dimensional search on the symmetry lines was used.
    pub symmetric_search: bool,
    /// Candidates whose refinement did not reach a zero.
    pub unconverged_candidates: usize,
}

impl IntersectionReport {
    fn from_points(
        mut pts: Vec<IntersectionPoint>,
        min_gap: f64,
        symmetric: bool,
        unconverged: usize,
    ) -> Self {
        pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        let classification = if pts.is_empty() {
            Classification::None
        } else if pts.iter().any(|p| p.tangential) {
            Classification::Tangential
        } else {
            Classification::Transversal
        };
        Self {
            count: pts.len(),
            locations: pts,
            classification,
            min_gap,
            symmetric_search: symmetric,
            unconverged_candidates: unconverged,
        }
    }

    pub fn on_trough_line(&self) -> usize {
        self.locations
            .iter()
            .filter(|p| p.line == SymmetryLine::Trough)
            .count()
    }
}

/// Tolerances of the intersection search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionOptions {
    /// 2D candidates are grid minima of `|f|` below this fraction of the median.
    pub candidate_ratio: f64,
    /// Zeros closer than this in parameter merge into one tangential point.
    pub merge_distance: f64,
    /// Normalized tangent cross product below which a zero is tangential.
    pub tangency_det: f64,
    pub dedup_radius: f64,
    /// A gap extremum this close to zero counts as a touch.
    pub touch_gap: f64,
    /// Sample-level symmetry defect allowed for the one-dimensional search.
    pub symmetry_tol: f64,
    /// Scan resolution of the one-dimensional search; `max(4M, 2048)` when zero.
    pub scan_points: usize,
}

impl Default for IntersectionOptions {
    fn default() -> Self {
        Self {
            candidate_ratio: 0.2,
            merge_distance: 1e-5,
            tangency_det: 1e-8,
            dedup_radius: 1e-4,
            touch_gap: 1e-10,
            symmetry_tol: 1e-10,
            scan_points: 0,
        }
    }
}

pub fn self_intersections(p: &ProfileCurve) -> Result<IntersectionReport> {
    self_intersections_with(p, &IntersectionOptions::default())
}

pub fn self_intersections_with(
    p: &ProfileCurve,
    opts: &IntersectionOptions,
) -> Result<IntersectionReport> {
    check_profile(p)?;
    let scale = p.x.iter().chain(&p.y).fold(1.0f64, |m, v| m.max(v.abs()));
    if p.symmetry_defect() <= opts.symmetry_tol * scale {
        Ok(symmetric_search(p, opts))
    } else {
        Ok(torus_search(p, opts))
    }
}

/// The full two-dimensional search, whatever the symmetry of the profile.
pub fn self_intersections_full(
    p: &ProfileCurve,
    opts: &IntersectionOptions,
) -> Result<IntersectionReport> {
    check_profile(p)?;
    Ok(torus_search(p, opts))
}

fn check_profile(p: &ProfileCurve) -> Result<()> {
    if p.len() < 4 || !p.len().is_multiple_of(2) {
        return Err(Error::InvalidGrid(p.len()));
    }
    if !(p.stagnation_margin > 0.0) {
        return Err(Error::Stagnation {
            margin: p.stagnation_margin,
            threshold: 0.0,
        });
    }
    Ok(())
}

fn line_of(x: f64) -> SymmetryLine {
    let r = x.rem_euclid(TWO_PI);
    if r.min(TWO_PI - r) < 1e-6 {
        SymmetryLine::Trough
    } else if (r - PI).abs() < 1e-6 {
        SymmetryLine::Crest
    } else {
        SymmetryLine::Neither
    }
}

/// `|cross(t1, t2)| / (|t1| |t2|)`.
fn tangent_sine(t1: Complex64, t2: Complex64) -> f64 {
    (t1.conj() * t2).im.abs() / (t1.norm() * t2.norm())
}

fn symmetric_search(p: &ProfileCurve, opts: &IntersectionOptions) -> IntersectionReport {
    let it = p.interpolant();
    let s = if opts.scan_points == 0 {
        (4 * p.len()).max(2048)
    } else {
        opts.scan_points
    };
    let grid: Vec<f64> = (0..=s).map(|i| PI * i as f64 / s as f64).collect();
    let samples: Vec<(f64, f64)> = grid
        .iter()
        .map(|&a| {
            let (z, dz, _) = it.eval_all(a);
            (z.re, dz.re)
        })
        .collect();

    let mut points = Vec::new();
    let mut min_gap = f64::INFINITY;
    for m in -1i32..=2 {
        let shift = m as f64 * PI;
        let gap = |a: f64| {
            let d = a - shift;
            if d.abs() < 1e-7 {
                // removable value at the diagonal
                it.eval_derivative(a).re
            } else {
                (it.eval(a).re - shift) / d
            }
        };
        let h: Vec<f64> = grid
            .iter()
            .zip(&samples)
            .map(|(&a, &(x, xa))| {
                let d = a - shift;
                if d.abs() < 1e-7 {
                    xa
                } else {
                    (x - shift) / d
                }
            })
            .collect();
        min_gap = min_gap.min(h.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs())));

        // (location, tangential)
        let mut zeros: Vec<(f64, bool)> = Vec::new();
        for i in 0..s {
            if h[i] == 0.0 {
                zeros.push((grid[i], false));
            } else if h[i] * h[i + 1] < 0.0 {
                zeros.push((bisect_root(gap, grid[i], grid[i + 1]), false));
            }
        }
        if h[s] == 0.0 {
            zeros.push((grid[s], false));
        }
        for i in 1..s {
            let sign = h[i].signum();
            let dip = sign * h[i] <= sign * h[i - 1] && sign * h[i] <= sign * h[i + 1];
            if !dip || h[i - 1] * sign <= 0.0 || h[i + 1] * sign <= 0.0 {
                continue;
            }
            let (a, v) = golden_min(|a| sign * gap(a), grid[i - 1], grid[i + 1], 1e-12);
            min_gap = min_gap.min(v.abs());
            if v < 0.0 {
                zeros.push((bisect_root(gap, grid[i - 1], a), false));
                zeros.push((bisect_root(gap, a, grid[i + 1]), false));
            } else if v <= opts.touch_gap {
                zeros.push((a, true));
            }
        }
        zeros.sort_by(|a, b| a.0.total_cmp(&b.0));
        zeros.dedup_by(|b, a| (b.0 - a.0).abs() < 1e-12);

        let mut merged: Vec<(f64, bool)> = Vec::new();
        for z in zeros {
            match merged.last_mut() {
                Some(last) if z.0 - last.0 < opts.merge_distance => {
                    *last = (0.5 * (last.0 + z.0), true);
                }
                _ => merged.push(z),
            }
        }
        for (a, touch) in merged {
            let (z, dz, _) = it.eval_all(a);
            let a2 = 2.0 * shift - a;
            let dz2 = it.eval_derivative(a2);
            let tangential = touch || tangent_sine(dz, dz2) < opts.tangency_det;
            points.push(IntersectionPoint {
                alpha: a,
                alpha_prime: a2.rem_euclid(TWO_PI),
                x: z.re,
                y: z.im,
                tangential,
                line: if m.rem_euclid(2) == 0 {
                    SymmetryLine::Trough
                } else {
                    SymmetryLine::Crest
                },
            });
        }
    }
    IntersectionReport::from_points(points, min_gap, true, 0)
}

fn torus_search(p: &ProfileCurve, opts: &IntersectionOptions) -> IntersectionReport {
    let it = p.interpolant();
    let m = p.len();
    let z: Vec<Complex64> = (0..m).map(|j| Complex64::new(p.x[j], p.y[j])).collect();
    // z at alpha_i + 2 pi j / m for j in 0..m, unwrapped past 2 pi
    let z_shift = |i: usize, j: usize| {
        let k = i + j;
        if k >= m {
            z[k - m] + TWO_PI
        } else {
            z[k]
        }
    };
    let h = TWO_PI / m as f64;
    let mut points: Vec<IntersectionPoint> = Vec::new();
    let mut unconverged = 0;
    let mut min_gap = f64::INFINITY;

    for shift in -1i32..=2 {
        let k = shift as f64 * TWO_PI;
        // |f| on i in 0..m, j in 1..m
        let mut f = vec![0.0; m * m];
        for i in 0..m {
            for j in 1..m {
                let s = j as f64 * h;
                f[i * m + j] = ((z_shift(i, j) - z[i] - k) / (s - k)).norm();
            }
            let dz = it.eval_derivative(p.alpha[i]).norm();
            f[i * m] = dz;
        }
        let mut sorted: Vec<f64> = f.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        min_gap = min_gap.min(sorted[0]);
        let threshold = opts.candidate_ratio * median;

        for i in 0..m {
            for j in 1..m {
                let v = f[i * m + j];
                if v >= threshold {
                    continue;
                }
                let nb = [
                    ((i + m - 1) % m, j),
                    ((i + 1) % m, j),
                    (i, j - 1),
                    (i, (j + 1) % m),
                ];
                if nb.iter().any(|&(a, b)| f[a * m + b] < v) {
                    continue;
                }
                match refine_pair(&it, p.alpha[i], j as f64 * h, k) {
                    Some((a, s, sine)) => {
                        let zp = it.eval(a);
                        let a2 = (a + s).rem_euclid(TWO_PI);
                        let a1 = a.rem_euclid(TWO_PI);
                        let (lo, hi) = if a1 <= a2 { (a1, a2) } else { (a2, a1) };
                        let dup = points.iter().any(|q| {
                            let d1 = periodic_distance(q.alpha, lo);
                            let d2 = periodic_distance(q.alpha_prime, hi);
                            d1.hypot(d2) < opts.dedup_radius
                        });
                        min_gap = 0.0;
                        if !dup {
                            points.push(IntersectionPoint {
                                alpha: lo,
                                alpha_prime: hi,
                                x: zp.re,
                                y: zp.im,
                                tangential: sine < opts.tangency_det,
                                line: line_of(zp.re),
                            });
                        }
                    }
                    None => unconverged += 1,
                }
            }
        }
    }

    points.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let mut merged: Vec<IntersectionPoint> = Vec::new();
    for q in points {
        match merged.last_mut() {
            Some(last)
                if periodic_distance(last.alpha, q.alpha)
                    .hypot(periodic_distance(last.alpha_prime, q.alpha_prime))
                    < opts.merge_distance =>
            {
                last.tangential = true;
            }
            _ => merged.push(q),
        }
    }
    IntersectionReport::from_points(merged, min_gap, false, unconverged)
}

fn periodic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TWO_PI);
    d.min(TWO_PI - d)
}

/// Damped Newton on `z(a + s) - z(a) - k = 0`; returns `(a, s, tangent sine)`.
fn refine_pair(it: &ProfileInterpolant, a0: f64, s0: f64, k: f64) -> Option<(f64, f64, f64)> {
    let (mut a, mut s) = (a0, s0);
    let resid = |a: f64, s: f64| it.eval(a + s) - it.eval(a) - k;
    let mut e = resid(a, s);
    for _ in 0..100 {
        if e.norm() < 1e-13 {
            break;
        }
        let (d1, d2) = (it.eval_derivative(a), it.eval_derivative(a + s));
        // columns: d/da = d2 - d1, d/ds = d2
        let ja = d2 - d1;
        let det = ja.re * d2.im - ja.im * d2.re;
        if det.abs() < 1e-300 {
            break;
        }
        let da = (e.re * d2.im - e.im * d2.re) / det;
        let ds = (ja.re * e.im - ja.im * e.re) / det;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let (na, ns) = (a - t * da, s - t * ds);
            let ne = resid(na, ns);
            if ne.norm() < e.norm() {
                a = na;
                s = ns;
                e = ne;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    let trivial = s.rem_euclid(TWO_PI).min(TWO_PI - s.rem_euclid(TWO_PI)) < 1e-6;
    if e.norm() < 1e-10 && !trivial {
        let sine = tangent_sine(it.eval_derivative(a), it.eval_derivative(a + s));
        Some((a, s, sine))
    } else {
        None
    }
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while hi - lo > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of the touching-amplitude bisection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TouchingResult {
    /// Upper end of the final bracket; its profile touches itself.
    pub amplitude: f64,
    pub bracket: (f64, f64),
    pub gravity: f64,
    pub w: HolomorphicBoundaryFn,
    pub profile: ProfileCurve,
    pub report: IntersectionReport,
    pub probes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TouchingOptions {
    pub continuation: ContinuationOptions,
    /// Profile sampling `M` for the intersection analysis.
    pub points: usize,
    /// Gravity increment per continuation step.
    pub gravity_step: f64,
    pub max_probes: usize,
    pub intersections: IntersectionOptions,
}

impl Default for TouchingOptions {
    fn default() -> Self {
        Self {
            continuation: ContinuationOptions::default(),
            points: 512,
            gravity_step: 0.005,
            max_probes: 80,
            intersections: IntersectionOptions::default(),
        }
    }
}

struct Probe {
    w: HolomorphicBoundaryFn,
    profile: ProfileCurve,
    report: IntersectionReport,
}

fn probe(amplitude: f64, gravity: f64, opts: &TouchingOptions) -> Result<Probe> {
    let steps = (gravity.abs() / opts.gravity_step).ceil() as usize;
    let trace = continue_in_g(amplitude, gravity, steps.max(1), &opts.continuation)?;
    let w = trace.steps.last().expect("trace holds the start").w.clone();
    let profile = reconstruct_profile(&w, opts.points)?;
    let report = self_intersections_with(&profile, &opts.intersections)?;
    Ok(Probe { w, profile, report })
}

/// Bisects on `A` for the first self-contact at gravity `G`. The lower end
/// must be free of intersections and the upper end must cross itself twice.
/// Bisection continues past `tol` until the upper end is classified tangential.
pub fn find_touching_a(
    gravity: f64,
    bracket: (f64, f64),
    tol: f64,
    opts: &TouchingOptions,
) -> Result<TouchingResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(lo > 0.0) || !(hi < 0.5) {
        return Err(Error::Bracket(format!(
            "need 0 < A_lo < A_hi < 1/2, got ({lo}, {hi})"
        )));
    }
    let lo_probe = probe(lo, gravity, opts)?;
    if lo_probe.report.count != 0 {
        return Err(Error::Bracket(format!(
            "profile at A_lo = {lo} has {} self-intersections",
            lo_probe.report.count
        )));
    }
    let mut best = probe(hi, gravity, opts)?;
    if best.report.count != 2 {
        return Err(Error::Bracket(format!(
            "profile at A_hi = {hi} has {} self-intersections, expected 2",
            best.report.count
        )));
    }
    let mut probes = 2;
    while (hi - lo > tol || best.report.classification != Classification::Tangential)
        && probes < opts.max_probes
    {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let pm = probe(mid, gravity, opts)?;
        probes += 1;
        if pm.report.count >= 1 {
            hi = mid;
            best = pm;
        } else {
            lo = mid;
        }
    }
    Ok(TouchingResult {
        amplitude: hi,
        bracket: (lo, hi),
        gravity,
        w: best.w,
        profile: best.profile,
        report: best.report,
        probes,
    })
}
