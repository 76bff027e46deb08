use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use overhang_core::exact::ParamSet;
use overhang_core::geometry::ProfileCurve;
use overhang_core::spectral::HolomorphicBoundaryFn;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk form of a solution: `coeffs[n]` is the real `c_n` of the term `i c_n zeta^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientsFile {
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "G")]
    pub gravity: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    #[serde(rename = "B")]
    pub bernoulli: f64,
    #[serde(rename = "N")]
    pub modes: usize,
    pub coeffs: Vec<f64>,
}

impl CoefficientsFile {
    pub fn new(params: &ParamSet, w: &HolomorphicBoundaryFn) -> Self {
        Self {
            amplitude: params.amplitude,
            gravity: params.gravity,
            omega: params.omega,
            bernoulli: params.bernoulli,
            modes: w.order(),
            coeffs: w.coeffs().to_vec(),
        }
    }
}

pub struct Writer {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.dir.join(name);
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let p = self.path(name);
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        std::fs::write(p, s)?;
        Ok(())
    }

    pub fn profile_csv(&mut self, name: &str, p: &ProfileCurve) -> Result<(), CliError> {
        let path = self.path(name);
        let (xa, ya) = p.derivatives();
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["alpha", "x", "y", "x_alpha", "y_alpha"])?;
        for j in 0..p.len() {
            w.serialize((p.alpha[j], p.x[j], p.y[j], xa[j], ya[j]))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn svg(&mut self, name: &str, p: &ProfileCurve, title: &str) -> Result<(), CliError> {
        let path = self.path(name);
        std::fs::write(path, profile_svg(p, title))?;
        Ok(())
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// One period on `[-pi, pi]`, trough at the centre, equal scaling on both axes.
pub fn profile_svg(p: &ProfileCurve, title: &str) -> String {
    let m = p.len();
    let half = m / 2;
    let mut pts: Vec<(f64, f64)> = (half..m).map(|j| (p.x[j] - 2.0 * PI, p.y[j])).collect();
    pts.extend((0..=half).map(|j| (p.x[j], p.y[j])));

    let (mut x0, mut x1, mut y0, mut y1) = (-PI, PI, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (width, pad) = (800.0, 20.0);
    let scale = (width - 2.0 * pad) / (x1 - x0);
    let height = (y1 - y0) * scale + 2.0 * pad;
    let map = |x: f64, y: f64| (pad + (x - x0) * scale, pad + (y1 - y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.1}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (tx, ty0) = map(0.0, y1);
    let (_, ty1) = map(0.0, y0);
    let _ = writeln!(
        s,
        r##"<line x1="{tx:.3}" y1="{ty0:.3}" x2="{tx:.3}" y2="{ty1:.3}" stroke="#bbbbbb" stroke-dasharray="4 4"/>"##
    );
    let _ = write!(
        s,
        r#"<polyline fill="none" stroke="black" stroke-width="1.5" points=""#
    );
    for (k, &(x, y)) in pts.iter().enumerate() {
        let (u, v) = map(x, y);
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{u:.3},{v:.3}");
    }
    let _ = writeln!(s, r#""/>"#);
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
