#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use overhang_core::exact::{crapper_w, profile_z_exact, ParamSet};
use overhang_core::geometry::{
    crest_trough_height, find_touching_a, is_overhanging, reconstruct_profile, self_intersections,
    IntersectionReport, OverhangReport, ProfileCurve, TouchingOptions,
};
use overhang_core::solver::{continue_in_g, newton_solve, ContinuationOptions, NewtonOptions};
use overhang_core::Error;
use serde::Serialize;

use config::{Format, RunArgs, RunConfig};
use output::{CoefficientsFile, Writer};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("tolerance breached: {0}")]
    Breach(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(
                Error::Domain { .. }
                | Error::InvalidGrid { .. }
                | Error::Aliasing { .. }
                | Error::Bracket(_),
            ) => 2,
            _ => 1,
        }
    }
}

/// Spectral solver for periodic traveling gravity waves on deep flows of constant vorticity.
#[derive(Parser, Debug)]
#[command(name = "overhang", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form zero-gravity profile at amplitude A
    Exact(RunArgs),
    /// Newton solve at (A, G) seeded with the zero-gravity solution
    Solve(RunArgs),
    /// Continuation in gravity from 0 to G at fixed A
    Continue(RunArgs),
    /// Bisection for the amplitude at which the profile first touches itself
    Touching(RunArgs),
    /// Run numerical self-checks and print a JSON report
    Verify(RunArgs),
}

#[derive(Serialize)]
struct Params {
    #[serde(rename = "A")]
    amplitude: f64,
    #[serde(rename = "G")]
    gravity: f64,
    #[serde(rename = "Omega")]
    omega: f64,
    #[serde(rename = "B")]
    bernoulli: f64,
    points: usize,
    height: f64,
    overhang: OverhangReport,
    intersections: IntersectionReport,
}

fn geometry_summary(p: &ProfileCurve) -> Result<(OverhangReport, IntersectionReport), CliError> {
    Ok((is_overhanging(p), self_intersections(p)?))
}

fn describe(label: &str, p: &ProfileCurve, o: &OverhangReport, r: &IntersectionReport) {
    println!(
        "{label}: height {:.10}, overhanging {}, min x_alpha {:.6}, self-intersections {} ({:?})",
        crest_trough_height(p),
        o.overhanging,
        o.min_x_alpha,
        r.count,
        r.classification
    );
}

fn write_profile(
    out: &mut Writer,
    cfg: &RunConfig,
    p: &ProfileCurve,
    title: &str,
) -> Result<(), CliError> {
    if cfg.wants(Format::Csv) {
        out.profile_csv("profile.csv", p)?;
    }
    if cfg.wants(Format::Svg) {
        out.svg("profile.svg", p, title)?;
    }
    Ok(())
}

fn newton_options(cfg: &RunConfig) -> NewtonOptions {
    NewtonOptions {
        tolerance: cfg.tol,
        points: Some(cfg.points),
        ..Default::default()
    }
}

fn exact(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.amplitude(false)?;
    if cfg.points < 4 || !cfg.points.is_multiple_of(2) {
        return Err(CliError::Usage(format!(
            "--M {} must be even and at least 4",
            cfg.points
        )));
    }
    let params = ParamSet::zero_gravity(a)?;
    let p = profile_z_exact(a, cfg.points)?;
    let (o, r) = geometry_summary(&p)?;
    describe("exact", &p, &o, &r);
    let mut out = Writer::new(&cfg.out)?;
    if cfg.wants(Format::Json) {
        out.json(
            "params.json",
            &Params {
                amplitude: a,
                gravity: 0.0,
                omega: params.omega,
                bernoulli: params.bernoulli,
                points: cfg.points,
                height: crest_trough_height(&p),
                overhang: o,
                intersections: r,
            },
        )?;
    }
    write_profile(&mut out, cfg, &p, &format!("exact profile, A = {a}"))?;
    finish(&out);
    Ok(())
}

fn solve(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.amplitude(false)?;
    cfg.check_gravity()?;
    cfg.check_grid()?;
    cfg.check_tolerance()?;
    let params = ParamSet::with_gravity(a, cfg.gravity)?;
    let w0 = crapper_w(a, cfg.modes)?;
    let mut out = Writer::new(&cfg.out)?;
    let (w, report) = match newton_solve(&w0, &params, &newton_options(cfg)) {
        Ok(r) => r,
        Err(Error::NotConverged { report }) => {
            if cfg.wants(Format::Json) {
                out.json("report.json", &report)?;
            }
            finish(&out);
            return Err(Error::NotConverged { report }.into());
        }
        Err(e) => return Err(e.into()),
    };
    println!(
        "converged in {} iteration(s), residual {:.3e}",
        report.iterations, report.final_residual
    );
    let p = reconstruct_profile(&w, cfg.points)?;
    let (o, r) = geometry_summary(&p)?;
    describe("solution", &p, &o, &r);
    if cfg.wants(Format::Json) {
        out.json("coefficients.json", &CoefficientsFile::new(&params, &w))?;
        out.json("report.json", &report)?;
        out.json("intersections.json", &r)?;
    }
    write_profile(&mut out, cfg, &p, &format!("A = {a}, G = {}", cfg.gravity))?;
    finish(&out);
    Ok(())
}

fn continuation(cfg: &RunConfig) -> Result<(), CliError> {
    let a = cfg.amplitude(true)?;
    cfg.check_gravity()?;
    cfg.check_grid()?;
    cfg.check_tolerance()?;
    cfg.check_steps()?;
    let opts = ContinuationOptions {
        modes: cfg.modes,
        newton: newton_options(cfg),
    };
    let mut out = Writer::new(&cfg.out)?;
    let trace = match continue_in_g(a, cfg.gravity, cfg.steps, &opts) {
        Ok(t) => t,
        Err(Error::Continuation {
            step,
            source,
            partial,
        }) => {
            if cfg.wants(Format::Json) {
                out.json("trace.json", &partial)?;
            }
            finish(&out);
            return Err(Error::Continuation {
                step,
                source,
                partial,
            }
            .into());
        }
        Err(e) => return Err(e.into()),
    };
    for s in &trace.steps {
        println!(
            "G = {:<12.6e} iterations {:>2}  residual {:.3e}",
            s.params.gravity, s.report.iterations, s.report.final_residual
        );
    }
    let last = trace.last().expect("trace holds the starting point");
    let p = reconstruct_profile(&last.w, cfg.points)?;
    let (o, r) = geometry_summary(&p)?;
    describe("endpoint", &p, &o, &r);
    if cfg.wants(Format::Json) {
        out.json("trace.json", &trace)?;
        out.json(
            "coefficients.json",
            &CoefficientsFile::new(&last.params, &last.w),
        )?;
        out.json("intersections.json", &r)?;
    }
    write_profile(&mut out, cfg, &p, &format!("A = {a}, G = {}", cfg.gravity))?;
    finish(&out);
    Ok(())
}

#[derive(Serialize)]
struct TouchingSummary<'a> {
    #[serde(rename = "A_star")]
    amplitude: f64,
    #[serde(rename = "G")]
    gravity: f64,
    bracket: (f64, f64),
    bracket_tol: f64,
    probes: usize,
    report: &'a IntersectionReport,
}

fn touching(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.check_gravity()?;
    cfg.check_bracket()?;
    cfg.check_grid()?;
    cfg.check_tolerance()?;
    let opts = TouchingOptions {
        continuation: ContinuationOptions {
            modes: cfg.modes,
            newton: newton_options(cfg),
        },
        points: cfg.points,
        ..Default::default()
    };
    let t = find_touching_a(cfg.gravity, cfg.bracket, cfg.bracket_tol, &opts)?;
    println!(
        "A* = {:.12} in ({:.12}, {:.12}) after {} probe(s): {} point(s), {:?}",
        t.amplitude, t.bracket.0, t.bracket.1, t.probes, t.report.count, t.report.classification
    );
    let mut out = Writer::new(&cfg.out)?;
    if cfg.wants(Format::Json) {
        out.json(
            "touching.json",
            &TouchingSummary {
                amplitude: t.amplitude,
                gravity: t.gravity,
                bracket: t.bracket,
                bracket_tol: cfg.bracket_tol,
                probes: t.probes,
                report: &t.report,
            },
        )?;
        let params = ParamSet::with_gravity(t.amplitude, t.gravity)?;
        out.json("coefficients.json", &CoefficientsFile::new(&params, &t.w))?;
        out.json("intersections.json", &t.report)?;
    }
    write_profile(
        &mut out,
        cfg,
        &t.profile,
        &format!("touching wave, A = {}, G = {}", t.amplitude, t.gravity),
    )?;
    finish(&out);
    Ok(())
}

fn verify_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let amps = if cfg.amplitudes.is_empty() {
        vec![0.1, 0.25, 0.4]
    } else {
        cfg.amplitudes.clone()
    };
    if let Some(a) = amps.iter().find(|a| !(**a >= 0.0 && **a < 0.5)) {
        return Err(CliError::Usage(format!("--A {a} is outside [0, 1/2)")));
    }
    let report = verify::run(cfg.suite, &amps)?;
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if cfg.out_given {
        let mut out = Writer::new(&cfg.out)?;
        out.json("verify.json", &report)?;
    }
    if !report.passed {
        let failed: Vec<String> = report
            .entries
            .iter()
            .filter(|e| !e.passed)
            .map(|e| format!("{} {} at A = {}", e.suite, e.check, e.amplitude))
            .collect();
        return Err(CliError::Breach(failed.join(", ")));
    }
    Ok(())
}

fn finish(out: &Writer) {
    for p in out.written() {
        println!("wrote {}", p.display());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exact(a) => exact(&RunConfig::resolve(&a)?),
        Command::Solve(a) => solve(&RunConfig::resolve(&a)?),
        Command::Continue(a) => continuation(&RunConfig::resolve(&a)?),
        Command::Touching(a) => touching(&RunConfig::resolve(&a)?),
        Command::Verify(a) => verify_cmd(&RunConfig::resolve(&a)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
