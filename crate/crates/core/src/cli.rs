//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for invalid input or flags, 2 for numerical
//! faults and failed property checks.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{default_haqse_shift, estimate, EstimateTrace, EstimatorConfig, Variant};
use crate::harness::{run_sweep, summarize, SweepConfig, SweepKind, SweepReport, DEFAULT_TRIALS};
use crate::props;
use crate::signal::{synthesize, SampleRecord, Snr, ToneSpec};
use crate::updating::PadeModel;

/// Environment variable overriding the default trial count of the sweeps.
pub const TRIALS_ENV: &str = "PADEFREQ_TRIALS";

/// Largest `--qh` accepted by `estimate`.
pub const MAX_ESTIMATE_QH: f64 = 0.32;

#[derive(Debug, Parser)]
#[command(name = "padefreq", version, about = "Single-tone frequency estimation by Pade-based DFT interpolation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the frequency of a synthetic tone or a sample file.
    Estimate(EstimateArgs),
    /// Print the Taylor and Pade coefficients for (N, q).
    Coeffs(CoeffsArgs),
    /// MSE versus SNR.
    SweepSnr(SweepSnrArgs),
    /// MSE versus record length.
    SweepN(SweepNArgs),
    /// MSE versus the fractional offset.
    SweepDelta(SweepDeltaArgs),
    /// MSE versus the interpolation shift, with q_2 = q_H.
    SweepQ(SweepQArgs),
    /// Check monotonicity, odd symmetry and error decay of the updating function.
    Props(PropsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Read samples from a file instead of synthesizing a tone.
    #[arg(long, conflicts_with_all = ["n", "kstar", "delta", "snr_db", "noiseless"])]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub kstar: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub fs: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phase: f64,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "noiseless")]
    pub snr_db: Option<f64>,
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "proposed", value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long, default_value_t = 2)]
    pub iters: usize,
    /// Shift for Pade iterations after the first.
    #[arg(long)]
    pub q: Option<f64>,
    /// HAQSE shift (at most 0.32).
    #[arg(long)]
    pub qh: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub q: f64,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Trials per grid point [default: 10000, or $PADEFREQ_TRIALS].
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 2)]
    pub iters: usize,
    #[arg(long, value_delimiter = ',', default_value = "proposed,am,gam,haqse", value_parser = parse_variant)]
    pub estimators: Vec<Variant>,
    /// Only report the final iteration.
    #[arg(long)]
    pub last_only: bool,
    #[arg(long, default_value_t = 2)]
    pub kstar: usize,
    #[arg(long, default_value_t = 1.0)]
    pub fs: f64,
    /// Output file; a plot script and metadata are written next to it.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Report format for the output file.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SweepSnrArgs {
    #[arg(long, value_delimiter = ',', default_value = "8,16,32")]
    pub n: Vec<usize>,
    /// SNR grid in dB: comma list and/or start:step:stop ranges.
    #[arg(long, default_value = "0:2:40", allow_hyphen_values = true)]
    pub snr_db: String,
    #[command(flatten)]
    pub common: SweepArgs,
}

#[derive(Debug, Args)]
pub struct SweepNArgs {
    /// Record lengths: comma list and/or start:step:stop ranges.
    #[arg(long, default_value = "6:2:64")]
    pub n: String,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub noiseless: bool,
    #[command(flatten)]
    pub common: SweepArgs,
}

#[derive(Debug, Args)]
pub struct SweepDeltaArgs {
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub noiseless: bool,
    /// Number of evenly spaced offsets in [-0.5, 0.5] (cell midpoints).
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[command(flatten)]
    pub common: SweepArgs,
}

#[derive(Debug, Args)]
pub struct SweepQArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long)]
    pub noiseless: bool,
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    #[arg(long, default_value_t = 0.1)]
    pub q_min: f64,
    /// Upper end of the grid [default: N^(-1/3), capped at 0.5].
    #[arg(long)]
    pub q_max: Option<f64>,
    #[command(flatten)]
    pub common: SweepArgs,
}

#[derive(Debug, Args)]
pub struct PropsArgs {
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidTone(_)
            | Error::InvalidConfig(_)
            | Error::InvalidSweep(_)
            | Error::InvalidShift(_)
            | Error::Domain { .. }
            | Error::Parse(_) => 1,
            Error::TaylorUnstable { .. }
            | Error::DegenerateModel
            | Error::NoRealRoot { .. }
            | Error::ZeroSignal
            | Error::EmptyReport => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

type CliResult = std::result::Result<String, Failure>;

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

fn dispatch(cmd: Command) -> CliResult {
    match cmd {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Coeffs(a) => cmd_coeffs(a),
        Command::SweepSnr(a) => cmd_sweep_snr(a),
        Command::SweepN(a) => cmd_sweep_n(a),
        Command::SweepDelta(a) => cmd_sweep_delta(a),
        Command::SweepQ(a) => cmd_sweep_q(a),
        Command::Props(a) => cmd_props(a),
    }
}

/// Parses a grid such as `0:2:40` or `6,8,10:5:30`; ranges include their end.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("bad grid '{s}'"));
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<f64> = item
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match parts[..] {
            [v] => out.push(v),
            [start, step, stop] => {
                if !(step > 0.0) || stop < start {
                    return Err(bad());
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|i| start + step * i as f64));
            }
            _ => return Err(bad()),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Reads a sample file: `n=` and `fs=` header lines, then one `re,im` pair
/// per line. Blank lines and `#` comments are ignored.
pub fn parse_sample_file(text: &str) -> Result<SampleRecord> {
    let mut n: Option<usize> = None;
    let mut fs: Option<f64> = None;
    let mut samples = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |what: &str| Error::Parse(format!("line {}: {what}: '{raw}'", lineno + 1));
        if let Some((key, value)) = line.split_once('=') {
            match key.trim() {
                "n" | "N" => n = Some(value.trim().parse().map_err(|_| err("bad n"))?),
                "fs" => fs = Some(value.trim().parse().map_err(|_| err("bad fs"))?),
                _ => return Err(err("unknown header")),
            }
            continue;
        }
        let (re, im) = line.split_once(',').ok_or_else(|| err("expected re,im"))?;
        let re: f64 = re.trim().parse().map_err(|_| err("bad real part"))?;
        let im: f64 = im.trim().parse().map_err(|_| err("bad imaginary part"))?;
        samples.push(Complex64::new(re, im));
    }
    let n = n.ok_or_else(|| Error::Parse("missing n= header".into()))?;
    let fs = fs.ok_or_else(|| Error::Parse("missing fs= header".into()))?;
    if samples.len() != n {
        return Err(Error::Parse(format!("header says n={n} but found {} samples", samples.len())));
    }
    SampleRecord::from_samples(samples, fs)
}

fn cmd_estimate(a: EstimateArgs) -> CliResult {
    let record = match &a.input {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            parse_sample_file(&text)?
        }
        None => {
            let n = a.n.ok_or_else(|| usage("--n is required without --input"))?;
            let delta = a.delta.ok_or_else(|| usage("--delta is required without --input"))?;
            let snr = match a.snr_db {
                Some(db) if !a.noiseless => Snr::from_db(db),
                _ => Snr::Noiseless,
            };
            let spec = ToneSpec::new(n, a.kstar, delta)?
                .with_amplitude(a.amplitude)
                .with_sample_rate(a.fs)
                .with_phase(a.phase)
                .with_snr(snr);
            spec.validate()?;
            let seed = snr.linear().map(|_| a.seed);
            synthesize(&spec, seed)?
        }
    };
    let mut cfg = EstimatorConfig::new(a.variant, a.iters);
    if let Some(q) = a.q {
        cfg = cfg.with_shift(q);
    }
    if let Some(qh) = a.qh {
        if !(qh > 0.0 && qh <= MAX_ESTIMATE_QH) {
            return Err(usage(format!("--qh {qh} outside (0, {MAX_ESTIMATE_QH}]")));
        }
        cfg = cfg.with_haqse_shift(qh);
    }
    let trace = estimate(&record, &cfg)?;
    Ok(match a.format {
        Format::Json => json(&trace)? + "\n",
        _ => format_trace(&trace),
    })
}

fn json<T: Serialize>(value: &T) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure { code: 2, message: e.to_string() })
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.10}")).collect::<Vec<_>>().join(" ")
}

pub fn format_trace(t: &EstimateTrace) -> String {
    let fallbacks = if t.fallbacks.is_empty() {
        "none".to_string()
    } else {
        t.fallbacks.iter().map(|f| format!("{f:?}")).collect::<Vec<_>>().join(", ")
    };
    let mut s = String::new();
    let _ = writeln!(s, "variant         {}", t.variant);
    let _ = writeln!(s, "k*              {}", t.k_star_hat);
    let _ = writeln!(s, "alpha           {:+}", t.alpha);
    let _ = writeln!(s, "delta path      {}", join(&t.delta_path));
    let _ = writeln!(s, "xi path         {}", join(&t.xi_path));
    let _ = writeln!(s, "rho path        {}", join(&t.rho_path));
    let _ = writeln!(s, "interpolations  {}", t.interp_count);
    let _ = writeln!(s, "fallbacks       {fallbacks}");
    let _ = writeln!(s, "delta           {:.12}", t.delta_hat);
    let _ = writeln!(s, "f_hat           {:.12}", t.f_hat);
    s
}

fn cmd_coeffs(a: CoeffsArgs) -> CliResult {
    if a.n < 2 {
        return Err(usage(format!("N must be >= 2, got {}", a.n)));
    }
    let model = PadeModel::new(a.n, a.q)?;
    Ok(match a.format {
        Format::Csv => format!("{}\n{}\n", PadeModel::CSV_HEADER, model.csv_row()),
        Format::Json => json(&model)? + "\n",
        Format::Text => {
            let t = model.taylor;
            let mut s = format!("N = {}, q = {}\n", a.n, a.q);
            for (name, v) in [("c1", t.c1), ("c3", t.c3), ("c5", t.c5)] {
                let _ = writeln!(s, "{name}  {v:.11e}");
            }
            match model.pade {
                Some(p) => {
                    for (name, v) in [("a1", p.a1), ("a3", p.a3), ("b2", p.b2)] {
                        let _ = writeln!(s, "{name}  {v:.11e}");
                    }
                }
                None => s.push_str("pade  degenerate (c3 = 0), linear update\n"),
            }
            s
        }
    })
}

fn default_trials() -> std::result::Result<usize, Failure> {
    match std::env::var(TRIALS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{TRIALS_ENV}='{v}' is not a trial count"))),
        Err(_) => Ok(DEFAULT_TRIALS),
    }
}

fn sweep_config(kind: SweepKind, grid: Vec<f64>, c: &SweepArgs) -> std::result::Result<SweepConfig, Failure> {
    let mut cfg = SweepConfig::new(kind, grid)
        .with_trials(match c.trials {
            Some(t) => t,
            None => default_trials()?,
        })
        .with_seed(c.seed)
        .with_workers(c.workers)
        .with_iterations(c.iters)
        .with_estimators(&c.estimators);
    cfg.record_per_iteration = !c.last_only;
    cfg.bin_index = c.kstar;
    cfg.sample_rate = c.fs;
    Ok(cfg)
}

fn snr_of(db: f64, noiseless: bool) -> Snr {
    if noiseless {
        Snr::Noiseless
    } else {
        Snr::from_db(db)
    }
}

fn summary_text(report: &SweepReport) -> std::result::Result<String, Failure> {
    let mut s = String::new();
    for row in summarize(&report.rows)? {
        let _ = writeln!(s, "{row}");
    }
    let invalid = report.rows.iter().filter(|r| !r.is_valid()).count();
    if invalid > 0 {
        let _ = writeln!(s, "warning: {invalid} rows exceed the failure threshold");
    }
    Ok(s)
}

fn write_outputs(
    report: &SweepReport,
    kind: SweepKind,
    c: &SweepArgs,
    default_name: &str,
) -> std::result::Result<String, Failure> {
    let path = c.out.clone().unwrap_or_else(|| PathBuf::from(default_name));
    let io = |p: &Path, e: std::io::Error| usage(format!("cannot write {}: {e}", p.display()));
    let body = match c.format {
        Format::Json => json(report)? + "\n",
        _ => report.to_csv(),
    };
    fs::write(&path, body).map_err(|e| io(&path, e))?;
    let meta = path.with_extension("meta.json");
    fs::write(&meta, json(&report.meta)? + "\n").map_err(|e| io(&meta, e))?;
    let mut written = vec![path.clone(), meta];
    if c.format != Format::Json {
        let script = path.with_extension("py");
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        fs::write(&script, plot_script(kind, &name)).map_err(|e| io(&script, e))?;
        written.push(script);
    }
    Ok(written
        .iter()
        .map(|p| format!("wrote {}\n", p.display()))
        .collect())
}

fn finish_sweep(
    report: SweepReport,
    kind: SweepKind,
    c: &SweepArgs,
    default_name: &str,
) -> CliResult {
    let mut out = summary_text(&report)?;
    out += &write_outputs(&report, kind, c, default_name)?;
    Ok(out)
}

fn cmd_sweep_snr(a: SweepSnrArgs) -> CliResult {
    let grid: Vec<f64> = parse_grid(&a.snr_db)?.into_iter().map(|db| Snr::from_db(db).linear().unwrap()).collect();
    let mut merged: Option<SweepReport> = None;
    for &n in &a.n {
        let cfg = sweep_config(SweepKind::Snr, grid.clone(), &a.common)?.with_n(n);
        let report = run_sweep(&cfg)?;
        match merged.as_mut() {
            Some(m) => {
                m.rows.extend(report.rows);
                m.meta.config_hash = format!("{}+{}", m.meta.config_hash, report.meta.config_hash);
            }
            None => merged = Some(report),
        }
    }
    let report = merged.ok_or_else(|| usage("--n is empty"))?;
    finish_sweep(report, SweepKind::Snr, &a.common, "sweep-snr.csv")
}

fn cmd_sweep_n(a: SweepNArgs) -> CliResult {
    let grid = parse_grid(&a.n)?;
    let cfg = sweep_config(SweepKind::NSamples, grid, &a.common)?.with_snr(snr_of(a.snr_db, a.noiseless));
    let report = run_sweep(&cfg)?;
    let mut out = String::new();
    if let Some(row) = summarize(&report.rows)?
        .iter()
        .find(|r| r.estimator == Variant::Proposed && r.iteration == 1)
    {
        let _ = writeln!(
            out,
            "proposed iteration-1 minimum normalized MSE {:.4} at N = {}",
            row.min, row.argmin
        );
    }
    Ok(out + &finish_sweep(report, SweepKind::NSamples, &a.common, "sweep-n.csv")?)
}

/// `points` cell midpoints of `[-0.5, 0.5]`.
pub fn delta_grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| -0.5 + (i as f64 + 0.5) / points as f64).collect()
}

fn cmd_sweep_delta(a: SweepDeltaArgs) -> CliResult {
    if a.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let cfg = sweep_config(SweepKind::Delta, delta_grid(a.points), &a.common)?
        .with_n(a.n)
        .with_snr(snr_of(a.snr_db, a.noiseless));
    finish_sweep(run_sweep(&cfg)?, SweepKind::Delta, &a.common, "sweep-delta.csv")
}

/// `points` evenly spaced shifts over `[q_min, q_max]`, endpoints included.
pub fn q_grid(q_min: f64, q_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![q_min];
    }
    (0..points)
        .map(|i| {
            if i == points - 1 {
                q_max
            } else {
                q_min + (q_max - q_min) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn cmd_sweep_q(a: SweepQArgs) -> CliResult {
    if a.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let cap = default_haqse_shift(a.n);
    let q_max = a.q_max.unwrap_or(cap);
    if q_max > cap || a.q_min > q_max {
        return Err(usage(format!("shift grid must lie within [{}, {cap}]", a.q_min)));
    }
    let cfg = sweep_config(SweepKind::Q2, q_grid(a.q_min, q_max, a.points), &a.common)?
        .with_n(a.n)
        .with_snr(snr_of(a.snr_db, a.noiseless));
    finish_sweep(run_sweep(&cfg)?, SweepKind::Q2, &a.common, "sweep-q.csv")
}

fn cmd_props(a: PropsArgs) -> CliResult {
    let ns = a.n.unwrap_or_else(|| props::DEFAULT_NS.to_vec());
    let qs = a.q.unwrap_or_else(|| props::DEFAULT_QS.to_vec());
    let report = props::run_props(&ns, &qs)?;
    let mut s = String::new();
    for c in &report.checks {
        let _ = writeln!(s, "{c}");
    }
    let failed = report.failures().count();
    let _ = writeln!(s, "{} checks, {failed} failed", report.checks.len());
    if failed > 0 {
        print!("{s}");
        return Err(Failure { code: 2, message: format!("{failed} property checks failed") });
    }
    Ok(s)
}

/// Standalone matplotlib script that plots a sweep CSV.
pub fn plot_script(kind: SweepKind, csv_name: &str) -> String {
    let (xlabel, xform) = match kind {
        SweepKind::Snr => ("SNR (dB)", "10 * math.log10(x)"),
        SweepKind::NSamples => ("N", "x"),
        SweepKind::Delta => ("delta", "x"),
        SweepKind::Q2 => ("q_2 = q_H", "x"),
    };
    let mse_panel = matches!(kind, SweepKind::Snr);
    format!(
        r#"#!/usr/bin/env python3
# Plots {csv_name}. Usage: python3 <this script> [csv]
import csv
import math
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{csv_name}"
series = defaultdict(list)
with open(path) as fh:
    for row in csv.DictReader(fh):
        key = (row["sweep"], int(row["iteration"]), row["estimator"])
        x = float(row["grid_value"])
        series[key].append(({xform}, float(row["mse"]), float(row["crlb"]), float(row["mse_over_crlb"])))

panels = sorted({{(k[0], k[1]) for k in series}})
mse_panel = {mse_panel}
fig, axes = plt.subplots(len(panels), 1, figsize=(7, 3.5 * len(panels)), squeeze=False)
for ax, (sweep, iteration) in zip(axes[:, 0], panels):
    crlb_drawn = False
    for (s, it, est), pts in sorted(series.items()):
        if (s, it) != (sweep, iteration):
            continue
        pts.sort()
        xs = [p[0] for p in pts]
        if mse_panel:
            ax.semilogy(xs, [p[1] for p in pts], marker="o", ms=3, label=est)
            if not crlb_drawn:
                ax.semilogy(xs, [p[2] for p in pts], "k--", label="CRLB")
                crlb_drawn = True
        else:
            ax.plot(xs, [p[3] for p in pts], marker="o", ms=3, label=est)
    ax.set_title(f"{{sweep}}, iteration {{iteration}}")
    ax.set_xlabel("{xlabel}")
    ax.set_ylabel("MSE (Hz^2)" if mse_panel else "MSE / CRLB")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=150)
"#
    )
}
