//! Monte Carlo sweeps of normalized MSE (MSE / CRLB) over SNR, record length,
//! residual offset and interpolation shift.
//!
//! Trials are seeded individually from `(base_seed, grid index, trial index)`
//! and every estimator sees the same record in a given trial. Squared errors
//! are summed in trial order after the parallel section, so a report does not
//! depend on the worker count.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::{estimate, EstimatorConfig, Variant, INITIAL_SHIFT};
use crate::signal::{synthesize, Snr, ToneSpec};

pub const CSV_HEADER: &str = "sweep,grid_value,estimator,iteration,trials,mse,crlb,mse_over_crlb,failures,seed";

/// Rows whose failure fraction exceeds this are flagged invalid.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

pub const DEFAULT_TRIALS: usize = 10_000;

/// Cramer-Rao bound on the frequency variance, `6 fs^2 / (4 pi^2 gamma N^3)`.
pub fn crlb(gamma: f64, n_samples: usize, sample_rate: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidSweep(format!("SNR must be positive, got {gamma}")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidSweep(format!("N must be >= 2, got {n_samples}")));
    }
    if !(sample_rate > 0.0 && sample_rate.is_finite()) {
        return Err(Error::InvalidSweep(format!("sample rate must be positive, got {sample_rate}")));
    }
    let n = n_samples as f64;
    Ok(6.0 * sample_rate * sample_rate / (4.0 * PI * PI * gamma * n * n * n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    /// Grid of linear SNR values.
    Snr,
    /// Grid of record lengths.
    NSamples,
    /// Grid of fixed offsets `delta`.
    Delta,
    /// Grid of shifts, with `q_2 = ... = q_I = q_H`.
    Q2,
}

impl SweepKind {
    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Snr => "snr",
            SweepKind::NSamples => "n",
            SweepKind::Delta => "delta",
            SweepKind::Q2 => "q",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    /// Record length when not swept.
    pub n_samples: usize,
    /// SNR when not swept; `Noiseless` gives deterministic runs.
    pub snr: Snr,
    pub bin_index: usize,
    pub sample_rate: f64,
    pub amplitude: f64,
    pub iterations: usize,
    /// Shift for Pade iterations after the first, when not swept.
    pub shift: f64,
    /// HAQSE shift when not swept; `None` uses the default.
    pub haqse_shift: Option<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub estimators: Vec<Variant>,
    /// Emit a row for every iteration instead of only the last.
    pub record_per_iteration: bool,
    /// Worker threads; 0 uses the rayon default.
    #[serde(skip)]
    pub workers: usize,
    /// Overrides the `sweep` column.
    pub label: Option<String>,
}

impl SweepConfig {
    pub fn new(kind: SweepKind, grid: Vec<f64>) -> Self {
        SweepConfig {
            kind,
            grid,
            n_samples: 16,
            snr: Snr::from_db(20.0),
            bin_index: 2,
            sample_rate: 1.0,
            amplitude: 1.0,
            iterations: 2,
            shift: INITIAL_SHIFT,
            haqse_shift: None,
            trials: DEFAULT_TRIALS,
            base_seed: 0,
            estimators: Variant::ALL.to_vec(),
            record_per_iteration: true,
            workers: 0,
            label: None,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_snr(mut self, snr: Snr) -> Self {
        self.snr = snr;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn with_estimators(mut self, estimators: &[Variant]) -> Self {
        self.estimators = estimators.to_vec();
        self
    }

    pub fn with_iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        let snr = match self.snr {
            Snr::Noiseless => "inf".to_string(),
            Snr::Linear(g) => format!("{g}"),
        };
        match self.kind {
            SweepKind::Snr => format!("snr:n={}", self.n_samples),
            SweepKind::NSamples => format!("n:gamma={snr}"),
            SweepKind::Delta | SweepKind::Q2 => {
                format!("{}:n={};gamma={snr}", self.kind.name(), self.n_samples)
            }
        }
    }

    /// Stable hash of every field that influences the report.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSweep(m));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("grid must be strictly increasing".into());
        }
        if self.trials == 0 {
            return bad("need at least one trial".into());
        }
        if self.estimators.is_empty() {
            return bad("no estimators selected".into());
        }
        if self.label().contains([',', '\n']) {
            return bad("label may not contain commas or newlines".into());
        }
        for (g, &v) in self.grid.iter().enumerate() {
            let point = self.point(g);
            match self.kind {
                SweepKind::NSamples if v.fract() != 0.0 => {
                    return bad(format!("N grid value {v} is not an integer"))
                }
                SweepKind::Snr if !(v > 0.0) => return bad(format!("SNR grid value {v} must be positive")),
                _ => {}
            }
            point.tone(point.delta.unwrap_or(0.0), 0.0)?.validate()?;
            for &variant in &self.estimators {
                point.estimator(variant).validate(point.n)?;
            }
        }
        Ok(())
    }

    fn point(&self, g: usize) -> GridPoint<'_> {
        let v = self.grid[g];
        let mut p = GridPoint {
            value: v,
            n: self.n_samples,
            snr: self.snr,
            delta: None,
            shift: self.shift,
            haqse_shift: self.haqse_shift,
            cfg: self,
        };
        match self.kind {
            SweepKind::Snr => p.snr = Snr::Linear(v),
            SweepKind::NSamples => p.n = v as usize,
            SweepKind::Delta => p.delta = Some(v),
            SweepKind::Q2 => {
                p.shift = v;
                p.haqse_shift = Some(v);
            }
        }
        p
    }
}

struct GridPoint<'a> {
    value: f64,
    n: usize,
    snr: Snr,
    delta: Option<f64>,
    shift: f64,
    haqse_shift: Option<f64>,
    cfg: &'a SweepConfig,
}

impl GridPoint<'_> {
    fn tone(&self, delta: f64, phase: f64) -> Result<ToneSpec> {
        Ok(ToneSpec::new(self.n, self.cfg.bin_index, delta)?
            .with_amplitude(self.cfg.amplitude)
            .with_sample_rate(self.cfg.sample_rate)
            .with_phase(phase)
            .with_snr(self.snr))
    }

    fn estimator(&self, variant: Variant) -> EstimatorConfig {
        let mut c = EstimatorConfig::new(variant, self.cfg.iterations).with_shift(self.shift);
        c.haqse_shift = self.haqse_shift;
        c
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at grid index `grid`.
pub fn trial_seed(base_seed: u64, grid: usize, trial: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ grid as u64) ^ trial as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sweep: String,
    pub grid_value: f64,
    pub estimator: Variant,
    pub iteration: usize,
    pub trials: usize,
    /// Mean squared frequency error over successful trials, Hz^2.
    pub mse: f64,
    /// NaN for noiseless runs.
    pub crlb: f64,
    pub mse_over_crlb: f64,
    pub failures: usize,
    pub seed: u64,
}

impl SweepRow {
    pub fn is_valid(&self) -> bool {
        (self.failures as f64) <= MAX_FAILURE_FRACTION * self.trials as f64
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.sweep,
            sci(self.grid_value),
            self.estimator,
            self.iteration,
            self.trials,
            sci(self.mse),
            sci(self.crlb),
            sci(self.mse_over_crlb),
            self.failures,
            self.seed
        )
    }
}

fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.8e}")
    } else {
        format!("{x}")
    }
}

impl FromStr for SweepRow {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 10 {
            return Err(Error::Parse(format!("expected 10 fields, got {}: {line}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
        }
        Ok(SweepRow {
            sweep: fields[0].to_string(),
            grid_value: num(fields[1], "grid_value")?,
            estimator: fields[2].parse()?,
            iteration: num(fields[3], "iteration")?,
            trials: num(fields[4], "trials")?,
            mse: num(fields[5], "mse")?,
            crlb: num(fields[6], "crlb")?,
            mse_over_crlb: num(fields[7], "mse_over_crlb")?,
            failures: num(fields[8], "failures")?,
            seed: num(fields[9], "seed")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub seed: u64,
    pub config_hash: String,
    pub build_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub meta: ReportMeta,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.rows.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.to_csv());
            out.push('\n');
        }
        out
    }

    /// Rows for one estimator and iteration, in grid order.
    pub fn series(&self, estimator: Variant, iteration: usize) -> impl Iterator<Item = &SweepRow> {
        self.rows
            .iter()
            .filter(move |r| r.estimator == estimator && r.iteration == iteration)
    }
}

/// Parses rows written by [`SweepReport::to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
    }
    lines.filter(|l| !l.trim().is_empty()).map(str::parse).collect()
}

pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

/// Squared errors of one trial, per (estimator, recorded iteration);
/// `None` marks an estimator failure.
fn run_trial(point: &GridPoint, configs: &[EstimatorConfig], iters: &[usize], seed: u64) -> Vec<Option<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let delta = match point.delta {
        Some(d) => d,
        None => rng.random_range(-0.5..=0.5),
    };
    let phase = rng.random_range(0.0..TAU);
    let noise_seed = rng.next_u64();

    let mut out = Vec::with_capacity(configs.len() * iters.len());
    let record = point.tone(delta, phase).and_then(|spec| {
        let seed = spec.snr.linear().map(|_| noise_seed);
        synthesize(&spec, seed).map(|r| (spec.frequency(), r))
    });
    let (truth, record) = match record {
        Ok(x) => x,
        Err(_) => {
            out.resize(configs.len() * iters.len(), None);
            return out;
        }
    };
    for cfg in configs {
        match estimate(&record, cfg) {
            Ok(trace) => out.extend(iters.iter().map(|&i| {
                let e = trace.frequency_after(i) - truth;
                Some(e * e)
            })),
            Err(_) => out.extend(iters.iter().map(|_| None)),
        }
    }
    out
}

fn sweep_rows(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let iters: Vec<usize> = if config.record_per_iteration {
        (1..=config.iterations).collect()
    } else {
        vec![config.iterations]
    };
    let label = config.label();
    let mut rows = Vec::new();
    for g in 0..config.grid.len() {
        let point = config.point(g);
        let configs: Vec<EstimatorConfig> = config.estimators.iter().map(|&v| point.estimator(v)).collect();
        let trials: Vec<Vec<Option<f64>>> = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(&point, &configs, &iters, trial_seed(config.base_seed, g, t)))
            .collect();

        let bound = match point.snr {
            Snr::Linear(gamma) => crlb(gamma, point.n, config.sample_rate)?,
            Snr::Noiseless => f64::NAN,
        };
        let slots = configs.len() * iters.len();
        let mut sums = vec![0.0; slots];
        let mut failures = vec![0usize; slots];
        for trial in &trials {
            for (j, e) in trial.iter().enumerate() {
                match e {
                    Some(e2) => sums[j] += e2,
                    None => failures[j] += 1,
                }
            }
        }
        for (e, &variant) in config.estimators.iter().enumerate() {
            for (k, &iteration) in iters.iter().enumerate() {
                let j = e * iters.len() + k;
                let ok = config.trials - failures[j];
                let mse = if ok > 0 { sums[j] / ok as f64 } else { f64::NAN };
                rows.push(SweepRow {
                    sweep: label.clone(),
                    grid_value: point.value,
                    estimator: variant,
                    iteration,
                    trials: config.trials,
                    mse,
                    crlb: bound,
                    mse_over_crlb: mse / bound,
                    failures: failures[j],
                    seed: config.base_seed,
                });
            }
        }
    }
    Ok(rows)
}

/// Runs the sweep on `config.workers` threads.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidSweep(format!("thread pool: {e}")))?;
    let rows = pool.install(|| sweep_rows(config))?;
    Ok(SweepReport {
        rows,
        meta: ReportMeta {
            seed: config.base_seed,
            config_hash: config.hash(),
            build_id: build_id(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub estimator: Variant,
    pub iteration: usize,
    pub points: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Grid value at which the minimum occurs.
    pub argmin: f64,
}

impl fmt::Display for SummaryRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<8} iter {}  min {:.4} (at {})  max {:.4}  mean {:.4}  over {} points",
            self.estimator.name(),
            self.iteration,
            self.min,
            self.argmin,
            self.max,
            self.mean,
            self.points
        )
    }
}

/// Min, max and mean of `mse_over_crlb` per (estimator, iteration), over
/// valid rows with a finite ratio.
pub fn summarize(rows: &[SweepRow]) -> Result<Vec<SummaryRow>> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    let mut keys: Vec<(Variant, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.estimator, r.iteration)) {
            keys.push((r.estimator, r.iteration));
        }
    }
    Ok(keys
        .into_iter()
        .map(|(estimator, iteration)| {
            let vals: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.estimator == estimator && r.iteration == iteration)
                .filter(|r| r.is_valid() && r.mse_over_crlb.is_finite())
                .map(|r| (r.grid_value, r.mse_over_crlb))
                .collect();
            let (argmin, min) = vals
                .iter()
                .copied()
                .fold((f64::NAN, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
            let max = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
            let mean = vals.iter().map(|v| v.1).sum::<f64>() / vals.len() as f64;
            if vals.is_empty() {
                SummaryRow { estimator, iteration, points: 0, min: f64::NAN, max: f64::NAN, mean: f64::NAN, argmin }
            } else {
                SummaryRow { estimator, iteration, points: vals.len(), min, max, mean, argmin }
            }
        })
        .collect())
}
