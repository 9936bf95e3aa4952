//! Iterative DFT-interpolation estimators: the Pade-based estimator and the
//! A&M, GAM and HAQSE benchmarks.
//!
//! Every estimator starts from the integer peak `k*` and refines the
//! fractional offset `delta` with `delta_i = delta_{i-1} + xi_i`, where `xi_i`
//! is derived from two DFT coefficients interpolated around the current
//! estimate. They differ in initialization, interpolation spacing and the
//! ratio-to-update rule.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{dft_at, find_peak, InterpCounter, SampleRecord};
use crate::updating::{check_shift, invert, PadeModel};

/// Offset and shift of the first Pade iteration (and GAM's `beta`).
pub const INITIAL_SHIFT: f64 = 0.25;

/// A&M interpolates half a bin either side of the current estimate.
const AM_SHIFT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Proposed,
    Am,
    Gam,
    Haqse,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Proposed, Variant::Am, Variant::Gam, Variant::Haqse];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Proposed => "proposed",
            Variant::Am => "am",
            Variant::Gam => "gam",
            Variant::Haqse => "haqse",
        }
    }

    /// Fractional interpolations used by `iterations` iterations.
    pub fn interpolations(&self, iterations: usize) -> usize {
        match self {
            Variant::Proposed => 2 * iterations - 1,
            _ => 2 * iterations,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "proposed" | "pade" => Ok(Variant::Proposed),
            "am" | "a&m" => Ok(Variant::Am),
            "gam" => Ok(Variant::Gam),
            "haqse" => Ok(Variant::Haqse),
            other => Err(Error::InvalidConfig(format!("unknown estimator '{other}'"))),
        }
    }
}

/// HAQSE shift used when none is configured: `N^(-1/3)`, capped at 0.5.
pub fn default_haqse_shift(n_samples: usize) -> f64 {
    (n_samples as f64).powf(-1.0 / 3.0).min(0.5)
}

/// HAQSE gain `q cos^2(pi q) / (1 - pi q cot(pi q))`.
pub fn haqse_gain(q: f64) -> f64 {
    let x = PI * q;
    let c = x.cos();
    q * c * c / (1.0 - x * c / x.sin())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub variant: Variant,
    pub iterations: usize,
    /// Pade shifts `q_2, ..., q_I`; missing entries default to 0.25.
    /// `q_1` is always 0.25 because the first iteration reuses `S(k*)`.
    pub shifts: Vec<f64>,
    /// HAQSE shift `q_H`; `None` selects [`default_haqse_shift`].
    pub haqse_shift: Option<f64>,
}

impl EstimatorConfig {
    pub fn new(variant: Variant, iterations: usize) -> Self {
        EstimatorConfig {
            variant,
            iterations,
            shifts: Vec::new(),
            haqse_shift: None,
        }
    }

    /// Uses `q` for every Pade iteration after the first.
    pub fn with_shift(mut self, q: f64) -> Self {
        self.shifts = vec![q; self.iterations.saturating_sub(1)];
        self
    }

    pub fn with_haqse_shift(mut self, q: f64) -> Self {
        self.haqse_shift = Some(q);
        self
    }

    /// Shift used by iteration `i` (1-based) of the Pade estimator.
    pub fn shift(&self, i: usize) -> f64 {
        if i <= 1 {
            INITIAL_SHIFT
        } else {
            self.shifts.get(i - 2).copied().unwrap_or(INITIAL_SHIFT)
        }
    }

    pub fn haqse_shift_for(&self, n_samples: usize) -> f64 {
        self.haqse_shift.unwrap_or_else(|| default_haqse_shift(n_samples))
    }

    pub fn validate(&self, n_samples: usize) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("need at least one iteration".into()));
        }
        for &q in &self.shifts {
            check_shift(q).map_err(|_| Error::InvalidConfig(format!("shift {q} outside (0, 0.5]")))?;
        }
        let qh = self.haqse_shift_for(n_samples);
        if !(qh > 0.0 && qh <= 0.5) {
            return Err(Error::InvalidConfig(format!("q_H = {qh} outside (0, 0.5]")));
        }
        Ok(())
    }
}

/// Non-fatal events recorded while estimating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fallback {
    /// The Pade model was degenerate and `xi = rho / a1` was used.
    LinearUpdate { iteration: usize },
    /// The inverted offset left `[-1.5 q, 1.5 q]` and was clamped.
    Clamped { iteration: usize },
    /// The final offset left `[-0.5, 0.5]` and was clamped.
    FinalClamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateTrace {
    pub variant: Variant,
    pub n_samples: usize,
    pub sample_rate: f64,
    pub k_star_hat: usize,
    /// Sign test outcome, `+1` or `-1`.
    pub alpha: i8,
    /// `delta_0 .. delta_I`, unclamped.
    pub delta_path: Vec<f64>,
    /// `xi_1 .. xi_I`.
    pub xi_path: Vec<f64>,
    /// `rho_1 .. rho_I`.
    pub rho_path: Vec<f64>,
    pub interp_count: usize,
    /// `delta_I` clamped to `[-0.5, 0.5]`.
    pub delta_hat: f64,
    pub f_hat: f64,
    pub fallbacks: Vec<Fallback>,
}

impl EstimateTrace {
    pub fn iterations(&self) -> usize {
        self.xi_path.len()
    }

    /// Frequency estimate after iteration `i` (1-based).
    pub fn frequency_after(&self, i: usize) -> f64 {
        let delta = if i == self.iterations() {
            self.delta_hat
        } else {
            self.delta_path[i].clamp(-0.5, 0.5)
        };
        self.sample_rate * (self.k_star_hat as f64 + delta) / self.n_samples as f64
    }

    fn finish(mut self) -> Self {
        let last = *self.delta_path.last().expect("delta path starts with delta_0");
        self.delta_hat = last.clamp(-0.5, 0.5);
        if self.delta_hat != last {
            self.fallbacks.push(Fallback::FinalClamp);
        }
        self.f_hat = self.sample_rate * (self.k_star_hat as f64 + self.delta_hat) / self.n_samples as f64;
        self
    }
}

/// `sign(Re{[S(k*-1) - S(k*+1)] conj(S(k*))})`, with `+1` on a zero argument.
/// Neighbouring bins wrap modulo N.
pub fn sign_test(bins: &[Complex64], k_star_hat: usize) -> i8 {
    let n = bins.len();
    let below = bins[(k_star_hat + n - 1) % n];
    let above = bins[(k_star_hat + 1) % n];
    let arg = ((below - above) * bins[k_star_hat].conj()).re;
    if arg >= 0.0 {
        1
    } else {
        -1
    }
}

/// One Pade refinement step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub delta: f64,
    pub xi: f64,
    pub rho: f64,
    pub linear: bool,
    pub clamped: bool,
}

fn power_ratio(plus: Complex64, minus: Complex64) -> Result<f64> {
    let (p, m) = (plus.norm_sqr(), minus.norm_sqr());
    let den = p + m;
    if !(den > 0.0) {
        return Err(Error::ZeroSignal);
    }
    Ok((p - m) / den)
}

/// Which of the two coefficients is already known.
#[derive(Debug, Clone, Copy)]
enum Known {
    Plus(Complex64),
    Minus(Complex64),
}

fn refine_with(
    record: &SampleRecord,
    k_star_hat: usize,
    delta_prev: f64,
    q: f64,
    model: &PadeModel,
    counter: &mut InterpCounter,
    known: Option<Known>,
) -> Result<Refinement> {
    let centre = k_star_hat as f64 + delta_prev;
    let (plus, minus) = match known {
        Some(Known::Plus(p)) => (p, dft_at(record, centre - q, counter)),
        Some(Known::Minus(m)) => (dft_at(record, centre + q, counter), m),
        None => (
            dft_at(record, centre + q, counter),
            dft_at(record, centre - q, counter),
        ),
    };
    let rho = power_ratio(plus, minus)?;
    let inv = invert(model, rho)?;
    Ok(Refinement {
        delta: delta_prev + inv.xi,
        xi: inv.xi,
        rho,
        linear: inv.linear,
        clamped: inv.clamped,
    })
}

/// Interpolates at `k* + delta_prev +- q`, forms the power ratio and inverts
/// the Pade model built for `(N, q)`.
pub fn refine_once(
    record: &SampleRecord,
    k_star_hat: usize,
    delta_prev: f64,
    q: f64,
    model: &PadeModel,
    counter: &mut InterpCounter,
) -> Result<Refinement> {
    refine_with(record, k_star_hat, delta_prev, q, model, counter, None)
}

struct Start {
    k: usize,
    alpha: i8,
    bins: Vec<Complex64>,
}

fn start(record: &SampleRecord) -> Start {
    let (k, bins) = find_peak(record);
    let alpha = sign_test(&bins, k);
    Start { k, alpha, bins }
}

fn empty_trace(record: &SampleRecord, variant: Variant, s: &Start, delta0: f64) -> EstimateTrace {
    EstimateTrace {
        variant,
        n_samples: record.len(),
        sample_rate: record.sample_rate(),
        k_star_hat: s.k,
        alpha: s.alpha,
        delta_path: vec![delta0],
        xi_path: Vec::new(),
        rho_path: Vec::new(),
        interp_count: 0,
        delta_hat: delta0,
        f_hat: f64::NAN,
        fallbacks: Vec::new(),
    }
}

fn expect_variant(config: &EstimatorConfig, want: Variant, n: usize) -> Result<()> {
    if config.variant != want {
        return Err(Error::InvalidConfig(format!(
            "config is for {}, not {}",
            config.variant, want
        )));
    }
    config.validate(n)
}

/// Dispatches on `config.variant`.
pub fn estimate(record: &SampleRecord, config: &EstimatorConfig) -> Result<EstimateTrace> {
    match config.variant {
        Variant::Proposed => estimate_proposed(record, config),
        Variant::Am => estimate_am(record, config),
        Variant::Gam => estimate_gam(record, config),
        Variant::Haqse => estimate_haqse(record, config),
    }
}

/// The Pade-based estimator.
///
/// The sign test picks the half-bin holding `delta`; starting from
/// `delta_0 = 0.25 alpha` with `q_1 = 0.25` one of the two interpolation
/// points lands on `k*`, so the first iteration costs a single new
/// interpolation and the whole run costs `2I - 1`.
pub fn estimate_proposed(record: &SampleRecord, config: &EstimatorConfig) -> Result<EstimateTrace> {
    let n = record.len();
    expect_variant(config, Variant::Proposed, n)?;
    let s = start(record);
    let delta0 = INITIAL_SHIFT * s.alpha as f64;
    let mut trace = empty_trace(record, Variant::Proposed, &s, delta0);
    let mut counter = InterpCounter::new();

    let on_peak = s.bins[s.k];
    let known = if s.alpha > 0 {
        Known::Minus(on_peak)
    } else {
        Known::Plus(on_peak)
    };
    let mut delta = delta0;
    for i in 1..=config.iterations {
        let q = config.shift(i);
        let model = PadeModel::cached(n, q)?;
        let known = (i == 1).then_some(known);
        let step = refine_with(record, s.k, delta, q, &model, &mut counter, known)?;
        if step.linear {
            trace.fallbacks.push(Fallback::LinearUpdate { iteration: i });
        }
        if step.clamped {
            trace.fallbacks.push(Fallback::Clamped { iteration: i });
        }
        delta = step.delta;
        trace.delta_path.push(step.delta);
        trace.xi_path.push(step.xi);
        trace.rho_path.push(step.rho);
    }
    trace.interp_count = counter.count();
    Ok(trace.finish())
}

fn am_step(
    record: &SampleRecord,
    k: usize,
    delta: f64,
    counter: &mut InterpCounter,
) -> Result<(f64, f64)> {
    let centre = k as f64 + delta;
    let plus = dft_at(record, centre + AM_SHIFT, counter).norm();
    let minus = dft_at(record, centre - AM_SHIFT, counter).norm();
    let den = plus + minus;
    if !(den > 0.0) {
        return Err(Error::ZeroSignal);
    }
    let rho = (plus - minus) / den;
    Ok((rho, rho / 2.0))
}

fn run_am(record: &SampleRecord, config: &EstimatorConfig, variant: Variant) -> Result<EstimateTrace> {
    let s = start(record);
    let delta0 = match variant {
        Variant::Gam => INITIAL_SHIFT * s.alpha as f64,
        _ => 0.0,
    };
    let mut trace = empty_trace(record, variant, &s, delta0);
    let mut counter = InterpCounter::new();
    let mut delta = delta0;
    for _ in 0..config.iterations {
        let (rho, xi) = am_step(record, s.k, delta, &mut counter)?;
        delta += xi;
        trace.delta_path.push(delta);
        trace.xi_path.push(xi);
        trace.rho_path.push(rho);
    }
    trace.interp_count = counter.count();
    Ok(trace.finish())
}

/// A&M: `delta_0 = 0`, interpolation at `+-0.5`, magnitude ratio, `xi = rho / 2`.
pub fn estimate_am(record: &SampleRecord, config: &EstimatorConfig) -> Result<EstimateTrace> {
    expect_variant(config, Variant::Am, record.len())?;
    run_am(record, config, Variant::Am)
}

/// GAM: A&M started from `delta_0 = 0.25 alpha`.
pub fn estimate_gam(record: &SampleRecord, config: &EstimatorConfig) -> Result<EstimateTrace> {
    expect_variant(config, Variant::Gam, record.len())?;
    run_am(record, config, Variant::Gam)
}

/// HAQSE: one A&M iteration, then q-shift iterations at `+-q_H` with
/// `rho = Re{(S+ - S-)/(S+ + S-)}` scaled by [`haqse_gain`].
pub fn estimate_haqse(record: &SampleRecord, config: &EstimatorConfig) -> Result<EstimateTrace> {
    let n = record.len();
    expect_variant(config, Variant::Haqse, n)?;
    let qh = config.haqse_shift_for(n);
    let gain = haqse_gain(qh);
    let s = start(record);
    let mut trace = empty_trace(record, Variant::Haqse, &s, 0.0);
    let mut counter = InterpCounter::new();

    let (rho, xi) = am_step(record, s.k, 0.0, &mut counter)?;
    let mut delta = xi;
    trace.delta_path.push(delta);
    trace.xi_path.push(xi);
    trace.rho_path.push(rho);

    for _ in 2..=config.iterations {
        let centre = s.k as f64 + delta;
        let plus = dft_at(record, centre + qh, &mut counter);
        let minus = dft_at(record, centre - qh, &mut counter);
        let sum = plus + minus;
        if !(sum.norm_sqr() > 0.0) {
            return Err(Error::ZeroSignal);
        }
        let rho = ((plus - minus) / sum).re;
        let xi = gain * rho;
        delta += xi;
        trace.delta_path.push(delta);
        trace.xi_path.push(xi);
        trace.rho_path.push(rho);
    }
    trace.interp_count = counter.count();
    Ok(trace.finish())
}
