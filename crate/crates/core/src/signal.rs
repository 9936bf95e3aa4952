//! Tone synthesis, fractional-bin DFT evaluation and integer peak search.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arguments of `sin(pi x)/sin(pi x / N)` smaller than this are treated as the
/// removable singularity at zero.
pub const SINGULARITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Snr {
    Noiseless,
    /// Linear power ratio `A^2 / sigma0^2`.
    Linear(f64),
}

impl Snr {
    pub fn from_db(db: f64) -> Self {
        Snr::Linear(10f64.powf(db / 10.0))
    }

    pub fn linear(&self) -> Option<f64> {
        match *self {
            Snr::Noiseless => None,
            Snr::Linear(g) => Some(g),
        }
    }
}

/// Ground-truth parameters of a single complex tone.
///
/// The frequency is carried in bin units as `bin_index + frac_offset`, so
/// `f = (k* + delta) * f_s / N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToneSpec {
    pub amplitude: f64,
    pub sample_rate: f64,
    pub phase: f64,
    pub n_samples: usize,
    pub bin_index: usize,
    pub frac_offset: f64,
    pub snr: Snr,
}

impl ToneSpec {
    /// Unit-amplitude, zero-phase, noiseless tone at `f_s = 1`.
    pub fn new(n_samples: usize, bin_index: usize, frac_offset: f64) -> Result<Self> {
        let spec = ToneSpec {
            amplitude: 1.0,
            sample_rate: 1.0,
            phase: 0.0,
            n_samples,
            bin_index,
            frac_offset,
            snr: Snr::Noiseless,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn with_sample_rate(mut self, sample_rate: f64) -> Self {
        self.sample_rate = sample_rate;
        self
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_snr(mut self, snr: Snr) -> Self {
        self.snr = snr;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::InvalidTone(format!(
                "need at least 2 samples, got {}",
                self.n_samples
            )));
        }
        if self.bin_index >= self.n_samples {
            return Err(Error::InvalidTone(format!(
                "bin index {} outside [0, {}]",
                self.bin_index,
                self.n_samples - 1
            )));
        }
        if !(self.frac_offset.abs() <= 0.5) {
            return Err(Error::InvalidTone(format!(
                "fractional offset {} outside [-0.5, 0.5]",
                self.frac_offset
            )));
        }
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidTone(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate.is_finite()) {
            return Err(Error::InvalidTone(format!(
                "sample rate must be positive, got {}",
                self.sample_rate
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidTone("phase must be finite".into()));
        }
        if let Snr::Linear(g) = self.snr {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::InvalidTone(format!("snr must be positive, got {g}")));
            }
        }
        Ok(())
    }

    /// Tone frequency in Hz.
    pub fn frequency(&self) -> f64 {
        (self.bin_index as f64 + self.frac_offset) * self.sample_rate / self.n_samples as f64
    }

    /// Splits a frequency into the nearest bin and the residual offset.
    pub fn decompose(frequency: f64, sample_rate: f64, n_samples: usize) -> Result<(usize, f64)> {
        if n_samples < 2 || !(sample_rate > 0.0) {
            return Err(Error::InvalidTone("need N >= 2 and f_s > 0".into()));
        }
        let bins = frequency * n_samples as f64 / sample_rate;
        let k = bins.round();
        if k < 0.0 || k >= n_samples as f64 {
            return Err(Error::InvalidTone(format!(
                "frequency {frequency} maps outside the first Nyquist zone"
            )));
        }
        Ok((k as usize, bins - k))
    }

    /// Total complex noise variance `sigma0^2 = A^2 / gamma`.
    pub fn noise_variance(&self) -> Option<f64> {
        self.snr.linear().map(|g| self.amplitude * self.amplitude / g)
    }
}

/// An immutable block of complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    samples: Vec<Complex64>,
    sample_rate: f64,
    spec: Option<ToneSpec>,
    noise_seed: Option<u64>,
}

impl SampleRecord {
    /// Wraps externally supplied samples (no ground truth attached).
    pub fn from_samples(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidTone(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidTone(format!(
                "sample rate must be positive, got {sample_rate}"
            )));
        }
        Ok(SampleRecord {
            samples,
            sample_rate,
            spec: None,
            noise_seed: None,
        })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn spec(&self) -> Option<&ToneSpec> {
        self.spec.as_ref()
    }

    pub fn noise_seed(&self) -> Option<u64> {
        self.noise_seed
    }
}

/// Number of fractional-bin DFT evaluations made during one estimation run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InterpCounter {
    count: usize,
}

impl InterpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn bump(&mut self) {
        self.count += 1;
    }
}

/// Generates `A exp(j(2 pi f n / f_s + phi)) + z(n)`.
///
/// Noise is circularly symmetric Gaussian with total variance `A^2 / gamma`.
/// A noisy spec needs a seed; the same `(spec, seed)` always yields the same
/// samples.
pub fn synthesize(spec: &ToneSpec, seed: Option<u64>) -> Result<SampleRecord> {
    spec.validate()?;
    let n = spec.n_samples;
    let cycles = spec.bin_index as f64 + spec.frac_offset;
    let nf = n as f64;
    let mut samples: Vec<Complex64> = (0..n)
        .map(|i| {
            // Reduce modulo N before scaling so long records keep full phase accuracy.
            let turns = (cycles * i as f64).rem_euclid(nf) / nf;
            Complex64::from_polar(spec.amplitude, 2.0 * PI * turns + spec.phase)
        })
        .collect();

    let noise_seed = match (spec.noise_variance(), seed) {
        (None, _) => None,
        (Some(_), None) => {
            return Err(Error::InvalidTone("a noisy tone needs a seed".into()));
        }
        (Some(var), Some(seed)) => {
            let sigma = (var / 2.0).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for s in samples.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *s += Complex64::new(sigma * re, sigma * im);
            }
            Some(seed)
        }
    };

    Ok(SampleRecord {
        samples,
        sample_rate: spec.sample_rate,
        spec: Some(*spec),
        noise_seed,
    })
}

/// DFT of the record at a (possibly fractional) bin `k`:
/// `sum_n x(n) exp(-j 2 pi k n / N)`.
pub fn dft_at(record: &SampleRecord, k: f64, counter: &mut InterpCounter) -> Complex64 {
    counter.bump();
    let nf = record.len() as f64;
    record
        .samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let turns = (k * i as f64).rem_euclid(nf) / nf;
            x * Complex64::from_polar(1.0, -2.0 * PI * turns)
        })
        .sum()
}

/// All N integer-bin DFT values (direct evaluation with a twiddle table).
pub fn dft_bins(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let nf = n as f64;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / nf))
        .collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for &x in samples {
                acc += x * twiddle[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// Integer bin with the largest `|S(k)|^2`, plus every integer-bin value.
///
/// Ties go to the smallest index, so a tone exactly half-way between bins
/// `k` and `k+1` reports `k`.
pub fn find_peak(record: &SampleRecord) -> (usize, Vec<Complex64>) {
    let bins = dft_bins(&record.samples);
    let mut best = 0;
    let mut best_pow = f64::NEG_INFINITY;
    for (k, s) in bins.iter().enumerate() {
        let p = s.norm_sqr();
        if p > best_pow {
            best_pow = p;
            best = k;
        }
    }
    (best, bins)
}

/// `sin(pi x) / sin(pi x / N)`, with the value `N` at the removable singularity.
pub fn periodic_sinc(x: f64, n: usize) -> f64 {
    if x.abs() < SINGULARITY_EPS {
        return n as f64;
    }
    (PI * x).sin() / (PI * x / n as f64).sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn zero_frequency_is_constant() {
        let spec = ToneSpec::new(4, 0, 0.0).unwrap();
        let rec = synthesize(&spec, None).unwrap();
        for s in rec.samples() {
            assert_eq!(*s, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn quarter_cycle_tone() {
        let spec = ToneSpec::new(4, 1, 0.0).unwrap();
        let rec = synthesize(&spec, None).unwrap();
        let want = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        for (s, w) in rec.samples().iter().zip(want) {
            assert!(close(*s, w, 1e-15), "{s} vs {w}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ToneSpec::new(1, 0, 0.0).is_err());
        assert!(ToneSpec::new(8, 8, 0.0).is_err());
        assert!(ToneSpec::new(8, 2, 0.6).is_err());
        assert!(ToneSpec::new(8, 2, -0.51).is_err());
        assert!(ToneSpec::new(8, 2, f64::NAN).is_err());
        let bad = ToneSpec::new(8, 2, 0.1).unwrap().with_snr(Snr::Linear(0.0));
        assert!(synthesize(&bad, Some(1)).is_err());
        let bad = ToneSpec::new(8, 2, 0.1).unwrap().with_snr(Snr::Linear(-3.0));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn noisy_tone_needs_seed() {
        let spec = ToneSpec::new(8, 2, 0.1).unwrap().with_snr(Snr::Linear(10.0));
        assert!(synthesize(&spec, None).is_err());
        assert!(synthesize(&spec, Some(3)).is_ok());
    }

    #[test]
    fn noise_variance_matches_snr() {
        let n = 200_000;
        let spec = ToneSpec::new(n, 3, 0.2)
            .unwrap()
            .with_snr(Snr::Linear(100.0))
            .with_phase(0.4);
        let noisy = synthesize(&spec, Some(7)).unwrap();
        let clean = synthesize(&spec.with_snr(Snr::Noiseless), None).unwrap();
        let (mut re2, mut im2) = (0.0, 0.0);
        for (a, b) in noisy.samples().iter().zip(clean.samples()) {
            let d = a - b;
            re2 += d.re * d.re;
            im2 += d.im * d.im;
        }
        let var = (re2 + im2) / n as f64;
        // standard error of the variance estimate is ~0.01 * sqrt(1/n)
        assert!((var - 0.01).abs() < 2e-4, "var = {var}");
        assert!((re2 / n as f64 - 0.005).abs() < 1.5e-4);
        assert!((im2 / n as f64 - 0.005).abs() < 1.5e-4);
    }

    #[test]
    fn synthesis_is_reproducible() {
        let spec = ToneSpec::new(32, 5, -0.3)
            .unwrap()
            .with_snr(Snr::Linear(3.0))
            .with_phase(1.1);
        let a = synthesize(&spec, Some(99)).unwrap();
        let b = synthesize(&spec, Some(99)).unwrap();
        let c = synthesize(&spec, Some(100)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples(), c.samples());
        assert_eq!(a.noise_seed(), Some(99));
    }

    #[test]
    fn on_bin_dft_is_coherent_sum() {
        let spec = ToneSpec::new(16, 3, 0.0).unwrap().with_phase(0.7).with_amplitude(2.0);
        let rec = synthesize(&spec, None).unwrap();
        let mut counter = InterpCounter::new();
        let s = dft_at(&rec, 3.0, &mut counter);
        let want = Complex64::from_polar(16.0 * 2.0, 0.7);
        assert!(close(s, want, 1e-12 * 32.0));
        let off = dft_at(&rec, 4.0, &mut counter);
        assert!(off.norm() < 1e-9 * 32.0);
        assert_eq!(counter.count(), 2);
    }

    #[test]
    fn fractional_dft_matches_closed_form() {
        // Direct sum against A e^{j phi} e^{j pi (N-1) x / N} sin(pi x)/sin(pi x/N)
        // with x = (k* + delta) - k.
        let n = 16;
        let spec = ToneSpec::new(n, 5, 0.3).unwrap().with_phase(-0.4);
        let rec = synthesize(&spec, None).unwrap();
        let mut counter = InterpCounter::new();
        for k in [5.0, 5.3, 4.9, 5.55, 6.1] {
            let x = 5.3 - k;
            let s = dft_at(&rec, k, &mut counter);
            let phase = -0.4 + PI * (n as f64 - 1.0) * x / n as f64;
            let want = Complex64::from_polar(periodic_sinc(x, n), phase);
            assert!((s - want).norm() <= 1e-10 * want.norm().max(1e-300), "k = {k}");
        }
    }

    #[test]
    fn integer_bins_match_fractional_evaluation() {
        let spec = ToneSpec::new(12, 4, 0.37).unwrap().with_snr(Snr::Linear(2.0));
        let rec = synthesize(&spec, Some(5)).unwrap();
        let (_, bins) = find_peak(&rec);
        let mut counter = InterpCounter::new();
        let scale: f64 = bins.iter().map(|b| b.norm()).fold(0.0, f64::max);
        for (k, b) in bins.iter().enumerate() {
            let s = dft_at(&rec, k as f64, &mut counter);
            assert!((s - b).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn peak_search_examples() {
        let rec = synthesize(&ToneSpec::new(8, 2, 0.0).unwrap(), None).unwrap();
        assert_eq!(find_peak(&rec).0, 2);
        let rec = synthesize(&ToneSpec::new(8, 2, 0.49).unwrap(), None).unwrap();
        let (k, bins) = find_peak(&rec);
        assert_eq!(k, 2);
        assert!(bins[2].norm() > bins[3].norm());
        // half-bin: bins 2 and 3 have equal magnitude up to rounding
        let rec = synthesize(&ToneSpec::new(8, 3, -0.5).unwrap(), None).unwrap();
        let (k, _) = find_peak(&rec);
        assert!(k == 2 || k == 3);
    }

    #[test]
    fn decompose_inverts_frequency() {
        let spec = ToneSpec::new(16, 2, 0.3).unwrap().with_sample_rate(48_000.0);
        let (k, d) = ToneSpec::decompose(spec.frequency(), 48_000.0, 16).unwrap();
        assert_eq!(k, 2);
        assert!((d - 0.3).abs() < 1e-12);
        let (k, d) = ToneSpec::decompose(1.7 / 8.0, 1.0, 8).unwrap();
        assert_eq!(k, 2);
        assert!((d + 0.3).abs() < 1e-12);
    }

    #[test]
    fn periodic_sinc_limit() {
        assert_eq!(periodic_sinc(0.0, 9), 9.0);
        assert_eq!(periodic_sinc(1e-13, 9), 9.0);
        assert!((periodic_sinc(1e-6, 9) - 9.0).abs() < 1e-9);
        assert!(periodic_sinc(1.0, 9).abs() < 1e-14);
    }
}
