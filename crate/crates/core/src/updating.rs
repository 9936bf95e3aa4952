//! The updating function `f(xi)` that maps the residual offset to the
//! measured ratio, its odd Taylor coefficients, the (3,3) Pade approximant
//! `(a1 xi + a3 xi^3) / (1 + b2 xi^2)` and its closed-form inversion.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::Cubic;
use crate::error::{Error, Result};
use crate::signal::SINGULARITY_EPS;

/// Roots whose imaginary part is below this (relative) bound count as real.
pub const REALNESS_TOL: f64 = 1e-7;

/// Inverted offsets are clamped to `[-SAFETY * q, SAFETY * q]`.
pub const SAFETY: f64 = 1.5;

const CONTOUR_POINTS: usize = 64;
const CONTOUR_RADII: [f64; 3] = [0.2, 0.1, 0.05];
const HALVING_TOL: f64 = 1e-6;

pub(crate) fn check_shift(q: f64) -> Result<()> {
    if q > 0.0 && q <= 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidShift(q))
    }
}

/// `sin^2(pi x) / sin^2(pi x / N)`.
fn kernel_sq(x: f64, n: usize) -> f64 {
    if x.abs() < SINGULARITY_EPS {
        let nf = n as f64;
        return nf * nf;
    }
    let num = (PI * x).sin();
    let den = (PI * x / n as f64).sin();
    (num * num) / (den * den)
}

fn kernel_sq_complex(x: Complex64, n: usize) -> Complex64 {
    let num = (x * PI).sin();
    let den = (x * (PI / n as f64)).sin();
    (num * num) / (den * den)
}

fn ratio_unchecked(n: usize, q: f64, xi: f64) -> f64 {
    let plus = kernel_sq(xi - q, n);
    let minus = kernel_sq(xi + q, n);
    (plus - minus) / (plus + minus)
}

/// The updating function
/// `f(xi) = (S(xi, q) - S(xi, -q)) / (S(xi, q) + S(xi, -q))`
/// with `S(xi, +-q) = sin^2(pi(xi -+ q)) / sin^2(pi(xi -+ q)/N)`.
///
/// Only defined here for `|xi| <= q`, where it is odd and strictly increasing.
pub fn eval_f(n: usize, q: f64, xi: f64) -> Result<f64> {
    check_shift(q)?;
    if n < 2 {
        return Err(Error::InvalidConfig(format!("N must be >= 2, got {n}")));
    }
    if !(xi.abs() <= q) {
        return Err(Error::Domain { xi, q });
    }
    Ok(ratio_unchecked(n, q, xi))
}

fn eval_f_complex(n: usize, q: f64, z: Complex64) -> Complex64 {
    let plus = kernel_sq_complex(z - q, n);
    let minus = kernel_sq_complex(z + q, n);
    (plus - minus) / (plus + minus)
}

/// Odd Taylor coefficients of `f` at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorCoeffs {
    pub c1: f64,
    pub c3: f64,
    pub c5: f64,
}

/// Coefficients of `(a1 xi + a3 xi^3) / (1 + b2 xi^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PadeCoeffs {
    pub a1: f64,
    pub a3: f64,
    pub b2: f64,
}

impl PadeCoeffs {
    pub fn eval(&self, xi: f64) -> f64 {
        let x2 = xi * xi;
        xi * (self.a1 + self.a3 * x2) / (1.0 + self.b2 * x2)
    }
}

fn contour_coeffs(n: usize, q: f64, radius: f64) -> [f64; 3] {
    // Cauchy integral on a circle, trapezoid rule. The half-step offset keeps
    // nodes off the real axis, where xi = +-q would hit the removable
    // singularity of S.
    let mut acc = [Complex64::new(0.0, 0.0); 3];
    for m in 0..CONTOUR_POINTS {
        let theta = 2.0 * PI * (m as f64 + 0.5) / CONTOUR_POINTS as f64;
        let f = eval_f_complex(n, q, Complex64::from_polar(radius, theta));
        for (slot, k) in acc.iter_mut().zip([1, 3, 5]) {
            *slot += f * Complex64::from_polar(1.0, -(k as f64) * theta);
        }
    }
    let mut out = [0.0; 3];
    for (i, k) in [1, 3, 5].into_iter().enumerate() {
        out[i] = acc[i].re / CONTOUR_POINTS as f64 / radius.powi(k);
    }
    out
}

/// Degree 1, 3 and 5 Taylor coefficients of `f` for the given `(N, q)`.
///
/// Evaluated by contour integration of `f` around the origin; two radii are
/// compared and must agree to `1e-6` (relative to the coefficient scale).
pub fn taylor_coeffs(n: usize, q: f64) -> Result<TaylorCoeffs> {
    check_shift(q)?;
    if n < 2 {
        return Err(Error::InvalidConfig(format!("N must be >= 2, got {n}")));
    }
    let mut worst = String::new();
    for pair in CONTOUR_RADII.windows(2) {
        let wide = contour_coeffs(n, q, pair[0]);
        let narrow = contour_coeffs(n, q, pair[1]);
        let scale = wide[0].abs();
        let agree = wide.iter().zip(&narrow).all(|(a, b)| {
            a.is_finite() && b.is_finite() && (a - b).abs() <= HALVING_TOL * a.abs().max(1e-3 * scale)
        });
        if agree {
            let c = TaylorCoeffs {
                c1: wide[0],
                c3: wide[1],
                c5: wide[2],
            };
            if !(c.c1 > 0.0) {
                return Err(Error::TaylorUnstable {
                    n,
                    q,
                    detail: format!("c1 = {} is not positive", c.c1),
                });
            }
            return Ok(c);
        }
        worst = format!("radius {} gave {wide:?}, radius {} gave {narrow:?}", pair[0], pair[1]);
    }
    Err(Error::TaylorUnstable { n, q, detail: worst })
}

/// Pade coefficients matching the Taylor series through degree six:
/// `a1 = c1`, `b2 = -c5/c3`, `a3 = c3 - c1 c5 / c3`.
pub fn build_pade(c1: f64, c3: f64, c5: f64) -> Result<PadeCoeffs> {
    if c3 == 0.0 {
        return Err(Error::DegenerateModel);
    }
    let ratio = c5 / c3;
    Ok(PadeCoeffs {
        a1: c1,
        a3: c3 - c1 * ratio,
        b2: -ratio,
    })
}

/// Everything needed to invert `f` for one `(N, q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PadeModel {
    pub n_samples: usize,
    pub shift: f64,
    pub taylor: TaylorCoeffs,
    /// `None` when `c3 == 0`; inversion then falls back to `xi = rho / c1`.
    pub pade: Option<PadeCoeffs>,
}

impl PadeModel {
    pub fn new(n_samples: usize, shift: f64) -> Result<Self> {
        let taylor = taylor_coeffs(n_samples, shift)?;
        let pade = match build_pade(taylor.c1, taylor.c3, taylor.c5) {
            Ok(p) => Some(p),
            Err(Error::DegenerateModel) => None,
            Err(e) => return Err(e),
        };
        Ok(PadeModel {
            n_samples,
            shift,
            taylor,
            pade,
        })
    }

    /// Shared, lazily built model for `(N, q)`.
    pub fn cached(n_samples: usize, shift: f64) -> Result<Arc<PadeModel>> {
        PadeCache::global().get(n_samples, shift)
    }

    /// The approximant `f_hat(xi)`, or the linear term for a degenerate model.
    pub fn approx(&self, xi: f64) -> f64 {
        match &self.pade {
            Some(p) => p.eval(xi),
            None => self.taylor.c1 * xi,
        }
    }

    pub const CSV_HEADER: &'static str = "n,q,c1,c3,c5,a1,a3,b2";

    pub fn csv_row(&self) -> String {
        let (a1, a3, b2) = match &self.pade {
            Some(p) => (p.a1, p.a3, p.b2),
            None => (self.taylor.c1, 0.0, 0.0),
        };
        format!(
            "{},{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            self.n_samples, self.shift, self.taylor.c1, self.taylor.c3, self.taylor.c5, a1, a3, b2
        )
    }
}

/// Thread-safe `(N, q) -> PadeModel` cache.
#[derive(Debug, Default)]
pub struct PadeCache {
    models: RwLock<HashMap<(usize, u64), Arc<PadeModel>>>,
}

impl PadeCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn global() -> &'static PadeCache {
        static CACHE: OnceLock<PadeCache> = OnceLock::new();
        CACHE.get_or_init(PadeCache::new)
    }

    pub fn get(&self, n_samples: usize, shift: f64) -> Result<Arc<PadeModel>> {
        let key = (n_samples, shift.to_bits());
        if let Some(m) = self.models.read().expect("pade cache poisoned").get(&key) {
            return Ok(Arc::clone(m));
        }
        let model = Arc::new(PadeModel::new(n_samples, shift)?);
        let mut guard = self.models.write().expect("pade cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(model)))
    }

    pub fn len(&self) -> usize {
        self.models.read().expect("pade cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The cubic `xi^3 + k2 xi^2 + k1 xi + k0 = 0` obtained from `f_hat(xi) = rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicProblem {
    pub k2: f64,
    pub k1: f64,
    pub k0: f64,
    pub rho: f64,
}

impl CubicProblem {
    /// `None` when `a3 == 0` (the equation is not cubic).
    pub fn new(pade: &PadeCoeffs, rho: f64) -> Option<Self> {
        if pade.a3 == 0.0 {
            return None;
        }
        Some(CubicProblem {
            k2: -rho * pade.b2 / pade.a3,
            k1: pade.a1 / pade.a3,
            k0: -rho / pade.a3,
            rho,
        })
    }

    pub fn cubic(&self) -> Cubic {
        Cubic::new(self.k2, self.k1, self.k0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubicSolution {
    Roots([Complex64; 3]),
    /// `a3 == 0` (or no Pade model): `xi = rho / a1`.
    Linear(f64),
}

pub fn solve_cubic(model: &PadeModel, rho: f64) -> CubicSolution {
    let Some(pade) = model.pade else {
        return CubicSolution::Linear(rho / model.taylor.c1);
    };
    match CubicProblem::new(&pade, rho) {
        Some(problem) => CubicSolution::Roots(problem.cubic().roots()),
        None => CubicSolution::Linear(rho / pade.a1),
    }
}

/// Result of inverting one measured ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub xi: f64,
    /// The linear update was used instead of the cubic.
    pub linear: bool,
    /// The root fell outside `[-1.5 q, 1.5 q]` and was clamped.
    pub clamped: bool,
}

/// Solves `f_hat(xi) = rho` for the real root closest to zero.
pub fn invert(model: &PadeModel, rho: f64) -> Result<Inversion> {
    let (raw, linear) = match solve_cubic(model, rho) {
        CubicSolution::Linear(xi) => (xi, true),
        CubicSolution::Roots(roots) => {
            let best = roots
                .iter()
                .filter(|z| z.im.abs() <= REALNESS_TOL * (1.0 + z.re.abs()))
                .map(|z| z.re)
                .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                .ok_or(Error::NoRealRoot { rho })?;
            (polish_root(model, rho, best), false)
        }
    };
    if !raw.is_finite() {
        return Err(Error::NoRealRoot { rho });
    }
    let limit = SAFETY * model.shift;
    let xi = raw.clamp(-limit, limit);
    Ok(Inversion {
        xi,
        linear,
        clamped: xi != raw,
    })
}

/// Newton steps on the unnormalized `a3 x^3 - rho b2 x^2 + a1 x - rho`,
/// which stays well scaled when `a3` is small.
fn polish_root(model: &PadeModel, rho: f64, mut x: f64) -> f64 {
    let Some(p) = model.pade else { return x };
    let poly = |x: f64| ((p.a3 * x - rho * p.b2) * x + p.a1) * x - rho;
    let deriv = |x: f64| (3.0 * p.a3 * x - 2.0 * rho * p.b2) * x + p.a1;
    let mut res = poly(x).abs();
    for _ in 0..2 {
        let d = deriv(x);
        if d == 0.0 || res == 0.0 {
            break;
        }
        let next = x - poly(x) / d;
        let next_res = poly(next).abs();
        if !(next_res < res) {
            break;
        }
        x = next;
        res = next_res;
    }
    x
}
