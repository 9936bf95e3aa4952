//! On-demand property checks of the updating function: strict monotonicity,
//! odd symmetry and the seventh-order decay of the Pade error.

use std::fmt;

use serde::Serialize;

use crate::dd;
use crate::error::Result;
use crate::updating::{self, PadeModel};

pub const DEFAULT_NS: [usize; 5] = [4, 8, 16, 32, 64];
pub const DEFAULT_QS: [f64; 4] = [0.1, 0.25, 0.32, 0.5];
pub const GRID_POINTS: usize = 1001;
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Halving the argument must shrink the error by at least `2^-6`, plus slack.
pub const DECAY_BOUND: f64 = 1.0 / 64.0 + 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Monotone,
    Odd,
    Decay,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Monotone => "monotone",
            Property::Odd => "odd",
            Property::Decay => "decay",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub property: Property,
    pub n: usize,
    pub q: f64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<8} N={:<3} q={:<6} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.property,
            self.n,
            self.q,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PropsReport {
    pub checks: Vec<CheckResult>,
}

impl PropsReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn grid(q: f64, points: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * q / (points - 1) as f64;
    (0..points).map(move |i| {
        if i == points - 1 {
            q
        } else {
            -q + step * i as f64
        }
    })
}

/// Strictly increasing on `points` evenly spaced values over `[-q, q]`.
pub fn check_monotone(f: impl Fn(f64) -> f64, q: f64, points: usize) -> std::result::Result<(), String> {
    let mut prev: Option<(f64, f64)> = None;
    for xi in grid(q, points) {
        let y = f(xi);
        if let Some((px, py)) = prev {
            if !(y > py) {
                return Err(format!("f({px}) = {py} >= f({xi}) = {y}"));
            }
        }
        prev = Some((xi, y));
    }
    Ok(())
}

/// `|f(xi) + f(-xi)| <= tol` on the same grid; returns the worst deviation.
pub fn check_odd(f: impl Fn(f64) -> f64, q: f64, points: usize, tol: f64) -> std::result::Result<f64, String> {
    let mut worst = 0.0f64;
    for xi in grid(q, points) {
        let dev = (f(xi) + f(-xi)).abs();
        if !(dev <= tol) {
            return Err(format!("|f({xi}) + f({})| = {dev:e}", -xi));
        }
        worst = worst.max(dev);
    }
    Ok(worst)
}

/// Pade error `|f(xi) - fhat(xi)|`, evaluated in double-double so that
/// f64 rounding does not mask the true error at small `xi`.
pub fn pade_error(model: &PadeModel, xi: f64) -> f64 {
    let exact = dd::eval_f(model.n_samples, model.shift, xi);
    let approx = match model.pade {
        Some(p) => dd::eval_pade(p.a1, p.a3, p.b2, xi),
        None => dd::eval_pade(model.taylor.c1, 0.0, 0.0, xi),
    };
    (exact - approx).abs().to_f64()
}

/// `e(xi/2) / e(xi)` for `xi` in `{q/4, q/8}`.
pub fn decay_ratios(model: &PadeModel) -> [(f64, f64); 2] {
    let q = model.shift;
    [q / 4.0, q / 8.0].map(|xi| (xi, pade_error(model, xi / 2.0) / pade_error(model, xi)))
}

fn result(property: Property, n: usize, q: f64, outcome: std::result::Result<String, String>) -> CheckResult {
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { property, n, q, passed, detail }
}

/// Runs every check over the `ns x qs` grid using the library's `eval_f`.
pub fn run_props(ns: &[usize], qs: &[f64]) -> Result<PropsReport> {
    run_props_with(ns, qs, |n, q, xi| updating::eval_f(n, q, xi))
}

/// Like [`run_props`] but with a caller-supplied updating function for the
/// shape checks, so a deliberately broken `f` can be shown to fail.
pub fn run_props_with(
    ns: &[usize],
    qs: &[f64],
    f: impl Fn(usize, f64, f64) -> Result<f64>,
) -> Result<PropsReport> {
    let mut report = PropsReport::default();
    for &n in ns {
        for &q in qs {
            // surface domain errors before running the closures
            f(n, q, 0.0)?;
            let g = |xi: f64| f(n, q, xi).unwrap_or(f64::NAN);

            let mono = check_monotone(g, q, GRID_POINTS).map(|_| format!("{GRID_POINTS} points"));
            report.checks.push(result(Property::Monotone, n, q, mono));

            let odd = check_odd(g, q, GRID_POINTS, SYMMETRY_TOL).map(|w| format!("max |f(x)+f(-x)| = {w:.1e}"));
            report.checks.push(result(Property::Odd, n, q, odd));

            let model = PadeModel::cached(n, q)?;
            let ratios = decay_ratios(&model);
            let text = ratios
                .iter()
                .map(|(xi, r)| format!("e({:.4})/e({:.4}) = {r:.5}", xi / 2.0, xi))
                .collect::<Vec<_>>()
                .join(", ");
            let ok = ratios.iter().all(|(_, r)| *r <= DECAY_BOUND);
            report
                .checks
                .push(result(Property::Decay, n, q, if ok { Ok(text) } else { Err(text) }));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids_pass() {
        let report = run_props(&DEFAULT_NS, &DEFAULT_QS).unwrap();
        for c in &report.checks {
            assert!(c.passed, "{c}");
        }
        assert_eq!(report.checks.len(), 3 * DEFAULT_NS.len() * DEFAULT_QS.len());
    }

    #[test]
    fn sign_flip_breaks_symmetry() {
        let flipped = |n: usize, q: f64, xi: f64| {
            let y = updating::eval_f(n, q, xi)?;
            Ok(if xi < 0.0 { -y } else { y })
        };
        let report = run_props_with(&[16], &[0.25], flipped).unwrap();
        assert!(!report.passed());
        assert!(report.failures().any(|c| c.property == Property::Odd));
    }

    #[test]
    fn half_cycle_edge_is_monotone() {
        let report = run_props(&[4], &[0.5]).unwrap();
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn decay_is_close_to_seventh_order() {
        let model = PadeModel::new(16, 0.25).unwrap();
        for (_, r) in decay_ratios(&model) {
            assert!((r - 1.0 / 128.0).abs() < 2e-3, "{r}");
        }
    }

    #[test]
    fn checks_reject_bad_functions() {
        assert!(check_monotone(|x: f64| x * x, 0.25, 11).is_err());
        assert!(check_monotone(|x: f64| x, 0.25, 11).is_ok());
        assert!(check_odd(|x: f64| x + 1e-9, 0.25, 11, 1e-12).is_err());
    }
}
