//! Minimal double-double arithmetic, enough to evaluate the updating function
//! and its Pade approximant below f64 rounding when checking error decay.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub(crate) const PI: Dd = Dd { hi: PI, lo: PI_LO };

    pub(crate) fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub(crate) fn sqr(self) -> Dd {
        self * self
    }

    /// Taylor series; accurate for the `|x| <= pi` arguments used here.
    pub(crate) fn sin(self) -> Dd {
        let x2 = self.sqr();
        let mut term = self;
        let mut sum = self;
        let mut k = 1.0;
        while term.hi.abs() > 1e-36 {
            term = -(term * x2) / Dd::new((k + 1.0) * (k + 2.0));
            sum = sum + term;
            k += 2.0;
        }
        sum
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

fn kernel_sq(x: Dd, n: usize) -> Dd {
    if x.hi == 0.0 {
        let nf = Dd::new(n as f64);
        return nf * nf;
    }
    let arg = Dd::PI * x;
    arg.sin().sqr() / (arg / Dd::new(n as f64)).sin().sqr()
}

/// Updating function in double-double.
pub(crate) fn eval_f(n: usize, q: f64, xi: f64) -> Dd {
    let plus = kernel_sq(Dd::new(xi) - Dd::new(q), n);
    let minus = kernel_sq(Dd::new(xi) + Dd::new(q), n);
    (plus - minus) / (plus + minus)
}

/// `(a1 xi + a3 xi^3) / (1 + b2 xi^2)` in double-double.
pub(crate) fn eval_pade(a1: f64, a3: f64, b2: f64, xi: f64) -> Dd {
    let x = Dd::new(xi);
    let x2 = x.sqr();
    let num = x * (Dd::new(a1) + Dd::new(a3) * x2);
    num / (Dd::new(1.0) + Dd::new(b2) * x2)
}
