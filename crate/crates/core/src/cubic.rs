//! Closed-form roots of a monic real cubic `x^3 + k2 x^2 + k1 x + k0`.
//!
//! Uses the trigonometric form when all three roots are real and Cardano's
//! form otherwise, followed by a Newton polish of every root.

use std::f64::consts::PI;

use num_complex::Complex64;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Monic cubic `x^3 + k2 x^2 + k1 x + k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub k2: f64,
    pub k1: f64,
    pub k0: f64,
}

impl Cubic {
    pub fn new(k2: f64, k1: f64, k0: f64) -> Self {
        Cubic { k2, k1, k0 }
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        ((x + self.k2) * x + self.k1) * x + self.k0
    }

    fn deriv(&self, x: Complex64) -> Complex64 {
        (3.0 * x + 2.0 * self.k2) * x + self.k1
    }

    /// The three roots, real ones first in ascending order.
    pub fn roots(&self) -> [Complex64; 3] {
        let Cubic { k2, k1, k0 } = *self;
        let shift = k2 / 3.0;
        // depressed form t^3 + 3 q t - 2 r = 0, x = t - k2/3
        let q = (3.0 * k1 - k2 * k2) / 9.0;
        let r = (9.0 * k1 * k2 - 27.0 * k0 - 2.0 * k2 * k2 * k2) / 54.0;
        let disc = q * q * q + r * r;

        let mut roots = if q == 0.0 && r == 0.0 {
            [Complex64::new(-shift, 0.0); 3]
        } else if disc <= 0.0 {
            // three real roots
            let m = (-q).sqrt();
            let cos_arg = (r / (m * m * m)).clamp(-1.0, 1.0);
            let theta = cos_arg.acos();
            let mut t = [0.0; 3];
            for (j, tj) in t.iter_mut().enumerate() {
                *tj = 2.0 * m * ((theta + 2.0 * PI * j as f64) / 3.0).cos() - shift;
            }
            t.sort_by(|a, b| a.total_cmp(b));
            [
                Complex64::new(t[0], 0.0),
                Complex64::new(t[1], 0.0),
                Complex64::new(t[2], 0.0),
            ]
        } else {
            // one real root; pick the cube-root branch that avoids cancellation
            let sd = disc.sqrt();
            let s = (r + r.signum() * sd).cbrt();
            let t = if s == 0.0 { 0.0 } else { -q / s };
            let real = s + t - shift;
            let re = -(s + t) / 2.0 - shift;
            let im = SQRT3 / 2.0 * (s - t).abs();
            [
                Complex64::new(real, 0.0),
                Complex64::new(re, im),
                Complex64::new(re, -im),
            ]
        };

        for z in roots.iter_mut() {
            *z = self.polish(*z);
        }
        roots
    }

    fn polish(&self, mut z: Complex64) -> Complex64 {
        let mut res = self.eval(z).norm();
        for _ in 0..3 {
            if res == 0.0 {
                break;
            }
            let d = self.deriv(z);
            if d.norm() == 0.0 {
                break;
            }
            let next = z - self.eval(z) / d;
            let next_res = self.eval(next).norm();
            if !(next_res < res) {
                break;
            }
            z = if z.im == 0.0 { Complex64::new(next.re, 0.0) } else { next };
            res = next_res;
        }
        z
    }
}
