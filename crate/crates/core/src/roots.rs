//! Real roots of polynomials up to degree four, by closed-form formulas.

use std::ops::{Add, Mul, Sub};

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `c0 + c1 x`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Poly(vec![c0, c1])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    fn derivative_at(&self, x: f64) -> f64 {
        self.0.iter().enumerate().skip(1).rev().fold(0.0, |acc, (i, c)| acc * x + i as f64 * c)
    }

    pub fn scale(&self, k: f64) -> Self {
        Poly(self.0.iter().map(|c| c * k).collect())
    }

    /// Real roots, each refined by a few Newton steps on the original polynomial.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut c = self.0.clone();
        let big = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if big == 0.0 {
            return Vec::new();
        }
        while c.len() > 1 && c.last().is_some_and(|x| x.abs() <= 1e-14 * big) {
            c.pop();
        }
        let mut roots = match c.len() {
            0 | 1 => Vec::new(),
            2 => vec![-c[0] / c[1]],
            3 => quadratic(c[2], c[1], c[0]),
            4 => cubic(c[3], c[2], c[1], c[0]),
            5 => quartic(c[4], c[3], c[2], c[1], c[0]),
            _ => panic!("degree above four"),
        };
        for r in roots.iter_mut() {
            for _ in 0..3 {
                let d = self.derivative_at(*r);
                if d == 0.0 {
                    break;
                }
                let next = *r - self.eval(*r) / d;
                if !next.is_finite() || self.eval(next).abs() > self.eval(*r).abs() {
                    break;
                }
                *r = next;
            }
        }
        roots
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + rhs.0.get(i).unwrap_or(&0.0)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &rhs.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Real roots of `a x^2 + b x + c`, using the cancellation-free form.
pub fn quadratic(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b == 0.0 { Vec::new() } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-b / (2.0 * a)];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

/// Real roots of `a x^3 + b x^2 + c x + d`.
pub fn cubic(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    if a == 0.0 {
        return quadratic(b, c, d);
    }
    let (b, c, d) = (b / a, c / a, d / a);
    // depressed: t^3 + p t + q with x = t - b/3
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-q / 2.0 + sq).cbrt();
        let v = (-q / 2.0 - sq).cbrt();
        vec![u + v - shift]
    } else if p == 0.0 {
        vec![-shift]
    } else {
        let r = (-p / 3.0).sqrt();
        let arg = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0);
        let phi = arg.acos();
        (0..3).map(|k| 2.0 * r * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() - shift).collect()
    }
}

/// Real roots of `a x^4 + b x^3 + c x^2 + d x + e` (Ferrari).
pub fn quartic(a: f64, b: f64, c: f64, d: f64, e: f64) -> Vec<f64> {
    if a == 0.0 {
        return cubic(b, c, d, e);
    }
    let (b, c, d, e) = (b / a, c / a, d / a, e / a);
    // depressed: y^4 + p y^2 + q y + r with x = y - b/4
    let shift = b / 4.0;
    let p = c - 3.0 * b * b / 8.0;
    let q = d - b * c / 2.0 + b * b * b / 8.0;
    let r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b.powi(4) / 256.0;
    let mut ys = Vec::new();
    if q.abs() < 1e-14 * (1.0 + p.abs() + r.abs()) {
        // biquadratic
        for z in quadratic(1.0, p, r) {
            if z >= 0.0 {
                ys.push(z.sqrt());
                ys.push(-z.sqrt());
            }
        }
    } else {
        // resolvent: m^3 + p m^2 + (p^2/4 - r) m - q^2/8 = 0, need m > 0
        let m = cubic(1.0, p, p * p / 4.0 - r, -q * q / 8.0).into_iter().fold(f64::NEG_INFINITY, f64::max);
        if m <= 0.0 {
            return Vec::new();
        }
        let s = (2.0 * m).sqrt();
        // (y^2 + p/2 + m)^2 = (s y - q / (2 s))^2
        ys.extend(quadratic(1.0, -s, p / 2.0 + m + q / (2.0 * s)));
        ys.extend(quadratic(1.0, s, p / 2.0 + m - q / (2.0 * s)));
    }
    ys.into_iter().map(|y| y - shift).collect()
}
