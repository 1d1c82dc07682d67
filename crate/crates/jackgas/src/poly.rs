//! Small dense real polynomials.
//!
//! Used for the loop-equation data (the limits `Phi^-`, `Phi^+` and `R_mu`
//! are polynomials of degree at most two) and for CLT test functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Real polynomial `c[0] + c[1] x + c[2] x^2 + ...` with dense coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    pub fn new(coeffs: impl Into<Vec<f64>>) -> Self {
        let mut coeffs = coeffs.into();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn eval_c(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect::<Vec<_>>())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.coeffs.get(i).copied().unwrap_or(0.0)
                + other.coeffs.get(i).copied().unwrap_or(0.0);
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_mul() {
        let p = Poly::new(vec![1.0, -3.0, 2.0]); // 1 - 3x + 2x^2
        assert_eq!(p.eval(2.0), 3.0);
        let q = Poly::new(vec![0.0, 1.0]); // x
        assert_eq!(p.mul(&q).eval(2.0), 6.0);
        assert_eq!(p.degree(), 2);
        let z = Complex64::new(0.0, 1.0);
        let v = p.eval_c(z);
        assert!((v - (Complex64::new(1.0, 0.0) - 3.0 * z + 2.0 * z * z)).norm() < 1e-15);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 0);
        assert_eq!(Poly::zero().eval(3.0), 0.0);
    }
}
