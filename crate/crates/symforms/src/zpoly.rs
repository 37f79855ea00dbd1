//! Polynomials in the formal variable Z with q-expansion coefficients.
//!
//! These carry the explicit z-dependence of the standard vectors
//! `t(z^n, ..., z, 1)` and their derivatives.  The one differentiation rule
//! that matters: d/dz maps `f(q)·z^d` to `Pi·θf·z^d + d·f·z^{d-1}`; the
//! series part contributes one formal 2πi per derivative, the monomial part
//! none.

use num_complex::Complex64;

use crate::error::Result;
use crate::pi::{PiPoly, Rat};
use crate::qseries::QSeries;

/// Polynomial in Z; `coeffs[d]` is the coefficient of `Z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZPoly {
    coeffs: Vec<QSeries>,
}

impl ZPoly {
    pub fn zero(order: Rat) -> Self {
        ZPoly {
            coeffs: vec![QSeries::zero(order)],
        }
    }

    pub fn from_coeffs(coeffs: Vec<QSeries>) -> Self {
        assert!(!coeffs.is_empty());
        let mut p = ZPoly { coeffs };
        p.trim();
        p
    }

    /// The monomial `c · Z^d`.
    pub fn z_monomial(c: QSeries, d: usize) -> Self {
        let order = c.order().clone();
        let mut coeffs = vec![QSeries::zero(order); d + 1];
        coeffs[d] = c;
        ZPoly { coeffs }
    }

    /// A plain series, i.e. degree 0 in Z.
    pub fn from_series(s: QSeries) -> Self {
        ZPoly { coeffs: vec![s] }
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().is_zero() {
            self.coeffs.pop();
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, d: usize) -> QSeries {
        self.coeffs
            .get(d)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.order()))
    }

    pub fn coeffs(&self) -> &[QSeries] {
        &self.coeffs
    }

    pub fn order(&self) -> Rat {
        self.coeffs.iter().map(|c| c.order().clone()).min().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when the polynomial has no Z-dependence below the given exactness
    /// bound; the degree-0 part is then the whole value.
    pub fn is_z_free(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    /// Extract the plain series if Z cancels entirely.
    pub fn as_series(&self) -> Option<&QSeries> {
        if self.is_z_free() {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    pub fn add(&self, rhs: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for d in 0..n {
            coeffs.push(self.coeff(d).add(&rhs.coeff(d)));
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &ZPoly) -> ZPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn mul_series(&self, s: &QSeries) -> ZPoly {
        ZPoly::from_coeffs(self.coeffs.iter().map(|c| c.mul(s)).collect())
    }

    pub fn scale(&self, c: &PiPoly) -> ZPoly {
        ZPoly::from_coeffs(self.coeffs.iter().map(|x| x.scale(c)).collect())
    }

    pub fn scale_rat(&self, c: &Rat) -> ZPoly {
        self.scale(&PiPoly::from_rat(c.clone()))
    }

    pub fn mul(&self, rhs: &ZPoly) -> ZPoly {
        let order = self.order().min(rhs.order());
        let n = self.degree() + rhs.degree();
        let mut coeffs = vec![QSeries::zero(order); n + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].add(&a.mul(b));
            }
        }
        ZPoly::from_coeffs(coeffs)
    }

    /// Multiply by `(c·Z)^d`-style monomial `c · Z^d`.
    pub fn mul_z_monomial(&self, c: &Rat, d: usize) -> ZPoly {
        let order = self.order();
        let mut coeffs = vec![QSeries::zero(order); self.coeffs.len() + d];
        for (i, a) in self.coeffs.iter().enumerate() {
            coeffs[i + d] = a.scale_rat(c);
        }
        ZPoly::from_coeffs(coeffs)
    }

    /// D = d/dz, acting on both the series (as `Pi`·θ) and the Z-monomials.
    pub fn z_derive(&self) -> ZPoly {
        let order = self.order();
        let n = self.coeffs.len();
        let mut coeffs = vec![QSeries::zero(order); n];
        for (d, c) in self.coeffs.iter().enumerate() {
            coeffs[d] = coeffs[d].add(&c.z_derive(1));
            if d > 0 {
                let lowered = c.scale_rat(&Rat::from_integer((d as i64).into()));
                coeffs[d - 1] = coeffs[d - 1].add(&lowered);
            }
        }
        ZPoly::from_coeffs(coeffs)
    }

    pub fn z_derive_n(&self, r: u32) -> ZPoly {
        let mut p = self.clone();
        for _ in 0..r {
            p = p.z_derive();
        }
        p
    }

    /// Coefficientwise equality below the exponent bound `upto`.
    pub fn eq_below(&self, rhs: &ZPoly, upto: &Rat) -> bool {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        (0..n).all(|d| self.coeff(d).eq_below(&rhs.coeff(d), upto))
    }

    /// Numeric evaluation: both the q-expansions and the Z-monomials are
    /// evaluated at the same point z.  Returns the value and a tail bound.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut tail = 0.0f64;
        let mut zp = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            let (v, t) = c.eval(z)?;
            acc += v * zp;
            tail += t * zp.norm();
            zp *= z;
        }
        Ok((acc, tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::rat_int;

    fn q_order(n: i64) -> Rat {
        rat_int(n)
    }

    #[test]
    fn derivative_of_monomial_times_series() {
        // f = q, p = f * Z^2: Dp = Pi*q*Z^2 + 2q*Z
        let f = QSeries::monomial(PiPoly::one(), 1, 1, q_order(9));
        let p = ZPoly::z_monomial(f.clone(), 2);
        let dp = p.z_derive();
        assert_eq!(dp.coeff(2), f.z_derive(1));
        assert_eq!(dp.coeff(1), f.scale_rat(&rat_int(2)));
        assert!(dp.coeff(0).is_zero());
    }

    #[test]
    fn pure_z_powers_differentiate_without_pi() {
        // D(z^3) = 3 z^2, no formal constant involved
        let one = QSeries::one(q_order(5));
        let p = ZPoly::z_monomial(one.clone(), 3);
        let dp = p.z_derive();
        assert_eq!(dp.degree(), 2);
        assert_eq!(dp.coeff(2), one.scale_rat(&rat_int(3)));
        assert!(dp.coeff(2).is_pi_free());
    }

    #[test]
    fn z_cancellation_detection() {
        let one = QSeries::one(q_order(5));
        let p = ZPoly::z_monomial(one.clone(), 1);
        let q = p.sub(&ZPoly::z_monomial(one.clone(), 1));
        assert!(q.is_z_free());
        assert!(p.as_series().is_none());
    }

    #[test]
    fn eval_matches_hand_value() {
        let one = QSeries::one(q_order(5));
        let p = ZPoly::z_monomial(one, 2); // Z^2
        let z = Complex64::new(0.0, 1.0);
        let (v, _) = p.eval(z).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }
}
