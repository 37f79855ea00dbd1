//! Truncated q-expansions with exact coefficients.
//!
//! A [`QSeries`] stores finitely many terms `c_e · q^e` with `c_e` a
//! [`PiPoly`] and `e` a nonnegative rational whose denominator divides 24
//! (enough for η = q^{1/24}(...) and theta quotients).  The `order` field is
//! the truncation contract: every exponent strictly below `order` is exact.
//! Arithmetic never extends precision; results carry the minimum order of
//! the operands.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::pi::{rat_int, PiPoly, Rat};

/// Exponent denominators must divide this.
pub const MAX_DEN: u32 = 24;

/// Truncated Fourier expansion in q with exact `PiPoly` coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    den: u32,
    coeffs: BTreeMap<i64, PiPoly>,
    order: Rat,
}

fn gcd_u(a: u32, b: u32) -> u32 {
    num_integer::gcd(a, b)
}

impl QSeries {
    /// The zero series, exact below `order`.
    pub fn zero(order: Rat) -> Self {
        QSeries {
            den: 1,
            coeffs: BTreeMap::new(),
            order,
        }
    }

    /// The constant series `c`, exact below `order`.
    pub fn constant(c: PiPoly, order: Rat) -> Self {
        let mut s = Self::zero(order);
        s.set_coeff(0, 1, c);
        s
    }

    pub fn one(order: Rat) -> Self {
        Self::constant(PiPoly::one(), order)
    }

    /// A single term `c · q^{num/den}`.
    pub fn monomial(c: PiPoly, num: i64, den: u32, order: Rat) -> Self {
        let mut s = Self::zero(order);
        s.set_coeff(num, den, c);
        s.normalize();
        s
    }

    /// Build from integer-exponent rational coefficients `[(e, c)]`.
    pub fn from_int_coeffs(coeffs: &[(i64, Rat)], order: i64) -> Self {
        let mut s = Self::zero(rat_int(order));
        for (e, c) in coeffs {
            s.set_coeff(*e, 1, PiPoly::from_rat(c.clone()));
        }
        s
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn order(&self) -> &Rat {
        &self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterate terms as `(numerator, coefficient)` with exponent = num/den().
    pub fn terms(&self) -> impl Iterator<Item = (i64, &PiPoly)> {
        self.coeffs.iter().map(|(k, v)| (*k, v))
    }

    /// Coefficient at exponent `num/den` (den must divide supported range).
    pub fn coeff(&self, num: i64, den: u32) -> PiPoly {
        assert!(
            den > 0 && MAX_DEN.is_multiple_of(den),
            "denominator must divide 24"
        );
        // exponent num/den in units of self.den: need num*self.den/den integral
        let scaled = num as i128 * self.den as i128;
        if scaled % den as i128 != 0 {
            return PiPoly::zero();
        }
        let key = (scaled / den as i128) as i64;
        self.coeffs.get(&key).cloned().unwrap_or_else(PiPoly::zero)
    }

    /// Coefficient at an integer exponent.
    pub fn coeff_int(&self, e: i64) -> PiPoly {
        self.coeff(e, 1)
    }

    /// Set the coefficient at exponent `num/den`, lifting the internal
    /// denominator as needed.  Panics on negative exponents: all series in
    /// scope are holomorphic at the cusp.
    pub fn set_coeff(&mut self, num: i64, den: u32, c: PiPoly) {
        assert!(
            den > 0 && MAX_DEN.is_multiple_of(den),
            "denominator must divide 24"
        );
        assert!(num >= 0, "negative exponents are out of scope");
        let l = self.den / gcd_u(self.den, den) * den;
        if l != self.den {
            let f = (l / self.den) as i64;
            self.coeffs = self
                .coeffs
                .iter()
                .map(|(k, v)| (k * f, v.clone()))
                .collect();
            self.den = l;
        }
        let key = num * (self.den / den) as i64;
        if Rat::new(key.into(), (self.den as i64).into()) >= self.order {
            return; // beyond the truncation contract
        }
        if c.is_zero() {
            self.coeffs.remove(&key);
        } else {
            self.coeffs.insert(key, c);
        }
    }

    fn add_to_coeff(&mut self, key: i64, c: &PiPoly) {
        if c.is_zero() {
            return;
        }
        let cur = self.coeffs.entry(key).or_insert_with(PiPoly::zero);
        let sum = &*cur + c;
        if sum.is_zero() {
            self.coeffs.remove(&key);
        } else {
            *cur = sum;
        }
    }

    /// Reduce `den` to the smallest divisor of 24 representing all exponents.
    fn normalize(&mut self) {
        // drop anything at or beyond the order (defensive; ops maintain this)
        let order = self.order.clone();
        let den = self.den;
        self.coeffs
            .retain(|k, v| !v.is_zero() && Rat::new((*k).into(), (den as i64).into()) < order);
        if self.coeffs.is_empty() {
            self.den = 1;
            return;
        }
        let mut g = self.den as i64;
        for k in self.coeffs.keys() {
            g = num_integer::gcd(g, *k);
            if g == 1 {
                break;
            }
        }
        let g = gcd_u(self.den, g.unsigned_abs() as u32);
        if g > 1 {
            self.den /= g;
            self.coeffs = self
                .coeffs
                .iter()
                .map(|(k, v)| (k / g as i64, v.clone()))
                .collect();
        }
    }

    fn lift_pair(a: &QSeries, b: &QSeries) -> (QSeries, QSeries, u32) {
        let l = a.den / gcd_u(a.den, b.den) * b.den;
        let lift = |s: &QSeries| -> QSeries {
            let f = (l / s.den) as i64;
            QSeries {
                den: l,
                coeffs: s.coeffs.iter().map(|(k, v)| (k * f, v.clone())).collect(),
                order: s.order.clone(),
            }
        };
        (lift(a), lift(b), l)
    }

    pub fn add(&self, rhs: &QSeries) -> QSeries {
        let (a, b, den) = Self::lift_pair(self, rhs);
        let order = a.order.clone().min(b.order.clone());
        let mut out = QSeries {
            den,
            coeffs: a.coeffs,
            order,
        };
        for (k, v) in &b.coeffs {
            out.add_to_coeff(*k, v);
        }
        out.normalize();
        out
    }

    pub fn sub(&self, rhs: &QSeries) -> QSeries {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect(),
            order: self.order.clone(),
        }
    }

    pub fn mul(&self, rhs: &QSeries) -> QSeries {
        let (a, b, den) = Self::lift_pair(self, rhs);
        let order = a.order.clone().min(b.order.clone());
        let bound = &order * Rat::from_integer((den as i64).into());
        let mut out = QSeries {
            den,
            coeffs: BTreeMap::new(),
            order,
        };
        for (k1, v1) in &a.coeffs {
            for (k2, v2) in &b.coeffs {
                let k = k1 + k2;
                if Rat::from_integer(k.into()) < bound {
                    out.add_to_coeff(k, &(v1 * v2));
                }
            }
        }
        out.normalize();
        out
    }

    pub fn scale(&self, c: &PiPoly) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.order.clone());
        }
        let mut out = QSeries {
            den: self.den,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(),
            order: self.order.clone(),
        };
        out.normalize();
        out
    }

    pub fn scale_rat(&self, c: &Rat) -> QSeries {
        self.scale(&PiPoly::from_rat(c.clone()))
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut result = QSeries::one(self.order.clone());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// θ = q·d/dq: multiplies the coefficient at exponent e by e.  The full
    /// derivative D = d/dz equals `Pi`·θ on q-expansions.
    pub fn theta_derive(&self) -> QSeries {
        let den = rat_int(self.den as i64);
        let mut out = QSeries {
            den: self.den,
            coeffs: BTreeMap::new(),
            order: self.order.clone(),
        };
        for (k, v) in &self.coeffs {
            let e = rat_int(*k) / den.clone();
            out.add_to_coeff(*k, &v.scale(&e));
        }
        out.normalize();
        out
    }

    /// D = d/dz applied r times: `Pi^r · θ^r`.
    pub fn z_derive(&self, r: u32) -> QSeries {
        let mut s = self.clone();
        for _ in 0..r {
            s = s.theta_derive().scale(&PiPoly::monomial(Rat::one(), 1));
        }
        s
    }

    /// Multiply by `q^{num/den}` (shifting all exponents up).
    pub fn mul_q_power(&self, num: i64, den: u32) -> QSeries {
        assert!(num >= 0);
        let shift = Rat::new(num.into(), (den as i64).into());
        let mut out = QSeries::zero(&self.order + &shift);
        for (k, v) in &self.coeffs {
            let e = Rat::new((*k).into(), (self.den as i64).into()) + &shift;
            let (n, d) = rat_to_num_den(&e);
            out.set_coeff(n, d, v.clone());
        }
        out
    }

    /// Multiplicative inverse of a unit (exponent-0 coefficient must be an
    /// invertible `Pi`-monomial).  Exact below the input's order.
    pub fn invert(&self) -> Result<QSeries> {
        let a0 = self.coeff_int(0);
        let a0_inv = a0
            .invert_monomial()
            .ok_or_else(|| Error::InvalidArgument("series is not a unit".into()))?;
        let den = self.den;
        // largest key with key/den < order
        let scaled = &self.order * Rat::from_integer((den as i64).into());
        let upper = if scaled.is_integer() {
            scaled.to_integer().to_i64().unwrap() - 1
        } else {
            scaled.floor().to_integer().to_i64().unwrap()
        };
        let nonconst: Vec<(i64, PiPoly)> = self
            .coeffs
            .iter()
            .filter(|(k, _)| **k > 0)
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        // b_k = -a0^{-1} · Σ_{0<j<=k} a_j b_{k-j}, over keys reachable as sums
        // of input keys (the inverse is supported there and nowhere else)
        let mut inv: BTreeMap<i64, PiPoly> = BTreeMap::new();
        inv.insert(0, a0_inv.clone());
        let mut pending: std::collections::BTreeSet<i64> = nonconst
            .iter()
            .map(|(j, _)| *j)
            .filter(|j| *j <= upper)
            .collect();
        while let Some(k) = pending.iter().next().cloned() {
            pending.remove(&k);
            let mut acc = PiPoly::zero();
            for (j, aj) in &nonconst {
                if *j > k {
                    break;
                }
                if let Some(b) = inv.get(&(k - j)) {
                    acc = &acc + &(aj * b);
                }
            }
            if !acc.is_zero() {
                inv.insert(k, &(-&acc) * &a0_inv);
                for (j, _) in &nonconst {
                    let nk = k + j;
                    if nk <= upper && !inv.contains_key(&nk) {
                        pending.insert(nk);
                    }
                }
            }
        }
        let mut out = QSeries {
            den,
            coeffs: inv,
            order: self.order.clone(),
        };
        out.normalize();
        Ok(out)
    }

    /// Exact equality of all coefficients at exponents strictly below `upto`
    /// (and below both orders).
    pub fn eq_below(&self, rhs: &QSeries, upto: &Rat) -> bool {
        self.first_mismatch_below(rhs, upto).is_none()
    }

    /// First exponent below `upto` where the two series differ, if any.
    pub fn first_mismatch_below(&self, rhs: &QSeries, upto: &Rat) -> Option<Rat> {
        let bound = upto.clone().min(self.order.clone()).min(rhs.order.clone());
        let (a, b, den) = Self::lift_pair(self, rhs);
        let mut keys: Vec<i64> = a.coeffs.keys().chain(b.coeffs.keys()).cloned().collect();
        keys.sort_unstable();
        keys.dedup();
        for k in keys {
            let e = Rat::new(k.into(), (den as i64).into());
            if e >= bound {
                break;
            }
            let ca = a.coeffs.get(&k).cloned().unwrap_or_else(PiPoly::zero);
            let cb = b.coeffs.get(&k).cloned().unwrap_or_else(PiPoly::zero);
            if ca != cb {
                return Some(e);
            }
        }
        None
    }

    /// Whether any coefficient carries a nonzero power of `Pi`.
    pub fn is_pi_free(&self) -> bool {
        self.coeffs.values().all(|c| c.as_rat().is_some())
    }

    /// Numeric evaluation at a point of the upper half plane.
    ///
    /// Substitutes `Pi -> 2πi` and `q -> exp(2πi z)`, returning the partial
    /// sum through the stored terms together with the crude tail bound
    /// `|q|^order / (1 - |q|)`.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, f64)> {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let q_abs = (-2.0 * std::f64::consts::PI * z.im).exp();
        if q_abs >= 0.95 {
            return Err(Error::ImaginaryPartTooSmall { q_abs });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in &self.coeffs {
            let e = *k as f64 / self.den as f64;
            let qe = (two_pi_i * z * e).exp();
            acc += v.eval() * qe;
        }
        let ord = self.order.to_f64().unwrap_or(f64::INFINITY);
        let tail = q_abs.powf(ord) / (1.0 - q_abs);
        Ok((acc, tail))
    }
}

pub fn rat_to_num_den(r: &Rat) -> (i64, u32) {
    let n = r.numer().to_i64().expect("exponent numerator overflow");
    let d = r.denom().to_u32().expect("exponent denominator overflow");
    (n, d)
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (k, v) in &self.coeffs {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                if *k == 0 {
                    write!(f, "({})", v)?;
                } else if self.den == 1 {
                    write!(f, "({})q^{}", v, k)?;
                } else {
                    write!(f, "({})q^({}/{})", v, k, self.den)?;
                }
            }
        }
        write!(f, " + O(q^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::{rat_frac, rat_int};
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(coeffs: &[i64], order: i64) -> QSeries {
        let v: Vec<(i64, Rat)> = coeffs
            .iter()
            .enumerate()
            .map(|(e, c)| (e as i64, rat_int(*c)))
            .collect();
        QSeries::from_int_coeffs(&v, order)
    }

    fn sigma(n: u64, k: u32) -> u64 {
        (1..=n)
            .filter(|d| n.is_multiple_of(*d))
            .map(|d| d.pow(k))
            .sum()
    }

    fn eisenstein4(order: i64) -> QSeries {
        let mut s = QSeries::one(rat_int(order));
        for n in 1..order {
            let c = rat_int(240 * sigma(n as u64, 3) as i64);
            s.set_coeff(n, 1, PiPoly::from_rat(c));
        }
        s
    }

    fn delta(order: i64) -> QSeries {
        // q * prod (1-q^n)^24 expanded directly
        let mut p = QSeries::one(rat_int(order));
        for n in 1..order {
            let mut f = QSeries::one(rat_int(order));
            f.set_coeff(n, 1, PiPoly::from_int(-1));
            p = p.mul(&f.pow(24));
        }
        p.mul_q_power(1, 1)
    }

    #[test]
    fn difference_of_squares() {
        let a = poly(&[1, 1], 5);
        let b = poly(&[1, -1], 5);
        assert_eq!(a.mul(&b), poly(&[1, 0, -1], 5));
    }

    #[test]
    fn additive_inverse_cancels() {
        let d = delta(12);
        let z = d.scale(&PiPoly::one()).add(&d.neg());
        assert!(z.is_zero());
    }

    #[test]
    fn e4_squared_matches_convolution_oracle() {
        let order = 12i64;
        let e4 = eisenstein4(order);
        let prod = e4.mul(&e4);
        // brute-force convolution of 1 + 240 sum sigma_3(n) q^n with itself
        let coeff = |n: i64| -> Rat {
            if n == 0 {
                rat_int(1)
            } else {
                rat_int(240 * sigma(n as u64, 3) as i64)
            }
        };
        for n in 0..order {
            let mut acc = Rat::zero();
            for a in 0..=n {
                acc += coeff(a) * coeff(n - a);
            }
            assert_eq!(
                prod.coeff_int(n).as_rat().unwrap(),
                acc,
                "mismatch at q^{}",
                n
            );
        }
        assert_eq!(prod.coeff_int(1).as_rat().unwrap(), rat_int(480));
        assert_eq!(prod.coeff_int(2).as_rat().unwrap(), rat_int(61920));
    }

    #[test]
    fn theta_rules() {
        let one = QSeries::one(rat_int(10));
        assert!(one.theta_derive().is_zero());

        let d = delta(10);
        let td = d.theta_derive();
        assert_eq!(td.coeff_int(1).as_rat().unwrap(), rat_int(1));
        assert_eq!(td.coeff_int(2).as_rat().unwrap(), rat_int(-48));
        assert_eq!(td.coeff_int(3).as_rat().unwrap(), rat_int(756));

        let m = QSeries::monomial(PiPoly::one(), 1, 24, rat_int(2));
        let tm = m.theta_derive();
        assert_eq!(tm.coeff(1, 24).as_rat().unwrap(), rat_frac(1, 24));
    }

    #[test]
    fn theta_is_a_derivation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n_terms = rng.gen_range(1..6);
            let mk = |rng: &mut ChaCha8Rng| {
                let mut s = QSeries::zero(rat_int(15));
                for _ in 0..n_terms {
                    let e = rng.gen_range(0..12);
                    let den = [1u32, 2, 3, 8, 24][rng.gen_range(0..5)];
                    let c = rat_frac(rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
                    s.set_coeff(e, den, PiPoly::from_rat(c));
                }
                s
            };
            let f = mk(&mut rng);
            let g = mk(&mut rng);
            let lhs = f.mul(&g).theta_derive();
            let rhs = f.theta_derive().mul(&g).add(&f.mul(&g.theta_derive()));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn truncated_multiplication_is_exact_on_polynomials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let deg = 6usize;
            let a: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-5..=5)).collect();
            let b: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-5..=5)).collect();
            // exact polynomial product
            let mut full = vec![0i64; 2 * deg + 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    full[i + j] += x * y;
                }
            }
            let order = 8i64;
            let ta = poly(&a.to_vec(), order);
            let tb = poly(&b, order);
            let prod = ta.mul(&tb);
            for e in 0..order {
                assert_eq!(
                    prod.coeff_int(e).as_rat().unwrap(),
                    rat_int(*full.get(e as usize).unwrap_or(&0))
                );
            }
        }
    }

    #[test]
    fn eval_constant_and_self_consistency() {
        let one = QSeries::one(rat_int(10));
        let i = Complex64::new(0.0, 1.0);
        let (v, _) = one.eval(i).unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let d40 = delta(40);
        let d60 = delta(60);
        let (v40, _) = d40.eval(i).unwrap();
        let (v60, _) = d60.eval(i).unwrap();
        assert!((v40 - v60).norm() / v60.norm() <= 1e-10);

        // reject points too close to the real axis
        let low = Complex64::new(0.0, 1e-4);
        assert!(matches!(
            one.eval(low),
            Err(Error::ImaginaryPartTooSmall { .. })
        ));
    }

    #[test]
    fn eval_e4_matches_direct_summation() {
        let e4 = eisenstein4(40);
        let z = Complex64::new(0.0, 2.0);
        let (v, _) = e4.eval(z).unwrap();
        let mut direct = 1.0f64;
        for n in 1..40u64 {
            direct += 240.0 * sigma(n, 3) as f64 * (-4.0 * std::f64::consts::PI * n as f64).exp();
        }
        assert!(v.im.abs() < 1e-12);
        assert!(v.re > 0.0);
        assert!((v.re - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn eval_is_multiplicative_within_tails() {
        let e4 = eisenstein4(30);
        let d = delta(30);
        let z = Complex64::new(0.25, 1.0);
        let (ve, te) = e4.eval(z).unwrap();
        let (vd, td) = d.eval(z).unwrap();
        let (vp, tp) = e4.mul(&d).eval(z).unwrap();
        let slack = 10.0 * (te + td + tp) + 1e-9;
        assert!((vp - ve * vd).norm() < slack);
    }

    #[test]
    fn invert_unit_roundtrip() {
        let mut f = QSeries::one(rat_int(20));
        for n in 1..20 {
            f.set_coeff(n, 1, PiPoly::from_int(if n % 3 == 0 { -2 } else { 1 }));
        }
        let inv = f.invert().unwrap();
        let prod = f.mul(&inv);
        assert!(prod.eq_below(&QSeries::one(rat_int(20)), &rat_int(20)));

        // fractional-exponent unit
        let mut g = QSeries::one(rat_int(6));
        g.set_coeff(1, 2, PiPoly::from_int(4));
        g.set_coeff(3, 1, PiPoly::from_int(-1));
        let gi = g.invert().unwrap();
        assert!(g.mul(&gi).eq_below(&QSeries::one(rat_int(6)), &rat_int(6)));

        let q = QSeries::monomial(PiPoly::one(), 1, 1, rat_int(5));
        assert!(q.invert().is_err());

        // units whose constant term carries a power of the formal constant
        let mut h = QSeries::constant(PiPoly::monomial(rat_frac(2, 3), 1), rat_int(8));
        h.set_coeff(2, 1, PiPoly::monomial(rat_int(5), -1));
        let hi = h.invert().unwrap();
        assert!(h.mul(&hi).eq_below(&QSeries::one(rat_int(8)), &rat_int(8)));

        // a constant term with mixed powers is not an invertible monomial
        let mixed = QSeries::constant(
            &PiPoly::one() + &PiPoly::monomial(Rat::one(), 1),
            rat_int(4),
        );
        assert!(mixed.invert().is_err());
    }

    #[test]
    fn den_normalization() {
        let s = QSeries::monomial(PiPoly::one(), 2, 24, rat_int(3)); // q^{1/12}
        assert_eq!(s.den(), 12);
        let t = s.mul(&s); // q^{1/6}
        assert_eq!(t.den(), 6);
        let u = t.pow(6); // q^1
        assert_eq!(u.den(), 1);
    }

    #[test]
    fn order_is_min_of_operands() {
        let a = poly(&[1, 1], 5);
        let b = poly(&[1, 1, 1], 3);
        assert_eq!(*a.mul(&b).order(), rat_int(3));
        assert_eq!(*a.add(&b).order(), rat_int(3));
    }
}
