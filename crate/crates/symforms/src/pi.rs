//! The coefficient ring: exact rationals carrying powers of the formal
//! constant `Pi` standing for 2πi.
//!
//! Every derivative d/dz of a q-expansion produces a factor 2πi.  Tracking
//! that factor formally keeps all identities between expansions exact
//! rational statements.  [`PiRational`] is a single monomial `c · Pi^p`;
//! [`PiPoly`] is a Laurent polynomial in `Pi` over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Shorthand used throughout the crate.
pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact factorial as a rational (for use in bracket and lifting constants).
pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

/// A single term `value · Pi^pi_power` with `Pi` standing for 2πi.
///
/// The zero value is normalized to `pi_power == 0` so that equality of
/// zeroes is unambiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiRational {
    value: Rat,
    pi_power: i32,
}

impl PiRational {
    pub fn new(value: Rat, pi_power: i32) -> Self {
        if value.is_zero() {
            PiRational { value, pi_power: 0 }
        } else {
            PiRational { value, pi_power }
        }
    }

    pub fn from_rat(value: Rat) -> Self {
        Self::new(value, 0)
    }

    pub fn value(&self) -> &Rat {
        &self.value
    }

    pub fn pi_power(&self) -> i32 {
        self.pi_power
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Multiplicative inverse `1/(c · Pi^p) = c^{-1} · Pi^{-p}`.
    pub fn inverse(&self) -> Option<PiRational> {
        if self.is_zero() {
            None
        } else {
            Some(PiRational::new(self.value.recip(), -self.pi_power))
        }
    }
}

/// A Laurent polynomial in the formal constant `Pi` (= 2πi) with exact
/// rational coefficients.  No zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PiPoly {
    terms: BTreeMap<i32, Rat>,
}

impl PiPoly {
    pub fn zero() -> Self {
        PiPoly::default()
    }

    pub fn one() -> Self {
        PiPoly::from_rat(Rat::one())
    }

    pub fn from_rat(value: Rat) -> Self {
        Self::monomial(value, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    /// `value · Pi^power`.
    pub fn monomial(value: Rat, power: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(power, value);
        }
        PiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rat)> {
        self.terms.iter().map(|(p, v)| (*p, v))
    }

    pub fn coeff(&self, power: i32) -> Rat {
        self.terms.get(&power).cloned().unwrap_or_else(Rat::zero)
    }

    /// The purely rational part, failing if any nonzero `Pi` power is present.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.terms.keys().any(|p| *p != 0) {
            None
        } else {
            Some(self.coeff(0))
        }
    }

    /// Returns the polynomial as a single term, if it is one.
    pub fn as_monomial(&self) -> Option<PiRational> {
        match self.terms.len() {
            0 => Some(PiRational::from_rat(Rat::zero())),
            1 => {
                let (p, v) = self.terms.iter().next().unwrap();
                Some(PiRational::new(v.clone(), *p))
            }
            _ => None,
        }
    }

    /// Inverse when the polynomial is an invertible monomial.
    pub fn invert_monomial(&self) -> Option<PiPoly> {
        let m = self.as_monomial()?;
        let inv = m.inverse()?;
        Some(PiPoly::monomial(inv.value().clone(), inv.pi_power()))
    }

    pub fn scale(&self, c: &Rat) -> PiPoly {
        if c.is_zero() {
            return PiPoly::zero();
        }
        PiPoly {
            terms: self.terms.iter().map(|(p, v)| (*p, v * c)).collect(),
        }
    }

    /// Multiply by `Pi^power`.
    pub fn mul_pi_power(&self, power: i32) -> PiPoly {
        PiPoly {
            terms: self
                .terms
                .iter()
                .map(|(p, v)| (p + power, v.clone()))
                .collect(),
        }
    }

    fn add_assign_term(&mut self, power: i32, value: &Rat) {
        if value.is_zero() {
            return;
        }
        let slot = self.terms.entry(power).or_insert_with(Rat::zero);
        *slot += value;
        if slot.is_zero() {
            self.terms.remove(&power);
        }
    }

    /// Numeric substitution `Pi -> 2πi`.
    pub fn eval(&self) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, v) in &self.terms {
            let c = v.to_f64().unwrap_or(f64::NAN);
            acc += two_pi_i.powi(*p) * c;
        }
        acc
    }
}

impl From<PiRational> for PiPoly {
    fn from(m: PiRational) -> Self {
        PiPoly::monomial(m.value().clone(), m.pi_power())
    }
}

impl Add for &PiPoly {
    type Output = PiPoly;
    fn add(self, rhs: &PiPoly) -> PiPoly {
        let mut out = self.clone();
        for (p, v) in &rhs.terms {
            out.add_assign_term(*p, v);
        }
        out
    }
}

impl Sub for &PiPoly {
    type Output = PiPoly;
    fn sub(self, rhs: &PiPoly) -> PiPoly {
        let mut out = self.clone();
        for (p, v) in &rhs.terms {
            out.add_assign_term(*p, &(-v.clone()));
        }
        out
    }
}

impl Neg for &PiPoly {
    type Output = PiPoly;
    fn neg(self) -> PiPoly {
        PiPoly {
            terms: self.terms.iter().map(|(p, v)| (*p, -v.clone())).collect(),
        }
    }
}

impl Mul for &PiPoly {
    type Output = PiPoly;
    fn mul(self, rhs: &PiPoly) -> PiPoly {
        let mut out = PiPoly::zero();
        for (p1, v1) in &self.terms {
            for (p2, v2) in &rhs.terms {
                out.add_assign_term(p1 + p2, &(v1 * v2));
            }
        }
        out
    }
}

impl fmt::Display for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, v) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match p {
                0 => write!(f, "{}", v)?,
                1 => write!(f, "{}*Pi", v)?,
                _ => write!(f, "{}*Pi^{}", v, p)?,
            }
        }
        Ok(())
    }
}
