//! Integer matrices in SL(2,Z) and the two cocycles attached to the action
//! on the upper half plane: J(γ,z) = cz+d and K(γ,z) = c/(cz+d).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element of SL(2,Z); the determinant ad - bc = 1 is enforced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupElt {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl GroupElt {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if det != BigInt::one() {
            return Err(Error::InvalidArgument(format!(
                "determinant must be 1, got {}",
                det
            )));
        }
        Ok(GroupElt { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1).unwrap()
    }

    /// T = (1 1; 0 1), translation z -> z+1.
    pub fn t() -> Self {
        Self::from_ints(1, 1, 0, 1).unwrap()
    }

    /// S = (0 -1; 1 0), inversion z -> -1/z.
    pub fn s() -> Self {
        Self::from_ints(0, -1, 1, 0).unwrap()
    }

    /// Parse "a,b,c,d".
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidArgument(format!(
                "expected four comma-separated integers, got {s:?}"
            )));
        }
        let mut vals = Vec::with_capacity(4);
        for p in parts {
            vals.push(
                p.parse::<i64>()
                    .map_err(|_| Error::InvalidArgument(format!("not an integer: {p:?}")))?,
            );
        }
        Self::from_ints(vals[0], vals[1], vals[2], vals[3])
    }

    pub fn mul(&self, rhs: &GroupElt) -> GroupElt {
        GroupElt {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    pub fn inverse(&self) -> GroupElt {
        GroupElt {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    /// The transpose-inverse, i.e. the image of γ under the outer
    /// automorphism γ -> tγ^{-1} = (d -c; -b a).
    pub fn transpose_inverse(&self) -> GroupElt {
        GroupElt {
            a: self.d.clone(),
            b: -self.c.clone(),
            c: -self.b.clone(),
            d: self.a.clone(),
        }
    }

    fn c64(x: &BigInt) -> f64 {
        x.to_f64().unwrap_or(f64::NAN)
    }

    /// Linear fractional action γz = (az+b)/(cz+d).
    pub fn moebius(&self, z: Complex64) -> Result<Complex64> {
        let den = self.j_cocycle(z)?;
        let num = Complex64::new(Self::c64(&self.a), 0.0) * z + Self::c64(&self.b);
        Ok(num / den)
    }

    /// J(γ,z) = cz + d.
    pub fn j_cocycle(&self, z: Complex64) -> Result<Complex64> {
        let v = Complex64::new(Self::c64(&self.c), 0.0) * z + Self::c64(&self.d);
        if v.norm() < 1e-300 {
            return Err(Error::DegeneratePoint);
        }
        Ok(v)
    }

    /// K(γ,z) = c/(cz + d).
    pub fn k_cocycle(&self, z: Complex64) -> Result<Complex64> {
        let j = self.j_cocycle(z)?;
        Ok(Complex64::new(Self::c64(&self.c), 0.0) / j)
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }
}

impl std::fmt::Display for GroupElt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// The default sample matrices for numeric verification: T, S, ST.
pub fn sample_gammas() -> Vec<GroupElt> {
    vec![
        GroupElt::t(),
        GroupElt::s(),
        GroupElt::s().mul(&GroupElt::t()),
    ]
}

/// The default sample points: i, 1/4 + i, 2i.
pub fn sample_points() -> Vec<Complex64> {
    vec![
        Complex64::new(0.0, 1.0),
        Complex64::new(0.25, 1.0),
        Complex64::new(0.0, 2.0),
    ]
}
