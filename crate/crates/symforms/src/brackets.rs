//! Rankin-Cohen brackets for scalar and vector-valued forms.
//!
//! All binomial coefficients go through the falling-factorial definition
//! C(k, r) = k(k-1)...(k-r+1)/r!, valid for negative k, so the brackets
//! extend to negative weights with no special cases.  Derivatives are
//! D = d/dz: on q-expansions `Pi`·θ, on Z-monomials the plain power rule.

use crate::error::{Error, Result};
use crate::pi::{factorial, Rat};
use crate::qseries::QSeries;
use crate::symtensor::VVForm;
use crate::zpoly::ZPoly;
use num_traits::{One, Zero};

/// Generalized binomial coefficient k(k-1)...(k-r+1)/r! for integer k.
pub fn gen_binom(k: i64, r: u32) -> Rat {
    let mut num = Rat::one();
    for i in 0..r as i64 {
        num *= Rat::from_integer((k - i).into());
    }
    num / factorial(r as u64)
}

/// α^λ_{w,r} = (-1)^r C(λ+w-1, w-r) C(w-n-1, r): the coefficient of
/// f^{(r)} v̂_n^{(w-r)} in the bracket [f, v̂_n]^{(λ,-n)}_w.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaCoeff {
    pub lam: i64,
    pub w: u32,
    pub r: u32,
    pub n: usize,
    pub value: Rat,
}

pub fn alpha_coeff(lam: i64, w: u32, r: u32, n: usize) -> AlphaCoeff {
    let sign = if r.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    };
    let value = sign * gen_binom(lam + w as i64 - 1, w - r) * gen_binom(w as i64 - n as i64 - 1, r);
    AlphaCoeff {
        lam,
        w,
        r,
        n,
        value,
    }
}

/// Bracket order and operand weights; output weight is lam1 + lam2 + 2w.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BracketSpec {
    pub w: u32,
    pub lam1: i64,
    pub lam2: i64,
}

impl BracketSpec {
    pub fn output_weight(&self) -> i64 {
        self.lam1 + self.lam2 + 2 * self.w as i64
    }
}

fn bracket_coeff(spec: &BracketSpec, r: u32) -> Rat {
    let sign = if r.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    };
    sign * gen_binom(spec.lam1 + spec.w as i64 - 1, spec.w - r)
        * gen_binom(spec.lam2 + spec.w as i64 - 1, r)
}

/// Tensor bracket of two vector-valued forms: the output lives in the
/// Kronecker product space with index order (i, j) -> i·rank2 + j.
pub fn rc_tensor(phi1: &VVForm, phi2: &VVForm, spec: &BracketSpec) -> Result<VVForm> {
    let r1 = phi1.rank();
    let r2 = phi2.rank();
    if phi1.weight != spec.lam1 {
        return Err(Error::WeightMismatch {
            expected: spec.lam1,
            got: phi1.weight,
        });
    }
    if phi2.weight != spec.lam2 {
        return Err(Error::WeightMismatch {
            expected: spec.lam2,
            got: phi2.weight,
        });
    }
    let order = phi1.order().min(phi2.order());
    let mut components = vec![ZPoly::zero(order); r1 * r2];
    // precompute derivatives up to w
    let d1 = derivative_tower(phi1, spec.w);
    let d2 = derivative_tower(phi2, spec.w);
    for r in 0..=spec.w {
        let c = bracket_coeff(spec, r);
        if c.is_zero() {
            continue;
        }
        let a = &d1[r as usize];
        let b = &d2[(spec.w - r) as usize];
        for i in 0..r1 {
            for j in 0..r2 {
                let term = a.components[i].mul(&b.components[j]).scale_rat(&c);
                components[i * r2 + j] = components[i * r2 + j].add(&term);
            }
        }
    }
    Ok(VVForm::new(spec.output_weight(), components))
}

fn derivative_tower(phi: &VVForm, w: u32) -> Vec<VVForm> {
    let mut tower = Vec::with_capacity(w as usize + 1);
    tower.push(phi.clone());
    for r in 1..=w {
        tower.push(tower[r as usize - 1].z_derive());
    }
    tower
}

fn series_derivative_tower(f: &QSeries, w: u32) -> Vec<QSeries> {
    let mut tower = Vec::with_capacity(w as usize + 1);
    tower.push(f.clone());
    for r in 1..=w {
        tower.push(tower[r as usize - 1].z_derive(1));
    }
    tower
}

/// Bracket of a scalar form against a vector-valued form:
/// Σ_r (-1)^r C(λ+w-1, w-r) C(μ+w-1, r) f^{(r)} φ^{(w-r)}.
pub fn rc_scalar_vector(f: &QSeries, phi: &VVForm, w: u32, lam: i64, mu: i64) -> Result<VVForm> {
    if phi.weight != mu {
        return Err(Error::WeightMismatch {
            expected: mu,
            got: phi.weight,
        });
    }
    let spec = BracketSpec {
        w,
        lam1: lam,
        lam2: mu,
    };
    let order = f.order().clone().min(phi.order());
    let mut components = vec![ZPoly::zero(order); phi.rank()];
    let df = series_derivative_tower(f, w);
    let dphi = derivative_tower(phi, w);
    for r in 0..=w {
        let c = bracket_coeff(&spec, r);
        if c.is_zero() {
            continue;
        }
        let fr = df[r as usize].scale_rat(&c);
        let pw = &dphi[(w - r) as usize];
        for (i, comp) in components.iter_mut().enumerate() {
            *comp = comp.add(&pw.components[i].mul_series(&fr));
        }
    }
    Ok(VVForm::new(spec.output_weight(), components))
}

/// Pairing bracket Σ_r (-1)^r C(α+w-1, w-r) C(β+w-1, r) t(φ^{(r)}) ψ^{(w-r)}.
///
/// The contraction is the plain transpose dot product; the result must be
/// free of the formal variable Z or the inputs were not a dual pair, which
/// is reported rather than projected away.
pub fn rc_pair(phi: &VVForm, psi: &VVForm, w: u32, alpha: i64, beta: i64) -> Result<QSeries> {
    if phi.rank() != psi.rank() {
        return Err(Error::RankMismatch {
            expected: phi.rank(),
            got: psi.rank(),
        });
    }
    let spec = BracketSpec {
        w,
        lam1: alpha,
        lam2: beta,
    };
    let order = phi.order().min(psi.order());
    let mut acc = ZPoly::zero(order);
    let dphi = derivative_tower(phi, w);
    let dpsi = derivative_tower(psi, w);
    for r in 0..=w {
        let c = bracket_coeff(&spec, r);
        if c.is_zero() {
            continue;
        }
        let a = &dphi[r as usize];
        let b = &dpsi[(w - r) as usize];
        for i in 0..phi.rank() {
            acc = acc.add(&a.components[i].mul(&b.components[i]).scale_rat(&c));
        }
    }
    acc.as_series().cloned().ok_or(Error::ResidualZDependence)
}
