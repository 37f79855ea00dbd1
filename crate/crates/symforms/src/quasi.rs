//! The graded ring of quasimodular forms for SL(2,Z).
//!
//! Elements are exact polynomials in the generators E2, E4, E6 (a free
//! polynomial ring at level one), graded by weight; the depth of an element
//! is its degree in E2 and the depth-0 part is the classical ring
//! C[E4, E6] of modular forms.  Two derivations matter: θ = q·d/dq, which
//! acts through the Ramanujan identities, and D = d/dz = `Pi`·θ.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::group::GroupElt;
use crate::linalg;
use crate::pi::{rat_int, PiPoly, Rat};
use crate::qseries::QSeries;

/// Named expansion generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gen {
    E2,
    E4,
    E6,
    Delta,
    Eta,
}

static EXPANSION_CACHE: Lazy<RwLock<HashMap<(Gen, i64), QSeries>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn cached(gen: Gen, order: i64, build: impl FnOnce() -> QSeries) -> QSeries {
    if let Some(hit) = EXPANSION_CACHE.read().unwrap().get(&(gen, order)) {
        return hit.clone();
    }
    let s = build();
    EXPANSION_CACHE
        .write()
        .unwrap()
        .insert((gen, order), s.clone());
    s
}

fn divisor_power_sums(order: i64, k: u32) -> Vec<Rat> {
    let n = order.max(0) as usize;
    let mut sums = vec![Rat::zero(); n];
    for d in 1..n as u64 {
        let dk = Rat::from_integer(num_bigint::BigInt::from(d).pow(k));
        let mut m = d as usize;
        while m < n {
            sums[m] += &dk;
            m += d as usize;
        }
    }
    sums
}

/// The Eisenstein series E2 = 1 - 24 Σ σ1(n) q^n, E4 = 1 + 240 Σ σ3(n) q^n,
/// E6 = 1 - 504 Σ σ5(n) q^n, exact to the given order.
pub fn eisenstein(k: i64, order: i64) -> Result<QSeries> {
    let (gen, mult, pow) = match k {
        2 => (Gen::E2, -24i64, 1u32),
        4 => (Gen::E4, 240, 3),
        6 => (Gen::E6, -504, 5),
        other => return Err(Error::UnsupportedWeight(other)),
    };
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    Ok(cached(gen, order, || {
        let sums = divisor_power_sums(order, pow);
        let mut s = QSeries::one(rat_int(order));
        for (n, sum) in sums.iter().enumerate().skip(1) {
            s.set_coeff(n as i64, 1, PiPoly::from_rat(sum * rat_int(mult)));
        }
        s
    }))
}

/// The Euler product Π_{n>=1} (1 - q^n)^e, exact below `order`.
pub fn euler_product_pow(e: u32, order: i64) -> QSeries {
    let mut p = QSeries::one(rat_int(order));
    for n in 1..order {
        let mut f = QSeries::one(rat_int(order));
        f.set_coeff(n, 1, PiPoly::from_int(-1));
        p = p.mul(&f.pow(e));
    }
    p
}

/// Δ = q Π (1 - q^n)^24, the weight-12 cusp form.
pub fn delta(order: i64) -> Result<QSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    Ok(cached(Gen::Delta, order, || {
        euler_product_pow(24, order - 1).mul_q_power(1, 1)
    }))
}

/// η = q^{1/24} Π (1 - q^n); its 24th power is Δ.
pub fn eta(order: i64) -> Result<QSeries> {
    if order < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    Ok(cached(Gen::Eta, order, || {
        euler_product_pow(1, order).mul_q_power(1, 24)
    }))
}

/// Monomial exponents (a, b, c) for E2^a E4^b E6^c.
pub type Monomial = (u32, u32, u32);

fn monomial_weight(m: &Monomial) -> i64 {
    2 * m.0 as i64 + 4 * m.1 as i64 + 6 * m.2 as i64
}

/// An element of the quasimodular ring: an exact polynomial in E2, E4, E6,
/// homogeneous of the stated weight.  Coefficients may carry powers of the
/// formal constant `Pi` (they do after applying D).
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiElement {
    weight: i64,
    terms: BTreeMap<Monomial, PiPoly>,
}

impl QuasiElement {
    pub fn zero(weight: i64) -> Self {
        QuasiElement {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: PiPoly) -> Self {
        let mut q = Self::zero(0);
        q.add_term((0, 0, 0), c);
        q
    }

    pub fn one() -> Self {
        Self::constant(PiPoly::one())
    }

    /// E2^a E4^b E6^c with coefficient `c`.
    pub fn monomial(m: Monomial, c: PiPoly) -> Self {
        let mut q = Self::zero(monomial_weight(&m));
        q.add_term(m, c);
        q
    }

    pub fn e2() -> Self {
        Self::monomial((1, 0, 0), PiPoly::one())
    }

    pub fn e4() -> Self {
        Self::monomial((0, 1, 0), PiPoly::one())
    }

    pub fn e6() -> Self {
        Self::monomial((0, 0, 1), PiPoly::one())
    }

    /// Δ as a ring element: (E4^3 - E6^2)/1728.
    pub fn delta_element() -> Self {
        let e4cubed = Self::monomial((0, 3, 0), PiPoly::from_rat(crate::pi::rat_frac(1, 1728)));
        let e6sq = Self::monomial((0, 0, 2), PiPoly::from_rat(crate::pi::rat_frac(-1, 1728)));
        e4cubed.add(&e6sq).expect("weights agree")
    }

    fn add_term(&mut self, m: Monomial, c: PiPoly) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(monomial_weight(&m), self.weight, "inhomogeneous term");
        let slot = self.terms.entry(m).or_insert_with(PiPoly::zero);
        let sum = &*slot + &c;
        if sum.is_zero() {
            self.terms.remove(&m);
        } else {
            *slot = sum;
        }
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Degree in E2.  The zero element has depth 0.
    pub fn depth(&self) -> usize {
        self.terms.keys().map(|m| m.0 as usize).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_modular(&self) -> bool {
        self.depth() == 0
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PiPoly)> {
        self.terms.iter()
    }

    pub fn add(&self, rhs: &QuasiElement) -> Result<QuasiElement> {
        if self.is_zero() {
            return Ok(rhs.clone());
        }
        if rhs.is_zero() {
            return Ok(self.clone());
        }
        if self.weight != rhs.weight {
            return Err(Error::WeightMismatch {
                expected: self.weight,
                got: rhs.weight,
            });
        }
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &QuasiElement) -> Result<QuasiElement> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> QuasiElement {
        QuasiElement {
            weight: self.weight,
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn mul(&self, rhs: &QuasiElement) -> QuasiElement {
        let mut out = QuasiElement::zero(self.weight + rhs.weight);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let m = (m1.0 + m2.0, m1.1 + m2.1, m1.2 + m2.2);
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &PiPoly) -> QuasiElement {
        if c.is_zero() {
            return QuasiElement::zero(self.weight);
        }
        QuasiElement {
            weight: self.weight,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> QuasiElement {
        self.scale(&PiPoly::from_rat(c.clone()))
    }

    /// θ = q d/dq extended as a derivation through the Ramanujan identities
    /// θE2 = (E2² - E4)/12, θE4 = (E2·E4 - E6)/3, θE6 = (E2·E6 - E4²)/2.
    pub fn theta_derive(&self) -> QuasiElement {
        let twelfth = crate::pi::rat_frac(1, 12);
        let third = crate::pi::rat_frac(1, 3);
        let half = crate::pi::rat_frac(1, 2);
        let de2 = Self::monomial((2, 0, 0), PiPoly::from_rat(twelfth.clone()))
            .add(&Self::monomial((0, 1, 0), PiPoly::from_rat(-twelfth)))
            .unwrap();
        let de4 = Self::monomial((1, 1, 0), PiPoly::from_rat(third.clone()))
            .add(&Self::monomial((0, 0, 1), PiPoly::from_rat(-third)))
            .unwrap();
        let de6 = Self::monomial((1, 0, 1), PiPoly::from_rat(half.clone()))
            .add(&Self::monomial((0, 2, 0), PiPoly::from_rat(-half)))
            .unwrap();
        let mut out = QuasiElement::zero(self.weight + 2);
        for (m, c) in &self.terms {
            let (a, b, cc) = *m;
            // product rule over the three generator slots
            if a > 0 {
                let rest = Self::monomial((a - 1, b, cc), c.scale(&rat_int(a as i64)));
                for (mm, vv) in rest.mul(&de2).terms {
                    out.add_term(mm, vv);
                }
            }
            if b > 0 {
                let rest = Self::monomial((a, b - 1, cc), c.scale(&rat_int(b as i64)));
                for (mm, vv) in rest.mul(&de4).terms {
                    out.add_term(mm, vv);
                }
            }
            if cc > 0 {
                let rest = Self::monomial((a, b, cc - 1), c.scale(&rat_int(cc as i64)));
                for (mm, vv) in rest.mul(&de6).terms {
                    out.add_term(mm, vv);
                }
            }
        }
        out
    }

    /// D^r = (`Pi`·θ)^r; raises the weight by 2r.
    pub fn z_derive(&self, r: u32) -> QuasiElement {
        let mut out = self.clone();
        for _ in 0..r {
            out = out.theta_derive().scale(&PiPoly::monomial(Rat::one(), 1));
        }
        out
    }

    /// Exact q-expansion to the given order.
    pub fn to_qexp(&self, order: i64) -> QSeries {
        let mut acc = QSeries::zero(rat_int(order));
        for (m, c) in &self.terms {
            let mut term = QSeries::one(rat_int(order));
            if m.0 > 0 {
                term = term.mul(&eisenstein(2, order).unwrap().pow(m.0));
            }
            if m.1 > 0 {
                term = term.mul(&eisenstein(4, order).unwrap().pow(m.1));
            }
            if m.2 > 0 {
                term = term.mul(&eisenstein(6, order).unwrap().pow(m.2));
            }
            acc = acc.add(&term.scale(c));
        }
        acc
    }

    /// Numeric value at a point of the upper half plane.
    pub fn eval(&self, z: Complex64, order: i64) -> Result<(Complex64, f64)> {
        self.to_qexp(order).eval(z)
    }
}

/// Monomial basis (a, b) of M_k = C[E4, E6]_k: all 4a + 6b = k, listed with
/// descending E4-exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MkBasis {
    pub weight: i64,
    pub monomials: Vec<(u32, u32)>,
}

impl MkBasis {
    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn elements(&self) -> Vec<QuasiElement> {
        self.monomials
            .iter()
            .map(|(a, b)| QuasiElement::monomial((0, *a, *b), PiPoly::one()))
            .collect()
    }
}

pub fn basis_mk(weight: i64) -> MkBasis {
    let mut monomials = Vec::new();
    if weight >= 0 && weight % 2 == 0 {
        let mut a = weight / 4;
        while a >= 0 {
            let rem = weight - 4 * a;
            if rem % 6 == 0 {
                monomials.push((a as u32, (rem / 6) as u32));
            }
            a -= 1;
        }
    }
    MkBasis { weight, monomials }
}

/// Express a `Pi`-free series as an element of M_k, if possible.
///
/// Solves exactly against the E4^a E6^b basis expansions using the leading
/// q-coefficients, then verifies every coefficient below the series' order.
pub fn solve_modular(series: &QSeries, weight: i64) -> Option<QuasiElement> {
    if series.is_zero() {
        return Some(QuasiElement::zero(weight));
    }
    if !series.is_pi_free() {
        return None;
    }
    let basis = basis_mk(weight);
    if basis.dim() == 0 {
        return None;
    }
    let order = series.order().to_integer().to_i64().unwrap_or(0);
    let need = (basis.dim() as i64 + 2).min(order);
    if need < basis.dim() as i64 {
        return None; // not enough exact coefficients to pin the solution down
    }
    let elements = basis.elements();
    let expansions: Vec<QSeries> = elements.iter().map(|e| e.to_qexp(order)).collect();
    let a: linalg::RatMatrix = (0..need)
        .map(|n| {
            expansions
                .iter()
                .map(|e| e.coeff_int(n).as_rat().unwrap())
                .collect()
        })
        .collect();
    let b: Vec<Rat> = (0..need)
        .map(|n| series.coeff_int(n).as_rat().unwrap())
        .collect();
    let x = linalg::solve(&a, &b)?;
    let mut out = QuasiElement::zero(weight);
    for (c, e) in x.iter().zip(&elements) {
        out = out.add(&e.scale_rat(c)).unwrap();
    }
    // verify the full expansion, not just the rows used for the solve
    let check = out.to_qexp(order);
    if check.eq_below(series, series.order()) {
        Some(out)
    } else {
        None
    }
}

/// Express a series (possibly with mixed `Pi`-powers) as a quasimodular
/// element of the given weight and depth bound.  Each `Pi`-slice is solved
/// independently against the E2^a E4^b E6^c monomial expansions.
pub fn solve_quasimodular(series: &QSeries, weight: i64, max_depth: usize) -> Option<QuasiElement> {
    if series.is_zero() {
        return Some(QuasiElement::zero(weight));
    }
    // enumerate monomials of this weight within the depth bound
    let mut monomials: Vec<Monomial> = Vec::new();
    if weight >= 0 && weight % 2 == 0 {
        for a in 0..=(max_depth as i64).min(weight / 2) {
            let rem = weight - 2 * a;
            for b in 0..=(rem / 4) {
                let rem2 = rem - 4 * b;
                if rem2 % 6 == 0 {
                    monomials.push((a as u32, b as u32, (rem2 / 6) as u32));
                }
            }
        }
    }
    if monomials.is_empty() {
        return None;
    }
    let order = series.order().to_integer().to_i64().unwrap_or(0);
    let need = (monomials.len() as i64 + 2).min(order);
    if need < monomials.len() as i64 {
        return None;
    }
    let expansions: Vec<QSeries> = monomials
        .iter()
        .map(|m| QuasiElement::monomial(*m, PiPoly::one()).to_qexp(order))
        .collect();
    // collect the Pi powers present in the target
    let mut powers: Vec<i32> = Vec::new();
    for (_, c) in series.terms() {
        for (p, _) in c.terms() {
            if !powers.contains(&p) {
                powers.push(p);
            }
        }
    }
    let mut out = QuasiElement::zero(weight);
    for p in powers {
        let a: linalg::RatMatrix = (0..need)
            .map(|n| {
                expansions
                    .iter()
                    .map(|e| e.coeff_int(n).as_rat().unwrap())
                    .collect()
            })
            .collect();
        let b: Vec<Rat> = (0..need).map(|n| series.coeff_int(n).coeff(p)).collect();
        let x = linalg::solve(&a, &b)?;
        for (c, m) in x.iter().zip(&monomials) {
            if !c.is_zero() {
                out.add_term(*m, PiPoly::monomial(c.clone(), p));
            }
        }
    }
    let check = out.to_qexp(order);
    if check.eq_below(series, series.order()) {
        Some(out)
    } else {
        None
    }
}

/// Residual of the weight-k transformation law |f(γz) - J^k f(z)| at one
/// sample, evaluated from the q-expansion.
pub fn scalar_transform_residual(
    series: &QSeries,
    weight: i64,
    gamma: &GroupElt,
    z: Complex64,
) -> Result<f64> {
    let gz = gamma.moebius(z)?;
    let (lhs, t1) = series.eval(gz)?;
    let j = gamma.j_cocycle(z)?;
    let (rhs, t2) = series.eval(z)?;
    let rhs = j.powi(weight as i32) * rhs;
    let scale = rhs.norm().max(1.0);
    let _ = (t1, t2);
    Ok((lhs - rhs).norm() / scale)
}

/// Residual of the anomalous E2 law
/// E2(γz) - (cz+d)² E2(z) - 12 c (cz+d)/(2πi).
pub fn e2_transform_residual(gamma: &GroupElt, z: Complex64, order: i64) -> Result<f64> {
    let e2 = eisenstein(2, order)?;
    let gz = gamma.moebius(z)?;
    let (lhs, _) = e2.eval(gz)?;
    let j = gamma.j_cocycle(z)?;
    let (val, _) = e2.eval(z)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    let c = gamma.c.to_f64().unwrap_or(f64::NAN);
    let rhs = j * j * val + Complex64::new(12.0 * c, 0.0) * j / two_pi_i;
    Ok((lhs - rhs).norm() / rhs.norm().max(1.0))
}
