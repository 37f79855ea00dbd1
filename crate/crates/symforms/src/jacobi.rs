//! Weak Jacobi forms for SL(2,Z): two-variable Fourier expansions, the
//! index-one generators built from theta and eta products, the Jacobi
//! Eisenstein series of weights 4 and 6, and the correspondence with
//! vector-valued modular forms.
//!
//! A [`JacSeries`] stores, for each q-exponent (rational, denominator
//! dividing 24), a Laurent polynomial in ζ with exact rational coefficients.
//! Weight and index are bookkeeping tags that add under multiplication.
//!
//! Theta conventions used here (only squares of the half-integer kinds ever
//! escape, so ζ-powers stay integral):
//!
//! - kind 1: θ₁² = -q^{1/4} Σ_{m,n} (-1)^{m+n} q^{(m²+m+n²+n)/2} ζ^{m+n+1}
//! - kind 2: θ₂² =  q^{1/4} Σ_{m,n} q^{(m²+m+n²+n)/2} ζ^{m+n+1}
//! - kind 3: θ₃  =  Σ_n q^{n²/2} ζ^n
//! - kind 4: θ₄  =  Σ_n (-1)^n q^{n²/2} ζ^n

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::group::GroupElt;
use crate::pi::{rat_int, Rat};
use crate::qseries::QSeries;
use crate::quasi::{self, QuasiElement};
use crate::symtensor::VVForm;

/// One row: ζ-power -> coefficient.
pub type ZetaRow = BTreeMap<i64, Rat>;

/// Two-variable expansion Σ_e q^e Σ_r c(e,r) ζ^r with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct JacSeries {
    pub weight: i64,
    pub index: i64,
    den: u32,
    rows: BTreeMap<i64, ZetaRow>,
    order: Rat,
}

impl JacSeries {
    pub fn zero(weight: i64, index: i64, order: Rat) -> Self {
        JacSeries {
            weight,
            index,
            den: 1,
            rows: BTreeMap::new(),
            order,
        }
    }

    pub fn one(order: Rat) -> Self {
        let mut s = Self::zero(0, 0, order);
        s.set_coeff(0, 1, 0, Rat::one());
        s
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn order(&self) -> &Rat {
        &self.order
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> impl Iterator<Item = (Rat, &ZetaRow)> {
        let den = self.den as i64;
        self.rows
            .iter()
            .map(move |(k, row)| (Rat::new((*k).into(), den.into()), row))
    }

    /// The ζ-row at q-exponent `num/den`, empty if absent.
    pub fn row(&self, num: i64, den: u32) -> ZetaRow {
        let scaled = num as i128 * self.den as i128;
        if scaled % den as i128 != 0 {
            return ZetaRow::new();
        }
        self.rows
            .get(&((scaled / den as i128) as i64))
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeff(&self, num: i64, den: u32, zeta: i64) -> Rat {
        self.row(num, den).remove(&zeta).unwrap_or_else(Rat::zero)
    }

    pub fn set_coeff(&mut self, num: i64, den: u32, zeta: i64, c: Rat) {
        assert!(den > 0 && 24 % den == 0, "denominator must divide 24");
        assert!(num >= 0, "negative q-exponents are out of scope");
        let l = self.den / num_integer::gcd(self.den, den) * den;
        if l != self.den {
            let f = (l / self.den) as i64;
            self.rows = self.rows.iter().map(|(k, v)| (k * f, v.clone())).collect();
            self.den = l;
        }
        let key = num * (self.den / den) as i64;
        if Rat::new(key.into(), (self.den as i64).into()) >= self.order {
            return;
        }
        let row = self.rows.entry(key).or_default();
        if c.is_zero() {
            row.remove(&zeta);
        } else {
            row.insert(zeta, c);
        }
        if row.is_empty() {
            self.rows.remove(&key);
        }
    }

    fn add_coeff(&mut self, key: i64, zeta: i64, c: &Rat) {
        if c.is_zero() {
            return;
        }
        let row = self.rows.entry(key).or_default();
        let slot = row.entry(zeta).or_insert_with(Rat::zero);
        *slot += c;
        if slot.is_zero() {
            row.remove(&zeta);
            if row.is_empty() {
                self.rows.remove(&key);
            }
        }
    }

    fn normalize(&mut self) {
        let order = self.order.clone();
        let den = self.den;
        self.rows
            .retain(|k, row| !row.is_empty() && Rat::new((*k).into(), (den as i64).into()) < order);
        if self.rows.is_empty() {
            self.den = 1;
            return;
        }
        let mut g = self.den as i64;
        for k in self.rows.keys() {
            g = num_integer::gcd(g, *k);
            if g == 1 {
                return;
            }
        }
        let g = num_integer::gcd(self.den, g.unsigned_abs() as u32);
        if g > 1 {
            self.den /= g;
            self.rows = self
                .rows
                .iter()
                .map(|(k, v)| (k / g as i64, v.clone()))
                .collect();
        }
    }

    fn lift_pair(a: &JacSeries, b: &JacSeries) -> (JacSeries, JacSeries, u32) {
        let l = a.den / num_integer::gcd(a.den, b.den) * b.den;
        let lift = |s: &JacSeries| -> JacSeries {
            let f = (l / s.den) as i64;
            JacSeries {
                weight: s.weight,
                index: s.index,
                den: l,
                rows: s.rows.iter().map(|(k, v)| (k * f, v.clone())).collect(),
                order: s.order.clone(),
            }
        };
        (lift(a), lift(b), l)
    }

    /// Addition requires equal weight and index (zero operands excepted).
    pub fn add(&self, rhs: &JacSeries) -> Result<JacSeries> {
        if self.is_zero() {
            let mut out = rhs.clone();
            out.order = self.order.clone().min(rhs.order.clone());
            out.normalize();
            return Ok(out);
        }
        if rhs.is_zero() {
            let mut out = self.clone();
            out.order = self.order.clone().min(rhs.order.clone());
            out.normalize();
            return Ok(out);
        }
        if self.weight != rhs.weight {
            return Err(Error::WeightMismatch {
                expected: self.weight,
                got: rhs.weight,
            });
        }
        if self.index != rhs.index {
            return Err(Error::InvalidArgument(format!(
                "index mismatch: {} vs {}",
                self.index, rhs.index
            )));
        }
        let (a, b, den) = Self::lift_pair(self, rhs);
        let mut out = JacSeries {
            weight: self.weight,
            index: self.index,
            den,
            rows: a.rows,
            order: a.order.min(b.order),
        };
        for (k, row) in &b.rows {
            for (z, c) in row {
                out.add_coeff(*k, *z, c);
            }
        }
        out.normalize();
        Ok(out)
    }

    pub fn neg(&self) -> JacSeries {
        JacSeries {
            weight: self.weight,
            index: self.index,
            den: self.den,
            rows: self
                .rows
                .iter()
                .map(|(k, row)| (*k, row.iter().map(|(z, c)| (*z, -c.clone())).collect()))
                .collect(),
            order: self.order.clone(),
        }
    }

    pub fn sub(&self, rhs: &JacSeries) -> Result<JacSeries> {
        self.add(&rhs.neg())
    }

    /// Multiplication adds weights and indices.
    pub fn mul(&self, rhs: &JacSeries) -> JacSeries {
        let (a, b, den) = Self::lift_pair(self, rhs);
        let order = a.order.clone().min(b.order.clone());
        let bound = &order * Rat::from_integer((den as i64).into());
        let mut out = JacSeries {
            weight: self.weight + rhs.weight,
            index: self.index + rhs.index,
            den,
            rows: BTreeMap::new(),
            order,
        };
        for (k1, row1) in &a.rows {
            for (k2, row2) in &b.rows {
                let k = k1 + k2;
                if Rat::from_integer(k.into()) >= bound {
                    continue;
                }
                for (z1, c1) in row1 {
                    for (z2, c2) in row2 {
                        out.add_coeff(k, z1 + z2, &(c1 * c2));
                    }
                }
            }
        }
        out.normalize();
        out
    }

    pub fn pow(&self, e: u32) -> JacSeries {
        let mut result = JacSeries::one(self.order.clone());
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

    pub fn scale_rat(&self, c: &Rat) -> JacSeries {
        if c.is_zero() {
            return JacSeries::zero(self.weight, self.index, self.order.clone());
        }
        JacSeries {
            weight: self.weight,
            index: self.index,
            den: self.den,
            rows: self
                .rows
                .iter()
                .map(|(k, row)| (*k, row.iter().map(|(z, v)| (*z, v * c)).collect()))
                .collect(),
            order: self.order.clone(),
        }
    }

    /// Lift a `Pi`-free q-expansion to an index-0 series concentrated on ζ^0.
    pub fn from_qseries(s: &QSeries, weight: i64) -> Result<JacSeries> {
        let mut out = JacSeries::zero(weight, 0, s.order().clone());
        for (k, c) in s.terms() {
            let v = c.as_rat().ok_or(Error::NonRationalCoefficient)?;
            out.set_coeff(k, s.den(), 0, v);
        }
        Ok(out)
    }

    /// Multiply by a `Pi`-free q-expansion of the given weight.
    pub fn mul_qseries(&self, s: &QSeries, weight: i64) -> Result<JacSeries> {
        Ok(self.mul(&JacSeries::from_qseries(s, weight)?))
    }

    /// Divide by a unit q-expansion (exact series inversion).
    pub fn div_qseries(&self, s: &QSeries, weight: i64) -> Result<JacSeries> {
        let inv = s.invert()?;
        self.mul_qseries(&inv, -weight)
    }

    /// Collapse ζ -> 1, giving the plain q-expansion of the specialization.
    pub fn specialize_zeta_one(&self) -> QSeries {
        let mut out = QSeries::zero(self.order.clone());
        for (k, row) in &self.rows {
            let total: Rat = row.values().cloned().sum();
            out.set_coeff(*k, self.den, crate::pi::PiPoly::from_rat(total));
        }
        out
    }

    /// Mirror symmetry check: row(ζ) = row(ζ^{-1}) for every stored row.
    pub fn is_zeta_symmetric(&self) -> bool {
        self.rows
            .values()
            .all(|row| row.iter().all(|(z, c)| row.get(&-z) == Some(c)))
    }

    /// Rows whose ζ-support exceeds |r| <= index·(s+1); a nonempty result
    /// flags a series that cannot be a weak Jacobi form of this index.
    pub fn support_violations(&self) -> Vec<(Rat, i64)> {
        let mut out = Vec::new();
        for (k, row) in &self.rows {
            let e = Rat::new((*k).into(), (self.den as i64).into());
            let s_floor = e.floor().to_integer().to_i64().unwrap_or(0);
            let bound = self.index * (s_floor + 1);
            for z in row.keys() {
                if z.abs() > bound {
                    out.push((e.clone(), *z));
                }
            }
        }
        out
    }

    /// Numeric evaluation at (z, w) in H x C: q = e^{2πiz}, ζ = e^{2πiw}.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<(Complex64, f64)> {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let q_abs = (-2.0 * std::f64::consts::PI * z.im).exp();
        if q_abs >= 0.95 {
            return Err(Error::ImaginaryPartTooSmall { q_abs });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, row) in &self.rows {
            let e = *k as f64 / self.den as f64;
            for (r, c) in row {
                let phase = (two_pi_i * (z * e + w * (*r as f64))).exp();
                acc += phase * c.to_f64().unwrap_or(f64::NAN);
            }
        }
        let ord = self.order.to_f64().unwrap_or(f64::INFINITY);
        let tail = q_abs.powf(ord) / (1.0 - q_abs);
        Ok((acc, tail))
    }
}

/// Dedekind eta: q^{1/24} Π (1 - q^n).  (Re-exported from the expansion
/// generators; the 24th power is Δ.)
pub fn eta(order: i64) -> Result<QSeries> {
    quasi::eta(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum JacGen {
    PhiMinus2,
    Phi0,
    E41,
    E61,
}

static JAC_CACHE: Lazy<RwLock<HashMap<(JacGen, i64), JacSeries>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

fn jac_cached(
    gen: JacGen,
    order: i64,
    build: impl FnOnce() -> Result<JacSeries>,
) -> Result<JacSeries> {
    if let Some(hit) = JAC_CACHE.read().unwrap().get(&(gen, order)) {
        return Ok(hit.clone());
    }
    let s = build()?;
    JAC_CACHE.write().unwrap().insert((gen, order), s.clone());
    Ok(s)
}

/// Range of lattice points needed so that quadratic exponents fill all rows
/// strictly below `order`.
fn lattice_bound(order: i64) -> i64 {
    ((2.0 * order as f64).sqrt() as i64) + 2
}

/// θ-type double sums Σ_{m,n} (±1)^{m+n} q^{(m²+m+n²+n)/2} ζ^{m+n+1},
/// i.e. the kind-1/2 squares with the common q^{1/4} factor stripped.
fn theta_half_square_stripped(order: i64, alternating: bool) -> JacSeries {
    let mut s = JacSeries::zero(1, 1, rat_int(order));
    let bound = lattice_bound(order) + 1;
    for m in -bound..=bound {
        for n in -bound..=bound {
            let e2 = m * (m + 1) + n * (n + 1); // twice the exponent
            debug_assert!(e2 % 2 == 0);
            let e = e2 / 2;
            if e < 0 || e >= order {
                continue;
            }
            let mut c = Rat::one();
            if alternating && (m + n).rem_euclid(2) == 1 {
                c = -c;
            }
            let prev = s.coeff(e, 1, m + n + 1);
            s.set_coeff(e, 1, m + n + 1, prev + c);
        }
    }
    s
}

/// Two-variable theta series; kinds 1 and 2 are returned as their squares
/// (the only form in which they are used, keeping ζ-powers integral).
/// `zeta_cap`, when given, drops stored ζ-powers beyond the cap; exact work
/// always passes `None`.
pub fn theta_series(kind: u8, order_q: i64, zeta_cap: Option<i64>) -> Result<JacSeries> {
    if order_q < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    let mut s = match kind {
        1 | 2 => {
            let stripped = theta_half_square_stripped(order_q, kind == 1);
            let shifted = shift_q(&stripped, 1, 4);
            if kind == 1 {
                shifted.neg()
            } else {
                shifted
            }
        }
        3 | 4 => {
            let mut s = JacSeries::zero(0, 0, rat_int(order_q));
            let bound = lattice_bound(order_q) + 1;
            for n in -bound..=bound {
                // exponent n²/2 with denominator 2
                if n * n >= 2 * order_q {
                    continue;
                }
                let mut c = Rat::one();
                if kind == 4 && n.rem_euclid(2) == 1 {
                    c = -c;
                }
                let prev = s.coeff(n * n, 2, n);
                s.set_coeff(n * n, 2, n, prev + c);
            }
            s
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "theta kind must be 1..=4, got {other}"
            )))
        }
    };
    if let Some(cap) = zeta_cap {
        let mut clipped = JacSeries::zero(s.weight, s.index, s.order.clone());
        for (k, row) in &s.rows {
            for (z, c) in row {
                if z.abs() <= cap {
                    clipped.set_coeff(*k, s.den, *z, c.clone());
                }
            }
        }
        s = clipped;
    }
    Ok(s)
}

/// Multiply by q^{num/den}.
fn shift_q(s: &JacSeries, num: i64, den: u32) -> JacSeries {
    let shift = Rat::new(num.into(), (den as i64).into());
    let mut out = JacSeries::zero(s.weight, s.index, s.order.clone() + &shift);
    for (e, row) in s.rows() {
        let e2 = e + &shift;
        let n = e2.numer().to_i64().unwrap();
        let d = e2.denom().to_u32().unwrap();
        for (z, c) in row {
            out.set_coeff(n, d, *z, c.clone());
        }
    }
    out
}

/// The weak Jacobi form generators of index one:
/// `which = -2` gives the weight -2 generator with q^0 row ζ - 2 + ζ^{-1},
/// `which = 0` the weight 0 generator with q^0 row ζ + 10 + ζ^{-1}.
pub fn phi_tilde(which: i64, order_q: i64) -> Result<JacSeries> {
    if order_q < 1 {
        return Err(Error::InvalidArgument("order must be >= 1".into()));
    }
    match which {
        -2 => jac_cached(JacGen::PhiMinus2, order_q, || {
            // (ζ - 2 + ζ^{-1}) Π (1-q^nζ)² (1-q^nζ^{-1})² (1-q^n)^{-4}
            let order = rat_int(order_q);
            let mut head = JacSeries::zero(-2, 1, order.clone());
            head.set_coeff(0, 1, 1, Rat::one());
            head.set_coeff(0, 1, 0, -rat_int(2));
            head.set_coeff(0, 1, -1, Rat::one());
            let mut prod = head;
            for n in 1..order_q {
                for zpow in [1i64, -1] {
                    let mut f = JacSeries::one(order.clone());
                    f.set_coeff(n, 1, zpow, -Rat::one());
                    prod = prod.mul(&f.mul(&f));
                }
            }
            let euler4 = quasi::euler_product_pow(4, order_q);
            prod.div_qseries(&euler4, 0)
        }),
        0 => jac_cached(JacGen::Phi0, order_q, || {
            // 4 Σ_{i=2,3,4} (θ_i(q,ζ)/θ_i(q,1))²
            let order = order_q;
            // kind 2: both factors carry q^{1/4}; work with it stripped
            let s2w = theta_half_square_stripped(order, false);
            let s20 = s2w.specialize_zeta_one();
            let r2 = s2w.div_qseries(&s20, 0)?;
            let t3 = theta_series(3, order, None)?;
            let t3w = t3.mul(&t3);
            let t30 = t3w.specialize_zeta_one();
            let r3 = t3w.div_qseries(&t30, 0)?;
            let t4 = theta_series(4, order, None)?;
            let t4w = t4.mul(&t4);
            let t40 = t4w.specialize_zeta_one();
            let r4 = t4w.div_qseries(&t40, 0)?;
            let mut sum = normalize_tags(&r2, 0, 1).add(&normalize_tags(&r3, 0, 1))?;
            sum = sum.add(&normalize_tags(&r4, 0, 1))?;
            Ok(sum.scale_rat(&rat_int(4)))
        }),
        other => Err(Error::InvalidArgument(format!(
            "generator weight must be -2 or 0, got {other}"
        ))),
    }
}

fn normalize_tags(s: &JacSeries, weight: i64, index: i64) -> JacSeries {
    let mut out = s.clone();
    out.weight = weight;
    out.index = index;
    out
}

/// Jacobi Eisenstein series of weight 4 or 6, index 1, built by inverting
/// the classical weight-10/12 cusp-form system (determinant E4³ - E6² =
/// 1728Δ): E_{4,1} = (E4·φ̃_{0,1} - E6·φ̃_{-2,1})/12 and
/// E_{6,1} = (E6·φ̃_{0,1} - E4²·φ̃_{-2,1})/12.
pub fn jacobi_eisenstein(k: i64, order_q: i64) -> Result<JacSeries> {
    let twelfth = Rat::new(1.into(), 12.into());
    match k {
        4 => jac_cached(JacGen::E41, order_q, || {
            let e4 = quasi::eisenstein(4, order_q)?;
            let e6 = quasi::eisenstein(6, order_q)?;
            let a = phi_tilde(0, order_q)?.mul_qseries(&e4, 4)?;
            let b = phi_tilde(-2, order_q)?.mul_qseries(&e6, 6)?;
            Ok(a.sub(&b)?.scale_rat(&twelfth))
        }),
        6 => jac_cached(JacGen::E61, order_q, || {
            let e4 = quasi::eisenstein(4, order_q)?;
            let e6 = quasi::eisenstein(6, order_q)?;
            let a = phi_tilde(0, order_q)?.mul_qseries(&e6, 6)?;
            let b = phi_tilde(-2, order_q)?.mul_qseries(&e4.pow(2), 8)?;
            Ok(a.sub(&b)?.scale_rat(&twelfth))
        }),
        other => Err(Error::UnsupportedWeight(other)),
    }
}

/// P: (f_0, ..., f_n) with f_ℓ of weight k-n+2ℓ to the weight k-n, index n
/// weak Jacobi form Σ f_ℓ φ̃_{-2,1}^ℓ φ̃_{0,1}^{n-ℓ}.
pub fn p_map(fs: &[QuasiElement], n: usize, k: i64, order_q: i64) -> Result<JacSeries> {
    if fs.len() != n + 1 {
        return Err(Error::RankMismatch {
            expected: n + 1,
            got: fs.len(),
        });
    }
    let mut acc = JacSeries::zero(k - n as i64, n as i64, rat_int(order_q));
    for (ell, f) in fs.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let lam = k - n as i64 + 2 * ell as i64;
        if !f.is_modular() {
            return Err(Error::DepthExceeded {
                depth: f.depth(),
                bound: 0,
            });
        }
        if f.weight() != lam {
            return Err(Error::WeightMismatch {
                expected: lam,
                got: f.weight(),
            });
        }
        let mut term = JacSeries::from_qseries(&f.to_qexp(order_q), lam)?;
        if ell > 0 {
            term = term.mul(&phi_tilde(-2, order_q)?.pow(ell as u32));
        }
        if n - ell > 0 {
            term = term.mul(&phi_tilde(0, order_q)?.pow((n - ell) as u32));
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Ψ: a weight-k vector-valued form to a weight k-n, index n weak Jacobi
/// form, by decomposing into modular constituents and applying `p_map`.
pub fn psi_map(f: &VVForm, n: usize, k: i64, order_q: i64) -> Result<JacSeries> {
    let parts = crate::maps::decompose(f, k, n)?;
    p_map(&parts, n, k, order_q)
}

/// Residual report for the two weak-Jacobi transformation laws.
#[derive(Debug, Clone)]
pub struct JacobiTransformReport {
    /// |φ(γz, J^{-1}w) - J^k e^{2πi·ℓ·K·w²} φ(z,w)| (relative)
    pub modular_residual: f64,
    /// |φ(z, w+μz+ν) - (-1)^{2ℓ(μ+ν)} e^{-2πiℓ(μ²z+2μw)} φ(z,w)| (relative)
    pub elliptic_residuals: Vec<f64>,
    pub tol: f64,
}

impl JacobiTransformReport {
    pub fn max_residual(&self) -> f64 {
        self.elliptic_residuals
            .iter()
            .cloned()
            .fold(self.modular_residual, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// Check both laws numerically at one (γ, z, w) sample; the elliptic law is
/// exercised at (μ,ν) in {(1,0), (0,1)}.
pub fn verify_jacobi_transform(
    phi: &JacSeries,
    gamma: &GroupElt,
    z: Complex64,
    w: Complex64,
    tol: f64,
) -> Result<JacobiTransformReport> {
    let ell = phi.index;
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);

    let gz = gamma.moebius(z)?;
    let j = gamma.j_cocycle(z)?;
    let kk = gamma.k_cocycle(z)?;
    let (lhs, _) = phi.eval(gz, w / j)?;
    let (base, _) = phi.eval(z, w)?;
    let factor = j.powi(phi.weight as i32) * (two_pi_i * (ell as f64) * kk * w * w).exp();
    let rhs = factor * base;
    let modular_residual = (lhs - rhs).norm() / rhs.norm().max(lhs.norm()).max(1.0);

    let mut elliptic_residuals = Vec::new();
    for (mu, nu) in [(1i64, 0i64), (0, 1)] {
        let shifted = w + z * (mu as f64) + Complex64::new(nu as f64, 0.0);
        let (lhs_e, _) = phi.eval(z, shifted)?;
        let sign = if (2 * ell * (mu + nu)).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let expo =
            (-two_pi_i * (ell as f64) * (z * ((mu * mu) as f64) + w * (2.0 * mu as f64))).exp();
        let rhs_e = sign * expo * base;
        elliptic_residuals.push((lhs_e - rhs_e).norm() / rhs_e.norm().max(lhs_e.norm()).max(1.0));
    }

    Ok(JacobiTransformReport {
        modular_residual,
        elliptic_residuals,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::v_map;
    use crate::pi::rat_frac;
    use crate::quasi::{basis_mk, delta, eisenstein};

    fn row_of(pairs: &[(i64, i64)]) -> ZetaRow {
        pairs.iter().map(|(z, c)| (*z, rat_int(*c))).collect()
    }

    #[test]
    fn theta_rows() {
        let t3 = theta_series(3, 5, None).unwrap();
        assert_eq!(t3.row(0, 1), row_of(&[(0, 1)]));
        assert_eq!(t3.row(1, 2), row_of(&[(1, 1), (-1, 1)]));
        assert_eq!(t3.row(2, 1), row_of(&[(2, 1), (-2, 1)]));

        // kind 4 alternates signs with n
        let t4 = theta_series(4, 5, None).unwrap();
        assert_eq!(t4.row(0, 1), row_of(&[(0, 1)]));
        assert_eq!(t4.row(1, 2), row_of(&[(1, -1), (-1, -1)]));
        assert_eq!(t4.row(2, 1), row_of(&[(2, 1), (-2, 1)]));

        // kind 1 squared: leading row at q^{1/4} is -(ζ - 2 + ζ^{-1})
        let t1sq = theta_series(1, 3, None).unwrap();
        assert_eq!(t1sq.row(1, 4), row_of(&[(1, -1), (0, 2), (-1, -1)]));

        // kind 2 squared: leading row at q^{1/4} is ζ + 2 + ζ^{-1}
        let t2sq = theta_series(2, 3, None).unwrap();
        assert_eq!(t2sq.row(1, 4), row_of(&[(1, 1), (0, 2), (-1, 1)]));

        // zeta cap clips stored powers
        let clipped = theta_series(3, 9, Some(1)).unwrap();
        assert!(clipped.row(4, 1).is_empty());

        assert!(theta_series(5, 4, None).is_err());
    }

    #[test]
    fn theta_product_identities_against_eta() {
        // θ₂(0)² θ₃(0)² θ₄(0)² = 4 η⁶: ties the three theta sums to the
        // eta product in one stroke
        let order = 20;
        let s20 = theta_half_square_stripped(order, false)
            .specialize_zeta_one()
            .mul_q_power(1, 4);
        let t30 = theta_series(3, order, None).unwrap().specialize_zeta_one();
        let t40 = theta_series(4, order, None).unwrap().specialize_zeta_one();
        let lhs = s20.mul(&t30.pow(2)).mul(&t40.pow(2));
        let rhs = eta(order).unwrap().pow(6).scale_rat(&rat_int(4));
        assert!(lhs.eq_below(&rhs, &rat_int(order)));

        // the weight -2 generator times η⁶ is -θ₁² (product formula vs
        // two-variable theta sum)
        let p2 = phi_tilde(-2, order).unwrap();
        let eta6 = eta(order).unwrap().pow(6);
        let lhs = p2.mul_qseries(&eta6, 3).unwrap();
        let rhs = theta_series(1, order, None).unwrap().neg();
        assert_eq!(lhs.rows.len(), rhs.rows.len());
        for ((e1, row1), (e2, row2)) in lhs.rows().zip(rhs.rows()) {
            assert_eq!(e1, e2);
            assert_eq!(row1, row2);
        }
    }

    #[test]
    fn generator_constant_rows() {
        let p2 = phi_tilde(-2, 8).unwrap();
        assert_eq!(p2.weight, -2);
        assert_eq!(p2.index, 1);
        assert_eq!(p2.row(0, 1), row_of(&[(1, 1), (0, -2), (-1, 1)]));

        let p0 = phi_tilde(0, 8).unwrap();
        assert_eq!(p0.weight, 0);
        assert_eq!(p0.index, 1);
        assert_eq!(p0.row(0, 1), row_of(&[(1, 1), (0, 10), (-1, 1)]));

        assert!(phi_tilde(2, 8).is_err());
    }

    #[test]
    fn jacobi_eisenstein_printed_rows() {
        let e41 = jacobi_eisenstein(4, 6).unwrap();
        assert_eq!(e41.row(0, 1), row_of(&[(0, 1)]));
        assert_eq!(
            e41.row(1, 1),
            row_of(&[(2, 1), (1, 56), (0, 126), (-1, 56), (-2, 1)])
        );

        let e61 = jacobi_eisenstein(6, 6).unwrap();
        assert_eq!(e61.row(0, 1), row_of(&[(0, 1)]));
        assert_eq!(
            e61.row(1, 1),
            row_of(&[(2, 1), (1, -88), (0, -330), (-1, -88), (-2, 1)])
        );

        assert!(jacobi_eisenstein(8, 6).is_err());
    }

    #[test]
    fn cusp_form_identities() {
        // 144·Δ·φ̃_{-2,1} = E6·E_{4,1} - E4·E_{6,1} and
        // 144·Δ·φ̃_{0,1}  = E4²·E_{4,1} - E6·E_{6,1}, exact to order 10
        let order = 10;
        let d = delta(order).unwrap();
        let e4 = eisenstein(4, order).unwrap();
        let e6 = eisenstein(6, order).unwrap();
        let e41 = jacobi_eisenstein(4, order).unwrap();
        let e61 = jacobi_eisenstein(6, order).unwrap();

        let lhs1 = phi_tilde(-2, order)
            .unwrap()
            .mul_qseries(&d, 12)
            .unwrap()
            .scale_rat(&rat_int(144));
        let rhs1 = e41
            .mul_qseries(&e6, 6)
            .unwrap()
            .sub(&e61.mul_qseries(&e4, 4).unwrap())
            .unwrap();
        assert_eq!(lhs1, rhs1);

        let lhs2 = phi_tilde(0, order)
            .unwrap()
            .mul_qseries(&d, 12)
            .unwrap()
            .scale_rat(&rat_int(144));
        let rhs2 = e41
            .mul_qseries(&e4.pow(2), 8)
            .unwrap()
            .sub(&e61.mul_qseries(&e6, 6).unwrap())
            .unwrap();
        assert_eq!(lhs2, rhs2);
    }

    #[test]
    fn zeta_symmetry_and_support() {
        for s in [
            phi_tilde(-2, 10).unwrap(),
            phi_tilde(0, 10).unwrap(),
            jacobi_eisenstein(4, 10).unwrap(),
            jacobi_eisenstein(6, 10).unwrap(),
        ] {
            assert!(s.is_zeta_symmetric());
            assert!(s.support_violations().is_empty());
        }
    }

    #[test]
    fn weight_and_index_add_under_multiplication() {
        let p2 = phi_tilde(-2, 8).unwrap();
        let p0 = phi_tilde(0, 8).unwrap();
        let prod = p2.mul(&p0);
        assert_eq!(prod.weight, -2);
        assert_eq!(prod.index, 2);
        let sq = p2.pow(2);
        assert_eq!(sq.weight, -4);
        assert_eq!(sq.index, 2);
    }

    #[test]
    fn p_map_degenerate_and_single_slot() {
        let order = 8;
        let d = crate::quasi::QuasiElement::delta_element();
        // n = 0: the form itself as an index-0 series
        let p = p_map(std::slice::from_ref(&d), 0, 12, order).unwrap();
        assert_eq!(p.weight, 12);
        assert_eq!(p.index, 0);
        let direct = JacSeries::from_qseries(&d.to_qexp(order), 12).unwrap();
        assert_eq!(p, direct);

        // single slot: g·φ̃_{-2,1}^ℓ φ̃_{0,1}^{n-ℓ}
        let g = basis_mk(14).elements()[0].clone();
        let p = p_map(
            &[
                crate::quasi::QuasiElement::zero(12),
                g.clone(),
                crate::quasi::QuasiElement::zero(16),
            ],
            2,
            14,
            order,
        )
        .unwrap();
        assert_eq!(p.weight, 12);
        assert_eq!(p.index, 2);
        let expect = JacSeries::from_qseries(&g.to_qexp(order), 14)
            .unwrap()
            .mul(&phi_tilde(-2, order).unwrap())
            .mul(&phi_tilde(0, order).unwrap());
        assert_eq!(p, expect);

        // weight bookkeeping is enforced
        assert!(p_map(&[crate::quasi::QuasiElement::e4()], 0, 12, order).is_err());
    }

    #[test]
    fn psi_map_via_decomposition() {
        let order = 10;
        let d = crate::quasi::QuasiElement::delta_element();
        let f = v_map(&d, 14, 2, 0, order).unwrap();
        let psi = psi_map(&f, 2, 14, order).unwrap();
        let expect = JacSeries::from_qseries(&d.to_qexp(order), 12)
            .unwrap()
            .mul(&phi_tilde(0, order).unwrap().pow(2));
        assert_eq!(psi, expect);

        // zero maps to zero
        let z = crate::symtensor::VVForm::zero(14, 3, rat_int(order));
        assert!(psi_map(&z, 2, 14, order).unwrap().is_zero());

        // n = 0 degenerates to the identity
        let f0 = crate::symtensor::VVForm::new(
            12,
            vec![crate::zpoly::ZPoly::from_series(d.to_qexp(order))],
        );
        let psi0 = psi_map(&f0, 0, 12, order).unwrap();
        assert_eq!(
            psi0,
            JacSeries::from_qseries(&d.to_qexp(order), 12).unwrap()
        );
    }

    #[test]
    fn psi_map_is_linear_on_mixed_sums() {
        // decompose-then-multiply agrees with the sum of the slot images
        let order = 10;
        let g0 = basis_mk(14).elements()[0].clone();
        let g2 = basis_mk(18).elements()[1].scale_rat(&rat_frac(2, 5));
        let f0 = v_map(&g0, 16, 2, 0, order).unwrap();
        let f2 = v_map(&g2, 16, 2, 2, order).unwrap();
        let sum = f0.add(&f2).unwrap();
        let lhs = psi_map(&sum, 2, 16, order).unwrap();
        let rhs = psi_map(&f0, 2, 16, order)
            .unwrap()
            .add(&psi_map(&f2, 2, 16, order).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn p_map_injective_at_desk_scale() {
        // the coefficient matrix of P on basis inputs has full column rank
        for (n, k) in [(1usize, 13i64), (2, 14), (2, 16)] {
            let order = 8;
            let mut cols: Vec<Vec<Rat>> = Vec::new();
            for ell in 0..=n {
                let lam = k - n as i64 + 2 * ell as i64;
                for g in basis_mk(lam).elements() {
                    let mut fs: Vec<crate::quasi::QuasiElement> = (0..=n)
                        .map(|s| crate::quasi::QuasiElement::zero(k - n as i64 + 2 * s as i64))
                        .collect();
                    fs[ell] = g;
                    let p = p_map(&fs, n, k, order).unwrap();
                    cols.push(jac_coefficient_vector(&p, order, n as i64 + 2));
                }
            }
            let dim: usize = (0..=n)
                .map(|ell| basis_mk(k - n as i64 + 2 * ell as i64).dim())
                .sum();
            assert_eq!(cols.len(), dim);
            let rows = cols[0].len();
            let matrix: Vec<Vec<Rat>> = (0..rows)
                .map(|r| cols.iter().map(|c| c[r].clone()).collect())
                .collect();
            assert_eq!(crate::linalg::rank(&matrix), dim, "n={n} k={k}");
        }
    }

    fn jac_coefficient_vector(s: &JacSeries, order: i64, zeta_bound: i64) -> Vec<Rat> {
        let mut out = Vec::new();
        for e in 0..order {
            for z in -zeta_bound..=zeta_bound {
                out.push(s.coeff(e, 1, z));
            }
        }
        out
    }

    #[test]
    fn transformation_laws_numeric() {
        // identity and trivial shifts leave everything fixed
        let p0 = phi_tilde(0, 30).unwrap();
        let id_report = verify_jacobi_transform(
            &p0,
            &GroupElt::identity(),
            Complex64::new(0.0, 1.2),
            Complex64::new(0.3, 0.0),
            1e-12,
        )
        .unwrap();
        assert!(id_report.modular_residual <= 1e-12);

        // elliptic law at (z, w) = (2i, 0.3), μ = 1
        let rep = verify_jacobi_transform(
            &p0,
            &GroupElt::identity(),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.3, 0.0),
            1e-6,
        )
        .unwrap();
        assert!(rep.pass(), "residuals {:?}", rep.elliptic_residuals);

        // modular law for E_{4,1} at γ = S, z = i, w = 0.2
        let e41 = jacobi_eisenstein(4, 30).unwrap();
        let rep = verify_jacobi_transform(
            &e41,
            &GroupElt::s(),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.2, 0.0),
            1e-6,
        )
        .unwrap();
        assert!(
            rep.modular_residual <= 1e-6,
            "residual {}",
            rep.modular_residual
        );
    }

    #[test]
    fn index_two_elliptic_law() {
        // products of the index-one generators have index 2; the elliptic
        // factor must scale with the index
        let sq = phi_tilde(0, 30).unwrap().pow(2);
        assert_eq!(sq.index, 2);
        let rep = verify_jacobi_transform(
            &sq,
            &GroupElt::identity(),
            Complex64::new(0.0, 2.0),
            Complex64::new(0.3, 0.0),
            1e-6,
        )
        .unwrap();
        assert!(rep.pass(), "residuals {:?}", rep.elliptic_residuals);
    }
}
