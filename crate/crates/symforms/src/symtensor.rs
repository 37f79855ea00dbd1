//! Symmetric tensor representations of SL(2) and the frame calculus for
//! vector-valued modular forms.
//!
//! The representation ρ_n acts on the monomial basis
//! (z1^n, z1^{n-1}z2, ..., z2^n): row i of ρ_n(γ) holds the coefficients of
//! (a·z1 + b·z2)^{n-i} (c·z1 + d·z2)^i.  With this orientation ρ_1(γ) = γ,
//! ρ_n is a homomorphism, and ρ_n(γ)·v̂_n(z) = J(γ,z)^n v̂_n(γz) for the
//! standard vector v̂_n(z) = t(z^n, ..., z, 1).
//!
//! The frame matrix L_n(z) = ρ_n(1 z; 0 1) is upper triangular with
//! (r,s)-entry C(n-r, s-r) z^{s-r}; its inverse substitutes -z.  Writing
//! F = L_n(z)·t(f_0, ..., f_n) puts a vector-valued form into frame
//! coordinates: if f_0, ..., f_{r-1} vanish there, then f_r is a scalar
//! modular form of weight k - n + 2r.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::GroupElt;
use crate::linalg::{self, RatMatrix};
use crate::pi::{rat_int, Rat};
use crate::qseries::QSeries;
use crate::zpoly::ZPoly;

/// Exact matrix of a symmetric power representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymRepMatrix {
    pub n: usize,
    pub entries: RatMatrix,
}

fn binom_u(n: usize, k: usize) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    Rat::new(num, den)
}

fn big_pow(base: &BigInt, e: usize) -> Rat {
    Rat::from_integer(base.pow(e as u32))
}

/// ρ_n(γ), exact.  Row i carries the monomial coefficients of
/// (a z1 + b z2)^{n-i} (c z1 + d z2)^i.
pub fn sym_rep(gamma: &GroupElt, n: usize) -> SymRepMatrix {
    let mut entries = vec![vec![Rat::zero(); n + 1]; n + 1];
    for i in 0..=n {
        // (a z1 + b z2)^{n-i} has z2-degree t with coefficient C(n-i,t) a^{n-i-t} b^t
        // (c z1 + d z2)^i   has z2-degree s with coefficient C(i,s)   c^{i-s}   d^s
        for t in 0..=(n - i) {
            let left = binom_u(n - i, t) * big_pow(&gamma.a, n - i - t) * big_pow(&gamma.b, t);
            if left.is_zero() {
                continue;
            }
            for s in 0..=i {
                let right = binom_u(i, s) * big_pow(&gamma.c, i - s) * big_pow(&gamma.d, s);
                if right.is_zero() {
                    continue;
                }
                entries[i][t + s] += &left * &right;
            }
        }
    }
    SymRepMatrix { n, entries }
}

impl SymRepMatrix {
    pub fn identity(n: usize) -> Self {
        SymRepMatrix {
            n,
            entries: linalg::identity(n + 1),
        }
    }

    pub fn mul(&self, rhs: &SymRepMatrix) -> SymRepMatrix {
        assert_eq!(self.n, rhs.n);
        SymRepMatrix {
            n: self.n,
            entries: linalg::mat_mul(&self.entries, &rhs.entries),
        }
    }

    pub fn determinant(&self) -> Rat {
        linalg::determinant(&self.entries)
    }

    /// Apply to a vector of rationals.
    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Apply to a vector of Z-polynomials.
    pub fn apply_zpoly(&self, v: &[ZPoly]) -> Vec<ZPoly> {
        let order = v.iter().map(|p| p.order()).min().unwrap();
        self.entries
            .iter()
            .map(|row| {
                let mut acc = ZPoly::zero(order.clone());
                for (c, p) in row.iter().zip(v) {
                    if !c.is_zero() {
                        acc = acc.add(&p.scale_rat(c));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex64>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| Complex64::new(x.to_f64().unwrap_or(f64::NAN), 0.0))
                    .collect()
            })
            .collect()
    }
}

/// The contragredient: exact transpose-inverse.
///
/// Note this is conjugate to, but for n >= 2 not equal to, ρ_n(tγ^{-1});
/// the conjugating matrix is diag(C(n,0), ..., C(n,n)).
pub fn contragredient(m: &SymRepMatrix) -> Result<SymRepMatrix> {
    let inv = linalg::invert(&m.entries)?;
    Ok(SymRepMatrix {
        n: m.n,
        entries: linalg::transpose(&inv),
    })
}

/// A vector-valued form of the given weight: components are polynomials in
/// the formal variable Z with q-expansion coefficients.  `rank() - 1` is the
/// symmetric power for forms living in a ρ_n space.
#[derive(Debug, Clone, PartialEq)]
pub struct VVForm {
    pub weight: i64,
    pub components: Vec<ZPoly>,
}

impl VVForm {
    pub fn new(weight: i64, components: Vec<ZPoly>) -> Self {
        assert!(!components.is_empty());
        VVForm { weight, components }
    }

    pub fn zero(weight: i64, rank: usize, order: Rat) -> Self {
        VVForm {
            weight,
            components: vec![ZPoly::zero(order); rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    /// Symmetric power index n = rank - 1.
    pub fn sym_power(&self) -> usize {
        self.rank() - 1
    }

    pub fn order(&self) -> Rat {
        self.components.iter().map(|c| c.order()).min().unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, rhs: &VVForm) -> Result<VVForm> {
        if self.rank() != rhs.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: rhs.rank(),
            });
        }
        Ok(VVForm {
            weight: self.weight,
            components: self
                .components
                .iter()
                .zip(&rhs.components)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &VVForm) -> Result<VVForm> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> VVForm {
        VVForm {
            weight: self.weight,
            components: self.components.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn scale_rat(&self, c: &Rat) -> VVForm {
        VVForm {
            weight: self.weight,
            components: self.components.iter().map(|p| p.scale_rat(c)).collect(),
        }
    }

    pub fn mul_series(&self, s: &QSeries) -> VVForm {
        VVForm {
            weight: self.weight,
            components: self.components.iter().map(|p| p.mul_series(s)).collect(),
        }
    }

    /// Componentwise D = d/dz.
    pub fn z_derive(&self) -> VVForm {
        VVForm {
            weight: self.weight + 2,
            components: self.components.iter().map(|c| c.z_derive()).collect(),
        }
    }

    pub fn z_derive_n(&self, r: u32) -> VVForm {
        let mut f = self.clone();
        for _ in 0..r {
            f = f.z_derive();
        }
        f
    }

    pub fn eval(&self, z: Complex64) -> Result<Vec<Complex64>> {
        self.components
            .iter()
            .map(|c| c.eval(z).map(|(v, _)| v))
            .collect()
    }

    /// Componentwise coefficient equality below the exponent bound `upto`.
    pub fn eq_below(&self, rhs: &VVForm, upto: &Rat) -> bool {
        self.rank() == rhs.rank()
            && self
                .components
                .iter()
                .zip(&rhs.components)
                .all(|(a, b)| a.eq_below(b, upto))
    }
}

/// v̂_n(z) = t(z^n, ..., z, 1), a vector-valued form of weight -n.
pub fn v_hat(n: usize, order: i64) -> VVForm {
    let one = QSeries::one(rat_int(order));
    let components = (0..=n)
        .map(|i| ZPoly::z_monomial(one.clone(), n - i))
        .collect();
    VVForm::new(-(n as i64), components)
}

/// û_n(z) = t(1, -z, ..., (-z)^n), of weight -n with respect to the
/// representation γ -> ρ_n(tγ^{-1}).
pub fn u_hat(n: usize, order: i64) -> VVForm {
    let one = QSeries::one(rat_int(order));
    let components = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            ZPoly::z_monomial(one.scale_rat(&rat_int(sign)), j)
        })
        .collect();
    VVForm::new(-(n as i64), components)
}

/// The binomially weighted companion t(C(n,0), -C(n,1) z, ..., (-z)^n C(n,n)).
///
/// This is the vector that transforms under the true contragredient
/// (transpose-inverse) of ρ_n, so that the plain dot product with a ρ_n-form
/// is invariant; its contraction with F is exactly frame coordinate 0.
pub fn u_hat_weighted(n: usize, order: i64) -> VVForm {
    let one = QSeries::one(rat_int(order));
    let components = (0..=n)
        .map(|j| {
            let sign = if j % 2 == 0 { 1 } else { -1 };
            let c = binom_u(n, j) * rat_int(sign);
            ZPoly::z_monomial(one.scale_rat(&c), j)
        })
        .collect();
    VVForm::new(-(n as i64), components)
}

/// Frame coordinates t(f_0, ..., f_n) with F = L_n(z)·t(f_0, ..., f_n).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameCoords {
    pub weight: i64,
    pub entries: Vec<QSeries>,
}

impl FrameCoords {
    pub fn n(&self) -> usize {
        self.entries.len() - 1
    }

    /// Lowest index with a nonzero entry.
    pub fn first_nonzero(&self) -> Option<usize> {
        self.entries.iter().position(|e| !e.is_zero())
    }
}

/// The frame matrix L_n(z) = ρ_n(1 z; 0 1) as Z-polynomials:
/// (r,s)-entry C(n-r, s-r)·Z^{s-r} for s >= r.
pub fn frame_matrix(n: usize, order: i64) -> Vec<Vec<ZPoly>> {
    frame_matrix_signed(n, order, false)
}

/// L_n(z)^{-1} = ρ_n(1 -z; 0 1).
pub fn frame_matrix_inverse(n: usize, order: i64) -> Vec<Vec<ZPoly>> {
    frame_matrix_signed(n, order, true)
}

fn frame_matrix_signed(n: usize, order: i64, negate: bool) -> Vec<Vec<ZPoly>> {
    let one = QSeries::one(rat_int(order));
    (0..=n)
        .map(|r| {
            (0..=n)
                .map(|s| {
                    if s < r {
                        ZPoly::zero(rat_int(order))
                    } else {
                        let mut c = binom_u(n - r, s - r);
                        if negate && (s - r) % 2 == 1 {
                            c = -c;
                        }
                        ZPoly::z_monomial(one.scale_rat(&c), s - r)
                    }
                })
                .collect()
        })
        .collect()
}

/// Frame coordinates of F: computes L_n(z)^{-1} F(z) and demands that every
/// entry be free of Z.  Cancellation failure means F is not of the frame
/// form and is reported as an error rather than projected away.
pub fn frame_coords(f: &VVForm) -> Result<FrameCoords> {
    let n = f.sym_power();
    let order = f.order();
    let mut entries = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut acc = ZPoly::zero(order.clone());
        for s in r..=n {
            let mut c = binom_u(n - r, s - r);
            if (s - r) % 2 == 1 {
                c = -c;
            }
            acc = acc.add(&f.components[s].mul_z_monomial(&c, s - r));
        }
        match acc.as_series() {
            Some(series) => entries.push(series.clone()),
            None => return Err(Error::ResidualZDependence),
        }
    }
    Ok(FrameCoords {
        weight: f.weight,
        entries,
    })
}

/// Rebuild a vector-valued form from frame coordinates: F = L_n(z)·t(f_*).
pub fn from_frame_coords(coords: &FrameCoords) -> VVForm {
    let n = coords.n();
    let order = coords
        .entries
        .iter()
        .map(|e| e.order().clone())
        .min()
        .unwrap();
    let mut components = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut acc = ZPoly::zero(order.clone());
        for s in r..=n {
            let c = binom_u(n - r, s - r);
            acc = acc.add(&ZPoly::z_monomial(coords.entries[s].scale_rat(&c), s - r));
        }
        components.push(acc);
    }
    VVForm::new(coords.weight, components)
}

/// Which transformation law a vector-valued form obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    /// F(γz) = J^k ρ_n(γ) F(z)
    SymPower,
    /// F(γz) = J^k ρ_n(tγ^{-1}) F(z)  (the law of û_n)
    DualSymPower,
}

/// Residual report of a numeric transformation-law check.
#[derive(Debug, Clone)]
pub struct TransformReport {
    pub residuals: Vec<f64>,
    pub tol: f64,
}

impl TransformReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_residual() <= self.tol
    }
}

/// Componentwise residual of J^{-k} F(γz) - ρ(γ) F(z) at one sample point.
pub fn verify_vv_transform(
    f: &VVForm,
    gamma: &GroupElt,
    z: Complex64,
    tol: f64,
    rep: RepKind,
) -> Result<TransformReport> {
    let n = f.sym_power();
    let rho = match rep {
        RepKind::SymPower => sym_rep(gamma, n),
        RepKind::DualSymPower => sym_rep(&gamma.transpose_inverse(), n),
    };
    let gz = gamma.moebius(z)?;
    let j = gamma.j_cocycle(z)?;
    let lhs = f.eval(gz)?;
    let fz = f.eval(z)?;
    let rhoc = rho.to_complex();
    let jk = j.powi(f.weight as i32);
    // relative residual against the larger of the two sides, floored at 1
    let mut residuals = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut rhs = Complex64::new(0.0, 0.0);
        for (s, v) in fz.iter().enumerate() {
            rhs += rhoc[i][s] * v;
        }
        rhs *= jk;
        let scale = rhs.norm().max(lhs[i].norm()).max(1.0);
        residuals.push((lhs[i] - rhs).norm() / scale);
    }
    Ok(TransformReport { residuals, tol })
}
