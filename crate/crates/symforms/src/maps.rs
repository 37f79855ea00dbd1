//! The correspondence maps between vector-valued modular forms, finite
//! sequences of modular forms, and quasimodular polynomials.
//!
//! - `v_map`: g -> [g, v̂_n]^{(k-n+2ℓ, -n)}_{n-ℓ}, landing in weight k.
//! - `decompose`: the inverse direction, peeling frame coordinates from the
//!   lowest nonvanishing slot upward.
//! - `w_map`: scalar projections via pairing brackets against the weighted
//!   dual vector.
//! - `u_map` / `u_inverse`: quasimodular polynomials of weight k+n vs.
//!   vector-valued forms of weight k (for k > n).
//! - `lambda_map` / `xi_map`: the mutually inverse maps between modular and
//!   quasimodular polynomials (weight λ > 2m).
//! - `q_map` / `q_inverse`: quasimodular forms vs. quasimodular polynomials,
//!   by formal substitution E2 -> E2 + (12/Pi)·X.

use num_traits::{One, ToPrimitive, Zero};

use crate::brackets::{alpha_coeff, gen_binom, rc_pair, rc_scalar_vector};
use crate::error::{Error, Result};
use crate::pi::{factorial, rat_int, Rat};
use crate::qseries::QSeries;
use crate::quasi::{basis_mk, solve_modular, QuasiElement};
use crate::symtensor::{frame_coords, u_hat_weighted, v_hat, VVForm};

/// Polynomial Σ f_r X^r with modular coefficients: f_r has weight λ + 2r.
#[derive(Debug, Clone, PartialEq)]
pub struct ModPolynomial {
    pub m: usize,
    pub weight: i64,
    pub coeffs: Vec<QuasiElement>,
}

impl ModPolynomial {
    pub fn new(m: usize, weight: i64, coeffs: Vec<QuasiElement>) -> Result<Self> {
        if coeffs.len() != m + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                m + 1,
                coeffs.len()
            )));
        }
        for (r, f) in coeffs.iter().enumerate() {
            if !f.is_zero() {
                if !f.is_modular() {
                    return Err(Error::DepthExceeded {
                        depth: f.depth(),
                        bound: 0,
                    });
                }
                let expect = weight + 2 * r as i64;
                if f.weight() != expect {
                    return Err(Error::WeightMismatch {
                        expected: expect,
                        got: f.weight(),
                    });
                }
            }
        }
        Ok(ModPolynomial { m, weight, coeffs })
    }

    pub fn zero(m: usize, weight: i64) -> Self {
        let coeffs = (0..=m)
            .map(|r| QuasiElement::zero(weight + 2 * r as i64))
            .collect();
        ModPolynomial { m, weight, coeffs }
    }
}

/// Polynomial Σ f_r X^r with quasimodular coefficients: f_r has weight
/// λ - 2r.  Produced by `q_map`, `lambda_map` and `u_inverse`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPolynomial {
    pub m: usize,
    pub weight: i64,
    pub coeffs: Vec<QuasiElement>,
}

impl QuasiPolynomial {
    pub fn new(m: usize, weight: i64, coeffs: Vec<QuasiElement>) -> Result<Self> {
        if coeffs.len() != m + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                m + 1,
                coeffs.len()
            )));
        }
        for (r, f) in coeffs.iter().enumerate() {
            if !f.is_zero() {
                let expect = weight - 2 * r as i64;
                if f.weight() != expect {
                    return Err(Error::WeightMismatch {
                        expected: expect,
                        got: f.weight(),
                    });
                }
            }
        }
        Ok(QuasiPolynomial { m, weight, coeffs })
    }

    pub fn zero(m: usize, weight: i64) -> Self {
        let coeffs = (0..=m)
            .map(|r| QuasiElement::zero(weight - 2 * r as i64))
            .collect();
        QuasiPolynomial { m, weight, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn sub(&self, rhs: &QuasiPolynomial) -> Result<QuasiPolynomial> {
        if self.m != rhs.m || self.weight != rhs.weight {
            return Err(Error::InvalidArgument("polynomial shapes differ".into()));
        }
        let coeffs: Result<Vec<_>> = self
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(QuasiPolynomial {
            m: self.m,
            weight: self.weight,
            coeffs: coeffs?,
        })
    }
}

/// 𝒱: a modular form g of weight k-n+2ℓ to a vector-valued form of weight k,
/// as the order-(n-ℓ) bracket against v̂_n.
pub fn v_map(g: &QuasiElement, k: i64, n: usize, ell: usize, order: i64) -> Result<VVForm> {
    if ell > n {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} exceeds n = {n}"
        )));
    }
    let lam = k - n as i64 + 2 * ell as i64;
    if !g.is_zero() {
        if !g.is_modular() {
            return Err(Error::DepthExceeded {
                depth: g.depth(),
                bound: 0,
            });
        }
        if g.weight() != lam {
            return Err(Error::WeightMismatch {
                expected: lam,
                got: g.weight(),
            });
        }
    }
    let f = g.to_qexp(order);
    let vh = v_hat(n, order);
    rc_scalar_vector(&f, &vh, (n - ell) as u32, lam, -(n as i64))
}

/// The leading frame constant of `v_map`: frame coordinate ℓ of
/// 𝒱_{k,n,ℓ}(g) equals this rational times g.
pub fn v_map_leading_constant(k: i64, n: usize, ell: usize) -> Rat {
    let lam = k - n as i64 + 2 * ell as i64;
    let w = (n - ell) as u32;
    factorial((n - ell) as u64) * alpha_coeff(lam, w, 0, n).value
}

/// Decompose a weight-k vector-valued form into its modular constituents
/// (g_0, ..., g_n), g_ℓ of weight k-n+2ℓ, with Σ 𝒱_{k,n,ℓ}(g_ℓ) = F.
///
/// Peels frame coordinates from the lowest nonvanishing index upward.  Each
/// peeled coefficient must pass the modular membership test (an exact linear
/// solve against the E4/E6 monomial basis); failures report `NotInImage`.
pub fn decompose(f: &VVForm, k: i64, n: usize) -> Result<Vec<QuasiElement>> {
    if f.rank() != n + 1 {
        return Err(Error::RankMismatch {
            expected: n + 1,
            got: f.rank(),
        });
    }
    let order = f.order().to_integer().to_i64().unwrap_or(0);
    let mut parts: Vec<QuasiElement> = (0..=n)
        .map(|ell| QuasiElement::zero(k - n as i64 + 2 * ell as i64))
        .collect();
    let mut residual = f.clone();
    loop {
        let coords = frame_coords(&residual)
            .map_err(|_| Error::NotInImage("frame coordinates fail Z-cancellation".into()))?;
        let Some(t) = coords.first_nonzero() else {
            return Ok(parts); // residual is zero: done
        };
        let lam = k - n as i64 + 2 * t as i64;
        let lead = v_map_leading_constant(k, n, t);
        if lead.is_zero() {
            return Err(Error::NotInImage(format!(
                "slot {t} has a degenerate leading constant (weight {lam})"
            )));
        }
        if !coords.entries[t].is_pi_free() {
            return Err(Error::NotInImage(format!(
                "frame coordinate {t} carries formal 2\u{03c0}i content"
            )));
        }
        let candidate = coords.entries[t].scale_rat(&lead.recip());
        let g = solve_modular(&candidate, lam).ok_or_else(|| {
            Error::NotInImage(format!(
                "frame coordinate {t} is not a modular form of weight {lam}"
            ))
        })?;
        let image = v_map(&g, k, n, t, order)?;
        residual = residual.sub(&image)?;
        parts[t] = g;
        // the peeled slot's frame coordinate must now vanish
        let check = frame_coords(&residual)
            .map_err(|_| Error::NotInImage("frame coordinates fail Z-cancellation".into()))?;
        if check.first_nonzero().is_some_and(|s| s <= t) {
            return Err(Error::NotInImage(format!(
                "peeling did not clear frame coordinate {t}"
            )));
        }
    }
}

/// 𝒲: scalar projections ([[û_n, F]]_0, ..., [[û_n, F]]_n) with the
/// binomially weighted dual vector, each entry a plain q-expansion of
/// weight k-n+2ℓ.
pub fn w_map(f: &VVForm, k: i64, n: usize) -> Result<Vec<QSeries>> {
    if f.rank() != n + 1 {
        return Err(Error::RankMismatch {
            expected: n + 1,
            got: f.rank(),
        });
    }
    let order = f.order().to_integer().to_i64().unwrap_or(0);
    let u = u_hat_weighted(n, order);
    (0..=n)
        .map(|ell| rc_pair(&u, f, ell as u32, -(n as i64), k))
        .collect()
}

/// 𝒰: a quasimodular polynomial F = Σ f_r X^r of weight k+n and degree <= n
/// to the vector-valued form Σ_ℓ (-1)^n (n-ℓ)! D^ℓ(v̂_n) f_ℓ of weight k.
///
/// The defining hypothesis is k > n; `allow_low_weight` exposes the formula
/// below that bound without any injectivity claim.
pub fn u_map(f: &QuasiPolynomial, n: usize, order: i64, allow_low_weight: bool) -> Result<VVForm> {
    let k = f.weight - n as i64;
    if k <= n as i64 && !allow_low_weight {
        return Err(Error::WeightHypothesisViolated { k, n: n as i64 });
    }
    if f.m > n {
        for r in (n + 1)..=f.m {
            if !f.coeffs[r].is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "degree {r} exceeds n = {n}"
                )));
            }
        }
    }
    let sign = if n.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    };
    let vh = v_hat(n, order);
    let mut acc = VVForm::zero(k, n + 1, rat_int(order));
    for ell in 0..=n.min(f.m) {
        let fe = f.coeffs[ell].to_qexp(order);
        if fe.is_zero() {
            continue;
        }
        let c = &sign * factorial((n - ell) as u64);
        let term = vh.z_derive_n(ell as u32).mul_series(&fe).scale_rat(&c);
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// 𝒰^{-1}: reads the Z-coefficients of component 0 (where
/// 𝒰_n(F)_0 = (-1)^n n! Σ_ℓ z^{n-ℓ} f_ℓ), lifts each to a quasimodular
/// element, and validates by re-applying 𝒰.
pub fn u_inverse(g: &VVForm, n: usize, allow_low_weight: bool) -> Result<QuasiPolynomial> {
    if g.rank() != n + 1 {
        return Err(Error::RankMismatch {
            expected: n + 1,
            got: g.rank(),
        });
    }
    let order = g.order().to_integer().to_i64().unwrap_or(0);
    let k = g.weight;
    if k <= n as i64 && !allow_low_weight {
        return Err(Error::WeightHypothesisViolated { k, n: n as i64 });
    }
    let lam = k + n as i64;
    let sign = if n.is_multiple_of(2) {
        Rat::one()
    } else {
        -Rat::one()
    };
    let scale = &sign / factorial(n as u64);
    let comp0 = &g.components[0];
    if comp0.degree() > n {
        return Err(Error::NotInImage(format!(
            "component 0 has Z-degree {} > n = {n}",
            comp0.degree()
        )));
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    for ell in 0..=n {
        let series = comp0.coeff(n - ell).scale_rat(&scale);
        let w = lam - 2 * ell as i64;
        let lifted = crate::quasi::solve_quasimodular(&series, w, n - ell).ok_or_else(|| {
            Error::NotInImage(format!(
                "Z-coefficient {ell} is not quasimodular of weight {w}"
            ))
        })?;
        coeffs.push(lifted);
    }
    let out = QuasiPolynomial::new(n, lam, coeffs)?;
    // checksum: the remaining components must agree as well
    let back = u_map(&out, n, order, true)?;
    if !back.eq_below(g, &g.order()) {
        return Err(Error::NotInImage(
            "re-applying the map does not reproduce the input".into(),
        ));
    }
    Ok(out)
}

/// Λ^m_λ: modular polynomials of weight λ-2m to quasimodular polynomials of
/// weight λ, for λ > 2m.
pub fn lambda_map(f: &ModPolynomial, m: usize, lam: i64) -> Result<QuasiPolynomial> {
    if lam <= 2 * m as i64 {
        return Err(Error::WeightTooSmall {
            lam,
            bound: 2 * m as i64,
        });
    }
    if f.m != m || f.weight != lam - 2 * m as i64 {
        return Err(Error::WeightMismatch {
            expected: lam - 2 * m as i64,
            got: f.weight,
        });
    }
    let mut coeffs = Vec::with_capacity(m + 1);
    for kk in 0..=m {
        // f^Λ_k = (1/k!) Σ_{r=0}^{m-k} f^{(r)}_{m-k-r} / (r! (λ-2k-r-1)!)
        let mut acc = QuasiElement::zero(lam - 2 * kk as i64);
        for r in 0..=(m - kk) {
            let idx = m - kk - r;
            let fr = &f.coeffs[idx];
            if fr.is_zero() {
                continue;
            }
            let fact_arg = lam - 2 * kk as i64 - r as i64 - 1;
            debug_assert!(fact_arg >= 0);
            let c = (factorial(r as u64) * factorial(fact_arg as u64)).recip();
            acc = acc.add(&fr.z_derive(r as u32).scale_rat(&c))?;
        }
        let c = factorial(kk as u64).recip();
        coeffs.push(acc.scale_rat(&c));
    }
    QuasiPolynomial::new(m, lam, coeffs)
}

/// Ξ^m_λ: quasimodular polynomials of weight λ to modular polynomials of
/// weight λ-2m; the inverse of Λ^m_λ.
pub fn xi_map(f: &QuasiPolynomial, m: usize, lam: i64) -> Result<ModPolynomial> {
    if lam <= 2 * m as i64 {
        return Err(Error::WeightTooSmall {
            lam,
            bound: 2 * m as i64,
        });
    }
    if f.m != m || f.weight != lam {
        return Err(Error::WeightMismatch {
            expected: lam,
            got: f.weight,
        });
    }
    let mut coeffs = Vec::with_capacity(m + 1);
    for kk in 0..=m {
        // f^Ξ_k = (λ+2k-2m-1) Σ_{r=0}^{k} (-1)^r/r! (m-k+r)! (2k+λ-2m-r-2)! f^{(r)}_{m-k+r}
        let prefactor = lam + 2 * kk as i64 - 2 * m as i64 - 1;
        let mut acc = QuasiElement::zero(lam - 2 * m as i64 + 2 * kk as i64);
        if prefactor != 0 {
            for r in 0..=kk {
                let idx = m - kk + r;
                let fr = &f.coeffs[idx];
                if fr.is_zero() {
                    continue;
                }
                let fact_arg = 2 * kk as i64 + lam - 2 * m as i64 - r as i64 - 2;
                debug_assert!(fact_arg >= 0);
                let sign = if r % 2 == 0 { Rat::one() } else { -Rat::one() };
                let c = sign * factorial((m - kk + r) as u64) * factorial(fact_arg as u64)
                    / factorial(r as u64);
                acc = acc.add(&fr.z_derive(r as u32).scale_rat(&c))?;
            }
            acc = acc.scale_rat(&rat_int(prefactor));
        }
        coeffs.push(acc);
    }
    // the output must be a genuine modular polynomial
    for (r, c) in coeffs.iter().enumerate() {
        if !c.is_zero() && !c.is_modular() {
            return Err(Error::NotInImage(format!(
                "coefficient {r} of the image has positive depth"
            )));
        }
    }
    ModPolynomial::new(m, lam - 2 * m as i64, coeffs)
}

/// 𝒬: a quasimodular form of weight λ and depth <= m to its polynomial,
/// by the formal substitution E2 -> E2 + (12/Pi)·X.
pub fn q_map(f: &QuasiElement, m: usize) -> Result<QuasiPolynomial> {
    if f.depth() > m {
        return Err(Error::DepthExceeded {
            depth: f.depth(),
            bound: m,
        });
    }
    let lam = f.weight();
    let mut coeffs: Vec<QuasiElement> = (0..=m)
        .map(|r| QuasiElement::zero(lam - 2 * r as i64))
        .collect();
    for (mono, c) in f.terms() {
        let (a, b, cc) = *mono;
        // (E2 + (12/Pi) X)^a = Σ_j C(a,j) 12^j Pi^{-j} E2^{a-j} X^j
        for j in 0..=a {
            let binom = gen_binom(a as i64, j);
            let twelve_pow = Rat::from_integer(num_bigint::BigInt::from(12u32).pow(j));
            let coeff = c.scale(&(binom * twelve_pow)).mul_pi_power(-(j as i32));
            let term = QuasiElement::monomial((a - j, b, cc), coeff);
            coeffs[j as usize] = coeffs[j as usize].add(&term)?;
        }
    }
    QuasiPolynomial::new(m, lam, coeffs)
}

/// 𝒬^{-1}: evaluation at X = 0, i.e. the constant coefficient.
pub fn q_inverse(f: &QuasiPolynomial) -> QuasiElement {
    f.coeffs[0].clone()
}

/// A full basis of QP^m_λ obtained by applying Λ to the modular-polynomial
/// basis: slots r = 0..m carry the monomial bases of M_{λ-2m+2r}.
pub fn quasi_polynomial_basis(m: usize, lam: i64) -> Result<Vec<QuasiPolynomial>> {
    let mut out = Vec::new();
    for r in 0..=m {
        let w = lam - 2 * m as i64 + 2 * r as i64;
        for b in basis_mk(w).elements() {
            let mut coeffs: Vec<QuasiElement> = (0..=m)
                .map(|s| QuasiElement::zero(lam - 2 * m as i64 + 2 * s as i64))
                .collect();
            coeffs[r] = b.clone();
            let mp = ModPolynomial::new(m, lam - 2 * m as i64, coeffs)?;
            out.push(lambda_map(&mp, m, lam)?);
        }
    }
    Ok(out)
}

/// Numeric residuals of the quasimodular-polynomial action: for every
/// (γ, z) sample, the worst X^j-coefficient mismatch between
/// J^{-λ} Φ(γz, J²(X - K)) and Φ(z, X).  Expansions are computed once.
pub fn quasi_polynomial_action_residuals(
    f: &QuasiPolynomial,
    gammas: &[crate::group::GroupElt],
    points: &[num_complex::Complex64],
    order: i64,
) -> Result<Vec<f64>> {
    let expansions: Vec<QSeries> = f.coeffs.iter().map(|c| c.to_qexp(order)).collect();
    let lam = f.weight;
    let mut out = Vec::new();
    for gamma in gammas {
        for &z in points {
            let gz = gamma.moebius(z)?;
            let j = gamma.j_cocycle(z)?;
            let kk = gamma.k_cocycle(z)?;
            let jl = j.powi(lam as i32);
            let mut worst = 0.0f64;
            for jj in 0..=f.m {
                // Σ_{r>=j} φ_r(γz) J^{2r} C(r,j) (-K)^{r-j}
                let mut lhs = num_complex::Complex64::new(0.0, 0.0);
                for (r, e) in expansions.iter().enumerate().skip(jj) {
                    let (v, _) = e.eval(gz)?;
                    let binom = gen_binom(r as i64, (r - jj) as u32)
                        .to_f64()
                        .unwrap_or(f64::NAN);
                    lhs += v * j.powi(2 * r as i32) * binom * (-kk).powi((r - jj) as i32);
                }
                let lhs = lhs / jl;
                let (rhs, _) = expansions[jj].eval(z)?;
                let scale = rhs.norm().max(lhs.norm()).max(1.0);
                worst = worst.max((lhs - rhs).norm() / scale);
            }
            out.push(worst);
        }
    }
    Ok(out)
}
