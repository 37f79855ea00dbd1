//! Cohen-Kuznetsov liftings and formal X-series.
//!
//! A [`JLSeries`] is a truncated formal power series in X whose coefficients
//! are either q-expansions (scalar case) or Z-polynomial vectors
//! (vector-valued case).  The two liftings implemented here,
//!
//! - `ck_lift_scalar`: g -> Σ_j D^j g / (j! (j+κ-1)!) · X^j for a modular
//!   form g of weight κ >= 1, and
//! - `ck_lift_vhat`:  Σ_j (-1)^j (n-j)!/j! · D^j(v̂_n) · X^j, which is finite
//!   because D^{n+1} v̂_n = 0,
//!
//! turn modular data into Jacobi-like series whose products recover the
//! correspondence maps as single X-coefficients.

use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::group::GroupElt;
use crate::pi::{factorial, rat_int, Rat};
use crate::qseries::QSeries;
use crate::quasi::QuasiElement;
use crate::symtensor::{sym_rep, v_hat, VVForm};

/// Coefficients of a formal X-series.
#[derive(Debug, Clone, PartialEq)]
pub enum JLCoeffs {
    Scalar(Vec<QSeries>),
    Vector(Vec<VVForm>),
}

/// Truncated formal power series in X of the stated weight.  `rep_power`
/// tags vector-valued series with their symmetric power n.
#[derive(Debug, Clone, PartialEq)]
pub struct JLSeries {
    pub weight: i64,
    pub x_order: usize,
    pub coeffs: JLCoeffs,
    pub rep_power: Option<usize>,
}

impl JLSeries {
    pub fn x_len(&self) -> usize {
        match &self.coeffs {
            JLCoeffs::Scalar(v) => v.len(),
            JLCoeffs::Vector(v) => v.len(),
        }
    }

    /// The X^j coefficient together with its implied weight tag: the
    /// X-series has weight λ, so coefficient j behaves like weight λ + 2j.
    pub fn coefficient(&self, j: usize) -> Result<(JLCoefficient, i64)> {
        if j >= self.x_len() {
            return Err(Error::IndexOutOfRange {
                index: j,
                len: self.x_len(),
            });
        }
        let c = match &self.coeffs {
            JLCoeffs::Scalar(v) => JLCoefficient::Scalar(v[j].clone()),
            JLCoeffs::Vector(v) => JLCoefficient::Vector(v[j].clone()),
        };
        Ok((c, self.weight + 2 * j as i64))
    }
}

/// A single extracted X-coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum JLCoefficient {
    Scalar(QSeries),
    Vector(VVForm),
}

/// The Cohen-Kuznetsov lifting of a modular form g of weight κ >= 1:
/// coefficient j is D^j g / (j! (j+κ-1)!).
pub fn ck_lift_scalar(g: &QuasiElement, q_order: i64, x_order: usize) -> Result<JLSeries> {
    let kappa = g.weight();
    if kappa < 1 {
        return Err(Error::WeightTooSmall {
            lam: kappa,
            bound: 0,
        });
    }
    if !g.is_zero() && !g.is_modular() {
        return Err(Error::DepthExceeded {
            depth: g.depth(),
            bound: 0,
        });
    }
    let expansion = g.to_qexp(q_order);
    let mut coeffs = Vec::with_capacity(x_order);
    let mut deriv = expansion;
    for j in 0..x_order {
        let c = (factorial(j as u64) * factorial((j as i64 + kappa - 1) as u64)).recip();
        coeffs.push(deriv.scale_rat(&c));
        deriv = deriv.z_derive(1);
    }
    Ok(JLSeries {
        weight: kappa,
        x_order,
        coeffs: JLCoeffs::Scalar(coeffs),
        rep_power: None,
    })
}

/// Scalar X-series built from the coefficients of a quasimodular polynomial
/// F = Σ f_r X^r of degree <= n: the X^j coefficient is (n-j)!·f_{n-j},
/// zero beyond X^n.  This is the finite lifting whose product against
/// `ck_lift_vhat` extracts the weight-k vector-valued image at X^n.
pub fn lift_from_quasi_polynomial(
    f: &crate::maps::QuasiPolynomial,
    n: usize,
    q_order: i64,
    x_order: usize,
) -> Result<JLSeries> {
    if f.m > n {
        return Err(Error::InvalidArgument(format!(
            "polynomial degree {} exceeds n = {n}",
            f.m
        )));
    }
    let mut coeffs = Vec::with_capacity(x_order);
    for j in 0..x_order {
        if j <= n && n - j <= f.m {
            let c = factorial((n - j) as u64);
            coeffs.push(f.coeffs[n - j].to_qexp(q_order).scale_rat(&c));
        } else {
            coeffs.push(QSeries::zero(rat_int(q_order)));
        }
    }
    Ok(JLSeries {
        weight: f.weight - 2 * n as i64,
        x_order,
        coeffs: JLCoeffs::Scalar(coeffs),
        rep_power: None,
    })
}

/// The vector-valued lifting of v̂_n: exactly n+1 nonzero X-coefficients.
pub fn ck_lift_vhat(n: usize, q_order: i64, x_order: usize) -> JLSeries {
    let vh = v_hat(n, q_order);
    let mut coeffs = Vec::with_capacity(x_order);
    let mut deriv = vh;
    for j in 0..x_order {
        if j <= n {
            let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
            let c = sign * factorial((n - j) as u64) / factorial(j as u64);
            coeffs.push(deriv.scale_rat(&c));
            deriv = deriv.z_derive();
        } else {
            coeffs.push(VVForm::zero(
                -(n as i64) + 2 * j as i64,
                n + 1,
                rat_int(q_order),
            ));
        }
    }
    JLSeries {
        weight: -(n as i64),
        x_order,
        coeffs: JLCoeffs::Vector(coeffs),
        rep_power: Some(n),
    }
}

/// Cauchy product of a scalar X-series against a vector X-series; with
/// `negate_x` the scalar factor is first evaluated at -X.
pub fn jl_multiply(a: &JLSeries, b: &JLSeries, negate_x: bool) -> Result<JLSeries> {
    let JLCoeffs::Scalar(sa) = &a.coeffs else {
        return Err(Error::InvalidArgument(
            "left factor must be a scalar X-series".into(),
        ));
    };
    let JLCoeffs::Vector(vb) = &b.coeffs else {
        return Err(Error::InvalidArgument(
            "right factor must be a vector X-series".into(),
        ));
    };
    let x_order = a.x_order.min(b.x_order);
    let rank = vb.first().map(|f| f.rank()).unwrap_or(1);
    let order = vb
        .iter()
        .map(|f| f.order())
        .chain(sa.iter().map(|s| s.order().clone()))
        .min()
        .unwrap();
    let mut coeffs = Vec::with_capacity(x_order);
    for j in 0..x_order {
        let mut acc = VVForm::zero(a.weight + b.weight + 2 * j as i64, rank, order.clone());
        for r in 0..=j {
            if r >= sa.len() || j - r >= vb.len() {
                continue;
            }
            let mut s = sa[r].clone();
            if negate_x && r % 2 == 1 {
                s = s.neg();
            }
            acc = acc.add(&vb[j - r].mul_series(&s))?;
        }
        coeffs.push(acc);
    }
    Ok(JLSeries {
        weight: a.weight + b.weight,
        x_order,
        coeffs: JLCoeffs::Vector(coeffs),
        rep_power: b.rep_power,
    })
}

/// Numeric residual of the vector-valued Jacobi-like law at one sample:
/// Φ(γz, J^{-2}X) = J^λ e^{K·X} ρ_n(γ) Φ(z,X), compared per X-power.
pub fn verify_jl_transform(
    series: &JLSeries,
    gamma: &GroupElt,
    z: Complex64,
    x_terms: usize,
) -> Result<f64> {
    let JLCoeffs::Vector(coeffs) = &series.coeffs else {
        return Err(Error::InvalidArgument(
            "expected a vector-valued X-series".into(),
        ));
    };
    let n = series
        .rep_power
        .ok_or_else(|| Error::InvalidArgument("missing representation tag".into()))?;
    let gz = gamma.moebius(z)?;
    let j = gamma.j_cocycle(z)?;
    let kk = gamma.k_cocycle(z)?;
    let rho = sym_rep(gamma, n).to_complex();
    let jl = j.powi(series.weight as i32);
    let terms = x_terms.min(series.x_order);
    let mut worst = 0.0f64;
    for p in 0..terms {
        // LHS: coefficient of X^p in Φ(γz, J^{-2} X)
        let lhs: Vec<Complex64> = coeffs[p]
            .eval(gz)?
            .iter()
            .map(|v| v * j.powi(-2 * p as i32))
            .collect();
        // RHS: J^λ Σ_{a+b=p} K^a/a! ρ(γ) Φ_b(z)
        let mut rhs = vec![Complex64::new(0.0, 0.0); lhs.len()];
        for b in 0..=p {
            let a = p - b;
            let ka = kk.powi(a as i32) / factorial(a as u64).to_f64().unwrap_or(f64::NAN);
            let vb = coeffs[b].eval(z)?;
            for (i, row) in rho.iter().enumerate() {
                let mut dot = Complex64::new(0.0, 0.0);
                for (s, v) in vb.iter().enumerate() {
                    dot += row[s] * v;
                }
                rhs[i] += jl * ka * dot;
            }
        }
        for (l, r) in lhs.iter().zip(&rhs) {
            let scale = l.norm().max(r.norm()).max(1.0);
            worst = worst.max((l - r).norm() / scale);
        }
    }
    Ok(worst)
}

/// Numeric residual of the scalar Jacobi-like law
/// Φ(γz, J^{-2}X) = J^κ e^{K·X} Φ(z,X) per X-power.
pub fn verify_jl_scalar_transform(
    series: &JLSeries,
    gamma: &GroupElt,
    z: Complex64,
    x_terms: usize,
) -> Result<f64> {
    let JLCoeffs::Scalar(coeffs) = &series.coeffs else {
        return Err(Error::InvalidArgument("expected a scalar X-series".into()));
    };
    let gz = gamma.moebius(z)?;
    let j = gamma.j_cocycle(z)?;
    let kk = gamma.k_cocycle(z)?;
    let jl = j.powi(series.weight as i32);
    let terms = x_terms.min(series.x_order);
    let mut worst = 0.0f64;
    for p in 0..terms {
        let (vp, _) = coeffs[p].eval(gz)?;
        let lhs = vp * j.powi(-2 * p as i32);
        let mut rhs = Complex64::new(0.0, 0.0);
        for b in 0..=p {
            let a = p - b;
            let ka = kk.powi(a as i32) / factorial(a as u64).to_f64().unwrap_or(f64::NAN);
            let (vb, _) = coeffs[b].eval(z)?;
            rhs += jl * ka * vb;
        }
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{sample_gammas, sample_points};
    use crate::pi::rat_frac;
    use crate::zpoly::ZPoly;

    #[test]
    fn scalar_lift_leading_coefficients() {
        let d = QuasiElement::delta_element();
        let lift = ck_lift_scalar(&d, 10, 4).unwrap();
        let JLCoeffs::Scalar(coeffs) = &lift.coeffs else {
            panic!()
        };
        // X^0: g/(κ-1)!; X^1: g'/12!
        let exp = d.to_qexp(10);
        assert_eq!(coeffs[0], exp.scale_rat(&factorial(11).recip()));
        assert_eq!(coeffs[1], exp.z_derive(1).scale_rat(&factorial(12).recip()));
        // weight below 1 is rejected
        let low = QuasiElement::zero(0);
        assert!(matches!(
            ck_lift_scalar(&low, 10, 2),
            Err(Error::WeightTooSmall { .. })
        ));
    }

    #[test]
    fn vhat_lift_small_cases() {
        // n = 0: the constant series (1)
        let l0 = ck_lift_vhat(0, 6, 3);
        let JLCoeffs::Vector(c0) = &l0.coeffs else {
            panic!()
        };
        assert!(c0[0].components[0].is_z_free());
        assert!(c0[1].is_zero());

        // n = 1: (z,1) - (1,0)·X
        let l1 = ck_lift_vhat(1, 6, 4);
        let JLCoeffs::Vector(c1) = &l1.coeffs else {
            panic!()
        };
        assert_eq!(c1[0], v_hat(1, 6));
        let one = QSeries::one(rat_int(6));
        let expected = VVForm::new(
            1,
            vec![ZPoly::from_series(one.neg()), ZPoly::zero(rat_int(6))],
        );
        assert_eq!(c1[1], expected);
        assert!(c1[2].is_zero());

        // n = 2: coefficients (2, -1, 1) on (v̂_2, v̂_2', v̂_2'')
        let l2 = ck_lift_vhat(2, 6, 5);
        let JLCoeffs::Vector(c2) = &l2.coeffs else {
            panic!()
        };
        assert_eq!(c2[0], v_hat(2, 6).scale_rat(&rat_int(2)));
        assert_eq!(c2[1], v_hat(2, 6).z_derive().scale_rat(&rat_int(-1)));
        assert_eq!(c2[2], v_hat(2, 6).z_derive_n(2).scale_rat(&rat_frac(1, 2)));
        assert!(c2[3].is_zero() && c2[4].is_zero());
    }

    #[test]
    fn multiply_by_constant_one_is_identity() {
        let one = JLSeries {
            weight: 0,
            x_order: 5,
            coeffs: JLCoeffs::Scalar(
                (0..5)
                    .map(|j| {
                        if j == 0 {
                            QSeries::one(rat_int(8))
                        } else {
                            QSeries::zero(rat_int(8))
                        }
                    })
                    .collect(),
            ),
            rep_power: None,
        };
        let v = ck_lift_vhat(2, 8, 5);
        let p = jl_multiply(&one, &v, false).unwrap();
        assert_eq!(p.coeffs, v.coeffs);
        assert_eq!(p.weight, v.weight);
    }

    #[test]
    fn polynomial_product_pattern() {
        // (1 + X)·(1 - X) = 1 - X² on rank-1 vectors
        let order = rat_int(6);
        let one = QSeries::one(order.clone());
        let a = JLSeries {
            weight: 0,
            x_order: 4,
            coeffs: JLCoeffs::Scalar(vec![
                one.clone(),
                one.clone(),
                QSeries::zero(order.clone()),
                QSeries::zero(order.clone()),
            ]),
            rep_power: None,
        };
        let b = JLSeries {
            weight: 0,
            x_order: 4,
            coeffs: JLCoeffs::Vector(vec![
                VVForm::new(0, vec![ZPoly::from_series(one.clone())]),
                VVForm::new(2, vec![ZPoly::from_series(one.neg())]),
                VVForm::zero(4, 1, order.clone()),
                VVForm::zero(6, 1, order.clone()),
            ]),
            rep_power: Some(0),
        };
        let p = jl_multiply(&a, &b, false).unwrap();
        let JLCoeffs::Vector(c) = &p.coeffs else {
            panic!()
        };
        assert!(c[0].components[0].coeff(0).eq_below(&one, &rat_int(6)));
        assert!(c[1].is_zero());
        assert!(c[2].components[0]
            .coeff(0)
            .eq_below(&one.neg(), &rat_int(6)));
    }

    #[test]
    fn lifted_product_coefficients_match_closed_form() {
        // the X^j coefficient of g̃(z,-X)·Φ(z,X) must equal
        // Σ_r (-1)^j (n-j+r)! g^{(r)} v̂^{(j-r)} / (r! (j-r)! (r+κ-1)!)
        let n = 2usize;
        let kappa = 12i64;
        let g = QuasiElement::delta_element();
        let q_order = 10;
        let lift_g = ck_lift_scalar(&g, q_order, n + 3).unwrap();
        let lift_v = ck_lift_vhat(n, q_order, n + 3);
        let prod = jl_multiply(&lift_g, &lift_v, true).unwrap();
        let JLCoeffs::Vector(pc) = &prod.coeffs else {
            panic!()
        };

        let gexp = g.to_qexp(q_order);
        let vh = v_hat(n, q_order);
        for j in 0..=n {
            let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
            let mut expect =
                VVForm::zero(kappa - 2 * n as i64 + 2 * j as i64, n + 1, rat_int(q_order));
            for r in 0..=j {
                let c = &sign * factorial((n - j + r) as u64)
                    / (factorial(r as u64)
                        * factorial((j - r) as u64)
                        * factorial((r as i64 + kappa - 1) as u64));
                let term = vh
                    .z_derive_n((j - r) as u32)
                    .mul_series(&gexp.z_derive(r as u32))
                    .scale_rat(&c);
                expect = expect.add(&term).unwrap();
            }
            assert!(pc[j].eq_below(&expect, &rat_int(q_order)), "X^{j} mismatch");
        }
    }

    #[test]
    fn vhat_lift_satisfies_jacobi_like_law_through_xn() {
        // the finite lifting obeys the exponential-cocycle law through X^n
        // (and no further: the series stops while e^{KX} does not)
        for n in 0..=3usize {
            let lift = ck_lift_vhat(n, 10, n + 2);
            for g in sample_gammas() {
                for z in sample_points() {
                    let r = verify_jl_transform(&lift, &g, z, n + 1).unwrap();
                    assert!(r < 1e-9, "n={n} residual {r}");
                }
            }
        }
    }

    #[test]
    fn scalar_lift_satisfies_jacobi_like_law() {
        let d = QuasiElement::delta_element();
        let lift = ck_lift_scalar(&d, 40, 6).unwrap();
        let s = GroupElt::s();
        let z = Complex64::new(0.0, 1.0);
        let r = verify_jl_scalar_transform(&lift, &s, z, 6).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn derivative_slash_identity_for_vhat() {
        // (D^ν v̂_n)|_{-n+2ν} γ = Σ_ℓ (-1)^{ν-ℓ} ν! (n-ℓ)! / (ℓ!(ν-ℓ)!(n-ν)!)
        //                        · K^{ν-ℓ} D^ℓ(ρ_n(γ) v̂_n)(z)
        for n in 1..=3usize {
            for nu in 0..=n.min(3) {
                for g in sample_gammas() {
                    for z in sample_points() {
                        let vh = v_hat(n, 8);
                        let gz = g.moebius(z).unwrap();
                        let j = g.j_cocycle(z).unwrap();
                        let kk = g.k_cocycle(z).unwrap();
                        let dnu = vh.z_derive_n(nu as u32);
                        let lhs: Vec<Complex64> = dnu
                            .eval(gz)
                            .unwrap()
                            .iter()
                            .map(|v| v * j.powi(-(-(n as i32) + 2 * nu as i32)))
                            .collect();
                        let rho = sym_rep(&g, n).to_complex();
                        let mut rhs = vec![Complex64::new(0.0, 0.0); n + 1];
                        for ell in 0..=nu {
                            let c = factorial(nu as u64) * factorial((n - ell) as u64)
                                / (factorial(ell as u64)
                                    * factorial((nu - ell) as u64)
                                    * factorial((n - nu) as u64));
                            let sign = if (nu - ell) % 2 == 0 { 1.0 } else { -1.0 };
                            let cf = sign * c.to_f64().unwrap();
                            // D^ℓ(ρ(γ) v̂)(z) = ρ(γ)·(D^ℓ v̂)(z)
                            let dv = vh.z_derive_n(ell as u32).eval(z).unwrap();
                            for (i, row) in rho.iter().enumerate() {
                                let mut dot = Complex64::new(0.0, 0.0);
                                for (s, v) in dv.iter().enumerate() {
                                    dot += row[s] * v;
                                }
                                rhs[i] += cf * kk.powi((nu - ell) as i32) * dot;
                            }
                        }
                        for (l, r) in lhs.iter().zip(&rhs) {
                            assert!(
                                (l - r).norm() < 1e-9 * r.norm().max(1.0),
                                "n={n} ν={nu} γ={g}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn product_coefficients_carry_shifted_weights() {
        // the X^j coefficient of a weight-λ product behaves like a
        // vector-valued form of weight λ + 2j (checked numerically, j <= n)
        use crate::symtensor::{verify_vv_transform, RepKind};
        let n = 2usize;
        let g = QuasiElement::delta_element();
        let q_order = 30;
        let prod = jl_multiply(
            &ck_lift_scalar(&g, q_order, n + 2).unwrap(),
            &ck_lift_vhat(n, q_order, n + 2),
            true,
        )
        .unwrap();
        let JLCoeffs::Vector(coeffs) = &prod.coeffs else {
            panic!()
        };
        for j in 0..=n {
            let mut f = coeffs[j].clone();
            f.weight = prod.weight + 2 * j as i64;
            for gamma in sample_gammas() {
                for z in sample_points() {
                    let rep = verify_vv_transform(&f, &gamma, z, 1e-8, RepKind::SymPower).unwrap();
                    assert!(rep.pass(), "X^{j} residual {}", rep.max_residual());
                }
            }
        }
    }

    #[test]
    fn coefficient_extraction_bounds() {
        let lift = ck_lift_vhat(1, 6, 3);
        assert!(lift.coefficient(2).is_ok());
        assert!(matches!(
            lift.coefficient(3),
            Err(Error::IndexOutOfRange { .. })
        ));
        let (_, w) = lift.coefficient(2).unwrap();
        assert_eq!(w, -1 + 4);
    }
}
