//! JSON formats for the series types.  Rationals travel as decimal strings
//! "p/q" (or "p") so nothing is lost; exponents are split into a shared
//! denominator and integer numerators.
//!
//! Series: `{"den": d, "order": "num/den", "coeffs": [["exp_num",
//! [["pi_power", "p/q"], ...]], ...]}`.
//!
//! Two-variable series add weight/index and use rows
//! `[["q_exp", [["zeta_pow", "p/q"], ...]], ...]` keyed by the exponent
//! written as "p/q".

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jacobi::JacSeries;
use crate::pi::{PiPoly, Rat};
use crate::qseries::QSeries;

fn rat_to_string(r: &Rat) -> String {
    r.to_string()
}

fn rat_from_string(s: &str) -> Result<Rat> {
    BigRational::from_str(s).map_err(|e| Error::Json(format!("bad rational {s:?}: {e}")))
}

#[derive(Serialize, Deserialize)]
pub struct QSeriesJson {
    pub den: u32,
    pub order: String,
    pub coeffs: Vec<(String, Vec<(String, String)>)>,
}

pub fn qseries_to_json(s: &QSeries) -> QSeriesJson {
    let coeffs = s
        .terms()
        .map(|(k, c)| {
            let pi_terms = c
                .terms()
                .map(|(p, v)| (p.to_string(), rat_to_string(v)))
                .collect();
            (k.to_string(), pi_terms)
        })
        .collect();
    QSeriesJson {
        den: s.den(),
        order: rat_to_string(s.order()),
        coeffs,
    }
}

pub fn qseries_from_json(j: &QSeriesJson) -> Result<QSeries> {
    if j.den == 0 || 24 % j.den != 0 {
        return Err(Error::Json(format!(
            "denominator {} does not divide 24",
            j.den
        )));
    }
    let order = rat_from_string(&j.order)?;
    let mut s = QSeries::zero(order);
    for (exp, pi_terms) in &j.coeffs {
        let num: i64 = exp
            .parse()
            .map_err(|_| Error::Json(format!("bad exponent numerator {exp:?}")))?;
        if num < 0 {
            return Err(Error::Json("negative exponents are out of scope".into()));
        }
        let mut c = PiPoly::zero();
        for (p, v) in pi_terms {
            let power: i32 = p
                .parse()
                .map_err(|_| Error::Json(format!("bad pi power {p:?}")))?;
            c = &c + &PiPoly::monomial(rat_from_string(v)?, power);
        }
        s.set_coeff(num, j.den, c);
    }
    Ok(s)
}

#[derive(Serialize, Deserialize)]
pub struct JacSeriesJson {
    pub weight: i64,
    pub index: i64,
    pub order: String,
    pub rows: Vec<(String, Vec<(String, String)>)>,
}

pub fn jacseries_to_json(s: &JacSeries) -> JacSeriesJson {
    let rows = s
        .rows()
        .map(|(e, row)| {
            let entries = row
                .iter()
                .map(|(z, c)| (z.to_string(), rat_to_string(c)))
                .collect();
            (rat_to_string(&e), entries)
        })
        .collect();
    JacSeriesJson {
        weight: s.weight,
        index: s.index,
        order: rat_to_string(s.order()),
        rows,
    }
}

pub fn jacseries_from_json(j: &JacSeriesJson) -> Result<JacSeries> {
    let order = rat_from_string(&j.order)?;
    let mut s = JacSeries::zero(j.weight, j.index, order);
    for (exp, entries) in &j.rows {
        let e = rat_from_string(exp)?;
        let num = num_traits::ToPrimitive::to_i64(e.numer())
            .ok_or_else(|| Error::Json("exponent out of range".into()))?;
        let den = num_traits::ToPrimitive::to_u32(e.denom())
            .ok_or_else(|| Error::Json("exponent denominator out of range".into()))?;
        if den == 0 || 24 % den != 0 {
            return Err(Error::Json(format!(
                "exponent denominator {den} does not divide 24"
            )));
        }
        if num < 0 {
            return Err(Error::Json("negative exponents are out of scope".into()));
        }
        for (z, c) in entries {
            let zeta: i64 = z
                .parse()
                .map_err(|_| Error::Json(format!("bad zeta power {z:?}")))?;
            s.set_coeff(num, den, zeta, rat_from_string(c)?);
        }
    }
    Ok(s)
}

#[derive(Serialize, Deserialize)]
pub struct QuasiElementJson {
    pub weight: i64,
    /// entries [[a, b, c], [["pi_power", "p/q"], ...]] for E2^a E4^b E6^c
    #[allow(clippy::type_complexity)]
    pub terms: Vec<((u32, u32, u32), Vec<(String, String)>)>,
}

pub fn quasielement_to_json(q: &crate::quasi::QuasiElement) -> QuasiElementJson {
    QuasiElementJson {
        weight: q.weight(),
        terms: q
            .terms()
            .map(|(m, c)| {
                (
                    *m,
                    c.terms()
                        .map(|(p, v)| (p.to_string(), rat_to_string(v)))
                        .collect(),
                )
            })
            .collect(),
    }
}

pub fn quasielement_from_json(j: &QuasiElementJson) -> Result<crate::quasi::QuasiElement> {
    let mut out = crate::quasi::QuasiElement::zero(j.weight);
    for (m, pi_terms) in &j.terms {
        let mut c = PiPoly::zero();
        for (p, v) in pi_terms {
            let power: i32 = p
                .parse()
                .map_err(|_| Error::Json(format!("bad pi power {p:?}")))?;
            c = &c + &PiPoly::monomial(rat_from_string(v)?, power);
        }
        let expected = 2 * m.0 as i64 + 4 * m.1 as i64 + 6 * m.2 as i64;
        if expected != j.weight {
            return Err(Error::Json(format!(
                "monomial {m:?} has weight {expected}, element claims {}",
                j.weight
            )));
        }
        out = out
            .add(&crate::quasi::QuasiElement::monomial(*m, c))
            .map_err(|e| Error::Json(e.to_string()))?;
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
pub struct PolynomialJson {
    /// "modular" or "quasi"
    pub kind: String,
    pub weight: i64,
    pub m: usize,
    pub coeffs: Vec<QuasiElementJson>,
}

pub fn quasi_polynomial_to_json(f: &crate::maps::QuasiPolynomial) -> PolynomialJson {
    PolynomialJson {
        kind: "quasi".into(),
        weight: f.weight,
        m: f.m,
        coeffs: f.coeffs.iter().map(quasielement_to_json).collect(),
    }
}

pub fn quasi_polynomial_from_json(j: &PolynomialJson) -> Result<crate::maps::QuasiPolynomial> {
    if j.kind != "quasi" {
        return Err(Error::Json(format!(
            "expected kind \"quasi\", got {:?}",
            j.kind
        )));
    }
    let coeffs: Result<Vec<_>> = j.coeffs.iter().map(quasielement_from_json).collect();
    crate::maps::QuasiPolynomial::new(j.m, j.weight, coeffs?)
}

pub fn mod_polynomial_to_json(f: &crate::maps::ModPolynomial) -> PolynomialJson {
    PolynomialJson {
        kind: "modular".into(),
        weight: f.weight,
        m: f.m,
        coeffs: f.coeffs.iter().map(quasielement_to_json).collect(),
    }
}

pub fn mod_polynomial_from_json(j: &PolynomialJson) -> Result<crate::maps::ModPolynomial> {
    if j.kind != "modular" {
        return Err(Error::Json(format!(
            "expected kind \"modular\", got {:?}",
            j.kind
        )));
    }
    let coeffs: Result<Vec<_>> = j.coeffs.iter().map(quasielement_from_json).collect();
    crate::maps::ModPolynomial::new(j.m, j.weight, coeffs?)
}

#[derive(Serialize, Deserialize)]
pub struct VVFormJson {
    pub weight: i64,
    /// components[i][d] is the Z^d coefficient of component i
    pub components: Vec<Vec<QSeriesJson>>,
}

pub fn vvform_to_json(f: &crate::symtensor::VVForm) -> VVFormJson {
    VVFormJson {
        weight: f.weight,
        components: f
            .components
            .iter()
            .map(|c| c.coeffs().iter().map(qseries_to_json).collect())
            .collect(),
    }
}

pub fn vvform_from_json(j: &VVFormJson) -> Result<crate::symtensor::VVForm> {
    if j.components.is_empty() {
        return Err(Error::Json("a vector-valued form needs components".into()));
    }
    let mut components = Vec::with_capacity(j.components.len());
    for comp in &j.components {
        if comp.is_empty() {
            return Err(Error::Json("empty component".into()));
        }
        let coeffs: Result<Vec<QSeries>> = comp.iter().map(qseries_from_json).collect();
        components.push(crate::zpoly::ZPoly::from_coeffs(coeffs?));
    }
    Ok(crate::symtensor::VVForm::new(j.weight, components))
}

pub fn qseries_to_string(s: &QSeries) -> String {
    serde_json::to_string_pretty(&qseries_to_json(s)).expect("serialization cannot fail")
}

pub fn qseries_from_str(text: &str) -> Result<QSeries> {
    let j: QSeriesJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    qseries_from_json(&j)
}

pub fn jacseries_to_string(s: &JacSeries) -> String {
    serde_json::to_string_pretty(&jacseries_to_json(s)).expect("serialization cannot fail")
}

pub fn jacseries_from_str(text: &str) -> Result<JacSeries> {
    let j: JacSeriesJson = serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
    jacseries_from_json(&j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pi::rat_int;
    use crate::quasi;

    #[test]
    fn qseries_roundtrip_is_identity() {
        let s = quasi::eta(10).unwrap().z_derive(2);
        let text = qseries_to_string(&s);
        let back = qseries_from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn jacseries_roundtrip_is_identity() {
        let s = crate::jacobi::phi_tilde(0, 6).unwrap();
        let text = jacseries_to_string(&s);
        let back = jacseries_from_str(&text).unwrap();
        assert_eq!(s, back);
        assert_eq!(back.weight, 0);
        assert_eq!(back.index, 1);
    }

    #[test]
    fn rationals_survive_as_strings() {
        let mut s = QSeries::zero(rat_int(3));
        s.set_coeff(1, 24, PiPoly::monomial(Rat::new(1.into(), 3.into()), -2));
        let text = qseries_to_string(&s);
        assert!(text.contains("1/3"));
        assert!(text.contains("-2"));
        let back = qseries_from_str(&text).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(qseries_from_str("{").is_err());
        let j = QSeriesJson {
            den: 5,
            order: "3".into(),
            coeffs: vec![],
        };
        assert!(qseries_from_json(&j).is_err());
    }
}
