//! Named constants addressable from the command line.

use symforms::error::{Error, Result};
use symforms::jacobi::{jacobi_eisenstein, phi_tilde, JacSeries};
use symforms::qseries::QSeries;
use symforms::quasi::{self, QuasiElement};
use symforms::symtensor::{u_hat, v_hat, VVForm};
use symforms::zpoly::ZPoly;

/// Anything `expand` can produce.
pub enum Expanded {
    Scalar(QSeries),
    Jacobi(JacSeries),
    Vector(VVForm),
}

/// Names: E2, E4, E6, delta, eta, phi-2,1, phi0,1, E4,1, E6,1, vhat(n), uhat(n).
pub fn expand_name(name: &str, order: i64) -> Result<Expanded> {
    match name {
        "E2" => Ok(Expanded::Scalar(quasi::eisenstein(2, order)?)),
        "E4" => Ok(Expanded::Scalar(quasi::eisenstein(4, order)?)),
        "E6" => Ok(Expanded::Scalar(quasi::eisenstein(6, order)?)),
        "delta" => Ok(Expanded::Scalar(quasi::delta(order)?)),
        "eta" => Ok(Expanded::Scalar(quasi::eta(order)?)),
        "phi-2,1" => Ok(Expanded::Jacobi(phi_tilde(-2, order)?)),
        "phi0,1" => Ok(Expanded::Jacobi(phi_tilde(0, order)?)),
        "E4,1" => Ok(Expanded::Jacobi(jacobi_eisenstein(4, order)?)),
        "E6,1" => Ok(Expanded::Jacobi(jacobi_eisenstein(6, order)?)),
        other => {
            if let Some(n) = parse_indexed(other, "vhat") {
                return Ok(Expanded::Vector(v_hat(n, order)));
            }
            if let Some(n) = parse_indexed(other, "uhat") {
                return Ok(Expanded::Vector(u_hat(n, order)));
            }
            Err(Error::UnknownName(other.to_string()))
        }
    }
}

/// "vhat(3)" -> 3; symmetric powers are capped at desk scale.
pub fn parse_indexed(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    inner.parse().ok().filter(|n| *n <= 24)
}

/// Scalar q-expansions usable as bracket/lift operands.
pub fn scalar_operand(name: &str, order: i64) -> Result<QSeries> {
    match expand_name(name, order)? {
        Expanded::Scalar(s) => Ok(s),
        _ => Err(Error::InvalidArgument(format!(
            "{name} is not a scalar q-expansion"
        ))),
    }
}

/// Symbolic ring elements usable where exact weights matter.
pub fn quasi_operand(name: &str) -> Result<QuasiElement> {
    match name {
        "E2" => Ok(QuasiElement::e2()),
        "E4" => Ok(QuasiElement::e4()),
        "E6" => Ok(QuasiElement::e6()),
        "delta" => Ok(QuasiElement::delta_element()),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// Vector-valued operands: vhat(n), uhat(n), or a scalar name embedded as a
/// rank-1 vector of its weight.
pub fn vector_operand(name: &str, order: i64) -> Result<(VVForm, i64)> {
    if let Some(n) = parse_indexed(name, "vhat") {
        return Ok((v_hat(n, order), -(n as i64)));
    }
    if let Some(n) = parse_indexed(name, "uhat") {
        return Ok((u_hat(n, order), -(n as i64)));
    }
    let q = quasi_operand(name)?;
    let w = q.weight();
    Ok((
        VVForm::new(w, vec![ZPoly::from_series(q.to_qexp(order))]),
        w,
    ))
}

/// The showcase vector-valued form: the weight-14, rank-3 image of Δ.
pub fn v_delta(order: i64) -> VVForm {
    symforms::maps::v_map(&QuasiElement::delta_element(), 14, 2, 0, order)
        .expect("the showcase image exists")
}
