//! One rank-4 form pushed through every correspondence in sequence: build a
//! mixed sum at weight 17 over symmetric power 3, recover its constituents,
//! convert to a quasimodular polynomial and back, pass through the modular
//! polynomial side, and land in the weak Jacobi ring, checking exactness at
//! each joint and the numeric laws at the ends.
//!
//! Exact identities hold coefficient-by-coefficient at any order, so the
//! algebra runs at a small order; the numeric law checks rerun the two end
//! objects at higher order, because weight-20 coefficients grow like n^19
//! and evaluation tails at the lowest sampled imaginary part need the
//! extra terms.

use num_complex::Complex64;
use symforms::group::{sample_gammas, sample_points};
use symforms::jacobi::{p_map, psi_map, verify_jacobi_transform};
use symforms::maps::{
    decompose, lambda_map, q_inverse, q_map, u_inverse, u_map, v_map, xi_map,
};
use symforms::pi::{rat_frac, rat_int};
use symforms::quasi::{basis_mk, QuasiElement};
use symforms::symtensor::{verify_vv_transform, RepKind, VVForm};

const K: i64 = 17;
const N: usize = 3;

/// Mixed coefficients over the slot bases: weights 14, 16, 18, 20.
fn constituents() -> Vec<QuasiElement> {
    (0..=N)
        .map(|ell| {
            let w = K - N as i64 + 2 * ell as i64;
            let mut acc = QuasiElement::zero(w);
            for (i, b) in basis_mk(w).elements().iter().enumerate() {
                let c = rat_frac(2 * i as i64 + 1, (ell + 1) as i64);
                acc = acc.add(&b.scale_rat(&c)).unwrap();
            }
            acc
        })
        .collect()
}

fn build_sum(g: &[QuasiElement], order: i64) -> VVForm {
    let mut f = VVForm::zero(K, N + 1, rat_int(order));
    for (ell, part) in g.iter().enumerate() {
        f = f.add(&v_map(part, K, N, ell, order).unwrap()).unwrap();
    }
    f
}

#[test]
fn rank_four_chain_exact_joints() {
    let order = 14;
    let g = constituents();
    let f = build_sum(&g, order);

    // decomposition recovers every slot exactly
    let parts = decompose(&f, K, N).unwrap();
    assert_eq!(parts, g);

    // over to the polynomial side and back
    let poly = u_inverse(&f, N, false).unwrap();
    assert_eq!(poly.weight, K + N as i64);
    let back = u_map(&poly, N, order, false).unwrap();
    assert!(back.eq_below(&f, &rat_int(order)));

    // through the modular-polynomial equivalence and back
    let lam = K + N as i64;
    let mp = xi_map(&poly, N, lam).unwrap();
    for (r, c) in mp.coeffs.iter().enumerate() {
        assert!(c.is_modular(), "slot {r}");
    }
    let again = lambda_map(&mp, N, lam).unwrap();
    assert_eq!(again, poly);

    // the constant coefficient round-trips through the substitution map
    let f0 = q_inverse(&poly);
    let re_poly = q_map(&f0, N).unwrap();
    assert_eq!(re_poly, poly);

    // into the weak Jacobi ring, both routes agreeing
    let jac = psi_map(&f, N, K, order).unwrap();
    assert_eq!(jac.weight, K - N as i64);
    assert_eq!(jac.index, N as i64);
    let direct = p_map(&g, N, K, order).unwrap();
    assert_eq!(jac, direct);
    assert!(jac.is_zeta_symmetric());
    assert!(jac.support_violations().is_empty());
}

#[test]
fn rank_four_chain_numeric_laws() {
    let g = constituents();

    let f = build_sum(&g, 40);
    for gamma in sample_gammas() {
        for z in sample_points() {
            let rep = verify_vv_transform(&f, &gamma, z, 1e-8, RepKind::SymPower).unwrap();
            assert!(rep.pass(), "residual {}", rep.max_residual());
        }
    }

    let jac = p_map(&g, N, K, 30).unwrap();
    let w_point = Complex64::new(0.17, 0.09);
    for gamma in sample_gammas() {
        for z in sample_points() {
            let rep = verify_jacobi_transform(&jac, &gamma, z, w_point, 1e-6).unwrap();
            assert!(rep.pass(), "jacobi residual {}", rep.max_residual());
        }
    }
}

#[test]
fn quasimodular_polynomial_of_the_chain_passes_the_action_law() {
    let order = 30;
    let g = basis_mk(14).elements()[0].clone();
    let f = v_map(&g, K, N, 0, order).unwrap();
    let poly = u_inverse(&f, N, false).unwrap();
    let residuals = symforms::maps::quasi_polynomial_action_residuals(
        &poly,
        &sample_gammas(),
        &sample_points(),
        order,
    )
    .unwrap();
    for r in residuals {
        assert!(r <= 1e-8, "residual {r}");
    }
}
