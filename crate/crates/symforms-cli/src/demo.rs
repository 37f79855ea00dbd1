//! End-to-end walkthrough on the discriminant form: bracket the weight-12
//! cusp form against the standard vector, read off frame coordinates, invert
//! to a quasimodular polynomial, and assert the expected coefficients
//! exactly.  Returns Ok(false) when an assertion fails (exit code 1).

use symforms::error::Result;
use symforms::maps::{u_inverse, v_map, QuasiPolynomial};
use symforms::pi::{rat_frac, rat_int};
use symforms::quasi::QuasiElement;
use symforms::symtensor::frame_coords;

pub fn run(order: i64, perturb: bool) -> Result<bool> {
    let d = QuasiElement::delta_element();
    println!("input: the weight-12 cusp form as a ring element (q-order {order})");

    let mut image = v_map(&d, 14, 2, 0, order)?;
    println!("step 1: order-2 bracket against the standard vector of rank 3");
    println!("        -> vector-valued form of weight 14");

    if perturb {
        // negative control: damage one series coefficient and watch the
        // comparison catch it
        let mut comp0 = image.components[0].coeffs().to_vec();
        let mut c = comp0[0].clone();
        let bad = c.coeff_int(1).scale(&rat_int(2));
        c.set_coeff(1, 1, bad);
        comp0[0] = c;
        image.components[0] = symforms::zpoly::ZPoly::from_coeffs(comp0);
        println!("        (perturbation injected at q^1 for the negative control)");
    }

    let coords = frame_coords(&image)?;
    println!("step 2: frame coordinates (triangular change of frame)");
    let dexp = d.to_qexp(order);
    let expected_coords = [
        dexp.scale_rat(&rat_int(156)),
        dexp.z_derive(1).scale_rat(&rat_int(13)),
        dexp.z_derive(2),
    ];
    for (r, (got, want)) in coords.entries.iter().zip(&expected_coords).enumerate() {
        if let Some(e) = got.first_mismatch_below(want, &rat_int(order)) {
            println!("demo: FAIL -- frame coordinate {r} differs first at exponent {e}");
            return Ok(false);
        }
        println!("        coordinate {r}: as expected");
    }

    let poly = u_inverse(&image, 2, false)?;
    println!("step 3: inverted to a quasimodular polynomial of weight 16, degree 2");

    let expected = QuasiPolynomial::new(
        2,
        16,
        vec![
            d.z_derive(2).scale_rat(&rat_frac(1, 2)),
            d.z_derive(1).scale_rat(&rat_int(13)),
            d.scale_rat(&rat_int(78)),
        ],
    )?;
    for (r, (got, want)) in poly.coeffs.iter().zip(&expected.coeffs).enumerate() {
        let g = got.to_qexp(order);
        let w = want.to_qexp(order);
        if let Some(e) = g.first_mismatch_below(&w, &rat_int(order)) {
            println!("demo: FAIL -- X^{r} coefficient differs first at exponent {e}");
            return Ok(false);
        }
    }
    println!("step 4: coefficients match (1/2)·f'' + 13·f'·X + 78·f·X^2 exactly");
    println!("        (second derivative carries the square of the formal 2\u{03c0}i)");
    println!("demo: PASS");
    Ok(true)
}
