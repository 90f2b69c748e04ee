//! `‖f + g‖ ≥ ‖f‖ + ‖g‖ − ε` when `f` is small in measure: a certified
//! uniform-integrability radius and an exact check.

use daugavet::measure::{check_orthogonality, ui_delta, StepFunction};
use daugavet::rational::{int, one, q, zero};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let g = StepFunction::on_coordinate(1, vec![zero(), q(1, 2), one()], vec![int(1), int(-1)])?;
    let eps = q(1, 4);
    let delta = ui_delta(std::slice::from_ref(&g), &eps)?;
    println!("certified δ for g at ε = {eps}: {delta}");

    // Tall but concentrated on mass δ/2: Ky Fan distance to 0 below δ.
    let f = StepFunction::interval(3, zero(), &delta / int(2), int(-40))?;
    let check = check_orthogonality(&f, &g, &eps, &delta)?;
    println!(
        "{}: ‖f+g‖ = {} vs ‖f‖ + ‖g‖ − ε = {} (slack {})",
        check.status,
        check.norm_sum,
        &check.norm_f + &check.norm_g - &eps,
        check.slack
    );

    // Not small in measure: the hypothesis fails, and the check says so.
    let wide = StepFunction::interval(3, zero(), q(1, 2), int(-2))?;
    println!("wide f: {}", check_orthogonality(&wide, &g, &eps, &delta)?.status);
    Ok(())
}
