//! Finite-dimensional subspaces of L₁: exact norms, norm-equivalence
//! constants, certified sphere nets and dual norms of functionals.

use daugavet::measure::StepFunction;
use daugavet::rational::{fmt_q, one, q, zero};
use daugavet::subspace::{build_net, functional_norm, norm_equivalence, Subspace, DEFAULT_LATTICE_CAP};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let plane = Subspace::new(vec![
        StepFunction::one(),
        StepFunction::interval(1, zero(), q(1, 4), one())?,
    ])?;
    println!("‖(1, −2)‖ = {}", plane.coeff_norm(&[one(), q(-2, 1)])?);

    let eq = norm_equivalence(&plane)?;
    println!("c_min = {}, c_max = {}", eq.c_min, eq.c_max);

    let net = build_net(&plane, &q(1, 4), DEFAULT_LATTICE_CAP)?;
    println!("certified {}-net of the sphere: {} points", net.mesh, net.len());

    let weight = StepFunction::interval(1, zero(), q(1, 2), one())?;
    let fnorm = functional_norm(&plane, &weight)?;
    let at: Vec<String> = fnorm.argmax.iter().map(fmt_q).collect();
    println!("sup over the ball of ∫u·χ[0,1/2) = {} at ({})", fnorm.value, at.join(", "));
    Ok(())
}
