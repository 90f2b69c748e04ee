//! The spike `(1/δ)·χ[0,δ)`, its law of large numbers and jointly
//! independent families on a single coordinate.

use daugavet::construction::{law_of_large_numbers_norm, make_spike, minimal_n, IndependentFamily, SpikeParams};
use daugavet::measure::{ky_fan_to_zero, StepFunction};
use daugavet::rational::{one, q};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let params = SpikeParams::new(q(1, 4), 1)?;
    let f = make_spike(&params);
    println!(
        "ε = 1/4: δ = {}, ‖f‖ = {}, ‖f − 1‖ = {}, d(f, 0) = {}",
        params.delta,
        f.norm_l1(),
        f.sub(&StepFunction::one())?.norm_l1(),
        ky_fan_to_zero(&f)
    );

    for n in [1, 2, 4, 8, 16, 32, 64] {
        println!("‖n⁻¹Σ f_j − 1‖ at δ = 1/2, n = {n:>2}: {}", law_of_large_numbers_norm(&q(1, 2), n));
    }
    println!("smallest n with value ≤ 3/8 at δ = 1/2: {}", minimal_n(&q(1, 2), &q(3, 8), 64)?);

    let fam = IndependentFamily::new(5, 3, q(1, 4))?;
    println!(
        "family of {} on coordinate {}: {} cells, jointly independent: {}",
        fam.n,
        fam.coordinate,
        fam.members[0].grid().cell_count(),
        fam.is_jointly_independent()
    );
    assert!(fam.members.iter().all(|m| m.norm_l1() == one()));
    Ok(())
}
