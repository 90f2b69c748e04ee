//! Step functions on `[0,1]^N`: exact norms, refinement, the Ky Fan metric
//! and the text format.

use daugavet::measure::text::{parse_step, write_step};
use daugavet::measure::{best_constant, ky_fan, tail_measure, worst_set_integral, StepFunction};
use daugavet::rational::{int, one, q, zero};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    // 8·χ[0, 1/8) on coordinate 1, and a two-valued function on coordinate 2.
    let spike = StepFunction::interval(1, zero(), q(1, 8), int(8))?;
    let g = StepFunction::on_coordinate(2, vec![zero(), q(1, 4), one()], vec![int(2), q(-1, 3)])?;

    let sum = spike.add(&g)?;
    println!("‖spike‖ = {}, ‖g‖ = {}, ‖spike + g‖ = {}", spike.norm_l1(), g.norm_l1(), sum.norm_l1());
    println!("sum lives on coordinates {:?} with {} cells", sum.grid().coords(), sum.grid().cell_count());

    let d = ky_fan(&spike, &StepFunction::zero())?;
    println!("d(spike, 0) = {d}; μ{{|spike| ≥ d}} = {}", tail_measure(&spike, &d));

    let best = best_constant(&g, None);
    println!("nearest constant to g: {} at distance {}", best.constant, best.distance);
    println!("worst-set integral of g over mass 1/8: {}", worst_set_integral(&g, &q(1, 8))?);

    let text = write_step(&sum);
    assert_eq!(parse_step(&text)?, sum);
    println!("text form:\n{text}");
    Ok(())
}
