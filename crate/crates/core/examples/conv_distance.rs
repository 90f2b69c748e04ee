//! Distances from a point to convex hulls of step functions, with dual
//! witnesses, and the monotone profile of `Daug_n` upper estimates.

use daugavet::analysis::{conv_distance, daug_profile, hull_witness, ConvOrder, LPlusQuery};
use daugavet::measure::StepFunction;
use daugavet::rational::{int, q, zero};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let pool: Vec<StepFunction> = (1..=4)
        .map(|c| StepFunction::interval(c, zero(), q(1, 8), int(8)))
        .collect::<Result<_, _>>()?;
    let y = StepFunction::one();

    for order in [ConvOrder::AtMost(1), ConvOrder::AtMost(2), ConvOrder::All] {
        let d = conv_distance(&y, &pool, order)?;
        println!("{order:?}: distance in [{}, {}] after {} programs", d.lower, d.upper, d.programs);
    }

    let zs: Vec<&StepFunction> = pool.iter().collect();
    let w = hull_witness(&y, &zs)?;
    println!("dual witness proves distance ≥ {} (certifies: {})", w.value, w.certifies(&y, &zs)?);

    let query = LPlusQuery::new(StepFunction::one().neg(), q(1, 4))?;
    let pools: Vec<(usize, Vec<StepFunction>)> = [1, 2, 4].iter().map(|&n| (n, pool.clone())).collect();
    for (n, d) in daug_profile(&query, &y, &pools)? {
        println!("n = {n}: upper estimate {}", d.upper);
    }
    Ok(())
}
