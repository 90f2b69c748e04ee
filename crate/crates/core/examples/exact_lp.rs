//! The exact simplex solver: rational optima re-checked against a dual
//! certificate before they are returned.

use daugavet::lp::{Bound, LinearProgram, Relation, Sense};
use daugavet::rational::{int, q};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    // maximise x + y subject to x + 2y ≤ 4, 3x + y ≤ 6, x, y ≥ 0.
    let mut lp = LinearProgram::new(Sense::Maximize, vec![int(1), int(1)], vec![Bound::NonNegative; 2]);
    lp.constrain(vec![(0, int(1)), (1, int(2))], Relation::Le, int(4));
    lp.constrain(vec![(0, int(3)), (1, int(1))], Relation::Le, int(6));
    let sol = lp.solve()?;
    println!("optimum {} at x = {}, y = {} after {} pivots", sol.objective, sol.x[0], sol.x[1], sol.pivots);
    assert_eq!(sol.objective, q(14, 5));

    lp.constrain(vec![(0, int(1))], Relation::Ge, int(3));
    println!("with x ≥ 3: {}", lp.solve().unwrap_err());
    Ok(())
}
