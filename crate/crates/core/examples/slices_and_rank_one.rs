//! Diametral points in slices and the rank-one defect `1 + ‖T‖ − ‖Id + T‖`.

use daugavet::analysis::{rank_one_defect, slice_search, LPlusQuery, SliceSpec};
use daugavet::construction::{build_tower, TowerParams};
use daugavet::measure::StepFunction;
use daugavet::rational::{q, zero};
use daugavet::subspace::{SphereNet, DEFAULT_LATTICE_CAP};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let tower = build_tower(&TowerParams::default())?;
    let e1 = &tower.stage(1).space;
    let e2 = &tower.stage(2).space;
    let bush: Vec<StepFunction> = tower.bush_vectors().into_iter().map(|(_, v)| v.clone()).collect();

    // A slice of B(E₂) cut by a bush vector, searched for l⁺(1, 3/4) members.
    let query = LPlusQuery::new(StepFunction::one(), q(3, 4))?;
    let slice = SliceSpec { weight: bush[0].clone(), alpha: zero() };
    let found = slice_search(e2, &slice, &query, &SphereNet::empty(e2.dim()), &bush)?;
    match &found.found {
        Some(hit) => println!("slice member with ‖x + y‖ − (2 − ε) = {}", hit.margin),
        None => println!("no member found among {} candidates", found.searched),
    }

    let d = rank_one_defect(e1, &StepFunction::one(), &StepFunction::one(), &q(1, 4), DEFAULT_LATTICE_CAP)?;
    println!("on span{{1}}: ‖T‖ = {}, ‖Id + T‖ ≥ {}, defect {}", d.t_norm, d.lower, d.defect);
    Ok(())
}
