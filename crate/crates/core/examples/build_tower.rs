//! Builds the default two-stage tower and writes its manifest, bases and
//! nets to a temporary directory.

use daugavet::construction::{build_tower, write_tower, TowerParams};
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let tower = build_tower(&TowerParams::default())?;
    for s in &tower.stages {
        print!("stage {}: ε = {}, dim = {}", s.index, s.eps, s.space.dim());
        if let Some(step) = &s.step {
            print!(
                "; step: δ = {}, n = {}, families on {:?}, worst sphere bound {}",
                step.delta,
                step.n,
                step.coords,
                step.sphere_bounds.iter().flatten().map(|b| &b.bound).min().unwrap()
            );
        }
        println!();
    }
    let dir = std::env::temp_dir().join("daugavet-tower");
    let manifest = write_tower(&tower, &dir)?;
    println!("wrote {} stages to {}", manifest.stages.len(), dir.display());
    Ok(())
}
