//! Compresses random elements of the top stage's unit ball into the first
//! stage, within `ε₁` in the Ky Fan metric.

use daugavet::construction::{build_tower, compress, sample_ball, TowerParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let tower = build_tower(&TowerParams::default())?;
    let top = tower.top();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..5 {
        let a = sample_ball(&top.space, &mut rng, 12);
        let c = compress(&tower, &a, top.index, 1)?;
        println!(
            "sample {i}: d(φ, g) = {} < {} : {}  (‖g‖ = {}, chain bound {})",
            c.distance,
            c.target,
            c.holds(),
            c.result_norm,
            c.chain_bound
        );
    }
    Ok(())
}
