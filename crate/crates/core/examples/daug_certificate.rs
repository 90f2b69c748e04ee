//! Produces and independently re-checks the certificate that
//! `dist(conv₂ l⁺(−1, 1/4), 1) ≥ 1/2` on a finite stage.

use daugavet::analysis::{daug_lower_certificate, verify_certificate, DaugCertificate};
use daugavet::construction::{build_tower, TowerParams};
use daugavet::rational::q;
use std::error::Error;

fn main() -> Result<(), Box<dyn Error>> {
    let params = TowerParams {
        eps1: q(1, 50),
        family_size: Some(2),
        ..TowerParams::default()
    };
    let tower = build_tower(&params)?;
    let cert = daug_lower_certificate(&tower, 2)?;
    println!(
        "{} candidates, {} members, {} audited combinations, {} hull witnesses; passed: {}",
        cert.candidates.len(),
        cert.candidates.iter().filter(|c| c.member).count(),
        cert.combinations.len(),
        cert.hulls.len(),
        cert.passed
    );
    println!("smallest hull distance certified: {}", cert.hull_minimum);

    let reparsed = DaugCertificate::from_json(&cert.to_json())?;
    println!("re-verified from JSON: {}", verify_certificate(&reparsed).passed());

    // The order-3 certificate needs ε₁ ≤ 1/75 and is refused here.
    println!("n = 3: {}", daug_lower_certificate(&tower, 3).unwrap_err());
    Ok(())
}
