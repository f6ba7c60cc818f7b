// Crum deletion of the two lowest levels: the deformed potential keeps
// every other level, and the deformed states have parity (−1)^{n+L}.

use wmorse::morse_ref::PotentialParams;
use wmorse::sampled::centered_grid;
use wmorse::spectrum::{compute_spectrum, Eigenstate};
use wmorse::transforms::{Deformation, DeletionSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, -0.5)?;
    let spectrum = compute_spectrum(&params, 6)?;
    let d = Deformation::new(&params, DeletionSet::crum(2)?, &spectrum)?;
    let v = d.potential(centered_grid(2.0, 9)?)?;
    for (x, val) in v.grid.iter().zip(&v.values) {
        println!("V[2]({x:+.2}) = {val:+.8}");
    }
    println!("asymptotic k - L = {}", d.asymptotic_k());
    for level in &spectrum[2..5] {
        let state = Eigenstate::new(&params, *level)?;
        let norm = d.norm_squared(&state)?;
        println!(
            "n={} E={:.8} parity {:+} norm {:.10} product {:.10}",
            level.index,
            level.energy,
            d.parity_sign(level.index),
            norm,
            d.norm_factor(level.energy)
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
