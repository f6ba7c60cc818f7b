// Independent finite-difference spectrum of the symmetric potential from
// its Neumann and Dirichlet half-line problems.

use wmorse::morse_ref::PotentialParams;
use wmorse::spectrum::compute_spectrum;
use wmorse::verify::{oracle_spectrum, FD_POINTS};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(0.5, 1.5)?;
    let levels = compute_spectrum(&params, 6)?;
    let fd = oracle_spectrum(&params, levels[5].energy, 6, FD_POINTS)?;
    for (l, e) in levels.iter().zip(&fd) {
        println!("m={}: Whittaker {:+.10}  oracle {e:+.10}", l.index, l.energy);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
