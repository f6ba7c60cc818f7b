// Bohr–Sommerfeld counting at the computed levels and its inverse.

use wmorse::analysis::{wkb_count, wkb_invert};
use wmorse::morse_ref::PotentialParams;
use wmorse::spectrum::compute_spectrum;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, 0.0)?;
    let levels = compute_spectrum(&params, 21)?;
    for l in levels.iter().step_by(5) {
        let nu = l.order.value;
        println!(
            "n={:2} nu={nu:.8} count {:.6}  inverted nu {:.8}",
            l.index,
            wkb_count(&params, nu)?,
            wkb_invert(&params, l.index)?
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
