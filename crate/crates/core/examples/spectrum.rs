// Bound states of the symmetric potential as zeros of the matching
// conditions; negative levels (real order) precede positive ones.

use wmorse::morse_ref::PotentialParams;
use wmorse::spectrum::{compute_spectrum, Eigenstate};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, 3.0)?;
    let levels = compute_spectrum(&params, 6)?;
    for l in &levels {
        println!(
            "m={} {:?} {:?} order {:.10} E = {:+.10} residual {:.1e}",
            l.index, l.parity, l.order.kind, l.order.value, l.energy, l.residual
        );
    }
    let state = Eigenstate::new(&params, levels[1])?;
    for x in [-1.0, 0.0, 0.5, 1.5] {
        let (psi, dpsi) = state.eval(x)?;
        println!("psi_1({x:+.1}) = {psi:+.8}, psi_1' = {dpsi:+.8}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
