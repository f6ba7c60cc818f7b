// Zeros of the even and odd matching conditions on the imaginary order
// axis and their interlacing.

use wmorse::analysis::{interlacing_check, ZeroSequences};
use wmorse::morse_ref::PotentialParams;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (g, k) in [(1.0, -0.5), (1.0, 3.0)] {
        let params = PotentialParams::new(g, k)?;
        let zeros = ZeroSequences::compute(&params, 5)?;
        println!("g={g} k={k}: lambda {:.6?}", zeros.lambdas);
        println!("           eta    {:.6?}", zeros.etas);
        let report = interlacing_check(&zeros, params.rho0());
        match report.violation {
            None => println!("           interlaced above x/2 = {}", params.g),
            Some(v) => println!("           violated at {}: {}", v.position, v.detail),
        }
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
