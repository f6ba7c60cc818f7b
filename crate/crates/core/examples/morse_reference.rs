// The full-line Morse potential: closed-form levels, shape invariance, and
// the finite-difference oracle reproducing them.

use wmorse::morse_ref::{morse_eigenvalues, morse_potential_fullline, shape_invariance_gap, PotentialParams};
use wmorse::oracle::{richardson_pair, Boundary, FdProblem};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::from_h(1.0, 2.5)?;
    let exact = morse_eigenvalues(&params)?;
    println!("closed form E_n = -(h-n)^2: {exact:?}");
    println!("shape invariance gap at x = -3: {:e}", shape_invariance_gap(&params, -3.0)?);

    let v = move |x: f64| morse_potential_fullline(&params, x).unwrap_or(f64::MAX);
    let problem = FdProblem::with_auto_box(v, Boundary::FullLine, exact[exact.len() - 1], 4000)?;
    let r = richardson_pair(&problem, exact.len())?;
    for (n, (fd, e)) in r.values.iter().zip(&exact).enumerate() {
        println!("n={n}: oracle {fd:+.9}  exact {e:+.9}  order {:?}", r.orders[n]);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
