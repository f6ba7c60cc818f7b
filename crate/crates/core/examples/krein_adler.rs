// Krein–Adler admissibility and the spectrum after deleting {1, 2},
// checked by the finite-difference oracle on the deformed potential.

use wmorse::morse_ref::PotentialParams;
use wmorse::oracle::{auto_x_max, symmetric_spectrum, TabulatedPotential, TAIL_BAND};
use wmorse::spectrum::{compute_spectrum, symmetric_potential};
use wmorse::transforms::{krein_adler_admissible, Deformation, DeletionSet};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for labels in [&[0usize][..], &[1], &[1, 2], &[0, 2, 3]] {
        let set = DeletionSet::new(labels)?;
        println!("{labels:?} admissible: {}", krein_adler_admissible(&set));
    }
    if let Err(e) = Deformation::new(&PotentialParams::new(1.0, 0.0)?, DeletionSet::new(&[1])?, &[]) {
        println!("{e}");
    }

    let params = PotentialParams::new(1.0, -0.5)?;
    let spectrum = compute_spectrum(&params, 7)?;
    let d = Deformation::new(&params, DeletionSet::new(&[1, 2])?, &spectrum)?;
    let kept: Vec<f64> = [0, 3, 4, 5].iter().map(|&i| spectrum[i].energy).collect();

    let v = move |x: f64| symmetric_potential(&params, x).unwrap_or(f64::MAX);
    let x_max = auto_x_max(v, kept[3])? / (1.0 - TAIL_BAND);
    let n = 2000;
    let nodes = TabulatedPotential::nodes(0.0, x_max, 4 * n);
    let tab = TabulatedPotential::new(0.0, x_max, d.potential(nodes)?.values)?;
    let fd = symmetric_spectrum(move |x| tab.eval(x), x_max, kept.len(), n)?;
    for (e, f) in kept.iter().zip(&fd) {
        println!("kept level {e:.9}  oracle {f:.9}");
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
