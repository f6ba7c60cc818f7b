// Half-line orthogonality of equal-parity Whittaker functions, before and
// after a Crum deletion, plus the cross-energy overlaps for k > 0.

use wmorse::analysis::{deformed_orthogonality_gram, orthogonality_gram, Measure};
use wmorse::morse_ref::PotentialParams;
use wmorse::spectrum::{compute_spectrum, EigenLevel, Parity};

fn even(levels: &[EigenLevel]) -> Vec<EigenLevel> {
    levels.iter().filter(|l| l.parity == Parity::Even).copied().collect()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, -0.5)?;
    let spectrum = compute_spectrum(&params, 9)?;
    let plain = orthogonality_gram(&params, &even(&spectrum[..8]), Measure::RhoMeasure, params.rho0())?;
    println!("even Gram, max off-diagonal ratio {:.2e}", plain.max_offdiag_ratio);
    for l in [1, 2] {
        let class = even(&spectrum[l..]);
        let r = deformed_orthogonality_gram(&params, l, &spectrum, &class[..3], params.rho0())?;
        println!("L={l} deformed Gram, max off-diagonal ratio {:.2e}", r.max_offdiag_ratio);
    }

    let params = PotentialParams::new(1.0, 3.0)?;
    let levels = compute_spectrum(&params, 8)?;
    let g = orthogonality_gram(&params, &even(&levels), Measure::RhoMeasure, params.rho0())?;
    println!("k=3 {:?} class, normalized Gram:", g.parity_class);
    for row in g.normalized() {
        println!("  {}", row.iter().map(|v| format!("{v:+.1e}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
