// Whittaker W for real and imaginary order, checked against the terminating
// closed form and the K-Bessel integral.

use std::f64::consts::PI;

use wmorse::special_fn::{bessel_k_imag_order, whittaker_w, OrderParam};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // W_{μ+1/2,μ}(x) = e^{−x/2} x^{μ+1/2}
    for mu in [0.0, 0.5, 2.5] {
        let x = 2.0;
        let w = whittaker_w(mu + 0.5, OrderParam::real(mu), x)?;
        let exact = (-0.5 * x).exp() * x.powf(mu + 0.5);
        println!("W(k={:.1}, mu={mu}, x={x}) = {:.15} (closed form {exact:.15})", mu + 0.5, w.value);
    }
    // W_{0,iν}(2x) = √(2x/π) K_{iν}(x)
    for nu in [0.5, 2.0, 5.0] {
        let x = 1.5;
        let w = whittaker_w(0.0, OrderParam::imaginary(nu), 2.0 * x)?;
        let k = (2.0 * x / PI).sqrt() * bessel_k_imag_order(nu, x)?;
        println!("W(k=0, i{nu}, {}) = {:+.12e}  Bessel route {k:+.12e}", 2.0 * x, w.value);
    }
    let w = whittaker_w(-0.5, OrderParam::imaginary(3.0), 2.0)?;
    println!("W(k=-0.5, 3i, 2) = {:+.12e}, W' = {:+.12e}, path error {:.1e}", w.value, w.derivative, w.ode_residual);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
