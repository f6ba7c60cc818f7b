use wmorse::morse_ref::PotentialParams;
use wmorse::sampled::linspace;
use wmorse::special_fn::OrderKind;
use wmorse::spectrum::{
    compute_spectrum, matching_residual, potential_minimum, scan_roots, symmetric_potential, Eigenstate, Parity,
};
use wmorse::verify::{oracle_spectrum, FD_POINTS};

fn p(g: f64, k: f64) -> PotentialParams {
    PotentialParams::new(g, k).unwrap()
}

#[test]
fn nothing_below_the_lower_bound_for_repulsive_k() {
    // k ≤ 0: every level lies above g(g − k) = 2 at (1, −1).
    let params = p(1.0, -1.0);
    for parity in [Parity::Even, Parity::Odd] {
        let r = scan_roots(&params, parity, 0.01, 1.99, 0.05, 1e-10).unwrap();
        assert!(r.roots.is_empty(), "{:?}", r.roots);
    }
    assert!(compute_spectrum(&params, 1).unwrap()[0].energy > 2.0);
}

#[test]
fn negative_even_roots_have_order_below_k() {
    let params = p(1.0, 3.0);
    let r = scan_roots(&params, Parity::Even, -8.9, -0.01, 0.05, 1e-10).unwrap();
    assert!(!r.roots.is_empty());
    for root in &r.roots {
        assert_eq!(root.order.kind, OrderKind::Real);
        assert!(root.order.value < 3.0);
        assert!(root.energy > potential_minimum(&params));
    }
}

#[test]
fn level_m_has_m_nodes() {
    let params = p(1.0, -0.5);
    let levels = compute_spectrum(&params, 6).unwrap();
    let grid = linspace(-5.5, 5.5, 4001);
    for level in levels {
        let f = Eigenstate::new(&params, level).unwrap().sample(grid.clone()).unwrap();
        assert_eq!(f.sign_changes(1e-8), level.index, "level {}", level.index);
    }
}

#[test]
fn eigenfunctions_solve_the_schrodinger_equation() {
    let params = p(1.0, -0.5);
    let h = 2e-3;
    for level in compute_spectrum(&params, 5).unwrap() {
        let state = Eigenstate::new(&params, level).unwrap();
        let xs = linspace(0.05 - 2.0 * h, 5.5 + 2.0 * h, 2729);
        let step = xs[1] - xs[0];
        let psi: Vec<f64> = state.eval_many(&xs).unwrap().into_iter().map(|v| v.0).collect();
        let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let worst = (2..psi.len() - 2)
            .map(|i| {
                let d2 = (-psi[i - 2] + 16.0 * psi[i - 1] - 30.0 * psi[i] + 16.0 * psi[i + 1] - psi[i + 2])
                    / (12.0 * step * step);
                let v = symmetric_potential(&params, xs[i]).unwrap();
                (-d2 + (v - level.energy) * psi[i]).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst < 1e-5 * peak, "level {}: {worst:e}", level.index);
    }
}

#[test]
fn roots_are_simple() {
    let params = p(1.0, 0.0);
    for level in compute_spectrum(&params, 6).unwrap() {
        let d = 1e-6 * level.energy.abs().max(1.0);
        let below = matching_residual(&params, level.parity, level.energy - d).unwrap();
        let above = matching_residual(&params, level.parity, level.energy + d).unwrap();
        assert!(below * above < 0.0, "level {}", level.index);
    }
}

#[test]
fn odd_negative_level_brackets_the_oracle() {
    let params = p(1.0, 3.0);
    let levels = compute_spectrum(&params, 4).unwrap();
    let fd = oracle_spectrum(&params, levels[3].energy, 4, FD_POINTS).unwrap();
    let odd = levels.iter().position(|l| l.parity == Parity::Odd && l.energy < 0.0).unwrap();
    let delta = 1e-3 * fd[odd].abs().max(1.0);
    let lo = matching_residual(&params, Parity::Odd, fd[odd] - delta).unwrap();
    let hi = matching_residual(&params, Parity::Odd, fd[odd] + delta).unwrap();
    assert!(lo * hi < 0.0);
}

#[test]
fn flat_bottom_levels_are_positive() {
    let levels = compute_spectrum(&p(1.0, 0.0), 6).unwrap();
    assert!(levels.iter().all(|l| l.energy > 0.0 && l.order.kind == OrderKind::Imaginary));
}

#[test]
fn parity_alternates_through_negative_levels() {
    for (g, k) in [(1.0, 3.0), (0.5, 1.5)] {
        let levels = compute_spectrum(&p(g, k), 8).unwrap();
        for (m, l) in levels.iter().enumerate() {
            assert_eq!(l.parity, Parity::of_index(m));
        }
        assert!(levels.windows(2).all(|w| w[0].energy < w[1].energy));
    }
}
