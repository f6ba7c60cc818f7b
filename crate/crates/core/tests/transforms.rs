use wmorse::morse_ref::PotentialParams;
use wmorse::special_fn::bessel_k_imag_order;
use wmorse::spectrum::{compute_spectrum, symmetric_potential, Eigenstate, Parity};
use wmorse::transforms::{crum_potential, krein_adler_deform, DeletionSet, Deformation};
use wmorse::Error;

fn p(g: f64, k: f64) -> PotentialParams {
    PotentialParams::new(g, k).unwrap()
}

#[test]
fn first_crum_step_matches_bessel_ground_state() {
    // k = 0: ψ₀ ∝ K_{iν₀}(g e^{|x|}), so V^{[1]} = V − 2 (log K_{iν₀}(g e^x))''.
    let params = p(1.0, 0.0);
    let spectrum = compute_spectrum(&params, 3).unwrap();
    let nu0 = spectrum[0].order.value;
    let log_k = |x: f64| bessel_k_imag_order(nu0, params.g * x.exp()).unwrap().abs().ln();
    let xs = [0.3, 0.8, 1.5, 2.5];
    let deformation = Deformation::new(&params, DeletionSet::crum(1).unwrap(), &spectrum).unwrap();
    let analytic = deformation.potential_analytic(&xs).unwrap();
    let h = 1e-2;
    for (&x, v1) in xs.iter().zip(analytic) {
        let f: Vec<f64> = (-2..=2).map(|j| log_k(x + j as f64 * h)).collect();
        let curvature = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h);
        let expected = symmetric_potential(&params, x).unwrap() - 2.0 * curvature;
        assert!((v1 - expected).abs() < 1e-5 * expected.abs().max(1.0), "x = {x}: {v1} vs {expected}");
    }
}

#[test]
fn crum_potential_approaches_shifted_morse_form() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 4).unwrap();
    for l in [1, 2] {
        let xs = vec![3.0, 4.0, 5.0];
        let v = crum_potential(&params, l, &spectrum, xs.clone()).unwrap();
        let gaps: Vec<f64> = xs
            .iter()
            .zip(&v.values)
            .map(|(&x, &vl)| {
                let rho = params.rho(x);
                (vl - (0.25 * rho * rho - (params.k - l as f64) * rho)).abs()
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "L = {l}: {gaps:?}");
        assert!(gaps[2] < 2.0, "L = {l}: {gaps:?}");
    }
}

#[test]
fn krein_adler_norms_match_energy_products() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 6).unwrap();
    for labels in [[1usize, 2].as_slice(), [0, 2, 3].as_slice()] {
        let deformation = krein_adler_deform(&params, DeletionSet::new(labels).unwrap(), &spectrum).unwrap();
        for level in spectrum.iter().filter(|l| !labels.contains(&l.index)) {
            let state = Eigenstate::new(&params, *level).unwrap();
            let norm = deformation.norm_squared(&state).unwrap();
            let expected = deformation.norm_factor(level.energy);
            assert!(norm > 0.0);
            assert!((norm - expected).abs() < 1e-6 * expected, "{labels:?}, n = {}: {norm} vs {expected}", level.index);
        }
    }
}

#[test]
fn deformed_parity_follows_the_deletion_count() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 5).unwrap();
    let deformation = krein_adler_deform(&params, DeletionSet::new(&[1, 2]).unwrap(), &spectrum).unwrap();
    for n in [0usize, 3, 4] {
        let state = Eigenstate::new(&params, spectrum[n]).unwrap();
        let v = deformation.eigenfunction_values(&state, &[0.7, -0.7]).unwrap();
        let expected = deformation.parity_sign(n);
        assert!((v[1].0 - expected * v[0].0).abs() < 1e-9 * v[0].0.abs(), "n = {n}");
        assert_eq!(expected > 0.0, Parity::of_index(n) == Parity::Even);
    }
}

#[test]
fn krein_adler_triple_is_regular_on_the_core() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 6).unwrap();
    let deformation = krein_adler_deform(&params, DeletionSet::new(&[0, 2, 3]).unwrap(), &spectrum).unwrap();
    let xs: Vec<f64> = (1..=30).map(|i| 0.1 * i as f64).collect();
    let fd = deformation.potential(xs.clone()).unwrap();
    let analytic = deformation.potential_analytic(&xs).unwrap();
    for ((x, a), b) in xs.iter().zip(&fd.values).zip(&analytic) {
        assert!(a.is_finite());
        assert!((a - b).abs() < 1e-5 * b.abs().max(1.0), "x = {x}: {a} vs {b}");
    }
}

#[test]
fn three_state_tail_reports_precision_loss() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 6).unwrap();
    let deformation = krein_adler_deform(&params, DeletionSet::new(&[0, 2, 3]).unwrap(), &spectrum).unwrap();
    assert!(matches!(deformation.potential_analytic(&[5.0]), Err(Error::WronskianZero { .. })));
}

#[test]
fn inadmissible_and_missing_levels_are_reported() {
    let params = p(1.0, -0.5);
    let spectrum = compute_spectrum(&params, 3).unwrap();
    assert!(matches!(
        krein_adler_deform(&params, DeletionSet::new(&[1]).unwrap(), &spectrum),
        Err(Error::InadmissibleSet { m: 0 })
    ));
    assert!(matches!(
        krein_adler_deform(&params, DeletionSet::new(&[5, 6]).unwrap(), &spectrum),
        Err(Error::IndexOutOfSpectrum { index: 5, .. })
    ));
    assert!(DeletionSet::new(&[]).is_err());
    assert!(DeletionSet::new(&[2, 2]).is_err());
}
