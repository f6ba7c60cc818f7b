use proptest::prelude::*;
use wmorse::analysis::wkb::turning_point;
use wmorse::analysis::wkb_count;
use wmorse::cli::{fmt_f64, LevelOut, OracleOut, ParamsOut, SpectrumReport};
use wmorse::morse_ref::PotentialParams;
use wmorse::special_fn::{whittaker_w, OrderParam};
use wmorse::spectrum::symmetric_potential;
use wmorse::transforms::DeletionSet;

fn brute_force_admissible(labels: &[usize]) -> bool {
    let top = *labels.iter().max().unwrap();
    (0..top + 8).filter(|m| !labels.contains(m)).all(|m| {
        let sign: i32 = labels.iter().map(|&d| if m < d { -1 } else { 1 }).product();
        sign > 0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn order_sign_does_not_matter(k in -2.0f64..2.0, t in 0.0f64..4.0, x in 0.5f64..20.0) {
        for (a, b) in [(OrderParam::real(t), OrderParam::real(-t)), (OrderParam::imaginary(t), OrderParam::imaginary(-t))] {
            let wa = whittaker_w(k, a, x).unwrap();
            let wb = whittaker_w(k, b, x).unwrap();
            prop_assert_eq!(wa.value.to_bits(), wb.value.to_bits());
            prop_assert_eq!(wa.derivative.to_bits(), wb.derivative.to_bits());
        }
    }

    #[test]
    fn potential_is_even(g in 0.1f64..3.0, k in -3.0f64..3.0, x in 0.0f64..20.0) {
        let p = PotentialParams::new(g, k).unwrap();
        prop_assert_eq!(symmetric_potential(&p, x).unwrap(), symmetric_potential(&p, -x).unwrap());
    }

    #[test]
    fn formatted_floats_round_trip(v in any::<f64>().prop_filter("finite", |v| v.is_finite())) {
        let back: f64 = fmt_f64(v).parse().unwrap();
        prop_assert_eq!(back.to_bits(), v.to_bits());
    }

    #[test]
    fn spectrum_report_json_round_trips(
        energies in prop::collection::vec(-50.0f64..500.0, 1..8),
        g in 0.1f64..3.0,
        k in -3.0f64..3.0,
    ) {
        let report = SpectrumReport {
            params: ParamsOut { g, k, h: k - 0.5 },
            levels: energies
                .iter()
                .enumerate()
                .map(|(i, &e)| LevelOut {
                    index: i,
                    parity: if i % 2 == 0 { "even" } else { "odd" }.into(),
                    order_kind: if e > 0.0 { "imaginary" } else { "real" }.into(),
                    order_value: e.abs().sqrt(),
                    energy: e,
                    residual: e * 1e-13,
                })
                .collect(),
            oracle_comparison: energies
                .iter()
                .enumerate()
                .map(|(i, &e)| OracleOut { index: i, fd_energy: e * (1.0 + 1e-7), rel_error: 1e-7 })
                .collect(),
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: SpectrumReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn admissibility_matches_product_sign(labels in prop::collection::btree_set(0usize..9, 1..5)) {
        let labels: Vec<usize> = labels.into_iter().collect();
        let dset = DeletionSet::new(&labels).unwrap();
        prop_assert_eq!(dset.is_admissible(), brute_force_admissible(&labels));
    }

    #[test]
    fn wkb_count_is_monotone(g in 0.3f64..2.0, k in -2.0f64..0.0, a in 0.5f64..20.0, d in 0.1f64..5.0) {
        let p = PotentialParams::new(g, k).unwrap();
        prop_assume!(turning_point(&p, a) > 0.0);
        prop_assert!(wkb_count(&p, a + d).unwrap() > wkb_count(&p, a).unwrap());
    }
}
