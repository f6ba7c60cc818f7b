use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wmorse::cli::{DeformManifest, SpectrumReport};

fn wmorse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmorse")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&wmorse(&["spectrum", "--levels", "3"])), 0);
    assert_eq!(code(&wmorse(&["spectrum", "--g", "-1"])), 2);
    assert_eq!(code(&wmorse(&["spectrum", "--bogus"])), 2);
    assert_eq!(code(&wmorse(&["eigenfunction", "--levels", "3", "--level", "5"])), 4);
    assert_eq!(code(&wmorse(&["deform", "--krein-adler", "1"])), 5);
    assert_eq!(code(&wmorse(&["verify", "--suite", "whittaker"])), 0);
    assert_eq!(code(&wmorse(&["verify", "--suite", "nonsense"])), 2);
}

#[test]
fn failing_verification_exits_one() {
    // the suite includes interlacing at k > 0, which does not hold
    let out = wmorse(&["verify", "--suite", "spectrum"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("interlacing g=1,k=3"));
}

#[test]
fn inadmissible_set_names_the_violating_level() {
    let out = wmorse(&["deform", "--krein-adler", "1"]);
    assert!(stderr(&out).contains("m=0 violates positivity"), "{}", stderr(&out));
}

#[test]
fn eigenfunction_csv_respects_parity() {
    let dir = tempfile::tempdir().unwrap();
    for (level, odd) in [("0", false), ("1", true)] {
        let path = dir.path().join(format!("psi{level}.csv"));
        let out = wmorse(&[
            "eigenfunction", "--k", "-0.5", "--levels", "3", "--level", level, "--samples", "201", "--xmax", "4",
            "--format", "csv", "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let header = fs::read_to_string(&path).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, "x,psi,dpsi");
        let rows = read_csv(&path);
        assert_eq!(rows.len(), 201);
        let mid = &rows[100];
        assert_eq!(mid[0], 0.0);
        if odd {
            assert_eq!(mid[1], 0.0);
        } else {
            let h = rows[101][0] - rows[99][0];
            let slope = (rows[101][1] - rows[99][1]) / h;
            assert!(slope.abs() < 1e-6, "{slope}");
        }
        for i in 0..201 {
            let j = 200 - i;
            let sign = if odd { -1.0 } else { 1.0 };
            assert!((rows[i][1] - sign * rows[j][1]).abs() < 1e-12);
        }
    }
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        assert_eq!(code(&wmorse(&["spectrum", "--levels", "5", "--out", path.to_str().unwrap()])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn spectrum_json_round_trips() {
    let out = wmorse(&["spectrum", "--g", "1", "--k", "3", "--levels", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: SpectrumReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.levels.len(), 6);
    assert_eq!(report.params.h, 2.5);
    assert!(report.oracle_comparison.iter().all(|o| o.rel_error < 1e-4));
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(again, text);
}

#[test]
fn crum_manifest_lists_surviving_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = wmorse(&["deform", "--crum", "1", "--g", "1", "--k", "-0.5", "--levels", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let manifest: DeformManifest =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.asymptotic_k, -1.5);
    assert_eq!(manifest.order, 1);
    let indices: Vec<usize> = manifest.levels.iter().map(|l| l.index).collect();
    assert_eq!(indices, vec![1, 2, 3, 4]);
    let original: SpectrumReport =
        serde_json::from_slice(&wmorse(&["spectrum", "--g", "1", "--k", "-0.5", "--levels", "5"]).stdout).unwrap();
    for level in &manifest.levels {
        assert_eq!(level.energy, original.levels[level.index].energy);
    }
    assert!(dir.path().join(&manifest.potential_file).exists());
    for level in &manifest.levels {
        assert!(dir.path().join(&level.file).exists());
        assert!(level.norm_factor > 0.0);
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(&config, r#"{"g": 2.0, "k": -1.0, "n_levels": 3}"#).unwrap();
    let from_file: SpectrumReport =
        serde_json::from_slice(&wmorse(&["spectrum", "--config", config.to_str().unwrap()]).stdout).unwrap();
    assert_eq!((from_file.params.g, from_file.params.k, from_file.levels.len()), (2.0, -1.0, 3));
    let overridden: SpectrumReport =
        serde_json::from_slice(&wmorse(&["spectrum", "--config", config.to_str().unwrap(), "--k", "0", "--levels", "2"]).stdout)
            .unwrap();
    assert_eq!((overridden.params.g, overridden.params.k, overridden.levels.len()), (2.0, 0.0, 2));

    fs::write(&config, r#"{"g": 2.0, "colour": "red"}"#).unwrap();
    assert_eq!(code(&wmorse(&["spectrum", "--config", config.to_str().unwrap()])), 2);
}
