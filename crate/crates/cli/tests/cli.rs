use std::process::Command;

use bec_cli::plot::{csv_crossings, parse_spectrum_csv};

fn bec(args: &[&str]) -> (i32, String, String) {
    bec_env(args, &[])
}

fn bec_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bec"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("bec runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn bulk_lines() {
    let (code, out, _) = bec(&["bulk", "--model", "regdirac", "--param", "m=-1", "--param", "eps_reg=0.1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("chern = -1.000 (resid"), "{out}");
    let (code, out, _) = bec(&["bulk", "--model", "dirac", "--param", "m=1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("chern = 0.500 (NON-INTEGER"), "{out}");
    let (_, out, _) = bec(&["bulk", "--model", "laplacian"]);
    assert!(out.starts_with("chern = 0.000\n"), "{out}");
}

#[test]
fn bulk_level_outside_gap_is_an_input_error() {
    let (code, _, err) = bec(&["bulk", "--model", "dirac", "--param", "m=1", "--energy", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("no gap"), "{err}");
}

#[test]
fn relative_chern_of_opposite_masses() {
    let (code, out, _) = bec(&["relative-chern", "--model", "dirac", "--param", "m=1", "--other", "m=-1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("relative chern = 1.000"), "{out}");
}

#[test]
fn spectrum_csv_is_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..3).map(|i| dir.path().join(format!("s{i}.csv"))).collect();
    let svg = dir.path().join("s.svg");
    for (i, p) in paths.iter().enumerate() {
        let threads = ["1", "2", "4"][i];
        let mut args = vec!["edge", "spectrum", "--model", "dirac", "--param", "m=1", "--bc", "a:a=2", "--k-window", "6"];
        args.extend(["--out", p.to_str().unwrap()]);
        if i == 0 {
            args.extend(["--plot", svg.to_str().unwrap()]);
        }
        let (code, out, err) = bec_env(&args, &[("BEC_NUM_THREADS", threads)]);
        assert_eq!(code, 0, "{out}{err}");
        assert!(out.contains("spectral flow = 1"), "{out}");
    }
    let first = std::fs::read(&paths[0]).unwrap();
    for p in &paths[1..] {
        assert_eq!(std::fs::read(p).unwrap(), first);
    }
    let rows = parse_spectrum_csv(std::str::from_utf8(&first).unwrap()).unwrap();
    let net: i64 = csv_crossings(&rows, 0.0).iter().map(|c| c.1).sum();
    assert_eq!(net, 1);
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<polyline"));
}

#[test]
fn flow_direct_and_tracked_agree() {
    for extra in [&[][..], &["--tracked"][..]] {
        let mut args = vec!["edge", "flow", "--model", "dirac", "--param", "m=-1", "--bc", "a:a=-2", "--k-window", "8"];
        args.extend_from_slice(extra);
        let (code, out, _) = bec(&args);
        assert_eq!(code, 0);
        assert!(out.starts_with("spectral flow = -1"), "{extra:?}: {out}");
    }
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = bec(&["verify", "--model", "dirac", "--param", "m=1", "--bc", "a:a=-2", "--ref", "a:a=0.5"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("verify: PASS (SF 0 vs 1; wind -1)"), "{out}");
    let (code, out, _) = bec(&["verify", "--model", "laplacian", "--bc", "klm:K=0,l=1,M=1"]);
    assert_eq!(code, 2);
    assert!(out.contains("SKIPPED"), "{out}");
}

#[test]
fn interface_verify_with_bulk() {
    let (code, out, _) = bec(&[
        "verify", "--model", "dirac-interface", "--param", "m_plus=1", "--param", "m_minus=-1",
        "--bc", "decoupled:a_plus=-2,a_minus=3", "--bulk",
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("bulk: invariant 1.000"), "{out}");
}

#[test]
fn winding_against_model_reference() {
    let (code, out, _) = bec(&["winding", "--model", "laplacian", "--bc", "klm:K=1,l=2,M=1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("winding = -1"), "{out}");
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(bec(&["bulk", "--model", "nope"]).0, 2);
    assert_eq!(bec(&["bulk", "--model", "dirac"]).0, 2);
    assert_eq!(bec(&["bulk", "--model", "dirac", "--param", "m=0"]).0, 2);
    assert_eq!(bec(&["bulk", "--model", "dirac", "--param", "m"]).0, 2);
    assert_eq!(bec(&["edge", "flow", "--model", "dirac", "--param", "m=1", "--bc", "a:b=1"]).0, 2);
    assert_eq!(bec(&["edge", "flow", "--model", "dirac", "--param", "m=1", "--k-resolution", "1"]).0, 2);
    assert_eq!(bec(&["frobnicate"]).0, 2);
    assert_eq!(bec(&["edge", "flow", "--model", "shallow-water", "--param", "f=1", "--param", "nu=0.1"]).0, 2);
}

#[test]
fn tables_reproduce() {
    let (code, out, _) = bec(&["tables", "dirac"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("all tabulated values reproduced"));
    assert!(!out.contains("DIFF"));
}

#[test]
fn model_file_settings_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("reg.bec");
    std::fs::write(
        &path,
        "[model]\nname = regdirac\nm = 1\neps_reg = 0.1\n\n[boundary]\nfamily = a\na = -2\n\n[numerics]\nk_window = 12\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, out, _) = bec(&["edge", "flow", "--model", p]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("spectral flow = 1"), "{out}");
    assert!(out.contains("setting k_window = 12 (model file)"), "{out}");
    let (_, out, _) = bec(&["edge", "flow", "--model", p, "--k-window", "10", "--param", "m=-1"]);
    assert!(out.contains("setting k_window = 10 (flag)"), "{out}");
    assert!(out.contains("model: regdirac(eps_reg=0.1, m=-1)"), "{out}");
}
