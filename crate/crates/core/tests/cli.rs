use std::process::Command;

use pdl_capacity::cli::{run, EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};

fn pdlcap(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["pdlcap"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> serde_json::Value {
    let (code, out, err) = pdlcap(args);
    assert_eq!(code, EXIT_OK, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn two_sig(x: f64) -> f64 {
    let scale = 10f64.powi(1 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

#[test]
fn point_json_has_exactly_the_report_keys() {
    let v = json(&["point", "--ph", "0.7", "--pv", "0.2", "--n", "4", "--format", "json"]);
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["benefit", "classification", "doubling_bound", "q1", "qn_lower", "w_n"]);
    assert_eq!(obj["classification"], "Neither");
}

#[test]
fn point_benefit_at_the_quoted_point() {
    let v = json(&["point", "--ph", "0.7", "--pv", "0.2", "--n", "4", "--format", "json"]);
    let benefit = v["benefit"].as_f64().unwrap();
    assert_eq!(two_sig(benefit), 9.1e-5, "benefit {benefit:e}");
}

#[test]
fn antidegradable_point_has_no_benefit() {
    let v = json(&["point", "--ph", "0.3", "--pv", "0.4", "--n", "5", "--format", "json"]);
    assert_eq!(v["classification"], "Antidegradable");
    assert_eq!(v["benefit"], 0.0);
    assert_eq!(v["q1"], 0.0);
    assert_eq!(v["doubling_bound"], 0.0);
}

#[test]
fn out_of_range_flag_is_a_usage_error_naming_it() {
    let (code, _, err) = pdlcap(&["point", "--ph", "1.2", "--pv", "0.2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--ph"), "{err}");
    let (code, _, err) = pdlcap(&["q1", "--ph", "0.2", "--pv", "-0.1"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--pv"), "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(pdlcap(&["region", "--res", "2001"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["region", "--res", "1"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["point", "--ph", "0.7", "--pv", "0.2", "--format", "svg"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["point", "--ph", "0.7", "--pv", "0.2", "--n", "0"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["boundary", "--n", "1"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["wn", "--ph", "0.7", "--pv", "0.2", "--n", "3", "--threads", "0"]).0, EXIT_USAGE);
    assert_eq!(pdlcap(&["--help"]).0, EXIT_OK);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let (code, _, err) = pdlcap(&["region", "--res", "3", "--n-list", "2", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code, EXIT_IO, "{err}");
}

#[test]
fn region_csv_rows_and_columns() {
    let (code, out, _) = pdlcap(&["region", "--res", "41", "--n-list", "2,3,10", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains('\r'));
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p_h,p_v,classification,w_2,benefit_2,superadditive_2,w_3,benefit_3,superadditive_3,w_10,benefit_10,superadditive_10"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1681);
    assert!(rows.iter().all(|r| r.split(',').count() == 12));
}

#[test]
fn region_output_is_deterministic_and_thread_independent() {
    let a = pdlcap(&["region", "--res", "25", "--n-list", "3,7", "--threads", "1"]).1;
    let b = pdlcap(&["region", "--res", "25", "--n-list", "3,7", "--threads", "4"]).1;
    assert_eq!(a, b);
    let a = pdlcap(&["region", "--res", "9", "--n-list", "3", "--format", "json", "--threads", "1"]).1;
    let b = pdlcap(&["region", "--res", "9", "--n-list", "3", "--format", "json", "--threads", "3"]).1;
    assert_eq!(a, b);
}

#[test]
fn json_round_trips_byte_for_byte() {
    for args in [
        &["point", "--ph", "0.7", "--pv", "0.2", "--n", "4", "--format", "json"][..],
        &["region", "--res", "7", "--n-list", "2,5", "--format", "json"][..],
        &["q1", "--ph", "0.93", "--pv", "0.41", "--format", "json"][..],
        &["bound", "--ph", "0.8", "--pv", "0.1", "--format", "json"][..],
    ] {
        let (_, out, _) = pdlcap(args);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
        assert_eq!(out, again, "{args:?}");
    }
}

/// Segments `(x0, y0, x1, y1)` of the contour path for block length `n`.
fn contour_segments(svg: &str, n: u64) -> Vec<[f64; 4]> {
    let tag = format!("data-n=\"{n}\"");
    let path = svg.lines().find(|l| l.contains(&tag)).expect("contour path");
    let d = path.split(" d=\"").nth(1).unwrap().trim_end_matches("\"/>");
    d.split('M')
        .filter(|s| !s.is_empty())
        .map(|seg| {
            let nums: Vec<f64> = seg
                .split(['L', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().unwrap())
                .collect();
            [nums[0], nums[1], nums[2], nums[3]]
        })
        .collect()
}

#[test]
fn two_use_contour_is_the_antidiagonal() {
    let (code, svg, _) = pdlcap(&["region", "--res", "101", "--n-list", "2", "--format", "svg"]);
    assert_eq!(code, EXIT_OK);
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\""));
    assert!(!svg.contains("href"));
    let segments = contour_segments(&svg, 2);
    assert!(!segments.is_empty());
    let cell = 800.0 / 101.0;
    for [x0, y0, x1, y1] in segments {
        for (x, y) in [(x0, y0), (x1, y1)] {
            let (ph, pv) = (x / 800.0, 1.0 - y / 800.0);
            // staircase along p_h + p_v = 1, within one cell
            assert!((ph + pv - 1.0).abs() <= 2.0 * cell / 800.0 + 1e-9, "({ph}, {pv})");
        }
    }
}

#[test]
fn boundary_csv_for_two_uses() {
    let (code, out, _) = pdlcap(&["boundary", "--n", "2", "--res", "10"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "n,p_h,p_v");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 20);
    for r in rows {
        assert_eq!(r[0], 2.0);
        assert!((r[1] + r[2] - 1.0).abs() < 1e-9);
    }
    let (code, svg, _) = pdlcap(&["boundary", "--n", "3", "--res", "10", "--format", "svg"]);
    assert_eq!(code, EXIT_OK);
    assert!(svg.contains("<circle"));
}

#[test]
fn small_commands() {
    let v = json(&["q1", "--ph", "0.75", "--pv", "0.75", "--format", "json"]);
    assert!((v["q1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = json(&["wn", "--ph", "0.7", "--pv", "0.3", "--n", "3", "--format", "json"]);
    assert!((v["w_n"].as_f64().unwrap() - 0.034_863_149_939).abs() < 1e-11);
    let v = json(&["wn", "--ph", "0.7", "--pv", "0.6", "--n", "3", "--format", "json"]);
    assert!(v["n0"].is_null());
    let v = json(&["bound", "--ph", "0.7", "--pv", "0.2", "--mmax", "3", "--format", "json"]);
    assert_eq!(v.as_array().unwrap().len(), 4);
    let (code, out, _) = pdlcap(&["point", "--ph", "0.7", "--pv", "0.2", "--n", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("classification  neither"));
}

#[test]
fn file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let (code, out, _) = pdlcap(&["region", "--res", "5", "--n-list", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 26);
}

#[test]
fn verify_reports_every_check_by_name() {
    let (code, out, err) = pdlcap(&["verify", "--level", "fast", "--seed", "3"]);
    for name in ["ic_rho2_vs_oracle", "w2_identity", "blocked_vs_dense_n3", "w_code_n3_benefit_vs_oracle"] {
        assert!(out.contains(name), "{name} missing from\n{out}");
    }
    // the failing invariant is named on stderr and drives the exit code
    let failed: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(code == EXIT_VERIFY_FAILED, !failed.is_empty());
    for line in failed {
        let name = line.split_whitespace().nth(1).unwrap();
        assert!(err.contains(name));
    }
    assert!(out.lines().any(|l| l.starts_with("PASS ic_rho2_vs_oracle")));
    assert_eq!(out, pdlcap(&["verify", "--seed", "3"]).1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pdlcap");
    let status = Command::new(bin).args(["point", "--ph", "0.7", "--pv", "0.2"]).status().unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let out = Command::new(bin).args(["point", "--ph", "1.2", "--pv", "0.2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_USAGE));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--ph"));
}
