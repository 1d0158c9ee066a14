//! Black-box checks of the command-line interface: output formats, flag
//! validation, exit codes, and determinism of single commands.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spde-weak"))
}

#[test]
fn weak_error_csv_has_documented_columns_and_fit_footer() {
    let out = bin()
        .args([
            "weak-error",
            "--scheme",
            "spectral",
            "--family",
            "phi3",
            "--alpha",
            "0.375",
            "--T",
            "1",
            "--N",
            "16,32,64,128",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("N,lambda_N,weak_error,method\n"));
    assert!(text.contains("# fit: slope = "));
    assert!(text.lines().any(|l| l.starts_with("16,")));
    assert!(!text.contains('\r'), "line endings must be LF");

    // The fitted slope sits near -alpha.
    let fit_line = text.lines().find(|l| l.starts_with("# fit:")).unwrap();
    let slope: f64 = fit_line
        .split("slope = ")
        .nth(1)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((slope + 0.375).abs() < 0.05, "slope {slope}");
}

#[test]
fn constants_command_reports_known_value() {
    let out = bin()
        .args(["constants", "--kind", "C_alpha", "--alpha", "0.5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().find(|l| l.starts_with("C_alpha")).unwrap();
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    let closed = 1.0 / (std::f64::consts::SQRT_2 * std::f64::consts::PI.powi(2));
    assert!((value - closed).abs() < 1e-10);
}

#[test]
fn json_output_follows_the_schema() {
    let out = bin()
        .args([
            "weak-error",
            "--scheme",
            "temporal",
            "--family",
            "gauss_exp",
            "--M",
            "8,16,32,64",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json.get("config").unwrap().is_object());
    assert!(json.get("rows").unwrap().is_array());
    assert!(json.get("fit").unwrap().is_object());
    assert!(json.get("validation").unwrap().is_null());
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].get("M").is_some());
    assert!(rows[0].get("weak_error").is_some());
}

#[test]
fn out_of_range_parameters_exit_with_usage_code() {
    // alpha outside (1/4, 1/2]
    let out = bin()
        .args(["weak-error", "--scheme", "spectral", "--family", "phi3", "--alpha", "0.6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // odd oscillation index
    let out = bin()
        .args(["mc-validate", "--family", "phi2", "--law", "exact", "--m", "7", "--samples", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // Euler step outside (0, 1)
    let out = bin()
        .args(["moments", "--law", "euler", "--dt", "1.5", "--k", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown flag (clap)
    let out = bin().args(["moments", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let run = || {
        bin()
            .args([
                "mc-validate",
                "--family",
                "gauss_exp",
                "--law",
                "exact",
                "--T",
                "1",
                "--samples",
                "20000",
                "--seed",
                "7",
                "--dim",
                "64",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn mc_validate_passes_at_three_sigma_on_default_budget() {
    let out = bin()
        .args([
            "mc-validate",
            "--family",
            "phi3",
            "--law",
            "euler",
            "--dt",
            "0.0625",
            "--k",
            "16",
            "--alpha",
            "0.375",
            "--samples",
            "50000",
            "--seed",
            "3",
            "--dim",
            "128",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# validation: pass = true"));
}

#[test]
fn plot_flag_writes_svg_next_to_output() {
    let dir = std::env::temp_dir().join(format!("spde-weak-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("sweep.csv");
    let out = bin()
        .args([
            "strong-error",
            "--scheme",
            "spectral",
            "--N",
            "16,32,64,128",
            "--out",
            csv.to_str().unwrap(),
            "--plot",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.join("sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    assert!(csv_text.contains("N,mean_square_error"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn theorem0_command_reports_gap_columns() {
    let out = bin()
        .args(["theorem0", "--scheme", "temporal", "--M", "16,32,64"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("M,dt,phi2_gap,phi2_m,phi1_gap,phi1_eps,phi1_m"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#') && !l.contains("phi2_gap")).count(), 3);
}

#[test]
fn moments_command_classifies_divergence() {
    let out = bin()
        .args(["moments", "--law", "exact", "--T", "1", "--alpha", "0.2,0.3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "alpha,value,diverges,status");
    assert!(lines[1].ends_with("false,converged"));
    assert!(lines[2].ends_with("true,proved_divergent"));
}
