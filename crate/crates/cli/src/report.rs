//! The `report` subcommand: run every suite, write one directory of CSV
//! artifacts plus SVG convergence plots, and summarize pass/fail in
//! `index.json`. Output is byte-identical for a fixed seed, independent of
//! the worker count.

use crate::output::{fmt_f64, FitRecord, Format, Table, ValidationRecord, Value};
use crate::{CliError, CmdResult};
use clap::Args;
use serde_json::{json, Map};
use spde_weak::experiments::{
    c0_gap_spectral, c0_gap_temporal, c2_rate_spectral, c2_rate_temporal,
    lipschitz_rate_spectral, lipschitz_rate_temporal, lipschitz_rate_temporal_in_dt,
    moment_divergence_scan, strong_rate_spectral, strong_rate_temporal, Phi1Grid, RateOutcome,
    Scheme,
};
use spde_weak::gaussian::{
    c_alpha_closed_form, expect_phi2, expectation_truncated, f_exp_abs, limit_constant, LimitKind,
    TestFunction, F_PRIME_AT_ZERO,
};
use spde_weak::mc::{mc_expectation, mc_strong_error, MCConfig, StrongScheme, Substream};
use spde_weak::plot::{LogLogChart, Series};
use spde_weak::spectral::{
    alpha_moment_sup_bound, alpha_quarter_limit, alpha_quarter_riemann_sum, lambda,
    strong_error_temporal_truncated, Law, SeriesPolicy,
};
use spde_weak::special::erfcx;
use std::path::PathBuf;

#[derive(Args)]
pub struct ReportArgs {
    /// Output directory for the artifact set.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Sample budget of the Monte Carlo cross-checks.
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

struct Report {
    dir: PathBuf,
    format: Format,
    artifacts: Vec<String>,
    checks: Vec<(String, bool, String)>,
}

impl Report {
    fn write_table(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        let ext = match self.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let file = format!("{name}.{ext}");
        std::fs::write(self.dir.join(&file), table.render(self.format))?;
        self.artifacts.push(file);
        Ok(())
    }

    fn write_plot(&mut self, name: &str, chart: &LogLogChart) -> Result<(), CliError> {
        let file = format!("{name}.svg");
        std::fs::write(self.dir.join(&file), chart.render_svg())?;
        self.artifacts.push(file);
        Ok(())
    }

    fn check(&mut self, name: &str, pass: bool, detail: String) {
        self.checks.push((name.to_string(), pass, detail));
    }
}

fn rate_table(config: &[(&str, String)], rows: &[(String, Option<f64>, RateOutcome, f64)]) -> Table {
    let mut table = Table {
        columns: vec![
            "family",
            "alpha",
            "slope",
            "expected_slope",
            "r_squared",
            "prefactor_ratio",
            "within_tolerance",
        ],
        ..Default::default()
    };
    for (k, v) in config {
        table.push_config(k, v);
    }
    for (family, alpha, out, tol) in rows {
        let best = out.fit.best();
        table.rows.push(vec![
            Value::Str(family.clone()),
            alpha.map(Value::F64).unwrap_or(Value::Str(String::new())),
            Value::F64(best.slope),
            Value::F64(out.expected_slope),
            Value::F64(best.r_squared),
            out.prefactor_ratio
                .map(Value::F64)
                .unwrap_or(Value::Str(String::new())),
            Value::Bool((best.slope - out.expected_slope).abs() <= *tol),
        ]);
    }
    table
}

fn sweep_table(config: &[(&str, String)], out: &RateOutcome, index_name: &'static str) -> Table {
    let mut table = Table {
        columns: vec![index_name, "abscissa", "error"],
        ..Default::default()
    };
    for (k, v) in config {
        table.push_config(k, v);
    }
    for p in &out.sweep.points {
        table.rows.push(vec![
            Value::U64(p.index),
            Value::F64(p.abscissa),
            Value::F64(p.error),
        ]);
    }
    let best = out.fit.best();
    table.fit = Some(FitRecord {
        slope: best.slope,
        intercept: best.intercept,
        r2: best.r_squared,
    });
    table
}

fn sweep_chart(title: &str, x_label: &str, out: &RateOutcome) -> LogLogChart {
    let best = out.fit.best();
    LogLogChart {
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: "error".to_string(),
        series: vec![Series {
            label: format!("fitted slope {:.4}, expected {:.4}", best.slope, out.expected_slope),
            points: out.sweep.points.iter().map(|p| (p.abscissa, p.error)).collect(),
            fit: Some((best.slope, best.intercept)),
        }],
    }
}

pub fn cmd_report(args: ReportArgs) -> CmdResult {
    std::fs::create_dir_all(&args.out)?;
    let mut report = Report {
        dir: args.out.clone(),
        format: args.format,
        artifacts: Vec::new(),
        checks: Vec::new(),
    };
    let policy = SeriesPolicy::default();
    let t = args.t;
    let spectral_grid: Vec<u64> = (4..=10).map(|j| 1u64 << j).collect();
    let temporal_grid: Vec<u64> = (3..=8).map(|j| 1u64 << j).collect();
    let gap_grid: Vec<u64> = (4..=9).map(|j| 1u64 << j).collect();

    // ----- limit constants -----
    {
        let mut table = Table {
            columns: vec!["kind", "alpha", "value", "quad_error", "closed_form"],
            ..Default::default()
        };
        table.push_config("command", "report/constants");
        let mut all_ok = true;
        for &alpha in &[0.3, 0.375, 0.45] {
            let c = limit_constant(LimitKind::CAlpha { alpha }, &policy)?;
            let cbar = limit_constant(LimitKind::CbarAlpha { alpha }, &policy)?;
            let closed = c_alpha_closed_form(alpha)?;
            all_ok &= (c.value - closed).abs() < 1e-10 && cbar.value < c.value;
            table.rows.push(vec![
                Value::Str("C_alpha".into()),
                Value::F64(alpha),
                Value::F64(c.value),
                Value::F64(c.quad_error),
                Value::F64(closed),
            ]);
            table.rows.push(vec![
                Value::Str("Cbar_alpha".into()),
                Value::F64(alpha),
                Value::F64(cbar.value),
                Value::F64(cbar.quad_error),
                Value::Str(String::new()),
            ]);
        }
        for (kind, name) in [
            (LimitKind::Phi2ExactLimit, "Phi2ExactLimit"),
            (LimitKind::Phi2EulerLimit, "Phi2EulerLimit"),
        ] {
            let c = limit_constant(kind, &policy)?;
            table.rows.push(vec![
                Value::Str(name.into()),
                Value::Str(String::new()),
                Value::F64(c.value),
                Value::F64(c.quad_error),
                Value::Str(String::new()),
            ]);
        }
        report.write_table("constants", &table)?;
        report.check(
            "constants: quadrature matches closed forms, Cbar < C",
            all_ok,
            String::new(),
        );
    }

    // ----- covariance spot checks -----
    {
        // Closed-form Euler variance against the brute-force geometric sum
        // on 100 seeded random (n, T, dt, k) tuples.
        let mut stream = Substream::new(args.seed, 0, 0xc0de);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let n = 1 + stream.next_u64() % 200;
            let k = 1 + stream.next_u64() % 64;
            let dt = 10f64.powf(-6.0 * stream.next_uniform());
            let tt = 0.1 + 2.0 * stream.next_uniform();
            let law = Law::euler(dt, k)?;
            let lam = lambda(n);
            let mut brute = 0.0;
            for l in 1..=k {
                brute += (1.0 + lam * dt).powi(-2 * (l as i32));
            }
            brute *= dt;
            let rel = (law.mode_variance(n) - brute).abs() / brute.max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
            let _ = tt;
        }
        report.check(
            "covariance: Euler closed form vs brute force (100 tuples)",
            worst < 1e-12,
            format!("worst relative deviation {}", fmt_f64(worst)),
        );

        // Exact mode variance vs a seeded chi-square interval at 1e6 draws.
        let exact = Law::exact(t)?;
        let q1 = exact.mode_variance(1);
        let draws = 1_000_000u64;
        let mut acc = 0.0;
        for i in 0..draws {
            let x = q1.sqrt() * Substream::new(args.seed, i, 1).next_normal();
            acc += x * x;
        }
        let ratio = acc / draws as f64 / q1;
        let half_width = 2.575_829_303_548_901 * (2.0 / draws as f64).sqrt();
        report.check(
            "covariance: exact mode variance in 99% chi-square interval",
            (ratio - 1.0).abs() < half_width,
            format!("variance ratio {}", fmt_f64(ratio)),
        );
    }

    // ----- the auxiliary function f -----
    {
        let g = |x: f64| -erfcx(x / std::f64::consts::SQRT_2).ln();
        let h = 1e-5;
        let slope = (g(h) - g(-h)) / (2.0 * h);
        let ok_deriv = (slope - F_PRIME_AT_ZERO).abs() < 1e-6;
        let ok_zero = f_exp_abs(0.0)? == 0.0;
        let mut ok_mc = true;
        let mut detail = String::new();
        for &theta in &[0.1, 0.5, 1.0] {
            let draws = 1_000_000u64;
            let mut sum = 0.0;
            let mut sq = 0.0;
            for i in 0..draws {
                let z = Substream::new(args.seed ^ 0xf00d, i, 1).next_normal();
                let v = (-theta * z.abs()).exp();
                sum += v;
                sq += v * v;
            }
            let mean = sum / draws as f64;
            let var = (sq / draws as f64 - mean * mean).max(0.0);
            let se = (var / draws as f64).sqrt();
            let z_score = (f_exp_abs(theta)? - (-mean.ln())).abs() / (se / mean);
            ok_mc &= z_score < 3.0;
            detail.push_str(&format!("theta={theta}: z={:.2}; ", z_score));
        }
        report.check("f: value at zero, derivative, MC agreement", ok_zero && ok_deriv && ok_mc, detail);
    }

    // ----- moment scans -----
    {
        let grid: Vec<u64> = (4..=12).map(|j| 1u64 << j).collect();
        let rows = moment_divergence_scan(0.25, Scheme::Temporal, &grid, t, &policy)?;
        let mut table = Table {
            columns: vec!["N", "dt", "moment", "diverges"],
            ..Default::default()
        };
        table.push_config("command", "report/moments");
        table.push_config("alpha", 0.25);
        table.push_config("path", "dt = 1/N^2, k = floor(T/dt)");
        for r in &rows {
            table.rows.push(vec![
                Value::U64(r.index),
                Value::F64(r.dt.unwrap_or(f64::NAN)),
                Value::F64(r.moment.value),
                Value::Bool(r.moment.diverges),
            ]);
        }
        report.write_table("moments_critical", &table)?;
        let increasing = rows.windows(2).all(|w| w[1].moment.value > w[0].moment.value);
        let ratio = rows.last().unwrap().moment.value / rows.first().unwrap().moment.value;
        report.check(
            "moments: critical path increases without ceiling",
            increasing && ratio > 2.0,
            format!("growth ratio {}", fmt_f64(ratio)),
        );

        let sub = moment_divergence_scan(0.2, Scheme::Temporal, &grid, t, &policy)?;
        let bound = alpha_moment_sup_bound(0.2)?;
        let bounded = sub.iter().all(|r| r.moment.value <= bound && !r.moment.diverges);
        let mut table = Table {
            columns: vec!["N", "dt", "moment", "bound"],
            ..Default::default()
        };
        table.push_config("command", "report/moments");
        table.push_config("alpha", 0.2);
        for r in &sub {
            table.rows.push(vec![
                Value::U64(r.index),
                Value::F64(r.dt.unwrap_or(f64::NAN)),
                Value::F64(r.moment.value),
                Value::F64(bound),
            ]);
        }
        report.write_table("moments_subcritical", &table)?;
        report.check("moments: subcritical path stays under the uniform bound", bounded, String::new());

        let integral = alpha_quarter_limit(1, 1, &policy)?;
        let discrete = alpha_quarter_riemann_sum(1, 1, 1 << 14);
        let rel = (discrete - integral).abs() / integral;
        report.check(
            "moments: Riemann sum matches quarter-regularity integral within 1%",
            rel < 0.01,
            format!("relative gap {}", fmt_f64(rel)),
        );
    }

    // ----- weak rates -----
    {
        let mut rows = Vec::new();
        for &alpha in &[0.3, 0.375, 0.45] {
            rows.push((
                "phi3".to_string(),
                Some(alpha),
                lipschitz_rate_spectral(t, alpha, &spectral_grid, &policy)?,
                0.05,
            ));
        }
        rows.push(("gauss_exp".to_string(), None, c2_rate_spectral(t, &spectral_grid, &policy)?, 0.05));
        let table = rate_table(
            &[("command", "report/rates".into()), ("scheme", "spectral".into()), ("T", t.to_string())],
            &rows,
        );
        report.write_table("rates_spectral", &table)?;
        let ok = rows.iter().all(|(_, _, out, tol)| {
            (out.fit.best().slope - out.expected_slope).abs() <= *tol
        });
        let prefactor_ok = rows[1].2.prefactor_ratio.map(|r| (r - 1.0).abs() < 0.05).unwrap_or(false);
        report.check("rates: spectral slopes within tolerance", ok, String::new());
        report.check(
            "rates: spectral Lipschitz prefactor within 5%",
            prefactor_ok,
            format!("ratio {}", fmt_f64(rows[1].2.prefactor_ratio.unwrap_or(f64::NAN))),
        );

        let phi3_sweep = &rows[1].2;
        report.write_plot("weak_phi3_spectral", &sweep_chart("Lipschitz-family weak error, spectral", "lambda_N", phi3_sweep))?;
        report.write_table(
            "weak_phi3_spectral",
            &sweep_table(
                &[("command", "report/weak-error".into()), ("family", "phi3 alpha=0.375".into()), ("scheme", "spectral".into())],
                phi3_sweep,
                "N",
            ),
        )?;

        let mut rows = Vec::new();
        for &alpha in &[0.3, 0.375, 0.45] {
            rows.push((
                "phi3".to_string(),
                Some(alpha),
                lipschitz_rate_temporal(t, alpha, &temporal_grid, &policy)?,
                0.08,
            ));
        }
        rows.push(("gauss_exp".to_string(), None, c2_rate_temporal(t, &temporal_grid, &policy)?, 0.05));
        rows.push((
            "phi3_in_dt".to_string(),
            Some(0.4),
            lipschitz_rate_temporal_in_dt(t, 0.4, &temporal_grid, &policy)?,
            0.08,
        ));
        let table = rate_table(
            &[("command", "report/rates".into()), ("scheme", "temporal".into()), ("T", t.to_string())],
            &rows,
        );
        report.write_table("rates_temporal", &table)?;
        let ok = rows.iter().all(|(_, _, out, tol)| {
            (out.fit.best().slope - out.expected_slope).abs() <= *tol
        });
        report.check("rates: temporal slopes within tolerance", ok, String::new());
        let halved = rows[4].2.fit.best().slope < rows[3].2.fit.best().slope - 0.05;
        report.check(
            "rates: Lipschitz temporal order strictly below smooth order",
            halved,
            format!(
                "phi3 dt-slope {} vs gauss_exp {}",
                fmt_f64(rows[4].2.fit.best().slope),
                fmt_f64(rows[3].2.fit.best().slope)
            ),
        );
        report.write_plot("weak_gauss_temporal", &sweep_chart("smooth-family weak error, temporal", "dt", &rows[3].2))?;
    }

    // ----- strong rates -----
    {
        let spectral = strong_rate_spectral(t, &spectral_grid, &policy)?;
        let temporal = strong_rate_temporal(t, &temporal_grid, &policy)?;
        report.write_table(
            "strong_spectral",
            &sweep_table(&[("command", "report/strong-error".into()), ("scheme", "spectral".into())], &spectral, "N"),
        )?;
        report.write_table(
            "strong_temporal",
            &sweep_table(&[("command", "report/strong-error".into()), ("scheme", "temporal".into())], &temporal, "M"),
        )?;
        report.write_plot("strong_temporal", &sweep_chart("mean-square temporal error", "dt", &temporal))?;
        let ok = (spectral.fit.best().slope + 1.0).abs() <= 0.05
            && (temporal.fit.best().slope - 0.5).abs() <= 0.05;
        report.check("strong: mean-square orders -1 (spectral) and +1/2 (temporal)", ok, String::new());

        // Coupled-MC agreement at a representative step.
        let dt = 0.0625;
        let cfg = MCConfig { samples: args.samples, seed: args.seed, dim: 256, antithetic: false };
        let est = mc_strong_error(t, StrongScheme::Temporal { dt }, &cfg)?;
        let closed = strong_error_temporal_truncated(t, dt, cfg.dim)?;
        let z = (est.mean - closed).abs() / est.std_error.max(f64::MIN_POSITIVE);
        report.check(
            "strong: coupled MC matches closed form within 3 SE",
            z <= 3.0,
            format!("z = {}", fmt_f64(z)),
        );
    }

    // ----- non-convergence gap curves -----
    {
        let rows = c0_gap_spectral(t, &gap_grid, 1 << 12, &Phi1Grid::default(), &policy)?;
        let mut table = Table {
            columns: vec!["N", "phi2_gap", "phi2_m", "phi1_gap", "phi1_eps", "phi1_m"],
            ..Default::default()
        };
        table.push_config("command", "report/theorem0");
        table.push_config("scheme", "spectral");
        for r in &rows {
            table.rows.push(vec![
                Value::U64(r.index),
                Value::F64(r.phi2_gap),
                Value::U64(r.phi2_m),
                Value::F64(r.phi1_gap),
                Value::F64(r.phi1_eps),
                Value::U64(r.phi1_m),
            ]);
        }
        report.write_table("theorem0_spectral", &table)?;
        let floor = 0.9 * (1.0 - (-1.0 / (2.0 * std::f64::consts::PI.powi(2))).exp());
        let ok = rows.iter().all(|r| r.phi2_gap >= floor);
        report.check(
            "theorem0: spectral gap curve stays above 90% of the Riemann floor",
            ok,
            format!("floor {}", fmt_f64(floor)),
        );
        // While the sup stays up, each fixed member's error vanishes.
        let fixed = TestFunction::phi2(32)?;
        let exact_val = expect_phi2(&Law::exact(t)?, 32, &policy)?;
        let galerkin_val = expect_phi2(&Law::galerkin(t, 512)?, 32, &policy)?;
        let _ = fixed;
        let fixed_err = (exact_val - galerkin_val).abs();
        report.check(
            "theorem0: fixed oscillation member converges spectrally",
            fixed_err < 1e-6,
            format!("error at N=512: {}", fmt_f64(fixed_err)),
        );

        let rows = c0_gap_temporal(t, &gap_grid, &Phi1Grid::default(), &policy)?;
        let mut table = Table {
            columns: vec!["M", "dt", "phi2_gap", "phi2_m", "phi1_gap", "phi1_eps", "phi1_m"],
            ..Default::default()
        };
        table.push_config("command", "report/theorem0");
        table.push_config("scheme", "temporal");
        for r in &rows {
            table.rows.push(vec![
                Value::U64(r.index),
                Value::F64(r.dt.unwrap_or(f64::NAN)),
                Value::F64(r.phi2_gap),
                Value::U64(r.phi2_m),
                Value::F64(r.phi1_gap),
                Value::F64(r.phi1_eps),
                Value::U64(r.phi1_m),
            ]);
        }
        report.write_table("theorem0_temporal", &table)?;
        let exact_limit = limit_constant(LimitKind::Phi2ExactLimit, &policy)?.value;
        let euler_limit = limit_constant(LimitKind::Phi2EulerLimit, &policy)?.value;
        let target = (euler_limit - exact_limit).abs();
        let last = rows.last().expect("grid nonempty");
        let ok = (last.phi2_gap - target).abs() / target < 0.05;
        report.check(
            "theorem0: temporal gap converges to the limit difference within 5%",
            ok,
            format!("gap {} vs {}", fmt_f64(last.phi2_gap), fmt_f64(target)),
        );
        let chart = LogLogChart {
            title: "temporal oscillation gap".to_string(),
            x_label: "M".to_string(),
            y_label: "gap".to_string(),
            series: vec![Series {
                label: "phi2 channel".to_string(),
                points: rows.iter().map(|r| (r.index as f64, r.phi2_gap)).collect(),
                fit: None,
            }],
        };
        report.write_plot("theorem0_temporal", &chart)?;
    }

    // ----- MC validation of the expectation calculus -----
    {
        let mut table = Table {
            columns: vec!["family", "law", "closed_form", "mc_mean", "mc_std_error", "z", "pass"],
            ..Default::default()
        };
        table.push_config("command", "report/mc-validate");
        table.push_config("samples", args.samples);
        table.push_config("seed", args.seed);
        let cfg = MCConfig { samples: args.samples, seed: args.seed, dim: 256, antithetic: false };
        let mut max_z: f64 = 0.0;
        let checks: Vec<(TestFunction, Law, &str, String)> = vec![
            (TestFunction::gauss_exp(), Law::exact(t)?, "gauss_exp", format!("exact(T={t})")),
            (
                TestFunction::phi3(0.375, 1)?,
                Law::euler(t / 256.0, 256)?,
                "phi3",
                format!("euler(dt={}, k=256)", t / 256.0),
            ),
            (TestFunction::phi2(16)?, Law::exact(t)?, "phi2", format!("exact(T={t})")),
        ];
        for (tf, law, fam, law_desc) in checks {
            let closed = expectation_truncated(&tf, &law, cfg.dim, &policy)?;
            let est = mc_expectation(&law, &tf, &cfg)?;
            let z = (est.mean - closed).abs() / est.std_error.max(f64::MIN_POSITIVE);
            max_z = max_z.max(z);
            table.rows.push(vec![
                Value::Str(fam.to_string()),
                Value::Str(law_desc),
                Value::F64(closed),
                Value::F64(est.mean),
                Value::F64(est.std_error),
                Value::F64(z),
                Value::Bool(z <= 3.0),
            ]);
        }
        table.validation = Some(ValidationRecord { pass: max_z <= 3.0, max_z });
        report.write_table("mc_validate", &table)?;
        report.check(
            "mc: expectation estimates within 3 SE of closed forms",
            max_z <= 3.0,
            format!("max z {}", fmt_f64(max_z)),
        );
    }

    // ----- index -----
    let pass = report.checks.iter().all(|(_, ok, _)| *ok);
    let mut config = Map::new();
    config.insert("command".into(), json!("report"));
    config.insert("seed".into(), json!(args.seed));
    config.insert("T".into(), json!(fmt_f64(t)));
    config.insert("samples".into(), json!(args.samples));
    let index = json!({
        "config": config,
        "artifacts": report.artifacts,
        "checks": report
            .checks
            .iter()
            .map(|(name, ok, detail)| json!({"name": name, "pass": ok, "detail": detail}))
            .collect::<Vec<_>>(),
        "pass": pass,
    });
    let mut rendered = serde_json::to_string_pretty(&index).expect("index serialization");
    rendered.push('\n');
    std::fs::write(args.out.join("index.json"), rendered)?;

    for (name, ok, _) in &report.checks {
        println!("{} {}", if *ok { "pass" } else { "FAIL" }, name);
    }
    println!("{} checks, pass = {pass}", report.checks.len());
    Ok(if pass { 0 } else { 1 })
}
