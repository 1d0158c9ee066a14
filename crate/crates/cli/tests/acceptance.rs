//! Acceptance suite: every release gate runs here, one test per criterion,
//! each printing a pass line with its runtime (visible with --nocapture).
//!
//! Budgets are asserted, so a regression that makes a suite crawl fails the
//! gate along with any numerical drift.

use spde_weak::experiments::{
    c0_gap_spectral, c0_gap_temporal, c2_rate_spectral, c2_rate_temporal,
    lipschitz_rate_spectral, lipschitz_rate_temporal, lipschitz_rate_temporal_in_dt,
    moment_divergence_scan, strong_rate_spectral, strong_rate_temporal, Phi1Grid, Scheme,
};
use spde_weak::gaussian::{
    expect_phi2, f_exp_abs, limit_constant, LimitKind, F_PRIME_AT_ZERO,
};
use spde_weak::mc::{mc_strong_error, MCConfig, StrongScheme, Substream};
use spde_weak::special::erfcx;
use spde_weak::spectral::{
    alpha_moment, alpha_quarter_limit, alpha_quarter_riemann_sum, lambda,
    strong_error_temporal_truncated, Law, SeriesPolicy,
};
use std::time::Instant;

const Z99: f64 = 2.575_829_303_548_901;

fn policy() -> SeriesPolicy {
    SeriesPolicy::default()
}

fn pow2(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|j| 1u64 << j).collect()
}

fn finish(name: &str, start: Instant, budget_secs: u64) {
    let elapsed = start.elapsed();
    println!("[{name}] pass ({:.2} s)", elapsed.as_secs_f64());
    assert!(
        elapsed.as_secs() < budget_secs,
        "{name} exceeded its {budget_secs}s budget: {:?}",
        elapsed
    );
}

/// Criterion 1: Euler mode variances equal the brute-force geometric sum to
/// relative 1e-12 on 100 random tuples, and the exact mode variance sits in
/// the 99% chi-square interval of a million-sample estimate.
#[test]
fn criterion_1_covariance_correctness() {
    let start = Instant::now();

    let mut stream = Substream::new(0xacce97, 0, 1);
    for _ in 0..100 {
        let n = 1 + stream.next_u64() % 300;
        let k = 1 + stream.next_u64() % 64;
        let dt = 10f64.powf(-6.0 * stream.next_uniform());
        let _t = 0.1 + 2.0 * stream.next_uniform();
        let lam = lambda(n);
        let mut brute = 0.0;
        for l in 1..=k {
            brute += (1.0 + lam * dt).powi(-2 * (l as i32));
        }
        brute *= dt;
        let closed = Law::euler(dt, k).unwrap().mode_variance(n);
        assert!(
            (closed - brute).abs() <= 1e-12 * brute,
            "n={n} dt={dt} k={k}: closed {closed} vs brute {brute}"
        );
    }

    let law = Law::exact(1.0).unwrap();
    let q1 = law.mode_variance(1);
    let draws = 1_000_000u64;
    let mut acc = 0.0;
    for i in 0..draws {
        let x = q1.sqrt() * Substream::new(2024, i, 1).next_normal();
        acc += x * x;
    }
    let ratio = acc / draws as f64 / q1;
    let half_width = Z99 * (2.0 / draws as f64).sqrt();
    assert!(
        (ratio - 1.0).abs() < half_width,
        "variance ratio {ratio} outside the 99% chi-square interval"
    );

    finish("criterion 1: covariance", start, 60);
}

/// Criterion 2: f(0) = 0 exactly, the central difference of f at 0 recovers
/// sqrt(2/pi) within 1e-6, and f agrees with 1e7-draw Monte Carlo at
/// theta in {0.1, 0.5, 1.0} within 3 SE.
#[test]
fn criterion_2_f_function() {
    let start = Instant::now();

    assert_eq!(f_exp_abs(0.0).unwrap(), 0.0);

    let g = |x: f64| -erfcx(x / std::f64::consts::SQRT_2).ln();
    let h = 1e-5;
    let slope = (g(h) - g(-h)) / (2.0 * h);
    assert!(
        (slope - F_PRIME_AT_ZERO).abs() < 1e-6,
        "central difference {slope} vs {F_PRIME_AT_ZERO}"
    );

    let draws = 10_000_000u64;
    for &theta in &[0.1, 0.5, 1.0] {
        let mut sum = 0.0;
        let mut sq = 0.0;
        for i in 0..draws {
            let z = Substream::new(0x5eed, i, 1).next_normal();
            let v = (-theta * z.abs()).exp();
            sum += v;
            sq += v * v;
        }
        let mean = sum / draws as f64;
        let var = (sq / draws as f64 - mean * mean).max(0.0);
        let se_of_log = (var / draws as f64).sqrt() / mean;
        let diff = (f_exp_abs(theta).unwrap() - (-mean.ln())).abs();
        assert!(
            diff <= 3.0 * se_of_log,
            "theta {theta}: |f - MC| = {diff} vs 3 SE = {}",
            3.0 * se_of_log
        );
    }

    finish("criterion 2: f function", start, 60);
}

/// Criterion 3: spectral non-convergence. Over N in 2^4..2^9 with the
/// oscillation grid up to 2^12, every gap stays above 90% of
/// 1 - exp(-1/(2 pi^2)); meanwhile the fixed member M = 32 converges below
/// 1e-6.
#[test]
fn criterion_3_theorem0_spectral() {
    let start = Instant::now();
    let p = policy();

    let rows = c0_gap_spectral(1.0, &pow2(4, 9), 1 << 12, &Phi1Grid::default(), &p).unwrap();
    let floor = 0.9 * (1.0 - (-1.0 / (2.0 * std::f64::consts::PI.powi(2))).exp());
    for row in &rows {
        assert!(
            row.phi2_gap >= floor,
            "N = {}: gap {} below floor {floor}",
            row.index,
            row.phi2_gap
        );
    }

    let exact = Law::exact(1.0).unwrap();
    let mut fixed_errors = Vec::new();
    for &n in &pow2(4, 9) {
        let g = Law::galerkin(1.0, n).unwrap();
        fixed_errors
            .push((expect_phi2(&exact, 32, &p).unwrap() - expect_phi2(&g, 32, &p).unwrap()).abs());
    }
    for w in fixed_errors.windows(2) {
        assert!(w[1] <= w[0] + 1e-15, "fixed-member error must decay");
    }
    assert!(
        *fixed_errors.last().unwrap() < 1e-6,
        "fixed member error {} at the finest grid",
        fixed_errors.last().unwrap()
    );

    finish("criterion 3: theorem0 spectral", start, 60);
}

/// Criterion 4: temporal non-convergence. Along dt = T/M^2 the coupled
/// oscillation gap converges to |exp(-I2) - exp(-I1)| within 5% at M = 2^9.
#[test]
fn criterion_4_theorem0_temporal() {
    let start = Instant::now();
    let p = policy();

    let rows = c0_gap_temporal(1.0, &pow2(4, 9), &Phi1Grid::default(), &p).unwrap();
    let i1 = limit_constant(LimitKind::Phi2ExactLimit, &p).unwrap().value;
    let i2 = limit_constant(LimitKind::Phi2EulerLimit, &p).unwrap().value;
    let target = (i2 - i1).abs();
    let last = rows.last().unwrap();
    assert_eq!(last.index, 512);
    assert!(
        (last.phi2_gap - target).abs() / target < 0.05,
        "gap {} vs limit difference {target}",
        last.phi2_gap
    );

    finish("criterion 4: theorem0 temporal", start, 60);
}

/// Criterion 5: Lipschitz-family rates. Spectral slopes vs lambda_N equal
/// -alpha within 0.05 at R^2 >= 0.99 for alpha in {0.3, 0.375, 0.45} up to
/// N = 2^10; temporal slopes vs M equal -2 alpha within 0.08 up to M = 2^8;
/// the spectral prefactor lands on f'(0) E[phi3] C_alpha within 5%.
#[test]
fn criterion_5_lipschitz_rates() {
    let start = Instant::now();
    let p = policy();

    for &alpha in &[0.3, 0.375, 0.45] {
        let out = lipschitz_rate_spectral(1.0, alpha, &pow2(4, 10), &p).unwrap();
        let fit = out.fit.best();
        assert!(
            (fit.slope + alpha).abs() <= 0.05,
            "alpha {alpha}: spectral slope {} vs {}",
            fit.slope,
            -alpha
        );
        assert!(fit.r_squared >= 0.99, "alpha {alpha}: R^2 = {}", fit.r_squared);
        let ratio = out.prefactor_ratio.unwrap();
        assert!(
            (ratio - 1.0).abs() < 0.05,
            "alpha {alpha}: prefactor ratio {ratio}"
        );

        let out = lipschitz_rate_temporal(1.0, alpha, &pow2(3, 8), &p).unwrap();
        let fit = out.fit.best();
        assert!(
            (fit.slope + 2.0 * alpha).abs() <= 0.08,
            "alpha {alpha}: temporal slope {} vs {}",
            fit.slope,
            -2.0 * alpha
        );
    }

    finish("criterion 5: Lipschitz rates", start, 300);
}

/// Criterion 6: smooth-family rates. Slopes -1 in N and +1/2 in dt within
/// 0.05, and on the identical temporal grid the Lipschitz dt-exponent is
/// near alpha, strictly below 1/2.
#[test]
fn criterion_6_smooth_rates_and_order_halving() {
    let start = Instant::now();
    let p = policy();

    let spectral = c2_rate_spectral(1.0, &pow2(4, 10), &p).unwrap();
    assert!(
        (spectral.fit.best().slope + 1.0).abs() <= 0.05,
        "spectral slope {}",
        spectral.fit.best().slope
    );

    let grid = pow2(3, 8);
    let temporal = c2_rate_temporal(1.0, &grid, &p).unwrap();
    let smooth_slope = temporal.fit.best().slope;
    assert!((smooth_slope - 0.5).abs() <= 0.05, "temporal slope {smooth_slope}");

    let alpha = 0.4;
    let halved = lipschitz_rate_temporal_in_dt(1.0, alpha, &grid, &p).unwrap();
    let lip_slope = halved.fit.best().slope;
    assert!((lip_slope - alpha).abs() <= 0.08, "Lipschitz dt-slope {lip_slope}");
    assert!(
        lip_slope < smooth_slope - 0.05,
        "order halving missing: {lip_slope} vs {smooth_slope}"
    );

    finish("criterion 6: smooth rates", start, 120);
}

/// Criterion 7: strong orders. Closed-form mean-square slopes -1 in N and
/// +1/2 in dt within 0.05, and coupled Monte Carlo at T = 1, dim 256, 1e5
/// samples matches the truncated closed forms within 3 SE for
/// dt in {1/4, 1/16, 1/64}.
#[test]
fn criterion_7_strong_orders() {
    let start = Instant::now();
    let p = policy();

    let spectral = strong_rate_spectral(1.0, &pow2(4, 10), &p).unwrap();
    assert!(
        (spectral.fit.best().slope + 1.0).abs() <= 0.05,
        "spectral slope {}",
        spectral.fit.best().slope
    );
    let temporal = strong_rate_temporal(1.0, &pow2(1, 6), &p).unwrap();
    assert!(
        (temporal.fit.best().slope - 0.5).abs() <= 0.05,
        "temporal slope {}",
        temporal.fit.best().slope
    );

    let cfg = MCConfig { samples: 100_000, seed: 7, dim: 256, antithetic: false };
    for &dt in &[0.25, 0.0625, 0.015625] {
        let est = mc_strong_error(1.0, StrongScheme::Temporal { dt }, &cfg).unwrap();
        let closed = strong_error_temporal_truncated(1.0, dt, cfg.dim).unwrap();
        let z = (est.mean - closed).abs() / est.std_error;
        assert!(z <= 3.0, "dt = {dt}: z = {z} (mc {} vs closed {closed})", est.mean);
    }

    finish("criterion 7: strong orders", start, 300);
}

/// Criterion 8: regularity thresholds. Divergence flags reproduce the three
/// equivalences on alpha grids straddling 1/4 and 3/4; the critical Euler
/// moment along dt = 1/N^2 grows strictly with final/initial ratio above 2
/// over N in 2^4..2^12; and the discrete Riemann sum at N = 2^14 matches the
/// limit integral within 1%.
#[test]
fn criterion_8_moment_thresholds() {
    let start = Instant::now();
    let p = policy();

    let exact = Law::exact(1.0).unwrap();
    let galerkin = Law::galerkin(1.0, 128).unwrap();
    let euler = Law::euler(0.01, 100).unwrap();
    for &alpha in &[0.0, 0.1, 0.2, 0.24] {
        assert!(!alpha_moment(&exact, alpha, &p).unwrap().diverges);
    }
    for &alpha in &[0.25, 0.26, 0.5, 0.74, 0.75, 1.0] {
        assert!(alpha_moment(&exact, alpha, &p).unwrap().diverges, "exact alpha {alpha}");
    }
    for &alpha in &[0.0, 0.25, 0.5, 0.74] {
        assert!(!alpha_moment(&euler, alpha, &p).unwrap().diverges, "euler alpha {alpha}");
    }
    for &alpha in &[0.75, 0.76, 0.9, 1.0] {
        assert!(alpha_moment(&euler, alpha, &p).unwrap().diverges, "euler alpha {alpha}");
    }
    for &alpha in &[0.0, 0.25, 0.5, 0.75, 1.0] {
        assert!(!alpha_moment(&galerkin, alpha, &p).unwrap().diverges);
    }

    let rows = moment_divergence_scan(0.25, Scheme::Temporal, &pow2(4, 12), 1.0, &p).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].moment.value > w[0].moment.value, "critical moment must grow");
    }
    let ratio = rows.last().unwrap().moment.value / rows.first().unwrap().moment.value;
    assert!(ratio > 2.0, "growth ratio {ratio}");

    let integral = alpha_quarter_limit(1, 1, &p).unwrap();
    let discrete = alpha_quarter_riemann_sum(1, 1, 1 << 14);
    assert!(
        (discrete - integral).abs() / integral < 0.01,
        "Riemann sum {discrete} vs integral {integral}"
    );

    finish("criterion 8: moment thresholds", start, 120);
}

/// Criterion 9: reproducibility. `report --seed 7` produces byte-identical
/// artifact directories across runs and across SPDE_THREADS settings.
#[test]
fn criterion_9_report_reproducibility() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_spde-weak");
    let base = std::env::temp_dir().join(format!("spde-weak-acceptance-{}", std::process::id()));
    let dirs = [base.join("a"), base.join("b"), base.join("c")];
    // Modest sample budget: this criterion checks determinism, not statistics.
    for (dir, threads) in dirs.iter().zip(["2", "1", "8"]) {
        let status = std::process::Command::new(bin)
            .args([
                "report",
                "--seed",
                "7",
                "--samples",
                "20000",
                "--out",
                dir.to_str().unwrap(),
            ])
            .env("SPDE_THREADS", threads)
            .status()
            .expect("report run");
        assert!(status.success(), "report exited nonzero");
    }
    let listing = |dir: &std::path::Path| -> Vec<String> {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    let names = listing(&dirs[0]);
    assert!(names.contains(&"index.json".to_string()));
    for other in &dirs[1..] {
        assert_eq!(names, listing(other), "artifact sets differ");
        for name in &names {
            let a = std::fs::read(dirs[0].join(name)).unwrap();
            let b = std::fs::read(other.join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between runs");
        }
    }
    std::fs::remove_dir_all(&base).ok();

    finish("criterion 9: report reproducibility", start, 300);
}
