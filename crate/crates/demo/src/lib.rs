//! Browser bindings for the discretization-error explorer.
//!
//! Three interactive operations, each returning a JSON object with an inline
//! SVG chart and the headline numbers the page displays:
//!
//! - [`weak_error_chart`]: weak-error decay of a test-function family under
//!   either discretization, with the fitted slope against the expected one.
//! - [`gap_chart`]: the non-convergence gap curve over the bounded-continuous
//!   witnesses, against the analytic floor or limit.
//! - [`moment_chart`]: the quarter-regularity moment along `dt = 1/N^2`,
//!   where the critical exponent grows without ceiling and subcritical ones
//!   stay bounded.
//!
//! Everything is a pure function of its arguments, so the exports are unit
//! tested natively; the wasm build only adds the JS glue.

use serde_json::json;
use spde_weak::experiments::{
    c0_gap_spectral, c0_gap_temporal, c2_rate_spectral, c2_rate_temporal,
    lipschitz_rate_spectral, lipschitz_rate_temporal, moment_divergence_scan, Phi1Grid,
    RateOutcome, Scheme,
};
use spde_weak::gaussian::{limit_constant, LimitKind};
use spde_weak::plot::{LogLogChart, Series};
use spde_weak::spectral::{alpha_moment_sup_bound, SeriesPolicy};
use wasm_bindgen::prelude::wasm_bindgen;

fn policy() -> SeriesPolicy {
    SeriesPolicy::default()
}

fn grid(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|j| 1u64 << j).collect()
}

fn err_json(message: impl std::fmt::Display) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn rate_json(out: &RateOutcome, title: &str, x_label: &str) -> String {
    let best = out.fit.best();
    let chart = LogLogChart {
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: "weak error".to_string(),
        series: vec![Series {
            label: format!("fitted slope {:.4}", best.slope),
            points: out.sweep.points.iter().map(|p| (p.abscissa, p.error)).collect(),
            fit: Some((best.slope, best.intercept)),
        }],
    };
    json!({
        "svg": chart.render_svg(),
        "slope": best.slope,
        "expected_slope": out.expected_slope,
        "r_squared": best.r_squared,
    })
    .to_string()
}

/// Weak-error sweep for one family. `scheme` is "spectral" or "temporal",
/// `family` is "phi3" or "gauss_exp"; `alpha` is the Lipschitz regularity
/// (ignored for the smooth family).
#[wasm_bindgen]
pub fn weak_error_chart(scheme: &str, family: &str, alpha: f64, t: f64) -> String {
    let p = policy();
    let result = match (scheme, family) {
        ("spectral", "phi3") => lipschitz_rate_spectral(t, alpha, &grid(4, 9), &p)
            .map(|o| rate_json(&o, "Lipschitz family, Galerkin truncation", "lambda_N")),
        ("temporal", "phi3") => lipschitz_rate_temporal(t, alpha, &grid(3, 7), &p)
            .map(|o| rate_json(&o, "Lipschitz family, implicit Euler", "M  (dt = T/M^2)")),
        ("spectral", "gauss_exp") => c2_rate_spectral(t, &grid(4, 9), &p)
            .map(|o| rate_json(&o, "smooth family, Galerkin truncation", "N")),
        ("temporal", "gauss_exp") => c2_rate_temporal(t, &grid(3, 7), &p)
            .map(|o| rate_json(&o, "smooth family, implicit Euler", "dt")),
        _ => return err_json("unknown scheme/family combination"),
    };
    result.unwrap_or_else(err_json)
}

/// Non-convergence gap curve for the bounded-continuous witnesses.
#[wasm_bindgen]
pub fn gap_chart(scheme: &str, t: f64) -> String {
    let p = policy();
    let phi1 = Phi1Grid {
        eps: (0..=5).map(|j| 0.5f64.powi(j)).collect(),
        m: (1..=5).map(|j| 4u64.pow(j)).collect(),
    };
    let (rows, reference, ref_label) = match scheme {
        "spectral" => {
            let rows = match c0_gap_spectral(t, &grid(3, 8), 1 << 11, &phi1, &p) {
                Ok(r) => r,
                Err(e) => return err_json(e),
            };
            let limit = match limit_constant(LimitKind::Phi2ExactLimit, &p) {
                Ok(c) => 1.0 - c.value,
                Err(e) => return err_json(e),
            };
            (rows, limit, "1 - exp(-1/(2 pi^2))")
        }
        "temporal" => {
            let rows = match c0_gap_temporal(t, &grid(3, 8), &phi1, &p) {
                Ok(r) => r,
                Err(e) => return err_json(e),
            };
            let (exact, euler) = match (
                limit_constant(LimitKind::Phi2ExactLimit, &p),
                limit_constant(LimitKind::Phi2EulerLimit, &p),
            ) {
                (Ok(a), Ok(b)) => (a.value, b.value),
                _ => return err_json("quadrature failed"),
            };
            (rows, (euler - exact).abs(), "limit difference")
        }
        _ => return err_json("unknown scheme"),
    };
    let chart = LogLogChart {
        title: "sup weak error over bounded continuous witnesses".to_string(),
        x_label: if scheme == "spectral" { "N" } else { "M  (dt = T/M^2)" }.to_string(),
        y_label: "gap".to_string(),
        series: vec![
            Series {
                label: "phi2 channel".to_string(),
                points: rows.iter().map(|r| (r.index as f64, r.phi2_gap)).collect(),
                fit: None,
            },
            Series {
                label: "phi1 channel".to_string(),
                points: rows.iter().map(|r| (r.index as f64, r.phi1_gap)).collect(),
                fit: None,
            },
        ],
    };
    let last = rows.last().expect("grid nonempty");
    json!({
        "svg": chart.render_svg(),
        "final_gap": last.phi2_gap,
        "reference": reference,
        "reference_label": ref_label,
    })
    .to_string()
}

/// Quarter-regularity moment scan along `dt = 1/N^2`.
#[wasm_bindgen]
pub fn moment_chart(alpha: f64, t: f64) -> String {
    let p = policy();
    let rows = match moment_divergence_scan(alpha, Scheme::Temporal, &grid(4, 10), t, &p) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    let mut series = vec![Series {
        label: format!("alpha = {alpha}"),
        points: rows.iter().map(|r| (r.index as f64, r.moment.value)).collect(),
        fit: None,
    }];
    let bound = alpha_moment_sup_bound(alpha).ok();
    if let Some(b) = bound {
        series.push(Series {
            label: "uniform bound".to_string(),
            points: rows.iter().map(|r| (r.index as f64, b)).collect(),
            fit: None,
        });
    }
    let chart = LogLogChart {
        title: "alpha-norm second moment along dt = 1/N^2".to_string(),
        x_label: "N".to_string(),
        y_label: "moment".to_string(),
        series,
    };
    let first = rows.first().expect("grid nonempty").moment.value;
    let last = rows.last().expect("grid nonempty").moment.value;
    json!({
        "svg": chart.render_svg(),
        "growth_ratio": last / first,
        "bounded": bound.is_some(),
        "uniform_bound": bound,
    })
    .to_string()
}
