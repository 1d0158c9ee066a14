//! Sweeps and rate fits that certify the convergence (and non-convergence)
//! behavior of the discretizations against the closed forms, with optional
//! Monte Carlo cross-checks.
//!
//! Three suites mirror the three regularity classes of test functions:
//!
//! - [`c0_gap_spectral`] / [`c0_gap_temporal`]: the sup of the weak error
//!   over the bounded-continuous witnesses (`Phi1`, `Phi2` channels) does
//!   not decay — the gap curves settle at positive constants.
//! - [`lipschitz_rate_spectral`] / [`lipschitz_rate_temporal`]: for the
//!   bounded Lipschitz family `Phi3` the weak order equals the strong order:
//!   slope `-alpha` in `lambda_N`, `-2 alpha` in the oscillation index.
//! - [`c2_rate_spectral`] / [`c2_rate_temporal`]: for the smooth
//!   representative the weak order doubles: slope `-1` in `N`, `+1/2` in `dt`.
//!
//! [`strong_rate_spectral`] / [`strong_rate_temporal`] fit the mean-square
//! errors themselves, and [`moment_divergence_scan`] traces the
//! quarter-regularity moment blow-up along `dt = 1/N^2`.

use crate::gaussian::{
    c_alpha_closed_form, expect_phi3, expectation, expectation_truncated, TestFunction,
    F_PRIME_AT_ZERO,
};
use crate::mc::{mc_weak_error, Estimate, MCConfig};
use crate::spectral::{
    alpha_moment, lambda, strong_error_spectral, strong_error_temporal, AlphaMoment, Law,
    SeriesPolicy,
};
use crate::{Error, Result};

/// Discretization direction of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Spectral,
    Temporal,
}

/// Weak errors below this are floating point noise and are excluded from fits.
pub const FIT_NOISE_FLOOR: f64 = 1e-13;

/// Ordinary least squares on `(log x, log y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Per-point log-residuals, in sweep order.
    pub residuals: Vec<f64>,
}

/// A fit plus the one permitted refit that drops the coarsest grid point
/// when the first regression is visibly pre-asymptotic.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub primary: RateFit,
    pub refit: Option<RateFit>,
}

impl FitReport {
    /// The fit the suite stands behind: the refit when one was taken.
    pub fn best(&self) -> &RateFit {
        self.refit.as_ref().unwrap_or(&self.primary)
    }
}

/// Log-log least squares over `(parameter, error)` pairs.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewFitPoints(points.len()));
    }
    for (i, &(x, y)) in points.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) || !(y > 0.0 && y.is_finite()) {
            return Err(Error::NonPositiveFitValue { index: i, value: y.min(x) });
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residuals: Vec<f64> = logs
        .iter()
        .map(|p| p.1 - (intercept + slope * p.0))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        n_points: points.len(),
        residuals,
    })
}

/// Fit, then refit once without the coarsest point if `R^2 < 0.98`.
pub fn fit_rate_with_refit(points: &[(f64, f64)]) -> Result<FitReport> {
    let primary = fit_rate(points)?;
    let refit = if primary.r_squared < 0.98 && points.len() >= 4 {
        Some(fit_rate(&points[1..])?)
    } else {
        None
    };
    Ok(FitReport { primary, refit })
}

/// One grid point of a weak- or strong-error sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    /// Grid index: the Galerkin dimension `N` or the oscillation index `M`.
    pub index: u64,
    /// Abscissa the rate is fitted against (`lambda_N`, `N`, `M`, or `dt`).
    pub abscissa: f64,
    pub error: f64,
}

/// A sweep of closed-form errors over a discretization grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub scheme: Scheme,
    pub t: f64,
    pub points: Vec<SweepPoint>,
}

/// Outcome of a rate suite: the sweep, its fit, and the expected exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct RateOutcome {
    pub sweep: Sweep,
    pub fit: FitReport,
    pub expected_slope: f64,
    /// Spectral Lipschitz suite only: the measured-to-predicted asymptote
    /// ratio `error * N^{2 alpha} / (f'(0) E[phi3] C_alpha)` at the finest N.
    pub prefactor_ratio: Option<f64>,
}

/// One weak-error comparison, kept symbolic so it can be evaluated in closed
/// form or handed to the Monte Carlo cross-check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakErrorCase {
    pub index: u64,
    pub abscissa: f64,
    pub tf: TestFunction,
    pub law_a: Law,
    pub law_b: Law,
}

fn check_grid(grid: &[u64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::EmptyGrid);
        }
    }
    Ok(())
}

fn lipschitz_cases_spectral(t: f64, alpha: f64, n_grid: &[u64]) -> Result<Vec<WeakErrorCase>> {
    check_grid(n_grid)?;
    let tf = TestFunction::phi3(alpha, 1)?;
    let exact = Law::exact(t)?;
    n_grid
        .iter()
        .map(|&n| {
            Ok(WeakErrorCase {
                index: n,
                abscissa: lambda(n),
                tf,
                law_a: exact,
                law_b: Law::galerkin(t, n)?,
            })
        })
        .collect()
}

fn lipschitz_cases_temporal(t: f64, alpha: f64, m_grid: &[u64]) -> Result<Vec<WeakErrorCase>> {
    check_grid(m_grid)?;
    let exact = Law::exact(t)?;
    m_grid
        .iter()
        .map(|&m| {
            let dt = t / (m * m) as f64;
            Ok(WeakErrorCase {
                index: m,
                abscissa: m as f64,
                tf: TestFunction::phi3(alpha, m)?,
                law_a: exact,
                law_b: Law::euler(dt, m * m)?,
            })
        })
        .collect()
}

fn c2_cases_spectral(t: f64, n_grid: &[u64]) -> Result<Vec<WeakErrorCase>> {
    check_grid(n_grid)?;
    let exact = Law::exact(t)?;
    n_grid
        .iter()
        .map(|&n| {
            Ok(WeakErrorCase {
                index: n,
                abscissa: n as f64,
                tf: TestFunction::gauss_exp(),
                law_a: exact,
                law_b: Law::galerkin(t, n)?,
            })
        })
        .collect()
}

fn c2_cases_temporal(t: f64, m_grid: &[u64]) -> Result<Vec<WeakErrorCase>> {
    check_grid(m_grid)?;
    let exact = Law::exact(t)?;
    m_grid
        .iter()
        .map(|&m| {
            let dt = t / (m * m) as f64;
            Ok(WeakErrorCase {
                index: m,
                abscissa: dt,
                tf: TestFunction::gauss_exp(),
                law_a: exact,
                law_b: Law::euler(dt, m * m)?,
            })
        })
        .collect()
}

/// Same grid as the smooth temporal suite but with the Lipschitz family, for
/// the order-halving contrast: abscissa `dt`, expected slope `alpha`.
fn lipschitz_cases_temporal_dt_abscissa(
    t: f64,
    alpha: f64,
    m_grid: &[u64],
) -> Result<Vec<WeakErrorCase>> {
    let mut cases = lipschitz_cases_temporal(t, alpha, m_grid)?;
    for case in &mut cases {
        case.abscissa = t / (case.index * case.index) as f64;
    }
    Ok(cases)
}

/// Evaluate the closed-form weak errors of a set of cases.
pub fn weak_error_sweep(
    scheme: Scheme,
    t: f64,
    cases: &[WeakErrorCase],
    policy: &SeriesPolicy,
) -> Result<Sweep> {
    let points = cases
        .iter()
        .map(|case| {
            let ea = expectation(&case.tf, &case.law_a, policy)?;
            let eb = expectation(&case.tf, &case.law_b, policy)?;
            Ok(SweepPoint {
                index: case.index,
                abscissa: case.abscissa,
                error: (ea - eb).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { scheme, t, points })
}

fn fit_sweep(sweep: &Sweep) -> Result<FitReport> {
    let fit_points: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter(|p| p.error > FIT_NOISE_FLOOR)
        .map(|p| (p.abscissa, p.error))
        .collect();
    fit_rate_with_refit(&fit_points)
}

/// Weak rate of the bounded Lipschitz family under Galerkin truncation:
/// slope `-alpha` against `lambda_N`.
pub fn lipschitz_rate_spectral(
    t: f64,
    alpha: f64,
    n_grid: &[u64],
    policy: &SeriesPolicy,
) -> Result<RateOutcome> {
    let cases = lipschitz_cases_spectral(t, alpha, n_grid)?;
    let sweep = weak_error_sweep(Scheme::Spectral, t, &cases, policy)?;
    let fit = fit_sweep(&sweep)?;

    // error * N^{2 alpha} -> f'(0) E[phi3] C_alpha as N grows.
    let last = sweep.points.last().expect("grid is nonempty");
    let e_phi3 = expect_phi3(&Law::exact(t)?, alpha, 1, policy)?;
    let predicted = F_PRIME_AT_ZERO * e_phi3 * c_alpha_closed_form(alpha)?;
    let ratio = last.error * (last.index as f64).powf(2.0 * alpha) / predicted;

    Ok(RateOutcome {
        sweep,
        fit,
        expected_slope: -alpha,
        prefactor_ratio: Some(ratio),
    })
}

/// Weak rate of the bounded Lipschitz family under the Euler scheme along
/// `dt = T / M^2`: slope `-2 alpha` against the family index `M`.
pub fn lipschitz_rate_temporal(
    t: f64,
    alpha: f64,
    m_grid: &[u64],
    policy: &SeriesPolicy,
) -> Result<RateOutcome> {
    let cases = lipschitz_cases_temporal(t, alpha, m_grid)?;
    let sweep = weak_error_sweep(Scheme::Temporal, t, &cases, policy)?;
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome {
        sweep,
        fit,
        expected_slope: -2.0 * alpha,
        prefactor_ratio: None,
    })
}

/// Same grid and family as the temporal Lipschitz suite, but fitted against
/// `dt` for the contrast with the smooth family: expected slope `+alpha`.
pub fn lipschitz_rate_temporal_in_dt(
    t: f64,
    alpha: f64,
    m_grid: &[u64],
    policy: &SeriesPolicy,
) -> Result<RateOutcome> {
    let cases = lipschitz_cases_temporal_dt_abscissa(t, alpha, m_grid)?;
    let sweep = weak_error_sweep(Scheme::Temporal, t, &cases, policy)?;
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome {
        sweep,
        fit,
        expected_slope: alpha,
        prefactor_ratio: None,
    })
}

/// Weak rate of the smooth representative under Galerkin truncation:
/// slope `-1` against `N`.
pub fn c2_rate_spectral(t: f64, n_grid: &[u64], policy: &SeriesPolicy) -> Result<RateOutcome> {
    let cases = c2_cases_spectral(t, n_grid)?;
    let sweep = weak_error_sweep(Scheme::Spectral, t, &cases, policy)?;
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome {
        sweep,
        fit,
        expected_slope: -1.0,
        prefactor_ratio: None,
    })
}

/// Weak rate of the smooth representative under the Euler scheme along
/// `dt = T / M^2`: slope `+1/2` against `dt`.
pub fn c2_rate_temporal(t: f64, m_grid: &[u64], policy: &SeriesPolicy) -> Result<RateOutcome> {
    let cases = c2_cases_temporal(t, m_grid)?;
    let sweep = weak_error_sweep(Scheme::Temporal, t, &cases, policy)?;
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome {
        sweep,
        fit,
        expected_slope: 0.5,
        prefactor_ratio: None,
    })
}

/// Mean-square spatial error sweep: slope `-1` against `N`.
pub fn strong_rate_spectral(t: f64, n_grid: &[u64], policy: &SeriesPolicy) -> Result<RateOutcome> {
    check_grid(n_grid)?;
    let points = n_grid
        .iter()
        .map(|&n| {
            Ok(SweepPoint {
                index: n,
                abscissa: n as f64,
                error: strong_error_spectral(t, n, policy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = Sweep { scheme: Scheme::Spectral, t, points };
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome { sweep, fit, expected_slope: -1.0, prefactor_ratio: None })
}

/// Mean-square temporal error sweep along `dt = T / M^2`: slope `+1/2`
/// against `dt`.
pub fn strong_rate_temporal(t: f64, m_grid: &[u64], policy: &SeriesPolicy) -> Result<RateOutcome> {
    check_grid(m_grid)?;
    let points = m_grid
        .iter()
        .map(|&m| {
            let dt = t / (m * m) as f64;
            Ok(SweepPoint {
                index: m,
                abscissa: dt,
                error: strong_error_temporal(t, dt, policy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = Sweep { scheme: Scheme::Temporal, t, points };
    let fit = fit_sweep(&sweep)?;
    Ok(RateOutcome { sweep, fit, expected_slope: 0.5, prefactor_ratio: None })
}

/// Member grids the non-convergence suite searches over for the `Phi1`
/// channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Phi1Grid {
    pub eps: Vec<f64>,
    pub m: Vec<u64>,
}

impl Default for Phi1Grid {
    fn default() -> Self {
        Self {
            eps: (0..=6).map(|j| 0.5f64.powi(j)).collect(),
            m: (1..=6).map(|j| 4u64.pow(j)).collect(),
        }
    }
}

/// One grid point of a non-convergence gap curve, with the arg-max member of
/// each channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    /// Galerkin dimension `N` (spectral) or coupling index `M` (temporal).
    pub index: u64,
    /// Step size for the temporal scheme.
    pub dt: Option<f64>,
    pub phi2_gap: f64,
    pub phi2_m: u64,
    pub phi1_gap: f64,
    pub phi1_eps: f64,
    pub phi1_m: u64,
}

/// Gap curve of the spectral scheme over the bounded-continuous witnesses.
///
/// Per dimension `N`, the `Phi2` channel is maximized over oscillation
/// indices up to `phi2_m_max`; once `M >= 2N + 2` the Galerkin expectation
/// pins at 1 while the exact one sits near its Riemann limit, so the curve
/// floors at `1 - exp(-1/(2 pi^2))` instead of decaying.
pub fn c0_gap_spectral(
    t: f64,
    n_grid: &[u64],
    phi2_m_max: u64,
    phi1_grid: &Phi1Grid,
    policy: &SeriesPolicy,
) -> Result<Vec<GapRow>> {
    check_grid(n_grid)?;
    let exact = Law::exact(t)?;
    n_grid
        .iter()
        .map(|&n| {
            let galerkin = Law::galerkin(t, n)?;
            let (phi2_gap, phi2_m) = phi2_channel_max(&exact, &galerkin, phi2_m_max, policy)?;
            let (phi1_gap, phi1_eps, phi1_m) =
                phi1_channel_max(&exact, &galerkin, phi1_grid, policy)?;
            Ok(GapRow {
                index: n,
                dt: None,
                phi2_gap,
                phi2_m,
                phi1_gap,
                phi1_eps,
                phi1_m,
            })
        })
        .collect()
}

/// Gap curve of the temporal scheme along `dt = T / M^2`.
///
/// The `Phi2` channel evaluates the coupled member `phi2_M`, whose gap
/// converges to the difference of the two Riemann limits; the `Phi1` channel
/// is maximized over its member grid.
pub fn c0_gap_temporal(
    t: f64,
    m_grid: &[u64],
    phi1_grid: &Phi1Grid,
    policy: &SeriesPolicy,
) -> Result<Vec<GapRow>> {
    check_grid(m_grid)?;
    let exact = Law::exact(t)?;
    m_grid
        .iter()
        .map(|&m| {
            let dt = t / (m * m) as f64;
            let euler = Law::euler(dt, m * m)?;
            let phi2_m = if m % 2 == 0 { m } else { m + 1 };
            let phi2_gap = (expectation(&TestFunction::phi2(phi2_m)?, &exact, policy)?
                - expectation(&TestFunction::phi2(phi2_m)?, &euler, policy)?)
            .abs();
            let (phi1_gap, phi1_eps, phi1_m) =
                phi1_channel_max(&exact, &euler, phi1_grid, policy)?;
            Ok(GapRow {
                index: m,
                dt: Some(dt),
                phi2_gap,
                phi2_m,
                phi1_gap,
                phi1_eps,
                phi1_m,
            })
        })
        .collect()
}

fn phi2_channel_max(
    law_a: &Law,
    law_b: &Law,
    m_max: u64,
    policy: &SeriesPolicy,
) -> Result<(f64, u64)> {
    let mut best = (0.0f64, 0u64);
    let mut m = 4u64;
    while m <= m_max {
        let tf = TestFunction::phi2(m)?;
        let gap = (expectation(&tf, law_a, policy)? - expectation(&tf, law_b, policy)?).abs();
        if gap > best.0 {
            best = (gap, m);
        }
        m *= 2;
    }
    Ok(best)
}

fn phi1_channel_max(
    law_a: &Law,
    law_b: &Law,
    grid: &Phi1Grid,
    policy: &SeriesPolicy,
) -> Result<(f64, f64, u64)> {
    let mut best = (0.0f64, 0.0f64, 0u64);
    for &eps in &grid.eps {
        for &m in &grid.m {
            let tf = TestFunction::phi1(eps, m)?;
            let gap = (expectation(&tf, law_a, policy)? - expectation(&tf, law_b, policy)?).abs();
            if gap > best.0 {
                best = (gap, eps, m);
            }
        }
    }
    Ok(best)
}

/// One point of the moment-divergence scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub index: u64,
    pub dt: Option<f64>,
    pub moment: AlphaMoment,
}

/// Trace `int |x|_alpha^2` along a discretization grid.
///
/// The temporal scan follows the quarter-regularity divergence mechanism:
/// `dt = 1/N^2` with `k = floor(T dt^{-1})` steps, under which the moment at
/// `alpha = 1/4` grows like `log N` without a ceiling, while for
/// `alpha < 1/4` it stays below the uniform bound
/// [`crate::spectral::alpha_moment_sup_bound`].
pub fn moment_divergence_scan(
    alpha: f64,
    scheme: Scheme,
    grid: &[u64],
    t: f64,
    policy: &SeriesPolicy,
) -> Result<Vec<ScanPoint>> {
    check_grid(grid)?;
    grid.iter()
        .map(|&n| match scheme {
            Scheme::Spectral => Ok(ScanPoint {
                index: n,
                dt: None,
                moment: alpha_moment(&Law::galerkin(t, n)?, alpha, policy)?,
            }),
            Scheme::Temporal => {
                let dt = 1.0 / (n * n) as f64;
                let k = (t / dt).floor() as u64;
                Ok(ScanPoint {
                    index: n,
                    dt: Some(dt),
                    moment: alpha_moment(&Law::euler(dt, k)?, alpha, policy)?,
                })
            }
        })
        .collect()
}

/// Monte Carlo cross-check of one weak-error case: the common-random-number
/// difference estimate against the closed form at the sampling truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McCheckRow {
    pub index: u64,
    pub closed_form: f64,
    pub estimate: Estimate,
    /// Discrepancy in standard errors.
    pub z: f64,
}

impl McCheckRow {
    pub fn passes(&self) -> bool {
        self.z <= 3.0
    }
}

/// Cross-check every case by Monte Carlo; discrepancies are reported in
/// standard errors so `z > 3` fails the run.
pub fn mc_validate_cases(
    cases: &[WeakErrorCase],
    cfg: &MCConfig,
    policy: &SeriesPolicy,
) -> Result<Vec<McCheckRow>> {
    cases
        .iter()
        .map(|case| {
            let closed = expectation_truncated(&case.tf, &case.law_a, cfg.dim, policy)?
                - expectation_truncated(&case.tf, &case.law_b, cfg.dim, policy)?;
            let estimate = mc_weak_error(&case.tf, &case.law_a, &case.law_b, cfg)?;
            let z = (estimate.mean - closed).abs() / estimate.std_error.max(f64::MIN_POSITIVE);
            Ok(McCheckRow { index: case.index, closed_form: closed, estimate, z })
        })
        .collect()
}

/// The cases behind each rate suite, for callers that want the MC cross-check
/// on exactly the sweep they ran.
pub fn rate_suite_cases(
    scheme: Scheme,
    family_alpha: Option<f64>,
    t: f64,
    grid: &[u64],
) -> Result<Vec<WeakErrorCase>> {
    match (scheme, family_alpha) {
        (Scheme::Spectral, Some(alpha)) => lipschitz_cases_spectral(t, alpha, grid),
        (Scheme::Temporal, Some(alpha)) => lipschitz_cases_temporal(t, alpha, grid),
        (Scheme::Spectral, None) => c2_cases_spectral(t, grid),
        (Scheme::Temporal, None) => c2_cases_temporal(t, grid),
    }
}
