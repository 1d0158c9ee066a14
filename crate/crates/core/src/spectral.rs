//! Spectral representation of the exact, Galerkin, and implicit-Euler laws.
//!
//! All three laws are centered Gaussians on `L^2(0,1)` that are diagonal in
//! the Dirichlet-Laplacian eigenbasis with `lambda_n = pi^2 n^2`. Their
//! per-mode variances are
//!
//! - exact at time `T`:          `(1 - exp(-2 lambda T)) / (2 lambda)`
//! - Galerkin with `N` modes:    the exact variance for `n <= N`, else `0`
//! - implicit Euler, `k` steps:  `(1 - (1 + lambda dt)^{-2k}) / (lambda (2 + lambda dt))`
//!
//! the Euler form being the closed geometric sum of
//! `dt * sum_{l=1}^{k} (1 + lambda dt)^{-2l}`.
//!
//! Everything else in this module is a mode sum over those variances. Sums
//! are evaluated as an explicit head plus an analytic tail (see [`crate::series`]);
//! the crossover index is chosen from integral-comparison bounds so the
//! neglected remainder stays below the policy tolerance.

use crate::series::{pairwise_sum, power_sum, zeta_tail};
use crate::{Error, Result};
use std::f64::consts::PI;

/// `lambda_n = pi^2 n^2`, the n-th Dirichlet eigenvalue on (0,1).
pub fn lambda(n: u64) -> f64 {
    let x = n as f64;
    PI * PI * x * x
}

/// The eigenpairs of the negative Dirichlet Laplacian, up to a retained
/// maximum index. The eigenvalues are a pure function of the index; nothing
/// is tabulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenSystem {
    pub n_max: u64,
}

impl EigenSystem {
    pub fn new(n_max: u64) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::ZeroModeIndex);
        }
        Ok(Self { n_max })
    }

    pub fn lambda(&self, n: u64) -> f64 {
        lambda(n)
    }

    /// Mode indices `1..=n_max`.
    pub fn modes(&self) -> impl Iterator<Item = u64> {
        1..=self.n_max
    }
}

/// Truncation contract for infinite mode sums and improper integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPolicy {
    /// Absolute tolerance on the reported value.
    pub abs_tol: f64,
    /// Hard cap on directly summed terms; also the truncation index reported
    /// for divergent sums.
    pub max_terms: u64,
    /// How tails are certified.
    pub tail_bound: TailBoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailBoundKind {
    /// Integral comparison with Euler-Maclaurin corrections.
    IntegralComparison,
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_terms: 100_000_000,
            tail_bound: TailBoundKind::IntegralComparison,
        }
    }
}

/// One of the three Gaussian laws, described by its defining parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    /// Law of the mild solution at time `t`.
    Exact { t: f64 },
    /// Law of the spectral Galerkin projection onto the first `n` modes.
    Galerkin { t: f64, n: u64 },
    /// Law of the linear implicit Euler chain after `k` steps of size `dt`.
    Euler { dt: f64, k: u64 },
}

impl Law {
    pub fn exact(t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(Law::Exact { t })
    }

    pub fn galerkin(t: f64, n: u64) -> Result<Self> {
        check_time(t)?;
        if n == 0 {
            return Err(Error::ZeroModeIndex);
        }
        Ok(Law::Galerkin { t, n })
    }

    pub fn euler(dt: f64, k: u64) -> Result<Self> {
        check_step(dt)?;
        Ok(Law::Euler { dt, k })
    }

    /// Physical time covered by the law (`k * dt` for the Euler chain).
    pub fn t_eff(&self) -> f64 {
        match *self {
            Law::Exact { t } | Law::Galerkin { t, .. } => t,
            Law::Euler { dt, k } => dt * k as f64,
        }
    }

    /// Variance of the n-th mode coordinate under this law.
    pub fn mode_variance(&self, n: u64) -> f64 {
        assert!(n >= 1, "mode indices start at 1");
        match *self {
            Law::Exact { t } => q_exact(t, n),
            Law::Galerkin { t, n: dim } => {
                if n <= dim {
                    q_exact(t, n)
                } else {
                    0.0
                }
            }
            Law::Euler { dt, k } => q_euler(dt, k, n),
        }
    }

    /// Standard deviation of the n-th mode coordinate.
    pub fn mode_std(&self, n: u64) -> f64 {
        self.mode_variance(n).sqrt()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

fn check_step(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt < 1.0) {
        return Err(Error::InvalidTimeStep(dt));
    }
    Ok(())
}

/// Exact-law mode variance `(1 - e^{-2 lambda t}) / (2 lambda)`.
fn q_exact(t: f64, n: u64) -> f64 {
    let lam = lambda(n);
    -(-2.0 * lam * t).exp_m1() / (2.0 * lam)
}

/// Euler-law mode variance `(1 - (1 + lambda dt)^{-2k}) / (lambda (2 + lambda dt))`.
fn q_euler(dt: f64, k: u64, n: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let lam = lambda(n);
    let decay = euler_mode_decay(lam, dt, k);
    (1.0 - decay) / (lam * (2.0 + lam * dt))
}

/// `(1 + lambda dt)^{-2k}`, computed in log space.
pub(crate) fn euler_mode_decay(lam: f64, dt: f64, k: u64) -> f64 {
    (-2.0 * k as f64 * (lam * dt).ln_1p()).exp()
}

/// First mode index from which `1 - e^{-2 lambda t}` equals 1 in f64.
pub(crate) fn exp_dead_mode(t: f64) -> u64 {
    // 2 lambda t >= 40 makes e^{-x} < 2^-57, which rounds away against 1.
    let n = (20.0 / (PI * PI * t)).sqrt().ceil();
    (n as u64).max(1)
}

/// First mode index from which `lambda dt >= 64`, the switch point for the
/// geometric tail expansions in `1 / (2 + lambda dt)`.
pub(crate) fn euler_asymptotic_start(dt: f64) -> u64 {
    let n = (64.0 / (PI * PI * dt)).sqrt().ceil();
    (n as u64).max(1)
}

/// Outcome of an alpha-norm second-moment computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaMoment {
    /// Converged value, or the partial sum at the applied truncation when the
    /// series does not converge.
    pub value: f64,
    pub diverges: bool,
    pub status: SeriesStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStatus {
    /// Tail certified below the policy tolerance.
    Converged,
    /// Divergent by the regularity threshold rule; value is a partial sum.
    ProvedDivergent,
    /// Neither certified nor provably divergent within `max_terms`.
    BudgetExhausted,
}

/// Second moment of the alpha-norm, `sum_n lambda_n^{2 alpha} Var(X_n)`.
///
/// Finiteness follows the regularity thresholds: the exact law requires
/// `alpha < 1/4`, the Euler law (any `k >= 1`, fixed `dt`) requires
/// `alpha < 3/4`, and the Galerkin law is a finite sum for every `alpha`.
/// Divergent cases report the partial sum at `policy.max_terms` so growth
/// can be plotted.
pub fn alpha_moment(law: &Law, alpha: f64, policy: &SeriesPolicy) -> Result<AlphaMoment> {
    if !(0.0..=1.0).contains(&alpha) || alpha.is_nan() {
        return Err(Error::AlphaOutsideUnit(alpha));
    }
    let converged = |value: f64| AlphaMoment {
        value,
        diverges: false,
        status: SeriesStatus::Converged,
    };
    let divergent = |value: f64| AlphaMoment {
        value,
        diverges: true,
        status: SeriesStatus::ProvedDivergent,
    };

    match *law {
        Law::Galerkin { t, n } => Ok(converged(exact_moment_head(t, alpha, n))),
        Law::Exact { t } => {
            if alpha < 0.25 {
                let c = exp_dead_mode(t);
                let head = exact_moment_head(t, alpha, c);
                let tail = 0.5 * PI.powf(4.0 * alpha - 2.0) * zeta_tail(2.0 - 4.0 * alpha, c);
                Ok(converged(head + tail))
            } else {
                let c = exp_dead_mode(t).min(policy.max_terms);
                let head = exact_moment_head(t, alpha, c);
                let rest = 0.5
                    * PI.powf(4.0 * alpha - 2.0)
                    * power_sum(c + 1, policy.max_terms, 4.0 * alpha - 2.0);
                Ok(divergent(head + rest))
            }
        }
        Law::Euler { dt, k } => {
            if k == 0 {
                return Ok(converged(0.0));
            }
            if alpha < 0.75 {
                euler_moment_convergent(dt, k, alpha, policy)
            } else {
                Ok(divergent(euler_moment_partial(dt, k, alpha, policy.max_terms)))
            }
        }
    }
}

/// Upper bound `sum_n 1/(2 lambda_n^{1-2 alpha})` valid for every law and
/// every discretization parameter when `alpha < 1/4`.
pub fn alpha_moment_sup_bound(alpha: f64) -> Result<f64> {
    if !(0.0..0.25).contains(&alpha) {
        return Err(Error::AlphaOutsideUnit(alpha));
    }
    Ok(0.5 * PI.powf(4.0 * alpha - 2.0) * zeta_tail(2.0 - 4.0 * alpha, 0))
}

/// `sum_{n=1}^{hi} lambda^{2 alpha} q_exact(t, n)`, exploiting that the
/// exponential factor is exactly 1 beyond `exp_dead_mode(t)`.
fn exact_moment_head(t: f64, alpha: f64, hi: u64) -> f64 {
    let c = exp_dead_mode(t).min(hi);
    let mut head = 0.0;
    for n in 1..=c {
        head += lambda(n).powf(2.0 * alpha) * q_exact(t, n);
    }
    if hi > c {
        head += 0.5 * PI.powf(4.0 * alpha - 2.0) * power_sum(c + 1, hi, 4.0 * alpha - 2.0);
    }
    head
}

/// Convergent Euler moment: direct head plus geometric zeta-chain tail.
fn euler_moment_convergent(
    dt: f64,
    k: u64,
    alpha: f64,
    policy: &SeriesPolicy,
) -> Result<AlphaMoment> {
    // The head must reach the asymptotic regime and make the neglected
    // decay-factor part of the tail provably small.
    let mut c = euler_asymptotic_start(dt);
    loop {
        let decay_bound = euler_mode_decay(lambda(c), dt, k);
        let tail_scale = PI.powf(4.0 * alpha - 4.0) / dt * zeta_tail(4.0 - 4.0 * alpha, c);
        if decay_bound * tail_scale < 0.25 * policy.abs_tol {
            break;
        }
        if c >= policy.max_terms {
            return Ok(AlphaMoment {
                value: euler_moment_partial(dt, k, alpha, policy.max_terms),
                diverges: true,
                status: SeriesStatus::BudgetExhausted,
            });
        }
        c = (c * 2).min(policy.max_terms);
    }

    let mut head = 0.0;
    for n in 1..=c {
        head += lambda(n).powf(2.0 * alpha) * q_euler(dt, k, n);
    }
    // Tail of lambda^{2 alpha - 1} / (2 + lambda dt), expanded geometrically
    // in 2/(lambda dt); the decay factor was bounded away above. Terms are
    // advanced through their ratios so no intermediate power can overflow.
    let mut zeta_prev = zeta_tail(4.0 - 4.0 * alpha, c);
    let mut term = PI.powf(4.0 * alpha - 4.0) * zeta_prev / dt;
    let mut tail = term;
    let mut j = 1.0;
    loop {
        let zeta_next = zeta_tail(4.0 - 4.0 * alpha + 2.0 * j, c);
        term *= -2.0 / (dt * PI * PI) * zeta_next / zeta_prev;
        tail += term;
        zeta_prev = zeta_next;
        if term.abs() < 1e-16 * tail.abs().max(f64::MIN_POSITIVE) || j > 60.0 {
            break;
        }
        j += 1.0;
    }
    Ok(AlphaMoment {
        value: head + tail,
        diverges: false,
        status: SeriesStatus::Converged,
    })
}

/// Partial sum of the (divergent or not) Euler moment at `max_terms`.
fn euler_moment_partial(dt: f64, k: u64, alpha: f64, max_terms: u64) -> f64 {
    let c = euler_asymptotic_start(dt).min(max_terms);
    let mut head = 0.0;
    for n in 1..=c {
        head += lambda(n).powf(2.0 * alpha) * q_euler(dt, k, n);
    }
    if max_terms <= c {
        return head;
    }
    // Beyond c the decay factor contributes at most its value at c times the
    // remaining (finite) sum; for plotting-grade partial sums we keep the
    // geometric expansion of 1/(2 + lambda dt) and drop the decay factor,
    // which is below 2.4e-4 of each term there.
    let mut sum_prev = power_sum(c + 1, max_terms, 4.0 * alpha - 4.0);
    let mut term = sum_prev * PI.powf(4.0 * alpha - 4.0) / dt;
    let mut rest = term;
    let mut j = 1.0;
    loop {
        let sum_next = power_sum(c + 1, max_terms, 4.0 * alpha - 4.0 - 2.0 * j);
        term *= -2.0 / (dt * PI * PI) * sum_next / sum_prev;
        rest += term;
        sum_prev = sum_next;
        if term.abs() < 1e-15 * rest.abs().max(f64::MIN_POSITIVE) || j > 60.0 {
            break;
        }
        j += 1.0;
    }
    head + rest
}

/// The Riemann-limit integral behind the quarter-regularity divergence
/// argument: `(1/pi) int_{pi/M}^inf (1 - (1+z^2)^{-2k}) / (z (2+z^2)) dz`.
pub fn alpha_quarter_limit(k: u64, m_cut: u64, quad: &SeriesPolicy) -> Result<f64> {
    if k == 0 || m_cut == 0 {
        return Err(Error::ZeroModeIndex);
    }
    let a = PI / m_cut as f64;
    let f = |z: f64| {
        let one_minus = -(-2.0 * k as f64 * (z * z).ln_1p()).exp_m1();
        one_minus / (z * (2.0 + z * z))
    };
    let r = crate::quad::adaptive_quad_to_infinity(&f, a, quad.abs_tol * PI)?;
    Ok(r.value / PI)
}

/// The discrete counterpart of [`alpha_quarter_limit`]: the quarter-moment
/// partial sum `sum_{n >= n_scale/m_cut}` of the Euler law at `dt = 1/n_scale^2`,
/// which converges to the integral as `n_scale` grows.
pub fn alpha_quarter_riemann_sum(k: u64, m_cut: u64, n_scale: u64) -> f64 {
    let big_n = n_scale as f64;
    let start = (big_n / m_cut as f64).ceil() as u64;
    let mut sum = 0.0;
    let mut n = start.max(1);
    loop {
        let z = PI * n as f64 / big_n;
        let one_minus = -(-2.0 * k as f64 * (z * z).ln_1p()).exp_m1();
        let term = one_minus / (PI * n as f64 * (2.0 + z * z));
        sum += term;
        if (term < 1e-13 * sum && n > 16 * n_scale) || n > 2_000_000_000 {
            break;
        }
        n += 1;
    }
    sum
}

/// Mean-square spatial discretization error
/// `E |X(T) - X^(N)(T)|^2 = sum_{n > N} q_exact(T, n)`, exact to machine
/// precision via the zeta tail.
pub fn strong_error_spectral(t: f64, n: u64, _policy: &SeriesPolicy) -> Result<f64> {
    check_time(t)?;
    if n == 0 {
        return Err(Error::ZeroModeIndex);
    }
    let base = zeta_tail(2.0, n) / (2.0 * PI * PI);
    // Subtract the exponentially dead part; a handful of terms at most.
    let mut correction = 0.0;
    let mut m = n + 1;
    loop {
        let lam = lambda(m);
        let x = 2.0 * lam * t;
        if x > 745.0 {
            break;
        }
        correction += (-x).exp() / (2.0 * lam);
        m += 1;
    }
    Ok(base - correction)
}

/// Cross-covariance of the exact and Euler mode `n` under the shared-noise
/// coupling:
/// `c_n = sum_{l=0}^{k-1} (1 + lambda dt)^{-(k-l)} (e^{-lambda(T-(l+1)dt)} - e^{-lambda(T-l dt)}) / lambda`.
pub fn euler_cross_covariance(t: f64, dt: f64, n: u64) -> f64 {
    let k = (t / dt).floor() as u64;
    if k == 0 {
        return 0.0;
    }
    let lam = lambda(n);
    let s = 1.0 / (1.0 + lam * dt);
    let step_gain = -(-lam * dt).exp_m1(); // 1 - e^{-lambda dt}
    // Iterate l = k-1 down to 0; both factors shrink monotonically, so we
    // can stop as soon as their product cannot move the sum.
    let mut weight = s; // (1 + lambda dt)^{-(k-l)}
    let mut tail_exp = (-lam * (t - k as f64 * dt)).exp(); // e^{-lambda (T-(l+1)dt)}
    let step_exp = (-lam * dt).exp();
    let mut sum = 0.0;
    for _ in 0..k {
        let term = weight * tail_exp * step_gain;
        sum += term;
        if term < 1e-18 * sum.max(f64::MIN_POSITIVE) {
            break;
        }
        weight *= s;
        tail_exp *= step_exp;
    }
    sum / lam
}

/// Mean-square temporal discretization error under the shared-noise coupling,
/// `E |X(T) - X_k^{dt}|^2` with `k = floor(T/dt)`.
pub fn strong_error_temporal(t: f64, dt: f64, policy: &SeriesPolicy) -> Result<f64> {
    check_time(t)?;
    check_step(dt)?;
    if dt > t {
        return Err(Error::StepExceedsHorizon { dt, t });
    }
    let k = (t / dt).floor() as u64;

    // sum_n q_exact(t, n), exactly.
    let exact_total = zeta_tail(2.0, 0) / (2.0 * PI * PI) - {
        let mut corr = 0.0;
        let mut n = 1;
        loop {
            let x = 2.0 * lambda(n) * t;
            if x > 745.0 {
                break;
            }
            corr += (-x).exp() / (2.0 * lambda(n));
            n += 1;
        }
        corr
    };

    // Direct part of sum_n [q_euler - 2 c_n]; both decay like lambda^{-2}/dt,
    // so stop once the integral-comparison bound clears the tolerance.
    let mut c = euler_asymptotic_start(dt);
    while 3.0 / (dt * PI.powi(4)) * zeta_tail(4.0, c) > 0.5 * policy.abs_tol {
        c *= 2;
        if c >= policy.max_terms {
            break;
        }
    }
    let mut terms = Vec::with_capacity(c as usize);
    for n in 1..=c {
        terms.push(q_euler(dt, k, n) - 2.0 * euler_cross_covariance(t, dt, n));
    }
    Ok(exact_total + pairwise_sum(&terms))
}

/// The same quantity restricted to the first `dim` modes; this is what a
/// coupled Monte Carlo run with sampling dimension `dim` estimates.
pub fn strong_error_temporal_truncated(t: f64, dt: f64, dim: u64) -> Result<f64> {
    check_time(t)?;
    check_step(dt)?;
    if dt > t {
        return Err(Error::StepExceedsHorizon { dt, t });
    }
    let k = (t / dt).floor() as u64;
    let mut terms = Vec::with_capacity(dim as usize);
    for n in 1..=dim {
        terms.push(q_exact(t, n) + q_euler(dt, k, n) - 2.0 * euler_cross_covariance(t, dt, n));
    }
    Ok(pairwise_sum(&terms))
}

/// Triangle-inequality bound on the part of the temporal strong error carried
/// by modes above `dim`: `(sqrt(sum q) + sqrt(sum q_euler))^2` over the tail.
pub fn strong_error_truncation_bound(t: f64, dt: f64, dim: u64) -> Result<f64> {
    let exact_tail = strong_error_spectral(t, dim, &SeriesPolicy::default())?;
    // q_euler <= min(1/(2 lambda), 1/(lambda^2 dt)): take the smaller tail.
    let euler_tail = (zeta_tail(2.0, dim) / (2.0 * PI * PI))
        .min(zeta_tail(4.0, dim) / (PI.powi(4) * dt));
    Ok((exact_tail.sqrt() + euler_tail.sqrt()).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Brute-force Euler variance `dt * sum_{l=1}^{k} (1 + lambda dt)^{-2l}`.
    fn euler_variance_brute(dt: f64, k: u64, n: u64) -> f64 {
        let lam = lambda(n);
        let mut sum = 0.0;
        for l in 1..=k {
            sum += (1.0 + lam * dt).powi(-2 * l as i32);
        }
        dt * sum
    }

    #[test]
    fn lambda_increases_from_pi_squared() {
        assert_relative_eq!(lambda(1), PI * PI, max_relative = 1e-15);
        for n in 1..200 {
            assert!(lambda(n + 1) > lambda(n));
        }
    }

    #[test]
    fn galerkin_kills_modes_above_dimension() {
        let law = Law::galerkin(1.0, 4).unwrap();
        assert_eq!(law.mode_variance(5), 0.0);
        assert_eq!(law.mode_variance(6), 0.0);
        let exact = Law::exact(1.0).unwrap();
        for n in 1..=4 {
            assert_eq!(law.mode_variance(n), exact.mode_variance(n));
        }
    }

    #[test]
    fn euler_single_step_matches_closed_form() {
        for &(dt, n) in &[(0.5, 1u64), (0.01, 3), (1e-4, 40)] {
            let law = Law::euler(dt, 1).unwrap();
            let lam = lambda(n);
            let expected = dt / ((1.0 + lam * dt) * (1.0 + lam * dt));
            assert_relative_eq!(law.mode_variance(n), expected, max_relative = 1e-14);
            assert_relative_eq!(law.mode_variance(n), euler_variance_brute(dt, 1, n), max_relative = 1e-14);
        }
    }

    #[test]
    fn exact_first_mode_saturates_at_long_horizon() {
        let law = Law::exact(10.0).unwrap();
        // e^{-2 pi^2 10} is far below resolution, so this is 1/(2 pi^2).
        assert_relative_eq!(law.mode_variance(1), 0.050_660_591_821_168_88, max_relative = 1e-12);
    }

    #[test]
    fn euler_zero_steps_is_the_point_mass_at_zero() {
        let law = Law::euler(0.3, 0).unwrap();
        for n in 1..20 {
            assert_eq!(law.mode_variance(n), 0.0);
        }
    }

    #[test]
    fn law_constructors_reject_bad_parameters() {
        assert!(Law::exact(0.0).is_err());
        assert!(Law::exact(f64::NAN).is_err());
        assert!(Law::galerkin(1.0, 0).is_err());
        assert!(Law::euler(0.0, 3).is_err());
        assert!(Law::euler(1.0, 3).is_err());
        assert!(Law::euler(-0.1, 3).is_err());
    }

    proptest! {
        #[test]
        fn euler_closed_form_matches_brute_force(
            n in 1u64..200,
            k in 1u64..=64,
            dt_exp in -6.0f64..-0.01,
        ) {
            let dt = 10f64.powf(dt_exp);
            let law = Law::euler(dt, k).unwrap();
            let brute = euler_variance_brute(dt, k, n);
            let closed = law.mode_variance(n);
            prop_assert!((closed - brute).abs() <= 1e-12 * brute.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn galerkin_matches_exact_below_cut(n in 1u64..64, dim in 1u64..64, t in 0.01f64..20.0) {
            prop_assume!(n <= dim);
            let g = Law::galerkin(t, dim).unwrap();
            let e = Law::exact(t).unwrap();
            prop_assert_eq!(g.mode_variance(n), e.mode_variance(n));
        }

        #[test]
        fn exact_variance_increases_to_stationary_value(n in 1u64..40, t in 0.001f64..2.0) {
            let lam = lambda(n);
            let v1 = Law::exact(t).unwrap().mode_variance(n);
            let v2 = Law::exact(2.0 * t).unwrap().mode_variance(n);
            prop_assert!(v2 >= v1);
            prop_assert!(v2 <= 1.0 / (2.0 * lam) + 1e-300);
        }

        #[test]
        fn mode_variances_stay_in_range(n in 1u64..500, k in 0u64..200, dt_exp in -6.0f64..-0.01) {
            let dt = 10f64.powf(dt_exp);
            let v = Law::euler(dt, k).unwrap().mode_variance(n);
            prop_assert!(v >= 0.0);
            prop_assert!(v <= 1.0 / (2.0 * lambda(n)) + 1e-300);
        }
    }

    #[test]
    fn alpha_moment_of_long_horizon_exact_law_is_one_twelfth() {
        let law = Law::exact(50.0).unwrap();
        let m = alpha_moment(&law, 0.0, &SeriesPolicy::default()).unwrap();
        assert!(!m.diverges);
        assert_relative_eq!(m.value, 1.0 / 12.0, epsilon = 1e-10);
    }

    #[test]
    fn alpha_moment_head_plus_integral_bracket() {
        // Independent oracle: direct 2e6-term sum plus integral-comparison
        // brackets for the remainder.
        let law = Law::exact(1.0).unwrap();
        let alpha = 0.1;
        let value = alpha_moment(&law, alpha, &SeriesPolicy::default()).unwrap().value;
        let cut = 2_000_000u64;
        let mut direct = 0.0;
        for n in 1..=cut {
            direct += lambda(n).powf(2.0 * alpha) * law.mode_variance(n);
        }
        let q = 4.0 * alpha - 2.0;
        let coeff = 0.5 * PI.powf(q);
        let upper = coeff * (cut as f64).powf(q + 1.0) / -(q + 1.0);
        let lower = coeff * ((cut + 1) as f64).powf(q + 1.0) / -(q + 1.0);
        assert!(value >= direct + lower - 1e-12);
        assert!(value <= direct + upper + 1e-12);
    }

    #[test]
    fn alpha_moment_divergence_thresholds() {
        let policy = SeriesPolicy { max_terms: 100_000, ..Default::default() };
        let exact = Law::exact(1.0).unwrap();
        assert!(!alpha_moment(&exact, 0.2499, &policy).unwrap().diverges);
        assert!(alpha_moment(&exact, 0.25, &policy).unwrap().diverges);
        assert!(alpha_moment(&exact, 0.4, &policy).unwrap().diverges);

        let galerkin = Law::galerkin(1.0, 64).unwrap();
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(!alpha_moment(&galerkin, alpha, &policy).unwrap().diverges);
        }

        let euler = Law::euler(0.01, 100).unwrap();
        assert!(!alpha_moment(&euler, 0.25, &policy).unwrap().diverges);
        assert!(!alpha_moment(&euler, 0.7499, &policy).unwrap().diverges);
        assert!(alpha_moment(&euler, 0.75, &policy).unwrap().diverges);
        assert!(alpha_moment(&euler, 1.0, &policy).unwrap().diverges);
    }

    #[test]
    fn divergent_moments_report_growing_partial_sums() {
        let exact = Law::exact(1.0).unwrap();
        let small = SeriesPolicy { max_terms: 10_000, ..Default::default() };
        let large = SeriesPolicy { max_terms: 10_000_000, ..Default::default() };
        let a = alpha_moment(&exact, 0.25, &small).unwrap();
        let b = alpha_moment(&exact, 0.25, &large).unwrap();
        assert_eq!(a.status, SeriesStatus::ProvedDivergent);
        assert!(b.value > a.value + 0.1, "partial sums must keep growing");
    }

    #[test]
    fn euler_moment_matches_direct_summation() {
        let policy = SeriesPolicy::default();
        for &(dt, k, alpha) in &[(0.25f64, 4u64, 0.25f64), (0.001, 1000, 0.5), (0.0625, 16, 0.6)] {
            let law = Law::euler(dt, k).unwrap();
            let value = alpha_moment(&law, alpha, &policy).unwrap().value;
            let mut direct = 0.0;
            for n in 1..=3_000_000u64 {
                direct += lambda(n).powf(2.0 * alpha) * law.mode_variance(n);
            }
            // The remainder beyond 3e6 modes is positive and tiny.
            assert!(value >= direct - 1e-11, "value {value} vs direct {direct}");
            let tail_bound = PI.powf(4.0 * alpha - 4.0) / dt * zeta_tail(4.0 - 4.0 * alpha, 3_000_000);
            assert!(value <= direct + tail_bound + 1e-11);
        }
    }

    #[test]
    fn alpha_moment_stable_under_head_doubling() {
        // The reported value may not move when the direct head is enlarged.
        let law = Law::euler(0.01, 100).unwrap();
        let policy = SeriesPolicy::default();
        let v1 = alpha_moment(&law, 0.5, &policy).unwrap().value;
        let mut direct = 0.0;
        let c = 4 * euler_asymptotic_start(0.01);
        for n in 1..=c {
            direct += lambda(n).powf(2.0 * 0.5) * law.mode_variance(n);
        }
        let mut tail = 0.0;
        let mut coeff = 1.0 / 0.01;
        let mut j = 0.0;
        loop {
            let term = coeff * PI.powf(-2.0 - 2.0 * j) * zeta_tail(2.0 + 2.0 * j, c);
            tail += term;
            if term.abs() < 1e-16 * tail.abs() || j > 40.0 {
                break;
            }
            coeff *= -2.0 / 0.01;
            j += 1.0;
        }
        assert_relative_eq!(v1, direct + tail, max_relative = 1e-11);
    }

    #[test]
    fn quarter_limit_is_positive_and_monotone() {
        let quad = SeriesPolicy::default();
        let v1 = alpha_quarter_limit(1, 1, &quad).unwrap();
        assert!(v1 > 0.0);
        let mut prev = v1;
        for m_cut in [2u64, 4, 8, 16] {
            let v = alpha_quarter_limit(1, m_cut, &quad).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // Monotone in k as well, and below the k -> infinity envelope
        // (1/pi) * (1/4) * ln(1 + 2 M^2 / pi^2).
        let v_k4 = alpha_quarter_limit(4, 8, &quad).unwrap();
        let v_k16 = alpha_quarter_limit(16, 8, &quad).unwrap();
        let v_k1 = alpha_quarter_limit(1, 8, &quad).unwrap();
        assert!(v_k4 > v_k1 && v_k16 > v_k4);
        let envelope = 0.25 / PI * (2.0 * 64.0 / (PI * PI)).ln_1p();
        assert!(v_k16 < envelope);
    }

    #[test]
    fn riemann_sum_approaches_quarter_limit() {
        let quad = SeriesPolicy::default();
        let integral = alpha_quarter_limit(2, 4, &quad).unwrap();
        let coarse = alpha_quarter_riemann_sum(2, 4, 1 << 9);
        let fine = alpha_quarter_riemann_sum(2, 4, 1 << 13);
        assert!((fine - integral).abs() < (coarse - integral).abs());
        assert!((fine - integral).abs() / integral < 0.01);
    }

    #[test]
    fn spectral_strong_error_bounded_and_decreasing() {
        let policy = SeriesPolicy::default();
        let mut prev = f64::INFINITY;
        for &n in &[4u64, 8, 16, 32, 64, 128] {
            let e = strong_error_spectral(1.0, n, &policy).unwrap();
            assert!(e > 0.0);
            assert!(e < prev);
            assert!(e <= 1.0 / (2.0 * PI * PI * n as f64) + 1e-15);
            prev = e;
        }
    }

    #[test]
    fn spectral_strong_error_matches_direct_tail() {
        let policy = SeriesPolicy::default();
        let e = strong_error_spectral(1.0, 16, &policy).unwrap();
        let law = Law::exact(1.0).unwrap();
        let mut direct = 0.0;
        for n in 17..=2_000_000u64 {
            direct += law.mode_variance(n);
        }
        let remainder = zeta_tail(2.0, 2_000_000) / (2.0 * PI * PI);
        assert_relative_eq!(e, direct + remainder, max_relative = 1e-10);
    }

    #[test]
    fn one_step_cross_covariance_reduces_to_single_term() {
        // k = 1, dt = T: c_n = (1 + lambda dt)^{-1} (1 - e^{-lambda dt}) / lambda.
        let t = 0.5;
        for n in [1u64, 3, 10] {
            let lam = lambda(n);
            let expected = (1.0 - (-lam * t).exp()) / (lam * (1.0 + lam * t));
            assert_relative_eq!(euler_cross_covariance(t, t, n), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn cross_covariance_matches_brute_force_sum() {
        let (t, dt) = (1.0, 0.0625);
        let k = 16u64;
        for n in [1u64, 2, 5, 17, 100] {
            let lam = lambda(n);
            let mut brute = 0.0;
            for l in 0..k {
                let w = (1.0 + lam * dt).powi(-((k - l) as i32));
                let de = (-lam * (t - (l + 1) as f64 * dt)).exp() - (-lam * (t - l as f64 * dt)).exp();
                brute += w * de / lam;
            }
            assert_relative_eq!(euler_cross_covariance(t, dt, n), brute, max_relative = 1e-12);
        }
    }

    #[test]
    fn temporal_strong_error_single_step_brute_force() {
        // k = 1: per-mode expectation is q + dt/(1+lambda dt)^2 - 2 c_n.
        let t = 0.5;
        let policy = SeriesPolicy::default();
        let value = strong_error_temporal(t, t, &policy).unwrap();
        let mut direct = 0.0;
        for n in 1..=200_000u64 {
            let lam = lambda(n);
            let q = -(-2.0 * lam * t).exp_m1() / (2.0 * lam);
            let qe = t / ((1.0 + lam * t) * (1.0 + lam * t));
            let c = (1.0 - (-lam * t).exp()) / (lam * (1.0 + lam * t));
            direct += q + qe - 2.0 * c;
        }
        let tail = zeta_tail(2.0, 200_000) / (2.0 * PI * PI);
        assert_relative_eq!(value, direct + tail, max_relative = 1e-7);
    }

    #[test]
    fn temporal_strong_error_rejects_bad_steps() {
        let policy = SeriesPolicy::default();
        assert!(strong_error_temporal(1.0, 1.5, &policy).is_err());
        assert!(strong_error_temporal(0.1, 0.5, &policy).is_err());
        assert!(strong_error_temporal(1.0, 0.0, &policy).is_err());
    }

    proptest! {
        #[test]
        fn temporal_strong_error_is_nonnegative(j in 1u32..8) {
            let dt = 0.5f64.powi(j as i32);
            let policy = SeriesPolicy::default();
            let v = strong_error_temporal(1.0, dt, &policy).unwrap();
            prop_assert!(v >= 0.0);
        }
    }

    #[test]
    fn truncated_temporal_error_below_full_value() {
        let policy = SeriesPolicy::default();
        let full = strong_error_temporal(1.0, 0.0625, &policy).unwrap();
        let truncated = strong_error_temporal_truncated(1.0, 0.0625, 256).unwrap();
        let bound = strong_error_truncation_bound(1.0, 0.0625, 256).unwrap();
        assert!(truncated <= full);
        assert!(full <= truncated + bound);
    }
}
