//! Closed-form expectations of the test-function families under any law.
//!
//! Four families are implemented, each with a pointwise evaluator on mode
//! vectors and a closed-form expectation rule under the diagonal Gaussian
//! laws of [`crate::spectral`]:
//!
//! - `Phi1(eps, M)`: `exp(-eps |P_M x|_{1/4}^2)`; the expectation is the
//!   finite product `prod_{m<=M} (1 + 2 eps sqrt(lambda_m) v_m)^{-1/2}`.
//! - `Phi2(M)`: the oscillation `cos(sqrt(2M) <theta_M, x>)` with
//!   `theta_M = e_{M/2} + ... + e_M`; under a centered diagonal law the
//!   expectation is `exp(-M sum_{m=M/2}^{M} v_m)`.
//! - `Phi3(alpha, M)`: the bounded Lipschitz family
//!   `L_alpha^{-1} exp(-sum_{m>=M} |x_m| / lambda_m^alpha)` with expectation
//!   `L_alpha^{-1} exp(-sum_{m>=M} f(sqrt(v_m)/lambda_m^alpha))`, where `f`
//!   is the auxiliary function [`f_exp_abs`].
//! - `GaussExp`: `exp(-|x|^2)`, the smooth representative; expectation
//!   `prod_n (1 + 2 v_n)^{-1/2}`.
//!
//! The infinite exponent sums for `Phi3` and `GaussExp` converge like
//! `m^{-(2 alpha + 1)}`, far too slowly to truncate, so they are completed
//! with zeta tails after a short explicit head. The resulting expectations
//! are accurate to a few ulps, which is what makes weak errors computable as
//! plain differences of expectations.

use crate::quad::adaptive_quad;
use crate::series::zeta_tail;
use crate::special::erfcx;
use crate::spectral::{
    euler_asymptotic_start, euler_mode_decay, exp_dead_mode, lambda, Law, SeriesPolicy,
};
use crate::{Error, Result};
use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

/// `f'(0) = sqrt(2/pi)`, the mean of `|Z|` for a standard normal `Z`.
pub const F_PRIME_AT_ZERO: f64 = 0.797_884_560_802_865_4;
/// `f''(0) = -(1 - 2/pi)`, minus the variance of `|Z|`.
const F_SECOND_AT_ZERO: f64 = FRAC_2_PI - 1.0;
/// `f'''(0) = sqrt(2/pi) (4/pi - 1)`, the third cumulant of `|Z|`.
const F_THIRD_AT_ZERO: f64 = F_PRIME_AT_ZERO * (4.0 / PI - 1.0);

/// `f(theta) = -log E[exp(-theta |Z|)] = -log erfcx(theta / sqrt(2))`.
///
/// Nonnegative, increasing, concave, growing logarithmically; `f(0) = 0` and
/// `f'(0) = sqrt(2/pi)` drive every rate constant in this crate.
pub fn f_exp_abs(theta: f64) -> Result<f64> {
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::NegativeTheta(theta));
    }
    if theta < 5e-4 {
        // Cumulant expansion. The crossover balances its theta^4 remainder
        // against the eps/theta relative error of the log-erfcx route; both
        // stay below ~5e-13 relative here.
        return Ok(theta
            * (F_PRIME_AT_ZERO
                + theta * (0.5 * F_SECOND_AT_ZERO + theta * (F_THIRD_AT_ZERO / 6.0))));
    }
    Ok(-erfcx(theta / SQRT_2).ln())
}

/// Normalization `L_alpha = 1 + (sum_m lambda_m^{-2 alpha})^{1/2}` of the
/// bounded Lipschitz family; requires `alpha > 1/4` for convergence.
pub fn l_alpha(alpha: f64) -> Result<f64> {
    check_lipschitz_alpha(alpha)?;
    Ok(1.0 + (PI.powf(-4.0 * alpha) * zeta_tail(4.0 * alpha, 0)).sqrt())
}

fn check_lipschitz_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.25 && alpha <= 0.5) {
        return Err(Error::AlphaOutsideLipschitzRange(alpha));
    }
    Ok(())
}

/// A member of one of the test-function families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Phi1 { eps: f64, m: u64 },
    Phi2 { m: u64 },
    Phi3 { alpha: f64, m: u64 },
    GaussExp,
}

impl TestFunction {
    pub fn phi1(eps: f64, m: u64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidEpsilon(eps));
        }
        if m == 0 {
            return Err(Error::ZeroModeIndex);
        }
        Ok(TestFunction::Phi1 { eps, m })
    }

    pub fn phi2(m: u64) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(Error::OddOscillationIndex(m));
        }
        Ok(TestFunction::Phi2 { m })
    }

    pub fn phi3(alpha: f64, m: u64) -> Result<Self> {
        check_lipschitz_alpha(alpha)?;
        if m == 0 {
            return Err(Error::ZeroModeIndex);
        }
        Ok(TestFunction::Phi3 { alpha, m })
    }

    pub fn gauss_exp() -> Self {
        TestFunction::GaussExp
    }

    /// Pointwise evaluation on a finite mode vector (`modes[j]` is the
    /// coordinate of `e_{j+1}`); absent modes count as zero.
    pub fn evaluate(&self, modes: &[f64]) -> f64 {
        match *self {
            TestFunction::Phi1 { eps, m } => {
                let hi = (m as usize).min(modes.len());
                let mut s = 0.0;
                for (j, x) in modes[..hi].iter().enumerate() {
                    s += PI * (j + 1) as f64 * x * x;
                }
                (-eps * s).exp()
            }
            TestFunction::Phi2 { m } => {
                let lo = (m / 2) as usize;
                let hi = (m as usize).min(modes.len());
                let mut s = 0.0;
                if lo <= hi {
                    for x in &modes[lo - 1..hi] {
                        s += x;
                    }
                }
                ((2.0 * m as f64).sqrt() * s).cos()
            }
            TestFunction::Phi3 { alpha, m } => {
                let l = l_alpha(alpha).expect("alpha validated at construction");
                let mut s = 0.0;
                for j in m as usize..=modes.len() {
                    s += modes[j - 1].abs() / lambda(j as u64).powf(alpha);
                }
                (-s).exp() / l
            }
            TestFunction::GaussExp => {
                let s: f64 = modes.iter().map(|x| x * x).sum();
                (-s).exp()
            }
        }
    }
}

/// `E[phi1_{eps,M}] = exp(-1/2 sum_{m<=M} log(1 + 2 eps sqrt(lambda_m) v_m))`.
pub fn expect_phi1(law: &Law, eps: f64, m: u64, _policy: &SeriesPolicy) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if m == 0 {
        return Err(Error::ZeroModeIndex);
    }
    let hi = match *law {
        Law::Galerkin { n, .. } => m.min(n),
        _ => m,
    };
    let mut log_sum = 0.0;
    for j in 1..=hi {
        log_sum += (2.0 * eps * lambda(j).sqrt() * law.mode_variance(j)).ln_1p();
    }
    Ok((-0.5 * log_sum).exp())
}

/// `E[phi2_M] = exp(-M sum_{m=M/2}^{M} v_m)`; the characteristic functional
/// of a centered law is real and positive, so the complex oscillation
/// reduces to its cosine part.
pub fn expect_phi2(law: &Law, m: u64, _policy: &SeriesPolicy) -> Result<f64> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::OddOscillationIndex(m));
    }
    let mut s = 0.0;
    for j in (m / 2)..=m {
        s += law.mode_variance(j);
    }
    Ok((-(m as f64) * s).exp())
}

/// `E[phi3_{alpha,M}] = L_alpha^{-1} exp(-sum_{m>=M} f(sqrt(v_m)/lambda_m^alpha))`.
pub fn expect_phi3(law: &Law, alpha: f64, m: u64, policy: &SeriesPolicy) -> Result<f64> {
    check_lipschitz_alpha(alpha)?;
    if m == 0 {
        return Err(Error::ZeroModeIndex);
    }
    let s = phi3_exponent_sum(law, alpha, m, policy);
    Ok((-s).exp() / l_alpha(alpha)?)
}

/// `E[exp(-|x|^2)] = prod_n (1 + 2 v_n)^{-1/2}`.
pub fn expect_gauss_exp(law: &Law, policy: &SeriesPolicy) -> Result<f64> {
    Ok((-0.5 * gauss_exp_log_sum(law, policy)).exp())
}

/// Dispatcher over the family enum.
pub fn expectation(tf: &TestFunction, law: &Law, policy: &SeriesPolicy) -> Result<f64> {
    match *tf {
        TestFunction::Phi1 { eps, m } => expect_phi1(law, eps, m, policy),
        TestFunction::Phi2 { m } => expect_phi2(law, m, policy),
        TestFunction::Phi3 { alpha, m } => expect_phi3(law, alpha, m, policy),
        TestFunction::GaussExp => expect_gauss_exp(law, policy),
    }
}

/// Expectation under the law truncated to its first `dim` modes — the law a
/// Monte Carlo run with sampling dimension `dim` actually draws from.
pub fn expectation_truncated(
    tf: &TestFunction,
    law: &Law,
    dim: u64,
    policy: &SeriesPolicy,
) -> Result<f64> {
    match *tf {
        TestFunction::Phi1 { eps, m } => expect_phi1(law, eps, m.min(dim), policy),
        TestFunction::Phi2 { m } => {
            if m < 2 || !m.is_multiple_of(2) {
                return Err(Error::OddOscillationIndex(m));
            }
            let mut s = 0.0;
            for j in (m / 2)..=m.min(dim) {
                s += law.mode_variance(j);
            }
            Ok((-(m as f64) * s).exp())
        }
        TestFunction::Phi3 { alpha, m } => {
            check_lipschitz_alpha(alpha)?;
            let mut s = 0.0;
            for j in m..=dim {
                let theta = law.mode_variance(j).sqrt() / lambda(j).powf(alpha);
                s += f_exp_abs(theta)?;
            }
            Ok((-s).exp() / l_alpha(alpha)?)
        }
        TestFunction::GaussExp => {
            let mut s = 0.0;
            for j in 1..=dim {
                s += (2.0 * law.mode_variance(j)).ln_1p();
            }
            Ok((-0.5 * s).exp())
        }
    }
}

/// `sum_{m >= m0} f(sqrt(v_m) / lambda_m^alpha)` for the given law.
fn phi3_exponent_sum(law: &Law, alpha: f64, m0: u64, policy: &SeriesPolicy) -> f64 {
    let f = |theta: f64| f_exp_abs(theta).expect("theta is nonnegative by construction");
    match *law {
        Law::Galerkin { n, .. } => {
            let mut s = 0.0;
            for j in m0..=n {
                s += f(law.mode_variance(j).sqrt() / lambda(j).powf(alpha));
            }
            s
        }
        Law::Exact { t } => {
            // Past exp_dead_mode the variance has saturated; pushing the head
            // to 128 modes keeps the fourth-order cumulant remainder of the
            // tail below 1e-17.
            let c = exp_dead_mode(t).max(128).max(m0 - 1);
            let mut head = 0.0;
            for j in m0..=c {
                head += f(law.mode_variance(j).sqrt() / lambda(j).powf(alpha));
            }
            head + phi3_power_tail(alpha, c + 1)
        }
        Law::Euler { dt, k } => {
            if k == 0 {
                return 0.0;
            }
            // Dropping the step-decay factor perturbs each theta by at most
            // the factor (1 - s_m)^{1/2}; push the head until that cannot
            // move the f-sum by more than a quarter tolerance.
            let c = euler_head_end(dt, k, policy, |c| {
                F_PRIME_AT_ZERO
                    * dt.powf(-0.5)
                    * PI.powf(-2.0 * (alpha + 1.0))
                    * zeta_tail(2.0 * alpha + 2.0, c - 1)
            })
            .max(m0 - 1);
            let mut head = 0.0;
            for j in m0..=c {
                head += f(law.mode_variance(j).sqrt() / lambda(j).powf(alpha));
            }
            head + phi3_euler_tail(dt, alpha, c + 1)
        }
    }
}

/// Tail `sum_{m >= first} f(c_theta m^{-(2 alpha + 1)})` in the exact-law
/// regime where the exponential variance factor has saturated, via the
/// cumulant expansion of `f`.
fn phi3_power_tail(alpha: f64, first: u64) -> f64 {
    let p = 2.0 * alpha + 1.0;
    let c = PI.powf(-p) / SQRT_2;
    let z = |mult: f64| zeta_tail(mult * p, first - 1);
    F_PRIME_AT_ZERO * c * z(1.0)
        + 0.5 * F_SECOND_AT_ZERO * c * c * z(2.0)
        + F_THIRD_AT_ZERO / 6.0 * c * c * c * z(3.0)
}

/// Tail of the Euler-law `f`-sum from index `first`, with
/// `theta_m = lambda^{-(alpha+1)} dt^{-1/2} (1 + 2/(lambda dt))^{-1/2}`
/// expanded binomially in `2/(lambda dt)`.
fn phi3_euler_tail(dt: f64, alpha: f64, first: u64) -> f64 {
    // sum theta: binomial chain for (1 + u)^{-1/2}, iterated through term
    // ratios so no intermediate power can overflow.
    let s1 = chain_sum(first, 2.0 * (alpha + 1.0), 2.0 / dt, |i| {
        -(2.0 * i + 1.0) / (2.0 * i + 2.0)
    });
    // sum theta^2: geometric chain for (1 + u)^{-1}.
    let s2 = chain_sum(first, 2.0 * (2.0 * alpha + 2.0), 2.0 / dt, |_| -1.0);
    // sum theta^3: two leading terms of (1 + u)^{-3/2} suffice.
    let zs = |s: f64| zeta_tail(s, first - 1);
    let s3 = PI.powf(-2.0 * (3.0 * alpha + 3.0)) * zs(6.0 * alpha + 6.0)
        - 1.5 * (2.0 / dt) * PI.powf(-2.0 * (3.0 * alpha + 4.0)) * zs(6.0 * alpha + 8.0);

    F_PRIME_AT_ZERO * dt.powf(-0.5) * s1
        + 0.5 * F_SECOND_AT_ZERO * s2 / dt
        + F_THIRD_AT_ZERO / 6.0 * dt.powf(-1.5) * s3
}

/// `sum_n log(1 + 2 v_n)` for the given law, with analytic tails.
fn gauss_exp_log_sum(law: &Law, policy: &SeriesPolicy) -> f64 {
    match *law {
        Law::Galerkin { n, .. } => {
            let mut s = 0.0;
            for j in 1..=n {
                s += (2.0 * law.mode_variance(j)).ln_1p();
            }
            s
        }
        Law::Exact { t } => {
            let c = exp_dead_mode(t);
            let mut head = 0.0;
            for j in 1..=c {
                head += (2.0 * law.mode_variance(j)).ln_1p();
            }
            // Beyond c: log(1 + 1/lambda) = sum_j (-1)^{j+1} lambda^{-j} / j.
            let mut tail = 0.0;
            let mut term = PI.powf(-2.0) * zeta_tail(2.0, c);
            let mut j = 1.0;
            loop {
                tail += term / j;
                let next = term * PI.powf(-2.0) * zeta_tail(2.0 * (j + 1.0), c) / zeta_tail(2.0 * j, c);
                if next.abs() / (j + 1.0) < 1e-17 * tail.abs() || j > 40.0 {
                    break;
                }
                term = -next;
                j += 1.0;
            }
            head + tail
        }
        Law::Euler { dt, k } => {
            if k == 0 {
                return 0.0;
            }
            let c = euler_head_end(dt, k, policy, |c| {
                2.0 / dt * PI.powf(-4.0) * zeta_tail(4.0, c - 1)
            });
            let mut head = 0.0;
            for j in 1..=c {
                head += (2.0 * law.mode_variance(j)).ln_1p();
            }
            head + gauss_exp_euler_tail(dt, c + 1)
        }
    }
}

/// Tail of `sum_m log(1 + b_m)` with `b_m = 2 dt^{-1} lambda^{-2} (1+u)^{-1}`,
/// `u = 2/(lambda dt)`, from index `first`.
fn gauss_exp_euler_tail(dt: f64, first: u64) -> f64 {
    let mut total = 0.0;
    let mut outer_sign = 1.0;
    let mut outer_coeff = 2.0 / dt;
    let mut j = 1.0;
    loop {
        // (-1)^{j+1}/j * b^j with (1+u)^{-j} expanded binomially.
        let inner = chain_sum(first, 4.0 * j, 2.0 / dt, move |i| -(j + i) / (i + 1.0));
        let term = outer_sign / j * outer_coeff * inner;
        total += term;
        if term.abs() < 1e-17 * total.abs().max(f64::MIN_POSITIVE) || j > 20.0 {
            break;
        }
        outer_sign = -outer_sign;
        outer_coeff *= 2.0 / dt;
        j += 1.0;
    }
    total
}

/// `sum_i b_i w^i sum_{m >= first} lambda_m^{-(s0/2 + i)}` with `b_0 = 1` and
/// `b_{i+1} = b_i ratio(i)`, evaluated through term ratios. The zeta factors
/// fall faster than `w^i` grows whenever `first` is past the asymptotic
/// switch, so every intermediate stays in range.
fn chain_sum(first: u64, s0: f64, w: f64, ratio: impl Fn(f64) -> f64) -> f64 {
    let zs = |s: f64| zeta_tail(s, first - 1);
    let mut zeta_prev = zs(s0);
    let mut term = PI.powf(-s0) * zeta_prev;
    let mut acc = term;
    let mut i = 0.0;
    loop {
        let zeta_next = zs(s0 + 2.0 * (i + 1.0));
        term *= ratio(i) * w / (PI * PI) * zeta_next / zeta_prev;
        acc += term;
        zeta_prev = zeta_next;
        i += 1.0;
        if term.abs() < 1e-17 * acc.abs().max(f64::MIN_POSITIVE) || i > 60.0 {
            break;
        }
    }
    acc
}

/// Head end for Euler-law sums: past the geometric switch and far enough out
/// that the neglected step-decay factor is below a quarter tolerance.
fn euler_head_end(
    dt: f64,
    k: u64,
    policy: &SeriesPolicy,
    tail_scale: impl Fn(u64) -> f64,
) -> u64 {
    let mut c = euler_asymptotic_start(dt);
    loop {
        let decay = euler_mode_decay(lambda(c), dt, k);
        if decay * tail_scale(c + 1) < 0.25 * policy.abs_tol || c >= policy.max_terms {
            return c;
        }
        c = (c * 2).min(policy.max_terms);
    }
}

/// One of the limit constants appearing in the asymptotic error expansions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConstant {
    pub kind: LimitKind,
    pub value: f64,
    pub quad_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitKind {
    /// `C_alpha = int_1^inf dz / (sqrt(2) pi^{2a+1} z^{2a+1})`, the spatial
    /// rate constant; elementary value `1 / (2 alpha sqrt(2) pi^{2a+1})`.
    CAlpha { alpha: f64 },
    /// `Cbar_alpha = int_1^inf dz / (sqrt(2 + pi^2 z^2) pi^{2a+1} z^{2a+1})`,
    /// the temporal rate constant; strictly below `C_alpha`.
    CbarAlpha { alpha: f64 },
    /// `exp(-int_{1/2}^1 dz / (2 pi^2 z^2)) = exp(-1/(2 pi^2))`, the
    /// oscillation-family limit under the exact law.
    Phi2ExactLimit,
    /// `exp(-int_{1/2}^1 dz / (pi^2 z^2 (2 + pi^2 z^2)))`, the oscillation
    /// limit under the Euler law at unit horizon with `dt = T / M^2`.
    Phi2EulerLimit,
}

/// Elementary closed form of `C_alpha`.
pub fn c_alpha_closed_form(alpha: f64) -> Result<f64> {
    check_lipschitz_alpha(alpha)?;
    Ok(1.0 / (2.0 * alpha * SQRT_2 * PI.powf(2.0 * alpha + 1.0)))
}

/// Evaluate a limit constant by adaptive quadrature.
pub fn limit_constant(kind: LimitKind, quad: &SeriesPolicy) -> Result<LimitConstant> {
    let tol = quad.abs_tol;
    match kind {
        LimitKind::CAlpha { alpha } => {
            check_lipschitz_alpha(alpha)?;
            // z = 1/u maps the integral onto (0, 1] with an integrable
            // u^{2 alpha - 1} endpoint.
            let c = PI.powf(-(2.0 * alpha + 1.0)) / SQRT_2;
            let f = |u: f64| c * u.powf(2.0 * alpha - 1.0);
            let r = adaptive_quad(&f, 0.0, 1.0, tol)?;
            Ok(LimitConstant { kind, value: r.value, quad_error: r.abs_error })
        }
        LimitKind::CbarAlpha { alpha } => {
            check_lipschitz_alpha(alpha)?;
            let c = PI.powf(-(2.0 * alpha + 1.0));
            let f = |u: f64| c * u.powf(2.0 * alpha) / (2.0 * u * u + PI * PI).sqrt();
            let r = adaptive_quad(&f, 0.0, 1.0, tol)?;
            Ok(LimitConstant { kind, value: r.value, quad_error: r.abs_error })
        }
        LimitKind::Phi2ExactLimit => {
            let f = |z: f64| 1.0 / (2.0 * PI * PI * z * z);
            let r = adaptive_quad(&f, 0.5, 1.0, tol)?;
            let value = (-r.value).exp();
            Ok(LimitConstant { kind, value, quad_error: r.abs_error * value })
        }
        LimitKind::Phi2EulerLimit => {
            let f = |z: f64| {
                let pz = PI * PI * z * z;
                1.0 / (pz * (2.0 + pz))
            };
            let r = adaptive_quad(&f, 0.5, 1.0, tol)?;
            let value = (-r.value).exp();
            Ok(LimitConstant { kind, value, quad_error: r.abs_error * value })
        }
    }
}
