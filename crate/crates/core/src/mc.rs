//! Seeded Monte Carlo sampling of the three laws and estimators with
//! confidence intervals — the independent oracle for every closed form.
//!
//! Randomness is counter-based: every `(seed, sample, mode)` triple derives
//! its own splitmix-style substream, so a draw never depends on how work is
//! scheduled. Estimates are reduced with a fixed pairwise tree over the
//! sample index. Together these make every estimate bit-identical across
//! runs and across worker counts — and, since two laws sampled with the same
//! seed share the same underlying normals, differences of estimates are
//! common-random-number coupled for free.

use crate::gaussian::TestFunction;
use crate::series::pairwise_sum;
use crate::spectral::{lambda, EigenSystem, Law};
use crate::{Error, Result};
use std::f64::consts::TAU;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A counter-derived random substream, keyed by `(seed, sample, mode)`.
///
/// The key passes each component through a full avalanche, and the stream
/// itself is splitmix64 from the derived state. With the antithetic flag the
/// stream emits the reflected uniforms `1 - u`.
#[derive(Debug, Clone)]
pub struct Substream {
    state: u64,
    antithetic: bool,
}

impl Substream {
    pub fn new(seed: u64, sample: u64, mode: u64) -> Self {
        let mut key = mix64(seed ^ GOLDEN);
        key = mix64(key ^ sample.wrapping_mul(0xd6e8_feb8_6659_fd93));
        key = mix64(key ^ mode.wrapping_mul(0xa24b_aed4_963e_e407));
        Substream { state: key, antithetic: false }
    }

    pub fn antithetic(mut self, on: bool) -> Self {
        self.antithetic = on;
        self
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform on (0, 1), exactly reflected to `1 - u` under antithetics.
    pub fn next_uniform(&mut self) -> f64 {
        let u = ((self.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53);
        if self.antithetic {
            1.0 - u
        } else {
            u
        }
    }

    /// Standard normal by Box-Muller (cosine branch, two uniforms per draw).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MCConfig {
    /// Number of independent base draws (the randomness budget).
    pub samples: u64,
    pub seed: u64,
    /// Mode truncation of the sampled law.
    pub dim: u64,
    /// Also evaluate the reflected partner `u -> 1 - u` of every base draw
    /// and average the pair: twice the evaluations from the same randomness,
    /// which cuts the estimator variance roughly in half whenever the pair
    /// correlation is small.
    pub antithetic: bool,
}

impl Default for MCConfig {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0, dim: 4096, antithetic: false }
    }
}

impl MCConfig {
    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::ZeroSamples);
        }
        if self.dim == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(())
    }

    fn evaluations(&self) -> u64 {
        if self.antithetic {
            2 * self.samples
        } else {
            self.samples
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

/// Draw one mode vector of the law, truncated at `dim` modes.
pub fn sample_modes(law: &Law, dim: u64, seed: u64, sample: u64) -> Vec<f64> {
    sample_modes_antithetic(law, dim, seed, sample, false)
}

fn sample_modes_antithetic(law: &Law, dim: u64, seed: u64, sample: u64, flip: bool) -> Vec<f64> {
    let eigen = EigenSystem { n_max: dim };
    eigen
        .modes()
        .map(|n| {
            let sd = law.mode_std(n);
            if sd == 0.0 {
                // Degenerate modes draw nothing; the stream stays aligned
                // because streams are keyed per mode, not shared.
                0.0
            } else {
                sd * Substream::new(seed, sample, n).antithetic(flip).next_normal()
            }
        })
        .collect()
}

/// Draw a coupled pair (exact leg, Euler leg) on shared Brownian increments.
///
/// Per mode, the Euler chain consumes the `k` increments through its
/// recursion, while the exact leg adds for each step the conditional mean
/// `a_l * dBeta_l` plus an independent residual of variance `v_l - a_l^2 dt`,
/// and one extra draw for the `(k dt, T]` leftover when `T/dt` is not an
/// integer. Marginally each leg has exactly its law; jointly the mode
/// covariance is the closed-form `c_n` of
/// [`crate::spectral::euler_cross_covariance`].
pub fn sample_coupled_temporal(
    t: f64,
    dt: f64,
    dim: u64,
    seed: u64,
    sample: u64,
) -> (Vec<f64>, Vec<f64>) {
    let k = (t / dt).floor() as u64;
    let mut exact = Vec::with_capacity(dim as usize);
    let mut euler = Vec::with_capacity(dim as usize);
    let mut increments = vec![0.0f64; k as usize];

    for n in 1..=dim {
        let mut stream = Substream::new(seed, sample, n);
        let lam = lambda(n);
        let s = 1.0 / (1.0 + lam * dt);
        let sqrt_dt = dt.sqrt();

        // Euler leg: X_{l+1} = s (X_l + dBeta_l), increments drawn first.
        let mut x_euler = 0.0;
        for slot in increments.iter_mut() {
            let db = sqrt_dt * stream.next_normal();
            *slot = db;
            x_euler = s * (x_euler + db);
        }

        // Exact leg, iterating l downward so the exponential weights shrink.
        let step_decay = (-lam * dt).exp();
        let gain = -(-lam * dt).exp_m1(); // 1 - e^{-lam dt}
        let gain2 = -(-2.0 * lam * dt).exp_m1(); // 1 - e^{-2 lam dt}
        let mut x_exact = 0.0;
        let mut tail_exp = (-lam * (t - k as f64 * dt)).exp(); // e^{-lam (T-(l+1)dt)} at l = k-1
        for l in (0..k as usize).rev() {
            if tail_exp == 0.0 {
                break;
            }
            let a = tail_exp * gain / (lam * dt);
            let v = tail_exp * tail_exp * gain2 / (2.0 * lam);
            let resid = (v - a * a * dt).max(0.0);
            x_exact += a * increments[l] + resid.sqrt() * stream.next_normal();
            tail_exp *= step_decay;
        }
        // Leftover piece of the stochastic integral over (k dt, T].
        let leftover_var = -(-2.0 * lam * (t - k as f64 * dt)).exp_m1() / (2.0 * lam);
        if leftover_var > 0.0 {
            x_exact += leftover_var.sqrt() * stream.next_normal();
        }

        exact.push(x_exact);
        euler.push(x_euler);
    }
    (exact, euler)
}

/// Monte Carlo estimate of `E[f(X)]` for a user-supplied mode functional.
pub fn mc_expectation_fn<F>(law: &Law, f: F, cfg: &MCConfig) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let law = *law;
    let anti = cfg.antithetic;
    let values = compute_values(cfg.samples, move |i| {
        let base = f(&sample_modes_antithetic(&law, cfg.dim, cfg.seed, i, false));
        if anti {
            0.5 * (base + f(&sample_modes_antithetic(&law, cfg.dim, cfg.seed, i, true)))
        } else {
            base
        }
    });
    Ok(estimate_from_values(&values, cfg.evaluations()))
}

/// Monte Carlo estimate of `E[phi(X)]` for a family member.
pub fn mc_expectation(law: &Law, tf: &TestFunction, cfg: &MCConfig) -> Result<Estimate> {
    let tf = *tf;
    mc_expectation_fn(law, move |modes| tf.evaluate(modes), cfg)
}

/// Common-random-number estimate of the weak error
/// `E[phi(X_a)] - E[phi(X_b)]`: both laws are driven by the same normals and
/// the difference is averaged sample by sample.
pub fn mc_weak_error(
    tf: &TestFunction,
    law_a: &Law,
    law_b: &Law,
    cfg: &MCConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    let (tf, law_a, law_b) = (*tf, *law_a, *law_b);
    let anti = cfg.antithetic;
    let values = compute_values(cfg.samples, move |i| {
        let diff = |flip: bool| {
            let xa = sample_modes_antithetic(&law_a, cfg.dim, cfg.seed, i, flip);
            let xb = sample_modes_antithetic(&law_b, cfg.dim, cfg.seed, i, flip);
            tf.evaluate(&xa) - tf.evaluate(&xb)
        };
        if anti {
            0.5 * (diff(false) + diff(true))
        } else {
            diff(false)
        }
    });
    Ok(estimate_from_values(&values, cfg.evaluations()))
}

/// Discretization scheme selector for strong-error estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrongScheme {
    /// Galerkin truncation error at dimension `n`.
    Spectral { n: u64 },
    /// Implicit Euler error at step `dt` under the shared-noise coupling.
    Temporal { dt: f64 },
}

/// Monte Carlo estimate of the mean-square error `E|X - X_h|^2`.
///
/// The spectral case needs no coupling: the Galerkin solution is the exact
/// projection, so the error is the retained tail of the same sample. The
/// temporal case uses [`sample_coupled_temporal`].
pub fn mc_strong_error(t: f64, scheme: StrongScheme, cfg: &MCConfig) -> Result<Estimate> {
    cfg.validate()?;
    let law = Law::exact(t)?;
    if let StrongScheme::Temporal { dt } = scheme {
        if !(dt > 0.0 && dt < 1.0) {
            return Err(Error::InvalidTimeStep(dt));
        }
        if dt > t {
            return Err(Error::StepExceedsHorizon { dt, t });
        }
    }
    let cfg_copy = *cfg;
    let values = match scheme {
        StrongScheme::Spectral { n } => compute_values(cfg.samples, move |i| {
            let modes = sample_modes(&law, cfg_copy.dim, cfg_copy.seed, i);
            let mut err = 0.0;
            for x in modes.iter().skip(n as usize) {
                err += x * x;
            }
            err
        }),
        StrongScheme::Temporal { dt } => compute_values(cfg.samples, move |i| {
            let (exact, euler) = sample_coupled_temporal(t, dt, cfg_copy.dim, cfg_copy.seed, i);
            exact
                .iter()
                .zip(&euler)
                .map(|(x, y)| (x - y) * (x - y))
                .sum()
        }),
    };
    Ok(estimate_from_values(&values, cfg.samples))
}

/// Evaluate `f(i)` for `i in 0..n` into a vector indexed by `i`.
#[cfg(feature = "parallel")]
fn compute_values<F>(n: u64, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_values<F>(n: u64, f: F) -> Vec<f64>
where
    F: Fn(u64) -> f64 + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Mean and standard error with a fixed-order pairwise reduction over
/// independent units (antithetic pair averages count as one unit, so the
/// error honestly reflects the pair correlation).
fn estimate_from_values(values: &[f64], evaluations: u64) -> Estimate {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0).max(1.0);
    Estimate {
        mean,
        std_error: (var / n).sqrt(),
        samples: evaluations,
    }
}
