//! End-to-end walkthrough of the public surface, as a downstream crate would
//! use it: build laws, interrogate regularity, compute weak and strong
//! errors, and confirm one of each against Monte Carlo.

use spde_weak::experiments::{fit_rate, lipschitz_rate_spectral, Scheme};
use spde_weak::gaussian::{expectation, expectation_truncated, l_alpha, TestFunction};
use spde_weak::mc::{mc_expectation, mc_strong_error, MCConfig, StrongScheme};
use spde_weak::spectral::{
    alpha_moment, strong_error_spectral, strong_error_temporal, SeriesPolicy,
};
use spde_weak::{Error, Law};

#[test]
fn library_walkthrough() {
    let policy = SeriesPolicy::default();
    let t = 1.0;

    // The three laws agree on retained modes and differ in regularity.
    let exact = Law::exact(t).unwrap();
    let galerkin = Law::galerkin(t, 64).unwrap();
    let euler = Law::euler(t / 64.0, 64).unwrap();
    assert_eq!(exact.mode_variance(3), galerkin.mode_variance(3));
    assert!(euler.mode_variance(3) < exact.mode_variance(3));

    let rough = alpha_moment(&exact, 0.3, &policy).unwrap();
    assert!(rough.diverges);
    let smooth = alpha_moment(&euler, 0.3, &policy).unwrap();
    assert!(!smooth.diverges && smooth.value.is_finite());

    // Weak errors are differences of closed-form expectations.
    let tf = TestFunction::phi3(0.375, 1).unwrap();
    let weak = expectation(&tf, &exact, &policy).unwrap()
        - expectation(&tf, &galerkin, &policy).unwrap();
    assert!(weak.abs() > 0.0 && weak.abs() < 0.05);

    // Rates come out of the sweep suites.
    let grid: Vec<u64> = (4..=8).map(|j| 1u64 << j).collect();
    let rate = lipschitz_rate_spectral(t, 0.375, &grid, &policy).unwrap();
    assert_eq!(rate.sweep.scheme, Scheme::Spectral);
    assert!((rate.fit.best().slope + 0.375).abs() < 0.05);

    // Monte Carlo agrees with the truncated closed form at 3 SE.
    let cfg = MCConfig { samples: 50_000, seed: 11, dim: 64, antithetic: false };
    let est = mc_expectation(&exact, &tf, &cfg).unwrap();
    let closed = expectation_truncated(&tf, &exact, cfg.dim, &policy).unwrap();
    assert!((est.mean - closed).abs() <= 3.0 * est.std_error);

    // Strong errors, closed form and coupled MC.
    assert!(strong_error_spectral(t, 32, &policy).unwrap() > 0.0);
    let closed = strong_error_temporal(t, 0.25, &policy).unwrap();
    let est = mc_strong_error(t, StrongScheme::Temporal { dt: 0.25 }, &cfg).unwrap();
    assert!(est.mean > 0.0 && est.mean < closed);

    // Normalization constant used by the Lipschitz family.
    assert!(l_alpha(0.5).unwrap() > 1.0);

    // Errors carry enough context to act on.
    assert!(matches!(Law::euler(1.5, 3), Err(Error::InvalidTimeStep(_))));
    assert!(fit_rate(&[(1.0, 1.0)]).is_err());
}
