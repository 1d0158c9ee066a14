//! Series utilities: Hurwitz-zeta tails, Euler-Maclaurin power sums, and
//! deterministic pairwise summation.
//!
//! Mode sums over the eigenvalues `lambda_n = pi^2 n^2` reduce to sums of
//! powers of `n`. Direct truncation converges far too slowly for the slowly
//! decaying exponents that appear near the regularity thresholds, so every
//! infinite sum in this crate is split into an explicit head plus an analytic
//! tail evaluated here. The tail formulas are Euler-Maclaurin expansions,
//! i.e. integral comparisons with endpoint and curvature corrections; with
//! the switch index used below they are accurate to a few ulps.

/// Smallest start index at which the Euler-Maclaurin corrections are applied.
const EM_SWITCH: u64 = 24;

/// Tail of the Riemann zeta series: `sum_{n > m} n^{-s}` for `s > 1`.
///
/// Equivalently the Hurwitz zeta value `zeta(s, m + 1)`.
pub fn zeta_tail(s: f64, m: u64) -> f64 {
    debug_assert!(s > 1.0, "zeta tail requires s > 1, got {s}");
    let w = (m + 1).max(EM_SWITCH);
    let mut head = 0.0;
    for n in (m + 1)..w {
        head += (n as f64).powf(-s);
    }
    head + em_tail(s, w as f64)
}

/// `sum_{n >= w} n^{-s}` by Euler-Maclaurin, valid for `w >= EM_SWITCH`.
fn em_tail(s: f64, w: f64) -> f64 {
    let iw = 1.0 / w;
    let wpow = w.powf(-s); // w^{-s}
    let mut value = wpow * w / (s - 1.0) + 0.5 * wpow;
    // Bernoulli corrections B2/2!, B4/4!, B6/6!, B8/8!.
    let mut deriv = s * wpow * iw; // s * w^{-s-1}
    value += deriv / 12.0;
    deriv *= (s + 1.0) * (s + 2.0) * iw * iw;
    value -= deriv / 720.0;
    deriv *= (s + 3.0) * (s + 4.0) * iw * iw;
    value += deriv / 30240.0;
    deriv *= (s + 5.0) * (s + 6.0) * iw * iw;
    value -= deriv / 1_209_600.0;
    value
}

/// Finite power sum `sum_{n=a}^{b} n^q` for real `q` (including `q = -1`).
///
/// Evaluated by direct summation up to the Euler-Maclaurin switch and by the
/// two-endpoint expansion beyond it, so `b` may be astronomically large.
pub fn power_sum(a: u64, b: u64, q: f64) -> f64 {
    assert!(a >= 1, "power sum starts at n >= 1");
    if b < a {
        return 0.0;
    }
    let lo = a.max(EM_SWITCH);
    let mut head = 0.0;
    let mut n = a;
    while n < lo && n <= b {
        head += (n as f64).powf(q);
        n += 1;
    }
    if n > b {
        return head;
    }
    head + em_range(q, n as f64, b as f64)
}

/// `sum_{n=a}^{b} n^q` by Euler-Maclaurin between two endpoints, `a >= EM_SWITCH`.
fn em_range(q: f64, a: f64, b: f64) -> f64 {
    let integral = if q == -1.0 {
        (b / a).ln()
    } else {
        (b.powf(q + 1.0) - a.powf(q + 1.0)) / (q + 1.0)
    };
    let ga = a.powf(q);
    let gb = b.powf(q);
    let mut value = integral + 0.5 * (ga + gb);
    let mut da = q * ga / a;
    let mut db = q * gb / b;
    value += (db - da) / 12.0;
    da *= (q - 1.0) * (q - 2.0) / (a * a);
    db *= (q - 1.0) * (q - 2.0) / (b * b);
    value -= (db - da) / 720.0;
    da *= (q - 3.0) * (q - 4.0) / (a * a);
    db *= (q - 3.0) * (q - 4.0) / (b * b);
    value += (db - da) / 30240.0;
    value
}

/// Deterministic pairwise sum. The reduction tree depends only on `len`, so
/// the result is bit-identical however the slice was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
