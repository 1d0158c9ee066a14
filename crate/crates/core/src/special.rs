//! Scaled complementary error function.
//!
//! `erfcx(x) = exp(x^2) erfc(x)` evaluated by Cody's rational Chebyshev
//! approximations. The scaled form never underflows for large positive `x`
//! and avoids the `exp(x^2)` overflow that makes the naive product unusable;
//! it is the stable building block for `f(theta) = -log E[exp(-theta|Z|)]`.

#[allow(clippy::excessive_precision)]
const ONE_OVER_SQRT_PI: f64 = 0.564_189_583_547_756_3;
const THRESHOLD: f64 = 0.46875;
const X_NEG: f64 = -26.628_735_713_751_4;

// Rational approximation to erf(x)/x on [0, 0.46875].
#[allow(clippy::excessive_precision)]
const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_16,
    377.485_237_685_302_02,
    3_209.377_589_138_469_5,
    0.185_777_706_184_603_15,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 4] = [
    23.601_290_952_344_12,
    244.024_637_934_444_17,
    1_282.616_526_077_372_3,
    2_844.236_833_439_170_6,
];

// Rational approximation to erfcx(x) on [0.46875, 4].
#[allow(clippy::excessive_precision)]
const C: [f64; 9] = [
    0.564_188_496_988_670_1,
    8.883_149_794_388_376,
    66.119_190_637_141_63,
    298.635_138_197_400_1,
    881.952_221_241_769_1,
    1_712.047_612_634_070_6,
    2_051.078_377_826_071_5,
    1_230.339_354_797_997_2,
    2.153_115_354_744_038_5e-8,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 8] = [
    15.744_926_110_709_835,
    117.693_950_891_312_5,
    537.181_101_862_009_9,
    1_621.389_574_566_690_2,
    3_290.799_235_733_459_6,
    4_362.619_090_143_247,
    3_439.367_674_143_721_6,
    1_230.339_354_803_749_4,
];

// Asymptotic correction on (4, inf): erfcx(x) = (1/sqrt(pi) - PQ(1/x^2)) / x.
#[allow(clippy::excessive_precision)]
const P: [f64; 6] = [
    0.305_326_634_961_232_34,
    0.360_344_899_949_804_44,
    0.125_781_726_111_229_25,
    0.016_083_785_148_742_277,
    6.587_491_615_298_378e-4,
    0.016_315_387_137_302_097,
];
#[allow(clippy::excessive_precision)]
const Q: [f64; 5] = [
    2.568_520_192_289_822_4,
    1.872_952_849_923_460_5,
    0.527_905_102_951_428_4,
    0.060_518_341_312_441_32,
    0.002_335_204_976_268_691_8,
];

fn erf_over_x(z: f64) -> f64 {
    ((((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3])
        / ((((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3])
}

fn erfcx_mid(y: f64) -> f64 {
    ((((((((C[8] * y + C[0]) * y + C[1]) * y + C[2]) * y + C[3]) * y + C[4]) * y + C[5]) * y
        + C[6])
        * y
        + C[7])
        / ((((((((y + D[0]) * y + D[1]) * y + D[2]) * y + D[3]) * y + D[4]) * y + D[5]) * y
            + D[6])
            * y
            + D[7])
}

fn erfcx_far(y: f64) -> f64 {
    let z = 1.0 / (y * y);
    let pq = z * (((((P[5] * z + P[0]) * z + P[1]) * z + P[2]) * z + P[3]) * z + P[4])
        / (((((z + Q[0]) * z + Q[1]) * z + Q[2]) * z + Q[3]) * z + Q[4]);
    (ONE_OVER_SQRT_PI - pq) / y
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    let y = x.abs();
    if y <= THRESHOLD {
        let z = y * y;
        return z.exp() * (1.0 - x * erf_over_x(z));
    }
    let positive = if y <= 4.0 { erfcx_mid(y) } else { erfcx_far(y) };
    if x >= 0.0 {
        positive
    } else if x < X_NEG {
        f64::MAX
    } else {
        2.0 * (x * x).exp() - positive
    }
}
