//! Standard normal and standard bivariate normal distribution functions,
//! including the rectangle and interval probabilities the pricing formulas
//! are written in.
//!
//! The bivariate CDF is a Gauss-Legendre method of the Drezner-Wesolowsky /
//! Genz family with the usual transformation branch for |rho| close to 1.
//! Arguments of +-infinity are first-class: the pricing formulas use -inf as
//! a lower rectangle bound for degenerate decision boundaries.

use crate::error::{PricingError, Result};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Neg;

/// Correlation coefficient, validated to lie in [-1, 1] and be non-NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() || !(-1.0..=1.0).contains(&rho) {
            return Err(PricingError::Domain(format!(
                "correlation {rho} outside [-1, 1]"
            )));
        }
        Ok(Correlation(rho))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Neg for Correlation {
    type Output = Correlation;
    fn neg(self) -> Correlation {
        Correlation(-self.0)
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF. Accepts +-infinity; rejects NaN.
pub fn norm_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(PricingError::Domain("norm_cdf of NaN".into()));
    }
    Ok(cdf_raw(x))
}

/// P(a < Z <= b). Accepts +-infinity; rejects NaN and a > b.
pub fn interval_prob(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(PricingError::Domain("interval_prob of NaN".into()));
    }
    if a > b {
        return Err(PricingError::Domain(format!(
            "interval_prob requires a <= b, got a={a}, b={b}"
        )));
    }
    Ok((cdf_raw(b) - cdf_raw(a)).clamp(0.0, 1.0))
}

/// Bivariate normal CDF P(Z1 <= a, Z2 <= b) under correlation rho.
/// Accepts +-infinity; rejects NaN. Absolute accuracy ~5e-15.
pub fn bvn_cdf(a: f64, b: f64, rho: Correlation) -> Result<f64> {
    if a.is_nan() || b.is_nan() {
        return Err(PricingError::Domain("bvn_cdf of NaN".into()));
    }
    Ok(bvn_raw(a, b, rho.value()))
}

/// Probability mass of the standard bivariate normal over [a,b] x [c,d].
/// Accepts +-infinity bounds; rejects NaN, a > b, and c > d.
pub fn rect_prob(a: f64, b: f64, c: f64, d: f64, rho: Correlation) -> Result<f64> {
    if a.is_nan() || b.is_nan() || c.is_nan() || d.is_nan() {
        return Err(PricingError::Domain("rect_prob of NaN".into()));
    }
    if a > b || c > d {
        return Err(PricingError::Domain(format!(
            "rect_prob requires a <= b and c <= d, got [{a}, {b}] x [{c}, {d}]"
        )));
    }
    let r = rho.value();
    let p = bvn_raw(b, d, r) - bvn_raw(a, d, r) - bvn_raw(b, c, r) + bvn_raw(a, c, r);
    Ok(p.clamp(0.0, 1.0))
}

/// Standard normal quantile, Wichura's AS 241 (PPND16).
/// Rejects p outside the open interval (0, 1).
pub fn norm_inv_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(PricingError::Domain(format!(
            "norm_inv_cdf requires 0 < p < 1, got {p}"
        )));
    }
    Ok(quantile_raw(p))
}

pub(crate) fn cdf_raw(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub(crate) fn quantile_raw(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&AS241_A, r) / poly(&AS241_B, r);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        poly(&AS241_C, r) / poly(&AS241_D, r)
    } else {
        r -= 5.0;
        poly(&AS241_E, r) / poly(&AS241_F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const AS241_A: [f64; 8] = [
    3.387_132_872_796_366_5,
    1.331_416_678_917_843_8e2,
    1.971_590_950_306_551_3e3,
    1.373_169_376_550_946_1e4,
    4.592_195_393_154_987_2e4,
    6.726_577_092_700_870_9e4,
    3.343_057_558_358_813e4,
    2.509_080_928_730_122_7e3,
];
const AS241_B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091e1,
    6.871_870_074_920_579e2,
    5.394_196_021_424_751e3,
    2.121_379_430_158_659_7e4,
    3.930_789_580_009_271e4,
    2.872_908_573_572_194_3e4,
    5.226_495_278_852_545_5e3,
];
const AS241_C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_545,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    2.417_807_251_774_506e-1,
    2.272_384_498_926_918_4e-2,
    7.745_450_142_783_414e-4,
];
const AS241_D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_8,
    1.676_384_830_183_803_8,
    6.897_673_349_851e-1,
    1.481_039_764_274_800_8e-1,
    1.519_866_656_361_645_7e-2,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const AS241_E: [f64; 8] = [
    6.657_904_643_501_103_8,
    5.463_784_911_164_114_4,
    1.784_826_539_917_291_3,
    2.965_605_718_285_048_9e-1,
    2.653_218_952_657_612_4e-2,
    1.242_660_947_388_078_4e-3,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const AS241_F: [f64; 8] = [
    1.0,
    5.998_322_065_558_879_4e-1,
    1.369_298_809_227_358e-1,
    1.487_536_129_085_061_5e-2,
    7.868_691_311_456_132_9e-4,
    1.846_318_317_510_054_7e-5,
    1.421_511_758_316_445_9e-7,
    2.044_263_103_389_939_7e-15,
];

/// P(Z1 <= a, Z2 <= b). Infinite bounds resolved exactly; |rho| = 1 uses the
/// degenerate closed forms. Result clamped to [0, 1].
fn bvn_raw(a: f64, b: f64, r: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return 0.0;
    }
    if a == f64::INFINITY {
        return cdf_raw(b);
    }
    if b == f64::INFINITY {
        return cdf_raw(a);
    }
    if r == 1.0 {
        return cdf_raw(a.min(b));
    }
    if r == -1.0 {
        return (cdf_raw(a) + cdf_raw(b) - 1.0).max(0.0);
    }
    bvn_upper_tail(-a, -b, r).clamp(0.0, 1.0)
}

// Gauss-Legendre abscissae 1 +- x are formed from the stored negative nodes.
const QUAD_6: [(f64, f64); 3] = [
    (0.171_324_492_379_170_5, -0.932_469_514_203_152_2),
    (0.360_761_573_048_138_4, -0.661_209_386_466_264_7),
    (0.467_913_934_572_690_4, -0.238_619_186_083_197),
];
const QUAD_12: [(f64, f64); 6] = [
    (4.717_533_638_651_177e-2, -0.981_560_634_246_719_1),
    (0.106_939_325_995_318_3, -0.904_117_256_370_475),
    (0.160_078_328_543_346_4, -0.769_902_674_194_305),
    (0.203_167_426_723_065_9, -0.587_317_954_286_617_1),
    (0.233_492_536_538_354_7, -0.367_831_498_998_180_2),
    (0.249_147_045_813_402_9, -0.125_233_408_511_469_2),
];
const QUAD_20: [(f64, f64); 10] = [
    (1.761_400_713_915_212e-2, -0.993_128_599_185_094_9),
    (4.060_142_980_038_694e-2, -0.963_971_927_277_913_8),
    (6.267_204_833_410_906e-2, -0.912_234_428_251_325_9),
    (8.327_674_157_670_475e-2, -0.839_116_971_822_218_8),
    (0.101_930_119_817_240_4, -0.746_331_906_460_150_8),
    (0.118_194_531_961_518_4, -0.636_053_680_726_515),
    (0.131_688_638_449_176_6, -0.510_867_001_950_827_1),
    (0.142_096_109_318_382_1, -0.373_706_088_715_419_6),
    (0.149_172_986_472_603_7, -0.227_785_851_141_645_1),
    (0.152_753_387_130_725_9, -7.652_652_113_349_733e-2),
];

fn quadrature(r_abs: f64) -> &'static [(f64, f64)] {
    if r_abs < 0.3 {
        &QUAD_6
    } else if r_abs < 0.75 {
        &QUAD_12
    } else {
        &QUAD_20
    }
}

/// P(X > h, Y > k) for finite h, k and |r| < 1.
fn bvn_upper_tail(h: f64, k: f64, r: f64) -> f64 {
    if r.abs() <= 0.925 {
        let mut bvn = 0.0;
        if r != 0.0 {
            let hk = h * k;
            let hs = 0.5 * (h * h + k * k);
            let asr = 0.5 * r.asin();
            for &(w, x) in quadrature(r.abs()) {
                for is in [-1.0, 1.0] {
                    let sn = (asr * (is * x + 1.0)).sin();
                    bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
                }
            }
            bvn *= asr / (2.0 * PI);
        }
        bvn + cdf_raw(-h) * cdf_raw(-k)
    } else if r < 0.0 {
        // P(X>h, Y>k) = P(X>h) - P(X>h, -Y > -k), and (X, -Y) has correlation -r.
        cdf_raw(-h) - bvn_upper_tail(h, -k, -r)
    } else {
        // 0.925 < r < 1: the Genz transformation branch.
        let hk = h * k;
        let mut bvn = 0.0;
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let asr = -0.5 * (b_s / a_s + hk);
        if asr > -100.0 {
            bvn = a * asr.exp() * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0
                + c * d * a_s * a_s / 5.0);
        }
        if -hk < 100.0 {
            let b = b_s.sqrt();
            bvn -= (-0.5 * hk).exp()
                * (2.0 * PI).sqrt()
                * cdf_raw(-b / a)
                * b
                * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
        }
        a /= 2.0;
        for &(w, x) in QUAD_20.iter() {
            for is in [-1.0, 1.0] {
                let xs = {
                    let t = a * (is * x + 1.0);
                    t * t
                };
                let rs = (1.0 - xs).sqrt();
                let asr = -0.5 * (b_s / xs + hk);
                if asr > -100.0 {
                    bvn += a
                        * w
                        * asr.exp()
                        * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                            - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn /= -(2.0 * PI);
        bvn + cdf_raw(-h.max(k))
    }
}
