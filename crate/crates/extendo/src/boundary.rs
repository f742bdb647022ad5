//! Critical-value solvers for the decision boundaries I1 and I2 at the
//! extension date, and the region classification built on them.
//!
//! At T1 the holder compares exercise, extension (pay the fee A), and
//! abandonment. Extension wins exactly on the interval (I1, I2); the
//! endpoints solve one nonlinear equation each, handled here by a
//! safeguarded Newton iteration inside a sign-change bracket.

use crate::error::{PricingError, Result};
use crate::extendible::ContractSpec;
use crate::termstructure::PeriodParams;
use crate::vanilla::{ForwardBs, OptionKind};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A decision boundary: a positive level, or one of the two limits the
/// degenerate contracts collapse to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Zero,
    Finite(f64),
    Infinite,
}

impl Boundary {
    /// 0, the level, or +inf; feeding this through ln() gives exactly the
    /// limiting formula arguments the pricer needs.
    pub fn as_f64(self) -> f64 {
        match self {
            Boundary::Zero => 0.0,
            Boundary::Finite(v) => v,
            Boundary::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Boundary::Finite(_))
    }
}

impl Serialize for Boundary {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Boundary::Zero => serializer.serialize_str("zero"),
            Boundary::Finite(v) => serializer.serialize_f64(*v),
            Boundary::Infinite => serializer.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Boundary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Level(f64),
            Tag(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Level(v) if v.is_finite() && v > 0.0 => Ok(Boundary::Finite(v)),
            Raw::Level(v) => Err(D::Error::custom(format!(
                "boundary level must be positive and finite, got {v}"
            ))),
            Raw::Tag(s) => match s.as_str() {
                "zero" => Ok(Boundary::Zero),
                "infinite" => Ok(Boundary::Infinite),
                other => Err(D::Error::custom(format!(
                    "unknown boundary tag '{other}' (expected 'zero' or 'infinite')"
                ))),
            },
        }
    }
}

/// Solved decision region for one contract, with the residuals of the two
/// defining equations as solver diagnostics (0 for limit boundaries).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionBoundaries {
    pub i1: Boundary,
    pub i2: Boundary,
    pub never_extended: bool,
    pub i1_residual: f64,
    pub i2_residual: f64,
}

/// Scan direction for the exercise-indifference equations, which are only
/// meaningful on one side of K1.
#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanDirection {
    UpFromStrike,
    DownFromStrike,
}

// 2^40 spans twelve decades either side of K2; wider grids reach magnitudes
// where x's ulp swamps the strike-sized constants in the residual and
// rounding coincidences fabricate sign changes.
const GRID_EXPONENT: i32 = 40;
const MAX_ITER: usize = 200;

/// C(I1) = A and C(I2) = I2 - K1 + A, per the exercise-vs-extension
/// comparison of the call payoff.
pub fn solve_call_boundaries(
    spec: &ContractSpec,
    params: &PeriodParams,
) -> Result<DecisionBoundaries> {
    debug_assert_eq!(spec.kind, OptionKind::Call);
    let ctx = ForwardBs::new(OptionKind::Call, spec.k2, params);
    let a = spec.a;
    let k1 = spec.k1;

    let (i1, i1_residual) = if a == 0.0 {
        // C(x) -> 0 as x -> 0, so the fee equation's root collapses to 0.
        (Boundary::Zero, 0.0)
    } else {
        solve_monotone(
            &|x| ctx.price(x) - a,
            &|x| ctx.delta(x),
            spec.k2,
            // All-negative: the fee exceeds the continuation value on the
            // whole grid, so extension is never worth paying for.
            |_f_bottom, f_top| {
                if f_top < 0.0 {
                    Boundary::Infinite
                } else {
                    Boundary::Zero
                }
            },
        )?
    };

    // Below K1 the exercise payoff is kinked away, so roots of the linear
    // comparison there are artifacts; scan upward from the strike and keep
    // the crossing where extension first yields to exercise. Staying
    // positive forever happens under nonnegative forward carry shortfall,
    // where the continuation grows at least as fast as intrinsic.
    let (i2, i2_residual) = solve_from_strike(
        &|x| ctx.price(x) - (x - k1 + a),
        &|x| ctx.delta(x) - 1.0,
        k1,
        spec.k2,
        ScanDirection::UpFromStrike,
        Boundary::Infinite,
        Boundary::Zero,
    )?;

    let never_extended = match i1 {
        Boundary::Zero => false,
        Boundary::Finite(v) => v >= k1,
        Boundary::Infinite => true,
    };
    Ok(DecisionBoundaries {
        i1,
        i2,
        never_extended,
        i1_residual,
        i2_residual,
    })
}

/// P(I1) = K1 - I1 + A and P(I2) = A, per the put payoff comparison.
pub fn solve_put_boundaries(
    spec: &ContractSpec,
    params: &PeriodParams,
) -> Result<DecisionBoundaries> {
    debug_assert_eq!(spec.kind, OptionKind::Put);
    let ctx = ForwardBs::new(OptionKind::Put, spec.k2, params);
    let a = spec.a;
    let k1 = spec.k1;

    // Mirror of the call's upper scan: above K1 the exercise payoff is
    // kinked away, so scan downward from the strike for the crossing where
    // extension first yields to exercise. Staying positive down to zero
    // means P(0+) = K2 e^{-r12 tau} already covers K1 + A.
    let (i1, i1_residual) = solve_from_strike(
        &|x| ctx.price(x) - (k1 - x + a),
        &|x| ctx.delta(x) + 1.0,
        k1,
        spec.k2,
        ScanDirection::DownFromStrike,
        Boundary::Zero,
        Boundary::Infinite,
    )?;

    let (i2, i2_residual) = if a == 0.0 {
        // P(x) > 0 strictly, so P(I2) = 0 has no finite root.
        (Boundary::Infinite, 0.0)
    } else {
        solve_monotone(
            &|x| ctx.price(x) - a,
            &|x| ctx.delta(x),
            spec.k2,
            // All-negative: the fee exceeds P everywhere (A >= P(0+)).
            |f_bottom, _f_top| {
                if f_bottom < 0.0 {
                    Boundary::Zero
                } else {
                    Boundary::Infinite
                }
            },
        )?
    };

    let never_extended = match i2 {
        Boundary::Zero => true,
        Boundary::Finite(v) => v <= k1,
        Boundary::Infinite => false,
    };
    Ok(DecisionBoundaries {
        i1,
        i2,
        never_extended,
        i1_residual,
        i2_residual,
    })
}

/// Scan the geometric grid K2 * 2^k, k in [-40, 40], for the sign change of
/// a strictly monotone residual and polish it with the safeguarded Newton
/// iteration. `classify` maps a sign-change-free scan to its limiting
/// boundary.
fn solve_monotone(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    k2: f64,
    classify: impl Fn(f64, f64) -> Boundary,
) -> Result<(Boundary, f64)> {
    let mut prev: Option<(f64, f64)> = None;
    let mut f_bottom = f64::NAN;
    let mut f_top = f64::NAN;
    for k in -GRID_EXPONENT..=GRID_EXPONENT {
        let x = k2 * 2.0f64.powi(k);
        let fx = f(x);
        if fx == 0.0 {
            return Ok((Boundary::Finite(x), 0.0));
        }
        if k == -GRID_EXPONENT {
            f_bottom = fx;
        }
        if k == GRID_EXPONENT {
            f_top = fx;
        }
        if let Some((px, pfx)) = prev {
            if pfx.signum() != fx.signum() {
                let (root, residual) = hybrid_root(f, df, px, x, pfx, fx, k2)?;
                return Ok((Boundary::Finite(root), residual));
            }
        }
        prev = Some((x, fx));
    }
    Ok((classify(f_bottom, f_top), 0.0))
}

/// Solve an exercise-indifference equation on its meaningful side of K1.
///
/// The residual compares extension against the linear branch of the payoff,
/// which only prices the true payoff on one side of the strike; with
/// negative forward carry shortfall the comparison can also turn positive
/// again far on the wrong end, where holding the long-dated claim beats
/// locked-in intrinsic forever. Both effects produce spurious grid
/// crossings, so the scan starts at K1, where a nonempty extension region
/// forces a positive sign, and keeps the first crossing to negative going
/// outward. A scan that never turns negative yields `unbounded`; one that
/// starts negative has an empty region on this side and yields `empty`.
fn solve_from_strike(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    k1: f64,
    k2: f64,
    direction: ScanDirection,
    unbounded: Boundary,
    empty: Boundary,
) -> Result<(Boundary, f64)> {
    let f_start = f(k1);
    if f_start == 0.0 {
        return Ok((Boundary::Finite(k1), 0.0));
    }
    if f_start < 0.0 {
        return Ok((empty, 0.0));
    }
    let beyond: Box<dyn Iterator<Item = i32>> = match direction {
        ScanDirection::UpFromStrike => Box::new(-GRID_EXPONENT..=GRID_EXPONENT),
        ScanDirection::DownFromStrike => Box::new((-GRID_EXPONENT..=GRID_EXPONENT).rev()),
    };
    let mut prev = (k1, f_start);
    for k in beyond {
        let x = k2 * 2.0f64.powi(k);
        let past_strike = match direction {
            ScanDirection::UpFromStrike => x > k1,
            ScanDirection::DownFromStrike => x < k1,
        };
        if !past_strike {
            continue;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok((Boundary::Finite(x), 0.0));
        }
        if fx < 0.0 {
            let (px, pfx) = prev;
            let (lo, hi, f_lo, f_hi) = match direction {
                ScanDirection::UpFromStrike => (px, x, pfx, fx),
                ScanDirection::DownFromStrike => (x, px, fx, pfx),
            };
            let (root, residual) = hybrid_root(f, df, lo, hi, f_lo, f_hi, k2)?;
            return Ok((Boundary::Finite(root), residual));
        }
        prev = (x, fx);
    }
    Ok((unbounded, 0.0))
}

/// Newton steps accepted only inside the current sign-change bracket; a
/// bisection step is forced whenever two iterations pass without the bracket
/// halving, so the width shrinks geometrically no matter what Newton does.
fn hybrid_root(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    k2: f64,
) -> Result<(f64, f64)> {
    if f_lo == 0.0 {
        return Ok((lo, 0.0));
    }
    if f_hi == 0.0 {
        return Ok((hi, 0.0));
    }
    let res_tol = 1e-10 * k2.max(1.0);
    let mut x = 0.5 * (lo + hi);
    let mut last_width = hi - lo;
    let mut stalls = 0u32;
    for _ in 0..MAX_ITER {
        let fx = f(x);
        if fx == 0.0 {
            return Ok((x, 0.0));
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        let width = hi - lo;
        let mid = 0.5 * (lo + hi);
        // Far from the strike scale the residual cannot be evaluated below
        // x * eps, so the acceptance threshold must grow with the root.
        if fx.abs() <= res_tol.max(1e-13 * mid) && width <= 1e-12 * mid {
            return Ok((x, fx.abs()));
        }
        if width > 0.5 * last_width {
            stalls += 1;
        } else {
            stalls = 0;
            last_width = width;
        }
        let newton = {
            let d = df(x);
            if d.is_finite() && d != 0.0 {
                let step = x - fx / d;
                (step > lo && step < hi).then_some(step)
            } else {
                None
            }
        };
        x = match newton {
            Some(nx) if stalls < 2 => nx,
            _ => {
                stalls = 0;
                last_width = width;
                mid
            }
        };
    }
    let _ = f_hi;
    Err(PricingError::Solver {
        message: "boundary iteration cap exceeded".into(),
        lo,
        hi,
    })
}
