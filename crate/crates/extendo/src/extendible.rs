//! Closed-form prices for holder-extendible European options, in two
//! algebraic forms that are asserted against each other, plus reconstructions
//! of two erroneous published put formulas kept for comparison reports.
//!
//! The holder owns an option maturing at T1 with strike K1. At T1 they may
//! instead pay a fee A to extend to T2 with strike K2. Extension is optimal
//! exactly when the spot sits inside (I1, I2), the interval solved by the
//! boundary module; the price is the discounted expectation over the
//! three-way decision, which collapses to five closed-form terms.

use crate::boundary::{solve_call_boundaries, solve_put_boundaries, DecisionBoundaries};
use crate::error::{PricingError, Result};
use crate::gauss::{bvn_cdf, interval_prob, norm_cdf, rect_prob, Correlation};
use crate::termstructure::{period_params, MarketData, PeriodParams};
use crate::vanilla::{bs_t0, OptionKind};
use serde::{Deserialize, Serialize};

/// The contract: base option (K1, T1), extended option (K2, T2), fee A
/// payable at T1 on extension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ContractSpecRaw")]
pub struct ContractSpec {
    pub kind: OptionKind,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "A")]
    pub a: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContractSpecRaw {
    kind: OptionKind,
    #[serde(rename = "K1")]
    k1: f64,
    #[serde(rename = "K2")]
    k2: f64,
    #[serde(rename = "T1")]
    t1: f64,
    #[serde(rename = "T2")]
    t2: f64,
    #[serde(rename = "A")]
    a: f64,
}

impl TryFrom<ContractSpecRaw> for ContractSpec {
    type Error = PricingError;
    fn try_from(raw: ContractSpecRaw) -> Result<Self> {
        ContractSpec::new(raw.kind, raw.k1, raw.k2, raw.t1, raw.t2, raw.a)
    }
}

impl ContractSpec {
    pub fn new(kind: OptionKind, k1: f64, k2: f64, t1: f64, t2: f64, a: f64) -> Result<Self> {
        for (name, v) in [("K1", k1), ("K2", k2), ("T1", t1), ("T2", t2), ("A", a)] {
            if !v.is_finite() {
                return Err(PricingError::InvalidContract(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        if k1 <= 0.0 || k2 <= 0.0 {
            return Err(PricingError::InvalidContract(format!(
                "strikes must be positive, got K1={k1}, K2={k2}"
            )));
        }
        if !(t1 > 0.0 && t1 < t2) {
            return Err(PricingError::InvalidContract(format!(
                "maturities must satisfy 0 < T1 < T2, got T1={t1}, T2={t2}"
            )));
        }
        if a < 0.0 {
            return Err(PricingError::InvalidContract(format!(
                "extension fee must be nonnegative, got A={a}"
            )));
        }
        Ok(ContractSpec {
            kind,
            k1,
            k2,
            t1,
            t2,
            a,
        })
    }

    pub fn load_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| PricingError::InvalidContract(format!("{e}")))
    }
}

/// The eight log-moneyness constants of the pricing formulas. a and b locate
/// the decision boundaries in standardized T1 log-space, c and d the strikes;
/// each gamma is the same constant reflected around its volatility scale.
/// Degenerate boundaries appear as +-infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbcdGamma {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
}

/// Standardized constants from the solved boundaries. A zero boundary maps
/// to -inf, an infinite one to +inf; if the solved interval is inverted
/// (empty extension region) a and b collapse to one point, and d is clamped
/// into [a, b] so every downstream interval is well ordered.
pub fn abcd_gamma(
    spec: &ContractSpec,
    params: &PeriodParams,
    boundaries: &DecisionBoundaries,
    spot: f64,
) -> AbcdGamma {
    let s1 = params.sigma1 * params.t1.sqrt();
    let s2 = params.sigma2 * params.t2.sqrt();
    let ln_x0 = spot.ln();
    let z1 = |ln_level: f64| (ln_level - ln_x0 - params.mu1 * params.t1
        + 0.5 * params.sigma1 * params.sigma1 * params.t1)
        / s1;
    let mut a = z1(boundaries.i1.as_f64().ln());
    let mut b = z1(boundaries.i2.as_f64().ln());
    if a > b {
        let v = if a.is_finite() && b.is_finite() {
            0.5 * (a + b)
        } else if a.is_finite() {
            a
        } else if b.is_finite() {
            b
        } else {
            0.0
        };
        a = v;
        b = v;
    }
    let c = (spec.k2.ln() - ln_x0 - params.mu2 * params.t2
        + 0.5 * params.sigma2 * params.sigma2 * params.t2)
        / s2;
    let d = z1(spec.k1.ln()).clamp(a, b);
    AbcdGamma {
        a,
        b,
        c,
        d,
        gamma1: s1 - b,
        gamma2: s1 - a,
        gamma3: s2 - c,
        gamma4: s1 - d,
    }
}

/// Which algebraic layout of the closed form to evaluate. The two are equal
/// mathematically; evaluating both is the standing typo regression guard.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriceForm {
    /// Bivariate rectangle probabilities, as in the corrected final formulas.
    Rectangle,
    /// Differences of bivariate CDFs, as in the intermediate displays.
    Difference,
}

/// A fully priced contract: the price, its five-term decomposition, and the
/// intermediate objects a consumer needs to audit it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceReport {
    pub price: f64,
    pub vanilla_component: f64,
    pub decomposition: [f64; 5],
    pub boundaries: DecisionBoundaries,
    pub params: PeriodParams,
    pub extension_probability: f64,
}

struct Ingredients {
    params: PeriodParams,
    boundaries: DecisionBoundaries,
    g: AbcdGamma,
    vanilla: f64,
    s1: f64,
    s2: f64,
    rho: Correlation,
    df1: f64,
    df2: f64,
    fwd1: f64,
    fwd2: f64,
}

fn ingredients(spec: &ContractSpec, market: &MarketData) -> Result<Ingredients> {
    let params = period_params(market, spec.t1, spec.t2)?;
    let boundaries = match spec.kind {
        OptionKind::Call => solve_call_boundaries(spec, &params)?,
        OptionKind::Put => solve_put_boundaries(spec, &params)?,
    };
    let g = abcd_gamma(spec, &params, &boundaries, market.spot);
    let vanilla = bs_t0(spec.kind, market.spot, spec.k1, &params)?.price;
    Ok(Ingredients {
        s1: params.sigma1 * params.t1.sqrt(),
        s2: params.sigma2 * params.t2.sqrt(),
        rho: Correlation::new(params.rho)?,
        df1: (-params.r1 * params.t1).exp(),
        df2: (-params.r2 * params.t2).exp(),
        fwd1: market.spot * ((params.mu1 - params.r1) * params.t1).exp(),
        fwd2: market.spot * ((params.mu2 - params.r2) * params.t2).exp(),
        params,
        boundaries,
        g,
        vanilla,
    })
}

fn call_terms(spec: &ContractSpec, ing: &Ingredients, form: PriceForm) -> Result<[f64; 5]> {
    let Ingredients {
        g,
        vanilla,
        s1,
        s2,
        rho,
        df1,
        df2,
        fwd1,
        fwd2,
        ..
    } = *ing;
    let AbcdGamma {
        gamma1: g1,
        gamma2: g2,
        gamma3: g3,
        gamma4: g4,
        ..
    } = g;
    let neg = f64::NEG_INFINITY;
    Ok(match form {
        PriceForm::Rectangle => [
            vanilla + fwd2 * rect_prob(g1, g2, neg, g3, rho)?,
            -df2 * spec.k2 * rect_prob(g1 - s1, g2 - s1, neg, g3 - s2, rho)?,
            -df1 * spec.a * interval_prob(g1 - s1, g2 - s1)?,
            -fwd1 * interval_prob(g1, g4)?,
            df1 * spec.k1 * interval_prob(g1 - s1, g4 - s1)?,
        ],
        PriceForm::Difference => [
            vanilla + fwd2 * (bvn_cdf(g2, g3, rho)? - bvn_cdf(g1, g3, rho)?),
            -df2 * spec.k2 * (bvn_cdf(g2 - s1, g3 - s2, rho)? - bvn_cdf(g1 - s1, g3 - s2, rho)?),
            -df1 * spec.a * (norm_cdf(g2 - s1)? - norm_cdf(g1 - s1)?),
            -fwd1 * (norm_cdf(g4)? - norm_cdf(g1)?),
            df1 * spec.k1 * (norm_cdf(g4 - s1)? - norm_cdf(g1 - s1)?),
        ],
    })
}

fn put_terms(spec: &ContractSpec, ing: &Ingredients, form: PriceForm) -> Result<[f64; 5]> {
    let Ingredients {
        g,
        vanilla,
        s1,
        s2,
        rho,
        df1,
        df2,
        fwd1,
        fwd2,
        ..
    } = *ing;
    let AbcdGamma {
        gamma1: g1,
        gamma2: g2,
        gamma3: g3,
        gamma4: g4,
        ..
    } = g;
    let neg = f64::NEG_INFINITY;
    Ok(match form {
        PriceForm::Rectangle => [
            vanilla - fwd2 * rect_prob(-g2, -g1, neg, -g3, rho)?,
            df2 * spec.k2 * rect_prob(s1 - g2, s1 - g1, neg, s2 - g3, rho)?,
            -df1 * spec.a * interval_prob(g1 - s1, g2 - s1)?,
            fwd1 * interval_prob(g4, g2)?,
            -df1 * spec.k1 * interval_prob(g4 - s1, g2 - s1)?,
        ],
        PriceForm::Difference => [
            vanilla - fwd2 * (bvn_cdf(-g1, -g3, rho)? - bvn_cdf(-g2, -g3, rho)?),
            df2 * spec.k2 * (bvn_cdf(s1 - g1, s2 - g3, rho)? - bvn_cdf(s1 - g2, s2 - g3, rho)?),
            -df1 * spec.a * (norm_cdf(g2 - s1)? - norm_cdf(g1 - s1)?),
            fwd1 * (norm_cdf(g2)? - norm_cdf(g4)?),
            -df1 * spec.k1 * (norm_cdf(g2 - s1)? - norm_cdf(g4 - s1)?),
        ],
    })
}

/// Price a contract in the requested algebraic form.
pub fn price(spec: &ContractSpec, market: &MarketData, form: PriceForm) -> Result<PriceReport> {
    let ing = ingredients(spec, market)?;
    let decomposition = match spec.kind {
        OptionKind::Call => call_terms(spec, &ing, form)?,
        OptionKind::Put => put_terms(spec, &ing, form)?,
    };
    let price = decomposition.iter().sum();
    Ok(PriceReport {
        price,
        vanilla_component: ing.vanilla,
        decomposition,
        boundaries: ing.boundaries,
        params: ing.params,
        extension_probability: interval_prob(ing.g.a, ing.g.b)?,
    })
}

/// Price a holder-extendible call (rectangle form).
pub fn price_call(spec: &ContractSpec, market: &MarketData) -> Result<PriceReport> {
    if spec.kind != OptionKind::Call {
        return Err(PricingError::InvalidContract(
            "price_call requires kind=call".into(),
        ));
    }
    price(spec, market, PriceForm::Rectangle)
}

/// Price a holder-extendible put (rectangle form, corrected formula).
pub fn price_put(spec: &ContractSpec, market: &MarketData) -> Result<PriceReport> {
    if spec.kind != OptionKind::Put {
        return Err(PricingError::InvalidContract(
            "price_put requires kind=put".into(),
        ));
    }
    price(spec, market, PriceForm::Rectangle)
}

/// The three independent defects of the published put formulas, as toggles
/// away from the corrected evaluation. Toggling a set twice restores the
/// corrected formula, which the tests assert bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct PutSubs {
    /// Evaluate the two bivariate terms on the un-reflected argument tuple
    /// (gamma1, gamma2 | -inf, gamma3) instead of the corrected reflection.
    pub(crate) flip_bivariate_args: bool,
    /// Discount the K2 term over the extension period only instead of T2.
    pub(crate) short_k2_discount: bool,
    /// Negate the correlation inside both bivariate terms.
    pub(crate) negate_rho: bool,
}

impl PutSubs {
    pub(crate) const LONGSTAFF_1990: PutSubs = PutSubs {
        flip_bivariate_args: true,
        short_k2_discount: true,
        negate_rho: false,
    };
    pub(crate) const HAUG_1998: PutSubs = PutSubs {
        flip_bivariate_args: false,
        short_k2_discount: false,
        negate_rho: true,
    };
}

#[cfg(test)]
impl PutSubs {
    pub(crate) const CORRECTED: PutSubs = PutSubs {
        flip_bivariate_args: false,
        short_k2_discount: false,
        negate_rho: false,
    };

    pub(crate) fn toggled(self, subs: PutSubs) -> PutSubs {
        PutSubs {
            flip_bivariate_args: self.flip_bivariate_args ^ subs.flip_bivariate_args,
            short_k2_discount: self.short_k2_discount ^ subs.short_k2_discount,
            negate_rho: self.negate_rho ^ subs.negate_rho,
        }
    }
}

/// The corrected put with a chosen set of published defects re-applied.
/// Restricted to constant curves because the published formulas were stated
/// for a single flat parameter set.
pub(crate) fn price_put_with_subs(
    spec: &ContractSpec,
    market: &MarketData,
    subs: PutSubs,
) -> Result<f64> {
    if spec.kind != OptionKind::Put {
        return Err(PricingError::InvalidContract(
            "put formula variants require kind=put".into(),
        ));
    }
    if !market.is_constant() {
        return Err(PricingError::UnsupportedSetting(
            "put formula variants are defined for constant curves only".into(),
        ));
    }
    let ing = ingredients(spec, market)?;
    let Ingredients {
        g,
        vanilla,
        s1,
        s2,
        df1,
        df2,
        fwd1,
        fwd2,
        ref params,
        ..
    } = ing;
    let AbcdGamma {
        gamma1: g1,
        gamma2: g2,
        gamma3: g3,
        gamma4: g4,
        ..
    } = g;
    let neg = f64::NEG_INFINITY;
    let rho = if subs.negate_rho {
        Correlation::new(-params.rho)?
    } else {
        Correlation::new(params.rho)?
    };
    let (x_rect, k_rect) = if subs.flip_bivariate_args {
        (
            rect_prob(g1, g2, neg, g3, rho)?,
            rect_prob(g1 - s1, g2 - s1, neg, g3 - s2, rho)?,
        )
    } else {
        (
            rect_prob(-g2, -g1, neg, -g3, rho)?,
            rect_prob(s1 - g2, s1 - g1, neg, s2 - g3, rho)?,
        )
    };
    let k_discount = if subs.short_k2_discount {
        (-params.r12 * (params.t2 - params.t1)).exp()
    } else {
        df2
    };
    let terms = [
        vanilla - fwd2 * x_rect,
        spec.k2 * k_discount * k_rect,
        -df1 * spec.a * interval_prob(g1 - s1, g2 - s1)?,
        fwd1 * interval_prob(g4, g2)?,
        -df1 * spec.k1 * interval_prob(g4 - s1, g2 - s1)?,
    ];
    Ok(terms.iter().sum())
}

/// The extendible put exactly as published in 1990, reconstructed for the
/// comparison report. Not a price; see the errata command.
pub fn price_put_longstaff1990(spec: &ContractSpec, market: &MarketData) -> Result<f64> {
    price_put_with_subs(spec, market, PutSubs::LONGSTAFF_1990)
}

/// The extendible put exactly as published in 1998 (corrected arguments but
/// negated correlation), reconstructed for the comparison report.
pub fn price_put_haug1998(spec: &ContractSpec, market: &MarketData) -> Result<f64> {
    price_put_with_subs(spec, market, PutSubs::HAUG_1998)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::Boundary;
    use approx::assert_abs_diff_eq;

    fn flat_market() -> MarketData {
        MarketData::constant(100.0, 0.08, 0.0, 0.25).unwrap()
    }

    fn spec(kind: OptionKind, k2: f64, a: f64) -> ContractSpec {
        ContractSpec::new(kind, 100.0, k2, 0.5, 1.0, a).unwrap()
    }

    #[test]
    fn contract_spec_validation_and_serde() {
        assert!(ContractSpec::new(OptionKind::Call, 100.0, 95.0, 1.0, 0.5, 1.0).is_err());
        assert!(ContractSpec::new(OptionKind::Call, -1.0, 95.0, 0.5, 1.0, 1.0).is_err());
        assert!(ContractSpec::new(OptionKind::Call, 100.0, 95.0, 0.5, 1.0, -0.5).is_err());

        let s: ContractSpec = serde_json::from_str(
            r#"{"kind":"put","K1":100,"K2":95,"T1":0.5,"T2":1.0,"A":1.0}"#,
        )
        .unwrap();
        assert_eq!(s.kind, OptionKind::Put);
        assert_eq!(s.k2, 95.0);
        let json = serde_json::to_string(&s).unwrap();
        let back: ContractSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(s, back);
        assert!(serde_json::from_str::<ContractSpec>(
            r#"{"kind":"put","K1":100,"K2":95,"T1":2.0,"T2":1.0,"A":1.0}"#
        )
        .is_err());
    }

    #[test]
    fn abcd_identities() {
        let market = flat_market();
        let s = spec(OptionKind::Call, 105.0, 1.0);
        let p = period_params(&market, 0.5, 1.0).unwrap();
        let b = solve_call_boundaries(&s, &p).unwrap();
        let g = abcd_gamma(&s, &p, &b, market.spot);
        let s1 = p.sigma1 * p.t1.sqrt();
        let s2 = p.sigma2 * p.t2.sqrt();
        assert_eq!(g.gamma1, s1 - g.b);
        assert_eq!(g.gamma2, s1 - g.a);
        assert_eq!(g.gamma3, s2 - g.c);
        assert_eq!(g.gamma4, s1 - g.d);
        assert!(g.a <= g.b);
        assert!(g.a <= g.d && g.d <= g.b);

        // Direct evaluation of the defining expressions from the solved
        // boundary levels.
        let direct = |level: f64| {
            (level.ln() - 100.0f64.ln() - p.mu1 * p.t1 + 0.5 * p.sigma1 * p.sigma1 * p.t1)
                / s1
        };
        if let (Boundary::Finite(i1), Boundary::Finite(i2)) = (b.i1, b.i2) {
            assert_abs_diff_eq!(g.a, direct(i1), epsilon = 1e-15);
            assert_abs_diff_eq!(g.b, direct(i2), epsilon = 1e-15);
        } else {
            panic!("benchmark call boundaries should be finite");
        }
    }

    #[test]
    fn abcd_zero_log_term() {
        // K1 = X0 and mu1 = sigma1^2/2 make the standardized strike location
        // vanish.
        let market = MarketData::constant(100.0, 0.03125, 0.0, 0.25).unwrap();
        let p = period_params(&market, 0.5, 1.0).unwrap();
        let s = ContractSpec::new(OptionKind::Call, 100.0, 105.0, 0.5, 1.0, 1.0).unwrap();
        let b = solve_call_boundaries(&s, &p).unwrap();
        let g = abcd_gamma(&s, &p, &b, market.spot);
        assert_abs_diff_eq!(g.d, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.gamma4, p.sigma1 * p.t1.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn abcd_empty_region_collapse() {
        let market = flat_market();
        let p = period_params(&market, 0.5, 1.0).unwrap();
        let s = spec(OptionKind::Put, 95.0, 1.0);
        let b = DecisionBoundaries {
            i1: Boundary::Finite(110.0),
            i2: Boundary::Finite(110.0),
            never_extended: false,
            i1_residual: 0.0,
            i2_residual: 0.0,
        };
        let g = abcd_gamma(&s, &p, &b, market.spot);
        assert_eq!(g.a, g.b);
        assert_eq!(g.gamma1, g.gamma2);

        let inverted = DecisionBoundaries {
            i1: Boundary::Finite(120.0),
            i2: Boundary::Finite(90.0),
            ..b
        };
        let g = abcd_gamma(&s, &p, &inverted, market.spot);
        assert_eq!(g.a, g.b);
        assert_eq!(g.d, g.a);
    }

    // Frozen values from a high-precision implementation of the closed forms
    // verified against an exact-sampling Monte Carlo before this module was
    // written.
    #[test]
    fn benchmark_grid_frozen_values() {
        let market = flat_market();
        let cases = [
            (OptionKind::Call, 95.0, 0.5, 16.261545244802326),
            (OptionKind::Call, 95.0, 1.0, 15.795234789278375),
            (OptionKind::Call, 95.0, 2.0, 14.892425694239580),
            (OptionKind::Call, 105.0, 0.5, 11.057611198769939),
            (OptionKind::Call, 105.0, 1.0, 10.705441867870029),
            (OptionKind::Call, 105.0, 2.0, 10.123170993589722),
            (OptionKind::Put, 95.0, 0.5, 5.6339965548013506),
            (OptionKind::Put, 95.0, 1.0, 5.4458114146371737),
            (OptionKind::Put, 95.0, 2.0, 5.2122507349560166),
            (OptionKind::Put, 105.0, 0.5, 7.8713196181654542),
            (OptionKind::Put, 105.0, 1.0, 7.4379481513038832),
            (OptionKind::Put, 105.0, 2.0, 6.7081150296899535),
        ];
        for (kind, k2, a, want) in cases {
            let s = spec(kind, k2, a);
            let report = price(&s, &market, PriceForm::Rectangle).unwrap();
            assert_abs_diff_eq!(report.price, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn forms_agree_and_decomposition_sums() {
        let market = flat_market();
        for kind in [OptionKind::Call, OptionKind::Put] {
            for k2 in [95.0, 105.0] {
                for a in [0.0, 0.5, 1.0, 2.0] {
                    let s = spec(kind, k2, a);
                    let rect = price(&s, &market, PriceForm::Rectangle).unwrap();
                    let diff = price(&s, &market, PriceForm::Difference).unwrap();
                    assert_abs_diff_eq!(
                        rect.price,
                        diff.price,
                        epsilon = 1e-12 * rect.price.abs().max(1.0)
                    );
                    let sum: f64 = rect.decomposition.iter().sum();
                    assert_abs_diff_eq!(rect.price, sum, epsilon = 1e-12 * sum.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn never_extended_collapses_to_vanilla_exactly() {
        let market = flat_market();

        // Put: fee at or above the x -> 0 limit of the continuation value.
        let s = spec(OptionKind::Put, 105.0, 101.0);
        let report = price_put(&s, &market).unwrap();
        assert!(report.boundaries.never_extended);
        assert_eq!(report.price, report.vanilla_component);
        assert_eq!(report.extension_probability, 0.0);

        // Call: fee large enough that I1 rises above K1.
        let s = spec(OptionKind::Call, 105.0, 30.0);
        let report = price_call(&s, &market).unwrap();
        assert!(report.boundaries.never_extended);
        assert_eq!(report.price, report.vanilla_component);
        assert_eq!(report.extension_probability, 0.0);
    }

    #[test]
    fn dominates_vanilla_and_monotone_in_fee() {
        let market = flat_market();
        for kind in [OptionKind::Call, OptionKind::Put] {
            for k2 in [95.0, 105.0] {
                let mut last = f64::INFINITY;
                for a in [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
                    let s = spec(kind, k2, a);
                    let report = price(&s, &market, PriceForm::Rectangle).unwrap();
                    assert!(
                        report.price >= report.vanilla_component - 1e-10,
                        "{kind:?} K2={k2} A={a}: {} < vanilla {}",
                        report.price,
                        report.vanilla_component
                    );
                    assert!(report.price <= last + 1e-10);
                    last = report.price;
                }
                // Huge fee: nothing left but the base option.
                let s = spec(kind, k2, 1e6);
                let report = price(&s, &market, PriceForm::Rectangle).unwrap();
                assert_eq!(report.price, report.vanilla_component);
            }
        }
    }

    #[test]
    fn zero_fee_put_is_finite_and_dominates() {
        // A = 0 put: extension region is (I1, infinity), the report stays
        // finite and dominates the vanilla.
        let market = flat_market();
        let s = spec(OptionKind::Put, 95.0, 0.0);
        let report = price_put(&s, &market).unwrap();
        assert_eq!(report.boundaries.i2, Boundary::Infinite);
        assert!(report.price.is_finite());
        assert!(report.price >= report.vanilla_component);
        assert!(report.extension_probability > 0.0 && report.extension_probability < 1.0);
    }

    #[test]
    fn equal_integrals_give_identical_price() {
        use crate::termstructure::TermStructure;
        let flat = flat_market();
        // Same integrals over [0, 0.5] and [0, 1] as the flat market, with
        // exactly representable step arithmetic, so every period average is
        // bit-equal and so is the price.
        let staircase = MarketData::new(
            100.0,
            TermStructure::new(vec![(0.25, 0.06), (0.5, 0.10), (1.0, 0.08)]).unwrap(),
            TermStructure::new(vec![(0.25, -0.01), (0.5, 0.01), (1.0, 0.0)]).unwrap(),
            TermStructure::new(vec![(1.0, 0.25)]).unwrap(),
        )
        .unwrap();
        for kind in [OptionKind::Call, OptionKind::Put] {
            let s = spec(kind, 95.0, 1.0);
            let a = price(&s, &flat, PriceForm::Rectangle).unwrap();
            let b = price(&s, &staircase, PriceForm::Rectangle).unwrap();
            assert_eq!(a.price, b.price);
            assert_eq!(a.params, b.params);
        }
    }

    #[test]
    fn extension_probability_matches_interval() {
        let market = flat_market();
        let s = spec(OptionKind::Call, 105.0, 1.0);
        let p = period_params(&market, 0.5, 1.0).unwrap();
        let b = solve_call_boundaries(&s, &p).unwrap();
        let g = abcd_gamma(&s, &p, &b, market.spot);
        let report = price_call(&s, &market).unwrap();
        assert_eq!(
            report.extension_probability,
            interval_prob(g.a, g.b).unwrap()
        );
        assert!(report.extension_probability > 0.0 && report.extension_probability < 1.0);
    }

    // Frozen variant values from the same pre-build oracle; the published
    // formulas sit far from the corrected one on this contract.
    #[test]
    fn published_put_variants_frozen_values() {
        let market = flat_market();
        let s = spec(OptionKind::Put, 95.0, 1.0);
        let corrected = price_put(&s, &market).unwrap().price;
        let longstaff = price_put_longstaff1990(&s, &market).unwrap();
        let haug = price_put_haug1998(&s, &market).unwrap();
        assert_abs_diff_eq!(corrected, 5.4458114146371737, epsilon = 1e-10);
        assert_abs_diff_eq!(longstaff, 0.56427389046697326, epsilon = 1e-10);
        assert_abs_diff_eq!(haug, 8.5605679977623661, epsilon = 1e-10);
    }

    #[test]
    fn variants_equal_corrected_when_never_extended() {
        let market = flat_market();
        let s = spec(OptionKind::Put, 105.0, 101.0);
        let corrected = price_put(&s, &market).unwrap().price;
        assert_eq!(price_put_longstaff1990(&s, &market).unwrap(), corrected);
        assert_eq!(price_put_haug1998(&s, &market).unwrap(), corrected);
    }

    #[test]
    fn variants_reject_time_dependent_curves() {
        use crate::termstructure::TermStructure;
        let market = MarketData::new(
            100.0,
            TermStructure::new(vec![(0.5, 0.06), (1.0, 0.10)]).unwrap(),
            TermStructure::flat(0.0).unwrap(),
            TermStructure::flat(0.25).unwrap(),
        )
        .unwrap();
        let s = spec(OptionKind::Put, 95.0, 1.0);
        assert!(matches!(
            price_put_longstaff1990(&s, &market),
            Err(PricingError::UnsupportedSetting(_))
        ));
        assert!(matches!(
            price_put_haug1998(&s, &market),
            Err(PricingError::UnsupportedSetting(_))
        ));
        // The corrected formula itself has no such restriction.
        assert!(price_put(&s, &market).is_ok());
    }

    #[test]
    fn substitutions_are_an_involution() {
        let market = flat_market();
        let s = spec(OptionKind::Put, 95.0, 1.0);
        for error_set in [PutSubs::LONGSTAFF_1990, PutSubs::HAUG_1998] {
            let round_trip = PutSubs::CORRECTED.toggled(error_set).toggled(error_set);
            assert_eq!(round_trip, PutSubs::CORRECTED);
            let a = price_put_with_subs(&s, &market, PutSubs::CORRECTED).unwrap();
            let b = price_put_with_subs(&s, &market, round_trip).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn haug_variant_converges_to_corrected_as_rho_vanishes() {
        // T1 << T2 drives the period correlation to 0, and the only defect
        // of this variant is the sign of the correlation.
        let market = flat_market();
        let mut gaps = Vec::new();
        for t1 in [0.25, 0.05, 0.01, 0.002] {
            let s = ContractSpec::new(OptionKind::Put, 100.0, 95.0, t1, 1.0, 1.0).unwrap();
            let corrected = price_put(&s, &market).unwrap().price;
            let haug = price_put_haug1998(&s, &market).unwrap();
            gaps.push((haug - corrected).abs());
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(*gaps.last().unwrap() < 0.05 * gaps[0]);
    }
}
