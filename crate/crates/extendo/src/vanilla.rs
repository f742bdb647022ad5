//! European call/put closed forms: the time-0 quote maturing at T1, and the
//! forward-period quote at the decision date T1 maturing at T2.

use crate::error::{PricingError, Result};
use crate::gauss::cdf_raw;
use crate::termstructure::PeriodParams;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

/// A priced European option plus the log-moneyness arguments that priced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanillaQuote {
    pub price: f64,
    pub d1: f64,
    pub d2: f64,
}

// Beyond this the tail mass is below the f64 subnormal range and the price
// equals its limit exactly.
const D_LIMIT: f64 = 40.0;

/// One period's view of the model: drift, discount rate, volatility, tenor.
#[derive(Clone, Copy, Debug)]
struct PeriodView {
    mu: f64,
    r: f64,
    sigma: f64,
    tenor: f64,
}

fn bs_quote(kind: OptionKind, x: f64, k: f64, v: PeriodView) -> VanillaQuote {
    let sigma_rt = v.sigma * v.tenor.sqrt();
    // Log space keeps extreme moneyness finite: x/k may overflow, ln x - ln k
    // cannot for positive normal floats.
    let d1 = (x.ln() - k.ln() + (v.mu + 0.5 * v.sigma * v.sigma) * v.tenor) / sigma_rt;
    let d2 = d1 - sigma_rt;
    let fwd_x = x * ((v.mu - v.r) * v.tenor).exp();
    let disc_k = k * (-v.r * v.tenor).exp();
    let price = if d1 >= D_LIMIT && d2 >= D_LIMIT {
        match kind {
            OptionKind::Call => (fwd_x - disc_k).max(0.0),
            OptionKind::Put => 0.0,
        }
    } else if d1 <= -D_LIMIT && d2 <= -D_LIMIT {
        match kind {
            OptionKind::Call => 0.0,
            OptionKind::Put => (disc_k - fwd_x).max(0.0),
        }
    } else {
        match kind {
            OptionKind::Call => fwd_x * cdf_raw(d1) - disc_k * cdf_raw(d2),
            OptionKind::Put => disc_k * cdf_raw(-d2) - fwd_x * cdf_raw(-d1),
        }
        .max(0.0)
    };
    VanillaQuote { price, d1, d2 }
}

/// Time-0 price of the European option struck at K1 maturing at T1.
pub fn bs_t0(kind: OptionKind, x0: f64, k1: f64, params: &PeriodParams) -> Result<VanillaQuote> {
    require_positive("spot", x0)?;
    require_positive("strike", k1)?;
    Ok(bs_quote(
        kind,
        x0,
        k1,
        PeriodView {
            mu: params.mu1,
            r: params.r1,
            sigma: params.sigma1,
            tenor: params.t1,
        },
    ))
}

/// Price at the decision date T1 of the European option struck at K2
/// maturing at T2, given the spot x observed at T1.
pub fn bs_t1(kind: OptionKind, x: f64, k2: f64, params: &PeriodParams) -> Result<VanillaQuote> {
    require_positive("spot", x)?;
    require_positive("strike", k2)?;
    Ok(bs_quote(
        kind,
        x,
        k2,
        PeriodView {
            mu: params.mu12,
            r: params.r12,
            sigma: params.sigma12,
            tenor: params.t2 - params.t1,
        },
    ))
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(PricingError::Domain(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}

/// Precomputed forward-period pricer for the hot paths (Monte Carlo payoff
/// evaluation, boundary root functions). Everything that does not depend on
/// the running spot is folded at construction.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ForwardBs {
    kind: OptionKind,
    ln_k2: f64,
    drift: f64,    // (mu12 + sigma12^2/2) tau
    sigma_rt: f64, // sigma12 sqrt(tau)
    carry: f64,    // e^{(mu12 - r12) tau}
    disc_k: f64,   // K2 e^{-r12 tau}
}

impl ForwardBs {
    pub(crate) fn new(kind: OptionKind, k2: f64, params: &PeriodParams) -> Self {
        let tau = params.t2 - params.t1;
        let sigma_rt = params.sigma12 * tau.sqrt();
        ForwardBs {
            kind,
            ln_k2: k2.ln(),
            drift: (params.mu12 + 0.5 * params.sigma12 * params.sigma12) * tau,
            sigma_rt,
            carry: ((params.mu12 - params.r12) * tau).exp(),
            disc_k: k2 * (-params.r12 * tau).exp(),
        }
    }

    pub(crate) fn price_with_ln(&self, x: f64, ln_x: f64) -> f64 {
        let d1 = (ln_x - self.ln_k2 + self.drift) / self.sigma_rt;
        let d2 = d1 - self.sigma_rt;
        let fwd_x = x * self.carry;
        let p = match self.kind {
            OptionKind::Call => {
                if d2 >= D_LIMIT {
                    fwd_x - self.disc_k
                } else if d1 <= -D_LIMIT {
                    0.0
                } else {
                    fwd_x * cdf_raw(d1) - self.disc_k * cdf_raw(d2)
                }
            }
            OptionKind::Put => {
                if d2 >= D_LIMIT {
                    0.0
                } else if d1 <= -D_LIMIT {
                    self.disc_k - fwd_x
                } else {
                    self.disc_k * cdf_raw(-d2) - fwd_x * cdf_raw(-d1)
                }
            }
        };
        p.max(0.0)
    }

    pub(crate) fn price(&self, x: f64) -> f64 {
        self.price_with_ln(x, x.ln())
    }

    /// dPrice/dx at spot x.
    pub(crate) fn delta(&self, x: f64) -> f64 {
        let d1 = (x.ln() - self.ln_k2 + self.drift) / self.sigma_rt;
        match self.kind {
            OptionKind::Call => self.carry * cdf_raw(d1),
            OptionKind::Put => -self.carry * cdf_raw(-d1),
        }
    }
}
