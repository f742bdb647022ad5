//! Pricing engine for holder-extendible European options under geometric
//! Brownian motion with piecewise-constant drift, rate, and volatility.
//!
//! The holder of such an option may, at the first maturity, pay a fee to
//! extend the contract to a second maturity with a new strike. The crate
//! prices calls and puts in closed form in two independently evaluated
//! algebraic layouts, solves the extension decision boundaries, and ships
//! an exact-sampling Monte Carlo pricer used as ground truth, plus
//! reconstructions of two erroneous published put formulas for comparison.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod extendible;
pub mod gauss;
pub mod oracle;
pub mod report;
pub mod termstructure;
pub mod vanilla;

pub use boundary::{solve_call_boundaries, solve_put_boundaries, Boundary, DecisionBoundaries};
pub use error::{PricingError, Result};
pub use extendible::{
    abcd_gamma, price, price_call, price_put, price_put_haug1998, price_put_longstaff1990,
    AbcdGamma, ContractSpec, PriceForm, PriceReport,
};
pub use oracle::{mc_price, mc_price_two_stage, sample_terminal_pair, McConfig, McEstimate};
pub use termstructure::{period_params, MarketData, PeriodParams, TermStructure};
pub use vanilla::{bs_t0, bs_t1, OptionKind, VanillaQuote};
