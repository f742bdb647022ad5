//! Output documents and their canonical JSON encoding.
//!
//! Every command emits one JSON document embedding a run manifest, printed
//! in a canonical form: fixed field order, floats at 17 significant digits.
//! Re-parsing and re-serializing a document reproduces it byte for byte,
//! which is what the round-trip tests pin.

use crate::boundary::DecisionBoundaries;
use crate::error::{PricingError, Result};
use crate::extendible::{ContractSpec, PriceReport};
use crate::oracle::{McConfig, McEstimate};
use crate::termstructure::{MarketData, PeriodParams};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use std::io;

/// Provenance block embedded in every output document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub spec: ContractSpec,
    pub market: MarketData,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, inputs: &[String], spec: &ContractSpec, market: &MarketData) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: inputs.to_vec(),
            spec: *spec,
            market: market.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: utc_timestamp(),
        }
    }
}

/// RFC 3339 UTC timestamp honoring SOURCE_DATE_EPOCH, so documents can be
/// made reproducible by pinning the clock.
pub fn utc_timestamp() -> String {
    let pinned = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok());
    timestamp_string(pinned)
}

fn timestamp_string(epoch_seconds: Option<i64>) -> String {
    let dt = epoch_seconds
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0))
        .unwrap_or_else(Utc::now);
    dt.to_rfc3339_opts(SecondsFormat::Secs, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriceDocument {
    pub manifest: RunManifest,
    pub form: String,
    pub report: PriceReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundariesDocument {
    pub manifest: RunManifest,
    pub boundaries: DecisionBoundaries,
    pub params: PeriodParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateDocument {
    pub manifest: RunManifest,
    pub config: McConfig,
    pub closed_form: f64,
    pub marginal: McEstimate,
    pub two_stage: McEstimate,
    pub marginal_se_units: f64,
    pub two_stage_se_units: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrataDocument {
    pub manifest: RunManifest,
    pub config: McConfig,
    pub corrected: f64,
    pub monte_carlo: McEstimate,
    pub corrected_se_units: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub as_published: Option<AsPublished>,
}

/// The two erroneous published formula values, reported only on request.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsPublished {
    pub longstaff1990: f64,
    pub longstaff1990_se_units: f64,
    pub haug1998: f64,
    pub haug1998_se_units: f64,
}

/// Distance of a target value from a Monte Carlo mean, in units of its
/// standard error. A zero-SE estimate yields 0 on an exact match and
/// +inf otherwise.
pub fn se_units(target: f64, estimate: &McEstimate) -> f64 {
    let gap = (target - estimate.mean).abs();
    if estimate.std_error > 0.0 {
        gap / estimate.std_error
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// The 3-standard-error agreement check used by the validate command.
pub fn within_three_se(target: f64, estimate: &McEstimate) -> bool {
    se_units(target, estimate) <= 3.0
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        // 17 significant digits: every f64 survives the round trip exactly.
        write!(writer, "{value:.16e}")
    }
}

/// Serialize any document in the canonical encoding.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| PricingError::Domain(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| PricingError::Domain(format!("non-utf8 output: {e}")))
}
