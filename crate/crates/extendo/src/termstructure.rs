//! Piecewise-constant market curves and the period-averaged model parameters
//! every pricing formula consumes.
//!
//! Curves are step functions, so every integral below is an exact finite sum;
//! no quadrature error enters the pricing pipeline.

use crate::error::{PricingError, Result};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};
use std::path::Path;

/// Horizon used when a constant parameter is expanded into a flat curve.
pub const FLAT_HORIZON: f64 = 1.0e6;

/// A piecewise-constant curve on [0, horizon]. Segment i covers
/// (end_{i-1}, end_i] with end_0 starting at 0.
///
/// Construction canonicalizes: adjacent segments with bit-identical values
/// are merged, so refining a segment into two with the same value yields a
/// bit-identical curve and bit-identical downstream results.
#[derive(Clone, Debug, PartialEq)]
pub struct TermStructure {
    segments: Vec<(f64, f64)>,
}

/// Which function of the curve to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrand {
    Value,
    Squared,
}

impl TermStructure {
    /// Build from (end_time, value) pairs. End times must be strictly
    /// increasing, start after 0, and everything must be finite.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() {
            return Err(PricingError::InvalidCurve("curve has no segments".into()));
        }
        let mut prev_end = 0.0;
        for (i, &(end, value)) in segments.iter().enumerate() {
            if !end.is_finite() || !value.is_finite() {
                return Err(PricingError::InvalidCurve(format!(
                    "segment {}: non-finite entry (end_time {end}, value {value})",
                    i + 1
                )));
            }
            if end <= prev_end {
                return Err(PricingError::InvalidCurve(format!(
                    "segment {}: end_time {end} not greater than previous {prev_end}",
                    i + 1
                )));
            }
            prev_end = end;
        }
        let mut canonical: Vec<(f64, f64)> = Vec::with_capacity(segments.len());
        for (end, value) in segments {
            match canonical.last_mut() {
                Some(last) if last.1.to_bits() == value.to_bits() => last.0 = end,
                _ => canonical.push((end, value)),
            }
        }
        Ok(TermStructure { segments: canonical })
    }

    /// Flat curve holding one value out to [`FLAT_HORIZON`].
    pub fn flat(value: f64) -> Result<Self> {
        TermStructure::new(vec![(FLAT_HORIZON, value)])
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segments
    }

    pub fn horizon(&self) -> f64 {
        self.segments.last().unwrap().0
    }

    pub fn is_constant(&self) -> bool {
        self.segments.len() == 1
    }

    /// The single value of a constant curve, if the curve is constant.
    pub fn constant_value(&self) -> Option<f64> {
        match self.segments.as_slice() {
            [(_, v)] => Some(*v),
            _ => None,
        }
    }

    pub fn all_positive(&self) -> bool {
        self.segments.iter().all(|&(_, v)| v > 0.0)
    }

    /// Exact integral of the curve (or its square) over [t_lo, t_hi].
    pub fn integrate(&self, t_lo: f64, t_hi: f64, integrand: Integrand) -> Result<f64> {
        if !t_lo.is_finite() || !t_hi.is_finite() || t_lo < 0.0 || t_lo > t_hi {
            return Err(PricingError::Domain(format!(
                "integration bounds [{t_lo}, {t_hi}] invalid"
            )));
        }
        let horizon = self.horizon();
        if t_hi > horizon {
            return Err(PricingError::CurveHorizon {
                requested: t_hi,
                horizon,
            });
        }
        let mut acc = 0.0;
        let mut start = 0.0f64;
        for &(end, value) in &self.segments {
            let lo = start.max(t_lo);
            let hi = end.min(t_hi);
            if hi > lo {
                let f = match integrand {
                    Integrand::Value => value,
                    Integrand::Squared => value * value,
                };
                acc += f * (hi - lo);
            }
            start = end;
            if start >= t_hi {
                break;
            }
        }
        Ok(acc)
    }

    /// Parse the two-column CSV curve format (header `end_time,value`).
    /// Error messages name the offending file row.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, header)) if normalized_header(header) == "end_time,value" => {}
            Some((row, header)) => {
                return Err(PricingError::InvalidCurve(format!(
                    "row {row}: expected header 'end_time,value', found '{header}'"
                )))
            }
            None => return Err(PricingError::InvalidCurve("empty curve file".into())),
        }
        let mut segments = Vec::new();
        let mut prev = (0usize, 0.0f64);
        for (row, line) in lines {
            let mut fields = line.split(',').map(str::trim);
            let (end_s, value_s) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => {
                    return Err(PricingError::InvalidCurve(format!(
                        "row {row}: expected two comma-separated fields, found '{line}'"
                    )))
                }
            };
            let end: f64 = end_s.parse().map_err(|_| {
                PricingError::InvalidCurve(format!("row {row}: cannot parse end_time '{end_s}'"))
            })?;
            let value: f64 = value_s.parse().map_err(|_| {
                PricingError::InvalidCurve(format!("row {row}: cannot parse value '{value_s}'"))
            })?;
            if !end.is_finite() || !value.is_finite() {
                return Err(PricingError::InvalidCurve(format!(
                    "row {row}: non-finite entry"
                )));
            }
            if end <= prev.1 {
                return Err(PricingError::InvalidCurve(format!(
                    "row {row}: end_time {end} not greater than previous {}",
                    prev.1
                )));
            }
            prev = (row, end);
            segments.push((end, value));
        }
        TermStructure::new(segments)
    }
}

impl Serialize for TermStructure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.segments.len()))?;
        for &(end_time, value) in &self.segments {
            seq.serialize_element(&SegmentRow { end_time, value })?;
        }
        seq.end()
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentRow {
    end_time: f64,
    value: f64,
}

/// Spot plus the three curves the model needs. Spot must be positive and the
/// volatility curve strictly positive everywhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketDataRaw")]
pub struct MarketData {
    pub spot: f64,
    pub rate: TermStructure,
    pub carry: TermStructure,
    pub vol: TermStructure,
}

#[derive(Deserialize)]
struct MarketDataRaw {
    spot: f64,
    rate: Vec<SegmentRow>,
    carry: Vec<SegmentRow>,
    vol: Vec<SegmentRow>,
}

impl TryFrom<MarketDataRaw> for MarketData {
    type Error = PricingError;
    fn try_from(raw: MarketDataRaw) -> Result<Self> {
        let curve = |rows: Vec<SegmentRow>| {
            TermStructure::new(rows.into_iter().map(|r| (r.end_time, r.value)).collect())
        };
        MarketData::new(raw.spot, curve(raw.rate)?, curve(raw.carry)?, curve(raw.vol)?)
    }
}

impl MarketData {
    pub fn new(
        spot: f64,
        rate: TermStructure,
        carry: TermStructure,
        vol: TermStructure,
    ) -> Result<Self> {
        if !(spot.is_finite() && spot > 0.0) {
            return Err(PricingError::Domain(format!(
                "spot must be positive and finite, got {spot}"
            )));
        }
        if !vol.all_positive() {
            return Err(PricingError::InvalidCurve(
                "volatility curve has a non-positive segment".into(),
            ));
        }
        Ok(MarketData {
            spot,
            rate,
            carry,
            vol,
        })
    }

    /// Flat-curve market: constant rate r, carry q, volatility sigma.
    pub fn constant(spot: f64, r: f64, q: f64, sigma: f64) -> Result<Self> {
        MarketData::new(
            spot,
            TermStructure::flat(r)?,
            TermStructure::flat(q)?,
            TermStructure::flat(sigma)?,
        )
    }

    pub fn is_constant(&self) -> bool {
        self.rate.is_constant() && self.carry.is_constant() && self.vol.is_constant()
    }

    /// Parse the market JSON document. Each of `rate`, `carry`, `vol` may be
    /// a segment list, a number (flat curve), or a CSV file path resolved
    /// relative to `base_dir`. The constant shorthand `{"spot","r","q","sigma"}`
    /// is accepted and expanded to flat curves.
    pub fn load_json(text: &str, base_dir: &Path) -> Result<Self> {
        let doc: MarketDoc = serde_json::from_str(text)
            .map_err(|e| PricingError::Domain(format!("market file: {e}")))?;
        let shorthand = doc.r.is_some() || doc.q.is_some() || doc.sigma.is_some();
        let curves = doc.rate.is_some() || doc.carry.is_some() || doc.vol.is_some();
        if shorthand && curves {
            return Err(PricingError::Domain(
                "market file mixes constant shorthand (r/q/sigma) with curve entries".into(),
            ));
        }
        if shorthand {
            let r = doc.r.ok_or_else(|| {
                PricingError::Domain("constant market shorthand requires 'r'".into())
            })?;
            let sigma = doc.sigma.ok_or_else(|| {
                PricingError::Domain("constant market shorthand requires 'sigma'".into())
            })?;
            return MarketData::constant(doc.spot, r, doc.q.unwrap_or(0.0), sigma);
        }
        let resolve = |name: &str, source: Option<CurveSource>| -> Result<TermStructure> {
            let source = source.ok_or_else(|| {
                PricingError::Domain(format!("market file missing curve '{name}'"))
            })?;
            match source {
                CurveSource::Constant(v) => TermStructure::flat(v),
                CurveSource::Path(p) => {
                    let path = base_dir.join(&p);
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        PricingError::InvalidCurve(format!(
                            "curve file {}: {e}",
                            path.display()
                        ))
                    })?;
                    TermStructure::from_csv_str(&text).map_err(|e| match e {
                        PricingError::InvalidCurve(msg) => {
                            PricingError::InvalidCurve(format!("{}: {msg}", path.display()))
                        }
                        other => other,
                    })
                }
                CurveSource::Segments(rows) => {
                    TermStructure::new(rows.into_iter().map(|r| (r.end_time, r.value)).collect())
                }
            }
        };
        MarketData::new(
            doc.spot,
            resolve("rate", doc.rate)?,
            resolve("carry", doc.carry)?,
            resolve("vol", doc.vol)?,
        )
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketDoc {
    spot: f64,
    #[serde(default)]
    rate: Option<CurveSource>,
    #[serde(default)]
    carry: Option<CurveSource>,
    #[serde(default)]
    vol: Option<CurveSource>,
    #[serde(default)]
    r: Option<f64>,
    #[serde(default)]
    q: Option<f64>,
    #[serde(default)]
    sigma: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CurveSource {
    Constant(f64),
    Path(String),
    Segments(Vec<SegmentRow>),
}

fn normalized_header(line: &str) -> String {
    line.split(',')
        .map(str::trim)
        .collect::<Vec<_>>()
        .join(",")
        .to_ascii_lowercase()
}

/// Period-averaged model parameters over [0, T1], [0, T2], and the forward
/// period [T1, T2].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodParams {
    pub mu1: f64,
    pub mu2: f64,
    pub r1: f64,
    pub r2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub t1: f64,
    pub t2: f64,
    pub r12: f64,
    pub mu12: f64,
    pub sigma12: f64,
}

/// Averages of the curves over [0, T1] and [0, T2] plus the forward-period
/// block. Constant curves take a shortcut so the averages reproduce the flat
/// values exactly.
pub fn period_params(market: &MarketData, t1: f64, t2: f64) -> Result<PeriodParams> {
    if !(t1.is_finite() && t2.is_finite() && t1 > 0.0) {
        return Err(PricingError::InvalidContract(format!(
            "maturities must be finite with 0 < T1, got T1={t1}, T2={t2}"
        )));
    }
    if t1 >= t2 {
        return Err(PricingError::InvalidContract(format!(
            "T1 must be strictly less than T2, got T1={t1}, T2={t2}"
        )));
    }
    if !market.vol.all_positive() {
        return Err(PricingError::InvalidCurve(
            "volatility curve has a non-positive segment".into(),
        ));
    }
    let tau = t2 - t1;

    let (r1, r2, r12) = match market.rate.constant_value() {
        Some(r) => (r, r, r),
        None => {
            let a1 = market.rate.integrate(0.0, t1, Integrand::Value)?;
            let a2 = market.rate.integrate(0.0, t2, Integrand::Value)?;
            let r1 = a1 / t1;
            let r2 = a2 / t2;
            (r1, r2, (r2 * t2 - r1 * t1) / tau)
        }
    };

    let constant_mu = match (market.rate.constant_value(), market.carry.constant_value()) {
        (Some(r), Some(q)) => Some(r - q),
        _ => None,
    };
    let (mu1, mu2, mu12) = match constant_mu {
        Some(mu) => (mu, mu, mu),
        None => {
            let r_a1 = market.rate.integrate(0.0, t1, Integrand::Value)?;
            let r_a2 = market.rate.integrate(0.0, t2, Integrand::Value)?;
            let q_a1 = market.carry.integrate(0.0, t1, Integrand::Value)?;
            let q_a2 = market.carry.integrate(0.0, t2, Integrand::Value)?;
            let mu1 = (r_a1 - q_a1) / t1;
            let mu2 = (r_a2 - q_a2) / t2;
            (mu1, mu2, (mu2 * t2 - mu1 * t1) / tau)
        }
    };

    let (sigma1, sigma2, sigma12) = match market.vol.constant_value() {
        Some(s) => (s, s, s),
        None => {
            let v1 = market.vol.integrate(0.0, t1, Integrand::Squared)?;
            let v2 = market.vol.integrate(0.0, t2, Integrand::Squared)?;
            if v2 - v1 <= 0.0 {
                return Err(PricingError::InvalidCurve(format!(
                    "variance does not increase over [{t1}, {t2}]"
                )));
            }
            ((v1 / t1).sqrt(), (v2 / t2).sqrt(), ((v2 - v1) / tau).sqrt())
        }
    };

    // Horizon coverage was only checked implicitly on the branches that
    // integrate; constant curves still must cover T2.
    for curve in [&market.rate, &market.carry, &market.vol] {
        if t2 > curve.horizon() {
            return Err(PricingError::CurveHorizon {
                requested: t2,
                horizon: curve.horizon(),
            });
        }
    }

    let rho = sigma1 * t1.sqrt() / (sigma2 * t2.sqrt());
    if !(rho > 0.0 && rho < 1.0) {
        return Err(PricingError::InvalidCurve(format!(
            "degenerate period correlation {rho}"
        )));
    }

    Ok(PeriodParams {
        mu1,
        mu2,
        r1,
        r2,
        sigma1,
        sigma2,
        rho,
        t1,
        t2,
        r12,
        mu12,
        sigma12,
    })
}
