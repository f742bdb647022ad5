//! Independent numerical oracles for the integration suites. Nothing here
//! shares an algorithm with the library under test: the normal CDF comes
//! from a Taylor series and a Mills-ratio continued fraction, integrals
//! from adaptive Simpson quadrature, and boundary roots from plain
//! bisection on the raw pricing equations.

use extendo::{ContractSpec, MarketData, OptionKind, PeriodParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn benchmark_market() -> MarketData {
    MarketData::constant(100.0, 0.08, 0.0, 0.25).unwrap()
}

pub fn benchmark_spec(kind: OptionKind, k2: f64, a: f64) -> ContractSpec {
    ContractSpec::new(kind, 100.0, k2, 0.5, 1.0, a).unwrap()
}

/// The 12-contract flat benchmark grid.
pub fn benchmark_grid() -> Vec<ContractSpec> {
    let mut grid = Vec::new();
    for kind in [OptionKind::Call, OptionKind::Put] {
        for k2 in [95.0, 105.0] {
            for a in [0.5, 1.0, 2.0] {
                grid.push(benchmark_spec(kind, k2, a));
            }
        }
    }
    grid
}

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const SQRT_2PI: f64 = 2.5066282746310002;

/// Standard normal CDF from first principles: Taylor series for the erf
/// core, Mills-ratio continued fraction in the tails.
pub fn phi_oracle(x: f64) -> f64 {
    if x.abs() <= 3.5 {
        0.5 * (1.0 + erf_series(x / SQRT_2))
    } else if x > 0.0 {
        1.0 - mills_tail(x)
    } else {
        mills_tail(-x)
    }
}

fn erf_series(t: f64) -> f64 {
    let mut term = t;
    let mut sum = t;
    let mut n = 0u32;
    loop {
        n += 1;
        term *= -t * t / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-18 * sum.abs().max(1e-300) || n > 200 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Upper-tail probability for x > 0 via the continued fraction
/// Q(x) = phi(x) / (x + 1/(x + 2/(x + 3/(...)))).
fn mills_tail(x: f64) -> f64 {
    let density = (-0.5 * x * x).exp() / SQRT_2PI;
    if density == 0.0 {
        return 0.0;
    }
    let mut denom = x;
    for k in (1..=120u32).rev() {
        denom = x + k as f64 / denom;
    }
    density / denom
}

/// Adaptive Simpson quadrature with Richardson acceptance.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(a: f64, fa: f64, b: f64, fb: f64, fm: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, fa, m, fm, flm);
        let right = simpson(m, fm, b, fb, frm);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, fa, b, fb, fm);
    recurse(f, a, fa, b, fb, fm, whole, tol, 48)
}

/// Standard bivariate normal density.
pub fn bvn_density(x: f64, y: f64, rho: f64) -> f64 {
    let om = 1.0 - rho * rho;
    ((-(x * x - 2.0 * rho * x * y + y * y) / (2.0 * om)).exp())
        / (2.0 * std::f64::consts::PI * om.sqrt())
}

/// Iterated 2-D quadrature of bvn_density(x,y,rho) * exp(alpha*x) over
/// {x in x_range, y <= b}, truncating the infinite sides at +-10. The
/// inner tolerance shrinks by exp(alpha*x) so the weight cannot amplify
/// inner error past the outer budget, and the inner range is clamped to
/// the conditional nine-sigma window around rho*x.
pub fn quad_bvn_exp(alpha: f64, x_lo: f64, x_hi: f64, b: f64, rho: f64) -> f64 {
    let x_lo = x_lo.max(-10.0);
    let x_hi = x_hi.min(10.0);
    let y_hi = b.min(10.0);
    let width = (1.0 - rho * rho).sqrt();
    let outer = |x: f64| {
        let y_lo = (-10.0f64).max(rho * x - 9.0 * width);
        if y_lo >= y_hi {
            return 0.0;
        }
        let tol = 1e-12 / (alpha * x).exp().max(1.0);
        let inner = adaptive_simpson(&|y: f64| bvn_density(x, y, rho), y_lo, y_hi, tol);
        inner * (alpha * x).exp()
    };
    adaptive_simpson(&outer, x_lo, x_hi, 1e-11)
}

/// Forward-period option value at the decision date, written directly from
/// the discounted-expectation formula with the oracle CDF.
pub fn forward_price_oracle(kind: OptionKind, x: f64, k2: f64, p: &PeriodParams) -> f64 {
    let tau = p.t2 - p.t1;
    let srt = p.sigma12 * tau.sqrt();
    let d1 = ((x / k2).ln() + (p.mu12 + 0.5 * p.sigma12 * p.sigma12) * tau) / srt;
    let d2 = d1 - srt;
    let df = (-p.r12 * tau).exp();
    let grown = x * (p.mu12 * tau).exp();
    match kind {
        OptionKind::Call => df * (grown * phi_oracle(d1) - k2 * phi_oracle(d2)),
        OptionKind::Put => df * (k2 * phi_oracle(-d2) - grown * phi_oracle(-d1)),
    }
}

/// Decision-boundary levels by plain bisection on a geometric scan, kept
/// free of Newton steps and of the library's solver plumbing. None means
/// the boundary is degenerate: no admissible crossing on the scanned range.
///
/// The fee equations (call lower, put upper) are monotone and bisect on the
/// full grid. The exercise-indifference equations only compare against the
/// live branch of the payoff on one side of K1, so they scan outward from
/// the strike and keep the first crossing from positive to negative.
pub fn boundary_oracle(spec: &ContractSpec, p: &PeriodParams) -> (Option<f64>, Option<f64>) {
    let fee = |x: f64| forward_price_oracle(spec.kind, x, spec.k2, p) - spec.a;
    let indifference = |x: f64| {
        let v = forward_price_oracle(spec.kind, x, spec.k2, p);
        match spec.kind {
            OptionKind::Call => v - (x - spec.k1 + spec.a),
            OptionKind::Put => v - (spec.k1 - x + spec.a),
        }
    };
    match spec.kind {
        OptionKind::Call => {
            let i1 = (spec.a > 0.0).then(|| bisect_monotone(&fee, spec.k2)).flatten();
            let i2 = bisect_from_strike(&indifference, spec.k1, spec.k2, true);
            (i1, i2)
        }
        OptionKind::Put => {
            let i1 = bisect_from_strike(&indifference, spec.k1, spec.k2, false);
            let i2 = (spec.a > 0.0).then(|| bisect_monotone(&fee, spec.k2)).flatten();
            (i1, i2)
        }
    }
}

/// Scan x = k2 * 2^k for k in [-40, 40] and bisect the sign change.
fn bisect_monotone(f: &dyn Fn(f64) -> f64, k2: f64) -> Option<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for k in -40..=40 {
        let x = k2 * 2.0f64.powi(k);
        let fx = f(x);
        if let Some((px, pfx)) = prev {
            if pfx.signum() != fx.signum() {
                return Some(bisect(f, px.min(x), px.max(x)));
            }
        }
        prev = Some((x, fx));
    }
    None
}

/// Scan outward from K1 (upward for calls, downward for puts) and bisect
/// the first crossing from positive to negative; a scan that starts
/// negative or never turns is degenerate.
fn bisect_from_strike(f: &dyn Fn(f64) -> f64, k1: f64, k2: f64, upward: bool) -> Option<f64> {
    let f_start = f(k1);
    if f_start <= 0.0 {
        return (f_start == 0.0).then_some(k1);
    }
    let mut prev = k1;
    for i in 0..=80 {
        let k = if upward { i - 40 } else { 40 - i };
        let x = k2 * 2.0f64.powi(k);
        if (upward && x <= k1) || (!upward && x >= k1) {
            continue;
        }
        if f(x) < 0.0 {
            return Some(bisect(f, prev.min(x), prev.max(x)));
        }
        prev = x;
    }
    None
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// One randomized valid parameter set from the documented ranges.
#[derive(Clone, Copy, Debug)]
pub struct RandomSet {
    pub spot: f64,
    pub k1: f64,
    pub k2: f64,
    pub t1: f64,
    pub t2: f64,
    pub sigma: f64,
    pub r: f64,
    pub q: f64,
    pub a: f64,
}

impl RandomSet {
    pub fn market(&self) -> MarketData {
        MarketData::constant(self.spot, self.r, self.q, self.sigma).unwrap()
    }

    pub fn spec(&self, kind: OptionKind) -> ContractSpec {
        ContractSpec::new(kind, self.k1, self.k2, self.t1, self.t2, self.a).unwrap()
    }
}

/// Deterministic randomized sets: log-uniform levels in [50, 200],
/// T1 in [0.1, 2], T2 - T1 in [0.1, 2], sigma in [0.05, 0.6],
/// r and q in [-0.02, 0.1], A in [0, 5].
pub fn random_sets(n: usize, seed: u64) -> Vec<RandomSet> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let log_level = |rng: &mut StdRng| rng.gen_range(50.0f64.ln()..200.0f64.ln()).exp();
        let t1 = rng.gen_range(0.1..2.0);
        out.push(RandomSet {
            spot: log_level(&mut rng),
            k1: log_level(&mut rng),
            k2: log_level(&mut rng),
            t1,
            t2: t1 + rng.gen_range(0.1..2.0),
            sigma: rng.gen_range(0.05..0.6),
            r: rng.gen_range(-0.02..0.1),
            q: rng.gen_range(-0.02..0.1),
            a: rng.gen_range(0.0..5.0),
        });
    }
    out
}
