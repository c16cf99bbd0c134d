//! Short-cycle and stream-overlap probabilities.
//!
//! Everything is computed as a base-2 exponent: probabilities such as `2^-200` underflow `f64`.
//! `l` and `n` (stream length and stream count) and `p` (period) are also passed as log2 values.
//!
//! For a generator with a single known period `p`, `n` streams of `l` values overlap with
//! probability `1 - prod(1 - 2il/p)`, approximately `(n-1)nl/p`. A Romu generator's period is
//! that of a random cycle of a random permutation, whose length is uniformly distributed, and
//! averaging the known-period result over that law gives `ln(2)(n-1)nls/2^s`.

use std::f64::consts::{LN_2, SQRT_2};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;

/// Above this `nl/p` ratio the linear approximations lose accuracy.
pub const SMALL_RATIO_LOG2: f64 = -10.0;

/// Difference between the integral and the geometric-mean sum forms of the convolution,
/// `log2(ln 2 * sqrt 2)`.
pub fn convolution_offset() -> f64 {
    (LN_2 * SQRT_2).log2()
}

/// log2 of `(n-1)n`.
///
/// Exact up to `n = 2^53`; above that `(n-1)n` is taken as `n^2`, a relative error under
/// `2^-52`. `n = 1` gives `-inf`.
pub fn log2_pairs(log2_n: f64) -> f64 {
    if log2_n <= 53.0 {
        let n = log2_n.exp2();
        if n <= 1.0 {
            return f64::NEG_INFINITY;
        }
        (n - 1.0).log2() + log2_n
    } else {
        2.0 * log2_n
    }
}

/// Probability that a random seed lands on a cycle shorter than `2^k`: `2^(k-s)`.
pub fn p_short_cycle(s: u32, k: f64) -> Result<f64> {
    if !(0.0..=s as f64).contains(&k) {
        return Err(Error::InvalidArgument(format!("need 0 <= k <= s, got k={k}, s={s}")));
    }
    Ok(k - s as f64)
}

/// Probability that a random cycle's period lies in `[2^(k-1), 2^k]`: `2^(k-s-1)`.
pub fn interval_probability(s: u32, k: u32) -> Result<f64> {
    if k < 1 || k > s {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= s, got k={k}, s={s}")));
    }
    Ok(k as f64 - s as f64 - 1.0)
}

/// Result of the exact overlap product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactOverlap {
    pub probability: f64,
    /// The vulnerable zones cover the whole period; the probability is 1.
    pub saturated: bool,
}

impl ExactOverlap {
    pub fn log2(&self) -> f64 {
        self.probability.log2()
    }
}

/// Largest stream count for which the product is evaluated term by term.
pub const MAX_EXACT_STREAMS: u64 = 1 << 20;

/// `1 - prod_{i=1}^{n-1} (1 - 2il/p)`, summed in log space.
///
/// The `i = 0` factor of the even-`n` form is 1, so both parities use the same range.
pub fn exact_overlap(log2_p: f64, log2_l: f64, n: u64) -> Result<ExactOverlap> {
    if n == 0 || n > MAX_EXACT_STREAMS {
        return Err(Error::InvalidArgument(format!(
            "exact overlap needs 1 <= n <= 2^20, got {n}"
        )));
    }
    let ratio = (log2_l - log2_p).exp2();
    if 2.0 * (n - 1) as f64 * ratio >= 1.0 {
        return Ok(ExactOverlap {
            probability: 1.0,
            saturated: true,
        });
    }
    // ln(1 - a) = -a + c(a). The linear parts sum to -(n-1)nl/p in closed form, which keeps
    // the result exact to rounding even when it sits within 2^-50 of the approximation.
    let linear = (n - 1) as f64 * n as f64 * ratio;
    let curvature: f64 = (1..n).map(|i| log1p_excess(2.0 * i as f64 * ratio)).sum();
    Ok(ExactOverlap {
        probability: -(curvature - linear).exp_m1(),
        saturated: false,
    })
}

/// `ln(1 - a) + a` without cancellation for small `a`.
fn log1p_excess(a: f64) -> f64 {
    if a < 1e-4 {
        let a2 = a * a;
        -a2 * (0.5 + a * (1.0 / 3.0 + a * (0.25 + a * 0.2)))
    } else {
        (-a).ln_1p() + a
    }
}

/// `(n-1)nl/p`: overlap with a known period.
pub fn overlap_known(log2_p: f64, log2_l: f64, log2_n: f64) -> f64 {
    log2_pairs(log2_n) + log2_l - log2_p
}

/// Knuth's bound `ln^2/p`.
pub fn overlap_knuth(log2_p: f64, log2_l: f64, log2_n: f64) -> f64 {
    log2_l + 2.0 * log2_n - log2_p
}

/// Geometric-mean sum form of the convolution, `(n-1)nls / (sqrt(2) 2^s)`.
pub fn overlap_romu_sum(s: u32, log2_l: f64, log2_n: f64) -> f64 {
    log2_pairs(log2_n) + log2_l + (s as f64).log2() - 0.5 - s as f64
}

/// Integral form of the convolution, `ln(2)(n-1)nls / 2^s`.
pub fn overlap_romu_integral(s: u32, log2_l: f64, log2_n: f64) -> f64 {
    LN_2.log2() + log2_pairs(log2_n) + log2_l + (s as f64).log2() - s as f64
}

/// Inputs for a risk report. All but `s` are log2 values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskQuery {
    pub s: u32,
    pub l: f64,
    pub n: f64,
    /// Known period; `2^s` when absent.
    pub p: Option<f64>,
}

/// All risk figures for one query, as log2 probabilities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskReport {
    pub query: RiskQuery,
    /// Probability that the seed's cycle is shorter than one stream, `2^(l-s)`.
    pub log2_p_short_cycle: f64,
    pub log2_overlap_known: f64,
    pub log2_overlap_knuth: f64,
    pub log2_overlap_romu_sum: f64,
    pub log2_overlap_romu_integral: f64,
    /// The exact product, when `n` is an integer up to 2^20.
    pub exact_overlap: Option<f64>,
    /// `nl/p` exceeds 2^-10.
    pub outside_small_ratio: bool,
}

pub fn assess(query: RiskQuery) -> Result<RiskReport> {
    if query.s == 0 || query.l < 0.0 || query.n < 0.0 {
        return Err(Error::InvalidArgument(
            "need s > 0 and non-negative log2 l and n".into(),
        ));
    }
    let p = query.p.unwrap_or(query.s as f64);
    let n_value = query.n.exp2();
    let exact = (n_value.fract() == 0.0 && n_value <= MAX_EXACT_STREAMS as f64)
        .then(|| exact_overlap(p, query.l, n_value as u64))
        .transpose()?
        .map(|e| e.probability.log2());
    Ok(RiskReport {
        query,
        log2_p_short_cycle: p_short_cycle(query.s, query.l.min(query.s as f64))?,
        log2_overlap_known: overlap_known(p, query.l, query.n),
        log2_overlap_knuth: overlap_knuth(p, query.l, query.n),
        log2_overlap_romu_sum: overlap_romu_sum(query.s, query.l, query.n),
        log2_overlap_romu_integral: overlap_romu_integral(query.s, query.l, query.n),
        exact_overlap: exact,
        outside_small_ratio: query.n + query.l - p > SMALL_RATIO_LOG2,
    })
}

/// Places `n` streams of `l` values at uniform random offsets on a cycle of `p` states and
/// counts trials in which two streams share a state.
///
/// Trials are split into fixed chunks with their own ChaCha8 streams, so the count does not
/// depend on the execution mode.
pub fn simulate_overlap(p: u64, l: u64, n: usize, trials: u64, seed: u64, exec: Execution) -> u64 {
    const CHUNK: u64 = 1 << 14;
    exec.sum_chunks(trials, CHUNK, |range| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(range.start / CHUNK);
        let mut starts = vec![0u64; n];
        let mut hits = 0;
        for _ in range {
            for s in starts.iter_mut() {
                *s = rng.random_range(0..p);
            }
            starts.sort_unstable();
            let wrap = starts[0] + p - starts[n - 1];
            if wrap < l || starts.windows(2).any(|w| w[1] - w[0] < l) {
                hits += 1;
            }
        }
        hits
    })
}

/// A published short-cycle row: state bits, log2 minimum cycle length, log2 probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShortCycleRow {
    pub s: u32,
    pub k: f64,
    pub published: f64,
}

pub const SHORT_CYCLE_ROWS: [ShortCycleRow; 5] = [
    ShortCycleRow { s: 256, k: 56.0, published: -200.0 },
    ShortCycleRow { s: 192, k: 56.0, published: -136.0 },
    ShortCycleRow { s: 128, k: 56.0, published: -72.0 },
    ShortCycleRow { s: 96, k: 56.0, published: -40.0 },
    ShortCycleRow { s: 64, k: 53.0, published: -11.0 },
];

/// A published overlap row: state bits, log2 stream length, log2 stream count, and the
/// printed known-period and Romu exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverlapRow {
    pub s: u32,
    pub l: f64,
    pub n: f64,
    pub published_known: f64,
    pub published_romu: f64,
}

pub const OVERLAP_ROWS: [OverlapRow; 5] = [
    OverlapRow { s: 256, l: 64.0, n: 40.0, published_known: -112.0, published_romu: -104.5 },
    OverlapRow { s: 192, l: 58.0, n: 17.0, published_known: -103.0, published_romu: -92.9 },
    OverlapRow { s: 128, l: 53.0, n: 14.0, published_known: -47.0, published_romu: -40.5 },
    OverlapRow { s: 96, l: 44.0, n: 8.0, published_known: -36.0, published_romu: -29.9 },
    OverlapRow { s: 64, l: 44.0, n: 5.0, published_known: -10.0, published_romu: -4.6 },
];

impl OverlapRow {
    pub fn known(&self) -> f64 {
        overlap_known(self.s as f64, self.l, self.n)
    }

    pub fn romu(&self) -> f64 {
        overlap_romu_integral(self.s, self.l, self.n)
    }
}

/// Output style for table rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Csv,
}

/// Short-cycle probabilities, one decimal in the exponent.
pub fn render_short_cycle_table(format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Text => {
            out.push_str("Probabilities of shorter cycles\n");
            out.push_str("row  state bits  min cycle len  prob. of shorter cycle\n");
        }
        TableFormat::Csv => out.push_str("row,state_bits,log2_min_cycle,log2_probability\n"),
    }
    for (i, r) in SHORT_CYCLE_ROWS.iter().enumerate() {
        let v = p_short_cycle(r.s, r.k).expect("table rows satisfy k <= s");
        let _ = match format {
            TableFormat::Text => writeln!(
                out,
                "{:>3}  {:>10}  {:>13}  {:>22}",
                i + 1,
                r.s,
                format!("2^{}", r.k),
                format!("2^{v:.1}")
            ),
            TableFormat::Csv => writeln!(out, "{},{},{},{v:.1}", i + 1, r.s, r.k),
        };
    }
    out
}

/// Overlap probabilities for known periods and for Romu generators.
pub fn render_overlap_table(format: TableFormat) -> String {
    let mut out = String::new();
    match format {
        TableFormat::Text => {
            out.push_str("Probabilities of sequence overlap\n");
            out.push_str("row    s      l       n   known period      romu\n");
        }
        TableFormat::Csv => out.push_str("row,s,log2_l,log2_n,log2_known,log2_romu\n"),
    }
    for (i, r) in OVERLAP_ROWS.iter().enumerate() {
        let (k, m) = (r.known(), r.romu());
        let _ = match format {
            TableFormat::Text => writeln!(
                out,
                "{:>3}  {:>3}  {:>5}  {:>6}  {:>12}  {:>8}",
                i + 1,
                r.s,
                format!("2^{}", r.l),
                format!("2^{}", r.n),
                format!("2^{k:.1}"),
                format!("2^{m:.1}")
            ),
            TableFormat::Csv => writeln!(out, "{},{},{},{},{k:.1},{m:.1}", i + 1, r.s, r.l, r.n),
        };
    }
    out
}

/// Both tables, short-cycle first.
pub fn risk_tables(format: TableFormat) -> String {
    let mut out = render_short_cycle_table(format);
    out.push('\n');
    out.push_str(&render_overlap_table(format));
    out
}
