//! A small statistical smoke suite that scores a byte stream by how far it gets before failing.
//!
//! Four classic statistics run on the cumulative prefix after every block:
//!
//! * `monobit`: z-test on the count of one bits.
//! * `byte_chi_square`: 256-bin chi-square on byte values, two-sided.
//! * `serial_correlation`: lag-1 correlation of consecutive little-endian 64-bit words.
//! * `gap_test`: gaps between top bytes below 32 in each 64-bit word, 17-bin chi-square.
//!
//! The run stops at the first p-value below the threshold or when the budget is spent. This
//! is a desk-scale stand-in for a full test battery, not an equivalent.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generators::RomuState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SmokeTest {
    Monobit,
    ByteChiSquare,
    SerialCorrelation,
    GapTest,
}

impl SmokeTest {
    pub const ALL: [SmokeTest; 4] = [
        SmokeTest::Monobit,
        SmokeTest::ByteChiSquare,
        SmokeTest::SerialCorrelation,
        SmokeTest::GapTest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SmokeTest::Monobit => "monobit",
            SmokeTest::ByteChiSquare => "byte_chi_square",
            SmokeTest::SerialCorrelation => "serial_correlation",
            SmokeTest::GapTest => "gap_test",
        }
    }
}

impl fmt::Display for SmokeTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmokeTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SmokeTest::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown smoke test `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmokeConfig {
    pub tests: BTreeSet<SmokeTest>,
    /// Bytes between evaluations; a multiple of 8, at least 1024.
    pub block_bytes: usize,
    /// A test fails when its log10 p-value drops below this.
    pub fail_log10p: f64,
    pub budget_bytes: u64,
}

impl Default for SmokeConfig {
    fn default() -> Self {
        SmokeConfig {
            tests: SmokeTest::ALL.into_iter().collect(),
            block_bytes: 1 << 16,
            fail_log10p: -9.0,
            budget_bytes: 1 << 26,
        }
    }
}

impl SmokeConfig {
    pub fn with_budget(budget_bytes: u64) -> Self {
        SmokeConfig {
            budget_bytes,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_bytes < 1024 || self.block_bytes % 8 != 0 {
            return Err(Error::InvalidArgument(format!(
                "block size must be a multiple of 8 and at least 1024, got {}",
                self.block_bytes
            )));
        }
        if self.fail_log10p.is_nan() || self.fail_log10p >= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "failure threshold must be negative, got {}",
                self.fail_log10p
            )));
        }
        if self.tests.is_empty() {
            return Err(Error::InvalidArgument("no smoke tests enabled".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmokeFailure {
    pub test: SmokeTest,
    /// Zero-based index of the block after which the test failed.
    pub block: u64,
    pub log10_p: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmokeVerdict {
    pub bytes_consumed: u64,
    /// Bytes through the last block on which every test passed.
    pub bytes_passed: u64,
    pub first_failure: Option<SmokeFailure>,
    /// The source ran dry before the budget.
    pub exhausted: bool,
}

impl SmokeVerdict {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

impl fmt::Display for SmokeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.first_failure {
            None => write!(f, "pass after {} bytes", self.bytes_consumed)?,
            Some(x) => write!(
                f,
                "FAIL {} at block {} (log10 p = {:.2}) after {} bytes, {} bytes clean",
                x.test, x.block, x.log10_p, self.bytes_consumed, self.bytes_passed
            )?,
        }
        if self.exhausted {
            write!(f, " (source exhausted)")?;
        }
        Ok(())
    }
}

/// A deterministic stream of bytes.
pub trait ByteSource {
    /// Fills `buf` from the front and returns the count written. A short count means the
    /// source is exhausted.
    fn fill(&mut self, buf: &mut [u8]) -> usize;
}

/// Bytes from any iterator.
pub struct IterSource<I>(pub I);

impl<I: Iterator<Item = u8>> ByteSource for IterSource<I> {
    fn fill(&mut self, buf: &mut [u8]) -> usize {
        let mut n = 0;
        for (slot, b) in buf.iter_mut().zip(&mut self.0) {
            *slot = b;
            n += 1;
        }
        n
    }
}

/// Generator outputs as a little-endian bit stream.
///
/// Outputs are packed least-significant bit first, so widths of 8, 16, 32 and 64 bits give
/// plain little-endian serialization and narrower outputs share bytes. Trailing bits that do not
/// fill a byte are dropped when an output limit ends the stream.
#[derive(Clone, Debug)]
pub struct GeneratorSource {
    state: RomuState,
    remaining: Option<u64>,
    acc: u128,
    acc_bits: u32,
}

impl GeneratorSource {
    pub fn new(state: RomuState) -> Self {
        GeneratorSource {
            state,
            remaining: None,
            acc: 0,
            acc_bits: 0,
        }
    }

    /// Stops after `outputs` values.
    pub fn with_output_limit(mut self, outputs: u64) -> Self {
        self.remaining = Some(outputs);
        self
    }

    /// Stops after one full traversal of the cycle through the current state, so that no
    /// output is ever repeated. `None` when the cycle is longer than `max_outputs` or the
    /// state does not fit in 64 bits.
    pub fn one_period(state: RomuState, max_outputs: u64) -> Option<Self> {
        let spec = state.spec().clone();
        if spec.state_bits() > 64 {
            return None;
        }
        let mut words = [0u64; 4];
        words[..spec.state_words()].copy_from_slice(state.words());
        let start = spec.pack(&words);
        let period = crate::cycles::cycle_length_bounded(&spec, start, max_outputs)?;
        Some(Self::new(state).with_output_limit(period))
    }

    fn refill(&mut self) -> bool {
        match &mut self.remaining {
            Some(0) => return false,
            Some(r) => *r -= 1,
            None => {}
        }
        let out = self.state.next();
        self.acc |= (out.value as u128) << self.acc_bits;
        self.acc_bits += out.bits;
        true
    }
}

impl ByteSource for GeneratorSource {
    fn fill(&mut self, buf: &mut [u8]) -> usize {
        let full_words = self.state.spec().output_bits() == 64 && self.remaining.is_none();
        let mut n = 0;
        while n < buf.len() {
            if full_words && self.acc_bits == 0 && buf.len() - n >= 8 {
                buf[n..n + 8].copy_from_slice(&self.state.next_value().to_le_bytes());
                n += 8;
                continue;
            }
            if self.acc_bits < 8 && !self.refill() {
                break;
            }
            if self.acc_bits >= 8 {
                buf[n] = self.acc as u8;
                self.acc >>= 8;
                self.acc_bits -= 8;
                n += 1;
            }
        }
        n
    }
}

/// log10 of `erfc(x)`, with the asymptotic series once `erfc` underflows.
fn log10_erfc(x: f64) -> f64 {
    let e = erfc(x);
    if e > 1e-300 {
        return e.log10();
    }
    let x2 = x * x;
    let series = 1.0 - 0.5 / x2 + 0.75 / (x2 * x2);
    (-x2 / std::f64::consts::LN_10) - (x * std::f64::consts::PI.sqrt()).log10() + series.log10()
}

fn log10_normal_two_sided(z: f64) -> f64 {
    log10_erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Two-sided chi-square p-value: too uniform is as suspicious as too lumpy.
fn log10_chi_square(stat: f64, dof: f64) -> f64 {
    let dist = ChiSquared::new(dof).expect("positive degrees of freedom");
    let tail = dist.cdf(stat).min(dist.sf(stat));
    (2.0 * tail).min(1.0).log10()
}

const GAP_HIT_BELOW: u8 = 32;
const GAP_BINS: usize = 17;

#[derive(Clone)]
struct Accumulator {
    bytes: u64,
    ones: u64,
    counts: [u64; 256],
    word: [u8; 8],
    word_fill: usize,
    words: u64,
    sum: f64,
    sum_sq: f64,
    sum_lag: f64,
    first: f64,
    last: f64,
    gap_open: Option<u64>,
    gaps: [u64; GAP_BINS],
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            bytes: 0,
            ones: 0,
            counts: [0; 256],
            word: [0; 8],
            word_fill: 0,
            words: 0,
            sum: 0.0,
            sum_sq: 0.0,
            sum_lag: 0.0,
            first: 0.0,
            last: 0.0,
            gap_open: None,
            gaps: [0; GAP_BINS],
        }
    }

    fn absorb(&mut self, data: &[u8]) {
        for &b in data {
            self.ones += b.count_ones() as u64;
            self.counts[b as usize] += 1;
            self.word[self.word_fill] = b;
            self.word_fill += 1;
            if self.word_fill == 8 {
                self.word_fill = 0;
                self.absorb_word(u64::from_le_bytes(self.word));
            }
        }
        self.bytes += data.len() as u64;
    }

    fn absorb_word(&mut self, w: u64) {
        let u = w as f64 * (1.0 / 18_446_744_073_709_551_616.0) - 0.5;
        if self.words == 0 {
            self.first = u;
        } else {
            self.sum_lag += self.last * u;
        }
        self.last = u;
        self.sum += u;
        self.sum_sq += u * u;
        self.words += 1;

        let hit = ((w >> 56) as u8) < GAP_HIT_BELOW;
        match (&mut self.gap_open, hit) {
            (Some(g), true) => {
                self.gaps[(*g as usize).min(GAP_BINS - 1)] += 1;
                *g = 0;
            }
            (Some(g), false) => *g += 1,
            (None, true) => self.gap_open = Some(0),
            (None, false) => {}
        }
    }

    /// log10 p of each test, or `None` while the sample is too small.
    fn log10_p(&self, test: SmokeTest) -> Option<f64> {
        match test {
            SmokeTest::Monobit => {
                let n = (self.bytes * 8) as f64;
                (n > 0.0).then(|| log10_normal_two_sided((2.0 * self.ones as f64 - n) / n.sqrt()))
            }
            SmokeTest::ByteChiSquare => {
                let expected = self.bytes as f64 / 256.0;
                (expected >= 5.0).then(|| {
                    let stat: f64 = self
                        .counts
                        .iter()
                        .map(|&c| (c as f64 - expected).powi(2) / expected)
                        .sum();
                    log10_chi_square(stat, 255.0)
                })
            }
            SmokeTest::SerialCorrelation => {
                if self.words < 128 {
                    return None;
                }
                let m = (self.words - 1) as f64;
                let (sx, sy) = (self.sum - self.last, self.sum - self.first);
                let sxx = self.sum_sq - self.last * self.last;
                let syy = self.sum_sq - self.first * self.first;
                let den = ((m * sxx - sx * sx) * (m * syy - sy * sy)).sqrt();
                if den.is_nan() || den <= 0.0 {
                    return Some(f64::NEG_INFINITY);
                }
                let r = (m * self.sum_lag - sx * sy) / den;
                Some(log10_normal_two_sided(r * m.sqrt()))
            }
            SmokeTest::GapTest => {
                let total: u64 = self.gaps.iter().sum();
                if total < 400 {
                    // A stream with no hits at all is itself a failure once it is long enough.
                    return (total == 0 && self.words >= 400).then_some(f64::NEG_INFINITY);
                }
                let q = GAP_HIT_BELOW as f64 / 256.0;
                let stat: f64 = self
                    .gaps
                    .iter()
                    .enumerate()
                    .map(|(g, &c)| {
                        let p = if g + 1 < GAP_BINS {
                            q * (1.0 - q).powi(g as i32)
                        } else {
                            (1.0 - q).powi(g as i32)
                        };
                        let e = p * total as f64;
                        (c as f64 - e).powi(2) / e
                    })
                    .sum();
                Some(log10_chi_square(stat, (GAP_BINS - 1) as f64))
            }
        }
    }
}

/// Runs the enabled tests block by block until one fails, the budget is spent or the source
/// runs dry.
pub fn run_smoke<S: ByteSource + ?Sized>(source: &mut S, config: &SmokeConfig) -> Result<SmokeVerdict> {
    config.validate()?;
    let mut acc = Accumulator::new();
    let mut buf = vec![0u8; config.block_bytes];
    let mut block = 0u64;
    let mut passed = 0u64;
    while acc.bytes < config.budget_bytes {
        let want = (config.budget_bytes - acc.bytes).min(config.block_bytes as u64) as usize;
        let got = source.fill(&mut buf[..want]);
        acc.absorb(&buf[..got]);
        let exhausted = got < want;
        if got > 0 {
            for &test in &config.tests {
                if let Some(lp) = acc.log10_p(test) {
                    if lp < config.fail_log10p {
                        return Ok(SmokeVerdict {
                            bytes_consumed: acc.bytes,
                            bytes_passed: passed,
                            first_failure: Some(SmokeFailure {
                                test,
                                block,
                                log10_p: lp,
                            }),
                            exhausted,
                        });
                    }
                }
            }
            passed = acc.bytes;
        }
        if exhausted {
            return Ok(SmokeVerdict {
                bytes_consumed: acc.bytes,
                bytes_passed: passed,
                first_failure: None,
                exhausted: true,
            });
        }
        block += 1;
    }
    Ok(SmokeVerdict {
        bytes_consumed: acc.bytes,
        bytes_passed: passed,
        first_failure: None,
        exhausted: false,
    })
}

/// Smoke-tests several independent generators.
pub fn run_smoke_many(
    states: Vec<RomuState>,
    config: &SmokeConfig,
    exec: Execution,
) -> Result<Vec<SmokeVerdict>> {
    exec.map(states, |s| run_smoke(&mut GeneratorSource::new(s), config))
        .into_iter()
        .collect()
}
