//! Wall-clock timing of generator calls.
//!
//! Each target runs `iterations` calls in a tight loop that XOR-folds every output into a sink,
//! and the sink is passed through [`black_box`] so the calls cannot be optimized away. Five
//! repetitions are timed and the median is reported. Numbers are whatever this machine does;
//! nothing here asserts a cycle count.

use std::fmt;
use std::hint::black_box;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::fast::{RomuDuo, RomuDuoJr, RomuMono, RomuMono32, RomuQuad, RomuQuad32, RomuTrio, RomuTrio32};
use crate::generators::{make_stream, Family, GeneratorSpec, Order};

pub const MIN_ITERATIONS: u64 = 1_000_000;
pub const REPETITIONS: usize = 5;

const M64: u64 = 15241094284759029579;

/// Something to time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchTarget {
    Quad,
    Trio,
    Duo,
    DuoJr,
    Quad32,
    Trio32,
    Mono32,
    Mono,
    /// Two independent 32-bit rotate-multiply generators, the second multiplying first.
    Mono32Combo2,
    /// Three of them, alternating the order.
    Mono32Combo3,
    /// RomuTrio's operations chained so that each uses the previous one's result.
    SerialTrio,
}

impl BenchTarget {
    pub const ALL: [BenchTarget; 11] = [
        BenchTarget::Quad,
        BenchTarget::Trio,
        BenchTarget::Duo,
        BenchTarget::DuoJr,
        BenchTarget::Quad32,
        BenchTarget::Trio32,
        BenchTarget::Mono32,
        BenchTarget::Mono,
        BenchTarget::Mono32Combo2,
        BenchTarget::Mono32Combo3,
        BenchTarget::SerialTrio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchTarget::Quad => "RomuQuad",
            BenchTarget::Trio => "RomuTrio",
            BenchTarget::Duo => "RomuDuo",
            BenchTarget::DuoJr => "RomuDuoJr",
            BenchTarget::Quad32 => "RomuQuad32",
            BenchTarget::Trio32 => "RomuTrio32",
            BenchTarget::Mono32 => "RomuMono32",
            BenchTarget::Mono => "RomuMono",
            BenchTarget::Mono32Combo2 => "mono32-combo2",
            BenchTarget::Mono32Combo3 => "mono32-combo3",
            BenchTarget::SerialTrio => "serial-trio",
        }
    }

    /// Accepts the shipped generator names (see [`GeneratorSpec::by_name`]) and the names of
    /// the extra targets.
    pub fn parse(name: &str) -> Result<Self> {
        if let Some(t) = BenchTarget::ALL[8..].iter().find(|t| t.name().eq_ignore_ascii_case(name)) {
            return Ok(*t);
        }
        let spec = GeneratorSpec::by_name(name)?;
        Ok(match (spec.family(), spec.word_bits()) {
            (Family::Quad, 64) => BenchTarget::Quad,
            (Family::Trio, 64) => BenchTarget::Trio,
            (Family::Duo, _) => BenchTarget::Duo,
            (Family::DuoJr, _) => BenchTarget::DuoJr,
            (Family::Quad, _) => BenchTarget::Quad32,
            (Family::Trio, _) => BenchTarget::Trio32,
            (Family::Mono(Order::MultiplyRotate), _) => BenchTarget::Mono32,
            (Family::Mono(Order::RotateMultiply), _) => BenchTarget::Mono,
        })
    }
}

impl fmt::Display for BenchTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub target: BenchTarget,
    pub iterations: u64,
    pub median: Duration,
    pub ns_per_call: f64,
    /// Present when a clock frequency was supplied.
    pub cycles_per_call: Option<f64>,
    pub sink: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn row(&self, target: BenchTarget) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.target == target)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<16} {:>12} {:>10} {:>10} {:>12}  {}\n",
            "generator", "iterations", "median ms", "ns/call", "cycles/call", "sink"
        );
        for r in &self.rows {
            let cycles = r.cycles_per_call.map_or("-".to_string(), |c| format!("{c:.2}"));
            s += &format!(
                "{:<16} {:>12} {:>10.1} {:>10.3} {:>12}  {:016x}\n",
                r.target.name(),
                r.iterations,
                r.median.as_secs_f64() * 1e3,
                r.ns_per_call,
                cycles,
                r.sink
            );
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("generator,iterations,median_ms,ns_per_call,cycles_per_call\n");
        for r in &self.rows {
            let cycles = r.cycles_per_call.map_or(String::new(), |c| format!("{c:.3}"));
            s += &format!(
                "{},{},{:.3},{:.4},{}\n",
                r.target.name(),
                r.iterations,
                r.median.as_secs_f64() * 1e3,
                r.ns_per_call,
                cycles
            );
        }
        s
    }
}

#[inline(always)]
fn time_loop<F: FnMut() -> u64>(iterations: u64, mut f: F) -> (Duration, u64) {
    let mut sink = 0u64;
    let start = Instant::now();
    for _ in 0..iterations {
        sink ^= f();
    }
    let elapsed = start.elapsed();
    (elapsed, black_box(sink))
}

fn seed_words(spec: &GeneratorSpec) -> [u64; 4] {
    let s = make_stream(spec, 0, black_box(0x5EED));
    let mut w = [0; 4];
    w[..spec.state_words()].copy_from_slice(s.words());
    w
}

/// One timed run of `target`.
pub fn time_once(target: BenchTarget, iterations: u64) -> (Duration, u64) {
    match target {
        BenchTarget::Quad => {
            let [w, x, y, z] = seed_words(&GeneratorSpec::ROMU_QUAD);
            let mut g = RomuQuad { w, x, y, z };
            time_loop(iterations, || g.next_u64())
        }
        BenchTarget::Trio => {
            let [x, y, z, _] = seed_words(&GeneratorSpec::ROMU_TRIO);
            let mut g = RomuTrio { x, y, z };
            time_loop(iterations, || g.next_u64())
        }
        BenchTarget::Duo => {
            let [x, y, ..] = seed_words(&GeneratorSpec::ROMU_DUO);
            let mut g = RomuDuo { x, y };
            time_loop(iterations, || g.next_u64())
        }
        BenchTarget::DuoJr => {
            let [x, y, ..] = seed_words(&GeneratorSpec::ROMU_DUO_JR);
            let mut g = RomuDuoJr { x, y };
            time_loop(iterations, || g.next_u64())
        }
        BenchTarget::Quad32 => {
            let [w, x, y, z] = seed_words(&GeneratorSpec::ROMU_QUAD32).map(|v| v as u32);
            let mut g = RomuQuad32 { w, x, y, z };
            time_loop(iterations, || g.next_u32() as u64)
        }
        BenchTarget::Trio32 => {
            let [x, y, z, _] = seed_words(&GeneratorSpec::ROMU_TRIO32).map(|v| v as u32);
            let mut g = RomuTrio32 { x, y, z };
            time_loop(iterations, || g.next_u32() as u64)
        }
        BenchTarget::Mono32 => {
            let mut g = RomuMono32::new(black_box(0x5EED));
            time_loop(iterations, || g.next_u16() as u64)
        }
        BenchTarget::Mono => {
            let mut g = RomuMono { state: black_box(0x5EED) };
            time_loop(iterations, || g.next_u32() as u64)
        }
        BenchTarget::Mono32Combo2 => {
            let (mut x, mut y) = black_box((0x1234_5678u32, 0x9ABC_DEF1u32));
            time_loop(iterations, || {
                x = x.rotate_left(14).wrapping_mul(2540121707);
                y = y.wrapping_mul(3611795771).rotate_left(12);
                (x ^ y) as u64
            })
        }
        BenchTarget::Mono32Combo3 => {
            let (mut x, mut y, mut z) = black_box((0x1234_5678u32, 0x9ABC_DEF1u32, 0x0F1E_2D3Cu32));
            time_loop(iterations, || {
                x = x.rotate_left(14).wrapping_mul(2540121707);
                y = y.wrapping_mul(3611795771).rotate_left(12);
                z = z.rotate_left(18).wrapping_mul(3731015275);
                (x ^ y ^ z) as u64
            })
        }
        BenchTarget::SerialTrio => {
            let [mut x, mut y, mut z, _] = seed_words(&GeneratorSpec::ROMU_TRIO);
            time_loop(iterations, || {
                let out = x;
                x = M64.wrapping_mul(z);
                y = y.wrapping_sub(x).rotate_left(12);
                z = z.wrapping_sub(y).rotate_left(44);
                out
            })
        }
    }
}

/// Times each target [`REPETITIONS`] times and reports the medians. `ghz` converts to cycles.
pub fn run_bench(targets: &[BenchTarget], iterations: u64, ghz: Option<f64>) -> Result<BenchReport> {
    if iterations < MIN_ITERATIONS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_ITERATIONS} iterations, got {iterations}"
        )));
    }
    if let Some(f) = ghz.filter(|f| f.is_nan() || *f <= 0.0) {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {f}")));
    }
    let rows = targets
        .iter()
        .map(|&target| {
            let mut runs: Vec<(Duration, u64)> =
                (0..REPETITIONS).map(|_| time_once(target, iterations)).collect();
            runs.sort_by_key(|r| r.0);
            let (median, sink) = runs[REPETITIONS / 2];
            let ns = median.as_nanos() as f64 / iterations as f64;
            BenchRow {
                target,
                iterations,
                median,
                ns_per_call: ns,
                cycles_per_call: ghz.map(|f| ns * f),
                sink,
            }
        })
        .collect();
    Ok(BenchReport { rows })
}
