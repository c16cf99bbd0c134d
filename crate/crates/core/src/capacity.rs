//! Good values versus cycle period for small generators.
//!
//! For a generator whose cycles can all be enumerated, pick cycles across the range of
//! periods, seed inside each, and run the smoke suite over exactly one traversal of the cycle.
//! The number of values produced before the first failure is that cycle's good-value count. A
//! sound generator tracks the ideal line (good values equal the period) until it reaches its
//! capacity, then levels onto a plateau.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::cycles::{scan_cycles, CycleRecord};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generators::{GeneratorSpec, RomuState};
use crate::smoke::{run_smoke, GeneratorSource, SmokeConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityPoint {
    pub cycle: CycleRecord,
    /// Values produced before the first failure; the full period when nothing failed.
    pub good_values: u64,
    pub failed: bool,
}

impl CapacityPoint {
    pub fn log2_period(&self) -> f64 {
        (self.cycle.length as f64).log2()
    }

    /// log2 of the good values, taking zero good values as one.
    pub fn log2_good(&self) -> f64 {
        (self.good_values.max(1) as f64).log2()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityCurve {
    pub label: String,
    /// Sorted by period.
    pub points: Vec<CapacityPoint>,
}

impl CapacityCurve {
    /// The highest log2 good-value count on the curve.
    pub fn plateau(&self) -> f64 {
        self.points.iter().map(|p| p.log2_good()).fold(0.0, f64::max)
    }

    /// Largest drop of any point below the best result among shorter cycles, in log2 units.
    ///
    /// Rising along the ideal line and then staying on a bumpy plateau keeps this small.
    pub fn worst_drop(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut worst: f64 = 0.0;
        for p in &self.points {
            let g = p.log2_good();
            worst = worst.max(best - g);
            best = best.max(g);
        }
        worst
    }

    /// Good values never fall more than `slack` below the running best.
    pub fn monotone_then_plateau(&self, slack: f64) -> bool {
        self.worst_drop() <= slack
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# capacity of {}\n", self.label);
        out.push_str("min_state,period,log2_period,good_values,log2_good,failed\n");
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{:.3},{},{:.3},{}",
                p.cycle.min_state,
                p.cycle.length,
                p.log2_period(),
                p.good_values,
                p.log2_good(),
                p.failed
            );
        }
        out
    }
}

/// The longest `per_bucket` cycles in each power-of-two band of periods, ignoring cycles
/// shorter than `min_period`.
pub fn pick_cycles(cycles: &[CycleRecord], min_period: u64, per_bucket: usize) -> Vec<CycleRecord> {
    let mut buckets: BTreeMap<u32, Vec<CycleRecord>> = BTreeMap::new();
    for c in cycles.iter().filter(|c| c.length >= min_period.max(2)) {
        buckets.entry(c.length.ilog2()).or_default().push(*c);
    }
    let mut picked: Vec<CycleRecord> = buckets
        .into_values()
        .flat_map(|mut v| {
            v.sort_by(|a, b| b.length.cmp(&a.length).then(a.min_state.cmp(&b.min_state)));
            v.truncate(per_bucket);
            v
        })
        .collect();
    picked.sort_by_key(|c| (c.length, c.min_state));
    picked
}

/// Smoke-tests one traversal of `cycle`.
pub fn evaluate_cycle(spec: &GeneratorSpec, cycle: CycleRecord, config: &SmokeConfig) -> Result<CapacityPoint> {
    let words = spec.unpack(cycle.min_state);
    let state = RomuState::seed(spec.clone(), &words[..spec.state_words()])?;
    let bits = spec.output_bits() as u64;
    let config = SmokeConfig {
        budget_bytes: cycle.length * bits / 8,
        ..config.clone()
    };
    let mut source = GeneratorSource::new(state).with_output_limit(cycle.length);
    let verdict = run_smoke(&mut source, &config)?;
    let good_values = match verdict.first_failure {
        None => cycle.length,
        Some(_) => (verdict.bytes_passed * 8 / bits).min(cycle.length),
    };
    Ok(CapacityPoint {
        cycle,
        good_values,
        failed: verdict.first_failure.is_some(),
    })
}

/// Runs the study on every picked cycle of `spec`.
pub fn capacity_study(
    spec: &GeneratorSpec,
    config: &SmokeConfig,
    min_period: u64,
    per_bucket: usize,
    exec: Execution,
) -> Result<CapacityCurve> {
    if spec.state_bits() > crate::cycles::MAX_CENSUS_BITS {
        return Err(Error::StateTooLarge {
            bits: spec.state_bits(),
            limit: crate::cycles::MAX_CENSUS_BITS,
        });
    }
    config.validate()?;
    let scan = scan_cycles(spec)?;
    let picked = pick_cycles(&scan.cycles, min_period, per_bucket);
    let points = exec
        .map(picked, |c| evaluate_cycle(spec, c, config))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(CapacityCurve {
        label: spec.to_string(),
        points,
    })
}
