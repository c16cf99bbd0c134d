//! Exhaustive cycle structure of small invertible state maps.
//!
//! A Romu generator permutes its states, so its state space splits into disjoint cycles. For up
//! to 32 bits of state the whole permutation can be walked with one visited bit per state.
//! States are scanned in ascending order, so the first state seen on each cycle is also its
//! smallest member; that member is used as the cycle's id.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::Bitset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generators::{word_mask, GeneratorSpec, Order};

/// Largest state size a census will attempt (a 512 MiB visited set).
pub const MAX_CENSUS_BITS: u32 = 32;

/// A bijection on `0..2^state_bits`.
pub trait StateMap: Sync {
    fn state_bits(&self) -> u32;
    fn step(&self, state: u64) -> u64;
    fn label(&self) -> String;
}

impl StateMap for GeneratorSpec {
    fn state_bits(&self) -> u32 {
        GeneratorSpec::state_bits(self)
    }

    #[inline(always)]
    fn step(&self, state: u64) -> u64 {
        self.step_packed(state)
    }

    fn label(&self) -> String {
        self.to_string()
    }
}

impl<M: StateMap + ?Sized> StateMap for &M {
    fn state_bits(&self) -> u32 {
        (**self).state_bits()
    }

    #[inline(always)]
    fn step(&self, state: u64) -> u64 {
        (**self).step(state)
    }

    fn label(&self) -> String {
        (**self).label()
    }
}

/// A map given by a closure.
pub struct FnMap<F> {
    bits: u32,
    name: String,
    f: F,
}

impl<F: Fn(u64) -> u64 + Sync> FnMap<F> {
    pub fn new(bits: u32, name: impl Into<String>, f: F) -> Self {
        FnMap {
            bits,
            name: name.into(),
            f,
        }
    }
}

impl<F: Fn(u64) -> u64 + Sync> StateMap for FnMap<F> {
    fn state_bits(&self) -> u32 {
        self.bits
    }

    #[inline(always)]
    fn step(&self, state: u64) -> u64 {
        (self.f)(state)
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

/// The identity permutation on `bits` bits.
pub struct Identity(pub u32);

impl StateMap for Identity {
    fn state_bits(&self) -> u32 {
        self.0
    }

    fn step(&self, state: u64) -> u64 {
        state
    }

    fn label(&self) -> String {
        format!("identity/{}", self.0)
    }
}

/// One cycle of length at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    /// Smallest state on the cycle.
    pub min_state: u64,
    pub length: u64,
}

/// Every cycle of a map, in order of their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleScan {
    pub label: String,
    pub total_states: u64,
    pub fixed_points: u64,
    pub cycles: Vec<CycleRecord>,
}

/// Cycle-length histogram of a map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleCensus {
    pub label: String,
    pub total_states: u64,
    pub fixed_points: u64,
    /// Cycle length (>= 2) to number of such cycles.
    pub cycles: BTreeMap<u64, u64>,
}

impl CycleCensus {
    /// `sum(length * count) + fixed_points`; equals `total_states` for any permutation.
    pub fn covered_states(&self) -> u64 {
        self.fixed_points + self.cycles.iter().map(|(l, c)| l * c).sum::<u64>()
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycles.values().sum()
    }

    pub fn longest(&self) -> Option<u64> {
        self.cycles.keys().next_back().copied()
    }

    /// CSV with a `# ` header line naming the map.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# census of {}", self.label);
        let _ = writeln!(
            out,
            "# total_states={} fixed_points={} cycles={}",
            self.total_states,
            self.fixed_points,
            self.cycle_count()
        );
        out.push_str("length,count\n");
        if self.fixed_points > 0 {
            let _ = writeln!(out, "1,{}", self.fixed_points);
        }
        for (len, count) in &self.cycles {
            let _ = writeln!(out, "{len},{count}");
        }
        out
    }
}

impl From<&CycleScan> for CycleCensus {
    fn from(scan: &CycleScan) -> Self {
        let mut cycles = BTreeMap::new();
        for c in &scan.cycles {
            *cycles.entry(c.length).or_insert(0) += 1;
        }
        CycleCensus {
            label: scan.label.clone(),
            total_states: scan.total_states,
            fixed_points: scan.fixed_points,
            cycles,
        }
    }
}

fn check_size(bits: u32) -> Result<()> {
    if bits > MAX_CENSUS_BITS {
        return Err(Error::StateTooLarge {
            bits,
            limit: MAX_CENSUS_BITS,
        });
    }
    Ok(())
}

/// Walks every cycle of `map`.
///
/// The map must be a permutation; a non-bijective map would make some walk never return.
pub fn scan_cycles<M: StateMap>(map: &M) -> Result<CycleScan> {
    let bits = map.state_bits();
    check_size(bits)?;
    let total = 1u64 << bits;
    let mut visited = Bitset::new(total)?;
    let mut fixed_points = 0;
    let mut cycles = Vec::new();
    let mut next = visited.next_clear(0);
    while let Some(start) = next {
        visited.set(start);
        let mut s = map.step(start);
        let mut length = 1;
        while s != start {
            visited.set(s);
            s = map.step(s);
            length += 1;
        }
        if length == 1 {
            fixed_points += 1;
        } else {
            cycles.push(CycleRecord {
                min_state: start,
                length,
            });
        }
        next = visited.next_clear(start + 1);
    }
    Ok(CycleScan {
        label: map.label(),
        total_states: total,
        fixed_points,
        cycles,
    })
}

/// Cycle-length census of `map`. Rejects maps over [`MAX_CENSUS_BITS`].
pub fn census<M: StateMap>(map: &M) -> Result<CycleCensus> {
    scan_cycles(map).map(|s| CycleCensus::from(&s))
}

/// Censuses of several maps, one per work item.
pub fn census_many<M: StateMap + Send>(maps: Vec<M>, exec: Execution) -> Result<Vec<CycleCensus>> {
    exec.map(maps, |m| census(&m)).into_iter().collect()
}

/// Exact period of the cycle through `start`.
pub fn cycle_length_of<M: StateMap>(map: &M, start: u64) -> u64 {
    let mut s = map.step(start);
    let mut n = 1;
    while s != start {
        s = map.step(s);
        n += 1;
    }
    n
}

/// Like [`cycle_length_of`] but gives up after `max_steps`.
pub fn cycle_length_bounded<M: StateMap>(map: &M, start: u64, max_steps: u64) -> Option<u64> {
    let mut s = start;
    for n in 1..=max_steps {
        s = map.step(s);
        if s == start {
            return Some(n);
        }
    }
    None
}

/// Where a state sits in the cycle structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclePosition {
    pub state: u64,
    pub cycle_length: u64,
    /// Smallest state on the cycle, matching [`CycleRecord::min_state`].
    pub cycle_id: u64,
}

pub fn locate<M: StateMap>(map: &M, state: u64) -> CyclePosition {
    let mut s = map.step(state);
    let mut n = 1;
    let mut min = state;
    while s != state {
        min = min.min(s);
        s = map.step(s);
        n += 1;
    }
    CyclePosition {
        state,
        cycle_length: n,
        cycle_id: min,
    }
}

/// Pooled cycle-length distribution over many random single-word maps.
#[derive(Clone, Debug)]
pub struct CycleLawSummary {
    pub word_bits: u32,
    pub rotation: u32,
    pub multipliers: Vec<u64>,
    /// Nonzero states per map.
    pub n: u64,
    /// Cycle length to number of (map, state) pairs lying on a cycle of that length.
    pub pooled: BTreeMap<u64, u64>,
    /// Sup-norm distance between the pooled CDF of `length / n` and the line `m / n`.
    pub sup_deviation: f64,
    /// Mean number of cycles (including fixed points) among the nonzero states.
    pub mean_cycles: f64,
    /// Expected cycle count of a uniformly random permutation of `n` items, `H_n`.
    pub harmonic: f64,
}

impl CycleLawSummary {
    /// Pooled empirical CDF at `t * n`.
    pub fn cdf(&self, t: f64) -> f64 {
        let limit = t * self.n as f64;
        let total: u64 = self.pooled.values().sum();
        let below: u64 = self
            .pooled
            .iter()
            .filter(|(&l, _)| l as f64 <= limit)
            .map(|(_, &c)| c)
            .sum();
        below as f64 / total as f64
    }

    /// Total pooled probability mass; 1 up to rounding.
    pub fn total_mass(&self) -> f64 {
        let total: u64 = self.pooled.values().sum();
        total as f64 / (self.n as f64 * self.multipliers.len() as f64)
    }
}

/// Pools, over `multipliers` random odd multipliers, the length of the cycle containing each
/// nonzero state of the single-word map `x -> rotl(x * m, rotation)` and compares it with the
/// uniform law `P(len <= m) = m / n`.
pub fn empirical_cycle_law(
    word_bits: u32,
    multipliers: usize,
    rotation: u32,
    seed: u64,
    exec: Execution,
) -> Result<CycleLawSummary> {
    if word_bits > 16 {
        return Err(Error::InvalidArgument(format!(
            "cycle-law study needs word_bits <= 16, got {word_bits}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = word_mask(word_bits);
    let mults: Vec<u64> = (0..multipliers)
        .map(|_| (rng.random::<u64>() & mask) | 1)
        .collect();
    let specs = mults
        .iter()
        .map(|&m| GeneratorSpec::mono(word_bits, m, rotation, Order::MultiplyRotate))
        .collect::<Result<Vec<_>>>()?;
    let scans: Vec<CycleScan> = exec
        .map(specs, |s| scan_cycles(&s))
        .into_iter()
        .collect::<Result<_>>()?;

    let n = mask;
    let mut pooled = BTreeMap::new();
    let mut cycle_total = 0u64;
    for scan in &scans {
        // State 0 is always a fixed point and sits outside the permuted set.
        let nonzero_fixed = scan.fixed_points - 1;
        if nonzero_fixed > 0 {
            *pooled.entry(1).or_insert(0) += nonzero_fixed;
        }
        for c in &scan.cycles {
            *pooled.entry(c.length).or_insert(0) += c.length;
        }
        cycle_total += nonzero_fixed + scan.cycles.len() as u64;
    }

    // The empirical CDF is a step function and the law is linear in m, so the supremum is
    // reached just before or at one of the jumps.
    let total: u64 = pooled.values().sum();
    let mut below = 0u64;
    let mut sup: f64 = 0.0;
    for (&len, &count) in &pooled {
        let left = below as f64 / total as f64;
        sup = sup.max((left - (len - 1) as f64 / n as f64).abs());
        below += count;
        let right = below as f64 / total as f64;
        sup = sup.max((right - len as f64 / n as f64).abs());
    }

    Ok(CycleLawSummary {
        word_bits,
        rotation,
        multipliers: mults,
        n,
        pooled,
        sup_deviation: sup,
        mean_cycles: cycle_total as f64 / scans.len() as f64,
        harmonic: (1..=n).map(|k| 1.0 / k as f64).sum(),
    })
}
