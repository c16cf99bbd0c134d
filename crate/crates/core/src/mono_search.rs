//! RomuMono32 constant tooling: d-values, seed-blocks, multiplier heuristics and rotation
//! scoring.
//!
//! For a multiplier-rotation pair the d-value is `2^32 - p`, where `p` is the period of the
//! longest cycle. With a small d, nearly every state lies on that cycle and the members form long
//! runs on the number line. The longest run is the seed-block: seeding inside it guarantees the
//! full period.

use std::fmt::Write as _;

use rand::Rng;

use crate::bitset::Bitset;
use crate::cycles::{scan_cycles, StateMap};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::generators::{rotl, word_mask, GeneratorSpec, Order};

/// A RomuMono32 multiplier, rotation and operation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MonoPair {
    pub multiplier: u32,
    pub rotation: u32,
    pub order: Order,
}

impl MonoPair {
    pub fn new(multiplier: u32, rotation: u32, order: Order) -> Result<Self> {
        if multiplier & 1 == 0 {
            return Err(Error::EvenMultiplier(multiplier as u64));
        }
        if rotation == 0 || rotation >= 32 {
            return Err(Error::RotationOutOfRange {
                rotation,
                word_bits: 32,
            });
        }
        Ok(MonoPair {
            multiplier,
            rotation,
            order,
        })
    }

    pub fn spec(&self) -> GeneratorSpec {
        GeneratorSpec::mono(32, self.multiplier as u64, self.rotation, self.order)
            .expect("MonoPair is validated at construction")
    }

    #[inline(always)]
    pub fn step(&self, x: u32) -> u32 {
        match self.order {
            Order::RotateMultiply => x.rotate_left(self.rotation).wrapping_mul(self.multiplier),
            Order::MultiplyRotate => x.wrapping_mul(self.multiplier).rotate_left(self.rotation),
        }
    }

    /// Period of the cycle through `start`.
    pub fn cycle_length(&self, start: u32) -> u64 {
        // Split on order outside the loop so the walk is two instructions per step.
        let (m, r) = (self.multiplier, self.rotation);
        let mut n = 1u64;
        match self.order {
            Order::RotateMultiply => {
                let mut x = start.rotate_left(r).wrapping_mul(m);
                while x != start {
                    x = x.rotate_left(r).wrapping_mul(m);
                    n += 1;
                }
            }
            Order::MultiplyRotate => {
                let mut x = start.wrapping_mul(m).rotate_left(r);
                while x != start {
                    x = x.wrapping_mul(m).rotate_left(r);
                    n += 1;
                }
            }
        }
        n
    }
}

impl StateMap for MonoPair {
    fn state_bits(&self) -> u32 {
        32
    }

    #[inline(always)]
    fn step(&self, state: u64) -> u64 {
        MonoPair::step(self, state as u32) as u64
    }

    fn label(&self) -> String {
        format!(
            "RomuMono32 multiplier {} rotation {} {}",
            self.multiplier,
            self.rotation,
            self.order.short_name()
        )
    }
}

const FULL: u64 = 1 << 32;

/// Period of the longest cycle and its shortfall from `2^32`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DValue {
    pub period: u64,
    pub d: u64,
    /// A state on the longest cycle.
    pub member: u32,
}

/// Finds the longest cycle of `pair`, starting from `hint` (or state 1).
///
/// If the cycle through the start holds fewer than `2^31` states it may not be the longest one,
/// and a full census locates it instead.
pub fn d_value_from(pair: &MonoPair, hint: Option<u32>) -> Result<DValue> {
    let start = hint.filter(|&h| h != 0).unwrap_or(1);
    let period = pair.cycle_length(start);
    if period >= FULL / 2 {
        return Ok(DValue {
            period,
            d: FULL - period,
            member: start,
        });
    }
    let scan = scan_cycles(pair)?;
    let longest = scan
        .cycles
        .iter()
        .max_by_key(|c| (c.length, std::cmp::Reverse(c.min_state)))
        .map(|c| (c.length, c.min_state as u32))
        .unwrap_or((1, 0));
    Ok(DValue {
        period: longest.0,
        d: FULL - longest.0,
        member: longest.1,
    })
}

pub fn d_value(pair: &MonoPair) -> Result<DValue> {
    d_value_from(pair, None)
}

/// d-values of many pairs.
pub fn d_values(pairs: &[MonoPair], exec: Execution) -> Result<Vec<DValue>> {
    exec.map(pairs.to_vec(), |p| d_value(&p)).into_iter().collect()
}

/// The largest seed-block of a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedBlockResult {
    pub pair: MonoPair,
    pub period: u64,
    pub d_value: u64,
    pub block_base: u32,
    /// Length of the longest run of consecutive cycle members.
    pub run_length: u64,
    /// `floor(log2(run_length))`.
    pub block_bits: u32,
}

/// Marks the longest cycle in a `2^32`-bit membership set (512 MiB) and finds the longest run
/// of consecutive members.
pub fn seed_block(pair: &MonoPair) -> Result<SeedBlockResult> {
    let dv = d_value(pair)?;
    let mut members = Bitset::new(FULL)?;
    let start = dv.member;
    let mut x = start;
    loop {
        members.set(x as u64);
        x = pair.step(x);
        if x == start {
            break;
        }
    }
    let (base, run) = members.longest_run();
    Ok(SeedBlockResult {
        pair: *pair,
        period: dv.period,
        d_value: dv.d,
        block_base: base as u32,
        run_length: run,
        block_bits: 63 - run.leading_zeros(),
    })
}

/// Largest allowed run of equal bits for a `word_bits`-wide multiplier.
pub fn max_bit_run(word_bits: u32) -> u32 {
    (word_bits / 8).max(3)
}

/// Checks the multiplier heuristics:
/// 1. low four bits are `1011`;
/// 2. Hamming weight within 2 of `word_bits / 2`;
/// 3. no nibble value repeats in more than two adjacent nibble pairs;
/// 4. no run of equal bits longer than [`max_bit_run`].
///
/// Rules 3 and 4 are concrete thresholds for qualitative guidance ("break up repeated patterns",
/// "avoid long runs"). The run limit is `word_bits / 8` (at least 3) so that the published 64-bit
/// multiplier, which has a run of eight zeros, passes.
pub fn passes_heuristics(m: u64, word_bits: u32) -> bool {
    let mask = word_mask(word_bits);
    if m & !mask != 0 {
        return false;
    }
    let low = 0b1011 & mask;
    if m & 0xF.min(mask) != low {
        return false;
    }
    let weight = m.count_ones() as i64;
    if (weight - word_bits as i64 / 2).abs() > 2 {
        return false;
    }
    let nibbles: Vec<u64> = (0..word_bits / 4).map(|i| m >> (4 * i) & 0xF).collect();
    let mut repeats = [0u8; 16];
    for pair in nibbles.windows(2) {
        if pair[0] == pair[1] {
            repeats[pair[0] as usize] += 1;
        }
    }
    if repeats.iter().any(|&r| r > 2) {
        return false;
    }
    longest_bit_run(m, word_bits) <= max_bit_run(word_bits)
}

pub fn longest_bit_run(m: u64, word_bits: u32) -> u32 {
    let (mut best, mut run) = (0, 0);
    let mut prev = None;
    for i in 0..word_bits {
        let b = m >> i & 1;
        run = if prev == Some(b) { run + 1 } else { 1 };
        prev = Some(b);
        best = best.max(run);
    }
    best
}

/// Draws `count` multipliers satisfying [`passes_heuristics`] by rejection sampling.
pub fn heuristic_multipliers<R: Rng + ?Sized>(word_bits: u32, count: usize, rng: &mut R) -> Vec<u64> {
    assert!((4..=64).contains(&word_bits), "word_bits must be in 4..=64");
    let mask = word_mask(word_bits);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let m = (rng.random::<u64>() & mask & !0xF) | 0b1011;
        if passes_heuristics(m, word_bits) {
            out.push(m);
        }
    }
    out
}

/// Evaluation of one rotation candidate and its grid neighbors.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationScore {
    pub rotations: Vec<u32>,
    pub score: f64,
    /// Neighbors whose largest coordinate difference is exactly 1.
    pub near: Option<NeighborStats>,
    /// Neighbors whose largest coordinate difference is exactly 2.
    pub far: Option<NeighborStats>,
}

impl RotationScore {
    /// No neighbors within distance 2: the gentle-hill test cannot be applied.
    pub fn isolated(&self) -> bool {
        self.near.is_none() && self.far.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeighborStats {
    pub count: usize,
    pub min: f64,
    pub mean: f64,
}

fn neighbor_stats(scores: impl Iterator<Item = f64>) -> Option<NeighborStats> {
    let (mut count, mut min, mut sum) = (0, f64::INFINITY, 0.0);
    for s in scores {
        count += 1;
        min = min.min(s);
        sum += s;
    }
    (count > 0).then(|| NeighborStats {
        count,
        min,
        mean: sum / count as f64,
    })
}

/// Scores each rotation set in `grid` with `evaluator` (bytes before failure, or any scalar
/// where larger is better) and summarizes its neighbors at distances 1 and 2. A good candidate
/// sits on a gentle hill: high score with high-scoring neighbors.
///
/// `build` turns a rotation set into the generator under test.
pub fn score_rotation_neighborhood<B, E>(
    grid: &[Vec<u32>],
    build: B,
    evaluator: E,
    exec: Execution,
) -> Result<Vec<RotationScore>>
where
    B: Fn(&[u32]) -> Result<GeneratorSpec> + Sync + Send,
    E: Fn(&GeneratorSpec) -> std::result::Result<f64, String> + Sync + Send,
{
    let scores: Vec<f64> = exec
        .map(grid.to_vec(), |rots| {
            let candidate = format!("{rots:?}");
            let spec = build(&rots)?;
            evaluator(&spec).map_err(|message| Error::Evaluator { candidate, message })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let distance = |a: &[u32], b: &[u32]| -> u32 {
        a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
    };
    Ok(grid
        .iter()
        .enumerate()
        .map(|(i, rots)| {
            let at = |d: u32| {
                neighbor_stats(
                    grid.iter()
                        .zip(&scores)
                        .filter(|(other, _)| distance(rots, other) == d)
                        .map(|(_, &s)| s),
                )
            };
            RotationScore {
                rotations: rots.clone(),
                score: scores[i],
                near: at(1),
                far: at(2),
            }
        })
        .collect())
}

/// One row of the published table of good RomuMono32 pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppendixRow {
    pub multiplier: u32,
    pub rotation: u32,
    pub d: u64,
    pub rm_base: u32,
    pub rm_bits: u32,
    pub mr_base: u32,
    pub mr_bits: u32,
}

const fn row(
    multiplier: u32,
    rotation: u32,
    d: u64,
    rm_base: u32,
    rm_bits: u32,
    mr_base: u32,
    mr_bits: u32,
) -> AppendixRow {
    AppendixRow {
        multiplier,
        rotation,
        d,
        rm_base,
        rm_bits,
        mr_base,
        mr_bits,
    }
}

/// Multiplier-rotation pairs with d-values under 2000, in published order.
pub const APPENDIX_A: [AppendixRow; 62] = [
    row(2540121707, 14, 2, 437125826, 31, 1, 31),
    row(3731015275, 18, 3, 1, 31, 1564370705, 30),
    row(2336447867, 16, 43, 3779345575, 28, 2076771216, 29),
    row(3611795771, 12, 47, 342645537, 28, 1156979152, 29),
    row(3952805931, 13, 157, 1159051389, 26, 2515406761, 26),
    row(3276993211, 14, 184, 226123367, 27, 1335894518, 27),
    row(4084487243, 12, 347, 1339372056, 26, 2141099809, 25),
    row(4127380763, 12, 397, 606354474, 26, 1315333761, 25),
    row(3563976171, 16, 420, 2941035005, 25, 1377002680, 25),
    row(3651999659, 14, 429, 3209498982, 25, 2227458680, 26),
    row(3365008619, 12, 476, 874642096, 25, 2055179747, 26),
    row(3953463755, 16, 514, 4174029353, 26, 2817505743, 25),
    row(3989591211, 13, 592, 3721670923, 25, 3643450503, 25),
    row(3332453915, 14, 650, 3818020724, 25, 1456733700, 25),
    row(3586487947, 16, 681, 3925643197, 25, 3307401597, 25),
    row(4272641883, 16, 709, 3002109605, 25, 2625009597, 25),
    row(3525693099, 14, 758, 144357697, 25, 3440120341, 25),
    row(3690361499, 14, 768, 2120353896, 24, 2598302657, 25),
    row(1698147467, 13, 775, 1398136959, 25, 2483006683, 25),
    row(3319523819, 15, 838, 3085144041, 25, 2129925777, 24),
    row(3256525067, 14, 840, 1109021212, 24, 1180712204, 25),
    row(3552236683, 13, 890, 1495506820, 25, 2898009531, 25),
    row(3839154475, 15, 913, 1001325849, 25, 1262306147, 24),
    row(3636548587, 13, 920, 3509505418, 25, 3475628570, 25),
    row(4193921835, 14, 937, 1699403590, 25, 1473717306, 24),
    row(4074675915, 15, 1051, 1274742985, 24, 1207307984, 25),
    row(3589580459, 16, 1070, 2080133737, 25, 3604530546, 24),
    row(3937305835, 15, 1077, 1503300770, 24, 240484477, 24),
    row(3291786395, 15, 1121, 2583623346, 24, 652306397, 24),
    row(4070215643, 15, 1171, 4077664074, 24, 2173685177, 24),
    row(3603758123, 12, 1144, 3012437991, 24, 2526760669, 25),
    row(3475128667, 14, 1188, 2293176165, 24, 3061649031, 24),
    row(3852709339, 15, 1256, 2753678026, 24, 2610555647, 24),
    row(3316538187, 13, 1271, 2052216962, 24, 1133599252, 24),
    row(2759225787, 12, 1296, 566123425, 24, 3813660306, 24),
    row(3939093339, 12, 1336, 3269117755, 24, 2086898213, 24),
    row(3953739083, 16, 1338, 534924345, 24, 3580323618, 24),
    row(2662206315, 15, 1370, 3876606173, 24, 2061627875, 24),
    row(1422968075, 16, 1377, 332616298, 24, 3202323436, 24),
    row(4219099339, 15, 1379, 2712314424, 24, 3285589456, 24),
    row(3715414331, 13, 1388, 111908111, 24, 4000728640, 24),
    row(3662642315, 14, 1406, 781158169, 25, 2775093201, 24),
    row(3240747339, 15, 1443, 2061641557, 24, 109294508, 24),
    row(3505407659, 16, 1507, 2349523361, 24, 327552291, 24),
    row(3603832939, 14, 1535, 2430830656, 24, 883175065, 24),
    row(2334149515, 15, 1560, 2225828117, 24, 3989107689, 24),
    row(3804926571, 12, 1563, 3116634076, 24, 3686568596, 24),
    row(3265651915, 13, 1570, 2075741463, 24, 3938950213, 24),
    row(3687027755, 15, 1620, 2410875726, 24, 1183455639, 24),
    row(3586546027, 16, 1648, 3460233636, 24, 2419013898, 24),
    row(3602222507, 16, 1699, 4258250079, 24, 3864885105, 24),
    row(3650858107, 14, 1704, 3375209167, 24, 3796856390, 24),
    row(3437182379, 12, 1710, 1800368255, 23, 2177538044, 24),
    row(4112721003, 14, 1726, 3545442555, 24, 3432760323, 24),
    row(3697088363, 15, 1743, 1054856781, 24, 3645416328, 24),
    row(3663407467, 13, 1790, 3930504896, 24, 2046051146, 24),
    row(3235068267, 16, 1797, 3421127945, 24, 1653095304, 23),
    row(4229866859, 12, 1872, 2184042351, 23, 3065271249, 24),
    row(3804923435, 14, 1956, 1837917379, 23, 2079520793, 23),
    row(2917649707, 16, 1969, 1061812134, 23, 2096832732, 24),
    row(2836121387, 14, 1991, 410197697, 23, 2228488688, 24),
    row(2273517239, 14, 1995, 2148212120, 23, 3778174847, 23),
];

impl AppendixRow {
    pub fn pair(&self, order: Order) -> MonoPair {
        MonoPair {
            multiplier: self.multiplier,
            rotation: self.rotation,
            order,
        }
    }

    pub fn expected_block(&self, order: Order) -> (u32, u32) {
        match order {
            Order::RotateMultiply => (self.rm_base, self.rm_bits),
            Order::MultiplyRotate => (self.mr_base, self.mr_bits),
        }
    }
}

/// Depth of an appendix verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyTier {
    /// d-values only: one cycle walk per row.
    Fast,
    /// d-values plus seed-blocks (512 MiB membership set per pair).
    Heavy,
}

/// Measured values for one row and order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AppendixCheck {
    pub row: AppendixRow,
    pub order: Order,
    pub got_d: u64,
    pub got_block: Option<(u32, u32)>,
}

impl AppendixCheck {
    pub fn pass(&self) -> bool {
        self.got_d == self.row.d
            && self
                .got_block
                .map_or(true, |b| b == self.row.expected_block(self.order))
    }
}

/// Verifies `rows` in every order listed. The walk starts from the published base of the
/// matching order, which the table places on the longest cycle.
pub fn verify_appendix(
    rows: &[AppendixRow],
    orders: &[Order],
    tier: VerifyTier,
    exec: Execution,
) -> Result<Vec<AppendixCheck>> {
    let jobs: Vec<(AppendixRow, Order)> = rows
        .iter()
        .flat_map(|r| orders.iter().map(move |&o| (*r, o)))
        .collect();
    exec.map(jobs, |(row, order)| {
        let pair = row.pair(order);
        let (got_d, got_block) = match tier {
            VerifyTier::Fast => (d_value_from(&pair, Some(row.expected_block(order).0))?.d, None),
            VerifyTier::Heavy => {
                let b = seed_block(&pair)?;
                (b.d_value, Some((b.block_base, b.block_bits)))
            }
        };
        Ok(AppendixCheck {
            row,
            order,
            got_d,
            got_block,
        })
    })
    .into_iter()
    .collect()
}

/// CSV report: one line per check.
pub fn appendix_csv(checks: &[AppendixCheck]) -> String {
    let mut out = String::from(
        "multiplier,rotation,order,expected_d,got_d,expected_base,got_base,expected_bits,got_bits,pass\n",
    );
    for c in checks {
        let (eb, ebits) = c.row.expected_block(c.order);
        let (gb, gbits) = c
            .got_block
            .map_or((String::new(), String::new()), |(b, n)| (b.to_string(), n.to_string()));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            c.row.multiplier,
            c.row.rotation,
            c.order.short_name(),
            c.row.d,
            c.got_d,
            eb,
            gb,
            ebits,
            gbits,
            c.pass()
        );
    }
    out
}

/// Searches random heuristic multipliers and rotations `1..=16` for pairs with small d-values.
///
/// Each candidate costs a walk of up to `2^32` steps; returns candidates with `d < max_d`.
pub fn random_search<R: Rng + ?Sized>(
    rng: &mut R,
    candidates: usize,
    max_d: u64,
    exec: Execution,
) -> Result<Vec<(MonoPair, DValue)>> {
    let pairs: Vec<MonoPair> = heuristic_multipliers(32, candidates, rng)
        .into_iter()
        .map(|m| MonoPair {
            multiplier: m as u32,
            rotation: rng.random_range(1..=16),
            order: Order::MultiplyRotate,
        })
        .collect();
    let dvs = exec.map(pairs.clone(), |p| {
        // Only the start's cycle matters: if it is short the pair is no good anyway.
        let period = p.cycle_length(1);
        DValue {
            period,
            d: FULL - period,
            member: 1,
        }
    });
    Ok(pairs.into_iter().zip(dvs).filter(|(_, d)| d.d < max_d).collect())
}

/// Generic single-word step used by tests to cross-check [`MonoPair::step`].
pub fn mono_step_generic(x: u64, m: u64, r: u32, bits: u32, order: Order) -> u64 {
    let mask = word_mask(bits);
    match order {
        Order::RotateMultiply => rotl(x, r, bits).wrapping_mul(m) & mask,
        Order::MultiplyRotate => rotl(x.wrapping_mul(m) & mask, r, bits),
    }
}
