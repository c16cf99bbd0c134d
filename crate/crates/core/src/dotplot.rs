//! Successive-pair plots of two 10-bit generators over a full cycle.
//!
//! An LCG's pairs fall on a handful of parallel lines; a rotate-multiply map of the same
//! size scatters them. [`DotplotStats::collinearity`] measures this: for every small integer
//! direction `(a, b)` it counts the distinct values of `a*x + b*y` over all pairs, and reports
//! the largest ratio of points to lines. Lattice structure gives a large ratio. The 10-bit
//! rotate-multiply map is itself a union of 16 small lattices, one per top nibble, so its
//! ratio is moderate rather than near 1, but still well below the LCG's.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::rotl;

pub const DOTPLOT_BITS: u32 = 10;
pub const DOTPLOT_SIZE: usize = 1 << DOTPLOT_BITS;
pub const DOTPLOT_SEED: u16 = 1;
/// Largest `|a|` and `|b|` searched by the collinearity statistic.
pub const MAX_DIRECTION: i64 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DotplotKind {
    /// `x <- 477x mod 1024`.
    Lcg477,
    /// `x <- rotl(x, 4) * 715 mod 1024`.
    RomuR4M715,
}

impl DotplotKind {
    pub const ALL: [DotplotKind; 2] = [DotplotKind::Lcg477, DotplotKind::RomuR4M715];

    pub fn name(self) -> &'static str {
        match self {
            DotplotKind::Lcg477 => "lcg477",
            DotplotKind::RomuR4M715 => "romu_r4_m715",
        }
    }

    pub fn step(self, x: u16) -> u16 {
        let m = DOTPLOT_SIZE as u32 - 1;
        match self {
            DotplotKind::Lcg477 => ((x as u32 * 477) & m) as u16,
            DotplotKind::RomuR4M715 => {
                ((rotl(x as u64, 4, DOTPLOT_BITS) as u32 * 715) & m) as u16
            }
        }
    }
}

impl fmt::Display for DotplotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DotplotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DotplotKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dotplot kind `{s}`")))
    }
}

/// Every `(x_i, x_{i+1})` on the cycle through the seed, including the pair that closes it.
pub fn successive_pairs(kind: DotplotKind) -> Vec<(u16, u16)> {
    let mut pairs = Vec::new();
    let mut x = DOTPLOT_SEED;
    loop {
        let y = kind.step(x);
        pairs.push((x, y));
        x = y;
        if x == DOTPLOT_SEED {
            return pairs;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DotplotStats {
    pub kind: DotplotKind,
    pub period: usize,
    pub distinct_pairs: usize,
    pub collinearity: f64,
    /// The direction achieving [`collinearity`](Self::collinearity).
    pub direction: (i64, i64),
}

/// Largest points-per-line ratio over directions with `|a|, |b| <= max_direction`.
pub fn collinearity(pairs: &[(u16, u16)], max_direction: i64) -> (f64, (i64, i64)) {
    let mut best = (0.0, (1, 0));
    let mut seen = HashSet::with_capacity(pairs.len());
    for a in 0..=max_direction {
        for b in -max_direction..=max_direction {
            if a == 0 && b <= 0 {
                continue;
            }
            seen.clear();
            seen.extend(pairs.iter().map(|&(x, y)| a * x as i64 + b * y as i64));
            let ratio = pairs.len() as f64 / seen.len() as f64;
            if ratio > best.0 {
                best = (ratio, (a, b));
            }
        }
    }
    best
}

pub fn dotplot_stats(kind: DotplotKind) -> DotplotStats {
    let pairs = successive_pairs(kind);
    let distinct: HashSet<_> = pairs.iter().collect();
    let (c, dir) = collinearity(&pairs, MAX_DIRECTION);
    DotplotStats {
        kind,
        period: pairs.len(),
        distinct_pairs: distinct.len(),
        collinearity: c,
        direction: dir,
    }
}

/// A 1024x1024 binary PGM: black dots on white, `x_i` rightward and `x_{i+1}` upward.
pub fn render_pgm(kind: DotplotKind) -> Vec<u8> {
    let header = format!("P5\n{DOTPLOT_SIZE} {DOTPLOT_SIZE}\n255\n");
    let mut img = header.into_bytes();
    let start = img.len();
    img.resize(start + DOTPLOT_SIZE * DOTPLOT_SIZE, 255);
    for (x, y) in successive_pairs(kind) {
        let row = DOTPLOT_SIZE - 1 - y as usize;
        img[start + row * DOTPLOT_SIZE + x as usize] = 0;
    }
    img
}

pub fn write_pgm(kind: DotplotKind, path: &Path) -> Result<DotplotStats> {
    std::fs::write(path, render_pgm(kind))?;
    Ok(dotplot_stats(kind))
}
