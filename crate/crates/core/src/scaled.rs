//! Scaled-down Romu variants and capacity extrapolation.
//!
//! A mini-generator keeps the dataflow of a full-size generator but uses narrower words, so its
//! cycles can be enumerated and its capacity measured directly. Rotations scale in proportion
//! to the word width; multipliers do not scale and are supplied separately.

use std::ops::Deref;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::{Family, GeneratorSpec};
use crate::mono_search::heuristic_multipliers;

/// A generator derived from a full-size spec at a narrower word width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledSpec {
    base_name: String,
    spec: GeneratorSpec,
}

impl ScaledSpec {
    pub fn base_name(&self) -> &str {
        &self.base_name
    }

    pub fn base_variant(&self) -> Family {
        self.spec.family()
    }

    pub fn generator(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn into_generator(self) -> GeneratorSpec {
        self.spec
    }
}

impl Deref for ScaledSpec {
    type Target = GeneratorSpec;

    fn deref(&self) -> &GeneratorSpec {
        &self.spec
    }
}

/// Scales one rotation from `from_bits` to `to_bits`, clamped to `1..to_bits`.
///
/// Exact halves round down for Quad, whose published 32-bit variant uses 9 for the 9.5 that
/// 19 scales to, and round up for every other family.
pub fn scale_rotation(r: u32, from_bits: u32, to_bits: u32, family: Family) -> u32 {
    let num = r as u64 * to_bits as u64;
    let den = from_bits as u64;
    let (q, rem) = (num / den, num % den);
    let rounded = match (2 * rem).cmp(&den) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal if family == Family::Quad => q,
        std::cmp::Ordering::Equal => q + 1,
    };
    (rounded as u32).clamp(1, to_bits.saturating_sub(1).max(1))
}

/// Derives the `word_bits`-wide variant of `full` with the caller's multiplier.
pub fn scale_spec(full: &GeneratorSpec, word_bits: u32, multiplier: u64) -> Result<ScaledSpec> {
    if multiplier & 1 == 0 {
        return Err(Error::EvenMultiplier(multiplier));
    }
    if !(2..=full.word_bits()).contains(&word_bits) {
        return Err(Error::WordBits(word_bits));
    }
    let rotations: Vec<u32> = full
        .rotations()
        .iter()
        .map(|&r| scale_rotation(r, full.word_bits(), word_bits, full.family()))
        .collect();
    let spec = GeneratorSpec::new(
        format!("{}@{}", full.name(), word_bits),
        full.family(),
        word_bits,
        multiplier,
        &rotations,
        full.output_rule(),
    )?;
    Ok(ScaledSpec {
        base_name: full.name().to_string(),
        spec,
    })
}

/// Seed for the heuristic draw behind [`default_multiplier`].
pub const MINI_MULTIPLIER_SEED: u64 = 0x526F_6D75;

/// Multipliers drawn with [`heuristic_multipliers`] from [`MINI_MULTIPLIER_SEED`].
pub const MINI_MULTIPLIER_8: u64 = 0xDB;
pub const MINI_MULTIPLIER_16: u64 = 0xD1CB;

/// Default multiplier for a mini-generator of the given width.
///
/// The published multipliers serve 64 and 32 bits. Other widths draw from the multiplier
/// heuristics with a fixed seed, so the choice is reproducible.
pub fn default_multiplier(word_bits: u32) -> u64 {
    match word_bits {
        64 => GeneratorSpec::ROMU_QUAD.multiplier(),
        32 => GeneratorSpec::ROMU_QUAD32.multiplier(),
        4.. => {
            let mut rng = ChaCha8Rng::seed_from_u64(MINI_MULTIPLIER_SEED ^ word_bits as u64);
            heuristic_multipliers(word_bits, 1, &mut rng)[0]
        }
        _ => 0b1011 & crate::generators::word_mask(word_bits),
    }
}

/// [`scale_spec`] with [`default_multiplier`].
pub fn scaled_variant(full: &GeneratorSpec, word_bits: u32) -> Result<ScaledSpec> {
    scale_spec(full, word_bits, default_multiplier(word_bits))
}

/// Estimated capacity of a larger generator from a tested mini-generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapacityEstimate {
    /// log2 of the number of good values measured on the mini-generator.
    pub tested_log2_capacity: f64,
    pub doublings: u32,
    /// log2 of the estimated capacity in values.
    pub estimated_log2_capacity: f64,
}

/// Growth of the log2 capacity per doubling of the state size.
pub const DOUBLING_FACTOR: f64 = 1.4;

impl CapacityEstimate {
    /// The estimate in bytes for outputs of `output_bytes` bytes.
    pub fn log2_bytes(&self, output_bytes: usize) -> f64 {
        self.estimated_log2_capacity + (output_bytes as f64).log2()
    }
}

/// Multiplies the tested log2 capacity by 1.4 for every doubling of state size.
pub fn extrapolate_capacity(tested_log2: f64, doublings: u32) -> Result<CapacityEstimate> {
    if !(tested_log2 > 0.0 && tested_log2.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "tested log2 capacity must be positive, got {tested_log2}"
        )));
    }
    Ok(CapacityEstimate {
        tested_log2_capacity: tested_log2,
        doublings,
        estimated_log2_capacity: tested_log2 * DOUBLING_FACTOR.powi(doublings as i32),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trio_and_quad_at_32_match_published() {
        let trio = scale_spec(&GeneratorSpec::ROMU_TRIO, 32, 3323815723).unwrap();
        assert_eq!(trio.rotations(), &[6, 22]);
        let quad = scale_spec(&GeneratorSpec::ROMU_QUAD, 32, 3323815723).unwrap();
        assert_eq!(quad.rotations(), GeneratorSpec::ROMU_QUAD32.rotations());
        assert_eq!(quad.rotations(), &[26, 9]);
    }

    #[test]
    fn duo_family_rounds_half_up() {
        let jr = scale_spec(&GeneratorSpec::ROMU_DUO_JR, 32, 3).unwrap();
        assert_eq!(jr.rotations(), &[14]);
        let duo = scale_spec(&GeneratorSpec::ROMU_DUO, 32, 3).unwrap();
        assert_eq!(duo.rotations(), &[18, 8]);
    }

    #[test]
    fn identity_at_full_width() {
        for full in GeneratorSpec::shipped_specs() {
            let s = scale_spec(full, full.word_bits(), full.multiplier()).unwrap();
            assert_eq!(s.rotations(), full.rotations());
            assert_eq!(s.multiplier(), full.multiplier());
            assert_eq!(s.base_name(), full.name());
        }
    }

    #[test]
    fn rotations_clamped_and_monotone() {
        for full in GeneratorSpec::shipped_specs() {
            let mut prev: Option<Vec<u32>> = None;
            for w in 2..=full.word_bits() {
                let s = match scale_spec(full, w, 1) {
                    Ok(s) => s,
                    Err(Error::OddHalfWidth(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                for &r in s.rotations() {
                    assert!(r >= 1 && r < w.max(2));
                }
                if let Some(p) = &prev {
                    for (a, b) in p.iter().zip(s.rotations()) {
                        assert!(b >= a, "{} at {w}", full.name());
                    }
                }
                prev = Some(s.rotations().to_vec());
            }
        }
    }

    #[test]
    fn even_multiplier_rejected() {
        assert!(matches!(
            scale_spec(&GeneratorSpec::ROMU_TRIO, 16, 0x100),
            Err(Error::EvenMultiplier(0x100))
        ));
    }

    #[test]
    fn mini_multiplier_fixtures() {
        assert_eq!(default_multiplier(8), MINI_MULTIPLIER_8);
        assert_eq!(default_multiplier(16), MINI_MULTIPLIER_16);
        for w in 4..=64 {
            let m = default_multiplier(w);
            assert_eq!(m & 1, 1);
            assert!(crate::mono_search::passes_heuristics(m, w), "{w}: {m:#x}");
        }
    }

    #[test]
    fn extrapolation_rule() {
        assert_eq!(extrapolate_capacity(40.0, 0).unwrap().estimated_log2_capacity, 40.0);
        assert!((extrapolate_capacity(40.0, 1).unwrap().estimated_log2_capacity - 56.0).abs() < 1e-12);
        for c in [1.0, 13.5, 30.0] {
            let e = extrapolate_capacity(c, 2).unwrap().estimated_log2_capacity;
            assert!((e - c * 1.96).abs() < 1e-12);
        }
        assert!(extrapolate_capacity(0.0, 1).is_err());
        let e = extrapolate_capacity(20.0, 1).unwrap();
        assert!((e.log2_bytes(8) - 31.0).abs() < 1e-12);
    }
}
