//! Rotate-multiply generators of the Romu family.
//!
//! Every generator is described by a [`GeneratorSpec`]: a dataflow [`Family`], a word width,
//! an odd multiplier, one or two rotation counts and an [`OutputRule`]. The same spec-driven
//! engine runs the full-size 64-bit and 32-bit generators as well as the scaled-down variants
//! used for exhaustive cycle analysis; arithmetic is carried in `u64` and masked to the word
//! width after every operation, so a 64-bit spec is bit-exact with native wrapping arithmetic.
//!
//! Specs are validated once, at construction. `next` and `prev` never branch on the
//! constants they were given.
//!
//! The all-zeros state is the only excluded state. Individual zero words are fine, including a
//! seed that is zero except for a single bit.

use std::borrow::Cow;
use std::fmt;

use crate::error::{Error, Result};

/// Rotates the low `bits` bits of `d` left by `r`.
///
/// `r` must lie in `1..bits`; specs guarantee this before any call reaches here.
#[inline(always)]
pub fn rotl(d: u64, r: u32, bits: u32) -> u64 {
    debug_assert!(r > 0 && r < bits && bits <= 64);
    ((d << r) | (d >> (bits - r))) & word_mask(bits)
}

/// Inverse of [`rotl`].
#[inline(always)]
pub fn rotr(d: u64, r: u32, bits: u32) -> u64 {
    debug_assert!(r > 0 && r < bits && bits <= 64);
    ((d >> r) | (d << (bits - r))) & word_mask(bits)
}

#[inline(always)]
pub const fn word_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Multiplicative inverse of an odd `m` modulo `2^bits`.
///
/// Newton iteration: `m` is its own inverse modulo 8, and each step doubles the number of
/// correct low bits, so five steps reach 96 bits.
pub const fn mod_inverse(m: u64, bits: u32) -> u64 {
    let mut inv = m;
    let mut i = 0;
    while i < 5 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(m.wrapping_mul(inv)));
        i += 1;
    }
    inv & word_mask(bits)
}

/// Operation order of a single-word generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Order {
    /// `state = rotl(state) * m`
    RotateMultiply,
    /// `state = rotl(state * m)`
    MultiplyRotate,
}

impl Order {
    pub fn short_name(self) -> &'static str {
        match self {
            Order::RotateMultiply => "rm",
            Order::MultiplyRotate => "mr",
        }
    }
}

/// Dataflow shape of a generator. The shape fixes the number of state words and rotations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Quad,
    Trio,
    Duo,
    DuoJr,
    Mono(Order),
}

impl Family {
    pub const fn state_words(self) -> usize {
        match self {
            Family::Quad => 4,
            Family::Trio => 3,
            Family::Duo | Family::DuoJr => 2,
            Family::Mono(_) => 1,
        }
    }

    pub const fn rotation_count(self) -> usize {
        match self {
            Family::Quad | Family::Trio | Family::Duo => 2,
            Family::DuoJr | Family::Mono(_) => 1,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            Family::Quad => "Quad",
            Family::Trio => "Trio",
            Family::Duo => "Duo",
            Family::DuoJr => "DuoJr",
            Family::Mono(_) => "Mono",
        }
    }

    /// Index of the state word whose pre-update value is returned.
    const fn output_word(self) -> usize {
        match self {
            Family::Quad => 1,
            _ => 0,
        }
    }
}

/// Which bits of the output word are returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputRule {
    FullWord,
    HighHalf,
    LowHalf,
}

/// A generator variant: dataflow family plus its constants.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    name: Cow<'static, str>,
    family: Family,
    word_bits: u32,
    multiplier: u64,
    inverse: u64,
    rotations: [u32; 2],
    output_rule: OutputRule,
}

const M64: u64 = 15241094284759029579;
const M32: u64 = 3323815723;
const M_MONO32: u64 = 3611795771;

static SHIPPED: [GeneratorSpec; 8] = [
    GeneratorSpec::ROMU_QUAD,
    GeneratorSpec::ROMU_TRIO,
    GeneratorSpec::ROMU_DUO,
    GeneratorSpec::ROMU_DUO_JR,
    GeneratorSpec::ROMU_QUAD32,
    GeneratorSpec::ROMU_TRIO32,
    GeneratorSpec::ROMU_MONO32,
    GeneratorSpec::ROMU_MONO,
];

impl GeneratorSpec {
    /// RomuQuad: 256 bits of state.
    pub const ROMU_QUAD: GeneratorSpec =
        Self::shipped("RomuQuad", Family::Quad, 64, M64, [52, 19], OutputRule::FullWord);
    /// RomuTrio: 192 bits of state; the general-purpose recommendation.
    pub const ROMU_TRIO: GeneratorSpec =
        Self::shipped("RomuTrio", Family::Trio, 64, M64, [12, 44], OutputRule::FullWord);
    pub const ROMU_DUO: GeneratorSpec =
        Self::shipped("RomuDuo", Family::Duo, 64, M64, [36, 15], OutputRule::FullWord);
    pub const ROMU_DUO_JR: GeneratorSpec =
        Self::shipped("RomuDuoJr", Family::DuoJr, 64, M64, [27, 0], OutputRule::FullWord);
    pub const ROMU_QUAD32: GeneratorSpec =
        Self::shipped("RomuQuad32", Family::Quad, 32, M32, [26, 9], OutputRule::FullWord);
    pub const ROMU_TRIO32: GeneratorSpec =
        Self::shipped("RomuTrio32", Family::Trio, 32, M32, [6, 22], OutputRule::FullWord);
    /// RomuMono32: 32-bit state, 16-bit outputs. Seed with [`seed_mono32`].
    pub const ROMU_MONO32: GeneratorSpec = Self::shipped(
        "RomuMono32",
        Family::Mono(Order::MultiplyRotate),
        32,
        M_MONO32,
        [12, 0],
        OutputRule::HighHalf,
    );
    /// RomuMono: 64-bit state, low 32 bits returned. Its state is too small for serious
    /// work and it is not recommended.
    pub const ROMU_MONO: GeneratorSpec = Self::shipped(
        "RomuMono",
        Family::Mono(Order::RotateMultiply),
        64,
        M64,
        [32, 0],
        OutputRule::LowHalf,
    );

    const fn shipped(
        name: &'static str,
        family: Family,
        word_bits: u32,
        multiplier: u64,
        rotations: [u32; 2],
        output_rule: OutputRule,
    ) -> Self {
        GeneratorSpec {
            name: Cow::Borrowed(name),
            family,
            word_bits,
            multiplier,
            inverse: mod_inverse(multiplier, word_bits),
            rotations,
            output_rule,
        }
    }

    /// All generators published with exact constants.
    pub fn shipped_specs() -> &'static [GeneratorSpec] {
        &SHIPPED
    }

    /// Looks up a shipped generator by name, ignoring case and an optional `romu` prefix.
    pub fn by_name(name: &str) -> Result<GeneratorSpec> {
        let key = name.to_ascii_lowercase().replace(['-', '_'], "");
        let key = key.strip_prefix("romu").unwrap_or(&key);
        SHIPPED
            .iter()
            .find(|s| s.name[4..].eq_ignore_ascii_case(key))
            .cloned()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Builds and validates a custom spec.
    pub fn new(
        name: impl Into<Cow<'static, str>>,
        family: Family,
        word_bits: u32,
        multiplier: u64,
        rotations: &[u32],
        output_rule: OutputRule,
    ) -> Result<Self> {
        if !(2..=64).contains(&word_bits) {
            return Err(Error::WordBits(word_bits));
        }
        if multiplier & !word_mask(word_bits) != 0 {
            return Err(Error::MultiplierTooWide {
                multiplier,
                word_bits,
            });
        }
        if multiplier & 1 == 0 {
            return Err(Error::EvenMultiplier(multiplier));
        }
        if rotations.len() != family.rotation_count() {
            return Err(Error::RotationCount {
                family: family.name(),
                expected: family.rotation_count(),
                got: rotations.len(),
            });
        }
        if let Some(&rotation) = rotations.iter().find(|&&r| r == 0 || r >= word_bits) {
            return Err(Error::RotationOutOfRange {
                rotation,
                word_bits,
            });
        }
        if output_rule != OutputRule::FullWord && word_bits % 2 != 0 {
            return Err(Error::OddHalfWidth(word_bits));
        }
        let mut rot = [0; 2];
        rot[..rotations.len()].copy_from_slice(rotations);
        Ok(GeneratorSpec {
            name: name.into(),
            family,
            word_bits,
            multiplier,
            inverse: mod_inverse(multiplier, word_bits),
            rotations: rot,
            output_rule,
        })
    }

    /// A single-word map with full-word output, as used by RomuMono32 constant searches.
    pub fn mono(word_bits: u32, multiplier: u64, rotation: u32, order: Order) -> Result<Self> {
        Self::new(
            format!("Mono{word_bits}-{multiplier}-{rotation}-{}", order.short_name()),
            Family::Mono(order),
            word_bits,
            multiplier,
            &[rotation],
            OutputRule::FullWord,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    pub fn state_words(&self) -> usize {
        self.family.state_words()
    }

    pub fn state_bits(&self) -> u32 {
        self.word_bits * self.state_words() as u32
    }

    pub fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// `multiplier^-1 mod 2^word_bits`.
    pub fn inverse_multiplier(&self) -> u64 {
        self.inverse
    }

    pub fn rotations(&self) -> &[u32] {
        &self.rotations[..self.family.rotation_count()]
    }

    pub fn output_rule(&self) -> OutputRule {
        self.output_rule
    }

    /// Width in bits of each returned value.
    pub fn output_bits(&self) -> u32 {
        match self.output_rule {
            OutputRule::FullWord => self.word_bits,
            OutputRule::HighHalf | OutputRule::LowHalf => self.word_bits / 2,
        }
    }

    /// Bytes per value in little-endian serialization.
    pub fn output_bytes(&self) -> usize {
        self.output_bits().div_ceil(8) as usize
    }

    #[inline(always)]
    fn select_output(&self, word: u64) -> u64 {
        match self.output_rule {
            OutputRule::FullWord => word,
            OutputRule::HighHalf => word >> (self.word_bits / 2),
            OutputRule::LowHalf => word & word_mask(self.word_bits / 2),
        }
    }

    /// Advances `s` by one step and returns the selected bits of the pre-update output word.
    #[inline(always)]
    pub fn step(&self, s: &mut [u64; 4]) -> u64 {
        let bits = self.word_bits;
        let m = word_mask(bits);
        let mul = self.multiplier;
        let [r1, r2] = self.rotations;
        let out = s[self.family.output_word()];
        match self.family {
            Family::Quad => {
                let [wp, xp, yp, zp] = *s;
                s[0] = mul.wrapping_mul(zp) & m;
                s[1] = zp.wrapping_add(rotl(wp, r1, bits)) & m;
                s[2] = yp.wrapping_sub(xp) & m;
                s[3] = rotl(yp.wrapping_add(wp) & m, r2, bits);
            }
            Family::Trio => {
                let (xp, yp, zp) = (s[0], s[1], s[2]);
                s[0] = mul.wrapping_mul(zp) & m;
                s[1] = rotl(yp.wrapping_sub(xp) & m, r1, bits);
                s[2] = rotl(zp.wrapping_sub(yp) & m, r2, bits);
            }
            Family::Duo => {
                let (xp, yp) = (s[0], s[1]);
                s[0] = mul.wrapping_mul(yp) & m;
                s[1] = rotl(yp, r1, bits)
                    .wrapping_add(rotl(yp, r2, bits))
                    .wrapping_sub(xp)
                    & m;
            }
            Family::DuoJr => {
                let (xp, yp) = (s[0], s[1]);
                s[0] = mul.wrapping_mul(yp) & m;
                s[1] = rotl(yp.wrapping_sub(xp) & m, r1, bits);
            }
            Family::Mono(Order::RotateMultiply) => {
                s[0] = rotl(s[0], r1, bits).wrapping_mul(mul) & m;
            }
            Family::Mono(Order::MultiplyRotate) => {
                s[0] = rotl(s[0].wrapping_mul(mul) & m, r1, bits);
            }
        }
        self.select_output(out)
    }

    /// Undoes one [`step`](Self::step).
    #[inline]
    pub fn step_back(&self, s: &mut [u64; 4]) {
        let bits = self.word_bits;
        let m = word_mask(bits);
        let inv = self.inverse;
        let [r1, r2] = self.rotations;
        match self.family {
            Family::Quad => {
                let [wn, xn, yn, zn] = *s;
                let z = inv.wrapping_mul(wn) & m;
                let w = rotr(xn.wrapping_sub(z) & m, r1, bits);
                let y = rotr(zn, r2, bits).wrapping_sub(w) & m;
                let x = y.wrapping_sub(yn) & m;
                *s = [w, x, y, z];
            }
            Family::Trio => {
                let (xn, yn, zn) = (s[0], s[1], s[2]);
                let z = inv.wrapping_mul(xn) & m;
                let y = z.wrapping_sub(rotr(zn, r2, bits)) & m;
                let x = y.wrapping_sub(rotr(yn, r1, bits)) & m;
                s[..3].copy_from_slice(&[x, y, z]);
            }
            Family::Duo => {
                let (xn, yn) = (s[0], s[1]);
                let y = inv.wrapping_mul(xn) & m;
                let x = rotl(y, r1, bits)
                    .wrapping_add(rotl(y, r2, bits))
                    .wrapping_sub(yn)
                    & m;
                s[..2].copy_from_slice(&[x, y]);
            }
            Family::DuoJr => {
                let (xn, yn) = (s[0], s[1]);
                let y = inv.wrapping_mul(xn) & m;
                let x = y.wrapping_sub(rotr(yn, r1, bits)) & m;
                s[..2].copy_from_slice(&[x, y]);
            }
            Family::Mono(Order::RotateMultiply) => {
                s[0] = rotr(s[0].wrapping_mul(inv) & m, r1, bits);
            }
            Family::Mono(Order::MultiplyRotate) => {
                s[0] = rotr(s[0], r1, bits).wrapping_mul(inv) & m;
            }
        }
    }

    /// Packs state words into one integer, word 0 in the low bits. Needs `state_bits() <= 64`.
    #[inline(always)]
    pub fn pack(&self, s: &[u64; 4]) -> u64 {
        debug_assert!(self.state_bits() <= 64);
        let mut packed = 0;
        for (j, &w) in s[..self.state_words()].iter().enumerate() {
            packed |= w << (j as u32 * self.word_bits);
        }
        packed
    }

    #[inline(always)]
    pub fn unpack(&self, packed: u64) -> [u64; 4] {
        let mut s = [0; 4];
        let m = word_mask(self.word_bits);
        for (j, w) in s[..self.state_words()].iter_mut().enumerate() {
            *w = (packed >> (j as u32 * self.word_bits)) & m;
        }
        s
    }

    /// The state map on packed states.
    #[inline(always)]
    pub fn step_packed(&self, packed: u64) -> u64 {
        let mut s = self.unpack(packed);
        self.step(&mut s);
        self.pack(&s)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}x{}-bit, multiplier {}, rotations {:?}",
            self.name,
            self.state_words(),
            self.word_bits,
            self.multiplier,
            self.rotations()
        )?;
        if let Family::Mono(order) = self.family {
            write!(f, ", {}", order.short_name())?;
        }
        write!(f, ")")
    }
}

/// One returned value and its width.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorOutput {
    pub value: u64,
    pub bits: u32,
}

/// A live generator: a spec and its current state words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RomuState {
    spec: GeneratorSpec,
    words: [u64; 4],
}

impl RomuState {
    /// Seeds a generator with raw state words. Only the all-zeros state is rejected.
    pub fn seed(spec: GeneratorSpec, words: &[u64]) -> Result<Self> {
        if words.len() != spec.state_words() {
            return Err(Error::StateWords {
                family: spec.family.name(),
                expected: spec.state_words(),
                got: words.len(),
            });
        }
        let m = word_mask(spec.word_bits);
        if let Some(&word) = words.iter().find(|&&w| w & !m != 0) {
            return Err(Error::WordTooWide {
                word,
                word_bits: spec.word_bits,
            });
        }
        if words.iter().all(|&w| w == 0) {
            return Err(Error::ZeroState);
        }
        let mut s = [0; 4];
        s[..words.len()].copy_from_slice(words);
        Ok(RomuState { spec, words: s })
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn words(&self) -> &[u64] {
        &self.words[..self.spec.state_words()]
    }

    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> GeneratorOutput {
        GeneratorOutput {
            value: self.spec.step(&mut self.words),
            bits: self.spec.output_bits(),
        }
    }

    /// Like [`next`](Self::next) but returns the bare value.
    #[inline]
    pub fn next_value(&mut self) -> u64 {
        self.spec.step(&mut self.words)
    }

    #[inline]
    pub fn prev(&mut self) {
        self.spec.step_back(&mut self.words);
    }
}

/// Seeds RomuMono32 inside the longest cycle of its (3611795771, 12) constants.
///
/// The low 29 bits of `seed` are added to the base of the largest seed-block, so every
/// input lands on the cycle of period `2^32 - 47`.
pub fn seed_mono32(seed: u32) -> RomuState {
    let state = (seed & 0x1fff_ffff) + MONO32_BLOCK_BASE;
    RomuState {
        spec: GeneratorSpec::ROMU_MONO32,
        words: [state as u64, 0, 0, 0],
    }
}

/// Lowest value of the largest RomuMono32 seed-block.
pub const MONO32_BLOCK_BASE: u32 = 1_156_979_152;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer (Stafford mix 13). A bijection on `u64`.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the starting state of stream `stream_index` from a 64-bit `entropy` word.
///
/// Each stream is a random point on the generator's cycles (cycle-splitting). Word `j` is
/// `mix64(mix64(entropy) ^ stream_index + (j + 1) * 0x9E3779B97F4A7C15)`, truncated to the word
/// width. `mix64` is a bijection, so for 64-bit words distinct indices always give distinct first
/// words. If every word comes out zero, word 0 is replaced by 1.
pub fn make_stream(spec: &GeneratorSpec, stream_index: u64, entropy: u64) -> RomuState {
    let key = mix64(entropy) ^ stream_index;
    let m = word_mask(spec.word_bits);
    let mut words = [0u64; 4];
    for (j, w) in words[..spec.state_words()].iter_mut().enumerate() {
        *w = mix64(key.wrapping_add((j as u64 + 1).wrapping_mul(GOLDEN_GAMMA))) & m;
    }
    if words.iter().all(|&w| w == 0) {
        words[0] = 1;
    }
    RomuState {
        spec: spec.clone(),
        words,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotl_single_bit_and_wrap() {
        assert_eq!(rotl(1, 1, 64), 2);
        assert_eq!(rotl(0x8000_0000_0000_0000, 1, 64), 1);
        assert_eq!(rotl(0b1000, 1, 4), 0b0001);
    }

    #[test]
    fn rotl_matches_bit_permutation_table() {
        // Oracle: output bit (i + r) mod w takes input bit i.
        fn by_table(d: u64, r: u32, w: u32) -> u64 {
            let mut out = 0;
            for i in 0..w {
                if d >> i & 1 == 1 {
                    out |= 1 << ((i + r) % w);
                }
            }
            out
        }
        assert_eq!(rotl(0xDEAD_BEEF, 12, 32), by_table(0xDEAD_BEEF, 12, 32));
        assert_eq!(rotl(0xDEAD_BEEF, 12, 32), 0xDBEE_FDEA);
        for w in [5, 8, 10, 16, 32, 64] {
            for r in 1..w {
                let d = 0x0123_4567_89AB_CDEF & word_mask(w);
                assert_eq!(rotl(d, r, w), by_table(d, r, w));
                assert_eq!(rotr(rotl(d, r, w), r, w), d);
            }
        }
    }

    #[test]
    fn inverse_of_shipped_multipliers() {
        let inv = mod_inverse(M64, 64);
        assert_eq!(M64.wrapping_mul(inv), 1);
        assert_eq!(inv, 4888251478366616163);
        assert_eq!(mod_inverse(M_MONO32, 32), 3434516467);
        for bits in 2..=64 {
            let m = 0xD383_3E80_4F4C_574B & word_mask(bits) | 1;
            assert_eq!(m.wrapping_mul(mod_inverse(m, bits)) & word_mask(bits), 1);
        }
    }

    #[test]
    fn spec_validation() {
        let e = GeneratorSpec::new("x", Family::Trio, 64, 2, &[1, 2], OutputRule::FullWord);
        assert!(matches!(e, Err(Error::EvenMultiplier(2))));
        let e = GeneratorSpec::new("x", Family::Trio, 64, 3, &[0, 2], OutputRule::FullWord);
        assert!(matches!(e, Err(Error::RotationOutOfRange { rotation: 0, .. })));
        let e = GeneratorSpec::new("x", Family::Trio, 32, 3, &[1, 32], OutputRule::FullWord);
        assert!(matches!(e, Err(Error::RotationOutOfRange { rotation: 32, .. })));
        let e = GeneratorSpec::new("x", Family::DuoJr, 32, 3, &[1, 2], OutputRule::FullWord);
        assert!(matches!(e, Err(Error::RotationCount { .. })));
        let e = GeneratorSpec::new("x", Family::DuoJr, 8, 0x1ff, &[1], OutputRule::FullWord);
        assert!(matches!(e, Err(Error::MultiplierTooWide { .. })));
        let e = GeneratorSpec::new(
            "x",
            Family::Mono(Order::MultiplyRotate),
            7,
            3,
            &[1],
            OutputRule::HighHalf,
        );
        assert!(matches!(e, Err(Error::OddHalfWidth(7))));
    }

    #[test]
    fn shipped_specs_revalidate() {
        for s in GeneratorSpec::shipped_specs() {
            let again = GeneratorSpec::new(
                s.name().to_string(),
                s.family(),
                s.word_bits(),
                s.multiplier(),
                s.rotations(),
                s.output_rule(),
            )
            .unwrap();
            assert_eq!(again.inverse_multiplier(), s.inverse_multiplier());
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(GeneratorSpec::by_name("romutrio").unwrap(), GeneratorSpec::ROMU_TRIO);
        assert_eq!(GeneratorSpec::by_name("DuoJr").unwrap(), GeneratorSpec::ROMU_DUO_JR);
        assert_eq!(GeneratorSpec::by_name("romu-mono32").unwrap(), GeneratorSpec::ROMU_MONO32);
        assert!(matches!(
            GeneratorSpec::by_name("xoshiro"),
            Err(Error::UnknownGenerator(_))
        ));
    }

    #[test]
    fn trio_from_equal_words() {
        let mut g = RomuState::seed(GeneratorSpec::ROMU_TRIO, &[1, 1, 1]).unwrap();
        assert_eq!(g.next().value, 1);
        assert_eq!(g.words(), &[15241094284759029579, 0, 0]);
    }

    #[test]
    fn mono32_first_output() {
        let mut g = seed_mono32(0);
        assert_eq!(g.words(), &[1156979152]);
        assert_eq!(g.next(), GeneratorOutput { value: 17654, bits: 16 });
    }

    #[test]
    fn mono32_seed_masking() {
        assert_eq!(seed_mono32((1 << 29) - 1).words(), &[1156979152 + (1 << 29) - 1]);
        assert_eq!(seed_mono32(1 << 29).words(), &[1156979152]);
    }

    #[test]
    fn zero_state_rejected_single_bit_accepted() {
        assert!(matches!(
            RomuState::seed(GeneratorSpec::ROMU_TRIO, &[0, 0, 0]),
            Err(Error::ZeroState)
        ));
        assert!(RomuState::seed(GeneratorSpec::ROMU_TRIO, &[0, 0, 1]).is_ok());
        assert!(matches!(
            RomuState::seed(GeneratorSpec::ROMU_TRIO, &[1, 2]),
            Err(Error::StateWords { .. })
        ));
        assert!(matches!(
            RomuState::seed(GeneratorSpec::ROMU_TRIO32, &[1, 2, 1 << 32]),
            Err(Error::WordTooWide { .. })
        ));
    }

    #[test]
    fn counter_seeds_are_distinct() {
        let states: Vec<_> = (1..=3u64)
            .map(|k| RomuState::seed(GeneratorSpec::ROMU_DUO, &[k, k]).unwrap())
            .collect();
        assert_ne!(states[0], states[1]);
        assert_ne!(states[1], states[2]);
        assert_ne!(states[0], states[2]);
    }

    #[test]
    fn zero_is_fixed_and_prev_inverts_next() {
        for spec in GeneratorSpec::shipped_specs() {
            let mut zero = [0u64; 4];
            spec.step(&mut zero);
            assert_eq!(zero, [0; 4], "{}", spec.name());
            let mut g = make_stream(spec, 7, 99);
            let start = g.clone();
            for _ in 0..1000 {
                g.next();
            }
            for _ in 0..1000 {
                g.prev();
            }
            assert_eq!(g, start, "{}", spec.name());
        }
    }

    #[test]
    fn stream_golden_and_distinct() {
        let g = make_stream(&GeneratorSpec::ROMU_TRIO, 0, 0);
        assert_eq!(
            g.words(),
            &[0xE220_A839_7B1D_CDAF, 0x6E78_9E6A_A1B9_65F4, 0x06C4_5D18_8009_454F]
        );
        let states: Vec<_> = (0..10)
            .map(|i| make_stream(&GeneratorSpec::ROMU_TRIO, i, 0))
            .collect();
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                assert_ne!(states[i].words(), states[j].words());
            }
        }
    }

    #[test]
    fn pack_roundtrip() {
        let spec = GeneratorSpec::new("q4", Family::Quad, 4, 11, &[3, 1], OutputRule::FullWord)
            .unwrap();
        for packed in 0..1u64 << 16 {
            assert_eq!(spec.pack(&spec.unpack(packed)), packed);
        }
    }
}
