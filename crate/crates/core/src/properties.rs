//! Invariants checked on random inputs.

use proptest::prelude::*;

use crate::cycles::{census, cycle_length_of};
use crate::emit::{emit_to_vec, EmitFormat};
use crate::risk::{
    convolution_offset, exact_overlap, overlap_known, overlap_knuth, overlap_romu_integral,
    overlap_romu_sum, p_short_cycle,
};
use crate::scaled::{extrapolate_capacity, scale_rotation, scale_spec};
use crate::smoke::{run_smoke, GeneratorSource, SmokeConfig};
use crate::{make_stream, Family, GeneratorSpec, RomuState};

fn shipped() -> impl Strategy<Value = GeneratorSpec> {
    prop::sample::select(GeneratorSpec::shipped_specs().to_vec())
}

fn seeded(spec: GeneratorSpec, words: [u64; 4]) -> RomuState {
    let n = spec.state_words();
    let m = crate::generators::word_mask(spec.word_bits());
    let mut w: Vec<u64> = words[..n].iter().map(|x| x & m).collect();
    w[0] |= 1;
    RomuState::seed(spec, &w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn prev_undoes_next(spec in shipped(), words in any::<[u64; 4]>(), steps in 1usize..64) {
        let start = seeded(spec, words);
        let mut s = start.clone();
        for _ in 0..steps {
            s.next();
        }
        for _ in 0..steps {
            s.prev();
        }
        prop_assert_eq!(s.words(), start.words());
    }

    #[test]
    fn next_undoes_prev(spec in shipped(), words in any::<[u64; 4]>()) {
        let start = seeded(spec, words);
        let mut s = start.clone();
        s.prev();
        s.next();
        prop_assert_eq!(s.words(), start.words());
    }

    #[test]
    fn emit_is_deterministic(spec in shipped(), words in any::<[u64; 4]>(), count in 0u64..300) {
        let a = emit_to_vec(&mut seeded(spec.clone(), words), count, EmitFormat::RawLe);
        let b = emit_to_vec(&mut seeded(spec.clone(), words), count, EmitFormat::RawLe);
        prop_assert_eq!(a.len() as u64, count * spec.output_bytes() as u64);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn smoke_is_deterministic(index in any::<u64>(), entropy in any::<u64>()) {
        let config = SmokeConfig { block_bytes: 1024, ..SmokeConfig::with_budget(1 << 14) };
        let run = || {
            let s = make_stream(&GeneratorSpec::ROMU_TRIO, index, entropy);
            run_smoke(&mut GeneratorSource::new(s), &config).unwrap()
        };
        prop_assert_eq!(run(), run());
    }

    #[test]
    fn short_cycle_risk_falls_with_state(s in 16u32..512, k in 1.0f64..60.0) {
        prop_assume!(k < s as f64);
        let a = p_short_cycle(s, k).unwrap();
        let b = p_short_cycle(s + 1, k).unwrap();
        prop_assert!(b < a);
        prop_assert!(a <= 0.0);
    }

    #[test]
    fn overlap_monotone(
        s in 32u32..300,
        l in 1.0f64..60.0,
        n in 1.0f64..40.0,
        dl in 0.01f64..4.0,
        dn in 0.01f64..4.0,
    ) {
        prop_assert!(overlap_romu_integral(s, l + dl, n) > overlap_romu_integral(s, l, n));
        prop_assert!(overlap_romu_integral(s, l, n + dn) > overlap_romu_integral(s, l, n));
        prop_assert!(overlap_romu_integral(s + 1, l, n) < overlap_romu_integral(s, l, n));
        let p = s as f64;
        prop_assert!(overlap_known(p, l + dl, n) > overlap_known(p, l, n));
        prop_assert!(overlap_known(p, l, n + dn) > overlap_known(p, l, n));
        prop_assert!(overlap_knuth(p, l, n + dn) > overlap_knuth(p, l, n));
    }

    #[test]
    fn romu_forms_differ_by_a_constant(s in 8u32..1024, l in 0.0f64..80.0, n in 0.5f64..50.0) {
        let gap = overlap_romu_sum(s, l, n) - overlap_romu_integral(s, l, n);
        prop_assert!((gap + convolution_offset()).abs() < 1e-9);
    }

    #[test]
    fn exact_never_exceeds_known(p in 20.0f64..120.0, l in 0.0f64..40.0, n in 2u64..2000) {
        let n_log2 = (n as f64).log2();
        prop_assume!(n_log2 + l - p < -2.0);
        let exact = exact_overlap(p, l, n).unwrap();
        prop_assert!(exact.probability >= 0.0);
        prop_assert!(exact.log2() <= overlap_known(p, l, n_log2) + 1e-12);
    }

    #[test]
    fn scaled_rotation_in_range(r in 1u32..64, to in 2u32..64) {
        for family in [Family::Quad, Family::Trio] {
            let x = scale_rotation(r, 64, to, family);
            prop_assert!(x >= 1 && x < to.max(2));
        }
    }

    #[test]
    fn scaled_rotation_monotone(r in 1u32..63, to in 4u32..64) {
        prop_assert!(
            scale_rotation(r, 64, to, Family::Trio) <= scale_rotation(r + 1, 64, to, Family::Trio)
        );
    }

    #[test]
    fn extrapolation_increases(t in 0.5f64..80.0, d in 0u32..8) {
        let a = extrapolate_capacity(t, d).unwrap().estimated_log2_capacity;
        let b = extrapolate_capacity(t, d + 1).unwrap().estimated_log2_capacity;
        prop_assert!(b > a);
        prop_assert!((b / a - 1.4).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn census_partitions_the_state_space(m in any::<u16>(), which in 0usize..4) {
        let full = [
            GeneratorSpec::ROMU_QUAD,
            GeneratorSpec::ROMU_DUO,
            GeneratorSpec::ROMU_DUO_JR,
            GeneratorSpec::ROMU_TRIO,
        ][which].clone();
        let words = if full.family() == Family::Trio { 4 } else { 12 / full.state_words() as u32 };
        let spec = scale_spec(&full, words, (m as u64 | 1) & ((1 << words) - 1)).unwrap();
        let c = census(spec.generator()).unwrap();
        let covered: u64 = c.cycles.iter().map(|(len, count)| len * count).sum::<u64>() + c.fixed_points;
        prop_assert_eq!(covered, 1u64 << spec.state_bits());
        prop_assert_eq!(c.covered_states(), covered);
    }

    #[test]
    fn cycle_length_is_constant_along_a_cycle(m in any::<u16>(), start in any::<u16>(), hops in 1u64..200) {
        let spec = GeneratorSpec::mono(16, m as u64 | 1, 5, crate::Order::MultiplyRotate).unwrap();
        let start = start as u64;
        let len = cycle_length_of(&spec, start);
        let mut x = start;
        for _ in 0..hops {
            x = spec.step_packed(x);
        }
        prop_assert_eq!(cycle_length_of(&spec, x), len);
    }
}
