//! Acceptance gate. Each criterion prints one PASS or FAIL line; the process exits nonzero if
//! any criterion fails. Set `ROMU_ACCEPTANCE_HEAVY=1` to add the seed-block check, which needs
//! 512 MiB and a few minutes.

use std::collections::BTreeMap;
use std::process::ExitCode;

use sha2::{Digest, Sha256};

use romu::capacity::capacity_study;
use romu::cycles::{census, empirical_cycle_law};
use romu::dotplot::{dotplot_stats, write_pgm, DotplotKind};
use romu::emit::{emit_to_vec, EmitFormat};
use romu::exec::Execution;
use romu::external::{run_external, ExternalStatus};
use romu::generators::{seed_mono32, word_mask};
use romu::mono_search::{seed_block, verify_appendix, MonoPair, VerifyTier, APPENDIX_A};
use romu::risk::{
    convolution_offset, exact_overlap, overlap_known, overlap_romu_integral, overlap_romu_sum,
    p_short_cycle, simulate_overlap, OVERLAP_ROWS, SHORT_CYCLE_ROWS,
};
use romu::scaled::scaled_variant;
use romu::smoke::{GeneratorSource, SmokeConfig};
use romu::{Family, GeneratorSpec, Order, OutputRule, RomuState};

const A: u64 = 0x3C91_B13A_5F2D_8E47;
const B: u64 = 0x9E37_79B9_7F4A_7C15;
const C: u64 = 0xD1B5_4A32_D192_ED03;
const D: u64 = 0x8CB9_2BA7_2F3D_8DD7;

/// Overlap-table cells must land within this many log2 units of the printed value.
const OVERLAP_TOLERANCE: f64 = 0.1;
/// Pinned tolerance for the convolution offset.
const OFFSET_TOLERANCE: f64 = 1e-12;
const CYCLE_LAW_SUP: f64 = 0.05;
/// Sampling noise in the pooled CDF falls like one over the square root of this.
const CYCLE_LAW_MULTIPLIERS: usize = 2048;
/// Largest allowed fall of a capacity curve below its running best, in log2 units.
const CAPACITY_SLACK: f64 = 1.0;
/// Collinearity bounds fixed from an independent first run (LCG 14.22, rotate-multiply 6.82).
const LCG_COLLINEARITY_MIN: f64 = 12.0;
const ROMU_COLLINEARITY_MAX: f64 = 8.0;

/// Family, word bits, multiplier, rotations and output rule.
type Expected<'a> = (&'a GeneratorSpec, Family, u32, u64, &'a [u32], OutputRule);
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn constants() -> Outcome {
    let m64 = 15241094284759029579;
    let m32 = 3323815723;
    let expected: [Expected; 8] = [
        (&GeneratorSpec::ROMU_QUAD, Family::Quad, 64, m64, &[52, 19], OutputRule::FullWord),
        (&GeneratorSpec::ROMU_TRIO, Family::Trio, 64, m64, &[12, 44], OutputRule::FullWord),
        (&GeneratorSpec::ROMU_DUO, Family::Duo, 64, m64, &[36, 15], OutputRule::FullWord),
        (&GeneratorSpec::ROMU_DUO_JR, Family::DuoJr, 64, m64, &[27], OutputRule::FullWord),
        (&GeneratorSpec::ROMU_QUAD32, Family::Quad, 32, m32, &[26, 9], OutputRule::FullWord),
        (&GeneratorSpec::ROMU_TRIO32, Family::Trio, 32, m32, &[6, 22], OutputRule::FullWord),
        (
            &GeneratorSpec::ROMU_MONO32,
            Family::Mono(Order::MultiplyRotate),
            32,
            3611795771,
            &[12],
            OutputRule::HighHalf,
        ),
        (
            &GeneratorSpec::ROMU_MONO,
            Family::Mono(Order::RotateMultiply),
            64,
            m64,
            &[32],
            OutputRule::LowHalf,
        ),
    ];
    let mut bad = Vec::new();
    for (spec, family, bits, m, rot, rule) in expected {
        let ok = spec.family() == family
            && spec.word_bits() == bits
            && spec.multiplier() == m
            && spec.rotations() == rot
            && spec.output_rule() == rule
            && spec.multiplier().wrapping_mul(spec.inverse_multiplier()) & word_mask(bits) == 1;
        if !ok {
            bad.push(spec.name().to_string());
        }
    }

    // Outputs are the state before the update.
    let mut trio = RomuState::seed(GeneratorSpec::ROMU_TRIO, &[1, 2, 3]).unwrap();
    let first: Vec<u64> = (0..4).map(|_| trio.next_value()).collect();
    if first != [1, 8829794706857985505, 14228190636816728064, 7047022733925001397] {
        bad.push(format!("RomuTrio outputs {first:?}"));
    }
    let mut mono = seed_mono32(0x1234_5678);
    let s = mono.words()[0];
    if mono.next_value() != s >> 16 {
        bad.push("RomuMono32 output".into());
    }
    outcome(bad.is_empty(), format!("8 shipped specs checked, mismatches: {bad:?}"))
}

fn bijectivity() -> Outcome {
    const STATES: u64 = 1_000_000;
    let mut failures = 0u64;
    let per_spec: Vec<u64> = Execution::Parallel.map(GeneratorSpec::shipped_specs().to_vec(), |spec| {
        let mask = word_mask(spec.word_bits());
        let mut seed = romu::generators::mix64(spec.multiplier() ^ spec.word_bits() as u64);
        let mut fails = 0;
        for _ in 0..STATES {
            let mut w = [0u64; 4];
            for x in w.iter_mut().take(spec.state_words()) {
                seed = romu::generators::mix64(seed);
                *x = seed & mask;
            }
            let before = w;
            spec.step(&mut w);
            spec.step_back(&mut w);
            if w != before {
                fails += 1;
            }
        }
        fails
    });
    failures += per_spec.iter().sum::<u64>();
    outcome(
        failures == 0,
        format!("{STATES} random states per variant, {failures} failures"),
    )
}

fn naive_decomposition(spec: &GeneratorSpec) -> Option<(u64, BTreeMap<u64, u64>)> {
    let n = 1usize << spec.state_bits();
    let succ: Vec<usize> = (0..n).map(|s| spec.step_packed(s as u64) as usize).collect();
    let mut indegree = vec![0u8; n];
    for &t in &succ {
        indegree[t] += 1;
    }
    if indegree.iter().any(|&d| d != 1) {
        return None;
    }
    let mut seen = vec![false; n];
    let mut fixed = 0;
    let mut hist = BTreeMap::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let (mut len, mut t) = (0u64, s);
        while !seen[t] {
            seen[t] = true;
            t = succ[t];
            len += 1;
        }
        if len == 1 {
            fixed += 1;
        } else {
            *hist.entry(len).or_insert(0) += 1;
        }
    }
    Some((fixed, hist))
}

fn small_permutations() -> Outcome {
    let variants = [
        (GeneratorSpec::ROMU_QUAD, 4),
        (GeneratorSpec::ROMU_DUO, 8),
        (GeneratorSpec::ROMU_DUO_JR, 8),
        (GeneratorSpec::ROMU_MONO32, 16),
        (GeneratorSpec::ROMU_MONO, 16),
    ];
    let mut bad = Vec::new();
    for (full, bits) in &variants {
        let spec = scaled_variant(full, *bits).unwrap().into_generator();
        let c = census(&spec).unwrap();
        let covered: u64 = c.cycles.iter().map(|(l, n)| l * n).sum::<u64>() + c.fixed_points;
        let matches = naive_decomposition(&spec) == Some((c.fixed_points, c.cycles.clone()));
        if !matches || covered != 1 << 16 || spec.state_bits() != 16 {
            bad.push(spec.name().to_string());
        }
    }
    outcome(
        bad.is_empty(),
        format!("{} 16-bit variants, mismatches: {bad:?}", variants.len()),
    )
}

fn short_cycle_table() -> Outcome {
    let got: Vec<f64> = SHORT_CYCLE_ROWS
        .iter()
        .map(|r| p_short_cycle(r.s, r.k).unwrap())
        .collect();
    let pass = SHORT_CYCLE_ROWS
        .iter()
        .zip(&got)
        .all(|(r, g)| *g == r.published && g.fract() == 0.0);
    outcome(pass, format!("exponents {got:?}"))
}

fn overlap_table() -> Outcome {
    let mut cells = Vec::new();
    let mut pass = true;
    for (i, r) in OVERLAP_ROWS.iter().enumerate() {
        let (k, m) = (r.known(), r.romu());
        let ok_k = (k - r.published_known).abs() <= OVERLAP_TOLERANCE;
        let ok_m = (m - r.published_romu).abs() <= OVERLAP_TOLERANCE;
        pass &= ok_k && ok_m;
        let mark = |ok: bool| if ok { "" } else { " MISMATCH" };
        cells.push(format!(
            "row {}: known {k:.2} vs {}{} romu {m:.2} vs {}{}",
            i + 1,
            r.published_known,
            mark(ok_k),
            r.published_romu,
            mark(ok_m)
        ));
    }
    outcome(pass, cells.join("; "))
}

fn convolution() -> Outcome {
    let target = (std::f64::consts::SQRT_2 * std::f64::consts::LN_2).log2();
    let mut worst: f64 = 0.0;
    for s in [64, 96, 128, 192, 256] {
        for (l, n) in [(44.0, 5.0), (53.0, 14.0), (64.0, 40.0), (10.0, 1.0)] {
            let gap = overlap_romu_integral(s, l, n) - overlap_romu_sum(s, l, n);
            worst = worst.max((gap - target).abs());
        }
    }
    worst = worst.max((convolution_offset() - target).abs());
    outcome(
        worst <= OFFSET_TOLERANCE,
        format!("offset {target:.6}, worst error {worst:.2e}"),
    )
}

fn exact_vs_approximate() -> Outcome {
    // n = 16 streams on a 2^40 cycle; l chosen so that nl/p runs over 2^-10 .. 2^-30.
    let (log2_p, n) = (40.0, 16u64);
    let mut gaps = Vec::new();
    let mut below = true;
    for k in 10..=30 {
        let log2_l = log2_p - 4.0 - k as f64;
        let exact = exact_overlap(log2_p, log2_l, n).unwrap();
        let known = overlap_known(log2_p, log2_l, 4.0).exp2();
        below &= exact.probability <= known;
        gaps.push((known - exact.probability) / known);
    }
    // Halving nl/p halves the relative gap.
    let worst_ratio = gaps
        .windows(2)
        .map(|w| (w[0] / w[1] - 2.0).abs())
        .fold(0.0, f64::max);
    let proportional = worst_ratio < 1e-2;

    let (p, l, streams, trials) = (1u64 << 20, 1u64 << 8, 16usize, 1_000_000u64);
    let hits = simulate_overlap(p, l, streams, trials, 0x0DDBA11, Execution::Parallel);
    let mc = hits as f64 / trials as f64;
    let exact = exact_overlap(20.0, 8.0, streams as u64).unwrap().probability;
    let se = (exact * (1.0 - exact) / trials as f64).sqrt();
    let z = (mc - exact) / se;
    outcome(
        below && proportional && z.abs() <= 3.0,
        format!(
            "exact <= known on 21 points: {below}; gap ratio error {worst_ratio:.1e}; \
             Monte Carlo {mc:.5} vs exact {exact:.5} ({z:+.2} SE)"
        ),
    )
}

fn appendix(heavy: bool) -> Outcome {
    let rows: Vec<_> = APPENDIX_A
        .iter()
        .filter(|r| [2540121707, 3731015275, 3611795771].contains(&r.multiplier))
        .copied()
        .collect();
    let checks = verify_appendix(
        &rows,
        &[Order::RotateMultiply, Order::MultiplyRotate],
        VerifyTier::Fast,
        Execution::Parallel,
    )
    .unwrap();
    let mut pass = rows.len() == 3 && checks.iter().all(|c| c.pass());
    let got: Vec<String> = checks
        .iter()
        .map(|c| format!("{}/{}:{}", c.row.multiplier, c.order.short_name(), c.got_d))
        .collect();
    let mut detail = format!("d-values {}", got.join(" "));
    if heavy {
        let pair = MonoPair::new(3611795771, 12, Order::MultiplyRotate).unwrap();
        let b = seed_block(&pair).unwrap();
        pass &= (b.block_base, b.block_bits) == (1156979152, 29);
        detail += &format!("; seed-block base {} bits {}", b.block_base, b.block_bits);
    } else {
        detail += "; seed-block tier skipped";
    }
    outcome(pass, detail)
}

fn cycle_law() -> Outcome {
    let s = empirical_cycle_law(12, CYCLE_LAW_MULTIPLIERS, 5, 0xC0FFEE, Execution::Parallel).unwrap();
    outcome(
        s.sup_deviation < CYCLE_LAW_SUP,
        format!(
            "{} multipliers, sup deviation {:.4}, mean cycles {:.2} (H_n {:.2})",
            s.multipliers.len(),
            s.sup_deviation,
            s.mean_cycles,
            s.harmonic
        ),
    )
}

fn capacity_shape() -> Outcome {
    let config = SmokeConfig {
        block_bytes: 1024,
        ..Default::default()
    };
    let curve = |full: &GeneratorSpec, bits| {
        let spec = scaled_variant(full, bits).unwrap().into_generator();
        capacity_study(&spec, &config, 16, 2, Execution::Parallel).unwrap()
    };
    let quad = curve(&GeneratorSpec::ROMU_QUAD, 4);
    let duo_jr = curve(&GeneratorSpec::ROMU_DUO_JR, 8);
    let ordered = quad.plateau() >= duo_jr.plateau();
    let shaped = quad.monotone_then_plateau(CAPACITY_SLACK) && duo_jr.monotone_then_plateau(CAPACITY_SLACK);
    outcome(
        ordered && shaped,
        format!(
            "plateau {} {:.2} vs {} {:.2}; worst drops {:.2} and {:.2}",
            quad.label,
            quad.plateau(),
            duo_jr.label,
            duo_jr.plateau(),
            quad.worst_drop(),
            duo_jr.worst_drop()
        ),
    )
}

fn dotplots() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut sizes = Vec::new();
    for kind in DotplotKind::ALL {
        let path = dir.path().join(format!("{kind}.pgm"));
        write_pgm(kind, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        sizes.push(bytes.starts_with(b"P5\n1024 1024\n255\n") && bytes.len() == 17 + 1024 * 1024);
    }
    let lcg = dotplot_stats(DotplotKind::Lcg477);
    let romu = dotplot_stats(DotplotKind::RomuR4M715);
    let pass = sizes.iter().all(|&ok| ok)
        && romu.distinct_pairs > lcg.distinct_pairs
        && romu.collinearity < lcg.collinearity
        && lcg.collinearity >= LCG_COLLINEARITY_MIN
        && romu.collinearity <= ROMU_COLLINEARITY_MAX;
    outcome(
        pass,
        format!(
            "distinct pairs {} vs {}, collinearity {:.3} vs {:.3}",
            romu.distinct_pairs, lcg.distinct_pairs, romu.collinearity, lcg.collinearity
        ),
    )
}

fn golden_seeds() -> Vec<(GeneratorSpec, Vec<u64>, &'static str)> {
    let h = |x: u64| x >> 32;
    let l = |x: u64| x & 0xFFFF_FFFF;
    vec![
        (GeneratorSpec::ROMU_QUAD, vec![A, B, C, D], "f56f12d844a595df6e0da3158401807b213bf49e430229b2c4f2e819495d3fff"),
        (GeneratorSpec::ROMU_TRIO, vec![A, B, C], "ead4a3dc8f9bdd77b12d7846d646a638768f1ca112ce1e947012c30b542dc99e"),
        (GeneratorSpec::ROMU_DUO, vec![A, B], "4b0ba02e8da910615371913423a297bfb243dbf6c232023358566c47fd92c36e"),
        (GeneratorSpec::ROMU_DUO_JR, vec![A, B], "c8ebd81e2beb247187297b7d8324536d9946b247fee8760adcff02dbbe03cd44"),
        (GeneratorSpec::ROMU_QUAD32, vec![h(A), l(A), h(B), l(B)], "c594a8920f97dbfbd8d7b3ad620c4f46d954571c513bb3282f4b6ec4f80db667"),
        (GeneratorSpec::ROMU_TRIO32, vec![h(A), l(A), h(B)], "bd8089bdaecec0680ca6181f18b31eb559ba1aaff74095e8f4c36da7df8ca090"),
        (GeneratorSpec::ROMU_MONO32, vec![h(A)], "c90a01d10d3391d0a81a2b828ad94654345aaa7fca5cb2ee18eebe41c0e4f7ce"),
        (GeneratorSpec::ROMU_MONO, vec![A], "915d43649ed7dd7b69f861a8e0ef335ba8842c2577d81b679b95b8f77dcaac0d"),
    ]
}

fn digests() -> Outcome {
    let mut bad = Vec::new();
    for (spec, seed, want) in golden_seeds() {
        let name = spec.name().to_string();
        let mut s = RomuState::seed(spec, &seed).unwrap();
        let got = hex::encode(Sha256::digest(emit_to_vec(&mut s, 1000, EmitFormat::RawLe)));
        if got != want {
            bad.push(name);
        }
    }
    outcome(bad.is_empty(), format!("8 digests over 1000 outputs, mismatches: {bad:?}"))
}

fn external_bridge() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("external.log");
    let seed = || RomuState::seed(GeneratorSpec::ROMU_DUO_JR, &[A, B]).unwrap();

    let skipped = run_external(None, "RomuDuoJr", &mut GeneratorSource::new(seed()), 1 << 20, &log).unwrap();
    let skip_ok = skipped.status == ExternalStatus::Skipped && skipped.bytes_written == 0 && !log.exists();

    let sink = dir.path().join("bytes.bin");
    let cmd = format!("cat > '{}'", sink.display());
    let run = run_external(Some(&cmd), "RomuDuoJr", &mut GeneratorSource::new(seed()), 8000, &log).unwrap();
    let delivered = std::fs::read(&sink).unwrap();
    let expected = emit_to_vec(&mut seed(), 1000, EmitFormat::RawLe);
    let bytes_ok = run.status == ExternalStatus::Passed && run.bytes_written == 8000 && delivered == expected;

    // A budget that is not a whole number of outputs is cut exactly.
    let run = run_external(Some(&cmd), "RomuDuoJr", &mut GeneratorSource::new(seed()), 1001, &log).unwrap();
    let cut = std::fs::read(&sink).unwrap();
    let cut_ok = run.bytes_written == 1001 && cut[..] == expected[..1001];

    outcome(
        skip_ok && bytes_ok && cut_ok,
        format!("skip when unset: {skip_ok}; 8000 bytes identical to emit: {bytes_ok}; exact cut: {cut_ok}"),
    )
}

fn main() -> ExitCode {
    let heavy = std::env::var("ROMU_ACCEPTANCE_HEAVY").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 13] = [
        ("generator constants", Box::new(constants)),
        ("bijectivity", Box::new(bijectivity)),
        ("small permutations", Box::new(small_permutations)),
        ("short-cycle table", Box::new(short_cycle_table)),
        ("overlap table", Box::new(overlap_table)),
        ("convolution offset", Box::new(convolution)),
        ("exact overlap", Box::new(exact_vs_approximate)),
        ("appendix pairs", Box::new(move || appendix(heavy))),
        ("cycle-length law", Box::new(cycle_law)),
        ("capacity shape", Box::new(capacity_shape)),
        ("dotplots", Box::new(dotplots)),
        ("golden digests", Box::new(digests)),
        ("external bridge", Box::new(external_bridge)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = check();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {name}: {} ({:.1?}) {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed(),
            o.detail
        );
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
