use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use romu::bench::{run_bench, BenchTarget};
use romu::capacity::capacity_study;
use romu::cycles::{census, empirical_cycle_law};
use romu::dotplot::{write_pgm, DotplotKind};
use romu::emit::{emit, EmitFormat};
use romu::exec::Execution;
use romu::external::{resolve_command, run_external, ExternalStatus, EXTERNAL_TESTER_ENV};
use romu::mono_search::{appendix_csv, verify_appendix, VerifyTier, APPENDIX_A};
use romu::risk::{assess, render_overlap_table, render_short_cycle_table, RiskQuery, TableFormat};
use romu::scaled::{default_multiplier, scale_spec};
use romu::smoke::{run_smoke, GeneratorSource, SmokeConfig, SmokeTest};
use romu::{make_stream, Family, GeneratorSpec, Order, RomuState};

/// Romu generators: byte streams, cycle censuses, risk tables and test harnesses.
#[derive(Parser)]
#[command(name = "romu", version)]
struct Cli {
    /// Run batch work on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write generator outputs to standard output or a file.
    Emit(EmitArgs),
    /// Count the cycles of a small generator.
    Census(CensusArgs),
    /// Pool cycle lengths over random multipliers of a single-word map.
    CycleLaw(CycleLawArgs),
    /// Good values versus period for each band of cycle lengths.
    Capacity(CapacityArgs),
    /// Short-cycle and overlap probabilities.
    Risk(RiskArgs),
    /// Check published RomuMono32 d-values and seed-blocks.
    VerifyAppendix(VerifyArgs),
    /// Successive-pair plots of two 10-bit generators.
    Dotplot(DotplotArgs),
    /// Time generator calls.
    Bench(BenchArgs),
    /// Run the internal statistical smoke tests.
    Smoke(SmokeArgs),
    /// Pipe generator bytes into an external test suite.
    External(ExternalArgs),
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    /// Shipped generator name, e.g. romutrio or RomuMono32.
    #[arg(long, default_value = "romutrio")]
    generator: String,
    /// Comma-separated state words (decimal or 0x hex). Overrides stream derivation.
    #[arg(long, value_delimiter = ',', value_parser = parse_u64)]
    seed: Option<Vec<u64>>,
    #[arg(long, default_value_t = 0)]
    stream_index: u64,
    #[arg(long, default_value_t = 0, value_parser = parse_u64)]
    entropy: u64,
}

impl GeneratorArgs {
    fn spec(&self) -> Result<GeneratorSpec> {
        Ok(GeneratorSpec::by_name(&self.generator)?)
    }

    fn state_for(&self, spec: GeneratorSpec) -> Result<RomuState> {
        Ok(match &self.seed {
            Some(words) => RomuState::seed(spec, words)?,
            None => make_stream(&spec, self.stream_index, self.entropy),
        })
    }

    fn state(&self) -> Result<RomuState> {
        self.state_for(self.spec()?)
    }
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 1000)]
    count: u64,
    #[arg(long, default_value = "raw_le", value_parser = parse_emit_format)]
    format: EmitFormat,
    /// Output file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Quad,
    Trio,
    Duo,
    Duojr,
    Mono,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Rm,
    Mr,
}

impl From<OrderArg> for Order {
    fn from(o: OrderArg) -> Order {
        match o {
            OrderArg::Rm => Order::RotateMultiply,
            OrderArg::Mr => Order::MultiplyRotate,
        }
    }
}

#[derive(Args)]
struct MiniArgs {
    #[arg(long, value_enum, default_value = "duojr")]
    variant: Variant,
    #[arg(long, default_value_t = 8)]
    word_bits: u32,
    /// Odd multiplier; defaults to a heuristic pick for the width.
    #[arg(long, value_parser = parse_u64)]
    multiplier: Option<u64>,
    /// Rotations, comma-separated; default scales the full-size rotations.
    #[arg(long, value_delimiter = ',')]
    rotation: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value = "mr")]
    order: OrderArg,
}

impl MiniArgs {
    fn spec(&self) -> Result<GeneratorSpec> {
        let w = self.word_bits;
        let m = self.multiplier.unwrap_or_else(|| default_multiplier(w));
        let full = match self.variant {
            Variant::Quad => GeneratorSpec::ROMU_QUAD,
            Variant::Trio => GeneratorSpec::ROMU_TRIO,
            Variant::Duo => GeneratorSpec::ROMU_DUO,
            Variant::Duojr => GeneratorSpec::ROMU_DUO_JR,
            Variant::Mono => {
                let r = match &self.rotation {
                    Some(r) if r.len() == 1 => r[0],
                    Some(_) => bail!("mono takes exactly one rotation"),
                    None => romu::scaled::scale_rotation(12, 32, w, Family::Mono(self.order.into())),
                };
                return Ok(GeneratorSpec::mono(w, m, r, self.order.into())?);
            }
        };
        let scaled = scale_spec(&full, w, m)?.into_generator();
        match &self.rotation {
            None => Ok(scaled),
            Some(r) => Ok(GeneratorSpec::new(
                scaled.name().to_string(),
                scaled.family(),
                w,
                m,
                r,
                scaled.output_rule(),
            )?),
        }
    }
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    mini: MiniArgs,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CycleLawArgs {
    #[arg(long, default_value_t = 12)]
    word_bits: u32,
    #[arg(long, default_value_t = 5)]
    rotation: u32,
    #[arg(long, default_value_t = 2048)]
    multipliers: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct CapacityArgs {
    #[command(flatten)]
    mini: MiniArgs,
    /// Skip cycles shorter than this.
    #[arg(long, default_value_t = 64)]
    min_period: u64,
    #[arg(long, default_value_t = 1)]
    per_band: usize,
    #[arg(long, default_value_t = 1024)]
    block: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RiskArgs {
    /// Only the short-cycle table.
    #[arg(long, conflicts_with = "table3")]
    table2: bool,
    /// Only the overlap table.
    #[arg(long)]
    table3: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    /// Custom query: bits of state.
    #[arg(long, requires_all = ["log2_l", "log2_n"])]
    state_bits: Option<u32>,
    /// Custom query: log2 of values per stream.
    #[arg(long)]
    log2_l: Option<f64>,
    /// Custom query: log2 of stream count.
    #[arg(long)]
    log2_n: Option<f64>,
    /// Custom query: log2 of a known period (default: state bits).
    #[arg(long)]
    log2_p: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of table rows to check, from the top.
    #[arg(long, default_value_t = APPENDIX_A.len())]
    rows: usize,
    /// Only this order; both by default.
    #[arg(long, value_enum)]
    order: Option<OrderArg>,
    /// Also measure seed-blocks (512 MiB per pair, minutes each).
    #[arg(long)]
    heavy: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DotplotArgs {
    /// lcg477 or romu_r4_m715; both when omitted.
    #[arg(long, value_parser = parse_dotplot_kind)]
    kind: Option<DotplotKind>,
    /// Output file for one kind, directory for both.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated targets; every target when omitted.
    #[arg(long, value_delimiter = ',')]
    generator: Option<Vec<String>>,
    #[arg(long, default_value_t = 100_000_000)]
    iterations: u64,
    /// Clock frequency in GHz, for cycles per call.
    #[arg(long)]
    ghz: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct SmokeArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 1 << 26)]
    budget: u64,
    #[arg(long, default_value_t = 1 << 16)]
    block: usize,
    #[arg(long, default_value_t = -9.0, allow_hyphen_values = true)]
    threshold: f64,
    /// Comma-separated subset of monobit, byte_chi_square, serial_correlation, gap_test.
    #[arg(long, value_delimiter = ',')]
    tests: Option<Vec<String>>,
}

#[derive(Args)]
struct ExternalArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Shell command template; `{bytes}` and `{generator}` are substituted.
    #[arg(long, env = EXTERNAL_TESTER_ENV)]
    external_cmd: Option<String>,
    #[arg(long, default_value_t = 1 << 30)]
    budget: u64,
    /// Log file for the tester's output.
    #[arg(long, default_value = "romu-external.log")]
    log: PathBuf,
}

fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim().replace('_', "");
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("`{s}`: {e}"))
}

fn parse_emit_format(s: &str) -> std::result::Result<EmitFormat, String> {
    s.parse().map_err(|e: romu::Error| e.to_string())
}

fn parse_dotplot_kind(s: &str) -> std::result::Result<DotplotKind, String> {
    s.parse().map_err(|e: romu::Error| e.to_string())
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = open_out(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Emit(a) => {
            let mut state = a.generator.state()?;
            let mut out = open_out(a.out.as_deref())?;
            emit(&mut state, a.count, a.format, &mut out)?;
        }
        Command::Census(a) => {
            let spec = a.mini.spec()?;
            let c = census(&spec)?;
            if c.covered_states() != c.total_states {
                bail!("partition check failed: {} of {} states", c.covered_states(), c.total_states);
            }
            write_text(a.out.as_deref(), &c.to_csv())?;
        }
        Command::CycleLaw(a) => {
            let s = empirical_cycle_law(a.word_bits, a.multipliers, a.rotation, a.seed, exec)?;
            println!(
                "word_bits={} rotation={} multipliers={} sup_deviation={:.4} mean_cycles={:.3} harmonic={:.3}",
                s.word_bits,
                s.rotation,
                s.multipliers.len(),
                s.sup_deviation,
                s.mean_cycles,
                s.harmonic
            );
            println!("t,cdf");
            for i in 0..=20 {
                let t = i as f64 / 20.0;
                println!("{t:.2},{:.4}", s.cdf(t));
            }
        }
        Command::Capacity(a) => {
            let spec = a.mini.spec()?;
            let config = SmokeConfig {
                block_bytes: a.block,
                ..Default::default()
            };
            let curve = capacity_study(&spec, &config, a.min_period, a.per_band, exec)?;
            let mut text = curve.to_csv();
            text += &format!("# plateau_log2={:.3} worst_drop={:.3}\n", curve.plateau(), curve.worst_drop());
            write_text(a.out.as_deref(), &text)?;
        }
        Command::Risk(a) => {
            let format = match a.format {
                ReportFormat::Text => TableFormat::Text,
                ReportFormat::Csv => TableFormat::Csv,
            };
            if let Some(s) = a.state_bits {
                let r = assess(RiskQuery {
                    s,
                    l: a.log2_l.unwrap_or_default(),
                    n: a.log2_n.unwrap_or_default(),
                    p: a.log2_p,
                })?;
                print_report(&r, format);
            } else {
                let mut text = String::new();
                if !a.table3 {
                    text += &render_short_cycle_table(format);
                }
                if !a.table2 {
                    if !text.is_empty() {
                        text.push('\n');
                    }
                    text += &render_overlap_table(format);
                }
                print!("{text}");
            }
        }
        Command::VerifyAppendix(a) => {
            if a.rows == 0 || a.rows > APPENDIX_A.len() {
                bail!("--rows must be between 1 and {}", APPENDIX_A.len());
            }
            let orders = match a.order {
                Some(o) => vec![o.into()],
                None => vec![Order::RotateMultiply, Order::MultiplyRotate],
            };
            let tier = if a.heavy { VerifyTier::Heavy } else { VerifyTier::Fast };
            let checks = verify_appendix(&APPENDIX_A[..a.rows], &orders, tier, exec)?;
            write_text(a.out.as_deref(), &appendix_csv(&checks))?;
            let passed = checks.iter().filter(|c| c.pass()).count();
            eprintln!("{passed}/{} pass", checks.len());
            if passed != checks.len() {
                bail!("{} check(s) failed", checks.len() - passed);
            }
        }
        Command::Dotplot(a) => {
            let jobs: Vec<(DotplotKind, PathBuf)> = match a.kind {
                Some(k) => vec![(k, a.out.clone())],
                None => {
                    std::fs::create_dir_all(&a.out)?;
                    DotplotKind::ALL
                        .iter()
                        .map(|k| (*k, a.out.join(format!("{}.pgm", k.name()))))
                        .collect()
                }
            };
            println!("kind,file,period,distinct_pairs,collinearity,direction");
            for (kind, path) in jobs {
                let s = write_pgm(kind, &path).with_context(|| format!("writing {}", path.display()))?;
                println!(
                    "{},{},{},{},{:.3},{} {}",
                    kind,
                    path.display(),
                    s.period,
                    s.distinct_pairs,
                    s.collinearity,
                    s.direction.0,
                    s.direction.1
                );
            }
        }
        Command::Bench(a) => {
            let targets = match &a.generator {
                None => BenchTarget::ALL.to_vec(),
                Some(names) => names.iter().map(|n| BenchTarget::parse(n)).collect::<Result<_, _>>()?,
            };
            let report = run_bench(&targets, a.iterations, a.ghz)?;
            match a.format {
                ReportFormat::Text => print!("{}", report.to_text()),
                ReportFormat::Csv => print!("{}", report.to_csv()),
            }
        }
        Command::Smoke(a) => {
            let tests = match &a.tests {
                None => SmokeTest::ALL.into_iter().collect(),
                Some(names) => names.iter().map(|n| n.parse()).collect::<Result<_, _>>()?,
            };
            let config = SmokeConfig {
                tests,
                block_bytes: a.block,
                fail_log10p: a.threshold,
                budget_bytes: a.budget,
            };
            let state = a.generator.state()?;
            let label = state.spec().name().to_string();
            let verdict = run_smoke(&mut GeneratorSource::new(state), &config)?;
            println!("{label}: {verdict}");
            if !verdict.passed() {
                return Err(anyhow::anyhow!("smoke test failed").context(SilentFailure));
            }
        }
        Command::External(a) => {
            let state = a.generator.state()?;
            let label = state.spec().name().to_string();
            let command = resolve_command(a.external_cmd.as_deref());
            let run = run_external(
                command.as_deref(),
                &label,
                &mut GeneratorSource::new(state),
                a.budget,
                &a.log,
            )?;
            match run.status {
                ExternalStatus::Skipped => {
                    println!("skipped: no external tester configured (--external-cmd or {EXTERNAL_TESTER_ENV})")
                }
                ExternalStatus::Passed => {
                    println!("pass: {} bytes, log {}", run.bytes_written, a.log.display())
                }
                ExternalStatus::Failed { code } => {
                    println!(
                        "fail: exit {} after {} bytes, log {}",
                        code.map_or("signal".into(), |c| c.to_string()),
                        run.bytes_written,
                        a.log.display()
                    );
                    return Err(anyhow::anyhow!("external tester failed").context(SilentFailure));
                }
            }
        }
    }
    Ok(())
}

fn print_report(r: &romu::risk::RiskReport, format: TableFormat) {
    let exact = r.exact_overlap.map_or("-".to_string(), |e| format!("{e:.3}"));
    match format {
        TableFormat::Text => {
            println!("short cycle      2^{:.3}", r.log2_p_short_cycle);
            println!("known period     2^{:.3}", r.log2_overlap_known);
            println!("knuth bound      2^{:.3}", r.log2_overlap_knuth);
            println!("romu (sum)       2^{:.3}", r.log2_overlap_romu_sum);
            println!("romu (integral)  2^{:.3}", r.log2_overlap_romu_integral);
            println!("exact product    2^{exact}");
            if r.outside_small_ratio {
                println!("warning: nl/p exceeds 2^-10; prefer the exact product");
            }
        }
        TableFormat::Csv => {
            println!("short_cycle,known,knuth,romu_sum,romu_integral,exact,outside_small_ratio");
            println!(
                "{:.4},{:.4},{:.4},{:.4},{:.4},{},{}",
                r.log2_p_short_cycle,
                r.log2_overlap_known,
                r.log2_overlap_knuth,
                r.log2_overlap_romu_sum,
                r.log2_overlap_romu_integral,
                r.exact_overlap.map_or(String::new(), |e| format!("{e:.4}")),
                r.outside_small_ratio
            );
        }
    }
}

/// Marks failures whose report has already been printed.
#[derive(Debug)]
struct SilentFailure;

impl std::fmt::Display for SilentFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("failed")
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || matches!(
                c.downcast_ref::<romu::Error>(),
                Some(romu::Error::Io(io)) if io.kind() == io::ErrorKind::BrokenPipe
            )
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<SilentFailure>().is_some() => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("romu: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
