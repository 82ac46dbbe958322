use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use symlab::besicovitch::besicovitch_db;
use symlab::density::parse_density;
use symlab::entropy::{
    empirical_partition_entropy, independence_search, independence_search_parallel, seq_entropy_estimate,
    seqentr_builder, PositionSet, SearchParams, DEFAULT_MAX_TIME,
};
use symlab::factor::{extract_periodic_structure, regularity_check};
use symlab::probes::Verdict;
use symlab::suite::{builtin_suite, emit_report, run_suite, ClassificationRow, ModelSpec, ProbeRecord, ReportFormat, SuiteConfig};
use symlab::systems::{CircleFraction, SideInfo, SubshiftModel, SymbolicPoint};

/// Writes to stdout, turning a closed pipe into an error `main` treats as
/// a clean exit.
macro_rules! out {
    ($($arg:tt)*) => {
        write!(io::stdout().lock(), $($arg)*)?
    };
}

#[derive(Parser)]
#[command(name = "symlab", version, about = "Probe symbolic systems for mean equicontinuity, regularity and nullness")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Suite config (JSON); the built-in suite when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    horizon: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration or search budget.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// json or csv.
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a prefix of a point, one symbol per character.
    Build {
        /// periodic:WORD, sturmian:ALPHA[:BETA], single:POS, zero, random:SEED,
        /// toeplitz, powers or file:PATH.
        point: String,
        #[arg(long, default_value_t = 64)]
        length: usize,
    },
    /// Besicovitch estimate between two points.
    Db { x: String, y: String },
    /// Run a suite and print the classification table.
    Classify,
    /// Pattern-count growth along positions, or the greedy splitting sequence.
    Seqentropy {
        /// single_one, powers, toeplitz, sturmian:ALPHA[:BETA], full:K or periodic:WORD.
        system: String,
        /// Comma-separated positions.
        #[arg(long, conflicts_with_all = ["contiguous", "powers"])]
        positions: Option<String>,
        /// Positions 0..n.
        #[arg(long, conflicts_with = "powers")]
        contiguous: Option<usize>,
        /// Positions 2, 4, ..., 2^n.
        #[arg(long)]
        powers: Option<u32>,
        /// Also report the empirical partition entropy along this generator.
        #[arg(long)]
        partition: Option<usize>,
        /// Run the builder with cylinders of this length instead.
        #[arg(long)]
        builder: Option<usize>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_TIME)]
        max_time: usize,
    },
    /// Search for an independence set of two cylinders.
    Independence {
        system: String,
        #[arg(long, default_value = "0")]
        u: String,
        #[arg(long, default_value = "1")]
        v: String,
        #[arg(long, default_value_t = 4)]
        max_k: usize,
        #[arg(long, default_value_t = 64)]
        max_position: usize,
        #[arg(long)]
        parallel: bool,
    },
    /// Periodic structure and regularity verdict.
    Regularity {
        system: String,
        /// Extract up to this period instead of using the exact skeleton.
        #[arg(long)]
        max_period: Option<u64>,
        #[arg(long, default_value = "1/512")]
        tolerance: String,
    },
    /// Run a suite and emit the report document.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the suite config instead of running it.
        #[arg(long)]
        print_config: bool,
    },
}

const DEFAULT_HORIZON: u64 = 1 << 16;
const DEFAULT_BUDGET: usize = 1 << 20;

fn parse_fraction(text: &str) -> Result<CircleFraction> {
    text.parse().map_err(|e| anyhow::anyhow!("{e}"))
}

fn parse_model(spec: &str) -> Result<ModelSpec> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match head {
        "single_one" => ModelSpec::SingleOne,
        "powers" => ModelSpec::Powers,
        "toeplitz" => ModelSpec::Toeplitz,
        "sturmian" => {
            let (a, b) = rest.split_once(':').unwrap_or((rest, "0"));
            ModelSpec::Sturmian {
                alpha: parse_fraction(a)?,
                beta: parse_fraction(b)?,
            }
        }
        "full" => ModelSpec::FullShift {
            alphabet_size: rest.parse().context("full:K needs an alphabet size")?,
        },
        "periodic" => ModelSpec::Periodic { word: rest.into() },
        _ => bail!("unknown system {spec:?}"),
    })
}

fn parse_point(spec: &str) -> Result<SymbolicPoint> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    Ok(match head {
        "periodic" => SymbolicPoint::periodic(&symlab::systems::parse_word(rest)?)?,
        "sturmian" => {
            let (a, b) = rest.split_once(':').unwrap_or((rest, "0"));
            SymbolicPoint::sturmian(parse_fraction(a)?, parse_fraction(b)?)?
        }
        "single" => {
            let pos: u64 = rest.parse().context("single:POS needs a position")?;
            SymbolicPoint::indicator(format!("single@{pos}"), move |i| i == pos)
        }
        "zero" => SymbolicPoint::constant(0, 2),
        "random" => SymbolicPoint::bernoulli(rest.parse().context("random:SEED needs a seed")?, 2)?,
        "toeplitz" => SymbolicPoint::toeplitz(),
        "powers" => SymbolicPoint::indicator("1_{2^n}", |i| i >= 2 && i.is_power_of_two()),
        "file" => {
            let text = fs::read_to_string(rest).with_context(|| format!("reading {rest}"))?;
            SymbolicPoint::from_text(text.trim())?
        }
        _ => bail!("unknown point {spec:?}"),
    })
}

fn load_suite(g: &Global) -> Result<SuiteConfig> {
    let mut config = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            SuiteConfig::from_json(&text)?
        }
        None => builtin_suite(g.seed.unwrap_or(0), g.horizon.unwrap_or(DEFAULT_HORIZON)),
    };
    if let Some(s) = g.seed {
        config.seed = s;
    }
    if let Some(h) = g.horizon {
        config.horizon = h;
    }
    if let Some(b) = g.budget {
        config.budgets.nodes = b;
        config.budgets.enumeration = b;
    }
    if let Some(f) = g.format {
        config.format = f;
    }
    config.validate()?;
    Ok(config)
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    out!("{}\n", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn verdict_cell(row: &ClassificationRow, label: &str) -> String {
    match row.verdicts.get(label) {
        Some(ProbeRecord::Verdict(v)) => match v.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
        .to_string(),
        Some(ProbeRecord::Error { .. }) => "error".into(),
        None => "-".into(),
    }
}

fn print_table(rows: &[ClassificationRow]) -> Result<()> {
    let mut labels: Vec<&String> = rows.iter().flat_map(|r| r.verdicts.keys()).collect();
    labels.sort();
    labels.dedup();
    let width = rows.iter().map(|r| r.system.len()).max().unwrap_or(6).max(6);
    let mut text = format!("{:width$}", "system");
    for l in &labels {
        write!(text, "  {l:>12}")?;
    }
    writeln!(text, "  {:>5}", "chain")?;
    for row in rows {
        write!(text, "{:width$}", row.system)?;
        for l in &labels {
            write!(text, "  {:>12}", verdict_cell(row, l))?;
        }
        writeln!(text, "  {:>5}", if row.chain_consistent { "ok" } else { "BROKEN" })?;
    }
    out!("{text}");
    Ok(())
}

fn positions(positions: Option<String>, contiguous: Option<usize>, powers: Option<u32>) -> Result<PositionSet> {
    Ok(match (positions, contiguous, powers) {
        (Some(p), _, _) => {
            let list = p
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .context("positions must be comma-separated integers")?;
            PositionSet::new(list)?
        }
        (_, Some(n), _) => PositionSet::contiguous(n)?,
        (_, _, Some(n)) => PositionSet::powers_of_two(n)?,
        _ => bail!("give --positions, --contiguous or --powers"),
    })
}

fn model(spec: &str, horizon: u64) -> Result<SubshiftModel> {
    Ok(parse_model(spec)?.build(horizon)?)
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let horizon = g.horizon.unwrap_or(DEFAULT_HORIZON);
    let budget = g.budget.unwrap_or(DEFAULT_BUDGET);
    match cli.command {
        Command::Build { point, length } => {
            out!("{}\n", parse_point(&point)?.to_text(length));
        }
        Command::Db { x, y } => {
            print_json(&besicovitch_db(&parse_point(&x)?, &parse_point(&y)?, horizon)?)?;
        }
        Command::Classify => {
            let config = load_suite(g)?;
            let rows = run_suite(&config)?;
            match g.format {
                Some(f) => out!("{}", emit_report(&rows, f)?),
                None => print_table(&rows)?,
            }
        }
        Command::Seqentropy {
            system,
            positions: list,
            contiguous,
            powers,
            partition,
            builder,
            steps,
            max_time,
        } => {
            let m = model(&system, horizon)?;
            let h = horizon as usize;
            if let Some(len) = builder {
                let (s, curve) = seqentr_builder(&m, len, steps, h, max_time, budget)?;
                print_json(&json!({ "positions": s, "curve": curve }))?;
                return Ok(());
            }
            let s = positions(list, contiguous, powers)?;
            let estimate = seq_entropy_estimate(&m, &s, h, budget)?;
            let partition = partition
                .map(|gen| empirical_partition_entropy(&m, gen, &s, h))
                .transpose()?;
            print_json(&json!({ "positions": s, "estimate": estimate, "partition_entropy": partition }))?;
        }
        Command::Independence {
            system,
            u,
            v,
            max_k,
            max_position,
            parallel,
        } => {
            let m = model(&system, horizon)?;
            let params = SearchParams {
                max_position,
                ..SearchParams::new(max_k, horizon as usize, budget)
            };
            let report = if parallel {
                independence_search_parallel(&m, &u, &v, &params)?
            } else {
                independence_search(&m, &u, &v, &params)?
            };
            print_json(&report)?;
        }
        Command::Regularity {
            system,
            max_period,
            tolerance,
        } => {
            let m = model(&system, horizon)?;
            let tol = parse_density(&tolerance)?;
            let structure = match (max_period, &m.side_info) {
                (Some(p), _) => extract_periodic_structure(m.base_point(), p, horizon)?,
                (None, SideInfo::Toeplitz { skeleton }) => skeleton.clone(),
                (None, _) => bail!("{system} has no exact skeleton; pass --max-period"),
            };
            let verdict = regularity_check(&structure, tol);
            print_json(&json!({
                "progressions": structure.progressions,
                "coverage_sum": format!("{}", structure.coverage_sum),
                "max_period": structure.max_period,
                "climbing": structure.climbing,
                "source": structure.source,
                "horizon": structure.horizon,
                "tolerance": format!("{tol}"),
                "verdict": verdict,
            }))?;
        }
        Command::Report { out, print_config } => {
            let config = load_suite(g)?;
            let text = if print_config {
                serde_json::to_string_pretty(&config)? + "\n"
            } else {
                emit_report(&run_suite(&config)?, config.format)?
            };
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => out!("{text}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
