//! `doodle`: command-line front end.
//!
//! Exit codes: 0 success or equal, 1 unequal or failed claims, 2 usage,
//! 3 parse, 4 budget.

mod config;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use doodle_core::codec::{emit_gauss, emit_pd, render_dot, render_svg, to_json, Format};
use doodle_core::confluence::{check_fdpp, check_ldc, check_urp, doodle_subgraph, random_graph, roots, two_root_peak};
use doodle_core::enumeration::{
    census, census_resume, store_append, store_query, verify_census_claims, Budget, CensusCheckpoint, CensusError,
    CensusFilter, CensusOptions, CensusQuery, ClaimStatus,
};
use doodle_core::moves::{random_expansion, reduce_with_trace, SiteKind, Strategy};
use doodle_core::virtualization::{gauss_data_equal, planarize_seeded, virtual_area_number};
use doodle_core::{canonical_code, doodle_equal, genus_of_doodle, DoodleMap, Mode};

use config::Config;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse(_) | CliError::Io(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(name = "doodle", version, about = "Doodles on surfaces: reduction, equivalence, census")]
struct Cli {
    /// TOML file with defaults (store, budget_secs, workers, seed, mode).
    #[arg(long, global = true, env = "DOODLE_CONFIG")]
    config: Option<PathBuf>,
    /// Log progress and seeds to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Gauss,
    Pd,
}

#[derive(Clone, Copy, ValueEnum)]
enum InFormat {
    Gauss,
    Pd,
    Json,
}

impl From<InFormat> for Format {
    fn from(f: InFormat) -> Self {
        match f {
            InFormat::Gauss => Format::Gauss,
            InFormat::Pd => Format::Pd,
            InFormat::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    First,
    Greedy,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce to the minimal diagram and print the move trace.
    Reduce {
        input: String,
        #[arg(long, value_enum)]
        format: Option<InFormat>,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
        #[arg(long, value_enum, default_value = "first")]
        strategy: StrategyArg,
        #[arg(long, env = "DOODLE_SEED")]
        seed: Option<u64>,
    },
    /// Canonical code in hex.
    Canon {
        input: String,
        #[arg(long, value_enum)]
        format: Option<InFormat>,
        #[arg(long, env = "DOODLE_MODE")]
        mode: Option<String>,
    },
    /// Exit 0 if the two diagrams are equivalent, 1 otherwise.
    Eq {
        first: String,
        second: String,
        #[arg(long, env = "DOODLE_MODE")]
        mode: Option<String>,
        /// Compare Gauss data only (drawings up to detour moves).
        #[arg(long)]
        detour_only: bool,
    },
    /// Genus of the doodle.
    Genus { input: String },
    /// Virtual-area number of the drawing.
    Va { input: String },
    /// Enumerate connected minimal diagrams.
    Census {
        n: usize,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        components: Option<usize>,
        #[arg(long, env = "DOODLE_STORE")]
        store: Option<PathBuf>,
        #[arg(long, env = "DOODLE_BUDGET_SECS")]
        budget: Option<u64>,
        #[arg(long, env = "DOODLE_WORKERS")]
        workers: Option<usize>,
        /// Where an interrupted run saves its progress.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Continue from the checkpoint file.
        #[arg(long)]
        resume: bool,
    },
    /// Query a census store.
    Query {
        #[arg(long, env = "DOODLE_STORE")]
        store: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        genus: Option<u32>,
        #[arg(long)]
        components: Option<usize>,
        /// Face constraint `degree=count`, repeatable.
        #[arg(long = "face")]
        faces: Vec<String>,
    },
    /// Check the census claims.
    VerifyClaims {
        /// Also run the 9- and 10-crossing planar censuses.
        #[arg(long)]
        extended: bool,
        #[arg(long, env = "DOODLE_BUDGET_SECS")]
        budget: Option<u64>,
        #[arg(long, env = "DOODLE_WORKERS")]
        workers: Option<usize>,
    },
    /// Emit a family member.
    Family {
        name: String,
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        out: OutFormat,
    },
    /// Draw in the plane with virtual crossings.
    Planarize {
        input: String,
        #[arg(long, env = "DOODLE_SEED")]
        seed: Option<u64>,
    },
    /// SVG or DOT rendering.
    Render {
        input: String,
        #[arg(long, conflicts_with = "dot", required_unless_present = "dot")]
        svg: bool,
        #[arg(long)]
        dot: bool,
    },
    /// Euler and degree identities.
    Identities { input: String },
    /// Confluence lab on random graphs or on the descent closure of a doodle.
    Confluence {
        /// Number of random graphs.
        #[arg(long, conflicts_with = "doodle_seed", required_unless_present = "doodle_seed")]
        random: Option<usize>,
        /// Descent closure of this diagram after random expansion.
        #[arg(long)]
        doodle_seed: Option<String>,
        /// Random expansion steps applied to the doodle seed.
        #[arg(long, default_value_t = 0)]
        depth: usize,
        #[arg(long, env = "DOODLE_SEED")]
        seed: Option<u64>,
        #[arg(long, env = "DOODLE_WORKERS")]
        workers: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        max_nodes: usize,
    },
}

fn mode_of(flag: Option<String>, config: &Config) -> Result<Mode, CliError> {
    match flag.or_else(|| config.mode.clone()) {
        Some(s) => s.parse().map_err(|e| CliError::Usage(format!("{e}"))),
        None => Ok(Mode::UNORIENTED),
    }
}

fn emit(map: &DoodleMap, out: OutFormat) -> String {
    match out {
        OutFormat::Json => to_json(map, Mode::UNORIENTED),
        OutFormat::Gauss => emit_gauss(map).to_string(),
        OutFormat::Pd => emit_pd(map).to_string(),
    }
}

fn seed_of(flag: Option<u64>, config: &Config) -> u64 {
    let seed = flag.or(config.seed).unwrap_or(0);
    info!("seed {seed}");
    seed
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        b = b.num_threads(w.max(1));
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let config = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Reduce { input, format, out, strategy, seed } => {
            let inp = input::load(&input, format.map(Into::into), Mode::UNORIENTED)?;
            let strategy = match strategy {
                StrategyArg::First => Strategy::First,
                StrategyArg::Greedy => Strategy::GreedyBigonFirst,
                StrategyArg::Random => Strategy::Random(seed_of(seed, &config)),
            };
            let (min, trace) = reduce_with_trace(&inp.map, strategy);
            let steps: Vec<String> = trace
                .iter()
                .map(|s| {
                    let kind = match s.kind {
                        SiteKind::Monogon => "H1-",
                        SiteKind::Bigon => "H2-",
                    };
                    format!("{kind} at {:?} -> {} crossings", s.crossings, s.crossings_after)
                })
                .collect();
            match out {
                OutFormat::Json => {
                    let map: serde_json::Value = serde_json::from_str(&to_json(&min, Mode::UNORIENTED)).expect("valid json");
                    let doc = serde_json::json!({ "trace": steps, "minimal": map });
                    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                _ => {
                    for s in &steps {
                        println!("# {s}");
                    }
                    println!("{}", emit(&min, out));
                }
            }
        }
        Command::Canon { input, format, mode } => {
            let mode = mode_of(mode, &config)?;
            let inp = input::load(&input, format.map(Into::into), mode)?;
            println!("{}", canonical_code(&inp.map, mode));
        }
        Command::Eq { first, second, mode, detour_only } => {
            let mode = mode_of(mode, &config)?;
            let a = input::load(&first, None, mode)?;
            let b = input::load(&second, None, mode)?;
            let equal = if detour_only {
                gauss_data_equal(&a.drawing(), &b.drawing(), mode).map_err(|e| CliError::Parse(e.to_string()))?
            } else {
                doodle_equal(&a.map, &b.map, mode)
            };
            println!("{}", if equal { "equal" } else { "unequal" });
            return Ok(ExitCode::from(if equal { 0 } else { 1 }));
        }
        Command::Genus { input } => {
            println!("{}", genus_of_doodle(&input::load(&input, None, Mode::UNORIENTED)?.map));
        }
        Command::Va { input } => {
            let inp = input::load(&input, None, Mode::UNORIENTED)?;
            println!("{}", virtual_area_number(&inp.drawing()).map_err(|e| CliError::Parse(e.to_string()))?);
        }
        Command::Census { n, genus, components, store, budget, workers, checkpoint, resume } => {
            let store = store.or(config.store.clone());
            let budget = budget.or(config.budget_secs);
            let workers = workers.or(config.workers);
            let mut filter = CensusFilter::new(n);
            filter.genus = genus;
            filter.components = components;
            let options = CensusOptions {
                budget: Budget { wall: budget.map(Duration::from_secs), nodes: None },
                workers,
                ..CensusOptions::default()
            };
            let checkpoint = checkpoint.unwrap_or_else(|| {
                let base = store.clone().unwrap_or_else(|| PathBuf::from("census"));
                PathBuf::from(format!("{}.checkpoint.json", base.display()))
            });
            let result = if resume {
                let text = std::fs::read_to_string(&checkpoint)
                    .map_err(|e| CliError::Io(format!("{}: {e}", checkpoint.display())))?;
                let cp = CensusCheckpoint::from_json(&text).map_err(|e| CliError::Parse(e.to_string()))?;
                if cp.filter != filter {
                    return Err(CliError::Usage("checkpoint was written for a different census".into()));
                }
                census_resume(cp, options)
            } else {
                census(filter, options)
            };
            let records = match result {
                Ok(r) => r,
                Err(CensusError::Budget { reason, checkpoint: cp }) => {
                    std::fs::write(&checkpoint, cp.to_json()).map_err(|e| CliError::Io(e.to_string()))?;
                    return Err(CliError::Budget(format!(
                        "census stopped ({reason}); progress saved to {}, rerun with --resume",
                        checkpoint.display()
                    )));
                }
                Err(e) => return Err(CliError::Usage(e.to_string())),
            };
            if resume {
                let _ = std::fs::remove_file(&checkpoint);
            }
            match store {
                Some(path) => {
                    let added = store_append(&records, &path).map_err(|e| CliError::Io(e.to_string()))?;
                    println!("{} classes, {added} new in {}", records.len(), path.display());
                }
                None => {
                    for r in &records {
                        println!("{}", serde_json::to_string(r).expect("serializable"));
                    }
                }
            }
        }
        Command::Query { store, n, genus, components, faces } => {
            let path = store.or(config.store.clone()).ok_or_else(|| CliError::Usage("no store given".into()))?;
            let faces = faces
                .iter()
                .map(|f| {
                    let (d, c) = f.split_once('=').ok_or_else(|| CliError::Usage(format!("bad face constraint `{f}`")))?;
                    let parse = |s: &str| s.parse::<usize>().map_err(|_| CliError::Usage(format!("bad face constraint `{f}`")));
                    Ok((parse(d)?, parse(c)?))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let query = CensusQuery { crossings: n, genus, components, faces };
            let records = store_query(&query, &path).map_err(|e| match e {
                CensusError::Corrupt { .. } => CliError::Parse(e.to_string()),
                other => CliError::Io(other.to_string()),
            })?;
            for r in &records {
                println!("{}", serde_json::to_string(r).expect("serializable"));
            }
        }
        Command::VerifyClaims { extended, budget, workers } => {
            let options = CensusOptions {
                budget: Budget { wall: budget.or(config.budget_secs).map(Duration::from_secs), nodes: None },
                workers: workers.or(config.workers),
                ..CensusOptions::default()
            };
            let report = verify_census_claims(extended, options);
            print!("{report}");
            if report.claims.iter().any(|c| c.status == ClaimStatus::Budget) {
                return Err(CliError::Budget("budget exhausted before all claims were checked".into()));
            }
            return Ok(ExitCode::from(if report.all_pass() { 0 } else { 1 }));
        }
        Command::Family { name, n, out } => {
            let map = doodle_core::families::family(&name, n).map_err(|e| CliError::Usage(e.to_string()))?;
            println!("{}", emit(&map, out));
        }
        Command::Planarize { input, seed } => {
            let inp = input::load(&input, None, Mode::UNORIENTED)?;
            let p = planarize_seeded(&inp.map, seed_of(seed, &config));
            println!("# virtual crossings: {}", p.virtual_crossings);
            println!("{}", p.document);
        }
        Command::Render { input, svg, dot: _ } => {
            let inp = input::load(&input, None, Mode::UNORIENTED)?;
            if svg {
                print!("{}", render_svg(&inp.drawing()));
            } else {
                print!("{}", render_dot(&inp.map));
            }
        }
        Command::Identities { input } => {
            let report = input::load(&input, None, Mode::UNORIENTED)?.map.check_identities();
            println!("{report}");
        }
        Command::Confluence { random, doodle_seed, depth, seed, workers, max_nodes } => {
            let seed = seed_of(seed, &config);
            if let Some(count) = random {
                let results: Vec<(bool, bool, bool)> = pool(workers.or(config.workers))?.install(|| {
                    (0..count)
                        .into_par_iter()
                        .map(|i| {
                            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
                            let nodes = 2 + i % 9;
                            let g = random_graph(nodes, 4, 0.35, &mut rng);
                            let ldc = check_ldc(&g, 10_000_000).unwrap_or(false);
                            (check_fdpp(&g), ldc, check_urp(&g))
                        })
                        .collect()
                });
                let ldc = results.iter().filter(|r| r.1).count();
                let urp = results.iter().filter(|r| r.2).count();
                let violations = results.iter().filter(|r| r.1 && !r.2).count();
                let fdpp = results.iter().all(|r| r.0);
                let control = two_root_peak();
                println!("graphs {count}, fdpp {fdpp}, ldc {ldc}, urp {urp}, ldc without urp {violations}");
                println!("control: {} roots, ldc {:?}", roots(&control).len(), check_ldc(&control, 1000).ok());
                return Ok(ExitCode::from(if violations == 0 && fdpp { 0 } else { 1 }));
            }
            let spec = doodle_seed.expect("clap enforces one of the two");
            let start = input::load(&spec, None, Mode::UNORIENTED)?.map;
            let expanded = random_expansion(&start, depth, &mut ChaCha8Rng::seed_from_u64(seed));
            let g = doodle_subgraph(&expanded, max_nodes).map_err(|e| CliError::Budget(e.to_string()))?;
            let r = roots(&g);
            println!("nodes {}, edges {}, roots {}", g.node_count(), g.edge_count(), r.len());
            for &x in &r {
                println!("root {} level {}", g.name(x), g.level(x));
            }
            return Ok(ExitCode::from(if r.len() == 1 { 0 } else { 1 }));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("doodle: {e}");
            ExitCode::from(e.code())
        }
    }
}
