//! The `metageo` command line: streams words or JSON instances through the
//! solvers of `metageo-core`, compares solvers against brute-force oracles,
//! and times the walk solvers.

mod bench;
mod oracle;
mod record;
mod solve;

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use metageo_core::metabelian::{self, check_kirchhoff, compute_flow};
use metageo_core::schema::{AnySteinerJson, FlowJson, WreathElementJson};
use metageo_core::words::{parse_word, word_file_entries};
use metageo_core::wreath::normal_form;
use metageo_core::{Caps, GroupSpec, OracleCaps, WalkInstance};

pub use bench::BenchRow;
pub use oracle::OracleSummary;
pub use record::{ratio, ResultRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ITEM_ERRORS: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Input lines handed to the worker pool at once.
const CHUNK: usize = 256;

#[derive(Parser, Debug)]
#[command(
    name = "metageo",
    version,
    about = "Geodesics in wreath products and free metabelian groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Wreath product such as `Z2 wr Z^2` or `Z3xZ wr Z`.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Rank of the free metabelian group.
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = SolverName::Exact)]
    pub solver: SolverName,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for generated words and instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest target or terminal count handed to an exact solver.
    #[arg(long, global = true, env = "METAGEO_MAX_EXACT")]
    pub max_exact: Option<usize>,
    /// How far exact group Steiner search may leave the groups' bounding box.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(0..))]
    pub box_margin: Option<i64>,
    /// Word-length bound for the breadth-first oracle.
    #[arg(long, global = true)]
    pub radius: Option<usize>,
    /// Input file, or `-` for standard input.
    #[arg(long, global = true, default_value = "-")]
    pub input: String,
    /// With a non-exact solver, also compute the exact value and the ratio.
    #[arg(long, global = true)]
    pub compare: bool,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Lamp configuration and cursor of each word (needs --group).
    NormalForm,
    /// Geodesic length and a geodesic word in a wreath product (needs --group).
    GeodesicWreath,
    /// Geodesic length and word in a free metabelian group (needs --rank).
    GeodesicMetabelian,
    /// Edge flow of each word (needs --rank).
    Flow,
    /// Steiner trees for JSON lines `{"terminals": ...}` or `{"groups": ...}`.
    Steiner,
    /// Minimum walks for JSON lines `{"start": ..., "targets": ..., "end": ...}`.
    Tsp,
    /// Compares a solver with breadth-first distances or with the exact solver.
    OracleCheck(OracleArgs),
    /// Times the walk solvers on seeded random instances.
    Bench(BenchArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OracleArgs {
    /// Check this many random words against the exact solver instead of
    /// enumerating every word up to --radius.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Longest sampled word.
    #[arg(long, default_value_t = 40)]
    pub max_len: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 5)]
    pub min_size: usize,
    #[arg(long, default_value_t = 18)]
    pub max_size: usize,
    /// Instances per size.
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    /// Coordinates are drawn from `[-spread, spread]`.
    #[arg(long, default_value_t = 10)]
    pub spread: i64,
    /// Print the generated instances instead of timing them.
    #[arg(long)]
    pub list_instances: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum SolverName {
    Exact,
    LineExact,
    Heuristic,
    Mst,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }

    fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

/// How a run ended when it was not aborted by a [`CliError`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Ok,
    ItemErrors,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => EXIT_OK,
            Status::ItemErrors => EXIT_ITEM_ERRORS,
        }
    }
}

/// The group a word-based command works in.
#[derive(Clone, Debug)]
pub enum Target {
    Wreath(GroupSpec),
    Metabelian(usize),
}

impl Options {
    pub fn caps(&self) -> Caps {
        let mut caps = match self.max_exact {
            Some(n) => Caps::default().with_max_exact(n),
            None => Caps::default(),
        };
        if let Some(m) = self.box_margin {
            caps.box_margin = m;
        }
        caps
    }

    fn group_spec(&self) -> Result<GroupSpec, CliError> {
        let text = self
            .group
            .as_deref()
            .ok_or_else(|| CliError::Config("this command needs --group".into()))?;
        text.parse()
            .map_err(|e: metageo_core::Error| CliError::Config(e.to_string()))
    }

    fn metabelian_rank(&self) -> Result<usize, CliError> {
        match self.rank {
            Some(0) => Err(CliError::Config("--rank must be at least 1".into())),
            Some(r) => Ok(r),
            None => Err(CliError::Config("this command needs --rank".into())),
        }
    }

    fn target(&self) -> Result<Target, CliError> {
        match (&self.group, self.rank) {
            (Some(_), None) => Ok(Target::Wreath(self.group_spec()?)),
            (None, Some(_)) => Ok(Target::Metabelian(self.metabelian_rank()?)),
            _ => Err(CliError::Config("give exactly one of --group and --rank".into())),
        }
    }

    fn check_solver(&self, target: &Target) -> Result<(), CliError> {
        match (target, self.solver) {
            (Target::Metabelian(_), SolverName::LineExact) => Err(CliError::Config(
                "line-exact is a walk solver; use exact, heuristic or mst".into(),
            )),
            (Target::Wreath(spec), SolverName::LineExact) if spec.base_rank() != 1 => Err(CliError::Config(format!(
                "line-exact needs base rank 1, `{spec}` has rank {}",
                spec.base_rank()
            ))),
            _ => Ok(()),
        }
    }

    fn open_input(&self) -> Result<Box<dyn BufRead>, CliError> {
        if self.input == "-" {
            Ok(Box::new(BufReader::new(io::stdin())))
        } else {
            let f = File::open(&self.input).map_err(CliError::io(format!("cannot open {}", self.input)))?;
            Ok(Box::new(BufReader::new(f)))
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<Status, CliError> {
    let opts = &cli.opts;
    let caps = opts.caps();
    match &cli.command {
        Command::NormalForm => {
            let spec = opts.group_spec()?;
            let alphabet = spec.alphabet();
            stream_words(opts, out, |line, text| {
                let element = parse_word(text, &alphabet).and_then(|w| normal_form(&w, &spec))?;
                let mut r = ResultRecord::new(line, text);
                r.method = "normal-form".into();
                r.element = Some(WreathElementJson::from_element(&element));
                Ok(r)
            })
        }
        Command::GeodesicWreath => {
            let spec = opts.group_spec()?;
            let target = Target::Wreath(spec.clone());
            opts.check_solver(&target)?;
            let alphabet = spec.alphabet();
            stream_words(opts, out, |line, text| {
                let w = parse_word(text, &alphabet)?;
                let mut r = ResultRecord::new(line, text);
                let outcome = solve::wreath(&w, &spec, opts.solver, &caps)?;
                let compare = opts.compare && !outcome.exact;
                solve::fill(&mut r, outcome);
                if compare {
                    if let Some(exact) = exact_reference(&w, &target, &caps) {
                        r.set_exact(exact);
                    }
                }
                Ok(r)
            })
        }
        Command::GeodesicMetabelian => {
            let rank = opts.metabelian_rank()?;
            let target = Target::Metabelian(rank);
            opts.check_solver(&target)?;
            let alphabet = metabelian::alphabet(rank);
            stream_words(opts, out, |line, text| {
                let w = parse_word(text, &alphabet)?;
                let mut r = ResultRecord::new(line, text);
                let outcome = solve::metabelian(&w, rank, opts.solver, &caps)?;
                let compare = opts.compare && !outcome.exact;
                solve::fill(&mut r, outcome);
                if compare {
                    if let Some(exact) = exact_reference(&w, &target, &caps) {
                        r.set_exact(exact);
                    }
                }
                Ok(r)
            })
        }
        Command::Flow => {
            let rank = opts.metabelian_rank()?;
            let alphabet = metabelian::alphabet(rank);
            stream_words(opts, out, |line, text| {
                let f = compute_flow(&parse_word(text, &alphabet)?, rank)?;
                let mut r = ResultRecord::new(line, text);
                r.method = "flow".into();
                r.kirchhoff = Some(check_kirchhoff(&f));
                r.flow = Some(FlowJson::from_flow(&f));
                Ok(r)
            })
        }
        Command::Steiner => {
            if opts.solver == SolverName::LineExact {
                return Err(CliError::Config("line-exact is a walk solver".into()));
            }
            stream_json(opts, out, |line, text| {
                let inst: AnySteinerJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
                let mut r = ResultRecord::new(line, text);
                let compare_with = if opts.compare { Some(inst.clone()) } else { None };
                let (tree, exact, method) = solve::steiner(inst, opts.solver, &caps).map_err(|e| e.to_string())?;
                solve::tree_record(&mut r, &tree, exact, method);
                if let (false, Some(inst)) = (exact, compare_with) {
                    if let Ok((t, true, _)) = solve::steiner(inst, SolverName::Exact, &caps) {
                        r.set_exact(t.total_length);
                    }
                }
                Ok(r)
            })
        }
        Command::Tsp => stream_json(opts, out, |line, text| {
            let inst: WalkInstance = serde_json::from_str(text).map_err(|e| e.to_string())?;
            let mut r = ResultRecord::new(line, text);
            let (sol, exact, method) = solve::tsp(&inst, opts.solver, &caps).map_err(|e| e.to_string())?;
            r.set_value(sol.length, exact);
            r.method = method;
            r.walk = Some(sol);
            if opts.compare && !exact {
                if let Ok((best, true, _)) = solve::tsp(&inst, SolverName::Exact, &caps) {
                    r.set_exact(best.length);
                }
            }
            Ok(r)
        }),
        Command::OracleCheck(args) => {
            let target = opts.target()?;
            opts.check_solver(&target)?;
            let summary = oracle::run(opts, args, &target, &caps)?;
            let text = match opts.format {
                Format::Json => serde_json::to_string(&summary).expect("plain data serializes"),
                Format::Text => summary.to_text(),
            };
            writeln!(out, "{text}").map_err(CliError::io("cannot write output"))?;
            Ok(if summary.passed() {
                Status::Ok
            } else {
                Status::ItemErrors
            })
        }
        Command::Bench(args) => {
            bench::run(opts, args, &caps, out)?;
            Ok(Status::Ok)
        }
    }
}

/// Exact geodesic length without any fallback, if within caps.
fn exact_reference(w: &metageo_core::Word, target: &Target, caps: &Caps) -> Option<u64> {
    let outcome = match target {
        Target::Wreath(spec) => solve::wreath(w, spec, SolverName::Exact, caps),
        Target::Metabelian(rank) => solve::metabelian(w, *rank, SolverName::Exact, caps),
    };
    match outcome {
        Ok(o) if o.exact => Some(o.value),
        _ => None,
    }
}

fn stream_words<F>(opts: &Options, out: &mut dyn Write, f: F) -> Result<Status, CliError>
where
    F: Fn(usize, &str) -> metageo_core::Result<ResultRecord> + Sync,
{
    stream(opts, out, false, |line, text| f(line, text).map_err(|e| e.to_string()))
}

/// Like [`stream_words`] but for JSON lines; blank lines are skipped.
fn stream_json<F>(opts: &Options, out: &mut dyn Write, f: F) -> Result<Status, CliError>
where
    F: Fn(usize, &str) -> Result<ResultRecord, String> + Sync,
{
    stream(opts, out, true, f)
}

/// Reads the input in chunks, evaluates each chunk in parallel and writes
/// the records in input order.
fn stream<F>(opts: &Options, out: &mut dyn Write, skip_blank: bool, f: F) -> Result<Status, CliError>
where
    F: Fn(usize, &str) -> Result<ResultRecord, String> + Sync,
{
    let input = opts.open_input()?;
    let mut entries = word_file_entries(input);
    let mut status = Status::Ok;
    loop {
        let mut chunk = Vec::with_capacity(CHUNK);
        for entry in entries.by_ref() {
            let (line, text) = entry.map_err(CliError::io(format!("cannot read {}", opts.input)))?;
            if skip_blank && text.is_empty() {
                continue;
            }
            chunk.push((line, text));
            if chunk.len() == CHUNK {
                break;
            }
        }
        if chunk.is_empty() {
            return Ok(status);
        }
        let records: Vec<ResultRecord> = chunk
            .par_iter()
            .map(|(line, text)| {
                let start = Instant::now();
                let mut r = f(*line, text).unwrap_or_else(|e| ResultRecord::failed(*line, text, e));
                r.wall_ms = start.elapsed().as_secs_f64() * 1e3;
                r
            })
            .collect();
        for r in records {
            if r.is_error() {
                status = Status::ItemErrors;
            }
            let text = match opts.format {
                Format::Json => serde_json::to_string(&r).expect("plain data serializes"),
                Format::Text => r.to_text(),
            };
            writeln!(out, "{text}").map_err(CliError::io("cannot write output"))?;
        }
    }
}

fn oracle_caps() -> OracleCaps {
    OracleCaps::default()
}
