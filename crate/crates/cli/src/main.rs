//! `centered-bound`: area lower bounds for centered dual two-cells.

mod output;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use centered_bound::forest_io::{self, ForestLibrary, FOREST_ENV};
use centered_bound::search::{SearchPlan, TreeSource};
use centered_bound::{closed_forms, enumerate_trees, flat_bound, Error, HalfSinhLength};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::{fmt_sig15, fmt_truncated, render_ascii, OutputRecord, QueryEcho};

#[derive(Debug, Parser)]
#[command(
    name = "centered-bound",
    version,
    about = "Lower bounds on areas of centered dual two-cells"
)]
struct Cli {
    /// Maximum number of worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the bound for one tuple of side-length bounds.
    Bound(BoundArgs),
    /// Compare the bound with the uniform (n−2)·A_m(d) bound for a range of n.
    Table(TableArgs),
    /// Sweep the last entry of (fixed…, x) and report the bound per x.
    Sweep(SweepArgs),
    /// List or count the rooted trees used for n-edged cells.
    Trees(TreesArgs),
    /// Validate or generate tree catalog files.
    #[command(subcommand)]
    Forest(ForestCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Convention {
    /// Each value is sinh(ℓ/2) for a side length ℓ.
    SinhHalf,
    /// Each value is a raw hyperbolic length ℓ.
    Length,
}

impl Convention {
    fn name(self) -> &'static str {
        match self {
            Convention::SinhHalf => "sinh-half",
            Convention::Length => "length",
        }
    }

    fn convert(self, x: f64) -> Result<HalfSinhLength, Error> {
        match self {
            Convention::SinhHalf => HalfSinhLength::new(x),
            Convention::Length => HalfSinhLength::from_length(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct SearchOptions {
    /// How input values encode lengths.
    #[arg(long, value_enum, default_value = "sinh-half")]
    convention: Convention,
    /// Search every permutation instead of one per symmetry orbit.
    #[arg(long)]
    no_reduce: bool,
    /// Tree catalog to use instead of native enumeration (overrides $CENTERED_BOUND_FOREST).
    #[arg(long, value_name = "PATH")]
    forest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Lower bounds on the side lengths (at least three).
    #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
    values: Vec<f64>,
    #[command(flatten)]
    search: SearchOptions,
    /// Decimal places kept (by truncation) in the displayed bound.
    #[arg(long, default_value_t = 3)]
    truncate: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Include wall-clock time in the output.
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, default_value_t = 4)]
    n_min: usize,
    #[arg(long, default_value_t = 9)]
    n_max: usize,
    /// The common bound for every edge.
    #[arg(long, default_value_t = 1.0)]
    value: f64,
    /// Largest n the command will search.
    #[arg(long, default_value_t = 9)]
    cap: usize,
    #[command(flatten)]
    search: SearchOptions,
    #[arg(long, default_value_t = 3)]
    truncate: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("grid").required(true).args(["step", "points"]))]
struct SweepArgs {
    /// Entries held fixed; the swept value is appended as the last entry.
    #[arg(long, num_args = 1.., default_values_t = [1.0, 1.0, 1.0])]
    fixed: Vec<f64>,
    #[arg(long)]
    from: f64,
    #[arg(long)]
    to: f64,
    /// Spacing between consecutive x values.
    #[arg(long)]
    step: Option<f64>,
    /// Number of evenly spaced x values, endpoints included.
    #[arg(long)]
    points: Option<usize>,
    #[command(flatten)]
    search: SearchOptions,
    #[arg(long, default_value_t = 3)]
    truncate: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeFormat {
    Code,
    Ascii,
}

#[derive(Debug, Args)]
struct TreesArgs {
    /// Number of frontier edges (polygon edge count).
    #[arg(long)]
    n: usize,
    /// Print only the number of trees.
    #[arg(long, conflicts_with = "list")]
    count: bool,
    /// Print every tree (default).
    #[arg(long)]
    list: bool,
    #[arg(long, value_enum, default_value = "code")]
    format: TreeFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CatalogFormat {
    /// Key line plus reversed codes.
    Forest,
    /// Self-describing sections in natural code order.
    Catalog,
}

#[derive(Debug, Subcommand)]
enum ForestCommand {
    /// Check a catalog file and report its section counts.
    Validate { path: PathBuf },
    /// Write a catalog from native enumeration.
    Generate {
        #[arg(long)]
        max_n: usize,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long, value_enum, default_value = "forest")]
        format: CatalogFormat,
    },
}

/// A failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::MissingCatalog { .. } | Error::Parse(_) => 3,
            Error::Domain { .. } => 4,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<String, Failure>;

fn tree_source(opts: &SearchOptions) -> Result<(TreeSource, String), Failure> {
    let path = opts
        .forest
        .clone()
        .or_else(|| std::env::var_os(FOREST_ENV).map(PathBuf::from));
    match path {
        None => Ok((TreeSource::Native, "native".into())),
        Some(p) => {
            let lib = ForestLibrary::load(&p).map_err(|e| Failure {
                code: 3,
                message: format!("{}: {e}", p.display()),
            })?;
            Ok((TreeSource::Catalog(Arc::new(lib)), p.display().to_string()))
        }
    }
}

fn convert_all(values: &[f64], convention: Convention) -> Result<Vec<HalfSinhLength>, Failure> {
    values
        .iter()
        .map(|&x| convention.convert(x).map_err(Failure::from))
        .collect()
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    if args.values.len() < 3 {
        return Err(Failure::usage(format!(
            "need at least 3 values, got {}",
            args.values.len()
        )));
    }
    let bounds = convert_all(&args.values, args.search.convention)?;
    let (source, source_name) = tree_source(&args.search)?;
    let reduce = !args.search.no_reduce;
    let start = Instant::now();
    let plan = SearchPlan::new(bounds.len(), &source, reduce)?;
    let result = plan.run(&bounds)?;
    let elapsed = start.elapsed().as_secs_f64();

    let query = QueryEcho {
        bounds: args.values.clone(),
        convention: args.search.convention.name(),
        half_sinh: bounds.iter().map(|b| output::sig15(b.get())).collect(),
        reduce_symmetry: reduce,
        tree_source: source_name,
    };
    let mut record = OutputRecord::new(query, &bounds, &result, args.truncate);
    if args.timing {
        record.elapsed_seconds = Some(elapsed);
    }
    Ok(match args.format {
        Format::Text => record.text(),
        Format::Csv => record.csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&record).expect("record serializes");
            s.push('\n');
            s
        }
    })
}

fn cmd_table(args: &TableArgs) -> CmdResult {
    if !(4 <= args.n_min && args.n_min <= args.n_max && args.n_max <= args.cap) {
        return Err(Failure::usage(format!(
            "need 4 ≤ n-min ≤ n-max ≤ cap, got n-min {}, n-max {}, cap {}",
            args.n_min, args.n_max, args.cap
        )));
    }
    let d = args.search.convention.convert(args.value)?;
    let (source, _) = tree_source(&args.search)?;
    let digits = args.truncate;
    let mut out = String::new();
    match args.format {
        TableFormat::Text => {
            let _ = writeln!(out, "{:>3}  {:>10}  {:>10}  tree", "n", "(n-2)A_m", "bound");
        }
        TableFormat::Csv => {
            out.push_str("n,flat_bound,flat_bound_truncated,bound,bound_truncated,witness_tree,witness_index\n");
        }
    }
    for n in args.n_min..=args.n_max {
        let flat = flat_bound(n, d)?;
        let result = SearchPlan::new(n, &source, !args.search.no_reduce)?.run(&vec![d; n])?;
        match args.format {
            TableFormat::Text => {
                let _ = writeln!(
                    out,
                    "{n:>3}  {:>10}  {:>10}  {} #{}",
                    fmt_truncated(flat, digits),
                    fmt_truncated(result.value, digits),
                    result.witness_tree,
                    result.witness_index
                );
            }
            TableFormat::Csv => {
                let _ = writeln!(
                    out,
                    "{n},{},{},{},{},\"{}\",{}",
                    fmt_sig15(flat),
                    fmt_truncated(flat, digits),
                    fmt_sig15(result.value),
                    fmt_truncated(result.value, digits),
                    result.witness_tree,
                    result.witness_index
                );
            }
        }
    }
    Ok(out)
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, Failure> {
    if !(args.from.is_finite() && args.to.is_finite() && args.from <= args.to) {
        return Err(Failure::usage("sweep range must satisfy from ≤ to"));
    }
    match (args.step, args.points) {
        (Some(step), None) => {
            if !(step.is_finite() && step > 0.0) {
                return Err(Failure::usage("step must be positive"));
            }
            let count = ((args.to - args.from) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| args.from + i as f64 * step).collect())
        }
        (None, Some(points)) => match points {
            0 => Err(Failure::usage("points must be at least 1")),
            1 => Ok(vec![args.from]),
            _ => Ok((0..points)
                .map(|i| args.from + (args.to - args.from) * i as f64 / (points - 1) as f64)
                .collect()),
        },
        _ => Err(Failure::usage("give exactly one of --step or --points")),
    }
}

fn cmd_sweep(args: &SweepArgs) -> CmdResult {
    let grid = sweep_grid(args)?;
    let convention = args.search.convention;
    let fixed = convert_all(&args.fixed, convention)?;
    if fixed.len() < 2 {
        return Err(Failure::usage("need at least two fixed entries"));
    }
    let n = fixed.len() + 1;
    let (source, _) = tree_source(&args.search)?;
    let plan = SearchPlan::new(n, &source, !args.search.no_reduce)?;
    // The closed forms describe (1, 1, 1, X) in the half-sinh convention.
    let has_closed_form = fixed.iter().all(|b| b.get() == 1.0) && fixed.len() == 3;

    let mut out =
        String::from("x,X,value,value_truncated,identity_case,sigma_case,closed_form,difference\n");
    for x in grid {
        let big = convention.convert(x)?;
        let mut bounds = fixed.clone();
        bounds.push(big);
        let result = plan.run(&bounds)?;
        let _ = write!(
            out,
            "{},{},{},{}",
            fmt_sig15(x),
            fmt_sig15(big.get()),
            fmt_sig15(result.value),
            fmt_truncated(result.value, args.truncate)
        );
        if has_closed_form {
            let xx = big.get();
            let closed = closed_forms::piecewise_minimum(xx);
            let _ = writeln!(
                out,
                ",{},{},{},{:e}",
                fmt_sig15(closed_forms::identity_case(xx)),
                fmt_sig15(closed_forms::sigma_case(xx)),
                fmt_sig15(closed),
                output::sig15(result.value - closed)
            );
        } else {
            out.push_str(",,,,\n");
        }
    }
    Ok(out)
}

fn cmd_trees(args: &TreesArgs) -> CmdResult {
    let codes = enumerate_trees(args.n)?;
    if args.count {
        return Ok(format!("{}\n", codes.len()));
    }
    let mut out = String::new();
    for (i, c) in codes.iter().enumerate() {
        match args.format {
            TreeFormat::Code => {
                let _ = writeln!(out, "{c}");
            }
            TreeFormat::Ascii => {
                let _ = writeln!(out, "#{} {c}", i + 1);
                out.push_str(&render_ascii(&c.tree()));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
    }
}

fn cmd_forest(cmd: &ForestCommand) -> CmdResult {
    match cmd {
        ForestCommand::Validate { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            let lib = forest_io::parse_any(&text).map_err(|e| io_failure(path, e))?;
            let mut out = format!("{}: ok\n", path.display());
            for (k, count) in lib.counts() {
                let _ = writeln!(out, "k={k} n={} count={count}", k + 3);
            }
            Ok(out)
        }
        ForestCommand::Generate {
            max_n,
            output,
            format,
        } => {
            if *max_n < 3 {
                return Err(Failure::usage("max-n must be at least 3"));
            }
            let lib = ForestLibrary::native(*max_n);
            let text = match format {
                CatalogFormat::Forest => forest_io::write_forest(&lib, max_n - 3),
                CatalogFormat::Catalog => forest_io::write_catalog(&lib, max_n - 3),
            };
            std::fs::write(output, text).map_err(|e| io_failure(output, e))?;
            let counts: Vec<String> = lib.counts().iter().map(|(_, c)| c.to_string()).collect();
            Ok(format!(
                "wrote {} (counts {})\n",
                output.display(),
                counts.join(",")
            ))
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Bound(a) => cmd_bound(a),
        Command::Table(a) => cmd_table(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Trees(a) => cmd_trees(a),
        Command::Forest(c) => cmd_forest(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.jobs {
        Some(0) => Err(Failure::usage("--jobs must be at least 1")),
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::usage(e.to_string())),
        },
        None => run(&cli),
    };
    match outcome {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
