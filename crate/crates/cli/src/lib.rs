//! Command-line front end for `cycle-lists`.
//!
//! `run` takes the argument vector and two sinks so that tests can drive the
//! whole interface in-process. Exit codes: 0 on success, 1 on invalid input,
//! 2 when an internal check fails (for instance a colouring that does not
//! verify).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use cycle_lists::constructive::{
    constructive_colouring, gadget_colouring, is_good_scheme, GoodSchemeConfig,
};
use cycle_lists::experiment::{
    estimate_cell, regime_sweep, rows_to_csv, s_from_t, sample_clique_counts, Method, PaletteRule,
    RunOptions, SweepRow,
};
use cycle_lists::solver::chromatic_facts_check;
use cycle_lists::{
    decide_colourable, verify_colouring, ColourScheme, Colouring, CyclePower, Error, SchemeParams,
};

#[derive(Debug, Parser)]
#[command(
    name = "cycle-lists",
    version,
    about = "Random list colouring of cycle powers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the colourability probability for one (n, k, c, s).
    Simulate(SimulateArgs),
    /// Estimate over a grid of n and palette sizes.
    Sweep(SweepArgs),
    /// Sample identical-list clique counts and test them against Poisson.
    Poisson(PoissonArgs),
    /// Decide a scheme file exactly.
    Solve(FileArgs),
    /// Colour a scheme file with a constructive method.
    Colour(GoodArgs),
    /// Report the good-scheme conditions of a scheme file.
    CheckGood(GoodArgs),
    /// Compute the chromatic number and compare it with the divisibility rule.
    Chi(ChiArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    ConstructiveFirst,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::ConstructiveFirst => Method::ConstructiveFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    trials: u64,
    /// Master seed; trial i uses stream i.
    #[arg(long)]
    seed: u64,
    /// Worker threads (0 = all cores). Never changes results.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write data here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: usize,
    #[arg(long, conflicts_with = "t", required_unless_present = "t")]
    s: Option<usize>,
    /// Scaling constant: s = max(c, round(t n^(1/c^2))).
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Spacing exponent for the constructive method.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: usize,
    /// Comma-separated cycle lengths.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated palette sizes.
    #[arg(
        long = "s",
        value_delimiter = ',',
        conflicts_with = "t_list",
        required_unless_present = "t_list"
    )]
    s_list: Vec<usize>,
    /// Comma-separated scaling constants.
    #[arg(long = "t", value_delimiter = ',')]
    t_list: Vec<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct PoissonArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    c: usize,
    #[arg(long, conflicts_with = "t", required_unless_present = "t")]
    s: Option<usize>,
    #[arg(long)]
    t: Option<f64>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct FileArgs {
    /// Scheme file: header `n k c s`, then one list per vertex.
    scheme: PathBuf,
}

#[derive(Debug, Args)]
struct GoodArgs {
    scheme: PathBuf,
    /// Spacing exponent; defaults to one more than the threshold for c.
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Debug, Args)]
struct ChiArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the subcommand, writing data
/// to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out, err),
        Command::Sweep(a) => sweep(a, out, err),
        Command::Poisson(a) => poisson(a, out, err),
        Command::Solve(a) => solve(a, out),
        Command::Colour(a) => colour(a, out),
        Command::CheckGood(a) => check_good(a, out),
        Command::Chi(a) => chi(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Internal(msg)) => {
            let _ = writeln!(err, "internal error: {msg}");
            2
        }
    }
}

fn options(method: MethodArg, d: Option<f64>, jobs: usize) -> Result<RunOptions, Failure> {
    Ok(RunOptions {
        method: method.into(),
        jobs,
        config: d.map(GoodSchemeConfig::with_d).transpose()?,
    })
}

fn emit(data: &str, output: Option<&Path>, out: &mut dyn Write) -> Outcome {
    match output {
        Some(path) => fs::write(path, data)
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(data.as_bytes())
            .map_err(|e| Failure::Internal(format!("cannot write output: {e}"))),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Internal(format!("serialisation failed: {e}")))
}

fn render_rows(rows: &[SweepRow], format: Format) -> Result<String, Failure> {
    match format {
        Format::Csv => Ok(rows_to_csv(rows)),
        Format::Json => to_json(&rows),
    }
}

fn palette(n: usize, c: usize, s: Option<usize>, t: Option<f64>) -> Result<usize, Failure> {
    match (s, t) {
        (Some(s), None) => Ok(s),
        (None, Some(t)) => Ok(s_from_t(n, c, t)?),
        _ => Err(Failure::Input("give exactly one of --s and --t".into())),
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = palette(a.n, a.c, a.s, a.t)?;
    let opts = options(a.method, a.d, a.run.jobs)?;
    let _ = writeln!(
        err,
        "simulate n={} k={} c={} s={s} trials={}",
        a.n, a.k, a.c, a.run.trials
    );
    let row = estimate_cell(a.n, a.k, a.c, s, a.t, a.run.trials, a.run.seed, &opts)?;
    emit(
        &render_rows(&[row], a.format)?,
        a.run.output.as_deref(),
        out,
    )
}

fn sweep(a: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let rule = if a.t_list.is_empty() {
        PaletteRule::Fixed(a.s_list)
    } else {
        PaletteRule::Scaling(a.t_list)
    };
    let opts = options(a.method, a.d, a.run.jobs)?;
    let _ = writeln!(
        err,
        "sweep k={} c={} over {} values of n, trials={}",
        a.k,
        a.c,
        a.n_list.len(),
        a.run.trials
    );
    let rows = regime_sweep(a.c, a.k, &a.n_list, &rule, a.run.trials, a.run.seed, &opts)?;
    emit(&render_rows(&rows, a.format)?, a.run.output.as_deref(), out)
}

fn poisson(a: PoissonArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = palette(a.n, a.c, a.s, a.t)?;
    let g = CyclePower::new(a.n, a.k)?;
    let params = SchemeParams::new(a.c, s)?;
    let _ = writeln!(
        err,
        "poisson n={} k={} c={} s={s} trials={}",
        a.n, a.k, a.c, a.run.trials
    );
    let fit = sample_clique_counts(&g, params, a.run.trials, a.run.seed, a.run.jobs)?;
    emit(&to_json(&fit)?, a.run.output.as_deref(), out)
}

fn load(path: &Path) -> Result<(CyclePower, ColourScheme), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    ColourScheme::parse_text(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn checked(g: &CyclePower, scheme: &ColourScheme, col: &Colouring) -> Outcome {
    if verify_colouring(g, scheme, col) {
        Ok(())
    } else {
        Err(Failure::Internal(format!(
            "produced colouring does not verify: {}",
            col.to_line()
        )))
    }
}

fn solve(a: FileArgs, out: &mut dyn Write) -> Outcome {
    let (g, scheme) = load(&a.scheme)?;
    let outcome = decide_colourable(&g, &scheme)?;
    let line = match (outcome.colourable, outcome.witness) {
        (true, Some(col)) => {
            checked(&g, &scheme, &col)?;
            format!("COLOURABLE {}\n", col.to_line())
        }
        (true, None) => {
            return Err(Failure::Internal(
                "colourable verdict without a witness".into(),
            ))
        }
        (false, _) => "NOT_COLOURABLE\n".to_string(),
    };
    emit(&line, None, out)
}

fn config_for(c: usize, d: Option<f64>) -> Result<GoodSchemeConfig, Failure> {
    Ok(match d {
        Some(d) => GoodSchemeConfig::with_d(d)?,
        None => GoodSchemeConfig::faithful(c)?,
    })
}

fn colour(a: GoodArgs, out: &mut dyn Write) -> Outcome {
    let (g, scheme) = load(&a.scheme)?;
    let (c, s, k) = (scheme.c(), scheme.s(), g.k());
    let result = if c == k + 1 && s == k + 2 {
        gadget_colouring(&g, &scheme)?
    } else if c <= k {
        constructive_colouring(&g, &scheme, &config_for(c, a.d)?)?
    } else {
        return Err(Failure::Input(format!(
            "no constructive method for c = {c}, k = {k}, s = {s}; use `solve`"
        )));
    };
    let line = match result {
        Some(col) => {
            checked(&g, &scheme, &col)?;
            format!("COLOURED {}\n", col.to_line())
        }
        None => "NO_CONSTRUCTION\n".to_string(),
    };
    emit(&line, None, out)
}

fn check_good(a: GoodArgs, out: &mut dyn Write) -> Outcome {
    let (g, scheme) = load(&a.scheme)?;
    let report = is_good_scheme(&g, &scheme, &config_for(scheme.c(), a.d)?)?;
    emit(&to_json(&report)?, None, out)
}

fn chi(a: ChiArgs, out: &mut dyn Write) -> Outcome {
    let g = CyclePower::new(a.n, a.k)?;
    let facts = chromatic_facts_check(&g)?;
    emit(
        &format!("chi={} consistent={}\n", facts.chi, facts.consistent),
        None,
        out,
    )
}
