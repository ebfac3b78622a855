use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entropy_bounds::bounds::{self, BoundResult};
use entropy_bounds::extremal::{self, ExtremalPair};
use entropy_bounds::figures::{self, log_grid};
use entropy_bounds::gibbs::EnergySequence;
use entropy_bounds::majdim::{self, MajDimOptions};
use entropy_bounds::report::{fmt_sig, Table};
use entropy_bounds::verify::{self, FuzzConfig, FuzzReport};
use entropy_bounds::{io, Error, Execution, ProbDist};
use serde_json::json;

#[derive(Parser)]
#[command(name = "entbound", version, about = "Entropy semicontinuity bounds under partial majorization")]
struct Cli {
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    /// Run sweeps on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    /// Write output here instead of standard output.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a rank or energy bound over one ε or an ε grid.
    Bound(BoundArgs),
    /// Upper bound on the ε-sufficient majorization dimension.
    Majdim(MajdimArgs),
    /// Build a near-optimal witness pair and report its gap.
    Extremal(ExtremalArgs),
    /// Write the CSV data behind a figure.
    Figure(FigureArgs),
    /// Run a verification suite; exit code 1 on any violation.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SequenceArgs {
    /// Use the number operator spectrum {0, 1, 2, ...}.
    #[arg(long, conflicts_with = "h_file")]
    oscillator: bool,
    /// Energy sequence JSON: {"prefix": [...], "step": s} or "oscillator".
    #[arg(long)]
    h_file: Option<PathBuf>,
}

impl SequenceArgs {
    fn given(&self) -> bool {
        self.oscillator || self.h_file.is_some()
    }

    fn load(&self) -> Result<EnergySequence, CliError> {
        match (&self.h_file, self.oscillator) {
            (Some(path), _) => io::read_sequence(path).map_err(|e| usage(format!("{}: {e}", path.display()))),
            (None, true) => Ok(EnergySequence::oscillator()),
            (None, false) => Err(usage("an energy sequence is required (--oscillator or --h-file)")),
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Single ε value.
    #[arg(long, conflicts_with = "eps_grid")]
    eps: Option<f64>,
    /// Log-spaced grid LO:HI:N (default 1e-4:1:200).
    #[arg(long)]
    eps_grid: Option<String>,
}

impl GridArgs {
    fn grid(&self) -> Result<Vec<f64>, CliError> {
        if let Some(e) = self.eps {
            return Ok(vec![e]);
        }
        match &self.eps_grid {
            None => Ok(figures::default_eps_grid()),
            Some(spec) => parse_grid(spec),
        }
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || usage(format!("--eps-grid expects LO:HI:N, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo && hi <= 1.0 && n >= 1) {
        return Err(usage(format!("--eps-grid needs 0 < LO ≤ HI ≤ 1 and N ≥ 1, got {spec:?}")));
    }
    Ok(log_grid(lo, hi, n))
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BoundArgs {
    /// Rank-constrained bound.
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy")]
    rank: bool,
    /// Expectation-constrained bound.
    #[arg(long)]
    energy: bool,
    /// Rank of the state (defaults to the support of --spectrum-file).
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    seq: SequenceArgs,
    /// E_m, the energy above the first m + 1 levels (the full mean energy also
    /// works and gives a looser bound).
    #[arg(long = "E", conflicts_with = "spectrum_file")]
    e: Option<f64>,
    /// Spectrum of the state: one probability per line or a JSON array.
    #[arg(long)]
    spectrum_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Use the state-dependent refinement (needs --spectrum-file).
    #[arg(long, requires = "spectrum_file")]
    state_dependent: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct MajdimArgs {
    #[command(flatten)]
    seq: SequenceArgs,
    #[arg(long = "E")]
    e: f64,
    #[command(flatten)]
    grid: GridArgs,
    /// Let the search start at m = 0.
    #[arg(long)]
    include_zero: bool,
    /// Use F_h instead of F_{h_m} (looser).
    #[arg(long)]
    fallback: bool,
}

#[derive(Args)]
struct ExtremalArgs {
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy")]
    rank: bool,
    #[arg(long)]
    energy: bool,
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    seq: SequenceArgs,
    /// E_m for the energy witness.
    #[arg(long = "E")]
    e: Option<f64>,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long)]
    eps: f64,
}

#[derive(Args)]
struct FigureArgs {
    /// Figure number, 1 to 6.
    #[arg(long)]
    id: u8,
    /// Log-spaced grid LO:HI:N (default 1e-4:1:200; figure 3 uses its own).
    #[arg(long)]
    eps_grid: Option<String>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Suite {
    Fuzz,
    Identities,
    Reduction,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

enum CliError {
    Usage(String),
    Verification(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

struct Ctx {
    unit: f64,
    exec: Execution,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        unit: if cli.bits { std::f64::consts::LN_2 } else { 1.0 },
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
    };
    let result = match &cli.command {
        Command::Bound(a) => cmd_bound(a, &ctx),
        Command::Majdim(a) => cmd_majdim(a, &ctx),
        Command::Extremal(a) => cmd_extremal(a, &ctx),
        Command::Figure(a) => cmd_figure(a, &ctx),
        Command::Verify(a) => cmd_verify(a),
    };
    let (text, failure) = match result {
        Ok(text) => (text, None),
        Err(CliError::Verification(text)) => (text, Some(ExitCode::from(1))),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(cli.out.as_deref(), &text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    failure.unwrap_or(ExitCode::SUCCESS)
}

fn emit(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn load_spectrum(path: &Path) -> Result<ProbDist, CliError> {
    io::read_spectrum(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// `x` rounded to nine significant digits, for JSON output.
fn r9(x: f64) -> f64 {
    fmt_sig(x).parse().unwrap_or(x)
}

fn opt_num(x: Option<f64>, unit: f64) -> String {
    x.map(|v| fmt_sig(v / unit)).unwrap_or_default()
}

fn bound_rows(results: &[BoundResult], unit: f64, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("eps,value,branch,x_star\n");
            for r in results {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_sig(r.inputs.eps),
                    fmt_sig(r.value / unit),
                    r.branch.as_str(),
                    opt_num(r.x_star, 1.0)
                ));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = results
                .iter()
                .map(|r| {
                    json!({
                        "eps": r9(r.inputs.eps),
                        "value": r9(r.value / unit),
                        "branch": r.branch.as_str(),
                        "x_star": r.x_star.map(r9),
                        "inputs": r.inputs,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("serializable") + "\n"
        }
    }
}

fn cmd_bound(a: &BoundArgs, ctx: &Ctx) -> Result<String, CliError> {
    let grid = a.grid.grid()?;
    let spectrum = a.spectrum_file.as_deref().map(load_spectrum).transpose()?;
    let results: Vec<Result<BoundResult, Error>> = if a.rank {
        if a.seq.given() || a.e.is_some() {
            return Err(usage("--rank does not take an energy sequence or --E"));
        }
        let d = match (a.d, &spectrum) {
            (Some(d), _) => d,
            (None, Some(p)) => p.support_size(),
            (None, None) => return Err(usage("--rank needs --d or --spectrum-file")),
        };
        match (&spectrum, a.state_dependent) {
            (Some(p), true) => ctx.exec.map(&grid, |&eps| bounds::rank_bound_sd(p, a.m, eps)),
            _ => ctx.exec.map(&grid, |&eps| bounds::rank_bound(d, a.m, eps)),
        }
    } else {
        if a.d.is_some() {
            return Err(usage("--d only applies to --rank"));
        }
        let h = a.seq.load()?;
        let is_osc = h == EnergySequence::oscillator();
        let tail = h.drop_prefix(a.m + 1);
        match (&spectrum, a.state_dependent) {
            (Some(p), true) if is_osc => ctx.exec.map(&grid, |&eps| bounds::oscillator_bound_sd(p, a.m, eps)),
            (Some(p), true) => ctx.exec.map(&grid, |&eps| bounds::energy_bound_sd(p, &tail, a.m, eps)),
            _ => {
                let e_m = match (&spectrum, a.e) {
                    (Some(p), _) => bounds::quantum_energy_params(p, &h, a.m).e_m,
                    (None, Some(e)) => e,
                    (None, None) => return Err(usage("--energy needs --E or --spectrum-file")),
                };
                if is_osc {
                    ctx.exec.map(&grid, |&eps| bounds::oscillator_bound(e_m, a.m, eps, true))
                } else {
                    ctx.exec.map(&grid, |&eps| bounds::energy_bound(&tail, e_m, eps))
                }
            }
        }
    };
    let results: Vec<BoundResult> = results.into_iter().collect::<Result<_, _>>()?;
    Ok(bound_rows(&results, ctx.unit, a.format))
}

fn cmd_majdim(a: &MajdimArgs, ctx: &Ctx) -> Result<String, CliError> {
    let h = a.seq.load()?;
    let grid = a.grid.grid()?;
    let opts = MajDimOptions { include_zero: a.include_zero, fallback: a.fallback };
    let rows = majdim::majdim_sweep(&h, a.e, &grid, opts, ctx.exec)?;
    let mut out = String::from("eps,m_bound,lhs,rhs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_sig(r.eps),
            r.m_bound,
            fmt_sig(r.lhs_at_m / ctx.unit),
            fmt_sig(r.rhs / ctx.unit)
        ));
    }
    Ok(out)
}

fn cmd_extremal(a: &ExtremalArgs, ctx: &Ctx) -> Result<String, CliError> {
    let (pair, bound): (ExtremalPair, f64) = if a.rank {
        let d = a.d.ok_or_else(|| usage("--rank needs --d"))?;
        (extremal::extremal_pair_rank(d, a.m, a.eps)?, bounds::rank_bound(d, a.m, a.eps)?.value)
    } else {
        let h = a.seq.load()?;
        let e_m = a.e.ok_or_else(|| usage("--energy needs --E"))?;
        let tail = h.drop_prefix(a.m + 1);
        (extremal::extremal_pair_energy(&tail, e_m, a.m, a.eps)?, bounds::energy_bound(&tail, e_m, a.eps)?.value)
    };
    let u = ctx.unit;
    let report = json!({
        "p": pair.p.weights().iter().map(|&x| r9(x)).collect::<Vec<_>>(),
        "q": pair.q.weights().iter().map(|&x| r9(x)).collect::<Vec<_>>(),
        "m": pair.m,
        "eps": r9(pair.eps),
        "tv": r9(pair.tv()),
        "admissible": pair.is_admissible(),
        "support_reduced": pair.support_reduced,
        "achieved_gap": r9(pair.achieved_gap / u),
        "predicted_gap": r9(pair.predicted_gap / u),
        "delta": r9(pair.delta / u),
        "bound": r9(bound / u),
    });
    if pair.support_reduced {
        eprintln!("warning: at eps = 1/(m+1) the (m+1)-th entry of p vanishes; support reduced by one");
    }
    Ok(serde_json::to_string_pretty(&report).expect("serializable") + "\n")
}

fn cmd_figure(a: &FigureArgs, ctx: &Ctx) -> Result<String, CliError> {
    let grid = match &a.eps_grid {
        Some(spec) => parse_grid(spec)?,
        None => figures::default_eps_grid(),
    };
    let mut table: Table = figures::figure(a.id, &grid, ctx.exec)?;
    if a.id != 3 {
        table.scale_values(ctx.unit);
    }
    Ok(table.to_csv())
}

fn report_json(name: &str, r: &FuzzReport) -> serde_json::Value {
    json!({
        "suite": name,
        "trials": r.trials,
        "attempts": r.attempts,
        "violations": r.violations,
        "worst_margin": r9(r.worst_margin),
        "seed": r.seed,
        "first_failure": r.first_failure,
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<String, CliError> {
    let cfg = FuzzConfig { trials: a.trials, seed: a.seed, ..FuzzConfig::default() };
    let mut reports = Vec::new();
    if matches!(a.suite, Suite::Identities | Suite::All) {
        reports.push(("identities", verify::identity_suite()));
    }
    if matches!(a.suite, Suite::Fuzz | Suite::All) {
        reports.push(("fuzz", verify::fuzz_bound_validity(&cfg)));
    }
    if matches!(a.suite, Suite::Reduction | Suite::All) {
        reports.push(("reduction", verify::fuzz_reduction(&FuzzConfig { slack: 1e-12, ..cfg })));
    }
    let passed = reports.iter().all(|(_, r)| r.passed());
    let body: Vec<_> = reports.iter().map(|(n, r)| report_json(n, r)).collect();
    let text = serde_json::to_string_pretty(&body).expect("serializable") + "\n";
    if passed {
        Ok(text)
    } else {
        Err(CliError::Verification(text))
    }
}
