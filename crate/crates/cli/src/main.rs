//! `wtw`: critical-value tabulation, factor-number tests, simulation,
//! centering constants and the numerical verification suite.

mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wtw::sampling::GueMethod;

#[derive(Parser, Debug)]
#[command(
    name = "wtw",
    version,
    about = "Tracy-Widom edge statistics and eigenvalue-ratio factor tests"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores). Output does
    /// not depend on this value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Increase log verbosity on standard error (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate percentiles of the max-ratio statistic by GUE Monte Carlo.
    Tabulate(TabulateArgs),
    /// Test hypotheses on the number of factors in a panel.
    Test(TestArgs),
    /// Draw seeded samples from the supported random models.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Compute the edge centering and scaling constants (c, mu, sigma).
    Centering(CenteringArgs),
    /// Run the numerical invariant suites and report pass/fail per suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct TabulateArgs {
    /// Largest m = kmax - k0 to tabulate (columns 1..=m_max).
    #[arg(long, default_value_t = 8)]
    pub m_max: usize,
    /// GUE matrix dimension.
    #[arg(long, default_value_t = 1000)]
    pub gue_n: usize,
    /// Monte Carlo replicates.
    #[arg(long, default_value_t = 30_000)]
    pub reps: usize,
    /// Base seed; replicate r uses stream r.
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated probabilities for the table rows (default: the 15
    /// reference rows 0.50 ... 0.99).
    #[arg(long, value_delimiter = ',')]
    pub percentiles: Option<Vec<f64>>,
    /// GUE sampler: the exact tridiagonal model or dense matrices.
    #[arg(long, value_enum, default_value_t = MethodArg::Tridiagonal)]
    pub method: MethodArg,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum MethodArg {
    Tridiagonal,
    Dense,
}

impl From<MethodArg> for GueMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Tridiagonal => GueMethod::Tridiagonal,
            MethodArg::Dense => GueMethod::Dense,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Text,
    Json,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["panel", "eigenvalues", "ratios"])))]
pub struct TestArgs {
    /// Panel file: series id, then an even number of observations per row.
    #[arg(long)]
    pub panel: Option<PathBuf>,
    /// Comma-separated sample-covariance eigenvalues, descending.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eigenvalues: Option<Vec<f64>>,
    /// Comma-separated gap ratios (g_i - g_{i+1}) / (g_{i+1} - g_{i+2}), i = 1, 2, ...
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    /// Field delimiter of the panel file.
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Largest number of factors considered.
    #[arg(long)]
    pub kmax: usize,
    /// Test a single hypothesis k = k0 instead of building a confidence set.
    #[arg(long)]
    pub k0: Option<usize>,
    /// Confidence level; must be a row of the table.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Critical-value table (default: the built-in reference table).
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Leave kmax out of the confidence set (it is never tested).
    #[arg(long)]
    pub exclude_kmax: bool,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
    /// Also write (index, eigenvalue) scree coordinates as CSV to this file.
    #[arg(long)]
    pub scree_out: Option<PathBuf>,
    /// Output file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum SimulateCommand {
    /// Edge-scaled top eigenvalues N^{2/3}(d_i - 2) of GUE draws, one row per replicate.
    Gue(SimGueArgs),
    /// Eigenvalues of X X* / n for complex Gaussian X with covariance diag(ell).
    Wishart(SimWishartArgs),
    /// A synthetic factor panel in the panel file format.
    Panel(SimPanelArgs),
}

#[derive(Args, Debug)]
pub struct SimGueArgs {
    /// Matrix dimension.
    #[arg(long)]
    pub n: usize,
    /// Eigenvalues kept per draw.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Tridiagonal)]
    pub method: MethodArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimWishartArgs {
    /// Sample count.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated population eigenvalues; exclusive with --p.
    #[arg(long, value_delimiter = ',', conflicts_with = "p")]
    pub ell: Option<Vec<f64>>,
    /// Dimension with identity covariance.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimPanelArgs {
    /// Number of series.
    #[arg(long)]
    pub p: usize,
    /// Half the number of periods (T = 2 n_half).
    #[arg(long)]
    pub n_half: usize,
    /// Number of factors.
    #[arg(long, default_value_t = 0)]
    pub k: usize,
    /// Standard deviation of the loadings.
    #[arg(long, default_value_t = 1.0)]
    pub loading_scale: f64,
    /// Variance of each factor.
    #[arg(long, default_value_t = 1.0)]
    pub factor_variance: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CenteringArgs {
    /// Sample count.
    #[arg(long)]
    pub n: usize,
    /// Comma-separated population eigenvalues; exclusive with --p.
    #[arg(long, value_delimiter = ',', conflicts_with = "p", required_unless_present = "p")]
    pub ell: Option<Vec<f64>>,
    /// Dimension with identity covariance.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only the named suites (repeatable); default: all.
    #[arg(long, value_enum)]
    pub suite: Vec<verify::Suite>,
    /// Monte Carlo draws for the mc-agreement suite.
    #[arg(long, default_value_t = 20_000)]
    pub mc_reps: usize,
    /// Seed for the Monte Carlo suites.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Test hook: perturb the named suite's computed value so that it fails.
    #[arg(long, value_enum)]
    pub inject_failure: Option<verify::Suite>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    pub format: FormatArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .init();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Tabulate(a) => commands::tabulate(a),
        Command::Test(a) => commands::test(a),
        Command::Simulate(s) => commands::simulate(s),
        Command::Centering(a) => commands::centering(a),
        Command::Verify(a) => verify::run(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
