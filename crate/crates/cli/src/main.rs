mod cache;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::cache::Cache;

#[derive(Parser, Debug)]
#[command(name = "g2theta", version, about = "Integer symmetric matrices with prescribed characteristic polynomial, cubic rings and related checks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Cache root; overrides the G2THETA_CACHE environment variable.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
    /// Neither read nor write the cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads for enumeration (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Enumerate symmetric integer matrices T with det(tI + T) = p(t).
    Qp(QpArgs),
    /// |Q_p| and orbit data for the companion cubic of a binary cubic form.
    Coeff {
        /// Form coefficients "a,b,c,d" with d = 1.
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Recompute the reference table and check it row by row.
    Table {
        /// Only the row with this polynomial.
        #[arg(long, allow_hyphen_values = true)]
        row: Option<String>,
    },
    /// Classify a binary cubic form "a,b,c,d" as PSD or NOT_PSD.
    Psd {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// F4 root system checks.
    Roots(RootsArgs),
    /// Randomized checks of the metaplectic covers.
    Cover(CoverArgs),
    /// Evaluate a generalized Whittaker function of half-integral weight.
    Whittaker(WhittakerArgs),
    /// Run `qp` on every row of a CSV file with a "polynomial" column.
    Batch {
        file: PathBuf,
        /// Write results here instead of standard output.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Run the full property suite.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").args(["list", "orbits", "count"])))]
pub struct QpArgs {
    /// Monic cubic, e.g. "t^3-t^2-2t+1" or "(t-1)(t^2-2)".
    #[arg(allow_hyphen_values = true)]
    pub poly: String,
    /// Every matrix, with its orbit.
    #[arg(long)]
    pub list: bool,
    /// Orbit representatives, sizes and stabilizers (default).
    #[arg(long)]
    pub orbits: bool,
    /// Only |Q_p|.
    #[arg(long)]
    pub count: bool,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("what").required(true).args(["check_lemmas", "weyl_witness", "nu_exc"])))]
pub struct RootsArgs {
    /// The four root closure statements.
    #[arg(long)]
    pub check_lemmas: bool,
    /// A Weyl group element taking -(3/2) w1 to -(w1 + w2)/2 under the dot action.
    #[arg(long)]
    pub weyl_witness: bool,
    /// rho - (w1 + w2)/2 and its pairings with the simple coroots.
    #[arg(long)]
    pub nu_exc: bool,
}

#[derive(Args, Debug)]
pub struct CoverArgs {
    /// Run the randomized self-tests.
    #[arg(long, required = true)]
    pub selftest: bool,
    /// One test by name (default: all).
    #[arg(long)]
    pub test: Option<String>,
    /// A prime or "inf" (default: 2, 3, 5, 7 and inf).
    #[arg(long)]
    pub place: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = g2theta::harness::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("input").required(true).args(["alpha", "form"])))]
pub struct WhittakerArgs {
    /// Half-integral weight, e.g. 1/2 or 3/2.
    #[arg(long)]
    pub n: String,
    #[arg(long)]
    pub nu: f64,
    /// The parameter alpha directly, e.g. "0.3+0.4i".
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    /// A PSD binary cubic "a,b,c,d"; alpha^2 = -j f(z, 1).
    #[arg(long, allow_hyphen_values = true, requires = "z")]
    pub form: Option<String>,
    /// Point of the upper half plane.
    #[arg(long, allow_hyphen_values = true, requires = "form")]
    pub z: Option<String>,
    /// Automorphy factor (default: (Im z)^(-1/2)).
    #[arg(long, requires = "form")]
    pub j: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, default_value_t = g2theta::harness::DEFAULT_SEED)]
    pub seed: u64,
    /// Small sample counts.
    #[arg(long)]
    pub quick: bool,
    /// Only checks whose id starts with this prefix.
    #[arg(long)]
    pub filter: Option<String>,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Also write a JUnit report to this file.
    #[arg(long, value_name = "PATH")]
    pub junit: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = Cache::resolve(cli.cache_dir.clone(), cli.no_cache);
    match commands::run(&cli, &cache) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
