use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_CODES: &str = "\
Exit codes:
  0   CP (check) / CP-divisible (sweep)
  10  P but not CP / P-divisible but not CP-divisible
  20  neither; also not CP-divisible for d > 2, where P is not tested
  2   input error (unreadable or malformed file, invalid arguments)
  3   generator is not in the Pauli class (convert --to pauli)
  4   singular process map (sweep)
  1   internal error";

#[derive(Debug, Parser)]
#[command(name = "qdiv", version, about = "CP- and P-divisibility tests for qubit generators and processes")]
#[command(after_help = EXIT_CODES)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub engine: EngineFlags,
}

#[derive(Debug, Args)]
pub struct EngineFlags {
    /// Relative slack of the PSD and positivity decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Torus grid nodes per angle for the local P search.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,

    /// Number of best grid nodes refined by Newton steps.
    #[arg(long, global = true, default_value_t = 8)]
    pub refine: usize,

    /// Worker threads for scans and sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format; `check` and `sweep` default to json, `scan` to csv.
    #[arg(long, global = true)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Choi,
    Master,
    Bloch,
    Pauli,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one generator (generator-v1 JSON) as CP, P-not-CP or neither.
    #[command(after_help = EXIT_CODES)]
    Check {
        input: PathBuf,
    },

    /// Rewrite a generator file in another representation.
    #[command(after_help = EXIT_CODES)]
    Convert {
        input: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Scan a two-parameter slice of a generator class and emit one row per cell.
    #[command(after_help = "\
Either --spec or --class with two --axis options is required.
Classes and parameters:
  x            d11 d22 d33 d23
  o            d11 d22 d13
  pauli-gamma  g1 g2 g3 t1 t2 t3   (axes among g1..g3)
  pauli-tau    g1 g2 g3 t1 t2 t3   (axes among t1..t3)
d23 and d13 are real off-diagonal magnitudes.

Example:
  qdiv scan --class x --fixed d11=0 --fixed d23=1 --axis d22=0:3:200 --axis d33=0:3:200")]
    Scan {
        /// Scan spec JSON: {\"class\", \"fixed\", \"axes\": [{name, min, max, steps}, ..], \"output\"?}.
        #[arg(long, conflicts_with_all = ["class", "fixed", "axis"])]
        spec: Option<PathBuf>,
        #[arg(long)]
        class: Option<String>,
        /// Fixed parameter, `name=value`. Repeatable.
        #[arg(long)]
        fixed: Vec<String>,
        /// Scanned parameter, `name=min:max:steps`. Exactly two.
        #[arg(long)]
        axis: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Extract generators from a sampled process (trace-v1 JSON) and classify it.
    #[command(after_help = EXIT_CODES)]
    Sweep {
        input: PathBuf,
        /// Condition-number limit for inverting the sampled maps.
        #[arg(long, default_value_t = 1e8)]
        kappa_max: f64,
        /// Also write per-sample margins (t, min_eig_d, min_p, verdict) as CSV.
        #[arg(long)]
        margins: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },

    /// Emit a built-in process as a trace-v1 file.
    Preset {
        #[command(subcommand)]
        kind: Preset,
        /// Last sample time; samples are equally spaced from 0.
        #[arg(long, global = true, default_value_t = 2.0)]
        t_end: f64,
        /// Number of intervals; the trace has `steps + 1` samples.
        #[arg(long, global = true, default_value_t = 100)]
        steps: usize,
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Preset {
    /// `exp(t L)` for the generator in a generator-v1 file.
    Semigroup { generator: PathBuf },
    /// Pauli channel with Bloch contraction `exp(-g_j t)`.
    PauliDecay {
        /// Three comma-separated rates `g1,g2,g3`.
        #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.3, 0.4])]
        rates: Vec<f64>,
    },
    /// X-shaped generator with `D11(t) = a - b t`; CP is lost at `a/b`.
    XRamp {
        #[arg(long, default_value_t = 0.5)]
        a: f64,
        #[arg(long, default_value_t = 0.5)]
        b: f64,
        #[arg(long, default_value_t = 2.0)]
        d22: f64,
        #[arg(long, default_value_t = 2.0)]
        d33: f64,
        #[arg(long, default_value_t = 1.0)]
        d23: f64,
    },
}
