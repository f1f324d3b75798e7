mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "polyreg", version, about = "Interpretations, transducers and pebble combinators over words")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Seed for randomized inputs
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Work limit (inputs for `image`, candidates for `pump`)
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgreeTarget {
    Innsq,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an interpretation on a word
    EvalInterp {
        /// Builtin name or interpretation file
        interp: String,
        /// Input word, or `-` for stdin
        word: String,
        #[arg(long)]
        origins: bool,
    },
    /// Evaluate a pebble/blind combinator tree on a word
    EvalPebble { tree: String, word: String },
    /// Run a two-way transducer on a word
    #[command(name = "run-2dft")]
    Run2dft {
        machine: String,
        word: String,
        #[arg(long)]
        origins: bool,
    },
    /// Apply Ψ to an interpretation
    Psi {
        interp: String,
        #[arg(long, default_value_t = 1)]
        iterate: usize,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Write the k-th member of the counterexample family (`-o -` for stdout)
    Family {
        k: usize,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Enumerate the image of a function on short inputs
    Image {
        function: String,
        #[arg(long)]
        alphabet: String,
        #[arg(long = "max-len")]
        max_len: usize,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check d-completeness of a decorated sample for a base sample
    CheckDcomplete {
        #[arg(long)]
        prime: PathBuf,
        #[arg(long)]
        base: PathBuf,
        /// Output decoration letters, e.g. `□1,◊1`
        #[arg(long, default_value = "")]
        markers: String,
    },
    /// Search a pumping decomposition of a sampled word
    Pump {
        sample: PathBuf,
        word: String,
        #[arg(long = "k")]
        k: usize,
        #[arg(long = "K")]
        big_k: usize,
        /// Larger sample to verify pumped words against (defaults to the sample)
        #[arg(long)]
        extended: Option<PathBuf>,
    },
    /// Estimate the polynomial growth degree of a function
    Growth {
        function: String,
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value = "20:300:20")]
        lengths: String,
    },
    /// Check whether a 2D interpretation is sortable
    SortCheck { interp: String },
    /// Cross-check independent implementations of a function
    Agree {
        #[arg(value_enum)]
        target: AgreeTarget,
        #[arg(long = "max-len", default_value_t = 7)]
        max_len: usize,
        #[arg(long, default_value_t = 500)]
        random: usize,
        #[arg(long = "random-max-len", default_value_t = 40)]
        random_max_len: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match commands::run(&cli) {
        Ok(out) => {
            out.print(cli.global.format);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
