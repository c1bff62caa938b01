mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dihom::Ring;

#[derive(Parser, Debug)]
#[command(name = "dihom", version, about = "Homology, fundamental groups and coverings of finite digraphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Write the report here instead of standard output.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// More log output on standard error (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Path homology.
    Ph {
        input: PathBuf,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Also report Ω ranks split by endpoint pair.
        #[arg(long)]
        clusters: bool,
        /// Voltage file refining the clusters by path label.
        #[arg(long, requires = "clusters")]
        voltage: Option<PathBuf>,
    },
    /// Magnitude homology ranks for lengths up to `--l`.
    Magnitude {
        input: PathBuf,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "l", visible_alias = "level", default_value_t = 2)]
        l: u32,
    },
    /// A page of the magnitude-path spectral sequence.
    Mpss {
        input: PathBuf,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long = "r", default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 3)]
        s_max: u32,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
    },
    /// Presentation of the l-fundamental group.
    Pi1 {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        level: usize,
        /// Basepoint name; defaults to the first vertex.
        #[arg(long)]
        basepoint: Option<String>,
    },
    /// Coverings of digraphs.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Cayley digraphs of finitely generated abelian groups.
    #[command(subcommand)]
    Cayley(CayleyCommand),
    /// Box product of two digraphs.
    Boxprod { left: PathBuf, right: PathBuf },
    /// Invariants along a chain of induced subdigraphs.
    Exhaust {
        #[arg(required = true, num_args = 1..)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = InvariantArg::Ph)]
        invariant: InvariantArg,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long = "l", visible_alias = "level", default_value_t = 2)]
        l: u32,
        #[arg(long, default_value_t = 1)]
        window: usize,
        /// Reduced path homology in degree 0.
        #[arg(long)]
        reduced: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InvariantArg {
    Ph,
    Mh,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct RingArg {
    /// Coefficients: `q`, `z` or `fp:<p>`.
    #[arg(long, default_value = "q", value_parser = parse_ring)]
    pub ring: Ring,
}

fn parse_ring(s: &str) -> Result<Ring, String> {
    s.parse().map_err(|e: dihom::Error| e.to_string())
}

#[derive(Args, Debug)]
pub struct CoverInputs {
    pub base: PathBuf,
    pub total: PathBuf,
    /// Lines `e -> x`.
    pub map: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub level: usize,
}

#[derive(Subcommand, Debug)]
pub enum CoverCommand {
    /// Decide whether the map is an l-covering.
    Check {
        #[command(flatten)]
        inputs: CoverInputs,
    },
    /// Build the cover of a base digraph from a fiber action.
    Build {
        base: PathBuf,
        action: PathBuf,
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
    /// Deck transformations of a connected cover.
    Deck {
        #[command(flatten)]
        inputs: CoverInputs,
    },
    /// Lift a walk in the base through a chosen vertex.
    Lift {
        #[command(flatten)]
        inputs: CoverInputs,
        /// Base vertex names separated by spaces.
        #[arg(long)]
        path: String,
        /// Total vertex over `path[anchor]`.
        #[arg(long)]
        start: String,
        #[arg(long, default_value_t = 0)]
        anchor: usize,
    },
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    /// For example `Z^2 + Z/3`.
    #[arg(long)]
    pub group: String,
    /// For example `(1,0);(0,1)`.
    #[arg(long)]
    pub gens: String,
}

#[derive(Subcommand, Debug)]
pub enum CayleyCommand {
    /// The Cayley digraph, or a ball in it for infinite groups.
    Build {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Path homology ranks in closed form, or directly on a ball.
    Ph {
        #[command(flatten)]
        group: GroupArgs,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Compute on the ball of this radius instead.
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Coincidences among words of at most `level` generators.
    Relations {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
    /// The group presented by those coincidences.
    Presentation {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 2)]
        level: usize,
    },
}

fn init_logging(cli: &Cli) {
    let level = if cli.quiet {
        log::LevelFilter::Error
    } else {
        match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            2 => log::LevelFilter::Debug,
            _ => log::LevelFilter::Trace,
        }
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(&cli);
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let text = match cli.format {
        Format::Json => render::json(&outcome.report),
        Format::Text => outcome.text.clone().unwrap_or_else(|| render::flat(&outcome.report)),
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
