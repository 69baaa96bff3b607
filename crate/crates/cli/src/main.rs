use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use iit_cli::commands::{self, check_size, Failure, RepertoireArgs};
use iit_cli::spec::{self, Cut, Mode, Overrides};
use iit_cli::{dispatch, ExitCode, DEFAULT_MAX_ELEMENTS};
use iit_core::Direction;

#[derive(Debug, Parser)]
#[command(name = "iit", version, about = "Integrated information of classical and quantum systems")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// System specification (JSON).
    spec: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, value_enum)]
    cut: Option<Cut>,
    /// Basis label such as `10` or `1,0`, or a JSON file with a state.
    #[arg(long)]
    state: Option<String>,
    /// Worker threads for the engine (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Largest element count accepted for exhaustive search.
    #[arg(long, default_value_t = DEFAULT_MAX_ELEMENTS)]
    max_elements: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    tol_causal: Option<f64>,
    #[arg(long)]
    tol_zero: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    Cause,
    Effect,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a specification and its repertoires.
    Validate(Common),
    /// Q-shape, system integration, major complex and Φ.
    Phi(Common),
    /// Concepts of the whole system.
    Qshape(Common),
    /// Purview scan and concept of one mechanism.
    Concept {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mechanism: String,
    },
    /// Repertoire values of a mechanism over a purview.
    Repertoire {
        #[command(flatten)]
        common: Common,
        /// Comma list of element names or 1-based positions; "none" for ∅.
        #[arg(long)]
        mechanism: String,
        #[arg(long)]
        purview: String,
        #[arg(long, value_enum)]
        direction: Option<DirectionArg>,
        /// First part M₁ of a mechanism split (M₂ is the rest).
        #[arg(long)]
        mechanism_split: Option<String>,
        /// First part P₁ of a purview split (P₂ is the rest).
        #[arg(long)]
        purview_split: Option<String>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Validate(c) | Command::Phi(c) | Command::Qshape(c) => c,
            Command::Concept { common, .. } | Command::Repertoire { common, .. } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<Option<String>, Failure> {
    let common = cli.cmd.common();
    let file = spec::read_spec(&common.spec)?;
    let overrides = Overrides {
        mode: common.mode,
        cut: common.cut,
        state: common.state.as_deref().map(spec::parse_state_arg).transpose()?,
        tol_causal: common.tol_causal,
        tol_zero: common.tol_zero,
    };
    if let Command::Validate(_) = cli.cmd {
        spec::load(&file, &overrides)?;
        return Ok(None);
    }
    let n = file.elements.len();
    if n > common.max_elements {
        // Checked before loading, which already probes every repertoire.
        return Err(Failure::new(
            ExitCode::Resource,
            format!(
                "{n} elements exceed the exhaustive-search limit of {}; \
                 pass --max-elements {n} to accept the exponential runtime",
                common.max_elements
            ),
        ));
    }
    let loaded = spec::load(&file, &overrides)?;
    check_size(&loaded, common.max_elements)?;
    let text = match &cli.cmd {
        Command::Validate(_) => unreachable!("handled above"),
        Command::Phi(_) => dispatch!(&loaded, a => commands::phi(a)),
        Command::Qshape(_) => dispatch!(&loaded, a => commands::qshape_cmd(a)),
        Command::Concept { mechanism, .. } => dispatch!(&loaded, a => commands::concept_cmd(a, mechanism)),
        Command::Repertoire {
            mechanism,
            purview,
            direction,
            mechanism_split,
            purview_split,
            ..
        } => {
            let args = RepertoireArgs {
                mechanism: mechanism.clone(),
                purview: purview.clone(),
                direction: direction.map(|d| match d {
                    DirectionArg::Cause => Direction::Cause,
                    DirectionArg::Effect => Direction::Effect,
                }),
                mechanism_split: mechanism_split.clone(),
                purview_split: purview_split.clone(),
            };
            dispatch!(&loaded, a => commands::repertoire_cmd(a, &args))
        }
    }?;
    Ok(Some(text))
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::new(ExitCode::Resource, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let common = cli.cmd.common();
    let outcome = match common.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::new(ExitCode::Resource, format!("thread pool: {e}"))),
        },
        None => run(&cli),
    };
    let outcome = outcome.and_then(|text| match text {
        Some(t) => emit(common, &t),
        None => {
            println!("ok");
            Ok(())
        }
    });
    if let Err(f) = outcome {
        eprintln!("iit: {}", f.message);
        std::process::exit(f.code as i32);
    }
}
