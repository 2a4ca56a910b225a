use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use vortigen_cli::commands::{self, RelationArg};
use vortigen_cli::CliError;

#[derive(Parser)]
#[command(name = "vortigen", version, about = "Evolutionary-form diagnostics for compressible gas flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Advance a characteristic net from 1-D initial data (x,rho,u,p)
    SolveMoc {
        #[arg(long)]
        init: PathBuf,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long = "t-end")]
        t_end: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario pipeline on a field file
    Diagnose {
        #[arg(long)]
        fields: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a jump relation on successively refined grids
    VerifyJumps {
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long, default_value_t = 3)]
        refine: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Advance the net until an envelope forms and report it
    DetectShock {
        #[arg(long)]
        init: PathBuf,
        #[arg(long, default_value_t = 1.4)]
        gamma: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pretty-print the report of a finished run
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = |flag: &Option<PathBuf>| commands::resolve_out_dir(flag.as_deref(), None);
    match cli.command {
        Command::SolveMoc { init, gamma, t_end, out: o } => commands::solve_moc(&init, gamma, t_end, &out(&o)?),
        Command::Diagnose {
            fields,
            manifest,
            config,
            out,
        } => {
            let report = commands::diagnose(fields.as_deref(), manifest.as_deref(), &config, out.as_deref())?;
            print!("{}", commands::render_report(&report));
            Ok(())
        }
        Command::VerifyJumps {
            relation,
            gamma,
            refine,
            out: o,
        } => commands::verify_jumps(relation, gamma, refine, &out(&o)?),
        Command::DetectShock { init, gamma, out: o } => commands::detect_shock(&init, gamma, &out(&o)?),
        Command::Report { run } => {
            print!("{}", commands::render_report(&commands::load_report(&run)?));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
