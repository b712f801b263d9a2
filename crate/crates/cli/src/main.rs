use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shlie_cli::{fixtures, report, run, CliError, RunConfig, Selection, Structure, Suite};

#[derive(Parser)]
#[command(name = "shlie", version, about = "Verify sh-Lie structures of gauge algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Coalgebra,
    Gerstenhaber,
    Bbvd,
    Theorem1,
    Shlie,
    Gbbvd,
    Ikeda,
    All,
}

impl SuiteArg {
    fn selection(self) -> Selection {
        let one = match self {
            SuiteArg::All => return Selection::All,
            SuiteArg::Coalgebra => Suite::Coalgebra,
            SuiteArg::Gerstenhaber => Suite::Gerstenhaber,
            SuiteArg::Bbvd => Suite::Bbvd,
            SuiteArg::Theorem1 => Suite::Theorem1,
            SuiteArg::Shlie => Suite::Shlie,
            SuiteArg::Gbbvd => Suite::Gbbvd,
            SuiteArg::Ikeda => Suite::Ikeda,
        };
        Selection::One(one)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites on a structure file or fixture name.
    Run {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 4)]
        arity_cap: usize,
        #[arg(long, default_value_t = 2)]
        jet_order: usize,
        #[arg(long, default_value_t = 4)]
        ideal_degree: u32,
        /// Emit the JSON report instead of text.
        #[arg(long)]
        json: bool,
        /// Worker threads for the parallel checks.
        #[arg(long)]
        jobs: Option<usize>,
        input: PathBuf,
    },
    /// List shipped fixtures, or regenerate them into a directory.
    Fixtures {
        #[arg(long)]
        write: Option<PathBuf>,
    },
    /// Print a structure in canonical form.
    Show { input: PathBuf },
    /// Print the JSON schema of run reports.
    Schema,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("shlie: {e}");
            ExitCode::from(3)
        }
    }
}

fn real_main() -> Result<u8, CliError> {
    match Cli::parse().command {
        Command::Run { suite, arity_cap, jet_order, ideal_degree, json, jobs, input } => {
            let cfg = RunConfig { input, selection: suite.selection(), arity_cap, jet_order, ideal_degree, jobs };
            cfg.validate()?;
            if let Some(n) = jobs {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let rep = run(&cfg)?;
            if json {
                println!("{}", rep.to_json());
            } else {
                print!("{}", rep.to_text());
            }
            Ok(rep.exit_code() as u8)
        }
        Command::Fixtures { write: Some(dir) } => {
            for p in fixtures::write_all(&dir)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Command::Fixtures { write: None } => {
            let dir = fixtures::fixture_dir();
            let mut paths: Vec<PathBuf> = std::fs::read_dir(&dir)
                .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "toml"))
                .collect();
            paths.sort();
            for p in paths {
                let s = Structure::load(&p)?;
                println!("{:<22} {:<14} {}", s.name(), s.kind(), p.display());
            }
            Ok(0)
        }
        Command::Show { input } => {
            let s = Structure::load(&fixtures::resolve(&input)?)?;
            print!("{}", s.to_toml());
            Ok(0)
        }
        Command::Schema => {
            print!("{}", report::SCHEMA);
            Ok(0)
        }
    }
}
