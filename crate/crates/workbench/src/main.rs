use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cgt_workbench::commands::{self, CommandError};
use cgt_workbench::report::{Envelope, Outcome};

/// Computational group theory workbench.
#[derive(Debug, Parser)]
#[command(name = "cgt", version)]
struct Cli {
    /// Write the JSON report here; stdout then gets a short summary.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Seed for every randomised analysis; always recorded.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Todd-Coxeter enumeration of the cosets of a subgroup.
    CosetEnum(commands::CosetEnumArgs),
    /// Reidemeister-Schreier presentation of a finite-index subgroup.
    SubgroupPresentation(commands::SubgroupPresentationArgs),
    /// Orders of the quotients by the terms of the p-series.
    PSeries(commands::PSeriesArgs),
    /// Runs branches of the quotient construction along a bit string.
    OmegaRun(commands::OmegaRunArgs),
    /// Reflection matrices, Cayley balls and word-metric experiments.
    TriangleLab(commands::TriangleLabArgs),
    /// Verifies the index chain for `<x, y | x^2, y^4, (xy)^8>`.
    WiegoldVerify(commands::WiegoldArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CosetEnum(_) => "coset-enum",
            Command::SubgroupPresentation(_) => "subgroup-presentation",
            Command::PSeries(_) => "p-series",
            Command::OmegaRun(_) => "omega-run",
            Command::TriangleLab(_) => "triangle-lab",
            Command::WiegoldVerify(_) => "wiegold-verify",
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(Value, Outcome, Option<String>), CommandError> {
    let plain = |r: commands::CommandResult| r.map(|(v, o)| (v, o, None));
    match &cli.command {
        Command::CosetEnum(a) => plain(commands::coset_enum(a)),
        Command::SubgroupPresentation(a) => plain(commands::subgroup_presentation_cmd(a)),
        Command::PSeries(a) => plain(commands::p_series(a)),
        Command::OmegaRun(a) => plain(commands::omega_run(a)),
        Command::TriangleLab(a) => plain(commands::triangle_lab(a, cli.seed)),
        Command::WiegoldVerify(a) => commands::wiegold_verify(a).map(|(v, o, text)| (v, o, Some(text))),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => Outcome::UsageError.exit_code(),
            };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let started = Instant::now();
    let result = dispatch(&cli);
    let (report, outcome, error, text) = match result {
        Ok((report, outcome, text)) => (report, outcome, None, text),
        Err(e) => {
            log::debug!("command failed: {e:?}");
            (Value::Null, e.outcome(), Some(e.to_string()), None)
        }
    };
    let mut config = json!(&cli.command)[cli.command.name()].take();
    config["json"] = json!(cli.json);
    let envelope = Envelope::new(cli.command.name(), config, cli.seed, started.elapsed(), outcome, error.clone(), report);
    let body = serde_json::to_string_pretty(&envelope).expect("reports serialise");
    match &cli.json {
        Some(path) if outcome != Outcome::UsageError => {
            if let Err(e) = std::fs::write(path, body + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                return ExitCode::from(Outcome::UsageError.exit_code() as u8);
            }
            if let Some(t) = text {
                print!("{t}");
            }
            println!("{} ({:?}), report written to {}", envelope.command, outcome, path.display());
        }
        _ => println!("{body}"),
    }
    if let Some(e) = error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
