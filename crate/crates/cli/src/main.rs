use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tml::commands::{self, CliError, Options};
use tml::corpus::{self, Manifests};
use tml::manifest::Manifest;
use tml::report::{Format, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    Validate,
    Act,
    Stability,
    MinimalJ,
    JBound,
    AbelianScan,
    Rank,
    Exp,
    Torsion,
    PaperCorpus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

/// Exact computations with Anderson T-modules described by a manifest.
#[derive(Parser, Debug)]
#[command(name = "tml", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    module: Option<String>,
    #[arg(long)]
    subgroup: Option<String>,
    #[arg(long)]
    point: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    #[arg(long)]
    max_j: Option<usize>,
    #[arg(long)]
    max_i: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    if cli.command == Command::PaperCorpus {
        return corpus::run(&Manifests::default());
    }
    let path = cli
        .manifest
        .as_ref()
        .ok_or_else(|| CliError::Usage("--manifest is required".into()))?;
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let resolved = Manifest::parse(&text)?.resolve()?;
    let o = Options {
        module: cli.module.clone(),
        subgroup: cli.subgroup.clone(),
        point: cli.point.clone(),
        poly: cli.poly.clone(),
        max_j: cli.max_j,
        max_i: cli.max_i,
        order: cli.order,
        bound: cli.bound,
    };
    match cli.command {
        Command::Validate => commands::validate(&resolved, &o),
        Command::Act => commands::act(&resolved, &o),
        Command::Stability => commands::stability(&resolved, &o),
        Command::MinimalJ => commands::minimal_j(&resolved, &o),
        Command::JBound => commands::j_bound(&resolved, &o),
        Command::AbelianScan => commands::abelian(&resolved, &o),
        Command::Rank => commands::rank(&resolved, &o),
        Command::Exp => commands::exp(&resolved, &o),
        Command::Torsion => commands::torsion_cmd(&resolved, &o),
        Command::PaperCorpus => unreachable!(),
    }
}

fn echo() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let quoted: Vec<String> = args
        .iter()
        .map(|a| {
            if a.is_empty() || a.contains(char::is_whitespace) {
                format!("\"{a}\"")
            } else {
                a.clone()
            }
        })
        .collect();
    format!("tml {}", quoted.join(" "))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(2);
        }
    };
    let color = std::env::var("TML_COLOR").is_ok_and(|v| v == "1");
    match run(&cli) {
        Ok(mut report) => {
            report.command = echo();
            let format = match cli.format {
                OutputFormat::Text => Format::Text,
                OutputFormat::Json => Format::Json,
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.render(format, color).as_bytes());
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("tml: {e}");
            ExitCode::from(2)
        }
    }
}
