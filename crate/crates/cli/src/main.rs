use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gsk_cli::commands::{cmd_asym, cmd_compare, cmd_det, cmd_specfun, rhp_rows, rhp_table};
use gsk_cli::config::parse_m_list;
use gsk_cli::output::emit;
use gsk_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "gsk", version, about = "Fredholm determinants of generalised sine kernels and their large-m expansions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` configuration file; defaults to the sine kernel on [-1, 1].
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Nyström nodes for every m.
    #[arg(long)]
    nodes: Option<usize>,
    /// Comma-separated m values, e.g. 8,16,32.
    #[arg(long)]
    m_list: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// ln det per m with the asymptotic value and residual.
    Det(Common),
    /// Asymptotic term breakdown as JSON.
    Asym(Common),
    /// Fits the residual decay exponent over m_list.
    Compare(Common),
    /// Identity suite as a PASS/FAIL table.
    RhpCheck {
        #[command(flatten)]
        common: Common,
        /// Add the parametrix scaling fits.
        #[arg(long)]
        matrix: bool,
    },
    /// H0 or H0' of the first or second kind.
    Specfun {
        #[arg(long, default_value = "1")]
        kind: String,
        /// RE,IM
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        prime: bool,
    },
}

fn load(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &c.out {
        cfg.output = Some(out.clone());
    }
    if let Some(f) = &c.format {
        cfg.format = f.parse()?;
    }
    if let Some(n) = c.nodes {
        cfg.n_nodes = Some(n);
    }
    if let Some(ms) = &c.m_list {
        cfg.m_list = parse_m_list(ms)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("GSK_THREADS") else { return Ok(()) };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("GSK_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    threads()?;
    match cli.command {
        Command::Det(c) => {
            let cfg = load(&c)?;
            emit(&cmd_det(&cfg)?, cfg.output.as_deref())
        }
        Command::Asym(c) => {
            let cfg = load(&c)?;
            emit(&cmd_asym(&cfg)?, cfg.output.as_deref())
        }
        Command::Compare(c) => {
            let cfg = load(&c)?;
            let (text, pass) = cmd_compare(&cfg)?;
            emit(&text, cfg.output.as_deref())?;
            if pass {
                Ok(())
            } else {
                Err(CliError::Check("residual decays slower than required".into()))
            }
        }
        Command::RhpCheck { common, matrix } => {
            let cfg = load(&common)?;
            let rows = rhp_rows(&cfg, matrix)?;
            emit(&rhp_table(&rows), cfg.output.as_deref())?;
            match rows.iter().filter(|r| !r.pass).count() {
                0 => Ok(()),
                n => Err(CliError::Check(format!("{n} identities failed"))),
            }
        }
        Command::Specfun { kind, z, prime } => emit(&cmd_specfun(&kind, &z, prime)?, None),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gsk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
