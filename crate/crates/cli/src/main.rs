mod cache;
mod commands;
mod expect;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rmlt::catalog::CaseId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] rmlt::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("missing input {0}: run `rmlt search` for this case first")]
    MissingInput(PathBuf),
    #[error("expectations: {0}")]
    Expectations(String),
    #[error("no obstruction is defined for case {0}")]
    NoObstruction(CaseId),
    #[error("no check results found under {0}")]
    NothingToReport(PathBuf),
}

#[derive(Parser, Debug)]
#[command(
    name = "rmlt",
    version,
    about = "Sharply transitive sets in exceptional transitive linear groups"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Global {
    /// Output directory.
    #[arg(long, global = true, default_value = "rmlt-out")]
    out: PathBuf,
    /// Cache directory for groups, cliques and pipeline checkpoints
    /// [default: <out>/cache].
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Abort a clique search after this many nodes.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget_nodes: Option<u64>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Expectations file [default: the bundled reference values].
    #[arg(long, global = true)]
    expectations: Option<PathBuf>,
    /// Directory with pinned generator files (e.g. 4.m.json).
    #[arg(long, global = true)]
    assets: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Cases {
    /// Cases: ids such as 4.b or 4.e-960, families such as 4.e or 4.j,
    /// `table` for the table cases, or `all`.
    #[arg(long = "case", required = true, num_args = 1.., value_delimiter = ',', value_parser = parse_selector)]
    case: Vec<Vec<CaseId>>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build and verify the groups.
    Catalog(Cases),
    /// Enumerate the sharply transitive sets (maximum cliques).
    Search(Cases),
    /// Parastrophy classes, fingerprints and autotopism groups.
    Classify(Cases),
    /// Non-existence certificates and the 4.j pipeline.
    Obstruct(Cases),
    /// Summarize all recorded checks.
    Report,
}

fn parse_selector(s: &str) -> Result<Vec<CaseId>, String> {
    let family = |prefix: &str| -> Vec<CaseId> {
        CaseId::ALL
            .iter()
            .copied()
            .filter(|c| c.as_str().split('-').next() == Some(prefix))
            .collect()
    };
    let ids = match s {
        "all" => CaseId::ALL.to_vec(),
        "table" => CaseId::TABLE.to_vec(),
        _ => match s.parse::<CaseId>() {
            Ok(id) => vec![id],
            Err(e) => {
                let f = family(s);
                if f.is_empty() {
                    return Err(e.to_string());
                }
                f
            }
        },
    };
    Ok(ids)
}

pub struct RunConfig {
    pub cases: Vec<CaseId>,
    pub out: PathBuf,
    pub cache: PathBuf,
    pub budget_nodes: Option<u64>,
    pub format: Format,
    pub expectations: expect::Expectations,
    pub assets: Option<PathBuf>,
}

fn config(g: &Global, cases: Option<&Cases>) -> Result<RunConfig, CliError> {
    let mut ids: Vec<CaseId> = cases
        .map(|c| c.case.iter().flatten().copied().collect())
        .unwrap_or_default();
    ids.sort();
    ids.dedup();
    Ok(RunConfig {
        cases: ids,
        out: g.out.clone(),
        cache: g.cache.clone().unwrap_or_else(|| g.out.join("cache")),
        budget_nodes: g.budget_nodes,
        format: g.format,
        expectations: expect::Expectations::load(g.expectations.as_deref())?,
        assets: g.assets.clone(),
    })
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.cmd {
        Cmd::Catalog(c) => commands::catalog(&config(&cli.global, Some(c))?),
        Cmd::Search(c) => commands::search(&config(&cli.global, Some(c))?),
        Cmd::Classify(c) => commands::classify(&config(&cli.global, Some(c))?),
        Cmd::Obstruct(c) => commands::obstruct(&config(&cli.global, Some(c))?),
        Cmd::Report => commands::report(&config(&cli.global, None)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.threads {
        pool = pool.num_threads(n as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some checks did not match their expected values");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn selectors_expand() {
        assert_eq!(parse_selector("4.k").unwrap(), vec![CaseId::K360, CaseId::K720]);
        assert_eq!(parse_selector("4.j").unwrap(), CaseId::J_TOWER.to_vec());
        assert_eq!(parse_selector("4.b").unwrap(), vec![CaseId::B]);
        assert_eq!(parse_selector("table").unwrap().len(), 9);
        assert!(parse_selector("4.z").is_err());
        assert!(parse_selector("").is_err());
    }

    #[test]
    fn empty_case_list_is_a_usage_error() {
        let e = Cli::try_parse_from(["rmlt", "search"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = Cli::try_parse_from(["rmlt", "search", "--case"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
