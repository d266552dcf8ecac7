use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kodaira_cli::commands;
use kodaira_cli::corpus::{self, Corpus, CORPUS_DIR_ENV};
use kodaira_cli::output::Format;
use kodaira_cli::schema::{EnumerationSpec, Problem, ProblemFile, TableKind};
use kodaira_cli::Failure;
use kodaira_core::par::Execution;

/// Exact invariants, monodromy and classification tables for double Kodaira fibrations.
#[derive(Parser)]
#[command(name = "kodaira", version, after_help = EXIT_CODES)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads for enumeration branches and corpus entries (1 runs sequentially).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Directory of problem files replacing the bundled corpus.
    #[arg(long, global = true, env = CORPUS_DIR_ENV)]
    corpus_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

const EXIT_CODES: &str = "Exit codes: 0 ok, 1 I/O or usage, 2 schema error, 3 invariant violation, 4 golden mismatch.";

#[derive(Subcommand)]
enum Command {
    /// Virtual invariants of a virtual-fibration (or monodromy-problem) file.
    Invariants {
        /// Problem file or corpus id.
        problem: String,
    },
    /// Obstruction, stabilizer index, minimal pullback degree and realized invariants.
    Realize {
        /// Problem file or corpus id.
        problem: String,
    },
    /// Classification tables.
    Enumerate {
        #[arg(value_enum)]
        table: Option<TableKind>,
        #[command(flatten)]
        params: EnumerateArgs,
    },
    /// Homology action of deck transformations on the cover of a generating vector.
    CoverAction {
        /// Problem file or corpus id.
        problem: String,
        /// Group elements to report instead of those listed in the file.
        #[arg(long = "element")]
        elements: Vec<String>,
    },
    /// Realize the bundled worked examples and compare with their expected rows.
    Examples {
        /// Corpus ids; all monodromy problems when omitted.
        ids: Vec<String>,
        /// Run every monodromy problem of the corpus.
        #[arg(long)]
        all: bool,
        /// List the corpus instead.
        #[arg(long, conflicts_with_all = ["ids", "all"])]
        list: bool,
    },
    /// Print a problem file in canonical form.
    Fmt {
        /// Problem file or corpus id.
        problem: String,
    },
}

#[derive(Args)]
struct EnumerateArgs {
    /// Enumeration-request file or corpus id, instead of a table name.
    #[arg(long, conflicts_with = "table")]
    request: Option<String>,
    #[arg(long)]
    sigma_max: Option<u64>,
    #[arg(long)]
    genus_max: Option<u64>,
    /// Restrict the Nielsen table to one genus.
    #[arg(long)]
    genus: Option<u64>,
    /// Restrict the Nielsen table to one automorphism order.
    #[arg(long)]
    order: Option<u64>,
    /// Compare against the bundled reference tables.
    #[arg(long)]
    check_golden: bool,
    /// Also write <table>.csv and <table>.json here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(arg: &str) -> Result<ProblemFile, Failure> {
    corpus::resolve(arg)
}

fn run(cli: &Cli, exec: Execution, out: &mut String) -> Result<(), Failure> {
    match &cli.command {
        Command::Invariants { problem } => commands::invariants(&load(problem)?, cli.format, out),
        Command::Realize { problem } => commands::realize(&load(problem)?, cli.format, out),
        Command::CoverAction { problem, elements } => commands::cover_action(&load(problem)?, elements, cli.format, out),
        Command::Enumerate { table, params } => {
            let spec = match (&params.request, table) {
                (Some(r), _) => match load(r)?.problem {
                    Problem::Enumeration(s) => s,
                    other => return Err(Failure::Schema(format!("expected an enumeration-request, got {:?}", other.kind()))),
                },
                (None, Some(t)) => EnumerationSpec {
                    table: *t,
                    sigma_max: params.sigma_max,
                    genus_max: params.genus_max,
                    genus: params.genus,
                    order: params.order,
                },
                (None, None) => return Err(Failure::Io("name a table or pass --request".into())),
            };
            commands::run_enumeration(&spec, params.check_golden, params.out.as_deref(), cli.format, exec, out)
        }
        Command::Examples { ids, all, list } => {
            let corpus = Corpus::load()?;
            if *list {
                out.push_str(&commands::list(&corpus, cli.format));
                return Ok(());
            }
            let ids: Vec<String> = if *all { Vec::new() } else { ids.clone() };
            let (table, result) = match commands::examples(&corpus, &ids, exec) {
                Ok(t) => (t, Ok(())),
                Err((t, e)) => (t, Err(e)),
            };
            out.push_str(&table.render(cli.format));
            result
        }
        Command::Fmt { problem } => {
            out.push_str(&load(problem)?.to_canonical_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Some(dir) = &cli.corpus_dir {
        // the corpus loader reads the variable; a flag value overrides it
        std::env::set_var(CORPUS_DIR_ENV, dir);
    }
    let mut out = String::new();
    let result = with_jobs(cli.jobs, |exec| run(&cli, exec, &mut out));
    let _ = std::io::stdout().write_all(out.as_bytes());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(feature = "parallel")]
fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce(Execution) -> T + Send) -> T {
    if jobs <= 1 {
        return f(Execution::Sequential);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| f(Execution::Parallel)),
        Err(_) => f(Execution::Parallel),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<T: Send>(_jobs: usize, f: impl FnOnce(Execution) -> T + Send) -> T {
    f(Execution::Sequential)
}
