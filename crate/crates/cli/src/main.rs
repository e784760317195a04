//! `kishon-cli` — run any of the workspace's verification checks from the
//! command line.
//!
//! Two equivalent interfaces are provided: named subcommands
//! (`kishon-cli check-theorem33 --bound 2 --registers safe`) and a generic
//! flag route (`kishon-cli --check theorem33 --bound 2 --registers safe`),
//! optionally layered over a JSON config file (`--config run.json`, flags
//! win). The verdict is printed as a single JSON document; the exit status
//! is 0 when the check passes, 1 when it fails, and 2 on usage or
//! configuration errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kishon_cli::{
    listed_orders, order_json, resolve_config, run, CheckName, ConfigLayer, RunConfig, UsageError,
};

#[derive(Parser)]
#[command(name = "kishon-cli", version, about = "Exhaustive bounded verification of the Kishon poker game")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Check to run (generic route; alternative to a subcommand).
    #[arg(long, global = true)]
    check: Option<String>,

    /// Domain bound N: picks range over {1..N}, reads over {0..N}.
    #[arg(long, global = true)]
    bound: Option<i64>,

    /// Register semantics: serial, regular, or safe.
    #[arg(long, global = true)]
    registers: Option<String>,

    /// Restrict the single-process check to one process (0 or 1).
    #[arg(long, global = true)]
    process: Option<usize>,

    /// JSON configuration file; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Also write the verdict JSON to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Suppress stdout; the exit status still reports the outcome.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Args, Default)]
struct NoArgs {}

#[derive(Subcommand)]
enum Command {
    /// Verify that the global-state invariant is inductive.
    CheckInvariant(NoArgs),
    /// Verify verdict ordering over every interleaving and pick pair.
    CheckTheorem1(NoArgs),
    /// Verify the invariant, the final-state lemma, and the sweep at once.
    CheckTheorem2(NoArgs),
    /// Verify the event-based trichotomy under a register semantics.
    CheckTheorem33(NoArgs),
    /// Verify the supporting lemmas of the event-based proof.
    CheckLemmas(NoArgs),
    /// Verify the single-process local invariant and run shape.
    CheckNonrestricted(NoArgs),
    /// Verify that every history bridges to a serial execution.
    BridgeCheck(NoArgs),
    /// List the two-chain interval orders and verify their properties.
    EnumerateOrders(NoArgs),
    /// Run every check under its expected polarity.
    CheckAll(NoArgs),
}

impl Command {
    fn check_name(&self) -> &'static str {
        match self {
            Command::CheckInvariant(_) => "invariant",
            Command::CheckTheorem1(_) => "theorem1",
            Command::CheckTheorem2(_) => "theorem2",
            Command::CheckTheorem33(_) => "theorem33",
            Command::CheckLemmas(_) => "lemmas",
            Command::CheckNonrestricted(_) => "nonrestricted",
            Command::BridgeCheck(_) => "bridge",
            Command::EnumerateOrders(_) => "orders",
            Command::CheckAll(_) => "all",
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, UsageError> {
    let subcommand_check = cli.command.as_ref().map(|c| c.check_name().to_string());
    if let (Some(sub), Some(flag)) = (&subcommand_check, &cli.check) {
        if sub != flag {
            return Err(UsageError(format!(
                "conflicting check selection: subcommand says `{sub}`, --check says `{flag}`"
            )));
        }
    }
    let flags = ConfigLayer {
        check: subcommand_check.or_else(|| cli.check.clone()),
        bound: cli.bound,
        registers: cli.registers.clone(),
        process: cli.process,
        output_path: cli.out.clone(),
        quiet: cli.quiet.then_some(true),
    };
    let file = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str::<ConfigLayer>(&text)
                .map_err(|e| UsageError(format!("bad config {}: {e}", path.display())))?
        }
        None => ConfigLayer::default(),
    };
    resolve_config(flags.over(file))
}

/// Write one line to stdout; returns false once the consumer has closed
/// the pipe (e.g. `kishon-cli enumerate-orders | head`) so callers can
/// stop emitting instead of aborting. The exit status still reports the
/// verdict even when nobody is left reading.
fn print_line(text: &str) -> bool {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}") {
        Ok(()) => true,
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => false,
        Err(e) => {
            eprintln!("error: cannot write to stdout: {e}");
            false
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match build_config(&cli) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if config.check == CheckName::Orders && !config.quiet {
        for (index, order) in listed_orders().iter().enumerate() {
            if !print_line(&order_json(index, order).to_string()) {
                break;
            }
        }
    }
    let verdict = run(&config);
    let text = serde_json::to_string_pretty(&verdict).expect("verdicts serialize");
    if let Some(path) = &config.output_path {
        if let Err(e) = fs::write(path, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if !config.quiet {
        print_line(&text);
    }
    ExitCode::from(u8::try_from(verdict.exit_code()).expect("exit codes fit"))
}
