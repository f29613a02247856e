use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use affect_engine::dialogue::DialogueGraph;
use affect_engine::scenario::{ScenarioFile, Simulation};
use affect_engine::Symbol;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

mod transcript;

use transcript::{write_entries, Choices};

#[derive(Parser)]
#[command(name = "affect-engine", version, about = "Emotional agents, dialogue and a turn-based simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a scenario and report dialogue structure and rule warnings.
    Validate {
        scenario: PathBuf,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Play a scenario in the terminal, or replay a list of choices.
    Run {
        scenario: PathBuf,
        /// Play this character; every other character becomes an agent.
        #[arg(long, conflicts_with = "spectator")]
        role: Option<String>,
        /// Make every character an agent.
        #[arg(long)]
        spectator: bool,
        /// File of dialogue entry ids, one per line, used instead of stdin.
        #[arg(long)]
        seed_log: Option<PathBuf>,
        /// Upper bound on agent actions between human turns.
        #[arg(long, default_value_t = affect_engine::scenario::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Serve the HTTP API with this scenario as the default for new sessions.
    Serve {
        scenario: PathBuf,
        #[arg(long, env = affect_service::ADDR_ENV, default_value = affect_service::DEFAULT_ADDR)]
        addr: SocketAddr,
        /// Idle seconds before a session is dropped.
        #[arg(long, default_value_t = affect_service::DEFAULT_TTL.as_secs())]
        ttl: u64,
    },
    /// Write the dialogue graph in Graphviz DOT format.
    ExportDot {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the dialogue as CSV.
    ExportCsv {
        scenario: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a scenario from a dialogue CSV, optionally on top of an existing one.
    ImportCsv {
        csv: PathBuf,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Validate { scenario, strict } => validate(&scenario, strict),
        Command::Run { scenario, role, spectator, seed_log, max_steps } => {
            run(&scenario, role.as_deref(), spectator, seed_log.as_deref(), max_steps)
        }
        Command::Serve { scenario, addr, ttl } => serve(&scenario, addr, ttl),
        Command::ExportDot { scenario, output } => {
            let graph = DialogueGraph::new(ScenarioFile::from_path(&scenario)?.dialogue);
            emit(output.as_deref(), &graph.to_dot())
        }
        Command::ExportCsv { scenario, output } => {
            let graph = DialogueGraph::new(ScenarioFile::from_path(&scenario)?.dialogue);
            emit(output.as_deref(), &graph.to_csv())
        }
        Command::ImportCsv { csv, scenario, output } => {
            let text = std::fs::read_to_string(&csv).with_context(|| format!("reading {}", csv.display()))?;
            let graph = DialogueGraph::from_csv(&text).with_context(|| format!("parsing {}", csv.display()))?;
            let mut file = match scenario {
                Some(path) => ScenarioFile::from_path(path)?,
                None => ScenarioFile::from_json("{}")?,
            };
            file.dialogue = graph.entries().to_vec();
            emit(output.as_deref(), &(file.to_json() + "\n"))
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<ExitCode> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn list(items: &[Symbol]) -> String {
    if items.is_empty() {
        return items.len().to_string();
    }
    let names: Vec<String> = items.iter().map(Symbol::to_string).collect();
    format!("{} ({})", items.len(), names.join(", "))
}

fn validate(path: &Path, strict: bool) -> Result<ExitCode> {
    let file = ScenarioFile::from_path(path)?;
    let sim = match Simulation::from_file(&file) {
        Ok(sim) => sim,
        Err(e @ affect_engine::scenario::ScenarioError::Invalid { .. }) => {
            println!("invalid: {e}");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    let report = sim.validation();
    let mut out = std::io::stdout().lock();
    writeln!(out, "scenario: {}", if sim.name().is_empty() { "(unnamed)" } else { sim.name() })?;
    writeln!(out, "characters: {}", list(&sim.characters().iter().map(|c| c.name().clone()).collect::<Vec<_>>()))?;
    writeln!(out, "dialogue entries: {}", sim.dialogue().entries().len())?;
    writeln!(out, "start states: {}", list(&report.start_states))?;
    writeln!(out, "unreachable: {}", list(&report.unreachable))?;
    writeln!(out, "end states: {}", list(&report.end_states))?;
    writeln!(out, "dangling: {}", list(&report.dangling))?;
    writeln!(out, "duplicate ids: {}", list(&report.duplicate_ids))?;
    writeln!(out, "leaving End: {}", list(&report.leaving_end))?;
    writeln!(out, "warnings: {}", sim.warnings().len())?;
    for w in sim.warnings() {
        writeln!(out, "  - {w}")?;
    }
    let failed = report.has_errors() || (strict && (report.has_warnings() || !sim.warnings().is_empty()));
    writeln!(out, "result: {}", if failed { "FAIL" } else { "ok" })?;
    Ok(if failed { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn run(path: &Path, role: Option<&str>, spectator: bool, seed_log: Option<&Path>, max_steps: usize) -> Result<ExitCode> {
    let mut sim = Simulation::load(path)?;
    if spectator {
        sim.set_human_roles(&[])?;
    } else if let Some(role) = role {
        sim.set_human_roles(&[Symbol::new(role).with_context(|| format!("invalid role '{role}'"))?])?;
    }
    let mut choices = match seed_log {
        Some(p) => Choices::from_seed_log(&std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?),
        None => Choices::Interactive(Box::new(std::io::stdin().lock())),
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "# {}", if sim.name().is_empty() { "(unnamed)" } else { sim.name() })?;
    loop {
        let acted = sim.run_until_human(max_steps);
        write_entries(&mut out, &sim, &acted)?;
        let Some(holder) = sim.turn_holder().cloned() else { break };
        if !sim.is_human(&holder) {
            if acted.len() >= max_steps {
                writeln!(out, "-- stopped after {max_steps} agent actions")?;
            } else {
                writeln!(out, "-- no character can act")?;
            }
            break;
        }
        let options = sim.options(&holder)?;
        if options.is_empty() {
            writeln!(out, "-- {holder} has no options at {}", sim.dialogue_state(&holder)?)?;
            break;
        }
        let Some(entry) = choices.next(&mut out, &holder, &options)? else {
            writeln!(out, "-- end of input")?;
            break;
        };
        match sim.inject_human_choice(&holder, &entry, None) {
            Ok(logged) => write_entries(&mut out, &sim, std::slice::from_ref(&logged))?,
            Err(e) if choices.is_interactive() => writeln!(out, "{e}")?,
            Err(e) => {
                out.flush()?;
                eprintln!("seed log: {e}");
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn serve(path: &Path, addr: SocketAddr, ttl: u64) -> Result<ExitCode> {
    let file = ScenarioFile::from_path(path)?;
    // Fail fast on a scenario that would not start.
    Simulation::from_file(&file)?;
    let state = affect_service::AppState::new(Duration::from_secs(ttl), Some(file));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(affect_service::serve(addr, state)).with_context(|| format!("serving on {addr}"))?;
    Ok(ExitCode::SUCCESS)
}
