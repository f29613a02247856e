//! Terminal transcript and choice sources for `run`.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use affect_engine::dialogue::{DialogueEntry, NEUTRAL_TAG};
use affect_engine::scenario::{LogEntry, Simulation};
use affect_engine::Symbol;
use anyhow::{Context, Result};

pub fn option_label(entry: &DialogueEntry) -> String {
    let styles: Vec<String> = entry.style_tags().iter().map(Symbol::to_string).filter(|s| s != NEUTRAL_TAG).collect();
    if styles.is_empty() {
        format!("{}: {}", entry.id, entry.utterance)
    } else {
        format!("{}: {} [{}]", entry.id, entry.utterance, styles.join(", "))
    }
}

/// Print executed actions with the emotions they elicited and the actor's mood.
pub fn write_entries(out: &mut impl Write, sim: &Simulation, entries: &[LogEntry]) -> std::io::Result<()> {
    for e in entries {
        match &e.utterance {
            Some(text) => writeln!(out, "[{}] {} -> {}: \"{}\"", e.seq, e.actor, e.target, text)?,
            None => writeln!(out, "[{}] {} -> {}: {}", e.seq, e.actor, e.target, e.action)?,
        }
        for felt in &e.emotions {
            let list: Vec<String> = felt.emotions.iter().map(|r| format!("{:?} {:.2}", r.kind, r.intensity)).collect();
            writeln!(out, "      {} feels {}", felt.character, list.join(", "))?;
        }
        let moods: Vec<String> = sim
            .characters()
            .iter()
            .filter(|c| !sim.is_human(c.name()))
            .map(|c| format!("{} {:+.2}", c.name(), c.mood()))
            .collect();
        if !moods.is_empty() {
            writeln!(out, "      mood: {}", moods.join(", "))?;
        }
    }
    Ok(())
}

pub enum Choices {
    /// Entry ids to replay in order.
    SeedLog(VecDeque<String>),
    Interactive(Box<dyn BufRead>),
}

impl Choices {
    /// One entry id per line; blank lines and `#` comments are skipped.
    pub fn from_seed_log(text: &str) -> Choices {
        Choices::SeedLog(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn is_interactive(&self) -> bool {
        matches!(self, Choices::Interactive(_))
    }

    /// Show the options and obtain the next choice; `None` ends the run.
    pub fn next(&mut self, out: &mut impl Write, role: &Symbol, options: &[DialogueEntry]) -> Result<Option<Symbol>> {
        writeln!(out, "{role} may say:")?;
        for (i, o) in options.iter().enumerate() {
            writeln!(out, "  {}) {}", i + 1, option_label(o))?;
        }
        match self {
            Choices::SeedLog(queue) => {
                let Some(id) = queue.pop_front() else { return Ok(None) };
                writeln!(out, "> {id}")?;
                Ok(Some(Symbol::new(&id).with_context(|| format!("seed log entry '{id}'"))?))
            }
            Choices::Interactive(input) => loop {
                write!(out, "> ")?;
                out.flush()?;
                let mut line = String::new();
                if input.read_line(&mut line)? == 0 {
                    return Ok(None);
                }
                let line = line.trim();
                if line.eq_ignore_ascii_case("q") {
                    return Ok(None);
                }
                if let Ok(n) = line.parse::<usize>() {
                    if let Some(o) = n.checked_sub(1).and_then(|i| options.get(i)) {
                        return Ok(Some(o.id.clone()));
                    }
                } else if let Ok(id) = Symbol::new(line) {
                    return Ok(Some(id));
                }
                writeln!(out, "enter 1-{} or an entry id, q to quit", options.len())?;
            },
        }
    }
}
