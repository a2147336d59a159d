//! Line-oriented walk traces: `scan <payload>`, `dest <node_id> <mode>` and
//! `prompt`. Blank lines and lines starting with `#` are skipped.

use serde::Serialize;
use thiserror::Error;

use crate::map::NodeId;
use crate::pathfinder::RouteMode;
use crate::trip::{DestinationChoice, InstructionEvent, TripSession};

#[derive(Debug, Clone, PartialEq)]
pub enum TraceCommand {
    Scan(String),
    Destination(DestinationChoice),
    Prompt,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceError {
    pub line: usize,
    pub message: String,
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceCommand>, TraceError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| TraceError {
            line: i + 1,
            message,
        };
        let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let cmd = match verb {
            "scan" if !rest.is_empty() => TraceCommand::Scan(rest.to_string()),
            "scan" => return Err(err("`scan` needs a payload".into())),
            "prompt" if rest.is_empty() => TraceCommand::Prompt,
            "dest" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                let [node, mode] = parts[..] else {
                    return Err(err("expected `dest <node_id> <shortest|optimal>`".into()));
                };
                let destination = NodeId::new(node).map_err(|e| err(e.to_string()))?;
                let mode: RouteMode = mode
                    .parse()
                    .map_err(|e: crate::pathfinder::ParseModeError| err(e.to_string()))?;
                TraceCommand::Destination(DestinationChoice { destination, mode })
            }
            other => return Err(err(format!("unknown command `{other}`"))),
        };
        out.push(cmd);
    }
    Ok(out)
}

/// One output line of a replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TraceOutput {
    Event(InstructionEvent),
    Error { error: String },
}

/// Feeds `commands` to `session` in order.
pub fn replay(session: &mut TripSession, commands: &[TraceCommand]) -> Vec<TraceOutput> {
    let mut out = Vec::new();
    for cmd in commands {
        match cmd {
            TraceCommand::Scan(payload) => {
                out.extend(session.on_scan(payload).into_iter().map(TraceOutput::Event))
            }
            TraceCommand::Destination(choice) => match session.select_destination(choice) {
                Ok(events) => out.extend(events.into_iter().map(TraceOutput::Event)),
                Err(e) => out.push(TraceOutput::Error {
                    error: e.to_string(),
                }),
            },
            TraceCommand::Prompt => out.push(TraceOutput::Event(session.current_prompt())),
        }
    }
    out
}
