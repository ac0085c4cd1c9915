use std::fmt::Write as _;

use super::{Event, PivotalError};
use crate::enhance::Configuration;
use crate::graph::Edge;

/// Everything needed to replay a failed surgery offline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureDump {
    pub event: Event,
    pub r: usize,
    pub edge: Edge,
    pub claim: String,
    /// Intermediate choices, one `name value` pair per entry.
    pub notes: Vec<(String, String)>,
    pub configuration: Configuration,
}

impl FailureDump {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "event {}", self.event);
        let _ = writeln!(out, "r {}", self.r);
        let _ = writeln!(out, "edge {}", self.edge);
        let _ = writeln!(out, "claim {}", self.claim);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "note {k} {v}");
        }
        out.push_str("config\n");
        out.push_str(&self.configuration.to_lines());
        out
    }

    pub fn from_text(text: &str) -> Result<Self, PivotalError> {
        let bad = |line: &str| PivotalError::Precondition(format!("cannot parse dump line `{line}`"));
        let (head, body) = text.split_once("config\n").ok_or_else(|| bad("config"))?;
        let (mut event, mut r, mut edge, mut claim) = (None, None, None, None);
        let mut notes = Vec::new();
        for line in head.lines().filter(|l| !l.trim().is_empty()) {
            let (tag, rest) = line.split_once(' ').ok_or_else(|| bad(line))?;
            match tag {
                "event" => event = Some(rest.parse::<Event>()?),
                "r" => r = Some(rest.parse::<usize>().map_err(|_| bad(line))?),
                "edge" => edge = Some(rest.parse::<Edge>().map_err(|_| bad(line))?),
                "claim" => claim = Some(rest.to_string()),
                "note" => {
                    let (k, v) = rest.split_once(' ').ok_or_else(|| bad(line))?;
                    notes.push((k.to_string(), v.to_string()));
                }
                _ => return Err(bad(line)),
            }
        }
        Ok(FailureDump {
            event: event.ok_or_else(|| bad("event"))?,
            r: r.ok_or_else(|| bad("r"))?,
            edge: edge.ok_or_else(|| bad("edge"))?,
            claim: claim.ok_or_else(|| bad("claim"))?,
            notes,
            configuration: Configuration::from_lines(body)?,
        })
    }
}
