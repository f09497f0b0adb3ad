//! Verification reports, rendered as text or as JSON with the same facts.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub verdict: String,
    /// What backs the verdict: a certificate summary, a witness, a branch
    /// count, or a violating pair.
    pub artifact: String,
    pub wall_us: u64,
}

impl CheckRecord {
    pub fn new(name: &str, verdict: impl Into<String>, artifact: impl Into<String>, wall: Duration) -> Self {
        Self {
            name: name.to_string(),
            verdict: verdict.into(),
            artifact: artifact.into(),
            wall_us: wall.as_micros() as u64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Complete,
    BudgetExhausted,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Complete => "complete",
            Status::BudgetExhausted => "budget-exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub checks: Vec<CheckRecord>,
    pub status: Status,
    pub wall_us: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: String, input: &[u8]) -> Self {
        Self {
            command,
            input_digest: format!("sha256:{}", sha256_hex(input)),
            checks: Vec::new(),
            status: Status::Complete,
            wall_us: 0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "input: {}", self.input_digest);
        for c in &self.checks {
            let _ = writeln!(out, "check {} = {} | {} | {} us", c.name, c.verdict, c.artifact, c.wall_us);
        }
        let _ = writeln!(out, "status: {}", self.status.as_str());
        let _ = writeln!(out, "wall: {} us", self.wall_us);
        out
    }

    pub fn from_text(text: &str) -> Result<Self, String> {
        let mut lines = text.lines();
        let mut field = |prefix: &str| -> Result<String, String> {
            lines
                .next()
                .and_then(|l| l.strip_prefix(prefix))
                .map(str::to_string)
                .ok_or_else(|| format!("expected `{prefix}`"))
        };
        let command = field("command: ")?;
        let input_digest = field("input: ")?;
        let mut checks = Vec::new();
        let mut rest = text.lines().skip(2);
        let status_line = loop {
            let line = rest.next().ok_or("missing status line")?;
            let Some(body) = line.strip_prefix("check ") else {
                break line;
            };
            checks.push(parse_check(body).ok_or_else(|| format!("malformed check line `{line}`"))?);
        };
        let status = match status_line.strip_prefix("status: ") {
            Some("complete") => Status::Complete,
            Some("budget-exhausted") => Status::BudgetExhausted,
            _ => return Err(format!("malformed status line `{status_line}`")),
        };
        let wall_us = rest
            .next()
            .and_then(|l| l.strip_prefix("wall: "))
            .and_then(|l| l.strip_suffix(" us"))
            .and_then(|l| l.parse().ok())
            .ok_or("malformed wall line")?;
        Ok(Self {
            command,
            input_digest,
            checks,
            status,
            wall_us,
        })
    }
}

fn parse_check(body: &str) -> Option<CheckRecord> {
    let (name, rest) = body.split_once(" = ")?;
    let (verdict, rest) = rest.split_once(" | ")?;
    let (artifact, wall) = rest.rsplit_once(" | ")?;
    let wall_us = wall.strip_suffix(" us")?.parse().ok()?;
    Some(CheckRecord {
        name: name.to_string(),
        verdict: verdict.to_string(),
        artifact: artifact.to_string(),
        wall_us,
    })
}
