//! Machine-readable run records, one JSON object per line.

use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Runs `f`, which returns the largest discrepancy it saw, and records a
/// pass when that discrepancy is within `tolerance`. Errors are failures
/// with the message as detail.
pub fn run_check(name: impl Into<String>, tolerance: f64, f: impl FnOnce() -> crate::Result<f64>) -> CheckRecord {
    let start = Instant::now();
    let (max_discrepancy, detail) = match f() {
        Ok(d) => (d, String::new()),
        Err(e) => (f64::INFINITY, e.to_string()),
    };
    let status = if max_discrepancy <= tolerance { Status::Pass } else { Status::Fail };
    CheckRecord {
        name: name.into(),
        status,
        max_discrepancy,
        tolerance,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        detail,
    }
}

/// Serialises `value` as one compact JSON line. Non-finite floats become
/// `null`.
pub fn write_json_line<W: Write, T: Serialize>(out: &mut W, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}
