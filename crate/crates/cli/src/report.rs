//! Plain-text reports: one `PASS`/`FAIL`/`SKIP`/`INFO` line per claim.

use std::fmt::{Display, Write};

#[derive(Default)]
pub struct Report {
    text: String,
    failures: usize,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: &str) {
        let _ = writeln!(self.text, "[{name}]");
    }

    /// `PASS id measured=.. bound=..`, or `FAIL` when `pass` is false.
    pub fn check(&mut self, id: &str, measured: impl Display, bound: impl Display, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        let _ = writeln!(self.text, "{tag} {id} measured={measured} bound={bound}");
    }

    pub fn skip(&mut self, id: &str, reason: impl Display) {
        let _ = writeln!(self.text, "SKIP {id} {reason}");
    }

    pub fn info(&mut self, id: &str, value: impl Display) {
        let _ = writeln!(self.text, "INFO {id} {value}");
    }

    pub fn failures(&self) -> usize {
        self.failures
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

/// Fixed-precision float for reports.
pub fn num(x: f64) -> String {
    format!("{x:.9}")
}
