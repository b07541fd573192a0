//! Pass/fail tables for invariant and acceptance suites.

use serde::{Deserialize, Serialize};

/// One checked criterion with the measured value it was judged on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub id: String,
    pub name: String,
    pub pass: bool,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `"<= 1e-8"`.
    pub threshold: String,
    pub detail: String,
}

impl CriterionRow {
    pub fn new(id: impl Into<String>, name: impl Into<String>, pass: bool, value: f64, threshold: impl Into<String>) -> Self {
        Self { id: id.into(), name: name.into(), pass, value, threshold: threshold.into(), detail: String::new() }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// `PASS [id] name: value (threshold) detail`.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} [{}] {}: {:.6e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.value,
            self.threshold
        );
        if !self.detail.is_empty() {
            s.push_str(" ");
            s.push_str(&self.detail);
        }
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<CriterionRow>,
}

impl Report {
    pub fn push(&mut self, row: CriterionRow) {
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CriterionRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// One line per row followed by a summary count.
    pub fn to_text(&self) -> String {
        let mut out: String = self.rows.iter().map(|r| r.line() + "\n").collect();
        let passed = self.rows.iter().filter(|r| r.pass).count();
        out.push_str(&format!("{passed}/{} passed\n", self.rows.len()));
        out
    }
}
