//! Machine-readable verification reports.
//!
//! Reports are fully deterministic: records are keyed and sorted, all maps
//! are ordered, and nothing time- or thread-dependent is recorded, so two
//! runs with the same configuration serialize byte-identically.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "skipped-boundary")]
    SkippedBoundary,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceRecord {
    /// Relation identifier, e.g. `currents.hx`.
    pub id: String,
    /// Instance parameters (indices, modes, sector, state counts).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    pub status: Status,
    /// Rendering of the first nonzero residual, present on failures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

impl InstanceRecord {
    pub fn new(id: impl Into<String>) -> Self {
        InstanceRecord { id: id.into(), params: BTreeMap::new(), status: Status::Pass, residual: None }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn pass(mut self) -> Self {
        self.status = Status::Pass;
        self
    }

    pub fn fail(mut self, residual: String) -> Self {
        self.status = Status::Fail;
        self.residual = Some(residual);
        self
    }

    pub fn skipped(mut self) -> Self {
        self.status = Status::SkippedBoundary;
        self
    }

    /// Stable sort key: id, then parameters in map order.
    pub fn sort_key(&self) -> String {
        let mut key = self.id.clone();
        for (k, v) in &self.params {
            key.push('|');
            key.push_str(k);
            key.push('=');
            key.push_str(v);
        }
        key
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    #[serde(rename = "skipped-boundary")]
    pub skipped_boundary: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub counts: Counts,
    pub records: Vec<InstanceRecord>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, mut records: Vec<InstanceRecord>) -> Self {
        records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut counts = Counts::default();
        for r in &records {
            match r.status {
                Status::Pass => counts.pass += 1,
                Status::Fail => counts.fail += 1,
                Status::SkippedBoundary => counts.skipped_boundary += 1,
            }
        }
        SuiteReport { suite: suite.into(), counts, records }
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub engine_version: String,
    pub config: BTreeMap<String, String>,
    pub summary: Counts,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn new(config: BTreeMap<String, String>, suites: Vec<SuiteReport>) -> Self {
        let mut summary = Counts::default();
        for s in &suites {
            summary.pass += s.counts.pass;
            summary.fail += s.counts.fail;
            summary.skipped_boundary += s.counts.skipped_boundary;
        }
        Report {
            schema_version: SCHEMA_VERSION,
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            summary,
            suites,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serialization");
        out.push('\n');
        out
    }
}
