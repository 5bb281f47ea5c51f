//! JSON documents exchanged by the command-line front-end.
//!
//! Seeds travel as decimal strings so 64-bit values survive JSON readers that
//! only have doubles.

use serde::{Deserialize, Serialize};

use crate::comparator::{ComparisonMode, TestReport};
use crate::domain::{Domain, FilterOutcome, Instance};
use crate::error::{Error, Result};
use crate::stateful::{BranchOp, Relation, Restriction};

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceDocument {
    pub domains: Vec<Vec<i32>>,
    /// Lets oracle queries carry empty domains.
    #[serde(default, skip_serializing_if = "is_false")]
    pub allow_empty: bool,
}

impl InstanceDocument {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceDocument {
            domains: instance.to_vecs(),
            allow_empty: instance.has_empty_domain(),
        }
    }

    /// Validates the document and canonicalises every domain.
    pub fn to_instance(&self) -> Result<Instance> {
        if self.domains.is_empty() {
            return Err(Error::Parse("an instance needs at least one domain".into()));
        }
        if !self.allow_empty {
            if let Some(k) = self.domains.iter().position(Vec::is_empty) {
                return Err(Error::Parse(format!(
                    "domain {k} is empty; set \"allowEmpty\": true to permit empty domains"
                )));
            }
        }
        Instance::new(self.domains.iter().map(|d| Domain::new(d.iter().copied())).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase", deny_unknown_fields)]
pub enum OutcomeDocument {
    Filtered { domains: Vec<Vec<i32>> },
    Inconsistent,
}

impl From<&FilterOutcome> for OutcomeDocument {
    fn from(outcome: &FilterOutcome) -> Self {
        match outcome {
            FilterOutcome::Filtered(i) => OutcomeDocument::Filtered { domains: i.to_vecs() },
            FilterOutcome::Inconsistent => OutcomeDocument::Inconsistent,
        }
    }
}

impl OutcomeDocument {
    pub fn to_outcome(&self) -> Result<FilterOutcome> {
        Ok(match self {
            OutcomeDocument::Inconsistent => FilterOutcome::Inconsistent,
            OutcomeDocument::Filtered { domains } => FilterOutcome::Filtered(
                Instance::new(domains.iter().map(|d| Domain::new(d.iter().copied())).collect())
                    .map_err(|_| Error::Parse("a filtered outcome needs at least one domain".into()))?,
            ),
        })
    }
}

mod relation_text {
    use super::Relation;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Relation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(r.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Relation, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum BranchOpDocument {
    Push,
    Pop,
    Restrict {
        index: usize,
        #[serde(with = "relation_text")]
        relation: Relation,
        constant: i32,
    },
}

impl From<&BranchOp> for BranchOpDocument {
    fn from(op: &BranchOp) -> Self {
        match *op {
            BranchOp::Push => BranchOpDocument::Push,
            BranchOp::Pop => BranchOpDocument::Pop,
            BranchOp::Restrict(r) => BranchOpDocument::Restrict {
                index: r.index,
                relation: r.relation,
                constant: r.constant,
            },
        }
    }
}

impl From<&BranchOpDocument> for BranchOp {
    fn from(doc: &BranchOpDocument) -> Self {
        match *doc {
            BranchOpDocument::Push => BranchOp::Push,
            BranchOpDocument::Pop => BranchOp::Pop,
            BranchOpDocument::Restrict { index, relation, constant } => {
                BranchOp::Restrict(Restriction { index, relation, constant })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CounterexampleDocument {
    pub original: InstanceDocument,
    pub shrunk: InstanceDocument,
    pub trusted: OutcomeDocument,
    pub tested: OutcomeDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<BranchOpDocument>>,
    #[serde(default)]
    pub reason: String,
    #[serde(default = "default_true")]
    pub minimal: bool,
    /// Seed of the dives run from the root (dive campaigns only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dive_seed: Option<String>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportDocument {
    pub passed: bool,
    pub tests_run: usize,
    pub seed: String,
    pub mode: String,
    /// Command-line spelling of both filters, so the report can be replayed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trusted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tested: Option<String>,
    #[serde(default)]
    pub redraws: usize,
    pub counterexample: Option<CounterexampleDocument>,
}

impl ReportDocument {
    pub fn from_report(report: &TestReport, trusted: Option<String>, tested: Option<String>) -> Self {
        let counterexample = report.failure.as_ref().map(|f| CounterexampleDocument {
            original: InstanceDocument::from_instance(&f.original),
            shrunk: InstanceDocument::from_instance(&f.shrunk),
            trusted: (&f.trusted_outcome).into(),
            tested: (&f.tested_outcome).into(),
            transcript: f.transcript.as_ref().map(|ops| ops.iter().map(Into::into).collect()),
            reason: f.reason.to_string(),
            minimal: f.minimal,
            dive_seed: f.dive_seed.map(|s| s.to_string()),
        });
        ReportDocument {
            passed: report.passed,
            tests_run: report.tests_run,
            seed: report.seed.to_string(),
            mode: report.kind.as_str().to_owned(),
            trusted,
            tested,
            redraws: report.redraws,
            counterexample,
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .parse()
            .map_err(|_| Error::Parse(format!("seed `{}` is not a decimal 64-bit integer", self.seed)))
    }

    /// Comparison mode the campaign used.
    pub fn comparison_mode(&self) -> Result<ComparisonMode> {
        match self.mode.as_str() {
            "check" | "dives" => Ok(ComparisonMode::Equality),
            "stronger" => Ok(ComparisonMode::TestedSubsetOfTrusted),
            other => Err(Error::Parse(format!("unknown report mode `{other}`"))),
        }
    }
}

/// Parses a JSON document, mapping syntax and schema errors to [`Error::Parse`].
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string(doc).expect("documents always serialise")
}
