//! Machine-readable verdicts. Everything except the `timing` section is a
//! deterministic function of the run configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail {
        /// Which node or property failed.
        node: String,
        /// A concrete element or map exhibiting the failure.
        witness: String,
    },
    Skip {
        reason: String,
    },
}

impl Verdict {
    pub fn fail(node: impl Into<String>, witness: impl Into<String>) -> Self {
        Verdict::Fail {
            node: node.into(),
            witness: witness.into(),
        }
    }

    pub fn skip(reason: impl Into<String>) -> Self {
        Verdict::Skip {
            reason: reason.into(),
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail { .. } => "FAIL",
            Verdict::Skip { .. } => "SKIP",
        }
    }
}

/// A named check and its outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    /// Free-form counts, e.g. how many elements were examined.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub stats: BTreeMap<String, u64>,
}

impl Check {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check {
            name: name.into(),
            verdict,
            stats: BTreeMap::new(),
        }
    }

    pub fn with_stat(mut self, key: &str, value: u64) -> Self {
        self.stats.insert(key.into(), value);
        self
    }
}

/// A finite abelian group by its invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub name: String,
    pub invariant_factors: Vec<u64>,
    pub order: u128,
}

/// A homomorphism as the images of the source generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapRecord {
    pub name: String,
    pub matrix: Vec<Vec<u64>>,
}

/// One instance's run of the four-term sequence and the suites that hang off
/// it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceReport {
    pub label: String,
    pub groups: Vec<GroupRecord>,
    pub maps: Vec<MapRecord>,
    pub checks: Vec<Check>,
}

impl SequenceReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Checks that are not tied to a single instance.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn failed(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub instances: Vec<SequenceReport>,
    pub suites: Vec<SuiteReport>,
    pub summary: Summary,
    /// Wall-clock seconds per instance label and suite name.
    pub timing: BTreeMap<String, f64>,
}

impl Report {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.instances
            .iter()
            .flat_map(|i| i.checks.iter())
            .chain(self.suites.iter().flat_map(|s| s.checks.iter()))
    }

    pub fn summarize(&mut self) {
        let mut s = Summary::default();
        for c in self.all_checks() {
            match c.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail { .. } => s.fail += 1,
                Verdict::Skip { .. } => s.skip += 1,
            }
        }
        self.summary = s;
    }

    pub fn passed(&self) -> bool {
        self.all_checks().all(|c| !c.verdict.is_fail())
    }

    /// The report as JSON with the timing section removed, for comparing
    /// runs.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    /// Failing checks as `label: check (node) witness` lines.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let items = self
            .instances
            .iter()
            .map(|i| (&i.label, &i.checks))
            .chain(self.suites.iter().map(|s| (&s.name, &s.checks)));
        for (owner, checks) in items {
            for c in checks {
                if let Verdict::Fail { node, witness } = &c.verdict {
                    out.push(format!("{owner}: {} [{node}] {witness}", c.name));
                }
            }
        }
        out
    }
}
