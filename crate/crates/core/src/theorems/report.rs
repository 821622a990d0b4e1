use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynmap::Point;
use crate::ff::{Field, FieldSpec};
use crate::mpoly::DEFAULT_TERM_BUDGET;
use crate::orbits::{DepthTable, DEFAULT_ORBIT_BUDGET, DEFAULT_SCAN_CAP};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimId {
    Thm1Forward,
    Thm1Converse,
    Thm2,
    Thm3,
    Thm4,
    Lemma5,
}

impl ClaimId {
    pub fn as_str(self) -> &'static str {
        match self {
            ClaimId::Thm1Forward => "thm1_forward",
            ClaimId::Thm1Converse => "thm1_converse",
            ClaimId::Thm2 => "thm2",
            ClaimId::Thm3 => "thm3",
            ClaimId::Thm4 => "thm4",
            ClaimId::Lemma5 => "lemma5",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Inconclusive,
    Falsified,
}

impl Verdict {
    /// The worst of a set of verdicts: falsified beats inconclusive beats verified.
    pub fn combine(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        verdicts.into_iter().max().unwrap_or(Verdict::Verified)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Falsified => "falsified",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub orbit_steps: u64,
    pub term_budget: u64,
    pub scan_cap: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            orbit_steps: DEFAULT_ORBIT_BUDGET,
            term_budget: DEFAULT_TERM_BUDGET as u64,
            scan_cap: DEFAULT_SCAN_CAP,
        }
    }
}

/// A concrete piece of evidence attached to a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportWitness {
    pub role: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub point: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cycle_len: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<Value>,
}

impl ReportWitness {
    pub fn point(role: &str, m: u32, field: &Field, p: &Point) -> Self {
        ReportWitness {
            role: role.into(),
            m: Some(m),
            point: Some(p.coeffs(field)),
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    pub points_scanned: u64,
    pub max_depth: Option<u64>,
    pub depth_hist: BTreeMap<u64, u64>,
    pub max_depth_by_m: BTreeMap<u32, Option<u64>>,
    pub tables: Vec<DepthTable>,
    pub extra: BTreeMap<String, Value>,
}

impl ReportStats {
    pub fn add_table(&mut self, m: u32, table: &DepthTable) {
        self.points_scanned += table.point_count;
        for (d, c) in &table.depth_histogram {
            *self.depth_hist.entry(*d).or_insert(0) += c;
        }
        self.max_depth = self.max_depth.max(table.max_depth);
        self.max_depth_by_m.insert(m, table.max_depth);
        self.tables.push(table.clone());
    }

    pub fn budget_exhaustions(&self) -> u64 {
        self.tables.iter().map(|t| t.budget_exhausted_count).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldInfo {
    pub p: u64,
    pub m: u32,
    pub modulus: Vec<u64>,
}

impl From<&FieldSpec> for FieldInfo {
    fn from(s: &FieldSpec) -> Self {
        FieldInfo {
            p: s.p,
            m: s.m,
            modulus: s.modulus.clone(),
        }
    }
}

/// One verified, falsified, or inconclusive claim, with everything needed
/// to rerun it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: ClaimId,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub witnesses: Vec<ReportWitness>,
    pub stats: ReportStats,
    /// The largest field used.
    pub field: Option<FieldInfo>,
    /// Every field used, smallest first.
    pub moduli: Vec<FieldSpec>,
    pub budgets: Budgets,
    pub seed: u64,
    pub tool_version: String,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    pub fn new(claim: ClaimId, budgets: Budgets) -> Self {
        VerificationReport {
            claim,
            params: BTreeMap::new(),
            verdict: Verdict::Inconclusive,
            witnesses: Vec::new(),
            stats: ReportStats::default(),
            field: None,
            moduli: Vec::new(),
            budgets,
            seed: 0,
            tool_version: TOOL_VERSION.to_string(),
            elapsed_ms: 0,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn extra(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.stats.extra.insert(key.to_string(), value.into());
        self
    }

    pub fn use_field(&mut self, spec: &FieldSpec) {
        if !self.moduli.contains(spec) {
            self.moduli.push(spec.clone());
        }
        if self.field.as_ref().is_none_or(|f| spec.q > f.p.pow(f.m)) {
            self.field = Some(spec.into());
        }
    }

    /// Set the verdict, applying the downgrade rule: a run with any budget
    /// exhaustion is never `verified`.
    pub fn settle(&mut self, verdict: Verdict) {
        self.verdict = if verdict == Verdict::Verified && self.stats.budget_exhaustions() > 0 {
            Verdict::Inconclusive
        } else {
            verdict
        };
    }

    /// Structural checks every report must pass.
    pub fn validate(&self) -> Result<(), String> {
        if self.verdict == Verdict::Falsified && self.witnesses.is_empty() {
            return Err("falsified report without a witness".into());
        }
        if self.verdict == Verdict::Verified && self.stats.budget_exhaustions() > 0 {
            return Err("verified report with exhausted orbit budgets".into());
        }
        if self.budgets.orbit_steps == 0 || self.budgets.scan_cap == 0 || self.budgets.term_budget == 0 {
            return Err("budgets must be positive".into());
        }
        for t in &self.stats.tables {
            if t.terminating_count() + t.non_terminating_count != t.point_count {
                return Err(format!("depth table over {} does not add up", t.spec));
            }
        }
        Ok(())
    }

    /// The report with the timing field zeroed, for byte comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}
