//! Turns classified mutants into the mutation score and the report files.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{CampaignPlan, Mutant, MutantStatus};
use crate::operators::operator_info;
use crate::parser::ParseError;
use crate::runner::RunOutcome;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StatusCounts {
    pub generated: u64,
    pub stillborn: u64,
    pub killed: u64,
    pub live: u64,
    pub timed_out: u64,
    /// Subset of `live` declared equivalent in the config.
    pub equivalent: u64,
}

impl StatusCounts {
    fn add(&mut self, other: &StatusCounts) {
        self.generated += other.generated;
        self.stillborn += other.stillborn;
        self.killed += other.killed;
        self.live += other.live;
        self.timed_out += other.timed_out;
        self.equivalent += other.equivalent;
    }

    fn non_equivalent(&self) -> u64 {
        self.generated - self.stillborn - self.equivalent
    }

    fn surviving(&self) -> u64 {
        self.live - self.equivalent
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Survivor {
    pub mutant_id: String,
    pub file: String,
    pub line: usize,
    pub operator: String,
    /// Unified diff of the surviving change.
    pub excerpt: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Diagnostics {
    /// Files excluded from mutation because they did not parse.
    pub parse_errors: Vec<String>,
    /// Mutants whose sandbox or process spawn failed; excluded from scoring.
    pub infra_errors: Vec<String>,
    /// Mutants that were generated but never run; excluded from scoring.
    pub unresolved: Vec<String>,
}

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.parse_errors.is_empty() && self.infra_errors.is_empty() && self.unresolved.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignReport {
    pub version: String,
    pub generated_at: String,
    /// Echo of the configuration the campaign ran with.
    pub config: serde_json::Value,
    pub per_operator: BTreeMap<String, StatusCounts>,
    pub totals: StatusCounts,
    pub mutation_score_all: Option<f64>,
    pub mutation_score_solidity: Option<f64>,
    pub survivors: Vec<Survivor>,
    pub equivalents: Vec<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("surviving count {surviving} exceeds non-equivalent count {non_equivalent}")]
    InvalidCounts { non_equivalent: u64, surviving: u64 },
    #[error("equivalent mutant id {0} does not match any generated mutant")]
    UnknownEquivalentId(String),
    #[error("mutant {0} is {1}, not live; only live mutants can be declared equivalent")]
    EquivalentNotLive(String, MutantStatus),
}

/// Percentage of killed mutants among the non-equivalent ones, rounded to
/// two decimals. None when there is nothing to score.
pub fn mutation_score(non_equivalent: u64, surviving: u64) -> Result<Option<f64>, ReportError> {
    if surviving > non_equivalent {
        return Err(ReportError::InvalidCounts {
            non_equivalent,
            surviving,
        });
    }
    if non_equivalent == 0 {
        return Ok(None);
    }
    let raw = (non_equivalent - surviving) as f64 / non_equivalent as f64 * 100.0;
    Ok(Some((raw * 100.0).round() / 100.0))
}

/// Everything the `report` command needs to re-render without re-running:
/// the mutants with their final statuses, plus the plan-time diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CampaignRecord {
    pub version: String,
    pub enabled_operators: Vec<String>,
    pub mutants: Vec<Mutant>,
    pub parse_errors: Vec<ParseError>,
}

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("cannot access campaign record: {0}")]
    Io(#[from] io::Error),
    #[error("campaign record is corrupt: {0}")]
    Json(#[from] serde_json::Error),
}

impl CampaignRecord {
    pub fn from_plan(plan: &CampaignPlan) -> Self {
        CampaignRecord {
            version: env!("CARGO_PKG_VERSION").to_string(),
            enabled_operators: plan.enabled_operators.iter().cloned().collect(),
            mutants: plan.mutants.clone(),
            parse_errors: plan.diagnostics.clone(),
        }
    }

    /// Copies each outcome's classification and log onto its mutant.
    pub fn apply_outcomes(&mut self, outcomes: &[RunOutcome]) {
        let by_id: HashMap<&str, &RunOutcome> =
            outcomes.iter().map(|o| (o.mutant_id.as_str(), o)).collect();
        for mutant in &mut self.mutants {
            if let Some(outcome) = by_id.get(mutant.id.as_str()) {
                mutant.status = outcome.classification;
                mutant.run_log = outcome.log.clone();
            }
        }
    }

    pub fn path(work_dir: &Path) -> std::path::PathBuf {
        work_dir.join("campaign.json")
    }

    pub fn save(&self, work_dir: &Path) -> Result<(), PersistError> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::create_dir_all(work_dir)?;
        fs::write(Self::path(work_dir), json)?;
        Ok(())
    }

    pub fn load(work_dir: &Path) -> Result<Self, PersistError> {
        let text = fs::read_to_string(Self::path(work_dir))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Aggregates counts, validates the declared equivalents, and computes both
/// score lines: across all operators and across the Solidity-specific ones.
pub fn build_report(
    record: &CampaignRecord,
    equivalent_ids: &BTreeSet<String>,
    config_echo: serde_json::Value,
    generated_at: &str,
) -> Result<CampaignReport, ReportError> {
    let by_id: HashMap<&str, &Mutant> =
        record.mutants.iter().map(|m| (m.id.as_str(), m)).collect();
    for id in equivalent_ids {
        match by_id.get(id.as_str()) {
            None => return Err(ReportError::UnknownEquivalentId(id.clone())),
            Some(mutant) if mutant.status != MutantStatus::Live => {
                return Err(ReportError::EquivalentNotLive(id.clone(), mutant.status));
            }
            Some(_) => {}
        }
    }

    let mut per_operator: BTreeMap<String, StatusCounts> = record
        .enabled_operators
        .iter()
        .map(|id| (id.clone(), StatusCounts::default()))
        .collect();
    let mut diagnostics = Diagnostics {
        parse_errors: record.parse_errors.iter().map(|e| e.to_string()).collect(),
        ..Diagnostics::default()
    };
    let mut survivors = Vec::new();

    for mutant in &record.mutants {
        let counts = per_operator
            .entry(mutant.mutation.operator.clone())
            .or_default();
        let equivalent = equivalent_ids.contains(&mutant.id);
        match mutant.status {
            MutantStatus::Stillborn => {
                counts.generated += 1;
                counts.stillborn += 1;
            }
            MutantStatus::Killed => {
                counts.generated += 1;
                counts.killed += 1;
            }
            MutantStatus::TimedOut => {
                counts.generated += 1;
                counts.timed_out += 1;
            }
            MutantStatus::Live | MutantStatus::Equivalent => {
                counts.generated += 1;
                counts.live += 1;
                if equivalent || mutant.status == MutantStatus::Equivalent {
                    counts.equivalent += 1;
                } else {
                    survivors.push(Survivor {
                        mutant_id: mutant.id.clone(),
                        file: mutant.mutation.file.clone(),
                        line: mutant.line,
                        operator: mutant.mutation.operator.clone(),
                        excerpt: mutant.diff.clone(),
                    });
                }
            }
            MutantStatus::InfraError => diagnostics.infra_errors.push(mutant.id.clone()),
            MutantStatus::Generated => diagnostics.unresolved.push(mutant.id.clone()),
        }
    }

    let mut totals = StatusCounts::default();
    let mut solidity = StatusCounts::default();
    for (op, counts) in &per_operator {
        totals.add(counts);
        if operator_info(op).is_some_and(|info| info.solidity_specific) {
            solidity.add(counts);
        }
    }

    Ok(CampaignReport {
        version: record.version.clone(),
        generated_at: generated_at.to_string(),
        config: config_echo,
        per_operator,
        mutation_score_all: mutation_score(totals.non_equivalent(), totals.surviving())?,
        mutation_score_solidity: mutation_score(solidity.non_equivalent(), solidity.surviving())?,
        totals,
        survivors,
        equivalents: equivalent_ids.iter().cloned().collect(),
        diagnostics,
    })
}

fn format_score(score: Option<f64>) -> String {
    match score {
        Some(value) => format!("{value:.2}"),
        None => "n/a".to_string(),
    }
}

fn render_markdown(report: &CampaignReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# Mutation testing report");
    let _ = writeln!(md);
    let _ = writeln!(md, "Generated: {}", report.generated_at);
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "- Mutation score, all operators: **{}**",
        format_score(report.mutation_score_all)
    );
    let _ = writeln!(
        md,
        "- Mutation score, Solidity-specific operators: **{}**",
        format_score(report.mutation_score_solidity)
    );
    let t = &report.totals;
    let _ = writeln!(
        md,
        "- Mutants: {} generated, {} stillborn, {} killed, {} live, {} timed out, {} equivalent",
        t.generated, t.stillborn, t.killed, t.live, t.timed_out, t.equivalent
    );
    let _ = writeln!(md);

    let _ = writeln!(md, "## Per-operator results");
    let _ = writeln!(md);
    let _ = writeln!(
        md,
        "| Operator | Generated | Stillborn | Killed | Live | Timed out | Equivalent |"
    );
    let _ = writeln!(md, "|---|---:|---:|---:|---:|---:|---:|");
    for (op, c) in &report.per_operator {
        let _ = writeln!(
            md,
            "| {op} | {} | {} | {} | {} | {} | {} |",
            c.generated, c.stillborn, c.killed, c.live, c.timed_out, c.equivalent
        );
    }
    let _ = writeln!(
        md,
        "| **Total** | {} | {} | {} | {} | {} | {} |",
        t.generated, t.stillborn, t.killed, t.live, t.timed_out, t.equivalent
    );
    let _ = writeln!(md);

    let _ = writeln!(md, "## Surviving mutants ({})", report.survivors.len());
    let _ = writeln!(md);
    if report.survivors.is_empty() {
        let _ = writeln!(md, "None. Every non-equivalent mutant was killed.");
        let _ = writeln!(md);
    }
    for survivor in &report.survivors {
        let name = operator_info(&survivor.operator)
            .map(|info| info.name)
            .unwrap_or(survivor.operator.as_str());
        let _ = writeln!(
            md,
            "### {} — {}:{} ({name})",
            survivor.mutant_id, survivor.file, survivor.line
        );
        let _ = writeln!(md);
        let _ = writeln!(md, "```diff");
        let _ = write!(md, "{}", survivor.excerpt);
        if !survivor.excerpt.ends_with('\n') {
            let _ = writeln!(md);
        }
        let _ = writeln!(md, "```");
        let _ = writeln!(md);
    }

    if !report.equivalents.is_empty() {
        let _ = writeln!(md, "## Declared equivalent mutants");
        let _ = writeln!(md);
        for id in &report.equivalents {
            let _ = writeln!(md, "- {id}");
        }
        let _ = writeln!(md);
    }

    if !report.diagnostics.is_empty() {
        let _ = writeln!(md, "## Diagnostics");
        let _ = writeln!(md);
        for err in &report.diagnostics.parse_errors {
            let _ = writeln!(md, "- parse error: {err}");
        }
        for id in &report.diagnostics.infra_errors {
            let _ = writeln!(md, "- infrastructure error, excluded from score: {id}");
        }
        for id in &report.diagnostics.unresolved {
            let _ = writeln!(md, "- never run, excluded from score: {id}");
        }
        let _ = writeln!(md);
    }
    md
}

/// Writes report.json and report.md into the work directory.
pub fn render_reports(report: &CampaignReport, work_dir: &Path) -> io::Result<()> {
    fs::create_dir_all(work_dir)?;
    let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    json.push('\n');
    fs::write(work_dir.join("report.json"), json)?;
    fs::write(work_dir.join("report.md"), render_markdown(report))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{Mutation, SourceSpan};
    use proptest::prelude::*;

    #[test]
    fn score_matches_the_hand_computed_examples() {
        assert_eq!(mutation_score(10, 4).unwrap(), Some(60.00));
        assert_eq!(mutation_score(10, 0).unwrap(), Some(100.00));
        assert_eq!(mutation_score(3, 1).unwrap(), Some(66.67));
        assert_eq!(mutation_score(0, 0).unwrap(), None);
        assert_eq!(
            mutation_score(3, 4),
            Err(ReportError::InvalidCounts {
                non_equivalent: 3,
                surviving: 4
            })
        );
    }

    proptest! {
        #[test]
        fn score_stays_within_rounding_distance_of_the_exact_ratio(
            non_equivalent in 1u64..1_000_000,
            fraction in 0.0f64..=1.0,
        ) {
            let surviving = ((non_equivalent as f64) * fraction) as u64;
            let surviving = surviving.min(non_equivalent);
            let score = mutation_score(non_equivalent, surviving).unwrap().unwrap();
            let exact = (non_equivalent - surviving) as f64 / non_equivalent as f64 * 100.0;
            prop_assert!((score - exact).abs() <= 0.005 + 1e-9);
        }
    }

    fn mutant(id: &str, op: &str, ordinal_line: usize, status: MutantStatus) -> Mutant {
        Mutant {
            id: id.to_string(),
            mutation: Mutation {
                operator: op.to_string(),
                span: SourceSpan { start: 0, end: 1 },
                original: "x".to_string(),
                replacement: "y".to_string(),
                file: "contracts/T.sol".to_string(),
                node_path: "contract T".to_string(),
            },
            line: ordinal_line,
            status,
            diff: format!("--- a/contracts/T.sol\n+++ b/contracts/T.sol\n@@ {id} @@\n"),
            run_log: String::new(),
        }
    }

    fn record(mutants: Vec<Mutant>) -> CampaignRecord {
        let mut enabled: Vec<String> = mutants
            .iter()
            .map(|m| m.mutation.operator.clone())
            .collect();
        enabled.sort();
        enabled.dedup();
        CampaignRecord {
            version: "test".to_string(),
            enabled_operators: enabled,
            mutants,
            parse_errors: Vec::new(),
        }
    }

    fn ids(ids: &[&str]) -> BTreeSet<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn five_mutants_with_one_equivalent_score_66_67() {
        let record = record(vec![
            mutant("BLR-T-1", "BLR", 1, MutantStatus::Stillborn),
            mutant("BLR-T-2", "BLR", 2, MutantStatus::Killed),
            mutant("BLR-T-3", "BLR", 3, MutantStatus::Killed),
            mutant("BLR-T-4", "BLR", 4, MutantStatus::Live),
            mutant("BLR-T-5", "BLR", 5, MutantStatus::Live),
        ]);
        let report = build_report(
            &record,
            &ids(&["BLR-T-5"]),
            serde_json::Value::Null,
            "now",
        )
        .unwrap();
        assert_eq!(report.totals.generated, 5);
        assert_eq!(report.totals.live, 2);
        assert_eq!(report.totals.equivalent, 1);
        assert_eq!(report.mutation_score_all, Some(66.67));
        assert_eq!(report.survivors.len(), 1);
        assert_eq!(report.survivors[0].mutant_id, "BLR-T-4");
    }

    #[test]
    fn an_empty_campaign_reports_zero_totals_and_no_score() {
        let report = build_report(
            &record(Vec::new()),
            &BTreeSet::new(),
            serde_json::Value::Null,
            "now",
        )
        .unwrap();
        assert_eq!(report.totals, StatusCounts::default());
        assert_eq!(report.mutation_score_all, None);
        assert_eq!(report.mutation_score_solidity, None);
        assert!(report.survivors.is_empty());
        let md = render_markdown(&report);
        assert!(md.contains("n/a"));
    }

    #[test]
    fn unknown_equivalent_ids_are_rejected() {
        let record = record(vec![mutant("BLR-T-1", "BLR", 1, MutantStatus::Live)]);
        let err = build_report(
            &record,
            &ids(&["BLR-T-9"]),
            serde_json::Value::Null,
            "now",
        )
        .unwrap_err();
        assert_eq!(err, ReportError::UnknownEquivalentId("BLR-T-9".to_string()));
    }

    #[test]
    fn only_live_mutants_can_be_declared_equivalent() {
        let record = record(vec![mutant("BLR-T-1", "BLR", 1, MutantStatus::Killed)]);
        let err = build_report(
            &record,
            &ids(&["BLR-T-1"]),
            serde_json::Value::Null,
            "now",
        )
        .unwrap_err();
        assert_eq!(
            err,
            ReportError::EquivalentNotLive("BLR-T-1".to_string(), MutantStatus::Killed)
        );
    }

    #[test]
    fn the_solidity_score_counts_only_solidity_specific_operators() {
        // PKD is Solidity-specific, BLR is general. PKD: 1 killed of 1;
        // BLR: 1 live of 1. All-operator score 50.00, Solidity-only 100.00.
        let record = record(vec![
            mutant("BLR-T-1", "BLR", 1, MutantStatus::Live),
            mutant("PKD-T-1", "PKD", 2, MutantStatus::Killed),
        ]);
        let report =
            build_report(&record, &BTreeSet::new(), serde_json::Value::Null, "now").unwrap();
        assert_eq!(report.mutation_score_all, Some(50.00));
        assert_eq!(report.mutation_score_solidity, Some(100.00));

        let mut summed = StatusCounts::default();
        for counts in report.per_operator.values() {
            summed.add(counts);
        }
        assert_eq!(summed, report.totals);
    }

    #[test]
    fn timed_out_mutants_count_as_killed_in_the_score() {
        let record = record(vec![
            mutant("BLR-T-1", "BLR", 1, MutantStatus::TimedOut),
            mutant("BLR-T-2", "BLR", 2, MutantStatus::TimedOut),
        ]);
        let report =
            build_report(&record, &BTreeSet::new(), serde_json::Value::Null, "now").unwrap();
        assert_eq!(report.totals.timed_out, 2);
        assert_eq!(report.mutation_score_all, Some(100.00));
    }

    #[test]
    fn infra_errors_and_unrun_mutants_stay_out_of_the_counts() {
        let record = record(vec![
            mutant("BLR-T-1", "BLR", 1, MutantStatus::Killed),
            mutant("BLR-T-2", "BLR", 2, MutantStatus::InfraError),
            mutant("BLR-T-3", "BLR", 3, MutantStatus::Generated),
        ]);
        let report =
            build_report(&record, &BTreeSet::new(), serde_json::Value::Null, "now").unwrap();
        assert_eq!(report.totals.generated, 1);
        assert_eq!(report.mutation_score_all, Some(100.00));
        assert_eq!(report.diagnostics.infra_errors, vec!["BLR-T-2"]);
        assert_eq!(report.diagnostics.unresolved, vec!["BLR-T-3"]);
    }

    #[test]
    fn enabled_operators_with_no_mutants_keep_a_zero_row() {
        let mut record = record(vec![mutant("BLR-T-1", "BLR", 1, MutantStatus::Killed)]);
        record.enabled_operators.push("VVR".to_string());
        let report =
            build_report(&record, &BTreeSet::new(), serde_json::Value::Null, "now").unwrap();
        assert_eq!(report.per_operator["VVR"], StatusCounts::default());
    }

    #[test]
    fn rendered_reports_round_trip_and_list_survivors() {
        let dir = tempfile::tempdir().unwrap();
        let record = record(vec![
            mutant("BLR-T-1", "BLR", 7, MutantStatus::Live),
            mutant("PKD-T-1", "PKD", 2, MutantStatus::Killed),
        ]);
        let report = build_report(
            &record,
            &BTreeSet::new(),
            serde_json::json!({"testCommand": "npm test"}),
            "2026-01-01T00:00:00Z",
        )
        .unwrap();
        render_reports(&report, dir.path()).unwrap();

        let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
        let parsed: CampaignReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, report);
        // The stored score must be reproducible from the stored totals.
        assert_eq!(
            mutation_score(
                parsed.totals.non_equivalent(),
                parsed.totals.surviving()
            )
            .unwrap(),
            parsed.mutation_score_all
        );
        assert!(json.contains("\"mutationScoreAll\": 50.0"));

        let md = fs::read_to_string(dir.path().join("report.md")).unwrap();
        assert!(md.contains("BLR-T-1"));
        assert!(md.contains("contracts/T.sol:7"));
        assert!(md.contains("```diff"));
        assert!(md.contains("| PKD | 1 | 0 | 1 | 0 | 0 | 0 |"));
    }

    #[test]
    fn outcomes_overwrite_the_stored_statuses() {
        let mut record = record(vec![
            mutant("BLR-T-1", "BLR", 1, MutantStatus::Generated),
            mutant("BLR-T-2", "BLR", 2, MutantStatus::Generated),
        ]);
        record.apply_outcomes(&[RunOutcome {
            mutant_id: "BLR-T-2".to_string(),
            phase: crate::runner::Phase::Test,
            exit_code: Some(1),
            duration_ms: 12,
            timed_out: false,
            classification: MutantStatus::Killed,
            log: "assertion failed".to_string(),
        }]);
        assert_eq!(record.mutants[0].status, MutantStatus::Generated);
        assert_eq!(record.mutants[1].status, MutantStatus::Killed);
        assert_eq!(record.mutants[1].run_log, "assertion failed");
    }

    #[test]
    fn campaign_records_persist_and_reload() {
        let dir = tempfile::tempdir().unwrap();
        let record = record(vec![mutant("BLR-T-1", "BLR", 1, MutantStatus::Live)]);
        record.save(dir.path()).unwrap();
        let loaded = CampaignRecord::load(dir.path()).unwrap();
        assert_eq!(loaded, record);
    }
}
