//! Campaign assembly: loads the target files, applies the enabled operators,
//! deduplicates mutants by output text, assigns stable ids, and materializes
//! mutant file trees with unified diffs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{splice, Mutation, SpliceError};
use crate::operators::CATALOG;
use crate::parser::{content_hash, line_col, ParseError, SourceFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutantStatus {
    Generated,
    Stillborn,
    Killed,
    Live,
    TimedOut,
    Equivalent,
    /// Sandbox setup or process spawn failed; excluded from scoring.
    InfraError,
}

impl MutantStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MutantStatus::Generated => "generated",
            MutantStatus::Stillborn => "stillborn",
            MutantStatus::Killed => "killed",
            MutantStatus::Live => "live",
            MutantStatus::TimedOut => "timed-out",
            MutantStatus::Equivalent => "equivalent",
            MutantStatus::InfraError => "infra-error",
        }
    }
}

impl std::fmt::Display for MutantStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One generated mutant: the edit, its campaign-unique id, and the fields the
/// runner fills in later.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mutant {
    /// "<OP>-<fileStem>-<ordinal>", ordinal 1-based in source order per
    /// operator per file.
    pub id: String,
    pub mutation: Mutation,
    /// 1-based line of the mutation site in the original file.
    pub line: usize,
    pub status: MutantStatus,
    /// Unified diff against the original file, paths as a/… and b/….
    pub diff: String,
    /// Captured compile/test output, truncated by the runner.
    #[serde(default)]
    pub run_log: String,
}

#[derive(Debug)]
pub struct CampaignPlan {
    pub targets: Vec<SourceFile>,
    pub enabled_operators: BTreeSet<String>,
    pub mutants: Vec<Mutant>,
    pub per_operator_counts: BTreeMap<String, usize>,
    /// Files dropped from the campaign because they failed to parse.
    pub diagnostics: Vec<ParseError>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("mutant references unknown target file {0:?}")]
    UnknownTarget(String),
    #[error(transparent)]
    Splice(#[from] SpliceError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CampaignPlan {
    pub fn target(&self, path: &str) -> Option<&SourceFile> {
        self.targets.iter().find(|t| t.path == path)
    }

    /// The full mutated file text for one mutant.
    pub fn mutant_text(&self, mutant: &Mutant) -> Result<String, EngineError> {
        let target = self
            .target(&mutant.mutation.file)
            .ok_or_else(|| EngineError::UnknownTarget(mutant.mutation.file.clone()))?;
        Ok(splice(&target.text, &mutant.mutation)?)
    }
}

/// Loads every target, applies the enabled operators, and assembles the
/// campaign plan. Files that fail to parse are excluded individually and
/// recorded in the plan's diagnostics; mutants whose spliced file text is
/// byte-identical are collapsed to one, keeping the lexicographically
/// smallest operator id.
pub fn generate_campaign(
    project_dir: &Path,
    target_paths: &[String],
    enabled: &BTreeSet<String>,
) -> CampaignPlan {
    let mut paths: Vec<&String> = target_paths.iter().collect();
    paths.sort();
    paths.dedup();

    let mut targets = Vec::new();
    let mut diagnostics = Vec::new();
    for rel in paths {
        match SourceFile::load(project_dir, rel) {
            Ok(file) => targets.push(file),
            Err(err) => diagnostics.push(err),
        }
    }

    // Catalog ids happen to be handy here in sorted order: processing
    // operators lexicographically makes first-wins dedup keep the smallest id.
    let mut op_order: Vec<&str> = CATALOG
        .iter()
        .map(|o| o.id)
        .filter(|id| enabled.contains(*id))
        .collect();
    op_order.sort_unstable();

    let mut ordinals: HashMap<(String, String), usize> = HashMap::new();
    let mut mutants = Vec::new();
    for file in &targets {
        let prepared = crate::operators::prepare(file);
        let mut seen: HashSet<String> = HashSet::new();
        for op in &op_order {
            for mutation in prepared.apply(op) {
                let text = splice(&file.text, &mutation)
                    .expect("operator output splices onto its own source");
                if !seen.insert(content_hash(&text)) {
                    continue;
                }
                let ordinal = ordinals
                    .entry((mutation.operator.clone(), file.stem().to_string()))
                    .or_insert(0);
                *ordinal += 1;
                let id = format!("{}-{}-{}", mutation.operator, file.stem(), ordinal);
                let diff = unified_diff(&file.path, &file.text, &text);
                let (line, _) = line_col(&file.text, mutation.span.start);
                mutants.push(Mutant {
                    id,
                    mutation,
                    line,
                    status: MutantStatus::Generated,
                    diff,
                    run_log: String::new(),
                });
            }
        }
    }

    let mut per_operator_counts: BTreeMap<String, usize> =
        enabled.iter().map(|id| (id.clone(), 0)).collect();
    for mutant in &mutants {
        if let Some(count) = per_operator_counts.get_mut(&mutant.mutation.operator) {
            *count += 1;
        }
    }

    CampaignPlan {
        targets,
        enabled_operators: enabled.clone(),
        mutants,
        per_operator_counts,
        diagnostics,
    }
}

fn unified_diff(rel_path: &str, original: &str, mutated: &str) -> String {
    let diff = similar::TextDiff::from_lines(original, mutated);
    let mut unified = diff.unified_diff();
    unified
        .context_radius(3)
        .header(&format!("a/{rel_path}"), &format!("b/{rel_path}"));
    unified.to_string()
}

/// Writes `workDir/mutants/<id>/<original relative path>` with the spliced
/// text plus `<id>.diff` for every mutant. The tree is built in a staging
/// directory and swapped in whole, so a previous mutants directory is never
/// left half-replaced. Returns the mutants directory path.
pub fn materialize(plan: &CampaignPlan, work_dir: &Path) -> Result<PathBuf, EngineError> {
    let mutants_dir = work_dir.join("mutants");
    let staging = work_dir.join(format!(".mutants-staging-{}", std::process::id()));
    if staging.exists() {
        fs::remove_dir_all(&staging)?;
    }
    fs::create_dir_all(&staging)?;

    let result = write_mutant_tree(plan, &staging);
    if result.is_err() {
        let _ = fs::remove_dir_all(&staging);
        return result.map(|_| mutants_dir);
    }

    if mutants_dir.exists() {
        let retired = work_dir.join(format!(".mutants-retired-{}", std::process::id()));
        if retired.exists() {
            fs::remove_dir_all(&retired)?;
        }
        fs::rename(&mutants_dir, &retired)?;
        fs::rename(&staging, &mutants_dir)?;
        fs::remove_dir_all(&retired)?;
    } else {
        fs::rename(&staging, &mutants_dir)?;
    }
    Ok(mutants_dir)
}

fn write_mutant_tree(plan: &CampaignPlan, root: &Path) -> Result<(), EngineError> {
    for mutant in &plan.mutants {
        let text = plan.mutant_text(mutant)?;
        let dest = root.join(&mutant.id).join(&mutant.mutation.file);
        if let Some(parent) = dest.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&dest, text)?;
        fs::write(root.join(format!("{}.diff", mutant.id)), &mutant.diff)?;
    }
    Ok(())
}
