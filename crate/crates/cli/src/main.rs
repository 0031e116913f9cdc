mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use config::Config;
use sumo_core::engine::{generate_campaign, materialize, CampaignPlan, MutantStatus};
use sumo_core::operators::CATALOG;
use sumo_core::parser::discover_targets;
use sumo_core::report::{
    build_report, render_reports, CampaignRecord, CampaignReport, PersistError,
};
use sumo_core::runner::{baseline_check, run_campaign, RunnerConfig, RunnerError};

#[derive(Parser)]
#[command(
    name = "sumo",
    version,
    about = "Mutation testing for Solidity projects"
)]
struct Cli {
    /// Path to the configuration file.
    #[arg(short, long, global = true, default_value = "sumo.toml")]
    config: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the operator catalog with enablement flags.
    ListOperators,
    /// Enable operators by id and persist the flags to the config file.
    Enable {
        #[arg(required = true)]
        ids: Vec<String>,
    },
    /// Disable operators by id and persist the flags to the config file.
    Disable {
        #[arg(required = true)]
        ids: Vec<String>,
    },
    /// Parse the targets and print the expected mutant count per operator.
    Preflight(Overrides),
    /// Generate mutants and write their trees and diffs to the work directory.
    Mutate(Overrides),
    /// Run the full campaign: baseline, mutate, execute, report.
    Test(Overrides),
    /// Re-render the reports from the stored campaign outcomes.
    Report(Overrides),
}

/// Command-line overrides; a set flag wins over the config file value.
#[derive(Args, Default)]
struct Overrides {
    /// Project root containing the contracts
    #[arg(long)]
    project_dir: Option<PathBuf>,
    /// Shell command that compiles the project
    #[arg(long)]
    compile_command: Option<String>,
    /// Shell command that runs the test suite
    #[arg(long)]
    test_command: Option<String>,
    /// Per-phase timeout for compile and test runs
    #[arg(long)]
    timeout_seconds: Option<u64>,
    /// Number of mutants to run concurrently
    #[arg(long)]
    parallelism: Option<usize>,
    /// Directory for sandboxes, campaign state, and reports
    #[arg(long)]
    work_dir: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_baseline_failure(&err) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn is_baseline_failure(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<RunnerError>(),
            Some(RunnerError::Baseline(_))
        )
    })
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::ListOperators => list_operators(&cli.config),
        Command::Enable { ids } => set_flags(&cli.config, &ids, true),
        Command::Disable { ids } => set_flags(&cli.config, &ids, false),
        Command::Preflight(overrides) => preflight(&cli.config, &overrides),
        Command::Mutate(overrides) => {
            mutate(&cli.config, &overrides)?;
            Ok(())
        }
        Command::Test(overrides) => test(&cli.config, &overrides),
        Command::Report(overrides) => report(&cli.config, &overrides),
    }
}

fn effective_config(path: &Path, overrides: &Overrides) -> anyhow::Result<Config> {
    let mut config = Config::load(path)?;
    if let Some(dir) = &overrides.project_dir {
        config.project_dir = dir.clone();
    }
    if let Some(cmd) = &overrides.compile_command {
        config.compile_command = cmd.clone();
    }
    if let Some(cmd) = &overrides.test_command {
        config.test_command = cmd.clone();
    }
    if let Some(seconds) = overrides.timeout_seconds {
        config.timeout_seconds = seconds;
    }
    if let Some(parallelism) = overrides.parallelism {
        config.parallelism = parallelism;
    }
    if let Some(dir) = &overrides.work_dir {
        config.work_dir = dir.clone();
    }
    config.validate()?;
    Ok(config)
}

fn list_operators(config_path: &Path) -> anyhow::Result<()> {
    let config = Config::load(config_path)?;
    let name_width = CATALOG.iter().map(|info| info.name.len()).max().unwrap_or(0);
    let mut solidity = 0;
    let mut general = 0;
    for info in CATALOG {
        let category = if info.solidity_specific {
            solidity += 1;
            "Solidity"
        } else {
            general += 1;
            "General"
        };
        let state = if config.operator_enabled(info.id) {
            "enabled"
        } else {
            "disabled"
        };
        println!(
            "{:<4}  {:<name_width$}  {:<8}  {}",
            info.id, info.name, category, state
        );
    }
    println!(
        "{} operators: {} Solidity-specific, {} general",
        CATALOG.len(),
        solidity,
        general
    );
    Ok(())
}

fn set_flags(config_path: &Path, ids: &[String], enabled: bool) -> anyhow::Result<()> {
    config::set_operator_flags(config_path, ids, enabled)?;
    let verb = if enabled { "enabled" } else { "disabled" };
    for id in ids {
        println!("{verb} {id}");
    }
    Ok(())
}

fn plan_campaign(config: &Config) -> anyhow::Result<CampaignPlan> {
    let work_name = Path::new(&config.work_dir)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| config.work_dir.clone());
    let exclude = [".git", "node_modules", work_name.as_str()];
    let targets = discover_targets(
        &config.project_dir,
        &config.contracts_glob,
        &config.skip_contracts,
        &exclude,
    )?;
    let plan = generate_campaign(&config.project_dir, &targets, &config.enabled_operators());
    for err in &plan.diagnostics {
        eprintln!("warning: skipping unparsable file: {err}");
    }
    Ok(plan)
}

fn preflight(config_path: &Path, overrides: &Overrides) -> anyhow::Result<()> {
    let config = effective_config(config_path, overrides)?;
    let plan = plan_campaign(&config)?;
    for (op, count) in &plan.per_operator_counts {
        println!("{op}: {count}");
    }
    println!("total: {}", plan.mutants.len());
    Ok(())
}

fn mutate(config_path: &Path, overrides: &Overrides) -> anyhow::Result<(Config, CampaignPlan)> {
    let config = effective_config(config_path, overrides)?;
    let plan = plan_campaign(&config)?;
    let work_dir = config.work_dir_path();
    let mutants_dir = materialize(&plan, &work_dir)?;
    CampaignRecord::from_plan(&plan).save(&work_dir)?;
    println!(
        "{} mutants written to {}",
        plan.mutants.len(),
        mutants_dir.display()
    );
    Ok((config, plan))
}

fn runner_config(config: &Config) -> RunnerConfig {
    RunnerConfig {
        compile_command: config.compile_command.clone(),
        test_command: config.test_command.clone(),
        timeout_seconds: config.timeout_seconds,
        parallelism: config.parallelism,
        log_truncate_bytes: config.log_truncate_bytes,
    }
}

fn now_utc() -> String {
    time::OffsetDateTime::now_utc()
        .format(&time::format_description::well_known::Rfc3339)
        .unwrap_or_else(|_| "unknown".to_string())
}

fn finish_report(
    config: &Config,
    record: &CampaignRecord,
    work_dir: &Path,
) -> anyhow::Result<CampaignReport> {
    let echo = serde_json::to_value(config).context("config echo")?;
    let report = build_report(record, &config.equivalent_ids(), echo, &now_utc())?;
    render_reports(&report, work_dir)?;
    Ok(report)
}

fn format_score(score: Option<f64>) -> String {
    match score {
        Some(value) => format!("{value:.2}"),
        None => "n/a".to_string(),
    }
}

fn print_summary(report: &CampaignReport, work_dir: &Path) {
    let t = &report.totals;
    println!(
        "{} mutants: {} killed, {} live, {} timed out, {} stillborn, {} equivalent",
        t.generated, t.killed, t.live, t.timed_out, t.stillborn, t.equivalent
    );
    println!(
        "mutation score (all operators): {}",
        format_score(report.mutation_score_all)
    );
    println!(
        "mutation score (Solidity-specific): {}",
        format_score(report.mutation_score_solidity)
    );
    println!(
        "reports written to {} and {}",
        work_dir.join("report.json").display(),
        work_dir.join("report.md").display()
    );
}

fn test(config_path: &Path, overrides: &Overrides) -> anyhow::Result<()> {
    let config = effective_config(config_path, overrides)?;
    config.require_commands()?;
    let work_dir = config.work_dir_path();
    let runner = runner_config(&config);

    baseline_check(&runner, &config.project_dir, &work_dir)?;
    println!("baseline ok: compile and test pass on the unmutated project");

    let plan = plan_campaign(&config)?;
    let mutants_dir = materialize(&plan, &work_dir)?;
    let mut record = CampaignRecord::from_plan(&plan);
    record.save(&work_dir)?;
    println!(
        "{} mutants written to {}",
        plan.mutants.len(),
        mutants_dir.display()
    );

    let total = plan.mutants.len();
    let done = AtomicUsize::new(0);
    let outcomes = run_campaign(&runner, &plan, &config.project_dir, &work_dir, &|outcome| {
        let n = done.fetch_add(1, Ordering::Relaxed) + 1;
        println!(
            "[{n}/{total}] {} {} ({} ms)",
            outcome.mutant_id,
            outcome.classification.as_str(),
            outcome.duration_ms
        );
    })?;

    record.apply_outcomes(&outcomes);
    record.save(&work_dir)?;
    let report = finish_report(&config, &record, &work_dir)?;
    print_summary(&report, &work_dir);
    Ok(())
}

fn report(config_path: &Path, overrides: &Overrides) -> anyhow::Result<()> {
    let config = effective_config(config_path, overrides)?;
    let work_dir = config.work_dir_path();
    let record = CampaignRecord::load(&work_dir).map_err(|err| match err {
        PersistError::Io(source) if source.kind() == std::io::ErrorKind::NotFound => {
            anyhow!(
                "no stored campaign under {}; run `sumo test` first",
                work_dir.display()
            )
        }
        other => anyhow::Error::from(other),
    })?;
    if record
        .mutants
        .iter()
        .any(|m| m.status == MutantStatus::Generated)
    {
        eprintln!("warning: the stored campaign has mutants that never ran; run `sumo test`");
    }
    let report = finish_report(&config, &record, &work_dir)?;
    print_summary(&report, &work_dir);
    Ok(())
}
