//! Executes the configured compile and test commands against each mutant in
//! an isolated project copy and classifies the outcome.

use std::collections::VecDeque;
use std::fs;
use std::io::{self, Read};
use std::os::unix::fs::symlink;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{CampaignPlan, EngineError, Mutant, MutantStatus};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunnerConfig {
    /// Shell command that compiles the project; nonzero exit = stillborn.
    pub compile_command: String,
    /// Shell command that runs the test suite; nonzero exit = killed.
    pub test_command: String,
    pub timeout_seconds: u64,
    pub parallelism: usize,
    /// Cap on captured output per phase.
    pub log_truncate_bytes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Compile,
    Test,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Phase::Compile => "compile",
            Phase::Test => "test",
        })
    }
}

/// Result of running one mutant: which phase decided it and how.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunOutcome {
    pub mutant_id: String,
    pub phase: Phase,
    /// None when the process was killed (timeout) or died on a signal.
    pub exit_code: Option<i32>,
    /// Wall time for the whole mutant run, sandbox setup and both phases.
    pub duration_ms: u64,
    pub timed_out: bool,
    pub classification: MutantStatus,
    /// Merged stdout+stderr of the deciding phase, truncated.
    pub log: String,
}

#[derive(Debug, Error)]
#[error("baseline {phase} step failed on the unmutated project:\n{log}")]
pub struct BaselineFailure {
    pub phase: Phase,
    pub log: String,
}

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Baseline(#[from] BaselineFailure),
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Exec {
    exit_code: Option<i32>,
    timed_out: bool,
    log: String,
}

impl Exec {
    fn success(&self) -> bool {
        !self.timed_out && self.exit_code == Some(0)
    }
}

/// Runs a shell command with the sandbox as working directory, merging
/// stdout and stderr, killing the whole process group on timeout.
fn run_command(
    command_line: &str,
    cwd: &Path,
    mutant_id: Option<&str>,
    timeout: Duration,
    log_cap: usize,
) -> io::Result<Exec> {
    // Brace grouping redirects stderr for the entire command line, not just
    // its last simple command; the newline guards trailing comments.
    let script = format!("{{ {command_line}\n}} 2>&1");
    let mut command = Command::new("sh");
    command
        .arg("-c")
        .arg(script)
        .current_dir(cwd)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0);
    if let Some(id) = mutant_id {
        command.env("SUMO_MUTANT_ID", id);
    }

    let start = Instant::now();
    let mut child = command.spawn()?;
    let mut stdout = child.stdout.take().expect("stdout was piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 8192];
        loop {
            match stdout.read(&mut chunk) {
                Ok(0) | Err(_) => break,
                // Keep draining past the cap so the child never blocks on a
                // full pipe; just stop storing.
                Ok(n) => {
                    if buf.len() <= log_cap {
                        buf.extend_from_slice(&chunk[..n]);
                    }
                }
            }
        }
        buf
    });

    let deadline = start + timeout;
    let mut timed_out = false;
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if Instant::now() >= deadline {
            timed_out = true;
            kill_group(child.id());
            break;
        }
        thread::sleep(Duration::from_millis(20));
    }
    let status = child.wait()?;
    // Reap any grandchildren still holding the pipe open, or the reader
    // thread would never see EOF.
    kill_group(child.id());
    let bytes = reader.join().unwrap_or_default();

    Ok(Exec {
        exit_code: if timed_out { None } else { status.code() },
        timed_out,
        log: render_log(bytes, log_cap),
    })
}

fn kill_group(pid: u32) {
    unsafe {
        libc::kill(-(pid as i32), libc::SIGKILL);
    }
}

fn render_log(mut bytes: Vec<u8>, cap: usize) -> String {
    let truncated = bytes.len() > cap;
    if truncated {
        bytes.truncate(cap);
    }
    let mut log = String::from_utf8_lossy(&bytes).into_owned();
    if truncated {
        log.push_str("\n[output truncated]");
    }
    log
}

/// Copies the project into `dst`, skipping `.git` and the work directory and
/// symlinking `node_modules` instead of copying it.
fn copy_project(src: &Path, dst: &Path, work_dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dst)?;
    let mut queue = VecDeque::from([(src.to_path_buf(), dst.to_path_buf())]);
    while let Some((from, to)) = queue.pop_front() {
        for entry in fs::read_dir(&from)? {
            let entry = entry?;
            let name = entry.file_name();
            let src_path = entry.path();
            let dst_path = to.join(&name);
            let file_type = entry.file_type()?;
            if file_type.is_symlink() {
                symlink(fs::read_link(&src_path)?, &dst_path)?;
            } else if file_type.is_dir() {
                if name == ".git" || src_path == work_dir {
                    continue;
                }
                if name == "node_modules" {
                    symlink(&src_path, &dst_path)?;
                    continue;
                }
                fs::create_dir(&dst_path)?;
                queue.push_back((src_path, dst_path));
            } else {
                fs::copy(&src_path, &dst_path)?;
            }
        }
    }
    Ok(())
}

fn prepare_sandbox(
    plan: &CampaignPlan,
    mutant: &Mutant,
    project_dir: &Path,
    sandbox: &Path,
    work_dir: &Path,
) -> Result<(), EngineError> {
    if sandbox.exists() {
        fs::remove_dir_all(sandbox)?;
    }
    copy_project(project_dir, sandbox, work_dir)?;
    let text = plan.mutant_text(mutant)?;
    fs::write(sandbox.join(&mutant.mutation.file), text)?;
    Ok(())
}

fn infra_outcome(mutant_id: &str, phase: Phase, message: String) -> RunOutcome {
    RunOutcome {
        mutant_id: mutant_id.to_string(),
        phase,
        exit_code: None,
        duration_ms: 0,
        timed_out: false,
        classification: MutantStatus::InfraError,
        log: message,
    }
}

fn run_one(
    config: &RunnerConfig,
    plan: &CampaignPlan,
    mutant: &Mutant,
    project_dir: &Path,
    runs_dir: &Path,
    work_dir: &Path,
) -> RunOutcome {
    let started = Instant::now();
    let sandbox = runs_dir.join(&mutant.id);
    let timeout = Duration::from_secs(config.timeout_seconds);

    if let Err(err) = prepare_sandbox(plan, mutant, project_dir, &sandbox, work_dir) {
        let _ = fs::remove_dir_all(&sandbox);
        return infra_outcome(
            &mutant.id,
            Phase::Compile,
            format!("sandbox setup failed: {err}"),
        );
    }

    let outcome = (|| {
        let compile = match run_command(
            &config.compile_command,
            &sandbox,
            Some(&mutant.id),
            timeout,
            config.log_truncate_bytes,
        ) {
            Ok(exec) => exec,
            Err(err) => {
                return infra_outcome(
                    &mutant.id,
                    Phase::Compile,
                    format!("cannot spawn compile command: {err}"),
                )
            }
        };
        if !compile.success() {
            return RunOutcome {
                mutant_id: mutant.id.clone(),
                phase: Phase::Compile,
                exit_code: compile.exit_code,
                duration_ms: 0,
                timed_out: compile.timed_out,
                classification: MutantStatus::Stillborn,
                log: compile.log,
            };
        }

        let test = match run_command(
            &config.test_command,
            &sandbox,
            Some(&mutant.id),
            timeout,
            config.log_truncate_bytes,
        ) {
            Ok(exec) => exec,
            Err(err) => {
                return infra_outcome(
                    &mutant.id,
                    Phase::Test,
                    format!("cannot spawn test command: {err}"),
                )
            }
        };
        let classification = if test.timed_out {
            MutantStatus::TimedOut
        } else if test.exit_code == Some(0) {
            MutantStatus::Live
        } else {
            MutantStatus::Killed
        };
        RunOutcome {
            mutant_id: mutant.id.clone(),
            phase: Phase::Test,
            exit_code: test.exit_code,
            duration_ms: 0,
            timed_out: test.timed_out,
            classification,
            log: test.log,
        }
    })();

    let _ = fs::remove_dir_all(&sandbox);
    RunOutcome {
        duration_ms: started.elapsed().as_millis() as u64,
        ..outcome
    }
}

/// Compiles and tests the unmutated project in a sandbox; a failing baseline
/// would classify every mutant as killed, so the campaign must not start.
pub fn baseline_check(
    config: &RunnerConfig,
    project_dir: &Path,
    work_dir: &Path,
) -> Result<(), RunnerError> {
    let runs_dir = work_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    let sandbox = runs_dir.join("baseline");
    if sandbox.exists() {
        fs::remove_dir_all(&sandbox)?;
    }
    copy_project(project_dir, &sandbox, work_dir)?;

    let timeout = Duration::from_secs(config.timeout_seconds);
    let result = (|| {
        for (phase, command_line) in [
            (Phase::Compile, &config.compile_command),
            (Phase::Test, &config.test_command),
        ] {
            let exec = run_command(command_line, &sandbox, None, timeout, config.log_truncate_bytes)?;
            if !exec.success() {
                let mut log = exec.log;
                if exec.timed_out {
                    log.push_str("\n[timed out]");
                }
                return Err(RunnerError::Baseline(BaselineFailure { phase, log }));
            }
        }
        Ok(())
    })();
    let _ = fs::remove_dir_all(&sandbox);
    result
}

/// Runs every mutant in the plan, `parallelism` at a time, reporting each
/// outcome through `progress` as it lands. The returned list is ordered by
/// mutant id (ordinals compared numerically).
pub fn run_campaign(
    config: &RunnerConfig,
    plan: &CampaignPlan,
    project_dir: &Path,
    work_dir: &Path,
    progress: &(dyn Fn(&RunOutcome) + Sync),
) -> Result<Vec<RunOutcome>, RunnerError> {
    let runs_dir = work_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    let project_dir = project_dir.canonicalize()?;
    let work_dir = work_dir.canonicalize()?;

    let next = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<RunOutcome>> = Mutex::new(Vec::with_capacity(plan.mutants.len()));
    thread::scope(|scope| {
        for _ in 0..config.parallelism.max(1) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                let Some(mutant) = plan.mutants.get(index) else {
                    break;
                };
                let outcome = run_one(config, plan, mutant, &project_dir, &runs_dir, &work_dir);
                progress(&outcome);
                outcomes.lock().unwrap().push(outcome);
            });
        }
    });

    let mut outcomes = outcomes.into_inner().unwrap();
    outcomes.sort_by_cached_key(|o| id_sort_key(&o.mutant_id));
    Ok(outcomes)
}

/// Mutant ids sort by (operator + stem, numeric ordinal) so "…-10" follows
/// "…-9" rather than "…-1".
fn id_sort_key(id: &str) -> (String, usize) {
    match id.rsplit_once('-') {
        Some((prefix, ordinal)) => (prefix.to_string(), ordinal.parse().unwrap_or(0)),
        None => (id.to_string(), 0),
    }
}

/// Single sandboxed compile+test of one already-planned mutant, for targeted
/// reruns and tests.
pub fn run_mutant(
    config: &RunnerConfig,
    plan: &CampaignPlan,
    mutant: &Mutant,
    project_dir: &Path,
    work_dir: &Path,
) -> Result<RunOutcome, RunnerError> {
    let runs_dir = work_dir.join("runs");
    fs::create_dir_all(&runs_dir)?;
    let project_dir = project_dir.canonicalize()?;
    let work_dir = work_dir.canonicalize()?;
    Ok(run_one(config, plan, mutant, &project_dir, &runs_dir, &work_dir))
}
