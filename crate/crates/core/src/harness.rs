//! Repository measurement harness: walks version-control history
//! snapshots, times build and test commands with a monotonic clock, and
//! ingests JUnit-style XML reports for per-test durations.
//!
//! All git interaction shells out to the `git` CLI with porcelain-stable
//! flags; all command execution goes through `sh -c` in the repository
//! directory with a polled timeout.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// One history checkpoint to measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    /// Commit hash, tag, or branch name resolvable by the repository.
    pub id: String,
    /// Human-readable name; defaults to the id.
    pub label: String,
    /// Position in the configured snapshot list.
    pub checkout_order: usize,
}

/// Measurement run configuration, read from a plain-text file of
/// `key = value` lines plus one `[snapshot]` section per checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub repo_path: PathBuf,
    pub snapshots: Vec<Snapshot>,
    pub build_command: String,
    pub test_command: String,
    /// Timed test runs per snapshot; the median is kept.
    pub repetitions: usize,
    /// Discarded runs before timing starts.
    pub warmup_runs: usize,
    /// Per-invocation wall-clock limit for build and test commands.
    pub timeout_seconds: f64,
    /// Pattern for JUnit-style XML reports, relative to the repository.
    pub report_glob: Option<String>,
}

/// Timing measurements for one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingRecord {
    pub snapshot: String,
    pub build_seconds: f64,
    /// Median of `repetition_values`; 0 when the build failed.
    pub test_seconds: f64,
    /// Per-test durations from report files, when a glob is configured.
    pub per_test_seconds: Option<BTreeMap<String, f64>>,
    pub repetition_values: Vec<f64>,
    /// Exit status of the final test repetition (or of the failed build).
    pub exit_status: i32,
    /// Non-fatal observations: build failures, unreadable reports,
    /// per-test sums that exceed the aggregate sanity bound.
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("config is missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid config: {0}")]
    Invariant(String),
}

#[derive(Debug, thiserror::Error)]
pub enum WalkError {
    #[error("working tree has uncommitted changes:\n{0}")]
    DirtyWorkingTree(String),
    #[error("git: {0}")]
    Git(String),
}

/// Why one snapshot produced no visitor result; the walk continues.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SnapshotError {
    #[error("unknown snapshot `{0}`")]
    UnknownSnapshot(String),
    #[error("checkout failed: {0}")]
    CheckoutFailed(String),
    #[error("{0}")]
    Visitor(String),
}

#[derive(Debug, thiserror::Error)]
pub enum TimeError {
    #[error("`{command}` exceeded the {limit_seconds}s timeout")]
    Timeout { command: String, limit_seconds: f64 },
    #[error("cannot run `{command}`: {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, thiserror::Error)]
#[error("malformed test report: {0}")]
pub struct MalformedReport(String);

// ----- configuration ---------------------------------------------------------

/// Parse a run configuration from `key = value` text. `#` starts a
/// comment, `[snapshot]` opens a snapshot section with `id` and optional
/// `label` keys, and unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut repo_path: Option<PathBuf> = None;
    let mut build_command: Option<String> = None;
    let mut test_command: Option<String> = None;
    let mut repetitions: usize = 3;
    let mut warmup_runs: usize = 1;
    let mut timeout_seconds: Option<f64> = None;
    let mut report_glob: Option<String> = None;

    struct PartialSnapshot {
        line: usize,
        id: Option<String>,
        label: Option<String>,
    }
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut current: Option<PartialSnapshot> = None;

    let finish =
        |current: &mut Option<PartialSnapshot>, snapshots: &mut Vec<Snapshot>| -> Result<(), ConfigError> {
            if let Some(partial) = current.take() {
                let id = partial.id.ok_or(ConfigError::Parse {
                    line: partial.line,
                    message: "[snapshot] section has no `id`".to_string(),
                })?;
                let label = partial.label.unwrap_or_else(|| id.clone());
                snapshots.push(Snapshot { id, label, checkout_order: snapshots.len() });
            }
            Ok(())
        };

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(section) = line.strip_prefix('[') {
            let name = section.strip_suffix(']').ok_or(ConfigError::Parse {
                line: line_no,
                message: format!("unterminated section header `{line}`"),
            })?;
            if name != "snapshot" {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("unknown section `[{name}]`"),
                });
            }
            finish(&mut current, &mut snapshots)?;
            current = Some(PartialSnapshot { line: line_no, id: None, label: None });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Parse {
            line: line_no,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_number = |what: &str| -> Result<f64, ConfigError> {
            value.parse::<f64>().map_err(|_| ConfigError::Parse {
                line: line_no,
                message: format!("`{key}` expects {what}, got `{value}`"),
            })
        };
        if let Some(partial) = current.as_mut() {
            match key {
                "id" => partial.id = Some(value.to_string()),
                "label" => partial.label = Some(value.to_string()),
                other => {
                    return Err(ConfigError::Parse {
                        line: line_no,
                        message: format!("unknown snapshot key `{other}`"),
                    })
                }
            }
            continue;
        }
        match key {
            "repo_path" => repo_path = Some(PathBuf::from(value)),
            "build_command" => build_command = Some(value.to_string()),
            "test_command" => test_command = Some(value.to_string()),
            "repetitions" => {
                repetitions = parse_number("a positive integer")? as usize;
            }
            "warmup_runs" => {
                warmup_runs = parse_number("a non-negative integer")? as usize;
            }
            "timeout_seconds" => timeout_seconds = Some(parse_number("a positive number")?),
            "report_glob" => report_glob = Some(value.to_string()),
            other => {
                return Err(ConfigError::Parse {
                    line: line_no,
                    message: format!("unknown key `{other}`"),
                })
            }
        }
    }
    finish(&mut current, &mut snapshots)?;

    let config = RunConfig {
        repo_path: repo_path.ok_or(ConfigError::MissingKey("repo_path"))?,
        snapshots,
        build_command: build_command.ok_or(ConfigError::MissingKey("build_command"))?,
        test_command: test_command.ok_or(ConfigError::MissingKey("test_command"))?,
        repetitions,
        warmup_runs,
        timeout_seconds: timeout_seconds.ok_or(ConfigError::MissingKey("timeout_seconds"))?,
        report_glob,
    };
    if config.repetitions == 0 {
        return Err(ConfigError::Invariant("repetitions must be at least 1".to_string()));
    }
    if config.timeout_seconds <= 0.0 {
        return Err(ConfigError::Invariant("timeout_seconds must be positive".to_string()));
    }
    let mut seen = std::collections::BTreeSet::new();
    for snapshot in &config.snapshots {
        if !seen.insert(&snapshot.id) {
            return Err(ConfigError::Invariant(format!(
                "duplicate snapshot id `{}`",
                snapshot.id
            )));
        }
    }
    Ok(config)
}

pub fn read_config(path: &Path) -> Result<RunConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

// ----- git plumbing ---------------------------------------------------------

fn run_git(repo: &Path, args: &[&str]) -> Result<String, String> {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .stdin(Stdio::null())
        .output()
        .map_err(|e| format!("cannot run git: {e}"))?;
    if output.status.success() {
        Ok(String::from_utf8_lossy(&output.stdout).trim_end().to_string())
    } else {
        Err(format!(
            "git {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr).trim_end()
        ))
    }
}

/// The ref to restore after a walk: the current branch name, or the
/// detached-head commit hash.
fn current_checkout(repo: &Path) -> Result<String, String> {
    match run_git(repo, &["symbolic-ref", "--quiet", "--short", "HEAD"]) {
        Ok(branch) if !branch.is_empty() => Ok(branch),
        _ => run_git(repo, &["rev-parse", "HEAD"]),
    }
}

/// Restores the original checkout on drop unless disarmed; this covers
/// panics and early returns inside the walk.
struct RestoreGuard<'a> {
    repo: &'a Path,
    original: String,
    armed: bool,
}

impl Drop for RestoreGuard<'_> {
    fn drop(&mut self) {
        if self.armed {
            let _ = run_git(self.repo, &["checkout", "--quiet", &self.original]);
        }
    }
}

/// Each visited snapshot paired with its visitor's outcome.
pub type WalkResults<T> = Vec<(Snapshot, Result<T, SnapshotError>)>;

/// Visit every configured snapshot in order: check it out, run the
/// visitor, capture its result, and restore the original checkout at the
/// end (also on failure). Unresolvable ids and visitor failures are
/// recorded per snapshot; the remaining snapshots still run.
pub fn walk_history<T>(
    config: &RunConfig,
    mut visitor: impl FnMut(&Snapshot, &Path) -> Result<T, String>,
) -> Result<WalkResults<T>, WalkError> {
    let repo = config.repo_path.as_path();
    let status = run_git(repo, &["status", "--porcelain"]).map_err(WalkError::Git)?;
    if !status.is_empty() {
        return Err(WalkError::DirtyWorkingTree(status));
    }
    if config.snapshots.is_empty() {
        return Ok(Vec::new());
    }
    let original = current_checkout(repo).map_err(WalkError::Git)?;
    let mut guard = RestoreGuard { repo, original, armed: true };

    let mut results = Vec::with_capacity(config.snapshots.len());
    for snapshot in &config.snapshots {
        let commit_ref = format!("{}^{{commit}}", snapshot.id);
        let resolvable = run_git(repo, &["rev-parse", "--verify", "--quiet", &commit_ref]);
        if resolvable.is_err() {
            results.push((
                snapshot.clone(),
                Err(SnapshotError::UnknownSnapshot(snapshot.id.clone())),
            ));
            continue;
        }
        if let Err(message) = run_git(repo, &["checkout", "--quiet", &snapshot.id]) {
            results.push((snapshot.clone(), Err(SnapshotError::CheckoutFailed(message))));
            continue;
        }
        let outcome = visitor(snapshot, repo).map_err(SnapshotError::Visitor);
        results.push((snapshot.clone(), outcome));
    }

    guard.armed = false;
    run_git(repo, &["checkout", "--quiet", &guard.original]).map_err(WalkError::Git)?;
    Ok(results)
}

// ----- command timing ---------------------------------------------------------

/// Run `command` through `sh -c` in `dir`, polling for completion so the
/// wall-clock timeout can kill a stuck process. Returns the exit status
/// and the measured duration.
fn run_timed(command: &str, dir: &Path, timeout: Duration) -> Result<(i32, f64), TimeError> {
    let started = Instant::now();
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| TimeError::Spawn { command: command.to_string(), source })?;
    loop {
        if let Some(status) = child.try_wait().map_err(|source| TimeError::Spawn {
            command: command.to_string(),
            source,
        })? {
            let elapsed = started.elapsed().as_secs_f64();
            return Ok((status.code().unwrap_or(-1), elapsed));
        }
        if started.elapsed() > timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(TimeError::Timeout {
                command: command.to_string(),
                limit_seconds: timeout.as_secs_f64(),
            });
        }
        std::thread::sleep(Duration::from_millis(5));
    }
}

/// Median of a sample; an even count averages the two middle values.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    }
}

/// Build once (timed), run the test command `warmup_runs` discarded
/// times plus `repetitions` timed times, and aggregate: `test_seconds`
/// is the median repetition, `exit_status` comes from the final
/// repetition. A failing build short-circuits: the record keeps the
/// build's exit status, no repetitions, and a warning.
pub fn time_tests(config: &RunConfig, snapshot: &str) -> Result<TimingRecord, TimeError> {
    let dir = config.repo_path.as_path();
    let timeout = Duration::from_secs_f64(config.timeout_seconds);
    let mut warnings = Vec::new();

    let (build_status, build_seconds) = run_timed(&config.build_command, dir, timeout)?;
    if build_status != 0 {
        warnings.push(format!(
            "build command exited with status {build_status}; tests skipped"
        ));
        return Ok(TimingRecord {
            snapshot: snapshot.to_string(),
            build_seconds,
            test_seconds: 0.0,
            per_test_seconds: None,
            repetition_values: Vec::new(),
            exit_status: build_status,
            warnings,
        });
    }

    for _ in 0..config.warmup_runs {
        run_timed(&config.test_command, dir, timeout)?;
    }
    let mut repetition_values = Vec::with_capacity(config.repetitions);
    let mut exit_status = 0;
    for _ in 0..config.repetitions {
        let (status, seconds) = run_timed(&config.test_command, dir, timeout)?;
        repetition_values.push(seconds);
        exit_status = status;
    }
    let test_seconds = median(&repetition_values);
    if exit_status != 0 {
        warnings.push(format!("test command exited with status {exit_status}"));
    }

    let per_test_seconds = config
        .report_glob
        .as_ref()
        .map(|pattern| collect_reports(dir, pattern, test_seconds, &mut warnings));

    Ok(TimingRecord {
        snapshot: snapshot.to_string(),
        build_seconds,
        test_seconds,
        per_test_seconds,
        repetition_values,
        exit_status,
        warnings,
    })
}

/// Parse every report matching `pattern` under `repo`, summing durations
/// per test name. Unreadable or malformed reports become warnings, and a
/// per-test sum above `test_seconds × 1.5` trips a sanity warning.
fn collect_reports(
    repo: &Path,
    pattern: &str,
    test_seconds: f64,
    warnings: &mut Vec<String>,
) -> BTreeMap<String, f64> {
    let mut per_test = BTreeMap::new();
    let full_pattern = repo.join(pattern).to_string_lossy().into_owned();
    let paths = match glob::glob(&full_pattern) {
        Ok(paths) => paths,
        Err(e) => {
            warnings.push(format!("bad report glob `{pattern}`: {e}"));
            return per_test;
        }
    };
    for entry in paths {
        let path = match entry {
            Ok(path) => path,
            Err(e) => {
                warnings.push(format!("unreadable report path: {e}"));
                continue;
            }
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => match parse_test_report_text(&text) {
                Ok(map) => {
                    for (name, seconds) in map {
                        *per_test.entry(name).or_insert(0.0) += seconds;
                    }
                }
                Err(e) => warnings.push(format!("skipping report {}: {e}", path.display())),
            },
            Err(e) => warnings.push(format!("cannot read report {}: {e}", path.display())),
        }
    }
    let total: f64 = per_test.values().sum();
    if test_seconds > 0.0 && total > test_seconds * 1.5 {
        warnings.push(format!(
            "per-test durations sum to {total:.3}s, above 1.5× the measured {test_seconds:.3}s"
        ));
    }
    per_test
}

// ----- test reports -----------------------------------------------------------

/// Parse a JUnit-style XML report into test-name → seconds. Names are
/// qualified as `classname.name` when a classname is present; a missing
/// `time` attribute counts as 0; duplicate names have their times summed.
pub fn parse_test_report(path: &Path) -> Result<BTreeMap<String, f64>, MalformedReport> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| MalformedReport(format!("cannot read {}: {e}", path.display())))?;
    parse_test_report_text(&text)
}

pub fn parse_test_report_text(text: &str) -> Result<BTreeMap<String, f64>, MalformedReport> {
    let doc = roxmltree::Document::parse(text)
        .map_err(|e| MalformedReport(format!("not well-formed XML: {e}")))?;
    let mut map = BTreeMap::new();
    let mut testcases = 0usize;
    for node in doc.descendants().filter(|n| n.has_tag_name("testcase")) {
        testcases += 1;
        let name = node
            .attribute("name")
            .ok_or_else(|| MalformedReport("testcase element has no name".to_string()))?;
        let qualified = match node.attribute("classname") {
            Some(class) if !class.is_empty() => format!("{class}.{name}"),
            _ => name.to_string(),
        };
        let seconds = match node.attribute("time") {
            Some(raw) => raw.parse::<f64>().map_err(|_| {
                MalformedReport(format!("testcase `{qualified}` has unparseable time `{raw}`"))
            })?,
            None => 0.0,
        };
        *map.entry(qualified).or_insert(0.0) += seconds;
    }
    if testcases == 0 {
        return Err(MalformedReport("no testcase elements".to_string()));
    }
    Ok(map)
}

// ----- timing persistence -------------------------------------------------------

#[derive(Debug, thiserror::Error)]
pub enum TimingCsvError {
    #[error("timing CSV: {0}")]
    Io(#[from] std::io::Error),
    #[error("timing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("timing CSV row {row}: {message}")]
    Field { row: usize, message: String },
    #[error("timing CSV has header {got:?}, expected {expected:?}")]
    Header { expected: Vec<String>, got: Vec<String> },
}

const TIMING_HEADER: [&str; 5] =
    ["snapshot", "build_seconds", "test_seconds", "exit_status", "rep_values"];

/// Persist timing records as CSV with semicolon-joined repetitions.
/// Per-test durations and warnings are runtime-only and not persisted.
pub fn write_timings_csv(records: &[TimingRecord], path: &Path) -> Result<(), TimingCsvError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(TIMING_HEADER)?;
    for record in records {
        let reps: Vec<String> =
            record.repetition_values.iter().map(|v| v.to_string()).collect();
        writer.write_record([
            record.snapshot.as_str(),
            &record.build_seconds.to_string(),
            &record.test_seconds.to_string(),
            &record.exit_status.to_string(),
            &reps.join(";"),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn read_timings_csv(path: &Path) -> Result<Vec<TimingRecord>, TimingCsvError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows = reader.records();
    let header = rows
        .next()
        .transpose()?
        .ok_or_else(|| TimingCsvError::Header { expected: to_strings(&TIMING_HEADER), got: Vec::new() })?;
    let got: Vec<String> = header.iter().map(str::to_string).collect();
    if got != TIMING_HEADER {
        return Err(TimingCsvError::Header { expected: to_strings(&TIMING_HEADER), got });
    }
    let mut records = Vec::new();
    for (index, row) in rows.enumerate() {
        let row = row?;
        let row_no = index + 2; // header is row 1
        let field = |i: usize| -> Result<&str, TimingCsvError> {
            row.get(i).ok_or(TimingCsvError::Field {
                row: row_no,
                message: format!("missing column {i}"),
            })
        };
        let number = |i: usize, name: &str| -> Result<f64, TimingCsvError> {
            field(i)?.parse::<f64>().map_err(|_| TimingCsvError::Field {
                row: row_no,
                message: format!("unparseable {name} `{}`", row.get(i).unwrap_or("")),
            })
        };
        let reps_raw = field(4)?;
        let repetition_values = if reps_raw.is_empty() {
            Vec::new()
        } else {
            reps_raw
                .split(';')
                .map(|v| {
                    v.parse::<f64>().map_err(|_| TimingCsvError::Field {
                        row: row_no,
                        message: format!("unparseable repetition `{v}`"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?
        };
        records.push(TimingRecord {
            snapshot: field(0)?.to_string(),
            build_seconds: number(1, "build_seconds")?,
            test_seconds: number(2, "test_seconds")?,
            per_test_seconds: None,
            repetition_values,
            exit_status: number(3, "exit_status")? as i32,
            warnings: Vec::new(),
        });
    }
    Ok(records)
}

fn to_strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

// ----- preflight --------------------------------------------------------------

/// One pass/fail line of the repository suitability checklist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreflightCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of the four suitability checks; `passed` is their conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreflightReport {
    pub checks: Vec<PreflightCheck>,
}

impl PreflightReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

const SOURCE_EXTENSIONS: [&str; 17] = [
    "java", "kt", "scala", "groovy", "py", "rb", "js", "ts", "go", "rs", "c", "cpp", "h", "hpp",
    "cs", "php", "swift",
];

/// Check that the repository is measurable: mostly Java by file census,
/// builds cleanly, discovers at least one test, and has at least
/// `min_history` commits.
pub fn preflight(config: &RunConfig, min_history: usize) -> PreflightReport {
    let mut checks = Vec::with_capacity(4);
    let repo = config.repo_path.as_path();
    let timeout = Duration::from_secs_f64(config.timeout_seconds);

    // 1. language census: ≥ 1 .java file and Java ≥ 50% of source files
    let mut java = 0usize;
    let mut source = 0usize;
    for entry in walkdir::WalkDir::new(repo)
        .into_iter()
        .filter_entry(|e| e.file_name() != ".git")
        .flatten()
    {
        if !entry.file_type().is_file() {
            continue;
        }
        let Some(ext) = entry.path().extension().and_then(|e| e.to_str()) else {
            continue;
        };
        let ext = ext.to_ascii_lowercase();
        if SOURCE_EXTENSIONS.contains(&ext.as_str()) {
            source += 1;
            if ext == "java" {
                java += 1;
            }
        }
    }
    let language_ok = java >= 1 && java * 2 >= source;
    checks.push(PreflightCheck {
        name: "language",
        passed: language_ok,
        detail: format!("{java} Java files out of {source} source files"),
    });

    // 2. compilable: build command exits 0
    let build = run_timed(&config.build_command, repo, timeout);
    let (build_ok, build_detail) = match &build {
        Ok((0, seconds)) => (true, format!("build succeeded in {seconds:.2}s")),
        Ok((status, _)) => (false, format!("build exited with status {status}")),
        Err(e) => (false, e.to_string()),
    };
    checks.push(PreflightCheck { name: "builds", passed: build_ok, detail: build_detail });

    // 3. has tests: the report glob discovers ≥ 1 test case, or without a
    //    glob, the test command exits 0
    let (tests_ok, tests_detail) = if !build_ok {
        (false, "skipped: build failed".to_string())
    } else {
        match run_timed(&config.test_command, repo, timeout) {
            Ok((status, _)) => match &config.report_glob {
                Some(pattern) => {
                    let mut warnings = Vec::new();
                    let per_test = collect_reports(repo, pattern, 0.0, &mut warnings);
                    if per_test.is_empty() {
                        (false, format!("no test cases found under `{pattern}`"))
                    } else {
                        (true, format!("{} test cases reported", per_test.len()))
                    }
                }
                None if status == 0 => (true, "test command succeeded".to_string()),
                None => (false, format!("test command exited with status {status}")),
            },
            Err(e) => (false, e.to_string()),
        }
    };
    checks.push(PreflightCheck { name: "tests", passed: tests_ok, detail: tests_detail });

    // 4. history depth
    let (history_ok, history_detail) = match run_git(repo, &["rev-list", "--count", "HEAD"]) {
        Ok(count_text) => match count_text.parse::<usize>() {
            Ok(count) => (
                count >= min_history,
                format!("{count} commits (minimum {min_history})"),
            ),
            Err(_) => (false, format!("unparseable commit count `{count_text}`")),
        },
        Err(e) => (false, e),
    };
    checks.push(PreflightCheck { name: "history", passed: history_ok, detail: history_detail });

    PreflightReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL_CONFIG: &str = "\
# measurement run for the demo repository
repo_path = /tmp/demo
build_command = make build
test_command = make test
repetitions = 5
warmup_runs = 2
timeout_seconds = 30
report_glob = reports/*.xml

[snapshot]
id = abc123
label = v1.0

[snapshot]
id = def456
";

    #[test]
    fn config_parses_every_key() {
        let config = parse_config(FULL_CONFIG).unwrap();
        assert_eq!(config.repo_path, PathBuf::from("/tmp/demo"));
        assert_eq!(config.build_command, "make build");
        assert_eq!(config.test_command, "make test");
        assert_eq!(config.repetitions, 5);
        assert_eq!(config.warmup_runs, 2);
        assert_eq!(config.timeout_seconds, 30.0);
        assert_eq!(config.report_glob.as_deref(), Some("reports/*.xml"));
        assert_eq!(config.snapshots.len(), 2);
        assert_eq!(config.snapshots[0].id, "abc123");
        assert_eq!(config.snapshots[0].label, "v1.0");
        assert_eq!(config.snapshots[0].checkout_order, 0);
        // label defaults to the id
        assert_eq!(config.snapshots[1].label, "def456");
        assert_eq!(config.snapshots[1].checkout_order, 1);
    }

    #[test]
    fn config_defaults_repetitions_and_warmups() {
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = 5\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.repetitions, 3);
        assert_eq!(config.warmup_runs, 1);
        assert!(config.report_glob.is_none());
        assert!(config.snapshots.is_empty());
    }

    #[test]
    fn config_value_may_contain_equals_sign() {
        let text = "repo_path = .\nbuild_command = mvn -Dskip=true compile\ntest_command = true\ntimeout_seconds = 5\n";
        let config = parse_config(text).unwrap();
        assert_eq!(config.build_command, "mvn -Dskip=true compile");
    }

    #[test]
    fn config_rejects_unknown_keys_with_line_numbers() {
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = 5\nbogus = 1\n";
        match parse_config(text) {
            Err(ConfigError::Parse { line, message }) => {
                assert_eq!(line, 5);
                assert!(message.contains("bogus"));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn config_requires_the_core_keys() {
        let text = "build_command = true\ntest_command = true\ntimeout_seconds = 5\n";
        assert!(matches!(parse_config(text), Err(ConfigError::MissingKey("repo_path"))));
        let text = "repo_path = .\ntest_command = true\ntimeout_seconds = 5\n";
        assert!(matches!(parse_config(text), Err(ConfigError::MissingKey("build_command"))));
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\n";
        assert!(matches!(parse_config(text), Err(ConfigError::MissingKey("timeout_seconds"))));
    }

    #[test]
    fn config_enforces_invariants() {
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = 5\nrepetitions = 0\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Invariant(_))));
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = -1\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Invariant(_))));
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = 5\n[snapshot]\nid = a\n[snapshot]\nid = a\n";
        assert!(matches!(parse_config(text), Err(ConfigError::Invariant(_))));
    }

    #[test]
    fn config_rejects_snapshot_without_id() {
        let text = "repo_path = .\nbuild_command = true\ntest_command = true\ntimeout_seconds = 5\n[snapshot]\nlabel = x\n";
        match parse_config(text) {
            Err(ConfigError::Parse { message, .. }) => assert!(message.contains("no `id`")),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn median_of_odd_and_even_samples() {
        assert_eq!(median(&[3.0]), 3.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        // even count: mean of the two middle values
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
    }

    #[test]
    fn median_ignores_ordering() {
        let base = [0.4, 0.1, 0.9, 0.2, 0.7];
        let expected = median(&base);
        // every rotation gives the same median
        for shift in 0..base.len() {
            let mut rotated = base.to_vec();
            rotated.rotate_left(shift);
            assert_eq!(median(&rotated), expected);
        }
    }

    // --- report parsing ---

    #[test]
    fn report_reads_names_and_times() {
        let xml = r#"<testsuite><testcase classname="com.example.FooTest" name="adds" time="0.5"/></testsuite>"#;
        let map = parse_test_report_text(xml).unwrap();
        assert_eq!(map.len(), 1);
        assert_eq!(map["com.example.FooTest.adds"], 0.5);
    }

    #[test]
    fn report_without_classname_uses_bare_name() {
        let xml = r#"<testsuite><testcase name="t1" time="0.5"/></testsuite>"#;
        let map = parse_test_report_text(xml).unwrap();
        assert_eq!(map["t1"], 0.5);
    }

    #[test]
    fn report_missing_time_counts_as_zero() {
        let xml = r#"<testsuite><testcase name="t1"/></testsuite>"#;
        let map = parse_test_report_text(xml).unwrap();
        assert_eq!(map["t1"], 0.0);
    }

    #[test]
    fn report_duplicate_names_are_summed() {
        let xml = r#"<testsuite>
            <testcase name="t" time="0.25"/>
            <testcase name="t" time="0.5"/>
        </testsuite>"#;
        let map = parse_test_report_text(xml).unwrap();
        assert_eq!(map["t"], 0.75);
    }

    #[test]
    fn report_three_case_fixture() {
        let xml = r#"<testsuite name="suite">
            <testcase classname="a.A" name="one" time="0.1"/>
            <testcase classname="a.A" name="two" time="0.2"/>
            <testcase classname="b.B" name="three" time="0.3"/>
        </testsuite>"#;
        let map = parse_test_report_text(xml).unwrap();
        assert_eq!(map.len(), 3);
        assert_eq!(map["a.A.one"], 0.1);
        assert_eq!(map["a.A.two"], 0.2);
        assert_eq!(map["b.B.three"], 0.3);
    }

    #[test]
    fn report_rejects_bad_inputs() {
        assert!(parse_test_report_text("<unclosed").is_err());
        assert!(parse_test_report_text("<testsuite/>").is_err(), "no testcases");
        assert!(parse_test_report_text(r#"<s><testcase time="1"/></s>"#).is_err(), "no name");
        assert!(
            parse_test_report_text(r#"<s><testcase name="t" time="fast"/></s>"#).is_err(),
            "bad time"
        );
    }

    // --- command timing ---

    fn command_config(dir: &Path, build: &str, test: &str, repetitions: usize) -> RunConfig {
        RunConfig {
            repo_path: dir.to_path_buf(),
            snapshots: Vec::new(),
            build_command: build.to_string(),
            test_command: test.to_string(),
            repetitions,
            warmup_runs: 0,
            timeout_seconds: 20.0,
            report_glob: None,
        }
    }

    #[test]
    fn time_tests_measures_a_sleep() {
        let dir = tempfile::tempdir().unwrap();
        let config = command_config(dir.path(), "true", "sleep 0.05", 3);
        let record = time_tests(&config, "snap").unwrap();
        assert_eq!(record.snapshot, "snap");
        assert_eq!(record.exit_status, 0);
        assert_eq!(record.repetition_values.len(), 3);
        assert!(record.repetition_values.iter().all(|&v| v >= 0.05));
        assert!(record.test_seconds >= 0.05 && record.test_seconds < 1.0);
        assert_eq!(record.test_seconds, median(&record.repetition_values));
        assert!(record.warnings.is_empty());
    }

    #[test]
    fn time_tests_single_repetition_is_that_value() {
        let dir = tempfile::tempdir().unwrap();
        let config = command_config(dir.path(), "true", "true", 1);
        let record = time_tests(&config, "snap").unwrap();
        assert_eq!(record.repetition_values.len(), 1);
        assert_eq!(record.test_seconds, record.repetition_values[0]);
    }

    #[test]
    fn time_tests_keeps_failing_run_with_nonzero_status() {
        let dir = tempfile::tempdir().unwrap();
        let config = command_config(dir.path(), "true", "exit 3", 2);
        let record = time_tests(&config, "snap").unwrap();
        assert_eq!(record.exit_status, 3);
        assert_eq!(record.repetition_values.len(), 2);
        assert!(record.warnings.iter().any(|w| w.contains("status 3")));
    }

    #[test]
    fn time_tests_build_failure_skips_tests() {
        let dir = tempfile::tempdir().unwrap();
        let config = command_config(dir.path(), "exit 7", "sleep 10", 3);
        let record = time_tests(&config, "snap").unwrap();
        assert_eq!(record.exit_status, 7);
        assert!(record.repetition_values.is_empty());
        assert_eq!(record.test_seconds, 0.0);
        assert!(record.warnings.iter().any(|w| w.contains("build")));
    }

    #[test]
    fn time_tests_times_out_stuck_commands() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = command_config(dir.path(), "true", "sleep 30", 1);
        config.timeout_seconds = 0.2;
        let started = Instant::now();
        let err = time_tests(&config, "snap").unwrap_err();
        assert!(matches!(err, TimeError::Timeout { .. }));
        assert!(started.elapsed() < Duration::from_secs(5));
    }

    #[test]
    fn time_tests_collects_report_durations() {
        let dir = tempfile::tempdir().unwrap();
        let test_command = r#"printf '<testsuite><testcase classname="T" name="a" time="0.01"/></testsuite>' > report.xml"#;
        let mut config = command_config(dir.path(), "true", test_command, 1);
        config.report_glob = Some("report.xml".to_string());
        let record = time_tests(&config, "snap").unwrap();
        let per_test = record.per_test_seconds.unwrap();
        assert_eq!(per_test["T.a"], 0.01);
    }

    #[test]
    fn time_tests_warns_when_per_test_sum_is_implausible() {
        let dir = tempfile::tempdir().unwrap();
        let test_command = r#"printf '<testsuite><testcase name="t" time="99"/></testsuite>' > report.xml"#;
        let mut config = command_config(dir.path(), "true", test_command, 1);
        config.report_glob = Some("report.xml".to_string());
        let record = time_tests(&config, "snap").unwrap();
        assert!(record.warnings.iter().any(|w| w.contains("1.5")), "{:?}", record.warnings);
    }

    // --- timing CSV ---

    #[test]
    fn timings_csv_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("timings.csv");
        let records = vec![
            TimingRecord {
                snapshot: "a".to_string(),
                build_seconds: 1.5,
                test_seconds: 2.25,
                per_test_seconds: None,
                repetition_values: vec![2.0, 2.25, 2.5],
                exit_status: 0,
                warnings: Vec::new(),
            },
            TimingRecord {
                snapshot: "b".to_string(),
                build_seconds: 0.5,
                test_seconds: 0.0,
                per_test_seconds: None,
                repetition_values: Vec::new(),
                exit_status: 1,
                warnings: Vec::new(),
            },
        ];
        write_timings_csv(&records, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("snapshot,build_seconds,test_seconds,exit_status,rep_values\n"));
        assert!(text.contains("a,1.5,2.25,0,2;2.25;2.5\n"));
        assert!(text.contains("b,0.5,0,1,\n"));
        let back = read_timings_csv(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn timings_csv_rejects_shuffled_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("timings.csv");
        std::fs::write(&path, "snapshot,test_seconds,build_seconds,exit_status,rep_values\n").unwrap();
        assert!(matches!(read_timings_csv(&path), Err(TimingCsvError::Header { .. })));
    }

    // --- history walking ---

    fn git_in(dir: &Path, args: &[&str]) {
        let status = Command::new("git")
            .arg("-C")
            .arg(dir)
            .args([
                "-c",
                "user.email=dev@example.com",
                "-c",
                "user.name=dev",
            ])
            .args(args)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .status()
            .unwrap();
        assert!(status.success(), "git {args:?} failed");
    }

    /// Two-commit scratch repository; returns (tempdir, first commit hash).
    fn scratch_repo() -> (tempfile::TempDir, String) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path();
        git_in(path, &["init", "--quiet", "--initial-branch", "main"]);
        std::fs::write(path.join("value.txt"), "one\n").unwrap();
        git_in(path, &["add", "."]);
        git_in(path, &["commit", "--quiet", "-m", "first"]);
        let first = run_git(path, &["rev-parse", "HEAD"]).unwrap();
        std::fs::write(path.join("value.txt"), "two\n").unwrap();
        git_in(path, &["add", "."]);
        git_in(path, &["commit", "--quiet", "-m", "second"]);
        (dir, first)
    }

    fn walk_config(repo: &Path, ids: &[&str]) -> RunConfig {
        RunConfig {
            repo_path: repo.to_path_buf(),
            snapshots: ids
                .iter()
                .enumerate()
                .map(|(i, id)| Snapshot {
                    id: id.to_string(),
                    label: id.to_string(),
                    checkout_order: i,
                })
                .collect(),
            build_command: "true".to_string(),
            test_command: "true".to_string(),
            repetitions: 1,
            warmup_runs: 0,
            timeout_seconds: 20.0,
            report_glob: None,
        }
    }

    #[test]
    fn walk_visits_snapshots_in_order_and_restores_head() {
        let (dir, first) = scratch_repo();
        let before = current_checkout(dir.path()).unwrap();
        let config = walk_config(dir.path(), &[&first, "main"]);
        let results = walk_history(&config, |snapshot, repo| {
            let value = std::fs::read_to_string(repo.join("value.txt")).unwrap();
            Ok::<String, String>(format!("{}:{}", snapshot.checkout_order, value.trim()))
        })
        .unwrap();
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].1.as_ref().unwrap(), "0:one");
        assert_eq!(results[1].1.as_ref().unwrap(), "1:two");
        assert_eq!(current_checkout(dir.path()).unwrap(), before);
    }

    #[test]
    fn walk_rejects_dirty_working_tree() {
        let (dir, first) = scratch_repo();
        std::fs::write(dir.path().join("value.txt"), "dirty\n").unwrap();
        let config = walk_config(dir.path(), &[&first]);
        let err = walk_history(&config, |_, _| Ok::<(), String>(())).unwrap_err();
        assert!(matches!(err, WalkError::DirtyWorkingTree(_)));
    }

    #[test]
    fn walk_captures_unknown_snapshots_without_stopping() {
        let (dir, first) = scratch_repo();
        let before = current_checkout(dir.path()).unwrap();
        let config = walk_config(dir.path(), &["doesnotexist", &first]);
        let results = walk_history(&config, |_, repo| {
            Ok::<String, String>(std::fs::read_to_string(repo.join("value.txt")).unwrap())
        })
        .unwrap();
        assert_eq!(results.len(), 2);
        assert_eq!(
            results[0].1,
            Err(SnapshotError::UnknownSnapshot("doesnotexist".to_string()))
        );
        assert_eq!(results[1].1.as_ref().unwrap().trim(), "one");
        assert_eq!(current_checkout(dir.path()).unwrap(), before);
    }

    #[test]
    fn walk_captures_visitor_errors_and_continues() {
        let (dir, first) = scratch_repo();
        let before = current_checkout(dir.path()).unwrap();
        let config = walk_config(dir.path(), &[&first, "main"]);
        let results = walk_history(&config, |snapshot, _| {
            if snapshot.checkout_order == 0 {
                Err("boom".to_string())
            } else {
                Ok(snapshot.checkout_order)
            }
        })
        .unwrap();
        assert_eq!(results[0].1, Err(SnapshotError::Visitor("boom".to_string())));
        assert_eq!(results[1].1, Ok(1));
        assert_eq!(current_checkout(dir.path()).unwrap(), before);
    }

    #[test]
    fn walk_with_no_snapshots_touches_nothing() {
        let (dir, _) = scratch_repo();
        let before = current_checkout(dir.path()).unwrap();
        let config = walk_config(dir.path(), &[]);
        let results = walk_history(&config, |_, _| Ok::<(), String>(())).unwrap();
        assert!(results.is_empty());
        assert_eq!(current_checkout(dir.path()).unwrap(), before);
    }

    // --- preflight ---

    #[test]
    fn preflight_passes_on_a_suitable_repository() {
        let (dir, _) = scratch_repo();
        std::fs::write(dir.path().join("Main.java"), "class Main {}\n").unwrap();
        git_in(dir.path(), &["add", "."]);
        git_in(dir.path(), &["commit", "--quiet", "-m", "add java"]);
        let config = walk_config(dir.path(), &[]);
        let report = preflight(&config, 2);
        assert!(report.passed(), "{:?}", report.checks);
        assert_eq!(report.checks.len(), 4);
    }

    #[test]
    fn preflight_fails_without_java_files() {
        let (dir, _) = scratch_repo();
        let config = walk_config(dir.path(), &[]);
        let report = preflight(&config, 2);
        let language = report.checks.iter().find(|c| c.name == "language").unwrap();
        assert!(!language.passed);
    }

    #[test]
    fn preflight_fails_on_build_or_test_failure_and_shallow_history() {
        let (dir, _) = scratch_repo();
        std::fs::write(dir.path().join("Main.java"), "class Main {}\n").unwrap();
        git_in(dir.path(), &["add", "."]);
        git_in(dir.path(), &["commit", "--quiet", "-m", "add java"]);
        let mut config = walk_config(dir.path(), &[]);
        config.build_command = "exit 1".to_string();
        let report = preflight(&config, 2);
        assert!(!report.passed());
        let builds = report.checks.iter().find(|c| c.name == "builds").unwrap();
        assert!(!builds.passed);
        // test check is skipped (failed) when the build fails
        let tests = report.checks.iter().find(|c| c.name == "tests").unwrap();
        assert!(!tests.passed);

        let mut config = walk_config(dir.path(), &[]);
        config.test_command = "exit 1".to_string();
        let report = preflight(&config, 2);
        let tests = report.checks.iter().find(|c| c.name == "tests").unwrap();
        assert!(!tests.passed);

        let config = walk_config(dir.path(), &[]);
        let report = preflight(&config, 99);
        let history = report.checks.iter().find(|c| c.name == "history").unwrap();
        assert!(!history.passed);
    }

    #[test]
    fn preflight_counts_tests_from_reports() {
        let (dir, _) = scratch_repo();
        std::fs::write(dir.path().join("Main.java"), "class Main {}\n").unwrap();
        git_in(dir.path(), &["add", "."]);
        git_in(dir.path(), &["commit", "--quiet", "-m", "add java"]);
        let mut config = walk_config(dir.path(), &[]);
        config.test_command = r#"printf '<testsuite><testcase name="t" time="0.1"/></testsuite>' > report.xml"#.to_string();
        config.report_glob = Some("report.xml".to_string());
        let report = preflight(&config, 2);
        let tests = report.checks.iter().find(|c| c.name == "tests").unwrap();
        assert!(tests.passed, "{}", tests.detail);
        assert!(tests.detail.contains('1'));
        // the scratch file is untracked; leave the tree as we found it
        std::fs::remove_file(dir.path().join("report.xml")).ok();
    }
}
