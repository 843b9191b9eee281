//! External ASP solver subprocesses.
//!
//! Programs are written to the solver's stdin. Output is read in the
//! solver's JSON format when it produces one, otherwise from its line-based
//! text format. The solver's own time limit flag is passed along, and the
//! process is killed if it overruns that limit by more than a grace period.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Child, Command, Stdio};
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use serde::Deserialize;
use thiserror::Error;

use crate::atom::{parse_ground_atom, split_atoms, AtomError, GroundAtom};

/// Solver executable override.
pub const SOLVER_ENV: &str = "ILP_CLINGO";
/// Extra whitespace-separated solver flags.
pub const SOLVER_ARGS_ENV: &str = "ILP_CLINGO_ARGS";

const KILL_GRACE: Duration = Duration::from_secs(1);
const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    /// All answer sets.
    EnumerateAll,
    /// Improving models of the weak constraints; the last one is the best.
    Optimize,
    /// A single answer set.
    SatOne,
}

#[derive(Debug, Clone)]
pub struct SolveRequest {
    pub program: String,
    pub mode: SolveMode,
    pub time_limit: Option<Duration>,
    pub constants: BTreeMap<String, i64>,
}

impl SolveRequest {
    pub fn new(program: impl Into<String>, mode: SolveMode) -> Self {
        SolveRequest {
            program: program.into(),
            mode,
            time_limit: None,
            constants: BTreeMap::new(),
        }
    }

    pub fn time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn constant(mut self, name: impl Into<String>, value: i64) -> Self {
        self.constants.insert(name.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub atoms: Vec<GroundAtom>,
    pub cost: Option<Vec<i64>>,
}

impl Model {
    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn with_predicate<'a>(&'a self, pred: &'a str) -> impl Iterator<Item = &'a GroundAtom> {
        self.atoms.iter().filter(move |a| a.predicate == pred)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub models: Vec<Model>,
    pub status: Status,
    /// Enumeration completed, optimality proven, or satisfiability decided.
    pub exhaustive: bool,
    pub timed_out: bool,
    pub wall_time: Duration,
}

impl SolveResult {
    /// Last model, the best one in optimization mode.
    pub fn best(&self) -> Option<&Model> {
        self.models.last()
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver executable `{0}` not found")]
    NotFound(String),
    #[error("failed to run solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver exited abnormally (code {code:?}): {stderr}")]
    AbnormalExit { code: Option<i32>, stderr: String },
    #[error("solver reported an error: {0}")]
    Reported(String),
    #[error("unparseable solver output: {0}")]
    Unparseable(String),
    #[error("solve cancelled")]
    Cancelled,
}

impl From<AtomError> for SolverError {
    fn from(e: AtomError) -> Self {
        SolverError::Unparseable(e.to_string())
    }
}

/// Cooperative cancellation for a running solve. Cancelling kills the
/// subprocess; the pid of the current one is exposed for auditing.
#[derive(Debug, Clone, Default)]
pub struct CancelToken {
    cancelled: Arc<AtomicBool>,
    pid: Arc<AtomicU32>,
}

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.cancelled.store(true, Ordering::SeqCst);
    }

    pub fn is_cancelled(&self) -> bool {
        self.cancelled.load(Ordering::SeqCst)
    }

    /// Pid of the most recently started solver process, 0 before any.
    pub fn pid(&self) -> u32 {
        self.pid.load(Ordering::SeqCst)
    }
}

#[derive(Debug, Clone)]
pub struct Solver {
    pub executable: PathBuf,
    pub extra_args: Vec<String>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new("clingo")
    }
}

impl Solver {
    pub fn new(executable: impl Into<PathBuf>) -> Self {
        Solver {
            executable: executable.into(),
            extra_args: Vec::new(),
        }
    }

    /// `clingo` on the path unless overridden through the environment.
    pub fn from_env() -> Self {
        let mut s = match std::env::var_os(SOLVER_ENV) {
            Some(p) if !p.is_empty() => Solver::new(p),
            _ => Solver::default(),
        };
        if let Ok(args) = std::env::var(SOLVER_ARGS_ENV) {
            s.extra_args = args.split_whitespace().map(String::from).collect();
        }
        s
    }

    fn args(&self, req: &SolveRequest) -> Vec<String> {
        let mut args = vec!["--outf=2".to_string()];
        match req.mode {
            SolveMode::EnumerateAll => args.push("-n0".into()),
            SolveMode::Optimize => {
                args.push("-n0".into());
                args.push("--opt-mode=opt".into());
            }
            SolveMode::SatOne => args.push("-n1".into()),
        }
        if let Some(t) = req.time_limit {
            let secs = t.as_secs() + u64::from(t.subsec_nanos() > 0);
            args.push(format!("--time-limit={}", secs.max(1)));
        }
        for (k, v) in &req.constants {
            args.push("-c".into());
            args.push(format!("{k}={v}"));
        }
        args.extend(self.extra_args.iter().cloned());
        args.push("-".into());
        args
    }

    pub fn solve(&self, req: &SolveRequest) -> Result<SolveResult, SolverError> {
        self.solve_cancellable(req, &CancelToken::new())
    }

    pub fn solve_cancellable(
        &self,
        req: &SolveRequest,
        cancel: &CancelToken,
    ) -> Result<SolveResult, SolverError> {
        let start = Instant::now();
        let mut child = Command::new(&self.executable)
            .args(self.args(req))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => {
                    SolverError::NotFound(self.executable.display().to_string())
                }
                _ => SolverError::Io(e),
            })?;
        cancel.pid.store(child.id(), Ordering::SeqCst);

        let mut stdin = child.stdin.take().expect("piped stdin");
        let program = req.program.clone();
        let writer = thread::spawn(move || {
            // a solver that dies early closes the pipe; that is reported below
            let _ = stdin.write_all(program.as_bytes());
        });
        let out = reader(child.stdout.take().expect("piped stdout"));
        let err = reader(child.stderr.take().expect("piped stderr"));

        let deadline = req.time_limit.map(|t| start + t + KILL_GRACE);
        let (status, killed) = wait(&mut child, deadline, cancel)?;
        let _ = writer.join();
        let stdout = out.join().unwrap_or_default();
        let stderr = err.join().unwrap_or_default();

        if cancel.is_cancelled() {
            return Err(SolverError::Cancelled);
        }
        let wall_time = start.elapsed();
        if killed {
            // whatever was printed before the kill is not trustworthy
            return Ok(SolveResult {
                models: Vec::new(),
                status: Status::Unknown,
                exhaustive: false,
                timed_out: true,
                wall_time,
            });
        }

        let code = status.code();
        if matches!(code, Some(c) if c >= 65) || (code.is_none() && !killed) {
            return Err(SolverError::AbnormalExit {
                code,
                stderr: stderr.trim().to_string(),
            });
        }
        let mut parsed = parse_output(&stdout, req.mode)?;
        if !parsed.timed_out {
            if let Some(line) = error_line(&stderr) {
                return Err(SolverError::Reported(line));
            }
        }
        parsed.wall_time = wall_time;
        Ok(parsed)
    }
}

fn reader<R: Read + Send + 'static>(mut r: R) -> thread::JoinHandle<String> {
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = r.read_to_end(&mut buf);
        String::from_utf8_lossy(&buf).into_owned()
    })
}

fn wait(
    child: &mut Child,
    deadline: Option<Instant>,
    cancel: &CancelToken,
) -> Result<(std::process::ExitStatus, bool), SolverError> {
    loop {
        if let Some(status) = child.try_wait()? {
            return Ok((status, false));
        }
        let overdue = deadline.is_some_and(|d| Instant::now() >= d);
        if overdue || cancel.is_cancelled() {
            let _ = child.kill();
            return Ok((child.wait()?, true));
        }
        thread::sleep(POLL);
    }
}

fn error_line(stderr: &str) -> Option<String> {
    stderr
        .lines()
        .find(|l| l.contains("*** ERROR") || l.contains(": error:"))
        .map(|l| l.trim().to_string())
}

/// Parses solver output, JSON when it looks like JSON, text otherwise.
pub fn parse_output(stdout: &str, mode: SolveMode) -> Result<SolveResult, SolverError> {
    if stdout.trim_start().starts_with('{') {
        parse_json(stdout, mode)
    } else {
        parse_text(stdout, mode)
    }
}

#[derive(Deserialize)]
struct JsonOutput {
    #[serde(rename = "Result")]
    result: String,
    #[serde(rename = "Call", default)]
    call: Vec<JsonCall>,
    #[serde(rename = "Models")]
    models: Option<JsonModels>,
    #[serde(rename = "TIME LIMIT")]
    time_limit: Option<i64>,
}

#[derive(Deserialize)]
struct JsonCall {
    #[serde(rename = "Witnesses", default)]
    witnesses: Vec<JsonWitness>,
}

#[derive(Deserialize)]
struct JsonWitness {
    #[serde(rename = "Value", default)]
    value: Vec<String>,
    #[serde(rename = "Costs")]
    costs: Option<Vec<i64>>,
}

#[derive(Deserialize)]
struct JsonModels {
    #[serde(rename = "More")]
    more: Option<String>,
    #[serde(rename = "Optimum")]
    optimum: Option<String>,
}

pub fn parse_json(stdout: &str, mode: SolveMode) -> Result<SolveResult, SolverError> {
    let out: JsonOutput =
        serde_json::from_str(stdout).map_err(|e| SolverError::Unparseable(e.to_string()))?;
    let mut models = Vec::new();
    for w in out.call.into_iter().flat_map(|c| c.witnesses) {
        let atoms = w
            .value
            .iter()
            .map(|a| parse_ground_atom(a))
            .collect::<Result<Vec<_>, _>>()?;
        models.push(Model {
            atoms,
            cost: w.costs,
        });
    }
    let more = out.models.as_ref().and_then(|m| m.more.as_deref()) == Some("yes");
    let optimum = out.models.as_ref().and_then(|m| m.optimum.as_deref()) == Some("yes");
    finish(
        &out.result,
        models,
        more,
        optimum,
        out.time_limit.is_some(),
        mode,
    )
}

/// Line-based output: `Answer: N` followed by the atoms, `Optimization:`
/// lines, then the result word and the statistics block.
pub fn parse_text(stdout: &str, mode: SolveMode) -> Result<SolveResult, SolverError> {
    let mut models: Vec<Model> = Vec::new();
    let mut result = None;
    let mut more = false;
    let mut optimum = false;
    let mut timed_out = false;
    let mut lines = stdout.lines().peekable();
    while let Some(line) = lines.next() {
        let t = line.trim();
        if t.starts_with("Answer:") {
            let atoms_line = match lines.peek() {
                Some(next) if !is_keyword_line(next) => lines.next().unwrap_or(""),
                _ => "",
            };
            let atoms = split_atoms(atoms_line)
                .into_iter()
                .map(parse_ground_atom)
                .collect::<Result<Vec<_>, _>>()?;
            models.push(Model { atoms, cost: None });
        } else if let Some(rest) = t.strip_prefix("Optimization:") {
            let cost = rest
                .split_whitespace()
                .map(|c| c.parse::<i64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| SolverError::Unparseable(format!("optimization line: {e}")))?;
            if let Some(m) = models.last_mut() {
                m.cost = Some(cost);
            }
        } else if matches!(
            t,
            "SATISFIABLE" | "UNSATISFIABLE" | "UNKNOWN" | "OPTIMUM FOUND"
        ) {
            result = Some(t.to_string());
        } else if t.starts_with("TIME LIMIT") || t.starts_with("INTERRUPTED") {
            timed_out = true;
        } else if let Some(rest) = t.strip_prefix("Models") {
            let n = rest.trim_start().trim_start_matches(':').trim();
            more = n.ends_with('+');
        } else if let Some(rest) = t.strip_prefix("Optimum") {
            optimum = rest.trim_start().trim_start_matches(':').trim() == "yes";
        }
    }
    let result = result.ok_or_else(|| SolverError::Unparseable("no result line".into()))?;
    finish(&result, models, more, optimum, timed_out, mode)
}

fn is_keyword_line(line: &str) -> bool {
    let t = line.trim();
    t.starts_with("Answer:")
        || t.starts_with("Optimization:")
        || matches!(
            t,
            "SATISFIABLE" | "UNSATISFIABLE" | "UNKNOWN" | "OPTIMUM FOUND"
        )
}

fn finish(
    result: &str,
    models: Vec<Model>,
    more: bool,
    optimum: bool,
    timed_out: bool,
    mode: SolveMode,
) -> Result<SolveResult, SolverError> {
    let status = match result {
        "SATISFIABLE" | "OPTIMUM FOUND" => Status::Sat,
        "UNSATISFIABLE" => Status::Unsat,
        "UNKNOWN" => Status::Unknown,
        other => return Err(SolverError::Unparseable(format!("result `{other}`"))),
    };
    let exhaustive = match (status, mode) {
        (Status::Unknown, _) => false,
        (Status::Unsat, _) => !timed_out || models.is_empty(),
        (Status::Sat, SolveMode::EnumerateAll) => !timed_out && !more,
        (Status::Sat, SolveMode::Optimize) => optimum || result == "OPTIMUM FOUND",
        (Status::Sat, SolveMode::SatOne) => true,
    };
    Ok(SolveResult {
        models,
        status,
        exhaustive,
        timed_out,
        wall_time: Duration::ZERO,
    })
}
