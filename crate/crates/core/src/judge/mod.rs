//! Compiling and running submissions against a test suite.

mod exec;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::{Deserialize, Serialize};

pub use exec::{run_test, TestResult};

/// Environment variable naming the compiler command.
pub const COMPILER_ENV: &str = "CLEF_CC";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Accepted,
    CompileTimeError,
    RuntimeError,
    TimeLimitExceeded,
    MemoryLimitExceeded,
    WrongAnswer,
    Other,
}

impl Outcome {
    pub fn code(self) -> &'static str {
        match self {
            Outcome::Accepted => "AC",
            Outcome::CompileTimeError => "CE",
            Outcome::RuntimeError => "RE",
            Outcome::TimeLimitExceeded => "TLE",
            Outcome::MemoryLimitExceeded => "MLE",
            Outcome::WrongAnswer => "WA",
            Outcome::Other => "OT",
        }
    }

    pub fn from_code(code: &str) -> Option<Outcome> {
        Some(match code {
            "AC" => Outcome::Accepted,
            "CE" => Outcome::CompileTimeError,
            "RE" => Outcome::RuntimeError,
            "TLE" => Outcome::TimeLimitExceeded,
            "MLE" => Outcome::MemoryLimitExceeded,
            "WA" => Outcome::WrongAnswer,
            "OT" => Outcome::Other,
            _ => return None,
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceLimits {
    pub time_ms: u64,
    pub memory_kb: u64,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        ResourceLimits { time_ms: 2000, memory_kb: 262_144 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestCase {
    pub id: u32,
    pub input: Vec<u8>,
    pub expected_output: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSuite {
    pub cases: Vec<TestCase>,
    pub limits: ResourceLimits,
}

/// Resource use of one test run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measurement {
    pub test: u32,
    pub elapsed_ms: u64,
    pub peak_kb: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub first_failed_test: Option<u32>,
    pub measured: Vec<Measurement>,
    /// Compiler output, or a note on the failing run.
    pub diagnostics: String,
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        self.outcome == Outcome::Accepted
    }

    /// An infrastructure fault reported as a verdict.
    pub fn other(message: impl Into<String>) -> Verdict {
        Verdict { outcome: Outcome::Other, first_failed_test: None, measured: Vec::new(), diagnostics: message.into() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JudgeError {
    #[error("compiler `{0}` could not be started: {1}")]
    CompilerMissing(String, std::io::Error),
    #[error("bad test suite: {0}")]
    Suite(String),
    #[error("sandbox: {0}")]
    Sandbox(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Compiler command and flags. The source file, `-o <binary>` and the
/// link libraries are appended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilerConfig {
    pub command: String,
    pub flags: Vec<String>,
    pub libs: Vec<String>,
}

impl Default for CompilerConfig {
    fn default() -> Self {
        CompilerConfig {
            command: "gcc".into(),
            flags: vec!["-std=c99".into(), "-O2".into()],
            libs: vec!["-lm".into()],
        }
    }
}

impl CompilerConfig {
    /// Defaults, with the command taken from `CLEF_CC` when set.
    pub fn from_env() -> Self {
        let mut c = CompilerConfig::default();
        if let Ok(cc) = std::env::var(COMPILER_ENV) {
            if !cc.trim().is_empty() {
                c.command = cc.trim().to_string();
            }
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Compiled {
    Binary(PathBuf),
    Error(String),
}

/// Compile `source` inside `workdir`.
pub fn compile(source: &str, workdir: &Path, cc: &CompilerConfig) -> Result<Compiled, JudgeError> {
    let src = workdir.join("main.c");
    let bin = workdir.join("main");
    std::fs::write(&src, source)?;
    let out = Command::new(&cc.command)
        .args(&cc.flags)
        .arg(&src)
        .arg("-o")
        .arg(&bin)
        .args(&cc.libs)
        .current_dir(workdir)
        .output()
        .map_err(|e| JudgeError::CompilerMissing(cc.command.clone(), e))?;
    let diagnostics = String::from_utf8_lossy(&out.stderr).into_owned();
    if out.status.success() && bin.exists() {
        Ok(Compiled::Binary(bin))
    } else {
        Ok(Compiled::Error(diagnostics))
    }
}

/// Read `tests/<n>.in`, `tests/<n>.ans` and `limits.json` from `dir`.
pub fn load_suite(dir: &Path) -> Result<TestSuite, JudgeError> {
    let limits_path = dir.join("limits.json");
    let limits: ResourceLimits = match std::fs::read_to_string(&limits_path) {
        Ok(text) => serde_json::from_str(&text).map_err(|e| JudgeError::Suite(format!("{}: {e}", limits_path.display())))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => ResourceLimits::default(),
        Err(e) => return Err(e.into()),
    };
    if limits.time_ms == 0 || limits.memory_kb == 0 {
        return Err(JudgeError::Suite("limits must be positive".into()));
    }
    let tests = dir.join("tests");
    let mut cases = Vec::new();
    for id in 1.. {
        let input = tests.join(format!("{id}.in"));
        if !input.exists() {
            break;
        }
        let ans = tests.join(format!("{id}.ans"));
        let expected_output =
            std::fs::read(&ans).map_err(|e| JudgeError::Suite(format!("{}: {e}", ans.display())))?;
        cases.push(TestCase { id, input: std::fs::read(&input)?, expected_output });
    }
    if cases.is_empty() {
        return Err(JudgeError::Suite(format!("no tests under {}", tests.display())));
    }
    Ok(TestSuite { cases, limits })
}

/// Output comparison: trailing whitespace on each line and one final
/// newline are ignored.
pub fn outputs_equal(actual: &[u8], expected: &[u8]) -> bool {
    fn lines(b: &[u8]) -> Vec<&[u8]> {
        let mut v: Vec<&[u8]> = b.split(|&c| c == b'\n').map(|l| l.trim_ascii_end()).collect();
        if v.last().is_some_and(|l| l.is_empty()) {
            v.pop();
        }
        v
    }
    lines(actual) == lines(expected)
}

/// Compile and run every case in order, stopping at the first failure.
pub fn judge(source: &str, suite: &TestSuite, cc: &CompilerConfig) -> Result<Verdict, JudgeError> {
    let dir = tempfile::Builder::new().prefix("cfjudge").tempdir()?;
    let bin = match compile(source, dir.path(), cc)? {
        Compiled::Binary(b) => b,
        Compiled::Error(diagnostics) => {
            return Ok(Verdict {
                outcome: Outcome::CompileTimeError,
                first_failed_test: None,
                measured: Vec::new(),
                diagnostics,
            })
        }
    };
    let mut measured = Vec::new();
    for case in &suite.cases {
        let r = run_test(&bin, case, &suite.limits, dir.path())?;
        measured.push(Measurement { test: case.id, elapsed_ms: r.elapsed_ms, peak_kb: r.peak_kb });
        if let Some(outcome) = r.failure {
            return Ok(Verdict { outcome, first_failed_test: Some(case.id), measured, diagnostics: r.note });
        }
    }
    Ok(Verdict { outcome: Outcome::Accepted, first_failed_test: None, measured, diagnostics: String::new() })
}

/// A suite and compiler bundled for candidate validation.
#[derive(Debug, Clone)]
pub struct JudgeValidator {
    pub suite: TestSuite,
    pub compiler: CompilerConfig,
}

impl JudgeValidator {
    pub fn new(suite: TestSuite, compiler: CompilerConfig) -> Self {
        JudgeValidator { suite, compiler }
    }
}

impl crate::repair::Validator for JudgeValidator {
    fn validate(&self, source: &str) -> Result<Verdict, JudgeError> {
        judge(source, &self.suite, &self.compiler)
    }
}
