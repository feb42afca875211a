use std::fs::File;
use std::io::Read;
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::Path;
use std::process::{Command, ExitStatus, Stdio};
use std::time::{Duration, Instant};

use super::{outputs_equal, JudgeError, Outcome, ResourceLimits, TestCase};

const POLL: Duration = Duration::from_millis(2);
/// Largest output a run may write.
const MAX_OUTPUT_BYTES: u64 = 64 << 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestResult {
    /// `None` when the test passed.
    pub failure: Option<Outcome>,
    pub elapsed_ms: u64,
    pub peak_kb: u64,
    pub note: String,
}

fn set_limit(resource: libc::__rlimit_resource_t, value: u64) -> std::io::Result<()> {
    let lim = libc::rlimit { rlim_cur: value as libc::rlim_t, rlim_max: value as libc::rlim_t };
    // SAFETY: plain syscall on a stack value
    if unsafe { libc::setrlimit(resource, &lim) } != 0 {
        return Err(std::io::Error::last_os_error());
    }
    Ok(())
}

fn rss_kb(pid: i32) -> Option<u64> {
    let status = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    line.split_whitespace().nth(1)?.parse().ok()
}

/// Run one case in a fresh process under the limits. Input and output go
/// through files in `workdir`.
pub fn run_test(bin: &Path, case: &TestCase, limits: &ResourceLimits, workdir: &Path) -> Result<TestResult, JudgeError> {
    let in_path = workdir.join(format!("{}.in", case.id));
    let out_path = workdir.join(format!("{}.out", case.id));
    std::fs::write(&in_path, &case.input)?;
    let stdin = File::open(&in_path)?;
    let stdout = File::create(&out_path)?;

    let address_space = limits.memory_kb.saturating_mul(2 * 1024);
    let stack = limits.memory_kb.saturating_mul(1024);
    let cpu_secs = limits.time_ms.div_ceil(1000) + 1;
    let mut cmd = Command::new(bin);
    cmd.stdin(Stdio::from(stdin)).stdout(Stdio::from(stdout)).stderr(Stdio::null()).current_dir(workdir);
    // SAFETY: the hook only calls setrlimit, which is async-signal-safe
    unsafe {
        cmd.pre_exec(move || {
            set_limit(libc::RLIMIT_AS, address_space)?;
            set_limit(libc::RLIMIT_STACK, stack)?;
            set_limit(libc::RLIMIT_CPU, cpu_secs)?;
            set_limit(libc::RLIMIT_FSIZE, MAX_OUTPUT_BYTES)?;
            set_limit(libc::RLIMIT_CORE, 0)?;
            Ok(())
        });
    }
    let start = Instant::now();
    let child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) if e.raw_os_error() == Some(libc::ENOMEM) => {
            return Ok(TestResult {
                failure: Some(Outcome::MemoryLimitExceeded),
                elapsed_ms: 0,
                peak_kb: 0,
                note: "could not map the program within the memory limit".into(),
            })
        }
        Err(e) => return Err(JudgeError::Sandbox(format!("spawn {}: {e}", bin.display()))),
    };
    let pid = child.id() as i32;
    let deadline = Duration::from_millis(limits.time_ms);
    let mut peak = 0u64;
    let mut killed: Option<Outcome> = None;
    let mut status: libc::c_int = 0;
    // SAFETY: zeroed rusage is a valid value
    let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
    loop {
        let flags = if killed.is_some() { 0 } else { libc::WNOHANG };
        // SAFETY: pid is our child; status and usage are valid out-pointers
        let r = unsafe { libc::wait4(pid, &mut status, flags, &mut usage) };
        if r == pid {
            break;
        }
        if r < 0 {
            let e = std::io::Error::last_os_error();
            if e.kind() == std::io::ErrorKind::Interrupted {
                continue;
            }
            return Err(JudgeError::Sandbox(format!("wait: {e}")));
        }
        if let Some(kb) = rss_kb(pid) {
            peak = peak.max(kb);
        }
        if peak > limits.memory_kb {
            killed = Some(Outcome::MemoryLimitExceeded);
        } else if start.elapsed() >= deadline {
            killed = Some(Outcome::TimeLimitExceeded);
        }
        if killed.is_some() {
            // SAFETY: signalling our own unreaped child
            unsafe { libc::kill(pid, libc::SIGKILL) };
            continue;
        }
        std::thread::sleep(POLL);
    }
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let peak_kb = peak.max(usage.ru_maxrss.max(0) as u64);
    let exit = ExitStatus::from_raw(status);
    let failure = match killed {
        Some(o) => Some(o),
        None if peak_kb > limits.memory_kb => Some(Outcome::MemoryLimitExceeded),
        None if exit.signal() == Some(libc::SIGXCPU) => Some(Outcome::TimeLimitExceeded),
        None if !exit.success() => Some(Outcome::RuntimeError),
        None => {
            let mut actual = Vec::new();
            File::open(&out_path)?.read_to_end(&mut actual)?;
            (!outputs_equal(&actual, &case.expected_output)).then_some(Outcome::WrongAnswer)
        }
    };
    let note = match failure {
        Some(Outcome::RuntimeError) => match exit.signal() {
            Some(sig) => format!("killed by signal {sig}"),
            None => format!("exit code {}", exit.code().unwrap_or(-1)),
        },
        Some(o) => format!("{o} on test {}", case.id),
        None => String::new(),
    };
    let _ = std::fs::remove_file(&in_path);
    let _ = std::fs::remove_file(&out_path);
    Ok(TestResult { failure, elapsed_ms, peak_kb, note })
}
