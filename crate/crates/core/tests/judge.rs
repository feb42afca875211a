use std::path::PathBuf;
use std::time::Instant;

use cfrepair_core::judge::{
    compile, judge, load_suite, Compiled, CompilerConfig, JudgeError, Outcome, ResourceLimits, TestCase, TestSuite,
};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn echo_suite(n: u32, limits: ResourceLimits) -> TestSuite {
    let cases = (1..=n)
        .map(|id| TestCase { id, input: format!("{id}\n").into_bytes(), expected_output: format!("{}\n", id * 2).into_bytes() })
        .collect();
    TestSuite { cases, limits }
}

const DOUBLER: &str = "#include <stdio.h>\nint main(){ int n; scanf(\"%d\", &n); printf(\"%d\\n\", 2*n); return 0; }\n";

#[test]
fn compile_success_and_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cc = CompilerConfig::from_env();
    assert!(matches!(compile("int main(){return 0;}", dir.path(), &cc).unwrap(), Compiled::Binary(_)));
    match compile("int main(){ return }", dir.path(), &cc).unwrap() {
        Compiled::Error(d) => assert!(!d.is_empty()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_compiler_is_a_fault() {
    let cc = CompilerConfig { command: "/nonexistent/cc".into(), ..CompilerConfig::default() };
    let r = judge(DOUBLER, &echo_suite(1, ResourceLimits::default()), &cc);
    assert!(matches!(r, Err(JudgeError::CompilerMissing(..))));
}

#[test]
fn taxonomy() {
    let limits = ResourceLimits { time_ms: 2000, memory_kb: 262_144 };
    let suite = echo_suite(3, limits);
    let cc = CompilerConfig::from_env();
    let programs = [
        (DOUBLER, Outcome::Accepted, None),
        ("#include <stdio.h>\nint main(){ int n; scanf(\"%d\", &n); printf(\"%d\\n\", n == 2 ? 5 : 2*n); return 0; }\n", Outcome::WrongAnswer, Some(2)),
        ("int main(){ while(1); return 0; }\n", Outcome::TimeLimitExceeded, Some(1)),
        (
            "#include <stdlib.h>\n#include <string.h>\nint main(){ for(;;){ char *p = malloc(1<<20); if(!p) return 3; memset(p, 1, 1<<20); } }\n",
            Outcome::MemoryLimitExceeded,
            Some(1),
        ),
        ("#include <stdio.h>\nint main(){ int n, z; scanf(\"%d\", &n); z = n - n; printf(\"%d\\n\", n / z); return 0; }\n", Outcome::RuntimeError, Some(1)),
        ("int main(){ return }\n", Outcome::CompileTimeError, None),
    ];
    for (src, outcome, first) in programs {
        let start = Instant::now();
        let v = judge(src, &suite, &cc).unwrap();
        assert_eq!(v.outcome, outcome, "{src}: {}", v.diagnostics);
        assert_eq!(v.first_failed_test, first);
        if outcome == Outcome::TimeLimitExceeded {
            assert!(start.elapsed().as_millis() < (limits.time_ms + 500) as u128 + 1000);
            assert!(v.measured[0].elapsed_ms < limits.time_ms + 500);
        }
    }
}

#[test]
fn first_failure_is_reported_by_id() {
    let suite = echo_suite(5, ResourceLimits { time_ms: 1000, memory_kb: 65_536 });
    let src = "#include <stdio.h>\nint main(){ int n; scanf(\"%d\", &n); printf(\"%d\\n\", n >= 3 ? n : 2*n); return 0; }\n";
    let v = judge(src, &suite, &CompilerConfig::from_env()).unwrap();
    assert_eq!(v.outcome, Outcome::WrongAnswer);
    assert_eq!(v.first_failed_test, Some(3));
    assert_eq!(v.measured.len(), 3);
}

#[test]
fn bit_count_suite_rejects_the_single_pass_program() {
    let dir = fixtures().join("579A");
    let suite = load_suite(&dir).unwrap();
    let cc = CompilerConfig::from_env();
    let run = |f: &str| judge(&std::fs::read_to_string(dir.join(f)).unwrap(), &suite, &cc).unwrap();
    assert_ne!(run("fig2_incorrect.c").outcome, Outcome::Accepted);
    assert_ne!(run("fig3_incorrect.c").outcome, Outcome::Accepted);
    for ok in ["fig2_repair.c", "fig2_user_fix.c", "fig3_repair.c", "fig3_user_fix.c"] {
        assert_eq!(run(ok).outcome, Outcome::Accepted, "{ok}");
    }
}

#[test]
fn odd_divisor_search_times_out() {
    let dir = fixtures().join("1475A");
    let suite = load_suite(&dir).unwrap();
    let cc = CompilerConfig::from_env();
    let slow = judge(&std::fs::read_to_string(dir.join("exhaustive.c")).unwrap(), &suite, &cc).unwrap();
    assert_eq!(slow.outcome, Outcome::TimeLimitExceeded);
    assert_eq!(slow.first_failed_test, Some(2));
    let fast = judge(&std::fs::read_to_string(dir.join("shift.c")).unwrap(), &suite, &cc).unwrap();
    assert_eq!(fast.outcome, Outcome::Accepted);
}

#[test]
fn suite_layout_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(load_suite(dir.path()), Err(JudgeError::Suite(_))));
    std::fs::create_dir(dir.path().join("tests")).unwrap();
    std::fs::write(dir.path().join("tests/1.in"), "1\n").unwrap();
    assert!(matches!(load_suite(dir.path()), Err(JudgeError::Suite(_))));
    std::fs::write(dir.path().join("tests/1.ans"), "2\n").unwrap();
    std::fs::write(dir.path().join("limits.json"), r#"{"time_ms": 500, "memory_kb": 1024}"#).unwrap();
    let s = load_suite(dir.path()).unwrap();
    assert_eq!(s.cases.len(), 1);
    assert_eq!(s.limits, ResourceLimits { time_ms: 500, memory_kb: 1024 });
}
