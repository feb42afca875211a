//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod support;
#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use cfrepair_bench::synthetic_pair;
use cfrepair_core::corpus::{is_high_quality, EvalReport, Group, RawRow};
use cfrepair_core::judge::{
    compile, judge, load_suite, Compiled, CompilerConfig, JudgeValidator, Outcome, ResourceLimits, TestCase,
    TestSuite,
};
use cfrepair_core::merge::{learn_pair, learn_transformations, pool_merge, LearnOptions, MergeTreePool};
use cfrepair_core::repair::{repair, RepairOptions, RepairOutcome};
use cfrepair_core::ted::{distance, learning_cost_model, ted, unit_cost_model, unit_distance};
use cfrepair_core::{control_flow_nodes, node_count, parse, Ast};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{core_fixtures, fixture_text, synthetic_corpus};

type Judged = Arc<Mutex<Vec<String>>>;
type Check = Result<String, String>;

const EVAL_SEED: u64 = 5;

fn fixture(name: &str) -> Ast {
    parse(&fixture_text("579A", name)).unwrap()
}

fn observed(judged: &Judged) -> RepairOptions {
    let sink = Arc::clone(judged);
    RepairOptions {
        observer: Some(Arc::new(move |c, _| sink.lock().unwrap().push(c.source.clone()))),
        ..RepairOptions::default()
    }
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Learn from the figure's own pair plus the peer pair showing the same
/// fix, then repair the figure's incorrect program.
fn figure(fig: &str, peer: &str, want: f64, judged: &Judged) -> Result<(Ast, Ast, Ast, f64, Duration), String> {
    let start = Instant::now();
    let target = fixture(&format!("{fig}_incorrect.c"));
    let user_fix = fixture(&format!("{fig}_user_fix.c"));
    let peer_pool =
        learn_transformations(&fixture(&format!("peer_{peer}_incorrect.c")), &fixture(&format!("peer_{peer}_fixed.c")));
    let pool = pool_merge(&[learn_transformations(&target, &user_fix), peer_pool]).map_err(|e| e.to_string())?;
    let suite = load_suite(&core_fixtures().join("579A")).map_err(|e| e.to_string())?;
    let v = JudgeValidator::new(suite, CompilerConfig::from_env());
    match repair(&target, &pool, &v, &observed(judged)).map_err(|e| e.to_string())? {
        RepairOutcome::Repaired { ast, repair_cost, .. } => {
            if repair_cost != want {
                return Err(format!("repair distance {repair_cost}, want {want}"));
            }
            Ok((target, user_fix, ast, repair_cost, start.elapsed()))
        }
        RepairOutcome::Failure { candidates_tried, .. } => Err(format!("no repair in {candidates_tried} candidates")),
    }
}

fn criterion_1(judged: &Judged) -> Check {
    let (target, user_fix, _, cost, took) = figure("fig2", "if", 1.0, judged)?;
    let fix = unit_distance(&target.root, &user_fix.root);
    ensure(
        fix == 6.0 && took < Duration::from_secs(30),
        format!("Accepted at distance {cost}, user fix at {fix}, {:.2}s < 30s", took.as_secs_f64()),
    )
}

fn criterion_2(judged: &Judged) -> Check {
    let (target, user_fix, repaired, cost, took) = figure("fig3", "guard", 2.0, judged)?;
    let hq = is_high_quality(&repaired, &target, &user_fix);
    ensure(
        hq && took < Duration::from_secs(30),
        format!("Accepted at distance {cost}, high quality {hq}, {:.2}s < 30s", took.as_secs_f64()),
    )
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let trees = oracle::trees_up_to(4);
    let cm = unit_cost_model();
    let mut pairs = 0;
    for a in &trees {
        let reach = oracle::bfs_distances(a, 5);
        for b in &trees {
            let want = reach[&oracle::tree_key(b)] as f64;
            let got = distance(a, b, &cm);
            if got != want {
                return Err(format!("{} -> {}: {got} vs {want}", a.sexp(), b.sexp()));
            }
            pairs += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), format!("{pairs} pairs exact, {:.2}s < 60s", took.as_secs_f64()))
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let models = [unit_cost_model(), learning_cost_model(10.0).unwrap()];
    for i in 0..500 {
        let cm = &models[i % 2];
        let tree = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=30);
            oracle::random_tree(rng, n)
        };
        let (a, b, c) = (tree(&mut rng), tree(&mut rng), tree(&mut rng));
        let ab = ted(&a, &b, cm);
        let fail = |what: &str| Err(format!("pair {i}: {what}"));
        if ab.distance != distance(&b, &a, cm) {
            return fail("asymmetric");
        }
        if distance(&a, &a, cm) != 0.0 {
            return fail("ted(a,a) != 0");
        }
        if distance(&a, &c, cm) > ab.distance + distance(&b, &c, cm) {
            return fail("triangle inequality");
        }
        if ab.script.apply(&a).ok().as_ref() != Some(&b) {
            return fail("script does not reproduce b");
        }
    }
    Ok("500 pairs: symmetry, identity, triangle, script replay".into())
}

const INPUTS: [i64; 11] = [0, 1, 2, 3, 5, 8, 13, 64, 100, 255, 1000];

fn program(body: &str) -> String {
    let lines: String = body.split('\n').map(|l| format!("    {l}\n")).collect();
    format!("#include <stdio.h>\n\nint main()\n{{\n    int n;\n    scanf(\"%d\", &n);\n{lines}    return 0;\n}}\n")
}

/// (shape, incorrect body, correct body); both read `n` first.
const SYNTHESIZED: [(&str, &str, &str); 20] = [
    ("guard", "int s = 0, i;\nfor (i = 1; i < n; i++)\n    s += i;\nprintf(\"%d\\n\", s);", "int s = 0, i;\nfor (i = 1; i <= n; i++)\n    s += i;\nprintf(\"%d\\n\", s);"),
    ("guard", "int u = 0;\nwhile (n > 0) {\n    if (n % 2 == 0)\n        u++;\n    n = n / 2;\n}\nprintf(\"%d\\n\", u);", "int u = 0;\nwhile (n > 0) {\n    if (n % 2)\n        u++;\n    n = n / 2;\n}\nprintf(\"%d\\n\", u);"),
    ("guard", "int m = 0;\nwhile (n > 0) {\n    if (n % 10 < m)\n        m = n % 10;\n    n = n / 10;\n}\nprintf(\"%d\\n\", m);", "int m = 0;\nwhile (n > 0) {\n    if (n % 10 > m)\n        m = n % 10;\n    n = n / 10;\n}\nprintf(\"%d\\n\", m);"),
    ("guard", "int d = 0;\nwhile (n > 1) {\n    d++;\n    n = n / 10;\n}\nprintf(\"%d\\n\", d);", "int d = 0;\nwhile (n > 0) {\n    d++;\n    n = n / 10;\n}\nprintf(\"%d\\n\", d);"),
    ("guard", "if (n % 2 == 1)\n    printf(\"EVEN\\n\");\nelse\n    printf(\"ODD\\n\");", "if (n % 2 == 0)\n    printf(\"EVEN\\n\");\nelse\n    printf(\"ODD\\n\");"),
    ("insertion", "int s = 0, i;\nfor (i = 1; i <= n; i++) {\n    s += i;\n}\nprintf(\"%d\\n\", s);", "int s = 0, i;\nfor (i = 1; i <= n; i++) {\n    s += i;\n    s %= 7;\n}\nprintf(\"%d\\n\", s);"),
    ("insertion", "printf(\"%d\\n\", n * 2);", "printf(\"%d\\n\", n * 2);\nprintf(\"done\\n\");"),
    ("insertion", "int c = 0;\nc = n + 1;\nprintf(\"%d\\n\", c);", "int c = 0;\nn = n * 3;\nc = n + 1;\nprintf(\"%d\\n\", c);"),
    ("insertion", "int c = 0, i;\nfor (i = 1; i <= n; i++) {\n    c++;\n}\nprintf(\"%d\\n\", c);", "int c = 0, i;\nfor (i = 1; i <= n; i++) {\n    if (i % 3 == 0)\n        c++;\n}\nprintf(\"%d\\n\", c);"),
    ("deletion", "n = n + 1;\nprintf(\"%d\\n\", n * n);", "printf(\"%d\\n\", n * n);"),
    ("deletion", "int s = 0, i;\nfor (i = 1; i <= n; i++) {\n    s = 0;\n    s += i;\n}\nprintf(\"%d\\n\", s);", "int s = 0, i;\nfor (i = 1; i <= n; i++) {\n    s += i;\n}\nprintf(\"%d\\n\", s);"),
    ("deletion", "printf(\"%d\\n\", n);\nprintf(\"%d\\n\", n);", "printf(\"%d\\n\", n);"),
    ("deletion", "int c = 0, i;\nfor (i = 1; i <= n; i++) {\n    c += 2;\n    c--;\n}\nprintf(\"%d\\n\", c);", "int c = 0, i;\nfor (i = 1; i <= n; i++) {\n    c += 2;\n}\nprintf(\"%d\\n\", c);"),
    ("if->while", "if (n >= 10)\n    n = n / 10;\nprintf(\"%d\\n\", n);", "while (n >= 10)\n    n = n / 10;\nprintf(\"%d\\n\", n);"),
    ("if->while", "int c = 0;\nif (n > 0) {\n    if (n % 2 != 0)\n        c++;\n    n = n / 2;\n}\nprintf(\"%d\\n\", c);", "int c = 0;\nwhile (n > 0) {\n    if (n % 2 != 0)\n        c++;\n    n = n / 2;\n}\nprintf(\"%d\\n\", c);"),
    ("while->if", "while (n > 100)\n    n = n - 100;\nprintf(\"%d\\n\", n);", "if (n > 100)\n    n = n - 100;\nprintf(\"%d\\n\", n);"),
    ("if->for", "int s = 0, i = 1;\nif (i <= n)\n    s += i;\nprintf(\"%d\\n\", s);", "int s = 0, i = 1;\nfor (i = 1; i <= n; i++)\n    s += i;\nprintf(\"%d\\n\", s);"),
    ("for->if", "int c = 0, i;\nfor (i = 2; i <= n; i++)\n    c++;\nprintf(\"%d\\n\", c);", "int c = 0, i = 2;\nif (i <= n)\n    c++;\nprintf(\"%d\\n\", c);"),
    ("while->for", "int s = 0, i = 0;\nwhile (i < n) {\n    s += i;\n    i++;\n}\nprintf(\"%d\\n\", s);", "int s = 0, i = 0;\nfor (i = 0; i <= n; i++) {\n    s += i;\n}\nprintf(\"%d\\n\", s);"),
    ("for->while", "int c = 0, i;\nfor (i = n; i > 1; i = i / 2)\n    c++;\nprintf(\"%d\\n\", c);", "int c = 0, i = n;\nwhile (i > 0) {\n    c++;\n    i = i / 2;\n}\nprintf(\"%d\\n\", c);"),
];

/// Expected outputs come from running the correct program.
fn suite_from(correct: &str, workdir: &Path) -> Result<TestSuite, String> {
    let bin = match compile(correct, workdir, &CompilerConfig::from_env()).map_err(|e| e.to_string())? {
        Compiled::Binary(b) => b,
        Compiled::Error(d) => return Err(d),
    };
    let mut cases = Vec::new();
    for (k, n) in INPUTS.iter().enumerate() {
        let input = format!("{n}\n").into_bytes();
        let mut child = Command::new(&bin)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| e.to_string())?;
        std::io::Write::write_all(child.stdin.as_mut().unwrap(), &input).map_err(|e| e.to_string())?;
        let out = child.wait_with_output().map_err(|e| e.to_string())?;
        cases.push(TestCase { id: k as u32 + 1, input, expected_output: out.stdout });
    }
    Ok(TestSuite { cases, limits: ResourceLimits { time_ms: 1000, memory_kb: 262_144 } })
}

fn criterion_5(judged: &Judged) -> Check {
    let cc = CompilerConfig::from_env();
    let mut repaired = 0;
    let mut failures = Vec::new();
    let mut shapes = BTreeSet::new();
    for (k, (shape, bad, good)) in SYNTHESIZED.iter().enumerate() {
        shapes.insert(shape.split("->").next().unwrap());
        let (bad, good) = (program(bad), program(good));
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let suite = suite_from(&good, tmp.path())?;
        let (p_i, p_c) = match (parse(&bad), parse(&good)) {
            (Ok(i), Ok(c)) => (i, c),
            _ => return Err(format!("pair {k} does not parse")),
        };
        if judge(&bad, &suite, &cc).map_err(|e| e.to_string())?.is_accepted() {
            return Err(format!("pair {k} ({shape}): incorrect program already passes"));
        }
        let pool: MergeTreePool = learn_transformations(&p_i, &p_c);
        let v = JudgeValidator::new(suite, cc.clone());
        match repair(&p_i, &pool, &v, &observed(judged)).map_err(|e| e.to_string())? {
            RepairOutcome::Repaired { .. } => repaired += 1,
            RepairOutcome::Failure { candidates_tried, .. } => {
                failures.push(format!("{k} ({shape}) after {candidates_tried}"))
            }
        }
    }
    ensure(failures.is_empty(), format!("{repaired}/20 repaired within 1000 candidates{}", if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join("; ")) }))
}

/// Independent check: the C compiler's own diagnostics.
fn undeclared_uses(source: &str, dir: &Path, k: usize) -> bool {
    let file = dir.join(format!("c{k}.c"));
    std::fs::write(&file, source).unwrap();
    let out = Command::new(CompilerConfig::from_env().command)
        .args(["-std=c99", "-fsyntax-only"])
        .arg(&file)
        .output()
        .expect("compiler runs");
    let diag = String::from_utf8_lossy(&out.stderr);
    diag.contains("undeclared") || diag.contains("implicit declaration")
}

fn criterion_6(judged: &Judged) -> Check {
    let sources: BTreeSet<String> = judged.lock().unwrap().iter().cloned().collect();
    if sources.is_empty() {
        return Err("no candidates were judged".into());
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    if !undeclared_uses("int main(){ return ghost; }\n", tmp.path(), usize::MAX) {
        return Err("checker misses an undeclared use".into());
    }
    let bad = sources.iter().enumerate().filter(|(k, s)| undeclared_uses(s, tmp.path(), *k)).count();
    ensure(bad == 0, format!("{bad} of {} distinct judged candidates use undeclared names", sources.len()))
}

fn criterion_7() -> Check {
    let limits = ResourceLimits { time_ms: 2000, memory_kb: 262_144 };
    let cases = (1..=3)
        .map(|id| TestCase { id, input: format!("{id}\n").into_bytes(), expected_output: format!("{}\n", id * 2).into_bytes() })
        .collect();
    let suite = TestSuite { cases, limits };
    let programs = [
        ("#include <stdio.h>\nint main(){ int n; scanf(\"%d\", &n); printf(\"%d\\n\", 2*n); return 0; }\n", Outcome::Accepted, None),
        ("#include <stdio.h>\nint main(){ int n; scanf(\"%d\", &n); printf(\"%d\\n\", n == 2 ? 5 : 2*n); return 0; }\n", Outcome::WrongAnswer, Some(2)),
        ("int main(){ while(1); return 0; }\n", Outcome::TimeLimitExceeded, Some(1)),
        ("#include <stdlib.h>\n#include <string.h>\nint main(){ for(;;){ char *p = malloc(1<<20); if(!p) return 3; memset(p, 1, 1<<20); } }\n", Outcome::MemoryLimitExceeded, Some(1)),
        ("#include <stdio.h>\nint main(){ int n, z; scanf(\"%d\", &n); z = n - n; printf(\"%d\\n\", n / z); return 0; }\n", Outcome::RuntimeError, Some(1)),
        ("int main(){ return }\n", Outcome::CompileTimeError, None),
    ];
    let cc = CompilerConfig::from_env();
    let mut seen = Vec::new();
    let mut tle_ms = 0;
    for (src, want, first) in programs {
        let v = judge(src, &suite, &cc).map_err(|e| e.to_string())?;
        if v.outcome != want || v.first_failed_test != first {
            return Err(format!("expected {want} at {first:?}, got {} at {:?}", v.outcome, v.first_failed_test));
        }
        if want == Outcome::TimeLimitExceeded {
            tle_ms = v.measured[0].elapsed_ms;
        }
        seen.push(want.code());
    }
    ensure(tle_ms <= limits.time_ms + 500, format!("{}; TLE stopped after {tle_ms} ms <= 2500 ms", seen.join("/")))
}

fn criterion_8() -> Check {
    let dir = core_fixtures().join("1475A");
    let suite = load_suite(&dir).map_err(|e| e.to_string())?;
    let cc = CompilerConfig::from_env();
    let run = |f: &str| judge(&std::fs::read_to_string(dir.join(f)).unwrap(), &suite, &cc).map_err(|e| e.to_string());
    let slow = run("exhaustive.c")?;
    let fast = run("shift.c")?;
    ensure(
        slow.outcome == Outcome::TimeLimitExceeded && slow.first_failed_test == Some(2) && fast.is_accepted(),
        format!("exhaustive: {} on test {}; shift: {}", slow.outcome, slow.first_failed_test.unwrap_or(0), fast.outcome),
    )
}

fn evaluate_once(db: &Path, out: &Path, parallelism: &str) -> Result<(Vec<u8>, Vec<u8>), String> {
    let seed = EVAL_SEED.to_string();
    let o = support::cfrepair(&[
        "evaluate", "--db", db.to_str().unwrap(), "--problem", "579A", "--seed", &seed, "--parallelism", parallelism,
        "--out", out.to_str().unwrap(),
    ]);
    if o.status.code() != Some(0) {
        return Err(String::from_utf8_lossy(&o.stderr).into_owned());
    }
    let read = |f: &str| std::fs::read(out.join(f)).map_err(|e| e.to_string());
    Ok((read("report.json")?, read("report.txt")?))
}

fn row_mean(rows: &[&RawRow], f: impl Fn(&RawRow) -> Option<f64>) -> Option<f64> {
    let vals: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
    let mut sum = 0.0;
    for v in &vals {
        sum += v;
    }
    (!vals.is_empty()).then(|| sum / vals.len() as f64)
}

fn criterion_9() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    synthetic_corpus(tmp.path(), 12);
    let first = evaluate_once(tmp.path(), &tmp.path().join("r1"), "1")?;
    let again = evaluate_once(tmp.path(), &tmp.path().join("r2"), "1")?;
    let wide = evaluate_once(tmp.path(), &tmp.path().join("r4"), "4")?;
    if first != again || first != wide {
        return Err("reports differ between runs".into());
    }
    let report: EvalReport = serde_json::from_slice(&first.0).map_err(|e| e.to_string())?;
    if report.train_users != 9 || report.eval_users != 3 {
        return Err(format!("split {}/{}", report.train_users, report.eval_users));
    }
    let all: Vec<&RawRow> = report.rows.iter().collect();
    let mut summaries = report.groups.clone();
    summaries.push(report.overall.clone());
    for g in &summaries {
        let rows: Vec<&RawRow> = all.iter().copied().filter(|r| g.group.is_none_or(|grp| r.group == grp)).collect();
        let repaired: Vec<&RawRow> = rows.iter().copied().filter(|r| r.repaired).collect();
        let failed: Vec<&RawRow> = rows.iter().copied().filter(|r| !r.repaired).collect();
        let consistent = g.targets == rows.len()
            && g.repaired == repaired.len()
            && g.avg_relative_repair_size == row_mean(&rows, |r| r.relative_repair_size)
            && g.avg_dissimilarity == row_mean(&rows, |r| r.dissimilarity)
            && g.avg_dissimilarity_repaired == row_mean(&repaired, |r| r.dissimilarity)
            && g.avg_dissimilarity_failed == row_mean(&failed, |r| r.dissimilarity)
            && (g.group != Some(Group::Two)
                || g.high_quality == Some(rows.iter().filter(|r| r.high_quality == Some(true)).count()));
        if !consistent {
            return Err(format!("summary for {:?} does not recompute from rows", g.group));
        }
    }
    let groups: Vec<String> = report.groups.iter().map(|g| format!("{:?}", g.group.unwrap())).collect();
    Ok(format!(
        "identical across 3 runs (parallelism 1, 1, 4); train 9 / eval 3; {} rows recompute for groups {}",
        report.rows.len(),
        groups.join(", ")
    ))
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn criterion_10() -> Check {
    let (i, c) = synthetic_pair(16);
    let (p_i, p_c) = (parse(&i).unwrap(), parse(&c).unwrap());
    let nodes = node_count(&p_i);
    let regions = control_flow_nodes(&p_i).len();
    if nodes < 200 || regions < 8 {
        return Err(format!("pair too small: {nodes} nodes, {regions} regions"));
    }
    let opts = LearnOptions::default();
    let time = |f: &dyn Fn()| {
        median(
            (0..5)
                .map(|_| {
                    let t = Instant::now();
                    f();
                    t.elapsed()
                })
                .collect(),
        )
    };
    let regional = time(&|| {
        std::hint::black_box(learn_pair(&p_i, &p_c, &opts));
    });
    let whole = time(&|| {
        std::hint::black_box(ted(&p_i.root, &p_c.root, &opts.cost_model));
    });
    let ratio = whole.as_secs_f64() / regional.as_secs_f64();
    ensure(
        ratio >= 5.0,
        format!("{nodes} nodes, {regions} regions: regional {regional:?}, whole tree {whole:?}, {ratio:.1}x >= 5x"),
    )
}

fn main() {
    let judged: Judged = Arc::default();
    let criteria: [(&str, &dyn Fn() -> Check); 10] = [
        ("Fig. 2 end to end", &|| criterion_1(&judged)),
        ("Fig. 3 end to end", &|| criterion_2(&judged)),
        ("TED oracle equivalence", &criterion_3),
        ("metric axioms", &criterion_4),
        ("self-repair on synthesized pairs", &|| criterion_5(&judged)),
        ("filter soundness", &|| criterion_6(&judged)),
        ("judge taxonomy", &criterion_7),
        ("odd-divisor efficiency", &criterion_8),
        ("protocol determinism", &criterion_9),
        ("flattening benefit", &criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag}: {name}: {detail}", k + 1);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
