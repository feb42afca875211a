#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfrepair_core::{parse, print, Node, NodeKind};

pub fn core_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn fixture_text(problem: &str, name: &str) -> String {
    std::fs::read_to_string(core_fixtures().join(problem).join(name)).unwrap()
}

/// A fixture with identifiers renamed, printed back to C.
pub fn renamed(name: &str, renames: &[(&str, &str)]) -> String {
    fn go(n: &mut Node, renames: &[(&str, &str)]) {
        if n.kind == NodeKind::Identifier {
            if let Some((_, to)) = renames.iter().find(|(from, _)| *from == n.label) {
                n.label = to.to_string();
            }
        }
        n.children.iter_mut().for_each(|c| go(c, renames));
    }
    let mut ast = parse(&fixture_text("579A", name)).unwrap();
    go(&mut ast.root, renames);
    print(&ast)
}

pub fn copy_suite(problem: &str, to: &Path) {
    let from = core_fixtures().join(problem);
    std::fs::create_dir_all(to.join("tests")).unwrap();
    std::fs::copy(from.join("limits.json"), to.join("limits.json")).unwrap();
    for e in std::fs::read_dir(from.join("tests")).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), to.join("tests").join(e.file_name())).unwrap();
    }
}

const INPUTS: [&str; 6] = ["x", "n", "v", "num", "a", "m"];
const COUNTERS: [&str; 6] = ["c", "cnt", "k", "ans", "res", "bits"];

/// A bit-count corpus under `root/579A` with `users` users whose
/// histories cycle through four shapes: the single-pass `if` bug fixed by
/// a loop, the inverted parity test fixed by the plain test, the `if` bug
/// never fixed, and the parity bug followed by a syntax error and a
/// rewrite. Variable names vary per user.
pub fn synthetic_corpus(root: &Path, users: usize) -> PathBuf {
    let dir = root.join("579A");
    copy_suite("579A", &dir);
    for i in 0..users {
        let udir = dir.join("users").join(format!("user{i:02}"));
        std::fs::create_dir_all(&udir).unwrap();
        let x = INPUTS[i % INPUTS.len()];
        let if_names = [("x", x), ("c", COUNTERS[i % COUNTERS.len()])];
        let guard_names = [("x", x), ("u", COUNTERS[(i + 1) % COUNTERS.len()])];
        let files: Vec<(String, String)> = match i % 4 {
            0 => vec![
                ("1_WA.c".into(), renamed("fig2_incorrect.c", &if_names)),
                ("2_AC.c".into(), renamed("fig2_repair.c", &if_names)),
            ],
            1 => vec![
                ("1_WA.c".into(), renamed("fig3_incorrect.c", &guard_names)),
                ("2_AC.c".into(), renamed("fig3_repair.c", &guard_names)),
            ],
            2 => vec![("1_WA.c".into(), renamed("fig2_incorrect.c", &if_names))],
            _ => vec![
                ("1_WA.c".into(), renamed("fig3_incorrect.c", &guard_names)),
                ("2_CE.c".into(), "int main(){ return }\n".into()),
                ("3_AC.c".into(), renamed("fig3_user_fix.c", &guard_names)),
            ],
        };
        for (name, text) in files {
            std::fs::write(udir.join(name), text).unwrap();
        }
    }
    dir
}

pub fn cfrepair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfrepair"))
        .args(args)
        .env_remove("CLEF_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}
