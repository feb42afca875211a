//! Submission histories, training pairs and the evaluation protocol.

mod eval;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ast::{node_count, Ast};
use crate::frontend::parse;
use crate::judge::Outcome;
use crate::merge::{learn_pair, LearnOptions, MergeTreePool};
use crate::ted::{unit_distance, CostModel};

pub use eval::{evaluate, EvalOptions, EvalReport, Group, GroupSummary, RawRow};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}: {msg}", path.display())]
    Layout { path: PathBuf, msg: String },
    #[error("{}: user {user} already has a submission numbered {seq}", path.display())]
    Duplicate { path: PathBuf, user: String, seq: u64 },
    #[error("cannot read {}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone)]
pub struct SubmissionRecord {
    pub user_id: String,
    pub problem_id: String,
    pub timestamp: u64,
    pub source: String,
    pub recorded_verdict: Outcome,
    /// `None` when the source does not parse.
    pub ast: Option<Ast>,
    pub syntax_error: Option<String>,
}

/// One problem's submissions, grouped by user and sorted by time.
#[derive(Debug, Clone, Default)]
pub struct SubmissionDb {
    pub problem_id: String,
    pub users: BTreeMap<String, Vec<SubmissionRecord>>,
    pub tests_dir: Option<PathBuf>,
}

impl SubmissionDb {
    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn record_count(&self) -> usize {
        self.users.values().map(Vec::len).sum()
    }

    fn subset(&self, users: &BTreeSet<String>) -> SubmissionDb {
        SubmissionDb {
            problem_id: self.problem_id.clone(),
            users: self.users.iter().filter(|(u, _)| users.contains(*u)).map(|(u, r)| (u.clone(), r.clone())).collect(),
            tests_dir: self.tests_dir.clone(),
        }
    }
}

fn parse_name(name: &str) -> Option<(u64, Outcome)> {
    let stem = name.strip_suffix(".c")?;
    let (seq, verdict) = stem.split_once('_')?;
    Some((seq.parse().ok()?, Outcome::from_code(verdict)?))
}

/// Load `<dir>/users/<user>/<seq>_<VERDICT>.c`; the problem id is the
/// directory name and `<dir>/tests` the suite, when present.
pub fn ingest(dir: &Path) -> Result<SubmissionDb, CorpusError> {
    let meta = std::fs::metadata(dir).map_err(io_err(dir))?;
    if !meta.is_dir() {
        return Err(CorpusError::Layout { path: dir.to_path_buf(), msg: "not a directory".into() });
    }
    let problem_id = dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tests = dir.join("tests");
    let mut db = SubmissionDb { problem_id: problem_id.clone(), users: BTreeMap::new(), tests_dir: tests.is_dir().then(|| dir.to_path_buf()) };
    let users_dir = dir.join("users");
    if !users_dir.exists() {
        return Ok(db);
    }
    let mut user_dirs: Vec<PathBuf> =
        std::fs::read_dir(&users_dir).map_err(io_err(&users_dir))?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io_err(&users_dir))?;
    user_dirs.sort();
    for udir in user_dirs {
        if !udir.is_dir() {
            return Err(CorpusError::Layout { path: udir, msg: "expected a user directory".into() });
        }
        let user = udir.file_name().unwrap().to_string_lossy().into_owned();
        let mut files: Vec<PathBuf> =
            std::fs::read_dir(&udir).map_err(io_err(&udir))?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>().map_err(io_err(&udir))?;
        files.sort();
        let mut records: BTreeMap<u64, SubmissionRecord> = BTreeMap::new();
        for f in files {
            let name = f.file_name().unwrap().to_string_lossy().into_owned();
            let Some((seq, verdict)) = parse_name(&name) else {
                return Err(CorpusError::Layout { path: f, msg: "expected <seq>_<VERDICT>.c".into() });
            };
            if records.contains_key(&seq) {
                return Err(CorpusError::Duplicate { path: f, user, seq });
            }
            let source = std::fs::read_to_string(&f).map_err(io_err(&f))?;
            let (ast, syntax_error) = match parse(&source) {
                Ok(a) => (Some(a), None),
                Err(e) => (None, Some(e.to_string())),
            };
            records.insert(
                seq,
                SubmissionRecord {
                    user_id: user.clone(),
                    problem_id: problem_id.clone(),
                    timestamp: seq,
                    source,
                    recorded_verdict: verdict,
                    ast,
                    syntax_error,
                },
            );
        }
        db.users.insert(user, records.into_values().collect());
    }
    Ok(db)
}

#[derive(Debug, Clone)]
pub struct Pair {
    pub incorrect: Ast,
    pub correct: Ast,
    pub user_id: String,
    pub incorrect_timestamp: u64,
    pub correct_timestamp: u64,
}

impl Pair {
    pub fn id(&self) -> String {
        format!("{}:{}-{}", self.user_id, self.incorrect_timestamp, self.correct_timestamp)
    }
}

#[derive(Debug, Clone, Default)]
pub struct PairSet {
    pub pairs: Vec<Pair>,
}

/// Users whose first submission was not accepted.
fn struggled(records: &[SubmissionRecord]) -> bool {
    records.first().is_some_and(|r| r.recorded_verdict != Outcome::Accepted)
}

/// Every (incorrect, accepted) combination per user, skipping unparsable
/// records and users who were accepted on their first attempt.
pub fn make_pairs(db: &SubmissionDb) -> PairSet {
    let mut pairs = Vec::new();
    for (user, records) in &db.users {
        if !struggled(records) {
            continue;
        }
        let valid: Vec<&SubmissionRecord> = records.iter().filter(|r| r.ast.is_some()).collect();
        for i in valid.iter().filter(|r| r.recorded_verdict != Outcome::Accepted) {
            for c in valid.iter().filter(|r| r.recorded_verdict == Outcome::Accepted) {
                pairs.push(Pair {
                    incorrect: i.ast.clone().unwrap(),
                    correct: c.ast.clone().unwrap(),
                    user_id: user.clone(),
                    incorrect_timestamp: i.timestamp,
                    correct_timestamp: c.timestamp,
                });
            }
        }
    }
    PairSet { pairs }
}

/// Learn from every pair and pool the patterns.
pub fn learn_pool(problem_id: &str, pairs: &PairSet, cost_model: CostModel) -> MergeTreePool {
    let learned: Vec<_> = pairs
        .pairs
        .par_iter()
        .map(|p| {
            let opts = LearnOptions { cost_model, problem_id: problem_id.to_string(), pair_id: p.id() };
            learn_pair(&p.incorrect, &p.correct, &opts)
        })
        .collect();
    let mut pool = MergeTreePool::new(problem_id);
    for tree in learned.into_iter().flatten() {
        pool.add(tree, 1);
    }
    pool
}

/// Random user-level partition; `floor(n * ratio)` users go to training.
pub fn split_users(db: &SubmissionDb, ratio: f64, seed: u64) -> (SubmissionDb, SubmissionDb) {
    assert!(ratio > 0.0 && ratio < 1.0, "split ratio must lie strictly between 0 and 1");
    let mut users: Vec<&String> = db.users.keys().collect();
    users.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (users.len() as f64 * ratio).floor() as usize;
    let train: BTreeSet<String> = users[..n_train].iter().map(|u| u.to_string()).collect();
    let eval: BTreeSet<String> = users[n_train..].iter().map(|u| u.to_string()).collect();
    (db.subset(&train), db.subset(&eval))
}

/// Evaluation users with at least one incorrect submission, split by
/// whether they ever got accepted. Users accepted on the first attempt
/// are left out.
pub fn group_users(eval_db: &SubmissionDb) -> (Vec<String>, Vec<String>) {
    let mut one = Vec::new();
    let mut two = Vec::new();
    for (user, records) in &eval_db.users {
        if !struggled(records) {
            continue;
        }
        if records.iter().any(|r| r.recorded_verdict == Outcome::Accepted) {
            two.push(user.clone());
        } else {
            one.push(user.clone());
        }
    }
    (one, two)
}

/// Smallest unit-cost distance to a correct program, over the target size.
pub fn dissimilarity(target: &Ast, correct_set: &[Ast]) -> Option<f64> {
    let best = correct_set.iter().map(|c| unit_distance(&target.root, &c.root)).min_by(f64::total_cmp)?;
    Some(best / node_count(target) as f64)
}

pub fn relative_repair_size(repaired: &Ast, target: &Ast) -> f64 {
    unit_distance(&repaired.root, &target.root) / node_count(target) as f64
}

/// Is the generated repair strictly closer to the target than the user's
/// own fix?
pub fn is_high_quality(repaired: &Ast, target: &Ast, user_fix: &Ast) -> bool {
    unit_distance(&repaired.root, &target.root) < unit_distance(&user_fix.root, &target.root)
}
