use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ast::{node_count, Ast};
use crate::judge::{CompilerConfig, JudgeValidator, Outcome, TestSuite};
use crate::repair::{repair, RepairOptions, RepairOutcome};
use crate::ted::CostModel;

use super::{dissimilarity, group_users, is_high_quality, learn_pool, make_pairs, relative_repair_size, SubmissionDb};

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Candidate budget, enumeration caps; its parallelism is ignored.
    pub repair: RepairOptions,
    /// Targets repaired concurrently.
    pub parallelism: usize,
    pub cost_model: CostModel,
    pub compiler: CompilerConfig,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            repair: RepairOptions::default(),
            parallelism: 1,
            cost_model: CostModel::learning(CostModel::DEFAULT_CF_WEIGHT).expect("default weight is valid"),
            compiler: CompilerConfig::from_env(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Group {
    /// Never accepted.
    One,
    /// Accepted later.
    Two,
}

/// Outcome for one evaluation target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRow {
    pub user_id: String,
    pub timestamp: u64,
    pub group: Group,
    pub node_count: usize,
    pub repaired: bool,
    pub candidates_tried: usize,
    /// Verdict of the accepted candidate, or the best one seen.
    pub outcome: Option<Outcome>,
    pub repair_cost: Option<f64>,
    pub relative_repair_size: Option<f64>,
    pub dissimilarity: Option<f64>,
    /// Group Two repairs only.
    pub high_quality: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: Option<Group>,
    pub users: usize,
    pub targets: usize,
    pub repaired: usize,
    pub repair_rate: f64,
    pub avg_relative_repair_size: Option<f64>,
    pub avg_dissimilarity: Option<f64>,
    pub avg_dissimilarity_repaired: Option<f64>,
    pub avg_dissimilarity_failed: Option<f64>,
    pub high_quality: Option<usize>,
    /// High-quality repairs over repaired targets.
    pub high_quality_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub problem_id: String,
    pub budget: usize,
    pub train_users: usize,
    pub eval_users: usize,
    pub pairs: usize,
    pub pool_size: usize,
    pub groups: Vec<GroupSummary>,
    pub overall: GroupSummary,
    pub notes: Vec<String>,
    pub rows: Vec<RawRow>,
}

/// Mean in row order, so it recomputes exactly from the rows.
pub(crate) fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl GroupSummary {
    /// Aggregate rows; `group` is `None` for the all-groups line.
    pub fn from_rows(group: Option<Group>, rows: &[&RawRow]) -> GroupSummary {
        let mut users: Vec<&str> = rows.iter().map(|r| r.user_id.as_str()).collect();
        users.dedup();
        let repaired = rows.iter().filter(|r| r.repaired).count();
        let hq = (group == Some(Group::Two)).then(|| rows.iter().filter(|r| r.high_quality == Some(true)).count());
        GroupSummary {
            group,
            users: users.len(),
            targets: rows.len(),
            repaired,
            repair_rate: if rows.is_empty() { 0.0 } else { repaired as f64 / rows.len() as f64 },
            avg_relative_repair_size: mean(rows.iter().filter_map(|r| r.relative_repair_size)),
            avg_dissimilarity: mean(rows.iter().filter_map(|r| r.dissimilarity)),
            avg_dissimilarity_repaired: mean(rows.iter().filter(|r| r.repaired).filter_map(|r| r.dissimilarity)),
            avg_dissimilarity_failed: mean(rows.iter().filter(|r| !r.repaired).filter_map(|r| r.dissimilarity)),
            high_quality: hq,
            high_quality_rate: hq.filter(|_| repaired > 0).map(|h| h as f64 / repaired as f64),
        }
    }
}

struct Target<'a> {
    user: &'a str,
    timestamp: u64,
    group: Group,
    ast: &'a Ast,
    user_fix: Option<&'a Ast>,
}

/// Learn from `train_db`, try to repair every incorrect submission of
/// `eval_db`, and aggregate per group.
pub fn evaluate(
    train_db: &SubmissionDb,
    eval_db: &SubmissionDb,
    suite: &TestSuite,
    opts: &EvalOptions,
) -> Result<EvalReport, rayon::ThreadPoolBuildError> {
    let pairs = make_pairs(train_db);
    let pool = learn_pool(&train_db.problem_id, &pairs, opts.cost_model);
    let correct: Vec<Ast> = train_db
        .users
        .values()
        .flatten()
        .filter(|r| r.recorded_verdict == Outcome::Accepted)
        .filter_map(|r| r.ast.clone())
        .collect();

    let (one, two) = group_users(eval_db);
    let mut targets = Vec::new();
    for (group, users) in [(Group::One, &one), (Group::Two, &two)] {
        for u in users {
            let records = &eval_db.users[u];
            let user_fix = records.iter().find(|r| r.recorded_verdict == Outcome::Accepted).and_then(|r| r.ast.as_ref());
            for r in records.iter().filter(|r| r.recorded_verdict != Outcome::Accepted) {
                if let Some(ast) = &r.ast {
                    targets.push(Target { user: u, timestamp: r.timestamp, group, ast, user_fix });
                }
            }
        }
    }
    targets.sort_by(|a, b| (a.group, a.user, a.timestamp).cmp(&(b.group, b.user, b.timestamp)));

    let validator = JudgeValidator::new(suite.clone(), opts.compiler.clone());
    let ropts = RepairOptions { parallelism: 1, ..opts.repair.clone() };
    let threads = rayon::ThreadPoolBuilder::new().num_threads(opts.parallelism.max(1)).build()?;
    let rows: Vec<RawRow> = threads.install(|| {
        targets
            .par_iter()
            .map(|t| {
                let mut row = RawRow {
                    user_id: t.user.to_string(),
                    timestamp: t.timestamp,
                    group: t.group,
                    node_count: node_count(t.ast),
                    repaired: false,
                    candidates_tried: 0,
                    outcome: None,
                    repair_cost: None,
                    relative_repair_size: None,
                    dissimilarity: dissimilarity(t.ast, &correct),
                    high_quality: None,
                };
                match repair(t.ast, &pool, &validator, &ropts) {
                    Ok(RepairOutcome::Repaired { ast, repair_cost, candidates_tried, .. }) => {
                        row.repaired = true;
                        row.candidates_tried = candidates_tried;
                        row.outcome = Some(Outcome::Accepted);
                        row.repair_cost = Some(repair_cost);
                        row.relative_repair_size = Some(relative_repair_size(&ast, t.ast));
                        if t.group == Group::Two {
                            row.high_quality = t.user_fix.map(|fix| is_high_quality(&ast, t.ast, fix));
                        }
                    }
                    Ok(RepairOutcome::Failure { candidates_tried, best_verdict }) => {
                        row.candidates_tried = candidates_tried;
                        row.outcome = best_verdict.map(|v| v.outcome);
                    }
                    Err(e) => {
                        log::warn!("judging {}:{} failed: {e}", t.user, t.timestamp);
                        row.outcome = Some(Outcome::Other);
                    }
                }
                row
            })
            .collect()
    });

    let mut groups = Vec::new();
    let mut notes = Vec::new();
    for g in [Group::One, Group::Two] {
        let rs: Vec<&RawRow> = rows.iter().filter(|r| r.group == g).collect();
        if rs.is_empty() {
            notes.push(format!("group {g:?} has no evaluation targets"));
        } else {
            groups.push(GroupSummary::from_rows(Some(g), &rs));
        }
    }
    let all: Vec<&RawRow> = rows.iter().collect();
    Ok(EvalReport {
        problem_id: train_db.problem_id.clone(),
        budget: opts.repair.budget,
        train_users: train_db.user_count(),
        eval_users: eval_db.user_count(),
        pairs: pairs.pairs.len(),
        pool_size: pool.len(),
        groups,
        overall: GroupSummary::from_rows(None, &all),
        notes,
        rows,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"))
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Plain-text table with one line per group and a total line.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "problem {}: {} training users, {} evaluation users, {} pairs, {} patterns",
            self.problem_id, self.train_users, self.eval_users, self.pairs, self.pool_size
        );
        let _ = writeln!(
            out,
            "{:<8} {:>6} {:>8} {:>9} {:>12} {:>14} {:>13} {:>13} {:>13} {:>10}",
            "group", "users", "targets", "repaired", "repair rate", "rel. rep. size", "dissim. all", "dissim. rep.", "dissim. fail", "HQ rate"
        );
        for g in self.groups.iter().chain(std::iter::once(&self.overall)) {
            let name = match g.group {
                Some(Group::One) => "One",
                Some(Group::Two) => "Two",
                None => "All",
            };
            let _ = writeln!(
                out,
                "{:<8} {:>6} {:>8} {:>9} {:>12.4} {:>14} {:>13} {:>13} {:>13} {:>10}",
                name,
                g.users,
                g.targets,
                g.repaired,
                g.repair_rate,
                opt(g.avg_relative_repair_size),
                opt(g.avg_dissimilarity),
                opt(g.avg_dissimilarity_repaired),
                opt(g.avg_dissimilarity_failed),
                opt(g.high_quality_rate),
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
