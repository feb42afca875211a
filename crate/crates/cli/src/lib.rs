//! Command-line driver: learn patterns, repair a program, judge a program,
//! evaluate a corpus.

pub mod config;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cfrepair_core::corpus::{evaluate, ingest, learn_pool, make_pairs, split_users, EvalOptions, SubmissionDb};
use cfrepair_core::judge::{judge, load_suite, JudgeError, JudgeValidator, TestSuite};
use cfrepair_core::merge::MergeTreePool;
use cfrepair_core::repair::{repair, RepairOptions, RepairOutcome};
use cfrepair_core::{parse, ted::unit_distance};
use clap::{Args, Parser, Subcommand};

pub use config::Config;

pub const EXIT_OK: i32 = 0;
/// No repair found, or the program was not accepted.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// Compiler or sandbox problems.
pub const EXIT_INFRA: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cfrepair", version, about = "Repair failing competitive-programming submissions with patterns learned from other users")]
pub struct Cli {
    /// JSON config file (defaults to $CLEF_CONFIG)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn a pattern pool from a submission database
    Learn(LearnArgs),
    /// Repair one program
    Repair(RepairArgs),
    /// Judge one program against a test suite
    Judge(JudgeArgs),
    /// Split users, learn, and evaluate repairs on held-out users
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    /// Corpus root holding <problem>/users/...
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub cf_weight: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    #[arg(long)]
    pub pool: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Suite directory with tests/ and limits.json
    #[arg(long)]
    pub tests: PathBuf,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub parallelism: Option<usize>,
}

#[derive(Debug, Args)]
pub struct JudgeArgs {
    #[arg(long)]
    pub tests: PathBuf,
    pub file: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub db: PathBuf,
    #[arg(long)]
    pub problem: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Directory for report.json and report.txt
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Exit code for an error: infrastructure faults are told apart from bad
/// input.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.downcast_ref::<JudgeError>().is_some_and(|j| !matches!(j, JudgeError::Suite(_)))) {
        EXIT_INFRA
    } else {
        EXIT_USAGE
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Learn(a) => {
            if let Some(w) = a.cf_weight {
                cfg.cf_weight = w;
            }
            cfg.validate()?;
            cmd_learn(&cfg, &a)
        }
        Command::Repair(a) => {
            cfg.budget = a.budget.unwrap_or(cfg.budget);
            cfg.parallelism = a.parallelism.unwrap_or(cfg.parallelism);
            cfg.validate()?;
            cmd_repair(&cfg, &a)
        }
        Command::Judge(a) => {
            cfg.validate()?;
            cmd_judge(&cfg, &a)
        }
        Command::Evaluate(a) => {
            cfg.seed = a.seed.unwrap_or(cfg.seed);
            cfg.ratio = a.ratio.unwrap_or(cfg.ratio);
            cfg.budget = a.budget.unwrap_or(cfg.budget);
            cfg.parallelism = a.parallelism.unwrap_or(cfg.parallelism);
            cfg.validate()?;
            cmd_evaluate(&cfg, &a)
        }
    }
}

fn problem_dir(db: &Path, problem: &str) -> PathBuf {
    let nested = db.join(problem);
    if !nested.is_dir() && db.file_name().is_some_and(|n| n == problem) {
        db.to_path_buf()
    } else {
        nested
    }
}

fn load_db(db: &Path, problem: &str) -> Result<SubmissionDb> {
    let dir = problem_dir(db, problem);
    ingest(&dir).with_context(|| format!("loading submissions of {problem}"))
}

fn suite_at(dir: &Path) -> Result<TestSuite> {
    load_suite(dir).with_context(|| format!("loading tests from {}", dir.display()))
}

fn repair_options(cfg: &Config) -> RepairOptions {
    RepairOptions {
        budget: cfg.budget,
        parallelism: cfg.parallelism,
        combination_cap: cfg.combination_cap,
        max_arity: cfg.max_arity,
        alignment_cap: cfg.alignment_cap,
        observer: None,
    }
}

pub fn cmd_learn(cfg: &Config, a: &LearnArgs) -> Result<i32> {
    let db = load_db(&a.db, &a.problem)?;
    let pairs = make_pairs(&db);
    let pool = learn_pool(&a.problem, &pairs, cfg.cost_model());
    pool.save(&a.out).with_context(|| format!("writing {}", a.out.display()))?;
    println!("pairs: {}", pairs.pairs.len());
    println!("patterns: {}", pool.len());
    Ok(EXIT_OK)
}

/// `dir/name.c` becomes `dir/name.repaired.c`.
pub fn repaired_path(target: &Path) -> PathBuf {
    let stem = target.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    target.with_file_name(format!("{stem}.repaired.c"))
}

pub fn cmd_repair(cfg: &Config, a: &RepairArgs) -> Result<i32> {
    let pool = MergeTreePool::load(&a.pool).with_context(|| format!("loading pool {}", a.pool.display()))?;
    let text = std::fs::read_to_string(&a.target).with_context(|| format!("reading {}", a.target.display()))?;
    let target = parse(&text).with_context(|| format!("parsing {}", a.target.display()))?;
    let suite = suite_at(&a.tests)?;
    let validator = JudgeValidator::new(suite, cfg.compiler.clone());
    match repair(&target, &pool, &validator, &repair_options(cfg))? {
        RepairOutcome::Repaired { ast, source, repair_cost, applied, candidates_tried } => {
            let out = repaired_path(&a.target);
            std::fs::write(&out, &source).with_context(|| format!("writing {}", out.display()))?;
            println!("repaired: {}", out.display());
            println!("candidates tried: {candidates_tried}");
            for s in &applied {
                let e = &pool.entries()[s.pattern_index];
                println!(
                    "applied pattern {} at {:?} (from {}, size {}, frequency {})",
                    s.pattern_index, s.path, e.tree.origin.pair_id, e.tree.transformation_size, e.frequency
                );
            }
            println!("repair distance: {}", repair_cost);
            debug_assert_eq!(repair_cost, unit_distance(&target.root, &ast.root));
            Ok(EXIT_OK)
        }
        RepairOutcome::Failure { candidates_tried, best_verdict } => {
            println!("no repair found");
            println!("candidates tried: {candidates_tried}");
            match best_verdict {
                Some(v) => match v.first_failed_test {
                    Some(t) => println!("best verdict: {} on test {t}", v.outcome),
                    None => println!("best verdict: {}", v.outcome),
                },
                None => println!("best verdict: none"),
            }
            Ok(EXIT_FAILURE)
        }
    }
}

pub fn cmd_judge(cfg: &Config, a: &JudgeArgs) -> Result<i32> {
    let suite = suite_at(&a.tests)?;
    let source = std::fs::read_to_string(&a.file).with_context(|| format!("reading {}", a.file.display()))?;
    let v = judge(&source, &suite, &cfg.compiler)?;
    println!("verdict: {}", v.outcome);
    match v.first_failed_test {
        Some(t) => println!("first failed test: {t}"),
        None => println!("first failed test: none"),
    }
    for m in &v.measured {
        println!("test {}: {} ms, {} kB", m.test, m.elapsed_ms, m.peak_kb);
    }
    if !v.diagnostics.is_empty() {
        println!("{}", v.diagnostics.trim_end());
    }
    Ok(if v.is_accepted() { EXIT_OK } else { EXIT_FAILURE })
}

pub fn cmd_evaluate(cfg: &Config, a: &EvaluateArgs) -> Result<i32> {
    let dir = problem_dir(&a.db, &a.problem);
    let suite = suite_at(&dir)?;
    let db = load_db(&a.db, &a.problem)?;
    let (train, eval) = split_users(&db, cfg.ratio, cfg.seed);
    let opts = EvalOptions {
        repair: repair_options(cfg),
        parallelism: cfg.parallelism,
        cost_model: cfg.cost_model(),
        compiler: cfg.compiler.clone(),
    };
    let report = evaluate(&train, &eval, &suite, &opts)?;
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let table = report.to_table();
    std::fs::write(a.out.join("report.json"), report.to_json())?;
    std::fs::write(a.out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(EXIT_OK)
}
