use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;

use crate::ast::{is_strict_prefix, Ast};
use crate::frontend::print;
use crate::merge::MergeTreePool;
use crate::ted::unit_distance;

use super::apply::apply_sites;
use super::matching::{find_matches, MatchSite};
use super::variables::{align_variables_capped, filter_spurious};
use super::RepairOptions;

/// Largest number of patterns ever combined into one candidate.
pub const MAX_ARITY: usize = 3;
/// Combinations examined per arity.
pub const DEFAULT_COMBINATION_CAP: usize = 5000;

/// Candidates sort by this key, smallest first.
#[derive(Debug, Clone, PartialEq)]
pub struct RankKey {
    pub patterns: usize,
    pub repair_cost: f64,
    /// Summed frequency of the applied patterns; larger ranks earlier.
    pub frequency: u64,
    pub tiebreak: Vec<usize>,
}

impl Eq for RankKey {}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.patterns
            .cmp(&other.patterns)
            .then(self.repair_cost.total_cmp(&other.repair_cost))
            .then(other.frequency.cmp(&self.frequency))
            .then_with(|| self.tiebreak.cmp(&other.tiebreak))
    }
}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone)]
pub struct RepairCandidate {
    pub ast: Ast,
    pub source: String,
    pub applied: Vec<MatchSite>,
    /// Unit-cost tree distance from the target.
    pub repair_cost: f64,
    pub rank_key: RankKey,
}

/// Lazily produced candidates in rank order, one arity at a time.
pub struct CandidateStream {
    target: Ast,
    sites: Vec<MatchSite>,
    combination_cap: usize,
    max_arity: usize,
    alignment_cap: usize,
    budget: usize,
    emitted: usize,
    arity: usize,
    seen: HashSet<String>,
    buffer: VecDeque<RepairCandidate>,
}

/// Enumerate repair candidates for `target`, beginning with the target
/// itself, and stop after `budget` items.
pub fn enumerate_candidates(target: &Ast, pool: &MergeTreePool, budget: usize) -> CandidateStream {
    CandidateStream::new(target, pool, &RepairOptions { budget, ..Default::default() })
}

impl CandidateStream {
    /// Uses the budget and the enumeration caps of `opts`.
    pub fn new(target: &Ast, pool: &MergeTreePool, opts: &RepairOptions) -> Self {
        let mut indexed: Vec<(usize, MatchSite)> = find_matches(target, pool).into_iter().enumerate().collect();
        // cheap, frequent patterns first so capped arities keep the best
        indexed.sort_by(|(a, x), (b, y)| {
            x.transformation_size
                .total_cmp(&y.transformation_size)
                .then(y.frequency.cmp(&x.frequency))
                .then(x.pattern_index.cmp(&y.pattern_index))
                .then(a.cmp(b))
        });
        let sorted: Vec<MatchSite> = indexed.into_iter().map(|(_, s)| s).collect();
        let source = print(target);
        let mut seen = HashSet::new();
        seen.insert(source.clone());
        let zero = RepairCandidate {
            ast: target.clone(),
            source,
            applied: Vec::new(),
            repair_cost: 0.0,
            rank_key: RankKey { patterns: 0, repair_cost: 0.0, frequency: 0, tiebreak: Vec::new() },
        };
        CandidateStream {
            target: target.clone(),
            sites: sorted,
            combination_cap: opts.combination_cap,
            max_arity: opts.max_arity.min(MAX_ARITY),
            alignment_cap: opts.alignment_cap,
            budget: opts.budget,
            emitted: 0,
            arity: 0,
            seen,
            buffer: VecDeque::from([zero]),
        }
    }

    /// Sites found in the target, in the order combinations are drawn.
    pub fn sites(&self) -> &[MatchSite] {
        &self.sites
    }

    fn fill(&mut self) {
        while self.buffer.is_empty() && self.arity < self.max_arity && self.arity < self.sites.len() {
            self.arity += 1;
            let combos = combinations(&self.sites, self.arity, self.combination_cap);
            let target = &self.target;
            let sites = &self.sites;
            let cap = self.alignment_cap;
            let mut level: Vec<RepairCandidate> = combos
                .par_iter()
                .flat_map_iter(|combo| build(target, sites, combo, cap))
                .collect();
            level.sort_by(|a, b| a.rank_key.cmp(&b.rank_key));
            for c in level {
                if self.seen.insert(c.source.clone()) {
                    self.buffer.push_back(c);
                }
            }
        }
    }
}

fn disjoint(a: &MatchSite, b: &MatchSite) -> bool {
    a.path != b.path && !is_strict_prefix(&a.path, &b.path) && !is_strict_prefix(&b.path, &a.path)
}

/// Pairwise disjoint index sets of size `k` in lexicographic order.
fn combinations(sites: &[MatchSite], k: usize, cap: usize) -> Vec<Vec<usize>> {
    fn go(sites: &[MatchSite], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..sites.len() {
            if cur.iter().all(|&j| disjoint(&sites[j], &sites[i])) {
                cur.push(i);
                go(sites, k, i + 1, cur, out, cap);
                cur.pop();
                if out.len() >= cap {
                    return;
                }
            }
        }
    }
    let mut out = Vec::new();
    go(sites, k, 0, &mut Vec::new(), &mut out, cap);
    out
}

fn build(target: &Ast, sites: &[MatchSite], combo: &[usize], alignment_cap: usize) -> Vec<RepairCandidate> {
    let applied: Vec<MatchSite> = combo.iter().map(|&i| sites[i].clone()).collect();
    let Ok(rewritten) = apply_sites(target, &applied) else {
        return Vec::new();
    };
    let frequency = applied.iter().map(|s| s.frequency).sum();
    let variants = align_variables_capped(&rewritten, alignment_cap);
    let mut out = Vec::new();
    for (j, v) in variants.into_iter().enumerate() {
        if filter_spurious(vec![v.clone()], target).is_empty() {
            continue;
        }
        let repair_cost = unit_distance(&target.root, &v.root);
        let mut tiebreak: Vec<usize> = applied.iter().map(|s| s.pattern_index).collect();
        tiebreak.extend_from_slice(combo);
        tiebreak.push(j);
        out.push(RepairCandidate {
            source: print(&v),
            ast: v,
            applied: applied.clone(),
            repair_cost,
            rank_key: RankKey { patterns: combo.len(), repair_cost, frequency, tiebreak },
        });
    }
    out
}

impl Iterator for CandidateStream {
    type Item = RepairCandidate;

    fn next(&mut self) -> Option<RepairCandidate> {
        if self.emitted >= self.budget {
            return None;
        }
        self.fill();
        let c = self.buffer.pop_front()?;
        self.emitted += 1;
        Some(c)
    }
}
