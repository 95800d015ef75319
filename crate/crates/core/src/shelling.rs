//! Edge labels of covers by `(s, i, t)` triples, EL-shellability checks on
//! closed intervals, and generic shellability/thinness tests.
//!
//! For a vertical circle `l` at `x = column + 1/2` and an empty rectangle
//! `R`: `s = 0` when the column span of `R` meets `l`, else 1; `i` counts
//! the vertical circles crossed from `l` to the leftmost vertical edge of
//! `R` (going left when `s = 0`, right when `s = 1`), that edge included;
//! `t` is the width of `R`. Chains are labelled bottom to top.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::domains::{Domain, Rectangle};
use crate::error::{Error, Result};
use crate::grid::GridDiagram;
use crate::poset::{maximal_chains, Chain, FinitePoset, Interval, DEFAULT_CHAIN_BUDGET};

/// The vertical circle `l`, at `x = column + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CutLine {
    column: usize,
}

impl CutLine {
    pub fn new(n: usize, column: usize) -> Result<Self> {
        if column >= n {
            return Err(Error::CapExceeded {
                what: "line position",
                limit: n - 1,
                actual: column,
            });
        }
        Ok(Self { column })
    }

    /// `x = n - 1/2`, just left of the cut.
    pub fn default_for(n: usize) -> Self {
        Self { column: n - 1 }
    }

    pub fn column(&self) -> usize {
        self.column
    }

    /// Doubled x-coordinate.
    pub fn position_x2(&self) -> usize {
        2 * self.column + 1
    }
}

/// Lexicographically ordered `(s, i, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelTriple {
    pub s: u8,
    pub i: usize,
    pub t: usize,
}

pub fn label(grid: &GridDiagram, l: CutLine, rect: &Rectangle) -> LabelTriple {
    let n = grid.n();
    let p = l.column;
    if rect.covers_column(n, p) {
        LabelTriple {
            s: 0,
            i: (p + n - rect.col_start) % n + 1,
            t: rect.width,
        }
    } else {
        LabelTriple {
            s: 1,
            i: (rect.col_start + n - p) % n,
            t: rect.width,
        }
    }
}

/// Labels of consecutive covers along `chain`, bottom to top.
pub fn chain_labeling(
    grid: &GridDiagram,
    l: CutLine,
    interval: &Interval,
    chain: &Chain,
) -> Vec<LabelTriple> {
    chain
        .covers
        .iter()
        .map(|&k| label(grid, l, &interval.covers[k].rect))
        .collect()
}

/// Follows the cover labelled `labels[k]` upward from the bottom at each
/// step. Returns the element indices, or `None` if some label has no cover.
pub fn replay_labels(
    grid: &GridDiagram,
    l: CutLine,
    interval: &Interval,
    labels: &[LabelTriple],
) -> Option<Vec<usize>> {
    let mut cur = 0;
    let mut out = vec![0];
    for want in labels {
        let mut hits = interval.up[cur]
            .iter()
            .filter(|&&k| label(grid, l, &interval.covers[k].rect) == *want);
        let k = *hits.next()?;
        if hits.next().is_some() {
            return None;
        }
        cur = interval.covers[k].upper;
        out.push(cur);
    }
    Some(out)
}

pub fn weakly_increasing(labels: &[LabelTriple]) -> bool {
    labels.windows(2).all(|w| w[0] <= w[1])
}

pub fn strictly_increasing(labels: &[LabelTriple]) -> bool {
    labels.windows(2).all(|w| w[0] < w[1])
}

/// Outcome of checking the EL conditions on one closed interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElReport {
    pub bottom: String,
    pub top: String,
    pub length: usize,
    pub chain_count: usize,
    pub labelings: Vec<Vec<LabelTriple>>,
    pub weak_increasing: Vec<usize>,
    pub strict_increasing: Vec<usize>,
    pub lex_min: usize,
    pub labelings_distinct: bool,
    /// The lexicographically smallest labeling is weakly increasing.
    pub lex_min_increasing: bool,
    /// Every weakly increasing chain is the lex-min chain.
    pub increasing_is_lex_min: bool,
    pub verdict_el_weak: bool,
    pub verdict_el_strict: bool,
    /// Consecutive covers with a label descent.
    pub descents: usize,
    /// Descents whose two rectangles have boundary on neither 3 nor 4
    /// vertical circles.
    pub hexagon_violations: usize,
}

pub fn verify_el(grid: &GridDiagram, l: CutLine, interval: &Interval) -> Result<ElReport> {
    let chains = maximal_chains(interval, usize::MAX, DEFAULT_CHAIN_BUDGET)?;
    Ok(verify_el_with_chains(grid, l, interval, &chains))
}

/// [`verify_el`] over chains already enumerated.
pub fn verify_el_with_chains(
    grid: &GridDiagram,
    l: CutLine,
    interval: &Interval,
    chains: &[Chain],
) -> ElReport {
    let labelings: Vec<Vec<LabelTriple>> = chains
        .iter()
        .map(|c| chain_labeling(grid, l, interval, c))
        .collect();
    let weak: Vec<usize> = (0..chains.len())
        .filter(|&k| weakly_increasing(&labelings[k]))
        .collect();
    let strict: Vec<usize> = (0..chains.len())
        .filter(|&k| strictly_increasing(&labelings[k]))
        .collect();
    let lex_min = (0..chains.len())
        .min_by(|&a, &b| labelings[a].cmp(&labelings[b]).then(a.cmp(&b)))
        .unwrap_or(0);
    let mut sorted = labelings.clone();
    sorted.sort();
    let labelings_distinct = sorted.windows(2).all(|w| w[0] != w[1]);
    let lex_min_increasing = weak.contains(&lex_min);
    let increasing_is_lex_min = weak.iter().all(|&k| k == lex_min);
    let verdict_el_weak = labelings_distinct && weak.len() == 1 && weak[0] == lex_min;
    let verdict_el_strict = labelings_distinct && strict.len() == 1 && strict[0] == lex_min;

    let mut descents = 0;
    let mut hexagon_violations = 0;
    for (chain, labels) in chains.iter().zip(&labelings) {
        for k in 0..labels.len().saturating_sub(1) {
            if labels[k] <= labels[k + 1] {
                continue;
            }
            descents += 1;
            let lower = interval.covers[chain.covers[k]];
            let upper = interval.covers[chain.covers[k + 1]];
            let top_gen = &interval.elements[upper.upper].gen;
            let first = Domain::from_rectangle(&upper.rect, top_gen);
            let second = Domain::from_rectangle(&lower.rect, &first.to);
            let support = first.then(&second).beta_support();
            if support != 3 && support != 4 {
                hexagon_violations += 1;
            }
        }
    }

    ElReport {
        bottom: interval.bottom().to_string(),
        top: interval.top().to_string(),
        length: interval.length(),
        chain_count: chains.len(),
        labelings,
        weak_increasing: weak,
        strict_increasing: strict,
        lex_min,
        labelings_distinct,
        lex_min_increasing,
        increasing_is_lex_min,
        verdict_el_weak,
        verdict_el_strict,
        descents,
        hexagon_violations,
    }
}

/// Indices of `chains` sorted by labeling: the shelling order an EL-labeling
/// induces. Ties (which EL-labelings never produce) fall back to element order.
pub fn shelling_order(chains: &[Chain], labelings: &[Vec<LabelTriple>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..chains.len()).collect();
    order.sort_by(|&a, &b| {
        labelings[a]
            .cmp(&labelings[b])
            .then_with(|| chains[a].elements.cmp(&chains[b].elements))
    });
    order
}

/// For every `i < j` there are `k < j` and `v in m_j` with
/// `m_i ∩ m_j ⊆ m_k ∩ m_j = m_j \ {v}`. Facets are sorted vertex lists.
pub fn verify_bjorner(order: &[Vec<usize>]) -> bool {
    for j in 1..order.len() {
        let mj = &order[j];
        // vertices v of m_j such that m_j \ {v} is cut out by an earlier facet
        let mut ridge_missing: Vec<usize> = Vec::new();
        for mk in &order[..j] {
            let missing: Vec<usize> = mj.iter().filter(|v| !contains(mk, **v)).copied().collect();
            if missing.len() == 1 && !ridge_missing.contains(&missing[0]) {
                ridge_missing.push(missing[0]);
            }
        }
        for mi in &order[..j] {
            let ok = mj
                .iter()
                .any(|&v| !contains(mi, v) && ridge_missing.contains(&v));
            if !ok {
                return false;
            }
        }
    }
    true
}

fn contains(sorted: &[usize], v: usize) -> bool {
    sorted.binary_search(&v).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Thinness {
    Thin,
    Subthin,
    Neither,
}

/// Counts, for each submaximal chain, the maximal chains containing it.
/// A maximal chain of length one makes the empty chain submaximal.
pub fn submaximal_counts(p: &FinitePoset) -> Result<HashMap<Vec<usize>, usize>> {
    let chains = p.maximal_chains(DEFAULT_CHAIN_BUDGET)?;
    let len = chains.first().map_or(0, Vec::len);
    if chains.iter().any(|c| c.len() != len) {
        return Err(Error::NotGraded);
    }
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    for c in &chains {
        let mut sorted = c.clone();
        sorted.sort_unstable();
        for skip in 0..sorted.len() {
            let mut sub = sorted.clone();
            sub.remove(skip);
            *counts.entry(sub).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

/// Thin: every submaximal chain lies in exactly two maximal chains.
/// Subthin: at most two, and not thin.
pub fn classify_thin(p: &FinitePoset) -> Result<Thinness> {
    let counts = submaximal_counts(p)?;
    Ok(if counts.values().all(|&c| c == 2) {
        Thinness::Thin
    } else if counts.values().all(|&c| c <= 2) {
        Thinness::Subthin
    } else {
        Thinness::Neither
    })
}
