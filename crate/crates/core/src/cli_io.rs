//! Run configuration, sweeps over a grid's intervals, and the reports the
//! `gridshell` binary prints.
//!
//! Every sweep runs tops in parallel and folds the per-top results in
//! generator order, so reports do not depend on the thread count.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus;
use crate::domains::{decompose, is_positive, maslov_index, solve_domain, Domain};
use crate::error::{Error, Result};
use crate::flowcat::{
    boundary_avoids_endpoint_chain, certify, check_compositions, MorSpace, Verdict,
};
use crate::grid::{parse_grid, recut, GridDiagram};
use crate::homology::{
    homology, minus_homology_truncated, tilde_complexes, BigradedDims,
};
use crate::poset::{
    gt_chain_complex, leq_in, maximal_chains, CoverRelation, CoverSource, DownSet, Interval,
    DEFAULT_CHAIN_BUDGET, DEFAULT_INTERVAL_CAP,
};
use crate::shelling::{
    classify_thin, replay_labels, shelling_order, verify_bjorner, verify_el_with_chains,
    CutLine, Thinness,
};
use crate::states::{
    enumerate_generators, generator_bigrading, states_in_grading, Bigrading, Generator,
    GridState, DEFAULT_GENERATOR_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RESOURCE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Homology,
    Shelling,
    Flowcat,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Tilde,
    Minus,
}

/// Where `l` goes: one column, or every column in turn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinePlacement {
    Default,
    Column(usize),
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    /// A grid file path or a corpus name; `corpus` means every corpus grid
    /// (verify only).
    pub grid: String,
    pub flavor: Flavor,
    pub sector: Option<i64>,
    pub m_floor: Option<i64>,
    pub line: LinePlacement,
    /// Largest interval length (elements in a maximal chain) swept.
    pub interval_cap: usize,
    /// Largest Maslov gap for morphism spaces.
    pub gap_cap: usize,
    /// Chain enumeration and shelling search budget.
    pub budget: usize,
    pub json: bool,
    pub threads: Option<usize>,
    /// Test fixture: corrupt one cover relation before verifying.
    pub inject_fault: bool,
}

impl RunConfig {
    pub fn new(command: Command, grid: impl Into<String>) -> Self {
        Self {
            command,
            grid: grid.into(),
            flavor: Flavor::Tilde,
            sector: None,
            m_floor: None,
            line: LinePlacement::Default,
            interval_cap: 4,
            gap_cap: crate::flowcat::DEFAULT_GAP_CAP,
            budget: DEFAULT_CHAIN_BUDGET,
            json: false,
            threads: None,
            inject_fault: false,
        }
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.budget == 0 {
            return Err("--budget must be positive".into());
        }
        if self.threads == Some(0) {
            return Err("--threads must be positive".into());
        }
        if self.command == Command::Homology && self.flavor == Flavor::Minus && self.m_floor.is_none() {
            return Err("--flavor minus needs --floor".into());
        }
        if self.command == Command::Homology && self.flavor == Flavor::Tilde && self.m_floor.is_some() {
            return Err("--floor only applies to --flavor minus".into());
        }
        if self.grid == "corpus" && self.command != Command::Verify {
            return Err("the whole corpus can only be verified".into());
        }
        Ok(())
    }
}

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: message.into(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonSquare { .. }
        | Error::BadCharacter { .. }
        | Error::NotPermutation { .. }
        | Error::SharedCell { .. }
        | Error::MultiComponent { .. }
        | Error::IndexTooSmall { .. } => EXIT_INPUT,
        Error::CapExceeded { .. } => EXIT_RESOURCE,
        _ => EXIT_INVARIANT,
    }
}

/// SHA-256 of the diagram's canonical text.
pub fn grid_hash(grid: &GridDiagram) -> String {
    hex::encode(Sha256::digest(grid.to_text().as_bytes()))
}

/// Reads a grid file, or falls back to the corpus by name.
pub fn load_grid(source: &str) -> std::result::Result<GridDiagram, (i32, String)> {
    let path = Path::new(source);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|e| (EXIT_INPUT, format!("{source}: {e}")))?
    } else if let Some(t) = corpus::corpus_text(source) {
        t.to_string()
    } else {
        return Err((
            EXIT_INPUT,
            format!("{source}: no such file or corpus grid"),
        ));
    };
    parse_grid(&text).map_err(|e| (exit_code(&e), format!("{source}: {e}")))
}

fn placements(grid: &GridDiagram, line: LinePlacement) -> Result<Vec<CutLine>> {
    let n = grid.n();
    Ok(match line {
        LinePlacement::Default => vec![CutLine::default_for(n)],
        LinePlacement::Column(c) => vec![CutLine::new(n, c)?],
        LinePlacement::All => (0..n).map(|c| CutLine::new(n, c).expect("c < n")).collect(),
    })
}

/// Bare generators. Every interval is isomorphic to one whose top has all
/// exponents zero, so sweeps only start there.
pub fn generator_tops(grid: &GridDiagram) -> Result<Vec<GridState>> {
    Ok(enumerate_generators(grid, DEFAULT_GENERATOR_CAP)?
        .into_iter()
        .map(GridState::bare)
        .collect())
}

/// Every closed interval `[z, x]` with `x` a bare generator and
/// `2 <= length <= max_length`, grouped by top in generator order.
pub fn intervals_by_top<S: CoverSource + ?Sized>(
    source: &S,
    tops: &[GridState],
    max_length: usize,
) -> Vec<Vec<Interval>> {
    if max_length < 2 {
        return vec![Vec::new(); tops.len()];
    }
    tops.par_iter()
        .map(|x| {
            let ds = DownSet::build(source, x, max_length - 1, None);
            (1..ds.len()).map(|b| ds.interval_to(b)).collect()
        })
        .collect()
}

// ---------------------------------------------------------------- homology

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub version: Flavor,
    pub grid: String,
    pub dims: BigradedDims,
    pub valid_above: Option<i64>,
}

/// Alexander gradings that contain a state of Maslov grading `>= m_floor`.
pub fn minus_sectors(grid: &GridDiagram, m_floor: i64) -> Result<Vec<i64>> {
    let mut out = BTreeSet::new();
    for g in enumerate_generators(grid, DEFAULT_GENERATOR_CAP)? {
        let gr = generator_bigrading(grid, &g);
        let mut k = 0;
        while gr.maslov - 2 * k >= m_floor {
            out.insert(gr.alexander - k);
            k += 1;
        }
    }
    Ok(out.into_iter().collect())
}

pub fn homology_report(grid: &GridDiagram, cfg: &RunConfig) -> Result<HomologyReport> {
    let (dims, valid_above) = match cfg.flavor {
        Flavor::Tilde => {
            let mut dims = BigradedDims::default();
            for c in tilde_complexes(grid, DEFAULT_GENERATOR_CAP)? {
                if cfg.sector.is_none_or(|a| a == c.alexander) {
                    dims.extend(homology(&c)?);
                }
            }
            (dims, None)
        }
        Flavor::Minus => {
            let floor = cfg.m_floor.expect("validated");
            let sectors = match cfg.sector {
                Some(a) => vec![a],
                None => minus_sectors(grid, floor)?,
            };
            let parts: Vec<BigradedDims> = sectors
                .par_iter()
                .map(|&a| minus_homology_truncated(grid, a, floor).map(|(d, _)| d))
                .collect::<Result<_>>()?;
            let mut dims = BigradedDims::default();
            for d in parts {
                dims.extend(d);
            }
            (dims, Some(floor + 1))
        }
    };
    Ok(HomologyReport {
        version: cfg.flavor,
        grid: grid_hash(grid),
        dims,
        valid_above,
    })
}

fn homology_text(r: &HomologyReport) -> String {
    let mut out = format!("flavor: {:?}\ngrid: {}\n", r.version, r.grid).to_lowercase();
    if let Some(v) = r.valid_above {
        out.push_str(&format!("valid for M >= {v}\n"));
    }
    out.push_str("M\tA\tdim\n");
    for (&(m, a), &d) in &r.dims.0 {
        out.push_str(&format!("{m}\t{a}\t{d}\n"));
    }
    out.push_str(&format!("total\t\t{}\n", r.dims.total()));
    out
}

// ---------------------------------------------------------------- shelling

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShellingReport {
    pub grid: String,
    pub interval_cap: usize,
    /// Doubled x-coordinates of the placements of `l` used.
    pub line_positions_x2: Vec<usize>,
    pub intervals: usize,
    pub intervals_by_length: BTreeMap<usize, usize>,
    pub chains: usize,
    pub el_checks: usize,
    pub el_weak_failures: usize,
    pub el_strict_failures: usize,
    /// Checks where the weak and strict verdicts differ.
    pub weak_strict_discrepancies: usize,
    pub lex_min_not_increasing: usize,
    pub increasing_not_lex_min: usize,
    pub repeated_labelings: usize,
    pub replay_failures: usize,
    pub bjorner_checks: usize,
    pub bjorner_failures: usize,
    pub descents: usize,
    pub hexagon_violations: usize,
    /// Length-3 intervals without exactly two maximal chains.
    pub thinness_failures: usize,
    pub first_failure: Option<String>,
}

impl ShellingReport {
    pub fn failures(&self) -> usize {
        self.el_weak_failures
            + self.replay_failures
            + self.bjorner_failures
            + self.hexagon_violations
            + self.thinness_failures
    }

    fn absorb(&mut self, o: ShellingReport) {
        self.intervals += o.intervals;
        for (k, v) in o.intervals_by_length {
            *self.intervals_by_length.entry(k).or_insert(0) += v;
        }
        self.chains += o.chains;
        self.el_checks += o.el_checks;
        self.el_weak_failures += o.el_weak_failures;
        self.el_strict_failures += o.el_strict_failures;
        self.weak_strict_discrepancies += o.weak_strict_discrepancies;
        self.lex_min_not_increasing += o.lex_min_not_increasing;
        self.increasing_not_lex_min += o.increasing_not_lex_min;
        self.repeated_labelings += o.repeated_labelings;
        self.replay_failures += o.replay_failures;
        self.bjorner_checks += o.bjorner_checks;
        self.bjorner_failures += o.bjorner_failures;
        self.descents += o.descents;
        self.hexagon_violations += o.hexagon_violations;
        self.thinness_failures += o.thinness_failures;
        if self.first_failure.is_none() {
            self.first_failure = o.first_failure;
        }
    }
}

fn shelling_one(
    grid: &GridDiagram,
    lines: &[CutLine],
    iv: &Interval,
    budget: usize,
) -> Result<ShellingReport> {
    let mut r = ShellingReport {
        intervals: 1,
        ..Default::default()
    };
    r.intervals_by_length.insert(iv.length(), 1);
    let chains = maximal_chains(iv, DEFAULT_INTERVAL_CAP.max(iv.length()), budget)?;
    r.chains = chains.len();
    let id = format!("[{}, {}]", iv.bottom(), iv.top());
    let fail = |r: &mut ShellingReport, what: &str| {
        if r.first_failure.is_none() {
            r.first_failure = Some(format!("{what} on {id}"));
        }
    };
    if iv.length() == 3 && chains.len() != 2 {
        r.thinness_failures += 1;
        fail(&mut r, &format!("{} maximal chains", chains.len()));
    }
    for &l in lines {
        let rep = verify_el_with_chains(grid, l, iv, &chains);
        r.el_checks += 1;
        if !rep.verdict_el_weak {
            r.el_weak_failures += 1;
            fail(&mut r, &format!("EL failure for l at x2={}", l.position_x2()));
        }
        if !rep.verdict_el_strict {
            r.el_strict_failures += 1;
        }
        if rep.verdict_el_weak != rep.verdict_el_strict
            || rep.weak_increasing != rep.strict_increasing
        {
            r.weak_strict_discrepancies += 1;
        }
        if !rep.lex_min_increasing {
            r.lex_min_not_increasing += 1;
        }
        if !rep.increasing_is_lex_min {
            r.increasing_not_lex_min += 1;
        }
        if !rep.labelings_distinct {
            r.repeated_labelings += 1;
        }
        r.descents += rep.descents;
        r.hexagon_violations += rep.hexagon_violations;
        if rep.hexagon_violations > 0 {
            fail(&mut r, "hexagon dichotomy violated");
        }
        for (c, labels) in chains.iter().zip(&rep.labelings) {
            if replay_labels(grid, l, iv, labels).as_ref() != Some(&c.elements) {
                r.replay_failures += 1;
                fail(&mut r, "labeling does not determine its chain");
            }
        }
        if chains.len() >= 2 {
            r.bjorner_checks += 1;
            let order: Vec<Vec<usize>> = shelling_order(&chains, &rep.labelings)
                .into_iter()
                .map(|k| chains[k].elements.clone())
                .collect();
            if !verify_bjorner(&order) {
                r.bjorner_failures += 1;
                fail(&mut r, "induced order is not a shelling");
            }
        }
    }
    Ok(r)
}

pub fn shelling_report(grid: &GridDiagram, cfg: &RunConfig) -> Result<ShellingReport> {
    let lines = placements(grid, cfg.line)?;
    let tops = generator_tops(grid)?;
    let per_top: Vec<ShellingReport> = tops
        .par_iter()
        .map(|x| -> Result<ShellingReport> {
            let mut acc = ShellingReport::default();
            for iv in &intervals_by_top(grid, std::slice::from_ref(x), cfg.interval_cap)[0] {
                acc.absorb(shelling_one(grid, &lines, iv, cfg.budget)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut report = ShellingReport {
        grid: grid_hash(grid),
        interval_cap: cfg.interval_cap,
        line_positions_x2: lines.iter().map(|l| l.position_x2()).collect(),
        ..Default::default()
    };
    for r in per_top {
        report.absorb(r);
    }
    Ok(report)
}

fn shelling_text(r: &ShellingReport) -> String {
    let mut out = format!(
        "grid: {}\ninterval cap: {}\nl positions (x2): {:?}\nintervals: {}\n",
        r.grid, r.interval_cap, r.line_positions_x2, r.intervals
    );
    for (len, c) in &r.intervals_by_length {
        out.push_str(&format!("  length {len}: {c}\n"));
    }
    out.push_str(&format!(
        "maximal chains: {}\nEL checks: {}\nEL failures (weak): {}\nEL failures (strict): {}\n\
         weak/strict discrepancies: {}\nlabeling replay failures: {}\nBjorner checks: {} failures: {}\n\
         descents: {} hexagon violations: {}\nlocal thinness failures: {}\n",
        r.chains,
        r.el_checks,
        r.el_weak_failures,
        r.el_strict_failures,
        r.weak_strict_discrepancies,
        r.replay_failures,
        r.bjorner_checks,
        r.bjorner_failures,
        r.descents,
        r.hexagon_violations,
        r.thinness_failures
    ));
    if let Some(f) = &r.first_failure {
        out.push_str(&format!("first failure: {f}\n"));
    }
    out
}

// ---------------------------------------------------------------- flowcat

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimSummary {
    pub spaces: usize,
    pub facets: usize,
    pub ball: usize,
    pub boundary_sphere: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowcatReport {
    pub grid: String,
    pub gap_cap: usize,
    pub morphism_spaces: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub by_dim: BTreeMap<i64, DimSummary>,
    pub seed_accepted: usize,
    pub search_nodes: usize,
    pub euler_failures: usize,
    pub boundary_failures: usize,
    /// Boundary facets differ from the ridges avoiding `{y, x}`.
    pub boundary_shape_failures: usize,
    pub subthin_failures: usize,
    pub composition_pairs: usize,
    pub composition_middles: usize,
    pub composition_failures: usize,
    pub first_failure: Option<String>,
}

impl FlowcatReport {
    pub fn failures(&self) -> usize {
        self.morphism_spaces - self.verdicts.get("Ball").copied().unwrap_or(0)
            + self.euler_failures
            + self.boundary_failures
            + self.boundary_shape_failures
            + self.subthin_failures
            + self.composition_failures
    }

    pub fn unknown(&self) -> usize {
        self.verdicts.get("Unknown").copied().unwrap_or(0)
    }

    fn absorb(&mut self, o: FlowcatReport) {
        self.morphism_spaces += o.morphism_spaces;
        for (k, v) in o.verdicts {
            *self.verdicts.entry(k).or_insert(0) += v;
        }
        for (k, v) in o.by_dim {
            let e = self.by_dim.entry(k).or_default();
            e.spaces += v.spaces;
            e.facets += v.facets;
            e.ball += v.ball;
            e.boundary_sphere += v.boundary_sphere;
        }
        self.seed_accepted += o.seed_accepted;
        self.search_nodes += o.search_nodes;
        self.euler_failures += o.euler_failures;
        self.boundary_failures += o.boundary_failures;
        self.boundary_shape_failures += o.boundary_shape_failures;
        self.subthin_failures += o.subthin_failures;
        self.composition_pairs += o.composition_pairs;
        self.composition_middles += o.composition_middles;
        self.composition_failures += o.composition_failures;
        if self.first_failure.is_none() {
            self.first_failure = o.first_failure;
        }
    }
}

fn flowcat_one(grid: &GridDiagram, iv: Interval, budget: usize) -> Result<FlowcatReport> {
    let mut r = FlowcatReport {
        morphism_spaces: 1,
        ..Default::default()
    };
    let id = format!("Mor({}, {})", iv.top(), iv.bottom());
    let mor = MorSpace::from_interval(iv)?;
    let seed = mor.el_seed(grid, CutLine::default_for(grid.n()))?;
    let cert = certify(&mor.complex, Some(&seed), budget);
    *r.verdicts.entry(format!("{:?}", cert.verdict)).or_insert(0) += 1;
    let fail = |r: &mut FlowcatReport, what: &str| {
        if r.first_failure.is_none() {
            r.first_failure = Some(format!("{what}: {id}"));
        }
    };
    if cert.verdict != Verdict::Ball {
        fail(&mut r, &format!("verdict {:?}", cert.verdict));
    }
    if cert.seed_accepted {
        r.seed_accepted += 1;
    }
    r.search_nodes += cert.search_nodes;
    if cert.euler != 1 || cert.dim != mor.dim || !cert.pure {
        r.euler_failures += 1;
        fail(&mut r, "wrong dimension or Euler characteristic");
    }
    let dim = r.by_dim.entry(mor.dim).or_default();
    dim.spaces += 1;
    dim.facets += mor.complex.facets().len();
    if cert.verdict == Verdict::Ball {
        dim.ball += 1;
    }
    if mor.dim >= 1 {
        let boundary = crate::complex::boundary_complex(&mor.complex)?;
        let bcert = certify(&boundary, None, budget);
        let sphere_euler = 1 + if (mor.dim - 1) % 2 == 0 { 1 } else { -1 };
        if bcert.verdict == Verdict::Sphere && bcert.euler == sphere_euler && bcert.dim == mor.dim - 1 {
            r.by_dim.get_mut(&mor.dim).expect("inserted").boundary_sphere += 1;
        } else {
            r.boundary_failures += 1;
            fail(&mut r, "boundary is not a sphere");
        }
    }
    if !boundary_avoids_endpoint_chain(&mor)? {
        r.boundary_shape_failures += 1;
        fail(&mut r, "boundary facets do not match chains avoiding the endpoints");
    }
    if mor.interval.length() >= 3 && classify_thin(&mor.chains.poset)? != Thinness::Subthin {
        r.subthin_failures += 1;
        fail(&mut r, "chain poset is not subthin");
    }
    if mor.interval.length() >= 3 {
        let s = check_compositions(&mor, None)?;
        r.composition_pairs += 1;
        r.composition_middles += s.middles;
        if !s.passed() {
            r.composition_failures += 1;
            fail(&mut r, "composition check failed");
        }
    }
    Ok(r)
}

pub fn flowcat_report(grid: &GridDiagram, cfg: &RunConfig) -> Result<FlowcatReport> {
    let tops = generator_tops(grid)?;
    let per_top: Vec<FlowcatReport> = tops
        .par_iter()
        .map(|x| -> Result<FlowcatReport> {
            let mut acc = FlowcatReport::default();
            let ivs = intervals_by_top(grid, std::slice::from_ref(x), cfg.gap_cap + 1);
            for iv in ivs.into_iter().flatten() {
                acc.absorb(flowcat_one(grid, iv, cfg.budget)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut report = FlowcatReport {
        grid: grid_hash(grid),
        gap_cap: cfg.gap_cap,
        ..Default::default()
    };
    for r in per_top {
        report.absorb(r);
    }
    Ok(report)
}

fn flowcat_text(r: &FlowcatReport) -> String {
    let mut out = format!(
        "grid: {}\ngap cap: {}\nmorphism spaces: {}\n",
        r.grid, r.gap_cap, r.morphism_spaces
    );
    out.push_str("dim\tspaces\tfacets\tball\tboundary sphere\n");
    for (d, s) in &r.by_dim {
        out.push_str(&format!(
            "{d}\t{}\t{}\t{}\t{}\n",
            s.spaces, s.facets, s.ball, s.boundary_sphere
        ));
    }
    for (v, c) in &r.verdicts {
        out.push_str(&format!("verdict {v}: {c}\n"));
    }
    out.push_str(&format!(
        "EL seed accepted: {}\nsearch nodes: {}\nEuler failures: {}\nboundary failures: {}\n\
         boundary shape failures: {}\nsubthin failures: {}\n\
         composition pairs: {} middles: {} failures: {}\n",
        r.seed_accepted,
        r.search_nodes,
        r.euler_failures,
        r.boundary_failures,
        r.boundary_shape_failures,
        r.subthin_failures,
        r.composition_pairs,
        r.composition_middles,
        r.composition_failures
    ));
    if let Some(f) = &r.first_failure {
        out.push_str(&format!("first failure: {f}\n"));
    }
    out
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridVerification {
    pub name: String,
    pub grid: String,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub grids: Vec<GridVerification>,
    /// Tilde rank divided by `2^(n-1)` for each corpus knot seen.
    pub invariance: Vec<CheckResult>,
    pub passed: bool,
}

/// Drops one cover of `victim`; stands in for a mis-enumerated cover.
pub struct FaultyCovers<'a> {
    pub grid: &'a GridDiagram,
    pub victim: GridState,
}

impl CoverSource for FaultyCovers<'_> {
    fn covers_down(&self, x: &GridState) -> Vec<CoverRelation> {
        let mut c = self.grid.covers_down(x);
        if *x == self.victim && !c.is_empty() {
            c.remove(0);
        }
        c
    }

    fn grading(&self, x: &GridState) -> Bigrading {
        self.grid.grading(x)
    }
}

fn check(name: &str) -> CheckResult {
    CheckResult {
        name: name.into(),
        cases: 0,
        passed: true,
        counterexample: None,
    }
}

impl CheckResult {
    fn fail(&mut self, what: String) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(what);
        }
    }
}

/// `d^2 = 0` on the tilde complex and on every truncated minus sector.
pub fn check_square_zero(grid: &GridDiagram, m_floor: i64) -> Result<CheckResult> {
    let mut c = check("square_zero");
    for t in tilde_complexes(grid, DEFAULT_GENERATOR_CAP)? {
        c.cases += 1;
        if let Some(m) = t.square_defect() {
            c.fail(format!("tilde complex, A={}, M={m}", t.alexander));
        }
    }
    let sectors = minus_sectors(grid, m_floor)?;
    let defects: Vec<Option<String>> = sectors
        .par_iter()
        .map(|&a| -> Result<Option<String>> {
            let cx = gt_chain_complex(grid, a, m_floor)?;
            Ok(cx
                .square_defect()
                .map(|m| format!("minus complex, A={a}, M={m}, floor {m_floor}")))
        })
        .collect::<Result<_>>()?;
    for d in defects {
        c.cases += 1;
        if let Some(d) = d {
            c.fail(d);
        }
    }
    Ok(c)
}

/// Every length-3 interval below a bare generator has two maximal chains.
pub fn check_local_thinness<S: CoverSource + ?Sized>(
    source: &S,
    tops: &[GridState],
) -> CheckResult {
    let mut c = check("local_thinness");
    for ivs in intervals_by_top(source, tops, 3) {
        for iv in ivs {
            if iv.length() != 3 {
                continue;
            }
            c.cases += 1;
            let chains = maximal_chains(&iv, 3, DEFAULT_CHAIN_BUDGET).map_or(0, |v| v.len());
            if chains != 2 {
                let members: Vec<String> = iv.elements.iter().map(ToString::to_string).collect();
                c.fail(format!(
                    "[{}, {}] has {chains} maximal chains; elements {}",
                    iv.bottom(),
                    iv.top(),
                    members.join(" ")
                ));
            }
        }
    }
    c
}

/// `leq` agrees with positivity of the solved domain, for every `stride`-th
/// bare top against every state of the same Alexander grading up to
/// `max_gap` lower; positive domains decompose into `mu` rectangles that sum
/// back to the domain.
pub fn check_comparability<S: CoverSource + ?Sized>(
    source: &S,
    grid: &GridDiagram,
    max_gap: i64,
    stride: usize,
) -> Result<(CheckResult, CheckResult)> {
    let gens = enumerate_generators(grid, DEFAULT_GENERATOR_CAP)?;
    let gradings: Vec<Bigrading> = gens.iter().map(|g| generator_bigrading(grid, g)).collect();
    let tops: Vec<(&Generator, Bigrading)> = gens
        .iter()
        .zip(gradings.iter().copied())
        .step_by(stride.max(1))
        .collect();
    let per_top: Vec<(CheckResult, CheckResult)> = tops
        .par_iter()
        .map(|&(g, gr)| -> Result<(CheckResult, CheckResult)> {
            let mut lq = check("leq_vs_domain");
            let mut dc = check("decomposition");
            let x = GridState::bare(g.clone());
            for d in 0..=max_gap {
                let target = Bigrading {
                    maslov: gr.maslov - d,
                    alexander: gr.alexander,
                };
                for y in states_in_grading(&gens, &gradings, target) {
                    lq.cases += 1;
                    let by_bfs = leq_in(source, &y, &x);
                    let dom = solve_domain(grid, &x, &y);
                    let by_domain = dom.as_ref().is_some_and(is_positive);
                    if by_bfs != by_domain {
                        lq.fail(format!("{y} <= {x}: search says {by_bfs}, domain says {by_domain}"));
                    }
                    if let Some(dom) = dom.filter(is_positive) {
                        dc.cases += 1;
                        if let Err(e) = decomposition_round_trip(grid, &dom) {
                            dc.fail(format!("domain from {x} to {y}: {e}"));
                        }
                    }
                }
            }
            Ok((lq, dc))
        })
        .collect::<Result<_>>()?;
    let mut lq = check("leq_vs_domain");
    let mut dc = check("decomposition");
    for (a, b) in per_top {
        lq.cases += a.cases;
        dc.cases += b.cases;
        if let Some(e) = a.counterexample {
            lq.fail(e);
        }
        if let Some(e) = b.counterexample {
            dc.fail(e);
        }
    }
    Ok((lq, dc))
}

/// `decompose(d)` has `mu(d)` rectangles which compose back to `d`.
pub fn decomposition_round_trip(grid: &GridDiagram, d: &Domain) -> std::result::Result<(), String> {
    let rects = decompose(grid, d).map_err(|e| e.to_string())?;
    let mu = maslov_index(grid, d);
    if rects.len() as i64 != mu {
        return Err(format!("{} rectangles but index {mu}", rects.len()));
    }
    let mut sum = Domain::zero(d.from.clone());
    for (rect, _) in &rects {
        sum = sum.then(&Domain::from_rectangle(rect, &sum.to));
    }
    if sum != *d {
        return Err("rectangles do not sum to the domain".into());
    }
    Ok(())
}

/// Maslov and Alexander gradings of every generator survive every recut.
pub fn check_recut_invariance(grid: &GridDiagram) -> Result<CheckResult> {
    let mut c = check("recut_invariance");
    let n = grid.n() as i64;
    let gens = enumerate_generators(grid, DEFAULT_GENERATOR_CAP)?;
    let shifted: Vec<(i64, i64, GridDiagram)> = (0..n)
        .flat_map(|r| (0..n).map(move |s| (r, s)))
        .map(|(r, s)| (r, s, recut(grid, r, s)))
        .collect();
    let bad: Vec<Option<String>> = gens
        .par_iter()
        .map(|g| {
            let base = generator_bigrading(grid, g);
            shifted.iter().find_map(|(r, s, h)| {
                let moved = generator_bigrading(h, &g.recut(*r, *s));
                (moved != base).then(|| {
                    format!("{g} under recut ({r}, {s}): {base:?} became {moved:?}")
                })
            })
        })
        .collect();
    for b in bad {
        c.cases += 1;
        if let Some(b) = b {
            c.fail(b);
        }
    }
    Ok(c)
}

/// The tilde rank divided by `2^(n-1)`, or an error if it does not divide.
pub fn hat_rank(grid: &GridDiagram) -> Result<std::result::Result<usize, usize>> {
    let mut dims = BigradedDims::default();
    for c in tilde_complexes(grid, DEFAULT_GENERATOR_CAP)? {
        dims.extend(homology(&c)?);
    }
    let total = dims.total();
    let unit = 1usize << (grid.n() - 1);
    Ok(if total % unit == 0 { Ok(total / unit) } else { Err(total) })
}

/// Four below the top Maslov grading: deep enough for two U-powers.
fn default_floor(grid: &GridDiagram) -> Result<i64> {
    let max = enumerate_generators(grid, DEFAULT_GENERATOR_CAP)?
        .iter()
        .map(|g| generator_bigrading(grid, g).maslov)
        .max()
        .unwrap_or(0);
    Ok(max - 4)
}

/// The knot a corpus name refers to (`trefoil-5a` -> `trefoil`).
fn knot_of(name: &str) -> &str {
    name.split('-').next().unwrap_or(name)
}

pub fn verify_grid(name: &str, grid: &GridDiagram, cfg: &RunConfig) -> Result<GridVerification> {
    let tops = generator_tops(grid)?;
    let floor = match cfg.m_floor {
        Some(f) => f,
        None => default_floor(grid)?,
    };
    let mut checks = vec![check_square_zero(grid, floor)?];
    // exhaustive up to n = 5, about 120 sampled tops beyond
    let (comparability_gap, stride) = if grid.n() <= 5 {
        (2, 1)
    } else {
        (1, tops.len().div_ceil(120))
    };
    if cfg.inject_fault {
        // drop the first cover of the first generator whose first cover
        // continues downward, so some length-3 interval loses a chain
        let victim = tops
            .iter()
            .find(|x| {
                grid.covers_down(x)
                    .first()
                    .is_some_and(|c| !grid.covers_down(&c.lower).is_empty())
            })
            .cloned()
            .unwrap_or_else(|| tops[0].clone());
        let faulty = FaultyCovers { grid, victim };
        checks.push(check_local_thinness(&faulty, &tops));
        let (lq, dc) = check_comparability(&faulty, grid, comparability_gap, stride)?;
        checks.extend([lq, dc]);
    } else {
        checks.push(check_local_thinness(grid, &tops));
        let (lq, dc) = check_comparability(grid, grid, comparability_gap, stride)?;
        checks.extend([lq, dc]);
    }
    checks.push(check_recut_invariance(grid)?);
    let mut divisible = check("tilde_rank_divisible");
    divisible.cases = 1;
    if let Err(total) = hat_rank(grid)? {
        divisible.fail(format!("total {total} not divisible by 2^{}", grid.n() - 1));
    }
    checks.push(divisible);
    Ok(GridVerification {
        name: name.into(),
        grid: grid_hash(grid),
        checks,
    })
}

pub fn verify_report(cfg: &RunConfig) -> std::result::Result<VerifyReport, (i32, String)> {
    let targets: Vec<(String, GridDiagram)> = if cfg.grid == "corpus" {
        corpus::CORPUS
            .iter()
            .map(|(n, t)| (n.to_string(), parse_grid(t).expect("corpus grids parse")))
            .collect()
    } else {
        vec![(cfg.grid.clone(), load_grid(&cfg.grid)?)]
    };
    let to_exit = |e: Error| (exit_code(&e), e.to_string());
    let mut grids = Vec::new();
    for (name, g) in &targets {
        grids.push(verify_grid(name, g, cfg).map_err(to_exit)?);
    }

    // presentations of one knot must agree
    let mut knots: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (name, _) in &targets {
        if corpus::corpus_text(name).is_some() {
            knots.entry(knot_of(name)).or_default();
        }
    }
    let mut invariance = Vec::new();
    for (knot, _) in knots {
        let mut c = check(&format!("rank_invariance_{knot}"));
        let mut ranks = BTreeMap::new();
        for (name, text) in corpus::CORPUS.iter().filter(|(n, _)| knot_of(n) == knot) {
            let g = parse_grid(text).expect("corpus grids parse");
            c.cases += 1;
            ranks.insert(*name, hat_rank(&g).map_err(to_exit)?);
        }
        let distinct: BTreeSet<_> = ranks.values().collect();
        if distinct.len() > 1 {
            c.fail(format!("{ranks:?}"));
        }
        invariance.push(c);
    }
    let passed = grids.iter().all(|g| g.checks.iter().all(|c| c.passed))
        && invariance.iter().all(|c| c.passed);
    Ok(VerifyReport {
        grids,
        invariance,
        passed,
    })
}

fn verify_text(r: &VerifyReport) -> String {
    let mut out = String::new();
    let line = |out: &mut String, c: &CheckResult| {
        out.push_str(&format!(
            "  {:<22} {:>8} cases  {}\n",
            c.name,
            c.cases,
            if c.passed { "ok" } else { "FAILED" }
        ));
        if let Some(e) = &c.counterexample {
            out.push_str(&format!("    counterexample: {e}\n"));
        }
    };
    for g in &r.grids {
        out.push_str(&format!("{} ({})\n", g.name, g.grid));
        for c in &g.checks {
            line(&mut out, c);
        }
    }
    if !r.invariance.is_empty() {
        out.push_str("invariance across presentations\n");
        for c in &r.invariance {
            line(&mut out, c);
        }
    }
    out.push_str(if r.passed { "all checks passed\n" } else { "some checks FAILED\n" });
    out
}

// ---------------------------------------------------------------- dispatch

fn render<T: Serialize>(value: &T, json: bool, text: impl FnOnce(&T) -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
        s.push('\n');
        s
    } else {
        text(value)
    }
}

fn run_inner(cfg: &RunConfig) -> Outcome {
    if let Err(msg) = cfg.validate() {
        return Outcome::failure(EXIT_INPUT, msg);
    }
    if cfg.command == Command::Verify {
        return match verify_report(cfg) {
            Ok(r) => Outcome {
                code: if r.passed { EXIT_OK } else { EXIT_INVARIANT },
                stdout: render(&r, cfg.json, verify_text),
                stderr: String::new(),
            },
            Err((code, msg)) => Outcome::failure(code, msg),
        };
    }
    let grid = match load_grid(&cfg.grid) {
        Ok(g) => g,
        Err((code, msg)) => return Outcome::failure(code, msg),
    };
    if let LinePlacement::Column(c) = cfg.line {
        if c >= grid.n() {
            return Outcome::failure(
                EXIT_INPUT,
                format!("--line-pos must lie strictly between 0 and {}", grid.n()),
            );
        }
    }
    let result = match cfg.command {
        Command::Homology => homology_report(&grid, cfg)
            .map(|r| (EXIT_OK, render(&r, cfg.json, homology_text))),
        Command::Shelling => shelling_report(&grid, cfg).map(|r| {
            let code = if r.failures() > 0 { EXIT_INVARIANT } else { EXIT_OK };
            (code, render(&r, cfg.json, shelling_text))
        }),
        Command::Flowcat => flowcat_report(&grid, cfg).map(|r| {
            let code = if r.unknown() > 0 {
                EXIT_RESOURCE
            } else if r.failures() > 0 {
                EXIT_INVARIANT
            } else {
                EXIT_OK
            };
            (code, render(&r, cfg.json, flowcat_text))
        }),
        Command::Verify => unreachable!("handled above"),
    };
    match result {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome::failure(exit_code(&e), e.to_string()),
    }
}

/// Runs a command, on a dedicated pool when a thread count is given.
pub fn run(cfg: &RunConfig) -> Outcome {
    match cfg.threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run_inner(cfg)),
            Err(e) => Outcome::failure(EXIT_RESOURCE, e.to_string()),
        },
        _ => run_inner(cfg),
    }
}
