//! The poset of grid states and generic finite-poset machinery.
//!
//! The grid poset is infinite, so it is only ever explored locally: covers
//! of a state, bounded down-sets, closed intervals and truncated chain
//! complexes. `y <= x` holds when a positive domain in `D(x, y)` exists;
//! covers are the empty rectangles that miss every X.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::SimplicialComplex;
use crate::domains::{rectangles_from, Rectangle};
use crate::error::{Error, Result};
use crate::grid::GridDiagram;
use crate::homology::{ChainComplexF2, SparseMatF2};
use crate::states::{
    bigrading, enumerate_generators, exponent_vectors, generator_bigrading, Bigrading, Generator,
    GridState, DEFAULT_GENERATOR_CAP,
};

/// Default cap on interval length (number of elements in a maximal chain).
pub const DEFAULT_INTERVAL_CAP: usize = 7;
/// Default budget on the number of enumerated maximal chains.
pub const DEFAULT_CHAIN_BUDGET: usize = 1_000_000;

/// `lower` is covered by `upper` through `rect`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverRelation {
    pub upper: GridState,
    pub lower: GridState,
    pub rect: Rectangle,
}

/// Anything that can list the lower covers of a grid state.
///
/// [`GridDiagram`] is the real source; tests wrap it to inject faults.
pub trait CoverSource: Sync {
    fn covers_down(&self, x: &GridState) -> Vec<CoverRelation>;
    fn grading(&self, x: &GridState) -> Bigrading;
}

impl CoverSource for GridDiagram {
    fn covers_down(&self, x: &GridState) -> Vec<CoverRelation> {
        covers_down(self, x)
    }

    fn grading(&self, x: &GridState) -> Bigrading {
        bigrading(self, x)
    }
}

/// All states covered by `x`: empty rectangles out of `x.gen` that miss the
/// X markings, with the O multiplicities added to the exponents.
pub fn covers_down(grid: &GridDiagram, x: &GridState) -> Vec<CoverRelation> {
    rectangles_from(grid, &x.gen)
        .into_iter()
        .filter(|(rect, _)| rect.avoids_x(grid))
        .map(|(rect, to)| {
            let mut u = x.u_exp.clone();
            for (slot, k) in rect.marking_count(grid).o_counts.into_iter().enumerate() {
                u[slot] += k as u32;
            }
            CoverRelation {
                upper: x.clone(),
                lower: GridState::new(to, u),
                rect,
            }
        })
        .collect()
}

/// All states covering `z`, found by undoing a transposition of two columns
/// and keeping rectangles whose O multiplicities fit under `z`'s exponents.
pub fn covers_up(grid: &GridDiagram, z: &GridState) -> Vec<CoverRelation> {
    let n = grid.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = z.gen.swapped(i, j);
            for rect in [Rectangle::spanning(&w, i, j), Rectangle::spanning(&w, j, i)] {
                if !rect.is_empty_for(&w) || !rect.avoids_x(grid) {
                    continue;
                }
                let o = rect.marking_count(grid).o_counts;
                if o.iter().zip(&z.u_exp).any(|(&k, &have)| k as u32 > have) {
                    continue;
                }
                let u = z
                    .u_exp
                    .iter()
                    .zip(&o)
                    .map(|(&have, &k)| have - k as u32)
                    .collect();
                out.push(CoverRelation {
                    upper: GridState::new(w.clone(), u),
                    lower: z.clone(),
                    rect,
                });
            }
        }
    }
    out
}

/// The states reachable downward from `top` within `depth` cover steps,
/// layered by depth (= Maslov drop). With a `ceiling`, states whose
/// exponents exceed it are pruned; those can never lie above a state with
/// exponents `ceiling`.
#[derive(Debug, Clone)]
pub struct DownSet {
    pub nodes: Vec<GridState>,
    pub depth_of: Vec<usize>,
    pub layers: Vec<Vec<usize>>,
    pub children: Vec<Vec<(usize, Rectangle)>>,
    pub top_grading: Bigrading,
    index: HashMap<GridState, usize>,
}

impl DownSet {
    pub fn build<S: CoverSource + ?Sized>(
        source: &S,
        top: &GridState,
        depth: usize,
        ceiling: Option<&[u32]>,
    ) -> Self {
        let mut ds = DownSet {
            nodes: vec![top.clone()],
            depth_of: vec![0],
            layers: vec![vec![0]],
            children: vec![Vec::new()],
            top_grading: source.grading(top),
            index: HashMap::from([(top.clone(), 0)]),
        };
        for k in 0..depth {
            let mut next = Vec::new();
            for &v in &ds.layers[k].clone() {
                let state = ds.nodes[v].clone();
                for cover in source.covers_down(&state) {
                    if let Some(cap) = ceiling {
                        if cover.lower.u_exp.iter().zip(cap).any(|(a, b)| a > b) {
                            continue;
                        }
                    }
                    let w = match ds.index.get(&cover.lower) {
                        Some(&w) => w,
                        None => {
                            let w = ds.nodes.len();
                            ds.index.insert(cover.lower.clone(), w);
                            ds.nodes.push(cover.lower);
                            ds.depth_of.push(k + 1);
                            ds.children.push(Vec::new());
                            next.push(w);
                            w
                        }
                    };
                    ds.children[v].push((w, cover.rect));
                }
            }
            if next.is_empty() {
                break;
            }
            ds.layers.push(next);
        }
        ds
    }

    pub fn find(&self, s: &GridState) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The closed interval `[nodes[bottom], top]`.
    pub fn interval_to(&self, bottom: usize) -> Interval {
        let d = self.depth_of[bottom];
        let mut inside = vec![false; self.nodes.len()];
        inside[bottom] = true;
        for k in (0..d).rev() {
            for &v in &self.layers[k] {
                inside[v] = self.children[v].iter().any(|&(w, _)| inside[w]);
            }
        }
        let top_m = self.top_grading.maslov;
        let mut members: Vec<usize> = (0..self.nodes.len()).filter(|&v| inside[v]).collect();
        // ascending Maslov = descending depth, then state order
        members.sort_by(|&a, &b| {
            self.depth_of[b]
                .cmp(&self.depth_of[a])
                .then_with(|| self.nodes[a].cmp(&self.nodes[b]))
        });
        let local: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut covers = Vec::new();
        for &v in &members {
            for &(w, rect) in &self.children[v] {
                if let Some(&lw) = local.get(&w) {
                    covers.push(IntervalCover {
                        upper: local[&v],
                        lower: lw,
                        rect,
                    });
                }
            }
        }
        Interval::from_parts(
            members.iter().map(|&v| self.nodes[v].clone()).collect(),
            members
                .iter()
                .map(|&v| top_m - self.depth_of[v] as i64)
                .collect(),
            covers,
        )
    }
}

/// A cover inside an [`Interval`], by element index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntervalCover {
    pub upper: usize,
    pub lower: usize,
    pub rect: Rectangle,
}

/// A closed interval `[y, x]`, elements sorted by Maslov grading then state.
/// Element 0 is the bottom `y`, the last element the top `x`.
#[derive(Debug, Clone)]
pub struct Interval {
    pub elements: Vec<GridState>,
    pub maslov: Vec<i64>,
    pub covers: Vec<IntervalCover>,
    /// Cover indices whose lower end is the element.
    pub up: Vec<Vec<usize>>,
    /// Cover indices whose upper end is the element.
    pub down: Vec<Vec<usize>>,
}

impl Interval {
    fn from_parts(elements: Vec<GridState>, maslov: Vec<i64>, mut covers: Vec<IntervalCover>) -> Self {
        covers.sort_by_key(|c| (c.lower, c.upper));
        let mut up = vec![Vec::new(); elements.len()];
        let mut down = vec![Vec::new(); elements.len()];
        for (k, c) in covers.iter().enumerate() {
            up[c.lower].push(k);
            down[c.upper].push(k);
        }
        Self {
            elements,
            maslov,
            covers,
            up,
            down,
        }
    }

    pub fn bottom(&self) -> &GridState {
        &self.elements[0]
    }

    pub fn top(&self) -> &GridState {
        self.elements.last().expect("intervals are nonempty")
    }

    pub fn top_index(&self) -> usize {
        self.elements.len() - 1
    }

    /// Number of elements in a maximal chain: `M(x) - M(y) + 1`.
    pub fn length(&self) -> usize {
        (self.maslov[self.top_index()] - self.maslov[0] + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn cover_relation(&self, k: usize) -> CoverRelation {
        let c = self.covers[k];
        CoverRelation {
            upper: self.elements[c.upper].clone(),
            lower: self.elements[c.lower].clone(),
            rect: c.rect,
        }
    }

    /// `strictly_below[b]` lists every `a < b`, as a bitset over element indices.
    pub fn strict_order(&self) -> Vec<Vec<u64>> {
        let n = self.elements.len();
        let words = n.div_ceil(64);
        let mut below = vec![vec![0u64; words]; n];
        // elements are sorted by grading, so lower covers have smaller index
        for b in 0..n {
            let mut row = vec![0u64; words];
            for &k in &self.down[b] {
                let a = self.covers[k].lower;
                row[a / 64] |= 1 << (a % 64);
                for (w, src) in row.iter_mut().zip(&below[a]) {
                    *w |= *src;
                }
            }
            below[b] = row;
        }
        below
    }

    /// The subinterval `[lo, hi]`, with a map back to this interval's indices.
    pub fn sub_interval(&self, lo: usize, hi: usize) -> SubInterval {
        let below = self.strict_order();
        let le = |a: usize, b: usize| a == b || below[b][a / 64] >> (a % 64) & 1 == 1;
        let parent: Vec<usize> = (0..self.len()).filter(|&e| le(lo, e) && le(e, hi)).collect();
        let mut local = vec![usize::MAX; self.len()];
        for (i, &e) in parent.iter().enumerate() {
            local[e] = i;
        }
        let covers = self
            .covers
            .iter()
            .filter(|c| local[c.upper] != usize::MAX && local[c.lower] != usize::MAX)
            .map(|c| IntervalCover {
                upper: local[c.upper],
                lower: local[c.lower],
                rect: c.rect,
            })
            .collect();
        let interval = Interval::from_parts(
            parent.iter().map(|&e| self.elements[e].clone()).collect(),
            parent.iter().map(|&e| self.maslov[e]).collect(),
            covers,
        );
        SubInterval { interval, parent }
    }

    /// The element indices of a chain rendered as `{a<b<c}`.
    pub fn chain_label(&self, chain: &[usize]) -> String {
        let parts: Vec<String> = chain.iter().map(|&i| self.elements[i].to_string()).collect();
        format!("{{{}}}", parts.join("<"))
    }
}

#[derive(Debug, Clone)]
pub struct SubInterval {
    pub interval: Interval,
    /// `parent[i]` is the index in the enclosing interval of element `i`.
    pub parent: Vec<usize>,
}

/// A maximal chain of an interval, bottom to top, with the covers used.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chain {
    pub elements: Vec<usize>,
    pub covers: Vec<usize>,
}

/// `y <= x` in the grid poset, by a graded search downward from `x`.
pub fn leq(grid: &GridDiagram, y: &GridState, x: &GridState) -> bool {
    leq_in(grid, y, x)
}

pub fn leq_in<S: CoverSource + ?Sized>(source: &S, y: &GridState, x: &GridState) -> bool {
    let (gy, gx) = (source.grading(y), source.grading(x));
    if gy.alexander != gx.alexander || gy.maslov > gx.maslov || !y.dominates(x) {
        return false;
    }
    let depth = (gx.maslov - gy.maslov) as usize;
    let ds = DownSet::build(source, x, depth, Some(&y.u_exp));
    ds.find(y).is_some_and(|v| ds.depth_of[v] == depth)
}

/// The closed interval `[y, x]`.
pub fn interval(grid: &GridDiagram, y: &GridState, x: &GridState) -> Result<Interval> {
    interval_in(grid, y, x)
}

pub fn interval_in<S: CoverSource + ?Sized>(
    source: &S,
    y: &GridState,
    x: &GridState,
) -> Result<Interval> {
    let (gy, gx) = (source.grading(y), source.grading(x));
    if gy.alexander != gx.alexander || gy.maslov > gx.maslov || !y.dominates(x) {
        return Err(Error::EmptyInterval);
    }
    let depth = (gx.maslov - gy.maslov) as usize;
    let ds = DownSet::build(source, x, depth, Some(&y.u_exp));
    match ds.find(y) {
        Some(v) if ds.depth_of[v] == depth => Ok(ds.interval_to(v)),
        _ => Err(Error::EmptyInterval),
    }
}

/// All maximal chains of `interval`, bottom to top, in lexicographic order of
/// element indices.
pub fn maximal_chains(interval: &Interval, length_cap: usize, budget: usize) -> Result<Vec<Chain>> {
    let len = interval.length();
    if len > length_cap {
        return Err(Error::CapExceeded {
            what: "interval length",
            limit: length_cap,
            actual: len,
        });
    }
    let top = interval.top_index();
    let mut out = Vec::new();
    let mut elements = vec![0usize];
    let mut covers = Vec::new();
    fn walk(
        iv: &Interval,
        top: usize,
        budget: usize,
        elements: &mut Vec<usize>,
        covers: &mut Vec<usize>,
        out: &mut Vec<Chain>,
    ) -> Result<()> {
        let cur = *elements.last().expect("nonempty");
        if cur == top {
            if out.len() >= budget {
                return Err(Error::CapExceeded {
                    what: "maximal chain count",
                    limit: budget,
                    actual: budget + 1,
                });
            }
            out.push(Chain {
                elements: elements.clone(),
                covers: covers.clone(),
            });
            return Ok(());
        }
        for &k in &iv.up[cur] {
            elements.push(iv.covers[k].upper);
            covers.push(k);
            walk(iv, top, budget, elements, covers, out)?;
            elements.pop();
            covers.pop();
        }
        Ok(())
    }
    walk(interval, top, budget, &mut elements, &mut covers, &mut out)?;
    Ok(out)
}

/// A finite poset given by its cover digraph, with an optional grading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    down: Vec<Vec<usize>>,
    up: Vec<Vec<usize>>,
    grading: Option<Vec<i64>>,
}

impl FinitePoset {
    /// Builds a poset on `0..len` from `(upper, lower)` cover pairs.
    pub fn from_covers(
        len: usize,
        covers: impl IntoIterator<Item = (usize, usize)>,
        grading: Option<Vec<i64>>,
    ) -> Result<Self> {
        let mut down = vec![Vec::new(); len];
        let mut up = vec![Vec::new(); len];
        for (hi, lo) in covers {
            down[hi].push(lo);
            up[lo].push(hi);
        }
        for v in down.iter_mut().chain(up.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        let p = Self { down, up, grading };
        if p.topological_order().is_none() {
            return Err(Error::InternalContradiction("cover digraph has a cycle".into()));
        }
        if let Some(g) = &p.grading {
            let ok = g.len() == len
                && (0..len).all(|hi| p.down[hi].iter().all(|&lo| g[hi] == g[lo] + 1));
            if !ok {
                return Err(Error::NotGraded);
            }
        }
        Ok(p)
    }

    /// Builds a poset from a reflexive, transitive, antisymmetric relation.
    pub fn from_order(len: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let lt = |a: usize, b: usize| a != b && leq(a, b);
        let mut covers = Vec::new();
        for hi in 0..len {
            for lo in 0..len {
                if lt(lo, hi) && !(0..len).any(|z| lt(lo, z) && lt(z, hi)) {
                    covers.push((hi, lo));
                }
            }
        }
        Self::from_covers(len, covers, None)
    }

    /// A chain `0 < 1 < ... < len-1`.
    pub fn chain(len: usize) -> Self {
        Self::from_covers(
            len,
            (1..len).map(|i| (i, i - 1)),
            Some((0..len as i64).collect()),
        )
        .expect("a chain is acyclic and graded")
    }

    pub fn len(&self) -> usize {
        self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.down.is_empty()
    }

    pub fn lower_covers(&self, v: usize) -> &[usize] {
        &self.down[v]
    }

    pub fn upper_covers(&self, v: usize) -> &[usize] {
        &self.up[v]
    }

    pub fn grading(&self) -> Option<&[i64]> {
        self.grading.as_deref()
    }

    pub fn cover_count(&self) -> usize {
        self.down.iter().map(Vec::len).sum()
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.down[v].len()).collect();
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop() {
            order.push(v);
            for &w in &self.up[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// `leq[a][b]` iff `a <= b`.
    pub fn order_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.len();
        let order = self.topological_order().expect("acyclic");
        let mut below = vec![vec![false; n]; n];
        for &v in &order {
            below[v][v] = true;
            for &lo in &self.down[v] {
                let lower = below[lo].clone();
                for (dst, src) in below[v].iter_mut().zip(lower) {
                    *dst |= src;
                }
            }
        }
        // below[b][a] means a <= b
        (0..n).map(|a| (0..n).map(|b| below[b][a]).collect()).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.down[v].is_empty()).collect()
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.up[v].is_empty()).collect()
    }

    /// Maximal chains: saturated paths from a minimal to a maximal element.
    pub fn maximal_chains(&self, budget: usize) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn walk(p: &FinitePoset, budget: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) -> Result<()> {
            let cur = *path.last().expect("nonempty");
            if p.up[cur].is_empty() {
                if out.len() >= budget {
                    return Err(Error::CapExceeded {
                        what: "maximal chain count",
                        limit: budget,
                        actual: budget + 1,
                    });
                }
                out.push(path.clone());
                return Ok(());
            }
            for &w in &p.up[cur] {
                path.push(w);
                walk(p, budget, path, out)?;
                path.pop();
            }
            Ok(())
        }
        for m in self.minimal_elements() {
            path.push(m);
            walk(self, budget, &mut path, &mut out)?;
            path.pop();
        }
        Ok(out)
    }

    /// All maximal chains have the same number of elements; returns it.
    pub fn graded_length(&self, budget: usize) -> Result<usize> {
        let chains = self.maximal_chains(budget)?;
        let len = chains.first().map_or(0, Vec::len);
        if chains.iter().any(|c| c.len() != len) {
            return Err(Error::NotGraded);
        }
        Ok(len)
    }
}

/// `(p', q') <= (p, q)` iff `p' <= p` and `q' <= q`. Element `(p, q)` has
/// index `p * |Q| + q`.
pub fn product(p: &FinitePoset, q: &FinitePoset) -> FinitePoset {
    let nq = q.len();
    let mut covers = Vec::new();
    for a in 0..p.len() {
        for b in 0..nq {
            for &lo in &p.down[a] {
                covers.push((a * nq + b, lo * nq + b));
            }
            for &lo in &q.down[b] {
                covers.push((a * nq + b, a * nq + lo));
            }
        }
    }
    let grading = match (&p.grading, &q.grading) {
        (Some(gp), Some(gq)) => Some(
            (0..p.len())
                .flat_map(|a| (0..nq).map(move |b| gp[a] + gq[b]))
                .collect(),
        ),
        _ => None,
    };
    FinitePoset::from_covers(p.len() * nq, covers, grading).expect("products of posets are posets")
}

/// The simplicial complex whose simplices are the chains of `p`.
pub fn order_complex(p: &FinitePoset) -> Result<SimplicialComplex> {
    Ok(SimplicialComplex::new(
        p.len(),
        p.maximal_chains(DEFAULT_CHAIN_BUDGET)?,
    ))
}

/// The chains of an interval that contain both endpoints, ordered by
/// inclusion: the interval `[{y, x}, ∞)` of its barycentric subdivision.
#[derive(Debug, Clone)]
pub struct BarycentricPoset {
    pub poset: FinitePoset,
    /// Element indices of the underlying interval, ascending.
    pub chains: Vec<Vec<usize>>,
}

impl BarycentricPoset {
    pub fn find(&self, chain: &[usize]) -> Option<usize> {
        self.chains.iter().position(|c| c == chain)
    }

    pub fn labels(&self, interval: &Interval) -> Vec<String> {
        self.chains.iter().map(|c| interval.chain_label(c)).collect()
    }
}

pub fn barycentric_above(interval: &Interval) -> BarycentricPoset {
    let top = interval.top_index();
    let below = interval.strict_order();
    let lt = |a: usize, b: usize| below[b][a / 64] >> (a % 64) & 1 == 1;

    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut cur = vec![0usize];
    fn extend(
        top: usize,
        lt: &dyn Fn(usize, usize) -> bool,
        cur: &mut Vec<usize>,
        chains: &mut Vec<Vec<usize>>,
    ) {
        let mut c = cur.clone();
        if top != 0 {
            c.push(top);
        }
        chains.push(c);
        let last = *cur.last().expect("nonempty");
        for e in last + 1..top {
            if lt(last, e) && lt(e, top) {
                cur.push(e);
                extend(top, lt, cur, chains);
                cur.pop();
            }
        }
    }
    extend(top, &lt, &mut cur, &mut chains);

    let index: HashMap<&[usize], usize> =
        chains.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
    let mut covers = Vec::new();
    for (i, c) in chains.iter().enumerate() {
        if c.len() <= 2 {
            continue;
        }
        for skip in 1..c.len() - 1 {
            let mut smaller = c.clone();
            smaller.remove(skip);
            covers.push((i, index[smaller.as_slice()]));
        }
    }
    let grading = chains.iter().map(|c| c.len() as i64 - 2).collect();
    let poset = FinitePoset::from_covers(chains.len(), covers, Some(grading))
        .expect("inclusion of chains is graded by size");
    BarycentricPoset { poset, chains }
}

/// Grid states in Alexander grading `alexander` and Maslov grading at least
/// `m_min`, with the differential summing lower covers inside that band.
pub fn gt_chain_complex(
    grid: &GridDiagram,
    alexander: i64,
    m_min: i64,
) -> Result<ChainComplexF2<GridState>> {
    let gens = enumerate_generators(grid, DEFAULT_GENERATOR_CAP)?;
    let n = grid.n();
    let mut basis: BTreeMap<i64, Vec<GridState>> = BTreeMap::new();
    for g in gens {
        let gr = generator_bigrading(grid, &g);
        let s = gr.alexander - alexander;
        if s < 0 || gr.maslov - 2 * s < m_min {
            continue;
        }
        let m = gr.maslov - 2 * s;
        let bucket = basis.entry(m).or_default();
        for u in exponent_vectors(n, s as u32) {
            bucket.push(GridState::new(g.clone(), u));
        }
    }
    for states in basis.values_mut() {
        states.sort();
    }
    let position: HashMap<&GridState, usize> = basis
        .values()
        .flat_map(|v| v.iter().enumerate().map(|(i, s)| (s, i)))
        .collect();
    let mut differentials = BTreeMap::new();
    for (&m, states) in &basis {
        let Some(targets) = basis.get(&(m - 1)) else {
            continue;
        };
        let mut d = SparseMatF2::zeros(targets.len(), states.len());
        for (col, s) in states.iter().enumerate() {
            for cover in covers_down(grid, s) {
                let row = position.get(&cover.lower).copied().ok_or_else(|| {
                    Error::InternalContradiction(format!(
                        "cover {} -> {} leaves its grading",
                        cover.upper, cover.lower
                    ))
                })?;
                d.toggle(row, col);
            }
        }
        differentials.insert(m, d);
    }
    Ok(ChainComplexF2 {
        alexander,
        basis,
        differentials,
    })
}

/// Convenience: a bare generator state by rows.
pub fn state(rows: &[usize]) -> GridState {
    GridState::bare(Generator::from_rows(rows))
}
