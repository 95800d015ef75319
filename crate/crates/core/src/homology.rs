//! Linear algebra over the two-element field and bigraded homology of grid
//! complexes.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domains::rectangles_from;
use crate::error::{Error, Result};
use crate::grid::GridDiagram;
use crate::poset::gt_chain_complex;
use crate::states::{enumerate_generators, generator_bigrading, Generator};

/// A 0/1 matrix stored as sorted row indices per column.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMatF2 {
    pub nrows: usize,
    pub cols: Vec<Vec<u32>>,
}

impl SparseMatF2 {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            cols: vec![Vec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            cols: (0..n as u32).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let cols = (0..ncols)
            .map(|c| {
                (0..nrows)
                    .filter(|&r| rows[r][c] & 1 == 1)
                    .map(|r| r as u32)
                    .collect()
            })
            .collect();
        Self { nrows, cols }
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    /// Toggles entry `(row, col)`.
    pub fn toggle(&mut self, row: usize, col: usize) {
        let c = &mut self.cols[col];
        match c.binary_search(&(row as u32)) {
            Ok(i) => {
                c.remove(i);
            }
            Err(i) => c.insert(i, row as u32),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// `self * rhs` over F2.
    pub fn mul(&self, rhs: &SparseMatF2) -> SparseMatF2 {
        assert_eq!(self.ncols(), rhs.nrows);
        let cols = rhs
            .cols
            .iter()
            .map(|col| {
                let mut acc: Vec<u32> = Vec::new();
                for &k in col {
                    acc = xor_sorted(&acc, &self.cols[k as usize]);
                }
                acc
            })
            .collect();
        SparseMatF2 {
            nrows: self.nrows,
            cols,
        }
    }
}

fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Rank over F2 by column reduction on lowest nonzero entries.
pub fn rank_f2(mat: &SparseMatF2) -> usize {
    let mut pivots: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut rank = 0;
    for col in &mat.cols {
        let mut c = col.clone();
        while let Some(&low) = c.last() {
            match pivots.get(&low) {
                Some(p) => c = xor_sorted(&c, p),
                None => {
                    pivots.insert(low, c);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Dimensions indexed by `(maslov, alexander)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BigradedDims(pub BTreeMap<(i64, i64), usize>);

impl BigradedDims {
    pub fn get(&self, maslov: i64, alexander: i64) -> usize {
        self.0.get(&(maslov, alexander)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn extend(&mut self, other: BigradedDims) {
        for (k, v) in other.0 {
            *self.0.entry(k).or_insert(0) += v;
        }
        self.0.retain(|_, v| *v > 0);
    }
}

impl Serialize for BigradedDims {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for (&(m, a), &d) in &self.0 {
            seq.serialize_element(&(m, a, d))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for BigradedDims {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<(i64, i64, usize)> = Vec::deserialize(d)?;
        Ok(Self(rows.into_iter().map(|(m, a, v)| ((m, a), v)).collect()))
    }
}

/// A chain complex over F2 in a single Alexander grading; `differentials[m]`
/// maps `C_m` to `C_{m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainComplexF2<B = String> {
    pub alexander: i64,
    pub basis: BTreeMap<i64, Vec<B>>,
    pub differentials: BTreeMap<i64, SparseMatF2>,
}

impl<B> ChainComplexF2<B> {
    pub fn dim(&self, maslov: i64) -> usize {
        self.basis.get(&maslov).map_or(0, Vec::len)
    }

    /// First grading `m` with `d_{m-1} d_m != 0`.
    pub fn square_defect(&self) -> Option<i64> {
        self.differentials.iter().find_map(|(&m, dm)| {
            let lower = self.differentials.get(&(m - 1))?;
            (!lower.mul(dm).is_zero()).then_some(m)
        })
    }

    pub fn total_rank(&self) -> usize {
        self.basis.values().map(Vec::len).sum()
    }
}

/// `dim H_m = dim C_m - rank d_m - rank d_{m+1}`, per grading.
pub fn homology<B>(c: &ChainComplexF2<B>) -> Result<BigradedDims> {
    if let Some(maslov) = c.square_defect() {
        return Err(Error::NotAComplex { maslov });
    }
    let ranks: BTreeMap<i64, usize> = c
        .differentials
        .iter()
        .map(|(&m, d)| (m, rank_f2(d)))
        .collect();
    let mut dims = BTreeMap::new();
    for (&m, basis) in &c.basis {
        let h = basis.len()
            - ranks.get(&m).copied().unwrap_or(0)
            - ranks.get(&(m + 1)).copied().unwrap_or(0);
        if h > 0 {
            dims.insert((m, c.alexander), h);
        }
    }
    Ok(BigradedDims(dims))
}

/// The complex with every `U_i = 0`: all `n!` generators, differential
/// counting empty rectangles that miss every marking. One complex per
/// Alexander grading, in increasing order.
pub fn tilde_complexes(grid: &GridDiagram, cap: usize) -> Result<Vec<ChainComplexF2<Generator>>> {
    let gens = enumerate_generators(grid, cap)?;
    let gradings: Vec<_> = gens.par_iter().map(|g| generator_bigrading(grid, g)).collect();

    let mut sectors: BTreeMap<i64, BTreeMap<i64, Vec<usize>>> = BTreeMap::new();
    for (idx, gr) in gradings.iter().enumerate() {
        sectors
            .entry(gr.alexander)
            .or_default()
            .entry(gr.maslov)
            .or_default()
            .push(idx);
    }
    // position of each generator inside its (A, M) group
    let mut pos = vec![0usize; gens.len()];
    for groups in sectors.values() {
        for members in groups.values() {
            for (p, &idx) in members.iter().enumerate() {
                pos[idx] = p;
            }
        }
    }
    let index: HashMap<&Generator, usize> = gens.iter().enumerate().map(|(i, g)| (g, i)).collect();

    sectors
        .into_par_iter()
        .map(|(a, groups)| {
            let mut differentials = BTreeMap::new();
            for (&m, members) in &groups {
                let Some(targets) = groups.get(&(m - 1)) else {
                    continue;
                };
                let mut d = SparseMatF2::zeros(targets.len(), members.len());
                for (col, &idx) in members.iter().enumerate() {
                    for (rect, to) in rectangles_from(grid, &gens[idx]) {
                        if rect.avoids_x(grid) && rect.avoids_o(grid) {
                            let t = index[&to];
                            let gt = gradings[t];
                            if gt.alexander != a || gt.maslov != m - 1 {
                                return Err(Error::InternalContradiction(format!(
                                    "rectangle from {} to {} does not respect gradings",
                                    gens[idx], to
                                )));
                            }
                            d.toggle(pos[t], col);
                        }
                    }
                }
                differentials.insert(m, d);
            }
            let basis = groups
                .into_iter()
                .map(|(m, members)| (m, members.into_iter().map(|i| gens[i].clone()).collect()))
                .collect();
            Ok(ChainComplexF2 {
                alexander: a,
                basis,
                differentials,
            })
        })
        .collect()
}

/// Bigraded homology of the fully finite complex.
pub fn tilde_homology(grid: &GridDiagram, cap: usize) -> Result<BigradedDims> {
    let mut dims = BigradedDims::default();
    for c in tilde_complexes(grid, cap)? {
        dims.extend(homology(&c)?);
    }
    Ok(dims)
}

/// Homology of the minus complex in Alexander grading `alexander`, truncated
/// below Maslov grading `m_floor`. States under the floor span a subcomplex;
/// the quotient's homology agrees with the untruncated one at every Maslov
/// grading `>= valid_above = m_floor + 1`.
pub fn minus_homology_truncated(
    grid: &GridDiagram,
    alexander: i64,
    m_floor: i64,
) -> Result<(BigradedDims, i64)> {
    let c = gt_chain_complex(grid, alexander, m_floor)?;
    Ok((homology(&c)?, m_floor + 1))
}
