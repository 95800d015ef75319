//! Finite simplicial complexes given by their facets.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// A simplicial complex on vertices `0..num_vertices`, stored as its facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    num_vertices: usize,
    facets: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl SimplicialComplex {
    /// Builds the complex generated by `faces`; faces contained in other
    /// faces are dropped.
    pub fn new(num_vertices: usize, faces: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut all: Vec<Vec<usize>> = faces
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut facets: Vec<Vec<usize>> = Vec::with_capacity(all.len());
        for f in all {
            if !facets.iter().any(|g| is_subset(&f, g)) {
                facets.push(f);
            }
        }
        facets.sort();
        Self {
            num_vertices,
            facets,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.num_vertices);
        self.labels = Some(labels);
        self
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Largest facet size minus one; `-1` for the complex `{∅}` or no facets.
    pub fn dim(&self) -> i64 {
        self.facets.iter().map(|f| f.len() as i64).max().unwrap_or(0) - 1
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dim() + 1;
        self.facets.iter().all(|f| f.len() as i64 == d)
    }

    /// Every nonempty face.
    pub fn faces(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            let k = f.len();
            for mask in 1u64..(1u64 << k) {
                out.insert(
                    (0..k)
                        .filter(|&i| mask >> i & 1 == 1)
                        .map(|i| f[i])
                        .collect(),
                );
            }
        }
        out
    }

    /// `f[i]` is the number of `i`-dimensional faces.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0usize; (self.dim() + 1).max(0) as usize];
        for face in self.faces() {
            f[face.len() - 1] += 1;
        }
        f
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(i, &c)| if i % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// For a pure complex: how many facets contain each codimension-one
    /// face. A 0-dimensional complex has the empty face as its only ridge.
    pub fn ridge_degrees(&self) -> Result<BTreeMap<Vec<usize>, usize>> {
        if !self.is_pure() {
            return Err(Error::NotPure);
        }
        let mut deg = BTreeMap::new();
        for f in &self.facets {
            for skip in 0..f.len() {
                let ridge: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                *deg.entry(ridge).or_insert(0) += 1;
            }
        }
        Ok(deg)
    }

    /// Every ridge lies in at most two facets.
    pub fn is_pseudomanifold(&self) -> Result<bool> {
        Ok(self.ridge_degrees()?.values().all(|&d| d <= 2))
    }

    /// One facet per line, vertices by label (or index) separated by spaces.
    pub fn facet_list_text(&self) -> String {
        let mut out = String::new();
        for f in &self.facets {
            let names: Vec<String> = f
                .iter()
                .map(|&v| match &self.labels {
                    Some(l) => l[v].clone(),
                    None => v.to_string(),
                })
                .collect();
            out.push_str(&names.join(" "));
            out.push('\n');
        }
        out
    }
}

/// The subcomplex generated by ridges lying in exactly one facet.
pub fn boundary_complex(s: &SimplicialComplex) -> Result<SimplicialComplex> {
    let deg = s.ridge_degrees()?;
    let faces = deg
        .into_iter()
        .filter(|&(_, d)| d == 1)
        .map(|(r, _)| r);
    let mut b = SimplicialComplex::new(s.num_vertices, faces);
    b.labels = s.labels.clone();
    Ok(b)
}

pub(crate) fn is_subset(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let mut it = b.iter();
    'outer: for x in a {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}
