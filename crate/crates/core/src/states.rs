//! Generators, grid states and their Maslov/Alexander gradings.
//!
//! Generator points sit at lattice points `(j, sigma(j))`, markings at cell
//! centers `(c + 1/2, r + 1/2)`. All coordinates are stored doubled so every
//! quantity stays an exact integer.

use std::fmt;

use itertools::Itertools;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDiagram;

/// Default upper bound on `n` for full generator enumeration.
pub const DEFAULT_GENERATOR_CAP: usize = 8;

/// A generator: `sigma[j]` is the row of the point on the `j`-th vertical circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator(pub Vec<u8>);

impl Generator {
    pub fn identity(n: usize) -> Self {
        Self((0..n as u8).collect())
    }

    pub fn from_rows(rows: &[usize]) -> Self {
        Self(rows.iter().map(|&r| r as u8).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn row(&self, column: usize) -> usize {
        self.0[column] as usize
    }

    /// The generator with the rows of columns `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut s = self.0.clone();
        s.swap(i, j);
        Self(s)
    }

    /// The same generator seen through `recut(_, row_shift, col_shift)`.
    pub fn recut(&self, row_shift: i64, col_shift: i64) -> Self {
        let n = self.n() as i64;
        let rs = row_shift.rem_euclid(n) as usize;
        let cs = col_shift.rem_euclid(n) as usize;
        let n = self.n();
        let mut out = vec![0u8; n];
        for j in 0..n {
            out[(j + cs) % n] = ((self.row(j) + rs) % n) as u8;
        }
        Self(out)
    }

    /// Doubled planar coordinates of the points.
    fn doubled_points(&self) -> Vec<(i64, i64)> {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &r)| (2 * j as i64, 2 * r as i64))
            .collect()
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 10 {
            for &r in &self.0 {
                write!(f, "{r}")?;
            }
            Ok(())
        } else {
            write!(f, "{}", self.0.iter().join(","))
        }
    }
}

/// A generator times a monomial `U_1^{k_1} ... U_n^{k_n}`, indexed by O-label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridState {
    pub gen: Generator,
    pub u_exp: Vec<u32>,
}

impl GridState {
    pub fn new(gen: Generator, u_exp: Vec<u32>) -> Self {
        debug_assert_eq!(gen.n(), u_exp.len());
        Self { gen, u_exp }
    }

    /// The generator with all exponents zero.
    pub fn bare(gen: Generator) -> Self {
        let n = gen.n();
        Self {
            gen,
            u_exp: vec![0; n],
        }
    }

    pub fn total_u(&self) -> i64 {
        self.u_exp.iter().map(|&k| k as i64).sum()
    }

    /// Multiply by `U_{slot+1}`.
    pub fn times_u(&self, slot: usize) -> Self {
        let mut u = self.u_exp.clone();
        u[slot] += 1;
        Self::new(self.gen.clone(), u)
    }

    /// `u_exp >= other.u_exp` componentwise.
    pub fn dominates(&self, other: &GridState) -> bool {
        self.u_exp
            .iter()
            .zip(&other.u_exp)
            .all(|(a, b)| a >= b)
    }
}

impl fmt::Display for GridState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.gen)?;
        if self.u_exp.iter().any(|&k| k > 0) {
            write!(f, "U({})", self.u_exp.iter().join(","))?;
        }
        Ok(())
    }
}

/// Maslov and Alexander gradings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bigrading {
    pub maslov: i64,
    pub alexander: i64,
}

/// All `n!` generators in lexicographic order.
pub fn enumerate_generators(grid: &GridDiagram, cap: usize) -> Result<Vec<Generator>> {
    let n = grid.n();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "grid index",
            limit: cap,
            actual: n,
        });
    }
    Ok((0..n as u8)
        .permutations(n)
        .map(Generator)
        .collect())
}

/// A planar point with coordinates in `Z/2`, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HalfPoint {
    pub x2: i64,
    pub y2: i64,
}

impl HalfPoint {
    pub fn lattice(x: i64, y: i64) -> Self {
        Self { x2: 2 * x, y2: 2 * y }
    }

    pub fn center(x: i64, y: i64) -> Self {
        Self {
            x2: 2 * x + 1,
            y2: 2 * y + 1,
        }
    }
}

/// A formal sum of planar points with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormalSum {
    pub terms: Vec<(HalfPoint, Rational64)>,
}

impl FormalSum {
    pub fn from_points(points: impl IntoIterator<Item = HalfPoint>) -> Self {
        Self {
            terms: points
                .into_iter()
                .map(|p| (p, Rational64::from_integer(1)))
                .collect(),
        }
    }

    pub fn scaled(&self, k: Rational64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(p, c)| (p, c * k)).collect(),
        }
    }

    pub fn plus(&self, other: &FormalSum) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    pub fn minus(&self, other: &FormalSum) -> Self {
        self.plus(&other.scaled(Rational64::from_integer(-1)))
    }
}

/// `j(p, q) = 1/2` when `(p1 - q1)(p2 - q2) > 0`, else 0; extended bilinearly.
pub fn j_pairing(a: &FormalSum, b: &FormalSum) -> Rational64 {
    let half = Rational64::new(1, 2);
    let mut total = Rational64::from_integer(0);
    for &(p, cp) in &a.terms {
        for &(q, cq) in &b.terms {
            if (p.x2 - q.x2) * (p.y2 - q.y2) > 0 {
                total += cp * cq * half;
            }
        }
    }
    total
}

/// Ordered pairs `(p, q)` with `(p1 - q1)(p2 - q2) > 0`.
fn positive_pairs(a: &[(i64, i64)], b: &[(i64, i64)]) -> i64 {
    let mut count = 0;
    for &(px, py) in a {
        for &(qx, qy) in b {
            if (px - qx) * (py - qy) > 0 {
                count += 1;
            }
        }
    }
    count
}

pub(crate) fn marking_points(rows: &[usize]) -> Vec<(i64, i64)> {
    rows.iter()
        .enumerate()
        .map(|(c, &r)| (2 * c as i64 + 1, 2 * r as i64 + 1))
        .collect()
}

/// `M(x) = J(x - O, x - O) + 1`.
pub fn maslov(grid: &GridDiagram, x: &Generator) -> i64 {
    let pts = x.doubled_points();
    let os = marking_points(grid.o_rows());
    // Each J is half the count of positive ordered pairs.
    let twice = positive_pairs(&pts, &pts) - 2 * positive_pairs(&pts, &os)
        + positive_pairs(&os, &os);
    debug_assert_eq!(twice % 2, 0);
    twice / 2 + 1
}

/// `A(x) = J(x - (X + O)/2, X - O) - (n - 1)/2`.
pub fn alexander(grid: &GridDiagram, x: &Generator) -> i64 {
    let pts = x.doubled_points();
    let os = marking_points(grid.o_rows());
    let xs = marking_points(grid.x_rows());
    let n = grid.n() as i64;
    // 4A = 2 I(x,X) - 2 I(x,O) - I(X,X) + I(O,O) - 2(n - 1); the X/O cross
    // terms cancel by symmetry.
    let four = 2 * positive_pairs(&pts, &xs) - 2 * positive_pairs(&pts, &os)
        - positive_pairs(&xs, &xs)
        + positive_pairs(&os, &os)
        - 2 * (n - 1);
    debug_assert_eq!(four % 4, 0, "Alexander grading must be an integer");
    four / 4
}

pub fn generator_bigrading(grid: &GridDiagram, x: &Generator) -> Bigrading {
    Bigrading {
        maslov: maslov(grid, x),
        alexander: alexander(grid, x),
    }
}

/// Each `U_i` carries bigrading `(-2, -1)`.
pub fn bigrading(grid: &GridDiagram, x: &GridState) -> Bigrading {
    let g = generator_bigrading(grid, &x.gen);
    let k = x.total_u();
    Bigrading {
        maslov: g.maslov - 2 * k,
        alexander: g.alexander - k,
    }
}

/// All exponent vectors of length `n` with entries summing to `total`, in
/// lexicographic order.
pub fn exponent_vectors(n: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(n, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, total, &mut Vec::with_capacity(n), &mut out);
    out
}

/// Every grid state with bigrading `target`, given the generators and their
/// bigradings. Sorted by generator, then exponents.
pub fn states_in_grading(gens: &[Generator], gradings: &[Bigrading], target: Bigrading) -> Vec<GridState> {
    let mut out = Vec::new();
    for (g, gr) in gens.iter().zip(gradings) {
        let k = gr.alexander - target.alexander;
        if k < 0 || gr.maslov - 2 * k != target.maslov {
            continue;
        }
        for u in exponent_vectors(g.n(), k as u32) {
            out.push(GridState::new(g.clone(), u));
        }
    }
    out.sort();
    out
}
