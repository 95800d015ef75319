//! Two-chains between generators, empty rectangles and the decomposition of
//! positive domains into rectangles.
//!
//! Cell `(c, r)` is the square `[c, c+1] x [r, r+1]` of the planar cut. A
//! domain `D` from `x` to `y` satisfies, at every lattice point `p`,
//!
//! ```text
//! NE(p) + SW(p) - NW(p) - SE(p) = [p in x] - [p in y]
//! ```
//!
//! where `NE(p)` is the multiplicity of the cell to the upper right of `p` and
//! so on. Under this convention a rectangle from `x` has its lower-left and
//! upper-right corners on `x` and the other two on `y`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDiagram;
use crate::states::{maslov, Generator, GridState};

/// A cyclic rectangle anchored at a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rectangle {
    pub col_start: usize,
    pub row_start: usize,
    pub width: usize,
    pub height: usize,
}

impl Rectangle {
    /// The rectangle with lower-left corner on column `i` and upper-right
    /// corner on column `j` of `gen`.
    pub fn spanning(gen: &Generator, i: usize, j: usize) -> Self {
        let n = gen.n();
        debug_assert_ne!(i, j);
        Self {
            col_start: i,
            row_start: gen.row(i),
            width: (j + n - i) % n,
            height: (gen.row(j) + n - gen.row(i)) % n,
        }
    }

    /// Column of the upper-right corner.
    pub fn col_end(&self, n: usize) -> usize {
        (self.col_start + self.width) % n
    }

    pub fn row_end(&self, n: usize) -> usize {
        (self.row_start + self.height) % n
    }

    #[inline]
    pub fn contains_cell(&self, n: usize, c: usize, r: usize) -> bool {
        (c + n - self.col_start) % n < self.width && (r + n - self.row_start) % n < self.height
    }

    /// Whether the cyclic column span covers column `c`.
    #[inline]
    pub fn covers_column(&self, n: usize, c: usize) -> bool {
        (c + n - self.col_start) % n < self.width
    }

    pub fn cells(&self, n: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.width).flat_map(move |dc| {
            (0..self.height).map(move |dr| ((self.col_start + dc) % n, (self.row_start + dr) % n))
        })
    }

    pub fn area(&self) -> usize {
        self.width * self.height
    }

    /// No point of `gen` lies strictly inside.
    pub fn is_empty_for(&self, gen: &Generator) -> bool {
        let n = gen.n();
        (1..self.width).all(|dc| {
            let c = (self.col_start + dc) % n;
            let dr = (gen.row(c) + n - self.row_start) % n;
            dr == 0 || dr >= self.height
        })
    }

    pub fn marking_count(&self, grid: &GridDiagram) -> MarkingCount {
        let n = grid.n();
        let mut counts = MarkingCount {
            o_counts: vec![0; n],
            x_counts: vec![0; n],
        };
        for c in 0..n {
            if !self.covers_column(n, c) {
                continue;
            }
            if self.contains_cell(n, c, grid.x_rows()[c]) {
                counts.x_counts[grid.numbering().x_index[c] - 1] += 1;
            }
            if self.contains_cell(n, c, grid.o_rows()[c]) {
                counts.o_counts[grid.o_slot(c)] += 1;
            }
        }
        counts
    }

    /// Whether the rectangle misses every X marking.
    pub fn avoids_x(&self, grid: &GridDiagram) -> bool {
        let n = grid.n();
        (0..n).all(|c| !self.contains_cell(n, c, grid.x_rows()[c]))
    }

    pub fn avoids_o(&self, grid: &GridDiagram) -> bool {
        let n = grid.n();
        (0..n).all(|c| !self.contains_cell(n, c, grid.o_rows()[c]))
    }
}

/// `n_{O_i}(D)` and `n_{X_i}(D)`, indexed by marking label minus one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MarkingCount {
    pub o_counts: Vec<i64>,
    pub x_counts: Vec<i64>,
}

/// An integer 2-chain connecting `from` to `to`; `mult[c * n + r]` is the
/// multiplicity of cell `(c, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    pub from: Generator,
    pub to: Generator,
    n: usize,
    mult: Vec<i64>,
}

impl Domain {
    pub fn zero(gen: Generator) -> Self {
        let n = gen.n();
        Self {
            from: gen.clone(),
            to: gen,
            n,
            mult: vec![0; n * n],
        }
    }

    pub fn from_rectangle(rect: &Rectangle, from: &Generator) -> Self {
        let n = from.n();
        let mut mult = vec![0; n * n];
        for (c, r) in rect.cells(n) {
            mult[c * n + r] += 1;
        }
        Self {
            from: from.clone(),
            to: from.swapped(rect.col_start, rect.col_end(n)),
            n,
            mult,
        }
    }

    /// Builds a domain from raw multiplicities (indexed `[c][r]`).
    pub fn from_multiplicities(from: Generator, to: Generator, mult: Vec<Vec<i64>>) -> Self {
        let n = from.n();
        let flat = mult.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(flat.len(), n * n);
        Self {
            from,
            to,
            n,
            mult: flat,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, c: usize, r: usize) -> i64 {
        let n = self.n;
        self.mult[(c % n) * n + (r % n)]
    }

    pub fn multiplicities(&self) -> &[i64] {
        &self.mult
    }

    pub fn is_zero(&self) -> bool {
        self.mult.iter().all(|&m| m == 0)
    }

    /// Concatenation `self` followed by `next` (requires `self.to == next.from`).
    pub fn then(&self, next: &Domain) -> Domain {
        assert_eq!(self.to, next.from);
        Domain {
            from: self.from.clone(),
            to: next.to.clone(),
            n: self.n,
            mult: self.mult.iter().zip(&next.mult).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self - rect`, re-anchored at the terminal generator of `rect`.
    fn subtract_leading(&self, rect: &Rectangle) -> Domain {
        let n = self.n;
        let mut mult = self.mult.clone();
        for (c, r) in rect.cells(n) {
            mult[c * n + r] -= 1;
        }
        Domain {
            from: self.from.swapped(rect.col_start, rect.col_end(n)),
            to: self.to.clone(),
            n,
            mult,
        }
    }

    pub fn contains_rectangle(&self, rect: &Rectangle) -> bool {
        rect.cells(self.n).all(|(c, r)| self.at(c, r) >= 1)
    }

    pub fn marking_count(&self, grid: &GridDiagram) -> MarkingCount {
        let n = self.n;
        let mut counts = MarkingCount {
            o_counts: vec![0; n],
            x_counts: vec![0; n],
        };
        for c in 0..n {
            counts.x_counts[grid.numbering().x_index[c] - 1] += self.at(c, grid.x_rows()[c]);
            counts.o_counts[grid.o_slot(c)] += self.at(c, grid.o_rows()[c]);
        }
        counts
    }

    /// `NE + SW - NW - SE` at lattice point `(a, b)`.
    pub fn corner_jump(&self, a: usize, b: usize) -> i64 {
        let n = self.n;
        let (am, bm) = ((a + n - 1) % n, (b + n - 1) % n);
        self.at(a, b) + self.at(am, bm) - self.at(am, b) - self.at(a, bm)
    }

    /// The boundary condition `corner_jump(p) = [p in from] - [p in to]` at
    /// every lattice point.
    pub fn boundary_matches(&self) -> bool {
        let n = self.n;
        (0..n).all(|a| {
            (0..n).all(|b| {
                let want = (self.from.row(a) == b) as i64 - (self.to.row(a) == b) as i64;
                self.corner_jump(a, b) == want
            })
        })
    }

    /// Number of vertical circles on which the boundary of the domain is
    /// nonzero.
    pub fn beta_support(&self) -> usize {
        let n = self.n;
        (0..n)
            .filter(|&c| {
                let left = (c + n - 1) % n;
                (0..n).any(|r| self.at(c, r) != self.at(left, r))
            })
            .count()
    }
}

/// Whether every multiplicity is non-negative.
pub fn is_positive(d: &Domain) -> bool {
    d.mult.iter().all(|&m| m >= 0)
}

/// `mu(D) = M(from) - M(to) + 2 * sum_i n_{O_i}(D)`.
pub fn maslov_index(grid: &GridDiagram, d: &Domain) -> i64 {
    let o: i64 = d.marking_count(grid).o_counts.iter().sum();
    maslov(grid, &d.from) - maslov(grid, &d.to) + 2 * o
}

/// All empty rectangles out of `x`, with their terminal generators, ordered
/// by (lower-left column, upper-right column).
pub fn rectangles_from(grid: &GridDiagram, x: &Generator) -> Vec<(Rectangle, Generator)> {
    let n = grid.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rect = Rectangle::spanning(x, i, j);
            if rect.is_empty_for(x) {
                out.push((rect, x.swapped(i, j)));
            }
        }
    }
    out
}

/// Some domain from `x` to `y`: a path of transposition rectangles.
fn base_domain(x: &Generator, y: &Generator) -> Domain {
    let n = x.n();
    let mut cur = Domain::zero(x.clone());
    for pos in 0..n {
        if cur.to.row(pos) == y.row(pos) {
            continue;
        }
        let j = (pos + 1..n)
            .find(|&j| cur.to.row(j) == y.row(pos))
            .expect("y is a permutation");
        let rect = Rectangle::spanning(&cur.to, pos, j);
        let step = Domain::from_rectangle(&rect, &cur.to);
        cur = cur.then(&step);
    }
    cur
}

/// The unique domain in `D(x, y)`, i.e. from `x.gen` to `y.gen` with no X
/// multiplicity and `n_{O_i} = l_i - k_i`, if one exists.
///
/// A base domain is corrected by row and column annuli. The correction
/// coefficients satisfy `a_row + b_col = value` on each marked cell; the
/// markings form a single cycle in the row/column incidence graph, so a
/// traversal fixes every coefficient and the closing edge decides
/// consistency.
pub fn solve_domain(grid: &GridDiagram, x: &GridState, y: &GridState) -> Option<Domain> {
    let n = grid.n();
    let base = base_domain(&x.gen, &y.gen);
    let target_o = |c: usize| -> i64 {
        let slot = grid.o_slot(c);
        y.u_exp[slot] as i64 - x.u_exp[slot] as i64
    };

    // node ids: rows 0..n, columns n..2n
    let mut edges: Vec<Vec<(usize, i64)>> = vec![Vec::new(); 2 * n];
    for c in 0..n {
        let xr = grid.x_rows()[c];
        let or = grid.o_rows()[c];
        let vx = -base.at(c, xr);
        let vo = target_o(c) - base.at(c, or);
        edges[xr].push((n + c, vx));
        edges[n + c].push((xr, vx));
        edges[or].push((n + c, vo));
        edges[n + c].push((or, vo));
    }
    let mut value: Vec<Option<i64>> = vec![None; 2 * n];
    value[0] = Some(0);
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let val = value[v].expect("visited");
        for &(w, sum) in &edges[v] {
            let want = sum - val;
            match value[w] {
                None => {
                    value[w] = Some(want);
                    stack.push(w);
                }
                Some(have) if have != want => return None,
                Some(_) => {}
            }
        }
    }
    let mut mult = base.mult.clone();
    for c in 0..n {
        let b = value[n + c].expect("knot incidence graph is connected");
        for r in 0..n {
            mult[c * n + r] += value[r].expect("connected") + b;
        }
    }
    Some(Domain {
        from: x.gen.clone(),
        to: y.gen.clone(),
        n,
        mult,
    })
}

/// Splits a positive domain into empty rectangles `D = D_1 + ... + D_k`
/// through generators `x = u_0, u_1, ..., u_k = y`.
///
/// At each step a coordinate of the current generator with a nonzero
/// adjacent square is chosen. Among rectangles contained in the domain that
/// have that coordinate as lower-left corner (or as upper-right corner, when
/// only the lower-left square is nonzero) and another coordinate as the
/// opposite corner, one of minimal area is removed. Minimality forces it to
/// be empty.
pub fn decompose(grid: &GridDiagram, d: &Domain) -> Result<Vec<(Rectangle, Generator)>> {
    if !is_positive(d) {
        return Err(Error::NotPositive);
    }
    let n = grid.n();
    let mut rest = d.clone();
    let mut parts = Vec::new();
    while !rest.is_zero() {
        let x = rest.from.clone();
        let anchor = (0..n).find_map(|i| {
            let (c, r) = (i, x.row(i));
            if rest.at(c, r) > 0 {
                Some((i, true))
            } else if rest.at(c + n - 1, r + n - 1) > 0 {
                Some((i, false))
            } else {
                None
            }
        });
        let Some((i, lower_left)) = anchor else {
            return Err(Error::InternalContradiction(format!(
                "nonzero domain from {x} with no occupied corner square"
            )));
        };
        let best = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                if lower_left {
                    Rectangle::spanning(&x, i, j)
                } else {
                    Rectangle::spanning(&x, j, i)
                }
            })
            .filter(|rect| rest.contains_rectangle(rect))
            .min_by_key(|rect| rect.area());
        let Some(rect) = best else {
            return Err(Error::InternalContradiction(format!(
                "no rectangle anchored at column {i} of {x} fits inside the domain"
            )));
        };
        if !rect.is_empty_for(&x) {
            return Err(Error::InternalContradiction(format!(
                "minimal rectangle {rect:?} from {x} is not empty"
            )));
        }
        rest = rest.subtract_leading(&rect);
        parts.push((rect, rest.from.clone()));
    }
    if rest.from != d.to {
        return Err(Error::InternalContradiction(format!(
            "decomposition ended at {} instead of {}",
            rest.from, d.to
        )));
    }
    Ok(parts)
}
