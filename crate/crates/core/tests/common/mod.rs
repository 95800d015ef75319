#![allow(dead_code)]

use gridshell::corpus::CORPUS;
use gridshell::domains::{rectangles_from, Domain};
use gridshell::states::{j_pairing, FormalSum, Generator, HalfPoint};
use num_rational::Rational64;
use gridshell::{parse_grid, GridDiagram};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_up_to(max_n: usize) -> Vec<(&'static str, GridDiagram)> {
    CORPUS
        .iter()
        .map(|(name, text)| (*name, parse_grid(text).unwrap()))
        .filter(|(_, g)| g.n() <= max_n)
        .collect()
}

/// A uniformly random knot grid of size `n`, by rejection.
pub fn random_knot_grid<R: Rng>(rng: &mut R, n: usize) -> GridDiagram {
    loop {
        let mut x: Vec<usize> = (0..n).collect();
        let mut o: Vec<usize> = (0..n).collect();
        x.shuffle(rng);
        o.shuffle(rng);
        if let Ok(g) = GridDiagram::new(x, o) {
            return g;
        }
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Every knot grid of size `n`.
pub fn all_knot_grids(n: usize) -> Vec<GridDiagram> {
    let perms = permutations(n);
    let mut out = Vec::new();
    for x in &perms {
        for o in &perms {
            if let Ok(g) = GridDiagram::new(x.clone(), o.clone()) {
                out.push(g);
            }
        }
    }
    out
}

/// `4 * (n_x(D) + n_y(D))`: quadrant sums at every corner point.
pub fn four_point_measure(d: &Domain) -> i64 {
    let n = d.n();
    let quad = |c: usize, r: usize| {
        let (cm, rm) = (c + n - 1, r + n - 1);
        d.at(c, r) + d.at(cm, r) + d.at(cm, rm) + d.at(c, rm)
    };
    (0..n)
        .map(|c| quad(c, d.from.row(c)) + quad(c, d.to.row(c)))
        .sum()
}

/// A positive domain: up to three empty rectangles in a row from `x`.
pub fn random_positive_domain<R: Rng>(rng: &mut R, g: &GridDiagram, x: &Generator) -> Domain {
    let mut d = Domain::zero(x.clone());
    for _ in 0..rng.gen_range(1..=3) {
        let rects = rectangles_from(g, &d.to);
        let (rect, _) = rects.choose(rng).expect("every generator has empty rectangles");
        d = d.then(&Domain::from_rectangle(rect, &d.to));
    }
    d
}

pub fn points(x: &Generator) -> FormalSum {
    FormalSum::from_points((0..x.n()).map(|j| HalfPoint::lattice(j as i64, x.row(j) as i64)))
}

pub fn markings(rows: &[usize]) -> FormalSum {
    FormalSum::from_points(
        rows.iter()
            .enumerate()
            .map(|(c, &r)| HalfPoint::center(c as i64, r as i64)),
    )
}

/// Both gradings straight from the J-pairing formulas with rational
/// coefficients.
pub fn j_route(grid: &GridDiagram, x: &Generator) -> (Rational64, Rational64) {
    let one = Rational64::from_integer(1);
    let half = Rational64::new(1, 2);
    let xs = points(x);
    let o = markings(grid.o_rows());
    let xm = markings(grid.x_rows());
    let x_minus_o = xs.minus(&o);
    let m = j_pairing(&x_minus_o, &x_minus_o) + one;
    let mid = xs.minus(&xm.plus(&o).scaled(half));
    let a = j_pairing(&mid, &xm.minus(&o)) - Rational64::new(grid.n() as i64 - 1, 2);
    (m, a)
}
