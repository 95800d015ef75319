mod common;

use std::collections::HashMap;

use gridshell::domains::{
    decompose, is_positive, maslov_index, rectangles_from, solve_domain, Domain,
};
use gridshell::states::{enumerate_generators, Generator, GridState};
use gridshell::{Error, GridDiagram};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every positive domain with entries in `0..=2` between all pairs of
/// generators with no X multiplicity, keyed by `(from, to, o_counts)`.
fn brute_force_positive(g: &GridDiagram) -> HashMap<(Generator, Generator, Vec<i64>), Vec<Domain>> {
    let n = g.n();
    let gens = enumerate_generators(g, 8).unwrap();
    let cells = n * n;
    let mut out: HashMap<_, Vec<Domain>> = HashMap::new();
    for code in 0..3usize.pow(cells as u32) {
        let mut k = code;
        let mut mult = vec![vec![0i64; n]; n];
        for c in 0..n {
            for r in 0..n {
                mult[c][r] = (k % 3) as i64;
                k /= 3;
            }
        }
        if (0..n).any(|c| mult[c][g.x_rows()[c]] != 0) {
            continue;
        }
        for from in &gens {
            for to in &gens {
                let d = Domain::from_multiplicities(from.clone(), to.clone(), mult.clone());
                if d.boundary_matches() {
                    let o = d.marking_count(g).o_counts;
                    out.entry((from.clone(), to.clone(), o)).or_default().push(d);
                }
            }
        }
    }
    out
}

#[test]
fn solve_domain_matches_brute_force_on_small_grids() {
    let mut grids = common::all_knot_grids(2);
    grids.extend(common::all_knot_grids(3));
    for g in &grids {
        let brute = brute_force_positive(g);
        assert!(brute.keys().filter(|(a, b, _)| a != b).count() > 0);
        for ((from, to, o), found) in &brute {
            assert_eq!(found.len(), 1, "domains are unique: {from} -> {to}");
            let x = GridState::bare(from.clone());
            let y = GridState::new(to.clone(), o.iter().map(|&k| k as u32).collect());
            let solved = solve_domain(g, &x, &y).expect("brute force found a domain");
            assert_eq!(&solved, &found[0]);
        }
        // the converse: small positive solutions all appear in the brute force
        let gens = enumerate_generators(g, 8).unwrap();
        for from in &gens {
            for to in &gens {
                for u in gridshell::states::exponent_vectors(g.n(), 2)
                    .into_iter()
                    .chain(gridshell::states::exponent_vectors(g.n(), 1))
                    .chain(gridshell::states::exponent_vectors(g.n(), 0))
                {
                    let x = GridState::bare(from.clone());
                    let y = GridState::new(to.clone(), u.clone());
                    let Some(d) = solve_domain(g, &x, &y) else { continue };
                    if is_positive(&d) && d.multiplicities().iter().all(|&m| m <= 2) {
                        let key = (from.clone(), to.clone(), u.iter().map(|&k| k as i64).collect());
                        assert!(brute.contains_key(&key), "{x} -> {y} missing from brute force");
                    }
                }
            }
        }
    }
}

#[test]
fn solved_domains_have_the_right_boundary_and_markings() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=5 {
        let g = common::random_knot_grid(&mut rng, n);
        let gens = enumerate_generators(&g, 8).unwrap();
        for _ in 0..200 {
            let x = GridState::bare(gens.choose(&mut rng).unwrap().clone());
            let u: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let y = GridState::new(gens.choose(&mut rng).unwrap().clone(), u.clone());
            let Some(d) = solve_domain(&g, &x, &y) else { continue };
            assert!(d.boundary_matches());
            let counts = d.marking_count(&g);
            assert!(counts.x_counts.iter().all(|&k| k == 0));
            let want: Vec<i64> = u.iter().map(|&k| k as i64).collect();
            assert_eq!(counts.o_counts, want);
        }
    }
}

#[test]
fn maslov_index_equals_point_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for n in 2..=5 {
        let g = common::random_knot_grid(&mut rng, n);
        let gens = enumerate_generators(&g, 8).unwrap();
        for _ in 0..300 {
            let x = gens.choose(&mut rng).unwrap();
            let d = common::random_positive_domain(&mut rng, &g, x);
            assert_eq!(4 * maslov_index(&g, &d), common::four_point_measure(&d), "{d:?}");
            // also on arbitrary (signed) domains between states
            let y = GridState::new(
                gens.choose(&mut rng).unwrap().clone(),
                (0..n).map(|_| rng.gen_range(0..2)).collect(),
            );
            if let Some(e) = solve_domain(&g, &GridState::bare(x.clone()), &y) {
                assert_eq!(4 * maslov_index(&g, &e), common::four_point_measure(&e));
            }
        }
    }
}

#[test]
fn decompositions_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for trial in 0..2000 {
        let n = 2 + trial % 3;
        let g = common::random_knot_grid(&mut rng, n);
        let gens = enumerate_generators(&g, 8).unwrap();
        let x = gens.choose(&mut rng).unwrap().clone();
        let d = common::random_positive_domain(&mut rng, &g, &x);
        let parts = decompose(&g, &d).unwrap();
        assert_eq!(parts.len() as i64, maslov_index(&g, &d));
        let mut sum = Domain::zero(d.from.clone());
        for (rect, next) in &parts {
            assert!(rect.is_empty_for(&sum.to));
            sum = sum.then(&Domain::from_rectangle(rect, &sum.to));
            assert_eq!(&sum.to, next);
        }
        assert_eq!(sum, d);
    }
}

#[test]
fn decompose_rejects_negative_domains() {
    let g = common::all_knot_grids(2).remove(0);
    let x = Generator(vec![0, 1]);
    let (rect, _) = rectangles_from(&g, &x)[0];
    let d = Domain::from_rectangle(&rect, &x);
    let neg = Domain::from_multiplicities(
        d.to.clone(),
        d.from.clone(),
        (0..2).map(|c| (0..2).map(|r| -d.at(c, r)).collect()).collect(),
    );
    assert!(neg.boundary_matches());
    assert_eq!(decompose(&g, &neg), Err(Error::NotPositive));
}
