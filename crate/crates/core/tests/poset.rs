mod common;

use std::collections::HashSet;

use gridshell::poset::{
    barycentric_above, covers_down, covers_up, gt_chain_complex, interval, leq, maximal_chains,
    order_complex, product, DownSet, FinitePoset, DEFAULT_CHAIN_BUDGET,
};
use gridshell::shelling::submaximal_counts;
use gridshell::states::{bigrading, enumerate_generators, exponent_vectors, Generator, GridState};
use gridshell::{parse_grid, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn st(rows: &[u8], u: &[u32]) -> GridState {
    GridState::new(Generator(rows.to_vec()), u.to_vec())
}

#[test]
fn two_by_two_covers() {
    let g = parse_grid("XO\nOX").unwrap();
    let down: HashSet<GridState> = covers_down(&g, &st(&[0, 1], &[0, 0]))
        .into_iter()
        .map(|c| c.lower)
        .collect();
    assert_eq!(down, HashSet::from([st(&[1, 0], &[1, 0]), st(&[1, 0], &[0, 1])]));
    assert!(covers_down(&g, &st(&[1, 0], &[0, 0])).is_empty());
    let up: Vec<GridState> = covers_up(&g, &st(&[1, 0], &[1, 0])).into_iter().map(|c| c.upper).collect();
    assert_eq!(up, vec![st(&[0, 1], &[0, 0])]);
    assert!(covers_up(&g, &st(&[1, 0], &[0, 0])).is_empty());
}

#[test]
fn covers_up_and_down_are_dual() {
    let mut grids = common::all_knot_grids(2);
    grids.extend(common::all_knot_grids(3));
    for g in &grids {
        let n = g.n();
        let gens = enumerate_generators(g, 8).unwrap();
        let mut states = Vec::new();
        for x in &gens {
            for k in 0..=2 {
                for u in exponent_vectors(n, k) {
                    states.push(GridState::new(x.clone(), u));
                }
            }
        }
        let set: HashSet<&GridState> = states.iter().collect();
        for w in &states {
            for c in covers_down(g, w) {
                assert!(covers_up(g, &c.lower).contains(&c), "{w} -> {}", c.lower);
            }
        }
        for z in &states {
            for c in covers_up(g, z) {
                assert_eq!(&c.lower, z);
                if set.contains(&c.upper) {
                    assert!(covers_down(g, &c.upper).contains(&c));
                }
            }
        }
    }
}

#[test]
fn covers_keep_alexander_and_drop_maslov_by_one() {
    for (name, g) in common::corpus_up_to(7) {
        for x in enumerate_generators(&g, 8).unwrap().into_iter().step_by(7) {
            for s in [GridState::bare(x.clone()), GridState::bare(x).times_u(0)] {
                let b = bigrading(&g, &s);
                for c in covers_down(&g, &s) {
                    let l = bigrading(&g, &c.lower);
                    assert_eq!((l.maslov, l.alexander), (b.maslov - 1, b.alexander), "{name}");
                }
            }
        }
    }
}

#[test]
fn interval_examples() {
    let g = parse_grid("XO\nOX").unwrap();
    let id = st(&[0, 1], &[0, 0]);
    let iv = interval(&g, &id, &id).unwrap();
    assert_eq!((iv.len(), iv.covers.len()), (1, 0));
    let iv = interval(&g, &st(&[1, 0], &[1, 0]), &id).unwrap();
    assert_eq!((iv.len(), iv.covers.len()), (2, 1));
    assert_eq!(maximal_chains(&iv, 7, 100).unwrap().len(), 1);
    // different Alexander gradings are incomparable
    assert!(!leq(&g, &st(&[1, 0], &[0, 0]), &id));
    assert_eq!(
        interval(&g, &st(&[1, 0], &[0, 0]), &id).unwrap_err(),
        Error::EmptyInterval
    );
}

/// Number of saturated paths from bottom to top by powers of the cover
/// adjacency matrix.
fn chains_by_matrix_powers(iv: &gridshell::poset::Interval) -> u64 {
    let m = iv.len();
    let mut adj = vec![vec![0u64; m]; m];
    for c in &iv.covers {
        adj[c.lower][c.upper] += 1;
    }
    let mut v = vec![0u64; m];
    v[0] = 1;
    for _ in 1..iv.length() {
        let mut next = vec![0u64; m];
        for a in 0..m {
            for b in 0..m {
                next[b] += v[a] * adj[a][b];
            }
        }
        v = next;
    }
    v[iv.top_index()]
}

#[test]
fn chain_counts_match_matrix_powers() {
    let g = parse_grid(gridshell::corpus::corpus_text("trefoil-5a").unwrap()).unwrap();
    let mut checked = 0;
    for x in enumerate_generators(&g, 8).unwrap().into_iter().step_by(3) {
        let ds = DownSet::build(&g, &GridState::bare(x), 4, None);
        for b in 1..ds.len() {
            let iv = ds.interval_to(b);
            let chains = maximal_chains(&iv, 7, DEFAULT_CHAIN_BUDGET).unwrap();
            assert_eq!(chains.len() as u64, chains_by_matrix_powers(&iv));
            if iv.length() == 3 {
                assert_eq!(chains.len(), 2);
            }
            checked += 1;
        }
    }
    assert!(checked > 100);
}

#[test]
fn chain_budget_and_length_cap() {
    let g = parse_grid(gridshell::corpus::corpus_text("trefoil-5a").unwrap()).unwrap();
    let iv = enumerate_generators(&g, 8)
        .unwrap()
        .into_iter()
        .find_map(|x| {
            let ds = DownSet::build(&g, &GridState::bare(x), 3, None);
            (1..ds.len())
                .filter(|&b| ds.depth_of[b] == 3)
                .map(|b| ds.interval_to(b))
                .find(|iv| maximal_chains(iv, 7, 100).unwrap().len() >= 2)
        })
        .unwrap();
    assert!(matches!(maximal_chains(&iv, 3, 100), Err(Error::CapExceeded { .. })));
    assert!(matches!(maximal_chains(&iv, 7, 1), Err(Error::CapExceeded { .. })));
}

#[test]
fn barycentric_above_small_cases() {
    let g = parse_grid("XO\nOX").unwrap();
    let iv = interval(&g, &st(&[1, 0], &[1, 0]), &st(&[0, 1], &[0, 0])).unwrap();
    assert_eq!(barycentric_above(&iv).chains, vec![vec![0, 1]]);

    let t = parse_grid(gridshell::corpus::corpus_text("trefoil-5a").unwrap()).unwrap();
    let x = GridState::bare(enumerate_generators(&t, 8).unwrap().remove(0));
    let ds = DownSet::build(&t, &x, 4, None);
    for b in 1..ds.len() {
        let iv = ds.interval_to(b);
        let bp = barycentric_above(&iv);
        let len = bp.poset.graded_length(DEFAULT_CHAIN_BUDGET).unwrap();
        assert_eq!(len, iv.length() - 1, "graded of length M(x) - M(y)");
        if iv.length() == 3 {
            assert_eq!(bp.chains.len(), 3);
        }
        // a submaximal chain lies in one maximal chain exactly when it avoids {y, x}
        if iv.length() >= 3 {
            for (sub, count) in submaximal_counts(&bp.poset).unwrap() {
                assert!(count <= 2);
                assert_eq!(count == 1, !sub.contains(&0), "{sub:?}");
            }
        }
    }
}

fn random_poset<R: Rng>(rng: &mut R, len: usize) -> FinitePoset {
    let mut reach = vec![vec![false; len]; len];
    for a in 0..len {
        for b in a + 1..len {
            reach[a][b] = rng.gen_bool(0.35);
        }
    }
    for k in 0..len {
        for a in 0..len {
            for b in 0..len {
                if reach[a][k] && reach[k][b] {
                    reach[a][b] = true;
                }
            }
        }
    }
    FinitePoset::from_order(len, |a, b| a == b || reach[a][b]).unwrap()
}

#[test]
fn products() {
    let point = FinitePoset::chain(1);
    let two = FinitePoset::chain(2);
    let p = product(&two, &point);
    assert_eq!((p.len(), p.cover_count()), (2, 1));
    let diamond = product(&two, &two);
    assert_eq!((diamond.len(), diamond.cover_count()), (4, 4));
    assert_eq!(diamond.maximal_chains(10).unwrap().len(), 2);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..40 {
        let (la, lb) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let a = random_poset(&mut rng, la);
        let b = random_poset(&mut rng, lb);
        let prod = product(&a, &b);
        assert_eq!(prod.len(), a.len() * b.len());
        let (oa, ob, op) = (a.order_matrix(), b.order_matrix(), prod.order_matrix());
        let nb = b.len();
        for i in 0..prod.len() {
            for j in 0..prod.len() {
                let want = oa[i / nb][j / nb] && ob[i % nb][j % nb];
                assert_eq!(op[i][j], want);
            }
        }
        let chi = |p: &FinitePoset| order_complex(p).unwrap().euler_characteristic();
        assert_eq!(chi(&prod), chi(&a) * chi(&b));
    }
}

#[test]
fn order_complex_examples() {
    let point = order_complex(&FinitePoset::chain(1)).unwrap();
    assert_eq!(point.facets(), &[vec![0]]);
    let diamond = FinitePoset::from_covers(4, [(1, 0), (2, 0), (3, 1), (3, 2)], None).unwrap();
    assert_eq!(order_complex(&diamond).unwrap().facets(), &[vec![0, 1, 3], vec![0, 2, 3]]);
}

#[test]
fn truncated_complex_on_the_unknot() {
    let g = parse_grid("XO\nOX").unwrap();
    let c = gt_chain_complex(&g, -1, -2).unwrap();
    assert_eq!(c.basis[&-1], vec![st(&[0, 1], &[0, 0])]);
    assert_eq!(c.basis[&-2], vec![st(&[1, 0], &[0, 1]), st(&[1, 0], &[1, 0])]);
    let d = &c.differentials[&-1];
    assert_eq!(d.cols, vec![vec![0, 1]]);
    let empty = gt_chain_complex(&g, -1, 10).unwrap();
    assert_eq!(empty.total_rank(), 0);
}
