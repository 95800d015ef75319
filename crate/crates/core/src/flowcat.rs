//! The PL flow category of the grid poset.
//!
//! For `y < x` the morphism space is the order complex of the chains of
//! `[y, x]` that contain both endpoints. Composition `Mor(x, y) × Mor(y, z)
//! -> Mor(x, z)` is the union of chains. This module builds those complexes
//! and certifies them: balls via a shelling plus the pseudomanifold
//! condition, boundaries as spheres, compositions as embeddings onto the
//! boundary.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::complex::{boundary_complex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::grid::GridDiagram;
use crate::poset::{
    barycentric_above, interval, maximal_chains, order_complex, product, BarycentricPoset,
    Interval, DEFAULT_CHAIN_BUDGET,
};
use crate::shelling::{chain_labeling, shelling_order, CutLine};
use crate::states::GridState;

/// Default cap on `M(x) - M(y)` for morphism spaces.
pub const DEFAULT_GAP_CAP: usize = 4;
/// Default node budget for the shelling search.
pub const DEFAULT_SHELLING_BUDGET: usize = 200_000;

/// `Mor(x, y)` for `y < x`.
#[derive(Debug, Clone)]
pub struct MorSpace {
    pub x: GridState,
    pub y: GridState,
    pub interval: Interval,
    pub chains: BarycentricPoset,
    pub complex: SimplicialComplex,
    pub dim: i64,
}

impl MorSpace {
    pub fn from_interval(interval: Interval) -> Result<Self> {
        if interval.len() < 2 {
            return Err(Error::EmptyInterval);
        }
        let chains = barycentric_above(&interval);
        let complex = order_complex(&chains.poset)?.with_labels(chains.labels(&interval));
        let dim = interval.length() as i64 - 2;
        Ok(Self {
            x: interval.top().clone(),
            y: interval.bottom().clone(),
            interval,
            chains,
            complex,
            dim,
        })
    }

    /// Facet order induced by the EL-labeling for `l`: maximal chains of the
    /// interval by label, then the order in which interior elements join.
    pub fn el_seed(&self, grid: &GridDiagram, l: CutLine) -> Result<Vec<usize>> {
        let iv = &self.interval;
        let chains = maximal_chains(iv, usize::MAX, DEFAULT_CHAIN_BUDGET)?;
        let labelings: Vec<_> = chains.iter().map(|c| chain_labeling(grid, l, iv, c)).collect();
        let order = shelling_order(&chains, &labelings);
        let mut rank: HashMap<&[usize], usize> = HashMap::new();
        for (r, &k) in order.iter().enumerate() {
            rank.insert(chains[k].elements.as_slice(), r);
        }
        let facets = self.complex.facets();
        let key = |f: &Vec<usize>| {
            // vertices of a facet are nested chains; the largest is a maximal chain of the interval
            let mut verts: Vec<&Vec<usize>> = f.iter().map(|&v| &self.chains.chains[v]).collect();
            verts.sort_by_key(|c| c.len());
            let top = verts.last().expect("facets are nonempty");
            let joins: Vec<usize> = verts
                .windows(2)
                .map(|w| *w[1].iter().find(|e| !w[0].contains(e)).expect("nested chains"))
                .collect();
            (rank.get(top.as_slice()).copied().unwrap_or(usize::MAX), joins)
        };
        let mut idx: Vec<usize> = (0..facets.len()).collect();
        idx.sort_by_cached_key(|&i| key(&facets[i]));
        Ok(idx)
    }
}

/// `Mor(x, y)` built from the interval `[y, x]`.
pub fn mor_complex(grid: &GridDiagram, y: &GridState, x: &GridState, gap_cap: usize) -> Result<MorSpace> {
    let iv = interval(grid, y, x)?;
    let gap = iv.length() - 1;
    if gap > gap_cap {
        return Err(Error::CapExceeded {
            what: "Maslov gap",
            limit: gap_cap,
            actual: gap,
        });
    }
    MorSpace::from_interval(iv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Ball,
    Sphere,
    /// The shelling search ran out of budget.
    Unknown,
    /// The search finished but neither criterion holds.
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallCertificate {
    pub dim: i64,
    pub pure: bool,
    pub shelling: Option<Vec<usize>>,
    /// The seed order was itself a shelling.
    pub seed_accepted: bool,
    pub search_nodes: usize,
    pub pseudomanifold: bool,
    pub f_vector: Vec<usize>,
    pub euler: i64,
    pub boundary_facets: Vec<Vec<usize>>,
    pub boundary_f_vector: Vec<usize>,
    pub boundary_euler: i64,
    pub verdict: Verdict,
}

enum Search {
    Found(Vec<usize>),
    Exhausted,
    OutOfBudget,
}

/// Whether `f` meets the union of `chosen` in a nonempty union of its ridges.
fn addable(facets: &[Vec<usize>], chosen: &[usize], f: usize) -> bool {
    if chosen.is_empty() {
        return true;
    }
    let mf = &facets[f];
    let mut ridge_missing: Vec<usize> = Vec::new();
    let mut misses: Vec<Vec<usize>> = Vec::with_capacity(chosen.len());
    for &g in chosen {
        let mg = &facets[g];
        let missing: Vec<usize> = mf.iter().filter(|v| mg.binary_search(v).is_err()).copied().collect();
        if missing.len() == 1 && !ridge_missing.contains(&missing[0]) {
            ridge_missing.push(missing[0]);
        }
        misses.push(missing);
    }
    !ridge_missing.is_empty()
        && misses
            .iter()
            .all(|m| m.iter().any(|v| ridge_missing.contains(v)))
}

fn find_shelling(facets: &[Vec<usize>], preference: &[usize], budget: usize, nodes: &mut usize) -> Search {
    let m = facets.len();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    let mut used = vec![false; m];
    // cursor[k]: next preference position to try at depth k
    let mut cursor: Vec<usize> = vec![0];
    loop {
        if chosen.len() == m {
            return Search::Found(chosen);
        }
        let depth = chosen.len();
        let mut advanced = false;
        while cursor[depth] < m {
            let f = preference[cursor[depth]];
            cursor[depth] += 1;
            if used[f] {
                continue;
            }
            *nodes += 1;
            if *nodes > budget {
                return Search::OutOfBudget;
            }
            if addable(facets, &chosen, f) {
                used[f] = true;
                chosen.push(f);
                cursor.push(0);
                advanced = true;
                break;
            }
        }
        if advanced {
            continue;
        }
        // backtrack
        cursor.pop();
        match chosen.pop() {
            Some(f) => used[f] = false,
            None => return Search::Exhausted,
        }
    }
}

/// Searches for a shelling (preferring `seed` order when given), then
/// classifies the complex as a ball or sphere.
pub fn certify(s: &SimplicialComplex, seed: Option<&[usize]>, budget: usize) -> BallCertificate {
    let facets = s.facets();
    let dim = s.dim();
    let pure = s.is_pure();
    let f_vector = s.f_vector();
    let euler = s.euler_characteristic();
    let default_order: Vec<usize> = (0..facets.len()).collect();
    let preference = seed.unwrap_or(&default_order);

    let seed_accepted = seed.is_some_and(|order| {
        (1..=order.len()).all(|k| addable(facets, &order[..k - 1], order[k - 1]))
    });
    let mut search_nodes = 0;
    let search = if seed_accepted {
        Search::Found(preference.to_vec())
    } else if pure {
        find_shelling(facets, preference, budget, &mut search_nodes)
    } else {
        Search::Exhausted
    };

    let degrees = s.ridge_degrees().ok();
    let pseudomanifold = degrees.as_ref().is_some_and(|d| d.values().all(|&c| c <= 2));
    let has_free_ridge = degrees.as_ref().is_some_and(|d| d.values().any(|&c| c == 1));
    let (boundary_facets, boundary_f_vector, boundary_euler) = match boundary_complex(s) {
        Ok(b) => (b.facets().to_vec(), b.f_vector(), b.euler_characteristic()),
        Err(_) => (Vec::new(), Vec::new(), 0),
    };

    let (shelling, verdict) = match search {
        Search::OutOfBudget => (None, Verdict::Unknown),
        Search::Exhausted => (None, Verdict::Other),
        Search::Found(order) => {
            let sphere_euler = 1 + if dim % 2 == 0 { 1 } else { -1 };
            let verdict = if pure && pseudomanifold && has_free_ridge && euler == 1 {
                Verdict::Ball
            } else if pure && pseudomanifold && !has_free_ridge && euler == sphere_euler {
                Verdict::Sphere
            } else {
                Verdict::Other
            };
            (Some(order), verdict)
        }
    };

    BallCertificate {
        dim,
        pure,
        shelling,
        seed_accepted,
        search_nodes,
        pseudomanifold,
        f_vector,
        euler,
        boundary_facets,
        boundary_f_vector,
        boundary_euler,
        verdict,
    }
}

/// The boundary facets of `Mor(x, y)` are exactly the ridges avoiding the
/// vertex `{y, x}` (vertex 0).
pub fn boundary_avoids_endpoint_chain(m: &MorSpace) -> Result<bool> {
    let deg = m.complex.ridge_degrees()?;
    Ok(deg.iter().all(|(ridge, &d)| (d == 1) == !ridge.contains(&0)))
}

/// Results of the composition checks for one pair `z < x`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionSummary {
    pub middles: usize,
    /// Middles `y` where the union map is not a poset isomorphism onto the
    /// chains through `{z, y, x}`.
    pub iso_failures: Vec<String>,
    /// Middles whose image facets are not boundary facets of `Mor(x, z)`.
    pub embedding_failures: Vec<String>,
    pub image_facets: usize,
    pub boundary_facets: usize,
    /// Every boundary facet lies in the image for its minimal vertex.
    pub coverage: bool,
}

impl CompositionSummary {
    pub fn passed(&self) -> bool {
        self.iso_failures.is_empty()
            && self.embedding_failures.is_empty()
            && self.coverage
            && self.image_facets == self.boundary_facets
    }
}

/// Composition checks through every middle element of `Mor(x, z)`, where
/// `mor` is built on `[z, x]`. When `only` is given, just that middle is
/// checked for isomorphism and embedding (coverage always uses all middles).
pub fn check_compositions(mor: &MorSpace, only: Option<usize>) -> Result<CompositionSummary> {
    let iv = &mor.interval;
    let top = iv.top_index();
    let bzx = &mor.chains;
    let chain_index: HashMap<&[usize], usize> = bzx
        .chains
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();
    let boundary = boundary_complex(&mor.complex)?;
    let boundary_set: HashSet<&[usize]> = boundary.facets().iter().map(Vec::as_slice).collect();

    let mut summary = CompositionSummary {
        boundary_facets: boundary.facets().len(),
        ..Default::default()
    };
    let mut image_by_middle: HashMap<usize, HashSet<Vec<usize>>> = HashMap::new();

    for y in 1..top {
        let upper = iv.sub_interval(y, top);
        let lower = iv.sub_interval(0, y);
        let b1 = barycentric_above(&upper.interval);
        let b2 = barycentric_above(&lower.interval);
        let to_parent = |sub: &crate::poset::SubInterval, c: &[usize]| -> Vec<usize> {
            c.iter().map(|&e| sub.parent[e]).collect()
        };

        // vertex map (c1, c2) -> c1 ∪ c2, indexed like the product poset
        let n2 = b2.chains.len();
        let mut vertex_map = Vec::with_capacity(b1.chains.len() * n2);
        let mut iso_ok = true;
        for c1 in &b1.chains {
            for c2 in &b2.chains {
                let mut u = to_parent(&upper, c1);
                u.extend(to_parent(&lower, c2));
                u.sort_unstable();
                u.dedup();
                match chain_index.get(u.as_slice()) {
                    Some(&v) => vertex_map.push(v),
                    None => {
                        iso_ok = false;
                        vertex_map.push(usize::MAX);
                    }
                }
            }
        }
        let prod = product(&b1.poset, &b2.poset);
        if iso_ok {
            let image: HashSet<usize> = vertex_map.iter().copied().collect();
            let through_y: HashSet<usize> = (0..bzx.chains.len())
                .filter(|&v| bzx.chains[v].binary_search(&y).is_ok())
                .collect();
            iso_ok = image.len() == vertex_map.len() && image == through_y;
        }
        if iso_ok {
            // covers correspond both ways
            let mut prod_covers = HashSet::new();
            for a in 0..prod.len() {
                for &b in prod.lower_covers(a) {
                    prod_covers.insert((vertex_map[a], vertex_map[b]));
                }
            }
            let mut image_covers = HashSet::new();
            for &a in &vertex_map {
                for &b in bzx.poset.lower_covers(a) {
                    if bzx.chains[b].binary_search(&y).is_ok() {
                        image_covers.insert((a, b));
                    }
                }
            }
            iso_ok = prod_covers == image_covers;
        }
        let checked = only.is_none_or(|o| o == y);
        if !iso_ok {
            if checked {
                summary.iso_failures.push(iv.elements[y].to_string());
            }
            continue;
        }
        let prod_complex = order_complex(&prod)?;
        let mut images = HashSet::new();
        let mut embedded = true;
        for f in prod_complex.facets() {
            let mut img: Vec<usize> = f.iter().map(|&v| vertex_map[v]).collect();
            img.sort_unstable();
            if !boundary_set.contains(img.as_slice()) {
                embedded = false;
            }
            images.insert(img);
        }
        if images.len() != prod_complex.facets().len() {
            embedded = false;
        }
        if checked {
            summary.middles += 1;
            if !embedded {
                summary.embedding_failures.push(iv.elements[y].to_string());
            }
        }
        summary.image_facets += images.len();
        image_by_middle.insert(y, images);
    }

    summary.coverage = boundary.facets().iter().all(|f| {
        // the smallest vertex of a boundary facet is a chain {z, y', x}
        let Some(&v) = f.iter().min_by_key(|&&v| bzx.chains[v].len()) else {
            return false;
        };
        let c = &bzx.chains[v];
        c.len() == 3
            && image_by_middle
                .get(&c[1])
                .is_some_and(|imgs| imgs.contains(f))
    });
    Ok(summary)
}

/// Checks the composition `Mor(x, y) × Mor(y, z) -> Mor(x, z)`: poset
/// isomorphism onto the chains through `{z, y, x}`, embedding onto boundary
/// facets, and coverage of the boundary by all such images.
pub fn verify_composition(
    grid: &GridDiagram,
    z: &GridState,
    y: &GridState,
    x: &GridState,
    gap_cap: usize,
) -> Result<bool> {
    let mor = mor_complex(grid, z, x, gap_cap)?;
    let Some(mid) = mor.interval.elements.iter().position(|e| e == y) else {
        return Err(Error::EmptyInterval);
    };
    if mid == 0 || mid == mor.interval.top_index() {
        return Err(Error::EmptyInterval);
    }
    let s = check_compositions(&mor, Some(mid))?;
    Ok(s.iso_failures.is_empty() && s.embedding_failures.is_empty() && s.coverage)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_grid;
    use crate::states::Generator;

    #[test]
    fn simplex_and_sphere() {
        let simplex = SimplicialComplex::new(3, [vec![0, 1, 2]]);
        let c = certify(&simplex, None, 1000);
        assert_eq!(c.verdict, Verdict::Ball);
        assert_eq!(c.euler, 1);
        let tet = SimplicialComplex::new(4, [vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        let c = certify(&tet, None, 1000);
        assert_eq!(c.verdict, Verdict::Sphere);
        assert_eq!(c.euler, 2);
    }

    #[test]
    fn bowtie_is_not_a_ball() {
        // two triangles sharing one vertex: not shellable
        let s = SimplicialComplex::new(5, [vec![0, 1, 2], vec![2, 3, 4]]);
        let c = certify(&s, None, 1000);
        assert_eq!(c.verdict, Verdict::Other);
        assert!(c.shelling.is_none());
    }

    #[test]
    fn budget_exhaustion_is_unknown() {
        let s = SimplicialComplex::new(5, [vec![0, 1, 2], vec![2, 3, 4]]);
        assert_eq!(certify(&s, None, 1).verdict, Verdict::Unknown);
    }

    #[test]
    fn cover_gives_a_point() {
        let g = parse_grid("XO\nOX").unwrap();
        let x = GridState::bare(Generator(vec![0, 1]));
        let y = GridState::new(Generator(vec![1, 0]), vec![1, 0]);
        let m = mor_complex(&g, &y, &x, 4).unwrap();
        assert_eq!(m.dim, 0);
        assert_eq!(m.complex.facets(), &[vec![0]]);
        let c = certify(&m.complex, None, 100);
        assert_eq!(c.verdict, Verdict::Ball);
        assert!(mor_complex(&g, &x, &x, 4).is_err());
    }
}
