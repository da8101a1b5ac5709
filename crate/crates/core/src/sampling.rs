//! Seeded random generators for filtrations, modules, and set modules.
//!
//! Shared between the randomized test suites and the `check` command, so a
//! fixed seed reproduces identical instances everywhere.

use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::barcode_k::SetZZModule;
use crate::cosheaf::ZZModule;
use crate::exactlin::{FieldSpec, Mat};
use crate::rational::int;
use crate::simplicial::{Filtration, IndexFiltration, SComplex, Simplex};
use crate::stratline::{StratifiedLine, StratumId};

fn sx(v: &[u32]) -> Simplex {
    Simplex::new(v.to_vec()).unwrap()
}

/// A random monotone filtration with at most `max_simplices` simplices and
/// filter values drawn from a pool of `value_pool` integers (small pools
/// make ties, hence nontrivial blocks and instantaneous events, likely).
pub fn random_filtration<R: Rng>(rng: &mut R, max_simplices: usize, value_pool: usize) -> Filtration {
    let max_simplices = max_simplices.max(1);
    let nv = rng.gen_range(1..=((max_simplices / 2).clamp(1, 10)) as u32);
    let mut top: Vec<Simplex> = (0..nv).map(|i| sx(&[i])).collect();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..nv {
        for j in i + 1..nv {
            if rng.gen_bool(0.6) {
                edges.push((i, j));
                top.push(sx(&[i, j]));
            }
        }
    }
    let has_edge = |a: u32, b: u32| edges.contains(&(a.min(b), a.max(b)));
    for i in 0..nv {
        for j in i + 1..nv {
            for k in j + 1..nv {
                if has_edge(i, j) && has_edge(j, k) && has_edge(i, k) && rng.gen_bool(0.5) {
                    top.push(sx(&[i, j, k]));
                }
            }
        }
    }
    // occasionally a hollow (and sometimes solid) tetrahedron for degree-two cycles
    if nv >= 4 && rng.gen_bool(0.4) {
        let mut ids: Vec<u32> = (0..nv).collect();
        ids.shuffle(rng);
        let t = [ids[0], ids[1], ids[2], ids[3]];
        for omit in 0..4 {
            let mut tri: Vec<u32> = t.to_vec();
            tri.remove(omit);
            top.push(Simplex::new(tri).unwrap());
        }
        if rng.gen_bool(0.3) {
            top.push(Simplex::new(t.to_vec()).unwrap());
        }
    }
    let mut complex = SComplex::closure(top);
    while complex.len() > max_simplices {
        // drop a maximal simplex and re-close
        let all: Vec<Simplex> = complex.iter().cloned().collect();
        let maximal: Vec<&Simplex> = all
            .iter()
            .filter(|s| s.dim() > 0 && !all.iter().any(|t| t.facets().contains(s)))
            .collect();
        if maximal.is_empty() {
            let keep: Vec<Simplex> = all.into_iter().take(max_simplices).collect();
            complex = SComplex::closure(keep.into_iter().filter(|s| s.dim() == 0));
            break;
        }
        let victim = maximal[rng.gen_range(0..maximal.len())].clone();
        complex = SComplex::new(all.into_iter().filter(|s| *s != victim)).unwrap();
    }

    let pool: Vec<BigRational> = (1..=value_pool.max(1) as i64).map(int).collect();
    let mut by_dim: Vec<Simplex> = complex.iter().cloned().collect();
    by_dim.sort_by_key(|s| s.dim());
    let mut values: std::collections::BTreeMap<Simplex, BigRational> = Default::default();
    for s in by_dim {
        let mut v = pool[rng.gen_range(0..pool.len())].clone();
        for f in s.facets() {
            if values[&f] > v {
                v = values[&f].clone();
            }
        }
        values.insert(s, v);
    }
    Filtration::sublevel_filtration(values.into_iter().collect()).unwrap()
}

/// A random module on a fresh line with up to `max_k` integer-coordinate
/// vertices and stratum dimensions up to `max_dim`.
pub fn random_module<R: Rng>(rng: &mut R, field: FieldSpec, max_k: usize, max_dim: usize) -> ZZModule {
    let k = rng.gen_range(1..=max_k.max(1));
    let line = StratifiedLine::from_points((1..=k as i64).map(int).collect()).unwrap();
    random_module_on(rng, line, field, max_dim)
}

/// A random module on a given line.
pub fn random_module_on<R: Rng>(
    rng: &mut R,
    line: StratifiedLine,
    field: FieldSpec,
    max_dim: usize,
) -> ZZModule {
    let dims: Vec<usize> = (0..line.num_strata()).map(|_| rng.gen_range(0..=max_dim)).collect();
    let mut maps = std::collections::BTreeMap::new();
    for e in line.edges() {
        for v in line.incidences(e).unwrap() {
            let rows = dims[v.pos()];
            let cols = dims[e.pos()];
            let data: Vec<i64> = (0..rows * cols)
                .map(|_| match field.characteristic() {
                    0 => rng.gen_range(-2..=2),
                    p => rng.gen_range(0..p.min(5) as i64),
                })
                .collect();
            maps.insert((e, v), Mat::from_i64(field, rows, cols, &data));
        }
    }
    ZZModule::new(line, field, dims, maps).unwrap()
}

/// A random injective set-valued module: edge sets are small enough to
/// inject into both incident vertex sets.
pub fn random_set_module<R: Rng>(rng: &mut R, max_k: usize, max_card: usize) -> SetZZModule {
    let k = rng.gen_range(1..=max_k.max(1));
    let line = StratifiedLine::from_points((1..=k as i64).map(int).collect()).unwrap();
    let mut cards = vec![0usize; line.num_strata()];
    for v in line.vertices() {
        cards[v.pos()] = rng.gen_range(0..=max_card);
    }
    for e in line.edges() {
        let bound = line
            .incidences(e)
            .unwrap()
            .iter()
            .map(|v| cards[v.pos()])
            .min()
            .unwrap_or(max_card);
        cards[e.pos()] = rng.gen_range(0..=bound);
    }
    let sets: Vec<Vec<String>> = cards
        .iter()
        .map(|&c| (0..c).map(|i| format!("e{i}")).collect())
        .collect();
    let mut maps = std::collections::BTreeMap::new();
    for e in line.edges() {
        for v in line.incidences(e).unwrap() {
            let mut targets: Vec<usize> = (0..cards[v.pos()]).collect();
            targets.shuffle(rng);
            targets.truncate(cards[e.pos()]);
            maps.insert((e, v), targets);
        }
    }
    SetZZModule::new(line, sets, maps).unwrap()
}

/// A random edge of the line together with a rational point strictly inside.
pub fn random_subdivision_point<R: Rng>(
    rng: &mut R,
    line: &StratifiedLine,
) -> (StratumId, BigRational) {
    let k = line.k();
    let j = rng.gen_range(0..=k);
    let e = StratumId::edge(j);
    let x = if k == 0 {
        int(rng.gen_range(-3..=3))
    } else if j == 0 {
        &line.vertex_coords()[0] - int(rng.gen_range(1..=3))
    } else if j == k {
        &line.vertex_coords()[k - 1] + int(rng.gen_range(1..=3))
    } else {
        let a = &line.vertex_coords()[j - 1];
        let b = &line.vertex_coords()[j];
        let t = int(rng.gen_range(1..=3)) / int(4);
        a + (b - a) * t
    };
    (e, x)
}

/// Every index filtration compatible with `f`: all ways to order the
/// simplices so that values weakly increase and faces come first.
pub fn all_index_refinements(f: &Filtration) -> Vec<IndexFiltration> {
    let simplices: Vec<Simplex> = f.complex().iter().cloned().collect();
    let mut out = Vec::new();
    let mut placed: Vec<Simplex> = Vec::new();
    let mut used = vec![false; simplices.len()];

    fn admissible(
        f: &Filtration,
        simplices: &[Simplex],
        used: &[bool],
        i: usize,
        placed: &[Simplex],
    ) -> bool {
        if used[i] {
            return false;
        }
        let s = &simplices[i];
        // must realize the smallest remaining value
        for (j, t) in simplices.iter().enumerate() {
            if !used[j] && f.filter_value(t) < f.filter_value(s) {
                return false;
            }
        }
        s.facets().iter().all(|face| placed.contains(face))
    }

    fn rec(
        f: &Filtration,
        simplices: &[Simplex],
        used: &mut Vec<bool>,
        placed: &mut Vec<Simplex>,
        out: &mut Vec<IndexFiltration>,
    ) {
        if placed.len() == simplices.len() {
            out.push(IndexFiltration::new(f, placed.clone()).unwrap());
            return;
        }
        for i in 0..simplices.len() {
            if admissible(f, simplices, used, i, placed) {
                used[i] = true;
                placed.push(simplices[i].clone());
                rec(f, simplices, used, placed, out);
                placed.pop();
                used[i] = false;
            }
        }
    }

    rec(f, &simplices, &mut used, &mut placed, &mut out);
    out
}

/// One compatible index refinement drawn uniformly-ish at random (each step
/// picks uniformly among the currently admissible simplices).
pub fn random_index_refinement<R: Rng>(rng: &mut R, f: &Filtration) -> IndexFiltration {
    let simplices: Vec<Simplex> = f.complex().iter().cloned().collect();
    let mut used = vec![false; simplices.len()];
    let mut placed: Vec<Simplex> = Vec::new();
    while placed.len() < simplices.len() {
        let min_val = simplices
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(_, s)| f.filter_value(s))
            .min()
            .unwrap();
        let candidates: Vec<usize> = (0..simplices.len())
            .filter(|&i| {
                !used[i]
                    && f.filter_value(&simplices[i]) == min_val
                    && simplices[i].facets().iter().all(|face| placed.contains(face))
            })
            .collect();
        let pick = candidates[rng.gen_range(0..candidates.len())];
        used[pick] = true;
        placed.push(simplices[pick].clone());
    }
    IndexFiltration::new(f, placed).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_are_deterministic() {
        let make = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let f = random_filtration(&mut rng, 25, 4);
            let m = random_module(&mut rng, FieldSpec::F2, 4, 3);
            let s = random_set_module(&mut rng, 3, 3);
            (f, m, s)
        };
        let (f1, m1, s1) = make();
        let (f2, m2, s2) = make();
        assert_eq!(f1, f2);
        assert_eq!(m1, m2);
        assert_eq!(s1, s2);
    }

    #[test]
    fn random_filtrations_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let f = random_filtration(&mut rng, 30, 5);
            assert!(f.complex().len() <= 30);
            assert!(f.p() >= 1);
        }
    }

    #[test]
    fn refinement_enumeration_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random_filtration(&mut rng, 6, 2);
        let all = all_index_refinements(&f);
        assert!(!all.is_empty());
        // the deterministic refinement is among them
        assert!(all.contains(&f.index_refinement()));
        // and a random one is too
        let r = random_index_refinement(&mut rng, &f);
        assert!(all.contains(&r));
    }

    #[test]
    fn subdivision_points_land_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let m = random_module(&mut rng, FieldSpec::F2, 4, 2);
            let (e, x) = random_subdivision_point(&mut rng, m.line());
            assert_eq!(m.line().stratum_of_point(&x), e);
        }
    }
}
