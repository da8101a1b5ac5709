//! Randomized invariant suites behind `zzco check` and the acceptance tests.
//!
//! Every suite takes a seed and a trial count, generates its own instances
//! through [`crate::sampling`], and reports failures with enough detail to
//! reproduce. All suites are exact: any mismatch at all is a failure.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::barcode_k::{
    brute_force_decompose, decompose, delta_hom, diagram, euler_class, euler_curve, k0_class,
    k0_of_barcode, set_decompose, set_k0, Barcode, Interval,
};
use crate::cosheaf::{
    augmented_module, based_collapse_map, based_filtration_module, based_index_module,
    filtration_module, graded_filtration_module, ZZModule,
};
use crate::exactlin::{FieldSpec, Mat};
use crate::reduction::{pairs_to_diagram, persistence_pairs};
use crate::sampling;
use crate::simplicial::{aug_rank_index, aug_rank_monotone};
use crate::stratline::StratumId;

/// Outcome of one suite: how many trials ran and which failed.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str) -> SuiteReport {
        SuiteReport { name, trials: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures.push(detail());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            format!("PASS  {}: {} checks", self.name, self.trials)
        } else {
            format!(
                "FAIL  {}: {} of {} checks failed; first: {}",
                self.name,
                self.failures.len(),
                self.trials,
                self.failures.first().map(String::as_str).unwrap_or("")
            )
        }
    }
}

fn f2() -> FieldSpec {
    FieldSpec::F2
}

/// Exhaustive decomposition check: `decompose` equals the brute-force
/// summand search on every F2 module with one vertex and dims <= 1, and on
/// `random_trials` random modules with <= 2 vertices and dims <= 2.
pub fn suite_decompose_oracle(seed: u64, random_trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("decompose vs exhaustive summand search");
    // bare line, no vertices
    let bare = crate::stratline::StratifiedLine::from_points(vec![]).unwrap();
    for d in 0..=1usize {
        let m = ZZModule::new(bare.clone(), f2(), vec![d], BTreeMap::new()).unwrap();
        report.check(decompose(&m) == brute_force_decompose(&m).unwrap(), || {
            format!("bare-line module of dimension {d}")
        });
    }
    // full enumeration over the one-vertex line with dims <= 1
    let line = crate::stratline::StratifiedLine::from_points(vec![crate::rational::int(1)]).unwrap();
    let all_maps = |rows: usize, cols: usize| -> Vec<Mat> {
        let n = rows * cols;
        (0..1usize << n)
            .map(|bits| {
                let data: Vec<i64> = (0..n).map(|i| (bits >> i & 1) as i64).collect();
                Mat::from_i64(f2(), rows, cols, &data)
            })
            .collect()
    };
    for d0 in 0..=1usize {
        for d1 in 0..=1usize {
            for d2 in 0..=1usize {
                for l in all_maps(d1, d0) {
                    for r in all_maps(d1, d2) {
                        let mut maps = BTreeMap::new();
                        maps.insert((StratumId::edge(0), StratumId::vertex(1)), l.clone());
                        maps.insert((StratumId::edge(1), StratumId::vertex(1)), r.clone());
                        let m =
                            ZZModule::new(line.clone(), f2(), vec![d0, d1, d2], maps).unwrap();
                        let fast = decompose(&m);
                        let slow = brute_force_decompose(&m).unwrap();
                        report.check(fast == slow, || {
                            format!("enumerated module dims ({d0},{d1},{d2})")
                        });
                    }
                }
            }
        }
    }
    // random instances with up to five strata and dims up to two; the total
    // dimension is then at most the brute-force cap
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..random_trials {
        let m = sampling::random_module(&mut rng, f2(), 2, 2);
        let fast = decompose(&m);
        let slow = brute_force_decompose(&m).unwrap();
        report.check(fast == slow, || format!("random module, trial {t}"));
    }
    report
}

/// Monotone persistence agreement: the diagram of the decomposed filtration
/// cosheaf equals the column-reduction diagram, degrees 0..=2.
pub fn suite_monotone_oracle(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("cosheaf diagrams vs column reduction");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let size = rng.gen_range(5..=50);
        let pool = rng.gen_range(2..=6);
        let f = sampling::random_filtration(&mut rng, size, pool);
        let pairs = persistence_pairs(&f, f2());
        for degree in 0..=2usize {
            let via_cosheaf = diagram(&decompose(&filtration_module(&f, degree, f2())));
            let via_reduction = pairs_to_diagram(&pairs, degree);
            report.check(via_cosheaf == via_reduction, || {
                format!("trial {t} degree {degree}: {} simplices", f.complex().len())
            });
        }
    }
    report
}

/// Augmented-rank agreement: the boundary-quotient formula equals the
/// index-step formula for a random refinement of every instance, and for
/// every compatible refinement of the small instances.
pub fn suite_aug_rank_agreement(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("augmented ranks: monotone vs index formulas");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        // mix sizes; make sure plenty fall at or below eight simplices, with
        // a tiny value pool there so the refinement enumeration is nontrivial
        let small = t % 3 == 0;
        let size = if small { rng.gen_range(4..=8) } else { rng.gen_range(9..=40) };
        let f = sampling::random_filtration(&mut rng, size, if small { 2 } else { 3 });
        let refinements = if f.complex().len() <= 8 {
            sampling::all_index_refinements(&f)
        } else {
            vec![sampling::random_index_refinement(&mut rng, &f)]
        };
        for (ri, index) in refinements.iter().enumerate() {
            for j in 1..=f.p() {
                for degree in 0..=2usize {
                    let a = aug_rank_monotone(&f, j, degree, f2());
                    let b = aug_rank_index(&f, index, j, degree, f2()).unwrap();
                    report.check(a == b, || {
                        format!("trial {t} refinement {ri} step {j} degree {degree}: {a} vs {b}")
                    });
                }
            }
        }
    }
    report
}

/// Pushforward along the collapse map sends the index cosheaf to the
/// monotone cosheaf, up to isomorphism, in every computed degree.
pub fn suite_pushforward_iso(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("collapse pushforward of index cosheaves");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let size = rng.gen_range(3..=25);
        let f = sampling::random_filtration(&mut rng, size, 4);
        let index = sampling::random_index_refinement(&mut rng, &f);
        let c = based_collapse_map(&index, &f);
        let top_dim = f.complex().dim().unwrap_or(0);
        for degree in 0..=top_dim {
            let index_cosheaf = based_index_module(&index, degree, f2());
            let pushed = index_cosheaf.pushforward(&c).unwrap();
            let monotone = based_filtration_module(&f, degree, f2());
            report.check(pushed.is_isomorphic(&monotone).unwrap(), || {
                format!("trial {t} degree {degree}: {} simplices", f.complex().len())
            });
        }
    }
    report
}

/// K0 additivity: under direct sums, from barcodes, and across the split
/// exact sequence at every vertex.
pub fn suite_k0_additivity(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("K0 additivity");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let m = sampling::random_module(&mut rng, f2(), 4, 3);
        let n = sampling::random_module_on(&mut rng, m.line().clone(), f2(), 3);
        let sum = m.direct_sum(&n).unwrap();
        report.check(k0_class(&sum) == k0_class(&m).plus(&k0_class(&n)), || {
            format!("trial {t}: direct-sum additivity")
        });
        report.check(k0_of_barcode(&decompose(&m)) == k0_class(&m), || {
            format!("trial {t}: barcode K0")
        });
        for v in m.line().vertices() {
            let (off, sky) = m.ses_at_vertex(v).unwrap();
            report.check(
                k0_class(&m) == k0_class(&off).plus(&k0_class(&sky)),
                || format!("trial {t}: vertex split at {v}"),
            );
        }
    }
    report
}

/// Euler identities: the class route equals the curve route, and at every
/// vertex the curve equals the alternating simplex count of the sublevel.
pub fn suite_euler_identity(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("Euler curve identities");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let size = rng.gen_range(3..=40);
        let f = sampling::random_filtration(&mut rng, size, 4);
        let g = graded_filtration_module(&f, f2());
        let curve = euler_curve(&g);
        report.check(euler_class(&g) == curve, || format!("trial {t}: class vs curve"));
        for j in 1..=f.p() {
            let expected = f.sublevel(j).euler_characteristic();
            report.check(curve.coeff(StratumId::vertex(j)) == expected, || {
                format!("trial {t}: curve at vertex {j}: {expected} expected")
            });
        }
    }
    report
}

/// The diagram map is a monoid homomorphism and descends to K0: diagrams of
/// direct sums are unions, and common summands cancel in virtual diagrams.
pub fn suite_delta_descent(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("diagram homomorphism and K0 descent");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let m = sampling::random_module(&mut rng, f2(), 3, 2);
        let n = sampling::random_module_on(&mut rng, m.line().clone(), f2(), 2);
        let x = sampling::random_module_on(&mut rng, m.line().clone(), f2(), 2);
        let sum_diagram = diagram(&decompose(&m.direct_sum(&n).unwrap()));
        let union = diagram(&decompose(&m)).union(&diagram(&decompose(&n)));
        report.check(sum_diagram == union, || format!("trial {t}: monoid homomorphism"));
        let plain = delta_hom(&m, &n).unwrap();
        let padded =
            delta_hom(&m.direct_sum(&x).unwrap(), &n.direct_sum(&x).unwrap()).unwrap();
        report.check(plain == padded, || format!("trial {t}: descent to K0"));
    }
    report
}

/// Injective set modules: trajectories are intervals with one element per
/// stratum, and cardinalities equal the barcode K0.
pub fn suite_set_k0(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("set-valued K0");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let s = sampling::random_set_module(&mut rng, 4, 4);
        let comps = s.trajectory_components().unwrap();
        let intervals_ok = comps.iter().all(|c| {
            let lo = c.first().unwrap().0.pos();
            let hi = c.last().unwrap().0.pos();
            c.len() == hi - lo + 1
                && c.iter().enumerate().all(|(i, (st, _))| st.pos() == lo + i)
        });
        report.check(intervals_ok, || format!("trial {t}: a trajectory is not an interval"));
        let b = set_decompose(&s).unwrap();
        report.check(set_k0(&s) == k0_of_barcode(&b), || format!("trial {t}: K0 mismatch"));
    }
    report
}

/// Subdivision stability: normal forms round-trip and barcodes transport
/// along the reindexing.
pub fn suite_subdivision_stability(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("weak-equivalence subdivision stability");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let m = sampling::random_module(&mut rng, f2(), 4, 3);
        let (e, x) = sampling::random_subdivision_point(&mut rng, m.line());
        let sub = m.subdivide(e, &x).unwrap();
        report.check(sub.weak_normal_form() == m.weak_normal_form(), || {
            format!("trial {t}: normal-form round trip at {e}")
        });
        let transported = transport_barcode(&decompose(&m), e, sub.line().clone());
        report.check(decompose(&sub) == transported, || {
            format!("trial {t}: barcode transport across subdivision at {e}")
        });
    }
    report
}

/// Reindex a barcode across a single subdivision of edge `e`: endpoints to
/// the right of `e` shift by one stratum pair; an interval beginning at `e`
/// begins at its left half, one ending at `e` ends at its right half.
fn transport_barcode(
    b: &Barcode,
    e: StratumId,
    new_line: crate::stratline::StratifiedLine,
) -> Barcode {
    let mut out = Barcode::empty(new_line);
    for (interval, &mult) in b.iter() {
        let lo = if interval.lo.twice() > e.twice() {
            StratumId::from_twice(interval.lo.twice() + 2)
        } else {
            interval.lo
        };
        let hi = if interval.hi.twice() >= e.twice() {
            StratumId::from_twice(interval.hi.twice() + 2)
        } else {
            interval.hi
        };
        out.add(Interval::new(lo, hi), mult);
    }
    out
}

/// Augmented modules of index filtrations coincide with the plain
/// filtration modules.
pub fn suite_augmented_index(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("augmented = plain for index filtrations");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let size = rng.gen_range(3..=25);
        let f = sampling::random_filtration(&mut rng, size, 4);
        let index = sampling::random_index_refinement(&mut rng, &f).as_filtration();
        for degree in 0..=2usize {
            report.check(
                augmented_module(&index, degree, f2()) == filtration_module(&index, degree, f2()),
                || format!("trial {t} degree {degree}"),
            );
        }
    }
    report
}

/// The scaled-down battery behind `zzco check`.
pub fn run_all(seed: u64, trials: usize) -> Vec<SuiteReport> {
    let t = trials.max(1);
    vec![
        suite_decompose_oracle(seed, t),
        suite_monotone_oracle(seed.wrapping_add(1), t.min(20)),
        suite_aug_rank_agreement(seed.wrapping_add(2), t.min(20)),
        suite_pushforward_iso(seed.wrapping_add(3), t.min(20)),
        suite_k0_additivity(seed.wrapping_add(4), t),
        suite_euler_identity(seed.wrapping_add(5), t.min(20)),
        suite_delta_descent(seed.wrapping_add(6), t),
        suite_set_k0(seed.wrapping_add(7), t),
        suite_subdivision_stability(seed.wrapping_add(8), t.min(50)),
        suite_augmented_index(seed.wrapping_add(9), t.min(20)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    // Small smoke runs; the acceptance suite runs the full counts.
    #[test]
    fn all_suites_pass_smoke() {
        for report in run_all(12345, 5) {
            assert!(report.passed(), "{}", report.summary());
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let a: Vec<String> = run_all(99, 3).iter().map(|r| r.summary()).collect();
        let b: Vec<String> = run_all(99, 3).iter().map(|r| r.summary()).collect();
        assert_eq!(a, b);
    }
}
