//! Standard persistence by boundary-matrix column reduction.
//!
//! This is a self-contained implementation of the classic pairing algorithm
//! over an arbitrary coefficient field, used as an independent cross-check
//! for the cosheaf pipeline on monotone filtrations. It shares nothing with
//! the interval-decomposition path: no cosheaves, no limits, no rank tables.

use std::collections::BTreeMap;

use crate::barcode_k::{diagram, decompose, DiagCoord, Diagram};
use crate::cosheaf::filtration_module;
use crate::exactlin::{FieldSpec, Scalar};
use crate::simplicial::Filtration;

/// One persistence pair in 1-based monotone step indices: a class of the
/// given degree born entering `K_{m_birth}` and dying entering
/// `K_{m_death}` (`None` when it never dies).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PersistencePair {
    pub degree: usize,
    pub birth_block: usize,
    pub death_block: Option<usize>,
}

/// Sparse column over a field, keyed by row index.
struct SparseCol {
    entries: BTreeMap<usize, Scalar>,
}

impl SparseCol {
    fn low(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// self -= coeff * other
    fn axpy(&mut self, field: FieldSpec, coeff: &Scalar, other: &SparseCol) {
        for (&row, val) in &other.entries {
            let delta = field.mul(coeff, val);
            let cur = self.entries.remove(&row).unwrap_or_else(|| field.zero());
            let next = field.sub(&cur, &delta);
            if !field.is_zero(&next) {
                self.entries.insert(row, next);
            }
        }
    }
}

/// Run the reduction for all degrees at once and return the pairs, with
/// zero-persistence pairs (birth and death at the same filtration value)
/// discarded. The pairing at the level of values does not depend on the
/// choice of compatible index order; the deterministic refinement is used.
pub fn persistence_pairs(f: &Filtration, field: FieldSpec) -> Vec<PersistencePair> {
    let index = f.index_refinement();
    let order = index.order();
    let n = order.len();
    let position: BTreeMap<_, _> = order.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();

    let mut cols: Vec<SparseCol> = order
        .iter()
        .map(|s| {
            let mut entries = BTreeMap::new();
            for (omit, face) in s.facets().iter().enumerate() {
                let sign = if omit % 2 == 0 { 1 } else { -1 };
                entries.insert(position[face], field.from_i64(sign));
            }
            SparseCol { entries }
        })
        .collect();

    // pivot_owner[row] = column currently reduced with that low
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    for j in 0..n {
        while let Some(low) = cols[j].low() {
            match pivot_owner[low] {
                None => {
                    pivot_owner[low] = Some(j);
                    break;
                }
                Some(owner) => {
                    let coeff = field.mul(
                        &cols[j].entries[&low],
                        &field.inv(&cols[owner].entries[&low]),
                    );
                    let (a, b) = split_two(&mut cols, j, owner);
                    a.axpy(field, &coeff, b);
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut killed = vec![false; n];
    for (row, owner) in pivot_owner.iter().enumerate() {
        if let Some(j) = *owner {
            killed[row] = true;
            let birth = index.block_of()[row];
            let death = index.block_of()[j];
            if birth != death {
                pairs.push(PersistencePair {
                    degree: order[row].dim(),
                    birth_block: birth,
                    death_block: Some(death),
                });
            }
        }
    }
    for i in 0..n {
        if cols[i].entries.is_empty() && !killed[i] {
            pairs.push(PersistencePair {
                degree: order[i].dim(),
                birth_block: index.block_of()[i],
                death_block: None,
            });
        }
    }
    pairs.sort_by_key(|p| (p.degree, p.birth_block, p.death_block));
    pairs
}

fn split_two<T>(v: &mut [T], a: usize, b: usize) -> (&mut T, &T) {
    assert_ne!(a, b);
    if a < b {
        let (left, right) = v.split_at_mut(a + 1);
        (&mut left[a], &right[b - a - 1])
    } else {
        let (left, right) = v.split_at_mut(a);
        (&mut right[0], &left[b])
    }
}

/// Convert pairs of one degree to diagram points in the half-integer stratum
/// convention: births at vertex `b` (or `-inf` when `b = 1`, since the class
/// already lives on the leftmost unbounded edge), deaths on the open edge
/// entered at `m_d`, essential classes at `+inf`.
pub fn pairs_to_diagram(pairs: &[PersistencePair], degree: usize) -> Diagram {
    let mut d = Diagram::default();
    for p in pairs.iter().filter(|p| p.degree == degree) {
        let birth = if p.birth_block == 1 {
            DiagCoord::NegInf
        } else {
            DiagCoord::Finite(2 * p.birth_block)
        };
        let death = match p.death_block {
            None => DiagCoord::PosInf,
            Some(db) => DiagCoord::Finite(2 * db - 1),
        };
        d.add(birth, death, 1);
    }
    d
}

/// The full cross-check: the diagram of the decomposed filtration cosheaf
/// against the column-reduction diagram, for one degree.
pub fn oracle_matches(f: &Filtration, degree: usize, field: FieldSpec) -> bool {
    let via_cosheaf = diagram(&decompose(&filtration_module(f, degree, field)));
    let via_reduction = pairs_to_diagram(&persistence_pairs(f, field), degree);
    via_cosheaf == via_reduction
}
