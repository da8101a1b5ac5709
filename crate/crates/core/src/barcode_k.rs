//! Interval decomposition of zig-zag modules, persistence diagrams and their
//! group completion, K₀ classes, Euler curves, and injective set-valued
//! modules.
//!
//! Interval multiplicities come from inclusion–exclusion over the rank
//! invariant `r(a,b)` (the rank of the canonical map `lim → colim` over the
//! segment `[a,b]`); `brute_force_decompose` is an independent exhaustive
//! oracle used to validate that formula on small inputs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cosheaf::{GradedZZModule, ZZModule};
use crate::exactlin::{lim_to_colim_rank, FieldSpec, Mat};
use crate::rational::format_rational;
use crate::stratline::{StratifiedLine, StratumId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarcodeError {
    #[error("operands live on different lines")]
    LineMismatch,
    #[error("module too large for exhaustive decomposition (needs F2 and total dim <= {0})")]
    TooLarge(usize),
    #[error("incidence map is not injective: {0}")]
    NonInjectiveMap(String),
    #[error("invalid set module: {0}")]
    InvalidSetModule(String),
}

const BRUTE_FORCE_DIM_CAP: usize = 10;

/// The support of an interval module: a contiguous run of strata carrying
/// one-dimensional spaces with identity internal maps.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Interval {
    pub lo: StratumId,
    pub hi: StratumId,
}

impl Interval {
    pub fn new(lo: StratumId, hi: StratumId) -> Interval {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn contains(&self, s: StratumId) -> bool {
        self.lo <= s && s <= self.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A multiset of intervals over a fixed line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Barcode {
    line: StratifiedLine,
    multiplicities: BTreeMap<Interval, usize>,
}

impl Barcode {
    pub fn empty(line: StratifiedLine) -> Barcode {
        Barcode { line, multiplicities: BTreeMap::new() }
    }

    pub fn line(&self) -> &StratifiedLine {
        &self.line
    }

    pub fn add(&mut self, interval: Interval, mult: usize) {
        if mult > 0 {
            *self.multiplicities.entry(interval).or_insert(0) += mult;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Interval, &usize)> {
        self.multiplicities.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    pub fn total_bars(&self) -> usize {
        self.multiplicities.values().sum()
    }

    /// Number of bars through a stratum; equals the module dimension there.
    pub fn dim_at(&self, s: StratumId) -> usize {
        self.multiplicities
            .iter()
            .filter(|(i, _)| i.contains(s))
            .map(|(_, m)| m)
            .sum()
    }

}

/// The rank invariant over a segment: rank of the canonical composite
/// `lim → node → colim` of the module restricted to the strata in `[a, b]`.
pub fn rank_invariant(m: &ZZModule, a: StratumId, b: StratumId) -> usize {
    assert!(a <= b, "rank_invariant needs a <= b");
    lim_to_colim_rank(&m.segment_diagram(a, b)).expect("a segment is connected")
}

/// All segment ranks at once via a left-to-right sweep.
///
/// For a fixed left end, the sweep carries two subspaces of the current
/// node: `L`, the values realizable by compatible tuples over the prefix,
/// and `N`, the kernel of the node's insertion into the prefix colimit.
/// Forward arrows push both forward as images; backward arrows pull both
/// back as preimages. The rank at the current node is
/// `rank[L | N] - rank N`. Agrees with `rank_invariant` entrywise.
pub fn rank_invariant_table(m: &ZZModule) -> Vec<Vec<usize>> {
    let n = m.line().num_strata();
    let f = m.field();
    let mut table = vec![vec![0usize; n]; n];
    for a in 0..n {
        let dim_a = m.dims()[a];
        let mut l_basis = Mat::identity(f, dim_a);
        let mut n_basis = Mat::zero(f, dim_a, 0);
        table[a][a] = dim_a;
        for t in a..n.saturating_sub(1) {
            let cur = StratumId::from_pos(t);
            let nxt = StratumId::from_pos(t + 1);
            if cur.is_edge() {
                let fwd = m.map(cur, nxt);
                l_basis = fwd.matmul(&l_basis).column_reduced_basis();
                n_basis = fwd.matmul(&n_basis).column_reduced_basis();
            } else {
                let back = m.map(nxt, cur);
                l_basis = preimage(back, &l_basis);
                n_basis = preimage(back, &n_basis);
            }
            table[a][t + 1] = l_basis.hstack(&n_basis).rank() - n_basis.cols();
        }
    }
    table
}

/// `{v : g(v) ∈ span(w)}` as a column-reduced basis.
fn preimage(g: &Mat, w: &Mat) -> Mat {
    let k = g.hstack(w).kernel_basis();
    let top = k.select_rows(&(0..g.cols()).collect::<Vec<_>>());
    top.column_reduced_basis()
}

/// Interval decomposition via rank inclusion–exclusion:
/// `mult[a,b] = r(a,b) − r(a−½,b) − r(a,b+½) + r(a−½,b+½)`,
/// with `r ≡ 0` when an index leaves the line.
pub fn decompose(m: &ZZModule) -> Barcode {
    let n = m.line().num_strata();
    let table = rank_invariant_table(m);
    let r = |a: isize, b: isize| -> i64 {
        if a < 0 || b >= n as isize {
            0
        } else {
            table[a as usize][b as usize] as i64
        }
    };
    let mut barcode = Barcode::empty(m.line().clone());
    for a in 0..n as isize {
        for b in a..n as isize {
            let mult = r(a, b) - r(a - 1, b) - r(a, b + 1) + r(a - 1, b + 1);
            debug_assert!(mult >= 0, "negative interval multiplicity at ({a},{b})");
            if mult > 0 {
                barcode.add(
                    Interval::new(
                        StratumId::from_pos(a as usize),
                        StratumId::from_pos(b as usize),
                    ),
                    mult as usize,
                );
            }
        }
    }
    barcode
}

// --- exhaustive decomposition oracle (F2, small modules) --------------------

/// All nonzero vectors of `F2^d` as single-column matrices.
fn all_vectors_f2(d: usize) -> Vec<Mat> {
    let f = FieldSpec::F2;
    (1..(1usize << d))
        .map(|bits| {
            let mut v = Mat::zero(f, d, 1);
            for i in 0..d {
                if bits >> i & 1 == 1 {
                    v.set(i, 0, f.one());
                }
            }
            v
        })
        .collect()
}

/// Canonical representative of a column span (transpose-RREF-transpose).
fn canonical_span(m: &Mat) -> Mat {
    let (r, pivots) = m.transpose().rref();
    r.select_rows(&(0..pivots.len()).collect::<Vec<_>>()).transpose()
}

/// Every subspace of `F2^d`, as canonical bases, grouped by dimension.
fn all_subspaces_f2(d: usize) -> Vec<Vec<Mat>> {
    let f = FieldSpec::F2;
    let mut by_dim: Vec<Vec<Mat>> = vec![vec![Mat::zero(f, d, 0)]];
    for dim in 1..=d {
        let mut seen: Vec<Mat> = Vec::new();
        for smaller in &by_dim[dim - 1] {
            for v in all_vectors_f2(d) {
                let grown = canonical_span(&smaller.hstack(&v));
                if grown.cols() == dim && !seen.contains(&grown) {
                    seen.push(grown);
                }
            }
        }
        by_dim.push(seen);
    }
    by_dim
}

fn in_span(space: &Mat, v: &Mat) -> bool {
    space.solve(v).is_some()
}

/// Enumerate the generator tuples of interval submodules supported on
/// `[lo, hi]`: one nonzero vector per stratum, compatible with the internal
/// maps and killed by the maps exiting the interval.
fn interval_generators(m: &ZZModule, lo: usize, hi: usize) -> Vec<Vec<Mat>> {
    let line = m.line();
    let mut partial: Vec<Vec<Mat>> = vec![Vec::new()];
    for pos in lo..=hi {
        let s = StratumId::from_pos(pos);
        let mut next: Vec<Vec<Mat>> = Vec::new();
        if s.is_vertex() && pos > lo {
            // determined by the edge to the left
            let e = StratumId::from_pos(pos - 1);
            let map = m.map(e, s);
            for tuple in &partial {
                let x = map.matmul(tuple.last().unwrap());
                if !x.is_zero_matrix() {
                    let mut t = tuple.clone();
                    t.push(x);
                    next.push(t);
                }
            }
        } else if s.is_vertex() {
            for v in all_vectors_f2(m.dims()[pos]) {
                next.push(vec![v]);
            }
        } else {
            // an edge: enumerate, checking its exit/entry constraints
            let left_v = s.left();
            let right_v = if line.contains(s.right()) { Some(s.right()) } else { None };
            for tuple in &partial {
                'vectors: for x in all_vectors_f2(m.dims()[pos]) {
                    if let Some(lv) = left_v {
                        let img = m.map(s, lv).matmul(&x);
                        if lv.pos() >= lo && pos > lo {
                            if img != *tuple.last().unwrap() {
                                continue 'vectors;
                            }
                        } else if lv.pos() < lo && !img.is_zero_matrix() {
                            continue 'vectors;
                        }
                    }
                    if pos == hi {
                        if let Some(rv) = right_v {
                            if !m.map(s, rv).matmul(&x).is_zero_matrix() {
                                continue 'vectors;
                            }
                        }
                    }
                    let mut t = tuple.clone();
                    t.push(x);
                    next.push(t);
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            break;
        }
    }
    if partial.is_empty() { Vec::new() } else { partial }
}

/// Search for a complement of the interval submodule generated by `gens`
/// over `[lo, hi]`: a tuple of subspaces, full outside the interval, of
/// codimension one and missing the generator inside, closed under all maps.
fn find_complement(
    m: &ZZModule,
    lo: usize,
    hi: usize,
    gens: &[Mat],
    subspaces: &[Vec<Vec<Mat>>],
) -> Option<Vec<Mat>> {
    let f = m.field();
    let n = m.line().num_strata();
    let full: Vec<Mat> = (0..n).map(|p| Mat::identity(f, m.dims()[p])).collect();

    // candidate subspaces per position
    let candidates: Vec<Vec<Mat>> = (0..n)
        .map(|p| {
            if p < lo || p > hi {
                vec![full[p].clone()]
            } else {
                let d = m.dims()[p];
                subspaces[p][d - 1]
                    .iter()
                    .filter(|s| !in_span(s, &gens[p - lo]))
                    .cloned()
                    .collect()
            }
        })
        .collect();

    fn closed_under(m: &ZZModule, e: StratumId, v: StratumId, pe: &Mat, pv: &Mat) -> bool {
        let image = m.map(e, v).matmul(pe);
        (0..image.cols()).all(|j| in_span(pv, &image.column(j)))
    }

    // depth-first over positions with incremental incidence checks
    fn dfs(
        m: &ZZModule,
        candidates: &[Vec<Mat>],
        chosen: &mut Vec<Mat>,
        pos: usize,
    ) -> bool {
        let n = m.line().num_strata();
        if pos == n {
            return true;
        }
        let s = StratumId::from_pos(pos);
        'cand: for c in &candidates[pos] {
            if pos > 0 {
                let prev = StratumId::from_pos(pos - 1);
                let ok = if s.is_vertex() {
                    closed_under(m, prev, s, &chosen[pos - 1], c)
                } else {
                    closed_under(m, s, prev, c, &chosen[pos - 1])
                };
                if !ok {
                    continue 'cand;
                }
            }
            chosen.push(c.clone());
            if dfs(m, candidates, chosen, pos + 1) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    let mut chosen: Vec<Mat> = Vec::new();
    if dfs(m, &candidates, &mut chosen, 0) {
        Some(chosen)
    } else {
        None
    }
}

/// Restrict the module to a tuple of invariant subspaces.
fn restrict_to(m: &ZZModule, spaces: &[Mat]) -> ZZModule {
    let f = m.field();
    let dims: Vec<usize> = spaces.iter().map(|s| s.cols()).collect();
    let mut maps = BTreeMap::new();
    for (&(e, v), map) in m.maps() {
        let image = map.matmul(&spaces[e.pos()]);
        let coords = spaces[v.pos()]
            .solve(&image)
            .expect("restriction needs invariant subspaces");
        maps.insert((e, v), coords);
    }
    ZZModule::new(m.line().clone(), f, dims, maps).unwrap()
}

/// Exhaustive interval decomposition over `F2` for small modules: peel off
/// interval direct summands by enumerating generator tuples and complement
/// subspace tuples. Independent of `decompose` and of the rank invariant.
pub fn brute_force_decompose(m: &ZZModule) -> Result<Barcode, BarcodeError> {
    if m.field() != FieldSpec::F2 || m.total_dim() > BRUTE_FORCE_DIM_CAP {
        return Err(BarcodeError::TooLarge(BRUTE_FORCE_DIM_CAP));
    }
    let mut barcode = Barcode::empty(m.line().clone());
    let mut current = m.clone();
    'peel: while current.total_dim() > 0 {
        let n = current.line().num_strata();
        // dimensions shrink as summands peel off; rebuild the subspace pool
        let subspaces: Vec<Vec<Vec<Mat>>> =
            current.dims().iter().map(|&d| all_subspaces_f2(d)).collect();
        for lo in 0..n {
            for hi in lo..n {
                if (lo..=hi).any(|p| current.dims()[p] == 0) {
                    continue;
                }
                for gens in interval_generators(&current, lo, hi) {
                    if let Some(complement) = find_complement(&current, lo, hi, &gens, &subspaces) {
                        barcode.add(
                            Interval::new(StratumId::from_pos(lo), StratumId::from_pos(hi)),
                            1,
                        );
                        current = restrict_to(&current, &complement);
                        continue 'peel;
                    }
                }
            }
        }
        unreachable!("a nonzero zig-zag module always has an interval summand");
    }
    Ok(barcode)
}

// --- diagrams ---------------------------------------------------------------

/// A diagram coordinate: a half-integer stratum index, or ±∞ for features
/// supported out to an unbounded edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum DiagCoord {
    NegInf,
    /// Doubled half-integer stratum index (`Finite(3)` is `3/2`).
    Finite(usize),
    PosInf,
}

impl std::fmt::Display for DiagCoord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DiagCoord::NegInf => write!(f, "-inf"),
            DiagCoord::PosInf => write!(f, "inf"),
            DiagCoord::Finite(twice) => write!(f, "{}", StratumId::from_twice(*twice)),
        }
    }
}

/// A persistence diagram: a finite multiset of (birth, death) points.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Diagram {
    points: BTreeMap<(DiagCoord, DiagCoord), usize>,
}

impl Diagram {
    pub fn add(&mut self, birth: DiagCoord, death: DiagCoord, mult: usize) {
        assert!(birth <= death, "birth must not exceed death");
        if mult > 0 {
            *self.points.entry((birth, death)).or_insert(0) += mult;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(DiagCoord, DiagCoord), &usize)> {
        self.points.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn union(&self, other: &Diagram) -> Diagram {
        let mut out = self.clone();
        for (&p, &m) in other.iter() {
            *out.points.entry(p).or_insert(0) += m;
        }
        out
    }
}

/// Convert a barcode to a diagram: interval endpoints become (birth, death)
/// with the unbounded edges mapped to ∓∞. Point intervals land on the
/// diagonal.
pub fn diagram(b: &Barcode) -> Diagram {
    let leftmost = b.line().leftmost_edge();
    let rightmost = b.line().rightmost_edge();
    let mut d = Diagram::default();
    for (interval, &mult) in b.iter() {
        let birth = if interval.lo == leftmost {
            DiagCoord::NegInf
        } else {
            DiagCoord::Finite(interval.lo.twice())
        };
        let death = if interval.hi == rightmost {
            DiagCoord::PosInf
        } else {
            DiagCoord::Finite(interval.hi.twice())
        };
        d.add(birth, death, mult);
    }
    d
}

/// A ℤ-weighted diagram: an element of the group completion of the diagram
/// monoid. Only nonzero weights are stored, so equality is structural.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct VirtualDiagram {
    weights: BTreeMap<(DiagCoord, DiagCoord), i64>,
}

impl VirtualDiagram {
    pub fn add(&mut self, point: (DiagCoord, DiagCoord), weight: i64) {
        let entry = self.weights.entry(point).or_insert(0);
        *entry += weight;
        if *entry == 0 {
            self.weights.remove(&point);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(DiagCoord, DiagCoord), &i64)> {
        self.weights.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// The homomorphism to virtual diagrams: the diagram of `pos` minus the
/// diagram of `neg`. Well-defined on K₀ classes of the formal difference.
pub fn delta_hom(pos: &ZZModule, neg: &ZZModule) -> Result<VirtualDiagram, BarcodeError> {
    if pos.line() != neg.line() {
        return Err(BarcodeError::LineMismatch);
    }
    let mut out = VirtualDiagram::default();
    for (&p, &m) in diagram(&decompose(pos)).iter() {
        out.add(p, m as i64);
    }
    for (&p, &m) in diagram(&decompose(neg)).iter() {
        out.add(p, -(m as i64));
    }
    Ok(out)
}

// --- K0 classes and Euler curves ---------------------------------------------

/// An element of the free abelian group on the strata of a fixed line; also
/// the value table of a constructible function on the line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct K0Class {
    line: StratifiedLine,
    coeffs: Vec<i64>,
}

impl K0Class {
    pub fn zero(line: StratifiedLine) -> K0Class {
        let coeffs = vec![0; line.num_strata()];
        K0Class { line, coeffs }
    }

    pub fn line(&self) -> &StratifiedLine {
        &self.line
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn coeff(&self, s: StratumId) -> i64 {
        self.coeffs[s.pos()]
    }

    pub fn plus(&self, other: &K0Class) -> K0Class {
        assert_eq!(self.line, other.line, "K0 classes on different lines");
        K0Class {
            line: self.line.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn negate(&self) -> K0Class {
        K0Class { line: self.line.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// The K₀ class of a module: its dimension vector. K₀ of the module
/// category is free abelian on the strata, and the class of a cosheaf
/// depends only on its costalk dimensions.
pub fn k0_class(m: &ZZModule) -> K0Class {
    K0Class { line: m.line().clone(), coeffs: m.dims().iter().map(|&d| d as i64).collect() }
}

/// The K₀ class of a barcode: multiplicity-weighted indicator vectors of the
/// interval supports. Equals `k0_class` of any module with that barcode.
pub fn k0_of_barcode(b: &Barcode) -> K0Class {
    let mut out = K0Class::zero(b.line().clone());
    for (interval, &mult) in b.iter() {
        for pos in interval.lo.pos()..=interval.hi.pos() {
            out.coeffs[pos] += mult as i64;
        }
    }
    out
}

/// The Euler curve of a graded module: the alternating sum of costalk ranks,
/// sampled per stratum.
pub fn euler_curve(g: &GradedZZModule) -> K0Class {
    let mut out = K0Class::zero(g.line().clone());
    for (degree, m) in g.components() {
        for (pos, &d) in m.dims().iter().enumerate() {
            out.coeffs[pos] += if degree % 2 == 0 { d as i64 } else { -(d as i64) };
        }
    }
    out
}

/// The Euler class: the alternating sum of the K₀ classes of the graded
/// pieces. Coincides with the Euler curve coefficientwise.
pub fn euler_class(g: &GradedZZModule) -> K0Class {
    let mut out = K0Class::zero(g.line().clone());
    for (degree, m) in g.components() {
        let k = k0_class(m);
        out = out.plus(&if degree % 2 == 0 { k } else { k.negate() });
    }
    out
}

// --- injective set-valued modules --------------------------------------------

/// A set-valued zig-zag module: a finite labelled set per stratum and an
/// injective function per edge→vertex incidence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SetZZModule {
    line: StratifiedLine,
    /// Element labels per stratum position.
    sets: Vec<Vec<String>>,
    /// For each incidence, the image index of each edge element.
    maps: BTreeMap<(StratumId, StratumId), Vec<usize>>,
}

impl SetZZModule {
    pub fn new(
        line: StratifiedLine,
        sets: Vec<Vec<String>>,
        maps: BTreeMap<(StratumId, StratumId), Vec<usize>>,
    ) -> Result<SetZZModule, BarcodeError> {
        if sets.len() != line.num_strata() {
            return Err(BarcodeError::InvalidSetModule("one set per stratum required".into()));
        }
        for s in &sets {
            let mut sorted = s.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(BarcodeError::InvalidSetModule("duplicate element label".into()));
            }
        }
        for e in line.edges() {
            for v in line.incidences(e).unwrap() {
                let f = maps
                    .get(&(e, v))
                    .ok_or_else(|| BarcodeError::InvalidSetModule(format!("missing map ({e}, {v})")))?;
                if f.len() != sets[e.pos()].len() {
                    return Err(BarcodeError::InvalidSetModule(format!(
                        "map ({e}, {v}) must be defined on every edge element"
                    )));
                }
                if f.iter().any(|&i| i >= sets[v.pos()].len()) {
                    return Err(BarcodeError::InvalidSetModule(format!(
                        "map ({e}, {v}) hits a missing element"
                    )));
                }
            }
        }
        Ok(SetZZModule { line, sets, maps })
    }

    pub fn line(&self) -> &StratifiedLine {
        &self.line
    }

    pub fn sets(&self) -> &[Vec<String>] {
        &self.sets
    }

    pub fn card(&self, s: StratumId) -> usize {
        self.sets[s.pos()].len()
    }

    fn check_injective(&self) -> Result<(), BarcodeError> {
        for (&(e, v), f) in &self.maps {
            let mut seen = vec![false; self.sets[v.pos()].len()];
            for &i in f {
                if seen[i] {
                    return Err(BarcodeError::NonInjectiveMap(format!("({e}, {v})")));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }

    /// Connected components of the element graph, each as a list of
    /// (stratum, element index) sorted by stratum.
    pub fn trajectory_components(&self) -> Result<Vec<Vec<(StratumId, usize)>>, BarcodeError> {
        self.check_injective()?;
        // global node numbering
        let mut offset = vec![0usize; self.sets.len() + 1];
        for (i, s) in self.sets.iter().enumerate() {
            offset[i + 1] = offset[i] + s.len();
        }
        let total = offset[self.sets.len()];
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for (&(e, v), f) in &self.maps {
            for (i, &img) in f.iter().enumerate() {
                let a = find(&mut parent, offset[e.pos()] + i);
                let b = find(&mut parent, offset[v.pos()] + img);
                parent[a] = b;
            }
        }
        let mut comps: BTreeMap<usize, Vec<(StratumId, usize)>> = BTreeMap::new();
        for pos in 0..self.sets.len() {
            for i in 0..self.sets[pos].len() {
                let root = find(&mut parent, offset[pos] + i);
                comps.entry(root).or_default().push((StratumId::from_pos(pos), i));
            }
        }
        Ok(comps.into_values().collect())
    }
}

/// Decompose an injective set module into its trajectories; injectivity
/// forces every component to be an interval with one element per stratum.
pub fn set_decompose(s: &SetZZModule) -> Result<Barcode, BarcodeError> {
    let mut barcode = Barcode::empty(s.line().clone());
    for comp in s.trajectory_components()? {
        let lo = comp.first().unwrap().0;
        let hi = comp.last().unwrap().0;
        debug_assert_eq!(
            comp.len(),
            hi.pos() - lo.pos() + 1,
            "injectivity must force one element per stratum"
        );
        barcode.add(Interval::new(lo, hi), 1);
    }
    Ok(barcode)
}

/// The K₀ class of a set module: stratumwise cardinalities.
pub fn set_k0(s: &SetZZModule) -> K0Class {
    K0Class {
        line: s.line().clone(),
        coeffs: (0..s.line().num_strata()).map(|p| s.sets()[p].len() as i64).collect(),
    }
}

// --- JSON wire formats --------------------------------------------------------

/// How diagram/K₀ coordinates are labelled in output.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CoordMode {
    /// Half-integer stratum indices.
    Strata,
    /// Filtration values; edge-supported endpoints get interval midpoints
    /// and are flagged approximate.
    Values,
}

/// Label a diagram coordinate in the requested mode. Returns the label and
/// whether it is approximate (an edge midpoint in value mode).
pub fn coord_label(c: DiagCoord, mode: CoordMode, line: &StratifiedLine) -> (String, bool) {
    match (c, mode) {
        (DiagCoord::NegInf, _) => ("-inf".into(), false),
        (DiagCoord::PosInf, _) => ("inf".into(), false),
        (DiagCoord::Finite(twice), CoordMode::Strata) => {
            (StratumId::from_twice(twice).to_string(), false)
        }
        (DiagCoord::Finite(twice), CoordMode::Values) => {
            let s = StratumId::from_twice(twice);
            if let Some(c) = line.coord(s) {
                (format_rational(c), false)
            } else {
                // interior edge: midpoint of the bounding values
                let j = s.edge_index().unwrap();
                let mid = (&line.vertex_coords()[j - 1] + &line.vertex_coords()[j])
                    / crate::rational::int(2);
                (format_rational(&mid), true)
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct DiagramEntryWire {
    birth: String,
    death: String,
    mult: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    approx: bool,
}

fn point_entry(
    p: (DiagCoord, DiagCoord),
    mult: i64,
    degree: Option<usize>,
    mode: CoordMode,
    line: &StratifiedLine,
) -> serde_json::Value {
    let (birth, ba) = coord_label(p.0, mode, line);
    let (death, da) = coord_label(p.1, mode, line);
    serde_json::to_value(DiagramEntryWire { birth, death, mult, degree, approx: ba || da })
        .unwrap()
}

/// Diagram JSON entries, deterministically ordered.
pub fn diagram_json(
    d: &Diagram,
    degree: Option<usize>,
    mode: CoordMode,
    line: &StratifiedLine,
) -> Vec<serde_json::Value> {
    d.iter().map(|(&p, &m)| point_entry(p, m as i64, degree, mode, line)).collect()
}

/// Virtual diagram JSON entries (signed multiplicities).
pub fn virtual_diagram_json(
    d: &VirtualDiagram,
    mode: CoordMode,
    line: &StratifiedLine,
) -> Vec<serde_json::Value> {
    d.iter().map(|(&p, &w)| point_entry(p, w, None, mode, line)).collect()
}

/// Barcode JSON entries.
pub fn barcode_json(b: &Barcode, degree: Option<usize>) -> Vec<serde_json::Value> {
    b.iter()
        .map(|(i, &m)| {
            let mut v = serde_json::json!({
                "lo": i.lo.to_string(),
                "hi": i.hi.to_string(),
                "mult": m,
            });
            if let Some(d) = degree {
                v["degree"] = serde_json::json!(d);
            }
            v
        })
        .collect()
}

/// K₀ vector JSON: strata labels and integer coefficients.
pub fn k0_json(k: &K0Class) -> serde_json::Value {
    serde_json::json!({
        "vertices": k.line().vertex_labels(),
        "strata": k.line().labels(),
        "coeffs": k.coeffs(),
    })
}

#[derive(Serialize, Deserialize)]
struct SetMapWire {
    edge: String,
    to: String,
    pairs: Vec<(String, String)>,
}

#[derive(Serialize, Deserialize)]
struct SetModuleWire {
    vertices: Vec<String>,
    sets: Vec<Vec<String>>,
    maps: Vec<SetMapWire>,
}

impl SetZZModule {
    pub fn to_json_value(&self) -> serde_json::Value {
        let maps = self
            .maps
            .iter()
            .map(|(&(e, v), f)| SetMapWire {
                edge: e.to_string(),
                to: v.to_string(),
                pairs: f
                    .iter()
                    .enumerate()
                    .map(|(i, &img)| {
                        (self.sets[e.pos()][i].clone(), self.sets[v.pos()][img].clone())
                    })
                    .collect(),
            })
            .collect::<Vec<_>>();
        serde_json::to_value(SetModuleWire {
            vertices: self.line.vertex_labels(),
            sets: self.sets.clone(),
            maps,
        })
        .unwrap()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<SetZZModule, BarcodeError> {
        let wire: SetModuleWire = serde_json::from_value(v.clone())
            .map_err(|e| BarcodeError::InvalidSetModule(e.to_string()))?;
        let line = StratifiedLine::from_vertex_labels(&wire.vertices)
            .map_err(|e| BarcodeError::InvalidSetModule(e.to_string()))?;
        if wire.sets.len() != line.num_strata() {
            return Err(BarcodeError::InvalidSetModule("one set per stratum required".into()));
        }
        let index_of = |pos: usize, label: &str| -> Result<usize, BarcodeError> {
            wire.sets[pos]
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| BarcodeError::InvalidSetModule(format!("unknown element '{label}'")))
        };
        let mut maps = BTreeMap::new();
        for entry in &wire.maps {
            let e = StratumId::parse(&entry.edge)
                .map_err(|e| BarcodeError::InvalidSetModule(e.to_string()))?;
            let to = StratumId::parse(&entry.to)
                .map_err(|e| BarcodeError::InvalidSetModule(e.to_string()))?;
            let mut f = vec![None; wire.sets.get(e.pos()).map_or(0, |s| s.len())];
            for (src, dst) in &entry.pairs {
                let i = index_of(e.pos(), src)?;
                let j = index_of(to.pos(), dst)?;
                f[i] = Some(j);
            }
            let f = f
                .into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    BarcodeError::InvalidSetModule(format!("map ({e}, {to}) is not total"))
                })?;
            maps.insert((e, to), f);
        }
        SetZZModule::new(line, wire.sets, maps)
    }
}
