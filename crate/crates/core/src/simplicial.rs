//! Simplicial complexes, monotone and index filtrations, and homology over a
//! field with induced maps.
//!
//! The augmented ranks `aug_rank_monotone` / `aug_rank_index` count the
//! instantaneous events of a filtration step by two different formulas — a
//! boundary-space quotient and a per-index-step kernel count — which must
//! agree; keeping both routes genuinely separate is the point.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use thiserror::Error;

use crate::exactlin::{quotient_dim, Echelon, FieldSpec, Mat};
use crate::rational::{format_rational, parse_rational};

/// Highest simplex dimension accepted from input files.
pub const MAX_SIMPLEX_DIM: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("filter is not monotone: face {face} has value above its coface {coface}")]
    NonMonotoneFilter { face: String, coface: String },
    #[error("face {face} of simplex {simplex} is missing")]
    MissingFace { simplex: String, face: String },
    #[error("simplex {0} appears more than once")]
    DuplicateSimplex(String),
    #[error("a filtration needs at least one simplex")]
    EmptyFiltration,
    #[error("index filtration is not compatible: {0}")]
    IncompatibleIndexFiltration(String),
    #[error("repeated vertex in simplex")]
    RepeatedVertex,
}

/// A parse failure in the filtration text format, with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FiltrationParseError {
    pub line: usize,
    pub message: String,
}

/// A simplex as a sorted tuple of distinct vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Simplex(Vec<u32>);

impl Simplex {
    pub fn new(mut vertices: Vec<u32>) -> Result<Simplex, SimplicialError> {
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) || vertices.is_empty() {
            return Err(SimplicialError::RepeatedVertex);
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces in the order of the omitted vertex.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }
}

impl std::fmt::Display for Simplex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}]",
            self.0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        )
    }
}

/// A finite simplicial complex, closed under taking faces.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SComplex {
    simplices: BTreeSet<Simplex>,
}

impl SComplex {
    pub fn empty() -> SComplex {
        SComplex::default()
    }

    /// Build from an explicit simplex set; every face must be present.
    pub fn new<I: IntoIterator<Item = Simplex>>(simplices: I) -> Result<SComplex, SimplicialError> {
        let set: BTreeSet<Simplex> = simplices.into_iter().collect();
        for s in &set {
            for f in s.facets() {
                if !set.contains(&f) {
                    return Err(SimplicialError::MissingFace {
                        simplex: s.to_string(),
                        face: f.to_string(),
                    });
                }
            }
        }
        Ok(SComplex { simplices: set })
    }

    /// Build the closure of a simplex set under taking faces.
    pub fn closure<I: IntoIterator<Item = Simplex>>(simplices: I) -> SComplex {
        let mut set: BTreeSet<Simplex> = BTreeSet::new();
        let mut stack: Vec<Simplex> = simplices.into_iter().collect();
        while let Some(s) = stack.pop() {
            if set.insert(s.clone()) {
                stack.extend(s.facets());
            }
        }
        SComplex { simplices: set }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.simplices.iter()
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().map(|s| s.dim()).max()
    }

    /// The `n`-simplices in lexicographic vertex order.
    pub fn of_dim(&self, n: usize) -> Vec<&Simplex> {
        self.simplices.iter().filter(|s| s.dim() == n).collect()
    }

    /// Alternating simplex count.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .map(|s| if s.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

/// A monotone sublevel filtration: a face-monotone rational filter on a
/// complex, together with its distinct sublevel values `m_1 < ... < m_p`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Filtration {
    complex: SComplex,
    filter: BTreeMap<Simplex, BigRational>,
    values: Vec<BigRational>,
}

impl Filtration {
    /// Build from (simplex, value) pairs. Faces must be present with values
    /// no larger than their cofaces.
    pub fn sublevel_filtration(
        pairs: Vec<(Simplex, BigRational)>,
    ) -> Result<Filtration, SimplicialError> {
        if pairs.is_empty() {
            return Err(SimplicialError::EmptyFiltration);
        }
        let mut filter: BTreeMap<Simplex, BigRational> = BTreeMap::new();
        for (s, v) in pairs {
            if filter.insert(s.clone(), v).is_some() {
                return Err(SimplicialError::DuplicateSimplex(s.to_string()));
            }
        }
        let complex = SComplex::new(filter.keys().cloned())?;
        for (s, v) in &filter {
            for f in s.facets() {
                if filter[&f] > *v {
                    return Err(SimplicialError::NonMonotoneFilter {
                        face: f.to_string(),
                        coface: s.to_string(),
                    });
                }
            }
        }
        let mut values: Vec<BigRational> = filter.values().cloned().collect();
        values.sort();
        values.dedup();
        Ok(Filtration { complex, filter, values })
    }

    pub fn complex(&self) -> &SComplex {
        &self.complex
    }

    /// Number of filtration steps `p`.
    pub fn p(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn filter_value(&self, s: &Simplex) -> &BigRational {
        &self.filter[s]
    }

    /// The 1-based step index of a simplex (`block_of`): `j` with
    /// `f(σ) = m_j`.
    pub fn block_index(&self, s: &Simplex) -> usize {
        self.values.binary_search(&self.filter[s]).unwrap() + 1
    }

    /// The sublevel complex at step `j` (1-based); `j = 0` is empty.
    pub fn sublevel(&self, j: usize) -> SComplex {
        if j == 0 {
            return SComplex::empty();
        }
        let cut = &self.values[j - 1];
        SComplex {
            simplices: self
                .filter
                .iter()
                .filter(|(_, v)| *v <= cut)
                .map(|(s, _)| s.clone())
                .collect(),
        }
    }

    /// The deterministic index refinement: simplices ordered by
    /// (filter value, dimension, lexicographic vertex tuple).
    pub fn index_refinement(&self) -> IndexFiltration {
        let mut order: Vec<Simplex> = self.complex.iter().cloned().collect();
        order.sort_by(|a, b| {
            (self.filter_value(a), a.dim(), a.vertices())
                .cmp(&(self.filter_value(b), b.dim(), b.vertices()))
        });
        let block_of = order.iter().map(|s| self.block_index(s)).collect();
        IndexFiltration { order, block_of }
    }
}

/// A one-simplex-at-a-time refinement compatible with a monotone filtration:
/// faces precede cofaces and filter values weakly increase along the order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IndexFiltration {
    order: Vec<Simplex>,
    /// 1-based monotone step realized by each index step.
    block_of: Vec<usize>,
}

impl IndexFiltration {
    /// Wrap an explicit order, checking compatibility with the filtration.
    pub fn new(f: &Filtration, order: Vec<Simplex>) -> Result<IndexFiltration, SimplicialError> {
        let err = |m: &str| SimplicialError::IncompatibleIndexFiltration(m.to_string());
        if order.len() != f.complex().len() {
            return Err(err("order must list every simplex exactly once"));
        }
        let mut seen: BTreeSet<&Simplex> = BTreeSet::new();
        for s in &order {
            if !f.complex().contains(s) {
                return Err(err("order contains a simplex outside the complex"));
            }
            if !seen.insert(s) {
                return Err(err("order repeats a simplex"));
            }
            for face in s.facets() {
                if !seen.contains(&face) {
                    return Err(err("a face appears after its coface"));
                }
            }
        }
        for w in order.windows(2) {
            if f.filter_value(&w[0]) > f.filter_value(&w[1]) {
                return Err(err("filter values must weakly increase along the order"));
            }
        }
        let block_of = order.iter().map(|s| f.block_index(s)).collect();
        Ok(IndexFiltration { order, block_of })
    }

    /// Number of index steps `n`.
    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[Simplex] {
        &self.order
    }

    pub fn block_of(&self) -> &[usize] {
        &self.block_of
    }

    /// The first `i` simplices as a complex (1-based; `i = 0` is empty).
    pub fn prefix(&self, i: usize) -> SComplex {
        SComplex { simplices: self.order[..i].iter().cloned().collect() }
    }

    /// 1-based index range `[lo, hi]` of the steps realizing block `j`.
    pub fn block_range(&self, j: usize) -> Option<(usize, usize)> {
        let lo = self.block_of.iter().position(|&b| b == j)? + 1;
        let hi = self.block_of.iter().rposition(|&b| b == j)? + 1;
        Some((lo, hi))
    }

    /// View the refinement as a monotone filtration in its own right, with
    /// values `1..n`.
    pub fn as_filtration(&self) -> Filtration {
        let pairs = self
            .order
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), crate::rational::int(i as i64 + 1)))
            .collect();
        Filtration::sublevel_filtration(pairs).expect("an index order is a monotone filter")
    }
}

/// The matrix of `∂_n` from `n`-chains to `(n-1)`-chains, with rows and
/// columns in lexicographic simplex order and signs reduced into the field.
/// Degree zero has no target (unreduced chains), so the matrix has no rows.
pub fn boundary_matrix(k: &SComplex, n: usize, field: FieldSpec) -> Mat {
    let cols_ix = k.of_dim(n);
    if n == 0 {
        return Mat::zero(field, 0, cols_ix.len());
    }
    let rows_ix = k.of_dim(n - 1);
    let row_pos: BTreeMap<&Simplex, usize> =
        rows_ix.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut m = Mat::zero(field, rows_ix.len(), cols_ix.len());
    for (j, s) in cols_ix.iter().enumerate() {
        for (omit, face) in s.facets().iter().enumerate() {
            let i = row_pos[face];
            let sign = if omit % 2 == 0 { 1 } else { -1 };
            m.set(i, j, field.from_i64(sign));
        }
    }
    m
}

/// A basis of `H_n`: cycle representatives as chain columns, picked
/// deterministically from the kernel basis reduced against boundaries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HomBasis {
    pub degree: usize,
    pub dim: usize,
    /// Columns are cycles in the lexicographic `n`-chain coordinates.
    pub cycle_reps: Mat,
}

pub fn homology_basis(k: &SComplex, n: usize, field: FieldSpec) -> HomBasis {
    let d_n = boundary_matrix(k, n, field);
    let d_np1 = boundary_matrix(k, n + 1, field);
    let cycles = d_n.kernel_basis();
    let chain_dim = d_n.cols();
    let mut ech = Echelon::from_columns(&d_np1);
    let mut reps = Mat::zero(field, chain_dim, 0);
    for c in 0..cycles.cols() {
        let col: Vec<_> = (0..chain_dim).map(|i| cycles.get(i, c).clone()).collect();
        if ech.insert(field, col) {
            reps = reps.hstack(&cycles.column(c));
        }
    }
    HomBasis { degree: n, dim: reps.cols(), cycle_reps: reps }
}

/// The 0/1 matrix embedding the `n`-chains of a subcomplex into those of a
/// bigger complex.
pub fn chain_embedding(sub: &SComplex, sup: &SComplex, n: usize, field: FieldSpec) -> Mat {
    let sub_ix = sub.of_dim(n);
    let sup_ix = sup.of_dim(n);
    let sup_pos: BTreeMap<&Simplex, usize> =
        sup_ix.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut m = Mat::zero(field, sup_ix.len(), sub_ix.len());
    for (j, s) in sub_ix.iter().enumerate() {
        let i = *sup_pos.get(s).expect("sub must be a subcomplex");
        m.set(i, j, field.one());
    }
    m
}

/// Matrix of `H_n(sub) → H_n(sup)` induced by an inclusion, in the
/// deterministic bases of `homology_basis`. The matrix is independent of the
/// solver's choices: homology coordinates modulo boundaries are unique.
pub fn induced_map_between(sub: &SComplex, sup: &SComplex, n: usize, field: FieldSpec) -> Mat {
    let hs = homology_basis(sub, n, field);
    let ht = homology_basis(sup, n, field);
    let embedded = chain_embedding(sub, sup, n, field).matmul(&hs.cycle_reps);
    let bnd = boundary_matrix(sup, n + 1, field);
    let sol = ht
        .cycle_reps
        .hstack(&bnd)
        .solve(&embedded)
        .expect("a cycle of the subcomplex stays a cycle");
    sol.select_rows(&(0..ht.dim).collect::<Vec<_>>())
}

/// Matrix of `H_n(K_{m_i}) → H_n(K_{m_j})` for sublevel indices `i <= j`.
pub fn induced_map(f: &Filtration, i: usize, j: usize, n: usize, field: FieldSpec) -> Mat {
    assert!(i <= j && j <= f.p(), "need sublevel indices i <= j <= p");
    induced_map_between(&f.sublevel(i), &f.sublevel(j), n, field)
}

/// `dim κ_{m_{j-1}}`: kernel of the step `H_n(K_{m_{j-1}}) → H_n(K_{m_j})`.
pub fn kernel_of_step(f: &Filtration, j: usize, n: usize, field: FieldSpec) -> usize {
    assert!(j >= 1 && j <= f.p());
    let m = induced_map(f, j - 1, j, n, field);
    m.cols() - m.rank()
}

/// Augmented rank at step `j` by the boundary-space formula: the dimension
/// of the new `n`-boundaries of `K_{m_j}` modulo the old boundaries together
/// with chain representatives of the cycles that die entering `K_{m_j}`.
pub fn aug_rank_monotone(f: &Filtration, j: usize, n: usize, field: FieldSpec) -> usize {
    assert!(j >= 1 && j <= f.p());
    let kj = f.sublevel(j);
    let kjm = f.sublevel(j - 1);
    let ambient = boundary_matrix(&kj, n + 1, field);
    let embed = chain_embedding(&kjm, &kj, n, field);
    let prev_boundaries = embed.matmul(&boundary_matrix(&kjm, n + 1, field));
    let hs = homology_basis(&kjm, n, field);
    let step = induced_map_between(&kjm, &kj, n, field);
    let dying = hs.cycle_reps.matmul(&step.kernel_basis());
    let sub = prev_boundaries.hstack(&embed.matmul(&dying));
    quotient_dim(&ambient, &sub).expect("dying cycles become boundaries")
}

/// Augmented rank at step `j` by the index-filtration formula: the number of
/// index steps inside block `j` that kill an `n`-cycle, minus the kernel of
/// the composite map across the whole block.
pub fn aug_rank_index(
    f: &Filtration,
    index: &IndexFiltration,
    j: usize,
    n: usize,
    field: FieldSpec,
) -> Result<usize, SimplicialError> {
    // Cheap compatibility re-check: same simplex count and matching blocks.
    if index.n() != f.complex().len() {
        return Err(SimplicialError::IncompatibleIndexFiltration(
            "index filtration is for a different complex".into(),
        ));
    }
    for (s, &b) in index.order().iter().zip(index.block_of()) {
        if !f.complex().contains(s) || f.block_index(s) != b {
            return Err(SimplicialError::IncompatibleIndexFiltration(
                "index order does not realize the filtration's blocks".into(),
            ));
        }
    }
    let (lo, hi) = index
        .block_range(j)
        .ok_or_else(|| SimplicialError::IncompatibleIndexFiltration(format!("no block {j}")))?;
    let mut kappa_total = 0;
    let start_dim = homology_basis(&index.prefix(lo - 1), n, field).dim;
    let mut composite = Mat::identity(field, start_dim);
    for i in lo..=hi {
        let step = induced_map_between(&index.prefix(i - 1), &index.prefix(i), n, field);
        kappa_total += step.cols() - step.rank();
        composite = step.matmul(&composite);
    }
    Ok(kappa_total - (composite.cols() - composite.rank()))
}

/// Parse the filtration text format: one `v0 v1 ... vk ; value` per line,
/// `#` comments, exact rational values.
pub fn parse_filtration_text(
    text: &str,
) -> Result<Vec<(Simplex, BigRational)>, FiltrationParseError> {
    let mut pairs = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let err = |message: String| FiltrationParseError { line, message };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut halves = content.splitn(2, ';');
        let verts_part = halves.next().unwrap();
        let value_part = halves
            .next()
            .ok_or_else(|| err("expected `v0 v1 ... ; value`".into()))?;
        let vertices = verts_part
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| err(format!("bad vertex id '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        if vertices.is_empty() {
            return Err(err("simplex needs at least one vertex".into()));
        }
        if vertices.len() > MAX_SIMPLEX_DIM + 1 {
            return Err(err(format!("simplex dimension above the cap {MAX_SIMPLEX_DIM}")));
        }
        let simplex = Simplex::new(vertices).map_err(|e| err(e.to_string()))?;
        let value = parse_rational(value_part).map_err(|e| err(e.to_string()))?;
        pairs.push((simplex, value));
    }
    Ok(pairs)
}

/// Render a filtration back into the text format.
pub fn filtration_to_text(f: &Filtration) -> String {
    let mut out = String::new();
    for s in f.complex().iter() {
        let verts = s.vertices().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        out.push_str(&format!("{verts} ; {}\n", format_rational(f.filter_value(s))));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sx(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn f2() -> FieldSpec {
        FieldSpec::F2
    }

    /// a--b--c hollow triangle: three vertices, three edges.
    fn hollow_triangle() -> SComplex {
        SComplex::closure([sx(&[0, 1, 2])].map(|s| s.facets()).concat())
    }

    fn filled_triangle() -> SComplex {
        SComplex::closure([sx(&[0, 1, 2])])
    }

    #[test]
    fn closure_and_validation() {
        let filled = filled_triangle();
        assert_eq!(filled.len(), 7);
        assert!(SComplex::new([sx(&[0, 1])]).is_err());
        assert!(SComplex::new([sx(&[0]), sx(&[1]), sx(&[0, 1])]).is_ok());
    }

    #[test]
    fn sublevel_filtration_examples() {
        let f = Filtration::sublevel_filtration(vec![(sx(&[0]), int(0))]).unwrap();
        assert_eq!(f.p(), 1);
        assert_eq!(f.sublevel(1), f.complex().clone());

        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        assert_eq!(edge.values(), &[int(1), int(2)]);
        assert_eq!(edge.sublevel(1).len(), 2);

        let constant = Filtration::sublevel_filtration(
            filled_triangle().iter().map(|s| (s.clone(), int(1))).collect(),
        )
        .unwrap();
        assert_eq!(constant.p(), 1);

        let bad = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(5)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ]);
        assert!(matches!(bad, Err(SimplicialError::NonMonotoneFilter { .. })));

        let missing = Filtration::sublevel_filtration(vec![(sx(&[0, 1]), int(1))]);
        assert!(matches!(missing, Err(SimplicialError::MissingFace { .. })));
    }

    #[test]
    fn index_refinement_examples() {
        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        let idx = edge.index_refinement();
        assert_eq!(idx.order(), &[sx(&[0]), sx(&[1]), sx(&[0, 1])]);
        assert_eq!(idx.block_of(), &[1, 1, 2]);

        let constant = Filtration::sublevel_filtration(
            filled_triangle().iter().map(|s| (s.clone(), int(1))).collect(),
        )
        .unwrap();
        let idx = constant.index_refinement();
        let dims: Vec<usize> = idx.order().iter().map(|s| s.dim()).collect();
        assert_eq!(dims, vec![0, 0, 0, 1, 1, 1, 2]);

        // distinct values: the order is just sorted by value
        let f = Filtration::sublevel_filtration(vec![
            (sx(&[3]), int(0)),
            (sx(&[1]), int(4)),
            (sx(&[2]), int(2)),
        ])
        .unwrap();
        let idx = f.index_refinement();
        assert_eq!(idx.order(), &[sx(&[3]), sx(&[2]), sx(&[1])]);
        // and any index refinement is compatible with itself
        let as_f = idx.as_filtration();
        assert_eq!(as_f.p(), 3);
    }

    #[test]
    fn index_filtration_validation() {
        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        assert!(IndexFiltration::new(&edge, vec![sx(&[1]), sx(&[0]), sx(&[0, 1])]).is_ok());
        // coface before face
        assert!(IndexFiltration::new(&edge, vec![sx(&[0, 1]), sx(&[0]), sx(&[1])]).is_err());
        // missing simplex
        assert!(IndexFiltration::new(&edge, vec![sx(&[0]), sx(&[1])]).is_err());
    }

    #[test]
    fn boundary_matrix_examples() {
        let one_edge = SComplex::closure([sx(&[0, 1])]);
        let d1 = boundary_matrix(&one_edge, 1, f2());
        assert_eq!((d1.rows(), d1.cols()), (2, 1));
        assert_eq!(d1, Mat::from_i64(f2(), 2, 1, &[1, 1]));

        let d2 = boundary_matrix(&filled_triangle(), 2, f2());
        assert_eq!((d2.rows(), d2.cols()), (3, 1));
        assert!(d2 == Mat::from_i64(f2(), 3, 1, &[1, 1, 1]));

        for p in [2u64, 3, 5] {
            let field = FieldSpec::new(p).unwrap();
            assert_eq!(boundary_matrix(&hollow_triangle(), 1, field).rank(), 2);
        }
        // d ∘ d = 0 over a signed field
        let f3 = FieldSpec::new(3).unwrap();
        let tetra = SComplex::closure([sx(&[0, 1, 2, 3])]);
        for n in 1..=3 {
            let a = boundary_matrix(&tetra, n, f3);
            let b = boundary_matrix(&tetra, n + 1, f3);
            if a.rows() > 0 {
                assert!(a.matmul(&b).is_zero_matrix(), "∂∂ ≠ 0 in degree {n}");
            }
        }
    }

    #[test]
    fn homology_examples() {
        assert_eq!(homology_basis(&hollow_triangle(), 1, f2()).dim, 1);
        assert_eq!(homology_basis(&filled_triangle(), 1, f2()).dim, 0);
        let two_points = SComplex::closure([sx(&[0]), sx(&[1])]);
        assert_eq!(homology_basis(&two_points, 0, f2()).dim, 2);
        // reps are cycles
        let h = homology_basis(&hollow_triangle(), 1, f2());
        assert!(boundary_matrix(&hollow_triangle(), 1, f2()).matmul(&h.cycle_reps).is_zero_matrix());
    }

    fn hollow_then_filled() -> Filtration {
        let mut pairs: Vec<(Simplex, BigRational)> = hollow_triangle()
            .iter()
            .map(|s| (s.clone(), int(1)))
            .collect();
        pairs.push((sx(&[0, 1, 2]), int(2)));
        Filtration::sublevel_filtration(pairs).unwrap()
    }

    #[test]
    fn induced_map_examples() {
        let f = hollow_then_filled();
        let id = induced_map(&f, 1, 1, 1, f2());
        assert_eq!(id, Mat::identity(f2(), 1));
        let m = induced_map(&f, 1, 2, 1, f2());
        assert_eq!((m.rows(), m.cols()), (0, 1));

        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        let merge = induced_map(&edge, 1, 2, 0, f2());
        assert_eq!((merge.rows(), merge.cols()), (1, 2));
        assert_eq!(merge.rank(), 1);

        assert_eq!(kernel_of_step(&f, 2, 1, f2()), 1);
        assert_eq!(kernel_of_step(&edge, 2, 0, f2()), 1);

        // a step that only adds disjoint material keeps the old classes
        let grow = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(2)),
        ])
        .unwrap();
        assert_eq!(kernel_of_step(&grow, 2, 0, f2()), 0);
    }

    #[test]
    fn aug_rank_examples() {
        // filled triangle, constant filter: one instantaneous 1-cycle
        let constant = Filtration::sublevel_filtration(
            filled_triangle().iter().map(|s| (s.clone(), int(1))).collect(),
        )
        .unwrap();
        assert_eq!(aug_rank_monotone(&constant, 1, 1, f2()), 1);
        let idx = constant.index_refinement();
        assert_eq!(aug_rank_index(&constant, &idx, 1, 1, f2()).unwrap(), 1);

        // two vertices then the edge: the merge is a kappa event, not augmented
        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        assert_eq!(aug_rank_monotone(&edge, 2, 0, f2()), 0);
        let idx = edge.index_refinement();
        assert_eq!(aug_rank_index(&edge, &idx, 2, 0, f2()).unwrap(), 0);

        // a step that adds nothing in the relevant degrees
        let two_step = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(2)),
        ])
        .unwrap();
        assert_eq!(aug_rank_monotone(&two_step, 2, 1, f2()), 0);

        // an index filtration has no instantaneous events at all
        let as_f = idx.as_filtration();
        let own_idx = as_f.index_refinement();
        for j in 1..=as_f.p() {
            for n in 0..2 {
                assert_eq!(aug_rank_monotone(&as_f, j, n, f2()), 0);
                assert_eq!(aug_rank_index(&as_f, &own_idx, j, n, f2()).unwrap(), 0);
            }
        }
    }

    #[test]
    fn aug_rank_index_rejects_incompatible() {
        let edge = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap();
        let other = Filtration::sublevel_filtration(vec![(sx(&[7]), int(1))]).unwrap();
        let foreign = other.index_refinement();
        assert!(aug_rank_index(&edge, &foreign, 1, 0, f2()).is_err());
    }

    fn random_filtration(rng: &mut ChaCha8Rng) -> Filtration {
        crate::sampling::random_filtration(rng, 20, 4)
    }

    #[test]
    fn functoriality_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..15 {
            let f = random_filtration(&mut rng);
            let p = f.p();
            let i = rng.gen_range(1..=p);
            let j = rng.gen_range(i..=p);
            let k = rng.gen_range(j..=p);
            for n in 0..=2 {
                let ij = induced_map(&f, i, j, n, f2());
                let jk = induced_map(&f, j, k, n, f2());
                let ik = induced_map(&f, i, k, n, f2());
                assert_eq!(jk.matmul(&ij), ik, "functoriality fails at ({i},{j},{k}) deg {n}");
            }
        }
    }

    #[test]
    fn euler_consistency_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..10 {
            let f = random_filtration(&mut rng);
            for j in 1..=f.p() {
                let k = f.sublevel(j);
                let max_dim = k.dim().map_or(0, |d| d);
                let alt: i64 = (0..=max_dim)
                    .map(|n| {
                        let d = homology_basis(&k, n, f2()).dim as i64;
                        if n % 2 == 0 { d } else { -d }
                    })
                    .sum();
                assert_eq!(alt, k.euler_characteristic());
            }
        }
    }

    #[test]
    fn index_step_kernels_are_at_most_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..8 {
            let f = random_filtration(&mut rng);
            let idx = f.index_refinement();
            for i in 1..=idx.n() {
                for n in 0..=2 {
                    let step = induced_map_between(&idx.prefix(i - 1), &idx.prefix(i), n, f2());
                    let kappa = step.cols() - step.rank();
                    assert!(kappa <= 1, "a single simplex can kill at most one cycle");
                }
            }
        }
    }

    #[test]
    fn parse_filtration_format() {
        let text = "# a tiny filtration\n0 ; 1\n1 ; 1\n0 1 ; 3/2\n\n";
        let pairs = parse_filtration_text(text).unwrap();
        assert_eq!(pairs.len(), 3);
        let f = Filtration::sublevel_filtration(pairs).unwrap();
        assert_eq!(f.values(), &[int(1), parse_rational("3/2").unwrap()]);
        let round = parse_filtration_text(&filtration_to_text(&f)).unwrap();
        assert_eq!(Filtration::sublevel_filtration(round).unwrap(), f);

        let bad = parse_filtration_text("0 1\n");
        assert_eq!(bad.unwrap_err().line, 1);
        let bad = parse_filtration_text("0 ; 1\nx ; 2\n");
        assert_eq!(bad.unwrap_err().line, 2);
        let bad = parse_filtration_text("0 0 ; 1\n");
        assert!(bad.is_err());
        let bad = parse_filtration_text("0 1 2 3 4 5 6 ; 1\n");
        assert!(bad.is_err(), "dimension cap");
    }
}
