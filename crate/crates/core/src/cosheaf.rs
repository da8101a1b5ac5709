//! Constructible cosheaves on a stratified line (`ZZModule`), their
//! constructions from poset representations and filtrations, pushforward
//! along stratified maps, and weak-equivalence normal forms.
//!
//! A `ZZModule` assigns a finite-dimensional vector space to every stratum
//! and a linear map to every edge→vertex incidence; this is exactly a
//! representation of the entrance-path poset of the line.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlin::{diagram_colimit, FieldSpec, Mat, QuiverArrow, QuiverDiagram};
use crate::simplicial::{aug_rank_monotone, homology_basis, induced_map, Filtration};
use crate::stratline::{StratifiedLine, StratifiedLineMap, StratumId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CosheafError {
    #[error("modules live on different lines")]
    LineMismatch,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid stratified map: {0}")]
    InvalidMap(String),
    #[error("point does not lie inside the given edge")]
    PointNotInEdge,
    #[error("stratum {0} does not belong to the line")]
    InvalidStratum(StratumId),
}

/// A constructible cosheaf on a stratified line: one dimension per stratum
/// and one matrix per (edge, incident vertex) pair, of shape
/// `dims(vertex) × dims(edge)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZZModule {
    line: StratifiedLine,
    field: FieldSpec,
    dims: Vec<usize>,
    maps: BTreeMap<(StratumId, StratumId), Mat>,
}

impl ZZModule {
    /// Build and validate. Missing incidence maps default to zero.
    pub fn new(
        line: StratifiedLine,
        field: FieldSpec,
        dims: Vec<usize>,
        mut maps: BTreeMap<(StratumId, StratumId), Mat>,
    ) -> Result<ZZModule, CosheafError> {
        if dims.len() != line.num_strata() {
            return Err(CosheafError::InvalidModule(format!(
                "expected {} dimensions, got {}",
                line.num_strata(),
                dims.len()
            )));
        }
        let mut expected: Vec<(StratumId, StratumId)> = Vec::new();
        for e in line.edges() {
            for v in line.incidences(e).unwrap() {
                expected.push((e, v));
            }
        }
        for key in maps.keys() {
            if !expected.contains(key) {
                return Err(CosheafError::InvalidModule(format!(
                    "({}, {}) is not an incidence of the line",
                    key.0, key.1
                )));
            }
        }
        for &(e, v) in &expected {
            let rows = dims[v.pos()];
            let cols = dims[e.pos()];
            match maps.get(&(e, v)) {
                None => {
                    maps.insert((e, v), Mat::zero(field, rows, cols));
                }
                Some(m) => {
                    if m.rows() != rows || m.cols() != cols || m.field() != field {
                        return Err(CosheafError::InvalidModule(format!(
                            "map ({e}, {v}) must be {rows}x{cols} over the module field"
                        )));
                    }
                }
            }
        }
        Ok(ZZModule { line, field, dims, maps })
    }

    pub fn zero(line: StratifiedLine, field: FieldSpec) -> ZZModule {
        let dims = vec![0; line.num_strata()];
        ZZModule::new(line, field, dims, BTreeMap::new()).unwrap()
    }

    /// All value concentrated at one vertex, every map zero.
    pub fn skyscraper(
        line: StratifiedLine,
        v: StratumId,
        d: usize,
        field: FieldSpec,
    ) -> Result<ZZModule, CosheafError> {
        if !line.contains(v) || !v.is_vertex() {
            return Err(CosheafError::InvalidStratum(v));
        }
        let mut dims = vec![0; line.num_strata()];
        dims[v.pos()] = d;
        ZZModule::new(line, field, dims, BTreeMap::new())
    }

    pub fn line(&self) -> &StratifiedLine {
        &self.line
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, s: StratumId) -> usize {
        self.dims[s.pos()]
    }

    pub fn map(&self, e: StratumId, v: StratumId) -> &Mat {
        &self.maps[&(e, v)]
    }

    pub fn maps(&self) -> &BTreeMap<(StratumId, StratumId), Mat> {
        &self.maps
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Costalk at a stratum: the dimension assigned to it.
    pub fn costalk(&self, s: StratumId) -> usize {
        assert!(self.line.contains(s), "stratum outside the line");
        self.dims[s.pos()]
    }

    /// Costalk at a point of the line.
    pub fn costalk_at_point(&self, x: &BigRational) -> usize {
        self.costalk(self.line.stratum_of_point(x))
    }

    pub fn direct_sum(&self, other: &ZZModule) -> Result<ZZModule, CosheafError> {
        if self.line != other.line {
            return Err(CosheafError::LineMismatch);
        }
        if self.field != other.field {
            return Err(CosheafError::InvalidModule("field mismatch in direct sum".into()));
        }
        let dims = self
            .dims
            .iter()
            .zip(&other.dims)
            .map(|(a, b)| a + b)
            .collect();
        let maps = self
            .maps
            .iter()
            .map(|(k, m)| (*k, m.block_diag(&other.maps[k])))
            .collect();
        ZZModule::new(self.line.clone(), self.field, dims, maps)
    }

    /// The restriction of the module to the strata `lo..=hi` as a diagram of
    /// vector spaces, nodes in left-to-right order.
    pub fn segment_diagram(&self, lo: StratumId, hi: StratumId) -> QuiverDiagram {
        assert!(lo <= hi && self.line.contains(lo) && self.line.contains(hi));
        let nodes: Vec<StratumId> = (lo.pos()..=hi.pos()).map(StratumId::from_pos).collect();
        self.diagram_over(&nodes)
    }

    /// A diagram over an explicit contiguous run of strata.
    fn diagram_over(&self, run: &[StratumId]) -> QuiverDiagram {
        let dims: Vec<usize> = run.iter().map(|s| self.dims[s.pos()]).collect();
        let pos_in_run: BTreeMap<StratumId, usize> =
            run.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut arrows = Vec::new();
        for (i, s) in run.iter().enumerate() {
            if !s.is_edge() {
                continue;
            }
            for v in self.line.incidences(*s).unwrap() {
                if let Some(&j) = pos_in_run.get(&v) {
                    arrows.push(QuiverArrow {
                        source: i,
                        target: j,
                        map: self.maps[&(*s, v)].clone(),
                    });
                }
            }
        }
        QuiverDiagram::new(self.field, dims, arrows)
    }

    /// Pushforward along a stratified map: each target stratum receives the
    /// colimit of the module over the preimage of its minimal basis open.
    ///
    /// Target edges pull back to a single source edge and keep its value;
    /// target vertices receive the colimit over the preimage of their open
    /// star, with incidence maps given by the colimit projections at the
    /// run's boundary edges.
    pub fn pushforward(&self, c: &StratifiedLineMap) -> Result<ZZModule, CosheafError> {
        if c.source != self.line {
            return Err(CosheafError::InvalidMap("map source is a different line".into()));
        }
        if !c.is_valid() {
            return Err(CosheafError::InvalidMap("stratified-map invariants violated".into()));
        }
        let target = c.target.clone();
        let mut dims = vec![0; target.num_strata()];
        let mut maps: BTreeMap<(StratumId, StratumId), Mat> = BTreeMap::new();
        for te in target.edges() {
            let se = c.edge_preimage(te).expect("valid maps cover every target edge");
            dims[te.pos()] = self.dims[se.pos()];
        }
        for tv in target.vertices() {
            let run = c.star_preimage(tv);
            let diagram = self.diagram_over(&run);
            let (dim, projections) = diagram_colimit(&diagram);
            dims[tv.pos()] = dim;
            for te in [StratumId::edge(tv.vertex_index().unwrap() - 1), StratumId::edge(tv.vertex_index().unwrap())] {
                let se = c.edge_preimage(te).expect("valid maps cover every target edge");
                let at = run
                    .iter()
                    .position(|s| *s == se)
                    .expect("edge preimages bound the star preimage");
                maps.insert((te, tv), projections[at].clone());
            }
        }
        ZZModule::new(target, self.field, dims, maps)
    }

    /// Split off the value at a vertex: returns the module with the vertex
    /// zeroed out (extension by zero of the restriction off the vertex) and
    /// the skyscraper holding the removed value. K₀ classes add up.
    pub fn ses_at_vertex(&self, v: StratumId) -> Result<(ZZModule, ZZModule), CosheafError> {
        if !self.line.contains(v) || !v.is_vertex() {
            return Err(CosheafError::InvalidStratum(v));
        }
        let mut dims = self.dims.clone();
        dims[v.pos()] = 0;
        let mut maps = self.maps.clone();
        for (key, m) in maps.iter_mut() {
            if key.1 == v {
                *m = Mat::zero(self.field, 0, m.cols());
            }
        }
        let off = ZZModule::new(self.line.clone(), self.field, dims, maps)?;
        let sky = ZZModule::skyscraper(self.line.clone(), v, self.dim(v), self.field)?;
        Ok((off, sky))
    }

    /// Insert a new vertex strictly inside an edge; the new vertex and both
    /// half-edges carry the old edge value with identity maps between them,
    /// so the result is weakly equivalent to the input.
    pub fn subdivide(&self, e: StratumId, x: &BigRational) -> Result<ZZModule, CosheafError> {
        if !self.line.contains(e) || !e.is_edge() {
            return Err(CosheafError::InvalidStratum(e));
        }
        if self.line.stratum_of_point(x) != e {
            return Err(CosheafError::PointNotInEdge);
        }
        let mut coords = self.line.vertex_coords().to_vec();
        coords.push(x.clone());
        let new_line = StratifiedLine::from_points(coords).expect("x is not a vertex");
        let d = self.dims[e.pos()];
        let shift = |s: StratumId| -> StratumId {
            if s.twice() > e.twice() {
                StratumId::from_twice(s.twice() + 2)
            } else {
                s
            }
        };
        let mut dims = vec![0; new_line.num_strata()];
        for s in self.line.strata() {
            if s != e {
                dims[shift(s).pos()] = self.dims[s.pos()];
            }
        }
        let left_half = e;
        let new_vertex = StratumId::from_twice(e.twice() + 1);
        let right_half = StratumId::from_twice(e.twice() + 2);
        dims[left_half.pos()] = d;
        dims[new_vertex.pos()] = d;
        dims[right_half.pos()] = d;

        let mut maps: BTreeMap<(StratumId, StratumId), Mat> = BTreeMap::new();
        for (&(me, mv), m) in &self.maps {
            if me == e {
                // reattach the old outer maps to the matching half-edge
                let half = if mv < e { left_half } else { right_half };
                maps.insert((half, shift(mv)), m.clone());
            } else {
                maps.insert((shift(me), shift(mv)), m.clone());
            }
        }
        maps.insert((left_half, new_vertex), Mat::identity(self.field, d));
        maps.insert((right_half, new_vertex), Mat::identity(self.field, d));
        ZZModule::new(new_line, self.field, dims, maps)
    }

    /// A vertex both of whose incident edge maps are isomorphisms carries no
    /// event; contracting merges it and its two edges into a single edge.
    fn contractible_vertex(&self) -> Option<StratumId> {
        self.line.vertices().find(|v| {
            let j = v.vertex_index().unwrap();
            let l = &self.maps[&(StratumId::edge(j - 1), *v)];
            let r = &self.maps[&(StratumId::edge(j), *v)];
            l.inverse().is_some() && r.inverse().is_some()
        })
    }

    fn contract_vertex(&self, v: StratumId) -> ZZModule {
        let j = v.vertex_index().unwrap();
        let el = StratumId::edge(j - 1);
        let er = StratumId::edge(j);
        let l_inv = self.maps[&(el, v)].inverse().expect("contraction needs isos");
        let r_inv = self.maps[&(er, v)].inverse().expect("contraction needs isos");
        let mut coords = self.line.vertex_coords().to_vec();
        coords.remove(j - 1);
        let new_line = StratifiedLine::from_points(coords).unwrap();
        let shift = |s: StratumId| -> StratumId {
            if s.twice() > er.twice() {
                StratumId::from_twice(s.twice() - 2)
            } else {
                s
            }
        };
        let mut dims = vec![0; new_line.num_strata()];
        for s in self.line.strata() {
            if s == v || s == er {
                continue;
            }
            let t = if s == el { el } else { shift(s) };
            dims[t.pos()] = self.dims[s.pos()];
        }
        dims[el.pos()] = self.dim(v);

        let mut maps: BTreeMap<(StratumId, StratumId), Mat> = BTreeMap::new();
        for (&(me, mv), m) in &self.maps {
            if mv == v {
                continue;
            }
            if me == el {
                // outer map to the left vertex, now based at the merged edge value M(v)
                maps.insert((el, mv), m.matmul(&l_inv));
            } else if me == er {
                maps.insert((el, shift(mv)), m.matmul(&r_inv));
            } else {
                maps.insert((shift(me), shift(mv)), m.clone());
            }
        }
        ZZModule::new(new_line, self.field, dims, maps).unwrap()
    }

    /// Contract leftmost-first until no vertex has two iso incident maps.
    /// Idempotent; the result is weakly equivalent to the input.
    pub fn weak_normal_form(&self) -> ZZModule {
        let mut m = self.clone();
        while let Some(v) = m.contractible_vertex() {
            m = m.contract_vertex(v);
        }
        m
    }

    /// Two modules on the same line are isomorphic iff their barcodes agree
    /// as multisets (interval decompositions are essentially unique).
    pub fn is_isomorphic(&self, other: &ZZModule) -> Result<bool, CosheafError> {
        if self.line != other.line {
            return Err(CosheafError::LineMismatch);
        }
        Ok(crate::barcode_k::decompose(self) == crate::barcode_k::decompose(other))
    }
}

/// Direction of the poset relation between two consecutive marked points.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// The right point is poset-smaller: the arrow points left.
    Left,
    /// The left point is poset-smaller: the arrow points right.
    Right,
}

/// A zig-zag poset representation: spaces at increasing real coordinates,
/// one arrow per consecutive pair, oriented from the poset-smaller to the
/// poset-larger element.
#[derive(Clone, Debug)]
pub struct PosetRep {
    vertex_coords: Vec<BigRational>,
    directions: Vec<Direction>,
    spaces: Vec<usize>,
    arrows: Vec<Mat>,
    field: FieldSpec,
}

impl PosetRep {
    pub fn new(
        vertex_coords: Vec<BigRational>,
        directions: Vec<Direction>,
        spaces: Vec<usize>,
        arrows: Vec<Mat>,
        field: FieldSpec,
    ) -> Result<PosetRep, CosheafError> {
        let k = vertex_coords.len();
        if k == 0 {
            return Err(CosheafError::InvalidModule("a representation needs a vertex".into()));
        }
        if vertex_coords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CosheafError::InvalidModule(
                "vertex coordinates must strictly increase".into(),
            ));
        }
        if spaces.len() != k || directions.len() != k - 1 || arrows.len() != k - 1 {
            return Err(CosheafError::InvalidModule("length mismatch".into()));
        }
        for t in 0..k - 1 {
            let (src, dst) = match directions[t] {
                Direction::Right => (spaces[t], spaces[t + 1]),
                Direction::Left => (spaces[t + 1], spaces[t]),
            };
            if arrows[t].cols() != src || arrows[t].rows() != dst || arrows[t].field() != field {
                return Err(CosheafError::InvalidModule(format!(
                    "arrow {t} must be {dst}x{src} over the field"
                )));
            }
        }
        Ok(PosetRep { vertex_coords, directions, spaces, arrows, field })
    }

    /// A monotone representation: all arrows point right.
    pub fn monotone(
        vertex_coords: Vec<BigRational>,
        spaces: Vec<usize>,
        arrows: Vec<Mat>,
        field: FieldSpec,
    ) -> Result<PosetRep, CosheafError> {
        let dirs = vec![Direction::Right; vertex_coords.len().saturating_sub(1)];
        PosetRep::new(vertex_coords, dirs, spaces, arrows, field)
    }

    /// The propagated cosheaf: each bounded edge copies the space of its
    /// poset-minimal endpoint, mapping to it by the identity and to the other
    /// endpoint by the representation arrow; the unbounded edges copy their
    /// unique endpoint.
    pub fn propagate(&self) -> ZZModule {
        let line = StratifiedLine::from_points(self.vertex_coords.clone()).unwrap();
        let k = self.spaces.len();
        let mut dims = vec![0; line.num_strata()];
        for (i, &d) in self.spaces.iter().enumerate() {
            dims[StratumId::vertex(i + 1).pos()] = d;
        }
        let mut maps: BTreeMap<(StratumId, StratumId), Mat> = BTreeMap::new();
        dims[StratumId::edge(0).pos()] = self.spaces[0];
        maps.insert(
            (StratumId::edge(0), StratumId::vertex(1)),
            Mat::identity(self.field, self.spaces[0]),
        );
        dims[StratumId::edge(k).pos()] = self.spaces[k - 1];
        maps.insert(
            (StratumId::edge(k), StratumId::vertex(k)),
            Mat::identity(self.field, self.spaces[k - 1]),
        );
        for t in 1..k {
            let e = StratumId::edge(t);
            let (min_v, other_v, d_min) = match self.directions[t - 1] {
                Direction::Right => (StratumId::vertex(t), StratumId::vertex(t + 1), self.spaces[t - 1]),
                Direction::Left => (StratumId::vertex(t + 1), StratumId::vertex(t), self.spaces[t]),
            };
            dims[e.pos()] = d_min;
            maps.insert((e, min_v), Mat::identity(self.field, d_min));
            maps.insert((e, other_v), self.arrows[t - 1].clone());
        }
        ZZModule::new(line, self.field, dims, maps).unwrap()
    }
}

/// The cosheaf of degree-`n` homology of a monotone filtration: spaces
/// `H_n(K_{m_j})` at the values `m_j`, propagated over the line.
pub fn filtration_module(f: &Filtration, n: usize, field: FieldSpec) -> ZZModule {
    let spaces: Vec<usize> = (1..=f.p()).map(|j| homology_basis(&f.sublevel(j), n, field).dim).collect();
    let arrows: Vec<Mat> = (1..f.p()).map(|j| induced_map(f, j, j + 1, n, field)).collect();
    PosetRep::monotone(f.values().to_vec(), spaces, arrows, field)
        .unwrap()
        .propagate()
}

/// The augmented cosheaf: the filtration cosheaf plus one skyscraper per
/// step carrying the instantaneous events of that step. Maps in and out of
/// the augmented summands are zero.
pub fn augmented_module(f: &Filtration, n: usize, field: FieldSpec) -> ZZModule {
    let mut m = filtration_module(f, n, field);
    for j in 1..=f.p() {
        let a = aug_rank_monotone(f, j, n, field);
        if a > 0 {
            let sky = ZZModule::skyscraper(m.line().clone(), StratumId::vertex(j), a, field).unwrap();
            m = m.direct_sum(&sky).unwrap();
        }
    }
    m
}

/// A module per homology degree over a common line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedZZModule {
    line: StratifiedLine,
    field: FieldSpec,
    components: BTreeMap<usize, ZZModule>,
}

impl GradedZZModule {
    pub fn new(line: StratifiedLine, field: FieldSpec) -> GradedZZModule {
        GradedZZModule { line, field, components: BTreeMap::new() }
    }

    pub fn insert(&mut self, degree: usize, m: ZZModule) -> Result<(), CosheafError> {
        if *m.line() != self.line || m.field() != self.field {
            return Err(CosheafError::LineMismatch);
        }
        self.components.insert(degree, m);
        Ok(())
    }

    pub fn line(&self) -> &StratifiedLine {
        &self.line
    }

    pub fn components(&self) -> &BTreeMap<usize, ZZModule> {
        &self.components
    }

    pub fn component(&self, degree: usize) -> Option<&ZZModule> {
        self.components.get(&degree)
    }
}

/// The filtration cosheaf with the empty initial step materialized: an
/// extra leading vertex (one unit before the first value) carrying the zero
/// space. Filtrations begin at the empty complex; this keeps that boundary
/// object in the picture, which is what makes the collapse pushforward hit
/// the monotone cosheaf on the nose.
pub fn based_filtration_module(f: &Filtration, n: usize, field: FieldSpec) -> ZZModule {
    let mut coords = Vec::with_capacity(f.p() + 1);
    coords.push(&f.values()[0] - crate::rational::int(1));
    coords.extend(f.values().iter().cloned());
    let mut spaces = vec![0usize];
    spaces.extend((1..=f.p()).map(|j| homology_basis(&f.sublevel(j), n, field).dim));
    let mut arrows = vec![Mat::zero(field, spaces[1], 0)];
    arrows.extend((1..f.p()).map(|j| induced_map(f, j, j + 1, n, field)));
    PosetRep::monotone(coords, spaces, arrows, field).unwrap().propagate()
}

/// The cosheaf of an index filtration with the empty step included: vertex
/// `i + 1` of the index line over `1..n+1` carries `H_n(K'_i)`.
pub fn based_index_module(
    index: &crate::simplicial::IndexFiltration,
    n: usize,
    field: FieldSpec,
) -> ZZModule {
    let steps = index.n();
    let coords = (1..=steps as i64 + 1).map(crate::rational::int).collect();
    let spaces: Vec<usize> =
        (0..=steps).map(|i| homology_basis(&index.prefix(i), n, field).dim).collect();
    let arrows: Vec<Mat> = (0..steps)
        .map(|i| {
            crate::simplicial::induced_map_between(&index.prefix(i), &index.prefix(i + 1), n, field)
        })
        .collect();
    PosetRep::monotone(coords, spaces, arrows, field).unwrap().propagate()
}

/// The collapse map matching [`based_index_module`] and
/// [`based_filtration_module`]: the leading empty-step vertex collapses to
/// the leading target vertex, each block to its value.
pub fn based_collapse_map(
    index: &crate::simplicial::IndexFiltration,
    f: &Filtration,
) -> crate::stratline::StratifiedLineMap {
    let mut values = Vec::with_capacity(f.p() + 1);
    values.push(&f.values()[0] - crate::rational::int(1));
    values.extend(f.values().iter().cloned());
    let mut blocks = vec![1usize];
    blocks.extend(index.block_of().iter().map(|b| b + 1));
    crate::stratline::collapse_map(
        &crate::stratline::index_line(index.n() + 1),
        &values,
        &blocks,
    )
    .expect("block data of a compatible refinement is monotone")
}

/// All homology degrees of a filtration at once (degrees `0..=dim K`).
pub fn graded_filtration_module(f: &Filtration, field: FieldSpec) -> GradedZZModule {
    let top = f.complex().dim().unwrap_or(0);
    let mut g = GradedZZModule::new(
        StratifiedLine::from_points(f.values().to_vec()).unwrap(),
        field,
    );
    for n in 0..=top {
        g.insert(n, filtration_module(f, n, field)).unwrap();
    }
    g
}

// --- JSON wire format ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MapEntryWire {
    edge: String,
    to: String,
    matrix: Vec<Vec<serde_json::Value>>,
}

#[derive(Serialize, Deserialize)]
struct ModuleWire {
    field: u64,
    vertices: Vec<String>,
    dims: Vec<usize>,
    maps: Vec<MapEntryWire>,
}

impl ZZModule {
    /// Module JSON: field characteristic, vertex coordinates, dimensions in
    /// stratum order, and the nonzero incidence matrices (row-major).
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut entries = Vec::new();
        for (&(e, v), m) in &self.maps {
            if m.is_zero_matrix() {
                continue;
            }
            let matrix = (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| self.field.scalar_to_json(m.get(i, j))).collect())
                .collect();
            entries.push(MapEntryWire { edge: e.to_string(), to: v.to_string(), matrix });
        }
        serde_json::to_value(ModuleWire {
            field: self.field.characteristic(),
            vertices: self.line.vertex_labels(),
            dims: self.dims.clone(),
            maps: entries,
        })
        .unwrap()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<ZZModule, CosheafError> {
        let wire: ModuleWire = serde_json::from_value(v.clone())
            .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
        let field = FieldSpec::new(wire.field)
            .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
        let line = StratifiedLine::from_vertex_labels(&wire.vertices)
            .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
        let mut maps = BTreeMap::new();
        for entry in &wire.maps {
            let e = StratumId::parse(&entry.edge)
                .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
            let to = StratumId::parse(&entry.to)
                .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
            let rows = entry.matrix.len();
            let cols = entry.matrix.first().map_or(0, |r| r.len());
            if entry.matrix.iter().any(|r| r.len() != cols) {
                return Err(CosheafError::InvalidModule("ragged matrix".into()));
            }
            let mut m = Mat::zero(field, rows, cols);
            for (i, row) in entry.matrix.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    let s = field
                        .scalar_from_json(cell)
                        .map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
                    m.set(i, j, s);
                }
            }
            maps.insert((e, to), m);
        }
        // Zero-sized wire matrices lose a dimension; resize them to fit.
        let mut fixed = BTreeMap::new();
        for ((e, to), m) in maps {
            if m.rows() == 0 || m.cols() == 0 {
                let rows = *wire.dims.get(to.pos()).unwrap_or(&0);
                let cols = *wire.dims.get(e.pos()).unwrap_or(&0);
                if rows == 0 || cols == 0 {
                    fixed.insert((e, to), Mat::zero(field, rows, cols));
                    continue;
                }
            }
            fixed.insert((e, to), m);
        }
        ZZModule::new(line, field, wire.dims, fixed)
    }

    pub fn from_json_str(s: &str) -> Result<ZZModule, CosheafError> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| CosheafError::InvalidModule(e.to_string()))?;
        ZZModule::from_json_value(&v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::simplicial::Simplex;
    use crate::stratline::collapse_map;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::F2
    }

    fn sx(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    fn coords(v: &[i64]) -> Vec<BigRational> {
        v.iter().copied().map(int).collect()
    }

    /// constant one-dimensional module on the given vertex coordinates
    fn constant_module(points: &[i64]) -> ZZModule {
        let k = points.len();
        let arrows = vec![Mat::identity(f2(), 1); k - 1];
        PosetRep::monotone(coords(points), vec![1; k], arrows, f2()).unwrap().propagate()
    }

    #[test]
    fn propagate_monotone_identity() {
        let m = constant_module(&[1, 2]);
        assert_eq!(m.dims(), &[1, 1, 1, 1, 1]);
        for mat in m.maps().values() {
            assert_eq!(*mat, Mat::identity(f2(), 1));
        }
    }

    #[test]
    fn propagate_zero_arrow() {
        let p = PosetRep::monotone(coords(&[1, 2]), vec![1, 1], vec![Mat::zero(f2(), 1, 1)], f2())
            .unwrap();
        let m = p.propagate();
        assert_eq!(m.dims(), &[1, 1, 1, 1, 1]);
        let e1 = StratumId::edge(1);
        assert_eq!(*m.map(e1, StratumId::vertex(1)), Mat::identity(f2(), 1));
        assert!(m.map(e1, StratumId::vertex(2)).is_zero_matrix());
    }

    #[test]
    fn propagate_zigzag_min_side() {
        // poset k > i > j < l at increasing coordinates: the edge in the
        // (i, j) gap carries the value at j and maps into i by the arrow.
        let arrow = |d: i64| Mat::from_i64(f2(), 1, 1, &[d]);
        let p = PosetRep::new(
            coords(&[1, 2, 3, 4]),
            vec![Direction::Left, Direction::Left, Direction::Right],
            vec![1, 1, 1, 1],
            vec![arrow(1), arrow(1), arrow(1)],
            f2(),
        )
        .unwrap();
        let m = p.propagate();
        // every edge maps by the identity toward its poset-min endpoint
        let e = StratumId::edge(1); // between vertices 1 (=k) and 2 (=i); min is i
        assert_eq!(*m.map(e, StratumId::vertex(2)), Mat::identity(f2(), 1));
        let e2 = StratumId::edge(2); // between i and j; min is j
        assert_eq!(*m.map(e2, StratumId::vertex(3)), Mat::identity(f2(), 1));
    }

    #[test]
    fn monotone_propagate_has_identity_to_left() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..20 {
            let k = rng.gen_range(1..5);
            let spaces: Vec<usize> = (0..k).map(|_| rng.gen_range(0..3)).collect();
            let arrows: Vec<Mat> = (0..k - 1)
                .map(|t| {
                    let data: Vec<i64> =
                        (0..spaces[t] * spaces[t + 1]).map(|_| rng.gen_range(0..2)).collect();
                    Mat::from_i64(f2(), spaces[t + 1], spaces[t], &data)
                })
                .collect();
            let pts: Vec<i64> = (1..=k as i64).collect();
            let m = PosetRep::monotone(coords(&pts), spaces, arrows, f2()).unwrap().propagate();
            for t in 1..k {
                let e = StratumId::edge(t);
                let d = m.dim(e);
                assert_eq!(*m.map(e, StratumId::vertex(t)), Mat::identity(f2(), d));
            }
        }
    }

    fn edge_filtration() -> Filtration {
        Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(1)),
            (sx(&[0, 1]), int(2)),
        ])
        .unwrap()
    }

    fn hollow_then_filled() -> Filtration {
        let mut pairs: Vec<(Simplex, BigRational)> =
            crate::simplicial::SComplex::closure([sx(&[0, 1]), sx(&[1, 2]), sx(&[0, 2])])
                .iter()
                .map(|s| (s.clone(), int(1)))
                .collect();
        pairs.push((sx(&[0, 1, 2]), int(2)));
        Filtration::sublevel_filtration(pairs).unwrap()
    }

    #[test]
    fn filtration_module_examples() {
        let m = filtration_module(&edge_filtration(), 0, f2());
        assert_eq!(m.dims(), &[2, 2, 2, 1, 1]);

        let m1 = filtration_module(&hollow_then_filled(), 1, f2());
        assert_eq!(m1.dims(), &[1, 1, 1, 0, 0]);

        // constant complex across all values -> constant module
        let f = Filtration::sublevel_filtration(vec![
            (sx(&[0]), int(1)),
            (sx(&[1]), int(2)),
        ])
        .unwrap();
        let m0 = filtration_module(&f, 0, f2());
        assert_eq!(m0.dims(), &[1, 1, 1, 2, 2]);
    }

    #[test]
    fn augmented_module_examples() {
        // filled triangle at a single value: one instantaneous 1-cycle
        let constant = Filtration::sublevel_filtration(
            crate::simplicial::SComplex::closure([sx(&[0, 1, 2])])
                .iter()
                .map(|s| (s.clone(), int(1)))
                .collect(),
        )
        .unwrap();
        let aug = augmented_module(&constant, 1, f2());
        assert_eq!(aug.dims(), &[0, 1, 0]);

        // an index filtration is already augmented
        let idx = edge_filtration().index_refinement().as_filtration();
        for n in 0..=1 {
            assert_eq!(augmented_module(&idx, n, f2()), filtration_module(&idx, n, f2()));
        }

        // filtration with no instantaneous events
        assert_eq!(
            augmented_module(&edge_filtration(), 0, f2()),
            filtration_module(&edge_filtration(), 0, f2())
        );
    }

    #[test]
    fn augmented_agrees_with_plain_off_the_vertices() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..10 {
            let f = crate::sampling::random_filtration(&mut rng, 20, 3);
            for n in 0..=2 {
                let plain = filtration_module(&f, n, f2());
                let aug = augmented_module(&f, n, f2());
                for e in plain.line().edges() {
                    assert_eq!(plain.dim(e), aug.dim(e), "edge values must agree");
                }
            }
        }
    }

    #[test]
    fn skyscraper_and_direct_sum() {
        let line = StratifiedLine::from_points(coords(&[1, 2])).unwrap();
        let z = ZZModule::skyscraper(line.clone(), StratumId::vertex(1), 0, f2()).unwrap();
        assert_eq!(z, ZZModule::zero(line.clone(), f2()));
        let s = ZZModule::skyscraper(line.clone(), StratumId::vertex(1), 1, f2()).unwrap();
        assert_eq!(s.dims(), &[0, 1, 0, 0, 0]);
        assert!(ZZModule::skyscraper(line.clone(), StratumId::edge(1), 1, f2()).is_err());

        let c = constant_module(&[1, 2]);
        let sum = c.direct_sum(&s).unwrap();
        assert_eq!(sum.dims(), &[1, 2, 1, 1, 1]);
        assert_eq!(c.direct_sum(&ZZModule::zero(line, f2())).unwrap(), c);

        let other_line = constant_module(&[1, 3]);
        assert_eq!(c.direct_sum(&other_line), Err(CosheafError::LineMismatch));
    }

    #[test]
    fn costalk_matches_restriction_limit() {
        let m = filtration_module(&edge_filtration(), 0, f2());
        assert_eq!(m.costalk_at_point(&int(0)), 2);
        assert_eq!(m.costalk(StratumId::vertex(2)), 1);
        // a single-stratum restriction has limit equal to the stratum value
        for s in m.line().strata() {
            let d = m.segment_diagram(s, s);
            assert_eq!(crate::exactlin::diagram_limit(&d).0, m.costalk(s));
        }
    }

    #[test]
    fn pushforward_identity() {
        let m = filtration_module(&edge_filtration(), 0, f2());
        let id = StratifiedLineMap::identity(m.line());
        let p = m.pushforward(&id).unwrap();
        assert!(p.is_isomorphic(&m).unwrap());
        assert_eq!(p.dims(), m.dims());
    }

    #[test]
    fn pushforward_elementary_collapse_of_constant() {
        // collapse two index vertices onto one value: a constant module
        // stays constant
        let m = constant_module(&[1, 2]);
        let c = collapse_map(&crate::stratline::index_line(2), &[int(5)], &[1, 1]).unwrap();
        let p = m.pushforward(&c).unwrap();
        assert_eq!(p.dims(), &[1, 1, 1]);
        let target_const = constant_module(&[5]);
        assert!(p.is_isomorphic(&target_const).unwrap());
    }

    #[test]
    fn pushforward_index_cosheaf_is_monotone_cosheaf() {
        for (f, degrees) in [
            (edge_filtration(), vec![0usize, 1]),
            (hollow_then_filled(), vec![0, 1]),
        ] {
            let idx = f.index_refinement();
            let c = based_collapse_map(&idx, &f);
            for n in degrees {
                let fi = based_index_module(&idx, n, f2());
                let fm = based_filtration_module(&f, n, f2());
                let pushed = fi.pushforward(&c).unwrap();
                assert_eq!(pushed.line(), fm.line());
                assert!(pushed.is_isomorphic(&fm).unwrap(), "degree {n}");
            }
        }
    }

    #[test]
    fn based_modules_add_one_zero_vertex() {
        let f = edge_filtration();
        let m = filtration_module(&f, 0, f2());
        let based = based_filtration_module(&f, 0, f2());
        assert_eq!(based.line().k(), m.line().k() + 1);
        assert_eq!(based.dim(StratumId::vertex(1)), 0);
        // away from the leading vertex the modules agree
        assert_eq!(
            &based.dims()[3..],
            &m.dims()[1..],
            "based module shifts the old strata by one vertex"
        );
    }

    #[test]
    fn pushforward_functoriality_on_collapses() {
        // collapsing 1..4 to two values, then to one, equals collapsing
        // straight down
        let m = filtration_module(&edge_filtration(), 0, f2());
        // m's line has coords [1, 2] already; relabel as an index line
        let c1 = collapse_map(&crate::stratline::index_line(2), &[int(1)], &[1, 1]).unwrap();
        let m4 = constant_module(&[1, 2, 3, 4]);
        let c_a = collapse_map(&crate::stratline::index_line(4), &coords(&[1, 2]), &[1, 1, 2, 2]).unwrap();
        let c_b = collapse_map(&crate::stratline::index_line(2), &[int(9)], &[1, 1]).unwrap();
        let via = m4.pushforward(&c_a).unwrap().pushforward(&c_b).unwrap();
        let direct = m4
            .pushforward(&c_a.compose(&c_b).unwrap())
            .unwrap();
        assert_eq!(via.dims(), direct.dims());
        assert!(via.is_isomorphic(&direct).unwrap());
        // and the small sanity case
        let _ = m.pushforward(&c1).unwrap();
    }

    #[test]
    fn ses_at_vertex_examples() {
        let line = StratifiedLine::from_points(coords(&[1, 2])).unwrap();
        let s = ZZModule::skyscraper(line, StratumId::vertex(1), 2, f2()).unwrap();
        let (off, sky) = s.ses_at_vertex(StratumId::vertex(1)).unwrap();
        assert_eq!(off, ZZModule::zero(s.line().clone(), f2()));
        assert_eq!(sky, s);

        let c = constant_module(&[1, 2]);
        let (off, sky) = c.ses_at_vertex(StratumId::vertex(2)).unwrap();
        assert_eq!(off.dims(), &[1, 1, 1, 0, 1]);
        assert_eq!(sky.dims(), &[0, 0, 0, 1, 0]);
        for s in c.line().strata() {
            assert_eq!(c.dim(s), off.dim(s) + sky.dim(s));
        }
    }

    #[test]
    fn subdivide_examples() {
        let line = StratifiedLine::from_points(coords(&[1, 2])).unwrap();
        let z = ZZModule::zero(line.clone(), f2());
        let z2 = z.subdivide(StratumId::edge(1), &parse_mid()).unwrap();
        assert_eq!(z2.line().k(), 3);
        assert!(z2.total_dim() == 0);

        let c = constant_module(&[1, 2]);
        let sub = c.subdivide(StratumId::edge(1), &parse_mid()).unwrap();
        assert_eq!(sub.dims(), &[1; 7]);
        // subdividing at two points commutes
        let a = c
            .subdivide(StratumId::edge(0), &int(0))
            .unwrap()
            .subdivide(StratumId::edge(2), &parse_mid())
            .unwrap();
        let b = c
            .subdivide(StratumId::edge(1), &parse_mid())
            .unwrap()
            .subdivide(StratumId::edge(0), &int(0))
            .unwrap();
        assert_eq!(a, b);

        assert_eq!(
            c.subdivide(StratumId::edge(1), &int(5)),
            Err(CosheafError::PointNotInEdge)
        );
        assert_eq!(
            c.subdivide(StratumId::edge(1), &int(1)),
            Err(CosheafError::PointNotInEdge)
        );
    }

    fn parse_mid() -> BigRational {
        crate::rational::parse_rational("3/2").unwrap()
    }

    #[test]
    fn weak_normal_form_examples() {
        // constant module contracts all the way down to the bare line
        let c = constant_module(&[1, 2, 3]);
        let n = c.weak_normal_form();
        assert_eq!(n.line().k(), 0);
        assert_eq!(n.dims(), &[1]);

        // subdivision then normalization returns the normal form of the input
        let m = filtration_module(&hollow_then_filled(), 1, f2());
        let nf = m.weak_normal_form();
        let sub = m.subdivide(StratumId::edge(0), &int(0)).unwrap();
        assert_eq!(sub.weak_normal_form(), nf);
        // idempotent
        assert_eq!(nf.weak_normal_form(), nf);

        // a genuine rank drop at each vertex survives normalization
        let line = StratifiedLine::from_points(coords(&[1, 2])).unwrap();
        let mut maps = BTreeMap::new();
        maps.insert((StratumId::edge(0), StratumId::vertex(1)), Mat::zero(f2(), 1, 1));
        maps.insert((StratumId::edge(1), StratumId::vertex(1)), Mat::identity(f2(), 1));
        maps.insert((StratumId::edge(1), StratumId::vertex(2)), Mat::identity(f2(), 1));
        maps.insert((StratumId::edge(2), StratumId::vertex(2)), Mat::zero(f2(), 1, 1));
        let m = ZZModule::new(line, f2(), vec![1; 5], maps).unwrap();
        assert_eq!(m.weak_normal_form(), m);
    }

    #[test]
    fn module_json_round_trip() {
        let m = filtration_module(&hollow_then_filled(), 1, f2());
        let v = m.to_json_value();
        let back = ZZModule::from_json_value(&v).unwrap();
        assert_eq!(back, m);

        // missing maps default to zero
        let line_json = serde_json::json!({
            "field": 2,
            "vertices": ["1", "2"],
            "dims": [1, 1, 1, 1, 1],
            "maps": []
        });
        let z = ZZModule::from_json_value(&line_json).unwrap();
        assert!(z.map(StratumId::edge(0), StratumId::vertex(1)).is_zero_matrix());

        // shape errors are rejected
        let bad = serde_json::json!({
            "field": 2,
            "vertices": ["1"],
            "dims": [1, 1, 1],
            "maps": [{"edge": "1/2", "to": "1", "matrix": [[1, 0]]}]
        });
        assert!(ZZModule::from_json_value(&bad).is_err());
    }

    #[test]
    fn is_isomorphic_counterexample() {
        // equal dimensions but different composite ranks
        let idm = PosetRep::monotone(
            coords(&[1]),
            vec![1],
            vec![],
            f2(),
        )
        .unwrap()
        .propagate();
        let mut maps = idm.maps().clone();
        maps.insert((StratumId::edge(1), StratumId::vertex(1)), Mat::zero(f2(), 1, 1));
        let zeroed = ZZModule::new(idm.line().clone(), f2(), idm.dims().to_vec(), maps).unwrap();
        assert!(!idm.is_isomorphic(&zeroed).unwrap());
        assert!(idm.is_isomorphic(&idm).unwrap());

        let other = constant_module(&[5]);
        assert_eq!(idm.is_isomorphic(&other), Err(CosheafError::LineMismatch));

        // direct sums commute up to isomorphism
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..10 {
            let m = crate::sampling::random_module(&mut rng, f2(), 3, 2);
            let n = crate::sampling::random_module_on(&mut rng, m.line().clone(), f2(), 2);
            assert!(m
                .direct_sum(&n)
                .unwrap()
                .is_isomorphic(&n.direct_sum(&m).unwrap())
                .unwrap());
        }
    }
}
