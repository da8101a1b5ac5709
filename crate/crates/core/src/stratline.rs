//! The real line stratified by a finite point set.
//!
//! A line with `k` marked points has `2k+1` strata listed left to right:
//! the unbounded edge `(-inf, p_1)`, then alternating vertices and edges,
//! ending with `(p_k, +inf)`. Strata are indexed by half-integers: vertex
//! `j` sits at index `j` and edge `j` (the one whose left endpoint is
//! vertex `j`, or `-inf` for `j = 0`) at index `j + 1/2`. The entrance-path
//! poset is then implicit: each edge maps into its incident vertices, and
//! `±1/2` index arithmetic navigates the incidences.

use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StratLineError {
    #[error("duplicate stratification point {0}")]
    DuplicatePoint(String),
    #[error("stratum {0} is not an edge")]
    NotAnEdge(StratumId),
    #[error("stratum {0} does not belong to this line")]
    InvalidStratum(StratumId),
    #[error("blocks are not weakly increasing and surjective: {0}")]
    NonMonotoneBlocks(String),
    #[error("index line must have vertices exactly at 1..n")]
    BadIndexLine,
    #[error("invalid stratum label '{0}'")]
    BadLabel(String),
    #[error("invalid stratified map: {0}")]
    InvalidMap(String),
}

/// A stratum index in `½ℤ`: even doubled values are vertices, odd ones are
/// edges. Ordering agrees with left-to-right position on the line.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StratumId {
    twice: usize,
}

impl StratumId {
    /// Vertex `j`, for `j >= 1`.
    pub fn vertex(j: usize) -> StratumId {
        assert!(j >= 1, "vertices are numbered from 1");
        StratumId { twice: 2 * j }
    }

    /// Edge `j` at half-integer index `j + 1/2`; edge 0 is the leftmost
    /// unbounded component.
    pub fn edge(j: usize) -> StratumId {
        StratumId { twice: 2 * j + 1 }
    }

    pub fn is_vertex(&self) -> bool {
        self.twice.is_multiple_of(2)
    }

    pub fn is_edge(&self) -> bool {
        !self.is_vertex()
    }

    pub fn vertex_index(&self) -> Option<usize> {
        self.is_vertex().then_some(self.twice / 2)
    }

    pub fn edge_index(&self) -> Option<usize> {
        self.is_edge().then_some((self.twice - 1) / 2)
    }

    /// Doubled half-integer index; `vertex(j).twice() == 2j`.
    pub fn twice(&self) -> usize {
        self.twice
    }

    pub fn from_twice(twice: usize) -> StratumId {
        assert!(twice >= 1);
        StratumId { twice }
    }

    /// Zero-based position in the left-to-right stratum order.
    pub fn pos(&self) -> usize {
        self.twice - 1
    }

    pub fn from_pos(pos: usize) -> StratumId {
        StratumId { twice: pos + 1 }
    }

    /// The stratum one half-step to the left, if any.
    pub fn left(&self) -> Option<StratumId> {
        (self.twice > 1).then(|| StratumId { twice: self.twice - 1 })
    }

    pub fn right(&self) -> StratumId {
        StratumId { twice: self.twice + 1 }
    }

    /// Parse a label as emitted by `Display`: `"2"` or `"3/2"`.
    pub fn parse(label: &str) -> Result<StratumId, StratLineError> {
        let bad = || StratLineError::BadLabel(label.to_string());
        let q = parse_rational(label).map_err(|_| bad())?;
        let two: BigRational = crate::rational::int(2);
        let doubled = &q * &two;
        if !num_traits::One::is_one(doubled.denom()) {
            return Err(bad());
        }
        let twice: usize = doubled.numer().try_into().map_err(|_| bad())?;
        if twice == 0 {
            return Err(bad());
        }
        Ok(StratumId { twice })
    }
}

impl std::fmt::Display for StratumId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_vertex() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// The real line stratified by finitely many points with exact rational
/// coordinates. An empty point set is allowed (a single unbounded stratum);
/// it is what repeated weak-equivalence contractions converge to.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StratifiedLine {
    vertex_coords: Vec<BigRational>,
}

impl StratifiedLine {
    /// Build a line from stratification points. The points are sorted;
    /// duplicates are rejected.
    pub fn from_points(mut coords: Vec<BigRational>) -> Result<StratifiedLine, StratLineError> {
        coords.sort();
        for w in coords.windows(2) {
            if w[0] == w[1] {
                return Err(StratLineError::DuplicatePoint(format_rational(&w[0])));
            }
        }
        Ok(StratifiedLine { vertex_coords: coords })
    }

    /// Number of zero-strata (marked points).
    pub fn k(&self) -> usize {
        self.vertex_coords.len()
    }

    /// Total number of strata, `2k + 1`.
    pub fn num_strata(&self) -> usize {
        2 * self.k() + 1
    }

    pub fn vertex_coords(&self) -> &[BigRational] {
        &self.vertex_coords
    }

    pub fn coord(&self, v: StratumId) -> Option<&BigRational> {
        let j = v.vertex_index()?;
        self.vertex_coords.get(j - 1)
    }

    pub fn contains(&self, s: StratumId) -> bool {
        s.pos() < self.num_strata()
    }

    /// All strata, left to right.
    pub fn strata(&self) -> impl Iterator<Item = StratumId> {
        (0..self.num_strata()).map(StratumId::from_pos)
    }

    pub fn vertices(&self) -> impl Iterator<Item = StratumId> {
        (1..=self.k()).map(StratumId::vertex)
    }

    pub fn edges(&self) -> impl Iterator<Item = StratumId> {
        (0..=self.k()).map(StratumId::edge)
    }

    pub fn leftmost_edge(&self) -> StratumId {
        StratumId::edge(0)
    }

    pub fn rightmost_edge(&self) -> StratumId {
        StratumId::edge(self.k())
    }

    /// The vertices incident to an edge; boundary edges have one.
    pub fn incidences(&self, e: StratumId) -> Result<Vec<StratumId>, StratLineError> {
        if !self.contains(e) {
            return Err(StratLineError::InvalidStratum(e));
        }
        let j = e.edge_index().ok_or(StratLineError::NotAnEdge(e))?;
        let mut out = Vec::new();
        if j >= 1 {
            out.push(StratumId::vertex(j));
        }
        if j < self.k() {
            out.push(StratumId::vertex(j + 1));
        }
        Ok(out)
    }

    /// The entrance-path poset: objects are strata, generating relations are
    /// exactly edge → incident vertex. The Hasse diagram is a path.
    pub fn zz_poset(&self) -> ZZPoset {
        let mut relations = Vec::new();
        for e in self.edges() {
            for v in self.incidences(e).unwrap() {
                relations.push((e, v));
            }
        }
        ZZPoset { objects: self.strata().collect(), relations }
    }

    /// The stratum containing a point of the line.
    pub fn stratum_of_point(&self, x: &BigRational) -> StratumId {
        for (i, c) in self.vertex_coords.iter().enumerate() {
            if x == c {
                return StratumId::vertex(i + 1);
            }
            if x < c {
                return StratumId::edge(i);
            }
        }
        self.rightmost_edge()
    }

    /// A rational sample point inside a stratum: the vertex coordinate, an
    /// edge midpoint, or one unit beyond the boundary for unbounded edges.
    pub fn sample_point(&self, s: StratumId) -> BigRational {
        let one = crate::rational::int(1);
        if let Some(j) = s.vertex_index() {
            return self.vertex_coords[j - 1].clone();
        }
        let j = s.edge_index().unwrap();
        if self.k() == 0 {
            return crate::rational::int(0);
        }
        if j == 0 {
            return &self.vertex_coords[0] - &one;
        }
        if j == self.k() {
            return &self.vertex_coords[self.k() - 1] + &one;
        }
        (&self.vertex_coords[j - 1] + &self.vertex_coords[j]) / crate::rational::int(2)
    }

    pub fn labels(&self) -> Vec<String> {
        self.strata().map(|s| s.to_string()).collect()
    }

    pub fn vertex_labels(&self) -> Vec<String> {
        self.vertex_coords.iter().map(format_rational).collect()
    }

    pub fn from_vertex_labels(labels: &[String]) -> Result<StratifiedLine, StratLineError> {
        let coords = labels
            .iter()
            .map(|s| parse_rational(s).map_err(|e| StratLineError::BadLabel(e.0)))
            .collect::<Result<Vec<_>, _>>()?;
        StratifiedLine::from_points(coords)
    }
}

/// The entrance-path poset of a stratified line.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZZPoset {
    pub objects: Vec<StratumId>,
    pub relations: Vec<(StratumId, StratumId)>,
}

/// A stratified map between two stratified lines, recorded at the stratum
/// level: every source stratum is assigned a target stratum.
///
/// Valid maps are weakly order-preserving, surjective, and pull each target
/// edge back to exactly one source stratum, which must be an edge.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StratifiedLineMap {
    pub source: StratifiedLine,
    pub target: StratifiedLine,
    /// Target stratum for each source stratum, indexed by source position.
    pub assignment: Vec<StratumId>,
}

impl StratifiedLineMap {
    pub fn identity(line: &StratifiedLine) -> StratifiedLineMap {
        StratifiedLineMap {
            source: line.clone(),
            target: line.clone(),
            assignment: line.strata().collect(),
        }
    }

    pub fn apply(&self, s: StratumId) -> StratumId {
        self.assignment[s.pos()]
    }

    /// Check the stratified-map invariants.
    pub fn is_valid(&self) -> bool {
        if self.assignment.len() != self.source.num_strata() {
            return false;
        }
        if self.assignment.iter().any(|t| !self.target.contains(*t)) {
            return false;
        }
        // weakly order-preserving
        if self.assignment.windows(2).any(|w| w[0] > w[1]) {
            return false;
        }
        // surjective
        let mut hit = vec![false; self.target.num_strata()];
        for t in &self.assignment {
            hit[t.pos()] = true;
        }
        if !hit.iter().all(|h| *h) {
            return false;
        }
        // each target edge is the image of exactly one source stratum, an edge
        for te in self.target.edges() {
            let preimage: Vec<StratumId> = self
                .source
                .strata()
                .filter(|s| self.apply(*s) == te)
                .collect();
            if preimage.len() != 1 || !preimage[0].is_edge() {
                return false;
            }
        }
        true
    }

    /// The unique source edge mapping onto a target edge.
    pub fn edge_preimage(&self, te: StratumId) -> Option<StratumId> {
        self.source
            .strata()
            .find(|s| self.apply(*s) == te && s.is_edge())
    }

    /// The contiguous run of source strata mapping into the open star of a
    /// target vertex (the target vertex plus its two adjacent edges).
    pub fn star_preimage(&self, tv: StratumId) -> Vec<StratumId> {
        let j = tv.vertex_index().expect("star_preimage takes a vertex");
        let left = StratumId::edge(j - 1);
        let right = StratumId::edge(j);
        self.source
            .strata()
            .filter(|s| {
                let t = self.apply(*s);
                t == left || t == tv || t == right
            })
            .collect()
    }

    pub fn compose(&self, then: &StratifiedLineMap) -> Result<StratifiedLineMap, StratLineError> {
        if self.target != then.source {
            return Err(StratLineError::InvalidMap(
                "composition endpoints do not match".into(),
            ));
        }
        Ok(StratifiedLineMap {
            source: self.source.clone(),
            target: then.target.clone(),
            assignment: self.assignment.iter().map(|s| then.apply(*s)).collect(),
        })
    }
}

/// The collapse map from an index line (vertices at `1..n`) onto the line of
/// monotone filtration values `m_1 < ... < m_p`.
///
/// `block_of[i-1] = j` says index step `i` realizes value `m_j`; blocks must
/// be weakly increasing and hit every value. Index strata strictly inside a
/// block collapse onto the block's target vertex, the single transition edge
/// of each consecutive block pair maps onto the target edge between their
/// values, and the unbounded edges map to the unbounded edges.
pub fn collapse_map(
    index_line: &StratifiedLine,
    monotone_values: &[BigRational],
    block_of: &[usize],
) -> Result<StratifiedLineMap, StratLineError> {
    let n = index_line.k();
    if block_of.len() != n || n == 0 {
        return Err(StratLineError::NonMonotoneBlocks(format!(
            "expected {} block assignments",
            n
        )));
    }
    for (i, c) in index_line.vertex_coords().iter().enumerate() {
        if *c != crate::rational::int(i as i64 + 1) {
            return Err(StratLineError::BadIndexLine);
        }
    }
    let p = monotone_values.len();
    let target = StratifiedLine::from_points(monotone_values.to_vec())?;
    if target.k() != p {
        return Err(StratLineError::DuplicatePoint("monotone values".into()));
    }
    if block_of[0] != 1 || block_of[n - 1] != p {
        return Err(StratLineError::NonMonotoneBlocks(
            "blocks must start at 1 and end at p".into(),
        ));
    }
    for w in block_of.windows(2) {
        if w[1] != w[0] && w[1] != w[0] + 1 {
            return Err(StratLineError::NonMonotoneBlocks(format!(
                "block step {} -> {}",
                w[0], w[1]
            )));
        }
    }

    let mut assignment = Vec::with_capacity(index_line.num_strata());
    for s in index_line.strata() {
        let t = if let Some(i) = s.vertex_index() {
            StratumId::vertex(block_of[i - 1])
        } else {
            let j = s.edge_index().unwrap();
            if j == 0 {
                StratumId::edge(0)
            } else if j == n {
                StratumId::edge(p)
            } else if block_of[j - 1] == block_of[j] {
                StratumId::vertex(block_of[j - 1])
            } else {
                // transition edge between blocks j and j+1
                StratumId::edge(block_of[j - 1])
            }
        };
        assignment.push(t);
    }
    Ok(StratifiedLineMap { source: index_line.clone(), target, assignment })
}

/// Convenience: the index line with vertices at `1..n`.
pub fn index_line(n: usize) -> StratifiedLine {
    StratifiedLine::from_points((1..=n as i64).map(crate::rational::int).collect()).unwrap()
}

// Wire format for stratified maps: vertex coordinate lists for both lines
// plus one (source stratum, target stratum) label pair per source stratum.
#[derive(Serialize, Deserialize)]
struct MapWire {
    source_vertices: Vec<String>,
    target_vertices: Vec<String>,
    assignment: Vec<(String, String)>,
}

impl StratifiedLineMap {
    pub fn to_json_value(&self) -> serde_json::Value {
        let wire = MapWire {
            source_vertices: self.source.vertex_labels(),
            target_vertices: self.target.vertex_labels(),
            assignment: self
                .source
                .strata()
                .map(|s| (s.to_string(), self.apply(s).to_string()))
                .collect(),
        };
        serde_json::to_value(wire).unwrap()
    }

    pub fn from_json_value(v: &serde_json::Value) -> Result<StratifiedLineMap, StratLineError> {
        let wire: MapWire = serde_json::from_value(v.clone())
            .map_err(|e| StratLineError::InvalidMap(e.to_string()))?;
        let source = StratifiedLine::from_vertex_labels(&wire.source_vertices)?;
        let target = StratifiedLine::from_vertex_labels(&wire.target_vertices)?;
        let mut by_source: BTreeMap<StratumId, StratumId> = BTreeMap::new();
        for (s, t) in &wire.assignment {
            by_source.insert(StratumId::parse(s)?, StratumId::parse(t)?);
        }
        let assignment = source
            .strata()
            .map(|s| {
                by_source
                    .get(&s)
                    .copied()
                    .ok_or_else(|| StratLineError::InvalidMap(format!("stratum {s} unassigned")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let map = StratifiedLineMap { source, target, assignment };
        if !map.is_valid() {
            return Err(StratLineError::InvalidMap("stratified-map invariants violated".into()));
        }
        Ok(map)
    }
}
