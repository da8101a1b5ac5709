//! Exact linear algebra over a prime field or the rationals.
//!
//! This is the computational kernel of the crate: ranks, kernels, quotient
//! dimensions, and limits/colimits of finite diagrams of vector spaces. All
//! arithmetic is exact (machine integers mod `p`, or arbitrary-precision
//! rationals) and all eliminations use deterministic first-nonzero pivoting,
//! so identical inputs give bit-identical outputs.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{format_rational, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactLinError {
    #[error("characteristic {0} is neither zero nor prime")]
    NonPrimeCharacteristic(u64),
    #[error("subspace is not contained in the ambient space")]
    SubspaceNotContained,
    #[error("diagram is not connected")]
    DisconnectedDiagram,
    #[error("matrix entry '{0}' is not valid for this field")]
    BadEntry(String),
}

/// The coefficient field: `F_p` for a prime `p`, or the rationals when the
/// characteristic is zero. Defaults to `F_2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldSpec {
    characteristic: u64,
}

/// A single field element. Prime-field values are kept reduced into
/// `0..p`; rational values are arbitrary-precision.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Scalar {
    Mod(u64),
    Rat(BigRational),
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    // Deterministic Miller-Rabin for u64 with the standard witness set.
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec { characteristic: 2 }
    }
}

impl FieldSpec {
    pub const F2: FieldSpec = FieldSpec { characteristic: 2 };
    pub const RATIONALS: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn new(characteristic: u64) -> Result<Self, ExactLinError> {
        if characteristic == 0 || is_prime_u64(characteristic) {
            Ok(FieldSpec { characteristic })
        } else {
            Err(ExactLinError::NonPrimeCharacteristic(characteristic))
        }
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn zero(&self) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::zero()),
            _ => Scalar::Mod(0),
        }
    }

    pub fn one(&self) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::one()),
            _ => Scalar::Mod(1),
        }
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(BigRational::from_integer(n.into())),
            p => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Mod(r)
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Mod(v) => *v == 0,
            Scalar::Rat(q) => q.is_zero(),
        }
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod((x + y) % self.characteristic),
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => panic!("mixed scalar kinds"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Mod(0) => Scalar::Mod(0),
            Scalar::Mod(v) => Scalar::Mod(self.characteristic - v),
            Scalar::Rat(q) => Scalar::Rat(-q),
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (a, b) {
            (Scalar::Mod(x), Scalar::Mod(y)) => Scalar::Mod(mul_mod(*x, *y, self.characteristic)),
            (Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x * y),
            _ => panic!("mixed scalar kinds"),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Mod(0) => panic!("inverse of zero"),
            Scalar::Mod(v) => Scalar::Mod(pow_mod(*v, self.characteristic - 2, self.characteristic)),
            Scalar::Rat(q) => {
                assert!(!q.is_zero(), "inverse of zero");
                Scalar::Rat(q.recip())
            }
        }
    }

    /// Parse a JSON matrix entry: an integer (reduced into the field) or, for
    /// characteristic zero, a `"n/d"` string.
    pub fn scalar_from_json(&self, v: &serde_json::Value) -> Result<Scalar, ExactLinError> {
        let bad = || ExactLinError::BadEntry(v.to_string());
        if let Some(n) = v.as_i64() {
            return Ok(self.from_i64(n));
        }
        if let Some(s) = v.as_str() {
            let q = parse_rational(s).map_err(|_| bad())?;
            match self.characteristic {
                0 => return Ok(Scalar::Rat(q)),
                p => {
                    // Accept fraction strings mod p as long as the denominator is a unit.
                    let num = q.numer();
                    let den = q.denom();
                    let pr: num_bigint::BigInt = (p as i64).into();
                    let nm = ((num % &pr) + &pr) % &pr;
                    let dm = ((den % &pr) + &pr) % &pr;
                    let n_u: u64 = nm.try_into().map_err(|_| bad())?;
                    let d_u: u64 = dm.try_into().map_err(|_| bad())?;
                    if d_u == 0 {
                        return Err(bad());
                    }
                    return Ok(self.mul(&Scalar::Mod(n_u), &self.inv(&Scalar::Mod(d_u))));
                }
            }
        }
        Err(bad())
    }

    pub fn scalar_to_json(&self, s: &Scalar) -> serde_json::Value {
        match s {
            Scalar::Mod(v) => serde_json::json!(v),
            Scalar::Rat(q) => {
                if q.denom().is_one() && q.numer().abs() <= num_bigint::BigInt::from(i64::MAX) {
                    let n: i64 = q.numer().try_into().unwrap();
                    serde_json::json!(n)
                } else {
                    serde_json::json!(format_rational(q))
                }
            }
        }
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scalar::Mod(v) => write!(f, "{v}"),
            Scalar::Rat(q) => write!(f, "{}", format_rational(q)),
        }
    }
}

/// A dense row-major matrix over a fixed field.
///
/// Shapes are part of the value: a `0×n` matrix is distinct from an `n×0`
/// one, and both show up routinely (maps in or out of the zero space).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    rows: usize,
    cols: usize,
    field: FieldSpec,
    entries: Vec<Scalar>,
}

impl Mat {
    pub fn new(field: FieldSpec, rows: usize, cols: usize, entries: Vec<Scalar>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Mat { rows, cols, field, entries }
    }

    pub fn zero(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, field, entries: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Mat::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Build from integer literals, reducing into the field. Test-friendly.
    pub fn from_i64(field: FieldSpec, rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat::new(field, rows, cols, data.iter().map(|&n| field.from_i64(n)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(|e| self.field.is_zero(e))
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let f = self.field;
        let mut out = Mat::zero(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let v = f.add(out.get(i, j), &f.mul(a, b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows, "row mismatch in hstack");
        let mut out = Mat::zero(self.field, self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..rhs.cols {
                out.set(i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        out
    }

    pub fn block_diag(&self, rhs: &Mat) -> Mat {
        let mut out = Mat::zero(self.field, self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out.set(self.rows + i, self.cols + j, rhs.get(i, j).clone());
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Mat {
        let mut out = Mat::zero(self.field, self.rows, 1);
        for i in 0..self.rows {
            out.set(i, 0, self.get(i, j).clone());
        }
        out
    }

    /// Keep only the given rows, in order.
    pub fn select_rows(&self, rows: &[usize]) -> Mat {
        let mut out = Mat::zero(self.field, rows.len(), self.cols);
        for (oi, &ri) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(oi, j, self.get(ri, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form with the pivot column indices.
    /// First-nonzero pivoting, no heuristics: fully deterministic.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = f.inv(m.get(r, c));
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), &inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || f.is_zero(m.get(i, c)) {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), &f.mul(&factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Rank over the field; `0 <= rank <= min(rows, cols)`.
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the null space, as matrix columns. The number of columns is
    /// always `cols - rank`.
    pub fn kernel_basis(&self) -> Mat {
        let f = self.field;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Mat::zero(f, self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, f.one());
            for (pi, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(r.get(pi, fc)));
            }
        }
        out
    }

    /// Solve `self * X = rhs` for one particular solution (free variables set
    /// to zero). `None` when inconsistent.
    pub fn solve(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows, "row mismatch in solve");
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let f = self.field;
        let mut x = Mat::zero(f, self.cols, rhs.cols);
        for (pi, &pc) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x.set(pc, j, r.get(pi, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        if self.rank() != self.rows {
            return None;
        }
        self.solve(&Mat::identity(self.field, self.rows))
    }

    /// Reduce the columns of `self` to a column-echelon basis of the column
    /// span (pivot entries normalized to one). Deterministic.
    pub fn column_reduced_basis(&self) -> Mat {
        let ech = Echelon::from_columns(self);
        ech.basis_matrix(self.field, self.rows)
    }
}

/// Incrementally built column echelon: columns keyed by their pivot row,
/// pivot entries normalized to one. Silent workhorse behind quotient maps.
pub(crate) struct Echelon {
    n: usize,
    cols: std::collections::BTreeMap<usize, Vec<Scalar>>,
}

impl Echelon {
    pub fn new(n: usize) -> Self {
        Echelon { n, cols: Default::default() }
    }

    pub fn from_columns(m: &Mat) -> Self {
        let mut e = Echelon::new(m.rows());
        for j in 0..m.cols() {
            let col: Vec<Scalar> = (0..m.rows()).map(|i| m.get(i, j).clone()).collect();
            e.insert(m.field(), col);
        }
        e
    }

    /// Reduce `v` against the echelon in place; afterwards `v` is zero at
    /// every pivot row, and `v == 0` iff the original was in the span.
    pub fn reduce(&self, f: FieldSpec, v: &mut [Scalar]) {
        for (&pr, col) in self.cols.iter() {
            let c = v[pr].clone();
            if f.is_zero(&c) {
                continue;
            }
            for k in pr..self.n {
                if !f.is_zero(&col[k]) {
                    v[k] = f.sub(&v[k], &f.mul(&c, &col[k]));
                }
            }
        }
    }

    /// Reduce and insert if independent; returns true when the vector grew
    /// the span.
    pub fn insert(&mut self, f: FieldSpec, mut v: Vec<Scalar>) -> bool {
        self.reduce(f, &mut v);
        let Some(p) = v.iter().position(|e| !f.is_zero(e)) else {
            return false;
        };
        let inv = f.inv(&v[p]);
        for e in v.iter_mut() {
            *e = f.mul(e, &inv);
        }
        self.cols.insert(p, v);
        true
    }

    pub fn pivot_rows(&self) -> Vec<usize> {
        self.cols.keys().copied().collect()
    }

    pub fn basis_matrix(&self, f: FieldSpec, n: usize) -> Mat {
        let mut out = Mat::zero(f, n, self.cols.len());
        for (j, col) in self.cols.values().enumerate() {
            for i in 0..n {
                out.set(i, j, col[i].clone());
            }
        }
        out
    }
}

/// Dimension of `span(ambient) / span(sub)` where both arguments are read as
/// column spans. Errors when the subspace is not contained in the ambient.
pub fn quotient_dim(ambient: &Mat, sub: &Mat) -> Result<usize, ExactLinError> {
    assert_eq!(ambient.rows(), sub.rows(), "ambient/sub live in different spaces");
    let ra = ambient.rank();
    if ambient.hstack(sub).rank() != ra {
        return Err(ExactLinError::SubspaceNotContained);
    }
    Ok(ra - sub.rank())
}

/// An arrow in a finite diagram of vector spaces.
#[derive(Clone, Debug)]
pub struct QuiverArrow {
    pub source: usize,
    pub target: usize,
    pub map: Mat,
}

/// A finite diagram of vector spaces: node dimensions plus arrows between
/// them. Colimits implement cosheaf gluing; limits implement costalks.
#[derive(Clone, Debug)]
pub struct QuiverDiagram {
    field: FieldSpec,
    nodes: Vec<usize>,
    arrows: Vec<QuiverArrow>,
}

impl QuiverDiagram {
    pub fn new(field: FieldSpec, nodes: Vec<usize>, arrows: Vec<QuiverArrow>) -> Self {
        for a in &arrows {
            assert!(a.source < nodes.len() && a.target < nodes.len(), "arrow endpoint out of range");
            assert_eq!(a.map.cols(), nodes[a.source], "arrow cols must match source dim");
            assert_eq!(a.map.rows(), nodes[a.target], "arrow rows must match target dim");
        }
        QuiverDiagram { field, nodes, arrows }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn arrows(&self) -> &[QuiverArrow] {
        &self.arrows
    }

    fn offsets(&self) -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(self.nodes.len());
        let mut total = 0;
        for &d in &self.nodes {
            off.push(total);
            total += d;
        }
        (off, total)
    }

    fn is_connected(&self) -> bool {
        let n = self.nodes.len();
        if n == 0 {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for a in &self.arrows {
            adj[a.source].push(a.target);
            adj[a.target].push(a.source);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Colimit of the diagram: `(⊕ nodes) / span{ι_s v − ι_t f(v)}`.
///
/// Returns the dimension together with one projection matrix per node; the
/// projections commute with every arrow (`π_t ∘ f = π_s`).
pub fn diagram_colimit(d: &QuiverDiagram) -> (usize, Vec<Mat>) {
    let f = d.field;
    let (off, total) = d.offsets();
    let mut ech = Echelon::new(total);
    for a in &d.arrows {
        for i in 0..d.nodes[a.source] {
            let mut v = vec![f.zero(); total];
            v[off[a.source] + i] = f.one();
            for r in 0..d.nodes[a.target] {
                let e = a.map.get(r, i);
                if !f.is_zero(e) {
                    v[off[a.target] + r] = f.sub(&v[off[a.target] + r], e);
                }
            }
            ech.insert(f, v);
        }
    }
    let pivot_rows = ech.pivot_rows();
    let coord_rows: Vec<usize> = (0..total).filter(|r| !pivot_rows.contains(r)).collect();
    let dim = coord_rows.len();
    let mut projections = Vec::with_capacity(d.nodes.len());
    for (s, &ds) in d.nodes.iter().enumerate() {
        let mut proj = Mat::zero(f, dim, ds);
        for i in 0..ds {
            let mut v = vec![f.zero(); total];
            v[off[s] + i] = f.one();
            ech.reduce(f, &mut v);
            for (r, &row) in coord_rows.iter().enumerate() {
                proj.set(r, i, v[row].clone());
            }
        }
        projections.push(proj);
    }
    (dim, projections)
}

/// Limit of the diagram: compatible tuples in `⊕ nodes`.
///
/// Returns the dimension together with one inclusion matrix per node
/// (`f ∘ incl_s = incl_t` for every arrow `f: s → t`).
pub fn diagram_limit(d: &QuiverDiagram) -> (usize, Vec<Mat>) {
    let f = d.field;
    let (off, total) = d.offsets();
    let constraint_rows: usize = d.arrows.iter().map(|a| d.nodes[a.target]).sum();
    let mut a_mat = Mat::zero(f, constraint_rows, total);
    let mut row = 0;
    for a in &d.arrows {
        for r in 0..d.nodes[a.target] {
            for c in 0..d.nodes[a.source] {
                a_mat.set(row + r, off[a.source] + c, a.map.get(r, c).clone());
            }
            // accumulate: a self-loop arrow contributes f - I on one block
            let col = off[a.target] + r;
            let v = f.sub(a_mat.get(row + r, col), &f.one());
            a_mat.set(row + r, col, v);
        }
        row += d.nodes[a.target];
    }
    let kernel = a_mat.kernel_basis();
    let dim = kernel.cols();
    let inclusions = d
        .nodes
        .iter()
        .enumerate()
        .map(|(s, &ds)| kernel.select_rows(&(off[s]..off[s] + ds).collect::<Vec<_>>()))
        .collect();
    (dim, inclusions)
}

/// Rank of the canonical composite `lim → node → colim`, which is independent
/// of the chosen node for a connected diagram.
pub fn lim_to_colim_rank(d: &QuiverDiagram) -> Result<usize, ExactLinError> {
    if !d.is_connected() {
        return Err(ExactLinError::DisconnectedDiagram);
    }
    let (_, inclusions) = diagram_limit(d);
    let (_, projections) = diagram_colimit(d);
    Ok(projections[0].matmul(&inclusions[0]).rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> FieldSpec {
        FieldSpec::F2
    }

    #[test]
    fn field_spec_validation() {
        assert!(FieldSpec::new(0).is_ok());
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(97).is_ok());
        assert_eq!(FieldSpec::new(1), Err(ExactLinError::NonPrimeCharacteristic(1)));
        assert_eq!(FieldSpec::new(6), Err(ExactLinError::NonPrimeCharacteristic(6)));
        assert!(FieldSpec::new((1 << 31) - 1).is_ok()); // Mersenne prime
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(f2(), 2).rank(), 2);
        assert_eq!(Mat::from_i64(f2(), 2, 2, &[1, 1, 1, 1]).rank(), 1);
        assert_eq!(Mat::from_i64(f2(), 1, 1, &[2]).rank(), 0);
        assert_eq!(Mat::from_i64(FieldSpec::new(3).unwrap(), 1, 1, &[2]).rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Mat::identity(f2(), 3).kernel_basis().cols(), 0);
        let z = Mat::zero(f2(), 3, 2);
        assert_eq!(z.kernel_basis().cols(), 2);
        let m = Mat::from_i64(f2(), 2, 2, &[1, 1, 1, 1]);
        let k = m.kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.get(0, 0), &Scalar::Mod(1));
        assert_eq!(k.get(1, 0), &Scalar::Mod(1));
    }

    #[test]
    fn rank_plus_nullity_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [f2(), FieldSpec::new(5).unwrap(), FieldSpec::RATIONALS] {
            for _ in 0..40 {
                let rows = rng.gen_range(0..6);
                let cols = rng.gen_range(0..6);
                let data: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(-4..5)).collect();
                let m = Mat::from_i64(field, rows, cols, &data);
                let k = m.kernel_basis();
                assert_eq!(m.rank() + k.cols(), cols);
                if k.cols() > 0 {
                    assert!(m.matmul(&k).is_zero_matrix());
                }
            }
        }
    }

    #[test]
    fn quotient_dim_examples() {
        let id2 = Mat::identity(f2(), 2);
        assert_eq!(quotient_dim(&id2, &Mat::zero(f2(), 2, 0)).unwrap(), 2);
        assert_eq!(quotient_dim(&id2, &id2.column(0)).unwrap(), 1);
        let ambient = Mat::from_i64(f2(), 2, 2, &[1, 1, 1, 0]);
        let sub = Mat::from_i64(f2(), 2, 1, &[0, 1]);
        assert_eq!(quotient_dim(&ambient, &sub).unwrap(), 1);
        // (1,0) is not in span{(1,1)}
        let amb2 = Mat::from_i64(f2(), 2, 1, &[1, 1]);
        let sub2 = Mat::from_i64(f2(), 2, 1, &[1, 0]);
        assert_eq!(quotient_dim(&amb2, &sub2), Err(ExactLinError::SubspaceNotContained));
    }

    #[test]
    fn solve_and_inverse() {
        let f = FieldSpec::new(5).unwrap();
        let a = Mat::from_i64(f, 2, 2, &[1, 2, 3, 4]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Mat::identity(f, 2));
        let singular = Mat::from_i64(f, 2, 2, &[1, 2, 2, 4]);
        assert!(singular.inverse().is_none());
        let rhs = Mat::from_i64(f, 2, 1, &[1, 0]);
        let x = a.solve(&rhs).unwrap();
        assert_eq!(a.matmul(&x), rhs);
        assert!(singular.solve(&rhs).is_none());
    }

    fn span_diagram(f: FieldSpec, left: i64, right: i64) -> QuiverDiagram {
        // node1 is the middle source: arrows 1 -> 0 and 1 -> 2.
        QuiverDiagram::new(
            f,
            vec![1, 1, 1],
            vec![
                QuiverArrow { source: 1, target: 0, map: Mat::from_i64(f, 1, 1, &[left]) },
                QuiverArrow { source: 1, target: 2, map: Mat::from_i64(f, 1, 1, &[right]) },
            ],
        )
    }

    #[test]
    fn colimit_examples() {
        let single = QuiverDiagram::new(f2(), vec![3], vec![]);
        let (dim, proj) = diagram_colimit(&single);
        assert_eq!(dim, 3);
        assert_eq!(proj[0], Mat::identity(f2(), 3));

        // Pushout of isos collapses everything to one copy.
        assert_eq!(diagram_colimit(&span_diagram(f2(), 1, 1)).0, 1);
        // One zero leg: middle identifies with the right copy and the left
        // copy stays; the relation span has rank two inside a rank-three sum.
        assert_eq!(diagram_colimit(&span_diagram(f2(), 0, 1)).0, 1);
        // Both legs zero: the middle node dies alone, leaving both ends.
        assert_eq!(diagram_colimit(&span_diagram(f2(), 0, 0)).0, 2);
    }

    #[test]
    fn colimit_projections_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.gen_range(1..5);
            let nodes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let mut arrows = Vec::new();
            for _ in 0..rng.gen_range(0..2 * n) {
                let s = rng.gen_range(0..n);
                let t = rng.gen_range(0..n);
                let data: Vec<i64> =
                    (0..nodes[s] * nodes[t]).map(|_| rng.gen_range(0..2)).collect();
                arrows.push(QuiverArrow {
                    source: s,
                    target: t,
                    map: Mat::from_i64(f2(), nodes[t], nodes[s], &data),
                });
            }
            let d = QuiverDiagram::new(f2(), nodes, arrows);
            let (_, proj) = diagram_colimit(&d);
            for a in d.arrows() {
                assert_eq!(proj[a.target].matmul(&a.map), proj[a.source]);
            }
            let (_, incl) = diagram_limit(&d);
            for a in d.arrows() {
                assert_eq!(a.map.matmul(&incl[a.source]), incl[a.target]);
            }
        }
    }

    fn cospan_diagram(f: FieldSpec, left: i64, right: i64) -> QuiverDiagram {
        // arrows 0 -> 1 and 2 -> 1.
        QuiverDiagram::new(
            f,
            vec![1, 1, 1],
            vec![
                QuiverArrow { source: 0, target: 1, map: Mat::from_i64(f, 1, 1, &[left]) },
                QuiverArrow { source: 2, target: 1, map: Mat::from_i64(f, 1, 1, &[right]) },
            ],
        )
    }

    #[test]
    fn limit_examples() {
        let single = QuiverDiagram::new(f2(), vec![4], vec![]);
        assert_eq!(diagram_limit(&single).0, 4);
        assert_eq!(diagram_limit(&cospan_diagram(f2(), 1, 1)).0, 1);
        // V -0-> V <-id- V: tuples (a, 0, 0).
        assert_eq!(diagram_limit(&cospan_diagram(f2(), 0, 1)).0, 1);
    }

    #[test]
    fn lim_to_colim_examples() {
        // All identities along a length-five zig-zag.
        let id = || Mat::identity(f2(), 1);
        let mut arrows = Vec::new();
        for i in 0..4usize {
            // alternate directions to make it a genuine zig-zag
            if i % 2 == 0 {
                arrows.push(QuiverArrow { source: i, target: i + 1, map: id() });
            } else {
                arrows.push(QuiverArrow { source: i + 1, target: i, map: id() });
            }
        }
        let d = QuiverDiagram::new(f2(), vec![1; 5], arrows.clone());
        assert_eq!(lim_to_colim_rank(&d).unwrap(), 1);

        // One zero arrow anywhere kills the rank.
        let mut arrows_zero = arrows;
        arrows_zero[2].map = Mat::zero(f2(), 1, 1);
        let dz = QuiverDiagram::new(f2(), vec![1; 5], arrows_zero);
        assert_eq!(lim_to_colim_rank(&dz).unwrap(), 0);

        // dims (1,2,1): injection into the middle, then a surjection out of it
        // that does not kill the image.
        let d3 = QuiverDiagram::new(
            f2(),
            vec![1, 2, 1],
            vec![
                QuiverArrow { source: 0, target: 1, map: Mat::from_i64(f2(), 2, 1, &[1, 0]) },
                QuiverArrow { source: 1, target: 2, map: Mat::from_i64(f2(), 1, 2, &[1, 1]) },
            ],
        );
        assert_eq!(lim_to_colim_rank(&d3).unwrap(), 1);

        let disconnected = QuiverDiagram::new(f2(), vec![1, 1], vec![]);
        assert_eq!(lim_to_colim_rank(&disconnected), Err(ExactLinError::DisconnectedDiagram));
    }

    #[test]
    fn lim_to_colim_isos_give_common_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let len = rng.gen_range(1..6);
            let dim = rng.gen_range(0..4);
            let f = FieldSpec::new(5).unwrap();
            let mut arrows = Vec::new();
            for i in 0..len - 1 {
                // a random invertible map: identity plus a strictly upper shear
                let mut m = Mat::identity(f, dim);
                if dim >= 2 {
                    m.set(0, dim - 1, f.from_i64(rng.gen_range(0..5)));
                }
                let (s, t) = if rng.gen_bool(0.5) { (i, i + 1) } else { (i + 1, i) };
                arrows.push(QuiverArrow { source: s, target: t, map: m });
            }
            let d = QuiverDiagram::new(f, vec![dim; len], arrows);
            assert_eq!(lim_to_colim_rank(&d).unwrap(), dim);
        }
    }

    #[test]
    fn lim_to_colim_independent_of_node() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..30 {
            let len = rng.gen_range(2..5);
            let nodes: Vec<usize> = (0..len).map(|_| rng.gen_range(0..3)).collect();
            let mut arrows = Vec::new();
            for i in 0..len - 1 {
                let (s, t) = if rng.gen_bool(0.5) { (i, i + 1) } else { (i + 1, i) };
                let data: Vec<i64> =
                    (0..nodes[s] * nodes[t]).map(|_| rng.gen_range(0..2)).collect();
                arrows.push(QuiverArrow {
                    source: s,
                    target: t,
                    map: Mat::from_i64(f2(), nodes[t], nodes[s], &data),
                });
            }
            let d = QuiverDiagram::new(f2(), nodes.clone(), arrows);
            let (_, incl) = diagram_limit(&d);
            let (_, proj) = diagram_colimit(&d);
            let ranks: Vec<usize> =
                (0..len).map(|i| proj[i].matmul(&incl[i]).rank()).collect();
            assert!(ranks.windows(2).all(|w| w[0] == w[1]), "composite differs by node");
        }
    }

    #[test]
    fn rationals_are_exact() {
        let f = FieldSpec::RATIONALS;
        // A matrix that would be numerically touchy in floating point.
        let m = Mat::new(
            f,
            2,
            2,
            vec![
                Scalar::Rat(parse_rational("1/3").unwrap()),
                Scalar::Rat(parse_rational("1/7").unwrap()),
                Scalar::Rat(parse_rational("2/6").unwrap()),
                Scalar::Rat(parse_rational("2/14").unwrap()),
            ],
        );
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn scalar_json_round_trip() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.scalar_from_json(&serde_json::json!(7)).unwrap(), Scalar::Mod(2));
        assert_eq!(f5.scalar_from_json(&serde_json::json!(-1)).unwrap(), Scalar::Mod(4));
        let q = FieldSpec::RATIONALS;
        let v = q.scalar_from_json(&serde_json::json!("3/2")).unwrap();
        assert_eq!(q.scalar_to_json(&v), serde_json::json!("3/2"));
        assert_eq!(q.scalar_to_json(&q.from_i64(4)), serde_json::json!(4));
        // 1/2 = 3 mod 5
        assert_eq!(f5.scalar_from_json(&serde_json::json!("1/2")).unwrap(), Scalar::Mod(3));
    }
}
