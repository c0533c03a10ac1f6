//! Exterior powers, stochastic-matrix classification and permutation data.

mod s4;

use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::smallnum::{det, orthogonality_defect};

/// Increasing `k`-tuples of `{0..d}` in lexicographic order (0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetIndex {
    pub d: usize,
    pub k: usize,
    pub subsets: Vec<Vec<usize>>,
}

impl SubsetIndex {
    pub fn new(d: usize, k: usize) -> Self {
        let subsets = (0..d).combinations(k).collect();
        SubsetIndex { d, k, subsets }
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Position of an increasing tuple.
    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.subsets.binary_search_by(|s| s.as_slice().cmp(subset)).ok()
    }
}

impl Serialize for SubsetIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let one_based: Vec<Vec<usize>> =
            self.subsets.iter().map(|t| t.iter().map(|i| i + 1).collect()).collect();
        one_based.serialize(s)
    }
}

fn check_grade(d: usize, k: usize) -> Result<()> {
    if k == 0 || k > d {
        return Err(Error::GradeOutOfRange { k, d });
    }
    Ok(())
}

/// Matrix of all `k x k` minors, rows and columns indexed by [`SubsetIndex`].
pub fn exterior_power(m: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("exterior power of a non-square matrix".into()));
    }
    let d = m.nrows();
    check_grade(d, k)?;
    if k == 1 {
        return Ok(m.clone());
    }
    let idx = SubsetIndex::new(d, k);
    let n = idx.len();
    let mut out = DMatrix::zeros(n, n);
    for (r, rows) in idx.subsets.iter().enumerate() {
        for (c, cols) in idx.subsets.iter().enumerate() {
            let sub = DMatrix::from_fn(k, k, |i, j| m[(rows[i], cols[j])]);
            out[(r, c)] = det(&sub);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum StochasticClass {
    DoublyStochastic,
    Orthostochastic(DMatrix<f64>),
    Unistochastic,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    pub entries: DMatrix<f64>,
    pub class: StochasticClass,
}

impl StochasticMatrix {
    pub fn is_orthostochastic(&self) -> bool {
        matches!(self.class, StochasticClass::Orthostochastic(_))
    }
}

pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

pub fn ser_matrix<S: Serializer>(
    m: &DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    matrix_rows(m).serialize(s)
}

impl Serialize for StochasticMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let (name, v) = match &self.class {
            StochasticClass::DoublyStochastic => ("doubly_stochastic", None),
            StochasticClass::Orthostochastic(v) => ("orthostochastic", Some(matrix_rows(v))),
            StochasticClass::Unistochastic => ("unistochastic", None),
            StochasticClass::Unknown => ("unknown", None),
        };
        let mut st = s.serialize_struct("StochasticMatrix", 3)?;
        st.serialize_field("entries", &matrix_rows(&self.entries))?;
        st.serialize_field("class", name)?;
        st.serialize_field("V", &v)?;
        st.end()
    }
}

/// Entrywise square of a matrix with orthonormal columns.
pub fn hadamard_square(m: &DMatrix<f64>) -> Result<StochasticMatrix> {
    let defect = orthogonality_defect(m);
    if !(defect <= 1e-8) {
        return Err(Error::NotOrthonormal(defect));
    }
    Ok(StochasticMatrix {
        entries: m.map(|x| x * x),
        class: StochasticClass::Orthostochastic(m.clone()),
    })
}

pub const STOCHASTIC_TOL: f64 = 1e-9;

pub fn classify_doubly_stochastic(m: &DMatrix<f64>) -> Result<StochasticMatrix> {
    classify_doubly_stochastic_with_tol(m, STOCHASTIC_TOL)
}

/// Accepts a square matrix with entries `>= -1e-10` and unit row and column
/// sums within `tol`.
pub fn classify_doubly_stochastic_with_tol(m: &DMatrix<f64>, tol: f64) -> Result<StochasticMatrix> {
    if !m.is_square() {
        return Err(Error::NotStochastic("matrix is not square".into()));
    }
    for ((i, j), &x) in m.iter().enumerate().map(|(k, x)| ((k % m.nrows(), k / m.nrows()), x)) {
        if !(x >= -1e-10) {
            return Err(Error::NotStochastic(format!("entry ({}, {}) = {x}", i + 1, j + 1)));
        }
    }
    for i in 0..m.nrows() {
        let s = m.row(i).sum();
        if !((s - 1.0).abs() <= tol) {
            return Err(Error::NotStochastic(format!("row {} sums to {s}", i + 1)));
        }
    }
    for j in 0..m.ncols() {
        let s = m.column(j).sum();
        if !((s - 1.0).abs() <= tol) {
            return Err(Error::NotStochastic(format!("column {} sums to {s}", j + 1)));
        }
    }
    Ok(StochasticMatrix { entries: m.clone(), class: StochasticClass::DoublyStochastic })
}

/// A permutation of `{0..d}` stored by images; `P[i][pi(i)] = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &i in &images {
            if i >= d || seen[i] {
                return Err(Error::DimensionMismatch(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    /// One-line notation with 1-based digits, e.g. `"2134"`.
    pub fn parse(text: &str) -> Result<Self> {
        let images = text
            .chars()
            .map(|c| c.to_digit(10).filter(|&v| v >= 1).map(|v| v as usize - 1))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::DimensionMismatch(format!("`{text}` is not one-line notation")))?;
        Self::from_images(images)
    }

    /// All permutations of `{0..d}` in lexicographic order.
    pub fn all(d: usize) -> Vec<Permutation> {
        (0..d).permutations(d).map(Permutation).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inversions(&self) -> usize {
        let p = &self.0;
        (0..p.len()).map(|i| (i + 1..p.len()).filter(|&j| p[i] > p[j]).count()).sum()
    }

    pub fn swap_positions(&self, i: usize, j: usize) -> Permutation {
        let mut p = self.0.clone();
        p.swap(i, j);
        Permutation(p)
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.len();
        DMatrix::from_fn(d, d, |i, j| if self.0[i] == j { 1.0 } else { 0.0 })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len() <= 9 {
            for &i in &self.0 {
                write!(f, "{}", i + 1)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
            f.write_str(&parts.join(","))
        }
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Distinct Grassmannian permutation matrices `P^k (.) P^k` with the
/// permutations producing each one.
#[derive(Clone, Debug)]
pub struct GrassmannianSet {
    pub d: usize,
    pub k: usize,
    pub matrices: Vec<DMatrix<f64>>,
    pub sources: Vec<Vec<Permutation>>,
}

pub fn grassmannian_permutations(d: usize, k: usize) -> Result<GrassmannianSet> {
    if k == 0 || k >= d {
        return Err(Error::GradeOutOfRange { k, d });
    }
    let mut matrices: Vec<DMatrix<f64>> = Vec::new();
    let mut sources: Vec<Vec<Permutation>> = Vec::new();
    for p in Permutation::all(d) {
        let g = exterior_power(&p.matrix(), k)?.map(|x| x * x);
        match matrices.iter().position(|m| *m == g) {
            Some(i) => sources[i].push(p),
            None => {
                matrices.push(g);
                sources.push(vec![p]);
            }
        }
    }
    Ok(GrassmannianSet { d, k, matrices, sources })
}

#[derive(Clone, Debug, Serialize)]
pub struct BFamily {
    /// 1-based label as in the published list.
    pub index: usize,
    pub members: Vec<Permutation>,
}

/// The eighteen four-member families of S4 permutations, in their published order.
pub fn b_families() -> Vec<BFamily> {
    s4::B_FAMILIES
        .iter()
        .enumerate()
        .map(|(i, fam)| BFamily {
            index: i + 1,
            members: fam.iter().map(|s| Permutation::parse(s).unwrap()).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderEdges {
    pub nodes: Vec<Permutation>,
    /// Covering pairs `(x, y)` of the right weak order, `y = x s_i`.
    pub weak: Vec<(Permutation, Permutation)>,
    /// Covering pairs of the Bruhat order, `y = x t_ij` with one more inversion.
    pub bruhat: Vec<(Permutation, Permutation)>,
}

fn parse_edges(edges: &[(&str, &str)]) -> Vec<(Permutation, Permutation)> {
    edges
        .iter()
        .map(|(a, b)| (Permutation::parse(a).unwrap(), Permutation::parse(b).unwrap()))
        .collect()
}

pub fn s4_order_edges() -> OrderEdges {
    OrderEdges {
        nodes: Permutation::all(4),
        weak: parse_edges(&s4::S4_WEAK_EDGES),
        bruhat: parse_edges(&s4::S4_BRUHAT_EDGES),
    }
}

/// Right weak order covers of `S_d`.
pub fn weak_order_edges(d: usize) -> Vec<(Permutation, Permutation)> {
    let mut out = Vec::new();
    for x in Permutation::all(d) {
        for i in 0..d.saturating_sub(1) {
            let y = x.swap_positions(i, i + 1);
            if y.inversions() == x.inversions() + 1 {
                out.push((x.clone(), y));
            }
        }
    }
    out
}

/// Bruhat order covers of `S_d`.
pub fn bruhat_edges(d: usize) -> Vec<(Permutation, Permutation)> {
    let mut out = Vec::new();
    for x in Permutation::all(d) {
        for i in 0..d {
            for j in i + 1..d {
                let y = x.swap_positions(i, j);
                if y.inversions() == x.inversions() + 1 {
                    out.push((x.clone(), y));
                }
            }
        }
    }
    out
}
