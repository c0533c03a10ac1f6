//! Size-3 representations: the one-parameter doubly stochastic family, the
//! orthostochastic condition, sign recovery of `V`, and the full solver.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::bpoly::BivariatePoly;
use crate::error::{Error, Result};
use crate::exterior::{classify_doubly_stochastic_with_tol, ser_matrix, StochasticClass, StochasticMatrix};
use crate::smallnum::{lstsq_with_null, orthogonality_defect, poly_roots_with_tol};
use crate::spectral::{majorization_interval, necessary_battery, BatteryReport, DiagonalSolution};
use crate::tol::Tolerances;
use crate::verify::expand_pencil;

/// Affine map `u -> slope * u + intercept`.
pub type Affine = (f64, f64);

/// Doubly stochastic matrices `Q(u)` satisfying `Q w1 = y2`, `Q^T u1 = y1`.
/// The leading 2x2 block is affine in the parameter `u`, which is the entry
/// `parameter` of `Q` (0-based); the rest follows from unit row and column sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DsFamily3 {
    pub parameter: (usize, usize),
    pub q11: Affine,
    pub q12: Affine,
    pub q21: Affine,
    pub q22: Affine,
    /// Parameter range where every entry lies in `[0, 1]`; `None` when empty.
    pub interval: Option<(f64, f64)>,
}

fn add(a: Affine, b: Affine) -> Affine {
    (a.0 + b.0, a.1 + b.1)
}

fn neg(a: Affine) -> Affine {
    (-a.0, -a.1)
}

impl DsFamily3 {
    fn from_block(parameter: (usize, usize), q11: Affine, q12: Affine, q21: Affine, q22: Affine) -> Self {
        let mut fam = DsFamily3 { parameter, q11, q12, q21, q22, interval: None };
        fam.interval = fam.feasible_interval();
        fam
    }

    /// All nine entries as affine maps.
    pub fn entry_maps(&self) -> [[Affine; 3]; 3] {
        let one = (0.0, 1.0);
        let q13 = add(one, neg(add(self.q11, self.q12)));
        let q23 = add(one, neg(add(self.q21, self.q22)));
        let q31 = add(one, neg(add(self.q11, self.q21)));
        let q32 = add(one, neg(add(self.q12, self.q22)));
        let q33 = add(add(add(self.q11, self.q12), add(self.q21, self.q22)), (0.0, -1.0));
        [[self.q11, self.q12, q13], [self.q21, self.q22, q23], [q31, q32, q33]]
    }

    pub fn at(&self, u: f64) -> DMatrix<f64> {
        let maps = self.entry_maps();
        DMatrix::from_fn(3, 3, |i, j| maps[i][j].0 * u + maps[i][j].1)
    }

    fn feasible_interval(&self) -> Option<(f64, f64)> {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (s, c) in self.entry_maps().into_iter().flatten() {
            // 0 <= s u + c <= 1
            if s.abs() < 1e-14 {
                if c < -1e-12 || c > 1.0 + 1e-12 {
                    return None;
                }
            } else {
                let (a, b) = (-c / s, (1.0 - c) / s);
                lo = lo.max(a.min(b));
                hi = hi.min(a.max(b));
            }
        }
        (lo <= hi && lo.is_finite() && hi.is_finite()).then_some((lo, hi))
    }
}

/// Family through the displayed elimination formulas (parameter `q12`).
fn paper_family(u1: &[f64], w1: &[f64], y1: &[f64], y2: &[f64]) -> Option<DsFamily3> {
    let (d1, d2, d3) = (u1[0], u1[1], u1[2]);
    let (r1, r2, r3) = (w1[0], w1[1], w1[2]);
    if (r1 - r3).abs() < 1e-12 || (d2 - d3).abs() < 1e-12 {
        return None;
    }
    let q11 = (-(r2 - r3) / (r1 - r3), (y2[0] - r3) / (r1 - r3));
    let q21 = (
        (d1 - d3) * (r2 - r3) / ((r1 - r3) * (d2 - d3)),
        ((r1 - r3) * (y1[0] - d3) - (d1 - d3) * (y2[0] - r3)) / ((r1 - r3) * (d2 - d3)),
    );
    let q22 = (-(d1 - d3) / (d2 - d3), (y1[1] - d3) / (d2 - d3));
    Some(DsFamily3::from_block((0, 1), q11, (1.0, 0.0), q21, q22))
}

/// Same family from the null space of the four independent linear conditions.
fn generic_family(u1: &[f64], w1: &[f64], y1: &[f64], y2: &[f64]) -> Result<DsFamily3> {
    let a = [w1[0] - w1[2], w1[1] - w1[2]];
    let b = [u1[0] - u1[2], u1[1] - u1[2]];
    // unknowns (q11, q12, q21, q22)
    let m = DMatrix::from_row_slice(
        4,
        4,
        &[
            a[0], a[1], 0.0, 0.0, //
            0.0, 0.0, a[0], a[1], //
            b[0], 0.0, b[1], 0.0, //
            0.0, b[0], 0.0, b[1],
        ],
    );
    let rhs = DVector::from_vec(vec![y2[0] - w1[2], y2[1] - w1[2], y1[0] - u1[2], y1[1] - u1[2]]);
    let (x, null) = lstsq_with_null(&m, &rhs, 1e-10);
    if null.len() != 1 {
        return Err(Error::DegenerateEigenvalues(null.len()));
    }
    let n = &null[0];
    let k = if n[1].abs() > 1e-8 * n.amax() { 1 } else { n.iamax() };
    let t = n / n[k];
    let x = &x - &t * x[k];
    let map = |i: usize| (t[i], x[i]);
    let parameter = [(0, 0), (0, 1), (1, 0), (1, 1)][k];
    Ok(DsFamily3::from_block(parameter, map(0), map(1), map(2), map(3)))
}

/// The line of doubly stochastic `Q` with `Q^T u1 = y1` and `Q w1 = y2`.
pub fn ds_family(u1: &[f64], w1: &[f64], y1: &[f64], y2: &[f64]) -> Result<DsFamily3> {
    for v in [u1, w1, y1, y2] {
        if v.len() != 3 {
            return Err(Error::DimensionMismatch("size-3 family needs vectors of length 3".into()));
        }
    }
    match paper_family(u1, w1, y1, y2) {
        Some(f) => Ok(f),
        None => generic_family(u1, w1, y1, y2),
    }
}

/// `LHS - RHS` of the 3x3 orthostochastic condition.
pub fn ortho_defect(q: &DMatrix<f64>) -> f64 {
    let (q11, q12, q21, q22) = (q[(0, 0)], q[(0, 1)], q[(1, 0)], q[(1, 1)]);
    let l = 1.0 - q11 - q12 - q21 - q22 + q11 * q22 + q12 * q21;
    l * l - 4.0 * q11 * q22 * q12 * q21
}

/// The inequality form of the condition: `Q` is unistochastic.
pub fn unistochastic_feasible(q: &DMatrix<f64>) -> bool {
    ortho_defect(q) <= 1e-6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrthoMode {
    Equality,
    Inequality,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrthoCondition {
    Defect(f64),
    Feasible(bool),
}

pub fn ortho_condition(q: &DMatrix<f64>, mode: OrthoMode) -> OrthoCondition {
    match mode {
        OrthoMode::Equality => OrthoCondition::Defect(ortho_defect(q)),
        OrthoMode::Inequality => OrthoCondition::Feasible(unistochastic_feasible(q)),
    }
}

fn pmul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn padd(a: &[f64], b: &[f64], sb: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sb * y;
    }
    out
}

/// The orthostochastic defect along the family as a polynomial in the
/// parameter, ascending coefficients, negligible leading terms removed.
pub fn condition_polynomial(fam: &DsFamily3) -> Vec<f64> {
    let lin = |a: Affine| vec![a.1, a.0];
    let (q11, q12, q21, q22) = (lin(fam.q11), lin(fam.q12), lin(fam.q21), lin(fam.q22));
    let mut l = vec![1.0];
    for q in [&q11, &q12, &q21, &q22] {
        l = padd(&l, q, -1.0);
    }
    l = padd(&l, &pmul(&q11, &q22), 1.0);
    l = padd(&l, &pmul(&q12, &q21), 1.0);
    let rhs = pmul(&pmul(&q11, &q22), &pmul(&q12, &q21));
    let mut c = padd(&pmul(&l, &l), &rhs, -4.0);
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    while c.len() > 1 && c.last().unwrap().abs() <= 1e-12 * scale {
        c.pop();
    }
    c
}

/// Every orthogonal `V` with `V ⊙ V = Q` whose first row and column are
/// nonnegative. `tol` bounds `‖V^T V − I‖`.
pub fn orthogonal_sign_completions(q: &DMatrix<f64>, tol: f64) -> Vec<DMatrix<f64>> {
    let d = q.nrows();
    if d == 0 || q.ncols() != d {
        return Vec::new();
    }
    let s = q.map(|x| x.max(0.0).sqrt());
    let prune = (10.0 * tol).max(1e-9);
    let mut out = Vec::new();
    let mut v = s.clone();
    fn rec(i: usize, s: &DMatrix<f64>, v: &mut DMatrix<f64>, prune: f64, tol: f64, out: &mut Vec<DMatrix<f64>>) {
        let d = s.nrows();
        if i == d {
            if orthogonality_defect(v) <= tol {
                out.push(v.clone());
            }
            return;
        }
        let free: Vec<usize> = (1..d).filter(|&j| s[(i, j)] > 1e-9).collect();
        for mask in 0u64..(1 << free.len()) {
            for (b, &j) in free.iter().enumerate() {
                v[(i, j)] = if mask >> b & 1 == 1 { -s[(i, j)] } else { s[(i, j)] };
            }
            let ok = (0..i).all(|k| (v.row(i).dot(&v.row(k))).abs() <= prune);
            if ok {
                rec(i + 1, s, v, prune, tol, out);
            }
        }
        for j in 1..d {
            v[(i, j)] = s[(i, j)];
        }
    }
    rec(1, &s, &mut v, prune, tol, &mut out);
    out
}

/// First orthogonal `V` (in sign-pattern order) with `V ⊙ V = Q`.
pub fn recover_orthogonal(q: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    orthogonal_sign_completions(q, tol).into_iter().next().ok_or(Error::NoSignPattern)
}

/// Nearest orthogonal matrix.
pub(crate) fn polish_orthogonal(v: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = v.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepKind {
    SymmetricMsdr,
    HermitianFeasible,
}

/// `f = det(I + x1 diag(D1) + x2 A2)` with `A2 = V diag(w1) V^T` and `Q = V ⊙ V`.
#[derive(Clone, Debug, Serialize)]
pub struct PencilRep {
    pub kind: RepKind,
    #[serde(rename = "D1")]
    pub d1: Vec<f64>,
    #[serde(rename = "A2", serialize_with = "ser_matrix")]
    pub a2: DMatrix<f64>,
    #[serde(rename = "V", serialize_with = "ser_matrix")]
    pub v: DMatrix<f64>,
    #[serde(rename = "Q")]
    pub q: StochasticMatrix,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
}

impl PencilRep {
    /// Assembles `A2` from `V`, checks it against `p` and returns `None` when
    /// the expanded pencil misses `p` by more than `tol`.
    pub fn assemble(p: &BivariatePoly, u1: &[f64], w1: &[f64], v: DMatrix<f64>, tol: f64) -> Option<PencilRep> {
        let a2 = &v * DMatrix::from_diagonal(&DVector::from_column_slice(w1)) * v.transpose();
        let a2 = (&a2 + a2.transpose()) * 0.5;
        let residual = expand_pencil(u1, &a2).ok()?.relative_mismatch(p);
        if !(residual <= tol) {
            return None;
        }
        let q = StochasticMatrix { entries: v.map(|x| x * x), class: StochasticClass::Orthostochastic(v.clone()) };
        Some(PencilRep { kind: RepKind::SymmetricMsdr, d1: u1.to_vec(), a2, v, q, residual, parameter: None })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Msdr3Options {
    /// Keep going after the first verified representation in the degenerate
    /// branch.
    pub all: bool,
    pub tolerances: Tolerances,
    /// Replacement diagonals, used when the linear systems leave a choice.
    pub y1: Option<Vec<f64>>,
    pub y2: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Msdr3Reason {
    Found,
    NecessaryConditionFailed,
    EmptyFamily,
    NoAdmissibleRoot,
    NoVerifiedCandidate,
    NotCubic,
}

#[derive(Clone, Debug, Serialize)]
pub struct Msdr3Outcome {
    pub reps: Vec<PencilRep>,
    pub reason: Msdr3Reason,
    pub diagnostic: String,
    /// Set when a coefficient matrix is scalar, so every orthogonal `V` works.
    pub infinitely_many: bool,
    /// True only when a necessary condition failed.
    pub proven_infeasible: bool,
    pub battery: Option<BatteryReport>,
    pub family: Option<DsFamily3>,
    /// Ascending coefficients in the family parameter.
    pub condition_polynomial: Option<Vec<f64>>,
    /// Real roots of the condition polynomial, and those accepted.
    pub real_roots: Vec<f64>,
    pub admissible_roots: Vec<f64>,
    pub y1: Option<Vec<f64>>,
    pub y2: Option<Vec<f64>>,
}

impl Msdr3Outcome {
    fn empty(reason: Msdr3Reason, diagnostic: impl Into<String>) -> Self {
        Msdr3Outcome {
            reps: Vec::new(),
            reason,
            diagnostic: diagnostic.into(),
            infinitely_many: false,
            proven_infeasible: false,
            battery: None,
            family: None,
            condition_polynomial: None,
            real_roots: Vec::new(),
            admissible_roots: Vec::new(),
            y1: None,
            y2: None,
        }
    }
}

struct FamilyRun {
    family: DsFamily3,
    poly: Vec<f64>,
    real_roots: Vec<f64>,
    admissible: Vec<f64>,
    reps: Vec<PencilRep>,
}

/// Candidate parameters: real roots of the condition polynomial inside the
/// entrywise-feasible interval (slack `1e-9`).
fn family_roots(fam: &DsFamily3, poly: &[f64], tol: f64) -> (Vec<f64>, Vec<f64>) {
    let Some((lo, hi)) = fam.interval else { return (Vec::new(), Vec::new()) };
    let scale = poly.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || poly.len() == 1 && poly[0].abs() <= 1e-12 {
        // identically orthostochastic along the family
        let pts = vec![lo, 0.5 * (lo + hi), hi];
        return (pts.clone(), pts);
    }
    if poly.len() == 1 {
        return (Vec::new(), Vec::new());
    }
    let Ok(report) = poly_roots_with_tol(poly, tol) else { return (Vec::new(), Vec::new()) };
    let real: Vec<f64> = report
        .clusters
        .iter()
        .filter(|c| c.real)
        .map(|c| c.value.re)
        .collect();
    let mut real = real;
    real.sort_by(f64::total_cmp);
    let admissible = real
        .iter()
        .copied()
        .filter(|&u| u >= lo - 1e-9 && u <= hi + 1e-9)
        .map(|u| u.clamp(lo, hi))
        .collect();
    (real, admissible)
}

fn reps_for_parameter(p: &BivariatePoly, u1: &[f64], w1: &[f64], q: &DMatrix<f64>, tol: &Tolerances) -> Option<PencilRep> {
    let q = q.map(|x| if x < 0.0 && x > -1e-8 { 0.0 } else { x });
    classify_doubly_stochastic_with_tol(&q, 1e-8).ok()?;
    for t in [tol.ortho, 1e-4] {
        for v in orthogonal_sign_completions(&q, t) {
            if let Some(rep) = PencilRep::assemble(p, u1, w1, polish_orthogonal(&v), tol.residual) {
                return Some(rep);
            }
        }
    }
    None
}

fn run_family(p: &BivariatePoly, u1: &[f64], w1: &[f64], y1: &[f64], y2: &[f64], tol: &Tolerances) -> Result<FamilyRun> {
    let family = ds_family(u1, w1, y1, y2)?;
    let poly = condition_polynomial(&family);
    let (real_roots, admissible) = family_roots(&family, &poly, tol.root);
    let mut reps = Vec::new();
    for &u in &admissible {
        if let Some(mut rep) = reps_for_parameter(p, u1, w1, &family.at(u), tol) {
            rep.parameter = Some(u);
            reps.push(rep);
        }
    }
    Ok(FamilyRun { family, poly, real_roots, admissible, reps })
}

fn all_equal(v: &[f64]) -> bool {
    v.iter().all(|&x| (x - v[0]).abs() <= 1e-9 * (1.0 + v[0].abs()))
}

/// Sample points of a solution line `particular + t n` majorized by `x`:
/// 101 evenly spaced points of the admissible interval, endpoints included.
fn line_samples(x: &[f64], particular: &[f64], null: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    if null.len() != 1 {
        return crate::spectral::majorized_point_on_affine(x, particular, null, tol).into_iter().collect();
    }
    let n = &null[0];
    let Some((lo, hi)) = majorization_interval(x, particular, n, tol) else { return Vec::new() };
    (0..=100)
        .map(|k| {
            let t = lo + (hi - lo) * k as f64 / 100.0;
            particular.iter().zip(n).map(|(a, b)| a + t * b).collect()
        })
        .collect()
}

fn candidates(sol: &DiagonalSolution, eig: &[f64], over: &Option<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    if let Some(y) = over {
        return vec![y.clone()];
    }
    match sol {
        DiagonalSolution::Unique { y } => vec![y.clone()],
        DiagonalSolution::Degenerate { particular, null_basis } => line_samples(eig, particular, null_basis, tol),
    }
}

/// Size-3 solver. Returns every representation found, one per admissible
/// root of the condition polynomial.
pub fn msdr3(p: &BivariatePoly, opts: &Msdr3Options) -> Msdr3Outcome {
    let tol = &opts.tolerances;
    if p.degree() != 3 {
        return Msdr3Outcome::empty(Msdr3Reason::NotCubic, format!("degree {} is not 3", p.degree()));
    }
    let battery = necessary_battery(p, tol);
    if !battery.passed {
        let f = battery.first_failure().unwrap();
        let mut out = Msdr3Outcome::empty(
            Msdr3Reason::NecessaryConditionFailed,
            format!("{} fails on axis {}: {}", f.name, f.axis, f.detail),
        );
        out.proven_infeasible = true;
        out.battery = Some(battery);
        return out;
    }
    let prof = battery.profile.clone().unwrap();
    let (u1, w1) = (prof.u1.clone(), prof.w1.clone());

    if all_equal(&u1) || all_equal(&w1) {
        let v = DMatrix::identity(3, 3);
        let mut out = match PencilRep::assemble(p, &u1, &w1, v, tol.residual) {
            Some(rep) => {
                let mut o = Msdr3Outcome::empty(
                    Msdr3Reason::Found,
                    "a coefficient matrix is scalar; every orthogonal V gives an equivalent representation",
                );
                o.reps.push(rep);
                o.infinitely_many = true;
                o
            }
            None => Msdr3Outcome::empty(
                Msdr3Reason::NoVerifiedCandidate,
                "a coefficient matrix is scalar but the diagonal pencil does not reproduce the polynomial",
            ),
        };
        out.battery = Some(battery);
        return out;
    }

    let y1s = candidates(&prof.y1, &u1, &opts.y1, tol.majorization);
    let y2s = candidates(&prof.y2, &w1, &opts.y2, tol.majorization);
    let degenerate = y1s.len() > 1 || y2s.len() > 1;
    let mut out = Msdr3Outcome::empty(Msdr3Reason::NoAdmissibleRoot, "");
    let mut first: Option<FamilyRun> = None;
    let mut chosen: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut families = 0usize;
    'outer: for y1 in &y1s {
        for y2 in &y2s {
            let Ok(run) = run_family(p, &u1, &w1, y1, y2, tol) else { continue };
            families += 1;
            let hit = !run.reps.is_empty();
            if hit && chosen.is_none() {
                chosen = Some((y1.clone(), y2.clone()));
            }
            if first.is_none() || hit && first.as_ref().unwrap().reps.is_empty() {
                if !hit && first.is_none() {
                    chosen = Some((y1.clone(), y2.clone()));
                }
                first = Some(FamilyRun { reps: Vec::new(), ..run.clone_meta() });
            }
            out.reps.extend(run.reps);
            if hit && degenerate && !opts.all {
                break 'outer;
            }
        }
    }
    out.battery = Some(battery);
    if let Some((y1, y2)) = chosen {
        out.y1 = Some(y1);
        out.y2 = Some(y2);
    }
    let Some(meta) = first else {
        out.reason = Msdr3Reason::EmptyFamily;
        out.diagnostic = "no doubly stochastic family matches the diagonals".into();
        return out;
    };
    out.family = Some(meta.family.clone());
    out.condition_polynomial = Some(meta.poly);
    out.real_roots = meta.real_roots;
    out.admissible_roots = meta.admissible;
    out.reps.sort_by(|a, b| a.parameter.unwrap_or(0.0).total_cmp(&b.parameter.unwrap_or(0.0)));
    if !out.reps.is_empty() {
        out.reason = Msdr3Reason::Found;
        out.diagnostic = if degenerate {
            format!("{} representation(s) from {families} sampled diagonal choice(s)", out.reps.len())
        } else {
            format!("{} representation(s), one per admissible root", out.reps.len())
        };
    } else if meta.family.interval.is_none() {
        out.reason = Msdr3Reason::NoAdmissibleRoot;
        out.diagnostic =
            "condition polynomial has no admissible root: no parameter keeps every entry of Q in [0, 1]".into();
    } else if out.admissible_roots.is_empty() {
        out.reason = Msdr3Reason::NoAdmissibleRoot;
        out.diagnostic = "condition polynomial has no admissible root".into();
    } else {
        out.reason = Msdr3Reason::NoVerifiedCandidate;
        out.diagnostic = "admissible roots found but no candidate reproduced the polynomial".into();
    }
    out
}

impl FamilyRun {
    fn clone_meta(&self) -> FamilyRun {
        FamilyRun {
            family: self.family.clone(),
            poly: self.poly.clone(),
            real_roots: self.real_roots.clone(),
            admissible: self.admissible.clone(),
            reps: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MhdrReport {
    pub feasible: bool,
    pub proven_infeasible: bool,
    pub diagnostic: String,
    /// Parameter intervals where the inequality form holds.
    pub intervals: Vec<(f64, f64)>,
    pub family: Option<DsFamily3>,
    pub y1: Option<Vec<f64>>,
    pub y2: Option<Vec<f64>>,
}

/// Intervals of `[lo, hi]` where `poly <= slack`.
fn sublevel_intervals(poly: &[f64], lo: f64, hi: f64, slack: f64) -> Vec<(f64, f64)> {
    let eval = |u: f64| poly.iter().rev().fold(0.0, |acc, c| acc * u + c);
    let mut cuts = vec![lo];
    if poly.len() > 1 {
        if let Ok(r) = poly_roots_with_tol(poly, 1e-8) {
            cuts.extend(r.real_roots().into_iter().filter(|&u| u > lo && u < hi));
        }
    }
    cuts.push(hi);
    cuts.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, f64)> = Vec::new();
    let push = |a: f64, b: f64, out: &mut Vec<(f64, f64)>| match out.last_mut() {
        Some(last) if a <= last.1 + 1e-12 => last.1 = last.1.max(b),
        _ => out.push((a, b)),
    };
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if eval(0.5 * (a + b)) <= slack {
            push(a, b, &mut out);
        } else {
            for x in [a, b] {
                if eval(x) <= slack {
                    push(x, x, &mut out);
                }
            }
        }
    }
    out
}

/// Unistochastic feasibility along the family: nonempty intervals mean a
/// Hermitian representation exists.
pub fn mhdr3_feasible(p: &BivariatePoly, tol: &Tolerances) -> MhdrReport {
    let mut report =
        MhdrReport { feasible: false, proven_infeasible: false, diagnostic: String::new(), intervals: Vec::new(), family: None, y1: None, y2: None };
    if p.degree() != 3 {
        report.diagnostic = format!("degree {} is not 3", p.degree());
        return report;
    }
    let battery = necessary_battery(p, tol);
    if !battery.passed {
        let f = battery.first_failure().unwrap();
        report.proven_infeasible = true;
        report.diagnostic = format!("infeasible by necessary condition: {} fails on axis {}", f.name, f.axis);
        return report;
    }
    let prof = battery.profile.unwrap();
    if all_equal(&prof.u1) || all_equal(&prof.w1) {
        report.feasible = true;
        report.diagnostic = "a coefficient matrix is scalar".into();
        return report;
    }
    for y1 in candidates(&prof.y1, &prof.u1, &None, tol.majorization) {
        for y2 in candidates(&prof.y2, &prof.w1, &None, tol.majorization) {
            let Ok(fam) = ds_family(&prof.u1, &prof.w1, &y1, &y2) else { continue };
            let Some((lo, hi)) = fam.interval else { continue };
            let intervals = sublevel_intervals(&condition_polynomial(&fam), lo, hi, 1e-6);
            if !intervals.is_empty() {
                report.feasible = true;
                report.intervals = intervals;
                report.family = Some(fam);
                report.y1 = Some(y1);
                report.y2 = Some(y2);
                report.diagnostic = "unistochastic matrices exist along the family".into();
                return report;
            }
            if report.family.is_none() {
                report.family = Some(fam);
            }
        }
    }
    report.diagnostic = "the inequality form fails along the whole family".into();
    report
}
