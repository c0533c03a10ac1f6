//! Convex relaxation for sizes other than 3: membership of the mixed
//! coefficients in the hull of permutation images, and the search for an
//! orthostochastic witness.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::bpoly::{primary_layout, BivariatePoly};
use crate::cubic::{orthogonal_sign_completions, polish_orthogonal, PencilRep};
use crate::exterior::{b_families, bruhat_edges, s4_order_edges, weak_order_edges, Permutation};
use crate::smallnum::{lp_feasible_convex, simplex, LpStatus};
use crate::spectral::{complement_sums, necessary_battery, scalar_product_coefficient, BatteryReport};
use crate::tol::Tolerances;
use crate::verify::coefficients_by_minors;

/// Image of one permutation (or a class of permutations with the same image)
/// in the primary layout `(f11, f21, .., f_{d-1,1}, f12, .., f_{1,d-1})`.
#[derive(Clone, Debug, Serialize)]
pub struct PermImagePoint {
    pub perms: Vec<Permutation>,
    pub point: Vec<f64>,
}

impl PermImagePoint {
    pub fn multiplicity(&self) -> usize {
        self.perms.len()
    }
}

/// Layout value of a doubly stochastic `Q`.
pub fn layout_image(q: &DMatrix<f64>, u1: &[f64], w1: &[f64]) -> Vec<f64> {
    let d = u1.len();
    let w = DVector::from_column_slice(w1);
    let u = DVector::from_column_slice(u1);
    let qw = q * &w;
    let qtu = q.transpose() * &u;
    let mut out = Vec::with_capacity(2 * d - 3);
    for a in 1..d {
        out.push(DVector::from_vec(complement_sums(u1, a, 1).values).dot(&qw));
    }
    for b in 2..d {
        out.push(DVector::from_vec(complement_sums(w1, b, 1).values).dot(&qtu));
    }
    out
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs())))
}

/// One point per permutation, merged when repeated eigenvalues make images
/// coincide. Classes keep first-appearance order over lexicographic permutations.
pub fn perm_image_points(u1: &[f64], w1: &[f64]) -> Vec<PermImagePoint> {
    let d = u1.len();
    let mut out: Vec<PermImagePoint> = Vec::new();
    for perm in Permutation::all(d) {
        let point = layout_image(&perm.matrix(), u1, w1);
        match out.iter_mut().find(|c| same_point(&c.point, &point)) {
            Some(c) => c.perms.push(perm),
            None => out.push(PermImagePoint { perms: vec![perm], point }),
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelaxStatus {
    Infeasible,
    #[serde(rename = "unique_ds")]
    UniqueDS,
    #[serde(rename = "many_ds")]
    ManyDS,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelaxOutcome {
    pub status: RelaxStatus,
    pub diagnostic: String,
    pub layout: Vec<(usize, usize)>,
    pub target: Vec<f64>,
    pub points: Vec<PermImagePoint>,
    /// One weight per entry of `points`.
    pub weights: Vec<f64>,
    pub residual: f64,
    /// Separating hyperplane on infeasibility.
    pub certificate: Option<Vec<f64>>,
    /// `sum_j weight_j P_j`, one representative permutation per class.
    #[serde(serialize_with = "ser_opt_matrix")]
    pub q: Option<DMatrix<f64>>,
    /// Entrywise range of the doubly stochastic matrices matching the target.
    #[serde(serialize_with = "ser_opt_pair")]
    pub q_range: Option<(DMatrix<f64>, DMatrix<f64>)>,
    pub u1: Vec<f64>,
    pub w1: Vec<f64>,
    #[serde(skip)]
    pub battery: BatteryReport,
}

fn ser_opt_matrix<S: serde::Serializer>(m: &Option<DMatrix<f64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.as_ref().map(crate::exterior::matrix_rows).serialize(s)
}

fn ser_opt_pair<S: serde::Serializer>(
    m: &Option<(DMatrix<f64>, DMatrix<f64>)>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    m.as_ref()
        .map(|(lo, hi)| [crate::exterior::matrix_rows(lo), crate::exterior::matrix_rows(hi)])
        .serialize(s)
}

impl RelaxOutcome {
    pub fn feasible(&self) -> bool {
        self.status != RelaxStatus::Infeasible
    }
}

/// Slack for hull membership. Published data carries four or five digits, so
/// exact equality is too strict.
pub fn relax_tolerance(target: &[f64]) -> f64 {
    1e-5 * (1.0 + target.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Equality rows `A q = b` over the `d^2` entries of `Q` (row-major): unit
/// row and column sums, then the layout functionals.
fn q_space_rows(u1: &[f64], w1: &[f64]) -> Vec<Vec<f64>> {
    let d = u1.len();
    let mut rows = Vec::new();
    for i in 0..d {
        rows.push((0..d * d).map(|k| if k / d == i { 1.0 } else { 0.0 }).collect());
    }
    for j in 0..d {
        rows.push((0..d * d).map(|k| if k % d == j { 1.0 } else { 0.0 }).collect());
    }
    for a in 1..d {
        let uc = complement_sums(u1, a, 1).values;
        rows.push((0..d * d).map(|k| uc[k / d] * w1[k % d]).collect());
    }
    for b in 2..d {
        let wc = complement_sums(w1, b, 1).values;
        rows.push((0..d * d).map(|k| wc[k % d] * u1[k / d]).collect());
    }
    rows
}

/// Entrywise min and max over doubly stochastic `Q` with the same image as `q0`.
fn q_range(q0: &DMatrix<f64>, u1: &[f64], w1: &[f64]) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let d = u1.len();
    let a = q_space_rows(u1, w1);
    let x0: Vec<f64> = (0..d * d).map(|k| q0[(k / d, k % d)]).collect();
    let b: Vec<f64> = a.iter().map(|r| r.iter().zip(&x0).map(|(p, q)| p * q).sum()).collect();
    let mut lo = DMatrix::zeros(d, d);
    let mut hi = DMatrix::zeros(d, d);
    for k in 0..d * d {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; d * d];
            c[k] = sign;
            match simplex(&a, &b, &c, 1e-9) {
                LpStatus::Optimal { x, .. } => {
                    if sign > 0.0 {
                        lo[(k / d, k % d)] = x[k];
                    } else {
                        hi[(k / d, k % d)] = x[k];
                    }
                }
                _ => return None,
            }
        }
    }
    Some((lo, hi))
}

fn infeasible_outcome(battery: BatteryReport, diagnostic: String, layout: Vec<(usize, usize)>, target: Vec<f64>) -> RelaxOutcome {
    RelaxOutcome {
        status: RelaxStatus::Infeasible,
        diagnostic,
        layout,
        target,
        points: Vec::new(),
        weights: Vec::new(),
        residual: f64::NAN,
        certificate: None,
        q: None,
        q_range: None,
        u1: Vec::new(),
        w1: Vec::new(),
        battery,
    }
}

/// Decides whether a doubly stochastic `Q` reproduces the primary mixed
/// coefficients, and whether it is unique.
pub fn relax_membership(p: &BivariatePoly, tol: &Tolerances) -> RelaxOutcome {
    let d = p.degree();
    let layout = primary_layout(d);
    let target = p.mixed_coefficient_vector().primary;
    let battery = necessary_battery(p, tol);
    if !battery.passed {
        let f = battery.first_failure().unwrap();
        let msg = format!("{} fails on axis {}: {}", f.name, f.axis, f.detail);
        return infeasible_outcome(battery, msg, layout, target);
    }
    let prof = battery.profile.clone().unwrap();
    let (u1, w1) = (prof.u1.clone(), prof.w1.clone());
    let points = perm_image_points(&u1, &w1);
    let mut out = infeasible_outcome(battery, String::new(), layout, target.clone());
    out.u1 = u1.clone();
    out.w1 = w1.clone();
    if d < 2 {
        out.status = RelaxStatus::UniqueDS;
        out.diagnostic = "no mixed coefficients".into();
        out.q = Some(DMatrix::identity(d, d));
        out.points = points;
        out.weights = vec![1.0];
        out.residual = 0.0;
        return out;
    }
    let coords: Vec<Vec<f64>> = points.iter().map(|c| c.point.clone()).collect();
    let lp = lp_feasible_convex(&target, &coords, relax_tolerance(&target)).expect("layout lengths agree");
    out.points = points;
    out.weights = lp.weights.clone();
    out.residual = lp.residual;
    if !lp.feasible {
        out.certificate = lp.certificate;
        out.diagnostic = format!(
            "mixed coefficients lie outside the hull of {} permutation images (residual {:.3e})",
            out.points.len(),
            lp.residual
        );
        return out;
    }
    let mut q = DMatrix::zeros(d, d);
    for (c, w) in out.points.iter().zip(&lp.weights) {
        q += c.perms[0].matrix() * *w;
    }
    let range = q_range(&q, &u1, &w1);
    let unique = range.as_ref().is_some_and(|(lo, hi)| (hi - lo).amax() <= 1e-7);
    out.status = if unique { RelaxStatus::UniqueDS } else { RelaxStatus::ManyDS };
    out.diagnostic = if unique {
        "exactly one doubly stochastic matrix matches".into()
    } else {
        "a positive-dimensional set of doubly stochastic matrices matches".into()
    };
    out.q = Some(q);
    out.q_range = range;
    out
}

/// Checks the coefficients not covered by the relaxation, `f_ab` with
/// `2 <= a, b <= d - 2`, through the exterior-power formulas.
pub fn remaining_coefficient_check(v: &DMatrix<f64>, u1: &[f64], w1: &[f64], p: &BivariatePoly, tol: f64) -> bool {
    let d = u1.len();
    for a in 2..d.saturating_sub(1) {
        for b in 2..=d - a {
            if b > d - 2 {
                continue;
            }
            let Ok(val) = scalar_product_coefficient(v, u1, w1, a, b) else { return false };
            let want = p.coeff(a, b);
            if (val - want).abs() > tol * (1.0 + want.abs()) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessSource {
    UniqueDs,
    BFamily { index: usize },
    WeakEdge { from: Permutation, to: Permutation },
    BruhatEdge { from: Permutation, to: Permutation },
    Vertex { perm: Permutation },
    Refinement { seed: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub rep: PencilRep,
    pub source: WitnessSource,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub witnesses: Vec<Witness>,
    pub candidates_tried: usize,
    pub diagnostic: String,
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub all: bool,
    pub tolerances: Tolerances,
    /// Random orthogonal starting points for the refinement stage.
    pub refinement_seeds: usize,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { all: false, tolerances: Tolerances::default(), refinement_seeds: 200, seed: 0x5eed }
    }
}

/// Mixed-coefficient mismatch of `V diag(w1) V^T`, scaled by `1 + |f_ab|`.
fn mixed_residual(p: &BivariatePoly, u1: &[f64], w1: &[f64], v: &DMatrix<f64>) -> DVector<f64> {
    let d = u1.len();
    let a2 = v * DMatrix::from_diagonal(&DVector::from_column_slice(w1)) * v.transpose();
    let grid = coefficients_by_minors(u1, &a2);
    let mut r = Vec::new();
    for a in 1..d {
        for b in 1..=d - a {
            let want = p.coeff(a, b);
            r.push((grid[a][b] - want) / (1.0 + want.abs()));
        }
    }
    DVector::from_vec(r)
}

/// `(I - S)^{-1} (I + S)` for the skew matrix with upper entries `s`.
fn cayley(d: usize, s: &[f64]) -> DMatrix<f64> {
    let mut k = DMatrix::zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        for j in i + 1..d {
            k[(i, j)] = s[idx];
            k[(j, i)] = -s[idx];
            idx += 1;
        }
    }
    let id = DMatrix::<f64>::identity(d, d);
    (&id - &k).lu().solve(&(&id + &k)).unwrap_or(id)
}

/// Levenberg-Marquardt on `V` over the orthogonal group.
fn refine(p: &BivariatePoly, u1: &[f64], w1: &[f64], v0: &DMatrix<f64>, iters: usize) -> (DMatrix<f64>, f64) {
    let d = u1.len();
    let n = d * (d - 1) / 2;
    let mut v = polish_orthogonal(v0);
    let mut r = mixed_residual(p, u1, w1, &v);
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let h = 1e-7;
    for _ in 0..iters {
        if cost < 1e-26 {
            break;
        }
        let mut jac = DMatrix::zeros(r.len(), n);
        for k in 0..n {
            let mut s = vec![0.0; n];
            s[k] = h;
            let rk = mixed_residual(p, u1, w1, &(&v * cayley(d, &s)));
            jac.set_column(k, &((rk - &r) / h));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut improved = false;
        for _ in 0..12 {
            let mut m = jtj.clone();
            for i in 0..n {
                m[(i, i)] += lambda * (1.0 + jtj[(i, i)]);
            }
            let Some(step) = m.lu().solve(&(-&g)) else { break };
            let cand = polish_orthogonal(&(&v * cayley(d, step.as_slice())));
            let rc = mixed_residual(p, u1, w1, &cand);
            let cc = rc.norm_squared();
            if cc < cost {
                v = cand;
                r = rc;
                cost = cc;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let worst = r.amax();
    (v, worst)
}

fn haar_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = DMatrix::from_diagonal(&DVector::from_fn(d, |i, _| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

struct Search<'a> {
    p: &'a BivariatePoly,
    u1: &'a [f64],
    w1: &'a [f64],
    opts: &'a SearchOptions,
    found: Vec<Witness>,
    tried: usize,
}

impl Search<'_> {
    fn done(&self) -> bool {
        !self.opts.all && !self.found.is_empty()
    }

    fn push(&mut self, rep: PencilRep, source: WitnessSource) {
        let dup = self.found.iter().any(|w| (&w.rep.q.entries - &rep.q.entries).amax() <= 1e-6);
        if !dup {
            self.found.push(Witness { rep, source });
        }
    }

    /// Tries every sign completion of a doubly stochastic candidate; a small
    /// refinement absorbs rounding in the data but may not move `Q` by more
    /// than `1e-3`.
    fn try_q(&mut self, q: &DMatrix<f64>, source: WitnessSource) {
        let tol = &self.opts.tolerances;
        self.tried += 1;
        for t in [tol.ortho, 1e-4] {
            for v in orthogonal_sign_completions(q, t) {
                let v = polish_orthogonal(&v);
                if !remaining_coefficient_check(&v, self.u1, self.w1, self.p, 1e-3) {
                    continue;
                }
                let rep = PencilRep::assemble(self.p, self.u1, self.w1, v.clone(), tol.residual).or_else(|| {
                    let (vr, _) = refine(self.p, self.u1, self.w1, &v, 30);
                    let moved = (vr.map(|x| x * x) - q).amax();
                    (moved <= 1e-3).then(|| PencilRep::assemble(self.p, self.u1, self.w1, vr, tol.residual)).flatten()
                });
                if let Some(rep) = rep {
                    self.push(rep, source);
                    return;
                }
            }
        }
    }

    fn try_edge(&mut self, x: &Permutation, y: &Permutation, target: &[f64], weak: bool) {
        let px = x.matrix();
        let py = y.matrix();
        let a = layout_image(&px, self.u1, self.w1);
        let b = layout_image(&py, self.u1, self.w1);
        // target = t a + (1 - t) b
        let diff: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p - q).collect();
        let nn: f64 = diff.iter().map(|x| x * x).sum();
        let t = if nn > 0.0 {
            (diff.iter().zip(target.iter().zip(&b)).map(|(dd, (t, q))| dd * (t - q)).sum::<f64>() / nn).clamp(0.0, 1.0)
        } else {
            1.0
        };
        let res = target
            .iter()
            .zip(a.iter().zip(&b))
            .map(|(tv, (p, q))| (t * p + (1.0 - t) * q - tv).abs())
            .fold(0.0, f64::max);
        if res <= relax_tolerance(target) {
            let q = px * t + py * (1.0 - t);
            let source = if weak {
                WitnessSource::WeakEdge { from: x.clone(), to: y.clone() }
            } else {
                WitnessSource::BruhatEdge { from: x.clone(), to: y.clone() }
            };
            self.try_q(&q, source);
        }
    }
}

/// Searches for a verified representation once the relaxation is feasible:
/// the unique doubly stochastic matrix, the four-member families (size 4),
/// order-graph edges, vertices, then refinement from seeded starting points.
/// Failure is not a proof of nonexistence.
pub fn quartic_witness_search(p: &BivariatePoly, outcome: &RelaxOutcome, opts: &SearchOptions) -> SearchReport {
    let mut report = SearchReport { witnesses: Vec::new(), candidates_tried: 0, diagnostic: String::new() };
    if !outcome.feasible() {
        report.diagnostic = "relaxation infeasible; nothing to search".into();
        return report;
    }
    let d = p.degree();
    let (u1, w1) = (&outcome.u1[..], &outcome.w1[..]);
    let target = &outcome.target;
    let mut s = Search { p, u1, w1, opts, found: Vec::new(), tried: 0 };

    if outcome.status == RelaxStatus::UniqueDS {
        if let Some(q) = &outcome.q {
            s.try_q(q, WitnessSource::UniqueDs);
        }
    }
    if d == 4 && !s.done() {
        for fam in b_families() {
            let mut members = fam.members.clone();
            members.dedup();
            members.sort();
            members.dedup();
            let pts: Vec<Vec<f64>> = members.iter().map(|m| layout_image(&m.matrix(), u1, w1)).collect();
            let Ok(lp) = lp_feasible_convex(target, &pts, relax_tolerance(target)) else { continue };
            if !lp.feasible {
                continue;
            }
            let mut q = DMatrix::zeros(4, 4);
            for (m, w) in members.iter().zip(&lp.weights) {
                q += m.matrix() * *w;
            }
            s.try_q(&q, WitnessSource::BFamily { index: fam.index });
            if s.done() {
                break;
            }
        }
    }
    if !s.done() && d >= 2 {
        let (weak, bruhat) = if d == 4 {
            let e = s4_order_edges();
            (e.weak, e.bruhat)
        } else if d <= 6 {
            (weak_order_edges(d), bruhat_edges(d))
        } else {
            (Vec::new(), Vec::new())
        };
        for (x, y) in &weak {
            s.try_edge(x, y, target, true);
            if s.done() {
                break;
            }
        }
        if !s.done() {
            for (x, y) in &bruhat {
                s.try_edge(x, y, target, false);
                if s.done() {
                    break;
                }
            }
        }
    }
    if !s.done() {
        for c in &outcome.points {
            if (0..c.point.len()).all(|i| (c.point[i] - target[i]).abs() <= relax_tolerance(target)) {
                s.try_q(&c.perms[0].matrix(), WitnessSource::Vertex { perm: c.perms[0].clone() });
                if s.done() {
                    break;
                }
            }
        }
    }
    if !s.done() && d >= 2 {
        let mut seeds: Vec<DMatrix<f64>> = Vec::new();
        if let Some(q) = &outcome.q {
            seeds.extend(orthogonal_sign_completions(q, 1e-1).into_iter().take(8));
            seeds.push(q.map(|x| x.max(0.0).sqrt()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.refinement_seeds {
            seeds.push(haar_orthogonal(d, &mut rng));
        }
        for (k, v0) in seeds.iter().enumerate() {
            s.tried += 1;
            let (v, worst) = refine(p, u1, w1, v0, 200);
            if worst > 1e-6 {
                continue;
            }
            if let Some(rep) = PencilRep::assemble(p, u1, w1, v, opts.tolerances.residual) {
                s.push(rep, WitnessSource::Refinement { seed: k });
                if s.done() {
                    break;
                }
            }
        }
    }
    report.candidates_tried = s.tried;
    report.witnesses = s.found;
    report.diagnostic = if report.witnesses.is_empty() {
        format!("no verified witness after {} candidates", report.candidates_tried)
    } else {
        format!("{} verified witness(es)", report.witnesses.len())
    };
    report
}
