//! Range of the mixed coefficients over fixed orbits: permutation images,
//! rearrangement extremes and the `f12` sweep for size 3.

use nalgebra::DVector;
use serde::Serialize;

use crate::bpoly::{Axis, BivariatePoly};
use crate::cubic::{msdr3, Msdr3Options};
use crate::error::{Error, Result};
use crate::exterior::Permutation;
use crate::smallnum::{lin_solve, lp_feasible_convex, LpResult};
use crate::spectral::{build_g, extract_eigenvalues, majorization_interval, majorizes, scalar_product_coefficient, solve_diagonals};
use crate::tol::Tolerances;

/// Spectra of the two coefficient matrices, sorted descending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitSpec {
    pub u1: Vec<f64>,
    pub w1: Vec<f64>,
}

impl OrbitSpec {
    pub fn new(mut u1: Vec<f64>, mut w1: Vec<f64>) -> Result<Self> {
        if u1.len() != w1.len() || u1.len() < 2 {
            return Err(Error::DimensionMismatch("orbits need equal sizes of at least 2".into()));
        }
        u1.sort_by(|a, b| b.total_cmp(a));
        w1.sort_by(|a, b| b.total_cmp(a));
        Ok(OrbitSpec { u1, w1 })
    }

    pub fn from_poly(p: &BivariatePoly, tol: f64) -> Result<Self> {
        let u1 = extract_eigenvalues(p, Axis::X1, tol)?;
        let w1 = extract_eigenvalues(p, Axis::X2, tol)?;
        OrbitSpec::new(u1, w1)
    }

    pub fn d(&self) -> usize {
        self.u1.len()
    }
}

/// Exponents `(a, b)`, `a, b >= 1`, `a + b <= d`, with `a` outer.
pub fn mixed_layout(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 1..d {
        for b in 1..=d - a {
            out.push((a, b));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct HullTuple {
    pub perm: Permutation,
    pub values: Vec<f64>,
}

/// Every mixed coefficient of `det(I + x1 D1 + x2 P D2 P^T)` for each permutation `P`.
pub fn hull_points(spec: &OrbitSpec) -> Vec<HullTuple> {
    let layout = mixed_layout(spec.d());
    Permutation::all(spec.d())
        .into_iter()
        .map(|perm| {
            let m = perm.matrix();
            let values = layout
                .iter()
                .map(|&(a, b)| scalar_product_coefficient(&m, &spec.u1, &spec.w1, a, b).expect("layout within degree"))
                .collect();
            HullTuple { perm, values }
        })
        .collect()
}

/// LP membership of a full mixed tuple in the hull of `hull_points`.
pub fn hull_membership(spec: &OrbitSpec, tuple: &[f64], tol: f64) -> Result<LpResult> {
    let pts: Vec<Vec<f64>> = hull_points(spec).into_iter().map(|h| h.values).collect();
    lp_feasible_convex(tuple, &pts, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoordinateExtreme {
    pub exponent: (usize, usize),
    pub min: f64,
    pub max: f64,
    pub argmin: Vec<Permutation>,
    pub argmax: Vec<Permutation>,
    pub identity_is_min: bool,
    pub reversal_is_max: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Extremes {
    pub layout: Vec<(usize, usize)>,
    pub identity: Vec<f64>,
    pub reversal: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub coordinates: Vec<CoordinateExtreme>,
    /// Coordinates where the identity is not a minimizer or the reversal is
    /// not a maximizer.
    pub counterexamples: Vec<String>,
}

/// Brute-force extremes over all permutations, compared against the
/// identity (both spectra descending) and the reversal.
pub fn rearrangement_extremes(spec: &OrbitSpec) -> Extremes {
    let d = spec.d();
    let layout = mixed_layout(d);
    let pts = hull_points(spec);
    let id = Permutation::identity(d);
    let rev = Permutation::from_images((0..d).rev().collect()).unwrap();
    let value_of = |p: &Permutation| pts.iter().find(|h| &h.perm == p).unwrap().values.clone();
    let identity = value_of(&id);
    let reversal = value_of(&rev);
    let mut coords = Vec::new();
    let mut counter = Vec::new();
    for (k, &(a, b)) in layout.iter().enumerate() {
        let vals: Vec<f64> = pts.iter().map(|h| h.values[k]).collect();
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * (1.0 + y.abs());
        let argmin: Vec<Permutation> = pts.iter().filter(|h| close(h.values[k], min)).map(|h| h.perm.clone()).collect();
        let argmax: Vec<Permutation> = pts.iter().filter(|h| close(h.values[k], max)).map(|h| h.perm.clone()).collect();
        let identity_is_min = close(identity[k], min);
        let reversal_is_max = close(reversal[k], max);
        if !identity_is_min {
            counter.push(format!("f{a}{b}: identity gives {} but the minimum is {min} at {}", identity[k], argmin[0]));
        }
        if !reversal_is_max {
            counter.push(format!("f{a}{b}: reversal gives {} but the maximum is {max} at {}", reversal[k], argmax[0]));
        }
        coords.push(CoordinateExtreme { exponent: (a, b), min, max, argmin, argmax, identity_is_min, reversal_is_max });
    }
    Extremes {
        min: coords.iter().map(|c| c.min).collect(),
        max: coords.iter().map(|c| c.max).collect(),
        layout,
        identity,
        reversal,
        coordinates: coords,
        counterexamples: counter,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSample {
    pub f12: f64,
    pub majorized: bool,
    pub representations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub f11: f64,
    pub f21: f64,
    pub step: f64,
    /// Exact range of `f12` where both diagonals are majorized.
    pub majorization: Option<(f64, f64)>,
    /// Hull of the `f12` values admitting a representation, boundaries
    /// bisected to `1e-3`.
    pub msdr: Option<(f64, f64)>,
    pub msdr_segments: Vec<(f64, f64)>,
    pub samples: Vec<SweepSample>,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("f12,majorized,representations\n");
        for x in &self.samples {
            s.push_str(&format!("{},{},{}\n", x.f12, x.majorized, x.representations));
        }
        s
    }
}

fn rep_count(p: &BivariatePoly, f12: f64, tol: &Tolerances) -> usize {
    match p.with_coeff(1, 2, f12) {
        Ok(q) => msdr3(&q, &Msdr3Options { tolerances: tol.clone(), ..Default::default() }).reps.len(),
        Err(_) => 0,
    }
}

fn bisect(p: &BivariatePoly, mut inside: f64, mut outside: f64, tol: &Tolerances) -> f64 {
    while (inside - outside).abs() > 1e-3 {
        let mid = 0.5 * (inside + outside);
        if rep_count(p, mid, tol) > 0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Sweeps `f12` of a size-3 template with `f11`, `f21` fixed.
pub fn interval_sweep_f12(template: &BivariatePoly, f11: f64, f21: f64, step: f64, tol: &Tolerances) -> Result<SweepReport> {
    if template.degree() != 3 {
        return Err(Error::DimensionMismatch(format!("sweep needs degree 3, got {}", template.degree())));
    }
    let p = template.with_coeff(1, 1, f11)?.with_coeff(2, 1, f21)?;
    let mut report = SweepReport { f11, f21, step, majorization: None, msdr: None, msdr_segments: Vec::new(), samples: Vec::new() };
    let u1 = extract_eigenvalues(&p, Axis::X1, tol.root)?;
    let w1 = extract_eigenvalues(&p, Axis::X2, tol.root)?;
    // y2 does not involve f12; y1 is affine in it.
    let (_, y2) = solve_diagonals(&p, &u1, &w1, tol.residual)?;
    let y2_ok = match y2.unique() {
        Some(y) => majorizes(&w1, y),
        None => true,
    };
    let g1 = build_g(&w1);
    let base = p.with_coeff(1, 2, 0.0)?;
    let z0 = DVector::from_fn(3, |j, _| base.coeff(1, j));
    let e3 = DVector::from_vec(vec![0.0, 0.0, 1.0]);
    let y0 = lin_solve(&g1, &z0)?;
    let dir = lin_solve(&g1, &e3)?;
    let interval = if y2_ok {
        majorization_interval(&u1, y0.as_slice(), dir.as_slice(), tol.majorization)
    } else {
        None
    };
    report.majorization = interval;
    let Some((lo, hi)) = interval else { return Ok(report) };
    let n = ((hi - lo) / step).floor() as usize;
    let mut xs: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    if hi - xs.last().copied().unwrap_or(lo) > 1e-9 {
        xs.push(hi);
    }
    let mut prev: Option<(f64, bool)> = None;
    let mut seg_start: Option<f64> = None;
    for &x in &xs {
        let count = rep_count(&p, x, tol);
        report.samples.push(SweepSample { f12: x, majorized: true, representations: count });
        let ok = count > 0;
        match (prev, ok) {
            (None, true) => seg_start = Some(x),
            (Some((px, false)), true) => seg_start = Some(bisect(&p, x, px, tol)),
            (Some((px, true)), false) => {
                let end = bisect(&p, px, x, tol);
                report.msdr_segments.push((seg_start.take().unwrap(), end));
            }
            _ => {}
        }
        prev = Some((x, ok));
    }
    if let (Some(s), Some((px, true))) = (seg_start, prev) {
        report.msdr_segments.push((s, px));
    }
    if let (Some(first), Some(last)) = (report.msdr_segments.first(), report.msdr_segments.last()) {
        report.msdr = Some((first.0, last.1));
    }
    Ok(report)
}
