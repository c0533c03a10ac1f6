use nalgebra::Complex;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Relative noise assumed on input coefficients when deciding whether a tight
/// group of computed roots is one multiple root.
const COEFF_NOISE: f64 = 1e-10;
/// Roots farther apart than this (relative) are never merged.
const MERGE_RADIUS: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RootCluster {
    #[serde(serialize_with = "ser_complex")]
    pub value: C64,
    pub multiplicity: usize,
    pub real: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootReport {
    #[serde(serialize_with = "ser_complex_vec")]
    pub roots: Vec<C64>,
    pub clusters: Vec<RootCluster>,
    pub all_real: bool,
    pub tol: f64,
}

fn ser_complex<S: serde::Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn ser_complex_vec<S: serde::Serializer>(
    v: &[C64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

impl RootReport {
    /// Real roots repeated by multiplicity, ascending.
    pub fn real_roots(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.roots.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// The non-real root with the largest relative imaginary part.
    pub fn worst_complex(&self) -> Option<C64> {
        self.roots
            .iter()
            .filter(|z| z.im != 0.0)
            .max_by(|a, b| rel_imag(**a).total_cmp(&rel_imag(**b)))
            .copied()
    }

    /// `max |Im z| / (1 + |Re z|)` over all roots.
    pub fn max_rel_imag(&self) -> f64 {
        self.roots.iter().map(|z| rel_imag(*z)).fold(0.0, f64::max)
    }
}

pub fn rel_imag(z: C64) -> f64 {
    z.im.abs() / (1.0 + z.re.abs())
}

/// Roots of `c[0] + c[1] t + ... + c[n] t^n` with the default real tolerance `1e-8`.
pub fn poly_roots(coeffs: &[f64]) -> Result<RootReport> {
    poly_roots_with_tol(coeffs, 1e-8)
}

pub fn poly_roots_with_tol(coeffs: &[f64], tol: f64) -> Result<RootReport> {
    let top = coeffs.iter().rposition(|&c| c != 0.0).ok_or(Error::ZeroPolynomial)?;
    let low = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    let reduced = &coeffs[low..=top];

    let mut groups: Vec<(C64, usize)> = Vec::new();
    if low > 0 {
        groups.push((C64::new(0.0, 0.0), low));
    }
    if reduced.len() > 1 {
        let raw = aberth(reduced);
        groups.extend(cluster(reduced, raw));
    }

    let mut clusters = Vec::new();
    let mut roots = Vec::new();
    for (mut z, m) in groups {
        let real = rel_imag(z) <= tol;
        if real {
            z.im = 0.0;
        }
        clusters.push(RootCluster { value: z, multiplicity: m, real });
        roots.extend(std::iter::repeat_n(z, m));
    }
    clusters.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let all_real = clusters.iter().all(|c| c.real);
    Ok(RootReport { roots, clusters, all_real, tol })
}

fn horner(c: &[f64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Aberth-Ehrlich simultaneous iteration. `c` has nonzero first and last entries.
fn aberth(c: &[f64]) -> Vec<C64> {
    let n = c.len() - 1;
    let lead = c[n];
    if n == 1 {
        return vec![C64::new(-c[0] / lead, 0.0)];
    }
    let radius = (c[0] / lead).abs().powf(1.0 / n as f64).max(1e-300);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            C64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..800 {
        let mut biggest: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += (z[k] - z[j]).inv();
                }
            }
            let step = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if biggest < 1e-16 {
            break;
        }
    }
    z
}

/// Taylor coefficient `p^{(m)}(c) / m!`.
fn taylor_coeff(coeffs: &[f64], c: C64, m: usize) -> C64 {
    let mut out = C64::new(0.0, 0.0);
    for (k, &a) in coeffs.iter().enumerate().skip(m) {
        out += c.powu((k - m) as u32) * a * binom(k, m);
    }
    out
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Whether `members` are consistent with one root of multiplicity `members.len()`
/// given coefficient noise of relative size `COEFF_NOISE`.
fn plausible_multiple(coeffs: &[f64], members: &[C64]) -> bool {
    let m = members.len();
    let center = members.iter().sum::<C64>() / m as f64;
    let spread = members.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let scale: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.abs() * center.norm().powi(k as i32))
        .sum();
    let t = taylor_coeff(coeffs, center, m).norm();
    if t == 0.0 {
        return true;
    }
    let expected = (COEFF_NOISE * scale / t).powf(1.0 / m as f64);
    spread <= expected
}

/// Greedy agglomeration of nearby roots into multiple roots, accepting a merge
/// only when the merged group is plausible as a single multiple root.
fn cluster(coeffs: &[f64], roots: Vec<C64>) -> Vec<(C64, usize)> {
    let n = roots.len();
    let mut groups: Vec<Vec<C64>> = roots.iter().map(|&z| vec![z]).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(((roots[i] - roots[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut owner: Vec<usize> = (0..n).collect();
    for (dist, i, j) in pairs {
        let (gi, gj) = (owner[i], owner[j]);
        if gi == gj {
            continue;
        }
        let scale = 1.0 + roots[i].norm().max(roots[j].norm());
        if dist > MERGE_RADIUS * scale {
            break;
        }
        let mut merged = groups[gi].clone();
        merged.extend(groups[gj].iter().copied());
        if plausible_multiple(coeffs, &merged) {
            groups[gi] = merged;
            groups[gj].clear();
            for o in owner.iter_mut() {
                if *o == gj {
                    *o = gi;
                }
            }
        }
    }
    groups
        .into_iter()
        .filter(|g| !g.is_empty())
        .map(|g| {
            let mean = g.iter().sum::<C64>() / g.len() as f64;
            (refine_multiple(coeffs, mean, g.len()), g.len())
        })
        .collect()
}

/// Coefficients of the `m`-th derivative.
fn derivative(coeffs: &[f64], m: usize) -> Vec<f64> {
    (m..coeffs.len())
        .map(|k| coeffs[k] * (k + 1 - m..=k).map(|i| i as f64).product::<f64>())
        .collect()
}

/// A root of multiplicity `m` is a simple root of the `(m-1)`-th derivative;
/// Newton there pins the cluster center far better than the member mean.
fn refine_multiple(coeffs: &[f64], start: C64, m: usize) -> C64 {
    if m == 1 {
        return start;
    }
    let q = derivative(coeffs, m - 1);
    let mut z = start;
    let mut best = horner(&q, z).0.norm();
    for _ in 0..20 {
        let (v, dv) = horner(&q, z);
        if dv.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        let val = horner(&q, next).0.norm();
        if !(val < best) {
            break;
        }
        best = val;
        z = next;
    }
    z
}
