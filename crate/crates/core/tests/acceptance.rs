//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use detrep::bpoly::{parse, BivariatePoly};
use detrep::cubic::{msdr3, recover_orthogonal, Msdr3Options, Msdr3Reason};
use detrep::exterior::{b_families, classify_doubly_stochastic_with_tol, exterior_power, hadamard_square};
use detrep::rangeset::interval_sweep_f12;
use detrep::relax::{quartic_witness_search, relax_membership, SearchOptions};
use detrep::solve::{solve, SolveOptions, SolveStatus};
use detrep::spectral::CheckStatus;
use detrep::verify::{coefficient_via_gmd, expand_pencil, rz_sample_check};
use detrep::Tolerances;

const CUBIC: &str = "6*x1^3+36*x1^2*x2+66*x1*x2^2+36*x2^3+11*x1^2+42*x1*x2+36*x2^2+6*x1+11*x2+1";
const DEGENERATE: &str = "162*x1^3-23*x1^2*x2+99*x1^2-8*x1*x2^2-10*x1*x2+18*x1+x2^3-x2^2-x2+1";
const QUARTIC: &str = "24*x1^4+133.6609*x1^3*x2+50*x1^3+253.8824*x1^2*x2^2+196.9412*x1^2*x2+35*x1^2+190.4498*x1*x2^3+230.4498*x1*x2^2+87.6125*x1*x2+10*x1+48*x2^4+80*x2^3+48*x2^2+12*x2+1";
const NON_RZ: &str = "6*x1^3+37.97*x1^2*x2+71.94*x1*x2^2+36*x2^3+11*x1^2+42.99*x1*x2+36*x2^2+6*x1+11*x2+1";

struct Outcome {
    ok: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { ok: true, lines: Vec::new() }
    }

    fn check(&mut self, cond: bool, what: String) {
        self.ok &= cond;
        self.lines.push(format!("{} {what}", if cond { "ok  " } else { "MISS" }));
    }
}

/// Least-squares scale `k` with `got ≈ k want`, then the worst entry of `got / k - want`.
fn scaled_error(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let k = got.iter().zip(want).map(|(g, w)| g * w).sum::<f64>() / want.iter().map(|w| w * w).sum::<f64>();
    got.iter().zip(want).map(|(g, w)| (g / k - w).abs()).fold(0.0, f64::max)
}

fn haar(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `d` values in `[-3, 3]`, pairwise at least `0.25` apart and away from zero.
fn spread(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).all(|w| w[0] - w[1] >= 0.25) && v.iter().all(|x| x.abs() >= 0.25) {
            return v;
        }
    }
}

fn random_pencil(d: usize, rng: &mut ChaCha8Rng) -> (Vec<f64>, DMatrix<f64>) {
    let u1 = spread(d, rng);
    let w1 = spread(d, rng);
    let v = haar(d, rng);
    let a2 = &v * DMatrix::from_diagonal(&DVector::from_vec(w1)) * v.transpose();
    (u1, (&a2 + a2.transpose()) * 0.5)
}

/// `det(I + x1 D1 + x2 A2)` evaluated directly, independent of the
/// library expansion.
fn det_at(d1: &[f64], a2: &DMatrix<f64>, x1: f64, x2: f64) -> f64 {
    let d = d1.len();
    let m = DMatrix::identity(d, d) + DMatrix::from_diagonal(&DVector::from_column_slice(d1)) * x1 + a2 * x2;
    m.determinant()
}

fn within_diag_signs(got: &DMatrix<f64>, want: &DMatrix<f64>, tol: f64) -> bool {
    let d = want.nrows();
    (0..1usize << d).any(|mask| {
        let s = |i: usize| if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
        (0..d).all(|i| (0..d).all(|j| (s(i) * s(j) * got[(i, j)] - want[(i, j)]).abs() <= tol))
    })
}

fn c1_cubic() -> Outcome {
    let mut o = Outcome::new();
    let p = parse(CUBIC).unwrap();
    let start = Instant::now();
    let report = solve(&p, &SolveOptions::default());
    let elapsed = start.elapsed();
    o.check(report.representations.len() == 2, format!("{} representations", report.representations.len()));
    let cp = report.cubic.as_ref().and_then(|c| c.condition_polynomial.clone()).unwrap_or_default();
    let err = scaled_error(&cp, &[1.0, -6.0, 0.0, 24.0]);
    o.check(err <= 1e-3, format!("condition polynomial {cp:?}, scaled error {err:.2e}"));
    let want = DMatrix::from_row_slice(3, 3, &[4.5, -1.6166, 0.1527, -1.6166, 4.0, -0.7831, 0.1527, -0.7831, 2.5]);
    let at = report.representations.iter().find(|r| r.parameter.is_some_and(|u| (u - 0.37111).abs() < 1e-3));
    match at {
        Some(r) => o.check(within_diag_signs(&r.a2, &want, 1e-3), format!("A2 at u = {:.5}:{}", r.parameter.unwrap(), r.a2)),
        None => o.check(false, "no representation at u = .37111".into()),
    }
    o.check(elapsed < Duration::from_secs(1), format!("runtime {elapsed:?}"));
    o
}

fn c2_degenerate() -> Outcome {
    let mut o = Outcome::new();
    let p = parse(DEGENERATE).unwrap();
    let out = msdr3(&p, &Msdr3Options { y1: Some(vec![5.0, 7.0, 6.0]), ..Default::default() });
    let cp = out.condition_polynomial.clone().unwrap_or_default();
    let err = scaled_error(&cp, &[0.548785, -2.0743, 1.8891]);
    o.check(err <= 1e-3, format!("condition polynomial {cp:?}, scaled error {err:.2e}"));
    let mut roots = out.admissible_roots.clone();
    roots.sort_by(f64::total_cmp);
    let roots_ok = roots.len() == 2 && (roots[0] - 0.4445).abs() <= 1e-3 && (roots[1] - 0.6536).abs() <= 1e-3;
    o.check(roots_ok, format!("roots {roots:?}"));
    let at = out.reps.iter().find(|r| r.parameter.is_some_and(|u| (u - 0.4445).abs() < 1e-3));
    match at {
        Some(r) => {
            let thirds = r.v.iter().all(|x| (x.abs() - 1.0 / 3.0).abs() <= 1e-6 || (x.abs() - 2.0 / 3.0).abs() <= 1e-6);
            o.check(thirds, format!("V at u = {:.4}:{}", r.parameter.unwrap(), r.v));
        }
        None => o.check(false, "no representation at u = .4445".into()),
    }
    o
}

fn c3_negative() -> Outcome {
    let mut o = Outcome::new();
    let base = parse(CUBIC).unwrap();
    let p64 = base.with_coeff(1, 2, 64.0).unwrap();
    let r = solve(&p64, &SolveOptions::default());
    let battery_ok = r.battery.as_ref().is_some_and(|b| b.passed);
    o.check(battery_ok, "f12 = 64 passes the necessary battery".into());
    let cubic = r.cubic.as_ref().unwrap();
    o.check(
        r.representations.is_empty() && cubic.reason == Msdr3Reason::NoAdmissibleRoot && cubic.admissible_roots.is_empty(),
        format!("f12 = 64: {} representations, {:?}: {}", r.representations.len(), cubic.reason, cubic.diagnostic),
    );
    let p639 = base.with_coeff(1, 2, 63.9).unwrap();
    let r = solve(&p639, &SolveOptions::default());
    let fail = r.battery.as_ref().and_then(|b| b.first_failure()).cloned();
    match fail {
        Some(c) if c.name == "majorization" && c.status == CheckStatus::Fail => {
            let cert = c.certificate.unwrap_or_default();
            let lhs = cert["violation"]["diagonal_partial_sum"].as_f64().unwrap_or(f64::NAN);
            let rhs = cert["violation"]["eigenvalue_partial_sum"].as_f64().unwrap_or(f64::NAN);
            o.check(
                (lhs - 5.025).abs() <= 1e-6 && (rhs - 5.0).abs() <= 1e-9,
                format!("f12 = 63.9 majorization certificate {lhs} > {rhs} (axis {})", c.axis),
            );
        }
        other => o.check(false, format!("f12 = 63.9: first failure {:?}", other.map(|c| c.name))),
    }
    o
}

fn c4_quartic() -> Outcome {
    let mut o = Outcome::new();
    let p = parse(QUARTIC).unwrap();
    let tol = Tolerances::default();
    let start = Instant::now();
    let relax = relax_membership(&p, &tol);
    let search = quartic_witness_search(&p, &relax, &SearchOptions { all: true, ..Default::default() });
    let elapsed = start.elapsed();
    // published points, coordinates (f31, f21, f13, f12, f11)
    let betas = [
        ([132.0, 196.0, 192.0, 232.0, 88.0], 0.4187),
        ([124.0, 184.0, 176.0, 216.0, 84.0], 0.346),
        ([148.0, 216.0, 208.0, 248.0, 92.0], 0.2215),
        ([196.0, 244.0, 224.0, 264.0, 96.0], 0.0138),
    ];
    let mut worst: f64 = 0.0;
    for (b, w) in betas {
        let layout = [b[4], b[1], b[0], b[3], b[2]];
        let k = relax.points.iter().position(|pt| pt.point.iter().zip(&layout).all(|(x, y)| (x - y).abs() < 1e-9));
        worst = worst.max(match k {
            Some(k) => (relax.weights[k] - w).abs(),
            None => f64::INFINITY,
        });
    }
    o.check(worst <= 1e-3, format!("LP weights {:?}, worst error {worst:.2e}", relax.weights));
    let printed = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.3460, 0.4187, 0.0138, 0.2215, 0.4187, 0.3460, 0.2215, 0.0138, 0.2215, 0.0138, 0.4187, 0.3460, 0.0138, 0.2215,
            0.3460, 0.4187,
        ],
    );
    let hit = search.witnesses.iter().find(|w| (&w.rep.q.entries - &printed).amax() <= 1e-3);
    o.check(hit.is_some(), format!("printed Q among {} witnesses: {:?}", search.witnesses.len(), hit.map(|w| &w.source)));
    let best = search.witnesses.iter().map(|w| w.rep.residual).fold(f64::INFINITY, f64::min);
    o.check(best <= 1e-3, format!("witness residual {best:.2e}"));
    o.check(elapsed < Duration::from_secs(10), format!("runtime {elapsed:?}"));
    o
}

fn c5_sweep() -> Outcome {
    let mut o = Outcome::new();
    let p = parse(CUBIC).unwrap();
    let s = interval_sweep_f12(&p, 42.0, 36.0, 0.01, &Tolerances::default()).unwrap();
    let near = |got: Option<(f64, f64)>, lo: f64, hi: f64| got.is_some_and(|(a, b)| (a - lo).abs() <= 0.05 && (b - hi).abs() <= 0.05);
    o.check(near(s.msdr, 64.8, 66.8), format!("MSDR interval {:?}", s.msdr));
    o.check(near(s.majorization, 64.0, 68.9), format!("majorization interval {:?}", s.majorization));
    o
}

fn c6_round_trip() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (d, cases, need) in [(3usize, 200usize, 0.99), (4, 100, 0.90)] {
        let mut recovered = 0;
        let mut proven = Vec::new();
        let mut missed = Vec::new();
        for case in 0..cases {
            let (u1, a2) = random_pencil(d, &mut rng);
            let p = expand_pencil(&u1, &a2).unwrap();
            let r = solve(&p, &SolveOptions::default());
            if r.representations.iter().any(|rep| rep.residual <= 1e-5) {
                recovered += 1;
            } else if r.status == SolveStatus::ProvenInfeasible {
                proven.push(case);
            } else {
                missed.push(case);
            }
        }
        let rate = recovered as f64 / cases as f64;
        o.check(rate >= need, format!("d = {d}: {recovered}/{cases} recovered, not found {missed:?}"));
        o.check(proven.is_empty(), format!("d = {d}: proven infeasible {proven:?}"));
    }
    o
}

fn c7_orthostochastic() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut bad = Vec::new();
    for case in 0..200 {
        let d = 2 + case % 4;
        let v = haar(d, &mut rng);
        for k in 1..=d {
            let ok = exterior_power(&v, k)
                .and_then(|e| hadamard_square(&e))
                .and_then(|h| classify_doubly_stochastic_with_tol(&h.entries, 1e-8))
                .is_ok();
            if !ok {
                bad.push((case, d, k));
            }
        }
        let q = v.map(|x| x * x);
        if !recover_orthogonal(&q, 1e-6).is_ok_and(|w| (w.map(|x| x * x) - &q).amax() <= 1e-8) {
            bad.push((case, d, 0));
        }
    }
    o.check(bad.is_empty(), format!("200 orthogonal matrices, d in 2..=5, failures {bad:?}"));
    o
}

fn c8_dual_path() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut interp: f64 = 0.0;
    for case in 0..100 {
        let d = 1 + case % 4;
        let (u1, a2) = random_pencil(d, &mut rng);
        let p = expand_pencil(&u1, &a2).unwrap();
        for a in 0..=d {
            for b in 0..=d - a {
                let g = coefficient_via_gmd(&u1, &a2, a, b).unwrap();
                let c = p.coeff(a, b);
                worst = worst.max((g - c).abs() / (1.0 + c.abs()));
            }
        }
        for &(x1, x2) in &[(0.3, -0.7), (-1.1, 0.4), (0.9, 1.3)] {
            let want = det_at(&u1, &a2, x1, x2);
            interp = interp.max((p.evaluate(x1, x2) - want).abs() / (1.0 + want.abs()));
        }
    }
    o.check(worst <= 1e-8, format!("expansion vs mixed discriminants, worst {worst:.2e}"));
    o.check(interp <= 1e-8, format!("expansion vs direct determinant, worst {interp:.2e}"));
    o
}

/// Roots of `c[0] + c[1] t + ...` from the companion matrix.
fn companion_roots(c: &[f64]) -> Vec<nalgebra::Complex<f64>> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().unwrap().abs() < 1e-14 {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -c[n - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    m.complex_eigenvalues().iter().copied().collect()
}

fn restriction(p: &BivariatePoly, x1: f64, x2: f64) -> Vec<f64> {
    let d = p.degree();
    let mut c = vec![0.0; d + 1];
    for a in 0..=d {
        for b in 0..=d - a {
            c[a + b] += p.coeff(a, b) * x1.powi(a as i32) * x2.powi(b as i32);
        }
    }
    c
}

fn c9_rz() -> Outcome {
    let mut o = Outcome::new();
    let p = parse(NON_RZ).unwrap();
    let report = rz_sample_check(&p, 1000, 1e-7);
    o.check(report.failures > 0, format!("non-RZ example: {} failing directions, witness {:?}", report.failures, report.witness));
    let n = 10f64.sqrt();
    let probe = report.probes.iter().find(|pr| (pr.direction[0] - 3.0 / n).abs() < 1e-12 && (pr.direction[1] + 1.0 / n).abs() < 1e-12);
    let oracle = restriction(&p, 3.0, -1.0);
    let imag = companion_roots(&oracle).iter().map(|z| z.im.abs() / (1.0 + z.re.abs())).fold(0.0, f64::max);
    o.check(
        probe.is_some_and(|pr| pr.failed),
        format!("direction (3,-1): flagged {:?}, restriction {oracle:?}, oracle max rel imag {imag:.2e}", probe.map(|pr| pr.failed)),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut flagged = 0;
    for case in 0..50 {
        let d = 2 + case % 4;
        let (u1, a2) = random_pencil(d, &mut rng);
        let q = expand_pencil(&u1, &a2).unwrap();
        flagged += rz_sample_check(&q, 1000, 1e-7).failures;
    }
    o.check(flagged == 0, format!("50 pencils x 1000 directions: {flagged} failures"));
    o
}

fn c10_b_families() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for fam in b_families() {
        let mut fails = Vec::new();
        for trial in 0..50 {
            let raw: Vec<f64> = (0..fam.members.len()).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
            let mut q = DMatrix::zeros(4, 4);
            for (w, perm) in weights.iter().zip(&fam.members) {
                q += perm.matrix() * *w;
            }
            if recover_orthogonal(&q, 1e-6).is_err() {
                fails.push((trial, weights));
            }
        }
        let members: Vec<String> = fam.members.iter().map(|m| format!("{m}")).collect();
        let reproducer = fails.first().map(|(t, w)| format!(", first counterexample trial {t} weights {w:?}")).unwrap_or_default();
        o.check(fails.is_empty(), format!("B{} {members:?}: {}/50 orthostochastic{reproducer}", fam.index, 50 - fails.len()));
    }
    o
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("cubic end-to-end", c1_cubic),
        ("degenerate cubic", c2_degenerate),
        ("negative control", c3_negative),
        ("quartic relaxation", c4_quartic),
        ("f12 sweep", c5_sweep),
        ("round trip", c6_round_trip),
        ("orthostochasticity of exterior powers", c7_orthostochastic),
        ("dual-path coefficients", c8_dual_path),
        ("real-zero falsifier", c9_rz),
        ("B-family combinations", c10_b_families),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        println!("{} {}. {name} ({:.2?})", if out.ok { "PASS" } else { "FAIL" }, k + 1, start.elapsed());
        for line in &out.lines {
            println!("       {line}");
        }
        failed += usize::from(!out.ok);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
