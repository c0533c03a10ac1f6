use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use detrep::bpoly::{parse, Axis, BivariatePoly};
use detrep::cubic::recover_orthogonal;
use detrep::exterior::exterior_power;
use detrep::spectral::{extract_eigenvalues, majorizes, scalar_product_coefficient, solve_diagonals};
use detrep::verify::expand_pencil;

fn haar(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
    let (mut q, r) = g.qr().unpack();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

fn spectrum(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        if v.windows(2).all(|w| w[0] - w[1] >= 0.3) && v.iter().all(|x| x.abs() >= 0.3) {
            return v;
        }
    }
}

struct Pencil {
    u1: Vec<f64>,
    w1: Vec<f64>,
    v: DMatrix<f64>,
    a2: DMatrix<f64>,
    p: BivariatePoly,
}

fn pencil(d: usize, seed: u64) -> Pencil {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u1 = spectrum(d, &mut rng);
    let w1 = spectrum(d, &mut rng);
    let v = haar(d, &mut rng);
    let a2 = &v * DMatrix::from_diagonal(&DVector::from_column_slice(&w1)) * v.transpose();
    let a2 = (&a2 + a2.transpose()) * 0.5;
    let p = expand_pencil(&u1, &a2).unwrap();
    Pencil { u1, w1, v, a2, p }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn doubly_stochastic_image_is_majorized(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = haar(d, &mut rng);
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-5.0..5.0)).collect();
        let y = (v.map(|t| t * t) * DVector::from_column_slice(&x)).as_slice().to_vec();
        prop_assert!(majorizes(&x, &y), "{x:?} does not majorize {y:?}");
    }

    #[test]
    fn scalar_products_match_expansion(d in 2usize..=5, seed in any::<u64>()) {
        let pc = pencil(d, seed);
        for a in 0..=d {
            for b in 0..=d - a {
                let s = scalar_product_coefficient(&pc.v, &pc.u1, &pc.w1, a, b).unwrap();
                let c = pc.p.coeff(a, b);
                prop_assert!((s - c).abs() <= 1e-8 * (1.0 + c.abs()), "f{a}{b}: {s} vs {c}");
            }
        }
    }

    #[test]
    fn eigenvalues_round_trip(d in 1usize..=5, seed in any::<u64>()) {
        let pc = pencil(d, seed);
        let u = extract_eigenvalues(&pc.p, Axis::X1, 1e-8).unwrap();
        let w = extract_eigenvalues(&pc.p, Axis::X2, 1e-8).unwrap();
        prop_assert!(close(&u, &pc.u1, 1e-7), "{u:?} vs {:?}", pc.u1);
        prop_assert!(close(&w, &pc.w1, 1e-7), "{w:?} vs {:?}", pc.w1);
    }

    #[test]
    fn diagonals_are_stochastic_images(d in 2usize..=4, seed in any::<u64>()) {
        let pc = pencil(d, seed);
        let q = pc.v.map(|t| t * t);
        let (y1, y2) = solve_diagonals(&pc.p, &pc.u1, &pc.w1, 1e-6).unwrap();
        let want1 = q.transpose() * DVector::from_column_slice(&pc.u1);
        let want2: Vec<f64> = pc.a2.diagonal().iter().copied().collect();
        prop_assert!(close(y1.unique().unwrap(), want1.as_slice(), 1e-6));
        prop_assert!(close(y2.unique().unwrap(), &want2, 1e-6));
    }

    #[test]
    fn sign_pattern_is_recovered(d in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = haar(d, &mut rng);
        let q = v.map(|t| t * t);
        let w = recover_orthogonal(&q, 1e-6).unwrap();
        prop_assert!((w.map(|t| t * t) - &q).amax() <= 1e-8);
        prop_assert!((w.transpose() * &w - DMatrix::identity(d, d)).amax() <= 1e-8);
    }

    #[test]
    fn exterior_power_is_multiplicative(d in 2usize..=5, k in 1usize..=5, seed in any::<u64>()) {
        let k = k.min(d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let b = DMatrix::<f64>::from_fn(d, d, |_, _| rng.sample(StandardNormal));
        let lhs = exterior_power(&(&a * &b), k).unwrap();
        let rhs = exterior_power(&a, k).unwrap() * exterior_power(&b, k).unwrap();
        prop_assert!((&lhs - &rhs).amax() <= 1e-9 * (1.0 + rhs.amax()));
    }

    #[test]
    fn expression_round_trip(d in 1usize..=5, seed in any::<u64>()) {
        let pc = pencil(d, seed);
        let again = parse(&pc.p.to_expression()).unwrap();
        prop_assert!(again.relative_mismatch(&pc.p) <= 1e-12);
        let json = BivariatePoly::from_json(&pc.p.to_json().to_string()).unwrap();
        prop_assert!(json.relative_mismatch(&pc.p) == 0.0);
    }
}
