use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Condition number ceiling for [`lin_solve`].
pub const MAX_CONDITION: f64 = 1e12;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Determinant by LU with partial pivoting.
pub fn det(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant of a non-square matrix");
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap();
        if a[(pivot, col)] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for i in col + 1..n {
            let f = a[(i, col)] / p;
            if f != 0.0 {
                for j in col + 1..n {
                    a[(i, j)] -= f * a[(col, j)];
                }
            }
        }
    }
    det
}

/// Eigen-decomposition of a symmetric matrix: eigenvalues descending and the
/// matching orthonormal eigenvectors as columns.
pub fn sym_eig(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("sym_eig needs a square matrix".into()));
    }
    let asym = max_abs(&(a - a.transpose()));
    if asym > 1e-10 * max_abs(a).max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (a + a.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(a.nrows(), a.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn condition_number(g: &DMatrix<f64>) -> f64 {
    let sv = g.clone().singular_values();
    let hi = sv.max();
    let lo = sv.min();
    if lo == 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Solves `G y = z`, refusing numerically singular systems.
pub fn lin_solve(g: &DMatrix<f64>, z: &DVector<f64>) -> Result<DVector<f64>> {
    if !g.is_square() || g.nrows() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} system with right-hand side of length {}",
            g.nrows(),
            g.ncols(),
            z.len()
        )));
    }
    let cond = condition_number(g);
    if !(cond < MAX_CONDITION) {
        return Err(Error::NearSingular(cond));
    }
    g.clone().lu().solve(z).ok_or(Error::NearSingular(cond))
}

/// Minimum-norm least-squares solution and an orthonormal basis of the null
/// space, with singular values below `rel_tol * sigma_max` treated as zero.
pub fn lstsq_with_null(
    g: &DMatrix<f64>,
    z: &DVector<f64>,
    rel_tol: f64,
) -> (DVector<f64>, Vec<DVector<f64>>) {
    let n = g.ncols();
    let svd = g.clone().svd(true, true);
    let u = svd.u.as_ref().unwrap();
    let vt = svd.v_t.as_ref().unwrap();
    let smax = svd.singular_values.max();
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let mut y = DVector::zeros(n);
    let mut null = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        let v = vt.row(k).transpose();
        if s > cut {
            let coef = u.column(k).dot(z) / s;
            y += v * coef;
        } else {
            null.push(v);
        }
    }
    // Full V has n rows; rank-deficient directions missing from a thin SVD.
    if vt.nrows() < n {
        let basis = DMatrix::<f64>::identity(n, n);
        for c in 0..n {
            let mut v = basis.column(c).into_owned();
            for k in 0..vt.nrows() {
                let r = vt.row(k).transpose();
                v -= &r * r.dot(&v);
            }
            for w in &null {
                v -= w * w.dot(&v);
            }
            if v.norm() > 1e-8 {
                null.push(v.normalize());
            }
        }
    }
    (y, null)
}

/// `e_0, .., e_n` of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] += v * e[k - 1];
        }
    }
    e
}

/// Random-free Gram check `max |V^T V - I|`.
pub fn orthogonality_defect(v: &DMatrix<f64>) -> f64 {
    let g = v.transpose() * v;
    max_abs(&(g - DMatrix::identity(v.ncols(), v.ncols())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_nalgebra() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, 4.0, 3.0, -2.0, 0.0, 1.0, 7.0]);
        assert!((det(&m) - m.determinant()).abs() < 1e-12);
        assert_eq!(det(&DMatrix::zeros(2, 2)), 0.0);
    }

    #[test]
    fn sym_eig_descending() {
        let (vals, vecs) = sym_eig(&DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 2.0]))).unwrap();
        assert_eq!(vals, vec![3.0, 2.0, 1.0]);
        assert!(orthogonality_defect(&vecs) < 1e-12);
        assert!(matches!(
            sym_eig(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn solves_diagonal_system_of_cubic_example() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 1.0, 5.0, 8.0, 9.0, 6.0, 12.0, 18.0]);
        let y = lin_solve(&g, &DVector::from_vec(vec![6.0, 42.0, 66.0])).unwrap();
        for (a, b) in y.iter().zip([2.5, 2.0, 1.5]) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = DVector::from_vec(vec![1.0, -2.0]);
        assert_eq!(lin_solve(&DMatrix::identity(2, 2), &z).unwrap(), z);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(lin_solve(&singular, &z), Err(Error::NearSingular(_))));
    }

    #[test]
    fn null_space_of_repeated_columns() {
        let g = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 0.0, 2.0, 2.0]);
        let z = DVector::from_vec(vec![3.0, 4.0]);
        let (y, null) = lstsq_with_null(&g, &z, 1e-10);
        assert!((&g * &y - &z).norm() < 1e-12);
        assert_eq!(null.len(), 1);
        assert!((&g * &null[0]).norm() < 1e-12);
    }

    #[test]
    fn elementary_symmetric_values() {
        assert_eq!(elementary_symmetric(&[3.0, 2.0, 1.0]), vec![1.0, 6.0, 11.0, 6.0]);
    }
}
