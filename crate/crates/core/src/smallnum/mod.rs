//! Dense numeric kernels sized for pencils up to order 8.

mod linalg;
mod lp;
mod roots;

pub use linalg::{
    condition_number, det, elementary_symmetric, lin_solve, lstsq_with_null, max_abs,
    orthogonality_defect, sym_eig, MAX_CONDITION,
};
pub use lp::{hull_residual, lp_feasible_convex, simplex, LpResult, LpStatus};
pub use roots::{poly_roots, poly_roots_with_tol, rel_imag, RootCluster, RootReport, C64};
