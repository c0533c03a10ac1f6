use serde::Serialize;

/// Numeric thresholds shared by the solver stages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Real-root classification: `|Im z| <= root * (1 + |Re z|)`.
    pub root: f64,
    /// Orthogonality of a recovered `V`.
    pub ortho: f64,
    /// Relative coefficient mismatch accepted for a representation.
    pub residual: f64,
    /// Absolute slack on majorization partial sums.
    pub majorization: f64,
    /// Row/column sum slack for doubly stochastic matrices.
    pub stochastic: f64,
    /// Equality slack in the convex-hull LP.
    pub lp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root: 1e-8,
            ortho: 1e-6,
            residual: 1e-5,
            majorization: 1e-7,
            stochastic: 1e-9,
            lp: 1e-7,
        }
    }
}
