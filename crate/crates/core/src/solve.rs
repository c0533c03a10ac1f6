//! Dispatch by degree: size 3 through the cubic solver, every other size
//! through the relaxation and witness search.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::bpoly::BivariatePoly;
use crate::cubic::{mhdr3_feasible, msdr3, MhdrReport, Msdr3Options, Msdr3Outcome, PencilRep};
use crate::relax::{quartic_witness_search, relax_membership, RelaxOutcome, SearchOptions, SearchReport};
use crate::spectral::{necessary_battery, BatteryReport};
use crate::tol::Tolerances;
use crate::verify::{coefficient_via_gmd, rz_sample_check, RzReport};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub all: bool,
    pub hermitian_feasibility: bool,
    pub tolerances: Tolerances,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Linear,
    Cubic,
    Relaxation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Found,
    /// A necessary condition or the relaxation LP rules out every representation.
    ProvenInfeasible,
    /// Nothing verified, but nothing proven either.
    NotFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub schema: u32,
    pub polynomial: String,
    pub degree: usize,
    pub route: Route,
    pub status: SolveStatus,
    pub proven_infeasible: bool,
    pub diagnostic: String,
    pub representations: Vec<PencilRep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub battery: Option<BatteryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cubic: Option<Msdr3Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relaxation: Option<RelaxOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hermitian: Option<MhdrReport>,
    /// Attached when nothing was found: sampled real-zero check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rz: Option<RzReport>,
}

fn linear(p: &BivariatePoly, tol: &Tolerances) -> Option<PencilRep> {
    let v = DMatrix::identity(1, 1);
    PencilRep::assemble(p, &[p.coeff(1, 0)], &[p.coeff(0, 1)], v, tol.residual)
}

pub fn solve(p: &BivariatePoly, opts: &SolveOptions) -> SolveReport {
    let tol = &opts.tolerances;
    let d = p.degree();
    let mut report = SolveReport {
        schema: SCHEMA,
        polynomial: p.to_expression(),
        degree: d,
        route: Route::Relaxation,
        status: SolveStatus::NotFound,
        proven_infeasible: false,
        diagnostic: String::new(),
        representations: Vec::new(),
        battery: None,
        cubic: None,
        relaxation: None,
        search: None,
        hermitian: None,
        rz: None,
    };
    if d == 1 {
        report.route = Route::Linear;
        report.representations.extend(linear(p, tol));
        report.battery = Some(necessary_battery(p, tol));
        report.diagnostic = "size 1: the coefficients are the matrices".into();
    } else if d == 3 {
        report.route = Route::Cubic;
        let mut out = msdr3(p, &Msdr3Options { all: opts.all, tolerances: tol.clone(), y1: None, y2: None });
        report.representations = std::mem::take(&mut out.reps);
        report.proven_infeasible = out.proven_infeasible;
        report.diagnostic = out.diagnostic.clone();
        report.battery = out.battery.take();
        report.cubic = Some(out);
        if opts.hermitian_feasibility {
            report.hermitian = Some(mhdr3_feasible(p, tol));
        }
    } else {
        let relax = relax_membership(p, tol);
        report.battery = Some(relax.battery.clone());
        if !relax.feasible() {
            report.proven_infeasible = true;
            report.diagnostic = relax.diagnostic.clone();
        } else {
            let search = quartic_witness_search(
                p,
                &relax,
                &SearchOptions { all: opts.all, tolerances: tol.clone(), ..Default::default() },
            );
            report.representations = search.witnesses.iter().map(|w| w.rep.clone()).collect();
            report.diagnostic = format!("{}; {}", relax.diagnostic, search.diagnostic);
            report.search = Some(search);
        }
        report.relaxation = Some(relax);
    }
    report.status = if !report.representations.is_empty() {
        SolveStatus::Found
    } else if report.proven_infeasible {
        SolveStatus::ProvenInfeasible
    } else {
        SolveStatus::NotFound
    };
    if report.representations.is_empty() && d >= 1 {
        report.rz = Some(rz_sample_check(p, 360, 1e-7));
    }
    report
}

/// Recomputes every coefficient of a representation through mixed
/// discriminants and returns the worst relative mismatch against `p`.
pub fn gmd_mismatch(p: &BivariatePoly, rep: &PencilRep) -> f64 {
    let d = p.degree();
    let mut worst: f64 = 0.0;
    for a in 0..=d {
        for b in 0..=d - a {
            let Ok(v) = coefficient_via_gmd(&rep.d1, &rep.a2, a, b) else { return f64::INFINITY };
            let want = p.coeff(a, b);
            worst = worst.max((v - want).abs() / (1.0 + want.abs()));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpoly::parse;

    #[test]
    fn linear_polynomial() {
        let p = parse("1+2*x1-3*x2").unwrap();
        let r = solve(&p, &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::Found);
        assert!(gmd_mismatch(&p, &r.representations[0]) < 1e-12);
    }

    #[test]
    fn non_rz_cubic() {
        let p = parse("6*x1^3+37.97*x1^2*x2+71.94*x1*x2^2+36*x2^3+11*x1^2+42.99*x1*x2+36*x2^2+6*x1+11*x2+1").unwrap();
        let r = solve(&p, &SolveOptions::default());
        assert_eq!(r.status, SolveStatus::NotFound, "{}", r.diagnostic);
        assert!(r.rz.unwrap().failures > 0);
    }
}
