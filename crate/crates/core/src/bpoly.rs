//! Dense bivariate polynomials with a unit constant term.
//!
//! A polynomial of degree `d` is stored as a `(d+1) x (d+1)` grid whose entry
//! `(a, b)` is the coefficient of `x1^a * x2^b`. Entries with `a + b > d` are
//! always zero.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEGREE: usize = 8;

/// One of the two coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X1,
    X2,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 1,
            Axis::X2 => 2,
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X1 => Axis::X2,
            Axis::X2 => Axis::X1,
        }
    }
}

impl Serialize for Axis {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.index() as u8)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BivariatePoly {
    degree: usize,
    coeffs: Vec<Vec<f64>>,
}

/// Coefficients of `t -> f(t * e_i)`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnivariateSlice {
    pub coeffs: Vec<f64>,
}

impl UnivariateSlice {
    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Degree after dropping exactly-zero leading coefficients.
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedEntry {
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

/// The primary mixed-coefficient vector `(f11, f21, .., f_{d-1,1}, f12, .., f_{1,d-1})`
/// together with every mixed coefficient of the polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedCoefficients {
    pub layout: Vec<(usize, usize)>,
    pub primary: Vec<f64>,
    pub grid: Vec<MixedEntry>,
}

/// Exponent pairs of the primary mixed-coefficient layout for degree `d`.
pub fn primary_layout(d: usize) -> Vec<(usize, usize)> {
    if d < 2 {
        return Vec::new();
    }
    let mut out: Vec<(usize, usize)> = (1..d).map(|a| (a, 1)).collect();
    out.extend((2..d).map(|b| (1, b)));
    out
}

#[derive(Deserialize)]
struct RawPoly {
    degree: usize,
    coeffs: Vec<Vec<f64>>,
}

impl BivariatePoly {
    /// Builds a polynomial from a square grid, inferring the degree from the
    /// highest nonzero total degree.
    pub fn from_grid(grid: Vec<Vec<f64>>) -> Result<Self> {
        let n = grid.len();
        if grid.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGrid("grid must be square".into()));
        }
        let mut degree = 0;
        for (a, row) in grid.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if !c.is_finite() {
                    return Err(Error::InvalidGrid(format!("non-finite coefficient at ({a},{b})")));
                }
                if c != 0.0 && (a, b) != (0, 0) {
                    degree = degree.max(a + b);
                }
            }
        }
        if degree == 0 {
            return Err(Error::NoTopDegreeTerm);
        }
        let mut coeffs = vec![vec![0.0; degree + 1]; degree + 1];
        for (a, row) in grid.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if a + b <= degree && c != 0.0 {
                    coeffs[a][b] = c;
                }
            }
        }
        Self::check_constant(coeffs[0][0])?;
        coeffs[0][0] = 1.0;
        Ok(BivariatePoly { degree, coeffs })
    }

    /// Keeps the stated degree even when the top layer vanishes. Used for
    /// expansions of size-`d` pencils whose determinant may drop degree.
    pub fn with_nominal_degree(degree: usize, grid: &[Vec<f64>]) -> Result<Self> {
        let mut coeffs = vec![vec![0.0; degree + 1]; degree + 1];
        for (a, row) in grid.iter().enumerate() {
            for (b, &c) in row.iter().enumerate() {
                if a + b <= degree {
                    coeffs[a][b] = c;
                } else if c != 0.0 {
                    return Err(Error::InvalidGrid(format!(
                        "nonzero coefficient at ({a},{b}) above degree {degree}"
                    )));
                }
            }
        }
        Self::check_constant(coeffs[0][0])?;
        coeffs[0][0] = 1.0;
        Ok(BivariatePoly { degree, coeffs })
    }

    fn check_constant(c: f64) -> Result<()> {
        if (c - 1.0).abs() > 1e-12 {
            return Err(Error::NonMonicConstant(c));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawPoly = serde_json::from_str(text)?;
        let n = raw.degree + 1;
        if raw.coeffs.len() > n || raw.coeffs.iter().any(|r| r.len() > n) {
            return Err(Error::InvalidGrid(format!(
                "grid larger than degree {} allows",
                raw.degree
            )));
        }
        let p = Self::with_nominal_degree(raw.degree, &raw.coeffs)?;
        if raw.degree == 0 || !p.has_top_layer() {
            return Err(Error::NoTopDegreeTerm);
        }
        Ok(p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "degree": self.degree, "coeffs": self.coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grid(&self) -> &[Vec<f64>] {
        &self.coeffs
    }

    /// Coefficient of `x1^a x2^b`; zero outside the grid.
    pub fn coeff(&self, a: usize, b: usize) -> f64 {
        self.coeffs
            .get(a)
            .and_then(|row| row.get(b))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn has_top_layer(&self) -> bool {
        (0..=self.degree).any(|a| self.coeffs[a][self.degree - a] != 0.0)
    }

    /// Copy with one coefficient replaced.
    pub fn with_coeff(&self, a: usize, b: usize, value: f64) -> Result<Self> {
        if a + b > self.degree || a + b == 0 {
            return Err(Error::InvalidGrid(format!(
                "cannot set ({a},{b}) on a degree {} polynomial",
                self.degree
            )));
        }
        let mut grid = self.coeffs.clone();
        grid[a][b] = value;
        Self::with_nominal_degree(self.degree, &grid)
    }

    pub fn restrict_axis(&self, axis: Axis) -> UnivariateSlice {
        let coeffs = (0..=self.degree)
            .map(|k| match axis {
                Axis::X1 => self.coeffs[k][0],
                Axis::X2 => self.coeffs[0][k],
            })
            .collect();
        UnivariateSlice { coeffs }
    }

    /// Ascending coefficients of `t -> f(t * x1, t * x2)`.
    pub fn restrict_direction(&self, x1: f64, x2: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree + 1];
        for a in 0..=self.degree {
            for b in 0..=self.degree - a {
                out[a + b] += self.coeffs[a][b] * x1.powi(a as i32) * x2.powi(b as i32);
            }
        }
        out
    }

    pub fn evaluate(&self, x1: f64, x2: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, row| {
            let inner = row.iter().rev().fold(0.0, |s, &c| s * x2 + c);
            acc * x1 + inner
        })
    }

    pub fn mixed_coefficient_vector(&self) -> MixedCoefficients {
        let layout = primary_layout(self.degree);
        let primary = layout.iter().map(|&(a, b)| self.coeff(a, b)).collect();
        let mut grid = Vec::new();
        for a in 1..self.degree {
            for b in 1..=self.degree - a {
                grid.push(MixedEntry { a, b, value: self.coeff(a, b) });
            }
        }
        MixedCoefficients { layout, primary, grid }
    }

    /// Largest `|self_ab - reference_ab| / (1 + |reference_ab|)` over the union of both grids.
    pub fn relative_mismatch(&self, reference: &BivariatePoly) -> f64 {
        let n = self.degree.max(reference.degree);
        let mut worst: f64 = 0.0;
        for a in 0..=n {
            for b in 0..=n - a {
                let r = reference.coeff(a, b);
                worst = worst.max((self.coeff(a, b) - r).abs() / (1.0 + r.abs()));
            }
        }
        worst
    }

    /// Expression form accepted by [`parse`].
    pub fn to_expression(&self) -> String {
        let mut terms: Vec<(usize, usize, f64)> = Vec::new();
        for total in (0..=self.degree).rev() {
            for a in (0..=total).rev() {
                let c = self.coeffs[a][total - a];
                if c != 0.0 {
                    terms.push((a, total - a, c));
                }
            }
        }
        let mut out = String::new();
        for (i, (a, b, c)) in terms.into_iter().enumerate() {
            if c < 0.0 {
                out.push('-');
            } else if i > 0 {
                out.push('+');
            }
            let mut factors = vec![format!("{}", c.abs())];
            for (var, e) in [("x1", a), ("x2", b)] {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            if factors.len() > 1 && c.abs() == 1.0 {
                factors.remove(0);
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expression())
    }
}

/// Parses an expression such as `6*x1^3+11*x1^2+6*x1+1` with the default degree cap.
pub fn parse(text: &str) -> Result<BivariatePoly> {
    parse_with_max(text, DEFAULT_MAX_DEGREE)
}

/// Accepts either the expression syntax or the JSON grid form.
pub fn read_poly(text: &str, max_degree: usize) -> Result<BivariatePoly> {
    let p = if text.trim_start().starts_with('{') {
        BivariatePoly::from_json(text)?
    } else {
        parse_with_max(text, max_degree)?
    };
    if p.degree() > max_degree {
        return Err(Error::DegreeOverflow { degree: p.degree(), max: max_degree });
    }
    Ok(p)
}

pub fn parse_with_max(text: &str, max_degree: usize) -> Result<BivariatePoly> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(malformed("", "empty expression"));
    }
    let mut terms: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for term in split_terms(&compact) {
        let (a, b, c) = parse_term(term)?;
        *terms.entry((a, b)).or_insert(0.0) += c;
    }
    let degree = terms
        .iter()
        .filter(|(&(a, b), &c)| c != 0.0 && a + b > 0)
        .map(|(&(a, b), _)| a + b)
        .max()
        .unwrap_or(0);
    if degree > max_degree {
        return Err(Error::DegreeOverflow { degree, max: max_degree });
    }
    let constant = terms.get(&(0, 0)).copied().unwrap_or(0.0);
    if constant != 1.0 {
        return Err(Error::NonMonicConstant(constant));
    }
    if degree == 0 {
        return Err(Error::NoTopDegreeTerm);
    }
    let mut grid = vec![vec![0.0; degree + 1]; degree + 1];
    for ((a, b), c) in terms {
        grid[a][b] = c;
    }
    BivariatePoly::from_grid(grid)
}

fn malformed(term: &str, reason: &str) -> Error {
    Error::MalformedTerm { term: term.to_string(), reason: reason.to_string() }
}

fn split_terms(s: &str) -> Vec<&str> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..bytes.len() {
        if bytes[i] != b'+' && bytes[i] != b'-' {
            continue;
        }
        let prev = bytes[i - 1];
        let exponent_sign = (prev == b'e' || prev == b'E')
            && i >= 2
            && (bytes[i - 2].is_ascii_digit() || bytes[i - 2] == b'.');
        if exponent_sign || matches!(prev, b'*' | b'^' | b'/' | b'+' | b'-') {
            continue;
        }
        out.push(&s[start..i]);
        start = i;
    }
    out.push(&s[start..]);
    out
}

fn parse_term(term: &str) -> Result<(usize, usize, f64)> {
    let (sign, body) = match term.as_bytes().first() {
        Some(b'+') => (1.0, &term[1..]),
        Some(b'-') => (-1.0, &term[1..]),
        _ => (1.0, term),
    };
    if body.is_empty() {
        return Err(malformed(term, "missing term after sign"));
    }
    let mut coef = sign;
    let (mut a, mut b) = (0usize, 0usize);
    for factor in body.split('*') {
        if factor.is_empty() {
            return Err(malformed(term, "empty factor"));
        }
        if let Some(rest) = factor.strip_prefix('x') {
            let (var, exp) = match rest.split_once('^') {
                Some((v, e)) => {
                    let e: usize = e
                        .parse()
                        .map_err(|_| malformed(term, "exponent must be a nonnegative integer"))?;
                    (v, e)
                }
                None => (rest, 1),
            };
            match var {
                "1" => a += exp,
                "2" => b += exp,
                _ => return Err(malformed(term, "unknown variable (expected x1 or x2)")),
            }
        } else {
            coef *= parse_number(factor).ok_or_else(|| malformed(term, "invalid coefficient"))?;
        }
    }
    Ok((a, b, coef))
}

fn parse_number(s: &str) -> Option<f64> {
    let decimal = |t: &str| -> Option<f64> {
        let first = t.as_bytes().first()?;
        if !(first.is_ascii_digit() || *first == b'.') {
            return None;
        }
        t.parse::<f64>().ok().filter(|v| v.is_finite())
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = decimal(den)?;
            if d == 0.0 {
                return None;
            }
            Some(decimal(num)? / d)
        }
        None => decimal(s),
    }
}
