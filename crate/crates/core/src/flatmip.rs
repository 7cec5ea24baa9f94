//! Flat mixed-integer representation produced by the reformulation builders.
//!
//! A [`FlatMip`] is a plain variable/row container: box-bounded continuous
//! and binary variables, sparse linear rows, and convex rows of the form
//! `sum_i a_i * x_i^2 + sum_j c_j * x_j <= rhs` with `a_i > 0`. Quadratic
//! terms are kept in this diagonal canonical form so that text round-trips
//! are exact.

use std::fmt;

use crate::model::Sense;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Role of a variable in the formulation it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarTag {
    /// Original model variable with its index.
    X(usize),
    /// Group-sum auxiliary `alpha` of (disjunction, disjunct, constraint, group).
    Alpha { disjunction: usize, disjunct: usize, constraint: usize, group: usize },
    /// Disaggregated copy `nu` of an alpha variable for disjunct `copy_for`.
    Nu { disjunction: usize, disjunct: usize, constraint: usize, group: usize, copy_for: usize },
    /// Disaggregated copy of original variable `var` for a hull disjunct.
    HullCopy { disjunction: usize, disjunct: usize, var: usize },
    /// Disjunct selector binary.
    Lambda { disjunction: usize, disjunct: usize },
    /// Anything else (e.g. variables reconstructed from a foreign file).
    Slack,
}

#[derive(Debug, Clone)]
pub struct MipVar {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    pub tag: VarTag,
}

/// Where a row came from: disjunction/disjunct/group indices when applicable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Provenance {
    pub disjunction: Option<usize>,
    pub disjunct: Option<usize>,
    pub group: Option<usize>,
}

impl Provenance {
    pub fn disjunction(d: usize) -> Self {
        Self { disjunction: Some(d), ..Self::default() }
    }

    pub fn disjunct(d: usize, l: usize) -> Self {
        Self { disjunction: Some(d), disjunct: Some(l), ..Self::default() }
    }

    pub fn group(d: usize, l: usize, s: usize) -> Self {
        Self { disjunction: Some(d), disjunct: Some(l), group: Some(s) }
    }
}

#[derive(Debug, Clone)]
pub struct LinRow {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub provenance: Provenance,
}

/// Convex row `sum quad_i * x_i^2 + sum linear_j * x_j <= rhs`, all
/// curvatures strictly positive.
#[derive(Debug, Clone)]
pub struct ConvexRow {
    pub name: String,
    pub quad: Vec<(usize, f64)>,
    pub linear: Vec<(usize, f64)>,
    pub rhs: f64,
    pub provenance: Provenance,
}

impl ConvexRow {
    /// `g(x) - rhs`; nonpositive iff satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut v = -self.rhs;
        for &(j, a) in &self.quad {
            v += a * x[j] * x[j];
        }
        for &(j, c) in &self.linear {
            v += c * x[j];
        }
        v
    }

    /// Supporting-hyperplane cut at `x0`:
    /// `g(x0) + g'(x0)^T (x - x0) <= rhs`, returned as `(coeffs, rhs)` of a
    /// `<=` row. Valid for every point satisfying the convex row.
    pub fn gradient_cut(&self, x0: &[f64]) -> (Vec<(usize, f64)>, f64) {
        let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(self.quad.len() + self.linear.len());
        // rhs' = rhs - g(x0) + g'(x0)^T x0, which leaves the linear part
        // untouched and adds a_j * x0_j^2 per quadratic term.
        let mut rhs = self.rhs;
        for &(j, a) in &self.quad {
            coeffs.push((j, 2.0 * a * x0[j]));
            rhs += a * x0[j] * x0[j];
        }
        for &(j, c) in &self.linear {
            coeffs.push((j, c));
        }
        merge_coeffs(&mut coeffs);
        (coeffs, rhs)
    }
}

/// Sums duplicate column entries in place and drops exact zeros.
pub fn merge_coeffs(coeffs: &mut Vec<(usize, f64)>) {
    coeffs.sort_by_key(|&(j, _)| j);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(coeffs.len());
    for &(j, c) in coeffs.iter() {
        match out.last_mut() {
            Some(last) if last.0 == j => last.1 += c,
            _ => out.push((j, c)),
        }
    }
    out.retain(|&(_, c)| c != 0.0);
    *coeffs = out;
}

/// Non-fatal findings recorded while building a formulation.
#[derive(Debug, Clone, PartialEq)]
pub enum BuildWarning {
    /// `M = upper - rhs` came out negative: the constraint remains
    /// restrictive (possibly infeasible) even when its disjunct is inactive.
    NegativeBigM { disjunction: usize, disjunct: usize, constraint: usize, m: f64 },
}

impl fmt::Display for BuildWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildWarning::NegativeBigM { disjunction, disjunct, constraint, m } => write!(
                f,
                "negative big-M {m} for constraint {constraint} of disjunct {disjunct} in disjunction {disjunction}"
            ),
        }
    }
}

/// A flat convex MIP: the common target of all formulation builders.
#[derive(Debug, Clone, Default)]
pub struct FlatMip {
    pub name: String,
    pub vars: Vec<MipVar>,
    pub linear_rows: Vec<LinRow>,
    pub convex_rows: Vec<ConvexRow>,
    /// Dense objective coefficients over `vars`, plus a constant. Minimized.
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub warnings: Vec<BuildWarning>,
}

impl FlatMip {
    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.linear_rows.len() + self.convex_rows.len()
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(i, _)| i)
    }

    pub fn add_var(&mut self, var: MipVar) -> usize {
        self.vars.push(var);
        self.objective.push(0.0);
        self.vars.len() - 1
    }

    /// Adds a linear row after merging duplicate coefficients.
    pub fn add_linear_row(&mut self, name: String, mut coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64, provenance: Provenance) {
        merge_coeffs(&mut coeffs);
        self.linear_rows.push(LinRow { name, coeffs, sense, rhs, provenance });
    }

    /// Adds `sum quad x^2 + linear x <= rhs`; routed to the linear rows when
    /// no genuine quadratic term remains.
    pub fn add_convex_row(&mut self, name: String, mut quad: Vec<(usize, f64)>, mut linear: Vec<(usize, f64)>, rhs: f64, provenance: Provenance) {
        merge_coeffs(&mut quad);
        if quad.is_empty() {
            self.add_linear_row(name, linear, Sense::Le, rhs, provenance);
        } else {
            merge_coeffs(&mut linear);
            self.convex_rows.push(ConvexRow { name, quad, linear, rhs, provenance });
        }
    }

    /// Objective value of a full assignment.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Internal consistency: references in range, finite bounds, exactly one
    /// selector convexity row per disjunction found among the variables.
    pub fn check_consistency(&self) -> Result<(), String> {
        let n = self.num_vars();
        if self.objective.len() != n {
            return Err(format!("objective length {} != variable count {n}", self.objective.len()));
        }
        for (i, v) in self.vars.iter().enumerate() {
            if !v.lower.is_finite() || !v.upper.is_finite() {
                return Err(format!("variable {} has a non-finite bound", v.name));
            }
            if v.lower > v.upper {
                return Err(format!("variable {} has empty bounds", v.name));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(format!("binary variable {} has bounds outside [0,1]", v.name));
            }
            let _ = i;
        }
        for r in &self.linear_rows {
            for &(j, _) in &r.coeffs {
                if j >= n {
                    return Err(format!("row {} references missing column {j}", r.name));
                }
            }
        }
        for r in &self.convex_rows {
            for &(j, a) in &r.quad {
                if j >= n {
                    return Err(format!("row {} references missing column {j}", r.name));
                }
                if a <= 0.0 {
                    return Err(format!("row {} has non-convex curvature {a}", r.name));
                }
            }
            for &(j, _) in &r.linear {
                if j >= n {
                    return Err(format!("row {} references missing column {j}", r.name));
                }
            }
        }
        // One convexity row per disjunction that has lambda variables.
        let mut disjunctions: Vec<usize> = self
            .vars
            .iter()
            .filter_map(|v| match v.tag {
                VarTag::Lambda { disjunction, .. } => Some(disjunction),
                _ => None,
            })
            .collect();
        disjunctions.sort_unstable();
        disjunctions.dedup();
        for d in disjunctions {
            let count = self
                .linear_rows
                .iter()
                .filter(|r| {
                    r.sense == Sense::Eq
                        && r.provenance.disjunction == Some(d)
                        && r.provenance.disjunct.is_none()
                        && r.name.starts_with("choose")
                })
                .count();
            if count != 1 {
                return Err(format!("disjunction {d} has {count} convexity rows, expected 1"));
            }
        }
        Ok(())
    }
}

/// Size accounting of a formulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormulationStats {
    pub continuous_vars: usize,
    pub binary_vars: usize,
    pub linear_rows: usize,
    pub convex_rows: usize,
    /// Auxiliary group-sum variables (`alpha`).
    pub alpha_vars: usize,
    /// Disaggregated copies: Eq-style `nu` plus hull variable copies.
    pub nu_vars: usize,
}

impl FormulationStats {
    /// Continuous variables added on top of the original model variables.
    pub fn added_continuous(&self) -> usize {
        self.alpha_vars + self.nu_vars
    }
}

impl fmt::Display for FormulationStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} continuous ({} alpha, {} copies), {} binary, {} linear rows, {} convex rows",
            self.continuous_vars, self.alpha_vars, self.nu_vars, self.binary_vars, self.linear_rows, self.convex_rows
        )
    }
}

/// Pure count over the FlatMip contents.
pub fn formulation_stats(f: &FlatMip) -> FormulationStats {
    let mut s = FormulationStats {
        linear_rows: f.linear_rows.len(),
        convex_rows: f.convex_rows.len(),
        ..FormulationStats::default()
    };
    for v in &f.vars {
        match v.kind {
            VarKind::Continuous => s.continuous_vars += 1,
            VarKind::Binary => s.binary_vars += 1,
        }
        match v.tag {
            VarTag::Alpha { .. } => s.alpha_vars += 1,
            VarTag::Nu { .. } | VarTag::HullCopy { .. } => s.nu_vars += 1,
            _ => {}
        }
    }
    s
}
