//! Disjunctive model data structures.
//!
//! A [`DisjunctiveModel`] holds box-bounded continuous variables, a linear
//! objective, global linear rows and a list of disjunctions. Each disjunct is
//! a block of separable constraints `sum_i h_i(x_i) <= b` where every `h_i`
//! is affine or convex quadratic in a single variable. Models are immutable
//! after construction; reformulations produce new objects.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::jsonio::flex_f64;

/// Index of a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarRef(pub usize);

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Closed interval domain of a single variable. Both ends must be finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    #[serde(with = "flex_f64")]
    pub lower: f64,
    #[serde(with = "flex_f64")]
    pub upper: f64,
}

impl BoxDomain {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lower - tol && x <= self.upper + tol
    }

    /// Structurally usable: finite and non-empty.
    pub fn is_valid(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && self.lower <= self.upper
    }
}

/// A convex univariate term.
///
/// `Affine { weight }` is `weight * x`. `Quadratic { curvature, linear, shift }`
/// is `curvature * (x - shift)^2 + linear * x` and is convex whenever
/// `curvature >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnivariateTerm {
    Affine {
        #[serde(rename = "w", with = "flex_f64")]
        weight: f64,
    },
    Quadratic {
        #[serde(rename = "a", with = "flex_f64")]
        curvature: f64,
        #[serde(rename = "q", with = "flex_f64")]
        linear: f64,
        #[serde(rename = "c", with = "flex_f64")]
        shift: f64,
    },
}

impl UnivariateTerm {
    pub fn affine(weight: f64) -> Self {
        UnivariateTerm::Affine { weight }
    }

    /// `curvature * (x - shift)^2`.
    pub fn squared_distance(shift: f64, curvature: f64) -> Self {
        UnivariateTerm::Quadratic { curvature, linear: 0.0, shift }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            UnivariateTerm::Affine { weight } => weight * x,
            UnivariateTerm::Quadratic { curvature, linear, shift } => {
                let d = x - shift;
                curvature * d * d + linear * x
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            UnivariateTerm::Affine { weight } => weight,
            UnivariateTerm::Quadratic { curvature, linear, shift } => {
                2.0 * curvature * (x - shift) + linear
            }
        }
    }

    /// Convex iff any quadratic curvature is nonnegative.
    pub fn is_convex(&self) -> bool {
        match *self {
            UnivariateTerm::Affine { .. } => true,
            UnivariateTerm::Quadratic { curvature, .. } => curvature >= 0.0,
        }
    }

    /// True when the term is identically zero.
    pub fn is_zero(&self) -> bool {
        match *self {
            UnivariateTerm::Affine { weight } => weight == 0.0,
            UnivariateTerm::Quadratic { curvature, linear, .. } => {
                curvature == 0.0 && linear == 0.0
            }
        }
    }

    /// True when the term contributes no genuine quadratic part.
    pub fn is_affine_like(&self) -> bool {
        match *self {
            UnivariateTerm::Affine { .. } => true,
            UnivariateTerm::Quadratic { curvature, .. } => curvature == 0.0,
        }
    }
}

/// One separable constraint `sum_i h_i(x_i) <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparableConstraint {
    pub terms: Vec<(VarRef, UnivariateTerm)>,
    #[serde(with = "flex_f64")]
    pub rhs: f64,
}

impl SeparableConstraint {
    pub fn new(terms: Vec<(VarRef, UnivariateTerm)>, rhs: f64) -> Self {
        Self { terms, rhs }
    }

    /// Variables referenced by this constraint, in term order.
    pub fn support(&self) -> Vec<VarRef> {
        self.terms.iter().map(|(v, _)| *v).collect()
    }

    /// `g(x) - rhs`; nonpositive iff the constraint is satisfied at `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, ModelError> {
        let mut sum = -self.rhs;
        for (v, t) in &self.terms {
            let xi = *x.get(v.0).ok_or(ModelError::DimensionMismatch {
                expected: v.0 + 1,
                got: x.len(),
            })?;
            sum += t.value(xi);
        }
        Ok(sum)
    }
}

/// One alternative block of constraints inside a disjunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Disjunct {
    pub constraints: Vec<SeparableConstraint>,
}

impl Disjunct {
    pub fn new(constraints: Vec<SeparableConstraint>) -> Self {
        Self { constraints }
    }

    /// True iff every constraint holds at `x` within `tol`.
    pub fn satisfied_at(&self, x: &[f64], tol: f64) -> Result<bool, ModelError> {
        for c in &self.constraints {
            if c.evaluate(x)? > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A disjunction over two or more disjuncts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Disjunction {
    pub disjuncts: Vec<Disjunct>,
}

impl Disjunction {
    pub fn new(disjuncts: Vec<Disjunct>) -> Self {
        Self { disjuncts }
    }

    /// Sorted union of the supports of all member constraints.
    pub fn support(&self) -> Vec<VarRef> {
        let mut vars: Vec<VarRef> = self
            .disjuncts
            .iter()
            .flat_map(|d| d.constraints.iter())
            .flat_map(|c| c.terms.iter().map(|(v, _)| *v))
            .collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// True iff some disjunct is fully satisfied at `x` within `tol`.
    pub fn satisfied_at(&self, x: &[f64], tol: f64) -> Result<bool, ModelError> {
        for d in &self.disjuncts {
            if d.satisfied_at(x, tol)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Row sense for linear constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Sparse linear row `sum coeffs_i * x_i  (sense)  rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub coeffs: Vec<(VarRef, f64)>,
    #[serde(with = "flex_f64")]
    pub rhs: f64,
    pub sense: Sense,
}

impl LinearRow {
    pub fn le(coeffs: Vec<(VarRef, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs, sense: Sense::Le }
    }

    pub fn ge(coeffs: Vec<(VarRef, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs, sense: Sense::Ge }
    }

    pub fn eq(coeffs: Vec<(VarRef, f64)>, rhs: f64) -> Self {
        Self { coeffs, rhs, sense: Sense::Eq }
    }
}

/// Linear objective `coeffs . x + constant`, always minimized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearObjective {
    pub coeffs: Vec<f64>,
    #[serde(default, with = "flex_f64")]
    pub constant: f64,
}

impl LinearObjective {
    pub fn new(coeffs: Vec<f64>, constant: f64) -> Self {
        Self { coeffs, constant }
    }

    pub fn zeros(n: usize) -> Self {
        Self { coeffs: vec![0.0; n], constant: 0.0 }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.constant + self.coeffs.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

/// A linear row over the disjunct-selection binaries introduced by
/// reformulation: `sum coeff * lambda[disjunction][disjunct] (sense) rhs`.
///
/// This is plumbing for problems that couple disjunct choices across
/// disjunctions (e.g. one-point-per-ball assignment exclusivity). Every
/// reformulation carries these rows over its own lambda variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCoupling {
    /// Entries `(disjunction index, disjunct index, coefficient)`.
    pub coeffs: Vec<(usize, usize, f64)>,
    #[serde(with = "flex_f64")]
    pub rhs: f64,
    pub sense: Sense,
}

/// A disjunctive optimization model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjunctiveModel {
    pub variables: Vec<BoxDomain>,
    pub objective: LinearObjective,
    #[serde(default)]
    pub global_linear: Vec<LinearRow>,
    pub disjunctions: Vec<Disjunction>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda_couplings: Vec<LambdaCoupling>,
}

impl DisjunctiveModel {
    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Structural well-formedness: in-range references, valid boxes,
    /// matching objective dimension, nonempty disjuncts, `|D| >= 2`.
    ///
    /// Assumption-level diagnostics (convexity, nonemptiness) live in
    /// [`crate::validate`]; this check is a hard gate used by every builder.
    pub fn check_structure(&self) -> Result<(), ModelError> {
        let n = self.num_vars();
        for (i, b) in self.variables.iter().enumerate() {
            if !b.lower.is_finite() || !b.upper.is_finite() {
                return Err(ModelError::NonFiniteBox { var: i });
            }
            if b.lower > b.upper {
                return Err(ModelError::EmptyBox { var: i });
            }
        }
        if self.objective.coeffs.len() != n {
            return Err(ModelError::DimensionMismatch { expected: n, got: self.objective.coeffs.len() });
        }
        for row in &self.global_linear {
            for (v, _) in &row.coeffs {
                if v.0 >= n {
                    return Err(ModelError::DanglingVarRef { var: v.0, num_vars: n });
                }
            }
        }
        for (di, disjunction) in self.disjunctions.iter().enumerate() {
            if disjunction.disjuncts.len() < 2 {
                return Err(ModelError::TooFewDisjuncts { disjunction: di, count: disjunction.disjuncts.len() });
            }
            for (li, disjunct) in disjunction.disjuncts.iter().enumerate() {
                if disjunct.constraints.is_empty() {
                    return Err(ModelError::EmptyDisjunct { disjunction: di, disjunct: li });
                }
                for c in &disjunct.constraints {
                    for (v, _) in &c.terms {
                        if v.0 >= n {
                            return Err(ModelError::DanglingVarRef { var: v.0, num_vars: n });
                        }
                    }
                }
            }
        }
        for coupling in &self.lambda_couplings {
            for &(dj, dl, _) in &coupling.coeffs {
                let nd = self
                    .disjunctions
                    .get(dj)
                    .map(|d| d.disjuncts.len())
                    .ok_or(ModelError::DanglingDisjunctRef { disjunction: dj, disjunct: dl })?;
                if dl >= nd {
                    return Err(ModelError::DanglingDisjunctRef { disjunction: dj, disjunct: dl });
                }
            }
        }
        Ok(())
    }

    /// True iff `x` lies in the box and satisfies every global row and every
    /// disjunction. This is the sampling oracle used by the equivalence tests.
    pub fn feasible_at(&self, x: &[f64], tol: f64) -> Result<bool, ModelError> {
        if x.len() != self.num_vars() {
            return Err(ModelError::DimensionMismatch { expected: self.num_vars(), got: x.len() });
        }
        for (b, &xi) in self.variables.iter().zip(x) {
            if !b.contains(xi, tol) {
                return Ok(false);
            }
        }
        for row in &self.global_linear {
            let lhs: f64 = row.coeffs.iter().map(|(v, c)| c * x[v.0]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + tol,
                Sense::Ge => lhs >= row.rhs - tol,
                Sense::Eq => (lhs - row.rhs).abs() <= tol,
            };
            if !ok {
                return Ok(false);
            }
        }
        for d in &self.disjunctions {
            if !d.satisfied_at(x, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Structural errors; these are hard failures everywhere.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    DanglingVarRef { var: usize, num_vars: usize },
    DanglingDisjunctRef { disjunction: usize, disjunct: usize },
    EmptyBox { var: usize },
    NonFiniteBox { var: usize },
    EmptyDisjunct { disjunction: usize, disjunct: usize },
    TooFewDisjuncts { disjunction: usize, count: usize },
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::DanglingVarRef { var, num_vars } => {
                write!(f, "variable reference x{var} out of range (model has {num_vars} variables)")
            }
            ModelError::DanglingDisjunctRef { disjunction, disjunct } => {
                write!(f, "lambda coupling references missing disjunct {disjunct} of disjunction {disjunction}")
            }
            ModelError::EmptyBox { var } => write!(f, "variable x{var} has an empty domain (lower > upper)"),
            ModelError::NonFiniteBox { var } => write!(f, "variable x{var} has a non-finite bound"),
            ModelError::EmptyDisjunct { disjunction, disjunct } => {
                write!(f, "disjunct {disjunct} of disjunction {disjunction} has no constraints")
            }
            ModelError::TooFewDisjuncts { disjunction, count } => {
                write!(f, "disjunction {disjunction} has {count} disjunct(s); at least 2 required")
            }
            ModelError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for ModelError {}
