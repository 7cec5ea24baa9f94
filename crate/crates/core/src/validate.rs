//! Model validation.
//!
//! Structural defects (dangling references, empty or infinite boxes, too few
//! disjuncts) are hard errors from [`DisjunctiveModel::check_structure`].
//! Everything else is reported as findings: non-convex terms, degenerate zero
//! terms, and optionally disjuncts that are empty over the box. Constraint
//! density per disjunct is reported as a diagnostic ratio and never enforced.

use std::fmt;

use crate::flatmip::{FlatMip, MipVar, Provenance, VarKind, VarTag};
use crate::model::{DisjunctiveModel, ModelError};
use crate::reformulate::canonical_terms;
use crate::solver::{solve_relaxation_with, LpStatus, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    NonConvexTerm { disjunction: usize, disjunct: usize, constraint: usize, var: usize },
    ZeroTerm { disjunction: usize, disjunct: usize, constraint: usize, var: usize },
    /// The disjunct has no feasible point inside the box (checked on request;
    /// the reformulations remain well-defined, the disjunct is just never
    /// selectable).
    EmptyDisjunctOnBox { disjunction: usize, disjunct: usize },
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::NonConvexTerm { disjunction, disjunct, constraint, var } => write!(
                f,
                "non-convex term on x{var} in constraint {constraint} of disjunct {disjunct}, disjunction {disjunction}"
            ),
            Finding::ZeroTerm { disjunction, disjunct, constraint, var } => write!(
                f,
                "identically zero term on x{var} in constraint {constraint} of disjunct {disjunct}, disjunction {disjunction}"
            ),
            Finding::EmptyDisjunctOnBox { disjunction, disjunct } => {
                write!(f, "disjunct {disjunct} of disjunction {disjunction} is empty on the box")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
    /// Largest `|C_l| / |support|` over all disjuncts; small values are the
    /// structure the split formulations are designed for.
    pub max_constraint_ratio: f64,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    /// Solve one convex feasibility problem per disjunct to detect disjuncts
    /// that are empty over the box.
    pub check_disjunct_feasibility: bool,
}

/// Validates a model: structural errors are returned as `Err`; assumption
/// violations come back as findings in the report.
pub fn validate(model: &DisjunctiveModel, options: ValidateOptions) -> Result<ValidationReport, ModelError> {
    model.check_structure()?;
    let mut report = ValidationReport::default();

    for (di, disjunction) in model.disjunctions.iter().enumerate() {
        let support_size = disjunction.support().len().max(1);
        for (li, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let ratio = disjunct.constraints.len() as f64 / support_size as f64;
            report.max_constraint_ratio = report.max_constraint_ratio.max(ratio);
            for (ki, constraint) in disjunct.constraints.iter().enumerate() {
                for (v, term) in &constraint.terms {
                    if !term.is_convex() {
                        report.findings.push(Finding::NonConvexTerm {
                            disjunction: di,
                            disjunct: li,
                            constraint: ki,
                            var: v.0,
                        });
                    } else if term.is_zero() {
                        report.findings.push(Finding::ZeroTerm {
                            disjunction: di,
                            disjunct: li,
                            constraint: ki,
                            var: v.0,
                        });
                    }
                }
            }
            if options.check_disjunct_feasibility
                && !disjunct_feasible_on_box(model, di, li)
            {
                report.findings.push(Finding::EmptyDisjunctOnBox { disjunction: di, disjunct: li });
            }
        }
    }
    Ok(report)
}

/// Convex feasibility probe: box plus the disjunct's constraints, zero
/// objective, quadratics enforced by outer approximation.
fn disjunct_feasible_on_box(model: &DisjunctiveModel, disjunction: usize, disjunct: usize) -> bool {
    let mut f = FlatMip { name: format!("feas{disjunction}_{disjunct}"), ..FlatMip::default() };
    for (i, b) in model.variables.iter().enumerate() {
        f.add_var(MipVar {
            name: format!("x{i}"),
            lower: b.lower,
            upper: b.upper,
            kind: VarKind::Continuous,
            tag: VarTag::X(i),
        });
    }
    for (k, constraint) in model.disjunctions[disjunction].disjuncts[disjunct].constraints.iter().enumerate() {
        let (quad, linear, shift) = canonical_terms(&constraint.terms);
        f.add_convex_row(
            format!("c{k}"),
            quad,
            linear,
            constraint.rhs - shift,
            Provenance::disjunct(disjunction, disjunct),
        );
    }
    let opts = SolveOptions { oa_tol: 1e-8, ..SolveOptions::default() };
    matches!(solve_relaxation_with(&f, &opts).status, LpStatus::Optimal)
}
