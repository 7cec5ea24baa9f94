//! Formulation builders: big-M, extended split, non-extended two-term split,
//! and the extended convex hull for affine disjunctions.
//!
//! All builders are pure functions from an immutable model (plus partitions
//! and optional bound overrides) to a fresh [`FlatMip`]. Original variables
//! occupy flat indices `0..n` in model order; auxiliary variables follow per
//! disjunction.

use std::fmt;

use crate::bounds::{bigm_from_alpha, term_range, AlphaBounds, BoundTable, BoundsError};
use crate::flatmip::{BuildWarning, FlatMip, MipVar, Provenance, VarKind, VarTag};
use crate::model::{
    DisjunctiveModel, ModelError, SeparableConstraint, Sense, UnivariateTerm, VarRef,
};
use crate::partition::{even_index_partition, Partition, PartitionError};

/// Options of the non-extended two-term builder.
#[derive(Debug, Clone, Copy)]
pub struct NonExtendedOptions {
    /// Emit the full-set row in addition to the proper subsets. The full-set
    /// row is the weakest member of the family; dropping it leaves a valid
    /// formulation with one row less per disjunct constraint.
    pub include_full_set: bool,
}

impl Default for NonExtendedOptions {
    fn default() -> Self {
        Self { include_full_set: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReformulateError {
    Model(ModelError),
    Partition(PartitionError),
    Bounds(BoundsError),
    PartitionCount { expected: usize, got: usize },
    PartitionTooLarge { disjunction: usize, support: usize, p: usize },
    UncoveredSupport { disjunction: usize, disjunct: usize, constraint: usize },
    NotTwoTerm { disjunction: usize, count: usize },
    NonAffineDisjunct { disjunction: usize, disjunct: usize, constraint: usize },
    TooManySubsets { disjunction: usize, groups: usize },
}

impl fmt::Display for ReformulateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReformulateError::Model(e) => write!(f, "{e}"),
            ReformulateError::Partition(e) => write!(f, "{e}"),
            ReformulateError::Bounds(e) => write!(f, "{e}"),
            ReformulateError::PartitionCount { expected, got } => {
                write!(f, "expected {expected} partitions (one per disjunction), got {got}")
            }
            ReformulateError::PartitionTooLarge { disjunction, support, p } => write!(
                f,
                "disjunction {disjunction} has {support} variables; cannot split into {p} groups"
            ),
            ReformulateError::UncoveredSupport { disjunction, disjunct, constraint } => write!(
                f,
                "partition misses variables of constraint {constraint} in disjunct {disjunct} of disjunction {disjunction}"
            ),
            ReformulateError::NotTwoTerm { disjunction, count } => write!(
                f,
                "non-extended split needs exactly two disjuncts, disjunction {disjunction} has {count}"
            ),
            ReformulateError::NonAffineDisjunct { disjunction, disjunct, constraint } => write!(
                f,
                "hull formulation requires affine terms; constraint {constraint} of disjunct {disjunct} in disjunction {disjunction} is quadratic"
            ),
            ReformulateError::TooManySubsets { disjunction, groups } => write!(
                f,
                "non-extended split of disjunction {disjunction} with {groups} groups would emit 2^{groups} rows"
            ),
        }
    }
}

impl std::error::Error for ReformulateError {}

impl From<ModelError> for ReformulateError {
    fn from(e: ModelError) -> Self {
        ReformulateError::Model(e)
    }
}

impl From<PartitionError> for ReformulateError {
    fn from(e: PartitionError) -> Self {
        ReformulateError::Partition(e)
    }
}

impl From<BoundsError> for ReformulateError {
    fn from(e: BoundsError) -> Self {
        ReformulateError::Bounds(e)
    }
}

/// One even index partition per disjunction, over the sorted union of the
/// disjunction's constraint supports.
pub fn even_partitions(model: &DisjunctiveModel, p: usize) -> Result<Vec<Partition>, ReformulateError> {
    model
        .disjunctions
        .iter()
        .enumerate()
        .map(|(d, disjunction)| {
            let support = disjunction.support();
            if p > support.len() {
                return Err(ReformulateError::PartitionTooLarge { disjunction: d, support: support.len(), p });
            }
            even_index_partition(&support, p).map_err(ReformulateError::from)
        })
        .collect()
}

/// Partitions with one singleton group per variable (the full split).
pub fn singleton_partitions(model: &DisjunctiveModel) -> Result<Vec<Partition>, ReformulateError> {
    model
        .disjunctions
        .iter()
        .map(|disjunction| {
            let support = disjunction.support();
            even_index_partition(&support, support.len()).map_err(ReformulateError::from)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// shared scaffolding

fn base_flatmip(model: &DisjunctiveModel, name: &str) -> FlatMip {
    let mut f = FlatMip { name: name.to_string(), ..FlatMip::default() };
    for (i, b) in model.variables.iter().enumerate() {
        f.add_var(MipVar {
            name: format!("x{i}"),
            lower: b.lower,
            upper: b.upper,
            kind: VarKind::Continuous,
            tag: VarTag::X(i),
        });
    }
    f.objective[..model.objective.coeffs.len()].copy_from_slice(&model.objective.coeffs);
    f.objective_constant = model.objective.constant;
    for (r, row) in model.global_linear.iter().enumerate() {
        let coeffs = row.coeffs.iter().map(|(v, c)| (v.0, *c)).collect();
        f.add_linear_row(format!("g{r}"), coeffs, row.sense, row.rhs, Provenance::default());
    }
    f
}

fn add_lambdas(f: &mut FlatMip, d: usize, count: usize) -> Vec<usize> {
    let lambdas: Vec<usize> = (0..count)
        .map(|l| {
            f.add_var(MipVar {
                name: format!("lam{d}_{l}"),
                lower: 0.0,
                upper: 1.0,
                kind: VarKind::Binary,
                tag: VarTag::Lambda { disjunction: d, disjunct: l },
            })
        })
        .collect();
    let coeffs = lambdas.iter().map(|&j| (j, 1.0)).collect();
    f.add_linear_row(format!("choose{d}"), coeffs, Sense::Eq, 1.0, Provenance::disjunction(d));
    lambdas
}

fn add_lambda_couplings(
    f: &mut FlatMip,
    model: &DisjunctiveModel,
    lambda_index: &[Vec<usize>],
) {
    for (r, coupling) in model.lambda_couplings.iter().enumerate() {
        let coeffs = coupling
            .coeffs
            .iter()
            .map(|&(dj, dl, c)| (lambda_index[dj][dl], c))
            .collect();
        f.add_linear_row(format!("couple{r}"), coeffs, coupling.sense, coupling.rhs, Provenance::default());
    }
}

/// Splits the separable terms into canonical diagonal-quadratic plus linear
/// parts; the constant from shifted quadratics moves to the right-hand side.
/// Returns `(quad, linear, rhs_shift)` such that
/// `sum h_i(x_i) = sum quad x^2 + sum linear x + rhs_shift`.
pub(crate) fn canonical_terms(
    terms: &[(VarRef, UnivariateTerm)],
) -> (Vec<(usize, f64)>, Vec<(usize, f64)>, f64) {
    let mut quad = Vec::new();
    let mut linear = Vec::new();
    let mut constant = 0.0;
    for (v, t) in terms {
        match *t {
            UnivariateTerm::Affine { weight } => linear.push((v.0, weight)),
            UnivariateTerm::Quadratic { curvature, linear: q, shift } => {
                if curvature != 0.0 {
                    quad.push((v.0, curvature));
                    linear.push((v.0, q - 2.0 * curvature * shift));
                    constant += curvature * shift * shift;
                } else {
                    linear.push((v.0, q));
                }
            }
        }
    }
    (quad, linear, constant)
}

/// Adds `sum h_i(x_i) + extra <= rhs` as a convex (or purely linear) row.
fn push_separable_row(
    f: &mut FlatMip,
    name: String,
    terms: &[(VarRef, UnivariateTerm)],
    extra_linear: &[(usize, f64)],
    rhs: f64,
    provenance: Provenance,
) {
    let (quad, mut linear, constant) = canonical_terms(terms);
    linear.extend_from_slice(extra_linear);
    f.add_convex_row(name, quad, linear, rhs - constant, provenance);
}

/// Per-group data of one split constraint.
struct SplitGroup {
    /// Group index in the disjunction-level partition.
    group: usize,
    members: Vec<VarRef>,
    bounds: AlphaBounds,
}

/// Restricts the partition to the constraint support and attaches bounds:
/// the exact box-derived range sum, unless an override for
/// `(disjunction, disjunct, group)` exists and the disjunct has a single
/// constraint.
fn split_groups(
    model: &DisjunctiveModel,
    table: &BoundTable,
    d: usize,
    l: usize,
    k: usize,
    single_constraint: bool,
    constraint: &SeparableConstraint,
    partition: &Partition,
) -> Result<Vec<SplitGroup>, ReformulateError> {
    let support = constraint.support();
    if !partition.covers(&support) {
        return Err(ReformulateError::UncoveredSupport { disjunction: d, disjunct: l, constraint: k });
    }
    let term_of: std::collections::BTreeMap<VarRef, &UnivariateTerm> =
        constraint.terms.iter().map(|(v, t)| (*v, t)).collect();
    let mut out = Vec::new();
    for (s, members) in partition.restrict_to(&support) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for v in &members {
            let r = term_range(term_of[v], &model.variables[v.0]);
            lo += r.lo;
            hi += r.hi;
        }
        let mut bounds = AlphaBounds::new(lo, hi);
        if single_constraint {
            if let Some(o) = table.get(&(d, l, s)) {
                bounds = *o;
            }
        }
        out.push(SplitGroup { group: s, members, bounds });
    }
    Ok(out)
}

fn constraint_terms<'a>(
    constraint: &'a SeparableConstraint,
    members: &[VarRef],
) -> Vec<(VarRef, UnivariateTerm)> {
    let set: std::collections::BTreeSet<VarRef> = members.iter().copied().collect();
    constraint.terms.iter().filter(|(v, _)| set.contains(v)).cloned().collect()
}

/// Suffix distinguishing constraints of a multi-constraint disjunct.
fn cname(l: usize, k: usize, multi: bool) -> String {
    if multi {
        format!("{l}c{k}")
    } else {
        format!("{l}")
    }
}

// ---------------------------------------------------------------------------
// big-M

/// Big-M formulation: one binary per disjunct and, per disjunct constraint,
/// `sum h(x) <= b + M (1 - lambda)` with the smallest valid
/// `M = upper_bound(sum h) - b`. Bound table entries for group 0 of a
/// single-constraint disjunct override the box-derived full sum.
pub fn build_bigm(model: &DisjunctiveModel, table: &BoundTable) -> Result<FlatMip, ReformulateError> {
    model.check_structure()?;
    let mut f = base_flatmip(model, "bigm");
    let mut lambda_index = Vec::new();
    for (d, disjunction) in model.disjunctions.iter().enumerate() {
        let lambdas = add_lambdas(&mut f, d, disjunction.disjuncts.len());
        for (l, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let single = disjunct.constraints.len() == 1;
            let multi = !single;
            for (k, constraint) in disjunct.constraints.iter().enumerate() {
                let support = constraint.support();
                let whole = even_index_partition(&support, 1)?;
                let groups = split_groups(model, table, d, l, k, single, constraint, &whole)?;
                let upper = groups[0].bounds.upper;
                let m = bigm_from_alpha(upper, constraint.rhs);
                if m < 0.0 {
                    f.warnings.push(BuildWarning::NegativeBigM { disjunction: d, disjunct: l, constraint: k, m });
                }
                // sum h(x) + M*lambda_l <= b + M
                push_separable_row(
                    &mut f,
                    format!("m{d}_{}", cname(l, k, multi)),
                    &constraint.terms,
                    &[(lambdas[l], m)],
                    constraint.rhs + m,
                    Provenance::disjunct(d, l),
                );
            }
        }
        lambda_index.push(lambdas);
    }
    add_lambda_couplings(&mut f, model, &lambda_index);
    Ok(f)
}

// ---------------------------------------------------------------------------
// extended split formulation

/// Extended split formulation: each disjunct constraint is split along the
/// disjunction's partition into group sums bounded by auxiliary variables,
/// and the hull of the resulting low-dimensional disjunction is built with
/// disaggregated copies.
pub fn build_psplit_extended(
    model: &DisjunctiveModel,
    partitions: &[Partition],
    table: &BoundTable,
) -> Result<FlatMip, ReformulateError> {
    model.check_structure()?;
    if partitions.len() != model.disjunctions.len() {
        return Err(ReformulateError::PartitionCount {
            expected: model.disjunctions.len(),
            got: partitions.len(),
        });
    }
    let mut f = base_flatmip(model, "psplit_ext");
    let mut lambda_index = Vec::new();
    for (d, (disjunction, partition)) in model.disjunctions.iter().zip(partitions).enumerate() {
        let nd = disjunction.disjuncts.len();
        let lambdas = add_lambdas(&mut f, d, nd);
        for (l, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let single = disjunct.constraints.len() == 1;
            let multi = !single;
            for (k, constraint) in disjunct.constraints.iter().enumerate() {
                let groups = split_groups(model, table, d, l, k, single, constraint, partition)?;
                let mut own_sum: Vec<(usize, f64)> = Vec::with_capacity(groups.len() + 1);
                for g in &groups {
                    let s = g.group;
                    let (lo, hi) = (g.bounds.lower, g.bounds.upper);
                    let alpha = f.add_var(MipVar {
                        name: format!("a{d}_{}_{s}", cname(l, k, multi)),
                        lower: lo,
                        upper: hi,
                        kind: VarKind::Continuous,
                        tag: VarTag::Alpha { disjunction: d, disjunct: l, constraint: k, group: s },
                    });
                    // alpha = sum_d nu, with nu in [lo*lam_d, hi*lam_d].
                    let mut agg = vec![(alpha, 1.0)];
                    for dd in 0..nd {
                        let nu = f.add_var(MipVar {
                            name: format!("nu{d}_{}_{s}_{dd}", cname(l, k, multi)),
                            lower: lo.min(0.0),
                            upper: hi.max(0.0),
                            kind: VarKind::Continuous,
                            tag: VarTag::Nu { disjunction: d, disjunct: l, constraint: k, group: s, copy_for: dd },
                        });
                        agg.push((nu, -1.0));
                        f.add_linear_row(
                            format!("nuub{d}_{}_{s}_{dd}", cname(l, k, multi)),
                            vec![(nu, 1.0), (lambdas[dd], -hi)],
                            Sense::Le,
                            0.0,
                            Provenance::group(d, l, s),
                        );
                        f.add_linear_row(
                            format!("nulb{d}_{}_{s}_{dd}", cname(l, k, multi)),
                            vec![(lambdas[dd], lo), (nu, -1.0)],
                            Sense::Le,
                            0.0,
                            Provenance::group(d, l, s),
                        );
                        if dd == l {
                            own_sum.push((nu, 1.0));
                        }
                    }
                    f.add_linear_row(
                        format!("agg{d}_{}_{s}", cname(l, k, multi)),
                        agg,
                        Sense::Eq,
                        0.0,
                        Provenance::group(d, l, s),
                    );
                    // Global split row: sum_{i in I_s} h_i(x_i) <= alpha.
                    push_separable_row(
                        &mut f,
                        format!("split{d}_{}_{s}", cname(l, k, multi)),
                        &constraint_terms(constraint, &g.members),
                        &[(alpha, -1.0)],
                        0.0,
                        Provenance::group(d, l, s),
                    );
                }
                // sum_s nu^{l,s}_l <= b_k * lambda_l
                own_sum.push((lambdas[l], -constraint.rhs));
                f.add_linear_row(
                    format!("own{d}_{}", cname(l, k, multi)),
                    own_sum,
                    Sense::Le,
                    0.0,
                    Provenance::disjunct(d, l),
                );
            }
        }
        lambda_index.push(lambdas);
    }
    add_lambda_couplings(&mut f, model, &lambda_index);
    Ok(f)
}

// ---------------------------------------------------------------------------
// non-extended split formulation (two-term)

/// Non-extended realization of the split formulation for two-term
/// disjunctions: per disjunct constraint and nonempty group subset `S_p`,
/// `sum_{s in S_p} groupsum_s <= (b - sum_{s not in S_p} lower_s) * lam_own
///  + (sum_{s in S_p} upper_s) * lam_other`. No auxiliary variables.
pub fn build_psplit_nonextended(
    model: &DisjunctiveModel,
    partitions: &[Partition],
    table: &BoundTable,
    options: NonExtendedOptions,
) -> Result<FlatMip, ReformulateError> {
    model.check_structure()?;
    if partitions.len() != model.disjunctions.len() {
        return Err(ReformulateError::PartitionCount {
            expected: model.disjunctions.len(),
            got: partitions.len(),
        });
    }
    for (d, disjunction) in model.disjunctions.iter().enumerate() {
        if disjunction.disjuncts.len() != 2 {
            return Err(ReformulateError::NotTwoTerm { disjunction: d, count: disjunction.disjuncts.len() });
        }
    }
    let mut f = base_flatmip(model, "psplit_nonext");
    let mut lambda_index = Vec::new();
    for (d, (disjunction, partition)) in model.disjunctions.iter().zip(partitions).enumerate() {
        let lambdas = add_lambdas(&mut f, d, 2);
        for (l, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let other = 1 - l;
            let single = disjunct.constraints.len() == 1;
            let multi = !single;
            for (k, constraint) in disjunct.constraints.iter().enumerate() {
                let groups = split_groups(model, table, d, l, k, single, constraint, partition)?;
                let q = groups.len();
                if q > 20 {
                    return Err(ReformulateError::TooManySubsets { disjunction: d, groups: q });
                }
                let full: u32 = (1u32 << q) - 1;
                let lower_total: f64 = groups.iter().map(|g| g.bounds.lower).sum();
                for mask in 1..=full {
                    if mask == full && !options.include_full_set && q > 1 {
                        continue;
                    }
                    let mut terms: Vec<(VarRef, UnivariateTerm)> = Vec::new();
                    let mut upper_sel = 0.0;
                    let mut lower_sel = 0.0;
                    for (gi, g) in groups.iter().enumerate() {
                        if mask & (1 << gi) != 0 {
                            terms.extend(constraint_terms(constraint, &g.members));
                            upper_sel += g.bounds.upper;
                            lower_sel += g.bounds.lower;
                        }
                    }
                    // sum_{S_p} h(x) - (b - sum_{S\S_p} lo) lam_own - (sum_{S_p} hi) lam_other <= 0
                    let own_coef = constraint.rhs - (lower_total - lower_sel);
                    push_separable_row(
                        &mut f,
                        format!("sub{d}_{}_{mask}", cname(l, k, multi)),
                        &terms,
                        &[(lambdas[l], -own_coef), (lambdas[other], -upper_sel)],
                        0.0,
                        Provenance::disjunct(d, l),
                    );
                }
            }
        }
        lambda_index.push(lambdas);
    }
    add_lambda_couplings(&mut f, model, &lambda_index);
    Ok(f)
}

// ---------------------------------------------------------------------------
// extended hull formulation (affine disjuncts)

/// Classic extended hull formulation with disaggregated variable copies, for
/// disjunctions whose constraints are all affine. Copies are created for the
/// union of the disjunction's constraint supports.
pub fn build_hull_extended(model: &DisjunctiveModel) -> Result<FlatMip, ReformulateError> {
    model.check_structure()?;
    let mut f = base_flatmip(model, "hull_ext");
    let mut lambda_index = Vec::new();
    for (d, disjunction) in model.disjunctions.iter().enumerate() {
        for (l, disjunct) in disjunction.disjuncts.iter().enumerate() {
            for (k, constraint) in disjunct.constraints.iter().enumerate() {
                if constraint.terms.iter().any(|(_, t)| !t.is_affine_like()) {
                    return Err(ReformulateError::NonAffineDisjunct { disjunction: d, disjunct: l, constraint: k });
                }
            }
        }
        let support = disjunction.support();
        let nd = disjunction.disjuncts.len();
        let lambdas = add_lambdas(&mut f, d, nd);
        // copies[dd][t] for t indexing `support`
        let mut copies: Vec<Vec<usize>> = Vec::with_capacity(nd);
        for dd in 0..nd {
            let mut row = Vec::with_capacity(support.len());
            for v in &support {
                let (lb, ub) = (model.variables[v.0].lower, model.variables[v.0].upper);
                let nu = f.add_var(MipVar {
                    name: format!("nu{d}_{dd}_x{}", v.0),
                    lower: lb.min(0.0),
                    upper: ub.max(0.0),
                    kind: VarKind::Continuous,
                    tag: VarTag::HullCopy { disjunction: d, disjunct: dd, var: v.0 },
                });
                f.add_linear_row(
                    format!("cub{d}_{dd}_x{}", v.0),
                    vec![(nu, 1.0), (lambdas[dd], -ub)],
                    Sense::Le,
                    0.0,
                    Provenance::disjunct(d, dd),
                );
                f.add_linear_row(
                    format!("clb{d}_{dd}_x{}", v.0),
                    vec![(lambdas[dd], lb), (nu, -1.0)],
                    Sense::Le,
                    0.0,
                    Provenance::disjunct(d, dd),
                );
                row.push(nu);
            }
            copies.push(row);
        }
        for (t, v) in support.iter().enumerate() {
            let mut link = vec![(v.0, 1.0)];
            link.extend(copies.iter().map(|c| (c[t], -1.0)));
            f.add_linear_row(format!("link{d}_x{}", v.0), link, Sense::Eq, 0.0, Provenance::disjunction(d));
        }
        for (l, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let multi = disjunct.constraints.len() > 1;
            for (k, constraint) in disjunct.constraints.iter().enumerate() {
                let mut coeffs: Vec<(usize, f64)> = Vec::with_capacity(constraint.terms.len() + 1);
                for (v, t) in &constraint.terms {
                    let w = match *t {
                        UnivariateTerm::Affine { weight } => weight,
                        UnivariateTerm::Quadratic { linear, .. } => linear,
                    };
                    let slot = support.iter().position(|s| s == v).expect("support contains term var");
                    coeffs.push((copies[l][slot], w));
                }
                coeffs.push((lambdas[l], -constraint.rhs));
                f.add_linear_row(
                    format!("hull{d}_{}", cname(l, k, multi)),
                    coeffs,
                    Sense::Le,
                    0.0,
                    Provenance::disjunct(d, l),
                );
            }
        }
        lambda_index.push(lambdas);
    }
    add_lambda_couplings(&mut f, model, &lambda_index);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatmip::formulation_stats;
    use crate::model::{BoxDomain, Disjunct, Disjunction, LinearObjective};

    /// `x <= 0 \/ x >= 1` on `[-1, 2]`, second side written as `-x <= -1`.
    fn affine_interval_model() -> DisjunctiveModel {
        DisjunctiveModel {
            variables: vec![BoxDomain::new(-1.0, 2.0)],
            objective: LinearObjective::new(vec![1.0], 0.0),
            global_linear: vec![],
            disjunctions: vec![Disjunction::new(vec![
                Disjunct::new(vec![SeparableConstraint::new(vec![(VarRef(0), UnivariateTerm::affine(1.0))], 0.0)]),
                Disjunct::new(vec![SeparableConstraint::new(vec![(VarRef(0), UnivariateTerm::affine(-1.0))], -1.0)]),
            ])],
            lambda_couplings: vec![],
        }
    }

    fn two_var_affine_model() -> DisjunctiveModel {
        // x1 + x2 <= 0 \/ x1 + x2 >= 2 on [0,2]^2 (second as -x1 - x2 <= -2).
        DisjunctiveModel {
            variables: vec![BoxDomain::new(0.0, 2.0), BoxDomain::new(0.0, 2.0)],
            objective: LinearObjective::new(vec![1.0, 1.0], 0.0),
            global_linear: vec![],
            disjunctions: vec![Disjunction::new(vec![
                Disjunct::new(vec![SeparableConstraint::new(
                    vec![(VarRef(0), UnivariateTerm::affine(1.0)), (VarRef(1), UnivariateTerm::affine(1.0))],
                    0.0,
                )]),
                Disjunct::new(vec![SeparableConstraint::new(
                    vec![(VarRef(0), UnivariateTerm::affine(-1.0)), (VarRef(1), UnivariateTerm::affine(-1.0))],
                    -2.0,
                )]),
            ])],
            lambda_couplings: vec![],
        }
    }

    #[test]
    fn bigm_coefficients_for_affine_interval() {
        let f = build_bigm(&affine_interval_model(), &BoundTable::new()).unwrap();
        // M1 = max(x) - 0 = 2; M2 = max(-x) - (-1) = 1 + 1 = 2.
        let m_rows: Vec<&crate::flatmip::LinRow> =
            f.linear_rows.iter().filter(|r| r.name.starts_with('m')).collect();
        assert_eq!(m_rows.len(), 2);
        // Row form: h(x) + M lam <= b + M.
        assert_eq!(m_rows[0].rhs, 2.0);
        assert_eq!(m_rows[1].rhs, 1.0);
        assert!(f.warnings.is_empty());
    }

    #[test]
    fn bigm_rejects_single_disjunct() {
        let mut m = affine_interval_model();
        m.disjunctions[0].disjuncts.truncate(1);
        assert!(matches!(
            build_bigm(&m, &BoundTable::new()),
            Err(ReformulateError::Model(ModelError::TooFewDisjuncts { .. }))
        ));
    }

    #[test]
    fn extended_split_structure_counts() {
        let m = two_var_affine_model();
        let parts = even_partitions(&m, 2).unwrap();
        let f = build_psplit_extended(&m, &parts, &BoundTable::new()).unwrap();
        let stats = formulation_stats(&f);
        assert_eq!(stats.alpha_vars, 4);
        assert_eq!(stats.nu_vars, 8);
        assert_eq!(stats.binary_vars, 2);
        assert_eq!(stats.added_continuous(), 12);
        // Structural rows: 4 split, 4 aggregation, 2 own-sum, 16 nu bounds, 1 convexity.
        let count = |prefix: &str| f.linear_rows.iter().filter(|r| r.name.starts_with(prefix)).count();
        assert_eq!(count("split"), 4);
        assert_eq!(count("agg"), 4);
        assert_eq!(count("own"), 2);
        assert_eq!(count("nuub") + count("nulb"), 16);
        assert_eq!(count("choose"), 1);
        f.check_consistency().unwrap();
    }

    #[test]
    fn nonextended_emits_subset_rows() {
        let m = two_var_affine_model();
        let parts = even_partitions(&m, 2).unwrap();
        let f =
            build_psplit_nonextended(&m, &parts, &BoundTable::new(), NonExtendedOptions::default())
                .unwrap();
        // Per disjunct: 2^2 - 1 = 3 subset rows; two disjuncts -> 6.
        let subs = f.linear_rows.iter().filter(|r| r.name.starts_with("sub")).count();
        assert_eq!(subs, 6);
        let strict = build_psplit_nonextended(
            &m,
            &parts,
            &BoundTable::new(),
            NonExtendedOptions { include_full_set: false },
        )
        .unwrap();
        assert_eq!(strict.linear_rows.iter().filter(|r| r.name.starts_with("sub")).count(), 4);
    }

    #[test]
    fn nonextended_rejects_three_terms() {
        let mut m = affine_interval_model();
        m.disjunctions[0]
            .disjuncts
            .push(Disjunct::new(vec![SeparableConstraint::new(vec![(VarRef(0), UnivariateTerm::affine(1.0))], 5.0)]));
        let parts = even_partitions(&m, 1).unwrap();
        assert!(matches!(
            build_psplit_nonextended(&m, &parts, &BoundTable::new(), NonExtendedOptions::default()),
            Err(ReformulateError::NotTwoTerm { .. })
        ));
    }

    #[test]
    fn hull_rejects_quadratic_terms() {
        let m = DisjunctiveModel {
            variables: vec![BoxDomain::new(-1.0, 4.0)],
            objective: LinearObjective::zeros(1),
            global_linear: vec![],
            disjunctions: vec![Disjunction::new(vec![
                Disjunct::new(vec![SeparableConstraint::new(
                    vec![(VarRef(0), UnivariateTerm::squared_distance(0.0, 1.0))],
                    1.0,
                )]),
                Disjunct::new(vec![SeparableConstraint::new(
                    vec![(VarRef(0), UnivariateTerm::squared_distance(3.0, 1.0))],
                    1.0,
                )]),
            ])],
            lambda_couplings: vec![],
        };
        assert!(matches!(build_hull_extended(&m), Err(ReformulateError::NonAffineDisjunct { .. })));
    }

    #[test]
    fn hull_copy_counts() {
        let m = two_var_affine_model();
        let f = build_hull_extended(&m).unwrap();
        let stats = formulation_stats(&f);
        assert_eq!(stats.nu_vars, 4); // |D| * n = 2 * 2
        assert_eq!(stats.binary_vars, 2);
        f.check_consistency().unwrap();
    }

    #[test]
    fn even_partitions_reject_oversized_p() {
        let m = two_var_affine_model();
        assert!(matches!(
            even_partitions(&m, 3),
            Err(ReformulateError::PartitionTooLarge { .. })
        ));
    }
}
