//! Bound computation for the split transformation.
//!
//! Group bounds are exact range sums of the univariate terms over the box.
//! A [`BoundTable`] lets callers substitute tighter bounds derived outside
//! the box reasoning (problem generators attach such tables); overrides are
//! only validated for `lower <= upper`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::jsonio::flex_f64;
use crate::model::{BoxDomain, SeparableConstraint, UnivariateTerm, VarRef};
use crate::partition::Partition;

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is empty");
        Self { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        v >= self.lo - tol && v <= self.hi + tol
    }
}

/// Bounds for one auxiliary group-sum variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBounds {
    #[serde(with = "flex_f64")]
    pub lower: f64,
    #[serde(with = "flex_f64")]
    pub upper: f64,
}

impl AlphaBounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn is_valid(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && self.lower <= self.upper
    }
}

impl From<Interval> for AlphaBounds {
    fn from(iv: Interval) -> Self {
        AlphaBounds { lower: iv.lo, upper: iv.hi }
    }
}

/// Exact range of a convex univariate term over a finite box.
///
/// Affine terms attain both extremes at endpoints. A convex quadratic attains
/// its maximum at an endpoint and its minimum at the unconstrained minimizer
/// when that lies inside the box, otherwise at the nearer endpoint.
pub fn term_range(term: &UnivariateTerm, dom: &BoxDomain) -> Interval {
    let (l, u) = (dom.lower, dom.upper);
    match *term {
        UnivariateTerm::Affine { weight } => {
            let (a, b) = (weight * l, weight * u);
            Interval::new(a.min(b), a.max(b))
        }
        UnivariateTerm::Quadratic { curvature, linear, shift } => {
            let f = |x: f64| term.value(x);
            let hi = f(l).max(f(u));
            let lo = if curvature > 0.0 {
                let xmin = shift - linear / (2.0 * curvature);
                if xmin > l && xmin < u {
                    f(xmin)
                } else {
                    f(l).min(f(u))
                }
            } else {
                f(l).min(f(u))
            };
            Interval::new(lo, hi)
        }
    }
}

/// Box-derived bounds of `sum_{i in group} h_i(x_i)` for each group of the
/// partition restricted to the constraint's support. Returns
/// `(partition group index, bounds)` pairs; groups disjoint from the support
/// are skipped. Errors if part of the support is not covered.
pub fn alpha_bounds(
    constraint: &SeparableConstraint,
    partition: &Partition,
    boxes: &[BoxDomain],
) -> Result<Vec<(usize, AlphaBounds)>, BoundsError> {
    let support = constraint.support();
    if !partition.covers(&support) {
        return Err(BoundsError::UncoveredSupport);
    }
    let terms: BTreeMap<VarRef, &UnivariateTerm> =
        constraint.terms.iter().map(|(v, t)| (*v, t)).collect();
    let mut out = Vec::new();
    for (s, members) in partition.restrict_to(&support) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for v in &members {
            let dom = boxes.get(v.0).ok_or(BoundsError::MissingDomain { var: v.0 })?;
            let r = term_range(terms[v], dom);
            lo += r.lo;
            hi += r.hi;
        }
        out.push((s, AlphaBounds::new(lo, hi)));
    }
    Ok(out)
}

/// Smallest valid big-M coefficient for a constraint with group upper bound
/// `ub_total` and right-hand side `rhs`: `M = ub_total - rhs`. May be
/// negative, in which case the inactive constraint is still restrictive;
/// builders flag that case.
pub fn bigm_from_alpha(ub_total: f64, rhs: f64) -> f64 {
    ub_total - rhs
}

/// Key of one bound override: `(disjunction, disjunct, partition group)`.
pub type BoundKey = (usize, usize, usize);

/// Externally supplied group bounds overriding the box-derived ones.
///
/// Overrides apply to single-constraint disjuncts; the group index refers to
/// the disjunction-level partition in use when the table was produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundTableJson", into = "BoundTableJson")]
pub struct BoundTable {
    entries: BTreeMap<BoundKey, AlphaBounds>,
}

impl BoundTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: BoundKey, bounds: AlphaBounds) -> Result<(), BoundsError> {
        if !bounds.is_valid() {
            return Err(BoundsError::InvalidOverride { key, lower: bounds.lower, upper: bounds.upper });
        }
        self.entries.insert(key, bounds);
        Ok(())
    }

    pub fn get(&self, key: &BoundKey) -> Option<&AlphaBounds> {
        self.entries.get(key)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BoundKey, &AlphaBounds)> {
        self.entries.iter()
    }
}

#[derive(Serialize, Deserialize)]
struct BoundOverrideJson {
    disjunction: usize,
    disjunct: usize,
    group: usize,
    #[serde(with = "flex_f64")]
    lower: f64,
    #[serde(with = "flex_f64")]
    upper: f64,
}

#[derive(Serialize, Deserialize)]
struct BoundTableJson {
    overrides: Vec<BoundOverrideJson>,
}

impl TryFrom<BoundTableJson> for BoundTable {
    type Error = BoundsError;

    fn try_from(raw: BoundTableJson) -> Result<Self, Self::Error> {
        let mut table = BoundTable::new();
        for o in raw.overrides {
            table.insert((o.disjunction, o.disjunct, o.group), AlphaBounds::new(o.lower, o.upper))?;
        }
        Ok(table)
    }
}

impl From<BoundTable> for BoundTableJson {
    fn from(t: BoundTable) -> Self {
        BoundTableJson {
            overrides: t
                .entries
                .into_iter()
                .map(|((disjunction, disjunct, group), b)| BoundOverrideJson {
                    disjunction,
                    disjunct,
                    group,
                    lower: b.lower,
                    upper: b.upper,
                })
                .collect(),
        }
    }
}

/// Checks the independent-bounds property for one constraint: per-variable
/// term extrema must be simultaneously attainable. Over a box this holds
/// structurally; it only fails when an override for some group of
/// `(disjunction, disjunct)` is strictly tighter than the box-derived sum.
///
/// `partition` and `table` describe the bounds actually in use; pass an empty
/// table when no overrides apply.
pub fn check_independent_bounds(
    constraint: &SeparableConstraint,
    boxes: &[BoxDomain],
    partition: &Partition,
    table: &BoundTable,
    disjunction: usize,
    disjunct: usize,
) -> Result<bool, BoundsError> {
    let derived = alpha_bounds(constraint, partition, boxes)?;
    const REL: f64 = 1e-12;
    for (s, box_bounds) in derived {
        if let Some(o) = table.get(&(disjunction, disjunct, s)) {
            let slack = REL * (1.0 + box_bounds.upper.abs().max(box_bounds.lower.abs()));
            if o.upper < box_bounds.upper - slack || o.lower > box_bounds.lower + slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One dense network layer for interval propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerWeights {
    /// `weights[out][in]`.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LayerWeights {
    pub fn output_dim(&self) -> usize {
        self.weights.len()
    }

    pub fn input_dim(&self) -> usize {
        self.weights.first().map_or(0, |r| r.len())
    }
}

/// Interval matrix-vector propagation through one layer. With `relu`, both
/// ends are clamped at zero.
pub fn propagate_intervals(
    layer: &LayerWeights,
    inputs: &[Interval],
    relu: bool,
) -> Result<Vec<Interval>, BoundsError> {
    if layer.bias.len() != layer.output_dim() {
        return Err(BoundsError::LayerShape {
            expected: layer.output_dim(),
            got: layer.bias.len(),
        });
    }
    let mut out = Vec::with_capacity(layer.output_dim());
    for (row, b) in layer.weights.iter().zip(&layer.bias) {
        if row.len() != inputs.len() {
            return Err(BoundsError::LayerShape { expected: row.len(), got: inputs.len() });
        }
        let mut lo = *b;
        let mut hi = *b;
        for (w, iv) in row.iter().zip(inputs) {
            let (a, c) = (w * iv.lo, w * iv.hi);
            lo += a.min(c);
            hi += a.max(c);
        }
        if relu {
            lo = lo.max(0.0);
            hi = hi.max(0.0);
        }
        out.push(Interval::new(lo, hi));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    UncoveredSupport,
    MissingDomain { var: usize },
    InvalidOverride { key: BoundKey, lower: f64, upper: f64 },
    LayerShape { expected: usize, got: usize },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::UncoveredSupport => {
                write!(f, "partition does not cover the constraint support")
            }
            BoundsError::MissingDomain { var } => write!(f, "no domain for variable x{var}"),
            BoundsError::InvalidOverride { key, lower, upper } => write!(
                f,
                "override for (disjunction {}, disjunct {}, group {}) has lower {lower} > upper {upper}",
                key.0, key.1, key.2
            ),
            BoundsError::LayerShape { expected, got } => {
                write!(f, "layer shape mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for BoundsError {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::even_index_partition;

    fn dom(l: f64, u: f64) -> BoxDomain {
        BoxDomain::new(l, u)
    }

    #[test]
    fn square_over_straddling_box() {
        let r = term_range(&UnivariateTerm::squared_distance(0.0, 1.0), &dom(-1.0, 4.0));
        assert_eq!(r, Interval::new(0.0, 16.0));
    }

    #[test]
    fn shifted_square_over_straddling_box() {
        let r = term_range(&UnivariateTerm::squared_distance(3.0, 1.0), &dom(-1.0, 4.0));
        assert_eq!(r, Interval::new(0.0, 16.0));
    }

    #[test]
    fn affine_range_at_endpoints() {
        let r = term_range(&UnivariateTerm::affine(2.0), &dom(-1.0, 4.0));
        assert_eq!(r, Interval::new(-2.0, 8.0));
        let r = term_range(&UnivariateTerm::affine(-2.0), &dom(-1.0, 4.0));
        assert_eq!(r, Interval::new(-8.0, 2.0));
    }

    #[test]
    fn quadratic_minimizer_outside_box() {
        // (x-3)^2 over [4, 6]: increasing, min at 4.
        let r = term_range(&UnivariateTerm::squared_distance(3.0, 1.0), &dom(4.0, 6.0));
        assert_eq!(r, Interval::new(1.0, 9.0));
    }

    #[test]
    fn group_bounds_sum_term_ranges() {
        // sum 2*x_i over [0,1]^2, one group -> [0, 4].
        let c = SeparableConstraint::new(
            vec![(VarRef(0), UnivariateTerm::affine(2.0)), (VarRef(1), UnivariateTerm::affine(2.0))],
            0.0,
        );
        let p = even_index_partition(&c.support(), 1).unwrap();
        let b = alpha_bounds(&c, &p, &[dom(0.0, 1.0), dom(0.0, 1.0)]).unwrap();
        assert_eq!(b, vec![(0, AlphaBounds::new(0.0, 4.0))]);
    }

    #[test]
    fn bigm_examples() {
        assert_eq!(bigm_from_alpha(49.0, 1.0), 48.0);
        assert_eq!(bigm_from_alpha(5.0, 5.0), 0.0);
        assert_eq!(bigm_from_alpha(10.0, 3.0), 7.0);
    }

    #[test]
    fn override_table_rejects_inverted_bounds() {
        let mut t = BoundTable::new();
        assert!(t.insert((0, 0, 0), AlphaBounds::new(1.0, 0.0)).is_err());
        assert!(t.insert((0, 0, 0), AlphaBounds::new(0.0, 1.0)).is_ok());
    }

    #[test]
    fn independence_holds_without_overrides() {
        let c = SeparableConstraint::new(
            vec![(VarRef(0), UnivariateTerm::affine(1.0)), (VarRef(1), UnivariateTerm::affine(-2.0))],
            0.0,
        );
        let p = even_index_partition(&c.support(), 2).unwrap();
        let ok = check_independent_bounds(
            &c,
            &[dom(0.0, 1.0), dom(0.0, 1.0)],
            &p,
            &BoundTable::new(),
            0,
            0,
        )
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn tighter_override_breaks_independence() {
        // sum x_i^2 over [-1,4]^4, 2 groups: box-derived upper is 32 per
        // group; the (sqrt(18)+1)^2 ~ 27.49 override is strictly tighter.
        let c = SeparableConstraint::new(
            (0..4).map(|i| (VarRef(i), UnivariateTerm::squared_distance(0.0, 1.0))).collect(),
            1.0,
        );
        let p = even_index_partition(&c.support(), 2).unwrap();
        let boxes = vec![dom(-1.0, 4.0); 4];
        let mut t = BoundTable::new();
        let tight = (18.0f64.sqrt() + 1.0).powi(2);
        t.insert((0, 0, 0), AlphaBounds::new(0.0, tight)).unwrap();
        t.insert((0, 0, 1), AlphaBounds::new(0.0, tight)).unwrap();
        assert!(!check_independent_bounds(&c, &boxes, &p, &t, 0, 0).unwrap());
        // A slack override (at least as wide as box-derived) keeps independence.
        let mut loose = BoundTable::new();
        loose.insert((0, 0, 0), AlphaBounds::new(-1.0, 40.0)).unwrap();
        assert!(check_independent_bounds(&c, &boxes, &p, &loose, 0, 0).unwrap());
    }

    #[test]
    fn interval_propagation_matches_hand_results() {
        // weights [[1, -1]], bias [0], inputs [0,1]^2, relu -> [0, 1].
        let layer = LayerWeights { weights: vec![vec![1.0, -1.0]], bias: vec![0.0] };
        let out =
            propagate_intervals(&layer, &[Interval::new(0.0, 1.0), Interval::new(0.0, 1.0)], true)
                .unwrap();
        assert_eq!(out, vec![Interval::new(0.0, 1.0)]);

        // zero weights, bias 2, relu -> [2, 2].
        let layer = LayerWeights { weights: vec![vec![0.0]], bias: vec![2.0] };
        let out = propagate_intervals(&layer, &[Interval::new(-1.0, 1.0)], true).unwrap();
        assert_eq!(out, vec![Interval::new(2.0, 2.0)]);

        // weights [[2],[-3]], bias [1,0], input [-1,1], no relu.
        let layer = LayerWeights { weights: vec![vec![2.0], vec![-3.0]], bias: vec![1.0, 0.0] };
        let out = propagate_intervals(&layer, &[Interval::new(-1.0, 1.0)], false).unwrap();
        assert_eq!(out, vec![Interval::new(-1.0, 3.0), Interval::new(-3.0, 3.0)]);
    }

    #[test]
    fn propagation_rejects_shape_mismatch() {
        let layer = LayerWeights { weights: vec![vec![1.0, 2.0]], bias: vec![0.0] };
        assert!(propagate_intervals(&layer, &[Interval::new(0.0, 1.0)], false).is_err());
    }
}
