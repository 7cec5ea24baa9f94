//! Benchmark problem generators.
//!
//! Three families with disjunctive structure (center-based clustering,
//! point-to-ball assignment, ReLU network minimization) plus the
//! two-ball illustrative disjunction, each with its analytic bound recipe
//! for the split auxiliaries. Generators are pure given a seed.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{propagate_intervals, AlphaBounds, BoundTable, Interval, LayerWeights};
use crate::model::{
    BoxDomain, Disjunct, Disjunction, DisjunctiveModel, LambdaCoupling, LinearObjective,
    LinearRow, SeparableConstraint, Sense, UnivariateTerm, VarRef,
};
use crate::partition::Partition;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    TooFewPoints { points: usize, clusters: usize },
    TooManyPoints { points: usize, balls: usize },
    MixedDimensions,
    EmptyInstance,
    LayerMismatch { layer: usize, expected: usize, got: usize },
    NotScalarOutput { got: usize },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::TooFewPoints { points, clusters } => {
                write!(f, "{points} data point(s) cannot support {clusters} clusters (need L >= k >= 2)")
            }
            ProblemError::TooManyPoints { points, balls } => {
                write!(f, "{points} points cannot be assigned one-per-ball to {balls} ball(s)")
            }
            ProblemError::MixedDimensions => write!(f, "points have differing dimensions"),
            ProblemError::EmptyInstance => write!(f, "instance has no data"),
            ProblemError::LayerMismatch { layer, expected, got } => {
                write!(f, "layer {layer} expects {expected} inputs, previous layer provides {got}")
            }
            ProblemError::NotScalarOutput { got } => {
                write!(f, "final layer must have one output, got {got}")
            }
        }
    }
}

impl std::error::Error for ProblemError {}

// ---------------------------------------------------------------------------
// illustrative two-ball disjunction

/// The two-ball disjunction `[sum x_i^2 <= 1] \/ [sum (3 - x_i)^2 <= 1]`
/// over `[-1, 4]^4`, minimizing `sum x_i` by default.
pub fn gen_example1() -> DisjunctiveModel {
    let n = 4;
    DisjunctiveModel {
        variables: vec![BoxDomain::new(-1.0, 4.0); n],
        objective: LinearObjective::new(vec![1.0; n], 0.0),
        global_linear: vec![],
        disjunctions: vec![Disjunction::new(vec![
            Disjunct::new(vec![SeparableConstraint::new(
                (0..n).map(|i| (VarRef(i), UnivariateTerm::squared_distance(0.0, 1.0))).collect(),
                1.0,
            )]),
            Disjunct::new(vec![SeparableConstraint::new(
                (0..n).map(|i| (VarRef(i), UnivariateTerm::squared_distance(3.0, 1.0))).collect(),
                1.0,
            )]),
        ])],
        lambda_couplings: vec![],
    }
}

/// Analytic group bounds for [`gen_example1`]: lower 0 and upper
/// `(sqrt(9 |I_s|) + 1)^2` for every disjunct and group, valid because any
/// feasible point satisfies one of the two unit-ball constraints.
pub fn example1_bound_table(partitions: &[Partition]) -> BoundTable {
    let mut table = BoundTable::new();
    if let Some(p) = partitions.first() {
        for (s, group) in p.groups().iter().enumerate() {
            let upper = ((9.0 * group.len() as f64).sqrt() + 1.0).powi(2);
            for l in 0..2 {
                table.insert((0, l, s), AlphaBounds::new(0.0, upper)).expect("valid bounds");
            }
        }
    }
    table
}

// ---------------------------------------------------------------------------
// clustering

/// Center-based clustering instance: assign each of `L` points to one of `k`
/// cluster centers, minimizing the total squared distance to the chosen
/// center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterInstance {
    pub points: Vec<Vec<f64>>,
    pub clusters: usize,
}

impl ClusterInstance {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    fn check(&self) -> Result<(), ProblemError> {
        if self.points.is_empty() {
            return Err(ProblemError::EmptyInstance);
        }
        if self.points.len() < self.clusters || self.clusters < 2 {
            return Err(ProblemError::TooFewPoints { points: self.points.len(), clusters: self.clusters });
        }
        let n = self.dim();
        if self.points.iter().any(|p| p.len() != n) {
            return Err(ProblemError::MixedDimensions);
        }
        Ok(())
    }

    /// Largest squared distance between two data points, restricted to the
    /// coordinates in `coords` (all coordinates when `None`).
    fn max_pair_sq(&self, coords: Option<&[usize]>) -> f64 {
        let mut best = 0.0f64;
        for (a, p) in self.points.iter().enumerate() {
            for q in &self.points[a + 1..] {
                let d: f64 = match coords {
                    Some(ts) => ts.iter().map(|&t| (p[t] - q[t]) * (p[t] - q[t])).sum(),
                    None => p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum(),
                };
                best = best.max(d);
            }
        }
        best
    }
}

/// Variable layout of a clustering model: centers first, radii after.
pub fn kmeans_center_var(inst: &ClusterInstance, cluster: usize, coord: usize) -> usize {
    cluster * inst.dim() + coord
}

pub fn kmeans_radius_var(inst: &ClusterInstance, point: usize) -> usize {
    inst.clusters * inst.dim() + point
}

/// Clustering model: variables are `k * n` center coordinates plus one
/// radius per point; point `i` contributes a disjunction over the `k`
/// disjuncts `||x^j - d^i||^2 - r_i <= 0`, and the objective is `sum r_i`.
/// Center boxes are the data bounding box; radii live in
/// `[0, max pairwise squared distance]`.
pub fn gen_kmeans(inst: &ClusterInstance) -> Result<DisjunctiveModel, ProblemError> {
    inst.check()?;
    let n = inst.dim();
    let k = inst.clusters;
    let l = inst.points.len();
    let r_max = inst.max_pair_sq(None);

    let mut variables = Vec::with_capacity(k * n + l);
    for _ in 0..k {
        for t in 0..n {
            let lo = inst.points.iter().map(|p| p[t]).fold(f64::INFINITY, f64::min);
            let hi = inst.points.iter().map(|p| p[t]).fold(f64::NEG_INFINITY, f64::max);
            variables.push(BoxDomain::new(lo, hi));
        }
    }
    for _ in 0..l {
        variables.push(BoxDomain::new(0.0, r_max));
    }

    let mut objective = vec![0.0; k * n + l];
    for i in 0..l {
        objective[kmeans_radius_var(inst, i)] = 1.0;
    }

    let disjunctions = (0..l)
        .map(|i| {
            Disjunction::new(
                (0..k)
                    .map(|j| {
                        let mut terms: Vec<(VarRef, UnivariateTerm)> = (0..n)
                            .map(|t| {
                                (
                                    VarRef(kmeans_center_var(inst, j, t)),
                                    UnivariateTerm::squared_distance(inst.points[i][t], 1.0),
                                )
                            })
                            .collect();
                        terms.push((VarRef(kmeans_radius_var(inst, i)), UnivariateTerm::affine(-1.0)));
                        Disjunct::new(vec![SeparableConstraint::new(terms, 0.0)])
                    })
                    .collect(),
            )
        })
        .collect();

    Ok(DisjunctiveModel {
        variables,
        objective: LinearObjective::new(objective, 0.0),
        global_linear: vec![],
        disjunctions,
        lambda_couplings: vec![],
    })
}

/// Group bound recipe for clustering: the upper bound of a center-coordinate
/// group is the largest squared distance between two data points in that
/// coordinate subspace (any optimal center lies in the convex hull of the
/// data); a group containing the radius term gets `-r_max` as its lower
/// bound from the `-r_i` contribution.
pub fn kmeans_bound_table(
    inst: &ClusterInstance,
    model: &DisjunctiveModel,
    partitions: &[Partition],
) -> BoundTable {
    let n = inst.dim();
    let r_max = inst.max_pair_sq(None);
    let mut table = BoundTable::new();
    for (i, (disjunction, partition)) in model.disjunctions.iter().zip(partitions).enumerate() {
        for (j, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let support = disjunct.constraints[0].support();
            for (s, members) in partition.restrict_to(&support) {
                let mut coords = Vec::new();
                let mut has_radius = false;
                for v in &members {
                    if v.0 == kmeans_radius_var(inst, i) {
                        has_radius = true;
                    } else {
                        debug_assert_eq!(v.0 / n, j);
                        coords.push(v.0 % n);
                    }
                }
                let upper = if coords.is_empty() { 0.0 } else { inst.max_pair_sq(Some(&coords)) };
                let lower = if has_radius { -r_max } else { 0.0 };
                table.insert((i, j, s), AlphaBounds::new(lower, upper)).expect("valid bounds");
            }
        }
    }
    table
}

/// Seeded synthetic clustering data: `k` well-separated blob centers with
/// uniform noise, mimicking the benchmark family shapes at desk scale.
pub fn random_cluster_instance(seed: u64, points: usize, dim: usize, clusters: usize) -> ClusterInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect())
        .collect();
    let points = (0..points)
        .map(|i| {
            let c = &centers[i % clusters.max(1)];
            c.iter().map(|&x| x + rng.gen_range(-1.0..1.0)).collect()
        })
        .collect();
    ClusterInstance { points, clusters }
}

// ---------------------------------------------------------------------------
// point-to-ball assignment

/// Assign `num_points` points to distinct unit balls, minimizing the total
/// pairwise l1 distance between the points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBallInstance {
    pub centers: Vec<Vec<f64>>,
    pub num_points: usize,
}

impl PBallInstance {
    pub fn dim(&self) -> usize {
        self.centers.first().map_or(0, |c| c.len())
    }

    fn check(&self) -> Result<(), ProblemError> {
        if self.centers.is_empty() || self.num_points == 0 {
            return Err(ProblemError::EmptyInstance);
        }
        if self.num_points > self.centers.len() {
            return Err(ProblemError::TooManyPoints { points: self.num_points, balls: self.centers.len() });
        }
        let n = self.dim();
        if self.centers.iter().any(|c| c.len() != n) {
            return Err(ProblemError::MixedDimensions);
        }
        Ok(())
    }
}

pub fn pball_point_var(inst: &PBallInstance, point: usize, coord: usize) -> usize {
    point * inst.dim() + coord
}

/// Model: per point one disjunction over the balls (`||y^j - c_b||^2 <= 1`),
/// l1 objective linearized with one difference variable per point pair and
/// coordinate, and one-point-per-ball exclusivity as coupling rows over the
/// selector binaries.
pub fn gen_pball(inst: &PBallInstance) -> Result<DisjunctiveModel, ProblemError> {
    inst.check()?;
    let n = inst.dim();
    let p = inst.num_points;
    let m = inst.centers.len();

    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for c in &inst.centers {
        for t in 0..n {
            lo[t] = lo[t].min(c[t] - 1.0);
            hi[t] = hi[t].max(c[t] + 1.0);
        }
    }

    let pairs: Vec<(usize, usize)> =
        (0..p).flat_map(|a| ((a + 1)..p).map(move |b| (a, b))).collect();
    let diff_var = |pair_idx: usize, t: usize| p * n + pair_idx * n + t;

    let mut variables: Vec<BoxDomain> = Vec::with_capacity(p * n + pairs.len() * n);
    for _ in 0..p {
        for t in 0..n {
            variables.push(BoxDomain::new(lo[t], hi[t]));
        }
    }
    for _ in &pairs {
        for t in 0..n {
            variables.push(BoxDomain::new(0.0, hi[t] - lo[t]));
        }
    }

    let mut objective = vec![0.0; variables.len()];
    let mut global_linear = Vec::new();
    for (pair_idx, &(a, b)) in pairs.iter().enumerate() {
        for t in 0..n {
            let (ya, yb, w) = (pball_point_var(inst, a, t), pball_point_var(inst, b, t), diff_var(pair_idx, t));
            objective[w] = 1.0;
            global_linear.push(LinearRow::le(
                vec![(VarRef(ya), 1.0), (VarRef(yb), -1.0), (VarRef(w), -1.0)],
                0.0,
            ));
            global_linear.push(LinearRow::le(
                vec![(VarRef(yb), 1.0), (VarRef(ya), -1.0), (VarRef(w), -1.0)],
                0.0,
            ));
        }
    }

    let disjunctions = (0..p)
        .map(|j| {
            Disjunction::new(
                inst.centers
                    .iter()
                    .map(|c| {
                        let terms = (0..n)
                            .map(|t| {
                                (
                                    VarRef(pball_point_var(inst, j, t)),
                                    UnivariateTerm::squared_distance(c[t], 1.0),
                                )
                            })
                            .collect();
                        Disjunct::new(vec![SeparableConstraint::new(terms, 1.0)])
                    })
                    .collect(),
            )
        })
        .collect();

    // At most one point per ball.
    let lambda_couplings = (0..m)
        .map(|b| LambdaCoupling {
            coeffs: (0..p).map(|j| (j, b, 1.0)).collect(),
            rhs: 1.0,
            sense: Sense::Le,
        })
        .collect();

    Ok(DisjunctiveModel {
        variables,
        objective: LinearObjective::new(objective, 0.0),
        global_linear,
        disjunctions,
        lambda_couplings,
    })
}

/// Group bounds for the ball constraints: any feasible point lies in some
/// unit ball, so the subspace distance to ball `b` is at most
/// `max_b' (||(c_b' - c_b)_T|| + 1)^2`.
pub fn pball_bound_table(
    inst: &PBallInstance,
    model: &DisjunctiveModel,
    partitions: &[Partition],
) -> BoundTable {
    let n = inst.dim();
    let mut table = BoundTable::new();
    for (j, (disjunction, partition)) in model.disjunctions.iter().zip(partitions).enumerate() {
        for (b, disjunct) in disjunction.disjuncts.iter().enumerate() {
            let support = disjunct.constraints[0].support();
            for (s, members) in partition.restrict_to(&support) {
                let coords: Vec<usize> = members.iter().map(|v| v.0 % n).collect();
                let upper = inst
                    .centers
                    .iter()
                    .map(|other| {
                        let dist: f64 = coords
                            .iter()
                            .map(|&t| (other[t] - inst.centers[b][t]).powi(2))
                            .sum::<f64>()
                            .sqrt();
                        (dist + 1.0).powi(2)
                    })
                    .fold(0.0f64, f64::max);
                table.insert((j, b, s), AlphaBounds::new(0.0, upper)).expect("valid bounds");
            }
        }
    }
    table
}

/// Seeded ball layout with centers spread far enough apart to make the
/// assignment nontrivial.
pub fn random_pball_instance(seed: u64, balls: usize, points: usize, dim: usize) -> PBallInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = (0..balls)
        .map(|_| (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect())
        .collect();
    PBallInstance { centers, num_points: points }
}

// ---------------------------------------------------------------------------
// ReLU networks

/// A dense feed-forward network: hidden layers apply `max(0, Wx + b)`, the
/// final layer is affine with a single output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReluNetwork {
    pub layers: Vec<LayerWeights>,
    pub input_box: Vec<Interval>,
}

impl ReluNetwork {
    fn check(&self) -> Result<(), ProblemError> {
        if self.layers.is_empty() || self.input_box.is_empty() {
            return Err(ProblemError::EmptyInstance);
        }
        let mut dim = self.input_box.len();
        for (idx, layer) in self.layers.iter().enumerate() {
            if layer.input_dim() != dim || layer.bias.len() != layer.output_dim() {
                return Err(ProblemError::LayerMismatch { layer: idx, expected: layer.input_dim(), got: dim });
            }
            dim = layer.output_dim();
        }
        if dim != 1 {
            return Err(ProblemError::NotScalarOutput { got: dim });
        }
        Ok(())
    }

    /// Hidden units, which is the number of disjunctions in the model.
    pub fn hidden_units(&self) -> usize {
        self.layers[..self.layers.len() - 1].iter().map(|l| l.output_dim()).sum()
    }

    /// Network output for a concrete input.
    pub fn eval(&self, input: &[f64]) -> f64 {
        let mut act: Vec<f64> = input.to_vec();
        for (idx, layer) in self.layers.iter().enumerate() {
            let last = idx + 1 == self.layers.len();
            act = layer
                .weights
                .iter()
                .zip(&layer.bias)
                .map(|(row, b)| {
                    let z: f64 = row.iter().zip(&act).map(|(w, x)| w * x).sum::<f64>() + b;
                    if last {
                        z
                    } else {
                        z.max(0.0)
                    }
                })
                .collect();
        }
        act[0]
    }
}

/// Minimize the network output over the input box. Every hidden unit becomes
/// a two-term disjunction: the active side pins `y = w.x + b` (two
/// inequalities) under `w.x + b >= 0`, the inactive side pins `y = 0` under
/// `w.x + b <= 0`. Unit output boxes come from interval propagation; the
/// affine output layer is a global equality row.
pub fn gen_relu_min(net: &ReluNetwork) -> Result<DisjunctiveModel, ProblemError> {
    net.check()?;
    let input_dim = net.input_box.len();
    let hidden_layers = net.layers.len() - 1;

    // Interval propagation per hidden layer (post-activation) for unit boxes.
    let mut variables: Vec<BoxDomain> =
        net.input_box.iter().map(|iv| BoxDomain::new(iv.lo, iv.hi)).collect();
    let mut layer_vars: Vec<Vec<usize>> = vec![(0..input_dim).collect()];
    let mut activations: Vec<Interval> = net.input_box.clone();
    let mut disjunctions = Vec::new();

    for (li, layer) in net.layers[..hidden_layers].iter().enumerate() {
        let post = propagate_intervals(layer, &activations, true)
            .map_err(|_| ProblemError::LayerMismatch { layer: li, expected: layer.input_dim(), got: activations.len() })?;
        let prev_vars = layer_vars[li].clone();
        let mut these = Vec::with_capacity(layer.output_dim());
        for (u, iv) in post.iter().enumerate() {
            let y = variables.len();
            variables.push(BoxDomain::new(iv.lo, iv.hi));
            these.push(y);

            let w = &layer.weights[u];
            let b = layer.bias[u];
            let wx = |scale: f64| -> Vec<(VarRef, UnivariateTerm)> {
                prev_vars
                    .iter()
                    .zip(w)
                    .filter(|(_, &wi)| wi != 0.0)
                    .map(|(&v, &wi)| (VarRef(v), UnivariateTerm::affine(scale * wi)))
                    .collect()
            };

            // Active side: y - w.x <= b, w.x - y <= -b, -w.x <= b.
            let mut up = wx(-1.0);
            up.push((VarRef(y), UnivariateTerm::affine(1.0)));
            let mut down = wx(1.0);
            down.push((VarRef(y), UnivariateTerm::affine(-1.0)));
            let active = Disjunct::new(vec![
                SeparableConstraint::new(up, b),
                SeparableConstraint::new(down, -b),
                SeparableConstraint::new(wx(-1.0), b),
            ]);
            // Inactive side: y <= 0, -y <= 0, w.x <= -b.
            let inactive = Disjunct::new(vec![
                SeparableConstraint::new(vec![(VarRef(y), UnivariateTerm::affine(1.0))], 0.0),
                SeparableConstraint::new(vec![(VarRef(y), UnivariateTerm::affine(-1.0))], 0.0),
                SeparableConstraint::new(wx(1.0), -b),
            ]);
            disjunctions.push(Disjunction::new(vec![active, inactive]));
        }
        layer_vars.push(these);
        activations = post;
    }

    // Affine output: y_out = w.h + b as a global equality.
    let out_layer = &net.layers[hidden_layers];
    let out_iv = propagate_intervals(out_layer, &activations, false)
        .map_err(|_| ProblemError::NotScalarOutput { got: out_layer.output_dim() })?;
    let y_out = variables.len();
    variables.push(BoxDomain::new(out_iv[0].lo, out_iv[0].hi));
    let mut out_row: Vec<(VarRef, f64)> = vec![(VarRef(y_out), 1.0)];
    for (&h, &w) in layer_vars[hidden_layers].iter().zip(&out_layer.weights[0]) {
        if w != 0.0 {
            out_row.push((VarRef(h), -w));
        }
    }
    let global_linear = vec![LinearRow::eq(out_row, out_layer.bias[0])];

    let mut objective = vec![0.0; variables.len()];
    objective[y_out] = 1.0;

    Ok(DisjunctiveModel {
        variables,
        objective: LinearObjective::new(objective, 0.0),
        global_linear,
        disjunctions,
        lambda_couplings: vec![],
    })
}

/// Seeded random network with the given hidden layer widths; weights are
/// scaled by the fan-in so preactivation ranges stay moderate.
pub fn random_relu_network(seed: u64, input_dim: usize, hidden: &[usize]) -> ReluNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = vec![input_dim];
    dims.extend_from_slice(hidden);
    dims.push(1);
    let layers = (1..dims.len())
        .map(|i| {
            let fan_in = dims[i - 1] as f64;
            let scale = 1.5 / fan_in.sqrt();
            LayerWeights {
                weights: (0..dims[i])
                    .map(|_| (0..dims[i - 1]).map(|_| rng.gen_range(-scale..scale)).collect())
                    .collect(),
                bias: (0..dims[i]).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            }
        })
        .collect();
    ReluNetwork { layers, input_box: vec![Interval::new(-1.0, 1.0); input_dim] }
}

// ---------------------------------------------------------------------------
// random disjunction samplers for the property batteries

/// Random affine disjunction over a box: each disjunct is one affine
/// constraint anchored at a random box point so it is nonempty; the objective
/// is a random linear function.
pub fn random_affine_disjunction(seed: u64, n: usize, disjuncts: usize) -> DisjunctiveModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variables: Vec<BoxDomain> = (0..n)
        .map(|_| {
            let lo: f64 = rng.gen_range(-3.0..1.0);
            let w: f64 = rng.gen_range(1.0..4.0);
            BoxDomain::new(lo, lo + w)
        })
        .collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let disjuncts = (0..disjuncts)
        .map(|_| {
            let coeffs: Vec<f64> = (0..n)
                .map(|_| {
                    let mag: f64 = rng.gen_range(0.2..2.5);
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            let anchor: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * rng.gen_range(variables[j].lower..=variables[j].upper))
                .sum();
            let rhs = anchor + rng.gen_range(0.0..1.0);
            Disjunct::new(vec![SeparableConstraint::new(
                coeffs.iter().enumerate().map(|(j, &c)| (VarRef(j), UnivariateTerm::affine(c))).collect(),
                rhs,
            )])
        })
        .collect();
    DisjunctiveModel {
        variables,
        objective: LinearObjective::new(objective, 0.0),
        global_linear: vec![],
        disjunctions: vec![Disjunction::new(disjuncts)],
        lambda_couplings: vec![],
    }
}

/// Random two-term disjunction mixing convex quadratic and affine terms,
/// anchored at box points so both disjuncts are nonempty.
pub fn random_quadratic_two_term(seed: u64, n: usize) -> DisjunctiveModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let variables: Vec<BoxDomain> = (0..n)
        .map(|_| {
            let lo: f64 = rng.gen_range(-2.0..0.0);
            let w: f64 = rng.gen_range(1.0..3.0);
            BoxDomain::new(lo, lo + w)
        })
        .collect();
    let objective: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let mut disjuncts = Vec::new();
    for _ in 0..2 {
        let terms: Vec<(VarRef, UnivariateTerm)> = (0..n)
            .map(|j| {
                let term = if rng.gen_bool(0.7) {
                    UnivariateTerm::Quadratic {
                        curvature: rng.gen_range(0.2..1.5),
                        linear: rng.gen_range(-1.0..1.0),
                        shift: rng.gen_range(variables[j].lower..=variables[j].upper),
                    }
                } else {
                    UnivariateTerm::affine(rng.gen_range(-2.0..2.0))
                };
                (VarRef(j), term)
            })
            .collect();
        let anchor: f64 = terms
            .iter()
            .map(|(v, t)| t.value(rng.gen_range(variables[v.0].lower..=variables[v.0].upper)))
            .sum();
        let rhs = anchor + rng.gen_range(0.1..1.0);
        disjuncts.push(Disjunct::new(vec![SeparableConstraint::new(terms, rhs)]));
    }
    DisjunctiveModel {
        variables,
        objective: LinearObjective::new(objective, 0.0),
        global_linear: vec![],
        disjunctions: vec![Disjunction::new(disjuncts)],
        lambda_couplings: vec![],
    }
}
