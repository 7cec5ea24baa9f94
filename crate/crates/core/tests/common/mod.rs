//! Independent oracles for the integration and acceptance suites.
//!
//! Everything here recomputes expected values by enumeration or closed-form
//! geometry, deliberately avoiding the reformulation builders and the
//! branch-and-bound driver whose answers it checks. Selection subproblems are
//! plain LPs assembled directly from the model data.

use psplit::model::{DisjunctiveModel, Sense, UnivariateTerm};
use psplit::problems::{ClusterInstance, PBallInstance, ReluNetwork};
use psplit::simplex::{Row, Session, SimplexStatus};

/// All disjunct selections (one per disjunction) that satisfy the model's
/// lambda coupling rows.
pub fn admissible_selections(model: &DisjunctiveModel) -> Vec<Vec<usize>> {
    let sizes: Vec<usize> = model.disjunctions.iter().map(|d| d.disjuncts.len()).collect();
    let mut out = Vec::new();
    let mut current = vec![0usize; sizes.len()];
    loop {
        let ok = model.lambda_couplings.iter().all(|c| {
            let lhs: f64 = c
                .coeffs
                .iter()
                .map(|&(dj, dl, coef)| if current[dj] == dl { coef } else { 0.0 })
                .sum();
            match c.sense {
                Sense::Le => lhs <= c.rhs + 1e-12,
                Sense::Ge => lhs >= c.rhs - 1e-12,
                Sense::Eq => (lhs - c.rhs).abs() <= 1e-12,
            }
        });
        if ok {
            out.push(current.clone());
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == sizes.len() {
                return out;
            }
            current[k] += 1;
            if current[k] < sizes[k] {
                break;
            }
            current[k] = 0;
            k += 1;
        }
    }
}

/// Minimum of the model objective with the given disjuncts selected, solved
/// as one LP over the box, the global rows and the selected constraints.
/// Only valid for selections whose constraints are all affine. Returns `None`
/// when infeasible.
pub fn selection_lp_min(model: &DisjunctiveModel, selection: &[usize]) -> Option<f64> {
    let lower: Vec<f64> = model.variables.iter().map(|b| b.lower).collect();
    let upper: Vec<f64> = model.variables.iter().map(|b| b.upper).collect();
    let mut session = Session::new(&lower, &upper, &model.objective.coeffs);
    for row in &model.global_linear {
        let coeffs: Vec<(usize, f64)> = row.coeffs.iter().map(|(v, c)| (v.0, *c)).collect();
        match row.sense {
            Sense::Le => session.add_row(Row { coeffs, rhs: row.rhs, eq: false }),
            Sense::Ge => session.add_row(Row {
                coeffs: coeffs.iter().map(|&(j, c)| (j, -c)).collect(),
                rhs: -row.rhs,
                eq: false,
            }),
            Sense::Eq => session.add_row(Row { coeffs, rhs: row.rhs, eq: true }),
        }
    }
    for (disjunction, &l) in model.disjunctions.iter().zip(selection) {
        for constraint in &disjunction.disjuncts[l].constraints {
            let mut coeffs = Vec::with_capacity(constraint.terms.len());
            for (v, t) in &constraint.terms {
                let w = match *t {
                    UnivariateTerm::Affine { weight } => weight,
                    UnivariateTerm::Quadratic { curvature, linear, .. } => {
                        assert_eq!(curvature, 0.0, "selection_lp_min needs affine constraints");
                        linear
                    }
                };
                coeffs.push((v.0, w));
            }
            session.add_row(Row { coeffs, rhs: constraint.rhs, eq: false });
        }
    }
    let solved = session.solve();
    match solved.status {
        SimplexStatus::Optimal => Some(solved.objective + model.objective.constant),
        SimplexStatus::Infeasible => None,
        other => panic!("oracle LP ended with {other:?}"),
    }
}

/// Brute-force MIP optimum of an affine disjunctive model: enumerate every
/// admissible selection and take the best LP value.
pub fn affine_mip_oracle(model: &DisjunctiveModel) -> Option<f64> {
    let mut best: Option<f64> = None;
    for sel in admissible_selections(model) {
        if let Some(v) = selection_lp_min(model, &sel) {
            best = Some(best.map_or(v, |b: f64| b.min(v)));
        }
    }
    best
}

/// LP relaxation value of a single affine disjunct (used as the convex-hull
/// value oracle: the hull optimum is the min over disjunct minima).
pub fn hull_value_oracle(model: &DisjunctiveModel) -> Option<f64> {
    assert_eq!(model.disjunctions.len(), 1);
    affine_mip_oracle(model)
}

/// Exact clustering optimum by assignment enumeration. For the sum-of-radii
/// objective the optimal center of each cluster is the centroid of its
/// points, so each assignment has a closed-form value.
pub fn kmeans_oracle(inst: &ClusterInstance) -> f64 {
    let l = inst.points.len();
    let k = inst.clusters;
    let n = inst.dim();
    let mut best = f64::INFINITY;
    let mut assign = vec![0usize; l];
    loop {
        let mut value = 0.0;
        for j in 0..k {
            let members: Vec<&Vec<f64>> = (0..l).filter(|&i| assign[i] == j).map(|i| &inst.points[i]).collect();
            if members.is_empty() {
                continue;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|t| members.iter().map(|p| p[t]).sum::<f64>() / members.len() as f64)
                .collect();
            for p in &members {
                value += centroid.iter().zip(p.iter()).map(|(c, x)| (c - x) * (c - x)).sum::<f64>();
            }
        }
        best = best.min(value);
        let mut idx = 0;
        loop {
            if idx == l {
                return best;
            }
            assign[idx] += 1;
            if assign[idx] < k {
                break;
            }
            assign[idx] = 0;
            idx += 1;
        }
    }
}

/// Smallest l1 norm over the Euclidean ball `||z - delta|| <= r`, via
/// soft-thresholding with a bisected multiplier.
pub fn min_l1_over_ball(delta: &[f64], r: f64) -> f64 {
    let norm2: f64 = delta.iter().map(|d| d * d).sum::<f64>();
    if norm2 <= r * r {
        return 0.0;
    }
    // z_t = sign(d_t) * max(|d_t| - mu, 0); ||z - d||^2 = sum min(|d_t|, mu)^2
    // grows monotonically in mu, so bisect mu until the residual equals r.
    let residual = |mu: f64| -> f64 {
        delta.iter().map(|d| d.abs().min(mu).powi(2)).sum::<f64>().sqrt()
    };
    let mut lo = 0.0;
    let mut hi = delta.iter().map(|d| d.abs()).fold(0.0f64, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    delta.iter().map(|d| (d.abs() - mu).max(0.0)).sum()
}

/// Exact optimum of a one- or two-point ball-assignment instance: enumerate
/// the injective assignments; the two-point subproblem is the minimal l1
/// distance between two balls, a soft-threshold closed form.
pub fn pball_oracle(inst: &PBallInstance) -> f64 {
    assert!(inst.num_points <= 2, "oracle covers p <= 2");
    if inst.num_points <= 1 {
        return 0.0;
    }
    let m = inst.centers.len();
    let mut best = f64::INFINITY;
    for b1 in 0..m {
        for b2 in 0..m {
            if b1 == b2 {
                continue;
            }
            let delta: Vec<f64> = inst.centers[b1]
                .iter()
                .zip(&inst.centers[b2])
                .map(|(a, b)| a - b)
                .collect();
            best = best.min(min_l1_over_ball(&delta, 2.0));
        }
    }
    best
}

/// Exact network minimum by activation-pattern enumeration: each pattern
/// fixes every hidden unit on or off, leaving one feasibility LP per pattern.
pub fn relu_oracle(net: &ReluNetwork) -> f64 {
    let model = psplit::problems::gen_relu_min(net).expect("valid network");
    affine_mip_oracle(&model).expect("some activation pattern is feasible")
}

/// Relaxation oracle for the two-ball disjunction under big-M rows with the
/// analytic `M = 48` coefficients, for objectives of the form
/// `c = (p, p, q, q)`. For a fixed selector weight the feasible set is the
/// intersection of two balls and the box; by symmetry an optimal point has
/// `x = (s, s, u, u)`, the inner minimization over `u` is closed-form, the
/// middle one over `s` is convex (ternary search), and the value is jointly
/// convex in the selector weight (outer ternary search).
pub fn example1_bigm_relaxation_oracle(p: f64, q: f64) -> f64 {
    let m_coef = 48.0;
    let value_for_lambda = |lam1: f64| -> f64 {
        let r1sq = 1.0 + m_coef * (1.0 - lam1);
        let r2sq = 1.0 + m_coef * lam1;
        let u_interval = |s: f64| -> Option<(f64, f64)> {
            let a = r1sq / 2.0 - s * s;
            let b = r2sq / 2.0 - (3.0 - s) * (3.0 - s);
            if a < 0.0 || b < 0.0 {
                return None;
            }
            let lo = (-a.sqrt()).max(3.0 - b.sqrt()).max(-1.0);
            let hi = a.sqrt().min(3.0 + b.sqrt()).min(4.0);
            if lo <= hi {
                Some((lo, hi))
            } else {
                None
            }
        };
        let eval = |s: f64| -> f64 {
            match u_interval(s) {
                Some((lo, hi)) => {
                    let u = if q >= 0.0 { lo } else { hi };
                    2.0 * p * s + 2.0 * q * u
                }
                None => f64::INFINITY,
            }
        };
        // Feasible s range from both ball slices and the box.
        let s_lo = (-(r1sq / 2.0).sqrt()).max(3.0 - (r2sq / 2.0).sqrt()).max(-1.0);
        let s_hi = (r1sq / 2.0).sqrt().min(3.0 + (r2sq / 2.0).sqrt()).min(4.0);
        if s_lo > s_hi {
            return f64::INFINITY;
        }
        let (mut lo, mut hi) = (s_lo, s_hi);
        for _ in 0..300 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if eval(m1) <= eval(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        eval(0.5 * (lo + hi)).min(eval(s_lo)).min(eval(s_hi))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if value_for_lambda(m1) <= value_for_lambda(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    value_for_lambda(0.5 * (lo + hi))
        .min(value_for_lambda(0.0))
        .min(value_for_lambda(1.0))
}
