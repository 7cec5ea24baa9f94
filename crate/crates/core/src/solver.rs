//! Continuous relaxations and branch-and-bound on [`FlatMip`] problems.
//!
//! Linear rows go straight to the simplex; convex quadratic rows are enforced
//! by a Kelley outer-approximation loop that adds supporting-hyperplane cuts
//! until the relaxation optimum satisfies every convex row. Branch-and-bound
//! explores best-bound first, branching on the most fractional selector
//! binary, and children inherit their parent's cut pool. No other cuts,
//! heuristics or presolve are applied, so relaxation-strength differences
//! between formulations stay visible.

use std::collections::BinaryHeap;
use std::fmt;
use std::time::Instant;

use crate::flatmip::{ConvexRow, FlatMip};
use crate::model::Sense;
use crate::simplex::{Row, Session, SimplexStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::IterationLimit => "iteration_limit",
        };
        f.write_str(s)
    }
}

impl From<SimplexStatus> for LpStatus {
    fn from(s: SimplexStatus) -> Self {
        match s {
            SimplexStatus::Optimal => LpStatus::Optimal,
            SimplexStatus::Infeasible => LpStatus::Infeasible,
            SimplexStatus::Unbounded => LpStatus::Unbounded,
            SimplexStatus::IterationLimit => LpStatus::IterationLimit,
        }
    }
}

/// Result of one continuous solve.
#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    /// Objective including the formulation's constant term.
    pub objective: f64,
    /// Values of the FlatMip variables.
    pub x: Vec<f64>,
    /// Simplex iterations (pivots and bound flips).
    pub iterations: usize,
    /// Outer-approximation cuts added during this solve.
    pub cuts_added: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
    TimeLimit,
    /// The LP kernel gave up inside a node (iteration limit).
    Stalled,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NodeLimit => "node_limit",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::Stalled => "stalled",
        };
        f.write_str(s)
    }
}

/// Branch-and-bound outcome.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Best integer-feasible objective found, if any.
    pub incumbent: Option<f64>,
    pub incumbent_point: Option<Vec<f64>>,
    /// Valid lower bound on the optimum (minimization).
    pub best_bound: f64,
    /// Node relaxations solved.
    pub nodes: usize,
    /// Total simplex iterations over all node solves.
    pub lp_iterations: usize,
    /// Total outer-approximation cuts added over all node solves.
    pub oa_cuts: usize,
    pub wall_time_s: f64,
}

/// Solver options; all of them are surfaced as CLI flags.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub time_limit_s: Option<f64>,
    pub node_limit: Option<usize>,
    /// Relative optimality gap at which the search stops.
    pub gap_tol: f64,
    /// Integrality tolerance on the selector binaries.
    pub int_tol: f64,
    /// Convex-row violation tolerance of the outer-approximation loop.
    pub oa_tol: f64,
    /// Cut rounds per continuous solve before giving up.
    pub oa_max_iters: usize,
    /// Simplex iteration cap factor (times rows + cols) per LP solve.
    pub lp_iter_factor: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            time_limit_s: None,
            node_limit: None,
            gap_tol: 1e-6,
            int_tol: 1e-6,
            oa_tol: 1e-6,
            oa_max_iters: 200,
            lp_iter_factor: 50,
        }
    }
}

/// Builds a simplex session over the FlatMip's variables and linear rows.
/// Binaries enter with their `[0, 1]` (or tightened) bounds; integrality is
/// not represented at this level.
pub(crate) fn base_session(f: &FlatMip, opts: &SolveOptions) -> Session {
    let lower: Vec<f64> = f.vars.iter().map(|v| v.lower).collect();
    let upper: Vec<f64> = f.vars.iter().map(|v| v.upper).collect();
    let mut s = Session::new(&lower, &upper, &f.objective);
    s.iter_factor = opts.lp_iter_factor;
    for row in &f.linear_rows {
        match row.sense {
            Sense::Le => s.add_row(Row { coeffs: row.coeffs.clone(), rhs: row.rhs, eq: false }),
            Sense::Ge => s.add_row(Row {
                coeffs: row.coeffs.iter().map(|&(j, c)| (j, -c)).collect(),
                rhs: -row.rhs,
                eq: false,
            }),
            Sense::Eq => s.add_row(Row { coeffs: row.coeffs.clone(), rhs: row.rhs, eq: true }),
        }
    }
    s
}

/// Solves only the linear portion of the formulation plus the given cut rows.
/// Convex rows are ignored here; [`solve_relaxation`] enforces them.
pub fn solve_lp(f: &FlatMip, oa_cuts: &[Row]) -> LpResult {
    let opts = SolveOptions::default();
    let mut session = base_session(f, &opts);
    for cut in oa_cuts {
        session.add_row(cut.clone());
    }
    let solved = session.solve();
    LpResult {
        status: solved.status.into(),
        objective: solved.objective + f.objective_constant,
        x: solved.x[..f.num_vars()].to_vec(),
        iterations: solved.iterations,
        cuts_added: 0,
    }
}

/// Outer-approximation loop on an existing session: solve, add a gradient cut
/// for every convex row violated beyond `oa_tol`, repeat. Returns the result
/// and appends the added cuts to `pool`.
pub(crate) fn oa_solve(
    session: &mut Session,
    convex_rows: &[ConvexRow],
    opts: &SolveOptions,
    pool: Option<&mut Vec<Row>>,
) -> LpResult {
    let mut iterations = 0usize;
    let mut cuts_added = 0usize;
    let mut local_pool: Vec<Row> = Vec::new();
    let result = loop {
        let solved = session.solve();
        iterations += solved.iterations;
        if solved.status != SimplexStatus::Optimal {
            break LpResult {
                status: solved.status.into(),
                objective: solved.objective,
                x: solved.x,
                iterations,
                cuts_added,
            };
        }
        let mut violated = false;
        for row in convex_rows {
            if row.violation(&solved.x) > opts.oa_tol {
                let (coeffs, rhs) = row.gradient_cut(&solved.x);
                let cut = Row { coeffs, rhs, eq: false };
                session.add_row(cut.clone());
                local_pool.push(cut);
                cuts_added += 1;
                violated = true;
            }
        }
        if !violated {
            break LpResult {
                status: LpStatus::Optimal,
                objective: solved.objective,
                x: solved.x,
                iterations,
                cuts_added,
            };
        }
        if cuts_added > opts.oa_max_iters * convex_rows.len().max(1) {
            break LpResult {
                status: LpStatus::IterationLimit,
                objective: solved.objective,
                x: solved.x,
                iterations,
                cuts_added,
            };
        }
    };
    if let Some(pool) = pool {
        pool.extend(local_pool);
    }
    result
}

/// Continuous relaxation of the formulation: binaries relaxed to their
/// bounds, convex rows enforced by outer approximation.
pub fn solve_relaxation(f: &FlatMip) -> LpResult {
    solve_relaxation_with(f, &SolveOptions::default())
}

pub fn solve_relaxation_with(f: &FlatMip, opts: &SolveOptions) -> LpResult {
    let mut session = base_session(f, opts);
    let mut r = oa_solve(&mut session, &f.convex_rows, opts, None);
    r.objective += f.objective_constant;
    r.x.truncate(f.num_vars());
    r
}

struct Node {
    id: usize,
    bound: f64,
    /// Binary fixings `(column, value)` along the path from the root.
    fixings: Vec<(usize, f64)>,
    /// Cuts collected below the root solve.
    cuts_beyond_root: Vec<Row>,
}

struct NodeOrd {
    bound: f64,
    id: usize,
}

impl PartialEq for NodeOrd {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.id == other.id
    }
}
impl Eq for NodeOrd {}
impl PartialOrd for NodeOrd {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeOrd {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // BinaryHeap is a max-heap; invert for best-bound-first, ties by id.
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Best-bound branch-and-bound with outer-approximation node relaxations.
/// The node count is exactly the number of node relaxations solved.
pub fn branch_and_bound(f: &FlatMip, opts: &SolveOptions) -> SolveReport {
    let start = Instant::now();
    let binaries: Vec<usize> = f.binaries().collect();

    let mut nodes_solved = 0usize;
    let mut lp_iterations = 0usize;
    let mut oa_cuts = 0usize;
    let mut incumbent: Option<f64> = None;
    let mut incumbent_point: Option<Vec<f64>> = None;

    // Root relaxation; its session (with cuts) is the replay base for all nodes.
    let mut root_session = base_session(f, opts);
    let mut root_cuts: Vec<Row> = Vec::new();
    let root = oa_solve(&mut root_session, &f.convex_rows, opts, Some(&mut root_cuts));
    nodes_solved += 1;
    lp_iterations += root.iterations;
    oa_cuts += root.cuts_added;

    let finish = |status: SolveStatus,
                  incumbent: Option<f64>,
                  incumbent_point: Option<Vec<f64>>,
                  best_bound: f64,
                  nodes: usize,
                  lp_iterations: usize,
                  oa_cuts: usize| SolveReport {
        status,
        incumbent: incumbent.map(|v| v + f.objective_constant),
        incumbent_point,
        best_bound: best_bound + f.objective_constant,
        nodes,
        lp_iterations,
        oa_cuts,
        wall_time_s: start.elapsed().as_secs_f64(),
    };

    match root.status {
        LpStatus::Infeasible => {
            return finish(SolveStatus::Infeasible, None, None, f64::INFINITY, nodes_solved, lp_iterations, oa_cuts)
        }
        LpStatus::Optimal => {}
        _ => return finish(SolveStatus::Stalled, None, None, f64::NEG_INFINITY, nodes_solved, lp_iterations, oa_cuts),
    }

    let fractional = |x: &[f64]| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for &j in &binaries {
            let frac = (x[j] - x[j].round()).abs();
            if frac > opts.int_tol {
                let dist = x[j].fract().min(1.0 - x[j].fract()).abs();
                match best {
                    Some((_, d)) if dist <= d => {}
                    _ => best = Some((j, dist)),
                }
            }
        }
        best.map(|(j, _)| j)
    };

    let gap_slack = |inc: f64| opts.gap_tol * inc.abs().max(1.0);

    let mut frontier: BinaryHeap<NodeOrd> = BinaryHeap::new();
    let mut store: Vec<Option<Node>> = Vec::new();
    let mut next_id = 0usize;

    // Handle the root outcome directly.
    match fractional(&root.x) {
        None => {
            return finish(
                SolveStatus::Optimal,
                Some(root.objective),
                Some(root.x[..f.num_vars()].to_vec()),
                root.objective,
                nodes_solved,
                lp_iterations,
                oa_cuts,
            );
        }
        Some(j) => {
            for val in [0.0, 1.0] {
                let node = Node {
                    id: next_id,
                    bound: root.objective,
                    fixings: vec![(j, val)],
                    cuts_beyond_root: Vec::new(),
                };
                frontier.push(NodeOrd { bound: node.bound, id: node.id });
                store.push(Some(node));
                next_id += 1;
            }
        }
    }

    let mut best_bound = root.objective;
    let mut status = SolveStatus::Optimal;

    while let Some(top) = frontier.pop() {
        let node = store[top.id].take().expect("node stored once");
        best_bound = node.bound;
        if let Some(inc) = incumbent {
            if node.bound >= inc - gap_slack(inc) {
                // Best-bound order: every remaining node is at least as bad.
                best_bound = inc.min(node.bound);
                break;
            }
        }
        if let Some(limit) = opts.node_limit {
            if nodes_solved >= limit {
                status = SolveStatus::NodeLimit;
                break;
            }
        }
        if let Some(limit) = opts.time_limit_s {
            if start.elapsed().as_secs_f64() >= limit {
                status = SolveStatus::TimeLimit;
                break;
            }
        }

        let mut session = root_session.clone();
        for &(col, val) in &node.fixings {
            session.set_bounds(col, val, val);
        }
        for cut in &node.cuts_beyond_root {
            session.add_row(cut.clone());
        }
        let mut new_cuts: Vec<Row> = Vec::new();
        let r = oa_solve(&mut session, &f.convex_rows, opts, Some(&mut new_cuts));
        nodes_solved += 1;
        lp_iterations += r.iterations;
        oa_cuts += r.cuts_added;

        match r.status {
            LpStatus::Infeasible => continue,
            LpStatus::Optimal => {}
            _ => {
                status = SolveStatus::Stalled;
                break;
            }
        }
        if let Some(inc) = incumbent {
            if r.objective >= inc - gap_slack(inc) {
                continue;
            }
        }
        match fractional(&r.x) {
            None => {
                if incumbent.map_or(true, |inc| r.objective < inc) {
                    incumbent = Some(r.objective);
                    incumbent_point = Some(r.x[..f.num_vars()].to_vec());
                }
            }
            Some(j) => {
                let mut pool = node.cuts_beyond_root;
                pool.extend(new_cuts);
                for val in [0.0, 1.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((j, val));
                    let child = Node {
                        id: next_id,
                        bound: r.objective,
                        fixings,
                        cuts_beyond_root: pool.clone(),
                    };
                    frontier.push(NodeOrd { bound: child.bound, id: child.id });
                    store.push(Some(child));
                    next_id += 1;
                }
            }
        }
    }

    if frontier.is_empty() && status == SolveStatus::Optimal {
        // Tree exhausted: the incumbent is optimal (or the problem infeasible).
        match incumbent {
            Some(inc) => best_bound = inc,
            None => {
                return finish(SolveStatus::Infeasible, None, None, f64::INFINITY, nodes_solved, lp_iterations, oa_cuts)
            }
        }
    }
    if let Some(inc) = incumbent {
        best_bound = best_bound.min(inc);
    }
    if status == SolveStatus::Optimal && incumbent.is_none() {
        // Stopped early without an incumbent (limits); reflect that.
        status = SolveStatus::NodeLimit;
    }
    finish(status, incumbent, incumbent_point, best_bound, nodes_solved, lp_iterations, oa_cuts)
}
