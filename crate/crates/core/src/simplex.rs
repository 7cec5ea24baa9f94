//! Dense bounded-variable primal simplex.
//!
//! The solver keeps a full tableau (`B^-1 [A | I]`) so that rows can be
//! appended and variable bounds changed between solves without
//! refactorization; cutting-plane loops and branch-and-bound nodes restart
//! from the previous basis and typically finish in a few pivots.
//!
//! Pricing is Dantzig's rule with lowest-index tie breaking; after a run of
//! degenerate steps the rule switches to Bland's to guarantee termination.
//! All decisions are deterministic given the input ordering.

/// Primal feasibility tolerance on variable bounds.
const FEAS_TOL: f64 = 1e-9;
/// Reduced-cost optimality tolerance.
const DUAL_TOL: f64 = 1e-9;
/// Smallest acceptable pivot element.
const PIVOT_TOL: f64 = 1e-10;
/// Smallest entering-column coefficient considered in the ratio test.
const RATIO_TOL: f64 = 1e-9;
/// Step length below which a pivot counts as degenerate.
const DEGEN_TOL: f64 = 1e-11;
/// Consecutive degenerate pivots before switching to Bland's rule.
const BLAND_AFTER: usize = 40;
/// Total infeasibility accepted as "feasible" at the end of phase 1.
const PHASE1_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimplexStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VState {
    Basic,
    AtLower,
    AtUpper,
}

/// A `<=` or `=` row over the structural columns.
#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
    pub eq: bool,
}

/// Outcome of one `solve` call.
#[derive(Debug, Clone)]
pub struct Solved {
    pub status: SimplexStatus,
    /// Structural variable values (meaningful for `Optimal`).
    pub x: Vec<f64>,
    /// `objective . x` over the structural columns.
    pub objective: f64,
    /// Pivots plus bound flips performed by this call.
    pub iterations: usize,
}

/// A warm-startable LP. Columns `0..nstruct` are the structural variables;
/// every row owns one slack column after those.
#[derive(Debug, Clone)]
pub struct Session {
    nstruct: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    raw_rows: Vec<Row>,
    /// `B^-1 [A | I]`, one `Vec` per row over all columns.
    tab: Vec<Vec<f64>>,
    /// `B^-1 b`.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VState>,
    xval: Vec<f64>,
    degenerate_run: usize,
    /// Iteration cap per `solve` call as a multiple of `rows + cols`.
    pub iter_factor: usize,
}

impl Session {
    /// Builds a session with a slack basis. Structural bounds must be finite.
    pub fn new(lower: &[f64], upper: &[f64], objective: &[f64]) -> Self {
        let nstruct = lower.len();
        assert_eq!(upper.len(), nstruct);
        assert_eq!(objective.len(), nstruct);
        let mut s = Session {
            nstruct,
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            cost: objective.to_vec(),
            raw_rows: Vec::new(),
            tab: Vec::new(),
            beta: Vec::new(),
            basis: Vec::new(),
            state: Vec::with_capacity(nstruct),
            xval: Vec::with_capacity(nstruct),
            degenerate_run: 0,
            iter_factor: 50,
        };
        for j in 0..nstruct {
            debug_assert!(s.lower[j].is_finite() && s.upper[j].is_finite());
            // Start at the bound of smaller magnitude.
            if s.lower[j].abs() <= s.upper[j].abs() {
                s.state.push(VState::AtLower);
                s.xval.push(s.lower[j]);
            } else {
                s.state.push(VState::AtUpper);
                s.xval.push(s.upper[j]);
            }
        }
        s
    }

    pub fn num_rows(&self) -> usize {
        self.tab.len()
    }

    pub fn num_cols(&self) -> usize {
        self.nstruct + self.tab.len()
    }

    /// Appends a row, reducing it against the current basis; its slack enters
    /// the basis, so optimality of a previous solve is preserved and only
    /// primal feasibility may need repair.
    pub fn add_row(&mut self, row: Row) {
        let m_old = self.tab.len();
        let ncols_old = self.nstruct + m_old;
        for r in &mut self.tab {
            r.push(0.0);
        }
        let slack = ncols_old;
        let mut dense = vec![0.0; ncols_old + 1];
        for &(j, c) in &row.coeffs {
            debug_assert!(j < self.nstruct);
            dense[j] += c;
        }
        dense[slack] = 1.0;
        let mut beta_new = row.rhs;
        for i in 0..m_old {
            let coef = dense[self.basis[i]];
            if coef != 0.0 {
                let (ti, bi) = (&self.tab[i], self.beta[i]);
                for (d, t) in dense.iter_mut().zip(ti.iter()) {
                    *d -= coef * t;
                }
                // the loop above zeroed dense[basis[i]] via the identity column
                beta_new -= coef * bi;
            }
        }
        // Slack bounds: [0, inf) for <=, fixed 0 for =.
        self.lower.push(0.0);
        self.upper.push(if row.eq { 0.0 } else { f64::INFINITY });
        self.cost.push(0.0);
        self.state.push(VState::Basic);
        let val = row.rhs - row.coeffs.iter().map(|&(j, c)| c * self.xval[j]).sum::<f64>();
        self.xval.push(val);
        self.tab.push(dense);
        self.beta.push(beta_new);
        self.basis.push(slack);
        self.raw_rows.push(row);
    }

    /// Changes the bounds of a structural column. A nonbasic column tracks
    /// its bound; a basic one is repaired by the next solve's phase 1.
    pub fn set_bounds(&mut self, col: usize, lo: f64, hi: f64) {
        debug_assert!(col < self.nstruct && lo <= hi);
        self.lower[col] = lo;
        self.upper[col] = hi;
        match self.state[col] {
            VState::AtLower => self.move_nonbasic(col, lo),
            VState::AtUpper => self.move_nonbasic(col, hi),
            VState::Basic => {}
        }
    }

    fn move_nonbasic(&mut self, col: usize, to: f64) {
        let delta = to - self.xval[col];
        if delta == 0.0 {
            return;
        }
        for i in 0..self.tab.len() {
            let t = self.tab[i][col];
            if t != 0.0 {
                self.xval[self.basis[i]] -= t * delta;
            }
        }
        self.xval[col] = to;
    }

    /// Recomputes basic values from the tableau and nonbasic values,
    /// discarding incremental rounding drift.
    fn refresh_basic_values(&mut self) {
        let m = self.tab.len();
        for i in 0..m {
            let mut v = self.beta[i];
            let row = &self.tab[i];
            for (j, &t) in row.iter().enumerate() {
                if t != 0.0 && self.state[j] != VState::Basic {
                    v -= t * self.xval[j];
                }
            }
            self.xval[self.basis[i]] = v;
        }
    }

    fn bounds_of(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    /// Indices of rows whose basic variable violates its bounds.
    fn infeasible_rows(&self) -> Vec<usize> {
        (0..self.tab.len())
            .filter(|&i| {
                let b = self.basis[i];
                let v = self.xval[b];
                v < self.lower[b] - FEAS_TOL || v > self.upper[b] + FEAS_TOL
            })
            .collect()
    }

    fn total_infeasibility(&self) -> f64 {
        self.infeasible_rows()
            .iter()
            .map(|&i| {
                let b = self.basis[i];
                let v = self.xval[b];
                (self.lower[b] - v).max(v - self.upper[b]).max(0.0)
            })
            .sum()
    }

    /// Reduced costs `c - c_B^T B^-1 A` for the given cost vector.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d: Vec<f64> = cost.to_vec();
        for (i, row) in self.tab.iter().enumerate() {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (dj, &t) in d.iter_mut().zip(row.iter()) {
                    *dj -= cb * t;
                }
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let piv = self.tab[r][enter];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv = 1.0 / piv;
        {
            let row = &mut self.tab[r];
            for t in row.iter_mut() {
                *t *= inv;
            }
            row[enter] = 1.0; // exact identity entry
            self.beta[r] *= inv;
        }
        let pivot_row = std::mem::take(&mut self.tab[r]);
        let pivot_beta = self.beta[r];
        for i in 0..self.tab.len() {
            if i == r {
                continue;
            }
            let f = self.tab[i][enter];
            if f != 0.0 {
                let row = &mut self.tab[i];
                for (t, p) in row.iter_mut().zip(pivot_row.iter()) {
                    *t -= f * p;
                }
                row[enter] = 0.0;
                self.beta[i] -= f * pivot_beta;
            }
        }
        self.tab[r] = pivot_row;
        self.basis[r] = enter;
    }

    /// One primal simplex run with the given costs. Returns `Optimal` when no
    /// improving column remains (for phase 1 that means infeasibility-minimal,
    /// not necessarily feasible).
    fn run(&mut self, phase1: bool, iter_budget: &mut usize, iterations: &mut usize) -> SimplexStatus {
        loop {
            if *iter_budget == 0 {
                return SimplexStatus::IterationLimit;
            }
            // Phase-1 costs depend on the current violation pattern.
            let cost_vec: Vec<f64> = if phase1 {
                let mut c = vec![0.0; self.num_cols()];
                let mut any = false;
                for i in 0..self.tab.len() {
                    let b = self.basis[i];
                    let v = self.xval[b];
                    if v < self.lower[b] - FEAS_TOL {
                        c[b] = -1.0;
                        any = true;
                    } else if v > self.upper[b] + FEAS_TOL {
                        c[b] = 1.0;
                        any = true;
                    }
                }
                if !any {
                    return SimplexStatus::Optimal;
                }
                c
            } else {
                let mut c = vec![0.0; self.num_cols()];
                c[..self.nstruct].copy_from_slice(&self.cost[..self.nstruct]);
                c
            };
            let d = self.reduced_costs(&cost_vec);

            // Entering column: improving nonbasic.
            let bland = self.degenerate_run >= BLAND_AFTER;
            let mut enter: Option<(usize, f64)> = None;
            for j in 0..self.num_cols() {
                let improving = match self.state[j] {
                    VState::AtLower => d[j] < -DUAL_TOL,
                    VState::AtUpper => d[j] > DUAL_TOL,
                    VState::Basic => false,
                };
                if !improving {
                    continue;
                }
                if bland {
                    enter = Some((j, d[j]));
                    break;
                }
                match enter {
                    Some((_, best)) if d[j].abs() <= best.abs() => {}
                    _ => enter = Some((j, d[j])),
                }
            }
            let Some((enter, _)) = enter else {
                return SimplexStatus::Optimal;
            };
            let sigma = if self.state[enter] == VState::AtLower { 1.0 } else { -1.0 };

            // Two-pass ratio test. Pass 1 finds the smallest blocking step
            // with bounds relaxed by the feasibility tolerance; pass 2 picks,
            // among rows blocking within that relaxed step, the one with the
            // largest pivot magnitude (smallest basis index under Bland's
            // rule). Preferring large pivots keeps the tableau stable.
            let (el, eu) = self.bounds_of(enter);
            let flip_delta = if el.is_finite() && eu.is_finite() { eu - el } else { f64::INFINITY };

            // Blocking bound of the basic variable in row `i`, given the
            // movement direction. A basic above its upper bound moving down
            // blocks at that bound, a feasible one at its lower bound, one
            // violated below blocks nothing (the phase-1 costs account for
            // its growing violation); symmetrically for moving up.
            let blocking = |this: &Self, i: usize, g: f64| -> Option<(f64, f64)> {
                let b = this.basis[i];
                let v = this.xval[b];
                let (lb, ub) = this.bounds_of(b);
                let target = if g > 0.0 {
                    if v > ub + FEAS_TOL {
                        ub
                    } else if v >= lb - FEAS_TOL {
                        lb
                    } else {
                        return None;
                    }
                } else if v < lb - FEAS_TOL {
                    lb
                } else if v <= ub + FEAS_TOL {
                    ub
                } else {
                    return None;
                };
                if target.is_finite() {
                    Some((v, target))
                } else {
                    None
                }
            };

            let mut limit = flip_delta;
            for i in 0..self.tab.len() {
                let g = sigma * self.tab[i][enter];
                if g.abs() <= RATIO_TOL {
                    continue;
                }
                if let Some((v, target)) = blocking(self, i, g) {
                    let relaxed = ((v - target) / g + FEAS_TOL / g.abs()).max(0.0);
                    limit = limit.min(relaxed);
                }
            }

            let mut leave: Option<(usize, f64, f64)> = None; // (row, target, |pivot|)
            for i in 0..self.tab.len() {
                let g = sigma * self.tab[i][enter];
                if g.abs() <= RATIO_TOL {
                    continue;
                }
                if let Some((v, target)) = blocking(self, i, g) {
                    let delta = ((v - target) / g).max(0.0);
                    if delta > limit {
                        continue;
                    }
                    let better = match leave {
                        None => true,
                        Some((lr, _, lg)) => {
                            if bland {
                                self.basis[i] < self.basis[lr]
                            } else {
                                g.abs() > lg || (g.abs() == lg && self.basis[i] < self.basis[lr])
                            }
                        }
                    };
                    if better {
                        leave = Some((i, target, g.abs()));
                    }
                }
            }
            let leave = leave.map(|(i, target, _)| {
                let g = sigma * self.tab[i][enter];
                let b = self.basis[i];
                (i, target, ((self.xval[b] - target) / g).max(0.0))
            });
            let best_delta = match leave {
                Some((_, _, d)) => d,
                None => flip_delta,
            };

            *iter_budget -= 1;
            *iterations += 1;

            match leave {
                None => {
                    if best_delta.is_finite() {
                        // Bound flip: the entering variable crosses to its
                        // other bound without a basis change.
                        let to = if sigma > 0.0 { eu } else { el };
                        self.move_nonbasic(enter, to);
                        self.state[enter] =
                            if sigma > 0.0 { VState::AtUpper } else { VState::AtLower };
                        self.degenerate_run = 0;
                        continue;
                    }
                    return SimplexStatus::Unbounded;
                }
                Some((r, target, _)) => {
                    let delta = best_delta;
                    // Update primal values along the direction.
                    for i in 0..self.tab.len() {
                        let t = self.tab[i][enter];
                        if t != 0.0 {
                            self.xval[self.basis[i]] -= sigma * delta * t;
                        }
                    }
                    let leaving = self.basis[r];
                    self.xval[enter] += sigma * delta;
                    self.xval[leaving] = target; // snap exactly onto its bound
                    self.state[leaving] = if target == self.lower[leaving] {
                        VState::AtLower
                    } else {
                        VState::AtUpper
                    };
                    self.state[enter] = VState::Basic;
                    self.pivot(r, enter);
                    if delta <= DEGEN_TOL {
                        self.degenerate_run += 1;
                    } else {
                        self.degenerate_run = 0;
                    }
                }
            }
        }
    }

    /// Runs phase 1 (if needed) and phase 2 from the current basis. If
    /// accumulated rounding left the final point slightly outside its bounds,
    /// the phases are repeated from the refreshed state.
    pub fn solve(&mut self) -> Solved {
        let mut iterations = 0usize;
        for _attempt in 0..3 {
            self.refresh_basic_values();
            self.degenerate_run = 0;
            let mut budget = self.iter_factor * (self.num_rows() + self.num_cols()).max(1);

            if !self.infeasible_rows().is_empty() {
                match self.run(true, &mut budget, &mut iterations) {
                    SimplexStatus::Optimal => {
                        if self.total_infeasibility() > PHASE1_TOL {
                            return self.finish(SimplexStatus::Infeasible, iterations);
                        }
                    }
                    SimplexStatus::Unbounded => {
                        // A feasibility objective cannot be unbounded; treat as stall.
                        return self.finish(SimplexStatus::IterationLimit, iterations);
                    }
                    other => return self.finish(other, iterations),
                }
            }
            let status = self.run(false, &mut budget, &mut iterations);
            if status != SimplexStatus::Optimal {
                return self.finish(status, iterations);
            }
            self.refresh_basic_values();
            if self.total_infeasibility() <= PHASE1_TOL {
                return self.finish(SimplexStatus::Optimal, iterations);
            }
            // Rounding pushed a basic out of bounds; repair and re-optimize.
        }
        self.finish(SimplexStatus::IterationLimit, iterations)
    }

    fn finish(&mut self, status: SimplexStatus, iterations: usize) -> Solved {
        if status == SimplexStatus::Optimal {
            self.refresh_basic_values();
        }
        let x: Vec<f64> = self.xval[..self.nstruct].to_vec();
        let objective = self.cost[..self.nstruct].iter().zip(&x).map(|(c, v)| c * v).sum();
        Solved { status, x, objective, iterations }
    }

    /// Largest violation of the original rows and bounds at the current point.
    pub fn primal_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for j in 0..self.nstruct {
            res = res.max(self.lower[j] - self.xval[j]).max(self.xval[j] - self.upper[j]);
        }
        for row in &self.raw_rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, c)| c * self.xval[j]).sum();
            if row.eq {
                res = res.max((lhs - row.rhs).abs());
            } else {
                res = res.max(lhs - row.rhs);
            }
        }
        res
    }
}
