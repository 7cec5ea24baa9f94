//! Cross-formulation comparison harness and feasibility-grid projection.

use std::fmt;
use std::time::Instant;

use crate::bounds::BoundTable;
use crate::flatmip::{formulation_stats, FlatMip, VarTag};
use crate::model::DisjunctiveModel;
use crate::partition::Partition;
use crate::reformulate::{
    build_bigm, build_hull_extended, build_psplit_extended, build_psplit_nonextended,
    even_partitions, singleton_partitions, NonExtendedOptions, ReformulateError,
};
use crate::solver::{
    base_session, branch_and_bound, oa_solve, solve_relaxation_with, LpStatus, SolveOptions,
    SolveStatus,
};

/// Which formulation to build for a comparison row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationKind {
    BigM,
    SplitExtended { p: usize },
    SplitNonextended { p: usize },
    /// Extended split with one group per variable (the full split).
    NSplit,
    HullExtended,
}

impl FormulationKind {
    pub fn label(&self) -> String {
        match self {
            FormulationKind::BigM => "bigm".into(),
            FormulationKind::SplitExtended { p } => format!("psplit{p}"),
            FormulationKind::SplitNonextended { p } => format!("nonext{p}"),
            FormulationKind::NSplit => "nsplit".into(),
            FormulationKind::HullExtended => "hull".into(),
        }
    }

    pub fn p(&self) -> Option<usize> {
        match self {
            FormulationKind::SplitExtended { p } | FormulationKind::SplitNonextended { p } => Some(*p),
            _ => None,
        }
    }
}

/// One line of the comparison report; the CSV column order is the field
/// order.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub instance: String,
    pub formulation: String,
    pub p: Option<usize>,
    pub continuous_vars: usize,
    pub binaries: usize,
    pub rows: usize,
    pub lp_relaxation: Option<f64>,
    pub mip_optimum: Option<f64>,
    pub nodes: Option<usize>,
    pub lp_iterations: Option<usize>,
    pub wall_time_s: f64,
    pub status: String,
}

pub const COMPARISON_CSV_HEADER: &str =
    "instance,formulation,p,continuous_vars,binaries,rows,lp_relaxation,mip_optimum,nodes,lp_iterations,wall_time_s,status";

fn opt_num<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl ComparisonRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.instance,
            self.formulation,
            opt_num(&self.p),
            self.continuous_vars,
            self.binaries,
            self.rows,
            opt_num(&self.lp_relaxation),
            opt_num(&self.mip_optimum),
            opt_num(&self.nodes),
            opt_num(&self.lp_iterations),
            self.wall_time_s,
            self.status
        )
    }
}

/// Builds the requested formulation, using `bounds_for` to produce the bound
/// table matching the partitions in use (big-M receives the one-group
/// partitions).
pub fn build_formulation(
    model: &DisjunctiveModel,
    kind: FormulationKind,
    bounds_for: &dyn Fn(&[Partition]) -> BoundTable,
) -> Result<FlatMip, ReformulateError> {
    match kind {
        FormulationKind::BigM => {
            let parts = even_partitions(model, 1)?;
            build_bigm(model, &bounds_for(&parts))
        }
        FormulationKind::SplitExtended { p } => {
            let parts = even_partitions(model, p)?;
            build_psplit_extended(model, &parts, &bounds_for(&parts))
        }
        FormulationKind::SplitNonextended { p } => {
            let parts = even_partitions(model, p)?;
            build_psplit_nonextended(model, &parts, &bounds_for(&parts), NonExtendedOptions::default())
        }
        FormulationKind::NSplit => {
            let parts = singleton_partitions(model)?;
            build_psplit_extended(model, &parts, &bounds_for(&parts))
        }
        FormulationKind::HullExtended => build_hull_extended(model),
    }
}

/// Runs every requested formulation on the model: build, relax, solve to
/// integrality, and record one row each. Rows for formulations that do not
/// apply (split larger than the support, hull of a nonlinear disjunction)
/// carry status `na`; solver failures are recorded per row and the run
/// continues. After all rows, MIP optima are cross-checked within `1e-6` and
/// disagreeing rows are flagged.
pub fn run_compare(
    model: &DisjunctiveModel,
    instance: &str,
    kinds: &[FormulationKind],
    bounds_for: &dyn Fn(&[Partition]) -> BoundTable,
    opts: &SolveOptions,
) -> Vec<ComparisonRow> {
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let start = Instant::now();
        let mut row = ComparisonRow {
            instance: instance.to_string(),
            formulation: kind.label(),
            p: kind.p(),
            continuous_vars: 0,
            binaries: 0,
            rows: 0,
            lp_relaxation: None,
            mip_optimum: None,
            nodes: None,
            lp_iterations: None,
            wall_time_s: 0.0,
            status: "ok".into(),
        };
        let built = build_formulation(model, kind, bounds_for);
        match built {
            Err(ReformulateError::PartitionTooLarge { .. })
            | Err(ReformulateError::NotTwoTerm { .. })
            | Err(ReformulateError::NonAffineDisjunct { .. }) => {
                row.status = "na".into();
            }
            Err(e) => {
                row.status = format!("error: {e}");
            }
            Ok(f) => {
                let stats = formulation_stats(&f);
                row.continuous_vars = stats.continuous_vars;
                row.binaries = stats.binary_vars;
                row.rows = stats.linear_rows + stats.convex_rows;
                let relax = solve_relaxation_with(&f, opts);
                if relax.status == LpStatus::Optimal {
                    row.lp_relaxation = Some(relax.objective);
                }
                let report = branch_and_bound(&f, opts);
                row.nodes = Some(report.nodes);
                row.lp_iterations = Some(report.lp_iterations + relax.iterations);
                match report.status {
                    SolveStatus::Optimal => {
                        row.mip_optimum = report.incumbent;
                        if let (Some(lp), Some(mip)) = (row.lp_relaxation, row.mip_optimum) {
                            if lp > mip + 1e-6 {
                                row.status = "bound_violation".into();
                            }
                        }
                    }
                    other => row.status = other.to_string(),
                }
            }
        }
        row.wall_time_s = start.elapsed().as_secs_f64();
        rows.push(row);
    }

    // All formulations encode the same feasible set; their optima must agree.
    let reference = rows.iter().find_map(|r| if r.status == "ok" { r.mip_optimum } else { None });
    if let Some(reference) = reference {
        for row in &mut rows {
            if row.status == "ok" {
                if let Some(v) = row.mip_optimum {
                    if (v - reference).abs() > 1e-6 * reference.abs().max(1.0) {
                        row.status = "mismatch".into();
                    }
                }
            }
        }
    }
    rows
}

/// One cell of a feasibility grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub feasible: bool,
}

pub const GRID_CSV_HEADER: &str = "x_i,x_j,feasible";

#[derive(Debug, Clone, PartialEq)]
pub enum GridError {
    MissingDimension(usize),
    DuplicateDimensions,
    EmptyWindow,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridError::MissingDimension(i) => write!(f, "formulation has no original variable x{i}"),
            GridError::DuplicateDimensions => write!(f, "the two grid dimensions must differ"),
            GridError::EmptyWindow => write!(f, "grid window is empty"),
        }
    }
}

impl std::error::Error for GridError {}

/// Evaluates the continuous relaxation's feasibility over an evenly spaced
/// grid of `(x_i, x_j)` values; the remaining variables stay free over their
/// boxes. The grid includes the window's corner points.
pub fn project_grid(
    f: &FlatMip,
    dims: (usize, usize),
    window: ((f64, f64), (f64, f64)),
    resolution: (usize, usize),
    opts: &SolveOptions,
) -> Result<Vec<GridCell>, GridError> {
    if dims.0 == dims.1 {
        return Err(GridError::DuplicateDimensions);
    }
    let col_of = |orig: usize| -> Result<usize, GridError> {
        f.vars
            .iter()
            .position(|v| v.tag == VarTag::X(orig))
            .ok_or(GridError::MissingDimension(orig))
    };
    let (ci, cj) = (col_of(dims.0)?, col_of(dims.1)?);
    let ((xlo, xhi), (ylo, yhi)) = window;
    let (nx, ny) = resolution;
    if nx == 0 || ny == 0 || xhi < xlo || yhi < ylo || (xhi == xlo && nx > 1) || (yhi == ylo && ny > 1) {
        return Err(GridError::EmptyWindow);
    }

    // Feasibility probe: zero objective over the same rows.
    let mut probe = f.clone();
    probe.objective.iter_mut().for_each(|c| *c = 0.0);
    probe.objective_constant = 0.0;
    let base = base_session(&probe, opts);

    let coord = |lo: f64, hi: f64, steps: usize, t: usize| -> f64 {
        if steps == 1 {
            lo
        } else {
            lo + (hi - lo) * t as f64 / (steps - 1) as f64
        }
    };

    let mut cells = Vec::with_capacity(nx * ny);
    for ty in 0..ny {
        let y = coord(ylo, yhi, ny, ty);
        for tx in 0..nx {
            let x = coord(xlo, xhi, nx, tx);
            let mut session = base.clone();
            session.set_bounds(ci, x, x);
            session.set_bounds(cj, y, y);
            let r = oa_solve(&mut session, &probe.convex_rows, opts, None);
            cells.push(GridCell { x, y, feasible: r.status == LpStatus::Optimal });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{example1_bound_table, gen_example1};

    #[test]
    fn empty_request_list_gives_empty_output() {
        let m = gen_example1();
        let rows = run_compare(&m, "ex1", &[], &|_| BoundTable::new(), &SolveOptions::default());
        assert!(rows.is_empty());
    }

    #[test]
    fn compare_rows_share_the_optimum() {
        let m = gen_example1();
        let kinds = [
            FormulationKind::BigM,
            FormulationKind::SplitExtended { p: 2 },
            FormulationKind::SplitNonextended { p: 2 },
            FormulationKind::HullExtended, // quadratic -> na
        ];
        let rows = run_compare(&m, "ex1", &kinds, &example1_bound_table, &SolveOptions::default());
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3].status, "na");
        let optima: Vec<f64> = rows.iter().filter(|r| r.status == "ok").map(|r| r.mip_optimum.unwrap()).collect();
        assert!(optima.len() >= 3);
        // min sum x_i subject to one ball: -2 on the origin ball.
        for v in &optima {
            assert!((v + 2.0).abs() < 1e-5, "optimum {v}");
        }
    }

    #[test]
    fn grid_center_points_are_feasible() {
        let m = gen_example1();
        let f = build_formulation(&m, FormulationKind::SplitExtended { p: 4 }, &example1_bound_table).unwrap();
        let cells = project_grid(
            &f,
            (0, 1),
            ((3.0, 3.0), (3.0, 3.0)),
            (1, 1),
            &SolveOptions::default(),
        )
        .unwrap();
        assert_eq!(cells.len(), 1);
        assert!(cells[0].feasible);
    }

    #[test]
    fn grid_rejects_degenerate_requests() {
        let m = gen_example1();
        let f = build_formulation(&m, FormulationKind::BigM, &example1_bound_table).unwrap();
        assert!(matches!(
            project_grid(&f, (0, 0), ((0.0, 1.0), (0.0, 1.0)), (2, 2), &SolveOptions::default()),
            Err(GridError::DuplicateDimensions)
        ));
        assert!(matches!(
            project_grid(&f, (0, 1), ((1.0, 0.0), (0.0, 1.0)), (2, 2), &SolveOptions::default()),
            Err(GridError::EmptyWindow)
        ));
    }
}
