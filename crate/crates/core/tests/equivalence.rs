//! Integer-feasibility equivalence of the formulations (sampling) and
//! relaxation-value checks against geometric oracles.

mod common;

use common::{
    admissible_selections, affine_mip_oracle, example1_bigm_relaxation_oracle, hull_value_oracle,
};
use psplit::bounds::BoundTable;
use psplit::flatmip::{FlatMip, VarKind, VarTag};
use psplit::model::{DisjunctiveModel, LinearObjective, Sense};
use psplit::problems::{
    example1_bound_table, gen_example1, random_affine_disjunction, random_quadratic_two_term,
};
use psplit::reformulate::{
    build_bigm, build_hull_extended, build_psplit_extended, build_psplit_nonextended,
    even_partitions, NonExtendedOptions,
};
use psplit::solver::{
    branch_and_bound, solve_relaxation, solve_relaxation_with, LpStatus, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Membership of `x` in the model with the given disjunct selection: box,
/// global rows and every constraint of each selected disjunct.
fn model_feasible_at(model: &DisjunctiveModel, selection: &[usize], x: &[f64]) -> bool {
    for (b, &xi) in model.variables.iter().zip(x) {
        if !b.contains(xi, TOL) {
            return false;
        }
    }
    for row in &model.global_linear {
        let lhs: f64 = row.coeffs.iter().map(|(v, c)| c * x[v.0]).sum();
        let ok = match row.sense {
            Sense::Le => lhs <= row.rhs + TOL,
            Sense::Ge => lhs >= row.rhs - TOL,
            Sense::Eq => (lhs - row.rhs).abs() <= TOL,
        };
        if !ok {
            return false;
        }
    }
    model
        .disjunctions
        .iter()
        .zip(selection)
        .all(|(d, &l)| d.disjuncts[l].satisfied_at(x, TOL).unwrap())
}

/// Margin of `x` to the nearest constraint boundary that the selection cares
/// about; points closer than the caller's guard are skipped to keep the
/// comparison tolerance-proof.
fn selection_margin(model: &DisjunctiveModel, selection: &[usize], x: &[f64]) -> f64 {
    let mut margin = f64::INFINITY;
    for (d, &l) in model.disjunctions.iter().zip(selection) {
        for c in &d.disjuncts[l].constraints {
            margin = margin.min(c.evaluate(x).unwrap().abs());
        }
    }
    margin
}

/// Does the formulation admit the fixed `(x, lambda)` assignment? Variables
/// tagged as originals and selectors are pinned; the probe then asks for any
/// completion of the auxiliaries.
fn flatmip_admits(f: &FlatMip, x: &[f64], selection: &[usize]) -> bool {
    let mut probe = f.clone();
    for var in &mut probe.vars {
        match var.tag {
            VarTag::X(i) => {
                var.lower = x[i];
                var.upper = x[i];
            }
            VarTag::Lambda { disjunction, disjunct } => {
                let v = if selection[disjunction] == disjunct { 1.0 } else { 0.0 };
                var.lower = v;
                var.upper = v;
                var.kind = VarKind::Continuous;
            }
            _ => {}
        }
    }
    probe.objective.iter_mut().for_each(|c| *c = 0.0);
    probe.objective_constant = 0.0;
    let opts = SolveOptions { oa_tol: 1e-8, ..SolveOptions::default() };
    solve_relaxation_with(&probe, &opts).status == LpStatus::Optimal
}

fn sample_point(model: &DisjunctiveModel, rng: &mut ChaCha8Rng) -> Vec<f64> {
    model
        .variables
        .iter()
        .map(|b| if b.upper > b.lower { rng.gen_range(b.lower..=b.upper) } else { b.lower })
        .collect()
}

fn check_sampling_equivalence(model: &DisjunctiveModel, f: &FlatMip, points: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    for sel in admissible_selections(model) {
        for _ in 0..points {
            let x = sample_point(model, &mut rng);
            if selection_margin(model, &sel, &x) < 1e-7 {
                continue;
            }
            let expected = model_feasible_at(model, &sel, &x);
            let got = flatmip_admits(f, &x, &sel);
            assert_eq!(
                got, expected,
                "formulation {} disagrees at x={x:?} selection={sel:?}",
                f.name
            );
            checked += 1;
        }
    }
    assert!(checked > points / 2, "too few usable samples");
}

#[test]
fn sampling_equivalence_affine_three_term() {
    let model = random_affine_disjunction(101, 3, 3);
    let table = BoundTable::new();
    let parts = even_partitions(&model, 2).unwrap();
    let forms = vec![
        build_bigm(&model, &table).unwrap(),
        build_psplit_extended(&model, &parts, &table).unwrap(),
        build_hull_extended(&model).unwrap(),
    ];
    for f in &forms {
        check_sampling_equivalence(&model, f, 250, 7);
    }
}

#[test]
fn sampling_equivalence_quadratic_two_term() {
    let model = random_quadratic_two_term(55, 3);
    let table = BoundTable::new();
    let parts = even_partitions(&model, 2).unwrap();
    let forms = vec![
        build_bigm(&model, &table).unwrap(),
        build_psplit_extended(&model, &parts, &table).unwrap(),
        build_psplit_nonextended(&model, &parts, &table, NonExtendedOptions::default()).unwrap(),
    ];
    for f in &forms {
        check_sampling_equivalence(&model, f, 250, 11);
    }
}

#[test]
fn sampling_equivalence_example1_with_analytic_bounds() {
    let model = gen_example1();
    let parts = even_partitions(&model, 4).unwrap();
    let table = example1_bound_table(&parts);
    let f = build_psplit_extended(&model, &parts, &table).unwrap();
    check_sampling_equivalence(&model, &f, 150, 13);
}

#[test]
fn bigm_relaxation_matches_interval_scan_oracle() {
    // Symmetric objective: the relaxation is tight at the selector extreme.
    let model = gen_example1();
    let parts1 = even_partitions(&model, 1).unwrap();
    let table = example1_bound_table(&parts1);
    let f = build_bigm(&model, &table).unwrap();
    let opts = SolveOptions { oa_tol: 1e-9, oa_max_iters: 500, ..SolveOptions::default() };
    let got = solve_relaxation_with(&f, &opts);
    assert_eq!(got.status, LpStatus::Optimal);
    let want = example1_bigm_relaxation_oracle(1.0, 1.0);
    assert!((got.objective - want).abs() < 1e-5, "OA {} vs scan {want}", got.objective);
}

#[test]
fn bigm_relaxation_is_strictly_weaker_on_skew_objective() {
    // c = (1, 1, -1, -1): per-disjunct minima are both -2 (the hull value);
    // the big-M relaxation dips far below it.
    let mut model = gen_example1();
    model.objective = LinearObjective::new(vec![1.0, 1.0, -1.0, -1.0], 0.0);
    let parts1 = even_partitions(&model, 1).unwrap();
    let table = example1_bound_table(&parts1);
    let f = build_bigm(&model, &table).unwrap();
    let opts = SolveOptions { oa_tol: 1e-9, oa_max_iters: 500, ..SolveOptions::default() };
    let got = solve_relaxation_with(&f, &opts);
    assert_eq!(got.status, LpStatus::Optimal);
    let want = example1_bigm_relaxation_oracle(1.0, -1.0);
    assert!((got.objective - want).abs() < 1e-5, "OA {} vs scan {want}", got.objective);
    let hull_value = -2.0;
    assert!(
        got.objective < hull_value - 0.5,
        "big-M relaxation {} should be strictly below the hull value {hull_value}",
        got.objective
    );
}

#[test]
fn four_split_relaxation_not_below_bigm_for_min_x1() {
    // Cross-check of the monotonicity direction used in the figures: for
    // min x1 the big-M relaxation already sits on the box bound.
    let mut model = gen_example1();
    model.objective = LinearObjective::new(vec![1.0, 0.0, 0.0, 0.0], 0.0);
    let parts1 = even_partitions(&model, 1).unwrap();
    let bigm = build_bigm(&model, &example1_bound_table(&parts1)).unwrap();
    let parts4 = even_partitions(&model, 4).unwrap();
    let split = build_psplit_extended(&model, &parts4, &example1_bound_table(&parts4)).unwrap();
    let a = solve_relaxation(&bigm);
    let b = solve_relaxation(&split);
    assert!((a.objective + 1.0).abs() < 1e-6, "big-M relaxation should hit the box bound");
    assert!(b.objective >= a.objective - 1e-6);
}

#[test]
fn formulations_agree_with_brute_force_on_random_affine_models() {
    let opts = SolveOptions::default();
    for seed in [3u64, 17, 29] {
        let model = random_affine_disjunction(seed, 4, 2);
        let oracle = affine_mip_oracle(&model).expect("nonempty disjuncts");
        let table = BoundTable::new();
        let parts2 = even_partitions(&model, 2).unwrap();
        let candidates = vec![
            build_bigm(&model, &table).unwrap(),
            build_psplit_extended(&model, &parts2, &table).unwrap(),
            build_psplit_nonextended(&model, &parts2, &table, NonExtendedOptions::default()).unwrap(),
            build_hull_extended(&model).unwrap(),
        ];
        for f in candidates {
            let rep = branch_and_bound(&f, &opts);
            let inc = rep.incumbent.unwrap_or(f64::NAN);
            assert!(
                (inc - oracle).abs() <= 1e-6 * (1.0 + oracle.abs()),
                "seed {seed} formulation {}: {} vs oracle {}",
                f.name,
                inc,
                oracle
            );
            assert!(rep.best_bound <= inc + 1e-6);
        }
    }
}

#[test]
fn hull_relaxation_equals_disjunct_enumeration() {
    for seed in [5u64, 23] {
        let model = random_affine_disjunction(seed, 3, 2);
        let hull = build_hull_extended(&model).unwrap();
        let relax = solve_relaxation(&hull);
        let oracle = hull_value_oracle(&model).expect("nonempty");
        assert!(
            (relax.objective - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
            "seed {seed}: hull LP {} vs per-disjunct oracle {}",
            relax.objective,
            oracle
        );
    }
}
