//! End-to-end acceptance checks, one test per guarantee the crate makes:
//! frozen sensitivity tables, bound-over-error dominance for eigenvalue and
//! source problems, two-sided dual-norm enclosures, adaptive refinement
//! behavior on the two-charge benchmark, structural identities, and
//! byte-level determinism of the experiment tables.
//!
//! Every test prints a single PASS/FAIL scorecard line (visible with
//! `cargo test -- --nocapture`, or on failure) before asserting, so a full
//! run reads as a checklist.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::Instant;

use lcao_bounds::driver::{
    adaptive_refine, run_experiment, uniform_sizes, Cell, EigenSweep, ExperimentConfig,
    ExperimentKind, SourceSweep,
};
use lcao_bounds::estimator::{gap_constants, partial_dual_norm, GapMode};
use lcao_bounds::grid::Grid;
use lcao_bounds::lcao::{
    apply_a_to_basis, assemble_galerkin, basis_inner_products, galerkin_source_solve,
    hermite_function, overlap_drop_tol, source_projection, AOBasis,
};
use lcao_bounds::model::{
    assemble_atomic_operator, reference_solve_eigen, MolecularSystem, ReferenceSolution,
};
use lcao_bounds::partition::{constant_c_a, CaMode, PartitionOfUnity};
use lcao_bounds::Config64;

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Two-decimal reference entries are truncated prints, so accept either a
/// 2% relative miss or one hundredth absolute (a print ulp).
fn close_to_print(got: f64, want: f64) -> bool {
    (got - want).abs() <= 0.02 * want.abs() || (got - want).abs() <= 0.01
}

/// Shared molecular benchmark for the dominance sweeps: unit charges,
/// moderate shift, atomic shifts below it.
fn dominance_config(kind: ExperimentKind, ell: f64) -> Config64 {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.sigma = 4.0;
    cfg.sigma_1 = 3.0;
    cfg.sigma_2 = 3.0;
    cfg.sigma_3 = 1.0;
    cfg.ell = ell;
    cfg.j_modes = 17;
    // Hermite degrees up to 29 per atom oscillate out to |y| ≈ √59 ≈ 7.7,
    // so the quadrature box must extend well past ±(1 + 7.7).
    cfg.box_mult = 14.0;
    cfg.n_grid = 5601;
    cfg.n_min = 4;
    cfg.n_max = 60;
    cfg
}

/// The higher-shift configuration the adaptive benchmark runs at.
fn adaptive_config(z_left: f64, z_right: f64) -> Config64 {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Adaptive);
    cfg.z_left = z_left;
    cfg.z_right = z_right;
    cfg.sigma = 7.0;
    cfg.sigma_1 = 4.0;
    cfg.sigma_2 = 4.0;
    cfg.sigma_3 = 1.0;
    cfg.ell = 0.3;
    cfg.j_modes = 17;
    cfg.box_mult = 14.0;
    cfg.n_grid = 5601;
    cfg.n1 = 5;
    cfg.n2 = 5;
    cfg
}

/// Partition-constant sensitivity table: C over the (ℓ, ς_a) grid at unit
/// charges, ς = 4, optimal c_A, against frozen two-decimal references.
#[test]
fn constants_sensitivity_table() {
    let t0 = Instant::now();
    let cfg = Config64::new(ExperimentKind::Constants);
    let table = run_experiment(&cfg).expect("constants run");
    // Rows are ℓ-major over ℓ ∈ {0.1, 0.3, 0.5, 0.8, 0.9} × ς_a ∈ {5, 3, 2, 1}.
    const EXPECTED: [f64; 20] = [
        514.14, 513.32, 512.91, 512.50, //
        8.07, 7.25, 6.84, 6.43, //
        2.72, 1.90, 1.49, 1.16, //
        2.16, 1.34, 1.00, 1.00, //
        2.10, 1.28, 1.00, 1.00,
    ];
    assert_eq!(table.rows.len(), EXPECTED.len());
    let mut worst = 0.0f64;
    let mut misses = 0usize;
    for (row, &want) in table.rows.iter().zip(&EXPECTED) {
        let got = match row[2] {
            Cell::Value(v) => v,
            ref c => panic!("C column holds {c:?}"),
        };
        // Entries printed as 1.00 sit at the clamp C = 1; compare absolutely.
        let ok = if want == 1.00 {
            (got - want).abs() <= 0.02
        } else {
            close_to_print(got, want)
        };
        if !ok {
            misses += 1;
        }
        worst = worst.max((got - want).abs() / want);
    }
    let dt = t0.elapsed();
    let ok = misses == 0 && dt.as_secs() < 60;
    println!(
        "{}: partition-constant table, {}/20 entries within tolerance, worst rel dev {:.2}%, {:.1} s",
        status(ok),
        20 - misses,
        100.0 * worst,
        dt.as_secs_f64()
    );
    assert!(ok, "{misses} table entries off, elapsed {dt:?}");
}

/// Gap-constant sensitivity table: 1/γ₁ and optimal c_A for ς ∈ {3,…,8}
/// at unit charges and unit atomic/far shifts.
#[test]
fn gap_sensitivity_table() {
    let t0 = Instant::now();
    const EXPECTED: [(f64, f64, f64); 6] = [
        (3.0, 15.59, 0.83),
        (4.0, 35.97, 0.64),
        (5.0, 64.74, 0.54),
        (6.0, 101.90, 0.47),
        (7.0, 147.45, 0.43),
        (8.0, 201.40, 0.39),
    ];
    let grid = Grid::new(-5.0, 5.0, 2001).unwrap();
    let mut misses = Vec::new();
    for &(sigma, want_inv_gamma, want_c_a) in &EXPECTED {
        let sys =
            MolecularSystem::new(1.0, 1.0, 1.0, FRAC_1_SQRT_2, sigma, 1.0, 1.0, 1.0).unwrap();
        let (lambda_1, lambda_2) = match reference_solve_eigen(&grid, &sys).unwrap() {
            ReferenceSolution::Eigen {
                lambda_1, lambda_2, ..
            } => (lambda_1, lambda_2),
            other => panic!("eigen reference expected, got {other:?}"),
        };
        let gap = gap_constants(lambda_1, lambda_2, GapMode::Oracle).unwrap();
        let inv_gamma = gap.gamma.recip();
        let c_a = constant_c_a(&sys, CaMode::Optimal, Some(lambda_1)).unwrap();
        if !close_to_print(inv_gamma, want_inv_gamma) {
            misses.push(format!("1/γ(ς={sigma}) = {inv_gamma:.4} vs {want_inv_gamma}"));
        }
        if !close_to_print(c_a, want_c_a) {
            misses.push(format!("c_A(ς={sigma}) = {c_a:.4} vs {want_c_a}"));
        }
    }
    let dt = t0.elapsed();
    let ok = misses.is_empty() && dt.as_secs() < 60;
    println!(
        "{}: gap-constant table, {}/12 entries within tolerance, {:.1} s",
        status(ok),
        12 - misses.len(),
        dt.as_secs_f64()
    );
    assert!(ok, "{misses:?}, elapsed {dt:?}");
}

/// Eigenvalue sweep dominance: at every basis size the energy bound covers
/// the true energy error and the eigenvalue bound covers the nonnegative
/// eigenvalue error, in the oracle and the Weyl gap modes; fully guaranteed
/// constants (Weyl gap + potential-floor c_A) only loosen the bounds.
#[test]
fn eigenvalue_bound_dominance_sweep() {
    let t0 = Instant::now();
    let totals: Vec<usize> = (4..=60).step_by(2).collect();
    let mut ok = true;
    let mut min_energy_ratio = f64::INFINITY;
    let mut min_eig_ratio = f64::INFINITY;
    let mut min_guard_ratio = f64::INFINITY;
    for &ell in &[0.4, 0.8] {
        let mut sweeps = Vec::new();
        for (gap_mode, ca_mode) in [
            (GapMode::Oracle, CaMode::Optimal),
            (GapMode::Weyl, CaMode::Optimal),
            (GapMode::Weyl, CaMode::Guaranteed),
        ] {
            let mut cfg = dominance_config(ExperimentKind::EigSweep, ell);
            cfg.gap_mode = gap_mode;
            cfg.ca_mode = ca_mode;
            sweeps.push(EigenSweep::new(&cfg).expect("sweep setup"));
        }
        for &total in &totals {
            let (n1, n2) = uniform_sizes(total);
            let points: Vec<_> = sweeps
                .iter()
                .map(|s| s.point(n1, n2).expect("sweep point"))
                .collect();
            for p in &points {
                ok &= p.bound_energy >= p.err_energy;
                ok &= p.err_eig >= 0.0 && p.err_eig <= p.bound_eig;
                min_energy_ratio = min_energy_ratio.min(p.bound_energy / p.err_energy);
                min_eig_ratio = min_eig_ratio.min(p.bound_eig / p.err_eig);
            }
            // Guaranteed constants must dominate the oracle bound pointwise.
            ok &= points[2].bound_energy >= points[0].bound_energy;
            min_guard_ratio =
                min_guard_ratio.min(points[2].bound_energy / points[0].bound_energy);
        }
    }
    let dt = t0.elapsed();
    ok &= dt.as_secs() < 600;
    println!(
        "{}: eigenvalue dominance at {} sweep points; min bound/err (energy {:.2}, eigenvalue {:.2}), min guaranteed/oracle {:.2}, {:.1} s",
        status(ok),
        2 * 3 * totals.len(),
        min_energy_ratio,
        min_eig_ratio,
        min_guard_ratio,
        dt.as_secs_f64()
    );
    assert!(
        ok,
        "dominance violated: energy {min_energy_ratio}, eig {min_eig_ratio}, \
         guaranteed/oracle {min_guard_ratio}, elapsed {dt:?}"
    );
}

/// Source-problem dominance over the same sweep, plus the synthetic case
/// where the right-hand side is A applied to a basis function: the discrete
/// solve then reproduces it and the bound collapses to quadrature noise.
#[test]
fn source_bound_dominance() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut min_ratio = f64::INFINITY;
    for &ell in &[0.4, 0.8] {
        let sweep = SourceSweep::new(&dominance_config(ExperimentKind::SourceSweep, ell))
            .expect("source sweep setup");
        for total in (4..=60).step_by(2) {
            let (n1, n2) = uniform_sizes(total);
            let p = sweep.point(n1, n2).expect("source point");
            ok &= p.bound_energy >= p.err_energy;
            min_ratio = min_ratio.min(p.bound_energy / p.err_energy);
        }
    }

    // Zero-residual synthetic: f = A h₀(· − c₁) lies in the discrete range.
    // A small diatomic basis keeps the overlap well-conditioned, so the
    // recovered solution is the basis function itself to solver precision.
    let cfg = dominance_config(ExperimentKind::SourceSweep, 0.4);
    let grid = cfg.grid().unwrap();
    let sys = cfg.system().unwrap();
    let basis = AOBasis::diatomic(&sys, 4, 4).unwrap();
    let mats = assemble_galerkin(&grid, &sys, &basis).unwrap();
    let f_grid = grid.sample(|x| apply_a_to_basis(&sys, sys.center(0), 0, x));
    let load = basis_inner_products(&grid, &basis, &f_grid).unwrap();
    let f_chi = source_projection(&mats, &load, overlap_drop_tol()).unwrap();
    let sol = galerkin_source_solve(&mats, &f_chi, overlap_drop_tol()).unwrap();
    let ctx = lcao_bounds::estimator::EstimatorContext::new(
        &grid,
        &sys,
        cfg.ell,
        cfg.j_modes,
        false,
        CaMode::Guaranteed,
        None,
    )
    .unwrap();
    let synthetic = ctx.bound_source(&grid, &sol, &f_grid).unwrap();
    ok &= synthetic.bound_energy <= 1e-5;

    let dt = t0.elapsed();
    println!(
        "{}: source dominance at 58 sweep points (min bound/err {:.2}); synthetic zero-residual bound {:.2e}, {:.1} s",
        status(ok),
        min_ratio,
        synthetic.bound_energy,
        dt.as_secs_f64()
    );
    assert!(
        ok,
        "min bound/err {min_ratio}, synthetic bound {}",
        synthetic.bound_energy
    );
}

/// Dual-norm sandwich: for random ball-supported vectors the spectral
/// expansion brackets the directly solved ⟨v, A_k⁻¹ v⟩ from both sides, and
/// the bracket tightens monotonically in the truncation degree.
#[test]
fn dual_norm_enclosure_sandwich() {
    let cfg = dominance_config(ExperimentKind::EigSweep, 0.4);
    let grid = cfg.grid().unwrap();
    let sys = cfg.system().unwrap();
    let pu = PartitionOfUnity::new(sys.r, cfg.ell).unwrap();
    let mut ok = true;
    let mut worst_gap_ratio = 0.0f64;
    for k in 0..2 {
        let full = lcao_bounds::estimator::atomic_spectral_basis(
            &grid,
            &sys,
            k,
            pu.ball_radius(),
            17,
        )
        .unwrap();
        let op = assemble_atomic_operator(
            &grid,
            &full.sub,
            sys.charge(k),
            sys.alpha,
            sys.atomic_shift(k),
        )
        .unwrap();
        for rep in 0..20 {
            let v = wavy_ball_vector(&grid, &full.sub, 1000 * (k as u64 + 1) + rep);
            let v_int = &v[full.sub.lo + 1..full.sub.hi];
            let w = op.solve(v_int).unwrap();
            let oracle: f64 =
                grid.h() * v_int.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let mut last_gap = f64::INFINITY;
            let mut first_gap = 0.0;
            for (step, j) in [5usize, 9, 13, 17].into_iter().enumerate() {
                let parts =
                    partial_dual_norm(&grid, &full.truncated(j).unwrap(), &v, false).unwrap();
                let slack = 1e-10 * oracle.abs().max(1.0);
                ok &= parts.lower <= oracle + slack;
                ok &= oracle <= parts.upper + slack;
                let gap = parts.upper - parts.lower;
                ok &= gap <= last_gap;
                last_gap = gap;
                if step == 0 {
                    first_gap = gap;
                }
            }
            worst_gap_ratio = worst_gap_ratio.max(last_gap / first_gap);
        }
    }
    println!(
        "{}: dual-norm sandwich holds for 40 random ball vectors; widest final/initial bracket ratio {:.3}",
        status(ok),
        worst_gap_ratio
    );
    assert!(ok, "sandwich or monotonicity violated");
    assert!(
        worst_gap_ratio < 0.5,
        "bracket barely tightens: {worst_gap_ratio}"
    );
}

/// Distinct charges: the deep left well keeps the left indicator dominant,
/// so refinement feeds atom 1 only, and the adaptive trace beats uniform
/// refinement by better than a factor of two at the final budget.
#[test]
fn adaptive_benchmark_distinct_charges() {
    let t0 = Instant::now();
    let cfg = adaptive_config(3.0, 1.0);
    let trace = adaptive_refine(&cfg, (5, 5), 58).expect("adaptive run");
    let mut ok = trace.notes.is_empty();
    for s in &trace.steps {
        ok &= s.n2 == 5;
        ok &= s.bound_energy >= s.err_energy;
    }
    let last = trace.steps.last().expect("nonempty trace");
    ok &= last.n1 == 53 && last.n2 == 5;

    let mut sweep_cfg = cfg.clone();
    sweep_cfg.kind = ExperimentKind::EigSweep;
    let sweep = EigenSweep::new(&sweep_cfg).expect("uniform baseline");
    let uniform = sweep.point(29, 29).expect("uniform point");
    let ratio = last.err_energy / uniform.err_energy;
    ok &= ratio <= 0.5;
    let dt = t0.elapsed();
    println!(
        "{}: distinct-charge refinement fixed n2 = 5 up to (53, 5); final error {:.3e} vs uniform {:.3e} (ratio {:.3}), {:.1} s",
        status(ok),
        last.err_energy,
        uniform.err_energy,
        ratio,
        dt.as_secs_f64()
    );
    assert!(ok, "final state ({}, {}), ratio {ratio}", last.n1, last.n2);
}

/// Identical charges: the refinement is expected to stay within one basis
/// function of the diagonal.
///
/// This currently fails, and the failure is structural rather than a bug in
/// the marking rule: the overlap factorization pivots greedily on the
/// largest remaining diagonal, and same-atom Hermite functions are mutually
/// orthonormal, so whichever atom is pivoted first keeps its remaining
/// diagonals at exactly 1 while every cross overlap shrinks the other
/// atom's. All columns of one atom are therefore always eliminated first
/// and every dropped near-dependent column belongs to the other atom — at
/// (20, 20) the retained set is 20 left + 8 right. The indicators honestly
/// track that pruned effective basis (nominal (7, 8) behaves like (7, 6)),
/// so the argmax marking feeds the pruned atom and the nominal sizes drift
/// apart (max |n1 − n2| = 4) even though the true-error curve stays on the
/// uniform diagonal and repeatedly passes through the balanced states
/// (12, 12), (14, 14), (20, 20) with identical errors.
#[test]
fn adaptive_benchmark_identical_charges() {
    let cfg = adaptive_config(1.0, 1.0);
    let trace = adaptive_refine(&cfg, (5, 5), 40).expect("adaptive run");
    let mut max_gap = 0usize;
    let mut state_at_max = (0, 0);
    for s in &trace.steps {
        let gap = s.n1.abs_diff(s.n2);
        if gap > max_gap {
            max_gap = gap;
            state_at_max = (s.n1, s.n2);
        }
    }
    let ok = max_gap <= 1;
    println!(
        "{}: identical-charge refinement balance |n1 - n2| <= 1; observed max {} at {:?}",
        status(ok),
        max_gap,
        state_at_max
    );
    assert!(
        ok,
        "nominal sizes drifted to {state_at_max:?}: greedy diagonal pivoting always \
         exhausts one atom's (internally orthonormal) columns first, so overlap \
         pruning removes columns of the other atom only; the error indicators track \
         the pruned effective basis and keep feeding the pruned atom"
    );
}

/// Structural identities: the partition sums to one, a one-atom Hermite
/// basis is orthonormal under the quadrature, the partition derivatives
/// match finite differences, and the closed-form operator application
/// matches a second-order finite-difference application at order two.
#[test]
fn structural_invariants() {
    let mut ok = true;

    // Partition of unity sums to 1 everywhere, both geometries.
    let grid5 = Grid::new(-5.0, 5.0, 2001).unwrap();
    let mut worst_sum = 0.0f64;
    for &ell in &[0.4f64, 0.8] {
        let pu = PartitionOfUnity::new(1.0, ell).unwrap();
        for &x in grid5.points() {
            let s = pu.eval(x);
            worst_sum = worst_sum.max((s.p[0] + s.p[1] + s.p[2] - 1.0).abs());
        }
    }
    ok &= worst_sum <= 1e-12;

    // Single-atom overlap is the identity to quadrature accuracy at n = 40.
    let cfg = dominance_config(ExperimentKind::EigSweep, 0.4);
    let grid = cfg.grid().unwrap();
    let sys = cfg.system().unwrap();
    let single = AOBasis::single(sys.center(0), 40).unwrap();
    let mats = assemble_galerkin(&grid, &sys, &single).unwrap();
    let mut worst_ortho = 0.0f64;
    for i in 0..40 {
        for j in 0..40 {
            let want = if i == j { 1.0 } else { 0.0 };
            worst_ortho = worst_ortho.max((mats.s_chi.get(i, j) - want).abs());
        }
    }
    ok &= worst_ortho <= 1e-8;

    // Analytic partition derivatives against central differences.
    let pu = PartitionOfUnity::new(1.0f64, 0.4).unwrap();
    let (mut worst_dp, mut worst_ddp) = (0.0f64, 0.0f64);
    let mut x = -3.0f64;
    while x <= 3.0 {
        let s = pu.eval(x);
        let d1 = 1e-5;
        let d2 = 3e-5;
        for k in 0..3 {
            let fd1 = (pu.eval(x + d1).p[k] - pu.eval(x - d1).p[k]) / (2.0 * d1);
            worst_dp = worst_dp.max((fd1 - s.dp[k]).abs());
            let fd2 = (pu.eval(x + d2).p[k] - 2.0 * s.p[k] + pu.eval(x - d2).p[k]) / (d2 * d2);
            worst_ddp = worst_ddp.max((fd2 - s.ddp[k]).abs());
        }
        x += 0.0137;
    }
    ok &= worst_dp <= 1e-6 && worst_ddp <= 1e-6;

    // The closed-form (A χ)(x) matches a finite-difference application of
    // the operator at second order in the step.
    let err_at = |h: f64| -> f64 {
        let chi = |x: f64| hermite_function(3, x - sys.center(0));
        let mut worst = 0.0f64;
        let mut x = -4.0;
        while x <= 2.0 {
            let fd = -0.5 * (chi(x + h) - 2.0 * chi(x) + chi(x - h)) / (h * h)
                + (sys.potential_total(x) + sys.sigma) * chi(x);
            worst = worst.max((fd - apply_a_to_basis(&sys, sys.center(0), 3, x)).abs());
            x += 0.0113;
        }
        worst
    };
    let order = (err_at(0.02) / err_at(0.01)).log2();
    ok &= (order - 2.0).abs() <= 0.1;

    println!(
        "{}: structural identities (partition sum dev {:.1e}, overlap dev {:.1e}, dp dev {:.1e}, ddp dev {:.1e}, FD order {:.3})",
        status(ok),
        worst_sum,
        worst_ortho,
        worst_dp,
        worst_ddp,
        order
    );
    assert!(ok, "sum {worst_sum:e}, ortho {worst_ortho:e}, dp {worst_dp:e}, ddp {worst_ddp:e}, order {order}");
}

/// Re-running a sweep must reproduce the table byte for byte.
#[test]
fn deterministic_output() {
    let cfg = dominance_config(ExperimentKind::EigSweep, 0.4);
    let first = run_experiment(&cfg).expect("first run").to_csv();
    let second = run_experiment(&cfg).expect("second run").to_csv();
    let ok = first == second && first.starts_with("N,n1,n2,lambda_1N,");
    println!(
        "{}: repeated sweep emits byte-identical CSV ({} bytes)",
        status(ok),
        first.len()
    );
    assert!(ok, "tables differ or header malformed");
}

/// Deterministic smooth test vector supported on the open ball interior.
fn wavy_ball_vector(
    grid: &Grid<f64>,
    sub: &lcao_bounds::model::Subdomain<f64>,
    seed: u64,
) -> Vec<f64> {
    let mut state = seed | 1;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
    };
    let amps: Vec<f64> = (0..6).map(|_| next()).collect();
    let mut v = vec![0.0; grid.n_points()];
    let width = (sub.hi - sub.lo) as f64;
    for i in sub.lo + 1..sub.hi {
        let t = (i - sub.lo) as f64 / width;
        v[i] = amps
            .iter()
            .enumerate()
            .map(|(m, a)| a * ((m + 1) as f64 * PI * t).sin())
            .sum();
    }
    v
}
