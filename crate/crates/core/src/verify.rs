//! The aggregated invariant suite behind `check`: every closed form is run
//! against its independent oracle and the outcome is collected into a
//! machine-readable report.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{evolve_params, gaussian_dispersions, gaussian_moments, rs_determinant};
use crate::error::Result;
use crate::fock::{series_amplitude_adaptive, FockLabel};
use crate::grid::{cartesian_moments, inner_product, PolarGrid, WaveField};
use crate::polar_ops::{
    apply, commutator_residual, eigenrelation_residual, expectation_closed_form,
    expectation_quadrature, interior_norm, quadrature_dispersions, quadrature_dispersions_grid,
    EigenRelation, ExpectationOp, GridOperator, LadderMode, OperatorKind,
};
use crate::state::{amplitude, coefficient, Chirality, CoherentParams, PolarPoint};

/// One invariant check: its measured residual against the tolerance.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }
}

/// Full verification report for one parameter set.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub alpha: C64,
    pub beta: C64,
    pub chirality: Chirality,
    pub checks: Vec<CheckOutcome>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Deterministic family of smooth interior-supported test fields:
/// `(x+iy)^m (x-iy)^m' exp(-((r^2 - rho0^2)/s^2)^2)`, which vanish fast both
/// at the origin side (via the polynomial) and before the outer boundary.
pub fn smooth_test_fields(grid: &Arc<PolarGrid>, count: usize, seed: u64) -> Vec<WaveField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r_max = grid.r_max();
    (0..count)
        .map(|_| {
            let rho0: f64 = rng.gen_range(0.2..0.4) * r_max;
            let s2: f64 = rng.gen_range(0.75..1.1) * r_max;
            let m: u32 = rng.gen_range(0..4);
            let mq: u32 = rng.gen_range(0..4);
            let c1 = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let field = WaveField::from_fn(grid, |r, phi| {
                let zp = C64::from_polar(r, phi);
                let zm = zp.conj();
                let env = (-((r * r - rho0 * rho0) / s2).powi(2)).exp();
                c1 * zp.powu(m) * zm.powu(mq) * env
            });
            let n = field.norm();
            field.scaled(C64::from(1.0 / n))
        })
        .collect()
}

/// Run the full invariant suite at the given parameters. `corruption`
/// multiplies every sampled amplitude by `1 + c` (a negative-control hook:
/// any nonzero value must fail the normalization check).
pub fn run_checks(
    params: &CoherentParams,
    accuracy: f64,
    corruption: Option<f64>,
) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let grid = PolarGrid::build(params, accuracy)?;
    let corrupt = corruption.unwrap_or(0.0);
    let sample = |p: &CoherentParams, g: &Arc<PolarGrid>| -> WaveField {
        let f = WaveField::sample(p, g);
        if corrupt != 0.0 {
            f.scaled(C64::from(1.0 + corrupt))
        } else {
            f
        }
    };

    // normalization
    let psi = sample(params, &grid);
    let norm = inner_product(&psi, &psi)?.re;
    checks.push(CheckOutcome::new(
        "normalization",
        (norm - 1.0).abs(),
        (5.0 * accuracy).max(1e-12),
    ));

    // closed form vs Fock series at sample points
    let mut worst = 0.0f64;
    for &(r, phi) in &[(0.5, 0.0), (1.5, 1.1), (2.5, -2.0)] {
        let point = PolarPoint::new(r, phi);
        let closed = amplitude(params, point);
        let series = series_amplitude_adaptive(params, point, 1e-11)?;
        worst = worst.max((closed - series.value).norm());
    }
    checks.push(CheckOutcome::new("series_equivalence", worst, 1e-10));

    // coefficient normalization (adaptive caps; geometric tail is negligible
    // well before them for |alpha| <= 0.95)
    let mut total = 0.0;
    for n in 0..400u32 {
        for l in 0..400u32 {
            total += coefficient(params, FockLabel::new(n, l, params.chirality()))?.norm_sqr();
        }
    }
    checks.push(CheckOutcome::new("coefficient_sum", (total - 1.0).abs(), 1e-10));

    // overlaps vs quadrature against a companion state
    let companion = CoherentParams::new(
        params.alpha() * 0.6 + C64::new(0.05, 0.0),
        params.beta() * 0.8 - C64::new(0.3, 0.0),
        params.chirality(),
    )?;
    let pair_grid = PolarGrid::build_for(&[*params, companion], accuracy)?;
    let fa = sample(params, &pair_grid);
    let fb = WaveField::sample(&companion, &pair_grid);
    let quad_same = inner_product(&fb, &fa)?;
    let closed_same = crate::state::overlap_same_chirality(params, &companion)?;
    checks.push(CheckOutcome::new(
        "overlap_same_chirality",
        (quad_same - closed_same).norm(),
        1e-7,
    ));
    let mirrored = CoherentParams::new(
        companion.alpha(),
        companion.beta(),
        params.chirality().flipped(),
    )?;
    let fm = WaveField::sample(&mirrored, &pair_grid);
    let quad_cross = inner_product(&fm, &fa)?;
    let closed_cross = crate::state::overlap_cross_chirality(params, &mirrored)?;
    checks.push(CheckOutcome::new(
        "overlap_cross_chirality",
        (quad_cross - closed_cross).norm(),
        1e-7,
    ));

    // packet moments vs quadrature at two times
    let mut worst_center = 0.0f64;
    let mut worst_disp = 0.0f64;
    let mut worst_rs_closed = 0.0f64;
    let mut worst_rs_quad = 0.0f64;
    for &t in &[0.0, 0.8] {
        let evolved = evolve_params(params, t);
        let f = sample(&evolved, &grid);
        let mo = cartesian_moments(&f);
        let m = gaussian_moments(params, t);
        worst_center = worst_center
            .max((mo.x - m.q[0]).abs())
            .max((mo.y - m.q[1]).abs())
            .max((mo.px - m.p[0]).abs())
            .max((mo.py - m.p[1]).abs());
        let d = gaussian_dispersions(&evolved, t);
        worst_disp = worst_disp
            .max((mo.dx2() - d.dx2).abs())
            .max((mo.dpx2() - d.dpx2).abs())
            .max((mo.dxpx() - d.dxpx).abs())
            .max((mo.dypy() - d.dypy).abs());
        let (rx, ry) = rs_determinant(&d);
        worst_rs_closed = worst_rs_closed.max((rx - 0.25).abs()).max((ry - 0.25).abs());
        let rs_quad = mo.dx2() * mo.dpx2() - mo.dxpx() * mo.dxpx();
        worst_rs_quad = worst_rs_quad.max((rs_quad - 0.25).abs());
    }
    checks.push(CheckOutcome::new("packet_center_vs_quadrature", worst_center, 1e-7));
    checks.push(CheckOutcome::new("dispersions_vs_quadrature", worst_disp, 1e-7));
    checks.push(CheckOutcome::new("rs_determinant_closed", worst_rs_closed, 1e-12));
    checks.push(CheckOutcome::new("rs_determinant_quadrature", worst_rs_quad, 1e-6));

    // energy conservation across the period (quadrature route)
    let mut energies = Vec::new();
    for k in 0..4 {
        let t = 2.0 * PI * k as f64 / 4.0 + 0.13;
        let f = sample(&evolve_params(params, t), &grid);
        energies.push(cartesian_moments(&f).energy());
    }
    let e0 = energies[0];
    let drift = energies
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0, f64::max);
    checks.push(CheckOutcome::new("energy_conservation", drift, 1e-8));

    // eigenvalue relations on the reference grid
    checks.push(CheckOutcome::new(
        "eigenrelation_first",
        eigenrelation_residual(params, EigenRelation::First)?,
        5e-6,
    ));
    checks.push(CheckOutcome::new(
        "eigenrelation_second",
        eigenrelation_residual(params, EigenRelation::Second)?,
        5e-6,
    ));

    // commutators on smooth test fields
    let op_grid = PolarGrid::with_nodes(12.0, 768, 64)?;
    let fields = smooth_test_fields(&op_grid, 6, 20260811);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut worst_comm = 0.0f64;
    for f in &fields {
        worst_comm = worst_comm
            .max(commutator_residual(OperatorKind::A, OperatorKind::ADag, f, one)?)
            .max(commutator_residual(OperatorKind::B, OperatorKind::BDag, f, one)?)
            .max(commutator_residual(OperatorKind::A, OperatorKind::B, f, zero)?)
            .max(commutator_residual(OperatorKind::A, OperatorKind::BDag, f, zero)?);
    }
    checks.push(CheckOutcome::new("commutators", worst_comm, 1e-6));

    // Jz: differential form vs ladder form on a test field (denser grid so
    // the radial stencils resolve the composed second-order action)
    let jz_grid = PolarGrid::with_nodes(12.0, 1280, 64)?;
    let jz_fields = smooth_test_fields(&jz_grid, 1, 20260811);
    let f = &jz_fields[0];
    let jz_diff = apply(&GridOperator::new(OperatorKind::Jz), f)?;
    let aad = apply(
        &GridOperator::new(OperatorKind::ADag),
        &apply(&GridOperator::new(OperatorKind::A), f)?,
    )?;
    let a_ad = apply(
        &GridOperator::new(OperatorKind::A),
        &apply(&GridOperator::new(OperatorKind::ADag), f)?,
    )?;
    let bbd = apply(
        &GridOperator::new(OperatorKind::B),
        &apply(&GridOperator::new(OperatorKind::BDag), f)?,
    )?;
    let _ = aad;
    let jz_ladder = a_ad.sub(&bbd)?.scaled(C64::from(0.5));
    let jz_res = interior_norm(&jz_diff.sub(&jz_ladder)?) / interior_norm(f);
    checks.push(CheckOutcome::new("jz_two_forms", jz_res, 1e-8));

    // quadrature dispersions: closed-form table vs grid moments
    let op_state_grid = crate::polar_ops::reference_grid(params)?;
    let (dq_c, dp_c) = quadrature_dispersions(params, LadderMode::B)?;
    let (dq_g, dp_g) = quadrature_dispersions_grid(params, LadderMode::B, &op_state_grid)?;
    checks.push(CheckOutcome::new(
        "quadrature_dispersions_consistency",
        (dq_c - dq_g).abs().max((dp_c - dp_g).abs()),
        1e-5,
    ));

    // expectation values: closed forms vs quadrature
    use ExpectationOp::*;
    let mut worst_exp = 0.0f64;
    for op in [A, B, ADagA, BDagB, ADagB, ASquared, BSquared, AB, Number] {
        let closed = expectation_closed_form(params, op)?;
        let quad = expectation_quadrature(params, op, &op_state_grid)?;
        let scale = closed.norm().max(1.0);
        worst_exp = worst_exp.max((closed - quad).norm() / scale);
    }
    checks.push(CheckOutcome::new("expectations_vs_quadrature", worst_exp, 1e-6));

    // revival after one period
    let revived = evolve_params(params, 2.0 * PI);
    let mut worst_revival = 0.0f64;
    for &(r, phi) in &[(0.7, 0.3), (2.0, 2.6), (4.0, -1.0)] {
        let p0 = amplitude(params, PolarPoint::new(r, phi));
        let p1 = amplitude(&revived, PolarPoint::new(r, phi));
        worst_revival = worst_revival.max((p0 - p1).norm());
    }
    checks.push(CheckOutcome::new("revival", worst_revival, 1e-12));

    Ok(VerificationReport {
        alpha: params.alpha(),
        beta: params.beta(),
        chirality: params.chirality(),
        checks,
    })
}
