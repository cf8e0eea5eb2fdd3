//! Pass/fail sweeps behind `xyjoint verify`.
//!
//! Every sweep obtains its POVMs through a [`PovmBuilder`], so a deliberately
//! broken builder can be substituted to confirm that the sweeps notice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xyjoint::analysis::{
    classicality_statistic, collapse_pair_probs, csquared_from_patterns, fourier_identity_residual,
    predicted_pattern_probs_from_error_model, visibility_from_probs, ErrorModel,
};
use xyjoint::kd::{kd_from_state, reconstruct_kd, verify_operator_identities};
use xyjoint::povm::{
    build_povm, element_formula, exact_pattern_probs, outcome_at, outcome_probs, pair_outcome_probs,
    visibility_grid, JointPovm, VisibilityTriple,
};
use xyjoint::qubit::{density, eigenstate, min_eigenvalue_hermitian, singlet, Axis, OperatorMatrix, Sign, EIGEN_TOL, EXACT_TOL};
use xyjoint::random::{random_density, random_visibilities};
use xyjoint::{Complex64, Result};

pub type PovmBuilder = fn(VisibilityTriple) -> Result<JointPovm>;

pub const DEFAULT_GRID: usize = 9;
pub const RANDOM_SAMPLES: usize = 10_000;
pub const ROUND_TRIP_SAMPLES: usize = 1_000;

/// The production builder.
pub fn standard_builder(v: VisibilityTriple) -> Result<JointPovm> {
    Ok(build_povm(v))
}

/// Test double with the sign of the Y term flipped in every element.
pub fn y_sign_fault(v: VisibilityTriple) -> Result<JointPovm> {
    let elements = [0, 1, 2, 3].map(|k| {
        let (x, y) = outcome_at(k);
        element_formula(x, -y, v.vx(), v.vy(), Complex64::new(v.vz(), 0.0))
    });
    JointPovm::from_elements(elements, v)
}

/// Test double with the Y sign flipped in the `(+,+)` element only.
pub fn element_sign_fault(v: VisibilityTriple) -> Result<JointPovm> {
    let elements = [0, 1, 2, 3].map(|k| {
        let (x, y) = outcome_at(k);
        let y = if k == 0 { -y } else { y };
        element_formula(x, y, v.vx(), v.vy(), Complex64::new(v.vz(), 0.0))
    });
    JointPovm::from_elements(elements, v)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    /// Cases examined.
    pub cases: usize,
    pub error: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.deviation <= self.tolerance
    }
}

/// Grid points plus the boundary triples `|v| = 1` not on the lattice.
pub fn sweep_points(grid: usize) -> Vec<VisibilityTriple> {
    let r = 1.0 / 3f64.sqrt();
    let mut points = visibility_grid(grid);
    for (vx, vy, vz) in [(r, r, r), (r, r, -r), (0.6, 0.8, 0.0), (0.0, 0.6, -0.8), (0.5, 0.5, 0.5f64.sqrt())] {
        points.push(VisibilityTriple::new(vx, vy, vz).expect("boundary triple"));
    }
    points
}

/// Runs `measure` over `cases`, keeping the worst deviation and the first error.
fn sweep<T>(
    name: &str,
    tolerance: f64,
    cases: impl IntoIterator<Item = T>,
    measure: impl Fn(T) -> Result<f64>,
) -> CheckOutcome {
    let mut out = CheckOutcome { name: name.to_owned(), deviation: 0.0, tolerance, cases: 0, error: None };
    for case in cases {
        out.cases += 1;
        match measure(case) {
            Ok(d) if d.is_nan() => out.deviation = f64::INFINITY,
            Ok(d) => out.deviation = out.deviation.max(d),
            Err(e) => {
                out.error.get_or_insert_with(|| e.to_string());
            }
        }
    }
    out
}

/// All verification checks.
pub fn run_all(builder: PovmBuilder, grid: usize, seed: u64) -> Vec<CheckOutcome> {
    let points = sweep_points(grid);
    let mut out: Vec<CheckOutcome> = verify_operator_identities(seed)
        .checks
        .iter()
        .map(|c| CheckOutcome {
            name: format!("identity:{}", c.name),
            deviation: c.deviation,
            tolerance: c.tolerance,
            cases: 1,
            error: None,
        })
        .collect();

    out.push(sweep("povm-completeness", EXACT_TOL, points.iter().copied(), |v| {
        let povm = builder(v)?;
        let sum = povm.elements().iter().fold(OperatorMatrix::zero(2)?, |acc, m| acc + *m);
        Ok(sum.max_abs_diff(&OperatorMatrix::identity2()))
    }));

    out.push(sweep("povm-min-eigenvalue", EIGEN_TOL, points.iter().copied(), |v| {
        let povm = builder(v)?;
        let expected = (1.0 - v.norm_squared().sqrt()) / 4.0;
        let mut worst: f64 = 0.0;
        for m in povm.elements() {
            worst = worst.max((min_eigenvalue_hermitian(m)? - expected).abs());
        }
        Ok(worst)
    }));

    out.push(sweep("eigenstate-response", EXACT_TOL, points.iter().copied(), |v| {
        let povm = builder(v)?;
        let mut worst: f64 = 0.0;
        for (axis, target) in [(Axis::X, v.vx()), (Axis::Y, v.vy())] {
            for value in Sign::BOTH {
                let probs = outcome_probs(&povm, &density(&eigenstate(axis, value)))?;
                worst = worst.max((visibility_from_probs(&probs, axis, value)? - target).abs());
            }
        }
        Ok(worst)
    }));

    let singlet_rho = density(&singlet());
    let pair_patterns = |v: VisibilityTriple| {
        let povm = builder(v)?;
        collapse_pair_probs(&pair_outcome_probs(&povm, &povm, &singlet_rho)?)
    };

    out.push(sweep("pair-patterns", EXACT_TOL, points.iter().copied(), |v| {
        let stats = pair_patterns(v)?;
        let exact = exact_pattern_probs(v);
        Ok((0..4).map(|r| (stats.e()[r] - exact.e()[r]).abs()).fold(0.0, f64::max))
    }));

    out.push(sweep("negative-c-squared", EXACT_TOL, points.iter().copied(), |v| {
        let c = csquared_from_patterns(&pair_patterns(v)?);
        Ok((c.c_squared + v.vz() * v.vz()).abs())
    }));

    out.push(sweep("quantum-s-nonnegative", EXACT_TOL, points.iter().copied(), |v| {
        let s = classicality_statistic(&pair_patterns(v)?);
        Ok((s - v.vz() * v.vz() / 4.0).abs().max(-s))
    }));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let simplex: Vec<[f64; 4]> = (0..RANDOM_SAMPLES).map(|_| random_simplex_point(&mut rng)).collect();
    out.push(sweep("classical-s-nonpositive", EXACT_TOL, simplex, |w| {
        let m = ErrorModel::new(w.map(|p| Complex64::new(p, 0.0)))?;
        Ok(classicality_statistic(&predicted_pattern_probs_from_error_model(&m)?).max(0.0))
    }));

    let models: Vec<[Complex64; 4]> = (0..RANDOM_SAMPLES).map(|_| random_complex_model(&mut rng)).collect();
    out.push(sweep("fourier-identity", EIGEN_TOL, models, |eta| Ok(fourier_identity_residual(&eta))));

    let cases: Vec<_> = (0..ROUND_TRIP_SAMPLES)
        .map(|_| (random_density(&mut rng), random_visibilities(&mut rng, 0.05)))
        .collect();
    out.push(sweep("kd-round-trip", EIGEN_TOL, cases, |(rho, v)| {
        let probs = outcome_probs(&builder(v)?, &rho)?;
        let kd = reconstruct_kd(&probs, v.vx(), v.vy(), v.error_correlation())?;
        Ok(kd.max_abs_diff(&kd_from_state(&rho)?))
    }));

    out
}

/// Uniform point on the probability simplex over four error patterns.
pub fn random_simplex_point<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    let e: [f64; 4] = [0; 4].map(|_| -(1.0 - rng.gen::<f64>()).ln());
    let total: f64 = e.iter().sum();
    e.map(|x| x / total)
}

/// Complex `η` normalized to `Σ η = 1`, with no other constraint.
pub fn random_complex_model<R: Rng + ?Sized>(rng: &mut R) -> [Complex64; 4] {
    let mut eta = [Complex64::new(0.0, 0.0); 4];
    for z in eta.iter_mut().take(3) {
        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    eta[3] = Complex64::new(1.0, 0.0) - eta[0] - eta[1] - eta[2];
    eta
}
