//! Kirkwood-Dirac quasi-probabilities of X and Y.
//!
//! Convention: `ρ(x, y) = ⟨x|y⟩⟨y|ρ|x⟩ = Tr(P_x P_y ρ)`, with the X projector
//! to the left. The transposed ordering conjugates every entry. Under this
//! convention `ρ(+,+)` of the Z+ state is `(1 + i)/4`, and a POVM with
//! visibilities `(vx, vy, vz)` acts on the distribution as the error model
//! with `C = -i·vz`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analysis::{character_sign, error_model_from_visibilities, ErrorModel, CHAR_C, CHAR_VX, CHAR_VY};
use crate::error::{Error, Result};
use crate::povm::{
    element_formula, ideal_operator, outcome_at, outcome_index, pair_outcome_at, ProbTable4,
};
use crate::qubit::{
    eigenstate, pauli, trace_product, validate_density, Axis, OperatorMatrix, Sign, StateVector,
    EIGEN_TOL, EXACT_TOL, I, ZERO,
};
use crate::random::random_density;

/// Visibilities with modulus below this are treated as singular.
pub const SINGULAR_TOL: f64 = 1e-6;

/// Single-qubit KD distribution over outcome cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDDistribution {
    entries: [Complex64; 4],
}

impl KDDistribution {
    pub fn from_entries(entries: [Complex64; 4]) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[Complex64; 4] {
        &self.entries
    }

    pub fn get(&self, x: Sign, y: Sign) -> Complex64 {
        self.entries[outcome_index(x, y)]
    }

    pub fn total(&self) -> Complex64 {
        self.entries.iter().sum()
    }

    /// `Σ_y ρ(x, y)`.
    pub fn x_marginal(&self, x: Sign) -> Complex64 {
        self.get(x, Sign::Plus) + self.get(x, Sign::Minus)
    }

    /// `Σ_x ρ(x, y)`.
    pub fn y_marginal(&self, y: Sign) -> Complex64 {
        self.get(Sign::Plus, y) + self.get(Sign::Minus, y)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &KDDistribution) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Normalization and real marginals, within `tol`.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let total = self.total();
        if (total - 1.0).norm() > tol {
            return Err(Error::Inconsistent(format!("KD entries sum to {total}")));
        }
        for s in Sign::BOTH {
            for m in [self.x_marginal(s), self.y_marginal(s)] {
                if m.im.abs() > tol {
                    return Err(Error::Inconsistent(format!("KD marginal {m} is not real")));
                }
            }
        }
        Ok(())
    }
}

/// Two-qubit KD distribution over pair cells `(x1, y1, x2, y2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairKDDistribution {
    entries: [Complex64; 16],
}

impl PairKDDistribution {
    pub fn entries(&self) -> &[Complex64; 16] {
        &self.entries
    }

    pub fn get(&self, x1: Sign, y1: Sign, x2: Sign, y2: Sign) -> Complex64 {
        self.entries[crate::povm::pair_index(x1, y1, x2, y2)]
    }

    pub fn total(&self) -> Complex64 {
        self.entries.iter().sum()
    }

    /// `Σ_{y1,y2} ρ(x1, y1; x2, y2)`, the joint X statistics of both wings.
    pub fn x_marginal(&self, x1: Sign, x2: Sign) -> Complex64 {
        let mut acc = ZERO;
        for y1 in Sign::BOTH {
            for y2 in Sign::BOTH {
                acc += self.get(x1, y1, x2, y2);
            }
        }
        acc
    }
}

/// `ρ(x, y) = ⟨x|y⟩⟨y|ρ|x⟩`.
pub fn kd_from_state(rho: &OperatorMatrix) -> Result<KDDistribution> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    validate_density(rho)?;
    let mut entries = [ZERO; 4];
    for (k, slot) in entries.iter_mut().enumerate() {
        let (x, y) = outcome_at(k);
        let xs = eigenstate(Axis::X, x);
        let ys = eigenstate(Axis::Y, y);
        *slot = xs.inner(&ys)? * rho.sandwich(&ys, &xs)?;
    }
    Ok(KDDistribution { entries })
}

fn pair_basis(axis: Axis, a: Sign, b: Sign) -> StateVector {
    eigenstate(axis, a)
        .tensor(&eigenstate(axis, b))
        .expect("two single-qubit states")
}

/// `ρ(x1, y1; x2, y2) = ⟨x1 x2|y1 y2⟩⟨y1 y2|ρ₄|x1 x2⟩`.
pub fn kd_pair_from_state(rho4: &OperatorMatrix) -> Result<PairKDDistribution> {
    if rho4.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho4.dim(),
        });
    }
    validate_density(rho4)?;
    let mut entries = [ZERO; 16];
    for (k, slot) in entries.iter_mut().enumerate() {
        let (x1, y1, x2, y2) = pair_outcome_at(k);
        let xs = pair_basis(Axis::X, x1, x2);
        let ys = pair_basis(Axis::Y, y1, y2);
        *slot = xs.inner(&ys)? * rho4.sandwich(&ys, &xs)?;
    }
    Ok(PairKDDistribution { entries })
}

fn check_nonsingular(parameter: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value.abs() < SINGULAR_TOL {
        return Err(Error::Singular { parameter, value });
    }
    Ok(())
}

/// Coefficient of `P(x', y')` in the reconstruction of `ρ(x, y)`:
/// `(1 ± 1/vx ± 1/vy ± 1/c)/4`, each sign `+` when the matching outcome agrees.
fn inversion_weights(vx: f64, vy: f64, c: Complex64) -> Result<[Complex64; 4]> {
    check_nonsingular("vx", vx)?;
    check_nonsingular("vy", vy)?;
    check_nonsingular("c", c.norm())?;
    let mut inv = [Complex64::new(1.0, 0.0); 4];
    inv[CHAR_VX] = Complex64::new(1.0 / vx, 0.0);
    inv[CHAR_VY] = Complex64::new(1.0 / vy, 0.0);
    inv[CHAR_C] = 1.0 / c;
    // weights by pattern r = (cell ⊕ cell'): Σ_k χ_k(r)·inv_k / 4
    Ok([0, 1, 2, 3].map(|r| {
        (0..4).map(|k| inv[k] * character_sign(k, r)).sum::<Complex64>() * 0.25
    }))
}

/// Inverts the joint measurement: recovers `ρ(x, y)` from an outcome table.
///
/// For a POVM with visibilities `(vx, vy, vz)` pass `c = -i·vz`
/// ([`crate::povm::VisibilityTriple::error_correlation`]). Any nonzero complex
/// `c` is accepted so that hypothetical real error models can be inverted too.
pub fn reconstruct_kd(p: &ProbTable4, vx: f64, vy: f64, c: Complex64) -> Result<KDDistribution> {
    let w = inversion_weights(vx, vy, c)?;
    let probs = p.as_array();
    let mut entries = [ZERO; 4];
    for (cell, slot) in entries.iter_mut().enumerate() {
        *slot = (0..4).map(|src| w[cell ^ src] * probs[src]).sum();
    }
    Ok(KDDistribution { entries })
}

/// Reconstruction from raw counts with per-entry standard errors.
///
/// Each entry is linear in the multinomial frequencies; the returned error
/// holds the standard error of the real part in `re` and of the imaginary
/// part in `im`.
pub fn reconstruct_kd_from_counts(
    counts: &[u64; 4],
    vx: f64,
    vy: f64,
    c: Complex64,
) -> Result<(KDDistribution, [Complex64; 4])> {
    let p = ProbTable4::from_counts(counts)?;
    let kd = reconstruct_kd(&p, vx, vy, c)?;
    let w = inversion_weights(vx, vy, c)?;
    let n: u64 = counts.iter().sum();
    let q = p.as_array();
    let mut errs = [ZERO; 4];
    for (cell, slot) in errs.iter_mut().enumerate() {
        let var = |part: fn(Complex64) -> f64| {
            let second: f64 = (0..4).map(|s| part(w[cell ^ s]).powi(2) * q[s]).sum();
            let first: f64 = (0..4).map(|s| part(w[cell ^ s]) * q[s]).sum();
            ((second - first * first).max(0.0) / n as f64).sqrt()
        };
        *slot = Complex64::new(var(|z| z.re), var(|z| z.im));
    }
    Ok((kd, errs))
}

/// `P(x, y) = Σ_{x',y'} η(x ≠ x', y ≠ y')·ρ(x', y')`.
pub fn forward_map(kd: &KDDistribution, m: &ErrorModel) -> Result<ProbTable4> {
    let eta = m.eta();
    let rho = kd.entries();
    let mut p = [0.0; 4];
    for (cell, slot) in p.iter_mut().enumerate() {
        let z: Complex64 = (0..4).map(|src| eta[cell ^ src] * rho[src]).sum();
        if z.im.abs() > EIGEN_TOL {
            return Err(Error::Inconsistent(format!(
                "forward probability {z} is complex; distribution and error model do not match"
            )));
        }
        *slot = z.re;
    }
    ProbTable4::new(p)
}

/// Error model of a POVM with the given visibilities, in the KD convention.
pub fn povm_error_model(vx: f64, vy: f64, vz: f64) -> Result<ErrorModel> {
    error_model_from_visibilities(vx, vy, Complex64::new(0.0, -vz))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

/// Number of random states used by [`verify_operator_identities`].
pub const IDENTITY_SAMPLES: usize = 1000;

/// Checks `XY = iZ`, the factorized ideal operator, and `Tr(Π_ideal ρ) = ρ(x, y)`
/// on [`IDENTITY_SAMPLES`] random states drawn from `seed`.
pub fn verify_operator_identities(seed: u64) -> IdentityReport {
    let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    let mut checks = vec![IdentityCheck {
        name: "XY = iZ",
        deviation: (x * y).max_abs_diff(&(I * z)),
        tolerance: EXACT_TOL,
    }];

    let mut formula_dev: f64 = 0.0;
    let mut sum = OperatorMatrix::zero(2).expect("dim 2");
    for k in 0..4 {
        let (sx, sy) = outcome_at(k);
        let op = ideal_operator(sx, sy);
        sum = sum + op;
        formula_dev = formula_dev.max(op.max_abs_diff(&element_formula(sx, sy, 1.0, 1.0, I)));
    }
    checks.push(IdentityCheck {
        name: "(I + sx X)(I + sy Y)/4 = POVM formula at vx = vy = 1, vz = i",
        deviation: formula_dev,
        tolerance: EXACT_TOL,
    });
    checks.push(IdentityCheck {
        name: "sum of ideal operators = I",
        deviation: sum.max_abs_diff(&OperatorMatrix::identity2()),
        tolerance: EXACT_TOL,
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace_dev: f64 = 0.0;
    for _ in 0..IDENTITY_SAMPLES {
        let rho = random_density(&mut rng);
        let kd = match kd_from_state(&rho) {
            Ok(kd) => kd,
            Err(_) => {
                trace_dev = f64::INFINITY;
                continue;
            }
        };
        for k in 0..4 {
            let (sx, sy) = outcome_at(k);
            let t = trace_product(&ideal_operator(sx, sy), &rho).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let d = (t - kd.entries()[k]).norm();
            trace_dev = trace_dev.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    checks.push(IdentityCheck {
        name: "Tr(Π_ideal ρ) = ⟨x|y⟩⟨y|ρ|x⟩ on random states",
        deviation: trace_dev,
        tolerance: EXACT_TOL,
    });
    IdentityReport { checks }
}
