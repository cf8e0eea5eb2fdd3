//! The symmetric four-outcome POVM for a joint measurement of X and Y.
//!
//! Outcome cells `(x, y)` are ordered `(+,+), (+,-), (-,+), (-,-)`; the
//! sixteen pair cells `(x1, y1, x2, y2)` use the same lexicographic order with
//! `+1` before `-1`.

use num_complex::Complex64;

use crate::analysis::PatternStats;
use crate::error::{Error, Result};
use crate::qubit::{
    min_eigenvalue_hermitian, pauli, tensor, trace_product, validate_density, Axis,
    OperatorMatrix, Sign, EIGEN_TOL, EXACT_TOL, I,
};

/// Index of the outcome cell `(x, y)`.
pub fn outcome_index(x: Sign, y: Sign) -> usize {
    2 * x.bit() + y.bit()
}

/// Outcome `(x, y)` stored in cell `index`.
pub fn outcome_at(index: usize) -> (Sign, Sign) {
    (Sign::from_bit(index >> 1), Sign::from_bit(index))
}

/// Index of the pair cell `(x1, y1, x2, y2)`.
pub fn pair_index(x1: Sign, y1: Sign, x2: Sign, y2: Sign) -> usize {
    4 * outcome_index(x1, y1) + outcome_index(x2, y2)
}

/// Pair outcome stored in cell `index`.
pub fn pair_outcome_at(index: usize) -> (Sign, Sign, Sign, Sign) {
    let (x1, y1) = outcome_at(index >> 2);
    let (x2, y2) = outcome_at(index & 3);
    (x1, y1, x2, y2)
}

/// The POVM parameters `(vx, vy, vz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityTriple {
    vx: f64,
    vy: f64,
    vz: f64,
}

impl VisibilityTriple {
    pub fn new(vx: f64, vy: f64, vz: f64) -> Result<Self> {
        for (name, value, lo) in [("vx", vx, 0.0), ("vy", vy, 0.0), ("vz", vz, -1.0)] {
            if !value.is_finite() {
                return Err(Error::NonFinite(value));
            }
            if !(lo..=1.0).contains(&value) {
                return Err(Error::InvalidVisibility { name, value });
            }
        }
        let norm_squared = vx * vx + vy * vy + vz * vz;
        if norm_squared > 1.0 + EXACT_TOL {
            return Err(Error::PositivityViolation { norm_squared });
        }
        Ok(Self { vx, vy, vz })
    }

    pub fn vx(&self) -> f64 {
        self.vx
    }

    pub fn vy(&self) -> f64 {
        self.vy
    }

    pub fn vz(&self) -> f64 {
        self.vz
    }

    pub fn norm_squared(&self) -> f64 {
        self.vx * self.vx + self.vy * self.vy + self.vz * self.vz
    }

    /// Error correlation `C` of this POVM.
    ///
    /// `C² = -vz²` fixes `C` up to sign. The root `-i·vz` is the one for which
    /// the POVM equals the error-model convolution of the ideal operators
    /// `(I + xX)(I + yY)/4`, i.e. the one that matches
    /// [`crate::kd::kd_from_state`].
    pub fn error_correlation(&self) -> Complex64 {
        Complex64::new(0.0, -self.vz)
    }
}

/// `(I + x·vx·X + y·vy·Y + x·y·vz·Z)/4` with a possibly complex `vz`.
pub fn element_formula(x: Sign, y: Sign, vx: f64, vy: f64, vz: Complex64) -> OperatorMatrix {
    let (sx, sy) = (x.value(), y.value());
    0.25 * (OperatorMatrix::identity2()
        + (sx * vx) * pauli(Axis::X)
        + (sy * vy) * pauli(Axis::Y)
        + (vz * (sx * sy)) * pauli(Axis::Z))
}

/// A validated four-element joint measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPovm {
    elements: [OperatorMatrix; 4],
    visibilities: VisibilityTriple,
}

impl JointPovm {
    /// Wraps explicit elements, checking Hermiticity, positivity and completeness.
    pub fn from_elements(elements: [OperatorMatrix; 4], visibilities: VisibilityTriple) -> Result<Self> {
        let mut sum = OperatorMatrix::zero(2)?;
        for m in &elements {
            if m.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: m.dim(),
                });
            }
            let min = min_eigenvalue_hermitian(m)?;
            if min < -EIGEN_TOL {
                return Err(Error::PositivityViolation {
                    norm_squared: visibilities.norm_squared(),
                });
            }
            sum = sum + *m;
        }
        let defect = sum.max_abs_diff(&OperatorMatrix::identity2());
        if defect > EXACT_TOL {
            return Err(Error::Inconsistent(format!(
                "POVM elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Self {
            elements,
            visibilities,
        })
    }

    pub fn element(&self, x: Sign, y: Sign) -> &OperatorMatrix {
        &self.elements[outcome_index(x, y)]
    }

    /// Elements in cell order.
    pub fn elements(&self) -> &[OperatorMatrix; 4] {
        &self.elements
    }

    pub fn visibilities(&self) -> VisibilityTriple {
        self.visibilities
    }
}

/// Builds the POVM with the given visibilities.
///
/// Positivity is guaranteed by the [`VisibilityTriple`] constructor, which
/// rejects `vx² + vy² + vz² > 1`.
pub fn build_povm(v: VisibilityTriple) -> JointPovm {
    let vz = Complex64::new(v.vz, 0.0);
    let elements = [0, 1, 2, 3].map(|k| {
        let (x, y) = outcome_at(k);
        element_formula(x, y, v.vx, v.vy, vz)
    });
    JointPovm {
        elements,
        visibilities: v,
    }
}

/// Convenience wrapper validating raw visibilities first.
pub fn build_povm_from(vx: f64, vy: f64, vz: f64) -> Result<JointPovm> {
    Ok(build_povm(VisibilityTriple::new(vx, vy, vz)?))
}

fn validate_table(p: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for &v in p {
        if !v.is_finite() {
            return Err(Error::NonFinite(v));
        }
        if !(-EIGEN_TOL..=1.0 + EIGEN_TOL).contains(&v) {
            return Err(Error::InvalidProbabilities(format!("entry {v} outside [0, 1]")));
        }
        sum += v;
    }
    if (sum - 1.0).abs() > EXACT_TOL {
        return Err(Error::InvalidProbabilities(format!("entries sum to {sum}")));
    }
    Ok(())
}

/// Single-qubit outcome probabilities in cell order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTable4 {
    p: [f64; 4],
}

impl ProbTable4 {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        validate_table(&p)?;
        Ok(Self {
            p: p.map(|v| v.clamp(0.0, 1.0)),
        })
    }

    /// Relative frequencies of the given counts.
    pub fn from_counts(counts: &[u64; 4]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyCounts);
        }
        Self::new(counts.map(|c| c as f64 / total as f64))
    }

    pub fn uniform() -> Self {
        Self { p: [0.25; 4] }
    }

    pub fn get(&self, x: Sign, y: Sign) -> f64 {
        self.p[outcome_index(x, y)]
    }

    pub fn as_array(&self) -> &[f64; 4] {
        &self.p
    }

    /// Probability of the X outcome `x`, summed over y.
    pub fn x_marginal(&self, x: Sign) -> f64 {
        Sign::BOTH.iter().map(|&y| self.get(x, y)).sum()
    }

    /// Probability of the Y outcome `y`, summed over x.
    pub fn y_marginal(&self, y: Sign) -> f64 {
        Sign::BOTH.iter().map(|&x| self.get(x, y)).sum()
    }
}

/// Two-qubit outcome probabilities in pair-cell order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbTable16 {
    p: [f64; 16],
}

impl ProbTable16 {
    pub fn new(p: [f64; 16]) -> Result<Self> {
        validate_table(&p)?;
        Ok(Self {
            p: p.map(|v| v.clamp(0.0, 1.0)),
        })
    }

    pub fn get(&self, x1: Sign, y1: Sign, x2: Sign, y2: Sign) -> f64 {
        self.p[pair_index(x1, y1, x2, y2)]
    }

    pub fn as_array(&self) -> &[f64; 16] {
        &self.p
    }
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > EXACT_TOL {
        return Err(Error::Inconsistent(format!(
            "probability {z} has an imaginary part"
        )));
    }
    Ok(z.re)
}

/// `P(x, y) = Tr(Π_{x,y} ρ)`.
pub fn outcome_probs(povm: &JointPovm, rho: &OperatorMatrix) -> Result<ProbTable4> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    validate_density(rho)?;
    let mut p = [0.0; 4];
    for (k, m) in povm.elements.iter().enumerate() {
        p[k] = real_part(trace_product(m, rho)?)?;
    }
    ProbTable4::new(p)
}

/// `P(x1, y1; x2, y2) = Tr((Π¹_{x1,y1} ⊗ Π²_{x2,y2}) ρ₄)`.
pub fn pair_outcome_probs(
    povm1: &JointPovm,
    povm2: &JointPovm,
    rho4: &OperatorMatrix,
) -> Result<ProbTable16> {
    if rho4.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: rho4.dim(),
        });
    }
    validate_density(rho4)?;
    let mut p = [0.0; 16];
    for (a, m1) in povm1.elements.iter().enumerate() {
        for (b, m2) in povm2.elements.iter().enumerate() {
            p[4 * a + b] = real_part(trace_product(&tensor(m1, m2)?, rho4)?)?;
        }
    }
    ProbTable16::new(p)
}

/// Every valid triple on an `n`-point lattice with `vx, vy` in `[0, 1]` and
/// `vz` in `[-1, 1]`.
pub fn visibility_grid(n: usize) -> Vec<VisibilityTriple> {
    let n = n.max(2);
    let step = |i: usize| i as f64 / (n - 1) as f64;
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if let Ok(v) = VisibilityTriple::new(step(i), step(j), 2.0 * step(k) - 1.0) {
                    out.push(v);
                }
            }
        }
    }
    out
}

/// Closed-form singlet pattern probabilities for identical devices.
pub fn exact_pattern_probs(v: VisibilityTriple) -> PatternStats {
    let (x2, y2, z2) = (v.vx * v.vx, v.vy * v.vy, v.vz * v.vz);
    PatternStats::exact([
        (1.0 + x2 + y2 - z2) / 16.0,
        (1.0 + x2 - y2 + z2) / 16.0,
        (1.0 - x2 + y2 + z2) / 16.0,
        (1.0 - x2 - y2 - z2) / 16.0,
    ])
}

/// The non-Hermitian error-free operator `(I + sx·X)(I + sy·Y)/4`.
pub fn ideal_operator(sx: Sign, sy: Sign) -> OperatorMatrix {
    let id = OperatorMatrix::identity2();
    let px = 0.5 * (id + sx.value() * pauli(Axis::X));
    let py = 0.5 * (id + sy.value() * pauli(Axis::Y));
    px * py
}

/// `ideal_operator` written through [`element_formula`] with `vz = i`.
pub fn ideal_operator_via_formula(sx: Sign, sy: Sign) -> OperatorMatrix {
    element_formula(sx, sy, 1.0, 1.0, I)
}
