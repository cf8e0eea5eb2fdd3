//! Error statistics of the joint measurement.
//!
//! Error patterns `(r_x, r_y)` are ordered `(0,0), (0,1), (1,0), (1,1)`;
//! `r_x = 1` means the X outcome is wrong. For pair data `r_x = 0` when the two
//! wings report opposite X values, the signature of an error-free singlet
//! measurement. All pattern-level formulas assume identical devices on both
//! wings.
//!
//! The signed sums over patterns are the Fourier characters of the group
//! `{0,1}²`: character `(k_x, k_y)` weights pattern `(r_x, r_y)` by
//! `(-1)^(k_x r_x + k_y r_y)`. Characters `(1,0)`, `(0,1)` and `(1,1)` give
//! `V_x`, `V_y` and the error correlation `C`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::povm::{outcome_index, pair_outcome_at, ProbTable16, ProbTable4};
use crate::qubit::{complex, Axis, Sign, EIGEN_TOL, EXACT_TOL, ZERO};
use crate::sim::{OutcomeCounts4, PairCounts16};

/// Number of standard errors a negative `C²` must clear to be called non-classical.
pub const CLASSICAL_SIGMA: f64 = 3.0;

/// Pattern index of `(r_x, r_y)`.
pub fn pattern_index(rx: bool, ry: bool) -> usize {
    2 * rx as usize + ry as usize
}

/// `(-1)^(k·r)` for character `k` and pattern `r`, both as 2-bit indices.
pub fn character_sign(k: usize, r: usize) -> f64 {
    if (k & r).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Character index of the X visibility.
pub const CHAR_VX: usize = 0b10;
/// Character index of the Y visibility.
pub const CHAR_VY: usize = 0b01;
/// Character index of the error correlation.
pub const CHAR_C: usize = 0b11;

/// Standard error of a binomial fraction `k / n`.
///
/// At `k = 0` or `k = n` the fraction is replaced by the rule-of-three bound
/// `3 / n` (or `1 - 3/n`).
pub fn binomial_stderr(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let p = if k == 0 || k == n {
        (3.0 / nf).min(0.5)
    } else {
        k as f64 / nf
    };
    (p * (1.0 - p) / nf).sqrt()
}

/// Standard error of a contrast `q₊ - q₋` between two complementary outcome
/// classes counted over `n` shots.
fn contrast_stderr(contrast: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let k_plus = ((1.0 + contrast) / 2.0 * n as f64).round() as u64;
    2.0 * binomial_stderr(k_plus.min(n), n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateSource {
    EigenstateRun,
    PairRun,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub source: EstimateSource,
}

/// Per-outcome pattern probabilities `E(r_x, r_y)`; they sum to 1/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternStats {
    e: [f64; 4],
    stderr: [f64; 4],
    total_shots: u64,
}

impl PatternStats {
    /// Exact pattern probabilities (no sampling error).
    pub fn exact(e: [f64; 4]) -> Self {
        Self {
            e,
            stderr: [0.0; 4],
            total_shots: 0,
        }
    }

    pub fn new(e: [f64; 4], stderr: [f64; 4], total_shots: u64) -> Result<Self> {
        for &v in &e {
            if !v.is_finite() || !(-EIGEN_TOL..=1.0 + EIGEN_TOL).contains(&v) {
                return Err(Error::InvalidProbabilities(format!("pattern probability {v}")));
            }
        }
        let sum: f64 = e.iter().sum();
        if (sum - 0.25).abs() > 1e-9 {
            return Err(Error::InvalidProbabilities(format!(
                "pattern probabilities sum to {sum}, expected 1/4"
            )));
        }
        if stderr.iter().any(|s| s.is_nan() || *s < 0.0) {
            return Err(Error::InvalidProbabilities("negative standard error".into()));
        }
        Ok(Self {
            e: e.map(|v| v.clamp(0.0, 1.0)),
            stderr,
            total_shots,
        })
    }

    pub fn e(&self) -> &[f64; 4] {
        &self.e
    }

    pub fn get(&self, rx: bool, ry: bool) -> f64 {
        self.e[pattern_index(rx, ry)]
    }

    pub fn stderr(&self) -> &[f64; 4] {
        &self.stderr
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn is_exact(&self) -> bool {
        self.total_shots == 0
    }

    /// `4·Σ_r χ_k(r)·E(r)`: the squared character `k` of the error model.
    pub fn contrast(&self, k: usize) -> f64 {
        4.0 * (0..4).map(|r| character_sign(k, r) * self.e[r]).sum::<f64>()
    }

    fn contrast_stderr(&self, k: usize) -> f64 {
        contrast_stderr(self.contrast(k), self.total_shots)
    }

    /// Removes isotropic source noise of known singlet weight `p`.
    ///
    /// Werner noise scales every pattern contrast by `p`, so each `E(r)` moves
    /// towards 1/16 by that factor. The correction assumes the Werner model.
    pub fn werner_corrected(&self, p: f64) -> Result<Self> {
        if !p.is_finite() || p.abs() < 1e-6 {
            return Err(Error::Singular {
                parameter: "werner_p",
                value: p,
            });
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidConfig(format!("werner_p = {p} is outside [0, 1]")));
        }
        Ok(Self {
            e: self.e.map(|e| 1.0 / 16.0 + (e - 1.0 / 16.0) / p),
            stderr: self.stderr.map(|s| s / p),
            total_shots: self.total_shots,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    /// May be negative; quantum devices give `-vz²`.
    pub c_squared: f64,
    pub stderr: f64,
    /// `√max(-C², 0)`.
    pub vz_magnitude: f64,
    /// True unless `C²` is negative by more than [`CLASSICAL_SIGMA`] standard errors.
    pub classical: bool,
}

fn visibility_from_counts(
    counts: &OutcomeCounts4,
    axis: Axis,
    correct: impl Fn(usize) -> bool,
) -> Result<VisibilityEstimate> {
    if counts.input_axis != axis {
        return Err(Error::AxisMismatch {
            expected: axis,
            found: counts.input_axis,
        });
    }
    if counts.total == 0 {
        return Err(Error::EmptyCounts);
    }
    let right: u64 = (0..4).filter(|&k| correct(k)).map(|k| counts.counts[k]).sum();
    let wrong = counts.total - right;
    let n = counts.total as f64;
    Ok(VisibilityEstimate {
        value: (right as f64 - wrong as f64) / n,
        stderr: 2.0 * binomial_stderr(right, counts.total),
        source: EstimateSource::EigenstateRun,
    })
}

/// `V̂x` from an X-eigenstate run: correct-x minus wrong-x frequency.
pub fn estimate_vx(counts: &OutcomeCounts4) -> Result<VisibilityEstimate> {
    let x = counts.input_value;
    visibility_from_counts(counts, Axis::X, |k| {
        k == outcome_index(x, Sign::Plus) || k == outcome_index(x, Sign::Minus)
    })
}

/// `V̂y` from a Y-eigenstate run.
pub fn estimate_vy(counts: &OutcomeCounts4) -> Result<VisibilityEstimate> {
    let y = counts.input_value;
    visibility_from_counts(counts, Axis::Y, |k| {
        k == outcome_index(Sign::Plus, y) || k == outcome_index(Sign::Minus, y)
    })
}

/// Visibility read off exact probabilities for an eigenstate input.
pub fn visibility_from_probs(probs: &ProbTable4, axis: Axis, value: Sign) -> Result<f64> {
    match axis {
        Axis::X => Ok(probs.x_marginal(value) - probs.x_marginal(-value)),
        Axis::Y => Ok(probs.y_marginal(value) - probs.y_marginal(-value)),
        Axis::Z => Err(Error::AxisNotAllowed(axis)),
    }
}

/// Pattern of pair cell `k`.
fn pair_cell_pattern(k: usize) -> usize {
    let (x1, y1, x2, y2) = pair_outcome_at(k);
    pattern_index(x1 == x2, y1 == y2)
}

/// Pattern probabilities from pair counts, `E(r) = n_r / (4N)`.
pub fn collapse_pair_counts(counts: &PairCounts16) -> Result<PatternStats> {
    if counts.total == 0 {
        return Err(Error::EmptyCounts);
    }
    let mut per_pattern = [0u64; 4];
    for (k, &c) in counts.counts.iter().enumerate() {
        per_pattern[pair_cell_pattern(k)] += c;
    }
    let n = counts.total as f64;
    let e = per_pattern.map(|c| c as f64 / (4.0 * n));
    let stderr = per_pattern.map(|c| binomial_stderr(c, counts.total) / 4.0);
    PatternStats::new(e, stderr, counts.total)
}

/// Exact pattern probabilities from an exact pair table.
pub fn collapse_pair_probs(probs: &ProbTable16) -> Result<PatternStats> {
    let mut e = [0.0; 4];
    for (k, &p) in probs.as_array().iter().enumerate() {
        e[pair_cell_pattern(k)] += p / 4.0;
    }
    PatternStats::new(e, [0.0; 4], 0)
}

fn pattern_estimate(stats: &PatternStats, k: usize) -> VisibilityEstimate {
    VisibilityEstimate {
        value: stats.contrast(k),
        stderr: stats.contrast_stderr(k),
        source: if stats.is_exact() {
            EstimateSource::Exact
        } else {
            EstimateSource::PairRun
        },
    }
}

/// `(V̂x², V̂y²)` from pair patterns.
pub fn vsquared_from_patterns(stats: &PatternStats) -> (VisibilityEstimate, VisibilityEstimate) {
    (pattern_estimate(stats, CHAR_VX), pattern_estimate(stats, CHAR_VY))
}

/// `Ĉ² = 4(E(0,0) - E(0,1) - E(1,0) + E(1,1))` with the classicality verdict.
pub fn csquared_from_patterns(stats: &PatternStats) -> CorrelationEstimate {
    let c_squared = stats.contrast(CHAR_C);
    let stderr = stats.contrast_stderr(CHAR_C);
    // exact inputs still carry rounding of order EXACT_TOL
    let threshold = (CLASSICAL_SIGMA * stderr).max(EXACT_TOL);
    CorrelationEstimate {
        c_squared,
        stderr,
        vz_magnitude: (-c_squared).max(0.0).sqrt(),
        classical: c_squared >= -threshold,
    }
}

/// `S = E(0,1) + E(1,0) - E(0,0) - E(1,1)`, equal to `-C²/4`.
pub fn classicality_statistic(stats: &PatternStats) -> f64 {
    let e = stats.e();
    e[1] + e[2] - e[0] - e[3]
}

/// Four complex error probabilities `η(r_x, r_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorModel {
    eta: [Complex64; 4],
}

impl ErrorModel {
    /// Validates normalization and the reality of the `V_x`, `V_y` sums.
    pub fn new(eta: [Complex64; 4]) -> Result<Self> {
        for z in &eta {
            complex(z.re, z.im)?;
        }
        let m = Self { eta };
        let sum = m.character(0);
        if (sum - 1.0).norm() > EXACT_TOL {
            return Err(Error::Inconsistent(format!("error probabilities sum to {sum}")));
        }
        for (name, k) in [("V_x", CHAR_VX), ("V_y", CHAR_VY)] {
            let v = m.character(k);
            if v.im.abs() > EXACT_TOL {
                return Err(Error::Inconsistent(format!("{name} = {v} is not real")));
            }
        }
        Ok(m)
    }

    pub fn eta(&self) -> &[Complex64; 4] {
        &self.eta
    }

    pub fn get(&self, rx: bool, ry: bool) -> Complex64 {
        self.eta[pattern_index(rx, ry)]
    }

    /// `Σ_s χ_k(s)·η(s)`.
    pub fn character(&self, k: usize) -> Complex64 {
        (0..4).map(|s| self.eta[s] * character_sign(k, s)).sum()
    }

    /// True when every `η` is real and non-negative.
    pub fn is_classical(&self) -> bool {
        self.eta.iter().all(|z| z.im == 0.0 && z.re >= 0.0)
    }
}

/// `η(r) = (1 + (-1)^{r_x} vx + (-1)^{r_y} vy + (-1)^{r_x + r_y} c)/4`.
pub fn error_model_from_visibilities(vx: f64, vy: f64, c: Complex64) -> Result<ErrorModel> {
    complex(vx, vy)?;
    complex(c.re, c.im)?;
    let eta = [0, 1, 2, 3].map(|r| {
        0.25 * (1.0 + character_sign(CHAR_VX, r) * vx + character_sign(CHAR_VY, r) * vy
            + c * character_sign(CHAR_C, r))
    });
    ErrorModel::new(eta)
}

/// `(V_x, V_y, C)` as signed sums of `η`.
pub fn visibilities_from_error_model(m: &ErrorModel) -> (f64, f64, Complex64) {
    (m.character(CHAR_VX).re, m.character(CHAR_VY).re, m.character(CHAR_C))
}

/// Outcome table for an X or Y eigenstate input predicted by the error model.
pub fn eigenstate_probs_from_error_model(
    m: &ErrorModel,
    axis: Axis,
    value: Sign,
) -> Result<ProbTable4> {
    let eta = m.eta();
    let half = |a: Complex64, b: Complex64| -> Result<f64> {
        let z = 0.5 * (a + b);
        if z.im.abs() > EXACT_TOL || !(-EXACT_TOL..=0.5 + EXACT_TOL).contains(&z.re) {
            return Err(Error::Inconsistent(format!(
                "eigenstate marginal {z} is not a probability"
            )));
        }
        Ok(z.re.clamp(0.0, 0.5))
    };
    let mut p = [0.0; 4];
    match axis {
        Axis::X => {
            let right = half(eta[0], eta[1])?;
            let wrong = half(eta[2], eta[3])?;
            for y in Sign::BOTH {
                p[outcome_index(value, y)] = right;
                p[outcome_index(-value, y)] = wrong;
            }
        }
        Axis::Y => {
            let right = half(eta[0], eta[2])?;
            let wrong = half(eta[1], eta[3])?;
            for x in Sign::BOTH {
                p[outcome_index(x, value)] = right;
                p[outcome_index(x, -value)] = wrong;
            }
        }
        Axis::Z => return Err(Error::AxisNotAllowed(axis)),
    }
    ProbTable4::new(p)
}

/// Singlet pattern probabilities implied by an error model applied on both
/// wings: `E(r) = (1/4)·Σ_s η(s)·η(s ⊕ r)`.
pub fn predicted_pattern_probs_from_error_model(m: &ErrorModel) -> Result<PatternStats> {
    let amplitudes = pattern_amplitudes(m.eta());
    let mut e = [0.0; 4];
    for (slot, z) in e.iter_mut().zip(amplitudes) {
        if z.im.abs() > EIGEN_TOL || z.re < -EIGEN_TOL {
            return Err(Error::Inconsistent(format!(
                "predicted pattern probability {z} is not a probability"
            )));
        }
        *slot = z.re.max(0.0);
    }
    PatternStats::new(e, [0.0; 4], 0)
}

/// Complex `E(r) = (1/4)·Σ_s η(s)·η(s ⊕ r)` for an arbitrary `η`.
pub fn pattern_amplitudes(eta: &[Complex64; 4]) -> [Complex64; 4] {
    [0, 1, 2, 3].map(|r| (0..4).map(|s| eta[s] * eta[s ^ r]).fold(ZERO, |a, b| a + b) * 0.25)
}

/// Largest `|4·Σ_r χ_k(r)·E(r) - (Σ_s χ_k(s)·η(s))²|` over the four characters.
pub fn fourier_identity_residual(eta: &[Complex64; 4]) -> f64 {
    let e = pattern_amplitudes(eta);
    (0..4)
        .map(|k| {
            let lhs: Complex64 = (0..4).map(|r| e[r] * character_sign(k, r)).fold(ZERO, |a, b| a + b) * 4.0;
            let chi: Complex64 = (0..4).map(|s| eta[s] * character_sign(k, s)).fold(ZERO, |a, b| a + b);
            (lhs - chi * chi).norm()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{build_povm, exact_pattern_probs, outcome_probs, pair_outcome_probs, VisibilityTriple};
    use crate::qubit::{density, eigenstate, singlet, I};
    use approx::assert_abs_diff_eq;

    const R3: f64 = 0.577_350_269_189_625_8;

    #[test]
    fn fourier_residual_vanishes_for_complex_models() {
        let eta = [
            Complex64::new(0.7, 0.2),
            Complex64::new(-0.1, 0.4),
            Complex64::new(0.3, -0.9),
            Complex64::new(0.1, 0.3),
        ];
        assert!(fourier_identity_residual(&eta) < 1e-14);
        let e = pattern_amplitudes(&eta);
        let total: Complex64 = e.iter().sum();
        assert_abs_diff_eq!(total.re, 0.25, epsilon = 1e-15);
    }

    fn counts_x_plus(c: [u64; 4]) -> OutcomeCounts4 {
        OutcomeCounts4::new(c, Axis::X, Sign::Plus)
    }

    #[test]
    fn vx_examples() {
        let v = estimate_vx(&counts_x_plus([400_000, 400_000, 100_000, 100_000])).unwrap();
        assert_abs_diff_eq!(v.value, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(v.stderr, 2.0 * (0.8f64 * 0.2 / 1e6).sqrt(), epsilon = 1e-15);
        assert_eq!(estimate_vx(&counts_x_plus([5, 7, 0, 0])).unwrap().value, 1.0);
        assert_eq!(estimate_vx(&counts_x_plus([3, 3, 3, 3])).unwrap().value, 0.0);
        // a -1 input counts the x = -1 cells as correct
        let minus = OutcomeCounts4::new([1, 1, 4, 4], Axis::X, Sign::Minus);
        assert_abs_diff_eq!(estimate_vx(&minus).unwrap().value, 0.6);
    }

    #[test]
    fn vy_examples() {
        let y_plus = |c| OutcomeCounts4::new(c, Axis::Y, Sign::Plus);
        assert_eq!(estimate_vy(&y_plus([5, 0, 7, 0])).unwrap().value, 1.0);
        assert_eq!(estimate_vy(&y_plus([2, 2, 2, 2])).unwrap().value, 0.0);
        assert!(matches!(
            estimate_vy(&counts_x_plus([1, 1, 1, 1])),
            Err(Error::AxisMismatch { .. })
        ));
        assert_eq!(estimate_vy(&y_plus([0; 4])), Err(Error::EmptyCounts));
    }

    #[test]
    fn zero_count_stderr_uses_rule_of_three() {
        let v = estimate_vx(&counts_x_plus([500, 500, 0, 0])).unwrap();
        let p: f64 = 3.0 / 1000.0;
        assert_abs_diff_eq!(v.stderr, 2.0 * (p * (1.0 - p) / 1000.0).sqrt());
        assert!(v.stderr > 0.0);
    }

    #[test]
    fn visibility_from_exact_probs() {
        let povm = build_povm(VisibilityTriple::new(0.6, 0.8, 0.0).unwrap());
        let rho = density(&eigenstate(Axis::Y, Sign::Minus));
        let p = outcome_probs(&povm, &rho).unwrap();
        assert_abs_diff_eq!(
            visibility_from_probs(&p, Axis::Y, Sign::Minus).unwrap(),
            0.8,
            epsilon = 1e-12
        );
    }

    #[test]
    fn collapse_examples() {
        let povm = build_povm(VisibilityTriple::new(R3, R3, R3).unwrap());
        let p = pair_outcome_probs(&povm, &povm, &density(&singlet())).unwrap();
        let stats = collapse_pair_probs(&p).unwrap();
        for (got, want) in stats.e().iter().zip([1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }

        // one shot (+,+;-,-)
        let mut c = [0u64; 16];
        c[crate::povm::pair_index(Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus)] = 1;
        let s = collapse_pair_counts(&PairCounts16::new(c)).unwrap();
        assert_eq!(s.e(), &[0.25, 0.0, 0.0, 0.0]);
        assert_eq!(s.total_shots(), 1);

        assert_eq!(collapse_pair_counts(&PairCounts16::new([0; 16])), Err(Error::EmptyCounts));
    }

    #[test]
    fn vsquared_examples() {
        let (a, b) = vsquared_from_patterns(&PatternStats::exact([1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.0]));
        assert_abs_diff_eq!(a.value, 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.value, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(a.source, EstimateSource::Exact);
        let (a, b) = vsquared_from_patterns(&PatternStats::exact([0.125, 0.045, 0.08, 0.0]));
        assert_abs_diff_eq!(a.value, 0.36, epsilon = 1e-12);
        assert_abs_diff_eq!(b.value, 0.64, epsilon = 1e-12);
        let (a, b) = vsquared_from_patterns(&PatternStats::exact([1.0 / 16.0; 4]));
        assert_eq!((a.value, b.value), (0.0, 0.0));
    }

    #[test]
    fn csquared_examples() {
        let c = csquared_from_patterns(&PatternStats::exact([1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.0]));
        assert_abs_diff_eq!(c.c_squared, -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(c.vz_magnitude, R3, epsilon = 1e-12);
        assert!(!c.classical);

        let c = csquared_from_patterns(&PatternStats::exact([0.125, 0.045, 0.08, 0.0]));
        assert_abs_diff_eq!(c.c_squared, 0.0, epsilon = 1e-15);
        assert!(c.classical);
        assert_eq!(c.vz_magnitude, (-c.c_squared).max(0.0).sqrt());

        let c = csquared_from_patterns(&PatternStats::exact([0.25, 0.0, 0.0, 0.0]));
        assert_eq!(c.c_squared, 1.0);
        assert!(c.classical);
        assert_eq!(c.vz_magnitude, 0.0);
    }

    #[test]
    fn classicality_examples() {
        let r = exact_pattern_probs(VisibilityTriple::new(R3, R3, R3).unwrap());
        assert_abs_diff_eq!(classicality_statistic(&r), 1.0 / 12.0, epsilon = 1e-15);
        let r = exact_pattern_probs(VisibilityTriple::new(0.6, 0.8, 0.0).unwrap());
        assert_abs_diff_eq!(classicality_statistic(&r), 0.0, epsilon = 1e-15);
        assert_eq!(classicality_statistic(&PatternStats::exact([0.25, 0.0, 0.0, 0.0])), -0.25);
    }

    #[test]
    fn pattern_stats_validation() {
        assert!(PatternStats::new([0.25, 0.25, 0.0, 0.0], [0.0; 4], 1).is_err());
        assert!(PatternStats::new([0.25, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], 1).is_err());
    }

    #[test]
    fn error_model_examples() {
        let m = error_model_from_visibilities(1.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(m.eta(), &[Complex64::new(1.0, 0.0), ZERO, ZERO, ZERO]);

        let m = error_model_from_visibilities(0.0, 0.0, I).unwrap();
        let p = Complex64::new(0.25, 0.25);
        let q = Complex64::new(0.25, -0.25);
        assert_eq!(m.eta(), &[p, q, q, p]);
        assert_eq!(visibilities_from_error_model(&m), (0.0, 0.0, I));

        let m = error_model_from_visibilities(0.0, 0.0, ZERO).unwrap();
        assert!(m.eta().iter().all(|z| *z == Complex64::new(0.25, 0.0)));
        assert!(m.is_classical());
    }

    #[test]
    fn error_model_validation() {
        let bad = [Complex64::new(0.5, 0.0); 4];
        assert!(ErrorModel::new(bad).is_err());
        // complex V_x
        let eta = [
            Complex64::new(0.25, 0.1),
            Complex64::new(0.25, 0.1),
            Complex64::new(0.25, -0.1),
            Complex64::new(0.25, -0.1),
        ];
        assert!(ErrorModel::new(eta).is_err());
    }

    #[test]
    fn eigenstate_probs_examples() {
        let m = error_model_from_visibilities(0.6, 0.8, Complex64::new(0.0, -0.3)).unwrap();
        let p = eigenstate_probs_from_error_model(&m, Axis::X, Sign::Plus).unwrap();
        for (got, want) in p.as_array().iter().zip([0.4, 0.4, 0.1, 0.1]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let povm = build_povm(VisibilityTriple::new(0.6, 0.8, 0.0).unwrap());
        for axis in [Axis::X, Axis::Y] {
            for s in Sign::BOTH {
                let want = outcome_probs(&povm, &density(&eigenstate(axis, s))).unwrap();
                let got = eigenstate_probs_from_error_model(&m, axis, s).unwrap();
                for k in 0..4 {
                    assert_abs_diff_eq!(got.as_array()[k], want.as_array()[k], epsilon = 1e-12);
                }
            }
        }

        let ideal = error_model_from_visibilities(1.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        let p = eigenstate_probs_from_error_model(&ideal, Axis::X, Sign::Plus).unwrap();
        assert_eq!(p.as_array(), &[0.5, 0.5, 0.0, 0.0]);

        let flat = error_model_from_visibilities(0.0, 0.0, ZERO).unwrap();
        let p = eigenstate_probs_from_error_model(&flat, Axis::Y, Sign::Plus).unwrap();
        assert_eq!(p.as_array(), &[0.25; 4]);

        // V_x > 1 pushes a marginal negative
        let bad = error_model_from_visibilities(1.5, 0.0, ZERO).unwrap();
        assert!(eigenstate_probs_from_error_model(&bad, Axis::X, Sign::Plus).is_err());
        assert!(eigenstate_probs_from_error_model(&flat, Axis::Z, Sign::Plus).is_err());
    }

    #[test]
    fn predicted_patterns_examples() {
        let m = error_model_from_visibilities(R3, R3, Complex64::new(0.0, R3)).unwrap();
        let e = predicted_pattern_probs_from_error_model(&m).unwrap();
        for (got, want) in e.e().iter().zip([1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let ideal = error_model_from_visibilities(1.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(
            predicted_pattern_probs_from_error_model(&ideal).unwrap().e(),
            &[0.25, 0.0, 0.0, 0.0]
        );
        let flat = error_model_from_visibilities(0.0, 0.0, ZERO).unwrap();
        assert_eq!(
            predicted_pattern_probs_from_error_model(&flat).unwrap().e(),
            &[1.0 / 16.0; 4]
        );
        // a real C beyond the physical range gives a negative pattern probability
        let bad = error_model_from_visibilities(0.0, 0.0, Complex64::new(0.0, 2.0)).unwrap();
        assert!(predicted_pattern_probs_from_error_model(&bad).is_err());
    }

    #[test]
    fn werner_correction_restores_singlet_patterns() {
        use crate::sim::werner_state;
        let v = VisibilityTriple::new(0.5, 0.6, -0.4).unwrap();
        let povm = build_povm(v);
        let noisy = pair_outcome_probs(&povm, &povm, &werner_state(0.7).unwrap()).unwrap();
        let corrected = collapse_pair_probs(&noisy).unwrap().werner_corrected(0.7).unwrap();
        let exact = exact_pattern_probs(v);
        for k in 0..4 {
            assert_abs_diff_eq!(corrected.e()[k], exact.e()[k], epsilon = 1e-12);
        }
        assert!(exact.werner_corrected(0.0).is_err());
    }
}
