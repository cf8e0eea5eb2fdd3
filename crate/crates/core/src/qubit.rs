//! Dense complex linear algebra for one- and two-qubit operators.
//!
//! Operators are stored row-major in a fixed 16-slot buffer; only dimensions 2
//! and 4 occur. Pauli matrices use the Z-diagonal basis; two-qubit indices are
//! `2 * q1 + q2`. Eigenstates and the singlet carry the phase convention that
//! the first nonzero amplitude is real and positive.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for exact algebraic identities.
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for eigensolves and positivity checks.
pub const EIGEN_TOL: f64 = 1e-10;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Complex number with finite components.
pub fn complex(re: f64, im: f64) -> Result<Complex64> {
    if !re.is_finite() {
        return Err(Error::NonFinite(re));
    }
    if !im.is_finite() {
        return Err(Error::NonFinite(im));
    }
    Ok(Complex64::new(re, im))
}

/// A spin component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

/// A measurement outcome or eigenvalue, `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// 0 for `+1`, 1 for `-1`; the position of this sign in table orderings.
    pub fn bit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Sign {
        if bit & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        self.flip()
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = Error;

    fn try_from(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidSign(other)),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidDimension(dim))
    }
}

/// Dense square complex matrix of dimension 2 or 4.
#[derive(Clone, Copy, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    entries: [Complex64; 16],
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<Complex64>> = (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect();
        f.debug_struct("OperatorMatrix")
            .field("dim", &self.dim)
            .field("rows", &rows)
            .finish()
    }
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: &[Complex64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        let mut m = Self::zeros(dim);
        for (k, z) in entries.iter().enumerate() {
            complex(z.re, z.im)?;
            m.entries[k] = *z;
        }
        Ok(m)
    }

    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: [ZERO; 16],
        }
    }

    fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn zero(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::zeros(dim))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_fn(dim, |i, j| if i == j { ONE } else { ZERO }))
    }

    pub fn identity2() -> Self {
        Self::from_fn(2, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn identity4() -> Self {
        Self::from_fn(4, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diagonal(values: &[Complex64]) -> Result<Self> {
        check_dim(values.len())?;
        Ok(Self::from_fn(values.len(), |i, j| {
            if i == j {
                values[i]
            } else {
                ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        assert!(row < self.dim && col < self.dim, "index out of range");
        self.entries[row * self.dim + col]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries[..self.dim * self.dim]
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) * factor)
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - adjoint(self)`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise modulus of `self - other`; infinite on dimension mismatch.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &OperatorMatrix, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn checked_mul(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        let n = self.dim;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum()
        }))
    }

    pub fn checked_add(&self, rhs: &OperatorMatrix) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(Self::from_fn(self.dim, |i, j| self.get(i, j) + rhs.get(i, j)))
    }

    /// `self · psi`.
    pub fn apply(&self, psi: &StateVector) -> Result<Vec<Complex64>> {
        if self.dim != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        Ok((0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j) * psi.amplitudes()[j])
                    .sum()
            })
            .collect())
    }

    /// `⟨bra| self |ket⟩`.
    pub fn sandwich(&self, bra: &StateVector, ket: &StateVector) -> Result<Complex64> {
        let applied = self.apply(ket)?;
        if bra.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: bra.dim(),
            });
        }
        Ok(bra
            .amplitudes()
            .iter()
            .zip(&applied)
            .map(|(b, a)| b.conj() * a)
            .sum())
    }

    /// `⟨psi| self |psi⟩`.
    pub fn expectation(&self, psi: &StateVector) -> Result<Complex64> {
        self.sandwich(psi, psi)
    }
}

// Arithmetic on equal-dimension operators; mixing dimensions is a programming
// error and panics. Use the `checked_*` methods for untrusted inputs.
impl Add for OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: OperatorMatrix) -> OperatorMatrix {
        self.checked_add(&rhs).expect("operator dimensions must match")
    }
}

impl Sub for OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: OperatorMatrix) -> OperatorMatrix {
        self.checked_add(&-rhs).expect("operator dimensions must match")
    }
}

impl Neg for OperatorMatrix {
    type Output = OperatorMatrix;

    fn neg(self) -> OperatorMatrix {
        self.scale_real(-1.0)
    }
}

impl Mul for OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        self.checked_mul(&rhs).expect("operator dimensions must match")
    }
}

impl Mul<OperatorMatrix> for Complex64 {
    type Output = OperatorMatrix;

    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        rhs.scale(self)
    }
}

impl Mul<OperatorMatrix> for f64 {
    type Output = OperatorMatrix;

    fn mul(self, rhs: OperatorMatrix) -> OperatorMatrix {
        rhs.scale_real(self)
    }
}

/// Normalized state vector of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        for z in &amplitudes {
            complex(z.re, z.im)?;
        }
        let norm_squared: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_squared - 1.0).abs() > EXACT_TOL {
            return Err(Error::NotNormalized { norm_squared });
        }
        Ok(Self { amplitudes })
    }

    /// Scales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized {
                norm_squared: norm * norm,
            });
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Product state `self ⊗ other` of two qubits.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        for s in [self, other] {
            if s.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: s.dim(),
                });
            }
        }
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { amplitudes: amps })
    }
}

/// Pauli matrix for `axis`.
pub fn pauli(axis: Axis) -> OperatorMatrix {
    let entries = match axis {
        Axis::X => [ZERO, ONE, ONE, ZERO],
        Axis::Y => [ZERO, -I, I, ZERO],
        Axis::Z => [ONE, ZERO, ZERO, -ONE],
    };
    let mut m = OperatorMatrix::zeros(2);
    m.entries[..4].copy_from_slice(&entries);
    m
}

/// Eigenvector of `pauli(axis)` with eigenvalue `value`.
pub fn eigenstate(axis: Axis, value: Sign) -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amplitudes = match (axis, value) {
        (Axis::X, Sign::Plus) => vec![h, h],
        (Axis::X, Sign::Minus) => vec![h, -h],
        (Axis::Y, Sign::Plus) => vec![h, h * I],
        (Axis::Y, Sign::Minus) => vec![h, -h * I],
        (Axis::Z, Sign::Plus) => vec![ONE, ZERO],
        (Axis::Z, Sign::Minus) => vec![ZERO, ONE],
    };
    StateVector { amplitudes }
}

/// The singlet `(|01⟩ - |10⟩)/√2`.
pub fn singlet() -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector {
        amplitudes: vec![ZERO, h, -h, ZERO],
    }
}

/// Kronecker product of two single-qubit operators.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: m.dim,
            });
        }
    }
    Ok(OperatorMatrix::from_fn(4, |i, j| {
        a.get(i / 2, j / 2) * b.get(i % 2, j % 2)
    }))
}

/// `Tr(m · rho)`.
pub fn trace_product(m: &OperatorMatrix, rho: &OperatorMatrix) -> Result<Complex64> {
    if m.dim != rho.dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            found: rho.dim,
        });
    }
    let n = m.dim;
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += m.get(i, k) * rho.get(k, i);
        }
    }
    Ok(acc)
}

/// `|psi⟩⟨psi|`.
pub fn density(psi: &StateVector) -> OperatorMatrix {
    let a = psi.amplitudes();
    OperatorMatrix::from_fn(psi.dim(), |i, j| a[i] * a[j].conj())
}

/// Maximally mixed state `I/dim`.
pub fn maximally_mixed(dim: usize) -> Result<OperatorMatrix> {
    Ok(OperatorMatrix::identity(dim)?.scale_real(1.0 / dim as f64))
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue_hermitian(m: &OperatorMatrix) -> Result<f64> {
    let defect = m.hermiticity_defect();
    if defect > EXACT_TOL {
        return Err(Error::NotHermitian { defect });
    }
    match m.dim {
        2 => {
            // (a, d real), off-diagonal b: λ = (a + d)/2 ± sqrt(((a - d)/2)² + |b|²)
            let a = m.get(0, 0).re;
            let d = m.get(1, 1).re;
            let b = m.get(0, 1);
            let mean = 0.5 * (a + d);
            let half_gap = 0.5 * (a - d);
            Ok(mean - half_gap.hypot(b.norm()))
        }
        _ => {
            let h = Matrix4::from_fn(|i, j| {
                // symmetrize away the sub-tolerance defect before the eigensolve
                0.5 * (m.get(i, j) + m.get(j, i).conj())
            });
            let eig = h.symmetric_eigenvalues();
            Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
        }
    }
}

/// Checks that `rho` is a density matrix: Hermitian, unit trace, positive.
pub fn validate_density(rho: &OperatorMatrix) -> Result<()> {
    let defect = rho.hermiticity_defect();
    if defect > EXACT_TOL {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (defect {defect:e})"
        )));
    }
    let tr = rho.trace();
    if (tr - ONE).norm() > EXACT_TOL {
        return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
    }
    let min = min_eigenvalue_hermitian(rho)?;
    if min < -EIGEN_TOL {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

/// Single-qubit density matrix `(I + bx X + by Y + bz Z)/2` for a Bloch vector
/// of length at most one.
pub fn bloch_density(bx: f64, by: f64, bz: f64) -> Result<OperatorMatrix> {
    for v in [bx, by, bz] {
        complex(v, 0.0)?;
    }
    let r2 = bx * bx + by * by + bz * bz;
    if r2 > 1.0 + EXACT_TOL {
        return Err(Error::InvalidDensity(format!(
            "Bloch vector length² {r2} > 1"
        )));
    }
    Ok(0.5
        * (OperatorMatrix::identity2()
            + bx * pauli(Axis::X)
            + by * pauli(Axis::Y)
            + bz * pauli(Axis::Z)))
}
