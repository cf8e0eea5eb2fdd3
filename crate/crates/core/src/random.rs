//! Random states and operators for sweeps and property tests.

use num_complex::Complex64;
use rand::Rng;

use crate::povm::VisibilityTriple;
use crate::qubit::{bloch_density, pauli, Axis, OperatorMatrix, StateVector, I};

/// Uniform point in the closed unit ball.
pub fn random_bloch_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        ];
        if v.iter().map(|c: &f64| c * c).sum::<f64>() <= 1.0 {
            return v;
        }
    }
}

/// Uniform direction on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = random_bloch_vector(rng);
        let n = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.map(|c| c / n);
        }
    }
}

/// Mixed (or pure) single-qubit state with a uniformly random Bloch vector.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> OperatorMatrix {
    let [x, y, z] = random_bloch_vector(rng);
    bloch_density(x, y, z).expect("point inside the Bloch ball")
}

/// Pure single-qubit state with a uniformly random Bloch direction.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R) -> StateVector {
    let [x, y, z] = random_unit_vector(rng);
    // |ψ⟩ = (cos θ/2, e^{iφ} sin θ/2)
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    StateVector::normalized(vec![
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    ])
    .expect("unit vector")
}

/// Random single-qubit unitary `e^{iα}(cos t·I + i sin t·n·σ)`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> OperatorMatrix {
    let [nx, ny, nz] = random_unit_vector(rng);
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let alpha: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let generator = nx * pauli(Axis::X) + ny * pauli(Axis::Y) + nz * pauli(Axis::Z);
    let u = t.cos() * OperatorMatrix::identity2() + (I * t.sin()) * generator;
    Complex64::from_polar(1.0, alpha) * u
}

/// Random dense complex operator with entries uniform in the unit square.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> OperatorMatrix {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    OperatorMatrix::new(dim, &entries).expect("dimension 2 or 4")
}

/// Random Hermitian operator `(A + A†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> OperatorMatrix {
    let a = random_matrix(rng, dim);
    0.5 * (a + a.adjoint())
}

/// Random full-rank density matrix `A A† / Tr(A A†)`.
pub fn random_density_n<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> OperatorMatrix {
    let a = random_matrix(rng, dim);
    let m = a * a.adjoint();
    let tr = m.trace().re;
    // exact Hermiticity after rounding
    let m = 0.5 * (m + m.adjoint());
    m.scale_real(1.0 / tr)
}

/// Valid visibility triple with every component at least `min_abs` in magnitude.
pub fn random_visibilities<R: Rng + ?Sized>(rng: &mut R, min_abs: f64) -> VisibilityTriple {
    loop {
        let vx = rng.gen_range(min_abs..=1.0);
        let vy = rng.gen_range(min_abs..=1.0);
        let vz = rng.gen_range(min_abs..=1.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        if let Ok(v) = VisibilityTriple::new(vx, vy, vz) {
            return v;
        }
    }
}
