//! Electromagnetic dyadic Green tensors.
//!
//! Free-space tensor in the `E_source(r) = mu0 omega^2 G(r, r', omega) . d`
//! normalization, valid at real and complex frequency, with the gradient
//! with respect to the first argument evaluated analytically. On top of it,
//! the leading-order Born scattering tensor of a dilute body described by a
//! weighted point set of ground-state atoms.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::atomic::{evolve_populations, polarizability, AtomicError, AtomicSpecies, PopulationState};
use crate::constants::{C, MU0};

/// Below this |omega rho / c| the closed form is replaced by its Laurent
/// series around zero frequency.
pub const SERIES_SWITCH: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("Green tensor evaluated at coincident points")]
    CoincidentPoints,
    #[error("Green tensor evaluated at zero frequency")]
    ZeroFrequency,
    #[error("body point references species index {index} but only {count} are defined")]
    BadSpeciesIndex { index: usize, count: usize },
    #[error("body point weights must be positive and finite (got {weight})")]
    InvalidWeight { weight: f64 },
    #[error(transparent)]
    Atomic(#[from] AtomicError),
}

/// Green tensor value (1/m) and its gradient with respect to the first
/// spatial argument (1/m^2); `gradient[k]` is the derivative along axis k.
#[derive(Debug, Clone)]
pub struct GreenSample {
    pub value: Matrix3<Complex64>,
    pub gradient: [Matrix3<Complex64>; 3],
}

impl GreenSample {
    pub fn zero() -> Self {
        Self {
            value: Matrix3::zeros(),
            gradient: [Matrix3::zeros(); 3],
        }
    }

    fn add_assign(&mut self, other: &GreenSample) {
        self.value += other.value;
        for k in 0..3 {
            self.gradient[k] += other.gradient[k];
        }
    }
}

/// One polarizable point of a dilute body: position, dimensionless weight
/// `eta dV` (number of atoms represented), and an index into the body's
/// species table.
#[derive(Debug, Clone)]
pub struct BodyPoint {
    pub position: Vector3<f64>,
    pub weight: f64,
    pub species: usize,
}

/// Dilute body as a weighted point set of ground-state atoms.
#[derive(Debug, Clone)]
pub struct DiluteBody {
    pub species: Vec<AtomicSpecies>,
    pub points: Vec<BodyPoint>,
}

impl DiluteBody {
    /// Rectangular lattice of `counts` points spaced by `spacing`, starting
    /// at `origin`, every point carrying the same weight.
    pub fn lattice(
        species: AtomicSpecies,
        origin: Vector3<f64>,
        spacing: f64,
        counts: [usize; 3],
        weight: f64,
    ) -> Self {
        let mut points = Vec::with_capacity(counts[0] * counts[1] * counts[2]);
        for ix in 0..counts[0] {
            for iy in 0..counts[1] {
                for iz in 0..counts[2] {
                    points.push(BodyPoint {
                        position: origin
                            + spacing * Vector3::new(ix as f64, iy as f64, iz as f64),
                        weight,
                        species: 0,
                    });
                }
            }
        }
        Self {
            species: vec![species],
            points,
        }
    }
}

/// Electromagnetic environment of the atoms.
#[derive(Debug, Clone)]
pub enum Environment {
    FreeSpace,
    DiluteBody(DiluteBody),
}

// Laurent coefficients of A(s) = e^{is}(1 + i/s - 1/s^2) and
// B(s) = -e^{is}(1 + 3i/s - 3/s^2), for powers s^{-2} .. s^7.
const COEFF_A: [Complex64; 10] = [
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.5, 0.0),
    Complex64::new(0.0, 2.0 / 3.0),
    Complex64::new(-3.0 / 8.0, 0.0),
    Complex64::new(0.0, -2.0 / 15.0),
    Complex64::new(5.0 / 144.0, 0.0),
    Complex64::new(0.0, 1.0 / 140.0),
    Complex64::new(-7.0 / 5760.0, 0.0),
    Complex64::new(0.0, -1.0 / 5670.0),
];
const COEFF_B: [Complex64; 10] = [
    Complex64::new(3.0, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(0.5, 0.0),
    Complex64::new(0.0, 0.0),
    Complex64::new(1.0 / 8.0, 0.0),
    Complex64::new(0.0, 1.0 / 15.0),
    Complex64::new(-1.0 / 48.0, 0.0),
    Complex64::new(0.0, -1.0 / 210.0),
    Complex64::new(1.0 / 1152.0, 0.0),
    Complex64::new(0.0, 1.0 / 7560.0),
];

fn laurent(coeffs: &[Complex64; 10], s: Complex64) -> Complex64 {
    let mut acc = Complex64::default();
    for &c in coeffs.iter().rev() {
        acc = acc * s + c;
    }
    acc / (s * s)
}

/// Same series with every s^k coefficient scaled by (k - 1); evaluates
/// s X'(s) - X(s), the combination entering the radial gradient.
fn laurent_tilde(coeffs: &[Complex64; 10], s: Complex64) -> Complex64 {
    let mut acc = Complex64::default();
    for (j, &c) in coeffs.iter().enumerate().rev() {
        let k = j as f64 - 2.0;
        acc = acc * s + c * (k - 1.0);
    }
    acc / (s * s)
}

/// Radial scalar coefficients (A, B, sA'-A, sB'-B) of the free-space tensor.
fn radial_coefficients(s: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
    if s.norm() < SERIES_SWITCH {
        (
            laurent(&COEFF_A, s),
            laurent(&COEFF_B, s),
            laurent_tilde(&COEFF_A, s),
            laurent_tilde(&COEFF_B, s),
        )
    } else {
        let i = Complex64::i();
        let phase = (i * s).exp();
        let inv = s.inv();
        let inv2 = inv * inv;
        let a = phase * (1.0 + i * inv - inv2);
        let b = -phase * (1.0 + 3.0 * i * inv - 3.0 * inv2);
        let at = phase * (i * s - 2.0 - 3.0 * i * inv + 3.0 * inv2);
        let bt = phase * (-i * s + 4.0 + 9.0 * i * inv - 9.0 * inv2);
        (a, b, at, bt)
    }
}

/// Free-space dyadic Green tensor
/// `G0 = (e^{i omega rho / c} / 4 pi rho) [(1 + ic/(omega rho) - c^2/(omega rho)^2) I
///  - (1 + 3ic/(omega rho) - 3 c^2/(omega rho)^2) e e]`
/// with `rho = |r_a - r_b|`, plus its analytic gradient in `r_a`.
pub fn free_space_green(
    r_a: Vector3<f64>,
    r_b: Vector3<f64>,
    omega: Complex64,
) -> Result<GreenSample, GreenError> {
    let separation = r_a - r_b;
    let rho = separation.norm();
    if rho == 0.0 {
        return Err(GreenError::CoincidentPoints);
    }
    if omega == Complex64::default() {
        return Err(GreenError::ZeroFrequency);
    }
    let unit = separation / rho;
    let s = omega * rho / C;
    let (a, b, at, bt) = radial_coefficients(s);

    let pref_v = 1.0 / (4.0 * std::f64::consts::PI * rho);
    let pref_g = pref_v / rho;
    let mut value = Matrix3::zeros();
    let mut gradient = [Matrix3::zeros(); 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            value[(i, j)] = pref_v * (a * delta + b * unit[i] * unit[j]);
            for (k, grad) in gradient.iter_mut().enumerate() {
                let dki = if k == i { 1.0 } else { 0.0 };
                let dkj = if k == j { 1.0 } else { 0.0 };
                grad[(i, j)] = pref_g
                    * (unit[k] * (at * delta + bt * unit[i] * unit[j])
                        + b * (dki * unit[j] + dkj * unit[i]
                            - 2.0 * unit[k] * unit[i] * unit[j]));
            }
        }
    }
    Ok(GreenSample { value, gradient })
}

fn body_polarizabilities(
    body: &DiluteBody,
    omega: Complex64,
    t: f64,
) -> Result<Vec<Matrix3<Complex64>>, GreenError> {
    body.species
        .iter()
        .map(|species| {
            let ground = PopulationState::ground(species);
            let populations = evolve_populations(species, &ground, t.max(0.0))?;
            Ok(polarizability(species, &populations, omega)?)
        })
        .collect()
}

/// Leading-order Born scattering tensor of a dilute body,
/// `G1(r, r', omega) = mu0 omega^2 sum_i w_i G0(r, r_i) . alpha_i(omega) . G0(r_i, r')`,
/// with the gradient taken on the explicit r-dependence of the left factor.
/// An empty point set yields the zero tensor.
pub fn born_scattering_green(
    body: &DiluteBody,
    r: Vector3<f64>,
    r_prime: Vector3<f64>,
    omega: Complex64,
    t: f64,
) -> Result<GreenSample, GreenError> {
    let mut out = GreenSample::zero();
    if body.points.is_empty() {
        return Ok(out);
    }
    let alphas = body_polarizabilities(body, omega, t)?;
    let prefactor = omega * omega * MU0;
    for point in &body.points {
        if !(point.weight > 0.0 && point.weight.is_finite()) {
            return Err(GreenError::InvalidWeight {
                weight: point.weight,
            });
        }
        let alpha = alphas
            .get(point.species)
            .ok_or(GreenError::BadSpeciesIndex {
                index: point.species,
                count: body.species.len(),
            })?;
        let left = free_space_green(r, point.position, omega)?;
        let right = free_space_green(point.position, r_prime, omega)?;
        let alpha_right = alpha * right.value;
        out.value += (left.value * alpha_right).scale_by(prefactor * point.weight);
        for k in 0..3 {
            out.gradient[k] +=
                (left.gradient[k] * alpha_right).scale_by(prefactor * point.weight);
        }
    }
    Ok(out)
}

trait ScaleBy {
    fn scale_by(self, factor: Complex64) -> Self;
}

impl ScaleBy for Matrix3<Complex64> {
    fn scale_by(self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }
}

/// Total Green tensor of the environment, `G = G0 + G1`.
pub fn green(
    env: &Environment,
    r: Vector3<f64>,
    r_prime: Vector3<f64>,
    omega: Complex64,
    t: f64,
) -> Result<GreenSample, GreenError> {
    let mut sample = free_space_green(r, r_prime, omega)?;
    if let Environment::DiluteBody(body) = env {
        sample.add_assign(&born_scattering_green(body, r, r_prime, omega, t)?);
    }
    Ok(sample)
}
