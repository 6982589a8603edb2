//! Single-atom resonant Casimir-Polder force near a dilute body and its
//! pairwise-sum consistency under the Born expansion.

use nalgebra::{Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::atomic::{AtomicError, AtomicSpecies, PopulationState};
use crate::constants::MU0;
use crate::force::{resonant_force, ForceError};
use crate::green::{born_scattering_green, DiluteBody, Environment, GreenError};

#[derive(Debug, Error)]
pub enum CasimirPolderError {
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Atomic(#[from] AtomicError),
    #[error(transparent)]
    Force(#[from] ForceError),
    #[error("atom placed on a body point")]
    AtomOnBodyPoint,
}

fn check_atom_clear_of_body(
    atom: &AtomicSpecies,
    body: &DiluteBody,
) -> Result<(), CasimirPolderError> {
    if body
        .points
        .iter()
        .any(|p| p.position == atom.position())
    {
        return Err(CasimirPolderError::AtomOnBodyPoint);
    }
    Ok(())
}

/// Resonant Casimir-Polder force on an excited atom near a dilute body:
/// `mu0 sum_n p_n sum_{k<n} omega_nk^2 grad Re[d . G1(rA, rA, omega_nk) . d]`
/// with the scattering tensor from the leading Born expansion. The gradient
/// differentiates both coincident slots of `G1`; by reciprocity that is the
/// first-slot gradient plus its transpose.
pub fn single_atom_cp_resonant(
    atom: &AtomicSpecies,
    populations: &PopulationState,
    body: &DiluteBody,
    t: f64,
) -> Result<Vector3<f64>, CasimirPolderError> {
    if body.points.is_empty() {
        return Ok(Vector3::zeros());
    }
    check_atom_clear_of_body(atom, body)?;
    let mut force = Vector3::zeros();
    for n in 0..atom.num_levels() {
        let p_n = populations.probability(n);
        if p_n == 0.0 {
            continue;
        }
        for (k, dipole) in atom.downward_transitions(n) {
            let omega = atom.omega(n, k);
            if omega <= 0.0 {
                continue;
            }
            let sample = born_scattering_green(
                body,
                atom.position(),
                atom.position(),
                Complex64::new(omega, 0.0),
                t,
            )?;
            let d = dipole.map(|x| Complex64::new(x, 0.0));
            let gradient = Vector3::from_fn(|idx, _| {
                let slot_one = &sample.gradient[idx];
                let both_slots = slot_one + slot_one.transpose();
                (d.transpose() * both_slots * d)[(0, 0)].re
            });
            force += gradient * (MU0 * p_n * omega * omega);
        }
    }
    Ok(force)
}

/// The same force assembled as the weighted sum over two-atom oscillating
/// resonant forces against a ground-state body atom at each point; equals
/// [`single_atom_cp_resonant`] on the identical point set to algebraic
/// precision.
pub fn pairwise_cp_sum(
    atom: &AtomicSpecies,
    populations: &PopulationState,
    body: &DiluteBody,
    t: f64,
) -> Result<Vector3<f64>, CasimirPolderError> {
    if body.points.is_empty() {
        return Ok(Vector3::zeros());
    }
    check_atom_clear_of_body(atom, body)?;
    let mut force = Vector3::zeros();
    for point in &body.points {
        let species = body.species.get(point.species).ok_or(
            GreenError::BadSpeciesIndex {
                index: point.species,
                count: body.species.len(),
            },
        )?;
        let partner = species.with_position(point.position);
        let ground = PopulationState::ground(&partner);
        let pair = resonant_force(
            atom,
            &partner,
            populations,
            &ground,
            &Environment::FreeSpace,
            t,
        )?;
        force += pair.total * point.weight;
    }
    Ok(force)
}
