//! Time-dependent van der Waals forces between excited atoms in free space
//! or near dilute magnetodielectric bodies.
//!
//! The crate separates the physics into five layers:
//!
//! * [`atomic`] — level schemes, dipole data, spontaneous-decay population
//!   dynamics and state-resolved polarizabilities;
//! * [`mod@green`] — free-space and Born-scattering dyadic Green tensors
//!   with analytic gradients;
//! * [`kernels`] — the frequency-domain energy-denominator algebra and the
//!   f1/f2/g1/g2 spectral kernels, directly property-testable;
//! * [`force`] — the resonant/non-resonant two-atom force engines, the
//!   non-retarded limit and the isotropic free-space closed form;
//! * [`casimir_polder`] — the single-atom resonant Casimir-Polder force and
//!   its pairwise-sum consistency.

pub mod atomic;
pub mod casimir_polder;
pub mod constants;
pub mod force;
pub mod green;
pub mod kernels;
pub mod quad;

pub use atomic::{
    evolve_populations, free_space_decay_rate, load_species, polarizability,
    scalar_polarizability, AtomicError, AtomicSpecies, CascadeSolution, PopulationState,
    SpeciesRecord,
};
pub use casimir_polder::{pairwise_cp_sum, single_atom_cp_resonant, CasimirPolderError};
pub use force::{
    closed_form_resonant_free_space, nonresonant_force, nonretarded_force, resonant_force,
    total_force, AtomRole, ForceBreakdown, ForceError, ResonantChannel, ResonantForce,
    TransitionContribution,
};
pub use green::{
    born_scattering_green, free_space_green, green, BodyPoint, DiluteBody, Environment,
    GreenError, GreenSample,
};
pub use kernels::{
    combined_denominator_sum, denominator_inverse_sum, energy_denominators, g1_narrow_linewidth,
    g2_resonance_weight, spectral_kernels, KernelError, KernelParams, SpectralKernels,
};
pub use quad::{adaptive_gk15, semi_infinite, QuadratureError, QuadratureResult, QuadratureSpec};
