//! Atomic level schemes, dipole data, spontaneous-decay population dynamics,
//! and state-resolved polarizabilities.
//!
//! Levels are indexed in order of non-decreasing energy with index 0 the
//! ground state. Dipole matrix elements are real 3-vectors stored per
//! unordered level pair (time-reversal symmetry), and partial decay rates
//! are attached to downward pairs. Missing rates for downward transitions
//! with a nonzero dipole are filled from the free-space emission formula.

use std::collections::BTreeMap;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{C, EPS0, HBAR};

/// Relative degeneracy threshold for decay rates; below it the cascade
/// solver switches to the secular `t exp(-Gamma t)` branch.
pub const RATE_DEGENERACY_TOL: f64 = 1e-9;

/// Pole-proximity guard for polarizabilities at real frequency, as a
/// fraction of the transition frequency being probed.
pub const POLE_TOLERANCE_FACTOR: f64 = 1e-6;

/// Population bookkeeping tolerance: probabilities must sum to one within
/// this bound and stay inside `[0, 1]` up to the same slack.
pub const POPULATION_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AtomicError {
    #[error("species must contain at least one level")]
    NoLevels,
    #[error("level energies must be non-decreasing (level {index} breaks the order)")]
    NonMonotoneEnergies { index: usize },
    #[error("duplicate level label `{label}`")]
    DuplicateLabel { label: String },
    #[error("unknown level label `{label}`")]
    UnknownLabel { label: String },
    #[error("dipole map violates d_mn = d_nm for pair ({a}, {b})")]
    AsymmetricDipole { a: String, b: String },
    #[error("self-dipole d_nn must vanish (level `{label}`)")]
    SelfDipole { label: String },
    #[error("negative partial rate for {upper} -> {lower}")]
    NegativeRate { upper: String, lower: String },
    #[error("rate attached to non-downward pair {from} -> {to}")]
    UpwardRate { from: String, to: String },
    #[error("duplicate rate entry for {upper} -> {lower}")]
    DuplicateRate { upper: String, lower: String },
    #[error("free-space decay rate needs a positive frequency (got {omega} rad/s)")]
    NonpositiveFrequency { omega: f64 },
    #[error("populations invalid: {reason}")]
    InvalidPopulations { reason: String },
    #[error("population vector has {got} entries but the species has {expected} levels")]
    PopulationLength { got: usize, expected: usize },
    #[error("cannot evolve backwards: t = {t} s < initial time {t0} s")]
    BackwardsEvolution { t: f64, t0: f64 },
    #[error(
        "polarizability pole: omega = {omega} rad/s within {tolerance} rad/s of \
         transition at {transition} rad/s"
    )]
    PoleProximity {
        omega: f64,
        transition: f64,
        tolerance: f64,
    },
}

/// Free-space spontaneous emission rate of a dipole transition,
/// `Gamma = omega^3 |d|^2 / (3 pi eps0 hbar c^3)`.
pub fn free_space_decay_rate(omega: f64, dipole: &Vector3<f64>) -> Result<f64, AtomicError> {
    if omega <= 0.0 {
        return Err(AtomicError::NonpositiveFrequency { omega });
    }
    Ok(omega.powi(3) * dipole.norm_squared() / (3.0 * std::f64::consts::PI * EPS0 * HBAR * C * C * C))
}

/// Input record for [`load_species`]: labels, energies in J, dipoles in C m
/// and optional explicit partial rates in 1/s.
#[derive(Debug, Clone, Default)]
pub struct SpeciesRecord {
    pub name: String,
    /// (label, energy in J), ground state first.
    pub levels: Vec<(String, f64)>,
    /// (label_a, label_b, dipole vector in C m); order of the labels is
    /// irrelevant, but conflicting duplicates are rejected.
    pub dipoles: Vec<(String, String, Vector3<f64>)>,
    /// (upper label, lower label, partial rate in 1/s).
    pub rates: Vec<(String, String, f64)>,
    /// Atom position in m.
    pub position: Vector3<f64>,
}

/// A validated level scheme with dipole data, partial decay rates and a
/// position. Immutable after construction.
#[derive(Debug, Clone)]
pub struct AtomicSpecies {
    name: String,
    labels: Vec<String>,
    energies: Vec<f64>,
    dipoles: BTreeMap<(usize, usize), Vector3<f64>>,
    partial_rates: BTreeMap<(usize, usize), f64>,
    total_rates: Vec<f64>,
    position: Vector3<f64>,
}

/// Validate a record and fill missing downward rates from
/// [`free_space_decay_rate`].
pub fn load_species(record: &SpeciesRecord) -> Result<AtomicSpecies, AtomicError> {
    if record.levels.is_empty() {
        return Err(AtomicError::NoLevels);
    }
    let mut labels = Vec::with_capacity(record.levels.len());
    let mut energies = Vec::with_capacity(record.levels.len());
    for (i, (label, energy)) in record.levels.iter().enumerate() {
        if labels.contains(label) {
            return Err(AtomicError::DuplicateLabel {
                label: label.clone(),
            });
        }
        if i > 0 && *energy < energies[i - 1] {
            return Err(AtomicError::NonMonotoneEnergies { index: i });
        }
        labels.push(label.clone());
        energies.push(*energy);
    }
    let index_of = |label: &str| -> Result<usize, AtomicError> {
        labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| AtomicError::UnknownLabel {
                label: label.to_string(),
            })
    };

    let mut dipoles: BTreeMap<(usize, usize), Vector3<f64>> = BTreeMap::new();
    for (a, b, d) in &record.dipoles {
        let ia = index_of(a)?;
        let ib = index_of(b)?;
        if ia == ib {
            if d.norm() != 0.0 {
                return Err(AtomicError::SelfDipole { label: a.clone() });
            }
            continue;
        }
        let key = (ia.min(ib), ia.max(ib));
        match dipoles.get(&key) {
            Some(existing) if (existing - d).norm() > 0.0 => {
                return Err(AtomicError::AsymmetricDipole {
                    a: a.clone(),
                    b: b.clone(),
                });
            }
            _ => {
                dipoles.insert(key, *d);
            }
        }
    }

    let mut partial_rates: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (from, to, rate) in &record.rates {
        let upper = index_of(from)?;
        let lower = index_of(to)?;
        if upper <= lower {
            return Err(AtomicError::UpwardRate {
                from: from.clone(),
                to: to.clone(),
            });
        }
        if *rate < 0.0 {
            return Err(AtomicError::NegativeRate {
                upper: from.clone(),
                lower: to.clone(),
            });
        }
        if partial_rates.insert((upper, lower), *rate).is_some() {
            return Err(AtomicError::DuplicateRate {
                upper: from.clone(),
                lower: to.clone(),
            });
        }
    }

    // Fill missing rates for downward dipole transitions. Degenerate pairs
    // (zero splitting) emit at zero rate.
    for (&(lo, hi), dipole) in &dipoles {
        if partial_rates.contains_key(&(hi, lo)) {
            continue;
        }
        let omega = (energies[hi] - energies[lo]) / HBAR;
        let rate = if omega > 0.0 {
            free_space_decay_rate(omega, dipole)?
        } else {
            0.0
        };
        partial_rates.insert((hi, lo), rate);
    }

    let total_rates = (0..labels.len())
        .map(|n| {
            partial_rates
                .iter()
                .filter(|(&(upper, _), _)| upper == n)
                .map(|(_, &r)| r)
                .sum()
        })
        .collect();

    Ok(AtomicSpecies {
        name: record.name.clone(),
        labels,
        energies,
        dipoles,
        partial_rates,
        total_rates,
        position: record.position,
    })
}

impl AtomicSpecies {
    /// Two-level atom with a single dipole vector between ground and
    /// excited state; the decay rate is filled from the free-space formula.
    pub fn two_level(
        name: &str,
        omega: f64,
        dipole: Vector3<f64>,
        position: Vector3<f64>,
    ) -> Result<Self, AtomicError> {
        load_species(&SpeciesRecord {
            name: name.to_string(),
            levels: vec![("g".into(), 0.0), ("e".into(), HBAR * omega)],
            dipoles: vec![("e".into(), "g".into(), dipole)],
            rates: vec![],
            position,
        })
    }

    /// Isotropic atom: ground state plus three degenerate sublevels with
    /// orthogonal dipoles of equal magnitude `sublevel_dipole` along x, y, z.
    pub fn isotropic_two_level(
        name: &str,
        omega: f64,
        sublevel_dipole: f64,
        position: Vector3<f64>,
    ) -> Result<Self, AtomicError> {
        let d = sublevel_dipole;
        load_species(&SpeciesRecord {
            name: name.to_string(),
            levels: vec![
                ("g".into(), 0.0),
                ("ex".into(), HBAR * omega),
                ("ey".into(), HBAR * omega),
                ("ez".into(), HBAR * omega),
            ],
            dipoles: vec![
                ("ex".into(), "g".into(), Vector3::new(d, 0.0, 0.0)),
                ("ey".into(), "g".into(), Vector3::new(0.0, d, 0.0)),
                ("ez".into(), "g".into(), Vector3::new(0.0, 0.0, d)),
            ],
            rates: vec![],
            position,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_levels(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, n: usize) -> &str {
        &self.labels[n]
    }

    pub fn level_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    /// Transition frequency `omega_mn = (E_m - E_n)/hbar` (signed).
    pub fn omega(&self, m: usize, n: usize) -> f64 {
        (self.energies[m] - self.energies[n]) / HBAR
    }

    pub fn dipole(&self, m: usize, n: usize) -> Option<&Vector3<f64>> {
        self.dipoles.get(&(m.min(n), m.max(n)))
    }

    /// All unordered dipole pairs as (lower, upper, dipole).
    pub fn dipole_pairs(&self) -> impl Iterator<Item = (usize, usize, &Vector3<f64>)> {
        self.dipoles.iter().map(|(&(lo, hi), d)| (lo, hi, d))
    }

    /// Downward dipole transitions out of level `n`: (lower, dipole).
    pub fn downward_transitions(&self, n: usize) -> impl Iterator<Item = (usize, &Vector3<f64>)> {
        self.dipoles
            .iter()
            .filter(move |(&(_, hi), _)| hi == n)
            .map(|(&(lo, _), d)| (lo, d))
    }

    pub fn partial_rate(&self, upper: usize, lower: usize) -> f64 {
        self.partial_rates.get(&(upper, lower)).copied().unwrap_or(0.0)
    }

    /// Total decay rate `Gamma_n` of level `n`.
    pub fn total_rate(&self, n: usize) -> f64 {
        self.total_rates[n]
    }

    pub fn position(&self) -> Vector3<f64> {
        self.position
    }

    pub fn with_position(&self, position: Vector3<f64>) -> Self {
        let mut out = self.clone();
        out.position = position;
        out
    }

    /// Largest |omega_mn| over dipole-carrying pairs; zero for a single
    /// level or an all-degenerate scheme.
    pub fn max_transition_frequency(&self) -> f64 {
        self.dipoles
            .keys()
            .map(|&(lo, hi)| (self.omega(hi, lo)).abs())
            .fold(0.0, f64::max)
    }
}

/// Occupation probabilities of every level at a given time.
#[derive(Debug, Clone)]
pub struct PopulationState {
    probabilities: Vec<f64>,
    time: f64,
}

impl PopulationState {
    pub fn new(probabilities: Vec<f64>, time: f64) -> Result<Self, AtomicError> {
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > POPULATION_TOL {
            return Err(AtomicError::InvalidPopulations {
                reason: format!("probabilities sum to {sum}, expected 1"),
            });
        }
        if let Some(p) = probabilities
            .iter()
            .find(|&&p| !(-POPULATION_TOL..=1.0 + POPULATION_TOL).contains(&p))
        {
            return Err(AtomicError::InvalidPopulations {
                reason: format!("probability {p} outside [0, 1]"),
            });
        }
        Ok(Self {
            probabilities,
            time,
        })
    }

    /// All population in the ground state at t = 0.
    pub fn ground(species: &AtomicSpecies) -> Self {
        let mut probabilities = vec![0.0; species.num_levels()];
        probabilities[0] = 1.0;
        Self {
            probabilities,
            time: 0.0,
        }
    }

    /// All population in level `n` at t = 0.
    pub fn excited(species: &AtomicSpecies, n: usize) -> Self {
        let mut probabilities = vec![0.0; species.num_levels()];
        probabilities[n] = 1.0;
        Self {
            probabilities,
            time: 0.0,
        }
    }

    /// Incoherent mixture with the given (level, weight) pairs at t = 0;
    /// weights are normalized.
    pub fn mixture(species: &AtomicSpecies, parts: &[(usize, f64)]) -> Result<Self, AtomicError> {
        let total: f64 = parts.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            return Err(AtomicError::InvalidPopulations {
                reason: "mixture weights must have a positive sum".into(),
            });
        }
        let mut probabilities = vec![0.0; species.num_levels()];
        for &(n, w) in parts {
            if n >= species.num_levels() {
                return Err(AtomicError::PopulationLength {
                    got: n + 1,
                    expected: species.num_levels(),
                });
            }
            probabilities[n] += w / total;
        }
        Self::new(probabilities, 0.0)
    }

    pub fn probability(&self, n: usize) -> f64 {
        self.probabilities[n]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn time(&self) -> f64 {
        self.time
    }
}

/// One `coeff * tau^power * exp(-rate tau)` term of a cascade solution.
#[derive(Debug, Clone, Copy)]
struct ExpPolyTerm {
    rate: f64,
    power: u32,
    coeff: f64,
}

/// Exact solution of the downward rate-equation cascade
/// `dp_n/dt = -Gamma_n p_n + sum_{m>n} Gamma_{m->n} p_m`,
/// kept as exponential-polynomial terms per level so it can be evaluated
/// at arbitrary times without re-solving.
#[derive(Debug, Clone)]
pub struct CascadeSolution {
    terms: Vec<Vec<ExpPolyTerm>>,
    t0: f64,
}

impl CascadeSolution {
    pub fn new(species: &AtomicSpecies, initial: &PopulationState) -> Result<Self, AtomicError> {
        if initial.len() != species.num_levels() {
            return Err(AtomicError::PopulationLength {
                got: initial.len(),
                expected: species.num_levels(),
            });
        }
        let n_levels = species.num_levels();
        let mut terms: Vec<Vec<ExpPolyTerm>> = vec![Vec::new(); n_levels];
        for n in (0..n_levels).rev() {
            let gamma_n = species.total_rate(n);
            let mut level_terms = vec![ExpPolyTerm {
                rate: gamma_n,
                power: 0,
                coeff: initial.probability(n),
            }];
            for (m, upper_terms) in terms.iter().enumerate().skip(n + 1) {
                let feed = species.partial_rate(m, n);
                if feed == 0.0 {
                    continue;
                }
                for &term in upper_terms {
                    convolve_into(&mut level_terms, term, feed, gamma_n);
                }
            }
            merge_terms(&mut level_terms);
            terms[n] = level_terms;
        }
        Ok(Self {
            terms,
            t0: initial.time(),
        })
    }

    /// Populations at time `t >= t0`, renormalized to unit sum.
    pub fn at(&self, t: f64) -> Result<PopulationState, AtomicError> {
        if t < self.t0 {
            return Err(AtomicError::BackwardsEvolution { t, t0: self.t0 });
        }
        let tau = t - self.t0;
        let mut probabilities: Vec<f64> = self
            .terms
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|term| term.coeff * tau.powi(term.power as i32) * (-term.rate * tau).exp())
                    .sum::<f64>()
                    .clamp(0.0, 1.0)
            })
            .collect();
        let sum: f64 = probabilities.iter().sum();
        debug_assert!((sum - 1.0).abs() < 1e-9, "cascade lost probability: {sum}");
        for p in &mut probabilities {
            *p /= sum;
        }
        Ok(PopulationState {
            probabilities,
            time: t,
        })
    }
}

/// Append the convolution `feed * int_0^tau exp(-gamma_n (tau - s)) term(s) ds`
/// to `out`, using the secular branch for (near-)degenerate rates.
fn convolve_into(out: &mut Vec<ExpPolyTerm>, term: ExpPolyTerm, feed: f64, gamma_n: f64) {
    let mu = term.rate - gamma_n;
    let scale = term.rate.abs().max(gamma_n.abs());
    if mu.abs() <= RATE_DEGENERACY_TOL * scale {
        out.push(ExpPolyTerm {
            rate: gamma_n,
            power: term.power + 1,
            coeff: feed * term.coeff / (term.power + 1) as f64,
        });
        return;
    }
    // int_0^tau s^k e^{-mu s} ds = k!/mu^{k+1}
    //   - e^{-mu tau} sum_{j<=k} k!/(j! mu^{k+1-j}) tau^j
    let k = term.power;
    let factorial = |n: u32| (1..=n).map(|v| v as f64).product::<f64>();
    let lead = factorial(k) / mu.powi(k as i32 + 1);
    out.push(ExpPolyTerm {
        rate: gamma_n,
        power: 0,
        coeff: feed * term.coeff * lead,
    });
    for j in 0..=k {
        out.push(ExpPolyTerm {
            rate: term.rate,
            power: j,
            coeff: -feed * term.coeff * factorial(k) / (factorial(j) * mu.powi((k + 1 - j) as i32)),
        });
    }
}

fn merge_terms(terms: &mut Vec<ExpPolyTerm>) {
    terms.sort_by(|a, b| {
        a.rate
            .partial_cmp(&b.rate)
            .unwrap()
            .then(a.power.cmp(&b.power))
    });
    let mut merged: Vec<ExpPolyTerm> = Vec::with_capacity(terms.len());
    for term in terms.drain(..) {
        match merged.last_mut() {
            Some(last) if last.rate == term.rate && last.power == term.power => {
                last.coeff += term.coeff;
            }
            _ => merged.push(term),
        }
    }
    merged.retain(|t| t.coeff != 0.0);
    *terms = merged;
}

/// Evolve a population state to time `t` along the spontaneous-decay
/// cascade. Exact (eigen-decomposed) solution; `t` may not precede the
/// state's own time.
pub fn evolve_populations(
    species: &AtomicSpecies,
    initial: &PopulationState,
    t: f64,
) -> Result<PopulationState, AtomicError> {
    CascadeSolution::new(species, initial)?.at(t)
}

/// State-resolved dipole polarizability tensor
/// `alpha(omega) = (1/hbar) sum_n p_n sum_k d_kn d_nk [1/(omega_kn + omega) + 1/(omega_kn - omega)]`
/// in C^2 m^2 / J.
///
/// At real `omega` every contributing transition must stay clear of
/// resonance by `POLE_TOLERANCE_FACTOR * omega_kn`; violations are the
/// caller's signal that a resonantly driven configuration is outside the
/// model.
pub fn polarizability(
    species: &AtomicSpecies,
    populations: &PopulationState,
    omega: Complex64,
) -> Result<Matrix3<Complex64>, AtomicError> {
    if populations.len() != species.num_levels() {
        return Err(AtomicError::PopulationLength {
            got: populations.len(),
            expected: species.num_levels(),
        });
    }
    let mut alpha = Matrix3::<Complex64>::zeros();
    for n in 0..species.num_levels() {
        let p_n = populations.probability(n);
        if p_n == 0.0 {
            continue;
        }
        for (lo, hi, dipole) in species.dipole_pairs() {
            let k = if lo == n {
                hi
            } else if hi == n {
                lo
            } else {
                continue;
            };
            let omega_kn = species.omega(k, n);
            if omega.im == 0.0 && omega_kn != 0.0 {
                let tolerance = POLE_TOLERANCE_FACTOR * omega_kn.abs();
                let distance = (omega.re.abs() - omega_kn.abs()).abs();
                if distance < tolerance {
                    return Err(AtomicError::PoleProximity {
                        omega: omega.re,
                        transition: omega_kn,
                        tolerance,
                    });
                }
            }
            let resonance = Complex64::new(omega_kn, 0.0);
            let weight = (resonance + omega).inv() + (resonance - omega).inv();
            let dyadic = dipole * dipole.transpose();
            let factor = weight * p_n / HBAR;
            for i in 0..3 {
                for j in 0..3 {
                    alpha[(i, j)] += factor * dyadic[(i, j)];
                }
            }
        }
    }
    Ok(alpha)
}

/// Scalar (orientation-averaged) polarizability `tr alpha / 3`.
pub fn scalar_polarizability(
    species: &AtomicSpecies,
    populations: &PopulationState,
    omega: Complex64,
) -> Result<Complex64, AtomicError> {
    Ok(polarizability(species, populations, omega)?.trace() / 3.0)
}
