//! Scenario configuration: a single JSON file with explicit unit suffixes in
//! key names. Unknown keys are rejected so misspellings fail closed.

use anyhow::{bail, Context, Result};
use nalgebra::Vector3;
use serde::Deserialize;
use vdw_core::constants::{DEBYE, EV, HBAR};
use vdw_core::green::{DiluteBody, Environment};
use vdw_core::quad::QuadratureSpec;
use vdw_core::{load_species, AtomicSpecies, PopulationState, SpeciesRecord};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub atom_a: AtomConfig,
    #[serde(default)]
    pub atom_b: Option<AtomConfig>,
    #[serde(default)]
    pub environment: Option<EnvironmentConfig>,
    pub scan: ScanConfig,
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    pub output: OutputConfig,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub levels: Vec<LevelConfig>,
    #[serde(default)]
    pub dipoles: Vec<DipoleConfig>,
    #[serde(default)]
    pub rates: Vec<RateConfig>,
    #[serde(default)]
    pub position_nm: Option<[f64; 3]>,
    #[serde(default)]
    pub position_m: Option<[f64; 3]>,
    /// Label of the initially occupied level, or a uniform mixture over
    /// several labels; defaults to the ground state.
    #[serde(default)]
    pub initial_level: Option<String>,
    #[serde(default)]
    pub initial_mixture: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub label: String,
    #[serde(default, rename = "energy_eV")]
    pub energy_ev: Option<f64>,
    #[serde(default, rename = "energy_J")]
    pub energy_j: Option<f64>,
    #[serde(default)]
    pub omega_radpersec: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    pub from: String,
    pub to: String,
    #[serde(default, rename = "dipole_Cm")]
    pub dipole_cm: Option<[f64; 3]>,
    #[serde(default, rename = "dipole_D")]
    pub dipole_debye: Option<[f64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateConfig {
    pub from: String,
    pub to: String,
    pub rate_per_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum EnvironmentConfig {
    #[serde(rename = "free_space")]
    FreeSpace {},
    #[serde(rename = "dilute_body")]
    DiluteBody {
        species: Box<AtomConfig>,
        lattice: LatticeConfig,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub origin_nm: [f64; 3],
    pub spacing_nm: f64,
    pub counts: [usize; 3],
    #[serde(default)]
    pub number_density_per_m3: Option<f64>,
    #[serde(default)]
    pub weight_per_point: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum GridScale {
    Linear,
    Log,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", deny_unknown_fields)]
pub enum ScanConfig {
    #[serde(rename = "distance")]
    Distance {
        start_nm: f64,
        stop_nm: f64,
        count: usize,
        scale: GridScale,
        time_s: f64,
    },
    #[serde(rename = "time")]
    Time {
        start_s: f64,
        stop_s: f64,
        count: usize,
        scale: GridScale,
        #[serde(default)]
        distance_nm: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default)]
    pub relative_tolerance: Option<f64>,
    #[serde(default, rename = "absolute_floor_N")]
    pub absolute_floor_n: Option<f64>,
    #[serde(default)]
    pub max_subdivisions: Option<u32>,
    #[serde(default)]
    pub substitution_scale_radpersec: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: String,
    #[serde(default)]
    pub svg: Option<String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("configuration rejected")
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        let mut spec = QuadratureSpec::default();
        if let Some(q) = &self.quadrature {
            if let Some(v) = q.relative_tolerance {
                spec.relative_tolerance = v;
            }
            if let Some(v) = q.absolute_floor_n {
                spec.absolute_floor = v;
            }
            if let Some(v) = q.max_subdivisions {
                spec.max_subdivisions = v;
            }
            spec.substitution_scale = q.substitution_scale_radpersec;
        }
        spec
    }
}

impl AtomConfig {
    fn position(&self) -> Result<Vector3<f64>> {
        match (&self.position_nm, &self.position_m) {
            (Some(_), Some(_)) => bail!("specify at most one of position_nm / position_m"),
            (Some(p), None) => Ok(Vector3::new(p[0], p[1], p[2]) * 1e-9),
            (None, Some(p)) => Ok(Vector3::new(p[0], p[1], p[2])),
            (None, None) => Ok(Vector3::zeros()),
        }
    }

    pub fn has_explicit_position(&self) -> bool {
        self.position_nm.is_some() || self.position_m.is_some()
    }

    /// Build the validated species together with its initial populations.
    pub fn build(&self, fallback_name: &str) -> Result<(AtomicSpecies, PopulationState)> {
        let name = self.name.clone().unwrap_or_else(|| fallback_name.to_string());
        let mut levels = Vec::new();
        for level in &self.levels {
            let energy = match (level.energy_ev, level.energy_j, level.omega_radpersec) {
                (Some(ev), None, None) => ev * EV,
                (None, Some(j), None) => j,
                (None, None, Some(omega)) => omega * HBAR,
                _ => bail!(
                    "level `{}` must set exactly one of energy_eV / energy_J / omega_radpersec",
                    level.label
                ),
            };
            levels.push((level.label.clone(), energy));
        }
        let mut dipoles = Vec::new();
        for dipole in &self.dipoles {
            let vector = match (&dipole.dipole_cm, &dipole.dipole_debye) {
                (Some(v), None) => Vector3::new(v[0], v[1], v[2]),
                (None, Some(v)) => Vector3::new(v[0], v[1], v[2]) * DEBYE,
                _ => bail!(
                    "dipole {} -> {} must set exactly one of dipole_Cm / dipole_D",
                    dipole.from,
                    dipole.to
                ),
            };
            dipoles.push((dipole.from.clone(), dipole.to.clone(), vector));
        }
        let rates = self
            .rates
            .iter()
            .map(|r| (r.from.clone(), r.to.clone(), r.rate_per_s))
            .collect();
        let species = load_species(&SpeciesRecord {
            name,
            levels,
            dipoles,
            rates,
            position: self.position()?,
        })?;

        let populations = match (&self.initial_level, &self.initial_mixture) {
            (Some(_), Some(_)) => {
                bail!("specify at most one of initial_level / initial_mixture")
            }
            (Some(label), None) => {
                let index = species
                    .level_index(label)
                    .with_context(|| format!("unknown initial level `{label}`"))?;
                PopulationState::excited(&species, index)
            }
            (None, Some(labels)) => {
                let mut parts = Vec::new();
                for label in labels {
                    let index = species
                        .level_index(label)
                        .with_context(|| format!("unknown initial level `{label}`"))?;
                    parts.push((index, 1.0));
                }
                PopulationState::mixture(&species, &parts)?
            }
            (None, None) => PopulationState::ground(&species),
        };
        Ok((species, populations))
    }
}

impl EnvironmentConfig {
    pub fn build(&self) -> Result<Environment> {
        match self {
            EnvironmentConfig::FreeSpace {} => Ok(Environment::FreeSpace),
            EnvironmentConfig::DiluteBody { species, lattice } => {
                if species.has_explicit_position() {
                    bail!("body species position comes from the lattice, not the record");
                }
                if species.initial_level.is_some() || species.initial_mixture.is_some() {
                    bail!("body atoms are ground-state; initial levels are not configurable");
                }
                let (body_species, _) = species.build("body")?;
                let spacing = lattice.spacing_nm * 1e-9;
                if spacing <= 0.0 {
                    bail!("lattice spacing must be positive");
                }
                if lattice.counts.contains(&0) {
                    bail!("lattice counts must be positive");
                }
                let weight = match (lattice.number_density_per_m3, lattice.weight_per_point) {
                    (Some(eta), None) => eta * spacing.powi(3),
                    (None, Some(w)) => w,
                    _ => bail!(
                        "lattice must set exactly one of number_density_per_m3 / weight_per_point"
                    ),
                };
                if weight <= 0.0 {
                    bail!("lattice point weight must be positive");
                }
                let origin = Vector3::new(
                    lattice.origin_nm[0],
                    lattice.origin_nm[1],
                    lattice.origin_nm[2],
                ) * 1e-9;
                Ok(Environment::DiluteBody(DiluteBody::lattice(
                    body_species,
                    origin,
                    spacing,
                    lattice.counts,
                    weight,
                )))
            }
        }
    }
}

/// Strictly increasing grid from a (start, stop, count, scale) block.
pub fn build_grid(start: f64, stop: f64, count: usize, scale: GridScale) -> Result<Vec<f64>> {
    if count == 0 {
        bail!("grid must be nonempty");
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if stop <= start {
        bail!("grid must be strictly increasing (start {start}, stop {stop})");
    }
    if scale == GridScale::Log && start <= 0.0 {
        bail!("log grid requires a positive start");
    }
    let points = (0..count)
        .map(|i| {
            let fraction = i as f64 / (count - 1) as f64;
            match scale {
                GridScale::Linear => start + (stop - start) * fraction,
                GridScale::Log => (start.ln() + (stop.ln() - start.ln()) * fraction).exp(),
            }
        })
        .collect();
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{
            "atom_a": {"levels": [{"label": "g", "energy_eV": 0.0}]},
            "scan": {"type": "time", "start_s": 0.0, "stop_s": 1.0, "count": 2, "scale": "linear"},
            "output": {"csv": "x.csv"},
            "misspelled": true
        }"#;
        assert!(ConfigFile::parse(text).is_err());
    }

    #[test]
    fn debye_dipoles_convert() {
        let config: AtomConfig = serde_json::from_str(
            r#"{
                "levels": [
                    {"label": "g", "energy_eV": 0.0},
                    {"label": "e", "omega_radpersec": 2.37e15}
                ],
                "dipoles": [{"from": "e", "to": "g", "dipole_D": [0.0, 0.0, 1.0]}]
            }"#,
        )
        .unwrap();
        let (species, pops) = config.build("a").unwrap();
        let d = species.dipole(1, 0).unwrap();
        assert!((d[2] - DEBYE).abs() < 1e-45);
        assert_eq!(pops.probability(0), 1.0);
    }

    #[test]
    fn duplicate_unit_fields_are_rejected() {
        let config: AtomConfig = serde_json::from_str(
            r#"{
                "levels": [{"label": "g", "energy_eV": 0.0, "energy_J": 0.0}]
            }"#,
        )
        .unwrap();
        assert!(config.build("a").is_err());
    }

    #[test]
    fn grids_validate_monotonicity() {
        assert!(build_grid(1.0, 1.0, 5, GridScale::Linear).is_err());
        assert!(build_grid(0.0, 1.0, 5, GridScale::Log).is_err());
        let grid = build_grid(1.0, 100.0, 3, GridScale::Log).unwrap();
        assert!((grid[1] - 10.0).abs() < 1e-12);
    }
}
