//! Scan execution: force-vs-distance, force-vs-time and cp-consistency,
//! each producing one deterministic CSV (and optionally an SVG plot).

use anyhow::{bail, Context, Result};
use nalgebra::Vector3;
use rayon::prelude::*;
use vdw_core::casimir_polder::{pairwise_cp_sum, single_atom_cp_resonant};
use vdw_core::force::{total_force, ForceBreakdown};
use vdw_core::green::Environment;
use vdw_core::evolve_populations;

use crate::config::{build_grid, ConfigFile, ScanConfig};
use crate::output::{render_csv, render_svg, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Distance,
    Time,
}

/// Rendered artifacts of one scan, written to disk by the caller only after
/// the whole computation succeeded.
pub struct ScanOutput {
    pub csv_name: String,
    pub csv: String,
    pub svg_name: Option<String>,
    pub svg: Option<String>,
    pub summary: String,
}

fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        builder = builder.num_threads(workers);
    }
    builder.build().context("worker pool")
}

struct GridPoint {
    r: f64,
    t: f64,
}

fn scalar_header() -> Vec<String> {
    [
        "r_m",
        "t_s",
        "F_A_res_N",
        "F_A_nonres_N",
        "F_A_total_N",
        "F_B_res_N",
        "F_B_total_N",
        "quad_err_est",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn vector_header() -> Vec<String> {
    let mut header = vec!["r_m".to_string(), "t_s".to_string()];
    for block in ["F_A_res", "F_A_nonres", "F_A_total", "F_B_res", "F_B_total"] {
        for axis in ["x", "y", "z"] {
            header.push(format!("{block}_{axis}_N"));
        }
    }
    header.push("quad_err_est".to_string());
    header
}

fn scalar_row(point: &GridPoint, b: &ForceBreakdown) -> Vec<f64> {
    // radial components along e_r = z (atom A sits at +z of atom B)
    vec![
        point.r,
        point.t,
        b.on_a_resonant[2],
        b.on_a_nonresonant[2],
        b.on_a_total()[2],
        b.on_b_resonant[2],
        b.on_b_total()[2],
        b.quad_error_estimate,
    ]
}

fn vector_row(point: &GridPoint, b: &ForceBreakdown) -> Vec<f64> {
    let mut row = vec![point.r, point.t];
    for v in [
        b.on_a_resonant,
        b.on_a_nonresonant,
        b.on_a_total(),
        b.on_b_resonant,
        b.on_b_total(),
    ] {
        row.extend_from_slice(&[v[0], v[1], v[2]]);
    }
    row.push(b.quad_error_estimate);
    row
}

pub fn run_force_scan(config: &ConfigFile, kind: ScanKind, workers: usize) -> Result<ScanOutput> {
    let atom_b_config = config
        .atom_b
        .as_ref()
        .context("two-atom scans require atom_b")?;
    if config.atom_a.has_explicit_position() || atom_b_config.has_explicit_position() {
        bail!("two-atom scans place atom B at the origin and atom A on the +z axis; \
               remove explicit atom positions");
    }
    let (atom_a, initial_a) = config.atom_a.build("A")?;
    let (atom_b, initial_b) = atom_b_config.build("B")?;
    let environment = match &config.environment {
        Some(env) => env.build()?,
        None => Environment::FreeSpace,
    };
    let quad = config.quadrature_spec();

    let points: Vec<GridPoint> = match (&config.scan, kind) {
        (
            ScanConfig::Distance {
                start_nm,
                stop_nm,
                count,
                scale,
                time_s,
            },
            ScanKind::Distance,
        ) => build_grid(*start_nm, *stop_nm, *count, *scale)?
            .into_iter()
            .map(|nm| GridPoint {
                r: nm * 1e-9,
                t: *time_s,
            })
            .collect(),
        (
            ScanConfig::Time {
                start_s,
                stop_s,
                count,
                scale,
                distance_nm,
            },
            ScanKind::Time,
        ) => {
            let r = distance_nm.context("force-vs-time requires distance_nm")? * 1e-9;
            if r <= 0.0 {
                bail!("distance_nm must be positive");
            }
            if *start_s < 0.0 {
                bail!("time grid must not start before t = 0");
            }
            build_grid(*start_s, *stop_s, *count, *scale)?
                .into_iter()
                .map(|t| GridPoint { r, t })
                .collect()
        }
        _ => bail!("scan type in the configuration does not match the subcommand"),
    };

    let vectorial = matches!(environment, Environment::DiluteBody(_));
    let pool = thread_pool(workers)?;
    let results: Vec<Result<ForceBreakdown>> = pool.install(|| {
        points
            .par_iter()
            .map(|point| {
                let a = atom_a.with_position(Vector3::new(0.0, 0.0, point.r));
                total_force(&a, &atom_b, &initial_a, &initial_b, &environment, point.t, &quad)
                    .with_context(|| format!("grid point r={} m, t={} s", point.r, point.t))
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(points.len());
    let mut max_quad_error = 0.0f64;
    for (point, result) in points.iter().zip(results) {
        let breakdown = result?;
        max_quad_error = max_quad_error.max(breakdown.quad_error_estimate);
        rows.push(if vectorial {
            vector_row(point, &breakdown)
        } else {
            scalar_row(point, &breakdown)
        });
    }

    let header = if vectorial {
        vector_header()
    } else {
        scalar_header()
    };
    let csv = render_csv(&header, &rows);
    let svg = config.output.svg.as_ref().map(|_| {
        let (x_index, x_label, log_x, title) = match kind {
            ScanKind::Distance => (0, "r_m", true, "force vs distance"),
            ScanKind::Time => (1, "t_s", false, "force vs time"),
        };
        let (fa_idx, fb_idx) = if vectorial { (10, 16) } else { (4, 6) };
        let series = [
            Series {
                name: "F_A_total",
                points: rows.iter().map(|row| (row[x_index], row[fa_idx])).collect(),
            },
            Series {
                name: "F_B_total",
                points: rows.iter().map(|row| (row[x_index], row[fb_idx])).collect(),
            },
        ];
        render_svg(title, x_label, "F_N", log_x, &series)
    });

    // regime boundary r = c / omega_min separates non-retarded from
    // retarded distances in the report
    let omega_min = atom_a
        .dipole_pairs()
        .map(|(lo, hi, _)| atom_a.omega(hi, lo).abs())
        .chain(
            atom_b
                .dipole_pairs()
                .map(|(lo, hi, _)| atom_b.omega(hi, lo).abs()),
        )
        .filter(|&w| w > 0.0)
        .fold(f64::INFINITY, f64::min);
    let regime_note = if kind == ScanKind::Distance && omega_min.is_finite() {
        let boundary = vdw_core::constants::C / omega_min;
        let near = points.iter().filter(|p| p.r < boundary).count();
        format!(
            ", {} short-distance / {} large-distance points about r = {:e} m",
            near,
            points.len() - near,
            boundary
        )
    } else {
        String::new()
    };

    Ok(ScanOutput {
        csv_name: config.output.csv.clone(),
        csv,
        svg_name: config.output.svg.clone(),
        svg,
        summary: format!(
            "{} rows, max quadrature error estimate {:e} N{}",
            rows.len(),
            max_quad_error,
            regime_note
        ),
    })
}

pub fn run_cp_consistency(config: &ConfigFile, workers: usize) -> Result<ScanOutput> {
    if config.atom_b.is_some() {
        bail!("cp-consistency is a single-atom scan; remove atom_b");
    }
    let (atom, initial) = config.atom_a.build("A")?;
    let body = match &config.environment {
        Some(env) => match env.build()? {
            Environment::DiluteBody(body) => body,
            Environment::FreeSpace => bail!("cp-consistency requires a dilute_body environment"),
        },
        None => bail!("cp-consistency requires a dilute_body environment"),
    };
    let times: Vec<f64> = match &config.scan {
        ScanConfig::Time {
            start_s,
            stop_s,
            count,
            scale,
            distance_nm,
        } => {
            if distance_nm.is_some() {
                bail!("cp-consistency takes the geometry from atom position and lattice; \
                       distance_nm does not apply");
            }
            if *start_s < 0.0 {
                bail!("time grid must not start before t = 0");
            }
            build_grid(*start_s, *stop_s, *count, *scale)?
        }
        ScanConfig::Distance { .. } => {
            bail!("cp-consistency expects a time scan")
        }
    };

    let pool = thread_pool(workers)?;
    let results: Vec<Result<(Vector3<f64>, Vector3<f64>)>> = pool.install(|| {
        times
            .par_iter()
            .map(|&t| {
                let populations = evolve_populations(&atom, &initial, t)?;
                let single = single_atom_cp_resonant(&atom, &populations, &body, t)?;
                let pairwise = pairwise_cp_sum(&atom, &populations, &body, t)?;
                Ok((single, pairwise))
            })
            .collect()
    });

    let header: Vec<String> = [
        "t_s",
        "n_points",
        "F_single_x_N",
        "F_single_y_N",
        "F_single_z_N",
        "F_pair_x_N",
        "F_pair_y_N",
        "F_pair_z_N",
        "rel_dev",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut rows = Vec::with_capacity(times.len());
    let mut max_deviation = 0.0f64;
    for (&t, result) in times.iter().zip(results) {
        let (single, pairwise) = result?;
        let scale = single.norm().max(pairwise.norm());
        let deviation = if scale > 0.0 {
            (single - pairwise).norm() / scale
        } else {
            0.0
        };
        max_deviation = max_deviation.max(deviation);
        rows.push(vec![
            t,
            body.points.len() as f64,
            single[0],
            single[1],
            single[2],
            pairwise[0],
            pairwise[1],
            pairwise[2],
            deviation,
        ]);
    }

    let csv = render_csv(&header, &rows);
    let svg = config.output.svg.as_ref().map(|_| {
        let series = [
            Series {
                name: "F_single",
                points: rows
                    .iter()
                    .map(|row| (row[0], (row[2].powi(2) + row[3].powi(2) + row[4].powi(2)).sqrt()))
                    .collect(),
            },
            Series {
                name: "F_pairwise",
                points: rows
                    .iter()
                    .map(|row| (row[0], (row[5].powi(2) + row[6].powi(2) + row[7].powi(2)).sqrt()))
                    .collect(),
            },
        ];
        render_svg("Casimir-Polder consistency", "t_s", "F_N", false, &series)
    });

    Ok(ScanOutput {
        csv_name: config.output.csv.clone(),
        csv,
        svg_name: config.output.svg.clone(),
        svg,
        summary: format!(
            "{} rows over {} body points, max single-vs-pairwise deviation {:e}",
            rows.len(),
            body.points.len(),
            max_deviation
        ),
    })
}

