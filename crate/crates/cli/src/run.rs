use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use log::{debug, info};
use serde_json::{json, Value};

use limitsets::dynamics::{
    adpt_defect, density_defect, is_chain_recurrent_at, Flow, Point, SampledCurve, SearchBudget,
};
use limitsets::embedding::{
    build_nu, equivariance_defect, growth_integral, injectivity_gap, keller_density_bound,
    shift_nu, write_cylinder_csv, write_cylinder_json, GaussianKernel, KellerMap, YGrid,
};
use limitsets::measure::{Angular, AtomicMeasure, FrechetFamily, GrowthClass};
use limitsets::periodization::{convergence_experiment, orbit_distance_experiment};
use limitsets::systems::{hom_measure, Preset, TwoMassConfig, GOLDEN_ALPHA};

use crate::config::{CurveKind, Experiment, Format, RunConfig};
use crate::CliError;

/// Runs the experiment and writes its output. Identical configs produce
/// identical bytes.
pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    info!("running {} on {}", cfg.experiment, cfg.preset);
    let body = match cfg.experiment {
        Experiment::Approximate => approximate(cfg)?,
        Experiment::OrbitDist => orbit_dist(cfg)?,
        Experiment::Chain => json_body(chain(cfg)?),
        Experiment::Embed => json_body(embed(cfg)?),
        Experiment::Adpt => json_body(adpt(cfg)?),
    };
    match &cfg.output {
        Some(path) => write_atomically(path, &body),
        None => std::io::stdout()
            .write_all(&body)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomically(path: &Path, body: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(body).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    debug!("wrote {}", path.display());
    Ok(())
}

fn json_body(value: Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&value).expect("reports serialize");
    out.push(b'\n');
    out
}

fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> Vec<u8> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| float17(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

fn two_mass(cfg: &RunConfig) -> Result<(AtomicMeasure, GrowthClass), CliError> {
    let gc = GrowthClass::new(cfg.rho, cfg.sigma)?;
    let config = TwoMassConfig {
        sigma: cfg.sigma,
        epsilon: cfg.margin,
        alpha: GOLDEN_ALPHA,
    };
    Ok((hom_measure(&config, &gc)?, gc))
}

fn approximate(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let (mu, gc) = two_mass(cfg)?;
    let fam = FrechetFamily::new(cfg.family_size)?;
    let rows = convergence_experiment(&mu, &cfg.periods, &fam, &gc)?;
    Ok(match cfg.format {
        Format::Csv => csv_table(
            &["P", "distance"],
            &rows
                .iter()
                .map(|r| vec![r.period, r.distance])
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_body(json!({
            "experiment": cfg.experiment.name(),
            "preset": cfg.preset.name(),
            "rows": rows.iter().map(|r| json!({
                "P": r.period,
                "distance": r.distance,
                "prefix_inside": fam.prefix_inside(r.period),
            })).collect::<Vec<_>>(),
        })),
    })
}

fn orbit_dist(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let (mu, gc) = two_mass(cfg)?;
    let fam = FrechetFamily::new(cfg.family_size)?;
    let window = cfg
        .t_window
        .unwrap_or_else(|| cfg.periods.iter().copied().fold(0.0, f64::max));
    let rows = orbit_distance_experiment(&mu, &cfg.periods, &fam, &gc, window, cfg.dt)?;
    Ok(match cfg.format {
        Format::Csv => csv_table(
            &["P", "distance", "sampling_modulus"],
            &rows
                .iter()
                .map(|r| vec![r.period, r.distance, r.sampling_modulus])
                .collect::<Vec<_>>(),
        ),
        Format::Json => json_body(json!({
            "experiment": cfg.experiment.name(),
            "preset": cfg.preset.name(),
            "dt": cfg.dt,
            "t_window": window,
            "rows": rows.iter().map(|r| json!({
                "P": r.period,
                "distance": r.distance,
                "sampling_modulus": r.sampling_modulus,
            })).collect::<Vec<_>>(),
        })),
    })
}

fn flow_of(preset: Preset) -> Result<Box<dyn Flow>, CliError> {
    preset
        .flow()
        .ok_or_else(|| CliError::Invalid(format!("preset {preset} has no flow")))
}

fn point_or_origin(flow: &dyn Flow, coords: &Option<Vec<f64>>) -> Result<Point, CliError> {
    let dim = flow.space().dimension();
    let p = Point::new(coords.clone().unwrap_or_else(|| vec![0.0; dim]));
    if p.dimension() != dim {
        return Err(CliError::Invalid(format!(
            "point has {} coordinates, the preset needs {dim}",
            p.dimension()
        )));
    }
    Ok(flow.space().normalize(p))
}

fn chain(cfg: &RunConfig) -> Result<Value, CliError> {
    let flow = flow_of(cfg.preset)?;
    let m = point_or_origin(flow.as_ref(), &cfg.point)?;
    let budget = SearchBudget::for_lower_bound(cfg.s);
    let result = is_chain_recurrent_at(flow.as_ref(), &m, cfg.epsilon, cfg.s, &budget)?;
    let (points, times, errors) = match &result.witness {
        Some(c) => (
            c.points.iter().map(|p| p.coords().to_vec()).collect(),
            c.jump_times.clone(),
            c.link_errors(flow.as_ref())?,
        ),
        None => (Vec::new(), Vec::new(), Vec::new()),
    };
    Ok(json!({
        "experiment": cfg.experiment.name(),
        "preset": cfg.preset.name(),
        "epsilon": cfg.epsilon,
        "s": cfg.s,
        "point": m.coords(),
        "found": result.recurrent,
        "chain": points,
        "jump_times": times,
        "link_errors": errors,
    }))
}

fn embed(cfg: &RunConfig) -> Result<Value, CliError> {
    let flow = flow_of(cfg.preset)?;
    let space = flow.space();
    let map = KellerMap::from_sampler(space, cfg.anchors)?;
    let kernel = GaussianKernel::new(cfg.t_cut, cfg.kernel_dt)?;
    let grid = YGrid::new(cfg.y_min, cfg.y_max, cfg.dy)?;
    let m = point_or_origin(flow.as_ref(), &cfg.point)?;
    let m2 = match &cfg.point2 {
        Some(_) => point_or_origin(flow.as_ref(), &cfg.point2)?,
        None => space.normalize(Point::new(m.coords().iter().map(|c| c + PI).collect())),
    };

    let defect = equivariance_defect(&map, flow.as_ref(), &kernel, &m, cfg.tau, &grid, cfg.rho)?;
    debug!("equivariance defect {defect:e}");
    let nu = build_nu(&map, flow.as_ref(), &kernel, &m, &grid, cfg.rho)?;
    let bound = keller_density_bound(map.len(), cfg.rho);
    let growth = [0.0, cfg.tau]
        .into_iter()
        .map(|shift| Ok(growth_integral(&shift_nu(&nu, shift)?, bound)))
        .collect::<Result<Vec<f64>, CliError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let mut gaps = serde_json::Map::new();
    for probe in Angular::up_to(4) {
        let gap = injectivity_gap(&map, flow.as_ref(), &kernel, &m, &m2, probe, &grid)?;
        gaps.insert(probe_name(probe), json!(gap));
    }

    if let Some(path) = &cfg.cylinder_output {
        let mut body = Vec::new();
        if path.extension().is_some_and(|e| e == "csv") {
            write_cylinder_csv(&nu, &mut body)?;
        } else {
            write_cylinder_json(&nu, &mut body)?;
        }
        write_atomically(path, &body)?;
    }

    Ok(json!({
        "experiment": cfg.experiment.name(),
        "preset": cfg.preset.name(),
        "anchors": map.len(),
        "tau": cfg.tau,
        "point": m.coords(),
        "point2": m2.coords(),
        "kernel_mass": kernel.mass(),
        "equivariance_defect": defect,
        "growth_integral": growth,
        "injectivity_gaps": gaps,
    }))
}

fn probe_name(probe: Angular) -> String {
    match probe {
        Angular::Constant => "1".to_string(),
        Angular::Cos(n) => format!("cos{n}"),
        Angular::Sin(n) => format!("sin{n}"),
    }
}

fn adpt(cfg: &RunConfig) -> Result<Value, CliError> {
    let flow = flow_of(cfg.preset)?;
    let x = point_or_origin(flow.as_ref(), &cfg.point)?;
    let curve = match cfg.curve {
        CurveKind::Trajectory => {
            SampledCurve::trajectory(flow.as_ref(), &x, 0.0, cfg.t_max, cfg.curve_dt)?
        }
        CurveKind::Constant => {
            let traj = SampledCurve::trajectory(flow.as_ref(), &x, 0.0, cfg.t_max, cfg.curve_dt)?;
            let times = traj.times().to_vec();
            let points = vec![x.clone(); times.len()];
            SampledCurve::new(times, points)?
        }
    };
    let defect = adpt_defect(
        &curve,
        flow.as_ref(),
        cfg.t,
        (0.0, cfg.window),
        cfg.tau_step,
        cfg.reading,
    )?;
    let cover = flow.space().sample(cfg.cover);
    let density = density_defect(&curve, &cover, cfg.t, flow.space())?;
    Ok(json!({
        "experiment": cfg.experiment.name(),
        "preset": cfg.preset.name(),
        "curve": match cfg.curve {
            CurveKind::Trajectory => "trajectory",
            CurveKind::Constant => "constant",
        },
        "reading": match cfg.reading {
            limitsets::dynamics::DefectReading::Increment => "increment",
            limitsets::dynamics::DefectReading::Literal => "literal",
        },
        "t": cfg.t,
        "window": cfg.window,
        "adpt_defect": defect,
        "density_defect": density,
        "cover_points": cover.len(),
    }))
}
