use serde::Serialize;
use soliton_toffoli::gate::{build_scenario, run_gate_observed, verify_truth_table};
use soliton_toffoli::sweep::{self, PlaneOptions};
use soliton_toffoli::{Coefficients, Error as CoreError, PotentialConfig};

use crate::config::{CriticalWell, RunConfig};
use crate::error::CliError;
use crate::output::OutDir;

#[derive(Serialize)]
struct SimulateSummary {
    controls: String,
    target_in: u8,
    expected: u8,
    target_out: Option<u8>,
    ambiguous: bool,
    flipped: Option<bool>,
    pass: bool,
    quality: f64,
    transport: Vec<Coefficients<f64>>,
    norm_drift: f64,
    wrap_warnings: usize,
    snapshots: usize,
}

pub fn simulate(cfg: &RunConfig) -> Result<i32, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.gate_params()?;
    let numerics = cfg.numerics()?.with_snapshots(cfg.numerics.snapshot_stride);
    let scenario = build_scenario(cfg.controls()?, cfg.target()?, &params)?;
    let (outcome, report) = run_gate_observed(&scenario, &numerics, &grid, None)?;

    let out = OutDir::create(cfg.out_dir())?;
    for j in 0..2 {
        out.spacetime(
            &format!("spacetime_psi{}.csv", j + 1),
            &grid,
            &report.snapshots,
            j,
            cfg.numerics.x_stride,
        )?;
    }
    let summary = SimulateSummary {
        controls: outcome.controls.to_string(),
        target_in: outcome.target_in.as_u8(),
        expected: outcome.expected.as_u8(),
        target_out: outcome.target_out.map(|b| b.as_u8()),
        ambiguous: outcome.ambiguous,
        flipped: outcome.target_out.map(|b| b != outcome.target_in),
        pass: outcome.pass,
        quality: outcome.quality,
        transport: outcome.transport.components.clone(),
        norm_drift: outcome.norm_drift,
        wrap_warnings: outcome.wrap_warnings,
        snapshots: report.snapshots.len(),
    };
    out.json("summary.json", &summary)?;
    out.metadata("metadata.json", "simulate", cfg)?;
    println!(
        "controls={} target {} -> {} (expected {}) quality={:.4} pass={}",
        summary.controls,
        summary.target_in,
        summary.target_out.map_or("?".into(), |b| b.to_string()),
        summary.expected,
        summary.quality,
        summary.pass
    );
    Ok(if outcome.pass { 0 } else { 1 })
}

pub fn truth_table(cfg: &RunConfig, ordered: bool) -> Result<i32, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.gate_params()?;
    let numerics = cfg.numerics()?;
    let report = verify_truth_table(&params, &numerics, &grid)?;

    let out = OutDir::create(cfg.out_dir())?;
    out.truth_table("truth_table.csv", &report.rows)?;
    out.json("truth_table.json", &report)?;
    out.metadata("metadata.json", "truth-table", cfg)?;

    let mut rows: Vec<_> = report.rows.iter().collect();
    if ordered {
        rows.sort_by_key(|r| (r.target_in, r.controls));
    }
    for row in rows {
        match &row.outcome {
            Some(o) => println!(
                "|{}>|{}> -> |{}> expected |{}> quality={:.4} {}",
                row.target_in,
                row.controls,
                o.target_out.map_or("?".into(), |b| b.to_string()),
                o.expected,
                o.quality,
                if o.pass { "PASS" } else { "FAIL" }
            ),
            None => println!(
                "|{}>|{}> error: {}",
                row.target_in,
                row.controls,
                row.error.as_deref().unwrap_or("")
            ),
        }
    }
    if report.rows.iter().any(|r| r.outcome.is_none()) {
        return Ok(3);
    }
    Ok(if report.all_pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct WindowRecord {
    u: f64,
    theta_r: f64,
    theta_t: f64,
    intervals: Vec<[f64; 2]>,
    invalid_points: usize,
}

pub fn scan_velocity(cfg: &RunConfig) -> Result<i32, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.gate_params()?;
    let numerics = cfg.numerics()?;
    let velocities = cfg.scan.velocity.resolve("scan.velocity")?;
    let scan = sweep::scan_velocity(&params, &velocities, &numerics, &grid)?;
    let windows = sweep::operational_window(&scan, params.theta_r, params.theta_t);

    let out = OutDir::create(cfg.out_dir())?;
    out.velocity_scan("velocity_scan.csv", &scan, params.theta_r, params.theta_t)?;
    let invalid = scan.records.iter().filter(|r| r.is_none()).count();
    out.json(
        "window.json",
        &WindowRecord {
            u: params.amplitude,
            theta_r: params.theta_r,
            theta_t: params.theta_t,
            intervals: windows.iter().map(|&(a, b)| [a, b]).collect(),
            invalid_points: invalid,
        },
    )?;
    out.metadata("metadata.json", "scan-velocity", cfg)?;
    for (a, b) in &windows {
        println!("operational window: [{a}, {b}]");
    }
    if windows.is_empty() {
        println!("no operational window");
    }
    Ok(if invalid > 0 { 3 } else { 0 })
}

#[derive(Serialize)]
struct PlaneSummary {
    alpha: f64,
    g12: f64,
    area: usize,
    cells: usize,
    invalid: usize,
    cells_file: String,
    grid_file: String,
}

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

pub fn scan_plane(cfg: &RunConfig) -> Result<i32, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.gate_params()?;
    let numerics = cfg.numerics()?;
    let vs = cfg.scan.plane_velocity.resolve("scan.plane_velocity")?;
    let us = cfg.scan.plane_amplitude.resolve("scan.plane_amplitude")?;
    if cfg.scan.alphas.is_empty() || cfg.scan.g12s.is_empty() {
        return Err(CliError::config("scan.alphas/g12s", "need at least one value each"));
    }
    let options = PlaneOptions {
        short_circuit: !cfg.scan.full_cells,
    };
    let out = OutDir::create(cfg.out_dir())?;
    let mut summaries = Vec::new();
    let mut any_invalid = false;
    for &alpha in &cfg.scan.alphas {
        for &g12 in &cfg.scan.g12s {
            let map = sweep::scan_plane(&params, &vs, &us, alpha, g12, &numerics, &grid, options)?;
            let stem = format!("plane_alpha{}_g{}", tag(alpha), tag(g12));
            let cells_file = format!("{stem}_cells.csv");
            let grid_file = format!("{stem}_grid.txt");
            out.region_cells(&cells_file, &map)?;
            out.region_grid(&grid_file, &map)?;
            println!("alpha={alpha} g12={g12}: area {} / {}", map.area(), map.cells.len());
            any_invalid |= map.invalid_count() > 0;
            summaries.push(PlaneSummary {
                alpha,
                g12,
                area: map.area(),
                cells: map.cells.len(),
                invalid: map.invalid_count(),
                cells_file,
                grid_file,
            });
        }
    }
    out.json("plane_summary.json", &summaries)?;
    out.metadata("metadata.json", "scan-plane", cfg)?;
    Ok(if any_invalid { 3 } else { 0 })
}

#[derive(Serialize)]
struct CriticalRecord {
    well: CriticalWell,
    u: f64,
    bracket: [f64; 2],
    critical_velocity: f64,
}

pub fn critical_velocity(cfg: &RunConfig) -> Result<i32, CliError> {
    let grid = cfg.grid()?;
    let params = cfg.gate_params()?;
    let numerics = cfg.numerics()?;
    let wells = match cfg.critical.well {
        CriticalWell::First => vec![params.well1()?],
        CriticalWell::Second => vec![params.well2()?],
        CriticalWell::Both => vec![params.well1()?, params.well2()?],
    };
    let potential = PotentialConfig::new(wells)?;
    let [lo, hi] = cfg.critical.bracket;
    let vc = match sweep::critical_velocity(
        &potential,
        params.amplitude,
        params.x0,
        &params.region,
        &numerics,
        &grid,
        (lo, hi),
    ) {
        Err(CoreError::InvalidBracket { lo, hi, reason }) => {
            return Err(CliError::config(
                "critical.bracket",
                format!("[{lo}, {hi}]: {reason}"),
            ))
        }
        r => r?,
    };
    let out = OutDir::create(cfg.out_dir())?;
    out.json(
        "critical_velocity.json",
        &CriticalRecord {
            well: cfg.critical.well,
            u: params.amplitude,
            bracket: cfg.critical.bracket,
            critical_velocity: vc,
        },
    )?;
    out.metadata("metadata.json", "critical-velocity", cfg)?;
    println!("critical velocity: {vc:.4}");
    Ok(0)
}
