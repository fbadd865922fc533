use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;
use soliton_toffoli::gate::TruthTableRow;
use soliton_toffoli::sweep::VelocityScan;
use soliton_toffoli::{Grid64, RegionMap64, Snapshot};

use crate::config::RunConfig;
use crate::error::CliError;

pub struct OutDir {
    root: PathBuf,
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
}

impl OutDir {
    pub fn create(root: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&root)?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(path)
    }

    /// Metadata record sufficient to re-run the command.
    pub fn metadata(&self, name: &str, command: &str, config: &RunConfig) -> Result<PathBuf, CliError> {
        self.json(
            name,
            &Metadata {
                command,
                version: env!("CARGO_PKG_VERSION"),
                config,
            },
        )
    }

    /// Long-format `(t, x, density)` table for one component.
    pub fn spacetime(
        &self,
        name: &str,
        grid: &Grid64,
        snapshots: &[Snapshot<f64>],
        component: usize,
        x_stride: usize,
    ) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["t", "x", "density"])?;
        let stride = x_stride.max(1);
        for snap in snapshots {
            let d = &snap.densities[component];
            for (i, (&x, &rho)) in grid.x().iter().zip(d).enumerate() {
                if i % stride == 0 {
                    w.write_record([snap.time.to_string(), x.to_string(), rho.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(path)
    }

    pub fn truth_table(&self, name: &str, rows: &[TruthTableRow<f64>]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record([
            "target_in", "controls", "expected", "target_out", "pass", "quality", "r1", "l1", "t1",
            "r2", "l2", "t2", "norm_drift", "error",
        ])?;
        for row in rows {
            let mut rec = vec![row.target_in.to_string(), row.controls.to_string()];
            match &row.outcome {
                Some(o) => {
                    rec.push(o.expected.to_string());
                    rec.push(o.target_out.map_or("ambiguous".into(), |b| b.to_string()));
                    rec.push(o.pass.to_string());
                    rec.push(o.quality.to_string());
                    for c in &o.transport.components {
                        rec.extend([c.reflection, c.trapping, c.transmission].map(|v| v.to_string()));
                    }
                    rec.push(o.norm_drift.to_string());
                    rec.push(String::new());
                }
                None => {
                    rec.extend(std::iter::repeat_n(String::new(), 11));
                    rec.push(row.error.clone().unwrap_or_default());
                }
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn velocity_scan(
        &self,
        name: &str,
        scan: &VelocityScan<f64>,
        theta_r: f64,
        theta_t: f64,
    ) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["v", "r11", "t10", "t01", "pass", "valid", "error"])?;
        for ((v, rec), err) in scan.velocities.iter().zip(&scan.records).zip(&scan.errors) {
            match rec {
                Some(r) => w.write_record([
                    v.to_string(),
                    r.r11.to_string(),
                    r.t10.to_string(),
                    r.t01.to_string(),
                    r.passes(theta_r, theta_t).to_string(),
                    "true".into(),
                    String::new(),
                ])?,
                None => w.write_record([
                    v.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "false".into(),
                    "false".into(),
                    err.clone().unwrap_or_default(),
                ])?,
            }
        }
        w.flush()?;
        Ok(path)
    }

    /// Cell table `(v, u, pass, valid, r11, t10, t01)`.
    pub fn region_cells(&self, name: &str, map: &RegionMap64) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["v", "u", "pass", "valid", "r11", "t10", "t01"])?;
        let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
        for c in &map.cells {
            w.write_record([
                c.velocity.to_string(),
                c.amplitude.to_string(),
                c.pass.to_string(),
                c.valid.to_string(),
                opt(c.r11),
                opt(c.t10),
                opt(c.t01),
            ])?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Compact grid: one line per amplitude (ascending), one character per
    /// velocity: `1` pass, `0` fail, `x` invalid.
    pub fn region_grid(&self, name: &str, map: &RegionMap64) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        let mut w = BufWriter::new(File::create(&path)?);
        let nv = map.velocities.len();
        for row in map.cells.chunks(nv) {
            let line: String = row
                .iter()
                .map(|c| match (c.valid, c.pass) {
                    (false, _) => 'x',
                    (true, true) => '1',
                    (true, false) => '0',
                })
                .collect();
            writeln!(w, "{line}")?;
        }
        w.flush()?;
        Ok(path)
    }
}
