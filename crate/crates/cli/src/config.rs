//! Run configuration: TOML file, command-line overrides and conversion into
//! core types. Every omitted field falls back to the headline working point.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use soliton_toffoli::analysis::Bit;
use soliton_toffoli::{AnalysisRegion, Controls, Couplings, GateParams64, Grid64, NumericsConfig64};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateSection {
    pub u: f64,
    pub v: f64,
    pub x0: f64,
    pub delta: f64,
    pub base_depth: f64,
    pub alpha: f64,
    pub x1: f64,
    pub x2: f64,
    pub w1: f64,
    pub w2: f64,
    pub g11: f64,
    pub g22: f64,
    pub g12: f64,
    pub theta_r: f64,
    pub theta_t: f64,
    pub l1: f64,
    pub l2: f64,
}

impl Default for GateSection {
    fn default() -> Self {
        let p = GateParams64::default();
        Self {
            u: p.amplitude,
            v: p.velocity,
            x0: p.x0,
            delta: p.delta,
            base_depth: p.base_depth,
            alpha: p.alpha,
            x1: p.x1,
            x2: p.x2,
            w1: p.w1,
            w2: p.w2,
            g11: p.couplings.g11,
            g22: p.couplings.g22,
            g12: p.couplings.g12,
            theta_r: p.theta_r,
            theta_t: p.theta_t,
            l1: p.region.l1,
            l2: p.region.l2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsSection {
    pub dt: f64,
    pub t_final: f64,
    /// Steps between space-time snapshots written by `simulate`.
    pub snapshot_stride: usize,
    /// Keep every n-th grid point in space-time output.
    pub x_stride: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let n = NumericsConfig64::default();
        Self {
            dt: n.dt,
            t_final: n.t_final,
            snapshot_stride: 200,
            x_stride: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub length: f64,
    pub points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            length: 256.0,
            points: 4096,
        }
    }
}

/// Inclusive range `[min, max]` sampled with `count` points, or explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Axis {
    pub fn linspace(min: f64, max: f64, count: usize) -> Self {
        Self {
            min: Some(min),
            max: Some(max),
            count: Some(count),
            step: None,
            values: None,
        }
    }

    pub fn stepped(min: f64, max: f64, step: f64) -> Self {
        Self {
            min: Some(min),
            max: Some(max),
            count: None,
            step: Some(step),
            values: None,
        }
    }

    pub fn resolve(&self, field: &'static str) -> Result<Vec<f64>, CliError> {
        if let Some(v) = &self.values {
            return Ok(v.clone());
        }
        let (min, max) = match (self.min, self.max) {
            (Some(a), Some(b)) if a <= b => (a, b),
            _ => return Err(CliError::config(field, "need values, or min <= max with count or step")),
        };
        match (self.count, self.step) {
            (Some(n), None) if n >= 1 => Ok(linspace(min, max, n)),
            (None, Some(h)) if h > 0.0 => {
                let n = ((max - min) / h + 1e-9).floor() as usize + 1;
                Ok((0..n).map(|i| round12(min + h * i as f64)).collect())
            }
            _ => Err(CliError::config(field, "give exactly one of count (>= 1) or step (> 0)")),
        }
    }
}

/// Rounds away accumulated representation noise so axis values print cleanly.
fn round12(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn linspace(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    let h = (max - min) / (n - 1) as f64;
    (0..n).map(|i| round12(min + h * i as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Velocity axis of `scan-velocity`.
    pub velocity: Axis,
    /// Velocity axis of `scan-plane`.
    pub plane_velocity: Axis,
    /// Amplitude axis of `scan-plane`.
    pub plane_amplitude: Axis,
    /// One region map per `(alpha, g12)` combination.
    pub alphas: Vec<f64>,
    pub g12s: Vec<f64>,
    /// Evaluate all three probes even after one fails.
    pub full_cells: bool,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            velocity: Axis::stepped(0.46, 0.57, 0.0025),
            plane_velocity: Axis::linspace(0.40, 0.60, 40),
            plane_amplitude: Axis::linspace(1.0, 1.6, 30),
            alphas: vec![1.08],
            g12s: vec![0.0],
            full_cells: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub controls: String,
    pub target: u8,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            controls: "11".into(),
            target: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriticalWell {
    First,
    Second,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CriticalSection {
    pub well: CriticalWell,
    pub bracket: [f64; 2],
}

impl Default for CriticalSection {
    fn default() -> Self {
        Self {
            well: CriticalWell::Second,
            bracket: [0.3, 0.7],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub gate: GateSection,
    pub numerics: NumericsSection,
    pub grid: GridSection,
    pub scan: ScanSection,
    pub simulate: SimulateSection,
    pub critical: CriticalSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub grid_points: Option<usize>,
    pub domain_length: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
    pub alpha: Option<f64>,
    pub g12: Option<f64>,
    pub controls: Option<String>,
    pub target: Option<u8>,
    pub theta_r: Option<f64>,
    pub theta_t: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::config("config", format!("{}: {e}", p.display())))?;
                Self::parse(&text)
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out {
            self.out = Some(v.clone());
        }
        if let Some(v) = o.workers {
            self.workers = Some(v);
        }
        macro_rules! set {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(o.dt => self.numerics.dt);
        set!(o.t_final => self.numerics.t_final);
        set!(o.grid_points => self.grid.points);
        set!(o.domain_length => self.grid.length);
        set!(o.u => self.gate.u);
        set!(o.v => self.gate.v);
        set!(o.alpha => self.gate.alpha);
        set!(o.g12 => self.gate.g12);
        set!(o.controls => self.simulate.controls);
        set!(o.target => self.simulate.target);
        set!(o.theta_r => self.gate.theta_r);
        set!(o.theta_t => self.gate.theta_t);
        if let Some(a) = o.alpha {
            self.scan.alphas = vec![a];
        }
        if let Some(g) = o.g12 {
            self.scan.g12s = vec![g];
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn grid(&self) -> Result<Grid64, CliError> {
        Ok(Grid64::new(self.grid.length, self.grid.points)?)
    }

    pub fn numerics(&self) -> Result<NumericsConfig64, CliError> {
        let n = NumericsConfig64::new(self.numerics.dt, self.numerics.t_final);
        n.validate()?;
        Ok(n)
    }

    pub fn gate_params(&self) -> Result<GateParams64, CliError> {
        let g = &self.gate;
        let p = GateParams64 {
            amplitude: g.u,
            velocity: g.v,
            x0: g.x0,
            delta: g.delta,
            base_depth: g.base_depth,
            alpha: g.alpha,
            x1: g.x1,
            x2: g.x2,
            w1: g.w1,
            w2: g.w2,
            couplings: Couplings {
                g11: g.g11,
                g22: g.g22,
                g12: g.g12,
            },
            theta_r: g.theta_r,
            theta_t: g.theta_t,
            region: AnalysisRegion::new(g.l1, g.l2)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn controls(&self) -> Result<Controls, CliError> {
        Ok(self.simulate.controls.parse()?)
    }

    pub fn target(&self) -> Result<Bit, CliError> {
        Bit::from_u8(self.simulate.target)
            .ok_or_else(|| CliError::config("target", format!("must be 0 or 1, got {}", self.simulate.target)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_headline_defaults() {
        let c = RunConfig::parse("").unwrap();
        let p = c.gate_params().unwrap();
        assert_eq!(p.amplitude, 1.4);
        assert_eq!(p.velocity, 0.525);
        assert!((p.depth1() - 4.32).abs() < 1e-12);
        assert_eq!(p.depth2(), 4.0);
        assert_eq!(c.controls().unwrap().to_string(), "11");
    }

    #[test]
    fn unknown_field_is_named() {
        let err = RunConfig::parse("[gate]\nvelocty = 0.5\n").unwrap_err();
        assert!(err.to_string().contains("velocty"), "{err}");
    }

    #[test]
    fn axis_resolution() {
        let v = Axis::stepped(0.46, 0.57, 0.0025).resolve("v").unwrap();
        assert_eq!(v.len(), 45);
        assert_eq!(v[0], 0.46);
        assert_eq!(*v.last().unwrap(), 0.57);
        assert_eq!(Axis::linspace(1.2, 1.6, 10).resolve("u").unwrap()[9], 1.6);
        let bad = Axis {
            min: Some(1.0),
            max: Some(0.0),
            count: Some(3),
            step: None,
            values: None,
        };
        assert!(bad.resolve("u").is_err());
    }

    #[test]
    fn overrides_win() {
        let mut c = RunConfig::parse("[gate]\nv = 0.5\n").unwrap();
        c.apply(&Overrides {
            v: Some(0.51),
            alpha: Some(1.0),
            ..Default::default()
        });
        assert_eq!(c.gate.v, 0.51);
        assert_eq!(c.scan.alphas, vec![1.0]);
    }
}
