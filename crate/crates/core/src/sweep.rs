//! Parameter scans: velocity curves, operational windows, (v, u) region maps
//! and critical velocities.
//!
//! Every scan point is an independent simulation. Points are evaluated with
//! rayon and collected in input order, so results do not depend on the
//! number of workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{transport, AnalysisRegion, Bit, TransportResult};
use crate::error::{Error, Result};
use crate::gate::{Controls, GateParams};
use crate::grid::Grid;
use crate::model::{Couplings, PotentialConfig, SolitonSpec};
use crate::scalar::Real;
use crate::solver::{evolve, NumericsConfig, State};

/// Width below which [`critical_velocity`] stops bisecting.
pub const CRITICAL_VELOCITY_RESOLUTION: f64 = 1e-3;

/// Runs `f` on a dedicated pool of `workers` threads (`None` uses the global pool).
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(Error::config("workers", "must be >= 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// The three configurations that decide whether the gate works.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Probe {
    /// Both wells; must reflect.
    Double,
    /// Only the well at `x1`; must transmit.
    First,
    /// Only the well at `x2`; must transmit.
    Second,
}

impl Probe {
    pub fn controls(self) -> Controls {
        match self {
            Probe::Double => Controls::new(Bit::One, Bit::One),
            Probe::First => Controls::new(Bit::One, Bit::Zero),
            Probe::Second => Controls::new(Bit::Zero, Bit::One),
        }
    }
}

/// Runs one probe and returns the binding coefficient: min reflection over
/// components for [`Probe::Double`], min transmission otherwise.
///
/// Uncoupled parameters simulate the leading soliton alone; with `g12 > 0` both
/// components are evolved in their target-0 arrangement.
pub fn probe_coefficient<T: Real>(
    params: &GateParams<T>,
    probe: Probe,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
) -> Result<ProbeResult<T>> {
    let (tr, norm_drift) = probe_transport(params, probe, numerics, grid)?;
    let value = match probe {
        Probe::Double => tr.min_reflection(),
        Probe::First | Probe::Second => tr.min_transmission(),
    };
    Ok(ProbeResult { value, norm_drift })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeResult<T> {
    pub value: T,
    /// `max_j |N_j(t_f)/N_j(0) - 1|` of the run.
    pub norm_drift: T,
}

/// Transport of one probe run together with its norm drift.
pub fn probe_transport<T: Real>(
    params: &GateParams<T>,
    probe: Probe,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
) -> Result<(TransportResult<T>, T)> {
    let potential = params.potential(probe.controls())?;
    let lead = SolitonSpec::new(params.amplitude, params.velocity, params.x0)?;
    let state = if params.couplings.g12 == T::zero() {
        State::single(lead.field(grid), grid)?
    } else {
        let trail = SolitonSpec::new(params.amplitude, params.velocity, params.x0 + params.delta)?;
        State::new(vec![lead.field(grid), trail.field(grid)], grid)?
    };
    let (fin, _) = evolve(
        &state,
        &potential.values(grid),
        &params.couplings,
        grid,
        numerics,
        None,
    )?;
    Ok((transport(&fin, grid, &params.region)?, fin.norm_drift(grid)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityRecord<T> {
    pub r11: T,
    pub t10: T,
    pub t01: T,
    /// Largest norm drift of the three runs.
    pub norm_drift: T,
}

impl<T: Real> VelocityRecord<T> {
    pub fn passes(&self, theta_r: T, theta_t: T) -> bool {
        self.r11 > theta_r && self.t10 > theta_t && self.t01 > theta_t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityScan<T> {
    pub amplitude: T,
    pub velocities: Vec<T>,
    /// `None` where the solver failed.
    pub records: Vec<Option<VelocityRecord<T>>>,
    pub errors: Vec<Option<String>>,
}

fn check_axis<T: Real>(axis: &[T], name: &'static str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::EmptyScan(name));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::config(name, "values must be finite"));
    }
    if axis.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(name, "values must be strictly increasing"));
    }
    Ok(())
}

/// `R11`, `T10` and `T01` as a function of the initial velocity.
pub fn scan_velocity<T: Real>(
    params: &GateParams<T>,
    velocities: &[T],
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
) -> Result<VelocityScan<T>> {
    check_axis(velocities, "velocities")?;
    if velocities.iter().any(|&v| !(v > T::zero())) {
        return Err(Error::config("velocities", "must be positive"));
    }
    numerics.validate()?;
    let tasks: Vec<(usize, Probe)> = (0..velocities.len())
        .flat_map(|i| [Probe::Double, Probe::First, Probe::Second].map(|p| (i, p)))
        .collect();
    let values: Vec<Result<ProbeResult<T>>> = tasks
        .par_iter()
        .map(|&(i, probe)| {
            let mut p = *params;
            p.velocity = velocities[i];
            p.validate()?;
            probe_coefficient(&p, probe, numerics, grid)
        })
        .collect();
    let mut records = Vec::with_capacity(velocities.len());
    let mut errors = Vec::with_capacity(velocities.len());
    for chunk in values.chunks(3) {
        match chunk {
            [Ok(r11), Ok(t10), Ok(t01)] => {
                records.push(Some(VelocityRecord {
                    r11: r11.value,
                    t10: t10.value,
                    t01: t01.value,
                    norm_drift: r11.norm_drift.max(t10.norm_drift).max(t01.norm_drift),
                }));
                errors.push(None);
            }
            _ => {
                let msg = chunk
                    .iter()
                    .filter_map(|r| r.as_ref().err().map(ToString::to_string))
                    .collect::<Vec<_>>()
                    .join("; ");
                records.push(None);
                errors.push(Some(msg));
            }
        }
    }
    Ok(VelocityScan {
        amplitude: params.amplitude,
        velocities: velocities.to_vec(),
        records,
        errors,
    })
}

/// Maximal runs of consecutive passing samples, reported at their outermost
/// passing velocities. Missing samples break a run.
pub fn operational_window<T: Real>(scan: &VelocityScan<T>, theta_r: T, theta_t: T) -> Vec<(T, T)> {
    let mut out = Vec::new();
    let mut open: Option<(T, T)> = None;
    for (&v, rec) in scan.velocities.iter().zip(&scan.records) {
        let ok = rec.is_some_and(|r| r.passes(theta_r, theta_t));
        open = match (open, ok) {
            (None, true) => Some((v, v)),
            (Some((lo, _)), true) => Some((lo, v)),
            (Some(iv), false) => {
                out.push(iv);
                None
            }
            (None, false) => None,
        };
    }
    out.extend(open);
    out
}

/// One `(v, u)` cell of a region map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell<T> {
    pub velocity: T,
    pub amplitude: T,
    /// False if a simulation in this cell failed numerically.
    pub valid: bool,
    pub pass: bool,
    /// Binding coefficients; `None` if not computed (short-circuited or failed).
    pub r11: Option<T>,
    pub t10: Option<T>,
    pub t01: Option<T>,
    /// Largest norm drift among the runs performed.
    pub norm_drift: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMap<T> {
    pub velocities: Vec<T>,
    pub amplitudes: Vec<T>,
    /// Row-major: `cells[iu * velocities.len() + iv]`.
    pub cells: Vec<Cell<T>>,
    pub alpha: T,
    pub g12: T,
    pub theta_r: T,
    pub theta_t: T,
}

impl<T: Real> RegionMap<T> {
    pub fn cell(&self, iv: usize, iu: usize) -> &Cell<T> {
        &self.cells[iu * self.velocities.len() + iv]
    }

    /// Number of passing cells.
    pub fn area(&self) -> usize {
        self.cells.iter().filter(|c| c.pass).count()
    }

    /// Passing cells restricted to amplitudes in `[lo, hi]`.
    pub fn area_in_amplitude(&self, lo: T, hi: T) -> usize {
        self.cells
            .iter()
            .filter(|c| c.pass && c.amplitude >= lo && c.amplitude <= hi)
            .count()
    }

    pub fn max_norm_drift(&self) -> T {
        self.cells.iter().map(|c| c.norm_drift).fold(T::zero(), T::max)
    }

    pub fn invalid_count(&self) -> usize {
        self.cells.iter().filter(|c| !c.valid).count()
    }

    /// Mask at other thresholds. Cells lacking a coefficient are treated as failing.
    pub fn mask_at(&self, theta_r: T, theta_t: T) -> Vec<bool> {
        self.cells
            .iter()
            .map(|c| match (c.r11, c.t10, c.t01) {
                (Some(r), Some(a), Some(b)) => r > theta_r && a > theta_t && b > theta_t,
                _ => false,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneOptions {
    /// Skip the remaining probes of a cell once one fails.
    pub short_circuit: bool,
}

impl Default for PlaneOptions {
    fn default() -> Self {
        Self { short_circuit: true }
    }
}

/// Operational mask over the `(v, u)` plane for one `(alpha, g12)` pair.
#[allow(clippy::too_many_arguments)]
pub fn scan_plane<T: Real>(
    template: &GateParams<T>,
    velocities: &[T],
    amplitudes: &[T],
    alpha: T,
    g12: T,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
    options: PlaneOptions,
) -> Result<RegionMap<T>> {
    check_axis(velocities, "velocities")?;
    check_axis(amplitudes, "amplitudes")?;
    if !(alpha > T::zero()) {
        return Err(Error::config("alpha", format!("must be > 0, got {alpha}")));
    }
    if !(g12 >= T::zero()) {
        return Err(Error::config("g12", format!("must be >= 0, got {g12}")));
    }
    numerics.validate()?;
    let mut base = *template;
    base.alpha = alpha;
    base.couplings = Couplings {
        g12,
        ..template.couplings
    };
    base.validate()?;

    let coords: Vec<(T, T)> = amplitudes
        .iter()
        .flat_map(|&u| velocities.iter().map(move |&v| (v, u)))
        .collect();
    let cells = coords
        .par_iter()
        .map(|&(v, u)| {
            let mut p = base;
            p.velocity = v;
            p.amplitude = u;
            plane_cell(&p, numerics, grid, options)
        })
        .collect();
    Ok(RegionMap {
        velocities: velocities.to_vec(),
        amplitudes: amplitudes.to_vec(),
        cells,
        alpha,
        g12,
        theta_r: template.theta_r,
        theta_t: template.theta_t,
    })
}

fn plane_cell<T: Real>(
    params: &GateParams<T>,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
    options: PlaneOptions,
) -> Cell<T> {
    let mut cell = Cell {
        velocity: params.velocity,
        amplitude: params.amplitude,
        valid: true,
        pass: false,
        r11: None,
        t10: None,
        t01: None,
        norm_drift: T::zero(),
    };
    if let Err(e) = params.validate() {
        log::warn!("cell v={} u={} rejected: {e}", params.velocity, params.amplitude);
        cell.valid = false;
        return cell;
    }
    let mut all = true;
    for probe in [Probe::Double, Probe::Second, Probe::First] {
        if options.short_circuit && !all {
            break;
        }
        match probe_coefficient(params, probe, numerics, grid) {
            Ok(ProbeResult { value: c, norm_drift }) => {
                cell.norm_drift = cell.norm_drift.max(norm_drift);
                let ok = match probe {
                    Probe::Double => c > params.theta_r,
                    _ => c > params.theta_t,
                };
                all &= ok;
                match probe {
                    Probe::Double => cell.r11 = Some(c),
                    Probe::First => cell.t10 = Some(c),
                    Probe::Second => cell.t01 = Some(c),
                }
            }
            Err(e) => {
                log::warn!("cell v={} u={} failed: {e}", params.velocity, params.amplitude);
                cell.valid = false;
                all = false;
                break;
            }
        }
    }
    cell.pass = cell.valid && all;
    cell
}

/// Velocity at which a single soliton starts to predominantly transmit
/// (`T = 0.5`) through `potential`, by bisection on `bracket`.
pub fn critical_velocity<T: Real>(
    potential: &PotentialConfig<T>,
    amplitude: T,
    x0: T,
    region: &AnalysisRegion<T>,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
    bracket: (T, T),
) -> Result<T> {
    let (mut lo, mut hi) = bracket;
    let half = T::lit(0.5);
    let bad = |reason: &str| Error::InvalidBracket {
        lo: bracket.0.to_f64_lossy(),
        hi: bracket.1.to_f64_lossy(),
        reason: reason.to_string(),
    };
    if !(lo > T::zero() && hi > lo) {
        return Err(bad("need 0 < v_lo < v_hi"));
    }
    let values = potential.values(grid);
    let transmission = |v: T| -> Result<T> {
        let state = State::single(SolitonSpec::new(amplitude, v, x0)?.field(grid), grid)?;
        let (fin, _) = evolve(&state, &values, &Couplings::uncoupled(), grid, numerics, None)?;
        Ok(transport(&fin, grid, region)?.component(0).transmission)
    };
    let (t_lo, t_hi) = rayon::join(|| transmission(lo), || transmission(hi));
    if !(t_lo? < half) {
        return Err(bad("T(v_lo) must be below 0.5"));
    }
    if !(t_hi? > half) {
        return Err(bad("T(v_hi) must exceed 0.5"));
    }
    let resolution = T::lit(CRITICAL_VELOCITY_RESOLUTION);
    while hi - lo >= resolution {
        let mid = (lo + hi) * half;
        if transmission(mid)? >= half {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(points: &[(f64, Option<(f64, f64, f64)>)]) -> VelocityScan<f64> {
        VelocityScan {
            amplitude: 1.4,
            velocities: points.iter().map(|p| p.0).collect(),
            records: points
                .iter()
                .map(|p| p.1.map(|(r11, t10, t01)| VelocityRecord { r11, t10, t01, norm_drift: 0.0 }))
                .collect(),
            errors: vec![None; points.len()],
        }
    }

    #[test]
    fn window_runs() {
        let s = scan(&[
            (0.1, Some((0.5, 0.95, 0.95))),
            (0.2, Some((0.95, 0.95, 0.95))),
            (0.3, Some((0.95, 0.95, 0.95))),
            (0.4, Some((0.95, 0.5, 0.95))),
            (0.5, Some((0.95, 0.95, 0.95))),
            (0.6, None),
            (0.7, Some((0.95, 0.95, 0.95))),
        ]);
        assert_eq!(
            operational_window(&s, 0.9, 0.9),
            vec![(0.2, 0.3), (0.5, 0.5), (0.7, 0.7)]
        );
    }

    #[test]
    fn window_empty_and_degenerate() {
        let s = scan(&[(0.1, Some((0.1, 0.1, 0.1))), (0.2, Some((0.2, 0.95, 0.95)))]);
        assert!(operational_window(&s, 0.9, 0.9).is_empty());
        let s = scan(&[(0.1, Some((0.1, 0.1, 0.1))), (0.2, Some((0.95, 0.95, 0.95)))]);
        assert_eq!(operational_window(&s, 0.9, 0.9), vec![(0.2, 0.2)]);
    }

    #[test]
    fn empty_velocity_list_rejected() {
        let g = Grid::<f64>::new(64.0, 64).unwrap();
        let p = GateParams::default();
        let err = scan_velocity(&p, &[], &NumericsConfig::default(), &g).unwrap_err();
        assert_eq!(err, Error::EmptyScan("velocities"));
        let err = scan_velocity(&p, &[0.5, 0.4], &NumericsConfig::default(), &g).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    proptest::proptest! {
        #[test]
        fn windows_shrink_with_thresholds(
            recs in proptest::collection::vec((0.5f64..1.0, 0.5f64..1.0, 0.5f64..1.0), 1..30),
            lo in 0.55f64..0.95, bump in 0.0f64..0.05,
        ) {
            let pts: Vec<(f64, Option<(f64, f64, f64)>)> =
                recs.iter().enumerate().map(|(i, r)| (i as f64 * 0.01, Some(*r))).collect();
            let s = scan(&pts);
            let strict = operational_window(&s, lo + bump, lo + bump);
            let loose = operational_window(&s, lo, lo);
            for (a, b) in strict {
                proptest::prop_assert!(loose.iter().any(|(c, d)| *c <= a && b <= *d));
            }
        }
    }
}
