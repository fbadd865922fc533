//! Strang-split Fourier integrator for the coupled attractive NLS system
//!
//! ```text
//! i ∂t ψj = [ -½ ∂x² - (gjj |ψj|² + gjk |ψk|²) + V(x) ] ψj
//! ```
//!
//! One step is `N(dt/2) K(dt) N(dt/2)`, where `N` is the exact pointwise phase
//! rotation with frozen moduli and `K` the exact kinetic propagator in Fourier
//! space. Both substeps are unitary, so component norms are conserved to
//! rounding. [`Propagator::evolve`] merges the trailing and leading half
//! rotations of consecutive steps, which is exact because `N` does not change
//! `|ψ|`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Spectral};
use crate::model::Couplings;
use crate::scalar::Real;

/// Edge density relative to the peak above which wrap-around is reported.
pub const WRAP_TOLERANCE: f64 = 1e-4;

/// One- or two-component field at a common time.
#[derive(Debug, Clone, PartialEq)]
pub struct State<T> {
    components: Vec<Vec<Complex<T>>>,
    time: T,
    norms0: Vec<T>,
}

impl<T: Real> State<T> {
    /// Builds a state at `t = 0` and caches the initial norm of each component.
    pub fn new(components: Vec<Vec<Complex<T>>>, grid: &Grid<T>) -> Result<Self> {
        if components.is_empty() || components.len() > 2 {
            return Err(Error::config(
                "components",
                format!("expected 1 or 2 components, got {}", components.len()),
            ));
        }
        let norms0 = components
            .iter()
            .map(|c| grid.norm(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            components,
            time: T::zero(),
            norms0,
        })
    }

    /// Single-component state.
    pub fn single(field: Vec<Complex<T>>, grid: &Grid<T>) -> Result<Self> {
        Self::new(vec![field], grid)
    }

    /// Builds a state without recording norms; transport analysis on it fails.
    pub fn without_norms(components: Vec<Vec<Complex<T>>>) -> Self {
        Self {
            components,
            time: T::zero(),
            norms0: Vec::new(),
        }
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &[Complex<T>] {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.components[j]
    }

    pub fn components(&self) -> &[Vec<Complex<T>>] {
        &self.components
    }

    pub fn psi1(&self) -> &[Complex<T>] {
        self.component(0)
    }

    pub fn psi2(&self) -> Option<&[Complex<T>]> {
        self.components.get(1).map(Vec::as_slice)
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn set_time(&mut self, time: T) {
        self.time = time;
    }

    /// Cached `N_j(0)`; empty if the state was built with [`State::without_norms`].
    pub fn initial_norms(&self) -> &[T] {
        &self.norms0
    }

    pub fn has_norms(&self) -> bool {
        self.norms0.len() == self.components.len() && self.norms0.iter().all(|&n| n > T::zero())
    }

    pub fn densities(&self) -> Vec<Vec<T>> {
        self.components
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).collect())
            .collect()
    }

    /// `max_j |N_j(t) / N_j(0) - 1|`.
    pub fn norm_drift(&self, grid: &Grid<T>) -> Result<T> {
        if !self.has_norms() {
            return Err(Error::UninitializedNorm);
        }
        let mut worst = T::zero();
        for (c, &n0) in self.components.iter().zip(&self.norms0) {
            worst = worst.max((grid.norm(c)? / n0 - T::one()).abs());
        }
        Ok(worst)
    }

    /// Replaces every component with its complex conjugate.
    pub fn conjugate(&mut self) {
        for c in &mut self.components {
            c.iter_mut().for_each(|z| *z = z.conj());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericsConfig<T> {
    pub dt: T,
    pub t_final: T,
    /// Record densities every this many steps; 0 keeps only the final state.
    pub snapshot_stride: usize,
}

impl<T: Real> NumericsConfig<T> {
    pub fn new(dt: T, t_final: T) -> Self {
        Self {
            dt,
            t_final,
            snapshot_stride: 0,
        }
    }

    pub fn with_snapshots(mut self, stride: usize) -> Self {
        self.snapshot_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::config("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::config(
                "t_final",
                format!("must be >= 0, got {}", self.t_final),
            ));
        }
        if self.t_final > T::zero() && self.dt > self.t_final {
            return Err(Error::config("dt", "must not exceed t_final"));
        }
        Ok(())
    }

    /// Number of full steps and the length of a trailing partial step (zero if none).
    pub fn schedule(&self) -> (usize, T) {
        let ratio = self.t_final / self.dt;
        let slack = T::lit(1e-9);
        let full = (ratio + slack).floor();
        let rest = self.t_final - full * self.dt;
        let full = full.to_usize().unwrap_or(0);
        if rest > slack * self.dt {
            (full, rest)
        } else {
            (full, T::zero())
        }
    }
}

impl<T: Real> Default for NumericsConfig<T> {
    fn default() -> Self {
        Self::new(T::lit(0.005), T::lit(200.0))
    }
}

/// Densities of all components at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot<T> {
    pub time: T,
    pub densities: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvolveReport<T> {
    pub snapshots: Vec<Snapshot<T>>,
    pub steps: usize,
    /// Times at which the edge density exceeded [`WRAP_TOLERANCE`] of the peak.
    pub wrap_warnings: Vec<T>,
}

/// Precomputed operators for one potential, coupling set and grid.
pub struct Propagator<'g, T: Real> {
    grid: &'g Grid<T>,
    potential: Vec<T>,
    couplings: Couplings<T>,
    spectral: Spectral<T>,
    kinetic_dt: T,
    kinetic: Vec<Complex<T>>,
    density: Vec<Vec<T>>,
}

impl<'g, T: Real> Propagator<'g, T> {
    pub fn new(grid: &'g Grid<T>, potential: Vec<T>, couplings: Couplings<T>) -> Result<Self> {
        grid.check_len(potential.len())?;
        if potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("potential", "contains non-finite values"));
        }
        Ok(Self {
            grid,
            potential,
            couplings,
            spectral: Spectral::for_grid(grid),
            kinetic_dt: T::nan(),
            kinetic: Vec::new(),
            density: Vec::new(),
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        self.grid
    }

    pub fn potential(&self) -> &[T] {
        &self.potential
    }

    fn check_state(&self, state: &State<T>) -> Result<()> {
        if state.components.is_empty() || state.components.len() > 2 {
            return Err(Error::config("components", "expected 1 or 2 components"));
        }
        for c in &state.components {
            self.grid.check_len(c.len())?;
        }
        Ok(())
    }

    /// Exact phase rotation `ψj <- ψj exp(i h (gjj|ψj|² + gjk|ψk|² - V))`.
    fn rotate(&mut self, state: &mut State<T>, h: T) -> Result<()> {
        let ncomp = state.components.len();
        self.density.resize_with(ncomp, Vec::new);
        for (d, c) in self.density.iter_mut().zip(&state.components) {
            d.clear();
            d.extend(c.iter().map(|z| z.norm_sqr()));
        }
        for j in 0..ncomp {
            let (g_self, g_cross) = match j {
                0 => (self.couplings.g11, self.couplings.g12),
                _ => (self.couplings.g22, self.couplings.g12),
            };
            let own = &self.density[j];
            let other = if ncomp == 2 { Some(&self.density[1 - j]) } else { None };
            let field = &mut state.components[j];
            for i in 0..field.len() {
                let mut nl = g_self * own[i];
                if let Some(o) = other {
                    nl = nl + g_cross * o[i];
                }
                let theta = h * (nl - self.potential[i]);
                if !theta.is_finite() {
                    return Err(Error::Blowup {
                        time: state.time.to_f64_lossy(),
                    });
                }
                let (s, c) = theta.sin_cos();
                field[i] = field[i] * Complex::new(c, s);
            }
        }
        Ok(())
    }

    /// Multiplies Fourier mode `m` by `exp(-i h k_m² / 2)`.
    fn kinetic(&mut self, state: &mut State<T>, h: T) {
        if self.kinetic_dt != h {
            let half = T::lit(0.5);
            // The 1/N of the inverse transform is folded into the multiplier.
            let scale = self.spectral.scale();
            self.kinetic = self
                .grid
                .k()
                .iter()
                .map(|&k| Complex::from_polar(scale, -h * half * k * k))
                .collect();
            self.kinetic_dt = h;
        }
        for c in &mut state.components {
            self.spectral.forward(c);
            c.iter_mut().zip(&self.kinetic).for_each(|(z, m)| *z = *z * m);
            self.spectral.inverse_unscaled(c);
        }
    }

    /// Advances `state` by one Strang step of length `dt`.
    pub fn step(&mut self, state: &mut State<T>, dt: T) -> Result<()> {
        self.check_state(state)?;
        let half = dt * T::lit(0.5);
        self.rotate(state, half)?;
        self.kinetic(state, dt);
        self.rotate(state, half)?;
        state.time = state.time + dt;
        Ok(())
    }

    /// Integrates to `state.time + numerics.t_final`.
    ///
    /// `observer` sees every recorded snapshot, including the initial one, when
    /// `snapshot_stride > 0`.
    pub fn evolve(
        &mut self,
        state: &mut State<T>,
        numerics: &NumericsConfig<T>,
        mut observer: Option<&mut dyn FnMut(&Snapshot<T>)>,
    ) -> Result<EvolveReport<T>> {
        numerics.validate()?;
        self.check_state(state)?;
        let mut report = EvolveReport::default();
        let t0 = state.time;
        let dt = numerics.dt;
        let stride = numerics.snapshot_stride;
        let (full, rest) = numerics.schedule();
        let total = full + usize::from(rest > T::zero());

        if stride > 0 {
            self.record(state, &mut report, &mut observer);
        }
        if total == 0 {
            return Ok(report);
        }

        let half = dt * T::lit(0.5);
        let mut pending = false;
        for i in 0..full {
            let lead = if pending { dt } else { half };
            self.rotate(state, lead)?;
            self.kinetic(state, dt);
            pending = true;
            state.time = t0 + dt * T::from_count(i + 1);
            // |ψ| is unchanged by the pending rotation, so densities are exact here.
            if stride > 0 && (i + 1) % stride == 0 {
                self.record(state, &mut report, &mut observer);
            }
        }
        if rest > T::zero() {
            if pending {
                self.rotate(state, half)?;
            }
            self.step(state, rest)?;
            pending = false;
        }
        if pending {
            self.rotate(state, half)?;
        }
        state.time = t0 + numerics.t_final;
        report.steps = total;
        if stride > 0 && total % stride != 0 {
            self.record(state, &mut report, &mut observer);
        }
        if let Some(t) = self.wrap_check(state) {
            report.wrap_warnings.push(t);
        }
        Ok(report)
    }

    fn record(
        &self,
        state: &State<T>,
        report: &mut EvolveReport<T>,
        observer: &mut Option<&mut dyn FnMut(&Snapshot<T>)>,
    ) {
        let snap = Snapshot {
            time: state.time,
            densities: state.densities(),
        };
        if let Some(t) = wrap_time(&snap) {
            report.wrap_warnings.push(t);
        }
        if let Some(obs) = observer.as_mut() {
            obs(&snap);
        }
        report.snapshots.push(snap);
    }

    fn wrap_check(&self, state: &State<T>) -> Option<T> {
        wrap_time(&Snapshot {
            time: state.time,
            densities: state.densities(),
        })
    }
}

fn wrap_time<T: Real>(snap: &Snapshot<T>) -> Option<T> {
    let threshold = T::lit(WRAP_TOLERANCE);
    let wrapped = snap.densities.iter().any(|d| {
        let peak = d.iter().copied().fold(T::zero(), T::max);
        let edge = d
            .first()
            .copied()
            .unwrap_or_else(T::zero)
            .max(d.last().copied().unwrap_or_else(T::zero));
        peak > T::zero() && edge > threshold * peak
    });
    if wrapped {
        log::warn!(
            "density at the domain edge exceeds {WRAP_TOLERANCE:e} of peak at t = {}",
            snap.time
        );
        Some(snap.time)
    } else {
        None
    }
}

/// One Strang step on a copy of `state`.
pub fn step<T: Real>(
    state: &State<T>,
    potential: &[T],
    couplings: &Couplings<T>,
    grid: &Grid<T>,
    dt: T,
) -> Result<State<T>> {
    if !(dt > T::zero()) {
        return Err(Error::config("dt", format!("must be > 0, got {dt}")));
    }
    let mut prop = Propagator::new(grid, potential.to_vec(), *couplings)?;
    let mut out = state.clone();
    prop.step(&mut out, dt)?;
    Ok(out)
}

/// Evolves a copy of `state` for `numerics.t_final`.
pub fn evolve<T: Real>(
    state: &State<T>,
    potential: &[T],
    couplings: &Couplings<T>,
    grid: &Grid<T>,
    numerics: &NumericsConfig<T>,
    observer: Option<&mut dyn FnMut(&Snapshot<T>)>,
) -> Result<(State<T>, EvolveReport<T>)> {
    let mut prop = Propagator::new(grid, potential.to_vec(), *couplings)?;
    let mut out = state.clone();
    let report = prop.evolve(&mut out, numerics, observer)?;
    Ok((out, report))
}
