//! Logical Toffoli encoding on top of the scattering simulation.
//!
//! Control bits switch the wells at `x1` and `x2` on or off. The target bit is
//! the ordering of the two components: `0` when component 1 is to the right of
//! component 2.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{read_target, transport, AnalysisRegion, Bit, TransportResult};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{Couplings, PotentialConfig, PotentialWell, SolitonSpec};
use crate::scalar::Real;
use crate::solver::{evolve, EvolveReport, NumericsConfig, Snapshot, State};

/// State of the two control bits, `|c1 c2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Controls {
    pub c1: Bit,
    pub c2: Bit,
}

impl Controls {
    pub const ALL: [Controls; 4] = [
        Controls::new(Bit::Zero, Bit::Zero),
        Controls::new(Bit::Zero, Bit::One),
        Controls::new(Bit::One, Bit::Zero),
        Controls::new(Bit::One, Bit::One),
    ];

    pub const fn new(c1: Bit, c2: Bit) -> Self {
        Self { c1, c2 }
    }

    pub fn well_count(self) -> usize {
        usize::from(self.c1 == Bit::One) + usize::from(self.c2 == Bit::One)
    }

    pub fn both_on(self) -> bool {
        self.c1 == Bit::One && self.c2 == Bit::One
    }
}

impl fmt::Display for Controls {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.c1, self.c2)
    }
}

impl std::str::FromStr for Controls {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: Vec<Bit> = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Some(Bit::Zero),
                '1' => Some(Bit::One),
                _ => None,
            })
            .collect::<Option<_>>()
            .ok_or_else(|| Error::config("controls", format!("expected two binary digits, got {s:?}")))?;
        match bits.as_slice() {
            [a, b] => Ok(Controls::new(*a, *b)),
            _ => Err(Error::config("controls", format!("expected two binary digits, got {s:?}"))),
        }
    }
}

/// Toffoli truth table: the target flips iff both controls are set.
pub fn expected_target(controls: Controls, target_in: Bit) -> Bit {
    if controls.both_on() {
        target_in.flip()
    } else {
        target_in
    }
}

/// Physical parameters of the gate. Defaults are the headline working point
/// (u = 1.4, v = 0.525, V1 = 1.08 * 4 at -10, V2 = 4 at +10, w = 0.5).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams<T> {
    pub amplitude: T,
    pub velocity: T,
    /// Center of the leading soliton.
    pub x0: T,
    /// Offset of the trailing soliton from `x0`.
    pub delta: T,
    pub base_depth: T,
    /// `V1 = alpha * base_depth`, `V2 = base_depth`.
    pub alpha: T,
    pub x1: T,
    pub x2: T,
    pub w1: T,
    pub w2: T,
    pub couplings: Couplings<T>,
    pub theta_r: T,
    pub theta_t: T,
    pub region: AnalysisRegion<T>,
}

impl<T: Real> Default for GateParams<T> {
    fn default() -> Self {
        Self {
            amplitude: T::lit(1.4),
            velocity: T::lit(0.525),
            x0: T::lit(-30.0),
            delta: T::lit(-10.0),
            base_depth: T::lit(4.0),
            alpha: T::lit(1.08),
            x1: T::lit(-10.0),
            x2: T::lit(10.0),
            w1: T::lit(0.5),
            w2: T::lit(0.5),
            couplings: Couplings::uncoupled(),
            theta_r: T::lit(0.9),
            theta_t: T::lit(0.9),
            region: AnalysisRegion::default(),
        }
    }
}

impl<T: Real> GateParams<T> {
    pub fn depth1(&self) -> T {
        self.alpha * self.base_depth
    }

    pub fn depth2(&self) -> T {
        self.base_depth
    }

    pub fn well1(&self) -> Result<PotentialWell<T>> {
        PotentialWell::new(self.depth1(), self.w1, self.x1)
    }

    pub fn well2(&self) -> Result<PotentialWell<T>> {
        PotentialWell::new(self.depth2(), self.w2, self.x2)
    }

    pub fn potential(&self, controls: Controls) -> Result<PotentialConfig<T>> {
        let mut wells = Vec::with_capacity(2);
        if controls.c1 == Bit::One {
            wells.push(self.well1()?);
        }
        if controls.c2 == Bit::One {
            wells.push(self.well2()?);
        }
        PotentialConfig::new(wells)
    }

    pub fn validate(&self) -> Result<()> {
        SolitonSpec::new(self.amplitude, self.velocity, self.x0)?;
        self.well1()?;
        self.well2()?;
        self.couplings.validate()?;
        if !(self.alpha > T::zero()) {
            return Err(Error::config("alpha", format!("must be > 0, got {}", self.alpha)));
        }
        if !(self.x1 < self.x2) {
            return Err(Error::config("x1", "well 1 must lie left of well 2"));
        }
        if !self.delta.is_finite() || self.delta == T::zero() {
            return Err(Error::config("delta", "offset must be finite and non-zero"));
        }
        if self.velocity > T::zero() && !(self.x0.max(self.x0 + self.delta) < self.x1) {
            return Err(Error::config("x0", "solitons must start left of well 1"));
        }
        let half = T::lit(0.5);
        for (field, th) in [("theta_r", self.theta_r), ("theta_t", self.theta_t)] {
            if !(th > half && th < T::one()) {
                return Err(Error::config(field, format!("must lie in (0.5, 1), got {th}")));
            }
        }
        if !(self.region.l1 < self.region.l2) {
            return Err(Error::config("region", "need l1 < l2"));
        }
        Ok(())
    }
}

/// Physical realisation of one truth-table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateScenario<T> {
    pub controls: Controls,
    pub target_in: Bit,
    pub potential: PotentialConfig<T>,
    /// Component 1 and component 2 initial solitons.
    pub solitons: [SolitonSpec<T>; 2],
    pub couplings: Couplings<T>,
    pub region: AnalysisRegion<T>,
    pub theta_r: T,
    pub theta_t: T,
}

pub fn build_scenario<T: Real>(
    controls: Controls,
    target_in: Bit,
    params: &GateParams<T>,
) -> Result<GateScenario<T>> {
    params.validate()?;
    let lead = SolitonSpec::new(params.amplitude, params.velocity, params.x0)?;
    let trail = SolitonSpec::new(params.amplitude, params.velocity, params.x0 + params.delta)?;
    let solitons = match target_in {
        Bit::Zero => [lead, trail],
        Bit::One => [trail, lead],
    };
    Ok(GateScenario {
        controls,
        target_in,
        potential: params.potential(controls)?,
        solitons,
        couplings: params.couplings,
        region: params.region,
        theta_r: params.theta_r,
        theta_t: params.theta_t,
    })
}

impl<T: Real> GateScenario<T> {
    pub fn expected_target(&self) -> Bit {
        expected_target(self.controls, self.target_in)
    }

    pub fn initial_state(&self, grid: &Grid<T>) -> Result<State<T>> {
        crate::model::initial_state(&self.solitons[0], &self.solitons[1], grid)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOutcome<T> {
    pub controls: Controls,
    pub target_in: Bit,
    pub expected: Bit,
    /// `None` when the final ordering is ambiguous.
    pub target_out: Option<Bit>,
    pub ambiguous: bool,
    pub transport: TransportResult<T>,
    /// Minimum reflection over components for `|11⟩`, minimum transmission otherwise.
    pub quality: T,
    pub pass: bool,
    pub norm_drift: T,
    pub wrap_warnings: usize,
}

impl<T: Real> GateOutcome<T> {
    /// Re-evaluates `pass` against other thresholds.
    pub fn passes(&self, theta_r: T, theta_t: T) -> bool {
        let threshold = if self.controls.both_on() { theta_r } else { theta_t };
        self.target_out == Some(self.expected) && self.quality >= threshold
    }
}

fn quality_of<T: Real>(controls: Controls, tr: &TransportResult<T>) -> T {
    if controls.both_on() {
        tr.min_reflection()
    } else {
        tr.min_transmission()
    }
}

/// Evolves the scenario, decodes the target and scores the row.
pub fn run_gate<T: Real>(
    scenario: &GateScenario<T>,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
) -> Result<GateOutcome<T>> {
    run_gate_observed(scenario, numerics, grid, None).map(|(o, _)| o)
}

/// [`run_gate`] that also returns the evolution report (snapshots included).
pub fn run_gate_observed<T: Real>(
    scenario: &GateScenario<T>,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
    observer: Option<&mut dyn FnMut(&Snapshot<T>)>,
) -> Result<(GateOutcome<T>, EvolveReport<T>)> {
    scenario.region.validate_for(grid)?;
    let state = scenario.initial_state(grid)?;
    let (fin, report) = evolve(
        &state,
        &scenario.potential.values(grid),
        &scenario.couplings,
        grid,
        numerics,
        observer,
    )?;
    let tr = transport(&fin, grid, &scenario.region)?;
    let (target_out, ambiguous) = match read_target(&fin, grid) {
        Ok(b) => (Some(b), false),
        Err(Error::AmbiguousReadout { .. }) => (None, true),
        Err(e) => return Err(e),
    };
    let quality = quality_of(scenario.controls, &tr);
    let mut outcome = GateOutcome {
        controls: scenario.controls,
        target_in: scenario.target_in,
        expected: scenario.expected_target(),
        target_out,
        ambiguous,
        transport: tr,
        quality,
        pass: false,
        norm_drift: fin.norm_drift(grid)?,
        wrap_warnings: report.wrap_warnings.len(),
    };
    outcome.pass = outcome.passes(scenario.theta_r, scenario.theta_t);
    Ok((outcome, report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTableRow<T> {
    pub target_in: Bit,
    pub controls: Controls,
    pub outcome: Option<GateOutcome<T>>,
    pub error: Option<String>,
}

impl<T: Real> TruthTableRow<T> {
    pub fn pass(&self) -> bool {
        self.outcome.as_ref().is_some_and(|o| o.pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTableReport<T> {
    /// Ordered by `(target_in, controls)`, matching the usual table layout.
    pub rows: Vec<TruthTableRow<T>>,
    pub all_pass: bool,
}

impl<T: Real> TruthTableReport<T> {
    pub fn row(&self, target_in: Bit, controls: Controls) -> Option<&TruthTableRow<T>> {
        self.rows
            .iter()
            .find(|r| r.target_in == target_in && r.controls == controls)
    }
}

/// Runs all eight rows, in parallel on the current rayon pool.
pub fn verify_truth_table<T: Real>(
    params: &GateParams<T>,
    numerics: &NumericsConfig<T>,
    grid: &Grid<T>,
) -> Result<TruthTableReport<T>> {
    params.validate()?;
    numerics.validate()?;
    let keys: Vec<(Bit, Controls)> = [Bit::Zero, Bit::One]
        .into_iter()
        .flat_map(|t| Controls::ALL.into_iter().map(move |c| (t, c)))
        .collect();
    let rows: Vec<TruthTableRow<T>> = keys
        .par_iter()
        .map(|&(target_in, controls)| {
            let result = build_scenario(controls, target_in, params)
                .and_then(|s| run_gate(&s, numerics, grid));
            match result {
                Ok(o) => TruthTableRow {
                    target_in,
                    controls,
                    outcome: Some(o),
                    error: None,
                },
                Err(e) => TruthTableRow {
                    target_in,
                    controls,
                    outcome: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let all_pass = rows.iter().all(TruthTableRow::pass);
    Ok(TruthTableReport { rows, all_pass })
}
