//! Two-component bright-soliton scattering through Pöschl-Teller wells.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which every tolerance in the test
//! suite assumes.

pub mod analysis;
pub mod error;
pub mod gate;
pub mod grid;
pub mod model;
pub mod scalar;
pub mod solver;
pub mod sweep;

pub use analysis::{AnalysisRegion, Bit, Coefficients, TransportResult};
pub use error::{Error, Result};
pub use gate::{Controls, GateOutcome, GateParams, GateScenario, TruthTableReport};
pub use grid::{Grid, Spectral};
pub use model::{Couplings, PotentialConfig, PotentialWell, SolitonSpec};
pub use scalar::Real;
pub use solver::{NumericsConfig, Propagator, Snapshot, State};
pub use sweep::{RegionMap, VelocityScan};

pub type Grid64 = Grid<f64>;
pub type State64 = State<f64>;
pub type Couplings64 = Couplings<f64>;
pub type NumericsConfig64 = NumericsConfig<f64>;
pub type PotentialConfig64 = PotentialConfig<f64>;
pub type SolitonSpec64 = SolitonSpec<f64>;
pub type TransportResult64 = TransportResult<f64>;
pub type GateParams64 = GateParams<f64>;
pub type RegionMap64 = RegionMap<f64>;
pub type VelocityScan64 = VelocityScan<f64>;
