//! Transport coefficients, soliton positions and target-bit readout.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::Real;
use crate::solver::State;

/// Interval `[l1, l2]` enclosing the wells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRegion<T> {
    pub l1: T,
    pub l2: T,
}

impl<T: Real> AnalysisRegion<T> {
    pub fn new(l1: T, l2: T) -> Result<Self> {
        if !(l1 < l2) {
            return Err(Error::config("region", format!("need l1 < l2, got [{l1}, {l2}]")));
        }
        Ok(Self { l1, l2 })
    }

    pub fn validate_for(&self, grid: &Grid<T>) -> Result<()> {
        let x = grid.x();
        let (lo, hi) = (x[0], x[x.len() - 1]);
        if !(self.l1 < self.l2) || !(self.l1 > lo) || !(self.l2 < hi) {
            return Err(Error::config(
                "region",
                format!("[{}, {}] must lie strictly inside [{lo}, {hi}]", self.l1, self.l2),
            ));
        }
        Ok(())
    }
}

impl<T: Real> Default for AnalysisRegion<T> {
    fn default() -> Self {
        Self {
            l1: T::lit(-15.0),
            l2: T::lit(15.0),
        }
    }
}

/// Reflected, trapped and transmitted fractions of one component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients<T> {
    pub reflection: T,
    pub trapping: T,
    pub transmission: T,
}

impl<T: Real> Coefficients<T> {
    pub fn sum(&self) -> T {
        self.reflection + self.trapping + self.transmission
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportResult<T> {
    pub components: Vec<Coefficients<T>>,
}

impl<T: Real> TransportResult<T> {
    pub fn component(&self, j: usize) -> &Coefficients<T> {
        &self.components[j]
    }

    pub fn min_reflection(&self) -> T {
        self.components
            .iter()
            .map(|c| c.reflection)
            .fold(T::infinity(), T::min)
    }

    pub fn min_transmission(&self) -> T {
        self.components
            .iter()
            .map(|c| c.transmission)
            .fold(T::infinity(), T::min)
    }
}

/// Splits each component's density into `x < l1`, `l1 <= x <= l2` and `x > l2`,
/// normalised by its initial norm.
pub fn transport<T: Real>(
    state: &State<T>,
    grid: &Grid<T>,
    region: &AnalysisRegion<T>,
) -> Result<TransportResult<T>> {
    if !state.has_norms() {
        return Err(Error::UninitializedNorm);
    }
    region.validate_for(grid)?;
    let x = grid.x();
    let dx = grid.dx();
    let components = state
        .components()
        .iter()
        .zip(state.initial_norms())
        .map(|(field, &n0)| {
            grid.check_len(field.len())?;
            let (mut r, mut l, mut t) = (T::zero(), T::zero(), T::zero());
            for (z, &xi) in field.iter().zip(x) {
                let d = z.norm_sqr();
                if xi < region.l1 {
                    r = r + d;
                } else if xi <= region.l2 {
                    l = l + d;
                } else {
                    t = t + d;
                }
            }
            let s = dx / n0;
            Ok(Coefficients {
                reflection: r * s,
                trapping: l * s,
                transmission: t * s,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransportResult { components })
}

/// `∫ x |ψ|² dx / ∫ |ψ|² dx`.
pub fn center_of_mass<T: Real>(field: &[Complex<T>], grid: &Grid<T>) -> Result<T> {
    grid.check_len(field.len())?;
    let (mut m0, mut m1) = (T::zero(), T::zero());
    for (z, &x) in field.iter().zip(grid.x()) {
        let d = z.norm_sqr();
        m0 = m0 + d;
        m1 = m1 + x * d;
    }
    if !(m0 > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    Ok(m1 / m0)
}

/// Grid position of the density maximum. Diagnostic cross-check for
/// [`center_of_mass`].
pub fn peak_position<T: Real>(field: &[Complex<T>], grid: &Grid<T>) -> Result<T> {
    grid.check_len(field.len())?;
    let (idx, best) = field
        .iter()
        .map(|z| z.norm_sqr())
        .enumerate()
        .fold((0, T::zero()), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
    if !(best > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    Ok(grid.x()[idx])
}

/// Mean velocity `∫ Im(ψ* ∂xψ) dx / ∫ |ψ|² dx`, computed spectrally.
pub fn mean_velocity<T: Real>(field: &[Complex<T>], grid: &Grid<T>) -> Result<T> {
    grid.check_len(field.len())?;
    let mut spec = field.to_vec();
    let mut sp = crate::grid::Spectral::for_grid(grid);
    sp.forward(&mut spec);
    let (mut m0, mut p) = (T::zero(), T::zero());
    for (z, &k) in spec.iter().zip(grid.k()) {
        let w = z.norm_sqr();
        m0 = m0 + w;
        p = p + k * w;
    }
    if !(m0 > T::zero()) {
        return Err(Error::ZeroNorm);
    }
    Ok(p / m0)
}

/// Logical value of the target bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Bit::Zero),
            1 => Some(Bit::One),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }
}

impl std::fmt::Display for Bit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Ordering tolerance used by [`read_target`]: two grid cells.
pub fn readout_tolerance<T: Real>(grid: &Grid<T>) -> T {
    grid.dx() * T::lit(2.0)
}

/// `0` when component 1 sits to the right of component 2, `1` when to the left.
pub fn read_target<T: Real>(state: &State<T>, grid: &Grid<T>) -> Result<Bit> {
    let second = state
        .psi2()
        .ok_or_else(|| Error::config("components", "target readout needs two components"))?;
    let c1 = center_of_mass(state.psi1(), grid)?;
    let c2 = center_of_mass(second, grid)?;
    let eps = readout_tolerance(grid);
    let sep = c1 - c2;
    if sep > eps {
        Ok(Bit::Zero)
    } else if sep < -eps {
        Ok(Bit::One)
    } else {
        Err(Error::AmbiguousReadout {
            separation: sep.to_f64_lossy(),
            tolerance: eps.to_f64_lossy(),
        })
    }
}
