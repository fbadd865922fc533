//! Physical configuration: couplings, Pöschl-Teller wells and bright solitons.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::scalar::{sech, Real};
use crate::solver::State;

/// Relative edge amplitude above which a soliton is considered to wrap around.
pub const TAIL_TOLERANCE: f64 = 1e-6;

/// Nonlinear couplings. Attractive for positive values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings<T> {
    pub g11: T,
    pub g22: T,
    /// Cross coupling, used for both `g12` and `g21`.
    pub g12: T,
}

impl<T: Real> Couplings<T> {
    /// Unit self-interaction with the given cross coupling.
    pub fn with_cross(g12: T) -> Self {
        Self {
            g11: T::one(),
            g22: T::one(),
            g12,
        }
    }

    pub fn uncoupled() -> Self {
        Self::with_cross(T::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g12 >= T::zero()) || !self.g12.is_finite() {
            return Err(Error::config("g12", format!("must be >= 0, got {}", self.g12)));
        }
        if !self.g11.is_finite() || !self.g22.is_finite() {
            return Err(Error::config("g11/g22", "must be finite"));
        }
        Ok(())
    }
}

impl<T: Real> Default for Couplings<T> {
    fn default() -> Self {
        Self::uncoupled()
    }
}

/// Attractive well `-depth * sech²((x - center) / width)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialWell<T> {
    pub depth: T,
    pub width: T,
    pub center: T,
}

impl<T: Real> PotentialWell<T> {
    pub fn new(depth: T, width: T, center: T) -> Result<Self> {
        if !(depth > T::zero()) || !depth.is_finite() {
            return Err(Error::config("well.depth", format!("must be > 0, got {depth}")));
        }
        if !(width > T::zero()) || !width.is_finite() {
            return Err(Error::config("well.width", format!("must be > 0, got {width}")));
        }
        if !center.is_finite() {
            return Err(Error::config("well.center", "must be finite"));
        }
        Ok(Self {
            depth,
            width,
            center,
        })
    }

    #[inline]
    pub fn value_at(&self, x: T) -> T {
        let s = sech((x - self.center) / self.width);
        -self.depth * s * s
    }
}

/// Superposition of zero, one or two wells.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PotentialConfig<T> {
    wells: Vec<PotentialWell<T>>,
}

impl<T: Real> PotentialConfig<T> {
    pub fn empty() -> Self {
        Self { wells: Vec::new() }
    }

    pub fn new(wells: Vec<PotentialWell<T>>) -> Result<Self> {
        if wells.len() > 2 {
            return Err(Error::config(
                "wells",
                format!("at most two wells supported, got {}", wells.len()),
            ));
        }
        if let [a, b] = wells.as_slice() {
            if a.center == b.center {
                return Err(Error::config("wells", "well centers must be distinct"));
            }
        }
        Ok(Self { wells })
    }

    pub fn wells(&self) -> &[PotentialWell<T>] {
        &self.wells
    }

    pub fn len(&self) -> usize {
        self.wells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wells.is_empty()
    }

    pub fn value_at(&self, x: T) -> T {
        self.wells.iter().fold(T::zero(), |acc, w| acc + w.value_at(x))
    }

    /// Samples `V(x)` on the grid.
    pub fn values(&self, grid: &Grid<T>) -> Vec<T> {
        grid.x().iter().map(|&x| self.value_at(x)).collect()
    }
}

/// Width that makes a well of the given depth reflectionless for linear waves:
/// `depth * w² = n (n + 1) / 2`.
pub fn reflectionless_width<T: Real>(depth: T, order: u32) -> Result<T> {
    if !(depth > T::zero()) || !depth.is_finite() {
        return Err(Error::config("depth", format!("must be > 0, got {depth}")));
    }
    if order == 0 {
        return Err(Error::config("order", "must be >= 1"));
    }
    let n = T::from_u32(order).expect("order fits scalar");
    Ok((n * (n + T::one()) / (T::lit(2.0) * depth)).sqrt())
}

/// Bright soliton `u sech(u (x - x0)) exp(i v (x - x0))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonSpec<T> {
    pub amplitude: T,
    pub velocity: T,
    pub center: T,
}

impl<T: Real> SolitonSpec<T> {
    pub fn new(amplitude: T, velocity: T, center: T) -> Result<Self> {
        if !(amplitude > T::zero()) || !amplitude.is_finite() {
            return Err(Error::config("u", format!("amplitude must be > 0, got {amplitude}")));
        }
        if !velocity.is_finite() {
            return Err(Error::config("v", "velocity must be finite"));
        }
        if !center.is_finite() {
            return Err(Error::config("x0", "center must be finite"));
        }
        Ok(Self {
            amplitude,
            velocity,
            center,
        })
    }

    /// Envelope magnitude at the nearer domain edge divided by the amplitude.
    pub fn edge_tail(&self, grid: &Grid<T>) -> T {
        let half = grid.length() / T::lit(2.0);
        let gap = half - self.center.abs();
        sech(self.amplitude * gap)
    }

    pub fn field(&self, grid: &Grid<T>) -> Vec<Complex<T>> {
        let tail = self.edge_tail(grid);
        if tail > T::lit(TAIL_TOLERANCE) {
            log::warn!(
                "soliton at x0 = {} (u = {}) has edge tail {:.3e}; expect wrap-around contamination",
                self.center,
                self.amplitude,
                tail.to_f64_lossy()
            );
        }
        let u = self.amplitude;
        grid.x()
            .iter()
            .map(|&x| {
                let s = x - self.center;
                Complex::from_polar(u * sech(u * s), self.velocity * s)
            })
            .collect()
    }
}

/// Sampled soliton field, see [`SolitonSpec::field`].
pub fn soliton_field<T: Real>(spec: &SolitonSpec<T>, grid: &Grid<T>) -> Vec<Complex<T>> {
    spec.field(grid)
}

/// Two-component initial condition with cached norms.
pub fn initial_state<T: Real>(
    first: &SolitonSpec<T>,
    second: &SolitonSpec<T>,
    grid: &Grid<T>,
) -> Result<State<T>> {
    State::new(vec![first.field(grid), second.field(grid)], grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> Grid<f64> {
        Grid::new(256.0, 4096).unwrap()
    }

    #[test]
    fn single_well_minimum() {
        let w = PotentialWell::new(4.0, 0.5, 0.0).unwrap();
        assert_eq!(w.value_at(0.0), -4.0);
    }

    #[test]
    fn empty_potential_is_zero() {
        let g = grid();
        assert!(PotentialConfig::<f64>::empty().values(&g).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn double_well_at_first_center() {
        let cfg = PotentialConfig::new(vec![
            PotentialWell::new(4.32, 0.5, -10.0).unwrap(),
            PotentialWell::new(4.0, 0.5, 10.0).unwrap(),
        ])
        .unwrap();
        let v = cfg.value_at(-10.0);
        let tail = -4.0 * (1.0 / 40.0f64.cosh()).powi(2);
        assert!((v - (-4.32 + tail)).abs() < 1e-30);
        assert!((v + 4.32).abs() < 1e-30);
        let g = grid();
        assert!(cfg.values(&g).iter().all(|&v| v <= 0.0));
    }

    #[test]
    fn well_validation() {
        assert!(PotentialWell::new(0.0, 0.5, 0.0).is_err());
        assert!(PotentialWell::new(4.0, -0.5, 0.0).is_err());
        let w = PotentialWell::new(4.0, 0.5, 1.0).unwrap();
        assert!(PotentialConfig::new(vec![w, w]).is_err());
        assert!(PotentialConfig::new(vec![w; 3]).is_err());
    }

    #[test]
    fn translation_covariance() {
        let shift = 0.0625 * 16.0;
        let g = grid();
        let shifted_x: Vec<f64> = g.x().iter().map(|x| x + shift).collect();
        let a = PotentialConfig::new(vec![PotentialWell::new(4.32, 0.5, -10.0).unwrap()]).unwrap();
        let b = PotentialConfig::new(vec![PotentialWell::new(4.32, 0.5, -10.0 + shift).unwrap()]).unwrap();
        for (&x, &xs) in g.x().iter().zip(&shifted_x) {
            assert_relative_eq!(a.value_at(x), b.value_at(xs), epsilon = 1e-14);
        }
    }

    #[test]
    fn reflectionless_widths() {
        assert_eq!(reflectionless_width(4.0, 1).unwrap(), 0.5);
        assert_eq!(reflectionless_width(1.0, 1).unwrap(), 1.0);
        assert_relative_eq!(reflectionless_width(4.0, 2).unwrap(), 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert!(reflectionless_width(0.0, 1).is_err());
        assert!(reflectionless_width(4.0, 0).is_err());
    }

    #[test]
    fn soliton_peak_and_norm() {
        let g = grid();
        let spec = SolitonSpec::new(1.4, 0.525, -30.0).unwrap();
        let f = spec.field(&g);
        let i = g.x().iter().position(|&x| x == -30.0).unwrap();
        assert_relative_eq!(f[i].norm(), 1.4, epsilon = 1e-15);
        assert_eq!(f[i].im, 0.0);
        assert_relative_eq!(g.norm(&f).unwrap(), 2.8, epsilon = 1e-8);
    }

    #[test]
    fn stationary_soliton_is_real() {
        let g = grid();
        let f = SolitonSpec::new(1.0, 0.0, 0.0).unwrap().field(&g);
        for (z, &x) in f.iter().zip(g.x()) {
            assert_eq!(z.im, 0.0);
            assert_relative_eq!(z.re, 1.0 / x.cosh(), epsilon = 1e-14);
        }
    }

    #[test]
    fn soliton_rejects_bad_amplitude() {
        assert!(SolitonSpec::new(0.0, 0.5, 0.0).is_err());
        assert!(SolitonSpec::new(-1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn edge_tail_flags_wide_soliton() {
        let g = grid();
        assert!(SolitonSpec::new(1.4, 0.5, -30.0).unwrap().edge_tail(&g) < 1e-30);
        assert!(SolitonSpec::new(0.05, 0.5, -30.0).unwrap().edge_tail(&g) > 1e-6);
    }

    #[test]
    fn initial_state_pair() {
        let g = grid();
        let s1 = SolitonSpec::new(1.4, 0.525, -30.0).unwrap();
        let s2 = SolitonSpec::new(1.4, 0.525, -40.0).unwrap();
        let st = initial_state(&s1, &s2, &g).unwrap();
        assert_eq!(st.time(), 0.0);
        assert_relative_eq!(st.initial_norms()[0], 2.8, epsilon = 1e-8);
        assert_relative_eq!(st.initial_norms()[1], 2.8, epsilon = 1e-8);

        let same = initial_state(&s1, &s1, &g).unwrap();
        assert_eq!(same.component(0), same.component(1));
    }

    proptest::proptest! {
        #[test]
        fn modulus_independent_of_velocity(u in 0.3f64..2.0, v in -2.0f64..2.0, x0 in -40.0f64..40.0) {
            let g = Grid::<f64>::new(256.0, 1024).unwrap();
            let a = SolitonSpec::new(u, 0.0, x0).unwrap().field(&g);
            let b = SolitonSpec::new(u, v, x0).unwrap().field(&g);
            for (p, q) in a.iter().zip(&b) {
                proptest::prop_assert!((p.norm() - q.norm()).abs() <= 1e-13);
            }
        }
    }
}
