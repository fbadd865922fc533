//! Uniform periodic grid and its discrete Fourier wavenumbers.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Periodic grid on `[-L/2, L/2)` with `N` points.
///
/// `k` follows the DFT ordering `2π m / L` for `m = 0, .., N/2-1, -N/2, .., -1`.
#[derive(Clone, PartialEq)]
pub struct Grid<T> {
    length: T,
    dx: T,
    x: Vec<T>,
    k: Vec<T>,
}

/// `L = 256`, `N = 4096` (`dx = 0.0625`).
impl<T: Real> Default for Grid<T> {
    fn default() -> Self {
        Self::new(T::lit(256.0), 4096).expect("default grid is valid")
    }
}

impl<T: Real> Grid<T> {
    pub fn new(length: T, points: usize) -> Result<Self> {
        if points < 2 || points % 2 != 0 {
            return Err(Error::config(
                "grid.points",
                format!("must be even and >= 2, got {points}"),
            ));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::config(
                "grid.length",
                format!("must be positive and finite, got {length}"),
            ));
        }
        let n = T::from_count(points);
        let dx = length / n;
        let half = length / T::lit(2.0);
        let x = (0..points)
            .map(|i| -half + dx * T::from_count(i))
            .collect();
        let dk = T::TAU() / length;
        let k = (0..points)
            .map(|i| {
                if i < points / 2 {
                    dk * T::from_count(i)
                } else {
                    -dk * T::from_count(points - i)
                }
            })
            .collect();
        Ok(Self { length, dx, x, k })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn points(&self) -> usize {
        self.x.len()
    }

    pub fn dx(&self) -> T {
        self.dx
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn k(&self) -> &[T] {
        &self.k
    }

    /// Rectangle-rule integral `dx * Σ values`.
    pub fn quadrature(&self, values: &[T]) -> Result<T> {
        self.check_len(values.len())?;
        Ok(self.dx * values.iter().fold(T::zero(), |acc, &v| acc + v))
    }

    /// `∫ |ψ|² dx` for a complex field on this grid.
    pub fn norm(&self, field: &[Complex<T>]) -> Result<T> {
        self.check_len(field.len())?;
        Ok(self.dx * field.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.points() {
            return Err(Error::LengthMismatch {
                expected: self.points(),
                actual: len,
            });
        }
        Ok(())
    }
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.length)
            .field("points", &self.points())
            .field("dx", &self.dx)
            .finish()
    }
}

/// Planned forward/inverse transforms for one grid size.
///
/// `inverse` includes the `1/N` normalisation, so `inverse(forward(ψ)) = ψ`.
#[derive(Clone)]
pub struct Spectral<T: Real> {
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    scale: T,
}

impl<T: Real> Spectral<T> {
    pub fn new(points: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
            scale: T::one() / T::from_count(points),
        }
    }

    pub fn for_grid(grid: &Grid<T>) -> Self {
        Self::new(grid.points())
    }

    pub fn forward(&mut self, data: &mut [Complex<T>]) {
        self.forward.process_with_scratch(data, &mut self.scratch);
    }

    /// Inverse transform without the `1/N` factor.
    pub fn inverse_unscaled(&mut self, data: &mut [Complex<T>]) {
        self.inverse.process_with_scratch(data, &mut self.scratch);
    }

    pub fn inverse(&mut self, data: &mut [Complex<T>]) {
        self.inverse_unscaled(data);
        let s = self.scale;
        data.iter_mut().for_each(|z| *z = z.scale(s));
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    /// Spectral `∂²/∂x²` of a complex field.
    pub fn second_derivative(&mut self, grid: &Grid<T>, field: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = field.to_vec();
        self.forward(&mut buf);
        buf.iter_mut()
            .zip(grid.k())
            .for_each(|(z, &k)| *z = z.scale(-(k * k)));
        self.inverse(&mut buf);
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn four_point_grid() {
        let g = Grid::new(2.0 * PI, 4).unwrap();
        let expected_x = [-PI, -PI / 2.0, 0.0, PI / 2.0];
        let expected_k = [0.0, 1.0, -2.0, -1.0];
        for (a, b) in g.x().iter().zip(expected_x) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        for (a, b) in g.k().iter().zip(expected_k) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn default_spacing() {
        let g = Grid::<f64>::new(256.0, 4096).unwrap();
        assert_eq!(g.dx(), 0.0625);
        assert_eq!(g.dx() * 4096.0, 256.0);
        let kmax = g.k().iter().fold(0.0_f64, |m, k| m.max(k.abs()));
        assert_relative_eq!(kmax, PI / g.dx(), max_relative = 1e-14);
        assert!(g.x().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(matches!(
            Grid::<f64>::new(256.0, 4097),
            Err(Error::Config { field: "grid.points", .. })
        ));
        assert!(Grid::<f64>::new(256.0, 0).is_err());
        assert!(Grid::<f64>::new(0.0, 16).is_err());
        assert!(Grid::<f64>::new(-1.0, 16).is_err());
        assert!(Grid::<f64>::new(f64::NAN, 16).is_err());
    }

    #[test]
    fn quadrature_cases() {
        let g = Grid::<f64>::new(10.0, 100).unwrap();
        assert_relative_eq!(g.quadrature(&vec![1.0; 100]).unwrap(), 10.0, epsilon = 1e-12);
        let alt: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(g.quadrature(&alt).unwrap(), 0.0);
        assert!(matches!(
            g.quadrature(&[1.0; 99]),
            Err(Error::LengthMismatch { expected: 100, actual: 99 })
        ));
    }

    #[test]
    fn quadrature_of_sech_squared() {
        let g = Grid::<f64>::new(256.0, 4096).unwrap();
        let u = 1.4;
        let vals: Vec<f64> = g
            .x()
            .iter()
            .map(|&x| (u * crate::scalar::sech(u * (x + 3.0))).powi(2))
            .collect();
        assert_relative_eq!(g.quadrature(&vals).unwrap(), 2.0 * u, epsilon = 1e-8);
    }

    #[test]
    fn fft_round_trip() {
        let g = Grid::<f64>::new(256.0, 4096).unwrap();
        let mut sp = Spectral::for_grid(&g);
        let field: Vec<Complex<f64>> = g
            .x()
            .iter()
            .map(|&x| Complex::new((0.3 * x).sin() + 0.1 * x, (-x * x / 50.0).exp()))
            .collect();
        let mut buf = field.clone();
        sp.forward(&mut buf);
        sp.inverse(&mut buf);
        let scale = field.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let err = buf
            .iter()
            .zip(&field)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(err / scale < 1e-12, "round trip error {err}");
    }

    #[test]
    fn spectral_second_derivative_of_sine() {
        let l = 256.0;
        let g = Grid::<f64>::new(l, 4096).unwrap();
        let mut sp = Spectral::for_grid(&g);
        let q = 2.0 * PI / l;
        let field: Vec<Complex<f64>> = g.x().iter().map(|&x| Complex::new((q * x).sin(), 0.0)).collect();
        let d2 = sp.second_derivative(&g, &field);
        for (d, &x) in d2.iter().zip(g.x()) {
            assert!((d.re + q * q * (q * x).sin()).abs() < 1e-10);
            assert!(d.im.abs() < 1e-10);
        }
    }

    #[test]
    fn works_in_single_precision() {
        let g = Grid::<f32>::new(10.0, 100).unwrap();
        assert_relative_eq!(g.quadrature(&vec![1.0f32; 100]).unwrap(), 10.0, epsilon = 1e-4);
    }
}
