//! Pullback of grid samples to arbitrary positions.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::grid::Grid;

pub trait Interpolator: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    /// Values at `targets`; positions outside the grid give zero.
    fn resample(&self, grid: &Grid, values: &[Complex64], targets: &[f64]) -> Vec<Complex64>;
}

pub type InterpolatorRef = Arc<dyn Interpolator>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Whittaker–Shannon reconstruction. Targets within `1e-12` grid spacings of a
/// node return that node's sample exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sinc;

impl Interpolator for Sinc {
    fn name(&self) -> &'static str {
        "sinc"
    }

    fn resample(&self, grid: &Grid, values: &[Complex64], targets: &[f64]) -> Vec<Complex64> {
        let (x0, dx, n) = (grid.x_min(), grid.dx(), grid.len());
        let alt: Vec<Complex64> = values.iter().enumerate().map(|(j, v)| if j % 2 == 0 { *v } else { -*v }).collect();
        targets
            .iter()
            .map(|&x| {
                let u = (x - x0) / dx;
                if !(u >= -0.5 && u <= n as f64 - 0.5) {
                    return ZERO;
                }
                let k = u.round();
                let f = u - k;
                let ki = k as i64;
                if f.abs() <= 1e-12 {
                    return values[ki.clamp(0, n as i64 - 1) as usize];
                }
                // sin(π(u − j)) = (−1)^(k+j) sin(πf)
                let sum: Complex64 = alt.iter().enumerate().map(|(j, v)| v / ((ki - j as i64) as f64 + f)).sum();
                let sign = if ki % 2 == 0 { 1.0 } else { -1.0 };
                sum * (sign * (PI * f).sin() / PI)
            })
            .collect()
    }
}

/// Four-point Lagrange interpolation with zero padding past the edges.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicLagrange;

impl Interpolator for CubicLagrange {
    fn name(&self) -> &'static str {
        "cubic"
    }

    fn resample(&self, grid: &Grid, values: &[Complex64], targets: &[f64]) -> Vec<Complex64> {
        let (x0, dx, n) = (grid.x_min(), grid.dx(), grid.len() as i64);
        let at = |j: i64| if j < 0 || j >= n { ZERO } else { values[j as usize] };
        targets
            .iter()
            .map(|&x| {
                let u = (x - x0) / dx;
                if !(u >= 0.0 && u <= (n - 1) as f64) {
                    return ZERO;
                }
                let i = (u.floor() as i64).min(n - 2);
                let s = u - i as f64;
                let w = [
                    -s * (s - 1.0) * (s - 2.0) / 6.0,
                    (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
                    -(s + 1.0) * s * (s - 2.0) / 2.0,
                    (s + 1.0) * s * (s - 1.0) / 6.0,
                ];
                (0..4).map(|k| at(i - 1 + k as i64) * w[k]).sum()
            })
            .collect()
    }
}

pub struct InterpolatorRegistry {
    entries: BTreeMap<&'static str, InterpolatorRef>,
}

impl Default for InterpolatorRegistry {
    fn default() -> Self {
        let mut r = Self { entries: BTreeMap::new() };
        r.register(Arc::new(Sinc));
        r.register(Arc::new(CubicLagrange));
        r
    }
}

impl InterpolatorRegistry {
    pub fn register(&mut self, interp: InterpolatorRef) {
        self.entries.insert(interp.name(), interp);
    }

    pub fn get(&self, name: &str) -> Result<InterpolatorRef> {
        self.entries
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownName { kind: "interpolator", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_samples(g: &Grid) -> Vec<Complex64> {
        g.points().iter().map(|&x| Complex64::new((-x * x / 2.0).exp(), 0.3 * x * (-x * x / 2.0).exp())).collect()
    }

    #[test]
    fn sinc_is_spectrally_accurate_and_exact_on_nodes() {
        let g = Grid::symmetric(12.0, 256).unwrap();
        let v = gaussian_samples(&g);
        let targets: Vec<f64> = (0..97).map(|i| -7.3 + 0.151 * i as f64).collect();
        let got = Sinc.resample(&g, &v, &targets);
        for (x, z) in targets.iter().zip(&got) {
            let e = (-x * x / 2.0).exp();
            assert!((z - Complex64::new(e, 0.3 * x * e)).norm() < 1e-12, "x={x}");
        }
        let nodes = Sinc.resample(&g, &v, &g.points());
        assert_eq!(nodes, v);
        assert_eq!(Sinc.resample(&g, &v, &[20.0])[0], ZERO);
    }

    #[test]
    fn cubic_is_fourth_order() {
        let err = |n: usize| {
            let g = Grid::symmetric(8.0, n).unwrap();
            let v = gaussian_samples(&g);
            let xs: Vec<f64> = (0..200).map(|i| -3.0 + 0.0301 * i as f64).collect();
            let got = CubicLagrange.resample(&g, &v, &xs);
            xs.iter()
                .zip(&got)
                .map(|(&x, z)| {
                    let e = (-x * x / 2.0).exp();
                    (z - Complex64::new(e, 0.3 * x * e)).norm()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(129) / err(257);
        assert!(ratio > 12.0 && ratio < 20.0, "ratio {ratio}");
    }

    #[test]
    fn registry_lookup() {
        let r = InterpolatorRegistry::default();
        assert_eq!(r.names(), vec!["cubic", "sinc"]);
        assert!(r.get("spline").is_err());
    }
}
