use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub m: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, m: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && m > 0.0 && m.is_finite()) {
            return Err(invalid(format!("hbar and m must be positive, got ({hbar}, {m})")));
        }
        Ok(Self { hbar, m })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { hbar: 1.0, m: 1.0 }
    }
}

/// Uniform grid including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n: usize,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min < x_max) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(invalid(format!("grid needs finite x_min < x_max, got [{x_min}, {x_max}]")));
        }
        if n < Self::MIN_POINTS {
            return Err(invalid(format!("grid needs at least {} points, got {n}", Self::MIN_POINTS)));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn symmetric(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }
    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }
    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
    /// Same node count with every coordinate divided by `s > 0`.
    pub fn rescaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(invalid(format!("grid rescale factor must be positive, got {s}")));
        }
        let (a, b) = (self.x_min / s, self.x_max / s);
        if !(a.is_finite() && b.is_finite()) || b - a > 1e12 {
            return Err(Error::GridOverflow { leakage: f64::INFINITY });
        }
        Self::new(a, b, self.n)
    }
    pub fn same_as(&self, other: &Grid) -> bool {
        let tol = 1e-12 * (self.x_max - self.x_min);
        self.n == other.n && (self.x_min - other.x_min).abs() <= tol && (self.x_max - other.x_max).abs() <= tol
    }
    /// Trapezoid weights.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }
}

/// Complex samples on a grid at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid,
    pub samples: Vec<Complex64>,
    pub t: f64,
    pub consts: PhysicalConstants,
}

impl WaveFunction {
    pub fn new(grid: Grid, samples: Vec<Complex64>, t: f64, consts: PhysicalConstants) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("wavefunction samples must be finite"));
        }
        Ok(Self { grid, samples, t, consts })
    }

    pub fn zeros(grid: Grid, t: f64, consts: PhysicalConstants) -> Self {
        Self { grid, samples: vec![Complex64::new(0.0, 0.0); grid.len()], t, consts }
    }

    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().enumerate().map(|(i, z)| self.grid.weight(i) * z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Copy scaled to unit norm; the zero state is returned unchanged.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let mut out = self.clone();
        if n > 0.0 {
            for z in &mut out.samples {
                *z /= n;
            }
        }
        out
    }

    /// `⟨self|other⟩` by the trapezoid rule.
    pub fn inner(&self, other: &WaveFunction) -> Result<Complex64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * self.grid.weight(i))
            .sum())
    }

    pub fn boundary_amplitude(&self) -> f64 {
        let n = self.samples.len();
        self.samples[0].norm().max(self.samples[n - 1].norm())
    }

    pub fn is_confined(&self, boundary_tol: f64) -> bool {
        self.boundary_amplitude() < boundary_tol
    }

    /// Largest sample-wise deviation from `other` on the same grid.
    pub fn max_abs_diff(&self, other: &WaveFunction) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}
