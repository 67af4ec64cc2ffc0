use crate::error::{invalid, Error, Result};

use super::basis::{BasisPoint, BasisSource, ClassicalBasis};
use super::system::LsodeSystem;

/// Step-control settings for [`integrate_classical_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    pub wronskian_tol: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self { atol: 1e-10, rtol: 1e-10, wronskian_tol: 1e-8, h_max: 0.02, h_min: 1e-12, max_steps: 2_000_000 }
    }
}

type State = [f64; 6];

#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    y: State,
    dy: State,
}

/// Basis sampled by the adaptive integrator with quintic Hermite dense output.
#[derive(Debug, Clone)]
pub struct NumericBasis {
    system: LsodeSystem,
    t_grid: Vec<f64>,
    nodes: Vec<Node>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rhs(sys: &LsodeSystem, t: f64, y: &State) -> State {
    let fd = sys.fdot(t);
    let w2 = sys.omega_sq(t);
    [
        y[1],
        -fd * y[1] - w2 * y[0],
        y[3],
        -fd * y[3] - w2 * y[2],
        y[5],
        sys.lambda(t) - fd * y[5] - w2 * y[4],
    ]
}

/// One Dormand–Prince step; returns the new state, its derivative and the
/// scaled error norm.
fn dopri_step(sys: &LsodeSystem, t: f64, y: &State, k1: &State, h: f64, opts: &IntegratorOptions) -> (State, State, f64) {
    let mut k = [[0.0; 6]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..6 {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = rhs(sys, t + C[s] * h, &ys);
        if s == 6 {
            let mut err = 0.0;
            for i in 0..6 {
                let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
                let sc = opts.atol + opts.rtol * y[i].abs().max(ys[i].abs());
                err += (e / sc).powi(2);
            }
            return (ys, k[6], (err / 6.0).sqrt());
        }
    }
    unreachable!()
}

pub fn integrate_classical(sys: &LsodeSystem, t_grid: &[f64]) -> Result<NumericBasis> {
    integrate_classical_with(sys, t_grid, &IntegratorOptions::default())
}

/// Integrates the canonical basis across `t_grid`, landing exactly on every
/// sample, then checks the Wronskian law at each accepted node.
pub fn integrate_classical_with(sys: &LsodeSystem, t_grid: &[f64], opts: &IntegratorOptions) -> Result<NumericBasis> {
    if t_grid.is_empty() || t_grid[0] != 0.0 {
        return Err(invalid("t_grid must start at 0"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t_grid must be strictly increasing"));
    }
    let t_end = *t_grid.last().expect("non-empty");
    sys.check_time(0.0)?;
    sys.check_time(t_end)?;

    let mut y: State = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
    let mut t = 0.0;
    let mut k1 = rhs(sys, t, &y);
    let mut nodes = vec![Node { t, y, dy: k1 }];
    let mut h = opts.h_max.min(1e-3 * sys.timescale().max(1e-3));
    let mut steps = 0usize;

    for &target in &t_grid[1..] {
        while t < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepFailure { t, h });
            }
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_try = if last { remaining } else { h };
            let (y_new, k_new, err) = dopri_step(sys, t, &y, &k1, h_try, opts);
            let finite = y_new.iter().all(|v| v.is_finite());
            if finite && err <= 1.0 {
                t = if last { target } else { t + h_try };
                y = y_new;
                k1 = k_new;
                nodes.push(Node { t, y, dy: k1 });
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || fac < 1.0 {
                    h = (h_try * fac).min(opts.h_max);
                }
            } else {
                let fac = if finite { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
                h = h_try * fac;
                if h < opts.h_min {
                    return Err(Error::StepFailure { t, h });
                }
            }
        }
    }

    for n in &nodes {
        let w = n.y[1] * n.y[2] - n.y[0] * n.y[3];
        let error = (w - sys.wronskian(n.t)).abs();
        if !(error <= opts.wronskian_tol) {
            return Err(Error::WronskianViolation { t: n.t, error });
        }
    }
    Ok(NumericBasis { system: sys.clone(), t_grid: t_grid.to_vec(), nodes })
}

/// Quintic Hermite weights for value, first and second derivative at the two
/// ends of `[0, 1]`, plus their `s`-derivatives.
fn quintic(s: f64) -> ([f64; 6], [f64; 6]) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let w = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        0.5 * (s3 - 2.0 * s4 + s5),
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
    ];
    let d = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
    ];
    (w, d)
}

impl NumericBasis {
    pub fn node_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.t)
    }

    /// Largest `|W − e^{−f}|` over accepted integrator nodes.
    pub fn max_wronskian_error(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| (n.y[1] * n.y[2] - n.y[0] * n.y[3] - self.system.wronskian(n.t)).abs())
            .fold(0.0, f64::max)
    }
}

impl ClassicalBasis for NumericBasis {
    fn eval(&self, t: f64) -> Result<BasisPoint> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let i = self.nodes.partition_point(|n| n.t <= t).clamp(1, self.nodes.len() - 1) - 1;
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        if t == a.t {
            let y = a.y;
            return Ok(BasisPoint { t, u1: y[0], u1_dot: y[1], u2: y[2], u2_dot: y[3], up: y[4], up_dot: y[5] });
        }
        let h = b.t - a.t;
        let (w, d) = quintic((t - a.t) / h);
        let mut out = [0.0; 6];
        for c in 0..3 {
            let (iu, iv) = (2 * c, 2 * c + 1);
            let vals = [a.y[iu], h * a.y[iv], h * h * a.dy[iv], h * h * b.dy[iv], h * b.y[iv], b.y[iu]];
            out[iu] = vals.iter().zip(&w).map(|(v, w)| v * w).sum();
            out[iv] = vals.iter().zip(&d).map(|(v, d)| v * d).sum::<f64>() / h;
        }
        Ok(BasisPoint { t, u1: out[0], u1_dot: out[1], u2: out[2], u2_dot: out[3], up: out[4], up_dot: out[5] })
    }
    fn system(&self) -> &LsodeSystem {
        &self.system
    }
    fn source(&self) -> BasisSource {
        BasisSource::Numeric
    }
    fn span(&self) -> (f64, f64) {
        (0.0, self.nodes.last().map_or(0.0, |n| n.t))
    }
    fn t_grid(&self) -> &[f64] {
        &self.t_grid
    }
}
