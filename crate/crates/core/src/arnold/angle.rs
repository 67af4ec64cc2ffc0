//! Continuously unwrapped polar angle of a planar curve `(x(t), y(t))`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::monotone_root;

/// Returns `(x, y, dθ/dt)` for the tracked curve.
pub(crate) type PolarFn = Arc<dyn Fn(f64) -> Result<(f64, f64, f64)> + Send + Sync>;

#[derive(Clone, Copy, Debug)]
struct Node {
    t: f64,
    raw: f64,
    theta: f64,
}

/// Table of unwrapped angles. Neighbouring nodes differ by less than one
/// radian, so the angle anywhere between them is the left node's value plus
/// the wrapped difference of raw `atan2` values; no interpolation is involved.
#[derive(Clone)]
pub(crate) struct AngleTrack {
    curve: PolarFn,
    nodes: Vec<Node>,
}

impl fmt::Debug for AngleTrack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AngleTrack")
            .field("span", &self.span())
            .field("nodes", &self.nodes.len())
            .finish_non_exhaustive()
    }
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

fn raw_angle(curve: &PolarFn, t: f64) -> Result<(f64, f64)> {
    let (x, y, rate) = curve(t)?;
    Ok((y.atan2(x), rate))
}

/// Stops a march once the angle leaves `[theta_lo, theta_hi]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Coverage {
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl Coverage {
    pub const NONE: Coverage = Coverage { theta_lo: f64::NEG_INFINITY, theta_hi: f64::INFINITY };
}

impl AngleTrack {
    /// Marches from `t = 0` out to `lo` and `hi`. With a coverage target the
    /// march on each side also ends early once the angle passes it.
    pub fn build(curve: PolarFn, lo: f64, hi: f64, h_max: f64, cover: Coverage) -> Result<Self> {
        let (raw0, _) = raw_angle(&curve, 0.0)?;
        let mut forward = vec![Node { t: 0.0, raw: raw0, theta: raw0 }];
        march(&curve, &mut forward, hi, h_max, |th| th > cover.theta_hi)?;
        let mut backward = vec![Node { t: 0.0, raw: raw0, theta: raw0 }];
        march(&curve, &mut backward, lo, h_max, |th| th < cover.theta_lo)?;
        backward.reverse();
        backward.pop();
        backward.extend(forward);
        let shift = raw0;
        for n in &mut backward {
            n.theta -= shift;
        }
        Ok(Self { curve, nodes: backward })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0].t, self.nodes[self.nodes.len() - 1].t)
    }

    pub fn theta_range(&self) -> (f64, f64) {
        (self.nodes[0].theta, self.nodes[self.nodes.len() - 1].theta)
    }

    /// Unwrapped angle relative to its value at `t = 0`.
    pub fn theta(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let i = self.nodes.partition_point(|n| n.t <= t).clamp(1, self.nodes.len()) - 1;
        let node = &self.nodes[i];
        if t == node.t {
            return Ok(node.theta);
        }
        let (raw, _) = raw_angle(&self.curve, t)?;
        Ok(node.theta + wrap(raw - node.raw))
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        Ok((self.curve)(t)?.2)
    }

    /// Time at which the unwrapped angle equals `theta`.
    pub fn invert(&self, theta: f64) -> Result<f64> {
        let (a, b) = self.theta_range();
        if !(theta >= a && theta <= b) {
            return Err(Error::OutOfImage { value: theta });
        }
        let j = self.nodes.partition_point(|n| n.theta < theta);
        if j < self.nodes.len() && self.nodes[j].theta == theta {
            return Ok(self.nodes[j].t);
        }
        let (l, r) = (&self.nodes[j - 1], &self.nodes[j]);
        monotone_root(|t| Ok(self.theta(t)? - theta), |t| self.rate(t), l.t, r.t, 1e-15)
    }
}

fn march(curve: &PolarFn, nodes: &mut Vec<Node>, end: f64, h_max: f64, done: impl Fn(f64) -> bool) -> Result<()> {
    let dir = if end >= 0.0 { 1.0 } else { -1.0 };
    let mut cur = nodes[0];
    let mut h = h_max;
    let mut steps = 0usize;
    while dir * (end - cur.t) > 0.0 {
        steps += 1;
        if steps > 5_000_000 {
            return Err(Error::NonConvergence { terms: steps });
        }
        let (_, rate) = raw_angle(curve, cur.t)?;
        // let the step grow where the angle barely moves (e.g. free-particle tails)
        let room = h_max.max(0.25 * cur.t.abs());
        h = h.min(room).min(if rate > 0.0 { 0.5 / rate } else { room }).max(1e-12);
        let next_t = if dir * (end - cur.t) <= h { end } else { cur.t + dir * h };
        let (raw, _) = raw_angle(curve, next_t)?;
        let d = wrap(raw - cur.raw);
        if d.abs() > 1.0 {
            h *= 0.25;
            continue;
        }
        cur = Node { t: next_t, raw, theta: cur.theta + d };
        nodes.push(cur);
        h = (2.0 * h).min(room.max(h_max));
        if done(cur.theta - nodes[0].raw) {
            break;
        }
    }
    Ok(())
}
