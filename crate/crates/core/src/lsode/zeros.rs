use crate::error::{invalid, Error, Result};

/// A sample of a function and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroSample {
    pub t: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroScan {
    pub count: usize,
    pub roots: Vec<f64>,
}

fn cubic_hermite(a: &ZeroSample, b: &ZeroSample, s: f64) -> f64 {
    let h = b.t - a.t;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * a.u
        + (s3 - 2.0 * s2 + s) * h * a.du
        + (-2.0 * s3 + 3.0 * s2) * b.u
        + (s3 - s2) * h * b.du
}

/// Counts sign changes across ordered samples.
///
/// An interval whose endpoints share a sign but whose derivatives point
/// towards zero and back hides a possible pair of roots; if the cubic Hermite
/// interpolant crosses zero there the scan is too coarse and
/// [`Error::ResolutionWarning`] is returned.
pub fn count_zeros(samples: &[ZeroSample]) -> Result<ZeroScan> {
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(invalid("zero-count samples must be strictly increasing in t"));
    }
    let mut roots = Vec::new();
    let mut last_sign = 0.0;
    for (i, s) in samples.iter().enumerate() {
        if !s.u.is_finite() {
            return Err(invalid(format!("non-finite sample at t = {}", s.t)));
        }
        let sign = if s.u > 0.0 { 1.0 } else if s.u < 0.0 { -1.0 } else { 0.0 };
        if i > 0 {
            let prev = &samples[i - 1];
            if sign != 0.0 && sign == last_sign && prev.u != 0.0 {
                let heading_in = sign * prev.du < 0.0 && sign * s.du > 0.0;
                if heading_in && (1..16).any(|k| sign * cubic_hermite(prev, s, k as f64 / 16.0) <= 0.0) {
                    return Err(Error::ResolutionWarning { t: 0.5 * (prev.t + s.t) });
                }
            }
            if sign != 0.0 && last_sign != 0.0 && sign != last_sign {
                let root = if prev.u == 0.0 { prev.t } else { prev.t + (s.t - prev.t) * prev.u / (prev.u - s.u) };
                roots.push(root);
            }
        }
        if sign != 0.0 {
            last_sign = sign;
        }
    }
    Ok(ZeroScan { count: roots.len(), roots })
}

/// Samples `f` (value and derivative) on `[ta, tb]` with roughly `step`
/// spacing, counts zeros and refines each root by bisection.
pub fn scan_zeros<F>(f: F, ta: f64, tb: f64, step: f64) -> Result<ZeroScan>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if !(tb > ta) || !(step > 0.0) {
        return Err(invalid("scan needs ta < tb and a positive step"));
    }
    let n = ((tb - ta) / step).ceil().max(1.0) as usize;
    let samples = (0..=n)
        .map(|i| {
            let t = if i == n { tb } else { ta + (tb - ta) * i as f64 / n as f64 };
            f(t).map(|(u, du)| ZeroSample { t, u, du })
        })
        .collect::<Result<Vec<_>>>()?;
    let coarse = count_zeros(&samples)?;
    let mut roots = Vec::with_capacity(coarse.count);
    for r in coarse.roots {
        let i = samples.partition_point(|s| s.t < r).clamp(1, samples.len() - 1);
        let (mut lo, mut hi) = (samples[i - 1].t, samples[i].t);
        let mut flo = f(lo)?.0;
        if flo == 0.0 {
            roots.push(lo);
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let fm = f(mid)?.0;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    Ok(ZeroScan { count: roots.len(), roots })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> (f64, f64), a: f64, b: f64, n: usize) -> Vec<ZeroSample> {
        (0..=n)
            .map(|i| {
                let t = a + (b - a) * i as f64 / n as f64;
                let (u, du) = f(t);
                ZeroSample { t, u, du }
            })
            .collect()
    }

    #[test]
    fn constant_has_no_zeros() {
        let s = sampled(|_| (1.0, 0.0), -5.0, 5.0, 50);
        assert_eq!(count_zeros(&s).unwrap().count, 0);
    }

    #[test]
    fn sine_zeros_and_refinement() {
        let scan = scan_zeros(|t: f64| Ok((t.sin(), t.cos())), 0.5, 10.0, 0.1).unwrap();
        assert_eq!(scan.count, 3);
        for (k, r) in scan.roots.iter().enumerate() {
            assert!((r - std::f64::consts::PI * (k + 1) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_scan_hides_root_pair() {
        // x² − 0.01 has roots at ±0.1, which a step of 0.5 straddles.
        let s = sampled(|t| (t * t - 0.01, 2.0 * t), -1.0, 1.0, 5);
        assert!(matches!(count_zeros(&s), Err(Error::ResolutionWarning { .. })));
        let fine = sampled(|t| (t * t - 0.01, 2.0 * t), -1.0, 1.0, 400);
        assert_eq!(count_zeros(&fine).unwrap().count, 2);
    }

    #[test]
    fn grazing_extremum_is_not_a_root() {
        let s = sampled(|t| (t * t + 0.5, 2.0 * t), -1.0, 1.0, 4);
        assert_eq!(count_zeros(&s).unwrap().count, 0);
    }
}
