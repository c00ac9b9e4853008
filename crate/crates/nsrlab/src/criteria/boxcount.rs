//! Parabolic box-counting dimension estimate for candidate singular sets.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::lsq_slope;

/// A flagged space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpaceTimePoint {
    pub x: [f64; 3],
    pub t: f64,
}

/// Box counts across a scale ladder under the parabolic metric
/// `max(|dx|, |dt|^(1/2))`: spatial box side `delta`, temporal side
/// `delta^2`.
#[derive(Debug, Clone, Serialize)]
pub struct SingularSetEstimate {
    pub points: usize,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    /// Fitted slope of `log count` against `log(1/delta)`, clamped into the
    /// parabolic range `[0, 5]`.
    pub dimension: f64,
    /// `count * delta` at the finest scale: an indicative one-dimensional
    /// content scalar, not a measure.
    pub hausdorff_proxy: f64,
}

/// Cover the points with parabolic boxes at every scale and fit the count
/// growth. The empty set reports dimension zero by convention.
pub fn singular_set_dimension(
    points: &[SpaceTimePoint],
    scales: &[f64],
) -> Result<SingularSetEstimate> {
    if scales.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two scales to fit a dimension".into(),
        ));
    }
    if scales.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidParameter("scales must be positive".into()));
    }
    let mut scales = scales.to_vec();
    scales.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut counts = Vec::with_capacity(scales.len());
    for &delta in &scales {
        let mut boxes: HashSet<(i64, i64, i64, i64)> = HashSet::new();
        for p in points {
            let key = (
                (p.x[0] / delta).floor() as i64,
                (p.x[1] / delta).floor() as i64,
                (p.x[2] / delta).floor() as i64,
                (p.t / (delta * delta)).floor() as i64,
            );
            boxes.insert(key);
        }
        counts.push(boxes.len());
    }
    let dimension = if points.is_empty() {
        0.0
    } else {
        let pts: Vec<(f64, f64)> = scales
            .iter()
            .zip(&counts)
            .filter(|&(_, &c)| c > 0)
            .map(|(&d, &c)| ((1.0 / d).ln(), (c as f64).ln()))
            .collect();
        lsq_slope(&pts).unwrap_or(0.0).clamp(0.0, 5.0)
    };
    let proxy = *counts.last().unwrap_or(&0) as f64 * scales.last().copied().unwrap_or(0.0);
    Ok(SingularSetEstimate {
        points: points.len(),
        scales,
        counts,
        dimension,
        hausdorff_proxy: proxy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dyadic(n: usize) -> Vec<f64> {
        (1..=n).map(|k| 0.5f64.powi(k as i32)).collect()
    }

    #[test]
    fn empty_set_has_dimension_zero() {
        let est = singular_set_dimension(&[], &dyadic(5)).unwrap();
        assert_eq!(est.dimension, 0.0);
        assert!(est.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn single_point_has_dimension_zero() {
        let pts = [SpaceTimePoint { x: [0.3, 0.4, 0.5], t: 0.1 }];
        let est = singular_set_dimension(&pts, &dyadic(5)).unwrap();
        assert!(est.counts.iter().all(|&c| c == 1));
        assert_eq!(est.dimension, 0.0);
    }

    #[test]
    fn unit_segment_has_dimension_about_one() {
        let pts: Vec<SpaceTimePoint> = (0..2000)
            .map(|k| SpaceTimePoint {
                x: [k as f64 / 2000.0, 0.37, 0.53],
                t: 0.25,
            })
            .collect();
        let est = singular_set_dimension(&pts, &dyadic(5)).unwrap();
        assert!(
            (est.dimension - 1.0).abs() <= 0.15,
            "segment dimension {}",
            est.dimension
        );
    }

    #[test]
    fn counts_grow_as_boxes_shrink() {
        let pts: Vec<SpaceTimePoint> = (0..500)
            .map(|k| SpaceTimePoint {
                x: [(k as f64 * 0.618) % 1.0, (k as f64 * 0.414) % 1.0, 0.0],
                t: (k as f64 * 0.272) % 1.0,
            })
            .collect();
        let est = singular_set_dimension(&pts, &dyadic(6)).unwrap();
        for w in est.counts.windows(2) {
            assert!(w[1] >= w[0], "counts must not drop as boxes shrink: {:?}", est.counts);
        }
    }

    #[test]
    fn needs_two_scales() {
        assert!(singular_set_dimension(&[], &[0.5]).is_err());
    }
}
