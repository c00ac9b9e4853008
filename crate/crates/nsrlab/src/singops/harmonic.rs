//! Mean-value diagnostics for harmonic remainders.

use ndarray::{Array3, ArrayView3};

use crate::error::{Error, Result};
use crate::fieldlab::{ball_quadrature, time_window, Grid};
use crate::util::loglog_slope;

/// Mean-value defect `|f(x0) - avg_{B_r} f| / sup_{B_r} |f|` of a scalar
/// slice; near zero for harmonic inputs.
pub fn harmonic_defect(
    field: ArrayView3<'_, f64>,
    grid: &Grid,
    x0: [f64; 3],
    r: f64,
    subsamples: usize,
) -> Result<f64> {
    let ball = ball_quadrature(grid, x0, r, subsamples)?;
    let mut mean = 0.0;
    let mut sup = 0.0f64;
    for cell in &ball.cells {
        let v = field[[cell.iz, cell.iy, cell.ix]];
        mean += cell.weight * v;
        // the sup runs over samples inside the ball, not over the partially
        // covered boundary cells
        if grid.distance(x0, grid.position(cell.ix, cell.iy, cell.iz)) < r {
            sup = sup.max(v.abs());
        }
    }
    mean /= ball.weight_sum;
    let idx = grid.nearest_sample(x0);
    let center = field[[idx[2], idx[1], idx[0]]];
    if sup > 0.0 {
        Ok((center - mean).abs() / sup)
    } else {
        Ok(0.0)
    }
}

/// Components of a decomposition remainder over a contiguous run of slices,
/// starting at `first_slice`.
pub struct SliceSeries {
    pub first_slice: usize,
    pub components: Vec<Vec<Array3<f64>>>,
}

impl SliceSeries {
    fn get(&self, j: usize) -> Result<&Vec<Array3<f64>>> {
        if j < self.first_slice || j - self.first_slice >= self.components.len() {
            return Err(Error::InvalidParameter(format!(
                "slice {j} not covered by the decomposition series ({}..{})",
                self.first_slice,
                self.first_slice + self.components.len()
            )));
        }
        Ok(&self.components[j - self.first_slice])
    }
}

#[derive(Debug, Clone)]
pub struct GTraceEntry {
    pub r: f64,
    pub value: f64,
}

/// The harmonic-remainder trace `g(r)` down a radius ladder, with its decay
/// diagnosis.
#[derive(Debug, Clone)]
pub struct GTrace {
    pub p: f64,
    pub q: f64,
    pub entries: Vec<GTraceEntry>,
    pub decreasing_toward_zero: bool,
    pub loglog_slope: f64,
}

/// Evaluate `g(r) = r^(3/p - 1) * ( integral over (t - r^2, t) of
/// |ball-average of the remainder|^q )^(1/q)` along the ladder and report
/// whether it decays.
pub fn harmonic_mean_trace(
    series: &SliceSeries,
    grid: &Grid,
    z: ([f64; 3], f64),
    r_ladder: &[f64],
    p: f64,
    q: f64,
    subsamples: usize,
) -> Result<GTrace> {
    if r_ladder.is_empty() {
        return Err(Error::LadderInfeasible("empty radius ladder".into()));
    }
    if !(q >= 1.0) || q == f64::INFINITY {
        return Err(Error::ExponentRegime(format!("g-trace needs finite q >= 1, got {q}")));
    }
    let (x0, t) = z;
    let mut radii: Vec<f64> = r_ladder.to_vec();
    radii.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut entries = Vec::with_capacity(radii.len());
    for &r in &radii {
        let ball = ball_quadrature(grid, x0, r, subsamples)?;
        let window = time_window(grid, t, r)?;
        let mut acc = 0.0;
        for (j, tau) in window.iter() {
            let comps = series.get(j)?;
            let mut mag2 = 0.0;
            for comp in comps {
                let mut mean = 0.0;
                for cell in &ball.cells {
                    mean += cell.weight * comp[[cell.iz, cell.iy, cell.ix]];
                }
                mean /= ball.weight_sum;
                mag2 += mean * mean;
            }
            acc += tau * mag2.sqrt().powf(q);
        }
        let value = r.powf(3.0 / p - 1.0) * acc.powf(1.0 / q);
        entries.push(GTraceEntry { r, value });
    }
    let first = entries.first().map(|e| e.value).unwrap_or(0.0);
    let last = entries.last().map(|e| e.value).unwrap_or(0.0);
    let steps_ok = entries.windows(2).all(|w| w[1].value <= w[0].value * 1.10 + 1e-300);
    let decreasing = steps_ok && (last <= first * (1.0 + 1e-12));
    let slope = loglog_slope(
        &entries.iter().map(|e| (e.r, e.value)).collect::<Vec<_>>(),
    )
    .unwrap_or(0.0);
    Ok(GTrace { p, q, entries, decreasing_toward_zero: decreasing, loglog_slope: slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldlab::make_grid;
    use std::f64::consts::PI;

    #[test]
    fn defect_of_constants_and_linears_vanishes() {
        let g = make_grid(32, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let x0 = [PI, PI, PI];
        let constant = Array3::from_elem((32, 32, 32), 4.2);
        assert!(harmonic_defect(constant.view(), &g, x0, 1.0, 3).unwrap() < 1e-12);
        let mut linear = Array3::zeros((32, 32, 32));
        for ((iz, iy, ix), v) in linear.indexed_iter_mut() {
            let _ = (iz, iy);
            *v = ix as f64 * g.h() - PI;
        }
        assert!(harmonic_defect(linear.view(), &g, x0, 1.0, 4).unwrap() < 2e-3);
    }

    #[test]
    fn defect_of_squared_distance_is_three_fifths() {
        // mean of |x - x0|^2 over B_r is (3/5) r^2 while the center value is
        // 0 and the sup is r^2, so the defect is 0.6
        let g = make_grid(64, 2, 2.0 * PI, 0.1, 0.0).unwrap();
        let x0 = [PI, PI, PI];
        let mut f = Array3::zeros((64, 64, 64));
        for ((iz, iy, ix), v) in f.indexed_iter_mut() {
            let d = g.distance(x0, g.position(ix, iy, iz));
            *v = d * d;
        }
        let defect = harmonic_defect(f.view(), &g, x0, 1.0, 4).unwrap();
        assert!((defect - 0.6).abs() < 0.02, "defect {defect}");
    }

    #[test]
    fn zero_series_traces_to_zero() {
        let g = make_grid(16, 12, 2.0 * PI, 0.3, -3.3).unwrap();
        let zero = vec![Array3::zeros((16, 16, 16)); 3];
        let series = SliceSeries {
            first_slice: 0,
            components: (0..12).map(|_| zero.clone()).collect(),
        };
        let trace = harmonic_mean_trace(
            &series,
            &g,
            ([PI, PI, PI], 0.0),
            &[1.8, 1.6],
            3.0,
            1.0,
            2,
        )
        .unwrap();
        assert!(trace.entries.iter().all(|e| e.value == 0.0));
        assert!(trace.decreasing_toward_zero);
    }

    #[test]
    fn constant_remainder_scales_like_window_power() {
        // constant |H| = c with p = 3: g(r) = c * r^(2/q), slope 2/q
        let g = make_grid(16, 40, 2.0 * PI, 0.1, -3.9).unwrap();
        let c = 1.7;
        let ones = vec![Array3::from_elem((16, 16, 16), c)];
        let series = SliceSeries {
            first_slice: 0,
            components: (0..40).map(|_| ones.clone()).collect(),
        };
        for q in [1.0, 2.0] {
            let trace = harmonic_mean_trace(
                &series,
                &g,
                ([PI, PI, PI], 0.0),
                &[1.9, 1.75, 1.6],
                3.0,
                q,
                2,
            )
            .unwrap();
            let want = 2.0 / q;
            assert!(
                (trace.loglog_slope - want).abs() < 0.3,
                "slope {} want {want}",
                trace.loglog_slope
            );
            for e in &trace.entries {
                let exact = c * (e.r * e.r).powf(1.0 / q);
                assert!((e.value - exact).abs() / exact < 0.05);
            }
        }
    }
}
