//! Small numeric helpers shared across modules.

/// Least-squares slope of `y` against `x`; `None` with fewer than two points.
pub fn lsq_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Slope of `ln y` vs `ln x` over the positive entries.
pub fn loglog_slope(series: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 1e-300)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    lsq_slope(&pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.5 * k as f64 - 1.0)).collect();
        assert!((lsq_slope(&pts).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.5, 1.0, 2.0, 4.0].iter().map(|&r| (r, 3.0 * r * r * r)).collect();
        assert!((loglog_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
    }
}
