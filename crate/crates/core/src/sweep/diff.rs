use crate::error::{Error, Result};

/// Evenly spaced grid from `min` to `max` inclusive.
pub fn uniform_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(min < max) || !min.is_finite() || !max.is_finite() {
        return Err(Error::domain(format!("bad grid: min {min}, max {max}, steps {steps}")));
    }
    let span = max - min;
    let last = (steps - 1) as f64;
    let mut g: Vec<f64> = (0..steps).map(|k| min + span * k as f64 / last).collect();
    g[steps - 1] = max;
    Ok(g)
}

/// Spacing of a uniform ascending grid; rejects anything else.
pub fn grid_step(grid: &[f64]) -> Result<f64> {
    if grid.len() < 2 {
        return Err(Error::domain("grid needs at least two points"));
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::domain("grid must be strictly ascending"));
    }
    if grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-6 * h) {
        return Err(Error::domain("grid is not uniform"));
    }
    Ok(h)
}

/// Derivative of order 1 or 2: central differences in the interior, one-sided
/// O(h) differences at the endpoints.
pub fn finite_diff(series: &[f64], grid: &[f64], order: usize) -> Result<Vec<f64>> {
    finite_diff_masked(series, grid, order, &vec![false; series.len()])
}

/// As [`finite_diff`], but no stencil may touch a masked or non-finite point.
/// Points without a clean stencil (central, else forward, else backward) get
/// NaN.
pub fn finite_diff_masked(series: &[f64], grid: &[f64], order: usize, mask: &[bool]) -> Result<Vec<f64>> {
    if !(1..=2).contains(&order) {
        return Err(Error::domain(format!("derivative order {order} not supported")));
    }
    if series.len() != grid.len() || mask.len() != grid.len() {
        return Err(Error::domain("series, grid and mask lengths differ"));
    }
    let n = series.len();
    let needed = if order == 1 { 2 } else { 3 };
    if n < needed {
        return Err(Error::domain(format!("order-{order} derivative needs {needed} points")));
    }
    let h = grid_step(grid)?;
    let ok = |k: isize| k >= 0 && (k as usize) < n && !mask[k as usize] && series[k as usize].is_finite();
    let s = |k: isize| series[k as usize];

    let out = (0..n as isize)
        .map(|k| match order {
            1 => {
                if ok(k - 1) && ok(k + 1) && ok(k) {
                    (s(k + 1) - s(k - 1)) / (2.0 * h)
                } else if ok(k) && ok(k + 1) {
                    (s(k + 1) - s(k)) / h
                } else if ok(k) && ok(k - 1) {
                    (s(k) - s(k - 1)) / h
                } else {
                    f64::NAN
                }
            }
            _ => {
                let h2 = h * h;
                if ok(k - 1) && ok(k) && ok(k + 1) {
                    (s(k - 1) - 2.0 * s(k) + s(k + 1)) / h2
                } else if ok(k) && ok(k + 1) && ok(k + 2) {
                    (s(k) - 2.0 * s(k + 1) + s(k + 2)) / h2
                } else if ok(k) && ok(k - 1) && ok(k - 2) {
                    (s(k - 2) - 2.0 * s(k - 1) + s(k)) / h2
                } else {
                    f64::NAN
                }
            }
        })
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::xx3_concurrence;

    #[test]
    fn identity_and_square() {
        let g = uniform_grid(-1.0, 2.0, 31).unwrap();
        let d = finite_diff(&g, &g, 1).unwrap();
        assert!(d.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let sq: Vec<f64> = g.iter().map(|x| x * x).collect();
        let d2 = finite_diff(&sq, &g, 2).unwrap();
        assert!(d2[1..30].iter().all(|v| (v - 2.0).abs() < 1e-9));
        // one-sided endpoints are exact for a quadratic's second derivative too
        assert!((d2[0] - 2.0).abs() < 1e-9);
        let d1 = finite_diff(&sq, &g, 1).unwrap();
        assert!((d1[15] - 2.0 * g[15]).abs() < 1e-12);
        assert!((d1[0] - 2.0 * g[0] - 0.1).abs() < 1e-9);
    }

    #[test]
    fn plateau_derivative_vanishes() {
        let g = uniform_grid(0.0, 0.9, 181).unwrap();
        let c: Vec<f64> = g.iter().map(|&l| xx3_concurrence(l).unwrap()).collect();
        assert!(finite_diff(&c, &g, 1).unwrap().iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn rejects_bad_input() {
        let g = [0.0, 0.1, 0.3];
        assert!(matches!(finite_diff(&[1.0, 2.0, 3.0], &g, 1), Err(Error::Domain(_))));
        let g = [0.0, 0.1];
        assert!(finite_diff(&[1.0, 2.0], &g, 2).is_err());
        assert!(finite_diff(&[1.0, 2.0], &g, 3).is_err());
        assert!(finite_diff(&[1.0], &g, 1).is_err());
    }

    #[test]
    fn mask_keeps_stencils_clean() {
        let g = uniform_grid(0.0, 1.0, 11).unwrap();
        let mut s: Vec<f64> = g.iter().map(|x| 3.0 * x).collect();
        let mut mask = vec![false; 11];
        mask[5] = true;
        s[5] = 1e6;
        s[8] = f64::NAN;
        let d = finite_diff_masked(&s, &g, 1, &mask).unwrap();
        assert!(d[5].is_nan() && d[8].is_nan());
        for k in [0, 1, 2, 3, 4, 6, 10] {
            assert!((d[k] - 3.0).abs() < 1e-12, "k={k}");
        }
        // 7 is squeezed between 6 (ok) and 8 (NaN): backward difference
        assert!((d[7] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = uniform_grid(0.0, 3.0, 601).unwrap();
        assert_eq!(g[200], 1.0);
        assert_eq!(g[600], 3.0);
        assert!((grid_step(&g).unwrap() - 0.005).abs() < 1e-15);
        assert!(uniform_grid(1.0, 1.0, 5).is_err());
    }
}
