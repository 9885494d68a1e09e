use serde::{Deserialize, Serialize};

use super::diff::grid_step;
use crate::analytic::{Kink, KinkKind, KinkSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    /// Multiple of the background curvature a point must exceed.
    pub theta: f64,
    pub eps_floor: f64,
    /// Values this close to zero count as the clamped branch.
    pub eps_zero: f64,
    /// Half-width, in grid points, of the neighbourhood that sets the
    /// background curvature.
    pub window: usize,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self { theta: 25.0, eps_floor: 1e-9, eps_zero: 1e-6, window: 10 }
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn detect_kinks(series: &[f64], grid: &[f64]) -> Result<KinkSet> {
    detect_kinks_with(series, grid, &vec![false; series.len()], &DetectorParams::default())
}

/// Flags interior points whose second difference |s₋ − 2s + s₊|/h stands out
/// against the median second difference of the surrounding window (the
/// point and its two neighbours excluded). Adjacent flags merge into one kink
/// placed at the largest second difference; slopes are the one-sided
/// differences just outside the flagged run.
///
/// The median is taken locally because a clamped curve is exactly flat over
/// long stretches, where a global median would be zero.
pub fn detect_kinks_with(
    series: &[f64],
    grid: &[f64],
    mask: &[bool],
    params: &DetectorParams,
) -> Result<KinkSet> {
    let n = series.len();
    if grid.len() != n || mask.len() != n {
        return Err(Error::domain("series, grid and mask lengths differ"));
    }
    if n < 5 {
        return Err(Error::domain("kink detection needs at least five points"));
    }
    let h = grid_step(grid)?;
    let valid: Vec<bool> = (0..n).map(|k| !mask[k] && series[k].is_finite()).collect();

    let d2: Vec<Option<f64>> = (0..n)
        .map(|k| {
            (k > 0 && k + 1 < n && valid[k - 1] && valid[k] && valid[k + 1])
                .then(|| (series[k - 1] - 2.0 * series[k] + series[k + 1]).abs() / h)
        })
        .collect();
    let mut all: Vec<f64> = d2.iter().flatten().copied().collect();
    if all.is_empty() {
        return Ok(KinkSet::default());
    }
    let global = median(&mut all);

    let flagged: Vec<bool> = (0..n)
        .map(|k| {
            let Some(v) = d2[k] else { return false };
            let lo = k.saturating_sub(params.window);
            let hi = (k + params.window).min(n - 1);
            let mut local: Vec<f64> = (lo..=hi)
                .filter(|&j| j + 1 < k || j > k + 1)
                .filter_map(|j| d2[j])
                .collect();
            let background = if local.is_empty() { global } else { median(&mut local) };
            v > params.theta * (background + params.eps_floor)
        })
        .collect();

    let near_zero = |k: usize| valid[k] && series[k].abs() <= params.eps_zero;
    let mut kinks = Vec::new();
    let mut k = 0;
    while k < n {
        if !flagged[k] {
            k += 1;
            continue;
        }
        let a = k;
        while k + 1 < n && flagged[k + 1] {
            k += 1;
        }
        let b = k;
        k += 1;

        let peak = (a..=b)
            .max_by(|&i, &j| d2[i].unwrap().total_cmp(&d2[j].unwrap()).then(j.cmp(&i)))
            .expect("non-empty run");
        // a ≥ 1 and b ≤ n − 2, and the stencils guarantee those neighbours are valid
        let slope_left = (series[a] - series[a - 1]) / h;
        let slope_right = (series[b + 1] - series[b]) / h;
        let clamped = (a - 1..=b + 1).any(near_zero);
        kinks.push(Kink {
            location: grid[peak],
            kind: if clamped { KinkKind::ClampBoundary } else { KinkKind::Interior },
            slope_left,
            slope_right,
        });
    }
    Ok(KinkSet { kinks })
}
