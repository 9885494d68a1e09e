//! Thermodynamic-limit closed forms.
//!
//! For the XX chain with three-spin interaction the nearest-neighbour
//! correlators are ⟨σˣσˣ⟩ = ⟨σʸσʸ⟩ = G and ⟨σᶻσᶻ⟩ = −G², with
//! G = 2/π below λ = 1 and 2/(πλ) above, so that C = max{0, (G+1)² − 2}/2.
//!
//! For the XXZ chain the pair state follows from the ground energy per site
//! 𝓔(Δ) and its derivatives; the functions here take those as inputs.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::finite_diff;

/// λ where G switches branch.
pub const XX3_CRITICAL_LAMBDA: f64 = 1.0;

/// λ₀ = 2/((√2 − 1)π), where (G + 1)² = 2 and the clamp at zero engages.
pub fn xx3_lambda_zero() -> f64 {
    2.0 / ((SQRT_2 - 1.0) * PI)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::domain(format!("lambda must be finite and ≥ 0, got {lambda}")));
    }
    Ok(())
}

/// Nearest-neighbour transverse correlator G(λ).
pub fn g_correlator(lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(if lambda < 1.0 { 2.0 / PI } else { 2.0 / (PI * lambda) })
}

/// dG/dλ, one-sided at λ = 1 (`right` selects the λ ≥ 1 branch there).
fn g_slope(lambda: f64, right: bool) -> f64 {
    if lambda < 1.0 || (lambda == 1.0 && !right) {
        0.0
    } else {
        -2.0 / (PI * lambda * lambda)
    }
}

/// Pre-clamp concurrence ((G + 1)² − 2)/2.
pub fn xx3_c_tilde(lambda: f64) -> Result<f64> {
    let g = g_correlator(lambda)?;
    Ok(0.5 * ((g + 1.0).powi(2) - 2.0))
}

pub fn xx3_concurrence(lambda: f64) -> Result<f64> {
    Ok(xx3_c_tilde(lambda)?.max(0.0))
}

/// One-sided derivative dC/dλ from the left (`right = false`) or right.
pub fn xx3_concurrence_slope(lambda: f64, right: bool) -> Result<f64> {
    check_lambda(lambda)?;
    let g = g_correlator(lambda)?;
    let ct = 0.5 * ((g + 1.0).powi(2) - 2.0);
    let slope = (g + 1.0) * g_slope(lambda, right);
    // At λ₀ the clamp is active on the right only; C̃ is decreasing there.
    let clamped = if ct.abs() < 1e-12 { right } else { ct < 0.0 };
    Ok(if clamped { 0.0 } else { slope })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KinkKind {
    /// The curve is flat at zero on one side: the max{0, ·} clamp.
    ClampBoundary,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kink {
    pub location: f64,
    pub kind: KinkKind,
    pub slope_left: f64,
    pub slope_right: f64,
}

impl Kink {
    pub fn slope_jump(&self) -> f64 {
        self.slope_right - self.slope_left
    }
}

/// Points where a curve is continuous but its slope jumps, ascending.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KinkSet {
    pub kinks: Vec<Kink>,
}

impl KinkSet {
    pub fn locations(&self) -> Vec<f64> {
        self.kinks.iter().map(|k| k.location).collect()
    }

    pub fn len(&self) -> usize {
        self.kinks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinks.is_empty()
    }
}

/// The two slope discontinuities of C(λ): the branch switch of G at λ = 1
/// and the clamp boundary at λ₀.
pub fn xx3_kinks() -> KinkSet {
    let l0 = xx3_lambda_zero();
    let make = |location: f64, kind| Kink {
        location,
        kind,
        slope_left: xx3_concurrence_slope(location, false).expect("valid λ"),
        slope_right: xx3_concurrence_slope(location, true).expect("valid λ"),
    };
    KinkSet {
        kinks: vec![
            make(XX3_CRITICAL_LAMBDA, KinkKind::Interior),
            make(l0, KinkKind::ClampBoundary),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase")]
pub enum Provenance {
    Ed { n_sites: usize },
    External,
}

/// Ground energy per site sampled on an ascending Δ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    grid: Vec<f64>,
    energy: Vec<f64>,
    provenance: Provenance,
}

impl EnergyCurve {
    pub fn new(grid: Vec<f64>, energy: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if grid.len() != energy.len() {
            return Err(Error::domain("grid and energy lengths differ"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid must be strictly ascending"));
        }
        Ok(Self { grid, energy, provenance })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn energy(&self) -> &[f64] {
        &self.energy
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// d𝓔/dΔ (order 1) or d²𝓔/dΔ² (order 2) by finite differences.
    pub fn derivative(&self, order: usize) -> Result<Vec<f64>> {
        finite_diff(&self.energy, &self.grid, order)
    }

    /// C̃(Δ) along the curve.
    pub fn c_tilde(&self) -> Result<Vec<f64>> {
        let de = self.derivative(1)?;
        Ok(self
            .grid
            .iter()
            .zip(&self.energy)
            .zip(&de)
            .map(|((&d, &e), &s)| xxz_ctilde(e, s, d))
            .collect())
    }
}

/// u = (1 + 𝓔')/4 and z = (𝓔 − Δ𝓔')/4 of the nearest-neighbour XXZ pair.
pub fn xxz_rdm_elements(energy: f64, d_energy: f64, delta: f64) -> Result<(f64, f64)> {
    let u = 0.25 * (1.0 + d_energy);
    if u < -1e-9 {
        return Err(Error::inconsistent(format!("d𝓔/dΔ = {d_energy} gives u = {u} < 0")));
    }
    Ok((u, 0.25 * (energy - delta * d_energy)))
}

/// C̃ = −[(𝓔 + 1) + (1 − Δ) 𝓔']/2, valid where ⟨σˣσˣ⟩ + ⟨σʸσʸ⟩ ≤ 0.
pub fn xxz_ctilde(energy: f64, d_energy: f64, delta: f64) -> f64 {
    -0.5 * ((energy + 1.0) + (1.0 - delta) * d_energy)
}

/// dC/dΔ = −(1 − Δ) 𝓔''/2 where C = C̃ > 0.
pub fn xxz_dconcurrence(d2_energy: f64, delta: f64) -> f64 {
    -0.5 * (1.0 - delta) * d2_energy
}

/// Intercept `a` of the least-squares fit value ≈ a + b/N².
pub fn extrapolate_inverse_square(points: &[(usize, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::domain("need at least two system sizes to extrapolate"));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(l, _)| 1.0 / (l as f64 * l as f64)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("system sizes must differ"));
    }
    let sxy: f64 = xs.iter().zip(points).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(my - slope * mx)
}
