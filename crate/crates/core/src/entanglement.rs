//! Concurrence (general spectral route and the closed form for symmetric
//! states) and single-site von Neumann entropy.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ed::{eigh_small, psd_sqrt, AsState, HermitianMatrix};
use crate::error::{Error, Result};
use crate::observables::{correlators_of, one_site_rdm, two_site_rdm, CorrelatorSet, TwoSiteRdm};

/// Eigenvalues of the Wootters product in [−CLIP_TOL, 0) are rounding noise.
pub const CLIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wootters {
    pub concurrence: f64,
    /// γ₁ − γ₂ − γ₃ − γ₄ before clamping at zero.
    pub c_tilde: f64,
    /// Descending.
    pub gammas: [f64; 4],
}

/// σʸ ⊗ σʸ in the standard basis: anti-diagonal (−1, 1, 1, −1).
fn sigma_yy() -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    m[(0, 3)] = Complex64::new(-1.0, 0.0);
    m[(1, 2)] = Complex64::new(1.0, 0.0);
    m[(2, 1)] = Complex64::new(1.0, 0.0);
    m[(3, 0)] = Complex64::new(-1.0, 0.0);
    m
}

/// The spin-flipped state (σʸ⊗σʸ) ρ* (σʸ⊗σʸ).
pub fn spin_flip(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let yy = sigma_yy();
    &yy * rho.map(|z| z.conj()) * &yy
}

/// γ's are the square roots of the eigenvalues of √ρ ρ̃ √ρ, a Hermitian
/// positive matrix with the same spectrum as ρ ρ̃.
pub fn concurrence_wootters(rho: &TwoSiteRdm) -> Result<Wootters> {
    let m = rho.matrix().matrix();
    let s = psd_sqrt(rho.matrix(), 1e-10)?;
    let sm = s.matrix();
    let product = sm * spin_flip(m) * sm;
    let herm = HermitianMatrix::new((&product + product.adjoint()) * Complex64::new(0.5, 0.0))?;
    let eig = eigh_small(&herm)?;
    let mut gammas = [0.0; 4];
    for (g, &lam) in gammas.iter_mut().zip(&eig.values) {
        if lam < -CLIP_TOL {
            return Err(Error::Numerical {
                message: "Wootters spectrum has a negative eigenvalue".into(),
                residual: lam,
            });
        }
        *g = lam.max(0.0).sqrt();
    }
    let c_tilde = gammas[0] - gammas[1] - gammas[2] - gammas[3];
    Ok(Wootters { concurrence: c_tilde.max(0.0), c_tilde, gammas })
}

/// Closed form for the symmetric X state:
/// C̃ = (|⟨σˣσˣ⟩ + ⟨σʸσʸ⟩| − ⟨σᶻσᶻ⟩ − 1)/2, C = max(0, C̃).
/// Returns `(C, C̃)`.
pub fn concurrence_symmetric(xx_plus_yy: f64, zz: f64) -> (f64, f64) {
    let c_tilde = 0.5 * (xx_plus_yy.abs() - zz - 1.0);
    (c_tilde.max(0.0), c_tilde)
}

/// S = −Σ p log₂ p over the eigenvalues, with 0 log 0 = 0.
pub fn von_neumann_entropy(rho: &HermitianMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::domain(format!("density matrix trace {tr} is not 1")));
    }
    let values = if rho.dim() <= 8 {
        eigh_small(rho)?.values
    } else {
        return Err(Error::domain("entropy supports dimension ≤ 8"));
    };
    if let Some(&min) = values.last() {
        if min < -1e-10 {
            return Err(Error::domain(format!("density matrix has eigenvalue {min:e}")));
        }
    }
    Ok(values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum::<f64>().max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConcurrenceRoute {
    Wootters,
    Symmetric,
    Both,
}

/// Entanglement of a nearest-neighbour pair and of a single site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub concurrence: f64,
    pub c_tilde: f64,
    pub entropy_site: f64,
    pub route: ConcurrenceRoute,
    pub correlators: CorrelatorSet,
    pub wootters: Wootters,
    /// `(C, C̃)` from the closed form; present when the pair state has the
    /// symmetric X form.
    pub symmetric: Option<(f64, f64)>,
}

impl EntanglementReport {
    /// Builds the report from a pair density matrix and the single-site state
    /// of its second site.
    pub fn from_rdm(rho: &TwoSiteRdm, site_rdm: &HermitianMatrix) -> Result<Self> {
        let correlators = correlators_of(rho);
        let wootters = concurrence_wootters(rho)?;
        let entropy_site = von_neumann_entropy(site_rdm)?;
        let symmetric = rho
            .x_form()
            .map(|_| concurrence_symmetric(correlators.xx_plus_yy(), correlators.zz));
        let (route, concurrence, c_tilde) = match symmetric {
            Some((c, ct)) => (ConcurrenceRoute::Both, c, ct),
            None => (ConcurrenceRoute::Wootters, wootters.concurrence, wootters.c_tilde),
        };
        Ok(Self { concurrence, c_tilde, entropy_site, route, correlators, wootters, symmetric })
    }

    /// Report for the pair (i, j) of a state; entropy is that of site j.
    pub fn for_pair(gs: &impl AsState, i: usize, j: usize) -> Result<Self> {
        let rho = two_site_rdm(gs, i, j)?;
        let site = one_site_rdm(gs, j)?;
        Self::from_rdm(&rho, &site)
    }

    /// Report built from correlators alone (symmetric route only).
    pub fn from_correlators(c: &CorrelatorSet) -> Result<Self> {
        let rho = crate::observables::rdm_from_correlators(c)?;
        let site = rho.trace_out_first();
        let mut r = Self::from_rdm(&rho, &site)?;
        r.route = ConcurrenceRoute::Symmetric;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::XForm;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn x(u: f64, w: f64, z: f64) -> TwoSiteRdm {
        TwoSiteRdm::from_x_form(XForm { u, w, z }).unwrap()
    }

    #[test]
    fn singlet_and_mixed() {
        let w = concurrence_wootters(&x(0.0, 0.5, -0.5)).unwrap();
        assert!((w.concurrence - 1.0).abs() < 1e-12);
        assert!((w.gammas[0] - 1.0).abs() < 1e-12);
        assert!(w.gammas[1..].iter().all(|g| g.abs() < 1e-7));

        let w = concurrence_wootters(&x(0.25, 0.25, 0.0)).unwrap();
        assert_eq!(w.concurrence, 0.0);
        assert!(w.gammas.iter().all(|g| (g - 0.25).abs() < 1e-12));
    }

    #[test]
    fn plateau_point_both_routes() {
        let g = 2.0 / PI;
        let rho = x((1.0 - g * g) / 4.0, (1.0 + g * g) / 4.0, g / 2.0);
        let w = concurrence_wootters(&rho).unwrap();
        let (c, ct) = concurrence_symmetric(2.0 * g, -g * g);
        assert_eq!(c, ct);
        // ((2/π + 1)² − 2)/2, frozen from an independent evaluation
        assert!((c - 0.339_262_139_652_257).abs() < 1e-12);
        assert!((w.concurrence - c).abs() < 1e-10);
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(concurrence_symmetric(-2.0, -1.0), (1.0, 1.0));
        assert_eq!(concurrence_symmetric(0.0, 1.0), (0.0, -1.0));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&HermitianMatrix::identity(2).scaled(0.5)).unwrap(), 1.0);
        assert_eq!(von_neumann_entropy(&HermitianMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap(), 0.0);
        let s = von_neumann_entropy(&HermitianMatrix::from_real_diagonal(&[0.75, 0.25])).unwrap();
        assert!((s - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert!(von_neumann_entropy(&HermitianMatrix::from_real_diagonal(&[0.7, 0.2])).is_err());
    }

    #[test]
    fn report_from_correlators() {
        let g = 2.0 / PI;
        let r = EntanglementReport::from_correlators(&CorrelatorSet::symmetric(g, g, -g * g)).unwrap();
        assert_eq!(r.route, ConcurrenceRoute::Symmetric);
        assert_eq!(r.entropy_site, 1.0);
        assert!((r.concurrence - r.wootters.concurrence).abs() < 1e-10);
    }

    fn valid_x_form() -> impl Strategy<Value = XForm> {
        (0.0f64..=0.25, -1.0f64..=1.0).prop_map(|(u, t)| {
            let w = 0.5 - u;
            XForm { u, w, z: t * w }
        })
    }

    proptest! {
        #[test]
        fn routes_agree_on_x_forms(xf in valid_x_form()) {
            let rho = TwoSiteRdm::from_x_form(xf).unwrap();
            let w = concurrence_wootters(&rho).unwrap();
            let closed = 2.0 * (xf.z.abs() - xf.u).max(0.0);
            let (c, _) = concurrence_symmetric(4.0 * xf.z, 4.0 * xf.u - 1.0);
            prop_assert!((w.concurrence - closed).abs() < 1e-10);
            prop_assert!((c - closed).abs() < 1e-12);
            prop_assert!(w.gammas.windows(2).all(|p| p[0] >= p[1]));
            // Σγ² = tr(ρ ρ̃)
            let m = rho.matrix().matrix();
            let tr: f64 = (m * spin_flip(m)).trace().re;
            let s2: f64 = w.gammas.iter().map(|g| g * g).sum();
            prop_assert!((tr - s2).abs() < 1e-10);
        }

        #[test]
        fn clamp_identity(ct in -2.0f64..1.0) {
            prop_assert!((ct.max(0.0) - (ct.abs() / 2.0 + ct / 2.0)).abs() < 1e-15);
        }

        #[test]
        fn entropy_bounds(p in 0.0f64..=1.0) {
            let s = von_neumann_entropy(&HermitianMatrix::from_real_diagonal(&[p, 1.0 - p])).unwrap();
            prop_assert!((0.0..=1.0 + 1e-15).contains(&s));
        }
    }
}
