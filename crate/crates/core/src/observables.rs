//! Spin correlators and reduced density matrices of sector states.
//!
//! Two-site matrices use the basis {↑↑, ↑↓, ↓↑, ↓↓} with the first label
//! belonging to site `i`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ed::{eigh_small, AsState, HermitianMatrix};
use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Pattern tolerance for recognizing the symmetric X form.
pub const X_FORM_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// Symmetric two-site state: corners `u`, middle diagonal `w`, coherence `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XForm {
    pub u: f64,
    pub w: f64,
    pub z: f64,
}

impl XForm {
    pub fn to_matrix(self) -> DMatrix<Complex64> {
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut m = DMatrix::from_element(4, 4, r(0.0));
        m[(0, 0)] = r(self.u);
        m[(3, 3)] = r(self.u);
        m[(1, 1)] = r(self.w);
        m[(2, 2)] = r(self.w);
        m[(1, 2)] = r(self.z);
        m[(2, 1)] = r(self.z);
        m
    }
}

/// A validated two-spin density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSiteRdm {
    matrix: HermitianMatrix,
    x_form: Option<XForm>,
}

impl TwoSiteRdm {
    /// Checks unit trace and positive semidefiniteness (both to 1e−10).
    pub fn new(matrix: HermitianMatrix) -> Result<Self> {
        if matrix.dim() != 4 {
            return Err(Error::domain("two-site density matrix must be 4×4"));
        }
        let tr = matrix.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::inconsistent(format!("trace {tr} differs from 1")));
        }
        let min = *eigh_small(&matrix)?.values.last().expect("4 eigenvalues");
        if min < -PSD_TOL {
            return Err(Error::inconsistent(format!("negative eigenvalue {min:e}")));
        }
        let x_form = detect_x_form(&matrix);
        Ok(Self { matrix, x_form })
    }

    pub fn from_x_form(x: XForm) -> Result<Self> {
        Self::new(HermitianMatrix::new(x.to_matrix())?)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn x_form(&self) -> Option<XForm> {
        self.x_form
    }

    /// ⟨σᵢ^α σⱼ^β⟩ = tr[ρ (σ^α ⊗ σ^β)].
    pub fn expectation(&self, alpha: Pauli, beta: Pauli) -> f64 {
        let a = alpha.matrix();
        let b = beta.matrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                let op = a[r / 2][c / 2] * b[r % 2][c % 2];
                acc += self.matrix.get(c, r) * op;
            }
        }
        acc.re
    }

    /// Reduced state of site `j` (trace over the first site).
    pub fn trace_out_first(&self) -> HermitianMatrix {
        self.partial_trace(true)
    }

    /// Reduced state of site `i` (trace over the second site).
    pub fn trace_out_second(&self) -> HermitianMatrix {
        self.partial_trace(false)
    }

    fn partial_trace(&self, first: bool) -> HermitianMatrix {
        let m = self.matrix.matrix();
        let out = DMatrix::from_fn(2, 2, |r, c| {
            (0..2)
                .map(|k| if first { m[(2 * k + r, 2 * k + c)] } else { m[(2 * r + k, 2 * c + k)] })
                .sum()
        });
        HermitianMatrix::new(out).expect("partial trace of a Hermitian matrix")
    }
}

fn detect_x_form(m: &HermitianMatrix) -> Option<XForm> {
    let allowed = |r: usize, c: usize| r == c || (r, c) == (1, 2) || (r, c) == (2, 1);
    for r in 0..4 {
        for c in 0..4 {
            if !allowed(r, c) && m.get(r, c).norm() > X_FORM_TOL {
                return None;
            }
        }
    }
    let d = |k: usize| m.get(k, k).re;
    let z = m.get(1, 2);
    if (d(0) - d(3)).abs() > X_FORM_TOL || (d(1) - d(2)).abs() > X_FORM_TOL || z.im.abs() > X_FORM_TOL {
        return None;
    }
    Some(XForm { u: 0.5 * (d(0) + d(3)), w: 0.5 * (d(1) + d(2)), z: z.re })
}

/// Nearest-neighbour style correlator set for one pair of sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatorSet {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    /// ⟨σᵢᶻ⟩ and ⟨σⱼᶻ⟩.
    pub z_i: f64,
    pub z_j: f64,
}

impl CorrelatorSet {
    /// Correlators of a state with ⟨σᶻ⟩ = 0.
    pub fn symmetric(xx: f64, yy: f64, zz: f64) -> Self {
        Self { xx, yy, zz, z_i: 0.0, z_j: 0.0 }
    }

    pub fn xx_plus_yy(&self) -> f64 {
        self.xx + self.yy
    }

    fn values(&self) -> [f64; 5] {
        [self.xx, self.yy, self.zz, self.z_i, self.z_j]
    }
}

fn check_pair(n_sites: usize, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(Error::domain(format!("sites must differ, got i = j = {i}")));
    }
    if i >= n_sites || j >= n_sites {
        return Err(Error::domain(format!("site pair ({i}, {j}) out of range for {n_sites} sites")));
    }
    Ok(())
}

/// Index in {↑↑, ↑↓, ↓↑, ↓↓} of the (i, j) bits of `s`.
#[inline]
fn pair_index(s: u32, i: usize, j: usize) -> usize {
    let up_i = (s >> i) & 1;
    let up_j = (s >> j) & 1;
    ((1 - up_i) * 2 + (1 - up_j)) as usize
}

/// ρᵢⱼ by grouping amplitudes on the (i, j) bit pair; the full density matrix
/// is never formed. Within a sector only ↑↓ ↔ ↓↑ coherences survive.
pub fn two_site_rdm(gs: &impl AsState, i: usize, j: usize) -> Result<TwoSiteRdm> {
    let state = gs.sector_state()?;
    check_pair(state.n_sites(), i, j)?;
    let basis = state.basis();
    let amps = state.amplitudes();
    let swap = (1u32 << i) | (1u32 << j);
    let mut rho = DMatrix::from_element(4, 4, Complex64::new(0.0, 0.0));
    for (k, (&s, &a)) in basis.states().iter().zip(amps).enumerate() {
        let p = pair_index(s, i, j);
        rho[(p, p)] += a.norm_sqr();
        if (s >> i) & 1 != (s >> j) & 1 {
            let t = s ^ swap;
            let q = pair_index(t, i, j);
            let b = amps[basis.rank_unchecked(t)];
            debug_assert_ne!(basis.rank_unchecked(t), k);
            rho[(p, q)] += a * b.conj();
        }
    }
    TwoSiteRdm::new(HermitianMatrix::new(rho)?)
}

/// ρⱼ; diagonal because off-diagonal elements leave the sector.
pub fn one_site_rdm(gs: &impl AsState, j: usize) -> Result<HermitianMatrix> {
    let state = gs.sector_state()?;
    if j >= state.n_sites() {
        return Err(Error::domain(format!("site {j} out of range for {} sites", state.n_sites())));
    }
    let p_up: f64 = state
        .basis()
        .states()
        .iter()
        .zip(state.amplitudes())
        .filter(|(&s, _)| (s >> j) & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let total: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    Ok(HermitianMatrix::from_real_diagonal(&[p_up / total, 1.0 - p_up / total]))
}

/// ⟨ψ|σᵢ^α σⱼ^β|ψ⟩. Operators that change the magnetization give exactly 0.
pub fn pauli_correlator(
    gs: &impl AsState,
    alpha: Pauli,
    i: usize,
    beta: Pauli,
    j: usize,
) -> Result<f64> {
    Ok(two_site_rdm(gs, i, j)?.expectation(alpha, beta))
}

/// xx, yy, zz and the single-site magnetizations for the pair (i, j).
pub fn correlators(gs: &impl AsState, i: usize, j: usize) -> Result<CorrelatorSet> {
    let rho = two_site_rdm(gs, i, j)?;
    Ok(correlators_of(&rho))
}

pub fn correlators_of(rho: &TwoSiteRdm) -> CorrelatorSet {
    let z_i = rho.trace_out_second();
    let z_j = rho.trace_out_first();
    CorrelatorSet {
        xx: rho.expectation(Pauli::X, Pauli::X),
        yy: rho.expectation(Pauli::Y, Pauli::Y),
        zz: rho.expectation(Pauli::Z, Pauli::Z),
        z_i: z_i.get(0, 0).re - z_i.get(1, 1).re,
        z_j: z_j.get(0, 0).re - z_j.get(1, 1).re,
    }
}

/// X-form density matrix u = (1+zz)/4, w = (1−zz)/4, z = (xx+yy)/4.
///
/// Fails if a correlator is outside [−1, 1], if either magnetization is
/// nonzero, or if the result has an eigenvalue below −1e−8.
pub fn rdm_from_correlators(c: &CorrelatorSet) -> Result<TwoSiteRdm> {
    if c.values().iter().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-12) {
        return Err(Error::inconsistent(format!("correlators out of [-1, 1]: {c:?}")));
    }
    if c.z_i.abs() > 1e-8 || c.z_j.abs() > 1e-8 {
        return Err(Error::inconsistent("X form requires zero single-site magnetization"));
    }
    let x = XForm { u: (1.0 + c.zz) / 4.0, w: (1.0 - c.zz) / 4.0, z: (c.xx + c.yy) / 4.0 };
    // spectrum: u (twice), w + z, w − z
    let min = x.u.min(x.w - x.z.abs());
    if min < -1e-8 {
        return Err(Error::inconsistent(format!(
            "correlators give a negative eigenvalue {min:e}; not a symmetric state"
        )));
    }
    if min < 0.0 {
        // within tolerance: clip onto the PSD boundary
        let z = x.z.signum() * x.w;
        return TwoSiteRdm::from_x_form(XForm { u: x.u.max(0.0), z, ..x });
    }
    TwoSiteRdm::from_x_form(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ed::{ground_state, SectorState};
    use crate::pauli::{build_xx3, build_xxz};
    use std::f64::consts::PI;

    fn singlet() -> SectorState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SectorState::from_masks(
            2,
            &[(0b01, Complex64::new(h, 0.0)), (0b10, Complex64::new(-h, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn neel_zz() {
        let neel = SectorState::product(4, 0b0101).unwrap();
        for i in 0..4 {
            let zz = pauli_correlator(&neel, Pauli::Z, i, Pauli::Z, (i + 1) % 4).unwrap();
            assert_eq!(zz, -1.0);
            // σˣσʸ leaves nothing in-sector for a product state
            assert_eq!(pauli_correlator(&neel, Pauli::X, i, Pauli::X, (i + 1) % 4).unwrap(), 0.0);
        }
    }

    #[test]
    fn singlet_rdm() {
        let rho = two_site_rdm(&singlet(), 0, 1).unwrap();
        let x = rho.x_form().unwrap();
        assert!(x.u.abs() < 1e-15);
        assert!((x.w - 0.5).abs() < 1e-15);
        assert!((x.z + 0.5).abs() < 1e-15);
    }

    #[test]
    fn polarized_rdm_has_no_x_form() {
        let up = SectorState::product(4, 0b1111).unwrap();
        let rho = two_site_rdm(&up, 0, 2).unwrap();
        assert!(rho.x_form().is_none());
        assert_eq!(rho.matrix().get(0, 0).re, 1.0);
        let r1 = one_site_rdm(&up, 3).unwrap();
        assert_eq!(r1.get(0, 0).re, 1.0);
        assert_eq!(r1.get(1, 1).re, 0.0);
    }

    #[test]
    fn bad_pairs() {
        let s = singlet();
        assert!(matches!(two_site_rdm(&s, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(two_site_rdm(&s, 0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_ground_state_is_refused() {
        let gs = ground_state(&build_xxz(6, -2.0).unwrap()).unwrap();
        assert!(matches!(two_site_rdm(&gs, 0, 1), Err(Error::Ambiguous(_))));
        assert!(matches!(pauli_correlator(&gs, Pauli::Z, 0, Pauli::Z, 1), Err(Error::Ambiguous(_))));
        assert!(matches!(one_site_rdm(&gs, 0), Err(Error::Ambiguous(_))));
    }

    #[test]
    fn xx3_rdm_matches_correlator_formula() {
        let gs = ground_state(&build_xx3(12, 0.5).unwrap()).unwrap();
        let rho = two_site_rdm(&gs, 3, 4).unwrap();
        let x = rho.x_form().expect("symmetric form");
        let c = correlators(&gs, 3, 4).unwrap();
        assert!((x.u - (1.0 + c.zz) / 4.0).abs() < 1e-12);
        assert!((x.z - (c.xx + c.yy) / 4.0).abs() < 1e-12);
        let r1 = one_site_rdm(&gs, 4).unwrap();
        assert!((r1.get(0, 0).re - 0.5).abs() < 1e-9);
    }

    #[test]
    fn partial_trace_identity() {
        for spec in [build_xx3(10, 1.3).unwrap(), build_xxz(10, 0.4).unwrap()] {
            let gs = ground_state(&spec).unwrap();
            for (i, j) in [(0, 1), (2, 5), (7, 3)] {
                let rho = two_site_rdm(&gs, i, j).unwrap();
                let from_pair = rho.trace_out_first();
                let direct = one_site_rdm(&gs, j).unwrap();
                let d = (from_pair.matrix() - direct.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(d < 1e-10);
                let from_pair_i = rho.trace_out_second();
                let direct_i = one_site_rdm(&gs, i).unwrap();
                let d = (from_pair_i.matrix() - direct_i.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(d < 1e-10);
            }
        }
    }

    #[test]
    fn from_correlators_examples() {
        let g = 2.0 / PI;
        let rho = rdm_from_correlators(&CorrelatorSet::symmetric(g, g, -g * g)).unwrap();
        let x = rho.x_form().unwrap();
        // frozen from (1 − G²)/4, (1 + G²)/4, G/2 with G = 2/π
        assert!((x.u - 0.148_678_816_357_662_2).abs() < 1e-12);
        assert!((x.w - 0.351_321_183_642_337_8).abs() < 1e-12);
        assert!((x.z - 0.318_309_886_183_790_7).abs() < 1e-12);

        let rho = rdm_from_correlators(&CorrelatorSet::symmetric(0.0, 0.0, 0.0)).unwrap();
        let x = rho.x_form().unwrap();
        assert_eq!((x.u, x.w, x.z), (0.25, 0.25, 0.0));

        let rho = rdm_from_correlators(&CorrelatorSet::symmetric(-1.0, -1.0, -1.0)).unwrap();
        let x = rho.x_form().unwrap();
        assert_eq!((x.u, x.w, x.z), (0.0, 0.5, -0.5));
    }

    #[test]
    fn from_correlators_rejects_unphysical() {
        // |z| > w: not positive semidefinite
        assert!(matches!(
            rdm_from_correlators(&CorrelatorSet::symmetric(1.0, 1.0, 0.5)),
            Err(Error::Inconsistent(_))
        ));
        assert!(rdm_from_correlators(&CorrelatorSet::symmetric(1.5, 0.0, 0.0)).is_err());
        let mut c = CorrelatorSet::symmetric(0.1, 0.1, 0.0);
        c.z_i = 0.3;
        assert!(rdm_from_correlators(&c).is_err());
    }

    #[test]
    fn expectation_matches_direct_definition() {
        let gs = ground_state(&build_xx3(8, 1.8).unwrap()).unwrap();
        let rho = two_site_rdm(&gs, 0, 1).unwrap();
        let m = rho.matrix().matrix();
        // ⟨σˣσˣ⟩ = 2 Re(ρ₁₂ + ρ₀₃)
        let xx = 2.0 * (m[(1, 2)].re + m[(0, 3)].re);
        assert!((rho.expectation(Pauli::X, Pauli::X) - xx).abs() < 1e-14);
        let zz = m[(0, 0)].re + m[(3, 3)].re - m[(1, 1)].re - m[(2, 2)].re;
        assert!((rho.expectation(Pauli::Z, Pauli::Z) - zz).abs() < 1e-14);
    }
}
