//! Exact diagonalization in fixed-magnetization sectors.

mod basis;
mod dense;
mod lanczos;
mod operator;
pub(crate) mod vecops;

use std::sync::Arc;

use num_complex::Complex64;

pub use basis::{binomial, enumerate_sector, SectorBasis, SzSector};
pub(crate) use dense::{dense_lowest, psd_sqrt};
pub use dense::{eigh_small, Eigh, HermitianMatrix};
pub use lanczos::{iteration_cap, lowest_eigenpair, Eigenpair, LanczosOptions};
pub use operator::{apply_hamiltonian, SectorOperator};

use crate::error::{Error, Result};
use crate::pauli::{conserves_sz, HamiltonianSpec};

/// A normalized state with definite magnetization.
#[derive(Debug, Clone)]
pub struct SectorState {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<Complex64>,
}

impl SectorState {
    /// Normalizes `amplitudes`; rejects length mismatches and the zero vector.
    pub fn new(basis: Arc<SectorBasis>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::domain(format!(
                "{} amplitudes for a basis of {}",
                amplitudes.len(),
                basis.len()
            )));
        }
        let n = vecops::norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::domain("state vector has zero or non-finite norm"));
        }
        vecops::scale(&mut amplitudes, 1.0 / n);
        Ok(Self { basis, amplitudes })
    }

    /// Superposition of basis masks, all with the same number of up spins.
    pub fn from_masks(n_sites: usize, terms: &[(u32, Complex64)]) -> Result<Self> {
        let n_up = terms
            .first()
            .map(|(m, _)| m.count_ones() as usize)
            .ok_or_else(|| Error::domain("empty superposition"))?;
        let basis = enumerate_sector(n_sites, n_up)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        for &(mask, a) in terms {
            let k = basis.rank(mask).ok_or_else(|| {
                Error::domain(format!("mask {mask:b} is not in the {n_up}-up sector of {n_sites} sites"))
            })?;
            amps[k] += a;
        }
        Self::new(Arc::new(basis), amps)
    }

    /// The product state with up spins exactly on the set bits of `mask`.
    pub fn product(n_sites: usize, mask: u32) -> Result<Self> {
        Self::from_masks(n_sites, &[(mask, Complex64::new(1.0, 0.0))])
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn n_sites(&self) -> usize {
        self.basis.n_sites()
    }

    pub fn sector(&self) -> SzSector {
        self.basis.sector()
    }

    pub fn norm(&self) -> f64 {
        vecops::norm(&self.amplitudes)
    }
}

/// Access to a state whose expectation values are well defined.
pub trait AsState {
    /// Fails with [`Error::Ambiguous`] for a degenerate ground state.
    fn sector_state(&self) -> Result<&SectorState>;
}

impl AsState for SectorState {
    fn sector_state(&self) -> Result<&SectorState> {
        Ok(self)
    }
}

/// Lowest eigenstate over all magnetization sectors.
#[derive(Debug, Clone)]
pub struct GroundState {
    state: SectorState,
    energy: f64,
    residual: f64,
    degenerate: bool,
    tied_sectors: Vec<usize>,
    sector_energies: Vec<f64>,
}

impl GroundState {
    /// Total (extensive) energy in σ-units.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn energy_per_site(&self) -> f64 {
        self.energy / self.state.n_sites() as f64
    }

    pub fn sector(&self) -> SzSector {
        self.state.sector()
    }

    pub fn n_sites(&self) -> usize {
        self.state.n_sites()
    }

    /// ‖Hψ − Eψ‖.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// True when more than one sector attains the ground energy.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Up-spin counts of every sector attaining the ground energy.
    pub fn tied_sectors(&self) -> &[usize] {
        &self.tied_sectors
    }

    /// Lowest energy found in each sector, indexed by number of up spins.
    pub fn sector_energies(&self) -> &[f64] {
        &self.sector_energies
    }

    /// The representative state, regardless of degeneracy.
    pub fn state_unchecked(&self) -> &SectorState {
        &self.state
    }
}

impl AsState for GroundState {
    fn sector_state(&self) -> Result<&SectorState> {
        if self.degenerate {
            return Err(Error::Ambiguous(format!(
                "ground energy {} is shared by sectors with n_up in {:?}",
                self.energy, self.tied_sectors
            )));
        }
        Ok(&self.state)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EdOptions {
    /// Sectors up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
    pub lanczos: LanczosOptions,
    /// Relative tolerance (× max(1, |E|)) for calling sector minima equal.
    pub degeneracy_tol: f64,
}

impl Default for EdOptions {
    fn default() -> Self {
        Self { dense_threshold: 128, lanczos: LanczosOptions::default(), degeneracy_tol: 1e-10 }
    }
}

/// Lowest eigenpair within one sector.
pub fn lowest_in_sector(
    spec: &HamiltonianSpec,
    n_up: usize,
    opts: &EdOptions,
) -> Result<(SectorState, f64, f64)> {
    let basis = Arc::new(enumerate_sector(spec.n_sites(), n_up)?);
    let op = SectorOperator::new(spec, &basis)?;
    let (vector, value, residual) = if basis.len() <= opts.dense_threshold {
        let (_, v) = dense::dense_lowest(op.to_dense());
        let hv = op.apply(&v);
        let value = vecops::dot(&v, &hv).re;
        let r: Vec<Complex64> = hv.iter().zip(&v).map(|(h, x)| h - x * value).collect();
        (v, value, vecops::norm(&r))
    } else {
        let pair = lowest_eigenpair(&op, &opts.lanczos)?;
        (pair.vector, pair.value, pair.residual)
    };
    drop(op);
    Ok((SectorState::new(basis, vector)?, value, residual))
}

pub fn ground_state(spec: &HamiltonianSpec) -> Result<GroundState> {
    ground_state_with(spec, &EdOptions::default())
}

/// Scans every sector n_up = 0..=N and keeps the global minimum. Ties within
/// the degeneracy tolerance go to the smallest |2·n_up − N|, then the smaller
/// n_up, and mark the result degenerate.
pub fn ground_state_with(spec: &HamiltonianSpec, opts: &EdOptions) -> Result<GroundState> {
    if !conserves_sz(spec) {
        return Err(Error::domain("Hamiltonian does not conserve total Sz"));
    }
    let n = spec.n_sites();
    let mut energies = Vec::with_capacity(n + 1);
    let mut best: Option<(SectorState, f64, f64)> = None;
    for n_up in 0..=n {
        let (state, e, r) = lowest_in_sector(spec, n_up, opts)?;
        energies.push(e);
        if best.as_ref().map_or(true, |(_, eb, _)| e < *eb) {
            best = Some((state, e, r));
        }
    }
    let (_, e_min, _) = best.as_ref().expect("at least one sector");
    let tol = opts.degeneracy_tol * e_min.abs().max(1.0);
    let mut tied: Vec<usize> = (0..=n).filter(|&k| energies[k] <= e_min + tol).collect();
    tied.sort_by_key(|&k| ((2 * k as i64 - n as i64).abs(), k));
    let chosen = tied[0];

    let (state, energy, residual) = if best.as_ref().map(|(s, _, _)| s.sector().n_up) == Some(chosen) {
        best.expect("present")
    } else {
        lowest_in_sector(spec, chosen, opts)?
    };
    let degenerate = tied.len() > 1;
    tied.sort_unstable();
    Ok(GroundState {
        state,
        energy,
        residual,
        degenerate,
        tied_sectors: tied,
        sector_energies: energies,
    })
}
