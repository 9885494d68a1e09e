use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::basis::SectorBasis;
use super::vecops::CHUNK;
use crate::error::{Error, Result};
use crate::pauli::{conserves_sz, string_phase, HamiltonianSpec, PauliString};

/// Pauli strings sharing one flip mask, applied together.
#[derive(Debug, Clone)]
struct FlipGroup {
    flip: u32,
    strings: Vec<PauliString>,
}

impl FlipGroup {
    /// Σ c·phase with T|s⟩ = c·phase|s ⊕ flip⟩, summed over the group.
    #[inline]
    fn amplitude(&self, state: u32) -> Complex64 {
        self.strings.iter().map(|t| string_phase(t, state)).sum()
    }
}

/// A Hamiltonian restricted to one magnetization sector.
#[derive(Debug, Clone)]
pub struct SectorOperator<'a> {
    basis: &'a SectorBasis,
    diagonal: Vec<f64>,
    groups: Vec<FlipGroup>,
}

impl<'a> SectorOperator<'a> {
    pub fn new(spec: &HamiltonianSpec, basis: &'a SectorBasis) -> Result<Self> {
        if spec.n_sites() != basis.n_sites() {
            return Err(Error::domain(format!(
                "spec has {} sites but basis has {}",
                spec.n_sites(),
                basis.n_sites()
            )));
        }
        if !conserves_sz(spec) {
            return Err(Error::domain("Hamiltonian does not conserve total Sz"));
        }
        let mut by_flip: BTreeMap<u32, Vec<PauliString>> = BTreeMap::new();
        for t in spec.terms() {
            by_flip.entry(t.flip_mask()).or_default().push(t.clone());
        }
        let diag_terms = by_flip.remove(&0).unwrap_or_default();
        let diagonal = basis
            .states()
            .iter()
            .map(|&s| diag_terms.iter().map(|t| string_phase(t, s).re).sum())
            .collect();
        let groups = by_flip
            .into_iter()
            .map(|(flip, strings)| FlipGroup { flip, strings })
            .collect();
        Ok(Self { basis, diagonal, groups })
    }

    pub fn basis(&self) -> &SectorBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// (H v)ₖ for one output index, summed in a fixed term order.
    #[inline]
    fn row_times(&self, k: usize, v: &[Complex64]) -> Complex64 {
        let s = self.basis.states()[k];
        let mut acc = v[k] * self.diagonal[k];
        for g in &self.groups {
            // the flip keeps the popcount only if it moves as many ups as downs
            if 2 * (s & g.flip).count_ones() != g.flip.count_ones() {
                continue;
            }
            let amp = g.amplitude(s);
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let target = s ^ g.flip;
            // Each string is Hermitian: ⟨s|T|s⊕f⟩ = conj(⟨s⊕f|T|s⟩)
            acc += amp.conj() * v[self.basis.rank_unchecked(target)];
        }
        acc
    }

    /// w ← H v. Every output element is owned by exactly one worker.
    pub fn apply_into(&self, v: &[Complex64], w: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(w.len(), self.dim());
        if self.dim() < 2 * CHUNK {
            for (k, x) in w.iter_mut().enumerate() {
                *x = self.row_times(k, v);
            }
        } else {
            w.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
                let off = ci * CHUNK;
                for (j, x) in chunk.iter_mut().enumerate() {
                    *x = self.row_times(off + j, v);
                }
            });
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut w = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(v, &mut w);
        w
    }

    /// Dense sector block, filled column by column from the term action.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for (k, &s) in self.basis.states().iter().enumerate() {
            m[(k, k)] += Complex64::new(self.diagonal[k], 0.0);
            for g in &self.groups {
                if 2 * (s & g.flip).count_ones() != g.flip.count_ones() {
                    continue;
                }
                let r = self.basis.rank_unchecked(s ^ g.flip);
                m[(r, k)] += g.amplitude(s);
            }
        }
        m
    }

    /// ⟨v|H|v⟩ / ⟨v|v⟩.
    pub fn rayleigh(&self, v: &[Complex64]) -> f64 {
        let hv = self.apply(v);
        super::vecops::dot(v, &hv).re / super::vecops::dot(v, v).re
    }
}

/// w = H v on the sector basis, without forming a matrix.
pub fn apply_hamiltonian(
    spec: &HamiltonianSpec,
    basis: &SectorBasis,
    v: &[Complex64],
) -> Result<Vec<Complex64>> {
    if v.len() != basis.len() {
        return Err(Error::domain(format!(
            "vector length {} does not match basis length {}",
            v.len(),
            basis.len()
        )));
    }
    Ok(SectorOperator::new(spec, basis)?.apply(v))
}
