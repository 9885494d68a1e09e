use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::MAX_SITES;

/// Fixed number of up spins on an `n_sites` chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SzSector {
    pub n_sites: usize,
    pub n_up: usize,
}

impl SzSector {
    pub fn new(n_sites: usize, n_up: usize) -> Result<Self> {
        if n_up > n_sites {
            return Err(Error::domain(format!("n_up = {n_up} exceeds n_sites = {n_sites}")));
        }
        Ok(Self { n_sites, n_up })
    }

    /// Total σᶻ, i.e. 2·Sᶻ in units of ħ/2.
    pub fn total_sigma_z(&self) -> i64 {
        2 * self.n_up as i64 - self.n_sites as i64
    }

    pub fn dimension(&self) -> usize {
        binomial(self.n_sites, self.n_up)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All `n_sites`-bit masks with `n_up` set bits, ascending.
///
/// Positions are ranked with the combinatorial number system: a mask with set
/// bits p₁ < p₂ < … < pₖ sits at index Σₘ C(pₘ, m), which is exactly its
/// position in ascending numeric order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    sector: SzSector,
    states: Vec<u32>,
    // binom[p][m] = C(p, m) for p < n_sites, m ≤ n_up
    binom: Vec<Vec<u32>>,
}

impl SectorBasis {
    pub fn n_sites(&self) -> usize {
        self.sector.n_sites
    }

    pub fn n_up(&self) -> usize {
        self.sector.n_up
    }

    pub fn sector(&self) -> SzSector {
        self.sector
    }

    pub fn states(&self) -> &[u32] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Position of `mask` in the basis, or `None` if it is not a member.
    #[inline]
    pub fn rank(&self, mask: u32) -> Option<usize> {
        if mask.count_ones() as usize != self.sector.n_up
            || (self.sector.n_sites < 32 && mask >> self.sector.n_sites != 0)
        {
            return None;
        }
        Some(self.rank_unchecked(mask))
    }

    /// Rank of a mask already known to lie in the sector.
    #[inline]
    pub(crate) fn rank_unchecked(&self, mut mask: u32) -> usize {
        let mut r = 0usize;
        let mut m = 1;
        while mask != 0 {
            let p = mask.trailing_zeros() as usize;
            r += self.binom[p][m] as usize;
            mask &= mask - 1;
            m += 1;
        }
        r
    }
}

pub fn enumerate_sector(n_sites: usize, n_up: usize) -> Result<SectorBasis> {
    if n_sites > MAX_SITES {
        return Err(Error::Resource(format!(
            "{n_sites} sites exceeds the {MAX_SITES}-site limit"
        )));
    }
    let sector = SzSector::new(n_sites, n_up)?;
    let dim = sector.dimension();

    let mut states = Vec::with_capacity(dim);
    if n_up == 0 {
        states.push(0);
    } else {
        // Gosper's hack: next larger integer with the same popcount
        let limit = 1u64 << n_sites;
        let mut x: u64 = (1u64 << n_up) - 1;
        while x < limit {
            states.push(x as u32);
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    debug_assert_eq!(states.len(), dim);

    let binom = (0..n_sites.max(1))
        .map(|p| (0..=n_up).map(|m| binomial(p, m) as u32).collect())
        .collect();

    Ok(SectorBasis { sector, states, binom })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_sectors() {
        assert_eq!(enumerate_sector(2, 1).unwrap().states(), &[0b01, 0b10]);
        assert_eq!(
            enumerate_sector(4, 2).unwrap().states(),
            &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
        );
        assert_eq!(enumerate_sector(16, 8).unwrap().len(), 12870);
        assert_eq!(enumerate_sector(5, 0).unwrap().states(), &[0]);
        assert_eq!(enumerate_sector(5, 5).unwrap().states(), &[0b11111]);
    }

    #[test]
    fn guards() {
        assert!(matches!(enumerate_sector(25, 3), Err(Error::Resource(_))));
        assert!(matches!(enumerate_sector(4, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn rank_rejects_non_members() {
        let b = enumerate_sector(6, 3).unwrap();
        assert_eq!(b.rank(0b0000_0011), None);
        assert_eq!(b.rank(0b1100_0001), None);
        assert_eq!(b.rank(0b0000_0111), Some(0));
    }

    proptest! {
        #[test]
        fn rank_inverts_enumeration(n in 1usize..=14, frac in 0.0f64..=1.0) {
            let k = ((n as f64) * frac).round() as usize;
            let b = enumerate_sector(n, k).unwrap();
            prop_assert_eq!(b.len(), binomial(n, k));
            prop_assert!(b.states().windows(2).all(|w| w[0] < w[1]));
            for (i, &s) in b.states().iter().enumerate() {
                prop_assert_eq!(s.count_ones() as usize, k);
                prop_assert_eq!(b.rank(s), Some(i));
            }
        }
    }
}
