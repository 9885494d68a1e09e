//! Spin-1/2 chain Hamiltonians as sums of weighted Pauli strings.
//!
//! Site `k` of an `N`-site chain is bit `k` of a basis mask, and a set bit
//! means spin up (σᶻ = +1). All built models use periodic boundaries.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest chain the ED engine accepts.
pub const MAX_SITES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// The 2×2 matrix in the standard {↑, ↓} basis.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::X => [[o, one], [one, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[one, o], [o, -one]],
        }
    }

    pub fn flips(self) -> bool {
        !matches!(self, Pauli::Z)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// A real multiple of a tensor product of Pauli operators.
///
/// Sites are kept sorted ascending and are pairwise distinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    sites: Vec<usize>,
    letters: Vec<Pauli>,
    coefficient: f64,
}

impl PauliString {
    pub fn new(ops: impl IntoIterator<Item = (usize, Pauli)>, coefficient: f64) -> Result<Self> {
        let mut ops: Vec<(usize, Pauli)> = ops.into_iter().collect();
        ops.sort_by_key(|&(s, _)| s);
        if ops.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::domain("Pauli string acts twice on the same site"));
        }
        if !coefficient.is_finite() {
            return Err(Error::domain("Pauli string coefficient must be finite"));
        }
        let (sites, letters) = ops.into_iter().unzip();
        Ok(Self { sites, letters, coefficient })
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn ops(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.sites.iter().copied().zip(self.letters.iter().copied())
    }

    fn key(&self) -> Vec<(usize, Pauli)> {
        self.ops().collect()
    }

    /// Mask of sites whose spin the string flips (X or Y).
    pub fn flip_mask(&self) -> u32 {
        self.ops()
            .filter(|(_, p)| p.flips())
            .fold(0, |m, (s, _)| m | (1 << s))
    }

    /// Mask of sites carrying a sign that depends on the spin (Y or Z).
    pub fn sign_mask(&self) -> u32 {
        self.ops()
            .filter(|(_, p)| *p != Pauli::X)
            .fold(0, |m, (s, _)| m | (1 << s))
    }

    pub fn y_count(&self) -> u32 {
        self.letters.iter().filter(|&&p| p == Pauli::Y).count() as u32
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.coefficient)?;
        for (s, p) in self.ops() {
            write!(f, " {p}{s}")?;
        }
        Ok(())
    }
}

/// A Hamiltonian on a periodic chain of `n_sites` spins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianSpec {
    n_sites: usize,
    terms: Vec<PauliString>,
}

impl HamiltonianSpec {
    /// Collects terms, merging repeated strings by adding coefficients and
    /// dropping strings whose coefficient is exactly zero.
    pub fn new(n_sites: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        if n_sites == 0 || n_sites > 32 {
            return Err(Error::domain(format!("n_sites = {n_sites} is not in 1..=32")));
        }
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, f64> = BTreeMap::new();
        let mut order = Vec::new();
        for t in terms {
            if let Some(&s) = t.sites.iter().find(|&&s| s >= n_sites) {
                return Err(Error::domain(format!("site {s} out of range for {n_sites} sites")));
            }
            let key = t.key();
            match merged.get_mut(&key) {
                Some(c) => *c += t.coefficient,
                None => {
                    merged.insert(key.clone(), t.coefficient);
                    order.push(key);
                }
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|key| {
                let c = merged[&key];
                (c != 0.0).then(|| PauliString::new(key, c).expect("validated"))
            })
            .collect();
        Ok(Self { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    /// The same operator with every site index shifted by `shift` (mod N).
    pub fn translated(&self, shift: usize) -> Self {
        let n = self.n_sites;
        let terms = self.terms.iter().map(|t| {
            PauliString::new(t.ops().map(|(s, p)| ((s + shift) % n, p)), t.coefficient)
                .expect("translation keeps sites distinct")
        });
        Self::new(n, terms).expect("translation keeps sites in range")
    }

    /// Terms in a canonical order, for comparing operators irrespective of
    /// construction order.
    pub fn canonical_terms(&self) -> Vec<PauliString> {
        let mut t = self.terms.clone();
        t.sort_by(|a, b| a.key().cmp(&b.key()));
        t
    }

    /// True when every matrix element in the product basis is real.
    pub fn is_real(&self) -> bool {
        // Strings sharing a flip pattern can cancel each other's imaginary
        // parts, so decide on the summed local action.
        flip_groups(self)
            .values()
            .all(|group| local_amplitudes(group).iter().all(|(_, _, a)| a.im.abs() < 1e-12))
    }

    /// Dense matrix in the full 2^N mask basis, assembled from the explicit
    /// 2×2 Pauli matrices site by site. Intended as a reference for small N.
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.n_sites > 10 {
            return Err(Error::Resource(format!(
                "dense matrix requested for {} sites (limit 10)",
                self.n_sites
            )));
        }
        let dim = 1usize << self.n_sites;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            let mats: Vec<(usize, [[Complex64; 2]; 2])> =
                t.ops().map(|(s, p)| (s, p.matrix())).collect();
            let support: usize = t.sites.iter().fold(0, |m, &s| m | (1 << s));
            for col in 0..dim {
                // States outside the support must match exactly; enumerate the
                // target bits on the support only.
                let rest = col & !support;
                let mut sub = support;
                loop {
                    let row = rest | sub;
                    let mut amp = Complex64::new(t.coefficient, 0.0);
                    for (s, mat) in &mats {
                        let r = 1 - ((row >> s) & 1);
                        let c = 1 - ((col >> s) & 1);
                        amp *= mat[r][c];
                    }
                    if amp.norm_sqr() > 0.0 {
                        m[(row, col)] += amp;
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & support;
                }
            }
        }
        Ok(m)
    }
}

/// Terms grouped by the set of sites they flip.
fn flip_groups(spec: &HamiltonianSpec) -> BTreeMap<u32, Vec<&PauliString>> {
    let mut groups: BTreeMap<u32, Vec<&PauliString>> = BTreeMap::new();
    for t in &spec.terms {
        groups.entry(t.flip_mask()).or_default().push(t);
    }
    groups
}

/// Summed amplitude ⟨s ⊕ flip| Σ terms |s⟩ for every configuration `s` of the
/// group's support. Returns (support config, flip mask, amplitude).
fn local_amplitudes(group: &[&PauliString]) -> Vec<(u32, u32, Complex64)> {
    let flip = group[0].flip_mask();
    let support = group.iter().fold(0u32, |m, t| m | t.flip_mask() | t.sign_mask());
    let mut out = Vec::new();
    let mut sub = support;
    loop {
        let amp: Complex64 = group.iter().map(|t| string_phase(t, sub)).sum();
        out.push((sub, flip, amp));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & support;
    }
    out
}

/// `c · phase` such that `T|s⟩ = c · phase |s ⊕ flip⟩`.
///
/// Y|↑⟩ = i|↓⟩, Y|↓⟩ = −i|↑⟩ and Z|↓⟩ = −|↓⟩, so the phase is
/// i^{#Y} · (−1)^{#(Y or Z sites that are down)}.
pub(crate) fn string_phase(t: &PauliString, state: u32) -> Complex64 {
    let down_signs = (!state & t.sign_mask()).count_ones();
    let sign = if down_signs % 2 == 0 { 1.0 } else { -1.0 };
    let c = t.coefficient * sign;
    match t.y_count() % 4 {
        0 => Complex64::new(c, 0.0),
        1 => Complex64::new(0.0, c),
        2 => Complex64::new(-c, 0.0),
        _ => Complex64::new(0.0, -c),
    }
}

/// True iff the operator maps every fixed-magnetization subspace into itself.
pub fn conserves_sz(spec: &HamiltonianSpec) -> bool {
    flip_groups(spec).iter().all(|(&flip, group)| {
        flip == 0
            || local_amplitudes(group).iter().all(|&(s, flip, amp)| {
                let ups_flipped = (s & flip).count_ones();
                let downs_flipped = (!s & flip).count_ones();
                ups_flipped == downs_flipped || amp.norm() < 1e-12
            })
    })
}

fn check_chain_length(n_sites: usize) -> Result<()> {
    if n_sites < 4 || n_sites % 2 != 0 {
        return Err(Error::domain(format!(
            "n_sites must be even and at least 4, got {n_sites}"
        )));
    }
    if n_sites > MAX_SITES {
        return Err(Error::domain(format!("n_sites must be at most {MAX_SITES}, got {n_sites}")));
    }
    Ok(())
}

/// XX chain with three-spin interaction:
/// H = −Σᵢ [σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁ + (λ/2)(σˣᵢ₋₁σᶻᵢσʸᵢ₊₁ − σʸᵢ₋₁σᶻᵢσˣᵢ₊₁)].
pub fn build_xx3(n_sites: usize, lambda: f64) -> Result<HamiltonianSpec> {
    check_chain_length(n_sites)?;
    if !lambda.is_finite() {
        return Err(Error::domain("lambda must be finite"));
    }
    let n = n_sites;
    let mut terms = Vec::with_capacity(4 * n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        terms.push(PauliString::new([(i, Pauli::X), (next, Pauli::X)], -1.0)?);
        terms.push(PauliString::new([(i, Pauli::Y), (next, Pauli::Y)], -1.0)?);
        if lambda != 0.0 {
            let half = lambda / 2.0;
            terms.push(PauliString::new([(prev, Pauli::X), (i, Pauli::Z), (next, Pauli::Y)], -half)?);
            terms.push(PauliString::new([(prev, Pauli::Y), (i, Pauli::Z), (next, Pauli::X)], half)?);
        }
    }
    HamiltonianSpec::new(n, terms)
}

/// XXZ chain: H = Σᵢ [σˣᵢσˣᵢ₊₁ + σʸᵢσʸᵢ₊₁ + Δ σᶻᵢσᶻᵢ₊₁].
pub fn build_xxz(n_sites: usize, delta: f64) -> Result<HamiltonianSpec> {
    check_chain_length(n_sites)?;
    if !delta.is_finite() {
        return Err(Error::domain("delta must be finite"));
    }
    let n = n_sites;
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n {
        let next = (i + 1) % n;
        terms.push(PauliString::new([(i, Pauli::X), (next, Pauli::X)], 1.0)?);
        terms.push(PauliString::new([(i, Pauli::Y), (next, Pauli::Y)], 1.0)?);
        terms.push(PauliString::new([(i, Pauli::Z), (next, Pauli::Z)], delta)?);
    }
    HamiltonianSpec::new(n, terms)
}

/// The two model families, parameterized by λ and Δ respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Xx3,
    Xxz,
}

impl Family {
    pub fn build(self, n_sites: usize, param: f64) -> Result<HamiltonianSpec> {
        match self {
            Family::Xx3 => build_xx3(n_sites, param),
            Family::Xxz => build_xxz(n_sites, param),
        }
    }

    pub fn param_name(self) -> &'static str {
        match self {
            Family::Xx3 => "lambda",
            Family::Xxz => "delta",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Xx3 => "xx3",
            Family::Xxz => "xxz",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xx3" => Ok(Family::Xx3),
            "xxz" => Ok(Family::Xxz),
            other => Err(Error::domain(format!("unknown model family '{other}'"))),
        }
    }
}
