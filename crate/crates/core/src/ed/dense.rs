use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// A small complex Hermitian matrix (density matrices, Wootters products).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    /// Validates Hermiticity to 1e−12 and symmetrizes away the residue.
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::domain("matrix is not square"));
        }
        let dev = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > HERMITIAN_TOL {
            return Err(Error::domain(format!("matrix deviates from Hermitian by {dev:e}")));
        }
        Ok(Self((&m + m.adjoint()) * Complex64::new(0.5, 0.0)))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        Self(DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(d[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.0[(r, c)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// Rows of `[re, im]` pairs, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| [self.0[(r, c)].re, self.0[(r, c)].im]).collect())
            .collect()
    }
}

/// Eigen-decomposition with eigenvalues in descending order; column `k` of
/// `vectors` belongs to `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Eigh {
    /// V Λ V†.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let lam = DVector::from_iterator(
            self.values.len(),
            self.values.iter().map(|&x| Complex64::new(x, 0.0)),
        );
        &self.vectors * DMatrix::from_diagonal(&lam) * self.vectors.adjoint()
    }
}

fn eigh_sorted(m: DMatrix<Complex64>) -> Eigh {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

/// Eigenvalues (descending) and eigenvectors of a Hermitian matrix, d ≤ 8.
pub fn eigh_small(m: &HermitianMatrix) -> Result<Eigh> {
    if m.dim() > 8 {
        return Err(Error::domain(format!("eigh_small supports d ≤ 8, got {}", m.dim())));
    }
    Ok(eigh_sorted(m.0.clone()))
}

/// Lowest eigenpair of a dense Hermitian block.
pub(crate) fn dense_lowest(m: DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let e = eigh_sorted(m);
    let last = e.values.len() - 1;
    (e.values[last], e.vectors.column(last).iter().copied().collect())
}

/// Principal square root of a positive-semidefinite Hermitian matrix;
/// eigenvalues in [−tol, 0) are treated as zero.
pub(crate) fn psd_sqrt(m: &HermitianMatrix, tol: f64) -> Result<HermitianMatrix> {
    let e = eigh_sorted(m.0.clone());
    if let Some(&min) = e.values.last() {
        if min < -tol {
            return Err(Error::Numerical {
                message: "matrix square root of a non-positive matrix".into(),
                residual: min,
            });
        }
    }
    let roots: Vec<f64> = e.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    let s = Eigh { values: roots, vectors: e.vectors }.reconstruct();
    Ok(HermitianMatrix((&s + s.adjoint()) * Complex64::new(0.5, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_and_diagonal() {
        let e = eigh_small(&HermitianMatrix::identity(4)).unwrap();
        assert!(close(&e.values, &[1.0; 4], 1e-14));
        let e = eigh_small(&HermitianMatrix::from_real_diagonal(&[0.1, 0.7, 0.0, 0.2])).unwrap();
        assert!(close(&e.values, &[0.7, 0.2, 0.1, 0.0], 1e-14));
    }

    #[test]
    fn x_form_spectrum() {
        // u = 0.1, w = 0.4, z = 0.25: middle block gives w ± z, corners give u twice
        let (u, w, z) = (0.1, 0.4, 0.25);
        let r = |x: f64| Complex64::new(x, 0.0);
        let mut m = DMatrix::from_element(4, 4, r(0.0));
        m[(0, 0)] = r(u);
        m[(3, 3)] = r(u);
        m[(1, 1)] = r(w);
        m[(2, 2)] = r(w);
        m[(1, 2)] = r(z);
        m[(2, 1)] = r(z);
        let e = eigh_small(&HermitianMatrix::new(m).unwrap()).unwrap();
        assert!(close(&e.values, &[0.65, 0.15, 0.1, 0.1], 1e-14));
    }

    #[test]
    fn rejects_non_hermitian_and_large() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m).is_err());
        assert!(eigh_small(&HermitianMatrix::identity(9)).is_err());
    }

    proptest! {
        #[test]
        fn reconstruction(d in 2usize..=8, seed in proptest::collection::vec(-1.0f64..1.0, 128)) {
            let a = DMatrix::from_fn(d, d, |r, c| Complex64::new(seed[r * 8 + c], seed[64 + r * 8 + c]));
            let h = HermitianMatrix::new((&a + a.adjoint()) * Complex64::new(0.5, 0.0)).unwrap();
            let e = eigh_small(&h).unwrap();
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let err = (e.reconstruct() - h.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err <= 1e-10);
        }

        #[test]
        fn sqrt_squares_back(seed in proptest::collection::vec(-1.0f64..1.0, 32)) {
            let a = DMatrix::from_fn(4, 4, |r, c| Complex64::new(seed[r * 4 + c], seed[16 + r * 4 + c]));
            let p = HermitianMatrix::new(&a * a.adjoint()).unwrap();
            let s = psd_sqrt(&p, 1e-12).unwrap();
            let err = (s.matrix() * s.matrix() - p.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            prop_assert!(err < 1e-10);
        }
    }
}
