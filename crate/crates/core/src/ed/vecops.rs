//! Vector kernels with a summation order fixed by chunk layout, so results
//! do not depend on the number of worker threads.

use num_complex::Complex64;
use rayon::prelude::*;

pub(crate) const CHUNK: usize = 2048;
const PAR_MIN: usize = 4 * CHUNK;

/// ⟨a, b⟩ = Σ conj(aᵢ) bᵢ.
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    let chunk_dot = |(x, y): (&[Complex64], &[Complex64])| -> Complex64 {
        x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
    };
    if a.len() < PAR_MIN {
        return a
            .chunks(CHUNK)
            .zip(b.chunks(CHUNK))
            .map(chunk_dot)
            .fold(Complex64::new(0.0, 0.0), |s, x| s + x);
    }
    let partial: Vec<Complex64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(chunk_dot)
        .collect();
    partial.into_iter().fold(Complex64::new(0.0, 0.0), |s, x| s + x)
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.max(0.0).sqrt()
}

pub(crate) fn scale(a: &mut [Complex64], s: f64) {
    if a.len() < PAR_MIN {
        a.iter_mut().for_each(|x| *x *= s);
    } else {
        a.par_chunks_mut(CHUNK).for_each(|c| c.iter_mut().for_each(|x| *x *= s));
    }
}

/// w ← w − Σₖ coeffs[k] · vs[k], each element accumulated in k order.
pub(crate) fn subtract_combination(w: &mut [Complex64], vs: &[Vec<Complex64>], coeffs: &[Complex64]) {
    let body = |(ci, chunk): (usize, &mut [Complex64])| {
        let off = ci * CHUNK;
        for (j, x) in chunk.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, c) in vs.iter().zip(coeffs) {
                acc += c * v[off + j];
            }
            *x -= acc;
        }
    };
    if w.len() < PAR_MIN {
        w.chunks_mut(CHUNK).enumerate().for_each(body);
    } else {
        w.par_chunks_mut(CHUNK).enumerate().for_each(body);
    }
}

/// Σₖ coeffs[k] · vs[k].
pub(crate) fn combination(vs: &[Vec<Complex64>], coeffs: &[f64], len: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    let body = |(ci, chunk): (usize, &mut [Complex64])| {
        let off = ci * CHUNK;
        for (j, x) in chunk.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (v, &c) in vs.iter().zip(coeffs) {
                acc += v[off + j] * c;
            }
            *x = acc;
        }
    };
    if len < PAR_MIN {
        out.chunks_mut(CHUNK).enumerate().for_each(body);
    } else {
        out.par_chunks_mut(CHUNK).enumerate().for_each(body);
    }
    out
}
