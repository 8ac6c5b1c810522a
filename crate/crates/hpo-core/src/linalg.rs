//! Dense complex matrices and the small decompositions the crate needs.
//!
//! Everything here is sized for desk-scale problems (a few hundred rows);
//! the eigensolver is a cyclic Jacobi iteration for Hermitian matrices,
//! which is slow but simple and accurate at these sizes.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex;

use crate::{C64, HpoError, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, z: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * z).collect() }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Matrix product, ikj loop order.
    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let mut out = CMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        self[(i, j)] = z;
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.sub(&self.adjoint()).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square()
            && self.adjoint().mul(self).sub(&CMat::identity(self.rows)).max_abs() <= tol
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigendecomposition of a Hermitian matrix: `a == v * diag(values) * v†`
/// with orthonormal columns in `v`, eigenvalues ascending.
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

/// Cyclic complex Jacobi iteration.
///
/// Errors if `a` is not square or not Hermitian to `1e-10` (relative to
/// its largest entry).
pub fn hermitian_eig(a: &CMat) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(HpoError::Precondition("eigendecomposition requires a square matrix".into()));
    }
    let scale = a.max_abs().max(1.0);
    if !a.is_hermitian(1e-10 * scale) {
        return Err(HpoError::Precondition("matrix is not Hermitian".into()));
    }
    let n = a.rows();
    let mut h = a.clone();
    // Symmetrize exactly so rounding in the input cannot bias the sweep.
    for i in 0..n {
        for j in 0..n {
            let avg = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            h[(i, j)] = avg;
            h[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);

    let tol = 1e-15 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(h[(p, q)].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = h[(p, q)];
                let m = hpq.norm();
                if m <= tol {
                    continue;
                }
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let phase = hpq / m; // e^{i arg h_pq}
                let w = phase.conj();
                // Rotation angle for the phase-stripped real 2x2
                // [[app, m], [m, aqq]].
                let theta = 0.5 * libm::atan2(2.0 * m, app - aqq);
                let c = libm::cos(theta);
                let s = libm::sin(theta);
                // G acts on the (p,q) column pair as
                //   [c, -s; s*w, c*w]  (unitary; absorbs the phase into q),
                // and the pivot entry of G†HG vanishes exactly.
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * c + hiq * (w * s);
                    h[(i, q)] = hiq * (w * c) - hip * s;
                }
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = hpj * c + hqj * (phase * s);
                    h[(q, j)] = hqj * (phase * c) - hpj * s;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * (w * s);
                    v[(i, q)] = viq * (w * c) - vip * s;
                }
            }
        }
    }

    // Sort ascending by eigenvalue, permuting eigenvector columns.
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// `f`-calculus of a Hermitian matrix: `v * diag(f(values)) * v†`.
pub fn hermitian_func(a: &CMat, mut f: impl FnMut(f64) -> C64) -> Result<CMat> {
    let eig = hermitian_eig(a)?;
    let n = a.rows();
    let mut scaled = eig.vectors.clone();
    for j in 0..n {
        let fj = f(eig.values[j]);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    Ok(scaled.mul(&eig.vectors.adjoint()))
}

/// `exp(z * A)` for Hermitian `A` and complex scalar `z`.
pub fn expm_hermitian(a: &CMat, z: C64) -> Result<CMat> {
    hermitian_func(a, |lambda| (z * lambda).exp())
}

/// Complex dot products on plain vectors.
pub fn vdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}
