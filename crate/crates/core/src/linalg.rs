//! Dense matrix helpers shared by the algebra and geometry modules.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn max_abs<T: ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.clone().modulus()))
}

pub fn max_abs_slice(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Block-diagonal embedding of `m` into the top-left corner of a `size x size` zero matrix.
pub fn embed(m: &CMatrix, size: usize) -> CMatrix {
    let mut out = CMatrix::zeros(size, size);
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled until its 1-norm is at most 1/2; the series is then
/// summed until the next term falls below 1e-18 in 1-norm, which bounds the
/// neglected tail well under 1e-13 after squaring for the matrix sizes used here.
pub fn expm<T>(a: &DMatrix<T>) -> DMatrix<T>
where
    T: ComplexField<RealField = f64> + Copy,
{
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm = norm1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let scale = T::from_real(0.5_f64.powi(squarings as i32));
    let scaled = a * scale;

    let mut term = DMatrix::<T>::identity(n, n);
    let mut sum = DMatrix::<T>::identity(n, n);
    for k in 1..=80 {
        term = (&term * &scaled) * T::from_real(1.0 / k as f64);
        sum += &term;
        if norm1(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn norm1<T: ComplexField<RealField = f64> + Copy>(a: &DMatrix<T>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Modified Gram-Schmidt. Candidates whose residual norm falls below `tol`
/// are dropped; the returned vectors are orthonormal.
pub fn gram_schmidt(candidates: &[DVector<f64>], start: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = start.to_vec();
    let fixed = basis.len();
    for cand in candidates {
        let mut v = cand.clone();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&v);
                v -= b * p;
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / norm);
        }
    }
    basis.split_off(fixed)
}

/// Orthonormal basis of the null space of a real matrix, from the
/// eigen-decomposition of `m^T m`.
pub fn null_space(m: &RMatrix, tol: f64) -> Vec<DVector<f64>> {
    let gram = m.transpose() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let mut out = Vec::new();
    for (k, ev) in eig.eigenvalues.iter().enumerate() {
        if ev.abs() < tol {
            out.push(eig.eigenvectors.column(k).into_owned());
        }
    }
    out
}

/// Flip the sign of `v` so that its first entry with modulus above `tol` is positive.
pub fn fix_sign(v: &mut DVector<f64>, tol: f64) {
    if let Some(x) = v.iter().find(|x| x.abs() > tol) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

pub fn unit(dim: usize, k: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[k] = 1.0;
    v
}
