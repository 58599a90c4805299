//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::{CMatrix, C64, HERMITIAN_TOL, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.col(k)
    }

    /// V diag(f(λ)) V†
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        CMatrix::from_fn(n, n, |i, j| (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum())
    }
}

pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    let n = m.require_square()?;
    let res = m.hermiticity_residual();
    if res > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::InvalidArgument(format!("matrix is not Hermitian (residual {:.3e})", res)));
    }
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.frobenius();
    if n == 1 || scale == 0.0 {
        return Ok(finish(a, v));
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            return Ok(finish(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    Err(Error::NoConvergence)
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < 1e-300 {
        return;
    }
    let n = a.rows();
    let phase = apq / mag;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    // J = D P with D = diag(.., e^{-i phi} at q, ..), P the real Jacobi rotation.
    let jpp = C64::new(cs, 0.0);
    let jpq = C64::new(sn, 0.0);
    let jqp = -phase.conj() * sn;
    let jqq = phase.conj() * cs;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * jpp + aiq * jqp;
        a[(i, q)] = aip * jpq + aiq * jqq;
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * jpp + viq * jqp;
        v[(i, q)] = vip * jpq + viq * jqq;
    }
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = jpp.conj() * apj + jqp.conj() * aqj;
        a[(q, j)] = jpq.conj() * apj + jqq.conj() * aqj;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

fn finish(a: CMatrix, v: CMatrix) -> Eigh {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Eigh { values, vectors }
}

pub fn eigvalsh(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

/// f applied to a Hermitian matrix through its spectrum.
pub fn hermitian_fn(m: &CMatrix, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
    Ok(eigh(m)?.reconstruct_with(f))
}

/// Square root of a positive semidefinite matrix; small negative eigenvalues are clipped.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    hermitian_fn(m, |x| x.max(0.0).sqrt())
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let g = if m.rows() >= m.cols() { m.adjoint().matmul(m) } else { m.matmul(&m.adjoint()) };
    let mut s: Vec<f64> = eigvalsh(&g.hermitian_part())?.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    s.reverse();
    Ok(s)
}

/// Unitary whose columns diagonalize two commuting Hermitian matrices.
///
/// `a` is diagonalized first; inside each cluster of eigenvalues closer than
/// `tol` the compression of `b` is diagonalized.
pub fn simultaneous_diagonalize(a: &CMatrix, b: &CMatrix, tol: f64) -> Result<CMatrix> {
    let n = a.require_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch("simultaneous diagonalization".into()));
    }
    let ea = eigh(a)?;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && ea.values[end] - ea.values[end - 1] <= tol {
            end += 1;
        }
        let basis: Vec<Vec<C64>> = (start..end).map(|k| ea.vector(k)).collect();
        if basis.len() == 1 {
            cols.push(basis[0].clone());
        } else {
            let k = basis.len();
            let bv: Vec<Vec<C64>> = basis.iter().map(|x| b.mat_vec(x)).collect();
            let comp = CMatrix::from_fn(k, k, |i, j| super::inner(&basis[i], &bv[j])).hermitian_part();
            let ec = eigh(&comp)?;
            for t in 0..k {
                let w = ec.vector(t);
                let mut col = vec![ZERO; n];
                for (coef, bvec) in w.iter().zip(&basis) {
                    for (x, y) in col.iter_mut().zip(bvec) {
                        *x += coef * y;
                    }
                }
                cols.push(col);
            }
        }
        start = end;
    }
    Ok(CMatrix::from_fn(n, n, |i, j| cols[j][i]))
}
