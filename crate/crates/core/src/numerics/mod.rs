//! Dense complex linear algebra for small operators.
//!
//! Matrices are row-major and never larger than a few thousand rows. All
//! routines are deterministic.

mod eigen;
pub mod random;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

pub use num_complex::Complex64 as C64;

pub use eigen::{eigh, eigvalsh, hermitian_fn, simultaneous_diagonalize, singular_values, sqrt_psd, Eigh};

use crate::error::{Error, Result};

/// Max-entry tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// e^{i phi}
#[inline]
pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>9.5}{:+.5}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_vec(n, m, rows.concat())
    }

    /// Convenience for literal real matrices.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        Self::from_fn(n, m, |i, j| r(rows[i][j]))
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::diag(&d.iter().map(|&x| r(x)).collect::<Vec<_>>())
    }

    /// |a⟩⟨b|
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn projector(v: &[C64]) -> Self {
        Self::outer(v, v)
    }

    /// |i⟩⟨j| in dimension d.
    pub fn unit(d: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    pub fn column(v: &[C64]) -> Self {
        CMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, k: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn scale_re(&self, k: f64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * k).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn try_matmul(&self, other: &CMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.matmul(other))
    }

    pub fn mat_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mat_vec dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// A X A†
    pub fn conjugate_by(&self, x: &CMatrix) -> Self {
        self.matmul(x).matmul(&self.adjoint())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// (M + M†)/2
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn commutator(&self, other: &CMatrix) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }

    /// Hilbert-Schmidt inner product tr(A† B).
    pub fn hs_inner(&self, other: &CMatrix) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k, j * cb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape mismatch");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self.scale_re(-1.0)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

pub fn tensor_all(ms: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for m in ms {
        out = out.kron(m);
    }
    out
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// ⟨a|b⟩
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn basis_vec(d: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d];
    v[i] = ONE;
    v
}

/// Tensor factorization of a Hilbert space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemShape {
    factor_dims: Vec<usize>,
}

impl SystemShape {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!("bad factor dims {:?}", factor_dims)));
        }
        Ok(SystemShape { factor_dims })
    }

    pub fn single(d: usize) -> Self {
        SystemShape { factor_dims: vec![d.max(1)] }
    }

    pub fn pair(a: usize, b: usize) -> Self {
        SystemShape { factor_dims: vec![a.max(1), b.max(1)] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn len(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factor_dims.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    fn strides(&self) -> Vec<usize> {
        let n = self.factor_dims.len();
        let mut s = vec![1; n];
        for k in (0..n.saturating_sub(1)).rev() {
            s[k] = s[k + 1] * self.factor_dims[k + 1];
        }
        s
    }

    fn check(&self, m: &CMatrix) -> Result<usize> {
        let n = m.require_square()?;
        if n != self.dim() {
            return Err(Error::ShapeMismatch { dims: self.factor_dims.clone(), dim: n });
        }
        Ok(n)
    }

    /// Offsets of every multi-index over the listed factors.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut out = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(out.len() * self.factor_dims[f]);
            for &o in &out {
                for digit in 0..self.factor_dims[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            out = next;
        }
        out
    }
}

/// Reduced matrix on a single kept factor.
pub fn partial_trace(m: &CMatrix, shape: &SystemShape, keep: usize) -> Result<CMatrix> {
    partial_trace_keep(m, shape, &[keep])
}

/// Reduced matrix on the listed factors (in the listed order).
pub fn partial_trace_keep(m: &CMatrix, shape: &SystemShape, keep: &[usize]) -> Result<CMatrix> {
    shape.check(m)?;
    let mut seen = vec![false; shape.len()];
    for &k in keep {
        if k >= shape.len() || seen[k] {
            return Err(Error::InvalidArgument(format!("bad subsystem list {:?}", keep)));
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..shape.len()).filter(|k| !seen[*k]).collect();
    let ko = shape.offsets(keep);
    let to = shape.offsets(&traced);
    let n = ko.len();
    let mut out = CMatrix::zeros(n, n);
    for (a, &oa) in ko.iter().enumerate() {
        for (b, &ob) in ko.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &to {
                acc += m[(oa + t, ob + t)];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Traces out one factor, keeping the others in order.
pub fn trace_out(m: &CMatrix, shape: &SystemShape, factor: usize) -> Result<CMatrix> {
    let keep: Vec<usize> = (0..shape.len()).filter(|&k| k != factor).collect();
    partial_trace_keep(m, shape, &keep)
}

/// Transpose on one factor only.
pub fn partial_transpose(m: &CMatrix, shape: &SystemShape, on: usize) -> Result<CMatrix> {
    let n = shape.check(m)?;
    if on >= shape.len() {
        return Err(Error::InvalidArgument(format!("subsystem {} out of range", on)));
    }
    let stride = shape.strides()[on];
    let d = shape.dims()[on];
    let digit = |idx: usize| (idx / stride) % d;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let (di, dj) = (digit(i), digit(j));
        let i2 = i - di * stride + dj * stride;
        let j2 = j - dj * stride + di * stride;
        m[(i2, j2)]
    }))
}

/// Reorders tensor factors: factor k of the result is factor `perm[k]` of the input.
pub fn permute_subsystems(m: &CMatrix, shape: &SystemShape, perm: &[usize]) -> Result<CMatrix> {
    let n = shape.check(m)?;
    let map = permutation_index_map(shape, perm)?;
    Ok(CMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

pub fn permute_vector(v: &[C64], shape: &SystemShape, perm: &[usize]) -> Result<Vec<C64>> {
    if v.len() != shape.dim() {
        return Err(Error::ShapeMismatch { dims: shape.dims().to_vec(), dim: v.len() });
    }
    let map = permutation_index_map(shape, perm)?;
    Ok(map.iter().map(|&k| v[k]).collect())
}

/// For each index of the permuted space, the index of the original space.
fn permutation_index_map(shape: &SystemShape, perm: &[usize]) -> Result<Vec<usize>> {
    let k = shape.len();
    let mut seen = vec![false; k];
    if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidArgument(format!("{:?} is not a permutation of {} factors", perm, k)));
    }
    let new_shape = SystemShape { factor_dims: perm.iter().map(|&p| shape.dims()[p]).collect() };
    let new_strides = new_shape.strides();
    let old_strides = shape.strides();
    let n = shape.dim();
    let mut map = vec![0; n];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut old = 0;
        for (pos, &p) in perm.iter().enumerate() {
            let digit = (idx / new_strides[pos]) % new_shape.factor_dims[pos];
            old += digit * old_strides[p];
        }
        *slot = old;
    }
    Ok(map)
}

/// Sum of singular values; eigenvalue moduli when the input is Hermitian.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    m.require_square()?;
    if m.is_hermitian(HERMITIAN_TOL) {
        Ok(eigvalsh(&m.hermitian_part())?.iter().map(|x| x.abs()).sum())
    } else {
        Ok(singular_values(m)?.iter().sum())
    }
}

/// Checks unit trace, Hermiticity and positivity within `tol`.
pub fn check_density(m: &CMatrix, tol: f64) -> Result<()> {
    m.require_square()?;
    let h = m.hermiticity_residual();
    if h > tol.max(HERMITIAN_TOL) {
        return Err(Error::NotDensity(format!("hermiticity residual {:.3e}", h)));
    }
    let t = m.trace();
    if (t - ONE).norm() > tol {
        return Err(Error::NotDensity(format!("trace {:.12}", t.re)));
    }
    let min = eigvalsh(&m.hermitian_part())?[0];
    if min < -tol {
        return Err(Error::NotDensity(format!("eigenvalue {:.3e}", min)));
    }
    Ok(())
}

/// |Φ_d⟩ = Σ|ii⟩/√d
pub fn max_entangled(d: usize) -> Vec<C64> {
    let mut v = vec![ZERO; d * d];
    let a = r(1.0 / (d as f64).sqrt());
    for i in 0..d {
        v[i * d + i] = a;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::random::{random_density, random_hermitian, random_unitary};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tensor_identities() {
        assert_eq!(tensor(&CMatrix::identity(2), &CMatrix::identity(2)), CMatrix::identity(4));
        let z = CMatrix::diag_real(&[1.0, -1.0]);
        assert_eq!(tensor(&z, &z), CMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(&mut rng, 3);
        let p = CMatrix::unit(2, 1, 1);
        assert!((tensor(&p, &rho).trace() - ONE).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_phi_is_mixed() {
        for d in 2..5 {
            let phi = CMatrix::projector(&max_entangled(d));
            let red = partial_trace(&phi, &SystemShape::pair(d, d), 0).unwrap();
            assert!(red.max_abs_diff(&CMatrix::identity(d).scale_re(1.0 / d as f64)) < 1e-14);
        }
    }

    #[test]
    fn partial_trace_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(&mut rng, 4);
        let fast = partial_trace(&rho, &SystemShape::pair(2, 2), 0).unwrap();
        let mut slow = CMatrix::zeros(2, 2);
        for a in 0..2 {
            for b in 0..2 {
                for t in 0..2 {
                    slow[(a, b)] += rho[(a * 2 + t, b * 2 + t)];
                }
            }
        }
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }

    #[test]
    fn partial_trace_three_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let cc = random_density(&mut rng, 2);
        let abc = tensor_all(&[a.clone(), b.clone(), cc.clone()]);
        let shape = SystemShape::new(vec![2, 3, 2]).unwrap();
        assert!(partial_trace(&abc, &shape, 1).unwrap().max_abs_diff(&b) < 1e-12);
        let ac = partial_trace_keep(&abc, &shape, &[2, 0]).unwrap();
        assert!(ac.max_abs_diff(&tensor(&cc, &a)) < 1e-12);
        assert!(trace_out(&abc, &shape, 1).unwrap().max_abs_diff(&tensor(&a, &cc)) < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let m = CMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &SystemShape::pair(2, 3), 0),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(trace_norm(&CMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn partial_transpose_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shape = SystemShape::pair(2, 3);
        let rho = random_density(&mut rng, 6);
        let twice = partial_transpose(&partial_transpose(&rho, &shape, 1).unwrap(), &shape, 1).unwrap();
        assert_eq!(twice, rho);
        let prod = tensor(&random_density(&mut rng, 2), &random_density(&mut rng, 3));
        let pt = partial_transpose(&prod, &shape, 0).unwrap();
        assert!(eigvalsh(&pt).unwrap()[0] > -1e-12);
        let phi = CMatrix::projector(&max_entangled(2));
        let ev = eigvalsh(&partial_transpose(&phi, &SystemShape::pair(2, 2), 1).unwrap()).unwrap();
        for (x, y) in ev.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_swaps_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 3);
        let ab = tensor(&a, &b);
        let ba = permute_subsystems(&ab, &SystemShape::pair(2, 3), &[1, 0]).unwrap();
        assert!(ba.max_abs_diff(&tensor(&b, &a)) < 1e-14);
        let u = random::random_state(&mut rng, 2);
        let v = random::random_state(&mut rng, 3);
        let vu = permute_vector(&kron_vec(&u, &v), &SystemShape::pair(2, 3), &[1, 0]).unwrap();
        assert!(vu.iter().zip(kron_vec(&v, &u)).all(|(x, y)| (x - y).norm() < 1e-14));
    }

    #[test]
    fn trace_norm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(&mut rng, 3);
        assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(trace_norm(&(&rho - &rho)).unwrap().abs() < 1e-15);
        // non-Hermitian: nilpotent Jordan block has one singular value 1
        let j = CMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!((trace_norm(&j).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_dominates_trace_on_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 0..100 {
            let h = random_hermitian(&mut rng, 2 + k % 5);
            assert!(trace_norm(&h).unwrap() + 1e-12 >= h.trace().norm());
        }
    }

    #[test]
    fn trace_norm_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for d in 2..7 {
            let h = random_hermitian(&mut rng, d);
            let u = random_unitary(&mut rng, d);
            let a = trace_norm(&h).unwrap();
            let b = trace_norm(&u.conjugate_by(&h)).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    proptest! {
        #[test]
        fn product_rule(seed in 0u64..10_000, da in 1usize..4, db in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_hermitian(&mut rng, da);
            let b = random_hermitian(&mut rng, db);
            let red = partial_trace(&tensor(&a, &b), &SystemShape::pair(da, db), 0).unwrap();
            prop_assert!(red.max_abs_diff(&a.scale(b.trace())) < 1e-12);
        }

        #[test]
        fn adjoint_of_product(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_unitary(&mut rng, 3);
            let b = random_hermitian(&mut rng, 3);
            let lhs = a.matmul(&b).adjoint();
            let rhs = b.adjoint().matmul(&a.adjoint());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        }
    }
}
