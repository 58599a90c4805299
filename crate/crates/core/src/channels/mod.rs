//! Kraus and Choi representations, CPTP validation and the channel families.
//!
//! Choi convention: `Ch(Λ) = Σ_ij Λ(|i⟩⟨j|) ⊗ |i⟩⟨j|`, so the output factor
//! comes first and the input factor second.

mod families;

pub use families::*;

use crate::error::{Error, Result};
use crate::numerics::{
    eigh, eigvalsh, partial_trace, permute_subsystems, CMatrix, SystemShape, C64, ONE, ZERO,
};

/// Default tolerance for validation checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kraus: Vec<CMatrix>,
    din: usize,
    dout: usize,
}

impl KrausChannel {
    /// Wraps a Kraus list. Trace preservation is checked by [`validate_cptp`].
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (dout, din) = (first.rows(), first.cols());
        if kraus.iter().any(|k| k.rows() != dout || k.cols() != din) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        Ok(KrausChannel { kraus, din, dout })
    }

    pub fn identity(d: usize) -> Self {
        KrausChannel { kraus: vec![CMatrix::identity(d)], din: d, dout: d }
    }

    /// Υ_U(ρ) = U ρ U†
    pub fn unitary(u: &CMatrix) -> Result<Self> {
        let res = u.unitarity_residual();
        if res > 1e-9 {
            return Err(Error::NotUnitary(format!("residual {:.3e}", res)));
        }
        Self::new(vec![u.clone()])
    }

    /// Totally mixing channel ρ ↦ tr(ρ) I/d.
    pub fn mixing(d: usize) -> Self {
        let a = 1.0 / (d as f64).sqrt();
        let kraus = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| CMatrix::unit(d, i, j).scale_re(a))
            .collect();
        KrausChannel { kraus, din: d, dout: d }
    }

    /// Kraus form of a PSD Choi matrix; eigenvalues below `tol` are dropped.
    pub fn from_choi(choi: &ChoiMatrix, tol: f64) -> Result<Self> {
        let e = eigh(&choi.matrix)?;
        if e.values[0] < -tol {
            return Err(Error::Constraint(format!(
                "Choi matrix is not positive semidefinite (min eigenvalue {:.3e})",
                e.values[0]
            )));
        }
        let (din, dout) = (choi.din, choi.dout);
        let mut kraus = Vec::new();
        for (k, &lam) in e.values.iter().enumerate().rev() {
            if lam <= tol {
                continue;
            }
            let s = lam.sqrt();
            let v = e.vector(k);
            kraus.push(CMatrix::from_fn(dout, din, |o, i| v[o * din + i] * s));
        }
        if kraus.is_empty() {
            return Err(Error::Constraint("Choi matrix is zero".into()));
        }
        Ok(KrausChannel { kraus, din, dout })
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.din || rho.cols() != self.din {
            return Err(Error::DimensionMismatch(format!(
                "channel input dimension {} vs operand {}x{}",
                self.din,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out = &out + &k.conjugate_by(rho);
        }
        Ok(out)
    }

    /// Applies the channel to one tensor factor; returns the new matrix and shape.
    pub fn apply_on(&self, rho: &CMatrix, shape: &SystemShape, factor: usize) -> Result<(CMatrix, SystemShape)> {
        let dims = shape.dims();
        if factor >= dims.len() || dims[factor] != self.din {
            return Err(Error::DimensionMismatch(format!(
                "factor {} of {:?} does not have dimension {}",
                factor, dims, self.din
            )));
        }
        let n = rho.require_square()?;
        if n != shape.dim() {
            return Err(Error::ShapeMismatch { dims: dims.to_vec(), dim: n });
        }
        let mut perm = vec![factor];
        perm.extend((0..dims.len()).filter(|&k| k != factor));
        let front = if factor == 0 { rho.clone() } else { permute_subsystems(rho, shape, &perm)? };
        let rest = n / self.din;
        let mut out = CMatrix::zeros(self.dout * rest, self.dout * rest);
        for k in &self.kraus {
            let left = left_kron_identity(k, &front, rest);
            let both = left_kron_identity(k, &left.adjoint(), rest).adjoint();
            out = &out + &both;
        }
        let mut new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        new_dims[0] = self.dout;
        let new_shape_front = SystemShape::new(new_dims)?;
        let mut out_dims = dims.to_vec();
        out_dims[factor] = self.dout;
        let out_shape = SystemShape::new(out_dims)?;
        if factor == 0 {
            return Ok((out, out_shape));
        }
        let mut inv = vec![0; perm.len()];
        for (pos, &p) in perm.iter().enumerate() {
            inv[p] = pos;
        }
        Ok((permute_subsystems(&out, &new_shape_front, &inv)?, out_shape))
    }

    /// `after ∘ self`
    pub fn then(&self, after: &KrausChannel) -> Result<KrausChannel> {
        if after.din != self.dout {
            return Err(Error::DimensionMismatch("composition".into()));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * after.kraus.len());
        for b in &after.kraus {
            for a in &self.kraus {
                kraus.push(b.matmul(a));
            }
        }
        KrausChannel::new(kraus)
    }

    /// Λ ⊗ Λ′ acting on the product space.
    pub fn tensor(&self, other: &KrausChannel) -> KrausChannel {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        KrausChannel { kraus, din: self.din * other.din, dout: self.dout * other.dout }
    }

    /// Σ K†K
    pub fn kraus_sum(&self) -> CMatrix {
        let mut s = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            s = &s + &k.adjoint().matmul(k);
        }
        s
    }
}

/// (K ⊗ I_rest) M for M with K.cols()·rest rows.
fn left_kron_identity(k: &CMatrix, m: &CMatrix, rest: usize) -> CMatrix {
    let (dout, din) = (k.rows(), k.cols());
    let cols = m.cols();
    let mut out = CMatrix::zeros(dout * rest, cols);
    for o in 0..dout {
        for i in 0..din {
            let kv = k[(o, i)];
            if kv == ZERO {
                continue;
            }
            for a in 0..rest {
                let src = m.row(i * rest + a);
                for (c, s) in src.iter().enumerate() {
                    out[(o * rest + a, c)] += kv * s;
                }
            }
        }
    }
    out
}

/// (Λ ⊗ I)(ρ) with Λ acting on the first factor of `shape`.
pub fn apply_extended(ch: &KrausChannel, rho: &CMatrix, shape: &SystemShape) -> Result<CMatrix> {
    Ok(ch.apply_on(rho, shape, 0)?.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: CMatrix,
    pub din: usize,
    pub dout: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: CMatrix, din: usize, dout: usize) -> Result<Self> {
        let n = matrix.require_square()?;
        if n != din * dout {
            return Err(Error::DimensionMismatch(format!("Choi dimension {} vs {}·{}", n, dout, din)));
        }
        Ok(ChoiMatrix { matrix, din, dout })
    }

    pub fn shape(&self) -> SystemShape {
        SystemShape::pair(self.dout, self.din)
    }

    /// Γ(ρ)[o,o′] = Σ_ij ρ_ij W[(o,i),(o′,j)]
    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.din || rho.cols() != self.din {
            return Err(Error::DimensionMismatch("Choi map input".into()));
        }
        let (din, dout) = (self.din, self.dout);
        Ok(CMatrix::from_fn(dout, dout, |o, p| {
            let mut acc = ZERO;
            for i in 0..din {
                for j in 0..din {
                    acc += rho[(i, j)] * self.matrix[(o * din + i, p * din + j)];
                }
            }
            acc
        }))
    }

    /// tr_out W, equal to I_din for trace-preserving maps.
    pub fn input_marginal(&self) -> CMatrix {
        partial_trace(&self.matrix, &self.shape(), 1).expect("consistent shape")
    }
}

pub fn choi_of(ch: &KrausChannel) -> ChoiMatrix {
    let d = ch.din;
    let mut unnorm = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            unnorm[(i * d + i, j * d + j)] = ONE;
        }
    }
    let w = apply_extended(ch, &unnorm, &SystemShape::pair(d, d)).expect("consistent shape");
    ChoiMatrix { matrix: w, din: ch.din, dout: ch.dout }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CptpReport {
    pub trace_preserving: bool,
    pub cp: bool,
    pub min_choi_eig: f64,
    pub tp_residual: f64,
}

impl CptpReport {
    pub fn valid(&self) -> bool {
        self.trace_preserving && self.cp
    }
}

pub fn validate_cptp(ch: &KrausChannel, tol: f64) -> CptpReport {
    let tp_residual = ch.kraus_sum().max_abs_diff(&CMatrix::identity(ch.din));
    let min_choi_eig = eigvalsh(&choi_of(ch).matrix).map(|v| v[0]).unwrap_or(f64::NAN);
    CptpReport { trace_preserving: tp_residual <= tol, cp: min_choi_eig >= -tol, min_choi_eig, tp_residual }
}

/// Same checks on a bare Choi matrix, for maps that need not be CP.
pub fn validate_choi(choi: &ChoiMatrix, tol: f64) -> CptpReport {
    let tp_residual = choi.input_marginal().max_abs_diff(&CMatrix::identity(choi.din));
    let min_choi_eig = eigvalsh(&choi.matrix.hermitian_part()).map(|v| v[0]).unwrap_or(f64::NAN);
    CptpReport { trace_preserving: tp_residual <= tol, cp: min_choi_eig >= -tol, min_choi_eig, tp_residual }
}

/// Cyclic shift X_d|k⟩ = |k−1 mod d⟩ and clock Z_d|k⟩ = e^{2πik/d}|k⟩ (0-based).
pub fn gen_pauli(d: usize) -> Result<(CMatrix, CMatrix)> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("generalized Pauli needs d >= 2, got {}", d)));
    }
    let x = CMatrix::from_fn(d, d, |i, j| if (i + 1) % d == j { ONE } else { ZERO });
    let z = CMatrix::diag(&(0..d).map(|k| omega_pow(d, k as i64)).collect::<Vec<_>>());
    Ok((x, z))
}

/// e^{2πi k/d}
pub fn omega_pow(d: usize, k: i64) -> C64 {
    let m = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * m / d as f64)
}

/// X_d^j Z_d^k
pub fn weyl(d: usize, j: usize, k: usize) -> CMatrix {
    let (x, z) = gen_pauli(d).expect("d >= 2");
    x.pow(j % d).matmul(&z.pow(k % d))
}

/// All d² Weyl operators, index j·d + k.
pub fn weyl_set(d: usize) -> Vec<CMatrix> {
    (0..d).flat_map(|j| (0..d).map(move |k| weyl(d, j, k))).collect()
}

/// (X^j Z^k ⊗ I)|Φ_d⟩
pub fn bell_vector(d: usize, j: usize, k: usize) -> Vec<C64> {
    weyl(d, j, k).kron(&CMatrix::identity(d)).mat_vec(&crate::numerics::max_entangled(d))
}

/// Weights ⟨Φ_jk|W|Φ_jk⟩/d of a Choi matrix in the Weyl-Bell basis.
pub fn bell_weights(choi: &ChoiMatrix) -> Result<Vec<f64>> {
    let d = choi.din;
    if choi.dout != d {
        return Err(Error::DimensionMismatch("Bell weights need din = dout".into()));
    }
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for k in 0..d {
            let v = bell_vector(d, j, k);
            let wv = choi.matrix.mat_vec(&v);
            out.push(crate::numerics::inner(&v, &wv).re / d as f64);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    pub elements: Vec<CMatrix>,
    pub labels: Vec<String>,
}

impl Povm {
    /// Validates completeness and positivity within `tol`.
    pub fn new(elements: Vec<CMatrix>, tol: f64) -> Result<Self> {
        let labels = (0..elements.len()).map(|i| i.to_string()).collect();
        Self::with_labels(elements, labels, tol)
    }

    pub fn with_labels(elements: Vec<CMatrix>, labels: Vec<String>, tol: f64) -> Result<Self> {
        let first = elements.first().ok_or_else(|| Error::InvalidArgument("empty POVM".into()))?;
        let d = first.require_square()?;
        if labels.len() != elements.len() {
            return Err(Error::InvalidArgument("POVM label count".into()));
        }
        let mut sum = CMatrix::zeros(d, d);
        for (idx, m) in elements.iter().enumerate() {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch("POVM elements differ in shape".into()));
            }
            if !m.is_hermitian(tol.max(1e-10)) {
                return Err(Error::Constraint(format!("POVM element {} is not Hermitian", idx)));
            }
            let min = eigvalsh(&m.hermitian_part())?[0];
            if min < -tol {
                return Err(Error::Constraint(format!(
                    "POVM element {} is not positive (eigenvalue {:.3e})",
                    idx, min
                )));
            }
            sum = &sum + m;
        }
        let res = sum.max_abs_diff(&CMatrix::identity(d));
        if res > tol {
            return Err(Error::Constraint(format!("POVM completeness: |Σ M - I| = {:.3e}", res)));
        }
        Ok(Povm { elements, labels })
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// tr(ρ M(i)) for each outcome.
    pub fn probabilities(&self, rho: &CMatrix) -> Vec<f64> {
        self.elements.iter().map(|m| rho.adjoint().hs_inner(m).re).collect()
    }

    /// Measure-and-prepare channel ρ ↦ Σ tr(ρM(i)) |i⟩⟨i|.
    pub fn channel(&self) -> Result<KrausChannel> {
        let d = self.dim();
        let m = self.len();
        let mut kraus = Vec::new();
        for (i, e) in self.elements.iter().enumerate() {
            let root = crate::numerics::sqrt_psd(e)?;
            for a in 0..d {
                let mut k = CMatrix::zeros(m, d);
                for col in 0..d {
                    k[(i, col)] = root[(a, col)];
                }
                if k.max_abs() > 0.0 {
                    kraus.push(k);
                }
            }
        }
        KrausChannel::new(kraus)
    }
}

pub fn is_unital(ch: &KrausChannel, tol: f64) -> Result<bool> {
    Ok(unitality_residual(ch)? <= tol)
}

pub fn unitality_residual(ch: &KrausChannel) -> Result<f64> {
    if ch.din != ch.dout {
        return Err(Error::DimensionMismatch(format!("unitality needs din = dout ({} vs {})", ch.din, ch.dout)));
    }
    Ok(ch.apply(&CMatrix::identity(ch.din))?.max_abs_diff(&CMatrix::identity(ch.din)))
}

/// Largest residual of Λ∘Υ_U − Υ_V∘Λ over members and group elements, measured
/// on Choi matrices. With `contravariant` the right side uses V̄.
pub fn covariance_residual(fam: &ChannelFamily, group: &[(CMatrix, CMatrix)], contravariant: bool) -> Result<f64> {
    let (din, dout) = (fam.din(), fam.dout());
    for (u, v) in group {
        if u.rows() != din || v.rows() != dout {
            return Err(Error::DimensionMismatch("group element dimensions".into()));
        }
        for w in [u, v] {
            let res = w.unitarity_residual();
            if res > 1e-9 {
                return Err(Error::NotUnitary(format!("group element residual {:.3e}", res)));
            }
        }
    }
    let mut worst: f64 = 0.0;
    for m in fam.members() {
        for (u, v) in group {
            let vv = if contravariant { v.conj() } else { v.clone() };
            let lhs = choi_of(&KrausChannel::unitary(u)?.then(&m.channel)?);
            let rhs = choi_of(&m.channel.then(&KrausChannel::unitary(&vv)?)?);
            worst = worst.max(lhs.matrix.max_abs_diff(&rhs.matrix));
        }
    }
    Ok(worst)
}

pub fn is_covariant(fam: &ChannelFamily, group: &[(CMatrix, CMatrix)], tol: f64, contravariant: bool) -> Result<bool> {
    Ok(covariance_residual(fam, group, contravariant)? <= tol)
}

/// The finite group G_d as (U_g, V_g) = (g, g) pairs; global phases are dropped
/// since they act trivially by conjugation.
pub fn weyl_group_pairs(d: usize) -> Vec<(CMatrix, CMatrix)> {
    weyl_set(d).into_iter().map(|w| (w.clone(), w)).collect()
}
