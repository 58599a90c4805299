//! Optimal input states and the measure-and-correct protocols that certify them.

use serde::Serialize;

use crate::channels::{
    apply_extended, covariance_residual, unitality_residual, ChannelFamily, FamilyKind, KrausChannel,
    MeasurementStructure, DEFAULT_TOL,
};
use crate::comparison::{commutes, default_grid, joint_spectrum, pair_check, ComparisonVerdict, Method, Relation};
use crate::error::{Error, Result};
use crate::numerics::{
    eigh, eigvalsh, max_entangled, partial_trace, simultaneous_diagonalize, sqrt_psd, trace_norm, vec_norm, CMatrix,
    SystemShape, C64, I, ZERO,
};

/// Dimensions d_μ of the irreducible blocks of H_in, in basis order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrrepBlocks {
    block_dims: Vec<usize>,
}

impl IrrepBlocks {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(Error::InvalidArgument("blocks must be a non-empty list of positive dimensions".into()));
        }
        Ok(IrrepBlocks { block_dims })
    }

    pub fn single(d: usize) -> Self {
        IrrepBlocks { block_dims: vec![d] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn total(&self) -> usize {
        self.block_dims.iter().sum()
    }

    /// Block dimension d_μ of the block containing basis index `i`.
    pub fn dim_of(&self, i: usize) -> usize {
        let mut start = 0;
        for &d in &self.block_dims {
            if i < start + d {
                return d;
            }
            start += d;
        }
        panic!("index {} outside blocks", i)
    }

    fn block_of(&self, i: usize) -> usize {
        let mut start = 0;
        for (k, &d) in self.block_dims.iter().enumerate() {
            if i < start + d {
                return k;
            }
            start += d;
        }
        usize::MAX
    }
}

/// Unit vector with a tensor-factor shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    pub amplitudes: Vec<C64>,
    pub shape: SystemShape,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, shape: SystemShape) -> Result<Self> {
        if amplitudes.len() != shape.dim() {
            return Err(Error::ShapeMismatch { dims: shape.dims().to_vec(), dim: amplitudes.len() });
        }
        let n = vec_norm(&amplitudes);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("state norm {} is not 1", n)));
        }
        Ok(PureState { amplitudes, shape })
    }

    /// Normalizes `amplitudes` first.
    pub fn normalized(amplitudes: Vec<C64>, shape: SystemShape) -> Result<Self> {
        let n = vec_norm(&amplitudes);
        if n == 0.0 {
            return Err(Error::InvalidArgument("zero vector".into()));
        }
        Self::new(amplitudes.iter().map(|a| a / n).collect(), shape)
    }

    pub fn phi(d: usize) -> Self {
        PureState { amplitudes: max_entangled(d), shape: SystemShape::pair(d, d) }
    }

    /// |i⟩|j⟩ on C^d ⊗ C^dr.
    pub fn basis_pair(d: usize, dr: usize, i: usize, j: usize) -> Result<Self> {
        if i >= d || j >= dr {
            return Err(Error::InvalidArgument(format!("basis index ({}, {}) out of range", i, j)));
        }
        let mut v = vec![ZERO; d * dr];
        v[i * dr + j] = C64::new(1.0, 0.0);
        Ok(PureState { amplitudes: v, shape: SystemShape::pair(d, dr) })
    }

    pub fn density(&self) -> CMatrix {
        CMatrix::projector(&self.amplitudes)
    }

    /// ρ_ψ = tr_R |ψ⟩⟨ψ| on the first factor.
    pub fn input_marginal(&self) -> CMatrix {
        partial_trace(&self.density(), &self.shape, 0).expect("consistent shape")
    }

    /// (Λ ⊗ I)(|ψ⟩⟨ψ|) with Λ on the first factor.
    pub fn output(&self, ch: &KrausChannel) -> Result<CMatrix> {
        apply_extended(ch, &self.density(), &self.shape)
    }

    pub fn outputs(&self, fam: &ChannelFamily) -> Result<Vec<CMatrix>> {
        fam.members().iter().map(|m| self.output(&m.channel)).collect()
    }
}

/// c ⊕_μ |Φ_{d_μ}⟩ on H_in ⊗ H_R with matching blocks on H_R.
pub fn covariant_optimal_state(blocks: &IrrepBlocks) -> PureState {
    let d = blocks.total();
    let c = 1.0 / (blocks.dims().len() as f64).sqrt();
    let mut v = vec![ZERO; d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(c / (blocks.dim_of(i) as f64).sqrt(), 0.0);
    }
    PureState { amplitudes: v, shape: SystemShape::pair(d, d) }
}

fn is_block_diagonal(u: &CMatrix, blocks: &IrrepBlocks) -> bool {
    let n = u.rows();
    (0..n).all(|i| (0..n).all(|j| blocks.block_of(i) == blocks.block_of(j) || u[(i, j)].norm() <= 1e-10))
}

/// Checks that {U_g} is closed under products up to a global phase.
pub fn group_closed(unitaries: &[CMatrix], tol: f64) -> bool {
    let same_ray = |a: &CMatrix, b: &CMatrix| {
        let n = a.rows() as f64;
        (b.adjoint().matmul(a).trace().norm() - n).abs() <= tol * n
    };
    unitaries.iter().all(|a| {
        unitaries.iter().all(|b| {
            let ab = a.matmul(b);
            unitaries.iter().any(|c| same_ray(&ab, c))
        })
    })
}

#[derive(Clone, Debug)]
pub struct ProtocolOutput {
    pub state: CMatrix,
    /// Probability that the finite measurement accepts, with its elements scaled to a sub-POVM.
    pub success_prob: f64,
}

/// Measure-and-correct map applied to ω = (Λ⊗I)(ψ_opt) on H_out ⊗ H_R.
///
/// Measures ⟨φ_g| on H_R ⊗ H_in′ of ω ⊗ τ, then applies V_g† (V_gᵀ when
/// `contravariant`) to H_out. Works on the output state only, so it never
/// looks at Λ.
pub fn group_correction(
    omega: &CMatrix,
    dout: usize,
    group: &[(CMatrix, CMatrix)],
    blocks: &IrrepBlocks,
    target: &CMatrix,
    contravariant: bool,
) -> Result<ProtocolOutput> {
    let din = blocks.total();
    if omega.rows() != dout * din {
        return Err(Error::DimensionMismatch(format!("ω has dimension {}, expected {}·{}", omega.rows(), dout, din)));
    }
    let nt = target.require_square()?;
    if nt % din != 0 {
        return Err(Error::DimensionMismatch(format!("target dimension {} is not a multiple of {}", nt, din)));
    }
    let dr = nt / din;
    let norm2: f64 = blocks.dims().iter().map(|&d| (d * d) as f64).sum();
    let mut total = CMatrix::zeros(dout * dr, dout * dr);
    let mut frame = CMatrix::zeros(din * din, din * din);
    for (u, v) in group {
        if u.rows() != din || v.rows() != dout {
            return Err(Error::DimensionMismatch("group element dimensions".into()));
        }
        if !is_block_diagonal(u, blocks) {
            return Err(Error::InvalidArgument("group element is not block diagonal for the given blocks".into()));
        }
        // conj(φ_g)[r,a] = √d_μ(a) U_g[r,a] / ‖φ_g‖
        let lmap = CMatrix::from_fn(din, din, |rr, a| u[(rr, a)] * ((blocks.dim_of(a) as f64) / norm2).sqrt());
        let phi: Vec<C64> = (0..din * din).map(|k| lmap[(k / din, k % din)].conj()).collect();
        frame = &frame + &CMatrix::projector(&phi);
        let big = lmap.kron(&CMatrix::identity(dr));
        let m = big.conjugate_by(target);
        let mut out = CMatrix::zeros(dout * dr, dout * dr);
        for o in 0..dout {
            for o2 in 0..dout {
                for rr in 0..din {
                    for r2 in 0..din {
                        let w = omega[(o * din + rr, o2 * din + r2)];
                        if w == ZERO {
                            continue;
                        }
                        for b in 0..dr {
                            for b2 in 0..dr {
                                out[(o * dr + b, o2 * dr + b2)] += w * m[(rr * dr + b, r2 * dr + b2)];
                            }
                        }
                    }
                }
            }
        }
        let corr = if contravariant { v.transpose() } else { v.adjoint() };
        total = &total + &corr.kron(&CMatrix::identity(dr)).conjugate_by(&out);
    }
    let t = total.trace().re;
    if t <= 1e-14 {
        return Err(Error::Constraint("measurement never accepts the supplied target".into()));
    }
    let lmax = eigvalsh(&frame.hermitian_part())?.last().copied().unwrap_or(1.0);
    Ok(ProtocolOutput { state: total.scale_re(1.0 / t).hermitian_part(), success_prob: t / lmax })
}

#[derive(Clone, Debug)]
pub struct MemberCertificate {
    pub label: String,
    pub state: CMatrix,
    pub expected: CMatrix,
    pub residual: f64,
    pub success_prob: f64,
}

/// Runs the group protocol for every member and compares with (Λθ ⊗ I)(target).
pub fn group_correction_protocol(
    fam: &ChannelFamily,
    group: &[(CMatrix, CMatrix)],
    blocks: &IrrepBlocks,
    target: &CMatrix,
    contravariant: bool,
) -> Result<Vec<MemberCertificate>> {
    if blocks.total() != fam.din() {
        return Err(Error::DimensionMismatch(format!("blocks sum to {}, family input is {}", blocks.total(), fam.din())));
    }
    let residual = covariance_residual(fam, group, contravariant)?;
    if residual > 1e-8 {
        return Err(Error::NotCovariant { residual });
    }
    let us: Vec<CMatrix> = group.iter().map(|(u, _)| u.clone()).collect();
    if !group_closed(&us, 1e-8) {
        return Err(Error::InvalidArgument("group is not closed under products".into()));
    }
    let psi = covariant_optimal_state(blocks);
    let dr = target.require_square()? / fam.din();
    let tshape = SystemShape::pair(fam.din(), dr);
    fam.members()
        .iter()
        .map(|m| {
            let omega = psi.output(&m.channel)?;
            let out = group_correction(&omega, fam.dout(), group, blocks, target, contravariant)?;
            let expected = apply_extended(&m.channel, target, &tshape)?;
            Ok(MemberCertificate {
                label: m.label.clone(),
                residual: out.state.max_abs_diff(&expected),
                state: out.state,
                expected,
                success_prob: out.success_prob,
            })
        })
        .collect()
}

/// Bell-basis sampling: measure ω on {(U_i⊗1)|Φ_d⟩}, then apply U_i ⊗ 1 to the target.
///
/// Requires tr U_i U_j† = d δ_ij; reproduces (Λ⊗I)(target) for gp and ou families.
pub fn weyl_sampling_protocol(omega: &CMatrix, unitaries: &[CMatrix], target: &CMatrix) -> Result<CMatrix> {
    crate::channels::check_orthogonal_unitaries(unitaries, 1e-9)?;
    let d = unitaries[0].rows();
    if omega.rows() != d * d {
        return Err(Error::DimensionMismatch("ω must live on C^d ⊗ C^d".into()));
    }
    let nt = target.require_square()?;
    if nt % d != 0 {
        return Err(Error::DimensionMismatch("target factor mismatch".into()));
    }
    let dr = nt / d;
    let phi = max_entangled(d);
    let mut out = CMatrix::zeros(nt, nt);
    for u in unitaries {
        let bell = u.kron(&CMatrix::identity(d)).mat_vec(&phi);
        let p = crate::numerics::inner(&bell, &omega.mat_vec(&bell)).re;
        out = &out + &u.kron(&CMatrix::identity(dr)).conjugate_by(target).scale_re(p);
    }
    Ok(out)
}

/// Y₂ = i Z₂ X₂
pub fn y2() -> CMatrix {
    let (x, z) = crate::channels::gen_pauli(2).expect("d = 2");
    z.matmul(&x).scale(I)
}

/// Γ_unot ⊗ Γ_unot(B) = conj((Y⊗Y) B (Y⊗Y)), a positive but not CP map.
pub fn unot_pair(b: &CMatrix) -> CMatrix {
    let yy = y2().kron(&y2());
    yy.conjugate_by(b).conj()
}

/// |φ_{p,V}⟩ = Σ √p_i V|i⟩ ⊗ |i⟩
pub fn phi_pv(p: (f64, f64), v: &CMatrix) -> PureState {
    let mut amp = vec![ZERO; 4];
    for (i, w) in [p.0, p.1].into_iter().enumerate() {
        for a in 0..2 {
            amp[a * 2 + i] += v[(a, i)] * w.sqrt();
        }
    }
    PureState { amplitudes: amp, shape: SystemShape::pair(2, 2) }
}

#[derive(Clone, Debug)]
pub struct UnitalBranches {
    pub accept: CMatrix,
    pub reject: CMatrix,
    pub accept_prob: f64,
    pub reject_prob: f64,
    pub state: CMatrix,
}

/// Rotate H_R by Vᵀ, apply the instrument {√M, √(1−M)} with M = diag(p₁, p₂),
/// and map the second branch through Γ_unot ⊗ Γ_unot.
pub fn unital_qubit_correction(omega: &CMatrix, p: (f64, f64), v: &CMatrix) -> Result<UnitalBranches> {
    if omega.rows() != 4 {
        return Err(Error::DimensionMismatch("unital protocol acts on qubit ⊗ qubit".into()));
    }
    if !(0.0..=1.0).contains(&p.0) || (p.0 + p.1 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("p = {:?} is not a probability vector", p)));
    }
    if v.unitarity_residual() > 1e-9 {
        return Err(Error::NotUnitary("V".into()));
    }
    let one = CMatrix::identity(2);
    let rotated = one.kron(&v.transpose()).conjugate_by(omega);
    let sm = CMatrix::diag_real(&[p.0.sqrt(), p.1.sqrt()]);
    let sn = CMatrix::diag_real(&[(1.0 - p.0).sqrt(), (1.0 - p.1).sqrt()]);
    let accept = one.kron(&sm).conjugate_by(&rotated);
    let reject_raw = one.kron(&sn).conjugate_by(&rotated);
    let reject = unot_pair(&reject_raw);
    let (pa, pr) = (accept.trace().re, reject_raw.trace().re);
    Ok(UnitalBranches { state: (&accept + &reject).hermitian_part(), accept, reject, accept_prob: pa, reject_prob: pr })
}

/// Unital qubit protocol per member, returned with the target (Λθ⊗I)(φ_{p,V}).
pub fn unital_qubit_protocol(fam: &ChannelFamily, p: (f64, f64), v: &CMatrix) -> Result<Vec<MemberCertificate>> {
    if fam.din() != 2 || fam.dout() != 2 {
        return Err(Error::DimensionMismatch("unital qubit protocol needs qubit channels".into()));
    }
    for m in fam.members() {
        let residual = unitality_residual(&m.channel)?;
        if residual > DEFAULT_TOL {
            return Err(Error::NonUnital { residual });
        }
    }
    let phi = PureState::phi(2);
    let target = phi_pv(p, v);
    fam.members()
        .iter()
        .map(|m| {
            let br = unital_qubit_correction(&phi.output(&m.channel)?, p, v)?;
            let expected = target.output(&m.channel)?;
            Ok(MemberCertificate {
                label: m.label.clone(),
                residual: br.state.max_abs_diff(&expected),
                state: br.state,
                expected,
                success_prob: br.accept_prob + br.reject_prob,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PairUnitaryInput {
    pub state: PureState,
    pub weights: Vec<f64>,
    pub eigenphases: Vec<f64>,
    pub min_overlap: f64,
}

fn hull_candidates(z: &[(f64, f64)]) -> Vec<(f64, Vec<f64>)> {
    let n = z.len();
    let mut out = Vec::new();
    let unit = |k: usize| {
        let mut w = vec![0.0; n];
        w[k] = 1.0;
        w
    };
    for k in 0..n {
        out.push((z[k].0.hypot(z[k].1), unit(k)));
    }
    for k in 0..n {
        for l in k + 1..n {
            let (dx, dy) = (z[l].0 - z[k].0, z[l].1 - z[k].1);
            let len2 = dx * dx + dy * dy;
            if len2 < 1e-24 {
                continue;
            }
            let t = (-(z[k].0 * dx + z[k].1 * dy) / len2).clamp(0.0, 1.0);
            if t <= 0.0 || t >= 1.0 {
                continue;
            }
            let mut w = vec![0.0; n];
            w[k] = 1.0 - t;
            w[l] = t;
            out.push(((z[k].0 + t * dx).hypot(z[k].1 + t * dy), w));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (p, q, r) = (z[a], z[b], z[c]);
                let det = (q.0 - p.0) * (r.1 - p.1) - (r.0 - p.0) * (q.1 - p.1);
                if det.abs() < 1e-14 {
                    continue;
                }
                // barycentric coordinates of the origin
                let lb = ((-p.0) * (r.1 - p.1) - (r.0 - p.0) * (-p.1)) / det;
                let lc = ((q.0 - p.0) * (-p.1) - (-p.0) * (q.1 - p.1)) / det;
                let la = 1.0 - lb - lc;
                if la >= -1e-12 && lb >= -1e-12 && lc >= -1e-12 {
                    let mut w = vec![0.0; n];
                    let s = la.max(0.0) + lb.max(0.0) + lc.max(0.0);
                    w[a] = la.max(0.0) / s;
                    w[b] = lb.max(0.0) / s;
                    w[c] = lc.max(0.0) / s;
                    let x = w[a] * p.0 + w[b] * q.0 + w[c] * r.0;
                    let y = w[a] * p.1 + w[b] * q.1 + w[c] * r.1;
                    out.push((x.hypot(y), w));
                }
            }
        }
    }
    out
}

/// Minimal-norm point of the convex hull of `z` with its weights; ties go to
/// the lexicographically smallest weight vector.
pub fn hull_min_norm(z: &[(f64, f64)]) -> (f64, Vec<f64>) {
    let cands = hull_candidates(z);
    let best = cands.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    cands
        .into_iter()
        .filter(|c| c.0 <= best + 1e-12)
        .min_by(|a, b| a.1.iter().zip(&b.1).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty point set")
}

/// Input minimizing |⟨ψ|U₊†U₋ ⊗ 1|ψ⟩| for a pair of unitaries.
pub fn pair_unitary_optimal_input(u_plus: &CMatrix, u_minus: &CMatrix) -> Result<PairUnitaryInput> {
    let d = u_plus.require_square()?;
    if u_minus.rows() != d || u_minus.cols() != d {
        return Err(Error::DimensionMismatch("unitaries differ in dimension".into()));
    }
    for u in [u_plus, u_minus] {
        if u.unitarity_residual() > 1e-9 {
            return Err(Error::NotUnitary("pair member".into()));
        }
    }
    let w = u_plus.adjoint().matmul(u_minus);
    let h = (&w + &w.adjoint()).scale_re(0.5);
    let k = (&w - &w.adjoint()).scale(C64::new(0.0, -0.5));
    let basis = simultaneous_diagonalize(&h, &k, 1e-9)?;
    let diag = basis.adjoint().matmul(&w).matmul(&basis);
    let z: Vec<(f64, f64)> = (0..d).map(|i| (diag[(i, i)].re, diag[(i, i)].im)).collect();
    let (_, weights) = hull_min_norm(&z);
    let mut amp = vec![ZERO; d * d];
    for (j, &wj) in weights.iter().enumerate() {
        for a in 0..d {
            amp[a * d + j] = basis[(a, j)] * wj.sqrt();
        }
    }
    let state = PureState::normalized(amp, SystemShape::pair(d, d))?;
    let rho = state.input_marginal();
    let min_overlap = rho.adjoint().hs_inner(&w).norm();
    Ok(PairUnitaryInput { state, weights, eigenphases: z.iter().map(|p| p.1.atan2(p.0)).collect(), min_overlap })
}

fn require_binary_measurement(fam: &ChannelFamily) -> Result<&crate::channels::MeasurementData> {
    let data = fam.measurement().ok_or(Error::WrongKind {
        expected: "measurement".into(),
        found: fam.kind().name().into(),
    })?;
    if fam.kind() != FamilyKind::Measurement || fam.len() != 2 {
        return Err(Error::InvalidArgument("need exactly two measurement members".into()));
    }
    Ok(data)
}

/// R-register blocks tr_in[(M(i) ⊗ 1)|ψ⟩⟨ψ|] of the measurement output.
pub fn register_blocks(povm: &crate::channels::Povm, psi: &PureState) -> Result<Vec<CMatrix>> {
    let rho = psi.density();
    povm.elements
        .iter()
        .map(|m| {
            let dr = psi.shape.dim() / m.rows();
            let big = m.kron(&CMatrix::identity(dr)).matmul(&rho);
            partial_trace(&big, &psi.shape, 1)
        })
        .collect()
}

/// Largest ‖R₊(i) R₋(i)‖ over outcomes; zero iff the two outputs are orthogonal.
pub fn orthogonality_residual(fam: &ChannelFamily, psi: &PureState) -> Result<f64> {
    let data = require_binary_measurement(fam)?;
    let a = register_blocks(&data.povms[0], psi)?;
    let b = register_blocks(&data.povms[1], psi)?;
    Ok(a.iter().zip(&b).map(|(x, y)| x.matmul(y).max_abs()).fold(0.0, f64::max))
}

/// Compares ψ's output curve with an all-input upper bound attained by a
/// commuting reference input.
fn certify_against_bound(
    outs: &[CMatrix],
    reference: &[CMatrix],
    bound: impl Fn(f64) -> f64,
    extra_breaks: &[f64],
) -> Result<ComparisonVerdict> {
    let mut grid = default_grid();
    grid.extend_from_slice(extra_breaks);
    let curve = crate::comparison::gap_curve(&outs[0], &outs[1], Some(&grid))?;
    let (mut kmin, mut worst) = (0, f64::INFINITY);
    for (k, (&s, &n)) in curve.s_values.iter().zip(&curve.norms).enumerate() {
        let d = n - bound(s);
        if d < worst {
            worst = d;
            kmin = k;
        }
    }
    if worst >= -1e-9 && curve.exact {
        return Ok(ComparisonVerdict {
            relation: Relation::Dominates,
            witness_s: None,
            gap: None,
            method: Method::SweepSufficientCommuting,
            pair: None,
        });
    }
    if worst < -1e-9 {
        return Ok(ComparisonVerdict {
            relation: Relation::Dominated,
            witness_s: Some(curve.s_values[kmin]),
            gap: Some(-worst),
            method: Method::SweepSufficientCommuting,
            pair: None,
        });
    }
    let mut v = pair_check(&outs[0], &outs[1], &reference[0], &reference[1], Some(&grid), 1e-9)?;
    v.pair = None;
    Ok(v)
}

/// Certifies ψ as a universally optimal input for a two-member measurement family.
pub fn measurement_input_certify(fam: &ChannelFamily, psi: &PureState) -> Result<ComparisonVerdict> {
    let data = require_binary_measurement(fam)?;
    let d = fam.din();
    if psi.shape.dims()[0] != d {
        return Err(Error::DimensionMismatch("ψ input factor".into()));
    }
    let outs = psi.outputs(fam)?;
    match &data.structure {
        MeasurementStructure::Orthogonal => {
            if orthogonality_residual(fam, psi)? <= 1e-9 {
                return Ok(ComparisonVerdict {
                    relation: Relation::Dominates,
                    witness_s: None,
                    gap: None,
                    method: Method::RandomizationCertificate,
                    pair: None,
                });
            }
            // Φ_d gives orthogonal outputs, whose curve 1 + s bounds every input
            certify_against_bound(&outs, &PureState::phi(d).outputs(fam)?, |s| 1.0 + s, &[])
        }
        MeasurementStructure::Rotated { unitaries, c, base } => {
            let res = crate::channels::twirl_residual(unitaries, *c);
            if res > 1e-9 || !commutes(&base[0], &base[1]) {
                return Ok(inconclusive());
            }
            let spec = joint_spectrum(&base[0], &base[1])?;
            let breaks: Vec<f64> = spec.iter().filter(|(_, q)| *q > 1e-12).map(|(p, q)| p / q).collect();
            let bound = move |s: f64| spec.iter().map(|(p, q)| (p - s * q).abs()).sum::<f64>();
            certify_against_bound(&outs, &PureState::phi(d).outputs(fam)?, bound, &breaks)
        }
        MeasurementStructure::Diagonal { a } => {
            let g = |ai: f64, s: f64| ((1.0 - ai) * s - ai).abs() + (ai * s - (1.0 - ai)).abs();
            let k = (0..a.len()).max_by(|&i, &j| (2.0 * a[i] - 1.0).abs().total_cmp(&(2.0 * a[j] - 1.0).abs())).unwrap_or(0);
            let ak = a[k];
            let mut breaks = Vec::new();
            if ak < 1.0 {
                breaks.push(ak / (1.0 - ak));
            }
            if ak > 0.0 {
                breaks.push((1.0 - ak) / ak);
            }
            let reference = PureState::basis_pair(d, psi.shape.dim() / d, k, 0)?.outputs(fam)?;
            certify_against_bound(&outs, &reference, move |s| g(ak, s), &breaks)
        }
        MeasurementStructure::Unstructured => Ok(inconclusive()),
    }
}

fn inconclusive() -> ComparisonVerdict {
    ComparisonVerdict { relation: Relation::Inconclusive, witness_s: None, gap: None, method: Method::SweepNecessary, pair: None }
}

#[derive(Clone, Debug)]
pub struct Su2Cover {
    pub covered: bool,
    pub witness: Option<CMatrix>,
    /// |tr(ρ_ψ U)| at the witness.
    pub value: f64,
}

/// Whether ρ_ψ = diag(p₁, 1−p₁) has tr(ρ_ψ U) = 0 for every traceless U ∈ SU(2).
pub fn su2_cover_check(p1: f64) -> Result<Su2Cover> {
    if !(0.0..=1.0).contains(&p1) {
        return Err(Error::InvalidArgument(format!("p1 = {} outside [0,1]", p1)));
    }
    let p2 = 1.0 - p1;
    if (p1 - p2).abs() <= 1e-15 {
        return Ok(Su2Cover { covered: true, witness: None, value: 0.0 });
    }
    let w = CMatrix::diag(&[I, -I]);
    let value = CMatrix::diag_real(&[p1, p2]).hs_inner(&w).norm();
    Ok(Su2Cover { covered: false, witness: Some(w), value })
}

/// Trace distance based sanity value ‖(Λ₊−Λ₋)⊗I(ψ)‖₁ used by reports.
pub fn output_distance(fam: &ChannelFamily, psi: &PureState, a: usize, b: usize) -> Result<f64> {
    let outs = psi.outputs(fam)?;
    trace_norm(&(&outs[a] - &outs[b]))
}

/// Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt_weights(psi: &PureState) -> Result<Vec<f64>> {
    let mut w = eigvalsh(&psi.input_marginal().hermitian_part())?;
    w.reverse();
    Ok(w.into_iter().map(|x| x.max(0.0)).collect())
}

/// √ρ_ψ, exposed for the orthogonality condition in reports.
pub fn sqrt_marginal(psi: &PureState) -> Result<CMatrix> {
    sqrt_psd(&psi.input_marginal())
}

/// Eigen-decomposition wrapper used by examples to print Bell weights.
pub fn spectrum(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(eigh(&m.hermitian_part())?.values)
}
