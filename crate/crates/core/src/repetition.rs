//! n-use strategies: identical, parallel and sequential outputs, and the
//! classical-adaptation search for binary measurement families.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{covariance_residual, ChannelFamily, FamilyKind, KrausChannel, Povm};
use crate::error::{Error, Result};
use crate::numerics::random::random_unitary;
use crate::numerics::{
    eigh, max_entangled, partial_trace_keep, permute_subsystems, permute_vector, tensor_all, trace_norm, CMatrix,
    SystemShape, C64, ZERO,
};
use crate::optimal_inputs::{covariant_optimal_state, group_closed, group_correction, IrrepBlocks, PureState};

/// Largest joint dimension assembled densely.
pub const DIM_CAP: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Identical,
    Parallel,
    Sequential,
}

/// How n uses of a channel are fed.
///
/// * identical: `input` on H_in ⊗ H_R, used n times;
/// * parallel: `input` on (H_in ⊗ H_R)^{⊗n}, factors ordered in₁, R₁, in₂, R₂, ..;
/// * sequential: `input` on H_in ⊗ H_Rⁿ with n−1 interleavers H_out ⊗ H_Rⁿ → H_in ⊗ H_Rⁿ.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub mode: Mode,
    pub n: usize,
    pub input: PureState,
    pub interleavers: Vec<KrausChannel>,
}

impl Strategy {
    pub fn identical(input: PureState, n: usize) -> Result<Self> {
        check_n(n)?;
        if input.shape.len() != 2 {
            return Err(Error::InvalidArgument("identical input must live on H_in ⊗ H_R".into()));
        }
        Ok(Strategy { mode: Mode::Identical, n, input, interleavers: vec![] })
    }

    pub fn parallel(input: PureState, n: usize) -> Result<Self> {
        check_n(n)?;
        if input.shape.len() != 2 * n {
            return Err(Error::InvalidArgument(format!(
                "parallel input needs {} factors (in, R per use), got {}",
                2 * n,
                input.shape.len()
            )));
        }
        Ok(Strategy { mode: Mode::Parallel, n, input, interleavers: vec![] })
    }

    pub fn sequential(input: PureState, interleavers: Vec<KrausChannel>) -> Result<Self> {
        if input.shape.len() != 2 {
            return Err(Error::InvalidArgument("sequential input must live on H_in ⊗ H_Rⁿ".into()));
        }
        let n = interleavers.len() + 1;
        let (din, drn) = (input.shape.dims()[0], input.shape.dims()[1]);
        for (i, u) in interleavers.iter().enumerate() {
            if u.dout() != din * drn || u.din() % drn != 0 {
                return Err(Error::DimensionMismatch(format!(
                    "interleaver {} maps {} → {}, expected (d_out·{}) → {}",
                    i + 1,
                    u.din(),
                    u.dout(),
                    drn,
                    din * drn
                )));
            }
        }
        if interleavers.windows(2).any(|w| w[0].din() != w[1].din()) {
            return Err(Error::DimensionMismatch("interleavers disagree on d_out".into()));
        }
        Ok(Strategy { mode: Mode::Sequential, n, input, interleavers })
    }

    /// Dimension of H_Rⁿ for a sequential strategy.
    pub fn register_dim(&self) -> usize {
        self.input.shape.dims()[1]
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("number of uses must be positive".into()));
    }
    Ok(())
}

fn cap(dim: usize) -> Result<()> {
    if dim > DIM_CAP {
        return Err(Error::DimensionCap { dim, cap: DIM_CAP });
    }
    Ok(())
}

fn checked_pow(base: usize, n: usize) -> usize {
    base.checked_pow(n as u32).unwrap_or(usize::MAX)
}

/// Final output density matrix of the strategy.
pub fn repeated_output(ch: &KrausChannel, strat: &Strategy) -> Result<CMatrix> {
    let dims = strat.input.shape.dims();
    match strat.mode {
        Mode::Identical => {
            if dims[0] != ch.din() {
                return Err(Error::DimensionMismatch("input factor vs channel".into()));
            }
            cap(checked_pow(ch.dout() * dims[1], strat.n))?;
            let omega = strat.input.output(ch)?;
            Ok(tensor_all(&vec![omega; strat.n]))
        }
        Mode::Parallel => {
            let out_dim = (0..strat.n).fold(1usize, |acc, k| acc.saturating_mul(ch.dout() * dims[2 * k + 1]));
            cap(out_dim.max(strat.input.shape.dim()))?;
            let mut rho = strat.input.density();
            let mut shape = strat.input.shape.clone();
            for k in 0..strat.n {
                let (r, s) = ch.apply_on(&rho, &shape, 2 * k)?;
                rho = r;
                shape = s;
            }
            Ok(rho)
        }
        Mode::Sequential => {
            let (din, drn) = (dims[0], dims[1]);
            if din != ch.din() {
                return Err(Error::DimensionMismatch("input factor vs channel".into()));
            }
            if let Some(u) = strat.interleavers.first() {
                if u.din() != ch.dout() * drn {
                    return Err(Error::DimensionMismatch("interleaver input vs channel output".into()));
                }
            }
            cap((ch.dout() * drn).max(din * drn))?;
            let mut rho = strat.input.output(ch)?;
            let shape = SystemShape::pair(din, drn);
            for u in &strat.interleavers {
                rho = u.apply(&rho)?;
                rho = ch.apply_on(&rho, &shape, 0)?.0;
            }
            Ok(rho)
        }
    }
}

/// Υ = 1 on H_out ⊗ H_R, read as H_in ⊗ H_R (needs d_in = d_out).
pub fn identity_rewire(d: usize, dr: usize) -> KrausChannel {
    KrausChannel::identity(d * dr)
}

/// A Haar-random unitary on H_out ⊗ H_R (d_in = d_out).
pub fn random_unitary_interleaver(rng: &mut impl Rng, d: usize, dr: usize) -> KrausChannel {
    KrausChannel::unitary(&random_unitary(rng, d * dr)).expect("unitary")
}

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn flat(ds: &[usize], dims: &[usize]) -> usize {
    ds.iter().zip(dims).fold(0, |acc, (d, n)| acc * n + d)
}

/// Register layout of the fresh-input swap strategy.
///
/// The sequential state lives on X ⊗ O₁..O_{n−1} ⊗ R₁..R_n ⊗ A₂..A_n, where X
/// is the channel port, O_k store earlier outputs, R_k hold reference halves
/// and A_k hold fresh copies of the input half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreshSwapLayout {
    pub n: usize,
    pub din: usize,
    pub dout: usize,
    pub dr: usize,
}

impl FreshSwapLayout {
    fn register_dims(&self) -> Vec<usize> {
        let n = self.n;
        let mut d = vec![self.dout; n - 1];
        d.extend(vec![self.dr; n]);
        d.extend(vec![self.din; n - 1]);
        d
    }

    pub fn register_dim(&self) -> usize {
        self.register_dims().iter().product()
    }

    fn full_dims(&self, port: usize) -> Vec<usize> {
        let mut d = vec![port];
        d.extend(self.register_dims());
        d
    }

    /// Step `i` (1-based): X → O_i, A_{i+1} → X, A_{i+1} reset to |0⟩, old O_i discarded.
    fn interleaver(&self, i: usize) -> Result<KrausChannel> {
        let n = self.n;
        let in_dims = self.full_dims(self.dout);
        let out_dims = self.full_dims(self.din);
        let o = i;
        let a = 1 + (n - 1) + n + (i - 1);
        let din_total: usize = in_dims.iter().product();
        let dout_total: usize = out_dims.iter().product();
        let mut kraus = vec![CMatrix::zeros(dout_total, din_total); self.dout];
        for idx in 0..din_total {
            let t = digits(idx, &in_dims);
            let mut u = t.clone();
            u[0] = t[a];
            u[o] = t[0];
            u[a] = 0;
            kraus[t[o]][(flat(&u, &out_dims), idx)] = C64::new(1.0, 0.0);
        }
        KrausChannel::new(kraus)
    }

    /// Initial state ψ_{in₁R₁} ⊗ ψ_{A₂R₂} ⊗ .. ⊗ |0⟩_O.. arranged as X ⊗ H_Rⁿ.
    fn initial_state(&self, psi: &PureState) -> Result<PureState> {
        let n = self.n;
        let mut parts = Vec::new();
        for _ in 0..n {
            parts.push(psi.amplitudes.clone());
        }
        let mut zero = vec![ZERO; self.dout];
        zero[0] = C64::new(1.0, 0.0);
        for _ in 0..n - 1 {
            parts.push(zero.clone());
        }
        let amps = parts.iter().skip(1).fold(parts[0].clone(), |acc, p| crate::numerics::kron_vec(&acc, p));
        // product order: in₁ R₁ A₂ R₂ .. A_n R_n O₁ .. O_{n−1}
        let mut pdims = Vec::new();
        for _ in 0..n {
            pdims.extend([self.din, self.dr]);
        }
        pdims.extend(vec![self.dout; n - 1]);
        let pshape = SystemShape::new(pdims)?;
        let mut perm = vec![0];
        perm.extend((0..n - 1).map(|k| 2 * n + k));
        perm.extend((0..n).map(|k| 2 * k + 1));
        perm.extend((1..n).map(|k| 2 * k));
        let v = permute_vector(&amps, &pshape, &perm)?;
        PureState::new(v, SystemShape::pair(self.din, self.register_dim()))
    }

    /// Maps the final sequential output to (H_out ⊗ H_R)^{⊗n} order.
    pub fn to_identical_order(&self, rho: &CMatrix) -> Result<CMatrix> {
        let n = self.n;
        let shape = SystemShape::new(self.full_dims(self.dout))?;
        let mut keep = Vec::new();
        for k in 0..n - 1 {
            keep.extend([1 + k, n + k]);
        }
        keep.extend([0, n + n - 1]);
        partial_trace_keep(rho, &shape, &keep)
    }
}

/// Sequential strategy that swaps a fresh copy of ψ into the port after each
/// use, reproducing the identical-repetition output.
pub fn fresh_swap_strategy(psi: &PureState, n: usize, dout: usize) -> Result<(Strategy, FreshSwapLayout)> {
    check_n(n)?;
    if psi.shape.len() != 2 {
        return Err(Error::InvalidArgument("ψ must live on H_in ⊗ H_R".into()));
    }
    let layout = FreshSwapLayout { n, din: psi.shape.dims()[0], dout, dr: psi.shape.dims()[1] };
    cap(layout.din.max(dout).saturating_mul(layout.register_dim()))?;
    let start = layout.initial_state(psi)?;
    let inter = (1..n).map(|i| layout.interleaver(i)).collect::<Result<Vec<_>>>()?;
    Ok((Strategy::sequential(start, inter)?, layout))
}

#[derive(Clone, Debug, Serialize)]
pub struct SequentialCertificate {
    pub label: String,
    pub residual: f64,
}

/// Rebuilds ρ_sf,θ from n copies of (Λθ ⊗ I)(ψ_opt) with the group protocol
/// and compares with the sequential output, member by member.
pub fn identical_matches_sequential(
    fam: &ChannelFamily,
    group: &[(CMatrix, CMatrix)],
    blocks: &IrrepBlocks,
    strat: &Strategy,
    contravariant: bool,
) -> Result<Vec<SequentialCertificate>> {
    if strat.mode != Mode::Sequential {
        return Err(Error::InvalidArgument("a sequential strategy is required".into()));
    }
    if blocks.total() != fam.din() {
        return Err(Error::DimensionMismatch("blocks vs family input".into()));
    }
    let residual = covariance_residual(fam, group, contravariant)?;
    if residual > 1e-8 {
        return Err(Error::NotCovariant { residual });
    }
    let us: Vec<CMatrix> = group.iter().map(|(u, _)| u.clone()).collect();
    if !group_closed(&us, 1e-8) {
        return Err(Error::InvalidArgument("group is not closed under products".into()));
    }
    let psi_opt = covariant_optimal_state(blocks);
    fam.members()
        .iter()
        .map(|m| {
            let omega = psi_opt.output(&m.channel)?;
            let mut rho = strat.input.density();
            for step in 0..strat.n {
                rho = group_correction(&omega, fam.dout(), group, blocks, &rho, contravariant)?.state;
                if step + 1 < strat.n {
                    rho = strat.interleavers[step].apply(&rho)?;
                }
            }
            let direct = repeated_output(&m.channel, strat)?;
            Ok(SequentialCertificate { label: m.label.clone(), residual: rho.max_abs_diff(&direct) })
        })
        .collect()
}

/// Block sizes with one input menu per block; menu states live on H_in^{⊗nᵢ} ⊗ H_R.
#[derive(Clone, Debug)]
pub struct AdaptivePlan {
    pub block_sizes: Vec<usize>,
    pub menus: Vec<Vec<PureState>>,
}

impl AdaptivePlan {
    pub fn new(block_sizes: Vec<usize>, menus: Vec<Vec<PureState>>) -> Result<Self> {
        if block_sizes.is_empty() || block_sizes.contains(&0) {
            return Err(Error::InvalidArgument("block sizes must be positive".into()));
        }
        if menus.len() != block_sizes.len() || menus.iter().any(|m| m.is_empty()) {
            return Err(Error::InvalidArgument("need one non-empty menu per block".into()));
        }
        for (size, menu) in block_sizes.iter().zip(&menus) {
            if menu.iter().any(|s| s.shape.len() != size + 1) {
                return Err(Error::InvalidArgument(format!(
                    "menu states for a block of {} uses need {} input factors and one register",
                    size, size
                )));
            }
        }
        Ok(AdaptivePlan { block_sizes, menus })
    }

    /// Same menu for every block (all blocks must share one size).
    pub fn shared(block_sizes: Vec<usize>, menu: Vec<PureState>) -> Result<Self> {
        let menus = vec![menu; block_sizes.len()];
        Self::new(block_sizes, menus)
    }

    pub fn total_uses(&self) -> usize {
        self.block_sizes.iter().sum()
    }
}

/// {Φ₂, |0⟩|0⟩, |1⟩|1⟩, |+⟩|0⟩} on C² ⊗ C².
pub fn standard_qubit_menu() -> Vec<PureState> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus0 = vec![C64::new(h, 0.0), ZERO, C64::new(h, 0.0), ZERO];
    vec![
        PureState::phi(2),
        PureState::basis_pair(2, 2, 0, 0).expect("in range"),
        PureState::basis_pair(2, 2, 1, 1).expect("in range"),
        PureState::new(plus0, SystemShape::pair(2, 2)).expect("unit vector"),
    ]
}

#[derive(Clone, Debug, Serialize)]
pub struct AdaptiveReport {
    pub adaptive_risk: f64,
    pub identical_risk: f64,
    /// Menu index chosen for the first block.
    pub first_choice: usize,
    pub branches: usize,
}

/// Register blocks σ_θ,x = tr_in[(M_θ(x) ⊗ 1)|ψ⟩⟨ψ|] for every outcome tuple x.
fn cq_blocks(povm: &Povm, psi: &PureState, uses: usize) -> Result<Vec<CMatrix>> {
    let d = povm.dim();
    let dims = psi.shape.dims();
    if dims[..uses].iter().any(|&x| x != d) {
        return Err(Error::DimensionMismatch("menu state input factors vs family".into()));
    }
    let din = checked_pow(d, uses);
    let dr = dims[uses];
    cap(din * dr)?;
    let big = CMatrix::from_fn(din, dr, |a, r| psi.amplitudes[a * dr + r]);
    let k = povm.len();
    let count = checked_pow(k, uses);
    cap(count)?;
    let idims = vec![k; uses];
    let mut out = Vec::with_capacity(count);
    for x in 0..count {
        let m = tensor_all(&digits(x, &idims).iter().map(|&i| povm.elements[i].clone()).collect::<Vec<_>>());
        out.push(big.transpose().matmul(&m.transpose()).matmul(&big.conj()));
    }
    Ok(out)
}

/// ½(tr A + tr B − ‖A − B‖₁), the least weighted error for one branch.
fn helstrom_error(a: &CMatrix, b: &CMatrix) -> Result<f64> {
    Ok(0.5 * (a.trace().re + b.trace().re - trace_norm(&(a - b))?))
}

fn positive_projector(m: &CMatrix) -> Result<CMatrix> {
    let e = eigh(&m.hermitian_part())?;
    let (vals, vecs) = (e.values, e.vectors);
    let n = m.rows();
    let mut p = CMatrix::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        if v > 0.0 {
            p = &p + &CMatrix::projector(&vecs.col(k));
        }
    }
    Ok(p)
}

struct Search<'a> {
    blocks: Vec<Vec<[Vec<CMatrix>; 2]>>,
    plan: &'a AdaptivePlan,
    branches: usize,
}

impl Search<'_> {
    /// Least joint error from block `j` on, given joint weights (w₊, w₋) of the data so far.
    fn risk(&mut self, j: usize, w: (f64, f64)) -> Result<(f64, usize)> {
        let last = j + 1 == self.plan.block_sizes.len();
        let mut best = (f64::INFINITY, 0);
        for choice in 0..self.blocks[j].len() {
            let [sp, sm] = self.blocks[j][choice].clone();
            let mut total = 0.0;
            for (a, b) in sp.iter().zip(&sm) {
                let (a, b) = (a.scale_re(w.0), b.scale_re(w.1));
                self.branches += 1;
                if last {
                    total += helstrom_error(&a, &b)?;
                    continue;
                }
                // keep only the outcome tuple
                let (pa, pb) = (a.trace().re, b.trace().re);
                let coarse = self.risk(j + 1, (pa, pb))?.0;
                // or also keep the Helstrom verdict on the register
                let p = positive_projector(&(&a - &b))?;
                let (qa, qb) = (p.hs_inner(&a).re, p.hs_inner(&b).re);
                let fine = self.risk(j + 1, (qa, qb))?.0 + self.risk(j + 1, (pa - qa, pb - qb))?.0;
                total += coarse.min(fine);
            }
            if total < best.0 {
                best = (total, choice);
            }
        }
        Ok(best)
    }
}

/// Exhaustive adaptive search against identical use of Φ_d on all n uses.
pub fn adaptive_vs_identical(fam: &ChannelFamily, prior: (f64, f64), plan: &AdaptivePlan) -> Result<AdaptiveReport> {
    let data = fam.measurement().ok_or(Error::WrongKind {
        expected: "measurement".into(),
        found: fam.kind().name().into(),
    })?;
    if fam.kind() != FamilyKind::Measurement || data.povms.len() != 2 {
        return Err(Error::InvalidArgument("need exactly two measurement members".into()));
    }
    if prior.0 < 0.0 || prior.1 < 0.0 || ((prior.0 + prior.1) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("prior {:?} is not a distribution", prior)));
    }
    let (pp, pm) = (&data.povms[0], &data.povms[1]);
    let blocks = plan
        .block_sizes
        .iter()
        .zip(&plan.menus)
        .map(|(&size, menu)| {
            menu.iter()
                .map(|psi| Ok([cq_blocks(pp, psi, size)?, cq_blocks(pm, psi, size)?]))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut search = Search { blocks, plan, branches: 0 };
    let (adaptive_risk, first_choice) = search.risk(0, prior)?;
    let n = plan.total_uses();
    let d = fam.din();
    cap(checked_pow(d, 2 * n))?;
    let mut dims = vec![d; n];
    dims.push(checked_pow(d, n));
    let phi = PureState::new(max_entangled(checked_pow(d, n)), SystemShape::new(dims)?)?;
    let (ip, im) = (cq_blocks(pp, &phi, n)?, cq_blocks(pm, &phi, n)?);
    let mut identical_risk = 0.0;
    for (a, b) in ip.iter().zip(&im) {
        identical_risk += helstrom_error(&a.scale_re(prior.0), &b.scale_re(prior.1))?;
    }
    Ok(AdaptiveReport { adaptive_risk, identical_risk, first_choice, branches: search.branches })
}

/// (in₁ R₁ in₂ R₂ ..) ordering of Φ-type joint inputs from an in^{⊗n} ⊗ R^{⊗n} vector.
pub fn interleave_factors(v: &[C64], d_in: usize, d_r: usize, n: usize) -> Result<PureState> {
    let mut dims = vec![d_in; n];
    dims.extend(vec![d_r; n]);
    let shape = SystemShape::new(dims)?;
    let perm: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
    let w = permute_vector(v, &shape, &perm)?;
    let mut out_dims = Vec::new();
    for _ in 0..n {
        out_dims.extend([d_in, d_r]);
    }
    PureState::new(w, SystemShape::new(out_dims)?)
}

/// Reorders an (H_out ⊗ H_R)^{⊗n} matrix to H_out^{⊗n} ⊗ H_R^{⊗n}.
pub fn group_outputs(rho: &CMatrix, d_out: usize, d_r: usize, n: usize) -> Result<CMatrix> {
    let mut dims = Vec::new();
    for _ in 0..n {
        dims.extend([d_out, d_r]);
    }
    let shape = SystemShape::new(dims)?;
    let perm: Vec<usize> = (0..n).map(|k| 2 * k).chain((0..n).map(|k| 2 * k + 1)).collect();
    permute_subsystems(rho, &shape, &perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{gp_channel, make_gp, ortho_rank1_family, weyl_group_pairs, weyl_rotated_family};
    use crate::numerics::random::{random_simplex, random_state};
    use crate::numerics::{basis_vec, eigvalsh, kron_vec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn damp() -> KrausChannel {
        crate::channels::damp_channel(1.0, 0.5).unwrap()
    }

    fn assert_density(m: &CMatrix) {
        assert!((m.trace().re - 1.0).abs() < 1e-10);
        assert!(eigvalsh(&m.hermitian_part()).unwrap()[0] >= -1e-9);
    }

    #[test]
    fn single_use_modes_coincide() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = PureState::new(random_state(&mut rng, 4), SystemShape::pair(2, 2)).unwrap();
        let ch = damp();
        let a = repeated_output(&ch, &Strategy::identical(psi.clone(), 1).unwrap()).unwrap();
        let b = repeated_output(&ch, &Strategy::parallel(psi.clone(), 1).unwrap()).unwrap();
        let c = repeated_output(&ch, &Strategy::sequential(psi, vec![]).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12 && a.max_abs_diff(&c) < 1e-12);
        assert_density(&a);
    }

    #[test]
    fn parallel_product_equals_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = PureState::new(random_state(&mut rng, 4), SystemShape::pair(2, 2)).unwrap();
        let joint = kron_vec(&kron_vec(&psi.amplitudes, &psi.amplitudes), &psi.amplitudes);
        let shape = SystemShape::new(vec![2, 2, 2, 2, 2, 2]).unwrap();
        let par = Strategy::parallel(PureState::new(joint, shape).unwrap(), 3).unwrap();
        let ch = damp();
        let a = repeated_output(&ch, &Strategy::identical(psi, 3).unwrap()).unwrap();
        let b = repeated_output(&ch, &par).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert_density(&b);
    }

    #[test]
    fn fresh_swap_reproduces_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3] {
            let psi = PureState::new(random_state(&mut rng, 4), SystemShape::pair(2, 2)).unwrap();
            let ch = damp();
            let (seq, layout) = fresh_swap_strategy(&psi, n, 2).unwrap();
            let out = repeated_output(&ch, &seq).unwrap();
            assert_density(&out);
            let reduced = layout.to_identical_order(&out).unwrap();
            let ident = repeated_output(&ch, &Strategy::identical(psi, n).unwrap()).unwrap();
            assert!(reduced.max_abs_diff(&ident) < 1e-10, "n = {}", n);
        }
    }

    #[test]
    fn interleaver_chaining_is_validated() {
        let psi = PureState::basis_pair(2, 4, 0, 0).unwrap();
        assert!(Strategy::sequential(psi.clone(), vec![KrausChannel::identity(6)]).is_err());
        assert!(Strategy::sequential(psi, vec![identity_rewire(2, 4)]).is_ok());
        assert!(Strategy::parallel(PureState::phi(2), 2).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let psi = PureState::phi(4);
        let err = repeated_output(&KrausChannel::identity(4), &Strategy::identical(psi, 4).unwrap());
        assert!(matches!(err, Err(Error::DimensionCap { .. })));
    }

    fn gp2() -> ChannelFamily {
        make_gp(2, &[("a", vec![0.7, 0.1, 0.15, 0.05]), ("b", vec![0.4, 0.3, 0.2, 0.1])]).unwrap()
    }

    #[test]
    fn sequential_certificate_identity_and_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let fam = gp2();
        let group = weyl_group_pairs(2);
        let blocks = IrrepBlocks::single(2);
        let psi = PureState::new(random_state(&mut rng, 8), SystemShape::pair(2, 4)).unwrap();
        let s1 = Strategy::sequential(psi.clone(), vec![identity_rewire(2, 4)]).unwrap();
        let s2 = Strategy::sequential(psi, vec![random_unitary_interleaver(&mut rng, 2, 4)]).unwrap();
        for s in [s1, s2] {
            let certs = identical_matches_sequential(&fam, &group, &blocks, &s, false).unwrap();
            assert!(certs.iter().all(|c| c.residual <= 1e-9), "{:?}", certs);
        }
    }

    #[test]
    fn sequential_certificate_single_use() {
        let fam = gp2();
        let psi = PureState::basis_pair(2, 3, 1, 2).unwrap();
        let s = Strategy::sequential(psi, vec![]).unwrap();
        let certs = identical_matches_sequential(&fam, &weyl_group_pairs(2), &IrrepBlocks::single(2), &s, false).unwrap();
        assert!(certs.iter().all(|c| c.residual <= 1e-10));
    }

    #[test]
    fn sequential_certificate_needs_covariance() {
        let fam = crate::channels::make_damp(&[("a", 1.0, 0.5), ("b", 1.0, 0.0)]).unwrap();
        let s = Strategy::sequential(PureState::phi(2), vec![]).unwrap();
        let res = identical_matches_sequential(&fam, &weyl_group_pairs(2), &IrrepBlocks::single(2), &s, false);
        assert!(matches!(res, Err(Error::NotCovariant { .. })));
    }

    #[test]
    fn gp_channel_sequence_stays_density() {
        let ch = gp_channel(2, &[0.5, 0.2, 0.2, 0.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let psi = PureState::new(random_state(&mut rng, 8), SystemShape::pair(2, 4)).unwrap();
        let s = Strategy::sequential(
            psi,
            vec![random_unitary_interleaver(&mut rng, 2, 4), random_unitary_interleaver(&mut rng, 2, 4)],
        )
        .unwrap();
        assert_density(&repeated_output(&ch, &s).unwrap());
    }

    fn mes_rotate(rng: &mut ChaCha8Rng) -> ChannelFamily {
        let e1 = random_state(rng, 2);
        weyl_rotated_family(&e1, &random_simplex(rng, 2), &random_simplex(rng, 2)).unwrap()
    }

    #[test]
    fn single_block_equals_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let fam = mes_rotate(&mut rng);
        let phi2 = interleave_phi(2, 2);
        let plan = AdaptivePlan::new(vec![2], vec![vec![phi2]]).unwrap();
        let rep = adaptive_vs_identical(&fam, (0.4, 0.6), &plan).unwrap();
        assert!((rep.adaptive_risk - rep.identical_risk).abs() < 1e-12);
    }

    fn interleave_phi(d: usize, n: usize) -> PureState {
        let mut dims = vec![d; n];
        dims.push(d.pow(n as u32));
        PureState::new(max_entangled(d.pow(n as u32)), SystemShape::new(dims).unwrap()).unwrap()
    }

    #[test]
    fn ortho_family_is_perfect() {
        let fam = ortho_rank1_family(&[basis_vec(2, 0), basis_vec(2, 1)]).unwrap();
        let plan = AdaptivePlan::shared(vec![1, 1], standard_qubit_menu()).unwrap();
        let rep = adaptive_vs_identical(&fam, (0.5, 0.5), &plan).unwrap();
        assert!(rep.adaptive_risk.abs() < 1e-12 && rep.identical_risk.abs() < 1e-12);
    }

    #[test]
    fn adaptation_does_not_help_mes_rotate() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let fam = mes_rotate(&mut rng);
            let plan = AdaptivePlan::shared(vec![1, 1], standard_qubit_menu()).unwrap();
            let pi = rng.gen_range(0.1..0.9);
            let rep = adaptive_vs_identical(&fam, (pi, 1.0 - pi), &plan).unwrap();
            assert!(rep.adaptive_risk >= rep.identical_risk - 1e-9, "{:?}", rep);
            assert!(rep.identical_risk <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn adaptive_rejects_channel_families() {
        let plan = AdaptivePlan::shared(vec![1], standard_qubit_menu()).unwrap();
        assert!(matches!(adaptive_vs_identical(&gp2(), (0.5, 0.5), &plan), Err(Error::WrongKind { .. })));
    }

    #[test]
    fn phi_product_matches_interleaved_phi() {
        let v = max_entangled(4);
        let a = interleave_factors(&v, 2, 2, 2).unwrap();
        let phi = max_entangled(2);
        let b = kron_vec(&phi, &phi);
        assert!(a.amplitudes.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-14));
        let rho = CMatrix::projector(&b);
        let g = group_outputs(&rho, 2, 2, 2).unwrap();
        assert!(g.max_abs_diff(&CMatrix::projector(&v)) < 1e-14);
    }
}
