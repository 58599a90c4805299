//! Constructors for the channel families.
//!
//! Member parameter vectors by kind:
//! - `gp`: θ over the Weyl operators X^j Z^k, index j·d + k
//! - `damp`: [p, ξ]
//! - `diag`: the free diagonal entries θ¹..θ^{⌈(d−1)/2⌉} of E₁
//! - `cdep`: [θ]
//! - `ou`: weights θ² .. θ^m of the second and later unitaries
//! - `qubit-phase`: [θ¹, θ²]

use serde::{Deserialize, Serialize};

use super::{
    choi_of, gen_pauli, validate_choi, validate_cptp, weyl, weyl_set, ChoiMatrix, KrausChannel, Povm, DEFAULT_TOL,
};
use crate::error::{Error, Result};
use crate::numerics::{eigvalsh, inner, r, vec_norm, CMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Gp,
    Damp,
    Diag,
    Cdep,
    Ou,
    QubitPhase,
    Measurement,
    Unitary,
    Custom,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Gp => "gp",
            FamilyKind::Damp => "damp",
            FamilyKind::Diag => "diag",
            FamilyKind::Cdep => "cdep",
            FamilyKind::Ou => "ou",
            FamilyKind::QubitPhase => "qubit-phase",
            FamilyKind::Measurement => "measurement",
            FamilyKind::Unitary => "unitary",
            FamilyKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    pub label: String,
    pub channel: KrausChannel,
    pub params: Vec<f64>,
}

/// How a measurement family was built; drives certification.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasurementStructure {
    Unstructured,
    /// M₋(i) = (tr M₊(i)·1 − M₊(i))/(d−1) with rank-one M₊(i).
    Orthogonal,
    /// M_θ(i) = U_i M_θ U_i† / c with Σ U A U† = c tr(A) 1 and commuting M±.
    Rotated { unitaries: Vec<CMatrix>, c: f64, base: Vec<CMatrix> },
    /// Two outcomes: M₊ = (M, 1−M), M₋ = (1−M, M) with M = diag(a).
    Diagonal { a: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementData {
    pub povms: Vec<Povm>,
    pub structure: MeasurementStructure,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelFamily {
    kind: FamilyKind,
    members: Vec<FamilyMember>,
    measurement: Option<MeasurementData>,
}

impl ChannelFamily {
    /// Checks shared dimensions and that every member is CPTP.
    pub fn new(kind: FamilyKind, members: Vec<FamilyMember>) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
        let (din, dout) = (first.channel.din(), first.channel.dout());
        for m in &members {
            if m.channel.din() != din || m.channel.dout() != dout {
                return Err(Error::DimensionMismatch(format!("member '{}' has different dimensions", m.label)));
            }
            let rep = validate_cptp(&m.channel, DEFAULT_TOL);
            if !rep.trace_preserving {
                return Err(Error::Constraint(format!(
                    "member '{}': trace preservation Σ K†K = I (residual {:.3e})",
                    m.label, rep.tp_residual
                )));
            }
            if !rep.cp {
                return Err(Error::Constraint(format!(
                    "member '{}': complete positivity (min Choi eigenvalue {:.3e})",
                    m.label, rep.min_choi_eig
                )));
            }
        }
        Ok(ChannelFamily { kind, members, measurement: None })
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn din(&self) -> usize {
        self.members[0].channel.din()
    }

    pub fn dout(&self) -> usize {
        self.members[0].channel.dout()
    }

    pub fn measurement(&self) -> Option<&MeasurementData> {
        self.measurement.as_ref()
    }

    pub fn member(&self, label: &str) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.label == label)
    }

    /// Subfamily with the listed member indices, in that order.
    pub fn select(&self, idx: &[usize]) -> Result<ChannelFamily> {
        if idx.is_empty() || idx.iter().any(|&i| i >= self.members.len()) {
            return Err(Error::InvalidArgument(format!("bad member selection {:?}", idx)));
        }
        let measurement = self.measurement.as_ref().map(|m| MeasurementData {
            povms: idx.iter().map(|&i| m.povms[i].clone()).collect(),
            structure: match &m.structure {
                MeasurementStructure::Rotated { unitaries, c, base } => MeasurementStructure::Rotated {
                    unitaries: unitaries.clone(),
                    c: *c,
                    base: idx.iter().map(|&i| base[i].clone()).collect(),
                },
                other => other.clone(),
            },
        });
        Ok(ChannelFamily {
            kind: self.kind,
            members: idx.iter().map(|&i| self.members[i].clone()).collect(),
            measurement,
        })
    }
}

fn member(label: &str, channel: KrausChannel, params: Vec<f64>) -> FamilyMember {
    FamilyMember { label: label.to_string(), channel, params }
}

fn check_simplex(theta: &[f64], what: &str) -> Result<()> {
    if theta.iter().any(|&t| !t.is_finite() || t < -DEFAULT_TOL) {
        return Err(Error::Constraint(format!("{}: simplex requires θ ≥ 0", what)));
    }
    let s: f64 = theta.iter().sum();
    if (s - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::Constraint(format!("{}: simplex requires Σθ = 1 (sum {})", what, s)));
    }
    Ok(())
}

/// Σ θ^{(j,k)} Υ_{X^j Z^k}
pub fn gp_channel(d: usize, theta: &[f64]) -> Result<KrausChannel> {
    if theta.len() != d * d {
        return Err(Error::InvalidArgument(format!("gp needs {} weights, got {}", d * d, theta.len())));
    }
    check_simplex(theta, "gp weights")?;
    let ws = weyl_set(d);
    let kraus: Vec<CMatrix> = ws
        .iter()
        .zip(theta)
        .filter(|(_, &t)| t > 0.0)
        .map(|(w, &t)| w.scale_re(t.sqrt()))
        .collect();
    KrausChannel::new(kraus)
}

pub fn make_gp(d: usize, members: &[(&str, Vec<f64>)]) -> Result<ChannelFamily> {
    gen_pauli(d)?;
    let ms = members
        .iter()
        .map(|(l, t)| Ok(member(l, gp_channel(d, t)?, t.clone())))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Gp, ms)
}

/// Qubit weights (ξ¹, ξ², ξ³) of X, Y, Z mapped onto the θ^{(j,k)} layout.
pub fn xi_to_theta(xi: [f64; 3]) -> Vec<f64> {
    let xi0 = 1.0 - xi[0] - xi[1] - xi[2];
    vec![xi0, xi[2], xi[0], xi[1]]
}

pub fn theta_to_xi(theta: &[f64]) -> [f64; 3] {
    [theta[2], theta[3], theta[1]]
}

pub fn make_gp_xi(members: &[(&str, [f64; 3])]) -> Result<ChannelFamily> {
    let ms: Vec<(&str, Vec<f64>)> = members.iter().map(|(l, x)| (*l, xi_to_theta(*x))).collect();
    make_gp(2, &ms)
}

/// Generalized amplitude damping with Kraus F₁..F₄.
pub fn damp_channel(p: f64, xi: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Constraint(format!("damp: p ∈ [0,1] (got {})", p)));
    }
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Constraint(format!("damp: ξ ∈ [0,1] (got {})", xi)));
    }
    let (sp, sq) = (p.sqrt(), (1.0 - p).sqrt());
    let (sx, sy) = (xi.sqrt(), (1.0 - xi).sqrt());
    let f1 = CMatrix::diag_real(&[sp, sp * sx]);
    let f2 = CMatrix::diag_real(&[sq * sx, sq]);
    let f3 = CMatrix::from_real(&[&[0.0, sp * sy], &[0.0, 0.0]]);
    let f4 = CMatrix::from_real(&[&[0.0, 0.0], &[sq * sy, 0.0]]);
    let kraus = [f1, f2, f3, f4].into_iter().filter(|k| k.max_abs() > 0.0).collect();
    KrausChannel::new(kraus)
}

pub fn make_damp(members: &[(&str, f64, f64)]) -> Result<ChannelFamily> {
    let ms = members
        .iter()
        .map(|(l, p, x)| Ok(member(l, damp_channel(*p, *x)?, vec![*p, *x])))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Damp, ms)
}

/// Number of free entries of E₁ in the diag family.
pub fn diag_free_entries(d: usize) -> usize {
    (d - 1).div_ceil(2)
}

/// Kraus E_i = X^{i−1} E₁ X^{−(i−1)}, E₁ = diag(θ¹, .., θ^q, √Σθ², 0, ..).
pub fn diag_channel(d: usize, theta: &[f64]) -> Result<KrausChannel> {
    let (x, _) = gen_pauli(d)?;
    let q = diag_free_entries(d);
    if theta.len() != q {
        return Err(Error::InvalidArgument(format!("diag family with d={} needs {} parameters", d, q)));
    }
    let mut e1 = vec![0.0; d];
    e1[..q].copy_from_slice(theta);
    e1[q] = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
    let e1 = CMatrix::diag_real(&e1);
    let mut kraus = Vec::with_capacity(d);
    let mut shift = CMatrix::identity(d);
    for _ in 0..d {
        kraus.push(shift.conjugate_by(&e1));
        shift = shift.matmul(&x);
    }
    let ch = KrausChannel::new(kraus)?;
    let rep = validate_cptp(&ch, DEFAULT_TOL);
    if !rep.trace_preserving {
        return Err(Error::Constraint(format!(
            "diag: trace preservation Σ E_i†E_i = I fails (residual {:.3e})",
            rep.tp_residual
        )));
    }
    Ok(ch)
}

pub fn make_diag(d: usize, members: &[(&str, Vec<f64>)]) -> Result<ChannelFamily> {
    let ms = members
        .iter()
        .map(|(l, t)| Ok(member(l, diag_channel(d, t)?, t.clone())))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Diag, ms)
}

/// Choi matrix of θ T + (1−θ) Υ_m, T the transpose map.
pub fn cdep_choi(d: usize, theta: f64) -> ChoiMatrix {
    let mut w = CMatrix::identity(d * d).scale_re((1.0 - theta) / d as f64);
    for i in 0..d {
        for j in 0..d {
            // Ch(T) = Σ |j⟩⟨i| ⊗ |i⟩⟨j| is the swap
            w[(j * d + i, i * d + j)] += r(theta);
        }
    }
    ChoiMatrix { matrix: w, din: d, dout: d }
}

pub fn make_cdep(d: usize, members: &[(&str, f64)]) -> Result<ChannelFamily> {
    let hi = 1.0 / (d as f64 + 1.0);
    let ms = members
        .iter()
        .map(|(l, t)| {
            if !(0.0..=hi + 1e-15).contains(t) {
                return Err(Error::Constraint(format!("cdep: θ ∈ [0, 1/(d+1)] = [0, {}] (got {})", hi, t)));
            }
            let choi = cdep_choi(d, *t);
            let rep = validate_choi(&choi, DEFAULT_TOL);
            if !rep.valid() {
                return Err(Error::Constraint(format!("cdep: Choi matrix min eigenvalue {:.3e}", rep.min_choi_eig)));
            }
            Ok(member(l, KrausChannel::from_choi(&choi, 1e-13)?, vec![*t]))
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Cdep, ms)
}

/// Checks tr U_i U_j† = d δ_ij.
pub fn check_orthogonal_unitaries(us: &[CMatrix], tol: f64) -> Result<()> {
    let d = us.first().ok_or_else(|| Error::InvalidArgument("no unitaries".into()))?.rows();
    for (i, a) in us.iter().enumerate() {
        if a.rows() != d || a.unitarity_residual() > tol {
            return Err(Error::NotUnitary(format!("ou: element {}", i)));
        }
        for (j, b) in us.iter().enumerate() {
            let g = a.matmul(&b.adjoint()).trace();
            let want = if i == j { d as f64 } else { 0.0 };
            if (g - r(want)).norm() > tol {
                return Err(Error::Constraint(format!("ou: tr U_{} U_{}† = d δ fails ({:.3e})", i, j, g.norm())));
            }
        }
    }
    Ok(())
}

/// (1 − Σθ) Υ_{U₁} + Σ_{i≥2} θ^i Υ_{U_i}
pub fn make_ou(unitaries: &[CMatrix], members: &[(&str, Vec<f64>)]) -> Result<ChannelFamily> {
    check_orthogonal_unitaries(unitaries, DEFAULT_TOL)?;
    let ms = members
        .iter()
        .map(|(l, t)| {
            if t.len() + 1 != unitaries.len() {
                return Err(Error::InvalidArgument(format!(
                    "ou: {} unitaries need {} weights",
                    unitaries.len(),
                    unitaries.len() - 1
                )));
            }
            let mut w = vec![1.0 - t.iter().sum::<f64>()];
            w.extend_from_slice(t);
            check_simplex(&w, "ou weights")?;
            let kraus = unitaries
                .iter()
                .zip(&w)
                .filter(|(_, &x)| x > 0.0)
                .map(|(u, &x)| u.scale_re(x.sqrt()))
                .collect();
            Ok(member(l, KrausChannel::new(kraus)?, t.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Ou, ms)
}

/// Kraus E₁ = diag(1, θ¹ + iθ²), E₂ = diag(0, √(1 − |θ|²)).
pub fn qubit_phase_channel(t1: f64, t2: f64) -> Result<KrausChannel> {
    let n2 = t1 * t1 + t2 * t2;
    if n2 > 1.0 + 1e-12 {
        return Err(Error::Constraint(format!("qubit-phase: (θ¹)² + (θ²)² ≤ 1 (got {})", n2)));
    }
    let e1 = CMatrix::diag(&[r(1.0), C64::new(t1, t2)]);
    let e2 = CMatrix::diag_real(&[0.0, (1.0 - n2).max(0.0).sqrt()]);
    KrausChannel::new(vec![e1, e2])
}

pub fn make_qubit_phase(members: &[(&str, f64, f64)]) -> Result<ChannelFamily> {
    let ms = members
        .iter()
        .map(|(l, a, b)| Ok(member(l, qubit_phase_channel(*a, *b)?, vec![*a, *b])))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::QubitPhase, ms)
}

pub fn make_unitary(members: &[(&str, CMatrix)]) -> Result<ChannelFamily> {
    let ms = members
        .iter()
        .map(|(l, u)| Ok(member(l, KrausChannel::unitary(u)?, vec![])))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Unitary, ms)
}

pub fn make_custom(members: &[(&str, Vec<CMatrix>)]) -> Result<ChannelFamily> {
    let ms = members
        .iter()
        .map(|(l, k)| Ok(member(l, KrausChannel::new(k.clone())?, vec![])))
        .collect::<Result<Vec<_>>>()?;
    ChannelFamily::new(FamilyKind::Custom, ms)
}

/// Measurement family from explicit POVMs.
pub fn make_measurement(members: &[(&str, Povm)], structure: MeasurementStructure) -> Result<ChannelFamily> {
    let first = members.first().ok_or_else(|| Error::InvalidArgument("empty family".into()))?;
    let m = first.1.len();
    if members.iter().any(|(_, p)| p.len() != m || p.dim() != first.1.dim()) {
        return Err(Error::DimensionMismatch("POVMs differ in outcome count or dimension".into()));
    }
    let ms = members
        .iter()
        .map(|(l, p)| Ok(member(l, p.channel()?, vec![])))
        .collect::<Result<Vec<_>>>()?;
    let mut fam = ChannelFamily::new(FamilyKind::Measurement, ms)?;
    fam.measurement = Some(MeasurementData { povms: members.iter().map(|(_, p)| p.clone()).collect(), structure });
    Ok(fam)
}

/// M₊(i) = |v_i⟩⟨v_i| and M₋(i) = (tr M₊(i)·1 − M₊(i))/(d−1).
pub fn ortho_rank1_family(vectors: &[Vec<C64>]) -> Result<ChannelFamily> {
    let d = vectors.first().ok_or_else(|| Error::InvalidArgument("no vectors".into()))?.len();
    if d < 2 {
        return Err(Error::InvalidArgument("dimension must be at least 2".into()));
    }
    let plus: Vec<CMatrix> = vectors.iter().map(|v| CMatrix::projector(v)).collect();
    let minus: Vec<CMatrix> = plus
        .iter()
        .map(|m| (&CMatrix::identity(d).scale(m.trace()) - m).scale_re(1.0 / (d as f64 - 1.0)))
        .collect();
    make_measurement(
        &[("+", Povm::new(plus, DEFAULT_TOL)?), ("-", Povm::new(minus, DEFAULT_TOL)?)],
        MeasurementStructure::Orthogonal,
    )
}

/// The three-outcome qubit POVM with parameters a > b > 0 and its complement.
pub fn ab_povm_family(a: f64, b: f64) -> Result<ChannelFamily> {
    if !(a > b && b > 0.0) {
        return Err(Error::Constraint(format!("ab POVM: a > b > 0 (got a={}, b={})", a, b)));
    }
    let s = 0.5 / (a * a);
    let v1 = vec![r(a * s.sqrt()), r(b * s.sqrt())];
    let v2 = vec![r(a * s.sqrt()), r(-b * s.sqrt())];
    let v3 = vec![ZERO, r((2.0 * s * (a * a - b * b)).sqrt())];
    ortho_rank1_family(&[v1, v2, v3])
}

/// Residual of Σ_i U_i A U_i† = c tr(A) 1 over matrix units A.
pub fn twirl_residual(unitaries: &[CMatrix], c: f64) -> f64 {
    let d = unitaries[0].rows();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let a = CMatrix::unit(d, i, j);
            let mut s = CMatrix::zeros(d, d);
            for u in unitaries {
                s = &s + &u.conjugate_by(&a);
            }
            let want = if i == j { CMatrix::identity(d).scale_re(c) } else { CMatrix::zeros(d, d) };
            worst = worst.max(s.max_abs_diff(&want));
        }
    }
    worst
}

/// M_θ(i) = U_i M_θ U_i† / c for commuting unit-trace M₊, M₋.
pub fn rotated_family(unitaries: &[CMatrix], m_plus: &CMatrix, m_minus: &CMatrix) -> Result<ChannelFamily> {
    let d = m_plus.require_square()?;
    if unitaries.is_empty() || unitaries.iter().any(|u| u.rows() != d || u.unitarity_residual() > DEFAULT_TOL) {
        return Err(Error::NotUnitary("rotation set".into()));
    }
    let c = unitaries.len() as f64 / d as f64;
    let res = twirl_residual(unitaries, c);
    if res > 1e-9 {
        return Err(Error::Constraint(format!("rotation set: Σ U A U† = c tr(A) 1 fails ({:.3e})", res)));
    }
    if m_plus.commutator(m_minus).max_abs() > 1e-9 {
        return Err(Error::Constraint("rotated family: [M₊, M₋] = 0 fails".into()));
    }
    for (name, m) in [("M₊", m_plus), ("M₋", m_minus)] {
        if (m.trace() - r(1.0)).norm() > 1e-9 {
            return Err(Error::Constraint(format!("rotated family: tr {} = 1 fails", name)));
        }
        if !m.is_hermitian(1e-10) || eigvalsh(&m.hermitian_part())?[0] < -1e-9 {
            return Err(Error::Constraint(format!("rotated family: {} ≥ 0 fails", name)));
        }
    }
    let povm = |m: &CMatrix| -> Result<Povm> {
        Povm::new(unitaries.iter().map(|u| u.conjugate_by(m).scale_re(1.0 / c)).collect(), DEFAULT_TOL)
    };
    make_measurement(
        &[("+", povm(m_plus)?), ("-", povm(m_minus)?)],
        MeasurementStructure::Rotated {
            unitaries: unitaries.to_vec(),
            c,
            base: vec![m_plus.clone(), m_minus.clone()],
        },
    )
}

/// Orthonormal basis whose first vector is the normalized `e1`.
pub fn completed_basis(e1: &[C64]) -> Result<Vec<Vec<C64>>> {
    let d = e1.len();
    let n = vec_norm(e1);
    if n == 0.0 {
        return Err(Error::InvalidArgument("zero vector".into()));
    }
    let mut basis: Vec<Vec<C64>> = vec![e1.iter().map(|x| x / n).collect()];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = crate::numerics::basis_vec(d, k);
        for b in &basis {
            let p = inner(b, &v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= p * y;
            }
        }
        let nv = vec_norm(&v);
        if nv > 1e-8 {
            basis.push(v.iter().map(|x| x / nv).collect());
        }
    }
    Ok(basis)
}

/// Weyl-rotated family with M₊ = Σ α_j|e_j⟩⟨e_j|, M₋ = Σ β_j|e_j⟩⟨e_j| and
/// {e_j} completed from `e1`.
pub fn weyl_rotated_family(e1: &[C64], alpha: &[f64], beta: &[f64]) -> Result<ChannelFamily> {
    let d = e1.len();
    if alpha.len() != d || beta.len() != d {
        return Err(Error::InvalidArgument("α, β must have length d".into()));
    }
    let basis = completed_basis(e1)?;
    let mut mp = CMatrix::zeros(d, d);
    let mut mm = CMatrix::zeros(d, d);
    for ((e, &a), &b) in basis.iter().zip(alpha).zip(beta) {
        mp = &mp + &CMatrix::projector(e).scale_re(a);
        mm = &mm + &CMatrix::projector(e).scale_re(b);
    }
    rotated_family(&weyl_set(d), &mp, &mm)
}

/// Two-outcome family M₊ = (M, 1−M), M₋ = (1−M, M), M = diag(a).
pub fn diagonal_measurement_family(a: &[f64]) -> Result<ChannelFamily> {
    if a.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Constraint("diagonal measurement: 0 ≤ a_i ≤ 1".into()));
    }
    let m = CMatrix::diag_real(a);
    let one_minus = &CMatrix::identity(a.len()) - &m;
    make_measurement(
        &[
            ("+", Povm::new(vec![m.clone(), one_minus.clone()], DEFAULT_TOL)?),
            ("-", Povm::new(vec![one_minus, m], DEFAULT_TOL)?),
        ],
        MeasurementStructure::Diagonal { a: a.to_vec() },
    )
}

/// X^j Z^k for the pair (j, k); re-exported for presets.
pub fn weyl_op(d: usize, j: usize, k: usize) -> CMatrix {
    weyl(d, j, k)
}

/// Choi matrix check that a channel is gp: reconstructs it from its Bell weights.
pub fn gp_weights_of(ch: &KrausChannel) -> Result<Vec<f64>> {
    let d = ch.din();
    let w = super::bell_weights(&choi_of(ch))?;
    let clipped: Vec<f64> = w.iter().map(|x| x.max(0.0)).collect();
    let s: f64 = clipped.iter().sum();
    let normalized: Vec<f64> = clipped.iter().map(|x| x / s).collect();
    let rebuilt = choi_of(&gp_channel(d, &normalized)?);
    let res = rebuilt.matrix.max_abs_diff(&choi_of(ch).matrix);
    if res > 1e-9 {
        return Err(Error::Constraint(format!("channel is not generalized Pauli (residual {:.3e})", res)));
    }
    Ok(normalized)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{bell_weights, is_covariant, weyl_group_pairs};
    use crate::numerics::random::{random_simplex, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gp_identity_member() {
        let fam = make_gp(2, &[("id", vec![1.0, 0.0, 0.0, 0.0])]).unwrap();
        assert_eq!(fam.members()[0].channel, KrausChannel::identity(2));
    }

    #[test]
    fn gp_rejects_outside_simplex() {
        let e = make_gp(2, &[("x", vec![0.5, 0.6, -0.1, 0.0])]).unwrap_err();
        assert!(matches!(e, Error::Constraint(ref s) if s.contains("θ ≥ 0")));
        assert!(make_gp(2, &[("x", vec![0.5, 0.6, 0.0, 0.0])]).is_err());
    }

    #[test]
    fn gp_bell_weights_coincide_with_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for d in [2, 3] {
            for _ in 0..5 {
                let t = random_simplex(&mut rng, d * d);
                let ch = gp_channel(d, &t).unwrap();
                let w = bell_weights(&choi_of(&ch)).unwrap();
                for (a, b) in w.iter().zip(&t) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn damp_half_is_gp() {
        for xi in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let ch = damp_channel(0.5, xi).unwrap();
            let w = gp_weights_of(&ch).unwrap();
            let expect = xi_to_theta([(1.0 - xi) / 4.0, (1.0 - xi) / 4.0, (1.0 - xi.sqrt()).powi(2) / 4.0]);
            for (a, b) in w.iter().zip(&expect) {
                assert!((a - b).abs() < 1e-12, "xi={} {:?} {:?}", xi, w, expect);
            }
        }
        assert!(gp_weights_of(&damp_channel(1.0, 0.3).unwrap()).is_err());
        assert!(damp_channel(1.2, 0.3).is_err());
    }

    #[test]
    fn diag_members_are_gp_and_covariant() {
        let t = 0.5f64.sqrt();
        let fam = make_diag(2, &[("p", vec![t]), ("m", vec![-t])]).unwrap();
        let w0 = gp_weights_of(&fam.members()[0].channel).unwrap();
        let w1 = gp_weights_of(&fam.members()[1].channel).unwrap();
        assert!((w0[0] - 1.0).abs() < 1e-12);
        assert!((w1[1] - 1.0).abs() < 1e-12);
        // d = 4: two free entries on the circle 2(θ₁² + θ₂²) = 1
        let a = 0.6 * t;
        let b = 0.8 * t;
        let fam4 = make_diag(4, &[("a", vec![a, b]), ("b", vec![b, -a])]).unwrap();
        for m in fam4.members() {
            let w = gp_weights_of(&m.channel).unwrap();
            let rebuilt = gp_channel(4, &w).unwrap();
            assert!(choi_of(&rebuilt).matrix.max_abs_diff(&choi_of(&m.channel).matrix) < 1e-10);
        }
        assert!(is_covariant(&fam4, &weyl_group_pairs(4), 1e-10, false).unwrap());
        assert!(matches!(make_diag(2, &[("bad", vec![0.3])]), Err(Error::Constraint(_))));
    }

    #[test]
    fn cdep_range() {
        assert!(make_cdep(2, &[("a", 0.0), ("b", 1.0 / 3.0)]).is_ok());
        let e = make_cdep(2, &[("a", 0.5)]).unwrap_err();
        assert!(matches!(e, Error::Constraint(ref s) if s.contains("cdep")));
    }

    #[test]
    fn ou_family() {
        let fam = make_ou(&weyl_set(2), &[("a", vec![0.1, 0.2, 0.3]), ("b", vec![0.0, 0.0, 0.0])]).unwrap();
        let w = gp_weights_of(&fam.members()[0].channel).unwrap();
        assert!((w[0] - 0.4).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u = random_unitary(&mut rng, 2);
        let rotated: Vec<CMatrix> = weyl_set(2).iter().map(|w| u.matmul(w)).collect();
        assert!(make_ou(&rotated, &[("a", vec![0.2, 0.2, 0.2])]).is_ok());
        let bad = vec![CMatrix::identity(2), CMatrix::identity(2)];
        assert!(make_ou(&bad, &[("a", vec![0.5])]).is_err());
    }

    #[test]
    fn qubit_phase_choi_entries() {
        let ch = qubit_phase_channel(0.3, 0.4).unwrap();
        let w = choi_of(&ch).matrix;
        assert!((w[(0, 3)] - C64::new(0.3, -0.4)).norm() < 1e-12);
        assert!((w[(3, 0)] - C64::new(0.3, 0.4)).norm() < 1e-12);
        assert!((w[(0, 0)].re - 1.0).abs() < 1e-12 && (w[(3, 3)].re - 1.0).abs() < 1e-12);
        assert!(qubit_phase_channel(0.9, 0.9).is_err());
    }

    #[test]
    fn measurement_families_validate() {
        let fam = ab_povm_family(2.0, 1.0).unwrap();
        assert_eq!(fam.kind(), FamilyKind::Measurement);
        let data = fam.measurement().unwrap();
        for i in 0..3 {
            let prod = data.povms[0].elements[i].matmul(&data.povms[1].elements[i]);
            assert!(prod.max_abs() < 1e-12);
        }
        let e1 = vec![r(0.5), r(0.3), r(0.2)];
        let fam = weyl_rotated_family(&e1, &[0.6, 0.3, 0.1], &[0.2, 0.3, 0.5]).unwrap();
        assert_eq!(fam.measurement().unwrap().povms[0].len(), 9);
        assert!(diagonal_measurement_family(&[0.9, 0.5, 0.3]).is_ok());
        assert!(rotated_family(&weyl_set(2)[..2], &CMatrix::diag_real(&[0.5, 0.5]), &CMatrix::diag_real(&[0.5, 0.5]))
            .is_err());
    }

    #[test]
    fn select_keeps_structure() {
        let fam = make_gp_xi(&[("a", [0.1, 0.0, 0.0]), ("b", [0.2, 0.0, 0.0]), ("c", [0.3, 0.0, 0.0])]).unwrap();
        let sub = fam.select(&[2, 0]).unwrap();
        assert_eq!(sub.members()[0].label, "c");
        assert!(fam.select(&[5]).is_err());
    }
}
