//! When a product input does as well as the maximally entangled one: qubit
//! Pauli families, PPT entanglement breaking and structured measurements.

use serde::Serialize;

use crate::channels::{
    choi_of, gp_weights_of, theta_to_xi, xi_to_theta, ChannelFamily, KrausChannel, MeasurementStructure,
};
use crate::error::{Error, Result};
use crate::numerics::{
    eigvalsh, inner, partial_transpose, simultaneous_diagonalize, singular_values, vec_norm, CMatrix, C64,
    SystemShape,
};
use crate::optimal_inputs::PureState;

const CONDITION_TOL: f64 = 1e-10;
const EB_TOL: f64 = 1e-12;

/// Qubit Pauli weights ξ = (ξ¹, ξ², ξ³) of X, Y, Z with ξ⁰ = 1 − Σξ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GpParams {
    xi: [f64; 3],
}

impl GpParams {
    pub fn new(xi: [f64; 3]) -> Result<Self> {
        let p = GpParams { xi };
        if p.all().iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x)) {
            return Err(Error::Constraint(format!("ξ = {:?}: every weight including ξ⁰ must lie in [0,1]", xi)));
        }
        Ok(p)
    }

    pub fn xi(&self) -> [f64; 3] {
        self.xi
    }

    pub fn xi0(&self) -> f64 {
        1.0 - self.xi[0] - self.xi[1] - self.xi[2]
    }

    /// (ξ⁰, ξ¹, ξ², ξ³)
    pub fn all(&self) -> [f64; 4] {
        [self.xi0(), self.xi[0], self.xi[1], self.xi[2]]
    }

    pub fn theta(&self) -> Vec<f64> {
        xi_to_theta(self.xi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlochVector {
    r: [f64; 3],
}

impl BlochVector {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if n > 1.0 + 1e-10 || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("Bloch vector norm {} exceeds 1", n)));
        }
        Ok(BlochVector { r })
    }

    pub fn r(&self) -> [f64; 3] {
        self.r
    }

    /// (1 + r·σ)/2
    pub fn state(&self) -> CMatrix {
        let [x, y, z] = self.r;
        CMatrix::from_rows(&[
            vec![C64::new((1.0 + z) / 2.0, 0.0), C64::new(x / 2.0, -y / 2.0)],
            vec![C64::new(x / 2.0, y / 2.0), C64::new((1.0 - z) / 2.0, 0.0)],
        ])
        .expect("2x2")
    }

    pub fn of_state(rho: &CMatrix) -> Result<Self> {
        if rho.rows() != 2 || rho.cols() != 2 {
            return Err(Error::DimensionMismatch("Bloch vectors need a qubit state".into()));
        }
        Self::new([2.0 * rho[(1, 0)].re, 2.0 * rho[(1, 0)].im, (rho[(0, 0)] - rho[(1, 1)]).re])
    }

    /// Pure state with this (unit) Bloch vector.
    pub fn pure_amplitudes(&self) -> Vec<C64> {
        let e = crate::numerics::eigh(&self.state()).expect("2x2 Hermitian");
        e.vector(1)
    }
}

/// Contraction coefficients (a¹, a², a³): the channel acts on Bloch vectors as diag(a).
pub fn bloch_contraction(p: &GpParams) -> [f64; 3] {
    let [x, y, z] = p.xi;
    [1.0 - 2.0 * y - 2.0 * z, 1.0 - 2.0 * x - 2.0 * z, 1.0 - 2.0 * x - 2.0 * y]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlochAxis {
    X,
    Y,
    Z,
}

impl BlochAxis {
    pub const ALL: [BlochAxis; 3] = [BlochAxis::X, BlochAxis::Y, BlochAxis::Z];

    pub fn index(&self) -> usize {
        match self {
            BlochAxis::X => 0,
            BlochAxis::Y => 1,
            BlochAxis::Z => 2,
        }
    }

    pub fn unit(&self) -> BlochVector {
        let mut r = [0.0; 3];
        r[self.index()] = 1.0;
        BlochVector { r }
    }

    /// |e⟩_in |0⟩_R with e the +1 eigenvector of the axis Pauli.
    pub fn product_input(&self) -> PureState {
        let e = self.unit().pure_amplitudes();
        let amp = crate::numerics::kron_vec(&e, &crate::numerics::basis_vec(2, 0));
        PureState::new(amp, SystemShape::pair(2, 2)).expect("unit vector")
    }
}

/// ξ of every member of a qubit family of Pauli channels.
pub fn gp_params_of(fam: &ChannelFamily) -> Result<Vec<GpParams>> {
    if fam.din() != 2 || fam.dout() != 2 {
        return Err(Error::WrongKind { expected: "qubit Pauli family".into(), found: fam.kind().name().into() });
    }
    fam.members()
        .iter()
        .map(|m| {
            let theta = gp_weights_of(&m.channel).map_err(|_| Error::WrongKind {
                expected: "qubit Pauli family".into(),
                found: format!("{} (member '{}')", fam.kind().name(), m.label),
            })?;
            GpParams::new(theta_to_xi(&theta))
        })
        .collect()
}

/// For each axis, whether both weight ratios of the pair agree so that the axis
/// product input reproduces the Φ₂ curve.
pub fn axis_conditions(p: &GpParams, m: &GpParams) -> [bool; 3] {
    let a = p.all();
    let b = m.all();
    let eq = |i: usize, j: usize| (a[i] * b[j] - b[i] * a[j]).abs() <= CONDITION_TOL;
    [eq(1, 0) && eq(2, 3), eq(2, 0) && eq(3, 1), eq(3, 0) && eq(1, 2)]
}

/// Second singular value of the centred ξ matrix is negligible against the first.
pub fn is_collinear(params: &[GpParams]) -> bool {
    if params.len() < 3 {
        return true;
    }
    let n = params.len() as f64;
    let mean: Vec<f64> = (0..3).map(|k| params.iter().map(|p| p.xi[k]).sum::<f64>() / n).collect();
    let m = CMatrix::from_fn(params.len(), 3, |i, k| C64::new(params[i].xi[k] - mean[k], 0.0));
    let mut sv = singular_values(&m).expect("finite matrix");
    sv.sort_by(|a, b| b.total_cmp(a));
    sv[0] == 0.0 || sv[1] <= 1e-9 * sv[0]
}

/// ‖(Λ₊ − sΛ₋)⊗I(Φ₂)‖₁ = Σ_k |ξ₊^k − s ξ₋^k|
pub fn phi_curve(p: &GpParams, m: &GpParams, s: f64) -> f64 {
    p.all().iter().zip(m.all()).map(|(a, b)| (a - s * b).abs()).sum()
}

/// Supremum over pure product inputs of ‖Λ₊(ρ) − sΛ₋(ρ)‖₁, which is
/// max(|1 − s|, max_k |a₊^k − s a₋^k|).
pub fn product_curve_sup(p: &GpParams, m: &GpParams, s: f64) -> f64 {
    let (ap, am) = (bloch_contraction(p), bloch_contraction(m));
    (0..3).map(|k| (ap[k] - s * am[k]).abs()).fold((1.0 - s).abs(), f64::max)
}

/// Curve of the axis product input, max(|1 − s|, |a₊ − s a₋|) on that axis.
pub fn axis_curve(p: &GpParams, m: &GpParams, axis: BlochAxis, s: f64) -> f64 {
    let k = axis.index();
    (1.0 - s).abs().max((bloch_contraction(p)[k] - s * bloch_contraction(m)[k]).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdvantageWitness {
    pub pair: (usize, usize),
    pub s: f64,
    /// Φ₂ curve minus the best product-input curve at `s`.
    pub gap: f64,
}

/// Largest advantage of Φ₂ over all product inputs, located exactly among the
/// kinks of both piecewise-linear curves.
pub fn strict_advantage(p: &GpParams, m: &GpParams) -> (f64, f64) {
    let (pa, ma) = (p.all(), m.all());
    let mut cand: Vec<f64> = crate::comparison::default_grid();
    cand.extend(pa.iter().zip(&ma).filter(|(_, b)| **b > 0.0).map(|(a, b)| a / b));
    let (ap, am) = (bloch_contraction(p), bloch_contraction(m));
    let mut pieces = vec![(1.0, 1.0)];
    pieces.extend((0..3).map(|k| (ap[k], am[k])));
    for (i, &(u1, v1)) in pieces.iter().enumerate() {
        if v1 != 0.0 {
            cand.push(u1 / v1);
        }
        for &(u2, v2) in &pieces[i + 1..] {
            for sign in [1.0, -1.0] {
                let den = v1 - sign * v2;
                if den.abs() > 1e-15 {
                    cand.push((u1 - sign * u2) / den);
                }
            }
        }
    }
    cand.into_iter()
        .filter(|s| s.is_finite() && *s >= 0.0)
        .map(|s| (s, phi_curve(p, m, s) - product_curve_sup(p, m, s)))
        .fold((0.0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableReport {
    pub suffices: bool,
    pub collinear: bool,
    /// Axis flags for the first distinct member pair.
    pub conditions: Option<[bool; 3]>,
    pub axis: Option<BlochAxis>,
    pub witness: Option<AdvantageWitness>,
}

/// Decides whether a product input is as informative as Φ₂ for a qubit Pauli family.
pub fn separable_suffices(fam: &ChannelFamily) -> Result<SeparableReport> {
    let params = gp_params_of(fam)?;
    let n = params.len();
    let distinct = |i: usize, j: usize| {
        params[i].xi.iter().zip(&params[j].xi).any(|(a, b)| (a - b).abs() > CONDITION_TOL)
    };
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| distinct(i, j)).collect();
    let collinear = is_collinear(&params);
    let Some(&(i0, j0)) = pairs.first() else {
        return Ok(SeparableReport {
            suffices: true,
            collinear,
            conditions: None,
            axis: Some(BlochAxis::X),
            witness: None,
        });
    };
    let flags = axis_conditions(&params[i0], &params[j0]);
    let axis = BlochAxis::ALL.into_iter().find(|a| flags[a.index()]);
    if collinear && axis.is_some() {
        return Ok(SeparableReport { suffices: true, collinear, conditions: Some(flags), axis, witness: None });
    }
    let witness = pairs
        .iter()
        .filter(|&&(i, j)| !axis_conditions(&params[i], &params[j]).iter().any(|&f| f))
        .map(|&(i, j)| {
            let (s, gap) = strict_advantage(&params[i], &params[j]);
            AdvantageWitness { pair: (i, j), s, gap }
        })
        .max_by(|a, b| a.gap.total_cmp(&b.gap));
    Ok(SeparableReport { suffices: false, collinear, conditions: Some(flags), axis: None, witness })
}

/// Closed-form PPT test for a qubit Pauli channel: every Bell weight is at most ½.
pub fn entanglement_breaking_gp(p: &GpParams) -> bool {
    let [x0, x1, x2, x3] = p.all();
    x0 + x3 >= (x1 - x2).abs() - EB_TOL && x1 + x2 >= (x0 - x3).abs() - EB_TOL
}

/// Smallest eigenvalue of the partial transpose of the normalized Choi state.
pub fn ppt_min_eigenvalue(ch: &KrausChannel) -> Result<f64> {
    let choi = choi_of(ch);
    let w = choi.matrix.scale_re(1.0 / ch.din() as f64);
    let pt = partial_transpose(&w, &SystemShape::pair(ch.dout(), ch.din()), 1)?;
    Ok(eigvalsh(&pt.hermitian_part())?[0])
}

/// Σ_j |γ_j|² α_j / Σ_j |γ_j|² β_j
pub fn weighted_ratio(alpha: &[f64], beta: &[f64], gamma: &[C64]) -> f64 {
    let w: Vec<f64> = gamma.iter().map(|g| g.norm_sqr()).collect();
    let num: f64 = w.iter().zip(alpha).map(|(a, b)| a * b).sum();
    let den: f64 = w.iter().zip(beta).map(|(a, b)| a * b).sum();
    num / den
}

/// max |Σ U_i† B U_i − c tr(B) 1|
pub fn adjoint_twirl_residual(unitaries: &[CMatrix], c: f64, b: &CMatrix) -> f64 {
    let d = b.rows();
    let mut s = CMatrix::zeros(d, d);
    for u in unitaries {
        s = &s + &u.adjoint().matmul(b).matmul(u);
    }
    s.max_abs_diff(&CMatrix::identity(d).scale(b.trace() * c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeCase {
    /// M₊(i)|ψ⟩ = 0
    Annihilates,
    /// M₊(i) ∝ |ψ⟩⟨ψ|
    Proportional,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasDetail {
    Orthogonal {
        outcomes: Vec<OutcomeCase>,
        /// ⟨ψ|M₊(i)|ψ⟩⟨ψ|M₋(i)|ψ⟩ per outcome.
        products: Vec<f64>,
    },
    Rotated {
        /// Eigenvector index j with U_i†|ψ⟩ ∝ |e_j⟩, per rotation i.
        assignment: Vec<Option<usize>>,
        phases: Vec<Option<C64>>,
        counts: Vec<usize>,
        c: f64,
        ratios_distinct: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasSeparableReport {
    pub matches_phi: bool,
    pub detail: MeasDetail,
}

/// Whether the product input |ψ_in⟩|ψ_R⟩ is as informative as Φ_d for a
/// structured binary measurement family.
pub fn meas_separable_check(fam: &ChannelFamily, psi_in: &[C64]) -> Result<MeasSeparableReport> {
    let data = fam.measurement().ok_or_else(|| Error::WrongKind {
        expected: "measurement".into(),
        found: fam.kind().name().into(),
    })?;
    if data.povms.len() != 2 {
        return Err(Error::InvalidArgument("need exactly two measurement members".into()));
    }
    let d = fam.din();
    if psi_in.len() != d {
        return Err(Error::DimensionMismatch(format!("ψ_in has length {}, expected {}", psi_in.len(), d)));
    }
    let n = vec_norm(psi_in);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("ψ_in norm {} is not 1", n)));
    }
    let tol = 1e-8;
    match &data.structure {
        MeasurementStructure::Orthogonal => {
            let mut outcomes = Vec::new();
            let mut products = Vec::new();
            for (mp, mm) in data.povms[0].elements.iter().zip(&data.povms[1].elements) {
                let mv = mp.mat_vec(psi_in);
                let ep = inner(psi_in, &mv).re;
                let em = inner(psi_in, &mm.mat_vec(psi_in)).re;
                products.push(ep * em);
                let case = if vec_norm(&mv) <= tol {
                    OutcomeCase::Annihilates
                } else if mp.max_abs_diff(&CMatrix::projector(psi_in).scale_re(ep)) <= tol {
                    OutcomeCase::Proportional
                } else {
                    OutcomeCase::Neither
                };
                outcomes.push(case);
            }
            let matches_phi = products.iter().all(|p| p.abs() <= tol);
            Ok(MeasSeparableReport { matches_phi, detail: MeasDetail::Orthogonal { outcomes, products } })
        }
        MeasurementStructure::Rotated { unitaries, c, base } => {
            let basis = simultaneous_diagonalize(&base[0], &base[1], 1e-9)?;
            let e: Vec<Vec<C64>> = (0..d).map(|j| basis.col(j)).collect();
            let alpha: Vec<f64> = e.iter().map(|v| inner(v, &base[0].mat_vec(v)).re).collect();
            let beta: Vec<f64> = e.iter().map(|v| inner(v, &base[1].mat_vec(v)).re).collect();
            let mut ratios: Vec<f64> = alpha.iter().zip(&beta).map(|(a, b)| a / b).collect();
            ratios.sort_by(f64::total_cmp);
            let ratios_distinct = ratios.windows(2).all(|w| (w[1] - w[0]).abs() > 1e-12 || !w[0].is_finite());
            let mut assignment = Vec::new();
            let mut phases = Vec::new();
            let mut counts = vec![0usize; d];
            for u in unitaries {
                let v = u.adjoint().mat_vec(psi_in);
                let hit = e.iter().enumerate().map(|(j, ej)| (j, inner(ej, &v))).find(|(_, o)| o.norm() >= 1.0 - tol);
                match hit {
                    Some((j, o)) => {
                        counts[j] += 1;
                        assignment.push(Some(j));
                        phases.push(Some(o.conj() / o.norm()));
                    }
                    None => {
                        assignment.push(None);
                        phases.push(None);
                    }
                }
            }
            let matches_phi =
                assignment.iter().all(Option::is_some) && counts.iter().all(|&k| (k as f64 - c).abs() < 1e-9);
            Ok(MeasSeparableReport {
                matches_phi,
                detail: MeasDetail::Rotated { assignment, phases, counts, c: *c, ratios_distinct },
            })
        }
        _ => Err(Error::WrongKind {
            expected: "orthogonal or rotated measurement family".into(),
            found: "unstructured measurement family".into(),
        }),
    }
}

/// Evenly spread unit Bloch vectors (Fibonacci lattice).
pub fn bloch_grid(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let rho = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            BlochVector { r: [rho * phi.cos(), rho * phi.sin(), z] }
        })
        .collect()
}
