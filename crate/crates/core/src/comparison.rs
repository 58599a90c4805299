//! Trace-norm sweep curves, dominance verdicts, Bayes risk and a CPTP
//! feasibility solver for state-family comparison.

use std::fmt::Write as _;

use serde::Serialize;

use crate::channels::ChoiMatrix;
use crate::error::{Error, Result};
use crate::numerics::{
    check_density, eigh, inner, simultaneous_diagonalize, trace_norm, vec_norm, CMatrix, C64,
};

pub const COMMUTE_TOL: f64 = 1e-9;
const DENSITY_TOL: f64 = 1e-8;

/// {0} ∪ 200 geometric points on [1e−3, 1e3].
pub fn default_grid() -> Vec<f64> {
    let n = 200;
    let mut g = vec![0.0];
    g.extend((0..n).map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (n - 1) as f64)));
    g
}

/// `n` evenly spaced points on [0, s_max].
pub fn uniform_grid(s_max: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![0.0];
    }
    (0..n).map(|k| s_max * k as f64 / (n - 1) as f64).collect()
}

pub fn commutes(a: &CMatrix, b: &CMatrix) -> bool {
    a.commutator(b).max_abs() <= COMMUTE_TOL
}

/// Samples of s ↦ ‖ρ₊ − sρ₋‖₁.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepCurve {
    pub s_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub breakpoints: Vec<f64>,
    pub is_breakpoint: Vec<bool>,
    /// True when the pair commutes and `norms` come from the exact joint spectrum.
    pub exact: bool,
}

impl SweepCurve {
    pub fn len(&self) -> usize {
        self.s_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_values.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,norm,is_breakpoint\n");
        for ((s, n), b) in self.s_values.iter().zip(&self.norms).zip(&self.is_breakpoint) {
            let _ = writeln!(out, "{},{},{}", s, n, b);
        }
        out
    }

    /// Largest amount by which an interior sample exceeds the chord of its neighbours.
    pub fn convexity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..self.len().saturating_sub(1) {
            let (s0, s1, s2) = (self.s_values[k - 1], self.s_values[k], self.s_values[k + 1]);
            if s2 <= s0 {
                continue;
            }
            let t = (s1 - s0) / (s2 - s0);
            let chord = (1.0 - t) * self.norms[k - 1] + t * self.norms[k + 1];
            worst = worst.max(self.norms[k] - chord);
        }
        worst
    }
}

/// Joint spectrum (p_k, q_k) of a commuting Hermitian pair.
pub fn joint_spectrum(a: &CMatrix, b: &CMatrix) -> Result<Vec<(f64, f64)>> {
    let v = simultaneous_diagonalize(a, b, 1e-9)?;
    let da = v.adjoint().matmul(a).matmul(&v);
    let db = v.adjoint().matmul(b).matmul(&v);
    Ok((0..a.rows()).map(|k| (da[(k, k)].re, db[(k, k)].re)).collect())
}

fn validate_pair(rho_plus: &CMatrix, rho_minus: &CMatrix) -> Result<()> {
    if rho_plus.rows() != rho_minus.rows() || rho_plus.cols() != rho_minus.cols() {
        return Err(Error::DimensionMismatch(format!(
            "state pair {}x{} vs {}x{}",
            rho_plus.rows(),
            rho_plus.cols(),
            rho_minus.rows(),
            rho_minus.cols()
        )));
    }
    check_density(rho_plus, DENSITY_TOL)?;
    check_density(rho_minus, DENSITY_TOL)
}

fn merge_grid(grid: &[f64], breakpoints: &[f64]) -> (Vec<f64>, Vec<bool>) {
    let mut pts: Vec<(f64, bool)> = grid.iter().map(|&s| (s, false)).collect();
    pts.extend(breakpoints.iter().map(|&s| (s, true)));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, bool)> = Vec::with_capacity(pts.len());
    for (s, b) in pts {
        match out.last_mut() {
            Some(last) if (s - last.0).abs() <= 1e-12 * s.abs().max(1.0) => {
                if b {
                    last.1 = true;
                } else {
                    last.0 = s;
                }
            }
            _ => out.push((s, b)),
        }
    }
    out.into_iter().unzip()
}

/// Breakpoints p_k/q_k of a commuting pair, or `None` if the pair does not commute.
pub fn exact_breakpoints(rho_plus: &CMatrix, rho_minus: &CMatrix) -> Result<Option<Vec<f64>>> {
    if !commutes(rho_plus, rho_minus) {
        return Ok(None);
    }
    let mut bp: Vec<f64> = joint_spectrum(rho_plus, rho_minus)?
        .into_iter()
        .filter(|&(p, q)| q > 1e-12 && p > 1e-12)
        .map(|(p, q)| p / q)
        .collect();
    bp.sort_by(f64::total_cmp);
    bp.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
    Ok(Some(bp))
}

/// Evaluates ‖ρ₊ − sρ₋‖₁ on `grid` (default grid if `None`) plus any exact breakpoints.
pub fn gap_curve(rho_plus: &CMatrix, rho_minus: &CMatrix, grid: Option<&[f64]>) -> Result<SweepCurve> {
    curve_with_extra(rho_plus, rho_minus, grid, &[])
}

fn curve_with_extra(rho_plus: &CMatrix, rho_minus: &CMatrix, grid: Option<&[f64]>, extra: &[f64]) -> Result<SweepCurve> {
    validate_pair(rho_plus, rho_minus)?;
    let base = grid.map(<[f64]>::to_vec).unwrap_or_else(default_grid);
    if let Some(s) = base.iter().chain(extra).find(|s| !(**s >= 0.0) || !s.is_finite()) {
        return Err(Error::InvalidArgument(format!("negative or non-finite s = {}", s)));
    }
    let mut all = base;
    all.extend_from_slice(extra);
    let bp = exact_breakpoints(rho_plus, rho_minus)?;
    let (s_values, is_breakpoint) = merge_grid(&all, bp.as_deref().unwrap_or(&[]));
    let norms = match &bp {
        Some(_) => {
            let spec = joint_spectrum(rho_plus, rho_minus)?;
            s_values.iter().map(|&s| spec.iter().map(|(p, q)| (p - s * q).abs()).sum()).collect()
        }
        None => s_values
            .iter()
            .map(|&s| trace_norm(&(rho_plus - &rho_minus.scale_re(s))))
            .collect::<Result<Vec<f64>>>()?,
    };
    Ok(SweepCurve { s_values, norms, breakpoints: bp.clone().unwrap_or_default(), is_breakpoint, exact: bp.is_some() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Dominates,
    Dominated,
    Equivalent,
    Incomparable,
    Inconclusive,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::Dominates => "dominates",
            Relation::Dominated => "dominated",
            Relation::Equivalent => "equivalent",
            Relation::Incomparable => "incomparable",
            Relation::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SweepNecessary,
    SweepSufficientCommuting,
    RandomizationCertificate,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::SweepNecessary => "sweep-necessary",
            Method::SweepSufficientCommuting => "sweep-sufficient-commuting",
            Method::RandomizationCertificate => "randomization-certificate",
        }
    }
}

/// Result of comparing a candidate family of output states with a challenger.
///
/// `witness_s` is where the candidate curve falls furthest below the
/// challenger curve and `gap` the shortfall there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonVerdict {
    pub relation: Relation,
    pub witness_s: Option<f64>,
    pub gap: Option<f64>,
    pub method: Method,
    /// Member pair realizing the witness for families larger than two.
    pub pair: Option<(usize, usize)>,
}

fn families_identical(a: &[CMatrix], b: &[CMatrix], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.rows() == y.rows() && x.max_abs_diff(y) <= tol)
}

/// Compares two families of output states member by member.
pub fn dominance_check(
    candidate: &[CMatrix],
    challenger: &[CMatrix],
    grid: Option<&[f64]>,
    tol: f64,
) -> Result<ComparisonVerdict> {
    if candidate.len() != challenger.len() || candidate.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "families need equal size ≥ 2 (got {} and {})",
            candidate.len(),
            challenger.len()
        )));
    }
    for m in candidate.iter().chain(challenger) {
        check_density(m, DENSITY_TOL)?;
    }
    if families_identical(candidate, challenger, tol) {
        return Ok(ComparisonVerdict {
            relation: Relation::Equivalent,
            witness_s: None,
            gap: None,
            method: Method::RandomizationCertificate,
            pair: None,
        });
    }
    if candidate.len() == 2 {
        return pair_check(&candidate[0], &candidate[1], &challenger[0], &challenger[1], grid, tol);
    }
    let mut worst: Option<(ComparisonVerdict, f64)> = None;
    let mut challenger_fails = false;
    for i in 0..candidate.len() {
        for j in i + 1..candidate.len() {
            let mut v = pair_check(&candidate[i], &candidate[j], &challenger[i], &challenger[j], grid, tol)?;
            v.pair = Some((i, j));
            challenger_fails |= matches!(v.relation, Relation::Dominates | Relation::Incomparable)
                || (v.relation == Relation::Inconclusive && v.gap.is_none_or(|g| g < -tol));
            if let (Some(g), true) = (v.gap, matches!(v.relation, Relation::Dominated | Relation::Incomparable)) {
                if worst.as_ref().is_none_or(|(_, w)| g > *w) {
                    worst = Some((v, g));
                }
            }
        }
    }
    Ok(match worst {
        Some((mut v, _)) => {
            if challenger_fails {
                v.relation = Relation::Incomparable;
            }
            v.method = Method::SweepNecessary;
            v
        }
        None => ComparisonVerdict {
            relation: Relation::Inconclusive,
            witness_s: None,
            gap: None,
            method: Method::SweepNecessary,
            pair: None,
        },
    })
}

/// Pairwise comparison of (ρ₊, ρ₋) against (σ₊, σ₋).
pub fn pair_check(
    cand_plus: &CMatrix,
    cand_minus: &CMatrix,
    chal_plus: &CMatrix,
    chal_minus: &CMatrix,
    grid: Option<&[f64]>,
    tol: f64,
) -> Result<ComparisonVerdict> {
    let mut extra = exact_breakpoints(cand_plus, cand_minus)?.unwrap_or_default();
    extra.extend(exact_breakpoints(chal_plus, chal_minus)?.unwrap_or_default());
    let fc = curve_with_extra(cand_plus, cand_minus, grid, &extra)?;
    let fh = curve_with_extra(chal_plus, chal_minus, grid, &extra)?;
    debug_assert_eq!(fc.s_values, fh.s_values);
    let (mut kmin, mut kmax) = (0, 0);
    let diff: Vec<f64> = fc.norms.iter().zip(&fh.norms).map(|(a, b)| a - b).collect();
    for k in 0..diff.len() {
        if diff[k] < diff[kmin] {
            kmin = k;
        }
        if diff[k] > diff[kmax] {
            kmax = k;
        }
    }
    let cand_ge = diff[kmin] >= -tol;
    let chal_ge = diff[kmax] <= tol;
    let (cc, hc) = (fc.exact, fh.exact);
    let witness = (Some(fc.s_values[kmin]), Some(-diff[kmin]));
    let (relation, method, (witness_s, gap)) = match (cand_ge, chal_ge) {
        (true, true) if cc && hc => (Relation::Equivalent, Method::SweepSufficientCommuting, (None, None)),
        (true, true) if cc => (Relation::Dominates, Method::SweepSufficientCommuting, (None, None)),
        (true, true) if hc => (Relation::Dominated, Method::SweepSufficientCommuting, witness),
        (true, true) => (Relation::Inconclusive, Method::SweepNecessary, (None, None)),
        (true, false) if cc => (Relation::Dominates, Method::SweepSufficientCommuting, (None, None)),
        (true, false) => (Relation::Inconclusive, Method::SweepNecessary, (None, None)),
        (false, true) if hc => (Relation::Dominated, Method::SweepSufficientCommuting, witness),
        (false, true) => (Relation::Dominated, Method::SweepNecessary, witness),
        (false, false) => (Relation::Incomparable, Method::SweepNecessary, witness),
    };
    Ok(ComparisonVerdict { relation, witness_s, gap, method, pair: None })
}

/// True iff a CPTP map sends ψ± to φ±, i.e. |⟨ψ₊|ψ₋⟩| ≤ |⟨φ₊|φ₋⟩| + tol.
pub fn alberti_uhlmann(psi_plus: &[C64], psi_minus: &[C64], phi_plus: &[C64], phi_minus: &[C64], tol: f64) -> Result<bool> {
    for (name, v) in [("ψ₊", psi_plus), ("ψ₋", psi_minus), ("φ₊", phi_plus), ("φ₋", phi_minus)] {
        if (vec_norm(v) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("{} is not a unit vector", name)));
        }
    }
    if psi_plus.len() != psi_minus.len() || phi_plus.len() != phi_minus.len() {
        return Err(Error::DimensionMismatch("vector pair lengths differ".into()));
    }
    Ok(inner(psi_plus, psi_minus).norm() <= inner(phi_plus, phi_minus).norm() + tol)
}

/// Optimal 0–1 Bayes risk ½(1 − ‖πρ₊ − (1−π)ρ₋‖₁).
pub fn bayes_binary_risk(rho_plus: &CMatrix, rho_minus: &CMatrix, prior: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&prior) {
        return Err(Error::InvalidArgument(format!("prior {} outside [0,1]", prior)));
    }
    validate_pair(rho_plus, rho_minus)?;
    let m = &rho_plus.scale_re(prior) - &rho_minus.scale_re(1.0 - prior);
    Ok(0.5 * (1.0 - trace_norm(&m)?))
}

#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub choi: ChoiMatrix,
    pub residual: f64,
    pub iterations: usize,
}

/// Real coordinates x of a Hermitian n×n matrix with ‖x‖₂ = ‖W‖_F.
struct HermCoords {
    n: usize,
}

impl HermCoords {
    fn len(&self) -> usize {
        self.n * self.n
    }

    fn basis(&self, t: usize) -> Vec<(usize, usize, C64)> {
        let n = self.n;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        if t < n {
            return vec![(t, t, C64::new(1.0, 0.0))];
        }
        let u = t - n;
        let pair = u / 2;
        let (mut k, mut rem) = (0, pair);
        while rem >= n - 1 - k {
            rem -= n - 1 - k;
            k += 1;
        }
        let l = k + 1 + rem;
        if u % 2 == 0 {
            vec![(k, l, C64::new(h, 0.0)), (l, k, C64::new(h, 0.0))]
        } else {
            vec![(k, l, C64::new(0.0, h)), (l, k, C64::new(0.0, -h))]
        }
    }

    fn to_matrix(&self, x: &[f64]) -> CMatrix {
        let mut w = CMatrix::zeros(self.n, self.n);
        for (t, &v) in x.iter().enumerate() {
            for (i, j, e) in self.basis(t) {
                w[(i, j)] += e * v;
            }
        }
        w
    }

    fn from_matrix(&self, w: &CMatrix) -> Vec<f64> {
        let s2 = std::f64::consts::SQRT_2;
        let mut x = Vec::with_capacity(self.len());
        x.extend((0..self.n).map(|k| w[(k, k)].re));
        for k in 0..self.n {
            for l in k + 1..self.n {
                let z = (w[(k, l)] + w[(l, k)].conj()) * 0.5;
                x.push(s2 * z.re);
                x.push(s2 * z.im);
            }
        }
        x
    }
}

/// Real constraint values Γ_W(ρ_θ) (upper triangle) and tr_out W.
fn constraint_values(w: &CMatrix, sources: &[CMatrix], din: usize, dout: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut push = |m: &CMatrix| {
        for a in 0..m.rows() {
            out.push(m[(a, a)].re);
            for b in a + 1..m.rows() {
                out.push(m[(a, b)].re);
                out.push(m[(a, b)].im);
            }
        }
    };
    let choi = ChoiMatrix { matrix: w.clone(), din, dout };
    for rho in sources {
        push(&choi.apply(rho).expect("dimensions checked"));
    }
    push(&choi.input_marginal());
    out
}

/// Pseudo-inverse projector data for the affine set {x : A x = b}.
struct AffineSet {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    pinv: Vec<Vec<f64>>,
}

impl AffineSet {
    fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        self.a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    fn violation(&self, x: &[f64]) -> Vec<f64> {
        self.apply_a(x).iter().zip(&self.b).map(|(p, q)| p - q).collect()
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let r = self.violation(x);
        let mut y = x.to_vec();
        for (t, yt) in y.iter_mut().enumerate() {
            *yt -= self.pinv[t].iter().zip(&r).map(|(p, q)| p * q).sum::<f64>();
        }
        y
    }
}

fn build_affine(coords: &HermCoords, sources: &[CMatrix], targets: &[CMatrix], din: usize, dout: usize) -> Result<AffineSet> {
    let nx = coords.len();
    let cols: Vec<Vec<f64>> = (0..nx)
        .map(|t| {
            let mut e = vec![0.0; nx];
            e[t] = 1.0;
            constraint_values(&coords.to_matrix(&e), sources, din, dout)
        })
        .collect();
    let m = cols[0].len();
    let a: Vec<Vec<f64>> = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let mut b = Vec::with_capacity(m);
    let mut push = |mm: &CMatrix| {
        for p in 0..mm.rows() {
            b.push(mm[(p, p)].re);
            for q in p + 1..mm.rows() {
                b.push(mm[(p, q)].re);
                b.push(mm[(p, q)].im);
            }
        }
    };
    for s in targets {
        push(s);
    }
    push(&CMatrix::identity(din));
    // (A Aᵀ)⁺ through its spectrum
    let gram = CMatrix::from_fn(m, m, |i, j| C64::new(a[i].iter().zip(&a[j]).map(|(p, q)| p * q).sum(), 0.0));
    let e = eigh(&gram)?;
    let cutoff = 1e-10 * e.values.last().copied().unwrap_or(1.0).max(1e-300);
    let ginv = e.reconstruct_with(|x| if x > cutoff { 1.0 / x } else { 0.0 });
    let pinv: Vec<Vec<f64>> = (0..nx)
        .map(|t| (0..m).map(|j| (0..m).map(|i| a[i][t] * ginv[(i, j)].re).sum()).collect())
        .collect();
    Ok(AffineSet { a, b, pinv })
}

fn project_psd(coords: &HermCoords, x: &[f64]) -> Result<Vec<f64>> {
    let w = coords.to_matrix(x);
    let clipped = eigh(&w)?.reconstruct_with(|v| v.max(0.0));
    Ok(coords.from_matrix(&clipped))
}

/// (1 ⊗ T^{−1/2}) W (1 ⊗ T^{−1/2}) with T = tr_out W, so the result is exactly trace preserving.
fn normalize_marginal(w: &CMatrix, din: usize, dout: usize) -> Result<CMatrix> {
    let t = ChoiMatrix { matrix: w.clone(), din, dout }.input_marginal();
    let e = eigh(&t)?;
    if e.values[0] <= 1e-12 {
        return Ok(w.clone());
    }
    let a = crate::numerics::tensor(&CMatrix::identity(dout), &e.reconstruct_with(|v| 1.0 / v.sqrt()));
    Ok(a.matmul(w).matmul(&a).hermitian_part())
}

/// Searches for a CPTP Γ with Γ(sources[θ]) = targets[θ] by Douglas–Rachford
/// splitting between the PSD cone and the affine constraints.
///
/// `residual` is the largest constraint violation of the PSD iterate after
/// renormalizing its input marginal;
/// `feasible = false` means only that it stayed above `tol`.
pub fn cptp_feasible(sources: &[CMatrix], targets: &[CMatrix], max_iters: usize, tol: f64) -> Result<FeasibilityReport> {
    if sources.is_empty() || sources.len() != targets.len() {
        return Err(Error::DimensionMismatch("sources and targets must be non-empty lists of equal length".into()));
    }
    let din = sources[0].require_square()?;
    let dout = targets[0].require_square()?;
    if sources.iter().any(|s| s.rows() != din || s.cols() != din) || targets.iter().any(|t| t.rows() != dout || t.cols() != dout) {
        return Err(Error::DimensionMismatch("sources or targets have inconsistent dimensions".into()));
    }
    if din == dout && families_identical(sources, targets, 1e-12) {
        let choi = crate::channels::choi_of(&crate::channels::KrausChannel::identity(din));
        return Ok(FeasibilityReport { feasible: true, choi, residual: 0.0, iterations: 0 });
    }
    let coords = HermCoords { n: din * dout };
    let aff = build_affine(&coords, sources, targets, din, dout)?;
    let max_viol = |x: &[f64]| aff.violation(x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z = coords.from_matrix(&CMatrix::identity(din * dout).scale_re(1.0 / dout as f64));
    let mut w = coords.to_matrix(&z);
    let mut residual = max_viol(&z);
    let mut iterations = 0;
    while iterations < max_iters && residual > tol {
        iterations += 1;
        let x = project_psd(&coords, &z)?;
        let refl: Vec<f64> = x.iter().zip(&z).map(|(a, b)| 2.0 * a - b).collect();
        let y = aff.project(&refl);
        for ((zi, yi), xi) in z.iter_mut().zip(&y).zip(&x) {
            *zi += yi - xi;
        }
        w = normalize_marginal(&coords.to_matrix(&x), din, dout)?;
        residual = max_viol(&coords.from_matrix(&w));
    }
    let feasible = residual <= tol;
    Ok(FeasibilityReport { feasible, choi: ChoiMatrix { matrix: w, din, dout }, residual, iterations })
}
