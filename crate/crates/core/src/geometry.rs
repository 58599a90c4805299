//! Unit-modulus weightings that close a polygon: Σ_{i<d} x_i ω_i + x_d = 0.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{cis, C64};

/// Relative margin kept from the ends of each sampling interval.
pub const SAMPLE_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleVector {
    pub omegas: Vec<C64>,
}

impl AngleVector {
    pub fn new(omegas: Vec<C64>) -> Result<Self> {
        if let Some(w) = omegas.iter().find(|w| (w.norm() - 1.0).abs() > 1e-10) {
            return Err(Error::InvalidArgument(format!("|ω| = {} is not 1", w.norm())));
        }
        Ok(AngleVector { omegas })
    }

    /// |Σ x_i ω_i + x_d|
    pub fn residual(&self, x: &[f64]) -> f64 {
        let d = x.len();
        assert_eq!(self.omegas.len() + 1, d, "angle vector length");
        let s: C64 = self.omegas.iter().zip(x).map(|(w, xi)| w * xi).sum();
        (s + x[d - 1]).norm()
    }

    /// Number of distinct entries within `tol`.
    pub fn distinct_values(&self, tol: f64) -> usize {
        let mut seen: Vec<C64> = Vec::new();
        for w in &self.omegas {
            if !seen.iter().any(|v| (v - w).norm() <= tol) {
                seen.push(*w);
            }
        }
        seen.len()
    }
}

/// Partial-sum moduli r₃..r_{d−1} used as sampling coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RChain {
    pub r_values: Vec<f64>,
}

fn check_x(x: &[f64]) -> Result<()> {
    if x.len() < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 weights, got {}", x.len())));
    }
    if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Largest weight minus the sum of the others.
pub fn polygon_excess(x: &[f64]) -> f64 {
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = x.iter().sum();
    2.0 * max - total
}

/// Polygon condition: the largest weight is at most the sum of the rest.
pub fn ang_nonempty(x: &[f64]) -> Result<bool> {
    check_x(x)?;
    let scale: f64 = x.iter().sum::<f64>().max(f64::MIN_POSITIVE);
    Ok(polygon_excess(x) <= 1e-14 * scale)
}

/// Unit ω₁, ω₂ with a ω₁ + b ω₂ = −c, upper orientation first.
fn close_triangle(a: f64, b: f64, c: f64) -> Vec<(C64, C64)> {
    let scale = (a + b + c).max(f64::MIN_POSITIVE);
    let eq = |u: f64, v: f64| (u - v).abs() <= 1e-12 * scale;
    let one = C64::new(1.0, 0.0);
    match (a == 0.0, b == 0.0, c == 0.0) {
        (true, true, _) => return if c == 0.0 { vec![(one, one)] } else { vec![] },
        (true, false, _) => return if eq(b, c) { vec![(one, -one)] } else { vec![] },
        (false, true, _) => return if eq(a, c) { vec![(-one, one)] } else { vec![] },
        (false, false, true) => return if eq(a, b) { vec![(one, -one)] } else { vec![] },
        _ => {}
    }
    let cos = (b * b - a * a - c * c) / (2.0 * a * c);
    if cos < -1.0 - 1e-12 || cos > 1.0 + 1e-12 {
        return vec![];
    }
    let phi = cos.clamp(-1.0, 1.0).acos();
    let sol = |p: f64| {
        let w1 = cis(p);
        let w2 = -(w1 * a + c) / b;
        (w1, w2 / w2.norm())
    };
    if phi.sin().abs() <= 1e-9 {
        vec![sol(phi)]
    } else {
        vec![sol(phi), sol(-phi)]
    }
}

/// Exact solutions for three weights.
pub fn ang_solve_triangle(x: &[f64]) -> Result<Vec<AngleVector>> {
    check_x(x)?;
    if x.len() != 3 {
        return Err(Error::InvalidArgument(format!("triangle solve needs 3 weights, got {}", x.len())));
    }
    Ok(close_triangle(x[0], x[1], x[2])
        .into_iter()
        .map(|(a, b)| AngleVector { omegas: vec![a, b] })
        .collect())
}

fn sorted_desc(x: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    let xs = idx.iter().map(|&i| x[i]).collect();
    (idx, xs)
}

/// Interval for r_k given r_{k+1} (sorted weights, 1-based k as in the chain).
fn r_interval(xs: &[f64], k: usize, r_next: f64) -> (f64, f64) {
    let xk = xs[k - 1];
    let head: f64 = xs[1..k - 1].iter().sum();
    let lo = (r_next - xk).abs().max(xs[0] - head);
    let hi = (r_next + xk).min(xs[..k - 1].iter().sum());
    (lo, hi)
}

/// One random member of Ang(x) and its r-chain.
fn sample_one(x: &[f64], rng: &mut ChaCha8Rng) -> Result<(AngleVector, RChain)> {
    let d = x.len();
    let (idx, xs) = sorted_desc(x);
    // u_i for sorted weights, u_d = 1, built from the tail z_k = Σ_{i≥k} x_i u_i
    let mut u = vec![C64::new(0.0, 0.0); d];
    u[d - 1] = C64::new(1.0, 0.0);
    let mut z = C64::new(xs[d - 1], 0.0);
    let mut chain = Vec::new();
    for k in (3..d).rev() {
        let (lo, hi) = r_interval(&xs, k, z.norm());
        let margin = SAMPLE_MARGIN * (hi - lo).max(0.0);
        if hi - lo <= 0.0 {
            return Err(Error::Polygon(format!("empty sampling interval at step {} ([{}, {}])", k, lo, hi)));
        }
        let rk = rng.gen_range(lo + margin..hi - margin);
        let xk = xs[k - 1];
        let rn = z.norm();
        let cos = ((rk * rk - rn * rn - xk * xk) / (2.0 * rn * xk)).clamp(-1.0, 1.0);
        let alpha = if rng.gen::<bool>() { cos.acos() } else { -cos.acos() };
        u[k - 1] = z / rn * cis(alpha);
        z += u[k - 1] * xk;
        chain.push(rk);
    }
    let rz = z.norm();
    let sols = close_triangle(xs[0], xs[1], rz);
    if sols.is_empty() {
        return Err(Error::Polygon("final triangle does not close".into()));
    }
    let (w1, w2) = sols[rng.gen_range(0..sols.len())];
    let dir = z / rz;
    u[0] = w1 * dir;
    u[1] = w2 * dir;
    let mut orig = vec![C64::new(0.0, 0.0); d];
    for (pos, &i) in idx.iter().enumerate() {
        orig[i] = u[pos];
    }
    let last = orig[d - 1];
    let omegas: Vec<C64> = orig[..d - 1].iter().map(|w| {
        let q = w / last;
        q / q.norm()
    }).collect();
    chain.reverse();
    Ok((AngleVector { omegas }, RChain { r_values: chain }))
}

fn strict_polygon(x: &[f64]) -> Result<()> {
    check_x(x)?;
    if x.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("sampling needs strictly positive weights".into()));
    }
    let excess = polygon_excess(x);
    if excess >= 0.0 {
        let (_, xs) = sorted_desc(x);
        return Err(Error::Polygon(format!(
            "largest weight {} must be strictly below the sum of the others {}",
            xs[0],
            xs[1..].iter().sum::<f64>()
        )));
    }
    Ok(())
}

/// `n` members of Ang(x), deterministic in `seed`. For d = 3 the exact
/// solutions are drawn instead.
pub fn ang_sample(x: &[f64], n: usize, seed: u64) -> Result<Vec<AngleVector>> {
    Ok(ang_sample_with_chains(x, n, seed)?.into_iter().map(|(a, _)| a).collect())
}

pub fn ang_sample_with_chains(x: &[f64], n: usize, seed: u64) -> Result<Vec<(AngleVector, RChain)>> {
    strict_polygon(x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if x.len() == 3 {
        let sols = ang_solve_triangle(x)?;
        return Ok((0..n)
            .map(|_| (sols[rng.gen_range(0..sols.len())].clone(), RChain { r_values: vec![] }))
            .collect());
    }
    (0..n).map(|_| sample_one(x, &mut rng)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParallelReport {
    pub subset_holds: bool,
    pub violating_sample: Option<AngleVector>,
    pub residual: f64,
    pub samples: usize,
}

/// Tests whether sampled members of Ang(x) also lie in Ang(x′).
pub fn ang_parallel_property(x: &[f64], x_prime: &[f64], n: usize, seed: u64, tol: f64) -> Result<ParallelReport> {
    if x.len() != x_prime.len() {
        return Err(Error::DimensionMismatch("x and x′ differ in length".into()));
    }
    strict_polygon(x_prime)?;
    let samples = if x.len() == 3 { ang_solve_triangle(x)? } else { ang_sample(x, n, seed)? };
    if samples.is_empty() {
        return Err(Error::Polygon("Ang(x) is empty".into()));
    }
    let mut worst = (0.0, None);
    for a in &samples {
        let res = a.residual(x_prime);
        if res > worst.0 {
            worst = (res, Some(a.clone()));
        }
    }
    let subset_holds = worst.0 <= tol;
    Ok(ParallelReport {
        subset_holds,
        violating_sample: if subset_holds { None } else { worst.1 },
        residual: worst.0,
        samples: samples.len(),
    })
}

/// CSV with columns sample, re_1, im_1, .., re_{d−1}, im_{d−1}, residual.
pub fn samples_to_csv(x: &[f64], samples: &[AngleVector]) -> String {
    let mut out = String::from("sample");
    for i in 1..x.len() {
        let _ = write!(out, ",re_{},im_{}", i, i);
    }
    out.push_str(",residual\n");
    for (k, a) in samples.iter().enumerate() {
        let _ = write!(out, "{}", k);
        for w in &a.omegas {
            let _ = write!(out, ",{},{}", w.re, w.im);
        }
        let _ = writeln!(out, ",{}", a.residual(x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn nonempty_examples() {
        assert!(ang_nonempty(&[1.0, 1.0, 1.0]).unwrap());
        assert!(!ang_nonempty(&[3.0, 1.0, 1.0]).unwrap());
        assert!(ang_nonempty(&[2.0, 1.0, 1.0]).unwrap());
        assert!(ang_nonempty(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn triangle_examples() {
        let s = ang_solve_triangle(&[2.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s[0].omegas[0] + 1.0).norm() < 1e-12 && (s[0].omegas[1] - 1.0).norm() < 1e-12);
        let s = ang_solve_triangle(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.len(), 2);
        let w = cis(2.0 * std::f64::consts::PI / 3.0);
        assert!((s[0].omegas[0] - w).norm() < 1e-12 && (s[0].omegas[1] - w * w).norm() < 1e-12);
        for a in &s {
            assert!(a.residual(&[1.0, 1.0, 1.0]) <= 1e-12);
        }
        assert!(ang_solve_triangle(&[3.0, 1.0, 1.0]).unwrap().is_empty());
        // any ordering of the weights, including the largest last
        let s = ang_solve_triangle(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].residual(&[1.0, 1.0, 2.0]) < 1e-12);
    }

    #[test]
    fn sampler_examples() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let s = ang_sample(&x, 50, 7).unwrap();
        assert!(s.iter().all(|a| a.residual(&x) <= 1e-9));
        assert!(s.iter().any(|a| a.distinct_values(1e-6) >= 3));
        assert!(matches!(ang_sample(&[3.0, 1.0, 1.0, 0.5], 5, 1), Err(Error::Polygon(_))));
        assert_eq!(ang_sample(&x, 5, 11).unwrap(), ang_sample(&x, 5, 11).unwrap());
        assert_ne!(ang_sample(&x, 5, 11).unwrap(), ang_sample(&x, 5, 12).unwrap());
    }

    #[test]
    fn chains_satisfy_interval_constraints() {
        let x = [0.9, 0.7, 0.5, 0.4, 0.3];
        for (a, ch) in ang_sample_with_chains(&x, 30, 3).unwrap() {
            assert!(a.residual(&x) <= 1e-9);
            let (_, xs) = sorted_desc(&x);
            let d = xs.len();
            // r_k for k = 3..d−1 with r_d = x_d
            let mut rs = ch.r_values.clone();
            rs.push(xs[d - 1]);
            for k in 3..d {
                let (lo, hi) = r_interval(&xs, k, rs[k - 2]);
                assert!(rs[k - 3] > lo && rs[k - 3] < hi);
            }
        }
    }

    #[test]
    fn parallel_examples() {
        let x = [0.3, 0.25, 0.25, 0.2];
        let x2: Vec<f64> = x.iter().map(|v| 2.0 * v).collect();
        assert!(ang_parallel_property(&x, &x2, 50, 5, 1e-9).unwrap().subset_holds);
        let rep = ang_parallel_property(&x, &[0.3, 0.25, 0.2, 0.25], 50, 5, 1e-9).unwrap();
        assert!(!rep.subset_holds && rep.violating_sample.is_some());
        let rep = ang_parallel_property(&[1.0, 1.0, 1.0], &[1.2, 1.0, 0.8], 0, 0, 1e-9).unwrap();
        assert!(!rep.subset_holds && rep.samples == 2);
    }

    #[test]
    fn csv_layout() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let s = ang_sample(&x, 2, 1).unwrap();
        let csv = samples_to_csv(&x, &s);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "sample,re_1,im_1,re_2,im_2,re_3,im_3,residual");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn samples_close_and_are_unimodular(x in proptest::collection::vec(0.05f64..1.0, 4..8), seed in any::<u64>()) {
            prop_assume!(polygon_excess(&x) < -1e-3);
            for a in ang_sample(&x, 5, seed).unwrap() {
                prop_assert!(a.residual(&x) <= 1e-9);
                for w in &a.omegas {
                    prop_assert!((w.norm() - 1.0).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn triangle_pairs_are_conjugate(x in proptest::collection::vec(0.05f64..1.0, 3)) {
            prop_assume!(polygon_excess(&x) < -1e-6);
            let s = ang_solve_triangle(&x).unwrap();
            prop_assert_eq!(s.len(), 2);
            for k in 0..2 {
                prop_assert!((s[0].omegas[k] - s[1].omegas[k].conj()).norm() <= 1e-12);
            }
        }
    }
}
