//! Seeded random matrices and states.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{inner, CMatrix, C64, ZERO};

pub fn gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.col(j);
        for u in &cols {
            let p = inner(u, &v);
            for (x, y) in v.iter_mut().zip(u) {
                *x -= p * y;
            }
        }
        let n = super::vec_norm(&v);
        v.iter_mut().for_each(|x| *x /= n);
        cols.push(v);
    }
    CMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Random unit vector, uniform on the sphere.
pub fn random_state(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    let mut v: Vec<C64> = (0..d).map(|_| gaussian(rng)).collect();
    let n = super::vec_norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    v
}

/// Random full-rank density matrix G G† / tr.
pub fn random_density(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_re(1.0 / t).hermitian_part()
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Uniform point of the probability simplex with `k` entries.
pub fn random_simplex(rng: &mut impl Rng, k: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    e.iter_mut().for_each(|x| *x /= s);
    e
}

/// Haar-random element of SU(2).
pub fn random_su2(rng: &mut impl Rng) -> CMatrix {
    let v = random_state(rng, 2);
    let (a, b) = (v[0], v[1]);
    CMatrix::from_rows(&[vec![a, -b.conj()], vec![b, a.conj()]]).expect("2x2")
}

pub fn zero_vec(d: usize) -> Vec<C64> {
    vec![ZERO; d]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_and_density_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in 1..7 {
            assert!(random_unitary(&mut rng, d).unitarity_residual() < 1e-12);
            let rho = random_density(&mut rng, d);
            assert!(super::super::check_density(&rho, 1e-12).is_ok());
        }
        let s = random_simplex(&mut rng, 5);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-14 && s.iter().all(|&x| x >= 0.0));
        let u = random_su2(&mut rng);
        assert!(u.unitarity_residual() < 1e-12);
        assert!((u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
