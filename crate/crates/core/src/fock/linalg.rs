//! Complex matrix products routed through real GEMM.
//!
//! nalgebra dispatches `f64` products to an optimized kernel but falls back to
//! a generic loop for complex scalars, so products are split into real parts.

use nalgebra::DMatrix;

use crate::C64;

fn split(a: &DMatrix<C64>) -> (DMatrix<f64>, DMatrix<f64>) {
    (a.map(|z| z.re), a.map(|z| z.im))
}

fn join(re: DMatrix<f64>, im: &DMatrix<f64>) -> DMatrix<C64> {
    re.zip_map(im, C64::new)
}

/// `a · b`
pub fn mul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(re, &im)
}

/// `a · b†`
pub fn adjoint_mul(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * br.transpose() + &ai * bi.transpose();
    let im = &ai * br.transpose() - &ar * bi.transpose();
    join(re, &im)
}

/// `a · a†`
pub fn gram(a: &DMatrix<C64>) -> DMatrix<C64> {
    adjoint_mul(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: usize, cols: usize, seed: f64) -> DMatrix<C64> {
        DMatrix::from_fn(rows, cols, |i, j| {
            let x = (i as f64 * 1.3 + j as f64 * 0.7 + seed).sin();
            let y = (i as f64 * 0.4 - j as f64 * 1.1 + seed).cos();
            C64::new(x, y)
        })
    }

    fn max_abs(m: DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn matches_generic_complex_product() {
        let a = sample(5, 3, 0.2);
        let b = sample(3, 4, 1.7);
        let c = sample(4, 3, -0.5);
        assert!(max_abs(mul(&a, &b) - &a * &b) < 1e-13);
        assert!(max_abs(adjoint_mul(&a, &c) - &a * c.adjoint()) < 1e-13);
        assert!(max_abs(gram(&a) - &a * a.adjoint()) < 1e-13);
    }
}
