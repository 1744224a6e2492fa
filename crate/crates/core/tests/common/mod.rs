//! Helpers shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

use nmsse::rng::standard_normal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Uniformly distributed normalized two-level state.
pub fn random_state(rng: &mut impl rand::Rng) -> (Complex64, Complex64) {
    let v: Vec<f64> = (0..4).map(|_| standard_normal(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n))
}

/// Explicit amplitude equations of the two-level atom, `(Ċ_e, Ċ_b)`.
pub fn explicit_linear(ce: Complex64, f: Complex64, drive: Complex64) -> (Complex64, Complex64) {
    (-ce * f, drive * ce)
}

pub fn explicit_actual_coherent(
    ce: Complex64,
    cb: Complex64,
    f: Complex64,
    zc: Complex64,
) -> (Complex64, Complex64) {
    let (pe, pb) = (ce.norm_sqr(), cb.norm_sqr());
    let dce = -ce * ce * cb.conj() * zc + f * ce * (-1.0 + pe - pe * pb);
    let dcb = ce * (1.0 - pb) * zc + f * cb * pe * (2.0 - pb);
    (dce, dcb)
}

pub fn explicit_actual_quadrature(
    ce: Complex64,
    cb: Complex64,
    f: Complex64,
    z: Complex64,
) -> (Complex64, Complex64) {
    let (pe, pb) = (ce.norm_sqr(), cb.norm_sqr());
    let dce = f * ce * (-1.0 + pe - pe * pb)
        - f * ce.powi(3) * cb.conj().powi(2)
        - ce * ce * cb.conj() * z;
    let dcb = f * cb * pe * (2.0 - pb) + f * cb.conj() * ce * ce * (1.0 - pb) + ce * (1.0 - pb) * z;
    (dce, dcb)
}

