//! Scalar closure for the functional derivative of the two-mode TLA.
//!
//! With `δ/δz*(s) |ψ̃_t⟩ = f(t,s) σ̂ |ψ̃_t⟩` the memory integral collapses to
//! `F(t) = ∫₀ᵗ α(t−s) f(t,s) ds`. Splitting `F = F₁ + F₋₁` by mode and using
//! `∂_t f = f F`, `f(t,t) = 1` gives a closed pair of Riccati equations
//!
//! ```text
//! F₁'  = g² − iΔ F₁  + F₁  F
//! F₋₁' = g² + iΔ F₋₁ + F₋₁ F,     F₁(0) = F₋₁(0) = 0
//! ```
//!
//! `F` does not depend on the noise, so one solution serves every trajectory
//! of a run. Because `α = β` for the symmetric two-mode bath the same `F`
//! closes the quadrature unraveling too.

use num_complex::Complex64;

use crate::bath::{memory_kernel, BathConfig};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::ZERO;

/// Default blow-up bound is this multiple of `g`.
pub const DEFAULT_DIVERGENCE_FACTOR: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzSolution {
    pub grid: TimeGrid,
    pub f_total: Vec<Complex64>,
    pub f_plus: Vec<Complex64>,
    pub f_minus: Vec<Complex64>,
}

impl AnsatzSolution {
    #[inline]
    pub fn at(&self, i: usize) -> Complex64 {
        self.f_total[i]
    }
}

#[inline]
fn riccati_rhs(g2: f64, delta: f64, fp: Complex64, fm: Complex64) -> (Complex64, Complex64) {
    let f = fp + fm;
    let dp = g2 + Complex64::new(0.0, -delta) * fp + fp * f;
    let dm = g2 + Complex64::new(0.0, delta) * fm + fm * f;
    (dp, dm)
}

/// Solves the closure with the default divergence bound `1e6·g`.
pub fn solve_ansatz(g: f64, delta: f64, grid: TimeGrid) -> Result<AnsatzSolution> {
    let bound = DEFAULT_DIVERGENCE_FACTOR * g.abs().max(f64::MIN_POSITIVE);
    solve_ansatz_bounded(g, delta, grid, bound)
}

/// RK4 on the grid; fails as soon as `|F|` exceeds `bound` or stops being
/// finite.
pub fn solve_ansatz_bounded(
    g: f64,
    delta: f64,
    grid: TimeGrid,
    bound: f64,
) -> Result<AnsatzSolution> {
    let g2 = g * g;
    let dt = grid.dt();
    let n = grid.len();
    let mut f_plus = Vec::with_capacity(n);
    let mut f_minus = Vec::with_capacity(n);
    let mut f_total = Vec::with_capacity(n);
    let (mut fp, mut fm) = (ZERO, ZERO);
    f_plus.push(fp);
    f_minus.push(fm);
    f_total.push(fp + fm);
    let h = 0.5 * dt;
    for i in 1..n {
        let (k1p, k1m) = riccati_rhs(g2, delta, fp, fm);
        let (k2p, k2m) = riccati_rhs(g2, delta, fp + h * k1p, fm + h * k1m);
        let (k3p, k3m) = riccati_rhs(g2, delta, fp + h * k2p, fm + h * k2m);
        let (k4p, k4m) = riccati_rhs(g2, delta, fp + dt * k3p, fm + dt * k3m);
        fp += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        fm += dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        let f = fp + fm;
        let mag = f.norm();
        if !mag.is_finite() || mag > bound {
            return Err(Error::AnsatzDivergence {
                t: grid.t(i),
                magnitude: mag,
                bound,
            });
        }
        f_plus.push(fp);
        f_minus.push(fm);
        f_total.push(f);
    }
    Ok(AnsatzSolution {
        grid,
        f_total,
        f_plus,
        f_minus,
    })
}

/// True iff the complex kernel `α` and the real cosine kernel agree to 1e-12
/// at every grid lag. This is what lets the quadrature stepper reuse `F`.
pub fn kernel_equivalence_check(bath: &BathConfig, grid: TimeGrid) -> bool {
    let scale = memory_kernel(bath, 0.0).norm().max(1.0);
    grid.times().all(|tau| {
        let alpha = memory_kernel(bath, tau);
        let beta: f64 = bath
            .modes()
            .iter()
            .map(|m| m.coupling * m.coupling * (m.detuning * tau).cos())
            .sum();
        (alpha - Complex64::new(beta, 0.0)).norm() <= 1e-12 * scale
    })
}
