//! System models and the reference solutions the SSE ensembles are checked
//! against: the exact four-amplitude solution of the two-mode TLA and the
//! Lindblad master equation for the Markov limit.
//!
//! Two-level states are stored as `(C_e, C_b)`: index 0 is the excited state,
//! index 1 the ground state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{norm_sqr, CMatrix, ONE, ZERO};

/// Hamiltonian and Lindblad operator of a small system, interaction picture.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    hamiltonian: CMatrix,
    lindblad: CMatrix,
}

impl SystemModel {
    pub fn new(hamiltonian: CMatrix, lindblad: CMatrix) -> Result<Self> {
        let d = hamiltonian.dim();
        if d < 2 {
            return Err(Error::InvalidModel(format!("dimension must be >= 2, got {d}")));
        }
        if lindblad.dim() != d {
            return Err(Error::InvalidModel(format!(
                "hamiltonian is {d}x{d} but lindblad operator is {0}x{0}",
                lindblad.dim()
            )));
        }
        if !hamiltonian.is_hermitian(1e-12) {
            return Err(Error::InvalidModel("hamiltonian is not Hermitian".into()));
        }
        Ok(Self {
            hamiltonian,
            lindblad,
        })
    }

    /// Two-level atom with `Ĥ = 0` and `L̂ = σ̂ = |b⟩⟨e|`.
    pub fn two_level_atom() -> Self {
        Self {
            hamiltonian: CMatrix::zeros(2),
            lindblad: CMatrix::from_rows(&[&[ZERO, ZERO], &[ONE, ZERO]]),
        }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn lindblad(&self) -> &CMatrix {
        &self.lindblad
    }

    /// `L̂_x = L̂ + L̂†`
    pub fn lindblad_x(&self) -> CMatrix {
        &self.lindblad + &self.lindblad.adjoint()
    }

    /// Pure initial state `|e⟩` (first basis vector).
    pub fn excited_state(&self) -> Vec<Complex64> {
        let mut psi = vec![ZERO; self.dim()];
        psi[0] = ONE;
        psi
    }
}

/// Amplitudes of `|b00⟩, |e00⟩, |b01⟩, |b10⟩` in the exact TLA solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactAmplitudes {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: Complex64,
    pub c4: Complex64,
}

impl ExactAmplitudes {
    pub fn norm_sqr(&self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr() + self.c4.norm_sqr()
    }

    fn axpy(&self, h: f64, k: &ExactAmplitudes) -> ExactAmplitudes {
        ExactAmplitudes {
            c1: self.c1 + h * k.c1,
            c2: self.c2 + h * k.c2,
            c3: self.c3 + h * k.c3,
            c4: self.c4 + h * k.c4,
        }
    }
}

fn exact_rhs(g: f64, delta: f64, t: f64, a: &ExactAmplitudes) -> ExactAmplitudes {
    let up = Complex64::from_polar(1.0, delta * t);
    let down = up.conj();
    ExactAmplitudes {
        c1: ZERO,
        c2: -g * up * a.c3 - g * down * a.c4,
        c3: g * down * a.c2,
        c4: g * up * a.c2,
    }
}

/// Schrödinger evolution of the TLA coupled to two detuned modes from
/// `|e00⟩`, classical RK4 on the grid.
pub fn exact_evolve(g: f64, delta: f64, grid: TimeGrid) -> Vec<ExactAmplitudes> {
    let dt = grid.dt();
    let mut a = ExactAmplitudes {
        c1: ZERO,
        c2: ONE,
        c3: ZERO,
        c4: ZERO,
    };
    let mut out = Vec::with_capacity(grid.len());
    out.push(a);
    for i in 1..grid.len() {
        let t = grid.t(i - 1);
        let k1 = exact_rhs(g, delta, t, &a);
        let k2 = exact_rhs(g, delta, t + 0.5 * dt, &a.axpy(0.5 * dt, &k1));
        let k3 = exact_rhs(g, delta, t + 0.5 * dt, &a.axpy(0.5 * dt, &k2));
        let k4 = exact_rhs(g, delta, t + dt, &a.axpy(dt, &k3));
        a = ExactAmplitudes {
            c1: a.c1 + dt / 6.0 * (k1.c1 + 2.0 * k2.c1 + 2.0 * k3.c1 + k4.c1),
            c2: a.c2 + dt / 6.0 * (k1.c2 + 2.0 * k2.c2 + 2.0 * k3.c2 + k4.c2),
            c3: a.c3 + dt / 6.0 * (k1.c3 + 2.0 * k2.c3 + 2.0 * k3.c3 + k4.c3),
            c4: a.c4 + dt / 6.0 * (k1.c4 + 2.0 * k2.c4 + 2.0 * k3.c4 + k4.c4),
        };
        out.push(a);
    }
    out
}

/// Pseudo-spin vector plus the trace weight of the state it came from.
///
/// The y axis follows the amplitude formula `y = −i c₂c₁* + i c₂*c₁`, i.e.
/// `y = 2 Im ρ_eb`. In the `(e, b)` basis the matching Pauli matrix is
/// `[[0, i], [−i, 0]]`; see [`DensityMatrix::from_bloch`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub norm: f64,
}

impl BlochVector {
    pub const EXCITED: BlochVector = BlochVector {
        x: 0.0,
        y: 0.0,
        z: 1.0,
        norm: 1.0,
    };

    pub fn length_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn components(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.norm]
    }
}

pub fn bloch_from_exact(a: &ExactAmplitudes) -> BlochVector {
    let u = a.c2 * a.c1.conj();
    BlochVector {
        x: 2.0 * u.re,
        y: 2.0 * u.im,
        z: a.c2.norm_sqr() - a.c1.norm_sqr() - a.c3.norm_sqr() - a.c4.norm_sqr(),
        norm: a.norm_sqr(),
    }
}

/// Bloch vector of a two-level state `(C_e, C_b)`, with the same axis
/// convention as [`bloch_from_exact`]. Unnormalized states report their raw
/// weight in `norm` and unnormalized components.
pub fn bloch_from_state(psi: &[Complex64]) -> BlochVector {
    debug_assert_eq!(psi.len(), 2);
    let (ce, cb) = (psi[0], psi[1]);
    let u = ce * cb.conj();
    let (pe, pb) = (ce.norm_sqr(), cb.norm_sqr());
    BlochVector {
        x: 2.0 * u.re,
        y: 2.0 * u.im,
        z: pe - pb,
        norm: pe + pb,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub CMatrix);

impl DensityMatrix {
    pub fn pure(psi: &[Complex64]) -> Self {
        Self(CMatrix::outer(psi, psi))
    }

    /// `½(norm·I + xσ_x + yσ_y + zσ_z)` with σ_y = `[[0, i], [−i, 0]]` in the
    /// `(e, b)` basis, matching the y convention of [`BlochVector`].
    pub fn from_bloch(b: &BlochVector) -> Self {
        let h = 0.5;
        let mut m = CMatrix::zeros(2);
        m[(0, 0)] = Complex64::new(h * (b.norm + b.z), 0.0);
        m[(1, 1)] = Complex64::new(h * (b.norm - b.z), 0.0);
        m[(0, 1)] = Complex64::new(h * b.x, h * b.y);
        m[(1, 0)] = Complex64::new(h * b.x, -h * b.y);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.0 - &self.0.adjoint()).max_abs() <= tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.min_hermitian_eigenvalue()
    }

    /// Two-level Bloch vector (`norm` is the trace).
    pub fn bloch(&self) -> BlochVector {
        let m = &self.0;
        let rho_eb = m[(0, 1)];
        BlochVector {
            x: 2.0 * rho_eb.re,
            y: 2.0 * rho_eb.im,
            z: m[(0, 0)].re - m[(1, 1)].re,
            norm: m[(0, 0)].re + m[(1, 1)].re,
        }
    }
}

/// Reduced system state of the exact solution. The bath-excited components
/// `|b01⟩`, `|b10⟩` are orthogonal to everything else and only feed `ρ_bb`.
pub fn reduced_density_from_exact(a: &ExactAmplitudes) -> DensityMatrix {
    let mut m = CMatrix::zeros(2);
    m[(0, 0)] = Complex64::new(a.c2.norm_sqr(), 0.0);
    m[(0, 1)] = a.c2 * a.c1.conj();
    m[(1, 0)] = a.c1 * a.c2.conj();
    m[(1, 1)] = Complex64::new(a.c1.norm_sqr() + a.c3.norm_sqr() + a.c4.norm_sqr(), 0.0);
    DensityMatrix(m)
}

struct LindbladGenerator {
    h: CMatrix,
    l: CMatrix,
    ld: CMatrix,
    ldl: CMatrix,
    gamma: f64,
}

impl LindbladGenerator {
    fn apply(&self, rho: &CMatrix) -> CMatrix {
        let i = Complex64::new(0.0, 1.0);
        let comm = &(&self.h * rho) - &(rho * &self.h);
        let jump = &(&self.l * rho) * &self.ld;
        let anti = &(&self.ldl * rho) + &(rho * &self.ldl);
        let diss = &jump - &anti.scale(Complex64::new(0.5, 0.0));
        &comm.scale(-i) + &diss.scale(Complex64::new(self.gamma, 0.0))
    }
}

/// `ρ̇ = −i[H, ρ] + γ(LρL† − ½{L†L, ρ})`, RK4 on the grid.
pub fn lindblad_evolve(
    model: &SystemModel,
    gamma: f64,
    rho0: &DensityMatrix,
    grid: TimeGrid,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != model.dim() {
        return Err(Error::InvalidModel(format!(
            "initial state is {0}x{0}, model is {1}x{1}",
            rho0.dim(),
            model.dim()
        )));
    }
    if !rho0.is_hermitian(1e-12) || (rho0.trace() - ONE).norm() > 1e-10 {
        return Err(Error::InvalidModel(
            "initial density matrix must be Hermitian with unit trace".into(),
        ));
    }
    let ld = model.lindblad.adjoint();
    let gen = LindbladGenerator {
        h: model.hamiltonian.clone(),
        ldl: &ld * &model.lindblad,
        l: model.lindblad.clone(),
        ld,
        gamma,
    };
    let dt = grid.dt();
    let c = |s: f64| Complex64::new(s, 0.0);
    let mut rho = rho0.0.clone();
    let mut out = Vec::with_capacity(grid.len());
    out.push(DensityMatrix(rho.clone()));
    for _ in 1..grid.len() {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(&rho + &k1.scale(c(0.5 * dt))));
        let k3 = gen.apply(&(&rho + &k2.scale(c(0.5 * dt))));
        let k4 = gen.apply(&(&rho + &k3.scale(c(dt))));
        let incr = &(&k1 + &k2.scale(c(2.0))) + &(&k3.scale(c(2.0)) + &k4);
        rho = &rho + &incr.scale(c(dt / 6.0));
        out.push(DensityMatrix(rho.clone()));
    }
    Ok(out)
}

/// Pure-state purity check used by tests and diagnostics.
pub fn is_pure_bloch(b: &BlochVector, tol: f64) -> bool {
    (b.length_sqr() - b.norm * b.norm).abs() <= tol
}

/// Weight `⟨ψ|ψ⟩` of a state vector.
pub fn weight(psi: &[Complex64]) -> f64 {
    norm_sqr(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn initial_amplitudes() {
        let grid = TimeGrid::new(1e-3, 10).unwrap();
        let a = exact_evolve(1.0, 2.0, grid);
        assert_eq!(a[0].c2, ONE);
        assert_eq!(a[0].c1, ZERO);
        assert_eq!(bloch_from_exact(&a[0]), BlochVector::EXCITED);
    }

    #[test]
    fn resonant_closed_form() {
        let g = 1.0;
        let grid = TimeGrid::covering(1e-3, 3.0).unwrap();
        let a = exact_evolve(g, 0.0, grid);
        let w = 2f64.sqrt() * g;
        for (i, amp) in a.iter().enumerate() {
            let t = grid.t(i);
            assert!((amp.c2 - c((w * t).cos(), 0.0)).norm() < 1e-8);
            let s = (w * t).sin() / 2f64.sqrt();
            assert!((amp.c3 - c(s, 0.0)).norm() < 1e-8);
            assert!((amp.c4 - c(s, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn detuned_norm_is_conserved() {
        let grid = TimeGrid::covering(1e-3, 3.0).unwrap();
        for amp in exact_evolve(1.0, 2.0, grid) {
            assert!((amp.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn bloch_of_basis_and_superposition() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ground = ExactAmplitudes {
            c1: ONE,
            c2: ZERO,
            c3: ZERO,
            c4: ZERO,
        };
        let b = bloch_from_exact(&ground);
        assert_eq!((b.x, b.y, b.z, b.norm), (0.0, 0.0, -1.0, 1.0));
        let plus = ExactAmplitudes {
            c1: c(s, 0.0),
            c2: c(s, 0.0),
            c3: ZERO,
            c4: ZERO,
        };
        let b = bloch_from_exact(&plus);
        assert!((b.x - 1.0).abs() < 1e-15 && b.y == 0.0 && b.z.abs() < 1e-15);
        assert!((b.norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_of_system_states() {
        assert_eq!(bloch_from_state(&[ONE, ZERO]), BlochVector::EXCITED);
        let g = bloch_from_state(&[ZERO, ONE]);
        assert_eq!((g.x, g.y, g.z, g.norm), (0.0, 0.0, -1.0, 1.0));
        let u = bloch_from_state(&[ONE, ONE]);
        assert_eq!(u.z, 0.0);
        assert_eq!(u.norm, 2.0);
    }

    #[test]
    fn conventions_agree_on_product_states() {
        // A pure system state ⊗ vacuum is c₂ = C_e, c₁ = C_b.
        for k in 0..50 {
            let th = 0.37 * k as f64;
            let ce = c((1.3 * th).cos() * 0.6, (0.7 * th).sin() * 0.3);
            let cb = c((2.1 * th).sin() * 0.5, (1.1 * th).cos() * 0.4);
            let n = (ce.norm_sqr() + cb.norm_sqr()).sqrt();
            let (ce, cb) = (ce / n, cb / n);
            let ex = bloch_from_exact(&ExactAmplitudes {
                c1: cb,
                c2: ce,
                c3: ZERO,
                c4: ZERO,
            });
            let st = bloch_from_state(&[ce, cb]);
            for (a, b) in ex.components().iter().zip(st.components()) {
                assert!((a - b).abs() < 1e-15);
            }
            assert!(is_pure_bloch(&st, 1e-9));
            let rho = DensityMatrix::pure(&[ce, cb]);
            let back = DensityMatrix::from_bloch(&st);
            assert!((&rho.0 - &back.0).max_abs() < 1e-15);
        }
    }

    #[test]
    fn amplitude_damping_closed_form() {
        let model = SystemModel::two_level_atom();
        let gamma = 0.8;
        let grid = TimeGrid::covering(1e-3, 4.0).unwrap();
        let rho0 = DensityMatrix::pure(&model.excited_state());
        let out = lindblad_evolve(&model, gamma, &rho0, grid).unwrap();
        for (i, rho) in out.iter().enumerate() {
            let t = grid.t(i);
            let want = 2.0 * (-gamma * t).exp() - 1.0;
            assert!((rho.bloch().z - want).abs() < 1e-10);
            assert!((rho.trace() - ONE).norm() < 1e-10);
            assert!(rho.min_eigenvalue() >= -1e-10);
        }
    }

    #[test]
    fn zero_generator_is_stationary() {
        let model = SystemModel::two_level_atom();
        let grid = TimeGrid::new(0.01, 100).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho0 = DensityMatrix::pure(&[c(s, 0.0), c(0.0, s)]);
        let out = lindblad_evolve(&model, 0.0, &rho0, grid).unwrap();
        assert!(out.iter().all(|r| r == &rho0));
    }

    #[test]
    fn model_validation() {
        let h = CMatrix::from_rows(&[&[ZERO, ONE], &[ZERO, ZERO]]);
        assert!(SystemModel::new(h, CMatrix::zeros(2)).is_err());
        assert!(SystemModel::new(CMatrix::zeros(2), CMatrix::zeros(3)).is_err());
        assert!(SystemModel::new(CMatrix::zeros(1), CMatrix::zeros(1)).is_err());
        let tla = SystemModel::two_level_atom();
        let lx = tla.lindblad_x();
        assert_eq!(lx[(0, 1)], ONE);
        assert_eq!(lx[(1, 0)], ONE);
    }
}
