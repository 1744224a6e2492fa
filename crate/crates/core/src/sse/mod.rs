//! Stochastic Schrödinger equation steppers.
//!
//! All steppers are explicit Euler updates of the state vector, written once
//! against a generic [`SystemModel`]. Non-Markovian equations use the scalar
//! closure `∫₀ᵗ K(t−s) Ô(t,s) ds = F(t) L̂`; the drive is the noise value that
//! multiplies `L̂` (`z*` for complex noise, `z` for real noise). Expectations
//! are evaluated in the normalized state at the start of the step.

mod trajectory;

pub use trajectory::{run_trajectory, Scenario, TrajectoryRecord};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr, CMatrix, ZERO};
use crate::models::SystemModel;

/// Measurement basis of the bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unraveling {
    /// Coherent-state measurement, complex colored noise.
    Coherent,
    /// Two-mode quadrature measurement, real colored noise.
    Quadrature,
    /// Markov limit of the coherent unraveling.
    Heterodyne,
    /// Markov limit of the quadrature unraveling.
    Homodyne,
}

impl Unraveling {
    pub fn is_markov(self) -> bool {
        matches!(self, Unraveling::Heterodyne | Unraveling::Homodyne)
    }

    /// Real-valued noise (quadrature family).
    pub fn is_real(self) -> bool {
        matches!(self, Unraveling::Quadrature | Unraveling::Homodyne)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Unraveling::Coherent => "coherent",
            Unraveling::Quadrature => "quadrature",
            Unraveling::Heterodyne => "heterodyne",
            Unraveling::Homodyne => "homodyne",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Ostensible-measure linear SSE; unnormalized states.
    Linear,
    /// Normalized SSE driven by the Girsanov-shifted noise.
    Actual,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Linear => "linear",
            Variant::Actual => "actual",
        }
    }
}

/// Conditioned system state (`C_e` at index 0, `C_b` at index 1 for the TLA).
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub amplitudes: Vec<Complex64>,
}

impl SystemState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn weight(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }
}

/// Append-only record of `⟨L†⟩_s` (coherent) or `⟨L_x⟩_s` (quadrature), one
/// entry per completed grid step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpectationHistory {
    values: Vec<Complex64>,
}

impl ExpectationHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: Complex64) {
        self.values.push(v);
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Operators the steppers need, with the unraveling's `Ĝ` (`L̂†` or `L̂_x`)
/// folded in, plus scratch space so that stepping does not allocate.
#[derive(Debug, Clone)]
pub struct Stepper {
    dim: usize,
    h: CMatrix,
    l: CMatrix,
    g: CMatrix,
    gl: CMatrix,
    ldl: CMatrix,
    hamiltonian_zero: bool,
    hpsi: Vec<Complex64>,
    lpsi: Vec<Complex64>,
    glpsi: Vec<Complex64>,
    gpsi: Vec<Complex64>,
    mid: Vec<Complex64>,
    half: Vec<Complex64>,
}

/// Expectations at the start of a step, taken in the normalized state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expectations {
    pub weight: f64,
    /// `⟨L̂⟩`
    pub l: Complex64,
    /// `⟨Ĝ⟩`: `⟨L̂†⟩` or `⟨L̂_x⟩`
    pub g: Complex64,
    /// `⟨ĜL̂⟩`
    pub gl: Complex64,
}

const MIN_NORM: f64 = 1e-12;

impl Stepper {
    pub fn new(model: &SystemModel, unraveling: Unraveling) -> Self {
        let l = model.lindblad().clone();
        let ld = l.adjoint();
        let g = if unraveling.is_real() {
            model.lindblad_x()
        } else {
            ld.clone()
        };
        let gl = &g * &l;
        let ldl = &ld * &l;
        let d = model.dim();
        Self {
            dim: d,
            hamiltonian_zero: model.hamiltonian().max_abs() == 0.0,
            h: model.hamiltonian().clone(),
            l,
            g,
            gl,
            ldl,
            hpsi: vec![ZERO; d],
            lpsi: vec![ZERO; d],
            glpsi: vec![ZERO; d],
            gpsi: vec![ZERO; d],
            mid: vec![ZERO; d],
            half: vec![ZERO; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn apply_ops(&mut self, psi: &[Complex64]) {
        if !self.hamiltonian_zero {
            self.h.apply_into(psi, &mut self.hpsi);
        }
        self.l.apply_into(psi, &mut self.lpsi);
        self.gl.apply_into(psi, &mut self.glpsi);
    }

    /// Normalized expectations of `L̂`, `Ĝ`, `ĜL̂`. Fails on a null state.
    pub fn expectations(&mut self, psi: &[Complex64]) -> Result<Expectations> {
        let w = norm_sqr(psi);
        if !(w.sqrt() >= MIN_NORM) {
            return Err(Error::ZeroNorm(w.sqrt()));
        }
        self.l.apply_into(psi, &mut self.lpsi);
        self.g.apply_into(psi, &mut self.gpsi);
        self.gl.apply_into(psi, &mut self.glpsi);
        Ok(Expectations {
            weight: w,
            l: inner(psi, &self.lpsi) / w,
            g: inner(psi, &self.gpsi) / w,
            gl: inner(psi, &self.glpsi) / w,
        })
    }

    /// `|ψ̃⟩ += dt (−iĤ + z L̂ − F ĜL̂)|ψ̃⟩`
    pub fn linear(&mut self, psi: &mut [Complex64], f: Complex64, drive: Complex64, dt: f64) {
        self.apply_ops(psi);
        for k in 0..self.dim {
            let mut d = drive * self.lpsi[k] - f * self.glpsi[k];
            if !self.hamiltonian_zero {
                d += Complex64::new(self.hpsi[k].im, -self.hpsi[k].re);
            }
            psi[k] += dt * d;
        }
    }

    /// Euler step of the normalized (actual) SSE:
    /// `dt [−iĤ + (L̂−⟨L̂⟩)z − (Ĝ−⟨Ĝ⟩)L̂F + ⟨(Ĝ−⟨Ĝ⟩)L̂⟩F] |ψ⟩`.
    pub fn actual(
        &mut self,
        psi: &mut [Complex64],
        f: Complex64,
        drive: Complex64,
        dt: f64,
    ) -> Result<Expectations> {
        let e = self.expectations(psi)?;
        if !self.hamiltonian_zero {
            self.h.apply_into(psi, &mut self.hpsi);
        }
        let centered = e.gl - e.g * e.l;
        for k in 0..self.dim {
            let mut d = (self.lpsi[k] - e.l * psi[k]) * drive
                - (self.glpsi[k] - e.g * self.lpsi[k]) * f
                + centered * f * psi[k];
            if !self.hamiltonian_zero {
                d += Complex64::new(self.hpsi[k].im, -self.hpsi[k].re);
            }
            psi[k] += dt * d;
        }
        Ok(e)
    }

    /// Euler–Maruyama step of the Markov-limit Itô equations. `drive · dt` is
    /// the stochastic increment; for the actual variant it must already carry
    /// the `(γ/2)⟨·⟩` shift.
    ///
    /// * linear (both): `−iĤ + z L̂ − (γ/2) L̂†L̂`
    /// * actual heterodyne: `−iĤ + (L̂−⟨L̂⟩)z* − (γ/2)(L̂†L̂ − L̂⟨L̂†⟩)`
    /// * actual homodyne: `−iĤ + (L̂−⟨L̂⟩)z − (γ/2)(L̂†L̂ − L̂⟨L̂†⟩ + L̂⟨L̂⟩ − ⟨L̂⟩²)`
    pub fn markov(
        &mut self,
        psi: &mut [Complex64],
        gamma: f64,
        drive: Complex64,
        dt: f64,
        variant: Variant,
        real_noise: bool,
    ) -> Result<()> {
        let half = 0.5 * gamma;
        match variant {
            Variant::Linear => {
                self.markov_linear_rhs(psi, gamma, drive);
                for k in 0..self.dim {
                    psi[k] += dt * self.mid[k];
                }
            }
            Variant::Actual => {
                let w = norm_sqr(psi);
                if !(w.sqrt() >= MIN_NORM) {
                    return Err(Error::ZeroNorm(w.sqrt()));
                }
                self.l.apply_into(psi, &mut self.lpsi);
                self.ldl.apply_into(psi, &mut self.glpsi);
                if !self.hamiltonian_zero {
                    self.h.apply_into(psi, &mut self.hpsi);
                }
                let el = inner(psi, &self.lpsi) / w;
                let eld = el.conj();
                // Coefficients of L̂ψ and ψ in the dissipative part.
                let (l_coeff, psi_coeff) = if real_noise {
                    (eld - el, el * el)
                } else {
                    (eld, ZERO)
                };
                for k in 0..self.dim {
                    let mut d = (self.lpsi[k] - el * psi[k]) * drive
                        - half * (self.glpsi[k] - l_coeff * self.lpsi[k] - psi_coeff * psi[k]);
                    if !self.hamiltonian_zero {
                        d += Complex64::new(self.hpsi[k].im, -self.hpsi[k].re);
                    }
                    psi[k] += dt * d;
                }
            }
        }
        Ok(())
    }

    fn markov_linear_rhs(&mut self, psi: &[Complex64], gamma: f64, drive: Complex64) {
        let half = 0.5 * gamma;
        self.l.apply_into(psi, &mut self.lpsi);
        self.ldl.apply_into(psi, &mut self.glpsi);
        if !self.hamiltonian_zero {
            self.h.apply_into(psi, &mut self.hpsi);
        }
        for k in 0..self.dim {
            let mut d = drive * self.lpsi[k] - half * self.glpsi[k];
            if !self.hamiltonian_zero {
                d += Complex64::new(self.hpsi[k].im, -self.hpsi[k].re);
            }
            self.mid[k] = d;
        }
    }

    /// Midpoint step of the Stratonovich linear heterodyne equation
    /// `∂_t|ψ̃⟩ = (−iĤ + z* L̂ − (γ/2) L̂†L̂)|ψ̃⟩`, with the noise frozen over the
    /// step. Its Itô correction vanishes, so this must agree in ensemble with
    /// the Euler step of the Itô form.
    pub fn markov_midpoint_linear(
        &mut self,
        psi: &mut [Complex64],
        gamma: f64,
        drive: Complex64,
        dt: f64,
    ) {
        self.markov_linear_rhs(psi, gamma, drive);
        let mut half_step = std::mem::take(&mut self.half);
        for k in 0..self.dim {
            half_step[k] = psi[k] + 0.5 * dt * self.mid[k];
        }
        self.markov_linear_rhs(&half_step, gamma, drive);
        for k in 0..self.dim {
            psi[k] += dt * self.mid[k];
        }
        self.half = half_step;
    }
}

/// Linear SSE step (see [`Stepper::linear`]).
pub fn step_linear(
    state: &SystemState,
    model: &SystemModel,
    unraveling: Unraveling,
    f_t: Complex64,
    drive: Complex64,
    dt: f64,
) -> SystemState {
    let mut next = state.clone();
    Stepper::new(model, unraveling).linear(&mut next.amplitudes, f_t, drive, dt);
    next
}

/// Actual SSE step (see [`Stepper::actual`]).
pub fn step_actual(
    state: &SystemState,
    model: &SystemModel,
    unraveling: Unraveling,
    f_t: Complex64,
    drive: Complex64,
    dt: f64,
) -> Result<SystemState> {
    let mut next = state.clone();
    Stepper::new(model, unraveling).actual(&mut next.amplitudes, f_t, drive, dt)?;
    Ok(next)
}

/// Markov-limit step (see [`Stepper::markov`]). `unraveling` must be
/// heterodyne or homodyne.
pub fn step_markov(
    state: &SystemState,
    model: &SystemModel,
    gamma: f64,
    drive: Complex64,
    dt: f64,
    variant: Variant,
    unraveling: Unraveling,
) -> Result<SystemState> {
    let mut next = state.clone();
    Stepper::new(model, unraveling).markov(
        &mut next.amplitudes,
        gamma,
        drive,
        dt,
        variant,
        unraveling.is_real(),
    )?;
    Ok(next)
}

/// The measured current `I = z_Λ + γ⟨·⟩`, with `⟨L̂⟩` for heterodyne and
/// `⟨L̂_x⟩` for homodyne detection.
///
/// It carries the full `γ`, whereas the noise that conditions the state,
/// [`conditioning_noise`], carries `γ/2`: the record is what is measured just
/// after the system interaction, the conditioning noise sits on the delta
/// kernel's endpoint.
pub fn markov_record(z_lambda: Complex64, expectation: Complex64, gamma: f64, real: bool) -> Complex64 {
    if real {
        Complex64::new(z_lambda.re + gamma * expectation.re, 0.0)
    } else {
        z_lambda + gamma * expectation
    }
}

/// `z = z_Λ + (γ/2)⟨·⟩`, the Markov-limit noise that conditions the actual
/// state (unconjugated form).
pub fn conditioning_noise(z_lambda: Complex64, expectation: Complex64, gamma: f64, real: bool) -> Complex64 {
    if real {
        Complex64::new(z_lambda.re + 0.5 * gamma * expectation.re, 0.0)
    } else {
        z_lambda + 0.5 * gamma * expectation
    }
}
