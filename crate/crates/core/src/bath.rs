//! Discrete-mode baths: memory kernels, vacuum sampling of mode amplitudes,
//! colored-noise synthesis and the Girsanov shift from ostensible to actual
//! noise.
//!
//! Colored noise is built exactly from sampled mode amplitudes evaluated on the
//! grid, so its two-time correlations are those of the bath by construction.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::ZERO;
use crate::rng::standard_normal;
use crate::sse::ExpectationHistory;

/// One bath mode: real coupling `g_k >= 0` and detuning `Ω_k = ω_k − ω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub coupling: f64,
    pub detuning: f64,
}

impl BathMode {
    pub fn new(coupling: f64, detuning: f64) -> Self {
        Self { coupling, detuning }
    }
}

/// Ordered list of bath modes.
///
/// Symmetric baths are stored canonically: pairs `(+k, −k)` adjacent, with
/// `+k` carrying the non-negative detuning, in ascending `|Ω|`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathConfig {
    modes: Vec<BathMode>,
    symmetric_pairs: bool,
}

impl BathConfig {
    pub fn new(modes: Vec<BathMode>, symmetric_pairs: bool) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidBath("bath needs at least one mode".into()));
        }
        for (k, m) in modes.iter().enumerate() {
            if !(m.coupling.is_finite() && m.coupling >= 0.0) {
                return Err(Error::InvalidBath(format!(
                    "mode {k}: coupling must be finite and >= 0, got {}",
                    m.coupling
                )));
            }
            if !m.detuning.is_finite() {
                return Err(Error::InvalidBath(format!("mode {k}: detuning is not finite")));
            }
        }
        if symmetric_pairs {
            if modes.len() % 2 != 0 {
                return Err(Error::InvalidBath(
                    "symmetric bath needs an even number of modes".into(),
                ));
            }
            let mut last = -1.0;
            for (p, pair) in modes.chunks_exact(2).enumerate() {
                let (plus, minus) = (pair[0], pair[1]);
                if plus.detuning < 0.0 || minus.detuning != -plus.detuning {
                    return Err(Error::InvalidBath(format!(
                        "pair {p}: detunings must be (+Ω, −Ω) with Ω >= 0"
                    )));
                }
                if plus.coupling != minus.coupling {
                    return Err(Error::InvalidBath(format!(
                        "pair {p}: couplings of ±k must be equal"
                    )));
                }
                if plus.detuning < last {
                    return Err(Error::InvalidBath(
                        "pairs must be in ascending |Ω| order".into(),
                    ));
                }
                last = plus.detuning;
            }
        }
        Ok(Self {
            modes,
            symmetric_pairs,
        })
    }

    /// Symmetric bath from `(g_k, |Ω_k|)` for the positive modes; the mirror
    /// modes are added and the list is put in canonical order.
    pub fn symmetric(pairs: &[(f64, f64)]) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.iter().map(|&(g, w)| (g, w.abs())).collect();
        pairs.sort_by(|a, b| a.1.total_cmp(&b.1));
        let modes = pairs
            .iter()
            .flat_map(|&(g, w)| [BathMode::new(g, w), BathMode::new(g, -w)])
            .collect();
        Self::new(modes, true)
    }

    /// The two-mode bath of the TLA benchmark: `g_{±1} = g`, `Ω_{±1} = ±Δ`.
    pub fn two_mode(g: f64, delta: f64) -> Result<Self> {
        Self::symmetric(&[(g, delta)])
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric_pairs
    }

    /// The `+k` members of each symmetric pair (empty for non-symmetric baths).
    pub fn positive_modes(&self) -> impl Iterator<Item = &BathMode> {
        self.modes.iter().step_by(2).take(self.pair_count())
    }

    pub fn pair_count(&self) -> usize {
        if self.symmetric_pairs {
            self.modes.len() / 2
        } else {
            0
        }
    }
}

/// `α(τ) = Σ_k g_k² e^{−iΩ_k τ}`.
pub fn memory_kernel(bath: &BathConfig, tau: f64) -> Complex64 {
    if bath.is_symmetric() {
        // The ± terms combine into a cosine; summing them as complex
        // exponentials would leave an imaginary rounding residue.
        return Complex64::new(symmetric_kernel(bath, tau), 0.0);
    }
    bath.modes
        .iter()
        .map(|m| m.coupling * m.coupling * Complex64::from_polar(1.0, -m.detuning * tau))
        .sum()
}

/// `β(τ) = 2 Σ_{k>0} g_k² cos(Ω_k τ)`, the real kernel of a symmetric bath.
pub fn real_kernel(bath: &BathConfig, tau: f64) -> Result<f64> {
    if !bath.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(symmetric_kernel(bath, tau))
}

fn symmetric_kernel(bath: &BathConfig, tau: f64) -> f64 {
    bath.positive_modes()
        .map(|m| 2.0 * m.coupling * m.coupling * (m.detuning * tau).cos())
        .sum()
}

/// Complex mode amplitudes `{a_k}` drawn from the vacuum distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSample {
    pub amplitudes: Vec<Complex64>,
}

/// Quadrature amplitudes `X_k⁺`, `Y_k⁻`, one of each per symmetric pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadSample {
    pub x_plus: Vec<f64>,
    pub y_minus: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BathSample {
    Coherent(ModeSample),
    Quadrature(QuadSample),
}

/// Each `a_k` is complex Gaussian with `E|a|² = 1`, `E[a²] = 0`.
pub fn sample_coherent<R: Rng + ?Sized>(bath: &BathConfig, rng: &mut R) -> ModeSample {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amplitudes = (0..bath.len())
        .map(|_| {
            let re = standard_normal(rng) * s;
            let im = standard_normal(rng) * s;
            Complex64::new(re, im)
        })
        .collect();
    ModeSample { amplitudes }
}

/// Each `X_k⁺`, `Y_k⁻` is real Gaussian with variance 1/2.
pub fn sample_quadrature<R: Rng + ?Sized>(bath: &BathConfig, rng: &mut R) -> Result<QuadSample> {
    if !bath.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let n = bath.pair_count();
    let mut x_plus = Vec::with_capacity(n);
    let mut y_minus = Vec::with_capacity(n);
    for _ in 0..n {
        x_plus.push(standard_normal(rng) * s);
        y_minus.push(standard_normal(rng) * s);
    }
    Ok(QuadSample { x_plus, y_minus })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    Coherent,
    Quadrature,
    MarkovComplex,
    MarkovReal,
}

impl NoiseKind {
    pub fn is_real(self) -> bool {
        matches!(self, NoiseKind::Quadrature | NoiseKind::MarkovReal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Coherent => "coherent",
            NoiseKind::Quadrature => "quadrature",
            NoiseKind::MarkovComplex => "markov-complex",
            NoiseKind::MarkovReal => "markov-real",
        }
    }
}

/// A realized noise function on the grid. Real kinds store exact zeros in the
/// imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    pub grid: TimeGrid,
    pub values: Vec<Complex64>,
    pub kind: NoiseKind,
}

impl NoisePath {
    #[inline]
    pub fn at(&self, i: usize) -> Complex64 {
        self.values[i]
    }
}

/// `e^{−iΩ_k t_i}` for every grid point and mode, stored row-major by time.
///
/// Shared read-only by all trajectories of a run; both the noise synthesis and
/// the Girsanov shift read from it so that they agree bitwise.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    grid: TimeGrid,
    bath: BathConfig,
    phases: Vec<Complex64>,
}

impl PhaseTable {
    pub fn new(bath: &BathConfig, grid: TimeGrid) -> Self {
        let mut phases = Vec::with_capacity(grid.len() * bath.len());
        for i in 0..grid.len() {
            let t = grid.t(i);
            for m in bath.modes() {
                let (s, c) = (m.detuning * t).sin_cos();
                phases.push(Complex64::new(c, -s));
            }
        }
        Self {
            grid,
            bath: bath.clone(),
            phases,
        }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn bath(&self) -> &BathConfig {
        &self.bath
    }

    #[inline]
    fn row(&self, i: usize) -> &[Complex64] {
        let k = self.bath.len();
        &self.phases[i * k..(i + 1) * k]
    }

    /// `Σ_k g_k a_k e^{−iΩ_k t_i}`
    #[inline]
    pub fn coherent_value(&self, sample: &ModeSample, i: usize) -> Complex64 {
        self.bath
            .modes()
            .iter()
            .zip(&sample.amplitudes)
            .zip(self.row(i))
            .fold(ZERO, |acc, ((m, a), p)| acc + (m.coupling * a) * p)
    }

    /// `Σ_{k>0} 2 g_k (X_k⁺ cos Ω_k t_i + Y_k⁻ sin Ω_k t_i)`, in real arithmetic.
    #[inline]
    pub fn quadrature_value(&self, sample: &QuadSample, i: usize) -> f64 {
        let row = self.row(i);
        let mut acc = 0.0;
        for (p, m) in self.bath.positive_modes().enumerate() {
            let phase = row[2 * p];
            let (c, s) = (phase.re, -phase.im);
            acc += 2.0 * m.coupling * (sample.x_plus[p] * c + sample.y_minus[p] * s);
        }
        acc
    }

    pub fn synthesize(&self, sample: &BathSample) -> Result<NoisePath> {
        let n = self.grid.len();
        match sample {
            BathSample::Coherent(s) => {
                if s.amplitudes.len() != self.bath.len() {
                    return Err(Error::SampleMismatch(format!(
                        "{} amplitudes for {} modes",
                        s.amplitudes.len(),
                        self.bath.len()
                    )));
                }
                Ok(NoisePath {
                    grid: self.grid,
                    values: (0..n).map(|i| self.coherent_value(s, i)).collect(),
                    kind: NoiseKind::Coherent,
                })
            }
            BathSample::Quadrature(s) => {
                if !self.bath.is_symmetric() {
                    return Err(Error::NotSymmetric);
                }
                let pairs = self.bath.pair_count();
                if s.x_plus.len() != pairs || s.y_minus.len() != pairs {
                    return Err(Error::SampleMismatch(format!(
                        "quadrature sample sized ({}, {}) for {pairs} pairs",
                        s.x_plus.len(),
                        s.y_minus.len()
                    )));
                }
                Ok(NoisePath {
                    grid: self.grid,
                    values: (0..n)
                        .map(|i| Complex64::new(self.quadrature_value(s, i), 0.0))
                        .collect(),
                    kind: NoiseKind::Quadrature,
                })
            }
        }
    }
}

pub fn synthesize_noise(bath: &BathConfig, sample: &BathSample, grid: TimeGrid) -> Result<NoisePath> {
    PhaseTable::new(bath, grid).synthesize(sample)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhiteNoiseKind {
    Complex,
    Real,
}

/// White noise `z(t_i) = √γ ζ(t_i)` with `E|ζ|² = 1/dt`, one independent draw
/// per grid point.
pub fn sample_markov_noise<R: Rng + ?Sized>(
    gamma: f64,
    grid: TimeGrid,
    kind: WhiteNoiseKind,
    rng: &mut R,
) -> Result<NoisePath> {
    let mut values = Vec::with_capacity(grid.len());
    let mut draw = white_noise_sampler(gamma, grid.dt(), kind)?;
    for _ in 0..grid.len() {
        values.push(draw(rng));
    }
    Ok(NoisePath {
        grid,
        values,
        kind: match kind {
            WhiteNoiseKind::Complex => NoiseKind::MarkovComplex,
            WhiteNoiseKind::Real => NoiseKind::MarkovReal,
        },
    })
}

/// Per-step white-noise draw; used directly by trajectories so they need not
/// materialize the whole path.
pub(crate) fn white_noise_sampler<R: Rng + ?Sized>(
    gamma: f64,
    dt: f64,
    kind: WhiteNoiseKind,
) -> Result<impl FnMut(&mut R) -> Complex64> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::config("gamma", format!("must be >= 0, got {gamma}")));
    }
    let scale = match kind {
        WhiteNoiseKind::Complex => (gamma / (2.0 * dt)).sqrt(),
        WhiteNoiseKind::Real => (gamma / dt).sqrt(),
    };
    Ok(move |rng: &mut R| match kind {
        WhiteNoiseKind::Complex => {
            let re = standard_normal(rng) * scale;
            let im = standard_normal(rng) * scale;
            Complex64::new(re, im)
        }
        WhiteNoiseKind::Real => Complex64::new(standard_normal(rng) * scale, 0.0),
    })
}

/// Kernel of the Girsanov convolution.
#[derive(Debug, Clone)]
pub enum GirsanovKernel {
    /// `K = α*`, history `⟨L†⟩`; drives the coherent SSE through `z*`.
    Coherent(BathConfig),
    /// `K = β`, history `⟨L_x⟩`; drives the quadrature SSE through real `z`.
    Quadrature(BathConfig),
    /// `K = γ δ(τ)`; the endpoint of the delta gets half weight.
    Markov { gamma: f64 },
}

/// Running mode sums for the Girsanov convolution.
///
/// For a discrete bath the kernel factorizes over modes,
/// `α*(t_i − t_j) = Σ_k g_k² e^{iΩ_k t_i} e^{−iΩ_k t_j}`, so the left-endpoint
/// Riemann sum `Σ_{j<i} K(t_i − t_j) h_j dt` is carried as one running sum per
/// mode and costs O(κ) per step. [`girsanov_shift`] evaluates the same sums in
/// the same order, so the two agree bitwise.
#[derive(Debug, Clone)]
pub struct GirsanovAccumulator<'a> {
    table: &'a PhaseTable,
    quadrature: bool,
    coherent_sums: Vec<Complex64>,
    cos_sums: Vec<f64>,
    sin_sums: Vec<f64>,
    pushed: usize,
}

impl<'a> GirsanovAccumulator<'a> {
    pub fn coherent(table: &'a PhaseTable) -> Self {
        Self {
            table,
            quadrature: false,
            coherent_sums: vec![ZERO; table.bath.len()],
            cos_sums: Vec::new(),
            sin_sums: Vec::new(),
            pushed: 0,
        }
    }

    pub fn quadrature(table: &'a PhaseTable) -> Result<Self> {
        if !table.bath.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let n = table.bath.pair_count();
        Ok(Self {
            table,
            quadrature: true,
            coherent_sums: Vec::new(),
            cos_sums: vec![0.0; n],
            sin_sums: vec![0.0; n],
            pushed: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.pushed
    }

    pub fn is_empty(&self) -> bool {
        self.pushed == 0
    }

    /// Appends `h_j` for `j = self.len()`. Quadrature accumulators use the real
    /// part only.
    #[inline]
    pub fn push(&mut self, h: Complex64) {
        let j = self.pushed;
        let dt = self.table.grid.dt();
        let row = self.table.row(j);
        if self.quadrature {
            let w = h.re * dt;
            for p in 0..self.cos_sums.len() {
                let phase = row[2 * p];
                self.cos_sums[p] += phase.re * w;
                self.sin_sums[p] += -phase.im * w;
            }
        } else {
            let w = h * dt;
            for (s, p) in self.coherent_sums.iter_mut().zip(row) {
                *s += p * w;
            }
        }
        self.pushed += 1;
    }

    /// `Σ_{j<i} K(t_i − t_j) h_j dt` with `i = self.len()`.
    #[inline]
    pub fn shift(&self) -> Complex64 {
        let i = self.pushed;
        let row = self.table.row(i);
        if self.quadrature {
            let mut acc = 0.0;
            for (p, m) in self.table.bath.positive_modes().enumerate() {
                let phase = row[2 * p];
                let (c, s) = (phase.re, -phase.im);
                acc += 2.0 * m.coupling * m.coupling * (c * self.cos_sums[p] + s * self.sin_sums[p]);
            }
            Complex64::new(acc, 0.0)
        } else {
            self.table
                .bath
                .modes()
                .iter()
                .zip(row)
                .zip(&self.coherent_sums)
                .fold(ZERO, |acc, ((m, p), s)| {
                    acc + (m.coupling * m.coupling) * (p.conj() * s)
                })
        }
    }

    /// The drive entering the stepper at grid index `self.len()`:
    /// `z*_Λ + shift` for coherent, `z_Λ + shift` (real) for quadrature.
    #[inline]
    pub fn drive(&self, z_lambda: Complex64) -> Complex64 {
        let shift = self.shift();
        if self.quadrature {
            Complex64::new(z_lambda.re + shift.re, 0.0)
        } else {
            z_lambda.conj() + shift
        }
    }
}

/// Actual (Girsanov-shifted) noise at grid index `t_index`, in the form it
/// multiplies `L̂` in the SSE:
///
/// * coherent: `z*(t_i) = z*_Λ(t_i) + Σ_{j<i} α*(t_i − t_j) ⟨L†⟩_j dt`
/// * quadrature: `z(t_i) = z_Λ(t_i) + Σ_{j<i} β(t_i − t_j) ⟨L_x⟩_j dt`
/// * Markov: `z_Λ + (γ/2) h_i`, the conjugate taken as for the matching
///   unraveling (`z_lambda` of kind `MarkovComplex` is conjugated). The delta
///   kernel needs the current expectation, so `history` must hold index
///   `t_index` itself.
pub fn girsanov_shift(
    z_lambda: &NoisePath,
    history: &ExpectationHistory,
    kernel: &GirsanovKernel,
    t_index: usize,
) -> Result<Complex64> {
    if t_index >= z_lambda.values.len() {
        return Err(Error::InvalidGrid(format!(
            "index {t_index} outside noise path of length {}",
            z_lambda.values.len()
        )));
    }
    let z = z_lambda.values[t_index];
    match kernel {
        GirsanovKernel::Markov { gamma } => {
            let h = history.values().get(t_index).copied().ok_or(Error::HistoryTooShort {
                have: history.len(),
                need: t_index + 1,
            })?;
            Ok(markov_drive(z, h, *gamma, z_lambda.kind.is_real()))
        }
        GirsanovKernel::Coherent(bath) | GirsanovKernel::Quadrature(bath) => {
            if history.len() < t_index {
                return Err(Error::HistoryTooShort {
                    have: history.len(),
                    need: t_index,
                });
            }
            let table = PhaseTable::new(bath, z_lambda.grid);
            let mut acc = match kernel {
                GirsanovKernel::Coherent(_) => GirsanovAccumulator::coherent(&table),
                _ => GirsanovAccumulator::quadrature(&table)?,
            };
            for &h in &history.values()[..t_index] {
                acc.push(h);
            }
            Ok(acc.drive(z))
        }
    }
}

/// Markov-limit conditioning drive: `z*_Λ + (γ/2)⟨L†⟩` (complex) or
/// `z_Λ + (γ/2)⟨L_x⟩` (real).
#[inline]
pub fn markov_drive(z_lambda: Complex64, expectation: Complex64, gamma: f64, real: bool) -> Complex64 {
    if real {
        Complex64::new(z_lambda.re + 0.5 * gamma * expectation.re, 0.0)
    } else {
        z_lambda.conj() + 0.5 * gamma * expectation
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::trajectory_rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kernel_at_zero_is_total_coupling() {
        let bath = BathConfig::new(
            vec![BathMode::new(0.5, 1.3), BathMode::new(2.0, -0.7), BathMode::new(1.0, 4.0)],
            false,
        )
        .unwrap();
        let a0 = memory_kernel(&bath, 0.0);
        assert_eq!(a0, c(0.25 + 4.0 + 1.0, 0.0));
    }

    #[test]
    fn two_mode_kernel_is_cosine() {
        let (g, d) = (1.0, 2.0);
        let bath = BathConfig::two_mode(g, d).unwrap();
        for i in 0..50 {
            let tau = i as f64 * 0.173 - 3.0;
            let a = memory_kernel(&bath, tau);
            assert!((a.re - 2.0 * g * g * (d * tau).cos()).abs() < 1e-14);
            assert_eq!(a.im, 0.0);
            assert_eq!(real_kernel(&bath, tau).unwrap(), a.re);
        }
    }

    #[test]
    fn kernel_hermitian_symmetry() {
        let bath = BathConfig::new(
            vec![BathMode::new(0.5, 1.3), BathMode::new(2.0, -0.7), BathMode::new(1.0, 4.0)],
            false,
        )
        .unwrap();
        for i in 0..100 {
            let tau = i as f64 * 0.05;
            let lhs = memory_kernel(&bath, -tau);
            let rhs = memory_kernel(&bath, tau).conj();
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn symmetric_bath_validation() {
        assert!(BathConfig::new(vec![BathMode::new(1.0, 1.0)], true).is_err());
        assert!(BathConfig::new(
            vec![BathMode::new(1.0, 1.0), BathMode::new(1.1, -1.0)],
            true
        )
        .is_err());
        assert!(BathConfig::new(
            vec![BathMode::new(1.0, 2.0), BathMode::new(1.0, -2.0), BathMode::new(1.0, 1.0), BathMode::new(1.0, -1.0)],
            true
        )
        .is_err());
        assert!(BathConfig::new(vec![], false).is_err());
        assert!(BathConfig::new(vec![BathMode::new(-1.0, 0.0)], false).is_err());
        let b = BathConfig::symmetric(&[(1.0, 3.0), (0.5, -1.0)]).unwrap();
        let dets: Vec<f64> = b.modes().iter().map(|m| m.detuning).collect();
        assert_eq!(dets, vec![1.0, -1.0, 3.0, -3.0]);
    }

    #[test]
    fn quadrature_sampling_rejects_asymmetric_bath() {
        let bath = BathConfig::new(vec![BathMode::new(1.0, 1.0)], false).unwrap();
        let mut rng = trajectory_rng(0, 0);
        assert_eq!(sample_quadrature(&bath, &mut rng), Err(Error::NotSymmetric));
    }

    #[test]
    fn zero_amplitudes_give_zero_noise() {
        let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
        let grid = TimeGrid::new(0.01, 100).unwrap();
        let s = BathSample::Coherent(ModeSample {
            amplitudes: vec![ZERO; 2],
        });
        let p = synthesize_noise(&bath, &s, grid).unwrap();
        assert!(p.values.iter().all(|v| *v == ZERO));
    }

    #[test]
    fn single_excited_amplitude_gives_rotating_phase() {
        let (g, d) = (0.7, 2.0);
        let bath = BathConfig::two_mode(g, d).unwrap();
        let grid = TimeGrid::new(0.01, 300).unwrap();
        let s = BathSample::Coherent(ModeSample {
            amplitudes: vec![c(1.0, 0.0), ZERO],
        });
        let p = synthesize_noise(&bath, &s, grid).unwrap();
        for (i, v) in p.values.iter().enumerate() {
            let want = g * Complex64::from_polar(1.0, -d * grid.t(i));
            assert!((v - want).norm() < 1e-15);
        }
    }

    #[test]
    fn quadrature_paths_are_exactly_real() {
        let bath = BathConfig::symmetric(&[(1.0, 2.0), (0.3, 5.0)]).unwrap();
        let grid = TimeGrid::new(0.01, 500).unwrap();
        let mut rng = trajectory_rng(1, 2);
        let s = sample_quadrature(&bath, &mut rng).unwrap();
        let p = synthesize_noise(&bath, &BathSample::Quadrature(s), grid).unwrap();
        assert_eq!(p.kind, NoiseKind::Quadrature);
        assert!(p.values.iter().all(|v| v.im.to_bits() == 0));
    }

    #[test]
    fn sample_kind_must_match_bath() {
        let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
        let grid = TimeGrid::new(0.01, 10).unwrap();
        let bad = BathSample::Coherent(ModeSample {
            amplitudes: vec![ZERO; 3],
        });
        assert!(matches!(
            synthesize_noise(&bath, &bad, grid),
            Err(Error::SampleMismatch(_))
        ));
        let single = BathConfig::new(vec![BathMode::new(1.0, 1.0)], false).unwrap();
        let q = BathSample::Quadrature(QuadSample {
            x_plus: vec![0.0],
            y_minus: vec![0.0],
        });
        assert_eq!(synthesize_noise(&single, &q, grid), Err(Error::NotSymmetric));
    }

    #[test]
    fn zero_gamma_white_noise_vanishes() {
        let grid = TimeGrid::new(1e-3, 100).unwrap();
        let mut rng = trajectory_rng(0, 0);
        let p = sample_markov_noise(0.0, grid, WhiteNoiseKind::Complex, &mut rng).unwrap();
        assert!(p.values.iter().all(|v| v.norm() == 0.0));
        assert!(sample_markov_noise(-1.0, grid, WhiteNoiseKind::Real, &mut rng).is_err());
    }

    #[test]
    fn empty_history_leaves_noise_unchanged() {
        let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
        let grid = TimeGrid::new(0.01, 10).unwrap();
        let mut rng = trajectory_rng(3, 0);
        let s = BathSample::Coherent(sample_coherent(&bath, &mut rng));
        let p = synthesize_noise(&bath, &s, grid).unwrap();
        let h = ExpectationHistory::new();
        let z = girsanov_shift(&p, &h, &GirsanovKernel::Coherent(bath.clone()), 0).unwrap();
        assert_eq!(z, p.values[0].conj());
    }

    #[test]
    fn markov_shift_is_half_gamma() {
        let grid = TimeGrid::new(1e-3, 20).unwrap();
        let mut rng = trajectory_rng(0, 1);
        let p = sample_markov_noise(2.0, grid, WhiteNoiseKind::Complex, &mut rng).unwrap();
        let cval = c(0.3, -0.2);
        let mut h = ExpectationHistory::new();
        for _ in 0..20 {
            h.push(cval);
        }
        for i in [0, 5, 19] {
            let z = girsanov_shift(&p, &h, &GirsanovKernel::Markov { gamma: 2.0 }, i).unwrap();
            assert!((z - (p.values[i].conj() + 1.0 * cval)).norm() < 1e-15);
        }
        let short = ExpectationHistory::new();
        assert!(matches!(
            girsanov_shift(&p, &short, &GirsanovKernel::Markov { gamma: 2.0 }, 0),
            Err(Error::HistoryTooShort { .. })
        ));
    }

    #[test]
    fn history_shorter_than_index_is_an_error() {
        let bath = BathConfig::two_mode(1.0, 2.0).unwrap();
        let grid = TimeGrid::new(0.01, 10).unwrap();
        let p = synthesize_noise(
            &bath,
            &BathSample::Coherent(ModeSample {
                amplitudes: vec![ZERO; 2],
            }),
            grid,
        )
        .unwrap();
        let mut h = ExpectationHistory::new();
        h.push(ONE_C);
        assert_eq!(
            girsanov_shift(&p, &h, &GirsanovKernel::Coherent(bath), 3),
            Err(Error::HistoryTooShort { have: 1, need: 3 })
        );
    }

    const ONE_C: Complex64 = Complex64::new(1.0, 0.0);
}
