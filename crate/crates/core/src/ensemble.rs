//! Trajectory averaging with a reduction order fixed by trajectory index.
//!
//! Trajectories are grouped into chunks of [`CHUNK`] consecutive indices and
//! each chunk is summed sequentially. Chunks are evaluated in waves of
//! [`WAVE`]; inside a wave the chunk sums are combined by a fixed pairwise
//! tree and each wave is folded into the running total in order. None of this
//! depends on how many threads ran the chunks.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::CMatrix;
use crate::models::{bloch_from_state, BlochVector, DensityMatrix};
use crate::sse::{Scenario, Variant};

pub const CHUNK: u64 = 16;
pub const WAVE: usize = 8;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn merge(&mut self, other: &Compensated) {
        self.add(other.sum);
        self.add(other.carry);
    }

    #[inline]
    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;
const N: usize = 3;

/// Streaming moments of the per-trajectory Bloch components `(x, y, z, n)`
/// at one grid point: means, centered second moments, and the co-moments of
/// x, y, z with the weight `n` (for the weight-corrected ratio).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    mean: [f64; 4],
    m2: [f64; 4],
    co: [f64; 3],
}

impl Moments {
    /// Welford update; `n` counts the sample being added.
    #[inline]
    fn push(&mut self, v: [f64; 4], n: f64) {
        let mut delta = [0.0; 4];
        for k in 0..4 {
            delta[k] = v[k] - self.mean[k];
            self.mean[k] += delta[k] / n;
        }
        for k in 0..4 {
            self.m2[k] += delta[k] * (v[k] - self.mean[k]);
        }
        for k in 0..3 {
            self.co[k] += delta[k] * (v[N] - self.mean[N]);
        }
    }

    /// Pairwise combination of two disjoint samples of sizes `na`, `nb`.
    #[inline]
    fn merge(&mut self, other: &Moments, na: f64, nb: f64) {
        if nb == 0.0 {
            return;
        }
        if na == 0.0 {
            *self = *other;
            return;
        }
        let n = na + nb;
        let delta: [f64; 4] = std::array::from_fn(|k| other.mean[k] - self.mean[k]);
        let w = na * nb / n;
        for k in 0..4 {
            self.mean[k] += delta[k] * nb / n;
            self.m2[k] += other.m2[k] + delta[k] * delta[k] * w;
        }
        for k in 0..3 {
            self.co[k] += other.co[k] + delta[k] * delta[N] * w;
        }
    }
}

#[derive(Debug, Clone)]
struct Sums {
    dim: usize,
    /// `[t][dim²]` real and imaginary parts of the projector sums.
    density: Vec<Compensated>,
    moments: Vec<Moments>,
    count: u64,
}

impl Sums {
    fn new(len: usize, dim: usize) -> Self {
        Self {
            dim,
            density: vec![Compensated::default(); len * dim * dim * 2],
            moments: vec![Moments::default(); len],
            count: 0,
        }
    }

    /// Adds trajectory number `self.count + 1` at grid point `i`.
    fn record(&mut self, i: usize, psi: &[Complex64], normalize: bool) {
        let d = self.dim;
        let w = psi.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let scale = if normalize { 1.0 / w } else { 1.0 };
        let rho = &mut self.density[i * d * d * 2..(i + 1) * d * d * 2];
        for r in 0..d {
            for c in 0..d {
                let v = psi[r] * psi[c].conj() * scale;
                rho[2 * (r * d + c)].add(v.re);
                rho[2 * (r * d + c) + 1].add(v.im);
            }
        }
        let b = bloch_from_state(&psi[..2]);
        let b = [b.x * scale, b.y * scale, b.z * scale, b.norm * scale];
        self.moments[i].push(b, (self.count + 1) as f64);
    }

    fn merge(&mut self, other: &Sums) {
        for (a, b) in self.density.iter_mut().zip(&other.density) {
            a.merge(b);
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        for (a, b) in self.moments.iter_mut().zip(&other.moments) {
            a.merge(b, na, nb);
        }
        self.count += other.count;
    }
}

fn tree_reduce(mut items: Vec<Sums>) -> Option<Sums> {
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.merge(&b);
            }
            next.push(a);
        }
        items = next;
    }
    items.pop()
}

/// Standard errors of the mean Bloch components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochError {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub norm: f64,
}

impl BlochError {
    pub fn components(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.norm]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub grid: TimeGrid,
    pub variant: Variant,
    pub mean_bloch: Vec<BlochVector>,
    pub std_error: Vec<BlochError>,
    /// Bloch vector divided by the mean weight, with delta-method errors.
    /// Equal to `mean_bloch` up to rounding in actual mode.
    pub weight_corrected: Vec<BlochVector>,
    pub weight_corrected_error: Vec<BlochError>,
    pub mean_density: Vec<DensityMatrix>,
    pub n_traj: u64,
    pub config_hash: String,
}

fn finish(sums: &Sums, grid: TimeGrid, variant: Variant, config_hash: String) -> EnsembleResult {
    let n = sums.count as f64;
    let d = sums.dim;
    let len = grid.len();
    let mut mean_bloch = Vec::with_capacity(len);
    let mut std_error = Vec::with_capacity(len);
    let mut weight_corrected = Vec::with_capacity(len);
    let mut weight_corrected_error = Vec::with_capacity(len);
    let mut mean_density = Vec::with_capacity(len);
    for i in 0..len {
        let mut m = CMatrix::zeros(d);
        let rho = &sums.density[i * d * d * 2..(i + 1) * d * d * 2];
        for r in 0..d {
            for c in 0..d {
                let k = 2 * (r * d + c);
                m[(r, c)] = Complex64::new(rho[k].value() / n, rho[k + 1].value() / n);
            }
        }
        let rho = DensityMatrix(m);
        let b = rho.bloch();

        let mo = &sums.moments[i];
        let sample = |m: f64| if sums.count < 2 { 0.0 } else { m / (n - 1.0) };
        let var = mo.m2.map(|m| sample(m).max(0.0));
        let se = var.map(|v| (v / n).sqrt());
        std_error.push(BlochError {
            x: se[0],
            y: se[1],
            z: se[2],
            norm: se[3],
        });

        let w = b.norm;
        let ratio = |c: f64| c / w;
        let ratio_se = |k: usize, c: f64| {
            let r = c / w;
            let v = var[k] - 2.0 * r * sample(mo.co[k]) + r * r * var[N];
            (v.max(0.0) / n).sqrt() / w.abs()
        };
        weight_corrected.push(BlochVector {
            x: ratio(b.x),
            y: ratio(b.y),
            z: ratio(b.z),
            norm: 1.0,
        });
        weight_corrected_error.push(BlochError {
            x: ratio_se(X, b.x),
            y: ratio_se(Y, b.y),
            z: ratio_se(Z, b.z),
            norm: 0.0,
        });
        mean_bloch.push(b);
        mean_density.push(rho);
    }
    EnsembleResult {
        grid,
        variant,
        mean_bloch,
        std_error,
        weight_corrected,
        weight_corrected_error,
        mean_density,
        n_traj: sums.count,
        config_hash,
    }
}

/// Number of worker threads to use when none is requested.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs trajectories `0..n_traj` of `scenario` and averages their
/// projectors: raw ones in linear mode, normalized ones in actual mode.
///
/// The output is bitwise identical for every `threads >= 1`.
pub fn run_ensemble(scenario: &Scenario, n_traj: u64, threads: usize) -> Result<EnsembleResult> {
    if n_traj == 0 {
        return Err(Error::config("n_traj", "must be >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;

    let grid = scenario.grid();
    let dim = scenario.model().dim();
    let normalize = scenario.config().variant == Variant::Actual;
    let n_chunks = n_traj.div_ceil(CHUNK);

    let run_chunk = |chunk: u64| -> (Sums, Vec<Error>) {
        let mut sums = Sums::new(grid.len(), dim);
        let mut errors = Vec::new();
        let start = chunk * CHUNK;
        for index in start..(start + CHUNK).min(n_traj) {
            // Any failure fails the whole run, so partial rows are harmless.
            match scenario.drive(index, |i, psi| sums.record(i, psi, normalize)) {
                Ok(()) => sums.count += 1,
                Err(e) => errors.push(e),
            }
        }
        (sums, errors)
    };

    let mut total = Sums::new(grid.len(), dim);
    let mut failures: Vec<Error> = Vec::new();
    let mut failed = 0usize;
    let mut first_chunk = 0u64;
    while first_chunk < n_chunks {
        let last = (first_chunk + WAVE as u64).min(n_chunks);
        let results: Vec<(Sums, Vec<Error>)> =
            pool.install(|| (first_chunk..last).into_par_iter().map(run_chunk).collect());
        let mut wave = Vec::with_capacity(results.len());
        for (s, errs) in results {
            failed += errs.len();
            if failures.is_empty() {
                failures.extend(errs.into_iter().take(1));
            }
            wave.push(s);
        }
        if let Some(w) = tree_reduce(wave) {
            total.merge(&w);
        }
        first_chunk = last;
    }
    if failed > 0 {
        return Err(Error::Ensemble {
            failed,
            total: n_traj,
            first: Box::new(failures.remove(0)),
        });
    }
    Ok(finish(
        &total,
        grid,
        scenario.config().variant,
        ScenarioConfig {
            n_traj,
            ..scenario.config().clone()
        }
        .hash(),
    ))
}

/// Deviation of an ensemble from a reference curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    /// `max_t |mean − reference|` for x, y, z, norm.
    pub max_abs: [f64; 4],
    /// `|mean − reference|` per grid point.
    pub time_resolved: Vec<[f64; 4]>,
    /// Three-standard-error half widths per grid point.
    pub envelope: Vec<[f64; 4]>,
    /// Fraction of grid points where the reference lies inside the envelope
    /// in every one of x, y, z.
    pub inside_envelope: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl DeviationReport {
    /// Largest deviation among x, y and z.
    pub fn max_component(&self) -> f64 {
        self.max_abs[..3].iter().copied().fold(0.0, f64::max)
    }
}

/// Compares the ensemble mean against `reference` on the same grid. Passes
/// when every x, y, z deviation is within `tolerance`.
pub fn compare(
    result: &EnsembleResult,
    reference: &[BlochVector],
    tolerance: f64,
) -> Result<DeviationReport> {
    compare_series(&result.mean_bloch, &result.std_error, reference, tolerance)
}

/// As [`compare`], but on an explicit mean/error series (e.g. the weight
/// corrected one).
pub fn compare_series(
    mean: &[BlochVector],
    error: &[BlochError],
    reference: &[BlochVector],
    tolerance: f64,
) -> Result<DeviationReport> {
    if mean.len() != reference.len() || error.len() != mean.len() {
        return Err(Error::GridMismatch(format!(
            "result has {} points, reference has {}",
            mean.len(),
            reference.len()
        )));
    }
    let mut max_abs = [0.0f64; 4];
    let mut time_resolved = Vec::with_capacity(mean.len());
    let mut envelope = Vec::with_capacity(mean.len());
    let mut inside = 0usize;
    for ((m, e), r) in mean.iter().zip(error).zip(reference) {
        let dev = [
            (m.x - r.x).abs(),
            (m.y - r.y).abs(),
            (m.z - r.z).abs(),
            (m.norm - r.norm).abs(),
        ];
        let env = e.components().map(|s| 3.0 * s);
        for k in 0..4 {
            max_abs[k] = max_abs[k].max(dev[k]);
        }
        if (0..3).all(|k| dev[k] <= env[k]) {
            inside += 1;
        }
        time_resolved.push(dev);
        envelope.push(env);
    }
    let passed = max_abs[..3].iter().all(|&d| d <= tolerance);
    Ok(DeviationReport {
        max_abs,
        time_resolved,
        envelope,
        inside_envelope: if mean.is_empty() {
            1.0
        } else {
            inside as f64 / mean.len() as f64
        },
        tolerance,
        passed,
    })
}
