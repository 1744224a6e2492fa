use num_complex::Complex64;

use crate::ansatz::{kernel_equivalence_check, solve_ansatz, AnsatzSolution};
use crate::bath::{
    markov_drive, sample_coherent, sample_quadrature, white_noise_sampler, BathConfig,
    GirsanovAccumulator, NoiseKind, PhaseTable, WhiteNoiseKind,
};
use crate::config::{Mode, ScenarioConfig, Scheme};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::models::{bloch_from_state, BlochVector, SystemModel};
use crate::rng::trajectory_rng;

use super::{Stepper, Unraveling, Variant};

/// Bloch series of one trajectory.
///
/// Linear trajectories record the raw unnormalized state. Actual trajectories
/// record the components of the normalized state and keep the raw weight
/// `⟨ψ|ψ⟩` in `norm`, so the integrator's norm drift stays visible.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub grid: TimeGrid,
    pub bloch: Vec<BlochVector>,
    pub noise_kind: NoiseKind,
    pub variant: Variant,
    pub seed: u64,
    pub index: u64,
}

impl TrajectoryRecord {
    /// `max_t |‖ψ(t)‖ − 1|`
    pub fn max_norm_drift(&self) -> f64 {
        self.bloch
            .iter()
            .map(|b| (b.norm.sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

enum Dynamics {
    Colored {
        table: PhaseTable,
        ansatz: AnsatzSolution,
    },
    White {
        gamma: f64,
    },
}

/// A validated SSE scenario with everything that is shared between its
/// trajectories precomputed: phase table, ansatz solution, operators.
pub struct Scenario {
    config: ScenarioConfig,
    grid: TimeGrid,
    model: SystemModel,
    stepper: Stepper,
    dynamics: Dynamics,
}

impl Scenario {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        if config.mode != Mode::Sse {
            return Err(Error::config("mode", "trajectories need mode=sse"));
        }
        let grid = config.grid()?;
        let model = SystemModel::two_level_atom();
        let dynamics = if config.unraveling.is_markov() {
            Dynamics::White {
                gamma: config.gamma()?,
            }
        } else {
            let bath = BathConfig::two_mode(config.g, config.delta)?;
            if config.unraveling == Unraveling::Quadrature && !kernel_equivalence_check(&bath, grid)
            {
                return Err(Error::NotSymmetric);
            }
            Dynamics::Colored {
                table: PhaseTable::new(&bath, grid),
                ansatz: solve_ansatz(config.g, config.delta, grid)?,
            }
        };
        Ok(Self {
            stepper: Stepper::new(&model, config.unraveling),
            config: config.clone(),
            grid,
            model,
            dynamics,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn model(&self) -> &SystemModel {
        &self.model
    }

    pub fn ansatz(&self) -> Option<&AnsatzSolution> {
        match &self.dynamics {
            Dynamics::Colored { ansatz, .. } => Some(ansatz),
            Dynamics::White { .. } => None,
        }
    }

    pub fn noise_kind(&self) -> NoiseKind {
        match self.config.unraveling {
            Unraveling::Coherent => NoiseKind::Coherent,
            Unraveling::Quadrature => NoiseKind::Quadrature,
            Unraveling::Heterodyne => NoiseKind::MarkovComplex,
            Unraveling::Homodyne => NoiseKind::MarkovReal,
        }
    }

    /// Integrates trajectory `index` and hands the state at every grid point
    /// to `visit`. Deterministic in `(config, index)`.
    pub fn drive<V>(&self, index: u64, mut visit: V) -> Result<()>
    where
        V: FnMut(usize, &[Complex64]),
    {
        self.drive_inner(index, &mut visit).map_err(|e| Error::Trajectory {
            index,
            source: Box::new(e),
        })
    }

    fn drive_inner(&self, index: u64, visit: &mut dyn FnMut(usize, &[Complex64])) -> Result<()> {
        let mut rng = trajectory_rng(self.config.master_seed, index);
        let mut stepper = self.stepper.clone();
        let mut psi = self.model.excited_state();
        let n = self.grid.len();
        let dt = self.grid.dt();
        let variant = self.config.variant;
        let unraveling = self.config.unraveling;

        match &self.dynamics {
            Dynamics::Colored { table, ansatz } => {
                let bath = table.bath();
                let (coherent, quadrature) = match unraveling {
                    Unraveling::Quadrature => (None, Some(sample_quadrature(bath, &mut rng)?)),
                    _ => (Some(sample_coherent(bath, &mut rng)), None),
                };
                let z_lambda = |i: usize| match (&coherent, &quadrature) {
                    (Some(s), _) => table.coherent_value(s, i),
                    (_, Some(s)) => Complex64::new(table.quadrature_value(s, i), 0.0),
                    _ => unreachable!(),
                };
                let mut acc = if quadrature.is_some() {
                    GirsanovAccumulator::quadrature(table)?
                } else {
                    GirsanovAccumulator::coherent(table)
                };
                for i in 0..n {
                    visit(i, &psi);
                    if i + 1 == n {
                        break;
                    }
                    let zl = z_lambda(i);
                    let f = ansatz.at(i);
                    match variant {
                        Variant::Linear => {
                            let drive = if quadrature.is_some() { zl } else { zl.conj() };
                            stepper.linear(&mut psi, f, drive, dt);
                        }
                        Variant::Actual => {
                            let drive = acc.drive(zl);
                            let e = stepper.actual(&mut psi, f, drive, dt)?;
                            acc.push(e.g);
                        }
                    }
                }
            }
            Dynamics::White { gamma } => {
                let real = unraveling.is_real();
                let kind = if real {
                    WhiteNoiseKind::Real
                } else {
                    WhiteNoiseKind::Complex
                };
                let mut draw = white_noise_sampler(*gamma, dt, kind)?;
                for i in 0..n {
                    visit(i, &psi);
                    if i + 1 == n {
                        break;
                    }
                    let zl = draw(&mut rng);
                    match (variant, self.config.scheme) {
                        (Variant::Linear, Scheme::Midpoint) => {
                            stepper.markov_midpoint_linear(&mut psi, *gamma, zl.conj(), dt)
                        }
                        (Variant::Linear, Scheme::Euler) => {
                            let drive = if real { zl } else { zl.conj() };
                            stepper.markov(&mut psi, *gamma, drive, dt, variant, real)?;
                        }
                        (Variant::Actual, _) => {
                            let e = stepper.expectations(&psi)?;
                            let drive = markov_drive(zl, e.g, *gamma, real);
                            stepper.markov(&mut psi, *gamma, drive, dt, variant, real)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn run_trajectory(&self, index: u64) -> Result<TrajectoryRecord> {
        let mut bloch = Vec::with_capacity(self.grid.len());
        let actual = self.config.variant == Variant::Actual;
        self.drive(index, |_, psi| {
            let b = bloch_from_state(psi);
            bloch.push(if actual && b.norm > 0.0 {
                BlochVector {
                    x: b.x / b.norm,
                    y: b.y / b.norm,
                    z: b.z / b.norm,
                    norm: b.norm,
                }
            } else {
                b
            });
        })?;
        Ok(TrajectoryRecord {
            grid: self.grid,
            bloch,
            noise_kind: self.noise_kind(),
            variant: self.config.variant,
            seed: self.config.master_seed,
            index,
        })
    }
}

/// One-off trajectory straight from a config. For many trajectories build a
/// [`Scenario`] once and reuse it.
pub fn run_trajectory(config: &ScenarioConfig, index: u64) -> Result<TrajectoryRecord> {
    Scenario::new(config)?.run_trajectory(index)
}
