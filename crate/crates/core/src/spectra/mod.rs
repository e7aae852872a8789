//! Frequency sweeps of the photon channel: absorption, excess coherence loss
//! and superposition creation.

mod csv_io;
mod peaks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    extract_field_channel, photon_population, Dissipator, DynamicsError, JcConfig,
    MasterEquation, Model, Propagation, ThreeLevelConfig, DEFAULT_DT,
};
use crate::linalg::{partial_trace, ComplexMatrix, HilbertLabel};

pub use csv_io::{read_csv, read_csv_from, write_csv, write_csv_to, CSV_HEADER};
pub use peaks::{local_maxima, local_minima, smooth3};

/// Tolerance between the directly measured `p` and `1 − σ₀₀`.
pub const CONSISTENCY_TOL: f64 = 1e-10;
/// Most negative excess coherence loss accepted as rounding.
pub const EXCESS_LOSS_FLOOR: f64 = -1e-8;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("invalid sweep configuration: {0}")]
    Config(String),
    #[error("grid point {index} (x = {x}): {source}")]
    Point {
        index: usize,
        x: f64,
        #[source]
        source: DynamicsError,
    },
    #[error("grid point {index} (x = {x}): {what}")]
    Inconsistent { index: usize, x: f64, what: String },
    #[error("no records to write")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed CSV: {0}")]
    Parse(String),
}

/// Which model parameter the grid sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    /// Photon detuning `δ = ω − ω_a`.
    #[serde(rename = "delta")]
    Delta,
    /// Photon energy `ω`.
    #[serde(rename = "omega")]
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    /// Evenly spaced values including both ends.
    pub fn values(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + span * (i as f64) / last
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvelopeConfig {
    pub t_max: f64,
    pub t_step: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        EnvelopeConfig {
            t_max: 500.0,
            t_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Model,
    pub axis: Axis,
    pub grid: Grid,
    pub snapshot_time: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<EnvelopeConfig>,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

impl SweepConfig {
    /// `δ ∈ [−1, 1]` with 101 points at `t = π/(2g)`, `g = 0.1`, `ω_a = 1`,
    /// `q = 0.01`.
    pub fn jc_reference(dissipator: Dissipator) -> Self {
        let model = JcConfig::reference(0.0, dissipator);
        SweepConfig {
            snapshot_time: std::f64::consts::PI / (2.0 * model.g),
            model: Model::Jc(model),
            axis: Axis::Delta,
            grid: Grid {
                start: -1.0,
                stop: 1.0,
                points: 101,
            },
            envelope: None,
            dt: DEFAULT_DT,
        }
    }

    /// `ω ∈ [0.5, 3.5]` with 301 points at `t = 25`.
    pub fn three_level_reference(envelope: bool) -> Self {
        SweepConfig {
            model: Model::ThreeLevel(ThreeLevelConfig::reference(2.0)),
            axis: Axis::Omega,
            grid: Grid {
                start: 0.5,
                stop: 3.5,
                points: 301,
            },
            snapshot_time: 25.0,
            envelope: envelope.then(EnvelopeConfig::default),
            dt: DEFAULT_DT,
        }
    }

    pub fn validate(&self) -> Result<(), SpectraError> {
        let bad = |msg: String| Err(SpectraError::Config(msg));
        self.model
            .validate()
            .map_err(|e| SpectraError::Config(e.to_string()))?;
        let g = &self.grid;
        if g.points < 2 {
            return bad(format!("grid needs at least 2 points, got {}", g.points));
        }
        if !(g.start.is_finite() && g.stop.is_finite() && g.start < g.stop) {
            return bad(format!("grid needs start < stop, got [{}, {}]", g.start, g.stop));
        }
        if !(self.snapshot_time.is_finite() && self.snapshot_time >= 0.0) {
            return bad(format!("snapshot_time {} must be >= 0", self.snapshot_time));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt {} must be > 0", self.dt));
        }
        if let Some(env) = &self.envelope {
            if !(env.t_step.is_finite() && env.t_step > 0.0) {
                return bad(format!("envelope t_step {} must be > 0", env.t_step));
            }
            if !(env.t_max.is_finite() && env.t_max >= env.t_step) {
                return bad(format!("envelope t_max {} must be >= t_step", env.t_max));
            }
        }
        if let (Model::ThreeLevel(_), Axis::Delta) = (&self.model, self.axis) {
            return bad("the three-level model has no single detuning; sweep \"omega\"".into());
        }
        Ok(())
    }

    /// The model with the swept parameter set to `x`.
    pub fn model_at(&self, x: f64) -> Model {
        match (self.axis, self.model) {
            (Axis::Delta, Model::Jc(cfg)) => Model::Jc(JcConfig {
                omega: cfg.omega_a + x,
                ..cfg
            }),
            (_, model) => model.with_omega(x),
        }
    }
}

/// One grid point of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub x: f64,
    pub p: f64,
    pub excess_loss: f64,
    pub sigma01_abs: f64,
    pub p_min_envelope: Option<f64>,
    pub sigma01_max_envelope: Option<f64>,
}

/// Runs every grid point; records come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SpectrumRecord>, SpectraError> {
    cfg.validate()?;
    cfg.grid
        .values()
        .into_par_iter()
        .enumerate()
        .map(|(index, x)| sweep_point(cfg, index, x))
        .collect()
}

/// Single grid point of [`run_sweep`].
pub fn sweep_point(cfg: &SweepConfig, index: usize, x: f64) -> Result<SpectrumRecord, SpectraError> {
    let at_point = |source| SpectraError::Point { index, x, source };
    let model = cfg.model_at(x);
    let channel = extract_field_channel(&model, cfg.snapshot_time, Propagation::Rk4 { dt: cfg.dt })
        .map_err(at_point)?;
    let p = channel.photon_probability;
    let sigma00 = channel.params.sigma00();
    let deviation = (p - (1.0 - sigma00)).abs();
    if deviation > CONSISTENCY_TOL {
        return Err(SpectraError::Inconsistent {
            index,
            x,
            what: format!("p = {p} but 1 - sigma00 = {}", 1.0 - sigma00),
        });
    }
    let excess_loss = channel.excess_coherence_loss();
    if excess_loss < EXCESS_LOSS_FLOOR {
        return Err(SpectraError::Inconsistent {
            index,
            x,
            what: format!("excess coherence loss {excess_loss:e} is negative"),
        });
    }
    let (p_min_envelope, sigma01_max_envelope) = match &cfg.envelope {
        Some(env) => {
            let (p_min, s_max) = envelope(&model, env.t_max, env.t_step, cfg.dt).map_err(at_point)?;
            (Some(p_min), Some(s_max))
        }
        None => (None, None),
    };
    Ok(SpectrumRecord {
        x,
        p,
        excess_loss,
        sigma01_abs: channel.params.sigma01().norm(),
        p_min_envelope,
        sigma01_max_envelope,
    })
}

/// Minimum photon probability and maximum `|σ₀₁|` over `t = 0, t_step, …`
/// up to `t_max`, for a single photon entering with the atom in its ground
/// state. One trajectory is integrated.
pub fn envelope(
    model: &Model,
    t_max: f64,
    t_step: f64,
    dt: f64,
) -> Result<(f64, f64), DynamicsError> {
    if !(t_step.is_finite() && t_step > 0.0 && t_max.is_finite() && t_max >= t_step) {
        return Err(DynamicsError::InvalidConfig(format!(
            "envelope needs 0 < t_step <= t_max, got t_step = {t_step}, t_max = {t_max}"
        )));
    }
    model.validate()?;
    let (rate, dissipator) = model.dissipation();
    let eq = MasterEquation::new(model.hamiltonian(), rate, dissipator)?;
    let atom_dim = model.atom_dim();
    let label = HilbertLabel::new(&[2, atom_dim]);
    let rho0 = ComplexMatrix::unit(2, 1, 1).kron(&ComplexMatrix::unit(atom_dim, 0, 0));
    let run = crate::dynamics::evolve_sampled(&eq, &rho0, t_max, dt, Some(t_step))?;
    let mut p_min = f64::INFINITY;
    let mut sigma01_max: f64 = 0.0;
    for rho in &run.states {
        p_min = p_min.min(photon_population(rho, atom_dim));
        let field = partial_trace(rho, &label, &[0])?;
        sigma01_max = sigma01_max.max(field[(0, 1)].norm());
    }
    Ok((p_min, sigma01_max))
}

/// Aggregate numbers reported after a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSummary {
    pub points: usize,
    pub min_p: f64,
    pub max_excess_loss: f64,
    pub max_sigma01_abs: f64,
    pub min_p_envelope: Option<f64>,
    pub max_sigma01_envelope: Option<f64>,
}

impl SweepSummary {
    pub fn of(records: &[SpectrumRecord]) -> Self {
        let fold_opt = |values: Vec<Option<f64>>, pick: fn(f64, f64) -> f64| {
            values.into_iter().flatten().reduce(pick)
        };
        SweepSummary {
            points: records.len(),
            min_p: records.iter().map(|r| r.p).fold(f64::INFINITY, f64::min),
            max_excess_loss: records.iter().map(|r| r.excess_loss).fold(f64::NEG_INFINITY, f64::max),
            max_sigma01_abs: records.iter().map(|r| r.sigma01_abs).fold(0.0, f64::max),
            min_p_envelope: fold_opt(records.iter().map(|r| r.p_min_envelope).collect(), f64::min),
            max_sigma01_envelope: fold_opt(
                records.iter().map(|r| r.sigma01_max_envelope).collect(),
                f64::max,
            ),
        }
    }
}
