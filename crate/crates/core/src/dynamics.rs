//! Time-dependent state-vector simulation of the Rydberg array Hamiltonian
//!
//! ```text
//! H(t) = sum_i [Omega(t) sigma_x^(i) - Delta_i(t) n_i] + sum_(i,j) U_ij n_i n_j
//! ```
//!
//! in the computational basis (bit i of a basis index = Rydberg occupation of
//! atom i). The detuning ramps are Delta_i(t) = f_i * delta0 * (t - t_f/2)/t_f,
//! so the diagonal splits into a static interaction table and a factor-sum
//! table scaled by the instantaneous sweep value; the sigma_x drive couples
//! basis states differing in one bit. Everything is applied matrix-free.
//!
//! Evolution uses a fourth-order commutator-free Magnus scheme: each step
//! applies two constant-Hamiltonian exponentials (Gauss-node averages of H),
//! each computed to tight tolerance with a Lanczos Krylov expansion. The
//! propagation is therefore norm-preserving up to roundoff, and the step
//! count only has to resolve the slow pulse envelopes, not the interaction
//! energy scale.

mod integrator;
mod spectrum;

pub use spectrum::{final_band_spectrum, minimal_gap, GapConfig, GapResult, SpectrumRecord};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detuning::DetuningProfile;
use crate::graph::Graph;
use crate::{Error, Result};

/// Vertex cap for dense operator assembly and dense diagonalization.
pub const DENSE_CAP: usize = 12;

/// Default vertex cap for state-vector evolution.
pub const DEFAULT_SIMULATION_CAP: usize = 14;

/// Drive protocol tag carried through records and file outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Traditional,
    LocalDegree,
}

impl Protocol {
    pub fn label(&self) -> &'static str {
        match self {
            Protocol::Traditional => "trad",
            Protocol::LocalDegree => "ld",
        }
    }
}

/// Rabi envelope shape; zero at both protocol endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaShape {
    /// Omega_max * sin^2(pi t / t_f).
    SineSquared,
    /// Linear ramp up over `ramp_fraction * t_f`, flat top, symmetric ramp down.
    Trapezoid { ramp_fraction: f64 },
}

impl OmegaShape {
    pub fn value(&self, omega_max: f64, t: f64, t_f: f64) -> f64 {
        let s = (t / t_f).clamp(0.0, 1.0);
        match self {
            OmegaShape::SineSquared => {
                let x = (std::f64::consts::PI * s).sin();
                omega_max * x * x
            }
            OmegaShape::Trapezoid { ramp_fraction } => {
                let r = ramp_fraction.clamp(1e-9, 0.5);
                if s < r {
                    omega_max * s / r
                } else if s > 1.0 - r {
                    omega_max * (1.0 - s) / r
                } else {
                    omega_max
                }
            }
        }
    }
}

/// The annealing pulse: Rabi envelope plus per-vertex detuning ramps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub t_f: f64,
    pub omega_max: f64,
    pub shape: OmegaShape,
    pub protocol: Protocol,
    /// Supplies the per-vertex factors and the sweep scale delta0.
    pub profile: DetuningProfile,
}

impl PulseSchedule {
    /// Traditional protocol: homogeneous detuning ramps (all factors 1).
    pub fn traditional(t_f: f64, omega_max: f64, shape: OmegaShape, n: usize, delta0: f64) -> Self {
        Self {
            t_f,
            omega_max,
            shape,
            protocol: Protocol::Traditional,
            profile: DetuningProfile::homogeneous(n, delta0),
        }
    }

    /// Local-degree protocol driven by an engineered profile.
    pub fn local_degree(
        t_f: f64,
        omega_max: f64,
        shape: OmegaShape,
        profile: DetuningProfile,
    ) -> Self {
        Self {
            t_f,
            omega_max,
            shape,
            protocol: Protocol::LocalDegree,
            profile,
        }
    }

    /// Rabi frequency at time `t`.
    pub fn omega(&self, t: f64) -> f64 {
        self.shape.value(self.omega_max, t, self.t_f)
    }

    /// The common detuning sweep delta(t) = delta0 (t - t_f/2)/t_f; vertex i
    /// sees f_i * delta(t).
    pub fn delta_scale(&self, t: f64) -> f64 {
        self.profile.delta0 * (t - 0.5 * self.t_f) / self.t_f
    }

    /// Detuning ramp of vertex `i` at time `t`.
    pub fn detuning(&self, i: usize, t: f64) -> f64 {
        self.profile.factors[i] * self.delta_scale(t)
    }
}

/// Rydberg interaction model: U_ij = C6 / r_ij^6 on graph edges only.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    graph: Graph,
    c6: f64,
    /// (u, v, U_uv) per edge.
    interactions: Vec<(usize, usize, f64)>,
}

impl HamiltonianModel {
    /// Requires vertex positions (interaction energies are distance-derived).
    pub fn new(graph: Graph, c6: f64) -> Result<Self> {
        if graph.positions().is_none() {
            return Err(Error::MissingPositions);
        }
        let mut interactions = Vec::with_capacity(graph.m());
        for &(u, v) in graph.edges() {
            let r = graph.distance(u, v)?;
            interactions.push((u, v, c6 / r.powi(6)));
        }
        Ok(Self {
            graph,
            c6,
            interactions,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn c6(&self) -> f64 {
        self.c6
    }

    pub fn interactions(&self) -> &[(usize, usize, f64)] {
        &self.interactions
    }

    /// Smallest edge interaction energy (infinity for edgeless graphs).
    pub fn u_min(&self) -> f64 {
        self.interactions
            .iter()
            .map(|&(_, _, u)| u)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Precomputed per-basis-state tables for matrix-free application of H.
pub(crate) struct BasisTables {
    n: usize,
    /// Interaction energy of each basis state (sum of U over internal edges).
    u_int: Vec<f64>,
    /// Sum of detuning factors over the excited bits of each basis state.
    fsum: Vec<f64>,
}

impl BasisTables {
    pub(crate) fn new(model: &HamiltonianModel, factors: &[f64], cap: usize) -> Result<Self> {
        let n = model.graph.n();
        if n > cap {
            return Err(Error::Config(format!(
                "graph has {n} vertices, above the simulation cap {cap}"
            )));
        }
        if factors.len() != n {
            return Err(Error::Config(format!(
                "{} detuning factors for {n} vertices",
                factors.len()
            )));
        }
        let dim = 1usize << n;
        // Per-vertex interaction rows for the incremental diagonal build.
        let mut row = vec![vec![0.0f64; n]; n];
        for &(u, v, uij) in &model.interactions {
            row[u][v] = uij;
            row[v][u] = uij;
        }
        let mut u_int = vec![0.0f64; dim];
        let mut fsum = vec![0.0f64; dim];
        for s in 1..dim {
            let h = (usize::BITS - 1 - s.leading_zeros()) as usize;
            let rest = s & !(1usize << h);
            let mut du = u_int[rest];
            let mut bits = rest;
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                du += row[h][j];
            }
            u_int[s] = du;
            fsum[s] = fsum[rest] + factors[h];
        }
        Ok(Self { n, u_int, fsum })
    }

    pub(crate) fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn dim(&self) -> usize {
        1 << self.n
    }

    /// out = (cx * X + diag) psi with diag[s] = cu * u_int[s] - cdelta * fsum[s].
    pub(crate) fn apply(
        &self,
        cx: f64,
        cdelta: f64,
        cu: f64,
        psi: &[Complex64],
        out: &mut [Complex64],
    ) {
        let dim = self.dim();
        for s in 0..dim {
            let diag = cu * self.u_int[s] - cdelta * self.fsum[s];
            let mut acc = psi[s] * diag;
            for i in 0..self.n {
                acc += psi[s ^ (1 << i)] * cx;
            }
            out[s] = acc;
        }
    }

    /// Dense symmetric matrix at fixed drive and sweep values.
    pub(crate) fn dense(&self, omega: f64, delta: f64) -> DMatrix<f64> {
        let dim = self.dim();
        let mut h = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            h[(s, s)] = self.u_int[s] - delta * self.fsum[s];
            for i in 0..self.n {
                h[(s, s ^ (1 << i))] = omega;
            }
        }
        h
    }

    /// Gershgorin-style bound on the spectral range over the whole sweep.
    pub(crate) fn spectral_range(&self, omega_max: f64, delta0: f64) -> f64 {
        let half = 0.5 * delta0.abs();
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        for s in 0..self.dim() {
            hi = hi.max(self.u_int[s] + half * self.fsum[s].abs());
            lo = lo.min(self.u_int[s] - half * self.fsum[s].abs());
        }
        (hi - lo) + 2.0 * omega_max.abs() * self.n as f64
    }
}

/// Assembles the dense Hamiltonian at time `t` (small systems only).
pub fn assemble_hamiltonian(
    model: &HamiltonianModel,
    schedule: &PulseSchedule,
    t: f64,
) -> Result<DMatrix<f64>> {
    let tables = BasisTables::new(model, &schedule.profile.factors, DENSE_CAP)?;
    Ok(tables.dense(schedule.omega(t), schedule.delta_scale(t)))
}

/// A state vector over the 2^N computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// All atoms in the ground state: basis index 0.
    pub fn ground(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::ZERO; 1 << n];
        amplitudes[0] = Complex64::ONE;
        Self { amplitudes }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>, n: usize) -> Result<Self> {
        if amplitudes.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                dim: amplitudes.len(),
                n,
            });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Probability of the basis state `mask`.
    pub fn probability(&self, mask: u64) -> f64 {
        self.amplitudes[mask as usize].norm_sqr()
    }

    /// Mean number of excitations.
    pub fn mean_excitations(&self) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .map(|(s, a)| s.count_ones() as f64 * a.norm_sqr())
            .sum()
    }
}

/// Fixed-step integrator settings; the defaults reproduce the shipped results.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Explicit step count; `None` derives one from the spectral-range bound.
    pub steps: Option<usize>,
    /// Target spectral-range * dt per step for the automatic step count.
    pub theta_target: f64,
    /// Krylov truncation tolerance for each exponential.
    pub krylov_tol: f64,
    /// Krylov dimension cap; beyond it the step is split in half.
    pub krylov_max: usize,
    /// Allowed |norm - 1| at the end of the sweep.
    pub norm_tol: f64,
    /// Vertex cap for state-vector evolution.
    pub simulation_cap: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            steps: None,
            theta_target: 16.0,
            krylov_tol: 1e-12,
            krylov_max: 96,
            norm_tol: 1e-6,
            simulation_cap: DEFAULT_SIMULATION_CAP,
        }
    }
}

impl IntegratorConfig {
    pub(crate) fn resolve_steps(&self, tables: &BasisTables, schedule: &PulseSchedule) -> usize {
        if let Some(steps) = self.steps {
            return steps.max(1);
        }
        let range = tables.spectral_range(schedule.omega_max, schedule.profile.delta0);
        let auto = (schedule.t_f * range / self.theta_target).ceil() as usize;
        auto.clamp(64, 2_000_000)
    }
}

/// Final state plus integration diagnostics.
#[derive(Debug, Clone)]
pub struct EvolveResult {
    pub state: QuantumState,
    pub steps: usize,
    /// |norm(t_f) - 1|.
    pub norm_drift: f64,
}

/// Integrates the Schrödinger equation from the all-ground state over the full
/// sweep `[0, t_f]`. Deterministic for a fixed configuration.
pub fn evolve(
    model: &HamiltonianModel,
    schedule: &PulseSchedule,
    config: &IntegratorConfig,
) -> Result<EvolveResult> {
    evolve_observed(model, schedule, config, |_, _| {})
}

/// [`evolve`] with a per-step observer `(t, amplitudes)`, called once for the
/// initial state and after every accepted step.
pub fn evolve_observed(
    model: &HamiltonianModel,
    schedule: &PulseSchedule,
    config: &IntegratorConfig,
    mut observer: impl FnMut(f64, &[Complex64]),
) -> Result<EvolveResult> {
    let tables = BasisTables::new(model, &schedule.profile.factors, config.simulation_cap)?;
    let steps = config.resolve_steps(&tables, schedule);
    let dt = schedule.t_f / steps as f64;

    let mut psi = vec![Complex64::ZERO; tables.dim()];
    psi[0] = Complex64::ONE;
    observer(0.0, &psi);

    let mut workspace = integrator::Workspace::new(tables.dim(), config.krylov_max);
    for step in 0..steps {
        let t = step as f64 * dt;
        integrator::cf4_step(&tables, schedule, t, dt, &mut psi, &mut workspace, config)?;
        observer(t + dt, &psi);
    }

    let state = QuantumState { amplitudes: psi };
    let norm_drift = (state.norm() - 1.0).abs();
    if norm_drift > config.norm_tol {
        return Err(Error::IntegratorFailure {
            drift: norm_drift,
            tol: config.norm_tol,
        });
    }
    Ok(EvolveResult {
        state,
        steps,
        norm_drift,
    })
}

#[cfg(test)]
mod tests;
