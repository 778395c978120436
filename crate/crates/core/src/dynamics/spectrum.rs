//! Final-time band spectra and minimal-gap scans.
//!
//! At the end of the sweep both pulse terms vanish except the detuning
//! diagonal, so every independent set S is an eigenstate with energy
//! `-(delta0/2) * sum_{i in S} f_i`; the interaction term contributes zero on
//! independent sets. Bands are these energies grouped by excitation count.
//!
//! The minimal gap is measured from the instantaneous ground state to the
//! first eigenvalue above the target ground manifold (the MIS-degenerate
//! states), which stays finite at the sweep end even when several maximum
//! sets share the final ground energy. The bare ground-to-first-excited gap
//! is reported alongside with a degeneracy flag.

use serde::{Deserialize, Serialize};

use super::{BasisTables, HamiltonianModel, PulseSchedule, DENSE_CAP};
use crate::detuning::DetuningProfile;
use crate::mis::IsCatalog;
use crate::{Error, Result};

/// Exact-degeneracy threshold for the first-excited gap.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Energies of all independent-set eigenstates at the end of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub delta0: f64,
    pub mis_size: usize,
    /// `bands[k]` lists (bitmask, energy) for every size-k independent set,
    /// aligned with the catalog stratum order.
    pub bands: Vec<Vec<(u64, f64)>>,
    /// Mean energy over the MIS manifold.
    pub e_mis_mean: f64,
    /// Connectivity tag per `|MIS|-1` state (aligned with the catalog stratum).
    pub connected: Vec<bool>,
    /// True when every k-excitation band lies strictly below the (k-1) band.
    pub band_separated: bool,
    /// Smallest separation between adjacent bands (negative if overlapping).
    pub min_band_separation: f64,
    /// Filled in by [`minimal_gap`] when a sweep scan has been run.
    pub delta_min: Option<GapResult>,
}

impl SpectrumRecord {
    /// Energies of the `|MIS|-1` band, aligned with the catalog stratum order.
    pub fn near_mis_energies(&self) -> Vec<f64> {
        if self.mis_size == 0 {
            return Vec::new();
        }
        self.bands[self.mis_size - 1]
            .iter()
            .map(|&(_, e)| e)
            .collect()
    }
}

/// Computes the final-time spectrum of every independent-set eigenstate.
pub fn final_band_spectrum(catalog: &IsCatalog, profile: &DetuningProfile) -> SpectrumRecord {
    let half_sweep = 0.5 * profile.delta0;
    let energy = |mask: u64| -> f64 {
        let mut e = 0.0;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            e += profile.factors[v];
        }
        -half_sweep * e
    };

    let bands: Vec<Vec<(u64, f64)>> = (0..catalog.strata())
        .map(|k| {
            catalog
                .sets_of_size(k)
                .iter()
                .map(|&mask| (mask, energy(mask)))
                .collect()
        })
        .collect();

    let mis_size = catalog.mis_size();
    let e_mis_mean = if catalog.mis_count() > 0 {
        bands[mis_size].iter().map(|&(_, e)| e).sum::<f64>() / catalog.mis_count() as f64
    } else {
        0.0
    };

    let mut band_separated = true;
    let mut min_band_separation = f64::INFINITY;
    for k in 1..=mis_size {
        let upper_band_max = bands[k]
            .iter()
            .map(|&(_, e)| e)
            .fold(f64::NEG_INFINITY, f64::max);
        let lower_band_min = bands[k - 1].iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
        let sep = lower_band_min - upper_band_max;
        min_band_separation = min_band_separation.min(sep);
        if sep <= 0.0 {
            band_separated = false;
        }
    }

    let connected = catalog
        .extension_counts()
        .iter()
        .map(|&c| c >= 1)
        .collect();

    SpectrumRecord {
        delta0: profile.delta0,
        mis_size,
        bands,
        e_mis_mean,
        connected,
        band_separated,
        min_band_separation,
        delta_min: None,
    }
}

/// Sweep-scan settings for [`minimal_gap`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    /// Uniform time-grid intervals over [0, t_f].
    pub grid_points: usize,
    /// Gap-value tolerance of the golden-section refinement, in units of
    /// the schedule's peak Rabi frequency.
    pub tol: f64,
    /// Number of eigenstates in the target ground manifold: the gap is
    /// measured to eigenvalue index `manifold_dim`. Use the MIS degeneracy.
    pub manifold_dim: usize,
}

impl GapConfig {
    pub fn new(manifold_dim: usize) -> Self {
        Self {
            grid_points: 200,
            tol: 1e-6,
            manifold_dim: manifold_dim.max(1),
        }
    }
}

/// Minimal instantaneous gaps along the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    /// Min over t of lambda_{manifold_dim}(t) - lambda_0(t).
    pub delta_min: f64,
    pub t_at_min: f64,
    /// Min over t of lambda_1(t) - lambda_0(t); 0 below the degeneracy threshold.
    pub first_excited_min: f64,
    /// True when the bare ground gap closed below [`DEGENERACY_TOL`] somewhere.
    pub degenerate: bool,
}

/// Scans the two lowest bands on a uniform grid and refines the minima with
/// golden-section search. Dense diagonalization; limited to small systems.
pub fn minimal_gap(
    model: &HamiltonianModel,
    schedule: &PulseSchedule,
    config: &GapConfig,
) -> Result<GapResult> {
    let tables = BasisTables::new(model, &schedule.profile.factors, DENSE_CAP)?;
    let dim = tables.dim();
    if config.manifold_dim >= dim {
        return Err(Error::Config(format!(
            "ground manifold of {} states fills the {dim}-dimensional space",
            config.manifold_dim
        )));
    }
    if config.grid_points < 2 {
        return Err(Error::Config("gap grid needs at least 2 intervals".into()));
    }

    let gaps_at = |t: f64| -> (f64, f64) {
        let eigenvalues = sorted_eigenvalues(&tables, schedule, t);
        (
            eigenvalues[config.manifold_dim] - eigenvalues[0],
            eigenvalues[1] - eigenvalues[0],
        )
    };

    let t_f = schedule.t_f;
    let points = config.grid_points;
    let mut manifold_min = (f64::INFINITY, 0usize);
    let mut bare_min = (f64::INFINITY, 0usize);
    for i in 0..=points {
        let t = t_f * i as f64 / points as f64;
        let (manifold_gap, bare_gap) = gaps_at(t);
        if manifold_gap < manifold_min.0 {
            manifold_min = (manifold_gap, i);
        }
        if bare_gap < bare_min.0 {
            bare_min = (bare_gap, i);
        }
    }

    let tol = config.tol * schedule.omega_max.abs().max(1e-300);
    let refine = |center: usize, which: usize| -> (f64, f64) {
        let lo = t_f * center.saturating_sub(1) as f64 / points as f64;
        let hi = t_f * (center + 1).min(points) as f64 / points as f64;
        golden_section(lo, hi, tol, |t| {
            let g = gaps_at(t);
            if which == 0 {
                g.0
            } else {
                g.1
            }
        })
    };

    let (delta_min, t_at_min) = refine(manifold_min.1, 0);
    let (bare_refined, _) = refine(bare_min.1, 1);
    let degenerate = bare_refined < DEGENERACY_TOL;
    Ok(GapResult {
        delta_min,
        t_at_min,
        first_excited_min: if degenerate { 0.0 } else { bare_refined },
        degenerate,
    })
}

/// Sorted instantaneous eigenvalues of H(t). Dense; small systems only.
pub fn instantaneous_eigenvalues(
    model: &HamiltonianModel,
    schedule: &PulseSchedule,
    t: f64,
) -> Result<Vec<f64>> {
    let tables = BasisTables::new(model, &schedule.profile.factors, DENSE_CAP)?;
    Ok(sorted_eigenvalues(&tables, schedule, t))
}

fn sorted_eigenvalues(tables: &BasisTables, schedule: &PulseSchedule, t: f64) -> Vec<f64> {
    let h = tables.dense(schedule.omega(t), schedule.delta_scale(t));
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Golden-section minimization of `f` on [a, b]; returns (min value, argmin).
fn golden_section(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if (fc - fd).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (fc, c)
    } else {
        (fd, d)
    }
}
