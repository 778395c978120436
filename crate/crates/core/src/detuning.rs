//! Degree-dependent detuning engineering.
//!
//! Vertices are sorted by ascending degree, which sorts the per-vertex
//! detuning factors f_i(a) in descending order. The band difference function
//!
//! ```text
//! D_k(a) = sum of the k smallest factors - sum of the (k-1) largest factors
//! ```
//!
//! lower-bounds the energy gap between the k- and (k-1)-excitation bands of
//! the final-time Hamiltonian. The engineering pass finds the critical index
//! `k*` where `D_k` attains its global minimum (a pure degree-table lookup),
//! then the amplitude `a*` where that minimum vanishes, and backs off by a
//! safety multiplier so every band stays strictly gapped.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graph::{degree_order, DegreeOrder, Graph};
use crate::{Error, Result};

/// |D_k(a*)| tolerance for the root search.
pub const ROOT_TOL: f64 = 1e-10;
const ROOT_MAX_ITERS: usize = 200;
const BRACKET_GRID: usize = 256;

/// Default safety multiplier applied to a*.
pub const DEFAULT_ETA: f64 = 0.99;

/// A detuning scaling family f(d, a), normalized so f(0, a) = 1 and
/// nonincreasing in the degree d over the admissible a-range.
#[derive(Clone)]
pub enum ProfileFamily {
    /// f = 1 - a*d, admissible a in [0, 1/d_max].
    Linear,
    /// f = exp(-d*a), admissible a in [0, 1].
    Exponential,
    /// f = (1 + d)^(-a), admissible a in [0, 1].
    PowerLaw,
    /// User-supplied scaling function.
    Custom(CustomProfile),
}

/// A custom scaling function with its admissible amplitude range.
#[derive(Clone)]
pub struct CustomProfile {
    pub name: String,
    pub a_max: f64,
    pub eval: Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>,
}

impl ProfileFamily {
    /// Evaluates the detuning factor for a vertex of degree `d` at amplitude `a`.
    pub fn factor(&self, d: usize, a: f64) -> f64 {
        match self {
            ProfileFamily::Linear => 1.0 - a * d as f64,
            ProfileFamily::Exponential => (-(d as f64) * a).exp(),
            ProfileFamily::PowerLaw => (1.0 + d as f64).powf(-a),
            ProfileFamily::Custom(c) => (c.eval)(d, a),
        }
    }

    /// Largest admissible amplitude for a graph of maximum degree `d_max`.
    pub fn a_max(&self, d_max: usize) -> f64 {
        match self {
            ProfileFamily::Linear => {
                if d_max == 0 {
                    1.0
                } else {
                    1.0 / d_max as f64
                }
            }
            ProfileFamily::Exponential | ProfileFamily::PowerLaw => 1.0,
            ProfileFamily::Custom(c) => c.a_max,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            ProfileFamily::Linear => "linear",
            ProfileFamily::Exponential => "exponential",
            ProfileFamily::PowerLaw => "power_law",
            ProfileFamily::Custom(c) => &c.name,
        }
    }
}

impl fmt::Debug for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProfileFamily({})", self.name())
    }
}

/// Detuning factors evaluated on the sorted degree sequence (descending f).
pub fn sorted_factors(order: &DegreeOrder, family: &ProfileFamily, a: f64) -> Vec<f64> {
    order
        .sorted_degrees
        .iter()
        .map(|&d| family.factor(d, a))
        .collect()
}

/// The band difference function D_k(a), for k in 1..=N.
pub fn difference_function(
    order: &DegreeOrder,
    family: &ProfileFamily,
    a: f64,
    k: usize,
) -> Result<f64> {
    let n = order.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let f = sorted_factors(order, family, a);
    Ok(difference_from_factors(&f, k))
}

fn difference_from_factors(f: &[f64], k: usize) -> f64 {
    let n = f.len();
    let smallest: f64 = f[n - k..].iter().sum();
    let largest: f64 = f[..k - 1].iter().sum();
    smallest - largest
}

/// The discrete gradient of D_k: epsilon_k(a) = f_{N-k-1} - f_{k-1},
/// equal to D_{k+1}(a) - D_k(a). Valid for k in 1..=N-1.
pub fn epsilon(order: &DegreeOrder, family: &ProfileFamily, a: f64, k: usize) -> Result<f64> {
    let n = order.n();
    if k == 0 || k + 1 > n {
        return Err(Error::KOutOfRange {
            k,
            max: n.saturating_sub(1),
        });
    }
    let f_lo = family.factor(order.sorted_degrees[n - k - 1], a);
    let f_hi = family.factor(order.sorted_degrees[k - 1], a);
    Ok(f_lo - f_hi)
}

/// Minimal k with d_{k-1} >= d_{N-k-1} on the sorted degree sequence.
///
/// At this index the discrete gradient of D_k turns nonnegative, so D_k has
/// its global minimum at k* for every admissible amplitude. Always at most
/// floor(N/2) + 1; returns 1 for single-vertex graphs.
pub fn find_k_star(order: &DegreeOrder) -> usize {
    let n = order.n();
    if n < 2 {
        return 1;
    }
    let d = &order.sorted_degrees;
    for k in 1..n {
        if d[k - 1] >= d[n - k - 1] {
            debug_assert!(k <= n / 2 + 1);
            return k;
        }
    }
    // Unreachable: the condition holds at k = floor(N/2) + 1 by monotonicity.
    n / 2 + 1
}

/// Result of the critical-amplitude search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AStarSolution {
    pub a_star: f64,
    /// True when D_{k*} stays positive on the whole admissible range, so the
    /// amplitude is capped by factor positivity rather than a band crossing.
    pub unconstrained: bool,
}

/// Finds a* with D_{k*}(a*) = 0 by a bracketing grid scan plus
/// bisection/secant refinement.
///
/// If D_{k*} never reaches zero on [0, a_max], returns a_max flagged
/// unconstrained. The first sign change is bracketed so the returned root is
/// the smallest one, keeping D_{k*} positive on [0, a*).
pub fn solve_a_star(order: &DegreeOrder, family: &ProfileFamily) -> Result<AStarSolution> {
    let k_star = find_k_star(order);
    let a_max = family.a_max(order.sorted_degrees.last().copied().unwrap_or(0));
    let d_at = |a: f64| -> f64 {
        let f = sorted_factors(order, family, a);
        difference_from_factors(&f, k_star)
    };

    let d0 = d_at(0.0);
    if d0 <= 0.0 {
        return Err(Error::InvalidProfile(d0));
    }

    let mut lo = 0.0;
    let mut d_lo = d0;
    let mut bracket = None;
    for i in 1..=BRACKET_GRID {
        let a = a_max * i as f64 / BRACKET_GRID as f64;
        let d = d_at(a);
        if d <= 0.0 {
            bracket = Some((lo, d_lo, a, d));
            break;
        }
        lo = a;
        d_lo = d;
    }
    let Some((mut lo, mut d_lo, mut hi, mut d_hi)) = bracket else {
        let d_end = d_at(a_max);
        if d_end.abs() <= ROOT_TOL {
            return Ok(AStarSolution {
                a_star: a_max,
                unconstrained: false,
            });
        }
        return Ok(AStarSolution {
            a_star: a_max,
            unconstrained: true,
        });
    };

    for _ in 0..ROOT_MAX_ITERS {
        if d_hi.abs() <= ROOT_TOL {
            return Ok(AStarSolution {
                a_star: hi,
                unconstrained: false,
            });
        }
        // Secant guess, falling back to the midpoint when it leaves the bracket.
        let mut mid = hi - d_hi * (hi - lo) / (d_hi - d_lo);
        if !mid.is_finite() || mid <= lo || mid >= hi {
            mid = 0.5 * (lo + hi);
        }
        let d_mid = d_at(mid);
        if d_mid.abs() <= ROOT_TOL {
            return Ok(AStarSolution {
                a_star: mid,
                unconstrained: false,
            });
        }
        if d_mid > 0.0 {
            lo = mid;
            d_lo = d_mid;
        } else {
            hi = mid;
            d_hi = d_mid;
        }
    }
    Ok(AStarSolution {
        a_star: 0.5 * (lo + hi),
        unconstrained: false,
    })
}

/// An engineered per-vertex detuning profile.
///
/// `factors[v]` scales the detuning ramp of vertex `v`; the amplitude actually
/// applied is `a_used = eta * a_star`, strictly inside the band-ordered region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningProfile {
    /// Name of the scaling family ("linear", "exponential", ...).
    pub family: String,
    pub a_star: f64,
    pub k_star: usize,
    /// Safety multiplier eta in (0, 1].
    pub eta: f64,
    pub a_used: f64,
    /// True when a* was capped by the admissible range instead of a root.
    pub unconstrained: bool,
    /// Per-vertex detuning factors, indexed by vertex id.
    pub factors: Vec<f64>,
    /// Detuning sweep scale (rad/time), carried for the pulse schedule.
    pub delta0: f64,
}

impl DetuningProfile {
    /// Homogeneous profile (all factors 1): the traditional global drive.
    pub fn homogeneous(n: usize, delta0: f64) -> Self {
        Self {
            family: "homogeneous".into(),
            a_star: 0.0,
            k_star: 1,
            eta: 1.0,
            a_used: 0.0,
            unconstrained: false,
            factors: vec![1.0; n],
            delta0,
        }
    }

    pub fn f_max(&self) -> f64 {
        self.factors
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    /// Whether all factors equal one (traditional drive).
    pub fn is_homogeneous(&self) -> bool {
        self.factors.iter().all(|&f| f == 1.0)
    }
}

/// Runs the full engineering pass: degree sort, k*, a*, safety backoff, and
/// an exhaustive verification that every band difference stays positive.
pub fn engineer_detunings(
    g: &Graph,
    family: &ProfileFamily,
    delta0: f64,
    eta: f64,
) -> Result<DetuningProfile> {
    if g.n() == 0 {
        return Err(Error::Config("cannot engineer an empty graph".into()));
    }
    if !(0.0 < eta && eta <= 1.0) {
        return Err(Error::Config(format!("eta {eta} outside (0, 1]")));
    }
    let order = degree_order(g);
    let k_star = find_k_star(&order);
    let solution = solve_a_star(&order, family)?;
    let a_used = eta * solution.a_star;

    let factors: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| family.factor(d, a_used))
        .collect();
    verify_profile(&order, family, a_used, &factors)?;

    Ok(DetuningProfile {
        family: family.name().into(),
        a_star: solution.a_star,
        k_star,
        eta,
        a_used,
        unconstrained: solution.unconstrained,
        factors,
        delta0,
    })
}

fn verify_profile(
    order: &DegreeOrder,
    family: &ProfileFamily,
    a_used: f64,
    factors: &[f64],
) -> Result<()> {
    for (v, &f) in factors.iter().enumerate() {
        if !(f > 0.0) {
            return Err(Error::ProfileVerification(format!(
                "factor {f} of vertex {v} is not positive at a = {a_used}"
            )));
        }
    }
    if (family.factor(0, a_used) - 1.0).abs() > 1e-12 {
        return Err(Error::ProfileVerification(format!(
            "family {} is not normalized: f(0, {a_used}) != 1",
            family.name()
        )));
    }
    let sorted = sorted_factors(order, family, a_used);
    for w in sorted.windows(2) {
        if w[1] > w[0] + 1e-12 {
            return Err(Error::ProfileVerification(format!(
                "factors not descending on the degree sort: {} < {}",
                w[0], w[1]
            )));
        }
    }
    for k in 1..=order.n() {
        let d_k = difference_from_factors(&sorted, k);
        if !(d_k > 0.0) {
            return Err(Error::ProfileVerification(format!(
                "energy condition violated: D_{k}({a_used}) = {d_k}"
            )));
        }
    }
    Ok(())
}

/// Conservative blockade check: the smallest edge interaction must exceed half
/// the detuning sweep times the largest factor, so no neighboring pair is ever
/// worth exciting.
pub fn check_blockade(profile: &DetuningProfile, u_min: f64) -> bool {
    u_min > 0.5 * profile.delta0 * profile.f_max()
}

/// Upper bound D_k(a) <= f_{N-k}(a) and whether it holds (it must, for a
/// nonincreasing positive family; exposed as a self-check).
pub fn root_existence_bound(
    order: &DegreeOrder,
    family: &ProfileFamily,
    a: f64,
    k: usize,
) -> Result<(f64, bool)> {
    let n = order.n();
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let f = sorted_factors(order, family, a);
    let bound = f[n - k];
    let d_k = difference_from_factors(&f, k);
    Ok((bound, d_k <= bound + 1e-12))
}
