//! Exact combinatorial layer: independent-set enumeration, maximum independent
//! set solving, and the connected/disconnected classification of sets one
//! vertex short of optimal.
//!
//! Sets are stored as bitmasks over vertices (bit `i` = vertex `i` in the set),
//! so independence and subset tests are single mask operations. Full
//! enumeration is capped; larger graphs go through [`solve_mis`], which only
//! produces a single witness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{Error, Result};

/// Default vertex cap for exhaustive enumeration (2^N scan).
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Every independent set of a graph, grouped by size, with the extension
/// bookkeeping for the `|MIS|-1` stratum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsCatalog {
    n: usize,
    /// `by_size[k]` lists all independent sets with `k` vertices, ascending by mask.
    by_size: Vec<Vec<u64>>,
    mis_size: usize,
    /// For each set in `by_size[mis_size - 1]` (same order): the number of
    /// distinct maximum independent sets containing it.
    extension_counts: Vec<u32>,
}

impl IsCatalog {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of a maximum independent set.
    pub fn mis_size(&self) -> usize {
        self.mis_size
    }

    /// Degeneracy of the MIS manifold.
    pub fn mis_count(&self) -> usize {
        self.by_size[self.mis_size].len()
    }

    /// All maximum independent sets, as bitmasks.
    pub fn mis_sets(&self) -> &[u64] {
        &self.by_size[self.mis_size]
    }

    /// Independent sets of size `k`.
    pub fn sets_of_size(&self, k: usize) -> &[u64] {
        self.by_size.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of strata (largest set size + 1, counting the empty set).
    pub fn strata(&self) -> usize {
        self.by_size.len()
    }

    /// Total number of independent sets of size `k` (the degeneracy D_k).
    pub fn degeneracy(&self, k: usize) -> usize {
        self.sets_of_size(k).len()
    }

    /// The `|MIS|-1` stratum, aligned with [`IsCatalog::extension_counts`].
    pub fn near_mis_sets(&self) -> &[u64] {
        if self.mis_size == 0 {
            return &[];
        }
        &self.by_size[self.mis_size - 1]
    }

    /// Extension counts c_j for the `|MIS|-1` stratum: c_j >= 1 marks a
    /// connected set (a subset of c_j distinct MISs), c_j = 0 a disconnected one.
    pub fn extension_counts(&self) -> &[u32] {
        &self.extension_counts
    }

    pub fn sum_extension_counts(&self) -> u64 {
        self.extension_counts.iter().map(|&c| c as u64).sum()
    }

    /// Mask of vertices belonging to at least one MIS.
    pub fn any_mis_membership(&self) -> u64 {
        self.mis_sets().iter().fold(0, |acc, &s| acc | s)
    }

    /// The canonical MIS: smallest bitmask among the maximum sets.
    pub fn canonical_mis(&self) -> u64 {
        self.mis_sets().first().copied().unwrap_or(0)
    }

    /// Flat export view (strata sizes, MIS list, extension-count table).
    pub fn export(&self) -> CatalogExport {
        CatalogExport {
            n: self.n,
            mis_size: self.mis_size,
            mis_count: self.mis_count(),
            strata: self
                .by_size
                .iter()
                .enumerate()
                .map(|(k, sets)| (k, sets.len()))
                .collect(),
            mis_sets: self.mis_sets().to_vec(),
            near_mis: self
                .near_mis_sets()
                .iter()
                .zip(&self.extension_counts)
                .map(|(&mask, &c)| NearMisEntry { mask, c })
                .collect(),
        }
    }
}

/// JSON-friendly catalog summary consumed by the metrics layer and tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatalogExport {
    pub n: usize,
    pub mis_size: usize,
    pub mis_count: usize,
    /// (set size, number of independent sets of that size)
    pub strata: Vec<(usize, usize)>,
    pub mis_sets: Vec<u64>,
    pub near_mis: Vec<NearMisEntry>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NearMisEntry {
    pub mask: u64,
    pub c: u32,
}

/// Enumerates every independent set of `g`, including the empty set.
///
/// Runs a subset DP over all 2^N masks, so `g.n()` must not exceed `max_n`.
/// Extension counts are computed for the `|MIS|-1` stratum by testing each
/// non-member vertex for admissibility.
pub fn enumerate_independent_sets(g: &Graph, max_n: usize) -> Result<IsCatalog> {
    let n = g.n();
    if n > max_n {
        return Err(Error::EnumerationCap { n, cap: max_n });
    }
    let adj = g.adjacency_masks()?;

    let total: usize = 1 << n;
    let mut independent = vec![false; total];
    let mut by_size: Vec<Vec<u64>> = vec![Vec::new(); n + 1];
    independent[0] = true;
    by_size[0].push(0);
    for mask in 1..total {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        if independent[rest] && adj[v] & (rest as u64) == 0 {
            independent[mask] = true;
            by_size[mask.count_ones() as usize].push(mask as u64);
        }
    }
    while by_size.last().is_some_and(Vec::is_empty) {
        by_size.pop();
    }
    let mis_size = by_size.len() - 1;

    let extension_counts = if mis_size == 0 {
        Vec::new()
    } else {
        by_size[mis_size - 1]
            .iter()
            .map(|&set| {
                (0..n)
                    .filter(|&v| set & (1 << v) == 0 && adj[v] & set == 0)
                    .count() as u32
            })
            .collect()
    };

    Ok(IsCatalog {
        n,
        by_size,
        mis_size,
        extension_counts,
    })
}

/// Solves MIS by branch and bound with minimum-degree pivoting.
///
/// Returns the optimum size and one witness mask. Some maximal set in any
/// candidate subgraph contains a vertex of the pivot's closed neighborhood, so
/// branching over that neighborhood (smallest first) is exhaustive; a greedy
/// minimum-degree solution seeds the incumbent.
pub fn solve_mis(g: &Graph) -> Result<(usize, u64)> {
    let n = g.n();
    if n == 0 {
        return Ok((0, 0));
    }
    let adj = g.adjacency_masks()?;
    let full: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };

    let greedy = greedy_min_degree(&adj, full);
    let mut best = (greedy.count_ones() as usize, greedy);
    branch(&adj, full, 0, 0, &mut best);
    debug_assert!(is_independent(&adj, best.1));
    Ok(best)
}

fn greedy_min_degree(adj: &[u64], mut candidates: u64) -> u64 {
    let mut chosen = 0u64;
    while candidates != 0 {
        let v = min_degree_vertex(adj, candidates);
        chosen |= 1 << v;
        candidates &= !(adj[v] | (1 << v));
    }
    chosen
}

fn min_degree_vertex(adj: &[u64], candidates: u64) -> usize {
    let mut best_v = candidates.trailing_zeros() as usize;
    let mut best_deg = u32::MAX;
    let mut rest = candidates;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (adj[v] & candidates).count_ones();
        if deg < best_deg {
            best_deg = deg;
            best_v = v;
            if deg == 0 {
                break;
            }
        }
    }
    best_v
}

fn branch(adj: &[u64], candidates: u64, chosen: u64, size: usize, best: &mut (usize, u64)) {
    if candidates == 0 {
        if size > best.0 {
            *best = (size, chosen);
        }
        return;
    }
    if size + candidates.count_ones() as usize <= best.0 {
        return;
    }
    let pivot = min_degree_vertex(adj, candidates);
    // Every maximal set in the candidate subgraph meets N[pivot]; branch on
    // each member, excluding the ones already tried.
    let mut branch_set = (adj[pivot] | (1 << pivot)) & candidates;
    let mut tried = 0u64;
    while branch_set != 0 {
        let u = branch_set.trailing_zeros() as usize;
        branch_set &= branch_set - 1;
        let next = candidates & !(adj[u] | (1 << u)) & !tried;
        branch(adj, next, chosen | (1 << u), size + 1, best);
        tried |= 1 << u;
    }
}

fn is_independent(adj: &[u64], set: u64) -> bool {
    let mut rest = set;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if adj[v] & set != 0 {
            return false;
        }
    }
    true
}

/// Which vertices count as "belonging to the MIS" in membership statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MembershipRule {
    /// A vertex belongs if any maximum independent set contains it (default).
    AnyMis,
    /// A vertex belongs only if the canonical (smallest-mask) MIS contains it.
    CanonicalMis,
}

/// Per-degree MIS membership statistics over a graph ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeMembership {
    /// Fraction of (graph, vertex) pairs of this degree that belong to the MIS.
    pub empirical: f64,
    /// Mean of (1 - |MIS|/N)^d over the same (graph, vertex) pairs.
    pub analytic: f64,
    /// Number of (graph, vertex) pairs observed at this degree.
    pub samples: usize,
}

/// Empirical vs analytic P(vertex in MIS) keyed by vertex degree.
///
/// Weighting is per (graph, vertex) pair for both columns.
pub fn membership_probability_by_degree(
    ensemble: &[Graph],
    max_n: usize,
    rule: MembershipRule,
) -> Result<BTreeMap<usize, DegreeMembership>> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut hits: BTreeMap<usize, (usize, f64, usize)> = BTreeMap::new();
    for g in ensemble {
        let catalog = enumerate_independent_sets(g, max_n)?;
        let members = match rule {
            MembershipRule::AnyMis => catalog.any_mis_membership(),
            MembershipRule::CanonicalMis => catalog.canonical_mis(),
        };
        let estimate_base = 1.0 - catalog.mis_size() as f64 / g.n() as f64;
        for v in 0..g.n() {
            let d = g.degree(v);
            let entry = hits.entry(d).or_insert((0, 0.0, 0));
            if members & (1 << v) != 0 {
                entry.0 += 1;
            }
            entry.1 += estimate_base.powi(d as i32);
            entry.2 += 1;
        }
    }
    Ok(hits
        .into_iter()
        .map(|(d, (in_mis, analytic_sum, samples))| {
            (
                d,
                DegreeMembership {
                    empirical: in_mis as f64 / samples as f64,
                    analytic: analytic_sum / samples as f64,
                    samples,
                },
            )
        })
        .collect())
}
