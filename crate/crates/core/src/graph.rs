//! Geometric graph instances with the degree bookkeeping needed by the
//! detuning engineering pass.
//!
//! Instances are either disordered King's graphs (a rectangular lattice with
//! randomly removed sites, edges between sites at distance 1 or √2) or generic
//! edge lists with optional 2-D positions. Lattice units: nearest-neighbor
//! spacing 1, diagonal √2, so interaction energies downstream are C6/r^6 in
//! dimensionless units.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Adjacency threshold for King's-graph edges: distance 1 or √2 in lattice units.
pub const KING_RADIUS: f64 = std::f64::consts::SQRT_2 + 1e-9;

/// An immutable undirected graph with per-vertex degrees and optional 2-D positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    /// Canonical edge list: u < v, sorted, deduplicated.
    edges: Vec<(usize, usize)>,
    positions: Option<Vec<(f64, f64)>>,
    degrees: Vec<usize>,
}

impl Graph {
    /// Builds a graph from an edge list, deduplicating edges and computing degrees.
    pub fn from_edge_list(
        n: usize,
        edges: &[(usize, usize)],
        positions: Option<Vec<(f64, f64)>>,
    ) -> Result<Self> {
        if let Some(pos) = &positions {
            if pos.len() != n {
                return Err(Error::Parse(format!(
                    "{} positions for {} vertices",
                    pos.len(),
                    n
                )));
            }
        }
        let mut canonical: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for endpoint in [u, v] {
                if endpoint >= n {
                    return Err(Error::EndpointOutOfRange { endpoint, n });
                }
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        canonical.dedup();

        let mut degrees = vec![0usize; n];
        for &(u, v) in &canonical {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        Ok(Self {
            n,
            edges: canonical,
            positions,
            degrees,
        })
    }

    /// Generates a disordered King's graph on a `rows x cols` lattice.
    ///
    /// Each site is removed independently with probability `hole_probability`
    /// using a ChaCha8 stream seeded by `seed`, so identical arguments yield a
    /// bit-identical graph. Surviving sites are numbered in row-major order.
    pub fn kings(rows: usize, cols: usize, hole_probability: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&hole_probability) || hole_probability.is_nan() {
            return Err(Error::HoleProbability(hole_probability));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Config("grid dimensions must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut positions = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let hole = rng.gen::<f64>() < hole_probability;
                if !hole {
                    positions.push((c as f64, r as f64));
                }
            }
        }
        if positions.is_empty() {
            return Err(Error::EmptyInstance(rows * cols));
        }
        let edges = unit_disk_edges(&positions, KING_RADIUS);
        Self::from_edge_list(positions.len(), &edges, Some(positions))
    }

    /// Generates a unit-disk graph over explicit positions: an edge wherever the
    /// Euclidean distance is at most `radius`.
    pub fn unit_disk(positions: Vec<(f64, f64)>, radius: f64) -> Result<Self> {
        let edges = unit_disk_edges(&positions, radius);
        Self::from_edge_list(positions.len(), &edges, Some(positions))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }

    /// Per-vertex neighbor bitmasks; requires at most 64 vertices.
    pub fn adjacency_masks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::TooManyVertices(self.n));
        }
        let mut masks = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            masks[u] |= 1 << v;
            masks[v] |= 1 << u;
        }
        Ok(masks)
    }

    /// Euclidean distance between two vertices; requires positions.
    pub fn distance(&self, u: usize, v: usize) -> Result<f64> {
        let pos = self.positions.as_ref().ok_or(Error::MissingPositions)?;
        let (xu, yu) = pos[u];
        let (xv, yv) = pos[v];
        Ok(((xu - xv).powi(2) + (yu - yv).powi(2)).sqrt())
    }

    /// Serializes to the plain-text format: `N M`, then `u v` per edge, then
    /// optional `x y` per vertex.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.edges.len());
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        if let Some(pos) = &self.positions {
            for &(x, y) in pos {
                let _ = writeln!(out, "{x} {y}");
            }
        }
        out
    }

    /// Parses the plain-text format produced by [`Graph::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = parse_token(it.next(), "vertex count")?;
        let m: usize = parse_token(it.next(), "edge count")?;
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing edge line".into()))?;
            let mut it = line.split_whitespace();
            let u: usize = parse_token(it.next(), "edge endpoint")?;
            let v: usize = parse_token(it.next(), "edge endpoint")?;
            edges.push((u, v));
        }
        let rest: Vec<&str> = lines.collect();
        let positions = if rest.is_empty() {
            None
        } else if rest.len() == n {
            let mut pos = Vec::with_capacity(n);
            for line in rest {
                let mut it = line.split_whitespace();
                let x: f64 = parse_token(it.next(), "x coordinate")?;
                let y: f64 = parse_token(it.next(), "y coordinate")?;
                pos.push((x, y));
            }
            Some(pos)
        } else {
            return Err(Error::Parse(format!(
                "expected {} position lines, found {}",
                n,
                rest.len()
            )));
        };
        Self::from_edge_list(n, &edges, positions)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_token<T: std::str::FromStr>(tok: Option<&str>, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::Parse(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("invalid {what}")))
}

fn unit_disk_edges(positions: &[(f64, f64)], radius: f64) -> Vec<(usize, usize)> {
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let dx = positions[i].0 - positions[j].0;
            let dy = positions[i].1 - positions[j].1;
            if dx * dx + dy * dy <= r2 {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Vertices sorted by ascending degree, ties broken by ascending vertex id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeOrder {
    /// `permutation[rank]` is the vertex id at that sorted position.
    pub permutation: Vec<usize>,
    /// Nondecreasing degree sequence, aligned with `permutation`.
    pub sorted_degrees: Vec<usize>,
}

impl DegreeOrder {
    pub fn n(&self) -> usize {
        self.permutation.len()
    }
}

/// Sorts vertices in ascending degree order (deterministic: ties by vertex id).
pub fn degree_order(g: &Graph) -> DegreeOrder {
    let mut permutation: Vec<usize> = (0..g.n()).collect();
    permutation.sort_by_key(|&v| (g.degree(v), v));
    let sorted_degrees = permutation.iter().map(|&v| g.degree(v)).collect();
    DegreeOrder {
        permutation,
        sorted_degrees,
    }
}

/// Helper constructors shared across the test suites.
pub mod fixtures {
    use super::Graph;

    /// Path graph 0-1-...-(n-1) with vertices on a line (unit spacing).
    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        let positions = (0..n).map(|i| (i as f64, 0.0)).collect();
        Graph::from_edge_list(n, &edges, Some(positions)).expect("valid path")
    }

    /// Star with `leaves` leaves: center 0, leaves on a unit circle.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|leaf| (0, leaf)).collect();
        let mut positions = vec![(0.0, 0.0)];
        for leaf in 0..leaves {
            let theta = 2.0 * std::f64::consts::PI * leaf as f64 / leaves.max(1) as f64;
            positions.push((theta.cos(), theta.sin()));
        }
        Graph::from_edge_list(leaves + 1, &edges, Some(positions)).expect("valid star")
    }

    /// Complete graph on `n` vertices (no positions).
    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::from_edge_list(n, &edges, None).expect("valid clique")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Closed-form King's-graph edge count for a full r x c grid.
    fn full_king_edges(r: usize, c: usize) -> usize {
        r * (c - 1) + c * (r - 1) + 2 * (r - 1) * (c - 1)
    }

    #[test]
    fn axial_pair() {
        let g = Graph::kings(1, 2, 0.0, 7).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.m(), 1);
        assert_eq!(g.degrees(), &[1, 1]);
    }

    #[test]
    fn two_by_two_is_complete() {
        let g = Graph::kings(2, 2, 0.0, 0).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 6);
    }

    #[test]
    fn full_grid_matches_closed_form() {
        for (r, c) in [(1, 5), (3, 3), (4, 6), (5, 2)] {
            let g = Graph::kings(r, c, 0.0, 1).unwrap();
            assert_eq!(g.n(), r * c);
            assert_eq!(g.m(), full_king_edges(r, c), "grid {r}x{c}");
        }
    }

    #[test]
    fn golden_disordered_instance() {
        // Frozen regression values from the seeded generator.
        let g = Graph::kings(3, 3, 0.3, 42).unwrap();
        assert_eq!(g.n(), 7);
        assert_eq!(g.m(), 8);
        assert_eq!(g.degrees(), &[2, 3, 1, 4, 2, 3, 1]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Graph::kings(5, 5, 0.4, 123).unwrap();
        let b = Graph::kings(5, 5, 0.4, 123).unwrap();
        assert_eq!(a, b);
        let c = Graph::kings(5, 5, 0.4, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        for seed in 0..20 {
            let g = Graph::kings(4, 4, 0.35, seed).unwrap();
            let sum: usize = g.degrees().iter().sum();
            assert_eq!(sum, 2 * g.m());
        }
    }

    #[test]
    fn rejects_bad_hole_probability() {
        assert!(matches!(
            Graph::kings(2, 2, 1.5, 0),
            Err(Error::HoleProbability(_))
        ));
        assert!(matches!(
            Graph::kings(2, 2, -0.1, 0),
            Err(Error::HoleProbability(_))
        ));
    }

    #[test]
    fn all_holes_is_an_error() {
        assert!(matches!(
            Graph::kings(3, 3, 1.0, 5),
            Err(Error::EmptyInstance(9))
        ));
    }

    #[test]
    fn edge_list_paths_and_star() {
        let p3 = Graph::from_edge_list(3, &[(0, 1), (1, 2)], None).unwrap();
        assert_eq!(p3.degrees(), &[1, 2, 1]);
        let p4 = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3)], None).unwrap();
        assert_eq!(p4.degrees(), &[1, 2, 2, 1]);
        let s3 = Graph::from_edge_list(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap();
        assert_eq!(s3.degrees(), &[3, 1, 1, 1]);
    }

    #[test]
    fn edge_list_dedupes() {
        let g = Graph::from_edge_list(3, &[(0, 1), (1, 0), (1, 2)], None).unwrap();
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn edge_list_rejects_self_loop_and_range() {
        assert!(matches!(
            Graph::from_edge_list(3, &[(1, 1)], None),
            Err(Error::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::from_edge_list(3, &[(0, 3)], None),
            Err(Error::EndpointOutOfRange { endpoint: 3, n: 3 })
        ));
    }

    #[test]
    fn degree_order_examples() {
        let p4 = fixtures::path(4);
        let order = degree_order(&p4);
        assert_eq!(order.sorted_degrees, vec![1, 1, 2, 2]);
        assert_eq!(order.permutation, vec![0, 3, 1, 2]);

        let s3 = fixtures::star(3);
        assert_eq!(degree_order(&s3).sorted_degrees, vec![1, 1, 1, 3]);

        let mixed = Graph::from_edge_list(3, &[(1, 2)], None).unwrap();
        assert_eq!(degree_order(&mixed).sorted_degrees, vec![0, 1, 1]);
    }

    #[test]
    fn text_roundtrip() {
        let g = Graph::kings(3, 4, 0.25, 9).unwrap();
        let parsed = Graph::from_text(&g.to_text()).unwrap();
        assert_eq!(g, parsed);

        let bare = fixtures::complete(3);
        let parsed = Graph::from_text(&bare.to_text()).unwrap();
        assert_eq!(bare, parsed);
    }

    #[test]
    fn king_edges_respect_radius() {
        let g = Graph::kings(4, 4, 0.2, 11).unwrap();
        for &(u, v) in g.edges() {
            assert!(g.distance(u, v).unwrap() <= KING_RADIUS);
        }
        for u in 0..g.n() {
            for v in (u + 1)..g.n() {
                if g.distance(u, v).unwrap() <= KING_RADIUS {
                    assert!(g.edges().contains(&(u, v)));
                }
            }
        }
    }
}
