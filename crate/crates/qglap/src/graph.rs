//! Marked metric graphs: edges with lengths, a vertex partition, and a
//! coupling condition (delta or delta-prime, finite or infinite constant)
//! at every vertex.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Type of the matching condition at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexType {
    Delta,
    DeltaPrime,
}

/// Coupling constant at a vertex: a finite real, or the decoupling
/// condition `Gamma_0 f = 0` marked as `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    Finite(f64),
    Infinite,
}

impl Coupling {
    pub fn finite(self) -> Option<f64> {
        match self {
            Coupling::Finite(a) => Some(a),
            Coupling::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Coupling::Infinite)
    }
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coupling::Finite(a) => s.serialize_f64(*a),
            Coupling::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) if a.is_finite() => Ok(Coupling::Finite(a)),
            Raw::Num(a) => Err(D::Error::custom(format!("non-finite coupling {a}"))),
            Raw::Str(s) if s == "inf" => Ok(Coupling::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!(
                "coupling must be a number or \"inf\", got \"{s}\""
            ))),
        }
    }
}

/// A metric edge between two vertices. Equal endpoints make a loop.
/// The left/right orientation fixes the sign of the normal derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub id: usize,
    pub left_vertex: usize,
    pub right_vertex: usize,
    pub length: f64,
}

/// Which end of an edge an endpoint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Left,
    Right,
}

/// An endpoint of an edge, as seen from a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Endpoint {
    pub edge: usize,
    pub end: End,
}

/// Classification of the edges at a vertex (or a vertex pair) used by the
/// M-matrix entries: loops, incident edges with same/different endpoint
/// types, and connecting edges of same/different type.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IncidenceSets {
    /// Loops at the vertex.
    pub loops: Vec<usize>,
    /// Non-loop incident edges whose endpoints carry the same type.
    pub same_type: Vec<usize>,
    /// Non-loop incident edges whose endpoints carry different types.
    pub diff_type: Vec<usize>,
    /// Edges joining the vertex pair, both vertices of the same type.
    pub connecting_same: Vec<usize>,
    /// Edges joining the vertex pair, vertices of different types.
    pub connecting_diff: Vec<usize>,
}

/// A validated marked metric graph. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedGraph {
    edges: Vec<Edge>,
    vertex_types: Vec<VertexType>,
    couplings: Vec<Coupling>,
}

impl MarkedGraph {
    /// Build and validate a marked graph. The degree vector is always
    /// recomputed from the edge list, a loop counting 2.
    pub fn new(
        edges: Vec<Edge>,
        vertex_types: Vec<VertexType>,
        couplings: Vec<Coupling>,
    ) -> Result<Self> {
        let n_vertices = vertex_types.len();
        if n_vertices == 0 || edges.is_empty() {
            return Err(Error::ArityMismatch(
                "need at least one vertex and one edge".into(),
            ));
        }
        if couplings.len() != n_vertices {
            return Err(Error::ArityMismatch(format!(
                "{} vertex types but {} couplings",
                n_vertices,
                couplings.len()
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.id != i {
                return Err(Error::ArityMismatch(format!(
                    "edge at position {i} carries id {}",
                    e.id
                )));
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(Error::NonPositiveLength {
                    edge: i,
                    length: e.length,
                });
            }
            for v in [e.left_vertex, e.right_vertex] {
                if v >= n_vertices {
                    return Err(Error::IndexOutOfRange {
                        index: v,
                        limit: n_vertices,
                    });
                }
            }
        }
        let g = MarkedGraph {
            edges,
            vertex_types,
            couplings,
        };
        if g.degrees().iter().any(|&d| d == 0) || !g.is_connected() {
            return Err(Error::DisconnectedGraph);
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_types.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    pub fn vertex_type(&self, k: usize) -> VertexType {
        self.vertex_types[k]
    }

    pub fn vertex_types(&self) -> &[VertexType] {
        &self.vertex_types
    }

    pub fn coupling(&self, k: usize) -> Coupling {
        self.couplings[k]
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn all_couplings_finite(&self) -> bool {
        self.couplings.iter().all(|c| !c.is_infinite())
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Degree vector, recomputed; a loop contributes 2.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.num_vertices()];
        for e in &self.edges {
            d[e.left_vertex] += 1;
            d[e.right_vertex] += 1;
        }
        d
    }

    pub fn degree(&self, k: usize) -> usize {
        self.edges
            .iter()
            .map(|e| {
                usize::from(e.left_vertex == k) + usize::from(e.right_vertex == k)
            })
            .sum()
    }

    /// Endpoints incident to vertex `k`, ordered by edge id with the left
    /// end of a loop before its right end.
    pub fn endpoints_at(&self, k: usize) -> Vec<Endpoint> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.left_vertex == k {
                out.push(Endpoint {
                    edge: e.id,
                    end: End::Left,
                });
            }
            if e.right_vertex == k {
                out.push(Endpoint {
                    edge: e.id,
                    end: End::Right,
                });
            }
        }
        out
    }

    pub fn is_adjacent(&self, k: usize, j: usize) -> bool {
        self.edges.iter().any(|e| {
            (e.left_vertex == k && e.right_vertex == j)
                || (e.left_vertex == j && e.right_vertex == k)
        })
    }

    /// Classify the edges at vertex `k`, and between `k` and `j` when a
    /// second vertex is given. Edge ids are listed in increasing order.
    pub fn incidence_sets(&self, k: usize, j: Option<usize>) -> Result<IncidenceSets> {
        let n = self.num_vertices();
        if k >= n {
            return Err(Error::IndexOutOfRange { index: k, limit: n });
        }
        if let Some(j) = j {
            if j >= n {
                return Err(Error::IndexOutOfRange { index: j, limit: n });
            }
        }
        let mut sets = IncidenceSets::default();
        for e in &self.edges {
            let (a, b) = (e.left_vertex, e.right_vertex);
            if a == k && b == k {
                sets.loops.push(e.id);
                continue;
            }
            if a == k || b == k {
                let other = if a == k { b } else { a };
                if self.vertex_types[other] == self.vertex_types[k] {
                    sets.same_type.push(e.id);
                } else {
                    sets.diff_type.push(e.id);
                }
                if let Some(j) = j {
                    if other == j && j != k {
                        if self.vertex_types[j] == self.vertex_types[k] {
                            sets.connecting_same.push(e.id);
                        } else {
                            sets.connecting_diff.push(e.id);
                        }
                    }
                }
            }
        }
        Ok(sets)
    }

    /// Same topology, lengths and types with different coupling constants.
    pub fn with_couplings(&self, couplings: Vec<Coupling>) -> Result<Self> {
        MarkedGraph::new(self.edges.clone(), self.vertex_types.clone(), couplings)
    }

    /// The decoupled configuration: every coupling set to `Infinite`.
    pub fn with_all_infinite(&self) -> Self {
        let couplings = vec![Coupling::Infinite; self.num_vertices()];
        MarkedGraph {
            edges: self.edges.clone(),
            vertex_types: self.vertex_types.clone(),
            couplings,
        }
    }

    /// True when topology, lengths and vertex types coincide (couplings may
    /// differ).
    pub fn same_marked_graph(&self, other: &Self) -> bool {
        self.edges == other.edges && self.vertex_types == other.vertex_types
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in &self.edges {
                for (a, b) in [
                    (e.left_vertex, e.right_vertex),
                    (e.right_vertex, e.left_vertex),
                ] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

// --- canonical JSON schema -------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexSpec {
    #[serde(rename = "type")]
    vertex_type: VertexType,
    alpha: Coupling,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    from: usize,
    to: usize,
    length: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexSpec>,
    edges: Vec<EdgeSpec>,
}

impl MarkedGraph {
    /// Parse the canonical JSON schema and validate the graph.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let vertex_types = file.vertices.iter().map(|v| v.vertex_type).collect();
        let couplings = file.vertices.iter().map(|v| v.alpha).collect();
        let edges = file
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| Edge {
                id: i,
                left_vertex: e.from,
                right_vertex: e.to,
                length: e.length,
            })
            .collect();
        MarkedGraph::new(edges, vertex_types, couplings)
    }

    /// Serialize to the canonical JSON schema (fixed field order, so that
    /// parse -> serialize round-trips byte-identically).
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self
                .vertex_types
                .iter()
                .zip(&self.couplings)
                .map(|(&vertex_type, &alpha)| VertexSpec { vertex_type, alpha })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    from: e.left_vertex,
                    to: e.right_vertex,
                    length: e.length,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("graph serialization");
        s.push('\n');
        s
    }
}

// --- fixtures --------------------------------------------------------------

/// Named graph families used throughout the tests and the CLI.
pub mod fixtures {
    use super::*;

    /// Rationally-independent-looking default lengths.
    pub const DEFAULT_LENGTHS: [f64; 4] = [1.0, 1.4142135624, 1.7320508076, 2.2360679775];

    fn edge(id: usize, a: usize, b: usize, length: f64) -> Edge {
        Edge {
            id,
            left_vertex: a,
            right_vertex: b,
            length,
        }
    }

    fn finite(alphas: &[f64]) -> Vec<Coupling> {
        alphas.iter().map(|&a| Coupling::Finite(a)).collect()
    }

    /// Single edge with the given endpoint types and couplings.
    pub fn interval(length: f64, types: [VertexType; 2], alphas: [f64; 2]) -> Result<MarkedGraph> {
        MarkedGraph::new(
            vec![edge(0, 0, 1, length)],
            types.to_vec(),
            finite(&alphas),
        )
    }

    /// Star with pendants `0..n-1` and center `n`; all delta type.
    pub fn star(lengths: &[f64], alphas: &[f64]) -> Result<MarkedGraph> {
        let n = lengths.len();
        if n < 2 {
            return Err(Error::ParamMismatch("star needs at least 2 edges".into()));
        }
        if alphas.len() != n + 1 {
            return Err(Error::ParamMismatch(format!(
                "star with {n} edges needs {} couplings, got {}",
                n + 1,
                alphas.len()
            )));
        }
        let edges = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| edge(i, i, n, l))
            .collect();
        MarkedGraph::new(edges, vec![VertexType::Delta; n + 1], finite(alphas))
    }

    /// Path on 4 vertices (the A4 chain), all delta type.
    pub fn chain_a4(lengths: &[f64; 3], alphas: &[f64; 4]) -> Result<MarkedGraph> {
        let edges = (0..3).map(|i| edge(i, i, i + 1, lengths[i])).collect();
        MarkedGraph::new(edges, vec![VertexType::Delta; 4], finite(alphas))
    }

    /// Cycle on `lengths.len()` vertices, all delta type. A 2-cycle is a
    /// pair of parallel edges.
    pub fn cycle(lengths: &[f64], alphas: &[f64]) -> Result<MarkedGraph> {
        let n = lengths.len();
        if n < 2 {
            return Err(Error::ParamMismatch("cycle needs at least 2 edges".into()));
        }
        if alphas.len() != n {
            return Err(Error::ParamMismatch(format!(
                "cycle with {n} edges needs {n} couplings, got {}",
                alphas.len()
            )));
        }
        let edges = lengths
            .iter()
            .enumerate()
            .map(|(i, &l)| edge(i, i, (i + 1) % n, l))
            .collect();
        MarkedGraph::new(edges, vec![VertexType::Delta; n], finite(alphas))
    }

    /// Lasso: pendant V0 -- V1 plus a double edge V1 -- V2, all delta type,
    /// degrees (1, 3, 2).
    ///
    /// The underlying figure is not available in the source text; this
    /// realization is the unique one whose degree vector matches the
    /// coupling parametrization (a, 3b, 2c) used with it.
    pub fn lasso(lengths: &[f64; 3], alphas: &[f64; 3]) -> Result<MarkedGraph> {
        let edges = vec![
            edge(0, 0, 1, lengths[0]),
            edge(1, 1, 2, lengths[1]),
            edge(2, 1, 2, lengths[2]),
        ];
        MarkedGraph::new(edges, vec![VertexType::Delta; 3], finite(alphas))
    }

    /// Four-vertex graph with a double edge in the middle: V0 -- V1 single,
    /// V1 -- V2 double, V2 -- V3 single; types (delta, delta, delta',
    /// delta'). Degrees (1, 3, 3, 1).
    pub fn example_3_4(lengths: &[f64; 4], alphas: &[f64; 4]) -> Result<MarkedGraph> {
        let edges = vec![
            edge(0, 0, 1, lengths[0]),
            edge(1, 1, 2, lengths[1]),
            edge(2, 1, 2, lengths[2]),
            edge(3, 2, 3, lengths[3]),
        ];
        MarkedGraph::new(
            edges,
            vec![
                VertexType::Delta,
                VertexType::Delta,
                VertexType::DeltaPrime,
                VertexType::DeltaPrime,
            ],
            finite(alphas),
        )
    }

    pub const FIXTURE_NAMES: [&str; 6] = [
        "interval",
        "star",
        "chain_a4",
        "cycle",
        "lasso",
        "example_3_4",
    ];

    /// Named fixture with documented default lengths and couplings.
    pub fn by_name(name: &str) -> Result<MarkedGraph> {
        let l = DEFAULT_LENGTHS;
        match name {
            "interval" => interval(1.0, [VertexType::Delta; 2], [0.0, 0.0]),
            "star" => star(&l[..3], &[0.0; 4]),
            "chain_a4" => chain_a4(&[l[0], l[1], l[2]], &[0.0; 4]),
            "cycle" => cycle(&l, &[2.0, -2.0, 2.0, -2.0]),
            "lasso" => lasso(&[1.0; 3], &[1.0, 6.0, 6.0]),
            "example_3_4" => example_3_4(&l, &[1.0, 2.0, 3.0, 4.0]),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

// --- rational independence advisory ---------------------------------------

/// A near-vanishing integer combination of edge lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalDependence {
    pub coefficients: Vec<i64>,
    pub residual: f64,
}

/// Scan integer combinations `sum c_i l_i`, `|c_i| <= max_coeff`, and report
/// any within `1e-9` of zero. Advisory only: exact verification of rational
/// independence is impossible in floating point.
pub fn rational_independence_advisory(lengths: &[f64], max_coeff: i64) -> Vec<RationalDependence> {
    const TOL: f64 = 1e-9;
    const BUDGET: u64 = 20_000_000;
    let k = lengths.len();
    let base = 2 * max_coeff as u64 + 1;
    let mut total: u64 = 1;
    for _ in 0..k {
        total = total.saturating_mul(base);
        if total > BUDGET {
            // truncated scan: fall back to pairwise combinations only
            return pairwise_advisory(lengths, max_coeff, TOL);
        }
    }
    let mut found = Vec::new();
    let mut coeffs = vec![0i64; k];
    'outer: loop {
        if coeffs.iter().any(|&c| c != 0) {
            // report each dependence once, with leading nonzero positive
            let lead = coeffs.iter().find(|&&c| c != 0).copied().unwrap();
            if lead > 0 {
                let s: f64 = coeffs
                    .iter()
                    .zip(lengths)
                    .map(|(&c, &l)| c as f64 * l)
                    .sum();
                if s.abs() < TOL {
                    found.push(RationalDependence {
                        coefficients: coeffs.clone(),
                        residual: s,
                    });
                }
            }
        }
        for i in (0..k).rev() {
            if coeffs[i] < max_coeff {
                coeffs[i] += 1;
                continue 'outer;
            }
            coeffs[i] = -max_coeff;
        }
        break;
    }
    found
}

fn pairwise_advisory(lengths: &[f64], max_coeff: i64, tol: f64) -> Vec<RationalDependence> {
    let mut found = Vec::new();
    for i in 0..lengths.len() {
        for j in (i + 1)..lengths.len() {
            for ci in 1..=max_coeff {
                for cj in -max_coeff..=max_coeff {
                    if cj == 0 {
                        continue;
                    }
                    let s = ci as f64 * lengths[i] + cj as f64 * lengths[j];
                    if s.abs() < tol {
                        let mut coefficients = vec![0i64; lengths.len()];
                        coefficients[i] = ci;
                        coefficients[j] = cj;
                        found.push(RationalDependence {
                            coefficients,
                            residual: s,
                        });
                    }
                }
            }
        }
    }
    found
}
