//! Frameworks, rigidity matrices, motions, stresses, and generic rank.
//!
//! A framework places the graph in `R^d`: each vertex `i` gets a position
//! `p_i`, each loop gets a normal vector `q`.  An infinitesimal motion
//! assigns a velocity to every vertex so that every bar keeps its length to
//! first order, `(p_i - p_j) . (v_i - v_j) = 0`, and every looped vertex
//! moves inside the hyperplane of its normal, `q . v_i = 0`.  Stacking these
//! constraints gives the rigidity matrix; the framework is infinitesimally
//! rigid when the matrix has rank `d |V|`, i.e. the only motion is zero.
//! There is deliberately no rigid-motion quotient here: loops are meant to
//! pin translations and rotations down, so full column rank is the right
//! notion.
//!
//! Generic behaviour is probed by evaluating the matrix at random integer
//! coordinates and computing rank over a large prime field: specializing
//! coordinates can only lower rank, so the max over trials is a certified
//! lower bound on the generic rank and equals it with overwhelming
//! probability.

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exactlin::{ExactMatrix, PrimeFieldMatrix};
use crate::graph::{EdgeId, LoopId, LoopedGraph};
use crate::ratio;
use crate::sampling;

/// Default trial count for [`generic_rank`].
pub const DEFAULT_TRIALS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameworkError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("expected {expected} position vectors, got {got}")]
    PositionCount { expected: usize, got: usize },
    #[error("vector of length {got} where dimension is {d}")]
    VectorLength { d: usize, got: usize },
    #[error("loop {0} has no normal vector")]
    MissingNormal(usize),
    #[error("unknown loop id {0} in normals")]
    UnknownLoop(usize),
    #[error("bad rational: {0}")]
    BadRational(String),
}

/// A placed framework: graph, dimension, joint positions, loop normals.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "FrameworkJson", into = "FrameworkJson")]
pub struct Framework {
    graph: LoopedGraph,
    d: usize,
    /// positions, indexed by vertex
    p: Vec<Vec<BigRational>>,
    /// normals, indexed by loop id
    q: Vec<Vec<BigRational>>,
}

#[derive(Serialize, Deserialize)]
struct FrameworkJson {
    graph: LoopedGraph,
    d: usize,
    p: Vec<Vec<String>>,
    q: BTreeMap<usize, Vec<String>>,
}

impl TryFrom<FrameworkJson> for Framework {
    type Error = FrameworkError;
    fn try_from(j: FrameworkJson) -> Result<Self, FrameworkError> {
        let p = j
            .p
            .iter()
            .map(|v| ratio::parse_vec(v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(FrameworkError::BadRational)?;
        for &id in j.q.keys() {
            if id >= j.graph.loop_count() {
                return Err(FrameworkError::UnknownLoop(id));
            }
        }
        let q = (0..j.graph.loop_count())
            .map(|id| {
                let v = j.q.get(&id).ok_or(FrameworkError::MissingNormal(id))?;
                ratio::parse_vec(v).map_err(FrameworkError::BadRational)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Framework::new(j.graph, j.d, p, q)
    }
}

impl From<Framework> for FrameworkJson {
    fn from(f: Framework) -> FrameworkJson {
        FrameworkJson {
            d: f.d,
            p: f.p.iter().map(|v| ratio::format_vec(v)).collect(),
            q: f.q.iter().enumerate().map(|(i, v)| (i, ratio::format_vec(v))).collect(),
            graph: f.graph,
        }
    }
}

impl Framework {
    /// Validates that positions cover every vertex, normals cover every
    /// loop, and all vectors have length `d`.
    pub fn new(
        graph: LoopedGraph,
        d: usize,
        p: Vec<Vec<BigRational>>,
        q: Vec<Vec<BigRational>>,
    ) -> Result<Self, FrameworkError> {
        if d == 0 {
            return Err(FrameworkError::ZeroDimension);
        }
        if p.len() != graph.n() {
            return Err(FrameworkError::PositionCount { expected: graph.n(), got: p.len() });
        }
        if q.len() != graph.loop_count() {
            return Err(FrameworkError::PositionCount {
                expected: graph.loop_count(),
                got: q.len(),
            });
        }
        for v in p.iter().chain(q.iter()) {
            if v.len() != d {
                return Err(FrameworkError::VectorLength { d, got: v.len() });
            }
        }
        Ok(Framework { graph, d, p, q })
    }

    pub fn graph(&self) -> &LoopedGraph {
        &self.graph
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn position(&self, v: usize) -> &[BigRational] {
        &self.p[v]
    }

    pub fn positions(&self) -> &[Vec<BigRational>] {
        &self.p
    }

    pub fn normal(&self, l: LoopId) -> &[BigRational] {
        &self.q[l.0]
    }

    pub fn normals(&self) -> &[Vec<BigRational>] {
        &self.q
    }

    /// Replace one loop normal (length-checked).
    pub fn set_normal(&mut self, l: LoopId, v: Vec<BigRational>) -> Result<(), FrameworkError> {
        if v.len() != self.d {
            return Err(FrameworkError::VectorLength { d: self.d, got: v.len() });
        }
        self.q[l.0] = v;
        Ok(())
    }

    /// The `(|E| + |L|) x d|V|` rigidity matrix.
    ///
    /// Row order: edges by id, then loops by id.  Columns come in `d`-wide
    /// blocks in vertex order.  The row of edge `uv` holds `p_u - p_v` in
    /// block `u` and `p_v - p_u` in block `v`; the row of a loop at `v`
    /// holds its normal in block `v`.
    pub fn rigidity_matrix(&self) -> ExactMatrix {
        let (n, d) = (self.graph.n(), self.d);
        let mut m = ExactMatrix::zero(self.graph.size(), n * d);
        for (e, (u, v)) in self.graph.edges() {
            for c in 0..d {
                let diff = &self.p[u][c] - &self.p[v][c];
                m.set(e.0, u * d + c, diff.clone());
                m.set(e.0, v * d + c, -diff);
            }
        }
        let edge_rows = self.graph.edge_count();
        for (l, v) in self.graph.loops() {
            for c in 0..d {
                m.set(edge_rows + l.0, v * d + c, self.q[l.0][c].clone());
            }
        }
        m
    }

    /// The edge rows only: the classical bar-joint rigidity matrix of the
    /// loopless part.
    pub fn bar_joint_submatrix(&self) -> ExactMatrix {
        let (n, d) = (self.graph.n(), self.d);
        let mut m = ExactMatrix::zero(self.graph.edge_count(), n * d);
        for (e, (u, v)) in self.graph.edges() {
            for c in 0..d {
                let diff = &self.p[u][c] - &self.p[v][c];
                m.set(e.0, u * d + c, diff.clone());
                m.set(e.0, v * d + c, -diff);
            }
        }
        m
    }

    /// Exact test: rank of the rigidity matrix equals `d |V|`.
    pub fn is_inf_rigid(&self) -> bool {
        self.rigidity_matrix().rank() == self.d * self.graph.n()
    }

    /// Basis of the space of infinitesimal motions, one velocity vector per
    /// vertex.
    pub fn motions(&self) -> Vec<Vec<Vec<BigRational>>> {
        self.rigidity_matrix()
            .nullspace()
            .into_iter()
            .map(|flat| flat.chunks(self.d).map(|c| c.to_vec()).collect())
            .collect()
    }

    /// Basis of the space of equilibrium stresses (left kernel of the
    /// rigidity matrix), split into edge and loop coefficients.
    pub fn stresses(&self) -> Vec<EquilibriumStress> {
        let ne = self.graph.edge_count();
        self.rigidity_matrix()
            .cokernel()
            .into_iter()
            .map(|w| EquilibriumStress {
                omega: (0..ne).map(|i| (EdgeId(i), w[i].clone())).collect(),
                lambda: (0..self.graph.loop_count())
                    .map(|i| (LoopId(i), w[ne + i].clone()))
                    .collect(),
            })
            .collect()
    }
}

/// A row vector annihilating the rigidity matrix, with coefficients named
/// by the element they weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquilibriumStress {
    pub omega: BTreeMap<EdgeId, BigRational>,
    pub lambda: BTreeMap<LoopId, BigRational>,
}

impl EquilibriumStress {
    pub fn is_zero(&self) -> bool {
        self.omega.values().all(Zero::is_zero) && self.lambda.values().all(Zero::is_zero)
    }
}

/// Largest rigidity-matrix rank seen over `trials` random integer
/// placements of `g` in `R^d` (coordinates uniform in `[1, 10^6]`), with
/// rank computed over a prime field.
///
/// A lower bound on the generic rank, equal to it with overwhelming
/// probability; deterministic for fixed `(seed, trials)`, and trial `i`
/// draws from stream `i` so the bound is monotone in `trials`.
pub fn generic_rank(g: &LoopedGraph, d: usize, trials: usize, seed: u64) -> usize {
    assert!(d >= 1, "dimension must be positive");
    assert!(trials >= 1, "need at least one trial");
    let mut best = 0;
    for trial in 0..trials {
        let mut rng = sampling::rng_for(seed, trial as u64);
        let mut m = PrimeFieldMatrix::zero(g.size(), d * g.n());
        let p: Vec<Vec<u64>> = (0..g.n())
            .map(|_| (0..d).map(|_| rng.random_range(1..=sampling::COORD_BOUND) as u64).collect())
            .collect();
        for (e, (u, v)) in g.edges() {
            for c in 0..d {
                let (a, b) = (p[u][c], p[v][c]);
                let diff = (a + crate::exactlin::PRIME - b) % crate::exactlin::PRIME;
                m.set(e.0, u * d + c, diff);
                m.set(e.0, v * d + c, (crate::exactlin::PRIME - diff) % crate::exactlin::PRIME);
            }
        }
        let edge_rows = g.edge_count();
        for (l, v) in g.loops() {
            for c in 0..d {
                m.set(edge_rows + l.0, v * d + c, rng.random_range(1..=sampling::COORD_BOUND) as u64);
            }
        }
        best = best.max(m.rank());
        if best == d * g.n() {
            break; // cannot improve
        }
    }
    best
}

/// A fully random rational framework on `g`, used by tests and constructions
/// that need a generic starting point.
pub fn random_framework(g: &LoopedGraph, d: usize, seed: u64, stream: u64) -> Framework {
    let mut rng = sampling::rng_for(seed, stream);
    let p = (0..g.n()).map(|_| sampling::sample_point(&mut rng, d)).collect();
    let q = (0..g.loop_count()).map(|_| sampling::sample_point(&mut rng, d)).collect();
    Framework::new(g.clone(), d, p, q).expect("sampled vectors have length d")
}
