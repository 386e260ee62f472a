//! Inductive construction of rigid frameworks.
//!
//! The engine here turns combinatorial certificates into geometric ones.  A
//! `(t,0)`-tight graph is shrunk one vertex at a time ([`reduce_vertex`]),
//! realized at the bottom, and re-grown by loop extensions
//! ([`geometric_extension`]) that provably add `d` to the rank at every
//! step.  Nothing is trusted: every placement is sampled, then checked by
//! exact rank computation, and resampled on the rare degenerate draw.  The
//! two entry points are
//!
//! * [`realize_rigid_main`]: for `d >= max(2t, t(t-1))`, an exact
//!   infinitesimally rigid framework on the lift of a `(t,0)`-tight
//!   looped-simple graph (`d - t` extra loops per vertex);
//! * [`realize_plane_3d`]: the plane-constrained case `d = 3`, `t = 2`, one
//!   added loop per vertex, where graphs with minimum count 4 get the
//!   elliptic-cylinder realization instead of a reduction.

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::exactlin::{in_span, rank_of_rows, rat_int, ExactMatrix};
use crate::graph::{GraphError, LoopId, LoopedGraph};
use crate::rigidity::{Framework, FrameworkError};
use crate::sampling;
use crate::sparsity::{is_sparse, is_tight, SparsityParams};

/// Attempt budget for every verify-and-retry placement loop.
pub const RETRY_CAP: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructError {
    #[error("graph is not ({t},0)-tight")]
    NotTight { t: usize },
    #[error("graph has parallel edges; a looped-simple graph is required")]
    NotLoopedSimple,
    #[error("graph contains a complete subgraph on vertices {0:?}")]
    ContainsK5([usize; 5]),
    #[error("dimension {d} is below {min}, the smallest supported for t = {t}")]
    DimensionTooSmall { d: usize, t: usize, min: usize },
    #[error("vertex {v} has only {delta} incident elements, fewer than t = {t}")]
    VertexTooSparse { v: usize, delta: usize, t: usize },
    #[error("extension must add {expected} elements at the new vertex, got {got}")]
    ExtensionCount { expected: usize, got: usize },
    #[error("extension needs at least {needed} new loops, got {got}")]
    TooFewNewLoops { needed: usize, got: usize },
    #[error("extension allows at most {max} new loops, got {got}")]
    TooManyNewLoops { max: usize, got: usize },
    #[error("extension allows at most {max} new edges, got {got}")]
    TooManyNewEdges { max: usize, got: usize },
    #[error("deleted loops must sit at pairwise distinct vertices")]
    DeletedLoopsShareVertex,
    #[error("new edges must go to distinct vertices; {vertex} is repeated")]
    DuplicateEdgeTarget { vertex: usize },
    #[error("no new edge goes to vertex {vertex}, which loses a loop")]
    MissingEdgeToReceiver { vertex: usize },
    #[error("vertex {vertex} carries {has} loops but the extension needs {needed}")]
    TooFewReceiverLoops { vertex: usize, needed: usize, has: usize },
    #[error("extension dimension {ext} does not match framework dimension {fw}")]
    DimensionMismatch { ext: usize, fw: usize },
    #[error("input framework is not infinitesimally rigid")]
    NotRigid,
    #[error("required independence is impossible: {0}")]
    ImpossibleIndependence(String),
    #[error("affine intersection is empty or not in general position")]
    DegenerateIntersection,
    #[error("no valid placement found in {0} attempts; input may be degenerate")]
    RetriesExhausted(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
}

// ---------------------------------------------------------------------------
// small vector helpers

fn vec_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn is_zero_vec(v: &[BigRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// An affine subspace `base + span(directions)` of `Q^d` with an
/// independent direction set.
#[derive(Clone, Debug)]
pub struct AffineSubspace {
    base: Vec<BigRational>,
    directions: Vec<Vec<BigRational>>,
}

impl AffineSubspace {
    /// Builds `base + span(vectors)`, thinning `vectors` to an independent
    /// subset (greedy, in the given order).
    pub fn new(base: Vec<BigRational>, vectors: &[Vec<BigRational>]) -> Self {
        let mut directions: Vec<Vec<BigRational>> = Vec::new();
        for v in vectors {
            if !in_span(v, &directions) {
                directions.push(v.clone());
            }
        }
        AffineSubspace { base, directions }
    }

    /// Affine span of a nonempty point set.
    pub fn span_of_points(points: &[Vec<BigRational>]) -> Option<Self> {
        let (first, rest) = points.split_first()?;
        let diffs: Vec<Vec<BigRational>> = rest.iter().map(|p| vec_sub(p, first)).collect();
        Some(AffineSubspace::new(first.clone(), &diffs))
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn base(&self) -> &[BigRational] {
        &self.base
    }

    pub fn directions(&self) -> &[Vec<BigRational>] {
        &self.directions
    }

    pub fn contains(&self, z: &[BigRational]) -> bool {
        in_span(&vec_sub(z, &self.base), &self.directions)
    }

    /// Rows `n` with `n . z = n . base` cutting this subspace out of `Q^d`:
    /// a basis of the orthogonal complement of the direction span, paired
    /// with its right-hand side.
    fn constraints(&self, d: usize) -> Vec<(Vec<BigRational>, BigRational)> {
        let normals = if self.directions.is_empty() {
            (0..d)
                .map(|i| {
                    let mut e = vec![BigRational::zero(); d];
                    e[i] = rat_int(1);
                    e
                })
                .collect()
        } else {
            ExactMatrix::from_rows(self.directions.clone()).nullspace()
        };
        normals
            .into_iter()
            .map(|n| {
                let rhs = n
                    .iter()
                    .zip(&self.base)
                    .fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
                (n, rhs)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// reduction

/// Record of one vertex reduction, sufficient to reverse it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    /// Deleted vertex, in the numbering of the graph that was reduced.
    pub vertex: usize,
    /// Sparsity parameter of the reduction.
    pub t: usize,
    /// Number of compensating loops, `delta(vertex) - t`.
    pub k: usize,
    /// Neighbours that received the loops, in the original numbering.
    pub receivers: Vec<usize>,
    /// Ids of the added loops in the reduced graph.
    pub new_loops: Vec<LoopId>,
}

impl ReductionStep {
    /// The extension datum that reverses this reduction after both graphs
    /// are lifted by `d - t` loops per vertex.  `original` must be the
    /// looped-simple graph the step was produced from.
    pub fn to_extension(&self, original: &LoopedGraph, d: usize) -> ExtensionData {
        assert!(d >= self.t, "lift dimension below t");
        let shift = |u: usize| if u < self.vertex { u } else { u - 1 };
        let edge_targets: Vec<usize> =
            original.neighbours(self.vertex).into_iter().map(shift).collect();
        debug_assert_eq!(
            edge_targets.len(),
            original.edges_at(self.vertex).len(),
            "original graph must be looped-simple"
        );
        ExtensionData {
            d,
            deleted_loops: self.new_loops.clone(),
            edge_targets,
            new_loop_count: original.loops_at(self.vertex).len() + (d - self.t),
        }
    }
}

/// Delete vertex `v` from a `(t,0)`-tight graph and re-balance the count by
/// placing `delta(v) - t` new loops on distinct neighbours, keeping the
/// result tight.
///
/// Receivers are chosen greedily in ascending vertex order, skipping any
/// neighbour already inside a tight subgraph of the current intermediate
/// graph (adding a loop there would overcount); the underlying counting
/// argument guarantees the greedy choice always completes.
pub fn reduce_vertex(
    g: &LoopedGraph,
    t: usize,
    v: usize,
) -> Result<(LoopedGraph, ReductionStep), ConstructError> {
    let params = SparsityParams::new(t, 0).expect("(t,0) is valid");
    if !is_tight(g, params) {
        return Err(ConstructError::NotTight { t });
    }
    let delta = g.delta(v);
    if delta < t {
        return Err(ConstructError::VertexTooSparse { v, delta, t });
    }
    let k = delta - t;
    let (mut h, map) = g.delete_vertex(v);
    let mut receivers = Vec::new();
    let mut new_loops = Vec::new();
    for _ in 0..k {
        let mut placed = false;
        for u in g.neighbours(v) {
            if receivers.contains(&u) {
                continue;
            }
            let hu = map[u].expect("neighbour survives the deletion");
            let mut candidate = h.clone();
            let lid = candidate.add_loop(hu)?;
            if is_sparse(&candidate, params) {
                h = candidate;
                receivers.push(u);
                new_loops.push(lid);
                placed = true;
                break;
            }
        }
        assert!(placed, "counting argument guarantees a free neighbour");
    }
    assert!(is_tight(&h, params), "reduction must preserve tightness");
    Ok((h, ReductionStep { vertex: v, t, k, receivers, new_loops }))
}

// ---------------------------------------------------------------------------
// extension

/// A `d`-dimensional `k`-loop extension: delete `k` loops at distinct
/// vertices, add a new vertex with `d + k` incident elements, at least `k`
/// of them loops, with exactly one new edge to each vertex that lost a loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionData {
    pub d: usize,
    /// Loops of the base graph to delete, at pairwise distinct vertices.
    pub deleted_loops: Vec<LoopId>,
    /// Endpoints of the new edges; distinct, covering every deleted loop's
    /// vertex.
    pub edge_targets: Vec<usize>,
    /// Loops attached to the new vertex.
    pub new_loop_count: usize,
}

impl ExtensionData {
    pub fn k(&self) -> usize {
        self.deleted_loops.len()
    }

    /// Check the proviso against a concrete base graph.
    pub fn validate(&self, h: &LoopedGraph) -> Result<(), ConstructError> {
        let k = self.k();
        let mut deleted_vertices = Vec::new();
        for &l in &self.deleted_loops {
            if l.0 >= h.loop_count() {
                return Err(GraphError::UnknownLoop(l.0).into());
            }
            let v = h.loop_vertex(l);
            if deleted_vertices.contains(&v) {
                return Err(ConstructError::DeletedLoopsShareVertex);
            }
            deleted_vertices.push(v);
        }
        let mut seen = Vec::new();
        for &u in &self.edge_targets {
            if u >= h.n() {
                return Err(GraphError::VertexOutOfRange { vertex: u, n: h.n() }.into());
            }
            if seen.contains(&u) {
                return Err(ConstructError::DuplicateEdgeTarget { vertex: u });
            }
            seen.push(u);
        }
        for &v in &deleted_vertices {
            if !self.edge_targets.contains(&v) {
                return Err(ConstructError::MissingEdgeToReceiver { vertex: v });
            }
        }
        if self.new_loop_count < k {
            return Err(ConstructError::TooFewNewLoops { needed: k, got: self.new_loop_count });
        }
        if self.new_loop_count > self.d {
            return Err(ConstructError::TooManyNewLoops { max: self.d, got: self.new_loop_count });
        }
        if self.edge_targets.len() > self.d {
            return Err(ConstructError::TooManyNewEdges {
                max: self.d,
                got: self.edge_targets.len(),
            });
        }
        let total = self.edge_targets.len() + self.new_loop_count;
        if total != self.d + k {
            return Err(ConstructError::ExtensionCount { expected: self.d + k, got: total });
        }
        Ok(())
    }
}

/// Result of applying an extension at the graph level, with the id
/// bookkeeping needed to carry framework data across.
struct ExtendedGraph {
    graph: LoopedGraph,
    /// Old loop id -> new loop id (`None` for deleted loops).
    loop_map: Vec<Option<LoopId>>,
    /// Ids of the new vertex's loops, in creation order.
    new_loops: Vec<LoopId>,
}

fn extend_graph(h: &LoopedGraph, ext: &ExtensionData) -> Result<ExtendedGraph, ConstructError> {
    ext.validate(h)?;
    let v_new = h.n();
    let mut g = LoopedGraph::new(h.n() + 1);
    for (_, (a, b)) in h.edges() {
        g.add_edge(a, b)?;
    }
    for &u in &ext.edge_targets {
        g.add_edge(v_new, u)?;
    }
    let mut loop_map = vec![None; h.loop_count()];
    for (l, v) in h.loops() {
        if !ext.deleted_loops.contains(&l) {
            loop_map[l.0] = Some(g.add_loop(v)?);
        }
    }
    let new_loops: Vec<LoopId> =
        (0..ext.new_loop_count).map(|_| g.add_loop(v_new).expect("v_new in range")).collect();
    Ok(ExtendedGraph { graph: g, loop_map, new_loops })
}

/// The extended graph; the new vertex gets the largest vertex id, new edges
/// come after all old edges (in `edge_targets` order), and surviving loops
/// keep their relative order followed by the new vertex's loops.
pub fn apply_extension(h: &LoopedGraph, ext: &ExtensionData) -> Result<LoopedGraph, ConstructError> {
    Ok(extend_graph(h, ext)?.graph)
}

/// Minimum loops a vertex must keep for a `k`-loop extension to preserve
/// rigidity (`ceil((k-1) d / k)`, vacuous below `k = 2`).
fn receiver_loop_floor(d: usize, k: usize) -> usize {
    if k < 2 {
        0
    } else {
        ((k - 1) * d).div_ceil(k)
    }
}

/// Extend a rigid framework by one vertex, preserving rigidity exactly.
///
/// The new joint is placed in the intersection of the affine constraint
/// spaces of the vertices losing a loop (so the lost constraint can be
/// replayed through the new bar), away from the affine span of its
/// neighbours; the new loop normals complete a basis, and the receivers'
/// remaining normals are resampled inside their old constraint span.  Every
/// choice is verified by exact rank; failure resamples, up to [`RETRY_CAP`]
/// rounds.
pub fn geometric_extension(
    fh: &Framework,
    ext: &ExtensionData,
    seed: u64,
) -> Result<Framework, ConstructError> {
    let h = fh.graph();
    ext.validate(h)?;
    let d = fh.d();
    if ext.d != d {
        return Err(ConstructError::DimensionMismatch { ext: ext.d, fw: d });
    }
    let k = ext.k();
    let receivers: Vec<usize> = ext.deleted_loops.iter().map(|&l| h.loop_vertex(l)).collect();
    let floor = receiver_loop_floor(d, k);
    for &vj in &receivers {
        let has = h.loops_at(vj).len();
        if has < floor {
            return Err(ConstructError::TooFewReceiverLoops { vertex: vj, needed: floor, has });
        }
    }
    if !fh.is_inf_rigid() {
        return Err(ConstructError::NotRigid);
    }

    // constraint spans of the receivers, from all their current loops
    let spans: Vec<Vec<Vec<BigRational>>> = receivers
        .iter()
        .map(|&vj| h.loops_at(vj).iter().map(|&l| fh.normal(l).to_vec()).collect())
        .collect();
    let affine: Vec<AffineSubspace> = receivers
        .iter()
        .zip(&spans)
        .map(|(&vj, qs)| AffineSubspace::new(fh.position(vj).to_vec(), qs))
        .collect();

    // stack the orthogonal constraints of every receiver space and solve;
    // the solution set is the affine intersection the new joint lives in
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for a in &affine {
        for (n, b) in a.constraints(d) {
            rows.push(n);
            rhs.push(b);
        }
    }
    let (z0, homogeneous) = if rows.is_empty() {
        (vec![BigRational::zero(); d], ExactMatrix::zero(0, d).nullspace())
    } else {
        let m = ExactMatrix::from_rows(rows);
        let z0 = m.solve(&rhs).ok_or(ConstructError::DegenerateIntersection)?;
        (z0, m.nullspace())
    };
    // general position check: dim of the intersection must match the count
    let expected = affine.iter().map(AffineSubspace::dim).sum::<usize>() as isize
        - k.saturating_sub(1) as isize * d as isize;
    if k > 0 && homogeneous.len() as isize != expected {
        return Err(ConstructError::DegenerateIntersection);
    }

    let neighbour_span = AffineSubspace::span_of_points(
        &ext.edge_targets.iter().map(|&u| fh.position(u).to_vec()).collect::<Vec<_>>(),
    );

    let extended = extend_graph(h, ext)?;
    let v_new = h.n();

    'attempt: for attempt in 0..RETRY_CAP {
        let mut rng = sampling::rng_for(seed, attempt as u64);

        // new joint: random point of the intersection, off the neighbour span
        let z: Vec<BigRational> = {
            let mut z = z0.clone();
            for hvec in &homogeneous {
                let c = sampling::sample_rational(&mut rng);
                for (zi, hi) in z.iter_mut().zip(hvec) {
                    *zi += &c * hi;
                }
            }
            z
        };
        if neighbour_span.as_ref().is_some_and(|a| a.contains(&z)) {
            continue 'attempt;
        }
        let bars: Vec<Vec<BigRational>> =
            ext.edge_targets.iter().map(|&u| vec_sub(&z, fh.position(u))).collect();
        if rank_of_rows(&bars) != bars.len() {
            continue 'attempt;
        }

        // loop normals at the new vertex: one replayed constraint per
        // receiver, the rest completing {bars} to a basis
        let mut new_normals: Vec<Vec<BigRational>> =
            receivers.iter().map(|&vj| vec_sub(&z, fh.position(vj))).collect();
        if new_normals.iter().any(|q| is_zero_vec(q)) {
            continue 'attempt;
        }
        let mut completing = bars.clone();
        for _ in k..ext.new_loop_count {
            let extra: Vec<BigRational> =
                (0..d).map(|_| sampling::sample_rational(&mut rng)).collect();
            completing.push(extra.clone());
            new_normals.push(extra);
        }
        if rank_of_rows(&completing) != d {
            continue 'attempt;
        }

        // resample each receiver's remaining normals inside its old span so
        // that together with the replayed constraint they still span it
        let mut q_new: Vec<Vec<BigRational>> = vec![Vec::new(); extended.graph.loop_count()];
        for (l, _) in h.loops() {
            if let Some(nl) = extended.loop_map[l.0] {
                q_new[nl.0] = fh.normal(l).to_vec();
            }
        }
        for (j, &vj) in receivers.iter().enumerate() {
            let span_dim = rank_of_rows(&spans[j]);
            let survivors: Vec<LoopId> = h
                .loops_at(vj)
                .into_iter()
                .filter(|l| *l != ext.deleted_loops[j])
                .collect();
            let mut reassigned: Vec<Vec<BigRational>> = Vec::new();
            for _ in &survivors {
                let mut q = vec![BigRational::zero(); d];
                for basis_vec in &spans[j] {
                    let c = sampling::sample_rational(&mut rng);
                    for (qi, bi) in q.iter_mut().zip(basis_vec) {
                        *qi += &c * bi;
                    }
                }
                reassigned.push(q);
            }
            let mut check = reassigned.clone();
            check.push(new_normals[j].clone());
            if rank_of_rows(&check) != span_dim {
                continue 'attempt;
            }
            for (l, q) in survivors.iter().zip(reassigned) {
                let nl = extended.loop_map[l.0].expect("survivor not deleted");
                q_new[nl.0] = q;
            }
        }
        for (lid, q) in extended.new_loops.iter().zip(&new_normals) {
            q_new[lid.0] = q.clone();
        }

        let mut p_new: Vec<Vec<BigRational>> = fh.positions().to_vec();
        p_new.push(z.clone());
        debug_assert_eq!(p_new.len(), v_new + 1);
        let candidate = Framework::new(extended.graph.clone(), d, p_new, q_new)?;
        if candidate.rigidity_matrix().rank() == d * (v_new + 1) {
            return Ok(candidate);
        }
    }
    Err(ConstructError::RetriesExhausted(RETRY_CAP))
}

/// Attach one new vertex with `|targets|` bars and the given loop normals
/// (together exactly `d` elements), placing it randomly until the new rows
/// are independent.  Rigidity of the result then follows from rigidity of
/// the input; the rank gain is exactly `d`.
pub fn zero_extension(
    f: &Framework,
    targets: &[usize],
    loop_normals: &[Vec<BigRational>],
    seed: u64,
) -> Result<Framework, ConstructError> {
    let d = f.d();
    if targets.len() + loop_normals.len() != d {
        return Err(ConstructError::ExtensionCount {
            expected: d,
            got: targets.len() + loop_normals.len(),
        });
    }
    let ext = ExtensionData {
        d,
        deleted_loops: vec![],
        edge_targets: targets.to_vec(),
        new_loop_count: loop_normals.len(),
    };
    let extended = extend_graph(f.graph(), &ext)?;
    for q in loop_normals {
        if q.len() != d {
            return Err(FrameworkError::VectorLength { d, got: q.len() }.into());
        }
    }
    if rank_of_rows(loop_normals) != loop_normals.len() {
        return Err(ConstructError::ImpossibleIndependence(
            "given loop normals are linearly dependent".into(),
        ));
    }

    for attempt in 0..RETRY_CAP {
        let mut rng = sampling::rng_for(seed, attempt as u64);
        let p0 = sampling::sample_point(&mut rng, d);
        let mut rows: Vec<Vec<BigRational>> =
            targets.iter().map(|&u| vec_sub(&p0, f.position(u))).collect();
        rows.extend(loop_normals.iter().cloned());
        if rank_of_rows(&rows) != d {
            continue;
        }
        let mut p = f.positions().to_vec();
        p.push(p0);
        let mut q: Vec<Vec<BigRational>> = vec![Vec::new(); extended.graph.loop_count()];
        for (l, _) in f.graph().loops() {
            let nl = extended.loop_map[l.0].expect("no deletions here");
            q[nl.0] = f.normal(l).to_vec();
        }
        for (lid, normal) in extended.new_loops.iter().zip(loop_normals) {
            q[lid.0] = normal.clone();
        }
        return Ok(Framework::new(extended.graph, d, p, q)?);
    }
    Err(ConstructError::RetriesExhausted(RETRY_CAP))
}

// ---------------------------------------------------------------------------
// full realizations

/// A certified-rigid framework together with the reduction trace that
/// produced it (outermost reduction first).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Realization {
    pub framework: Framework,
    pub steps: Vec<ReductionStep>,
}

/// Mix a call counter into a seed so nested placements draw from disjoint
/// randomness.
fn derive_seed(seed: u64, counter: &mut u64) -> u64 {
    *counter += 1;
    seed ^ counter.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Sample random frameworks on `g` until one is infinitesimally rigid
/// (exact check).  Fails after [`RETRY_CAP`] draws; callers use this for
/// small base graphs where rigidity is known to hold generically.
pub fn sample_rigid_framework(
    g: &LoopedGraph,
    d: usize,
    seed: u64,
) -> Result<Framework, ConstructError> {
    for attempt in 0..RETRY_CAP {
        let f = crate::rigidity::random_framework(g, d, seed, attempt as u64);
        if f.is_inf_rigid() {
            return Ok(f);
        }
    }
    Err(ConstructError::RetriesExhausted(RETRY_CAP))
}

/// Rebuild `fw` on the isomorphic graph `target`, where `sigma[v]` names
/// the target vertex for each vertex of `fw`.  Loop normals transfer
/// positionally within each vertex (all loops at one vertex are
/// interchangeable rows).
fn transfer_framework(
    fw: &Framework,
    target: &LoopedGraph,
    sigma: &[usize],
) -> Result<Framework, ConstructError> {
    let src = fw.graph();
    assert_eq!(src.relabel(sigma), *target, "graphs must be isomorphic under sigma");
    let d = fw.d();
    let mut p = vec![Vec::new(); target.n()];
    for v in 0..src.n() {
        p[sigma[v]] = fw.position(v).to_vec();
    }
    let mut q = vec![Vec::new(); target.loop_count()];
    for u in 0..src.n() {
        let src_loops = src.loops_at(u);
        let dst_loops = target.loops_at(sigma[u]);
        assert_eq!(src_loops.len(), dst_loops.len(), "loop counts must match per vertex");
        for (sl, dl) in src_loops.iter().zip(dst_loops) {
            q[dl.0] = fw.normal(*sl).to_vec();
        }
    }
    Ok(Framework::new(target.clone(), d, p, q)?)
}

/// Vertex bijection from `apply_extension`'s numbering (new vertex last)
/// back to the original numbering where the reduced vertex was `v`.
fn extension_sigma(n_extended: usize, v: usize) -> Vec<usize> {
    (0..n_extended)
        .map(|x| {
            if x + 1 == n_extended {
                v
            } else if x < v {
                x
            } else {
                x + 1
            }
        })
        .collect()
}

/// An exact infinitesimally rigid realization of `g` lifted by `d - t`
/// loops per vertex, for any `(t,0)`-tight looped-simple `g` and
/// `d >= max(2t, t(t-1))`.
///
/// Recursion: repeatedly delete a vertex of minimal `delta + delta*`
/// (incident count plus loop count), realize the smaller graph, and grow
/// the framework back by a geometric extension; the base is a single
/// vertex pinned by `d` independent normals.  The returned framework is
/// re-verified to have rank `d |V|` — acceptance is never probabilistic.
pub fn realize_rigid_main(
    g: &LoopedGraph,
    d: usize,
    t: usize,
    seed: u64,
) -> Result<Realization, ConstructError> {
    assert!(t >= 1, "t must be positive");
    let min_d = (2 * t).max(t * (t - 1));
    if d < min_d {
        return Err(ConstructError::DimensionTooSmall { d, t, min: min_d });
    }
    if !g.is_looped_simple() {
        return Err(ConstructError::NotLoopedSimple);
    }
    if !is_tight(g, SparsityParams::new(t, 0).expect("valid")) {
        return Err(ConstructError::NotTight { t });
    }
    let mut counter = 0u64;
    let realization = realize_main_recursive(g, d, t, seed, &mut counter)?;
    let lifted = g.add_uniform_loops(d - t);
    assert_eq!(realization.framework.graph(), &lifted);
    assert!(realization.framework.is_inf_rigid(), "output must certify");
    Ok(realization)
}

fn realize_main_recursive(
    g: &LoopedGraph,
    d: usize,
    t: usize,
    seed: u64,
    counter: &mut u64,
) -> Result<Realization, ConstructError> {
    if g.n() == 1 {
        let lifted = g.add_uniform_loops(d - t);
        let framework = sample_rigid_framework(&lifted, d, derive_seed(seed, counter))?;
        return Ok(Realization { framework, steps: vec![] });
    }
    // the counting identity guarantees some vertex has delta + delta* <= 2t
    let v = (0..g.n())
        .min_by_key(|&v| (g.delta(v) + g.loops_at(v).len(), v))
        .expect("nonempty graph");
    let (h, step) = reduce_vertex(g, t, v)?;
    let inner = realize_main_recursive(&h, d, t, seed, counter)?;
    let ext = step.to_extension(g, d);
    let fw_ext = geometric_extension(&inner.framework, &ext, derive_seed(seed, counter))?;
    let target = g.add_uniform_loops(d - t);
    let framework =
        transfer_framework(&fw_ext, &target, &extension_sigma(fw_ext.graph().n(), v))?;
    let mut steps = vec![step];
    steps.extend(inner.steps);
    Ok(Realization { framework, steps })
}

/// An exact rigid realization of `g` with one added loop per vertex in
/// `R^3`, for `(2,0)`-tight looped-simple `g` with no complete subgraph on
/// five vertices.  Components are realized independently (a reduction can
/// disconnect the graph, so connectivity is not required).
///
/// Vertices with `delta <= 3` are handled by the reduction recursion; a
/// graph where every vertex has `delta = 4` is necessarily 4-regular and
/// simple and gets the elliptic-cylinder realization instead.
pub fn realize_plane_3d(g: &LoopedGraph, seed: u64) -> Result<Realization, ConstructError> {
    let params = SparsityParams::new(2, 0).expect("valid");
    if !g.is_looped_simple() {
        return Err(ConstructError::NotLoopedSimple);
    }
    if !is_tight(g, params) {
        return Err(ConstructError::NotTight { t: 2 });
    }
    if let Some(k5) = g.find_k5_subgraphs().first() {
        return Err(ConstructError::ContainsK5(*k5));
    }
    let mut counter = 0u64;
    let realization = realize_plane_recursive(g, seed, &mut counter)?;
    assert_eq!(realization.framework.graph(), &g.add_uniform_loops(1));
    assert!(realization.framework.is_inf_rigid(), "output must certify");
    Ok(realization)
}

fn realize_plane_recursive(
    g: &LoopedGraph,
    seed: u64,
    counter: &mut u64,
) -> Result<Realization, ConstructError> {
    let components = g.components();
    if components.len() > 1 {
        return realize_components(g, &components, seed, counter);
    }
    if g.n() == 1 {
        let lifted = g.add_uniform_loops(1);
        let framework = sample_rigid_framework(&lifted, 3, derive_seed(seed, counter))?;
        return Ok(Realization { framework, steps: vec![] });
    }
    let v = (0..g.n()).min_by_key(|&v| (g.delta(v), v)).expect("nonempty");
    if g.delta(v) <= 3 {
        let (h, step) = reduce_vertex(g, 2, v)?;
        let inner = realize_plane_recursive(&h, seed, counter)?;
        let ext = step.to_extension(g, 3);
        let fw_ext = geometric_extension(&inner.framework, &ext, derive_seed(seed, counter))?;
        let target = g.add_uniform_loops(1);
        let framework =
            transfer_framework(&fw_ext, &target, &extension_sigma(fw_ext.graph().n(), v))?;
        let mut steps = vec![step];
        steps.extend(inner.steps);
        return Ok(Realization { framework, steps });
    }
    // minimum count 4 forces 4-regularity with no loops: the count
    // 2(|E|+|L|) = sum(delta + delta*) = 4|V| leaves no slack
    debug_assert!(g.loop_count() == 0 && (0..g.n()).all(|u| g.delta(u) == 4));
    let framework = cylinder_realization(g, derive_seed(seed, counter))?;
    Ok(Realization { framework, steps: vec![] })
}

fn realize_components(
    g: &LoopedGraph,
    components: &[Vec<usize>],
    seed: u64,
    counter: &mut u64,
) -> Result<Realization, ConstructError> {
    let lifted = g.add_uniform_loops(1);
    let mut p = vec![Vec::new(); g.n()];
    let mut q = vec![Vec::new(); lifted.loop_count()];
    let mut steps = Vec::new();
    for comp in components {
        // compact copy of the component; each component of a tight graph is
        // itself tight, looped-simple, and K5-free
        let mut back = vec![usize::MAX; g.n()];
        for (new, &old) in comp.iter().enumerate() {
            back[old] = new;
        }
        let mut sub = LoopedGraph::new(comp.len());
        for (_, (a, b)) in g.edges() {
            if comp.contains(&a) {
                sub.add_edge(back[a], back[b])?;
            }
        }
        for (_, v) in g.loops() {
            if comp.contains(&v) {
                sub.add_loop(back[v])?;
            }
        }
        let inner = realize_plane_recursive(&sub, seed, counter)?;
        for (new, &old) in comp.iter().enumerate() {
            p[old] = inner.framework.position(new).to_vec();
            let src_loops = inner.framework.graph().loops_at(new);
            let dst_loops = lifted.loops_at(old);
            assert_eq!(src_loops.len(), dst_loops.len());
            for (sl, dl) in src_loops.iter().zip(dst_loops) {
                q[dl.0] = inner.framework.normal(*sl).to_vec();
            }
        }
        steps.extend(inner.steps);
    }
    let framework = Framework::new(lifted, 3, p, q)?;
    Ok(Realization { framework, steps })
}

/// Realize a connected 4-regular simple graph (other than the complete
/// graph on five vertices) with one loop per vertex in `R^3`.
///
/// Joints go to random points; each loop normal is the gradient of the
/// elliptic cylinder `x^2 + 2 y^2 = r` at its joint, `(2x, 4y, 0)`.  That
/// leaves exactly the vertical translation as a motion (rank `3n - 1`), and
/// the cylinder framework carries a unique equilibrium stress which is
/// nonzero on some loop; straightening that loop's normal to `(0,0,1)`
/// removes the last motion.  Both ranks and the stress support are checked
/// exactly, resampling `p` on any failure.
fn cylinder_realization(g: &LoopedGraph, seed: u64) -> Result<Framework, ConstructError> {
    let lifted = g.add_uniform_loops(1);
    let n = g.n();
    for attempt in 0..RETRY_CAP {
        let mut rng = sampling::rng_for(seed, attempt as u64);
        let p: Vec<Vec<BigRational>> =
            (0..n).map(|_| (0..3).map(|_| sampling::sample_rational(&mut rng)).collect()).collect();
        let q: Vec<Vec<BigRational>> = (0..n)
            .map(|v| {
                vec![
                    &p[v][0] * rat_int(2),
                    &p[v][1] * rat_int(4),
                    BigRational::zero(),
                ]
            })
            .collect();
        let fw = Framework::new(lifted.clone(), 3, p, q)?;
        if fw.rigidity_matrix().rank() != 3 * n - 1 {
            continue;
        }
        // the single remaining motion must be the vertical translation
        let motions = fw.motions();
        debug_assert_eq!(motions.len(), 1);
        let ok = motions[0].iter().all(|vel| {
            vel[0].is_zero() && vel[1].is_zero() && vel[2] == motions[0][0][2]
        }) && !motions[0][0][2].is_zero();
        if !ok {
            continue;
        }
        let stresses = fw.stresses();
        debug_assert_eq!(stresses.len(), 1);
        let Some((&f, _)) = stresses[0].lambda.iter().find(|(_, c)| !c.is_zero()) else {
            continue;
        };
        let mut fixed = fw;
        fixed
            .set_normal(f, vec![BigRational::zero(), BigRational::zero(), rat_int(1)])
            .expect("normal has length 3");
        if fixed.rigidity_matrix().rank() == 3 * n {
            return Ok(fixed);
        }
    }
    Err(ConstructError::RetriesExhausted(RETRY_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c3_with_loops() -> LoopedGraph {
        LoopedGraph::from_parts(3, vec![(0, 1), (1, 2), (0, 2)], vec![0, 1, 2]).unwrap()
    }

    #[test]
    fn reduce_k5_moves_two_loops() {
        let k5 = LoopedGraph::complete(5);
        let (h, step) = reduce_vertex(&k5, 2, 0).unwrap();
        assert_eq!(step.k, 2);
        assert_eq!(h.n(), 4);
        assert_eq!(h.edge_count(), 6);
        assert_eq!(h.loop_count(), 2);
        assert_eq!(step.receivers.len(), 2);
        assert!(step.receivers.iter().all(|&u| (1..5).contains(&u)));
        assert!(is_tight(&h, SparsityParams::new(2, 0).unwrap()));
    }

    #[test]
    fn reduce_degree_t_vertex_drops_it() {
        // pendant vertex 1 tied to a doubly-looped vertex 0 by two edges
        let g = LoopedGraph::from_parts(2, vec![(0, 1), (0, 1)], vec![0, 0]).unwrap();
        let (h, step) = reduce_vertex(&g, 2, 1).unwrap();
        assert_eq!(step.k, 0);
        assert_eq!(h.n(), 1);
        assert_eq!(h.loop_count(), 2);
    }

    #[test]
    fn reduce_looped_triangle() {
        let (h, step) = reduce_vertex(&c3_with_loops(), 2, 0).unwrap();
        assert_eq!(step.k, 1);
        assert_eq!(h.loop_count(), 3);
        assert!(is_tight(&h, SparsityParams::new(2, 0).unwrap()));
    }

    #[test]
    fn reduce_rejects_non_tight_input() {
        assert!(matches!(
            reduce_vertex(&LoopedGraph::cycle(4), 2, 0),
            Err(ConstructError::NotTight { t: 2 })
        ));
    }

    #[test]
    fn extension_round_trips_after_lift() {
        for (g, v) in [
            (LoopedGraph::complete(5), 0),
            (c3_with_loops(), 0),
            (LoopedGraph::from_parts(2, vec![(0, 1)], vec![0, 0, 1]).unwrap(), 1),
        ] {
            let t = 2;
            let d = 4;
            let (h, step) = reduce_vertex(&g, t, v).unwrap();
            let ext = step.to_extension(&g, d);
            let rebuilt = apply_extension(&h.add_uniform_loops(d - t), &ext).unwrap();
            let sigma = extension_sigma(rebuilt.n(), v);
            assert_eq!(rebuilt.relabel(&sigma), g.add_uniform_loops(d - t));
        }
    }

    #[test]
    fn extension_proviso_errors_are_specific() {
        let h = LoopedGraph::from_parts(2, vec![], vec![0, 1]).unwrap();
        let base = ExtensionData {
            d: 2,
            deleted_loops: vec![LoopId(0), LoopId(1)],
            edge_targets: vec![0, 1],
            new_loop_count: 2,
        };
        assert!(base.validate(&h).is_ok());

        let mut e = base.clone();
        e.new_loop_count = 1;
        assert!(matches!(e.validate(&h), Err(ConstructError::TooFewNewLoops { .. })));

        let mut e = base.clone();
        e.edge_targets = vec![0];
        assert!(matches!(e.validate(&h), Err(ConstructError::MissingEdgeToReceiver { vertex: 1 })));

        let mut e = base.clone();
        e.new_loop_count = 3;
        assert!(matches!(e.validate(&h), Err(ConstructError::TooManyNewLoops { .. })));

        // k = 2 exceeds d = 1: with both receivers wired up the element
        // count cannot work out
        let e = ExtensionData {
            d: 1,
            deleted_loops: vec![LoopId(0), LoopId(1)],
            edge_targets: vec![0, 1],
            new_loop_count: 2,
        };
        assert!(e.validate(&h).is_err());

        let h2 = LoopedGraph::from_parts(1, vec![], vec![0, 0]).unwrap();
        let e = ExtensionData {
            d: 2,
            deleted_loops: vec![LoopId(0), LoopId(1)],
            edge_targets: vec![0],
            new_loop_count: 2,
        };
        assert!(matches!(e.validate(&h2), Err(ConstructError::DeletedLoopsShareVertex)));
    }

    #[test]
    fn geometric_extension_zero_loop_case() {
        // base: one vertex pinned by the standard basis of the plane
        let g = LoopedGraph::from_parts(1, vec![], vec![0, 0]).unwrap();
        let fh = sample_rigid_framework(&g, 2, 3).unwrap();
        let ext = ExtensionData {
            d: 2,
            deleted_loops: vec![],
            edge_targets: vec![0],
            new_loop_count: 1,
        };
        let fw = geometric_extension(&fh, &ext, 17).unwrap();
        assert_eq!(fw.graph().n(), 2);
        assert!(fw.is_inf_rigid());
    }

    #[test]
    fn geometric_extension_reverses_triangle_reduction() {
        let g = c3_with_loops();
        let (h, step) = reduce_vertex(&g, 2, 0).unwrap();
        let lifted_h = h.add_uniform_loops(1);
        let fh = sample_rigid_framework(&lifted_h, 3, 5).unwrap();
        let ext = step.to_extension(&g, 3);
        let fw = geometric_extension(&fh, &ext, 29).unwrap();
        assert_eq!(fw.rigidity_matrix().rank(), 9);
        let target = g.add_uniform_loops(1);
        let moved = transfer_framework(&fw, &target, &extension_sigma(fw.graph().n(), 0)).unwrap();
        assert!(moved.is_inf_rigid());
    }

    #[test]
    fn geometric_extension_enforces_receiver_loop_floor() {
        // two receivers with one loop each cannot support a 2-loop
        // extension in dimension 4 (floor is 2)
        let h = LoopedGraph::from_parts(2, vec![(0, 1)], vec![0, 1, 0]).unwrap();
        let fh = crate::rigidity::random_framework(&h, 4, 1, 0);
        let ext = ExtensionData {
            d: 4,
            deleted_loops: vec![LoopId(0), LoopId(1)],
            edge_targets: vec![0, 1],
            new_loop_count: 4,
        };
        assert!(matches!(
            geometric_extension(&fh, &ext, 0),
            Err(ConstructError::TooFewReceiverLoops { .. })
        ));
    }

    #[test]
    fn zero_extension_chain_builds_rigid_path() {
        let d = 2;
        let seed = LoopedGraph::from_parts(1, vec![], vec![0, 0]).unwrap();
        let mut fw = sample_rigid_framework(&seed, d, 11).unwrap();
        for step in 0..3 {
            let normal: Vec<BigRational> = vec![rat_int(1 + step as i64), rat_int(2)];
            fw = zero_extension(&fw, &[fw.graph().n() - 1], &[normal], 100 + step as u64).unwrap();
            assert!(fw.is_inf_rigid());
        }
        assert_eq!(fw.graph().n(), 4);
        assert_eq!(fw.rigidity_matrix().rank(), 8);
    }

    #[test]
    fn zero_extension_rejects_bad_shapes() {
        let seed = LoopedGraph::from_parts(1, vec![], vec![0, 0]).unwrap();
        let fw = sample_rigid_framework(&seed, 2, 1).unwrap();
        // d + 1 loops
        let too_many = vec![vec![rat_int(1), rat_int(0)]; 3];
        assert!(matches!(
            zero_extension(&fw, &[], &too_many, 0),
            Err(ConstructError::ExtensionCount { .. })
        ));
        // dependent prescribed normals can never complete
        let dependent = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert!(matches!(
            zero_extension(&fw, &[], &dependent, 0),
            Err(ConstructError::ImpossibleIndependence(_))
        ));
    }

    #[test]
    fn realize_main_base_case() {
        let g = LoopedGraph::from_parts(1, vec![], vec![0, 0]).unwrap();
        let r = realize_rigid_main(&g, 4, 2, 7).unwrap();
        assert_eq!(r.framework.graph().loop_count(), 4);
        assert_eq!(r.framework.rigidity_matrix().rank(), 4);
        assert!(r.steps.is_empty());
    }

    #[test]
    fn realize_main_looped_triangle() {
        let r = realize_rigid_main(&c3_with_loops(), 4, 2, 7).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 12);
        assert_eq!(r.steps.len(), 2);
    }

    #[test]
    fn realize_main_k5() {
        let r = realize_rigid_main(&LoopedGraph::complete(5), 4, 2, 7).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 20);
        assert_eq!(r.framework.graph().loop_count(), 10);
        assert_eq!(r.steps.len(), 4);
    }

    #[test]
    fn realize_main_validates_input() {
        assert!(matches!(
            realize_rigid_main(&c3_with_loops(), 3, 2, 0),
            Err(ConstructError::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            realize_rigid_main(&LoopedGraph::cycle(4), 4, 2, 0),
            Err(ConstructError::NotTight { .. })
        ));
        let doubled = LoopedGraph::from_parts(2, vec![(0, 1), (0, 1)], vec![0, 1]).unwrap();
        assert!(matches!(
            realize_rigid_main(&doubled, 4, 2, 0),
            Err(ConstructError::NotLoopedSimple)
        ));
    }

    #[test]
    fn plane_realization_by_reduction() {
        let r = realize_plane_3d(&c3_with_loops(), 13).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 9);
        assert!(!r.steps.is_empty());
    }

    #[test]
    fn plane_realization_with_degree_two_vertex() {
        let g = LoopedGraph::from_parts(2, vec![(0, 1)], vec![0, 0, 1]).unwrap();
        let r = realize_plane_3d(&g, 13).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 6);
    }

    #[test]
    fn plane_realization_of_octahedron_uses_cylinder() {
        let mut g = LoopedGraph::new(6);
        for u in 0..6 {
            for v in (u + 1)..6 {
                if u / 2 != v / 2 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let r = realize_plane_3d(&g, 21).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 18);
        assert!(r.steps.is_empty(), "4-regular case needs no reductions");
    }

    #[test]
    fn plane_realization_rejects_k5() {
        assert!(matches!(
            realize_plane_3d(&LoopedGraph::complete(5), 0),
            Err(ConstructError::ContainsK5(_))
        ));
    }

    #[test]
    fn plane_realization_handles_disconnected_input() {
        let g = LoopedGraph::from_parts(2, vec![], vec![0, 0, 1, 1]).unwrap();
        let r = realize_plane_3d(&g, 3).unwrap();
        assert_eq!(r.framework.rigidity_matrix().rank(), 6);
    }

    #[test]
    fn affine_subspace_basics() {
        let a = AffineSubspace::new(
            vec![rat_int(1), rat_int(0)],
            &[vec![rat_int(0), rat_int(1)], vec![rat_int(0), rat_int(2)]],
        );
        assert_eq!(a.dim(), 1);
        assert!(a.contains(&[rat_int(1), rat_int(5)]));
        assert!(!a.contains(&[rat_int(2), rat_int(0)]));
        let line = AffineSubspace::span_of_points(&[
            vec![rat_int(0), rat_int(0)],
            vec![rat_int(2), rat_int(2)],
        ])
        .unwrap();
        assert!(line.contains(&[rat_int(3), rat_int(3)]));
        assert!(AffineSubspace::span_of_points(&[]).is_none());
    }

    /// Random `(t,0)`-tight looped-simple graphs, built by lifting a random
    /// graph (so a tight spanning subgraph always exists) and extracting it.
    fn tight_graph(t: usize) -> impl Strategy<Value = LoopedGraph> {
        (1usize..=4).prop_flat_map(move |n| {
            proptest::collection::vec((0..n, 0..n), 0..=6).prop_map(move |edges| {
                let edges: Vec<(usize, usize)> =
                    edges.into_iter().filter(|(u, v)| u != v).collect();
                let g = LoopedGraph::from_parts(n, edges, vec![]).unwrap().add_uniform_loops(t);
                crate::sparsity::find_tight_spanning_subgraph(&g, t)
                    .expect("lifted graph always has full rank")
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reduction_round_trip_is_isomorphic(g in tight_graph(2), v in 0usize..4) {
            let v = v.min(g.n() - 1);
            let (h, step) = reduce_vertex(&g, 2, v).unwrap();
            prop_assert!(is_tight(&h, SparsityParams::new(2, 0).unwrap()));
            let ext = step.to_extension(&g, 4);
            let rebuilt = apply_extension(&h.add_uniform_loops(2), &ext).unwrap();
            let sigma = extension_sigma(rebuilt.n(), v);
            prop_assert_eq!(rebuilt.relabel(&sigma), g.add_uniform_loops(2));
        }

        #[test]
        fn realized_tight_graphs_are_rigid(g in tight_graph(1), seed in 0u64..32) {
            let r = realize_rigid_main(&g, 2, 1, seed).unwrap();
            prop_assert_eq!(r.framework.rigidity_matrix().rank(), 2 * g.n());
            // trace length matches the recursion depth
            prop_assert_eq!(r.steps.len(), g.n() - 1);
        }
    }
}
