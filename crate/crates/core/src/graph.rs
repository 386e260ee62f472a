//! Multigraphs with loops: the combinatorial side of a linearly constrained
//! framework.
//!
//! A [`LoopedGraph`] stores a vertex count `n` together with a multiset of
//! edges (unordered pairs of distinct vertices) and a multiset of loops
//! (single vertices).  Edges and loops are *instances*: two parallel edges are
//! distinct objects with distinct ids, and a vertex may carry any number of
//! loops.  Ids are dense insertion indices ([`EdgeId`]`(i)` is the `i`-th edge
//! added), which makes subgraph extraction and serialization unambiguous.
//!
//! Two degree notions coexist and are easy to confuse:
//! * [`LoopedGraph::delta`] counts incident elements, loops **once**;
//! * [`LoopedGraph::deg`] is the classical degree, loops counted **twice**.
//!
//! Equality is multiset equality: two graphs compare equal when they have the
//! same vertex count and the same multisets of edges and loops, regardless of
//! the order in which instances were added.
//!
//! The JSON form is `{"n": int, "edges": [[u,v], ...], "loops": [v, ...]}`;
//! array order determines instance ids and duplicates are meaningful.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

/// Index of an edge instance within its graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

/// Index of a loop instance within its graph.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LoopId(pub usize);

/// Errors raised while building or deserializing a graph.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("edge endpoints must be distinct, got ({0}, {0}); loops are listed separately")]
    EdgeIsLoop(usize),
    #[error("unknown edge id {0}")]
    UnknownEdge(usize),
    #[error("unknown loop id {0}")]
    UnknownLoop(usize),
}

/// A finite multigraph with loops.
///
/// Pure value semantics: structural operations (`add_uniform_loops`,
/// `delete_vertex`, `extract`, `relabel`) return new graphs; the `add_*`
/// builder methods mutate in place and hand back the fresh instance id.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct LoopedGraph {
    n: usize,
    /// Edge instances, endpoints normalized to `u < v`; index = `EdgeId`.
    edges: Vec<(usize, usize)>,
    /// Loop instances, one vertex each; index = `LoopId`.
    loops: Vec<usize>,
}

/// Serialized form of [`LoopedGraph`].
#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
    loops: Vec<usize>,
}

impl TryFrom<GraphJson> for LoopedGraph {
    type Error = GraphError;
    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        LoopedGraph::from_parts(
            j.n,
            j.edges.iter().map(|e| (e[0], e[1])).collect(),
            j.loops,
        )
    }
}

impl From<LoopedGraph> for GraphJson {
    fn from(g: LoopedGraph) -> GraphJson {
        GraphJson {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
            loops: g.loops,
        }
    }
}

impl PartialEq for LoopedGraph {
    /// Multiset equality: instance ids and insertion order do not matter.
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n {
            return false;
        }
        let mut a = self.edges.clone();
        let mut b = other.edges.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return false;
        }
        let mut a = self.loops.clone();
        let mut b = other.loops.clone();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

impl Eq for LoopedGraph {}

impl LoopedGraph {
    /// Empty graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        LoopedGraph { n, edges: Vec::new(), loops: Vec::new() }
    }

    /// Build from explicit edge and loop lists, validating endpoints.
    pub fn from_parts(
        n: usize,
        edges: Vec<(usize, usize)>,
        loops: Vec<usize>,
    ) -> Result<Self, GraphError> {
        let mut g = LoopedGraph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        for v in loops {
            g.add_loop(v)?;
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut g = LoopedGraph::new(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v).expect("complete graph endpoints are in range");
            }
        }
        g
    }

    /// Cycle `0 - 1 - ... - (n-1) - 0`; requires `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle graphs need at least 3 vertices");
        let mut g = LoopedGraph::new(n);
        for u in 0..n {
            g.add_edge(u, (u + 1) % n).expect("cycle endpoints are in range");
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn loop_count(&self) -> usize {
        self.loops.len()
    }

    /// `|E| + |L|`, the number of element instances.
    pub fn size(&self) -> usize {
        self.edges.len() + self.loops.len()
    }

    /// Endpoints of an edge, normalized to `u < v`.
    pub fn edge(&self, e: EdgeId) -> (usize, usize) {
        self.edges[e.0]
    }

    /// Vertex carrying a loop.
    pub fn loop_vertex(&self, l: LoopId) -> usize {
        self.loops[l.0]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, (usize, usize))> + '_ {
        self.edges.iter().enumerate().map(|(i, &uv)| (EdgeId(i), uv))
    }

    pub fn loops(&self) -> impl Iterator<Item = (LoopId, usize)> + '_ {
        self.loops.iter().enumerate().map(|(i, &v)| (LoopId(i), v))
    }

    /// Append an edge instance; endpoints must be distinct and in range.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::EdgeIsLoop(u));
        }
        for &w in &[u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        self.edges.push((u.min(v), u.max(v)));
        Ok(EdgeId(self.edges.len() - 1))
    }

    /// Append a loop instance at `v`.
    pub fn add_loop(&mut self, v: usize) -> Result<LoopId, GraphError> {
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: self.n });
        }
        self.loops.push(v);
        Ok(LoopId(self.loops.len() - 1))
    }

    /// New graph with `k` extra loops at every vertex.
    ///
    /// Existing instances keep their ids; the new loops are appended in
    /// vertex-major order, so the `j`-th new loop at vertex `v` has id
    /// `loop_count() + v*k + j`.  Composes additively:
    /// `g.add_uniform_loops(a).add_uniform_loops(b) == g.add_uniform_loops(a+b)`
    /// as multisets.
    pub fn add_uniform_loops(&self, k: usize) -> Self {
        let mut g = self.clone();
        for v in 0..self.n {
            for _ in 0..k {
                g.loops.push(v);
            }
        }
        g
    }

    /// Number of incident element instances, loops counted once.
    pub fn delta(&self, v: usize) -> usize {
        let e = self.edges.iter().filter(|&&(a, b)| a == v || b == v).count();
        e + self.loops_at(v).len()
    }

    /// Classical degree: loops counted twice.
    pub fn deg(&self, v: usize) -> usize {
        self.delta(v) + self.loops_at(v).len()
    }

    /// Loop instances at `v`, ascending by id.
    pub fn loops_at(&self, v: usize) -> Vec<LoopId> {
        self.loops
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w == v)
            .map(|(i, _)| LoopId(i))
            .collect()
    }

    /// Edge instances incident to `v`, ascending by id.
    pub fn edges_at(&self, v: usize) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|&(_, &(a, b))| a == v || b == v)
            .map(|(i, _)| EdgeId(i))
            .collect()
    }

    /// Distinct vertices joined to `v` by at least one edge.
    pub fn neighbours(&self, v: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.insert(b);
            } else if b == v {
                out.insert(a);
            }
        }
        out
    }

    /// True when no two edges share the same endpoint pair (loops are free).
    pub fn is_looped_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|&uv| seen.insert(uv))
    }

    /// Connected components as sorted vertex lists, sorted by first vertex.
    /// Only edges connect; a vertex with loops but no edges is its own
    /// component.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(v) = stack.pop() {
                for &(a, b) in &self.edges {
                    let w = if a == v {
                        b
                    } else if b == v {
                        a
                    } else {
                        continue;
                    };
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for v in 0..self.n {
            out[comp[v]].push(v);
        }
        out
    }

    /// A cycle is a nonempty connected graph in which every vertex has
    /// classical degree two: a single loop (length 1), a parallel edge pair
    /// (length 2) or a simple cycle (length >= 3).
    pub fn is_cycle(&self) -> bool {
        self.n >= 1
            && self.size() >= 1
            && (0..self.n).all(|v| self.deg(v) == 2)
            && self.components().len() == 1
    }

    /// All cycle subgraphs with at most `max_len` elements, as element sets in
    /// deterministic (sorted) order.  Parallel edge instances give distinct
    /// cycles.
    pub fn enumerate_cycles(&self, max_len: usize) -> Vec<EdgeOrLoopSet> {
        let mut found: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();
        if max_len >= 1 {
            for (l, _) in self.loops() {
                found.insert((Vec::new(), vec![l.0]));
            }
        }
        if max_len >= 2 {
            for (e, uv) in self.edges() {
                for (f, xy) in self.edges() {
                    if e < f && uv == xy {
                        found.insert((vec![e.0, f.0], Vec::new()));
                    }
                }
            }
        }
        if max_len >= 3 {
            // Depth-first closed walks: the start vertex is the smallest on the
            // cycle, every other vertex is visited once, edge instances are
            // chosen explicitly so parallel copies yield distinct cycles.
            // Orientation duplicates collapse in the `found` set.
            let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.n];
            for (i, &(u, v)) in self.edges.iter().enumerate() {
                incident[u].push((v, i));
                incident[v].push((u, i));
            }
            for adj in &mut incident {
                adj.sort_unstable();
            }
            for s in 0..self.n {
                let mut on_path = vec![false; self.n];
                on_path[s] = true;
                let mut path_edges = Vec::new();
                self.cycle_dfs(s, s, max_len, &incident, &mut on_path, &mut path_edges, &mut found);
            }
        }
        found
            .into_iter()
            .map(|(es, ls)| EdgeOrLoopSet {
                edges: es.into_iter().map(EdgeId).collect(),
                loops: ls.into_iter().map(LoopId).collect(),
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn cycle_dfs(
        &self,
        v: usize,
        s: usize,
        max_len: usize,
        incident: &[Vec<(usize, usize)>],
        on_path: &mut Vec<bool>,
        path_edges: &mut Vec<usize>,
        found: &mut BTreeSet<(Vec<usize>, Vec<usize>)>,
    ) {
        for &(w, e) in &incident[v] {
            if path_edges.contains(&e) {
                continue;
            }
            if w == s && path_edges.len() >= 2 {
                let mut cyc = path_edges.clone();
                cyc.push(e);
                cyc.sort_unstable();
                found.insert((cyc, Vec::new()));
            } else if w > s && !on_path[w] && path_edges.len() + 1 < max_len {
                on_path[w] = true;
                path_edges.push(e);
                self.cycle_dfs(w, s, max_len, incident, on_path, path_edges, found);
                path_edges.pop();
                on_path[w] = false;
            }
        }
    }

    /// Vertex 5-sets whose simple support induces a complete graph, in
    /// lexicographic order.
    pub fn find_k5_subgraphs(&self) -> Vec<[usize; 5]> {
        use itertools::Itertools;
        let adj = self.simple_adjacency();
        (0..self.n)
            .combinations(5)
            .filter(|vs| {
                vs.iter()
                    .tuple_combinations()
                    .all(|(&a, &b)| adj[a].contains(&b))
            })
            .map(|vs| [vs[0], vs[1], vs[2], vs[3], vs[4]])
            .collect()
    }

    /// Adjacency of the simple support (parallel edges collapsed).
    pub fn simple_adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }

    /// Delete a vertex along with all incident elements.  Remaining vertices
    /// are renumbered compactly; returns the old-to-new vertex map (`None`
    /// at the deleted vertex).
    pub fn delete_vertex(&self, v: usize) -> (Self, Vec<Option<usize>>) {
        assert!(v < self.n, "vertex {v} out of range");
        let map: Vec<Option<usize>> = (0..self.n)
            .map(|u| match u.cmp(&v) {
                std::cmp::Ordering::Less => Some(u),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(u - 1),
            })
            .collect();
        let mut g = LoopedGraph::new(self.n - 1);
        for &(a, b) in &self.edges {
            if let (Some(a2), Some(b2)) = (map[a], map[b]) {
                g.edges.push((a2.min(b2), a2.max(b2)));
            }
        }
        for &w in &self.loops {
            if let Some(w2) = map[w] {
                g.loops.push(w2);
            }
        }
        (g, map)
    }

    /// Subgraph on the same vertex set consisting of the given elements.
    /// Returns the graph plus, for each new instance, the id it had here.
    pub fn extract(&self, set: &EdgeOrLoopSet) -> Result<(Self, Vec<EdgeId>, Vec<LoopId>), GraphError> {
        let mut g = LoopedGraph::new(self.n);
        let mut edge_ids = Vec::new();
        let mut loop_ids = Vec::new();
        for &e in &set.edges {
            let &(u, v) = self.edges.get(e.0).ok_or(GraphError::UnknownEdge(e.0))?;
            g.edges.push((u, v));
            edge_ids.push(e);
        }
        for &l in &set.loops {
            let &v = self.loops.get(l.0).ok_or(GraphError::UnknownLoop(l.0))?;
            g.loops.push(v);
            loop_ids.push(l);
        }
        Ok((g, edge_ids, loop_ids))
    }

    /// Rename vertices by a bijection `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut seen = vec![false; self.n];
        for &p in perm {
            assert!(p < self.n && !seen[p], "perm must be a bijection");
            seen[p] = true;
        }
        let mut g = LoopedGraph::new(self.n);
        for &(u, v) in &self.edges {
            let (a, b) = (perm[u], perm[v]);
            g.edges.push((a.min(b), a.max(b)));
        }
        for &v in &self.loops {
            g.loops.push(perm[v]);
        }
        g
    }

    /// The element set containing every edge and loop.
    pub fn full_set(&self) -> EdgeOrLoopSet {
        EdgeOrLoopSet {
            edges: (0..self.edges.len()).map(EdgeId).collect(),
            loops: (0..self.loops.len()).map(LoopId).collect(),
        }
    }
}

/// A set of element instances of some graph, the `F ⊆ E ∪ L` of the counting
/// conditions.  Vertex support comes from [`EdgeOrLoopSet::vertex_set`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeOrLoopSet {
    pub edges: BTreeSet<EdgeId>,
    pub loops: BTreeSet<LoopId>,
}

impl EdgeOrLoopSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn size(&self) -> usize {
        self.edges.len() + self.loops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.loops.is_empty()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn contains_loop(&self, l: LoopId) -> bool {
        self.loops.contains(&l)
    }

    /// Vertices touched by at least one member element.
    pub fn vertex_set(&self, g: &LoopedGraph) -> BTreeSet<usize> {
        let mut vs = BTreeSet::new();
        for &e in &self.edges {
            let (u, v) = g.edge(e);
            vs.insert(u);
            vs.insert(v);
        }
        for &l in &self.loops {
            vs.insert(g.loop_vertex(l));
        }
        vs
    }

    pub fn is_subset(&self, other: &EdgeOrLoopSet) -> bool {
        self.edges.is_subset(&other.edges) && self.loops.is_subset(&other.loops)
    }

    pub fn union(&self, other: &EdgeOrLoopSet) -> EdgeOrLoopSet {
        EdgeOrLoopSet {
            edges: self.edges.union(&other.edges).copied().collect(),
            loops: self.loops.union(&other.loops).copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_with_loop() -> LoopedGraph {
        // triangle 0-1-2 plus a loop at 0
        LoopedGraph::from_parts(3, vec![(0, 1), (1, 2), (0, 2)], vec![0]).unwrap()
    }

    #[test]
    fn degree_counts_loops_twice_delta_once() {
        let g = triangle_with_loop();
        assert_eq!(g.delta(0), 3);
        assert_eq!(g.deg(0), 4);
        assert_eq!(g.delta(1), 2);
        assert_eq!(g.deg(1), 2);
    }

    #[test]
    fn handshake_sum() {
        let g = triangle_with_loop();
        let total: usize = (0..g.n()).map(|v| g.deg(v)).sum();
        assert_eq!(total, 2 * g.size());
    }

    #[test]
    fn uniform_loops_append_vertex_major() {
        let g = triangle_with_loop().add_uniform_loops(2);
        assert_eq!(g.loop_count(), 7);
        // original loop keeps id 0; new loops at vertex v start at 1 + 2v
        assert_eq!(g.loop_vertex(LoopId(0)), 0);
        assert_eq!(g.loop_vertex(LoopId(1)), 0);
        assert_eq!(g.loop_vertex(LoopId(3)), 1);
        assert_eq!(g.loop_vertex(LoopId(5)), 2);
        assert_eq!(g.delta(0), 5);
    }

    #[test]
    fn uniform_loops_compose() {
        let g = triangle_with_loop();
        assert_eq!(g.add_uniform_loops(1).add_uniform_loops(2), g.add_uniform_loops(3));
    }

    #[test]
    fn loops_do_not_connect_components() {
        let g = LoopedGraph::from_parts(3, vec![], vec![0, 1, 1]).unwrap();
        assert_eq!(g.components(), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn cycle_shapes() {
        let single_loop = LoopedGraph::from_parts(1, vec![], vec![0]).unwrap();
        assert!(single_loop.is_cycle());
        let parallel_pair = LoopedGraph::from_parts(2, vec![(0, 1), (0, 1)], vec![]).unwrap();
        assert!(parallel_pair.is_cycle());
        assert!(LoopedGraph::cycle(3).is_cycle());
        assert!(!triangle_with_loop().is_cycle());
        assert!(!LoopedGraph::new(0).is_cycle());
        assert!(!LoopedGraph::new(1).is_cycle());
    }

    #[test]
    fn k4_has_seven_cycles() {
        // four triangles plus three quadrilaterals
        let cycles = LoopedGraph::complete(4).enumerate_cycles(4);
        assert_eq!(cycles.len(), 7);
        assert_eq!(cycles.iter().filter(|c| c.size() == 3).count(), 4);
        assert_eq!(cycles.iter().filter(|c| c.size() == 4).count(), 3);
    }

    #[test]
    fn parallel_instances_give_distinct_cycles() {
        let mut g = LoopedGraph::cycle(3);
        g.add_edge(0, 1).unwrap(); // second copy of 0-1
        let cycles = g.enumerate_cycles(3);
        // one 2-cycle on the parallel pair, two triangles (one per 0-1 copy)
        assert_eq!(cycles.iter().filter(|c| c.size() == 2).count(), 1);
        assert_eq!(cycles.iter().filter(|c| c.size() == 3).count(), 2);
    }

    #[test]
    fn max_len_caps_enumeration() {
        let g = LoopedGraph::cycle(5);
        assert!(g.enumerate_cycles(4).is_empty());
        assert_eq!(g.enumerate_cycles(5).len(), 1);
    }

    #[test]
    fn k5_detection() {
        assert_eq!(LoopedGraph::complete(5).find_k5_subgraphs(), vec![[0, 1, 2, 3, 4]]);
        assert_eq!(LoopedGraph::complete(6).find_k5_subgraphs().len(), 6);
        let mut k5_minus = LoopedGraph::complete(5);
        k5_minus.edges.remove(0);
        assert!(k5_minus.find_k5_subgraphs().is_empty());
        // loops and parallel copies do not create adjacency
        let g = LoopedGraph::from_parts(5, vec![(0, 1), (0, 1)], vec![2, 3]).unwrap();
        assert!(g.find_k5_subgraphs().is_empty());
    }

    #[test]
    fn delete_vertex_renumbers_compactly() {
        let g = triangle_with_loop();
        let (h, map) = g.delete_vertex(1);
        assert_eq!(map, vec![Some(0), None, Some(1)]);
        assert_eq!(h.n(), 2);
        assert_eq!(h.edge_count(), 1); // only 0-2 survives, as 0-1
        assert_eq!(h.edge(EdgeId(0)), (0, 1));
        assert_eq!(h.loop_count(), 1);
    }

    #[test]
    fn extract_preserves_vertex_count_and_reports_ids() {
        let g = triangle_with_loop();
        let mut set = EdgeOrLoopSet::empty();
        set.edges.insert(EdgeId(2));
        set.loops.insert(LoopId(0));
        let (h, eids, lids) = g.extract(&set).unwrap();
        assert_eq!(h.n(), 3);
        assert_eq!(h.edge(EdgeId(0)), (0, 2));
        assert_eq!(eids, vec![EdgeId(2)]);
        assert_eq!(lids, vec![LoopId(0)]);
        assert_eq!(set.vertex_set(&g).into_iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn equality_ignores_instance_order() {
        let a = LoopedGraph::from_parts(3, vec![(0, 1), (1, 2)], vec![2, 0]).unwrap();
        let b = LoopedGraph::from_parts(3, vec![(2, 1), (1, 0)], vec![0, 2]).unwrap();
        assert_eq!(a, b);
        let c = LoopedGraph::from_parts(3, vec![(0, 1), (1, 2), (0, 1)], vec![0, 2]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = triangle_with_loop();
        let s = serde_json::to_string(&g).unwrap();
        let h: LoopedGraph = serde_json::from_str(&s).unwrap();
        assert_eq!(g, h);

        let bad: Result<LoopedGraph, _> = serde_json::from_str(r#"{"n":2,"edges":[[0,0]],"loops":[]}"#);
        assert!(bad.is_err());
        let bad: Result<LoopedGraph, _> = serde_json::from_str(r#"{"n":2,"edges":[],"loops":[2]}"#);
        assert!(bad.is_err());
    }
}
