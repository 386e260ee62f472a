//! `(k, l)`-sparsity counts and the machinery built on them.
//!
//! A graph is `(k, l)`-sparse when every nonempty element set `F` (edges and
//! loops together) satisfies `|F| <= k |V_F| - l`, and `(k, l)`-tight when in
//! addition the whole graph meets the count with equality.  For `0 <= l < 2k`
//! these sets form the independent sets of a matroid, and ranks here are
//! computed by a pebble game extended to loops: every vertex starts with `k`
//! pebbles, an edge needs `l + 1` pebbles across its endpoints to go in, a
//! loop needs `l + 1` at its own vertex, and pebbles travel backwards along
//! reversed directed paths.  Note a loop can only ever be inserted when
//! `l < k`, matching the count for a one-loop set.
//!
//! Decisions come with checkable receipts ([`SparsityCertificate`]): a full
//! orientation with per-vertex pebble counts on success, or an explicitly
//! overcounted element set on failure.  A brute-force subset enumerator
//! ([`is_sparse_bruteforce`]) provides an independent answer at small scale.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, EdgeOrLoopSet, LoopId, LoopedGraph};

/// Element budget for subset-enumeration backends.
pub const BRUTE_FORCE_MAX: usize = 24;
/// Vertex budget for the exhaustive K5-avoiding search.
pub const K5FREE_MAX_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SparsityError {
    #[error("sparsity parameters k={k}, l={l} out of range (need k >= 1 and l < 2k)")]
    InvalidParams { k: usize, l: usize },
    #[error("problem size {size} exceeds the exhaustive-search budget of {max}")]
    ScaleExceeded { size: usize, max: usize },
    #[error("graph is not ({k},{l})-sparse")]
    NotSparse { k: usize, l: usize },
    #[error("tight closure is only defined for l = 0, got l = {l}")]
    UnsupportedParams { l: usize },
    #[error("closure seed must be a nonempty tight element set of the graph")]
    InvalidSeed,
}

/// The pair `(k, l)` of a sparsity count, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SparsityParams {
    k: usize,
    l: usize,
}

impl SparsityParams {
    /// Requires `k >= 1` and `l < 2k` (the matroidal range).
    pub fn new(k: usize, l: usize) -> Result<Self, SparsityError> {
        if k >= 1 && l < 2 * k {
            Ok(SparsityParams { k, l })
        } else {
            Err(SparsityError::InvalidParams { k, l })
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// The count bound `k * nv - l` for a set touching `nv` vertices.
    pub fn bound(&self, nv: usize) -> isize {
        (self.k * nv) as isize - self.l as isize
    }
}

/// Does `set` overcount, i.e. `|F| > k |V_F| - l`?
pub fn violates(g: &LoopedGraph, set: &EdgeOrLoopSet, params: SparsityParams) -> bool {
    set.size() as isize > params.bound(set.vertex_set(g).len())
}

/// Final state of a successful pebble-game run: a direction for every
/// element and the leftover pebbles.  Loops are always directed at their own
/// vertex, so listing them is enough.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PebbleOrientation {
    /// Tail vertex of every edge, keyed by edge id.
    pub edge_tails: BTreeMap<EdgeId, usize>,
    /// Every loop, each holding one pebble at its vertex.
    pub loops: BTreeSet<LoopId>,
    /// Free pebbles per vertex.
    pub pebbles: Vec<usize>,
}

impl PebbleOrientation {
    /// Check the orientation covers the whole graph, tails are legal, and
    /// the invariant `out-degree(v) + pebbles(v) = k` holds everywhere.
    pub fn validate(&self, g: &LoopedGraph, params: SparsityParams) -> bool {
        if self.pebbles.len() != g.n() {
            return false;
        }
        if self.edge_tails.len() != g.edge_count() || self.loops.len() != g.loop_count() {
            return false;
        }
        let mut outdeg = vec![0usize; g.n()];
        for (e, (u, v)) in g.edges() {
            match self.edge_tails.get(&e) {
                Some(&t) if t == u || t == v => outdeg[t] += 1,
                _ => return false,
            }
        }
        for (l, v) in g.loops() {
            if !self.loops.contains(&l) {
                return false;
            }
            outdeg[v] += 1;
        }
        (0..g.n()).all(|v| outdeg[v] + self.pebbles[v] == params.k())
    }
}

/// Outcome of a sparsity check, with enough data to re-verify the verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SparsityCertificate {
    Sparse { orientation: PebbleOrientation },
    Violation { violation: EdgeOrLoopSet },
}

impl SparsityCertificate {
    /// Recheck the certificate against the graph from scratch.
    pub fn validate(&self, g: &LoopedGraph, params: SparsityParams) -> bool {
        match self {
            SparsityCertificate::Sparse { orientation } => orientation.validate(g, params),
            SparsityCertificate::Violation { violation } => {
                let ids_ok = violation.edges.iter().all(|e| e.0 < g.edge_count())
                    && violation.loops.iter().all(|l| l.0 < g.loop_count());
                ids_ok && !violation.is_empty() && violates(g, violation, params)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// pebble game

struct PebbleGame<'g> {
    g: &'g LoopedGraph,
    k: usize,
    l: usize,
    pebbles: Vec<usize>,
    /// Tail per edge; `None` while not inserted.
    edge_tail: Vec<Option<usize>>,
    loop_in: Vec<bool>,
}

impl<'g> PebbleGame<'g> {
    fn new(g: &'g LoopedGraph, params: SparsityParams) -> Self {
        PebbleGame {
            g,
            k: params.k(),
            l: params.l(),
            pebbles: vec![params.k(); g.n()],
            edge_tail: vec![None; g.edge_count()],
            loop_in: vec![false; g.loop_count()],
        }
    }

    /// Directed non-loop arcs out of `v`, ascending by (head, edge id); the
    /// deterministic exploration order of all searches.
    fn out_arcs(&self, v: usize) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for (i, tail) in self.edge_tail.iter().enumerate() {
            if *tail == Some(v) {
                let (a, b) = self.g.edge(EdgeId(i));
                arcs.push((if a == v { b } else { a }, i));
            }
        }
        arcs.sort_unstable();
        arcs
    }

    fn dfs_for_pebble(
        &self,
        v: usize,
        visited: &mut Vec<bool>,
        parent: &mut Vec<Option<(usize, usize)>>,
    ) -> Option<usize> {
        for (w, e) in self.out_arcs(v) {
            if visited[w] {
                continue;
            }
            visited[w] = true;
            parent[w] = Some((v, e));
            if self.pebbles[w] > 0 {
                return Some(w);
            }
            if let Some(found) = self.dfs_for_pebble(w, visited, parent) {
                return Some(found);
            }
        }
        None
    }

    /// Try to move one free pebble to `start` by depth-first search along the
    /// orientation, reversing the found path.  `frozen` protects a partner
    /// vertex: neither traversed nor robbed.
    fn grab_pebble(&mut self, start: usize, frozen: Option<usize>) -> bool {
        let mut visited = vec![false; self.g.n()];
        visited[start] = true;
        if let Some(f) = frozen {
            visited[f] = true;
        }
        let mut parent = vec![None; self.g.n()];
        let Some(w) = self.dfs_for_pebble(start, &mut visited, &mut parent) else {
            return false;
        };
        let mut cur = w;
        while let Some((prev, e)) = parent[cur] {
            self.edge_tail[e] = Some(cur);
            cur = prev;
        }
        self.pebbles[w] -= 1;
        self.pebbles[start] += 1;
        true
    }

    fn try_insert_edge(&mut self, e: EdgeId) -> bool {
        let (u, v) = self.g.edge(e);
        while self.pebbles[u] + self.pebbles[v] < self.l + 1 {
            if !self.grab_pebble(u, Some(v)) && !self.grab_pebble(v, Some(u)) {
                return false;
            }
        }
        // u < v by edge normalization; prefer the smaller endpoint as tail
        let tail = if self.pebbles[u] > 0 { u } else { v };
        self.pebbles[tail] -= 1;
        self.edge_tail[e.0] = Some(tail);
        true
    }

    fn try_insert_loop(&mut self, lid: LoopId) -> bool {
        let v = self.g.loop_vertex(lid);
        while self.pebbles[v] < self.l + 1 {
            if !self.grab_pebble(v, None) {
                return false;
            }
        }
        self.pebbles[v] -= 1;
        self.loop_in[lid.0] = true;
        true
    }

    /// Vertices reachable from `seeds` along the orientation, seeds included.
    fn reachable(&self, seeds: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.g.n()];
        let mut stack: Vec<usize> = seeds.to_vec();
        for &s in seeds {
            seen[s] = true;
        }
        while let Some(v) = stack.pop() {
            for (w, _) in self.out_arcs(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Inserted elements whose tail lies in `region`.
    fn elements_with_tail_in(&self, region: &[bool]) -> EdgeOrLoopSet {
        let mut set = EdgeOrLoopSet::empty();
        for (i, tail) in self.edge_tail.iter().enumerate() {
            if let Some(t) = tail {
                if region[*t] {
                    set.edges.insert(EdgeId(i));
                }
            }
        }
        for (i, inserted) in self.loop_in.iter().enumerate() {
            if *inserted && region[self.g.loop_vertex(LoopId(i))] {
                set.loops.insert(LoopId(i));
            }
        }
        set
    }

    fn accepted_set(&self) -> EdgeOrLoopSet {
        let mut set = EdgeOrLoopSet::empty();
        for (i, tail) in self.edge_tail.iter().enumerate() {
            if tail.is_some() {
                set.edges.insert(EdgeId(i));
            }
        }
        for (i, inserted) in self.loop_in.iter().enumerate() {
            if *inserted {
                set.loops.insert(LoopId(i));
            }
        }
        set
    }

    fn orientation(&self) -> PebbleOrientation {
        PebbleOrientation {
            edge_tails: self
                .edge_tail
                .iter()
                .enumerate()
                .filter_map(|(i, t)| t.map(|t| (EdgeId(i), t)))
                .collect(),
            loops: self
                .loop_in
                .iter()
                .enumerate()
                .filter_map(|(i, &ins)| ins.then_some(LoopId(i)))
                .collect(),
            pebbles: self.pebbles.clone(),
        }
    }
}

/// Insertion order shared by every game-based routine: edges by ascending
/// id, then loops by ascending id.
fn element_order(g: &LoopedGraph) -> (Vec<EdgeId>, Vec<LoopId>) {
    (
        (0..g.edge_count()).map(EdgeId).collect(),
        (0..g.loop_count()).map(LoopId).collect(),
    )
}

/// Play the full game, skipping elements in `skip`, attempting everything
/// else in the canonical order.
fn play<'g>(
    g: &'g LoopedGraph,
    params: SparsityParams,
    skip: Option<&EdgeOrLoopSet>,
) -> PebbleGame<'g> {
    let mut game = PebbleGame::new(g, params);
    let (edges, loops) = element_order(g);
    for e in edges {
        if skip.is_none_or(|s| !s.contains_edge(e)) {
            game.try_insert_edge(e);
        }
    }
    for l in loops {
        if skip.is_none_or(|s| !s.contains_loop(l)) {
            game.try_insert_loop(l);
        }
    }
    game
}

/// Rank of the full element set in the `(k, l)`-count matroid.
pub fn matroid_rank(g: &LoopedGraph, params: SparsityParams) -> usize {
    play(g, params, None).accepted_set().size()
}

/// Sparsity via the matroid: every element independent.
pub fn is_sparse(g: &LoopedGraph, params: SparsityParams) -> bool {
    matroid_rank(g, params) == g.size()
}

/// Sparse and meeting the global count `|E| + |L| = k|V| - l` exactly.
pub fn is_tight(g: &LoopedGraph, params: SparsityParams) -> bool {
    g.size() as isize == params.bound(g.n()) && is_sparse(g, params)
}

/// Decide sparsity by the pebble game, producing a certificate either way.
/// Unlike [`is_sparse_bruteforce`] this runs at any scale; the violation set
/// it reports is the overfull region at the first refused insertion, not
/// necessarily a smallest one.
pub fn certify_sparsity(g: &LoopedGraph, params: SparsityParams) -> SparsityCertificate {
    let mut game = PebbleGame::new(g, params);
    let (edges, loops) = element_order(g);
    for e in edges {
        if !game.try_insert_edge(e) {
            let (u, v) = g.edge(e);
            let region = game.reachable(&[u, v]);
            let mut violation = game.elements_with_tail_in(&region);
            violation.edges.insert(e);
            return SparsityCertificate::Violation { violation };
        }
    }
    for l in loops {
        if !game.try_insert_loop(l) {
            let region = game.reachable(&[g.loop_vertex(l)]);
            let mut violation = game.elements_with_tail_in(&region);
            violation.loops.insert(l);
            return SparsityCertificate::Violation { violation };
        }
    }
    SparsityCertificate::Sparse { orientation: game.orientation() }
}

// ---------------------------------------------------------------------------
// brute force

/// Decide sparsity by enumerating every nonempty subset of elements.
///
/// On violation, reports a set of smallest cardinality (ties broken by the
/// enumeration order over bitmasks with edges in the low bits).  On sparse,
/// the attached orientation comes from a pebble-game run; the verdict itself
/// is pure enumeration.
pub fn is_sparse_bruteforce(
    g: &LoopedGraph,
    params: SparsityParams,
) -> Result<SparsityCertificate, SparsityError> {
    let m = g.size();
    if m > BRUTE_FORCE_MAX {
        return Err(SparsityError::ScaleExceeded { size: m, max: BRUTE_FORCE_MAX });
    }
    let ne = g.edge_count();
    // vertex incidence masks over vertices that actually occur
    let mut vertex_bit = BTreeMap::new();
    let mut bit_for = |v: usize, map: &mut BTreeMap<usize, u32>| -> u64 {
        let next = map.len() as u32;
        1u64 << *map.entry(v).or_insert(next)
    };
    let mut vmask = vec![0u64; m];
    for (e, (u, v)) in g.edges() {
        vmask[e.0] = bit_for(u, &mut vertex_bit) | bit_for(v, &mut vertex_bit);
    }
    for (l, v) in g.loops() {
        vmask[ne + l.0] = bit_for(v, &mut vertex_bit);
    }

    let mut best: Option<(u32, u64)> = None;
    for mask in 1u64..(1u64 << m) {
        let count = mask.count_ones();
        if best.is_some_and(|(c, _)| count >= c) {
            continue;
        }
        let mut vs = 0u64;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            vs |= vmask[i];
            rest &= rest - 1;
        }
        if count as isize > params.bound(vs.count_ones() as usize) {
            best = Some((count, mask));
        }
    }

    if let Some((_, mask)) = best {
        let mut violation = EdgeOrLoopSet::empty();
        for i in 0..m {
            if mask >> i & 1 == 1 {
                if i < ne {
                    violation.edges.insert(EdgeId(i));
                } else {
                    violation.loops.insert(LoopId(i - ne));
                }
            }
        }
        Ok(SparsityCertificate::Violation { violation })
    } else {
        let game = play(g, params, None);
        debug_assert_eq!(game.accepted_set().size(), m, "enumeration and game disagree");
        Ok(SparsityCertificate::Sparse { orientation: game.orientation() })
    }
}

// ---------------------------------------------------------------------------
// tight subgraphs

/// Elements to skip so that only the lowest-id copy of each parallel class
/// survives; loops all stay.
fn parallel_duplicates(g: &LoopedGraph) -> EdgeOrLoopSet {
    let mut seen = BTreeSet::new();
    let mut skip = EdgeOrLoopSet::empty();
    for (e, uv) in g.edges() {
        if !seen.insert(uv) {
            skip.edges.insert(e);
        }
    }
    skip
}

/// Element ids (into `g`) of a `(t, 0)`-tight looped-simple spanning
/// subgraph, if one exists.
///
/// Parallel edges are first collapsed to their lowest-id copies (any
/// looped-simple subgraph can be rewritten to use class representatives),
/// then a basis of the `(t, 0)`-count matroid is extracted in canonical
/// order; the subgraph exists iff the basis has `t |V|` elements.
pub fn find_tight_spanning_set(g: &LoopedGraph, t: usize) -> Option<EdgeOrLoopSet> {
    assert!(t >= 1, "t must be positive");
    let params = SparsityParams::new(t, 0).expect("(t,0) is always valid");
    let skip = parallel_duplicates(g);
    let accepted = play(g, params, Some(&skip)).accepted_set();
    (accepted.size() == t * g.n()).then_some(accepted)
}

/// [`find_tight_spanning_set`] materialized as a graph on the same vertex
/// set.
pub fn find_tight_spanning_subgraph(g: &LoopedGraph, t: usize) -> Option<LoopedGraph> {
    find_tight_spanning_set(g, t).map(|set| {
        let (sub, _, _) = g.extract(&set).expect("ids come from g");
        sub
    })
}

/// A `(2, 0)`-tight looped-simple spanning subgraph whose simple support
/// contains no complete graph on five vertices, if one exists.
///
/// Branch and bound over count-matroid bases: extract a canonical basis, and
/// while its support contains a K5, branch on which of that K5's ten edges to
/// exclude.  A branch dies as soon as the remaining ground set has rank below
/// `2|V|`.  Exhaustive, hence the vertex budget.
pub fn find_tight_k5free_spanning_subgraph(
    g: &LoopedGraph,
) -> Result<Option<LoopedGraph>, SparsityError> {
    if g.n() > K5FREE_MAX_VERTICES {
        return Err(SparsityError::ScaleExceeded { size: g.n(), max: K5FREE_MAX_VERTICES });
    }
    let params = SparsityParams::new(2, 0).expect("(2,0) is valid");
    let base_skip = parallel_duplicates(g);
    let mut memo: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut excluded: BTreeSet<EdgeId> = BTreeSet::new();
    let found = k5free_branch(g, params, &base_skip, &mut excluded, &mut memo);
    Ok(found.map(|set| {
        let (sub, _, _) = g.extract(&set).expect("ids come from g");
        sub
    }))
}

fn k5free_branch(
    g: &LoopedGraph,
    params: SparsityParams,
    base_skip: &EdgeOrLoopSet,
    excluded: &mut BTreeSet<EdgeId>,
    memo: &mut BTreeSet<Vec<usize>>,
) -> Option<EdgeOrLoopSet> {
    let mut skip = base_skip.clone();
    skip.edges.extend(excluded.iter().copied());
    let accepted = play(g, params, Some(&skip)).accepted_set();
    if accepted.size() < 2 * g.n() {
        return None;
    }
    let (sub, _, _) = g.extract(&accepted).expect("ids come from g");
    let k5s = sub.find_k5_subgraphs();
    let Some(first) = k5s.first() else {
        return Some(accepted);
    };
    // any admissible subgraph omits at least one pair of this K5 entirely
    for i in 0..5 {
        for j in (i + 1)..5 {
            let (a, b) = (first[i].min(first[j]), first[i].max(first[j]));
            let e = g
                .edges()
                .find(|(e, uv)| *uv == (a, b) && !skip.contains_edge(*e))
                .map(|(e, _)| e)
                .expect("K5 edge must be a live representative");
            excluded.insert(e);
            let key: Vec<usize> = excluded.iter().map(|e| e.0).collect();
            if memo.insert(key) {
                if let Some(found) = k5free_branch(g, params, base_skip, excluded, memo) {
                    excluded.remove(&e);
                    return Some(found);
                }
            }
            excluded.remove(&e);
        }
    }
    None
}

/// The largest `(k, 0)`-tight element set reachable from `seed` through
/// vertex-sharing tight subgraphs.
///
/// For `l = 0` the union of all tight subgraphs is itself tight and splits
/// into connected blocks, each tight; the closure of a seed is the union of
/// the blocks its vertices touch.  Blocks are read off the final pebble-game
/// state: a vertex belongs to some tight subgraph exactly when no free
/// pebble is reachable from it along the orientation.
pub fn tight_closure(
    g: &LoopedGraph,
    params: SparsityParams,
    seed: &EdgeOrLoopSet,
) -> Result<EdgeOrLoopSet, SparsityError> {
    if params.l() != 0 {
        return Err(SparsityError::UnsupportedParams { l: params.l() });
    }
    let ids_ok = seed.edges.iter().all(|e| e.0 < g.edge_count())
        && seed.loops.iter().all(|l| l.0 < g.loop_count());
    if !ids_ok || seed.is_empty() {
        return Err(SparsityError::InvalidSeed);
    }
    let game = play(g, params, None);
    if game.accepted_set().size() != g.size() {
        return Err(SparsityError::NotSparse { k: params.k(), l: params.l() });
    }
    // a subset of a sparse graph is tight iff it meets the count exactly
    let seed_vertices = seed.vertex_set(g);
    if seed.size() != params.k() * seed_vertices.len() {
        return Err(SparsityError::InvalidSeed);
    }

    // blocked = cannot reach a free pebble; equivalently, outside the
    // reverse-reachable set of the pebbled vertices
    let mut can_reach = vec![false; g.n()];
    let mut stack: Vec<usize> = (0..g.n()).filter(|&v| game.pebbles[v] > 0).collect();
    for &v in &stack {
        can_reach[v] = true;
    }
    while let Some(w) = stack.pop() {
        for (i, tail) in game.edge_tail.iter().enumerate() {
            if let Some(t) = tail {
                let (a, b) = g.edge(EdgeId(i));
                let head = if a == *t { b } else { a };
                if head == w && !can_reach[*t] {
                    can_reach[*t] = true;
                    stack.push(*t);
                }
            }
        }
    }
    let blocked: Vec<bool> = can_reach.iter().map(|&r| !r).collect();
    debug_assert!(
        seed_vertices.iter().all(|&v| blocked[v]),
        "vertices of a tight seed must be pebble-starved"
    );
    let union_elements = game.elements_with_tail_in(&blocked);

    // connected blocks of the union, via its edges
    let mut comp: BTreeMap<usize, usize> = BTreeMap::new();
    let mut next = 0;
    for &v in union_elements.vertex_set(g).iter() {
        if comp.contains_key(&v) {
            continue;
        }
        let mut stack = vec![v];
        comp.insert(v, next);
        while let Some(x) = stack.pop() {
            for &e in &union_elements.edges {
                let (a, b) = g.edge(e);
                let y = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    continue;
                };
                if !comp.contains_key(&y) {
                    comp.insert(y, next);
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    let wanted: BTreeSet<usize> =
        seed_vertices.iter().filter_map(|v| comp.get(v).copied()).collect();
    let mut closure = EdgeOrLoopSet::empty();
    for &e in &union_elements.edges {
        if wanted.contains(&comp[&g.edge(e).0]) {
            closure.edges.insert(e);
        }
    }
    for &l in &union_elements.loops {
        if wanted.contains(&comp[&g.loop_vertex(l)]) {
            closure.loops.insert(l);
        }
    }
    debug_assert!(seed.is_subset(&closure), "closure must contain its seed");
    Ok(closure)
}

// ---------------------------------------------------------------------------
// mixed count

/// Does `G` have a spanning subgraph with `|E| + |L| = 2|V|` such that every
/// nonempty set `F` satisfies `|F| <= 2|V_F|`, tightening to `2|V_F| - 3`
/// when `F` is pure edges?
///
/// Equivalent to the ground set having rank `2|V|` in the matroid induced by
/// that mixed count.  Independence is tested by subset enumeration inside a
/// greedy basis extraction, hence the element budget.
pub fn st_spanning_check(g: &LoopedGraph) -> Result<bool, SparsityError> {
    let m = g.size();
    if m > BRUTE_FORCE_MAX {
        return Err(SparsityError::ScaleExceeded { size: m, max: BRUTE_FORCE_MAX });
    }
    let ne = g.edge_count();
    let mut vertex_bit: BTreeMap<usize, u32> = BTreeMap::new();
    let mut bit_for = |v: usize, map: &mut BTreeMap<usize, u32>| -> u64 {
        let next = map.len() as u32;
        1u64 << *map.entry(v).or_insert(next)
    };
    let mut vmask = vec![0u64; m];
    for (e, (u, v)) in g.edges() {
        vmask[e.0] = bit_for(u, &mut vertex_bit) | bit_for(v, &mut vertex_bit);
    }
    for (l, v) in g.loops() {
        vmask[ne + l.0] = bit_for(v, &mut vertex_bit);
    }

    // greedy basis; adding x to independent B only needs checks on sets
    // containing x
    let mut basis: Vec<usize> = Vec::new();
    for x in 0..m {
        let ok = (0u64..(1 << basis.len())).all(|sub| {
            let mut size = 1usize;
            let mut vs = vmask[x];
            let mut pure_edges = x < ne;
            let mut rest = sub;
            while rest != 0 {
                let i = basis[rest.trailing_zeros() as usize];
                size += 1;
                vs |= vmask[i];
                pure_edges &= i < ne;
                rest &= rest - 1;
            }
            let bound = 2 * vs.count_ones() as isize - if pure_edges { 3 } else { 0 };
            size as isize <= bound
        });
        if ok {
            basis.push(x);
        }
    }
    Ok(basis.len() == 2 * g.n())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(k: usize, l: usize) -> SparsityParams {
        SparsityParams::new(k, l).unwrap()
    }

    fn loops_only(n: usize, at: &[usize]) -> LoopedGraph {
        LoopedGraph::from_parts(n, vec![], at.to_vec()).unwrap()
    }

    #[test]
    fn params_range() {
        assert!(SparsityParams::new(2, 3).is_ok());
        assert!(SparsityParams::new(2, 4).is_err());
        assert!(SparsityParams::new(0, 0).is_err());
        assert!(SparsityParams::new(1, 1).is_ok());
    }

    #[test]
    fn k5_is_sparse_and_tight_for_2_0() {
        let k5 = LoopedGraph::complete(5);
        let cert = is_sparse_bruteforce(&k5, params(2, 0)).unwrap();
        assert!(matches!(cert, SparsityCertificate::Sparse { .. }));
        assert!(cert.validate(&k5, params(2, 0)));
        assert!(is_tight(&k5, params(2, 0)));
        assert_eq!(matroid_rank(&k5, params(2, 0)), 10);
    }

    #[test]
    fn too_many_loops_violate() {
        // t+1 loops on one vertex against (t,0); minimal violation is all of them
        for t in 1..=3 {
            let g = loops_only(1, &vec![0; t + 1]);
            let cert = is_sparse_bruteforce(&g, params(t, 0)).unwrap();
            match &cert {
                SparsityCertificate::Violation { violation } => {
                    assert_eq!(violation.loops.len(), t + 1);
                    assert!(violation.edges.is_empty());
                }
                _ => panic!("expected violation"),
            }
            assert!(cert.validate(&g, params(t, 0)));
        }
    }

    #[test]
    fn k4_violates_2_3() {
        let k4 = LoopedGraph::complete(4);
        let cert = is_sparse_bruteforce(&k4, params(2, 3)).unwrap();
        match &cert {
            SparsityCertificate::Violation { violation } => {
                assert_eq!(violation.edges.len(), 6, "whole edge set is the smallest witness");
            }
            _ => panic!("expected violation"),
        }
        assert!(cert.validate(&k4, params(2, 3)));
    }

    #[test]
    fn loop_rank_saturates_at_k() {
        let g = loops_only(1, &[0, 0, 0]);
        assert_eq!(matroid_rank(&g, params(2, 0)), 2);
        assert!(!is_sparse(&g, params(2, 0)));
        assert!(is_tight(&loops_only(1, &[0, 0]), params(2, 0)));
        assert!(is_tight(&loops_only(1, &[0, 0, 0]), params(3, 0)));
    }

    #[test]
    fn loops_need_l_below_k() {
        // with l >= k a single loop already overcounts
        let g = loops_only(2, &[0]);
        let cert = certify_sparsity(&g, params(2, 2));
        match &cert {
            SparsityCertificate::Violation { violation } => {
                assert_eq!(violation.size(), 1);
            }
            _ => panic!("expected violation"),
        }
        assert!(cert.validate(&g, params(2, 2)));
    }

    #[test]
    fn cycle_is_not_tight_for_2_0() {
        assert!(is_sparse(&LoopedGraph::cycle(4), params(2, 0)));
        assert!(!is_tight(&LoopedGraph::cycle(4), params(2, 0)));
    }

    #[test]
    fn certify_matches_bruteforce_verdict_on_k33() {
        let mut g = LoopedGraph::new(6);
        for u in 0..3 {
            for v in 3..6 {
                g.add_edge(u, v).unwrap();
            }
        }
        for p in [params(2, 3), params(2, 0), params(1, 1), params(3, 2)] {
            let brute = is_sparse_bruteforce(&g, p).unwrap();
            let game = certify_sparsity(&g, p);
            assert_eq!(
                matches!(brute, SparsityCertificate::Sparse { .. }),
                matches!(game, SparsityCertificate::Sparse { .. }),
                "verdicts differ for {p:?}"
            );
            assert!(brute.validate(&g, p));
            assert!(game.validate(&g, p));
        }
    }

    #[test]
    fn bruteforce_scale_cap() {
        let g = LoopedGraph::complete(8); // 28 elements
        assert!(matches!(
            is_sparse_bruteforce(&g, params(2, 0)),
            Err(SparsityError::ScaleExceeded { .. })
        ));
    }

    #[test]
    fn tight_spanning_subgraph_on_looped_triangle() {
        let g = LoopedGraph::from_parts(3, vec![(0, 1), (1, 2), (0, 2)], vec![0, 1, 2]).unwrap();
        let sub = find_tight_spanning_subgraph(&g, 2).expect("triangle with loops is tight");
        assert_eq!(sub.edge_count(), 3);
        assert_eq!(sub.loop_count(), 3);
        assert!(is_tight(&sub, params(2, 0)));
        assert!(sub.is_looped_simple());
    }

    #[test]
    fn parallel_edges_do_not_fake_tightness() {
        let g = LoopedGraph::from_parts(2, vec![(0, 1); 4], vec![]).unwrap();
        assert!(find_tight_spanning_subgraph(&g, 2).is_none());
    }

    #[test]
    fn k5_is_its_own_tight_subgraph() {
        let k5 = LoopedGraph::complete(5);
        assert_eq!(find_tight_spanning_subgraph(&k5, 2).unwrap(), k5);
    }

    #[test]
    fn k5free_search_excludes_an_edge_when_loops_allow() {
        let g = LoopedGraph::complete(5).add_uniform_loops(1);
        let sub = find_tight_k5free_spanning_subgraph(&g).unwrap().expect("slack exists");
        assert!(is_tight(&sub, params(2, 0)));
        assert!(sub.is_looped_simple());
        assert!(sub.find_k5_subgraphs().is_empty());
        assert!(sub.edge_count() <= 9);
    }

    #[test]
    fn bare_k5_has_no_k5free_tight_subgraph() {
        let k5 = LoopedGraph::complete(5);
        assert_eq!(find_tight_k5free_spanning_subgraph(&k5).unwrap(), None);
    }

    #[test]
    fn octahedron_is_already_admissible() {
        // complete tripartite K2,2,2: 4-regular, 12 = 2*6 edges, no K5
        let mut g = LoopedGraph::new(6);
        for u in 0..6 {
            for v in (u + 1)..6 {
                if u / 2 != v / 2 {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let sub = find_tight_k5free_spanning_subgraph(&g).unwrap().expect("admissible");
        assert_eq!(sub, g);
    }

    #[test]
    fn k5free_scale_cap() {
        let g = LoopedGraph::new(11);
        assert!(matches!(
            find_tight_k5free_spanning_subgraph(&g),
            Err(SparsityError::ScaleExceeded { .. })
        ));
    }

    #[test]
    fn closure_of_full_tight_graph_is_itself() {
        let k5 = LoopedGraph::complete(5);
        let all = k5.full_set();
        assert_eq!(tight_closure(&k5, params(2, 0), &all).unwrap(), all);
    }

    #[test]
    fn closure_stays_in_seed_block() {
        // two disjoint tight blocks: a K5 and a doubly-looped vertex
        let mut g = LoopedGraph::complete(5);
        let extra = g.clone();
        let mut with_extra = LoopedGraph::new(6);
        for (_, (u, v)) in extra.edges() {
            with_extra.add_edge(u, v).unwrap();
        }
        with_extra.add_loop(5).unwrap();
        with_extra.add_loop(5).unwrap();
        g = with_extra;
        let seed = LoopedGraph::complete(5).full_set();
        let closure = tight_closure(&g, params(2, 0), &seed).unwrap();
        assert_eq!(closure.edges.len(), 10);
        assert!(closure.loops.is_empty(), "other block must stay out");
    }

    #[test]
    fn closure_of_loop_pair_on_sparse_graph() {
        // vertex 0 carries a tight loop pair; vertex 1 keeps a free pebble
        let g = LoopedGraph::from_parts(2, vec![], vec![0, 0, 1]).unwrap();
        let mut seed = EdgeOrLoopSet::empty();
        seed.loops.insert(LoopId(0));
        seed.loops.insert(LoopId(1));
        let closure = tight_closure(&g, params(2, 0), &seed).unwrap();
        assert_eq!(closure, seed);
    }

    #[test]
    fn closure_rejects_bad_input() {
        let k4 = LoopedGraph::complete(4);
        let seed = k4.full_set();
        assert!(matches!(
            tight_closure(&k4, params(2, 1), &seed),
            Err(SparsityError::UnsupportedParams { .. })
        ));
        // K4 is (2,0)-sparse but its edge set is not tight (6 < 8)
        assert!(matches!(
            tight_closure(&k4, params(2, 0), &seed),
            Err(SparsityError::InvalidSeed)
        ));
        // non-sparse graph
        let over = loops_only(1, &[0, 0, 0]);
        let mut seed = EdgeOrLoopSet::empty();
        seed.loops.insert(LoopId(0));
        seed.loops.insert(LoopId(1));
        assert!(matches!(
            tight_closure(&over, params(2, 0), &seed),
            Err(SparsityError::NotSparse { .. })
        ));
    }

    #[test]
    fn mixed_count_accepts_double_loop_vertex() {
        assert!(st_spanning_check(&loops_only(1, &[0, 0])).unwrap());
    }

    #[test]
    fn mixed_count_rejects_k4_core() {
        // any K4 breaks the pure-edge bound no matter where loops sit
        let g = LoopedGraph::from_parts(4, LoopedGraph::complete(4).edges().map(|(_, uv)| uv).collect(), vec![0, 1])
            .unwrap();
        assert!(!st_spanning_check(&g).unwrap());
    }

    #[test]
    fn mixed_count_accepts_k4_minus_edge_with_loops() {
        let g = LoopedGraph::from_parts(
            4,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)],
            vec![2, 3, 0],
        )
        .unwrap();
        assert!(st_spanning_check(&g).unwrap());
    }

    #[test]
    fn mixed_count_scale_cap() {
        let g = LoopedGraph::complete(8);
        assert!(matches!(st_spanning_check(&g), Err(SparsityError::ScaleExceeded { .. })));
    }

    // strategy: small random looped multigraphs
    fn small_graph() -> impl Strategy<Value = LoopedGraph> {
        (1usize..=5).prop_flat_map(|n| {
            let edges = proptest::collection::vec((0..n, 0..n), 0..=8);
            let loops = proptest::collection::vec(0..n, 0..=4);
            (Just(n), edges, loops).prop_map(|(n, edges, loops)| {
                let edges = edges.into_iter().filter(|(u, v)| u != v).collect();
                LoopedGraph::from_parts(n, edges, loops).unwrap()
            })
        })
    }

    fn any_params() -> impl Strategy<Value = SparsityParams> {
        prop_oneof![
            Just(params(1, 0)),
            Just(params(1, 1)),
            Just(params(2, 0)),
            Just(params(2, 1)),
            Just(params(2, 2)),
            Just(params(2, 3)),
            Just(params(3, 0)),
        ]
    }

    proptest! {
        #[test]
        fn rank_is_monotone_by_one(g in small_graph(), p in any_params(), u in 0usize..5, v in 0usize..5) {
            let before = matroid_rank(&g, p);
            let mut bigger = g.clone();
            if u != v && u < g.n() && v < g.n() {
                bigger.add_edge(u, v).unwrap();
            } else {
                bigger.add_loop(u.min(g.n() - 1)).unwrap();
            }
            let after = matroid_rank(&bigger, p);
            prop_assert!(after == before || after == before + 1);
        }

        #[test]
        fn certificates_validate(g in small_graph(), p in any_params()) {
            let cert = certify_sparsity(&g, p);
            prop_assert!(cert.validate(&g, p));
            if g.size() <= 12 {
                let brute = is_sparse_bruteforce(&g, p).unwrap();
                prop_assert!(brute.validate(&g, p));
                prop_assert_eq!(
                    matches!(brute, SparsityCertificate::Sparse { .. }),
                    matches!(cert, SparsityCertificate::Sparse { .. })
                );
                prop_assert_eq!(
                    matches!(cert, SparsityCertificate::Sparse { .. }),
                    matroid_rank(&g, p) == g.size()
                );
            }
        }

        #[test]
        fn tight_subgraph_exists_iff_collapsed_rank_full(g in small_graph(), t in 1usize..=3) {
            let found = find_tight_spanning_set(&g, t);
            let skip = parallel_duplicates(&g);
            let mut collapsed = EdgeOrLoopSet::empty();
            for (e, _) in g.edges() {
                if !skip.contains_edge(e) {
                    collapsed.edges.insert(e);
                }
            }
            for (l, _) in g.loops() {
                collapsed.loops.insert(l);
            }
            let (cg, _, _) = g.extract(&collapsed).unwrap();
            let full = matroid_rank(&cg, params(t, 0)) == t * g.n();
            prop_assert_eq!(found.is_some(), full);
            if let Some(set) = found {
                let (sub, _, _) = g.extract(&set).unwrap();
                prop_assert!(is_tight(&sub, params(t, 0)));
                prop_assert!(sub.is_looped_simple());
            }
        }

        #[test]
        fn closure_is_tight_and_contains_seed(g in small_graph()) {
            let p = params(2, 0);
            if !is_sparse(&g, p) {
                return Ok(());
            }
            // use each maximal block as its own seed: closure must return it
            let full = g.full_set();
            for &l in &full.loops {
                let mut seed = EdgeOrLoopSet::empty();
                seed.loops.insert(l);
                let v = g.loop_vertex(l);
                for &l2 in &full.loops {
                    if g.loop_vertex(l2) == v {
                        seed.loops.insert(l2);
                    }
                }
                if seed.size() != 2 {
                    continue;
                }
                if let Ok(closure) = tight_closure(&g, p, &seed) {
                    prop_assert!(seed.is_subset(&closure));
                    let (sub, _, _) = g.extract(&closure).unwrap();
                    let nv = closure.vertex_set(&g).len();
                    prop_assert_eq!(closure.size(), 2 * nv);
                    prop_assert!(is_sparse(&sub, p));
                }
            }
        }
    }
}
