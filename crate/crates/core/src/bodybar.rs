//! Linearly-constrained body-bar frameworks.
//!
//! Each vertex is a rigid body in `R^d` with velocity `(Omega, tau)`:
//! a skew-symmetric angular part (coordinates `omega_ij`, `i < j`, in
//! lexicographic order) and a translation, together `C(d+1,2)` numbers.
//! Edges are bars between generic points of two bodies; loops are linear
//! constraints of one of two kinds — *point* mode restricts the motion of
//! a generic point of the body to be orthogonal to a given direction,
//! *body* mode restricts the motion of the whole body.  The module builds
//! exact rigidity matrices at seeded generic attachment points
//! ([`body_bar_rank`]) and decides rigidity combinatorially through the
//! two partition-counting characterizations ([`point_count_check`],
//! [`body_count_check`]), which quantify over all set partitions of the
//! body set.

use std::collections::BTreeMap;

use num::{BigRational, Zero};
use serde::{Deserialize, Serialize};

use crate::exactlin::{rank_of_rows, ExactMatrix};
use crate::graph::{GraphError, LoopId, LoopedGraph};
use crate::ratio;
use crate::sampling;

/// Partition checks enumerate all Bell(n) set partitions; beyond this many
/// bodies the scan is refused.
pub const PARTITION_MAX: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BodyBarError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("endpoints have mismatched dimensions {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("no direction given for loop {0}")]
    MissingDirection(usize),
    #[error("direction for loop {0} has length {1}, expected {2}")]
    VectorLength(usize, usize, usize),
    #[error("direction for loop {0} is zero")]
    ZeroDirection(usize),
    #[error("instance is {got}-constrained, check requires {expected} mode")]
    WrongMode { expected: ConstraintMode, got: ConstraintMode },
    #[error("{n} bodies exceed the partition-scan limit of {max}")]
    ScaleExceeded { n: usize, max: usize },
    #[error("bad rational: {0}")]
    BadRational(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What a loop constrains: one generic point of the body, or the whole
/// body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintMode {
    Point,
    Body,
}

impl std::fmt::Display for ConstraintMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConstraintMode::Point => "point",
            ConstraintMode::Body => "body",
        })
    }
}

/// A body-bar problem: multigraph, dimension, constraint mode, and one
/// nonzero direction per loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BodyBarInstance {
    graph: LoopedGraph,
    d: usize,
    mode: ConstraintMode,
    q: BTreeMap<LoopId, Vec<BigRational>>,
}

impl BodyBarInstance {
    pub fn new(
        graph: LoopedGraph,
        d: usize,
        mode: ConstraintMode,
        q: BTreeMap<LoopId, Vec<BigRational>>,
    ) -> Result<Self, BodyBarError> {
        if d == 0 {
            return Err(BodyBarError::ZeroDimension);
        }
        for (l, _) in graph.loops() {
            let v = q.get(&l).ok_or(BodyBarError::MissingDirection(l.0))?;
            if v.len() != d {
                return Err(BodyBarError::VectorLength(l.0, v.len(), d));
            }
            if v.iter().all(Zero::is_zero) {
                return Err(BodyBarError::ZeroDirection(l.0));
            }
        }
        Ok(BodyBarInstance { graph, d, mode, q })
    }

    pub fn graph(&self) -> &LoopedGraph {
        &self.graph
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    pub fn direction(&self, l: LoopId) -> &[BigRational] {
        &self.q[&l]
    }

    /// Velocity coordinates per body, `C(d+1,2)`.
    pub fn block_dim(&self) -> usize {
        self.d * (self.d + 1) / 2
    }
}

/// JSON mirror: the graph's fields plus `d`, `mode`, and the direction
/// map with rationals as `"num/den"` strings.
#[derive(Serialize, Deserialize)]
struct BodyBarJson {
    #[serde(flatten)]
    graph: LoopedGraph,
    d: usize,
    mode: ConstraintMode,
    q: BTreeMap<usize, Vec<String>>,
}

impl Serialize for BodyBarInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BodyBarJson {
            graph: self.graph.clone(),
            d: self.d,
            mode: self.mode,
            q: self
                .q
                .iter()
                .map(|(l, v)| (l.0, v.iter().map(ratio::format_rat).collect()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BodyBarInstance {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = BodyBarJson::deserialize(de)?;
        let mut q = BTreeMap::new();
        for (l, v) in j.q {
            let parsed = v
                .iter()
                .map(|s| ratio::parse_rat(s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(serde::de::Error::custom)?;
            q.insert(LoopId(l), parsed);
        }
        BodyBarInstance::new(j.graph, j.d, j.mode, q).map_err(serde::de::Error::custom)
    }
}

/// Plücker coordinates of the segment from `a` to `b`: the direction
/// `b - a` followed by the `C(d,2)` wedge coordinates
/// `a_i b_j - a_j b_i` in lexicographic order (`i < j`).
pub fn pluecker(a: &[BigRational], b: &[BigRational]) -> Result<Vec<BigRational>, BodyBarError> {
    if a.len() != b.len() {
        return Err(BodyBarError::LengthMismatch(a.len(), b.len()));
    }
    if a == b {
        return Err(BodyBarError::DegenerateSegment);
    }
    let d = a.len();
    let mut out: Vec<BigRational> = (0..d).map(|i| &b[i] - &a[i]).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            out.push(&a[i] * &b[j] - &a[j] * &b[i]);
        }
    }
    Ok(out)
}

/// Column index of `omega_ij` (`i < j`) within a body block laid out as
/// `[omega (lex), tau]`.
fn omega_index(i: usize, j: usize, d: usize) -> usize {
    debug_assert!(i < j && j < d);
    // pairs (0,1)..(0,d-1),(1,2).. — i full rows of shrinking length first
    i * d - i * (i + 1) / 2 + (j - i - 1)
}

/// Constraint coefficients on one body for the line with Plücker vector
/// `pl`: a point of the body moving with velocity `Omega x + tau` changes
/// its component along the line at rate `tau . dir - sum omega_ij w_ij`,
/// with `w` the wedge part.
fn screw_row(pl: &[BigRational], d: usize) -> Vec<BigRational> {
    let wedge = d * (d - 1) / 2;
    let mut row = Vec::with_capacity(wedge + d);
    row.extend(pl[d..].iter().map(|w| -w));
    row.extend(pl[..d].iter().cloned());
    row
}

fn add_block(row: &mut [BigRational], block: usize, width: usize, vals: &[BigRational], sign: i8) {
    for (k, v) in vals.iter().enumerate() {
        let slot = &mut row[block * width + k];
        if sign >= 0 {
            *slot += v;
        } else {
            *slot -= v;
        }
    }
}

/// Exact generic rank of the body-bar rigidity matrix at seeded random
/// attachment points.  The instance is infinitesimally rigid iff the rank
/// reaches `C(d+1,2) |V|`.
///
/// Rows: each bar joins generic points of its two bodies and contributes
/// one row carrying the connecting line's screw coefficients with
/// opposite signs; each point-mode loop contributes the screw row of the
/// line through a generic point with the loop's direction; each body-mode
/// loop contributes `1 + d` rows forcing the translation orthogonal to
/// the direction and the direction into the kernel of the angular part
/// (one of the `d` is always redundant — rank, not row count, is what
/// matters).
pub fn body_bar_rank(inst: &BodyBarInstance, seed: u64) -> usize {
    let d = inst.d;
    let width = inst.block_dim();
    let n = inst.graph.n();
    let mut rng = sampling::rng_for(seed, 0);
    let mut rows: Vec<Vec<BigRational>> = Vec::new();

    for (_, (u, v)) in inst.graph.edges() {
        let (xu, xv) = loop {
            let xu = sampling::sample_point(&mut rng, d);
            let xv = sampling::sample_point(&mut rng, d);
            if xu != xv {
                break (xu, xv);
            }
        };
        let screw = screw_row(&pluecker(&xu, &xv).expect("endpoints differ"), d);
        let mut row = vec![BigRational::zero(); n * width];
        add_block(&mut row, u, width, &screw, -1);
        add_block(&mut row, v, width, &screw, 1);
        rows.push(row);
    }

    for (l, v) in inst.graph.loops() {
        let q = inst.direction(l);
        match inst.mode {
            ConstraintMode::Point => {
                let x = sampling::sample_point(&mut rng, d);
                let tip: Vec<BigRational> = x.iter().zip(q).map(|(a, b)| a + b).collect();
                let screw = screw_row(&pluecker(&x, &tip).expect("direction is nonzero"), d);
                let mut row = vec![BigRational::zero(); n * width];
                add_block(&mut row, v, width, &screw, 1);
                rows.push(row);
            }
            ConstraintMode::Body => {
                // tau . q = 0
                let mut row = vec![BigRational::zero(); n * width];
                for k in 0..d {
                    row[v * width + d * (d - 1) / 2 + k] = q[k].clone();
                }
                rows.push(row);
                // (Omega q)_i = 0 for each i
                for i in 0..d {
                    let mut row = vec![BigRational::zero(); n * width];
                    for j in 0..d {
                        if j > i {
                            row[v * width + omega_index(i, j, d)] = q[j].clone();
                        } else if j < i {
                            row[v * width + omega_index(j, i, d)] = -&q[j];
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }

    if rows.is_empty() {
        return 0;
    }
    ExactMatrix::from_rows(rows).rank()
}

/// All set partitions of `{0, .., n-1}` in restricted-growth order (the
/// single-block partition first), as block lists.
pub fn enumerate_partitions(
    n: usize,
) -> Result<impl Iterator<Item = Vec<Vec<usize>>>, BodyBarError> {
    if n > PARTITION_MAX {
        return Err(BodyBarError::ScaleExceeded { n, max: PARTITION_MAX });
    }
    // restricted growth strings: a[0] = 0, a[i] <= max(a[..i]) + 1
    let mut next: Option<Vec<usize>> = Some(vec![0; n]);
    Ok(std::iter::from_fn(move || {
        let cur = next.take()?;
        let blocks = {
            let count = cur.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); count];
            for (v, &b) in cur.iter().enumerate() {
                blocks[b].push(v);
            }
            blocks
        };
        // successor: bump the rightmost position that may still grow
        let mut succ = cur.clone();
        for i in (1..n).rev() {
            let cap = succ[..i].iter().max().copied().unwrap_or(0) + 1;
            if succ[i] < cap {
                succ[i] += 1;
                for x in succ[i + 1..].iter_mut() {
                    *x = 0;
                }
                next = Some(succ);
                break;
            }
        }
        Some(blocks)
    }))
}

/// A partition falsifying one of the counting characterizations, with the
/// size of the gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub partition: Vec<Vec<usize>>,
    /// How far the crossing-edge count falls short of the requirement.
    pub deficiency: usize,
}

/// Verdict of a partition-counting check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CountVerdict {
    Satisfied,
    Violated { witness: PartitionWitness },
}

/// Edges whose endpoints lie in different blocks, counted with
/// multiplicity.
fn crossing_edges(g: &LoopedGraph, block_of: &[usize]) -> usize {
    g.edges().filter(|&(_, (u, v))| block_of[u] != block_of[v]).count()
}

fn block_assignment(n: usize, partition: &[Vec<usize>]) -> Vec<usize> {
    let mut block_of = vec![0usize; n];
    for (b, block) in partition.iter().enumerate() {
        for &v in block {
            block_of[v] = b;
        }
    }
    block_of
}

/// `delta(P) - (C(d+1,2) |P| - sum of block allowances)` for one
/// partition; negative means violated.  The allowance of a block is the
/// span dimension of its loops' Plücker vectors (point mode, using the
/// provided seeded vectors) or the staircase sum over the affine span
/// dimension of its loops' directions (body mode, blocks without loops
/// allow nothing).
fn partition_balance(
    inst: &BodyBarInstance,
    partition: &[Vec<usize>],
    stars: Option<&BTreeMap<LoopId, Vec<BigRational>>>,
) -> isize {
    let block_of = block_assignment(inst.graph.n(), partition);
    let delta = crossing_edges(&inst.graph, &block_of) as isize;
    let mut allowance = 0isize;
    for block in partition {
        let loops: Vec<LoopId> =
            block.iter().flat_map(|&v| inst.graph.loops_at(v)).collect();
        match inst.mode {
            ConstraintMode::Point => {
                let stars = stars.expect("point mode carries Plücker vectors");
                let vecs: Vec<Vec<BigRational>> =
                    loops.iter().map(|l| stars[l].clone()).collect();
                allowance += rank_of_rows(&vecs) as isize;
            }
            ConstraintMode::Body => {
                if let Some((first, rest)) = loops.split_first() {
                    let base = inst.direction(*first);
                    let diffs: Vec<Vec<BigRational>> = rest
                        .iter()
                        .map(|l| {
                            inst.direction(*l).iter().zip(base).map(|(a, b)| a - b).collect()
                        })
                        .collect();
                    let dx = rank_of_rows(&diffs);
                    // staircase d + (d-1) + .. with dx + 1 terms
                    allowance += (0..=dx.min(inst.d - 1))
                        .map(|i| (inst.d - i) as isize)
                        .sum::<isize>();
                }
            }
        }
    }
    delta - (inst.block_dim() * partition.len()) as isize + allowance
}

/// Seeded Plücker vectors for every loop: the line through a generic
/// point with the loop's direction.
fn seeded_stars(inst: &BodyBarInstance, seed: u64) -> BTreeMap<LoopId, Vec<BigRational>> {
    let mut rng = sampling::rng_for(seed, 1);
    inst.graph
        .loops()
        .map(|(l, _)| {
            let x = sampling::sample_point(&mut rng, inst.d);
            let tip: Vec<BigRational> =
                x.iter().zip(inst.direction(l)).map(|(a, b)| a + b).collect();
            (l, pluecker(&x, &tip).expect("direction is nonzero"))
        })
        .collect()
}

/// The point-constrained counting characterization: for every partition
/// `P` of the bodies, the number of crossing bars must be at least
/// `C(d+1,2) |P|` minus the per-block span dimensions of the loops'
/// Plücker vectors (taken through seeded generic points).  Returns the
/// first violating partition in enumeration order, if any.
pub fn point_count_check(inst: &BodyBarInstance, seed: u64) -> Result<CountVerdict, BodyBarError> {
    if inst.mode != ConstraintMode::Point {
        return Err(BodyBarError::WrongMode {
            expected: ConstraintMode::Point,
            got: inst.mode,
        });
    }
    let stars = seeded_stars(inst, seed);
    scan_partitions(inst, Some(&stars))
}

/// The body-constrained counting characterization: the allowance of a
/// block with loops is `d + (d-1) + ..` with one term per dimension of
/// the affine span of its loop directions plus one.
pub fn body_count_check(inst: &BodyBarInstance) -> Result<CountVerdict, BodyBarError> {
    if inst.mode != ConstraintMode::Body {
        return Err(BodyBarError::WrongMode {
            expected: ConstraintMode::Body,
            got: inst.mode,
        });
    }
    scan_partitions(inst, None)
}

fn scan_partitions(
    inst: &BodyBarInstance,
    stars: Option<&BTreeMap<LoopId, Vec<BigRational>>>,
) -> Result<CountVerdict, BodyBarError> {
    for partition in enumerate_partitions(inst.graph.n())? {
        let balance = partition_balance(inst, &partition, stars);
        if balance < 0 {
            return Ok(CountVerdict::Violated {
                witness: PartitionWitness {
                    partition,
                    deficiency: (-balance) as usize,
                },
            });
        }
    }
    Ok(CountVerdict::Satisfied)
}

impl PartitionWitness {
    /// Recount the witness inequality from scratch (with the same seed
    /// for point-mode Plücker vectors); true iff the claimed deficiency
    /// is exact.
    pub fn revalidate(&self, inst: &BodyBarInstance, seed: u64) -> bool {
        let mut seen = vec![false; inst.graph.n()];
        for &v in self.partition.iter().flatten() {
            if v >= inst.graph.n() || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        if !seen.iter().all(|&s| s) {
            return false;
        }
        let stars =
            (inst.mode == ConstraintMode::Point).then(|| seeded_stars(inst, seed));
        let balance = partition_balance(inst, &self.partition, stars.as_ref());
        balance < 0 && (-balance) as usize == self.deficiency
    }
}
