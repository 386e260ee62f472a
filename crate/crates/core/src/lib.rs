//! Exact verification and construction engine for generic rigidity of
//! linearly constrained frameworks.
//!
//! A linearly constrained framework is a bar-joint framework in `R^d` whose
//! joints may additionally be pinned to affine subspaces: the underlying
//! multigraph carries ordinary edges (bars) and loops (one linear constraint
//! each, with a normal vector attached).  This crate provides
//!
//! * [`graph`]: multigraphs with loops and the element-set machinery;
//! * [`sparsity`]: `(k, l)`-sparsity counts, a pebble-game decision
//!   procedure with certificates, and tight-subgraph extraction;
//! * [`rigidity`]: exact rigidity matrices, motions, stresses, and
//!   randomized generic rank;
//! * [`construct`]: inductive reductions and extensions, and full
//!   realization pipelines that output certified-rigid frameworks;
//! * [`linecon`]: the line-constrained special case and its cycle
//!   characterization;
//! * [`bodybar`]: body-bar frameworks with point and body constraints;
//! * [`exactlin`]: the rational and prime-field linear algebra everything
//!   else stands on.
//!
//! All computations are exact (big-rational arithmetic); randomized routines
//! take explicit seeds and are fully reproducible.

pub mod construct;
pub mod exactlin;
pub mod graph;
pub mod linecon;
pub(crate) mod ratio;
pub mod rigidity;
pub(crate) mod sampling;
pub mod sparsity;
