//! Exact integer fixed point index for compositions of acyclic carriers.
//!
//! The crate works entirely over the integers (arbitrary precision) and never
//! touches floating point. The pieces build on each other:
//!
//! - [`complex`]: finite simplicial complexes, subcomplexes, open polyhedral
//!   sets and towers of barycentric subdivisions with exact rational geometry.
//! - [`matrix`], [`smith`], [`chain`], [`homology`]: sparse integer matrices,
//!   Smith normal form, chain complexes and chain maps, homology, cohomology
//!   and induced maps on homology.
//! - [`cover`]: star covers, nerves and refinement projections.
//! - [`carrier`]: acyclic carriers and the chain approximations they carry,
//!   homotopies between approximations, composition and prism homotopies.
//! - [`index`]: the fixed point index of a carrier (or a composition of
//!   carriers) on an open polyhedral set, together with the axiom harness.
//! - [`corpus`]: standard complexes and map models used by tests and the CLI.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod carrier;
pub mod chain;
pub mod complex;
pub mod corpus;
pub mod cover;
pub mod homology;
pub mod index;
pub mod matrix;
pub mod rational;
pub mod smith;

pub use num_bigint::BigInt;

pub use carrier::{AcyclicCarrier, ChainApproximation, VertexRule};
pub use chain::{Chain, ChainComplexData, GradedIntegerMap, Verification};
pub use complex::{OpenPolyhedralSet, Simplex, SimplexId, SimplicialComplex, Subcomplex, SubdivisionRecord, Vertex};
pub use homology::HomologyProfile;
pub use index::{IndexProblem, IndexResult};
pub use matrix::SparseIntegerMatrix;
pub use smith::SmithDecomposition;
