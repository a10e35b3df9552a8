//! Explicit Ramanujan complexes over `F_q((y))`.
//!
//! Finite fields and valued matrices, the Cartwright-Steger generators and
//! building balls, congruence quotients with their Cayley complexes, spectra,
//! and mixing, colouring and injectivity-radius checks.

pub mod analysis;
pub mod complex;
pub mod cslattice;
pub mod error;
pub mod gf;
pub mod laurent;
pub mod quotient;
pub mod rng;
pub mod spectra;

pub use analysis::{ColoringMode, SubsetMode, Q};
pub use complex::{BipartiteIncidence, MultiGraph, PartiteHypergraph, PurityReport};
pub use cslattice::{BuildingBall, CsAlgebraRep, Generator, GeneratorSet};
pub use error::{Error, Result};
pub use gf::{Fe, Field, Poly};
pub use laurent::{classify_relation, relative_position, RatFun, RelPosition, Relation, ValMatrix};
pub use quotient::{CayleyGraph, CongruenceMap, CoverTable, GroupTable, ProjMatrix};
pub use rng::SplitMix64;
pub use spectra::{LanczosConfig, Method, Operator, SparseSym, Spectrum};
