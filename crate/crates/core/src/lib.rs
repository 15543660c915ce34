//! Exact genus-zero reconstruction on projective spaces: J-functions,
//! S-matrices and quantum products recovered from a single point of the
//! Lagrangian cone, in quantum cohomology and quantum K-theory.

pub mod birkhoff;
pub mod cone_h;
pub mod cone_k;
pub mod error;
pub mod invariants;
pub mod job;
pub mod matrix;
pub mod poly;
pub mod ratfn;
pub mod rational;
pub mod ring;
pub mod seed;
pub mod selftest;
pub mod series;
pub mod smatrix;

pub use error::{Error, Result};
pub use rational::Rat;
pub use series::{Algebra, HSeries, KSeries, LambdaMode, Mono, Series, Truncation};
