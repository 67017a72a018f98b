//! Compact Lie algebras, quaternion triples of complex structures built from
//! Lie-algebra automorphisms, and numerical certification of HKT geometry on
//! group manifolds and homogeneous spaces.

pub mod autom;
pub mod cstruct;
pub mod error;
pub mod liealg;
pub mod linalg;
pub mod rootsys;
pub mod spaces;

pub use error::{HktError, Result};
pub use rootsys::{Family, Root, RootSystem};
