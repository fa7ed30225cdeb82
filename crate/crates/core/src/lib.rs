//! Exact symbolic engine for genus-zero orbifold Gromov–Witten theory of multi-root stacks
//! `X_{D,r}` over products of projective spaces.
//!
//! The crate builds the hypergeometric I-functions of root stacks, of their infinite-root
//! limits and of the matching relative and local theories as exact graded series, reads
//! invariants off them when the mirror map is trivial, and checks the identities that link
//! these theories: large-root stabilization, the local/orbifold correspondence with its
//! sign factors, and the equality of regularized quantum periods with classical periods of
//! the mirror superpotential.
//!
//! Layout:
//! - [`algebra`]: exact sparse series over nilpotent cohomology rings
//! - [`targets`]: target spaces, divisor arrangements, root data and base J-functions
//! - [`ifunctions`]: I-function constructions
//! - [`invariants`]: mirror-map analysis, invariant extraction, stabilization
//! - [`identities`]: local/relative/orbifold series identities
//! - [`periods`]: quantum, regularized and classical periods

pub mod algebra;
pub mod error;
pub mod identities;
pub mod ifunctions;
pub mod invariants;
pub mod periods;
pub mod targets;

pub use error::{Error, Result};
