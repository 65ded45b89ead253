//! Generalized upper triangular matrix rings over finite base rings.
//!
//! The library builds rings of the shape
//!
//! ```text
//!     [ R_1  M_12  M_13 ... M_1n ]
//!     [  0   R_2   M_23 ... M_2n ]
//!     [              ...         ]
//!     [  0    0     0   ...  R_n ]
//! ```
//!
//! from finite unital rings `R_i`, finite `(R_i, R_j)`-bimodules `M_ij`, and
//! balanced composition maps `M_ij x M_jk -> M_ik`, all represented exactly
//! (no floating point anywhere). On top of the ring it computes, by exact
//! linear algebra over composite moduli, the full spaces of additive maps
//! satisfying a chosen product rule (derivations, Jordan derivations, and
//! two related variants), and it checks a suite of structural identities
//! that constrain how such maps act block by block.
//!
//! Everything is deterministic: given the same instance, caps, and seed, all
//! solvers and checkers produce identical output regardless of thread count.

pub mod derivlab;
pub mod finalg;
pub mod linmap;
mod scan;
pub mod trimat;

pub use finalg::{
    bimodule_new, ring_from_tables, ring_zmod, AbelianGroup, AxiomError, BalancedMap, Bimodule,
    FiniteRing, ValidationConfig, ValidationSummary,
};
pub use linmap::{AddMap, LinearSystem, SolutionSpace, SystemRow};
pub use trimat::{CanonicalBasis, TriMatElement, TriMatSpec};
