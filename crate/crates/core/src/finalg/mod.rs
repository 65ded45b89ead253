//! Finite algebraic structures: abelian groups, unital rings, bimodules,
//! and balanced pairings, all with table-driven exact arithmetic.
//!
//! Every constructor validates the defining axioms exhaustively (up to a
//! configurable tuple budget, above which scans fall back to seeded
//! sampling) and reports the first violation together with a witness tuple.
//! Carriers are always coordinate vectors over declared cyclic orders;
//! rings given by raw Cayley tables are decomposed into cyclic factors on
//! construction so that downstream linear algebra can treat every carrier
//! uniformly.

mod balanced;
mod bimodule;
mod group;
mod ring;

pub use balanced::{balanced_map_new, BalancedMap};
pub use bimodule::{bimodule_new, Bimodule};
pub use group::AbelianGroup;
pub use ring::{ring_from_tables, ring_zmod, FiniteRing};

use std::fmt;

/// Budget and seed for exhaustive-or-sampled validation scans.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig {
    /// Largest tuple space scanned exhaustively; larger spaces are sampled.
    pub tuple_cap: u64,
    /// Seed for the sampled fallback.
    pub seed: u64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            tuple_cap: 10_000_000,
            seed: 1729,
        }
    }
}

/// What a validation pass actually covered.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationSummary {
    /// True if at least one axiom scan was sampled instead of exhaustive.
    pub sampled: bool,
    /// Total number of tuples checked across all scans.
    pub tuples_checked: u64,
}

impl ValidationSummary {
    pub(crate) fn absorb(&mut self, other: ValidationSummary) {
        self.sampled |= other.sampled;
        self.tuples_checked = self.tuples_checked.saturating_add(other.tuples_checked);
    }
}

/// A violated axiom, reported with the structure, the law, and a witness.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error("modulus {modulus} is not a valid ring modulus (need at least 2)")]
    InvalidModulus { modulus: u64 },
    #[error("cyclic order {order} is not a valid carrier order (need at least 2)")]
    InvalidOrder { order: u64 },
    #[error("carrier too large for {context}: {size} elements")]
    TooLarge { context: &'static str, size: u64 },
    #[error("{context}: {detail}")]
    Shape {
        context: &'static str,
        detail: String,
    },
    #[error("{structure} violates {law}: witness {}", format_witness(witness))]
    Law {
        structure: &'static str,
        law: &'static str,
        witness: Vec<u64>,
    },
}

fn format_witness(witness: &[u64]) -> String {
    let parts: Vec<String> = witness.iter().map(u64::to_string).collect();
    format!("({})", parts.join(", "))
}

impl AxiomError {
    pub(crate) fn law(structure: &'static str, law: &'static str, witness: Vec<u64>) -> Self {
        AxiomError::Law {
            structure,
            law,
            witness,
        }
    }
}

impl fmt::Display for ValidationSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sampled {
            write!(f, "sampled ({} tuples checked)", self.tuples_checked)
        } else {
            write!(f, "exhaustive ({} tuples checked)", self.tuples_checked)
        }
    }
}
