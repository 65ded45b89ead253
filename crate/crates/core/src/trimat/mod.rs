//! Generalized upper triangular matrix rings and their canonical additive
//! basis.

use crate::finalg::{
    AbelianGroup, AxiomError, BalancedMap, Bimodule, FiniteRing, ValidationConfig,
    ValidationSummary,
};
use crate::scan;
use rand::Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// A block position outside the upper triangle or the matrix size.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("block ({i},{j}) is not an upper-triangular position for size {n} (need 1 <= i <= j <= n)")]
pub struct BlockIndexError {
    pub i: usize,
    pub j: usize,
    pub n: usize,
}

/// A coordinate vector that does not fit the canonical basis.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoordsError {
    #[error("coordinate vector has length {got}, basis has {expected} generators")]
    Length { got: usize, expected: usize },
    #[error("coordinate {value} at position {position} exceeds generator order {order}")]
    Range {
        position: usize,
        value: u64,
        order: u64,
    },
}

/// Why a triangular matrix ring could not be assembled.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("block structure: {0}")]
    Shape(String),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error(
        "composition maps fail associativity across blocks ({i},{j},{k},{l}): \
         witness elements ({x}, {y}, {z})"
    )]
    CompAssoc {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
        x: u64,
        y: u64,
        z: u64,
    },
}

/// An element of the triangular matrix ring: one carrier index per
/// upper-triangular block, blocks ordered lexicographically by `(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriMatElement {
    entries: Vec<usize>,
}

impl TriMatElement {
    /// Raw block entries in lexicographic block order.
    pub fn entries(&self) -> &[usize] {
        &self.entries
    }
}

/// The additive generating set of the ring: one generator per cyclic factor
/// of each block carrier, blocks in lexicographic order, factors in carrier
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalBasis {
    orders: Vec<u64>,
    /// Generator -> 1-based block position.
    block_of: Vec<(usize, usize)>,
    /// Generator -> coordinate within its block carrier.
    coord_of: Vec<usize>,
    /// Block id -> index of its first generator (blocks with trivial
    /// carrier contribute no generators).
    first_gen: Vec<usize>,
    /// Block id -> number of generators.
    gen_count: Vec<usize>,
}

impl CanonicalBasis {
    /// Number of generators.
    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// Additive order of each generator, in basis order.
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn order(&self, g: usize) -> u64 {
        self.orders[g]
    }

    /// The 1-based block position a generator lives in.
    pub fn block_of(&self, g: usize) -> (usize, usize) {
        self.block_of[g]
    }

    /// Generators belonging to block id `bid`, as a range.
    pub fn block_generators(&self, bid: usize) -> std::ops::Range<usize> {
        let first = self.first_gen[bid];
        first..first + self.gen_count[bid]
    }
}

/// A validated generalized upper triangular matrix ring.
///
/// Built from `n` diagonal rings, one bimodule per strict upper block, and
/// one balanced composition map per block triple; construction re-checks
/// every cross-structure compatibility and the associativity of composition
/// across block quadruples, so a value of this type is a genuine finite
/// associative unital ring.
#[derive(Debug, Clone)]
pub struct TriMatSpec {
    n: usize,
    rings: Vec<Arc<FiniteRing>>,
    /// Strict upper blocks, flat-indexed by `(i-1)*n + (j-1)`.
    modules: Vec<Option<Arc<Bimodule>>>,
    /// Composition maps, flat-indexed by `((i-1)*n + (j-1))*n + (k-1)`.
    comps: Vec<Option<Arc<BalancedMap>>>,
    /// All upper-triangular block positions, lexicographic, 1-based.
    blocks: Vec<(usize, usize)>,
    /// Carrier size per block id.
    block_sizes: Vec<u64>,
    basis: Arc<CanonicalBasis>,
    validation: ValidationSummary,
}

impl TriMatSpec {
    /// Matrix size `n`.
    pub fn size(&self) -> usize {
        self.n
    }

    /// All upper-triangular block positions in lexicographic order.
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.blocks
    }

    pub fn ring(&self, i: usize) -> &Arc<FiniteRing> {
        &self.rings[i - 1]
    }

    /// The bimodule at strict upper block `(i, j)`.
    pub fn module(&self, i: usize, j: usize) -> &Arc<Bimodule> {
        self.modules[(i - 1) * self.n + (j - 1)]
            .as_ref()
            .expect("strict upper block")
    }

    /// The composition map `M_ij x M_jk -> M_ik`.
    pub fn comp(&self, i: usize, j: usize, k: usize) -> &Arc<BalancedMap> {
        self.comps[((i - 1) * self.n + (j - 1)) * self.n + (k - 1)]
            .as_ref()
            .expect("block triple")
    }

    pub fn basis(&self) -> &Arc<CanonicalBasis> {
        &self.basis
    }

    pub fn validation(&self) -> ValidationSummary {
        self.validation
    }

    /// The additive carrier of block `(i, j)`.
    pub fn block_group(&self, i: usize, j: usize) -> &AbelianGroup {
        if i == j {
            self.rings[i - 1].carrier()
        } else {
            self.module(i, j).carrier()
        }
    }

    /// Lexicographic id of block `(i, j)`; callers must pass `i <= j`.
    pub fn block_id(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i <= j && j <= self.n);
        // Rows 1..i each contribute a shrinking tail of blocks.
        let a = i - 1;
        a * (self.n + 1) - a * (a + 1) / 2 + (j - i)
    }

    fn check_block(&self, i: usize, j: usize) -> Result<(), BlockIndexError> {
        if 1 <= i && i <= j && j <= self.n {
            Ok(())
        } else {
            Err(BlockIndexError { i, j, n: self.n })
        }
    }

    /// Number of ring elements, if it fits in calculation range.
    pub fn element_count(&self) -> Option<u64> {
        scan::tuple_count(&self.block_sizes)
    }

    /// Decodes a flat element index (mixed radix over block sizes).
    pub fn element_from_flat(&self, t: u64) -> TriMatElement {
        let digits = scan::split_index(t, &self.block_sizes);
        TriMatElement {
            entries: digits.into_iter().map(|d| d as usize).collect(),
        }
    }

    /// A uniformly random element.
    pub fn random_element(&self, rng: &mut impl Rng) -> TriMatElement {
        TriMatElement {
            entries: self
                .block_sizes
                .iter()
                .map(|&s| rng.gen_range(0..s) as usize)
                .collect(),
        }
    }

    pub fn zero(&self) -> TriMatElement {
        TriMatElement {
            entries: vec![0; self.blocks.len()],
        }
    }

    /// The multiplicative identity: ring identities on the diagonal.
    pub fn one(&self) -> TriMatElement {
        let mut entries = vec![0; self.blocks.len()];
        for i in 1..=self.n {
            entries[self.block_id(i, i)] = self.rings[i - 1].one();
        }
        TriMatElement { entries }
    }

    /// The idempotent `E_ii`: the identity of `R_i` in block `(i, i)`.
    pub fn unit_e(&self, i: usize) -> TriMatElement {
        let mut entries = vec![0; self.blocks.len()];
        entries[self.block_id(i, i)] = self.rings[i - 1].one();
        TriMatElement { entries }
    }

    /// Embeds a block carrier index as an element supported on `(i, j)`.
    pub fn embed_block(
        &self,
        i: usize,
        j: usize,
        value: usize,
    ) -> Result<TriMatElement, BlockIndexError> {
        self.check_block(i, j)?;
        let mut entries = vec![0; self.blocks.len()];
        entries[self.block_id(i, j)] = value;
        Ok(TriMatElement { entries })
    }

    /// The block entry of an element at `(i, j)`.
    pub fn block_entry(
        &self,
        a: &TriMatElement,
        i: usize,
        j: usize,
    ) -> Result<usize, BlockIndexError> {
        self.check_block(i, j)?;
        Ok(a.entries[self.block_id(i, j)])
    }

    pub fn add(&self, a: &TriMatElement, b: &TriMatElement) -> TriMatElement {
        let entries = self
            .blocks
            .iter()
            .enumerate()
            .map(|(bid, &(i, j))| self.block_group(i, j).add(a.entries[bid], b.entries[bid]))
            .collect();
        TriMatElement { entries }
    }

    pub fn neg(&self, a: &TriMatElement) -> TriMatElement {
        let entries = self
            .blocks
            .iter()
            .enumerate()
            .map(|(bid, &(i, j))| self.block_group(i, j).neg(a.entries[bid]))
            .collect();
        TriMatElement { entries }
    }

    pub fn sub(&self, a: &TriMatElement, b: &TriMatElement) -> TriMatElement {
        self.add(a, &self.neg(b))
    }

    /// Integer scalar multiple.
    pub fn smul(&self, k: i64, a: &TriMatElement) -> TriMatElement {
        let entries = self
            .blocks
            .iter()
            .enumerate()
            .map(|(bid, &(i, j))| self.block_group(i, j).smul(k, a.entries[bid]))
            .collect();
        TriMatElement { entries }
    }

    /// One term of the block product: the `(t, s)` entry of the left factor
    /// times the `(s, k)` entry of the right factor, landing in `(t, k)`.
    fn term_mul(&self, t: usize, s: usize, k: usize, x: usize, y: usize) -> usize {
        match (t == s, s == k) {
            (true, true) => self.rings[t - 1].mul(x, y),
            (true, false) => self.module(t, k).act_left(x, y),
            (false, true) => self.module(t, k).act_right(x, y),
            (false, false) => self.comp(t, s, k).apply(x, y),
        }
    }

    /// Ring multiplication: block `(t, k)` of the product is the sum over
    /// `s` in `t..=k` of the `(t, s) x (s, k)` term.
    pub fn mul(&self, a: &TriMatElement, b: &TriMatElement) -> TriMatElement {
        let mut entries = vec![0usize; self.blocks.len()];
        for (bid, &(t, k)) in self.blocks.iter().enumerate() {
            let group = self.block_group(t, k);
            let mut acc = 0usize;
            for s in t..=k {
                let x = a.entries[self.block_id(t, s)];
                let y = b.entries[self.block_id(s, k)];
                acc = group.add(acc, self.term_mul(t, s, k, x, y));
            }
            entries[bid] = acc;
        }
        TriMatElement { entries }
    }

    /// The corner projection `E_ii A E_jj`: the `(i, j)` block of `A` alone.
    pub fn peirce(
        &self,
        a: &TriMatElement,
        i: usize,
        j: usize,
    ) -> Result<TriMatElement, BlockIndexError> {
        self.check_block(i, j)?;
        let mut entries = vec![0; self.blocks.len()];
        let bid = self.block_id(i, j);
        entries[bid] = a.entries[bid];
        Ok(TriMatElement { entries })
    }

    /// Coordinates of an element over the canonical basis.
    pub fn to_coords(&self, a: &TriMatElement) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.basis.len());
        for (bid, &(i, j)) in self.blocks.iter().enumerate() {
            out.extend(self.block_group(i, j).coords(a.entries[bid]));
        }
        out
    }

    /// Rebuilds an element from basis coordinates, validating ranges.
    pub fn from_coords(&self, coords: &[u64]) -> Result<TriMatElement, CoordsError> {
        if coords.len() != self.basis.len() {
            return Err(CoordsError::Length {
                got: coords.len(),
                expected: self.basis.len(),
            });
        }
        for (position, (&value, &order)) in coords.iter().zip(self.basis.orders()).enumerate() {
            if value >= order {
                return Err(CoordsError::Range {
                    position,
                    value,
                    order,
                });
            }
        }
        let mut entries = Vec::with_capacity(self.blocks.len());
        let mut at = 0usize;
        for &(i, j) in &self.blocks {
            let group = self.block_group(i, j);
            let k = group.rank();
            entries.push(group.index(&coords[at..at + k]));
            at += k;
        }
        Ok(TriMatElement { entries })
    }

    /// The basis generator `g` as a ring element.
    pub fn generator_element(&self, g: usize) -> TriMatElement {
        let (i, j) = self.basis.block_of[g];
        let coord = self.basis.coord_of[g];
        let mut entries = vec![0; self.blocks.len()];
        entries[self.block_id(i, j)] = self.block_group(i, j).generator(coord);
        TriMatElement { entries }
    }
}

/// Assembles and validates a triangular matrix ring with the default
/// validation budget.
pub fn build_spec(
    rings: Vec<Arc<FiniteRing>>,
    modules: BTreeMap<(usize, usize), Arc<Bimodule>>,
    comps: BTreeMap<(usize, usize, usize), Arc<BalancedMap>>,
) -> Result<TriMatSpec, BuildError> {
    build_spec_with_config(rings, modules, comps, &ValidationConfig::default())
}

/// Assembles and validates a triangular matrix ring.
///
/// Requires a ring for every diagonal position `1..=n` with `n >= 2`, a
/// bimodule for every strict upper block, and a composition map for every
/// triple `i < j < k`; verifies that rings referenced by the modules and
/// maps match the diagonal data, and that composition is associative across
/// every block quadruple `i < j < k < l`.
pub fn build_spec_with_config(
    rings: Vec<Arc<FiniteRing>>,
    modules: BTreeMap<(usize, usize), Arc<Bimodule>>,
    comps: BTreeMap<(usize, usize, usize), Arc<BalancedMap>>,
    cfg: &ValidationConfig,
) -> Result<TriMatSpec, BuildError> {
    let n = rings.len();
    if n < 2 {
        return Err(BuildError::Shape(format!(
            "need at least 2 diagonal rings, got {n}"
        )));
    }
    let mut validation = ValidationSummary::default();
    for r in &rings {
        validation.absorb(r.validation());
    }

    let same_ring = |a: &Arc<FiniteRing>, b: &Arc<FiniteRing>| Arc::ptr_eq(a, b) || a == b;

    let mut module_vec: Vec<Option<Arc<Bimodule>>> = vec![None; n * n];
    for (&(i, j), m) in &modules {
        if !(1 <= i && i < j && j <= n) {
            return Err(BuildError::Shape(format!(
                "module key ({i},{j}) is not a strict upper block for size {n}"
            )));
        }
        if !same_ring(m.left_ring(), &rings[i - 1]) {
            return Err(BuildError::Shape(format!(
                "module ({i},{j}) has a left ring different from diagonal ring {i}"
            )));
        }
        if !same_ring(m.right_ring(), &rings[j - 1]) {
            return Err(BuildError::Shape(format!(
                "module ({i},{j}) has a right ring different from diagonal ring {j}"
            )));
        }
        validation.absorb(m.validation());
        module_vec[(i - 1) * n + (j - 1)] = Some(m.clone());
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if module_vec[(i - 1) * n + (j - 1)].is_none() {
                return Err(BuildError::Shape(format!(
                    "missing module for block ({i},{j})"
                )));
            }
        }
    }

    let same_module = |a: &Arc<Bimodule>, b: &Arc<Bimodule>| Arc::ptr_eq(a, b) || a == b;
    let mut comp_vec: Vec<Option<Arc<BalancedMap>>> = vec![None; n * n * n];
    for (&(i, j, k), c) in &comps {
        if !(1 <= i && i < j && j < k && k <= n) {
            return Err(BuildError::Shape(format!(
                "composition key ({i},{j},{k}) is not an increasing block triple for size {n}"
            )));
        }
        let mij = module_vec[(i - 1) * n + (j - 1)].as_ref().unwrap();
        let mjk = module_vec[(j - 1) * n + (k - 1)].as_ref().unwrap();
        let mik = module_vec[(i - 1) * n + (k - 1)].as_ref().unwrap();
        if !same_module(c.src_left(), mij)
            || !same_module(c.src_right(), mjk)
            || !same_module(c.target(), mik)
        {
            return Err(BuildError::Shape(format!(
                "composition map ({i},{j},{k}) does not connect modules ({i},{j}) x ({j},{k}) -> ({i},{k})"
            )));
        }
        validation.absorb(c.validation());
        comp_vec[((i - 1) * n + (j - 1)) * n + (k - 1)] = Some(c.clone());
    }
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                if comp_vec[((i - 1) * n + (j - 1)) * n + (k - 1)].is_none() {
                    return Err(BuildError::Shape(format!(
                        "missing composition map for blocks ({i},{j},{k})"
                    )));
                }
            }
        }
    }

    // Associativity of composition across block quadruples.
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let c_ijk = comp_vec[((i - 1) * n + (j - 1)) * n + (k - 1)]
                        .as_ref()
                        .unwrap();
                    let c_ikl = comp_vec[((i - 1) * n + (k - 1)) * n + (l - 1)]
                        .as_ref()
                        .unwrap();
                    let c_jkl = comp_vec[((j - 1) * n + (k - 1)) * n + (l - 1)]
                        .as_ref()
                        .unwrap();
                    let c_ijl = comp_vec[((i - 1) * n + (j - 1)) * n + (l - 1)]
                        .as_ref()
                        .unwrap();
                    let sizes = [
                        c_ijk.src_left().size(),
                        c_ijk.src_right().size(),
                        c_ikl.src_right().size(),
                    ];
                    let count = scan::tuple_count(&sizes).ok_or_else(|| {
                        BuildError::Shape("block carrier product overflows".into())
                    })?;
                    let hit = if count <= cfg.tuple_cap {
                        validation.absorb(ValidationSummary {
                            sampled: false,
                            tuples_checked: count,
                        });
                        scan::find_violation(count, |t| {
                            let d = scan::split_index(t, &sizes);
                            let (x, y, z) = (d[0] as usize, d[1] as usize, d[2] as usize);
                            let lhs = c_ikl.apply(c_ijk.apply(x, y), z);
                            let rhs = c_ijl.apply(x, c_jkl.apply(y, z));
                            (lhs != rhs).then_some((x as u64, y as u64, z as u64))
                        })
                    } else {
                        validation.absorb(ValidationSummary {
                            sampled: true,
                            tuples_checked: cfg.tuple_cap,
                        });
                        scan::find_violation_sampled(count, cfg.tuple_cap, cfg.seed, |t| {
                            let d = scan::split_index(t, &sizes);
                            let (x, y, z) = (d[0] as usize, d[1] as usize, d[2] as usize);
                            let lhs = c_ikl.apply(c_ijk.apply(x, y), z);
                            let rhs = c_ijl.apply(x, c_jkl.apply(y, z));
                            (lhs != rhs).then_some((x as u64, y as u64, z as u64))
                        })
                    };
                    if let Some((x, y, z)) = hit {
                        return Err(BuildError::CompAssoc {
                            i,
                            j,
                            k,
                            l,
                            x,
                            y,
                            z,
                        });
                    }
                }
            }
        }
    }

    let mut blocks = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            blocks.push((i, j));
        }
    }

    let block_group = |i: usize, j: usize| -> &AbelianGroup {
        if i == j {
            rings[i - 1].carrier()
        } else {
            module_vec[(i - 1) * n + (j - 1)]
                .as_ref()
                .unwrap()
                .carrier()
        }
    };
    let block_sizes: Vec<u64> = blocks
        .iter()
        .map(|&(i, j)| block_group(i, j).size())
        .collect();

    let mut orders = Vec::new();
    let mut block_of = Vec::new();
    let mut coord_of = Vec::new();
    let mut first_gen = Vec::new();
    let mut gen_count = Vec::new();
    for &(i, j) in &blocks {
        let group = block_group(i, j);
        first_gen.push(orders.len());
        gen_count.push(group.rank());
        for t in 0..group.rank() {
            orders.push(group.orders()[t]);
            block_of.push((i, j));
            coord_of.push(t);
        }
    }
    let basis = CanonicalBasis {
        orders,
        block_of,
        coord_of,
        first_gen,
        gen_count,
    };

    Ok(TriMatSpec {
        n,
        rings,
        modules: module_vec,
        comps: comp_vec,
        blocks,
        block_sizes,
        basis: Arc::new(basis),
        validation,
    })
}

/// The full upper triangular matrix ring `UT_n(Z/m)`: every diagonal ring
/// is `Z/m`, every strict upper block is `Z/m` with multiplication actions,
/// and composition is multiplication.
pub fn ut_zmod(n: usize, m: u64) -> Result<TriMatSpec, BuildError> {
    let ring = Arc::new(crate::finalg::ring_zmod(m)?);
    let module = Arc::new(crate::finalg::bimodule_new(
        ring.clone(),
        ring.clone(),
        AbelianGroup::zmod(m)?,
        |a, x| ((a as u64 * x as u64) % m) as usize,
        |x, a| ((x as u64 * a as u64) % m) as usize,
    )?);
    let comp = Arc::new(crate::finalg::balanced_map_new(
        module.clone(),
        module.clone(),
        module.clone(),
        |x, y| ((x as u64 * y as u64) % m) as usize,
    )?);

    let rings = vec![ring; n];
    let mut modules = BTreeMap::new();
    let mut comps = BTreeMap::new();
    for i in 1..=n {
        for j in i + 1..=n {
            modules.insert((i, j), module.clone());
            for k in j + 1..=n {
                comps.insert((i, j, k), comp.clone());
            }
        }
    }
    build_spec(rings, modules, comps)
}
