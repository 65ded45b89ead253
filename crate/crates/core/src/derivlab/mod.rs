//! Derivation and Jordan-derivation analysis on triangular matrix rings.
//!
//! Four flavours of the Leibniz rule are supported (see [`DerivKind`]).
//! For each flavour the module offers two independent routes to the same
//! answer: [`is_member`] evaluates the defining identity of a single
//! additive map by direct element arithmetic, while [`solve_space`] builds
//! the identity's linear conditions symbolically over the canonical basis
//! and computes the exact solution group with the mixed-modulus kernel
//! solver. Cross-checking the two routes against full enumeration is the
//! backbone of this crate's test suite.
//!
//! On top of the solvers sit [`compare_spaces`] (is every Jordan map a
//! derivation on this instance?), [`check_hypotheses`] (faithfulness and
//! 2-torsion flags), [`inner_derivation`] (commutator maps, the canonical
//! source of true derivations) and [`counterexample_scan`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::linmap::{AddMap, MapError, SolutionSpace, SystemError, SystemSolver};
use crate::scan;
use crate::trimat::{TriMatElement, TriMatSpec};

mod lemmas;

pub use lemmas::{
    check_block_image_support, check_block_product_rule, check_component_leibniz,
    check_diagonal_image_support, check_diagonal_leibniz, check_image_block_formula,
    check_left_edge_leibniz, check_left_factor_component_shift, check_left_tail_factorization,
    check_off_diagonal_image_formula, check_product_component_full, check_product_component_left,
    check_product_component_right, check_right_edge_leibniz, check_right_factor_component_assoc,
    check_right_tail_factorization, check_unit_component_antisymmetry, check_unit_image_support,
    lemma_suite, LemmaEntry, LemmaStatus, LEMMA_IDS,
};

/// Which multiplicative identity an additive map is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivKind {
    /// `D(ab) = D(a)b + aD(b)`.
    Derivation,
    /// `D(ab) = D(b)a + bD(a)`.
    Antiderivation,
    /// `D(ab + ba) = D(a)b + aD(b) + D(b)a + bD(a)`.
    JordanLinearized,
    /// `D(a^2) = D(a)a + aD(a)`, checked on every element.
    JordanSquared,
}

impl DerivKind {
    pub const ALL: [DerivKind; 4] = [
        DerivKind::Derivation,
        DerivKind::Antiderivation,
        DerivKind::JordanLinearized,
        DerivKind::JordanSquared,
    ];

    /// Stable lowercase label used in reports and errors.
    pub fn label(self) -> &'static str {
        match self {
            DerivKind::Derivation => "derivation",
            DerivKind::Antiderivation => "antiderivation",
            DerivKind::JordanLinearized => "jordan_linearized",
            DerivKind::JordanSquared => "jordan_squared",
        }
    }

    /// True for the kinds whose defect is biadditive in the two factors,
    /// so that checking generator pairs suffices.
    fn pairwise(self) -> bool {
        !matches!(self, DerivKind::JordanSquared)
    }
}

impl fmt::Display for DerivKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Work limits and the seed for every randomized scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest element count for which per-element scans (the squared
    /// Jordan identity, exhaustive formula checks) are attempted.
    pub element_cap: u64,
    /// Largest map count the enumeration-based oracles will walk.
    pub oracle_cap: u64,
    /// Seed for all sampled checks.
    pub seed: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            element_cap: 100_000,
            oracle_cap: 2_000_000,
            seed: 1729,
        }
    }
}

/// A concrete failure of a defining identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: DerivKind,
    /// Coordinates of the first element of the violating tuple.
    pub first: Vec<u64>,
    /// Coordinates of the second element, for the pairwise identities.
    pub second: Option<Vec<u64>>,
    /// Coordinates of the nonzero defect.
    pub defect: Vec<u64>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} identity fails at a = {:?}", self.kind, self.first)?;
        if let Some(b) = &self.second {
            write!(f, ", b = {b:?}")?;
        }
        write!(f, " with defect {:?}", self.defect)
    }
}

/// Why a membership test or space computation could not run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DerivError {
    #[error("the squared identity quantifies over {needed} elements, above the element cap {cap}")]
    ElementCap { needed: u128, cap: u64 },
    #[error("enumeration would visit {count} maps, above the oracle cap {cap}")]
    OracleCap { count: BigUint, cap: u64 },
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("solved generator failed its own membership re-check: {0}")]
    SelfCheck(Box<Violation>),
}

/// Evaluates the defect of the pairwise identity `kind` at `(a, b)`.
fn pair_defect(
    spec: &TriMatSpec,
    map: &AddMap,
    kind: DerivKind,
    a: &TriMatElement,
    b: &TriMatElement,
) -> TriMatElement {
    let da = map.apply(spec, a);
    let db = map.apply(spec, b);
    let ab = spec.mul(a, b);
    match kind {
        DerivKind::Derivation => {
            let rhs = spec.add(&spec.mul(&da, b), &spec.mul(a, &db));
            spec.sub(&map.apply(spec, &ab), &rhs)
        }
        DerivKind::Antiderivation => {
            let rhs = spec.add(&spec.mul(&db, a), &spec.mul(b, &da));
            spec.sub(&map.apply(spec, &ab), &rhs)
        }
        DerivKind::JordanLinearized => {
            let sym = spec.add(&ab, &spec.mul(b, a));
            let rhs = spec.add(
                &spec.add(&spec.mul(&da, b), &spec.mul(a, &db)),
                &spec.add(&spec.mul(&db, a), &spec.mul(b, &da)),
            );
            spec.sub(&map.apply(spec, &sym), &rhs)
        }
        DerivKind::JordanSquared => unreachable!("squared identity is not pairwise"),
    }
}

/// Evaluates the squared-identity defect at a single element.
fn squared_defect(spec: &TriMatSpec, map: &AddMap, x: &TriMatElement) -> TriMatElement {
    let dx = map.apply(spec, x);
    let rhs = spec.add(&spec.mul(&dx, x), &spec.mul(x, &dx));
    spec.sub(&map.apply(spec, &spec.mul(x, x)), &rhs)
}

/// Number of elements the squared identity must visit, or an error when it
/// exceeds the cap.
fn squared_scan_count(spec: &TriMatSpec, caps: &Caps) -> Result<u64, DerivError> {
    let needed: u128 = spec
        .basis()
        .orders()
        .iter()
        .fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
    match spec.element_count() {
        Some(c) if c <= caps.element_cap => Ok(c),
        _ => Err(DerivError::ElementCap {
            needed,
            cap: caps.element_cap,
        }),
    }
}

/// Tests whether `map` satisfies the identity of `kind` on all of `spec`.
///
/// The pairwise identities are biadditive in the two factors, so checking
/// all ordered pairs of basis generators is exact. The squared identity is
/// not additive in its single argument and is therefore checked on every
/// element, refusing when the element count exceeds `caps.element_cap`.
/// Returns the first violating tuple in scan order, or `None` on success.
pub fn is_member(
    spec: &TriMatSpec,
    map: &AddMap,
    kind: DerivKind,
    caps: &Caps,
) -> Result<Option<Violation>, DerivError> {
    if map.basis().as_ref() != spec.basis().as_ref() {
        return Err(MapError::BasisMismatch.into());
    }
    let basis = spec.basis();
    let g = basis.len();
    if kind.pairwise() {
        for p in 0..g {
            let a = spec.generator_element(p);
            for q in 0..g {
                let b = spec.generator_element(q);
                let defect = pair_defect(spec, map, kind, &a, &b);
                if defect != spec.zero() {
                    return Ok(Some(Violation {
                        kind,
                        first: spec.to_coords(&a),
                        second: Some(spec.to_coords(&b)),
                        defect: spec.to_coords(&defect),
                    }));
                }
            }
        }
        return Ok(None);
    }
    let count = squared_scan_count(spec, caps)?;
    let hit = scan::find_violation(count, |t| {
        let x = spec.element_from_flat(t);
        let defect = squared_defect(spec, map, &x);
        if defect != spec.zero() {
            Some(Violation {
                kind,
                first: spec.to_coords(&x),
                second: None,
                defect: spec.to_coords(&defect),
            })
        } else {
            None
        }
    });
    Ok(hit)
}

/// Per-generator left and right multiplication tables in coordinates.
///
/// `right[q][rp * g + r]` is coordinate `rp` of `g_r * g_q`, and
/// `left[q][rp * g + r]` is coordinate `rp` of `g_q * g_r`; both are what
/// a symbolic `D(a) * b` / `a * D(b)` expands to over the unknown matrix.
struct MulTables {
    g: usize,
    right: Vec<Vec<u64>>,
    left: Vec<Vec<u64>>,
}

impl MulTables {
    fn new(spec: &TriMatSpec) -> Self {
        let g = spec.basis().len();
        let gens: Vec<TriMatElement> = (0..g).map(|t| spec.generator_element(t)).collect();
        let mut right = vec![vec![0u64; g * g]; g];
        let mut left = vec![vec![0u64; g * g]; g];
        for q in 0..g {
            for r in 0..g {
                let rq = spec.to_coords(&spec.mul(&gens[r], &gens[q]));
                let qr = spec.to_coords(&spec.mul(&gens[q], &gens[r]));
                for rp in 0..g {
                    right[q][rp * g + r] = rq[rp];
                    left[q][rp * g + r] = qr[rp];
                }
            }
        }
        MulTables { g, right, left }
    }

    fn right_at(&self, q: usize, rp: usize, r: usize) -> u64 {
        self.right[q][rp * self.g + r]
    }

    fn left_at(&self, q: usize, rp: usize, r: usize) -> u64 {
        self.left[q][rp * self.g + r]
    }
}

/// Signed accumulator for one symbolic condition row.
struct RowBuffer {
    acc: Vec<i128>,
    out: Vec<u64>,
}

impl RowBuffer {
    fn new(width: usize) -> Self {
        RowBuffer {
            acc: vec![0; width],
            out: vec![0; width],
        }
    }

    fn reset(&mut self) {
        self.acc.fill(0);
    }

    fn add(&mut self, idx: usize, v: u64) {
        self.acc[idx] += v as i128;
    }

    fn sub(&mut self, idx: usize, v: u64) {
        self.acc[idx] -= v as i128;
    }

    fn sub_prod(&mut self, idx: usize, a: u64, b: u64, modulus: u64) {
        self.acc[idx] -= ((a as u128 * b as u128) % modulus as u128) as i128;
    }

    fn emit(&mut self, modulus: u64) -> &[u64] {
        let m = modulus as i128;
        for (o, &a) in self.out.iter_mut().zip(&self.acc) {
            *o = a.rem_euclid(m) as u64;
        }
        &self.out
    }
}

/// Pushes the condition rows of the pairwise identity `kind` at the
/// generator pair `(p, q)`; one row per target coordinate.
fn push_pair_rows(
    solver: &mut SystemSolver,
    buf: &mut RowBuffer,
    spec: &TriMatSpec,
    tables: &MulTables,
    kind: DerivKind,
    p: usize,
    q: usize,
) -> Result<(), SystemError> {
    let basis = spec.basis();
    let g = basis.len();
    let a = spec.generator_element(p);
    let b = spec.generator_element(q);
    let ab = spec.mul(&a, &b);
    let w = match kind {
        DerivKind::JordanLinearized => spec.to_coords(&spec.add(&ab, &spec.mul(&b, &a))),
        _ => spec.to_coords(&ab),
    };
    for rp in 0..g {
        let m = basis.order(rp);
        buf.reset();
        for (c, &wc) in w.iter().enumerate() {
            buf.add(rp * g + c, wc);
        }
        for r in 0..g {
            match kind {
                DerivKind::Derivation => {
                    buf.sub(r * g + p, tables.right_at(q, rp, r));
                    buf.sub(r * g + q, tables.left_at(p, rp, r));
                }
                DerivKind::Antiderivation => {
                    buf.sub(r * g + q, tables.right_at(p, rp, r));
                    buf.sub(r * g + p, tables.left_at(q, rp, r));
                }
                DerivKind::JordanLinearized => {
                    buf.sub(r * g + p, tables.right_at(q, rp, r));
                    buf.sub(r * g + p, tables.left_at(q, rp, r));
                    buf.sub(r * g + q, tables.left_at(p, rp, r));
                    buf.sub(r * g + q, tables.right_at(p, rp, r));
                }
                DerivKind::JordanSquared => unreachable!("squared identity is not pairwise"),
            }
        }
        let row = buf.emit(m).to_vec();
        solver.push_row(&row, m)?;
    }
    Ok(())
}

/// Pushes the condition rows of the squared identity at the element `x`.
fn push_squared_rows(
    solver: &mut SystemSolver,
    buf: &mut RowBuffer,
    spec: &TriMatSpec,
    x: &TriMatElement,
) -> Result<(), SystemError> {
    let basis = spec.basis();
    let g = basis.len();
    let u = spec.to_coords(x);
    let w = spec.to_coords(&spec.mul(x, x));
    // Coordinates of g_r * x and x * g_r, for the symbolic D(x)x and xD(x).
    let mut pre = Vec::with_capacity(g);
    let mut post = Vec::with_capacity(g);
    for r in 0..g {
        let gr = spec.generator_element(r);
        pre.push(spec.to_coords(&spec.mul(&gr, x)));
        post.push(spec.to_coords(&spec.mul(x, &gr)));
    }
    for rp in 0..g {
        let m = basis.order(rp);
        buf.reset();
        for (c, &wc) in w.iter().enumerate() {
            buf.add(rp * g + c, wc);
        }
        for r in 0..g {
            let scale = (pre[r][rp] + post[r][rp]) % m;
            if scale == 0 {
                continue;
            }
            for (c, &uc) in u.iter().enumerate() {
                if uc != 0 {
                    buf.sub_prod(r * g + c, scale, uc, m);
                }
            }
        }
        let row = buf.emit(m).to_vec();
        solver.push_row(&row, m)?;
    }
    Ok(())
}

/// Computes the exact group of all additive maps satisfying `kind`.
///
/// The unknowns are the `g x g` matrix entries of the map over the
/// canonical basis; the defining identity contributes one condition row
/// per (generator pair | element) and target coordinate, and the
/// additive-map compatibility conditions pin each entry to a well-defined
/// homomorphism. Every generator of the solved space is re-verified
/// through [`is_member`] before being returned.
pub fn solve_space(
    spec: &TriMatSpec,
    kind: DerivKind,
    caps: &Caps,
) -> Result<SolutionSpace<AddMap>, DerivError> {
    let basis = spec.basis().clone();
    let g = basis.len();
    let mut moduli = Vec::with_capacity(g * g);
    for r in 0..g {
        for _c in 0..g {
            moduli.push(basis.order(r));
        }
    }
    let mut solver = SystemSolver::new(moduli, &[])?;
    let mut buf = RowBuffer::new(g * g);

    // Entry (r, c) must define a homomorphism Z/order(c) -> Z/order(r):
    // order(c) * x_{r,c} = 0 (mod order(r)).
    let mut hom = vec![0u64; g * g];
    for r in 0..g {
        let m = basis.order(r);
        for c in 0..g {
            let coeff = basis.order(c) % m;
            if coeff != 0 {
                hom[r * g + c] = coeff;
                solver.push_row(&hom, m)?;
                hom[r * g + c] = 0;
            }
        }
    }

    if kind.pairwise() {
        let tables = MulTables::new(spec);
        for p in 0..g {
            for q in p..g {
                push_pair_rows(&mut solver, &mut buf, spec, &tables, kind, p, q)?;
                if kind != DerivKind::JordanLinearized && p != q {
                    // Only the linearized identity is symmetric in (p, q).
                    push_pair_rows(&mut solver, &mut buf, spec, &tables, kind, q, p)?;
                }
            }
        }
    } else {
        let count = squared_scan_count(spec, caps)?;
        for t in 0..count {
            let x = spec.element_from_flat(t);
            push_squared_rows(&mut solver, &mut buf, spec, &x)?;
        }
    }

    let raw = solver.finish();
    let mut generators = Vec::with_capacity(raw.generators.len());
    for entries in raw.generators {
        let map = AddMap::from_entries(basis.clone(), entries)?;
        if let Some(v) = is_member(spec, &map, kind, caps)? {
            return Err(DerivError::SelfCheck(Box::new(v)));
        }
        generators.push(map);
    }
    Ok(SolutionSpace {
        generators,
        moduli: raw.moduli,
        cardinality: raw.cardinality,
    })
}

/// Walks every member of a solved space (each exactly once).
///
/// Refuses when the cardinality exceeds `cap`; the walk is depth-first
/// over the unique combination coefficients, so its order is stable.
pub fn space_members(
    basis: &Arc<crate::trimat::CanonicalBasis>,
    space: &SolutionSpace<AddMap>,
    cap: u64,
) -> Result<Vec<AddMap>, DerivError> {
    if space.cardinality > BigUint::from(cap) {
        return Err(DerivError::OracleCap {
            count: space.cardinality.clone(),
            cap,
        });
    }
    let mut out = Vec::new();
    let zero = AddMap::zero(basis.clone());
    fn rec(space: &SolutionSpace<AddMap>, depth: usize, current: AddMap, out: &mut Vec<AddMap>) {
        if depth == space.generators.len() {
            out.push(current);
            return;
        }
        let mut acc = current;
        for c in 0..space.moduli[depth] {
            if c > 0 {
                acc = acc.add(&space.generators[depth]).expect("same basis");
            }
            rec(space, depth + 1, acc.clone(), out);
        }
    }
    rec(space, 0, zero, &mut out);
    Ok(out)
}

/// The faithfulness and torsion flags the main comparison depends on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    /// Entry `i - 1` says whether `M_{i,n}` is faithful as a left
    /// `R_i`-module, for `1 <= i <= n-1`.
    pub faithful_left: Vec<bool>,
    /// Whether `M_{1,n}` is faithful as a right `R_n`-module.
    pub faithful_right_last: bool,
    /// Whether the additive group of the whole ring has no 2-torsion.
    pub two_torsion_free: bool,
}

impl HypothesisReport {
    /// All faithfulness flags hold.
    pub fn all_faithful(&self) -> bool {
        self.faithful_right_last && self.faithful_left.iter().all(|&b| b)
    }

    /// Every hypothesis holds, torsion included.
    pub fn all_hold(&self) -> bool {
        self.two_torsion_free && self.all_faithful()
    }
}

/// Computes the hypothesis flags from annihilators and generator orders.
pub fn check_hypotheses(spec: &TriMatSpec) -> HypothesisReport {
    let n = spec.size();
    let faithful_left = (1..n)
        .map(|i| spec.module(i, n).is_faithful_left())
        .collect();
    let faithful_right_last = spec.module(1, n).is_faithful_right();
    let two_torsion_free = spec.basis().orders().iter().all(|&d| d % 2 == 1);
    HypothesisReport {
        faithful_left,
        faithful_right_last,
        two_torsion_free,
    }
}

/// How the derivation space sits inside the linearized Jordan space.
#[derive(Debug, Clone)]
pub struct SpaceComparison {
    pub derivation: SolutionSpace<AddMap>,
    pub jordan: SolutionSpace<AddMap>,
    /// Every generator of the derivation space passes the linearized
    /// Jordan membership test.
    pub derivation_subset_jordan: bool,
    /// The two spaces coincide.
    pub equal: bool,
    /// Generators of the Jordan space that are not derivations; empty
    /// exactly when the spaces coincide.
    pub jordan_only_generators: Vec<AddMap>,
}

/// Solves both spaces and reports inclusion, equality, and witnesses.
pub fn compare_spaces(spec: &TriMatSpec, caps: &Caps) -> Result<SpaceComparison, DerivError> {
    let derivation = solve_space(spec, DerivKind::Derivation, caps)?;
    let jordan = solve_space(spec, DerivKind::JordanLinearized, caps)?;
    let mut derivation_subset_jordan = true;
    for gen in &derivation.generators {
        if is_member(spec, gen, DerivKind::JordanLinearized, caps)?.is_some() {
            derivation_subset_jordan = false;
        }
    }
    let mut jordan_only_generators = Vec::new();
    for gen in &jordan.generators {
        if is_member(spec, gen, DerivKind::Derivation, caps)?.is_some() {
            jordan_only_generators.push(gen.clone());
        }
    }
    let equal = derivation_subset_jordan
        && derivation.cardinality == jordan.cardinality
        && jordan_only_generators.is_empty();
    Ok(SpaceComparison {
        derivation,
        jordan,
        derivation_subset_jordan,
        equal,
        jordan_only_generators,
    })
}

/// Generators of the linearized Jordan space that fail the derivation
/// membership test: concrete witnesses that "Jordan implies derivation"
/// does not hold on this instance. Empty when the spaces coincide.
pub fn counterexample_scan(spec: &TriMatSpec, caps: &Caps) -> Result<Vec<AddMap>, DerivError> {
    let jordan = solve_space(spec, DerivKind::JordanLinearized, caps)?;
    let mut out = Vec::new();
    for gen in jordan.generators {
        if is_member(spec, &gen, DerivKind::Derivation, caps)?.is_some() {
            out.push(gen);
        }
    }
    Ok(out)
}

/// The commutator map `X -> AX - XA`, packaged over the canonical basis.
pub fn inner_derivation(spec: &TriMatSpec, a: &TriMatElement) -> AddMap {
    let basis = spec.basis().clone();
    let images: Vec<Vec<u64>> = (0..basis.len())
        .map(|t| {
            let g = spec.generator_element(t);
            spec.to_coords(&spec.sub(&spec.mul(a, &g), &spec.mul(&g, a)))
        })
        .collect();
    AddMap::from_images(basis, &images).expect("commutator maps are additive")
}

/// A deterministic RNG for sampled scans, offset so different scan sites
/// draw independent streams from one configured seed.
pub(crate) fn scan_rng(caps: &Caps, stream: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(
        caps.seed
            .wrapping_add(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmap::enumerate_addmaps;
    use crate::trimat::ut_zmod;
    use std::collections::BTreeSet;

    fn caps() -> Caps {
        Caps::default()
    }

    #[test]
    fn zero_map_satisfies_every_kind() {
        let spec = ut_zmod(2, 3).unwrap();
        let zero = AddMap::zero(spec.basis().clone());
        for kind in DerivKind::ALL {
            assert_eq!(
                is_member(&spec, &zero, kind, &caps()).unwrap(),
                None,
                "{kind}"
            );
        }
    }

    #[test]
    fn commutator_with_first_unit_maps_strict_upper_block_identically() {
        // On the 2x2 upper triangular ring over Z/3, [E_11, -] sends
        // (a, m, b) to (0, m, 0).
        let spec = ut_zmod(2, 3).unwrap();
        let d = inner_derivation(&spec, &spec.unit_e(1));
        assert_eq!(d.image_of_generator(0), vec![0, 0, 0]);
        assert_eq!(d.image_of_generator(1), vec![0, 1, 0]);
        assert_eq!(d.image_of_generator(2), vec![0, 0, 0]);
        assert_eq!(
            is_member(&spec, &d, DerivKind::Derivation, &caps()).unwrap(),
            None
        );
        assert_eq!(
            is_member(&spec, &d, DerivKind::JordanLinearized, &caps()).unwrap(),
            None
        );
    }

    #[test]
    fn inner_maps_are_derivations_and_additive_in_the_element() {
        let spec = ut_zmod(3, 6).unwrap();
        let mut rng = scan_rng(&caps(), 7);
        for _ in 0..25 {
            let a = spec.random_element(&mut rng);
            let b = spec.random_element(&mut rng);
            let da = inner_derivation(&spec, &a);
            assert_eq!(
                is_member(&spec, &da, DerivKind::Derivation, &caps()).unwrap(),
                None
            );
            let sum = inner_derivation(&spec, &spec.add(&a, &b));
            assert_eq!(da.add(&inner_derivation(&spec, &b)).unwrap(), sum);
        }
    }

    #[test]
    fn non_derivation_is_rejected_with_a_witness() {
        // The identity map is not a derivation: D(1*1) = 1 but the rule
        // gives 1 + 1 = 2.
        let spec = ut_zmod(2, 3).unwrap();
        let id = AddMap::identity(spec.basis().clone());
        let v = is_member(&spec, &id, DerivKind::Derivation, &caps())
            .unwrap()
            .unwrap();
        assert_eq!(v.kind, DerivKind::Derivation);
        let a = spec.from_coords(&v.first).unwrap();
        let b = spec.from_coords(&v.second.clone().unwrap()).unwrap();
        let defect = pair_defect(&spec, &id, DerivKind::Derivation, &a, &b);
        assert_eq!(spec.to_coords(&defect), v.defect);
        assert_ne!(defect, spec.zero());
    }

    /// Spaces frozen by hand over the nine unknown matrix entries of a
    /// map on UT_2(Z/2): the derivation conditions force everything but
    /// the two strict-upper images (4 maps), while the linearized Jordan
    /// conditions leave two extra diagonal degrees of freedom (16 maps).
    #[test]
    fn hand_counted_spaces_on_the_two_torsion_instance() {
        let spec = ut_zmod(2, 2).unwrap();
        let d = solve_space(&spec, DerivKind::Derivation, &caps()).unwrap();
        let j = solve_space(&spec, DerivKind::JordanLinearized, &caps()).unwrap();
        assert_eq!(d.cardinality, BigUint::from(4u32));
        assert_eq!(j.cardinality, BigUint::from(16u32));
    }

    /// Hand-frozen: on UT_2(Z/3) both spaces consist of the nine maps
    /// with D(E_11) = -D(E_22) supported on the strict upper block and a
    /// free strict-upper image of the corner generator.
    #[test]
    fn spaces_coincide_on_the_odd_faithful_instance() {
        let spec = ut_zmod(2, 3).unwrap();
        let cmp = compare_spaces(&spec, &caps()).unwrap();
        assert_eq!(cmp.derivation.cardinality, BigUint::from(9u32));
        assert_eq!(cmp.jordan.cardinality, BigUint::from(9u32));
        assert!(cmp.derivation_subset_jordan);
        assert!(cmp.equal);
        assert!(cmp.jordan_only_generators.is_empty());
        assert!(counterexample_scan(&spec, &caps()).unwrap().is_empty());
    }

    #[test]
    fn two_torsion_instance_reports_jordan_only_witnesses() {
        let spec = ut_zmod(2, 2).unwrap();
        let cmp = compare_spaces(&spec, &caps()).unwrap();
        assert!(cmp.derivation_subset_jordan);
        assert!(!cmp.equal);
        assert!(!cmp.jordan_only_generators.is_empty());
        for w in &cmp.jordan_only_generators {
            assert_eq!(
                is_member(&spec, w, DerivKind::JordanLinearized, &caps()).unwrap(),
                None
            );
            assert!(is_member(&spec, w, DerivKind::Derivation, &caps())
                .unwrap()
                .is_some());
        }
    }

    /// Every kind's solver output must equal the brute-force filter of
    /// all 512 additive maps on UT_2(Z/2).
    #[test]
    fn solver_matches_enumeration_oracle_on_smallest_instance() {
        let spec = ut_zmod(2, 2).unwrap();
        let basis = spec.basis().clone();
        let all: Vec<AddMap> = enumerate_addmaps(&basis, 1024).unwrap().collect();
        assert_eq!(all.len(), 512);
        for kind in DerivKind::ALL {
            let space = solve_space(&spec, kind, &caps()).unwrap();
            let expected: BTreeSet<Vec<u64>> = all
                .iter()
                .filter(|m| is_member(&spec, m, kind, &caps()).unwrap().is_none())
                .map(|m| (0..9).map(|e| m.entry(e / 3, e % 3)).collect())
                .collect();
            let members = space_members(&basis, &space, 1024).unwrap();
            let got: BTreeSet<Vec<u64>> = members
                .iter()
                .map(|m| (0..9).map(|e| m.entry(e / 3, e % 3)).collect())
                .collect();
            assert_eq!(
                members.len(),
                got.len(),
                "members enumerated uniquely for {kind}"
            );
            assert_eq!(got, expected, "solver vs enumeration for {kind}");
            assert_eq!(BigUint::from(got.len() as u64), space.cardinality, "{kind}");
        }
    }

    #[test]
    fn squared_scan_refuses_above_the_element_cap() {
        let spec = ut_zmod(3, 5).unwrap();
        let small = Caps {
            element_cap: 100,
            ..Caps::default()
        };
        let zero = AddMap::zero(spec.basis().clone());
        assert!(matches!(
            is_member(&spec, &zero, DerivKind::JordanSquared, &small),
            Err(DerivError::ElementCap { .. })
        ));
        assert!(matches!(
            solve_space(&spec, DerivKind::JordanSquared, &small),
            Err(DerivError::ElementCap { .. })
        ));
    }

    #[test]
    fn member_walk_refuses_above_the_oracle_cap() {
        let spec = ut_zmod(2, 3).unwrap();
        let space = solve_space(&spec, DerivKind::JordanLinearized, &caps()).unwrap();
        assert!(matches!(
            space_members(spec.basis(), &space, 4),
            Err(DerivError::OracleCap { .. })
        ));
    }

    #[test]
    fn hypothesis_flags_match_module_structure() {
        let spec = ut_zmod(3, 3).unwrap();
        let h = check_hypotheses(&spec);
        assert_eq!(h.faithful_left, vec![true, true]);
        assert!(h.faithful_right_last);
        assert!(h.two_torsion_free);
        assert!(h.all_hold());

        let spec = ut_zmod(2, 2).unwrap();
        let h = check_hypotheses(&spec);
        assert!(h.all_faithful());
        assert!(!h.two_torsion_free);
        assert!(!h.all_hold());
    }

    #[test]
    fn solver_is_deterministic() {
        let spec = ut_zmod(2, 4).unwrap();
        let a = solve_space(&spec, DerivKind::JordanLinearized, &caps()).unwrap();
        let b = solve_space(&spec, DerivKind::JordanLinearized, &caps()).unwrap();
        let render = |s: &SolutionSpace<AddMap>| -> Vec<Vec<u64>> {
            s.generators
                .iter()
                .map(|m| {
                    (0..m.basis().len())
                        .flat_map(|c| m.image_of_generator(c))
                        .collect()
                })
                .collect()
        };
        assert_eq!(a.cardinality, b.cardinality);
        assert_eq!(a.moduli, b.moduli);
        assert_eq!(render(&a), render(&b));
    }
}
