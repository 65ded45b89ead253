//! Additive maps on the canonical basis and exact linear algebra over
//! mixed cyclic moduli.

pub mod howell;

use crate::trimat::{CanonicalBasis, TriMatElement, TriMatSpec};
use num_bigint::BigUint;
use num_integer::Integer;
use std::sync::Arc;

/// Why an additive map could not be built or applied.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("entry matrix has {got} entries, basis needs {expected}")]
    EntryCount { got: usize, expected: usize },
    #[error("entry {value} at row {row}, column {col} exceeds the row order {order}")]
    EntryRange {
        row: usize,
        col: usize,
        value: u64,
        order: u64,
    },
    #[error(
        "entry {value} at row {row}, column {col} does not define a homomorphism: \
         a generator of order {col_order} cannot map onto it (row order {row_order})"
    )]
    NotAdditive {
        row: usize,
        col: usize,
        value: u64,
        col_order: u64,
        row_order: u64,
    },
    #[error("additive maps over different bases cannot be combined")]
    BasisMismatch,
}

/// Why a linear system could not be solved.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("system shape: {0}")]
    Shape(String),
    #[error(
        "row {row} is not well defined: coefficient {coeff} at unknown {col} \
         (order {order}) is incompatible with the row modulus {modulus}"
    )]
    IllPosed {
        row: usize,
        col: usize,
        coeff: u64,
        order: u64,
        modulus: u64,
    },
    #[error("combined modulus {lcm} exceeds the supported range")]
    ModulusTooLarge { lcm: u128 },
}

/// Enumeration refused because the map count exceeds the cap.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{count} additive maps exceed the enumeration cap {cap}")]
pub struct EnumerationOverflow {
    pub count: BigUint,
    pub cap: u64,
}

/// An additive (group-homomorphism) endomorphism of the ring's additive
/// group, stored as an integer matrix over the canonical basis.
///
/// `entry(r, c)` is the coefficient of generator `r` in the image of
/// generator `c`, reduced modulo the order of generator `r`. Entries must
/// satisfy the homomorphism condition: the image of a generator of order
/// `d` must be killed by `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AddMap {
    basis: Arc<CanonicalBasis>,
    entries: Vec<u64>,
}

impl AddMap {
    /// The zero map.
    pub fn zero(basis: Arc<CanonicalBasis>) -> Self {
        let g = basis.len();
        AddMap {
            basis,
            entries: vec![0; g * g],
        }
    }

    /// The identity map.
    pub fn identity(basis: Arc<CanonicalBasis>) -> Self {
        let g = basis.len();
        let mut entries = vec![0; g * g];
        for r in 0..g {
            entries[r * g + r] = 1 % basis.order(r);
        }
        AddMap { basis, entries }
    }

    /// Builds a map from a row-major `G x G` entry matrix, validating
    /// ranges and the homomorphism condition.
    pub fn from_entries(basis: Arc<CanonicalBasis>, entries: Vec<u64>) -> Result<Self, MapError> {
        let g = basis.len();
        if entries.len() != g * g {
            return Err(MapError::EntryCount {
                got: entries.len(),
                expected: g * g,
            });
        }
        for r in 0..g {
            let order = basis.order(r);
            for c in 0..g {
                let value = entries[r * g + c];
                if value >= order {
                    return Err(MapError::EntryRange {
                        row: r,
                        col: c,
                        value,
                        order,
                    });
                }
                let col_order = basis.order(c);
                if !(value as u128 * col_order as u128).is_multiple_of(order as u128) {
                    return Err(MapError::NotAdditive {
                        row: r,
                        col: c,
                        value,
                        col_order,
                        row_order: order,
                    });
                }
            }
        }
        Ok(AddMap { basis, entries })
    }

    /// Builds a map from the images of the basis generators, given as
    /// coordinate vectors (`images[c]` is the image of generator `c`).
    pub fn from_images(basis: Arc<CanonicalBasis>, images: &[Vec<u64>]) -> Result<Self, MapError> {
        let g = basis.len();
        if images.len() != g || images.iter().any(|im| im.len() != g) {
            return Err(MapError::EntryCount {
                got: images.iter().map(Vec::len).sum(),
                expected: g * g,
            });
        }
        let mut entries = vec![0; g * g];
        for c in 0..g {
            for r in 0..g {
                entries[r * g + c] = images[c][r] % basis.order(r);
            }
        }
        Self::from_entries(basis, entries)
    }

    pub fn basis(&self) -> &Arc<CanonicalBasis> {
        &self.basis
    }

    pub fn entry(&self, r: usize, c: usize) -> u64 {
        self.entries[r * self.basis.len() + c]
    }

    /// Image of generator `c`, as a coordinate vector.
    pub fn image_of_generator(&self, c: usize) -> Vec<u64> {
        let g = self.basis.len();
        (0..g).map(|r| self.entries[r * g + c]).collect()
    }

    /// Applies the map to a ring element.
    pub fn apply(&self, spec: &TriMatSpec, a: &TriMatElement) -> TriMatElement {
        debug_assert_eq!(spec.basis().as_ref(), self.basis.as_ref());
        let coords = spec.to_coords(a);
        let out = self.apply_coords(&coords);
        spec.from_coords(&out).expect("in-range image coordinates")
    }

    /// Matrix-vector application on coordinate vectors.
    pub fn apply_coords(&self, coords: &[u64]) -> Vec<u64> {
        let g = self.basis.len();
        debug_assert_eq!(coords.len(), g);
        let mut out = vec![0u64; g];
        for (r, o) in out.iter_mut().enumerate() {
            let order = self.basis.order(r) as u128;
            let mut acc = 0u128;
            for (c, &x) in coords.iter().enumerate() {
                acc += (self.entries[r * g + c] as u128 * x as u128) % order;
            }
            *o = (acc % order) as u64;
        }
        out
    }

    /// The block component: keeps only output rows landing in block
    /// `(i, j)`, i.e. the composite `A -> E_ii . D(A) . E_jj`.
    pub fn component(&self, i: usize, j: usize) -> AddMap {
        let g = self.basis.len();
        let mut entries = self.entries.clone();
        for r in 0..g {
            if self.basis.block_of(r) != (i, j) {
                for c in 0..g {
                    entries[r * g + c] = 0;
                }
            }
        }
        AddMap {
            basis: self.basis.clone(),
            entries,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }

    pub fn add(&self, other: &AddMap) -> Result<AddMap, MapError> {
        if self.basis.as_ref() != other.basis.as_ref() {
            return Err(MapError::BasisMismatch);
        }
        let g = self.basis.len();
        let mut entries = vec![0u64; g * g];
        for r in 0..g {
            let order = self.basis.order(r);
            for c in 0..g {
                entries[r * g + c] = (self.entries[r * g + c] + other.entries[r * g + c]) % order;
            }
        }
        Ok(AddMap {
            basis: self.basis.clone(),
            entries,
        })
    }

    pub fn neg(&self) -> AddMap {
        let g = self.basis.len();
        let mut entries = vec![0u64; g * g];
        for r in 0..g {
            let order = self.basis.order(r);
            for c in 0..g {
                let v = self.entries[r * g + c];
                entries[r * g + c] = if v == 0 { 0 } else { order - v };
            }
        }
        AddMap {
            basis: self.basis.clone(),
            entries,
        }
    }

    pub fn sub(&self, other: &AddMap) -> Result<AddMap, MapError> {
        self.add(&other.neg())
    }

    /// Integer scalar multiple.
    pub fn smul(&self, k: u64) -> AddMap {
        let g = self.basis.len();
        let mut entries = vec![0u64; g * g];
        for r in 0..g {
            let order = self.basis.order(r);
            for c in 0..g {
                entries[r * g + c] =
                    ((self.entries[r * g + c] as u128 * k as u128) % order as u128) as u64;
            }
        }
        AddMap {
            basis: self.basis.clone(),
            entries,
        }
    }
}

/// One homogeneous condition: `sum coeffs[j] * x_j = 0 (mod modulus)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemRow {
    pub coeffs: Vec<u64>,
    pub modulus: u64,
}

/// A homogeneous linear system whose unknowns live in cyclic groups of
/// (possibly different) orders `moduli[j]`.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    pub moduli: Vec<u64>,
    pub rows: Vec<SystemRow>,
}

/// The solution set of a homogeneous problem, presented by generators.
///
/// Every solution is a unique combination `sum c_i * generators[i]` with
/// `0 <= c_i < moduli[i]`, so `cardinality` is the product of the moduli.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionSpace<G> {
    pub generators: Vec<G>,
    pub moduli: Vec<u64>,
    pub cardinality: BigUint,
}

impl<G> SolutionSpace<G> {
    pub fn map<H>(self, f: impl FnMut(G) -> H) -> SolutionSpace<H> {
        SolutionSpace {
            generators: self.generators.into_iter().map(f).collect(),
            moduli: self.moduli,
            cardinality: self.cardinality,
        }
    }
}

/// Largest combined modulus the solver accepts.
const LCM_LIMIT: u128 = 1 << 31;

/// Streaming solver for homogeneous systems whose unknowns live in mixed
/// cyclic groups.
///
/// Rows are rewritten over `Z/L`, `L` the least common multiple of all
/// unknown and row moduli, in the variables `y_j = (L/d_j) x_j`, and folded
/// into a canonical row form as they arrive, so memory stays quadratic in
/// the number of unknowns no matter how many rows are pushed.
#[derive(Debug, Clone)]
pub struct SystemSolver {
    moduli: Vec<u64>,
    l: u64,
    howell: Option<howell::HowellForm>,
    rows_seen: u64,
}

impl SystemSolver {
    /// Prepares a solver over the given unknown moduli. Every later row
    /// modulus must divide the combined modulus; pass the distinct row
    /// moduli as `row_moduli` if they can exceed the unknowns' orders.
    pub fn new(moduli: Vec<u64>, row_moduli: &[u64]) -> Result<Self, SystemError> {
        if let Some(&bad) = moduli.iter().find(|&&d| d < 2) {
            return Err(SystemError::Shape(format!(
                "unknown modulus {bad} must be at least 2"
            )));
        }
        let mut lcm: u128 = 1;
        for &d in moduli.iter().chain(row_moduli) {
            if d >= 2 {
                lcm = lcm.lcm(&(d as u128));
                if lcm > LCM_LIMIT {
                    return Err(SystemError::ModulusTooLarge { lcm });
                }
            }
        }
        let l = lcm as u64;
        let howell = if moduli.is_empty() {
            None
        } else {
            Some(howell::HowellForm::new(l, moduli.len()))
        };
        Ok(SystemSolver {
            moduli,
            l,
            howell,
            rows_seen: 0,
        })
    }

    /// Number of unknowns.
    pub fn unknowns(&self) -> usize {
        self.moduli.len()
    }

    /// The combined modulus `L` everything is embedded into.
    pub fn combined_modulus(&self) -> u64 {
        self.l
    }

    /// Adds the condition `sum coeffs[j] * x_j = 0 (mod modulus)`.
    ///
    /// The condition must be well defined on the product group: each
    /// coefficient times its unknown's order must vanish modulo the row
    /// modulus (rows produced by additive constructions always do).
    pub fn push_row(&mut self, coeffs: &[u64], modulus: u64) -> Result<(), SystemError> {
        let n = self.moduli.len();
        let ridx = self.rows_seen as usize;
        self.rows_seen += 1;
        if coeffs.len() != n {
            return Err(SystemError::Shape(format!(
                "row {ridx} has {} coefficients, system has {n} unknowns",
                coeffs.len()
            )));
        }
        if modulus == 0 {
            return Err(SystemError::Shape(format!("row {ridx} has modulus 0")));
        }
        if modulus == 1 {
            return Ok(());
        }
        if !self.l.is_multiple_of(modulus) {
            return Err(SystemError::Shape(format!(
                "row {ridx} has modulus {modulus}, which does not divide the combined modulus {}",
                self.l
            )));
        }
        let m = modulus;
        let mut out = vec![0u64; n];
        let mut nonzero = false;
        for (j, &a) in coeffs.iter().enumerate() {
            let a = a % m;
            let d = self.moduli[j];
            let prod = a as u128 * d as u128;
            if !prod.is_multiple_of(m as u128) {
                return Err(SystemError::IllPosed {
                    row: ridx,
                    col: j,
                    coeff: a,
                    order: d,
                    modulus: m,
                });
            }
            out[j] = ((prod / m as u128) % self.l as u128) as u64;
            nonzero |= out[j] != 0;
        }
        if nonzero {
            self.howell
                .as_mut()
                .expect("rows imply unknowns")
                .absorb(out);
        }
        Ok(())
    }

    /// Finishes the reduction and returns the solution set.
    pub fn finish(self) -> SolutionSpace<Vec<u64>> {
        let n = self.moduli.len();
        let Some(mut howell) = self.howell else {
            return SolutionSpace {
                generators: vec![],
                moduli: vec![],
                cardinality: BigUint::from(1u32),
            };
        };
        let l = self.l;
        // Pin y_j to the image of Z/d_j with the rows d_j * y_j = 0.
        for (j, &d) in self.moduli.iter().enumerate() {
            if d < l {
                let mut out = vec![0u64; n];
                out[j] = d;
                howell.absorb(out);
            }
        }
        let reduced = howell.into_rows();
        let kernel = howell::kernel_generators(&reduced, n, l);
        let mut generators = Vec::with_capacity(kernel.len());
        let mut moduli = Vec::with_capacity(kernel.len());
        let mut cardinality = BigUint::from(1u32);
        for (y, step) in kernel {
            let x: Vec<u64> = y
                .iter()
                .zip(&self.moduli)
                .map(|(&yv, &d)| {
                    let scale = l / d;
                    debug_assert_eq!(yv % scale, 0, "kernel element outside the embedded group");
                    yv / scale
                })
                .collect();
            cardinality *= BigUint::from(step);
            generators.push(x);
            moduli.push(step);
        }
        SolutionSpace {
            generators,
            moduli,
            cardinality,
        }
    }
}

/// Solves a materialized homogeneous system; see [`SystemSolver`] for the
/// streaming interface and the well-posedness requirement on rows.
pub fn kernel_solve(sys: &LinearSystem) -> Result<SolutionSpace<Vec<u64>>, SystemError> {
    let row_moduli: Vec<u64> = sys.rows.iter().map(|r| r.modulus).collect();
    let mut solver = SystemSolver::new(sys.moduli.clone(), &row_moduli)?;
    for row in &sys.rows {
        solver.push_row(&row.coeffs, row.modulus)?;
    }
    Ok(solver.finish())
}

/// Number of additive maps on a basis: the product over all matrix cells
/// of `gcd(order(r), order(c))`.
pub fn addmap_count(basis: &CanonicalBasis) -> BigUint {
    let mut count = BigUint::from(1u32);
    for r in 0..basis.len() {
        for c in 0..basis.len() {
            count *= BigUint::from(basis.order(r).gcd(&basis.order(c)));
        }
    }
    count
}

/// Enumerates every additive map on the basis, in deterministic odometer
/// order, refusing when the count exceeds `cap`.
pub fn enumerate_addmaps(
    basis: &Arc<CanonicalBasis>,
    cap: u64,
) -> Result<AddMapEnumeration, EnumerationOverflow> {
    let count = addmap_count(basis);
    if count > BigUint::from(cap) {
        return Err(EnumerationOverflow { count, cap });
    }
    let g = basis.len();
    let mut steps = Vec::with_capacity(g * g);
    let mut ranges = Vec::with_capacity(g * g);
    for r in 0..g {
        for c in 0..g {
            let dr = basis.order(r);
            let gcd = dr.gcd(&basis.order(c));
            steps.push(dr / gcd);
            ranges.push(gcd);
        }
    }
    Ok(AddMapEnumeration {
        basis: basis.clone(),
        steps,
        ranges,
        digits: vec![0; g * g],
        done: false,
    })
}

/// Iterator over all additive maps of a basis; see [`enumerate_addmaps`].
#[derive(Debug)]
pub struct AddMapEnumeration {
    basis: Arc<CanonicalBasis>,
    /// Per cell: allowed entries are multiples of this step.
    steps: Vec<u64>,
    /// Per cell: number of allowed entries.
    ranges: Vec<u64>,
    digits: Vec<u64>,
    done: bool,
}

impl Iterator for AddMapEnumeration {
    type Item = AddMap;

    fn next(&mut self) -> Option<AddMap> {
        if self.done {
            return None;
        }
        let entries: Vec<u64> = self
            .digits
            .iter()
            .zip(&self.steps)
            .map(|(&d, &s)| d * s)
            .collect();
        let map = AddMap {
            basis: self.basis.clone(),
            entries,
        };
        // Advance the odometer.
        let mut at = 0;
        loop {
            if at == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[at] += 1;
            if self.digits[at] < self.ranges[at] {
                break;
            }
            self.digits[at] = 0;
            at += 1;
        }
        Some(map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimat::ut_zmod;

    #[test]
    fn addmap_counts_match_known_values() {
        let t2 = ut_zmod(2, 2).unwrap();
        assert_eq!(addmap_count(t2.basis()), BigUint::from(512u32));
        let t3 = ut_zmod(2, 3).unwrap();
        assert_eq!(addmap_count(t3.basis()), BigUint::from(19683u32));
        let z4 = ut_zmod(2, 4).unwrap();
        assert_eq!(addmap_count(z4.basis()), BigUint::from(262144u32));
    }

    #[test]
    fn enumeration_is_exact_and_unique() {
        let t = ut_zmod(2, 2).unwrap();
        let maps: Vec<AddMap> = enumerate_addmaps(t.basis(), 1000).unwrap().collect();
        assert_eq!(maps.len(), 512);
        let set: std::collections::HashSet<_> = maps.iter().collect();
        assert_eq!(set.len(), 512);
    }

    #[test]
    fn enumeration_respects_cap() {
        let t = ut_zmod(2, 3).unwrap();
        let err = enumerate_addmaps(t.basis(), 1000).unwrap_err();
        assert_eq!(err.count, BigUint::from(19683u32));
        assert_eq!(err.cap, 1000);
    }

    #[test]
    fn hom_condition_rejects_impossible_entries() {
        // Mixed orders: a generator of order 2 cannot map to a generator of
        // order 4 with an odd coefficient.
        let sys_basis = {
            let ring = std::sync::Arc::new(crate::finalg::ring_zmod(4).unwrap());
            let module = std::sync::Arc::new(
                crate::finalg::bimodule_new(
                    ring.clone(),
                    ring.clone(),
                    crate::finalg::AbelianGroup::zmod(2).unwrap(),
                    |a, x| (a % 2) * x % 2,
                    |x, a| x * (a % 2) % 2,
                )
                .unwrap(),
            );
            let mut modules = std::collections::BTreeMap::new();
            modules.insert((1, 2), module);
            crate::trimat::build_spec(vec![ring.clone(), ring], modules, Default::default())
                .unwrap()
        };
        let basis = sys_basis.basis();
        assert_eq!(basis.orders(), &[4, 2, 4]);
        let g = basis.len();
        let mut entries = vec![0u64; g * g];
        // Generator 1 has order 2; sending it to 1 * generator 0 (order 4)
        // is not additive. Entry (row 0, col 1) is flat index 1.
        entries[1] = 1;
        let err = AddMap::from_entries(basis.clone(), entries).unwrap_err();
        assert!(
            matches!(err, MapError::NotAdditive { row: 0, col: 1, .. }),
            "got {err:?}"
        );
        // Sending it to 2 * generator 0 is fine.
        let mut entries = vec![0u64; g * g];
        entries[1] = 2;
        AddMap::from_entries(basis.clone(), entries).unwrap();
    }

    #[test]
    fn apply_is_additive() {
        let t = ut_zmod(3, 6).unwrap();
        let basis = t.basis().clone();
        // A haphazard but valid entry matrix: diagonal 5, plus a legal
        // off-diagonal coefficient.
        let g = basis.len();
        let mut entries = vec![0u64; g * g];
        for r in 0..g {
            entries[r * g + r] = 5;
        }
        entries[1] = 3;
        let map = AddMap::from_entries(basis, entries).unwrap();
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = t.random_element(&mut rng);
            let b = t.random_element(&mut rng);
            let lhs = map.apply(&t, &t.add(&a, &b));
            let rhs = t.add(&map.apply(&t, &a), &map.apply(&t, &b));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn component_restricts_output_block() {
        let t = ut_zmod(2, 3).unwrap();
        let basis = t.basis().clone();
        let id = AddMap::identity(basis);
        let comp = id.component(1, 2);
        let a = t.from_coords(&[1, 2, 1]).unwrap();
        assert_eq!(t.to_coords(&comp.apply(&t, &a)), vec![0, 2, 0]);
    }

    #[test]
    fn mixed_moduli_solver_handles_uniform_prime_case() {
        // x + 2y = 0 over Z/3: solutions are multiples of (1, 1).
        let sys = LinearSystem {
            moduli: vec![3, 3],
            rows: vec![SystemRow {
                coeffs: vec![1, 2],
                modulus: 3,
            }],
        };
        let space = kernel_solve(&sys).unwrap();
        assert_eq!(space.generators, vec![vec![1, 1]]);
        assert_eq!(space.moduli, vec![3]);
        assert_eq!(space.cardinality, BigUint::from(3u32));
    }

    #[test]
    fn mixed_moduli_solver_handles_composite_case() {
        // 2x = 0 over Z/4: solutions {0, 2}.
        let sys = LinearSystem {
            moduli: vec![4],
            rows: vec![SystemRow {
                coeffs: vec![2],
                modulus: 4,
            }],
        };
        let space = kernel_solve(&sys).unwrap();
        assert_eq!(space.generators, vec![vec![2]]);
        assert_eq!(space.cardinality, BigUint::from(2u32));
    }

    #[test]
    fn mixed_moduli_solver_mixes_orders() {
        // Unknowns over Z/2 and Z/3 with their only coupling mod 6:
        // 3a + 2b = 0 (mod 6), a in Z/2, b in Z/3. Solutions: a = 0, b = 0
        // only... check by brute force below.
        let sys = LinearSystem {
            moduli: vec![2, 3],
            rows: vec![SystemRow {
                coeffs: vec![3, 2],
                modulus: 6,
            }],
        };
        let space = kernel_solve(&sys).unwrap();
        let mut brute = Vec::new();
        for a in 0..2u64 {
            for b in 0..3u64 {
                if (3 * a + 2 * b) % 6 == 0 {
                    brute.push(vec![a, b]);
                }
            }
        }
        assert_eq!(space.cardinality, BigUint::from(brute.len()));
        // Expand the presented combinations and compare as sets.
        let mut spanned = std::collections::BTreeSet::new();
        let total: u64 = space.moduli.iter().product();
        for mut t in 0..total.max(1) {
            let mut v = vec![0u64; 2];
            for (gen, &m) in space.generators.iter().zip(&space.moduli) {
                let c = t % m;
                t /= m;
                v[0] = (v[0] + c * gen[0]) % 2;
                v[1] = (v[1] + c * gen[1]) % 3;
            }
            spanned.insert(v);
        }
        assert_eq!(spanned, brute.into_iter().collect());
    }

    #[test]
    fn ill_posed_row_is_rejected() {
        // Coefficient 1 on a Z/3 unknown cannot be a condition mod 2.
        let sys = LinearSystem {
            moduli: vec![3],
            rows: vec![SystemRow {
                coeffs: vec![1],
                modulus: 2,
            }],
        };
        let err = kernel_solve(&sys).unwrap_err();
        assert!(
            matches!(err, SystemError::IllPosed { row: 0, col: 0, .. }),
            "got {err:?}"
        );
    }

    #[test]
    fn empty_system_has_full_solution_space() {
        let sys = LinearSystem {
            moduli: vec![3, 3, 3],
            rows: vec![],
        };
        let space = kernel_solve(&sys).unwrap();
        assert_eq!(space.cardinality, BigUint::from(27u32));
    }
}
