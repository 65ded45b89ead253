//! Finite unital rings, either `Z/m` or given by raw Cayley tables.

use super::group::AbelianGroup;
use super::{AxiomError, ValidationConfig, ValidationSummary};
use crate::scan;
use num_integer::Integer;

/// Largest carrier accepted for table-defined rings; the cyclic
/// decomposition works with a relation lattice quadratic in the carrier
/// size, so raw Cayley tables are meant for small rings.
const TABLE_RING_LIMIT: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
enum RingRepr {
    /// Integers mod `m`; multiplication computed arithmetically.
    Zmod(u64),
    /// Flattened `size x size` multiplication table in carrier indices.
    Table(Vec<usize>),
}

/// A finite unital (not necessarily commutative) ring.
///
/// The additive carrier is always an [`AbelianGroup`], so ring elements are
/// flat indices into a coordinate space. Rings built from Cayley tables are
/// relabeled onto cyclic coordinates on construction; `original_label`
/// recovers the caller's numbering for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRing {
    carrier: AbelianGroup,
    repr: RingRepr,
    one: usize,
    /// Carrier index -> label in the caller's input tables, if relabeled.
    labels: Option<Vec<u64>>,
    validation: ValidationSummary,
}

impl FiniteRing {
    pub fn carrier(&self) -> &AbelianGroup {
        &self.carrier
    }

    pub fn size(&self) -> u64 {
        self.carrier.size()
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        self.carrier.add(a, b)
    }

    pub fn neg(&self, a: usize) -> usize {
        self.carrier.neg(a)
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            RingRepr::Zmod(m) => ((a as u64 * b as u64) % m) as usize,
            RingRepr::Table(t) => t[a * self.carrier.size() as usize + b],
        }
    }

    /// True when multiplication is `Z/m` arithmetic.
    pub fn is_zmod(&self) -> Option<u64> {
        match self.repr {
            RingRepr::Zmod(m) => Some(m),
            RingRepr::Table(_) => None,
        }
    }

    /// The caller-facing label of a carrier index (identity unless the ring
    /// was relabeled from Cayley tables).
    pub fn original_label(&self, a: usize) -> u64 {
        match &self.labels {
            Some(map) => map[a],
            None => a as u64,
        }
    }

    /// Carrier index of a caller-facing label.
    pub fn index_of_label(&self, label: u64) -> Option<usize> {
        match &self.labels {
            Some(map) => map.iter().position(|&l| l == label),
            None => (label < self.size()).then_some(label as usize),
        }
    }

    pub fn validation(&self) -> ValidationSummary {
        self.validation
    }

    /// Checks the unital ring axioms over the carrier; exhaustive up to the
    /// tuple cap, seeded-sampled beyond it.
    pub fn validate(&self, cfg: &ValidationConfig) -> Result<ValidationSummary, AxiomError> {
        let n = self.size();
        let mut summary = ValidationSummary::default();
        let witness = |t: &[u64]| {
            t.iter()
                .map(|&x| self.original_label(x as usize))
                .collect::<Vec<u64>>()
        };

        // (a + b) c = a c + b c and a (b + c) = a b + a c.
        let triple = [n, n, n];
        summary.absorb(scan_law(&triple, cfg, |t| {
            let (a, b, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
            let lhs = self.mul(self.add(a, b), c);
            let rhs = self.add(self.mul(a, c), self.mul(b, c));
            if lhs != rhs {
                return Some(AxiomError::law("ring", "left distributivity", witness(t)));
            }
            let lhs = self.mul(a, self.add(b, c));
            let rhs = self.add(self.mul(a, b), self.mul(a, c));
            if lhs != rhs {
                return Some(AxiomError::law("ring", "right distributivity", witness(t)));
            }
            let lhs = self.mul(self.mul(a, b), c);
            let rhs = self.mul(a, self.mul(b, c));
            if lhs != rhs {
                return Some(AxiomError::law("ring", "associativity", witness(t)));
            }
            None
        })?);

        summary.absorb(scan_law(&[n], cfg, |t| {
            let a = t[0] as usize;
            if self.mul(self.one, a) != a || self.mul(a, self.one) != a {
                return Some(AxiomError::law("ring", "identity", witness(t)));
            }
            if self.mul(0, a) != 0 || self.mul(a, 0) != 0 {
                return Some(AxiomError::law("ring", "zero annihilation", witness(t)));
            }
            None
        })?);

        Ok(summary)
    }
}

/// Runs one axiom scan over the product of `radices`, exhaustively when the
/// tuple count fits the cap and sampled otherwise. Returns the summary, or
/// the first (lowest-index) violation.
pub(crate) fn scan_law(
    radices: &[u64],
    cfg: &ValidationConfig,
    check: impl Fn(&[u64]) -> Option<AxiomError> + Sync,
) -> Result<ValidationSummary, AxiomError> {
    let count = scan::tuple_count(radices).ok_or(AxiomError::TooLarge {
        context: "axiom scan",
        size: u64::MAX,
    })?;
    let body = |t: u64| check(&scan::split_index(t, radices));
    if count <= cfg.tuple_cap {
        match scan::find_violation(count, body) {
            Some(err) => Err(err),
            None => Ok(ValidationSummary {
                sampled: false,
                tuples_checked: count,
            }),
        }
    } else {
        match scan::find_violation_sampled(count, cfg.tuple_cap, cfg.seed, body) {
            Some(err) => Err(err),
            None => Ok(ValidationSummary {
                sampled: true,
                tuples_checked: cfg.tuple_cap,
            }),
        }
    }
}

/// The ring of integers modulo `m`, for `m >= 2`.
pub fn ring_zmod(m: u64) -> Result<FiniteRing, AxiomError> {
    if m < 2 {
        return Err(AxiomError::InvalidModulus { modulus: m });
    }
    let ring = FiniteRing {
        carrier: AbelianGroup::zmod(m)?,
        repr: RingRepr::Zmod(m),
        one: 1,
        labels: None,
        validation: ValidationSummary::default(),
    };
    let summary = ring.validate(&ValidationConfig::default())?;
    Ok(FiniteRing {
        validation: summary,
        ..ring
    })
}

/// Builds a ring from full addition and multiplication Cayley tables over
/// elements `0..n`, with `one` naming the multiplicative identity.
///
/// The addition table must describe a finite abelian group; it is verified
/// exhaustively, decomposed into cyclic factors, and the ring is relabeled
/// onto the resulting coordinate carrier. Ring axioms are then checked over
/// the relabeled tables. Diagnostics report elements in the caller's
/// original numbering.
pub fn ring_from_tables(
    add: &[Vec<u64>],
    mul: &[Vec<u64>],
    one: u64,
) -> Result<FiniteRing, AxiomError> {
    let cfg = ValidationConfig::default();
    let n = add.len();
    if n == 0 {
        return Err(AxiomError::Shape {
            context: "ring tables",
            detail: "empty addition table".into(),
        });
    }
    if n as u64 > TABLE_RING_LIMIT {
        return Err(AxiomError::TooLarge {
            context: "ring tables",
            size: n as u64,
        });
    }
    check_table_shape("ring addition table", add, n)?;
    check_table_shape("ring multiplication table", mul, n)?;
    if mul.len() != n {
        return Err(AxiomError::Shape {
            context: "ring tables",
            detail: format!("multiplication table has {} rows, expected {n}", mul.len()),
        });
    }
    if one as usize >= n {
        return Err(AxiomError::Shape {
            context: "ring tables",
            detail: format!("identity label {one} out of range 0..{n}"),
        });
    }

    let group = TableGroup::verify(add, &cfg)?;
    let decomp = group.decompose()?;
    let carrier = AbelianGroup::new(decomp.orders.clone())?;

    // Relabel multiplication onto the coordinate carrier.
    let size = n;
    let mut table = vec![0usize; size * size];
    for a in 0..size {
        for b in 0..size {
            let (ua, ub) = (decomp.to_label[a], decomp.to_label[b]);
            table[a * size + b] = decomp.from_label[mul[ua][ub] as usize];
        }
    }
    let ring = FiniteRing {
        carrier,
        repr: RingRepr::Table(table),
        one: decomp.from_label[one as usize],
        labels: Some(decomp.to_label.iter().map(|&l| l as u64).collect()),
        validation: ValidationSummary::default(),
    };
    let summary = ring.validate(&cfg)?;
    Ok(FiniteRing {
        validation: summary,
        ..ring
    })
}

fn check_table_shape(
    context: &'static str,
    table: &[Vec<u64>],
    n: usize,
) -> Result<(), AxiomError> {
    for (i, row) in table.iter().enumerate() {
        if row.len() != n {
            return Err(AxiomError::Shape {
                context,
                detail: format!("row {i} has {} entries, expected {n}", row.len()),
            });
        }
        if let Some(&bad) = row.iter().find(|&&x| x >= n as u64) {
            return Err(AxiomError::Shape {
                context,
                detail: format!("row {i} contains {bad}, out of range 0..{n}"),
            });
        }
    }
    Ok(())
}

/// An abelian group presented by a Cayley table, verified and ready for
/// cyclic decomposition.
struct TableGroup<'a> {
    add: &'a [Vec<u64>],
    zero: usize,
    n: usize,
    exponent: u64,
    orders: Vec<u64>,
}

/// Result of decomposing a table group: cyclic orders plus the relabeling
/// between coordinate indices and the caller's labels.
struct Decomposition {
    orders: Vec<u64>,
    /// Coordinate index -> caller label.
    to_label: Vec<usize>,
    /// Caller label -> coordinate index.
    from_label: Vec<usize>,
}

impl<'a> TableGroup<'a> {
    #[allow(clippy::needless_range_loop)] // index loops mirror the table layout
    fn verify(add: &'a [Vec<u64>], cfg: &ValidationConfig) -> Result<Self, AxiomError> {
        let n = add.len();
        let nn = n as u64;

        scan_law(&[nn, nn], cfg, |t| {
            let (a, b) = (t[0] as usize, t[1] as usize);
            (add[a][b] != add[b][a])
                .then(|| AxiomError::law("addition table", "commutativity", t.to_vec()))
        })?;
        scan_law(&[nn, nn, nn], cfg, |t| {
            let (a, b, c) = (t[0] as usize, t[1] as usize, t[2] as usize);
            (add[add[a][b] as usize][c] != add[a][add[b][c] as usize])
                .then(|| AxiomError::law("addition table", "associativity", t.to_vec()))
        })?;

        let zero = (0..n)
            .find(|&z| (0..n).all(|a| add[z][a] == a as u64))
            .ok_or_else(|| AxiomError::law("addition table", "additive identity", vec![]))?;
        for a in 0..n {
            if !(0..n).any(|b| add[a][b] == zero as u64) {
                return Err(AxiomError::law(
                    "addition table",
                    "additive inverses",
                    vec![a as u64],
                ));
            }
        }

        let mut orders = Vec::with_capacity(n);
        let mut exponent = 1u64;
        for a in 0..n {
            let mut acc = a;
            let mut ord = 1u64;
            while acc != zero {
                acc = add[acc][a] as usize;
                ord += 1;
                if ord > nn {
                    return Err(AxiomError::law(
                        "addition table",
                        "element order",
                        vec![a as u64],
                    ));
                }
            }
            exponent = exponent.lcm(&ord);
            orders.push(ord);
        }

        Ok(TableGroup {
            add,
            zero,
            n,
            exponent,
            orders,
        })
    }

    fn add_elems(&self, a: usize, b: usize) -> usize {
        self.add[a][b] as usize
    }

    fn smul(&self, k: u64, a: usize) -> usize {
        let mut acc = self.zero;
        for _ in 0..k {
            acc = self.add_elems(acc, a);
        }
        acc
    }

    /// Decomposes the group into cyclic factors by diagonalizing a relation
    /// lattice for the presentation with one generator per element.
    ///
    /// The lattice is spanned by `ord(g_i) e_i` and `e_i + e_j - e_k`
    /// whenever `g_i + g_j = g_k`; all arithmetic stays reduced mod the
    /// exponent because the lattice contains `exponent * Z^n`. Row
    /// operations are tracked so that the new cyclic generators can be
    /// expressed in the original elements.
    #[allow(clippy::needless_range_loop)] // index loops mirror the matrix layout
    fn decompose(&self) -> Result<Decomposition, AxiomError> {
        let n = self.n;
        if n == 1 {
            return Ok(Decomposition {
                orders: vec![],
                to_label: vec![self.zero],
                from_label: vec![0],
            });
        }
        let e = self.exponent as i64;

        // Relation columns, reduced mod the exponent.
        let mut cols: Vec<Vec<i64>> = Vec::new();
        for i in 0..n {
            let mut c = vec![0i64; n];
            c[i] = (self.orders[i] as i64) % e;
            cols.push(c);
        }
        for i in 0..n {
            for j in i..n {
                let k = self.add[i][j] as usize;
                let mut c = vec![0i64; n];
                c[i] += 1;
                c[j] += 1;
                c[k] -= 1;
                for x in c.iter_mut() {
                    *x = x.rem_euclid(e);
                }
                if c.iter().any(|&x| x != 0) {
                    cols.push(c);
                }
            }
        }

        // Diagonalize A (n rows, cols.len() columns) over Z, tracking the
        // inverse of the accumulated row transform. Entries stay in
        // [0, exponent) throughout: reductions mod the exponent are valid
        // lattice moves because exponent * e_i columns are implied.
        let mut a: Vec<Vec<i64>> = (0..n)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        let m = cols.len();
        let mut pinv: Vec<Vec<i64>> = (0..n)
            .map(|r| (0..n).map(|c| if r == c { 1 } else { 0 }).collect())
            .collect();

        let reduce = |x: i64| x.rem_euclid(e);
        let mut diag = Vec::with_capacity(n);
        for d in 0..n {
            loop {
                // Deterministic pivot: smallest positive entry, ties by
                // (row, col).
                let mut pivot: Option<(i64, usize, usize)> = None;
                for r in d..n {
                    for c in d..m {
                        let v = a[r][c];
                        if v != 0 && pivot.is_none_or(|(pv, _, _)| v < pv) {
                            pivot = Some((v, r, c));
                        }
                    }
                }
                let Some((_, pr, pc)) = pivot else {
                    break;
                };
                a.swap(d, pr);
                pinv.iter_mut().for_each(|row| row.swap(d, pr));
                for row in a.iter_mut() {
                    row.swap(d, pc);
                }

                let p = a[d][d];
                let mut clean = true;
                for r in 0..n {
                    if r == d || a[r][d] == 0 {
                        continue;
                    }
                    let q = a[r][d].div_euclid(p);
                    for c in 0..m {
                        a[r][c] = reduce(a[r][c] - q * a[d][c]);
                    }
                    // Row op on A: track the inverse transform column-wise.
                    for row in pinv.iter_mut() {
                        row[d] = reduce(row[d] + q * row[r]);
                    }
                    if a[r][d] != 0 {
                        clean = false;
                    }
                }
                for c in 0..m {
                    if c == d || a[d][c] == 0 {
                        continue;
                    }
                    let q = a[d][c].div_euclid(p);
                    for r in 0..n {
                        a[r][c] = reduce(a[r][c] - q * a[r][d]);
                    }
                    if a[d][c] != 0 {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            diag.push(a[d][d].gcd(&e) as u64);
        }

        // Surviving invariant factors and their generators.
        let mut orders = Vec::new();
        let mut gens = Vec::new();
        for d in 0..n {
            if diag[d] > 1 {
                orders.push(diag[d]);
                let mut g = self.zero;
                for j in 0..n {
                    let coeff = pinv[j][d].rem_euclid(e) as u64;
                    g = self.add_elems(g, self.smul(coeff, j));
                }
                gens.push(g);
            }
        }
        let total: u64 = orders.iter().product();
        if total != n as u64 {
            return Err(AxiomError::Shape {
                context: "group decomposition",
                detail: format!("cyclic factors cover {total} of {n} elements"),
            });
        }
        // Sort factors descending for a stable presentation, generators in
        // step.
        let mut paired: Vec<(u64, usize)> = orders.into_iter().zip(gens).collect();
        paired.sort_by_key(|p| std::cmp::Reverse(p.0));
        let orders: Vec<u64> = paired.iter().map(|p| p.0).collect();
        let gens: Vec<usize> = paired.iter().map(|p| p.1).collect();

        // Tabulate the isomorphism in both directions.
        let mut to_label = vec![usize::MAX; n];
        let mut from_label = vec![usize::MAX; n];
        let carrier = AbelianGroup::new(orders.clone())?;
        for idx in 0..n {
            let cs = carrier.coords(idx);
            let mut g = self.zero;
            for (t, &c) in cs.iter().enumerate() {
                g = self.add_elems(g, self.smul(c, gens[t]));
            }
            if from_label[g] != usize::MAX {
                return Err(AxiomError::Shape {
                    context: "group decomposition",
                    detail: format!("generators do not span: element {g} hit twice"),
                });
            }
            to_label[idx] = g;
            from_label[g] = idx;
        }
        Ok(Decomposition {
            orders,
            to_label,
            from_label,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zmod_rejects_trivial_modulus() {
        assert!(matches!(
            ring_zmod(1),
            Err(AxiomError::InvalidModulus { modulus: 1 })
        ));
        assert!(matches!(
            ring_zmod(0),
            Err(AxiomError::InvalidModulus { modulus: 0 })
        ));
    }

    #[test]
    fn zmod_arithmetic() {
        let r = ring_zmod(6).unwrap();
        assert_eq!(r.size(), 6);
        assert_eq!(r.mul(4, 5), 2);
        assert_eq!(r.add(4, 5), 3);
        assert_eq!(r.neg(2), 4);
        assert_eq!(r.one(), 1);
    }

    #[test]
    fn tables_accept_z2() {
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 1]];
        let r = ring_from_tables(&add, &mul, 1).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(r.carrier().orders(), &[2]);
        assert_eq!(r.mul(r.one(), r.one()), r.one());
    }

    #[test]
    fn tables_reject_broken_associativity() {
        // Addition is Z/3; multiplication table deliberately fails
        // associativity: (1*1)*2 = 1*2 = 2 but 1*(1*2) = 1*2 = 2 ... use a
        // table where a*b = a + b (not associative with identity demands).
        let add = vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]];
        // "multiplication" a*b = a+b has no identity behaviour consistent
        // with 1 and fails distributivity/identity checks.
        let mul = add.clone();
        let err = ring_from_tables(&add, &mul, 0).unwrap_err();
        assert!(matches!(err, AxiomError::Law { .. }), "got {err:?}");
    }

    #[test]
    fn klein_four_decomposes_as_two_by_two() {
        // Z/2 x Z/2 written with scrambled labels: elements 0..4 with
        // addition a XOR b.
        let add: Vec<Vec<u64>> = (0..4)
            .map(|a| (0..4).map(|b| (a ^ b) as u64).collect())
            .collect();
        // Multiplication: componentwise product in F2 x F2 (a unital ring
        // with one = 3 = (1,1)).
        let mul: Vec<Vec<u64>> = (0..4u64)
            .map(|a| (0..4u64).map(|b| a & b).collect())
            .collect();
        let r = ring_from_tables(&add, &mul, 3).unwrap();
        assert_eq!(r.carrier().orders(), &[2, 2]);
        // Relabeling is a ring isomorphism: spot-check via labels.
        let one = r.one();
        assert_eq!(r.original_label(r.mul(one, one)), 3);
        for a in 0..4 {
            let ca = r.index_of_label(a).unwrap();
            assert_eq!(r.add(ca, ca), 0, "every element self-inverse");
        }
    }

    #[test]
    fn z4_table_decomposes_as_single_factor() {
        let add: Vec<Vec<u64>> = (0..4)
            .map(|a| (0..4).map(|b| ((a + b) % 4) as u64).collect())
            .collect();
        let mul: Vec<Vec<u64>> = (0..4)
            .map(|a| (0..4).map(|b| ((a * b) % 4) as u64).collect())
            .collect();
        let r = ring_from_tables(&add, &mul, 1).unwrap();
        assert_eq!(r.carrier().orders(), &[4]);
        // Isomorphic to Z/4: check a product through the labels.
        let two = r.index_of_label(2).unwrap();
        let three = r.index_of_label(3).unwrap();
        assert_eq!(r.original_label(r.mul(two, three)), 2);
    }

    #[test]
    fn ring_validation_catches_bad_identity() {
        let add = vec![vec![0, 1], vec![1, 0]];
        let mul = vec![vec![0, 0], vec![0, 1]];
        let err = ring_from_tables(&add, &mul, 0).unwrap_err();
        assert!(
            matches!(
                err,
                AxiomError::Law {
                    law: "identity",
                    ..
                }
            ),
            "got {err:?}"
        );
    }
}
