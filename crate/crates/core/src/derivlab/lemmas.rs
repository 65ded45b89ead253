//! Identity-by-identity verification for maps on triangular matrix rings.
//!
//! Each `check_*` function verifies one structural identity of a single
//! additive map over its full quantifier range on the instance (or a
//! seeded sample where the range is declared sampled) and reports a
//! [`LemmaEntry`]: pass, fail with a reproducible witness, or skipped.
//! The checkers themselves are ungated — they evaluate the identity no
//! matter which hypotheses hold — while [`lemma_suite`] applies the
//! hypothesis gates: on instances with additive 2-torsion the linearized
//! Jordan condition does not control these identities, and the
//! faithfulness-dependent checks are only asserted where their modules
//! are faithful.

use super::{scan_rng, Caps, HypothesisReport};
use crate::linmap::AddMap;
use crate::scan;
use crate::trimat::{TriMatElement, TriMatSpec};

/// Outcome of one checker run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaStatus {
    Pass,
    Fail,
    Skipped,
}

impl LemmaStatus {
    pub fn label(self) -> &'static str {
        match self {
            LemmaStatus::Pass => "pass",
            LemmaStatus::Fail => "fail",
            LemmaStatus::Skipped => "skipped",
        }
    }
}

/// One checker's verdict; failures always carry a reproducible witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaEntry {
    pub id: &'static str,
    pub status: LemmaStatus,
    pub detail: Option<String>,
}

impl LemmaEntry {
    fn pass(id: &'static str) -> Self {
        LemmaEntry {
            id,
            status: LemmaStatus::Pass,
            detail: None,
        }
    }

    fn pass_with(id: &'static str, detail: String) -> Self {
        LemmaEntry {
            id,
            status: LemmaStatus::Pass,
            detail: Some(detail),
        }
    }

    fn fail(id: &'static str, witness: String) -> Self {
        LemmaEntry {
            id,
            status: LemmaStatus::Fail,
            detail: Some(witness),
        }
    }

    fn skip(id: &'static str, note: &str) -> Self {
        LemmaEntry {
            id,
            status: LemmaStatus::Skipped,
            detail: Some(note.to_string()),
        }
    }
}

impl std::fmt::Display for LemmaEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.id, self.status.label())?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

/// All checker ids, in suite order.
pub const LEMMA_IDS: [&str; 18] = [
    "unit_image_support",
    "diagonal_image_support",
    "block_image_support",
    "image_block_formula",
    "right_tail_factorization",
    "unit_component_antisymmetry",
    "left_tail_factorization",
    "off_diagonal_image_formula",
    "block_product_rule",
    "product_component_full",
    "product_component_left",
    "product_component_right",
    "left_factor_component_shift",
    "right_factor_component_assoc",
    "left_edge_leibniz",
    "right_edge_leibniz",
    "diagonal_leibniz",
    "component_leibniz",
];

/// Exhaustive pair scans are attempted up to this many pairs; larger
/// instances fall back to a seeded sample.
const PAIR_EXHAUST_LIMIT: u64 = 1_000_000;
/// Sample sizes for the two sampled checkers.
const FORMULA_SAMPLES: u32 = 200;
const PAIR_SAMPLES: u32 = 500;

fn embed(spec: &TriMatSpec, i: usize, j: usize, v: usize) -> TriMatElement {
    spec.embed_block(i, j, v)
        .expect("block indices are ordered")
}

fn entry_at(spec: &TriMatSpec, a: &TriMatElement, i: usize, j: usize) -> usize {
    spec.block_entry(a, i, j)
        .expect("block indices are ordered")
}

fn block_size(spec: &TriMatSpec, i: usize, j: usize) -> usize {
    spec.block_group(i, j).size() as usize
}

/// Image of the whole unit `E_ii` under the map.
fn unit_image(spec: &TriMatSpec, map: &AddMap, i: usize) -> TriMatElement {
    map.apply(spec, &spec.unit_e(i))
}

/// The image of `E_ii` may only touch column `i` strictly above the
/// diagonal and row `i` strictly right of it; in particular its `(i, i)`
/// block vanishes.
pub fn check_unit_image_support(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "unit_image_support";
    let n = spec.size();
    for i in 1..=n {
        let d = unit_image(spec, map, i);
        for &(s, t) in spec.blocks() {
            let allowed = (t == i && s < i) || (s == i && t > i);
            if allowed {
                continue;
            }
            let v = entry_at(spec, &d, s, t);
            if v != 0 {
                return LemmaEntry::fail(
                    ID,
                    format!(
                        "image of the unit at i={i} has nonzero block ({s},{t}), value index {v}"
                    ),
                );
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// The image of a diagonal element `E_ii r` may only touch column `i`,
/// the `(i, i)` block, and row `i`.
pub fn check_diagonal_image_support(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "diagonal_image_support";
    let n = spec.size();
    for i in 1..=n {
        for r in 0..spec.ring(i).size() as usize {
            let d = map.apply(spec, &embed(spec, i, i, r));
            for &(s, t) in spec.blocks() {
                let allowed = (t == i && s <= i) || (s == i && t >= i);
                if allowed {
                    continue;
                }
                let v = entry_at(spec, &d, s, t);
                if v != 0 {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "image of diagonal element r={r} at i={i} has nonzero block ({s},{t}), value index {v}"
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// The image of a strict-upper block element `m` at `(i, j)` may only
/// touch column `j` in rows up to `i` and row `i` in columns from `j` on.
pub fn check_block_image_support(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "block_image_support";
    for &(i, j) in spec.blocks() {
        if i == j {
            continue;
        }
        for m in 0..block_size(spec, i, j) {
            let d = map.apply(spec, &embed(spec, i, j, m));
            for &(s, t) in spec.blocks() {
                let allowed = (t == j && s <= i) || (s == i && t >= j);
                if allowed {
                    continue;
                }
                let v = entry_at(spec, &d, s, t);
                if v != 0 {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "image of block ({i},{j}) element m={m} has nonzero block ({s},{t}), value index {v}"
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// The image of a full matrix decomposes blockwise: the `(i, i)` block
/// sees only the `(i, i)` entry, and the `(i, j)` block is the sum of the
/// map's `(i, j)` components over the row-`i` entries up to column `j`
/// and the column-`j` entries below row `i`.
pub fn check_image_block_formula(spec: &TriMatSpec, map: &AddMap, caps: &Caps) -> LemmaEntry {
    const ID: &str = "image_block_formula";
    let check = |a: &TriMatElement| -> Option<String> {
        let d = map.apply(spec, a);
        for &(i, j) in spec.blocks() {
            let got = entry_at(spec, &d, i, j);
            let want = if i == j {
                let piece = embed(spec, i, i, entry_at(spec, a, i, i));
                entry_at(spec, &map.apply(spec, &piece), i, i)
            } else {
                let grp = spec.block_group(i, j);
                let mut acc = 0usize;
                for k in i..=j {
                    let piece = embed(spec, i, k, entry_at(spec, a, i, k));
                    acc = grp.add(acc, entry_at(spec, &map.apply(spec, &piece), i, j));
                }
                for k in i + 1..=j {
                    let piece = embed(spec, k, j, entry_at(spec, a, k, j));
                    acc = grp.add(acc, entry_at(spec, &map.apply(spec, &piece), i, j));
                }
                acc
            };
            if got != want {
                return Some(format!(
                    "A = {:?}: block ({i},{j}) of the image is {got}, formula gives {want}",
                    spec.to_coords(a)
                ));
            }
        }
        None
    };
    match spec.element_count() {
        Some(c) if c <= caps.element_cap => {
            match scan::find_violation(c, |t| check(&spec.element_from_flat(t))) {
                Some(w) => LemmaEntry::fail(ID, w),
                None => LemmaEntry::pass(ID),
            }
        }
        _ => {
            let mut rng = scan_rng(caps, 1);
            for _ in 0..FORMULA_SAMPLES {
                let a = spec.random_element(&mut rng);
                if let Some(w) = check(&a) {
                    return LemmaEntry::fail(ID, w);
                }
            }
            LemmaEntry::pass_with(
                ID,
                format!("sampled {FORMULA_SAMPLES} elements, seed {}", caps.seed),
            )
        }
    }
}

/// Row tail of an off-diagonal image: the `(i, s)` component of `D(m)`,
/// for `m` in block `(i, j)` and `s > j`, is `m` composed with the
/// `(j, s)` component of the image of the unit at `j`.
pub fn check_right_tail_factorization(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "right_tail_factorization";
    let n = spec.size();
    for &(i, j) in spec.blocks() {
        if i == j {
            continue;
        }
        for s in j + 1..=n {
            let du_j = unit_image(spec, map, j);
            let tail = entry_at(spec, &du_j, j, s);
            for m in 0..block_size(spec, i, j) {
                let lhs = entry_at(spec, &map.apply(spec, &embed(spec, i, j, m)), i, s);
                let rhs = spec.comp(i, j, s).apply(m, tail);
                if lhs != rhs {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "m={m} in block ({i},{j}), s={s}: image component is {lhs}, factorization gives {rhs}"
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// The `(i, j)` components of the images of the two units cancel:
/// `D_ij(E_ii) + D_ij(E_jj) = 0` for `i < j`.
pub fn check_unit_component_antisymmetry(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "unit_component_antisymmetry";
    for &(i, j) in spec.blocks() {
        if i == j {
            continue;
        }
        let a = entry_at(spec, &unit_image(spec, map, i), i, j);
        let b = entry_at(spec, &unit_image(spec, map, j), i, j);
        let sum = spec.block_group(i, j).add(a, b);
        if sum != 0 {
            return LemmaEntry::fail(
                ID,
                format!("components at ({i},{j}) sum to value index {sum}: {a} from the unit at {i}, {b} from the unit at {j}"),
            );
        }
    }
    LemmaEntry::pass(ID)
}

/// Column tail of an off-diagonal image: the `(s, j)` component of
/// `D(m)`, for `m` in block `(i, j)` and `s < i`, is the `(s, i)`
/// component of the image of the unit at `i`, composed with `m`.
pub fn check_left_tail_factorization(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "left_tail_factorization";
    for &(i, j) in spec.blocks() {
        if i == j {
            continue;
        }
        for s in 1..i {
            let du_i = unit_image(spec, map, i);
            let head = entry_at(spec, &du_i, s, i);
            for m in 0..block_size(spec, i, j) {
                let lhs = entry_at(spec, &map.apply(spec, &embed(spec, i, j, m)), s, j);
                let rhs = spec.comp(s, i, j).apply(head, m);
                if lhs != rhs {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "m={m} in block ({i},{j}), s={s}: image component is {lhs}, factorization gives {rhs}"
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Full image of an off-diagonal element: `D(m)` equals the column tail
/// through the unit at `i`, plus the `(i, j)` component, plus the row
/// tail through the unit at `j` — nothing else.
pub fn check_off_diagonal_image_formula(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "off_diagonal_image_formula";
    let n = spec.size();
    for &(i, j) in spec.blocks() {
        if i == j {
            continue;
        }
        let du_i = unit_image(spec, map, i);
        let du_j = unit_image(spec, map, j);
        for m in 0..block_size(spec, i, j) {
            let img = map.apply(spec, &embed(spec, i, j, m));
            let mut expect = spec.peirce(&img, i, j).expect("block indices are ordered");
            for k in 1..i {
                let head = entry_at(spec, &du_i, k, i);
                let v = spec.comp(k, i, j).apply(head, m);
                expect = spec.add(&expect, &embed(spec, k, j, v));
            }
            for t in j + 1..=n {
                let tail = entry_at(spec, &du_j, j, t);
                let v = spec.comp(i, j, t).apply(m, tail);
                expect = spec.add(&expect, &embed(spec, i, t, v));
            }
            if img != expect {
                return LemmaEntry::fail(
                    ID,
                    format!(
                        "m={m} in block ({i},{j}): image {:?} differs from the three-part formula {:?}",
                        spec.to_coords(&img),
                        spec.to_coords(&expect)
                    ),
                );
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Leibniz rule on composable block pairs: for `m` in block `(i, j)` and
/// `x` in block `(j, t)` with `j < t` (the `i = j` case acts through the
/// module action), `D(mx) = D(m)x + mD(x)`.
pub fn check_block_product_rule(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "block_product_rule";
    let n = spec.size();
    for i in 1..=n {
        for j in i..=n {
            for t in j + 1..=n {
                for m in 0..block_size(spec, i, j) {
                    let bm = embed(spec, i, j, m);
                    let dm = map.apply(spec, &bm);
                    for x in 0..block_size(spec, j, t) {
                        let bx = embed(spec, j, t, x);
                        let lhs = map.apply(spec, &spec.mul(&bm, &bx));
                        let rhs =
                            spec.add(&spec.mul(&dm, &bx), &spec.mul(&bm, &map.apply(spec, &bx)));
                        if lhs != rhs {
                            return LemmaEntry::fail(
                                ID,
                                format!(
                                    "m={m} in ({i},{j}), x={x} in ({j},{t}): D(mx) = {:?} but the rule gives {:?}",
                                    spec.to_coords(&lhs),
                                    spec.to_coords(&rhs)
                                ),
                            );
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Component form of the product rule on strictly composable blocks:
/// the `(i, t)` component of `D(mx)` splits through the `(i, j)` and
/// `(j, t)` components.
pub fn check_product_component_full(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "product_component_full";
    let n = spec.size();
    for i in 1..=n {
        for j in i + 1..=n {
            for t in j + 1..=n {
                let grp = spec.block_group(i, t);
                for m in 0..block_size(spec, i, j) {
                    let bm = embed(spec, i, j, m);
                    let dm_ij = entry_at(spec, &map.apply(spec, &bm), i, j);
                    for x in 0..block_size(spec, j, t) {
                        let bx = embed(spec, j, t, x);
                        let lhs = entry_at(spec, &map.apply(spec, &spec.mul(&bm, &bx)), i, t);
                        let dx_jt = entry_at(spec, &map.apply(spec, &bx), j, t);
                        let rhs = grp.add(
                            spec.comp(i, j, t).apply(dm_ij, x),
                            spec.comp(i, j, t).apply(m, dx_jt),
                        );
                        if lhs != rhs {
                            return LemmaEntry::fail(
                                ID,
                                format!("m={m} in ({i},{j}), x={x} in ({j},{t}): component ({i},{t}) is {lhs}, split gives {rhs}"),
                            );
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Rows strictly above `i` only see the left factor: the `(s, t)`
/// component of `D(mx)` for `s < i` is the `(s, j)` component of `D(m)`
/// composed with `x`.
pub fn check_product_component_left(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "product_component_left";
    let n = spec.size();
    for i in 1..=n {
        for j in i + 1..=n {
            for t in j + 1..=n {
                for s in 1..i {
                    for m in 0..block_size(spec, i, j) {
                        let bm = embed(spec, i, j, m);
                        let dm_sj = entry_at(spec, &map.apply(spec, &bm), s, j);
                        for x in 0..block_size(spec, j, t) {
                            let bx = embed(spec, j, t, x);
                            let lhs = entry_at(spec, &map.apply(spec, &spec.mul(&bm, &bx)), s, t);
                            let rhs = spec.comp(s, j, t).apply(dm_sj, x);
                            if lhs != rhs {
                                return LemmaEntry::fail(
                                    ID,
                                    format!("s={s}, m={m} in ({i},{j}), x={x} in ({j},{t}): component ({s},{t}) is {lhs}, left factor gives {rhs}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Columns strictly right of `t` only see the right factor: the `(i, k)`
/// component of `D(mx)` for `k > t` is `m` composed with the `(j, k)`
/// component of `D(x)`.
pub fn check_product_component_right(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "product_component_right";
    let n = spec.size();
    for i in 1..=n {
        for j in i + 1..=n {
            for t in j + 1..=n {
                for k in t + 1..=n {
                    for m in 0..block_size(spec, i, j) {
                        let bm = embed(spec, i, j, m);
                        for x in 0..block_size(spec, j, t) {
                            let bx = embed(spec, j, t, x);
                            let lhs = entry_at(spec, &map.apply(spec, &spec.mul(&bm, &bx)), i, k);
                            let dx_jk = entry_at(spec, &map.apply(spec, &bx), j, k);
                            let rhs = spec.comp(i, j, k).apply(m, dx_jk);
                            if lhs != rhs {
                                return LemmaEntry::fail(
                                    ID,
                                    format!("k={k}, m={m} in ({i},{j}), x={x} in ({j},{t}): component ({i},{k}) is {lhs}, right factor gives {rhs}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Composing a component with a further factor lands where direct
/// application does: for `m1` in block `(b, c)` and `m2` in block
/// `(c, j)` with `i < b <= c < j`, the `(i, c)` component of `D(m1)`
/// composed with `m2` equals the `(i, j)` component of `D(m1 m2)`.
pub fn check_left_factor_component_shift(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "left_factor_component_shift";
    let n = spec.size();
    for i in 1..=n {
        for b in i + 1..=n {
            for c in b..=n {
                for j in c + 1..=n {
                    for m1 in 0..block_size(spec, b, c) {
                        let bm1 = embed(spec, b, c, m1);
                        let d_ic = entry_at(spec, &map.apply(spec, &bm1), i, c);
                        for m2 in 0..block_size(spec, c, j) {
                            let bm2 = embed(spec, c, j, m2);
                            let lhs = spec.comp(i, c, j).apply(d_ic, m2);
                            let rhs = entry_at(spec, &map.apply(spec, &spec.mul(&bm1, &bm2)), i, j);
                            if lhs != rhs {
                                return LemmaEntry::fail(
                                    ID,
                                    format!("i={i}, m1={m1} in ({b},{c}), m2={m2} in ({c},{j}): shifted component is {lhs}, direct image is {rhs}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// A product's component past its support factors through the right
/// factor: for `m1` in block `(i, k)` and `m2` in block `(k, t)` with
/// `t < j`, the `(i, j)` component of `D(m1 m2)` is `m1` times the
/// `(k, j)` component of `D(m2)`.
pub fn check_right_factor_component_assoc(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "right_factor_component_assoc";
    let n = spec.size();
    for i in 1..=n {
        for k in i..=n {
            for t in k..=n {
                for j in t + 1..=n {
                    for m2 in 0..block_size(spec, k, t) {
                        let bm2 = embed(spec, k, t, m2);
                        let d_kj = entry_at(spec, &map.apply(spec, &bm2), k, j);
                        let lifted = embed(spec, k, j, d_kj);
                        for m1 in 0..block_size(spec, i, k) {
                            let bm1 = embed(spec, i, k, m1);
                            let lhs = entry_at(spec, &map.apply(spec, &spec.mul(&bm1, &bm2)), i, j);
                            let rhs = entry_at(spec, &spec.mul(&bm1, &lifted), i, j);
                            if lhs != rhs {
                                return LemmaEntry::fail(
                                    ID,
                                    format!("m1={m1} in ({i},{k}), m2={m2} in ({k},{t}), j={j}: component ({i},{j}) is {lhs}, right factor gives {rhs}"),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Leibniz rule for a diagonal element acting on the last column:
/// `D(a m) = D(a)m + aD(m)` for `a` in `R_i`, `m` in block `(i, n)`,
/// `i < n`.
pub fn check_left_edge_leibniz(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "left_edge_leibniz";
    let n = spec.size();
    for i in 1..n {
        for a in 0..spec.ring(i).size() as usize {
            let ba = embed(spec, i, i, a);
            let da = map.apply(spec, &ba);
            for m in 0..block_size(spec, i, n) {
                let bm = embed(spec, i, n, m);
                let lhs = map.apply(spec, &spec.mul(&ba, &bm));
                let rhs = spec.add(&spec.mul(&da, &bm), &spec.mul(&ba, &map.apply(spec, &bm)));
                if lhs != rhs {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "a={a} in ring {i}, m={m} in ({i},{n}): D(am) = {:?}, rule gives {:?}",
                            spec.to_coords(&lhs),
                            spec.to_coords(&rhs)
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Leibniz rule for the corner block acted on from the right:
/// `D(m a) = D(m)a + mD(a)` for `m` in block `(1, n)`, `a` in `R_n`.
pub fn check_right_edge_leibniz(spec: &TriMatSpec, map: &AddMap) -> LemmaEntry {
    const ID: &str = "right_edge_leibniz";
    let n = spec.size();
    for a in 0..spec.ring(n).size() as usize {
        let ba = embed(spec, n, n, a);
        let da = map.apply(spec, &ba);
        for m in 0..block_size(spec, 1, n) {
            let bm = embed(spec, 1, n, m);
            let lhs = map.apply(spec, &spec.mul(&bm, &ba));
            let rhs = spec.add(&spec.mul(&map.apply(spec, &bm), &ba), &spec.mul(&bm, &da));
            if lhs != rhs {
                return LemmaEntry::fail(
                    ID,
                    format!(
                        "m={m} in (1,{n}), a={a} in ring {n}: D(ma) = {:?}, rule gives {:?}",
                        spec.to_coords(&lhs),
                        spec.to_coords(&rhs)
                    ),
                );
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Diagonal Leibniz rule, per ring index: the `(i, i)` component of the
/// map restricts to a derivation of `R_i`. Checked only at the indices
/// passed in, which the suite picks from the faithfulness flags.
pub fn check_diagonal_leibniz(spec: &TriMatSpec, map: &AddMap, indices: &[usize]) -> LemmaEntry {
    const ID: &str = "diagonal_leibniz";
    for &i in indices {
        let ring = spec.ring(i);
        let size = ring.size() as usize;
        let d_ii = |a: usize| entry_at(spec, &map.apply(spec, &embed(spec, i, i, a)), i, i);
        for a in 0..size {
            let da = d_ii(a);
            for b in 0..size {
                let lhs = d_ii(ring.mul(a, b));
                let rhs = ring.add(ring.mul(da, b), ring.mul(a, d_ii(b)));
                if lhs != rhs {
                    return LemmaEntry::fail(
                        ID,
                        format!(
                            "i={i}, a={a}, b={b}: component D_ii(ab) = {lhs}, rule gives {rhs}"
                        ),
                    );
                }
            }
        }
    }
    LemmaEntry::pass(ID)
}

/// Strict-upper components of the full Leibniz rule: for all `A`, `B`
/// and `i < j`, the `(i, j)` block of `D(A)B + AD(B)` equals the
/// `(i, j)` block of `D(AB)`. Exhaustive when the pair count fits the
/// built-in bound, otherwise a seeded sample.
pub fn check_component_leibniz(spec: &TriMatSpec, map: &AddMap, caps: &Caps) -> LemmaEntry {
    const ID: &str = "component_leibniz";
    let check = |a: &TriMatElement, b: &TriMatElement| -> Option<String> {
        let dab = map.apply(spec, &spec.mul(a, b));
        let left = spec.mul(&map.apply(spec, a), b);
        let right = spec.mul(a, &map.apply(spec, b));
        for &(i, j) in spec.blocks() {
            if i == j {
                continue;
            }
            let grp = spec.block_group(i, j);
            let lhs = grp.add(entry_at(spec, &left, i, j), entry_at(spec, &right, i, j));
            let rhs = entry_at(spec, &dab, i, j);
            if lhs != rhs {
                return Some(format!(
                    "A = {:?}, B = {:?}: block ({i},{j}) of D(A)B + AD(B) is {lhs}, of D(AB) is {rhs}",
                    spec.to_coords(a),
                    spec.to_coords(b)
                ));
            }
        }
        None
    };
    let pair_count = spec.element_count().and_then(|c| c.checked_mul(c));
    match pair_count {
        Some(p) if p <= PAIR_EXHAUST_LIMIT => {
            let c = spec
                .element_count()
                .expect("count exists when the square does");
            match scan::find_violation(p, |t| {
                check(
                    &spec.element_from_flat(t / c),
                    &spec.element_from_flat(t % c),
                )
            }) {
                Some(w) => LemmaEntry::fail(ID, w),
                None => LemmaEntry::pass(ID),
            }
        }
        _ => {
            let mut rng = scan_rng(caps, 2);
            for _ in 0..PAIR_SAMPLES {
                let a = spec.random_element(&mut rng);
                let b = spec.random_element(&mut rng);
                if let Some(w) = check(&a, &b) {
                    return LemmaEntry::fail(ID, w);
                }
            }
            LemmaEntry::pass_with(
                ID,
                format!("sampled {PAIR_SAMPLES} pairs, seed {}", caps.seed),
            )
        }
    }
}

/// Runs every checker with its hypothesis gates.
///
/// The structural identities are consequences of the linearized Jordan
/// condition only on 2-torsion-free instances, so everything is skipped
/// when 2-torsion is present. The diagonal Leibniz rule is asserted per
/// index where the relevant module is faithful, and the component
/// Leibniz identity requires every faithfulness flag.
pub fn lemma_suite(
    spec: &TriMatSpec,
    map: &AddMap,
    hyp: &HypothesisReport,
    caps: &Caps,
) -> Vec<LemmaEntry> {
    const TORSION_NOTE: &str =
        "additive 2-torsion present: the linearized Jordan condition does not pin this identity";
    if !hyp.two_torsion_free {
        return LEMMA_IDS
            .iter()
            .map(|id| LemmaEntry::skip(id, TORSION_NOTE))
            .collect();
    }
    let n = spec.size();
    let mut out = Vec::with_capacity(LEMMA_IDS.len());
    out.push(check_unit_image_support(spec, map));
    out.push(check_diagonal_image_support(spec, map));
    out.push(check_block_image_support(spec, map));
    out.push(check_image_block_formula(spec, map, caps));
    out.push(check_right_tail_factorization(spec, map));
    out.push(check_unit_component_antisymmetry(spec, map));
    out.push(check_left_tail_factorization(spec, map));
    out.push(check_off_diagonal_image_formula(spec, map));
    out.push(check_block_product_rule(spec, map));
    out.push(check_product_component_full(spec, map));
    out.push(check_product_component_left(spec, map));
    out.push(check_product_component_right(spec, map));
    out.push(check_left_factor_component_shift(spec, map));
    out.push(check_right_factor_component_assoc(spec, map));
    out.push(check_left_edge_leibniz(spec, map));
    out.push(check_right_edge_leibniz(spec, map));

    let allowed: Vec<usize> = (1..=n)
        .filter(|&i| {
            if i < n {
                hyp.faithful_left[i - 1]
            } else {
                hyp.faithful_right_last
            }
        })
        .collect();
    if allowed.is_empty() {
        out.push(LemmaEntry::skip(
            "diagonal_leibniz",
            "no diagonal index has the faithfulness its identity needs",
        ));
    } else {
        let mut entry = check_diagonal_leibniz(spec, map, &allowed);
        if entry.status == LemmaStatus::Pass && allowed.len() < n {
            let skipped: Vec<String> = (1..=n)
                .filter(|i| !allowed.contains(i))
                .map(|i| i.to_string())
                .collect();
            entry = LemmaEntry::pass_with(
                "diagonal_leibniz",
                format!(
                    "indices {} skipped: module not faithful",
                    skipped.join(", ")
                ),
            );
        }
        out.push(entry);
    }

    if hyp.all_faithful() {
        out.push(check_component_leibniz(spec, map, caps));
    } else {
        out.push(LemmaEntry::skip(
            "component_leibniz",
            "requires every faithfulness hypothesis",
        ));
    }
    debug_assert_eq!(out.len(), LEMMA_IDS.len());
    debug_assert!(out.iter().zip(LEMMA_IDS).all(|(e, id)| e.id == id));
    out
}

#[cfg(test)]
mod tests {
    use super::super::{
        check_hypotheses, inner_derivation, is_member, scan_rng, solve_space, Caps, DerivKind,
    };
    use super::*;
    use crate::linmap::AddMap;
    use crate::trimat::ut_zmod;

    fn all_pass(entries: &[LemmaEntry]) -> bool {
        entries.iter().all(|e| e.status == LemmaStatus::Pass)
    }

    #[test]
    fn zero_map_passes_the_full_suite_on_an_odd_faithful_instance() {
        let spec = ut_zmod(3, 3).unwrap();
        let hyp = check_hypotheses(&spec);
        let zero = AddMap::zero(spec.basis().clone());
        let entries = lemma_suite(&spec, &zero, &hyp, &Caps::default());
        assert_eq!(entries.len(), LEMMA_IDS.len());
        assert!(all_pass(&entries), "{entries:?}");
    }

    #[test]
    fn suite_is_skipped_wholesale_under_two_torsion() {
        let spec = ut_zmod(2, 2).unwrap();
        let hyp = check_hypotheses(&spec);
        let zero = AddMap::zero(spec.basis().clone());
        let entries = lemma_suite(&spec, &zero, &hyp, &Caps::default());
        assert!(entries.iter().all(|e| e.status == LemmaStatus::Skipped));
        assert_eq!(entries.len(), LEMMA_IDS.len());
    }

    /// The raw checkers hold for genuine derivations no matter the
    /// instance, 2-torsion included; commutator maps supply them.
    #[test]
    fn raw_checkers_pass_for_inner_derivations_on_a_composite_instance() {
        let spec = ut_zmod(3, 6).unwrap();
        let caps = Caps::default();
        let mut rng = scan_rng(&caps, 11);
        let n = spec.size();
        let all_indices: Vec<usize> = (1..=n).collect();
        for _ in 0..10 {
            let a = spec.random_element(&mut rng);
            let d = inner_derivation(&spec, &a);
            let entries = vec![
                check_unit_image_support(&spec, &d),
                check_diagonal_image_support(&spec, &d),
                check_block_image_support(&spec, &d),
                check_image_block_formula(&spec, &d, &caps),
                check_right_tail_factorization(&spec, &d),
                check_unit_component_antisymmetry(&spec, &d),
                check_left_tail_factorization(&spec, &d),
                check_off_diagonal_image_formula(&spec, &d),
                check_block_product_rule(&spec, &d),
                check_product_component_full(&spec, &d),
                check_product_component_left(&spec, &d),
                check_product_component_right(&spec, &d),
                check_left_factor_component_shift(&spec, &d),
                check_right_factor_component_assoc(&spec, &d),
                check_left_edge_leibniz(&spec, &d),
                check_right_edge_leibniz(&spec, &d),
                check_diagonal_leibniz(&spec, &d, &all_indices),
                check_component_leibniz(&spec, &d, &caps),
            ];
            assert!(
                all_pass(&entries),
                "witness for A = {:?}: {entries:?}",
                spec.to_coords(&a)
            );
        }
    }

    #[test]
    fn jordan_space_generators_pass_the_suite_on_ut3_f3() {
        let spec = ut_zmod(3, 3).unwrap();
        let caps = Caps::default();
        let hyp = check_hypotheses(&spec);
        assert!(hyp.all_hold());
        let space = solve_space(&spec, DerivKind::JordanLinearized, &caps).unwrap();
        assert!(!space.generators.is_empty());
        for gen in &space.generators {
            let entries = lemma_suite(&spec, gen, &hyp, &caps);
            assert!(all_pass(&entries), "{entries:?}");
        }
    }

    /// n = 4 exercises the component ranges that are empty on smaller
    /// instances (rows above, columns beyond, shifted factors).
    #[test]
    fn jordan_space_generators_pass_the_suite_on_ut4_f3() {
        let spec = ut_zmod(4, 3).unwrap();
        // A small element cap keeps the formula checker on its sampled
        // path; the structural ranges are still exhaustive.
        let caps = Caps {
            element_cap: 2_000,
            ..Caps::default()
        };
        let hyp = check_hypotheses(&spec);
        assert!(hyp.all_hold());
        let space = solve_space(&spec, DerivKind::JordanLinearized, &caps).unwrap();
        for gen in &space.generators {
            let entries = lemma_suite(&spec, gen, &hyp, &caps);
            assert!(all_pass(&entries), "{entries:?}");
        }
    }

    #[test]
    fn a_non_jordan_map_fails_with_a_witness() {
        let spec = ut_zmod(2, 3).unwrap();
        let id = AddMap::identity(spec.basis().clone());
        assert!(
            is_member(&spec, &id, DerivKind::JordanLinearized, &Caps::default())
                .unwrap()
                .is_some()
        );
        let entry = check_unit_image_support(&spec, &id);
        assert_eq!(entry.status, LemmaStatus::Fail);
        assert!(entry.detail.is_some());
    }

    #[test]
    fn partially_faithful_instances_gate_the_diagonal_rule_per_index() {
        let spec = ut_zmod(3, 3).unwrap();
        let mut hyp = check_hypotheses(&spec);
        hyp.faithful_left[0] = false;
        let zero = AddMap::zero(spec.basis().clone());
        let entries = lemma_suite(&spec, &zero, &hyp, &Caps::default());
        let diag = entries.iter().find(|e| e.id == "diagonal_leibniz").unwrap();
        assert_eq!(diag.status, LemmaStatus::Pass);
        assert!(diag
            .detail
            .as_deref()
            .unwrap()
            .contains("indices 1 skipped"));
        let major = entries
            .iter()
            .find(|e| e.id == "component_leibniz")
            .unwrap();
        assert_eq!(major.status, LemmaStatus::Skipped);
    }
}
