//! Instance files: the on-disk description of a triangular matrix ring.
//!
//! An instance is a TOML document naming the diagonal rings, the strict
//! upper bimodules, and the composition maps; `lower` turns a parsed
//! document into a fully validated [`TriMatSpec`]. Errors split into two
//! stable classes: a document that cannot be turned into build input at
//! all (parse), and one whose tables violate an algebraic axiom (axiom).
//!
//! Element conventions: a carrier declared as `orders = [d1, d2, ...]`
//! indexes its elements in mixed radix with the first factor least
//! significant, so element `t` has coordinates `(t % d1, t / d1 % d2, ...)`.
//! Tables for a `kind = "tables"` ring refer to elements by the row/column
//! labels of its own `add` table.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use trijord::derivlab::Caps;
use trijord::finalg::balanced_map_new;
use trijord::trimat::{build_spec, BuildError, TriMatSpec};
use trijord::{bimodule_new, ring_from_tables, ring_zmod, AbelianGroup, AxiomError, FiniteRing};

/// Why an instance file was rejected, split by exit-code class.
#[derive(Debug)]
pub enum LowerError {
    /// The document cannot be turned into build input (exit 3).
    Parse(String),
    /// The declared tables violate an algebraic axiom (exit 2).
    Axiom(String),
}

impl std::fmt::Display for LowerError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LowerError::Parse(m) => write!(f, "instance parse error: {m}"),
            LowerError::Axiom(m) => write!(f, "instance axiom failure: {m}"),
        }
    }
}

fn parse_err(m: impl Into<String>) -> LowerError {
    LowerError::Parse(m.into())
}

/// Structural problems are parse-class; violated laws are axiom-class.
fn classify(err: AxiomError) -> LowerError {
    match err {
        AxiomError::Law { .. } => LowerError::Axiom(err.to_string()),
        _ => LowerError::Parse(err.to_string()),
    }
}

fn classify_build(err: BuildError) -> LowerError {
    match err {
        BuildError::Shape(m) => LowerError::Parse(m),
        BuildError::Axiom(e) => classify(e),
        BuildError::CompAssoc { .. } => LowerError::Axiom(err.to_string()),
    }
}

/// Parsed instance document. Field order is the canonical serialization
/// order; map keys are block positions like `"1,2"` or `"1,2,3"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    pub rings: Vec<RingDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, ModuleDecl>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub comps: BTreeMap<String, CompDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<CapsDecl>,
}

/// One diagonal ring: `kind = "zmod"` with `modulus`, or `kind = "tables"`
/// with full `add`/`mul` Cayley tables and the label of `one`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDecl {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub add: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mul: Option<Vec<Vec<u64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub one: Option<u64>,
}

/// A bimodule: the string `"mult"` (both neighbouring rings are `zmod`
/// of one modulus, the block is that ring acting on itself), or explicit
/// carrier orders with flat action tables (`left[r * |M| + m]`,
/// `right[m * |S| + s]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModuleDecl {
    Shorthand(String),
    Tables(ModuleTables),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleTables {
    pub orders: Vec<u64>,
    pub left: Vec<u64>,
    pub right: Vec<u64>,
}

/// A composition map: `"mult"` (all three blocks are one `zmod` carrier,
/// composition is multiplication), or a flat table `table[x * |N| + y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CompDecl {
    Shorthand(String),
    Table(CompTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompTable {
    pub table: Vec<u64>,
}

/// Optional per-file defaults for the run caps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Command-line cap flags; they win over the file's `caps` block.
#[derive(Debug, Clone, Copy, Default)]
pub struct CapsOverride {
    pub element_cap: Option<u64>,
    pub oracle_cap: Option<u64>,
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, LowerError> {
        toml::from_str(text).map_err(|e| parse_err(e.to_string()))
    }

    /// Canonical serialization: formatting- and comment-invariant, with
    /// map keys in sorted order. Reparsing it yields the same document.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("instance documents serialize")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical().as_bytes());
        let out = h.finalize();
        let mut s = String::with_capacity(out.len() * 2);
        for b in out {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    /// Effective caps: defaults, overlaid by the file block, overlaid by
    /// the command line.
    pub fn effective_caps(&self, over: &CapsOverride) -> Caps {
        let mut caps = Caps::default();
        if let Some(decl) = &self.caps {
            if let Some(v) = decl.element_cap {
                caps.element_cap = v;
            }
            if let Some(v) = decl.oracle_cap {
                caps.oracle_cap = v;
            }
            if let Some(v) = decl.seed {
                caps.seed = v;
            }
        }
        if let Some(v) = over.element_cap {
            caps.element_cap = v;
        }
        if let Some(v) = over.oracle_cap {
            caps.oracle_cap = v;
        }
        if let Some(v) = over.seed {
            caps.seed = v;
        }
        caps
    }
}

/// A validated instance, ready for the solvers.
#[derive(Debug)]
pub struct LoweredInstance {
    pub file: InstanceFile,
    pub spec: TriMatSpec,
    pub caps: Caps,
    pub digest: String,
}

/// Parses and validates an instance document end to end.
pub fn lower(text: &str, over: &CapsOverride) -> Result<LoweredInstance, LowerError> {
    let file = InstanceFile::parse(text)?;
    let spec = build(&file)?;
    let caps = file.effective_caps(over);
    let digest = file.digest();
    Ok(LoweredInstance {
        file,
        spec,
        caps,
        digest,
    })
}

fn parse_pair(key: &str, n: usize) -> Result<(usize, usize), LowerError> {
    let parts: Vec<&str> = key.split(',').collect();
    let err = || {
        parse_err(format!(
            "module key {key:?} is not \"i,j\" with 1 <= i < j <= {n}"
        ))
    };
    if parts.len() != 2 {
        return Err(err());
    }
    let i: usize = parts[0].parse().map_err(|_| err())?;
    let j: usize = parts[1].parse().map_err(|_| err())?;
    if 1 <= i && i < j && j <= n {
        Ok((i, j))
    } else {
        Err(err())
    }
}

fn parse_triple(key: &str, n: usize) -> Result<(usize, usize, usize), LowerError> {
    let parts: Vec<&str> = key.split(',').collect();
    let err = || {
        parse_err(format!(
            "comp key {key:?} is not \"i,j,k\" with 1 <= i < j < k <= {n}"
        ))
    };
    if parts.len() != 3 {
        return Err(err());
    }
    let i: usize = parts[0].parse().map_err(|_| err())?;
    let j: usize = parts[1].parse().map_err(|_| err())?;
    let k: usize = parts[2].parse().map_err(|_| err())?;
    if 1 <= i && i < j && j < k && k <= n {
        Ok((i, j, k))
    } else {
        Err(err())
    }
}

fn build_ring(decl: &RingDecl, position: usize) -> Result<FiniteRing, LowerError> {
    let at = || format!("ring {position}");
    match decl.kind.as_str() {
        "zmod" => {
            if decl.add.is_some() || decl.mul.is_some() || decl.one.is_some() {
                return Err(parse_err(format!(
                    "{}: kind \"zmod\" takes only a modulus",
                    at()
                )));
            }
            let m = decl
                .modulus
                .ok_or_else(|| parse_err(format!("{}: kind \"zmod\" needs a modulus", at())))?;
            ring_zmod(m).map_err(classify)
        }
        "tables" => {
            if decl.modulus.is_some() {
                return Err(parse_err(format!(
                    "{}: kind \"tables\" does not take a modulus",
                    at()
                )));
            }
            let (Some(add), Some(mul), Some(one)) = (&decl.add, &decl.mul, decl.one) else {
                return Err(parse_err(format!(
                    "{}: kind \"tables\" needs add, mul, and one",
                    at()
                )));
            };
            ring_from_tables(add, mul, one).map_err(classify)
        }
        other => Err(parse_err(format!("{}: unknown ring kind {other:?}", at()))),
    }
}

/// A ring is eligible for `"mult"` shorthand when it is `zmod`.
fn zmod_modulus(ring: &FiniteRing, what: &str) -> Result<u64, LowerError> {
    ring.is_zmod().ok_or_else(|| {
        parse_err(format!(
            "\"mult\" shorthand needs a zmod ring, but {what} is not"
        ))
    })
}

fn build(file: &InstanceFile) -> Result<TriMatSpec, LowerError> {
    if file.rings.len() != file.n {
        return Err(parse_err(format!(
            "declared n = {} but {} rings are listed",
            file.n,
            file.rings.len()
        )));
    }
    let rings: Vec<Arc<FiniteRing>> = file
        .rings
        .iter()
        .enumerate()
        .map(|(idx, decl)| build_ring(decl, idx + 1).map(Arc::new))
        .collect::<Result<_, _>>()?;

    let mut modules = BTreeMap::new();
    for (key, decl) in &file.modules {
        let (i, j) = parse_pair(key, file.n)?;
        let left_ring = rings[i - 1].clone();
        let right_ring = rings[j - 1].clone();
        let module = match decl {
            ModuleDecl::Shorthand(s) if s == "mult" => {
                let m = zmod_modulus(&left_ring, &format!("ring {i}"))?;
                let m2 = zmod_modulus(&right_ring, &format!("ring {j}"))?;
                if m != m2 {
                    return Err(parse_err(format!(
                        "module {key:?}: \"mult\" needs equal moduli, got {m} and {m2}"
                    )));
                }
                bimodule_new(
                    left_ring,
                    right_ring,
                    AbelianGroup::zmod(m).map_err(classify)?,
                    |r, x| ((r as u64 * x as u64) % m) as usize,
                    |x, s| ((x as u64 * s as u64) % m) as usize,
                )
                .map_err(classify)?
            }
            ModuleDecl::Shorthand(s) => {
                return Err(parse_err(format!(
                    "module {key:?}: unknown shorthand {s:?} (only \"mult\")"
                )));
            }
            ModuleDecl::Tables(t) => {
                let carrier = AbelianGroup::new(t.orders.clone()).map_err(classify)?;
                let msize = carrier.size() as usize;
                let rsize = left_ring.size() as usize;
                let ssize = right_ring.size() as usize;
                if t.left.len() != rsize * msize {
                    return Err(parse_err(format!(
                        "module {key:?}: left table has {} entries, expected {}",
                        t.left.len(),
                        rsize * msize
                    )));
                }
                if t.right.len() != msize * ssize {
                    return Err(parse_err(format!(
                        "module {key:?}: right table has {} entries, expected {}",
                        t.right.len(),
                        msize * ssize
                    )));
                }
                if let Some(&v) = t.left.iter().chain(&t.right).find(|&&v| v >= msize as u64) {
                    return Err(parse_err(format!(
                        "module {key:?}: table value {v} out of carrier range 0..{msize}"
                    )));
                }
                // Table rows are indexed by the ring's own element labels.
                let lr = left_ring.clone();
                let rr = right_ring.clone();
                let (lt, rt) = (t.left.clone(), t.right.clone());
                bimodule_new(
                    left_ring.clone(),
                    right_ring.clone(),
                    carrier,
                    move |r, x| lt[lr.original_label(r) as usize * msize + x] as usize,
                    move |x, s| rt[x * ssize + rr.original_label(s) as usize] as usize,
                )
                .map_err(classify)?
            }
        };
        modules.insert((i, j), Arc::new(module));
    }

    let mut comps = BTreeMap::new();
    for (key, decl) in &file.comps {
        let (i, j, k) = parse_triple(key, file.n)?;
        let get = |a: usize, b: usize| {
            modules.get(&(a, b)).cloned().ok_or_else(|| {
                parse_err(format!("comp {key:?} references missing module ({a},{b})"))
            })
        };
        let src_left = get(i, j)?;
        let src_right = get(j, k)?;
        let target = get(i, k)?;
        let comp = match decl {
            CompDecl::Shorthand(s) if s == "mult" => {
                let m = zmod_modulus(&rings[i - 1], &format!("ring {i}"))?;
                for (mod_ref, what) in
                    [(&src_left, (i, j)), (&src_right, (j, k)), (&target, (i, k))]
                {
                    if mod_ref.carrier().orders() != [m].as_slice() {
                        return Err(parse_err(format!(
                            "comp {key:?}: \"mult\" needs module {what:?} to be a single Z/{m} block"
                        )));
                    }
                }
                balanced_map_new(src_left, src_right, target, |x, y| {
                    ((x as u64 * y as u64) % m) as usize
                })
                .map_err(classify)?
            }
            CompDecl::Shorthand(s) => {
                return Err(parse_err(format!(
                    "comp {key:?}: unknown shorthand {s:?} (only \"mult\")"
                )));
            }
            CompDecl::Table(t) => {
                let xsize = src_left.size() as usize;
                let ysize = src_right.size() as usize;
                let tsize = target.size() as usize;
                if t.table.len() != xsize * ysize {
                    return Err(parse_err(format!(
                        "comp {key:?}: table has {} entries, expected {}",
                        t.table.len(),
                        xsize * ysize
                    )));
                }
                if let Some(&v) = t.table.iter().find(|&&v| v >= tsize as u64) {
                    return Err(parse_err(format!(
                        "comp {key:?}: table value {v} out of target range 0..{tsize}"
                    )));
                }
                let table = t.table.clone();
                balanced_map_new(src_left, src_right, target, move |x, y| {
                    table[x * ysize + y] as usize
                })
                .map_err(classify)?
            }
        };
        comps.insert((i, j, k), Arc::new(comp));
    }

    build_spec(rings, modules, comps).map_err(classify_build)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"
n = 2

[[rings]]
kind = "zmod"
modulus = 3

[[rings]]
kind = "zmod"
modulus = 3

[modules]
"1,2" = "mult"
"#;

    #[test]
    fn parses_and_builds_a_shorthand_instance() {
        let inst = lower(TINY, &CapsOverride::default()).unwrap();
        assert_eq!(inst.spec.size(), 2);
        assert_eq!(inst.spec.element_count(), Some(27));
        assert_eq!(inst.digest.len(), 64);
    }

    #[test]
    fn canonical_form_ignores_formatting_and_comments() {
        let a = InstanceFile::parse(TINY).unwrap();
        let b =
            InstanceFile::parse(&format!("# a comment\n{}", TINY.replace("\n\n", "\n"))).unwrap();
        assert_eq!(a.digest(), b.digest());
    }

    #[test]
    fn round_trip_is_identity() {
        let a = InstanceFile::parse(TINY).unwrap();
        let b = InstanceFile::parse(&a.canonical()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = format!("{TINY}\nextra = 1\n");
        assert!(matches!(
            InstanceFile::parse(&bad),
            Err(LowerError::Parse(_))
        ));
    }

    #[test]
    fn missing_module_is_a_parse_class_error() {
        let text = r#"
n = 2

[[rings]]
kind = "zmod"
modulus = 3

[[rings]]
kind = "zmod"
modulus = 3
"#;
        let err = lower(text, &CapsOverride::default()).unwrap_err();
        assert!(matches!(err, LowerError::Parse(_)), "{err}");
    }

    #[test]
    fn broken_ring_table_is_an_axiom_class_error() {
        // Multiplication that fails distributivity over the Z/2 carrier.
        let text = r#"
n = 2

[[rings]]
kind = "tables"
add = [[0, 1], [1, 0]]
mul = [[0, 1], [1, 1]]
one = 1

[[rings]]
kind = "zmod"
modulus = 2

[modules."1,2"]
orders = []
left = [0, 0]
right = [0, 0]
"#;
        let err = lower(text, &CapsOverride::default()).unwrap_err();
        assert!(matches!(err, LowerError::Axiom(_)), "{err}");
    }

    #[test]
    fn caps_merge_in_precedence_order() {
        let text = format!("{TINY}\n[caps]\nseed = 7\noracle_cap = 50\n");
        let file = InstanceFile::parse(&text).unwrap();
        let caps = file.effective_caps(&CapsOverride {
            oracle_cap: Some(99),
            ..CapsOverride::default()
        });
        assert_eq!(caps.seed, 7);
        assert_eq!(caps.oracle_cap, 99);
        assert_eq!(caps.element_cap, Caps::default().element_cap);
    }
}
