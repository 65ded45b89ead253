//! Machine-readable output: JSON fragments for each command and the full
//! bundled report.
//!
//! Everything here is reproducible byte-for-byte for a given instance
//! and seed: solver output is canonical, sampled checkers derive their
//! randomness from the recorded seed, and no wall-clock data enters the
//! document (durations go to stderr instead).

use serde::Serialize;
use trijord::derivlab::{
    check_hypotheses, compare_spaces, counterexample_scan, lemma_suite, solve_space, Caps,
    DerivError, DerivKind, HypothesisReport, LemmaEntry,
};
use trijord::linmap::SolutionSpace;
use trijord::trimat::TriMatSpec;
use trijord::AddMap;

pub const TIMING_POLICY: &str =
    "wall-clock durations go to stderr; the report body is deterministic";

/// Renders a map as one image vector per basis generator.
pub fn render_map(map: &AddMap) -> Vec<Vec<u64>> {
    (0..map.basis().len())
        .map(|c| map.image_of_generator(c))
        .collect()
}

#[derive(Serialize)]
pub struct BasisJson {
    pub generator_count: usize,
    pub orders: Vec<u64>,
    pub blocks: Vec<BlockJson>,
}

#[derive(Serialize)]
pub struct BlockJson {
    pub block: String,
    pub orders: Vec<u64>,
}

pub fn basis_json(spec: &TriMatSpec) -> BasisJson {
    let basis = spec.basis();
    BasisJson {
        generator_count: basis.len(),
        orders: basis.orders().to_vec(),
        blocks: spec
            .blocks()
            .iter()
            .map(|&(i, j)| BlockJson {
                block: format!("{i},{j}"),
                orders: spec.block_group(i, j).orders().to_vec(),
            })
            .collect(),
    }
}

#[derive(Serialize)]
pub struct HypothesesJson {
    pub faithful_left: Vec<bool>,
    pub faithful_right_last: bool,
    pub two_torsion_free: bool,
    pub all_hold: bool,
}

pub fn hypotheses_json(hyp: &HypothesisReport) -> HypothesesJson {
    HypothesesJson {
        faithful_left: hyp.faithful_left.clone(),
        faithful_right_last: hyp.faithful_right_last,
        two_torsion_free: hyp.two_torsion_free,
        all_hold: hyp.all_hold(),
    }
}

#[derive(Serialize)]
pub struct ValidationJson {
    pub exhaustive: bool,
    pub tuples_checked: u64,
}

pub fn validation_json(spec: &TriMatSpec) -> ValidationJson {
    let v = spec.validation();
    ValidationJson {
        exhaustive: !v.sampled,
        tuples_checked: v.tuples_checked,
    }
}

/// One solved space: cardinality as a decimal string (it can exceed any
/// machine integer), the combination modulus of each generator, and the
/// generators as image matrices.
#[derive(Serialize)]
pub struct SpaceJson {
    pub kind: &'static str,
    pub cardinality: String,
    pub generator_moduli: Vec<u64>,
    pub generators: Vec<Vec<Vec<u64>>>,
}

pub fn space_json(kind: DerivKind, space: &SolutionSpace<AddMap>) -> SpaceJson {
    SpaceJson {
        kind: kind.label(),
        cardinality: space.cardinality.to_string(),
        generator_moduli: space.moduli.clone(),
        generators: space.generators.iter().map(render_map).collect(),
    }
}

/// A space summary that records a refusal instead of failing the whole
/// report when one kind exceeds a cap.
#[derive(Serialize)]
#[serde(untagged)]
pub enum SpaceOutcome {
    Solved(SpaceJson),
    Refused { kind: &'static str, refusal: String },
}

pub fn solve_all_kinds(spec: &TriMatSpec, caps: &Caps) -> Result<Vec<SpaceOutcome>, DerivError> {
    let mut out = Vec::new();
    for kind in DerivKind::ALL {
        match solve_space(spec, kind, caps) {
            Ok(space) => out.push(SpaceOutcome::Solved(space_json(kind, &space))),
            Err(e @ (DerivError::ElementCap { .. } | DerivError::OracleCap { .. })) => {
                out.push(SpaceOutcome::Refused {
                    kind: kind.label(),
                    refusal: e.to_string(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct CompareJson {
    pub derivation_cardinality: String,
    pub jordan_linearized_cardinality: String,
    pub derivation_subset_jordan: bool,
    pub equal: bool,
    pub jordan_only_generators: Vec<Vec<Vec<u64>>>,
    pub scan_witnesses: Vec<Vec<Vec<u64>>>,
}

pub fn compare_json(spec: &TriMatSpec, caps: &Caps) -> Result<CompareJson, DerivError> {
    let cmp = compare_spaces(spec, caps)?;
    let witnesses = counterexample_scan(spec, caps)?;
    Ok(CompareJson {
        derivation_cardinality: cmp.derivation.cardinality.to_string(),
        jordan_linearized_cardinality: cmp.jordan.cardinality.to_string(),
        derivation_subset_jordan: cmp.derivation_subset_jordan,
        equal: cmp.equal,
        jordan_only_generators: cmp.jordan_only_generators.iter().map(render_map).collect(),
        scan_witnesses: witnesses.iter().map(render_map).collect(),
    })
}

#[derive(Serialize)]
pub struct LemmaJson {
    pub id: &'static str,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub fn lemma_json(entry: &LemmaEntry) -> LemmaJson {
    LemmaJson {
        id: entry.id,
        status: entry.status.label(),
        detail: entry.detail.clone(),
    }
}

#[derive(Serialize)]
pub struct MapLemmasJson {
    pub map: String,
    pub entries: Vec<LemmaJson>,
}

/// Runs the gated suite over every generator of the linearized Jordan
/// space.
pub fn lemmas_json(spec: &TriMatSpec, caps: &Caps) -> Result<Vec<MapLemmasJson>, DerivError> {
    let hyp = check_hypotheses(spec);
    let space = solve_space(spec, DerivKind::JordanLinearized, caps)?;
    Ok(space
        .generators
        .iter()
        .enumerate()
        .map(|(idx, gen)| MapLemmasJson {
            map: format!("jordan_generator_{idx}"),
            entries: lemma_suite(spec, gen, &hyp, caps)
                .iter()
                .map(lemma_json)
                .collect(),
        })
        .collect())
}

/// The full bundled report.
#[derive(Serialize)]
pub struct Report {
    pub digest: String,
    pub seed: u64,
    pub element_cap: u64,
    pub oracle_cap: u64,
    pub timing: &'static str,
    pub basis: BasisJson,
    pub validation: ValidationJson,
    pub hypotheses: HypothesesJson,
    pub spaces: Vec<SpaceOutcome>,
    pub compare: CompareJson,
    pub lemmas: Vec<MapLemmasJson>,
}

pub fn build_report(spec: &TriMatSpec, caps: &Caps, digest: &str) -> Result<Report, DerivError> {
    Ok(Report {
        digest: digest.to_string(),
        seed: caps.seed,
        element_cap: caps.element_cap,
        oracle_cap: caps.oracle_cap,
        timing: TIMING_POLICY,
        basis: basis_json(spec),
        validation: validation_json(spec),
        hypotheses: hypotheses_json(&check_hypotheses(spec)),
        spaces: solve_all_kinds(spec, caps)?,
        compare: compare_json(spec, caps)?,
        lemmas: lemmas_json(spec, caps)?,
    })
}

/// Canonical byte rendering of any fragment: pretty JSON plus a trailing
/// newline.
pub fn to_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}
