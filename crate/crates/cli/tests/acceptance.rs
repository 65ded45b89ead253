//! Acceptance suite. Each test is one numbered criterion of the project
//! contract and prints a single `criterion N (...): PASS` line on success
//! (run with `--nocapture` to see them).
//!
//! The tests share a process-wide lock so that the wall-clock bounds in
//! criteria 1 and 2 measure one criterion at a time.

use std::collections::BTreeSet;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use trijord::derivlab::{
    check_component_leibniz, check_hypotheses, compare_spaces, inner_derivation, is_member,
    lemma_suite, solve_space, space_members, Caps, DerivKind, LemmaStatus, LEMMA_IDS,
};
use trijord::linmap::{addmap_count, enumerate_addmaps};
use trijord::TriMatSpec;
use trijord_cli::instance::{lower, CapsOverride, LoweredInstance};
use trijord_cli::presets::{find, PRESETS};
use trijord_cli::report::render_map;

static LOCK: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn lower_preset(name: &str) -> LoweredInstance {
    let preset = find(name).unwrap_or_else(|| panic!("preset {name} exists"));
    lower(preset.text, &CapsOverride::default())
        .unwrap_or_else(|e| panic!("preset {name} lowers cleanly: {e}"))
}

/// Every additive map satisfying `kind`, found by walking the full space
/// of additive maps — the independent oracle.
fn brute_force_members(spec: &TriMatSpec, caps: &Caps, kind: DerivKind) -> BTreeSet<Vec<Vec<u64>>> {
    let mut out = BTreeSet::new();
    for map in enumerate_addmaps(spec.basis(), caps.oracle_cap).expect("under the oracle cap") {
        if is_member(spec, &map, kind, caps)
            .expect("membership decides")
            .is_none()
        {
            out.insert(render_map(&map));
        }
    }
    out
}

/// Every member of the solved space, via the linear-algebra solver.
fn solved_members(spec: &TriMatSpec, caps: &Caps, kind: DerivKind) -> BTreeSet<Vec<Vec<u64>>> {
    let space = solve_space(spec, kind, caps).expect("space solves");
    space_members(spec.basis(), &space, caps.oracle_cap)
        .expect("under the oracle cap")
        .iter()
        .map(render_map)
        .collect()
}

fn assert_oracle_equivalence(name: &str, budget: Duration) {
    let lowered = lower_preset(name);
    let started = Instant::now();
    for kind in DerivKind::ALL {
        let brute = brute_force_members(&lowered.spec, &lowered.caps, kind);
        let solved = solved_members(&lowered.spec, &lowered.caps, kind);
        assert_eq!(
            brute, solved,
            "{name}/{kind}: solver disagrees with enumeration"
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{name}: all four kinds took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_1_oracle_equivalence() {
    let _guard = serial();
    assert_oracle_equivalence("ut2_f2", Duration::from_secs(10));
    assert_oracle_equivalence("ut2_f3", Duration::from_secs(10));

    // Pin the hand-computed cardinalities as a second, frozen oracle.
    let f2 = lower_preset("ut2_f2");
    let deriv = solve_space(&f2.spec, DerivKind::Derivation, &f2.caps).unwrap();
    let jordan = solve_space(&f2.spec, DerivKind::JordanLinearized, &f2.caps).unwrap();
    assert_eq!(deriv.cardinality, BigUint::from(4u32));
    assert_eq!(jordan.cardinality, BigUint::from(16u32));
    println!("criterion 1 (oracle equivalence on ut2_f2 and ut2_f3): PASS");
}

#[test]
fn criterion_2_theorem_instances() {
    let _guard = serial();
    for name in ["ut2_f3", "ut3_f3", "ut3_f5"] {
        let lowered = lower_preset(name);
        let hyp = check_hypotheses(&lowered.spec);
        assert!(hyp.all_hold(), "{name} should satisfy every hypothesis");
        let started = Instant::now();
        let cmp = compare_spaces(&lowered.spec, &lowered.caps).expect("comparison runs");
        let elapsed = started.elapsed();
        assert!(cmp.derivation_subset_jordan, "{name}: inclusion fails");
        assert!(cmp.equal, "{name}: spaces differ despite the hypotheses");
        assert!(
            cmp.jordan_only_generators.is_empty(),
            "{name}: stray witnesses"
        );
        if name == "ut3_f5" {
            let budget = Duration::from_secs(60);
            assert!(
                elapsed < budget,
                "{name}: took {elapsed:?}, budget {budget:?}"
            );
        }
    }
    println!("criterion 2 (derivation = linearized Jordan on ut2_f3, ut3_f3, ut3_f5): PASS");
}

#[test]
fn criterion_3_inclusion_invariant() {
    let _guard = serial();
    for preset in PRESETS {
        let lowered = lower_preset(preset.name);
        let deriv = solve_space(&lowered.spec, DerivKind::Derivation, &lowered.caps)
            .unwrap_or_else(|e| panic!("{}: derivation space solves: {e}", preset.name));
        for (idx, gen) in deriv.generators.iter().enumerate() {
            let violation = is_member(
                &lowered.spec,
                gen,
                DerivKind::JordanLinearized,
                &lowered.caps,
            )
            .expect("membership decides");
            assert!(
                violation.is_none(),
                "{}: derivation generator {idx} fails the linearized Jordan identity: {:?}",
                preset.name,
                violation
            );
        }
    }
    println!("criterion 3 (derivation space inside Jordan space on every preset): PASS");
}

#[test]
fn criterion_4_lemma_suite() {
    let _guard = serial();
    for name in ["ut3_f3", "ut3_f5"] {
        let lowered = lower_preset(name);
        let hyp = check_hypotheses(&lowered.spec);
        assert!(hyp.all_hold(), "{name} should satisfy every hypothesis");
        let jordan = solve_space(&lowered.spec, DerivKind::JordanLinearized, &lowered.caps)
            .expect("Jordan space solves");
        assert!(
            !jordan.generators.is_empty(),
            "{name}: Jordan space is trivial?"
        );
        for (idx, gen) in jordan.generators.iter().enumerate() {
            let entries = lemma_suite(&lowered.spec, gen, &hyp, &lowered.caps);
            assert_eq!(entries.len(), LEMMA_IDS.len());
            for entry in &entries {
                assert_eq!(
                    entry.status,
                    LemmaStatus::Pass,
                    "{name}: generator {idx} fails {}: {:?}",
                    entry.id,
                    entry.detail
                );
            }
        }
    }
    println!("criterion 4 (full identity suite passes on ut3_f3 and ut3_f5): PASS");
}

#[test]
fn criterion_5_inner_sanity() {
    let _guard = serial();
    for preset in PRESETS {
        let lowered = lower_preset(preset.name);
        let mut rng = ChaCha12Rng::seed_from_u64(lowered.caps.seed);
        for trial in 0..100 {
            let a = lowered.spec.random_element(&mut rng);
            let inner = inner_derivation(&lowered.spec, &a);
            let violation = is_member(&lowered.spec, &inner, DerivKind::Derivation, &lowered.caps)
                .expect("membership decides");
            assert!(
                violation.is_none(),
                "{}: inner map {trial} is not a derivation: {violation:?}",
                preset.name
            );
            let entry = check_component_leibniz(&lowered.spec, &inner, &lowered.caps);
            assert_eq!(
                entry.status,
                LemmaStatus::Pass,
                "{}: inner map {trial} fails the component product rule: {:?}",
                preset.name,
                entry.detail
            );
        }
    }
    println!("criterion 5 (100 inner derivations per preset pass, exactly): PASS");
}

#[test]
fn criterion_6_algebra_axioms() {
    let _guard = serial();
    for preset in PRESETS {
        let lowered = lower_preset(preset.name);
        let v = lowered.spec.validation();
        assert!(
            !v.sampled,
            "{}: validation fell back to sampling",
            preset.name
        );
        assert!(
            v.tuples_checked > 0,
            "{}: validation checked nothing",
            preset.name
        );
    }
    println!("criterion 6 (exhaustive axiom validation on every preset): PASS");
}

#[test]
fn criterion_7_composite_modulus_solver() {
    let _guard = serial();
    // Small enough to enumerate: 4^9 = 262144 additive maps.
    let z4 = lower_preset("ut2_z4");
    assert_eq!(addmap_count(z4.spec.basis()), BigUint::from(262144u32));
    for kind in DerivKind::ALL {
        let brute = brute_force_members(&z4.spec, &z4.caps, kind);
        let solved = solved_members(&z4.spec, &z4.caps, kind);
        assert_eq!(
            brute, solved,
            "ut2_z4/{kind}: solver disagrees with enumeration"
        );
    }

    // Far too many maps to enumerate; the inclusion invariant still holds.
    let z6 = lower_preset("ut3_z6");
    assert!(addmap_count(z6.spec.basis()) > BigUint::from(1_000_000u64));
    let deriv = solve_space(&z6.spec, DerivKind::Derivation, &z6.caps).unwrap();
    for gen in &deriv.generators {
        assert!(
            is_member(&z6.spec, gen, DerivKind::JordanLinearized, &z6.caps)
                .expect("membership decides")
                .is_none()
        );
    }
    println!(
        "criterion 7 (composite moduli: enumeration match on ut2_z4, inclusion on ut3_z6): PASS"
    );
}

#[test]
fn criterion_8_report_determinism() {
    let _guard = serial();
    let bin = env!("CARGO_BIN_EXE_trijord");
    let dir = tempfile::tempdir().expect("temp dir");
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    let emit = |instance: &str, threads: &str, out: &str| {
        let status = Command::new(bin)
            .args(["--threads", threads, "report", instance, "-o", &path(out)])
            .status()
            .expect("binary runs");
        assert!(status.success(), "{instance} report failed");
        std::fs::read(path(out)).expect("report file")
    };

    // Across thread counts.
    let one = emit("preset:ut3_f3", "1", "t1.json");
    let eight = emit("preset:ut3_f3", "8", "t8.json");
    assert_eq!(one, eight, "ut3_f3 report differs between 1 and 8 threads");

    // Across runs.
    let first = emit("preset:ut2_z4", "2", "a.json");
    let second = emit("preset:ut2_z4", "2", "b.json");
    assert_eq!(
        first, second,
        "ut2_z4 report differs between two identical runs"
    );
    println!("criterion 8 (byte-identical reports across runs and thread counts): PASS");
}

#[test]
fn criterion_9_exploratory_honesty() {
    let _guard = serial();
    let bin = env!("CARGO_BIN_EXE_trijord");

    // 2-torsion: the spaces genuinely differ and the tool must say so
    // with witnesses rather than assert the theorem's conclusion.
    let out = Command::new(bin)
        .args(["compare", "preset:ut2_f2"])
        .output()
        .expect("binary runs");
    assert_eq!(
        out.status.code(),
        Some(0),
        "compare must not fail on inequality"
    );
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(json["derivation_cardinality"], "4");
    assert_eq!(json["jordan_linearized_cardinality"], "16");
    assert_eq!(json["equal"], false);
    let witnesses = json["scan_witnesses"].as_array().expect("witness array");
    assert!(
        !witnesses.is_empty(),
        "ut2_f2 must produce Jordan-only witnesses"
    );

    let f2 = lower_preset("ut2_f2");
    for w in witnesses {
        let images: Vec<Vec<u64>> = w
            .as_array()
            .unwrap()
            .iter()
            .map(|row| {
                row.as_array()
                    .unwrap()
                    .iter()
                    .map(|v| v.as_u64().unwrap())
                    .collect()
            })
            .collect();
        let map = trijord::AddMap::from_images(f2.spec.basis().clone(), &images)
            .expect("witness is a well-formed additive map");
        assert!(
            is_member(&f2.spec, &map, DerivKind::JordanLinearized, &f2.caps)
                .unwrap()
                .is_none(),
            "witness is not even a Jordan map"
        );
        assert!(
            is_member(&f2.spec, &map, DerivKind::Derivation, &f2.caps)
                .unwrap()
                .is_some(),
            "witness unexpectedly is a derivation"
        );
    }

    // Zero module: both spaces collapse to the zero map, so the honest
    // answer is equal cardinalities and no witnesses.
    let out = Command::new(bin)
        .args(["compare", "preset:nonfaithful_m0"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    assert_eq!(json["hypotheses"]["all_hold"], false);
    assert_eq!(json["derivation_cardinality"], "1");
    assert_eq!(json["jordan_linearized_cardinality"], "1");
    assert_eq!(json["scan_witnesses"].as_array().unwrap().len(), 0);
    println!("criterion 9 (honest inequality reporting on ut2_f2 and nonfaithful_m0): PASS");
}
