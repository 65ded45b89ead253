//! Shipped instance gallery.
//!
//! Every preset is a TOML file under `presets/` at the repository root,
//! embedded into the binary at compile time so `preset:NAME` works from
//! any directory. A test keeps the embedded copies in sync with the
//! files on disk.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

macro_rules! preset {
    ($name:literal, $summary:literal) => {
        Preset {
            name: $name,
            summary: $summary,
            text: include_str!(concat!(
                env!("CARGO_MANIFEST_DIR"),
                "/../../presets/",
                $name,
                ".toml"
            )),
        }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!(
        "ut2_f2",
        "2x2 upper triangular over Z/2; smallest instance, 2-torsion"
    ),
    preset!(
        "ut2_f3",
        "2x2 upper triangular over Z/3; smallest odd instance"
    ),
    preset!("ut2_z4", "2x2 upper triangular over Z/4; composite modulus"),
    preset!("ut3_f2", "3x3 upper triangular over Z/2; 2-torsion"),
    preset!(
        "ut3_f3",
        "3x3 upper triangular over Z/3; all hypotheses hold"
    ),
    preset!(
        "ut3_f5",
        "3x3 upper triangular over Z/5; larger odd instance"
    ),
    preset!(
        "ut3_z6",
        "3x3 upper triangular over Z/6; composite, 2-torsion"
    ),
    preset!(
        "ut4_f2",
        "4x4 upper triangular over Z/2; deep ranges, 2-torsion"
    ),
    preset!("ut4_f3", "4x4 upper triangular over Z/3; deep ranges, odd"),
    preset!(
        "nonfaithful_m0",
        "two copies of Z/3 with the zero bimodule; no faithfulness"
    ),
    preset!(
        "mixed_mod",
        "Z/6 diagonals acting on Z/3 blocks by reduction; unfaithful, 2-torsion"
    ),
    preset!(
        "noncomm_t2",
        "noncommutative table-ring diagonal acting on a column space"
    ),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Resolves a file argument: `preset:NAME` loads an embedded preset,
/// anything else is a path on disk. Returns the document text and a
/// display name.
pub fn resolve_source(arg: &str) -> Result<(String, String), String> {
    if let Some(name) = arg.strip_prefix("preset:") {
        let preset = find(name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            format!("unknown preset {name:?}; available: {}", names.join(", "))
        })?;
        Ok((preset.text.to_string(), format!("preset:{name}")))
    } else {
        let text = std::fs::read_to_string(arg).map_err(|e| format!("cannot read {arg:?}: {e}"))?;
        Ok((text, arg.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_has_the_required_names() {
        for required in [
            "ut2_f2",
            "ut2_f3",
            "ut3_f2",
            "ut3_f3",
            "ut3_f5",
            "ut2_z4",
            "ut3_z6",
            "nonfaithful_m0",
            "mixed_mod",
        ] {
            assert!(find(required).is_some(), "missing preset {required}");
        }
        assert!(PRESETS.len() >= 9);
    }

    #[test]
    fn embedded_presets_match_the_files_on_disk() {
        let root = concat!(env!("CARGO_MANIFEST_DIR"), "/../../presets");
        for p in PRESETS {
            let path = format!("{root}/{}.toml", p.name);
            let disk = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("cannot read {path}: {e}"));
            assert_eq!(disk, p.text, "embedded copy of {} is stale", p.name);
        }
    }
}
