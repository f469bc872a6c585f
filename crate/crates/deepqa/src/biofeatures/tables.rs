//! Shipped lookup tables: van der Waals radii, per-residue maximum SASA and
//! residue masses. The SASA and mass tables live in `data/` and can be
//! overridden by files of the same name in `$DEEPQA_DATA_DIR`.

use std::collections::HashMap;
use std::path::Path;
use std::sync::LazyLock;

const MAX_SASA_BUILTIN: &str = include_str!("../../data/max_sasa.tsv");
const RESIDUE_MASS_BUILTIN: &str = include_str!("../../data/residue_mass.tsv");

/// Fallbacks for unknown one-letter codes ('X' residues).
pub const DEFAULT_MAX_SASA: f64 = 200.0;
pub const DEFAULT_RESIDUE_MASS: f64 = 110.0;

static MAX_SASA: LazyLock<HashMap<char, f64>> =
    LazyLock::new(|| load_table("max_sasa.tsv", MAX_SASA_BUILTIN));
static RESIDUE_MASS: LazyLock<HashMap<char, f64>> =
    LazyLock::new(|| load_table("residue_mass.tsv", RESIDUE_MASS_BUILTIN));

fn load_table(file_name: &str, builtin: &str) -> HashMap<char, f64> {
    if let Ok(dir) = std::env::var("DEEPQA_DATA_DIR") {
        let path = Path::new(&dir).join(file_name);
        if path.exists() {
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("cannot read data table {}: {e}", path.display()));
            return parse_table(&text, file_name);
        }
    }
    parse_table(builtin, file_name)
}

fn parse_table(text: &str, name: &str) -> HashMap<char, f64> {
    let mut table = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split('\t');
        let key = parts
            .next()
            .and_then(|s| s.chars().next())
            .unwrap_or_else(|| panic!("data table {name}: bad key on line {}", idx + 1));
        let value: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .unwrap_or_else(|| panic!("data table {name}: bad value on line {}", idx + 1));
        table.insert(key, value);
    }
    table
}

/// Van der Waals radius by element symbol (Å); unknown elements default to
/// the carbon radius.
pub fn vdw_radius(element: &str) -> f64 {
    match element {
        "C" => 1.7,
        "N" => 1.55,
        "O" => 1.52,
        "S" => 1.8,
        _ => 1.7,
    }
}

pub fn max_sasa(one_letter: char) -> Option<f64> {
    MAX_SASA.get(&one_letter).copied()
}

pub fn residue_mass(one_letter: char) -> Option<f64> {
    RESIDUE_MASS.get(&one_letter).copied()
}
