//! Fixed-width PDB v3.3 ATOM record parser.
//!
//! Only ATOM records from the first MODEL block are read. Alternate
//! locations other than blank or 'A' are dropped, hydrogens and HETATM
//! records are ignored, and residues without a Cα atom are discarded
//! (counted in the [`ParseReport`]).

use std::collections::HashMap;

use nalgebra::Vector3;

use super::{one_letter_code, Atom, ProteinModel, Residue, ResidueKey, StructError};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ParseReport {
    /// Residues dropped because no Cα atom survived filtering.
    pub residues_missing_ca: usize,
    /// Atoms skipped because their altLoc was neither blank nor 'A'.
    pub atoms_skipped_altloc: usize,
    /// Atoms skipped because their name repeated within a residue.
    pub duplicate_atoms: usize,
    /// Hydrogen / deuterium atoms skipped.
    pub hydrogens_skipped: usize,
}

pub fn parse_pdb(text: &str) -> Result<ProteinModel, StructError> {
    parse_pdb_with_report(text).map(|(model, _)| model)
}

pub fn parse_pdb_with_report(text: &str) -> Result<(ProteinModel, ParseReport), StructError> {
    let mut report = ParseReport::default();
    let mut order: Vec<ResidueKey> = Vec::new();
    let mut grouped: HashMap<ResidueKey, Residue> = HashMap::new();
    let mut models_seen = 0usize;

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.starts_with("MODEL") {
            models_seen += 1;
            if models_seen > 1 {
                break;
            }
            continue;
        }
        if line.starts_with("ENDMDL") {
            break;
        }
        if !line.starts_with("ATOM  ") {
            continue;
        }
        if !line.is_ascii() {
            return Err(StructError::MalformedRecord {
                line: lineno,
                reason: "non-ASCII characters in ATOM record".into(),
            });
        }
        if line.len() < 54 {
            return Err(StructError::MalformedRecord {
                line: lineno,
                reason: "ATOM record too short to hold coordinates".into(),
            });
        }

        let altloc = line.as_bytes()[16] as char;
        if altloc != ' ' && altloc != 'A' {
            report.atoms_skipped_altloc += 1;
            continue;
        }

        let name = line[12..16].trim().to_string();
        let res_name = line[17..20].trim().to_string();
        let chain = line.as_bytes()[21] as char;
        let seqnum: i32 = line[22..26].trim().parse().map_err(|_| {
            StructError::MalformedRecord {
                line: lineno,
                reason: "malformed residue sequence number".into(),
            }
        })?;
        let icode = match line.as_bytes()[26] as char {
            ' ' => None,
            c => Some(c),
        };

        let x = parse_coord(line, 30, 38, lineno)?;
        let y = parse_coord(line, 38, 46, lineno)?;
        let z = parse_coord(line, 46, 54, lineno)?;

        let element = element_of(line, &name);
        if element == "H" || element == "D" {
            report.hydrogens_skipped += 1;
            continue;
        }

        let key: ResidueKey = (chain, seqnum, icode);
        let residue = grouped.entry(key).or_insert_with(|| {
            order.push(key);
            Residue {
                name: res_name,
                chain,
                seqnum,
                icode,
                atoms: Vec::new(),
            }
        });
        if residue.atoms.iter().any(|a| a.name == name) {
            report.duplicate_atoms += 1;
        } else {
            residue.atoms.push(Atom {
                name,
                element,
                pos: Vector3::new(x, y, z),
            });
        }
    }

    let mut residues = Vec::with_capacity(order.len());
    for key in order {
        let residue = grouped.remove(&key).expect("grouped residue");
        if residue.ca().is_some() {
            residues.push(residue);
        } else {
            report.residues_missing_ca += 1;
        }
    }
    if residues.is_empty() {
        return Err(StructError::NoParsableResidues);
    }
    if report.residues_missing_ca > 0 {
        log::warn!(
            "dropped {} residue(s) without a CA atom",
            report.residues_missing_ca
        );
    }

    let sequence: String = residues.iter().map(|r| one_letter_code(&r.name)).collect();
    let model = ProteinModel {
        model_id: String::new(),
        target_id: String::new(),
        residues,
        sequence,
    };
    Ok((model, report))
}

fn parse_coord(line: &str, start: usize, end: usize, lineno: usize) -> Result<f64, StructError> {
    let value: f64 = line[start..end].trim().parse().map_err(|_| {
        StructError::MalformedRecord {
            line: lineno,
            reason: "malformed coordinate field".into(),
        }
    })?;
    if !value.is_finite() {
        return Err(StructError::MalformedRecord {
            line: lineno,
            reason: "non-finite coordinate field".into(),
        });
    }
    Ok(value)
}

/// Element symbol from columns 77-78, falling back to the first alphabetic
/// character of the atom name (digit-prefixed hydrogen names included).
fn element_of(line: &str, atom_name: &str) -> String {
    if line.len() >= 78 {
        let field = line[76..78].trim();
        if !field.is_empty() {
            return field.to_ascii_uppercase();
        }
    }
    atom_name
        .chars()
        .find(|c| c.is_ascii_alphabetic())
        .map(|c| c.to_ascii_uppercase().to_string())
        .unwrap_or_default()
}
