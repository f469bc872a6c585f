//! Protein structure parsing and superposition metrics.
//!
//! [`parse_pdb`] reads fixed-width PDB ATOM records into a [`ProteinModel`];
//! [`kabsch_superpose`] computes the RMSD-optimal rigid transform;
//! [`tm_score`] and [`gdt_ts`] score a model against its native structure
//! with a fragment-seeded superposition search.

mod compare;
mod geometry;
mod pdb;

pub use compare::{
    align, d0, gdt_ts, global_kabsch_fractions, tm_score, AlignmentResult, GDT_THRESHOLDS,
};
pub use geometry::{ca_distance_matrix, kabsch_superpose, Superposition};
pub use pdb::{parse_pdb, parse_pdb_with_report, ParseReport};

use nalgebra::Vector3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StructError {
    #[error("no parsable residues")]
    NoParsableResidues,
    #[error("line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
    #[error("degenerate chain: need at least {needed} residues, got {got}")]
    DegenerateChain { needed: usize, got: usize },
    #[error("coordinate lists differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("superposition needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite coordinate in input")]
    NonFiniteCoordinate,
    #[error("no common residues between model and native (need 3, found {found})")]
    NoCommonResidues { found: usize },
    #[error("singular value decomposition failed to converge")]
    SuperpositionFailed,
}

/// Identifies a residue across model and native: (chain, sequence number,
/// insertion code).
pub type ResidueKey = (char, i32, Option<char>);

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub name: String,
    pub element: String,
    pub pos: Vector3<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residue {
    /// Three-letter amino-acid code as it appeared in the file.
    pub name: String,
    pub chain: char,
    pub seqnum: i32,
    pub icode: Option<char>,
    pub atoms: Vec<Atom>,
}

impl Residue {
    pub fn key(&self) -> ResidueKey {
        (self.chain, self.seqnum, self.icode)
    }

    pub fn atom(&self, name: &str) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.name == name)
    }

    /// The alpha-carbon atom. Present on every residue retained by the parser.
    pub fn ca(&self) -> Option<&Atom> {
        self.atom("CA")
    }

    pub fn one_letter(&self) -> char {
        one_letter_code(&self.name)
    }
}

/// A parsed protein model: ordered residues, each with a finite Cα position.
#[derive(Debug, Clone, PartialEq)]
pub struct ProteinModel {
    pub model_id: String,
    pub target_id: String,
    pub residues: Vec<Residue>,
    /// One-letter sequence derived from the residues, same length.
    pub sequence: String,
}

impl ProteinModel {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Cα coordinates in residue order.
    pub fn ca_coords(&self) -> Vec<Vector3<f64>> {
        self.residues
            .iter()
            .map(|r| r.ca().expect("residue without CA").pos)
            .collect()
    }
}

/// Maps a three-letter residue name to its one-letter code, `X` if unknown.
pub fn one_letter_code(three: &str) -> char {
    match three {
        "ALA" => 'A',
        "ARG" => 'R',
        "ASN" => 'N',
        "ASP" => 'D',
        "CYS" => 'C',
        "GLN" => 'Q',
        "GLU" => 'E',
        "GLY" => 'G',
        "HIS" => 'H',
        "ILE" => 'I',
        "LEU" => 'L',
        "LYS" => 'K',
        "MET" | "MSE" => 'M',
        "PHE" => 'F',
        "PRO" => 'P',
        "SER" => 'S',
        "THR" => 'T',
        "TRP" => 'W',
        "TYR" => 'Y',
        "VAL" => 'V',
        _ => 'X',
    }
}
