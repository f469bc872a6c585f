//! Three-state secondary structure assignment from backbone geometry.
//!
//! Hydrogen bonds use the Kabsch-Sander electrostatic energy with amide
//! hydrogens reconstructed 1.0 Å from N along the direction opposite the
//! preceding residue's C=O. Helix (H) requires two consecutive i→i+4 turns,
//! strand (E) comes from parallel/antiparallel bridge patterns, everything
//! else (including residues with missing backbone atoms) is coil (C).

use nalgebra::Vector3;

use crate::structcore::ProteinModel;

/// 0.084 e² · 332 kcal·Å/mol, the Kabsch-Sander prefactor.
const HBOND_FACTOR: f64 = 27.888;
/// Bonds need E below this (kcal/mol).
const HBOND_ENERGY_CUTOFF: f64 = -0.5;
/// Peptide-bond C—N distance beyond which residues are treated as a chain break.
const PEPTIDE_BOND_CUTOFF: f64 = 2.5;
const AMIDE_H_BOND_LENGTH: f64 = 1.0;

struct Backbone {
    n: Option<Vector3<f64>>,
    ca: Option<Vector3<f64>>,
    c: Option<Vector3<f64>>,
    o: Option<Vector3<f64>>,
    is_proline: bool,
    chain: char,
}

pub fn assign_secondary_structure(model: &ProteinModel) -> String {
    let n_res = model.residues.len();
    let backbones: Vec<Backbone> = model
        .residues
        .iter()
        .map(|r| Backbone {
            n: r.atom("N").map(|a| a.pos),
            ca: r.atom("CA").map(|a| a.pos),
            c: r.atom("C").map(|a| a.pos),
            o: r.atom("O").map(|a| a.pos),
            is_proline: r.name == "PRO",
            chain: r.chain,
        })
        .collect();

    // Amide hydrogen positions; the first residue of a chain (or after a
    // break) has no reconstructable H and cannot donate.
    let mut h_pos: Vec<Option<Vector3<f64>>> = vec![None; n_res];
    for i in 1..n_res {
        if backbones[i].is_proline {
            continue;
        }
        let (Some(n), Some(c_prev), Some(o_prev)) =
            (backbones[i].n, backbones[i - 1].c, backbones[i - 1].o)
        else {
            continue;
        };
        if backbones[i].chain != backbones[i - 1].chain
            || (c_prev - n).norm() > PEPTIDE_BOND_CUTOFF
        {
            continue;
        }
        let dir = c_prev - o_prev;
        if dir.norm() < 1e-9 {
            continue;
        }
        h_pos[i] = Some(n + dir.normalize() * AMIDE_H_BOND_LENGTH);
    }

    // hbond[acceptor][donor]: CO(acceptor) ··· HN(donor).
    let mut hbond = vec![vec![false; n_res]; n_res];
    for donor in 0..n_res {
        let (Some(h), Some(n)) = (h_pos[donor], backbones[donor].n) else {
            continue;
        };
        for acceptor in 0..n_res {
            if acceptor.abs_diff(donor) < 2 {
                continue;
            }
            let (Some(c), Some(o)) = (backbones[acceptor].c, backbones[acceptor].o) else {
                continue;
            };
            let r_on = (o - n).norm();
            let r_ch = (c - h).norm();
            let r_oh = (o - h).norm();
            let r_cn = (c - n).norm();
            if r_on < 0.5 || r_ch < 0.5 || r_oh < 0.5 || r_cn < 0.5 {
                continue;
            }
            let energy = HBOND_FACTOR * (1.0 / r_on + 1.0 / r_ch - 1.0 / r_oh - 1.0 / r_cn);
            if energy < HBOND_ENERGY_CUTOFF {
                hbond[acceptor][donor] = true;
            }
        }
    }

    let mut assignment = vec!['C'; n_res];

    // Helix: two consecutive four-turns (CO(i)···HN(i+4)).
    let turn4 = |i: usize| i + 4 < n_res && hbond[i][i + 4];
    for i in 1..n_res {
        if i + 4 < n_res && turn4(i - 1) && turn4(i) {
            for item in assignment.iter_mut().skip(i).take(4) {
                *item = 'H';
            }
        }
    }

    // Bridges on residues not already helical.
    let hb = |acc: isize, don: isize| -> bool {
        acc >= 0
            && don >= 0
            && (acc as usize) < n_res
            && (don as usize) < n_res
            && hbond[acc as usize][don as usize]
    };
    for i in 0..n_res {
        if assignment[i] == 'H' {
            continue;
        }
        for j in (i + 3)..n_res {
            if assignment[j] == 'H' {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            let parallel =
                (hb(ii - 1, jj) && hb(jj, ii + 1)) || (hb(jj - 1, ii) && hb(ii, jj + 1));
            let antiparallel =
                (hb(ii, jj) && hb(jj, ii)) || (hb(ii - 1, jj + 1) && hb(jj - 1, ii + 1));
            if parallel || antiparallel {
                assignment[i] = 'E';
                assignment[j] = 'E';
            }
        }
    }

    assignment.into_iter().collect()
}
