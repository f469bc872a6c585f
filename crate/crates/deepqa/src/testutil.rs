//! Shared helpers for unit tests: synthetic chain models, backbone builders
//! and small formatting utilities.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::structcore::{Atom, ProteinModel, Residue};

const TEST_RESIDUE_CYCLE: [&str; 8] = ["ALA", "GLY", "LEU", "SER", "VAL", "LYS", "ASP", "PHE"];

pub fn rotation_xyz(rx: f64, ry: f64, rz: f64) -> Matrix3<f64> {
    let (sx, cx) = rx.sin_cos();
    let (sy, cy) = ry.sin_cos();
    let (sz, cz) = rz.sin_cos();
    let mx = Matrix3::new(1.0, 0.0, 0.0, 0.0, cx, -sx, 0.0, sx, cx);
    let my = Matrix3::new(cy, 0.0, sy, 0.0, 1.0, 0.0, -sy, 0.0, cy);
    let mz = Matrix3::new(cz, -sz, 0.0, sz, cz, 0.0, 0.0, 0.0, 1.0);
    mz * my * mx
}

fn ca_residue(index: usize, pos: Vector3<f64>) -> Residue {
    Residue {
        name: TEST_RESIDUE_CYCLE[index % TEST_RESIDUE_CYCLE.len()].to_string(),
        chain: 'A',
        seqnum: index as i32 + 1,
        icode: None,
        atoms: vec![Atom {
            name: "CA".to_string(),
            element: "C".to_string(),
            pos,
        }],
    }
}

fn finish_model(target_id: &str, model_id: &str, residues: Vec<Residue>) -> ProteinModel {
    let sequence: String = residues.iter().map(|r| r.one_letter()).collect();
    ProteinModel {
        model_id: model_id.to_string(),
        target_id: target_id.to_string(),
        residues,
        sequence,
    }
}

/// Cα-only model from explicit coordinates.
pub fn ca_chain_model(target_id: &str, model_id: &str, coords: &[[f64; 3]]) -> ProteinModel {
    let residues = coords
        .iter()
        .enumerate()
        .map(|(i, c)| ca_residue(i, Vector3::new(c[0], c[1], c[2])))
        .collect();
    finish_model(target_id, model_id, residues)
}

/// Cα-only random walk with ~3.8 Å steps, deterministic per seed.
pub fn random_chain_model(target_id: &str, model_id: &str, n: usize, seed: u64) -> ProteinModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos = Vector3::new(0.0, 0.0, 0.0);
    let mut dir = Vector3::new(1.0, 0.0, 0.0);
    let mut residues = Vec::with_capacity(n);
    for i in 0..n {
        residues.push(ca_residue(i, pos));
        let kick = Vector3::new(
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
            rng.random_range(-0.6..0.6),
        );
        dir = (dir + kick).normalize();
        pos += dir * 3.8;
    }
    finish_model(target_id, model_id, residues)
}

/// Places atom `d` such that |c−d| = `bond`, the b-c-d bond angle is `theta`
/// and the a-b-c-d dihedral is `chi` (radians).
pub fn place_atom(
    a: Vector3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
    bond: f64,
    theta: f64,
    chi: f64,
) -> Vector3<f64> {
    let u = (c - b).normalize();
    let n = (b - a).cross(&u).normalize();
    let w = n.cross(&u);
    let dir = -theta.cos() * u + theta.sin() * (chi.cos() * w - chi.sin() * n);
    c + bond * dir
}

/// Signed dihedral angle p1-p2-p3-p4 in radians.
pub fn dihedral(
    p1: Vector3<f64>,
    p2: Vector3<f64>,
    p3: Vector3<f64>,
    p4: Vector3<f64>,
) -> f64 {
    let b1 = p2 - p1;
    let b2 = p3 - p2;
    let b3 = p4 - p3;
    let n1 = b1.cross(&b2);
    let n2 = b2.cross(&b3);
    let m1 = n1.cross(&b2.normalize());
    (m1.dot(&n2)).atan2(n1.dot(&n2))
}

/// Full-backbone (N, CA, C, O) poly-alanine chain built from φ/ψ dihedrals
/// with ideal bond geometry and ω = 180°.
pub fn backbone_chain_model(
    target_id: &str,
    model_id: &str,
    phi_psi: &[(f64, f64)],
) -> ProteinModel {
    let n_res = phi_psi.len();
    assert!(n_res >= 2, "need at least two residues");

    let deg = std::f64::consts::PI / 180.0;
    let bond_n_ca = 1.458;
    let bond_ca_c = 1.525;
    let bond_c_n = 1.329;
    let bond_c_o = 1.231;
    let angle_n_ca_c = 111.2 * deg;
    let angle_ca_c_n = 116.2 * deg;
    let angle_c_n_ca = 121.7 * deg;
    let angle_ca_c_o = 120.8 * deg;
    let omega = 180.0 * deg;

    let mut n_pos = vec![Vector3::zeros(); n_res];
    let mut ca_pos = vec![Vector3::zeros(); n_res];
    let mut c_pos = vec![Vector3::zeros(); n_res];
    let mut o_pos = vec![Vector3::zeros(); n_res];

    n_pos[0] = Vector3::new(0.0, 0.0, 0.0);
    ca_pos[0] = Vector3::new(bond_n_ca, 0.0, 0.0);
    let open = std::f64::consts::PI - angle_n_ca_c;
    c_pos[0] = ca_pos[0] + bond_ca_c * Vector3::new(open.cos(), open.sin(), 0.0);

    for i in 1..n_res {
        let psi_prev = phi_psi[i - 1].1;
        n_pos[i] = place_atom(
            n_pos[i - 1],
            ca_pos[i - 1],
            c_pos[i - 1],
            bond_c_n,
            angle_ca_c_n,
            psi_prev,
        );
        ca_pos[i] = place_atom(
            ca_pos[i - 1],
            c_pos[i - 1],
            n_pos[i],
            bond_n_ca,
            angle_c_n_ca,
            omega,
        );
        c_pos[i] = place_atom(
            c_pos[i - 1],
            n_pos[i],
            ca_pos[i],
            bond_ca_c,
            angle_n_ca_c,
            phi_psi[i].0,
        );
        // Carbonyl oxygen of the previous residue, anti to this N.
        o_pos[i - 1] = place_atom(
            n_pos[i - 1],
            ca_pos[i - 1],
            c_pos[i - 1],
            bond_c_o,
            angle_ca_c_o,
            psi_prev - omega,
        );
    }
    let last = n_res - 1;
    o_pos[last] = place_atom(
        n_pos[last],
        ca_pos[last],
        c_pos[last],
        bond_c_o,
        angle_ca_c_o,
        phi_psi[last].1 - omega,
    );

    let residues = (0..n_res)
        .map(|i| Residue {
            name: "ALA".to_string(),
            chain: 'A',
            seqnum: i as i32 + 1,
            icode: None,
            atoms: vec![
                Atom {
                    name: "N".into(),
                    element: "N".into(),
                    pos: n_pos[i],
                },
                Atom {
                    name: "CA".into(),
                    element: "C".into(),
                    pos: ca_pos[i],
                },
                Atom {
                    name: "C".into(),
                    element: "C".into(),
                    pos: c_pos[i],
                },
                Atom {
                    name: "O".into(),
                    element: "O".into(),
                    pos: o_pos[i],
                },
            ],
        })
        .collect();
    finish_model(target_id, model_id, residues)
}

/// Ideal α-helix fixture (φ = −57°, ψ = −47°).
pub fn helix_model(target_id: &str, model_id: &str, n: usize) -> ProteinModel {
    let deg = std::f64::consts::PI / 180.0;
    let angles = vec![(-57.0 * deg, -47.0 * deg); n];
    backbone_chain_model(target_id, model_id, &angles)
}

/// Fully extended chain (φ = ψ = 180°); isolated, so no hydrogen bonds form.
pub fn extended_model(target_id: &str, model_id: &str, n: usize) -> ProteinModel {
    let deg = std::f64::consts::PI / 180.0;
    let angles = vec![(180.0 * deg, 180.0 * deg); n];
    backbone_chain_model(target_id, model_id, &angles)
}

/// Minimal fixed-width PDB rendering of a model, for parser and pipeline tests.
pub fn to_pdb_text(model: &ProteinModel) -> String {
    let mut out = String::new();
    let mut serial = 0usize;
    for res in &model.residues {
        for atom in &res.atoms {
            serial += 1;
            let name = if atom.name.len() < 4 {
                format!(" {:<3}", atom.name)
            } else {
                atom.name.clone()
            };
            out.push_str(&format!(
                "ATOM  {serial:>5} {name}{altloc}{res_name:<3} {chain}{seq:>4}{icode}   {x:>8.3}{y:>8.3}{z:>8.3}  1.00  0.00          {element:>2}\n",
                altloc = ' ',
                res_name = res.name,
                chain = res.chain,
                seq = res.seqnum,
                icode = res.icode.unwrap_or(' '),
                x = atom.pos.x,
                y = atom.pos.y,
                z = atom.pos.z,
                element = atom.element,
            ));
        }
    }
    out.push_str("END\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn place_atom_reproduces_requested_dihedral() {
        let a = Vector3::new(0.0, 1.0, 0.0);
        let b = Vector3::new(0.0, 0.0, 0.0);
        let c = Vector3::new(1.5, 0.0, 0.0);
        for chi_deg in [-120.0, -57.0, 0.0, 60.0, 147.0] {
            let chi = chi_deg * std::f64::consts::PI / 180.0;
            let theta = 109.5 * std::f64::consts::PI / 180.0;
            let d = place_atom(a, b, c, 1.4, theta, chi);
            let measured = dihedral(a, b, c, d);
            assert!(
                (measured - chi).abs() < 1e-9,
                "requested {chi_deg}, measured {}",
                measured.to_degrees()
            );
            let bond = (d - c).norm();
            assert!((bond - 1.4).abs() < 1e-9);
        }
    }

    #[test]
    fn backbone_builder_reproduces_phi_psi() {
        let model = helix_model("t", "m", 6);
        let deg = 180.0 / std::f64::consts::PI;
        for i in 1..5 {
            let prev_c = model.residues[i - 1].atom("C").unwrap().pos;
            let n = model.residues[i].atom("N").unwrap().pos;
            let ca = model.residues[i].atom("CA").unwrap().pos;
            let c = model.residues[i].atom("C").unwrap().pos;
            let next_n = model.residues[i + 1].atom("N").unwrap().pos;
            let phi = dihedral(prev_c, n, ca, c) * deg;
            let psi = dihedral(n, ca, c, next_n) * deg;
            assert!((phi + 57.0).abs() < 1e-6, "phi {phi}");
            assert!((psi + 47.0).abs() < 1e-6, "psi {psi}");
        }
    }

    #[test]
    fn pdb_round_trip_preserves_chain() {
        let model = random_chain_model("t", "m", 12, 4);
        let text = to_pdb_text(&model);
        let parsed = crate::structcore::parse_pdb(&text).unwrap();
        assert_eq!(parsed.residues.len(), 12);
        assert_eq!(parsed.sequence, model.sequence);
        for (a, b) in parsed.residues.iter().zip(model.residues.iter()) {
            let pa = a.ca().unwrap().pos;
            let pb = b.ca().unwrap().pos;
            assert!((pa - pb).norm() < 1e-3);
        }
    }
}
