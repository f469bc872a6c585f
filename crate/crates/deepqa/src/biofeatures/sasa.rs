//! Solvent-accessible surface area by probe-sphere sampling on a
//! deterministic golden-spiral lattice (no randomness).

use nalgebra::{Matrix3, SymmetricEigen, Vector3};

use super::tables::vdw_radius;
use super::FeatureError;
use crate::structcore::ProteinModel;

pub const DEFAULT_PROBE_RADIUS: f64 = 1.4;
pub const DEFAULT_SPHERE_POINTS: usize = 960;

#[derive(Debug, Clone)]
pub struct SasaResult {
    /// Per-atom areas, nested to mirror `model.residues[i].atoms[j]` (Å²).
    pub per_atom: Vec<Vec<f64>>,
    /// Per-residue sums (Å²).
    pub per_residue: Vec<f64>,
    /// Whole-model total (Å²).
    pub total: f64,
}

/// Golden-spiral unit directions; deterministic for a given count.
fn sphere_lattice(n_points: usize) -> Vec<Vector3<f64>> {
    let golden_ratio = (1.0 + 5f64.sqrt()) / 2.0;
    let angle_increment = 2.0 * std::f64::consts::PI * golden_ratio;
    (0..n_points)
        .map(|i| {
            let t = (i as f64 + 0.5) / n_points as f64;
            let inclination = (1.0 - 2.0 * t).acos();
            let azimuth = angle_increment * i as f64;
            Vector3::new(
                inclination.sin() * azimuth.cos(),
                inclination.sin() * azimuth.sin(),
                inclination.cos(),
            )
        })
        .collect()
}

/// Shrake-Rupley over explicit spheres. The lattice is fixed in space, so
/// removing a sphere can only expose points on the others, never hide them.
pub fn sasa_of_spheres(
    centers: &[Vector3<f64>],
    radii: &[f64],
    probe_radius: f64,
    n_points: usize,
) -> Vec<f64> {
    assert_eq!(centers.len(), radii.len(), "one radius per center");
    let dirs = sphere_lattice(n_points);
    let n = centers.len();
    let mut areas = Vec::with_capacity(n);
    for i in 0..n {
        let extended = radii[i] + probe_radius;
        let neighbors: Vec<usize> = (0..n)
            .filter(|&j| {
                j != i && (centers[j] - centers[i]).norm() < extended + radii[j] + probe_radius
            })
            .collect();
        let mut accessible = 0usize;
        'point: for dir in &dirs {
            let point = centers[i] + dir * extended;
            for &j in &neighbors {
                if (point - centers[j]).norm() < radii[j] + probe_radius {
                    continue 'point;
                }
            }
            accessible += 1;
        }
        let full = 4.0 * std::f64::consts::PI * extended * extended;
        areas.push(full * accessible as f64 / n_points as f64);
    }
    areas
}

/// Rotates a coordinate cloud into its principal-axes frame with a
/// deterministic sign convention, so areas do not depend on the input pose.
fn canonical_coordinates(points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let n = points.len() as f64;
    let centroid: Vector3<f64> = points.iter().sum::<Vector3<f64>>() / n;
    let centered: Vec<Vector3<f64>> = points.iter().map(|p| p - centroid).collect();

    let mut cov = Matrix3::<f64>::zeros();
    for p in &centered {
        cov += p * p.transpose();
    }
    cov /= n;

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = vec![0, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let mut axes: Vec<Vector3<f64>> = order
        .iter()
        .map(|&k| Vector3::new(
            eig.eigenvectors[(0, k)],
            eig.eigenvectors[(1, k)],
            eig.eigenvectors[(2, k)],
        ))
        .collect();

    // Fix the sign of the first two axes by the third moment of the
    // projections (falling back to the largest projection), then complete a
    // right-handed frame.
    for axis in axes.iter_mut().take(2) {
        let mut skew = 0.0;
        let mut max_abs = 0.0f64;
        let mut max_signed = 0.0f64;
        for p in &centered {
            let proj = p.dot(axis);
            skew += proj * proj * proj;
            if proj.abs() > max_abs {
                max_abs = proj.abs();
                max_signed = proj;
            }
        }
        let sign = if skew.abs() > 1e-9 { skew } else { max_signed };
        if sign < 0.0 {
            *axis = -*axis;
        }
    }
    let third = axes[0].cross(&axes[1]);
    axes[2] = third;

    centered
        .iter()
        .map(|p| Vector3::new(p.dot(&axes[0]), p.dot(&axes[1]), p.dot(&axes[2])))
        .collect()
}

/// Per-atom and per-residue SASA of a model. Hydrogens were already dropped
/// at parse time; radii come from the element table.
pub fn compute_sasa(
    model: &ProteinModel,
    probe_radius: f64,
    n_points: usize,
) -> Result<SasaResult, FeatureError> {
    let mut centers = Vec::new();
    let mut radii = Vec::new();
    let mut owner: Vec<(usize, usize)> = Vec::new();
    for (ri, res) in model.residues.iter().enumerate() {
        for (ai, atom) in res.atoms.iter().enumerate() {
            centers.push(atom.pos);
            radii.push(vdw_radius(&atom.element));
            owner.push((ri, ai));
        }
    }
    if centers.is_empty() {
        return Err(FeatureError::EmptyModel);
    }

    let canonical = canonical_coordinates(&centers);
    let flat = sasa_of_spheres(&canonical, &radii, probe_radius, n_points);

    let mut per_atom: Vec<Vec<f64>> = model
        .residues
        .iter()
        .map(|r| vec![0.0; r.atoms.len()])
        .collect();
    let mut per_residue = vec![0.0; model.residues.len()];
    let mut total = 0.0;
    for (area, &(ri, ai)) in flat.iter().zip(owner.iter()) {
        per_atom[ri][ai] = *area;
        per_residue[ri] += *area;
        total += *area;
    }
    Ok(SasaResult {
        per_atom,
        per_residue,
        total,
    })
}
