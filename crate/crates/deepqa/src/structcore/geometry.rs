//! Pairwise distances and optimal rigid superposition.

use nalgebra::{Matrix3, Vector3};
use ndarray::Array2;

use super::{ProteinModel, StructError};

/// Symmetric Cα–Cα distance matrix in Ångström.
pub fn ca_distance_matrix(model: &ProteinModel) -> Result<Array2<f64>, StructError> {
    let n = model.residues.len();
    if n < 2 {
        return Err(StructError::DegenerateChain { needed: 2, got: n });
    }
    let cas = model.ca_coords();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (cas[i] - cas[j]).norm();
            d[[i, j]] = dist;
            d[[j, i]] = dist;
        }
    }
    Ok(d)
}

/// A rigid transform `x ↦ R·x + t` together with the RMSD it achieves.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub rmsd: f64,
}

impl Superposition {
    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }
}

/// Kabsch superposition: the proper rotation + translation minimizing the
/// RMSD of `mobile` onto `reference`. Reflections are excluded by flipping
/// the singular direction with the smallest singular value.
pub fn kabsch_superpose(
    mobile: &[Vector3<f64>],
    reference: &[Vector3<f64>],
) -> Result<Superposition, StructError> {
    if mobile.len() != reference.len() {
        return Err(StructError::LengthMismatch {
            left: mobile.len(),
            right: reference.len(),
        });
    }
    if mobile.len() < 3 {
        return Err(StructError::TooFewPoints(mobile.len()));
    }
    if mobile
        .iter()
        .chain(reference.iter())
        .any(|p| !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()))
    {
        return Err(StructError::NonFiniteCoordinate);
    }

    let n = mobile.len() as f64;
    let cm: Vector3<f64> = mobile.iter().sum::<Vector3<f64>>() / n;
    let cr: Vector3<f64> = reference.iter().sum::<Vector3<f64>>() / n;

    let mut h = Matrix3::<f64>::zeros();
    for (m, r) in mobile.iter().zip(reference.iter()) {
        h += (m - cm) * (r - cr).transpose();
    }

    let svd = h
        .try_svd(true, true, 1e-15, 300)
        .ok_or(StructError::SuperpositionFailed)?;
    let u = svd.u.ok_or(StructError::SuperpositionFailed)?;
    let v = svd.v_t.ok_or(StructError::SuperpositionFailed)?.transpose();

    let mut flip = Matrix3::<f64>::identity();
    if (v * u.transpose()).determinant() < 0.0 {
        let sv = &svd.singular_values;
        let mut smallest = 0;
        for k in 1..3 {
            if sv[k] < sv[smallest] {
                smallest = k;
            }
        }
        flip[(smallest, smallest)] = -1.0;
    }
    let rotation = v * flip * u.transpose();
    let translation = cr - rotation * cm;

    let sum_sq: f64 = mobile
        .iter()
        .zip(reference.iter())
        .map(|(m, r)| (rotation * m + translation - r).norm_squared())
        .sum();
    let rmsd = (sum_sq / n).sqrt();

    Ok(Superposition {
        rotation,
        translation,
        rmsd,
    })
}
