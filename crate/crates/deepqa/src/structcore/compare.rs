//! TM-score and GDT-TS via a fragment-seeded superposition search.
//!
//! Residues are matched across model and native by (chain, seqnum,
//! insertion code); unmatched native residues still count in the TM-score
//! normalization length. Seeds are the global Kabsch fit plus every
//! contiguous fragment of length 3, 5 and 7; each seed is refined by
//! re-superposing on inliers until a fixed point (at most 20 rounds).

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};

use super::{kabsch_superpose, ProteinModel, StructError, Superposition};

/// GDT-TS distance thresholds in Ångström.
pub const GDT_THRESHOLDS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

const FRAGMENT_LENGTHS: [usize; 3] = [3, 5, 7];
const MAX_REFINE_ROUNDS: usize = 20;

/// TM-score normalization length, floored at 0.5 Å for short chains.
pub fn d0(native_len: usize) -> f64 {
    if native_len > 21 {
        (1.24 * (native_len as f64 - 15.0).cbrt() - 1.8).max(0.5)
    } else {
        0.5
    }
}

/// Superposition metrics of a model against its native structure.
///
/// `rotation`/`translation`/`rmsd` describe the RMSD-optimal (Kabsch) fit of
/// the matched Cα pairs; `tm_score` and the GDT fractions are each maximized
/// independently over the seeded search.
#[derive(Debug, Clone)]
pub struct AlignmentResult {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub rmsd: f64,
    pub tm_score: f64,
    pub d0: f64,
    pub gdt_ts: f64,
    pub per_threshold_fractions: [f64; 4],
    pub matched_residues: usize,
    pub native_len: usize,
}

pub fn tm_score(model: &ProteinModel, native: &ProteinModel) -> Result<AlignmentResult, StructError> {
    align(model, native)
}

pub fn gdt_ts(model: &ProteinModel, native: &ProteinModel) -> Result<AlignmentResult, StructError> {
    align(model, native)
}

/// Computes RMSD, TM-score and GDT-TS of `model` against `native` in one pass.
pub fn align(model: &ProteinModel, native: &ProteinModel) -> Result<AlignmentResult, StructError> {
    let (mobile, reference) = matched_ca(model, native)?;
    let native_len = native.residues.len();
    let d0 = d0(native_len);

    let global = kabsch_superpose(&mobile, &reference)?;
    let seeds = seed_superpositions(&mobile, &reference, &global);

    let tm = tm_search(&mobile, &reference, &seeds, d0, native_len);
    let fractions = gdt_search(&mobile, &reference, &seeds);
    let gdt = fractions.iter().sum::<f64>() / fractions.len() as f64;

    Ok(AlignmentResult {
        rotation: global.rotation,
        translation: global.translation,
        rmsd: global.rmsd,
        tm_score: tm,
        d0,
        gdt_ts: gdt,
        per_threshold_fractions: fractions,
        matched_residues: mobile.len(),
        native_len,
    })
}

/// Cα pairs matched by residue key, in native order.
fn matched_ca(
    model: &ProteinModel,
    native: &ProteinModel,
) -> Result<(Vec<Vector3<f64>>, Vec<Vector3<f64>>), StructError> {
    let by_key: HashMap<_, _> = model.residues.iter().map(|r| (r.key(), r)).collect();
    let mut mobile = Vec::new();
    let mut reference = Vec::new();
    for nres in &native.residues {
        if let Some(mres) = by_key.get(&nres.key()) {
            mobile.push(mres.ca().expect("model residue without CA").pos);
            reference.push(nres.ca().expect("native residue without CA").pos);
        }
    }
    if mobile.len() < 3 {
        return Err(StructError::NoCommonResidues {
            found: mobile.len(),
        });
    }
    Ok((mobile, reference))
}

fn seed_superpositions(
    mobile: &[Vector3<f64>],
    reference: &[Vector3<f64>],
    global: &Superposition,
) -> Vec<Superposition> {
    let n = mobile.len();
    let mut seeds = vec![global.clone()];
    for &frag in &FRAGMENT_LENGTHS {
        if frag > n {
            break;
        }
        for start in 0..=(n - frag) {
            if let Ok(sup) =
                kabsch_superpose(&mobile[start..start + frag], &reference[start..start + frag])
            {
                seeds.push(sup);
            }
        }
    }
    seeds
}

fn distances(sup: &Superposition, mobile: &[Vector3<f64>], reference: &[Vector3<f64>]) -> Vec<f64> {
    mobile
        .iter()
        .zip(reference.iter())
        .map(|(m, r)| (sup.apply(m) - r).norm())
        .collect()
}

/// Σ 1/(1 + (dᵢ/d0)²) over matched pairs, normalized by the native length.
pub(crate) fn tm_score_sum(dists: &[f64], d0: f64, native_len: usize) -> f64 {
    let sum: f64 = dists.iter().map(|d| 1.0 / (1.0 + (d / d0).powi(2))).sum();
    sum / native_len as f64
}

fn tm_search(
    mobile: &[Vector3<f64>],
    reference: &[Vector3<f64>],
    seeds: &[Superposition],
    d0: f64,
    native_len: usize,
) -> f64 {
    let n = mobile.len();
    let mut best = 0.0f64;
    for seed in seeds {
        let mut sup = seed.clone();
        let mut prev_inliers: Vec<usize> = Vec::new();
        for round in 0..=MAX_REFINE_ROUNDS {
            let d = distances(&sup, mobile, reference);
            best = best.max(tm_score_sum(&d, d0, native_len));
            if round == MAX_REFINE_ROUNDS {
                break;
            }
            // Re-superpose on residues inside the cutoff, widening it until
            // at least three survive.
            let mut cutoff = d0.max(0.5);
            let mut inliers: Vec<usize> = (0..n).filter(|&i| d[i] < cutoff).collect();
            while inliers.len() < 3 {
                cutoff += 0.5;
                inliers = (0..n).filter(|&i| d[i] < cutoff).collect();
            }
            if inliers == prev_inliers {
                break;
            }
            let mob: Vec<_> = inliers.iter().map(|&i| mobile[i]).collect();
            let refc: Vec<_> = inliers.iter().map(|&i| reference[i]).collect();
            match kabsch_superpose(&mob, &refc) {
                Ok(next) => {
                    prev_inliers = inliers;
                    sup = next;
                }
                Err(_) => break,
            }
        }
    }
    best
}

fn gdt_search(
    mobile: &[Vector3<f64>],
    reference: &[Vector3<f64>],
    seeds: &[Superposition],
) -> [f64; 4] {
    let n = mobile.len();
    let denom = n as f64;
    let mut best = [0.0f64; 4];

    let record = |d: &[f64], best: &mut [f64; 4]| {
        for (t, &thr) in GDT_THRESHOLDS.iter().enumerate() {
            let frac = d.iter().filter(|&&x| x <= thr).count() as f64 / denom;
            if frac > best[t] {
                best[t] = frac;
            }
        }
    };

    for seed in seeds {
        for &thr in &GDT_THRESHOLDS {
            let mut sup = seed.clone();
            let mut prev_inliers: Vec<usize> = Vec::new();
            for round in 0..=MAX_REFINE_ROUNDS {
                let d = distances(&sup, mobile, reference);
                record(&d, &mut best);
                if round == MAX_REFINE_ROUNDS {
                    break;
                }
                let inliers: Vec<usize> = (0..n).filter(|&i| d[i] <= thr).collect();
                if inliers.len() < 3 || inliers == prev_inliers {
                    break;
                }
                let mob: Vec<_> = inliers.iter().map(|&i| mobile[i]).collect();
                let refc: Vec<_> = inliers.iter().map(|&i| reference[i]).collect();
                match kabsch_superpose(&mob, &refc) {
                    Ok(next) => {
                        prev_inliers = inliers;
                        sup = next;
                    }
                    Err(_) => break,
                }
            }
        }
    }
    best
}

/// Per-threshold fractions achieved by the plain global Kabsch fit alone.
/// The seeded search result dominates this lower bound.
pub fn global_kabsch_fractions(
    model: &ProteinModel,
    native: &ProteinModel,
) -> Result<[f64; 4], StructError> {
    let (mobile, reference) = matched_ca(model, native)?;
    let global = kabsch_superpose(&mobile, &reference)?;
    let d = distances(&global, &mobile, &reference);
    let denom = mobile.len() as f64;
    let mut fractions = [0.0f64; 4];
    for (t, &thr) in GDT_THRESHOLDS.iter().enumerate() {
        fractions[t] = d.iter().filter(|&&x| x <= thr).count() as f64 / denom;
    }
    Ok(fractions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{ca_chain_model, random_chain_model, rotation_xyz};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn translate(model: &ProteinModel, shift: Vector3<f64>) -> ProteinModel {
        rigid(model, Matrix3::identity(), shift)
    }

    fn rigid(model: &ProteinModel, rot: Matrix3<f64>, shift: Vector3<f64>) -> ProteinModel {
        let mut out = model.clone();
        for res in &mut out.residues {
            for atom in &mut res.atoms {
                atom.pos = rot * atom.pos + shift;
            }
        }
        out
    }

    #[test]
    fn identical_model_scores_exactly_one() {
        let native = random_chain_model("t", "native", 40, 7);
        let result = align(&native, &native).unwrap();
        assert_eq!(result.tm_score, 1.0);
        assert_eq!(result.gdt_ts, 1.0);
        assert_eq!(result.per_threshold_fractions, [1.0, 1.0, 1.0, 1.0]);
        assert!(result.rmsd <= 1e-8);
    }

    #[test]
    fn rigid_shift_scores_one() {
        let native = random_chain_model("t", "native", 30, 3);
        let shifted = translate(&native, Vector3::new(3.0, 0.0, 0.0));
        let result = gdt_ts(&shifted, &native).unwrap();
        assert_eq!(result.gdt_ts, 1.0);
        assert_eq!(result.tm_score, 1.0);
    }

    #[test]
    fn d0_formula() {
        assert!((d0(100) - 3.652).abs() < 1e-3);
        assert_eq!(d0(21), 0.5);
        assert_eq!(d0(5), 0.5);
        assert!(d0(22) > 0.5);
    }

    #[test]
    fn tm_term_at_d0_contributes_half() {
        let value = tm_score_sum(&[3.0], 3.0, 1);
        assert_relative_eq!(value, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn three_aligned_one_displaced_yields_three_quarters() {
        let native = ca_chain_model(
            "t",
            "native",
            &[
                [0.0, 0.0, 0.0],
                [3.8, 0.0, 0.0],
                [3.8, 3.8, 0.0],
                [0.0, 3.8, 0.0],
            ],
        );
        let mut model = native.clone();
        model.residues[3].atoms[0].pos += Vector3::new(0.0, 0.0, 10.0);
        let result = gdt_ts(&model, &native).unwrap();
        for (t, frac) in result.per_threshold_fractions.iter().enumerate() {
            assert!(*frac >= 0.75, "threshold {t}: fraction {frac}");
        }
        assert!(result.gdt_ts >= 0.75);
    }

    #[test]
    fn no_common_residues_is_an_error() {
        let a = random_chain_model("t", "a", 10, 1);
        let mut b = random_chain_model("t", "b", 10, 2);
        for res in &mut b.residues {
            res.seqnum += 1000;
        }
        assert!(matches!(
            align(&a, &b),
            Err(StructError::NoCommonResidues { .. })
        ));
    }

    #[test]
    fn rigid_motion_invariance() {
        let native = random_chain_model("t", "native", 25, 9);
        let mut decoy = native.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for res in &mut decoy.residues {
            for atom in &mut res.atoms {
                atom.pos += Vector3::new(
                    rng.random_range(-0.8..0.8),
                    rng.random_range(-0.8..0.8),
                    rng.random_range(-0.8..0.8),
                );
            }
        }
        let base = align(&decoy, &native).unwrap();
        let rot = rotation_xyz(0.3, -1.1, 2.0);
        let moved = rigid(&decoy, rot, Vector3::new(11.0, -4.0, 7.0));
        let result = align(&moved, &native).unwrap();
        assert!((result.tm_score - base.tm_score).abs() < 1e-9);
        assert!((result.gdt_ts - base.gdt_ts).abs() < 1e-9);
        assert!((result.rmsd - base.rmsd).abs() < 1e-9);
    }

    #[test]
    fn noise_degrades_scores_monotonically() {
        let native = random_chain_model("t", "native", 40, 21);
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let directions: Vec<Vector3<f64>> = (0..native.len())
            .map(|_| {
                Vector3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
                .normalize()
            })
            .collect();
        let mut prev_tm = f64::INFINITY;
        let mut prev_gdt = f64::INFINITY;
        for level in 0..=20 {
            let magnitude = level as f64 * 0.15;
            let mut decoy = native.clone();
            for (res, dir) in decoy.residues.iter_mut().zip(&directions) {
                for atom in &mut res.atoms {
                    atom.pos += dir * magnitude;
                }
            }
            let result = align(&decoy, &native).unwrap();
            assert!(
                result.tm_score <= prev_tm + 0.01,
                "tm rose from {prev_tm} to {} at level {level}",
                result.tm_score
            );
            assert!(
                result.gdt_ts <= prev_gdt + 0.01,
                "gdt rose from {prev_gdt} to {} at level {level}",
                result.gdt_ts
            );
            prev_tm = result.tm_score;
            prev_gdt = result.gdt_ts;
        }
    }

    #[test]
    fn heuristic_dominates_global_kabsch_fractions() {
        for seed in 0..10 {
            let native = random_chain_model("t", "native", 30, 100 + seed);
            let mut decoy = native.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Displace a contiguous block hard so the global fit is poor.
            for (i, res) in decoy.residues.iter_mut().enumerate() {
                let magnitude = if i >= 20 { 9.0 } else { 0.3 };
                for atom in &mut res.atoms {
                    atom.pos += Vector3::new(
                        rng.random_range(-magnitude..magnitude),
                        rng.random_range(-magnitude..magnitude),
                        rng.random_range(-magnitude..magnitude),
                    );
                }
            }
            let result = align(&decoy, &native).unwrap();
            let baseline = global_kabsch_fractions(&decoy, &native).unwrap();
            for t in 0..4 {
                assert!(
                    result.per_threshold_fractions[t] >= baseline[t] - 1e-12,
                    "seed {seed} threshold {t}: {} < {}",
                    result.per_threshold_fractions[t],
                    baseline[t]
                );
            }
        }
    }

    #[test]
    fn scores_stay_in_bounds() {
        for seed in 0..8 {
            let native = random_chain_model("t", "native", 20, 200 + seed);
            let mut decoy = native.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
            for res in &mut decoy.residues {
                for atom in &mut res.atoms {
                    atom.pos += Vector3::new(
                        rng.random_range(-6.0..6.0),
                        rng.random_range(-6.0..6.0),
                        rng.random_range(-6.0..6.0),
                    );
                }
            }
            let r = align(&decoy, &native).unwrap();
            assert!(r.gdt_ts >= 0.0 && r.gdt_ts <= 1.0);
            assert!(r.tm_score > 0.0 && r.tm_score <= 1.0);
            assert!(r.rmsd >= 0.0);
            let mean: f64 = r.per_threshold_fractions.iter().sum::<f64>() / 4.0;
            assert_relative_eq!(r.gdt_ts, mean, epsilon = 1e-15);
        }
    }
}
