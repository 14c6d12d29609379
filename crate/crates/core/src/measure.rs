//! Monte Carlo volume measures over Pauli families and eigenvalue-divergence
//! scans of intermediate maps.
//!
//! Sampling follows the block-stream contract in [`crate::rng`], so every
//! estimate is a pure function of `(n, seed)` whatever the worker count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::channels::{choi_from_superop, classify, ChoiMatrix, Classification, QubitMap, CP_TOL};
use crate::error::{Error, Result};
use crate::families::{
    check_unitary, cnot_intermediate_map, controlled_q_intermediate, pauli_choi,
    rotated_pauli_choi, ControlledUnitaryFamily, PauliPoint,
};
use crate::matops::{c, eig_hermitian, CMat2};
use crate::rng;

pub const MIN_MEASURE_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub family: String,
    pub n: usize,
    pub seed: u64,
    pub cp_count: usize,
    pub cp_fraction: f64,
    pub ncp_fraction: f64,
    /// `ncp_fraction / cp_fraction`.
    pub ratio: f64,
    /// Binomial standard error of `cp_fraction`.
    pub stderr: f64,
    /// First-order propagated error of `ratio`.
    pub ratio_stderr: f64,
}

impl MeasureEstimate {
    fn from_counts(family: &str, n: usize, seed: u64, cp_count: usize) -> Self {
        let p = cp_count as f64 / n as f64;
        let stderr = (p * (1.0 - p) / n as f64).sqrt();
        MeasureEstimate {
            family: family.to_string(),
            n,
            seed,
            cp_count,
            cp_fraction: p,
            ncp_fraction: 1.0 - p,
            ratio: (1.0 - p) / p,
            stderr,
            ratio_stderr: stderr / (p * p),
        }
    }
}

/// Uniform draw from the positive-map cube `[-1, 1]^3`.
pub fn sample_pauli_point(rng: &mut ChaCha8Rng) -> PauliPoint {
    PauliPoint::new(
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
        rng.gen_range(-1.0..=1.0),
    )
}

/// The points an estimate with `(seed, n)` classifies, in order.
pub fn pauli_sample_points(seed: u64, n: usize) -> Vec<PauliPoint> {
    rng::draw(seed, n, sample_pauli_point)
}

#[derive(Default)]
struct Counts {
    cp: usize,
    failed: usize,
}

fn count_cp(
    n: usize,
    seed: u64,
    workers: usize,
    choi: impl Fn(&PauliPoint) -> Result<ChoiMatrix> + Sync,
) -> Result<usize> {
    if n < MIN_MEASURE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "measure estimates need n >= {MIN_MEASURE_SAMPLES}, got {n}"
        )));
    }
    let counts = rng::par_fold_blocks(
        seed,
        n,
        workers,
        |r| {
            choi(&sample_pauli_point(r))
                .and_then(|b| classify(&b))
                .map(|v| v.classification)
        },
        |acc: &mut Counts, verdict| match verdict {
            Ok(Classification::Cp) => acc.cp += 1,
            Ok(Classification::Ncp) => {}
            Err(_) => acc.failed += 1,
        },
        |a, b| Counts {
            cp: a.cp + b.cp,
            failed: a.failed + b.failed,
        },
        Counts::default,
    );
    if counts.failed > 0 {
        return Err(Error::NoConvergence {
            sweeps: crate::matops::JACOBI_MAX_SWEEPS,
        });
    }
    Ok(counts.cp)
}

/// CP fraction of unital Pauli maps drawn uniformly from the positive cube.
pub fn estimate_pauli_measure(n: usize, seed: u64, workers: usize) -> Result<MeasureEstimate> {
    let cp = count_cp(n, seed, workers, pauli_choi)?;
    Ok(MeasureEstimate::from_counts("pauli", n, seed, cp))
}

/// Same as [`estimate_pauli_measure`] with every Pauli conjugated by `u`.
pub fn estimate_rotated_measure(
    u: &CMat2,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<MeasureEstimate> {
    check_unitary(u)?;
    let cp = count_cp(n, seed, workers, |p| rotated_pauli_choi(p, u))?;
    Ok(MeasureEstimate::from_counts("rotated", n, seed, cp))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DivergenceFamily {
    /// Double-CNOT intermediate map; the grid holds control angles.
    Cnot,
    /// Controlled-Q intermediate map for a fixed `Q(theta, phi, xi)`; the grid holds control angles.
    ControlledQ {
        theta: f64,
        phi: f64,
        xi: f64,
    },
    Identity,
}

impl DivergenceFamily {
    pub fn intermediate(&self, angle: f64) -> QubitMap {
        match *self {
            DivergenceFamily::Cnot => cnot_intermediate_map(angle),
            DivergenceFamily::ControlledQ { theta, phi, xi } => {
                controlled_q_intermediate(&ControlledUnitaryFamily {
                    theta,
                    phi,
                    xi,
                    control_angle: angle,
                })
            }
            DivergenceFamily::Identity => crate::channels::SuperOp::identity().into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DivergencePoint {
    pub angle: f64,
    pub max_abs_eigenvalue: f64,
    pub eigenvalue_sum: f64,
    pub exceeds_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DivergenceScan {
    pub family: DivergenceFamily,
    pub bound: f64,
    pub points: Vec<DivergencePoint>,
    pub sup: f64,
    pub exceeded: bool,
}

/// Largest Choi eigenvalue modulus of the family's intermediate map at each grid angle.
pub fn divergence_scan(
    family: DivergenceFamily,
    grid: &[f64],
    bound: f64,
) -> Result<DivergenceScan> {
    let points = grid
        .iter()
        .map(|&angle| {
            let map = family.intermediate(angle);
            let superop = map.superop().ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "grid point {angle} is an exact singularity of the family"
                ))
            })?;
            let eig = eig_hermitian(&choi_from_superop(superop)?.b)?;
            let max_abs_eigenvalue = eig.max_abs_value();
            Ok(DivergencePoint {
                angle,
                max_abs_eigenvalue,
                eigenvalue_sum: eig.values.iter().sum(),
                exceeds_bound: max_abs_eigenvalue > bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sup = points
        .iter()
        .map(|p| p.max_abs_eigenvalue)
        .fold(0.0, f64::max);
    Ok(DivergenceScan {
        family,
        bound,
        exceeded: sup > bound,
        points,
        sup,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CpBoundReport {
    pub n: usize,
    pub seed: u64,
    pub violations: usize,
    pub max_eigenvalue: f64,
    pub min_eigenvalue: f64,
}

/// A random trace-preserving CP map on a qubit: 1 to 4 Gaussian operators
/// `G_i`, normalized as `K_i = G_i S^{-1/2}` with `S = sum G_i^dagger G_i`.
pub fn random_cp_kraus(rng: &mut ChaCha8Rng) -> Vec<CMat2> {
    let count = rng.gen_range(1..=4);
    let ops: Vec<CMat2> = (0..count)
        .map(|_| CMat2::from_fn(|_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal))))
        .collect();
    let s = ops
        .iter()
        .fold(CMat2::zeros(), |acc, g| acc + g.dagger() * *g)
        .hermitian_part();
    let eig = eig_hermitian(&s).expect("Gram matrix is Hermitian");
    let inv_sqrt = eig
        .values
        .iter()
        .zip(eig.vectors.iter())
        .fold(CMat2::zeros(), |acc, (lambda, v)| {
            acc + CMat2::from_fn(|i, j| v[i] * v[j].conj() * lambda.sqrt().recip())
        });
    ops.into_iter().map(|g| g * inv_sqrt).collect()
}

/// Check that random CP maps keep every Choi eigenvalue in `[0, 2]` (with
/// `1e-9` slack on both ends).
pub fn boundedness_check_cp(n: usize, seed: u64) -> Result<CpBoundReport> {
    let choi_spectra = rng::draw(seed, n, |r| {
        let kraus = random_cp_kraus(r);
        let choi = ChoiMatrix::from_weighted_kraus(kraus.iter().map(|k| (1.0, k)));
        eig_hermitian(&choi.b).map(|e| e.values)
    });
    let mut report = CpBoundReport {
        n,
        seed,
        violations: 0,
        max_eigenvalue: f64::NEG_INFINITY,
        min_eigenvalue: f64::INFINITY,
    };
    for spectrum in choi_spectra {
        let spectrum = spectrum?;
        let (hi, lo) = (spectrum[0], spectrum[3]);
        report.max_eigenvalue = report.max_eigenvalue.max(hi);
        report.min_eigenvalue = report.min_eigenvalue.min(lo);
        if lo < CP_TOL || hi > 2.0 + 1e-9 {
            report.violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::SuperOp;
    use crate::families::{ry, rz};
    use std::f64::consts::PI;

    #[test]
    fn even_vertices_are_cp() {
        for (e1, e2, e3) in [
            (1.0, 1.0, 1.0),
            (1.0, -1.0, -1.0),
            (-1.0, 1.0, -1.0),
            (-1.0, -1.0, 1.0),
        ] {
            let v = classify(&pauli_choi(&PauliPoint::new(e1, e2, e3)).unwrap()).unwrap();
            assert_eq!(v.classification, Classification::Cp);
        }
        let odd = classify(&pauli_choi(&PauliPoint::new(-1.0, -1.0, -1.0)).unwrap()).unwrap();
        assert_eq!(odd.classification, Classification::Ncp);
    }

    #[test]
    fn small_estimate_is_near_one_third() {
        let est = estimate_pauli_measure(20_000, 0, 2).unwrap();
        assert!((est.cp_fraction - 1.0 / 3.0).abs() < 4.0 * est.stderr);
        assert_eq!(est.cp_fraction + est.ncp_fraction, 1.0);
        let expect = (est.cp_fraction * est.ncp_fraction / 20_000.0).sqrt();
        assert_eq!(est.stderr, expect);
    }

    #[test]
    fn worker_count_does_not_change_estimate() {
        let base = estimate_pauli_measure(10_000, 9, 1).unwrap();
        for w in [2, 5] {
            let e = estimate_pauli_measure(10_000, 9, w).unwrap();
            assert_eq!(e.cp_count, base.cp_count);
        }
    }

    #[test]
    fn identity_rotation_matches_plain_estimate() {
        let a = estimate_pauli_measure(5000, 3, 2).unwrap();
        let b = estimate_rotated_measure(&CMat2::identity(), 5000, 3, 2).unwrap();
        assert_eq!(a.cp_count, b.cp_count);
        assert!(
            estimate_rotated_measure(&CMat2::from_real([[1.0, 1.0], [0.0, 1.0]]), 5000, 3, 1)
                .is_err()
        );
        assert!(estimate_pauli_measure(999, 0, 1).is_err());
    }

    #[test]
    fn rotation_preserves_each_verdict() {
        let u = rz(0.4) * ry(1.1) * rz(-2.0);
        for p in pauli_sample_points(2, 500) {
            let plain = classify(&pauli_choi(&p).unwrap()).unwrap().classification;
            let rot = classify(&rotated_pauli_choi(&p, &u).unwrap())
                .unwrap()
                .classification;
            assert_eq!(plain, rot);
        }
    }

    #[test]
    fn cnot_divergence() {
        let grid: Vec<f64> = (1..=7).map(|k| PI / 4.0 - 10f64.powi(-k)).collect();
        let scan = divergence_scan(DivergenceFamily::Cnot, &grid, 1e6).unwrap();
        assert!(scan.exceeded);
        assert!(scan.points[6].exceeds_bound);
        assert!(!scan.points[5].exceeds_bound);
        assert!(scan
            .points
            .windows(2)
            .all(|w| w[0].max_abs_eigenvalue <= w[1].max_abs_eigenvalue));
        for p in &scan.points {
            assert!((p.eigenvalue_sum - 2.0).abs() < 1e-6);
        }
        let sixth = divergence_scan(DivergenceFamily::Cnot, &[PI / 6.0], 1e6).unwrap();
        assert!((sixth.sup - 3.0).abs() < 1e-12);
        assert!(divergence_scan(DivergenceFamily::Cnot, &[PI / 4.0], 1e6).is_err());
    }

    #[test]
    fn identity_divergence_is_flat() {
        let scan = divergence_scan(DivergenceFamily::Identity, &[0.1, 0.5, 1.0], 10.0).unwrap();
        assert!(scan.points.iter().all(|p| p.max_abs_eigenvalue == 2.0));
        assert!(!scan.exceeded);
    }

    #[test]
    fn controlled_q_divergence_matches_cnot() {
        let fam = DivergenceFamily::ControlledQ {
            theta: PI,
            phi: PI / 2.0,
            xi: -PI / 2.0,
        };
        let grid = [0.3, PI / 4.0 - 1e-4];
        let a = divergence_scan(fam, &grid, 1e3).unwrap();
        let b = divergence_scan(DivergenceFamily::Cnot, &grid, 1e3).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            assert!(
                (x.max_abs_eigenvalue - y.max_abs_eigenvalue).abs() < 1e-6 * y.max_abs_eigenvalue
            );
        }
    }

    #[test]
    fn random_cp_maps_are_trace_preserving() {
        let mut r = rng::block_rng(1, 0);
        for _ in 0..50 {
            let kraus = random_cp_kraus(&mut r);
            let sum = kraus
                .iter()
                .fold(CMat2::zeros(), |acc, k| acc + k.dagger() * *k);
            assert!(sum.max_diff(&CMat2::identity()) < 1e-12);
            let map = SuperOp::from_weighted_kraus(kraus.iter().map(|k| (1.0, k)));
            assert!(map.is_trace_preserving());
        }
    }

    #[test]
    fn cp_spectra_stay_bounded() {
        let report = boundedness_check_cp(2000, 0).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.max_eigenvalue <= 2.0 + 1e-9);
    }
}
