//! Positivity-domain scans, invariant-line detection and CSV export.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{
    apply, choi_from_superop, kraus_axes, kraus_from_choi, InvariantSet, QubitMap,
};
use crate::error::{Error, Result};
use crate::matops::CMat4;
use crate::states::{bloch_to_state, is_physical, sample_ball, BlochVector, PHYSICAL_TOL};

pub const CSV_HEADER: &str = "a1,a2,a3,lambda_min,in_domain";

/// Points checked along a candidate invariant line.
const LINE_CHECKS: usize = 16;
const LINE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ScanMode {
    /// Regular lattice with `resolution` points per axis over `[-1, 1]^3`,
    /// keeping only points inside the ball.
    Grid {
        resolution: usize,
    },
    MonteCarlo {
        n: usize,
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainPoint {
    pub bloch: BlochVector,
    /// Smallest output eigenvalue; `-inf` where the map diverges.
    pub lambda_min: f64,
    pub in_domain: bool,
    pub divergent: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DomainSummary {
    pub n: usize,
    pub in_domain: usize,
    pub divergent: usize,
    pub fraction: f64,
    /// Largest Bloch radius among in-domain points (0 when none).
    pub max_radius: f64,
    /// Per-axis `[min, max]` of in-domain points, absent when none.
    pub extent: Option<[[f64; 2]; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainReport {
    pub descriptor: String,
    pub scan: ScanMode,
    pub points: Vec<DomainPoint>,
    pub summary: DomainSummary,
}

pub fn grid_points(resolution: usize) -> Vec<BlochVector> {
    let span = (resolution - 1) as f64;
    // integer numerators keep the lattice exactly symmetric under a -> -a
    let coord = |i: usize| (2.0 * i as f64 - span) / span;
    let mut pts = Vec::new();
    for i in 0..resolution {
        for j in 0..resolution {
            for k in 0..resolution {
                let p = BlochVector::new(coord(i), coord(j), coord(k));
                if p.in_ball() {
                    pts.push(p);
                }
            }
        }
    }
    pts
}

pub fn evaluate_point(map: &QubitMap, p: BlochVector) -> DomainPoint {
    match apply(map, p) {
        Ok(out) => {
            let lambda_min = is_physical(&out).min_eigenvalue;
            DomainPoint {
                bloch: p,
                lambda_min,
                in_domain: lambda_min >= PHYSICAL_TOL,
                divergent: false,
            }
        }
        Err(_) => DomainPoint {
            bloch: p,
            lambda_min: f64::NEG_INFINITY,
            in_domain: false,
            divergent: true,
        },
    }
}

/// Evaluate the map on ball points chosen by `mode`.
pub fn scan_domain(map: &QubitMap, descriptor: &str, mode: ScanMode) -> Result<DomainReport> {
    let inputs = match mode {
        ScanMode::Grid { resolution } if resolution < 8 => {
            return Err(Error::InvalidParameter(format!(
                "grid resolution must be at least 8, got {resolution}"
            )))
        }
        ScanMode::MonteCarlo { n: 0, .. } => {
            return Err(Error::InvalidParameter(
                "Monte Carlo scan needs at least one sample".into(),
            ))
        }
        ScanMode::Grid { resolution } => grid_points(resolution),
        ScanMode::MonteCarlo { n, seed } => sample_ball(seed, n),
    };
    let points: Vec<DomainPoint> = inputs.par_iter().map(|p| evaluate_point(map, *p)).collect();
    let summary = summarize(&points);
    Ok(DomainReport {
        descriptor: descriptor.to_string(),
        scan: mode,
        points,
        summary,
    })
}

pub fn summarize(points: &[DomainPoint]) -> DomainSummary {
    let inside: Vec<&DomainPoint> = points.iter().filter(|p| p.in_domain).collect();
    let extent = (!inside.is_empty()).then(|| {
        let mut ext = [[f64::INFINITY, f64::NEG_INFINITY]; 3];
        for p in &inside {
            for (axis, v) in p.bloch.to_array().into_iter().enumerate() {
                ext[axis][0] = ext[axis][0].min(v);
                ext[axis][1] = ext[axis][1].max(v);
            }
        }
        ext
    });
    DomainSummary {
        n: points.len(),
        in_domain: inside.len(),
        divergent: points.iter().filter(|p| p.divergent).count(),
        fraction: if points.is_empty() {
            0.0
        } else {
            inside.len() as f64 / points.len() as f64
        },
        max_radius: inside.iter().map(|p| p.bloch.norm()).fold(0.0, f64::max),
        extent,
    }
}

/// Invariant lines of a map.
///
/// The identity map returns the `WholeBall` sentinel. Singular maps return
/// their invariant set. Otherwise every Kraus operator proportional to a
/// non-trivial unitary proposes the diameter through its eigenstates, kept
/// only if 16 points along it are fixed to 1e-10.
pub fn detect_fixed_lines(map: &QubitMap) -> Vec<InvariantSet> {
    let superop = match map {
        QubitMap::Singular(s) => return vec![s.invariant_set],
        QubitMap::Regular(s) => s,
    };
    if superop.a.max_diff(&CMat4::identity()) <= LINE_TOL {
        return vec![InvariantSet::WholeBall];
    }
    let Ok(kraus) = choi_from_superop(superop).and_then(|c| kraus_from_choi(&c)) else {
        return Vec::new();
    };
    kraus_axes(&kraus)
        .into_iter()
        .map(|direction| InvariantSet::Segment { direction })
        .filter(|line| {
            line.sample_points(LINE_CHECKS).iter().all(|p| {
                apply(map, *p)
                    .is_ok_and(|out| out.rho.max_diff(&bloch_to_state(*p).rho) <= LINE_TOL)
            })
        })
        .collect()
}

pub fn write_domain_csv(report: &DomainReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for p in &report.points {
        writeln!(
            out,
            "{},{},{}",
            p.bloch.csv_row(),
            p.lambda_min,
            u8::from(p.in_domain)
        )?;
    }
    Ok(())
}

/// Write the report as CSV rows `a1,a2,a3,lambda_min,in_domain` under a header.
pub fn export_domain(report: &DomainReport, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_domain_csv(report, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Parse a CSV written by [`export_domain`].
pub fn read_domain_csv(path: &Path) -> Result<Vec<DomainPoint>> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(h)) if h == CSV_HEADER => {}
        Some(Err(e)) => return Err(io_err(e)),
        _ => {
            return Err(Error::Parse(format!(
                "{}: missing CSV header",
                path.display()
            )))
        }
    }
    let mut points = Vec::new();
    for (row, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        let bad = || {
            Error::Parse(format!(
                "{}: malformed row {}: {line}",
                path.display(),
                row + 2
            ))
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let lambda_min = num(fields[3])?;
        points.push(DomainPoint {
            bloch: BlochVector::new(num(fields[0])?, num(fields[1])?, num(fields[2])?),
            lambda_min,
            in_domain: match fields[4] {
                "1" => true,
                "0" => false,
                _ => return Err(bad()),
            },
            divergent: lambda_min == f64::NEG_INFINITY,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{superop_from_choi, SuperOp};
    use crate::families::{
        bncp_example, cnot_intermediate_map, dephasing_intermediate, DephasingModel,
    };
    use std::f64::consts::PI;

    fn bncp_map() -> QubitMap {
        superop_from_choi(&bncp_example()).into()
    }

    #[test]
    fn identity_fills_the_ball() {
        let id: QubitMap = SuperOp::identity().into();
        for mode in [
            ScanMode::Grid { resolution: 12 },
            ScanMode::MonteCarlo { n: 2000, seed: 1 },
        ] {
            assert_eq!(
                scan_domain(&id, "identity", mode).unwrap().summary.fraction,
                1.0
            );
        }
    }

    #[test]
    fn ncp_example_domain() {
        let r = scan_domain(
            &bncp_map(),
            "bncp",
            ScanMode::MonteCarlo { n: 20_000, seed: 0 },
        )
        .unwrap();
        assert!(r.summary.fraction > 0.0 && r.summary.fraction < 1.0);
        let inside = evaluate_point(&bncp_map(), BlochVector::new(0.05, 0.1, 0.5));
        assert!(inside.in_domain);
        let outside = evaluate_point(&bncp_map(), BlochVector::new(1.0, 0.0, 0.0));
        assert!(!outside.in_domain);
        // radicand 4.2 at (1,0,0): 0.5 - 0.47 sqrt(4.2) < 0
        assert!(outside.lambda_min < -0.4);
    }

    #[test]
    fn singular_cnot_has_no_sampled_domain() {
        let map = cnot_intermediate_map(PI / 4.0);
        let r = scan_domain(&map, "cnot", ScanMode::MonteCarlo { n: 5000, seed: 0 }).unwrap();
        assert_eq!(r.summary.fraction, 0.0);
        assert_eq!(r.summary.divergent, 5000);
        let lines = detect_fixed_lines(&map);
        assert_eq!(
            lines,
            vec![InvariantSet::Segment {
                direction: BlochVector::new(1.0, 0.0, 0.0)
            }]
        );
        assert!(lines[0]
            .sample_points(16)
            .iter()
            .all(|p| evaluate_point(&map, *p).in_domain));
    }

    #[test]
    fn fixed_lines_of_families() {
        let regular = cnot_intermediate_map(PI / 7.0);
        assert_eq!(
            detect_fixed_lines(&regular),
            vec![InvariantSet::Segment {
                direction: BlochVector::new(1.0, 0.0, 0.0)
            }]
        );
        let m = DephasingModel::new(0.8).unwrap();
        let singular = dephasing_intermediate(&m, m.alpha_minus, 0.45).unwrap();
        assert_eq!(
            detect_fixed_lines(&singular),
            vec![InvariantSet::Segment {
                direction: BlochVector::new(0.0, 0.0, 1.0)
            }]
        );
        assert_eq!(
            detect_fixed_lines(&SuperOp::identity().into()),
            vec![InvariantSet::WholeBall]
        );
        assert!(detect_fixed_lines(&bncp_map()).is_empty());
    }

    #[test]
    fn monotone_refinement() {
        let small =
            scan_domain(&bncp_map(), "", ScanMode::MonteCarlo { n: 3000, seed: 4 }).unwrap();
        let large =
            scan_domain(&bncp_map(), "", ScanMode::MonteCarlo { n: 9000, seed: 4 }).unwrap();
        assert_eq!(small.points[..], large.points[..3000]);
    }

    #[test]
    fn resolution_guard() {
        assert!(scan_domain(&bncp_map(), "", ScanMode::Grid { resolution: 7 }).is_err());
        assert!(scan_domain(&bncp_map(), "", ScanMode::MonteCarlo { n: 0, seed: 0 }).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let report = scan_domain(&bncp_map(), "bncp", ScanMode::Grid { resolution: 16 }).unwrap();
        let dir = std::env::temp_dir().join(format!("ncpmap-domain-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bncp.csv");
        export_domain(&report, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), report.points.len() + 1);
        assert_eq!(read_domain_csv(&path).unwrap(), report.points);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn export_reports_path_on_failure() {
        let report = scan_domain(&bncp_map(), "bncp", ScanMode::Grid { resolution: 8 }).unwrap();
        let path = Path::new("/nonexistent-dir/for/sure/out.csv");
        let err = export_domain(&report, path).unwrap_err();
        assert!(err
            .to_string()
            .contains("/nonexistent-dir/for/sure/out.csv"));
    }
}
