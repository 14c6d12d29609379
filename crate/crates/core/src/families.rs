//! Parametrized map families: the numeric NCP example, the double-CNOT
//! intermediate map and its controlled-Q generalization, non-Markovian
//! dephasing, and (rotated) Pauli maps.

use serde::Serialize;

use crate::channels::{ChoiMatrix, InvariantSet, QubitMap, SingularMap, SuperOp};
use crate::error::{Error, Result};
use crate::matops::{c, inverse4, kron, pauli, r, CMat, CMat2, CMat4};
use crate::states::{BlochVector, QubitState};

/// `|cos 2 theta|` below which the double-CNOT intermediate map is singular.
pub const CNOT_SINGULAR_TOL: f64 = 1e-8;
/// `|q - alpha_minus|` below which dephasing quantities are singular.
pub const DEPHASING_SINGULAR_TOL: f64 = 1e-12;
/// `|det A|` below which a controlled-Q first map counts as singular.
pub const LOCUS_DET_TOL: f64 = 1e-8;

const X_AXIS: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
const Z_AXIS: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

/// Unital, trace-preserving NCP dynamical matrix with one eigenvalue above 2.
pub fn bncp_example() -> ChoiMatrix {
    ChoiMatrix::new(CMat4::from_real([
        [0.20, 0.95, 0.70, 0.10],
        [0.95, 0.80, 0.30, -0.70],
        [0.70, 0.30, 0.80, -0.95],
        [0.10, -0.70, -0.95, 0.20],
    ]))
    .expect("constant matrix is symmetric")
}

/// Double-CNOT setup: the control starts in `cos(theta)|0> + sin(theta)|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CnotIntermediate {
    pub theta: f64,
    pub singular: bool,
}

impl CnotIntermediate {
    pub fn new(theta: f64) -> Self {
        CnotIntermediate {
            theta,
            singular: (2.0 * theta).cos().abs() < CNOT_SINGULAR_TOL,
        }
    }

    pub fn map(&self) -> QubitMap {
        cnot_intermediate_map(self.theta)
    }
}

/// Reduced map of the target after one CNOT: a bit flip with probability `sin^2 theta`.
pub fn cnot_first_map(theta: f64) -> SuperOp {
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    SuperOp::new(CMat4::from_real([
        [c2, 0.0, 0.0, s2],
        [0.0, c2, s2, 0.0],
        [0.0, s2, c2, 0.0],
        [s2, 0.0, 0.0, c2],
    ]))
}

/// Map between the two CNOTs, the inverse of [`cnot_first_map`]:
/// `(cos^2 theta - sin^2 theta X.X) / cos 2 theta` with `X.X` the bit-flip superoperator.
///
/// At `|cos 2 theta| < 1e-8` the inverse does not exist and the result is a
/// [`SingularMap`] defined only on the sigma_x fixed-point line (the a1 axis).
pub fn cnot_intermediate_map(theta: f64) -> QubitMap {
    let singular = || {
        QubitMap::Singular(SingularMap {
            invariant_set: InvariantSet::Segment { direction: X_AXIS },
            description: format!("double-CNOT intermediate map at theta = {theta}"),
        })
    };
    if CnotIntermediate::new(theta).singular {
        return singular();
    }
    let cos2 = (2.0 * theta).cos();
    let (a, b) = (theta.cos().powi(2) / cos2, -theta.sin().powi(2) / cos2);
    QubitMap::Regular(SuperOp::new(CMat4::from_real([
        [a, 0.0, 0.0, b],
        [0.0, a, b, 0.0],
        [0.0, b, a, 0.0],
        [b, 0.0, 0.0, a],
    ])))
}

/// `p |+><+| + (1 - p) |-><-|`, the sigma_x fixed points (Bloch vector `(2p-1, 0, 0)`).
pub fn fixed_point_line(p: f64) -> Result<QubitState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            name: "p",
            value: p,
            min: 0.0,
            max: 1.0,
        });
    }
    let off = r(0.5 * (2.0 * p - 1.0));
    Ok(QubitState::new(CMat([[r(0.5), off], [off, r(0.5)]])))
}

/// Non-Markovian dephasing with non-Markovianity parameter `nu` in `(0, 1]`.
///
/// `alpha_pm = (nu + 1 +- sqrt(nu^2 + 1)) / (2 nu)` are the roots of
/// `1 - 2 beta(q)`, where `beta(q) = [1 + nu (1 - q)] q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DephasingModel {
    pub nu: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
}

impl DephasingModel {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::OutOfRange {
                name: "nu",
                value: nu,
                min: 0.0,
                max: 1.0,
            });
        }
        let root = nu.hypot(1.0);
        Ok(DephasingModel {
            nu,
            alpha_minus: (nu + 1.0 - root) / (2.0 * nu),
            alpha_plus: (nu + 1.0 + root) / (2.0 * nu),
        })
    }

    pub fn is_singular_at(&self, q: f64) -> bool {
        (q - self.alpha_minus).abs() < DEPHASING_SINGULAR_TOL
    }
}

fn check_q(q: f64) -> Result<()> {
    if (0.0..=1.0).contains(&q) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "q",
            value: q,
            min: 0.0,
            max: 1.0,
        })
    }
}

/// Decoherence rate `lambda(q) = (mean(alpha) - q) / ((q - alpha_+)(q - alpha_-))`.
pub fn dephasing_rate(model: &DephasingModel, q: f64) -> Result<f64> {
    check_q(q)?;
    if model.is_singular_at(q) {
        return Err(Error::RateSingularity {
            q,
            alpha_minus: model.alpha_minus,
        });
    }
    let mean = 0.5 * (model.alpha_minus + model.alpha_plus);
    Ok((mean - q) / ((q - model.alpha_plus) * (q - model.alpha_minus)))
}

/// Weight of the sigma_z Kraus term, `beta = [1 + nu (1 - q)] q`. Negative
/// values make the full map itself NCP.
pub fn dephasing_beta(model: &DephasingModel, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok((1.0 + model.nu * (1.0 - q)) * q)
}

/// Coherence multiplier `1 - 2 beta(q)`.
pub fn dephasing_multiplier(model: &DephasingModel, q: f64) -> Result<f64> {
    Ok(1.0 - 2.0 * dephasing_beta(model, q)?)
}

fn coherence_scaling(m: f64) -> SuperOp {
    SuperOp::new(CMat4::from_real([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, m, 0.0, 0.0],
        [0.0, 0.0, m, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]))
}

/// `rho -> (1 - beta) rho + beta sigma_z rho sigma_z`.
pub fn dephasing_map(model: &DephasingModel, q: f64) -> Result<SuperOp> {
    Ok(coherence_scaling(dephasing_multiplier(model, q)?))
}

/// Signed Kraus pair `sqrt|1 - beta| 1` and `sqrt|beta| sigma_z`.
pub fn dephasing_kraus(model: &DephasingModel, q: f64) -> Result<crate::channels::SignedKrausSet> {
    use crate::channels::{SignedKraus, SignedKrausSet};
    let beta = dephasing_beta(model, q)?;
    let term = |w: f64, op: CMat2| SignedKraus {
        op: op.scale_real(w.abs().sqrt()),
        sign: if w < 0.0 { -1 } else { 1 },
    };
    Ok(SignedKrausSet {
        terms: vec![term(1.0 - beta, pauli(0)), term(beta, pauli(3))],
    })
}

/// Intermediate map `Lambda(q2) Lambda(q1)^-1` for `0 <= q1 <= q2 <= 1`.
///
/// At `q1 = alpha_minus` every state has been fully dephased, so the result is a
/// [`SingularMap`] defined on the diagonal states (the a3 axis).
pub fn dephasing_intermediate(model: &DephasingModel, q1: f64, q2: f64) -> Result<QubitMap> {
    check_q(q1)?;
    check_q(q2)?;
    if q1 > q2 {
        return Err(Error::InvalidParameter(format!(
            "intermediate map needs q1 <= q2, got q1 = {q1}, q2 = {q2}"
        )));
    }
    if model.is_singular_at(q1) {
        return Ok(QubitMap::Singular(SingularMap {
            invariant_set: InvariantSet::Segment { direction: Z_AXIS },
            description: format!(
                "dephasing intermediate map from q1 = alpha_minus = {} (nu = {})",
                model.alpha_minus, model.nu
            ),
        }));
    }
    let ratio = dephasing_multiplier(model, q2)? / dephasing_multiplier(model, q1)?;
    Ok(QubitMap::Regular(coherence_scaling(ratio)))
}

/// Controlled-Q with `Q(theta, phi, xi) = Rz(phi) Ry(theta) Rz(xi)` and the
/// control prepared in `cos(control_angle)|0> + sin(control_angle)|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ControlledUnitaryFamily {
    pub theta: f64,
    pub phi: f64,
    pub xi: f64,
    pub control_angle: f64,
}

pub fn rz(angle: f64) -> CMat2 {
    let h = 0.5 * angle;
    CMat([
        [c(h.cos(), -h.sin()), r(0.0)],
        [r(0.0), c(h.cos(), h.sin())],
    ])
}

pub fn ry(angle: f64) -> CMat2 {
    let (s, co) = (0.5 * angle).sin_cos();
    CMat2::from_real([[co, -s], [s, co]])
}

impl ControlledUnitaryFamily {
    pub fn q_unitary(&self) -> CMat2 {
        rz(self.phi) * ry(self.theta) * rz(self.xi)
    }

    pub fn lex_key(&self) -> [f64; 4] {
        [self.theta, self.phi, self.xi, self.control_angle]
    }
}

/// Reduced target map after one controlled-Q:
/// `rho -> cos^2(angle) rho + sin^2(angle) Q rho Q^dagger`.
pub fn controlled_q_first_map(fam: &ControlledUnitaryFamily) -> SuperOp {
    let q = fam.q_unitary();
    let (c2, s2) = (
        fam.control_angle.cos().powi(2),
        fam.control_angle.sin().powi(2),
    );
    SuperOp::new(CMat4::identity().scale_real(c2) + kron(&q, &q.conj()).scale_real(s2))
}

/// Map between two controlled-Q applications, the inverse of the first map.
/// When that inverse does not exist the states commuting with `Q` remain fixed.
pub fn controlled_q_intermediate(fam: &ControlledUnitaryFamily) -> QubitMap {
    match inverse4(&controlled_q_first_map(fam).a) {
        Ok(a) => QubitMap::Regular(SuperOp::new(a)),
        Err(_) => QubitMap::Singular(SingularMap {
            invariant_set: match crate::channels::unitary_axis(&fam.q_unitary()) {
                Some(direction) => InvariantSet::Segment { direction },
                None => InvariantSet::WholeBall,
            },
            description: format!("controlled-Q intermediate map at {fam:?}"),
        }),
    }
}

/// Cartesian parameter grid for controlled-Q scans.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ControlledQGrid {
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub xis: Vec<f64>,
    pub control_angles: Vec<f64>,
}

impl ControlledQGrid {
    pub fn points(&self) -> impl Iterator<Item = ControlledUnitaryFamily> + '_ {
        self.thetas.iter().flat_map(move |&theta| {
            self.phis.iter().flat_map(move |&phi| {
                self.xis.iter().flat_map(move |&xi| {
                    self.control_angles
                        .iter()
                        .map(move |&control_angle| ControlledUnitaryFamily {
                            theta,
                            phi,
                            xi,
                            control_angle,
                        })
                })
            })
        })
    }
}

/// Grid points whose first map has `|det| < 1e-8`, in lexicographic order of
/// `(theta, phi, xi, control_angle)`.
pub fn controlled_q_singular_locus(grid: &ControlledQGrid) -> Vec<ControlledUnitaryFamily> {
    let mut locus: Vec<_> = grid
        .points()
        .filter(|f| controlled_q_first_map(f).det().norm() < LOCUS_DET_TOL)
        .collect();
    locus.sort_by(|a, b| {
        a.lex_key()
            .iter()
            .zip(b.lex_key().iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    locus
}

/// Unital Pauli map by its Bloch-axis contraction factors `diag(eta1, eta2, eta3)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliPoint {
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl PauliPoint {
    pub const fn new(eta1: f64, eta2: f64, eta3: f64) -> Self {
        PauliPoint { eta1, eta2, eta3 }
    }

    pub fn in_cube(&self) -> bool {
        [self.eta1, self.eta2, self.eta3]
            .iter()
            .all(|e| e.abs() <= 1.0)
    }

    /// Weights of `1, X, Y, Z` in the operator sum; all nonnegative iff CP.
    pub fn weights(&self) -> [f64; 4] {
        let PauliPoint { eta1, eta2, eta3 } = *self;
        [
            0.25 * (1.0 + eta1 + eta2 + eta3),
            0.25 * (1.0 + eta1 - eta2 - eta3),
            0.25 * (1.0 - eta1 + eta2 - eta3),
            0.25 * (1.0 - eta1 - eta2 + eta3),
        ]
    }

    fn check(&self) -> Result<()> {
        if self.in_cube() {
            Ok(())
        } else {
            Err(Error::OutOfCube(self.eta1, self.eta2, self.eta3))
        }
    }
}

pub fn pauli_choi(point: &PauliPoint) -> Result<ChoiMatrix> {
    point.check()?;
    let paulis = [pauli(0), pauli(1), pauli(2), pauli(3)];
    Ok(ChoiMatrix::from_weighted_kraus(
        point.weights().into_iter().zip(paulis.iter()),
    ))
}

/// Pauli map with each Pauli replaced by `U sigma_i U^dagger`.
pub fn rotated_pauli_choi(point: &PauliPoint, u: &CMat2) -> Result<ChoiMatrix> {
    point.check()?;
    check_unitary(u)?;
    let rotated: Vec<CMat2> = (0..4).map(|i| *u * pauli(i) * u.dagger()).collect();
    Ok(ChoiMatrix::from_weighted_kraus(
        point.weights().into_iter().zip(rotated.iter()),
    ))
}

pub fn check_unitary(u: &CMat2) -> Result<()> {
    let deviation = u.unitarity_deviation();
    if deviation > 1e-10 {
        Err(Error::NotUnitary { deviation })
    } else {
        Ok(())
    }
}
