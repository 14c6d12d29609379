//! Map representations, conversions, application to states, CP classification
//! and validity verdicts.
//!
//! Conventions: a superoperator `A` acts on row-major vectorized states,
//! `rho'[i][j] = sum A[(i,j),(k,l)] rho[k][l]`, and the dynamical (Choi) matrix
//! is its reshuffle `B[(i,k),(j,l)] = A[(i,j),(k,l)]`. For a single Kraus
//! operator `K` the Choi matrix is `vec(K) vec(K)^dagger`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{
    self, eig_hermitian, kron, partial_trace, pauli, reshuffle, unvec2, vec2, CMat2, CMat4,
    Subsystem, C64,
};
use crate::states::{bloch_to_state, is_physical, sample_ball, BlochVector, QubitState};

/// Minimum Choi eigenvalue still classified as CP.
pub const CP_TOL: f64 = -1e-9;
/// Choi eigenvalues at or below this modulus contribute no Kraus term.
pub const KRAUS_CUTOFF: f64 = 1e-12;
/// Distance from an invariant axis tolerated by a singular map.
pub const AXIS_TOL: f64 = 1e-10;

/// Superoperator (the "A matrix") acting on row-major vectorized states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperOp {
    pub a: CMat4,
}

impl SuperOp {
    pub fn new(a: CMat4) -> Self {
        SuperOp { a }
    }

    pub fn identity() -> Self {
        SuperOp::new(CMat4::identity())
    }

    /// `rho -> K rho K^dagger`, i.e. `A = K (x) conj(K)`.
    pub fn conjugation(k: &CMat2) -> Self {
        SuperOp::new(kron(k, &k.conj()))
    }

    /// `rho -> sum_i w_i K_i rho K_i^dagger`.
    pub fn from_weighted_kraus<'a>(terms: impl IntoIterator<Item = (f64, &'a CMat2)>) -> Self {
        let a = terms.into_iter().fold(CMat4::zeros(), |acc, (w, k)| {
            acc + kron(k, &k.conj()).scale_real(w)
        });
        SuperOp::new(a)
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &SuperOp) -> SuperOp {
        SuperOp::new(self.a * first.a)
    }

    pub fn apply_state(&self, state: &QubitState) -> QubitState {
        QubitState::new(unvec2(&self.a.mul_vec(&vec2(&state.rho))))
    }

    pub fn apply_bloch(&self, p: BlochVector) -> QubitState {
        self.apply_state(&bloch_to_state(p))
    }

    /// Worst violation of `sum_i A[(i,i),(k,l)] = delta_kl`.
    pub fn trace_preservation_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            for l in 0..2 {
                let col = 2 * k + l;
                let s = self.a.0[0][col] + self.a.0[3][col];
                let want = if k == l { 1.0 } else { 0.0 };
                worst = worst.max((s - matops::r(want)).norm());
            }
        }
        worst
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preservation_error() <= 1e-10 * self.a.max_abs().max(1.0)
    }

    pub fn det(&self) -> C64 {
        matops::det(&self.a)
    }
}

/// Dynamical (Choi) matrix; Hermitian by construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub b: CMat4,
}

impl ChoiMatrix {
    pub fn new(b: CMat4) -> Result<Self> {
        if !b.is_hermitian() {
            return Err(Error::NotHermitian {
                deviation: b.hermitian_deviation(),
            });
        }
        Ok(ChoiMatrix { b })
    }

    /// General unital trace-preserving form
    ///
    /// ```text
    /// | a   x   y   z |
    /// | x*  1-a w  -y |
    /// | y*  w*  1-a -x|
    /// | z*  -y* -x* a |
    /// ```
    ///
    /// with `a` real and `x, y, z, w` complex.
    pub fn unital(a: f64, x: C64, y: C64, z: C64, w: C64) -> Self {
        let ar = matops::r(a);
        let br = matops::r(1.0 - a);
        ChoiMatrix {
            b: matops::CMat([
                [ar, x, y, z],
                [x.conj(), br, w, -y],
                [y.conj(), w.conj(), br, -x],
                [z.conj(), -y.conj(), -x.conj(), ar],
            ]),
        }
    }

    /// `sum_i w_i vec(K_i) vec(K_i)^dagger`, the Choi matrix of
    /// `rho -> sum_i w_i K_i rho K_i^dagger`.
    pub fn from_weighted_kraus<'a>(terms: impl IntoIterator<Item = (f64, &'a CMat2)>) -> Self {
        let b = terms.into_iter().fold(CMat4::zeros(), |acc, (w, k)| {
            let v = vec2(k);
            acc + CMat4::from_fn(|i, j| v[i] * v[j].conj() * w)
        });
        ChoiMatrix {
            b: b.hermitian_part(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.b.trace().re
    }

    pub fn partial_trace(&self, subsystem: Subsystem) -> CMat2 {
        partial_trace(&self.b, subsystem)
    }

    /// Tracing out the output factor gives the identity.
    pub fn is_trace_preserving(&self) -> bool {
        self.partial_trace(Subsystem::First)
            .max_diff(&CMat2::identity())
            <= 1e-10 * self.b.max_abs().max(1.0)
    }

    /// Tracing out the input factor gives the identity.
    pub fn is_unital(&self) -> bool {
        self.partial_trace(Subsystem::Second)
            .max_diff(&CMat2::identity())
            <= 1e-10 * self.b.max_abs().max(1.0)
    }
}

pub fn choi_from_superop(map: &SuperOp) -> Result<ChoiMatrix> {
    ChoiMatrix::new(reshuffle(&map.a))
}

pub fn superop_from_choi(choi: &ChoiMatrix) -> SuperOp {
    SuperOp::new(reshuffle(&choi.b))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedKraus {
    pub op: CMat2,
    /// `+1` or `-1`.
    pub sign: i8,
}

/// Operator-sum form `rho -> sum_i s_i K_i rho K_i^dagger` with signs `s_i = +-1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignedKrausSet {
    pub terms: Vec<SignedKraus>,
}

impl SignedKrausSet {
    pub fn to_superop(&self) -> SuperOp {
        SuperOp::from_weighted_kraus(self.terms.iter().map(|t| (f64::from(t.sign), &t.op)))
    }

    pub fn apply(&self, state: &QubitState) -> QubitState {
        let rho = self.terms.iter().fold(CMat2::zeros(), |acc, t| {
            acc + (t.op * state.rho * t.op.dagger()).scale_real(f64::from(t.sign))
        });
        QubitState::new(rho)
    }

    /// Action weight `s_i |K_i|_HS^2 / 2`, the coefficient multiplying
    /// `U_i rho U_i^dagger` when `K_i` is proportional to a unitary.
    pub fn weights(&self) -> Vec<f64> {
        self.terms
            .iter()
            .map(|t| f64::from(t.sign) * 0.5 * (t.op.dagger() * t.op).trace().re)
            .collect()
    }
}

/// Signed Kraus decomposition from the Choi spectrum.
///
/// Each eigenpair `(mu, v)` with `|mu| > 1e-12` gives `K = sqrt|mu| unvec(v)`
/// and sign `sign(mu)`; terms follow the descending eigenvalue order.
pub fn kraus_from_choi(choi: &ChoiMatrix) -> Result<SignedKrausSet> {
    let eig = eig_hermitian(&choi.b)?;
    let cutoff = KRAUS_CUTOFF * choi.b.max_abs().max(1.0);
    let terms = eig
        .values
        .iter()
        .zip(eig.vectors.iter())
        .filter(|(mu, _)| mu.abs() > cutoff)
        .map(|(mu, v)| SignedKraus {
            op: unvec2(v).scale_real(mu.abs().sqrt()),
            sign: if *mu < 0.0 { -1 } else { 1 },
        })
        .collect();
    Ok(SignedKrausSet { terms })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    #[serde(rename = "CP")]
    Cp,
    #[serde(rename = "NCP")]
    Ncp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CPVerdict {
    pub classification: Classification,
    /// Sorted descending.
    pub choi_eigenvalues: [f64; 4],
    pub min_eigenvalue: f64,
}

pub fn classify(choi: &ChoiMatrix) -> Result<CPVerdict> {
    let eig = eig_hermitian(&choi.b)?;
    let min_eigenvalue = eig.min_value();
    Ok(CPVerdict {
        classification: if min_eigenvalue >= CP_TOL {
            Classification::Cp
        } else {
            Classification::Ncp
        },
        choi_eigenvalues: eig.values,
        min_eigenvalue,
    })
}

/// Closed-form output eigenvalues `(lambda_plus, lambda_minus)` of the unital
/// map [`ChoiMatrix::unital`] with all parameters real, acting on the state at `p`.
pub fn output_spectrum_unital(
    a: f64,
    x: f64,
    y: f64,
    z: f64,
    w: f64,
    p: BlochVector,
) -> (f64, f64) {
    let BlochVector { a1, a2, a3 } = p;
    let radicand = a1 * a1 * ((w + z).powi(2) + 4.0 * x * x)
        + 4.0 * a1 * a3 * ((2.0 * a - 1.0) * x + y * (w + z))
        + a2 * a2 * (w - z).powi(2)
        + a3 * a3 * ((1.0 - 2.0 * a).powi(2) + 4.0 * y * y);
    let root = radicand.max(0.0).sqrt();
    (0.5 * (1.0 + root), 0.5 * (1.0 - root))
}

/// Set of Bloch points on which a singular map is still defined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InvariantSet {
    /// The diameter `{t d : -1 <= t <= 1}` for a unit direction `d`.
    Segment {
        direction: BlochVector,
    },
    WholeBall,
}

impl InvariantSet {
    pub fn contains(&self, p: &BlochVector) -> bool {
        match self {
            InvariantSet::Segment { direction } => p.distance_to_axis(direction) <= AXIS_TOL,
            InvariantSet::WholeBall => true,
        }
    }

    /// `n` evenly spaced points of the set (the diameter for a segment, the
    /// origin for the whole ball).
    pub fn sample_points(&self, n: usize) -> Vec<BlochVector> {
        match self {
            InvariantSet::Segment { direction } => linspace(-1.0, 1.0, n)
                .into_iter()
                .map(|t| direction.scale(t))
                .collect(),
            InvariantSet::WholeBall => vec![BlochVector::ORIGIN],
        }
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// An intermediate map evaluated exactly at a divergence.
///
/// The map is only defined on its invariant set, where it acts as the
/// identity; everywhere else its output is infinite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularMap {
    pub invariant_set: InvariantSet,
    pub description: String,
}

impl SingularMap {
    pub fn apply(&self, p: BlochVector) -> Result<QubitState> {
        if self.invariant_set.contains(&p) {
            Ok(bloch_to_state(p))
        } else {
            Err(Error::DivergentMap {
                a1: p.a1,
                a2: p.a2,
                a3: p.a3,
            })
        }
    }
}

/// A qubit map that is either an ordinary superoperator or a singular point.
#[derive(Clone, Debug, PartialEq)]
pub enum QubitMap {
    Regular(SuperOp),
    Singular(SingularMap),
}

impl QubitMap {
    pub fn superop(&self) -> Option<&SuperOp> {
        match self {
            QubitMap::Regular(s) => Some(s),
            QubitMap::Singular(_) => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, QubitMap::Singular(_))
    }
}

impl From<SuperOp> for QubitMap {
    fn from(s: SuperOp) -> Self {
        QubitMap::Regular(s)
    }
}

/// `E(p)`, possibly unphysical. Singular maps fail off their invariant set.
pub fn apply(map: &QubitMap, p: BlochVector) -> Result<QubitState> {
    match map {
        QubitMap::Regular(s) => Ok(s.apply_bloch(p)),
        QubitMap::Singular(s) => s.apply(p),
    }
}

/// Minimum output eigenvalue when `p` is in the ball and the map is finite there.
pub(crate) fn probe(map: &QubitMap, p: BlochVector) -> Option<f64> {
    if !p.in_ball() {
        return None;
    }
    apply(map, p).ok().map(|s| is_physical(&s).min_eigenvalue)
}

pub(crate) fn passes(map: &QubitMap, p: BlochVector) -> bool {
    probe(map, p).is_some_and(|m| m >= crate::states::PHYSICAL_TOL)
}

/// If `k` is proportional to a unitary that is not a multiple of the identity,
/// the unit Bloch axis of its eigenstates (sign fixed so the first nonzero
/// component is positive).
pub fn unitary_axis(k: &CMat2) -> Option<BlochVector> {
    let gram = k.dagger() * *k;
    let weight = 0.5 * gram.trace().re;
    if weight <= KRAUS_CUTOFF {
        return None;
    }
    if gram.max_diff(&CMat2::identity().scale_real(weight)) > 1e-9 * weight {
        return None;
    }
    let u = k.scale_real(1.0 / weight.sqrt());
    let traceless = u - CMat2::identity().scale(u.trace() * 0.5);
    let coeffs: Vec<C64> = (1..4)
        .map(|i| (pauli(i) * traceless).trace() * 0.5)
        .collect();
    let lead = coeffs
        .iter()
        .copied()
        .max_by(|x, y| x.norm().total_cmp(&y.norm()))?;
    if lead.norm() < 1e-9 {
        return None;
    }
    let phase = lead.conj() / lead.norm();
    let n: Vec<f64> = coeffs
        .iter()
        .map(|z| (z * phase).re)
        .map(|v| if v.abs() < 1e-12 { 0.0 } else { v })
        .collect();
    let dir = BlochVector::new(n[0], n[1], n[2]);
    let dir = dir.scale(1.0 / dir.norm());
    let flip = dir
        .to_array()
        .iter()
        .find(|v| v.abs() > 1e-12)
        .is_some_and(|v| *v < 0.0);
    Some(if flip { -dir } else { dir })
}

/// Eigen-axes of all Kraus operators that are proportional to non-trivial
/// unitaries, deduplicated.
pub fn kraus_axes(kraus: &SignedKrausSet) -> Vec<BlochVector> {
    let mut axes: Vec<BlochVector> = Vec::new();
    for term in &kraus.terms {
        if let Some(axis) = unitary_axis(&term.op) {
            if !axes.iter().any(|a| a.distance_to_axis(&axis) < 1e-9) {
                axes.push(axis);
            }
        }
    }
    axes
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeConfig {
    pub ball_samples: usize,
    pub line_points: usize,
    pub seed: u64,
    /// Caller-supplied probe points, judged like ball samples.
    pub extra: Vec<BlochVector>,
    /// At most this many passing ball samples are reported as witnesses.
    pub max_sample_witnesses: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            ball_samples: 10_000,
            line_points: 64,
            seed: 0,
            extra: Vec::new(),
            max_sample_witnesses: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityStatus {
    /// Every probed point is in the positivity domain.
    FullDomain,
    /// The domain has a nonempty interior but misses some probes.
    PartialDomain,
    /// Only points on invariant lines (or the maximally mixed state) pass.
    MeasureZeroDomain,
    /// Nothing passed. Sampling cannot prove the domain empty.
    NoWitnessFound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidityVerdict {
    pub status: ValidityStatus,
    /// Sorted lexicographically by Bloch coordinates.
    pub witnesses: Vec<BlochVector>,
    pub invariant_lines: Vec<BlochVector>,
    pub canonical_probes: usize,
    pub canonical_in_domain: usize,
    pub sampled: usize,
    pub sampled_in_domain: usize,
    pub sampled_fraction: f64,
    pub probe_budget: usize,
}

/// Search for points of the positivity domain.
///
/// Probes run in order: canonical points (maximally mixed state, eigenstate
/// axes of unitary Kraus terms or the invariant set of a singular map), then
/// caller extras and a uniform ball sample. For a regular map whose only hits
/// are canonical, a strictly interior hit is perturbed off its line in shrinking
/// steps; by continuity a passing perturbation shows a nonempty interior.
pub fn check_validity(map: &QubitMap, probes: &ProbeConfig) -> ValidityVerdict {
    let lines: Vec<BlochVector> = match map {
        QubitMap::Regular(s) => choi_from_superop(s)
            .and_then(|c| kraus_from_choi(&c))
            .map(|k| kraus_axes(&k))
            .unwrap_or_default(),
        QubitMap::Singular(s) => match s.invariant_set {
            InvariantSet::Segment { direction } => vec![direction],
            InvariantSet::WholeBall => vec![],
        },
    };

    let mut canonical = vec![BlochVector::ORIGIN];
    for dir in &lines {
        canonical.extend(
            InvariantSet::Segment { direction: *dir }.sample_points(probes.line_points.max(2)),
        );
    }
    let canonical_hits: Vec<BlochVector> = canonical
        .iter()
        .copied()
        .filter(|p| passes(map, *p))
        .collect();

    let mut sampled_points = probes.extra.clone();
    sampled_points.extend(sample_ball(probes.seed, probes.ball_samples));
    let verdicts: Vec<bool> = sampled_points.par_iter().map(|p| passes(map, *p)).collect();
    let sampled_in_domain = verdicts.iter().filter(|v| **v).count();

    let mut witnesses = canonical_hits.clone();
    witnesses.extend(probes.extra.iter().copied().filter(|p| passes(map, *p)));
    witnesses.extend(
        sampled_points
            .iter()
            .zip(&verdicts)
            .skip(probes.extra.len())
            .filter(|(_, v)| **v)
            .map(|(p, _)| *p)
            .take(probes.max_sample_witnesses),
    );

    let all_pass = !sampled_points.is_empty()
        && sampled_in_domain == sampled_points.len()
        && canonical_hits.len() == canonical.len();
    let status = if all_pass {
        ValidityStatus::FullDomain
    } else if sampled_in_domain > 0 {
        ValidityStatus::PartialDomain
    } else if !canonical_hits.is_empty() {
        match interior_witness(map, &canonical_hits, &lines) {
            Some(p) => {
                witnesses.push(p);
                ValidityStatus::PartialDomain
            }
            None => ValidityStatus::MeasureZeroDomain,
        }
    } else {
        ValidityStatus::NoWitnessFound
    };

    witnesses.sort_by(|x, y| x.lex_cmp(y));
    witnesses.dedup();

    let sampled = sampled_points.len();
    ValidityVerdict {
        status,
        witnesses,
        invariant_lines: lines,
        canonical_probes: canonical.len(),
        canonical_in_domain: canonical_hits.len(),
        sampled,
        sampled_in_domain,
        sampled_fraction: if sampled == 0 {
            0.0
        } else {
            sampled_in_domain as f64 / sampled as f64
        },
        probe_budget: canonical.len() + sampled,
    }
}

fn interior_witness(
    map: &QubitMap,
    hits: &[BlochVector],
    lines: &[BlochVector],
) -> Option<BlochVector> {
    if map.is_singular() {
        return None;
    }
    let axes = [
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
    ];
    for base in hits {
        if base.norm() >= 1.0 - 1e-9 || probe(map, *base).is_none_or(|m| m <= 1e-9) {
            continue;
        }
        for k in 1..=15 {
            let step = 10f64.powi(-k);
            for axis in &axes {
                for sign in [1.0, -1.0] {
                    let p = *base + axis.scale(sign * step);
                    let on_line = lines.iter().any(|d| p.distance_to_axis(d) < 1e-12);
                    if !on_line && passes(map, p) {
                        return Some(p);
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::bncp_example;
    use crate::matops::{c, r, sigma_x, sigma_z};
    use std::f64::consts::PI;

    fn b2_closed(theta: f64) -> ChoiMatrix {
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        ChoiMatrix::new(
            CMat4::from_real([
                [c2, 0.0, 0.0, c2],
                [0.0, -s2, -s2, 0.0],
                [0.0, -s2, -s2, 0.0],
                [c2, 0.0, 0.0, c2],
            ])
            .scale_real(1.0 / (2.0 * theta).cos()),
        )
        .unwrap()
    }

    #[test]
    fn identity_round_trip() {
        let choi = choi_from_superop(&SuperOp::identity()).unwrap();
        assert_eq!(classify(&choi).unwrap().choi_eigenvalues[0], 2.0);
        assert_eq!(superop_from_choi(&choi), SuperOp::identity());
        let k = kraus_from_choi(&choi).unwrap();
        assert_eq!(k.terms.len(), 1);
        assert_eq!(k.terms[0].sign, 1);
        assert!(k.terms[0].op.max_diff(&CMat2::identity()) < 1e-14);
    }

    #[test]
    fn cnot_choi_signed_kraus_weights() {
        let k = kraus_from_choi(&b2_closed(PI / 6.0)).unwrap();
        assert_eq!(k.terms.len(), 2);
        let w = k.weights();
        assert!((w[0] - 1.5).abs() < 1e-12);
        assert!((w[1] + 0.5).abs() < 1e-12);
        assert_eq!((k.terms[0].sign, k.terms[1].sign), (1, -1));
        // proportional to identity and sigma_x respectively
        assert!(
            k.terms[0]
                .op
                .max_diff(&CMat2::identity().scale_real(1.5f64.sqrt()))
                < 1e-12
        );
        assert!(k.terms[1].op.max_diff(&sigma_x().scale_real(0.5f64.sqrt())) < 1e-12);
    }

    #[test]
    fn dephasing_kraus_pair() {
        let beta = 0.3;
        let map =
            SuperOp::from_weighted_kraus([(1.0 - beta, &CMat2::identity()), (beta, &sigma_z())]);
        let k = kraus_from_choi(&choi_from_superop(&map).unwrap()).unwrap();
        assert_eq!(k.terms.len(), 2);
        assert!(
            k.terms[0]
                .op
                .max_diff(&CMat2::identity().scale_real(0.7f64.sqrt()))
                < 1e-12
        );
        assert!(k.terms[1].op.max_diff(&sigma_z().scale_real(0.3f64.sqrt())) < 1e-12);
        assert!(k.terms.iter().all(|t| t.sign == 1));
    }

    #[test]
    fn classify_examples() {
        let v = classify(&bncp_example()).unwrap();
        assert_eq!(v.classification, Classification::Ncp);
        assert!((v.min_eigenvalue + 1.12409).abs() < 1e-5);

        let dep = ChoiMatrix::new(CMat4::identity().scale_real(0.5)).unwrap();
        let v = classify(&dep).unwrap();
        assert_eq!(v.classification, Classification::Cp);
        assert!(v.choi_eigenvalues.iter().all(|e| (e - 0.5).abs() < 1e-15));

        let v = classify(&b2_closed(PI / 6.0)).unwrap();
        assert_eq!(v.classification, Classification::Ncp);
        for (got, want) in v.choi_eigenvalues.iter().zip([3.0, 0.0, 0.0, -1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn unital_map_fixes_maximally_mixed() {
        let map = superop_from_choi(&bncp_example());
        let out = map.apply_bloch(BlochVector::ORIGIN);
        assert!(out.rho.max_diff(&QubitState::maximally_mixed().rho) < 1e-15);
    }

    #[test]
    fn ncp_example_point_is_in_domain() {
        let map = superop_from_choi(&bncp_example());
        let out = map.apply_bloch(BlochVector::new(0.05, 0.1, 0.5));
        assert!(is_physical(&out).physical);
        assert!((out.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cnot_intermediate_fixes_sigma_x_line() {
        let map = superop_from_choi(&b2_closed(PI / 6.0));
        // p = 0.8 -> Bloch a1 = 2p - 1
        let p = BlochVector::new(0.6, 0.0, 0.0);
        let out = map.apply_bloch(p);
        assert!(out.rho.max_diff(&bloch_to_state(p).rho) < 1e-10);
    }

    #[test]
    fn output_spectrum_examples() {
        assert_eq!(
            output_spectrum_unital(0.3, 0.2, -0.4, 0.9, 0.1, BlochVector::ORIGIN),
            (0.5, 0.5)
        );
        let (hi, lo) =
            output_spectrum_unital(1.0, 0.0, 0.0, 0.0, 0.0, BlochVector::new(0.0, 0.0, 0.6));
        assert!((hi - 0.8).abs() < 1e-15 && (lo - 0.2).abs() < 1e-15);
        let choi = ChoiMatrix::unital(1.0, r(0.0), r(0.0), r(0.0), r(0.0));
        let out = superop_from_choi(&choi).apply_bloch(BlochVector::new(0.0, 0.0, 0.6));
        let (lo2, hi2) = out.eigenvalues();
        assert!((hi2 - 0.8).abs() < 1e-12 && (lo2 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn unital_form_is_unital_and_tp() {
        let choi = ChoiMatrix::unital(0.3, c(0.1, 0.2), c(-0.3, 0.05), c(0.4, -0.1), c(0.2, 0.3));
        assert!(choi.is_trace_preserving());
        assert!(choi.is_unital());
        assert!((choi.trace() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn non_hermiticity_preserving_map_is_rejected() {
        let mut a = CMat4::identity();
        a.0[0][1] = c(0.0, 0.3);
        assert!(matches!(
            choi_from_superop(&SuperOp::new(a)),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn unitary_axis_of_paulis() {
        assert_eq!(unitary_axis(&CMat2::identity()), None);
        assert_eq!(
            unitary_axis(&sigma_x().scale_real(0.3)),
            Some(BlochVector::new(1.0, 0.0, 0.0))
        );
        assert_eq!(
            unitary_axis(&sigma_z()),
            Some(BlochVector::new(0.0, 0.0, 1.0))
        );
        let not_unitary = CMat2::from_real([[1.0, 0.0], [0.0, 0.5]]);
        assert_eq!(unitary_axis(&not_unitary), None);
    }

    #[test]
    fn identity_has_full_domain() {
        let v = check_validity(&SuperOp::identity().into(), &ProbeConfig::default());
        assert_eq!(v.status, ValidityStatus::FullDomain);
    }

    #[test]
    fn ncp_example_has_partial_domain() {
        let map: QubitMap = superop_from_choi(&bncp_example()).into();
        let probes = ProbeConfig {
            extra: vec![BlochVector::new(0.05, 0.1, 0.5)],
            ..ProbeConfig::default()
        };
        let v = check_validity(&map, &probes);
        assert_eq!(v.status, ValidityStatus::PartialDomain);
        assert!(v.witnesses.contains(&BlochVector::new(0.05, 0.1, 0.5)));
        for w in &v.witnesses {
            assert!(is_physical(&apply(&map, *w).unwrap()).physical);
        }
        assert!(v.witnesses.windows(2).all(|p| p[0].lex_cmp(&p[1]).is_lt()));
    }

    #[test]
    fn singular_map_has_measure_zero_domain() {
        let map = QubitMap::Singular(SingularMap {
            invariant_set: InvariantSet::Segment {
                direction: BlochVector::new(1.0, 0.0, 0.0),
            },
            description: "test".into(),
        });
        let v = check_validity(&map, &ProbeConfig::default());
        assert_eq!(v.status, ValidityStatus::MeasureZeroDomain);
        assert!(!v.witnesses.is_empty());
        assert!(v.witnesses.iter().all(|w| w.a2 == 0.0 && w.a3 == 0.0));
        assert!(matches!(
            apply(&map, BlochVector::new(0.0, 0.1, 0.0)),
            Err(Error::DivergentMap { .. })
        ));
    }

    #[test]
    fn invalid_constant_map_finds_no_witness() {
        // rho -> diag(2, -1) for every input
        let mut a = CMat4::zeros();
        a.0[0][0] = r(2.0);
        a.0[0][3] = r(2.0);
        a.0[3][0] = r(-1.0);
        a.0[3][3] = r(-1.0);
        let v = check_validity(&SuperOp::new(a).into(), &ProbeConfig::default());
        assert_eq!(v.status, ValidityStatus::NoWitnessFound);
        assert!(v.witnesses.is_empty());
        assert_eq!(v.probe_budget, v.canonical_probes + v.sampled);
    }
}
