//! Qubit states as Bloch vectors and density matrices.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::matops::{c, r, CMat, CMat2};
use crate::rng;

/// Slack on the ball constraint `|a|^2 <= 1`.
pub const BALL_TOL: f64 = 1e-12;
/// Smallest eigenvalue still accepted as physical.
pub const PHYSICAL_TOL: f64 = -1e-10;

/// Bloch coordinates. Points outside the unit ball are allowed so that
/// unphysical map outputs can still be described.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl BlochVector {
    pub const ORIGIN: BlochVector = BlochVector::new(0.0, 0.0, 0.0);

    pub const fn new(a1: f64, a2: f64, a3: f64) -> Self {
        BlochVector { a1, a2, a3 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        BlochVector::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.a1, self.a2, self.a3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.a1 * self.a1 + self.a2 * self.a2 + self.a3 * self.a3
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn in_ball(&self) -> bool {
        self.norm_sq() <= 1.0 + BALL_TOL
    }

    pub fn scale(self, s: f64) -> Self {
        BlochVector::new(self.a1 * s, self.a2 * s, self.a3 * s)
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.a1 * o.a1 + self.a2 * o.a2 + self.a3 * o.a3
    }

    /// Distance to the line through the origin along the unit vector `dir`.
    pub fn distance_to_axis(&self, dir: &BlochVector) -> f64 {
        let along = dir.scale(self.dot(dir));
        (*self - along).norm()
    }

    /// Lexicographic order on `(a1, a2, a3)`.
    pub fn lex_cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.a1
            .total_cmp(&o.a1)
            .then(self.a2.total_cmp(&o.a2))
            .then(self.a3.total_cmp(&o.a3))
    }

    /// CSV row `a1,a2,a3` with round-trip precision.
    pub fn csv_row(&self) -> String {
        format!("{},{},{}", self.a1, self.a2, self.a3)
    }
}

impl Add for BlochVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        BlochVector::new(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl Sub for BlochVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        BlochVector::new(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl Neg for BlochVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl fmt::Display for BlochVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a1, self.a2, self.a3)
    }
}

/// A 2 x 2 density matrix, physical or not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitState {
    pub rho: CMat2,
}

impl QubitState {
    pub fn new(rho: CMat2) -> Self {
        QubitState { rho }
    }

    pub fn maximally_mixed() -> Self {
        bloch_to_state(BlochVector::ORIGIN)
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let h = self.rho.hermitian_part();
        let mean = 0.5 * (h.0[0][0].re + h.0[1][1].re);
        let half_gap = (0.5 * (h.0[0][0].re - h.0[1][1].re)).hypot(h.0[0][1].norm());
        (mean - half_gap, mean + half_gap)
    }
}

/// `rho = (1 + a . sigma) / 2`.
pub fn bloch_to_state(a: BlochVector) -> QubitState {
    QubitState::new(CMat([
        [r(0.5 * (1.0 + a.a3)), c(0.5 * a.a1, -0.5 * a.a2)],
        [c(0.5 * a.a1, 0.5 * a.a2), r(0.5 * (1.0 - a.a3))],
    ]))
}

/// `a_i = tr(rho sigma_i)`.
pub fn state_to_bloch(state: &QubitState) -> BlochVector {
    let m = &state.rho.0;
    BlochVector::new(
        (m[0][1] + m[1][0]).re,
        (m[1][0] - m[0][1]).im,
        (m[0][0] - m[1][1]).re,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Physicality {
    pub physical: bool,
    pub min_eigenvalue: f64,
}

/// Positivity test on a (Hermitian, unit-trace) state: both eigenvalues `>= -1e-10`.
pub fn is_physical(state: &QubitState) -> Physicality {
    let (min_eigenvalue, _) = state.eigenvalues();
    Physicality {
        physical: min_eigenvalue >= PHYSICAL_TOL,
        min_eigenvalue,
    }
}

/// One uniform draw from the unit ball.
pub fn sample_point<R: Rng>(rng: &mut R) -> BlochVector {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let phi: f64 = 2.0 * PI * rng.gen::<f64>();
    let radius = rng.gen::<f64>().cbrt();
    let rho = (1.0 - z * z).max(0.0).sqrt();
    BlochVector::new(rho * phi.cos(), rho * phi.sin(), z).scale(radius)
}

/// `n` points uniform in the Bloch ball; point `i` depends only on `(seed, i)`.
pub fn sample_ball(seed: u64, n: usize) -> Vec<BlochVector> {
    rng::draw(seed, n, sample_point)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_maximally_mixed() {
        let s = bloch_to_state(BlochVector::ORIGIN);
        assert_eq!(s.rho, CMat2::identity().scale_real(0.5));
    }

    #[test]
    fn north_pole() {
        let s = bloch_to_state(BlochVector::new(0.0, 0.0, 1.0));
        assert_eq!(s.rho, CMat2::from_real([[1.0, 0.0], [0.0, 0.0]]));
    }

    #[test]
    fn ncp_example_point_matrix() {
        let s = bloch_to_state(BlochVector::new(0.05, 0.1, 0.5));
        let want = CMat([[r(1.5), c(0.05, -0.1)], [c(0.05, 0.1), r(0.5)]]).scale_real(0.5);
        assert!(s.rho.max_diff(&want) < 1e-15);
    }

    #[test]
    fn bloch_inversion() {
        let s = CMat2::identity().scale_real(0.5);
        assert_eq!(state_to_bloch(&QubitState::new(s)), BlochVector::ORIGIN);
        let up = QubitState::new(CMat2::from_real([[1.0, 0.0], [0.0, 0.0]]));
        assert_eq!(state_to_bloch(&up), BlochVector::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn physicality_examples() {
        assert!(is_physical(&QubitState::maximally_mixed()).physical);
        let out = is_physical(&bloch_to_state(BlochVector::new(0.0, 0.0, 1.2)));
        assert!(!out.physical);
        assert!((out.min_eigenvalue + 0.1).abs() < 1e-15);
        assert!(is_physical(&bloch_to_state(BlochVector::new(0.0, 0.0, 1.0))).physical);
    }

    #[test]
    fn sampled_points_are_in_ball() {
        let pts = sample_ball(11, 1000);
        assert_eq!(pts.len(), 1000);
        assert!(pts.iter().all(BlochVector::in_ball));
    }

    #[test]
    fn mean_radius_is_three_quarters() {
        let n = 1000;
        let pts = sample_ball(0, n);
        let mean = pts.iter().map(BlochVector::norm).sum::<f64>() / n as f64;
        // Var(r) = 3/5 - 9/16 = 3/80 for the uniform ball
        let sigma = (3.0 / 80.0 / n as f64).sqrt();
        assert!((mean - 0.75).abs() < 3.0 * sigma, "mean radius {mean}");
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_ball(5, 300), sample_ball(5, 300));
        assert_ne!(sample_ball(5, 300), sample_ball(6, 300));
    }
}
