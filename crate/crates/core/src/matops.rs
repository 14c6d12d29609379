//! Fixed-size complex linear algebra for qubit maps.
//!
//! Everything here works on `N x N` matrices stored row-major on the stack.
//! Two-qubit (4 x 4) matrices use the pair index `(i, k) -> 2 i + k`, which is
//! also the row-major vectorization of a 2 x 2 matrix: `vec(rho)[2 i + j] = rho[i][j]`.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute Hermiticity tolerance, scaled by `max(1, max|M|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi stops once every off-diagonal entry is below this, scaled like `HERMITIAN_TOL`.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Relative pivot threshold below which `inverse` reports a singular matrix.
pub const SINGULAR_PIVOT_TOL: f64 = 1e-12;

pub const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex `N x N` matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<const N: usize>(pub [[C64; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[C64::new(0.0, 0.0); N]; N])
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| if i == j { r(1.0) } else { r(0.0) })
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(|i, j| r(rows[i][j]))
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn mul_vec(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [C64::new(0.0, 0.0); N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    /// Entrywise max distance to another matrix.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn hermitian_deviation(&self) -> f64 {
        self.max_diff(&self.dagger())
    }

    /// Hermiticity predicate with tolerance `HERMITIAN_TOL * max(1, max|M|)`.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i].conj()) * 0.5)
    }

    pub fn unitarity_deviation(&self) -> f64 {
        (self.dagger() * *self).max_diff(&Self::identity())
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<const N: usize> Sub for CMat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<const N: usize> Mul for CMat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum())
    }
}

/// Pauli matrices indexed 0..4 as `I, X, Y, Z`.
pub fn pauli(k: usize) -> CMat2 {
    let o = r(0.0);
    let l = r(1.0);
    let i = c(0.0, 1.0);
    match k {
        0 => CMat([[l, o], [o, l]]),
        1 => CMat([[o, l], [l, o]]),
        2 => CMat([[o, -i], [i, o]]),
        3 => CMat([[l, o], [o, -l]]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

pub fn sigma_x() -> CMat2 {
    pauli(1)
}

pub fn sigma_y() -> CMat2 {
    pauli(2)
}

pub fn sigma_z() -> CMat2 {
    pauli(3)
}

/// Row-major vectorization of a 2 x 2 matrix.
pub fn vec2(m: &CMat2) -> [C64; 4] {
    [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]]
}

/// Inverse of [`vec2`].
pub fn unvec2(v: &[C64; 4]) -> CMat2 {
    CMat([[v[0], v[1]], [v[2], v[3]]])
}

pub fn kron(p: &CMat2, q: &CMat2) -> CMat4 {
    CMat4::from_fn(|row, col| p.0[row / 2][col / 2] * q.0[row % 2][col % 2])
}

/// Exchange of the column index of the first factor with the row index of the
/// second: `B[(i,k),(j,l)] = A[(i,j),(k,l)]`. Turns a superoperator into its
/// dynamical (Choi) matrix and back; it is an involution.
pub fn reshuffle(a: &CMat4) -> CMat4 {
    let mut b = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    b.0[2 * i + k][2 * j + l] = a.0[2 * i + j][2 * k + l];
                }
            }
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace over one factor of a two-qubit operator.
pub fn partial_trace(m: &CMat4, subsystem: Subsystem) -> CMat2 {
    CMat2::from_fn(|a, b| match subsystem {
        Subsystem::First => (0..2).map(|i| m.0[2 * i + a][2 * i + b]).sum(),
        Subsystem::Second => (0..2).map(|k| m.0[2 * a + k][2 * b + k]).sum(),
    })
}

/// Spectrum of a Hermitian matrix.
///
/// `values` are sorted descending and `vectors[i]` is the unit eigenvector for
/// `values[i]`. Each eigenvector's phase is fixed so that its first entry with
/// modulus above 1e-8 is real and positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenDecomp<const N: usize> {
    pub values: [f64; N],
    pub vectors: [[C64; N]; N],
}

impl<const N: usize> EigenDecomp<N> {
    /// `sum_i lambda_i v_i v_i^dagger`.
    pub fn reconstruct(&self) -> CMat<N> {
        let mut m = CMat::<N>::zeros();
        for (lambda, v) in self.values.iter().zip(self.vectors.iter()) {
            for i in 0..N {
                for j in 0..N {
                    m.0[i][j] += v[i] * v[j].conj() * *lambda;
                }
            }
        }
        m
    }

    pub fn min_value(&self) -> f64 {
        self.values[N - 1]
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Sweeps visit pivots `(p, q)` with `p < q` in row order and stop once every
/// off-diagonal modulus is below `JACOBI_OFF_DIAGONAL_TOL * max(1, max|M|)`.
pub fn eig_hermitian<const N: usize>(m: &CMat<N>) -> Result<EigenDecomp<N>> {
    let scale = m.max_abs().max(1.0);
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale || !deviation.is_finite() {
        return Err(Error::NotHermitian { deviation });
    }

    let mut a = m.hermitian_part();
    let mut v = CMat::<N>::identity();
    let threshold = JACOBI_OFF_DIAGONAL_TOL * scale;

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if max_off_diagonal(&a) < threshold {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && max_off_diagonal(&a) >= threshold {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
        });
    }

    let mut pairs: Vec<(f64, [C64; N])> = (0..N)
        .map(|k| {
            let mut col = [C64::new(0.0, 0.0); N];
            for (i, entry) in col.iter_mut().enumerate() {
                *entry = v.0[i][k];
            }
            (a.0[k][k].re, fix_phase(col))
        })
        .collect();

    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    // Near-degenerate eigenvalues are ordered by their eigenvectors so output is reproducible.
    let tie = 1e-12 * scale;
    let mut start = 0;
    while start < N {
        let mut end = start + 1;
        while end < N && (pairs[end - 1].0 - pairs[end].0).abs() <= tie {
            end += 1;
        }
        pairs[start..end].sort_by(|x, y| lex_desc(&x.1, &y.1));
        start = end;
    }

    let mut values = [0.0; N];
    let mut vectors = [[C64::new(0.0, 0.0); N]; N];
    for (k, (value, vector)) in pairs.into_iter().enumerate() {
        values[k] = value;
        vectors[k] = vector;
    }
    Ok(EigenDecomp { values, vectors })
}

fn max_off_diagonal<const N: usize>(a: &CMat<N>) -> f64 {
    let mut off: f64 = 0.0;
    for p in 0..N {
        for q in (p + 1)..N {
            off = off.max(a.0[p][q].norm());
        }
    }
    off
}

/// One two-sided rotation `A <- G^dagger A G`, `V <- V G`, zeroing `A[p][q]`.
///
/// `G = D R` where `D = diag(1, e^{-i phi})` makes the pivot real and `R` is the
/// real Jacobi rotation for the resulting symmetric 2 x 2 block.
fn rotate<const N: usize>(a: &mut CMat<N>, v: &mut CMat<N>, p: usize, q: usize) {
    let apq = a.0[p][q];
    let modulus = apq.norm();
    if modulus == 0.0 {
        return;
    }
    let phase = apq / modulus;
    let app = a.0[p][p].re;
    let aqq = a.0[q][q].re;

    let theta = (aqq - app) / (2.0 * modulus);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let cs = 1.0 / t.hypot(1.0);
    let sn = t * cs;

    let g_pp = r(cs);
    let g_pq = r(sn);
    let g_qp = -phase.conj() * sn;
    let g_qq = phase.conj() * cs;

    for k in 0..N {
        let akp = a.0[k][p];
        let akq = a.0[k][q];
        a.0[k][p] = akp * g_pp + akq * g_qp;
        a.0[k][q] = akp * g_pq + akq * g_qq;
    }
    for k in 0..N {
        let apk = a.0[p][k];
        let aqk = a.0[q][k];
        a.0[p][k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a.0[q][k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a.0[p][q] = r(0.0);
    a.0[q][p] = r(0.0);
    a.0[p][p] = r(app - t * modulus);
    a.0[q][q] = r(aqq + t * modulus);

    for k in 0..N {
        let vkp = v.0[k][p];
        let vkq = v.0[k][q];
        v.0[k][p] = vkp * g_pp + vkq * g_qp;
        v.0[k][q] = vkp * g_pq + vkq * g_qq;
    }
}

fn fix_phase<const N: usize>(mut v: [C64; N]) -> [C64; N] {
    if let Some(lead) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let rot = lead.conj() / lead.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
    v
}

fn lex_desc<const N: usize>(x: &[C64; N], y: &[C64; N]) -> std::cmp::Ordering {
    for (a, b) in x.iter().zip(y.iter()) {
        let ord = b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im));
        if ord != std::cmp::Ordering::Equal {
            return ord;
        }
    }
    std::cmp::Ordering::Equal
}

/// Determinant by partial-pivoting elimination.
pub fn det<const N: usize>(m: &CMat<N>) -> C64 {
    let mut a = *m;
    let mut d = r(1.0);
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&x, &y| a.0[x][col].norm().total_cmp(&a.0[y][col].norm()))
            .unwrap_or(col);
        if a.0[piv][col].norm() == 0.0 {
            return r(0.0);
        }
        if piv != col {
            a.0.swap(piv, col);
            d = -d;
        }
        let pivot = a.0[col][col];
        d *= pivot;
        for row in (col + 1)..N {
            let f = a.0[row][col] / pivot;
            for k in col..N {
                let sub = f * a.0[col][k];
                a.0[row][k] -= sub;
            }
        }
    }
    d
}

/// Gauss-Jordan inverse with partial pivoting.
///
/// Fails with `SingularMatrix` when a pivot falls below
/// `SINGULAR_PIVOT_TOL * max|M|`; the error carries `|det M|`.
pub fn inverse<const N: usize>(m: &CMat<N>) -> Result<CMat<N>> {
    let scale = m.max_abs();
    if scale == 0.0 || !m.is_finite() {
        return Err(Error::SingularMatrix { det: 0.0 });
    }
    let threshold = SINGULAR_PIVOT_TOL * scale;
    let mut a = *m;
    let mut inv = CMat::<N>::identity();
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&x, &y| a.0[x][col].norm().total_cmp(&a.0[y][col].norm()))
            .unwrap_or(col);
        if a.0[piv][col].norm() < threshold {
            return Err(Error::SingularMatrix { det: det(m).norm() });
        }
        a.0.swap(piv, col);
        inv.0.swap(piv, col);
        let pivot_inv = a.0[col][col].inv();
        for k in 0..N {
            a.0[col][k] *= pivot_inv;
            inv.0[col][k] *= pivot_inv;
        }
        for row in 0..N {
            if row == col {
                continue;
            }
            let f = a.0[row][col];
            if f == r(0.0) {
                continue;
            }
            for k in 0..N {
                let sa = f * a.0[col][k];
                let si = f * inv.0[col][k];
                a.0[row][k] -= sa;
                inv.0[row][k] -= si;
            }
        }
    }
    Ok(inv)
}

/// 4 x 4 inverse; see [`inverse`].
pub fn inverse4(m: &CMat4) -> Result<CMat4> {
    inverse(m)
}
