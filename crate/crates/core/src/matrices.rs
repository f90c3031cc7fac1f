//! Small dense complex matrices: 2×2 Schur reduction and canonical form,
//! numerical ranges by the support-function method, polynomial functional
//! calculus and operator norms.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{CurveSamples, Polynomial};
use crate::{par, Error, Result, C64};

/// Relative threshold below which two eigenvalues (or a Schur off-diagonal)
/// are treated as coincident (or zero).
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Largest dimension accepted by [`DenseMatrix`].
pub const MAX_DENSE_DIM: usize = 8;

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITERATIONS: usize = 10_000;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A 2×2 complex matrix `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix2 {
    pub a11: C64,
    pub a12: C64,
    pub a21: C64,
    pub a22: C64,
}

impl Matrix2 {
    pub const fn new(a11: C64, a12: C64, a21: C64, a22: C64) -> Self {
        Self { a11, a12, a21, a22 }
    }

    pub const fn from_real(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Self::new(C64::new(a11, 0.0), C64::new(a12, 0.0), C64::new(a21, 0.0), C64::new(a22, 0.0))
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub fn scalar(c: C64) -> Self {
        Self::new(c, ZERO, ZERO, c)
    }

    pub fn diag(d1: C64, d2: C64) -> Self {
        Self::new(d1, ZERO, ZERO, d2)
    }

    /// The matrix `[[1, 2b], [0, −1]]` whose numerical range is the ellipse
    /// with semi-axes `√(1+b²)` and `b`.
    pub fn canonical(b: f64) -> Self {
        Self::from_real(1.0, 2.0 * b, 0.0, -1.0)
    }

    /// Unitary matrix with columns `u` and `(−conj u₂, conj u₁)`; `u` must be a
    /// unit vector.
    pub fn unitary_from_column(u1: C64, u2: C64) -> Self {
        Self::new(u1, -u2.conj(), u2, u1.conj())
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a11.conj(), self.a21.conj(), self.a12.conj(), self.a22.conj())
    }

    pub fn trace(&self) -> C64 {
        self.a11 + self.a22
    }

    pub fn det(&self) -> C64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.a11 * c, self.a12 * c, self.a21 * c, self.a22 * c)
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() <= f64::EPSILON * self.frobenius().powi(2) {
            return Err(Error::InvalidParameter("matrix is singular".into()));
        }
        Ok(Self::new(self.a22 / d, -self.a12 / d, -self.a21 / d, self.a11 / d))
    }

    pub fn mul_vec(&self, x: [C64; 2]) -> [C64; 2] {
        [self.a11 * x[0] + self.a12 * x[1], self.a21 * x[0] + self.a22 * x[1]]
    }

    pub fn frobenius(&self) -> f64 {
        self.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues `(λ₁, λ₂)` from the characteristic polynomial, with
    /// `|λ₁| ≥ |λ₂|`; the smaller one comes from `det/λ₁` to avoid cancellation.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let mean = self.trace() / 2.0;
        let half_gap = (self.a11 - self.a22) / 2.0;
        let mut s = (half_gap * half_gap + self.a12 * self.a21).sqrt();
        if (mean.conj() * s).re < 0.0 {
            s = -s;
        }
        let l1 = mean + s;
        let l2 = if l1.norm() > 0.0 && (mean - s).norm() < 0.5 * l1.norm() {
            self.det() / l1
        } else {
            mean - s
        };
        (l1, l2)
    }
}

impl Add for Matrix2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a11 + o.a11, self.a12 + o.a12, self.a21 + o.a21, self.a22 + o.a22)
    }
}

impl Sub for Matrix2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a11 - o.a11, self.a12 - o.a12, self.a21 - o.a21, self.a22 - o.a22)
    }
}

impl Mul for Matrix2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }
}

/// Top eigenpair of the Hermitian matrix `[[p, q], [conj q, r]]`.
fn hermitian2_top(p: f64, q: C64, r: f64) -> (f64, [C64; 2]) {
    let mean = 0.5 * (p + r);
    let half = 0.5 * (p - r);
    let rad = half.hypot(q.norm());
    let mu = mean + rad;
    // rows of H − μI give two candidate null vectors; keep the larger
    let v1 = [q, C64::new(mu - p, 0.0)];
    let v2 = [C64::new(mu - r, 0.0), q.conj()];
    let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
    let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
    if n == 0.0 {
        return (mu, [ONE, ZERO]);
    }
    let n = n.sqrt();
    (mu, [v[0] / n, v[1] / n])
}

/// A square complex matrix of dimension 1 to [`MAX_DENSE_DIM`].
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix(DMatrix<C64>);

impl DenseMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 || m.nrows() > MAX_DENSE_DIM {
            return Err(Error::InvalidParameter(format!(
                "expected a square matrix of dimension 1..={MAX_DENSE_DIM}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite entry".into()));
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::InvalidParameter(format!("{} entries for dimension {n}", entries.len())));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }
}

impl From<Matrix2> for DenseMatrix {
    fn from(m: Matrix2) -> Self {
        Self(DMatrix::from_row_slice(2, 2, &m.entries()))
    }
}

/// Operations shared by [`Matrix2`] and [`DenseMatrix`].
pub trait SquareMatrix: Clone + Send + Sync {
    fn dim(&self) -> usize;
    fn scaled_identity(&self, c: C64) -> Self;
    /// `self · other + c I`
    fn mul_add_identity(&self, other: &Self, c: C64) -> Self;
    /// Largest singular value.
    fn operator_norm(&self) -> Result<f64>;
    /// The boundary point of the numerical range supported by the direction
    /// `e^{iθ}`: `⟨Ax, x⟩` for a top eigenvector `x` of the Hermitian part of
    /// `e^{−iθ}A`.
    fn support_point(&self, theta: f64) -> C64;
}

impl SquareMatrix for Matrix2 {
    fn dim(&self) -> usize {
        2
    }

    fn scaled_identity(&self, c: C64) -> Self {
        Matrix2::scalar(c)
    }

    fn mul_add_identity(&self, other: &Self, c: C64) -> Self {
        *self * *other + Matrix2::scalar(c)
    }

    fn operator_norm(&self) -> Result<f64> {
        let g = self.adjoint() * *self;
        let (top, _) = hermitian2_top(g.a11.re, g.a12, g.a22.re);
        Ok(top.max(0.0).sqrt())
    }

    fn support_point(&self, theta: f64) -> C64 {
        let rot = self.scale(C64::from_polar(1.0, -theta));
        let q = 0.5 * (rot.a12 + rot.a21.conj());
        let (_, x) = hermitian2_top(rot.a11.re, q, rot.a22.re);
        let ax = self.mul_vec(x);
        x[0].conj() * ax[0] + x[1].conj() * ax[1]
    }
}

impl SquareMatrix for DenseMatrix {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn scaled_identity(&self, c: C64) -> Self {
        let n = self.dim();
        Self(DMatrix::from_diagonal_element(n, n, c))
    }

    fn mul_add_identity(&self, other: &Self, c: C64) -> Self {
        let n = self.dim();
        Self(&self.0 * &other.0 + DMatrix::from_diagonal_element(n, n, c))
    }

    /// Power iteration on `M*M` from a fixed pseudo-random start.
    fn operator_norm(&self) -> Result<f64> {
        let n = self.dim();
        let gram = self.0.adjoint() * &self.0;
        if gram.iter().all(|z| *z == ZERO) {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x = nalgebra::DVector::from_fn(n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        x /= C64::new(x.norm(), 0.0);
        let mut lambda = 0.0;
        for _ in 0..POWER_MAX_ITERATIONS {
            let y = &gram * &x;
            let next = x.dotc(&y).re;
            let ny = y.norm();
            if ny == 0.0 {
                return Ok(0.0);
            }
            x = y / C64::new(ny, 0.0);
            if (next - lambda).abs() <= POWER_TOL * next.abs() {
                return Ok(next.max(0.0).sqrt());
            }
            lambda = next;
        }
        let y = &gram * &x;
        let residual = (&y - &x * x.dotc(&y)).norm();
        Err(Error::NoConvergence { iterations: POWER_MAX_ITERATIONS, residual })
    }

    fn support_point(&self, theta: f64) -> C64 {
        let rot = &self.0 * C64::from_polar(1.0, -theta);
        let herm = (&rot + rot.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        let (top, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let x = eig.eigenvectors.column(top).into_owned();
        let ax = &self.0 * &x;
        x.dotc(&ax)
    }
}

/// Unitary `U` and upper-triangular `T` with `U* A U = T`.
pub fn schur_2x2(a: &Matrix2) -> (Matrix2, Matrix2) {
    let (l1, _) = a.eigenvalues();
    // null vectors of A − λ₁I from each row
    let r1 = [a.a12, l1 - a.a11];
    let r2 = [l1 - a.a22, a.a21];
    let n1 = r1[0].norm_sqr() + r1[1].norm_sqr();
    let n2 = r2[0].norm_sqr() + r2[1].norm_sqr();
    let (v, n) = if n1 >= n2 { (r1, n1) } else { (r2, n2) };
    let u = if n > 0.0 {
        let n = n.sqrt();
        Matrix2::unitary_from_column(v[0] / n, v[1] / n)
    } else {
        Matrix2::identity()
    };
    let mut t = u.adjoint() * *a * u;
    t.a21 = ZERO;
    (u, t)
}

/// Classification of a 2×2 matrix by the shape of its numerical range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonicalKind {
    /// Non-degenerate ellipse: unitarily and affinely equivalent to `[[1, 2b], [0, −1]]`.
    Generic,
    /// Double eigenvalue, non-normal: a disk of radius `alpha` about `beta`.
    Disk,
    /// Normal with distinct eigenvalues: the segment `beta ± alpha`.
    Segment,
    /// `A = beta·I`.
    Scalar,
}

/// `A = beta·I + alpha · u M u*` with `M` the canonical matrix of the kind:
/// `[[1, 2b], [0, −1]]` (generic), `[[0, 2], [0, 0]]` (disk),
/// `diag(1, −1)` (segment) or `0` (scalar).
///
/// The phase of `u`'s second column is chosen so that the off-diagonal entry
/// of `M` is real and positive; this is one valid normalisation among many.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalForm {
    pub b: f64,
    pub alpha: C64,
    pub beta: C64,
    pub u: Matrix2,
    pub kind: CanonicalKind,
}

impl CanonicalForm {
    pub fn model_matrix(&self) -> Matrix2 {
        match self.kind {
            CanonicalKind::Generic => Matrix2::canonical(self.b),
            CanonicalKind::Disk => Matrix2::from_real(0.0, 2.0, 0.0, 0.0),
            CanonicalKind::Segment => Matrix2::from_real(1.0, 0.0, 0.0, -1.0),
            CanonicalKind::Scalar => Matrix2::from_real(0.0, 0.0, 0.0, 0.0),
        }
    }

    pub fn reconstruct(&self) -> Matrix2 {
        Matrix2::scalar(self.beta) + (self.u * self.model_matrix() * self.u.adjoint()).scale(self.alpha)
    }

    /// Exact boundary of the numerical range, `t ∈ [0, 2π)`.
    pub fn boundary_point(&self, t: f64) -> C64 {
        let model = match self.kind {
            CanonicalKind::Generic => C64::new(self.b.hypot(1.0) * t.cos(), self.b * t.sin()),
            CanonicalKind::Disk => C64::from_polar(1.0, t),
            CanonicalKind::Segment => C64::new(t.cos(), 0.0),
            CanonicalKind::Scalar => ZERO,
        };
        self.beta + self.alpha * model
    }
}

fn positive_phase(u: Matrix2, off_diagonal: C64) -> Matrix2 {
    let m = off_diagonal.norm();
    if m == 0.0 {
        return u;
    }
    let phase = off_diagonal.conj() / m;
    Matrix2::new(u.a11, u.a12 * phase, u.a21, u.a22 * phase)
}

/// Reduces `A` by an affine map `A ↦ (A − β)/α` and a unitary similarity.
pub fn canonicalize_2x2(a: &Matrix2) -> CanonicalForm {
    let (u, t) = schur_2x2(a);
    let (l1, l2) = (t.a11, t.a22);
    let c = t.a12;
    let scale = a.frobenius().max(f64::MIN_POSITIVE);
    let distinct = (l1 - l2).norm() >= DEGENERACY_THRESHOLD * scale;
    let coupled = c.norm() >= DEGENERACY_THRESHOLD * scale;
    let beta = (l1 + l2) / 2.0;
    match (distinct, coupled) {
        (true, true) => {
            let alpha = (l1 - l2) / 2.0;
            CanonicalForm {
                b: c.norm() / (2.0 * alpha.norm()),
                alpha,
                beta,
                u: positive_phase(u, c / alpha),
                kind: CanonicalKind::Generic,
            }
        }
        (true, false) => CanonicalForm {
            b: 0.0,
            alpha: (l1 - l2) / 2.0,
            beta,
            u,
            kind: CanonicalKind::Segment,
        },
        (false, true) => CanonicalForm {
            b: 0.0,
            alpha: C64::new(c.norm() / 2.0, 0.0),
            beta,
            u: positive_phase(u, c),
            kind: CanonicalKind::Disk,
        },
        (false, false) => CanonicalForm {
            b: 0.0,
            alpha: ONE,
            beta,
            u: Matrix2::identity(),
            kind: CanonicalKind::Scalar,
        },
    }
}

/// Boundary of `W(A)` at `m` equally spaced support directions.
pub fn nr_boundary<M: SquareMatrix>(a: &M, m: usize) -> Result<CurveSamples> {
    if m < 8 {
        return Err(Error::InvalidParameter(format!("need at least 8 directions, got {m}")));
    }
    let params: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let points = par::map_indexed(m, |k| a.support_point(params[k]));
    CurveSamples::new(params, points)
}

/// Centre, foci and semi-axes of the elliptical numerical range of a 2×2 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseParams {
    pub center: C64,
    pub focus1: C64,
    pub focus2: C64,
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl EllipseParams {
    /// Boundary point at eccentric anomaly `t`, major axis along the foci.
    pub fn boundary_point(&self, t: f64) -> C64 {
        let d = self.focus1 - self.focus2;
        let dir = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        self.center + dir * C64::new(self.semi_major * t.cos(), self.semi_minor * t.sin())
    }
}

pub fn ellipse_params_2x2(a: &Matrix2) -> EllipseParams {
    let (l1, l2) = a.eigenvalues();
    let total = a.frobenius().powi(2);
    let minor = (total - l1.norm_sqr() - l2.norm_sqr()).max(0.0).sqrt() / 2.0;
    let focal = (l1 - l2).norm() / 2.0;
    EllipseParams {
        center: (l1 + l2) / 2.0,
        focus1: l1,
        focus2: l2,
        semi_major: minor.hypot(focal),
        semi_minor: minor,
    }
}

/// `p(A)` by Horner's rule.
pub fn poly_apply<M: SquareMatrix>(p: &Polynomial, a: &M) -> M {
    let cs = p.coeffs();
    let mut acc = a.scaled_identity(cs[cs.len() - 1]);
    for &c in cs.iter().rev().skip(1) {
        acc = acc.mul_add_identity(a, c);
    }
    acc
}

/// Largest singular value: closed form for 2×2, power iteration on `M*M`
/// otherwise.
pub fn op_norm<M: SquareMatrix>(m: &M) -> Result<f64> {
    m.operator_norm()
}
