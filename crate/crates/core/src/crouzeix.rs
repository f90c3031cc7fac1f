//! The 2×2 Crouzeix bound, numerically.
//!
//! For the canonical matrix `A = [[1, 2b], [0, −1]]` with elliptical numerical
//! range, [`verify_cp_bound`] evaluates `φ(A)`, the Cauchy-transform matrix
//! `ψ(A)`, and every scalar inequality the bound `‖φ(A)‖ ≤ 2` rests on.
//! [`crouzeix_ratio`] and [`ratio_search`] probe `‖p(A)‖ / max_{W(A)} |p|`
//! for arbitrary 2×2 matrices.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conformal::{ellipse_constants, phi_eval, EllipseConstants, EllipseMapSeries};
use crate::matrices::{
    canonicalize_2x2, nr_boundary, op_norm, poly_apply, CanonicalForm, CanonicalKind, Matrix2,
    SquareMatrix,
};
use crate::numerics::{max_modulus_on_path, CurveSamples, Polynomial};
use crate::{par, Error, Result, C64};

/// Series tolerance used for boundary evaluations of `φ` in the Cauchy
/// transform.
pub const CAUCHY_SERIES_EPS: f64 = 1e-15;

/// Coordinate-descent steps per restart in [`ratio_search`].
pub const SEARCH_STEPS: usize = 500;

/// Boundary samples used by [`ratio_search`].
pub const SEARCH_BOUNDARY_POINTS: usize = 360;

/// One named inequality or identity with its margin (positive is good).
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
}

impl Check {
    fn at_most(name: &'static str, lhs: f64, rhs: f64, slack: f64) -> Self {
        Self { name, passed: lhs <= rhs + slack, margin: rhs - lhs }
    }

    fn strictly_less(name: &'static str, lhs: f64, rhs: f64) -> Self {
        Self { name, passed: lhs < rhs, margin: rhs - lhs }
    }

    fn near(name: &'static str, error: f64, tol: f64) -> Self {
        Self { name, passed: error <= tol, margin: tol - error }
    }
}

/// All quantities and checks for the canonical matrix with parameter `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofReport {
    pub b: f64,
    pub rho: f64,
    pub phi1: f64,
    pub phip0: f64,
    /// `‖φ(A) + ψ(A)*‖`
    pub cp_norm: f64,
    /// `‖φ(A)‖`
    pub phi_norm: f64,
    /// `1 − φ(1)/φ'(0)`, the scalar with `ψ(A)φ(A) = product_scalar · I`.
    pub product_scalar: f64,
    pub checks: Vec<Check>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `φ(A) = φ(1)·A` and `ψ(A) = φ(A)⁻¹ − A⁻¹/φ'(0)` for `A = [[1, 2b], [0, −1]]`.
pub fn phi_psi_of_a(b: f64, eps: f64) -> Result<(Matrix2, Matrix2)> {
    let k = ellipse_constants(b, eps)?;
    Ok(phi_psi_from_constants(b, &k))
}

fn phi_psi_from_constants(b: f64, k: &EllipseConstants) -> (Matrix2, Matrix2) {
    let a = Matrix2::canonical(b);
    let phi_a = a.scale(C64::new(k.phi_at_1, 0.0));
    let a_inv = a.inverse().expect("det = -1");
    let phi_inv = phi_a.inverse().expect("phi(1) > 0");
    let psi_a = phi_inv - a_inv.scale(C64::new(1.0 / k.phi_prime_at_0, 0.0));
    (phi_a, psi_a)
}

/// Evaluates the whole pipeline for one `b`; failed checks are recorded, not
/// raised.
pub fn verify_cp_bound(b: f64, eps: f64) -> Result<ProofReport> {
    let k = ellipse_constants(b, eps)?;
    let (phi_a, psi_a) = phi_psi_from_constants(b, &k);
    let cp_norm = op_norm(&(phi_a + psi_a.adjoint()))?;
    let phi_norm = op_norm(&phi_a)?;
    let product_scalar = 1.0 - k.phi_at_1 / k.phi_prime_at_0;
    let product_error =
        (psi_a * phi_a).max_abs_diff(&Matrix2::scalar(C64::new(product_scalar, 0.0)));
    let two_over_rho = k.two_over_rho();

    let checks = vec![
        Check::at_most("phi(1) <= phi'(0)", k.phi_at_1, k.phi_prime_at_0, 1e-12),
        Check::at_most("phi(1) <= 2/rho", k.phi_at_1, two_over_rho, 1e-12),
        Check::strictly_less("2/rho < phi'(0)", two_over_rho, k.phi_prime_at_0),
        Check::near("psi(A)phi(A) = (1 - phi(1)/phi'(0)) I", product_error, 1e-12),
        Check::at_most("||phi(A) + psi(A)*|| <= 2", cp_norm, 2.0, 1e-8),
        Check::near("||phi(A)|| = phi(1) rho", (phi_norm - k.phi_at_1 * k.rho).abs(), 1e-10),
        Check::at_most("||phi(A)|| <= 2", phi_norm, 2.0, 1e-10),
        Check::at_most(
            "||phi(A)||^2 + 2(1 - phi(1)/phi'(0)) <= 4",
            phi_norm * phi_norm + 2.0 * product_scalar,
            4.0,
            1e-8,
        ),
    ];
    Ok(ProofReport {
        b,
        rho: k.rho,
        phi1: k.phi_at_1,
        phip0: k.phi_prime_at_0,
        cp_norm,
        phi_norm,
        product_scalar,
        checks,
    })
}

/// `1/φ(z) − 1/(φ'(0) z)`, extended by 0 at the origin.
pub fn psi_closed_form(m: &EllipseMapSeries, phi_prime_at_0: f64, z: C64) -> Result<C64> {
    if z.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    Ok(1.0 / phi_eval(m, z)? - 1.0 / (phi_prime_at_0 * z))
}

/// Trapezoidal approximation of `(1/2πi) ∮ conj(φ(ζ)) / (ζ − z) dζ` over the
/// ellipse `ζ(t) = a cos t + i b sin t` with `m_nodes` equally spaced nodes.
pub fn cauchy_transform_numeric(b: f64, z: C64, m_nodes: usize) -> Result<C64> {
    if m_nodes < 64 {
        return Err(Error::InvalidParameter(format!("need at least 64 nodes, got {m_nodes}")));
    }
    let m = EllipseMapSeries::new(b, CAUCHY_SERIES_EPS)?;
    if !(m.ellipse_level(z) < 1.0) {
        return Err(Error::OutOfDomain { re: z.re, im: z.im });
    }
    let a = m.a();
    let terms = par::map_indexed(m_nodes, |k| -> Result<C64> {
        let t = 2.0 * PI * k as f64 / m_nodes as f64;
        let (s, c) = t.sin_cos();
        let zeta = C64::new(a * c, b * s);
        let dzeta = C64::new(-a * s, b * c);
        Ok(phi_eval(&m, zeta)?.conj() / (zeta - z) * dzeta)
    });
    let mut sum = C64::new(0.0, 0.0);
    for t in terms {
        sum += t?;
    }
    let h = 2.0 * PI / m_nodes as f64;
    Ok(sum * h / C64::new(0.0, 2.0 * PI))
}

/// Precomputed boundary of `W(A)` for repeated ratio evaluations.
#[derive(Clone, Debug)]
pub struct RatioEvaluator {
    matrix: Matrix2,
    form: CanonicalForm,
    boundary: CurveSamples,
}

impl RatioEvaluator {
    pub fn new(a: &Matrix2, m_boundary: usize) -> Result<Self> {
        let form = canonicalize_2x2(a);
        let boundary = match form.kind {
            CanonicalKind::Scalar => return Err(Error::DegenerateRange),
            CanonicalKind::Generic => nr_boundary(a, m_boundary)?,
            CanonicalKind::Disk | CanonicalKind::Segment => {
                if m_boundary < 8 {
                    return Err(Error::InvalidParameter("need at least 8 boundary points".into()));
                }
                CurveSamples::from_angle_fn(m_boundary, |t| form.boundary_point(t))?
            }
        };
        Ok(Self { matrix: *a, form, boundary })
    }

    pub fn boundary(&self) -> &CurveSamples {
        &self.boundary
    }

    pub fn form(&self) -> &CanonicalForm {
        &self.form
    }

    /// `max_{W(A)} |p|` with golden-section refinement on the exact boundary.
    pub fn max_on_range(&self, p: &Polynomial) -> f64 {
        let (max, _) = match self.form.kind {
            CanonicalKind::Generic => {
                max_modulus_on_path(p, &self.boundary, |t| self.matrix.support_point(t), true)
            }
            _ => max_modulus_on_path(p, &self.boundary, |t| self.form.boundary_point(t), true),
        };
        max
    }

    pub fn ratio(&self, p: &Polynomial) -> Result<f64> {
        if p.is_zero() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        let num = op_norm(&poly_apply(p, &self.matrix))?;
        let den = self.max_on_range(p);
        if den == 0.0 {
            // p vanishes on W(A); only possible for a segment with p's roots at its ends
            return Ok(if num == 0.0 { 0.0 } else { f64::INFINITY });
        }
        Ok(num / den)
    }
}

/// `‖p(A)‖ / max_{W(A)} |p|`.
pub fn crouzeix_ratio(a: &Matrix2, p: &Polynomial, m_boundary: usize) -> Result<f64> {
    if p.is_zero() {
        return Err(Error::InvalidPolynomial("zero polynomial".into()));
    }
    RatioEvaluator::new(a, m_boundary)?.ratio(p)
}

/// Best polynomial found by [`ratio_search`].
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub matrix: Matrix2,
    pub degree: usize,
    pub best_ratio: f64,
    /// Scaled so that `max_{W(A)} |p| = 1`, hence `‖p(A)‖ = best_ratio`.
    pub best_poly: Polynomial,
    pub evaluations: usize,
    pub seed: u64,
}

fn restart_rng(seed: u64, degree: usize, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((degree as u64) << 32) | restart as u64);
    rng
}

fn monic(lower: &[f64]) -> Polynomial {
    let mut cs: Vec<C64> = lower.chunks(2).map(|p| C64::new(p[0], p[1])).collect();
    cs.push(C64::new(1.0, 0.0));
    Polynomial::new(cs).expect("finite coefficients")
}

/// Coordinate descent over the real and imaginary parts of the lower
/// coefficients of a monic polynomial of the given degree.
fn local_search(eval: &RatioEvaluator, degree: usize, mut rng: ChaCha8Rng) -> (f64, Vec<f64>, usize) {
    let dims = 2 * degree;
    let mut x: Vec<f64> = (0..dims).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let score = |x: &[f64]| eval.ratio(&monic(x)).ok().filter(|r| r.is_finite()).unwrap_or(0.0);
    let mut best = score(&x);
    let mut evaluations = 1;
    let mut step = 0.5;
    let mut improved_this_sweep = false;
    for s in 0..SEARCH_STEPS {
        let j = s % dims;
        let mut moved = false;
        for dir in [1.0, -1.0] {
            let mut trial = x.clone();
            trial[j] += dir * step;
            let v = score(&trial);
            evaluations += 1;
            if v > best {
                best = v;
                x = trial;
                moved = true;
                break;
            }
        }
        improved_this_sweep |= moved;
        if j == dims - 1 {
            if !improved_this_sweep {
                step *= 0.5;
            }
            improved_this_sweep = false;
        }
    }
    (best, x, evaluations)
}

/// Searches for a polynomial of degree at most `degree` maximising the
/// Crouzeix ratio of `a`.
///
/// Every degree `k ≤ degree` is searched with `restarts` random starts keyed
/// by `(seed, k, restart)`, so the result for a given seed is deterministic,
/// independent of thread count, and non-decreasing in `degree`. The ratio is
/// a lower bound for the supremum over all polynomials.
pub fn ratio_search(a: &Matrix2, degree: usize, restarts: usize, seed: u64) -> Result<RatioReport> {
    if restarts == 0 {
        return Err(Error::InvalidParameter("need at least one restart".into()));
    }
    let eval = RatioEvaluator::new(a, SEARCH_BOUNDARY_POINTS)?;
    let one = Polynomial::constant(C64::new(1.0, 0.0));
    let mut best_ratio = eval.ratio(&one)?;
    let mut best_poly = one;
    let mut evaluations = 1;
    for k in 1..=degree {
        let runs = par::map_indexed(restarts, |r| local_search(&eval, k, restart_rng(seed, k, r)));
        for (ratio, x, n) in runs {
            evaluations += n;
            if ratio > best_ratio {
                best_ratio = ratio;
                best_poly = monic(&x);
            }
        }
    }
    let scale = eval.max_on_range(&best_poly);
    let best_poly = Polynomial::new(best_poly.coeffs().iter().map(|c| c / scale).collect())?;
    Ok(RatioReport { matrix: *a, degree, best_ratio, best_poly, evaluations, seed })
}
