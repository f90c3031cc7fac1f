//! Conformal maps onto and from (bi-)circularly symmetric domains.
//!
//! The central object is the map `φ` of the ellipse `x²/a² + y²/b² < 1`
//! (`a² = b² + 1`, foci `±1`) onto the unit disk with `φ(0) = 0`, `φ'(0) > 0`,
//! represented by its Chebyshev series
//!
//! ```text
//! φ(z) = (2z/ρ) · exp( Σ_{n≥1} 2(−1)ⁿ T_{2n}(z) / (n(1 + ρ^{4n})) ),   ρ = a + b.
//! ```
//!
//! Alongside it live the odd quintics `z + a z³ − b z⁵`, domains generated
//! from a decreasing first-quadrant radius profile, and verifiers for the
//! Jack condition and circular / bi-circular symmetry of a map.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::numerics::{
    cheb_eval, linspace, profile_check, CurveSamples, Polynomial, ProfileMode, ProfileVerdict,
};
use crate::{par, Error, Result, C64};

/// Largest truncation order accepted for the ellipse series.
pub const MAX_SERIES_TERMS: usize = 100_000;

/// Slack used when deciding whether a point lies in the closed ellipse.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Iteration cap for [`phi_inverse`].
pub const NEWTON_MAX_ITERATIONS: usize = 100;

/// Number of angles used by [`schwarz_jack_verify`] for the Jack condition.
pub const JACK_THETA_SAMPLES: usize = 64;

/// Truncated Chebyshev series for the conformal map of the ellipse with
/// foci `±1` and semi-minor axis `b` onto the unit disk.
#[derive(Clone, Debug)]
pub struct EllipseMapSeries {
    b: f64,
    a: f64,
    rho: f64,
    eps: f64,
    /// `coeffs[n-1] = 2(−1)ⁿ / (n(1 + ρ^{4n}))`
    coeffs: Vec<f64>,
}

impl EllipseMapSeries {
    /// Builds the series for semi-minor axis `b`, keeping enough terms that the
    /// discarded tail is below `eps` everywhere on the closed ellipse.
    pub fn new(b: f64, eps: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidParameter(format!("semi-minor axis must be positive, got {b}")));
        }
        if !(eps > 0.0 && eps <= 1e-6) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1e-6], got {eps}")));
        }
        let a = b.hypot(1.0);
        let rho = a + b;
        let log_rho = rho.ln();
        // On the closed ellipse |T_{2n}(z)| ≤ (ρ^{2n} + ρ^{-2n})/2, so the n-th
        // term is at most ρ^{-2n}/n and the tail after N is below
        // ρ^{-2N} / (N (1 − ρ^{-2})).
        let q = 1.0 - (-2.0 * log_rho).exp();
        let needed = ((1.0 / (eps * q)).ln() / (2.0 * log_rho)).ceil();
        if !needed.is_finite() || needed > MAX_SERIES_TERMS as f64 {
            return Err(Error::NoConvergence { iterations: MAX_SERIES_TERMS, residual: needed });
        }
        let n_terms = (needed as usize).max(8);
        let coeffs = (1..=n_terms)
            .map(|n| {
                let nf = n as f64;
                let decay = (-4.0 * nf * log_rho).exp();
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                sign * 2.0 * decay / (nf * (1.0 + decay))
            })
            .collect();
        let series = Self { b, a, rho, eps, coeffs };
        debug_assert!(((a - b) * rho - 1.0).abs() < 1e-14 * a);
        debug_assert!(2.0 / (n_terms as f64 * rho.powf(4.0 * n_terms as f64)) < eps);
        Ok(series)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// `x²/a² + y²/b²`; at most 1 on the closed ellipse.
    pub fn ellipse_level(&self, z: C64) -> f64 {
        (z.re / self.a).powi(2) + (z.im / self.b).powi(2)
    }

    pub fn contains(&self, z: C64) -> bool {
        self.ellipse_level(z) <= 1.0 + DOMAIN_SLACK
    }

    fn check_domain(&self, z: C64) -> Result<()> {
        if self.contains(z) && z.re.is_finite() && z.im.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfDomain { re: z.re, im: z.im })
        }
    }

    /// Returns `(S(z), S'(z))` for `S(z) = Σ c_n T_{2n}(z)`, using
    /// `T_{2n}(z) = T_n(w)` with `w = 2z² − 1`.
    fn exponent(&self, z: C64) -> (C64, C64) {
        let w = 2.0 * z * z - 1.0;
        let dw = 4.0 * z;
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        // T_0, T_1 and their w-derivatives
        let (mut t_prev, mut t_cur) = (one, w);
        let (mut d_prev, mut d_cur) = (zero, one);
        let mut sum = zero;
        let mut dsum = zero;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                let t_next = 2.0 * w * t_cur - t_prev;
                let d_next = 2.0 * t_cur + 2.0 * w * d_cur - d_prev;
                t_prev = t_cur;
                t_cur = t_next;
                d_prev = d_cur;
                d_cur = d_next;
            }
            sum += c * t_cur;
            dsum += c * d_cur;
        }
        (sum, dsum * dw)
    }

    fn eval_unchecked(&self, z: C64) -> C64 {
        let (s, _) = self.exponent(z);
        z * (2.0 / self.rho) * s.exp()
    }

    fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let (s, ds) = self.exponent(z);
        let scaled = (2.0 / self.rho) * s.exp();
        (z * scaled, scaled * (1.0 + z * ds))
    }

    /// `φ'(z)` on the closed ellipse.
    pub fn derivative(&self, z: C64) -> Result<C64> {
        self.check_domain(z)?;
        Ok(self.eval_with_derivative(z).1)
    }
}

/// Scalar constants of the ellipse map: `ρ`, `φ(1)` and `φ'(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseConstants {
    pub rho: f64,
    pub phi_at_1: f64,
    pub phi_prime_at_0: f64,
}

impl EllipseConstants {
    /// The outer-radius bound `2/ρ` sitting between `φ(1)` and `φ'(0)`.
    pub fn two_over_rho(&self) -> f64 {
        2.0 / self.rho
    }
}

/// Closed-form series for `φ(1)` and `φ'(0)` and the chain
/// `0 < φ(1) ≤ 2/ρ < φ'(0)`, which is verified before returning.
pub fn ellipse_constants(b: f64, eps: f64) -> Result<EllipseConstants> {
    let series = EllipseMapSeries::new(b, eps)?;
    let rho = series.rho;
    // Σ 2(−1)ⁿ/(n(1+ρ⁴ⁿ)) and Σ 2/(n(1+ρ⁴ⁿ)), summed smallest terms first.
    let alternating: f64 = series.coeffs.iter().rev().sum();
    let positive: f64 = series.coeffs.iter().rev().map(|c| c.abs()).sum();
    let consts = EllipseConstants {
        rho,
        phi_at_1: 2.0 / rho * alternating.exp(),
        phi_prime_at_0: 2.0 / rho * positive.exp(),
    };
    let outer = consts.two_over_rho();
    if !(consts.phi_at_1 > 0.0)
        || consts.phi_at_1 > outer + 1e-12
        || consts.phi_prime_at_0 < outer - 1e-12
    {
        return Err(Error::InternalConsistency(format!(
            "expected 0 < phi(1)={} <= 2/rho={} < phi'(0)={}",
            consts.phi_at_1, outer, consts.phi_prime_at_0
        )));
    }
    Ok(consts)
}

/// `φ(z)` for `z` in the closed ellipse.
pub fn phi_eval(m: &EllipseMapSeries, z: C64) -> Result<C64> {
    m.check_domain(z)?;
    Ok(m.eval_unchecked(z))
}

/// Solves `φ(z) = w` for `|w| < 1`.
///
/// Newton's method from `w·a` with step halving to stay inside the ellipse;
/// if that stalls, falls back to continuation along `t·w`, `t ∈ (0, 1]`. One
/// extra Newton step is taken after the residual drops below `tol`.
pub fn phi_inverse(m: &EllipseMapSeries, w: C64, tol: f64) -> Result<C64> {
    if !(w.norm() < 1.0) {
        return Err(Error::OutOfDomain { re: w.re, im: w.im });
    }
    if w.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut start = w * m.a;
    let level = m.ellipse_level(start);
    if level >= 1.0 {
        start /= level.sqrt() * (1.0 + 1e-3);
    }
    newton(m, w, start, tol, NEWTON_MAX_ITERATIONS).or_else(|first| {
        const STEPS: usize = 32;
        let mut z = C64::new(0.0, 0.0);
        for k in 1..=STEPS {
            let target = w * (k as f64 / STEPS as f64);
            let step_tol = if k == STEPS { tol } else { tol.max(1e-10) };
            match newton(m, target, z, step_tol, NEWTON_MAX_ITERATIONS) {
                Ok(next) => z = next,
                Err(_) => return Err(first),
            }
        }
        Ok(z)
    })
}

fn newton(m: &EllipseMapSeries, w: C64, start: C64, tol: f64, max_iter: usize) -> Result<C64> {
    let mut z = start;
    let (mut f, mut df) = m.eval_with_derivative(z);
    let mut residual = (f - w).norm();
    let mut polished = false;
    for _ in 0..max_iter {
        if residual <= tol {
            if polished {
                return Ok(z);
            }
            polished = true;
        }
        if df.norm() == 0.0 {
            break;
        }
        let step = (f - w) / df;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = z - step * lambda;
            if m.contains(cand) {
                let (fc, dfc) = m.eval_with_derivative(cand);
                let rc = (fc - w).norm();
                if rc <= residual || polished || rc <= tol {
                    z = cand;
                    f = fc;
                    df = dfc;
                    residual = rc;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            if residual <= tol {
                return Ok(z);
            }
            break;
        }
    }
    if residual <= tol {
        return Ok(z);
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

/// The odd quintic `z + a z³ − b z⁵` with admissible coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuinticMap {
    a: f64,
    b: f64,
}

impl QuinticMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if quintic_admissible(a, b)? {
            Ok(Self { a, b })
        } else {
            Err(Error::InvalidParameter(format!(
                "quintic ({a}, {b}) violates 3a+5b<=1 or ab+4b<=a"
            )))
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::from_real(&[0.0, 1.0, 0.0, self.a, 0.0, -self.b]).expect("finite coefficients")
    }

    pub fn eval(&self, z: C64) -> C64 {
        let z2 = z * z;
        z * (1.0 + z2 * (self.a - self.b * z2))
    }
}

/// `3a + 5b ≤ 1` and `ab + 4b ≤ a`.
pub fn quintic_admissible(a: f64, b: f64) -> Result<bool> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "quintic coefficients must be positive, got ({a}, {b})"
        )));
    }
    Ok(3.0 * a + 5.0 * b <= 1.0 && a * b + 4.0 * b <= a)
}

/// Compares a central difference of `θ ↦ |f(e^{iθ})|²` (step `1e-5`) with the
/// closed form `−4 sin 2θ (a − ab − 4b cos 2θ)`. Returns `(lhs, rhs)`.
pub fn boundary_derivative_identity(q: &QuinticMap, theta: f64) -> (f64, f64) {
    const STEP: f64 = 1e-5;
    let sq = |t: f64| q.eval(C64::from_polar(1.0, t)).norm_sqr();
    let lhs = (sq(theta + STEP) - sq(theta - STEP)) / (2.0 * STEP);
    let (a, b) = (q.a, q.b);
    let rhs = -4.0 * (2.0 * theta).sin() * (a - a * b - 4.0 * b * (2.0 * theta).cos());
    (lhs, rhs)
}

/// For odd `f`, the polynomial `g` with `g(z²) = f(z)²`.
pub fn square_transform(f: &Polynomial) -> Result<Polynomial> {
    if let Some((index, magnitude)) = f.even_part_violation(1e-14) {
        return Err(Error::NotOdd { index, magnitude });
    }
    let sq = f.mul(f);
    Polynomial::new(sq.coeffs().iter().step_by(2).copied().collect())
}

/// A first-quadrant radius profile `θ ↦ R(θ)` on `[0, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfileDomain {
    thetas: Vec<f64>,
    radii: Vec<f64>,
}

impl ProfileDomain {
    /// Validates a sampled profile. The grid must be strictly increasing and
    /// span `[0, π/2]`; radii must be positive and non-increasing.
    pub fn new(thetas: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        if thetas.len() != radii.len() || thetas.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "need matching grids of at least 2 points, got {} and {}",
                thetas.len(),
                radii.len()
            )));
        }
        if thetas.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidProfile("angles must be strictly increasing".into()));
        }
        if thetas[0].abs() > 1e-12 || (thetas[thetas.len() - 1] - FRAC_PI_2).abs() > 1e-12 {
            return Err(Error::InvalidProfile("angles must span [0, pi/2]".into()));
        }
        if let Some(k) = radii.iter().position(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidProfile(format!("radius {k} is not positive")));
        }
        if let Some(k) = radii.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidProfile(format!("radius increases after sample {k}")));
        }
        Ok(Self { thetas, radii })
    }

    /// Samples `radius` at `n` equally spaced angles in `[0, π/2]`.
    pub fn from_fn(n: usize, radius: impl Fn(f64) -> f64) -> Result<Self> {
        let thetas = linspace(0.0, FRAC_PI_2, n);
        let radii = thetas.iter().map(|&t| radius(t)).collect();
        Self::new(thetas, radii)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Piecewise-linear `R(θ)` for `θ ∈ [0, π/2]`.
    pub fn radius(&self, theta: f64) -> f64 {
        let t = theta.clamp(0.0, FRAC_PI_2);
        let k = self.thetas.partition_point(|&s| s <= t).clamp(1, self.thetas.len() - 1);
        let (t0, t1) = (self.thetas[k - 1], self.thetas[k]);
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.radii[k - 1] * (1.0 - w) + self.radii[k] * w
    }
}

/// The radius profile `√(1/4 + 1/(1 + 50θ²)²)`.
pub fn example_profile_radius(theta: f64) -> f64 {
    (0.25 + (1.0 + 50.0 * theta * theta).powi(-2)).sqrt()
}

/// Boundary of the domain symmetric in both axes whose first-quadrant part is
/// `r < R(θ)`, sampled at `m` angles `2πk/m`. Points outside the first quadrant
/// are exact mirror images of first-quadrant points.
pub fn bicirc_from_profile(d: &ProfileDomain, m: usize) -> Result<CurveSamples> {
    // Fold sample k onto the first quadrant in integer arithmetic so mirrored
    // samples share the same base point bit for bit.
    let params: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
    let points = (0..m)
        .map(|k| {
            let v = (4 * k) % (2 * m);
            let folded = if v > m { 2 * m - v } else { v };
            let base = FRAC_PI_2 * folded as f64 / m as f64;
            let p = C64::from_polar(d.radius(base), base);
            let (sx, sy) = match (4 * k) / m {
                0 => (1.0, 1.0),
                1 => (-1.0, 1.0),
                2 => (-1.0, -1.0),
                _ => (1.0, -1.0),
            };
            C64::new(sx * p.re, sy * p.im)
        })
        .collect();
    CurveSamples::new(params, points)
}

/// Which symmetry [`verify_symmetry`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryMode {
    /// `|f(re^{iθ})| ≤ |f(r)|`
    Jack,
    /// Jack, `f(z̄) = conj f(z)`, and `θ ↦ |f(re^{iθ})|` non-increasing on `[0, π]`.
    Circular,
    /// `|f(ir)| ≤ |f(re^{iθ})| ≤ |f(r)|` with both axis reflections.
    Bicircular,
}

/// The individual conditions a symmetry check is made of.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryCheck {
    Jack,
    RealAxisReflection,
    Oddness,
    AngularMonotonicity,
    ImaginaryAxisMinimum,
}

/// Result of [`verify_symmetry`]: the worst violation over the grid and where
/// it occurred. A violation is the amount by which an inequality fails (or
/// the size of a reflection mismatch), so the check passes when
/// `worst_violation ≤ tol`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetryReport {
    pub mode: SymmetryMode,
    pub passed: bool,
    pub tol: f64,
    pub worst_violation: f64,
    pub worst_check: SymmetryCheck,
    pub worst_r: f64,
    pub worst_theta: f64,
    pub points_checked: usize,
}

#[derive(Clone, Copy)]
struct Worst {
    value: f64,
    check: SymmetryCheck,
    theta: f64,
}

impl Worst {
    fn update(&mut self, value: f64, check: SymmetryCheck, theta: f64) {
        if value > self.value || value.is_nan() && !self.value.is_nan() {
            *self = Worst { value, check, theta };
        }
    }
}

/// Samples `f` on the polar grid `r_grid × theta_grid` and checks the
/// requested symmetry. Violations are reported, never raised.
pub fn verify_symmetry<F>(
    f: F,
    mode: SymmetryMode,
    r_grid: &[f64],
    theta_grid: &[f64],
    tol: f64,
) -> SymmetryReport
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    // Angles in [0, π], sorted, for the monotonicity check.
    let mut upper: Vec<f64> = theta_grid.iter().copied().filter(|t| (0.0..=PI).contains(t)).collect();
    upper.sort_by(f64::total_cmp);
    upper.dedup();

    let per_radius = |i: usize| -> Option<(f64, Worst)> {
        let r = r_grid[i];
        let on_axis = f(C64::new(r, 0.0)).norm();
        let on_imag = f(C64::new(0.0, r)).norm();
        let mut worst = Worst { value: f64::NEG_INFINITY, check: SymmetryCheck::Jack, theta: 0.0 };
        for &theta in theta_grid {
            let z = C64::from_polar(r, theta);
            let fz = f(z);
            let modulus = fz.norm();
            worst.update(modulus - on_axis, SymmetryCheck::Jack, theta);
            if mode != SymmetryMode::Jack {
                let refl = (f(z.conj()) - fz.conj()).norm();
                worst.update(refl, SymmetryCheck::RealAxisReflection, theta);
            }
            if mode == SymmetryMode::Bicircular {
                let odd = (f(-z) + fz).norm();
                worst.update(odd, SymmetryCheck::Oddness, theta);
                worst.update(on_imag - modulus, SymmetryCheck::ImaginaryAxisMinimum, theta);
            }
        }
        if mode == SymmetryMode::Circular {
            let moduli: Vec<f64> = upper.iter().map(|&t| f(C64::from_polar(r, t)).norm()).collect();
            for (k, w) in moduli.windows(2).enumerate() {
                worst.update(w[1] - w[0], SymmetryCheck::AngularMonotonicity, upper[k + 1]);
            }
        }
        Some((worst.value, worst))
    };

    let points_checked = r_grid.len() * theta_grid.len();
    match par::max_by_score(r_grid.len(), per_radius) {
        Some((i, value, w)) => SymmetryReport {
            mode,
            passed: value <= tol,
            tol,
            worst_violation: value,
            worst_check: w.check,
            worst_r: r_grid[i],
            worst_theta: w.theta,
            points_checked,
        },
        None => SymmetryReport {
            mode,
            passed: true,
            tol,
            worst_violation: f64::NEG_INFINITY,
            worst_check: SymmetryCheck::Jack,
            worst_r: f64::NAN,
            worst_theta: f64::NAN,
            points_checked,
        },
    }
}

/// Result of [`schwarz_jack_verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct SchwarzJackReport {
    pub passed: bool,
    pub jack: SymmetryReport,
    /// Positive, increasing and convex verdicts for `x ↦ f(x)` on the grid.
    pub profiles: Vec<ProfileVerdict>,
    /// Largest `|Im f(x)|` on the grid.
    pub max_imag: f64,
    /// Largest grid point actually sampled.
    pub r_max: f64,
}

/// Checks the Jack condition and that `x ↦ f(x)` is positive, increasing and
/// convex on a uniform grid starting at or above 0.
pub fn schwarz_jack_verify<F>(f: F, grid: &[f64], tol: f64) -> Result<SchwarzJackReport>
where
    F: Fn(C64) -> C64 + Sync + Send,
{
    if grid.len() < 3 {
        return Err(Error::InvalidGrid("need at least 3 grid points".into()));
    }
    if grid[0] < 0.0 || grid[grid.len() - 1] >= 1.0 {
        return Err(Error::InvalidGrid("grid must lie in [0, 1)".into()));
    }
    let f0 = f(C64::new(0.0, 0.0));
    if f0.norm() > tol {
        return Err(Error::HypothesisViolated(format!("f(0) = {f0} is not 0")));
    }
    let values = par::map_indexed(grid.len(), |i| f(C64::new(grid[i], 0.0)));
    let real: Vec<f64> = values.iter().map(|v| v.re).collect();
    let max_imag = values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let profiles = [ProfileMode::Positive, ProfileMode::Increasing, ProfileMode::Convex]
        .into_iter()
        .map(|mode| profile_check(&real, grid, mode, tol))
        .collect::<Result<Vec<_>>>()?;

    let radii: Vec<f64> = grid.iter().copied().filter(|&r| r > 0.0).collect();
    let thetas: Vec<f64> =
        (0..JACK_THETA_SAMPLES).map(|k| 2.0 * PI * k as f64 / JACK_THETA_SAMPLES as f64).collect();
    let jack = verify_symmetry(&f, SymmetryMode::Jack, &radii, &thetas, tol);

    let passed = jack.passed && max_imag <= tol && profiles.iter().all(|p| p.passed);
    Ok(SchwarzJackReport { passed, jack, profiles, max_imag, r_max: grid[grid.len() - 1] })
}

/// `T_{2n}`-based closed form used in docs and tests: `φ` at a real point
/// reduces to a real series since every `T_{2n}` is real there.
pub fn phi_real_axis_series(m: &EllipseMapSeries, x: f64) -> f64 {
    let z = C64::new(x, 0.0);
    let s: f64 = m
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * cheb_eval(2 * (k + 1), z).re)
        .sum();
    2.0 * x / m.rho * s.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // b = 1, 200 terms at 30 digits
    const PHI_AT_1_B1: f64 = 0.783_042_581_444_192_9;
    const PHI_PRIME_AT_0_B1: f64 = 0.877_961_745_356_831_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fig1c() -> QuinticMap {
        QuinticMap::new(0.25, 0.05).unwrap()
    }

    /// Direct summation of the closed forms with a fixed number of terms.
    fn direct_constants(b: f64, terms: usize) -> (f64, f64) {
        let rho = (b * b + 1.0).sqrt() + b;
        let (mut alt, mut pos) = (0.0, 0.0);
        for n in (1..=terms).rev() {
            let t = 2.0 / (n as f64 * (1.0 + rho.powi(4 * n as i32)));
            alt += if n % 2 == 0 { t } else { -t };
            pos += t;
        }
        (2.0 / rho * f64::exp(alt), 2.0 / rho * f64::exp(pos))
    }

    #[test]
    fn constants_at_b1() {
        let k = ellipse_constants(1.0, 1e-16).unwrap();
        assert_abs_diff_eq!(k.rho, 1.0 + 2f64.sqrt(), epsilon = 1e-15);
        assert!(k.phi_at_1 * k.rho <= 2.0);
        let (p1, pp0) = direct_constants(1.0, 200);
        assert_abs_diff_eq!(p1, PHI_AT_1_B1, epsilon = 1e-15);
        assert_abs_diff_eq!(pp0, PHI_PRIME_AT_0_B1, epsilon = 1e-15);
        assert_abs_diff_eq!(k.phi_at_1, PHI_AT_1_B1, epsilon = 1e-15);
        assert_abs_diff_eq!(k.phi_prime_at_0, PHI_PRIME_AT_0_B1, epsilon = 1e-15);
    }

    #[test]
    fn constants_reject_bad_input() {
        assert!(matches!(ellipse_constants(0.0, 1e-12), Err(Error::InvalidParameter(_))));
        assert!(matches!(ellipse_constants(-1.0, 1e-12), Err(Error::InvalidParameter(_))));
        assert!(matches!(ellipse_constants(1.0, 1e-3), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn constants_chain_on_log_grid() {
        for k in 0..25 {
            let b = 0.05 * (400f64).powf(k as f64 / 24.0);
            let kc = ellipse_constants(b, 1e-14).unwrap();
            assert!(kc.phi_at_1 <= kc.two_over_rho() + 1e-12, "b={b}");
            assert!(kc.two_over_rho() < kc.phi_prime_at_0, "b={b}");
            let (p1, pp0) = direct_constants(b, 5000);
            assert!((kc.phi_at_1 - p1).abs() < 1e-13, "b={b}");
            assert!((kc.phi_prime_at_0 - pp0).abs() < 1e-13, "b={b}");
        }
    }

    #[test]
    fn series_truncation_bound() {
        for b in [0.01, 0.05, 1.0, 20.0] {
            for eps in [1e-6, 1e-12, 1e-16] {
                let m = EllipseMapSeries::new(b, eps).unwrap();
                let n = m.n_terms() as f64;
                assert!(m.n_terms() >= 8);
                assert!(2.0 / (n * m.rho().powf(4.0 * n)) < eps);
                assert!((m.a() * m.a() - m.b() * m.b() - 1.0).abs() < 1e-14 * m.a() * m.a());
                assert!(m.rho() > 1.0);
            }
        }
        assert!(matches!(
            EllipseMapSeries::new(1e-9, 1e-16),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn phi_basic_values() {
        let m = EllipseMapSeries::new(1.0, 1e-16).unwrap();
        assert_eq!(phi_eval(&m, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let k = ellipse_constants(1.0, 1e-16).unwrap();
        let p1 = phi_eval(&m, c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p1.re, k.phi_at_1, epsilon = 1e-12);
        assert_abs_diff_eq!(p1.im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.derivative(c(0.0, 0.0)).unwrap().re, k.phi_prime_at_0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_real_axis_series(&m, 1.0), k.phi_at_1, epsilon = 1e-12);
        assert!(matches!(phi_eval(&m, c(2.0, 0.0)), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn phi_maps_boundary_to_circle() {
        for b in [0.05, 0.3, 1.0, 5.0] {
            let m = EllipseMapSeries::new(b, 1e-15).unwrap();
            for k in 0..64 {
                let t = 2.0 * PI * k as f64 / 64.0;
                let z = c(m.a() * t.cos(), b * t.sin());
                let w = phi_eval(&m, z).unwrap();
                assert!((w.norm() - 1.0).abs() < 1e-12, "b={b} t={t} |phi|={}", w.norm());
            }
        }
    }

    #[test]
    fn phi_derivative_matches_difference_quotient() {
        let m = EllipseMapSeries::new(0.7, 1e-15).unwrap();
        let h = 1e-6;
        for z in [c(0.3, 0.2), c(-0.8, 0.1), c(0.0, 0.5)] {
            let fd = (m.eval_unchecked(z + h) - m.eval_unchecked(z - h)) / (2.0 * h);
            assert!((fd - m.derivative(z).unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn phi_is_odd_and_real_on_axis() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for b in [0.1, 1.0, 4.0] {
            let m = EllipseMapSeries::new(b, 1e-14).unwrap();
            let mut worst: f64 = 0.0;
            for _ in 0..1000 {
                let (t, s): (f64, f64) = (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..1.0f64));
                let z = c(m.a() * s.sqrt() * t.cos(), b * s.sqrt() * t.sin());
                let sum = phi_eval(&m, -z).unwrap() + phi_eval(&m, z).unwrap();
                worst = worst.max(sum.norm());
            }
            assert!(worst < 1e-12, "b={b}: {worst}");
            for x in linspace(0.0, m.a() - 0.01, 200) {
                let v = phi_eval(&m, c(x, 0.0)).unwrap();
                assert!(v.im.abs() < 1e-12);
                assert!(v.re >= 0.0 && v.re < 1.0);
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = EllipseMapSeries::new(1.0, 1e-15).unwrap();
        assert_eq!(phi_inverse(&m, c(0.0, 0.0), 1e-14).unwrap(), c(0.0, 0.0));
        let z = phi_inverse(&m, c(0.5, 0.0), 1e-14).unwrap();
        assert_abs_diff_eq!(phi_eval(&m, z).unwrap().re, 0.5, epsilon = 1e-10);
        for b in [0.05, 0.2, 1.0, 5.0] {
            let m = EllipseMapSeries::new(b, 1e-15).unwrap();
            for w in [c(0.99, 0.0), c(0.0, 0.99), c(-0.7, 0.7), c(0.3, -0.95), c(0.999, 0.0)] {
                let z = phi_inverse(&m, w, 1e-13).unwrap();
                assert!((phi_eval(&m, z).unwrap() - w).norm() <= 1e-13, "b={b} w={w}");
            }
        }
        assert!(matches!(phi_inverse(&m, c(1.0, 0.0), 1e-12), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn inverse_profile_is_convex() {
        let m = EllipseMapSeries::new(1.0, 1e-15).unwrap();
        let grid = linspace(0.0, 0.99, 500);
        let vals: Vec<f64> =
            grid.iter().map(|&x| phi_inverse(&m, c(x, 0.0), 1e-15).unwrap().re).collect();
        for mode in [ProfileMode::Positive, ProfileMode::Increasing, ProfileMode::Convex] {
            assert!(profile_check(&vals, &grid, mode, 1e-8).unwrap().passed, "{mode:?}");
        }
    }

    #[test]
    fn quintic_admissibility() {
        assert!(quintic_admissible(0.25, 0.05).unwrap());
        assert!(!quintic_admissible(1.0 / 3.0, 0.2).unwrap());
        assert!(!quintic_admissible(0.2, 0.05).unwrap());
        assert!(matches!(quintic_admissible(0.0, 0.1), Err(Error::InvalidParameter(_))));
        assert!(QuinticMap::new(0.2, 0.05).is_err());
    }

    #[test]
    fn derivative_identity_examples() {
        let q = fig1c();
        assert_eq!(boundary_derivative_identity(&q, 0.0).1, 0.0);
        assert_abs_diff_eq!(boundary_derivative_identity(&q, FRAC_PI_2).1, 0.0, epsilon = 1e-15);
        let (lhs, rhs) = boundary_derivative_identity(&q, PI / 4.0);
        assert_abs_diff_eq!(rhs, -0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-6);
    }

    #[test]
    fn derivative_identity_random_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut maps = 0;
        while maps < 20 {
            let (a, b) = (rng.gen_range(0.01..0.34), rng.gen_range(0.001..0.2));
            let Ok(q) = QuinticMap::new(a, b) else { continue };
            maps += 1;
            for _ in 0..100 {
                let (lhs, rhs) = boundary_derivative_identity(&q, rng.gen_range(0.0..FRAC_PI_2));
                assert!((lhs - rhs).abs() < 1e-6);
                assert!(rhs <= 1e-15);
            }
        }
    }

    #[test]
    fn square_transform_examples() {
        let id = Polynomial::identity();
        assert_eq!(square_transform(&id).unwrap(), id);
        let f = Polynomial::from_real(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            square_transform(&f).unwrap(),
            Polynomial::from_real(&[0.0, 1.0, 2.0, 1.0]).unwrap()
        );
        let g = square_transform(&fig1c().polynomial()).unwrap();
        // (z + z³/4 − z⁵/20)² = z² + z⁴/2 + (1/16 − 1/10) z⁶ − z⁸/40 + z¹⁰/400
        let expect = Polynomial::from_real(&[0.0, 1.0, 0.5, 1.0 / 16.0 - 0.1, -1.0 / 40.0, 1.0 / 400.0])
            .unwrap();
        for (x, y) in g.coeffs().iter().zip(expect.coeffs()) {
            assert!((x - y).norm() < 1e-16);
        }
        let z = c(0.4, 0.3);
        assert!((g.eval(z * z) - fig1c().eval(z).powi(2)).norm() < 1e-15);
        let not_odd = Polynomial::from_real(&[0.0, 1.0, 0.9]).unwrap();
        assert!(matches!(square_transform(&not_odd), Err(Error::NotOdd { index: 2, .. })));
    }

    #[test]
    fn profile_domain_boundaries() {
        let disk = ProfileDomain::from_fn(50, |_| 1.0).unwrap();
        let cv = bicirc_from_profile(&disk, 360).unwrap();
        assert!(cv.points().iter().all(|p| (p.norm() - 1.0).abs() < 1e-15));
        for (t, p) in cv.params().iter().zip(cv.points()) {
            assert!((p.arg().rem_euclid(2.0 * PI) - t).abs() < 1e-12 || p.arg().abs() < 1e-12);
        }

        let d = ProfileDomain::from_fn(400, example_profile_radius).unwrap();
        let cv = bicirc_from_profile(&d, 720).unwrap();
        assert_abs_diff_eq!(cv.points()[0].re, 1.25f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(cv.points()[180].im, example_profile_radius(FRAC_PI_2), epsilon = 1e-15);
        // exact mirror images
        for k in 1..180 {
            let p = cv.points()[k];
            assert_eq!(cv.points()[360 - k], c(-p.re, p.im));
            assert_eq!(cv.points()[360 + k], c(-p.re, -p.im));
            assert_eq!(cv.points()[720 - k], c(p.re, -p.im));
        }

        let rising = ProfileDomain::from_fn(10, |t| 1.0 + t);
        assert!(matches!(rising, Err(Error::InvalidProfile(_))));
        assert!(ProfileDomain::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(ProfileDomain::new(vec![0.0, FRAC_PI_2], vec![1.0, 0.0]).is_err());
    }

    fn grids(nr: usize, nt: usize) -> (Vec<f64>, Vec<f64>) {
        let r = (1..=nr).map(|i| i as f64 / (nr + 1) as f64).collect();
        let t = (0..nt).map(|k| 2.0 * PI * k as f64 / nt as f64).collect();
        (r, t)
    }

    #[test]
    fn symmetry_of_identity() {
        let (r, t) = grids(20, 64);
        for mode in [SymmetryMode::Jack, SymmetryMode::Circular, SymmetryMode::Bicircular] {
            let rep = verify_symmetry(|z| z, mode, &r, &t, 1e-12);
            assert!(rep.passed, "{mode:?}: {rep:?}");
        }
    }

    #[test]
    fn symmetry_of_quintics() {
        let (r, t) = grids(60, 120);
        let q = fig1c();
        let rep = verify_symmetry(|z| q.eval(z), SymmetryMode::Bicircular, &r, &t, 1e-10);
        assert!(rep.passed, "{rep:?}");
        let g = square_transform(&q.polynomial()).unwrap();
        let rep = verify_symmetry(|z| g.eval(z), SymmetryMode::Circular, &r, &t, 1e-10);
        assert!(rep.passed, "{rep:?}");
        // the quintic itself is not circularly symmetric: |f| rises again past π/2
        let rep = verify_symmetry(|z| q.eval(z), SymmetryMode::Circular, &r, &t, 1e-10);
        assert!(!rep.passed);
        assert_eq!(rep.worst_check, SymmetryCheck::AngularMonotonicity);
    }

    #[test]
    fn symmetry_detects_even_part() {
        let (r, t) = grids(20, 64);
        let rep = verify_symmetry(|z| z + 0.9 * z * z, SymmetryMode::Bicircular, &r, &t, 1e-10);
        assert!(!rep.passed);
        let f = |z: C64| z + 0.9 * z * z;
        assert!((f(c(-0.5, 0.0)) + f(c(0.5, 0.0))).norm() > 0.4);
    }

    #[test]
    fn symmetry_of_ellipse_inverse() {
        let m = EllipseMapSeries::new(0.6, 1e-14).unwrap();
        let (r, t) = grids(20, 48);
        let rep = verify_symmetry(
            |w| phi_inverse(&m, w, 1e-14).unwrap(),
            SymmetryMode::Bicircular,
            &r,
            &t,
            1e-10,
        );
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn schwarz_jack_examples() {
        let grid = linspace(0.0, 0.99, 200);
        let rep = schwarz_jack_verify(|z| z, &grid, 1e-8).unwrap();
        assert!(rep.passed);
        assert!(rep.profiles[2].min_margin.abs() < 1e-10);

        let q = fig1c();
        let rep = schwarz_jack_verify(|z| q.eval(z), &grid, 1e-8).unwrap();
        assert!(rep.passed, "{rep:?}");

        let m = EllipseMapSeries::new(1.0, 1e-15).unwrap();
        let grid = linspace(0.0, 0.999, 2000);
        let rep = schwarz_jack_verify(|w| phi_inverse(&m, w, 1e-15).unwrap(), &grid, 1e-8).unwrap();
        assert!(rep.passed, "{rep:?}");

        assert!(matches!(
            schwarz_jack_verify(|z| z + 0.5, &linspace(0.0, 0.9, 10), 1e-8),
            Err(Error::HypothesisViolated(_))
        ));
    }
}
