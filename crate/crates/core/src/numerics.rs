//! Scalar, polynomial, Chebyshev and sampling primitives shared by the rest of
//! the crate.

use std::f64::consts::PI;
use std::fmt;

use crate::{Error, Result, C64};

/// Number of golden-section iterations used when refining a maximum.
pub const GOLDEN_ITERATIONS: usize = 60;

/// Default slack for [`profile_check`].
pub const DEFAULT_PROFILE_TOL: f64 = 1e-8;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A complex polynomial `c₀ + c₁z + … + c_d z^d`.
///
/// Trailing zero coefficients are dropped on construction, so the last stored
/// coefficient is nonzero unless the polynomial is the zero polynomial, which
/// is stored as the single coefficient `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("empty coefficient list".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !finite(*c)) {
            return Err(Error::InvalidPolynomial(format!("coefficient {k} is not finite")));
        }
        while coeffs.len() > 1 && *coeffs.last().unwrap() == C64::new(0.0, 0.0) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0)] }
    }

    pub fn constant(c: C64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self { coeffs: vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)] }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C64::new(0.0, 0.0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        poly_eval(self, z)
    }

    pub fn derivative(&self) -> Self {
        poly_derivative(self)
    }

    /// Largest even-index coefficient magnitude and its index, if any exceeds `tol`.
    pub fn even_part_violation(&self, tol: f64) -> Option<(usize, f64)> {
        self.coeffs
            .iter()
            .enumerate()
            .step_by(2)
            .map(|(k, c)| (k, c.norm()))
            .filter(|&(_, m)| m > tol)
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Product of two polynomials (coefficient convolution).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out).expect("product of finite polynomials")
    }

    /// `p((z − shift)/scale)`, expanded back into monomial coefficients.
    pub fn compose_affine(&self, scale: C64, shift: C64) -> Result<Self> {
        if scale.norm() == 0.0 {
            return Err(Error::InvalidParameter("affine scale must be nonzero".into()));
        }
        let inner = Self::new(vec![-shift / scale, C64::new(1.0, 0.0) / scale])?;
        let mut acc = Self::constant(*self.coeffs.last().unwrap());
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc.mul(&inner);
            let mut cs = acc.coeffs;
            cs[0] += c;
            acc = Self::new(cs)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == C64::new(0.0, 0.0) && !self.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Chebyshev polynomial `T_n(z)` by the three-term recurrence.
pub fn cheb_eval(n: usize, z: C64) -> C64 {
    let mut prev = C64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = z;
    for _ in 1..n {
        let next = 2.0 * z * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Horner evaluation of `p` at `z`.
pub fn poly_eval(p: &Polynomial, z: C64) -> C64 {
    p.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c)
}

pub fn poly_derivative(p: &Polynomial) -> Polynomial {
    if p.coeffs.len() == 1 {
        return Polynomial::zero();
    }
    let coeffs = p.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    Polynomial::new(coeffs).expect("derivative of a finite polynomial")
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n).map(|i| if i == n - 1 { b } else { a + h * i as f64 }).collect()
        }
    }
}

/// An ordered sampling of a curve: `(parameter, point)` pairs with strictly
/// increasing parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSamples {
    params: Vec<f64>,
    points: Vec<C64>,
}

impl CurveSamples {
    pub fn new(params: Vec<f64>, points: Vec<C64>) -> Result<Self> {
        if params.len() != points.len() {
            return Err(Error::InvalidCurve(format!(
                "{} parameters but {} points",
                params.len(),
                points.len()
            )));
        }
        if params.len() < 3 {
            return Err(Error::InvalidCurve("need at least 3 samples".into()));
        }
        if params.iter().any(|t| !t.is_finite()) || points.iter().any(|z| !finite(*z)) {
            return Err(Error::InvalidCurve("non-finite sample".into()));
        }
        if params.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidCurve("parameters must be strictly increasing".into()));
        }
        Ok(Self { params, points })
    }

    /// Samples `f(θ_k)` at `θ_k = 2πk/m`, `k = 0..m`.
    pub fn from_angle_fn(m: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        let params: Vec<f64> = (0..m).map(|k| 2.0 * PI * k as f64 / m as f64).collect();
        let points = params.iter().map(|&t| f(t)).collect();
        Self::new(params, points)
    }

    pub fn circle(radius: f64, m: usize) -> Result<Self> {
        Self::from_angle_fn(m, |t| C64::from_polar(radius, t))
    }

    /// The ellipse `x²/a² + y²/b² = 1` traced as `a cos t + i b sin t`.
    pub fn ellipse(a: f64, b: f64, m: usize) -> Result<Self> {
        Self::from_angle_fn(m, |t| C64::new(a * t.cos(), b * t.sin()))
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Piecewise-linear interpolation in the parameter, clamped to the ends.
    pub fn interpolate(&self, t: f64) -> C64 {
        let n = self.params.len();
        if t <= self.params[0] {
            return self.points[0];
        }
        if t >= self.params[n - 1] {
            return self.points[n - 1];
        }
        let k = self.params.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.params[k], self.params[k + 1]);
        let w = (t - t0) / (t1 - t0);
        self.points[k] * (1.0 - w) + self.points[k + 1] * w
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(x0, y0, x1, y1), z| (x0.min(z.re), y0.min(z.im), x1.max(z.re), y1.max(z.im)),
        )
    }
}

/// Maximises `g` on `[lo, hi]` by golden-section search; returns `(argmax, max)`.
pub fn golden_max(lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_GOLDEN * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_GOLDEN * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Maximum of `|p|` over the samples of `curve`; with `refine`, a golden-section
/// search on the piecewise-linear curve around the best sample.
///
/// Returns `(max |p|, parameter attaining it)`.
pub fn max_modulus_on_curve(p: &Polynomial, curve: &CurveSamples, refine: bool) -> (f64, f64) {
    max_modulus_on_path(p, curve, |t| curve.interpolate(t), refine)
}

/// As [`max_modulus_on_curve`], but refinement evaluates the exact curve
/// `path(t)` between samples instead of interpolating.
pub fn max_modulus_on_path(
    p: &Polynomial,
    curve: &CurveSamples,
    path: impl Fn(f64) -> C64,
    refine: bool,
) -> (f64, f64) {
    let (k, best) = curve
        .points
        .iter()
        .map(|&z| p.eval(z).norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let t_best = curve.params[k];
    if !refine {
        return (best, t_best);
    }
    let n = curve.params.len();
    let lo = curve.params[k.saturating_sub(1)];
    let hi = curve.params[(k + 1).min(n - 1)];
    let (t, v) = golden_max(lo, hi, |t| p.eval(path(t)).norm());
    if v > best {
        (v, t)
    } else {
        (best, t_best)
    }
}

/// Shape property checked by [`profile_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileMode {
    Positive,
    Increasing,
    Convex,
    Concave,
}

/// Outcome of a discrete profile check.
///
/// `min_margin` is the smallest observed value of the checked quantity: the
/// value itself (positive), first difference (increasing), second difference
/// over `h²` (convex), or minus that (concave). Strict versions of these
/// properties cannot be certified by sampling; the margin is reported so a
/// reader can judge strictness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileVerdict {
    pub mode: ProfileMode,
    pub passed: bool,
    pub min_margin: f64,
    pub worst_index: usize,
}

fn uniform_step(grid: &[f64]) -> Result<f64> {
    let n = grid.len();
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    if !(h > 0.0) {
        return Err(Error::InvalidGrid("grid must be increasing".into()));
    }
    for (i, w) in grid.windows(2).enumerate() {
        if ((w[1] - w[0]) - h).abs() > 1e-6 * h {
            return Err(Error::InvalidGrid(format!("non-uniform step at index {i}")));
        }
    }
    Ok(h)
}

/// Checks a sampled function against one shape property.
///
/// `values[i]` is the sample at `grid[i]`. Positivity ignores the first sample
/// (profiles of maps fixing the origin start at 0). Convexity and concavity
/// use second differences with slack `tol·h²` and require a uniform grid.
pub fn profile_check(
    values: &[f64],
    grid: &[f64],
    mode: ProfileMode,
    tol: f64,
) -> Result<ProfileVerdict> {
    if values.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} values on a grid of {} points",
            values.len(),
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("grid must be strictly increasing".into()));
    }
    let fold_min = |it: &mut dyn Iterator<Item = (usize, f64)>| {
        it.fold((0usize, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc })
    };
    let (worst_index, min_margin, threshold) = match mode {
        ProfileMode::Positive => {
            let (i, m) = fold_min(&mut values.iter().copied().enumerate().skip(1));
            (i, m, -tol)
        }
        ProfileMode::Increasing => {
            let (i, m) = fold_min(&mut values.windows(2).map(|w| w[1] - w[0]).enumerate());
            (i, m, -tol)
        }
        ProfileMode::Convex | ProfileMode::Concave => {
            if grid.len() < 3 {
                return Err(Error::InvalidGrid("need at least 3 points for curvature".into()));
            }
            let h = uniform_step(grid)?;
            let sign = if mode == ProfileMode::Convex { 1.0 } else { -1.0 };
            let (i, m) = fold_min(
                &mut values
                    .windows(3)
                    .map(|w| sign * (w[2] - 2.0 * w[1] + w[0]) / (h * h))
                    .enumerate(),
            );
            (i + 1, m, -tol)
        }
    };
    Ok(ProfileVerdict {
        mode,
        passed: values.len() < 2 || min_margin >= threshold,
        min_margin,
        worst_index,
    })
}
