//! Deterministic quadrature: Gauss–Legendre lines, product and distance-graded
//! sphere rules, ball rules (plain and centred at an interior point), and
//! truncated half-line rules.
//!
//! Every reduction runs in a fixed index order through [`KahanSum`], so a rule
//! applied to the same integrand always returns the same bits.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, BallPoint, Vec3};

/// Largest supported Gauss–Legendre order.
pub const MAX_GL_ORDER: usize = 512;

/// Below this distance from the origin the graded sphere rule falls back to the
/// plain product rule; the plain rule is already spectrally accurate there.
pub const GRADED_MIN_RADIUS: f64 = 0.05;

/// Split budget of [`adaptive_integrate`].
pub const ADAPTIVE_MAX_PANELS: usize = 20_000;

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

impl std::iter::Sum<f64> for KahanSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::new();
        for x in iter {
            k.add(x);
        }
        k
    }
}

/// A one-dimensional rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre rule with `n` points, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<Rule1D> {
    if n == 0 || n > MAX_GL_ORDER {
        return Err(Error::Domain(format!(
            "Gauss-Legendre order {n} outside 1..={MAX_GL_ORDER}"
        )));
    }
    if n == 1 {
        return Ok(Rule1D {
            nodes: vec![0.0],
            weights: vec![2.0],
        });
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n / 2 {
        // Chebyshev-like initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_with_derivative(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    Ok(Rule1D { nodes, weights })
}

impl Rule1D {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights affinely mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b)
            .map(|(x, w)| w * f(x))
            .sum::<KahanSum>()
            .value()
    }
}

/// Composite Gauss–Legendre over consecutive panels `edges[i]..edges[i+1]`.
pub fn composite_integrate<F: FnMut(f64) -> f64>(rule: &Rule1D, edges: &[f64], mut f: F) -> f64 {
    let mut acc = KahanSum::new();
    for pair in edges.windows(2) {
        for (x, w) in rule.mapped(pair[0], pair[1]) {
            acc.add(w * f(x));
        }
    }
    acc.value()
}

/// Panel edges covering `[a, b]` with widths at most `max_width`, always
/// including every point of `breaks` that falls strictly inside.
pub fn panel_edges(a: f64, b: f64, max_width: f64, breaks: &[f64]) -> Vec<f64> {
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&t| t > a && t < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.push(b);
    let mut lo = a;
    for hi in inner {
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        for k in 1..=pieces {
            cuts.push(if k == pieces {
                hi
            } else {
                lo + (hi - lo) * k as f64 / pieces as f64
            });
        }
        lo = hi;
    }
    cuts
}

/// Adaptive bisection with a 10-point Gauss–Legendre panel; a panel is accepted
/// when it and its two halves agree to its share of `tol` (absolute) or to a
/// about 1e-13 of the panel value. At most [`ADAPTIVE_MAX_PANELS`] panels are split.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let rule = gauss_legendre(10).expect("order 10 is valid");
    let mut total = KahanSum::new();
    let mut stack = vec![(a, b, rule.integrate(a, b, f))];
    let mut splits = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        let m = 0.5 * (lo + hi);
        let left = rule.integrate(lo, m, f);
        let right = rule.integrate(m, hi, f);
        let share = tol * (hi - lo) / (b - a);
        let floor = 1024.0 * f64::EPSILON * (left.abs() + right.abs());
        if (left + right - whole).abs() <= share.max(floor) || splits >= ADAPTIVE_MAX_PANELS {
            total.add(left + right);
        } else {
            splits += 1;
            stack.push((m, hi, right));
            stack.push((lo, m, left));
        }
    }
    total.value()
}

/// Quadrature on the unit sphere; weights sum to `4 pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub directions: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Gauss–Legendre in `cos(theta)` times the trapezoid rule in `phi`.
    pub fn product(n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::product_about(n_theta, n_phi, &[0.0, 0.0, 1.0])
    }

    /// Product rule whose polar axis is the unit vector `axis`.
    pub fn product_about(n_theta: usize, n_phi: usize, axis: &Vec3) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::Domain(
                "sphere rule needs n_theta, n_phi >= 2".into(),
            ));
        }
        let gl = gauss_legendre(n_theta)?;
        let t_w: Vec<(f64, f64)> = gl.mapped(-1.0, 1.0).collect();
        Ok(Self::assemble(&t_w, n_phi, axis))
    }

    /// Sphere rule adapted to integrands that peak like a power of `|c - y|`
    /// for an interior centre `c`.
    ///
    /// The polar variable is `s = |c - y|` on `[1 - |c|, 1 + |c|]` (Gauss–Legendre
    /// with `n_s` points, `d(cos theta) = s ds / |c|`), the azimuth is trapezoidal.
    /// Every integrand in the identity suite is a polynomial in `s` times a power
    /// of `1/s` in these variables, so the rule converges spectrally up to `|c| -> 1`.
    pub fn graded(center: &Vec3, n_s: usize, n_phi: usize) -> Result<Self> {
        let r = geometry::norm(center);
        if r >= 1.0 {
            return Err(Error::Domain(
                "graded sphere rule needs an interior centre".into(),
            ));
        }
        if r < GRADED_MIN_RADIUS {
            return Self::product(n_s, n_phi);
        }
        if n_s < 2 || n_phi < 2 {
            return Err(Error::Domain("sphere rule needs n_s, n_phi >= 2".into()));
        }
        let axis = geometry::scale(1.0 / r, center);
        let gl = gauss_legendre(n_s)?;
        let t_w: Vec<(f64, f64)> = gl
            .mapped(1.0 - r, 1.0 + r)
            .map(|(s, w)| ((1.0 + r * r - s * s) / (2.0 * r), w * s / r))
            .collect();
        Ok(Self::assemble(&t_w, n_phi, &axis))
    }

    fn assemble(t_w: &[(f64, f64)], n_phi: usize, axis: &Vec3) -> Self {
        let (u, v) = geometry::orthonormal_frame(axis);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut directions = Vec::with_capacity(t_w.len() * n_phi);
        let mut weights = Vec::with_capacity(t_w.len() * n_phi);
        for &(t, w) in t_w {
            let t = t.clamp(-1.0, 1.0);
            let st = (1.0 - t * t).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = dphi * j as f64;
                let (sp, cp) = phi.sin_cos();
                let d = [
                    t * axis[0] + st * (cp * u[0] + sp * v[0]),
                    t * axis[1] + st * (cp * u[1] + sp * v[1]),
                    t * axis[2] + st * (cp * u[2] + sp * v[2]),
                ];
                directions.push(d);
                weights.push(w * dphi);
            }
        }
        SphereRule {
            directions,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate<F: FnMut(&Vec3) -> f64>(&self, mut f: F) -> f64 {
        self.directions
            .iter()
            .zip(&self.weights)
            .map(|(d, &w)| w * f(d))
            .sum::<KahanSum>()
            .value()
    }

    /// Like [`integrate`](Self::integrate) but hands the integrand a boundary [`BallPoint`].
    pub fn integrate_boundary<F: FnMut(&BallPoint) -> f64>(&self, mut f: F) -> f64 {
        self.integrate(|d| f(&BallPoint::new(*d).expect("unit direction")))
    }
}

/// A product rule `r^2 dr x d(sigma)` on the unit ball.
#[derive(Debug, Clone)]
pub struct BallRule {
    pub points: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn product(radial_n: usize, sphere: &SphereRule) -> Result<Self> {
        let gl = gauss_legendre(radial_n)?;
        let mut points = Vec::with_capacity(radial_n * sphere.len());
        let mut weights = Vec::with_capacity(radial_n * sphere.len());
        for (r, wr) in gl.mapped(0.0, 1.0) {
            for (d, &wd) in sphere.directions.iter().zip(&sphere.weights) {
                points.push(geometry::scale(r, d));
                weights.push(wr * r * r * wd);
            }
        }
        Ok(BallRule { points, weights })
    }

    /// Spherical coordinates centred at the interior point `center`: each
    /// direction `omega` runs from `center` to the sphere, and the `t^2`
    /// Jacobian absorbs integrable `1/|y - center|` singularities.
    pub fn centered(center: &Vec3, radial_n: usize, sphere: &SphereRule) -> Result<Self> {
        let c2 = geometry::dot(center, center);
        if c2 >= 1.0 {
            return Err(Error::Domain(
                "centred ball rule needs an interior centre".into(),
            ));
        }
        let gl = gauss_legendre(radial_n)?;
        let mut points = Vec::with_capacity(radial_n * sphere.len());
        let mut weights = Vec::with_capacity(radial_n * sphere.len());
        for (d, &wd) in sphere.directions.iter().zip(&sphere.weights) {
            let cd = geometry::dot(center, d);
            let t_max = -cd + (cd * cd + 1.0 - c2).sqrt();
            for (t, wt) in gl.mapped(0.0, t_max) {
                points.push(geometry::add(center, &geometry::scale(t, d)));
                weights.push(wd * wt * t * t);
            }
        }
        Ok(BallRule { points, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().copied().sum::<KahanSum>().value()
    }

    /// Integrates `f`, failing on the first non-finite value.
    pub fn integrate<F: FnMut(&Vec3) -> f64>(&self, mut f: F) -> Result<f64> {
        let mut acc = KahanSum::new();
        for (p, &w) in self.points.iter().zip(&self.weights) {
            let val = f(p);
            if !val.is_finite() {
                return Err(Error::NonFinite { point: p.to_vec() });
            }
            acc.add(w * val);
        }
        Ok(acc.value())
    }
}

pub fn ball_integral<F: FnMut(&Vec3) -> f64>(
    f: F,
    radial_n: usize,
    sphere: &SphereRule,
) -> Result<f64> {
    BallRule::product(radial_n, sphere)?.integrate(f)
}

/// Result of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinedValue {
    pub value: f64,
    /// Difference between the two finest levels.
    pub diff: f64,
    pub levels: usize,
}

/// Integral over `B1` of a field with at most a `1/|y - x|` singularity at `x`.
///
/// Level `k` uses `8 * 2^k` radial points and an `(8 * 2^k) x (16 * 2^k)`
/// sphere rule; the result is the finest level, and the call fails when the
/// two finest levels differ by more than `tol`.
pub fn ball_integral_centered<F: FnMut(&Vec3) -> f64>(
    x: &BallPoint,
    mut g: F,
    levels: usize,
    tol: f64,
) -> Result<RefinedValue> {
    if levels < 2 {
        return Err(Error::Domain(
            "refinement study needs at least two levels".into(),
        ));
    }
    let mut prev = f64::NAN;
    let mut value = f64::NAN;
    for k in 0..levels {
        let n = 8usize << k;
        let sphere = SphereRule::product(n, 2 * n)?;
        let rule = BallRule::centered(x.coords(), n, &sphere)?;
        prev = value;
        value = rule.integrate(&mut g)?;
    }
    let diff = (value - prev).abs();
    if diff > tol {
        return Err(Error::QuadratureNonConvergence { diff, tol });
    }
    Ok(RefinedValue {
        value,
        diff,
        levels,
    })
}

/// Exponential envelope `|g(rho)| <= bound * exp(-rate * rho)` declared by the caller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub bound: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfLineIntegral {
    pub value: f64,
    /// Analytic bound on the discarded tail `int_{rho_max}^inf |g|`.
    pub tail_bound: f64,
}

impl HalfLineIntegral {
    /// Whether the discarded tail exceeds `tol`.
    pub fn tail_warning(&self, tol: f64) -> Option<String> {
        (self.tail_bound > tol).then(|| {
            format!(
                "half-line tail bound {:.3e} exceeds tolerance {:.3e}",
                self.tail_bound, tol
            )
        })
    }
}

/// `int_0^inf g` truncated at `rho_max`: `n`-point Gauss–Legendre on unit-width
/// panels plus the tail bound `K exp(-delta rho_max) / delta`.
pub fn halfline_integral<F: FnMut(f64) -> f64>(
    g: F,
    rho_max: f64,
    n: usize,
    decay: Decay,
) -> Result<HalfLineIntegral> {
    halfline_integral_with_breaks(g, rho_max, n, decay, &[])
}

/// [`halfline_integral`] with extra panel edges at points where `g` has a kink.
pub fn halfline_integral_with_breaks<F: FnMut(f64) -> f64>(
    g: F,
    rho_max: f64,
    n: usize,
    decay: Decay,
    breaks: &[f64],
) -> Result<HalfLineIntegral> {
    if !(rho_max > 0.0) || decay.rate <= 0.0 {
        return Err(Error::Domain(
            "half-line rule needs rho_max > 0 and a positive decay rate".into(),
        ));
    }
    let rule = gauss_legendre(n)?;
    let edges = panel_edges(0.0, rho_max, 1.0, breaks);
    let value = composite_integrate(&rule, &edges, g);
    let tail_bound = decay.bound * (-decay.rate * rho_max).exp() / decay.rate;
    Ok(HalfLineIntegral { value, tail_bound })
}
