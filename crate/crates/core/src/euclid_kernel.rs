//! Boggio's Green function for the clamped bi-Laplacian on the unit ball of R^3,
//!
//! `G(x,y) = C ([XY] + |x-y|^2/[XY] - 2|x-y|)`,
//!
//! with its analytic x-gradient, y-Laplacian and boundary normal derivative of
//! the y-Laplacian. All formulas are written through `q = |x|^2 y - x`
//! (`= |x|^2 (y - x*)` with `x* = x/|x|^2`), which stays regular at `x = 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{self, bracket, dot, BallPoint, Vec3};
use crate::quadrature::SphereRule;
use crate::report::{CheckReport, ReportBuilder};
use crate::sampling;

/// Below this separation only the kernel value itself is evaluated.
pub const COINCIDENCE_TOL: f64 = 1e-10;

/// Multiplicative constant of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoggioConstant(f64);

impl BoggioConstant {
    /// `1/(16 pi)`: the value for which `Delta^2 G = delta`.
    pub const ORACLE: BoggioConstant = BoggioConstant(1.0 / (16.0 * PI));

    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::Domain(format!(
                "kernel constant must be positive, got {value}"
            )));
        }
        Ok(BoggioConstant(value))
    }

    /// `3/(16 sqrt(pi))`, as printed next to the Gamma expression.
    pub fn printed() -> Self {
        BoggioConstant(3.0 / (16.0 * PI.sqrt()))
    }

    /// `Gamma(5/2) / (4 pi^(3/2))`, which evaluates to `3/(16 pi)`.
    pub fn gamma_expression() -> Self {
        let gamma_5_2 = 0.75 * PI.sqrt();
        BoggioConstant(gamma_5_2 / (4.0 * PI.powf(1.5)))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

impl Default for BoggioConstant {
    fn default() -> Self {
        Self::ORACLE
    }
}

/// Kernel value, x-gradient and y-Laplacian at one point pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelJet {
    pub g: f64,
    pub grad_x: Vec3,
    pub lap_y: f64,
}

/// Kernel on raw coordinates, extended by zero when either point leaves the open ball.
pub fn boggio_g_extended(x: &Vec3, y: &Vec3, c: BoggioConstant) -> f64 {
    if dot(x, x) >= 1.0 || dot(y, y) >= 1.0 {
        return 0.0;
    }
    boggio_raw(x, y, c)
}

#[inline]
fn boggio_raw(x: &Vec3, y: &Vec3, c: BoggioConstant) -> f64 {
    let b = bracket(x, y);
    let d = geometry::distance(x, y);
    // b >= d on the closed ball, so the sum below is (b - d)^2 / b >= 0.
    c.0 * (b - d) * (b - d) / b
}

pub fn boggio_g(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> f64 {
    boggio_raw(x.coords(), y.coords(), c)
}

fn separated(x: &Vec3, y: &Vec3) -> Result<f64> {
    let d = geometry::distance(x, y);
    if d < COINCIDENCE_TOL {
        return Err(Error::Domain(format!(
            "kernel derivative requested at coincident points (|x-y| = {d:e})"
        )));
    }
    Ok(d)
}

/// `grad_x G(x, y)` on raw coordinates.
pub fn grad_x_raw(x: &Vec3, y: &Vec3, c: BoggioConstant) -> Result<Vec3> {
    let d = separated(x, y)?;
    let b = bracket(x, y);
    let y2 = dot(y, y);
    let ratio = 1.0 - d * d / (b * b);
    let mut out = [0.0; 3];
    for k in 0..3 {
        let db = (y2 * x[k] - y[k]) / b;
        let dxy = x[k] - y[k];
        out[k] = c.0 * (db * ratio + 2.0 * dxy / b - 2.0 * dxy / d);
    }
    Ok(out)
}

pub fn grad_x_g(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> Result<Vec3> {
    grad_x_raw(x.coords(), y.coords(), c)
}

/// `Delta_y G = C (2|x|^2/[XY] + 6/[XY] - 4/|x-y| - 4 (y-x).q / [XY]^3)`.
pub fn laplacian_y_g(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> Result<f64> {
    let (xv, yv) = (x.coords(), y.coords());
    let d = separated(xv, yv)?;
    let b = bracket(xv, yv);
    let x2 = dot(xv, xv);
    let q = geometry::sub(&geometry::scale(x2, yv), xv);
    let ymx = geometry::sub(yv, xv);
    Ok(c.0 * ((2.0 * x2 + 6.0) / b - 4.0 / d - 4.0 * dot(&ymx, &q) / (b * b * b)))
}

/// `grad_y Delta_y G`, valid for any separated pair.
pub fn grad_y_laplacian_y_g(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> Result<Vec3> {
    let (xv, yv) = (x.coords(), y.coords());
    let d = separated(xv, yv)?;
    let b = bracket(xv, yv);
    let x2 = dot(xv, xv);
    let q = geometry::sub(&geometry::scale(x2, yv), xv);
    let ymx = geometry::sub(yv, xv);
    let b3 = b * b * b;
    let b5 = b3 * b * b;
    let d3 = d * d * d;
    let qd = dot(&ymx, &q);
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[k] = c.0
            * (-(2.0 * x2 + 6.0) * q[k] / b3 + 4.0 * ymx[k] / d3 - 4.0 * (q[k] + x2 * ymx[k]) / b3
                + 12.0 * qd * q[k] / b5);
    }
    Ok(out)
}

/// The four boundary terms of `d/dnu Delta_y G / C` at `|y| = 1`:
///
/// 1. `-(2|x|^2 + 6) q.y / |x-y|^3`
/// 2. `12 ((y-x).q)(q.y) / |x-y|^5`
/// 3. `4 (1 - |x|^2) (y-x).y / |x-y|^3`
/// 4. `-4 q.y / |x-y|^3`
///
/// In the `x*` notation the first term reads `-(2|x|^4 + 6|x|^2)(y-x*).y / |x-y|^3`.
pub fn normal_derivative_terms(x: &BallPoint, y: &BallPoint) -> Result<[f64; 4]> {
    if !y.is_boundary() {
        return Err(Error::Domain(format!(
            "normal derivative needs a boundary point, |y| = {}",
            y.norm()
        )));
    }
    if !x.is_interior() {
        return Err(Error::Domain(
            "normal derivative needs an interior source point".into(),
        ));
    }
    let (xv, yv) = (x.coords(), y.coords());
    let d = separated(xv, yv)?;
    let x2 = dot(xv, xv);
    let q = geometry::sub(&geometry::scale(x2, yv), xv);
    let ymx = geometry::sub(yv, xv);
    let d3 = d * d * d;
    let d5 = d3 * d * d;
    let qy = dot(&q, yv);
    Ok([
        -(2.0 * x2 + 6.0) * qy / d3,
        12.0 * dot(&ymx, &q) * qy / d5,
        4.0 * (1.0 - x2) * dot(&ymx, yv) / d3,
        -4.0 * qy / d3,
    ])
}

/// `d/dnu Delta_y G(x, y)` for `y` on the unit sphere.
///
/// At `x = 0` every `q`-term vanishes and the value is `4C`, the derivative
/// of `C(6 - 4/t)` at `t = 1`.
pub fn normal_deriv_laplacian_y_g(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> Result<f64> {
    let t = normal_derivative_terms(x, y)?;
    Ok(c.0 * (t[0] + t[1] + t[2] + t[3]))
}

pub fn kernel_jet(x: &BallPoint, y: &BallPoint, c: BoggioConstant) -> Result<KernelJet> {
    Ok(KernelJet {
        g: boggio_g(x, y, c),
        grad_x: grad_x_g(x, y, c)?,
        lap_y: laplacian_y_g(x, y, c)?,
    })
}

/// Seeded sample pairs `(x, y)` in the ball of radius `radius` with `|x - y| >= min_sep`.
fn separated_pairs(
    seed: u64,
    count: usize,
    radius: f64,
    min_sep: f64,
) -> Vec<(BallPoint, BallPoint)> {
    let mut rng = sampling::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = sampling::in_ball(&mut rng, radius);
        let y = sampling::in_ball(&mut rng, radius);
        if geometry::distance(&x, &y) >= min_sep {
            out.push((
                BallPoint::new(x).expect("inside"),
                BallPoint::new(y).expect("inside"),
            ));
        }
    }
    out
}

/// Minimum separation of the finite-difference sample pairs.
pub const FD_MIN_SEPARATION: f64 = 0.1;

/// `grad_x G` against a sixth-order central difference (step `1e-3`) of `G` in `x1`.
///
/// The error is measured relative to the full gradient norm, so pairs where the
/// `x1` component happens to vanish do not dominate.
pub fn check_gradient_fd(samples: usize, seed: u64, tol: f64, c: BoggioConstant) -> CheckReport {
    let h = 1e-3;
    let mut rep = ReportBuilder::new("kernel_gradient_fd", tol, tol)
        .seed(seed)
        .summary_only();
    rep.param("step", h)
        .param("min_separation", FD_MIN_SEPARATION)
        .param("radius", 0.95);
    for (x, y) in separated_pairs(seed, samples, 0.95, FD_MIN_SEPARATION) {
        let g = |t: f64| {
            let mut xs = *x.coords();
            xs[0] += t;
            boggio_raw(&xs, y.coords(), c)
        };
        let fd = (45.0 * (g(h) - g(-h)) - 9.0 * (g(2.0 * h) - g(-2.0 * h))
            + (g(3.0 * h) - g(-3.0 * h)))
            / (60.0 * h);
        let grad = grad_x_g(&x, &y, c).expect("separated pair");
        let scale = geometry::norm(&grad);
        rep.compare("", scale + (fd - grad[0]), scale);
    }
    rep.finish()
}

/// Analytic `Delta_y G` against the fourth-order five-point Laplacian (step `2e-3`),
/// relative to `max(|Delta_y G|, C/|x-y|)`.
pub fn check_laplacian_fd(samples: usize, seed: u64, tol: f64, c: BoggioConstant) -> CheckReport {
    let h = 2e-3;
    let mut rep = ReportBuilder::new("kernel_laplacian_fd", tol, tol)
        .seed(seed)
        .summary_only();
    rep.param("step", h)
        .param("min_separation", FD_MIN_SEPARATION)
        .param("radius", 0.95);
    for (x, y) in separated_pairs(seed, samples, 0.95, FD_MIN_SEPARATION) {
        let g = |k: usize, t: f64| {
            let mut ys = *y.coords();
            ys[k] += t;
            boggio_raw(x.coords(), &ys, c)
        };
        let g0 = g(0, 0.0);
        let mut fd = 0.0;
        for k in 0..3 {
            fd += (-g(k, 2.0 * h) + 16.0 * g(k, h) - 30.0 * g0 + 16.0 * g(k, -h) - g(k, -2.0 * h))
                / (12.0 * h * h);
        }
        let lap = laplacian_y_g(&x, &y, c).expect("separated pair");
        let d = geometry::distance(x.coords(), y.coords());
        let scale = lap.abs().max(c.0 / d);
        rep.compare("", scale + (fd - lap), scale);
    }
    rep.finish()
}

/// `d/dnu Delta_y G` against a fourth-order one-sided difference of `Delta_y G`
/// taken from inside the ball along the radius through `y`, relative to
/// `max(|value|, C/|x-y|^2)`.
pub fn check_normal_derivative_fd(
    samples: usize,
    seed: u64,
    tol: f64,
    c: BoggioConstant,
) -> CheckReport {
    let h = 1e-3;
    let mut rep = ReportBuilder::new("kernel_normal_derivative_fd", tol, tol)
        .seed(seed)
        .summary_only();
    rep.param("step", h).param("x_radius", 0.8);
    let mut rng = sampling::rng(seed);
    for _ in 0..samples {
        let x = BallPoint::new(sampling::in_ball(&mut rng, 0.8)).expect("inside");
        let dir = sampling::on_sphere(&mut rng);
        let y = BallPoint::new(dir).expect("unit");
        let lap = |t: f64| {
            laplacian_y_g(
                &x,
                &BallPoint::new(geometry::scale(t, &dir)).expect("inside"),
                c,
            )
            .expect("separated")
        };
        let f: Vec<f64> = (0..5).map(|k| lap(1.0 - k as f64 * h)).collect();
        let fd = (25.0 * f[0] - 48.0 * f[1] + 36.0 * f[2] - 16.0 * f[3] + 3.0 * f[4]) / (12.0 * h);
        let nd = normal_deriv_laplacian_y_g(&x, &y, c).expect("boundary point");
        let d = geometry::distance(x.coords(), y.coords());
        let scale = nd.abs().max(c.0 / (d * d));
        rep.compare("", scale + (fd - nd), scale);
    }
    rep.finish()
}

/// Clamped boundary conditions: `G` and its one-sided normal difference quotient in `y`
/// vanish on a boundary grid for seeded interior `x`.
pub fn check_clamped_boundary(
    n_boundary: usize,
    n_interior: usize,
    seed: u64,
    c: BoggioConstant,
) -> CheckReport {
    let value_tol = 1e-13;
    let deriv_tol = 1e-6;
    let mut rep = ReportBuilder::new("kernel_clamped_boundary", deriv_tol, deriv_tol)
        .seed(seed)
        .summary_only();
    let n_theta = ((n_boundary as f64 / 2.0).sqrt().ceil() as usize).max(2);
    let sphere = SphereRule::product(n_theta, 2 * n_theta).expect("valid orders");
    rep.param("boundary_points", sphere.len())
        .param("interior_points", n_interior);
    let h = 1e-3;
    let mut rng = sampling::rng(seed);
    let mut max_value = 0.0f64;
    for _ in 0..n_interior {
        let x = sampling::in_ball(&mut rng, 0.9);
        for dir in &sphere.directions {
            let g = |t: f64| boggio_raw(&x, &geometry::scale(t, dir), c);
            max_value = max_value.max(g(1.0).abs());
            let fd = (25.0 * g(1.0) - 48.0 * g(1.0 - h) + 36.0 * g(1.0 - 2.0 * h)
                - 16.0 * g(1.0 - 3.0 * h)
                + 3.0 * g(1.0 - 4.0 * h))
                / (12.0 * h);
            rep.compare("", fd, 0.0);
        }
    }
    rep.param("max_boundary_value", max_value)
        .param("value_tolerance", value_tol);
    rep.require("boundary value", max_value <= value_tol);
    rep.finish()
}

/// `(G - C([XY] + |x-y|^2/[XY])) / |x-y|` as `y -> x` along five directions,
/// compared with the fundamental-solution coefficient `-1/(8 pi)`.
pub fn check_singular_part(c: BoggioConstant, tol: f64) -> CheckReport {
    let mut rep = ReportBuilder::new("kernel_singular_part", tol, tol);
    rep.param("c", c.0).param("target", -1.0 / (8.0 * PI));
    let x = [0.2, -0.1, 0.35];
    let dirs = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.6, 0.8, 0.0],
        [-0.48, 0.6, 0.64],
    ];
    for dir in dirs {
        for eps in [1e-3, 1e-5, 1e-7] {
            let y = geometry::add(&x, &geometry::scale(eps, &dir));
            let b = bracket(&x, &y);
            let d = geometry::distance(&x, &y);
            let ratio = (boggio_raw(&x, &y, c) - c.0 * (b + d * d / b)) / d;
            rep.compare(format!("eps={eps:e}"), ratio, -1.0 / (8.0 * PI));
        }
    }
    rep.finish()
}

/// Positivity and symmetry on seeded interior pairs.
pub fn check_positivity(samples: usize, seed: u64, c: BoggioConstant) -> CheckReport {
    let mut rep = ReportBuilder::new("kernel_positivity_symmetry", 0.0, 0.0)
        .seed(seed)
        .summary_only();
    let mut rng = sampling::rng(seed);
    let mut min_g = f64::INFINITY;
    let mut asym = 0.0f64;
    let mut used = 0;
    for _ in 0..samples {
        let x = sampling::in_ball(&mut rng, 1.0);
        let y = sampling::in_ball(&mut rng, 1.0);
        if x == y {
            continue;
        }
        let g = boggio_raw(&x, &y, c);
        min_g = min_g.min(g);
        asym = asym.max((g - boggio_raw(&y, &x, c)).abs());
        used += 1;
    }
    rep.param("min_value", min_g).param("max_asymmetry", asym);
    rep.add_samples(used);
    rep.require("positive", min_g > 0.0)
        .require("symmetric", asym == 0.0);
    rep.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const C: BoggioConstant = BoggioConstant::ORACLE;

    fn p(v: Vec3) -> BallPoint {
        BallPoint::new(v).unwrap()
    }

    fn random_interior(rng: &mut ChaCha8Rng, rmax: f64) -> BallPoint {
        loop {
            let v = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            if geometry::norm(&v) < rmax {
                return p(v);
            }
        }
    }

    #[test]
    fn constants() {
        assert_relative_eq!(C.value(), 1.0 / (16.0 * PI));
        assert_relative_eq!(
            BoggioConstant::gamma_expression().value(),
            3.0 / (16.0 * PI),
            max_relative = 1e-15
        );
        assert!(BoggioConstant::new(0.0).is_err());
        assert_ne!(
            BoggioConstant::printed(),
            BoggioConstant::gamma_expression()
        );
    }

    #[test]
    fn value_examples() {
        let y = p([0.5, 0.0, 0.0]);
        assert_relative_eq!(
            boggio_g(&BallPoint::ORIGIN, &y, C),
            0.25 * C.value(),
            max_relative = 1e-15
        );
        let x = p([0.1, 0.2, -0.3]);
        let s = 1.0 / 2.0f64.sqrt();
        assert!(boggio_g(&x, &p([s, s, 0.0]), C).abs() <= 1e-17);
        assert!(boggio_g(&x, &x, C) > 0.0);
    }

    #[test]
    fn symmetric_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let x = random_interior(&mut rng, 1.0);
            let y = random_interior(&mut rng, 1.0);
            let g = boggio_g(&x, &y, C);
            assert!(g > 0.0);
            assert_eq!(g, boggio_g(&y, &x, C));
        }
    }

    #[test]
    fn singular_part_matches_fundamental_solution() {
        let x = p([0.2, -0.1, 0.35]);
        let dirs = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.6, 0.8, 0.0],
            [-0.48, 0.6, 0.64],
        ];
        for dir in dirs {
            for eps in [1e-3, 1e-5, 1e-7] {
                let y = p(geometry::add(x.coords(), &geometry::scale(eps, &dir)));
                let b = bracket_of(&x, &y);
                let d = geometry::distance(x.coords(), y.coords());
                let regular = C.value() * (b + d * d / b);
                let ratio = (boggio_g(&x, &y, C) - regular) / d;
                assert!((ratio + 1.0 / (8.0 * PI)).abs() <= 1e-8, "{ratio}");
            }
        }
    }

    fn bracket_of(x: &BallPoint, y: &BallPoint) -> f64 {
        geometry::bracket_xy(x, y)
    }

    #[test]
    fn laplacian_examples() {
        let y = p([0.5, 0.0, 0.0]);
        assert_relative_eq!(
            laplacian_y_g(&BallPoint::ORIGIN, &y, C).unwrap(),
            -2.0 * C.value(),
            max_relative = 1e-14
        );
        let yb = p([0.0, 1.0, 0.0]);
        assert_relative_eq!(
            laplacian_y_g(&BallPoint::ORIGIN, &yb, C).unwrap(),
            2.0 * C.value(),
            max_relative = 1e-14
        );
        assert!(laplacian_y_g(&y, &y, C).is_err());
    }

    #[test]
    fn normal_derivative_at_origin() {
        let y = p([1.0, 0.0, 0.0]);
        assert_relative_eq!(
            normal_deriv_laplacian_y_g(&BallPoint::ORIGIN, &y, C).unwrap(),
            4.0 * C.value(),
            max_relative = 1e-14
        );
        assert!(normal_deriv_laplacian_y_g(&BallPoint::ORIGIN, &p([0.5, 0.0, 0.0]), C).is_err());
    }

    #[test]
    fn normal_derivative_rotation_equivariance() {
        let x = p([0.3, 0.1, -0.2]);
        let y = p([0.6, 0.0, 0.8]);
        // rotation by 90 degrees about the x1 axis
        let rot = |v: &Vec3| [v[0], -v[2], v[1]];
        let a = normal_deriv_laplacian_y_g(&x, &y, C).unwrap();
        let b = normal_deriv_laplacian_y_g(&p(rot(x.coords())), &p(rot(y.coords())), C).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-13);
    }

    #[test]
    fn gradient_is_parallel_to_y_at_origin() {
        let y = p([0.2, -0.3, 0.4]);
        let g = grad_x_g(&BallPoint::ORIGIN, &y, C).unwrap();
        let cr = geometry::cross(&g, y.coords());
        assert!(geometry::norm(&cr) <= 1e-15);
    }

    #[test]
    fn gradient_reflection_antisymmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let flip = |v: &Vec3| [-v[0], v[1], v[2]];
        for _ in 0..1000 {
            let x = random_interior(&mut rng, 0.99);
            let y = random_interior(&mut rng, 0.99);
            let a = grad_x_g(&x, &y, C).unwrap()[0];
            let b = grad_x_g(&p(flip(x.coords())), &p(flip(y.coords())), C).unwrap()[0];
            assert!((a + b).abs() <= 1e-15 * a.abs().max(1e-3));
        }
    }

    #[test]
    fn finite_difference_oracles() {
        assert!(check_gradient_fd(200, 1, 1e-9, C).passed);
        assert!(check_laplacian_fd(200, 2, 1e-6, C).passed);
        assert!(check_normal_derivative_fd(200, 3, 1e-5, C).passed);
    }

    #[test]
    fn clamped_and_singular() {
        let r = check_clamped_boundary(400, 5, 4, C);
        assert!(r.passed, "{}", r.summary_line());
        assert!(check_singular_part(C, 1e-8).passed);
        assert!(!check_singular_part(BoggioConstant::gamma_expression(), 1e-8).passed);
        assert!(check_positivity(1000, 6, C).passed);
    }

    #[test]
    fn extended_kernel_vanishes_outside() {
        assert_eq!(
            boggio_g_extended(&[1.2, 0.0, 0.0], &[0.1, 0.0, 0.0], C),
            0.0
        );
        assert!(boggio_g_extended(&[0.2, 0.0, 0.0], &[0.1, 0.0, 0.0], C) > 0.0);
    }
}
