//! Conformal transport between radial solutions on the unit ball and radial
//! solutions of `P2 u = -u^-7` on hyperbolic 3-space, plus the integral-equation
//! nonexistence demonstration.
//!
//! With `phi = 2 / (1 - r^2) = 2 cosh^2(rho/2)` and `r = tanh(rho/2)`, the
//! transport is `u = phi^(1/2) v` and `P2 u = phi^(-7/2) Delta^2 (phi^(-1/2) u)`.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::geometry::{
    ball_radius, cross, dot, hyperbolic_distance, hyperbolic_radius, norm, BallPoint,
};
use crate::hyper_kernel::{logspace, p2_green, HyperKernelForm};
use crate::quadrature::{
    composite_integrate, gauss_legendre, halfline_integral_with_breaks, panel_edges, Decay,
};
use crate::radial_solver::RadialSolution;
use crate::report::{CheckReport, ReportBuilder};
use crate::sampling;

/// Default outer radius of transported profiles, `r = tanh 6`.
pub const DEFAULT_RHO_MAX: f64 = 12.0;
const PROFILE_NODES: usize = 600;
const PROFILE_RHO_MIN: f64 = 1e-3;

/// `sqrt(phi) = sqrt(2) cosh(rho/2)`.
fn weight(rho: f64) -> f64 {
    SQRT_2 * (0.5 * rho).cosh()
}

/// `u(rho)` from `v(r)` at `r = tanh(rho/2)`.
pub fn v_to_u(rho: f64, v: f64) -> f64 {
    weight(rho) * v
}

/// `v(r)` from `u(rho)` at `rho = 2 artanh r`.
pub fn u_to_v(rho: f64, u: f64) -> f64 {
    u / weight(rho)
}

/// A radial function on hyperbolic space sampled on an increasing `rho` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HyperbolicProfile {
    pub rho_grid: Vec<f64>,
    pub u: Vec<f64>,
    pub alpha_est: f64,
    /// Boundary trace `v(1)` of the ball solution it came from.
    pub trace: f64,
    pub source: serde_json::Value,
}

/// The transported solution, evaluable at any `rho` through the ball solver.
#[derive(Debug, Clone, Copy)]
pub struct Transported<'a> {
    pub sol: &'a RadialSolution,
}

impl Transported<'_> {
    pub fn u(&self, rho: f64) -> Result<f64> {
        let rho = rho.abs();
        let v = self.sol.evaluate(ball_radius(rho).min(1.0))?[0];
        Ok(v_to_u(rho, v))
    }
}

pub fn ball_to_hyperbolic(sol: &RadialSolution, rho_max: f64) -> Result<HyperbolicProfile> {
    if !(rho_max > PROFILE_RHO_MIN) {
        return Err(Error::Domain(format!(
            "rho_max must exceed {PROFILE_RHO_MIN}, got {rho_max}"
        )));
    }
    if !(sol.min_value() > 0.0) {
        return Err(Error::Domain("transport needs a positive solution".into()));
    }
    let t = Transported { sol };
    let rho_grid = logspace(PROFILE_RHO_MIN, rho_max, PROFILE_NODES);
    let u = rho_grid
        .iter()
        .map(|&rho| t.u(rho))
        .collect::<Result<Vec<_>>>()?;
    let mut profile = HyperbolicProfile {
        rho_grid,
        u,
        alpha_est: f64::NAN,
        trace: sol.a,
        source: sol.source.describe(),
    };
    profile.alpha_est = growth_coefficient(&profile)?.alpha;
    Ok(profile)
}

/// Pairs `(r, v)` recovered from a profile.
pub fn hyperbolic_to_ball(profile: &HyperbolicProfile) -> Vec<(f64, f64)> {
    profile
        .rho_grid
        .iter()
        .zip(&profile.u)
        .map(|(&rho, &u)| (ball_radius(rho), u_to_v(rho, u)))
        .collect()
}

/// Largest relative change of `(r, v)` after ball -> hyperbolic -> ball on the
/// solution grid, restricted to `r <= r_max`.
pub fn round_trip_error(sol: &RadialSolution, r_max: f64) -> f64 {
    let mut worst = 0.0f64;
    for (r, s) in sol.grid.iter().zip(&sol.states) {
        if *r > r_max {
            break;
        }
        let rho = hyperbolic_radius(*r);
        let u = v_to_u(rho, s[0]);
        let (r2, v2) = (ball_radius(rho), u_to_v(rho, u));
        worst = worst
            .max(((r2 - r) / r).abs())
            .max(((v2 - s[0]) / s[0]).abs());
    }
    worst
}

impl HyperbolicProfile {
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["rho", "u"])?;
        for (rho, u) in self.rho_grid.iter().zip(&self.u) {
            w.write_record([format!("{rho:.14e}"), format!("{u:.14e}")])?;
        }
        w.flush()
    }

    pub fn sidecar(&self) -> serde_json::Value {
        json!({
            "alpha_est": self.alpha_est,
            "trace": self.trace,
            "alpha_expected": self.trace / SQRT_2,
            "source": self.source,
            "rho_max": self.rho_grid.last(),
            "nodes": self.rho_grid.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub alpha: f64,
    /// Change between the two highest extrapolation orders.
    pub change: f64,
    pub warning: Option<String>,
}

/// Limit of `u e^(-rho/2)`, extrapolated in `t = e^(-rho)` from the outermost nodes.
pub fn growth_coefficient(profile: &HyperbolicProfile) -> Result<GrowthEstimate> {
    let n = profile.rho_grid.len();
    if n < 4 || profile.rho_grid[n - 1] < 8.0 {
        return Err(Error::Domain(
            "growth coefficient needs a profile reaching rho >= 8".into(),
        ));
    }
    let idx = n - 4..n;
    let ts: Vec<f64> = idx.clone().map(|i| (-profile.rho_grid[i]).exp()).collect();
    let gs: Vec<f64> = idx
        .map(|i| profile.u[i] * (-0.5 * profile.rho_grid[i]).exp())
        .collect();
    let alpha = neville_at_zero(&ts, &gs);
    let lower = neville_at_zero(&ts[1..], &gs[1..]);
    let change = (alpha - lower).abs();
    let warning =
        (change > 1e-3).then(|| format!("growth sequence not stabilized: change {change:.3e}"));
    Ok(GrowthEstimate {
        alpha,
        change,
        warning,
    })
}

fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

type RadialFn<'a> = &'a dyn Fn(f64) -> Result<f64>;

fn d1(g: RadialFn, x: f64, h: f64) -> Result<f64> {
    Ok((g(x - 2.0 * h)? - 8.0 * g(x - h)? + 8.0 * g(x + h)? - g(x + 2.0 * h)?) / (12.0 * h))
}

fn d2(g: RadialFn, x: f64, h: f64) -> Result<f64> {
    Ok(
        (-g(x - 2.0 * h)? + 16.0 * g(x - h)? - 30.0 * g(x)? + 16.0 * g(x + h)? - g(x + 2.0 * h)?)
            / (12.0 * h * h),
    )
}

/// `Delta_H g = g'' + 2 coth(rho) g'`.
fn laplace_hyperbolic(g: RadialFn, rho: f64, h: f64) -> Result<f64> {
    Ok(d2(g, rho, h)? + 2.0 * d1(g, rho, h)? / rho.tanh())
}

/// `Delta g = g'' + (2/r) g'`.
fn laplace_euclid(g: RadialFn, r: f64, h: f64) -> Result<f64> {
    Ok(d2(g, r, h)? + 2.0 * d1(g, r, h)? / r)
}

fn p1(g: RadialFn, rho: f64, h: f64) -> Result<f64> {
    Ok(-laplace_hyperbolic(g, rho, h)? - 0.75 * g(rho)?)
}

/// `P2 u = P1 (P1 + 2) u` by nested fourth-order differences in `rho`.
pub fn p2_hyperbolic_route(u: RadialFn, rho: f64, h: f64) -> Result<f64> {
    let inner = |s: f64| -> Result<f64> { Ok(p1(u, s, h)? + 2.0 * u(s)?) };
    p1(&inner, rho, h)
}

/// `phi^(-7/2) Delta^2 (phi^(-1/2) u)` by nested fourth-order differences in `r`.
pub fn p2_euclidean_route(u: RadialFn, rho: f64, h: f64) -> Result<f64> {
    let w = |r: f64| -> Result<f64> {
        let rho = hyperbolic_radius(r);
        Ok(u_to_v(rho, u(rho)?))
    };
    let lap = |r: f64| laplace_euclid(&w, r, h);
    let r = ball_radius(rho);
    let phi = 2.0 / (1.0 - r * r);
    Ok(phi.powf(-3.5) * laplace_euclid(&lap, r, h)?)
}

/// Built-in smooth test functions for the covariance check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CovarianceProfile {
    /// `e^-rho + 2`.
    ExpPlusTwo,
    /// `cosh(rho/2)`.
    CoshHalf,
    /// `u = 1`, for which `P2 u = -15/16`.
    Constant,
}

impl CovarianceProfile {
    pub const ALL: [CovarianceProfile; 3] = [
        CovarianceProfile::ExpPlusTwo,
        CovarianceProfile::CoshHalf,
        CovarianceProfile::Constant,
    ];

    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        match self {
            CovarianceProfile::ExpPlusTwo => (-rho).exp() + 2.0,
            CovarianceProfile::CoshHalf => (0.5 * rho).cosh(),
            CovarianceProfile::Constant => 1.0,
        }
    }
}

/// Coarsest step in `rho` for the hyperbolic route; the Euclidean route uses half
/// of it in `r`. Both routes are run at four successively halved steps.
pub const COVARIANCE_STEP: f64 = 0.1;

/// Both routes at step `h` (in `rho`, `h/2` in `r`).
pub fn covariance_pair(u: RadialFn, rho: f64, h: f64) -> Result<(f64, f64)> {
    Ok((
        p2_hyperbolic_route(u, rho, h)?,
        p2_euclidean_route(u, rho, 0.5 * h)?,
    ))
}

/// `log2(|X(h) - X(h/2)| / |X(h/2) - X(h/4)|)`, or `None` when the route is
/// exact to roundoff.
fn observed_order(x: &[f64], scale: f64) -> Option<f64> {
    let (e1, e2) = ((x[0] - x[1]).abs(), (x[1] - x[2]).abs());
    (e1 > 1e-10 * scale).then(|| (e1 / e2).log2())
}

/// Agreement of the two routes at the finest step, relative to
/// `max(|P2 u|, |u|)` since `P2 cosh(rho/2)` vanishes, and the observed
/// convergence order of each route over the three coarsest steps.
pub fn check_conformal_covariance(
    profile: CovarianceProfile,
    probe_rhos: &[f64],
    tol: f64,
) -> Result<CheckReport> {
    const LEVELS: usize = 4;
    let mut rep = ReportBuilder::new(format!("conformal_covariance_{profile:?}"), tol, tol);
    rep.param("profile", profile)
        .param("probes", probe_rhos)
        .param("step", COVARIANCE_STEP);
    let u = |rho: f64| -> Result<f64> { Ok(profile.eval(rho)) };
    let mut orders = Vec::new();
    let mut values = Vec::new();
    for &rho in probe_rhos {
        if !(0.5..=2.0).contains(&rho) {
            return Err(Error::Domain(format!(
                "covariance probes must lie in [0.5, 2], got {rho}"
            )));
        }
        let mut hyp = [0.0; LEVELS];
        let mut euc = [0.0; LEVELS];
        for k in 0..LEVELS {
            (hyp[k], euc[k]) =
                covariance_pair(&u, rho, COVARIANCE_STEP / f64::powi(2.0, k as i32))?;
        }
        let (l, r) = (hyp[LEVELS - 1], euc[LEVELS - 1]);
        let scale = l.abs().max(profile.eval(rho).abs());
        values.push(json!({ "rho": rho, "hyperbolic": l, "euclidean": r }));
        rep.compare(format!("rho={rho}"), 1.0 + (r - l) / scale, 1.0);
        for (route, x) in [("hyperbolic", hyp), ("euclidean", euc)] {
            if let Some(order) = observed_order(&x, scale) {
                orders.push(json!({ "rho": rho, "route": route, "order": order }));
                rep.require(
                    format!("fourth-order convergence of the {route} route at rho={rho} (observed {order:.2})"),
                    (3.5..=4.6).contains(&order),
                );
            }
        }
        if profile == CovarianceProfile::Constant {
            rep.compare(format!("rho={rho} vs -15/16"), l, -15.0 / 16.0);
        }
    }
    rep.param("values", &values)
        .param("observed_orders", &orders);
    Ok(rep.finish())
}

/// `max |P2 u + u^-7|` over probes in `[0.5, rho_max - 1]`, by nested differences in `rho`.
pub fn check_p2_equation(
    sol: &RadialSolution,
    rho_max: f64,
    n_probes: usize,
    tol: f64,
) -> Result<CheckReport> {
    const H: f64 = 0.05;
    let t = Transported { sol };
    let u = |rho: f64| t.u(rho);
    let mut rep = ReportBuilder::new("p2_equation", tol, tol);
    rep.param("a", sol.a)
        .param("b", sol.b)
        .param("source", sol.source.describe())
        .param("step", H);
    let hi = rho_max - 1.0;
    let mut coarse_max = 0.0f64;
    let mut fine_max = 0.0f64;
    for i in 0..n_probes {
        let rho = 0.5 + (hi - 0.5) * i as f64 / (n_probes.max(2) - 1) as f64;
        let forcing = sol.source.eval(u(rho)?);
        let fine = p2_hyperbolic_route(&u, rho, H)? + forcing;
        let coarse = p2_hyperbolic_route(&u, rho, 2.0 * H)? + forcing;
        fine_max = fine_max.max(fine.abs());
        coarse_max = coarse_max.max(coarse.abs());
        rep.compare(format!("rho={rho:.4}"), fine, 0.0);
    }
    rep.param("max_residual", fine_max)
        .param("max_residual_double_step", coarse_max)
        .param("observed_order", (coarse_max / fine_max).log2());
    Ok(rep.finish())
}

/// `rho(x, y)` from `rho_x`, `rho_y` and the angle between them, through
/// `sinh^2(rho/2) = sinh^2((rho_x - rho_y)/2) + sinh(rho_x) sinh(rho_y) sin^2(theta/2)`.
pub fn law_of_cosines_distance(rho_x: f64, rho_y: f64, theta: f64) -> f64 {
    let a = (0.5 * (rho_x - rho_y)).sinh();
    let s = (0.5 * theta).sin();
    let q = a * a + rho_x.sinh() * rho_y.sinh() * s * s;
    2.0 * q.sqrt().asinh()
}

pub fn check_law_of_cosines(n: usize, seed: u64, tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("law_of_cosines", tol, tol)
        .seed(seed)
        .summary_only();
    let mut rng = sampling::rng(seed);
    for _ in 0..n {
        let x = BallPoint::new(sampling::in_ball(&mut rng, 0.99))?;
        let y = BallPoint::new(sampling::in_ball(&mut rng, 0.99))?;
        let theta = norm(&cross(x.coords(), y.coords())).atan2(dot(x.coords(), y.coords()));
        let lc = law_of_cosines_distance(
            hyperbolic_radius(x.norm()),
            hyperbolic_radius(y.norm()),
            theta,
        );
        let target = hyperbolic_distance(&x, &y)?;
        rep.compare("pair", lc - target, 0.0);
    }
    Ok(rep.finish())
}

/// Exponential-growth trial profile `u = 2 alpha cosh(rho/2)`, for which
/// `u e^(-rho/2) = alpha (1 + e^-rho) -> alpha`.
pub fn trial_profile(alpha: f64, rho: f64) -> f64 {
    2.0 * alpha * (0.5 * rho).cosh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonexistenceConfig {
    /// Truncation of the outer `rho_y` integral.
    pub rho_max: f64,
    /// Gauss–Legendre points per unit panel.
    pub order: usize,
}

impl Default for NonexistenceConfig {
    fn default() -> Self {
        NonexistenceConfig {
            rho_max: 40.0,
            order: 24,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonexistenceRow {
    pub rho_x: f64,
    pub t: f64,
    pub u: f64,
    pub u_over_t: f64,
    /// `u e^(-rho_x/2)`.
    pub growth: f64,
    pub tail_bound: f64,
}

/// `T(x) = int_{H^3} G(rho(x,y)) u(y)^-7 dV_y` for the trial profile, reduced to
/// `(rho_y, s)` with `s = rho(x, y)`:
/// `T = (2 pi / sinh rho_x) int sinh(rho_y) u^-7 int_{|rho_x-rho_y|}^{rho_x+rho_y} G(s) sinh(s) ds drho_y`.
pub fn nonexistence_integral(
    alpha: f64,
    rho_x: f64,
    cfg: &NonexistenceConfig,
) -> Result<(f64, f64)> {
    if !(alpha > 0.0) || !(rho_x >= 0.0) {
        return Err(Error::Domain(format!(
            "need alpha > 0 and rho_x >= 0, got {alpha}, {rho_x}"
        )));
    }
    let rule = gauss_legendre(cfg.order)?;
    let kernel = |s: f64| p2_green(s, HyperKernelForm::Canonical).map(|g| g * s.sinh());
    let mut failure = None;
    let mut record = |r: Result<f64>| match r {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    // u^-7 <= alpha^-7 e^(-7 rho/2), G(s) sinh(s) <= e^(-s/2) / (8 pi)
    let decay_bound = alpha.powi(-7) * (0.5 * rho_x).exp() / 4.0;
    let result = if rho_x == 0.0 {
        halfline_integral_with_breaks(
            |rho| {
                let g = record(p2_green(rho, HyperKernelForm::Canonical));
                4.0 * PI * g * rho.sinh().powi(2) * trial_profile(alpha, rho).powi(-7)
            },
            cfg.rho_max,
            cfg.order,
            Decay {
                bound: decay_bound,
                rate: 3.0,
            },
            &[],
        )?
    } else {
        let shx = rho_x.sinh();
        halfline_integral_with_breaks(
            |rho_y| {
                let edges = panel_edges((rho_x - rho_y).abs(), rho_x + rho_y, 1.0, &[]);
                let inner = composite_integrate(&rule, &edges, |s| record(kernel(s)));
                2.0 * PI * rho_y.sinh() / shx * trial_profile(alpha, rho_y).powi(-7) * inner
            },
            cfg.rho_max + rho_x,
            cfg.order,
            Decay {
                bound: decay_bound,
                rate: 3.0,
            },
            &[rho_x],
        )?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((result.value, result.tail_bound))
}

/// Euclidean counterpart with the kernel `|x - y|` on `R^3`, using the sphere average
/// `int_{|y|=s} |x-y| dsigma / s^2 = (2 pi / (3 R s)) ((R+s)^3 - |R-s|^3)`.
pub fn euclidean_control_integral(
    alpha: f64,
    radius: f64,
    cfg: &NonexistenceConfig,
) -> Result<f64> {
    if !(alpha > 0.0) || !(radius >= 0.0) {
        return Err(Error::Domain(format!(
            "need alpha > 0 and R >= 0, got {alpha}, {radius}"
        )));
    }
    let avg = |s: f64| {
        if radius == 0.0 || s == 0.0 {
            4.0 * PI * (radius + s)
        } else {
            2.0 * PI / (3.0 * radius * s) * ((radius + s).powi(3) - (radius - s).abs().powi(3))
        }
    };
    let s_max = cfg.rho_max + radius;
    // s^2 (R + s) e^(-s/2) is decreasing past s_max
    let bound = alpha.powi(-7) * 4.0 * PI * s_max * s_max * (radius + s_max) * (-0.5 * s_max).exp();
    let r = halfline_integral_with_breaks(
        |s| s * s * avg(s) * trial_profile(alpha, s).powi(-7),
        s_max,
        cfg.order,
        Decay { bound, rate: 3.0 },
        &[radius],
    )?;
    Ok(r.value)
}

/// Finite, positive and exponentially decaying `T(rho_x)` against the growing
/// trial profile, plus the Euclidean control whose `T` does not decay.
pub fn nonexistence_demo(
    alpha: f64,
    probe_rhos: &[f64],
    cfg: &NonexistenceConfig,
) -> Result<(CheckReport, Vec<NonexistenceRow>)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if probe_rhos.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("probe radii must be increasing".into()));
    }
    let mut rows = Vec::with_capacity(probe_rhos.len());
    for &rho_x in probe_rhos {
        let (t, tail_bound) = nonexistence_integral(alpha, rho_x, cfg)?;
        let u = trial_profile(alpha, rho_x);
        rows.push(NonexistenceRow {
            rho_x,
            t,
            u,
            u_over_t: u / t,
            growth: u * (-0.5 * rho_x).exp(),
            tail_bound,
        });
    }
    let mut rep = ReportBuilder::new("nonexistence_demo", 1e-3, 1e-3);
    rep.param("alpha", alpha)
        .param("config", cfg)
        .param("rows", &rows);
    for row in &rows {
        rep.require(
            format!("T finite and positive at rho_x={}", row.rho_x),
            row.t.is_finite() && row.t > 0.0,
        );
        rep.require(
            format!("tail bound small at rho_x={}", row.rho_x),
            row.tail_bound <= 1e-12 * row.t,
        );
        // u e^(-rho/2) = alpha (1 + e^-rho) is within 1e-3 of alpha only once rho >= 7
        if row.rho_x >= 10.0 {
            rep.compare(format!("growth at rho_x={}", row.rho_x), row.growth, alpha);
        }
    }
    for w in rows.windows(2) {
        let gap = w[1].rho_x - w[0].rho_x;
        rep.require(
            format!("T decreasing on [{}, {}]", w[0].rho_x, w[1].rho_x),
            w[1].t < w[0].t,
        );
        rep.require(
            format!(
                "T decays faster than e^(-0.4 drho) on [{}, {}]",
                w[0].rho_x, w[1].rho_x
            ),
            w[1].t / w[0].t < (-0.4 * gap).exp(),
        );
        rep.require(
            format!(
                "u/T grows faster than e^(0.8 drho) on [{}, {}]",
                w[0].rho_x, w[1].rho_x
            ),
            w[1].u_over_t / w[0].u_over_t >= (0.8 * gap).exp(),
        );
    }
    let extrapolated = {
        let ts: Vec<f64> = rows.iter().map(|r| (-r.rho_x).exp()).collect();
        let gs: Vec<f64> = rows.iter().map(|r| r.growth).collect();
        neville_at_zero(&ts, &gs)
    };
    rep.param("growth_extrapolated", extrapolated);
    if rows.len() >= 2 {
        rep.compare("extrapolated growth", extrapolated, alpha);
    }
    if let (Some(t5), Some(t15)) = (find(&rows, 5.0), find(&rows, 15.0)) {
        rep.param("t15_over_t5", t15 / t5);
        rep.require("T(15)/T(5) < e^-4", t15 / t5 < (-4.0f64).exp());
    }
    let control = probe_rhos
        .iter()
        .map(|&r| euclidean_control_integral(alpha, r, cfg))
        .collect::<Result<Vec<_>>>()?;
    rep.param("euclidean_control", &control);
    rep.require(
        "Euclidean control does not decay",
        control.windows(2).all(|w| w[1] >= w[0]),
    );
    Ok((rep.finish(), rows))
}

fn find(rows: &[NonexistenceRow], rho: f64) -> Option<f64> {
    rows.iter().find(|r| r.rho_x == rho).map(|r| r.t)
}

pub fn write_nonexistence_csv(path: &Path, rows: &[NonexistenceRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["rho_x", "T", "u", "u_over_T"])?;
    for r in rows {
        w.write_record([r.rho_x, r.t, r.u, r.u_over_t].map(|x| format!("{x:.14e}")))?;
    }
    w.flush()
}
