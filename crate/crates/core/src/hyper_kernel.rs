//! Green's function of `P2 = P1 (P1 + 2)` on hyperbolic 3-space, `P1 = -Delta_H - 3/4`,
//! as a function of the geodesic distance `rho`.
//!
//! Four algebraically equal forms are provided so they can be checked against
//! each other: the canonical exponential form, the tanh/coth form, the
//! hypergeometric form and the resolvent partial-fraction form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_integrate;
use crate::report::{CheckReport, ReportBuilder};

/// Beyond this distance every form underflows to zero in double precision.
pub const RHO_UNDERFLOW: f64 = 500.0;

/// Limit of `p2_green` on the diagonal.
pub const HEAD_LIMIT: f64 = 1.0 / (8.0 * PI);
/// Constant `K` in `p2_green ~ K exp(-3 rho / 2)`.
pub const TAIL_CONSTANT: f64 = 1.0 / (4.0 * PI);
/// Prefactor of `sinh(rho/2) cosh^-4(rho/2) F(3/2, 2; 3; sech^2(rho/2))`.
pub const HYPERGEOMETRIC_PREFACTOR: f64 = 1.0 / (32.0 * PI);

/// Diagonal limit as printed alongside the asymptotics.
pub const PRINTED_HEAD_LIMIT: f64 = 1.0 / (4.0 * PI);
/// Tail constant as printed alongside the asymptotics.
pub const PRINTED_TAIL_CONSTANT: f64 = 1.0 / (2.0 * PI);
/// Hypergeometric prefactor as printed.
pub const PRINTED_HYPERGEOMETRIC_PREFACTOR: f64 = 1.0 / (16.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HyperKernelForm {
    Canonical,
    TanhCoth,
    Hypergeometric,
    PartialFraction,
}

impl HyperKernelForm {
    pub const ALL: [HyperKernelForm; 4] = [
        HyperKernelForm::Canonical,
        HyperKernelForm::TanhCoth,
        HyperKernelForm::Hypergeometric,
        HyperKernelForm::PartialFraction,
    ];
}

/// Spectral shift `nu >= 0` of the resolvent `(nu^2 - 1 - Delta_H)^-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolventOrder(f64);

impl ResolventOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0 && nu.is_finite()) {
            return Err(Error::Domain(format!(
                "resolvent order must be >= 0, got {nu}"
            )));
        }
        Ok(ResolventOrder(nu))
    }

    pub fn nu(&self) -> f64 {
        self.0
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || rho.is_nan() {
        return Err(Error::Domain(format!(
            "geodesic distance must be positive, got {rho}"
        )));
    }
    Ok(())
}

/// `sech(h)` without overflow.
fn sech(h: f64) -> f64 {
    let e = (-h.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

pub fn p2_green(rho: f64, form: HyperKernelForm) -> Result<f64> {
    check_rho(rho)?;
    if rho.is_infinite() || rho > RHO_UNDERFLOW {
        return Ok(0.0);
    }
    let h = 0.5 * rho;
    let value = match form {
        HyperKernelForm::Canonical => (-rho).exp() * sech(h) / (8.0 * PI),
        HyperKernelForm::TanhCoth => {
            // tanh + coth - 2 = (1 - tanh)^2 / tanh, and 1 - tanh h = 2 / (e^{2h} + 1)
            let t = h.tanh();
            let one_minus_t = 2.0 / (rho.exp() + 1.0);
            (h.sinh() * one_minus_t) * one_minus_t / t / (8.0 * PI)
        }
        HyperKernelForm::Hypergeometric => {
            let s = sech(h);
            let t = h.tanh();
            // sinh h cosh^-4 h = tanh h sech^3 h
            let z = s * s;
            HYPERGEOMETRIC_PREFACTOR * t * s * s * s * hyp2f1_closed(z, t * t)
        }
        HyperKernelForm::PartialFraction => p2_green_partial_fraction(rho)?,
    };
    Ok(value)
}

/// `F(3/2, 2; 3; z) = 4 / (s (1 + s)^2)` with `s = sqrt(1 - z)`; `one_minus_z` is
/// passed separately so callers can supply it without cancellation.
fn hyp2f1_closed(z: f64, one_minus_z: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&z));
    let s = one_minus_z.sqrt();
    4.0 / (s * (1.0 + s) * (1.0 + s))
}

/// `F(3/2, 2; 3; z)` for `0 < z < 1`.
///
/// The closed form `(4/z^2)((1-z)^{-1/2} + (1-z)^{1/2} - 2)` cancels as `z -> 0`;
/// the equivalent `4 / (s (1+s)^2)` is used instead and is accurate on the whole interval.
pub fn gauss_2f1_euler(z: f64) -> Result<f64> {
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::Domain(format!(
            "F(3/2,2;3;z) needs 0 < z < 1, got {z}"
        )));
    }
    Ok(hyp2f1_closed(z, 1.0 - z))
}

/// `F(a, b; c; z)` from the Euler integral
/// `Gamma(c)/(Gamma(b)Gamma(c-b)) int_0^1 t^{b-1} (1-t)^{c-b-1} (1-zt)^{-a} dt`.
///
/// Requires `b >= 1` and `c - b >= 1` so that the integrand is bounded.
pub fn euler_integral_2f1(a: f64, b: f64, c: f64, z: f64, tol: f64) -> Result<f64> {
    if b < 1.0 || c - b < 1.0 {
        return Err(Error::Domain(format!(
            "Euler integral needs b >= 1 and c - b >= 1 (b = {b}, c = {c})"
        )));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "Euler integral needs 0 <= z < 1, got {z}"
        )));
    }
    let f = |t: f64| t.powf(b - 1.0) * (1.0 - t).powf(c - b - 1.0) * (1.0 - z * t).powf(-a);
    let norm = gamma(c) / (gamma(b) * gamma(c - b));
    Ok(norm * adaptive_integrate(&f, 0.0, 1.0, tol))
}

/// `(nu^2 - 1 - Delta_H)^-1` kernel on H^3: `e^{-nu rho} / (4 pi sinh rho)`.
pub fn resolvent_green(nu: ResolventOrder, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    if rho.is_infinite() {
        return Ok(0.0);
    }
    // 1 / sinh rho = 2 e^{-rho} / (1 - e^{-2 rho})
    Ok((-(nu.0 + 1.0) * rho).exp() / (2.0 * PI * -(-2.0 * rho).exp_m1()))
}

/// The resolvent kernel in its hypergeometric form
/// `Gamma(1+nu)Gamma(nu+1/2) / (8 pi^{3/2} Gamma(2nu+1)) cosh^{-2-2nu}(rho/2)
///  F(nu+1, nu+1/2; 2nu+1; sech^2(rho/2))`,
/// with the hypergeometric factor evaluated by Euler-integral quadrature.
pub fn resolvent_green_hypergeometric(nu: ResolventOrder, rho: f64, tol: f64) -> Result<f64> {
    check_rho(rho)?;
    let n = nu.0;
    let s = sech(0.5 * rho);
    let f = euler_integral_2f1(n + 1.0, n + 0.5, 2.0 * n + 1.0, s * s, tol)?;
    let pref = gamma(1.0 + n) * gamma(n + 0.5) / (8.0 * PI.powf(1.5) * gamma(2.0 * n + 1.0));
    Ok(pref * s.powf(2.0 + 2.0 * n) * f)
}

/// `(1/2) (R_{1/2} - R_{3/2})`, from `1/(s(s+2)) = (1/s - 1/(s+2))/2` with `P1 = R_{1/2}^{-1}`.
pub fn p2_green_partial_fraction(rho: f64) -> Result<f64> {
    let half = resolvent_green(ResolventOrder(0.5), rho)?;
    let three_halves = resolvent_green(ResolventOrder(1.5), rho)?;
    Ok(0.5 * (half - three_halves))
}

/// `d/drho p2_green = -e^{-rho} sech(rho/2) (1 + tanh(rho/2)/2) / (8 pi)`.
pub fn p2_green_derivative(rho: f64) -> Result<f64> {
    let g = p2_green(rho, HyperKernelForm::Canonical)?;
    Ok(-g * (1.0 + 0.5 * (0.5 * rho).tanh()))
}

/// `p2_green(rho) * 4 pi * e^{3 rho / 2}`, which tends to 1.
pub fn tail_ratio(rho: f64) -> Result<f64> {
    check_rho(rho)?;
    // equals 1 / (1 + e^{-rho}) exactly; evaluated through the canonical form
    let h = 0.5 * rho;
    Ok((-rho).exp() * sech(h) / (8.0 * PI) * 4.0 * PI * (3.0 * h).exp())
}

/// Polynomial fit of `8 pi p2_green(rho)` near the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadExpansion {
    /// Extrapolated value at `rho = 0`.
    pub limit: f64,
    /// Coefficient of `rho`.
    pub linear: f64,
    /// Coefficient of `rho^2`.
    pub quadratic: f64,
}

/// Richardson (Neville) extrapolation of `8 pi p2_green` to `rho = 0` from the
/// points `rho_k = rho0 / 2^k`, `k < levels`, plus a local polynomial fit for
/// the first two Taylor coefficients.
pub fn head_expansion(rho0: f64, levels: usize) -> Result<HeadExpansion> {
    check_rho(rho0)?;
    if levels < 3 {
        return Err(Error::Domain(
            "head extrapolation needs at least 3 levels".into(),
        ));
    }
    let xs: Vec<f64> = (0..levels)
        .map(|k| rho0 / f64::powi(2.0, k as i32))
        .collect();
    let ys = xs
        .iter()
        .map(|&r| p2_green(r, HyperKernelForm::Canonical).map(|g| 8.0 * PI * g))
        .collect::<Result<Vec<_>>>()?;
    let limit = neville_at_zero(&xs, &ys);
    // divided differences of (y - limit)/rho give the linear and quadratic terms
    let zs: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| (y - limit) / x).collect();
    let linear = neville_at_zero(&xs, &zs);
    let ws: Vec<f64> = xs.iter().zip(&zs).map(|(x, z)| (z - linear) / x).collect();
    let quadratic = neville_at_zero(&xs[..levels.min(4)], &ws[..levels.min(4)]);
    Ok(HeadExpansion {
        limit,
        linear,
        quadratic,
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

/// `n` logarithmically spaced points on `[a, b]`, endpoints included.
pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let (la, lb) = (a.ln(), b.ln());
            (0..n)
                .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// Pairwise relative spread of the four forms over `rho_list`.
pub fn check_four_forms(rho_list: &[f64], tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("hyper_kernel_four_forms", tol, tol).summary_only();
    rep.param("rho_min", rho_list.first())
        .param("rho_max", rho_list.last())
        .param("points", rho_list.len());
    for &rho in rho_list {
        let base = p2_green(rho, HyperKernelForm::Canonical)?;
        for form in &HyperKernelForm::ALL[1..] {
            rep.compare(format!("{form:?} at {rho}"), p2_green(rho, *form)?, base);
        }
    }
    Ok(rep.finish())
}

/// Positivity, strict decrease on the grid and a negative closed-form derivative.
pub fn check_monotone(rho_list: &[f64]) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("hyper_kernel_monotone", 0.0, 0.0).summary_only();
    let values = rho_list
        .iter()
        .map(|&r| p2_green(r, HyperKernelForm::Canonical))
        .collect::<Result<Vec<_>>>()?;
    let derivs = rho_list
        .iter()
        .map(|&r| p2_green_derivative(r))
        .collect::<Result<Vec<_>>>()?;
    let max_deriv = derivs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    rep.param("points", rho_list.len())
        .param("max_derivative", max_deriv);
    rep.add_samples(rho_list.len());
    rep.require("positive", values.iter().all(|&g| g > 0.0))
        .require(
            "strictly decreasing",
            values.windows(2).all(|w| w[1] < w[0]),
        )
        .require("negative derivative", max_deriv < 0.0);
    Ok(rep.finish())
}

/// Head limit `8 pi G -> 1` by extrapolation, tail `4 pi e^{3 rho/2} G -> 1` at
/// `rho = 40`, and the printed factor-2 constants for comparison.
pub fn check_asymptotics(tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("hyper_kernel_asymptotics", tol, tol);
    let head = head_expansion(1e-2, 8)?;
    let tail = tail_ratio(40.0)?;
    let raw = 8.0 * PI * p2_green(1e-4, HyperKernelForm::Canonical)?;
    rep.compare("head limit (extrapolated 8 pi G)", head.limit, 1.0)
        .compare("tail ratio at rho=40", tail, 1.0)
        .param("head", head)
        .param("head_raw_at_1e-4", raw)
        .param("head_limit", HEAD_LIMIT)
        .param("tail_constant", TAIL_CONSTANT)
        .param("printed_head_limit", PRINTED_HEAD_LIMIT)
        .param("printed_tail_constant", PRINTED_TAIL_CONSTANT)
        .param("printed_head_ratio", PRINTED_HEAD_LIMIT / HEAD_LIMIT)
        .param("printed_tail_ratio", PRINTED_TAIL_CONSTANT / TAIL_CONSTANT);
    rep.note("the expansion near 0 is 1 - rho + 3 rho^2/8, so the head has a linear term");
    Ok(rep.finish())
}

/// Closed-form resolvent against its hypergeometric form at `nu in {1/2, 3/2}`.
pub fn check_resolvent_forms(rho_list: &[f64], tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("resolvent_forms", tol, tol).summary_only();
    for nu in [0.5, 1.5] {
        let nu = ResolventOrder::new(nu)?;
        for &rho in rho_list {
            rep.compare(
                format!("nu={} rho={rho}", nu.0),
                resolvent_green_hypergeometric(nu, rho, 1e-15)?,
                resolvent_green(nu, rho)?,
            );
        }
    }
    Ok(rep.finish())
}

/// Closed-form derivative against fourth-order central differences.
pub fn check_derivative_fd(rho_list: &[f64], tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("hyper_kernel_derivative_fd", tol, tol).summary_only();
    let g = |r: f64| p2_green(r, HyperKernelForm::Canonical);
    let h = 1e-3;
    for &rho in rho_list {
        let fd = (-g(rho + 2.0 * h)? + 8.0 * g(rho + h)? - 8.0 * g(rho - h)? + g(rho - 2.0 * h)?)
            / (12.0 * h);
        rep.compare(format!("rho={rho}"), fd, p2_green_derivative(rho)?);
    }
    Ok(rep.finish())
}
