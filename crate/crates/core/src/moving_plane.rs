//! Sampling audits of the kernel inequalities behind the moving-plane argument,
//! and the resulting monotonicity of radial solutions.
//!
//! Notation: `Sigma_l = {x in B1 : x1 < l}`, `T_l = {x1 = l}`, and a bar denotes
//! reflection in `T_l`.

use std::path::Path;

use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::euclid_kernel::{boggio_g_extended, grad_x_raw, BoggioConstant};
use crate::geometry::{dot, PlaneReflector, Vec3};
use crate::radial_solver::RadialSolution;
use crate::report::{CheckReport, ReportBuilder};
use crate::sampling;

/// A sign that fails by more than this is a violation; within it, a tie.
pub const STRICTNESS_MARGIN: f64 = 1e-14;
/// At `l = 0` the pair sum may vanish; such samples are recorded as equality cases.
pub const EQUALITY_TOL: f64 = 1e-12;
/// Below this cross-section radius of `T_l ∩ B1` the sampling is flagged as degenerate.
const DEGENERATE_SECTION: f64 = 1e-6;
/// Violating samples kept for the CSV dump.
const MAX_RECORDED: usize = 1000;

const C: BoggioConstant = BoggioConstant::ORACLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// `G_x1(x, y) < 0` fails.
    GradientSign,
    /// `G_x1(x, y) + G_x1(x, ybar) <= 0` fails.
    PairSum,
    /// `G(x, y) > max(G(x, ybar), G(xbar, y))` fails.
    Dominance,
    /// `G(x, y) - G(xbar, ybar) > |G(x, ybar) - G(xbar, y)|` fails.
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub lambda: f64,
    pub x: Vec3,
    pub y: Vec3,
    /// Signed margin of the inequality; positive means satisfied.
    pub margin: f64,
}

/// Uniform point of the disc `T_l ∩ B1`.
fn on_section<R: Rng>(rng: &mut R, lambda: f64) -> Vec3 {
    let s = (1.0 - lambda * lambda).max(0.0).sqrt();
    loop {
        let (u, v): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if u * u + v * v < 1.0 {
            return [lambda, s * u, s * v];
        }
    }
}

/// Uniform point of `Sigma_l`.
fn in_cap<R: Rng>(rng: &mut R, plane: &PlaneReflector) -> Vec3 {
    loop {
        let y = sampling::in_ball(rng, 1.0);
        if plane.in_cap(&y) {
            return y;
        }
    }
}

fn inside(y: &Vec3) -> bool {
    dot(y, y) < 1.0
}

/// `G_x1` with the kernel extended by zero outside the ball.
fn g_x1(x: &Vec3, y: &Vec3) -> Result<f64> {
    if !inside(x) || !inside(y) {
        return Ok(0.0);
    }
    Ok(grad_x_raw(x, y, C)?[0])
}

/// Sixth-order central difference of the extended kernel in `x1`.
fn g_x1_fd(x: &Vec3, y: &Vec3) -> f64 {
    const H: f64 = 1e-4;
    let g = |t: f64| boggio_g_extended(&[x[0] + t, x[1], x[2]], y, C);
    (45.0 * (g(H) - g(-H)) - 9.0 * (g(2.0 * H) - g(-2.0 * H)) + (g(3.0 * H) - g(-3.0 * H)))
        / (60.0 * H)
}

/// Verdict on an inequality `margin > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Holds,
    Tie,
    Violated,
}

fn judge(margin: f64) -> Verdict {
    if margin > STRICTNESS_MARGIN {
        Verdict::Holds
    } else if margin >= -STRICTNESS_MARGIN {
        Verdict::Tie
    } else {
        Verdict::Violated
    }
}

#[derive(Default)]
struct Tally {
    violations: Vec<Violation>,
    counts: [usize; 4],
    ties: [usize; 4],
    min_margin: [f64; 4],
}

impl Tally {
    fn new() -> Self {
        Tally {
            min_margin: [f64::INFINITY; 4],
            ..Default::default()
        }
    }

    fn record(
        &mut self,
        kind: ViolationKind,
        lambda: f64,
        x: Vec3,
        y: Vec3,
        margin: f64,
    ) -> Verdict {
        let i = kind as usize;
        self.min_margin[i] = self.min_margin[i].min(margin);
        let v = judge(margin);
        match v {
            Verdict::Tie => self.ties[i] += 1,
            Verdict::Violated => {
                self.counts[i] += 1;
                if self.violations.len() < MAX_RECORDED {
                    self.violations.push(Violation {
                        kind,
                        lambda,
                        x,
                        y,
                        margin,
                    });
                }
            }
            Verdict::Holds => {}
        }
        v
    }
}

fn gradient_signs(
    lambda: f64,
    n_samples: usize,
    seed: u64,
    deriv: impl Fn(&Vec3, &Vec3) -> Result<f64>,
) -> Result<(Tally, usize)> {
    let plane = PlaneReflector::new(lambda)?;
    let mut rng = sampling::rng(seed);
    let mut tally = Tally::new();
    let mut equalities = 0;
    for _ in 0..n_samples {
        let x = on_section(&mut rng, lambda);
        let y = in_cap(&mut rng, &plane);
        let y_bar = plane.reflect(&y);
        let g1 = deriv(&x, &y)?;
        let g2 = deriv(&x, &y_bar)?;
        tally.record(ViolationKind::GradientSign, lambda, x, y, -g1);
        let sum = g1 + g2;
        if lambda == 0.0 {
            if sum.abs() <= EQUALITY_TOL {
                equalities += 1;
            } else {
                tally.record(ViolationKind::PairSum, lambda, x, y, -sum);
            }
        } else {
            tally.record(ViolationKind::PairSum, lambda, x, y, -sum);
        }
    }
    Ok((tally, equalities))
}

/// Sign audit of `G_x1(x, y)` and `G_x1(x, y) + G_x1(x, ybar)` for
/// `x in T_l ∩ B1`, `y in Sigma_l`.
pub fn audit_g_sign_detailed(
    lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(CheckReport, Vec<Violation>)> {
    let (tally, equalities) = gradient_signs(lambda, n_samples, seed, g_x1)?;
    let mut rep = ReportBuilder::new("moving_plane_g_sign", 0.0, 0.0)
        .seed(seed)
        .summary_only();
    rep.param("lambda", lambda)
        .param("margin", STRICTNESS_MARGIN)
        .param("sign_violations", tally.counts[0])
        .param("pair_violations", tally.counts[1])
        .param("sign_ties", tally.ties[0])
        .param("pair_ties", tally.ties[1])
        .param("equality_cases", equalities)
        .param("min_sign_margin", tally.min_margin[0])
        .param("min_pair_margin", tally.min_margin[1]);
    let section = (1.0 - lambda * lambda).sqrt();
    if section < DEGENERATE_SECTION {
        rep.note(format!(
            "degenerate sampling: cross-section radius {section:.3e}"
        ));
    }
    rep.add_samples(n_samples);
    rep.require(
        "no violations",
        tally.counts[0] == 0 && tally.counts[1] == 0,
    );
    Ok((rep.finish(), tally.violations))
}

pub fn audit_g_sign(lambda: f64, n_samples: usize, seed: u64) -> Result<CheckReport> {
    audit_g_sign_detailed(lambda, n_samples, seed).map(|r| r.0)
}

/// Positions of the sign-audit violations under the analytic and the
/// finite-difference `G_x1` over the same samples.
pub fn sign_violation_sets(
    lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(Vec<Violation>, Vec<Violation>)> {
    let (analytic, _) = gradient_signs(lambda, n_samples, seed, g_x1)?;
    let (fd, _) = gradient_signs(lambda, n_samples, seed, |x, y| Ok(g_x1_fd(x, y)))?;
    Ok((analytic.violations, fd.violations))
}

/// Audit of `G(x,y) > max(G(x,ybar), G(xbar,y))` and
/// `G(x,y) - G(xbar,ybar) > |G(x,ybar) - G(xbar,y)|` for `x != y` in `Sigma_l`.
pub fn audit_g_compare_detailed(
    lambda: f64,
    n_samples: usize,
    seed: u64,
) -> Result<(CheckReport, Vec<Violation>)> {
    let plane = PlaneReflector::new(lambda)?;
    let mut rng = sampling::rng(seed);
    let mut tally = Tally::new();
    let mut screened = 0;
    while screened < n_samples {
        let x = in_cap(&mut rng, &plane);
        let y = in_cap(&mut rng, &plane);
        if x == y {
            continue;
        }
        screened += 1;
        let (xb, yb) = (plane.reflect(&x), plane.reflect(&y));
        let g = boggio_g_extended(&x, &y, C);
        let g_xyb = boggio_g_extended(&x, &yb, C);
        let g_xby = boggio_g_extended(&xb, &y, C);
        let g_xbyb = boggio_g_extended(&xb, &yb, C);
        tally.record(ViolationKind::Dominance, lambda, x, y, g - g_xyb.max(g_xby));
        tally.record(
            ViolationKind::Difference,
            lambda,
            x,
            y,
            g - g_xbyb - (g_xyb - g_xby).abs(),
        );
    }
    let mut rep = ReportBuilder::new("moving_plane_g_compare", 0.0, 0.0)
        .seed(seed)
        .summary_only();
    rep.param("lambda", lambda)
        .param("margin", STRICTNESS_MARGIN)
        .param("dominance_violations", tally.counts[2])
        .param("difference_violations", tally.counts[3])
        .param("dominance_ties", tally.ties[2])
        .param("difference_ties", tally.ties[3])
        .param("min_dominance_margin", tally.min_margin[2])
        .param("min_difference_margin", tally.min_margin[3]);
    if lambda == 0.0 {
        rep.note("l = 0: reflection is an isometry of the ball, so the difference inequality degenerates to ties");
    }
    rep.add_samples(n_samples);
    rep.require(
        "no violations",
        tally.counts[2] == 0 && tally.counts[3] == 0,
    );
    Ok((rep.finish(), tally.violations))
}

pub fn audit_g_compare(lambda: f64, n_samples: usize, seed: u64) -> Result<CheckReport> {
    audit_g_compare_detailed(lambda, n_samples, seed).map(|r| r.0)
}

pub fn write_violations_csv(path: &Path, violations: &[Violation]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "kind", "lambda", "x1", "x2", "x3", "y1", "y2", "y3", "margin",
    ])?;
    for v in violations {
        let mut rec = vec![format!("{:?}", v.kind), v.lambda.to_string()];
        rec.extend(v.x.iter().chain(&v.y).map(|c| format!("{c:.17e}")));
        rec.push(format!("{:.6e}", v.margin));
        w.write_record(&rec)?;
    }
    w.flush()
}

/// Strict increase of the solution over consecutive grid nodes.
pub fn check_monotone_radial(sol: &RadialSolution) -> CheckReport {
    let mut rep = ReportBuilder::new("radial_monotonicity", 0.0, 0.0).summary_only();
    let min_inc = sol.min_increment();
    rep.param("a", sol.a)
        .param("b", sol.b)
        .param("source", sol.source.describe())
        .param("min_increment", min_inc);
    if min_inc == 0.0 && sol.states.iter().all(|s| s[0] == sol.states[0][0]) {
        rep.note("constant profile: the degenerate boundary case of monotonicity");
    }
    rep.add_samples(sol.states.len() - 1);
    rep.require("strictly increasing", min_inc > 0.0);
    rep.finish()
}

/// Sign of `dv/dx1 = v'(r) x1 / r` on sampled points of `T_l ∩ B1`.
pub fn check_boundary_x1_derivative(
    sol: &RadialSolution,
    l_list: &[f64],
    samples_per_plane: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("boundary_x1_derivative", 0.0, 0.0)
        .seed(seed)
        .summary_only();
    let mut rng = sampling::rng(seed);
    let mut min_deriv = f64::INFINITY;
    let mut nonpositive = 0usize;
    for &l in l_list {
        PlaneReflector::new(l)?;
        for _ in 0..samples_per_plane {
            let x = on_section(&mut rng, l);
            let r = dot(&x, &x).sqrt().min(1.0);
            let d = if x[0] == 0.0 {
                0.0
            } else {
                sol.evaluate(r)?[1] * x[0] / r
            };
            min_deriv = min_deriv.min(d);
            if !(d > 0.0) {
                nonpositive += 1;
            }
        }
    }
    rep.param("l_list", l_list)
        .param("min_derivative", min_deriv)
        .param("nonpositive", nonpositive);
    rep.add_samples(l_list.len() * samples_per_plane);
    rep.require("positive derivative", nonpositive == 0);
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_solver::{shoot, ShootingConfig, SourceFn};

    #[test]
    fn sign_audit_passes() {
        for lambda in [0.0, 0.5, 0.9] {
            let rep = audit_g_sign(lambda, 20_000, 42).unwrap();
            assert!(rep.passed, "{lambda}: {:?}", rep.params);
        }
    }

    #[test]
    fn compare_audit_passes() {
        for lambda in [0.2, 0.5, 0.9] {
            let rep = audit_g_compare(lambda, 20_000, 7).unwrap();
            assert!(rep.passed, "{lambda}: {:?}", rep.params);
        }
    }

    #[test]
    fn symmetric_plane_gives_equalities() {
        let plane = PlaneReflector::new(0.0).unwrap();
        let x = [0.0, 0.3, -0.2];
        let y = [-0.4, 0.1, 0.2];
        let s = g_x1(&x, &y).unwrap() + g_x1(&x, &plane.reflect(&y)).unwrap();
        assert!(s.abs() <= EQUALITY_TOL);
        let rep = audit_g_sign(0.0, 2000, 1).unwrap();
        assert_eq!(rep.params["equality_cases"], 2000);
    }

    #[test]
    fn reflected_point_outside_ball() {
        let plane = PlaneReflector::new(0.5).unwrap();
        let y = [-0.2, 0.0, 0.95];
        let yb = plane.reflect(&y);
        assert!(!inside(&yb));
        assert_eq!(boggio_g_extended(&[0.1, 0.0, 0.0], &yb, C), 0.0);
    }

    #[test]
    fn fd_and_analytic_agree() {
        for lambda in [0.1, 0.5, 0.9] {
            let (a, f) = sign_violation_sets(lambda, 1000, 3).unwrap();
            assert_eq!(a, f);
        }
        let plane = PlaneReflector::new(0.3).unwrap();
        let mut rng = sampling::rng(5);
        for _ in 0..200 {
            let x = on_section(&mut rng, 0.3);
            let y = in_cap(&mut rng, &plane);
            if (x[0] - y[0]).abs() < 0.05 || dot(&x, &x) > 0.9 {
                continue;
            }
            let (a, f) = (g_x1(&x, &y).unwrap(), g_x1_fd(&x, &y));
            assert!((a - f).abs() <= 1e-7 * a.abs().max(1e-3), "{a} {f}");
        }
    }

    #[test]
    fn seed_determinism() {
        assert_eq!(
            audit_g_sign(0.3, 3000, 9).unwrap(),
            audit_g_sign(0.3, 3000, 9).unwrap()
        );
        assert_eq!(
            audit_g_compare(0.3, 3000, 9).unwrap(),
            audit_g_compare(0.3, 3000, 9).unwrap()
        );
    }

    #[test]
    fn bad_plane_is_an_error() {
        assert!(audit_g_sign(1.0, 10, 0).is_err());
        assert!(audit_g_compare(-0.1, 10, 0).is_err());
    }

    #[test]
    fn monotone_profiles() {
        let cfg = ShootingConfig::default();
        let crit = shoot(1.0, 0.5, &SourceFn::critical(), &cfg).unwrap();
        assert!(check_monotone_radial(&crit).passed);
        let rep = check_boundary_x1_derivative(&crit, &[0.5, 0.9], 500, 11).unwrap();
        assert!(rep.passed, "{:?}", rep.params);
        let parabola = shoot(1.0, 0.5, &SourceFn::Zero, &cfg).unwrap();
        assert!(check_monotone_radial(&parabola).passed);
        let flat = shoot(1.0, 0.0, &SourceFn::Zero, &cfg).unwrap();
        let rep = check_monotone_radial(&flat);
        assert!(!rep.passed);
        assert!(!rep.notes.is_empty());
    }
}
