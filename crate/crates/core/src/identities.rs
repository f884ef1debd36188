//! Closed-form surface integrals behind the integral representation on the unit
//! ball, and the hypergeometric reduction of the hyperbolic kernel, each checked
//! by quadrature and returned as a [`CheckReport`].
//!
//! The source point is placed at `x = (0, 0, r)`; a separate check rotates it.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::euclid_kernel::{self, BoggioConstant};
use crate::geometry::{self, dot, BallPoint, Vec3};
use crate::hyper_kernel::{self, HyperKernelForm};
use crate::quadrature::{adaptive_integrate, gauss_legendre, SphereRule};
use crate::report::{CheckReport, ReportBuilder};
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereScheme {
    /// Gauss–Legendre in `|x - y|`; resolves the near-boundary peak.
    Graded,
    /// Gauss–Legendre in `cos(theta)`.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityConfig {
    pub n_theta: usize,
    pub n_phi: usize,
    pub scheme: SphereScheme,
    /// Relative tolerance for nonzero targets.
    pub tol: f64,
    /// Absolute tolerance for zero targets.
    pub zero_tol: f64,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig {
            n_theta: 64,
            n_phi: 64,
            scheme: SphereScheme::Graded,
            tol: 1e-8,
            zero_tol: 1e-9,
        }
    }
}

/// `0.1, 0.2, ..., 0.9`.
pub fn default_r_list() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn source(r: f64) -> Vec3 {
    [0.0, 0.0, r]
}

impl IdentityConfig {
    fn sphere_about(&self, x: &Vec3) -> Result<SphereRule> {
        match self.scheme {
            SphereScheme::Graded => SphereRule::graded(x, self.n_theta, self.n_phi),
            SphereScheme::Product => {
                let r = geometry::norm(x);
                if r > 0.0 {
                    SphereRule::product_about(
                        self.n_theta,
                        self.n_phi,
                        &geometry::scale(1.0 / r, x),
                    )
                } else {
                    SphereRule::product(self.n_theta, self.n_phi)
                }
            }
        }
    }

    fn builder(&self, name: &str, r_list: &[f64]) -> ReportBuilder {
        let mut b = ReportBuilder::new(name, self.tol, self.zero_tol);
        b.param("r_list", r_list)
            .param("n_theta", self.n_theta)
            .param("n_phi", self.n_phi)
            .param("scheme", self.scheme);
        b
    }
}

fn a_closed(r: f64) -> f64 {
    4.0 * PI / (1.0 - r * r)
}

/// Integrals over the unit sphere of functions of `y` with the source at `x`.
struct Surface {
    x: Vec3,
    rule: SphereRule,
}

impl Surface {
    fn new(cfg: &IdentityConfig, x: Vec3) -> Result<Self> {
        Ok(Surface {
            rule: cfg.sphere_about(&x)?,
            x,
        })
    }

    fn integrate<F: Fn(&Vec3, f64) -> f64>(&self, f: F) -> f64 {
        self.rule
            .integrate(|y| f(y, geometry::distance(&self.x, y)))
    }

    /// `q = |x|^2 y - x`.
    fn q(&self, y: &Vec3) -> Vec3 {
        geometry::sub(&geometry::scale(dot(&self.x, &self.x), y), &self.x)
    }
}

/// `U(x) = int 1/|x-y| = 4 pi`.
pub fn check_surface_newtonian(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("surface_newtonian", r_list);
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        rep.compare(format!("r={r}"), s.integrate(|_, d| 1.0 / d), 4.0 * PI);
    }
    Ok(rep.finish())
}

/// `A(r) = int 1/|x-y|^3 = 4 pi / (1 - r^2)`.
pub fn check_surface_cubed(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("surface_cubed", r_list);
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        rep.compare(
            format!("r={r}"),
            s.integrate(|_, d| 1.0 / (d * d * d)),
            a_closed(r),
        );
    }
    Ok(rep.finish())
}

/// `int x.y / |x-y|^3 = r^2 A(r)`.
pub fn check_moment_identity(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("moment_identity", r_list);
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        let lhs = s.integrate(|y, d| dot(&s.x, y) / (d * d * d));
        rep.compare(format!("r={r}"), lhs, r * r * a_closed(r));
    }
    Ok(rep.finish())
}

/// `I11 = int (2r^2 + 2)/|x-y| = 8 pi (r^2 + 1)`.
pub fn check_i11(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("I1_1", r_list);
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        let v = s.integrate(|_, d| (2.0 * r * r + 2.0) / d);
        rep.compare(format!("r={r}"), v, 8.0 * PI * (r * r + 1.0));
    }
    Ok(rep.finish())
}

fn i12_value(s: &Surface) -> f64 {
    s.integrate(|y, d| 4.0 * dot(&geometry::sub(y, &s.x), &s.q(y)) / (d * d * d))
}

/// `I12 = int 4 (y-x).q / |x-y|^3 = 16 pi r^2`.
pub fn check_i12(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("I1_2", r_list);
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        rep.compare(format!("r={r}"), i12_value(&s), 16.0 * PI * r * r);
    }
    Ok(rep.finish())
}

/// `(I11 - I12) / (8 pi) = 1 - r^2`, and the same total from integrating
/// `Delta_y G / C` directly.
pub fn check_i1_ratio(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("I1_ratio", r_list);
    let c = BoggioConstant::ORACLE;
    for &r in r_list {
        let s = Surface::new(cfg, source(r))?;
        let i11 = s.integrate(|_, d| (2.0 * r * r + 2.0) / d);
        let total = (i11 - i12_value(&s)) / (8.0 * PI);
        rep.compare(format!("r={r} split"), total, 1.0 - r * r);
        let x = BallPoint::new(s.x)?;
        let direct = s.rule.integrate_boundary(|y| {
            euclid_kernel::laplacian_y_g(&x, y, c).expect("interior source") / c.value()
        }) / (8.0 * PI);
        rep.compare(format!("r={r} direct"), direct, 1.0 - r * r);
    }
    Ok(rep.finish())
}

/// The four boundary integrals of `d/dnu Delta_y G / C`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IiTerms {
    /// `int -(2|x|^2 + 6) q.y / |x-y|^3`
    pub ii1: f64,
    /// `int 12 ((y-x).q)(q.y) / |x-y|^5`
    pub ii2: f64,
    /// `int (y-x).y / |x-y|^3`
    pub ii3: f64,
    /// `int (y-x*).y / |x-y|^3`
    pub ii4: f64,
    /// `ii1 + ii2 + 4(1 - r^2) ii3 - 4 r^2 ii4`
    pub total: f64,
    /// `int d/dnu Delta_y G / C` evaluated from the kernel directly.
    pub direct: f64,
}

pub fn ii_terms(x: &Vec3, cfg: &IdentityConfig) -> Result<IiTerms> {
    let s = Surface::new(cfg, *x)?;
    let r2 = dot(x, x);
    let xs = geometry::scale(1.0 / r2, x);
    let ii1 = s.integrate(|y, d| -(2.0 * r2 + 6.0) * dot(&s.q(y), y) / (d * d * d));
    let ii2 = s.integrate(|y, d| {
        let q = s.q(y);
        12.0 * dot(&geometry::sub(y, x), &q) * dot(&q, y) / d.powi(5)
    });
    let ii3 = s.integrate(|y, d| dot(&geometry::sub(y, x), y) / (d * d * d));
    let ii4 = s.integrate(|y, d| dot(&geometry::sub(y, &xs), y) / (d * d * d));
    let xp = BallPoint::new(*x)?;
    let direct = s.rule.integrate_boundary(|y| {
        let t = euclid_kernel::normal_derivative_terms(&xp, y).expect("interior source");
        t.iter().sum::<f64>()
    });
    Ok(IiTerms {
        ii1,
        ii2,
        ii3,
        ii4,
        total: ii1 + ii2 + 4.0 * (1.0 - r2) * ii3 - 4.0 * r2 * ii4,
        direct,
    })
}

/// `II1 = II4 = 0`, `II2 = 16 pi r^2`, `II3 = 4 pi`, and the C-free total `16 pi`.
pub fn check_ii_terms(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("II_terms", r_list);
    for &r in r_list {
        let t = ii_terms(&source(r), cfg)?;
        rep.compare(format!("r={r} II1"), t.ii1, 0.0)
            .compare(format!("r={r} II2"), t.ii2, 16.0 * PI * r * r)
            .compare(format!("r={r} II3"), t.ii3, 4.0 * PI)
            .compare(format!("r={r} II4"), t.ii4, 0.0)
            .compare(format!("r={r} total"), t.total, 16.0 * PI)
            .compare(format!("r={r} direct"), t.direct, 16.0 * PI);
    }
    Ok(rep.finish())
}

/// `int d/dnu Delta_y G dsigma` with kernel constant `c`: it must be constant in `r`,
/// and it must equal 1 for the representation to reproduce constants.
pub fn check_normalization(
    r_list: &[f64],
    cfg: &IdentityConfig,
    c: BoggioConstant,
) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("normalization", cfg.tol, cfg.zero_tol);
    rep.param("c", c.value())
        .param("r_list", r_list)
        .param("target", 1.0);
    let mut values = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let v = c.value() * ii_terms(&source(r), cfg)?.direct;
        values.push(v);
        rep.compare(format!("r={r}"), v, 1.0);
    }
    let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    rep.param("mean", mean)
        .param("relative_spread", spread / mean.abs())
        .param("sixteen_pi_c", 16.0 * PI * c.value());
    rep.require("constant in r", spread <= cfg.tol * mean.abs());
    Ok(rep.finish())
}

/// One row of the kernel-constant study.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantCandidate {
    pub label: String,
    pub c: f64,
    pub shape_checks_pass: bool,
    pub normalization_value: f64,
    pub normalization_pass: bool,
}

/// Runs the C-free checks and the normalization check for each candidate constant.
/// Only the normalization check depends on C.
pub fn constant_study(r_list: &[f64], cfg: &IdentityConfig) -> Result<Vec<ConstantCandidate>> {
    let candidates = [
        ("1/(16 pi)", BoggioConstant::ORACLE),
        (
            "Gamma(5/2)/(4 pi^(3/2))",
            BoggioConstant::gamma_expression(),
        ),
        ("3/(16 sqrt(pi))", BoggioConstant::printed()),
    ];
    let shape = check_i1_ratio(r_list, cfg)?.passed && check_ii_terms(r_list, cfg)?.passed;
    candidates
        .iter()
        .map(|(label, c)| {
            let n = check_normalization(r_list, cfg, *c)?;
            Ok(ConstantCandidate {
                label: label.to_string(),
                c: c.value(),
                shape_checks_pass: shape,
                normalization_value: n.params["mean"].as_f64().unwrap_or(f64::NAN),
                normalization_pass: n.passed,
            })
        })
        .collect()
}

/// `int_{-1}^{1} t^k A(t)^{-5/2} dt` with `A = 1 + r^2 - 2rt`, by Gauss–Legendre
/// in `s = sqrt(A)` (plain Gauss–Legendre in `t` for small `r`).
pub fn a52_moment(r: f64, k: i32, n: usize) -> Result<f64> {
    let gl = gauss_legendre(n)?;
    if r < 0.05 {
        return Ok(gl.integrate(-1.0, 1.0, |t| {
            t.powi(k) * (1.0 + r * r - 2.0 * r * t).powf(-2.5)
        }));
    }
    Ok(gl.integrate(1.0 - r, 1.0 + r, |s| {
        let t = (1.0 + r * r - s * s) / (2.0 * r);
        t.powi(k) * s.powi(-4) / r
    }))
}

pub fn check_a52_moments(r_list: &[f64], cfg: &IdentityConfig) -> Result<CheckReport> {
    let mut rep = cfg.builder("A52_moments", r_list);
    for &r in r_list {
        let den = 3.0 * (1.0 - r * r).powi(3);
        let r2 = r * r;
        rep.compare(
            format!("r={r} t^0"),
            a52_moment(r, 0, cfg.n_theta)?,
            2.0 * (3.0 + r2) / den,
        )
        .compare(
            format!("r={r} t^1"),
            a52_moment(r, 1, cfg.n_theta)?,
            2.0 * r * (5.0 - r2) / den,
        )
        .compare(
            format!("r={r} t^2"),
            a52_moment(r, 2, cfg.n_theta)?,
            2.0 * (-2.0 * r2 * r2 + 5.0 * r2 + 1.0) / den,
        );
    }
    Ok(rep.finish())
}

/// The moment combination `B = 2r^2 M0 - (r^3 + 3r) M1 + (r^2 + 1) M2` with
/// `Mk = int t^k A^{-5/2}`. Integrating out the azimuth gives `II2 = 24 pi r^2 B`,
/// so `B = 2/3` for every `r`.
pub fn ii2_moment_bracket(r: f64, n: usize) -> Result<f64> {
    Ok(
        2.0 * r * r * a52_moment(r, 0, n)? - (r * r * r + 3.0 * r) * a52_moment(r, 1, n)?
            + (r * r + 1.0) * a52_moment(r, 2, n)?,
    )
}

/// Euler-integral quadrature of `F(3/2, 2; 3; sech^2(rho/2))` against its closed
/// form, and the tanh/coth kernel against the canonical one.
pub fn check_hypergeom_reduction(rho_list: &[f64], tol: f64) -> Result<CheckReport> {
    let mut rep = ReportBuilder::new("hypergeometric_reduction", tol, tol);
    rep.param("rho_list", rho_list);
    for &rho in rho_list {
        let s = 1.0 / (0.5 * rho).cosh();
        let z = s * s;
        let f = |t: f64| t * (1.0 - z * t).powf(-1.5);
        let quad = 2.0 * adaptive_integrate(&f, 0.0, 1.0, 1e-15);
        rep.compare(
            format!("rho={rho} euler"),
            quad,
            hyper_kernel::gauss_2f1_euler(z)?,
        );
        let canonical = hyper_kernel::p2_green(rho, HyperKernelForm::Canonical)?;
        rep.compare(
            format!("rho={rho} tanh_coth"),
            hyper_kernel::p2_green(rho, HyperKernelForm::TanhCoth)?,
            canonical,
        );
        rep.compare(
            format!("rho={rho} hypergeometric"),
            hyper_kernel::p2_green(rho, HyperKernelForm::Hypergeometric)?,
            canonical,
        );
    }
    Ok(rep.finish())
}

/// Repeats the surface identities with the source rotated to `orientations`
/// seeded random directions per radius.
pub fn check_rotation_invariance(
    r_list: &[f64],
    cfg: &IdentityConfig,
    orientations: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut rep = cfg.builder("rotation_invariance", r_list).seed(seed);
    rep.param("orientations", orientations);
    let mut rng = sampling::rng(seed);
    for &r in r_list {
        for _ in 0..orientations {
            let x = geometry::scale(r, &sampling::on_sphere(&mut rng));
            let s = Surface::new(cfg, x)?;
            rep.compare(format!("r={r} U"), s.integrate(|_, d| 1.0 / d), 4.0 * PI);
            rep.compare(
                format!("r={r} A"),
                s.integrate(|_, d| 1.0 / (d * d * d)),
                a_closed(r),
            );
            if r > 0.0 {
                let t = ii_terms(&x, cfg)?;
                rep.compare(format!("r={r} II_total"), t.direct, 16.0 * PI);
            }
        }
    }
    Ok(rep.finish())
}

/// Every identity check at the given radii.
pub fn identity_suite(r_list: &[f64], cfg: &IdentityConfig, seed: u64) -> Result<Vec<CheckReport>> {
    let rho_list = [2.0 * 2f64.sqrt().acosh(), 0.01, 0.1, 1.0, 5.0, 20.0];
    Ok(vec![
        check_surface_newtonian(r_list, cfg)?,
        check_surface_cubed(r_list, cfg)?,
        check_moment_identity(r_list, cfg)?,
        check_i11(r_list, cfg)?,
        check_i12(r_list, cfg)?,
        check_i1_ratio(r_list, cfg)?,
        check_ii_terms(r_list, cfg)?,
        check_a52_moments(r_list, cfg)?,
        check_normalization(r_list, cfg, BoggioConstant::ORACLE)?,
        check_hypergeom_reduction(&rho_list, 1e-10)?,
        check_rotation_invariance(r_list, cfg, 3, seed)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> IdentityConfig {
        IdentityConfig::default()
    }

    fn assert_pass(r: CheckReport) {
        assert!(r.passed, "{}", r.summary_line());
    }

    #[test]
    fn spec_examples() {
        let c = cfg();
        let s = Surface::new(&c, source(0.5)).unwrap();
        assert_relative_eq!(
            s.integrate(|_, d| 1.0 / (d * d * d)),
            16.0 * PI / 3.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(s.integrate(|_, d| 2.5 / d), 10.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(i12_value(&s), 4.0 * PI, max_relative = 1e-12);
        let t = ii_terms(&source(0.5), &c).unwrap();
        assert_relative_eq!(t.ii2, 4.0 * PI, max_relative = 1e-12);
        assert!(t.ii1.abs() < 1e-9 && t.ii4.abs() < 1e-9);
        for r in [0.2, 0.5, 0.8] {
            assert_relative_eq!(
                ii_terms(&source(r), &c).unwrap().ii3,
                4.0 * PI,
                max_relative = 1e-12
            );
        }
        let s0 = Surface::new(&c, source(0.0)).unwrap();
        assert_relative_eq!(s0.integrate(|_, d| 1.0 / d), 4.0 * PI, max_relative = 1e-14);
        assert!(i12_value(&s0).abs() < 1e-14);
    }

    #[test]
    fn full_identity_grid() {
        let r = default_r_list();
        let c = cfg();
        for rep in identity_suite(&r, &c, 9).unwrap() {
            assert_pass(rep);
        }
    }

    #[test]
    fn moments_and_bracket() {
        assert_relative_eq!(
            a52_moment(1e-9, 2, 64).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-8
        );
        for r in [0.1, 0.5, 0.9] {
            assert_relative_eq!(
                ii2_moment_bracket(r, 64).unwrap(),
                2.0 / 3.0,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn product_rule_is_not_enough_near_the_boundary() {
        let c = IdentityConfig {
            scheme: SphereScheme::Product,
            ..cfg()
        };
        let r = check_surface_cubed(&[0.9], &c).unwrap();
        assert!(!r.passed);
        assert!(check_surface_newtonian(&[0.1, 0.5], &c).unwrap().passed);
    }

    #[test]
    fn only_the_oracle_constant_normalizes() {
        let study = constant_study(&[0.3, 0.6, 0.9], &cfg()).unwrap();
        assert_eq!(study.len(), 3);
        assert!(study.iter().all(|s| s.shape_checks_pass));
        let passing: Vec<_> = study.iter().filter(|s| s.normalization_pass).collect();
        assert_eq!(passing.len(), 1);
        assert_relative_eq!(passing[0].c, 1.0 / (16.0 * PI));
    }
}
