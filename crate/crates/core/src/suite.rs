//! Named batteries of checks, as run by `paneitz verify`.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::euclid_kernel::{
    check_clamped_boundary, check_gradient_fd, check_laplacian_fd, check_normal_derivative_fd,
    check_positivity, check_singular_part, BoggioConstant,
};
use crate::hyper_kernel::{
    check_asymptotics, check_derivative_fd, check_four_forms, check_monotone,
    check_resolvent_forms, logspace,
};
use crate::hyperbolic_map::{
    ball_to_hyperbolic, check_conformal_covariance, check_law_of_cosines, check_p2_equation,
    growth_coefficient, nonexistence_demo, round_trip_error, CovarianceProfile, NonexistenceConfig,
    DEFAULT_RHO_MAX,
};
use crate::identities::{default_r_list, identity_suite, IdentityConfig};
use crate::moving_plane::{
    audit_g_compare, audit_g_sign, check_boundary_x1_derivative, check_monotone_radial,
};
use crate::radial_solver::{check_choi_xu, shoot, RadialSolution, ShootingConfig, SourceFn};
use crate::report::{CheckReport, ReportBuilder};
use crate::representation::{check_representation, PotentialRule, RepresentationConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Kernels,
    Identities,
    Hyper,
    MovingPlane,
    /// Solver, representation and transport checks on solved instances.
    Solutions,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "kernels",
        "identities",
        "hyper",
        "moving-plane",
        "solutions",
        "all",
    ];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Kernels => "kernels",
            Suite::Identities => "identities",
            Suite::Hyper => "hyper",
            Suite::MovingPlane => "moving-plane",
            Suite::Solutions => "solutions",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernels" => Ok(Suite::Kernels),
            "identities" => Ok(Suite::Identities),
            "hyper" => Ok(Suite::Hyper),
            "moving-plane" => Ok(Suite::MovingPlane),
            "solutions" => Ok(Suite::Solutions),
            "all" => Ok(Suite::All),
            _ => Err(Error::Domain(format!(
                "unknown suite {s:?}; expected one of {:?}",
                Suite::NAMES
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub r_list: Vec<f64>,
    pub n_theta: usize,
    /// Kernel finite-difference samples.
    pub fd_samples: usize,
    /// Moving-plane samples per plane position.
    pub audit_samples: usize,
    pub seed: u64,
    /// Overrides the relative tolerance of the identity checks.
    pub tol: Option<f64>,
    pub lambdas: Vec<f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            r_list: default_r_list(),
            n_theta: 64,
            fd_samples: 1000,
            audit_samples: 100_000,
            seed: 42,
            tol: None,
            lambdas: (0..=9).map(|k| k as f64 / 10.0).collect(),
        }
    }
}

impl SuiteConfig {
    fn identity_config(&self) -> IdentityConfig {
        let mut cfg = IdentityConfig {
            n_theta: self.n_theta,
            n_phi: self.n_theta,
            ..IdentityConfig::default()
        };
        if let Some(tol) = self.tol {
            cfg.tol = tol;
            cfg.zero_tol = cfg.zero_tol.min(tol);
        }
        cfg
    }
}

pub fn kernel_checks(cfg: &SuiteConfig) -> Vec<CheckReport> {
    let c = BoggioConstant::ORACLE;
    let n = cfg.fd_samples;
    vec![
        check_laplacian_fd(n, cfg.seed, 1e-6, c),
        check_normal_derivative_fd(n, cfg.seed, 1e-5, c),
        check_gradient_fd(n, cfg.seed, 1e-9, c),
        check_clamped_boundary(n, n, cfg.seed, c),
        check_singular_part(c, 1e-8),
        check_positivity(n, cfg.seed, c),
    ]
}

pub fn hyper_checks(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = logspace(1e-3, 40.0, 200);
    let mid = logspace(0.1, 20.0, 25);
    let mut out = vec![
        check_four_forms(&grid, 1e-10)?,
        check_monotone(&grid)?,
        check_asymptotics(1e-6)?,
        check_resolvent_forms(&mid, 1e-9)?,
        check_derivative_fd(&mid, 1e-8)?,
        check_law_of_cosines(10_000, cfg.seed, 1e-10)?,
    ];
    for profile in CovarianceProfile::ALL {
        out.push(check_conformal_covariance(
            profile,
            &[0.5, 1.0, 1.5, 2.0],
            1e-4,
        )?);
    }
    Ok(out)
}

pub fn moving_plane_checks(cfg: &SuiteConfig, sol: &RadialSolution) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for (k, &lambda) in cfg.lambdas.iter().enumerate() {
        let seed = cfg.seed.wrapping_add(k as u64);
        out.push(audit_g_sign(lambda, cfg.audit_samples, seed)?);
        if lambda > 0.0 {
            out.push(audit_g_compare(lambda, cfg.audit_samples, seed)?);
        }
    }
    out.push(check_monotone_radial(sol));
    let ls: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    out.push(check_boundary_x1_derivative(sol, &ls, 1000, cfg.seed)?);
    Ok(out)
}

/// Boundary data `(a, b)` whose transported profiles are checked against `alpha = a/sqrt(2)`.
pub const TRANSPORT_PAIRS: [(f64, f64); 5] =
    [(1.0, 0.5), (2.0, 0.5), (1.0, 0.0), (1.5, 0.5), (1.2, 0.3)];

/// Choi–Xu, representation, transport and nonexistence checks around the
/// reference instance `(a, b, p) = (1, 1/2, 7)`.
pub fn solution_checks(sol: &RadialSolution) -> Result<Vec<CheckReport>> {
    let scfg = ShootingConfig::default();
    let rule = PotentialRule::default();
    let mut out = vec![check_choi_xu(&[0.5, 1.0, 2.0], 1e-8)?];
    out.push(
        check_representation(
            sol,
            &RepresentationConstants::oracle(sol.a, sol.b),
            &rule,
            1e-4,
        )?
        .0,
    );
    let zero = shoot(sol.a, sol.b, &SourceFn::Zero, &scfg)?;
    let mut zero_rep = check_representation(
        &zero,
        &RepresentationConstants::oracle(sol.a, sol.b),
        &rule,
        1e-10,
    )?
    .0;
    zero_rep.name = "representation_zero_source".into();
    out.push(zero_rep);

    let mut transport = ReportBuilder::new("conformal_transport", 1e-3, 1e-13);
    transport.compare("round trip", round_trip_error(sol, 0.999), 0.0);
    for (a, b) in TRANSPORT_PAIRS {
        let s = shoot(a, b, &SourceFn::critical(), &scfg)?;
        let g = growth_coefficient(&ball_to_hyperbolic(&s, DEFAULT_RHO_MAX)?)?;
        transport.compare(format!("alpha for (a,b)=({a},{b})"), g.alpha, a / SQRT_2);
    }
    out.push(transport.finish());
    out.push(check_p2_equation(sol, DEFAULT_RHO_MAX, 23, 1e-3)?);
    out.push(nonexistence_demo(1.0, &[0.0, 5.0, 10.0, 15.0], &NonexistenceConfig::default())?.0);
    Ok(out)
}

/// Reference solution for the suites that need one.
pub fn reference_solution() -> Result<RadialSolution> {
    shoot(1.0, 0.5, &SourceFn::critical(), &ShootingConfig::default())
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let needs_solution = matches!(suite, Suite::MovingPlane | Suite::Solutions | Suite::All);
    let sol = if needs_solution {
        Some(reference_solution()?)
    } else {
        None
    };
    let mut out = Vec::new();
    if matches!(suite, Suite::Kernels | Suite::All) {
        out.extend(kernel_checks(cfg));
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        out.extend(identity_suite(
            &cfg.r_list,
            &cfg.identity_config(),
            cfg.seed,
        )?);
    }
    if matches!(suite, Suite::Hyper | Suite::All) {
        out.extend(hyper_checks(cfg)?);
    }
    if let Some(sol) = &sol {
        if matches!(suite, Suite::MovingPlane | Suite::All) {
            out.extend(moving_plane_checks(cfg, sol)?);
        }
        if matches!(suite, Suite::Solutions | Suite::All) {
            out.extend(solution_checks(sol)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn quick_suites_pass() {
        let cfg = SuiteConfig {
            fd_samples: 200,
            audit_samples: 2000,
            ..SuiteConfig::default()
        };
        for suite in [
            Suite::Kernels,
            Suite::Hyper,
            Suite::MovingPlane,
            Suite::Solutions,
        ] {
            for rep in run_suite(suite, &cfg).unwrap() {
                assert!(rep.passed, "{suite}: {}", rep.summary_line());
            }
        }
    }

    #[test]
    fn unattainable_tolerance_fails() {
        let cfg = SuiteConfig {
            tol: Some(1e-30),
            r_list: vec![0.5],
            ..SuiteConfig::default()
        };
        let reps = run_suite(Suite::Identities, &cfg).unwrap();
        assert!(reps.iter().any(|r| !r.passed));
    }
}
