//! Detectors comparing printed constants with the values the numerical oracles force.

use std::f64::consts::PI;

use serde::Serialize;
use serde_json::json;

use crate::error::Result;
use crate::euclid_kernel::BoggioConstant;
use crate::hyper_kernel::{
    head_expansion, p2_green, tail_ratio, HyperKernelForm, HEAD_LIMIT, HYPERGEOMETRIC_PREFACTOR,
    PRINTED_HEAD_LIMIT, PRINTED_HYPERGEOMETRIC_PREFACTOR, PRINTED_TAIL_CONSTANT, TAIL_CONSTANT,
};
use crate::identities::{constant_study, IdentityConfig};
use crate::radial_solver::{
    calibrate_beta, choi_xu_grid, choi_xu_profile, printed_beta, shoot, ShootingConfig, SourceFn,
};
use crate::representation::{check_representation, PotentialRule, RepresentationConstants};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErratumRow {
    pub detector: String,
    pub printed: String,
    pub oracle: String,
    pub oracle_description: String,
    /// The oracle value passes its check and every printed candidate fails it.
    pub confirmed: bool,
    pub evidence: serde_json::Value,
}

/// Kernel constant: only `16 pi C = 1` lets the representation reproduce constants.
pub fn detect_boggio_constant() -> Result<ErratumRow> {
    let cfg = IdentityConfig::default();
    let study = constant_study(&[0.3, 0.6, 0.9], &cfg)?;
    let confirmed = study
        .iter()
        .all(|c| c.normalization_pass == (c.c == BoggioConstant::ORACLE.value()));
    Ok(ErratumRow {
        detector: "boggio-C".into(),
        printed: format!(
            "3/(16 sqrt(pi)) = {:.6e}, Gamma(5/2)/(4 pi^(3/2)) = 3/(16 pi) = {:.6e}",
            BoggioConstant::printed().value(),
            BoggioConstant::gamma_expression().value()
        ),
        oracle: format!("1/(16 pi) = {:.6e}", BoggioConstant::ORACLE.value()),
        oracle_description:
            "boundary flux of the y-Laplacian normal derivative equals 16 pi C and must be 1 \
                             for the f = 0 representation to reproduce constants"
                .into(),
        confirmed,
        evidence: json!(study),
    })
}

/// Representation constants: the boundary trace forces `C1 = a`, `C2 = b/2`.
pub fn detect_representation_constants() -> Result<ErratumRow> {
    let (a, b) = (1.0, 0.5);
    let sol = shoot(a, b, &SourceFn::critical(), &ShootingConfig::default())?;
    let rule = PotentialRule::default();
    let (oracle, _) =
        check_representation(&sol, &RepresentationConstants::oracle(a, b), &rule, 1e-4)?;
    let (printed, _) =
        check_representation(&sol, &RepresentationConstants::printed(a, b), &rule, 1e-4)?;
    Ok(ErratumRow {
        detector: "theorem1-constants".into(),
        printed: "(3 sqrt(pi) a, (3 sqrt(pi)/2) b)".into(),
        oracle: "(a, b/2)".into(),
        oracle_description:
            "the representation must return v = a on the sphere, where the Green potential vanishes"
                .into(),
        confirmed: oracle.passed && !printed.passed,
        evidence: json!({
            "a": a,
            "b": b,
            "oracle_max_rel_err": oracle.max_rel_err,
            "printed_max_rel_err": printed.max_rel_err,
        }),
    })
}

/// Hyperbolic kernel factors: head, tail and hypergeometric prefactor.
pub fn detect_hyper_factors() -> Result<ErratumRow> {
    let head = head_expansion(1e-2, 8)?.limit * HEAD_LIMIT;
    let tail = tail_ratio(40.0)? * TAIL_CONSTANT;
    let rho = 1.0f64;
    let h = 0.5 * rho;
    let (t, s) = (h.tanh(), 1.0 / h.cosh());
    let f = crate::hyper_kernel::gauss_2f1_euler(s * s)?;
    let prefactor = p2_green(rho, HyperKernelForm::Canonical)? / (t * s.powi(3) * f);
    let rel = |x: f64, y: f64| ((x - y) / y).abs();
    let confirmed = rel(head, HEAD_LIMIT) < 1e-6
        && rel(tail, TAIL_CONSTANT) < 1e-6
        && rel(prefactor, HYPERGEOMETRIC_PREFACTOR) < 1e-12
        && rel(PRINTED_HEAD_LIMIT, head) > 0.5
        && rel(PRINTED_TAIL_CONSTANT, tail) > 0.5
        && rel(PRINTED_HYPERGEOMETRIC_PREFACTOR, prefactor) > 0.5;
    Ok(ErratumRow {
        detector: "hyper-kernel-factors".into(),
        printed: "head 1/(4 pi), tail 1/(2 pi), hypergeometric prefactor 1/(16 pi)".into(),
        oracle: "head 1/(8 pi), tail 1/(4 pi), hypergeometric prefactor 1/(32 pi)".into(),
        oracle_description:
            "limits of the canonical form e^-rho / (8 pi cosh(rho/2)), which the resolvent \
                             partial fractions reproduce"
                .into(),
        confirmed,
        evidence: json!({
            "head_measured": head,
            "tail_measured": tail,
            "prefactor_measured": prefactor,
            "printed_over_measured": [PRINTED_HEAD_LIMIT / head, PRINTED_TAIL_CONSTANT / tail, PRINTED_HYPERGEOMETRIC_PREFACTOR / prefactor],
        }),
    })
}

/// Entire-solution constant: the residual oracle forces `beta = 15^(-1/2) alpha^-4`.
pub fn detect_choi_xu_beta() -> Result<ErratumRow> {
    let mut rows = Vec::new();
    let mut confirmed = true;
    for alpha in [0.5, 1.0, 2.0] {
        let cal = calibrate_beta(alpha)?;
        let oracle = 1.0 / (15f64.sqrt() * alpha.powi(4));
        let printed = printed_beta(alpha);
        let printed_residual =
            choi_xu_profile(alpha, printed)?.closed_form_residual(&choi_xu_grid());
        confirmed &= ((cal.beta - oracle) / oracle).abs() < 1e-8 && printed_residual > 1e-3;
        rows.push(json!({
            "alpha": alpha,
            "calibrated": cal.beta,
            "oracle": oracle,
            "printed": printed,
            "printed_residual": printed_residual,
        }));
    }
    Ok(ErratumRow {
        detector: "choi-xu-beta".into(),
        printed: "sqrt(15 alpha^8) = sqrt(15) alpha^4".into(),
        oracle: "15^(-1/2) alpha^-4".into(),
        oracle_description:
            "value of beta that makes alpha sqrt(beta + r^2) satisfy Delta^2 v = -v^-7".into(),
        confirmed,
        evidence: json!(rows),
    })
}

pub fn errata_table() -> Result<Vec<ErratumRow>> {
    Ok(vec![
        detect_boggio_constant()?,
        detect_representation_constants()?,
        detect_hyper_factors()?,
        detect_choi_xu_beta()?,
    ])
}

/// `16 pi C` for the printed kernel constants; 1 for the oracle.
pub fn boggio_flux_ratios() -> [f64; 3] {
    [
        16.0 * PI * BoggioConstant::ORACLE.value(),
        16.0 * PI * BoggioConstant::printed().value(),
        16.0 * PI * BoggioConstant::gamma_expression().value(),
    ]
}
