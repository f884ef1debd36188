//! The integral representation of a clamped solution on the unit ball:
//!
//! `v(x) = C1 + C2 (|x|^2 - 1) - int_{B1} G(x, y) f(v(y)) dy`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::euclid_kernel::{boggio_g_extended, BoggioConstant};
use crate::geometry::{norm, BallPoint};
use crate::quadrature::ball_integral_centered;
use crate::radial_solver::{RadialSolution, SourceFn};
use crate::report::{CheckReport, ReportBuilder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstantsProvenance {
    /// `C1 = a`, `C2 = b/2`: the pair that reproduces the boundary data.
    Oracle,
    /// `C1 = 3 sqrt(pi) a`, `C2 = (3 sqrt(pi)/2) b`, the printed values.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepresentationConstants {
    pub c1: f64,
    pub c2: f64,
    pub provenance: ConstantsProvenance,
}

impl RepresentationConstants {
    pub fn oracle(a: f64, b: f64) -> Self {
        RepresentationConstants {
            c1: a,
            c2: 0.5 * b,
            provenance: ConstantsProvenance::Oracle,
        }
    }

    pub fn printed(a: f64, b: f64) -> Self {
        let k = 3.0 * std::f64::consts::PI.sqrt();
        RepresentationConstants {
            c1: k * a,
            c2: 0.5 * k * b,
            provenance: ConstantsProvenance::Printed,
        }
    }

    pub fn for_provenance(p: ConstantsProvenance, a: f64, b: f64) -> Self {
        match p {
            ConstantsProvenance::Oracle => Self::oracle(a, b),
            ConstantsProvenance::Printed => Self::printed(a, b),
        }
    }
}

/// Refinement schedule for the Green potential: spherical coordinates centred at
/// `x` with `8, 16, ..., 8 * 2^(levels-1)` points per direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialRule {
    pub levels: usize,
    /// Largest accepted difference between the two finest levels.
    pub tol: f64,
}

impl Default for PotentialRule {
    fn default() -> Self {
        PotentialRule {
            levels: 3,
            tol: 1e-6,
        }
    }
}

/// `int_{B1} G(x, y) f(v(|y|)) dy` for a radial profile `v` on `[0, 1]`.
pub fn green_potential<V: Fn(f64) -> Result<f64>>(
    x: &BallPoint,
    v: V,
    source: &SourceFn,
    c: BoggioConstant,
    rule: &PotentialRule,
) -> Result<f64> {
    // G(x, .) vanishes identically for x on the sphere
    if matches!(source, SourceFn::Zero) || x.norm_sq() >= 1.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let value = ball_integral_centered(
        x,
        |y| match v(norm(y).min(1.0)) {
            Ok(vy) => boggio_g_extended(x.coords(), y, c) * source.eval(vy),
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        rule.levels,
        rule.tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(value?.value)
}

/// Right-hand side of the representation at `x`, with the solution's own source.
pub fn representation_rhs(
    x: &BallPoint,
    sol: &RadialSolution,
    consts: &RepresentationConstants,
    rule: &PotentialRule,
) -> Result<f64> {
    representation_rhs_with_source(x, sol, &sol.source, consts, rule)
}

/// As [`representation_rhs`] but with an arbitrary source applied to `sol`'s profile.
pub fn representation_rhs_with_source(
    x: &BallPoint,
    sol: &RadialSolution,
    source: &SourceFn,
    consts: &RepresentationConstants,
    rule: &PotentialRule,
) -> Result<f64> {
    let potential = green_potential(
        x,
        |r| sol.interpolate(r).map(|p| p.0),
        source,
        BoggioConstant::ORACLE,
        rule,
    )?;
    Ok(consts.c1 + consts.c2 * (x.norm_sq() - 1.0) - potential)
}

/// `0, 0.95/32, ..., 0.95`.
pub fn probe_radii() -> Vec<f64> {
    (0..33).map(|i| 0.95 * i as f64 / 32.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepresentationRow {
    pub r: f64,
    pub v: f64,
    pub rhs: f64,
    pub diff: f64,
}

pub fn representation_rows(
    sol: &RadialSolution,
    consts: &RepresentationConstants,
    rule: &PotentialRule,
    radii: &[f64],
) -> Result<Vec<RepresentationRow>> {
    radii
        .iter()
        .map(|&r| {
            let x = BallPoint::new([0.0, 0.0, r])?;
            let rhs = representation_rhs(&x, sol, consts, rule)?;
            let v = sol.interpolate(r)?.0;
            Ok(RepresentationRow {
                r,
                v,
                rhs,
                diff: rhs - v,
            })
        })
        .collect()
}

/// Sup over the probe radii of `|v - rhs|`, relative to the boundary value `a`.
pub fn check_representation(
    sol: &RadialSolution,
    consts: &RepresentationConstants,
    rule: &PotentialRule,
    tol: f64,
) -> Result<(CheckReport, Vec<RepresentationRow>)> {
    let rows = representation_rows(sol, consts, rule, &probe_radii())?;
    let mut rep = ReportBuilder::new("representation", tol, tol);
    rep.param("a", sol.a)
        .param("b", sol.b)
        .param("source", sol.source.describe())
        .param("constants", consts)
        .param("levels", rule.levels)
        .param("probes", rows.len());
    for row in &rows {
        rep.compare(format!("r={:.6}", row.r), sol.a + row.diff, sol.a);
    }
    let sup = rows.iter().map(|r| r.diff.abs()).fold(0.0, f64::max);
    rep.param("sup_abs_err", sup);
    Ok((rep.finish(), rows))
}

pub fn write_rows_csv(path: &Path, rows: &[RepresentationRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r", "v", "rhs", "diff"])?;
    for row in rows {
        w.write_record([row.r, row.v, row.rhs, row.diff].map(|x| format!("{x:.14e}")))?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial_solver::{shoot, ShootingConfig};

    fn solve(a: f64, b: f64, source: SourceFn) -> RadialSolution {
        shoot(a, b, &source, &ShootingConfig::default()).unwrap()
    }

    #[test]
    fn zero_source_is_exact() {
        let sol = solve(1.0, 0.5, SourceFn::Zero);
        let (rep, _) = check_representation(
            &sol,
            &RepresentationConstants::oracle(1.0, 0.5),
            &PotentialRule::default(),
            1e-10,
        )
        .unwrap();
        assert!(rep.passed, "{}", rep.summary_line());
    }

    #[test]
    fn zero_source_grid() {
        for i in 1..=5 {
            for j in 0..5 {
                let a = 0.5 + 1.5 * i as f64 / 5.0;
                let b = j as f64 / 4.0;
                let sol = solve(a, b, SourceFn::Zero);
                let rows = representation_rows(
                    &sol,
                    &RepresentationConstants::oracle(a, b),
                    &PotentialRule::default(),
                    &[0.0, 0.3, 0.9],
                )
                .unwrap();
                assert!(rows.iter().all(|r| r.diff.abs() <= 1e-10));
            }
        }
    }

    #[test]
    fn boundary_trace() {
        let sol = solve(1.0, 0.5, SourceFn::critical());
        let x = BallPoint::new([0.0, 0.0, 1.0]).unwrap();
        let rule = PotentialRule::default();
        let oracle =
            representation_rhs(&x, &sol, &RepresentationConstants::oracle(1.0, 0.5), &rule)
                .unwrap();
        assert!((oracle - 1.0).abs() < 1e-12);
        let printed =
            representation_rhs(&x, &sol, &RepresentationConstants::printed(1.0, 0.5), &rule)
                .unwrap();
        assert!((printed - 3.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn critical_source_representation() {
        let sol = solve(1.0, 0.5, SourceFn::critical());
        let rule = PotentialRule::default();
        let (rep, rows) = check_representation(
            &sol,
            &RepresentationConstants::oracle(1.0, 0.5),
            &rule,
            1e-4,
        )
        .unwrap();
        assert!(rep.passed, "{}", rep.summary_line());
        assert_eq!(rows.len(), 33);
        let (bad, _) = check_representation(
            &sol,
            &RepresentationConstants::printed(1.0, 0.5),
            &rule,
            1e-4,
        )
        .unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn larger_source_lowers_rhs() {
        let sol = solve(2.0, 0.5, SourceFn::critical());
        assert!(sol.min_value() >= 1.0);
        let consts = RepresentationConstants::oracle(2.0, 0.5);
        let rule = PotentialRule::default();
        for r in [0.0, 0.4, 0.8] {
            let x = BallPoint::new([r, 0.0, 0.0]).unwrap();
            let p7 =
                representation_rhs_with_source(&x, &sol, &SourceFn::Power(7.0), &consts, &rule)
                    .unwrap();
            let p6 =
                representation_rhs_with_source(&x, &sol, &SourceFn::Power(6.0), &consts, &rule)
                    .unwrap();
            assert!(p6 < p7);
        }
    }
}
