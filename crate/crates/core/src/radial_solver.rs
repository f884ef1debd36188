//! Radial solutions of `Delta^2 v = -f(v)` on the unit ball of R^3 by shooting,
//! the entire solution `alpha sqrt(beta + r^2)` of `Delta^2 v = -v^-7`, and
//! finite-difference residuals.
//!
//! The state is `(v, v', w, w')` with `w = Delta v = v'' + 2v'/r`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result, ShotRecord};
use crate::ode::{self, Tolerances};
use crate::quadrature::{halfline_integral, Decay};
use crate::report::{CheckReport, ReportBuilder};

pub type State = [f64; 4];

/// The nonlinearity `f` in `Delta^2 v = -f(v)`.
#[derive(Clone)]
pub enum SourceFn {
    /// `f(t) = t^-p`.
    Power(f64),
    Zero,
    /// A caller-supplied source; it must be continuous, positive and non-increasing.
    Custom {
        tag: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl SourceFn {
    /// The critical source `t^-7`.
    pub fn critical() -> Self {
        SourceFn::Power(7.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            SourceFn::Power(p) => t.powf(-p),
            SourceFn::Zero => 0.0,
            SourceFn::Custom { f, .. } => f(t),
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        match self {
            SourceFn::Power(p) => json!({ "kind": "power", "p": p }),
            SourceFn::Zero => json!({ "kind": "zero" }),
            SourceFn::Custom { tag, .. } => json!({ "kind": "custom", "tag": tag }),
        }
    }
}

impl fmt::Debug for SourceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceFn::Power(p) => write!(f, "Power({p})"),
            SourceFn::Zero => write!(f, "Zero"),
            SourceFn::Custom { tag, .. } => write!(f, "Custom({tag})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub eps_start: f64,
    pub newton_tol: f64,
    pub max_iters: usize,
    pub integrator: Tolerances,
    pub v_floor: f64,
    /// Number of uniform output intervals on `[0, 1]`.
    pub grid_intervals: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            eps_start: 1e-6,
            newton_tol: 1e-11,
            max_iters: 50,
            integrator: Tolerances::default(),
            v_floor: 1e-8,
            grid_intervals: 1000,
        }
    }
}

impl ShootingConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.eps_start > 0.0
            && self.eps_start < 1.0 / self.grid_intervals as f64
            && self.newton_tol > 0.0
            && self.integrator.abs > 0.0
            && self.integrator.rel > 0.0
            && self.v_floor > 0.0
            && self.max_iters > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "invalid shooting configuration {self:?}"
            )))
        }
    }
}

/// `(v', w - 2v'/r, w', -f(v) - 2w'/r)`.
pub fn radial_rhs(r: f64, state: &State, source: &SourceFn, v_floor: f64) -> Result<State> {
    let [v, dv, w, dw] = *state;
    if !(v > v_floor) {
        return Err(Error::PositivityLoss {
            r,
            v,
            trace: Vec::new(),
        });
    }
    Ok([dv, w - 2.0 * dv / r, dw, -source.eval(v) - 2.0 * dw / r])
}

/// Second-order Taylor state at `r = eps` of the regular solution with
/// `v(0) = v0`, `Delta v(0) = w0`.
pub fn series_start(v0: f64, w0: f64, eps: f64, source: &SourceFn) -> State {
    let f0 = source.eval(v0);
    [
        v0 + w0 * eps * eps / 6.0,
        w0 * eps / 3.0,
        w0 - f0 * eps * eps / 6.0,
        -f0 * eps / 3.0,
    ]
}

/// A radial function with its jet `(v, v', Delta v, (Delta v)')`.
pub trait RadialProfile {
    fn jet(&self, r: f64) -> Result<State>;
}

/// Output of a successful shot.
#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub grid: Vec<f64>,
    pub states: Vec<State>,
    pub a: f64,
    pub b: f64,
    pub source: SourceFn,
    pub v0: f64,
    pub w0: f64,
    pub iterations: usize,
    pub residual: f64,
    pub trace: Vec<ShotRecord>,
    pub config: ShootingConfig,
}

fn output_grid(cfg: &ShootingConfig) -> Vec<f64> {
    let n = cfg.grid_intervals;
    (1..=n).map(|i| i as f64 / n as f64).collect()
}

/// States at `eps` and at every grid node `i/N`.
fn trajectory(v0: f64, w0: f64, source: &SourceFn, cfg: &ShootingConfig) -> Result<Vec<State>> {
    if !(v0 > cfg.v_floor) {
        return Err(Error::PositivityLoss {
            r: 0.0,
            v: v0,
            trace: Vec::new(),
        });
    }
    let start = series_start(v0, w0, cfg.eps_start, source);
    let outputs = output_grid(cfg);
    let rhs = |r: f64, s: &State| radial_rhs(r, s, source, cfg.v_floor);
    let mut states = ode::integrate(rhs, cfg.eps_start, start, &outputs, cfg.integrator)?;
    states.insert(0, start);
    Ok(states)
}

fn boundary_map(
    p: [f64; 2],
    a: f64,
    b: f64,
    source: &SourceFn,
    cfg: &ShootingConfig,
) -> Result<[f64; 2]> {
    let states = trajectory(p[0], p[1], source, cfg)?;
    let end = states.last().expect("nonempty grid");
    Ok([end[0] - a, end[1] - b])
}

fn inf_norm(v: &[f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

struct Newton<'a> {
    a: f64,
    b: f64,
    source: &'a SourceFn,
    cfg: &'a ShootingConfig,
    trace: Vec<ShotRecord>,
    iterations: usize,
}

impl Newton<'_> {
    fn eval(&mut self, p: [f64; 2]) -> Result<[f64; 2]> {
        let out = boundary_map(p, self.a, self.b, self.source, self.cfg);
        let residual = out.as_ref().map(inf_norm).unwrap_or(f64::INFINITY);
        self.trace.push(ShotRecord {
            v0: p[0],
            w0: p[1],
            residual,
        });
        out
    }

    /// Damped Newton from `p`; returns the converged point and its residual.
    fn run(&mut self, mut p: [f64; 2]) -> Result<([f64; 2], f64)> {
        let mut fp = self.eval(p)?;
        let mut res = inf_norm(&fp);
        for _ in 0..self.cfg.max_iters {
            if res <= self.cfg.newton_tol {
                return Ok((p, res));
            }
            self.iterations += 1;
            let mut jac = [[0.0; 2]; 2];
            for j in 0..2 {
                let mut q = p;
                let delta = 1e-6 * p[j].abs().max(1.0);
                q[j] += delta;
                let fq = self.eval(q)?;
                jac[0][j] = (fq[0] - fp[0]) / delta;
                jac[1][j] = (fq[1] - fp[1]) / delta;
            }
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            if det == 0.0 || !det.is_finite() {
                break;
            }
            let step = [
                -(jac[1][1] * fp[0] - jac[0][1] * fp[1]) / det,
                -(-jac[1][0] * fp[0] + jac[0][0] * fp[1]) / det,
            ];
            let mut lambda = 1.0;
            let mut accepted = false;
            while lambda >= 1.0 / 1024.0 {
                let trial = [p[0] + lambda * step[0], p[1] + lambda * step[1]];
                if let Ok(ft) = self.eval(trial) {
                    let rt = inf_norm(&ft);
                    if rt < res {
                        p = trial;
                        fp = ft;
                        res = rt;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if res <= self.cfg.newton_tol {
            Ok((p, res))
        } else {
            Err(Error::NonConvergence {
                residual: res,
                iterations: self.iterations,
                trace: Vec::new(),
            })
        }
    }

    /// Best point of a coarse `(v0, w0)` grid over `[0.05a, 2a] x [-10, 10]`.
    fn grid_seed(&mut self) -> Option<[f64; 2]> {
        let mut best: Option<([f64; 2], f64)> = None;
        for i in 0..12 {
            let v0 = self.a * (0.05 + 1.95 * i as f64 / 11.0);
            for j in 0..21 {
                let w0 = -10.0 + j as f64;
                if let Ok(f) = self.eval([v0, w0]) {
                    let r = inf_norm(&f);
                    if best.map_or(true, |(_, br)| r < br) {
                        best = Some(([v0, w0], r));
                    }
                }
            }
        }
        best.map(|(p, _)| p)
    }
}

/// Solves `Delta^2 v = -f(v)` in `B1` with `v = a`, `dv/dnu = b` on the boundary.
///
/// Newton runs first from the zero-source solution `(a - b/2, 3b)`; if that
/// fails, a coarse grid search seeds one retry.
pub fn shoot(a: f64, b: f64, source: &SourceFn, cfg: &ShootingConfig) -> Result<RadialSolution> {
    cfg.validate()?;
    if !(a > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!(
            "boundary data must satisfy a > 0, got a = {a}, b = {b}"
        )));
    }
    let mut newton = Newton {
        a,
        b,
        source,
        cfg,
        trace: Vec::new(),
        iterations: 0,
    };
    let first = newton.run([a - 0.5 * b, 3.0 * b]);
    let outcome = match first {
        Ok(found) => Ok(found),
        Err(first_err) => match newton.grid_seed() {
            Some(seed) => newton.run(seed).map_err(|_| first_err),
            None => Err(first_err),
        },
    };
    let trace = std::mem::take(&mut newton.trace);
    let ((v0, w0), residual) = match outcome {
        Ok((p, r)) => ((p[0], p[1]), r),
        Err(Error::PositivityLoss { r, v, .. }) => {
            return Err(Error::PositivityLoss { r, v, trace })
        }
        Err(_) => {
            let residual = trace
                .iter()
                .map(|t| t.residual)
                .fold(f64::INFINITY, f64::min);
            return Err(Error::NonConvergence {
                residual,
                iterations: newton.iterations,
                trace,
            });
        }
    };
    let states = trajectory(v0, w0, source, cfg)?;
    let mut grid = vec![cfg.eps_start];
    grid.extend(output_grid(cfg));
    Ok(RadialSolution {
        grid,
        states,
        a,
        b,
        source: source.clone(),
        v0,
        w0,
        iterations: newton.iterations,
        residual,
        trace,
        config: *cfg,
    })
}

impl RadialSolution {
    pub fn v(&self) -> Vec<f64> {
        self.states.iter().map(|s| s[0]).collect()
    }

    fn node_below(&self, r: f64) -> usize {
        let n = self.config.grid_intervals as f64;
        // grid[k] = k/n for k >= 1
        ((r * n).floor() as usize).clamp(0, self.grid.len() - 2)
    }

    fn check_range(&self, r: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain(format!(
                "radial solution is defined on [0, 1], got r = {r}"
            )));
        }
        Ok(())
    }

    /// Cubic Hermite interpolation of `(v, Delta v)` from the stored nodes.
    pub fn interpolate(&self, r: f64) -> Result<(f64, f64)> {
        self.check_range(r)?;
        if r < self.grid[0] {
            let s = series_start(self.v0, self.w0, r, &self.source);
            return Ok((s[0], s[2]));
        }
        let k = self.node_below(r);
        let (r0, r1) = (self.grid[k], self.grid[k + 1]);
        let (s0, s1) = (&self.states[k], &self.states[k + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let herm =
            |a: f64, da: f64, b: f64, db: f64| h00 * a + h10 * h * da + h01 * b + h11 * h * db;
        Ok((
            herm(s0[0], s0[1], s1[0], s1[1]),
            herm(s0[2], s0[3], s1[2], s1[3]),
        ))
    }

    /// Full state at `r` by one Dormand–Prince step from grid node `k`.
    pub fn evaluate_from(&self, k: usize, r: f64) -> Result<State> {
        self.check_range(r)?;
        if r < self.grid[0] {
            return Ok(series_start(
                self.v0,
                self.w0,
                r.max(f64::MIN_POSITIVE),
                &self.source,
            ));
        }
        let k = k.min(self.grid.len() - 1);
        let h = r - self.grid[k];
        if h == 0.0 {
            return Ok(self.states[k]);
        }
        let mut rhs = |t: f64, s: &State| radial_rhs(t, s, &self.source, self.config.v_floor);
        ode::dp5_step(&mut rhs, self.grid[k], &self.states[k], h).map(|(y, _)| y)
    }

    /// Full state at `r`, stepping from the nearest grid node.
    pub fn evaluate(&self, r: f64) -> Result<State> {
        self.check_range(r)?;
        let n = self.config.grid_intervals as f64;
        let k = ((r * n).round() as usize).clamp(1, self.grid.len() - 1);
        let k = if r < 0.5 / n { 0 } else { k };
        self.evaluate_from(k, r)
    }

    /// Smallest increment `v(r_{i+1}) - v(r_i)` over the grid.
    pub fn min_increment(&self) -> f64 {
        self.states
            .windows(2)
            .map(|w| w[1][0] - w[0][0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_value(&self) -> f64 {
        self.states
            .iter()
            .map(|s| s[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Writes `r,v,dv,w,dw` with 15 significant digits.
    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["r", "v", "dv", "w", "dw"])?;
        for (r, s) in self.grid.iter().zip(&self.states) {
            let row: Vec<String> = std::iter::once(r)
                .chain(s.iter())
                .map(|x| format!("{x:.14e}"))
                .collect();
            w.write_record(&row)?;
        }
        w.flush()
    }

    /// Rebuilds a solution from a CSV written by [`RadialSolution::write_csv`]
    /// and the JSON from [`RadialSolution::sidecar`].
    pub fn read(csv_path: &Path, sidecar: &serde_json::Value) -> Result<RadialSolution> {
        let field = |path: &[&str]| -> Result<&serde_json::Value> {
            path.iter()
                .try_fold(sidecar, |v, k| v.get(k))
                .ok_or_else(|| Error::Io(format!("sidecar is missing {}", path.join("."))))
        };
        let num = |path: &[&str]| -> Result<f64> {
            field(path)?.as_f64().ok_or_else(|| {
                Error::Io(format!("sidecar field {} is not a number", path.join(".")))
            })
        };
        let source = match field(&["source", "kind"])?.as_str() {
            Some("power") => SourceFn::Power(num(&["source", "p"])?),
            Some("zero") => SourceFn::Zero,
            other => {
                return Err(Error::Io(format!(
                    "cannot rebuild source of kind {other:?}"
                )))
            }
        };
        let config: ShootingConfig = serde_json::from_value(field(&["config"])?.clone())
            .map_err(|e| Error::Io(format!("sidecar config: {e}")))?;

        let mut reader = csv::Reader::from_path(csv_path)
            .map_err(|e| Error::Io(format!("{}: {e}", csv_path.display())))?;
        let mut grid = Vec::new();
        let mut states = Vec::new();
        for record in reader.deserialize::<[f64; 5]>() {
            let [r, v, dv, w, dw] =
                record.map_err(|e| Error::Io(format!("{}: {e}", csv_path.display())))?;
            grid.push(r);
            states.push([v, dv, w, dw]);
        }
        if grid.len() != config.grid_intervals + 1 {
            return Err(Error::Io(format!(
                "{}: expected {} rows, found {}",
                csv_path.display(),
                config.grid_intervals + 1,
                grid.len()
            )));
        }
        Ok(RadialSolution {
            grid,
            states,
            a: num(&["a"])?,
            b: num(&["b"])?,
            source,
            v0: num(&["shoot", "v0"])?,
            w0: num(&["shoot", "w0"])?,
            iterations: field(&["shoot", "iterations"])?.as_u64().unwrap_or(0) as usize,
            residual: num(&["shoot", "residual"])?,
            trace: Vec::new(),
            config,
        })
    }

    pub fn sidecar(&self) -> serde_json::Value {
        json!({
            "a": self.a,
            "b": self.b,
            "source": self.source.describe(),
            "shoot": {
                "v0": self.v0,
                "w0": self.w0,
                "iterations": self.iterations,
                "residual": self.residual,
                "shots": self.trace.len(),
            },
            "config": self.config,
        })
    }
}

impl RadialProfile for RadialSolution {
    fn jet(&self, r: f64) -> Result<State> {
        self.evaluate(r)
    }
}

/// The biharmonic polynomial `(a - b/2) + (b/2) r^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiharmonicQuadratic {
    pub a: f64,
    pub b: f64,
}

impl RadialProfile for BiharmonicQuadratic {
    fn jet(&self, r: f64) -> Result<State> {
        let c2 = 0.5 * self.b;
        Ok([self.a - c2 + c2 * r * r, 2.0 * c2 * r, 6.0 * c2, 0.0])
    }
}

/// `alpha sqrt(beta + r^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChoiXu {
    pub alpha: f64,
    pub beta: f64,
}

pub fn choi_xu_profile(alpha: f64, beta: f64) -> Result<ChoiXu> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!(
            "need alpha, beta > 0, got {alpha}, {beta}"
        )));
    }
    Ok(ChoiXu { alpha, beta })
}

impl ChoiXu {
    pub fn value(&self, r: f64) -> f64 {
        self.alpha * (self.beta + r * r).sqrt()
    }

    /// `[v, v', v'', v''', v'''']`.
    pub fn derivatives(&self, r: f64) -> [f64; 5] {
        let (a, b) = (self.alpha, self.beta);
        let s = b + r * r;
        let sq = s.sqrt();
        [
            a * sq,
            a * r / sq,
            a * b / (s * sq),
            -3.0 * a * b * r / (s * s * sq),
            -3.0 * a * b * (b - 4.0 * r * r) / (s * s * s * sq),
        ]
    }

    /// `alpha (3 beta + 2 r^2) (beta + r^2)^{-3/2}`.
    pub fn laplacian(&self, r: f64) -> f64 {
        let s = self.beta + r * r;
        self.alpha * (3.0 * self.beta + 2.0 * r * r) / (s * s.sqrt())
    }

    /// `-15 alpha beta^2 (beta + r^2)^{-7/2}`.
    pub fn bilaplacian(&self, r: f64) -> f64 {
        let s = self.beta + r * r;
        -15.0 * self.alpha * self.beta * self.beta * s.powf(-3.5)
    }

    /// Largest `|Delta^2 v + v^-7|` over `r_grid` from the closed forms.
    pub fn closed_form_residual(&self, r_grid: &[f64]) -> f64 {
        r_grid
            .iter()
            .map(|&r| (self.bilaplacian(r) + self.value(r).powi(-7)).abs())
            .fold(0.0, f64::max)
    }
}

impl RadialProfile for ChoiXu {
    fn jet(&self, r: f64) -> Result<State> {
        let s = self.beta + r * r;
        let a = self.alpha;
        let dw = a * r * (-5.0 * self.beta - 2.0 * r * r) / (s * s * s.sqrt());
        Ok([self.value(r), a * r / s.sqrt(), self.laplacian(r), dw])
    }
}

/// `beta` as displayed with the entire solution: `sqrt(15 alpha^8)`.
pub fn printed_beta(alpha: f64) -> f64 {
    (15.0 * alpha.powi(8)).sqrt()
}

/// `beta` solving the unnormalized integral display `v = int |x-y| v^-7`:
/// `beta^2 = 8 pi / (15 alpha^8)`.
pub fn integral_display_beta(alpha: f64) -> f64 {
    (8.0 * std::f64::consts::PI / (15.0 * alpha.powi(8))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
}

/// Uniform grid on `[0, 10]` for Choi–Xu residuals.
pub fn choi_xu_grid() -> Vec<f64> {
    (0..=1000).map(|i| i as f64 / 100.0).collect()
}

/// Golden-section search on `log beta` minimizing the closed-form residual over `[0, 10]`,
/// measured relative to `v^-7`; the absolute residual also tends to zero as
/// `beta -> infinity`, so only the relative one has a single minimum.
pub fn calibrate_beta(alpha: f64) -> Result<Calibration> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let grid = choi_xu_grid();
    let cost = |lb: f64| {
        let p = ChoiXu {
            alpha,
            beta: lb.exp(),
        };
        grid.iter()
            .map(|&r| ((p.bilaplacian(r) + p.value(r).powi(-7)) * p.value(r).powi(7)).abs())
            .fold(0.0, f64::max)
    };
    // bracket around the scaling beta ~ alpha^-4
    let center = -4.0 * alpha.ln();
    let (mut lo, mut hi) = (center - 5.0, center + 5.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (cost(x1), cost(x2));
    while hi - lo > 1e-13 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = cost(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = cost(x2);
        }
    }
    let beta = (0.5 * (lo + hi)).exp();
    let residual = ChoiXu { alpha, beta }.closed_form_residual(&grid);
    if residual > 1e-6 {
        return Err(Error::Domain(format!(
            "calibrated residual {residual:e} exceeds 1e-6"
        )));
    }
    Ok(Calibration {
        alpha,
        beta,
        residual,
    })
}

/// Finite-difference residual of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    /// `max |D_h[(Delta v)'] + 2(Delta v)'/r + f(v)|`.
    pub max_residual: f64,
    pub at_r: f64,
    /// `max |D_h v - v'|`.
    pub consistency_dv: f64,
    /// `max |D_h v' + 2v'/r - Delta v|`.
    pub consistency_w: f64,
    /// `max |D_h (Delta v) - (Delta v)'|`.
    pub consistency_dw: f64,
    pub points: usize,
}

/// Residual of `Delta^2 v + f(v)` on a uniform grid of step `h` over `[r_min, r_max]`,
/// skipping `5h` at each end.
///
/// `Delta^2 v = (Delta v)'' + 2(Delta v)'/r` is formed from the profile's jet with
/// one fourth-order central difference of `(Delta v)'`; the other jet entries are
/// cross-checked by the same difference operator.
pub fn residual<P: RadialProfile + ?Sized>(
    profile: &P,
    source: &SourceFn,
    r_min: f64,
    r_max: f64,
    h: f64,
) -> Result<Residual> {
    if !(h > 0.0 && r_max - r_min > 10.0 * h) {
        return Err(Error::Domain(
            "residual grid needs r_max - r_min > 10 h".into(),
        ));
    }
    let n = ((r_max - r_min) / h).round() as usize;
    let d = |m2: &State, m1: &State, p1: &State, p2: &State, i: usize| {
        (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * h)
    };
    let mut out = Residual {
        max_residual: 0.0,
        at_r: f64::NAN,
        consistency_dv: 0.0,
        consistency_w: 0.0,
        consistency_dw: 0.0,
        points: 0,
    };
    for j in 5..=n - 5 {
        let r = r_min + j as f64 * h;
        let c = profile.jet(r)?;
        let m2 = profile.jet(r - 2.0 * h)?;
        let m1 = profile.jet(r - h)?;
        let p1 = profile.jet(r + h)?;
        let p2 = profile.jet(r + 2.0 * h)?;
        let res = (d(&m2, &m1, &p1, &p2, 3) + 2.0 * c[3] / r + source.eval(c[0])).abs();
        if !(res <= out.max_residual) {
            out.max_residual = res;
            out.at_r = r;
        }
        out.consistency_dv = out
            .consistency_dv
            .max((d(&m2, &m1, &p1, &p2, 0) - c[1]).abs());
        out.consistency_w = out
            .consistency_w
            .max((d(&m2, &m1, &p1, &p2, 1) + 2.0 * c[1] / r - c[2]).abs());
        out.consistency_dw = out
            .consistency_dw
            .max((d(&m2, &m1, &p1, &p2, 2) - c[3]).abs());
        out.points += 1;
    }
    Ok(out)
}

/// `int_0^inf r^3 (beta + r^2)^{-7/2} dr`, by the substitution `r = sqrt(beta) sinh s`
/// (closed form `(2/15) beta^{-3/2}`).
pub fn choi_xu_moment(beta: f64) -> Result<f64> {
    let g = |s: f64| {
        let c = s.cosh();
        s.sinh().powi(3) / c.powi(6)
    };
    let integral = halfline_integral(
        g,
        40.0,
        16,
        Decay {
            bound: 8.0,
            rate: 3.0,
        },
    )?;
    Ok(integral.value * beta.powf(-1.5))
}

/// Checks of the entire solution at each `alpha`: the calibrated normalization,
/// the finite-difference residual on `[0, 10]` (step `1e-3 min(1, sqrt(beta))`), and the `x = 0`
/// identity `alpha sqrt(beta) = (1/(8 pi)) 4 pi alpha^-7 int r^3 (beta + r^2)^{-7/2}`.
pub fn check_choi_xu(alphas: &[f64], tol: f64) -> Result<CheckReport> {
    let residual_tol = 1e-6;
    let mut rep = ReportBuilder::new("choi_xu", tol, residual_tol);
    rep.param("alphas", alphas);
    let source = SourceFn::critical();
    let mut printed = Vec::new();
    for &alpha in alphas {
        let cal = calibrate_beta(alpha)?;
        rep.compare(
            format!("alpha={alpha} beta*sqrt15*alpha^4"),
            cal.beta * 15f64.sqrt() * alpha.powi(4),
            1.0,
        );
        let prof = choi_xu_profile(alpha, cal.beta)?;
        // the profile varies on the length scale sqrt(beta)
        let h = 1e-3 * cal.beta.sqrt().min(1.0);
        let fd = residual(&prof, &source, 0.0, 10.0, h)?;
        rep.compare(format!("alpha={alpha} fd_residual"), fd.max_residual, 0.0);
        rep.compare(
            format!("alpha={alpha} closed_residual"),
            prof.closed_form_residual(&choi_xu_grid()),
            0.0,
        );
        let rhs = 0.5 * alpha.powi(-7) * choi_xu_moment(cal.beta)?;
        rep.compare(format!("alpha={alpha} x0_identity"), prof.value(0.0), rhs);
        let bad = choi_xu_profile(alpha, printed_beta(alpha))?;
        printed.push(json!({
            "alpha": alpha,
            "printed_beta": printed_beta(alpha),
            "printed_residual": bad.closed_form_residual(&choi_xu_grid()),
            "integral_display_beta": integral_display_beta(alpha),
        }));
    }
    rep.param("printed_constant", printed);
    Ok(rep.finish())
}
