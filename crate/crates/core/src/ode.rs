//! Dormand–Prince 5(4) integrator with step-size control, for small fixed-size systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            abs: 1e-12,
            rel: 1e-10,
        }
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step from `(t, y)` with size `h`; returns the fifth-order
/// solution and the error estimate.
pub fn dp5_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N])>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
    let k4 = f(
        t + C4 * h,
        &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
    )?;
    let k5 = f(
        t + C5 * h,
        &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
    )?;
    let k6 = f(
        t + h,
        &axpy(
            y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ),
    )?;
    let y5 = axpy(
        y,
        h,
        &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
    );
    let k7 = f(t + h, &y5)?;
    let mut err = [0.0; N];
    for i in 0..N {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok((y5, err))
}

/// Adaptive integration of `y' = f(t, y)` from `t0` to each of the increasing
/// `outputs`, returning the state at every output point.
pub fn integrate<const N: usize, F>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    outputs: &[f64],
    tol: Tolerances,
) -> Result<Vec<[f64; N]>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut t = t0;
    let mut y = y0;
    let mut out = Vec::with_capacity(outputs.len());
    let span = outputs.last().map_or(0.0, |e| e - t0).abs().max(1e-300);
    let mut h = 1e-3 * span;
    let h_min = 1e-14 * span;
    for &target in outputs {
        while t < target {
            let step = h.min(target - t);
            let (y_new, err) = dp5_step(&mut f, t, &y, step)?;
            let mut norm = 0.0f64;
            for i in 0..N {
                let sc = tol.abs + tol.rel * y[i].abs().max(y_new[i].abs());
                norm = norm.max((err[i] / sc).abs());
            }
            if !norm.is_finite() {
                h = 0.25 * step;
                if h < h_min {
                    return Err(Error::StepSizeUnderflow { r: t });
                }
                continue;
            }
            if norm <= 1.0 {
                t = if target - t <= step { target } else { t + step };
                y = y_new;
            }
            let factor = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            let proposed = step * factor;
            // a step shortened only to land on an output point does not shrink h
            h = if norm <= 1.0 && step < h {
                h.max(proposed)
            } else {
                proposed
            };
            if h < h_min {
                return Err(Error::StepSizeUnderflow { r: t });
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let outs: Vec<f64> = (1..=10).map(|k| k as f64 * 0.5).collect();
        let ys = integrate(
            |_, y: &[f64; 1]| Ok([-y[0]]),
            0.0,
            [1.0],
            &outs,
            Tolerances::default(),
        )
        .unwrap();
        for (t, y) in outs.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let ys = integrate(
            |_, y: &[f64; 2]| Ok([y[1], -y[0]]),
            0.0,
            [0.0, 1.0],
            &[std::f64::consts::PI],
            Tolerances {
                abs: 1e-13,
                rel: 1e-12,
            },
        )
        .unwrap();
        assert!(ys[0][0].abs() < 1e-10);
        assert!((ys[0][1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn polynomial_solutions_are_exact() {
        // y'' = 2 => y = t^2
        let ys = integrate(
            |_, y: &[f64; 2]| Ok([y[1], 2.0]),
            0.0,
            [0.0, 0.0],
            &[1.0, 3.0],
            Tolerances::default(),
        )
        .unwrap();
        assert!((ys[1][0] - 9.0).abs() < 1e-13);
    }

    #[test]
    fn errors_propagate() {
        let r = integrate(
            |t, y: &[f64; 1]| {
                if t > 0.5 {
                    Err(Error::PositivityLoss {
                        r: t,
                        v: y[0],
                        trace: vec![],
                    })
                } else {
                    Ok([1.0])
                }
            },
            0.0,
            [0.0],
            &[1.0],
            Tolerances::default(),
        );
        assert!(matches!(r, Err(Error::PositivityLoss { .. })));
    }
}
