//! Dormand–Prince 5(4) integrator that lands exactly on a list of output nodes.
//!
//! Steps are chosen adaptively between consecutive nodes; the accepted step
//! size is carried over so node spacing does not throttle the controller.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 2_000_000,
        }
    }
}

// Butcher tableau.
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
// b - b*, coefficients of the embedded error estimate
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..D {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` through every entry of `nodes`
/// (strictly monotone, all on the same side of `t0`), returning the state at
/// each node. `keep_going` is consulted after every accepted step; returning
/// `false` stops the integration and the states collected so far are returned.
pub fn integrate_to_nodes<const D: usize, F, G>(
    mut rhs: F,
    t0: f64,
    y0: [f64; D],
    nodes: &[f64],
    opts: &OdeOptions,
    mut keep_going: G,
) -> Result<Vec<[f64; D]>>
where
    F: FnMut(f64, &[f64; D]) -> Result<[f64; D]>,
    G: FnMut(f64, &[f64; D]) -> bool,
{
    let mut out = Vec::with_capacity(nodes.len());
    let Some(&last) = nodes.last() else {
        return Ok(out);
    };
    let dir = if last >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y)?;
    let span = (last - t0).abs().max(f64::MIN_POSITIVE);
    let mut h = (span * 1e-3).max(1e-12 * span);
    let mut steps = 0usize;

    for &target in nodes {
        while dir * (target - t) > 0.0 {
            let remaining = (target - t).abs();
            let step = h.min(remaining);
            let hs = dir * step;

            let k2 = rhs(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]))?;
            let k3 = rhs(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = rhs(
                t + C4 * hs,
                &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            )?;
            let k5 = rhs(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            )?;
            let k6 = rhs(
                t + hs,
                &axpy(
                    &y,
                    hs,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            )?;
            let y_new = axpy(
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let t_new = if step == remaining { target } else { t + hs };
            let k7 = rhs(t_new, &y_new)?;

            let mut err2 = 0.0;
            for i in 0..D {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err2 += (e / sc) * (e / sc);
            }
            let err = (err2 / D as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::Integration {
                    at: t,
                    reason: "non-finite state or error estimate".into(),
                });
            }

            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration {
                    at: t,
                    reason: format!("step budget of {} exhausted", opts.max_steps),
                });
            }

            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                // only grow the carried step from a full (untruncated) step
                if step == h || factor < 1.0 {
                    h = step * factor;
                }
                if !keep_going(t, &y) {
                    return Ok(out);
                }
            } else {
                h = step * factor.min(1.0);
            }
            if h < 1e-14 * span {
                return Err(Error::Integration {
                    at: t,
                    reason: "step size underflow".into(),
                });
            }
        }
        out.push(y);
    }
    Ok(out)
}
