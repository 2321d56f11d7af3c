//! Closed-form evaluation of the transformed nonlinearity h(x,s) = f(x,g(s))·a(g(s))^{-1/2}
//! and its derivatives in s up to order three.
//!
//! Orders two and three are assembled from Θ and Θ' (functions of t = g(s));
//! nothing here differentiates numerically. For the positive-part source the
//! derivatives at t = 0 are the right-hand ones.

use super::gfunc::GFunction;
use super::spec::{Diffusion, NonlinearitySpec, SourceKind};
use crate::error::{invalid, Error, Result};

/// What the solvers need from a right-hand side of −Δv = h(x, v).
pub trait Nonlinearity: Sync {
    fn h(&self, x: &[f64], s: f64) -> Result<f64>;
    /// ∂h/∂s
    fn dh(&self, x: &[f64], s: f64) -> Result<f64>;
    /// ∂²h/∂s²
    fn d2h(&self, x: &[f64], s: f64) -> Result<f64>;
    /// Primitive ∫₀ˢ h(x, σ) dσ.
    fn primitive(&self, x: &[f64], s: f64) -> Result<f64>;
    /// Largest |s| at which the nonlinearity may be evaluated.
    fn amplitude_limit(&self) -> f64 {
        f64::INFINITY
    }
    /// u = g(s); the identity for a purely semi-linear right-hand side.
    fn transform(&self, s: f64) -> Result<f64> {
        Ok(s)
    }
    /// The terms (a(t), a'(t), f(x,t)) of the quasi-linear form in u.
    fn quasi_terms(&self, x: &[f64], t: f64) -> Result<QuasiTerms> {
        Ok(QuasiTerms {
            a: 1.0,
            da: 0.0,
            f: self.h(x, t)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiTerms {
    pub a: f64,
    pub da: f64,
    pub f: f64,
}

/// h(x, s) = λ s. Used as a linear override in oracle tests.
#[derive(Debug, Clone, Copy)]
pub struct LinearSource {
    pub lambda: f64,
}

impl Nonlinearity for LinearSource {
    fn h(&self, _x: &[f64], s: f64) -> Result<f64> {
        Ok(self.lambda * s)
    }
    fn dh(&self, _x: &[f64], _s: f64) -> Result<f64> {
        Ok(self.lambda)
    }
    fn d2h(&self, _x: &[f64], _s: f64) -> Result<f64> {
        Ok(0.0)
    }
    fn primitive(&self, _x: &[f64], s: f64) -> Result<f64> {
        Ok(0.5 * self.lambda * s * s)
    }
}

/// c·|t|^e, times sign(t) when `odd`; a negative power at t = 0 is a domain error.
fn power_term(coef: f64, t: f64, e: f64, odd: bool) -> Result<f64> {
    if coef == 0.0 {
        return Ok(0.0);
    }
    let mag = if t == 0.0 {
        if e > 0.0 {
            return Ok(0.0);
        } else if e == 0.0 {
            1.0
        } else {
            return Err(Error::Domain(format!(
                "|t|^{e} is singular at t = 0"
            )));
        }
    } else {
        t.abs().powf(e)
    };
    let sign = if !odd {
        1.0
    } else if t == 0.0 {
        0.0
    } else {
        t.signum()
    };
    Ok(coef * mag * sign)
}

/// Falling factorial p(p−1)…(p−n+1).
fn falling(p: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, j| acc * (p - j as f64))
}

#[derive(Debug, Clone, Copy)]
struct Jet {
    v: [f64; 4],
}

/// Evaluator of h and its derivatives for a given (a, f) pair.
#[derive(Debug, Clone)]
pub struct DerivativeBundle {
    spec: NonlinearitySpec,
    g: GFunction,
}

impl DerivativeBundle {
    pub fn new(spec: NonlinearitySpec, g: GFunction) -> Self {
        Self { spec, g }
    }

    pub fn spec(&self) -> &NonlinearitySpec {
        &self.spec
    }

    pub fn g(&self) -> &GFunction {
        &self.g
    }

    /// a, a', a'', a''' at t, up to `order`.
    fn a_jet(&self, t: f64, order: u32) -> Result<Jet> {
        let mut v = [0.0; 4];
        match self.spec.diffusion {
            Diffusion::Constant { c } => v[0] = c,
            Diffusion::Power { k } => {
                v[0] = 1.0 + t.abs().powf(k);
                for n in 1..=order.min(3) {
                    v[n as usize] = power_term(falling(k, n), t, k - n as f64, n % 2 == 1)
                        .map_err(|e| domain_context(e, "a", n, t))?;
                }
            }
        }
        Ok(Jet { v })
    }

    /// f, f', f'', f''' in the second argument at (x, t), up to `order`.
    fn f_jet(&self, x: &[f64], t: f64, order: u32) -> Result<Jet> {
        let psi = self.spec.psi.eval(x);
        let p = self.spec.p;
        let mut v = [0.0; 4];
        match self.spec.source {
            SourceKind::PositivePart => {
                if t >= 0.0 {
                    for n in 0..=order.min(3) {
                        v[n as usize] = psi
                            * power_term(falling(p, n), t, p - n as f64, false)
                                .map_err(|e| domain_context(e, "f", n, t))?;
                    }
                }
            }
            SourceKind::OddPower => {
                for n in 0..=order.min(3) {
                    v[n as usize] = psi
                        * power_term(falling(p, n), t, p - n as f64, n % 2 == 0)
                            .map_err(|e| domain_context(e, "f", n, t))?;
                }
            }
        }
        Ok(Jet { v })
    }

    /// True when the derivatives returned at t = 0 are one-sided (right-hand).
    pub fn one_sided_at_zero(&self) -> bool {
        self.spec.source == SourceKind::PositivePart
    }

    /// F(x, t) = ∫₀ᵗ f(x, τ) dτ.
    pub fn source_primitive(&self, x: &[f64], t: f64) -> f64 {
        let psi = self.spec.psi.eval(x);
        let p = self.spec.p;
        match self.spec.source {
            SourceKind::PositivePart if t <= 0.0 => 0.0,
            _ => psi * t.abs().powf(p + 1.0) / (p + 1.0),
        }
    }

    /// K(x, s) = F(x, g(s)), the primitive of h in s.
    pub fn k_primitive(&self, x: &[f64], s: f64) -> Result<f64> {
        Ok(self.source_primitive(x, self.g.eval(s)?))
    }

    /// Θ(x,t) = 2f''a² − 3f'a'a − f a''a + 2f(a')².
    pub fn theta(&self, x: &[f64], t: f64) -> Result<f64> {
        let a = self.a_jet(t, 2)?.v;
        let f = self.f_jet(x, t, 2)?.v;
        Ok(theta_from(&a, &f))
    }

    /// dΘ/dt.
    pub fn theta_prime(&self, x: &[f64], t: f64) -> Result<f64> {
        let a = self.a_jet(t, 3)?.v;
        let f = self.f_jet(x, t, 3)?.v;
        Ok(theta_prime_from(&a, &f))
    }

    /// The `order`-th s-derivative of h at (x, s), `order` in 0..=3.
    pub fn h_eval(&self, x: &[f64], s: f64, order: u32) -> Result<f64> {
        if order > 3 {
            return invalid(format!("derivative order must be in 0..=3, got {order}"));
        }
        let t = self.g.eval(s)?;
        let a = self.a_jet(t, order)?.v;
        let f = self.f_jet(x, t, order)?.v;
        Ok(match order {
            0 => f[0] / a[0].sqrt(),
            1 => (2.0 * f[1] * a[0] - f[0] * a[1]) / (2.0 * a[0] * a[0]),
            2 => 0.5 * a[0].powf(-3.5) * theta_from(&a, &f),
            _ => {
                let th = theta_from(&a, &f);
                let thp = theta_prime_from(&a, &f);
                0.25 * a[0].powi(-5) * (2.0 * thp * a[0] - 7.0 * a[1] * th)
            }
        })
    }
}

fn domain_context(e: Error, which: &str, order: u32, t: f64) -> Error {
    match e {
        Error::Domain(msg) => Error::Domain(format!(
            "derivative {order} of {which} does not exist at t = {t} ({msg})"
        )),
        other => other,
    }
}

fn theta_from(a: &[f64; 4], f: &[f64; 4]) -> f64 {
    2.0 * f[2] * a[0] * a[0] - 3.0 * f[1] * a[1] * a[0] - f[0] * a[2] * a[0]
        + 2.0 * f[0] * a[1] * a[1]
}

fn theta_prime_from(a: &[f64; 4], f: &[f64; 4]) -> f64 {
    2.0 * f[3] * a[0] * a[0] + 4.0 * a[0] * a[1] * f[2]
        - 3.0 * f[2] * a[1] * a[0]
        - 3.0 * f[1] * a[2] * a[0]
        - 3.0 * f[1] * a[1] * a[1]
        - f[1] * a[2] * a[0]
        - f[0] * a[3] * a[0]
        - f[0] * a[2] * a[1]
        + 2.0 * f[1] * a[1] * a[1]
        + 4.0 * f[0] * a[1] * a[2]
}

impl Nonlinearity for DerivativeBundle {
    fn h(&self, x: &[f64], s: f64) -> Result<f64> {
        self.h_eval(x, s, 0)
    }
    fn dh(&self, x: &[f64], s: f64) -> Result<f64> {
        self.h_eval(x, s, 1)
    }
    fn d2h(&self, x: &[f64], s: f64) -> Result<f64> {
        self.h_eval(x, s, 2)
    }
    fn primitive(&self, x: &[f64], s: f64) -> Result<f64> {
        self.k_primitive(x, s)
    }
    fn amplitude_limit(&self) -> f64 {
        self.g.s_max()
    }
    fn transform(&self, s: f64) -> Result<f64> {
        self.g.eval(s)
    }
    fn quasi_terms(&self, x: &[f64], t: f64) -> Result<QuasiTerms> {
        let a = self.a_jet(t, 1)?.v;
        let f = self.f_jet(x, t, 0)?.v;
        Ok(QuasiTerms {
            a: a[0],
            da: a[1],
            f: f[0],
        })
    }
}
