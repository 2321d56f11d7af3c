//! Polynomial certificates for convexity of h and of h' when
//! a(s) = 1 + |s|^k and f(x,s) = ψ(x)s^p on s ≥ 0.
//!
//! With t = g(s) > 0 the sign of h'' is the sign of
//! Γ₁t^{p+2k−2} + Γ₂t^{p+k−2} + Γ₃t^{p−2}, and the sign of h''' is the sign of
//! Q_p(t) = c₃X³ + c₂X² + c₁X + c₀ with X = t^k. Both certificates reduce to
//! sign conditions on these coefficients.
//!
//! A note on asymptotics: Π₁ grows like p³ while Π₂, Π₃, Π₄ are o(p³), which is
//! why a threshold p_k exists for every k > 1.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::format;
use crate::nonlin::DerivativeBundle;

/// Relative margin below which a coefficient inequality is not considered strict.
pub const STRICT_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaTriple {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl GammaTriple {
    /// (p−k−1)(2p−k), valid as a cross-check when p > k+1.
    pub fn gamma1_factored(p: f64, k: f64) -> f64 {
        (p - k - 1.0) * (2.0 * p - k)
    }

    /// (p−k−1)[4p + k(p−k+1)/(p−k−1)], defined for p ≠ k+1.
    pub fn gamma2_factored(p: f64, k: f64) -> f64 {
        let d = p - k - 1.0;
        d * (4.0 * p + k * (p - k + 1.0) / d)
    }
}

pub fn gamma_coefficients(p: f64, k: f64) -> GammaTriple {
    GammaTriple {
        gamma1: 2.0 * p * p - (2.0 + 3.0 * k) * p + k * k + k,
        gamma2: 4.0 * p * p - (4.0 + 3.0 * k) * p - k * (k - 1.0),
        gamma3: 2.0 * p * (p - 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PiQuadruple {
    pub pi1: f64,
    pub pi2: f64,
    pub pi3: f64,
    pub pi4: f64,
}

impl PiQuadruple {
    pub fn sum(&self) -> f64 {
        self.pi1 + self.pi2 + self.pi3 + self.pi4
    }

    /// Π₁a³ + Π₂Xa² + Π₃X²a + Π₄X³ with X = s^k and a = 1 + X.
    pub fn eval_factored(&self, k: f64, s: f64) -> f64 {
        let x = s.powf(k);
        let a = 1.0 + x;
        self.pi1 * a * a * a + self.pi2 * x * a * a + self.pi3 * x * x * a + self.pi4 * x * x * x
    }

    fn scale(&self) -> f64 {
        [self.pi1, self.pi2, self.pi3, self.pi4]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub fn pi_coefficients(p: f64, k: f64) -> PiQuadruple {
    PiQuadruple {
        pi1: 4.0 * p * (p - 1.0) * (p - 2.0),
        pi2: -12.0 * k * p * (p - 1.0) - 8.0 * p * k * (k - 1.0) - 2.0 * k * (k - 1.0) * (k - 2.0),
        pi3: k * k * (19.0 * p + 13.0 * k - 13.0),
        pi4: -14.0 * k * k * k,
    }
}

/// Q_p as a cubic in X = s^k: c3·X³ + c2·X² + c1·X + c0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QPolynomial {
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl QPolynomial {
    pub fn from_pi(pi: &PiQuadruple) -> Self {
        Self {
            c3: pi.sum(),
            c2: 3.0 * pi.pi1 + 2.0 * pi.pi2 + pi.pi3,
            c1: 3.0 * pi.pi1 + pi.pi2,
            c0: pi.pi1,
        }
    }

    /// Value at X = s^k.
    pub fn eval_x(&self, x: f64) -> f64 {
        ((self.c3 * x + self.c2) * x + self.c1) * x + self.c0
    }

    fn scale(&self) -> f64 {
        [self.c3, self.c2, self.c1, self.c0]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Positive roots of Q_p'(X) = 3c3X² + 2c2X + c1 (the stationary points in Ξ = s^k).
    pub fn stationary_points(&self) -> Vec<f64> {
        let eps = STRICT_MARGIN * self.scale();
        let (a, b, c) = (3.0 * self.c3, 2.0 * self.c2, self.c1);
        let mut roots = Vec::new();
        if self.c3.abs() <= eps {
            if self.c2.abs() > eps {
                roots.push(-c / b);
            }
        } else {
            let disc = b * b - 4.0 * a * c;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                let q = -0.5 * (b + b.signum() * sq);
                if q != 0.0 {
                    roots.push(q / a);
                    roots.push(c / q);
                } else {
                    roots.push(0.0);
                }
            }
        }
        let mut out: Vec<f64> = roots.into_iter().filter(|x| *x > 0.0 && x.is_finite()).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out.dedup();
        out
    }
}

pub fn qp_coefficients(p: f64, k: f64) -> QPolynomial {
    QPolynomial::from_pi(&pi_coefficients(p, k))
}

/// Q_p(s) = c3·s^{3k} + c2·s^{2k} + c1·s^k + c0.
pub fn qp_eval(q: &QPolynomial, k: f64, s: f64) -> f64 {
    q.eval_x(s.powf(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateMode {
    /// The three coefficient-sum inequalities.
    Sufficient,
    /// Positivity of Q_p on (0, ∞) via its stationary points.
    Sharp,
}

impl std::str::FromStr for CertificateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sufficient" => Ok(Self::Sufficient),
            "sharp" => Ok(Self::Sharp),
            _ => invalid(format!("unknown mode `{s}` (expected sufficient or sharp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    HConvex,
    HPrimeConvex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityCertificate {
    pub p: f64,
    pub k: f64,
    pub mode: CertificateMode,
    pub property: Property,
    pub gamma: GammaTriple,
    pub pi: PiQuadruple,
    pub q: QPolynomial,
    pub inequalities: Vec<Inequality>,
    pub h_convex: Verdict,
    pub hprime_convex: Verdict,
    pub certified: bool,
    pub reason: String,
}

impl ConvexityCertificate {
    pub fn to_json(&self) -> String {
        crate::report::to_json(self)
    }
}

fn h_convex_verdict(p: f64, k: f64, gamma: &GammaTriple, out: &mut Vec<Inequality>) -> Verdict {
    let scale = gamma.gamma1.abs().max(gamma.gamma2.abs()).max(gamma.gamma3.abs());
    let eps = STRICT_MARGIN * scale;
    let g1 = gamma.gamma1 > eps;
    let g2 = gamma.gamma2 > eps;
    out.push(Inequality {
        name: "gamma1 > 0".into(),
        lhs: gamma.gamma1,
        satisfied: g1,
    });
    out.push(Inequality {
        name: "gamma2 > 0".into(),
        lhs: gamma.gamma2,
        satisfied: g2,
    });
    let mut failed = Vec::new();
    if !(p > k + 1.0) {
        failed.push(format!("p > k+1 fails ({p} <= {})", k + 1.0));
    }
    if !(k >= 2.0) {
        failed.push(format!("k >= 2 fails (k = {k})"));
    }
    if !g1 {
        failed.push(format!("gamma1 = {} is not positive", gamma.gamma1));
    }
    if !g2 {
        failed.push(format!("gamma2 = {} is not positive", gamma.gamma2));
    }
    if failed.is_empty() {
        Verdict {
            holds: true,
            reason: "p > k+1, k >= 2 and gamma1, gamma2 > 0: h is convex on R, strictly on (0, inf)"
                .into(),
        }
    } else {
        Verdict {
            holds: false,
            reason: failed.join("; "),
        }
    }
}

fn sufficient_verdict(pi: &PiQuadruple, q: &QPolynomial, out: &mut Vec<Inequality>) -> Verdict {
    let eps = STRICT_MARGIN * pi.scale();
    let checks = [
        ("pi1+pi2+pi3+pi4 > 0", q.c3),
        ("3pi1+2pi2+pi3 > 0", q.c2),
        ("3pi1+pi2 > 0", q.c1),
    ];
    let mut failed = Vec::new();
    for (name, lhs) in checks {
        let ok = lhs > eps;
        if !ok {
            failed.push(format!("{name} fails (lhs = {lhs})"));
        }
        out.push(Inequality {
            name: name.into(),
            lhs,
            satisfied: ok,
        });
    }
    if failed.is_empty() {
        Verdict {
            holds: true,
            reason: "all three coefficient sums are strictly positive".into(),
        }
    } else {
        Verdict {
            holds: false,
            reason: failed.join("; "),
        }
    }
}

fn sharp_verdict(q: &QPolynomial, k: f64, out: &mut Vec<Inequality>) -> Verdict {
    let eps = STRICT_MARGIN * q.scale();
    let coeffs = [q.c0, q.c1, q.c2, q.c3];
    let significant: Vec<(usize, f64)> = coeffs
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, c)| c.abs() > eps)
        .collect();
    let Some(&(lo_deg, lo_c)) = significant.first() else {
        return Verdict {
            holds: false,
            reason: "Q_p vanishes identically".into(),
        };
    };
    let &(hi_deg, hi_c) = significant.last().unwrap();
    let mut failed = Vec::new();

    let near_zero = lo_c > 0.0;
    out.push(Inequality {
        name: format!("Q_p(0+) sign: c{lo_deg} > 0"),
        lhs: lo_c,
        satisfied: near_zero,
    });
    if !near_zero {
        failed.push(format!("Q_p < 0 near s = 0 (c{lo_deg} = {lo_c})"));
    }

    let at_infinity = hi_c > 0.0;
    out.push(Inequality {
        name: format!("Q_p(inf) sign: c{hi_deg} > 0"),
        lhs: hi_c,
        satisfied: at_infinity,
    });
    if !at_infinity {
        failed.push(format!("Q_p < 0 for large s (c{hi_deg} = {hi_c})"));
    }

    for xi in q.stationary_points() {
        let value = q.eval_x(xi);
        let s_sharp = xi.powf(1.0 / k);
        let ok = value > eps;
        out.push(Inequality {
            name: format!("Q_p(s_sharp) > 0 at s_sharp = {s_sharp}"),
            lhs: value,
            satisfied: ok,
        });
        if !ok {
            failed.push(format!("Q_p({s_sharp}) = {value} is not positive"));
        }
    }

    if failed.is_empty() {
        Verdict {
            holds: true,
            reason: "Q_p > 0 on (0, inf): positive at both ends and at every stationary point"
                .into(),
        }
    } else {
        Verdict {
            holds: false,
            reason: failed.join("; "),
        }
    }
}

fn build(p: f64, k: f64, mode: CertificateMode, property: Property) -> ConvexityCertificate {
    let gamma = gamma_coefficients(p, k);
    let pi = pi_coefficients(p, k);
    let q = QPolynomial::from_pi(&pi);
    let mut inequalities = Vec::new();
    let h_convex = h_convex_verdict(p, k, &gamma, &mut inequalities);
    let hprime_convex = match mode {
        CertificateMode::Sufficient => sufficient_verdict(&pi, &q, &mut inequalities),
        CertificateMode::Sharp => sharp_verdict(&q, k, &mut inequalities),
    };
    let (certified, reason) = match property {
        Property::HConvex => (h_convex.holds, h_convex.reason.clone()),
        Property::HPrimeConvex => (hprime_convex.holds, hprime_convex.reason.clone()),
    };
    ConvexityCertificate {
        p,
        k,
        mode,
        property,
        gamma,
        pi,
        q,
        inequalities,
        h_convex,
        hprime_convex,
        certified,
        reason,
    }
}

/// Convexity of s ↦ h(x,s): certified iff p > k+1, k ≥ 2 and Γ₁, Γ₂ > 0.
pub fn certify_h_convex(p: f64, k: f64) -> ConvexityCertificate {
    build(p, k, CertificateMode::Sufficient, Property::HConvex)
}

/// Strict convexity of s ↦ h'(x,s) on (0, ∞).
pub fn certify_hprime_convex(p: f64, k: f64, mode: CertificateMode) -> Result<ConvexityCertificate> {
    if !(k > 1.0) {
        return invalid(format!("the h' certificate needs k > 1, got {k}"));
    }
    Ok(build(p, k, mode, Property::HPrimeConvex))
}

pub fn default_pk_ceiling(k: f64) -> f64 {
    4.0 * k + 8.0
}

/// Smallest p ≥ 2 (to within `tol`) from which every sampled exponent up to
/// the ceiling 4k+8 is certified.
pub fn find_pk(k: f64, mode: CertificateMode, tol: f64) -> Result<f64> {
    if !(k > 1.0) {
        return invalid(format!("find_pk needs k > 1, got {k}"));
    }
    if !(tol > 0.0) {
        return invalid(format!("tolerance must be positive, got {tol}"));
    }
    let ceiling = default_pk_ceiling(k);
    let certified = |p: f64| build(p, k, mode, Property::HPrimeConvex).hprime_convex.holds;

    let steps = ((ceiling - 2.0) / tol).ceil() as usize;
    let sample = |i: usize| (2.0 + i as f64 * tol).min(ceiling);
    let mut last_fail: Option<usize> = None;
    for i in 0..=steps {
        if !certified(sample(i)) {
            last_fail = Some(i);
        }
    }
    let Some(i_fail) = last_fail else {
        return Ok(2.0);
    };
    if i_fail == steps {
        return Err(Error::NotFound { ceiling });
    }
    let (mut lo, mut hi) = (sample(i_fail), sample(i_fail + 1));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if certified(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Uniform samples of h'' or h''' over an s-interval.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileTable {
    pub order: u32,
    pub rows: Vec<(f64, f64)>,
    pub min: f64,
    pub argmin: f64,
    pub max: f64,
}

impl ProfileTable {
    /// CSV with header `s,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,value\n");
        for (s, v) in &self.rows {
            out.push_str(&format::csv_row(&[*s, *v]));
        }
        out
    }
}

pub fn scan_profile(
    bundle: &DerivativeBundle,
    order: u32,
    s_range: (f64, f64),
    samples: usize,
) -> Result<ProfileTable> {
    if order != 2 && order != 3 {
        return invalid(format!("profile order must be 2 or 3, got {order}"));
    }
    let (lo, hi) = s_range;
    if !(lo >= 0.0 && hi > lo) {
        return invalid(format!("s range must satisfy 0 <= smin < smax, got ({lo}, {hi})"));
    }
    if hi > bundle.g().s_max() {
        return Err(Error::OutOfRange {
            value: hi,
            lo: 0.0,
            hi: bundle.g().s_max(),
        });
    }
    if samples < 2 {
        return invalid("a profile needs at least 2 samples");
    }
    let x = [0.0];
    let rows = (0..samples)
        .map(|i| {
            let s = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            bundle.h_eval(&x, s, order).map(|v| (s, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmin, min) = rows
        .iter()
        .copied()
        .fold((f64::NAN, f64::INFINITY), |acc, (s, v)| if v < acc.1 { (s, v) } else { acc });
    let max = rows.iter().fold(f64::NEG_INFINITY, |m, (_, v)| m.max(*v));
    Ok(ProfileTable {
        order,
        rows,
        min,
        argmin,
        max,
    })
}
