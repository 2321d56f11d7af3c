use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Spatial weight ψ(x) multiplying the source term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weight {
    Constant { value: f64 },
    /// |x|^alpha
    RadialPower { alpha: f64 },
    /// exp(−beta·x₁²): even in x₁, increasing in x₁ on {x₁ < 0}.
    Gaussian { beta: f64 },
    /// 1/(1 + c·x₁²): even in x₁, increasing in x₁ on {x₁ < 0}.
    Lorentzian { c: f64 },
}

impl Weight {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Weight::Constant { value } => value,
            Weight::RadialPower { alpha } => {
                if alpha == 0.0 {
                    1.0
                } else {
                    x.iter().map(|c| c * c).sum::<f64>().sqrt().powf(alpha)
                }
            }
            Weight::Gaussian { beta } => {
                let x1 = x.first().copied().unwrap_or(0.0);
                (-beta * x1 * x1).exp()
            }
            Weight::Lorentzian { c } => {
                let x1 = x.first().copied().unwrap_or(0.0);
                1.0 / (1.0 + c * x1 * x1)
            }
        }
    }

    pub fn is_even_in_x1(&self) -> bool {
        true
    }

    /// Nondecreasing in x₁ on the half-space {x₁ < 0}.
    pub fn is_monotone_in_x1(&self) -> bool {
        match *self {
            Weight::Constant { .. } => true,
            Weight::RadialPower { alpha } => alpha <= 0.0,
            Weight::Gaussian { beta } => beta >= 0.0,
            Weight::Lorentzian { c } => c >= 0.0,
        }
    }

    pub fn is_radial(&self) -> bool {
        matches!(self, Weight::Constant { .. } | Weight::RadialPower { .. })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Weight::Constant { value } if !(value >= 0.0 && value.is_finite()) => {
                invalid(format!("constant weight must be finite and >= 0, got {value}"))
            }
            Weight::RadialPower { alpha } if !(alpha >= 0.0 && alpha.is_finite()) => {
                invalid(format!("radial-power exponent must be >= 0, got {alpha}"))
            }
            Weight::Gaussian { beta } if !(beta >= 0.0 && beta.is_finite()) => {
                invalid(format!("gaussian weight needs beta >= 0, got {beta}"))
            }
            Weight::Lorentzian { c } if !(c >= 0.0 && c.is_finite()) => {
                invalid(format!("lorentzian weight needs c >= 0, got {c}"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Constant { value } => write!(f, "const:{value}"),
            Weight::RadialPower { alpha } => write!(f, "radial:{alpha}"),
            Weight::Gaussian { beta } => write!(f, "gauss:{beta}"),
            Weight::Lorentzian { c } => write!(f, "lorentz:{c}"),
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    /// `const:C`, `radial:ALPHA`, `gauss:BETA` or `lorentz:C`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("weight `{s}` is not of the form kind:value")))?;
        let v: f64 = arg
            .parse()
            .map_err(|_| Error::InvalidInput(format!("weight parameter `{arg}` is not a number")))?;
        let w = match kind {
            "const" => Weight::Constant { value: v },
            "radial" => Weight::RadialPower { alpha: v },
            "gauss" => Weight::Gaussian { beta: v },
            "lorentz" => Weight::Lorentzian { c: v },
            _ => return invalid(format!("unknown weight kind `{kind}`")),
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// f = ψ s^p for s ≥ 0 and 0 for s < 0.
    PositivePart,
    /// f = ψ |s|^{p−1} s.
    OddPower,
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceKind::PositivePart => "positive-part",
            SourceKind::OddPower => "odd-power",
        })
    }
}

impl FromStr for SourceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "positive-part" => Ok(SourceKind::PositivePart),
            "odd-power" => Ok(SourceKind::OddPower),
            _ => invalid(format!(
                "unknown source kind `{s}` (expected positive-part or odd-power)"
            )),
        }
    }
}

/// Diffusion coefficient a(s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diffusion {
    /// a(s) = 1 + |s|^k
    Power { k: f64 },
    /// a(s) ≡ c, the semi-linear limit.
    Constant { c: f64 },
}

/// The pair (a, f) together with the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearitySpec {
    pub diffusion: Diffusion,
    pub p: f64,
    pub psi: Weight,
    pub source: SourceKind,
    pub dim: usize,
}

impl NonlinearitySpec {
    /// a(s) = 1 + |s|^k with a positive-part source and unit weight.
    pub fn power(k: f64, p: f64, dim: usize) -> Result<Self> {
        Self::new(
            Diffusion::Power { k },
            p,
            Weight::Constant { value: 1.0 },
            SourceKind::PositivePart,
            dim,
        )
    }

    pub fn constant_diffusion(c: f64, p: f64, dim: usize) -> Result<Self> {
        Self::new(
            Diffusion::Constant { c },
            p,
            Weight::Constant { value: 1.0 },
            SourceKind::PositivePart,
            dim,
        )
    }

    pub fn new(
        diffusion: Diffusion,
        p: f64,
        psi: Weight,
        source: SourceKind,
        dim: usize,
    ) -> Result<Self> {
        let spec = Self {
            diffusion,
            p,
            psi,
            source,
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_source(mut self, source: SourceKind) -> Self {
        self.source = source;
        self
    }

    pub fn with_weight(mut self, psi: Weight) -> Result<Self> {
        psi.validate()?;
        self.psi = psi;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self.diffusion {
            Diffusion::Power { k } if !(k > 1.0 && k.is_finite()) => {
                return invalid(format!("diffusion exponent must satisfy k > 1, got {k}"))
            }
            Diffusion::Constant { c } if !(c > 0.0 && c.is_finite()) => {
                return invalid(format!("constant diffusion must be positive, got {c}"))
            }
            _ => {}
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return invalid(format!("source exponent must satisfy p > 1, got {}", self.p));
        }
        if self.dim < 2 {
            return invalid(format!("dimension must be at least 2, got {}", self.dim));
        }
        self.psi.validate()
    }

    /// The exponent k, or 0 for constant diffusion (a grows like |s|^0).
    pub fn k_effective(&self) -> f64 {
        match self.diffusion {
            Diffusion::Power { k } => k,
            Diffusion::Constant { .. } => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_exponents() {
        assert!(NonlinearitySpec::power(1.0, 3.0, 3).is_err());
        assert!(NonlinearitySpec::power(2.0, 1.0, 3).is_err());
        assert!(NonlinearitySpec::power(2.0, 3.0, 1).is_err());
        assert!(NonlinearitySpec::constant_diffusion(0.0, 3.0, 3).is_err());
        assert!(NonlinearitySpec::constant_diffusion(4.0, 3.0, 3).is_ok());
    }

    #[test]
    fn weight_parsing_round_trip() {
        for s in ["const:2", "radial:1.5", "gauss:0.5", "lorentz:3"] {
            let w: Weight = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("const:-1".parse::<Weight>().is_err());
        assert!("bogus:1".parse::<Weight>().is_err());
    }

    #[test]
    fn catalog_weights_are_even_and_monotone() {
        for w in [Weight::Gaussian { beta: 0.7 }, Weight::Lorentzian { c: 2.0 }] {
            assert!(w.is_even_in_x1() && w.is_monotone_in_x1());
            for i in 0..20 {
                let x1 = -1.0 + 0.05 * i as f64;
                assert_eq!(w.eval(&[x1, 0.3]), w.eval(&[-x1, 0.3]));
                assert!(w.eval(&[x1 + 0.05, 0.3]) >= w.eval(&[x1, 0.3]));
            }
        }
    }
}
