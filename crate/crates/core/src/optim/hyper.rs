use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which map turns a tangent step into the next iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UpdateMode {
    Exponential,
    Retraction,
}

impl FromStr for UpdateMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exp" | "exponential" => Ok(UpdateMode::Exponential),
            "retraction" | "retr" => Ok(UpdateMode::Retraction),
            _ => Err(Error::Config(format!("unknown update mode `{s}`"))),
        }
    }
}

impl fmt::Display for UpdateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpdateMode::Exponential => "exp",
            UpdateMode::Retraction => "retraction",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaSchedule {
    Constant,
    /// `α_t = α / √t`
    InvSqrt,
}

impl AlphaSchedule {
    pub fn at(self, alpha: f64, t: u64) -> f64 {
        match self {
            AlphaSchedule::Constant => alpha,
            AlphaSchedule::InvSqrt => alpha / (t as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beta1Schedule {
    Constant(f64),
    /// `β₁ₜ = β₁ λ^(t-1)`
    Decay {
        beta1: f64,
        lambda: f64,
    },
}

impl Beta1Schedule {
    pub fn at(self, t: u64) -> f64 {
        match self {
            Beta1Schedule::Constant(b) => b,
            Beta1Schedule::Decay { beta1, lambda } => beta1 * lambda.powi((t - 1) as i32),
        }
    }

    /// `β₁ = β₁₁`, the largest value of the schedule.
    pub fn initial(self) -> f64 {
        self.at(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beta2Schedule {
    Constant(f64),
    /// `β₂ₜ = 1 - 1/t`, which turns `v_t` into the running mean of squared
    /// gradient norms.
    OneMinusInvT,
}

impl Beta2Schedule {
    pub fn at(self, t: u64) -> f64 {
        match self {
            Beta2Schedule::Constant(b) => b,
            Beta2Schedule::OneMinusInvT => 1.0 - 1.0 / t as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    pub alpha: f64,
    pub alpha_schedule: AlphaSchedule,
    pub beta1: Beta1Schedule,
    pub beta2: Beta2Schedule,
    /// Added to `√v̂` in the step denominator.
    pub epsilon: f64,
    pub update_mode: UpdateMode,
    /// `v̂_t = max(v̂_{t-1}, v_t)` when set, `v̂_t = v_t` otherwise.
    pub amsgrad_max: bool,
}

pub const DEFAULT_EPSILON: f64 = 1e-8;

impl HyperParams {
    fn base(alpha: f64) -> Self {
        Self {
            alpha,
            alpha_schedule: AlphaSchedule::Constant,
            beta1: Beta1Schedule::Constant(0.0),
            beta2: Beta2Schedule::Constant(0.0),
            epsilon: DEFAULT_EPSILON,
            update_mode: UpdateMode::Exponential,
            amsgrad_max: false,
        }
    }

    pub fn rsgd(alpha: f64) -> Self {
        Self::base(alpha)
    }

    pub fn radagrad(alpha: f64) -> Self {
        Self::base(alpha)
    }

    pub fn radam(alpha: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            beta1: Beta1Schedule::Constant(beta1),
            beta2: Beta2Schedule::Constant(beta2),
            ..Self::base(alpha)
        }
    }

    pub fn ramsgrad(alpha: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            amsgrad_max: true,
            ..Self::radam(alpha, beta1, beta2)
        }
    }

    pub fn radamnc(alpha: f64, beta1: f64, lambda: f64) -> Self {
        Self {
            beta1: Beta1Schedule::Decay { beta1, lambda },
            beta2: Beta2Schedule::OneMinusInvT,
            ..Self::base(alpha)
        }
    }

    /// The default parameterisation of `method`; arguments the method does
    /// not use are ignored.
    pub fn for_method(method: Method, alpha: f64, beta1: f64, beta2: f64, lambda: f64) -> Self {
        match method {
            Method::Rsgd => Self::rsgd(alpha),
            Method::Radagrad => Self::radagrad(alpha),
            Method::Radam => Self::radam(alpha, beta1, beta2),
            Method::Ramsgrad => Self::ramsgrad(alpha, beta1, beta2),
            Method::RadamNc => Self::radamnc(alpha, beta1, lambda),
        }
    }

    pub fn with_mode(mut self, mode: UpdateMode) -> Self {
        self.update_mode = mode;
        self
    }

    pub fn with_alpha_schedule(mut self, schedule: AlphaSchedule) -> Self {
        self.alpha_schedule = schedule;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// `γ = β₁ / √β₂` for a constant `β₂`.
    pub fn gamma(&self) -> Option<f64> {
        match self.beta2 {
            Beta2Schedule::Constant(b2) if b2 > 0.0 => Some(self.beta1.initial() / b2.sqrt()),
            Beta2Schedule::Constant(_) => None,
            Beta2Schedule::OneMinusInvT => None,
        }
    }

    /// Range checks shared by every method.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!(
                "learning rate must be positive, got {}",
                self.alpha
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            ));
        }
        match self.beta1 {
            Beta1Schedule::Constant(b) if !(0.0..1.0).contains(&b) => {
                return bad(format!("beta1 must lie in [0, 1), got {b}"));
            }
            Beta1Schedule::Decay { beta1, lambda } => {
                if !(0.0..1.0).contains(&beta1) {
                    return bad(format!("beta1 must lie in [0, 1), got {beta1}"));
                }
                if !(lambda > 0.0 && lambda < 1.0) {
                    return bad(format!("beta1 decay must lie in (0, 1), got {lambda}"));
                }
            }
            _ => {}
        }
        if let Beta2Schedule::Constant(b) = self.beta2 {
            if !(0.0..1.0).contains(&b) {
                return bad(format!("beta2 must lie in [0, 1), got {b}"));
            }
        }
        Ok(())
    }
}

/// The Riemannian methods, all of which keep one adaptive scalar per
/// component manifold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rsgd,
    Radagrad,
    Radam,
    Ramsgrad,
    RadamNc,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Rsgd,
        Method::Radagrad,
        Method::Radam,
        Method::Ramsgrad,
        Method::RadamNc,
    ];

    /// Checks that `hyper` describes this method.
    pub fn check(self, hyper: &HyperParams) -> Result<()> {
        hyper.validate()?;
        let bad = |msg: &str| Err(Error::Config(format!("{self}: {msg}")));
        match self {
            Method::Rsgd | Method::Radagrad => Ok(()),
            Method::Radam if hyper.amsgrad_max => bad("the max on v is an amsgrad feature"),
            Method::Ramsgrad if !hyper.amsgrad_max => bad("requires the max on v"),
            Method::RadamNc if hyper.beta2 != Beta2Schedule::OneMinusInvT => {
                bad("requires the beta2 schedule 1 - 1/t")
            }
            Method::RadamNc if hyper.amsgrad_max => bad("the max on v is an amsgrad feature"),
            _ => Ok(()),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rsgd" => Ok(Method::Rsgd),
            "radagrad" => Ok(Method::Radagrad),
            "radam" => Ok(Method::Radam),
            "ramsgrad" => Ok(Method::Ramsgrad),
            "radamnc" => Ok(Method::RadamNc),
            _ => Err(Error::Config(format!("unknown optimizer `{s}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rsgd => "rsgd",
            Method::Radagrad => "radagrad",
            Method::Radam => "radam",
            Method::Ramsgrad => "ramsgrad",
            Method::RadamNc => "radamnc",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules() {
        assert_eq!(AlphaSchedule::InvSqrt.at(0.5, 4), 0.25);
        assert_eq!(AlphaSchedule::Constant.at(0.5, 4), 0.5);
        let b1 = Beta1Schedule::Decay {
            beta1: 0.9,
            lambda: 0.5,
        };
        assert_eq!(b1.at(1), 0.9);
        assert_eq!(b1.at(3), 0.225);
        assert_eq!(Beta2Schedule::OneMinusInvT.at(1), 0.0);
        assert_eq!(Beta2Schedule::OneMinusInvT.at(4), 0.75);
    }

    #[test]
    fn gamma_and_validation() {
        let h = HyperParams::ramsgrad(0.1, 0.9, 0.999);
        assert!((h.gamma().unwrap() - 0.9 / 0.999f64.sqrt()).abs() < 1e-15);
        assert!(HyperParams::radam(0.0, 0.9, 0.999).validate().is_err());
        assert!(HyperParams::radam(0.1, 1.0, 0.999).validate().is_err());
        assert!(HyperParams::radam(0.1, 0.9, 1.0).validate().is_err());
        assert!(HyperParams::radamnc(0.1, 0.9, 1.0).validate().is_err());
        assert!(Method::Radam
            .check(&HyperParams::ramsgrad(0.1, 0.9, 0.99))
            .is_err());
        assert!(Method::RadamNc
            .check(&HyperParams::radam(0.1, 0.9, 0.99))
            .is_err());
        assert!(Method::RadamNc
            .check(&HyperParams::radamnc(0.1, 0.9, 0.99))
            .is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("adamw".parse::<Method>().is_err());
    }
}
