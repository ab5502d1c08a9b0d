//! Closed-form regret bounds evaluated from a recorded run.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::run::RegretRecord;
use super::zeta;
use crate::optim::{AlphaSchedule, Beta1Schedule, Beta2Schedule, HyperParams, UpdateMode};
use crate::{Error, Result};

/// Which convergence theorem a bound comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    /// RAMSGRAD on a product of manifolds.
    Ramsgrad,
    /// RADAMNC, which covers RADAGRAD when `β₁ = 0`.
    RadamNc,
    /// Coordinatewise AMSGRAD in `ℝⁿ`.
    Amsgrad,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::Ramsgrad => "ramsgrad",
            Theorem::RadamNc => "radamnc",
            Theorem::Amsgrad => "amsgrad",
        })
    }
}

fn refuse<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Hypothesis(msg.into()))
}

fn check_record(record: &RegretRecord, horizon: usize, d_inf: f64) -> Result<()> {
    if horizon == 0 || horizon > record.steps.len() {
        return refuse(format!(
            "horizon {horizon} is outside the recorded range 1..={}",
            record.steps.len()
        ));
    }
    if !(d_inf.is_finite() && d_inf >= 0.0) {
        return refuse(format!(
            "D_inf must be finite and non-negative, got {d_inf}"
        ));
    }
    Ok(())
}

fn check_schedule(hyper: &HyperParams) -> Result<()> {
    if hyper.alpha_schedule != AlphaSchedule::InvSqrt {
        return refuse("alpha_t = alpha / sqrt(t) is required");
    }
    if hyper.update_mode != UpdateMode::Exponential {
        return refuse("the bounds cover exponential-map updates only");
    }
    Ok(())
}

/// Refuses hyperparameters outside the hypotheses of `theorem`.
pub fn check_hypotheses(theorem: Theorem, hyper: &HyperParams) -> Result<()> {
    check_schedule(hyper)?;
    match theorem {
        Theorem::Ramsgrad | Theorem::Amsgrad => check_amsgrad_family(hyper).map(|_| ()),
        Theorem::RadamNc => check_radamnc(hyper).map(|_| ()),
    }
}

/// Checks `β₁ₜ ≤ β₁ = β₁₁`, `γ = β₁/√β₂ < 1` and a constant `β₂`.
fn check_amsgrad_family(hyper: &HyperParams) -> Result<(f64, f64, f64)> {
    let beta2 = match hyper.beta2 {
        Beta2Schedule::Constant(b) => b,
        Beta2Schedule::OneMinusInvT => return refuse("a constant beta2 is required"),
    };
    if !hyper.amsgrad_max {
        return refuse("the bound holds for the amsgrad update with v_hat = max(v_hat, v)");
    }
    let beta1 = hyper.beta1.initial();
    if let Beta1Schedule::Decay { lambda, .. } = hyper.beta1 {
        if lambda > 1.0 {
            return refuse("beta1_t <= beta1 requires a decay factor <= 1");
        }
    }
    let gamma = match hyper.gamma() {
        Some(g) => g,
        None if beta1 == 0.0 => 0.0,
        None => return refuse("gamma = beta1 / sqrt(beta2) is undefined for beta2 = 0"),
    };
    if gamma >= 1.0 {
        return refuse(format!("gamma = beta1 / sqrt(beta2) = {gamma} must be < 1"));
    }
    Ok((beta1, beta2, gamma))
}

/// Checks the `β₁ₜ = β₁λ^(t-1)`, `λ < 1`, `β₂ₜ = 1 - 1/t` schedules and
/// returns `(β₁, λ)`.
fn check_radamnc(hyper: &HyperParams) -> Result<(f64, f64)> {
    if hyper.beta2 != Beta2Schedule::OneMinusInvT {
        return refuse("beta2_t = 1 - 1/t is required");
    }
    if hyper.amsgrad_max {
        return refuse("the bound covers the update without the max on v");
    }
    let (beta1, lambda) = match hyper.beta1 {
        Beta1Schedule::Decay { beta1, lambda } => (beta1, lambda),
        Beta1Schedule::Constant(0.0) => (0.0, 0.0),
        Beta1Schedule::Constant(_) => {
            return refuse("beta1_t = beta1 * lambda^(t-1) with lambda < 1 is required")
        }
    };
    if !(0.0..1.0).contains(&lambda) {
        return refuse(format!("lambda = {lambda} must be < 1"));
    }
    Ok((beta1, lambda))
}

fn amsgrad_family_bound(
    record: &RegretRecord,
    d_inf: f64,
    kappas: &[f64],
    hyper: &HyperParams,
    horizon: usize,
) -> Result<f64> {
    check_record(record, horizon, d_inf)?;
    check_schedule(hyper)?;
    let (beta1, beta2, gamma) = check_amsgrad_family(hyper)?;
    let n = record.components;
    if kappas.len() != n {
        return Err(Error::ComponentCount {
            expected: n,
            got: kappas.len(),
        });
    }
    let alpha = hyper.alpha;
    let t_f = horizon as f64;
    let steps = &record.steps[..horizon];
    let d2 = d_inf * d_inf;

    let last = &steps[horizon - 1];
    let term1 =
        t_f.sqrt() * d2 / (2.0 * alpha * (1.0 - beta1)) * last.sqrt_v_hat.iter().sum::<f64>();

    let mut weighted = 0.0;
    for s in steps {
        weighted += s.beta1_t * s.sqrt_v_hat.iter().sum::<f64>() / s.alpha_t;
    }
    let term2 = d2 / (2.0 * (1.0 - beta1)) * weighted;

    let coef = alpha * (1.0 + t_f.ln()).sqrt()
        / ((1.0 - beta1).powi(2) * (1.0 - gamma) * (1.0 - beta2).sqrt());
    let mut curv = 0.0;
    for (i, &k) in kappas.iter().enumerate() {
        let sq: f64 = steps.iter().map(|s| s.grad_norms[i].powi(2)).sum();
        curv += (zeta(k, d_inf)? + 1.0) / 2.0 * sq.sqrt();
    }
    Ok(term1 + term2 + coef * curv)
}

/// Regret bound of RAMSGRAD after `horizon` rounds.
pub fn ramsgrad_bound(
    record: &RegretRecord,
    d_inf: f64,
    kappas: &[f64],
    hyper: &HyperParams,
    horizon: usize,
) -> Result<f64> {
    amsgrad_family_bound(record, d_inf, kappas, hyper, horizon)
}

/// Regret bound of coordinatewise AMSGRAD after `horizon` rounds; every
/// coordinate is a flat factor so the curvature factor is 1.
pub fn amsgrad_bound(
    record: &RegretRecord,
    d_inf: f64,
    hyper: &HyperParams,
    horizon: usize,
) -> Result<f64> {
    let kappas = vec![0.0; record.components];
    amsgrad_family_bound(record, d_inf, &kappas, hyper, horizon)
}

/// Regret bound of RADAMNC after `horizon` rounds.
///
/// The leading coefficient uses `D_∞²`: with `v_T = Σ‖g_t‖²/T` the
/// telescoped distance term `√T D_∞² Σ√v_T / (2α(1-β₁))` becomes
/// `D_∞² Σ √(Σ‖g_t‖²) / (2α(1-β₁))`.
pub fn radamnc_bound(
    record: &RegretRecord,
    d_inf: f64,
    g_inf: f64,
    kappas: &[f64],
    hyper: &HyperParams,
    n: usize,
    horizon: usize,
) -> Result<f64> {
    check_record(record, horizon, d_inf)?;
    check_schedule(hyper)?;
    let (beta1, lambda) = check_radamnc(hyper)?;
    if kappas.len() != record.components {
        return Err(Error::ComponentCount {
            expected: record.components,
            got: kappas.len(),
        });
    }
    let alpha = hyper.alpha;
    let steps = &record.steps[..horizon];
    let mut main = 0.0;
    for (i, &k) in kappas.iter().enumerate() {
        let sq: f64 = steps.iter().map(|s| s.grad_norms[i].powi(2)).sum();
        let coef = d_inf * d_inf / (2.0 * alpha * (1.0 - beta1))
            + alpha * (zeta(k, d_inf)? + 1.0) / (1.0 - beta1).powi(3);
        main += coef * sq.sqrt();
    }
    let trailing = if beta1 == 0.0 {
        0.0
    } else {
        beta1 * d_inf * d_inf * g_inf * n as f64
            / (2.0 * alpha * (1.0 - beta1) * (1.0 - lambda).powi(2))
    };
    Ok(main + trailing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regret::run::StepRecord;

    fn record(steps: Vec<StepRecord>) -> RegretRecord {
        RegretRecord {
            components: steps[0].grad_norms.len(),
            steps,
        }
    }

    fn zero_record(n: usize, horizon: usize, hyper: &HyperParams) -> RegretRecord {
        record(
            (1..=horizon as u64)
                .map(|t| StepRecord {
                    loss: 0.0,
                    grad_norms: vec![0.0; n],
                    sqrt_v_hat: vec![0.0; n],
                    alpha_t: hyper.alpha_schedule.at(hyper.alpha, t),
                    beta1_t: hyper.beta1.at(t),
                })
                .collect(),
        )
    }

    fn ramsgrad_hyper() -> HyperParams {
        HyperParams::ramsgrad(0.5, 0.9, 0.999).with_alpha_schedule(AlphaSchedule::InvSqrt)
    }

    #[test]
    fn zero_gradients_give_zero_ramsgrad_bound() {
        let hp = ramsgrad_hyper();
        let r = zero_record(3, 20, &hp);
        assert_eq!(ramsgrad_bound(&r, 2.0, &[-1.0; 3], &hp, 20).unwrap(), 0.0);
    }

    #[test]
    fn zero_gradients_leave_only_the_momentum_term() {
        let hp = HyperParams::radamnc(0.5, 0.9, 0.99).with_alpha_schedule(AlphaSchedule::InvSqrt);
        let r = zero_record(3, 20, &hp);
        let b = radamnc_bound(&r, 2.0, 2.0, &[-1.0; 3], &hp, 3, 20).unwrap();
        let trailing = 0.9 * 4.0 * 2.0 * 3.0 / (2.0 * 0.5 * 0.1 * 0.01f64.powi(2));
        assert!((b - trailing).abs() < 1e-9 * trailing);
    }

    #[test]
    fn radagrad_case_has_no_trailing_term() {
        let hp = HyperParams::radamnc(0.5, 0.0, 0.99).with_alpha_schedule(AlphaSchedule::InvSqrt);
        let r = zero_record(2, 10, &hp);
        assert_eq!(
            radamnc_bound(&r, 2.0, 2.0, &[-1.0; 2], &hp, 2, 10).unwrap(),
            0.0
        );
    }

    #[test]
    fn flat_curvature_recovers_amsgrad_bound() {
        let hp = ramsgrad_hyper();
        let steps = (1..=30u64)
            .map(|t| StepRecord {
                loss: 1.0,
                grad_norms: vec![0.3 * t as f64 % 1.0, 0.7],
                sqrt_v_hat: vec![0.1 + 0.01 * t as f64, 0.2],
                alpha_t: hp.alpha_schedule.at(hp.alpha, t),
                beta1_t: 0.9,
            })
            .collect();
        let r = record(steps);
        let a = ramsgrad_bound(&r, 2.0, &[0.0, 0.0], &hp, 30).unwrap();
        let b = amsgrad_bound(&r, 2.0, &hp, 30).unwrap();
        assert_eq!(a, b);
        let curved = ramsgrad_bound(&r, 2.0, &[-1.0, -1.0], &hp, 30).unwrap();
        assert!(curved > a);
    }

    #[test]
    fn hypotheses_are_enforced() {
        let hp = ramsgrad_hyper();
        let r = zero_record(1, 5, &hp);
        let mut bad =
            HyperParams::ramsgrad(0.5, 0.95, 0.9).with_alpha_schedule(AlphaSchedule::InvSqrt);
        assert!(matches!(
            ramsgrad_bound(&r, 2.0, &[-1.0], &bad, 5),
            Err(Error::Hypothesis(_))
        ));
        bad = HyperParams::ramsgrad(0.5, 0.9, 0.999);
        assert!(ramsgrad_bound(&r, 2.0, &[-1.0], &bad, 5).is_err());
        assert!(ramsgrad_bound(&r, 2.0, &[-1.0], &hp, 6).is_err());
        let radam = HyperParams::radam(0.5, 0.9, 0.999).with_alpha_schedule(AlphaSchedule::InvSqrt);
        assert!(ramsgrad_bound(&r, 2.0, &[-1.0], &radam, 5).is_err());
        assert!(radamnc_bound(&r, 2.0, 2.0, &[-1.0], &hp, 1, 5).is_err());
    }
}
