//! Running a learner on a [`ConvexProblem`] and measuring its regret.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bounds::{amsgrad_bound, radamnc_bound, ramsgrad_bound, Theorem};
use super::oracle::karcher_minimizer;
use super::problem::ConvexProblem;
use crate::manifold::{Component, ProductPoint};
use crate::optim::{EuclideanOptimizer, HyperParams, Method, Reference, RiemannianOptimizer};
use crate::{Error, Result};

/// The algorithm whose regret is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Learner {
    Riemannian(Method),
    /// Coordinatewise AMSGRAD; every factor must be one-dimensional and flat.
    Amsgrad,
}

impl FromStr for Learner {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("amsgrad") {
            Ok(Learner::Amsgrad)
        } else {
            s.parse().map(Learner::Riemannian)
        }
    }
}

impl fmt::Display for Learner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Learner::Riemannian(m) => m.fmt(f),
            Learner::Amsgrad => f.write_str("amsgrad"),
        }
    }
}

/// What the bounds need from round `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// `f_t(x_t)`, evaluated before the update.
    pub loss: f64,
    /// `‖g_tⁱ‖_{x_tⁱ}` per component.
    pub grad_norms: Vec<f64>,
    /// `√v̂_tⁱ` per component after the update.
    pub sqrt_v_hat: Vec<f64>,
    pub alpha_t: f64,
    pub beta1_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretRecord {
    pub components: usize,
    pub steps: Vec<StepRecord>,
}

/// Result of [`empirical_regret`].
#[derive(Debug, Clone)]
pub struct RegretRun {
    pub learner: Learner,
    pub hyper: HyperParams,
    pub record: RegretRecord,
    /// `(T, R_T)` at each evaluated horizon.
    pub regret: Vec<(usize, f64)>,
    /// Minimizer of the summed loss over the full horizon.
    pub comparator: ProductPoint,
    pub iterates: Vec<ProductPoint>,
}

impl RegretRun {
    pub fn final_regret(&self) -> f64 {
        self.regret.last().map_or(0.0, |r| r.1)
    }
}

/// Runs `learner` for the full horizon of `problem` and evaluates
/// `R_T = Σ_{t≤T} f_t(x_t) - min_x Σ_{t≤T} f_t(x)` at every multiple of
/// `stride` and at the final round.
pub fn empirical_regret(
    problem: &ConvexProblem,
    learner: Learner,
    hyper: HyperParams,
    stride: usize,
) -> Result<RegretRun> {
    let m = &problem.manifold;
    let n = m.len();
    let horizon = problem.horizon();
    let mut x = problem.start.clone();
    let mut steps = Vec::with_capacity(horizon);
    let mut iterates = Vec::with_capacity(horizon);

    enum State {
        Riemannian(RiemannianOptimizer),
        Coordinate(EuclideanOptimizer),
    }
    let mut state = match learner {
        Learner::Riemannian(method) => {
            State::Riemannian(RiemannianOptimizer::new(method, hyper, m)?)
        }
        Learner::Amsgrad => {
            let flat = m
                .factors()
                .iter()
                .all(|f| matches!(f.manifold, Component::Euclidean(e) if e.dim == 1));
            if !flat {
                return Err(Error::Config(
                    "amsgrad runs on one-dimensional euclidean factors only".into(),
                ));
            }
            State::Coordinate(EuclideanOptimizer::new(
                Reference::Amsgrad,
                hyper,
                n,
                Some(problem.radius),
            )?)
        }
    };

    for t in 0..horizon {
        iterates.push(x.clone());
        let loss = problem.loss(t, &x)?;
        let g = problem.rgrad(t, &x)?;
        let round = t as u64 + 1;
        let grad_norms: Vec<f64>;
        let sqrt_v_hat: Vec<f64>;
        match &mut state {
            State::Riemannian(opt) => {
                let out = opt.step(m, &mut x, &g)?;
                grad_norms = out.iter().map(|s| s.grad_norm_sq.sqrt()).collect();
                sqrt_v_hat = opt.states().iter().map(|s| s.v_hat.sqrt()).collect();
            }
            State::Coordinate(opt) => {
                let mut flat: Vec<f64> = x.iter().map(|c| c[0]).collect();
                let gf: Vec<f64> = g.iter().map(|c| c[0]).collect();
                opt.step(&mut flat, &gf)?;
                x = flat.into_iter().map(|c| vec![c]).collect();
                grad_norms = gf.iter().map(|c| c.abs()).collect();
                sqrt_v_hat = opt.state().v_hat.iter().map(|v| v.sqrt()).collect();
            }
        }
        steps.push(StepRecord {
            loss,
            grad_norms,
            sqrt_v_hat,
            alpha_t: hyper.alpha_schedule.at(hyper.alpha, round),
            beta1_t: hyper.beta1.at(round),
        });
    }

    let stride = stride.max(1);
    let mut regret = Vec::new();
    let mut comparator = problem.start.clone();
    let mut cumulative = 0.0;
    for t in 1..=horizon {
        cumulative += steps[t - 1].loss;
        if t % stride != 0 && t != horizon {
            continue;
        }
        let mut best = 0.0;
        for (i, f) in m.factors().iter().enumerate() {
            let targets: Vec<&[f64]> = problem.targets[..t]
                .iter()
                .map(|p| p[i].as_slice())
                .collect();
            let (xi, v) = karcher_minimizer(f, &targets, &comparator[i])?;
            comparator[i] = xi;
            best += v;
        }
        regret.push((t, cumulative - best));
    }

    Ok(RegretRun {
        learner,
        hyper,
        record: RegretRecord {
            components: n,
            steps,
        },
        regret,
        comparator,
        iterates,
    })
}

/// Outcome of comparing an empirical regret curve with a bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub theorem: Theorem,
    /// `(T, R_T, bound_T)` for every evaluated horizon.
    pub curve: Vec<(usize, f64, f64)>,
    /// Horizons where `R_T > bound_T`.
    pub violations: Vec<usize>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates the bound of `theorem` at every horizon of `run`.
pub fn verify_bound(run: &RegretRun, problem: &ConvexProblem, theorem: Theorem) -> Result<Verdict> {
    let d = problem.d_inf();
    let kappas = problem.kappas();
    let n = problem.manifold.len();
    let expected = match theorem {
        Theorem::Ramsgrad => Learner::Riemannian(Method::Ramsgrad),
        Theorem::RadamNc => Learner::Riemannian(Method::RadamNc),
        Theorem::Amsgrad => Learner::Amsgrad,
    };
    if run.learner != expected {
        return Err(Error::Hypothesis(format!(
            "the {theorem} bound does not cover {}",
            run.learner
        )));
    }
    let mut curve = Vec::with_capacity(run.regret.len());
    let mut violations = Vec::new();
    for &(t, r) in &run.regret {
        let b = match theorem {
            Theorem::Ramsgrad => ramsgrad_bound(&run.record, d, &kappas, &run.hyper, t)?,
            Theorem::RadamNc => {
                radamnc_bound(&run.record, d, problem.g_inf(), &kappas, &run.hyper, n, t)?
            }
            Theorem::Amsgrad => amsgrad_bound(&run.record, d, &run.hyper, t)?,
        };
        if r > b {
            violations.push(t);
        }
        curve.push((t, r, b));
    }
    Ok(Verdict {
        theorem,
        curve,
        violations,
    })
}
