//! Riemannian adaptive optimizers on product manifolds.
//!
//! Every component manifold gets its own step counter, momentum `m`, its
//! transported copy `τ`, and the scalar adaptive terms `v` and `v̂`. The
//! Euclidean coordinatewise references live in [`euclidean`].

pub mod euclidean;
mod hyper;

pub use euclidean::{CoordinateState, EuclideanOptimizer, Reference};
pub use hyper::{
    AlphaSchedule, Beta1Schedule, Beta2Schedule, HyperParams, Method, UpdateMode, DEFAULT_EPSILON,
};

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::manifold::{Component, Factor, Manifold, ProductManifold, ProductPoint};
use crate::{Error, Result};

/// Per-component optimizer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentState {
    /// Number of steps this component has received.
    pub t: u64,
    /// Momentum `m_t`, a tangent vector at the iterate it was computed at.
    pub m: Vec<f64>,
    /// `τ_t = φ(m_t)`, a tangent vector at the current iterate.
    pub tau: Vec<f64>,
    pub v: f64,
    pub v_hat: f64,
}

impl ComponentState {
    pub fn new(dim: usize) -> Self {
        Self {
            t: 0,
            m: vec![0.0; dim],
            tau: vec![0.0; dim],
            v: 0.0,
            v_hat: 0.0,
        }
    }
}

/// How the momentum is carried to the tangent space of the next iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MomentumTransport {
    /// Parallel transport to the unprojected point, then along the geodesic
    /// to the projected one.
    #[default]
    TwoLeg,
    /// Parallel transport straight from the old to the new iterate.
    Direct,
}

/// Carries `m` from `x_old` to `x_new`, possibly through `x_tilde`, the
/// iterate before projection.
pub fn transport_momentum(
    manifold: &Component,
    x_old: &[f64],
    x_tilde: &[f64],
    x_new: &[f64],
    m: &[f64],
    strategy: MomentumTransport,
) -> Result<Vec<f64>> {
    match strategy {
        MomentumTransport::Direct => manifold.transport(x_old, x_new, m),
        MomentumTransport::TwoLeg => {
            let mid = manifold.transport(x_old, x_tilde, m)?;
            if x_tilde == x_new {
                Ok(mid)
            } else {
                manifold.transport(x_tilde, x_new, &mid)
            }
        }
    }
}

fn apply_step(
    factor: &Factor,
    x: &[f64],
    h: &[f64],
    mode: UpdateMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let x_tilde = match mode {
        UpdateMode::Exponential => factor.manifold.exp(x, h)?,
        UpdateMode::Retraction => factor.manifold.retract(x, h)?,
    };
    let x_new = match factor.radius {
        Some(r) => factor.manifold.project_feasible(&x_tilde, r),
        None => x_tilde.clone(),
    };
    Ok((x_tilde, x_new))
}

/// One RSGD step `Π(exp_x(-α_t g))`, or `Π(R_x(-α_t g))` in retraction mode.
pub fn rsgd_step(
    manifold: &ProductManifold,
    x: &[Vec<f64>],
    g: &[Vec<f64>],
    alpha_t: f64,
    mode: UpdateMode,
) -> Result<ProductPoint> {
    manifold.check_point(x)?;
    manifold.check_tangent(g)?;
    manifold
        .factors()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let h = linalg::scale(&g[i], -alpha_t);
            apply_step(f, &x[i], &h, mode).map(|(_, x_new)| x_new)
        })
        .collect()
}

/// Outcome of one component update, kept for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStep {
    pub state: ComponentState,
    pub x: Vec<f64>,
    /// `‖g_t‖²` in the metric at the old iterate.
    pub grad_norm_sq: f64,
}

/// A Riemannian optimizer over a fixed product manifold.
#[derive(Debug, Clone)]
pub struct RiemannianOptimizer {
    method: Method,
    hyper: HyperParams,
    transport: MomentumTransport,
    states: Vec<ComponentState>,
}

impl RiemannianOptimizer {
    pub fn new(method: Method, hyper: HyperParams, manifold: &ProductManifold) -> Result<Self> {
        method.check(&hyper)?;
        let states = manifold
            .factors()
            .iter()
            .map(|f| ComponentState::new(f.manifold.dim()))
            .collect();
        Ok(Self {
            method,
            hyper,
            transport: MomentumTransport::default(),
            states,
        })
    }

    pub fn with_transport(mut self, transport: MomentumTransport) -> Self {
        self.transport = transport;
        self
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn hyper(&self) -> &HyperParams {
        &self.hyper
    }

    pub fn states(&self) -> &[ComponentState] {
        &self.states
    }

    /// Pure update of a single component: returns the new state and point
    /// without touching `self`.
    pub fn step_component(
        &self,
        factor: &Factor,
        index: usize,
        state: &ComponentState,
        x: &[f64],
        g: &[f64],
    ) -> Result<ComponentStep> {
        let dim = factor.manifold.dim();
        if g.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: g.len(),
            });
        }
        if g.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteGradient { component: index });
        }
        let hp = &self.hyper;
        let t = state.t + 1;
        let alpha_t = hp.alpha_schedule.at(hp.alpha, t);
        let grad_norm_sq = factor.manifold.inner(x, g, g);
        let mut next = ComponentState { t, ..state.clone() };

        let (h, momentum) = match self.method {
            Method::Rsgd => (linalg::scale(g, -alpha_t), None),
            Method::Radagrad => {
                next.v = state.v + grad_norm_sq;
                next.v_hat = next.v;
                let c = -alpha_t / (next.v.sqrt() + hp.epsilon);
                (linalg::scale(g, c), None)
            }
            Method::Radam | Method::Ramsgrad | Method::RadamNc => {
                let b1 = hp.beta1.at(t);
                let b2 = hp.beta2.at(t);
                let m = linalg::lincomb(b1, &state.tau, 1.0 - b1, g);
                next.v = b2 * state.v + (1.0 - b2) * grad_norm_sq;
                next.v_hat = if hp.amsgrad_max {
                    state.v_hat.max(next.v)
                } else {
                    next.v
                };
                let c = -alpha_t / (next.v_hat.sqrt() + hp.epsilon);
                (linalg::scale(&m, c), Some(m))
            }
        };

        let (x_tilde, x_new) = apply_step(factor, x, &h, hp.update_mode)?;
        if let Some(m) = momentum {
            // a retraction does not move along the geodesic, so only the
            // direct transport is meaningful there
            let strategy = match hp.update_mode {
                UpdateMode::Exponential => self.transport,
                UpdateMode::Retraction => MomentumTransport::Direct,
            };
            next.tau = transport_momentum(&factor.manifold, x, &x_tilde, &x_new, &m, strategy)?;
            next.m = m;
        }
        Ok(ComponentStep {
            state: next,
            x: x_new,
            grad_norm_sq,
        })
    }

    /// Dense step: every component receives its gradient block.
    pub fn step(
        &mut self,
        manifold: &ProductManifold,
        x: &mut ProductPoint,
        grad: &[Vec<f64>],
    ) -> Result<Vec<ComponentStep>> {
        manifold.check_tangent(grad)?;
        let updates: Vec<(usize, &[f64])> = grad
            .iter()
            .enumerate()
            .map(|(i, g)| (i, g.as_slice()))
            .collect();
        self.step_sparse(manifold, x, &updates)
    }

    /// Sparse step: only the listed components move; the others keep both
    /// their point and their state.
    pub fn step_sparse(
        &mut self,
        manifold: &ProductManifold,
        x: &mut ProductPoint,
        grads: &[(usize, &[f64])],
    ) -> Result<Vec<ComponentStep>> {
        if x.len() != manifold.len() || self.states.len() != manifold.len() {
            return Err(Error::ComponentCount {
                expected: manifold.len(),
                got: x.len(),
            });
        }
        let steps = grads
            .iter()
            .map(|&(i, g)| {
                let factor = manifold.factors().get(i).ok_or(Error::ComponentCount {
                    expected: manifold.len(),
                    got: i + 1,
                })?;
                factor.manifold.check_point(&x[i])?;
                self.step_component(factor, i, &self.states[i], &x[i], g)
            })
            .collect::<Result<Vec<_>>>()?;
        for (&(i, _), s) in grads.iter().zip(&steps) {
            self.states[i] = s.state.clone();
            x[i] = s.x.clone();
        }
        Ok(steps)
    }
}
