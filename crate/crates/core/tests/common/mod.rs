//! An independent implementation of hyperbolic geometry in the hyperboloid
//! model `{X : ⟨X, X⟩_L = -1, X₀ > 0}`, used to check the Poincaré-ball code.

#![allow(dead_code)]

pub fn minkowski(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

pub fn lorentz_norm(v: &[f64]) -> f64 {
    minkowski(v, v).max(0.0).sqrt()
}

fn axpy(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

/// Ball point to hyperboloid point.
pub fn lift(x: &[f64]) -> Vec<f64> {
    let s = 1.0 - x.iter().map(|c| c * c).sum::<f64>();
    let mut out = vec![(2.0 - s) / s];
    out.extend(x.iter().map(|c| 2.0 * c / s));
    out
}

/// Hyperboloid point to ball point.
pub fn lower(p: &[f64]) -> Vec<f64> {
    p[1..].iter().map(|c| c / (1.0 + p[0])).collect()
}

/// Pushes a ball tangent vector `u` at `x` to the hyperboloid.
pub fn lift_tangent(x: &[f64], u: &[f64]) -> Vec<f64> {
    let s = 1.0 - x.iter().map(|c| c * c).sum::<f64>();
    let xu: f64 = x.iter().zip(u).map(|(a, b)| a * b).sum();
    let mut out = vec![4.0 * xu / (s * s)];
    out.extend(
        x.iter()
            .zip(u)
            .map(|(xi, ui)| 2.0 * ui / s + 4.0 * xu * xi / (s * s)),
    );
    out
}

/// Pulls a hyperboloid tangent vector `v` at `p` back to the ball.
pub fn lower_tangent(p: &[f64], v: &[f64]) -> Vec<f64> {
    let d = 1.0 + p[0];
    p[1..]
        .iter()
        .zip(&v[1..])
        .map(|(pi, vi)| vi / d - pi * v[0] / (d * d))
        .collect()
}

pub fn distance(p: &[f64], q: &[f64]) -> f64 {
    (-minkowski(p, q)).max(1.0).acosh()
}

pub fn exp(p: &[f64], v: &[f64]) -> Vec<f64> {
    let n = lorentz_norm(v);
    if n == 0.0 {
        return p.to_vec();
    }
    axpy(n.cosh(), p, n.sinh() / n, v)
}

pub fn log(p: &[f64], q: &[f64]) -> Vec<f64> {
    let d = distance(p, q);
    if d == 0.0 {
        return vec![0.0; p.len()];
    }
    // component of q orthogonal to p, rescaled to length d
    let c = minkowski(p, q);
    let w = axpy(1.0, q, c, p);
    let wn = lorentz_norm(&w);
    w.iter().map(|x| x * d / wn).collect()
}

/// Parallel transport along the geodesic from `p` to `q`.
pub fn transport(p: &[f64], q: &[f64], v: &[f64]) -> Vec<f64> {
    let lpq = log(p, q);
    let lqp = log(q, p);
    let d2 = minkowski(&lpq, &lpq);
    if d2 == 0.0 {
        return v.to_vec();
    }
    let c = minkowski(&lpq, v) / d2;
    let s = axpy(1.0, &lpq, 1.0, &lqp);
    axpy(1.0, v, -c, &s)
}

/// One RAMSGRAD / RADAM / RADAGRAD / RADAMNC step on a single unconstrained
/// hyperbolic component, written from the recurrences directly.
#[derive(Debug, Clone)]
pub struct TraceState {
    pub t: u64,
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub tau: Vec<f64>,
    pub v: f64,
    pub v_hat: f64,
}

impl TraceState {
    pub fn at(x: Vec<f64>) -> Self {
        let n = x.len();
        Self {
            t: 0,
            x,
            m: vec![0.0; n],
            tau: vec![0.0; n],
            v: 0.0,
            v_hat: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TraceRule {
    /// β₁ₜ, β₂ₜ supplied per step; `max` toggles the amsgrad max.
    Adam { max: bool },
    /// `v` accumulates the squared norms.
    Adagrad,
}

pub fn trace_step(
    s: &TraceState,
    g: &[f64],
    alpha_t: f64,
    beta1_t: f64,
    beta2_t: f64,
    eps: f64,
    rule: TraceRule,
) -> TraceState {
    let gg = minkowski(g, g);
    let (m, v, v_hat) = match rule {
        TraceRule::Adam { max } => {
            let m = axpy(beta1_t, &s.tau, 1.0 - beta1_t, g);
            let v = beta2_t * s.v + (1.0 - beta2_t) * gg;
            (m, v, if max { s.v_hat.max(v) } else { v })
        }
        TraceRule::Adagrad => {
            let v = s.v + gg;
            (g.to_vec(), v, v)
        }
    };
    let h: Vec<f64> = m
        .iter()
        .map(|c| -alpha_t * c / (v_hat.sqrt() + eps))
        .collect();
    let x = exp(&s.x, &h);
    let tau = transport(&s.x, &x, &m);
    TraceState {
        t: s.t + 1,
        x,
        m,
        tau,
        v,
        v_hat,
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
