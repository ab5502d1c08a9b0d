use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use riemopt::manifold::Component;
use riemopt::optim::{AlphaSchedule, HyperParams, Method, DEFAULT_EPSILON};
use riemopt::regret::{
    check_hypotheses, empirical_regret, verify_bound, ConvexProblem, Learner, Theorem,
};

use crate::error::{io_err, CliError, CliResult};
use crate::manifest::RunManifest;
use crate::train::write_csv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremArg {
    /// Pick the theorem matching the optimizer.
    Auto,
    /// The bound for RAMSGRAD with a constant `β₂` and AMSGRAD maximum.
    Ramsgrad,
    /// The bound for RADAMNC, which also covers RADAGRAD through `β₁ = 0`.
    Radamnc,
    /// The flat bound for coordinatewise AMSGRAD.
    Amsgrad,
    /// Measure regret without a bound.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleArg {
    InvSqrt,
    Constant,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct RegretArgs {
    /// rsgd, radagrad, radam, ramsgrad, radamnc or amsgrad.
    #[arg(long = "opt", default_value = "ramsgrad")]
    pub learner: Learner,
    /// Comma-separated factors such as `poincare:2,euclidean:3` or
    /// `3xpoincare:2`.
    #[arg(long, default_value = "3xpoincare:2")]
    pub factors: String,
    #[arg(long = "T", default_value_t = 500)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::InvSqrt)]
    pub alpha_schedule: ScheduleArg,
    #[arg(long, default_value_t = 0.9)]
    pub beta1: f64,
    #[arg(long, default_value_t = 0.999)]
    pub beta2: f64,
    /// Decay of beta1 for radamnc.
    #[arg(long, default_value_t = 0.99)]
    pub lambda: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub eps: f64,
    /// Geodesic radius of each feasible component.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = TheoremArg::Auto)]
    pub theorem: TheoremArg,
    #[arg(long, env = "RIEMOPT_OUT_DIR", default_value = "runs")]
    pub out: PathBuf,
}

/// Parses the factor list; `amsgrad` treats `euclidean:k` as `k` scalar
/// factors.
pub fn parse_factors(spec: &str, coordinatewise: bool) -> CliResult<Vec<Component>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let bad = || CliError::Config(format!("bad factor `{item}`, expected e.g. `2xpoincare:3`"));
        let (count, rest) = match item.split_once('x') {
            Some((c, r)) if !c.is_empty() && c.chars().all(|ch| ch.is_ascii_digit()) => {
                (usize::from_str(c).map_err(|_| bad())?, r)
            }
            _ => (1, item),
        };
        let (kind, dim) = rest.split_once(':').ok_or_else(bad)?;
        let dim = usize::from_str(dim).map_err(|_| bad())?;
        if dim == 0 || count == 0 {
            return Err(bad());
        }
        let factor = match kind {
            "poincare" => vec![Component::poincare(dim)],
            "euclidean" if coordinatewise => vec![Component::euclidean(1); dim],
            "euclidean" => vec![Component::euclidean(dim)],
            _ => return Err(bad()),
        };
        for _ in 0..count {
            out.extend(factor.iter().copied());
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("no factors given".into()));
    }
    Ok(out)
}

fn theorem_for(learner: Learner, arg: TheoremArg) -> CliResult<Option<Theorem>> {
    let natural = match learner {
        Learner::Riemannian(Method::Ramsgrad) => Some(Theorem::Ramsgrad),
        Learner::Riemannian(Method::RadamNc) => Some(Theorem::RadamNc),
        Learner::Amsgrad => Some(Theorem::Amsgrad),
        Learner::Riemannian(_) => None,
    };
    let wanted = match arg {
        TheoremArg::Auto => return Ok(natural),
        TheoremArg::None => return Ok(None),
        TheoremArg::Ramsgrad => Theorem::Ramsgrad,
        TheoremArg::Radamnc => Theorem::RadamNc,
        TheoremArg::Amsgrad => Theorem::Amsgrad,
    };
    if natural != Some(wanted) {
        return Err(CliError::Config(format!(
            "{learner} is not covered by the {wanted} bound"
        )));
    }
    Ok(Some(wanted))
}

#[derive(Debug, Serialize)]
struct Header<'a> {
    learner: String,
    theorem: Option<Theorem>,
    factors: &'a str,
    horizon: usize,
    seed: u64,
    radius: f64,
    d_inf: f64,
    g_inf: f64,
    kappas: Vec<f64>,
    hyper: HyperParams,
    final_regret: f64,
    final_bound: Option<f64>,
    violations: Vec<usize>,
    verdict: &'a str,
}

pub fn run(args: &RegretArgs) -> CliResult<()> {
    let coordinatewise = args.learner == Learner::Amsgrad;
    let components = parse_factors(&args.factors, coordinatewise)?;
    let method = match args.learner {
        Learner::Riemannian(m) => m,
        Learner::Amsgrad => Method::Ramsgrad,
    };
    let schedule = match args.alpha_schedule {
        ScheduleArg::InvSqrt => AlphaSchedule::InvSqrt,
        ScheduleArg::Constant => AlphaSchedule::Constant,
    };
    let hyper = HyperParams::for_method(method, args.alpha, args.beta1, args.beta2, args.lambda)
        .with_alpha_schedule(schedule)
        .with_epsilon(args.eps);
    method.check(&hyper)?;
    let theorem = theorem_for(args.learner, args.theorem)?;
    if let Some(th) = theorem {
        check_hypotheses(th, &hyper)?;
    }
    if args.horizon == 0 {
        return Err(CliError::Config("--T must be at least 1".into()));
    }

    let problem = ConvexProblem::random(&components, args.radius, args.horizon, args.seed)?;
    let run = empirical_regret(&problem, args.learner, hyper, 1)?;
    let verdict = theorem
        .map(|th| verify_bound(&run, &problem, th))
        .transpose()?;

    std::fs::create_dir_all(&args.out).map_err(io_err(&args.out))?;
    let csv = args.out.join("regret.csv");
    write_csv(&csv, |w| {
        write!(w, "t,loss,regret,bound")?;
        for i in 0..components.len() {
            write!(w, ",grad_norm_{i}")?;
        }
        writeln!(w)?;
        for (k, &(t, r)) in run.regret.iter().enumerate() {
            let s = &run.record.steps[t - 1];
            let b = verdict
                .as_ref()
                .map(|v| v.curve[k].2.to_string())
                .unwrap_or_default();
            write!(w, "{t},{},{r},{b}", s.loss)?;
            for g in &s.grad_norms {
                write!(w, ",{g}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;

    let verdict_str = match &verdict {
        Some(v) if v.passed() => "PASS",
        Some(_) => "FAIL",
        None => "n/a",
    };
    let header = Header {
        learner: args.learner.to_string(),
        theorem,
        factors: &args.factors,
        horizon: args.horizon,
        seed: args.seed,
        radius: args.radius,
        d_inf: problem.d_inf(),
        g_inf: problem.g_inf(),
        kappas: problem.kappas(),
        hyper,
        final_regret: run.final_regret(),
        final_bound: verdict.as_ref().and_then(|v| v.curve.last().map(|c| c.2)),
        violations: verdict
            .as_ref()
            .map(|v| v.violations.clone())
            .unwrap_or_default(),
        verdict: verdict_str,
    };
    let json = args.out.join("regret.json");
    std::fs::write(&json, serde_json::to_string_pretty(&header)? + "\n").map_err(io_err(&json))?;
    let mut manifest = RunManifest::new("regret", args, &header, args.seed, &[])?;
    manifest.outputs.extend([csv, json]);
    manifest.write(&args.out)?;

    match (&verdict, theorem) {
        (Some(v), Some(th)) if v.passed() => {
            println!(
                "PASS: R_T <= bound at all {} prefixes ({th}); final regret {:.6}, bound {:.6}",
                v.curve.len(),
                run.final_regret(),
                header.final_bound.unwrap_or(f64::NAN)
            );
            Ok(())
        }
        (Some(v), Some(th)) => {
            println!(
                "FAIL: bound exceeded at {} of {} prefixes ({th})",
                v.violations.len(),
                v.curve.len()
            );
            Err(CliError::Failed(format!("{th} bound violated")))
        }
        _ => {
            println!(
                "final regret {:.6} (no bound evaluated)",
                run.final_regret()
            );
            Ok(())
        }
    }
}
