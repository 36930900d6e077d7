//! The `sample`, `fit`, `eval` and `lcurve` commands.

use std::io::Write;

use serde::Serialize;

use ratfit::domain::{BoxDomain, SampleSet};
use ratfit::lcurve::{lcurve, LCurve, SweepMode};
use ratfit::linfit::{eta_for_noise, fit_polynomial, fit_rational_onb, fit_rational_reduced};
use ratfit::model::{FitReport, RationalModel};
use ratfit::sampling::{add_noise, default_sample_count, dlhd, lhs, DesignSpec};
use ratfit::sipfit::{fit_rational_polefree, SipConfig};
use ratfit::testfns::TestFunction;

use crate::app::{EvalArgs, FitArgs, LcurveArgs, LcurveMode, Method, SampleArgs, Strategy};
use crate::csvio::{fmt_f64, read_points, write_column, write_points};
use crate::error::{CliError, CliResult};
use crate::modelfile::{load_model, save_model};

/// Fit parameters shared by `fit` and `bench`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    pub eta: Option<f64>,
    pub epsilon: f64,
    pub sip: SipConfig,
}

/// Dispatches to the fitting routine of `method`. `m` is the polynomial
/// degree for `poly`, which ignores `d`.
pub fn run_fit(
    samples: &SampleSet,
    method: Method,
    m: usize,
    d: usize,
    opts: &FitOptions,
) -> ratfit::Result<(RationalModel, FitReport)> {
    match method {
        Method::Poly => fit_polynomial(samples, m),
        Method::Ra => fit_rational_onb(samples, m, d),
        Method::RaDr => fit_rational_reduced(samples, m, d, opts.eta.unwrap_or_else(|| eta_for_noise(opts.epsilon))),
        Method::RaSip => fit_rational_polefree(samples, m, d, &opts.sip),
    }
}

fn parse_domain(spec: &str) -> CliResult<BoxDomain> {
    Ok(BoxDomain::parse(spec)?)
}

/// `--domain` if given, else the domain of `--function`, else the bounding
/// box of the points.
fn resolve_domain(domain: Option<&str>, function: Option<&str>, points: &[Vec<f64>]) -> CliResult<BoxDomain> {
    if let Some(spec) = domain {
        return parse_domain(spec);
    }
    if let Some(id) = function {
        return Ok(TestFunction::by_id(id)?.domain());
    }
    let n = points.first().map_or(0, Vec::len);
    let mut bounds = vec![(f64::INFINITY, f64::NEG_INFINITY); n];
    for p in points {
        for (b, &v) in bounds.iter_mut().zip(p) {
            b.0 = b.0.min(v);
            b.1 = b.1.max(v);
        }
    }
    Ok(BoxDomain::new(bounds)?)
}

fn load_samples(path: &str, domain: Option<&str>, function: Option<&str>) -> CliResult<SampleSet> {
    let table = read_points(path)?;
    let values = table
        .values
        .ok_or_else(|| CliError::format(path, "sample file needs a value column f"))?;
    if table.points.is_empty() {
        return Err(CliError::format(path, "sample file has no rows"));
    }
    let domain = resolve_domain(domain, function, &table.points)?;
    Ok(SampleSet::new(domain, table.points, values)?)
}

/// Writes the design; returns the number of rows.
pub fn cmd_sample(args: &SampleArgs) -> CliResult<usize> {
    let function = args.function.as_deref().map(TestFunction::by_id).transpose()?;
    let domain = match (&args.domain, function) {
        (Some(spec), _) => parse_domain(spec)?,
        (None, Some(f)) => f.domain(),
        (None, None) => {
            let n = args
                .dim
                .ok_or_else(|| CliError::Usage("either --function or --dim is required".into()))?;
            BoxDomain::cube(n, -1.0, 1.0)?
        }
    };
    if let Some(n) = args.dim {
        if n != domain.dim() {
            return Err(CliError::Usage(format!(
                "--dim {n} does not match the {}-dimensional domain",
                domain.dim()
            )));
        }
    }
    if let Some(f) = function {
        if f.n != domain.dim() {
            return Err(CliError::Usage(format!(
                "function {} is {}-dimensional but the domain has {} coordinates",
                f.id,
                f.n,
                domain.dim()
            )));
        }
    }
    let points = match args.strategy {
        Strategy::Lhs => lhs(&DesignSpec {
            count: default_sample_count(domain.dim(), args.m, args.n)?,
            domain: domain.clone(),
            seed: args.seed,
        })?,
        Strategy::Dlhd => dlhd(&domain, args.m, args.n, args.seed)?.0,
    };
    let values: Option<Vec<f64>> = function.map(|f| points.iter().map(|x| f.eval(x)).collect());
    write_points(&args.out, &points, values.as_deref())?;
    Ok(points.len())
}

#[derive(Serialize)]
struct FitSummary<'a> {
    method: &'static str,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    epsilon: f64,
    #[serde(flatten)]
    report: &'a FitReport,
}

pub fn cmd_fit(args: &FitArgs) -> CliResult<(RationalModel, FitReport)> {
    let mut samples = load_samples(&args.input, args.domain.as_deref(), args.function.as_deref())?;
    if args.epsilon < 0.0 || !args.epsilon.is_finite() {
        return Err(CliError::Usage(format!("--epsilon {} must be finite and non-negative", args.epsilon)));
    }
    if args.epsilon > 0.0 {
        samples = samples.with_values(add_noise(samples.values(), args.epsilon, args.seed))?;
    }
    let opts = FitOptions {
        eta: args.eta,
        epsilon: args.epsilon,
        sip: SipConfig {
            tau: args.tau,
            sigma: args.sigma,
            seed: args.seed,
            max_iterations: args.max_iterations,
            ..SipConfig::default()
        },
    };
    let (model, report) = run_fit(&samples, args.method, args.m, args.n, &opts)?;
    save_model(&args.out, &model)?;
    let summary = FitSummary {
        method: args.method.name(),
        m: model.numerator_degree(),
        n: model.denominator_degree(),
        epsilon: args.epsilon,
        report: &report,
    };
    let mut json = serde_json::to_string_pretty(&summary).expect("report serializes");
    json.push('\n');
    match &args.report {
        Some(path) => std::fs::write(path, json).map_err(|e| CliError::io(path, e))?,
        None => {
            let _ = std::io::stderr().write_all(json.as_bytes());
        }
    }
    Ok((model, report))
}

/// Writes one value per input point; returns the number of points.
pub fn cmd_eval(args: &EvalArgs) -> CliResult<usize> {
    let model = load_model(&args.model)?;
    let table = read_points(&args.input)?;
    if table.dim() != model.n() && !table.points.is_empty() {
        return Err(CliError::format(
            &args.input,
            format!("points have dimension {} but the model has {}", table.dim(), model.n()),
        ));
    }
    let values = model.eval_many(&table.points);
    write_column(&args.out, "r", &values)?;
    Ok(values.len())
}

pub fn cmd_lcurve(args: &LcurveArgs) -> CliResult<LCurve> {
    let samples = load_samples(&args.input, args.domain.as_deref(), args.function.as_deref())?;
    let mut sorted = args.sigmas.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Usage("--sigmas must not repeat a value".into()));
    }
    if sorted.len() < 3 {
        return Err(CliError::Usage("--sigmas needs at least three values".into()));
    }
    let mode = match args.mode {
        LcurveMode::Relaxation => SweepMode::Relaxation { tau: args.tau },
        LcurveMode::Polefree => SweepMode::PoleFree(SipConfig {
            tau: args.tau,
            ..SipConfig::default()
        }),
    };
    let curve = lcurve(&samples, args.m, args.n, &args.sigmas, mode)?;
    let mut out = String::from("sigma,residual_norm,coefficient_norm,corner\n");
    for (i, p) in curve.points.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(p.sigma),
            fmt_f64(p.residual_norm),
            fmt_f64(p.coefficient_norm),
            u8::from(i == curve.corner)
        ));
    }
    std::fs::write(&args.out, out).map_err(|e| CliError::io(&args.out, e))?;
    Ok(curve)
}
