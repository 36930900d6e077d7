//! The `bench` command: a grid of (function, method, noise level, seed)
//! cells, each fitted on its own decoupled design and scored on a fresh
//! test set.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use ratfit::domain::SampleSet;
use ratfit::metrics::{Evaluated, PoleMetrics, TestSet};
use ratfit::sampling::{add_noise, dlhd};
use ratfit::sipfit::SipConfig;
use ratfit::testfns::TestFunction;

use crate::app::{BenchArgs, Method};
use crate::commands::{run_fit, FitOptions};
use crate::csvio::fmt_f64;
use crate::error::{CliError, CliResult};

/// Offset keeping test points independent of the training design.
const TEST_SEED_OFFSET: u64 = 1_000_003;

#[derive(Clone, Debug, PartialEq)]
pub struct CellResult {
    pub degrees: (usize, usize),
    pub delta_r: f64,
    /// One entry per threshold, in the order given.
    pub poles: Vec<PoleMetrics>,
    pub fit_seconds: f64,
    pub sip_iterations: Option<usize>,
    pub converged: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub function: String,
    pub method: Method,
    pub epsilon: f64,
    pub seed: u64,
    pub result: Result<CellResult, String>,
}

fn validate(args: &BenchArgs) -> CliResult<Vec<&'static TestFunction>> {
    let functions = args
        .functions
        .iter()
        .map(|id| TestFunction::by_id(id))
        .collect::<ratfit::Result<Vec<_>>>()?;
    if args.methods.is_empty() || args.epsilons.is_empty() || args.seeds.is_empty() || args.thresholds.is_empty() {
        return Err(CliError::Usage("every bench list needs at least one entry".into()));
    }
    if let Some(t) = args.thresholds.iter().find(|t| !(**t > 1.0)) {
        return Err(CliError::Usage(format!("threshold {t} must exceed 1")));
    }
    if let Some(e) = args.epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(CliError::Usage(format!("noise level {e} must be finite and non-negative")));
    }
    Ok(functions)
}

fn run_cell(
    f: &TestFunction,
    tests: &TestSet,
    method: Method,
    epsilon: f64,
    seed: u64,
    args: &BenchArgs,
) -> Result<CellResult, String> {
    let domain = f.domain();
    let (points, _) = dlhd(&domain, args.m, args.n, seed).map_err(|e| e.to_string())?;
    let values: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
    let values = add_noise(&values, epsilon, seed);
    let samples = SampleSet::new(domain, points, values).map_err(|e| e.to_string())?;
    let opts = FitOptions {
        eta: None,
        epsilon,
        sip: SipConfig {
            tau: args.tau,
            sigma: args.sigma,
            seed,
            ..SipConfig::default()
        },
    };
    let start = Instant::now();
    let (model, report) = run_fit(&samples, method, args.m, args.n, &opts).map_err(|e| e.to_string())?;
    let fit_seconds = start.elapsed().as_secs_f64();
    let evaluated = Evaluated::new(&model, tests);
    let poles = args
        .thresholds
        .iter()
        .map(|&t| evaluated.pole_metrics(t))
        .collect::<ratfit::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    Ok(CellResult {
        degrees: (model.numerator_degree(), model.denominator_degree()),
        delta_r: poles[0].delta_r,
        poles,
        fit_seconds,
        sip_iterations: report.sip_iterations,
        converged: report.converged,
    })
}

/// Runs the grid; rows come back sorted by function order, method order,
/// noise level and seed.
pub fn run_bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let functions = validate(args)?;
    let mut test_sets = BTreeMap::new();
    let keys: Vec<(usize, u64)> = (0..functions.len())
        .flat_map(|i| args.seeds.iter().map(move |&s| (i, s)))
        .collect();
    let generated: Vec<TestSet> = keys
        .par_iter()
        .map(|&(i, seed)| {
            let f = functions[i];
            TestSet::generate(
                &f.domain(),
                |x| f.eval(x),
                args.face_points,
                args.interior_points,
                seed.wrapping_add(TEST_SEED_OFFSET),
            )
        })
        .collect();
    for (key, tests) in keys.into_iter().zip(generated) {
        test_sets.insert(key, tests);
    }

    let mut cells = Vec::new();
    for fi in 0..functions.len() {
        for &method in &args.methods {
            for &epsilon in &args.epsilons {
                for &seed in &args.seeds {
                    cells.push((fi, method, epsilon, seed));
                }
            }
        }
    }
    let mut rows: Vec<(usize, BenchRow)> = cells
        .par_iter()
        .map(|&(fi, method, epsilon, seed)| {
            let f = functions[fi];
            let result = run_cell(f, &test_sets[&(fi, seed)], method, epsilon, seed, args);
            (
                fi,
                BenchRow {
                    function: f.id.to_string(),
                    method,
                    epsilon,
                    seed,
                    result,
                },
            )
        })
        .collect();
    let method_rank = |m: Method| args.methods.iter().position(|x| *x == m).unwrap_or(usize::MAX);
    rows.sort_by(|(fa, a), (fb, b)| {
        fa.cmp(fb)
            .then(method_rank(a.method).cmp(&method_rank(b.method)))
            .then(a.epsilon.total_cmp(&b.epsilon))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub fn header(thresholds: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = ["function", "method", "epsilon", "seed", "M", "N", "delta_r"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for t in thresholds {
        for name in ["count_face", "count_in", "e_pole", "e_nonpole"] {
            h.push(format!("{name}_t{t}"));
        }
    }
    for name in ["fit_seconds", "sip_iterations", "converged", "error"] {
        h.push(name.to_string());
    }
    h
}

fn numeric_fields(r: &CellResult) -> Vec<f64> {
    let mut v = vec![r.delta_r];
    for p in &r.poles {
        v.extend([p.count_face as f64, p.count_in as f64, p.e_pole, p.e_nonpole]);
    }
    v.push(r.fit_seconds);
    v.push(r.sip_iterations.map_or(f64::NAN, |s| s as f64));
    v
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}

/// Sample standard deviation; zero for a single value.
fn sd(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

/// Per-cell aggregates over seeds, keyed like the rows.
pub struct Aggregate {
    pub function: String,
    pub method: Method,
    pub epsilon: f64,
    pub ok: usize,
    pub mean: Vec<f64>,
    pub median: Vec<f64>,
    pub sd: Vec<f64>,
}

pub fn aggregate(rows: &[BenchRow]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let mut j = i;
        while j < rows.len()
            && rows[j].function == rows[i].function
            && rows[j].method == rows[i].method
            && rows[j].epsilon == rows[i].epsilon
        {
            j += 1;
        }
        let fields: Vec<Vec<f64>> = rows[i..j]
            .iter()
            .filter_map(|r| r.result.as_ref().ok().map(numeric_fields))
            .collect();
        let width = fields.first().map_or(0, Vec::len);
        let column = |c: usize| fields.iter().map(|f| f[c]).collect::<Vec<_>>();
        let stat = |g: fn(&[f64]) -> f64| (0..width).map(|c| g(&column(c))).collect::<Vec<_>>();
        out.push(Aggregate {
            function: rows[i].function.clone(),
            method: rows[i].method,
            epsilon: rows[i].epsilon,
            ok: fields.len(),
            mean: stat(mean),
            median: stat(median),
            sd: stat(sd),
        });
        i = j;
    }
    out
}

fn fmt_opt(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        fmt_f64(v)
    }
}

/// Seed rows first, then three aggregate rows per cell whose `seed` column
/// reads `mean`, `median` or `sd`.
pub fn write_report(path: &str, thresholds: &[f64], rows: &[BenchRow]) -> CliResult<()> {
    let header = header(thresholds);
    let width = header.len();
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    w.write_record(&header).map_err(|e| CliError::io(path, e))?;
    for row in rows {
        let mut rec = vec![
            row.function.clone(),
            row.method.name().to_string(),
            fmt_f64(row.epsilon),
            row.seed.to_string(),
        ];
        match &row.result {
            Ok(r) => {
                rec.push(r.degrees.0.to_string());
                rec.push(r.degrees.1.to_string());
                let nums = numeric_fields(r);
                let last = nums.len() - 1;
                let counts = |k: usize| k == last || (k > 0 && (k - 1) % 4 < 2 && k <= 4 * r.poles.len());
                for (k, v) in nums.iter().enumerate() {
                    rec.push(if counts(k) && v.is_finite() { (*v as usize).to_string() } else { fmt_opt(*v) });
                }
                rec.push(r.converged.map_or(String::new(), |c| c.to_string()));
                rec.push(String::new());
            }
            Err(e) => {
                rec.resize(width - 1, String::new());
                rec.push(e.clone());
            }
        }
        w.write_record(&rec).map_err(|e| CliError::io(path, e))?;
    }
    for agg in aggregate(rows) {
        for (label, values) in [("mean", &agg.mean), ("median", &agg.median), ("sd", &agg.sd)] {
            let mut rec = vec![
                agg.function.clone(),
                agg.method.name().to_string(),
                fmt_f64(agg.epsilon),
                label.to_string(),
                String::new(),
                String::new(),
            ];
            rec.extend(values.iter().map(|v| fmt_opt(*v)));
            rec.resize(width - 2, String::new());
            rec.push(String::new());
            rec.push(format!("ok={}", agg.ok));
            w.write_record(&rec).map_err(|e| CliError::io(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn cmd_bench(args: &BenchArgs) -> CliResult<Vec<BenchRow>> {
    let rows = run_bench(args)?;
    write_report(&args.out, &args.thresholds, &rows)?;
    Ok(rows)
}
