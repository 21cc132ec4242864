use std::fmt::Write as _;
use std::path::PathBuf;

use apfourier::conditions::{
    check_interpolation_pair, condition_report, dilated_condition_report, ConditionReport,
};
use apfourier::correlation::{quadruple_sum_fast, quadruple_sum_naive, sidon_check, tau_fourier_numeric};
use apfourier::evaluator::{
    dilated_eval, dirichlet_partial_sum, maximal_field, partial_sum, DilatedMaximalSignal, FnSignal, MaximalSignal,
};
use apfourier::experiments::{
    halasz_experiment, maximal_constant_estimate, prop27_experiment, GeneratorConfig, Inequality, Prop27Params,
};
use apfourier::format::{format_series, load_dilated, load_series_for};
use apfourier::norms::{
    besicovitch_seminorm, bessel_check, coefficient_cross_bound, default_horizons, fourier_coefficient,
    stepanov_norm, StepanovParams, BESSEL_TOL,
};
use apfourier::reduction::reduce_to_dirichlet;
use apfourier::{APSeries, DilatedSeries, Rule, SampleGrid, Usage};
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::config::{parse_list, Failure, Outcome, Resolver};
use crate::output::Report;

pub struct Globals {
    pub seed: u64,
}

enum Input {
    Plain(APSeries),
    Dilated(DilatedSeries),
}

struct InputSource {
    path: PathBuf,
    section: Option<String>,
    dilated: bool,
}

fn resolve_input(r: &Resolver, a: &SeriesArgs) -> Outcome<InputSource> {
    Ok(InputSource {
        path: r.required(a.series.clone(), "series")?,
        section: r.optional(a.section.clone(), "section")?,
        dilated: r.flag(a.dilated, "dilated")?,
    })
}

fn load(source: &InputSource) -> Outcome<Input> {
    if source.dilated {
        Ok(Input::Dilated(load_dilated(&source.path)?))
    } else {
        Ok(Input::Plain(load_series_for(&source.path, source.section.as_deref(), Usage::Plain)?))
    }
}

fn resolve_stepanov(r: &Resolver, a: &StepanovArgs, defaults: StepanovParams) -> Outcome<StepanovParams> {
    let rule_text = r.optional(a.rule.clone(), "rule")?;
    let rule = match rule_text {
        None => defaults.rule,
        Some(t) => Rule::parse(&t).ok_or_else(|| Failure::Usage(format!("--rule: unknown rule '{t}'")))?,
    };
    Ok(StepanovParams {
        x_min: r.value(a.x_min, "x-min", defaults.x_min)?,
        x_max: r.value(a.x_max, "x-max", defaults.x_max)?,
        x_step: r.value(a.x_step, "x-step", defaults.x_step)?,
        t_step: r.value(a.t_step, "t-step", defaults.t_step)?,
        rule,
    })
}

fn resolve_grid(r: &Resolver, a: &GridArgs, t0: f64, t1: f64, step: f64) -> Outcome<(f64, f64, f64)> {
    Ok((
        r.value(a.t0, "t0", t0)?,
        r.value(a.t1, "t1", t1)?,
        r.value(a.step, "step", step)?,
    ))
}

fn needs_plain(input: Input, what: &str) -> Outcome<APSeries> {
    match input {
        Input::Plain(s) => Ok(s),
        Input::Dilated(_) => Err(Failure::Usage(format!("{what} needs a plain series, not --dilated"))),
    }
}

pub fn run(command: &Command, r: &Resolver, g: &Globals) -> Outcome<Report> {
    match command {
        Command::Norm(a) => norm(a, r),
        Command::Eval(a) => eval(a, r),
        Command::Maximal(a) => maximal(a, r),
        Command::Check(a) => check(a, r),
        Command::Reduce(a) => reduce(a, r),
        Command::Quad(a) => quad(a, r),
        Command::Sidon(a) => sidon(a, r),
        Command::Tau(a) => tau(a, r),
        Command::Experiment(a) => match &a.which {
            Experiment::Halasz(a) => halasz(a, r, g),
            Experiment::Prop27(a) => prop27(a, r, g),
            Experiment::Constants(a) => constants(a, r, g),
        },
    }
}

fn norm(a: &NormArgs, r: &Resolver) -> Outcome<Report> {
    let source = resolve_input(r, &a.input)?;
    let params = resolve_stepanov(r, &a.stepanov, StepanovParams::default())?;
    let measure = r.value(a.measure.map(|m| format!("{m:?}").to_lowercase()), "measure", "stepanov".into())?;
    let maximal = r.flag(a.maximal, "maximal")?;
    let n_max = r.optional(a.n_max, "n-max")?;
    let inner_trunc = r.optional(a.inner_trunc, "inner-trunc")?;
    let horizons = match r.optional(a.horizons.clone(), "horizons")? {
        Some(text) => parse_list::<f64>(&text, "horizons")?,
        None => default_horizons(),
    };
    let lambda = r.optional(a.lambda, "lambda")?;
    let t_horizon = r.value(a.t_horizon, "t-horizon", 1e4)?;
    let tol = r.value(a.tol, "tol", BESSEL_TOL)?;
    r.finish()?;
    let input = load(&source)?;

    match measure.as_str() {
        "stepanov" => {
            let estimate = match &input {
                Input::Plain(s) => {
                    let n = n_max.unwrap_or(s.len());
                    if maximal {
                        stepanov_norm(&MaximalSignal::new(s, n)?, &params)?
                    } else {
                        stepanov_norm(&s.truncated(n)?, &params)?
                    }
                }
                Input::Dilated(ds) => {
                    let n = n_max.unwrap_or(ds.outer_len());
                    let j = inner_trunc.unwrap_or(ds.inner().len());
                    if maximal {
                        stepanov_norm(&DilatedMaximalSignal::new(ds, n, j)?, &params)?
                    } else {
                        dilated_eval(ds, n, 0.0, j)?;
                        let f = FnSignal(|t: f64| dilated_eval(ds, n, t, j).map(|v| v.value).unwrap_or_default());
                        stepanov_norm(&f, &params)?
                    }
                }
            };
            Ok(Report::new(&estimate))
        }
        "besicovitch" => {
            let s = needs_plain(input, "besicovitch")?;
            let est = besicovitch_seminorm(&s, &horizons, params.t_step, params.rule)?;
            let mut csv = String::from("T,value\n");
            for (t, v) in &est.trace {
                let _ = writeln!(csv, "{t},{v}");
            }
            Ok(Report::new(&est).with_csv(csv))
        }
        "coefficient" => {
            let s = needs_plain(input, "coefficient")?;
            let lambda = lambda.ok_or_else(|| Failure::Usage("missing required --lambda".into()))?;
            let c = fourier_coefficient(&s, lambda, t_horizon)?;
            Ok(Report::new(&json!({
                "lambda": lambda,
                "t_horizon": t_horizon,
                "re": c.re,
                "im": c.im,
                "abs": c.norm(),
                "cross_bound": coefficient_cross_bound(&s, lambda, t_horizon),
            })))
        }
        "bessel" => {
            let s = needs_plain(input, "bessel")?;
            Ok(Report::new(&bessel_check(&s, t_horizon, &params, tol)?))
        }
        other => Err(Failure::Usage(format!("unknown measure '{other}'"))),
    }
}

#[derive(Serialize)]
struct Point {
    t: f64,
    re: f64,
    im: f64,
    abs: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tail_bound: Option<f64>,
}

fn eval(a: &EvalArgs, r: &Resolver) -> Outcome<Report> {
    let source = resolve_input(r, &a.input)?;
    let single = r.optional(a.t, "t")?;
    let (t0, t1, step) = resolve_grid(r, &a.grid, 0.0, 10.0, 0.01)?;
    let n = r.optional(a.n, "n")?;
    let dirichlet = r.flag(a.dirichlet, "dirichlet")?;
    let inner_trunc = r.optional(a.inner_trunc, "inner-trunc")?;
    r.finish()?;
    let input = load(&source)?;
    let grid = match single {
        Some(t) => SampleGrid::point(t),
        None => SampleGrid::new(t0, t1, step)?,
    };
    let mut points = Vec::with_capacity(grid.count);
    let used_n;
    match &input {
        Input::Plain(s) => {
            used_n = n.unwrap_or(s.len());
            for t in grid.points() {
                let v = if dirichlet {
                    dirichlet_partial_sum(s.coeff(), used_n, t)?
                } else {
                    partial_sum(s, used_n, t)?
                };
                points.push(Point { t, re: v.re, im: v.im, abs: v.norm(), tail_bound: None });
            }
        }
        Input::Dilated(ds) => {
            used_n = n.unwrap_or(ds.outer_len());
            let j = inner_trunc.unwrap_or(ds.inner().len());
            for t in grid.points() {
                let v = dilated_eval(ds, used_n, t, j)?;
                points.push(Point {
                    t,
                    re: v.value.re,
                    im: v.value.im,
                    abs: v.value.norm(),
                    tail_bound: Some(v.tail_bound),
                });
            }
        }
    }
    let mut csv = String::from("t,re,im,abs\n");
    for p in &points {
        let _ = writeln!(csv, "{},{},{},{}", p.t, p.re, p.im, p.abs);
    }
    Ok(Report::new(&json!({ "n": used_n, "points": points })).with_csv(csv))
}

fn maximal(a: &MaximalArgs, r: &Resolver) -> Outcome<Report> {
    let source = resolve_input(r, &a.input)?;
    let (t0, t1, step) = resolve_grid(r, &a.grid, 0.0, 10.0, 0.01)?;
    let n_max = r.optional(a.n_max, "n-max")?;
    r.finish()?;
    let s = needs_plain(load(&source)?, "maximal")?;
    let grid = SampleGrid::new(t0, t1, step)?;
    let field = maximal_field(&s, &grid, n_max.unwrap_or(s.len()))?;
    let mut csv = Vec::new();
    field.write_csv(&mut csv).expect("in-memory write");
    let mut json = serde_json::to_value(&field).expect("serialize");
    json["sup"] = json!(field.sup());
    Ok(Report {
        json,
        csv: Some(String::from_utf8(csv).expect("utf8")),
        text: None,
    })
}

fn check(a: &CheckArgs, r: &Resolver) -> Outcome<Report> {
    let p = r.value(a.p, "p", 4.0 / 3.0)?;
    let q = r.value(a.q, "q", 4.0 / 3.0)?;
    let tol = r.value(a.tol, "tol", 1e-6)?;
    let series_given = a.input.series.is_some() || r.optional::<PathBuf>(None, "series")?.is_some();
    let source = if a.which == Condition::Interp && !series_given {
        None
    } else {
        Some(resolve_input(r, &a.input)?)
    };
    r.finish()?;
    if !(tol >= 0.0) {
        return Err(Failure::Usage(format!("--tol must be >= 0, got {tol}")));
    }
    let valid = check_interpolation_pair(p, q, tol);
    let Some(source) = source else {
        return Ok(Report::new(&json!({ "p": p, "q": q, "tol": tol, "interp_valid": valid })));
    };
    let report: ConditionReport = match load(&source)? {
        Input::Plain(s) => condition_report(&s, p, q)?,
        Input::Dilated(ds) => dilated_condition_report(&ds, p, q)?,
    };
    let valid = check_interpolation_pair(p, q, tol);
    let out = match a.which {
        Condition::All => {
            let mut v = serde_json::to_value(&report).expect("serialize");
            v["interp_valid"] = json!(valid);
            v["tol"] = json!(tol);
            v
        }
        Condition::Wiener => json!({
            "wiener_p2": report.wiener_p2,
            "wiener_p": report.wiener_p,
            "p": p,
            "trend": { "wiener_p2": report.trend["wiener_p2"], "wiener_p": report.trend["wiener_p"] },
            "block_convention": report.block_convention,
        }),
        Condition::Hs => json!({ "hs": report.hs, "trend": { "hs": report.trend["hs"] } }),
        Condition::Interp => {
            let mut v = json!({ "p": p, "q": q, "tol": tol, "interp_valid": valid, "wiener_p": report.wiener_p });
            if let Some(d) = &report.dilated {
                v["inner_wiener_q"] = json!(d.inner_wiener_q);
                v["rhs_interp"] = json!(d.rhs_interp);
            }
            v
        }
    };
    Ok(Report {
        json: out,
        csv: None,
        text: None,
    })
}

fn reduce(a: &ReduceArgs, r: &Resolver) -> Outcome<Report> {
    let source = resolve_input(r, &a.input)?;
    r.finish()?;
    let s = needs_plain(load(&source)?, "reduce")?;
    let reduced = reduce_to_dirichlet(&s)?;
    let list = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
    let comments = vec![
        "reduced series: lambda = log2 v, coefficient b_v".to_string(),
        format!("v = {}", list(&reduced.v)),
        format!("u per original index = {}", list(&reduced.mapping)),
    ];
    let text = format_series(&reduced.to_series()?, &comments);
    let mut csv = String::from("v,lambda,re,im\n");
    for (v, b) in reduced.v.iter().zip(&reduced.b) {
        let _ = writeln!(csv, "{},{},{},{}", v, (*v as f64).log2(), b.re, b.im);
    }
    Ok(Report::new(&reduced).with_csv(csv).with_text(text))
}

fn load_freq(a: &FreqArgs, r: &Resolver) -> Outcome<(PathBuf, Option<String>)> {
    Ok((r.required(a.freq.clone(), "freq")?, r.optional(a.section.clone(), "section")?))
}

fn quad(a: &QuadArgs, r: &Resolver) -> Outcome<Report> {
    let (path, section) = load_freq(&a.input, r)?;
    let method = r.value(a.method.map(|m| format!("{m:?}").to_lowercase()), "method", "fast".into())?;
    r.finish()?;
    let s = load_series_for(&path, section.as_deref(), Usage::Plain)?;
    let m = match method.as_str() {
        "fast" => quadruple_sum_fast(s.freq())?,
        "naive" => quadruple_sum_naive(s.freq())?,
        other => return Err(Failure::Usage(format!("unknown method '{other}'"))),
    };
    Ok(Report::new(&json!({ "method": method, "n": s.len(), "M": m })))
}

fn sidon(a: &FreqArgs, r: &Resolver) -> Outcome<Report> {
    let (path, section) = load_freq(a, r)?;
    r.finish()?;
    let s = load_series_for(&path, section.as_deref(), Usage::Plain)?;
    Ok(Report::new(&sidon_check(s.freq())?))
}

fn tau(a: &TauArgs, r: &Resolver) -> Outcome<Report> {
    let x = r.required(a.x, "x")?;
    let horizon = r.value(a.horizon, "horizon", 1e4)?;
    let step = r.value(a.step, "step", 0.01)?;
    r.finish()?;
    Ok(Report::new(&tau_fourier_numeric(x, horizon, step)?))
}

fn halasz(a: &HalaszArgs, r: &Resolver, g: &Globals) -> Outcome<Report> {
    let n_list = match r.optional(a.n.clone(), "n")? {
        Some(text) => parse_list::<usize>(&text, "n")?,
        None => vec![64, 256, 1024],
    };
    let trials = r.value(a.trials, "trials", 64)?;
    let t0 = r.value(a.t0, "t0", 0.0)?;
    let t1 = r.value(a.t1, "t1", 200.0)?;
    let step = r.value(a.step, "step", 0.005)?;
    r.finish()?;
    let grid = SampleGrid::new(t0, t1, step)?;
    let report = halasz_experiment(&n_list, trials, &grid, g.seed)?;
    let mut csv = String::from("n,trial,max_abs\n");
    for (n, column) in report.n_values.iter().zip(&report.per_trial) {
        for (trial, m) in column.iter().enumerate() {
            let _ = writeln!(csv, "{n},{trial},{m}");
        }
    }
    Ok(Report::new(&report).with_csv(csv))
}

fn prop27(a: &Prop27Args, r: &Resolver, g: &Globals) -> Outcome<Report> {
    let defaults = Prop27Params::default();
    let n_max = r.value(a.n_max, "n-max", 1 << 16)?;
    let max_block = r.value(a.max_block, "max-block", defaults.max_block)?;
    let stepanov = resolve_stepanov(r, &a.stepanov, defaults.stepanov)?;
    r.finish()?;
    let report = prop27_experiment(n_max, g.seed, &Prop27Params { max_block, stepanov })?;
    let mut csv = String::from("block,b2,cumulative\n");
    for (n, (b, c)) in report.wiener_blocks.iter().zip(&report.wiener_cumulative).enumerate() {
        let _ = writeln!(csv, "{n},{b},{c}");
    }
    Ok(Report::new(&report).with_csv(csv))
}

fn constants(a: &ConstantsArgs, r: &Resolver, g: &Globals) -> Outcome<Report> {
    let kind = r.value(
        a.inequality.map(|i| format!("{i:?}").to_lowercase()),
        "inequality",
        "gen".to_string(),
    )?;
    let p = r.value(a.p, "p", 4.0 / 3.0)?;
    let q = r.value(a.q, "q", 4.0 / 3.0)?;
    let ineq = match kind.as_str() {
        "gen" => Inequality::Gen,
        "dilated" => Inequality::Dilated,
        "interp" => Inequality::Interp { p, q },
        other => return Err(Failure::Usage(format!("unknown inequality '{other}'"))),
    };
    let mut gen = GeneratorConfig::for_inequality(ineq);
    let trials = r.value(a.trials, "trials", 50)?;
    gen.n = r.value(a.n, "n", gen.n)?;
    gen.inner_n = r.value(a.inner_n, "inner-n", gen.inner_n)?;
    gen.stepanov = resolve_stepanov(r, &a.stepanov, gen.stepanov)?;
    r.finish()?;
    let report = maximal_constant_estimate(&gen, ineq, trials, g.seed)?;
    let mut csv = String::from("trial,lhs,rhs,ratio\n");
    for t in &report.trials {
        let _ = writeln!(csv, "{},{},{},{}", t.trial, t.lhs, t.rhs, t.ratio);
    }
    Ok(Report::new(&report).with_csv(csv))
}
