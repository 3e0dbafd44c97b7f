use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use quenchcorr_core::oracle::{convergence_trends, default_spin_suite, random_mode_suite};
use quenchcorr_core::{
    concurrence, correlators, delta_qcorr, quantum_discord, two_site_state, validate, AxisSpec, Beta,
    Error as CoreError, Grid, ModelParams, OracleReport, ParamAxis, ParamGrid, Tolerances,
};
use rayon::prelude::*;

use crate::config::{Observable, RunConfig};
use crate::output::{reopen, Format, Sink, Value};
use crate::CliError;

/// Sweeps succeed overall when at least this fraction of points do.
const SUCCESS_FRACTION: f64 = 0.99;

const PARAM_COLUMNS: [&str; 6] = ["j1", "j2", "gamma", "h", "beta", "t"];

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(e.to_string()))
}

/// Requested observables at one point, in the order asked for.
pub fn evaluate(params: &ModelParams, grid: Grid, obs: &[Observable]) -> Result<Vec<f64>, CoreError> {
    let wants = |set: &[Observable]| obs.iter().any(|o| set.contains(o));
    let corr = if wants(&Observable::CORRELATORS) || wants(&Observable::MEASURES) {
        Some(correlators(params, grid)?)
    } else {
        None
    };
    let (mut c, mut d, mut i) = (f64::NAN, f64::NAN, f64::NAN);
    if let Some(corr) = &corr {
        if wants(&[Observable::D, Observable::I]) {
            let q = quantum_discord(&two_site_state(corr)?);
            (c, d, i) = (q.concurrence, q.discord, q.mutual_info);
        } else if wants(&[Observable::C]) {
            c = concurrence(&two_site_state(corr)?);
        }
    }
    let delta = if wants(&[Observable::DeltaC, Observable::DeltaD]) { Some(delta_qcorr(params, grid)?) } else { None };
    Ok(obs
        .iter()
        .map(|o| match o {
            Observable::C => c,
            Observable::D => d,
            Observable::I => i,
            Observable::DeltaC => delta.as_ref().map_or(f64::NAN, |x| x.delta_c),
            Observable::DeltaD => delta.as_ref().map_or(f64::NAN, |x| x.delta_d),
            Observable::Mz => corr.as_ref().map_or(f64::NAN, |x| x.m_z),
            Observable::Txx => corr.as_ref().map_or(f64::NAN, |x| x.t_xx),
            Observable::Tyy => corr.as_ref().map_or(f64::NAN, |x| x.t_yy),
            Observable::Tzz => corr.as_ref().map_or(f64::NAN, |x| x.t_zz),
            Observable::Txy => corr.as_ref().map_or(f64::NAN, |x| x.t_xy),
        })
        .collect())
}

fn columns(obs: &[Observable]) -> Vec<String> {
    std::iter::once("index")
        .chain(PARAM_COLUMNS)
        .chain(obs.iter().map(|o| o.column()))
        .chain(std::iter::once("error"))
        .map(String::from)
        .collect()
}

fn record(index: usize, params: &ModelParams, obs: &[Observable], result: &Result<Vec<f64>, String>) -> Vec<Value> {
    let mut row = vec![Value::Int(index as u64)];
    row.extend(
        [params.j1, params.j2, params.gamma, params.h, params.beta.value(), params.time.value()]
            .into_iter()
            .map(Value::Num),
    );
    match result {
        Ok(values) => {
            row.extend(values.iter().map(|&v| Value::Num(v)));
            row.push(Value::Null);
        }
        Err(e) => {
            row.extend(obs.iter().map(|_| Value::Null));
            row.push(Value::Text(e.clone()));
        }
    }
    row
}

/// Single point: invalid parameters are configuration errors, anything else numerical.
pub fn point(cfg: &RunConfig, obs: &[Observable]) -> Result<(), CliError> {
    cfg.params.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let values = pool(cfg.workers)?.install(|| evaluate(&cfg.params, cfg.grid, obs)).map_err(|e| match e {
        CoreError::InvalidParams(m) => CliError::Config(m),
        e => CliError::Numerical(e.to_string()),
    })?;
    let mut sink = open_sink(cfg.out.as_deref(), cfg.format, columns(obs))?;
    sink.row(&record(0, &cfg.params, obs, &Ok(values)))?;
    Ok(())
}

fn open_sink(out: Option<&Path>, format: Format, cols: Vec<String>) -> Result<Sink, CliError> {
    match out {
        Some(path) => Sink::create(path, format, cols).map_err(|e| CliError::Io(path.into(), e)),
        None => Ok(Sink::stdout(format, cols)?),
    }
}

/// Grid sweep, written in grid order in chunks so every finished row is on disk.
pub fn sweep(cfg: &RunConfig, obs: &[Observable], resume: bool) -> Result<(), CliError> {
    let grid = ParamGrid::new(cfg.params, cfg.axes.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    let points = grid.points();
    let cols = columns(obs);

    let (mut sink, start, mut failed) = match (&cfg.out, resume) {
        (Some(path), true) if path.exists() => {
            let (existing, file) = reopen(path, cfg.format, &cols).map_err(CliError::Config)?;
            if existing.rows > points.len() {
                return Err(CliError::Config(format!("{} has more rows than the grid", path.display())));
            }
            let sink = Sink::new(cfg.format, cols, Box::new(BufWriter::new(file)), existing.empty)?;
            (sink, existing.rows, existing.failed)
        }
        (None, true) => return Err(CliError::Config("--resume needs --out".into())),
        (out, _) => (open_sink(out.as_deref(), cfg.format, cols)?, 0, 0),
    };

    let pool = pool(cfg.workers)?;
    let chunk = pool.current_num_threads().max(1) * 4;
    let mut index = start;
    while index < points.len() {
        let end = (index + chunk).min(points.len());
        let results: Vec<Result<Vec<f64>, String>> = pool.install(|| {
            points[index..end].par_iter().map(|(_, p)| evaluate(p, cfg.grid, obs).map_err(|e| e.to_string())).collect()
        });
        for (k, result) in results.iter().enumerate() {
            failed += result.is_err() as usize;
            sink.row(&record(index + k, &points[index + k].1, obs, result))?;
        }
        index = end;
    }

    let total = points.len();
    if total > 0 && ((total - failed) as f64) < SUCCESS_FRACTION * total as f64 {
        return Err(CliError::Numerical(format!("{failed} of {total} points failed")));
    }
    if failed > 0 {
        eprintln!("warning: {failed} of {total} points failed; see the error column");
    }
    Ok(())
}

/// One output file of a figure: two swept axes, fixed parameters, one observable.
struct Panel {
    file: String,
    observable: Observable,
}

struct FigureSpec {
    base: ModelParams,
    axes: Vec<AxisSpec>,
    panels: Vec<Panel>,
}

pub const FIGURES: [&str; 5] = ["fig2", "fig3", "fig4", "fig5", "fig6"];
const THERMAL_PANELS: [(char, f64); 4] = [('a', f64::INFINITY), ('b', 3.0), ('c', 2.0), ('d', 0.8)];

fn figure_specs(name: &str, points: usize, t_max: f64) -> Result<Vec<FigureSpec>, String> {
    let j_axis = |axis| AxisSpec::new(axis, 0.0, 3.0, points).map_err(|e| e.to_string());
    let base = ModelParams::new(0.0, 0.0, 0.5).with_h(1.0);
    let panel = |file: String, observable| Panel { file, observable };
    Ok(match name {
        "fig2" | "fig3" => {
            let j2 = if name == "fig2" { 0.5 } else { 2.0 };
            vec![FigureSpec {
                base: ModelParams { j2, ..base },
                axes: vec![
                    j_axis(ParamAxis::J1)?,
                    AxisSpec::new(ParamAxis::T, 0.0, t_max, points).map_err(|e| e.to_string())?,
                ],
                panels: vec![
                    panel(format!("{name}_concurrence.csv"), Observable::C),
                    panel(format!("{name}_discord.csv"), Observable::D),
                ],
            }]
        }
        "fig4" => vec![FigureSpec {
            base: base.steady(),
            axes: vec![j_axis(ParamAxis::J1)?, j_axis(ParamAxis::J2)?],
            panels: vec![
                panel("fig4a_delta_c.csv".into(), Observable::DeltaC),
                panel("fig4b_delta_d.csv".into(), Observable::DeltaD),
            ],
        }],
        "fig5" | "fig6" => {
            let (observable, column) =
                if name == "fig5" { (Observable::C, "concurrence") } else { (Observable::D, "discord") };
            THERMAL_PANELS
                .iter()
                .map(|&(tag, beta)| {
                    Ok(FigureSpec {
                        base: base.steady().with_beta(Beta::from_value(beta)),
                        axes: vec![j_axis(ParamAxis::J1)?, j_axis(ParamAxis::J2)?],
                        panels: vec![panel(
                            format!("{name}{tag}_{column}_beta_{}.csv", crate::output::fmt_num(beta)),
                            observable,
                        )],
                    })
                })
                .collect::<Result<_, String>>()?
        }
        other => return Err(format!("unknown figure '{other}' (expected one of {})", FIGURES.join(", "))),
    })
}

pub fn figure(cfg: &RunConfig, name: &str) -> Result<Vec<PathBuf>, CliError> {
    let points = cfg.points.unwrap_or(61);
    let t_max = cfg.t_max.unwrap_or(15.0);
    if points < 2 {
        return Err(CliError::Config("--points must be >= 2".into()));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Config("--t-max must be positive".into()));
    }
    let specs = figure_specs(name, points, t_max).map_err(CliError::Config)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(dir.clone(), e))?;
    let pool = pool(cfg.workers)?;

    let mut written = Vec::new();
    let (mut total, mut failed) = (0, 0);
    for spec in specs {
        let grid = ParamGrid::new(spec.base, spec.axes.clone()).map_err(|e| CliError::Config(e.to_string()))?;
        let obs: Vec<Observable> = spec.panels.iter().map(|p| p.observable).collect();
        let rows = pool.install(|| quenchcorr_core::sweep(&grid, |p| evaluate(p, cfg.grid, &obs)));
        total += rows.len();
        failed += rows.iter().filter(|r| r.result.is_err()).count();
        for (k, panel) in spec.panels.iter().enumerate() {
            let path = dir.join(&panel.file);
            let cols = spec
                .axes
                .iter()
                .map(|a| a.axis.name().to_string())
                .chain(std::iter::once(panel.observable.column().to_string()))
                .collect();
            let mut sink = Sink::create(&path, Format::Csv, cols).map_err(|e| CliError::Io(path.clone(), e))?;
            for row in &rows {
                let mut values: Vec<Value> = row.coords.iter().map(|&x| Value::Num(x)).collect();
                values.push(Value::Num(row.result.as_ref().map_or(f64::NAN, |v| v[k])));
                sink.row(&values)?;
            }
            written.push(path);
        }
    }
    if ((total - failed) as f64) < SUCCESS_FRACTION * total as f64 {
        return Err(CliError::Numerical(format!("{failed} of {total} points failed")));
    }
    Ok(written)
}

fn report_row(r: &OracleReport) -> Vec<Value> {
    let num_or_null = |x: Option<f64>| x.map_or(Value::Null, Value::Num);
    vec![
        Value::Text(if r.n.is_some() { "spin" } else { "mode" }.into()),
        Value::Text(r.channel.name().into()),
        Value::Num(r.params.j1),
        Value::Num(r.params.j2),
        Value::Num(r.params.gamma),
        Value::Num(r.params.h),
        Value::Num(r.params.beta.value()),
        Value::Num(r.params.time.value()),
        num_or_null(r.phi),
        r.n.map_or(Value::Null, |n| Value::Int(n as u64)),
        Value::Num(r.analytic),
        Value::Num(r.oracle),
        Value::Num(r.abs_err),
        Value::Num(r.tolerance),
        Value::Bool(r.pass),
        r.error.clone().map_or(Value::Null, Value::Text),
    ]
}

const REPORT_COLUMNS: [&str; 16] = [
    "check",
    "channel",
    "j1",
    "j2",
    "gamma",
    "h",
    "beta",
    "t",
    "phi",
    "n",
    "analytic",
    "oracle",
    "abs_err",
    "tolerance",
    "pass",
    "error",
];

/// Share of per-channel finite-size trends that must decrease monotonically.
const MONOTONE_FRACTION: f64 = 0.9;

pub fn oracle(cfg: &RunConfig) -> Result<(), CliError> {
    let seed = cfg.seed.unwrap_or(8);
    let count = cfg.points.unwrap_or(20);
    let mut checks = random_mode_suite(seed, count);
    let sizes = cfg.sizes.clone().unwrap_or_default();
    if !sizes.is_empty() {
        checks.extend(default_spin_suite(&sizes));
    }
    let reports = pool(cfg.workers)?.install(|| validate(&checks, &Tolerances::default()));

    let mut sink = open_sink(cfg.out.as_deref(), cfg.format, REPORT_COLUMNS.iter().map(|s| s.to_string()).collect())?;
    for r in &reports {
        sink.row(&report_row(r))?;
    }

    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} comparisons, {failed} outside tolerance", reports.len());
    // Smaller chains only feed the trend; the spin tolerance is a bound on the largest one.
    let largest = sizes.iter().copied().max();
    let decisive = reports.iter().filter(|r| !r.pass && (r.n.is_none() || r.n == largest)).count();
    let mut problems = Vec::new();
    if decisive > 0 {
        problems.push(format!("{decisive} mode-level or largest-chain comparisons outside tolerance"));
    }
    if sizes.len() > 1 {
        let trends = convergence_trends(&reports);
        let monotone = trends.iter().filter(|t| t.monotone).count();
        eprintln!("{monotone} of {} finite-size trends decrease monotonically over N={sizes:?}", trends.len());
        for t in trends.iter().filter(|t| !t.monotone) {
            eprintln!("  not monotone: {} at {:?}: {:?}", t.channel, t.params, t.abs_errs);
        }
        if (monotone as f64) < MONOTONE_FRACTION * trends.len() as f64 {
            problems.push(format!("only {monotone} of {} trends monotone", trends.len()));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(CliError::Oracle(problems.join("; ")))
    }
}
