//! Run configuration: built-in defaults, then the optional TOML file, then flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use quenchcorr_core::{AxisSpec, Beta, Grid, ModelParams, ParamAxis, Time};
use serde::Deserialize;

use crate::output::Format;

/// A float that may also be written as `inf`.
pub fn parse_extended(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
        v => v.parse().map_err(|_| format!("'{s}' is not a number or 'inf'")),
    }
}

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    match s.trim() {
        "thermo" | "thermodynamic" => Ok(Grid::Thermodynamic),
        v => v.parse::<usize>().map(Grid::Modes).map_err(|_| format!("'{s}' is neither a mode count nor 'thermo'")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    C,
    D,
    I,
    DeltaC,
    DeltaD,
    Mz,
    Txx,
    Tyy,
    Tzz,
    Txy,
}

impl Observable {
    pub fn column(self) -> &'static str {
        match self {
            Observable::C => "concurrence",
            Observable::D => "discord",
            Observable::I => "mutual_info",
            Observable::DeltaC => "delta_c",
            Observable::DeltaD => "delta_d",
            Observable::Mz => "m_z",
            Observable::Txx => "t_xx",
            Observable::Tyy => "t_yy",
            Observable::Tzz => "t_zz",
            Observable::Txy => "t_xy",
        }
    }

    pub const CORRELATORS: [Observable; 5] =
        [Observable::Mz, Observable::Txx, Observable::Tyy, Observable::Tzz, Observable::Txy];
    pub const MEASURES: [Observable; 3] = [Observable::C, Observable::D, Observable::I];
}

impl FromStr for Observable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.trim() {
            "C" => Observable::C,
            "D" => Observable::D,
            "I" => Observable::I,
            "dC" => Observable::DeltaC,
            "dD" => Observable::DeltaD,
            "mz" => Observable::Mz,
            "txx" => Observable::Txx,
            "tyy" => Observable::Tyy,
            "tzz" => Observable::Tzz,
            "txy" => Observable::Txy,
            other => return Err(format!("unknown observable '{other}' (C, D, I, dC, dD, mz, txx, tyy, tzz, txy)")),
        })
    }
}

pub fn parse_observables(items: &[String]) -> Result<Vec<Observable>, String> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let o: Observable = item.parse()?;
        if !out.contains(&o) {
            out.push(o);
        }
    }
    if out.is_empty() {
        return Err("no observables requested".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumOrText {
    Int(i64),
    Num(f64),
    Text(String),
}

impl NumOrText {
    fn float(&self) -> Result<f64, String> {
        match self {
            NumOrText::Num(x) => Ok(*x),
            NumOrText::Int(i) => Ok(*i as f64),
            NumOrText::Text(s) => parse_extended(s),
        }
    }

    fn grid(&self) -> Result<Grid, String> {
        match self {
            NumOrText::Int(i) if *i >= 0 => Ok(Grid::Modes(*i as usize)),
            NumOrText::Text(s) => parse_grid(s),
            other => Err(format!("n_modes must be an integer or 'thermo', got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            OneOrMany::One(s) => vec![s],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file. Every key is optional; unknown keys are errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    j1: Option<f64>,
    j2: Option<f64>,
    gamma: Option<f64>,
    h: Option<f64>,
    beta: Option<NumOrText>,
    t: Option<NumOrText>,
    n_modes: Option<NumOrText>,
    axis: Option<OneOrMany>,
    observable: Option<OneOrMany>,
    out: Option<PathBuf>,
    format: Option<Format>,
    workers: Option<usize>,
    seed: Option<u64>,
    t_max: Option<f64>,
    points: Option<usize>,
    n: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Flags shared by every subcommand. `None` means "not given on the command line".
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// TOML file with default values for any flag
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub j1: Option<f64>,
    #[arg(long)]
    pub j2: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    /// Inverse temperature, or `inf` for the ground state
    #[arg(long, value_parser = parse_extended)]
    pub beta: Option<f64>,
    /// Time after the quench, or `inf` for the steady state
    #[arg(long, value_parser = parse_extended)]
    pub t: Option<f64>,
    /// Number of sites for a finite-chain mode sum, or `thermo`
    #[arg(long, value_parser = parse_grid)]
    pub n_modes: Option<Grid>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub workers: Option<usize>,
}

/// Everything a command needs after merging.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ModelParams,
    pub grid: Grid,
    pub axes: Vec<AxisSpec>,
    pub observables: Option<Vec<Observable>>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub sizes: Option<Vec<usize>>,
}

/// Command-specific flags that may also come from the file.
#[derive(Debug, Clone, Default)]
pub struct Extra {
    pub axis: Vec<String>,
    pub observable: Vec<String>,
    pub seed: Option<u64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub sizes: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn resolve(common: &CommonArgs, extra: Extra) -> Result<Self, String> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };

        let j1 = common.j1.or(file.j1);
        let j2 = common.j2.or(file.j2);
        let gamma = common.gamma.or(file.gamma).unwrap_or(0.5);
        let h = common.h.or(file.h).unwrap_or(1.0);
        let beta = match common.beta {
            Some(b) => b,
            None => file.beta.as_ref().map(NumOrText::float).transpose()?.unwrap_or(f64::INFINITY),
        };
        let t = match common.t {
            Some(t) => t,
            None => file.t.as_ref().map(NumOrText::float).transpose()?.unwrap_or(0.0),
        };
        let grid = match common.n_modes {
            Some(g) => g,
            None => file.n_modes.as_ref().map(NumOrText::grid).transpose()?.unwrap_or(Grid::Thermodynamic),
        };
        if let Grid::Modes(n) = grid {
            if n < 2 || n % 2 != 0 {
                return Err(format!("--n-modes {n} must be even and >= 2"));
            }
        }

        let axis_text =
            if extra.axis.is_empty() { file.axis.map(OneOrMany::into_vec).unwrap_or_default() } else { extra.axis };
        let axes: Vec<AxisSpec> =
            axis_text.iter().map(|s| s.parse::<AxisSpec>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
        if axes.iter().filter(|a| a.axis != ParamAxis::T).count() > 2 {
            return Err("at most two parameter axes (plus t) can be swept".into());
        }
        let swept = |axis: ParamAxis| axes.iter().any(|a| a.axis == axis);
        let j1 = match j1 {
            Some(v) => v,
            None if swept(ParamAxis::J1) => 0.0,
            None => return Err("--j1 is required".into()),
        };
        // Without --j2 the chain is not quenched.
        let j2 = j2.unwrap_or(j1);

        let params =
            ModelParams::new(j1, j2, gamma).with_h(h).with_beta(Beta::from_value(beta)).with_time(Time::from_value(t));

        let observable_text = if extra.observable.is_empty() {
            file.observable.map(OneOrMany::into_vec).unwrap_or_default()
        } else {
            extra.observable
        };
        let observables = if observable_text.is_empty() { None } else { Some(parse_observables(&observable_text)?) };

        if let Some(0) = common.workers.or(file.workers) {
            return Err("--workers must be >= 1".into());
        }

        Ok(RunConfig {
            params,
            grid,
            axes,
            observables,
            out: common.out.clone().or(file.out),
            format: common.format.or(file.format).unwrap_or(Format::Csv),
            workers: common.workers.or(file.workers),
            seed: extra.seed.or(file.seed),
            t_max: extra.t_max.or(file.t_max),
            points: extra.points.or(file.points),
            sizes: extra.sizes.or(file.n),
        })
    }
}
