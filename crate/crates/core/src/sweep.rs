//! Rectangular parameter grids evaluated in parallel.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{correlators, CorrelatorSet, Grid};
use crate::error::{Error, Result};
use crate::model::{Beta, ModelParams, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ParamAxis {
    J1,
    J2,
    Gamma,
    H,
    Beta,
    T,
}

impl ParamAxis {
    pub fn name(self) -> &'static str {
        match self {
            ParamAxis::J1 => "j1",
            ParamAxis::J2 => "j2",
            ParamAxis::Gamma => "gamma",
            ParamAxis::H => "h",
            ParamAxis::Beta => "beta",
            ParamAxis::T => "t",
        }
    }

    /// Sets this coordinate. Infinite `beta` or `t` select the zero-temperature
    /// and steady-state branches.
    pub fn apply(self, params: ModelParams, value: f64) -> ModelParams {
        match self {
            ParamAxis::J1 => ModelParams { j1: value, ..params },
            ParamAxis::J2 => ModelParams { j2: value, ..params },
            ParamAxis::Gamma => ModelParams { gamma: value, ..params },
            ParamAxis::H => ModelParams { h: value, ..params },
            ParamAxis::Beta => params.with_beta(Beta::from_value(value)),
            ParamAxis::T => params.with_time(Time::from_value(value)),
        }
    }

    pub fn get(self, params: &ModelParams) -> f64 {
        match self {
            ParamAxis::J1 => params.j1,
            ParamAxis::J2 => params.j2,
            ParamAxis::Gamma => params.gamma,
            ParamAxis::H => params.h,
            ParamAxis::Beta => params.beta.value(),
            ParamAxis::T => params.time.value(),
        }
    }
}

impl fmt::Display for ParamAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "j1" => Ok(ParamAxis::J1),
            "j2" => Ok(ParamAxis::J2),
            "gamma" => Ok(ParamAxis::Gamma),
            "h" => Ok(ParamAxis::H),
            "beta" => Ok(ParamAxis::Beta),
            "t" => Ok(ParamAxis::T),
            other => Err(Error::InvalidParams(format!("unknown axis '{other}'"))),
        }
    }
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisSpec {
    pub axis: ParamAxis,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(axis: ParamAxis, start: f64, stop: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParams(format!("axis {axis}: count must be >= 1")));
        }
        if !(start <= stop) || start.is_nan() {
            return Err(Error::InvalidParams(format!("axis {axis}: need start <= stop, got {start}:{stop}")));
        }
        if count > 1 && !(stop - start).is_finite() {
            return Err(Error::InvalidParams(format!("axis {axis}: range must be finite")));
        }
        Ok(AxisSpec { axis, start, stop, count })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 }).collect()
    }
}

/// Parses `name=start:stop:count`.
impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("axis '{s}' is not name=start:stop:count"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let num = |x: &str| -> Result<f64> {
            match x.trim() {
                "inf" => Ok(f64::INFINITY),
                v => v.parse().map_err(|_| bad()),
            }
        };
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        AxisSpec::new(name.parse()?, num(parts[0])?, num(parts[1])?, count)
    }
}

/// A base point and the axes varied around it. The first axis varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamGrid {
    pub base: ModelParams,
    pub axes: Vec<AxisSpec>,
}

impl ParamGrid {
    pub fn new(base: ModelParams, axes: Vec<AxisSpec>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.axis == a.axis) {
                return Err(Error::InvalidParams(format!("axis {} given twice", a.axis)));
            }
        }
        Ok(ParamGrid { base, axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates and parameters of every point, row-major.
    pub fn points(&self) -> Vec<(Vec<f64>, ModelParams)> {
        let values: Vec<Vec<f64>> = self.axes.iter().map(AxisSpec::values).collect();
        (0..self.len())
            .map(|flat| {
                let mut rem = flat;
                let mut coords = vec![0.0; self.axes.len()];
                for k in (0..self.axes.len()).rev() {
                    coords[k] = values[k][rem % self.axes[k].count];
                    rem /= self.axes[k].count;
                }
                let params = self.axes.iter().zip(&coords).fold(self.base, |p, (a, &v)| a.axis.apply(p, v));
                (coords, params)
            })
            .collect()
    }
}

/// Outcome at one grid point. Failures keep their coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow<T> {
    pub index: usize,
    pub coords: Vec<f64>,
    pub params: ModelParams,
    pub result: std::result::Result<T, String>,
}

/// Evaluates `f` at every point of `grid` in parallel; rows come back in grid order.
pub fn sweep<T, F>(grid: &ParamGrid, f: F) -> Vec<SweepRow<T>>
where
    T: Send,
    F: Fn(&ModelParams) -> Result<T> + Sync,
{
    grid.points()
        .into_par_iter()
        .enumerate()
        .map(|(index, (coords, params))| SweepRow {
            index,
            coords,
            result: f(&params).map_err(|e| e.to_string()),
            params,
        })
        .collect()
}

pub fn correlator_sweep(grid: &ParamGrid, mode: Grid) -> Vec<SweepRow<CorrelatorSet>> {
    sweep(grid, |p| correlators(p, mode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_axes() {
        let a: AxisSpec = "j1=0:3:121".parse().unwrap();
        assert_eq!((a.axis, a.start, a.stop, a.count), (ParamAxis::J1, 0.0, 3.0, 121));
        assert_eq!(a.values()[120], 3.0);
        assert!((a.values()[40] - 1.0).abs() < 1e-15);
        assert!("j1=0:3".parse::<AxisSpec>().is_err());
        assert!("q=0:3:4".parse::<AxisSpec>().is_err());
        assert!("t=3:0:4".parse::<AxisSpec>().is_err());
        assert!("t=0:1:0".parse::<AxisSpec>().is_err());
        let steady: AxisSpec = "t=inf:inf:1".parse().unwrap();
        assert_eq!(steady.values(), vec![f64::INFINITY]);
    }

    #[test]
    fn row_major_order() {
        let grid = ParamGrid::new(
            ModelParams::new(0.0, 0.0, 0.5),
            vec![
                AxisSpec::new(ParamAxis::J1, 0.0, 1.0, 2).unwrap(),
                AxisSpec::new(ParamAxis::J2, 0.0, 2.0, 3).unwrap(),
            ],
        )
        .unwrap();
        let coords: Vec<Vec<f64>> = grid.points().into_iter().map(|(c, _)| c).collect();
        assert_eq!(
            coords,
            vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![0.0, 2.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 2.0],]
        );
    }

    #[test]
    fn matches_direct_calls_and_keeps_failures() {
        let base = ModelParams::new(0.6, 1.4, 0.5).at(2.0);
        let grid = ParamGrid::new(
            base,
            vec![
                AxisSpec::new(ParamAxis::J1, 0.6, 1.4, 2).unwrap(),
                AxisSpec::new(ParamAxis::Gamma, 0.5, 1.5, 2).unwrap(),
            ],
        )
        .unwrap();
        let rows = correlator_sweep(&grid, Grid::Thermodynamic);
        assert_eq!(rows.len(), 4);
        for row in &rows {
            if row.params.gamma > 1.0 {
                assert!(row.result.is_err());
                assert_eq!(row.coords[1], 1.5);
            } else {
                let direct = correlators(&row.params, Grid::Thermodynamic).unwrap();
                assert_eq!(row.result.as_ref().unwrap(), &direct);
            }
        }
    }

    #[test]
    fn infinite_values_select_special_branches() {
        let p = ParamAxis::T.apply(ModelParams::new(1.0, 1.0, 0.5), f64::INFINITY);
        assert_eq!(p.time, Time::Steady);
        let p = ParamAxis::Beta.apply(p, f64::INFINITY);
        assert_eq!(p.beta, Beta::Infinite);
    }
}
