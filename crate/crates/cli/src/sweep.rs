//! One-axis parameter sweeps over a base scenario.

use std::f64::consts::FRAC_PI_2;
use std::str::FromStr;

use crate::config::{ConfigError, ConfigMap, ConfigResult, ScenarioConfig, MAX_EXPONENT};
use crate::run::{run_point, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Range,
    Theta,
    Exponent,
    Subarrays,
}

impl Axis {
    /// The scenario key this axis drives.
    pub fn key(&self) -> &'static str {
        match self {
            Axis::Range => "r",
            Axis::Theta => "theta",
            Axis::Exponent => "I",
            Axis::Subarrays => "K",
        }
    }

    fn integral(&self) -> bool {
        matches!(self, Axis::Exponent | Axis::Subarrays)
    }
}

impl FromStr for Axis {
    type Err = ConfigError;
    fn from_str(s: &str) -> ConfigResult<Self> {
        match s {
            "r" => Ok(Axis::Range),
            "theta" => Ok(Axis::Theta),
            "I" => Ok(Axis::Exponent),
            "K" => Ok(Axis::Subarrays),
            _ => Err(ConfigError::Value { key: "axis".into(), reason: format!("{s:?}: expected r, theta, I or K") }),
        }
    }
}

/// `steps` evenly spaced values from `start` to `stop`, both included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.into(), reason: reason.into() }
}

impl SweepSpec {
    pub fn new(axis: Axis, start: f64, stop: f64, steps: usize) -> ConfigResult<Self> {
        let s = Self { axis, start, stop, steps };
        s.check()?;
        Ok(s)
    }

    /// Reads `axis`, `start`, `stop` and `steps` from a config map.
    pub fn from_map(map: &ConfigMap) -> ConfigResult<Self> {
        let get = |k: &'static str| map.get(k).ok_or(ConfigError::Missing(k));
        let real = |k: &'static str| -> ConfigResult<f64> {
            let v = get(k)?;
            v.parse().map_err(|e| bad(k, format!("{v:?}: {e}")))
        };
        let steps = get("steps")?;
        let steps = steps.parse().map_err(|e| bad("steps", format!("{steps:?}: {e}")))?;
        Self::new(get("axis")?.parse()?, real("start")?, real("stop")?, steps)
    }

    fn check(&self) -> ConfigResult<()> {
        if self.steps < 2 {
            return Err(bad("steps", "need at least 2"));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(bad("start", "need finite start < stop"));
        }
        match self.axis {
            Axis::Range if self.start <= 0.0 => return Err(bad("start", "range must be positive")),
            Axis::Theta if self.start <= -FRAC_PI_2 || self.stop >= FRAC_PI_2 => {
                return Err(bad("start", "angles must lie strictly between -pi/2 and pi/2"))
            }
            Axis::Exponent if self.start < 0.0 || self.stop > MAX_EXPONENT as f64 => {
                return Err(bad("start", format!("I must lie in [0, {MAX_EXPONENT}]")))
            }
            Axis::Subarrays if self.start < 1.0 || self.stop > 1e6 => {
                return Err(bad("start", "K must lie in [1, 1e6]"))
            }
            _ => {}
        }
        if self.axis.integral() {
            let span = self.stop - self.start;
            let gaps = (self.steps - 1) as f64;
            if self.start.fract() != 0.0 || self.stop.fract() != 0.0 || (span / gaps).fract() != 0.0 {
                return Err(bad("steps", format!("{} needs an integer grid", self.axis.key())));
            }
        }
        Ok(())
    }

    /// Grid values in increasing order; the last one is exactly `stop`.
    pub fn values(&self) -> Vec<f64> {
        let gaps = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + (self.stop - self.start) * i as f64 / gaps })
            .collect()
    }

    /// The base scenario with the axis set to `value`.
    pub fn apply(&self, base: &ScenarioConfig, value: f64) -> ScenarioConfig {
        let mut c = *base;
        match self.axis {
            Axis::Range => c.r = value,
            Axis::Theta => c.theta = value,
            Axis::Exponent => c.i = value as u32,
            Axis::Subarrays => c.k = value as usize,
        }
        c
    }
}

/// Validates a sweep: the base map needs every scenario key except the axis.
pub fn sweep_base(map: &ConfigMap, spec: &SweepSpec) -> ConfigResult<ScenarioConfig> {
    let mut m = map.clone();
    m.set(spec.axis.key(), spec.start.to_string());
    ScenarioConfig::from_map(&m)
}

/// One record per grid point, in axis order. Errors stay per row.
pub fn run_sweep(base: &ScenarioConfig, spec: &SweepSpec) -> Vec<Record> {
    spec.values().into_iter().map(|v| run_point(&spec.apply(base, v))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(text: &str) -> ConfigMap {
        ConfigMap::parse(text).unwrap()
    }

    #[test]
    fn grid_is_inclusive_and_ordered() {
        let s = SweepSpec::new(Axis::Range, 2.0, 50.0, 25).unwrap();
        let v = s.values();
        assert_eq!((v.len(), v[0], v[1], v[24]), (25, 2.0, 4.0, 50.0));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn parses_from_keys() {
        let s = SweepSpec::from_map(&map("axis=I\nstart=0\nstop=20\nsteps=21")).unwrap();
        assert_eq!(s, SweepSpec { axis: Axis::Exponent, start: 0.0, stop: 20.0, steps: 21 });
        assert_eq!(s.values()[7], 7.0);
    }

    #[test]
    fn rejects_bad_specs() {
        for text in [
            "axis=r\nstart=2\nstop=50\nsteps=1",
            "axis=r\nstart=50\nstop=2\nsteps=5",
            "axis=r\nstart=0\nstop=2\nsteps=5",
            "axis=theta\nstart=-1.6\nstop=1\nsteps=5",
            "axis=I\nstart=0\nstop=20\nsteps=7",
            "axis=K\nstart=0\nstop=4\nsteps=5",
            "axis=N_r\nstart=1\nstop=4\nsteps=4",
            "axis=r\nstart=1\nstop=nan\nsteps=4",
            "axis=r\nstart=1\nsteps=4",
        ] {
            assert!(SweepSpec::from_map(&map(text)).is_err(), "{text}");
        }
    }

    #[test]
    fn sweep_keeps_going_past_singular_points() {
        let base = map("K=3\nI=4\nN_r=4\nR=6\nmodel=sw\nlayout=wsms\nmethod=direct\ntheta=0");
        let spec = SweepSpec::new(Axis::Range, 2.0, 10.0, 5).unwrap();
        let rows = run_sweep(&sweep_base(&base, &spec).unwrap(), &spec);
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[2].error_code, Some("degenerate_geometry"));
        assert!(rows[1].error_code.is_none() && rows[3].error_code.is_none());
        assert_eq!(rows.iter().map(|r| r.r).collect::<Vec<_>>(), spec.values());
    }
}
