//! Flat `key = value` scenario files and the typed scenario they describe.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_complex::Complex64;
use wsms_crb::{LayoutKind, Wavefront};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("bad value for `{key}`: {reason}")]
    Value { key: String, reason: String },
}

pub type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn bad(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Value { key: key.to_string(), reason: reason.into() }
}

/// Every key a scenario or sweep file may set.
pub const SCENARIO_KEYS: [&str; 14] = [
    "frequency_hz", "snr_db", "alpha", "K", "M", "I", "N_r", "R", "vartheta", "model", "layout", "method", "r", "theta",
];
pub const SWEEP_KEYS: [&str; 4] = ["axis", "start", "stop", "steps"];

/// Raw key/value pairs, after file parsing and flag overrides.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap(BTreeMap<String, String>);

impl ConfigMap {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, text: raw.to_string() });
            }
            if !SCENARIO_KEYS.contains(&k) && !SWEEP_KEYS.contains(&k) {
                return Err(ConfigError::UnknownKey(k.to_string()));
            }
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(ConfigError::Duplicate { line: i + 1, key: k.to_string() });
            }
        }
        Ok(Self(map))
    }

    /// Sets or overrides one key.
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    /// Overrides this map with every key of `other`.
    pub fn merge(&mut self, other: &ConfigMap) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &'static str, default: Option<T>) -> ConfigResult<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            Some(v) => v.parse().map_err(|e: T::Err| bad(key, format!("{v:?}: {e}"))),
            None => default.ok_or(ConfigError::Missing(key)),
        }
    }

    fn real(&self, key: &'static str, default: Option<f64>) -> ConfigResult<f64> {
        let v: f64 = self.parsed(key, default)?;
        if !v.is_finite() {
            return Err(bad(key, "must be finite"));
        }
        Ok(v)
    }
}

/// Complex path gain such as `1`, `0.5-2j`, `3i` or `(1+1j)`.
pub fn parse_alpha(s: &str) -> ConfigResult<Complex64> {
    let t = s.trim();
    let t = t.strip_prefix('(').and_then(|u| u.strip_suffix(')')).unwrap_or(t);
    let z = Complex64::from_str(t).map_err(|e| bad("alpha", format!("{s:?}: {e}")))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(bad("alpha", "must be finite"));
    }
    Ok(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    Riemann,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Riemann => "riemann",
            Method::Oracle => "oracle",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(Method::Direct),
            "riemann" | "closed" => Ok(Method::Riemann),
            "oracle" => Ok(Method::Oracle),
            _ => Err("expected direct, riemann, closed or oracle".into()),
        }
    }
}

pub fn parse_model(s: &str) -> ConfigResult<Wavefront> {
    match s {
        "sw" => Ok(Wavefront::Spherical),
        "hspw" => Ok(Wavefront::Hybrid),
        "pw" => Ok(Wavefront::Planar),
        _ => Err(bad("model", format!("{s:?}: expected sw, hspw or pw"))),
    }
}

pub fn parse_layout(s: &str) -> ConfigResult<LayoutKind> {
    match s {
        "wsms" => Ok(LayoutKind::Wsms),
        "ua" => Ok(LayoutKind::Ua),
        "dua" => Ok(LayoutKind::Dua),
        _ => Err(bad("layout", format!("{s:?}: expected wsms, ua or dua"))),
    }
}

/// Largest accepted gap exponent; `2^I` must stay finite.
pub const MAX_EXPONENT: u32 = 1000;

/// One fully specified scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    pub frequency_hz: f64,
    pub snr_db: f64,
    pub alpha: Complex64,
    pub k: usize,
    pub m: usize,
    pub i: u32,
    pub n_r: usize,
    pub big_r: f64,
    pub vartheta: f64,
    pub model: Wavefront,
    pub layout: LayoutKind,
    pub method: Method,
    pub r: f64,
    pub theta: f64,
}

impl ScenarioConfig {
    pub fn from_map(map: &ConfigMap) -> ConfigResult<Self> {
        let c = Self {
            frequency_hz: map.real("frequency_hz", Some(1e11))?,
            snr_db: map.real("snr_db", Some(0.0))?,
            alpha: match map.get("alpha") {
                Some(s) => parse_alpha(s)?,
                None => Complex64::new(1.0, 0.0),
            },
            k: map.parsed("K", None)?,
            m: map.parsed("M", Some(128))?,
            i: map.parsed("I", None)?,
            n_r: map.parsed("N_r", None)?,
            big_r: map.real("R", None)?,
            vartheta: map.real("vartheta", Some(0.0))?,
            model: parse_model(map.get("model").ok_or(ConfigError::Missing("model"))?)?,
            layout: parse_layout(map.get("layout").ok_or(ConfigError::Missing("layout"))?)?,
            method: map.parsed("method", None)?,
            r: map.real("r", None)?,
            theta: map.real("theta", None)?,
        };
        c.check()?;
        Ok(c)
    }

    /// Parameter ranges a scenario must satisfy before it reaches the engine.
    pub fn check(&self) -> ConfigResult<()> {
        if !(self.frequency_hz > 0.0) {
            return Err(bad("frequency_hz", "must be positive"));
        }
        for (key, v) in [("K", self.k), ("M", self.m), ("N_r", self.n_r)] {
            if v == 0 {
                return Err(bad(key, "must be at least 1"));
            }
        }
        if self.i > MAX_EXPONENT {
            return Err(bad("I", format!("must not exceed {MAX_EXPONENT}")));
        }
        if !(self.big_r > 0.0) {
            return Err(bad("R", "must be positive"));
        }
        if !(self.r > 0.0) {
            return Err(bad("r", "must be positive"));
        }
        if !(self.theta.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(bad("theta", "must lie strictly between -pi/2 and pi/2"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "K = 3\nI = 4\nN_r = 1\nR = 100\nmodel = sw\nlayout = wsms\nmethod = direct\nr = 10\ntheta = 0.5\n";

    #[test]
    fn defaults_fill_optional_keys() {
        let c = ScenarioConfig::from_map(&ConfigMap::parse(BASE).unwrap()).unwrap();
        assert_eq!((c.frequency_hz, c.snr_db, c.m, c.vartheta), (1e11, 0.0, 128, 0.0));
        assert_eq!(c.alpha, Complex64::new(1.0, 0.0));
        assert_eq!((c.k, c.i, c.method), (3, 4, Method::Direct));
    }

    #[test]
    fn comments_blank_lines_and_overrides() {
        let mut m = ConfigMap::parse(&format!("# scenario\n\n{BASE}M = 16 # small\n")).unwrap();
        m.set("M", "8");
        assert_eq!(ScenarioConfig::from_map(&m).unwrap().m, 8);
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(matches!(ConfigMap::parse("K 3"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(ConfigMap::parse("K=3\nK=4"), Err(ConfigError::Duplicate { line: 2, .. })));
        assert!(matches!(ConfigMap::parse("k=3"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(ConfigMap::parse("K="), Err(ConfigError::Syntax { .. })));
        let m = ConfigMap::parse(&BASE.replace("K = 3\n", "")).unwrap();
        assert_eq!(ScenarioConfig::from_map(&m), Err(ConfigError::Missing("K")));
        for (k, v) in [("K", "0"), ("K", "-1"), ("theta", "1.6"), ("r", "inf"), ("R", "0"), ("I", "1001"), ("model", "SW")] {
            let mut m = ConfigMap::parse(BASE).unwrap();
            m.set(k, v);
            assert!(ScenarioConfig::from_map(&m).is_err(), "{k}={v}");
        }
    }

    #[test]
    fn alpha_forms() {
        for (s, re, im) in [("1", 1.0, 0.0), ("1+0j", 1.0, 0.0), ("0.5-2j", 0.5, -2.0), ("3i", 0.0, 3.0), ("(1+1j)", 1.0, 1.0), ("-j", 0.0, -1.0)] {
            assert_eq!(parse_alpha(s).unwrap(), Complex64::new(re, im), "{s}");
        }
        for s in ["", "1+", "x", "nan", "1+infj"] {
            assert!(parse_alpha(s).is_err(), "{s}");
        }
    }
}
