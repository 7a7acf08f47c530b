//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Every problem in a file is
//! collected before reporting, so one pass shows all of them.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

/// Subcommand a configuration is meant for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Twin,
    EmhdTwin,
    LpCheck,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Twin => "twin",
            Mode::EmhdTwin => "emhd-twin",
            Mode::LpCheck => "lp-check",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "twin" => Ok(Mode::Twin),
            "emhd-twin" => Ok(Mode::EmhdTwin),
            "lp-check" => Ok(Mode::LpCheck),
            _ => Err("expected one of simulate, twin, emhd-twin, lp-check".into()),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Time step: fixed, or chosen from the stability policy at `t = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStep {
    Fixed(f64),
    Auto,
}

impl fmt::Display for TimeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeStep::Fixed(dt) => write!(f, "{dt}"),
            TimeStep::Auto => f.write_str("auto"),
        }
    }
}

/// One problem found while parsing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigIssue {
    /// 1-based line number, if the problem is tied to a line.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every problem found in a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.issues.len())?;
        for issue in &self.issues {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Option<Mode>,
    pub n: usize,
    pub nu: f64,
    pub mu: f64,
    pub eta: f64,
    pub dt: TimeStep,
    pub t_end: f64,
    pub seed: u64,
    /// `L^2` norm of the seeded forcing; 0 disables forcing.
    pub forcing_amplitude: f64,
    pub output_every: usize,
    pub cr: f64,
    pub r: f64,
    pub delta: f64,
    /// `L^2` norm of each initial field.
    pub amplitude: f64,
    /// `L^2` norm of each shadow perturbation.
    pub perturbation: f64,
    pub sync: bool,
    /// Steps between snapshots; 0 writes only the final one.
    pub snapshot_every: usize,
    pub out_dir: Option<PathBuf>,
    pub cfl: f64,
    /// Snapshot to resume from (a file for `simulate`, a file prefix for the
    /// twin modes).
    pub resume: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "mode",
    "n",
    "nu",
    "mu",
    "eta",
    "dt",
    "t_end",
    "seed",
    "forcing_amplitude",
    "output_every",
    "cr",
    "r",
    "delta",
    "amplitude",
    "perturbation",
    "sync",
    "snapshot_every",
    "out_dir",
    "cfl",
    "resume",
];

const REQUIRED: &[&str] = &["n", "t_end"];

impl RunConfig {
    /// Defaults for every optional key.
    pub fn with_required(n: usize, t_end: f64) -> Self {
        RunConfig {
            mode: None,
            n,
            nu: 1.0,
            mu: 1.0,
            eta: 0.5,
            dt: TimeStep::Auto,
            t_end,
            seed: 0,
            forcing_amplitude: 0.0,
            output_every: 10,
            cr: 0.05,
            r: 2.5,
            delta: 2.0,
            amplitude: 0.1,
            perturbation: 1e-2,
            sync: true,
            snapshot_every: 0,
            out_dir: None,
            cfl: 0.4,
            resume: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut issues = Vec::new();
        let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                issues.push(ConfigIssue {
                    line: Some(line),
                    message: format!("expected `key = value`, found `{content}`"),
                });
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                issues.push(ConfigIssue {
                    line: Some(line),
                    message: format!("unknown key `{key}`"),
                });
                continue;
            }
            if let Some((first, _)) = entries.get(key) {
                issues.push(ConfigIssue {
                    line: Some(line),
                    message: format!("duplicate key `{key}` on lines {first} and {line}"),
                });
                continue;
            }
            entries.insert(key, (line, value));
        }
        for key in REQUIRED {
            if !entries.contains_key(key) {
                issues.push(ConfigIssue {
                    line: None,
                    message: format!("missing required key `{key}`"),
                });
            }
        }

        let mut cfg = RunConfig::with_required(0, 0.0);
        let mut set = |key: &str, apply: &mut dyn FnMut(&str) -> Result<(), String>| {
            if let Some((line, value)) = entries.get(key) {
                if let Err(msg) = apply(value) {
                    issues.push(ConfigIssue {
                        line: Some(*line),
                        message: format!("`{key} = {value}`: {msg}"),
                    });
                }
            }
        };
        set("mode", &mut |v| v.parse().map(|m| cfg.mode = Some(m)));
        set("n", &mut |v| {
            let n: usize = parse_num(v)?;
            if n % 2 != 0 || n < 24 {
                return Err("n must be even and at least 24".into());
            }
            cfg.n = n;
            Ok(())
        });
        set("nu", &mut |v| positive(v).map(|x| cfg.nu = x));
        set("mu", &mut |v| positive(v).map(|x| cfg.mu = x));
        set("eta", &mut |v| non_negative(v).map(|x| cfg.eta = x));
        set("dt", &mut |v| {
            cfg.dt = if v == "auto" {
                TimeStep::Auto
            } else {
                TimeStep::Fixed(positive(v).map_err(|e| format!("{e} (or `auto`)"))?)
            };
            Ok(())
        });
        set("t_end", &mut |v| positive(v).map(|x| cfg.t_end = x));
        set("seed", &mut |v| parse_num(v).map(|x| cfg.seed = x));
        set("forcing_amplitude", &mut |v| non_negative(v).map(|x| cfg.forcing_amplitude = x));
        set("output_every", &mut |v| {
            let k: usize = parse_num(v)?;
            if k == 0 {
                return Err("must be at least 1".into());
            }
            cfg.output_every = k;
            Ok(())
        });
        set("cr", &mut |v| positive(v).map(|x| cfg.cr = x));
        set("r", &mut |v| {
            let r: f64 = parse_num(v)?;
            if !(r > 2.0 && r < 3.0) {
                return Err("r must lie in the open interval (2,3)".into());
            }
            cfg.r = r;
            Ok(())
        });
        set("delta", &mut |v| {
            let d: f64 = parse_num(v)?;
            if !(d > 1.0) || !d.is_finite() {
                return Err("delta must be > 1".into());
            }
            cfg.delta = d;
            Ok(())
        });
        set("amplitude", &mut |v| non_negative(v).map(|x| cfg.amplitude = x));
        set("perturbation", &mut |v| non_negative(v).map(|x| cfg.perturbation = x));
        set("sync", &mut |v| match v {
            "true" => {
                cfg.sync = true;
                Ok(())
            }
            "false" => {
                cfg.sync = false;
                Ok(())
            }
            _ => Err("expected true or false".into()),
        });
        set("snapshot_every", &mut |v| parse_num(v).map(|x| cfg.snapshot_every = x));
        set("out_dir", &mut |v| {
            cfg.out_dir = Some(PathBuf::from(v));
            Ok(())
        });
        set("cfl", &mut |v| {
            let c = positive(v)?;
            if c > 1.0 {
                return Err("cfl must lie in (0,1]".into());
            }
            cfg.cfl = c;
            Ok(())
        });
        set("resume", &mut |v| {
            cfg.resume = Some(PathBuf::from(v));
            Ok(())
        });

        if issues.is_empty() {
            Ok(cfg)
        } else {
            issues.sort_by_key(|i| i.line.unwrap_or(usize::MAX));
            Err(ConfigError { issues })
        }
    }

    /// Serializes every key; `parse(to_text())` returns an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(m) = self.mode {
            s += &format!("mode = {m}\n");
        }
        s += &format!("n = {}\n", self.n);
        s += &format!("nu = {}\n", self.nu);
        s += &format!("mu = {}\n", self.mu);
        s += &format!("eta = {}\n", self.eta);
        s += &format!("dt = {}\n", self.dt);
        s += &format!("t_end = {}\n", self.t_end);
        s += &format!("seed = {}\n", self.seed);
        s += &format!("forcing_amplitude = {}\n", self.forcing_amplitude);
        s += &format!("output_every = {}\n", self.output_every);
        s += &format!("cr = {}\n", self.cr);
        s += &format!("r = {}\n", self.r);
        s += &format!("delta = {}\n", self.delta);
        s += &format!("amplitude = {}\n", self.amplitude);
        s += &format!("perturbation = {}\n", self.perturbation);
        s += &format!("sync = {}\n", self.sync);
        s += &format!("snapshot_every = {}\n", self.snapshot_every);
        if let Some(d) = &self.out_dir {
            s += &format!("out_dir = {}\n", d.display());
        }
        s += &format!("cfl = {}\n", self.cfl);
        if let Some(r) = &self.resume {
            s += &format!("resume = {}\n", r.display());
        }
        s
    }
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}` as a number"))
}

fn positive(v: &str) -> Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be positive and finite".into())
    }
}

fn non_negative(v: &str) -> Result<f64, String> {
    let x: f64 = parse_num(v)?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err("must be >= 0 and finite".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_and_echo() {
        let cfg = RunConfig::parse("n = 32\nt_end = 0.5 # comment\n\n").unwrap();
        assert_eq!(cfg, RunConfig::with_required(32, 0.5));
        let again = RunConfig::parse(&cfg.to_text()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_text(), cfg.to_text());
    }

    #[test]
    fn r_out_of_range() {
        let err = RunConfig::parse("n = 32\nt_end = 1\nr = 3.5\n").unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert_eq!(err.issues[0].line, Some(3));
        assert!(err.issues[0].message.contains("(2,3)"));
    }

    #[test]
    fn duplicate_lists_both_lines() {
        let err = RunConfig::parse("n = 32\nt_end = 1\nnu = 1\n\nnu = 2\n").unwrap_err();
        assert_eq!(err.issues.len(), 1);
        assert!(err.issues[0].message.contains("lines 3 and 5"), "{}", err);
    }

    #[test]
    fn all_errors_reported() {
        let err = RunConfig::parse("bogus = 1\nr = 3.5\ndelta = 0.5\nwhat\n").unwrap_err();
        // unknown key, r, delta, malformed line, missing n, missing t_end
        assert_eq!(err.issues.len(), 6, "{err}");
    }
}
