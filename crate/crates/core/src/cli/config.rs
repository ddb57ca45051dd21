//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::freegroup::Alphabet;
use crate::reps::PrincipalSeries;

#[derive(Clone, Debug, serde::Serialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub t: f64,
    /// Largest depth `N` of the filtration used for operators.
    pub depth: usize,
    pub n_obs: usize,
    pub n_max: usize,
    pub eps_schedule: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
    /// Output directory; not echoed so reports do not depend on it.
    #[serde(skip)]
    pub out: PathBuf,
    /// Worker threads, `0` for all cores; results never depend on it.
    #[serde(skip)]
    pub workers: usize,
    /// Record wall-clock milliseconds per check (makes reports run-dependent).
    #[serde(skip)]
    pub timings: bool,
}

/// Default tolerances by name.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("adjoint", 1e-8),
    ("duplicity", 0.02),
    ("ftc_increment", 1e-6),
    ("gns", 1e-8),
    ("good_vector", 1e-9),
    ("imperfect_witness", 1e-3),
    ("oddsym", 1e-8),
    ("realization", 1e-9),
    ("rep", 1e-9),
    ("schur", 0.05),
    ("self_pairing", 1e-10),
    ("transfer", 1e-9),
];

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k: 2,
            t: 0.3,
            depth: 5,
            n_obs: 3,
            n_max: 8,
            eps_schedule: vec![0.4, 0.2, 0.1, 0.05],
            tolerances: DEFAULT_TOLERANCES.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            seed: 20240917,
            out: PathBuf::from("out"),
            workers: 0,
            timings: false,
        }
    }
}

fn invalid(field: &str, reason: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), reason: reason.into() }
}

fn parse_num<T: std::str::FromStr>(field: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| invalid(field, format!("cannot parse `{value}`")))
}

impl ExperimentConfig {
    pub fn tol(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "k" => self.k = parse_num(key, value)?,
            "t" => self.t = parse_num(key, value)?,
            "depth" | "N" => self.depth = parse_num(key, value)?,
            "n_obs" | "N_obs" => self.n_obs = parse_num(key, value)?,
            "n_max" => self.n_max = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "timings" => self.timings = parse_num(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "eps_schedule" => {
                self.eps_schedule = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| parse_num(key, s))
                    .collect::<Result<_>>()?;
            }
            _ => match key.strip_prefix("tol.") {
                Some(name) if self.tolerances.contains_key(name) => {
                    self.tolerances.insert(name.to_string(), parse_num(key, value)?);
                }
                _ => return Err(invalid(key, "unknown key")),
            },
        }
        Ok(())
    }

    /// Parses `key = value` lines on top of the defaults; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| invalid(&format!("line {}", i + 1), "expected `key = value`"))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.k) {
            return Err(invalid("k", "need 2 <= k <= 4"));
        }
        if !(1..=self.depth).contains(&self.n_obs) || self.depth > 6 {
            return Err(invalid("n_obs", "need 1 <= n_obs <= depth <= 6"));
        }
        if self.n_max > 12 {
            return Err(invalid("n_max", "need n_max <= 12"));
        }
        if !self.t.is_finite() {
            return Err(invalid("t", "must be finite"));
        }
        let rep = PrincipalSeries::new(Alphabet::new(self.k)?, self.t);
        if rep.is_endpoint() {
            return Err(invalid("t", "endpoint of the principal series"));
        }
        let s = &self.eps_schedule;
        if s.len() < 3 {
            return Err(invalid("eps_schedule", "need at least 3 values"));
        }
        if s.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(invalid("eps_schedule", "values must lie in (0, 1)"));
        }
        if s.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("eps_schedule", "must be strictly decreasing"));
        }
        if let Some((name, _)) = self.tolerances.iter().find(|(_, &v)| !(v.is_finite() && v > 0.0)) {
            return Err(invalid(&format!("tol.{name}"), "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn parse_overrides_and_comments() {
        let cfg = ExperimentConfig::parse("k = 3 # generators\n\nt=0.25\neps_schedule = 0.5, 0.25, 0.1\ntol.schur = 0.1\n").unwrap();
        assert_eq!(cfg.k, 3);
        assert_eq!(cfg.eps_schedule, vec![0.5, 0.25, 0.1]);
        assert_eq!(cfg.tol("schur"), 0.1);
        cfg.validate().unwrap();
    }

    #[test]
    fn invalid_configs_name_their_field() {
        let field = |text: &str| match ExperimentConfig::parse(text).and_then(|c| c.validate()) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(field("eps_schedule = 0.1, 0.2, 0.4"), "eps_schedule");
        assert_eq!(field("k = 5"), "k");
        assert_eq!(field("n_obs = 6\ndepth = 5"), "n_obs");
        assert_eq!(field("n_max = 13"), "n_max");
        assert_eq!(field("colour = red"), "colour");
        assert_eq!(field("tol.schur = -1"), "tol.schur");
        assert_eq!(field("t = 0"), "t");
    }
}
