//! RunConfig: flags layered over an optional key=value file.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use pwh_core::ortho::Params;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Gram,
    Norms,
    Spectral,
    Parseval,
    Identities,
    Mellin,
    Boundary,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Gram => "gram",
            Command::Norms => "norms",
            Command::Spectral => "spectral",
            Command::Parseval => "parseval",
            Command::Identities => "identities",
            Command::Mellin => "mellin",
            Command::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Phi,
    Psi,
}

/// Grid start:end:step; empty when start > end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.start > self.end {
            return Vec::new();
        }
        let n = ((self.end - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, h] = parts.as_slice() else {
            return Err(format!("grid must be start:end:step, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid {s:?}"));
        let g = Grid { start: num(a)?, end: num(b)?, step: num(h)? };
        if !(g.step > 0.0) || !g.start.is_finite() || !g.end.is_finite() {
            return Err(format!("grid needs finite ends and step > 0, got {s:?}"));
        }
        Ok(g)
    }
}

/// Every key the config file and the flags understand.
pub const KEYS: &[&str] = &[
    "alpha", "beta", "theta", "tol", "level-max", "format", "output", "function", "n", "p", "s", "grid",
    "n-max", "s-max", "s-step", "mu", "nu", "perturb",
];

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    pub tol: f64,
    pub level_max: u32,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub function: Function,
    pub n: Option<i64>,
    pub p: Option<f64>,
    pub s: f64,
    pub grid: Grid,
    pub n_max: Option<i64>,
    pub s_max: f64,
    pub s_step: f64,
    pub mu: f64,
    pub nu: f64,
    pub perturb: f64,
}

pub fn parse_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{}:{}: expected key=value", path.display(), i + 1)));
        };
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(CliError::Config(format!("{}:{}: unknown key {k:?}", path.display(), i + 1)));
        }
        map.insert(k, v.trim().to_string());
    }
    Ok(map)
}

fn get<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("bad value {v:?} for {key}: {e}"))))
        .transpose()
}

impl RunConfig {
    /// `file` holds config-file entries, `flags` the ones given on the command line; flags win.
    pub fn resolve(
        command: Command,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> Result<Self, CliError> {
        let mut m = file;
        m.extend(flags);
        let alpha = get(&m, "alpha")?.unwrap_or(0.3);
        let beta = get(&m, "beta")?.unwrap_or(0.5);
        let theta = get(&m, "theta")?.unwrap_or(0.25);
        let params = Params::new(alpha, beta, theta).map_err(|e| CliError::Config(e.to_string()))?;
        let tol: f64 = get(&m, "tol")?.unwrap_or(1e-11);
        if !(tol >= 1e-12) {
            return Err(CliError::Config(format!("need tol >= 1e-12, got {tol}")));
        }
        let format = match m.get("format").map(String::as_str) {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(f) => return Err(CliError::Config(format!("format must be json or csv, got {f:?}"))),
        };
        let function = match m.get("function").map(String::as_str) {
            None | Some("phi") => Function::Phi,
            Some("psi") => Function::Psi,
            Some(f) => return Err(CliError::Config(format!("function must be phi or psi, got {f:?}"))),
        };
        let cfg = Self {
            command,
            params,
            tol,
            level_max: get(&m, "level-max")?.unwrap_or(9),
            format,
            output: m.get("output").map(PathBuf::from),
            function,
            n: get(&m, "n")?,
            p: get(&m, "p")?,
            s: get(&m, "s")?.unwrap_or(1.0),
            grid: get(&m, "grid")?.unwrap_or(Grid { start: 0.05, end: 3.0, step: 0.05 }),
            n_max: get(&m, "n-max")?,
            s_max: get(&m, "s-max")?.unwrap_or(40.0),
            s_step: get(&m, "s-step")?.unwrap_or(0.05),
            mu: get(&m, "mu")?.unwrap_or(0.6),
            nu: get(&m, "nu")?.unwrap_or(0.2),
            perturb: get(&m, "perturb")?.unwrap_or(0.0),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n.is_some() && self.p.is_some() {
            return Err(CliError::Config("give either n or p, not both".into()));
        }
        if let Some(n) = self.n {
            if n < self.params.n_min() {
                return Err(CliError::Config(format!(
                    "need 2p+alpha+beta+1 > 0: n = {n} is below n_min = {}",
                    self.params.n_min()
                )));
            }
        }
        if !(1..=20).contains(&self.level_max) {
            return Err(CliError::Config(format!("need 1 <= level-max <= 20, got {}", self.level_max)));
        }
        if !(self.s_max > 0.0 && self.s_step > 0.0 && self.s_step < self.s_max) {
            return Err(CliError::Config(format!("need 0 < s-step < s-max, got {} and {}", self.s_step, self.s_max)));
        }
        if !(self.perturb.abs() < 1.0) {
            return Err(CliError::Config(format!("need |perturb| < 1, got {}", self.perturb)));
        }
        Ok(())
    }

    pub fn spec(&self) -> pwh_core::quadrature::QuadratureSpec {
        pwh_core::quadrature::QuadratureSpec { tol: self.tol, level_max: self.level_max, ..Default::default() }
    }

    /// Last index for the commands that loop over n, default θ + 5.
    pub fn n_max_or(&self, default: i64) -> i64 {
        self.n_max.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(kv: &[(&str, &str)]) -> BTreeMap<String, String> {
        kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file() {
        let c = RunConfig::resolve(Command::Gram, map(&[("alpha", "0.1"), ("tol", "1e-9")]), map(&[("alpha", "0.2")]))
            .unwrap();
        assert_eq!(c.params.alpha, 0.2);
        assert_eq!(c.tol, 1e-9);
    }

    #[test]
    fn rejects_named_inequality() {
        let e = RunConfig::resolve(Command::Gram, map(&[]), map(&[("alpha", "1.5")])).unwrap_err();
        assert!(e.to_string().contains("-1 < alpha < 1"), "{e}");
    }

    #[test]
    fn grids() {
        let g: Grid = "0:1:0.25".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = "1:0:0.1".parse().unwrap();
        assert!(g.points().is_empty());
        assert!("0:1".parse::<Grid>().is_err());
        assert!("0:1:0".parse::<Grid>().is_err());
    }
}
