//! Run configuration: a JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use psc_core::dynamics::DEFAULT_LAMBDA_OFFSETS;
use psc_core::equilibrium::DEFAULT_NEWTON_TOL;
use psc_core::stability::DEFAULT_ZERO_TOL;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Smallest truncation degree accepted by the table commands.
pub const MIN_TABLE_LMAX: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub l_max: usize,
    pub newton_tol: f64,
    pub zero_tol: f64,
    pub classify_tol: f64,
    pub s_max: f64,
    pub ds: f64,
    /// `|λ − λ_ℓ|` of the heteroclinic experiments for `ℓ = 1..=4`.
    pub lambda_offsets: [f64; 4],
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            l_max: 16,
            newton_tol: DEFAULT_NEWTON_TOL,
            zero_tol: DEFAULT_ZERO_TOL,
            classify_tol: psc_core::dynamics::CLASSIFY_TOL,
            s_max: 0.5,
            ds: 0.01,
            lambda_offsets: DEFAULT_LAMBDA_OFFSETS,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

/// Values given on the command line; `None` keeps the file or default value.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub l_max: Option<usize>,
    pub newton_tol: Option<f64>,
    pub zero_tol: Option<f64>,
    pub classify_tol: Option<f64>,
    pub s_max: Option<f64>,
    pub ds: Option<f64>,
    pub output_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = o.$f.clone() { self.$f = v; })* };
        }
        take!(l_max, newton_tol, zero_tol, classify_tol, s_max, ds, output_dir, seed);
    }

    pub fn validate(&self, table_command: bool) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("zero_tol", self.zero_tol),
            ("classify_tol", self.classify_tol),
            ("s_max", self.s_max),
            ("ds", self.ds),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(v) = self.lambda_offsets.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(CliError::Config(format!("lambda offsets must be positive, got {v}")));
        }
        if self.ds > self.s_max {
            return Err(CliError::Config(format!("ds = {} exceeds s_max = {}", self.ds, self.s_max)));
        }
        if table_command && self.l_max < MIN_TABLE_LMAX {
            return Err(CliError::Config(format!("l_max must be at least {MIN_TABLE_LMAX}, got {}", self.l_max)));
        }
        if self.l_max > psc_core::coupling::MAX_DEGREE as usize / 2 {
            return Err(CliError::Config(format!("l_max {} is too large", self.l_max)));
        }
        Ok(())
    }

    pub fn lambda_offset(&self, ell: usize) -> f64 {
        self.lambda_offsets.get(ell.wrapping_sub(1)).copied().unwrap_or_else(|| psc_core::dynamics::default_lambda_offset(ell))
    }
}

/// Worker count from `PSC_THREADS`; unset means rayon's default.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("PSC_THREADS must be a positive integer, got {s:?}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate(true).unwrap();
    }

    #[test]
    fn partial_file_and_overrides() {
        let mut c = RunConfig::from_json(r#"{"l_max": 12, "zero_tol": 1e-7}"#).unwrap();
        assert_eq!((c.l_max, c.zero_tol, c.ds), (12, 1e-7, 0.01));
        c.apply(&Overrides { l_max: Some(10), seed: Some(3), ..Default::default() });
        assert_eq!((c.l_max, c.seed, c.zero_tol), (10, 3, 1e-7));
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_json(r#"{"lmax": 12}"#).is_err());
        let c = RunConfig { zero_tol: 0.0, ..Default::default() };
        assert_eq!(c.validate(false).unwrap_err().exit_code(), 2);
        let c = RunConfig { l_max: 6, ..Default::default() };
        assert!(c.validate(true).is_err());
        c.validate(false).unwrap();
    }

    #[test]
    fn threads() {
        assert_eq!(thread_cap(None).unwrap(), None);
        assert_eq!(thread_cap(Some("4")).unwrap(), Some(4));
        assert!(thread_cap(Some("0")).is_err());
        assert!(thread_cap(Some("x")).is_err());
    }
}
