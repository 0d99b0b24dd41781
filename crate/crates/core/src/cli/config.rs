use crate::bc_algebra::{make_named, BoundaryCondition, Family};
use crate::error::{Error, Result};
use crate::evolution::SweepConfig;
use crate::grid::StateGrid;
use crate::mat2::C64;
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Parses `dirichlet | neumann | robin:<a> | mixed:<a> | pseudoperiodic:<a> |
/// matrix:<path>`. Relative matrix paths resolve against `base`.
pub fn parse_bc(text: &str, base: Option<&Path>) -> Result<BoundaryCondition> {
    let text = text.trim();
    let (name, arg) = match text.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (text, None),
    };
    if name.eq_ignore_ascii_case("matrix") {
        let path =
            arg.filter(|p| !p.is_empty()).ok_or_else(|| Error::InvalidInput("matrix: needs a file path".into()))?;
        let mut full = PathBuf::from(path);
        if let (Some(b), true) = (base, full.is_relative()) {
            full = b.join(full);
        }
        let body = std::fs::read_to_string(&full)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", full.display())))?;
        return serde_json::from_str(&body)
            .map_err(|e| Error::InvalidInput(format!("bad matrix file {}: {e}", full.display())));
    }
    let alpha = arg
        .map(|a| a.parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad angle '{a}' in '{text}'"))))
        .transpose()?;
    Family::from_name(name, alpha).map(make_named)
}

/// A boundary condition in a config file: mini-language text or a record.
#[derive(Clone, Debug)]
pub enum BcField {
    Text(String),
    Record(BoundaryCondition),
}

impl<'de> Deserialize<'de> for BcField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::String(s) => Ok(BcField::Text(s)),
            v => BoundaryCondition::deserialize(v).map(BcField::Record).map_err(D::Error::custom),
        }
    }
}

impl BcField {
    pub fn resolve(&self, base: Option<&Path>) -> Result<BoundaryCondition> {
        match self {
            BcField::Text(s) => parse_bc(s, base),
            BcField::Record(bc) => Ok(*bc),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// √30 x(1 − x)
    #[default]
    Parabola,
    Constant,
}

impl InitialState {
    pub fn sample(self, m: usize) -> Result<StateGrid> {
        let raw = match self {
            InitialState::Parabola => StateGrid::parabola(m)?,
            InitialState::Constant => StateGrid::from_fn(m, |_| C64::new(1.0, 0.0))?,
        };
        raw.normalized()
    }
}

fn default_time_points() -> usize {
    16
}

/// Sweep configuration file.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<String>,
    pub bc_u: BcField,
    pub bc_v: BcField,
    pub t: f64,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub cutoff_energy: Option<f64>,
    pub grid_size: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default = "default_time_points")]
    pub time_points: usize,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&body)
            .map_err(|e| Error::InvalidInput(format!("bad config {}: {e}", path.display())))?;
        if let Some(c) = &cfg.command {
            if c != "sweep" {
                return Err(Error::InvalidInput(format!("unsupported command '{c}' in config")));
            }
        }
        if !(cfg.t > 0.0 && cfg.t.is_finite()) {
            return Err(Error::InvalidInput(format!("t must be positive and finite, got {}", cfg.t)));
        }
        if let Some(e) = cfg.cutoff_energy {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidInput(format!("cutoff_energy must be positive, got {e}")));
            }
        }
        if cfg.grid_size < 3 {
            return Err(Error::InvalidInput("grid_size must be at least 3".into()));
        }
        Ok(cfg)
    }

    pub fn sweep(&self, base: Option<&Path>) -> Result<SweepConfig> {
        let cfg = SweepConfig {
            u: self.bc_u.resolve(base)?,
            v: self.bc_v.resolve(base)?,
            t: self.t,
            n_list: self.n_list.clone(),
            cutoff_energy: self.cutoff_energy,
            grid_size: self.grid_size,
            time_points: self.time_points,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
