//! Run configuration: a TOML document with `[model]`, `[solver]`, `[grid]`,
//! `[geometry]`, `[monte_carlo]` and `[output]` tables.
//!
//! Unknown keys are rejected. Parsing fills in defaults, so emitting a parsed
//! config and parsing it again yields the same value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensemble::{Geometry, PairModel, DEFAULT_CYLINDER_RADIUS};
use crate::model::{self, ModelParams, PhysicalInput};
use crate::solver::{SolverConfig, Strategy};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

impl ConfigError {
    fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Field { field: field.to_string(), message: message.into() }
    }

    /// The offending key, when known.
    pub fn field_name(&self) -> Option<&str> {
        match self {
            ConfigError::Field { field, .. } => Some(field),
            ConfigError::Syntax(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Solve,
    SweepDetuning,
    SweepDensity,
    PairSweep,
    EnsembleSweep,
    Validate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::SweepDetuning => "sweep-detuning",
            Command::SweepDensity => "sweep-density",
            Command::PairSweep => "pair-sweep",
            Command::EnsembleSweep => "ensemble-sweep",
            Command::Validate => "validate",
        }
    }

    fn needs_seed(&self) -> bool {
        matches!(self, Command::EnsembleSweep | Command::Validate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cooperativity: Option<f64>,
    /// Atoms per m³; requires `wavelength`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub number_density: Option<f64>,
    /// Metres.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(default)]
    pub detuning: f64,
    #[serde(default = "default_rabi")]
    pub rabi: f64,
}

fn default_rabi() -> f64 {
    1e-3
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { cooperativity: None, number_density: None, wavelength: None, detuning: 0.0, rabi: default_rabi() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default)]
    pub strategy: Strategy,
}

fn default_tol() -> f64 {
    1e-12
}
fn default_max_iter() -> usize {
    10_000
}
fn default_damping() -> f64 {
    1.0
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter(), damping: default_damping(), strategy: Strategy::Auto }
    }
}

/// Either explicit `values` or `start`/`stop` with exactly one of `step` or `points`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl GridSpec {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Self { start: Some(start), stop: Some(stop), step: Some(step), ..Self::default() }
    }

    pub fn values(values: Vec<f64>) -> Self {
        Self { values: Some(values), ..Self::default() }
    }

    /// Expands to a sorted, finite, non-empty list. `step` grids include `stop`
    /// when it lies on the lattice (to within 1e-9 of a step).
    pub fn expand(&self, field: &str) -> Result<Vec<f64>, ConfigError> {
        let err = |m: &str| ConfigError::field(field, m);
        let out = match (self.values.as_ref(), self.start, self.stop, self.step, self.points) {
            (Some(v), None, None, None, None) => v.clone(),
            (Some(_), ..) => return Err(err("give either values or start/stop, not both")),
            (None, Some(a), Some(b), Some(h), None) => {
                if !(h.is_finite() && h > 0.0) {
                    return Err(err("step must be > 0"));
                }
                if !(a.is_finite() && b.is_finite()) || b < a {
                    return Err(err("start and stop must be finite with start <= stop"));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                if n > 10_000_000 {
                    return Err(err("grid has more than 1e7 points"));
                }
                (0..=n).map(|i| a + i as f64 * h).collect()
            }
            (None, Some(a), Some(b), None, Some(n)) => {
                if n == 0 {
                    return Err(err("points must be >= 1"));
                }
                if !(a.is_finite() && b.is_finite()) || b < a {
                    return Err(err("start and stop must be finite with start <= stop"));
                }
                if n == 1 {
                    vec![a]
                } else {
                    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
                }
            }
            (None, Some(_), Some(_), Some(_), Some(_)) => return Err(err("give either step or points, not both")),
            _ => return Err(err("grid needs values, or start and stop with step or points")),
        };
        if out.is_empty() {
            return Err(err("grid must be non-empty"));
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(err("grid values must be finite"));
        }
        if out.windows(2).any(|w| w[1] < w[0]) {
            return Err(err("grid values must be sorted ascending"));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cooperativity: Option<GridSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<GridSpec>,
    /// Sphere radius or cylinder length.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    #[default]
    Sphere,
    Cylinder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySection {
    #[serde(default)]
    pub shape: Shape,
    /// Cylinder radius (the sphere radius comes from the size grid).
    #[serde(default = "default_cylinder_radius")]
    pub radius: f64,
    #[serde(default)]
    pub beam_waist: f64,
    #[serde(default)]
    pub pair_model: PairModel,
}

fn default_cylinder_radius() -> f64 {
    DEFAULT_CYLINDER_RADIUS
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self { shape: Shape::Sphere, radius: DEFAULT_CYLINDER_RADIUS, beam_waist: 0.0, pair_model: PairModel::Renormalized }
    }
}

impl GeometrySection {
    pub fn at_size(&self, size: f64) -> Geometry {
        match self.shape {
            Shape::Sphere => Geometry::Sphere { radius: size, beam_waist: self.beam_waist },
            Shape::Cylinder => Geometry::Cylinder { radius: self.radius, length: size, beam_waist: self.beam_waist },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_samples() -> usize {
    100_000
}

impl Default for MonteCarloSection {
    fn default() -> Self {
        Self { n_samples: default_samples(), seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
    /// Mantissa digits after the decimal point in scientific notation.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    12
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { path: None, format: Format::Csv, precision: default_precision() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub geometry: GeometrySection,
    #[serde(default)]
    pub monte_carlo: MonteCarloSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let msg = e.message().to_string();
        match unknown_key(&msg) {
            Some(key) => {
                let at = e.span().map_or(0, |r| r.start);
                let path = match enclosing_table(&text[..at]) {
                    Some(table) => format!("{table}.{key}"),
                    None => key,
                };
                ConfigError::field(&path, msg)
            }
            None => ConfigError::Syntax(e.to_string().trim_end().to_string()),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn unknown_key(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("unknown field `")?;
    Some(rest[..rest.find('`')?].to_string())
}

/// Name of the last `[table]` header before the error position.
fn enclosing_table(before: &str) -> Option<String> {
    before.lines().rev().map(str::trim).find_map(|l| {
        let inner = l.strip_prefix('[')?.split(']').next()?;
        Some(inner.trim().to_string())
    })
}

/// Serializes a config back to TOML.
pub fn emit_config(cfg: &RunConfig) -> String {
    toml::to_string(cfg).expect("config is always representable")
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        match (m.cooperativity, m.number_density, m.wavelength) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(ConfigError::field(
                    "model.cooperativity",
                    "cooperativity and number_density/wavelength are mutually exclusive",
                ))
            }
            (Some(c), None, None) => {
                if !c.is_finite() {
                    return Err(ConfigError::field("model.cooperativity", "cooperativity must be finite"));
                }
                if c < 0.0 {
                    return Err(ConfigError::field("model.cooperativity", "cooperativity must be ≥ 0"));
                }
            }
            (None, Some(n), Some(l)) => {
                PhysicalInput::new(n, l).map_err(|e| ConfigError::field("model.number_density", e.to_string()))?;
            }
            (None, Some(_), None) => {
                return Err(ConfigError::field("model.wavelength", "number_density requires wavelength"))
            }
            (None, None, Some(_)) => {
                return Err(ConfigError::field("model.number_density", "wavelength requires number_density"))
            }
            (None, None, None) => {}
        }
        if !m.detuning.is_finite() {
            return Err(ConfigError::field("model.detuning", "detuning must be finite"));
        }
        if !(m.rabi.is_finite() && m.rabi >= 0.0) {
            return Err(ConfigError::field("model.rabi", "rabi must be finite and ≥ 0"));
        }
        self.solver_config()
            .validate()
            .map_err(|e| ConfigError::field("solver", e.to_string()))?;
        for (name, g) in [
            ("grid.detuning", &self.grid.detuning),
            ("grid.cooperativity", &self.grid.cooperativity),
            ("grid.separation", &self.grid.separation),
            ("grid.size", &self.grid.size),
        ] {
            if let Some(g) = g {
                g.expand(name)?;
            }
        }
        if let Some(g) = &self.grid.cooperativity {
            if g.expand("grid.cooperativity")?.iter().any(|c| *c < 0.0) {
                return Err(ConfigError::field("grid.cooperativity", "cooperativity must be ≥ 0"));
            }
        }
        if let Some(g) = &self.grid.separation {
            if g.expand("grid.separation")?.iter().any(|r| *r <= 0.0) {
                return Err(ConfigError::field("grid.separation", "separations must be > 0"));
            }
        }
        if let Some(g) = &self.grid.size {
            for s in g.expand("grid.size")? {
                self.geometry
                    .at_size(s)
                    .validate()
                    .map_err(|e| ConfigError::field("grid.size", e.to_string()))?;
            }
        }
        let geo = &self.geometry;
        if !(geo.radius.is_finite() && geo.radius > 0.0) {
            return Err(ConfigError::field("geometry.radius", "radius must be > 0"));
        }
        if !(geo.beam_waist.is_finite() && geo.beam_waist >= 0.0) {
            return Err(ConfigError::field("geometry.beam_waist", "beam_waist must be ≥ 0"));
        }
        if self.monte_carlo.n_samples == 0 {
            return Err(ConfigError::field("monte_carlo.n_samples", "n_samples must be ≥ 1"));
        }
        if self.output.precision == 0 || self.output.precision > 17 {
            return Err(ConfigError::field("output.precision", "precision must be between 1 and 17"));
        }
        Ok(())
    }

    /// Checks that everything the given command needs is present.
    pub fn validate_for(&self, command: Command) -> Result<(), ConfigError> {
        self.validate()?;
        if command.needs_seed() && self.monte_carlo.seed.is_none() {
            return Err(ConfigError::field("monte_carlo.seed", "a seed is required for this command"));
        }
        if command == Command::EnsembleSweep && !(self.model.rabi > 0.0) {
            return Err(ConfigError::field("model.rabi", "ensemble sweeps need rabi > 0"));
        }
        Ok(())
    }

    pub fn cooperativity(&self) -> f64 {
        match (self.model.cooperativity, self.model.number_density, self.model.wavelength) {
            (Some(c), ..) => c,
            (None, Some(n), Some(l)) => {
                model::cooperativity(&PhysicalInput { number_density: n, wavelength: l, natural_linewidth: None })
                    .expect("validated")
            }
            _ => 0.0,
        }
    }

    pub fn params(&self) -> ModelParams<f64> {
        ModelParams { cooperativity: self.cooperativity(), detuning: self.model.detuning, rabi: self.model.rabi }
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        SolverConfig {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            damping: self.solver.damping,
            strategy: self.solver.strategy,
        }
    }

    fn grid_or(&self, spec: &Option<GridSpec>, field: &str, default: GridSpec) -> Vec<f64> {
        spec.as_ref().unwrap_or(&default).expand(field).expect("validated")
    }

    pub fn detuning_grid(&self) -> Vec<f64> {
        self.grid_or(&self.grid.detuning, "grid.detuning", GridSpec::range(-5.0, 5.0, 0.05))
    }

    pub fn cooperativity_grid(&self) -> Vec<f64> {
        self.grid_or(&self.grid.cooperativity, "grid.cooperativity", GridSpec::range(0.0, 3.0, 0.02))
    }

    pub fn separation_grid(&self) -> Vec<f64> {
        self.grid_or(&self.grid.separation, "grid.separation", GridSpec::range(0.01, 3.0, 0.01))
    }

    pub fn size_grid(&self) -> Vec<f64> {
        let default = match self.geometry.shape {
            Shape::Sphere => GridSpec::range(0.1, 3.0, 0.1),
            Shape::Cylinder => GridSpec::range(0.5, 50.0, 0.5),
        };
        self.grid_or(&self.grid.size, "grid.size", default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("[model]\ncooperativity = 1.0\n").unwrap();
        assert_eq!(cfg.solver.tol, 1e-12);
        assert_eq!(cfg.monte_carlo.n_samples, 100_000);
        assert_eq!(cfg.output.format, Format::Csv);
        assert_eq!(cfg.params().cooperativity, 1.0);
        let empty = parse_config("").unwrap();
        assert_eq!(empty.params().cooperativity, 0.0);
    }

    #[test]
    fn field_errors() {
        let e = parse_config("[model]\ncooperativity = -1.0\n").unwrap_err();
        assert_eq!(e.field_name(), Some("model.cooperativity"));
        assert!(e.to_string().contains("cooperativity must be ≥ 0"));
        let e = parse_config("[model]\ncooperativity = 1.0\nnumber_density = 1e19\nwavelength = 7.8e-7\n").unwrap_err();
        assert!(e.to_string().contains("mutually exclusive"));
        let e = parse_config("[model]\ncoperativity = 1.0\n").unwrap_err();
        assert_eq!(e.field_name(), Some("model.coperativity"));
        let e = parse_config("sed = 1\n").unwrap_err();
        assert_eq!(e.field_name(), Some("sed"));
        let e = parse_config("[solver]\ntol = \"small\"\n").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax(_)));
        let e = parse_config("[grid.detuning]\nstart = 1.0\nstop = 0.0\nstep = 0.1\n").unwrap_err();
        assert_eq!(e.field_name(), Some("grid.detuning"));
        assert!(parse_config("[model\n").is_err());
    }

    #[test]
    fn seed_required_for_ensembles() {
        let cfg = parse_config("[model]\ncooperativity = 1.0\n").unwrap();
        assert!(cfg.validate_for(Command::Solve).is_ok());
        assert_eq!(
            cfg.validate_for(Command::EnsembleSweep).unwrap_err().field_name(),
            Some("monte_carlo.seed")
        );
    }

    #[test]
    fn physical_density_converts() {
        let cfg = parse_config("[model]\nnumber_density = 8e19\nwavelength = 7.8e-7\n").unwrap();
        assert!((cfg.cooperativity() - 1.0).abs() < 0.05);
    }

    #[test]
    fn grids_expand() {
        let g = GridSpec::range(0.0, 3.0, 0.02).expand("g").unwrap();
        assert_eq!(g.len(), 151);
        assert!((g[150] - 3.0).abs() < 1e-12);
        let g = GridSpec { start: Some(-1.0), stop: Some(1.0), points: Some(5), ..GridSpec::default() };
        assert_eq!(g.expand("g").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(GridSpec::values(vec![2.0, 1.0]).expand("g").is_err());
        assert!(GridSpec::values(vec![]).expand("g").is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"
command = "ensemble-sweep"
[model]
cooperativity = 2.0
detuning = -0.25
rabi = 0.001
[grid.size]
start = 0.1
stop = 3.0
step = 0.1
[geometry]
shape = "cylinder"
pair_model = "bare"
[monte_carlo]
seed = 7
n_samples = 2000
[output]
format = "json"
"#;
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&emit_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.command, Some(Command::EnsembleSweep));
    }
}
