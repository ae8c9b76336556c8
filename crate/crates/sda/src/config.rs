//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Values given on the command line replace those from the file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sda_core::{AdaptConfig, CaseKind, Conductivity, ManufacturedCase, QuadratureConfig};

use crate::error::{CliError, CliResult};

pub const KEYS: &[&str] = &[
    "mesh",
    "benchmark",
    "case",
    "out",
    "nu",
    "alpha",
    "rho_g",
    "k11",
    "k12",
    "k22",
    "delta",
    "quad_triangle",
    "quad_edge",
    "quad_data",
    "theta",
    "max_iterations",
    "dof_budget",
    "stop_threshold",
    "levels",
    "scaled_tangential_jump",
];

/// Highest quadrature exactness the core provides.
const MAX_QUAD_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Estimate,
    Adapt,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Estimate => "estimate",
            Command::Adapt => "adapt",
            Command::Convergence => "convergence",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshSource {
    File(PathBuf),
    /// Structured `nx × ny` mesh of the unit square.
    Benchmark { nx: usize, ny: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub mesh: MeshSource,
    pub case: ManufacturedCase,
    pub quadrature: QuadratureConfig,
    /// Marking and stopping for `adapt`; its estimator settings are used by
    /// every command.
    pub adapt: AdaptConfig,
    /// Number of meshes in a `convergence` study.
    pub levels: usize,
    pub out: PathBuf,
}

/// Raw key/value pairs, later sources overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    values: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut kv = KeyValues::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| CliError::Parse {
                path: origin.to_string(),
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            kv.set(key.trim(), value.trim())?;
        }
        Ok(kv)
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Rejects keys outside [`KEYS`].
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KEYS.contains(&key) {
            return Err(CliError::config(key, "unknown key"));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::config(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    pub fn into_config(self, command: Command) -> CliResult<RunConfig> {
        let mesh = match (self.get("mesh"), self.get("benchmark")) {
            (Some(_), Some(_)) => return Err(CliError::config("mesh", "give either mesh or benchmark, not both")),
            (Some(path), None) => {
                let path = PathBuf::from(path);
                if !path.is_file() {
                    return Err(CliError::config("mesh", format!("{} is not a readable file", path.display())));
                }
                MeshSource::File(path)
            }
            (None, Some(size)) => parse_benchmark(size)?,
            (None, None) => return Err(CliError::config("mesh", "missing; set mesh or benchmark")),
        };

        let case_name = self.get("case").ok_or_else(|| CliError::config("case", "missing"))?;
        let kind = CaseKind::from_name(case_name).ok_or_else(|| {
            let names: Vec<_> = CaseKind::ALL.iter().map(|k| k.name()).collect();
            CliError::config("case", format!("unknown case `{case_name}`; expected one of {}", names.join(", ")))
        })?;

        let mut params = kind.default_params();
        let scalars: [(&str, &mut f64); 4] = [
            ("nu", &mut params.nu),
            ("alpha", &mut params.alpha),
            ("rho_g", &mut params.rho_g),
            ("delta", &mut params.delta),
        ];
        for (key, slot) in scalars {
            if let Some(v) = self.parsed(key)? {
                *slot = v;
            }
        }
        let [[k11, k12], [_, k22]] = params.conductivity.matrix().0;
        let k11 = self.parsed("k11")?.unwrap_or(k11);
        let k12 = self.parsed("k12")?.unwrap_or(k12);
        let k22 = self.parsed("k22")?.unwrap_or(k22);
        params.conductivity = Conductivity::new(k11, k12, k22)
            .map_err(|_| CliError::config("k11, k12, k22", "conductivity is not positive definite"))?;
        params.validate().map_err(config_error)?;
        let case = ManufacturedCase::new(kind, params).map_err(config_error)?;

        let mut quadrature = QuadratureConfig::default();
        for (key, slot) in [
            ("quad_triangle", &mut quadrature.triangle),
            ("quad_edge", &mut quadrature.edge),
            ("quad_data", &mut quadrature.data),
        ] {
            if let Some(v) = self.parsed::<usize>(key)? {
                if v > MAX_QUAD_DEGREE {
                    return Err(CliError::config(key, format!("degree {v} exceeds {MAX_QUAD_DEGREE}")));
                }
                *slot = v;
            }
        }

        let mut adapt = AdaptConfig::default();
        adapt.estimator.quadrature = quadrature;
        if let Some(v) = self.parsed("scaled_tangential_jump")? {
            adapt.estimator.scaled_tangential_jump = v;
        }
        if let Some(v) = self.parsed("theta")? {
            adapt.theta = v;
        }
        if let Some(v) = self.parsed("max_iterations")? {
            adapt.max_iterations = v;
        }
        if let Some(v) = self.parsed("dof_budget")? {
            adapt.dof_budget = v;
        }
        if let Some(v) = self.parsed("stop_threshold")? {
            adapt.stop_threshold = v;
        }
        adapt.validate().map_err(config_error)?;

        let levels = self.parsed("levels")?.unwrap_or(4);
        if levels == 0 {
            return Err(CliError::config("levels", "must be at least 1"));
        }
        let out = PathBuf::from(self.get("out").unwrap_or("."));

        Ok(RunConfig { command, mesh, case, quadrature, adapt, levels, out })
    }
}

fn parse_benchmark(size: &str) -> CliResult<MeshSource> {
    let bad = || CliError::config("benchmark", format!("`{size}` is not of the form NXxNY"));
    let (nx, ny) = size.split_once(['x', 'X']).ok_or_else(bad)?;
    let nx: usize = nx.trim().parse().map_err(|_| bad())?;
    let ny: usize = ny.trim().parse().map_err(|_| bad())?;
    if nx == 0 || ny == 0 {
        return Err(CliError::config("benchmark", "sizes must be positive"));
    }
    Ok(MeshSource::Benchmark { nx, ny })
}

fn config_error(e: sda_core::Error) -> CliError {
    match e {
        sda_core::Error::InvalidInput { what, detail } => CliError::config(what, detail),
        other => CliError::Core(other),
    }
}
