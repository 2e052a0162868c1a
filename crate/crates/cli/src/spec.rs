use std::path::PathBuf;

use serde::Serialize;
use symwrap::EmbeddingConfig;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Sections,
    Topology,
    Plot,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Sections => "sections",
            Command::Topology => "topology",
            Command::Plot => "plot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    Pgm,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "pgm" => Ok(Format::Pgm),
            other => Err(CliError::Usage(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub symplectic: f64,
    pub symplectic_fd: f64,
    pub injectivity_image: f64,
    pub injectivity_separation: f64,
    pub mc_sigmas: f64,
    pub fubini_mc: f64,
    pub fubini_analytic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symplectic: 1e-8,
            symplectic_fd: 1e-4,
            injectivity_image: 1e-7,
            injectivity_separation: 1e-3,
            mc_sigmas: 3.0,
            fubini_mc: 0.02,
            fubini_analytic: 1e-12,
        }
    }
}

/// Fully resolved parameters of one run; echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub command: Command,
    pub n: usize,
    pub c: f64,
    pub a: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub symplectic_samples: usize,
    pub cell_samples: usize,
    pub spot_checks: usize,
    pub resolutions: Vec<usize>,
    pub grid: [usize; 2],
    pub z: Option<Vec<f64>>,
    pub fixture: Option<String>,
    pub hull: bool,
    pub witness_steps: usize,
    pub formats: Vec<Format>,
    pub out: PathBuf,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub timings: bool,
}

impl RunSpec {
    pub fn config(&self) -> Result<EmbeddingConfig, CliError> {
        Ok(EmbeddingConfig::new(self.n, self.c)?)
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Checks that do not need any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        self.config()?;
        if let Some(a) = self.a {
            if !(a > 0.0 && a <= 1.0) {
                return Err(CliError::Usage(format!("a = {a}, need 0 < a <= 1")));
            }
            if (1.0 / a - self.c).abs() > 1e-12 * self.c {
                return Err(CliError::Usage(format!("a = {a} conflicts with c = {}", self.c)));
            }
        }
        if self.grid[0] == 0 || self.grid[1] == 0 {
            return Err(CliError::Usage("grid dimensions must be positive".into()));
        }
        if self.resolutions.is_empty() {
            return Err(CliError::Usage("need at least one raster resolution".into()));
        }
        if let Some(z) = &self.z {
            if z.len() != 2 {
                return Err(CliError::Usage("--z takes two coordinates X,Y".into()));
            }
        }
        if self.hull && self.a.is_none() {
            return Err(CliError::Usage("--hull needs --a".into()));
        }
        if self.samples == 0 || self.symplectic_samples == 0 {
            return Err(CliError::Usage("sample counts must be positive".into()));
        }
        Ok(())
    }
}

/// Parses sample counts written as integers or in float notation (`1e6`).
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let v: f64 = s.parse().map_err(|_| format!("not a count: {s:?}"))?;
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("not a non-negative integer: {s:?}"))
    }
}

/// Parses `WxH`.
pub fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got {s:?}"))?;
    let w = w.trim().parse().map_err(|_| format!("bad grid width in {s:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad grid height in {s:?}"))?;
    Ok([w, h])
}

/// Parses a comma-separated list of reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}")))
        .collect()
}
