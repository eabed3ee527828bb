//! Experiment configuration.

use std::path::{Path, PathBuf};

use okspec_core::linalg::C64;
use okspec_core::okounkov::OrderKind;
use okspec_core::series::{MetricWeight, NormKind, QuadratureMeasure, SampleGrid, Variety};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{RunError, Stage};
use crate::formats::{self, SampledWeight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BackendSpec {
    P1,
    P2,
}

impl BackendSpec {
    pub fn variety(self) -> Variety {
        match self {
            BackendSpec::P1 => Variety::P1,
            BackendSpec::P2 => Variety::P2,
        }
    }
}

/// A complex number written as `x` or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl Complex {
    pub fn value(self) -> C64 {
        match self {
            Complex::Real(x) => C64::new(x, 0.0),
            Complex::Pair([re, im]) => C64::new(re, im),
        }
    }
}

fn fubini_study() -> Box<WeightSpec> {
    Box::new(WeightSpec::FubiniStudy)
}

/// A metric on `O(1)`. `dilate` multiplies pointwise norms by `e^c` and
/// `bump` by `e^{height b}` for a bump `b` of the chordal distance to `center`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    FubiniStudy,
    MaxLog,
    Dilate {
        #[serde(default = "fubini_study")]
        base: Box<WeightSpec>,
        c: f64,
    },
    Bump {
        #[serde(default = "fubini_study")]
        base: Box<WeightSpec>,
        center: Vec<Complex>,
        height: f64,
        radius: f64,
    },
    Max {
        a: Box<WeightSpec>,
        b: Box<WeightSpec>,
    },
    /// Chart-tagged CSV grid of weight values; sup norms only.
    Csv {
        path: PathBuf,
    },
}

impl WeightSpec {
    pub fn is_sampled(&self) -> bool {
        matches!(self, WeightSpec::Csv { .. })
    }

    /// The analytic weight; `None` for sampled weights.
    pub fn analytic(&self) -> Result<Option<MetricWeight>, String> {
        Ok(Some(match self {
            WeightSpec::FubiniStudy => MetricWeight::FubiniStudy,
            WeightSpec::MaxLog => MetricWeight::MaxLog,
            WeightSpec::Dilate { base, c } => inner(base)?.dilated(*c),
            WeightSpec::Bump { base, center, height, radius } => inner(base)?
                .bump(center.iter().map(|z| z.value()).collect(), *height, *radius)
                .map_err(|e| e.to_string())?,
            WeightSpec::Max { a, b } => inner(a)?.max(inner(b)?),
            WeightSpec::Csv { .. } => return Ok(None),
        }))
    }

    fn check(&self, variety: Variety) -> Result<(), String> {
        match self {
            WeightSpec::Bump { base, center, .. } => {
                if center.len() != variety.coords() {
                    return Err(format!("bump center needs {} homogeneous coordinates", variety.coords()));
                }
                base.check(variety)
            }
            WeightSpec::Dilate { base, .. } => base.check(variety),
            WeightSpec::Max { a, b } => {
                a.check(variety)?;
                b.check(variety)
            }
            _ => Ok(()),
        }
    }
}

fn inner(w: &WeightSpec) -> Result<MetricWeight, String> {
    w.analytic()?.ok_or_else(|| "sampled weights cannot be combined".to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    Sup,
    L2,
    Both,
}

impl NormChoice {
    pub fn kinds(self) -> Vec<NormKind> {
        match self {
            NormChoice::Sup => vec![NormKind::Sup],
            NormChoice::L2 => vec![NormKind::L2],
            NormChoice::Both => vec![NormKind::Sup, NormKind::L2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OrderChoice {
    Grlex,
    Grevlex,
    Lex,
}

impl OrderChoice {
    pub fn kind(self) -> OrderKind {
        match self {
            OrderChoice::Grlex => OrderKind::GradedLex,
            OrderChoice::Grevlex => OrderKind::GradedReverseLex,
            OrderChoice::Lex => OrderKind::Lex,
        }
    }
}

/// Truncation levels for the limit-law diagnostics: an explicit list, or
/// `points` equispaced values on `[-M, M]` with `M` the distortion bound plus one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AGrid {
    Explicit(Vec<f64>),
    Auto { points: usize },
}

impl Default for AGrid {
    fn default() -> Self {
        AGrid::Auto { points: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub radial: usize,
    pub angular: usize,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

fn default_energy_grid() -> usize {
    256
}

fn default_tolerance() -> f64 {
    5e-2
}

fn default_window() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub backend: BackendSpec,
    pub phi: WeightSpec,
    pub psi: WeightSpec,
    pub norm: NormChoice,
    pub order: OrderChoice,
    pub n_schedule: Vec<usize>,
    #[serde(default)]
    pub a_grid: AGrid,
    pub seed: u64,
    /// Not part of the experiment: excluded from the canonical form.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
    /// Sup-norm grid; the backend default when absent.
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// L² quadrature; a level-dependent default when absent.
    #[serde(default)]
    pub quadrature: Option<QuadratureSpec>,
    /// Cells per axis for the G-functions of the Okounkov-side estimate.
    #[serde(default = "default_energy_grid")]
    pub energy_grid: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_window")]
    pub window: usize,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub n_max: Option<usize>,
    pub order: Option<OrderChoice>,
    pub norm: Option<NormChoice>,
}

fn config_error(msg: impl Into<String>) -> RunError {
    RunError::config(Stage::Config, msg)
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| config_error(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Makes CSV weight paths relative to the directory of the config file.
    fn resolve_paths(&mut self, dir: &Path) {
        for w in [&mut self.phi, &mut self.psi] {
            if let WeightSpec::Csv { path } = w {
                if path.is_relative() {
                    *path = dir.join(&*path);
                }
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.out = Some(out.clone());
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(n) = o.n_max {
            self.n_schedule.retain(|&m| m <= n);
        }
        if let Some(order) = o.order {
            self.order = order;
        }
        if let Some(norm) = o.norm {
            self.norm = norm;
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let variety = self.backend.variety();
        if self.n_schedule.is_empty() {
            return Err(config_error("n_schedule is empty"));
        }
        if self.n_schedule.windows(2).any(|w| w[0] >= w[1]) || self.n_schedule[0] == 0 {
            return Err(config_error("n_schedule must be positive and strictly increasing"));
        }
        for w in [&self.phi, &self.psi] {
            w.check(variety).map_err(config_error)?;
            w.analytic().map_err(config_error)?;
        }
        if (self.phi.is_sampled() || self.psi.is_sampled()) && self.norm != NormChoice::Sup {
            return Err(config_error("CSV weights support sup norms only"));
        }
        match &self.a_grid {
            AGrid::Explicit(v) if v.is_empty() || v.iter().any(|a| !a.is_finite()) => {
                return Err(config_error("a_grid must be a non-empty list of finite values"))
            }
            AGrid::Auto { points } if *points < 2 => return Err(config_error("a_grid needs at least two points")),
            _ => {}
        }
        if let Some(g) = self.grid {
            SampleGrid::polar(variety, g.radial, g.angular, g.radius).map_err(|e| config_error(e.to_string()))?;
        }
        if let Some(q) = self.quadrature {
            QuadratureMeasure::fubini_study(variety, q.radial, q.angular).map_err(|e| config_error(e.to_string()))?;
        }
        if self.energy_grid == 0 || !(self.tolerance > 0.0) || self.window == 0 {
            return Err(config_error("energy_grid, tolerance and window must be positive"));
        }
        Ok(())
    }

    /// Canonical JSON, the input of [`ExperimentConfig::hash`].
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("configuration serializes")
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.canonical_json().as_bytes()))
    }

    /// SHA-256 of every CSV weight file, keyed by path.
    pub fn input_hashes(&self) -> Vec<(String, String)> {
        [&self.phi, &self.psi]
            .into_iter()
            .filter_map(|w| match w {
                WeightSpec::Csv { path } => {
                    let bytes = std::fs::read(path).ok()?;
                    Some((path.display().to_string(), hex(&Sha256::digest(&bytes))))
                }
                _ => None,
            })
            .collect()
    }

    pub fn sampled(&self, which: &WeightSpec) -> Result<Option<SampledWeight>, RunError> {
        match which {
            WeightSpec::Csv { path } => formats::read_sampled_weight(path, self.backend.variety())
                .map(Some)
                .map_err(|e| RunError::config(Stage::Config, e)),
            _ => Ok(None),
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "backend": "P1",
        "phi": {"kind": "fubini-study"},
        "psi": {"kind": "bump", "center": [1, 1], "height": 0.1, "radius": 1.0},
        "norm": "both",
        "order": "lex",
        "n_schedule": [5, 10, 20, 40],
        "seed": 7
    }"#;

    #[test]
    fn parses_and_validates() {
        let cfg = ExperimentConfig::from_json(EXAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.a_grid, AGrid::Auto { points: 64 });
        assert_eq!(cfg.energy_grid, 256);
        let w = cfg.psi.analytic().unwrap().unwrap();
        assert!(matches!(w, MetricWeight::Bump { .. }));
    }

    #[test]
    fn seed_is_mandatory() {
        let text = EXAMPLE.replace(",\n        \"seed\": 7", "");
        let err = ExperimentConfig::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn overrides_take_precedence() {
        let mut cfg = ExperimentConfig::from_json(EXAMPLE).unwrap();
        let before = cfg.hash();
        cfg.apply(&Overrides { n_max: Some(20), seed: Some(9), norm: Some(NormChoice::L2), ..Default::default() });
        assert_eq!(cfg.n_schedule, vec![5, 10, 20]);
        assert_eq!((cfg.seed, cfg.norm), (9, NormChoice::L2));
        assert_ne!(cfg.hash(), before);
    }

    #[test]
    fn rejects_bad_schedules_and_centers() {
        let mut cfg = ExperimentConfig::from_json(EXAMPLE).unwrap();
        cfg.n_schedule = vec![10, 5];
        assert!(cfg.validate().is_err());
        let text = EXAMPLE.replace("[1, 1]", "[1, 1, 0]");
        assert!(ExperimentConfig::from_json(&text).unwrap().validate().is_err());
    }
}
