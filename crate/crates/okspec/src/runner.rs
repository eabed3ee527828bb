//! Experiment pipeline: norms, spectra, Okounkov values and limit laws per
//! level, rendered into a deterministic artifact bundle.

use std::path::Path;

use okspec_core::hermitian::ScalarKind;
use okspec_core::laws::{self, ConvergenceOptions, ConvergenceReport, LevelLaw};
use okspec_core::linalg::CMat;
use okspec_core::norms::NormOracle;
use okspec_core::okounkov::MonomialOrder;
use okspec_core::series::{
    analyze_level, level_norms, okounkov_energy, Backend, Discretization, LevelNorms, LevelResult, NormKind,
    OkounkovEnergy, PieceNorm, QuadratureMeasure, SampleGrid,
};
use okspec_core::SpectralMeasure;
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{hex, AGrid, ExperimentConfig};
use crate::error::{RunError, Stage};
use crate::formats::SampledWeight;

pub fn kind_name(kind: NormKind) -> &'static str {
    match kind {
        NormKind::Sup => "sup",
        NormKind::L2 => "l2",
    }
}

/// Results for one norm kind across the schedule.
#[derive(Debug, Clone)]
pub struct KindResults {
    pub kind: NormKind,
    pub levels: Vec<LevelResult>,
    pub convergence: ConvergenceReport,
    pub okounkov: OkounkovEnergy,
}

impl KindResults {
    pub fn laws(&self) -> Vec<LevelLaw> {
        self.levels.iter().map(|r| LevelLaw { n: r.n, rank: r.rank(), law: r.law() }).collect()
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub a_grid: Vec<f64>,
    pub kinds: Vec<KindResults>,
}

/// Worker count from `OKSPEC_THREADS`, when set to a positive integer.
fn thread_cap() -> Option<usize> {
    std::env::var("OKSPEC_THREADS").ok()?.trim().parse().ok().filter(|&k| k > 0)
}

fn discretization(cfg: &ExperimentConfig, n: usize) -> Result<Discretization, RunError> {
    let variety = cfg.backend.variety();
    let grid = cfg
        .grid
        .map(|g| SampleGrid::polar(variety, g.radial, g.angular, g.radius))
        .transpose()
        .map_err(|e| RunError::config(Stage::Config, e.to_string()))?;
    let quadrature = match cfg.quadrature {
        Some(q) => Some(
            QuadratureMeasure::fubini_study(variety, q.radial, q.angular)
                .map_err(|e| RunError::config(Stage::Config, e.to_string()))?,
        ),
        None => Some(QuadratureMeasure::default_for(variety, n)),
    };
    let mut disc = Discretization { grid, quadrature, ..Discretization::default() };
    disc.ellipsoid.seed = cfg.seed;
    Ok(disc)
}

/// Sup norms over the nodes of a sampled weight, with the other weight
/// evaluated at the same nodes. No refinement test is possible.
fn sampled_level_norms(
    cfg: &ExperimentConfig,
    n: usize,
    phi: &Sampled,
    psi: &Sampled,
    order: &MonomialOrder,
) -> Result<LevelNorms, String> {
    let nodes = match (phi, psi) {
        (Sampled::Grid(a), Sampled::Grid(b)) if a.points != b.points => {
            return Err("sampled weights for φ and ψ must share their nodes".into())
        }
        (Sampled::Grid(a), _) | (_, Sampled::Grid(a)) => &a.points,
        _ => unreachable!("at least one weight is sampled"),
    };
    let backend = Backend::new(cfg.backend.variety(), n);
    let piece = backend.full_piece(order);
    let uphi = phi.values(nodes);
    let uq = psi.values(nodes);
    let oracle = |u: &[f64]| -> Result<PieceNorm, String> {
        let mut rows = CMat::zeros(nodes.len(), backend.rank());
        for (q, x) in nodes.iter().enumerate() {
            let f = (-(n as f64) * u[q]).exp();
            for (k, v) in backend.eval_monomials(x).into_iter().enumerate() {
                rows[(q, k)] = v * f;
            }
        }
        let o = NormOracle::functionals(ScalarKind::Complex, rows).map_err(|e| e.to_string())?;
        PieceNorm::from_oracle(&piece, &o).map_err(|e| e.to_string())
    };
    let distortion = n as f64 * uphi.iter().zip(&uq).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(LevelNorms {
        n,
        kind: NormKind::Sup,
        phi: oracle(&uphi)?,
        psi: oracle(&uq)?,
        piece,
        refinement_defect: f64::NAN,
        distortion,
    })
}

enum Sampled {
    Analytic(okspec_core::series::MetricWeight),
    Grid(SampledWeight),
}

impl Sampled {
    fn values(&self, nodes: &[Vec<okspec_core::linalg::C64>]) -> Vec<f64> {
        match self {
            Sampled::Analytic(w) => nodes.iter().map(|x| w.weight(x)).collect(),
            Sampled::Grid(g) => g.values.clone(),
        }
    }
}

fn weight(cfg: &ExperimentConfig, spec: &crate::config::WeightSpec) -> Result<Sampled, RunError> {
    match cfg.sampled(spec)? {
        Some(g) => Ok(Sampled::Grid(g)),
        None => Ok(Sampled::Analytic(
            spec.analytic().map_err(|e| RunError::config(Stage::Config, e))?.expect("analytic weight"),
        )),
    }
}

fn compute_level(
    cfg: &ExperimentConfig,
    kind: NormKind,
    n: usize,
    phi: &Sampled,
    psi: &Sampled,
) -> Result<LevelResult, RunError> {
    let order = MonomialOrder::new(cfg.order.kind(), cfg.backend.variety().dim());
    let disc = discretization(cfg, n)?;
    let kname = kind_name(kind).to_string();
    let norms = match (phi, psi) {
        (Sampled::Analytic(a), Sampled::Analytic(b)) => {
            level_norms(cfg.backend.variety(), n, a, b, kind, &order, &disc)
                .map_err(|e| RunError::numerical(Stage::Norms { n, kind: kname.clone() }, e))?
        }
        _ => sampled_level_norms(cfg, n, phi, psi, &order)
            .map_err(|e| RunError::numerical(Stage::Norms { n, kind: kname.clone() }, e))?,
    };
    analyze_level(&norms, &disc.ellipsoid).map_err(|e| RunError::numerical(Stage::Spectrum { n, kind: kname }, e))
}

fn resolve_a_grid(cfg: &ExperimentConfig, levels: &[LevelResult]) -> Vec<f64> {
    match &cfg.a_grid {
        AGrid::Explicit(v) => {
            let mut v = v.clone();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        }
        AGrid::Auto { points } => {
            let bound = levels.iter().map(|r| r.distortion / r.n as f64).fold(0.0, f64::max);
            laws::a_grid(bound, *points)
        }
    }
}

/// Runs every level of every requested norm kind, then the diagnostics.
pub fn compute(cfg: &ExperimentConfig) -> Result<Experiment, RunError> {
    cfg.validate()?;
    let phi = weight(cfg, &cfg.phi)?;
    let psi = weight(cfg, &cfg.psi)?;
    let kinds = cfg.norm.kinds();
    let jobs: Vec<(NormKind, usize)> =
        kinds.iter().flat_map(|&k| cfg.n_schedule.iter().map(move |&n| (k, n))).collect();
    let work = || -> Vec<Result<LevelResult, RunError>> {
        jobs.par_iter().map(|&(k, n)| compute_level(cfg, k, n, &phi, &psi)).collect()
    };
    let results = match thread_cap() {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| RunError::config(Stage::Config, e.to_string()))?
            .install(work),
        None => work(),
    };
    let results: Vec<LevelResult> = results.into_iter().collect::<Result<_, _>>()?;
    let a_grid = resolve_a_grid(cfg, &results);
    let mut out = Vec::new();
    for (i, &kind) in kinds.iter().enumerate() {
        let s = cfg.n_schedule.len();
        let levels: Vec<LevelResult> = results[i * s..(i + 1) * s].to_vec();
        // Surrogate slopes may leave the distortion bound by their certified spread.
        let bound = levels.iter().map(|r| (r.distortion + r.budget) / r.n as f64).fold(0.0, f64::max);
        let opts = ConvergenceOptions { tolerance: cfg.tolerance, window: cfg.window, bound: Some(bound) };
        let laws_k: Vec<LevelLaw> = levels.iter().map(|r| LevelLaw { n: r.n, rank: r.rank(), law: r.law() }).collect();
        let convergence =
            laws::convergence_report(&laws_k, &a_grid, &opts).map_err(|e| RunError::numerical(Stage::Laws, e))?;
        let okounkov = okounkov_energy(&levels, cfg.backend.variety().dim(), cfg.energy_grid, cfg.seed)
            .map_err(|e| RunError::numerical(Stage::Okounkov, e))?;
        out.push(KindResults { kind, levels, convergence, okounkov });
    }
    Ok(Experiment { config: cfg.clone(), a_grid, kinds: out })
}

/// Output files by name, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub files: Vec<(String, Vec<u8>)>,
}

impl Bundle {
    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    pub fn write(&self, dir: &Path) -> Result<(), RunError> {
        let err = |e: std::io::Error| RunError::config(Stage::Output, format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(err)?;
        for (name, bytes) in &self.files {
            std::fs::write(dir.join(name), bytes).map_err(err)?;
        }
        Ok(())
    }

    /// SHA-256 over all file names and contents.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (name, bytes) in &self.files {
            h.update(name.as_bytes());
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(bytes);
        }
        hex(&h.finalize())
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Shortest round-trip decimal, or `NaN`; negative zero prints as `0.0`.
fn num(x: f64) -> String {
    format!("{:?}", x + 0.0)
}

pub fn spectra_csv(exp: &Experiment) -> Vec<u8> {
    let mut rows = Vec::new();
    for k in &exp.kinds {
        for r in &k.levels {
            for (i, &mu) in r.slopes.slopes().iter().enumerate() {
                rows.push(vec![kind_name(k.kind).into(), r.n.to_string(), i.to_string(), num(mu), num(mu / r.n as f64)]);
            }
        }
    }
    csv_bytes(&["norm", "n", "index", "slope", "normalized_slope"], rows)
}

pub fn polygons_csv(exp: &Experiment) -> Vec<u8> {
    let mut rows = Vec::new();
    for k in &exp.kinds {
        for r in &k.levels {
            let law = r.law();
            let rank = r.rank();
            for i in 0..=rank {
                let t = i as f64 / rank as f64;
                rows.push(vec![kind_name(k.kind).into(), r.n.to_string(), num(t), num(law.polygon_at(t))]);
            }
        }
    }
    csv_bytes(&["norm", "n", "t", "polygon"], rows)
}

pub fn values_csv(exp: &Experiment) -> Vec<u8> {
    let d = exp.config.backend.variety().dim();
    let mut header = vec!["norm".to_string(), "n".to_string()];
    header.extend((1..=d).map(|j| format!("alpha_{j}")));
    header.extend(["phi".to_string(), "psi".to_string()]);
    let mut rows = Vec::new();
    for k in &exp.kinds {
        for r in &k.levels {
            for (a, (p, q)) in r.exponents.iter().zip(r.phi_values.iter().zip(&r.psi_values)) {
                let mut row = vec![kind_name(k.kind).to_string(), r.n.to_string()];
                row.extend(a.iter().map(|x| x.to_string()));
                row.extend([num(*p), num(*q)]);
                rows.push(row);
            }
        }
    }
    let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    csv_bytes(&h, rows)
}

pub fn cdf_csv(exp: &Experiment) -> Vec<u8> {
    let mut rows = Vec::new();
    for k in &exp.kinds {
        let name = kind_name(k.kind);
        for r in &k.levels {
            let law = r.law();
            for &a in &exp.a_grid {
                rows.push(vec![name.into(), format!("n={}", r.n), num(a), num(law.cdf(a))]);
            }
        }
        for &(t, c) in &k.convergence.extrapolated_cdf {
            rows.push(vec![name.into(), "extrapolated".into(), num(t), num(c)]);
        }
        let diff = SpectralMeasure::uniform(&k.okounkov.differences);
        for &a in &exp.a_grid {
            rows.push(vec![name.into(), "okounkov".into(), num(a), num(diff.cdf(a))]);
        }
    }
    csv_bytes(&["norm", "source", "t", "cdf"], rows)
}

fn convergence_json(c: &ConvergenceReport) -> Value {
    json!({
        "levels": c.levels,
        "mean_slopes": c.mean_slopes,
        "truncated_means": c.truncated_means,
        "kolmogorov_steps": c.kolmogorov_steps,
        "polygon_steps": c.polygon_steps,
        "cauchy_increments": c.cauchy_increments,
        "budgets": c.budgets,
        "extrapolated_means": c.extrapolated_means,
        "energy_estimate": c.energy_estimate,
        "converged": c.converged,
        "note": c.note,
    })
}

/// Agreement between the sup and L² runs at the top level.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub n: usize,
    pub truncated_mean_difference: f64,
    /// `(ln(dim) / 2 + ln 2) / n`.
    pub bound: f64,
    pub extrapolated_kolmogorov: f64,
}

pub fn compare(exp: &Experiment) -> Option<Comparison> {
    let sup = exp.kinds.iter().find(|k| k.kind == NormKind::Sup)?;
    let l2 = exp.kinds.iter().find(|k| k.kind == NormKind::L2)?;
    let (a, b) = (sup.levels.last()?, l2.levels.last()?);
    let tm_a = sup.convergence.truncated_means.last()?;
    let tm_b = l2.convergence.truncated_means.last()?;
    let truncated_mean_difference = tm_a.iter().zip(tm_b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let extrapolated_kolmogorov = sup
        .convergence
        .extrapolated_cdf
        .iter()
        .zip(&l2.convergence.extrapolated_cdf)
        .map(|(x, y)| (x.1 - y.1).abs())
        .fold(0.0, f64::max);
    Some(Comparison {
        n: a.n,
        truncated_mean_difference,
        bound: (0.5 * (b.rank() as f64).ln() + 2f64.ln()) / a.n as f64,
        extrapolated_kolmogorov,
    })
}

pub fn report_json(exp: &Experiment) -> Value {
    let kinds: Vec<Value> = exp
        .kinds
        .iter()
        .map(|k| {
            let levels: Vec<Value> = k
                .levels
                .iter()
                .map(|r| {
                    let law = r.law();
                    json!({
                        "n": r.n,
                        "rank": r.rank(),
                        "mean_slope": r.mean_slope(),
                        "degree": r.slopes.degree(),
                        "min_normalized_slope": law.min(),
                        "max_normalized_slope": law.max(),
                        "surrogate_budget": r.budget,
                        "refinement_defect": r.refinement_defect,
                        "distortion": r.distortion,
                    })
                })
                .collect();
            let e = &k.okounkov;
            json!({
                "norm": kind_name(k.kind),
                "levels": levels,
                "convergence": convergence_json(&k.convergence),
                "okounkov": {
                    "estimate": e.estimate,
                    "phi_mean": e.phi_mean,
                    "psi_mean": e.psi_mean,
                    "levels": e.levels,
                    "support": e.differences.len(),
                },
                "energy_gap": (k.convergence.mean_slopes.last().copied().unwrap_or(f64::NAN) - e.estimate).abs(),
            })
        })
        .collect();
    let comparison = compare(exp).map(|c| {
        json!({
            "n": c.n,
            "truncated_mean_difference": c.truncated_mean_difference,
            "bound": c.bound,
            "extrapolated_kolmogorov": c.extrapolated_kolmogorov,
        })
    });
    json!({
        "config_sha256": exp.config.hash(),
        "a_grid": exp.a_grid,
        "norms": kinds,
        "comparison": comparison,
    })
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("JSON serializes");
    s.push(b'\n');
    s
}

pub fn render(exp: &Experiment) -> Bundle {
    let mut files = vec![
        ("spectra.csv".to_string(), spectra_csv(exp)),
        ("polygons.csv".to_string(), polygons_csv(exp)),
        ("cdf.csv".to_string(), cdf_csv(exp)),
        ("values.csv".to_string(), values_csv(exp)),
        ("report.json".to_string(), pretty(&report_json(exp))),
    ];
    let outputs: serde_json::Map<String, Value> =
        files.iter().map(|(n, b)| (n.clone(), Value::String(hex(&Sha256::digest(b))))).collect();
    let inputs: serde_json::Map<String, Value> =
        exp.config.input_hashes().into_iter().map(|(k, v)| (k, Value::String(v))).collect();
    let config: Value = serde_json::from_str(&exp.config.canonical_json()).expect("canonical JSON parses");
    let manifest = json!({
        "config": config,
        "config_sha256": exp.config.hash(),
        "versions": {
            "okspec": env!("CARGO_PKG_VERSION"),
            "okspec-core": okspec_core::VERSION,
        },
        "inputs": inputs,
        "outputs": outputs,
    });
    files.push(("manifest.json".to_string(), pretty(&manifest)));
    Bundle { files }
}

/// Computes and renders; writes the bundle when the config names an output
/// directory.
pub fn run(cfg: &ExperimentConfig) -> Result<Bundle, RunError> {
    let exp = compute(cfg)?;
    let bundle = render(&exp);
    if let Some(dir) = &cfg.out {
        bundle.write(dir)?;
    }
    Ok(bundle)
}
