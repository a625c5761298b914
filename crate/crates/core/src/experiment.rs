//! Multi-seed experiment orchestration with file-based reporting.
//!
//! An [`ExperimentSpec`] names a model template, a seed list and the analyses
//! to run. Each `(seed, analysis)` pair writes its own JSON (and CSV where
//! tabular) under `out_dir/seed-<seed>/`; every JSON payload carries the exact
//! [`ModelConfig`] it was computed from. `index.json` lists the artifacts,
//! including the ones that failed, and echoes the spec.
//!
//! Nothing time-dependent is written, so rerunning an experiment reproduces every
//! file byte for byte.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{default_probes, generate, trial_seed, ModelConfig, ModelKind};
use crate::graph::{DegreeKind, EvolvingGraph, VertexId};
use crate::metrics::{
    analytic_fk, concentration_report, connected_components, degree_histogram, diameter, fit_power_law_exponent,
    median, urt_stats, CommunityCriteria, DegreeHistogram, DiameterMode, PowerLawFit, SpatialView, TreeEdges,
};
use crate::params::{derive_parameters, t_r};
use crate::sphere::{cap_area, AngularRadius};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "GEOPA_OUT_DIR";
const DEFAULT_OUT_DIR: &str = "geopa-out";
const CENTER_STREAM: u64 = 0x4345_4e54;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Degrees,
    Diameter,
    Communities,
    Expander,
    Concentration,
    Tree,
}

impl Analysis {
    pub fn as_str(self) -> &'static str {
        match self {
            Analysis::Degrees => "degrees",
            Analysis::Diameter => "diameter",
            Analysis::Communities => "communities",
            Analysis::Expander => "expander",
            Analysis::Concentration => "concentration",
            Analysis::Tree => "tree",
        }
    }
}

/// Where community and expander centres are drawn from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterPool {
    #[default]
    AllVertices,
    LargestComponent,
}

/// Tunable constants of the analyses. Every field has a default, so `{}` is
/// a valid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Knobs {
    /// Community scale exponent: `r_0 = n^{-1/2}(ln n)^{c0}`, `R_0` likewise with `2 c0`.
    pub c0: f64,
    /// Concentration time exponent used by `t_r`.
    pub c1: f64,
    /// Histogram degree; defaults to the plain degree for the hybrid model
    /// and the total degree otherwise.
    pub degree_kind: Option<DegreeKind>,
    pub k_min: usize,
    /// `f_k` is compared on `k in [m, m + fk_span]`.
    pub fk_span: usize,
    pub diameter_mode: DiameterMode,
    pub centers: usize,
    pub center_pool: CenterPool,
    /// Community radius; defaults to `R_0`.
    pub community_radius: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    /// Upper size bound of a community; defaults to `n`.
    pub size_cap: Option<f64>,
    pub min_size: usize,
    /// Expander radii; default `r/10` and `n^{-0.2}`.
    pub expander_radii: Vec<f64>,
    pub probes: usize,
}

impl Default for Knobs {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 0.5,
            degree_kind: None,
            k_min: 10,
            fk_span: 15,
            diameter_mode: DiameterMode::ComponentWise,
            centers: 50,
            center_pool: CenterPool::AllVertices,
            community_radius: None,
            alpha: 1.0,
            beta: 0.0,
            size_cap: None,
            min_size: 1,
            expander_radii: Vec::new(),
            probes: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Template; its `seed` is replaced by each entry of `seeds`.
    pub config: ModelConfig,
    pub seeds: Vec<u64>,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub knobs: Knobs,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.analyses.is_empty() {
            return bad("at least one analysis must be selected");
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required");
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        if seeds.windows(2).any(|w| w[0] == w[1]) {
            return bad("seeds must be distinct");
        }
        self.config.validate()?;
        if !(self.knobs.c0 > 0.0 && self.knobs.c1 > 0.0) {
            return bad("c0 and c1 must be positive");
        }
        Ok(())
    }

    /// `out_dir`, else `$GEOPA_OUT_DIR`, else `./geopa-out`.
    pub fn resolved_out_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    fn degree_kind(&self) -> DegreeKind {
        self.knobs.degree_kind.unwrap_or(match self.config.model {
            ModelKind::Hybrid => DegreeKind::Plain,
            _ => DegreeKind::Total,
        })
    }
}

/// `{t_r, 2 t_r, ...}` capped at `n`, always ending in `n`. When `t_r > n` the
/// schedule degenerates to `[n]` and the flag is set.
pub fn checkpoint_schedule(n: usize, t_r: f64) -> (Vec<usize>, bool) {
    let step = t_r.ceil().max(1.0);
    if step > n as f64 {
        return (vec![n], true);
    }
    let step = step as usize;
    let mut out: Vec<usize> = (1..).map(|i| i * step).take_while(|&t| t <= n).collect();
    if out.last() != Some(&n) {
        out.push(n);
    }
    (out, false)
}

/// Up to `count` distinct centres, drawn without replacement from the pool
/// on a sub-stream of `seed`.
pub fn sample_centers(g: &EvolvingGraph, count: usize, seed: u64, pool: CenterPool) -> Vec<VertexId> {
    let candidates: Vec<VertexId> = match pool {
        CenterPool::AllVertices => (0..g.vertex_count()).collect(),
        CenterPool::LargestComponent => connected_components(g).into_iter().next().unwrap_or_default(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(seed, CENTER_STREAM));
    let k = count.min(candidates.len());
    sample(&mut rng, candidates.len(), k)
        .into_iter()
        .map(|i| candidates[i])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FkRow {
    pub k: usize,
    pub empirical: f64,
    pub analytic: f64,
    /// `|empirical - analytic| / analytic`.
    pub relative_error: f64,
}

/// Empirical `d_k / n` against the closed form on `k in [m, m + span]`.
pub fn fk_comparison(h: &DegreeHistogram, m: usize, xi: f64, delta: f64, span: usize) -> Result<Vec<FkRow>> {
    (m..=m + span)
        .map(|k| {
            let analytic = analytic_fk(k, m, xi, delta)?;
            let empirical = h.proportion(k);
            Ok(FkRow {
                k,
                empirical,
                analytic,
                relative_error: (empirical - analytic).abs() / analytic,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub seed: u64,
    pub analysis: Analysis,
    /// Paths relative to the output directory.
    pub files: Vec<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedFit {
    pub seed: u64,
    pub fit: Option<PowerLawFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeAggregate {
    pub degree_kind: DegreeKind,
    pub k_min: usize,
    pub per_seed: Vec<SeedFit>,
    pub pooled: Option<PowerLawFit>,
    pub pooled_error: Option<String>,
    pub pooled_fk: Vec<FkRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentIndex {
    pub spec: ExperimentSpec,
    pub out_dir: PathBuf,
    pub artifacts: Vec<ArtifactRecord>,
    pub aggregates: Vec<String>,
}

#[derive(Serialize)]
struct Payload<'a, T: Serialize> {
    config: &'a ModelConfig,
    result: T,
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_file(path, |w| writeln!(w, "{text}"))
}

struct Trial<'a> {
    spec: &'a ExperimentSpec,
    cfg: ModelConfig,
    dir: PathBuf,
    rel: String,
    t_r: f64,
    t_r_exceeds_n: bool,
}

#[derive(Serialize)]
struct DegreeResult {
    histogram: DegreeHistogram,
    fit: Option<PowerLawFit>,
    fit_error: Option<String>,
    fk: Vec<FkRow>,
}

#[derive(Serialize)]
struct CommunityEntry {
    report: crate::metrics::CommunityReport,
    long_degree_sum: u64,
}

#[derive(Serialize)]
struct CommunityResult {
    radius: f64,
    expected_size: f64,
    entries: Vec<CommunityEntry>,
    skipped: Vec<(VertexId, String)>,
    connected_fraction: f64,
    median_conductance: Option<f64>,
}

#[derive(Serialize)]
struct ConcentrationResult {
    t_r_exceeds_n: bool,
    report: crate::metrics::ConcentrationReport,
}

impl Trial<'_> {
    fn path(&self, name: &str) -> (PathBuf, String) {
        (self.dir.join(name), format!("{}/{name}", self.rel))
    }

    fn json<T: Serialize>(&self, name: &str, result: T) -> Result<String> {
        let (path, rel) = self.path(name);
        write_json(
            &path,
            &Payload {
                config: &self.cfg,
                result,
            },
        )?;
        Ok(rel)
    }

    fn degrees(&self, g: &EvolvingGraph) -> Result<(Vec<String>, DegreeHistogram)> {
        let k = &self.spec.knobs;
        let histogram = degree_histogram(g, self.spec.degree_kind());
        let (fit, fit_error) = match fit_power_law_exponent(&histogram, k.k_min) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let fk = fk_comparison(&histogram, self.cfg.m, self.cfg.xi, self.cfg.delta() as f64, k.fk_span)?;
        let (csv, csv_rel) = self.path("degrees.csv");
        write_file(&csv, |w| histogram.write_csv(w))?;
        let json = self.json(
            "degrees.json",
            DegreeResult {
                histogram: histogram.clone(),
                fit,
                fit_error,
                fk,
            },
        )?;
        Ok((vec![json, csv_rel], histogram))
    }

    fn communities(&self, g: &EvolvingGraph) -> Result<Vec<String>> {
        let k = &self.spec.knobs;
        let radius = match k.community_radius {
            Some(r) => r,
            None => derive_parameters(g.vertex_count().max(3), self.cfg.xi, k.c0, k.c1, None)?.R_0,
        };
        let radius = AngularRadius::new(radius)?;
        let criteria = CommunityCriteria {
            alpha: k.alpha,
            beta: k.beta,
            size_cap: k.size_cap.unwrap_or(g.vertex_count() as f64),
            min_size: k.min_size,
        };
        let view = SpatialView::new(g);
        let mut entries = Vec::new();
        let mut skipped = Vec::new();
        for v in sample_centers(g, k.centers, self.cfg.seed, k.center_pool) {
            match view.community_check(v, radius, criteria) {
                Ok(report) => entries.push(CommunityEntry {
                    long_degree_sum: view.long_degree_sum(v, radius)?,
                    report,
                }),
                Err(e @ (Error::WholeSet | Error::ZeroVolume)) => skipped.push((v, e.to_string())),
                Err(e) => return Err(e),
            }
        }
        let conductances: Vec<f64> = entries.iter().map(|e| e.report.conductance).collect();
        let connected = entries.iter().filter(|e| e.report.connected).count();
        let result = CommunityResult {
            radius: radius.value(),
            expected_size: cap_area(radius) * g.vertex_count() as f64,
            connected_fraction: if entries.is_empty() {
                0.0
            } else {
                connected as f64 / entries.len() as f64
            },
            median_conductance: median(&conductances),
            entries,
            skipped,
        };
        Ok(vec![self.json("communities.json", result)?])
    }

    fn expander(&self, g: &EvolvingGraph) -> Result<Vec<String>> {
        let k = &self.spec.knobs;
        let radii = if k.expander_radii.is_empty() {
            vec![
                self.cfg.r.value() / 10.0,
                (g.vertex_count() as f64).powf(-0.2).min(std::f64::consts::PI),
            ]
        } else {
            k.expander_radii.clone()
        };
        let centers = sample_centers(g, k.centers, self.cfg.seed, k.center_pool);
        let scan = SpatialView::new(g).expander_scan(&centers, &radii)?;
        Ok(vec![self.json("expander.json", scan)?])
    }

    fn run(&self) -> (Vec<ArtifactRecord>, Option<DegreeHistogram>) {
        let seed = self.cfg.seed;
        let record = |analysis, outcome: Result<Vec<String>>| match outcome {
            Ok(files) => ArtifactRecord {
                seed,
                analysis,
                files,
                error: None,
            },
            Err(e) => ArtifactRecord {
                seed,
                analysis,
                files: Vec::new(),
                error: Some(e.to_string()),
            },
        };
        let generated = fs::create_dir_all(&self.dir)
            .map_err(|e| Error::io(&self.dir, e))
            .and_then(|_| generate(&self.cfg));
        let (g, trace) = match generated {
            Ok(x) => x,
            Err(e) => {
                let msg = e.to_string();
                let records = self
                    .spec
                    .analyses
                    .iter()
                    .map(|&a| ArtifactRecord {
                        seed,
                        analysis: a,
                        files: Vec::new(),
                        error: Some(msg.clone()),
                    })
                    .collect();
                return (records, None);
            }
        };
        let mut histogram = None;
        let mut records = Vec::new();
        for &analysis in &self.spec.analyses {
            let outcome = match analysis {
                Analysis::Degrees => self.degrees(&g).map(|(files, h)| {
                    histogram = Some(h);
                    files
                }),
                Analysis::Diameter => self
                    .json("diameter.json", diameter(&g, self.spec.knobs.diameter_mode))
                    .map(|f| vec![f]),
                Analysis::Communities => self.communities(&g),
                Analysis::Expander => self.expander(&g),
                Analysis::Concentration => (|| {
                    let report = concentration_report(&trace, &self.cfg, self.t_r);
                    let json = self.json(
                        "concentration.json",
                        ConcentrationResult {
                            t_r_exceeds_n: self.t_r_exceeds_n,
                            report,
                        },
                    )?;
                    let (csv, csv_rel) = self.path("trace.csv");
                    write_file(&csv, |w| trace.write_csv(w))?;
                    Ok(vec![json, csv_rel])
                })(),
                Analysis::Tree => {
                    let which = match self.cfg.model {
                        ModelKind::SelfLoop => TreeEdges::Flexible,
                        _ => TreeEdges::Long,
                    };
                    urt_stats(&g, which)
                        .and_then(|s| self.json("tree.json", s))
                        .map(|f| vec![f])
                }
            };
            records.push(record(analysis, outcome));
        }
        (records, histogram)
    }
}

/// Runs every `(seed, analysis)` pair, in parallel over seeds, and writes the
/// index. Per-artifact failures are recorded in the index rather than
/// aborting the run.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentIndex> {
    spec.validate()?;
    let out_dir = spec.resolved_out_dir();
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let knobs = &spec.knobs;
    let mut template = spec.config.clone();
    let tr = t_r(template.n.max(3), knobs.c0, knobs.c1, template.r.value());
    let mut t_r_exceeds_n = false;
    if spec.analyses.contains(&Analysis::Concentration) {
        if template.probes.is_empty() {
            template.probes = default_probes(knobs.probes);
        }
        if template.checkpoints.is_empty() {
            let (schedule, clamped) = checkpoint_schedule(template.n, tr);
            template.checkpoints = schedule;
            t_r_exceeds_n = clamped;
        }
    }
    let trials: Vec<Trial> = spec
        .seeds
        .iter()
        .map(|&seed| {
            let rel = format!("seed-{seed}");
            Trial {
                spec,
                cfg: ModelConfig {
                    seed,
                    ..template.clone()
                },
                dir: out_dir.join(&rel),
                rel,
                t_r: tr,
                t_r_exceeds_n,
            }
        })
        .collect();
    let results: Vec<_> = trials.par_iter().map(Trial::run).collect();

    let mut artifacts = Vec::new();
    let mut per_seed = Vec::new();
    let mut histograms = Vec::new();
    for (trial, (records, histogram)) in trials.iter().zip(results) {
        if spec.analyses.contains(&Analysis::Degrees) {
            let fit = histogram.as_ref().map(|h| fit_power_law_exponent(h, knobs.k_min));
            per_seed.push(SeedFit {
                seed: trial.cfg.seed,
                fit: fit.as_ref().and_then(|f| f.as_ref().ok().copied()),
                error: match fit {
                    Some(Err(e)) => Some(e.to_string()),
                    None => Some("degree analysis failed".into()),
                    _ => None,
                },
            });
        }
        artifacts.extend(records);
        histograms.extend(histogram);
    }

    let mut aggregates = Vec::new();
    if spec.analyses.contains(&Analysis::Degrees) {
        let pooled_hist = DegreeHistogram::pooled(&histograms)?;
        let (pooled, pooled_error, pooled_fk) = match &pooled_hist {
            Some(h) => {
                let fk = fk_comparison(h, template.m, template.xi, template.delta() as f64, knobs.fk_span)?;
                match fit_power_law_exponent(h, knobs.k_min) {
                    Ok(f) => (Some(f), None, fk),
                    Err(e) => (None, Some(e.to_string()), fk),
                }
            }
            None => (None, Some("no histograms to pool".into()), Vec::new()),
        };
        let aggregate = DegreeAggregate {
            degree_kind: spec.degree_kind(),
            k_min: knobs.k_min,
            per_seed,
            pooled,
            pooled_error,
            pooled_fk,
        };
        write_json(&out_dir.join("degrees_aggregate.json"), &aggregate)?;
        aggregates.push("degrees_aggregate.json".to_string());
        if let Some(h) = pooled_hist {
            let path = out_dir.join("degrees_pooled.csv");
            write_file(&path, |w| h.write_csv(w))?;
            aggregates.push("degrees_pooled.csv".to_string());
        }
    }

    let index = ExperimentIndex {
        spec: spec.clone(),
        out_dir: out_dir.clone(),
        artifacts,
        aggregates,
    };
    write_json(&out_dir.join("index.json"), &index)?;
    Ok(index)
}
