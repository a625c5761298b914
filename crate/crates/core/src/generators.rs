//! Sequential construction of the base, hybrid and self-loop models.
//!
//! Every model places `x_{t+1}` uniformly on the sphere and draws `m`
//! contacts with replacement from the existing vertices inside the cap
//! `B_r(x_{t+1})`, vertex `v` being picked with probability proportional to
//! `deg_t(v) + delta`. A newcomer with an empty cap receives `2m` plain
//! self-loops instead. The hybrid model adds one long edge to a uniformly
//! chosen earlier vertex; the self-loop model gives each newcomer `delta`
//! flexible loops and rewires one of them, together with one loop of a
//! uniformly chosen earlier holder, into a flexible edge.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DegreeKind, EdgeKind, EvolvingGraph, VertexId};
use crate::index::CapIndex;
use crate::sphere::{sample_uniform, AngularRadius, SpherePoint};

/// Seed of the fixed sub-stream that places default probe points, so traces
/// from different runs observe the same caps.
const PROBE_SEED: u64 = 0x5052_4f42_4553;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Base,
    Hybrid,
    #[value(name = "selfloop")]
    SelfLoop,
}

impl ModelKind {
    /// Degree used in the attachment weight `deg_t(v) + delta`: total degree
    /// for the base model, local degree for the hybrid model and
    /// non-flexible degree for the self-loop model. All three are the plain
    /// degree in this representation.
    pub fn attachment_degree(self) -> DegreeKind {
        DegreeKind::Plain
    }

    /// Total-degree growth of the graph in one step.
    pub fn volume_per_step(self, m: usize, delta: usize) -> u64 {
        match self {
            ModelKind::Base => 2 * m as u64,
            ModelKind::Hybrid => 2 * m as u64 + 2,
            ModelKind::SelfLoop => (2 * m + delta) as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub model: ModelKind,
    pub n: usize,
    pub m: usize,
    pub xi: f64,
    pub r: AngularRadius,
    pub seed: u64,
    /// Probe centres for the trace, as unit vectors.
    #[serde(default)]
    pub probes: Vec<SpherePoint>,
    /// Steps `t` (vertex counts) at which the trace samples every probe.
    #[serde(default)]
    pub checkpoints: Vec<usize>,
}

impl ModelConfig {
    pub fn new(model: ModelKind, n: usize, m: usize, xi: f64, r: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            model,
            n,
            m,
            xi,
            r: AngularRadius::new(r)?,
            seed,
            probes: Vec::new(),
            checkpoints: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Additive fitness, `round(xi * m)`.
    pub fn delta(&self) -> usize {
        (self.xi * self.m as f64).round() as usize
    }

    /// Checks the parameter constraints and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n < 1 {
            return bad("n must be at least 1".into());
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return bad(format!("xi must be positive, got {}", self.xi));
        }
        let delta = self.delta();
        if delta < 1 {
            return bad(format!("delta = round(xi*m) = {delta} must be at least 1"));
        }
        if self.model == ModelKind::SelfLoop && delta < 2 {
            return bad(format!("self-loop model needs delta >= 2, got {delta}"));
        }
        if let Some(&t) = self.checkpoints.iter().find(|&&t| t == 0 || t > self.n) {
            return bad(format!("checkpoint {t} outside 1..={}", self.n));
        }
        let mut warnings = Vec::new();
        let exact = self.xi * self.m as f64;
        if (exact - delta as f64).abs() > 1e-9 {
            warnings.push(format!("xi*m = {exact} is not integral; using delta = {delta}"));
        }
        Ok(warnings)
    }

    pub fn with_probes(mut self, probes: Vec<SpherePoint>) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_checkpoints(mut self, checkpoints: Vec<usize>) -> Self {
        self.checkpoints = checkpoints;
        self
    }
}

/// `k` probe points drawn from a fixed sub-stream; identical across runs.
pub fn default_probes(k: usize) -> Vec<SpherePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    (0..k).map(|_| sample_uniform(&mut rng)).collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` under master seed `master`:
/// `splitmix64(master ^ splitmix64(trial))`.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    splitmix64(master ^ splitmix64(trial))
}

/// One trace observation: occupancy `Z_t(u)` and attachment mass
/// `T_t(u) = sum (deg_t(v) + delta)` over the vertices in `B_r(u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub probe_index: usize,
    pub t: usize,
    pub z: u64,
    pub mass: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub rows: Vec<TraceRow>,
    /// Number of isolated births (steps whose cap was empty).
    pub isolated_births: usize,
    /// Whether an isolated birth landed inside some probe cap.
    pub isolated_in_probe_cap: bool,
}

impl GenerationTrace {
    /// CSV with header `probe_index,t,Z_t,T_t`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "probe_index,t,Z_t,T_t")?;
        for row in &self.rows {
            writeln!(w, "{},{},{},{}", row.probe_index, row.t, row.z, row.mass)?;
        }
        Ok(())
    }
}

/// `(Z, T)` for the cap of radius `r` around `center`.
pub fn cap_mass(
    g: &EvolvingGraph,
    idx: &CapIndex,
    center: &SpherePoint,
    r: AngularRadius,
    delta: usize,
    kind: DegreeKind,
) -> (u64, u64) {
    let (mut z, mut mass) = (0u64, 0u64);
    idx.for_each_in_cap(center, r, |id, _| {
        z += 1;
        mass += (g.vertices()[id].degree(kind) + delta) as u64;
    });
    (z, mass)
}

/// Draws `m` contacts for a newcomer at `x`, independently and with
/// replacement, from the indexed vertices within `r` of `x`; `v` is chosen
/// with probability `(deg(v) + delta) / sum_w (deg(w) + delta)`.
#[allow(clippy::too_many_arguments)]
pub fn pa_sample_contacts<R: Rng + ?Sized>(
    g: &EvolvingGraph,
    idx: &CapIndex,
    x: &SpherePoint,
    r: AngularRadius,
    m: usize,
    delta: usize,
    kind: DegreeKind,
    rng: &mut R,
) -> Result<Vec<VertexId>> {
    let mut ids = Vec::new();
    let mut cumulative = Vec::new();
    let mut total = 0u64;
    idx.for_each_in_cap(x, r, |id, _| {
        total += (g.vertices()[id].degree(kind) + delta) as u64;
        ids.push(id);
        cumulative.push(total);
    });
    if ids.is_empty() {
        return Err(Error::EmptyCandidateSet);
    }
    Ok((0..m)
        .map(|_| {
            let u = rng.gen_range(0..total);
            ids[cumulative.partition_point(|&c| c <= u)]
        })
        .collect())
}

/// Vertices currently holding at least one flexible loop, with O(1)
/// insertion, removal and uniform selection.
#[derive(Debug, Default)]
struct Holders {
    members: Vec<VertexId>,
    slot: Vec<Option<usize>>,
}

impl Holders {
    fn insert(&mut self, v: VertexId) {
        if self.slot.len() <= v {
            self.slot.resize(v + 1, None);
        }
        if self.slot[v].is_none() {
            self.slot[v] = Some(self.members.len());
            self.members.push(v);
        }
    }

    fn remove(&mut self, v: VertexId) {
        if let Some(i) = self.slot.get_mut(v).and_then(Option::take) {
            self.members.swap_remove(i);
            if let Some(&moved) = self.members.get(i) {
                self.slot[moved] = Some(i);
            }
        }
    }

    fn choose<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<VertexId> {
        if self.members.is_empty() {
            None
        } else {
            Some(self.members[rng.gen_range(0..self.members.len())])
        }
    }
}

/// Generates the model named by `cfg.model`.
pub fn generate(cfg: &ModelConfig) -> Result<(EvolvingGraph, GenerationTrace)> {
    cfg.validate()?;
    let delta = cfg.delta();
    let m = cfg.m;
    let r = cfg.r;
    let model = cfg.model;
    let kind = model.attachment_degree();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let edges_hint = cfg.n.saturating_mul(m + 1);
    let mut g = EvolvingGraph::with_capacity(cfg.n, edges_hint);
    let mut idx = CapIndex::new(r.value());
    let mut holders = Holders::default();
    let mut trace = GenerationTrace::default();
    let checkpoints: BTreeSet<usize> = cfg.checkpoints.iter().copied().collect();
    let step_volume = model.volume_per_step(m, delta);

    for t in 1..=cfg.n {
        let x = sample_uniform(&mut rng);
        let before = g.total_volume();
        let contacts = if t == 1 {
            Err(Error::EmptyCandidateSet)
        } else {
            pa_sample_contacts(&g, &idx, &x, r, m, delta, kind, &mut rng)
        };
        let v = g.add_vertex(x);
        match contacts {
            Ok(ys) => {
                for y in ys {
                    g.add_edge(v, y, EdgeKind::Plain)?;
                }
            }
            Err(Error::EmptyCandidateSet) => {
                for _ in 0..2 * m {
                    g.add_edge(v, v, EdgeKind::Plain)?;
                }
                if t > 1 {
                    trace.isolated_births += 1;
                    if cfg
                        .probes
                        .iter()
                        .any(|p| crate::sphere::angular_distance(p, &x) <= r.value())
                    {
                        trace.isolated_in_probe_cap = true;
                    }
                }
            }
            Err(e) => return Err(e),
        }
        match model {
            ModelKind::Base => {}
            ModelKind::Hybrid => {
                if t > 1 {
                    let z = rng.gen_range(0..v);
                    g.add_edge(v, z, EdgeKind::Long)?;
                }
            }
            ModelKind::SelfLoop => {
                g.add_flexible_loops(v, delta)?;
                if t > 1 {
                    let z = holders
                        .choose(&mut rng)
                        .expect("the previous newcomer always holds a flexible loop");
                    g.remove_flexible_loop(v)?;
                    g.remove_flexible_loop(z)?;
                    if g.vertices()[z].flexible_loop_count() == 0 {
                        holders.remove(z);
                    }
                    g.add_edge(v, z, EdgeKind::FlexibleEdge)?;
                }
                holders.insert(v);
            }
        }
        let grown = g.total_volume() - before;
        let expected = if t == 1 {
            match model {
                ModelKind::SelfLoop => (2 * m + delta) as u64,
                _ => 2 * m as u64,
            }
        } else {
            step_volume
        };
        debug_assert_eq!(grown, expected, "volume growth at step {t}");
        idx.insert(v, x)?;

        if checkpoints.contains(&t) {
            for (probe_index, p) in cfg.probes.iter().enumerate() {
                let (z, mass) = cap_mass(&g, &idx, p, r, delta, kind);
                trace.rows.push(TraceRow {
                    probe_index,
                    t,
                    z,
                    mass,
                });
            }
        }
    }
    Ok((g, trace))
}

fn require(cfg: &ModelConfig, model: ModelKind) -> Result<()> {
    if cfg.model != model {
        return Err(Error::InvalidConfig(format!(
            "expected a {model:?} configuration, got {:?}",
            cfg.model
        )));
    }
    Ok(())
}

pub fn generate_base(cfg: &ModelConfig) -> Result<(EvolvingGraph, GenerationTrace)> {
    require(cfg, ModelKind::Base)?;
    generate(cfg)
}

pub fn generate_hybrid(cfg: &ModelConfig) -> Result<(EvolvingGraph, GenerationTrace)> {
    require(cfg, ModelKind::Hybrid)?;
    generate(cfg)
}

pub fn generate_selfloop(cfg: &ModelConfig) -> Result<(EvolvingGraph, GenerationTrace)> {
    require(cfg, ModelKind::SelfLoop)?;
    generate(cfg)
}

/// Index over the vertex positions of a finished graph.
pub fn index_graph(g: &EvolvingGraph, cell_size: f64) -> CapIndex {
    let mut idx = CapIndex::new(cell_size);
    for rec in g.vertices() {
        idx.insert(rec.id(), *rec.position()).expect("vertex ids are unique");
    }
    idx
}
