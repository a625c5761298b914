use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use geopa::error::{Error, Result};
use geopa::experiment::{
    checkpoint_schedule, fk_comparison, run_experiment, sample_centers, CenterPool, ExperimentSpec,
};
use geopa::generators::default_probes;
use geopa::metrics::{
    concentration_report, degree_histogram, diameter, fit_power_law_exponent, CommunityCriteria, DiameterMode,
    SpatialView,
};
use geopa::params::{derive_parameters, t_r};
use geopa::{generate, AngularRadius, DegreeKind, ModelConfig, ModelKind};

#[derive(Parser)]
#[command(
    name = "geopa",
    version,
    about = "Geometric preferential-attachment networks on the sphere"
)]
struct Cli {
    /// Print results, and errors, as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derived radii, times and constants for a network size.
    Params {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, default_value_t = 0.5)]
        c1: f64,
        /// Contact radius for t_r; defaults to r_0.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Generate a graph: edge CSV to stdout, or edges, vertices, trace and config into --out.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Trace this many fixed probe caps.
        #[arg(long, default_value_t = 0)]
        probes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree histogram, power-law fit and comparison with the closed-form law.
    Degrees {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 10)]
        k_min: usize,
        #[arg(long, value_enum)]
        degree_kind: Option<DegreeKindArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hop diameter.
    Diameter {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::ComponentWise)]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Community check of R-neighbourhoods around sampled vertices.
    Communities {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        centers: CenterArgs,
        /// Neighbourhood radius; defaults to R_0.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conductance of R-neighbourhoods over several radii.
    Expander {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        centers: CenterArgs,
        /// Comma-separated radii; defaults to r/10 and n^-0.2.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deviation of cap occupancy and attachment mass from their means.
    Concentration {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 20)]
        probes: usize,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        #[arg(long, default_value_t = 0.5)]
        c1: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a JSON experiment spec.
    Experiment {
        spec: PathBuf,
        /// Overrides the experiment's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Base)]
    model: ModelKind,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 0.3)]
    r: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig> {
        ModelConfig::new(self.model, self.n, self.m, self.xi, self.r, self.seed)
    }
}

#[derive(Args)]
struct CenterArgs {
    #[arg(long, default_value_t = 50)]
    centers: usize,
    /// Draw centres from the largest connected component only.
    #[arg(long)]
    giant_only: bool,
}

impl CenterArgs {
    fn pool(&self) -> CenterPool {
        if self.giant_only {
            CenterPool::LargestComponent
        } else {
            CenterPool::AllVertices
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DegreeKindArg {
    Total,
    Plain,
    Long,
    NonFlexible,
    Flexible,
}

impl From<DegreeKindArg> for DegreeKind {
    fn from(k: DegreeKindArg) -> Self {
        match k {
            DegreeKindArg::Total => DegreeKind::Total,
            DegreeKindArg::Plain => DegreeKind::Plain,
            DegreeKindArg::Long => DegreeKind::Long,
            DegreeKindArg::NonFlexible => DegreeKind::NonFlexible,
            DegreeKindArg::Flexible => DegreeKind::Flexible,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    ComponentWise,
}

/// Writes `value` as pretty JSON to `out`, or to stdout when absent.
fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|e| Error::io(path, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn write_csv(path: &Path, body: impl FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path).map_err(io_err(path))?);
    body(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

#[derive(Serialize)]
struct WithConfig<'a, T> {
    config: &'a ModelConfig,
    result: T,
}

fn run(cli: Cli) -> Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Params { n, xi, c0, c1, r } => emit(&derive_parameters(n, xi, c0, c1, r)?, None),
        Command::Generate { model, probes, out } => {
            let mut cfg = model.config()?;
            if probes > 0 {
                let n = cfg.n;
                cfg = cfg.with_probes(default_probes(probes)).with_checkpoints(vec![n]);
            }
            let (g, trace) = generate(&cfg)?;
            match out {
                None => {
                    let stdout = io::stdout();
                    let mut w = BufWriter::new(stdout.lock());
                    g.write_edge_csv(&mut w)
                        .and_then(|_| w.flush())
                        .map_err(io_err(Path::new("-")))
                }
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(io_err(&dir))?;
                    write_csv(&dir.join("edges.csv"), |w| g.write_edge_csv(w))?;
                    write_csv(&dir.join("vertices.csv"), |w| g.write_vertex_csv(w))?;
                    if probes > 0 {
                        write_csv(&dir.join("trace.csv"), |w| trace.write_csv(w))?;
                    }
                    emit(&cfg, Some(&dir.join("config.json")))?;
                    if !json {
                        eprintln!(
                            "wrote {} vertices, {} edges to {}",
                            g.vertex_count(),
                            g.edge_count(),
                            dir.display()
                        );
                    }
                    Ok(())
                }
            }
        }
        Command::Degrees {
            model,
            k_min,
            degree_kind,
            out,
        } => {
            let cfg = model.config()?;
            let (g, _) = generate(&cfg)?;
            let kind = degree_kind.map(DegreeKind::from).unwrap_or(match cfg.model {
                ModelKind::Hybrid => DegreeKind::Plain,
                _ => DegreeKind::Total,
            });
            let h = degree_histogram(&g, kind);
            let fit = fit_power_law_exponent(&h, k_min);
            let fk = fk_comparison(&h, cfg.m, cfg.xi, cfg.delta() as f64, 15)?;
            if !json && out.is_none() {
                match &fit {
                    Ok(f) => println!(
                        "exponent {:.4} +/- {:.4} (k >= {}, {} samples)",
                        f.exponent, f.std_error, f.k_min, f.tail_samples
                    ),
                    Err(e) => println!("fit failed: {e}"),
                }
                println!("k,empirical,analytic,relative_error");
                for row in &fk {
                    println!("{},{},{},{}", row.k, row.empirical, row.analytic, row.relative_error);
                }
                return Ok(());
            }
            #[derive(Serialize)]
            struct Out {
                histogram: geopa::metrics::DegreeHistogram,
                fit: Option<geopa::metrics::PowerLawFit>,
                fit_error: Option<String>,
                fk: Vec<geopa::experiment::FkRow>,
            }
            let (fit, fit_error) = match fit {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            emit(
                &WithConfig {
                    config: &cfg,
                    result: Out {
                        histogram: h,
                        fit,
                        fit_error,
                        fk,
                    },
                },
                out.as_deref(),
            )
        }
        Command::Diameter { model, mode, out } => {
            let cfg = model.config()?;
            let (g, _) = generate(&cfg)?;
            let mode = match mode {
                ModeArg::Exact => DiameterMode::Exact,
                ModeArg::ComponentWise => DiameterMode::ComponentWise,
            };
            let report = diameter(&g, mode);
            if !json && out.is_none() {
                match report.diameter {
                    Some(d) => println!("diameter {d} ({} components)", report.component_count),
                    None => println!("disconnected ({} components)", report.component_count),
                }
                if let Some(c) = report.largest_component() {
                    println!("largest component: {} vertices, diameter {}", c.size, c.diameter);
                }
                return Ok(());
            }
            emit(
                &WithConfig {
                    config: &cfg,
                    result: report,
                },
                out.as_deref(),
            )
        }
        Command::Communities {
            model,
            centers,
            radius,
            c0,
            alpha,
            beta,
            out,
        } => {
            let cfg = model.config()?;
            let (g, _) = generate(&cfg)?;
            let radius = match radius {
                Some(r) => r,
                None => derive_parameters(cfg.n.max(3), cfg.xi, c0, 0.5 * c0, None)?.R_0,
            };
            let radius = AngularRadius::new(radius)?;
            let criteria = CommunityCriteria::new(alpha, beta, cfg.n as f64);
            let view = SpatialView::new(&g);
            let mut reports = Vec::new();
            let mut skipped = Vec::new();
            for v in sample_centers(&g, centers.centers, cfg.seed, centers.pool()) {
                match view.community_check(v, radius, criteria) {
                    Ok(r) => reports.push(r),
                    Err(e @ (Error::WholeSet | Error::ZeroVolume)) => skipped.push((v, e.to_string())),
                    Err(e) => return Err(e),
                }
            }
            if !json && out.is_none() {
                println!("center,size,connected,conductance,satisfies");
                for r in &reports {
                    println!(
                        "{},{},{},{},{}",
                        r.center, r.size, r.connected, r.conductance, r.satisfies
                    );
                }
                for (v, why) in &skipped {
                    eprintln!("skipped {v}: {why}");
                }
                return Ok(());
            }
            #[derive(Serialize)]
            struct Out {
                radius: f64,
                reports: Vec<geopa::metrics::CommunityReport>,
                skipped: Vec<(usize, String)>,
            }
            emit(
                &WithConfig {
                    config: &cfg,
                    result: Out {
                        radius: radius.value(),
                        reports,
                        skipped,
                    },
                },
                out.as_deref(),
            )
        }
        Command::Expander {
            model,
            centers,
            radii,
            out,
        } => {
            let cfg = model.config()?;
            let (g, _) = generate(&cfg)?;
            let radii = if radii.is_empty() {
                vec![
                    cfg.r.value() / 10.0,
                    (cfg.n as f64).powf(-0.2).min(std::f64::consts::PI),
                ]
            } else {
                radii
            };
            let picked = sample_centers(&g, centers.centers, cfg.seed, centers.pool());
            let scan = SpatialView::new(&g).expander_scan(&picked, &radii)?;
            if !json && out.is_none() {
                println!("radius,defined,min,median,max");
                for r in &scan.radii {
                    let f = |x: Option<f64>| x.map_or("-".to_string(), |v| v.to_string());
                    println!("{},{},{},{},{}", r.radius, r.defined, f(r.min), f(r.median), f(r.max));
                }
                return Ok(());
            }
            emit(
                &WithConfig {
                    config: &cfg,
                    result: scan,
                },
                out.as_deref(),
            )
        }
        Command::Concentration {
            model,
            probes,
            c0,
            c1,
            out,
        } => {
            let base = model.config()?;
            let tr = t_r(base.n.max(3), c0, c1, base.r.value());
            let (schedule, t_r_exceeds_n) = checkpoint_schedule(base.n, tr);
            let cfg = base.with_probes(default_probes(probes)).with_checkpoints(schedule);
            let (_, trace) = generate(&cfg)?;
            let report = concentration_report(&trace, &cfg, tr);
            if !json && out.is_none() {
                let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
                println!(
                    "t_r {tr:.1}{}",
                    if t_r_exceeds_n { " (exceeds n; using t = n)" } else { "" }
                );
                println!("worst Z deviation {}", f(report.worst_z_deviation));
                println!("worst T deviation {}", f(report.worst_mass_deviation));
                return Ok(());
            }
            #[derive(Serialize)]
            struct Out {
                t_r_exceeds_n: bool,
                report: geopa::metrics::ConcentrationReport,
            }
            emit(
                &WithConfig {
                    config: &cfg,
                    result: Out { t_r_exceeds_n, report },
                },
                out.as_deref(),
            )
        }
        Command::Experiment { spec, out } => {
            let text = fs::read_to_string(&spec).map_err(io_err(&spec))?;
            let mut spec: ExperimentSpec = serde_json::from_str(&text)?;
            if out.is_some() {
                spec.out_dir = out;
            }
            let index = run_experiment(&spec)?;
            let failed = index.artifacts.iter().filter(|a| a.error.is_some()).count();
            if json {
                emit(&index, None)?;
            } else {
                println!(
                    "{} artifacts ({failed} failed) in {}",
                    index.artifacts.len(),
                    index.out_dir.display()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let json = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if json && e.use_stderr() {
                let body = serde_json::json!({ "error": e.kind().to_string(), "message": e.to_string() });
                eprintln!("{body}");
                return ExitCode::from(e.exit_code() as u8);
            }
            e.exit()
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json {
                eprintln!(
                    "{}",
                    serde_json::json!({ "error": "runtime", "message": e.to_string() })
                );
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::FAILURE
        }
    }
}
