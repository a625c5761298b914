//! Statistical checks on the generators and the spatial metrics.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use geopa::experiment::{sample_centers, CenterPool};
use geopa::generators::{index_graph, pa_sample_contacts, trial_seed};
use geopa::metrics::{degree_histogram, CommunityCriteria, SpatialView};
use geopa::{
    angular_distance, generate, AngularRadius, CapIndex, DegreeKind, EdgeKind, EvolvingGraph, ModelConfig, ModelKind,
    SpherePoint,
};

fn chi_square_p(observed: &[u64], weights: &[f64]) -> f64 {
    let draws: u64 = observed.iter().sum();
    let total: f64 = weights.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(weights)
        .map(|(&o, &w)| {
            let e = draws as f64 * w / total;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    1.0 - ChiSquared::new((weights.len() - 1) as f64).unwrap().cdf(stat)
}

/// Vertices at the north pole neighbourhood with given plain degrees, built
/// from plain self-loops so the degrees are exact.
fn candidates_with_degrees(degrees: &[usize]) -> (EvolvingGraph, CapIndex) {
    let mut g = EvolvingGraph::new();
    for (i, &d) in degrees.iter().enumerate() {
        let v = g.add_vertex(SpherePoint::from_angles(0.01 * (i + 1) as f64, 0.0).unwrap());
        for _ in 0..d {
            g.add_edge(v, v, EdgeKind::Plain).unwrap();
        }
    }
    let idx = index_graph(&g, 0.05);
    (g, idx)
}

fn sample_counts(g: &EvolvingGraph, idx: &CapIndex, delta: usize, draws: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = AngularRadius::new(0.5).unwrap();
    let mut counts = vec![0u64; g.vertex_count()];
    for v in pa_sample_contacts(
        g,
        idx,
        &SpherePoint::north_pole(),
        r,
        draws,
        delta,
        DegreeKind::Plain,
        &mut rng,
    )
    .unwrap()
    {
        counts[v] += 1;
    }
    counts
}

#[test]
fn sampler_three_to_one() {
    // deg + delta = 3 and 1
    let (g, idx) = candidates_with_degrees(&[2, 0]);
    let counts = sample_counts(&g, &idx, 1, 100_000, 1);
    let p = chi_square_p(&counts, &[3.0, 1.0]);
    assert!(p > 0.001, "{counts:?} p={p}");
    let ratio = counts[0] as f64 / counts[1] as f64;
    assert!((ratio - 3.0).abs() < 0.1, "{ratio}");
}

#[test]
fn sampler_uniform_when_degrees_equal() {
    let (g, idx) = candidates_with_degrees(&[4; 7]);
    let counts = sample_counts(&g, &idx, 2, 100_000, 2);
    let p = chi_square_p(&counts, &[1.0; 7]);
    assert!(p > 0.001, "{counts:?} p={p}");
}

#[test]
fn sampler_ignores_vertices_outside_the_cap() {
    let (mut g, _) = candidates_with_degrees(&[1, 1]);
    g.add_vertex(SpherePoint::south_pole());
    let idx = index_graph(&g, 0.05);
    let counts = sample_counts(&g, &idx, 1, 10_000, 3);
    assert_eq!(counts[2], 0);
}

/// Two-sample Kolmogorov-Smirnov statistic and its asymptotic p-value.
fn ks_two_sample(a: &[usize], b: &[usize]) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let en = (na * nb / (na + nb)).sqrt();
    let lambda = (en + 0.12 + 0.11 / en) * d;
    // The alternating series converges slowly for small lambda; use the
    // Jacobi-theta form there.
    let p: f64 = if lambda < 1.18 {
        if lambda <= 0.0 {
            1.0
        } else {
            let cdf: f64 = (1..=50)
                .map(|k| {
                    let j = (2 * k - 1) as f64;
                    (-j * j * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp()
                })
                .sum::<f64>()
                * (std::f64::consts::TAU).sqrt()
                / lambda;
            1.0 - cdf
        }
    } else {
        (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 2.0 } else { -2.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum()
    };
    (d, p.clamp(0.0, 1.0))
}

fn degrees(model: ModelKind, kind: DegreeKind, stream: u64) -> Vec<usize> {
    (0..10)
        .flat_map(|i| {
            let cfg = ModelConfig::new(model, 5_000, 2, 1.0, 0.3, trial_seed(stream, i)).unwrap();
            let (g, _) = generate(&cfg).unwrap();
            g.vertices().iter().map(|v| v.degree(kind)).collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn hybrid_local_degrees_match_base_degrees() {
    let base = degrees(ModelKind::Base, DegreeKind::Total, 21);
    let hybrid = degrees(ModelKind::Hybrid, DegreeKind::Plain, 22);
    let (d, p) = ks_two_sample(&base, &hybrid);
    assert!(p > 0.001, "D={d} p={p}");
}

#[test]
fn ks_detects_a_shift() {
    let a: Vec<usize> = (0..5000).map(|i| i % 50).collect();
    let b: Vec<usize> = (0..5000).map(|i| i % 50 + 5).collect();
    assert!(ks_two_sample(&a, &b).1 < 1e-6);
    assert!(ks_two_sample(&a, &a).1 > 0.99);
}

#[test]
fn hybrid_total_histogram_adds_long_degrees() {
    let cfg = ModelConfig::new(ModelKind::Hybrid, 3_000, 3, 1.0, 0.2, 5).unwrap();
    let (g, _) = generate(&cfg).unwrap();
    let total = degree_histogram(&g, DegreeKind::Total);
    let plain = degree_histogram(&g, DegreeKind::Plain);
    let long = degree_histogram(&g, DegreeKind::Long);
    assert_eq!(total.degree_sum(), g.total_volume());
    assert_eq!(plain.degree_sum() + long.degree_sum(), total.degree_sum());
    assert_eq!(long.degree_sum(), 2 * (cfg.n as u64 - 1));
}

#[test]
fn small_radius_conductance_exceeds_large_radius_conductance() {
    let cfg = ModelConfig::new(ModelKind::Base, 4_000, 4, 1.0, 0.1, 8).unwrap();
    let (g, _) = generate(&cfg).unwrap();
    let r = cfg.r.value();
    let centers = sample_centers(&g, 50, 8, CenterPool::AllVertices);
    let scan = SpatialView::new(&g)
        .expander_scan(&centers, &[r / 10.0, 4.0 * r])
        .unwrap();
    let small = scan.radii[0].median.unwrap();
    let large = scan.radii[1].median.unwrap();
    assert!(small > large, "{small} vs {large}");
}

/// Community report fields recomputed from the edge list on small graphs.
#[test]
fn community_reports_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    for trial in 0..60 {
        let model = [ModelKind::Base, ModelKind::Hybrid, ModelKind::SelfLoop][trial % 3];
        let n = rng.gen_range(2..=30);
        let cfg = ModelConfig::new(model, n, rng.gen_range(1..=3), 2.0, rng.gen_range(0.2..2.0), rng.gen()).unwrap();
        let (g, _) = generate(&cfg).unwrap();
        let view = SpatialView::new(&g);
        let v = rng.gen_range(0..n);
        let radius = rng.gen_range(0.0..3.0);
        let pos: Vec<SpherePoint> = g.vertices().iter().map(|x| *x.position()).collect();
        let set: BTreeSet<usize> = (0..n)
            .filter(|&u| angular_distance(&pos[u], &pos[v]) <= radius)
            .collect();
        let crit = CommunityCriteria::new(0.5, 0.5, 10.0);
        let report = match view.community_check(v, AngularRadius::new(radius).unwrap(), crit) {
            Ok(r) => r,
            Err(_) => {
                assert!(set.len() == n || set.is_empty());
                continue;
            }
        };
        let deg = |u: usize| {
            g.edges().iter().filter(|e| e.src == u || e.dst == u).count() + g.vertices()[u].flexible_loop_count()
        };
        let cut = g
            .edges()
            .iter()
            .filter(|e| set.contains(&e.src) != set.contains(&e.dst))
            .count();
        let vin: usize = set.iter().map(|&u| deg(u)).sum();
        let vout: usize = (0..n).filter(|u| !set.contains(u)).map(deg).sum();
        let phi = cut as f64 / vin.min(vout) as f64;
        assert_eq!(report.size, set.len());
        assert_eq!(report.conductance, phi);
        let long: u64 = set
            .iter()
            .map(|&u| {
                g.edges()
                    .iter()
                    .filter(|e| e.kind == EdgeKind::Long && (e.src == u || e.dst == u))
                    .count() as u64
            })
            .sum();
        assert_eq!(
            view.long_degree_sum(v, AngularRadius::new(radius).unwrap()).unwrap(),
            long
        );
        let expected = report.connected && phi <= 0.5 / (set.len() as f64).sqrt() && set.len() as f64 <= 10.0;
        assert_eq!(report.satisfies, expected);
        checked += 1;
    }
    assert!(checked > 30);
}
