//! Whole-graph analysis checks: the reference architecture manifest and
//! randomized structural properties.

use newton_forge_metrics::{analyze, distance, parse_manifest, round2, DependencyGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference_manifest() -> String {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../assets/newton-architecture.manifest"
    );
    std::fs::read_to_string(path).expect("reference manifest present")
}

#[test]
fn reference_architecture_reproduces_published_metrics() {
    let g = parse_manifest(&reference_manifest()).unwrap();
    let report = analyze(&g);
    assert!(report.annotations.is_empty());

    let rows: Vec<(&str, f64, f64, f64)> = report
        .metrics
        .iter()
        .map(|m| {
            (
                m.package.as_str(),
                round2(m.abstractness),
                round2(m.instability),
                round2(m.distance),
            )
        })
        .collect();
    assert_eq!(
        rows,
        vec![
            ("NonlinearMethods", 0.29, 0.46, 0.25),
            ("LineSearchMethods", 0.20, 0.70, 0.10),
            ("TrustRegionMethods", 0.29, 0.80, 0.09),
            ("BaseArchitecture", 0.75, 0.31, 0.06),
        ]
    );

    // Raw counts behind the ratios.
    let find = |name: &str| report.metrics.iter().find(|m| m.package == name).unwrap();
    let trm = find("TrustRegionMethods");
    assert_eq!((trm.n_abstract, trm.n_classes), (2, 7));
    assert_eq!((trm.efferent, trm.afferent), (4, 1));
    let ba = find("BaseArchitecture");
    assert_eq!((ba.n_abstract, ba.n_classes), (6, 8));
    assert_eq!((ba.efferent, ba.afferent), (5, 11));
    let lsm = find("LineSearchMethods");
    assert_eq!((lsm.efferent, lsm.afferent), (7, 3));
    let nlm = find("NonlinearMethods");
    assert_eq!((nlm.efferent, nlm.afferent), (6, 7));

    // Full-precision identity and the display rounding bound: the distance
    // recombined from displayed A and I stays within half a display unit
    // of the exact one.
    for m in &report.metrics {
        assert_eq!(m.distance, distance(m.abstractness, m.instability));
        let display_d = (round2(m.abstractness) + round2(m.instability) - 1.0).abs();
        assert!(
            (display_d - m.distance).abs() < 0.005,
            "{}: display {display_d} vs exact {}",
            m.package,
            m.distance
        );
    }
}

fn random_graph(rng: &mut ChaCha8Rng) -> DependencyGraph {
    let mut g = DependencyGraph::new();
    let n_packages = rng.gen_range(1..=10);
    let n_classes = rng.gen_range(n_packages..=50);
    for p in 0..n_packages {
        g.add_package(&format!("p{p}")).unwrap();
    }
    let mut qualified = Vec::new();
    for c in 0..n_classes {
        let pkg = format!("p{}", rng.gen_range(0..n_packages));
        let name = format!("C{c}");
        g.add_class(&pkg, &name, rng.gen_bool(0.4)).unwrap();
        qualified.push(format!("{pkg}.{name}"));
    }
    let n_edges = rng.gen_range(0..=3 * n_classes);
    for _ in 0..n_edges {
        let a = &qualified[rng.gen_range(0..qualified.len())];
        let b = &qualified[rng.gen_range(0..qualified.len())];
        if a != b {
            g.add_edge(a, b).unwrap();
        }
    }
    g
}

#[test]
fn distance_identity_and_class_conservation_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4d41_5254);
    for _ in 0..1000 {
        let g = random_graph(&mut rng);
        let report = analyze(&g);
        let mut counted = 0;
        for m in &report.metrics {
            assert_eq!(m.distance, (m.abstractness + m.instability - 1.0).abs());
            assert_eq!(m.abstractness, m.n_abstract as f64 / m.n_classes as f64);
            counted += m.n_classes;
        }
        for a in &report.annotations {
            let (_, nc) = g.class_counts(&a.package).unwrap();
            counted += nc;
        }
        assert_eq!(counted, g.class_count(), "class-count conservation");
    }
}

#[test]
fn removing_cross_package_edges_undefines_instability() {
    let g = parse_manifest(
        "package a\npackage b\nclass a.X concrete\nclass b.Y concrete\n\
         depends a.X -> b.Y\n",
    )
    .unwrap();
    let with_edges = analyze(&g);
    assert_eq!(with_edges.metrics.len(), 2);

    let isolated = parse_manifest(
        "package a\npackage b\nclass a.X concrete\nclass b.Y concrete\n",
    )
    .unwrap();
    let report = analyze(&isolated);
    assert!(report.metrics.is_empty());
    assert_eq!(report.annotations.len(), 2);
}
