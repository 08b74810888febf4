use lagdesc::features::{
    analytic_features, defining_residual, lift_primitive_point, match_features, match_label, Detections,
    FeatureSet, Label, PrimitiveKind,
};
use lagdesc::sections::{find_section, section_catalog};
use lagdesc::{ModelKind, SystemModel};

const H: f64 = 0.2;

fn features(kind: ModelKind, name: &str) -> (SystemModel, FeatureSet) {
    let system = SystemModel::standard(kind);
    let section = find_section(kind, name).unwrap();
    let f = analytic_features(&section, &system, H).unwrap();
    (system, f)
}

fn all_sections() -> Vec<(SystemModel, FeatureSet)> {
    ModelKind::ALL
        .iter()
        .flat_map(|kind| {
            let system = SystemModel::standard(*kind);
            section_catalog(*kind)
                .into_iter()
                .map(move |s| (system.clone(), analytic_features(&s, &system, H).unwrap()))
        })
        .collect()
}

#[test]
fn every_primitive_sample_satisfies_its_defining_equations() {
    let sets = all_sections();
    assert_eq!(sets.len(), 30);
    for (system, f) in &sets {
        for label in [Label::Nhim, Label::Stable, Label::Unstable, Label::DividingSurface] {
            for prim in f.primitives(label) {
                for p in &prim.samples {
                    let x = lift_primitive_point(system, &f.section, H, prim, *p).unwrap_or_else(|| {
                        panic!("{} {}: sample {p:?} does not lift", f.section.name, label.name())
                    });
                    let r = defining_residual(system, &x, H, label);
                    assert!(r <= 1e-10, "{} {}: residual {r:e} at {p:?}", f.section.name, label.name());
                }
            }
        }
    }
}

#[test]
fn nhim_is_the_intersection_of_the_manifolds() {
    for (system, f) in all_sections() {
        let name = &f.section.name;
        for p in &f.nhim.samples {
            assert!(f.distance(Label::Stable, *p) <= 1e-12, "{name}: NHIM sample {p:?} off W^s");
            assert!(f.distance(Label::Unstable, *p) <= 1e-12, "{name}: NHIM sample {p:?} off W^u");
        }
        // Stable samples that also satisfy the unstable condition belong to the NHIM.
        for p in &f.stable.samples {
            let x = lift_primitive_point(&system, &f.section, H, &f.stable, *p).unwrap();
            if defining_residual(&system, &x, H, Label::Unstable) <= 1e-13 {
                assert!(f.distance(Label::Nhim, *p) <= 1e-12, "{name}: {p:?} in W^s and W^u but not NHIM");
            }
        }
    }
}

#[test]
fn q1p1_manifolds_are_the_diagonals() {
    let (_, f) = features(ModelKind::Decoupled2, "q1p1");
    assert_eq!(f.nhim.kind, PrimitiveKind::Points);
    assert_eq!(f.nhim.samples, vec![[0.0, 0.0]]);
    for t in [-0.9, -0.2, 0.0, 0.5] {
        assert!(f.distance(Label::Stable, [t, -t]) < 1e-14);
        assert!(f.distance(Label::Unstable, [t, t]) < 1e-14);
    }
    assert!((f.distance(Label::Stable, [0.3, 0.3]) - 0.3 * 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn q2p2_sections_carry_the_bath_circle() {
    for kind in [ModelKind::Decoupled2, ModelKind::Decoupled3] {
        let (_, f) = features(kind, "q2p2");
        let r = (2.0 * H).sqrt();
        for prim in [&f.nhim, &f.stable, &f.unstable] {
            assert_eq!(prim.kind, PrimitiveKind::Circle, "{}", f.section.name);
            assert!(prim.payload[0].abs() < 1e-12 && prim.payload[1].abs() < 1e-12);
            assert!((prim.payload[2] - r).abs() < 1e-12);
            assert!((prim.payload[2] - 0.632).abs() < 5e-4);
        }
    }
}

#[test]
fn coupled2_xpx_nhim_point() {
    let (_, f) = features(ModelKind::Coupled2, "xpx");
    assert_eq!(f.nhim.kind, PrimitiveKind::Points);
    assert_eq!(f.nhim.samples.len(), 1);
    let p = f.nhim.samples[0];
    assert!((p[0] - 0.2f64.sqrt()).abs() < 1e-12 && p[1].abs() < 1e-12, "{p:?}");
    assert!((p[0] - 0.44721).abs() < 1e-5);
}

#[test]
fn coupled3_xpx_nhim_point() {
    let (_, f) = features(ModelKind::Coupled3, "xpx");
    assert_eq!(f.nhim.samples.len(), 1);
    let p = f.nhim.samples[0];
    assert!((p[0] - (2.0 * H / 3.0).sqrt()).abs() < 1e-12 && p[1].abs() < 1e-12, "{p:?}");
    assert!((p[0] - 0.36515).abs() < 1e-5);
}

#[test]
fn coupled3_ypz_nhim_is_a_quarter_ellipse() {
    // On the NHIM p_y = -p_z, so the condition p_y > 0 keeps p_z < 0, and
    // the rate condition on x keeps y < 0.
    let (_, f) = features(ModelKind::Coupled3, "ypz");
    assert_eq!(f.nhim.kind, PrimitiveKind::EllipseArc);
    assert!(!f.nhim.samples.is_empty());
    for [y, pz] in &f.nhim.samples {
        assert!(*y < 1e-12 && *pz < 1e-12, "sample ({y}, {pz})");
        assert!((0.5 * y * y + pz * pz - H).abs() < 1e-10);
    }
    for t in [2.0f64, 2.5, 2.8] {
        let (y, pz) = (-(2.0 * H).sqrt() * t.sin(), H.sqrt() * t.cos());
        assert!(f.distance(Label::Nhim, [y, pz]) < 1e-9);
        assert!(f.distance(Label::Nhim, [-y, pz]) > 0.15);
        let d = f.distance(Label::Nhim, [y, -pz]);
        assert!(d > 0.15, "t = {t}: {d}");
    }
}

#[test]
fn coupled2_ypy_nhim_follows_the_set_sign() {
    let (_, f) = features(ModelKind::Coupled2, "ypy");
    assert_eq!(f.nhim.samples.len(), 1);
    let p = f.nhim.samples[0];
    assert!((p[0] + (2.0 * H).sqrt()).abs() < 1e-12 && p[1].abs() < 1e-12, "{p:?}");
}

#[test]
fn exact_detections_match_with_zero_distance() {
    let (_, f) = features(ModelKind::Decoupled2, "q2p2");
    let detected = Detections {
        nhim: f.nhim.samples.clone(),
        stable: f.stable.samples.clone(),
        unstable: f.unstable.samples.clone(),
        manifolds: f.samples(Label::Manifolds),
    };
    let report = match_features(&detected, &f, 0.005);
    for e in &report.entries {
        assert!(e.max_distance <= 1e-12, "{:?}: {}", e.label, e.max_distance);
        assert!(e.pass);
    }
    assert!(report.pass());
}

#[test]
fn empty_detection_of_a_non_empty_set_fails() {
    let (_, f) = features(ModelKind::Decoupled2, "q1p1");
    let m = match_label(&[], &f, Label::Nhim, 0.005);
    assert!(!m.pass);
    assert_eq!(m.n_detected, 0);
    assert_eq!(m.point_hits.len(), 1);
    assert!(m.point_hits[0].1.is_infinite());
}

#[test]
fn far_detection_fails_and_reports_its_distance() {
    let (_, f) = features(ModelKind::Decoupled2, "q1p1");
    let m = match_label(&[[0.0, 0.0], [0.5, 0.4]], &f, Label::Unstable, 0.005);
    assert!(!m.pass);
    assert!((m.max_distance - 0.1 / 2f64.sqrt()).abs() < 1e-12);
    assert!((m.mean_distance - 0.05 / 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn wrong_energy_oracle_is_caught() {
    // Detections exactly on the h = 0.2 circle are far from the h = 0.3 one.
    let (system, f) = features(ModelKind::Decoupled2, "q2p2");
    let g = analytic_features(&f.section, &system, H + 0.1).unwrap();
    let m = match_label(&f.stable.samples, &g, Label::Stable, 0.005);
    assert!(!m.pass);
    assert!((m.max_distance - (0.6f64.sqrt() - 0.4f64.sqrt())).abs() < 1e-6);
}

#[test]
fn unknown_kind_is_rejected() {
    let system = SystemModel::standard(ModelKind::Coupled2);
    let section = find_section(ModelKind::Decoupled2, "q1p1").unwrap();
    assert!(analytic_features(&section, &system, H).is_err());
    assert!(analytic_features(&find_section(ModelKind::Coupled2, "xpx").unwrap(), &system, -1.0).is_err());
}
