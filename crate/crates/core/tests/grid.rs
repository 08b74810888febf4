use lagdesc::features::{detect_minima, detect_singularities};
use lagdesc::sections::{find_section, grid_ld, grid_ld_with, Bounds, CellStatus};
use lagdesc::{LDParams, ModelKind, SystemModel};

/// Area fraction of `{p1² - q1² > 0.4}` in `[-1, 1]²`, from the antiderivative
/// of `sqrt(0.4 + q²)` and checked against a midpoint rule.
const Q1P1_MASKED_FRACTION: f64 = 0.180_954_627_731_185_65;

fn q1p1() -> (SystemModel, lagdesc::sections::SectionSpec) {
    (
        SystemModel::standard(ModelKind::Decoupled2),
        find_section(ModelKind::Decoupled2, "q1p1").unwrap(),
    )
}

#[test]
fn grid_is_identical_across_worker_counts() {
    for kind in [ModelKind::Decoupled3, ModelKind::Coupled2] {
        let system = SystemModel::standard(kind);
        let section = lagdesc::sections::section_catalog(kind).remove(1);
        let params = LDParams::default();
        let one = grid_ld_with(1, &system, &section, 0.2, Bounds::default(), 48, 40, &params).unwrap();
        let many = grid_ld_with(4, &system, &section, 0.2, Bounds::default(), 48, 40, &params).unwrap();
        assert_eq!(one.statuses(), many.statuses());
        for j in 0..one.nv {
            for i in 0..one.nu {
                let (a, b) = (one.total(i, j), many.total(i, j));
                assert_eq!(a.map(f64::to_bits), b.map(f64::to_bits));
                assert_eq!(one.forward(i, j).map(f64::to_bits), many.forward(i, j).map(f64::to_bits));
            }
        }
    }
}

#[test]
fn q1p1_masked_area_matches_the_hyperbolic_region() {
    let (system, section) = q1p1();
    // The mask does not depend on the descriptor window.
    let params = LDParams {
        tau: 0.05,
        dt: 0.05,
        ..LDParams::default()
    };
    let g = grid_ld(&system, &section, 0.2, Bounds::default(), 400, 400, &params).unwrap();
    let masked = g.count(CellStatus::NoLift) as f64 / (400.0 * 400.0);
    assert_eq!(g.count(CellStatus::Overflow), 0);
    assert!(
        (masked / Q1P1_MASKED_FRACTION - 1.0).abs() <= 0.01,
        "masked fraction {masked} vs {Q1P1_MASKED_FRACTION}"
    );
    // Cells are masked exactly where p1² - q1² > 0.4.
    for j in 0..400 {
        for i in 0..400 {
            let (q, p) = (g.u(i), g.v(j));
            assert_eq!(g.is_valid(i, j), p * p - q * q < 0.4, "cell ({q}, {p})");
        }
    }
}

#[test]
fn q1p1_field_is_point_symmetric() {
    let (system, section) = q1p1();
    // 64 cells keep every centre off the tangency p1² - q1² = 0.4.
    let n = 64;
    let g = grid_ld(&system, &section, 0.2, Bounds::default(), n, n, &LDParams::default()).unwrap();
    for j in 0..n {
        for i in 0..n {
            let a = g.total(i, j);
            let b = g.total(n - 1 - i, n - 1 - j);
            match (a, b) {
                (Some(a), Some(b)) => assert!((a - b).abs() <= 1e-9 * a.max(1.0), "({i}, {j}): {a} vs {b}"),
                (None, None) => {}
                _ => panic!("mask not symmetric at ({i}, {j})"),
            }
        }
    }
}

#[test]
fn q1p1_slice_minima_sit_on_the_manifolds() {
    // 41 rows on [0.2, 0.4] put the centre row on p1 = 0.3.
    let (system, section) = q1p1();
    let bounds = Bounds::new(-1.0, 1.0, 0.2, 0.4).unwrap();
    let g = grid_ld(&system, &section, 0.2, bounds, 400, 41, &LDParams::default()).unwrap();
    assert!((g.v(20) - 0.3).abs() < 1e-12);
    let row: Vec<f64> = detect_minima(&g)
        .into_iter()
        .filter(|p| (p[1] - g.v(20)).abs() < 1e-12)
        .map(|p| p[0])
        .collect();
    assert!(!row.is_empty());
    for q in &row {
        assert!((q.abs() - 0.3).abs() <= g.du(), "minimum at q1 = {q}");
    }
    assert!(row.iter().any(|q| *q < 0.0) && row.iter().any(|q| *q > 0.0));
}

#[test]
fn q1p1_ridges_sit_on_the_manifolds() {
    let (system, section) = q1p1();
    let n = 200;
    let g = grid_ld(&system, &section, 0.2, Bounds::default(), n, n, &LDParams::default()).unwrap();
    let mask = detect_singularities(&g);
    let mut flagged = 0;
    for j in 0..n {
        for i in 0..n {
            if mask[j * n + i] {
                flagged += 1;
                let (q, p) = (g.u(i), g.v(j));
                let d = (q - p).abs().min((q + p).abs()) / 2f64.sqrt();
                assert!(d <= g.du(), "ridge cell ({q}, {p}) is {d} from the diagonals");
            }
        }
    }
    assert!(flagged > 0);
}

#[test]
fn invalid_grids_are_rejected() {
    let (system, section) = q1p1();
    let p = LDParams::default();
    assert!(grid_ld(&system, &section, 0.2, Bounds::default(), 1, 10, &p).is_err());
    assert!(grid_ld(&system, &section, 0.0, Bounds::default(), 10, 10, &p).is_err());
    assert!(Bounds::new(1.0, 1.0, -1.0, 1.0).is_err());
    let other = find_section(ModelKind::Coupled2, "xpx").unwrap();
    assert!(grid_ld(&system, &other, 0.2, Bounds::default(), 10, 10, &p).is_err());
}
