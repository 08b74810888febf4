use lagdesc::sections::{find_section, grid_ld, Bounds};
use lagdesc::{LDParams, ModelKind, SystemModel};
use lagdesc_web::{asymptote_rows, grid_values, overlay_points};

#[test]
fn grid_matches_the_library_grid() {
    let values = grid_values("coupled2", "xpx", 0.2, 10.0, 0.5, 24, 16).unwrap();
    let system = SystemModel::standard(ModelKind::Coupled2);
    let section = find_section(ModelKind::Coupled2, "xpx").unwrap();
    let g = grid_ld(&system, &section, 0.2, Bounds::default(), 24, 16, &LDParams::default()).unwrap();
    assert_eq!(values.len(), 24 * 16);
    for j in 0..16 {
        for i in 0..24 {
            let v = values[j * 24 + i];
            match g.total(i, j) {
                Some(t) => assert_eq!(v.to_bits(), t.to_bits()),
                None => assert!(v.is_nan()),
            }
        }
    }
}

#[test]
fn overlay_holds_the_q1p1_diagonals_and_origin() {
    let flat = overlay_points("decoupled2", "q1p1", 0.2).unwrap();
    assert_eq!(flat.len() % 3, 0);
    let mut seen = [0; 3];
    for t in flat.chunks(3) {
        let (u, v) = (t[1], t[2]);
        match t[0] as usize {
            0 => assert!(u.abs() < 1e-12 && v.abs() < 1e-12),
            1 => assert!((u + v).abs() < 1e-12),
            2 => assert!((u - v).abs() < 1e-12),
            c => panic!("code {c}"),
        }
        seen[t[0] as usize] += 1;
    }
    assert!(seen.iter().all(|&n| n > 0));
}

#[test]
fn asymptote_rows_converge() {
    let rows = asymptote_rows(1.0, 1.0, 2.0, 0.0, 15.0, 3).unwrap();
    assert_eq!(rows.len(), 9);
    assert_eq!(&rows[..1], &[5.0]);
    let (m10, a10) = (rows[4], rows[5]);
    assert!((a10 - 44052.93).abs() < 0.01);
    assert!((m10 / a10 - 1.0).abs() < 1e-8);
}

#[test]
fn bad_inputs_are_errors() {
    assert!(grid_values("coupled9", "xpx", 0.2, 10.0, 0.5, 8, 8).is_err());
    assert!(grid_values("coupled2", "q1p1", 0.2, 10.0, 0.5, 8, 8).is_err());
    assert!(grid_values("coupled2", "xpx", 0.2, 10.0, 2.0, 8, 8).is_err());
    assert!(overlay_points("decoupled3", "nope", 0.2).is_err());
    assert!(asymptote_rows(-1.0, 0.5, 1.0, 1.0, 10.0, 4).is_err());
}
