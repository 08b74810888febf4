use lagdesc::features::{defining_residual, Label};
use lagdesc::ld::{ld_point, ld_totals};
use lagdesc::sections::{section_catalog, ENERGY_TOL};
use lagdesc::{LDMethod, LDParams, ModelKind, PhasePoint, SystemModel};
use nalgebra::DVector;
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

fn point(kind: ModelKind) -> impl Strategy<Value = PhasePoint> {
    prop::collection::vec(-1.0f64..1.0, kind.dim()).prop_map(|c| PhasePoint::new(&c).unwrap())
}

fn kind_and_point() -> impl Strategy<Value = (ModelKind, PhasePoint)> {
    kind().prop_flat_map(|k| (Just(k), point(k)))
}

fn sup(x: &PhasePoint) -> f64 {
    x.as_slice().iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn decoupled(kind: ModelKind) -> SystemModel {
    SystemModel::standard(if kind.dof() == 2 {
        ModelKind::Decoupled2
    } else {
        ModelKind::Decoupled3
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    // The closed-form flow is exact; what remains is the rounding of H at a
    // state of size |x(t)|, which grows like e^{λ|t|}.
    #[test]
    fn flow_conserves_energy((k, x) in kind_and_point(), t in -20.0f64..20.0) {
        let s = SystemModel::standard(k);
        let y = s.analytic_flow(&x, t).unwrap();
        let drift = (s.energy(&y).unwrap() - s.energy(&x).unwrap()).abs();
        prop_assert!(drift <= 1e-10 * sup(&y).powi(2).max(1.0), "drift {drift:e}");
    }

    #[test]
    fn flow_has_the_group_property((k, x) in kind_and_point(), s in -10.0f64..10.0, t in -10.0f64..10.0) {
        let sys = SystemModel::standard(k);
        let mid = sys.analytic_flow(&x, s).unwrap();
        let a = sys.analytic_flow(&x, s + t).unwrap();
        let b = sys.analytic_flow(&mid, t).unwrap();
        let scale = sup(&a).max(sup(&mid)).max(1.0);
        prop_assert!(a.max_abs_diff(&b) <= 1e-9 * scale);
    }

    #[test]
    fn coupled_models_are_conjugate_to_decoupled(k in prop::sample::select(vec![ModelKind::Coupled2, ModelKind::Coupled3]), seed in any::<u64>()) {
        let coupled = SystemModel::standard(k);
        let plain = decoupled(k);
        let x = {
            let n = k.dim();
            let c: Vec<f64> = (0..n).map(|i| (((seed >> (8 * i)) & 0xff) as f64 / 127.5) - 1.0).collect();
            PhasePoint::new(&c).unwrap()
        };
        let c = coupled.transform().unwrap();
        let cx = DVector::from_column_slice(x.as_slice());
        let w = PhasePoint::new((c.entries() * &cx).as_slice()).unwrap();
        prop_assert!((coupled.energy(&x).unwrap() - plain.energy(&w).unwrap()).abs() <= 1e-14);
        let fw = DVector::from_column_slice(plain.vector_field(&w).unwrap().as_slice());
        let pulled = c.inverse() * fw;
        let fx = coupled.vector_field(&x).unwrap();
        for i in 0..k.dim() {
            prop_assert!((fx[i] - pulled[i]).abs() <= 1e-14, "component {i}");
        }
    }

    // Dyadic bath values keep the coupling matrices exact, so the start lies
    // on the plane without rounding.
    #[test]
    fn nhim_plane_is_invariant(k in kind(), bath in prop::collection::vec(-1024i32..=1024, 4), t in -20.0f64..20.0) {
        let sys = SystemModel::standard(k);
        let n = k.dof();
        let mut w = vec![0.0; 2 * n];
        for i in 1..n {
            w[i] = bath[i - 1] as f64 / 1024.0;
            w[n + i] = bath[i + 1] as f64 / 1024.0;
        }
        let x = sys.from_decoupled(&PhasePoint::new(&w).unwrap()).unwrap();
        let w0 = sys.to_decoupled(&x).unwrap();
        prop_assert!(w0[0] == 0.0 && w0[n] == 0.0);
        let y = sys.analytic_flow(&x, t).unwrap();
        let wy = sys.to_decoupled(&y).unwrap();
        if k.is_coupled() {
            // Storage coordinates are rounded once on the way back.
            prop_assert!(wy[0].abs() <= 1e-15 && wy[n].abs() <= 1e-15, "{:?}", wy);
        } else {
            prop_assert!(wy[0] == 0.0 && wy[n] == 0.0);
        }
    }

    #[test]
    fn descriptor_is_additive((k, x) in kind_and_point(), p in prop::sample::select(vec![0.5, 1.0])) {
        let sys = SystemModel::standard(k);
        let params = LDParams { p, ..LDParams::default() };
        let r = ld_point(&sys, &x, &params).unwrap();
        let per: f64 = r.per_dof.iter().sum();
        prop_assert!((r.total - per).abs() <= 1e-12 * r.total);
        prop_assert!((r.forward + r.backward - r.total).abs() <= 1e-12 * r.total);
        let f: f64 = r.forward_per_dof.iter().sum();
        let b: f64 = r.backward_per_dof.iter().sum();
        prop_assert!((f - r.forward).abs() <= 1e-12 * r.forward);
        prop_assert!((b - r.backward).abs() <= 1e-12 * r.backward);
        for i in 0..k.dim() {
            let sum = r.forward_per_dof[i] + r.backward_per_dof[i];
            prop_assert!((r.per_dof[i] - sum).abs() <= 1e-12 * r.per_dof[i].max(1e-300));
        }
    }

    #[test]
    fn momentum_reversal_swaps_forward_and_backward(
        k in prop::sample::select(vec![ModelKind::Decoupled2, ModelKind::Decoupled3]),
        seed in prop::collection::vec(-1.0f64..1.0, 6),
        method in prop::sample::select(vec![LDMethod::Augmented, LDMethod::AnalyticQuadrature]),
    ) {
        let sys = SystemModel::standard(k);
        let n = k.dof();
        let x = PhasePoint::new(&seed[..2 * n]).unwrap();
        let mut r = seed[..2 * n].to_vec();
        for v in &mut r[n..] {
            *v = -*v;
        }
        let xr = PhasePoint::new(&r).unwrap();
        let params = LDParams::default().with_method(method);
        let a = ld_totals(&sys, &x, &params).unwrap();
        let b = ld_totals(&sys, &xr, &params).unwrap();
        prop_assert!((a.forward - b.backward).abs() <= 1e-9 * a.forward);
        prop_assert!((a.backward - b.forward).abs() <= 1e-9 * a.backward);
    }

    #[test]
    fn descriptor_grows_with_tau((k, x) in kind_and_point(), t1 in 1.0f64..8.0, extra in 0.5f64..4.0) {
        let sys = SystemModel::standard(k);
        let short = LDParams { tau: t1, ..LDParams::default() }.with_method(LDMethod::AnalyticQuadrature);
        let long = LDParams { tau: t1 + extra, ..short };
        let a = ld_totals(&sys, &x, &short).unwrap().total();
        let b = ld_totals(&sys, &x, &long).unwrap().total();
        prop_assert!(b >= a);
    }

    #[test]
    fn lifts_are_on_shell_and_directional(k in kind(), idx in 0usize..9, u in -1.0f64..1.0, v in -1.0f64..1.0) {
        let sys = SystemModel::standard(k);
        let catalog = section_catalog(k);
        let section = &catalog[idx % catalog.len()];
        if let Some(x) = section.lift(&sys, u, v, 0.2) {
            prop_assert!((sys.energy(&x).unwrap() - 0.2).abs() <= ENERGY_TOL);
            prop_assert!(section.admits(&sys, &x, 0.0));
            prop_assert_eq!(x[section.sweep.0], u);
            prop_assert_eq!(x[section.sweep.1], v);
            for (i, val) in &section.fixed {
                prop_assert_eq!(x[*i], *val);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // On the q1p1 section of the decoupled 2-DoF model, a stable-manifold
    // point has a smaller forward descriptor than shell points well off it.
    #[test]
    fn forward_descriptor_is_smallest_on_the_stable_manifold(
        q in -0.6f64..0.6,
        others in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 10),
    ) {
        let sys = SystemModel::standard(ModelKind::Decoupled2);
        let section = &section_catalog(ModelKind::Decoupled2)[0];
        let params = LDParams::default();
        let ws = section.lift(&sys, q, -q, 0.2).unwrap();
        prop_assert!(defining_residual(&sys, &ws, 0.2, Label::Stable) <= 1e-12);
        let at_ws = ld_totals(&sys, &ws, &params).unwrap();
        let wu = section.lift(&sys, q, q, 0.2).unwrap();
        let at_wu = ld_totals(&sys, &wu, &params).unwrap();
        for (u, v) in others {
            if (u + v).abs() < 0.05 && (u - v).abs() < 0.05 {
                continue;
            }
            let Some(x) = section.lift(&sys, u, v, 0.2) else { continue };
            let l = ld_totals(&sys, &x, &params).unwrap();
            if (u + v).abs() >= 0.05 {
                prop_assert!(at_ws.forward < l.forward, "({u}, {v})");
            }
            if (u - v).abs() >= 0.05 {
                prop_assert!(at_wu.backward < l.backward, "({u}, {v})");
            }
        }
    }
}
