use vortigen::evoform::*;
use vortigen::fields::*;
use vortigen::flows::{self, Couette, ShockTube, SourceFlow};
use vortigen::{GasModel, PrimitiveState};

fn air() -> GasModel {
    GasModel::new(1.4, 1.0).unwrap()
}

fn horizontal(y: f64, n: usize) -> Trajectory {
    Trajectory::from_points((0..n).map(|i| [0.1 + 0.8 * i as f64 / (n - 1) as f64, y]).collect()).unwrap()
}

#[test]
fn couette_literal_variant_is_nonequilibrium_from_production_terms() {
    let m = air();
    let c = Couette { wall_speed: 1.0, height: 1.0, t_wall: 4.0, p: 1.0, mu: 0.2, k: 0.05 };
    let g = StructuredGrid2D::spanning(41, 41, (0.0, 1.0), (0.0, 1.0)).unwrap();
    let fs = c.sample(g, &m).unwrap();
    let tm = TransportModel::new(c.mu, c.k).unwrap();
    let tr = horizontal(0.25, 60);
    let fr = frame_along(&tr).unwrap();
    let tol = default_equilibrium_tolerance(&fs, &m).unwrap();

    let nt = crocco_normal_coefficient(&fs, &tr, &fr, &ForceModel::None, &m, CroccoSign::Consistent, false).unwrap();
    let et = viscous_a1(&fs, &tm, &m, ProductionVariant::PaperLiteral).unwrap();
    let fc = FormCoefficients::viscous(&tr, &g, nt.clone(), et, CroccoSign::Consistent).unwrap();
    let k = commutator(&fc, &tr, &fr, &g).unwrap();
    assert!(k.attribution_residual() <= 1e-10);
    match equilibrium_classifier(&k, tol).unwrap() {
        Equilibrium::Nonequilibrium { dominant, .. } => assert!(matches!(
            dominant,
            Source::ConductionProduction | Source::ViscousProduction
        )),
        other => panic!("expected nonequilibrium, got {other:?}"),
    }

    // the standard form balances exactly in steady Couette flow
    let et = viscous_a1(&fs, &tm, &m, ProductionVariant::StandardProduction).unwrap();
    let fc = FormCoefficients::viscous(&tr, &g, nt, et, CroccoSign::Consistent).unwrap();
    let k = commutator(&fc, &tr, &fr, &g).unwrap();
    assert_eq!(equilibrium_classifier(&k, tol).unwrap(), Equilibrium::LocallyEquilibrium);
}

#[test]
fn inviscid_commutator_equals_along_derivative_of_normal_coefficient() {
    let m = air();
    let g = StructuredGrid2D::spanning(41, 41, (1.0, 2.0), (1.0, 2.0)).unwrap();
    let fs = SourceFlow { q: 0.3, h0: 3.5, s: 1.0 }.sample(g, &m).unwrap();
    let tr = trace_streamline(&fs, [1.05, 1.2], None, 0.8).unwrap();
    let fr = frame_along(&tr).unwrap();
    // a force with a normal component that varies along the path
    let phi = g.sample(|x, y| 0.3 * x * y);
    let forces = ForceModel::Potential(phi);
    let nt = crocco_normal_coefficient(&fs, &tr, &fr, &forces, &m, CroccoSign::Consistent, false).unwrap();
    let fc = FormCoefficients::inviscid(&tr, nt.clone(), CroccoSign::Consistent);
    assert!(fc.a1.iter().all(|v| *v == 0.0));
    let k = commutator(&fc, &tr, &fr, &g).unwrap();
    let prescribed = FormCoefficients::prescribed(&tr, nt.total()).unwrap();
    let k2 = commutator(&prescribed, &tr, &fr, &g).unwrap();
    for (a, b) in k.k.iter().zip(&k2.k) {
        assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
    assert!(k.attribution_residual() <= 1e-10);
    assert!(k.integral(Source::Force) > 0.0);
}

#[test]
fn lagrange_report_for_reference_flows() {
    let m = air();
    let g = StructuredGrid2D::spanning(21, 21, (1.0, 2.0), (1.0, 2.0)).unwrap();
    let fs = SourceFlow { q: 0.3, h0: 3.5, s: 1.0 }.sample(g, &m).unwrap();
    let r = lagrange_criterion(&fs, &ForceModel::None, false).unwrap();
    assert!(r.stationary && r.potential && r.simply_connected && r.predicts_equilibrium);

    let mut mask = vec![true; g.len()];
    for j in 8..12 {
        for i in 8..12 {
            mask[g.index(i, j)] = false;
        }
    }
    let body = fs.with_mask(mask).unwrap();
    let r = lagrange_criterion(&body, &ForceModel::None, false).unwrap();
    assert!(!r.simply_connected && !r.predicts_equilibrium);

    let tube = ShockTube::default()
        .series(StructuredGrid2D::spanning(51, 5, (0.0, 1.0), (0.0, 0.1)).unwrap(), &m, 2)
        .unwrap();
    let r = lagrange_criterion(&tube, &ForceModel::None, true).unwrap();
    assert!(!r.stationary && !r.predicts_equilibrium);
}

#[test]
fn uniform_state_commutator_vanishes_exactly() {
    let m = air();
    let g = StructuredGrid2D::spanning(15, 15, (0.0, 1.0), (0.0, 1.0)).unwrap();
    let fs = flows::uniform(g, PrimitiveState::new(0.8, [0.3, -0.4], 2.0)).unwrap();
    let tr = trace_streamline(&fs, [0.2, 0.9], None, 0.7).unwrap();
    let fr = frame_along(&tr).unwrap();
    let nt = crocco_normal_coefficient(&fs, &tr, &fr, &ForceModel::None, &m, CroccoSign::PaperLiteral, false).unwrap();
    let k = commutator(&FormCoefficients::inviscid(&tr, nt, CroccoSign::PaperLiteral), &tr, &fr, &g).unwrap();
    assert!(k.max_abs() <= 1e-12);
}
