use num_complex::Complex64;
use num_traits::Zero;
use polycurv_core::algebra::rational::{int, rat, to_f64};
use polycurv_core::algebra::{QMatrix, Rational, SeriesMatrix, TruncSeries};
use polycurv_core::curvature::{
    curvature_matrix, det_bundle_curvature, fd_oracle, gauge_conjugate, gauge_equivalent,
    line_curvature, line_metric, zero_set_metric_f64, ClosedForm, GaugeMatrix, KernelDiagonal,
    MonomialFrameF64,
};
use polycurv_core::frames::{
    decompose_coordinate_ideal, frame_on_zero_set, grammian, MetricSeries,
};
use polycurv_core::ideals::IdealSpec;
use polycurv_core::rkhs::{submodule_kernel, WeightedPolydiscModule};
use proptest::prelude::*;

fn weight() -> impl Strategy<Value = Rational> {
    (1i64..=6, 1i64..=2).prop_map(|(n, d)| rat(n, d))
}

fn coordinate_metric(l: &Rational, m: &Rational, degree: u32) -> MetricSeries {
    let module = WeightedPolydiscModule::new(vec![l.clone(), m.clone()]).unwrap();
    grammian(&decompose_coordinate_ideal(&module, 2, degree).unwrap()).unwrap()
}

fn invertible() -> impl Strategy<Value = GaugeMatrix> {
    prop::collection::vec((-5i64..=5, 1i64..=3), 4)
        .prop_map(|c| QMatrix::from_fn(2, 2, |r, s| rat(c[2 * r + s].0, c[2 * r + s].1)))
        .prop_filter_map("invertible", |a| GaugeMatrix::new(a).ok())
}

fn positive_line(pairs: usize) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec(
        (prop::collection::vec(0u32..=2, 2 * pairs), -4i64..=4),
        0..6,
    )
    .prop_map(move |terms| {
        let mut s = TruncSeries::from_terms(
            pairs,
            4,
            terms
                .into_iter()
                .map(|(e, c)| (polycurv_core::algebra::MultiIndex::new(e), rat(c, 3))),
        )
        .nonconstant_part();
        s.add_term(polycurv_core::algebra::MultiIndex::zero(2 * pairs), int(2));
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_law(l in weight(), m in weight(), a in invertible()) {
        let h = coordinate_metric(&l, &m, 3);
        let k = curvature_matrix(&h).unwrap();
        let moved = curvature_matrix(&h.congruence(a.matrix()).unwrap()).unwrap();
        prop_assert_eq!(&moved, &gauge_conjugate(&k, &a).unwrap());
        let back = gauge_conjugate(&moved, &a.inverse()).unwrap();
        prop_assert_eq!(&back, &k);
        let witness = gauge_equivalent(&k, &moved).unwrap();
        prop_assert_eq!(gauge_conjugate(&k, &witness).unwrap(), moved);
    }

    #[test]
    fn trace_identity(l in weight(), m in weight()) {
        let h = coordinate_metric(&l, &m, 3);
        let k = curvature_matrix(&h).unwrap();
        prop_assert_eq!(k.trace(), det_bundle_curvature(&h).unwrap());
        prop_assert!(k.is_hermitian_relative_to(&h.at_base()));
    }

    #[test]
    fn line_curvature_ignores_holomorphic_factors(h in positive_line(2), i in 0usize..2, j in 0usize..2) {
        let phi = TruncSeries::one(2, 4).add(&TruncSeries::w(2, 4, 0).scale(&rat(1, 2))).unwrap();
        let factor = phi.mul(&phi.conjugate()).unwrap();
        let moved = factor.mul(&h).unwrap();
        prop_assert_eq!(line_curvature(&moved, i, j).unwrap(), line_curvature(&h, i, j).unwrap());
    }

    #[test]
    fn rank_one_curvature_is_line_curvature(h in positive_line(2), i in 0usize..2, j in 0usize..2) {
        let k = curvature_matrix(&line_metric(h.clone(), vec![int(0), int(0)]).unwrap()).unwrap();
        prop_assert_eq!(k.block(i, j).get(0, 0), &line_curvature(&h, i, j).unwrap());
    }

    #[test]
    fn diagonal_metrics_have_diagonal_curvature(a in positive_line(2), b in positive_line(2)) {
        let h = MetricSeries::new(
            SeriesMatrix::from_fn(2, |r, c| match (r, c) {
                (0, 0) => a.clone(),
                (1, 1) => b.clone(),
                _ => TruncSeries::zero(2, 4),
            }).unwrap(),
            vec![int(0), int(0)],
        );
        let k = curvature_matrix(&h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let block = k.block(i, j);
                prop_assert!(block.get(0, 1).is_zero() && block.get(1, 0).is_zero());
                prop_assert_eq!(block.get(0, 0), &line_curvature(&a, i, j).unwrap());
                prop_assert_eq!(block.get(1, 1), &line_curvature(&b, i, j).unwrap());
            }
        }
    }
}

#[test]
fn swapping_weights_reverses_det_curvature() {
    for (l, m) in [(int(1), int(2)), (rat(3, 2), rat(1, 2))] {
        let a = det_bundle_curvature(&coordinate_metric(&l, &m, 4)).unwrap();
        let b = det_bundle_curvature(&coordinate_metric(&m, &l, 4)).unwrap();
        assert_eq!((a.get(0, 0), a.get(1, 1)), (b.get(1, 1), b.get(0, 0)));
    }
}

#[test]
fn scaled_curvature_is_not_gauge_equivalent() {
    let k = curvature_matrix(&coordinate_metric(&int(1), &int(2), 3)).unwrap();
    let mut doubled = k.clone();
    for row in doubled.blocks.iter_mut() {
        for b in row.iter_mut() {
            *b = b.scale(&int(2));
        }
    }
    assert!(gauge_equivalent(&k, &doubled).is_none());
    let id = gauge_equivalent(&k, &k).unwrap();
    assert_eq!(gauge_conjugate(&k, &id).unwrap(), k);
    let scalar = GaugeMatrix::new(QMatrix::identity(2).scale(&int(7))).unwrap();
    assert_eq!(gauge_conjugate(&k, &scalar).unwrap(), k);
}

#[test]
fn fd_on_zero_set_frame_away_from_origin() {
    let module = WeightedPolydiscModule::hardy(2);
    let ideal = IdealSpec::parse(2, &["z1"]).unwrap();
    let frame = frame_on_zero_set(&module, &ideal, &[int(0), rat(3, 10)], 4).unwrap();
    let exact = line_curvature(grammian(&frame).unwrap().matrix.get(0, 0), 1, 1).unwrap();
    assert_eq!(exact, Rational::new(10000.into(), 8281.into()));
    let src = zero_set_metric_f64(&module, &ideal).unwrap();
    let point = [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)];
    let est = fd_oracle(&src, &point, 1, 1, 1e-3).unwrap();
    assert!(
        (est.value.re - to_f64(&exact)).abs() / to_f64(&exact) < 1e-6,
        "{est:?}"
    );
}

#[test]
fn fd_of_constant_metric_vanishes() {
    let src = ClosedForm {
        rank: 2,
        nvars: 2,
        f: |_: &[Complex64]| {
            vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(2.0, 0.0),
            ]
        },
    };
    let zero = [Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.0)];
    for (i, j) in [(0, 0), (0, 1), (1, 1)] {
        assert!(fd_oracle(&src, &zero, i, j, 1e-3).unwrap().value.norm() < 1e-10);
    }
}

#[test]
fn fd_off_diagonal_and_kernel_sources() {
    let module = WeightedPolydiscModule::new(vec![int(1), int(2)]).unwrap();
    let exact = det_bundle_curvature(&coordinate_metric(&int(1), &int(2), 4)).unwrap();
    let src = MonomialFrameF64::new(&module, vec![vec![1, 0], vec![0, 1]], 8);
    let zero = [Complex64::new(0.0, 0.0); 2];
    let est = fd_oracle(&src, &zero, 0, 1, 1e-3).unwrap();
    assert!((est.value - Complex64::new(to_f64(exact.get(0, 1)), 0.0)).norm() < 1e-6);

    // Hardy <z1>: K(w, w) = |w1|^2 / ((1 - |w1|^2)(1 - |w2|^2)) has d2 dbar2 log = 1/(1-|w2|^2)^2
    let kernel = submodule_kernel(
        WeightedPolydiscModule::hardy(2).shared(),
        &IdealSpec::parse(2, &["z1"]).unwrap(),
        4,
    )
    .unwrap();
    let point = [Complex64::new(0.4, 0.1), Complex64::new(0.2, -0.3)];
    let est = fd_oracle(&KernelDiagonal { kernel: &kernel }, &point, 1, 1, 1e-3).unwrap();
    let expected = 1.0 / (1.0 - point[1].norm_sqr()).powi(2);
    assert!((est.value.re - expected).abs() / expected < 1e-6, "{est:?}");
    assert!(fd_oracle(
        &KernelDiagonal { kernel: &kernel },
        &[Complex64::new(0.9995, 0.0), Complex64::new(0.0, 0.0)],
        0,
        0,
        1e-3
    )
    .is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn curvature_independent_of_truncation(l in weight(), m in weight()) {
        let low = curvature_matrix(&coordinate_metric(&l, &m, 2)).unwrap();
        for d in [4, 6] {
            let high = curvature_matrix(&coordinate_metric(&l, &m, d)).unwrap();
            prop_assert_eq!(&low, &high);
        }
    }
}
