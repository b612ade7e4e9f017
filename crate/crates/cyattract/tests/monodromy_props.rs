use cyattract::exact::{q, Q};
use cyattract::hyperseries::HGParams;
use cyattract::monodromy::{
    closed_form_m0, lower_residual, numerical_rank, to_cmat, CMat, Monodromy, MonodromyError, Orientation, Path, Puncture,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn max_entry(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn zero_loop_is_independent_of_the_base(n in 1usize..=4, r in 0.2f64..0.8, angle in -3.0f64..3.0) {
        let m = Monodromy::new(&HGParams::halfs(n)).unwrap();
        let base = C64::from_polar(r, angle);
        let mm = m.monodromy_loop(Puncture::Zero, base).unwrap();
        prop_assert!(max_entry(&(&mm.matrix - to_cmat(&closed_form_m0(n)))) < 1e-8);
    }

    #[test]
    fn reversed_loops_invert(r in 0.3f64..0.7) {
        let m = Monodromy::new(&HGParams::halfs(3)).unwrap();
        let base = C64::new(1.0 - r, 0.0);
        let path = Path::circle(C64::new(1.0, 0.0), r, std::f64::consts::PI, Orientation::Ccw, 64);
        let (fwd, _) = m.loop_matrix(&path).unwrap();
        let (back, _) = m.loop_matrix(&path.reversed()).unwrap();
        prop_assert!(path.start() == base || (path.start() - base).norm() < 1e-12);
        prop_assert!(max_entry(&(fwd * back - CMat::identity(3, 3))) < 1e-9);
    }
}

#[test]
fn closed_form_is_unipotent_upper_triangular() {
    for n in 1..=5 {
        let m = closed_form_m0(n);
        for i in 0..n {
            assert_eq!(m.get(i, i), &Q::from_integer(1.into()));
            for j in 0..i {
                assert_eq!(m.get(i, j), &Q::from_integer(0.into()));
            }
        }
        assert!(lower_residual(&to_cmat(&m)) == 0.0);
    }
    assert_eq!(closed_form_m0(3).get(0, 2), &q(1, 2));
}

#[test]
fn conifold_loops_are_reflections() {
    for p in [HGParams::halfs(4), HGParams::dwork(3)] {
        let m = Monodromy::new(&p).unwrap();
        let m1 = m.monodromy_loop(Puncture::One, C64::new(0.5, 0.0)).unwrap();
        assert_eq!(numerical_rank(&(&m1.matrix - CMat::identity(4, 4)), 1e-6), 1);
        assert!(m1.residual < 1e-8);
    }
}

#[test]
fn relations_hold_for_dwork() {
    let m = Monodromy::new(&HGParams::dwork(3)).unwrap();
    let r = m.relations(C64::new(0.5, 0.0)).unwrap();
    assert!(r.m1_residual < 1e-8, "{}", r.m1_residual);
    assert!(r.composition_residual < 1e-8);
    assert!(r.conjugacy_residual < 1e-7);
    // Distinct exponents at ∞: the local loop is diagonal with e^{−2πik/5}.
    let local = &r.infinity_local.matrix;
    let mut diag: Vec<C64> = (0..4).map(|i| local[(i, i)]).collect();
    diag.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
    for k in 1..=4 {
        let want = C64::from_polar(1.0, -2.0 * std::f64::consts::PI * k as f64 / 5.0);
        assert!(diag.iter().any(|d| (d - want).norm() < 1e-8), "missing {want}");
    }
}

#[test]
fn paths_must_avoid_singularities() {
    let m = Monodromy::new(&HGParams::halfs(2)).unwrap();
    let open = Path::segment(C64::new(0.5, 0.0), C64::new(0.5, 0.5)).unwrap();
    assert!(matches!(m.loop_matrix(&open), Err(MonodromyError::BadPath(_))));
    let through_one = Path::new(vec![C64::new(0.5, 0.0), C64::new(1.5, 0.0), C64::new(0.5, 0.5), C64::new(0.5, 0.0)]).unwrap();
    let err = m.loop_matrix(&through_one).unwrap_err();
    assert!(matches!(err, MonodromyError::PunctureTooClose { .. }), "{err:?}");
    assert!(Path::new(vec![]).is_err());
    assert!(Monodromy::new(&HGParams::new(vec![q(1, 2)], vec![]).unwrap()).is_ok());
}
