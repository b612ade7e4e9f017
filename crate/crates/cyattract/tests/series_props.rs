use cyattract::exact::{q, q_to_f64, qi, Q};
use cyattract::hyperseries::{
    frobenius_basis, hadamard, hg_series, pochhammer, solutions_at_infinity, HGParams, LogSeries, PowerSeries, SeriesError,
    Var,
};
use cyattract::picard_fuchs::{apply, build_operator, companion};
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Fractions in (0, 1).
fn unit_fraction() -> impl Strategy<Value = Q> {
    (2i64..9).prop_flat_map(|d| (1..d).prop_map(move |n| q(n, d)))
}

fn upper(n: usize) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(unit_fraction(), n)
}

fn series(order: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec((-9i64..=9, 1i64..=5), order + 1)
        .prop_map(|c| PowerSeries::new(c.into_iter().map(|(a, b)| q(a, b)).collect(), Var::T))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hadamard_laws(a in series(12), b in series(12)) {
        let g = PowerSeries::geometric(12, Var::T);
        prop_assert_eq!(hadamard(&a, &g).unwrap(), a.clone());
        prop_assert_eq!(hadamard(&a, &b).unwrap(), hadamard(&b, &a).unwrap());
    }

    #[test]
    fn product_laws(a in series(8), b in series(8), c in series(8)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&PowerSeries::one(8, Var::T)), a.clone());
    }

    #[test]
    fn coefficients_are_pochhammer_ratios(up in upper(3), j in 0usize..30) {
        let p = HGParams::unit_lower(up.clone()).unwrap();
        let s = hg_series(&p, 30).unwrap();
        let mut expected = Q::one();
        for r in &up {
            expected *= pochhammer(r, j as u32);
        }
        let fact = pochhammer(&Q::one(), j as u32);
        expected /= num_traits::pow(fact, up.len());
        prop_assert_eq!(s.coeff(j), expected);
    }

    #[test]
    fn operator_kills_the_holomorphic_series(up in upper(3), lower in prop::collection::vec(unit_fraction(), 2)) {
        let lower: Vec<Q> = lower.into_iter().map(|b| b + Q::one()).collect();
        let p = HGParams::new(up, lower).unwrap();
        let f = LogSeries::from_series(hg_series(&p, 25).unwrap());
        prop_assert!(apply(&build_operator(&p), &f).is_zero());
    }

    #[test]
    fn operator_kills_the_frobenius_basis(n in 1usize..=3, up in upper(3)) {
        let p = HGParams::unit_lower(up[..n].to_vec()).unwrap();
        let op = build_operator(&p);
        let basis = frobenius_basis(&p, 25).unwrap();
        prop_assert_eq!(basis.len(), n);
        for (l, f) in basis.iter().enumerate() {
            prop_assert_eq!(f.log_degree(), Some(n - 1 - l));
            prop_assert!(apply(&op, f).is_zero());
        }
    }

    #[test]
    fn other_chart_kills_solutions_at_infinity(up in upper(3)) {
        let p = HGParams::unit_lower(up).unwrap();
        let op = build_operator(&p);
        let inv = op.to_other_chart();
        prop_assert_eq!(inv.to_other_chart(), op);
        match solutions_at_infinity(&p, 20) {
            Ok(sols) => {
                for s in &sols {
                    prop_assert!(apply(&inv, s).is_zero());
                }
            }
            Err(SeriesError::ResonantExponents(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn exact_and_float_evaluation_agree(up in upper(2), x in (1i64..9).prop_map(|n| q(n, 20))) {
        let s = hg_series(&HGParams::unit_lower(up).unwrap(), 40).unwrap();
        let exact = q_to_f64(&s.eval_exact(&x));
        let (float, tail) = s.eval_at(C64::new(q_to_f64(&x), 0.0));
        prop_assert!((float.re - exact).abs() < 1e-12 * exact.abs().max(1.0));
        prop_assert!(float.im == 0.0 && tail >= 0.0);
    }
}

#[test]
fn companion_residues() {
    for p in [HGParams::halfs(4), HGParams::dwork(3)] {
        let sys = companion(&build_operator(&p));
        let a0 = sys.a0();
        // The residue at 0 is nilpotent for unit lower parameters.
        assert!(a0.pow(sys.dim() as u32).is_zero());
        assert!(!sys.a1().is_zero());
        assert_eq!(sys.a1().rank(), 1);
        let at_inf = sys.residue_at_infinity();
        assert_eq!(at_inf.add(a0).add(sys.a1()), cyattract::exact::Matrix::zeros(4, 4));
    }
}

#[test]
fn invalid_parameters() {
    assert!(HGParams::new(vec![q(1, 2)], vec![qi(0)]).is_err());
    assert!(HGParams::preset("halfs-0").is_err());
    assert!(HGParams::preset("quintic-3").is_err());
    assert_eq!(HGParams::preset("dwork-3").unwrap(), HGParams::dwork(3));
    let a = PowerSeries::one(3, Var::T);
    let b = PowerSeries::one(3, Var::InvT);
    assert_eq!(hadamard(&a, &b).unwrap_err(), SeriesError::MixedVariables);
    assert!(hg_series(&HGParams::halfs(2), 0).is_err());
    let coeffs = hg_series(&HGParams::halfs(1), 5).unwrap();
    assert!(coeffs.coeffs().iter().all(|c| !c.is_zero()));
}
