use cyattract::boundary::{
    boundary_constraints, exp_nilpotent, exp_series, lmhs_type, nilpotent_orbit_limit, orbit_polynomial_exact,
    weight_filtration, BoundaryError, Component, ComponentLimit, LaurentPeriods, LmhsKind, NilpotentEndo,
};
use cyattract::exact::{q, qi, GaussRat, Matrix, Subspace, Q};
use cyattract::periods::FrameTag;
use num_complex::Complex64 as C64;
use num_traits::{One, Zero};
use proptest::prelude::*;

const STANDARD: [[i64; 4]; 4] = [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]];

fn small_q() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn gauss() -> impl Strategy<Value = GaussRat> {
    (small_q(), small_q()).prop_map(|(a, b)| GaussRat::new(a, b))
}

/// P·J·P⁻¹ for a Jordan type of 4 and an invertible integer P.
fn nilpotent() -> impl Strategy<Value = NilpotentEndo> {
    let types: Vec<Vec<usize>> = vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]];
    (prop::sample::select(types), prop::collection::vec(-3i64..=3, 16))
        .prop_filter_map("invertible P", |(blocks, entries)| {
            let p = Matrix::from_fn(4, 4, |i, j| qi(entries[4 * i + j]));
            let inv = p.inverse()?;
            let mut j = Matrix::zeros(4, 4);
            let mut offset = 0;
            for b in blocks {
                for i in 0..b - 1 {
                    j.set(offset + i + 1, offset + i, Q::one());
                }
                offset += b;
            }
            NilpotentEndo::new(p.mul(&j).mul(&inv)).ok()
        })
}

fn c64() -> impl Strategy<Value = C64> {
    (0.5f64..2.0, -3.2f64..3.2).prop_map(|(r, a)| C64::from_polar(r, a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weight_filtration_axioms(n in nilpotent()) {
        let w = weight_filtration(&n);
        let dims = w.dims();
        prop_assert!(dims.windows(2).all(|d| d[0] <= d[1]));
        prop_assert_eq!(dims[6], 4);
        for k in 0..=6 {
            let image: Subspace<Q> = w.w(k).map_by(n.matrix());
            prop_assert!(w.w(k - 2).contains_space(&image));
        }
        let gr = w.gr_dims();
        prop_assert!((0..7).all(|i| gr[i] == gr[6 - i]));
        // The largest Jordan block fixes the extreme weights.
        let top = (0..7).rev().find(|&i| gr[i] > 0).unwrap();
        prop_assert_eq!(top as u32, 3 + n.index() - 1);
    }

    #[test]
    fn exp_is_a_one_parameter_group(n in nilpotent(), z in gauss(), c in gauss()) {
        let sum = exp_nilpotent(&n, &(z.clone() + c.clone()));
        prop_assert_eq!(sum, exp_nilpotent(&n, &z).mul(&exp_nilpotent(&n, &c)));
        let inverse = exp_nilpotent(&n, &(-z.clone()));
        prop_assert_eq!(exp_nilpotent(&n, &z).mul(&inverse), Matrix::identity(4));
        let minus_iz = -(GaussRat::i() * z);
        let full = exp_series(&n.matrix().to_gauss().scale(&minus_iz), 10);
        prop_assert_eq!(full, exp_nilpotent(&n, &(minus_iz * GaussRat::i())));
    }

    #[test]
    fn shifting_z_moves_the_limit_by_exp(n in nilpotent(), c in gauss(), entries in prop::collection::vec(gauss(), 4)) {
        let pi: [GaussRat; 4] = std::array::from_fn(|i| entries[i].clone());
        let shift = exp_nilpotent(&n, &c);
        let moved = shift.mul_vec(&pi);
        let moved: [GaussRat; 4] = std::array::from_fn(|i| moved[i].clone());
        // exp(−i(z+c)N)Π = exp(−izN)·exp(−icN)Π as polynomials in z.
        let direct = orbit_polynomial_exact(&n, &moved);
        let z = GaussRat::new(q(7, 3), qi(5));
        let eval = |coeffs: &[[GaussRat; 4]]| -> Vec<GaussRat> {
            (0..4).map(|i| coeffs.iter().rev().fold(GaussRat::zero(), |acc, v| acc * z.clone() + v[i].clone())).collect()
        };
        let shifted = exp_nilpotent(&n, &(z.clone() + c)).mul_vec(&pi);
        prop_assert_eq!(eval(&direct), shifted);

        let pc: [C64; 4] = std::array::from_fn(|i| pi[i].to_c64());
        let lim = nilpotent_orbit_limit(&n, &pc, &[z.to_c64()]);
        let expected = exp_nilpotent(&n, &z).mul_vec(&pi);
        for i in 0..4 {
            prop_assert!((lim.samples[0].1[i] - expected[i].to_c64()).norm() < 1e-9 * (1.0 + expected[i].to_c64().norm()));
        }
    }

    #[test]
    fn constructed_n2_vectors_satisfy_constraints(a in 1i64..8, u in c64(), w in c64()) {
        let af = a as f64;
        let z = C64::new(0.0, 0.0);
        let pi = LaurentPeriods::new(FrameTag::Symplectic)
            .with_term(-1, [u, z, z, z])
            .with_term(0, [w, z, z, -u * af + w.conj()])
            .with_term(1, [z, z, z, -w * af]);
        let r = boundary_constraints(&Component::N2 { a: qi(a) }, &pi).unwrap();
        prop_assert!(r.iter().all(|x| *x < 1e-12), "{:?}", r);
    }

    #[test]
    fn constructed_n3_vectors_satisfy_constraints(a in 1i64..5, b in -2i64..=2, d in 3i64..8, u in c64()) {
        let (af, bf) = (a as f64, b as f64 / 2.0);
        let z = C64::new(0.0, 0.0);
        let pi = LaurentPeriods::new(FrameTag::Symplectic)
            .with_term(-1, [u, z, z, z])
            .with_term(0, [z, z, -u * af, -C64::i() * u * bf]);
        let comp = Component::N3 { a: qi(a), b: q(b, 2), d: qi(d) };
        let r = boundary_constraints(&comp, &pi).unwrap();
        prop_assert!(r.iter().all(|x| *x < 1e-12), "{:?}", r);
    }

    #[test]
    fn random_vectors_violate_constraints(terms in prop::collection::vec(prop::collection::vec(c64(), 4), 3)) {
        let mut pi = LaurentPeriods::new(FrameTag::Symplectic);
        for (k, v) in terms.iter().enumerate() {
            pi = pi.with_term(k as i32 - 1, [v[0], v[1], v[2], v[3]]);
        }
        for comp in [Component::N2 { a: qi(1) }, Component::N3 { a: qi(1), b: q(1, 2), d: qi(2) }] {
            let r = boundary_constraints(&comp, &pi).unwrap();
            prop_assert!(r.iter().copied().fold(0.0, f64::max) > 0.1);
        }
    }

    #[test]
    fn n3_is_infinitesimally_symplectic(a in 1i64..6, b in -3i64..=3, d in 1i64..6) {
        prop_assume!(a * d > b * b);
        let n = NilpotentEndo::n3(qi(a), qi(b), qi(d)).unwrap();
        prop_assert!(n.is_infinitesimally_symplectic(&STANDARD));
        prop_assert_eq!(n.index(), 2);
        prop_assert_eq!(lmhs_type(&n).unwrap().kind, LmhsKind::TwoPure);
    }
}

#[test]
fn example_types() {
    let n1 = NilpotentEndo::n1(qi(1), qi(1), qi(0), qi(0));
    let n2 = NilpotentEndo::n2(qi(1));
    let t1 = lmhs_type(&n1).unwrap();
    assert_eq!(t1.kind, LmhsKind::Diagonal);
    assert_eq!(t1.gr_dims, [1, 0, 1, 0, 1, 0, 1]);
    let t2 = lmhs_type(&n2).unwrap();
    assert_eq!(t2.kind, LmhsKind::IsolatedPair);
    assert_eq!(t2.gr_dims, [0, 0, 1, 2, 1, 0, 0]);
    assert_eq!(lmhs_type(&NilpotentEndo::zero()), Err(BoundaryError::UnclassifiedSignature([0, 0, 0, 4, 0, 0, 0])));
}

#[test]
fn orbit_limits_classify_components() {
    let n = NilpotentEndo::n2(qi(1));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let lim = nilpotent_orbit_limit(&n, &[one, zero, one, zero], &[C64::new(0.0, 10.0)]);
    assert!(matches!(lim.components[3], ComponentLimit::Diverges { degree: 1 }));
    assert_eq!(lim.components[1], ComponentLimit::Vanishes);
    assert_eq!(lim.components[2], ComponentLimit::Converges(one));
    assert_eq!(lim.max_degree(), 1);
}

#[test]
fn non_symplectic_frames_are_rejected() {
    let pi = LaurentPeriods::constant([C64::new(1.0, 0.0); 4], FrameTag::Frobenius0);
    assert!(matches!(boundary_constraints(&Component::N2 { a: qi(1) }, &pi), Err(BoundaryError::FrameMismatch(_))));
    assert!(NilpotentEndo::new(Matrix::identity(4)).is_err());
}
