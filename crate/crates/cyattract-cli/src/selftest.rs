//! Fast invariant checks across the library, used by `cyattract selftest`.

use cyattract::arith::{count_points, jacobi_point_count, quartic_factor, FiniteField, WeightedHypersurface, DEFAULT_BUDGET};
use cyattract::attractor::{gradient_flow, FlowOptions, Model};
use cyattract::boundary::{boundary_constraints, weight_filtration, Component, LaurentPeriods, NilpotentEndo};
use cyattract::exact::{q, qi, Subspace};
use cyattract::hyperseries::{frobenius_basis, hadamard, hg_series, HGParams};
use cyattract::k3e::{class_enumerate, reduce_bqf, shioda_inose_form, tau_from_charges, Bqf, ChargePairK3};
use cyattract::monodromy::{closed_form_m0, to_cmat, Monodromy, Puncture};
use cyattract::periods::{FrameTag, LocalKind, LocalModel, SymplecticForm};
use cyattract::picard_fuchs::{apply, build_operator};
use num_complex::Complex64;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String), String>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

fn filtration_ok(n: &NilpotentEndo) -> bool {
    let w = weight_filtration(n);
    let gr = w.gr_dims();
    let shifts = (0..=6).all(|k| {
        let image: Subspace<_> = w.w(k).map_by(n.matrix());
        w.w(k - 2).contains_space(&image)
    });
    shifts && (0..7).all(|i| gr[i] == gr[6 - i])
}

pub fn run(_seed: u64) -> Vec<Check> {
    vec![
        check("hadamard-2F1", || {
            let one = hg_series(&HGParams::new(vec![q(1, 2)], vec![]).map_err(|e| e.to_string())?, 60).map_err(|e| e.to_string())?;
            let two = hg_series(&HGParams::halfs(2), 60).map_err(|e| e.to_string())?;
            let h = hadamard(&one, &one).map_err(|e| e.to_string())?;
            Ok((h == two, "coefficients through order 60".into()))
        }),
        check("picard-fuchs-halfs-4", || {
            let p = HGParams::halfs(4);
            let op = build_operator(&p);
            let basis = frobenius_basis(&p, 30).map_err(|e| e.to_string())?;
            let ok = basis.iter().all(|f| apply(&op, f).is_zero());
            Ok((ok, "four Frobenius solutions through order 30".into()))
        }),
        check("monodromy-m0-halfs-2", || {
            let m = Monodromy::new(&HGParams::halfs(2)).map_err(|e| e.to_string())?;
            let mm = m.monodromy_loop(Puncture::Zero, Complex64::new(0.5, 0.0)).map_err(|e| e.to_string())?;
            let err = (&mm.matrix - to_cmat(&closed_form_m0(2))).iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok((err < 1e-7, format!("max entry error {err:.2e}")))
        }),
        check("k3e-202", || {
            let c = ChargePairK3::new(2, 0, 2).map_err(|e| e.to_string())?;
            let tau = tau_from_charges(&c).map_err(|e| e.to_string())?;
            let (r, _) = reduce_bqf(&shioda_inose_form(&c).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            Ok(((tau - Complex64::i()).norm() < 1e-12 && r == Bqf::new(2, 0, 2), format!("tau = {tau}, reduced {r}")))
        }),
        check("class-number-23", || {
            let n = class_enumerate(-23).map_err(|e| e.to_string())?.len();
            Ok((n == 3, format!("h(-23) = {n}")))
        }),
        check("weight-filtrations", || {
            let ns = [
                NilpotentEndo::n1(qi(1), qi(1), qi(0), qi(0)),
                NilpotentEndo::n2(qi(1)),
                NilpotentEndo::n3(qi(1), qi(0), qi(1)).map_err(|e| e.to_string())?,
            ];
            Ok((ns.iter().all(filtration_ok), "N W_k in W_(k-2) and Gr symmetry".into()))
        }),
        check("boundary-n3-constructed", || {
            // Π = (u/z)e₁ + (0, 0, −a·u, −i·b·u) with a = 1, b = 1/2.
            let u = Complex64::new(0.7, 0.3);
            let i = Complex64::i();
            let zero = Complex64::new(0.0, 0.0);
            let pi = LaurentPeriods::new(FrameTag::Symplectic)
                .with_term(-1, [u, zero, zero, zero])
                .with_term(0, [zero, zero, -u, -i * u * 0.5]);
            let comp = Component::N3 { a: qi(1), b: q(1, 2), d: qi(2) };
            let r = boundary_constraints(&comp, &pi).map_err(|e| e.to_string())?;
            let worst = r.iter().copied().fold(0.0, f64::max);
            Ok((worst < 1e-12, format!("max residual {worst:.2e}")))
        }),
        check("zeta-f3", || {
            let x = WeightedHypersurface::octic(qi(0), qi(0));
            let k = FiniteField::new(3, 1).map_err(|e| e.to_string())?;
            let j = jacobi_point_count(&x, &k).map_err(|e| e.to_string())?;
            let b = count_points(&x, &k, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let c = quartic_factor(&x, 3, 0).map_err(|e| e.to_string())?.c_p;
            Ok((j == b && c == 0, format!("#X(F_3) = {}, c_3 = {c}", j.orbits)))
        }),
        check("conifold-flow", || {
            let model = Model::Local(LocalModel::new(LocalKind::Conifold, Complex64::new(1.0, 0.0)));
            let s = gradient_flow(&model, &[0.0, 0.0, 0.0, 1.0], Complex64::new(0.2, 0.1), &SymplecticForm::standard(), &FlowOptions::default())
                .map_err(|e| e.to_string())?;
            let end = s.end();
            Ok((end.t.norm() < 1e-3, format!("{} at |z| = {:.2e}", s.status, end.t.norm())))
        }),
    ]
}
