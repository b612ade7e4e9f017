use std::path::Path;
use std::str::FromStr;

use cyattract::arith::{
    count_points, is_good_prime, jacobi_point_count, quartic_factor, weil_envelope, weil_validate, ArithError,
    FiniteField, WeightedHypersurface, DEFAULT_BUDGET,
};
use cyattract::attractor::{
    charge_scan, gradient_flow, moment_checks, Charge, FlowOptions, FlowStatus, Model,
};
use cyattract::boundary::{
    boundary_constraints, lmhs_type, orbit_coefficients, weight_filtration, Component, LaurentPeriods,
};
use cyattract::exact::{q_string, GaussRat, Matrix, Q};
use cyattract::hyperseries::{frobenius_basis, HGParams};
use cyattract::k3e::{
    central_charge_norm, class_enumerate, Bqf, mobius, reduce_bqf, reduce_tau, shioda_inose_form, tau_from_charges,
    ChargePairK3,
};
use cyattract::monodromy::{closed_form_m0, numerical_rank, to_cmat, CMat, Monodromy, Puncture, TransportOptions};
use cyattract::periods::{
    kahler_potential, local_model, pairing, transition_s, FamilyPeriods, FrameTag, LocalKind, LocalModel,
    PeriodVector, Prepotential, SymplecticForm,
};
use num_complex::Complex64;
use num_integer::Integer;
use serde_json::{json, Value};

use crate::config::{pick, positive, PrepotentialConfig, RunConfig};
use crate::error::CliError;
use crate::num::{cmat, cvec, cx, dec, gauss_string, parse_c64, parse_gauss, parse_rational};
use crate::Command;

/// Hodge numbers of the resolved octic used for the Weil envelope.
const OCTIC_H11: u64 = 2;
const OCTIC_H21: u64 = 86;
/// Size of the sampled group perturbations in the moment-map check.
const MOMENT_EPSILON: f64 = 1e-2;

pub fn dispatch(cmd: &Command, mut cfg: RunConfig) -> Result<(&'static str, Value, RunConfig), CliError> {
    let (name, value) = match cmd {
        Command::Periods(a) => ("periods", periods(a, &mut cfg)?),
        Command::Monodromy(a) => ("monodromy", monodromy(a, &mut cfg)?),
        Command::Flow(a) => ("flow", flow(a, &mut cfg)?),
        Command::Scan(a) => ("scan", scan(a, &mut cfg)?),
        Command::Boundary(a) => ("boundary", boundary(a, &mut cfg)?),
        Command::K3e(a) => ("k3e", k3e(a, &mut cfg)?),
        Command::Zeta(a) => ("zeta", zeta(a, &mut cfg)?),
        Command::Selftest => ("selftest", selftest(&mut cfg)),
    };
    cfg.command = Some(name.into());
    cfg.precision = Some(cfg.precision());
    cfg.seed = Some(cfg.seed());
    Ok((name, value, cfg))
}

fn qmat(m: &Matrix<Q>) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| json!(q_string(m.get(i, j)))).collect())).collect())
}

fn gmat(m: &Matrix<GaussRat>) -> Value {
    Value::Array(
        (0..m.rows()).map(|i| Value::Array((0..m.cols()).map(|j| json!(gauss_string(m.get(i, j)))).collect())).collect(),
    )
}

fn family(flag: &Option<String>, cfg: &mut RunConfig, default: &str) -> Result<HGParams, CliError> {
    let name = pick(flag, &cfg.family, default.to_string());
    let params = HGParams::preset(&name)?;
    cfg.family = Some(name);
    Ok(params)
}

fn prepotential(file: &Option<std::path::PathBuf>, cfg: &mut RunConfig) -> Result<Prepotential, CliError> {
    let mut pc = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            toml::from_str::<PrepotentialConfig>(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => cfg.prepotential.clone().unwrap_or_default(),
    };
    let d = Prepotential::halfs4_default();
    let get = |s: &mut Option<String>, fallback: &GaussRat| -> Result<GaussRat, CliError> {
        let g = match s {
            Some(text) => parse_gauss(text)?,
            None => fallback.clone(),
        };
        *s = Some(gauss_string(&g));
        Ok(g)
    };
    let phi111 = get(&mut pc.phi111, &d.phi111)?;
    let phi011 = get(&mut pc.phi011, &d.phi011)?;
    let phi001 = get(&mut pc.phi001, &d.phi001)?;
    let phi000 = get(&mut pc.phi000, &d.phi000)?;
    let constant = match &pc.constant {
        Some(text) => parse_rational(text)?,
        None => d.constant.clone(),
    };
    pc.constant = Some(q_string(&constant));
    cfg.prepotential = Some(pc);
    Ok(Prepotential::new(phi111, phi011, phi001, phi000, constant))
}

fn periods_json(p: &PeriodVector, prec: usize) -> Value {
    let sigma = SymplecticForm::standard();
    let mut v = json!({
        "frame": p.frame().to_string(),
        "point": cx(p.point(), prec),
        "entries": cvec(p.entries(), prec),
    });
    if p.frame().is_symplectic() {
        v["pairing"] = json!(dec(pairing(p.entries(), &sigma), prec));
        v["kahler_potential"] = match kahler_potential(p, &sigma) {
            Ok(k) => json!(dec(k, prec)),
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    v
}

fn periods(a: &crate::PeriodsArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let frame = pick(&a.frame, &cfg.frame, "symplectic".to_string()).to_ascii_lowercase();
    let t_text = pick(&a.t, &cfg.t, "0.1".to_string());
    let t = parse_c64(&t_text)?;
    cfg.t = Some(t_text);
    cfg.frame = Some(frame.clone());
    if let Ok(kind) = LocalKind::from_str(&frame) {
        let s = pick(&a.scale, &cfg.scale, "1".to_string());
        let scale = parse_c64(&s)?;
        cfg.scale = Some(s);
        let p = local_model(kind, t, scale)?;
        return Ok(json!({ "model": kind.to_string(), "periods": periods_json(&p, prec) }));
    }
    let params = family(&a.family, cfg, "halfs-4")?;
    let order = pick(&a.order, &cfg.order, 120);
    cfg.order = Some(order);
    let basis = frobenius_basis(&params, order)?;
    let mut entries = Vec::with_capacity(basis.len());
    let mut tail: f64 = 0.0;
    for s in &basis {
        let (v, tl) = s.evaluate(t)?;
        entries.push(v);
        tail = tail.max(tl);
    }
    let mut out = json!({
        "family": cfg.family,
        "order": order,
        "tail_estimate": dec(tail, prec),
        "frobenius": cvec(&entries, prec),
    });
    match frame.as_str() {
        "frobenius" => {}
        "symplectic" => {
            let pre = prepotential(&a.prepotential, cfg)?;
            let w: [Complex64; 4] = entries
                .clone()
                .try_into()
                .map_err(|_| CliError::Usage("the symplectic frame needs an order-4 family".into()))?;
            let s = transition_s(&pre)?;
            let p = s.apply(&PeriodVector::new(w, FrameTag::Frobenius0, t)?)?;
            out["transition"] = cmat(&s.matrix, prec);
            out["periods"] = periods_json(&p, prec);
        }
        other => return Err(CliError::Usage(format!("unknown frame {other:?}"))),
    }
    Ok(out)
}

fn eigenvalues(m: &CMat) -> Option<Vec<Complex64>> {
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-14, 10_000)?;
    schur.eigenvalues().map(|v| {
        let mut e: Vec<Complex64> = v.iter().copied().collect();
        e.sort_by(|a, b| a.arg().total_cmp(&b.arg()).then(a.norm().total_cmp(&b.norm())));
        e
    })
}

fn monodromy(a: &crate::MonodromyArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let params = family(&a.family, cfg, "halfs-4")?;
    let which = pick(&a.loop_, &cfg.loop_, "0".to_string());
    let base_text = pick(&a.base, &cfg.base, "0.5".to_string());
    let base = parse_c64(&base_text)?;
    let tol = positive("transport_tol", pick(&a.transport_tol, &cfg.transport_tol, TransportOptions::default().tol))?;
    cfg.loop_ = Some(which.clone());
    cfg.base = Some(base_text);
    cfg.transport_tol = Some(tol);
    let m = Monodromy::new(&params)?.with_options(TransportOptions { tol, ..TransportOptions::default() });
    let n = m.n();
    let id = CMat::identity(n, n);
    let entry = |mm: &cyattract::monodromy::MonodromyMatrix| {
        json!({
            "matrix": cmat(&mm.matrix, prec),
            "residual": dec(mm.residual, prec),
            "description": mm.description,
            "eigenvalues": eigenvalues(&mm.matrix).map(|e| cvec(&e, prec)),
            "rank_minus_identity": numerical_rank(&(&mm.matrix - &id), 1e-6),
        })
    };
    if which == "all" {
        let r = m.relations(base)?;
        return Ok(json!({
            "family": cfg.family,
            "m0": entry(&r.m0),
            "m1": entry(&r.m1),
            "minf": entry(&r.minf),
            "product_order": r.order.to_string(),
            "m1_residual": dec(r.m1_residual, prec),
            "composition_residual": dec(r.composition_residual, prec),
            "connection": cmat(&r.connection, prec),
            "infinity_local": entry(&r.infinity_local),
            "stated_relation_residual": dec(r.stated_relation_residual, prec),
            "conjugacy_residual": dec(r.conjugacy_residual, prec),
            "closed_form_m0_residual": dec(max_abs(&(&r.m0.matrix - to_cmat(&closed_form_m0(n)))), prec),
        }));
    }
    let puncture = Puncture::from_str(&which).map_err(CliError::Usage)?;
    let mm = m.monodromy_loop(puncture, base)?;
    let mut out = json!({ "family": cfg.family, "loop": puncture.to_string(), "monodromy": entry(&mm) });
    if puncture == Puncture::Zero {
        let exact = closed_form_m0(n);
        out["closed_form"] = qmat(&exact);
        out["closed_form_residual"] = json!(dec(max_abs(&(&mm.matrix - to_cmat(&exact))), prec));
    }
    Ok(out)
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn flow_model(
    family_flag: &Option<String>,
    model_flag: &Option<String>,
    scale_flag: &Option<String>,
    radius_flag: &Option<f64>,
    prepot: &Option<std::path::PathBuf>,
    cfg: &mut RunConfig,
) -> Result<Model, CliError> {
    let model = pick(model_flag, &cfg.model, "family".to_string()).to_ascii_lowercase();
    cfg.model = Some(model.clone());
    if model == "family" {
        let params = family(family_flag, cfg, "halfs-4")?;
        let pre = prepotential(prepot, cfg)?;
        let radius = positive("radius", pick(radius_flag, &cfg.radius, 0.8))?;
        cfg.radius = Some(radius);
        return Ok(Model::Family(FamilyPeriods::new(&params, &pre, radius)?));
    }
    let kind = LocalKind::from_str(&model).map_err(CliError::Usage)?;
    let s = pick(scale_flag, &cfg.scale, "1".to_string());
    let scale = parse_c64(&s)?;
    cfg.scale = Some(s);
    Ok(Model::Local(match radius_flag.or(cfg.radius) {
        Some(r) => {
            cfg.radius = Some(positive("radius", r)?);
            LocalModel::with_region(kind, scale, r)
        }
        None => LocalModel::new(kind, scale),
    }))
}

fn flow(a: &crate::FlowArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let model = flow_model(&a.family, &a.model, &a.scale, &a.radius, &a.prepotential, cfg)?;
    let charge_text = pick(&a.charge, &cfg.charge, "1,0,0,0".to_string());
    let charge = Charge::parse(&charge_text)?;
    let start_text = pick(&a.start, &cfg.start, "0.3+0.2i".to_string());
    let start = parse_c64(&start_text)?;
    let defaults = FlowOptions::default();
    let opts = FlowOptions {
        max_steps: pick(&a.max_steps, &cfg.max_steps, defaults.max_steps),
        grad_tol: positive("grad_tol", pick(&a.grad_tol, &cfg.grad_tol, defaults.grad_tol))?,
        ..defaults
    };
    let samples = pick(&a.moment_samples, &cfg.moment_samples, 100);
    let moment_tol = positive("moment_tol", pick(&a.moment_tol, &cfg.moment_tol, 1e-6))?;
    cfg.charge = Some(charge.to_string());
    cfg.start = Some(start_text);
    cfg.max_steps = Some(opts.max_steps);
    cfg.grad_tol = Some(opts.grad_tol);
    cfg.moment_samples = Some(samples);
    cfg.moment_tol = Some(moment_tol);
    let sigma = SymplecticForm::standard();
    let state = gradient_flow(&model, &charge.real(), start, &sigma, &opts)?;
    if let Some(path) = &a.csv {
        let mut text = String::from("rho,t_re,t_im,abs_z,u\n");
        for p in &state.trajectory {
            text += &format!("{},{},{},{},{}\n", dec(p.rho, prec), dec(p.t.re, prec), dec(p.t.im, prec), dec(p.abs_z, prec), dec(p.u, prec));
        }
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let end = *state.end();
    let monotone = state.trajectory.windows(2).all(|w| w[1].abs_z <= w[0].abs_z * (1.0 + opts.slack));
    let moment = match state.status {
        FlowStatus::Converged | FlowStatus::Massless => {
            let r = moment_checks(&model, end.t, &charge.real(), samples, MOMENT_EPSILON, moment_tol, cfg.seed(), &sigma)?;
            json!({
                "samples": r.samples,
                "violations": r.violations,
                "degenerate": r.degenerate,
                "abs_z": dec(r.abs_z, prec),
                "worst_margin": dec(r.worst_margin, prec),
                "identity_gap": dec(r.identity_gap, prec),
                "weight_trend": r.weight_trend.iter().map(|(t, w)| json!([dec(*t, prec), dec(*w, prec)])).collect::<Vec<_>>(),
                "weight_limits": [dec(r.weight_limits.0, prec), dec(r.weight_limits.1, prec)],
            })
        }
        _ => Value::Null,
    };
    Ok(json!({
        "model": cfg.model,
        "charge": charge.to_string(),
        "status": state.status.to_string(),
        "steps": state.trajectory.len() - 1,
        "monotone": monotone,
        "metric": dec(state.metric, prec),
        "end": { "t": cx(end.t, prec), "abs_z": dec(end.abs_z, prec), "rho": dec(end.rho, prec) },
        "moment_check": moment,
        "trajectory": state.trajectory.iter().map(|p| json!({
            "rho": dec(p.rho, prec),
            "t": cx(p.t, prec),
            "abs_z": dec(p.abs_z, prec),
            "u": dec(p.u, prec),
        })).collect::<Vec<_>>(),
    }))
}

/// Sample points from `grid:RxC` over the square of half-width 0.75·radius,
/// dropping points near the model's boundaries, or an explicit `;` list.
fn parse_starts(text: &str, model: &Model) -> Result<Vec<Complex64>, CliError> {
    if let Some(dims) = text.strip_prefix("grid:") {
        let (r, c) = dims
            .split_once('x')
            .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)))
            .filter(|&(r, c)| r > 0 && c > 0)
            .ok_or_else(|| CliError::Usage(format!("bad grid {text:?}")))?;
        let half = 0.75 * model.domain_radius();
        let lin = |k: usize, n: usize| -half + 2.0 * half * (k as f64 + 0.5) / n as f64;
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..c {
                let z = Complex64::new(lin(j, c), lin(i, r));
                let clear = model.boundaries().iter().all(|(b, _)| (z - b).norm() > 0.05);
                if clear && z.norm() < model.domain_radius() {
                    out.push(z);
                }
            }
        }
        return Ok(out);
    }
    text.split(';').map(parse_c64).collect()
}

fn scan(a: &crate::ScanArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let model = flow_model(&a.family, &a.model, &a.scale, &a.radius, &a.prepotential, cfg)?;
    let radius = pick(&a.box_, &cfg.box_, 1);
    if !(0..=4).contains(&radius) {
        return Err(CliError::Usage(format!("box radius {radius} outside 0..=4")));
    }
    let starts_text = pick(&a.starts, &cfg.starts, "grid:3x3".to_string());
    let starts = parse_starts(&starts_text, &model)?;
    let defaults = FlowOptions::default();
    let opts = FlowOptions {
        max_steps: pick(&a.max_steps, &cfg.max_steps, 2000),
        grad_tol: positive("grad_tol", pick(&a.grad_tol, &cfg.grad_tol, defaults.grad_tol))?,
        ..defaults
    };
    cfg.box_ = Some(radius);
    cfg.starts = Some(starts_text);
    cfg.max_steps = Some(opts.max_steps);
    cfg.grad_tol = Some(opts.grad_tol);
    let entries = charge_scan(&model, radius, &starts, &SymplecticForm::standard(), &opts);
    let mut summary = std::collections::BTreeMap::<String, usize>::new();
    for e in &entries {
        *summary.entry(e.status.clone()).or_default() += 1;
    }
    Ok(json!({
        "model": cfg.model,
        "starts": cvec(&starts, prec),
        "summary": summary,
        "entries": entries.iter().map(|e| json!({
            "charge": e.charge.to_string(),
            "start": cx(e.start, prec),
            "status": e.status,
            "endpoint": cx(e.endpoint, prec),
            "abs_z": dec(e.abs_z, prec),
            "attractor": e.attractor.map(|z| cx(z, prec)),
            "residual": dec(e.residual, prec),
            "integral": e.integral,
            "error": e.error,
        })).collect::<Vec<_>>(),
    }))
}

fn component(kind: &str, params: &str) -> Result<Component, CliError> {
    let v: Vec<Q> = params.split(',').map(parse_rational).collect::<Result<_, _>>()?;
    let bad = || CliError::Usage(format!("{kind} does not take parameters {params:?}"));
    Ok(match (kind, v.as_slice()) {
        ("N1", [a, b, c, d]) => Component::N1 { a: a.clone(), b: b.clone(), c: c.clone(), d: d.clone() },
        ("N2", [a]) => Component::N2 { a: a.clone() },
        ("N3", [a, b, d]) => Component::N3 { a: a.clone(), b: b.clone(), d: d.clone() },
        ("N3", [a, b, c, d]) if b == c => Component::N3 { a: a.clone(), b: b.clone(), d: d.clone() },
        _ => return Err(bad()),
    })
}

fn boundary(a: &crate::BoundaryArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let kind = pick(&a.kind, &cfg.kind, "N3".to_string()).to_ascii_uppercase();
    let default_params = match kind.as_str() {
        "N1" => "1,1,0,0",
        "N2" => "1",
        _ => "1,0,0,1",
    };
    let params = pick(&a.a, &cfg.a, default_params.to_string());
    let comp = component(&kind, &params)?;
    cfg.kind = Some(kind.clone());
    cfg.a = Some(params);
    let n = comp.generator()?;
    let w = weight_filtration(&n);
    let standard = SymplecticForm::standard();
    let antidiag = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]];
    let lmhs = match lmhs_type(&n) {
        Ok(t) => json!({
            "kind": t.kind.to_string(),
            "ipq": t.ipq.iter().map(|x| json!([x.p, x.q, x.mult])).collect::<Vec<_>>(),
            "arrows": t.arrows,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let mut out = json!({
        "component": comp.name(),
        "generator": qmat(n.matrix()),
        "nilpotency_index": n.index(),
        "rank": n.rank(),
        "symplectic": {
            "standard": n.is_infinitesimally_symplectic(standard.entries()),
            "antidiagonal": n.is_infinitesimally_symplectic(&antidiag),
        },
        "weight_filtration": { "dims": w.dims(), "gr_dims": w.gr_dims() },
        "lmhs": lmhs,
        "orbit_coefficients": orbit_coefficients(&n).iter().map(gmat).collect::<Vec<_>>(),
    });
    let path = a.periods.clone().or_else(|| cfg.periods.clone());
    if let Some(path) = path {
        let pi = load_laurent(&path)?;
        let r = boundary_constraints(&comp, &pi)?;
        out["residuals"] = Value::Array(r.iter().map(|x| json!(dec(*x, prec))).collect());
        out["max_residual"] = json!(dec(r.iter().copied().fold(0.0, f64::max), prec));
        cfg.periods = Some(path);
    }
    Ok(out)
}

fn load_laurent(path: &Path) -> Result<LaurentPeriods, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn k3e(a: &crate::K3eArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let need = |flag: &Option<i64>, c: &Option<i64>, name: &str| {
        flag.or(*c).ok_or_else(|| CliError::Usage(format!("--{name} is required")))
    };
    let (pp, pq, qq) = (need(&a.pp, &cfg.pp, "pp")?, need(&a.pq, &cfg.pq, "pq")?, need(&a.qq, &cfg.qq, "qq")?);
    cfg.pp = Some(pp);
    cfg.pq = Some(pq);
    cfg.qq = Some(qq);
    let c = ChargePairK3::new(pp, pq, qq)?;
    let tau = tau_from_charges(&c)?;
    let form = shioda_inose_form(&c)?;
    let (reduced, g) = reduce_bqf(&form)?;
    let (tau_red, h) = reduce_tau(tau);
    // Classes are listed for the primitive part of the form.
    let content = reduced.a.gcd(&reduced.b).gcd(&reduced.c);
    let primitive = Bqf::new(reduced.a / content, reduced.b / content, reduced.c / content);
    let classes = class_enumerate(primitive.discriminant())?;
    let class_of_reduced = classes.iter().position(|f| *f == primitive);
    Ok(json!({
        "tau": cx(tau, prec),
        "abs_z": dec(central_charge_norm(&c)?, prec),
        "discriminant": c.discriminant(),
        "form": form.to_string(),
        "form_discriminant": form.discriminant(),
        "reduced_form": reduced.to_string(),
        "witness": g,
        "tau_reduced": cx(tau_red, prec),
        "tau_witness": h,
        "reduced_root": cx(reduced.root()?, prec),
        "witness_check": cx(mobius(&h, tau), prec),
        "content": content,
        "primitive_discriminant": primitive.discriminant(),
        "class_number": classes.len(),
        "classes": classes.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "class_index": class_of_reduced,
    }))
}

fn zeta(a: &crate::ZetaArgs, cfg: &mut RunConfig) -> Result<Value, CliError> {
    let prec = cfg.precision();
    let fam = pick(&a.family, &cfg.family, "octic".to_string());
    if fam != "octic" {
        return Err(CliError::Usage(format!("zeta supports the octic family only, got {fam:?}")));
    }
    let psi_text = pick(&a.psi, &cfg.psi, "0".to_string());
    let phi_text = pick(&a.phi, &cfg.phi, "0".to_string());
    let (psi, phi) = (parse_rational(&psi_text)?, parse_rational(&phi_text)?);
    let p = pick(&a.p, &cfg.p, 3);
    let f = pick(&a.extension, &cfg.extension, 1);
    let method = pick(&a.method, &cfg.method, "jacobi".to_string());
    let rank = pick(&a.generator_rank, &cfg.generator_rank, 0);
    let budget = pick(&a.budget, &cfg.budget, DEFAULT_BUDGET);
    cfg.family = Some(fam);
    cfg.psi = Some(q_string(&psi));
    cfg.phi = Some(q_string(&phi));
    cfg.p = Some(p);
    cfg.extension = Some(f);
    cfg.method = Some(method.clone());
    cfg.generator_rank = Some(rank);
    cfg.budget = Some(budget);
    let x = WeightedHypersurface::octic(psi, phi);
    if !is_good_prime(p, x.degree()) {
        return Err(ArithError::BadPrime(p).into());
    }
    let k = FiniteField::with_generator(p, f, rank)?;
    let count = match method.as_str() {
        "jacobi" => jacobi_point_count(&x, &k)?,
        "brute" => count_points(&x, &k, budget)?,
        other => return Err(CliError::Usage(format!("unknown method {other:?}, expected jacobi or brute"))),
    };
    let env = weil_envelope(&count, OCTIC_H11, OCTIC_H21);
    let quartic = if x.is_diagonal() {
        match quartic_factor(&x, p, rank) {
            Ok(r) => {
                let cands: Vec<Value> = r
                    .candidates
                    .iter()
                    .map(|c| {
                        let w = weil_validate(c);
                        json!({
                            "c_p": c.c_p,
                            "d_p": c.d_p,
                            "coefficients": c.coeffs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                            "multiplicity": c.multiplicity,
                            "c_characters": c.c_tuples,
                            "d_characters": c.d_tuples,
                            "weil": {
                                "passed": w.passed,
                                "moduli_ok": w.moduli_ok,
                                "pairing_ok": w.pairing_ok,
                                "leading_ok": w.leading_ok,
                                "modulus_error": dec(w.modulus_error, prec),
                                "roots": cvec(&w.roots, prec),
                            },
                        })
                    })
                    .collect();
                let best = r.best();
                json!({ "status": "split", "c_p": r.c_p, "d_p": best.d_p, "candidates": cands })
            }
            Err(ArithError::NoIntegralQuartic(_)) => json!({ "status": "no-integral-split" }),
            Err(e) => return Err(e.into()),
        }
    } else {
        json!({ "status": "deformed-fiber-not-supported" })
    };
    Ok(json!({
        "hypersurface": x.describe(),
        "q": count.q,
        "counts": {
            "affine": count.affine,
            "projective": count.orbits,
            "naive": count.naive,
            "by_support": count.by_support,
        },
        "weil_envelope": {
            "skeleton": env.skeleton,
            "deviation": env.deviation.to_string(),
            "bound": dec(env.bound, prec),
            "within": env.within,
        },
        "quartic": quartic,
    }))
}

fn selftest(cfg: &mut RunConfig) -> Value {
    let checks = crate::selftest::run(cfg.seed());
    let failed = checks.iter().filter(|c| !c.passed).count();
    json!({
        "checks": checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
        "passed": checks.len() - failed,
        "failed": failed,
    })
}
