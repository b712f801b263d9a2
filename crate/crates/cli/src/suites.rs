//! The verification suites and the runner that assembles a report.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use serde_json::{json, Value};
use shlie_core::coalgebra::{check_coalgebra_laws, GradedBasis};
use shlie_core::gauge::{
    build_strict_lie, check_bbvd, check_delta_hat_injective, check_theorem1, default_probes, GaugeData, StrictLieInput,
    StrictLieNotes,
};
use shlie_core::hom::{bracket_lift_mismatches, check_coderivation, gerstenhaber, Coderivation};
use shlie_core::ikeda::{
    build_ikeda_gauge_data, check_w_axioms, kirillov_kostant_mismatches, poisson_jacobi_failures, shell_equivalence,
    variation_divergence, IkedaModel,
};
use shlie_core::jet::{diagonal_field, polarize_field, EvolutionaryField, JetSpace, JetSpec, Normalization};
use shlie_core::scalar::Coeff;
use shlie_core::shell::{
    check_bbvd_system, check_gbbvd, check_gbbvd_system, check_square_zero_system, AsJetPoly, HomGauge, OnShellContext,
};
use shlie_core::shlie::{
    build_D, check_ln_relations_on_shell, check_square_zero, extract_brackets, l_basis_of, semidirect_mismatches,
    three_xi_mismatches, two_xi_mismatches, Shell,
};
use shlie_core::{QPoly, Q};

use crate::report::{ConfigEcho, Report, StructureEcho, SuiteResult, Verdict, SCHEMA_VERSION};
use crate::structure::Structure;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Coalgebra,
    Gerstenhaber,
    Bbvd,
    Theorem1,
    Shlie,
    Gbbvd,
    Ikeda,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Coalgebra, Suite::Gerstenhaber, Suite::Bbvd, Suite::Theorem1, Suite::Shlie, Suite::Gbbvd, Suite::Ikeda];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Coalgebra => "coalgebra",
            Suite::Gerstenhaber => "gerstenhaber",
            Suite::Bbvd => "bbvd",
            Suite::Theorem1 => "theorem1",
            Suite::Shlie => "shlie",
            Suite::Gbbvd => "gbbvd",
            Suite::Ikeda => "ikeda",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    One(Suite),
}

impl Selection {
    pub fn suites(&self) -> Vec<Suite> {
        match self {
            Selection::All => Suite::ALL.to_vec(),
            Selection::One(s) => vec![*s],
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: PathBuf,
    pub selection: Selection,
    pub arity_cap: usize,
    pub jet_order: usize,
    pub ideal_degree: u32,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, selection: Selection) -> Self {
        RunConfig { input: input.into(), selection, arity_cap: 4, jet_order: 2, ideal_degree: 4, jobs: None }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.arity_cap == 0 || self.jet_order == 0 || self.ideal_degree == 0 || self.jobs == Some(0) {
            return Err(CliError::Usage("caps and --jobs must be at least 1".into()));
        }
        Ok(())
    }
}

/// A structure turned into the objects the suites consume.
enum Prepared {
    Strict { input: StrictLieInput<Q>, data: GaugeData<Q>, notes: StrictLieNotes },
    Gauge { data: GaugeData<QPoly>, ctx: Option<OnShellContext> },
    Nonlinear { model: IkedaModel, ctx: OnShellContext },
}

fn prepare(s: &Structure, cfg: &RunConfig) -> Result<Prepared, CliError> {
    Ok(match s {
        Structure::StrictLie(f) => {
            let (data, notes) = build_strict_lie(&f.input)?;
            Prepared::Strict { input: f.input.clone(), data, notes }
        }
        Structure::Gauge(g) => {
            let ctx = match &g.jet {
                Some(spec) if !g.shell.is_empty() => {
                    let spec = JetSpec { max_order: spec.max_order.max(cfg.jet_order + 1), ..spec.clone() };
                    let space = JetSpace::new(spec)?;
                    Some(OnShellContext::new(&space, g.shell.clone(), cfg.ideal_degree, cfg.jet_order)?)
                }
                _ => None,
            };
            Prepared::Gauge { data: g.data.clone(), ctx }
        }
        Structure::NonlinearLie(n) => {
            let (model, ctx) = build_ikeda_gauge_data(n.alg.clone(), cfg.ideal_degree, cfg.jet_order)?;
            Prepared::Nonlinear { model, ctx }
        }
    })
}

type Outcome = (Verdict, String, Value);

fn skipped(why: &str) -> Outcome {
    (Verdict::Skipped, why.to_string(), json!({ "reason": why }))
}

fn errored(e: impl std::fmt::Display) -> Outcome {
    let msg = e.to_string();
    let verdict = Verdict::Undecided;
    (verdict, format!("undecided at caps: {msg}"), json!({ "error": msg }))
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn coalgebra_suite(bases: &[(&str, Arc<GradedBasis>)], cap: usize) -> Outcome {
    let mut details = serde_json::Map::new();
    let mut ok = true;
    let mut words = 0;
    for (label, b) in bases {
        let r = check_coalgebra_laws(b, cap);
        ok &= r.passed();
        words += r.words_checked;
        details.insert(label.to_string(), to_value(&r));
    }
    let summary = format!("coassociativity and cocommutativity on {words} words up to length {cap}");
    (Verdict::from_bool(ok), summary, Value::Object(details))
}

fn gerstenhaber_gauge<R: Coeff>(data: &GaugeData<R>, cap: usize) -> Outcome {
    let n = data.xi().len() as u32;
    let mut lifts = Vec::new();
    let mut ok = true;
    for i in 0..n {
        match Coderivation::lift(data.delta(i), cap) {
            Ok(theta) => {
                let r = check_coderivation(&theta, cap);
                ok &= r.passed();
                lifts.push(json!({ "xi": data.xi().name(i), "report": to_value(&r) }));
            }
            Err(e) => return errored(e),
        }
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            match bracket_lift_mismatches(data.delta(i), data.delta(j), cap) {
                Ok(m) => {
                    ok &= m.is_empty();
                    let words: Vec<String> = m.iter().map(|w| data.phi().render_word(w)).collect();
                    pairs.push(json!({ "xi": data.xi().name(i), "eta": data.xi().name(j), "mismatched_words": words }));
                }
                Err(e) => return errored(e),
            }
        }
    }
    let summary = format!("{n} lifts are coderivations and bracket lifts match commutators up to arity {cap}");
    (Verdict::from_bool(ok), summary, json!({ "lifts": lifts, "pairs": pairs }))
}

/// Polarized fields X_A = W_AB ∂_B: lift laws, and diag[X_A, X_B] = −[X_A, X_B].
fn gerstenhaber_nonlinear(model: &IkedaModel, cap: usize) -> Result<Outcome, CliError> {
    let alg = model.algebra();
    let basis = GradedBasis::uniform(alg.names().iter().cloned(), 0)?;
    let space = JetSpace::new(JetSpec { fields: alg.names().to_vec(), derivations: vec![], max_order: 0 })?;
    let norm = Normalization::DividedPower;
    let d = alg.dim();
    let mut fields = Vec::new();
    let mut maps = Vec::new();
    for a in 0..d {
        let comps: Vec<(u32, QPoly)> = (0..d).map(|b| (b as u32, alg.w(a, b).clone())).collect();
        maps.push(polarize_field(&basis, &comps, norm)?);
        let mut v = EvolutionaryField::new(&space);
        for (b, p) in &comps {
            v.set(*b as usize, space.embed(p)?)?;
        }
        fields.push(v);
    }
    let mut ok = true;
    let mut records = Vec::new();
    for a in 0..d {
        let r = check_coderivation(&Coderivation::lift(&maps[a], cap)?, cap);
        ok &= r.passed();
        for b in a + 1..d {
            let lifts = bracket_lift_mismatches(&maps[a], &maps[b], cap)?;
            let diag = diagonal_field(&gerstenhaber(&maps[a], &maps[b])?, space.universe(), norm)?;
            let k = fields[a].commutator(&fields[b])?;
            let mut diag_mismatch = Vec::new();
            for c in 0..d {
                let got =
                    diag.get(&(c as u32)).cloned().unwrap_or_else(|| shlie_core::poly::Poly::zero_in(space.universe()));
                if got != -k.component(c) {
                    diag_mismatch.push(alg.names()[c].clone());
                }
            }
            ok &= lifts.is_empty() && diag_mismatch.is_empty();
            records.push(json!({
                "pair": [alg.names()[a], alg.names()[b]],
                "lift_mismatches": lifts.len(),
                "diagonal_mismatches": diag_mismatch,
            }));
        }
        records.push(json!({ "field": alg.names()[a], "coderivation": to_value(&r) }));
    }
    let summary = format!("polarized Hamiltonian fields: lift laws and diagonal bracket up to arity {cap}");
    Ok((Verdict::from_bool(ok), summary, json!({ "records": records })))
}

fn bbvd_gauge<R: Coeff>(data: &GaugeData<R>, cap: usize) -> Outcome {
    let r = check_bbvd(data, cap);
    let bad = r.pairs.iter().filter(|p| !p.passed).count();
    let summary = format!("{bad} of {} generator pairs fail strict closure up to arity {cap}", r.pairs.len());
    (Verdict::from_bool(r.passed()), summary, to_value(&r))
}

fn theorem1_gauge<R: Coeff>(data: &GaugeData<R>, cap: usize, injectivity: Option<Value>) -> Outcome {
    let probes = default_probes(data);
    let r = check_theorem1(data, &probes, cap);
    let summary = format!(
        "{} probes: morphism {}/{} and Jacobi {}/{} failures at cap {cap}",
        r.probes.len(),
        r.morphism_failures.len(),
        r.morphism_checked,
        r.jacobi_failures.len(),
        r.jacobi_checked
    );
    let mut details = to_value(&r);
    if let (Some(inj), Some(o)) = (injectivity, details.as_object_mut()) {
        o.insert("injectivity".into(), inj);
    }
    (Verdict::from_bool(r.passed()), summary, details)
}

fn shlie_gauge<R: Coeff>(
    data: &GaugeData<R>,
    cap: usize,
    shell: Option<&dyn Shell<R>>,
    strict: Option<&StrictLieInput<R>>,
) -> Result<Outcome, CliError> {
    let s = build_D(data)?;
    let sq = check_square_zero(&s, cap, shell)?;
    let b = extract_brackets(&s);
    let rel = check_ln_relations_on_shell(&b, cap, shell)?;
    let two = two_xi_mismatches(data, &s, cap)?;
    let three = three_xi_mismatches(data, &s, cap)?;
    let mut ok = sq.passed() && rel.passed() && two.is_empty() && three.is_empty();
    let mut details = json!({
        "square_zero": to_value(&sq),
        "relations": to_value(&rel),
        "two_xi_mismatches": two,
        "three_xi_mismatches": three,
        "brackets": to_value(&b.to_tables()),
    });
    if let Some(input) = strict {
        let semi = semidirect_mismatches(input, &b)?;
        let higher: Vec<usize> = b.arities().filter(|&n| n >= 3).collect();
        ok &= semi.is_empty() && higher.is_empty();
        details["semidirect_mismatches"] = json!(semi);
        details["nonzero_higher_arities"] = json!(higher);
    }
    let summary = format!(
        "D∘D̄ on {} words ({} only on shell), relations on {} tuples",
        sq.words_checked,
        sq.on_shell.len(),
        rel.tuples_checked
    );
    Ok((Verdict::from_bool(ok), summary, details))
}

fn ikeda_suite(model: &IkedaModel, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alg = model.algebra();
    let w = check_w_axioms(alg);
    let kk = if alg.is_linear() { Some(kirillov_kostant_mismatches(alg)?) } else { None };
    let d = alg.dim();
    let mut commutators = Vec::new();
    let mut decomposed = true;
    for i in 0..d {
        for j in i + 1..d {
            let pair = [alg.names()[i].clone(), alg.names()[j].clone()];
            match model.gauge_commutator(&model.unit_param(i), &model.unit_param(j)) {
                Ok(c) => {
                    let extra: Vec<(String, String)> =
                        c.extra.components().map(|(f, q)| (f.to_string(), q.render())).collect();
                    let c3: Vec<String> = c.c3.iter().map(|p| p.render()).collect();
                    commutators.push(json!({ "pair": pair, "c3": c3, "extra": extra }));
                }
                Err(e) => {
                    decomposed = false;
                    commutators.push(json!({ "pair": pair, "error": e.to_string() }));
                }
            }
        }
    }
    let linear_extra_vanishes =
        !alg.is_linear() || commutators.iter().all(|c| c["extra"].as_array().is_some_and(|e| e.is_empty()));
    let jacobi = shlie_core::shell::check_jacobi_system(model);
    let div = variation_divergence(model)?;
    let equiv = shell_equivalence(model, cfg.ideal_degree, cfg.jet_order)?;
    let (pj_checked, pj_fail) = poisson_jacobi_failures(alg, 2)?;
    let checks = [
        w.passed(),
        kk.as_ref().is_none_or(|m| m.is_empty()),
        decomposed,
        linear_extra_vanishes,
        jacobi.status == shlie_core::shell::Status::Pass,
        div.is_divergence,
        pj_fail.is_empty(),
    ];
    let mut verdict = Verdict::from_bool(checks.iter().all(|&c| c));
    let equiv_undecided = equiv
        .equations_in_relations
        .iter()
        .chain(&equiv.relations_in_equations)
        .any(|(_, v)| v.starts_with("undecided"));
    verdict = verdict.and(if equiv.passed() {
        Verdict::Pass
    } else if equiv_undecided {
        Verdict::Undecided
    } else {
        Verdict::Fail
    });
    let details = json!({
        "w_axioms": to_value(&w),
        "kirillov_kostant_mismatches": kk,
        "commutators": commutators,
        "jacobi": to_value(&jacobi),
        "variation_of_lagrangian": to_value(&div),
        "shell_equivalence": to_value(&equiv),
        "poisson_jacobi": { "triples_checked": pj_checked, "failures": pj_fail },
    });
    let summary = format!(
        "W axioms, commutator decomposition on {} pairs, Jacobi, divergence and shell equivalence",
        commutators.len()
    );
    Ok((verdict, summary, details))
}

fn run_suite(suite: Suite, prep: &Prepared, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let cap = cfg.arity_cap;
    Ok(match (suite, prep) {
        (Suite::Coalgebra, Prepared::Strict { data, .. }) => {
            coalgebra_suite(&[("phi", data.phi().clone()), ("down_l", l_basis_of(data)?.desuspend())], cap)
        }
        (Suite::Coalgebra, Prepared::Gauge { data, .. }) => {
            coalgebra_suite(&[("phi", data.phi().clone()), ("down_l", l_basis_of(data)?.desuspend())], cap)
        }
        (Suite::Coalgebra, Prepared::Nonlinear { model, .. }) => {
            let t = GradedBasis::uniform(model.algebra().names().iter().cloned(), 0)?;
            coalgebra_suite(&[("t", t.clone()), ("down_t", t.desuspend())], cap)
        }
        (Suite::Gerstenhaber, Prepared::Strict { data, .. }) => gerstenhaber_gauge(data, cap),
        (Suite::Gerstenhaber, Prepared::Gauge { data, .. }) => gerstenhaber_gauge(data, cap),
        (Suite::Gerstenhaber, Prepared::Nonlinear { model, .. }) => gerstenhaber_nonlinear(model, cap)?,
        (Suite::Bbvd, Prepared::Strict { data, .. }) => bbvd_gauge(data, cap),
        (Suite::Bbvd, Prepared::Gauge { data, .. }) => bbvd_gauge(data, cap),
        (Suite::Bbvd, Prepared::Nonlinear { model, .. }) => {
            let r = check_bbvd_system(model);
            let bad = r.records.iter().filter(|x| x.status != shlie_core::shell::Status::Pass).count();
            (
                r.status.into(),
                format!("{bad} of {} gauge commutators fail strict closure", r.records.len()),
                to_value(&r),
            )
        }
        (Suite::Theorem1, Prepared::Strict { data, notes, .. }) => {
            let inj = check_delta_hat_injective(data, cap.min(3))?;
            let inj = json!({
                "report": to_value(&inj),
                "note": "informational: a nonzero kernel does not change this verdict",
            });
            let (v, s, mut d) = theorem1_gauge(data, cap, Some(inj));
            d["boundary_notes"] = to_value(notes);
            (v, s, d)
        }
        (Suite::Theorem1, Prepared::Gauge { data, .. }) => {
            let (v, mut s, mut d) = theorem1_gauge(data, cap, None);
            if !check_bbvd(data, cap).passed() {
                s.push_str(" (strict closure does not hold, so failures are expected)");
                d["hypothesis_holds"] = json!(false);
            }
            (v, s, d)
        }
        (Suite::Theorem1, Prepared::Nonlinear { .. }) => {
            skipped("field-dependent parameters: use the gbbvd and shlie suites")
        }
        (Suite::Shlie, Prepared::Strict { input, data, .. }) => shlie_gauge(data, cap, None, Some(input))?,
        (Suite::Shlie, Prepared::Gauge { data, ctx }) => {
            shlie_gauge(data, cap, ctx.as_ref().map(|c| c as &dyn Shell<QPoly>), None)?
        }
        (Suite::Shlie, Prepared::Nonlinear { model, ctx }) => {
            let r = check_square_zero_system(model, ctx);
            let summary = format!(
                "two-Ξ words vanish on shell ({}), three-Ξ words vanish identically ({})",
                Verdict::from(r.two_xi.status).label(),
                Verdict::from(r.three_xi.status).label()
            );
            (r.status.into(), summary, to_value(&r))
        }
        (Suite::Gbbvd, Prepared::Strict { data, .. }) => gbbvd_without_shell(data, cap),
        (Suite::Gbbvd, Prepared::Gauge { data, ctx: None }) => gbbvd_without_shell(data, cap),
        (Suite::Gbbvd, Prepared::Gauge { data, ctx: Some(ctx) }) => {
            system_outcome(check_gbbvd(data, ctx, cap), "closure residuals in the shell ideal")
        }
        (Suite::Gbbvd, Prepared::Nonlinear { model, ctx }) => {
            system_outcome(check_gbbvd_system(model, ctx), "closure residuals in the shell ideal")
        }
        (Suite::Ikeda, Prepared::Nonlinear { model, .. }) => ikeda_suite(model, cfg)?,
        (Suite::Ikeda, _) => skipped("needs a nonlinear-lie structure"),
    })
}

fn gbbvd_without_shell<R: Coeff + AsJetPoly>(data: &GaugeData<R>, cap: usize) -> Outcome {
    let vars = shlie_core::poly::universe(Vec::<String>::new());
    let (v, s, mut d) = system_outcome(
        check_bbvd_system(&HomGauge::new(data, cap, &vars)),
        "no shell declared, closure must hold exactly",
    );
    d["note"] = json!("no shell declared; the ideal is zero");
    (v, s, d)
}

fn system_outcome(r: shlie_core::shell::SystemReport, what: &str) -> Outcome {
    let certified = r.records.iter().flat_map(|x| &x.residual).filter(|c| c.certificate.is_some()).count();
    let summary = format!("{what}: {} pairs, {certified} certified coefficients", r.records.len());
    (r.status.into(), summary, to_value(&r))
}

/// Run the selected suites on an already parsed structure.
pub fn run_structure(structure: &Structure, cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let prep = prepare(structure, cfg)?;
    let suites = cfg.selection.suites();
    let mut results = Vec::new();
    for suite in &suites {
        let start = Instant::now();
        let (status, summary, details) = run_suite(*suite, &prep, cfg).unwrap_or_else(errored);
        results.push(SuiteResult {
            suite: suite.as_str().to_string(),
            status,
            summary,
            elapsed_ms: start.elapsed().as_millis() as u64,
            details,
        });
    }
    let mut status = results.iter().fold(Verdict::Skipped, |acc, r| acc.and(r.status));
    if status == Verdict::Skipped
        || (cfg.selection != Selection::All && results.iter().any(|r| r.status == Verdict::Skipped))
    {
        status = Verdict::Undecided;
    }
    Ok(Report {
        schema_version: SCHEMA_VERSION.to_string(),
        tool: "shlie".to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            input: cfg.input.display().to_string(),
            suites: suites.iter().map(|s| s.as_str().to_string()).collect(),
            arity_cap: cfg.arity_cap,
            jet_order: cfg.jet_order,
            ideal_degree: cfg.ideal_degree,
            jobs: cfg.jobs,
        },
        structure: StructureEcho { kind: structure.kind().to_string(), name: structure.name().to_string() },
        suites: results,
        status,
    })
}

/// Resolve the input against the fixture directory, load it and run.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let path = crate::fixtures::resolve(&cfg.input)?;
    let structure = Structure::load(&path)?;
    run_structure(&structure, cfg)
}
