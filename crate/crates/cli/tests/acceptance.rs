//! Acceptance gate: one PASS/FAIL line per criterion, exact arithmetic throughout.
//! Every check here is strict; a criterion that cannot be met prints FAIL with the reason.

use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use shlie_cli::fixtures::{builtin, fixture_dir, jet_shell_toy, nonabelian2};
use shlie_cli::report::without_timing;
use shlie_cli::Structure;
use shlie_core::coalgebra::{check_coalgebra_laws, GradedBasis, SymWord, Vector};
use shlie_core::gauge::{
    build_strict_lie, check_delta_hat_injective, check_theorem1, default_probes, delta_hat, so3_adjoint, ParamMap,
};
use shlie_core::hom::{
    bracket_lift_mismatches, check_coderivation, lift_word, lift_word_via_coproduct, Coderivation, HomMap,
};
use shlie_core::ikeda::{
    check_w_axioms, kirillov_kostant_mismatches, poisson_bracket, shell_equivalence, variation_divergence, IkedaModel,
    NonlinearLieAlgebra,
};
use shlie_core::jet::{JetSpace, JetSpec};
use shlie_core::poly::Mono;
use shlie_core::shell::{check_bbvd_system, check_gbbvd_system, check_jacobi_system, OnShellContext, Status};
use shlie_core::shlie::{
    build_D, check_ln_relations, check_square_zero_where, extract_brackets, semidirect_mismatches, three_xi_mismatches,
    two_xi_mismatches, ShLieData,
};
use shlie_core::{QPoly, Q};

type Check = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn core<T>(r: shlie_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

// Number of canonical words of length n over e even and o odd generators:
// Σ_k C(e+k−1, k)·C(o, n−k).
fn word_count(e: u64, o: u64, n: u64) -> u64 {
    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    (0..=n).map(|k| if e == 0 { u64::from(k == 0) } else { binom(e + k - 1, k) } * binom(o, n - k)).sum()
}

fn criterion_1() -> Check {
    let bases = [
        ("even 4", GradedBasis::uniform(["a", "b", "c", "d"], 0)),
        ("mixed 2+2", GradedBasis::new([("a", 0), ("b", 2), ("x", 1), ("y", -1)])),
        ("odd 4", GradedBasis::uniform(["p", "q", "r", "s"], 1)),
        ("mixed 1+2", GradedBasis::new([("a", 0), ("x", 1), ("y", 3)])),
    ];
    let mut words = 0;
    for (label, b) in bases {
        let b = core(b)?;
        let even = (0..b.len() as u32).filter(|&i| !b.is_odd(i)).count() as u64;
        let odd = b.len() as u64 - even;
        for n in 0..=6 {
            let got = b.words_of_len(n).len() as u64;
            ensure(got == word_count(even, odd, n as u64), || format!("{label}: {got} words of length {n}"))?;
        }
        let r = check_coalgebra_laws(&b, 6);
        ensure(r.passed(), || format!("{label}: {r:?}"))?;
        words += r.words_checked;
    }
    Ok(format!("{words} words, 4 bases, length ≤ 6"))
}

fn random_basis(rng: &mut ChaCha8Rng) -> Arc<GradedBasis> {
    let dim = rng.gen_range(1..=3);
    let gens: Vec<(String, i32)> = (0..dim).map(|i| (format!("g{i}"), rng.gen_range(-1..=2))).collect();
    GradedBasis::new(gens).expect("distinct names")
}

fn random_map(rng: &mut ChaCha8Rng, b: &Arc<GradedBasis>) -> HomMap<Q> {
    let degree = rng.gen_range(-1..=1);
    let mut h = HomMap::new(b, b, degree);
    for w in b.words(3) {
        if rng.gen_bool(0.4) {
            continue;
        }
        let want = b.word_degree(&w) + degree;
        for t in (0..b.len() as u32).filter(|&t| b.degree(t) == want) {
            let c = rng.gen_range(-3..=3);
            if c != 0 {
                h.add_value(w.clone(), &Vector::single(t, q(c))).expect("degree matches");
            }
        }
    }
    h
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d002);
    let mut maps = Vec::new();
    while maps.len() < 50 {
        let b = random_basis(&mut rng);
        let f = random_map(&mut rng, &b);
        let g = random_map(&mut rng, &b);
        if !f.is_zero() && !g.is_zero() {
            maps.push((b, f, g));
        }
    }
    let mut words = 0;
    for (k, (b, f, g)) in maps.iter().enumerate() {
        for w in b.words(5) {
            let direct = core(lift_word(f, &w))?;
            let via = core(lift_word_via_coproduct(f, &w))?;
            ensure(direct == via, || format!("map {k}: two lift formulas disagree on {}", b.render_word(&w)))?;
            words += 1;
        }
        let r = check_coderivation(&core(Coderivation::lift(f, 5))?, 5);
        ensure(r.passed(), || format!("map {k}: coderivation law fails {r:?}"))?;
        let bad = core(bracket_lift_mismatches(f, g, 5))?;
        ensure(bad.is_empty(), || format!("map {k}: lift of bracket differs on {} words", bad.len()))?;
    }
    Ok(format!("50 map pairs, {words} lifted words up to arity 5"))
}

fn criterion_3() -> Check {
    let (data, _) = core(build_strict_lie::<Q>(&so3_adjoint()))?;
    let probes = default_probes(&data);
    ensure(probes.len() == 3 + 3 * 3, || format!("{} probes", probes.len()))?;
    let r = check_theorem1(&data, &probes, 4);
    ensure(r.morphism_passed(), || format!("bracket preservation fails on {} pairs", r.morphism_failures.len()))?;
    ensure(r.jacobi_passed(), || format!("Jacobi fails on {} triples", r.jacobi_failures.len()))?;
    let inj = core(check_delta_hat_injective(&data, 3))?;
    if inj.kernel_dim != 0 {
        // Independent witness: π(f_a) = e_a, the identity Φ → Ξ, is killed by δ̂
        // because [e_a, f_b] + [e_b, f_a] = 0 for the adjoint action.
        let mut pi = HomMap::new(data.phi(), data.xi(), 0);
        for a in 0..3 {
            let f = data.phi().parse_word(&format!("f{}", a + 1)).ok().flatten().ok_or("no f_a")?.0;
            let e = data.xi().require(&format!("e{}", a + 1)).map_err(|e| e.to_string())?;
            pi.add_value(f, &Vector::single(e, q(1))).expect("degree 0");
        }
        let image = core(delta_hat(&core(ParamMap::new(&data, pi))?, &data))?;
        return Err(format!(
            "morphism {}/{} and Jacobi {}/{} hold, but the δ̂ kernel at cap 3 has dimension {} (expected 0); \
             witness π(f_a) = e_a has δ̂π {}",
            r.morphism_checked,
            r.morphism_checked,
            r.jacobi_checked,
            r.jacobi_checked,
            inj.kernel_dim,
            if image.is_zero() { "= 0" } else { "≠ 0" }
        ));
    }
    Ok(format!("{} pairs, {} triples, kernel 0", r.morphism_checked, r.jacobi_checked))
}

fn counts(s: &ShLieData<Q>, w: &SymWord) -> (usize, usize) {
    let xi = s.xi_count(w);
    (xi, w.len() - xi)
}

fn criterion_4() -> Check {
    let mut summary = Vec::new();
    for (label, input) in [("so(3)", so3_adjoint::<Q>()), ("nonabelian 2", nonabelian2())] {
        let (data, _) = core(build_strict_lie(&input))?;
        let s = core(build_D(&data))?;
        let sq = core(check_square_zero_where(&s, 7, None, |w| {
            let (xi, phi) = counts(&s, w);
            xi <= 3 && phi <= 4
        }))?;
        ensure(sq.passed(), || format!("{label}: D∘D̄ ≠ 0 on {} words", sq.failures.len()))?;
        let b = extract_brackets(&s);
        let rel = core(check_ln_relations(&b, 5))?;
        ensure(rel.passed(), || format!("{label}: relations fail on {:?}", rel.failures.first()))?;
        let semi = core(semidirect_mismatches(&input, &b))?;
        ensure(semi.is_empty(), || format!("{label}: {semi:?}"))?;
        ensure(b.arities().all(|n| n <= 2), || format!("{label}: higher brackets present"))?;
        summary.push(format!("{label} {} words", sq.words_checked));
    }
    Ok(summary.join(", "))
}

fn criterion_5() -> Check {
    fn both<R: shlie_core::scalar::Coeff>(label: &str, data: &shlie_core::gauge::GaugeData<R>) -> Result<(), String> {
        let s = core(build_D(data))?;
        let two = core(two_xi_mismatches(data, &s, 5))?;
        ensure(two.is_empty(), || format!("{label}: two-Ξ {two:?}"))?;
        let three = core(three_xi_mismatches(data, &s, 5))?;
        ensure(three.is_empty(), || format!("{label}: three-Ξ {three:?}"))
    }
    both("so(3)", &core(build_strict_lie::<Q>(&so3_adjoint()))?.0)?;
    both("nonabelian 2", &core(build_strict_lie(&nonabelian2()))?.0)?;
    both("jet shell toy", &jet_shell_toy().data)?;
    Ok("so(3), nonabelian 2 and the open jet toy, words up to length 5".into())
}

fn random_jet_poly(rng: &mut ChaCha8Rng, space: &JetSpace, coords: &[usize]) -> QPoly {
    let mut p = QPoly::zero_in(space.universe());
    for _ in 0..rng.gen_range(1..=4) {
        let deg = rng.gen_range(1..=4);
        let pairs: Vec<(u32, u32)> = (0..deg).map(|_| (coords[rng.gen_range(0..coords.len())] as u32, 1)).collect();
        let c = rng.gen_range(-5i64..=5);
        if c != 0 {
            p.add_term(Mono::from_pairs(pairs), q(c));
        }
    }
    p
}

fn criterion_6() -> Check {
    let spec =
        JetSpec { fields: vec!["u".into(), "v".into()], derivations: vec!["x".into(), "t".into()], max_order: 6 };
    let space = core(JetSpace::new(spec))?;
    let coords: Vec<usize> = (0..space.universe().len()).filter(|&i| space.coord(i).1.len() <= 2).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d006);
    let mut checked = 0;
    while checked < 100 {
        let p = random_jet_poly(&mut rng, &space, &coords);
        if p.is_empty() {
            continue;
        }
        for mu in 0..2 {
            let dp = core(space.total_derivative(&p, mu))?;
            for field in 0..2 {
                let e = core(space.euler_operator(&dp, field))?;
                ensure(e.is_empty(), || format!("E_{field}(D_{mu}({})) = {}", p.render(), e.render()))?;
            }
        }
        checked += 1;
    }
    let small = core(JetSpace::new(JetSpec { fields: vec!["u".into()], derivations: vec!["x".into()], max_order: 4 }))?;
    let e1 = core(small.euler_operator(&core(small.parse("u * u[u;x]"))?, 0))?;
    ensure(e1.is_empty(), || format!("E_u(u·u_x) = {}", e1.render()))?;
    let e2 = core(small.euler_operator(&core(small.parse("u[u;x]^2"))?, 0))?;
    let want = core(small.parse("-2 * u[u;x,x]"))?;
    ensure(e2 == want, || format!("E_u(u_x²) = {}", e2.render()))?;
    Ok(format!("{checked} random polynomials, two derivations, both fields; named examples exact"))
}

/// Σ_cyc {T_a, {T_b, T_c}} with {f, g} = Σ W_AB ∂_A f ∂_B g, written out directly.
fn jacobiator_by_hand(alg: &NonlinearLieAlgebra, a: usize, b: usize, c: usize) -> Result<QPoly, String> {
    let vars = alg.universe();
    let br = |f: &QPoly, g: &QPoly| -> Result<QPoly, String> {
        let mut out = QPoly::zero_in(vars);
        for x in 0..alg.dim() {
            for y in 0..alg.dim() {
                let term = alg.w(x, y).clone() * f.partial_idx(x) * g.partial_idx(y);
                out = out + term;
            }
        }
        Ok(out)
    };
    let t = |i: usize| QPoly::var_in(vars, i);
    let mut s = QPoly::zero_in(vars);
    for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
        s = s + br(&t(i), &br(&t(j), &t(k))?)?;
    }
    Ok(s)
}

fn relation_context(model: &IkedaModel) -> Result<OnShellContext, String> {
    let (labels, gens): (Vec<_>, Vec<_>) = core(model.shell_relations())?.into_iter().unzip();
    core(OnShellContext::labelled(model.space(), gens, labels, 4, 2))
}

fn criterion_7() -> Check {
    let mut notes = Vec::new();

    // (a) linear so(3)
    let lin = NonlinearLieAlgebra::so3();
    ensure(check_w_axioms(&lin).passed(), || "so(3): W axioms".into())?;
    let kk = core(kirillov_kostant_mismatches(&lin))?;
    ensure(kk.is_empty(), || format!("so(3): Kirillov–Kostant {kk:?}"))?;
    let t = |i: usize| QPoly::var_in(lin.universe(), i);
    let pb = core(poisson_bracket(&(t(0) + t(1)), &t(2), &lin))?;
    let want = core(QPoly::parse_in(lin.universe(), "-T2 + T1"))?;
    ensure(pb == want, || format!("{{T1 + T2, T3}} = {}", pb.render()))?;
    let model = core(IkedaModel::new(lin.clone(), 3))?;
    let strict = check_bbvd_system(&model);
    ensure(strict.status == Status::Pass, || "so(3): strict closure fails".into())?;
    for i in 0..3 {
        for j in i + 1..3 {
            let c = core(model.gauge_commutator(&model.unit_param(i), &model.unit_param(j)))?;
            ensure(c.extra.is_zero(), || format!("so(3): extra term on ({i},{j})"))?;
        }
    }
    notes.push("a".to_string());

    // (b) the nonlinear W, frozen from the ansatz ε_ABC(T_C + αT_C²); every α passes Jacobi
    for alpha in -2..=2 {
        let e = |c: &str| format!("{c} + {alpha} * {c}^2");
        let alg = core(NonlinearLieAlgebra::new(
            &["T1", "T2", "T3"],
            &[
                ("T1", "T2", e("T3").as_str()),
                ("T1", "T3", format!("-({})", e("T2")).as_str()),
                ("T2", "T3", e("T1").as_str()),
            ],
        ))?;
        ensure(check_w_axioms(&alg).passed(), || format!("ansatz α = {alpha} fails Jacobi"))?;
        if alpha == 1 {
            let frozen = NonlinearLieAlgebra::nonlinear_so3();
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                ensure(alg.w(x, y) == frozen.w(x, y), || format!("fixture W_{x}{y} is not the α = 1 member"))?;
            }
        }
    }
    let nl = NonlinearLieAlgebra::nonlinear_so3();
    ensure(check_w_axioms(&nl).passed(), || "nonlinear W axioms".into())?;
    let j = jacobiator_by_hand(&nl, 0, 1, 2)?;
    ensure(j.is_empty(), || format!("hand jacobiator {}", j.render()))?;
    let nlm = core(IkedaModel::new(nl.clone(), 3))?;
    ensure(check_bbvd_system(&nlm).status == Status::Fail, || "nonlinear W closes strictly".into())?;
    let ctx = relation_context(&nlm)?;
    let g = check_gbbvd_system(&nlm, &ctx);
    ensure(g.status == Status::Pass, || format!("gBBvD not established: {:?}", g.status))?;
    let mut cert_terms = 0;
    for rec in &g.records {
        for coeff in &rec.residual {
            if let Some(cert) = &coeff.certificate {
                for (label, _) in cert {
                    ensure(label.contains("psi"), || format!("certificate uses {label}, not D_μψ"))?;
                    cert_terms += 1;
                }
            }
        }
    }
    ensure(cert_terms > 0, || "no certificate was needed, so closure is strict".into())?;
    notes.push(format!("b ({cert_terms} D_μψ certificate terms)"));

    // (c)–(e) on both models
    for (label, m) in [("so(3)", &model), ("nonlinear", &nlm)] {
        let jac = check_jacobi_system(m);
        ensure(jac.status == Status::Pass, || format!("{label}: Jacobi {:?}", jac.records.first()))?;
        let div = core(variation_divergence(m))?;
        ensure(div.is_divergence, || format!("{label}: δ(c)ℒ has Euler images {:?}", div.euler_images))?;
        let eq = core(shell_equivalence(m, 4, 2))?;
        ensure(eq.passed(), || format!("{label}: shells differ {eq:?}"))?;
    }
    notes.extend(["c", "d", "e"].map(String::from));
    Ok(notes.join(", "))
}

fn shlie(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_shlie")).args(args).output().map_err(|e| e.to_string())?;
    Ok((out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned()))
}

fn criterion_8() -> Check {
    for s in builtin() {
        let path = fixture_dir().join(format!("{}.toml", s.name()));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let again = Structure::parse(&text).map_err(|e| e.to_string())?.to_toml();
        ensure(again == text, || format!("{} does not round-trip", s.name()))?;
    }
    let verdict = |suite: &str| -> Result<(i32, String), String> {
        let (code, out) = shlie(&["run", "--suite", suite, "--json", "ikeda_nonlinear_d3"])?;
        let v: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
        Ok((code, v["status"].as_str().unwrap_or("").to_string()))
    };
    let strict = verdict("bbvd")?;
    let open = verdict("gbbvd")?;
    ensure(strict == (1, "fail".into()), || format!("bbvd gave {strict:?}"))?;
    ensure(open == (0, "pass".into()), || format!("gbbvd gave {open:?}"))?;
    let run = |extra: &[&str]| -> Result<String, String> {
        let mut args = vec!["run", "--json", "--arity-cap", "3"];
        args.extend_from_slice(extra);
        args.push("ikeda_nonlinear_d3");
        shlie(&args).map(|(_, out)| without_timing(&out))
    };
    let (first, second) = (run(&[])?, run(&[])?);
    ensure(first == second, || "JSON differs between identical runs".into())?;
    // The config echo records --jobs; everything else must match a single-threaded run.
    let drop_jobs = |s: &str| -> Result<Value, String> {
        let mut v: Value = serde_json::from_str(s).map_err(|e| e.to_string())?;
        v["config"].as_object_mut().ok_or("no config")?.remove("jobs");
        Ok(v)
    };
    let serial = run(&["--jobs", "1"])?;
    ensure(drop_jobs(&first)? == drop_jobs(&serial)?, || "JSON differs under --jobs 1".into())?;
    Ok(format!(
        "{} fixtures byte-identical, bbvd fail vs gbbvd pass, reports identical across runs and thread counts",
        builtin().len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("coalgebra laws", Duration::from_secs(5), criterion_1),
        ("coderivation isomorphism", Duration::from_secs(30), criterion_2),
        ("bracket preservation on strict so(3)", Duration::from_secs(60), criterion_3),
        ("square-zero D and semidirect brackets", Duration::from_secs(120), criterion_4),
        ("two- and three-Ξ cross-checks", Duration::from_secs(30), criterion_5),
        ("jet calculus", Duration::from_secs(10), criterion_6),
        ("sigma model fixtures", Duration::from_secs(600), criterion_7),
        ("CLI contract", Duration::from_secs(60), criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, bound, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let took = start.elapsed();
        if outcome.is_ok() && took > bound {
            outcome = Err(format!("took {:.1} s, bound {} s", took.as_secs_f64(), bound.as_secs()));
        }
        match outcome {
            Ok(msg) => println!("PASS {} {name}: {msg} [{:.2} s]", i + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg} [{:.2} s]", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of 8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
