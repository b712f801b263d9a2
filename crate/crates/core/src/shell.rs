//! Membership in the differential ideal generated by Euler-Lagrange
//! polynomials, and closure checks that only need to hold on shell.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{bbvd_residual, corrected_bracket_up_to, GaugeData, ParamMap};
use crate::jet::JetSpace;
use crate::linalg::{Echelon, SparseRow};
use crate::poly::{Mono, Poly, Universe};
use crate::shlie::{Shell, ShellVerdict};
use crate::{QPoly, Q};

/// Guard on the closure size; beyond it the answer is "undecided".
const MAX_PRODUCTS: usize = 60_000;

#[derive(Clone, Debug)]
struct Derived {
    generator: usize,
    index: Vec<u32>,
    poly: QPoly,
    degree: u32,
}

/// EL generators with the caps that bound the membership search.
#[derive(Clone, Debug)]
pub struct OnShellContext {
    space: Arc<JetSpace>,
    generators: Vec<QPoly>,
    labels: Vec<String>,
    degree_cap: u32,
    order_cap: usize,
    derived: Vec<Derived>,
    beyond: Vec<QPoly>,
}

impl OnShellContext {
    pub fn new(space: &Arc<JetSpace>, generators: Vec<QPoly>, degree_cap: u32, order_cap: usize) -> Result<Self> {
        let labels = (0..generators.len()).map(|i| format!("E{}", i + 1)).collect();
        Self::labelled(space, generators, labels, degree_cap, order_cap)
    }

    pub fn labelled(
        space: &Arc<JetSpace>,
        generators: Vec<QPoly>,
        labels: Vec<String>,
        degree_cap: u32,
        order_cap: usize,
    ) -> Result<Self> {
        if degree_cap == 0 {
            return Err(Error::Invariant("degree cap must be at least 1".into()));
        }
        if labels.len() != generators.len() {
            return Err(Error::Invariant("one label per generator".into()));
        }
        let generators = generators.iter().map(|g| space.embed(g)).collect::<Result<Vec<_>>>()?;
        if let Some(i) = generators.iter().position(|g| g.is_empty()) {
            return Err(Error::Invariant(format!("shell generator {} is zero", labels[i])));
        }
        let mut derived = Vec::new();
        let mut beyond = Vec::new();
        for (k, g) in generators.iter().enumerate() {
            let mut layer = vec![(Vec::<u32>::new(), g.clone())];
            while !layer.is_empty() {
                let mut next = Vec::new();
                for (mi, p) in layer {
                    if space.order(&p) > order_cap {
                        beyond.push(p);
                        continue;
                    }
                    let start = mi.last().copied().unwrap_or(0);
                    for mu in start..space.spec().derivations.len() as u32 {
                        if let Ok(dp) = space.total_derivative(&p, mu) {
                            let mut m = mi.clone();
                            m.push(mu);
                            next.push((m, dp));
                        }
                    }
                    let degree = p.degree().unwrap_or(0);
                    derived.push(Derived { generator: k, index: mi, poly: p, degree });
                }
                layer = next;
            }
        }
        Ok(OnShellContext { space: space.clone(), generators, labels, degree_cap, order_cap, derived, beyond })
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn universe(&self) -> &Universe {
        self.space.universe()
    }

    pub fn generators(&self) -> &[QPoly] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    /// ∂_I of generator k.
    pub fn derivative(&self, k: usize, index: &[u32]) -> Result<QPoly> {
        self.space.total_derivative_along(&self.generators[k], index)
    }

    fn derivative_label(&self, k: usize, index: &[u32]) -> String {
        let mut s = String::new();
        for &mu in index {
            s.push_str(&format!("D_{} ", self.space.spec().derivations[mu as usize]));
        }
        s + &self.labels[k]
    }

    /// Decide p ∈ ⟨∂_I E_a⟩ within the caps.
    pub fn membership(&self, p: &QPoly) -> Result<Membership> {
        let p = self.space.embed(p)?;
        if p.is_empty() {
            return Ok(Membership::Member(Certificate { terms: vec![] }));
        }
        let deg = p.degree().unwrap_or(0);
        if deg > self.degree_cap {
            return Ok(Membership::Undecided(format!("degree {deg} exceeds the cap {}", self.degree_cap)));
        }
        let mut truncated = false;
        let mut monos: BTreeSet<Mono> = p.terms().map(|(m, _)| m.clone()).collect();
        let mut queue: Vec<Mono> = monos.iter().cloned().collect();
        let mut products: Vec<(usize, Mono)> = Vec::new();
        let mut seen: BTreeSet<(usize, Mono)> = BTreeSet::new();
        while let Some(t) = queue.pop() {
            for (k, g) in self.derived.iter().enumerate() {
                for (s, _) in g.poly.terms() {
                    let Some(m) = t.div(s) else { continue };
                    if seen.contains(&(k, m.clone())) {
                        continue;
                    }
                    if m.degree() + g.degree > self.degree_cap {
                        truncated = true;
                        continue;
                    }
                    seen.insert((k, m.clone()));
                    for (n, _) in g.poly.terms() {
                        let nm = n.mul(&m);
                        if monos.insert(nm.clone()) {
                            queue.push(nm);
                        }
                    }
                    products.push((k, m));
                    if products.len() > MAX_PRODUCTS {
                        return Ok(Membership::Undecided(format!("closure exceeds {MAX_PRODUCTS} products")));
                    }
                }
            }
        }
        let reaches_beyond =
            self.beyond.iter().any(|b| b.terms().any(|(s, _)| monos.iter().any(|t| t.div(s).is_some())));
        truncated |= reaches_beyond;

        let row_of: BTreeMap<&Mono, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<SparseRow<Q>> = vec![SparseRow::new(); monos.len()];
        for (col, (k, m)) in products.iter().enumerate() {
            for (n, c) in self.derived[*k].poly.terms() {
                rows[row_of[&n.mul(m)]].insert(col, c.clone());
            }
        }
        let mut ech = Echelon::new(products.len());
        for (mono, row) in monos.iter().zip(rows) {
            ech.insert(row, p.coeff(mono));
        }
        let Some(x) = ech.solution() else {
            return Ok(if truncated {
                Membership::Undecided("no combination within the caps and the closure was truncated".into())
            } else {
                Membership::NotMember
            });
        };
        let mut merged: BTreeMap<usize, QPoly> = BTreeMap::new();
        for ((k, m), c) in products.iter().zip(x) {
            if c == Q::from_integer(0.into()) {
                continue;
            }
            let e = merged.entry(*k).or_insert_with(|| Poly::zero_in(self.universe()));
            e.add_term(m.clone(), c);
        }
        let terms = merged
            .into_iter()
            .filter(|(_, q)| !q.is_empty())
            .map(|(k, q)| {
                let d = &self.derived[k];
                CertificateTerm {
                    generator: d.generator,
                    index: d.index.clone(),
                    label: self.derivative_label(d.generator, &d.index),
                    multiplier: q,
                }
            })
            .collect();
        Ok(Membership::Member(Certificate { terms }))
    }
}

/// Convenience wrapper for [`OnShellContext::membership`].
pub fn shell_membership(p: &QPoly, ctx: &OnShellContext) -> Result<Membership> {
    ctx.membership(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateTerm {
    pub generator: usize,
    pub index: Vec<u32>,
    pub label: String,
    pub multiplier: QPoly,
}

/// p = Σ multiplier · ∂_I E_a.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub terms: Vec<CertificateTerm>,
}

impl Certificate {
    pub fn expand(&self, ctx: &OnShellContext) -> Result<QPoly> {
        let mut out = Poly::zero_in(ctx.universe());
        for t in &self.terms {
            out = &out + &(&t.multiplier * &ctx.derivative(t.generator, &t.index)?);
        }
        Ok(out)
    }

    pub fn verify(&self, p: &QPoly, ctx: &OnShellContext) -> Result<bool> {
        Ok(self.expand(ctx)? == ctx.space().embed(p)?)
    }

    /// (generator label, multiplier) pairs.
    pub fn render(&self) -> Vec<(String, String)> {
        self.terms.iter().map(|t| (t.label.clone(), t.multiplier.render())).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    Member(Certificate),
    /// No combination exists and the search was not truncated by the caps.
    NotMember,
    Undecided(String),
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member(_))
    }

    pub fn verdict(&self) -> ShellVerdict {
        match self {
            Membership::Member(_) => ShellVerdict::Member,
            Membership::NotMember => ShellVerdict::NotMember,
            Membership::Undecided(r) => ShellVerdict::Undecided(r.clone()),
        }
    }
}

impl Shell<QPoly> for OnShellContext {
    fn classify(&self, value: &QPoly) -> ShellVerdict {
        match self.membership(value) {
            Ok(m) => m.verdict(),
            Err(e) => ShellVerdict::Undecided(e.to_string()),
        }
    }
}

/// A gauge algebra seen through its closure and Jacobi residuals, each a
/// list of labelled jet-polynomial coefficients.
pub trait GaugeSystem: Sync {
    fn generator_names(&self) -> Vec<String>;
    /// Coefficients of [δ(ξ_i), δ(ξ_j)] − δ(C(ξ_i, ξ_j)); nonzero ones only.
    fn closure_residual(&self, i: usize, j: usize) -> Result<Vec<(String, QPoly)>>;
    /// Coefficients of the cyclic sum of corrected brackets; nonzero ones only.
    fn jacobi_residual(&self, i: usize, j: usize, k: usize) -> Result<Vec<(String, QPoly)>>;
}

/// Coefficients that can be read as jet polynomials.
pub trait AsJetPoly {
    fn as_jet_poly(&self, vars: &Universe) -> Result<QPoly>;
}

impl AsJetPoly for Q {
    fn as_jet_poly(&self, vars: &Universe) -> Result<QPoly> {
        Ok(Poly::constant_in(vars, self.clone()))
    }
}

impl AsJetPoly for QPoly {
    fn as_jet_poly(&self, vars: &Universe) -> Result<QPoly> {
        if self.is_empty() {
            return Ok(Poly::zero_in(vars));
        }
        self.in_universe(vars)
    }
}

/// Gauge data on words up to `cap`, viewed as a [`GaugeSystem`].
pub struct HomGauge<'a, R> {
    pub data: &'a GaugeData<R>,
    pub cap: usize,
    pub vars: Universe,
}

impl<'a, R> HomGauge<'a, R> {
    pub fn new(data: &'a GaugeData<R>, cap: usize, vars: &Universe) -> Self {
        HomGauge { data, cap, vars: vars.clone() }
    }
}

fn flatten<R: crate::scalar::Coeff + AsJetPoly>(
    h: &crate::hom::HomMap<R>,
    vars: &Universe,
) -> Result<Vec<(String, QPoly)>> {
    let mut out = Vec::new();
    for (w, v) in h.values() {
        for (&g, c) in v.iter() {
            let p = c.as_jet_poly(vars)?;
            if !p.is_empty() {
                let word = h.source().render_word(w);
                out.push((format!("{word} -> {}", h.target().name(g)), p));
            }
        }
    }
    Ok(out)
}

impl<'a, R: crate::scalar::Coeff + AsJetPoly> GaugeSystem for HomGauge<'a, R> {
    fn generator_names(&self) -> Vec<String> {
        self.data.xi().generators().iter().map(|g| g.name.clone()).collect()
    }

    fn closure_residual(&self, i: usize, j: usize) -> Result<Vec<(String, QPoly)>> {
        flatten(&bbvd_residual(self.data, i as u32, j as u32, self.cap)?, &self.vars)
    }

    fn jacobi_residual(&self, i: usize, j: usize, k: usize) -> Result<Vec<(String, QPoly)>> {
        let d = self.data;
        let c = |g: usize| ParamMap::constant(d, g as u32);
        let br = |a: &ParamMap<R>, b: &ParamMap<R>| corrected_bracket_up_to(a, b, d, self.cap);
        let (a, b, cc) = (c(i), c(j), c(k));
        let t1 = br(&br(&a, &b)?, &cc)?;
        let t2 = br(&br(&b, &cc)?, &a)?;
        let t3 = br(&br(&cc, &a)?, &b)?;
        let sum = t1.map().plus(t2.map())?.plus(t3.map())?;
        flatten(&sum, &self.vars)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

impl Status {
    fn combine(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Undecided, _) | (_, Status::Undecided) => Status::Undecided,
            _ => Status::Pass,
        }
    }

    pub fn all(it: impl IntoIterator<Item = Status>) -> Status {
        it.into_iter().fold(Status::Pass, Status::combine)
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CoefficientRecord {
    pub label: String,
    pub value: String,
    /// "nonzero", "member", "not member" or "undecided: …".
    pub verdict: String,
    pub certificate: Option<Vec<(String, String)>>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ClosureRecord {
    pub generators: Vec<String>,
    pub status: Status,
    pub residual: Vec<CoefficientRecord>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SystemReport {
    /// "strict" for exact vanishing, "shell" for membership in the EL ideal.
    pub mode: String,
    pub status: Status,
    pub records: Vec<ClosureRecord>,
}

fn judge(label: String, value: QPoly, ctx: Option<&OnShellContext>) -> (Status, CoefficientRecord) {
    let rendered = value.render();
    let Some(ctx) = ctx else {
        return (
            Status::Fail,
            CoefficientRecord { label, value: rendered, verdict: "nonzero".into(), certificate: None },
        );
    };
    let (status, verdict, certificate) = match ctx.membership(&value) {
        Ok(Membership::Member(c)) => match c.verify(&value, ctx) {
            Ok(true) => (Status::Pass, "member".to_string(), Some(c.render())),
            _ => (Status::Fail, "certificate failed to re-expand".to_string(), Some(c.render())),
        },
        Ok(Membership::NotMember) => (Status::Fail, "not member".into(), None),
        Ok(Membership::Undecided(r)) => (Status::Undecided, format!("undecided: {r}"), None),
        Err(e) => (Status::Undecided, format!("undecided: {e}"), None),
    };
    (status, CoefficientRecord { label, value: rendered, verdict, certificate })
}

fn run_tuples<S: GaugeSystem + ?Sized>(
    sys: &S,
    tuples: Vec<Vec<usize>>,
    ctx: Option<&OnShellContext>,
    eval: impl Fn(&S, &[usize]) -> Result<Vec<(String, QPoly)>> + Sync,
) -> Vec<ClosureRecord> {
    let names = sys.generator_names();
    tuples
        .into_par_iter()
        .map(|t| {
            let generators = t.iter().map(|&i| names[i].clone()).collect();
            match eval(sys, &t) {
                Ok(coeffs) => {
                    let judged: Vec<_> = coeffs.into_par_iter().map(|(l, v)| judge(l, v, ctx)).collect();
                    let status = Status::all(judged.iter().map(|(s, _)| *s));
                    ClosureRecord {
                        generators,
                        status,
                        residual: judged.into_iter().map(|(_, r)| r).collect(),
                        error: None,
                    }
                }
                Err(e) => ClosureRecord {
                    generators,
                    status: Status::Undecided,
                    residual: vec![],
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

fn pairs(n: usize) -> Vec<Vec<usize>> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])).collect()
}

fn triples(n: usize) -> Vec<Vec<usize>> {
    (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| vec![i, j, k]))).collect()
}

fn report(mode: &str, records: Vec<ClosureRecord>) -> SystemReport {
    let status = Status::all(records.iter().map(|r| r.status));
    SystemReport { mode: mode.into(), status, records }
}

/// Closure must vanish exactly for every generator pair.
pub fn check_bbvd_system<S: GaugeSystem + ?Sized>(sys: &S) -> SystemReport {
    let n = sys.generator_names().len();
    report("strict", run_tuples(sys, pairs(n), None, |s, t| s.closure_residual(t[0], t[1])))
}

/// Closure may fail by terms in the shell ideal; undecided never counts as pass.
pub fn check_gbbvd_system<S: GaugeSystem + ?Sized>(sys: &S, ctx: &OnShellContext) -> SystemReport {
    let n = sys.generator_names().len();
    report("shell", run_tuples(sys, pairs(n), Some(ctx), |s, t| s.closure_residual(t[0], t[1])))
}

/// Jacobi of the corrected bracket must vanish exactly for every triple.
pub fn check_jacobi_system<S: GaugeSystem + ?Sized>(sys: &S) -> SystemReport {
    let n = sys.generator_names().len();
    report("strict", run_tuples(sys, triples(n), None, |s, t| s.jacobi_residual(t[0], t[1], t[2])))
}

/// gBBvD on gauge data given as maps on words up to `cap`.
pub fn check_gbbvd<R: crate::scalar::Coeff + AsJetPoly>(
    data: &GaugeData<R>,
    ctx: &OnShellContext,
    cap: usize,
) -> SystemReport {
    check_gbbvd_system(&HomGauge::new(data, cap, ctx.universe()), ctx)
}

/// D∘D̄ on two-Ξ words is the closure residual and on three-Ξ words the
/// Jacobi residual; the former may vanish on shell, the latter must vanish.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SystemSquareZeroReport {
    pub two_xi: SystemReport,
    pub three_xi: SystemReport,
    pub status: Status,
}

pub fn check_square_zero_system<S: GaugeSystem + ?Sized>(sys: &S, ctx: &OnShellContext) -> SystemSquareZeroReport {
    let two_xi = check_gbbvd_system(sys, ctx);
    let three_xi = check_jacobi_system(sys);
    let status = two_xi.status.combine(three_xi.status);
    SystemSquareZeroReport { two_xi, three_xi, status }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{build_strict_lie, so3_adjoint};
    use crate::jet::JetSpec;

    fn line() -> Arc<JetSpace> {
        JetSpace::new(JetSpec { fields: vec!["u".into()], derivations: vec!["x".into()], max_order: 3 }).unwrap()
    }

    #[test]
    fn generator_is_member() {
        let s = line();
        let e = s.parse("u[u;x] + u^2").unwrap();
        let ctx = OnShellContext::new(&s, vec![e.clone()], 4, 2).unwrap();
        let Membership::Member(c) = ctx.membership(&e).unwrap() else { panic!("generator not in its ideal") };
        assert!(c.verify(&e, &ctx).unwrap());
        assert_eq!(c.render(), vec![("E1".to_string(), "1".to_string())]);
    }

    #[test]
    fn combination_is_member() {
        let s = line();
        let e = s.parse("u[u;x] + u^2").unwrap();
        let ctx = OnShellContext::new(&s, vec![e.clone()], 4, 2).unwrap();
        let u = s.parse("u").unwrap();
        let p = &(&u * &e) + &s.total_derivative(&e, 0).unwrap();
        let Membership::Member(c) = ctx.membership(&p).unwrap() else { panic!("combination rejected") };
        assert!(c.verify(&p, &ctx).unwrap());
    }

    #[test]
    fn constant_is_not_member() {
        let s = line();
        let ctx = OnShellContext::new(&s, vec![s.parse("u[u;x] + u^2").unwrap()], 4, 2).unwrap();
        let one = s.parse("1").unwrap();
        assert!(!ctx.membership(&one).unwrap().is_member());
        let bare = s.parse("u").unwrap();
        assert!(!ctx.membership(&bare).unwrap().is_member());
        let big = s.parse("u^5").unwrap();
        assert!(matches!(ctx.membership(&big).unwrap(), Membership::Undecided(_)));
        assert!(OnShellContext::new(&s, vec![s.parse("0").unwrap()], 4, 2).is_err());
    }

    #[test]
    fn strict_data_passes_gbbvd() {
        let (data, _) = build_strict_lie::<QPoly>(&so3_adjoint()).unwrap();
        let s = line();
        let ctx = OnShellContext::new(&s, vec![s.parse("u[u;x]").unwrap()], 3, 1).unwrap();
        let r = check_gbbvd(&data, &ctx, 3);
        assert_eq!(r.status, Status::Pass);
        assert!(r.records.iter().all(|rec| rec.residual.is_empty()));
        assert_eq!(check_jacobi_system(&HomGauge::new(&data, 3, ctx.universe())).status, Status::Pass);
    }

    #[test]
    fn injected_bare_term_fails() {
        let (mut data, _) = build_strict_lie::<QPoly>(&so3_adjoint()).unwrap();
        let s = line();
        let ctx = OnShellContext::new(&s, vec![s.parse("u[u;x]").unwrap()], 3, 1).unwrap();
        let mut h = data.delta(0).clone();
        let w = data.phi().parse_word("f1").unwrap().unwrap().0;
        h.add_value(w, &crate::coalgebra::Vector::single(0, s.parse("u").unwrap())).unwrap();
        data.set_delta(0, h).unwrap();
        let r = check_gbbvd(&data, &ctx, 3);
        assert_eq!(r.status, Status::Fail);
    }
}
