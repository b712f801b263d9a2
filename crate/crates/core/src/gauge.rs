//! Gauge data: the extension of δ and C to field-dependent parameters, the
//! corrected bracket, and the strict Lie-algebra builder.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::coalgebra::{koszul_sign, splits, unshuffles, GradedBasis, SymWord, Vector};
use crate::error::{Error, Result};
use crate::hom::{comp_up_to, gerstenhaber_up_to, HomMap, Known};
use crate::linalg::{Echelon, SparseRow};
use crate::scalar::Coeff;
use crate::Q;

/// δ: Ξ → Hom(Λ*Φ, Φ) and the correction C: Ξ⊗Ξ → Hom(Λ*Φ, Ξ).
#[derive(Clone, Debug)]
pub struct GaugeData<R> {
    xi: Arc<GradedBasis>,
    phi: Arc<GradedBasis>,
    delta: Vec<HomMap<R>>,
    // keyed with i < j; the other orientation is the negative
    corr: BTreeMap<(u32, u32), HomMap<R>>,
}

impl<R: Coeff> GaugeData<R> {
    pub fn new(xi: &Arc<GradedBasis>, phi: &Arc<GradedBasis>) -> Result<Self> {
        if let Some(g) = xi.generators().iter().find(|g| g.degree != 0) {
            return Err(Error::DegreeMismatch(format!("parameter generator {} must have degree 0", g.name)));
        }
        Ok(GaugeData {
            xi: xi.clone(),
            phi: phi.clone(),
            delta: (0..xi.len()).map(|_| HomMap::new(phi, phi, 0)).collect(),
            corr: BTreeMap::new(),
        })
    }

    pub fn xi(&self) -> &Arc<GradedBasis> {
        &self.xi
    }

    pub fn phi(&self) -> &Arc<GradedBasis> {
        &self.phi
    }

    pub fn set_delta(&mut self, i: u32, h: HomMap<R>) -> Result<()> {
        if !h.is_endo() || !crate::coalgebra::same_basis(h.source(), &self.phi) {
            return Err(Error::BasisMismatch("δ(ξ) must map Λ*Φ into Φ".into()));
        }
        if h.degree() != 0 && !h.is_zero() {
            return Err(Error::DegreeMismatch("δ(ξ) must have degree 0".into()));
        }
        self.delta[i as usize] = h;
        Ok(())
    }

    /// Store C(ξ_i, ξ_j); the opposite orientation follows by antisymmetry.
    pub fn set_correction(&mut self, i: u32, j: u32, h: HomMap<R>) -> Result<()> {
        if !crate::coalgebra::same_basis(h.source(), &self.phi) || !crate::coalgebra::same_basis(h.target(), &self.xi) {
            return Err(Error::BasisMismatch("C(ξ,η) must map Λ*Φ into Ξ".into()));
        }
        if i == j {
            if h.is_zero() {
                return Ok(());
            }
            return Err(Error::Invariant(format!("C({0},{0}) must vanish", self.xi.name(i))));
        }
        let (key, h) = if i < j { ((i, j), h) } else { ((j, i), h.scale(&-R::one())) };
        if h.is_zero() {
            self.corr.remove(&key);
        } else {
            self.corr.insert(key, h);
        }
        Ok(())
    }

    pub fn delta(&self, i: u32) -> &HomMap<R> {
        &self.delta[i as usize]
    }

    /// C(ξ_i, ξ_j), zero when unset.
    pub fn correction(&self, i: u32, j: u32) -> HomMap<R> {
        let zero = || HomMap::new(&self.phi, &self.xi, 0);
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => zero(),
            std::cmp::Ordering::Less => self.corr.get(&(i, j)).cloned().unwrap_or_else(zero),
            std::cmp::Ordering::Greater => self.corr.get(&(j, i)).map(|h| h.scale(&-R::one())).unwrap_or_else(zero),
        }
    }

    fn correction_value(&self, i: u32, j: u32, w: &SymWord) -> Result<Vector<R>> {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => Ok(Vector::zero()),
            std::cmp::Ordering::Less => self.corr.get(&(i, j)).map_or(Ok(Vector::zero()), |h| h.eval_word(w)),
            std::cmp::Ordering::Greater => {
                self.corr.get(&(j, i)).map_or(Ok(Vector::zero()), |h| h.eval_word(w).map(|v| v.neg()))
            }
        }
    }

    /// ∂ξ_i = δ(ξ_i)(1).
    pub fn boundary(&self, i: u32) -> Vector<R> {
        self.delta[i as usize].at_unit()
    }

    pub fn has_boundary(&self) -> bool {
        (0..self.xi.len() as u32).any(|i| !self.boundary(i).is_zero())
    }

    pub fn known(&self) -> Known {
        self.delta.iter().chain(self.corr.values()).fold(Known::Total, |k, h| k.meet(h.known()))
    }

    fn top_delta(&self) -> usize {
        self.delta.iter().filter_map(HomMap::top_arity).max().unwrap_or(0)
    }

    fn top_corr(&self) -> usize {
        self.corr.values().filter_map(HomMap::top_arity).max().unwrap_or(0)
    }

    pub fn param(&self, map: HomMap<R>) -> Result<ParamMap<R>> {
        ParamMap::new(self, map)
    }
}

/// A field-dependent parameter: a linear map Λ*Φ → Ξ.
#[derive(Clone, Debug)]
pub struct ParamMap<R>(HomMap<R>);

impl<R: Coeff> PartialEq for ParamMap<R> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<R: Coeff> ParamMap<R> {
    pub fn new(data: &GaugeData<R>, map: HomMap<R>) -> Result<Self> {
        if !crate::coalgebra::same_basis(map.source(), &data.phi)
            || !crate::coalgebra::same_basis(map.target(), &data.xi)
        {
            return Err(Error::BasisMismatch("parameter maps go from Λ*Φ into Ξ".into()));
        }
        Ok(ParamMap(map))
    }

    pub fn zero(data: &GaugeData<R>) -> Self {
        ParamMap(HomMap::new(&data.phi, &data.xi, 0))
    }

    /// The constant parameter ξ_i: zero except ξ(1) = ξ_i.
    pub fn constant(data: &GaugeData<R>, i: u32) -> Self {
        let mut h = HomMap::new(&data.phi, &data.xi, 0);
        h.set(SymWord::unit(), Vector::single(i, R::one())).expect("degree 0 value");
        ParamMap(h)
    }

    /// φ_g ↦ ξ_i, zero elsewhere.
    pub fn elementary(data: &GaugeData<R>, g: u32, i: u32) -> Result<Self> {
        let (w, _) = crate::coalgebra::normalize(&data.phi, &[g])
            .ok_or_else(|| Error::Invariant("generator word vanishes".into()))?;
        let mut h = HomMap::new(&data.phi, &data.xi, -data.phi.degree(g));
        h.set(w, Vector::single(i, R::one()))?;
        Ok(ParamMap(h))
    }

    pub fn map(&self) -> &HomMap<R> {
        &self.0
    }

    pub fn into_map(self) -> HomMap<R> {
        self.0
    }

    pub fn render(&self) -> String {
        self.0.render()
    }
}

impl<R: Coeff + FromStr> ParamMap<R> {
    pub fn from_pairs(data: &GaugeData<R>, pairs: &[(String, String)]) -> Result<Self> {
        Ok(ParamMap(HomMap::from_pairs(&data.phi, &data.xi, 0, pairs)?))
    }
}

fn sign_of<R: Coeff>(s: i32) -> R {
    if s < 0 {
        -R::one()
    } else {
        R::one()
    }
}

fn finish<R: Coeff>(
    source: &Arc<GradedBasis>,
    target: &Arc<GradedBasis>,
    degree: i32,
    vals: Vec<(SymWord, Vector<R>)>,
    known: Known,
) -> Result<HomMap<R>> {
    let mut out = HomMap::new(source, target, degree).with_known(known);
    for (w, v) in vals {
        out.set(w, v)?;
    }
    Ok(out)
}

/// δ̂(π) on words of length at most `cap`.
pub fn delta_hat_up_to<R: Coeff>(pi: &ParamMap<R>, data: &GaugeData<R>, cap: usize) -> Result<HomMap<R>> {
    let phi = &data.phi;
    let vals: Vec<(SymWord, Vector<R>)> = phi
        .words(cap)
        .into_par_iter()
        .map(|w| {
            let n = w.len();
            let mut acc = Vector::zero();
            for p in 0..=n {
                for (l, r) in unshuffles(p, n)? {
                    let head = pi.0.eval_word(&w.select(&l))?;
                    if head.is_zero() {
                        continue;
                    }
                    let perm: Vec<usize> = l.iter().chain(r.iter()).copied().collect();
                    let s = sign_of::<R>(koszul_sign(phi, &w, &perm));
                    let tail = w.select(&r);
                    for (&x, c) in head.iter() {
                        let v = data.delta[x as usize].eval_word(&tail)?;
                        acc.add_scaled(&v, &(c.clone() * s.clone()));
                    }
                }
            }
            Ok((w, acc))
        })
        .collect::<Result<_>>()?;
    let natural = pi.0.top_arity().map_or(0, |t| t + data.top_delta());
    let total = pi.0.known() == Known::Total && data.known() == Known::Total && cap >= natural;
    finish(phi, phi, pi.0.degree(), vals, if total { Known::Total } else { Known::UpTo(cap) })
}

fn natural_cap<R: Coeff>(maps: &[&HomMap<R>], data: &GaugeData<R>, natural: usize) -> usize {
    let known = maps.iter().fold(data.known(), |k, h| k.meet(h.known()));
    match known {
        Known::Total => natural,
        Known::UpTo(k) => k,
    }
}

/// δ̂(π) = ev∘(δ∘π⊗1)∘Δ.
pub fn delta_hat<R: Coeff>(pi: &ParamMap<R>, data: &GaugeData<R>) -> Result<HomMap<R>> {
    let natural = pi.0.top_arity().map_or(0, |t| t + data.top_delta());
    delta_hat_up_to(pi, data, natural_cap(&[&pi.0], data, natural))
}

/// Ĉ(π₁,π₂) on words of length at most `cap`.
pub fn c_hat_up_to<R: Coeff>(
    p1: &ParamMap<R>,
    p2: &ParamMap<R>,
    data: &GaugeData<R>,
    cap: usize,
) -> Result<ParamMap<R>> {
    let phi = &data.phi;
    let vals: Vec<(SymWord, Vector<R>)> = phi
        .words(cap)
        .into_par_iter()
        .map(|w| {
            let mut acc = Vector::zero();
            for blocks in splits(w.len(), 3) {
                let a = p1.0.eval_word(&w.select(&blocks[0]))?;
                if a.is_zero() {
                    continue;
                }
                let b = p2.0.eval_word(&w.select(&blocks[1]))?;
                if b.is_zero() {
                    continue;
                }
                let perm: Vec<usize> = blocks.concat();
                let s = sign_of::<R>(koszul_sign(phi, &w, &perm));
                let rest = w.select(&blocks[2]);
                for (&x, cx) in a.iter() {
                    for (&y, cy) in b.iter() {
                        let v = data.correction_value(x, y, &rest)?;
                        acc.add_scaled(&v, &(cx.clone() * cy.clone() * s.clone()));
                    }
                }
            }
            Ok((w, acc))
        })
        .collect::<Result<_>>()?;
    let natural = match (p1.0.top_arity(), p2.0.top_arity()) {
        (Some(a), Some(b)) => a + b + data.top_corr(),
        _ => 0,
    };
    let total =
        p1.0.known() == Known::Total && p2.0.known() == Known::Total && data.known() == Known::Total && cap >= natural;
    let degree = p1.0.degree() + p2.0.degree();
    Ok(ParamMap(finish(phi, &data.xi, degree, vals, if total { Known::Total } else { Known::UpTo(cap) })?))
}

/// Ĉ(π₁,π₂) = C∘((π₁⊗π₂)⊗1)∘(Δ⊗1)∘Δ.
pub fn c_hat<R: Coeff>(p1: &ParamMap<R>, p2: &ParamMap<R>, data: &GaugeData<R>) -> Result<ParamMap<R>> {
    let natural = match (p1.0.top_arity(), p2.0.top_arity()) {
        (Some(a), Some(b)) => a + b + data.top_corr(),
        _ => 0,
    };
    c_hat_up_to(p1, p2, data, natural_cap(&[&p1.0, &p2.0], data, natural))
}

/// `[π₁,π₂] = π₁⊙δ̂(π₂) − π₂⊙δ̂(π₁) + Ĉ(π₁,π₂)` on words of length at most `cap`.
pub fn corrected_bracket_up_to<R: Coeff>(
    p1: &ParamMap<R>,
    p2: &ParamMap<R>,
    data: &GaugeData<R>,
    cap: usize,
) -> Result<ParamMap<R>> {
    let d1 = delta_hat_up_to(p1, data, cap)?;
    let d2 = delta_hat_up_to(p2, data, cap)?;
    let a = comp_up_to(&p1.0, &d2, cap)?;
    let b = comp_up_to(&p2.0, &d1, cap)?;
    let c = c_hat_up_to(p1, p2, data, cap)?;
    let out = a.minus(&b)?.plus(&c.0)?;
    Ok(ParamMap(out.with_known(Known::UpTo(cap))))
}

/// The corrected bracket on every word where it can be nonzero.
pub fn corrected_bracket<R: Coeff>(p1: &ParamMap<R>, p2: &ParamMap<R>, data: &GaugeData<R>) -> Result<ParamMap<R>> {
    let (t1, t2) = (p1.0.top_arity(), p2.0.top_arity());
    let (Some(a), Some(b)) = (t1, t2) else {
        return Ok(ParamMap::zero(data));
    };
    let td = data.top_delta();
    let natural = (a + b + td).saturating_sub(1).max(a + b + data.top_corr());
    let cap = match p1.0.known().meet(p2.0.known()).meet(data.known()) {
        Known::Total => natural,
        Known::UpTo(k) => k.saturating_sub(usize::from(data.has_boundary())),
    };
    let out = corrected_bracket_up_to(p1, p2, data, cap)?;
    let all_total = p1.0.known() == Known::Total && p2.0.known() == Known::Total && data.known() == Known::Total;
    Ok(if all_total { ParamMap(out.0.with_known(Known::Total)) } else { out })
}

/// `[δ(ξ_i), δ(ξ_j)] − δ̂C(ξ_i, ξ_j)` on words up to `cap`.
pub fn bbvd_residual<R: Coeff>(data: &GaugeData<R>, i: u32, j: u32, cap: usize) -> Result<HomMap<R>> {
    let lhs = gerstenhaber_up_to(data.delta(i), data.delta(j), cap)?;
    let c = ParamMap(data.correction(i, j));
    let rhs = delta_hat_up_to(&c, data, cap)?;
    lhs.minus(&rhs)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PairRecord {
    pub xi: String,
    pub eta: String,
    pub passed: bool,
    /// Nonzero residual values as (word, value).
    pub residual: Vec<(String, String)>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct BbvdReport {
    pub cap: usize,
    pub pairs: Vec<PairRecord>,
}

impl BbvdReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed)
    }
}

/// Check `[δ(ξ), δ(η)] = δ̂C(ξ,η)` for every generator pair.
pub fn check_bbvd<R: Coeff>(data: &GaugeData<R>, cap: usize) -> BbvdReport {
    let n = data.xi.len() as u32;
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let pairs = pairs
        .into_par_iter()
        .map(|(i, j)| {
            let (xi, eta) = (data.xi.name(i).to_string(), data.xi.name(j).to_string());
            match bbvd_residual(data, i, j, cap) {
                Ok(r) => PairRecord { xi, eta, passed: r.is_zero(), residual: r.to_pairs(), error: None },
                Err(e) => PairRecord { xi, eta, passed: false, residual: vec![], error: Some(e.to_string()) },
            }
        })
        .collect();
    BbvdReport { cap, pairs }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ProbeFailure {
    pub probes: Vec<usize>,
    /// Words where the identity fails, or the error that stopped evaluation.
    pub words: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Theorem1Report {
    pub cap: usize,
    pub probes: Vec<String>,
    pub morphism_checked: usize,
    pub morphism_failures: Vec<ProbeFailure>,
    pub jacobi_checked: usize,
    pub jacobi_failures: Vec<ProbeFailure>,
}

impl Theorem1Report {
    pub fn morphism_passed(&self) -> bool {
        self.morphism_failures.is_empty()
    }

    pub fn jacobi_passed(&self) -> bool {
        self.jacobi_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.morphism_passed() && self.jacobi_passed()
    }
}

/// All constants plus every elementary arity-one parameter.
pub fn default_probes<R: Coeff>(data: &GaugeData<R>) -> Vec<ParamMap<R>> {
    let mut out: Vec<ParamMap<R>> = (0..data.xi.len() as u32).map(|i| ParamMap::constant(data, i)).collect();
    for g in 0..data.phi.len() as u32 {
        for i in 0..data.xi.len() as u32 {
            if let Ok(p) = ParamMap::elementary(data, g, i) {
                out.push(p);
            }
        }
    }
    out
}

fn failure_of<R: Coeff>(probes: Vec<usize>, diff: Result<HomMap<R>>, cap: usize) -> Option<ProbeFailure> {
    match diff {
        Ok(d) => {
            let words: Vec<String> =
                d.values().filter(|(w, _)| w.len() <= cap).map(|(w, _)| d.source().render_word(w)).collect();
            (!words.is_empty()).then_some(ProbeFailure { probes, words, error: None })
        }
        Err(e) => Some(ProbeFailure { probes, words: vec![], error: Some(e.to_string()) }),
    }
}

/// Check that δ̂ intertwines the corrected bracket with the Gerstenhaber bracket,
/// and evaluate the Jacobi expression of the corrected bracket on probe triples.
pub fn check_theorem1<R: Coeff>(data: &GaugeData<R>, probes: &[ParamMap<R>], cap: usize) -> Theorem1Report {
    let n = probes.len();
    let hats: Vec<Result<HomMap<R>>> = probes.par_iter().map(|p| delta_hat_up_to(p, data, cap + 1)).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let brackets: BTreeMap<(usize, usize), Result<ParamMap<R>>> = pairs
        .par_iter()
        .map(|&(i, j)| ((i, j), corrected_bracket_up_to(&probes[i], &probes[j], data, cap + 1)))
        .collect();

    let morphism_failures: Vec<ProbeFailure> = pairs
        .par_iter()
        .filter_map(|&(i, j)| {
            let diff = (|| {
                let b = brackets[&(i, j)].as_ref().map_err(Clone::clone)?;
                let lhs = delta_hat_up_to(b, data, cap)?;
                let hi = hats[i].as_ref().map_err(Clone::clone)?;
                let hj = hats[j].as_ref().map_err(Clone::clone)?;
                let rhs = gerstenhaber_up_to(hi, hj, cap)?;
                lhs.minus(&rhs)
            })();
            failure_of(vec![i, j], diff, cap)
        })
        .collect();

    let triples: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))).collect();
    let jacobi_failures: Vec<ProbeFailure> = triples
        .par_iter()
        .filter_map(|&(i, j, k)| {
            let diff = (|| {
                let get = |a: usize, b: usize| brackets[&(a, b)].as_ref().map_err(Clone::clone);
                // [[i,j],k] + [[j,k],i] + [[k,i],j], with [k,i] = -[i,k]
                let t1 = corrected_bracket_up_to(get(i, j)?, &probes[k], data, cap)?;
                let t2 = corrected_bracket_up_to(get(j, k)?, &probes[i], data, cap)?;
                let t3 = corrected_bracket_up_to(get(i, k)?, &probes[j], data, cap)?;
                t1.0.plus(&t2.0)?.minus(&t3.0)
            })();
            failure_of(vec![i, j, k], diff, cap)
        })
        .collect();

    Theorem1Report {
        cap,
        probes: probes.iter().map(ParamMap::render).collect(),
        morphism_checked: pairs.len(),
        morphism_failures,
        jacobi_checked: triples.len(),
        jacobi_failures,
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InjectivityReport {
    /// Unknown parameter values live on words of length at most this.
    pub cap: usize,
    /// Equations come from words of length at most this.
    pub equation_cap: usize,
    pub unknowns: usize,
    pub rank: usize,
    pub kernel_dim: usize,
    /// Kernel basis, each vector as (word, value) pairs.
    pub kernel: Vec<Vec<(String, String)>>,
    /// Kernel zero, which certifies injectivity only for parameters supported up to `cap`.
    pub injective_up_to_cap: bool,
}

/// Solve δ̂(π) = 0 over the unknown values of π on words of length at most `cap`.
pub fn check_delta_hat_injective(data: &GaugeData<Q>, cap: usize) -> Result<InjectivityReport> {
    let words = data.phi.words(cap);
    let mut unknowns: Vec<(SymWord, u32)> = Vec::new();
    for w in &words {
        let deg = data.phi.word_degree(w);
        for i in 0..data.xi.len() as u32 {
            // π has degree 0, so only values of matching degree are admissible
            if deg == 0 {
                unknowns.push((w.clone(), i));
            }
        }
    }
    let equation_cap = match data.known() {
        Known::Total => cap + data.top_delta(),
        Known::UpTo(k) => (cap + data.top_delta()).min(k),
    };
    let columns: Vec<HomMap<Q>> = unknowns
        .par_iter()
        .map(|(w, i)| {
            let mut h = HomMap::new(&data.phi, &data.xi, 0);
            h.set(w.clone(), Vector::single(*i, Q::from_integer(1.into())))?;
            delta_hat_up_to(&ParamMap(h), data, equation_cap)
        })
        .collect::<Result<_>>()?;
    let mut rows: BTreeMap<(SymWord, u32), SparseRow<Q>> = BTreeMap::new();
    for (col, h) in columns.iter().enumerate() {
        for (w, v) in h.values() {
            for (&g, c) in v.iter() {
                rows.entry((w.clone(), g)).or_default().insert(col, c.clone());
            }
        }
    }
    let mut ech = Echelon::new(unknowns.len());
    for row in rows.into_values() {
        ech.insert(row, Q::from_integer(0.into()));
    }
    let kernel: Vec<Vec<(String, String)>> = ech
        .kernel()
        .into_iter()
        .map(|vec| {
            let mut h = HomMap::<Q>::new(&data.phi, &data.xi, 0);
            for (col, c) in vec.into_iter().enumerate() {
                let (w, i) = &unknowns[col];
                h.add_value(w.clone(), &Vector::single(*i, c)).expect("degree checked");
            }
            h.to_pairs()
        })
        .collect();
    Ok(InjectivityReport {
        cap,
        equation_cap,
        unknowns: unknowns.len(),
        rank: ech.rank(),
        kernel_dim: kernel.len(),
        injective_up_to_cap: kernel.is_empty(),
        kernel,
    })
}

/// A Lie algebra Ξ acting on Φ, with a boundary map ∂: Ξ → Φ.
#[derive(Clone, Debug)]
pub struct StrictLieInput<R> {
    pub xi: Arc<GradedBasis>,
    pub phi: Arc<GradedBasis>,
    /// Structure constants, as [ξ_i, ξ_j] for the stored ordered pairs.
    pub bracket: BTreeMap<(u32, u32), Vector<R>>,
    /// ξ_i · φ_g.
    pub action: BTreeMap<(u32, u32), Vector<R>>,
    pub boundary: BTreeMap<u32, Vector<R>>,
}

impl<R: Coeff> StrictLieInput<R> {
    pub fn new<S: Into<String>>(xi: impl IntoIterator<Item = S>, phi: impl IntoIterator<Item = S>) -> Result<Self> {
        Ok(StrictLieInput {
            xi: GradedBasis::uniform(xi, 0)?,
            phi: GradedBasis::uniform(phi, 0)?,
            bracket: BTreeMap::new(),
            action: BTreeMap::new(),
            boundary: BTreeMap::new(),
        })
    }

    pub fn lie_bracket(&self, i: u32, j: u32) -> Vector<R> {
        if let Some(v) = self.bracket.get(&(i, j)) {
            return v.clone();
        }
        self.bracket.get(&(j, i)).map(|v| v.neg()).unwrap_or_default()
    }

    pub fn act(&self, i: u32, g: u32) -> Vector<R> {
        self.action.get(&(i, g)).cloned().unwrap_or_default()
    }

    pub fn bracket_of(&self, a: &Vector<R>, b: &Vector<R>) -> Vector<R> {
        let mut out = Vector::zero();
        for (&i, x) in a.iter() {
            for (&j, y) in b.iter() {
                out.add_scaled(&self.lie_bracket(i, j), &(x.clone() * y.clone()));
            }
        }
        out
    }

    pub fn act_on(&self, a: &Vector<R>, v: &Vector<R>) -> Vector<R> {
        let mut out = Vector::zero();
        for (&i, x) in a.iter() {
            for (&g, y) in v.iter() {
                out.add_scaled(&self.act(i, g), &(x.clone() * y.clone()));
            }
        }
        out
    }

    pub fn boundary_of(&self, a: &Vector<R>) -> Vector<R> {
        let mut out = Vector::zero();
        for (&i, x) in a.iter() {
            if let Some(v) = self.boundary.get(&i) {
                out.add_scaled(v, x);
            }
        }
        out
    }
}

impl<R: Coeff + FromStr> StrictLieInput<R> {
    pub fn set_bracket(&mut self, a: &str, b: &str, value: &str) -> Result<()> {
        let key = (self.xi.require(a)?, self.xi.require(b)?);
        self.bracket.insert(key, crate::coalgebra::parse_vector(&self.xi, value)?);
        Ok(())
    }

    pub fn set_action(&mut self, a: &str, g: &str, value: &str) -> Result<()> {
        let key = (self.xi.require(a)?, self.phi.require(g)?);
        self.action.insert(key, crate::coalgebra::parse_vector(&self.phi, value)?);
        Ok(())
    }

    pub fn set_boundary(&mut self, a: &str, value: &str) -> Result<()> {
        let key = self.xi.require(a)?;
        self.boundary.insert(key, crate::coalgebra::parse_vector(&self.phi, value)?);
        Ok(())
    }
}

/// What the builder found about the sign of the boundary compatibility.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StrictLieNotes {
    pub boundary_nonzero: bool,
    /// Whether `∂[ξ,η] = ξ·∂η + η·∂ξ` also holds on every pair.
    pub plus_sign_holds: bool,
    pub note: Option<String>,
}

/// so(3) acting on itself by the adjoint action, with ∂ = 0.
pub fn so3_adjoint<R: Coeff + FromStr>() -> StrictLieInput<R> {
    let mut s = StrictLieInput::new(["e1", "e2", "e3"], ["f1", "f2", "f3"]).expect("valid names");
    for (a, b, c) in [("e1", "e2", "e3"), ("e2", "e3", "e1"), ("e3", "e1", "e2")] {
        s.set_bracket(a, b, c).expect("known generator");
    }
    let f = |e: &str| e.replace('e', "f");
    for (a, b, c) in [("e1", "e2", "e3"), ("e2", "e3", "e1"), ("e3", "e1", "e2")] {
        s.set_action(a, &f(b), &f(c)).expect("known generator");
        s.set_action(b, &f(a), &format!("-{}", f(c))).expect("known generator");
    }
    s
}

/// Validate a strict Lie structure and turn it into gauge data: δ(ξ) is ∂ξ on the
/// unit word and ξ· on generators; C(ξ,η) is [ξ,η] on the unit word.
pub fn build_strict_lie<R: Coeff>(input: &StrictLieInput<R>) -> Result<(GaugeData<R>, StrictLieNotes)> {
    let (xi, phi) = (&input.xi, &input.phi);
    if phi.generators().iter().any(|g| g.degree != 0) {
        return Err(Error::DegreeMismatch("strict Lie data needs Φ in degree 0".into()));
    }
    let n = xi.len() as u32;
    let name = |i: u32| xi.name(i).to_string();
    for (&(i, j), v) in &input.bracket {
        if i == j && !v.is_zero() {
            return Err(Error::Structure(format!("[{0},{0}] must vanish", name(i))));
        }
        if let Some(w) = input.bracket.get(&(j, i)) {
            if w != &v.neg() {
                return Err(Error::Structure(format!("bracket of {} and {} is not antisymmetric", name(i), name(j))));
            }
        }
    }
    let unit = |i: u32| Vector::single(i, R::one());
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let t = |x: u32, y: u32, z: u32| input.bracket_of(&input.lie_bracket(x, y), &unit(z));
                let jac = t(a, b, c).plus(&t(b, c, a)).plus(&t(c, a, b));
                if !jac.is_zero() {
                    return Err(Error::Structure(format!(
                        "Jacobi identity fails on ({}, {}, {})",
                        name(a),
                        name(b),
                        name(c)
                    )));
                }
            }
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for g in 0..phi.len() as u32 {
                let lhs = input.act_on(&unit(a), &input.act(b, g)).minus(&input.act_on(&unit(b), &input.act(a, g)));
                let rhs = input.act_on(&input.lie_bracket(a, b), &Vector::single(g, R::one()));
                if lhs != rhs {
                    return Err(Error::Structure(format!(
                        "not a module: {}·({}·{}) − {}·({}·{}) ≠ [{},{}]·{}",
                        name(a),
                        name(b),
                        phi.name(g),
                        name(b),
                        name(a),
                        phi.name(g),
                        name(a),
                        name(b),
                        phi.name(g)
                    )));
                }
            }
        }
    }
    let mut plus_sign_holds = true;
    for a in 0..n {
        for b in a + 1..n {
            let lhs = input.boundary_of(&input.lie_bracket(a, b));
            let da = input.boundary_of(&unit(a));
            let db = input.boundary_of(&unit(b));
            let x = input.act_on(&unit(a), &db);
            let y = input.act_on(&unit(b), &da);
            if lhs != x.minus(&y) {
                return Err(Error::Structure(format!("∂[{0},{1}] ≠ {0}·∂{1} − {1}·∂{0}", name(a), name(b))));
            }
            if lhs != x.plus(&y) {
                plus_sign_holds = false;
            }
        }
    }
    let boundary_nonzero = input.boundary.values().any(|v| !v.is_zero());
    let note = boundary_nonzero.then(|| {
        format!(
            "boundary compatibility checked as ∂[ξ,η] = ξ·∂η − η·∂ξ; the variant ∂[ξ,η] = ξ·∂η + η·∂ξ {}",
            if plus_sign_holds { "also holds" } else { "fails" }
        )
    });

    let mut data = GaugeData::new(xi, phi)?;
    for a in 0..n {
        let mut h = HomMap::new(phi, phi, 0);
        h.set(SymWord::unit(), input.boundary_of(&unit(a)))?;
        for g in 0..phi.len() as u32 {
            let (w, _) = crate::coalgebra::normalize(phi, &[g]).expect("even generator");
            h.set(w, input.act(a, g))?;
        }
        data.set_delta(a, h)?;
        for b in a + 1..n {
            let mut c = HomMap::new(phi, xi, 0);
            c.set(SymWord::unit(), input.lie_bracket(a, b))?;
            data.set_correction(a, b, c)?;
        }
    }
    Ok((data, StrictLieNotes { boundary_nonzero, plus_sign_holds, note }))
}
