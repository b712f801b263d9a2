//! Formal jet calculus: total derivatives, the Euler operator, evolutionary
//! vector fields, and polarization of polynomials into symmetric maps.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::coalgebra::{GradedBasis, SymWord, Vector};
use crate::error::{Error, Result};
use crate::hom::HomMap;
use crate::poly::{universe, Mono, Poly, Universe};
use crate::scalar::{factorial, Coeff};
use crate::{QPoly, Q};

/// Fields, base derivations and the highest derivative order kept.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JetSpec {
    pub fields: Vec<String>,
    pub derivations: Vec<String>,
    pub max_order: usize,
}

/// Indeterminates `u^a_I` for |I| ≤ max order, named `a` and `u[a;x,y]`.
#[derive(Debug)]
pub struct JetSpace {
    spec: JetSpec,
    vars: Universe,
    coords: Vec<(usize, Vec<u32>)>,
    lookup: HashMap<(usize, Vec<u32>), usize>,
}

fn multi_indices(n_deriv: usize, max_order: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_order {
        let mut next = Vec::new();
        for mi in &frontier {
            let start = mi.last().copied().unwrap_or(0);
            for d in start..n_deriv as u32 {
                let mut m = mi.clone();
                m.push(d);
                next.push(m);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

impl JetSpace {
    pub fn new(spec: JetSpec) -> Result<Arc<Self>> {
        let bad = |s: &str| s.is_empty() || s.contains(|c: char| !(c.is_alphanumeric() || c == '_'));
        if let Some(f) = spec.fields.iter().chain(spec.derivations.iter()).find(|s| bad(s)) {
            return Err(Error::Invariant(format!("unusable jet name {f:?}")));
        }
        let mis = multi_indices(spec.derivations.len(), spec.max_order);
        let mut named = Vec::new();
        for a in 0..spec.fields.len() {
            for mi in &mis {
                named.push((Self::name_for(&spec, a, mi), (a, mi.clone())));
            }
        }
        let vars = universe(named.iter().map(|(n, _)| n.clone()));
        if vars.len() != named.len() {
            return Err(Error::DuplicateGenerator("jet coordinate names collide".into()));
        }
        let by_name: HashMap<&str, (usize, Vec<u32>)> = named.iter().map(|(n, c)| (n.as_str(), c.clone())).collect();
        let coords: Vec<(usize, Vec<u32>)> = vars.iter().map(|n| by_name[n.as_str()].clone()).collect();
        let lookup = coords.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(Arc::new(JetSpace { spec, vars, coords, lookup }))
    }

    fn name_for(spec: &JetSpec, field: usize, mi: &[u32]) -> String {
        if mi.is_empty() {
            return spec.fields[field].clone();
        }
        let ds: Vec<&str> = mi.iter().map(|&d| spec.derivations[d as usize].as_str()).collect();
        format!("u[{};{}]", spec.fields[field], ds.join(","))
    }

    pub fn spec(&self) -> &JetSpec {
        &self.spec
    }

    pub fn universe(&self) -> &Universe {
        &self.vars
    }

    pub fn field_index(&self, name: &str) -> Result<usize> {
        self.spec.fields.iter().position(|f| f == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn derivation_index(&self, name: &str) -> Result<u32> {
        self.spec
            .derivations
            .iter()
            .position(|f| f == name)
            .map(|i| i as u32)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// u^a_I by names; I in any order.
    pub fn var(&self, field: &str, derivs: &[&str]) -> Result<QPoly> {
        let a = self.field_index(field)?;
        let mut mi = derivs.iter().map(|d| self.derivation_index(d)).collect::<Result<Vec<_>>>()?;
        mi.sort_unstable();
        let idx = self.lookup.get(&(a, mi)).ok_or_else(|| {
            Error::OrderOverflow(format!("derivative of {field} beyond order {}", self.spec.max_order))
        })?;
        Ok(Poly::var_in(&self.vars, *idx))
    }

    pub fn parse(&self, s: &str) -> Result<QPoly> {
        Poly::parse_in(&self.vars, s)
    }

    /// Bring a polynomial over a subset of the coordinates into this space.
    pub fn embed<F: Coeff>(&self, p: &Poly<F>) -> Result<Poly<F>> {
        p.in_universe(&self.vars)
    }

    /// (field, multi-index) of a coordinate.
    pub fn coord(&self, idx: usize) -> (usize, &[u32]) {
        let (a, mi) = &self.coords[idx];
        (*a, mi)
    }

    fn coord_index(&self, field: usize, mi: &[u32]) -> Option<usize> {
        self.lookup.get(&(field, mi.to_vec())).copied()
    }

    /// Highest derivative order among the coordinates that occur in `p`.
    pub fn order<F: Coeff>(&self, p: &Poly<F>) -> usize {
        p.terms().flat_map(|(m, _)| m.pairs().iter().map(|&(v, _)| self.coords[v as usize].1.len())).max().unwrap_or(0)
    }

    fn ensure<F: Coeff>(&self, p: &Poly<F>) -> Result<Poly<F>> {
        if p.is_empty() {
            return Ok(Poly::zero_in(&self.vars));
        }
        p.in_universe(&self.vars)
    }

    /// D_μ p = Σ u^a_{Iμ} ∂p/∂u^a_I.
    pub fn total_derivative<F: Coeff>(&self, p: &Poly<F>, mu: u32) -> Result<Poly<F>> {
        let p = self.ensure(p)?;
        let mut out = Poly::zero_in(&self.vars);
        for (m, c) in p.terms() {
            for &(v, _) in m.pairs() {
                let (a, mi) = &self.coords[v as usize];
                let mut next = mi.clone();
                let pos = next.partition_point(|&d| d <= mu);
                next.insert(pos, mu);
                let Some(w) = self.coord_index(*a, &next) else {
                    return Err(Error::OrderOverflow(format!(
                        "D_{} of {} exceeds order {}",
                        self.spec.derivations[mu as usize], self.vars[v as usize], self.spec.max_order
                    )));
                };
                let (e, rest) = m.lower(v).expect("occurs");
                out.add_term(rest.mul(&Mono::var(w as u32)), c.scale_int(e as i64));
            }
        }
        Ok(out)
    }

    /// D_I p, applying the derivations of `mi` in turn.
    pub fn total_derivative_along<F: Coeff>(&self, p: &Poly<F>, mi: &[u32]) -> Result<Poly<F>> {
        let mut acc = self.ensure(p)?;
        for &mu in mi {
            acc = self.total_derivative(&acc, mu)?;
        }
        Ok(acc)
    }

    /// E_a(p) = Σ_I (−1)^{|I|} D_I(∂p/∂u^a_I), summed over distinct sorted I.
    pub fn euler_operator(&self, p: &QPoly, field: usize) -> Result<QPoly> {
        let p = self.ensure(p)?;
        let ord = self.order(&p);
        if self.spec.max_order < 2 * ord {
            return Err(Error::OrderOverflow(format!(
                "Euler operator on an order-{ord} polynomial needs order {} headroom, space has {}",
                2 * ord,
                self.spec.max_order
            )));
        }
        let mut out = Poly::zero_in(&self.vars);
        for mi in multi_indices(self.spec.derivations.len(), ord) {
            let Some(idx) = self.coord_index(field, &mi) else { continue };
            let d = p.partial_idx(idx);
            if d.is_empty() {
                continue;
            }
            let t = self.total_derivative_along(&d, &mi)?;
            out = if mi.len() % 2 == 1 { &out - &t } else { &out + &t };
        }
        Ok(out)
    }

    /// True when every Euler image vanishes.
    pub fn is_total_divergence(&self, p: &QPoly) -> Result<DivergenceReport> {
        let mut nonzero = Vec::new();
        for (a, f) in self.spec.fields.iter().enumerate() {
            let e = self.euler_operator(p, a)?;
            if !e.is_empty() {
                nonzero.push((f.clone(), e.render()));
            }
        }
        Ok(DivergenceReport { is_divergence: nonzero.is_empty(), euler_images: nonzero })
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct DivergenceReport {
    pub is_divergence: bool,
    /// Nonvanishing Euler images as (field, polynomial).
    pub euler_images: Vec<(String, String)>,
}

/// An evolutionary vector field Σ_a Q^a ∂/∂u^a, prolonged by total derivatives.
#[derive(Clone, Debug)]
pub struct EvolutionaryField {
    space: Arc<JetSpace>,
    characteristic: BTreeMap<usize, QPoly>,
}

impl PartialEq for EvolutionaryField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.characteristic == other.characteristic
    }
}

impl EvolutionaryField {
    pub fn new(space: &Arc<JetSpace>) -> Self {
        EvolutionaryField { space: space.clone(), characteristic: BTreeMap::new() }
    }

    pub fn with(mut self, field: &str, q: QPoly) -> Result<Self> {
        let a = self.space.field_index(field)?;
        self.set(a, q)?;
        Ok(self)
    }

    pub fn set(&mut self, field: usize, q: QPoly) -> Result<()> {
        let q = self.space.ensure(&q)?;
        if q.is_empty() {
            self.characteristic.remove(&field);
        } else {
            self.characteristic.insert(field, q);
        }
        Ok(())
    }

    pub fn component(&self, field: usize) -> QPoly {
        self.characteristic.get(&field).cloned().unwrap_or_else(|| Poly::zero_in(&self.space.vars))
    }

    pub fn components(&self) -> impl Iterator<Item = (&str, &QPoly)> {
        self.characteristic.iter().map(|(&a, q)| (self.space.spec.fields[a].as_str(), q))
    }

    pub fn is_zero(&self) -> bool {
        self.characteristic.is_empty()
    }

    /// pr V(p) = Σ_{a,I} D_I(Q^a) ∂p/∂u^a_I.
    pub fn apply(&self, p: &QPoly) -> Result<QPoly> {
        let p = self.space.ensure(p)?;
        let mut out = Poly::zero_in(&self.space.vars);
        let mut occurring: Vec<u32> = p.terms().flat_map(|(m, _)| m.pairs().iter().map(|&(v, _)| v)).collect();
        occurring.sort_unstable();
        occurring.dedup();
        for v in occurring {
            let (a, mi) = self.space.coord(v as usize);
            let Some(q) = self.characteristic.get(&a) else { continue };
            let dq = self.space.total_derivative_along(q, mi)?;
            out = &out + &(&dq * &p.partial_idx(v as usize));
        }
        Ok(out)
    }

    /// [V₁, V₂] with characteristic V₁(Q₂) − V₂(Q₁).
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let mut out = EvolutionaryField::new(&self.space);
        let fields: std::collections::BTreeSet<usize> =
            self.characteristic.keys().chain(other.characteristic.keys()).copied().collect();
        for a in fields {
            let q = &self.apply(&other.component(a))? - &other.apply(&self.component(a))?;
            out.set(a, q)?;
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&a, q) in &other.characteristic {
            out.set(a, &out.component(a) - q)?;
        }
        Ok(out)
    }
}

/// How a degree-k polynomial maps to a symmetric k-linear form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Normalization {
    /// β(w) = coeff · w!/k!, so β(x,…,x) recovers the polynomial.
    Symmetric,
    /// β(w) = coeff · w!; the Taylor-coefficient convention used by the lift.
    DividedPower,
}

fn word_of(basis: &GradedBasis, vars: &Universe, m: &Mono) -> Result<SymWord> {
    let mut names = Vec::new();
    for &(v, e) in m.pairs() {
        let name = vars[v as usize].as_str();
        basis.require(name)?;
        names.extend(std::iter::repeat_n(name, e as usize));
    }
    Ok(crate::coalgebra::normalize_word(basis, &names)?
        .ok_or_else(|| Error::Invariant("odd square in polarization".into()))?
        .0)
}

fn weight(w: &SymWord, norm: Normalization) -> Q {
    let wf = Q::from_integer(w.factorial_weight().into());
    match norm {
        Normalization::Symmetric => wf / factorial(w.len() as u32),
        Normalization::DividedPower => wf,
    }
}

/// Values of the polarization of `p` on canonical words of `basis`.
pub fn polarize(p: &QPoly, basis: &GradedBasis, norm: Normalization) -> Result<BTreeMap<SymWord, Q>> {
    if basis.generators().iter().any(|g| g.degree != 0) {
        return Err(Error::DegreeMismatch("polarization needs an even basis".into()));
    }
    let mut out = BTreeMap::new();
    for (m, c) in p.terms() {
        let w = word_of(basis, p.vars(), m)?;
        out.insert(w.clone(), c.clone() * weight(&w, norm));
    }
    Ok(out)
}

/// Evaluate polarized values back on the diagonal.
pub fn diagonal<'a>(
    values: impl IntoIterator<Item = (&'a SymWord, &'a Q)>,
    basis: &GradedBasis,
    vars: &Universe,
    norm: Normalization,
) -> Result<QPoly> {
    let mut out = Poly::zero_in(vars);
    for (w, c) in values {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for &g in w.factors() {
            let idx = crate::poly::index_of(vars, basis.name(g))
                .ok_or_else(|| Error::UnknownVariable(basis.name(g).to_string()))? as u32;
            match pairs.last_mut() {
                Some((v, e)) if *v == idx => *e += 1,
                _ => pairs.push((idx, 1)),
            }
        }
        out.add_term(Mono::from_pairs(pairs), c.clone() / weight(w, norm));
    }
    Ok(out)
}

/// The HomMap Λ*Φ → Φ whose diagonal is the polynomial vector field `components`.
pub fn polarize_field(basis: &Arc<GradedBasis>, components: &[(u32, QPoly)], norm: Normalization) -> Result<HomMap<Q>> {
    let mut h = HomMap::new(basis, basis, 0);
    for (g, p) in components {
        for (w, c) in polarize(p, basis, norm)? {
            h.add_value(w, &Vector::single(*g, c))?;
        }
    }
    Ok(h)
}

/// Diagonal of a Φ-valued map, one polynomial per target generator.
pub fn diagonal_field(h: &HomMap<Q>, vars: &Universe, norm: Normalization) -> Result<BTreeMap<u32, QPoly>> {
    let mut per: BTreeMap<u32, Vec<(SymWord, Q)>> = BTreeMap::new();
    for (w, v) in h.values() {
        for (&g, c) in v.iter() {
            per.entry(g).or_default().push((w.clone(), c.clone()));
        }
    }
    per.into_iter()
        .map(|(g, vals)| Ok((g, diagonal(vals.iter().map(|(w, c)| (w, c)), h.target(), vars, norm)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::gerstenhaber;

    fn line(order: usize) -> Arc<JetSpace> {
        JetSpace::new(JetSpec { fields: vec!["u".into()], derivations: vec!["x".into()], max_order: order }).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let s = line(3);
        let p = |t: &str| s.parse(t).unwrap();
        assert_eq!(s.total_derivative(&p("u^2"), 0).unwrap(), p("2 * u * u[u;x]"));
        assert_eq!(s.total_derivative(&p("u[u;x]"), 0).unwrap(), p("u[u;x,x]"));
        assert_eq!(s.total_derivative(&p("u * u[u;x]"), 0).unwrap(), p("u[u;x]^2 + u * u[u;x,x]"));
        assert!(matches!(s.total_derivative(&p("u[u;x,x,x]"), 0), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn euler_examples() {
        let s = line(4);
        let p = |t: &str| s.parse(t).unwrap();
        assert_eq!(s.euler_operator(&p("u^2"), 0).unwrap(), p("2 * u"));
        assert!(s.euler_operator(&p("u * u[u;x]"), 0).unwrap().is_empty());
        assert_eq!(s.euler_operator(&p("u[u;x]^2"), 0).unwrap(), p("-2 * u[u;x,x]"));
        assert!(s.is_total_divergence(&p("u[u;x] * u[u;x,x]")).unwrap().is_divergence);
        assert!(!s.is_total_divergence(&p("u^2")).unwrap().is_divergence);
        assert!(s.is_total_divergence(&p("0")).unwrap().is_divergence);
        assert!(matches!(line(1).euler_operator(&line(1).parse("u[u;x]").unwrap(), 0), Err(Error::OrderOverflow(_))));
    }

    #[test]
    fn mixed_partials_commute() {
        let s = JetSpace::new(JetSpec {
            fields: vec!["v".into(), "w".into()],
            derivations: vec!["t".into(), "x".into()],
            max_order: 3,
        })
        .unwrap();
        let p = s.parse("v^2 * u[w;x] - 3 * u[v;t] * w").unwrap();
        let tx = s.total_derivative_along(&p, &[0, 1]).unwrap();
        let xt = s.total_derivative_along(&p, &[1, 0]).unwrap();
        assert_eq!(tx, xt);
        assert_eq!(s.var("v", &["x", "t"]).unwrap(), s.parse("u[v;t,x]").unwrap());
    }

    #[test]
    fn evolutionary_commutator() {
        let s = line(3);
        let p = |t: &str| s.parse(t).unwrap();
        let v1 = EvolutionaryField::new(&s).with("u", p("u[u;x]")).unwrap();
        let v2 = EvolutionaryField::new(&s).with("u", p("u^2")).unwrap();
        // translation commutes with any field without explicit x
        assert!(v1.commutator(&v2).unwrap().is_zero());
        assert_eq!(v2.apply(&p("u[u;x]")).unwrap(), p("2 * u * u[u;x]"));
    }

    #[test]
    fn polarize_round_trip() {
        let b = GradedBasis::uniform(["x", "y"], 0).unwrap();
        let vars = universe(["x", "y"]);
        let p = Poly::parse_in(&vars, "x^2 * y - 3 * y^2 + x").unwrap();
        for norm in [Normalization::Symmetric, Normalization::DividedPower] {
            let vals = polarize(&p, &b, norm).unwrap();
            assert_eq!(diagonal(vals.iter(), &b, &vars, norm).unwrap(), p);
        }
        let sym = polarize(&p, &b, Normalization::Symmetric).unwrap();
        let xxy = b.parse_word("x^x^y").unwrap().unwrap().0;
        assert_eq!(sym[&xxy], crate::scalar::q_frac(1, 3));
    }

    #[test]
    fn bracket_matches_vector_field_commutator() {
        let b = GradedBasis::uniform(["x", "y"], 0).unwrap();
        let s =
            JetSpace::new(JetSpec { fields: vec!["x".into(), "y".into()], derivations: vec![], max_order: 0 }).unwrap();
        let p = |t: &str| s.parse(t).unwrap();
        let f = [(0, p("x * y + 1")), (1, p("y^2"))];
        let g = [(0, p("x^2")), (1, p("x - y"))];
        let norm = Normalization::DividedPower;
        let hf = polarize_field(&b, &f, norm).unwrap();
        let hg = polarize_field(&b, &g, norm).unwrap();
        let br = diagonal_field(&gerstenhaber(&hf, &hg).unwrap(), s.universe(), norm).unwrap();
        let vf = EvolutionaryField::new(&s).with("x", f[0].1.clone()).unwrap().with("y", f[1].1.clone()).unwrap();
        let vg = EvolutionaryField::new(&s).with("x", g[0].1.clone()).unwrap().with("y", g[1].1.clone()).unwrap();
        let k = vf.commutator(&vg).unwrap();
        for a in 0..2u32 {
            let got = br.get(&a).cloned().unwrap_or_else(|| Poly::zero_in(s.universe()));
            assert_eq!(got, -k.component(a as usize));
        }
    }
}
