//! sh-Lie structures on 𝕃 = Ξ ⊕ Φ: the differential D on Λ*(↓𝕃), its square,
//! and the brackets l_n read off from it.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::coalgebra::{normalize, render_vector, unshuffles, GradedBasis, SymWord, Vector};
use crate::error::{Error, Result};
use crate::gauge::{corrected_bracket_up_to, delta_hat_up_to, GaugeData, ParamMap, StrictLieInput};
use crate::hom::{comp_up_to, gerstenhaber_up_to, HomMap, Known};
use crate::scalar::Coeff;

/// Outcome of testing one coefficient against an ideal of on-shell relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ShellVerdict {
    Member,
    NotMember,
    Undecided(String),
}

/// Anything that can decide whether a coefficient vanishes on shell.
pub trait Shell<R>: Sync {
    fn classify(&self, value: &R) -> ShellVerdict;
}

/// 𝕃 with Ξ in degree 0 and Φ in degree 1, and D: Λ*(↓𝕃) → ↓𝕃 of degree +1.
#[derive(Clone, Debug)]
pub struct ShLieData<R> {
    l_basis: Arc<GradedBasis>,
    down: Arc<GradedBasis>,
    n_xi: usize,
    d: HomMap<R>,
}

impl<R: Coeff> ShLieData<R> {
    /// Wrap an arbitrary D; `l_basis` must sit in degrees 0 and 1.
    pub fn from_d(l_basis: &Arc<GradedBasis>, d: HomMap<R>) -> Result<Self> {
        if l_basis.generators().iter().any(|g| g.degree != 0 && g.degree != 1) {
            return Err(Error::DegreeMismatch("𝕃 lives in degrees 0 and 1".into()));
        }
        let down = l_basis.desuspend();
        if !crate::coalgebra::same_basis(d.source(), &down) || !d.is_endo() || (d.degree() != 1 && !d.is_zero()) {
            return Err(Error::BasisMismatch("D must be a degree +1 map Λ*(↓𝕃) → ↓𝕃".into()));
        }
        let n_xi = l_basis.generators().iter().filter(|g| g.degree == 0).count();
        Ok(ShLieData { l_basis: l_basis.clone(), down, n_xi, d })
    }

    pub fn l_basis(&self) -> &Arc<GradedBasis> {
        &self.l_basis
    }

    pub fn down(&self) -> &Arc<GradedBasis> {
        &self.down
    }

    pub fn d(&self) -> &HomMap<R> {
        &self.d
    }

    pub fn xi_count(&self, w: &SymWord) -> usize {
        w.factors().iter().filter(|&&g| (g as usize) < self.n_xi).count()
    }
}

/// Merge the two gauge bases into 𝕃; Ξ indices come first, then Φ.
pub fn l_basis_of<R: Coeff>(data: &GaugeData<R>) -> Result<Arc<GradedBasis>> {
    let xi = data.xi().generators().iter().map(|g| (g.name.clone(), 0));
    let phi = data.phi().generators().iter().map(|g| (g.name.clone(), 1));
    if data.phi().generators().iter().any(|g| g.degree != 0) {
        return Err(Error::DegreeMismatch("Φ must be in degree 0 to form 𝕃".into()));
    }
    GradedBasis::new(xi.chain(phi))
}

fn shift_word(down: &GradedBasis, head: &[u32], tail: &SymWord, offset: u32) -> Option<(SymWord, i32)> {
    let factors: Vec<u32> = head.iter().copied().chain(tail.factors().iter().map(|&g| g + offset)).collect();
    normalize(down, &factors)
}

/// D(ξ∧φ…) = δ(ξ)(φ…), D(ξ₁∧ξ₂∧φ…) = C(ξ₁,ξ₂)(φ…), zero on every other shape.
#[allow(non_snake_case)]
pub fn build_D<R: Coeff>(data: &GaugeData<R>) -> Result<ShLieData<R>> {
    let l_basis = l_basis_of(data)?;
    let down = l_basis.desuspend();
    let nx = data.xi().len() as u32;
    let known = match data.known() {
        Known::Total => Known::Total,
        // a Φ-word of length k sits under one or two Ξ factors
        Known::UpTo(k) => Known::UpTo(k + 1),
    };
    let mut d = HomMap::new(&down, &down, 1);
    let to_phi = |v: &Vector<R>| v.map_keys(|&g| g + nx);
    for i in 0..nx {
        for (w, v) in data.delta(i).values() {
            let (word, s) = shift_word(&down, &[i], w, nx).expect("single odd factor");
            let v = to_phi(v);
            d.add_value(word, &if s < 0 { v.neg() } else { v })?;
        }
        for j in i + 1..nx {
            for (w, v) in data.correction(i, j).values() {
                let (word, s) = shift_word(&down, &[i, j], w, nx).expect("distinct odd factors");
                d.add_value(word, &if s < 0 { v.neg() } else { v.clone() })?;
            }
        }
    }
    let d = d.with_known(known);
    let n_xi = nx as usize;
    Ok(ShLieData { l_basis, down, n_xi, d })
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WordResidual {
    pub word: String,
    pub residual: String,
    /// "nonzero" without a shell; otherwise the membership verdict.
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SquareZeroReport {
    pub cap: usize,
    pub words_checked: usize,
    /// Words with a nonzero residual that the shell accepted.
    pub on_shell: Vec<String>,
    pub failures: Vec<WordResidual>,
}

impl SquareZeroReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// D∘D̄ as a map, on words up to `cap`.
pub fn d_dbar<R: Coeff>(s: &ShLieData<R>, cap: usize) -> Result<HomMap<R>> {
    comp_up_to(&s.d, &s.d, cap)
}

/// Check D∘D̄ = 0 on every word up to `cap`, exactly or modulo the shell.
pub fn check_square_zero<R: Coeff>(
    s: &ShLieData<R>,
    cap: usize,
    shell: Option<&dyn Shell<R>>,
) -> Result<SquareZeroReport> {
    check_square_zero_where(s, cap, shell, |_| true)
}

/// As [`check_square_zero`], restricted to words accepted by `keep`.
pub fn check_square_zero_where<R: Coeff>(
    s: &ShLieData<R>,
    cap: usize,
    shell: Option<&dyn Shell<R>>,
    keep: impl Fn(&SymWord) -> bool + Sync,
) -> Result<SquareZeroReport> {
    let words: Vec<SymWord> = s.down.words(cap).into_iter().filter(|w| keep(w)).collect();
    let dd = d_dbar(s, cap)?;
    let verdicts: Vec<(String, Option<WordResidual>)> = words
        .par_iter()
        .filter_map(|w| {
            let v = dd.get(w)?;
            let word = s.down.render_word(w);
            let residual = render_vector(&s.down, v);
            let Some(shell) = shell else {
                return Some((word.clone(), Some(WordResidual { word, residual, verdict: "nonzero".into() })));
            };
            let fail = off_shell(shell, v);
            Some((word.clone(), fail.map(|verdict| WordResidual { word, residual, verdict })))
        })
        .collect();
    let mut on_shell = Vec::new();
    let mut failures = Vec::new();
    for (word, f) in verdicts {
        match f {
            Some(f) => failures.push(f),
            None => on_shell.push(word),
        }
    }
    Ok(SquareZeroReport { cap, words_checked: words.len(), on_shell, failures })
}

/// Why `v` is not known to vanish on shell, or None when every coefficient is a member.
fn off_shell<R: Coeff>(shell: &dyn Shell<R>, v: &Vector<R>) -> Option<String> {
    let mut worst = ShellVerdict::Member;
    for (_, c) in v.iter() {
        match shell.classify(c) {
            ShellVerdict::Member => {}
            ShellVerdict::NotMember => return Some("off shell".to_string()),
            u @ ShellVerdict::Undecided(_) => worst = u,
        }
    }
    match worst {
        ShellVerdict::Undecided(why) => Some(format!("undecided: {why}")),
        _ => None,
    }
}

/// The Φ-word left after dropping `skip` leading Ξ factors.
fn phi_word(data_phi: &GradedBasis, down: &GradedBasis, w: &SymWord, skip: usize) -> Option<SymWord> {
    let names: Vec<&str> = w.factors()[skip..].iter().map(|&g| down.name(g)).collect();
    crate::coalgebra::normalize_word(data_phi, &names).ok().flatten().map(|x| x.0)
}

/// Words up to `cap` with exactly two Ξ entries where
/// D∘D̄ ≠ −[δ(ξ₁),δ(ξ₂)] + δ̂C(ξ₁,ξ₂).
pub fn two_xi_mismatches<R: Coeff>(data: &GaugeData<R>, s: &ShLieData<R>, cap: usize) -> Result<Vec<String>> {
    let dd = d_dbar(s, cap)?;
    let nx = s.n_xi as u32;
    let mut bad = Vec::new();
    for i in 0..nx {
        for j in i + 1..nx {
            let br = gerstenhaber_up_to(data.delta(i), data.delta(j), cap.saturating_sub(2))?;
            let dc = delta_hat_up_to(&ParamMap::new(data, data.correction(i, j))?, data, cap.saturating_sub(2))?;
            let expect = dc.minus(&br)?;
            for w in s.down.words(cap) {
                if w.len() < 2 || w.factors()[0] != i || w.factors()[1] != j || s.xi_count(&w) != 2 {
                    continue;
                }
                let pw = phi_word(data.phi(), &s.down, &w, 2).expect("Φ tail");
                let want = expect.eval_word(&pw)?.map_keys(|&g| g + nx);
                if dd.get(&w).cloned().unwrap_or_default() != want {
                    bad.push(s.down.render_word(&w));
                }
            }
        }
    }
    Ok(bad)
}

/// Words up to `cap` with exactly three Ξ entries where D∘D̄ differs from
/// [[ξ₁,ξ₂],ξ₃] − [[ξ₁,ξ₃],ξ₂] + [[ξ₂,ξ₃],ξ₁] evaluated on the Φ tail.
pub fn three_xi_mismatches<R: Coeff>(data: &GaugeData<R>, s: &ShLieData<R>, cap: usize) -> Result<Vec<String>> {
    let dd = d_dbar(s, cap)?;
    let nx = s.n_xi as u32;
    let inner = cap.saturating_sub(3);
    let bracket = |a: u32, b: u32, c: u32| -> Result<HomMap<R>> {
        let cab = ParamMap::new(data, data.correction(a, b))?;
        Ok(corrected_bracket_up_to(&cab, &ParamMap::constant(data, c), data, inner)?.into_map())
    };
    let mut bad = Vec::new();
    for i in 0..nx {
        for j in i + 1..nx {
            for k in j + 1..nx {
                let jac = bracket(i, j, k)?.minus(&bracket(i, k, j)?)?.plus(&bracket(j, k, i)?)?;
                for w in s.down.words(cap) {
                    if w.len() < 3 || w.factors()[..3] != [i, j, k] || s.xi_count(&w) != 3 {
                        continue;
                    }
                    let pw = phi_word(data.phi(), &s.down, &w, 3).expect("Φ tail");
                    let want = jac.eval_word(&pw)?;
                    if dd.get(&w).cloned().unwrap_or_default() != want {
                        bad.push(s.down.render_word(&w));
                    }
                }
            }
        }
    }
    Ok(bad)
}

/// The brackets l_n on 𝕃, stored on ↓𝕃-canonical words.
#[derive(Clone, Debug)]
pub struct BracketFamily<R> {
    l_basis: Arc<GradedBasis>,
    down: Arc<GradedBasis>,
    brackets: BTreeMap<usize, HomMap<R>>,
    known: Known,
}

/// Sign convention used when reading l_n off D, for reports.
pub const SIGN_TABLE: &str = "l_n(x_1,...,x_n) = (-1)^{sum_k (n-k)|x_k|} D(x_1^...^x_n) with |x| the degree in L \
(Xi 0, Phi 1); reordering arguments multiplies by -(-1)^{|x||y|} per transposition; \
relations use (-1)^{i(j-1)} times that reordering sign";

/// Read l_n off the arity-n component of D.
pub fn extract_brackets<R: Coeff>(s: &ShLieData<R>) -> BracketFamily<R> {
    let mut brackets: BTreeMap<usize, HomMap<R>> = BTreeMap::new();
    for (w, v) in s.d.values() {
        let n = w.len();
        let e: i32 = w.factors().iter().enumerate().map(|(k, &g)| (n - 1 - k) as i32 * s.l_basis.degree(g)).sum();
        let v = if e % 2 == 1 { v.neg() } else { v.clone() };
        brackets
            .entry(n)
            .or_insert_with(|| HomMap::new(&s.down, &s.l_basis, 2))
            .add_value(w.clone(), &v)
            .expect("degree 2 - n on L");
    }
    BracketFamily { l_basis: s.l_basis.clone(), down: s.down.clone(), brackets, known: s.d.known() }
}

impl<R: Coeff> BracketFamily<R> {
    pub fn l_basis(&self) -> &Arc<GradedBasis> {
        &self.l_basis
    }

    pub fn arities(&self) -> impl Iterator<Item = usize> + '_ {
        self.brackets.iter().filter(|(_, h)| !h.is_zero()).map(|(&n, _)| n)
    }

    pub fn component(&self, n: usize) -> Option<&HomMap<R>> {
        self.brackets.get(&n)
    }

    /// l_n on an arbitrary tuple of 𝕃 generators.
    pub fn eval(&self, args: &[u32]) -> Result<Vector<R>> {
        if !self.known.covers(args.len()) {
            return Err(Error::CapExceeded {
                map: "l_n".into(),
                needed: args.len(),
                known: self.known.limit().unwrap_or(usize::MAX),
            });
        }
        let deg = |g: u32| self.l_basis.degree(g);
        let mut a = args.to_vec();
        let mut sign = 1i32;
        for pass in 0..a.len() {
            for k in 0..a.len().saturating_sub(1 + pass) {
                if a[k] > a[k + 1] {
                    if (deg(a[k]) * deg(a[k + 1])) % 2 == 0 {
                        sign = -sign;
                    }
                    a.swap(k, k + 1);
                }
            }
        }
        // graded antisymmetry kills repeated even entries
        if a.windows(2).any(|p| p[0] == p[1] && deg(p[0]) % 2 == 0) {
            return Ok(Vector::zero());
        }
        let Some((w, _)) = normalize(&self.down, &a) else {
            return Ok(Vector::zero());
        };
        let v = self.brackets.get(&args.len()).and_then(|h| h.get(&w)).cloned().unwrap_or_default();
        Ok(if sign < 0 { v.neg() } else { v })
    }

    /// Linear extension of `eval` in its first argument.
    fn eval_first(&self, head: &Vector<R>, rest: &[u32]) -> Result<Vector<R>> {
        let mut out = Vector::zero();
        for (&g, c) in head.iter() {
            let mut args = vec![g];
            args.extend_from_slice(rest);
            out.add_scaled(&self.eval(&args)?, c);
        }
        Ok(out)
    }

    /// Arity-tagged tables of (tuple, value).
    pub fn to_tables(&self) -> BTreeMap<usize, Vec<(String, String)>> {
        self.brackets
            .iter()
            .filter(|(_, h)| !h.is_zero())
            .map(|(&n, h)| {
                let rows = h
                    .values()
                    .map(|(w, v)| {
                        let args: Vec<&str> = w.factors().iter().map(|&g| self.l_basis.name(g)).collect();
                        (args.join(", "), render_vector(&self.l_basis, v))
                    })
                    .collect();
                (n, rows)
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RelationFailure {
    pub tuple: String,
    pub residual: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LnRelationReport {
    pub cap: usize,
    pub tuples_checked: usize,
    pub sign_table: String,
    pub on_shell: Vec<String>,
    pub failures: Vec<RelationFailure>,
}

impl LnRelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Σ_{i+j=n+1} Σ_σ χ(σ)(−1)^{i(j−1)} l_j(l_i(x_σ(1..i)), x_σ(i+1..n)) on one tuple.
pub fn relation_residual<R: Coeff>(b: &BracketFamily<R>, x: &[u32]) -> Result<Vector<R>> {
    let n = x.len();
    let deg = |g: u32| b.l_basis.degree(g);
    let mut out = Vector::zero();
    for i in 1..=n {
        let j = n + 1 - i;
        for (l, r) in unshuffles(i, n)? {
            let perm: Vec<usize> = l.iter().chain(r.iter()).copied().collect();
            let mut sign = if (i * (j - 1)) % 2 == 1 { -1i32 } else { 1 };
            for a in 0..n {
                for c in a + 1..n {
                    if perm[a] > perm[c] && (deg(x[perm[a]]) * deg(x[perm[c]])) % 2 == 0 {
                        sign = -sign;
                    }
                }
            }
            let inner_args: Vec<u32> = l.iter().map(|&k| x[k]).collect();
            let inner = b.eval(&inner_args)?;
            if inner.is_zero() {
                continue;
            }
            let rest: Vec<u32> = r.iter().map(|&k| x[k]).collect();
            let v = b.eval_first(&inner, &rest)?;
            if sign < 0 {
                out.add_scaled(&v, &-R::one());
            } else {
                out.add_assign(&v);
            }
        }
    }
    Ok(out)
}

/// Evaluate the sh-Lie relations on every canonical tuple of length 1..=cap.
pub fn check_ln_relations<R: Coeff>(b: &BracketFamily<R>, cap: usize) -> Result<LnRelationReport> {
    check_ln_relations_on_shell(b, cap, None)
}

/// As [`check_ln_relations`], accepting residuals whose coefficients lie in the shell.
pub fn check_ln_relations_on_shell<R: Coeff>(
    b: &BracketFamily<R>,
    cap: usize,
    shell: Option<&dyn Shell<R>>,
) -> Result<LnRelationReport> {
    let tuples: Vec<SymWord> = b.down.words(cap).into_iter().filter(|w| !w.is_unit()).collect();
    let outcomes: Vec<Option<(RelationFailure, Option<String>)>> = tuples
        .par_iter()
        .map(|w| {
            let r = relation_residual(b, w.factors())?;
            if r.is_zero() {
                return Ok(None);
            }
            let failure = RelationFailure {
                tuple: w.factors().iter().map(|&g| b.l_basis.name(g)).collect::<Vec<_>>().join(", "),
                residual: render_vector(&b.l_basis, &r),
            };
            let why = match shell {
                Some(sh) => off_shell(sh, &r),
                None => Some("nonzero".to_string()),
            };
            Ok(Some((failure, why)))
        })
        .collect::<Result<_>>()?;
    let mut on_shell = Vec::new();
    let mut failures = Vec::new();
    for (f, why) in outcomes.into_iter().flatten() {
        match why {
            Some(_) => failures.push(f),
            None => on_shell.push(f.tuple),
        }
    }
    Ok(LnRelationReport { cap, tuples_checked: tuples.len(), sign_table: SIGN_TABLE.into(), on_shell, failures })
}

/// Differences between the extracted family and the semidirect product built
/// from strict Lie data: l₁ = ∂, l₂ = bracket and action, l_n = 0 for n ≥ 3.
pub fn semidirect_mismatches<R: Coeff>(input: &StrictLieInput<R>, b: &BracketFamily<R>) -> Result<Vec<String>> {
    let nx = input.xi.len() as u32;
    let np = input.phi.len() as u32;
    let lb = &b.l_basis;
    let mut bad = Vec::new();
    let unit = |i: u32| Vector::single(i, R::one());
    for a in 0..nx {
        let want = input.boundary_of(&unit(a)).map_keys(|&g| g + nx);
        if b.eval(&[a])? != want {
            bad.push(format!("l1({})", lb.name(a)));
        }
        for c in 0..nx {
            if b.eval(&[a, c])? != input.lie_bracket(a, c) {
                bad.push(format!("l2({}, {})", lb.name(a), lb.name(c)));
            }
        }
        for g in 0..np {
            let want = input.act(a, g).map_keys(|&h| h + nx);
            if b.eval(&[a, g + nx])? != want {
                bad.push(format!("l2({}, {})", lb.name(a), lb.name(g + nx)));
            }
        }
    }
    for g in 0..np {
        if !b.eval(&[g + nx])?.is_zero() {
            bad.push(format!("l1({})", lb.name(g + nx)));
        }
        for h in 0..np {
            if !b.eval(&[g + nx, h + nx])?.is_zero() {
                bad.push(format!("l2({}, {})", lb.name(g + nx), lb.name(h + nx)));
            }
        }
    }
    for n in b.arities().filter(|&n| n >= 3) {
        bad.push(format!("l{n} is nonzero"));
    }
    Ok(bad)
}
