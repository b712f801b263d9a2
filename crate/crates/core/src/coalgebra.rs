//! The free graded cocommutative coalgebra on a finite graded basis.
//!
//! Words are multisets of generator indices sorted in basis order. The empty
//! word is the unit. Signs follow the Koszul rule: each transposition of two
//! odd factors contributes a factor of -1.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::scalar::{needs_parens, split_sign, Coeff};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
}

/// Named generators with integer degrees, sorted by (degree, name).
#[derive(Clone, Debug)]
pub struct GradedBasis {
    gens: Vec<Generator>,
    index: HashMap<String, u32>,
}

impl PartialEq for GradedBasis {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl Eq for GradedBasis {}

pub fn same_basis(a: &Arc<GradedBasis>, b: &Arc<GradedBasis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl GradedBasis {
    pub fn new<I, S>(gens: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = (S, i32)>,
        S: Into<String>,
    {
        let mut gens: Vec<Generator> = gens.into_iter().map(|(n, d)| Generator { name: n.into(), degree: d }).collect();
        gens.sort_by(|a, b| a.degree.cmp(&b.degree).then_with(|| a.name.cmp(&b.name)));
        let mut index = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if g.name.is_empty() || g.name == "1" || g.name.contains(['^', '*', ' ', ',']) {
                return Err(Error::Invariant(format!("unusable generator name {:?}", g.name)));
            }
            if index.insert(g.name.clone(), i as u32).is_some() {
                return Err(Error::DuplicateGenerator(g.name.clone()));
            }
        }
        Ok(Arc::new(GradedBasis { gens, index }))
    }

    /// All generators in one degree.
    pub fn uniform<I, S>(names: I, degree: i32) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(names.into_iter().map(|n| (n, degree)))
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(GradedBasis { gens: Vec::new(), index: HashMap::new() })
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn name(&self, i: u32) -> &str {
        &self.gens[i as usize].name
    }

    pub fn degree(&self, i: u32) -> i32 {
        self.gens[i as usize].degree
    }

    pub fn is_odd(&self, i: u32) -> bool {
        self.gens[i as usize].degree.rem_euclid(2) == 1
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<u32> {
        self.index_of(name).ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    /// Shift every degree by `k`, keeping names.
    pub fn shifted(&self, k: i32) -> Arc<Self> {
        let gens = self.gens.iter().map(|g| (g.name.clone(), g.degree + k));
        Self::new(gens).expect("shift preserves validity")
    }

    /// Degrees decremented by one.
    pub fn desuspend(&self) -> Arc<Self> {
        self.shifted(-1)
    }

    /// Degrees incremented by one.
    pub fn suspend(&self) -> Arc<Self> {
        self.shifted(1)
    }

    pub fn word_degree(&self, w: &SymWord) -> i32 {
        w.0.iter().map(|&i| self.degree(i)).sum()
    }

    /// Every canonical word of length exactly `n`.
    pub fn words_of_len(&self, n: usize) -> Vec<SymWord> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        self.extend_words(n, 0, &mut cur, &mut out);
        out
    }

    fn extend_words(&self, n: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<SymWord>) {
        if cur.len() == n {
            out.push(SymWord(cur.clone()));
            return;
        }
        for g in start..self.len() as u32 {
            let next = if self.is_odd(g) { g + 1 } else { g };
            cur.push(g);
            self.extend_words(n, next, cur, out);
            cur.pop();
        }
    }

    /// Every canonical word of length at most `max_len`, shortest first.
    pub fn words(&self, max_len: usize) -> Vec<SymWord> {
        (0..=max_len).flat_map(|n| self.words_of_len(n)).collect()
    }

    pub fn render_word(&self, w: &SymWord) -> String {
        if w.is_unit() {
            return "1".to_string();
        }
        w.0.iter().map(|&i| self.name(i)).collect::<Vec<_>>().join("^")
    }

    /// Parse `a^b^c` or `1`; returns the canonical word and sign, or `None` for zero.
    pub fn parse_word(&self, s: &str) -> Result<Option<(SymWord, i32)>> {
        let t = s.trim();
        if t == "1" || t.is_empty() {
            return Ok(Some((SymWord::unit(), 1)));
        }
        let names: Vec<&str> = t.split('^').map(str::trim).collect();
        normalize_word(self, &names)
    }
}

/// A canonical graded-symmetric word: sorted generator indices, no repeated odd factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymWord(Vec<u32>);

impl SymWord {
    pub fn unit() -> Self {
        SymWord(Vec::new())
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[u32] {
        &self.0
    }

    /// Subword at the given (increasing) positions; stays canonical.
    pub fn select(&self, positions: &[usize]) -> SymWord {
        SymWord(positions.iter().map(|&p| self.0[p]).collect())
    }

    /// Multiplicity weight `prod m!` over repeated factors.
    pub fn factorial_weight(&self) -> u64 {
        let mut out = 1u64;
        let mut run = 1u64;
        for k in 1..self.0.len() {
            if self.0[k] == self.0[k - 1] {
                run += 1;
                out *= run;
            } else {
                run = 1;
            }
        }
        out
    }
}

impl Ord for SymWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SymWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SymWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

pub type CoalgElement<R> = Lin<SymWord, R>;
pub type TensorElement<R> = Lin<(SymWord, SymWord), R>;
pub type Tensor3<R> = Lin<(SymWord, SymWord, SymWord), R>;
/// Element of the span of the generators.
pub type Vector<R> = Lin<u32, R>;

/// Sort factors into basis order, tracking the Koszul sign; `None` on a repeated odd factor.
pub fn normalize(basis: &GradedBasis, factors: &[u32]) -> Option<(SymWord, i32)> {
    let mut v = factors.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            if basis.is_odd(v[j - 1]) && basis.is_odd(v[j]) {
                sign = -sign;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    for k in 1..v.len() {
        if v[k] == v[k - 1] && basis.is_odd(v[k]) {
            return None;
        }
    }
    Some((SymWord(v), sign))
}

/// Normalize a list of generator names.
pub fn normalize_word(basis: &GradedBasis, names: &[&str]) -> Result<Option<(SymWord, i32)>> {
    let idx: Vec<u32> = names.iter().map(|n| basis.require(n)).collect::<Result<_>>()?;
    Ok(normalize(basis, &idx))
}

/// Koszul sign of listing `w` in the order `perm` (a permutation of positions).
pub fn koszul_sign(basis: &GradedBasis, w: &SymWord, perm: &[usize]) -> i32 {
    let mut sign = 1;
    for a in 0..perm.len() {
        if !basis.is_odd(w.0[perm[a]]) {
            continue;
        }
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && basis.is_odd(w.0[perm[b]]) {
                sign = -sign;
            }
        }
    }
    sign
}

/// All (p, n-p) unshuffles as (left positions, right positions), 0-based, lexicographic.
pub fn unshuffles(p: usize, n: usize) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if p > n {
        return Err(Error::UnshuffleRange { p, n });
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(p);
    fn rec(p: usize, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, Vec<usize>)>) {
        if cur.len() == p {
            let rest = (0..n).filter(|i| !cur.contains(i)).collect();
            out.push((cur.clone(), rest));
            return;
        }
        for i in start..n {
            if n - i < p - cur.len() {
                break;
            }
            cur.push(i);
            rec(p, n, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(p, n, 0, &mut cur, &mut out);
    Ok(out)
}

/// Ordered splittings of `n` positions into `k` increasing blocks.
pub fn splits(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let total = k.pow(n as u32);
    let mut out = Vec::with_capacity(total);
    for code in 0..total {
        let mut blocks = vec![Vec::new(); k];
        let mut c = code;
        for pos in 0..n {
            blocks[c % k].push(pos);
            c /= k;
        }
        out.push(blocks);
    }
    out
}

/// Terms of the coproduct of one word: (left, right, sign).
pub fn coproduct_word(basis: &GradedBasis, w: &SymWord) -> Vec<(SymWord, SymWord, i32)> {
    let n = w.len();
    let mut out = Vec::with_capacity(1 << n);
    for p in 0..=n {
        for (l, r) in unshuffles(p, n).expect("p <= n") {
            let perm: Vec<usize> = l.iter().chain(r.iter()).copied().collect();
            out.push((w.select(&l), w.select(&r), koszul_sign(basis, w, &perm)));
        }
    }
    out
}

fn signed<R: Coeff>(c: &R, sign: i32) -> R {
    if sign < 0 {
        -c.clone()
    } else {
        c.clone()
    }
}

/// Coproduct by unshuffles, including the `1⊗F` and `F⊗1` terms.
pub fn coproduct<R: Coeff>(basis: &GradedBasis, f: &CoalgElement<R>) -> TensorElement<R> {
    let mut out = TensorElement::zero();
    for (w, c) in f.iter() {
        for (l, r, s) in coproduct_word(basis, w) {
            out.add_term((l, r), signed(c, s));
        }
    }
    out
}

/// Coproduct without the terms involving the unit.
pub fn reduced_coproduct<R: Coeff>(basis: &GradedBasis, f: &CoalgElement<R>) -> TensorElement<R> {
    let mut out = TensorElement::zero();
    for (w, c) in f.iter() {
        for (l, r, s) in coproduct_word(basis, w) {
            if !l.is_unit() && !r.is_unit() {
                out.add_term((l, r), signed(c, s));
            }
        }
    }
    out
}

/// Product of two words, or `None` when it vanishes.
pub fn wedge_words(basis: &GradedBasis, a: &SymWord, b: &SymWord) -> Option<(SymWord, i32)> {
    let cat: Vec<u32> = a.0.iter().chain(b.0.iter()).copied().collect();
    normalize(basis, &cat)
}

pub fn wedge<R: Coeff>(basis: &GradedBasis, f: &CoalgElement<R>, g: &CoalgElement<R>) -> CoalgElement<R> {
    let mut out = CoalgElement::zero();
    for (a, x) in f.iter() {
        for (b, y) in g.iter() {
            if let Some((w, s)) = wedge_words(basis, a, b) {
                out.add_term(w, signed(&(x.clone() * y.clone()), s));
            }
        }
    }
    out
}

/// Graded transposition `a⊗b ↦ (-1)^{|a||b|} b⊗a`.
pub fn transpose<R: Coeff>(basis: &GradedBasis, t: &TensorElement<R>) -> TensorElement<R> {
    let mut out = TensorElement::zero();
    for ((a, b), c) in t.iter() {
        let odd = basis.word_degree(a).rem_euclid(2) == 1 && basis.word_degree(b).rem_euclid(2) == 1;
        out.add_term((b.clone(), a.clone()), signed(c, if odd { -1 } else { 1 }));
    }
    out
}

/// `(Δ⊗1)` applied to a two-slot tensor.
pub fn coproduct_left<R: Coeff>(basis: &GradedBasis, t: &TensorElement<R>) -> Tensor3<R> {
    let mut out = Tensor3::zero();
    for ((a, b), c) in t.iter() {
        for (l, r, s) in coproduct_word(basis, a) {
            out.add_term((l, r, b.clone()), signed(c, s));
        }
    }
    out
}

/// `(1⊗Δ)` applied to a two-slot tensor.
pub fn coproduct_right<R: Coeff>(basis: &GradedBasis, t: &TensorElement<R>) -> Tensor3<R> {
    let mut out = Tensor3::zero();
    for ((a, b), c) in t.iter() {
        for (l, r, s) in coproduct_word(basis, b) {
            out.add_term((a.clone(), l, r), signed(c, s));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CoalgebraReport {
    pub basis: Vec<Generator>,
    pub max_len: usize,
    pub words_checked: usize,
    pub coassociativity_failures: Vec<String>,
    pub cocommutativity_failures: Vec<String>,
    pub unit_term_failures: Vec<String>,
}

impl CoalgebraReport {
    pub fn passed(&self) -> bool {
        self.coassociativity_failures.is_empty()
            && self.cocommutativity_failures.is_empty()
            && self.unit_term_failures.is_empty()
    }
}

/// Coassociativity, cocommutativity and the unit-term split on every word up to `max_len`.
pub fn check_coalgebra_laws(basis: &Arc<GradedBasis>, max_len: usize) -> CoalgebraReport {
    use rayon::prelude::*;
    type Q = num_rational::BigRational;
    let words = basis.words(max_len);
    let results: Vec<(Option<String>, Option<String>, Option<String>)> = words
        .par_iter()
        .map(|w| {
            let f: CoalgElement<Q> = Lin::single(w.clone(), num_traits::One::one());
            let d = coproduct(basis, &f);
            let name = basis.render_word(w);
            let assoc = (coproduct_left(basis, &d) != coproduct_right(basis, &d)).then(|| name.clone());
            let comm = (transpose(basis, &d) != d).then(|| name.clone());
            let mut unit = reduced_coproduct(basis, &f);
            if !w.is_unit() {
                unit.add_term((SymWord::unit(), w.clone()), num_traits::One::one());
                unit.add_term((w.clone(), SymWord::unit()), num_traits::One::one());
            } else {
                unit.add_term((SymWord::unit(), SymWord::unit()), num_traits::One::one());
            }
            let unit_ok = unit == d;
            (assoc, comm, (!unit_ok).then_some(name))
        })
        .collect();
    let mut rep = CoalgebraReport {
        basis: basis.generators().to_vec(),
        max_len,
        words_checked: words.len(),
        coassociativity_failures: Vec::new(),
        cocommutativity_failures: Vec::new(),
        unit_term_failures: Vec::new(),
    };
    for (a, c, u) in results {
        rep.coassociativity_failures.extend(a);
        rep.cocommutativity_failures.extend(c);
        rep.unit_term_failures.extend(u);
    }
    rep
}

/// Render a scalar-weighted word sum, shortest words first.
pub fn render_element<R: Coeff>(basis: &GradedBasis, f: &CoalgElement<R>) -> String {
    render_terms(f.iter().map(|(w, c)| (basis.render_word(w), c)))
}

/// Render a vector in generator names.
pub fn render_vector<R: Coeff>(basis: &GradedBasis, v: &Vector<R>) -> String {
    render_terms(v.iter().map(|(g, c)| (basis.name(*g).to_string(), c)))
}

pub(crate) fn render_terms<'a, R: Coeff + 'a>(terms: impl Iterator<Item = (String, &'a R)>) -> String {
    let mut out = String::new();
    for (k, (word, c)) in terms.enumerate() {
        let (neg, mag) = split_sign(c);
        let body = if word == "1" {
            if needs_parens(&mag) && k > 0 {
                format!("({mag})")
            } else {
                mag
            }
        } else if *c == R::one() || *c == -R::one() {
            word
        } else if needs_parens(&mag) {
            format!("({mag}) * {word}")
        } else {
            format!("{mag} * {word}")
        };
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body)
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body)
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body)
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn split_signed_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch)
            }
            ')' => {
                depth -= 1;
                cur.push(ch)
            }
            '+' | '-' if depth == 0 => {
                let t = cur.trim();
                if t.is_empty() {
                    // a leading sign, or one right after another as in `a + -2 * b`
                    neg ^= ch == '-';
                } else if t.ends_with('*') {
                    return Err(Error::Parse(format!("dangling `*` in {s:?}")));
                } else {
                    out.push((neg, t.to_string()));
                    neg = ch == '-';
                }
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    let t = cur.trim();
    if t.is_empty() {
        return Err(Error::Parse(format!("empty term in {s:?}")));
    }
    out.push((neg, t.to_string()));
    Ok(out)
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(s[start..i].trim());
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

/// Parse terms of the form `c * w`, `w` or `c`, where `w` is a caret-joined word.
pub fn parse_terms<R, K>(
    s: &str,
    mut word: impl FnMut(&str) -> Result<Option<(K, i32)>>,
    unit: K,
) -> Result<Vec<(K, R)>>
where
    R: Coeff + FromStr,
    K: Clone,
{
    let mut out = Vec::new();
    if s.trim() == "0" {
        return Ok(out);
    }
    for (neg, t) in split_signed_terms(s)? {
        let mut coef = R::one();
        let mut key: Option<K> = None;
        let mut zero = false;
        for part in split_top_level(&t, '*') {
            // a bare generator name wins over a coefficient that happens to parse
            let parenthesized = part.starts_with('(') && part.ends_with(')');
            let as_word = if parenthesized { None } else { Some(word(part)) };
            match as_word {
                Some(Ok(found)) => {
                    if key.is_some() {
                        return Err(Error::Parse(format!("two words in one term {t:?}")));
                    }
                    match found {
                        Some((k, sign)) => {
                            if sign < 0 {
                                coef = -coef;
                            }
                            key = Some(k);
                        }
                        None => zero = true,
                    }
                }
                other => {
                    let inner = if parenthesized { &part[1..part.len() - 1] } else { part };
                    match R::from_str(inner) {
                        Ok(c) => coef = coef * c,
                        Err(_) => {
                            return Err(match other {
                                Some(Err(e)) => e,
                                _ => Error::Parse(format!("bad coefficient {inner:?}")),
                            })
                        }
                    }
                }
            }
        }
        if zero {
            continue;
        }
        if neg {
            coef = -coef;
        }
        out.push((key.unwrap_or_else(|| unit.clone()), coef));
    }
    Ok(out)
}

pub fn parse_element<R: Coeff + FromStr>(basis: &GradedBasis, s: &str) -> Result<CoalgElement<R>> {
    let terms = parse_terms::<R, SymWord>(s, |w| basis.parse_word(w), SymWord::unit())?;
    Ok(terms.into_iter().collect())
}

/// Parse a linear combination of generators.
pub fn parse_vector<R: Coeff + FromStr>(basis: &GradedBasis, s: &str) -> Result<Vector<R>> {
    let mut out = Vector::zero();
    if s.trim() == "0" {
        return Ok(out);
    }
    let terms = parse_terms::<R, Option<u32>>(s, |w| Ok(Some((Some(basis.require(w.trim())?), 1))), None)?;
    for (k, c) in terms {
        let g = k.ok_or_else(|| Error::Parse(format!("constant term in vector {s:?}")))?;
        out.add_term(g, c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::Q;

    fn even3() -> Arc<GradedBasis> {
        GradedBasis::uniform(["phi1", "phi2", "phi3"], 0).unwrap()
    }

    #[test]
    fn stacked_signs_fold() {
        let b = GradedBasis::uniform(["e1", "e2"], 0).unwrap();
        let v: Vector<Q> = parse_vector(&b, "e1 + -2 * e2 - -e1").unwrap();
        assert_eq!(v, parse_vector(&b, "2 * e1 - 2 * e2").unwrap());
        assert!(parse_vector::<Q>(&b, "e1 +").is_err());
    }

    #[test]
    fn polynomial_coefficients_round_trip() {
        let b = GradedBasis::uniform(["f1", "f2"], 0).unwrap();
        for text in ["(u * v) * f1 - u^2 * f2", "u * f1", "(u[u;x] + 1) * f2", "-(u - v) * f1"] {
            let v: Vector<crate::QPoly> = parse_vector(&b, text).unwrap();
            let back: Vector<crate::QPoly> = parse_vector(&b, &render_vector(&b, &v)).unwrap();
            assert_eq!(v, back, "{text}");
        }
        let v: Vector<crate::QPoly> = parse_vector(&b, "(u * v) * f1").unwrap();
        assert_eq!(render_vector(&b, &v), "(u * v) * f1");
    }

    fn odd2() -> Arc<GradedBasis> {
        GradedBasis::uniform(["xi1", "xi2"], -1).unwrap()
    }

    fn el(b: &GradedBasis, s: &str) -> CoalgElement<Q> {
        parse_element(b, s).unwrap()
    }

    fn t2(b: &GradedBasis, terms: &[(&str, &str, i64)]) -> TensorElement<Q> {
        terms
            .iter()
            .map(|(l, r, c)| {
                let (l, _) = b.parse_word(l).unwrap().unwrap();
                let (r, _) = b.parse_word(r).unwrap().unwrap();
                ((l, r), q(*c))
            })
            .collect()
    }

    #[test]
    fn normalize_examples() {
        let e = even3();
        assert_eq!(normalize_word(&e, &["phi2", "phi1"]).unwrap(), Some((SymWord(vec![0, 1]), 1)));
        let o = odd2();
        assert_eq!(normalize_word(&o, &["xi2", "xi1"]).unwrap(), Some((SymWord(vec![0, 1]), -1)));
        assert_eq!(normalize_word(&o, &["xi1", "xi1"]).unwrap(), None);
        assert!(matches!(normalize_word(&o, &["phi1"]), Err(Error::UnknownGenerator(_))));
    }

    #[test]
    fn normalize_is_idempotent_and_signs_compose() {
        let b = GradedBasis::new([("a", 1), ("b", 1), ("c", 0), ("d", 3)]).unwrap();
        let raw = [3u32, 0, 2, 1];
        let (w, s1) = normalize(&b, &raw).unwrap();
        let (w2, s2) = normalize(&b, w.factors()).unwrap();
        assert_eq!((w2, s2), (w.clone(), 1));
        // raw -> mid -> sorted: the signs multiply
        let perm = [1usize, 0, 3, 2];
        let mid: Vec<u32> = perm.iter().map(|&k| raw[k]).collect();
        let mut s_step = 1;
        for a in 0..perm.len() {
            for c in a + 1..perm.len() {
                if perm[a] > perm[c] && b.is_odd(raw[perm[a]]) && b.is_odd(raw[perm[c]]) {
                    s_step = -s_step;
                }
            }
        }
        let (w3, s_mid) = normalize(&b, &mid).unwrap();
        assert_eq!(w3, w);
        assert_eq!(s_step * s_mid, s1);
    }

    #[test]
    fn unshuffle_examples() {
        let u = unshuffles(1, 3).unwrap();
        assert_eq!(u, vec![(vec![0], vec![1, 2]), (vec![1], vec![0, 2]), (vec![2], vec![0, 1])]);
        assert_eq!(unshuffles(0, 4).unwrap(), vec![(vec![], vec![0, 1, 2, 3])]);
        assert_eq!(unshuffles(2, 4).unwrap().len(), 6);
        assert!(unshuffles(5, 4).is_err());
    }

    #[test]
    fn coproduct_examples() {
        let e = even3();
        assert_eq!(coproduct(&e, &el(&e, "phi1")), t2(&e, &[("1", "phi1", 1), ("phi1", "1", 1)]));
        assert_eq!(
            coproduct(&e, &el(&e, "phi1^phi2")),
            t2(&e, &[("1", "phi1^phi2", 1), ("phi1", "phi2", 1), ("phi2", "phi1", 1), ("phi1^phi2", "1", 1)])
        );
        let o = odd2();
        assert_eq!(
            coproduct(&o, &el(&o, "xi1^xi2")),
            t2(&o, &[("1", "xi1^xi2", 1), ("xi1", "xi2", 1), ("xi2", "xi1", -1), ("xi1^xi2", "1", 1)])
        );
    }

    #[test]
    fn coproduct_of_square_counts_positions() {
        let e = even3();
        let d = coproduct(&e, &el(&e, "phi1^phi1"));
        assert_eq!(d, t2(&e, &[("1", "phi1^phi1", 1), ("phi1", "phi1", 2), ("phi1^phi1", "1", 1)]));
    }

    #[test]
    fn wedge_examples() {
        let e = even3();
        let f = el(&e, "2 * phi1^phi3 - phi2");
        assert_eq!(wedge(&e, &el(&e, "1"), &f), f);
        assert_eq!(wedge(&e, &el(&e, "phi1"), &el(&e, "phi2")), el(&e, "phi1^phi2"));
        let o = odd2();
        assert!(wedge(&o, &el(&o, "xi1"), &el(&o, "xi1")).is_zero());
        assert_eq!(wedge(&o, &el(&o, "xi2"), &el(&o, "xi1")), el(&o, "-xi1^xi2"));
    }

    #[test]
    fn desuspension() {
        let b = GradedBasis::new([("xi", 0), ("phi", 1)]).unwrap();
        let d = b.desuspend();
        assert_eq!(d.degree(d.require("xi").unwrap()), -1);
        assert_eq!(d.degree(d.require("phi").unwrap()), 0);
        assert!(GradedBasis::empty().desuspend().is_empty());
        let x = GradedBasis::new([("x", 5)]).unwrap().desuspend();
        assert_eq!(x.degree(0), 4);
        assert_eq!(d.suspend(), b);
    }

    #[test]
    fn word_enumeration_skips_odd_squares() {
        let b = GradedBasis::new([("x", -1), ("y", 0)]).unwrap();
        let names: Vec<String> = b.words(2).iter().map(|w| b.render_word(w)).collect();
        assert_eq!(names, ["1", "x", "y", "x^y", "y^y"]);
    }

    #[test]
    fn element_text_round_trip() {
        let e = even3();
        for s in ["1", "phi1", "phi3 - 3/2 * phi1^phi2", "2 - phi1^phi1^phi3", "0"] {
            let f = el(&e, s);
            assert_eq!(render_element(&e, &f), s);
        }
        assert!(parse_element::<Q>(&e, "phi9").is_err());
        let v: Vector<Q> = parse_vector(&e, "phi2 - 1/3 * phi1").unwrap();
        assert_eq!(render_vector(&e, &v), "-1/3 * phi1 + phi2");
    }

    #[test]
    fn laws_hold_on_mixed_basis() {
        let b = GradedBasis::new([("a", -1), ("b", 0), ("c", 1), ("d", 2)]).unwrap();
        let rep = check_coalgebra_laws(&b, 4);
        assert!(rep.passed(), "{rep:?}");
    }
}
