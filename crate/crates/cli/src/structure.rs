//! Structure files: TOML in, validated domain objects out, and a canonical
//! serializer that reproduces shipped fixtures byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use shlie_core::coalgebra::{parse_vector, render_vector, GradedBasis, Vector};
use shlie_core::gauge::{GaugeData, StrictLieInput};
use shlie_core::hom::HomMap;
use shlie_core::ikeda::NonlinearLieAlgebra;
use shlie_core::jet::{JetSpace, JetSpec};
use shlie_core::poly::{universe, Poly, Universe};
use shlie_core::{QPoly, Q};

use crate::CliError;

/// Lie algebra Ξ acting on Φ with a boundary map.
#[derive(Clone, Debug)]
pub struct StrictLieFile {
    pub name: String,
    pub input: StrictLieInput<Q>,
}

/// Gauge data given by tables of δ and C, with optional jet coefficients
/// and shell generators.
#[derive(Clone, Debug)]
pub struct GaugeFile {
    pub name: String,
    pub data: GaugeData<QPoly>,
    pub jet: Option<JetSpec>,
    pub shell: Vec<QPoly>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearFile {
    pub name: String,
    pub alg: NonlinearLieAlgebra,
}

#[derive(Clone, Debug)]
pub enum Structure {
    StrictLie(StrictLieFile),
    Gauge(GaugeFile),
    NonlinearLie(NonlinearFile),
}

#[derive(Deserialize)]
struct KindOnly {
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairValue {
    pair: [String; 2],
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OfValue {
    of: String,
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStrict {
    #[allow(dead_code)]
    kind: String,
    name: String,
    xi: Vec<String>,
    phi: Vec<String>,
    #[serde(default)]
    bracket: Vec<PairValue>,
    #[serde(default)]
    action: Vec<PairValue>,
    #[serde(default)]
    boundary: Vec<OfValue>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJet {
    fields: Vec<String>,
    derivations: Vec<String>,
    max_order: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShell {
    generators: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDelta {
    of: String,
    word: String,
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrection {
    pair: [String; 2],
    word: String,
    value: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGauge {
    #[allow(dead_code)]
    kind: String,
    name: String,
    xi: Vec<String>,
    phi: Vec<String>,
    jet: Option<RawJet>,
    shell: Option<RawShell>,
    #[serde(default)]
    delta: Vec<RawDelta>,
    #[serde(default)]
    correction: Vec<RawCorrection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNonlinear {
    #[allow(dead_code)]
    kind: String,
    name: String,
    generators: Vec<String>,
    #[serde(default)]
    w: Vec<PairValue>,
}

fn toml_err(e: toml::de::Error) -> CliError {
    CliError::Toml(e.to_string())
}

fn at(what: String) -> impl FnOnce(shlie_core::Error) -> CliError {
    move |e| CliError::Invalid(format!("{what}: {e}"))
}

fn coeffs_in(v: Vector<QPoly>, vars: &Universe, what: &str) -> Result<Vector<QPoly>, CliError> {
    v.iter()
        .map(|(g, c)| {
            let c = if c.is_empty() { Ok(Poly::zero_in(vars)) } else { c.in_universe(vars) };
            c.map(|c| (*g, c)).map_err(at(what.to_string()))
        })
        .collect()
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::StrictLie(_) => "strict-lie",
            Structure::Gauge(_) => "gauge",
            Structure::NonlinearLie(_) => "nonlinear-lie",
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Structure::StrictLie(s) => &s.name,
            Structure::Gauge(s) => &s.name,
            Structure::NonlinearLie(s) => &s.name,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let kind: KindOnly = toml::from_str(text).map_err(toml_err)?;
        match kind.kind.as_str() {
            "strict-lie" => Self::parse_strict(toml::from_str(text).map_err(toml_err)?),
            "gauge" => Self::parse_gauge(toml::from_str(text).map_err(toml_err)?),
            "nonlinear-lie" => Self::parse_nonlinear(toml::from_str(text).map_err(toml_err)?),
            other => {
                Err(CliError::Invalid(format!("unknown kind {other:?}; expected strict-lie, gauge or nonlinear-lie")))
            }
        }
    }

    fn parse_strict(raw: RawStrict) -> Result<Self, CliError> {
        let mut input = StrictLieInput::new(raw.xi, raw.phi).map_err(at("bases".into()))?;
        for PairValue { pair: [a, b], value } in &raw.bracket {
            if input.xi.index_of(b).is_some() && input.xi.index_of(a).is_some() {
                let (i, j) = (input.xi.require(a).unwrap(), input.xi.require(b).unwrap());
                if input.bracket.contains_key(&(i, j)) {
                    return Err(CliError::Invalid(format!("bracket [{a}, {b}] given twice")));
                }
            }
            input.set_bracket(a, b, value).map_err(at(format!("bracket [{a}, {b}]")))?;
        }
        for PairValue { pair: [a, g], value } in &raw.action {
            input.set_action(a, g, value).map_err(at(format!("action {a} on {g}")))?;
        }
        for OfValue { of, value } in &raw.boundary {
            input.set_boundary(of, value).map_err(at(format!("boundary of {of}")))?;
        }
        // validate now so errors name the offending entry at load time
        shlie_core::gauge::build_strict_lie(&input).map_err(at("strict Lie data".into()))?;
        Ok(Structure::StrictLie(StrictLieFile { name: raw.name, input }))
    }

    fn parse_gauge(raw: RawGauge) -> Result<Self, CliError> {
        let xi = GradedBasis::uniform(raw.xi, 0).map_err(at("xi basis".into()))?;
        let phi = GradedBasis::uniform(raw.phi, 0).map_err(at("phi basis".into()))?;
        if phi.is_empty() && (raw.delta.iter().any(|d| d.value.trim() != "0")) {
            return Err(CliError::Invalid("δ values given over an empty Φ basis".into()));
        }
        let jet = raw.jet.map(|j| JetSpec { fields: j.fields, derivations: j.derivations, max_order: j.max_order });
        let vars: Universe = match &jet {
            Some(spec) => JetSpace::new(spec.clone()).map_err(at("jet".into()))?.universe().clone(),
            None => universe(Vec::<String>::new()),
        };
        let shell = match raw.shell {
            Some(s) if jet.is_none() && !s.generators.is_empty() => {
                return Err(CliError::Invalid("a shell needs a [jet] table".into()))
            }
            Some(s) => s
                .generators
                .iter()
                .map(|g| Poly::parse_in(&vars, g).map_err(at(format!("shell generator {g:?}"))))
                .collect::<Result<Vec<_>, _>>()?,
            None => vec![],
        };
        let mut data = GaugeData::new(&xi, &phi).map_err(at("gauge bases".into()))?;
        let mut delta: BTreeMap<u32, HomMap<QPoly>> = BTreeMap::new();
        for RawDelta { of, word, value } in &raw.delta {
            let what = format!("δ({of}) on {word}");
            let i = xi.require(of).map_err(at(what.clone()))?;
            let v: Vector<QPoly> = parse_vector(&phi, value).map_err(at(what.clone()))?;
            let v = coeffs_in(v, &vars, &what)?;
            let h = delta.entry(i).or_insert_with(|| HomMap::new(&phi, &phi, 0));
            let Some((w, sign)) = phi.parse_word(word).map_err(at(what.clone()))? else { continue };
            if h.get(&w).is_some() {
                return Err(CliError::Invalid(format!("{what} given twice")));
            }
            h.add_value(w, &if sign < 0 { v.neg() } else { v }).map_err(at(what))?;
        }
        for (i, h) in delta {
            data.set_delta(i, h).map_err(at(format!("δ({})", xi.name(i))))?;
        }
        let mut corr: BTreeMap<(u32, u32), HomMap<QPoly>> = BTreeMap::new();
        for RawCorrection { pair: [a, b], word, value } in &raw.correction {
            let what = format!("C({a}, {b}) on {word}");
            let (i, j) = (xi.require(a).map_err(at(what.clone()))?, xi.require(b).map_err(at(what.clone()))?);
            let v: Vector<QPoly> = parse_vector(&xi, value).map_err(at(what.clone()))?;
            let v = coeffs_in(v, &vars, &what)?;
            let Some((w, sign)) = phi.parse_word(word).map_err(at(what.clone()))? else { continue };
            let h = corr.entry((i, j)).or_insert_with(|| HomMap::new(&phi, &xi, 0));
            h.add_value(w, &if sign < 0 { v.neg() } else { v }).map_err(at(what))?;
        }
        for (&(i, j), h) in &corr {
            let (a, b) = (xi.name(i), xi.name(j));
            if i == j && !h.is_zero() {
                return Err(CliError::Invalid(format!("C({a}, {a}) must vanish")));
            }
            if i > j {
                if let Some(other) = corr.get(&(j, i)) {
                    if other.plus(h).map_err(at(format!("C({b}, {a})")))?.is_zero() {
                        continue;
                    }
                    return Err(CliError::Invalid(format!("C({b}, {a}) ≠ −C({a}, {b})")));
                }
            }
            data.set_correction(i, j, h.clone()).map_err(at(format!("C({a}, {b})")))?;
        }
        Ok(Structure::Gauge(GaugeFile { name: raw.name, data, jet, shell }))
    }

    fn parse_nonlinear(raw: RawNonlinear) -> Result<Self, CliError> {
        let entries: Vec<(String, String, String)> =
            raw.w.into_iter().map(|PairValue { pair: [a, b], value }| (a, b, value)).collect();
        let alg = NonlinearLieAlgebra::new(&raw.generators, &entries).map_err(at("W table".into()))?;
        Ok(Structure::NonlinearLie(NonlinearFile { name: raw.name, alg }))
    }

    /// Canonical TOML text.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "kind = {}", quote(self.kind()));
        let _ = writeln!(out, "name = {}", quote(self.name()));
        match self {
            Structure::StrictLie(s) => write_strict(&mut out, &s.input),
            Structure::Gauge(g) => write_gauge(&mut out, g),
            Structure::NonlinearLie(n) => write_nonlinear(&mut out, &n.alg),
        }
        out
    }
}

impl PartialEq for Structure {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Structure::StrictLie(a), Structure::StrictLie(b)) => {
                a.name == b.name
                    && a.input.xi == b.input.xi
                    && a.input.phi == b.input.phi
                    && a.input.bracket == b.input.bracket
                    && a.input.action == b.input.action
                    && a.input.boundary == b.input.boundary
            }
            (Structure::Gauge(a), Structure::Gauge(b)) => {
                let (da, db) = (&a.data, &b.data);
                let n = da.xi().len() as u32;
                a.name == b.name
                    && a.jet == b.jet
                    && a.shell == b.shell
                    && da.xi() == db.xi()
                    && da.phi() == db.phi()
                    && (0..n).all(|i| da.delta(i) == db.delta(i))
                    && (0..n).all(|i| (0..n).all(|j| da.correction(i, j) == db.correction(i, j)))
            }
            (Structure::NonlinearLie(a), Structure::NonlinearLie(b)) => a == b,
            _ => false,
        }
    }
}

fn quote(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn list(items: impl IntoIterator<Item = String>) -> String {
    let v: Vec<String> = items.into_iter().map(|s| quote(&s)).collect();
    format!("[{}]", v.join(", "))
}

fn names(b: &Arc<GradedBasis>) -> String {
    list(b.generators().iter().map(|g| g.name.clone()))
}

fn write_strict(out: &mut String, s: &StrictLieInput<Q>) {
    let _ = writeln!(out, "xi = {}", names(&s.xi));
    let _ = writeln!(out, "phi = {}", names(&s.phi));
    for (&(i, j), v) in &s.bracket {
        let _ = write!(out, "\n[[bracket]]\npair = {}\n", list([s.xi.name(i).into(), s.xi.name(j).into()]));
        let _ = writeln!(out, "value = {}", quote(&render_vector(&s.xi, v)));
    }
    for (&(i, g), v) in &s.action {
        let _ = write!(out, "\n[[action]]\npair = {}\n", list([s.xi.name(i).into(), s.phi.name(g).into()]));
        let _ = writeln!(out, "value = {}", quote(&render_vector(&s.phi, v)));
    }
    for (&i, v) in &s.boundary {
        let _ = write!(out, "\n[[boundary]]\nof = {}\n", quote(s.xi.name(i)));
        let _ = writeln!(out, "value = {}", quote(&render_vector(&s.phi, v)));
    }
}

fn write_gauge(out: &mut String, g: &GaugeFile) {
    let (xi, phi) = (g.data.xi(), g.data.phi());
    let _ = writeln!(out, "xi = {}", names(xi));
    let _ = writeln!(out, "phi = {}", names(phi));
    if let Some(j) = &g.jet {
        let _ = write!(out, "\n[jet]\nfields = {}\n", list(j.fields.iter().cloned()));
        let _ = writeln!(out, "derivations = {}", list(j.derivations.iter().cloned()));
        let _ = writeln!(out, "max_order = {}", j.max_order);
    }
    if !g.shell.is_empty() {
        let _ = write!(out, "\n[shell]\ngenerators = {}\n", list(g.shell.iter().map(|p| p.render())));
    }
    let n = xi.len() as u32;
    for i in 0..n {
        for (w, v) in g.data.delta(i).values() {
            let _ = write!(out, "\n[[delta]]\nof = {}\nword = {}\n", quote(xi.name(i)), quote(&phi.render_word(w)));
            let _ = writeln!(out, "value = {}", quote(&render_vector(phi, v)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for (w, v) in g.data.correction(i, j).values() {
                let pair = list([xi.name(i).into(), xi.name(j).into()]);
                let _ = write!(out, "\n[[correction]]\npair = {pair}\nword = {}\n", quote(&phi.render_word(w)));
                let _ = writeln!(out, "value = {}", quote(&render_vector(xi, v)));
            }
        }
    }
}

fn write_nonlinear(out: &mut String, alg: &NonlinearLieAlgebra) {
    let _ = writeln!(out, "generators = {}", list(alg.names().iter().cloned()));
    let d = alg.dim();
    for a in 0..d {
        for b in a + 1..d {
            let w = alg.w(a, b);
            if w.is_empty() {
                continue;
            }
            let pair = list([alg.names()[a].clone(), alg.names()[b].clone()]);
            let _ = write!(out, "\n[[w]]\npair = {pair}\nvalue = {}\n", quote(&w.render()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetry_violation_names_pair() {
        let text = r#"
kind = "strict-lie"
name = "bad"
xi = ["a", "b"]
phi = []

[[bracket]]
pair = ["a", "b"]
value = "b"

[[bracket]]
pair = ["b", "a"]
value = "b"
"#;
        let err = Structure::parse(text).unwrap_err().to_string();
        assert!(err.contains("a") && err.contains("b") && err.contains("antisymmetric"), "{err}");
    }

    #[test]
    fn correction_antisymmetry_checked() {
        let text = r#"
kind = "gauge"
name = "bad"
xi = ["a", "b"]
phi = ["f"]

[[correction]]
pair = ["a", "b"]
word = "1"
value = "a"

[[correction]]
pair = ["b", "a"]
word = "1"
value = "a"
"#;
        let err = Structure::parse(text).unwrap_err().to_string();
        assert!(err.contains("C(a, b)"), "{err}");
    }

    #[test]
    fn empty_phi_with_delta_rejected() {
        let text = r#"
kind = "gauge"
name = "bad"
xi = ["a"]
phi = []

[[delta]]
of = "a"
word = "1"
value = "f"
"#;
        assert!(Structure::parse(text).is_err());
    }

    #[test]
    fn toml_errors_carry_position() {
        let err = Structure::parse("kind = \"gauge\"\nname = ").unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = "kind = \"nonlinear-lie\"\nname = \"x\"\ngenerators = [\"T1\"]\ncolour = 3\n";
        assert!(Structure::parse(text).is_err());
    }

    #[test]
    fn jet_coefficients_round_trip() {
        let text = r#"kind = "gauge"
name = "jet_toy"
xi = ["a", "b"]
phi = ["f"]

[jet]
fields = ["u"]
derivations = ["x"]
max_order = 2

[shell]
generators = ["u^2 + u[u;x]"]

[[delta]]
of = "a"
word = "f"
value = "(u * u[u;x]) * f"

[[correction]]
pair = ["a", "b"]
word = "1"
value = "(u + 1) * a"
"#;
        let s = Structure::parse(text).unwrap();
        assert_eq!(s.to_toml(), text);
        assert_eq!(Structure::parse(&s.to_toml()).unwrap(), s);
    }
}
