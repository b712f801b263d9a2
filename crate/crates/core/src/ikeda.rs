//! Nonlinear Lie algebras [T_A, T_B] = W_AB(T) and the two-dimensional
//! gauge theory built from them: gauge variations, their commutators,
//! covariant derivative, curvature, Lagrangian and field equations.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::{EvolutionaryField, JetSpace, JetSpec};
use crate::poly::{universe, Poly, Universe};
use crate::scalar::q_frac;
use crate::shell::{GaugeSystem, OnShellContext};
use crate::QPoly;

/// Generators T_A and the antisymmetric table W_AB of polynomials in them.
#[derive(Clone, Debug, PartialEq)]
pub struct NonlinearLieAlgebra {
    names: Vec<String>,
    vars: Universe,
    w: Vec<Vec<QPoly>>,
}

impl NonlinearLieAlgebra {
    /// Table from entries (A, B, W_AB) with A < B in `names` order; the rest
    /// is filled by antisymmetry. Entries with A ≥ B are rejected.
    pub fn new<S: AsRef<str>>(names: &[S], entries: &[(S, S, S)]) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let vars = universe(names.iter().cloned());
        if vars.len() != names.len() {
            return Err(Error::DuplicateGenerator("repeated generator in nonlinear Lie algebra".into()));
        }
        let d = names.len();
        let mut w = vec![vec![Poly::zero_in(&vars); d]; d];
        let pos = |s: &str| names.iter().position(|n| n == s).ok_or_else(|| Error::UnknownGenerator(s.to_string()));
        for (a, b, p) in entries {
            let (i, j) = (pos(a.as_ref())?, pos(b.as_ref())?);
            if i >= j {
                return Err(Error::Structure(format!(
                    "W entry ({}, {}) must have its first index first",
                    a.as_ref(),
                    b.as_ref()
                )));
            }
            let p = Poly::parse_in(&vars, p.as_ref())?;
            w[j][i] = -p.clone();
            w[i][j] = p;
        }
        Ok(NonlinearLieAlgebra { names, vars, w })
    }

    /// A full table, checked for antisymmetry by [`check_w_axioms`].
    pub fn from_table(names: Vec<String>, table: Vec<Vec<QPoly>>) -> Result<Self> {
        let vars = universe(names.iter().cloned());
        let d = names.len();
        if table.len() != d || table.iter().any(|r| r.len() != d) {
            return Err(Error::Structure(format!("W must be {d}×{d}")));
        }
        let w = table
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|p| if p.is_empty() { Ok(Poly::zero_in(&vars)) } else { p.in_universe(&vars) })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(NonlinearLieAlgebra { names, vars, w })
    }

    /// W_AB = ε_ABC T_C.
    pub fn so3() -> Self {
        Self::new(&["T1", "T2", "T3"], &[("T1", "T2", "T3"), ("T1", "T3", "-T2"), ("T2", "T3", "T1")]).expect("so(3)")
    }

    /// d = 2 with W_12 = T1 T2.
    pub fn quadratic_plane() -> Self {
        Self::new(&["T1", "T2"], &[("T1", "T2", "T1 * T2")]).expect("plane")
    }

    /// W_AB = ε_ABC (T_C + T_C²).
    pub fn nonlinear_so3() -> Self {
        Self::new(
            &["T1", "T2", "T3"],
            &[("T1", "T2", "T3 + T3^2"), ("T1", "T3", "-T2 - T2^2"), ("T2", "T3", "T1 + T1^2")],
        )
        .expect("nonlinear so(3)")
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn universe(&self) -> &Universe {
        &self.vars
    }

    pub fn w(&self, a: usize, b: usize) -> &QPoly {
        &self.w[a][b]
    }

    /// Index into `names` of the universe variable for T_A.
    fn var_of(&self, a: usize) -> usize {
        crate::poly::index_of(&self.vars, &self.names[a]).expect("own generator")
    }

    pub fn partial(&self, p: &QPoly, a: usize) -> QPoly {
        p.partial_idx(self.var_of(a))
    }

    /// Σ_D W_AD ∂W_BC/∂T_D + cyclic.
    pub fn jacobiator(&self, a: usize, b: usize, c: usize) -> QPoly {
        let mut out = Poly::zero_in(&self.vars);
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            for d in 0..self.dim() {
                out = &out + &(&self.w[x][d] * &self.partial(&self.w[y][z], d));
            }
        }
        out
    }

    pub fn is_linear(&self) -> bool {
        self.w.iter().flatten().all(|p| p.degree().is_none_or(|d| d <= 1))
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct WAxiomReport {
    /// Pairs (A, B) with W_AB ≠ −W_BA.
    pub antisymmetry_failures: Vec<(String, String)>,
    /// Triples with a nonvanishing Jacobiator, with its value.
    pub jacobi_failures: Vec<(String, String, String, String)>,
    pub triples_checked: usize,
}

impl WAxiomReport {
    pub fn passed(&self) -> bool {
        self.antisymmetry_failures.is_empty() && self.jacobi_failures.is_empty()
    }
}

pub fn check_w_axioms(alg: &NonlinearLieAlgebra) -> WAxiomReport {
    let d = alg.dim();
    let n = |i: usize| alg.names[i].clone();
    let mut antisymmetry_failures = Vec::new();
    for a in 0..d {
        for b in a..d {
            if alg.w[a][b] != -alg.w[b][a].clone() {
                antisymmetry_failures.push((n(a), n(b)));
            }
        }
    }
    let mut jacobi_failures = Vec::new();
    let mut triples_checked = 0;
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                triples_checked += 1;
                let j = alg.jacobiator(a, b, c);
                if !j.is_empty() {
                    jacobi_failures.push((n(a), n(b), n(c), j.render()));
                }
            }
        }
    }
    WAxiomReport { antisymmetry_failures, jacobi_failures, triples_checked }
}

/// {f, g} = W_AB ∂f/∂T_A ∂g/∂T_B.
pub fn poisson_bracket(f: &QPoly, g: &QPoly, alg: &NonlinearLieAlgebra) -> Result<QPoly> {
    let f = if f.is_empty() { Poly::zero_in(&alg.vars) } else { f.in_universe(&alg.vars)? };
    let g = if g.is_empty() { Poly::zero_in(&alg.vars) } else { g.in_universe(&alg.vars)? };
    let mut out = Poly::zero_in(&alg.vars);
    for a in 0..alg.dim() {
        let fa = alg.partial(&f, a);
        if fa.is_empty() {
            continue;
        }
        for b in 0..alg.dim() {
            let gb = alg.partial(&g, b);
            if !gb.is_empty() && !alg.w[a][b].is_empty() {
                out = &out + &(&(&alg.w[a][b] * &fa) * &gb);
            }
        }
    }
    Ok(out)
}

/// Fields ψ_A, h^A_μ and gauge parameter fields c_A over the base x0, x1.
#[derive(Debug)]
pub struct SigmaFields {
    dim: usize,
    space: Arc<JetSpace>,
}

pub const BASE: [&str; 2] = ["x0", "x1"];

/// ε^{μν} with ε^{01} = 1.
pub fn epsilon(mu: usize, nu: usize) -> i64 {
    match (mu, nu) {
        (0, 1) => 1,
        (1, 0) => -1,
        _ => 0,
    }
}

impl SigmaFields {
    pub fn new(dim: usize, max_order: usize) -> Result<Self> {
        let mut fields = Vec::new();
        for a in 1..=dim {
            fields.push(format!("psi{a}"));
            fields.push(format!("h{a}_0"));
            fields.push(format!("h{a}_1"));
            fields.push(format!("c{a}"));
        }
        let spec = JetSpec { fields, derivations: BASE.iter().map(|s| s.to_string()).collect(), max_order };
        Ok(SigmaFields { dim, space: JetSpace::new(spec)? })
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn psi_name(a: usize) -> String {
        format!("psi{}", a + 1)
    }

    pub fn h_name(a: usize, mu: usize) -> String {
        format!("h{}_{mu}", a + 1)
    }

    pub fn c_name(a: usize) -> String {
        format!("c{}", a + 1)
    }

    pub fn psi(&self, a: usize) -> QPoly {
        self.space.var(&Self::psi_name(a), &[]).expect("declared")
    }

    pub fn h(&self, a: usize, mu: usize) -> QPoly {
        self.space.var(&Self::h_name(a, mu), &[]).expect("declared")
    }

    pub fn c(&self, a: usize) -> QPoly {
        self.space.var(&Self::c_name(a), &[]).expect("declared")
    }

    pub fn d(&self, p: &QPoly, mu: usize) -> Result<QPoly> {
        self.space.total_derivative(p, mu as u32)
    }

    /// The physical fields ψ_A and h^A_μ, leaving out the parameters.
    pub fn physical_fields(&self) -> Vec<String> {
        (0..self.dim).flat_map(|a| [Self::psi_name(a), Self::h_name(a, 0), Self::h_name(a, 1)]).collect()
    }
}

/// Gauge parameter components c^A.
pub type Param = Vec<QPoly>;

/// An algebra together with fields and W, ∂W, ∂²W evaluated at ψ.
#[derive(Debug)]
pub struct IkedaModel {
    alg: NonlinearLieAlgebra,
    fields: SigmaFields,
    w: Vec<Vec<QPoly>>,
    dw: Vec<Vec<Vec<QPoly>>>,
    ddw: Vec<Vec<Vec<Vec<QPoly>>>>,
}

impl IkedaModel {
    pub fn new(alg: NonlinearLieAlgebra, max_order: usize) -> Result<Self> {
        let report = check_w_axioms(&alg);
        if !report.passed() {
            return Err(Error::Structure(format!(
                "W fails its axioms: {} antisymmetry and {} Jacobi failures",
                report.antisymmetry_failures.len(),
                report.jacobi_failures.len()
            )));
        }
        let fields = SigmaFields::new(alg.dim(), max_order.max(2))?;
        let d = alg.dim();
        let at_psi: HashMap<String, QPoly> = (0..d).map(|a| (alg.names[a].clone(), fields.psi(a))).collect();
        let eval = |p: &QPoly| -> Result<QPoly> {
            if p.is_empty() {
                return Ok(Poly::zero_in(fields.space.universe()));
            }
            fields.space.embed(&p.substitute(&at_psi)?)
        };
        let mut w = vec![vec![]; d];
        let mut dw = vec![vec![vec![]; d]; d];
        let mut ddw = vec![vec![vec![vec![]; d]; d]; d];
        for a in 0..d {
            for b in 0..d {
                let wab = alg.w(a, b);
                w[a].push(eval(wab)?);
                for c in 0..d {
                    let dc = alg.partial(wab, c);
                    dw[a][b].push(eval(&dc)?);
                    for e in 0..d {
                        ddw[a][b][c].push(eval(&alg.partial(&dc, e))?);
                    }
                }
            }
        }
        Ok(IkedaModel { alg, fields, w, dw, ddw })
    }

    pub fn algebra(&self) -> &NonlinearLieAlgebra {
        &self.alg
    }

    pub fn fields(&self) -> &SigmaFields {
        &self.fields
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.fields.space
    }

    fn zero(&self) -> QPoly {
        Poly::zero_in(self.space().universe())
    }

    /// W_AB(ψ).
    pub fn w_at_psi(&self, a: usize, b: usize) -> &QPoly {
        &self.w[a][b]
    }

    /// ∂W_AB/∂T_C at ψ.
    pub fn dw_at_psi(&self, a: usize, b: usize, c: usize) -> &QPoly {
        &self.dw[a][b][c]
    }

    pub fn unit_param(&self, a: usize) -> Param {
        (0..self.alg.dim())
            .map(|b| if a == b { Poly::constant_in(self.space().universe(), crate::scalar::q(1)) } else { self.zero() })
            .collect()
    }

    /// c^A = c_A, arbitrary functions on the base.
    pub fn field_param(&self) -> Param {
        (0..self.alg.dim()).map(|a| self.fields.c(a)).collect()
    }

    fn check_param(&self, c: &Param) -> Result<Param> {
        if c.len() != self.alg.dim() {
            return Err(Error::DegreeMismatch(format!("parameter needs {} components", self.alg.dim())));
        }
        c.iter().map(|p| if p.is_empty() { Ok(self.zero()) } else { self.space().embed(p) }).collect()
    }

    /// δ(c): ψ_A ↦ W_BA(ψ) c^B and h^A_μ ↦ ∂_μ c^A + ∂_A W_BD(ψ) h^B_μ c^D.
    pub fn gauge_delta(&self, c: &Param) -> Result<EvolutionaryField> {
        let c = self.check_param(c)?;
        let d = self.alg.dim();
        let mut v = EvolutionaryField::new(self.space());
        for a in 0..d {
            let mut qpsi = self.zero();
            for b in 0..d {
                qpsi = &qpsi + &(&self.w[b][a] * &c[b]);
            }
            v = v.with(&SigmaFields::psi_name(a), qpsi)?;
            for mu in 0..2 {
                let mut qh = self.fields.d(&c[a], mu)?;
                for b in 0..d {
                    for e in 0..d {
                        let coef = &self.dw[b][e][a];
                        if !coef.is_empty() && !c[e].is_empty() {
                            qh = &qh + &(&(coef * &self.fields.h(b, mu)) * &c[e]);
                        }
                    }
                }
                v = v.with(&SigmaFields::h_name(a, mu), qh)?;
            }
        }
        Ok(v)
    }

    /// c₃^A = ∂_A W_BD(ψ) c₁^B c₂^D.
    pub fn c3(&self, c1: &Param, c2: &Param) -> Result<Param> {
        let (c1, c2) = (self.check_param(c1)?, self.check_param(c2)?);
        let d = self.alg.dim();
        Ok((0..d)
            .map(|a| {
                let mut acc = self.zero();
                for b in 0..d {
                    for e in 0..d {
                        if !c1[b].is_empty() && !c2[e].is_empty() {
                            acc = &acc + &(&(&self.dw[b][e][a] * &c1[b]) * &c2[e]);
                        }
                    }
                }
                acc
            })
            .collect())
    }

    /// D_μψ_A = ∂_μψ_A + W_AB(ψ) h^B_μ.
    pub fn covariant_derivative(&self, a: usize, mu: usize) -> Result<QPoly> {
        let mut out = self.fields.d(&self.fields.psi(a), mu)?;
        for b in 0..self.alg.dim() {
            out = &out + &(&self.w[a][b] * &self.fields.h(b, mu));
        }
        Ok(out)
    }

    /// R^A_{μν} = ∂_μh^A_ν − ∂_νh^A_μ + ∂_A W_BC(ψ) h^B_μ h^C_ν.
    pub fn curvature(&self, a: usize, mu: usize, nu: usize) -> Result<QPoly> {
        let f = &self.fields;
        let mut out = &f.d(&f.h(a, nu), mu)? - &f.d(&f.h(a, mu), nu)?;
        for b in 0..self.alg.dim() {
            for c in 0..self.alg.dim() {
                out = &out + &(&(&self.dw[b][c][a] * &f.h(b, mu)) * &f.h(c, nu));
            }
        }
        Ok(out)
    }

    /// ε^{μν}(h^A_μ D_νψ_A − ½ W_AB(ψ) h^A_μ h^B_ν).
    pub fn lagrangian(&self) -> Result<QPoly> {
        let f = &self.fields;
        let half = q_frac(1, 2);
        let mut out = self.zero();
        for (mu, nu) in [(0, 1), (1, 0)] {
            let eps = crate::scalar::q(epsilon(mu, nu));
            for a in 0..self.alg.dim() {
                out = &out + &(&f.h(a, mu) * &self.covariant_derivative(a, nu)?).scale(&eps);
                for b in 0..self.alg.dim() {
                    let t = &(&self.w[a][b] * &f.h(a, mu)) * &f.h(b, nu);
                    out = &out - &t.scale(&(eps.clone() * half.clone()));
                }
            }
        }
        Ok(out)
    }

    /// Euler-Lagrange polynomials, labelled by the field varied.
    pub fn field_equations(&self) -> Result<Vec<(String, QPoly)>> {
        let l = self.lagrangian()?;
        self.fields
            .physical_fields()
            .into_iter()
            .map(|name| {
                let idx = self.space().field_index(&name)?;
                Ok((format!("E[{name}]"), self.space().euler_operator(&l, idx)?))
            })
            .collect()
    }

    /// D_μψ_A and R^A_01, the expected generators of the shell.
    pub fn shell_relations(&self) -> Result<Vec<(String, QPoly)>> {
        let mut out = Vec::new();
        for a in 0..self.alg.dim() {
            for mu in 0..2 {
                out.push((format!("D{mu}psi{}", a + 1), self.covariant_derivative(a, mu)?));
            }
            out.push((format!("R{}_01", a + 1), self.curvature(a, 0, 1)?));
        }
        Ok(out)
    }

    pub fn shell_context(&self, degree_cap: u32, order_cap: usize) -> Result<OnShellContext> {
        let (labels, gens): (Vec<_>, Vec<_>) =
            self.field_equations()?.into_iter().filter(|(_, p)| !p.is_empty()).unzip();
        OnShellContext::labelled(self.space(), gens, labels, degree_cap, order_cap)
    }

    /// [δ(c₁), δ(c₂)] for field-independent c₁, c₂, split as δ(c₃) + extra
    /// with the extra term checked against its closed form.
    pub fn gauge_commutator(&self, c1: &Param, c2: &Param) -> Result<GaugeCommutator> {
        let (c1, c2) = (self.check_param(c1)?, self.check_param(c2)?);
        if c1.iter().chain(c2.iter()).any(|p| !p.is_constant() && !p.is_empty()) {
            return Err(Error::Invariant("commutators are formed for field-independent parameters".into()));
        }
        let v1 = self.gauge_delta(&c1)?;
        let v2 = self.gauge_delta(&c2)?;
        let bracket = v1.commutator(&v2)?;
        let c3 = self.c3(&c1, &c2)?;
        let extra = bracket.minus(&self.gauge_delta(&c3)?)?;
        let expected = self.expected_extra(&c1, &c2)?;
        let diff = extra.minus(&expected)?;
        if !diff.is_zero() {
            let shown: Vec<String> = diff.components().map(|(f, q)| format!("{f}: {}", q.render())).collect();
            return Err(Error::Decomposition(shown.join("; ")));
        }
        Ok(GaugeCommutator { c3, extra })
    }

    /// h^A_μ ↦ −∂_A∂_B W_CD(ψ) (D_μψ_B) c₁^C c₂^D, nothing on ψ.
    pub fn expected_extra(&self, c1: &Param, c2: &Param) -> Result<EvolutionaryField> {
        let d = self.alg.dim();
        let mut v = EvolutionaryField::new(self.space());
        for a in 0..d {
            for mu in 0..2 {
                let mut acc = self.zero();
                for b in 0..d {
                    let dpsi = self.covariant_derivative(b, mu)?;
                    for c in 0..d {
                        for e in 0..d {
                            let k = &self.ddw[c][e][a][b];
                            if k.is_empty() || c1[c].is_empty() || c2[e].is_empty() {
                                continue;
                            }
                            acc = &acc - &(&(&(k * &dpsi) * &c1[c]) * &c2[e]);
                        }
                    }
                }
                v = v.with(&SigmaFields::h_name(a, mu), acc)?;
            }
        }
        Ok(v)
    }

    /// [π₁, π₂]^A = δ(π₁)(π₂^A) − δ(π₂)(π₁^A) + ∂_A W_BD(ψ) π₁^B π₂^D.
    pub fn param_bracket(&self, p1: &Param, p2: &Param) -> Result<Param> {
        let (p1, p2) = (self.check_param(p1)?, self.check_param(p2)?);
        let v1 = self.gauge_delta(&p1)?;
        let v2 = self.gauge_delta(&p2)?;
        let c3 = self.c3(&p1, &p2)?;
        (0..self.alg.dim()).map(|a| Ok(&(&v1.apply(&p2[a])? - &v2.apply(&p1[a])?) + &c3[a])).collect()
    }

    pub fn jacobi(&self, p1: &Param, p2: &Param, p3: &Param) -> Result<Param> {
        let t1 = self.param_bracket(&self.param_bracket(p1, p2)?, p3)?;
        let t2 = self.param_bracket(&self.param_bracket(p2, p3)?, p1)?;
        let t3 = self.param_bracket(&self.param_bracket(p3, p1)?, p2)?;
        Ok((0..self.alg.dim()).map(|a| &(&t1[a] + &t2[a]) + &t3[a]).collect())
    }
}

#[derive(Clone, Debug)]
pub struct GaugeCommutator {
    pub c3: Param,
    pub extra: EvolutionaryField,
}

impl GaugeSystem for IkedaModel {
    fn generator_names(&self) -> Vec<String> {
        self.alg.names.iter().map(|n| format!("xi_{n}")).collect()
    }

    fn closure_residual(&self, i: usize, j: usize) -> Result<Vec<(String, QPoly)>> {
        let com = self.gauge_commutator(&self.unit_param(i), &self.unit_param(j))?;
        Ok(com.extra.components().map(|(f, q)| (format!("{f} ->"), q.clone())).collect())
    }

    fn jacobi_residual(&self, i: usize, j: usize, k: usize) -> Result<Vec<(String, QPoly)>> {
        let r = self.jacobi(&self.unit_param(i), &self.unit_param(j), &self.unit_param(k))?;
        Ok(r.into_iter()
            .enumerate()
            .filter(|(_, p)| !p.is_empty())
            .map(|(a, p)| (format!("component {}", self.alg.names[a]), p))
            .collect())
    }
}

/// The model as a gauge system plus the shell cut out by its field equations.
pub fn build_ikeda_gauge_data(
    alg: NonlinearLieAlgebra,
    degree_cap: u32,
    order_cap: usize,
) -> Result<(IkedaModel, OnShellContext)> {
    let model = IkedaModel::new(alg, order_cap + 1)?;
    let ctx = model.shell_context(degree_cap, order_cap)?;
    Ok((model, ctx))
}

/// Both inclusions between the ideal of the field equations and the ideal
/// of {D_μψ_A, R^A_01}, each generator tested at the caps.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ShellEquivalence {
    pub equations_in_relations: Vec<(String, String)>,
    pub relations_in_equations: Vec<(String, String)>,
}

impl ShellEquivalence {
    pub fn passed(&self) -> bool {
        self.equations_in_relations.iter().chain(&self.relations_in_equations).all(|(_, v)| v == "member")
    }
}

fn verdict_text(m: Result<crate::shell::Membership>) -> String {
    use crate::shell::Membership;
    match m {
        Ok(Membership::Member(_)) => "member".into(),
        Ok(Membership::NotMember) => "not member".into(),
        Ok(Membership::Undecided(r)) => format!("undecided: {r}"),
        Err(e) => format!("undecided: {e}"),
    }
}

pub fn shell_equivalence(model: &IkedaModel, degree_cap: u32, order_cap: usize) -> Result<ShellEquivalence> {
    let eqs: Vec<_> = model.field_equations()?.into_iter().filter(|(_, p)| !p.is_empty()).collect();
    let rels = model.shell_relations()?;
    let ctx_of = |v: &[(String, QPoly)]| {
        let (l, g): (Vec<_>, Vec<_>) = v.iter().cloned().unzip();
        OnShellContext::labelled(model.space(), g, l, degree_cap, order_cap)
    };
    let (eq_ctx, rel_ctx) = (ctx_of(&eqs)?, ctx_of(&rels)?);
    Ok(ShellEquivalence {
        equations_in_relations: eqs.iter().map(|(l, p)| (l.clone(), verdict_text(rel_ctx.membership(p)))).collect(),
        relations_in_equations: rels.iter().map(|(l, p)| (l.clone(), verdict_text(eq_ctx.membership(p)))).collect(),
    })
}

/// For linear W_AB = f^C_AB T_C, compare {a·T, b·T} with a^A b^B f^C_AB T_C
/// on generator pairs and on a few mixed linear forms.
pub fn kirillov_kostant_mismatches(alg: &NonlinearLieAlgebra) -> Result<Vec<String>> {
    if !alg.is_linear() {
        return Err(Error::Structure("the Kirillov-Kostant comparison needs linear W".into()));
    }
    let d = alg.dim();
    let t = |c: usize| Poly::var_in(&alg.vars, alg.var_of(c));
    let f = |a: usize, b: usize, c: usize| alg.w[a][b].coeff(&crate::poly::Mono::var(alg.var_of(c) as u32));
    let mut forms: Vec<Vec<i64>> = (0..d).map(|a| (0..d).map(|b| (a == b) as i64).collect()).collect();
    forms.push((0..d).map(|i| i as i64 + 1).collect());
    forms.push((0..d).map(|i| if i % 2 == 0 { -1 } else { 2 }).collect());
    let lin = |v: &[i64]| {
        let mut p = Poly::zero_in(&alg.vars);
        for (c, &x) in v.iter().enumerate() {
            p = &p + &t(c).scale(&crate::scalar::q(x));
        }
        p
    };
    let mut out = Vec::new();
    for (i, a) in forms.iter().enumerate() {
        for b in &forms[i + 1..] {
            let got = poisson_bracket(&lin(a), &lin(b), alg)?;
            let mut want = Poly::zero_in(&alg.vars);
            for x in 0..d {
                for y in 0..d {
                    for c in 0..d {
                        let k = f(x, y, c) * crate::scalar::q(a[x] * b[y]);
                        want = &want + &t(c).scale(&k);
                    }
                }
            }
            if got != want {
                out.push(format!("{{{}, {}}} = {} but structure constants give {}", lin(a), lin(b), got, want));
            }
        }
    }
    Ok(out)
}

/// Distinct triples of monomials of degree 1..=max_degree whose Poisson
/// Jacobiator does not vanish.
pub fn poisson_jacobi_failures(alg: &NonlinearLieAlgebra, max_degree: u32) -> Result<(usize, Vec<String>)> {
    let d = alg.dim();
    let mut monos: Vec<QPoly> = vec![Poly::constant_in(&alg.vars, crate::scalar::q(1))];
    let mut layer = monos.clone();
    for _ in 0..max_degree {
        let mut next: Vec<QPoly> = Vec::new();
        for m in &layer {
            for a in 0..d {
                let p = m * &Poly::var_in(&alg.vars, alg.var_of(a));
                if !next.contains(&p) {
                    next.push(p);
                }
            }
        }
        monos.extend(next.iter().cloned());
        layer = next;
    }
    monos.remove(0);
    let br = |f: &QPoly, g: &QPoly| poisson_bracket(f, g, alg);
    let mut checked = 0;
    let mut out = Vec::new();
    for i in 0..monos.len() {
        for j in i + 1..monos.len() {
            for k in j + 1..monos.len() {
                let (f, g, h) = (&monos[i], &monos[j], &monos[k]);
                let jac = &(&br(f, &br(g, h)?)? + &br(g, &br(h, f)?)?) + &br(h, &br(f, g)?)?;
                checked += 1;
                if !jac.is_empty() {
                    out.push(format!("({f}, {g}, {h}) -> {jac}"));
                }
            }
        }
    }
    Ok((checked, out))
}

/// Euler images of δ(c)(ℒ) for parameters c^A = c_A depending on the base.
pub fn variation_divergence(model: &IkedaModel) -> Result<crate::jet::DivergenceReport> {
    let dl = model.gauge_delta(&model.field_param())?.apply(&model.lagrangian()?)?;
    model.space().is_total_divergence(&dl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shell::{check_bbvd_system, check_gbbvd_system, check_jacobi_system, Status};

    fn p(alg: &NonlinearLieAlgebra, s: &str) -> QPoly {
        Poly::parse_in(alg.universe(), s).unwrap()
    }

    #[test]
    fn w_axioms_examples() {
        assert!(check_w_axioms(&NonlinearLieAlgebra::new::<&str>(&["T1", "T2"], &[]).unwrap()).passed());
        assert!(check_w_axioms(&NonlinearLieAlgebra::so3()).passed());
        assert!(check_w_axioms(&NonlinearLieAlgebra::quadratic_plane()).passed());
        assert!(check_w_axioms(&NonlinearLieAlgebra::nonlinear_so3()).passed());
        let bad = NonlinearLieAlgebra::new(
            &["T1", "T2", "T3"],
            &[("T1", "T2", "T3"), ("T1", "T3", "T1"), ("T2", "T3", "T1")],
        )
        .unwrap();
        assert!(!check_w_axioms(&bad).passed());
    }

    #[test]
    fn ansatz_search_finds_nonlinear_w() {
        // W_AB = ε_ABC (T_C + α T_C²) with a symmetry breaking γ T_1² in W_12
        let mut found = Vec::new();
        for alpha in -2..=2i64 {
            for gamma in -2..=2i64 {
                let w12 = format!("T3 + {alpha} * T3^2 + {gamma} * T1^2");
                let w13 = format!("-T2 - {alpha} * T2^2");
                let w23 = format!("T1 + {alpha} * T1^2");
                let alg = NonlinearLieAlgebra::new(
                    &["T1", "T2", "T3"],
                    &[("T1", "T2", w12.as_str()), ("T1", "T3", w13.as_str()), ("T2", "T3", w23.as_str())],
                )
                .unwrap();
                if check_w_axioms(&alg).passed() {
                    found.push((alpha, gamma));
                }
            }
        }
        assert_eq!(found, vec![(-2, 0), (-1, 0), (0, 0), (1, 0), (2, 0)]);
    }

    #[test]
    fn poisson_examples() {
        let alg = NonlinearLieAlgebra::so3();
        let t = |s| p(&alg, s);
        assert_eq!(poisson_bracket(&t("T1"), &t("T2"), &alg).unwrap(), t("T3"));
        assert!(poisson_bracket(&t("T1"), &t("T1"), &alg).unwrap().is_empty());
        // {T1, T2 T3} = W12 T3 + W13 T2
        assert_eq!(poisson_bracket(&t("T1"), &t("T2 * T3"), &alg).unwrap(), t("T3^2 - T2^2"));
        let q = NonlinearLieAlgebra::quadratic_plane();
        assert_eq!(poisson_bracket(&p(&q, "T1"), &p(&q, "T2"), &q).unwrap(), p(&q, "T1 * T2"));
    }

    #[test]
    fn linear_w_has_no_extra_term() {
        let m = IkedaModel::new(NonlinearLieAlgebra::so3(), 2).unwrap();
        let com = m.gauge_commutator(&m.unit_param(0), &m.unit_param(1)).unwrap();
        assert!(com.extra.is_zero());
        // c3 = [e1, e2] = e3 at ψ
        assert_eq!(com.c3, m.unit_param(2));
        let zero = vec![m.zero(); 3];
        let com = m.gauge_commutator(&m.unit_param(0), &zero).unwrap();
        assert!(com.extra.is_zero() && com.c3.iter().all(|c| c.is_empty()));
        assert_eq!(check_bbvd_system(&m).status, Status::Pass);
    }

    #[test]
    fn covariant_derivative_and_curvature() {
        let m = IkedaModel::new(NonlinearLieAlgebra::so3(), 2).unwrap();
        let s = m.space();
        let d0 = m.covariant_derivative(0, 0).unwrap();
        assert_eq!(d0, s.parse("u[psi1;x0] + psi3 * h2_0 - psi2 * h3_0").unwrap());
        let r = m.curvature(0, 0, 1).unwrap();
        assert_eq!(r, -m.curvature(0, 1, 0).unwrap());
        assert_eq!(r, s.parse("u[h1_1;x0] - u[h1_0;x1] + h2_0 * h3_1 - h3_0 * h2_1").unwrap());
    }

    #[test]
    fn field_equations_are_shell_relations() {
        let m = IkedaModel::new(NonlinearLieAlgebra::quadratic_plane(), 2).unwrap();
        let el: HashMap<String, QPoly> = m.field_equations().unwrap().into_iter().collect();
        for a in 0..2 {
            assert_eq!(el[&format!("E[psi{}]", a + 1)], m.curvature(a, 0, 1).unwrap());
            assert_eq!(el[&format!("E[h{}_0]", a + 1)], m.covariant_derivative(a, 1).unwrap());
            assert_eq!(el[&format!("E[h{}_1]", a + 1)], -m.covariant_derivative(a, 0).unwrap());
        }
    }

    #[test]
    fn variation_of_lagrangian_is_divergence() {
        for alg in [NonlinearLieAlgebra::so3(), NonlinearLieAlgebra::quadratic_plane()] {
            let m = IkedaModel::new(alg, 2).unwrap();
            let dl = m.gauge_delta(&m.field_param()).unwrap().apply(&m.lagrangian().unwrap()).unwrap();
            let rep = m.space().is_total_divergence(&dl).unwrap();
            assert!(rep.is_divergence, "{:?}", rep.euler_images);
        }
    }

    #[test]
    fn shell_equivalence_and_kirillov_kostant() {
        let m = IkedaModel::new(NonlinearLieAlgebra::quadratic_plane(), 3).unwrap();
        assert!(shell_equivalence(&m, 4, 2).unwrap().passed());
        assert!(kirillov_kostant_mismatches(&NonlinearLieAlgebra::so3()).unwrap().is_empty());
        assert!(kirillov_kostant_mismatches(&NonlinearLieAlgebra::quadratic_plane()).is_err());
        let (n, fails) = poisson_jacobi_failures(&NonlinearLieAlgebra::quadratic_plane(), 2).unwrap();
        assert_eq!((n, fails.len()), (10, 0));
    }

    #[test]
    fn quadratic_w_closes_on_shell() {
        let (m, ctx) = build_ikeda_gauge_data(NonlinearLieAlgebra::quadratic_plane(), 4, 2).unwrap();
        assert_eq!(check_bbvd_system(&m).status, Status::Fail);
        let r = check_gbbvd_system(&m, &ctx);
        assert_eq!(r.status, Status::Pass, "{r:?}");
        assert!(r.records.iter().flat_map(|x| &x.residual).all(|c| c.certificate.is_some()));
        assert_eq!(check_jacobi_system(&m).status, Status::Pass);
    }

    #[test]
    fn commutator_psi_component_is_delta_c3() {
        let m = IkedaModel::new(NonlinearLieAlgebra::nonlinear_so3(), 2).unwrap();
        let com = m.gauge_commutator(&m.unit_param(0), &m.unit_param(2)).unwrap();
        for a in 0..3 {
            assert!(com.extra.component(m.space().field_index(&SigmaFields::psi_name(a)).unwrap()).is_empty());
        }
        assert!(!com.extra.is_zero());
    }
}
