//! Shipped example structures.

use std::path::{Path, PathBuf};

use shlie_core::coalgebra::GradedBasis;
use shlie_core::gauge::{build_strict_lie, so3_adjoint, GaugeData, StrictLieInput};
use shlie_core::hom::HomMap;
use shlie_core::ikeda::NonlinearLieAlgebra;
use shlie_core::jet::{JetSpace, JetSpec};
use shlie_core::{QPoly, Q};

use crate::structure::{GaugeFile, NonlinearFile, StrictLieFile, Structure};
use crate::CliError;

pub const ENV_VAR: &str = "SHLIE_FIXTURES";

pub fn fixture_dir() -> PathBuf {
    match std::env::var_os(ENV_VAR) {
        Some(d) => PathBuf::from(d),
        None => Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

/// A path as given, else `<dir>/<name>` or `<dir>/<name>.toml` in the fixture directory.
pub fn resolve(input: &Path) -> Result<PathBuf, CliError> {
    if input.exists() {
        return Ok(input.to_path_buf());
    }
    let dir = fixture_dir();
    for cand in [dir.join(input), dir.join(input).with_extension("toml")] {
        if cand.is_file() {
            return Ok(cand);
        }
    }
    Err(CliError::Io(format!("{}: no such file or fixture in {}", input.display(), dir.display())))
}

/// [a, b] = b acting on itself.
pub fn nonabelian2() -> StrictLieInput<Q> {
    let mut s = StrictLieInput::new(["a", "b"], ["fa", "fb"]).expect("names");
    s.set_bracket("a", "b", "b").expect("bracket");
    s.set_action("a", "fb", "fb").expect("action");
    s.set_action("b", "fa", "-fb").expect("action");
    s
}

/// One field u over x with shell E = u_x + u². δ(a) is the identity on f and
/// δ(b) sends f∧f to E·f, so the closure residual is a multiple of E.
pub fn jet_shell_toy() -> GaugeFile {
    let spec = JetSpec { fields: vec!["u".into()], derivations: vec!["x".into()], max_order: 2 };
    let space = JetSpace::new(spec.clone()).expect("space");
    let e = space.parse("u[u;x] + u^2").expect("shell");
    let xi = GradedBasis::uniform(["a", "b"], 0).expect("xi");
    let phi = GradedBasis::uniform(["f"], 0).expect("phi");
    let mut data: GaugeData<QPoly> = GaugeData::new(&xi, &phi).expect("bases");
    let one = space.parse("1").expect("one");
    let word = |s: &str| phi.parse_word(s).expect("word").expect("nonzero").0;
    let mut da = HomMap::new(&phi, &phi, 0);
    da.add_value(word("f"), &shlie_core::coalgebra::Vector::single(0, one)).expect("δa");
    let mut db = HomMap::new(&phi, &phi, 0);
    db.add_value(word("f^f"), &shlie_core::coalgebra::Vector::single(0, e.clone())).expect("δb");
    data.set_delta(0, da).expect("δa");
    data.set_delta(1, db).expect("δb");
    GaugeFile { name: "jet_shell_toy".into(), data, jet: Some(spec), shell: vec![e] }
}

/// Every shipped fixture, built from code.
pub fn builtin() -> Vec<Structure> {
    let so3_gauge = build_strict_lie::<QPoly>(&so3_adjoint()).expect("so(3)").0;
    let nl = |name: &str, alg| Structure::NonlinearLie(NonlinearFile { name: name.into(), alg });
    vec![
        Structure::StrictLie(StrictLieFile { name: "so3_strict".into(), input: so3_adjoint() }),
        Structure::StrictLie(StrictLieFile { name: "nonabelian2_strict".into(), input: nonabelian2() }),
        Structure::Gauge(GaugeFile { name: "so3_gauge".into(), data: so3_gauge, jet: None, shell: vec![] }),
        Structure::Gauge(jet_shell_toy()),
        nl("ikeda_so3_linear", NonlinearLieAlgebra::so3()),
        nl("ikeda_quadratic", NonlinearLieAlgebra::quadratic_plane()),
        nl("ikeda_nonlinear_d3", NonlinearLieAlgebra::nonlinear_so3()),
    ]
}

/// Write every builtin fixture into `dir` in canonical form.
pub fn write_all(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    builtin()
        .iter()
        .map(|s| {
            let path = dir.join(format!("{}.toml", s.name()));
            std::fs::write(&path, s.to_toml()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}
