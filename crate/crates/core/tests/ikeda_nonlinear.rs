use shlie_core::ikeda::{
    build_ikeda_gauge_data, check_w_axioms, poisson_jacobi_failures, shell_equivalence, variation_divergence,
    NonlinearLieAlgebra,
};
use shlie_core::shell::{check_bbvd_system, check_gbbvd_system, check_jacobi_system, Status};

#[test]
fn nonlinear_so3_closes_only_on_shell() {
    let alg = NonlinearLieAlgebra::nonlinear_so3();
    assert!(check_w_axioms(&alg).passed());
    let (model, ctx) = build_ikeda_gauge_data(alg, 4, 2).unwrap();
    let strict = check_bbvd_system(&model);
    assert_eq!(strict.status, Status::Fail);
    let shell = check_gbbvd_system(&model, &ctx);
    assert_eq!(shell.status, Status::Pass, "{shell:#?}");
    for rec in &shell.records {
        assert!(!rec.residual.is_empty());
        for c in &rec.residual {
            let cert = c.certificate.as_ref().expect("certificate");
            // every multiplier sits on a field equation of an h component, i.e. on D_μψ
            assert!(cert.iter().all(|(label, _)| label.starts_with("E[h")), "{cert:?}");
        }
    }
    assert_eq!(check_jacobi_system(&model).status, Status::Pass);
}

#[test]
fn nonlinear_so3_variational_facts() {
    let alg = NonlinearLieAlgebra::nonlinear_so3();
    let (model, _) = build_ikeda_gauge_data(alg.clone(), 4, 2).unwrap();
    let div = variation_divergence(&model).unwrap();
    assert!(div.is_divergence, "{:?}", div.euler_images);
    assert!(shell_equivalence(&model, 4, 2).unwrap().passed());
    let (checked, fails) = poisson_jacobi_failures(&alg, 2).unwrap();
    assert!(checked > 0 && fails.is_empty(), "{fails:?}");
}
