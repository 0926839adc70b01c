//! Exponents frozen from an independent 50-digit evaluation of the closed-form
//! Williamson decompositions, the two-mode homodyne Gaussian overlap and the
//! Bose-Einstein Bhattacharyya coefficient.

use qillum::discrimination::{error_lower, exact_exponents, chernoff_upper};
use qillum::montecarlo::{simulate_opa, McConfig};
use qillum::protocol::opa_spec;
use qillum::{Exec, ProtocolParams};

struct Case {
    kappa: f64,
    ns: f64,
    nb: f64,
    alice: f64,
    eve: f64,
    homodyne: f64,
    opa: Option<f64>,
}

const CASES: [Case; 6] = [
    Case { kappa: 0.1, ns: 0.004, nb: 100.0, alice: 1.294154594387281e-5, eve: 5.105812224779293e-8, homodyne: 3.794406594207075e-6, opa: Some(5.577907083343026e-6) },
    Case { kappa: 0.1, ns: 0.004, nb: 0.0, alice: 1.599935751013178e-4, eve: 1.308234796657995e-3, homodyne: 7.968251455514619e-5, opa: None },
    Case { kappa: 0.1, ns: 10.0, nb: 100.0, alice: 9.932362072486119e-3, eve: 9.380390096974799e-3, homodyne: 4.966180781342517e-3, opa: Some(4.879601190775599e-3) },
    Case { kappa: 0.5, ns: 0.001, nb: 40.0, alice: 4.482697510481707e-5, eve: 2.38805970796985e-8, homodyne: 1.21829510231558e-5, opa: Some(1.957487254888729e-5) },
    Case { kappa: 0.9, ns: 0.005, nb: 22.3, alice: 6.744787604174127e-4, eve: 3.824509451749e-7, homodyne: 1.959137879744538e-4, opa: Some(3.117640160901235e-4) },
    Case { kappa: 0.02, ns: 0.003, nb: 3000.0, alice: 7.079986523371799e-8, eve: 2.110359002049595e-10, homodyne: 1.977556150582141e-8, opa: Some(3.411945107294299e-8) },
];

/// ln Q is a sum of O(10) terms in double precision, so exponents carry an
/// absolute error floor near 1e-15 besides the relative tolerance.
fn close(got: f64, want: f64, tol: f64, what: &str) {
    let err = (got - want).abs();
    assert!(
        err <= tol * want + 1e-14,
        "{what}: got {got:e}, want {want:e} (rel {:.2e})",
        err / want
    );
}

#[test]
fn exponents_match_reference() {
    for c in &CASES {
        let p = ProtocolParams::new(c.kappa, c.ns, c.nb, 1).unwrap();
        let e = exact_exponents(&p).unwrap();
        let tag = format!("({}, {}, {})", c.kappa, c.ns, c.nb);
        close(e.alice, c.alice, 1e-8, &format!("alice {tag}"));
        close(e.eve, c.eve, 1e-5, &format!("eve {tag}"));
        close(e.homodyne, c.homodyne, 1e-10, &format!("homodyne {tag}"));
        match (e.opa, c.opa) {
            (Some(got), Some(want)) => close(got, want, 1e-10, &format!("opa {tag}")),
            (None, None) => {}
            other => panic!("opa availability mismatch {tag}: {other:?}"),
        }
    }
}

#[test]
fn closing_paragraph_bounds() {
    let p = ProtocolParams::new(0.1, 0.004, 100.0, 2_000_000).unwrap();
    let e = exact_exponents(&p).unwrap();
    close(chernoff_upper(e.opa.unwrap(), p.m), 7.14597463973e-6, 1e-9, "opa upper");
    close(chernoff_upper(e.eve, p.m), 0.451462292778, 1e-6, "eve upper");
    close(error_lower(e.eve, p.m), 0.285100492788, 1e-6, "eve lower");
}

#[test]
fn opa_single_point_exponent() {
    // M chosen so the OPA Bhattacharyya bound is 0.05. The empirical
    // exponent −ln(2p̂)/M includes the sub-exponential prefactor, so it sits
    // well above the Chernoff exponent at a single M.
    let p = ProtocolParams::new(0.1, 0.004, 100.0, 1).unwrap();
    let e = exact_exponents(&p).unwrap().opa.unwrap();
    let m = ((0.1f64).ln() / -e).round() as u64;
    let cfg = McConfig::new(p.with_m(m), 10_000, 21).unwrap();
    let r = simulate_opa(&cfg, Exec::default()).unwrap();
    assert!(r.within_bound(chernoff_upper(e, m)));
    let empirical = -(2.0 * r.p_hat).ln() / m as f64;
    assert!(empirical >= e, "{empirical:e} vs {e:e}");
    assert!(empirical <= 2.0 * e, "{empirical:e} vs {e:e}");
    assert!(opa_spec(&p).unwrap().n0 > opa_spec(&p).unwrap().n1);
}
