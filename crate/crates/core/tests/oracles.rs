//! Sanity checks on the test oracles themselves.

mod common;

use common::closed_forms as oracle;
use common::dd::Dd;

#[test]
fn double_double_elementary_functions() {
    let e = Dd::ONE.exp();
    assert_eq!(e.hi, std::f64::consts::E);
    // e − hi from the 40-digit expansion 2.718281828459045235360287471352662497757
    assert!((e.lo - 1.445_646_891_729_250_2e-16).abs() < 1e-30, "{e:?}");
    let two = Dd::from(2.0);
    let ln2 = two.ln();
    assert_eq!(ln2.hi, std::f64::consts::LN_2);
    assert!((ln2.lo - 2.319_046_813_846_299_6e-17).abs() < 1e-31);
    assert!((two.sqrt().sqr() - two).hi.abs() < 1e-31);
    let x = Dd::from(0.3).powf(Dd::from(2.5));
    assert!((x.to_f64() - 0.3f64.powf(2.5)).abs() < 1e-16);
    assert_eq!(Dd::from(3.0).powi(5).to_f64(), 243.0);
}

#[test]
fn oracle_matches_mpmath_pins() {
    // 40-digit mpmath evaluations of the closed forms
    let cases = [
        (oracle::l1_tx(10, 1.0, 0.2), 0.0012791134162799753),
        (oracle::l1_sec(10, 2, 1.0, 0.5), 0.3140796307504911084),
        (oracle::l2_tau_max(10, 1.0, 0.1, false), 0.2747651460865023694),
        (oracle::l2_tau_max(10, 1.0, 0.1, true), 0.2952792104228996538),
        (oracle::l2_tau_min(10, 1.0, 0.1, 2), 0.8846918696568052949),
        (oracle::l4_tau_max(10, 1.0, 0.1, false), 0.0765072675044034628),
        (oracle::l4_tau_max(10, 1.0, 0.1, true), 0.0780039898496383958),
    ];
    for (got, want) in cases {
        assert!(common::rel_err(got, want) < 1e-15, "{got} vs {want}");
    }
}

#[test]
fn exact_solver_inverts_the_constraint() {
    for c in [1e-8, 0.01, 0.5, 3.0, 40.0] {
        let t = oracle::solve_exact(Dd::from(c));
        let back = t * (Dd::ONE - (-t).exp());
        // 1 − e^{−t} cancels about log10(1/t) digits for small t
        assert!(((back - Dd::from(c)) / Dd::from(c)).hi.abs() < 1e-26, "{c}");
    }
}
