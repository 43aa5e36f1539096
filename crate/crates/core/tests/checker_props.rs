mod common;

use fracreg::checker::{check_corollary, check_theorem, Verdict};
use fracreg::corpus::{make_example1, make_negative_control, make_power, FunctionSpec};
use fracreg::regularity::CheckConfig;

fn mu_grid(f: &FunctionSpec) -> Vec<f64> {
    let lo = CheckConfig::mu_lower(f);
    (1..=5).map(|i| lo + (1.0 - lo) * i as f64 / 6.0).collect()
}

#[test]
fn flat_zero_corpus_passes_across_mu() {
    for f in common::flat_zero_corpus() {
        for mu in mu_grid(&f) {
            let r = check_theorem(&f, &CheckConfig::new(mu)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{} mu={mu}: {r:#?}", f.label());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    for f in common::corpus() {
        let mu = mu_grid(&f)[2];
        let cfg = CheckConfig::new(mu);
        let a = check_theorem(&f, &cfg).unwrap();
        let b = check_theorem(&f, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
            "{}",
            f.label()
        );
    }
}

#[test]
fn nd_sup_is_stable_under_grid_doubling() {
    for f in common::flat_zero_corpus() {
        let mu = mu_grid(&f)[2];
        let coarse = check_theorem(&f, &CheckConfig::new(mu)).unwrap();
        let fine = check_theorem(
            &f,
            &CheckConfig {
                grid_points: 128,
                ..CheckConfig::new(mu)
            },
        )
        .unwrap();
        let change = (fine.nd_sup - coarse.nd_sup).abs() / coarse.nd_sup;
        assert!(
            change <= 0.01,
            "{}: {} -> {}",
            f.label(),
            coarse.nd_sup,
            fine.nd_sup
        );
    }
}

#[test]
fn loosening_tolerances_never_turns_pass_into_fail() {
    for f in common::corpus() {
        for mu in mu_grid(&f) {
            let strict = CheckConfig::new(mu);
            let loose = CheckConfig {
                exponent_margin: 2.0 * strict.exponent_margin,
                nd_stability: 1.0 + 2.0 * (strict.nd_stability - 1.0),
                ..strict
            };
            let a = check_theorem(&f, &strict).unwrap();
            let b = check_theorem(&f, &loose).unwrap();
            if a.verdict == Verdict::Pass {
                assert_eq!(b.verdict, Verdict::Pass, "{} mu={mu}", f.label());
            }
            for (za, zb) in a.zeros.iter().zip(&b.zeros) {
                assert!(!za.holder_ok || zb.holder_ok);
                assert!(!za.differentiability_ok || zb.differentiability_ok);
            }
            assert!(!a.nd_bounded_ok || b.nd_bounded_ok);
        }
    }
}

#[test]
fn negative_control_fails_hypotheses_and_conclusion() {
    let f = make_negative_control(1.0).unwrap();
    let r = check_theorem(&f, &CheckConfig::new(0.5)).unwrap();
    assert_eq!(r.verdict, Verdict::HypothesesFailed);
    assert!(!r.hypotheses.zero_derivatives_ok);
    let est = r.zeros[0].holder_estimate.as_ref().unwrap();
    assert!(!est.flat && est.exponent_fit < 0.1, "{est:?}");
    assert!(!r.zeros[0].holder_ok);
}

#[test]
fn corollary_holds_on_example1_and_power() {
    let e1 = make_example1(2, 1.0).unwrap();
    let r = check_corollary(&e1, 0.5, &CheckConfig::new(0.6)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
    assert!(r.epsilon_samples.iter().all(|s| s.chain_ok));

    let p = make_power(2, 0.5, 1.0).unwrap();
    let r = check_corollary(&p, 0.5, &CheckConfig::new(0.6)).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
}

#[test]
fn corollary_rejects_eta_outside_interval() {
    let p = make_power(2, 0.5, 1.0).unwrap();
    assert!(check_corollary(&p, 0.0, &CheckConfig::new(0.6)).is_err());
    assert!(check_corollary(&p, 1.0, &CheckConfig::new(0.6)).is_err());
}
