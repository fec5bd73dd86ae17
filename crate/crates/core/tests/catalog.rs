use num_rational::BigRational;
use simfix::functions::{check_cg_axioms, check_cg_simulation, check_zeta_axioms, Axiom, CClass, SamplingGrid, Zeta};
use simfix::Slack;

#[test]
fn builtin_simulation_functions_pass_sampled_axioms() {
    let grid = SamplingGrid::default();
    for zeta in Zeta::builtins() {
        assert_eq!(zeta.eval(0.0, 0.0).unwrap(), 0.0, "{}", zeta.describe());
        let report = check_zeta_axioms(&zeta, &grid, Slack::default());
        let below = report.check(Axiom::ZetaBelowDifference).unwrap();
        assert_eq!(below.samples, 128 * 128);
        assert_eq!(below.violations, 0, "{}: {:?}", zeta.describe(), below.counterexample);
        assert!(report.passed());
    }
}

#[test]
fn builtin_c_class_functions_stay_below_s() {
    let grid = SamplingGrid::default();
    for g in CClass::builtins() {
        let report = check_cg_axioms(&g, &grid, Slack::default());
        assert!(report.check(Axiom::CClassBound).unwrap().passed(), "{}", g.describe());
        assert!(report.passed(), "{}: {:?}", g.describe(), report.checks);
    }
}

#[test]
fn boundary_zeta_is_rejected() {
    let boundary = Zeta::custom("s - t").unwrap();
    let report = check_zeta_axioms(&boundary, &SamplingGrid::default(), Slack::default());
    assert!(!report.passed());
    assert_eq!(report.check(Axiom::ZetaBelowDifference).unwrap().violations, 128 * 128);
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap()
}

// ζ = 0.9s − t against G = s/(1+t): decided here in exact arithmetic on the
// same grid values.
#[test]
fn linear_against_damped_matches_exact_oracle() {
    let grid = SamplingGrid::uniform(0.0, 10.0, 100);
    let zeta = Zeta::linear(0.9).unwrap();
    let g = CClass::damped(1.0, 2.0).unwrap();
    let report = check_cg_simulation(&zeta, &g, &grid, Slack::default());
    let lambda = exact(0.9);
    let one = exact(1.0);
    let mut expected = 0;
    for &t in grid.values() {
        for &s in grid.values() {
            let (t, s) = (exact(t), exact(s));
            if &lambda * &s - &t >= &s / (&one + &t) {
                expected += 1;
            }
        }
    }
    let check = &report.checks[0];
    assert!(expected > 0);
    assert_eq!(check.violations, expected);
    let ce = check.counterexample.unwrap();
    assert!(ce.value >= ce.bound);
}
