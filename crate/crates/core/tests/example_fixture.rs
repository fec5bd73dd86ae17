//! The five-point space `{0, 1/9, 1/2, 1, 2}` with `T ≡ 1/2` except
//! `T(2) = 1/9`, and `α = 1` exactly on `{0, 1/2, 1}²`.

#![allow(clippy::needless_range_loop)]

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use simfix::functions::{Beta, CClass, Zeta};
use simfix::metric::{parse_exact, AdmissibilityMap, FiniteMetricSpace, SelfMap};
use simfix::picard::{check_alpha_chain, fixed_points, iterate, TraceStatus};
use simfix::verifier::{
    big_m, check_alpha_admissible, check_uniqueness_hypothesis, find_start_point, verify, ContractionKind,
};
use simfix::Slack;

const LABELS: [&str; 5] = ["0", "1/9", "1/2", "1", "2"];

struct Fixture {
    space: FiniteMetricSpace,
    map: SelfMap,
    alpha: AdmissibilityMap,
}

fn fixture() -> Fixture {
    Fixture {
        space: FiniteMetricSpace::euclidean_labels(&LABELS).unwrap(),
        map: SelfMap::new(vec![2, 2, 2, 2, 1], 5).unwrap(),
        alpha: AdmissibilityMap::indicator(5, &[0, 2, 3]),
    }
}

fn szag() -> ContractionKind {
    ContractionKind::SuzukiZagGeraghty {
        zeta: Zeta::rational(),
        g: CClass::difference(0.0).unwrap(),
        beta: Beta::reciprocal(),
    }
}

fn exact(i: usize) -> BigRational {
    parse_exact(LABELS[i]).unwrap()
}

fn exact_d(a: usize, b: usize) -> BigRational {
    let diff = exact(a) - exact(b);
    if diff < BigRational::zero() {
        -diff
    } else {
        diff
    }
}

const T: [usize; 5] = [2, 2, 2, 2, 1];

#[test]
fn big_m_examples() {
    let f = fixture();
    assert_eq!(big_m(&f.space, &f.map, 0, 3), 1.0);
    assert_eq!(big_m(&f.space, &f.map, 3, 4), 17.0 / 9.0);
    assert_eq!(big_m(&f.space, &f.map, 2, 2), 0.0);
}

#[test]
fn full_condition_holds_with_closed_form_values() {
    let f = fixture();
    let report = verify(&f.space, &f.map, Some(&f.alpha), &szag(), Slack::default()).unwrap();
    assert!(report.holds);
    assert!(report.counterexample.is_none());
    assert_eq!(report.pairs_checked, 20);

    let one = BigRational::one();
    let two = &one + &one;
    let mut non_vacuous = 0;
    for x in 0..5 {
        for y in (0..5).filter(|&y| y != x) {
            let half_step = exact_d(x, T[x]) / &two;
            let premise = half_step < exact_d(x, y);
            let record = report.record(x, y).unwrap();
            assert_eq!(record.premise_holds, premise, "pair ({x}, {y})");
            if !premise {
                assert!(record.lhs.is_none());
                continue;
            }
            non_vacuous += 1;
            let m = [exact_d(x, y), exact_d(x, T[x]), exact_d(y, T[y])]
                .into_iter()
                .max()
                .unwrap();
            let closed_form = (&m / (&one + &two * &m)).to_f64().unwrap();
            let lhs = record.lhs.unwrap();
            assert!(
                (lhs - closed_form).abs() <= 1e-12,
                "pair ({x}, {y}): {lhs} vs {closed_form}"
            );
            assert!(lhs > 0.0);
            assert_eq!(record.rhs, Some(0.0));
        }
    }
    assert_eq!(non_vacuous, report.non_vacuous().count());
    assert!(non_vacuous > 0);
}

#[test]
fn admissibility_and_start_point() {
    let f = fixture();
    let adm = check_alpha_admissible(&f.map, &f.alpha);
    assert!(adm.is_alpha_admissible);
    assert!(adm.is_triangular);
    assert_eq!(find_start_point(&f.map, &f.alpha), Some(0));
    assert!(f.alpha.get(3, f.map.at(3)) >= 1.0);
    assert!(check_uniqueness_hypothesis(&f.alpha, &fixed_points(&f.map)));
}

#[test]
fn orbits_reach_the_unique_fixed_point() {
    let f = fixture();
    assert_eq!(fixed_points(&f.map), vec![2]);
    for start in 0..5 {
        let trace = iterate(&f.space, &f.map, start, 1000).unwrap();
        assert_eq!(trace.status, TraceStatus::FixedPointReached);
        assert_eq!(trace.fixed_point, Some(2));
        assert!(trace.steps_to_fixed_point().unwrap() <= 3);
    }
    let from_two = iterate(&f.space, &f.map, 4, 1000).unwrap();
    assert_eq!(from_two.iterates, vec![4, 1, 2, 2]);
    let from_one = iterate(&f.space, &f.map, 3, 1000).unwrap();
    assert_eq!(from_one.iterates, vec![3, 2, 2]);
    assert!(check_alpha_chain(&from_one, &f.alpha));
    assert!(!check_alpha_chain(&from_two, &f.alpha));
}

// The largest distance ratio is 7/18, between the points 1 and 2, so ungated
// conditions also hold on this fixture.
#[test]
fn map_is_a_banach_contraction() {
    let f = fixture();
    let mut worst = BigRational::zero();
    for x in 0..5 {
        for y in (0..5).filter(|&y| y != x) {
            worst = worst.max(exact_d(T[x], T[y]) / exact_d(x, y));
        }
    }
    assert_eq!(worst, parse_exact("7/18").unwrap());
    let banach = |lambda| {
        verify(
            &f.space,
            &f.map,
            None,
            &ContractionKind::Banach { lambda },
            Slack::default(),
        )
        .unwrap()
    };
    assert!(banach(7.0 / 18.0).holds);
    assert!(!banach(0.38).holds);

    let z = verify(
        &f.space,
        &f.map,
        None,
        &ContractionKind::ZContraction { zeta: Zeta::rational() },
        Slack::default(),
    )
    .unwrap();
    assert!(z.holds);
    let tight = verify(
        &f.space,
        &f.map,
        None,
        &ContractionKind::ZContraction {
            zeta: Zeta::linear(0.3).unwrap(),
        },
        Slack::default(),
    )
    .unwrap();
    assert!(!tight.holds);
    let ce = tight.counterexample.as_ref().unwrap();
    let record = tight.record(ce.x, ce.y).unwrap();
    assert!(record.lhs.unwrap() < 0.0);
}
