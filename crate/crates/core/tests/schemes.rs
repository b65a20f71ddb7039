mod common;

use common::*;
use pdtomo::model::CorrelationKind;
use pdtomo::schemes::{
    build_square, enumerate, k1_count, sensitivity, BracketScheme, Permutation, SchemeError, SettingSelection,
};
use proptest::prelude::*;

fn binomial2(m: u64) -> u64 {
    m * (m - 1) / 2
}

#[test]
fn known_counts() {
    assert_eq!(enumerate(2, 2, 1).unwrap().count(), 11);
    assert_eq!(enumerate(3, 2, 2).unwrap().count(), 33);
    assert_eq!(enumerate(3, 2, 1).unwrap().count(), 51);
    assert_eq!(enumerate(3, 2, 3).unwrap().count(), 3);
}

#[test]
fn class_one_closed_form() {
    for m in 2..=6u64 {
        assert_eq!(enumerate(m as usize, 2, 1).unwrap().count() as u64, k1_count(m), "m={m}");
    }
}

#[test]
fn second_highest_class_closed_form() {
    for m in 2..=5u64 {
        let r = enumerate(m as usize, 2, m as usize - 1).unwrap();
        assert_eq!(r.count() as u64, 11 * binomial2(m), "m={m}");
    }
}

#[test]
fn counts_do_not_depend_on_dimension() {
    for (m, k) in [(2, 1), (3, 2)] {
        assert_eq!(enumerate(m, 2, k).unwrap().count(), enumerate(m, 3, k).unwrap().count());
    }
}

#[test]
fn enumerated_schemes_are_distinct_and_round_trip() {
    for m in 2..=4 {
        for k in 1..=m {
            let schemes = enumerate(m, 2, k).unwrap().schemes;
            for s in &schemes {
                let text = s.to_string();
                assert_eq!(&BracketScheme::parse(&text, m, 2).unwrap(), s, "{text}");
                assert_eq!(s.class(), k);
            }
            let mut texts: Vec<String> = schemes.iter().map(ToString::to_string).collect();
            texts.sort();
            texts.dedup();
            assert_eq!(texts.len(), schemes.len());
        }
    }
}

#[test]
fn symmetric_square_is_counted_once() {
    let texts: Vec<String> = enumerate(2, 2, 1).unwrap().schemes.iter().map(ToString::to_string).collect();
    assert_eq!(texts.iter().filter(|t| t.ends_with("[1;2d^2:2d^2]")).count(), 1);
    // swapping the two displaced qudits only transposes the square
    let devices = sweep_devices(2, 3);
    let s = data(&devices, CorrelationKind::None, 0.0, 0);
    let plain = BracketScheme::parse("[1;2d^2:2d^2]", 2, 2).unwrap();
    let swapped = BracketScheme::parse("(12)[1;2d^2:2d^2]", 2, 2).unwrap();
    let a = build_square(&s, &plain, &SettingSelection::standard()).unwrap();
    let b = build_square(&s, &swapped, &SettingSelection::standard()).unwrap();
    assert_eq!(a.to_matrix().transpose(), b.to_matrix());
}

#[test]
fn listed_symmetries_name_real_stabilizers() {
    let r = enumerate(3, 2, 2).unwrap();
    for t in &r.squares {
        assert!(t.stabilizer >= 1);
        assert_eq!(t.variants * t.stabilizer, 6, "{}", t.template);
    }
}

#[test]
fn uncorrelated_examples_are_trivial() {
    for (text, m) in [("[2d^2;1:2d^2]", 2), ("[d;2d:2d^2]", 2), ("[2;d,d:2d^2]", 3)] {
        let scheme = BracketScheme::parse(text, m, 2).unwrap();
        let devices = sweep_devices(m, 30);
        let s = data(&devices, CorrelationKind::None, 0.0, 0);
        assert!(score(&s, &scheme) < 1e-8, "{text}");
    }
}

#[test]
fn stick_of_butter_rows_fuse_state_and_qudit_one() {
    let devices = sweep_devices(2, 31);
    let s = data(&devices, CorrelationKind::None, 0.0, 0);
    let scheme = BracketScheme::parse("[d;2d:2d^2]", 2, 2).unwrap();
    let sq = build_square(&s, &scheme, &SettingSelection::standard()).unwrap();
    let origin = sq.origin.as_ref().unwrap();
    assert_eq!(origin.rows[0].iter().map(|a| a.axis).collect::<Vec<_>>(), vec![0, 1]);
    assert_eq!(origin.rows[1][1].settings, vec![2, 3]);
    // row (a, i) of corner C is S[a, 2 + i, j]
    assert_eq!(sq.c[(3, 1)], s.get(&[1, 3, 1]));
}

#[test]
fn settings_must_cover_the_scheme() {
    let devices = pdtomo::model::random_devices(2, 2, 4, &[8, 8], 0).unwrap();
    let s = data(&devices, CorrelationKind::None, 0.0, 0);
    let scheme = BracketScheme::parse("[2d^2;1:2d^2]", 2, 2).unwrap();
    assert!(matches!(
        build_square(&s, &scheme, &SettingSelection::standard()),
        Err(SchemeError::InsufficientSettings { axis: 0, .. })
    ));
    let wrong = BracketScheme::parse("[2;d,d:2d^2]", 3, 2).unwrap();
    assert!(matches!(
        build_square(&s, &wrong, &SettingSelection::standard()),
        Err(SchemeError::Mismatch(_))
    ));
}

#[test]
fn sensitivity_examples() {
    let spam = |q| CorrelationKind::Spam { qudit: q };
    let p = sensitivity(&BracketScheme::parse("[2d^2;1:2d^2]", 2, 2).unwrap());
    assert!(!p.is_sensitive_to(spam(1)) && p.is_sensitive_to(spam(2)));
    let p = sensitivity(&BracketScheme::parse("[2d^4:2d^2,d^2]", 2, 2).unwrap());
    assert!(!p.is_sensitive_to(CorrelationKind::Nonlocal { p: 1, q: 2 }));
    for s in enumerate(3, 2, 2).unwrap().schemes.iter().filter(|s| s.permutation().is_identity()) {
        let p = sensitivity(s);
        assert!(!p.is_sensitive_to(CorrelationKind::Nonlocal { p: 2, q: 3 }), "{s}");
        assert!(!p.is_sensitive_to(spam(1)), "{s}");
    }
}

#[test]
fn left_qudits_are_never_blamed() {
    for m in 2..=3 {
        for s in all_schemes(m) {
            let p = sensitivity(&s);
            let rows = s.qudits_on(pdtomo::schemes::Side::Row);
            for &q in &rows {
                assert!(!p.is_sensitive_to(CorrelationKind::Spam { qudit: q + 1 }), "{s}");
                for &r in rows.iter().filter(|&&r| r > q) {
                    assert!(!p.is_sensitive_to(CorrelationKind::Nonlocal { p: q + 1, q: r + 1 }), "{s}");
                }
            }
            if s.class() == m {
                for kind in CorrelationKind::all(m) {
                    if let CorrelationKind::Nonlocal { .. } = kind {
                        assert!(!p.is_sensitive_to(kind), "{s}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_inverts_print(k in 1usize..=3, pick in any::<prop::sample::Index>(), perm in any::<prop::sample::Index>()) {
        let templates = enumerate(3, 2, k).unwrap().squares;
        let t = &templates[pick.index(templates.len())].template;
        let all = Permutation::all(3);
        let s = t.with_permutation(all[perm.index(all.len())].clone()).unwrap();
        prop_assert_eq!(BracketScheme::parse(&s.to_string(), 3, 2).unwrap(), s);
    }
}
