use toledo_core::families::{check_reducible_ternary, Family};
use toledo_core::spectrum::{completeness_margin_check, enumerate_family, toledo_spectrum, GroupVariant};
use toledo_core::{validate_signature, Rational, SeifertSignature, SpectrumReport, VerticalDivisor};

fn sig(m: &[i64]) -> SeifertSignature {
    validate_signature(m, None).unwrap()
}

fn small() -> Vec<SeifertSignature> {
    [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5], &[2, 5, 7], &[3, 5, 7], &[2, 3, 5, 7]]
        .iter()
        .map(|m| sig(m))
        .collect()
}

#[test]
fn structural_properties() {
    for s in small() {
        let u = toledo_spectrum(&s, GroupVariant::U21).unwrap();
        let p = toledo_spectrum(&s, GroupVariant::PU21).unwrap();
        assert!(u.self_check(true).is_empty(), "{s}: {:?}", u.self_check(true));
        assert!(p.self_check(true).is_empty(), "{s}: {:?}", p.self_check(true));
        let uv = u.value_set();
        assert!(p.value_set().iter().all(|v| uv.contains(v)), "{s}");
        assert!(uv.contains(&Rational::zero()));
        assert!(u.margin_check_passed && p.margin_check_passed);
    }
}

fn in_pool(threads: usize, s: &SeifertSignature) -> SpectrumReport {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| toledo_spectrum(s, GroupVariant::U21).unwrap())
}

#[test]
fn thread_count_does_not_change_reports() {
    for s in [sig(&[3, 4, 5]), sig(&[2, 3, 5, 7])] {
        assert_eq!(in_pool(1, &s), in_pool(4, &s));
    }
}

#[test]
fn margin_holds_for_wider_deltas() {
    for s in small() {
        for delta in [1, 3, 6] {
            assert!(completeness_margin_check(&s, delta).unwrap(), "{s} delta={delta}");
        }
    }
}

#[test]
fn reducible_control_over_5_7_9_11() {
    let s = sig(&[5, 7, 9, 11]);
    let b = VerticalDivisor::parse(&s, "-2:4,6,4,5").unwrap();
    assert!(check_reducible_ternary(&b).ok);
    assert_eq!(b.a_value(), Rational::new(1927, 3465));
    let reducible = enumerate_family(&s, Family::ReducibleTernary).unwrap();
    assert!(reducible.iter().any(|w| w.b_divisor() == b));
}
