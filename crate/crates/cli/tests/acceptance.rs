//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use toledo_cli::report::ReportJson;
use toledo_cli::run_with;
use toledo_core::cech::lemma_equivalence_scan;
use toledo_core::divisor::{
    canonical_divisor, cohomology_dims_for, star_certificate, star_certificate_floorform, star_divisible, PairSum,
};
use toledo_core::families::{check_reducible_ternary, FamilyWitness, ResidueTuples};
use toledo_core::spectrum::{completeness_margin_check, toledo_spectrum, GroupVariant};
use toledo_core::{validate_signature, Rational, SeifertSignature, VerticalDivisor};

type Outcome = Result<String, String>;

fn sig(m: &[i64]) -> SeifertSignature {
    validate_signature(m, None).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("toledo").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn spectrum_regression() -> Outcome {
    let start = Instant::now();
    let (code, out, err) = cli(&["enumerate", "--m", "2,3,11", "--group", "u21", "--format", "json"]);
    let elapsed = start.elapsed();
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let report: ReportJson = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let got: Vec<Rational> = report.values.iter().map(|v| v.tau.clone()).collect();
    let want: Vec<Rational> = [(-1, 11), (-1, 22), (0, 1), (1, 22), (1, 11)]
        .into_iter()
        .map(|(p, q)| Rational::new(p, q))
        .collect();
    ensure(got == want, format!("values {got:?}"))?;
    ensure(report.component_lower_bound == 5, "component lower bound")?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok("values {-1/11, -1/22, 0, 1/22, 1/11}, lower bound 5".into())
}

fn example_bundles() -> Outcome {
    let s = sig(&[2, 3, 11]);
    let d = |l: &str| VerticalDivisor::parse(&s, l).unwrap();
    let b = d("-2:1,2,10");
    let bundles = [
        ("V1", FamilyWitness::StableTernary { a: d("-1:1,1,1"), b: b.clone() }, Rational::zero()),
        ("V2", FamilyWitness::Trivial { sig: s.clone() }, Rational::zero()),
        ("V3", FamilyWitness::StableBinary { a: d("-1:0,1,7"), b: b.clone() }, Rational::new(3, 66)),
        ("V4", FamilyWitness::StableTernary { a: d("-1:1,1,2"), b }, Rational::new(6, 66)),
    ];
    for (name, w, tau) in &bundles {
        let verdict = w.recheck().map_err(|e| e.to_string())?;
        ensure(verdict.ok, format!("{name} fails {:?}", verdict.failed_conditions))?;
        ensure(toledo_core::families::toledo_of_witness(w) == *tau, format!("{name} value"))?;
        let sum = w.pair_sum();
        let cert = star_certificate(&s, &sum).map_err(|e| e.to_string())?;
        let cert = cert.ok_or(format!("{name} has no certificate"))?;
        ensure(cert.verify(&s, &sum), format!("{name} certificate does not verify"))?;
        // the defining identities, spelled out
        let lhs: i64 = 3 * cert.y + cert.s.iter().sum::<i64>();
        ensure(lhs == sum.total, format!("{name}: 3y + sum s != a + b"))?;
        for k in 0..s.n() {
            let m = s.m(k) as i64;
            ensure(3 * cert.y_res[k] as i64 - m * cert.s[k] == sum.residues[k], format!("{name}: residue {k}"))?;
        }
    }
    Ok("V1, V4 stable ternary; V2 trivial; V3 stable binary; certificates verify".into())
}

fn cohomology_table() -> Outcome {
    for a in -6i64..=6 {
        let (h0, h1) = cohomology_dims_for(a);
        ensure(h0 as i64 == (a + 1).max(0) && h1 as i64 == a.max(-a - 1), format!("a = {a}"))?;
    }
    ensure(cohomology_dims_for(2) == (3, 2), "a = 2")?;
    ensure(cohomology_dims_for(-1) == (0, 0), "a = -1")?;
    ensure(cohomology_dims_for(-3) == (0, 2), "a = -3")?;
    for m in [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5], &[5, 7, 9, 11]] {
        let s = sig(m);
        ensure(canonical_divisor(&s).cohomology_dims().0 == 0, format!("canonical h0 over {s}"))?;
    }
    Ok("a in [-6,6] matches; canonical h0 = 0 on all four signatures".into())
}

fn star_cross_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0usize;
    for m in [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5]] {
        let s = sig(m);
        let mut tuples: Vec<Vec<i64>> = vec![vec![]];
        for &mk in s.multiplicities() {
            tuples = tuples
                .into_iter()
                .flat_map(|t| (0..=2 * mk as i64 - 2).map(move |r| [t.clone(), vec![r]].concat()))
                .collect();
        }
        for total in -4..=4 {
            for t in &tuples {
                let sum = PairSum::new(total, t.clone());
                let s_form = star_certificate(&s, &sum).map_err(|e| e.to_string())?;
                let floor = star_certificate_floorform(&s, &sum).map_err(|e| e.to_string())?;
                let div = star_divisible(&s, &sum).map_err(|e| e.to_string())?;
                let here = format!("{s} {}", sum.to_literal());
                ensure(s_form.is_some() == div && floor.is_some() == div, format!("disagree at {here}"))?;
                if let Some(c) = s_form {
                    ensure(c.verify(&s, &sum), format!("s-form fails at {here}"))?;
                }
                if let Some(w) = floor {
                    let class = VerticalDivisor::normalize(&s, sum.total, &sum.residues).unwrap();
                    ensure(w.verify(&class), format!("floor form fails at {here}"))?;
                }
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("{checked} pair sums agree across the three tests"))
}

fn cech_equivalence() -> Outcome {
    let start = Instant::now();
    for d2 in (-6..=-2).rev() {
        let r = lemma_equivalence_scan(d2, 8, 20, 2024).map_err(|e| e.to_string())?;
        ensure(r.mismatches == 0, format!("d2 = {d2}: {} mismatches", r.mismatches))?;
        ensure(
            r.random_necessity_failures == 0,
            format!("d2 = {d2}: a random vector was injective outside the predicate"),
        )?;
    }
    let (code, _, err) = cli(&["oracle", "--d2", "-4", "--d1-max", "6", "--seed", "7"]);
    ensure(code == 0, format!("oracle exit {code}: {err}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok("d2 in [-6,-2], d1_max 8, 20 random vectors: zero mismatches".into())
}

fn completeness_margin() -> Outcome {
    for m in [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5], &[5, 7, 9, 11]] {
        let s = sig(m);
        let ok = completeness_margin_check(&s, 3).map_err(|e| e.to_string())?;
        ensure(ok, format!("{s}: widening admits new tuples"))?;
    }
    Ok("delta 3 adds no tuples for (2,3,7), (2,3,11), (3,4,5), (5,7,9,11)".into())
}

fn structural_properties() -> Outcome {
    for m in [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5], &[5, 7, 9, 11]] {
        let s = sig(m);
        let u = toledo_spectrum(&s, GroupVariant::U21).map_err(|e| e.to_string())?;
        let p = toledo_spectrum(&s, GroupVariant::PU21).map_err(|e| e.to_string())?;
        let uv: BTreeSet<Rational> = u.value_set().into_iter().collect();
        ensure(uv.iter().all(|v| uv.contains(&-v)), format!("{s}: not symmetric"))?;
        ensure(uv.contains(&Rational::zero()), format!("{s}: 0 missing"))?;
        ensure(p.value_set().iter().all(|v| uv.contains(v)), format!("{s}: PU(2,1) not inside U(2,1)"))?;
    }
    for m in [&[2i64, 3, 7][..], &[2, 3, 11], &[3, 4, 5]] {
        let s = sig(m);
        let mut seen = BTreeSet::new();
        for f in -4..=4 {
            for res in ResidueTuples::new(&s) {
                let raw: Vec<i64> = res.iter().map(|&r| r as i64).collect();
                let d = VerticalDivisor::normalize(&s, f, &raw).unwrap();
                ensure(seen.insert(d.a_value()), format!("{s}: value of {d} repeats"))?;
            }
        }
    }
    for m in ["2,3,11", "3,4,5", "2,3,5,7"] {
        let one = cli(&["enumerate", "--m", m, "--format", "json", "--jobs", "1"]);
        let four = cli(&["enumerate", "--m", m, "--format", "json", "--jobs", "4"]);
        ensure(one.0 == 0 && four.0 == 0, format!("{m}: enumerate failed"))?;
        ensure(one.1 == four.1, format!("{m}: --jobs 1 and --jobs 4 differ"))?;
    }
    Ok("symmetry, zero, PU(2,1) inside U(2,1), injectivity, --jobs determinism".into())
}

fn reducible_control() -> Outcome {
    let s = sig(&[5, 7, 9, 11]);
    let b = VerticalDivisor::parse(&s, "-2:4,6,4,5").map_err(|e| e.to_string())?;
    ensure(check_reducible_ternary(&b).ok, "check rejects the tuple")?;
    let tau = Rational::new(1927, 3465);
    ensure(b.a_value() == tau, format!("B = {}", b.a_value()))?;
    let u = toledo_spectrum(&s, GroupVariant::U21).map_err(|e| e.to_string())?;
    let values = u.value_set();
    ensure(values.contains(&tau) && values.contains(&-&tau), "value missing from spectrum")?;
    Ok(format!("B = 1927/3465 accepted; +/- present among {} values", values.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("(2,3,11) spectrum regression", spectrum_regression),
        ("example bundle verdicts", example_bundles),
        ("cohomology formula table", cohomology_table),
        ("star cross-oracle", star_cross_oracle),
        ("Cech oracle equivalence", cech_equivalence),
        ("completeness margin", completeness_margin),
        ("structural properties", structural_properties),
        ("reducible-ternary positive control", reducible_control),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
