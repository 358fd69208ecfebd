//! Bounded-complete enumeration of the family tuples and assembly of the
//! Toledo spectrum.
//!
//! All scans run on scaled integers `M * A`; the value map is injective on
//! normalized divisors, so each scaled value names exactly one class.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisor::{star_certificate, StarCertificate, VerticalDivisor};
use crate::error::{Error, Result};
use crate::families::fast::{self, Scale};
use crate::families::{Family, FamilyWitness};
use crate::rational::Rational;
use crate::seifert::SeifertSignature;

/// Largest residue space (`M = prod m_k`) the enumerator will walk.
pub const MAX_RESIDUE_TUPLES: u128 = 4_000_000;

pub const DEFAULT_WITNESS_CAP: usize = 100;
pub const DEFAULT_MARGIN_DELTA: i64 = 3;

const CHUNKS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupVariant {
    #[serde(rename = "U(2,1)")]
    U21,
    #[serde(rename = "PU(2,1)")]
    PU21,
}

impl fmt::Display for GroupVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupVariant::U21 => "U(2,1)",
            GroupVariant::PU21 => "PU(2,1)",
        })
    }
}

/// Integer windows for the fibre coefficients `a` and `b`; residues always
/// range over `[0, m_k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub family: Family,
    pub a: Option<(i64, i64)>,
    pub b: (i64, i64),
}

impl Bounds {
    pub fn widen(&self, delta: i64) -> Bounds {
        Bounds {
            family: self.family,
            a: self.a.map(|(lo, hi)| (lo - delta, hi + delta)),
            b: (self.b.0 - delta, self.b.1 + delta),
        }
    }
}

/// Windows implied by the family inequalities.
///
/// Ternary: `a >= 2-n` from (ii), `B > 2A` gives `b > 4-3n`, and
/// `A < 2B < 2(n-2)` caps `a`. Binary: `B > 0` gives `b > -n`, and
/// `A in (-B, B/2)` keeps `a` in `[3-2n, n/2]`. Reducible: `0 < B` and
/// `2b + #{..} <= -2` give `-n < b <= -1`.
pub fn enumeration_bounds(sig: &SeifertSignature, family: Family) -> Bounds {
    let n = sig.n() as i64;
    match family {
        Family::StableTernary => Bounds {
            family,
            a: Some((2 - n, 2 * n - 5)),
            b: (4 - 3 * n, -2),
        },
        Family::StableBinary => Bounds {
            family,
            a: Some((3 - 2 * n, (n + 1) / 2)),
            b: (1 - n, -2),
        },
        Family::ReducibleTernary => Bounds {
            family,
            a: None,
            b: (1 - n, -1),
        },
        Family::Trivial => Bounds {
            family,
            a: Some((0, 0)),
            b: (0, 0),
        },
    }
}

/// All residue tuples of a signature in lexicographic order, with the
/// per-tuple data the scans need.
struct ResidueTable {
    n: usize,
    flat: Vec<u64>,
    offset: Vec<i128>,
    nonzero: Vec<u8>,
    upper_half: Vec<u8>,
    max_offset: i128,
}

impl ResidueTable {
    fn new(sig: &SeifertSignature, scale: &Scale) -> Self {
        let n = sig.n();
        let m = sig.multiplicities();
        let total = scale.product as usize;
        let mut flat = Vec::with_capacity(total * n);
        let mut offset = Vec::with_capacity(total);
        let mut nonzero = Vec::with_capacity(total);
        let mut upper_half = Vec::with_capacity(total);
        let mut cur = vec![0u64; n];
        for _ in 0..total {
            flat.extend_from_slice(&cur);
            offset.push(scale.value(0, &cur));
            nonzero.push(cur.iter().filter(|&&r| r != 0).count() as u8);
            upper_half.push(fast::upper_half_count(&cur, m) as u8);
            for k in (0..n).rev() {
                cur[k] += 1;
                if cur[k] < m[k] {
                    break;
                }
                cur[k] = 0;
            }
        }
        let max_offset = offset.iter().copied().max().unwrap_or(0);
        ResidueTable {
            n,
            flat,
            offset,
            nonzero,
            upper_half,
            max_offset,
        }
    }

    fn len(&self) -> usize {
        self.offset.len()
    }

    fn res(&self, i: usize) -> &[u64] {
        &self.flat[i * self.n..(i + 1) * self.n]
    }
}

/// An accepted tuple in scan coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Candidate {
    a_f: i64,
    ia: u32,
    b_f: i64,
    ib: u32,
    alpha: i128,
    beta: i128,
}

/// Shared state for scanning one signature.
pub struct Scanner {
    sig: SeifertSignature,
    scale: Scale,
    table: ResidueTable,
}

impl Scanner {
    pub fn new(sig: &SeifertSignature) -> Result<Self> {
        let product = sig
            .product_i64()
            .filter(|&m| (m as u128) <= MAX_RESIDUE_TUPLES)
            .ok_or_else(|| {
                let size = u128::try_from(sig.product().clone()).unwrap_or(u128::MAX);
                Error::SearchSpaceTooLarge(size)
            })?;
        let scale = Scale::new(sig.multiplicities(), product as i128);
        let table = ResidueTable::new(sig, &scale);
        Ok(Scanner {
            sig: sig.clone(),
            scale,
            table,
        })
    }

    pub fn signature(&self) -> &SeifertSignature {
        &self.sig
    }

    fn divisor(&self, f: i64, idx: u32) -> VerticalDivisor {
        VerticalDivisor::from_normalized(&self.sig, f, self.table.res(idx as usize).to_vec())
    }

    fn witness(&self, family: Family, c: &Candidate) -> FamilyWitness {
        match family {
            Family::StableTernary => FamilyWitness::StableTernary {
                a: self.divisor(c.a_f, c.ia),
                b: self.divisor(c.b_f, c.ib),
            },
            Family::StableBinary => FamilyWitness::StableBinary {
                a: self.divisor(c.a_f, c.ia),
                b: self.divisor(c.b_f, c.ib),
            },
            Family::ReducibleTernary => FamilyWitness::ReducibleTernary {
                b: self.divisor(c.b_f, c.ib),
            },
            Family::Trivial => FamilyWitness::Trivial { sig: self.sig.clone() },
        }
    }

    /// Scans the window in lexicographic order of `(a; a_k; b; b_k)`, split
    /// into contiguous chunks of the outer loop. Chunk results come back in
    /// order, so merging them front to back is deterministic regardless of
    /// how many threads ran.
    fn scan<A, I, V>(&self, bounds: &Bounds, init: I, visit: V) -> Vec<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        V: Fn(&mut A, &Candidate) + Sync,
    {
        let m = self.table.len();
        match bounds.family {
            Family::Trivial => {
                let mut acc = init();
                visit(
                    &mut acc,
                    &Candidate {
                        a_f: 0,
                        ia: 0,
                        b_f: 0,
                        ib: 0,
                        alpha: 0,
                        beta: 0,
                    },
                );
                vec![acc]
            }
            Family::ReducibleTernary => {
                let (lo, hi) = bounds.b;
                let mut acc = init();
                for b_f in lo..=hi {
                    for ib in 0..m {
                        let beta = b_f as i128 * self.scale.product + self.table.offset[ib];
                        if beta > 0 && 2 * b_f + self.table.upper_half[ib] as i64 <= -2 {
                            let c = Candidate {
                                a_f: 0,
                                ia: 0,
                                b_f,
                                ib: ib as u32,
                                alpha: 0,
                                beta,
                            };
                            visit(&mut acc, &c);
                        }
                    }
                }
                vec![acc]
            }
            Family::StableTernary | Family::StableBinary => {
                let (a_lo, a_hi) = bounds.a.expect("pair families carry an a-window");
                if a_hi < a_lo {
                    return vec![init()];
                }
                let outer = (a_hi - a_lo + 1) as usize * m;
                let chunk = outer.div_ceil(CHUNKS).max(1);
                let starts: Vec<usize> = (0..outer).step_by(chunk).collect();
                starts
                    .into_par_iter()
                    .map(|start| {
                        let mut acc = init();
                        for idx in start..(start + chunk).min(outer) {
                            let a_f = a_lo + (idx / m) as i64;
                            let ia = idx % m;
                            match bounds.family {
                                Family::StableTernary => self.ternary_row(bounds, a_f, ia, &mut acc, &visit),
                                _ => self.binary_row(bounds, a_f, ia, &mut acc, &visit),
                            }
                        }
                        acc
                    })
                    .collect()
            }
        }
    }

    fn ternary_row<A, V>(&self, bounds: &Bounds, a_f: i64, ia: usize, acc: &mut A, visit: &V)
    where
        V: Fn(&mut A, &Candidate),
    {
        if a_f + (self.table.nonzero[ia] as i64) < 2 {
            return;
        }
        let big_m = self.scale.product;
        let alpha = a_f as i128 * big_m + self.table.offset[ia];
        let (b_lo, b_hi) = bounds.b;
        for b_f in b_lo..=b_hi.min(-2) {
            let base = b_f as i128 * big_m;
            // both value conditions are monotone in beta
            if !fast::ternary_values_ok(alpha, base + self.table.max_offset) {
                continue;
            }
            let all = fast::ternary_values_ok(alpha, base);
            for ib in 0..self.table.len() {
                let beta = base + self.table.offset[ib];
                if all || fast::ternary_values_ok(alpha, beta) {
                    let c = Candidate {
                        a_f,
                        ia: ia as u32,
                        b_f,
                        ib: ib as u32,
                        alpha,
                        beta,
                    };
                    visit(acc, &c);
                }
            }
        }
    }

    fn binary_row<A, V>(&self, bounds: &Bounds, a_f: i64, ia: usize, acc: &mut A, visit: &V)
    where
        V: Fn(&mut A, &Candidate),
    {
        let big_m = self.scale.product;
        let alpha = a_f as i128 * big_m + self.table.offset[ia];
        let a_res = self.table.res(ia);
        let n = self.table.n as i64;
        let (b_lo, b_hi) = bounds.b;
        for b_f in b_lo..=b_hi.min(-2) {
            let base = b_f as i128 * big_m;
            if !fast::binary_values_ok(alpha, base + self.table.max_offset) {
                continue;
            }
            // d2 = a - b - #{a_k < b_k} lies in [a - b - n, a - b]
            if a_f - b_f - n > -2 {
                continue;
            }
            for ib in 0..self.table.len() {
                let beta = base + self.table.offset[ib];
                if !fast::binary_values_ok(alpha, beta) {
                    continue;
                }
                let b_res = self.table.res(ib);
                let d2 = fast::borrow_difference(a_f, a_res, b_f, b_res);
                if d2 > -2 {
                    continue;
                }
                if fast::binary_condition_iv(&self.scale, a_f, a_res, b_f, b_res, alpha, beta, d2) {
                    let c = Candidate {
                        a_f,
                        ia: ia as u32,
                        b_f,
                        ib: ib as u32,
                        alpha,
                        beta,
                    };
                    visit(acc, &c);
                }
            }
        }
    }

    /// Number of accepted tuples inside `bounds`.
    pub fn count(&self, bounds: &Bounds) -> u64 {
        self.scan(bounds, || 0u64, |acc, _| *acc += 1).into_iter().sum()
    }

    /// Every accepted tuple inside `bounds`, lexicographically ordered.
    pub fn witnesses(&self, bounds: &Bounds) -> Vec<FamilyWitness> {
        let family = bounds.family;
        self.scan(bounds, Vec::new, |acc: &mut Vec<Candidate>, c| acc.push(*c))
            .into_iter()
            .flatten()
            .map(|c| self.witness(family, &c))
            .collect()
    }

    /// Accepted tuples grouped by the scaled Toledo value `M*(A+B)` (or
    /// `M*B`), keeping exact counts and the first `cap` witnesses.
    fn collect_values(&self, bounds: &Bounds, require_star: bool, cap: usize) -> BTreeMap<i128, ValueBucket> {
        let value_of = |c: &Candidate| match bounds.family {
            Family::ReducibleTernary => c.beta,
            _ => c.alpha + c.beta,
        };
        let parts = self.scan(bounds, BTreeMap::new, |acc: &mut BTreeMap<i128, (u64, Vec<Candidate>)>, c| {
            let v = value_of(c);
            if require_star && v.rem_euclid(3) != 0 {
                return;
            }
            let slot = acc.entry(v).or_insert_with(|| (0, Vec::new()));
            slot.0 += 1;
            if slot.1.len() < cap {
                slot.1.push(*c);
            }
        });
        let mut merged: BTreeMap<i128, (u64, Vec<Candidate>)> = BTreeMap::new();
        for part in parts {
            for (v, (count, cands)) in part {
                let slot = merged.entry(v).or_insert_with(|| (0, Vec::new()));
                slot.0 += count;
                let room = cap.saturating_sub(slot.1.len());
                slot.1.extend(cands.into_iter().take(room));
            }
        }
        merged
            .into_iter()
            .map(|(v, (count, cands))| {
                let witnesses = cands.iter().map(|c| self.witness(bounds.family, c)).collect();
                (v, ValueBucket { count, witnesses })
            })
            .collect()
    }
}

struct ValueBucket {
    count: u64,
    witnesses: Vec<FamilyWitness>,
}

pub fn enumerate_family(sig: &SeifertSignature, family: Family) -> Result<Vec<FamilyWitness>> {
    let scanner = Scanner::new(sig)?;
    Ok(scanner.witnesses(&enumeration_bounds(sig, family)))
}

/// Widens every window by `delta` and checks that no new tuple is accepted.
pub fn completeness_margin_check(sig: &SeifertSignature, delta: i64) -> Result<bool> {
    let scanner = Scanner::new(sig)?;
    Ok(margin_check_with(&scanner, delta))
}

fn margin_check_with(scanner: &Scanner, delta: i64) -> bool {
    [Family::StableTernary, Family::StableBinary, Family::ReducibleTernary]
        .into_iter()
        .all(|family| {
            let bounds = enumeration_bounds(scanner.signature(), family);
            scanner.count(&bounds) == scanner.count(&bounds.widen(delta))
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "both")]
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRecord {
    pub witness: FamilyWitness,
    /// Present for the stable families, where (★) is required.
    pub star: Option<StarCertificate>,
}

/// One spectrum value.
///
/// `witnesses` realize `value` directly when `direct_sign` is `Plus` or
/// `Both`; for `Minus` they realize `-value` and `value` comes from the dual
/// bundles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToledoValue {
    pub value: Rational,
    pub witnesses: Vec<WitnessRecord>,
    pub witness_count: u64,
    pub direct_sign: DirectSign,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumReport {
    pub sig: SeifertSignature,
    pub group_variant: GroupVariant,
    pub values: Vec<ToledoValue>,
    pub component_lower_bound: usize,
    pub search_bounds_used: Vec<Bounds>,
    pub margin_delta: i64,
    pub margin_check_passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectrumOptions {
    pub witness_cap: usize,
    pub margin_delta: i64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions {
            witness_cap: DEFAULT_WITNESS_CAP,
            margin_delta: DEFAULT_MARGIN_DELTA,
        }
    }
}

pub fn toledo_spectrum(sig: &SeifertSignature, group: GroupVariant) -> Result<SpectrumReport> {
    toledo_spectrum_with(sig, group, SpectrumOptions::default())
}

pub fn toledo_spectrum_with(
    sig: &SeifertSignature,
    group: GroupVariant,
    options: SpectrumOptions,
) -> Result<SpectrumReport> {
    let scanner = Scanner::new(sig)?;
    let cap = options.witness_cap;
    let mut families = vec![Family::StableTernary, Family::StableBinary];
    if group == GroupVariant::U21 {
        families.push(Family::ReducibleTernary);
        families.push(Family::Trivial);
    }

    // scaled value -> (count, witnesses) over all families, in family order
    let mut direct: BTreeMap<i128, (u64, Vec<WitnessRecord>)> = BTreeMap::new();
    let mut search_bounds_used = Vec::new();
    for &family in &families {
        let bounds = enumeration_bounds(sig, family);
        search_bounds_used.push(bounds);
        for (v, bucket) in scanner.collect_values(&bounds, family.needs_star(), cap) {
            let slot = direct.entry(v).or_insert_with(|| (0, Vec::new()));
            slot.0 += bucket.count;
            for witness in bucket.witnesses {
                if slot.1.len() >= cap {
                    break;
                }
                let star = if family.needs_star() {
                    let cert = star_certificate(sig, &witness.pair_sum())?;
                    debug_assert!(cert.is_some(), "3 | M(A+B) implies a certificate");
                    cert
                } else {
                    None
                };
                slot.1.push(WitnessRecord { witness, star });
            }
        }
    }

    let mut all: Vec<i128> = direct.keys().flat_map(|&v| [v, -v]).collect();
    all.sort_unstable();
    all.dedup();
    let big_m = Rational::from_integer(sig.product().clone());
    let values: Vec<ToledoValue> = all
        .into_iter()
        .map(|v| {
            let plus = direct.get(&v);
            let minus = direct.get(&-v);
            let (direct_sign, source) = match (plus, minus) {
                (Some(p), Some(_)) => (DirectSign::Both, p),
                (Some(p), None) => (DirectSign::Plus, p),
                (None, Some(m)) => (DirectSign::Minus, m),
                (None, None) => unreachable!("value came from the direct map"),
            };
            ToledoValue {
                value: Rational::from(v as i64).checked_div(&big_m).expect("M > 0"),
                witnesses: source.1.clone(),
                witness_count: source.0,
                direct_sign,
            }
        })
        .collect();

    let margin_check_passed = margin_check_with(&scanner, options.margin_delta);
    Ok(SpectrumReport {
        sig: sig.clone(),
        group_variant: group,
        component_lower_bound: values.len(),
        values,
        search_bounds_used,
        margin_delta: options.margin_delta,
        margin_check_passed,
    })
}

impl SpectrumReport {
    pub fn value_set(&self) -> Vec<Rational> {
        self.values.iter().map(|v| v.value.clone()).collect()
    }

    /// Structural checks on an assembled report; returns the problems found.
    ///
    /// Stored witnesses of the ternary and reducible families are re-run
    /// through the exact checks; binary witnesses are re-run only when
    /// `recheck_binary` is set, since the exact binary check scans every
    /// admissible `c`.
    pub fn self_check(&self, recheck_binary: bool) -> Vec<String> {
        let mut problems = Vec::new();
        let big_m = Rational::from_integer(self.sig.product().clone());
        let set = self.value_set();
        if !set.windows(2).all(|w| w[0] < w[1]) {
            problems.push("values are not strictly ascending".to_string());
        }
        for v in &set {
            if set.binary_search(&-v).is_err() {
                problems.push(format!("{v} present but {} missing", -v));
            }
            if !(v * &big_m).is_integer() {
                problems.push(format!("{v}: denominator does not divide M"));
            }
        }
        if self.group_variant == GroupVariant::U21 && set.binary_search(&Rational::zero()).is_err() {
            problems.push("0 missing from U(2,1) spectrum".to_string());
        }
        if self.component_lower_bound != set.len() {
            problems.push("component bound differs from value count".to_string());
        }
        for tv in &self.values {
            let expected = match tv.direct_sign {
                DirectSign::Minus => -&tv.value,
                _ => tv.value.clone(),
            };
            for rec in &tv.witnesses {
                let t = crate::families::toledo_of_witness(&rec.witness);
                if t != expected {
                    problems.push(format!("witness value {t} filed under {}", tv.value));
                }
                let family = rec.witness.family();
                if family.needs_star() {
                    let sum = rec.witness.pair_sum();
                    match &rec.star {
                        Some(cert) if cert.verify(&self.sig, &sum) => {}
                        _ => problems.push(format!("missing or invalid certificate for {}", sum.to_literal())),
                    }
                }
                if family != Family::StableBinary || recheck_binary {
                    match rec.witness.recheck() {
                        Ok(v) if v.ok => {}
                        _ => problems.push(format!("{family} witness fails its check")),
                    }
                }
            }
        }
        problems
    }
}
