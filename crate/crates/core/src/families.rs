//! Membership tests for the four Higgs-bundle families: stable ternary,
//! stable binary (image of rank one), reducible ternary, and trivial.
//!
//! The checks here work on exact rationals and report every violated
//! condition. [`fast`] holds scaled-integer versions used by the
//! enumerator; tests pin them to these checks.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::divisor::{PairSum, VerticalDivisor};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::seifert::SeifertSignature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    StableTernary,
    StableBinary,
    ReducibleTernary,
    Trivial,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::StableTernary => "stable-ternary",
            Family::StableBinary => "stable-binary",
            Family::ReducibleTernary => "reducible-ternary",
            Family::Trivial => "trivial",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        [
            Family::StableTernary,
            Family::StableBinary,
            Family::ReducibleTernary,
            Family::Trivial,
        ]
        .into_iter()
        .find(|f| f.label() == s)
    }

    /// Whether a tuple of this family contributes only when (★) holds.
    pub fn needs_star(self) -> bool {
        matches!(self, Family::StableTernary | Family::StableBinary)
    }

    pub fn conditions(self) -> &'static [ConditionId] {
        use ConditionId::*;
        match self {
            Family::StableTernary => &[TernI, TernII, TernIII, TernIV],
            Family::StableBinary => &[BinI, BinII, BinIII, BinIV],
            Family::ReducibleTernary => &[RedTernI, RedTernII],
            Family::Trivial => &[],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Stable identifiers for the numbered conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConditionId {
    TernI,
    TernII,
    TernIII,
    TernIV,
    BinI,
    BinII,
    BinIII,
    BinIV,
    RedTernI,
    RedTernII,
}

impl ConditionId {
    pub fn label(self) -> &'static str {
        match self {
            ConditionId::TernI => "tern.i",
            ConditionId::TernII => "tern.ii",
            ConditionId::TernIII => "tern.iii",
            ConditionId::TernIV => "tern.iv",
            ConditionId::BinI => "bin.i",
            ConditionId::BinII => "bin.ii",
            ConditionId::BinIII => "bin.iii",
            ConditionId::BinIV => "bin.iv",
            ConditionId::RedTernI => "redtern.i",
            ConditionId::RedTernII => "redtern.ii",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ConditionId::TernI => "b<=-2",
            ConditionId::TernII => "a+#{a_k!=0}>=2",
            ConditionId::TernIII => "2A<B",
            ConditionId::TernIV => "A<2B",
            ConditionId::BinI => "-B<A<B/2",
            ConditionId::BinII => "d2<=-2",
            ConditionId::BinIII => "b<=-2",
            ConditionId::BinIV => "d1+1<=min(-d2-1,-d3-1) for admissible c",
            ConditionId::RedTernI => "B>0",
            ConditionId::RedTernII => "2b+#{b_k>=m_k/2}<=-2",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        use ConditionId::*;
        [TernI, TernII, TernIII, TernIV, BinI, BinII, BinIII, BinIV, RedTernI, RedTernII]
            .into_iter()
            .find(|c| c.label() == s)
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label(), self.description())
    }
}

impl Serialize for ConditionId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for ConditionId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ConditionId::from_label(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown condition {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    pub failed_conditions: Vec<ConditionId>,
}

impl Verdict {
    fn from_checks(checks: &[(ConditionId, bool)]) -> Self {
        let failed_conditions: Vec<ConditionId> =
            checks.iter().filter(|(_, holds)| !holds).map(|(id, _)| *id).collect();
        Verdict {
            ok: failed_conditions.is_empty(),
            failed_conditions,
        }
    }
}

/// `A`, `B`, `C` and the borrow-corrected differences `d1`, `d2`, `d3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedQuantities {
    pub a: Rational,
    pub b: Rational,
    pub c: Option<Rational>,
    pub d1: Option<i64>,
    pub d2: i64,
    pub d3: Option<i64>,
}

/// `x - y - #{x_k < y_k}`: the fibre coefficient of the normal form of `x - y`.
pub fn borrow_difference(x: &VerticalDivisor, y: &VerticalDivisor) -> i64 {
    let borrows = x
        .residues()
        .iter()
        .zip(y.residues())
        .filter(|(xk, yk)| xk < yk)
        .count() as i64;
    x.f_coeff() - y.f_coeff() - borrows
}

fn same_sig(a: &VerticalDivisor, b: &VerticalDivisor) -> Result<()> {
    if a.signature() == b.signature() {
        Ok(())
    } else {
        Err(Error::SignatureMismatch)
    }
}

pub fn derived_quantities(
    a: &VerticalDivisor,
    b: &VerticalDivisor,
    c: Option<&VerticalDivisor>,
) -> Result<DerivedQuantities> {
    same_sig(a, b)?;
    if let Some(c) = c {
        same_sig(a, c)?;
    }
    Ok(DerivedQuantities {
        a: a.a_value(),
        b: b.a_value(),
        c: c.map(VerticalDivisor::a_value),
        d1: c.map(|c| borrow_difference(b, c)),
        d2: borrow_difference(a, b),
        d3: c.map(|c| borrow_difference(a, c)),
    })
}

pub fn check_stable_ternary(a: &VerticalDivisor, b: &VerticalDivisor) -> Result<Verdict> {
    same_sig(a, b)?;
    let big_a = a.a_value();
    let big_b = b.a_value();
    let nonzero = a.residues().iter().filter(|&&r| r != 0).count() as i64;
    let two = Rational::from(2);
    Ok(Verdict::from_checks(&[
        (ConditionId::TernI, b.f_coeff() <= -2),
        (ConditionId::TernII, a.f_coeff() + nonzero >= 2),
        (ConditionId::TernIII, &two * &big_a < big_b),
        (ConditionId::TernIV, big_a < &two * &big_b),
    ]))
}

/// Every `c` with `0 <= c_k < m_k`, `d1 >= 0` and `C >= (2/3)(A+B)`.
///
/// `d1 >= 0` forces `c <= b`; `C < c + n` forces `c > (2/3)(A+B) - n`.
pub fn admissible_c_tuples(a: &VerticalDivisor, b: &VerticalDivisor) -> Result<Vec<VerticalDivisor>> {
    same_sig(a, b)?;
    let sig = a.signature();
    let threshold = Rational::new(2, 3) * (a.a_value() + b.a_value());
    let lo = i64::try_from(threshold.ceil()).map_err(|_| Error::Overflow)? - sig.n() as i64;
    let hi = b.f_coeff();
    let mut out = Vec::new();
    for c in lo..=hi {
        for residues in ResidueTuples::new(sig) {
            let cand = VerticalDivisor::from_normalized(sig, c, residues);
            if borrow_difference(b, &cand) >= 0 && cand.a_value() >= threshold {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

pub fn check_stable_binary(a: &VerticalDivisor, b: &VerticalDivisor) -> Result<Verdict> {
    same_sig(a, b)?;
    let big_a = a.a_value();
    let big_b = b.a_value();
    let d2 = borrow_difference(a, b);
    let half_b = Rational::new(1, 2) * big_b.clone();
    let cond_i = -&big_b < big_a && big_a < half_b;
    let cond_iv = admissible_c_tuples(a, b)?.iter().all(|c| {
        let d1 = borrow_difference(b, c);
        let d3 = borrow_difference(a, c);
        d1 + 1 <= (-d2 - 1).min(-d3 - 1)
    });
    let verdict = Verdict::from_checks(&[
        (ConditionId::BinI, cond_i),
        (ConditionId::BinII, d2 <= -2),
        (ConditionId::BinIII, b.f_coeff() <= -2),
        (ConditionId::BinIV, cond_iv),
    ]);
    if verdict.ok {
        debug_assert!(big_b.is_positive());
    }
    Ok(verdict)
}

pub fn check_reducible_ternary(b: &VerticalDivisor) -> Verdict {
    let sig = b.signature();
    let upper_half = b
        .residues()
        .iter()
        .zip(sig.multiplicities())
        .filter(|(&bk, &mk)| 2 * bk >= mk)
        .count() as i64;
    Verdict::from_checks(&[
        (ConditionId::RedTernI, b.a_value().is_positive()),
        (ConditionId::RedTernII, 2 * b.f_coeff() + upper_half <= -2),
    ])
}

/// A parameter tuple that passed its family's check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyWitness {
    StableTernary { a: VerticalDivisor, b: VerticalDivisor },
    StableBinary { a: VerticalDivisor, b: VerticalDivisor },
    ReducibleTernary { b: VerticalDivisor },
    Trivial { sig: SeifertSignature },
}

impl FamilyWitness {
    pub fn family(&self) -> Family {
        match self {
            FamilyWitness::StableTernary { .. } => Family::StableTernary,
            FamilyWitness::StableBinary { .. } => Family::StableBinary,
            FamilyWitness::ReducibleTernary { .. } => Family::ReducibleTernary,
            FamilyWitness::Trivial { .. } => Family::Trivial,
        }
    }

    pub fn signature(&self) -> &SeifertSignature {
        match self {
            FamilyWitness::StableTernary { a, .. } | FamilyWitness::StableBinary { a, .. } => a.signature(),
            FamilyWitness::ReducibleTernary { b } => b.signature(),
            FamilyWitness::Trivial { sig } => sig,
        }
    }

    /// The `a`-divisor; zero for the reducible and trivial families.
    pub fn a_divisor(&self) -> VerticalDivisor {
        match self {
            FamilyWitness::StableTernary { a, .. } | FamilyWitness::StableBinary { a, .. } => a.clone(),
            _ => VerticalDivisor::zero(self.signature()),
        }
    }

    /// The `b`-divisor; zero for the trivial family.
    pub fn b_divisor(&self) -> VerticalDivisor {
        match self {
            FamilyWitness::StableTernary { b, .. }
            | FamilyWitness::StableBinary { b, .. }
            | FamilyWitness::ReducibleTernary { b } => b.clone(),
            FamilyWitness::Trivial { sig } => VerticalDivisor::zero(sig),
        }
    }

    pub fn pair_sum(&self) -> PairSum {
        self.a_divisor()
            .pair_sum(&self.b_divisor())
            .expect("witness divisors share a signature")
    }

    /// Re-runs the family check on the stored tuple.
    pub fn recheck(&self) -> Result<Verdict> {
        match self {
            FamilyWitness::StableTernary { a, b } => check_stable_ternary(a, b),
            FamilyWitness::StableBinary { a, b } => check_stable_binary(a, b),
            FamilyWitness::ReducibleTernary { b } => Ok(check_reducible_ternary(b)),
            FamilyWitness::Trivial { .. } => Ok(Verdict {
                ok: true,
                failed_conditions: Vec::new(),
            }),
        }
    }
}

/// Toledo value of a witness, before the ± closure: `A+B`, `B`, or `0`.
pub fn toledo_of_witness(w: &FamilyWitness) -> Rational {
    match w {
        FamilyWitness::StableTernary { a, b } | FamilyWitness::StableBinary { a, b } => a.a_value() + b.a_value(),
        FamilyWitness::ReducibleTernary { b } => b.a_value(),
        FamilyWitness::Trivial { .. } => Rational::zero(),
    }
}

/// Residue tuples `(c_1, ..., c_n)` with `0 <= c_k < m_k`, in lexicographic order.
pub struct ResidueTuples {
    m: Vec<u64>,
    next: Option<Vec<u64>>,
}

impl ResidueTuples {
    pub fn new(sig: &SeifertSignature) -> Self {
        ResidueTuples {
            m: sig.multiplicities().to_vec(),
            next: Some(vec![0; sig.n()]),
        }
    }
}

impl Iterator for ResidueTuples {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for k in (0..succ.len()).rev() {
            succ[k] += 1;
            if succ[k] < self.m[k] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[k] = 0;
        }
        Some(current)
    }
}

/// Scaled-integer predicates. Every rational `X` here is carried as the
/// integer `M * X`.
pub mod fast {
    /// Per-signature constants shared by the predicates.
    #[derive(Debug, Clone)]
    pub struct Scale {
        pub m: Vec<u64>,
        pub product: i128,
        /// `M / m_k`
        pub cofactor: Vec<i128>,
    }

    impl Scale {
        pub fn new(m: &[u64], product: i128) -> Self {
            Scale {
                m: m.to_vec(),
                product,
                cofactor: m.iter().map(|&x| product / x as i128).collect(),
            }
        }

        pub fn value(&self, f: i64, residues: &[u64]) -> i128 {
            let mut v = f as i128 * self.product;
            for (&r, &q) in residues.iter().zip(&self.cofactor) {
                v += r as i128 * q;
            }
            v
        }
    }

    pub fn ternary_a_ok(a_f: i64, a_res: &[u64]) -> bool {
        a_f + a_res.iter().filter(|&&r| r != 0).count() as i64 >= 2
    }

    /// Conditions (iii) and (iv) of the ternary family on scaled values.
    #[inline]
    pub fn ternary_values_ok(alpha: i128, beta: i128) -> bool {
        2 * alpha < beta && alpha < 2 * beta
    }

    #[inline]
    pub fn binary_values_ok(alpha: i128, beta: i128) -> bool {
        -beta < alpha && 2 * alpha < beta
    }

    pub fn borrow_difference(x_f: i64, x_res: &[u64], y_f: i64, y_res: &[u64]) -> i64 {
        x_f - y_f - x_res.iter().zip(y_res).filter(|(x, y)| x < y).count() as i64
    }

    /// Condition (iv) of the binary family.
    ///
    /// For each `k`, `c_k` falls in one of at most three intervals cut by
    /// `a_k` and `b_k`; within an interval the borrow counts are fixed and
    /// the top element maximizes `C`. A dynamic program keeps, for every
    /// pair of borrow totals, the largest reachable `M * (C - c)`. The
    /// smallest `c` meeting `C >= (2/3)(A+B)` then gives the largest `d1`
    /// and `d3`, and both failure conditions are monotone in them.
    pub fn binary_condition_iv(
        scale: &Scale,
        a_f: i64,
        a_res: &[u64],
        b_f: i64,
        b_res: &[u64],
        alpha: i128,
        beta: i128,
        d2: i64,
    ) -> bool {
        let n = scale.m.len();
        let width = n + 1;
        let mut best: Vec<Option<i128>> = vec![None; width * width];
        best[0] = Some(0);
        for k in 0..n {
            let (ak, bk, mk, q) = (a_res[k], b_res[k], scale.m[k], scale.cofactor[k]);
            let lo = ak.min(bk);
            let hi = ak.max(bk);
            let mut options: [(usize, usize, i128); 3] = [(0, 0, lo as i128 * q); 3];
            let mut count = 1;
            if hi > lo {
                options[count] = ((hi > bk) as usize, (hi > ak) as usize, hi as i128 * q);
                count += 1;
            }
            if hi + 1 < mk {
                options[count] = (1, 1, (mk - 1) as i128 * q);
                count += 1;
            }
            let mut next: Vec<Option<i128>> = vec![None; width * width];
            for pb in 0..=k {
                for pa in 0..=k {
                    let Some(s) = best[pb * width + pa] else { continue };
                    for &(db, da, w) in &options[..count] {
                        let slot = &mut next[(pb + db) * width + pa + da];
                        let cand = s + w;
                        if slot.map_or(true, |cur| cand > cur) {
                            *slot = Some(cand);
                        }
                    }
                }
            }
            best = next;
        }
        let target = 2 * (alpha + beta);
        let denom = 3 * scale.product;
        for pb in 0..=n {
            for pa in 0..=n {
                let Some(s) = best[pb * width + pa] else { continue };
                // smallest c with 3 M c + 3 s >= 2 (alpha + beta)
                let num = target - 3 * s;
                let c = num.div_euclid(denom) + (num.rem_euclid(denom) != 0) as i128;
                let d1 = b_f as i128 - c - pb as i128;
                let d3 = a_f as i128 - c - pa as i128;
                if d1 >= 0 && (d1 >= -(d2 as i128) - 1 || d1 + d3 >= -1) {
                    return false;
                }
            }
        }
        true
    }

    pub fn upper_half_count(b_res: &[u64], m: &[u64]) -> i64 {
        b_res.iter().zip(m).filter(|(&b, &mk)| 2 * b >= mk).count() as i64
    }
}
