//! Vertical divisor classes `aF + sum a_k F_k` on the elliptic surface.
//!
//! Classes are stored in normal form `0 <= a_k < m_k`, using the relation
//! `m_k F_k ~ F` to carry residues into the fibre coefficient.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{parse_error, Error, Result};
use crate::rational::Rational;
use crate::seifert::SeifertSignature;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VerticalDivisor {
    sig: SeifertSignature,
    f_coeff: i64,
    residues: Vec<u64>,
}

impl VerticalDivisor {
    /// Reduces each raw `a_k` mod `m_k` and carries the quotient into `a`.
    pub fn normalize(sig: &SeifertSignature, f_coeff: i64, raw_residues: &[i64]) -> Result<Self> {
        if raw_residues.len() != sig.n() {
            return Err(Error::LengthMismatch {
                expected: sig.n(),
                got: raw_residues.len(),
            });
        }
        let mut f = f_coeff;
        let mut residues = Vec::with_capacity(sig.n());
        for (&raw, &m) in raw_residues.iter().zip(sig.multiplicities()) {
            let m = m as i64;
            let (q, r) = raw.div_mod_floor(&m);
            f = f.checked_add(q).ok_or(Error::Overflow)?;
            residues.push(r as u64);
        }
        Ok(VerticalDivisor {
            sig: sig.clone(),
            f_coeff: f,
            residues,
        })
    }

    /// Builds a divisor from coefficients already in normal form.
    ///
    /// Callers guarantee `residues[k] < m_k`; checked in debug builds.
    pub(crate) fn from_normalized(sig: &SeifertSignature, f_coeff: i64, residues: Vec<u64>) -> Self {
        debug_assert_eq!(residues.len(), sig.n());
        debug_assert!(residues.iter().zip(sig.multiplicities()).all(|(r, m)| r < m));
        VerticalDivisor {
            sig: sig.clone(),
            f_coeff,
            residues,
        }
    }

    pub fn zero(sig: &SeifertSignature) -> Self {
        Self::from_normalized(sig, 0, vec![0; sig.n()])
    }

    /// Parses the literal `"a:a1,...,an"` and normalizes it.
    pub fn parse(sig: &SeifertSignature, literal: &str) -> Result<Self> {
        let (f, rest) = literal
            .split_once(':')
            .ok_or_else(|| parse_error("divisor", literal, "expected a:a1,...,an"))?;
        let f: i64 = f
            .trim()
            .parse()
            .map_err(|_| parse_error("divisor", literal, "bad fibre coefficient"))?;
        let raw: Vec<i64> = rest
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| parse_error("divisor", literal, format!("bad coefficient {:?}", t.trim())))
            })
            .collect::<Result<_>>()?;
        Self::normalize(sig, f, &raw)
    }

    pub fn signature(&self) -> &SeifertSignature {
        &self.sig
    }

    pub fn f_coeff(&self) -> i64 {
        self.f_coeff
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    fn same_signature(&self, other: &Self) -> Result<()> {
        if self.sig == other.sig {
            Ok(())
        } else {
            Err(Error::SignatureMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_signature(other)?;
        let raw: Vec<i64> = self
            .residues
            .iter()
            .zip(&other.residues)
            .map(|(&x, &y)| x as i64 + y as i64)
            .collect();
        let f = self.f_coeff.checked_add(other.f_coeff).ok_or(Error::Overflow)?;
        Self::normalize(&self.sig, f, &raw)
    }

    pub fn negate(&self) -> Self {
        let raw: Vec<i64> = self.residues.iter().map(|&r| -(r as i64)).collect();
        Self::normalize(&self.sig, -self.f_coeff, &raw).expect("negation of a normalized divisor")
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.negate())
    }

    pub fn scale(&self, k: i64) -> Result<Self> {
        let raw: Vec<i64> = self
            .residues
            .iter()
            .map(|&r| (r as i64).checked_mul(k).ok_or(Error::Overflow))
            .collect::<Result<_>>()?;
        let f = self.f_coeff.checked_mul(k).ok_or(Error::Overflow)?;
        Self::normalize(&self.sig, f, &raw)
    }

    /// The orbifold degree `a + sum a_k / m_k`.
    pub fn a_value(&self) -> Rational {
        let m = self.sig.product();
        let mut numer = BigInt::from(self.f_coeff) * m;
        for (&r, &mk) in self.residues.iter().zip(self.sig.multiplicities()) {
            numer += BigInt::from(r) * (m / BigInt::from(mk));
        }
        Rational::new(numer, m.clone())
    }

    /// `M * a_value` as a machine integer, when `M` fits in an `i64`.
    pub fn scaled_value(&self) -> Option<i128> {
        let m = self.sig.product_i64()? as i128;
        let mut v = self.f_coeff as i128 * m;
        for (&r, &mk) in self.residues.iter().zip(self.sig.multiplicities()) {
            v += r as i128 * (m / mk as i128);
        }
        Some(v)
    }

    /// `(h^0, h^1)` of the line bundle of this class.
    pub fn cohomology_dims(&self) -> (u64, u64) {
        cohomology_dims_for(self.f_coeff)
    }

    /// Dimension of twisted one-forms `h^0(O(-B) ⊗ Ω^1)` when this class is `B`.
    pub fn twisted_one_form_h0(&self) -> u64 {
        (-2 - self.f_coeff).max(0) as u64
    }

    /// Existence predicate for a nonzero map from this class into `Ω^1`.
    pub fn admits_twisted_one_form(&self) -> bool {
        self.f_coeff <= -2
    }

    /// Raw coefficientwise sum with `other`, without normalizing.
    pub fn pair_sum(&self, other: &Self) -> Result<PairSum> {
        self.same_signature(other)?;
        Ok(PairSum {
            total: self.f_coeff + other.f_coeff,
            residues: self
                .residues
                .iter()
                .zip(&other.residues)
                .map(|(&x, &y)| x as i64 + y as i64)
                .collect(),
        })
    }

    pub fn to_literal(&self) -> String {
        let rs: Vec<String> = self.residues.iter().map(u64::to_string).collect();
        format!("{}:{}", self.f_coeff, rs.join(","))
    }

    /// Lexicographic order on `(a; a_1, ..., a_n)`.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.f_coeff, &self.residues).cmp(&(other.f_coeff, &other.residues))
    }
}

impl fmt::Display for VerticalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl fmt::Debug for VerticalDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) over ({})", self.to_literal(), self.sig)
    }
}

pub fn cohomology_dims_for(f_coeff: i64) -> (u64, u64) {
    let h0 = (f_coeff + 1).max(0);
    let h1 = f_coeff.max(-f_coeff - 1);
    (h0 as u64, h1 as u64)
}

/// The canonical class `-F + sum (m_k - 1) F_k`.
pub fn canonical_divisor(sig: &SeifertSignature) -> VerticalDivisor {
    VerticalDivisor::from_normalized(sig, -1, sig.multiplicities().iter().map(|m| m - 1).collect())
}

/// Unnormalized coefficients `(t; t_1, ..., t_n)`, typically `a + b` and
/// `a_k + b_k` for a pair of normalized divisors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairSum {
    pub total: i64,
    pub residues: Vec<i64>,
}

impl PairSum {
    pub fn new(total: i64, residues: Vec<i64>) -> Self {
        PairSum { total, residues }
    }

    /// Parses `"t:t1,...,tn"` without normalizing.
    pub fn parse(literal: &str) -> Result<Self> {
        let (t, rest) = literal
            .split_once(':')
            .ok_or_else(|| parse_error("pair sum", literal, "expected t:t1,...,tn"))?;
        let total = t
            .trim()
            .parse()
            .map_err(|_| parse_error("pair sum", literal, "bad fibre coefficient"))?;
        let residues = rest
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| parse_error("pair sum", literal, format!("bad coefficient {:?}", x.trim())))
            })
            .collect::<Result<_>>()?;
        Ok(PairSum { total, residues })
    }

    fn check_len(&self, sig: &SeifertSignature) -> Result<()> {
        if self.residues.len() == sig.n() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: sig.n(),
                got: self.residues.len(),
            })
        }
    }

    pub fn value(&self, sig: &SeifertSignature) -> Result<Rational> {
        self.check_len(sig)?;
        let m = sig.product();
        let mut numer = BigInt::from(self.total) * m;
        for (&r, &mk) in self.residues.iter().zip(sig.multiplicities()) {
            numer += BigInt::from(r) * (m / BigInt::from(mk));
        }
        Ok(Rational::new(numer, m.clone()))
    }

    pub fn to_literal(&self) -> String {
        let rs: Vec<String> = self.residues.iter().map(i64::to_string).collect();
        format!("{}:{}", self.total, rs.join(","))
    }
}

/// Integers `(y; y_k; s_k)` with `3y + sum s_k = t` and
/// `3 y_k - m_k s_k = t_k`: the class `(t; t_k)` is three times `(y; y_k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarCertificate {
    pub y: i64,
    pub y_res: Vec<u64>,
    pub s: Vec<i64>,
}

impl StarCertificate {
    pub fn verify(&self, sig: &SeifertSignature, sum: &PairSum) -> bool {
        let n = sig.n();
        if self.y_res.len() != n || self.s.len() != n || sum.residues.len() != n {
            return false;
        }
        let s_total: i64 = self.s.iter().sum();
        if 3 * self.y + s_total != sum.total {
            return false;
        }
        (0..n).all(|k| {
            let m = sig.m(k) as i64;
            let y = self.y_res[k] as i64;
            y < m && 3 * y - m * self.s[k] == sum.residues[k]
        })
    }
}

/// Solutions `y in [0, m)` of `3y ≡ t (mod m)`.
fn cube_root_residues(t: i64, m: u64) -> Vec<u64> {
    let mi = m as i64;
    if m % 3 != 0 {
        // 3 is invertible mod m
        let inv = modular_inverse(3, mi);
        vec![(t.rem_euclid(mi) as i128 * inv as i128).rem_euclid(mi as i128) as u64]
    } else if t.rem_euclid(3) != 0 {
        Vec::new()
    } else {
        let step = m / 3;
        let base = (t / 3).rem_euclid(step as i64) as u64;
        vec![base, base + step, base + 2 * step]
    }
}

fn modular_inverse(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Certificate for condition (★) on a raw pair sum, or `None`.
///
/// Each `y_k` is a solution of `3 y_k ≡ t_k (mod m_k)`; at most one `m_k`
/// is divisible by 3, and only there do we choose among three roots.
pub fn star_certificate(sig: &SeifertSignature, sum: &PairSum) -> Result<Option<StarCertificate>> {
    sum.check_len(sig)?;
    let mut choices: Vec<Vec<u64>> = Vec::with_capacity(sig.n());
    for (&t, &m) in sum.residues.iter().zip(sig.multiplicities()) {
        let roots = cube_root_residues(t, m);
        if roots.is_empty() {
            return Ok(None);
        }
        choices.push(roots);
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let y_res: Vec<u64> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
        let s: Vec<i64> = y_res
            .iter()
            .zip(&sum.residues)
            .zip(sig.multiplicities())
            .map(|((&y, &t), &m)| (3 * y as i64 - t) / m as i64)
            .collect();
        let rest = sum.total - s.iter().sum::<i64>();
        if rest.rem_euclid(3) == 0 {
            return Ok(Some(StarCertificate { y: rest / 3, y_res, s }));
        }
        // odometer over the root choices
        let mut k = 0;
        loop {
            if k == idx.len() {
                return Ok(None);
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Witness `(y; y_1, ..., y_n)` for the floor form of (★).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorWitness {
    pub y: i64,
    pub y_res: Vec<u64>,
}

impl FloorWitness {
    /// Checks `3y + sum ⌊3y_k/m_k⌋ = t` and `3y_k - ⌊3y_k/m_k⌋ m_k = t_k`
    /// against a normalized class `(t; t_k)`.
    pub fn verify(&self, class: &VerticalDivisor) -> bool {
        let sig = class.signature();
        if self.y_res.len() != sig.n() {
            return false;
        }
        let mut total = 3 * self.y;
        for k in 0..sig.n() {
            let m = sig.m(k);
            let y = self.y_res[k];
            if y >= m {
                return false;
            }
            let q = 3 * y / m;
            if 3 * y - q * m != class.residues()[k] {
                return false;
            }
            total += q as i64;
        }
        total == class.f_coeff()
    }
}

/// Floor form of (★), found by exhaustive search.
///
/// The residues `3 y_k mod m_k` are below `m_k`, so the search runs on the
/// normalized class of the pair sum. `y` is scanned over a window around
/// `(t - sum ⌊3y_k/m_k⌋) / 3`, each floor lying in `[0, 2]`.
pub fn star_certificate_floorform(sig: &SeifertSignature, sum: &PairSum) -> Result<Option<FloorWitness>> {
    let class = VerticalDivisor::normalize(sig, sum.total, &sum.residues)?;
    let t = class.f_coeff();
    let n = sig.n() as i64;
    let y_lo = Integer::div_floor(&(t - 2 * n), &3) - 1;
    let y_hi = -Integer::div_floor(&(-t), &3) + 1;
    // only y_k meeting the residue equation can appear in a witness
    let mut per_k: Vec<Vec<(u64, i64)>> = Vec::with_capacity(sig.n());
    for k in 0..sig.n() {
        let m = sig.m(k);
        let target = class.residues()[k];
        let opts: Vec<(u64, i64)> = (0..m)
            .filter(|&y| (3 * y) % m == target)
            .map(|y| (y, (3 * y / m) as i64))
            .collect();
        if opts.is_empty() {
            return Ok(None);
        }
        per_k.push(opts);
    }
    for y in y_lo..=y_hi {
        let mut idx = vec![0usize; per_k.len()];
        loop {
            let floors: i64 = idx.iter().zip(&per_k).map(|(&i, o)| o[i].1).sum();
            if 3 * y + floors == t {
                let y_res = idx.iter().zip(&per_k).map(|(&i, o)| o[i].0).collect();
                return Ok(Some(FloorWitness { y, y_res }));
            }
            let mut k = 0;
            let mut done = false;
            loop {
                if k == idx.len() {
                    done = true;
                    break;
                }
                idx[k] += 1;
                if idx[k] < per_k[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if done {
                break;
            }
        }
    }
    Ok(None)
}

/// `3 | M * value`: the class is divisible by 3 in the vertical class group.
pub fn star_divisible(sig: &SeifertSignature, sum: &PairSum) -> Result<bool> {
    let v = sum.value(sig)?;
    let scaled = v * Rational::from_integer(sig.product().clone());
    debug_assert!(scaled.is_integer());
    Ok((scaled.numer() % BigInt::from(3)) == BigInt::from(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seifert::validate_signature;

    fn sig(m: &[i64]) -> SeifertSignature {
        validate_signature(m, None).unwrap()
    }

    fn div(s: &SeifertSignature, lit: &str) -> VerticalDivisor {
        VerticalDivisor::parse(s, lit).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let s = sig(&[2, 3, 11]);
        assert_eq!(VerticalDivisor::normalize(&s, 0, &[2, 0, 0]).unwrap().to_literal(), "1:0,0,0");
        assert_eq!(VerticalDivisor::normalize(&s, -1, &[0, 0, 12]).unwrap().to_literal(), "0:0,0,1");
        assert_eq!(VerticalDivisor::normalize(&s, 0, &[-1, 0, 0]).unwrap().to_literal(), "-1:1,0,0");
        assert_eq!(
            VerticalDivisor::normalize(&s, 0, &[1, 2]),
            Err(Error::LengthMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn group_op_examples() {
        let s = sig(&[2, 3, 11]);
        // (-3; 2,3,11) carries three times
        let sum = div(&s, "-1:1,1,1").add(&div(&s, "-2:1,2,10")).unwrap();
        assert_eq!(sum.to_literal(), "0:0,0,0");
        assert_eq!(sum.a_value(), Rational::new(-5, 66) + Rational::new(5, 66));
        assert_eq!(div(&s, "0:0,1,0").negate().to_literal(), "-1:0,2,0");
        let tripled = div(&s, "-1:0,2,4").scale(3).unwrap();
        assert_eq!(tripled.to_literal(), "0:0,0,1");
        assert_eq!(tripled.a_value(), Rational::new(1, 11));
        assert_eq!(div(&s, "-1:0,2,4").a_value(), Rational::new(1, 33));
        let other = sig(&[2, 3, 7]);
        assert_eq!(
            div(&s, "0:0,0,0").add(&VerticalDivisor::zero(&other)),
            Err(Error::SignatureMismatch)
        );
    }

    #[test]
    fn a_value_examples() {
        let s = sig(&[2, 3, 11]);
        assert_eq!(div(&s, "-2:1,2,10").a_value(), Rational::new(5, 66));
        assert_eq!(div(&s, "0:0,0,0").a_value(), Rational::zero());
        assert_eq!(div(&s, "-1:0,1,7").a_value(), Rational::new(-1, 33));
        assert_eq!(div(&s, "-1:0,1,7").scaled_value(), Some(-2));
    }

    #[test]
    fn cohomology_examples() {
        assert_eq!(cohomology_dims_for(2), (3, 2));
        assert_eq!(cohomology_dims_for(-1), (0, 0));
        assert_eq!(cohomology_dims_for(-3), (0, 2));
        assert_eq!(cohomology_dims_for(0), (1, 0));
    }

    #[test]
    fn canonical_class() {
        assert_eq!(canonical_divisor(&sig(&[2, 3, 11])).to_literal(), "-1:1,2,10");
        assert_eq!(canonical_divisor(&sig(&[2, 3, 7])).to_literal(), "-1:1,2,6");
        assert_eq!(canonical_divisor(&sig(&[5, 7, 9, 11])).cohomology_dims().0, 0);
    }

    #[test]
    fn twisted_one_forms() {
        let s = sig(&[2, 3, 11]);
        let b = div(&s, "-2:1,2,10");
        assert_eq!(b.twisted_one_form_h0(), 0);
        assert!(b.admits_twisted_one_form());
        assert_eq!(div(&s, "-4:0,0,0").twisted_one_form_h0(), 2);
        assert_eq!(div(&s, "0:0,0,0").twisted_one_form_h0(), 0);
        assert!(!div(&s, "-1:1,2,10").admits_twisted_one_form());
    }

    #[test]
    fn star_examples() {
        let s = sig(&[2, 3, 11]);
        let sum = PairSum::new(-3, vec![2, 3, 12]);
        let cert = star_certificate(&s, &sum).unwrap().unwrap();
        assert_eq!(cert, StarCertificate { y: -1, y_res: vec![0, 2, 4], s: vec![-1, 1, 0] });
        assert!(cert.verify(&s, &sum));

        assert_eq!(star_certificate(&s, &PairSum::new(0, vec![0, 1, 0])).unwrap(), None);

        let sum = PairSum::new(-3, vec![1, 3, 17]);
        let cert = star_certificate(&s, &sum).unwrap().unwrap();
        assert_eq!(cert, StarCertificate { y: -1, y_res: vec![1, 1, 2], s: vec![1, 0, -1] });
        assert!(cert.verify(&s, &sum));
    }

    #[test]
    fn floor_form_examples() {
        let s = sig(&[2, 3, 11]);
        let w = star_certificate_floorform(&s, &PairSum::new(-3, vec![2, 3, 12])).unwrap().unwrap();
        assert_eq!(w, FloorWitness { y: -1, y_res: vec![0, 2, 4] });
        assert_eq!(star_certificate_floorform(&s, &PairSum::new(0, vec![0, 1, 0])).unwrap(), None);
        let w = star_certificate_floorform(&s, &PairSum::new(0, vec![0, 0, 0])).unwrap().unwrap();
        assert_eq!(w, FloorWitness { y: 0, y_res: vec![0, 0, 0] });
    }

    #[test]
    fn parse_rejects_garbage() {
        let s = sig(&[2, 3, 11]);
        assert!(VerticalDivisor::parse(&s, "1,2,3").is_err());
        assert!(VerticalDivisor::parse(&s, "x:1,2,3").is_err());
        assert!(VerticalDivisor::parse(&s, "1:1,2").is_err());
        assert_eq!(div(&s, "-2:1,2,10").to_string(), "-2:1,2,10");
    }
}
