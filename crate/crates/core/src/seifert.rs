//! Seifert/orbifold input data: the cone-point multiplicities of the base
//! orbifold and the optional Seifert twisting integers.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{parse_error, Error, Result};

#[derive(Debug, PartialEq, Eq, Hash)]
struct SignatureData {
    m: Vec<u64>,
    product: BigInt,
    twists: Option<Vec<i64>>,
}

/// Validated multiplicities `m_1, ..., m_n` of the multiple fibres.
///
/// Cheap to clone; divisors keep a handle to the signature they live over.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SeifertSignature(Arc<SignatureData>);

impl SeifertSignature {
    /// Checks `m_k >= 2`, pairwise coprimality, `n >= 3` and the `{2,3,5}`
    /// exclusion. Twists are stored as given.
    pub fn validate(raw_m: &[i64], raw_twists: Option<&[i64]>) -> Result<Self> {
        if let Some(&bad) = raw_m.iter().find(|&&m| m < 2) {
            return Err(Error::BadMultiplicity(bad));
        }
        let m: Vec<u64> = raw_m.iter().map(|&x| x as u64).collect();
        for (j, &mj) in m.iter().enumerate() {
            for &mk in &m[j + 1..] {
                if mj.gcd(&mk) != 1 {
                    return Err(Error::NotCoprime(mj, mk));
                }
            }
        }
        if m.len() < 3 {
            return Err(Error::TooFewConePoints(m.len()));
        }
        if m.len() == 3 {
            let mut sorted = m.clone();
            sorted.sort_unstable();
            if sorted == [2, 3, 5] {
                return Err(Error::ExcludedTriple);
            }
        }
        let product = m.iter().fold(BigInt::from(1u32), |acc, &x| acc * x);
        Ok(SeifertSignature(Arc::new(SignatureData {
            m,
            product,
            twists: raw_twists.map(<[i64]>::to_vec),
        })))
    }

    pub fn n(&self) -> usize {
        self.0.m.len()
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.0.m
    }

    pub fn m(&self, k: usize) -> u64 {
        self.0.m[k]
    }

    /// `M = m_1 ... m_n`, which is also the lcm.
    pub fn product(&self) -> &BigInt {
        &self.0.product
    }

    /// `M` as a machine integer, when it fits.
    pub fn product_i64(&self) -> Option<i64> {
        self.0.product.to_i64()
    }

    pub fn twists(&self) -> Option<&[i64]> {
        self.0.twists.as_deref()
    }

    pub fn with_twists(&self, twists: Option<Vec<i64>>) -> Self {
        SeifertSignature(Arc::new(SignatureData {
            m: self.0.m.clone(),
            product: self.0.product.clone(),
            twists,
        }))
    }

    pub fn raw_multiplicities(&self) -> Vec<i64> {
        self.0.m.iter().map(|&x| x as i64).collect()
    }

    /// Presentation of the orbifold fundamental group, for display.
    pub fn orbifold_presentation(&self) -> String {
        let gens: Vec<String> = (1..=self.n()).map(|k| format!("u{k}")).collect();
        let powers: Vec<String> = self
            .0
            .m
            .iter()
            .enumerate()
            .map(|(k, m)| format!("u{}^{}", k + 1, m))
            .collect();
        format!(
            "⟨{} | {} = {} = 1⟩",
            gens.join(","),
            powers.join(" = "),
            gens.join("·")
        )
    }
}

impl fmt::Display for SeifertSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms: Vec<String> = self.0.m.iter().map(u64::to_string).collect();
        write!(f, "{}", ms.join(","))?;
        if let Some(t) = &self.0.twists {
            let (c0, rest) = t.split_first().map_or((0, &[][..]), |(a, b)| (*a, b));
            let cs: Vec<String> = rest.iter().map(i64::to_string).collect();
            write!(f, ";{}:{}", c0, cs.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SeifertSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeifertSignature({self})")
    }
}

fn parse_int_list(what: &'static str, whole: &str, s: &str) -> Result<Vec<i64>> {
    if s.trim().is_empty() {
        return Err(parse_error(what, whole, "empty list"));
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| parse_error(what, whole, format!("bad integer {:?}", t.trim())))
        })
        .collect()
}

/// Parses `"2,3,11"` or `"2,3,11;c0:c1,c2,c3"` and validates.
impl FromStr for SeifertSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (ms, twists) = match s.split_once(';') {
            Some((ms, tw)) => (ms, Some(tw)),
            None => (s, None),
        };
        let m = parse_int_list("signature", s, ms)?;
        let twists = match twists {
            None => None,
            Some(tw) => {
                let (c0, cs) = tw
                    .split_once(':')
                    .ok_or_else(|| parse_error("signature", s, "twists need the form c0:c1,...,cn"))?;
                let c0: i64 = c0
                    .trim()
                    .parse()
                    .map_err(|_| parse_error("signature", s, "bad c0"))?;
                let cs = parse_int_list("signature", s, cs)?;
                if cs.len() != m.len() {
                    return Err(parse_error(
                        "signature",
                        s,
                        format!("expected {} twisting integers, got {}", m.len(), cs.len()),
                    ));
                }
                let mut all = vec![c0];
                all.extend(cs);
                Some(all)
            }
        };
        SeifertSignature::validate(&m, twists.as_deref())
    }
}

/// Free-function form of [`SeifertSignature::validate`].
pub fn validate_signature(raw_m: &[i64], raw_twists: Option<&[i64]>) -> Result<SeifertSignature> {
    SeifertSignature::validate(raw_m, raw_twists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    #[test]
    fn accepts_2_3_11() {
        let sig = validate_signature(&[2, 3, 11], None).unwrap();
        assert_eq!(sig.n(), 3);
        assert_eq!(sig.product(), &BigInt::from(66));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(validate_signature(&[2, 3, 5], None), Err(Error::ExcludedTriple));
        assert_eq!(validate_signature(&[5, 2, 3], None), Err(Error::ExcludedTriple));
        assert_eq!(validate_signature(&[2, 4, 5], None), Err(Error::NotCoprime(2, 4)));
        assert_eq!(validate_signature(&[2, 3], None), Err(Error::TooFewConePoints(2)));
        assert_eq!(validate_signature(&[1, 3, 7], None), Err(Error::BadMultiplicity(1)));
        assert_eq!(validate_signature(&[], None), Err(Error::TooFewConePoints(0)));
        assert!(validate_signature(&[2, 3, 5, 7], None).is_ok());
    }

    #[test]
    fn presentation_text() {
        let sig = validate_signature(&[2, 3, 11], None).unwrap();
        assert_eq!(
            sig.orbifold_presentation(),
            "⟨u1,u2,u3 | u1^2 = u2^3 = u3^11 = u1·u2·u3 = 1⟩"
        );
        let sig = validate_signature(&[2, 3, 7], None).unwrap();
        assert_eq!(
            sig.orbifold_presentation(),
            "⟨u1,u2,u3 | u1^2 = u2^3 = u3^7 = u1·u2·u3 = 1⟩"
        );
        let sig = validate_signature(&[5, 7, 9, 11], None).unwrap();
        let p = sig.orbifold_presentation();
        assert!(p.starts_with("⟨u1,u2,u3,u4 |"));
        assert_eq!(p.matches(" = ").count(), 5);
    }

    #[test]
    fn literal_parsing_with_twists() {
        let sig: SeifertSignature = "2,3,11;-1:1,1,2".parse().unwrap();
        assert_eq!(sig.twists(), Some(&[-1, 1, 1, 2][..]));
        assert_eq!(sig.to_string(), "2,3,11;-1:1,1,2");
        assert!("2,3,x".parse::<SeifertSignature>().is_err());
        assert!("2,3,11;1:1".parse::<SeifertSignature>().is_err());
    }

    #[test]
    fn large_signature_without_overflow() {
        let m: Vec<i64> = vec![9973, 9967, 9949, 9941, 9931, 9929, 9923, 9907, 9901, 9887, 9883, 9871];
        let sig = validate_signature(&m, None).unwrap();
        let lcm = m.iter().fold(BigInt::from(1), |acc, &x| acc.lcm(&BigInt::from(x)));
        assert_eq!(sig.product(), &lcm);
        assert!(sig.product_i64().is_none());
    }
}
