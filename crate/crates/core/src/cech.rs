//! Linear-algebra oracle for the extension criterion.
//!
//! Sections of the twisted sub-bundle are coefficient vectors `s_0..s_{d1}`,
//! first cohomology classes live on window exponents `d3 < j < 0`, and the
//! coboundary multiplies by the extension class
//! `sigma = sigma_{-1} w^{-1} + ... + sigma_{d2+1} w^{d2+1}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaVector {
    d2: i64,
    /// `coeffs[t]` is `sigma_{-1-t}`.
    coeffs: Vec<Rational>,
    certified: bool,
}

impl SigmaVector {
    /// An uncertified vector; `coeffs` lists `sigma_{-1}, sigma_{-2}, ...`.
    pub fn new(d2: i64, coeffs: Vec<Rational>) -> Result<Self> {
        if d2 > -2 {
            return Err(Error::BadDegree(d2));
        }
        let expected = (-d2 - 1) as usize;
        if coeffs.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(SigmaVector {
            d2,
            coeffs,
            certified: false,
        })
    }

    pub fn from_integers(d2: i64, coeffs: &[i64]) -> Result<Self> {
        Self::new(d2, coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn zero(d2: i64) -> Result<Self> {
        Self::new(d2, vec![Rational::zero(); (-d2 - 1).max(0) as usize])
    }

    pub fn d2(&self) -> i64 {
        self.d2
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// `sigma_t`, zero outside `d2+1 <= t <= -1`.
    pub fn at(&self, t: i64) -> Rational {
        if t <= -1 && t > self.d2 {
            self.coeffs[(-1 - t) as usize].clone()
        } else {
            Rational::zero()
        }
    }

    /// Multiplies every coefficient by `k`; certification survives when
    /// `k != 0`, since rank is scale invariant.
    pub fn scaled(&self, k: &Rational) -> SigmaVector {
        SigmaVector {
            d2: self.d2,
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
            certified: self.certified && !k.is_zero(),
        }
    }

    /// Checks every square block the criterion relies on: for each
    /// `l1 < -d2-1` the bottom `(l1+1) x (l1+1)` block of `Theta(l1, -l1-2)`.
    /// Every matrix allowed by the predicate contains one of these as its
    /// bottom rows.
    pub fn blocks_nonsingular(&self) -> bool {
        square_blocks_nonsingular(self, self.coeffs.len())
    }
}

fn square_blocks_nonsingular(sigma: &SigmaVector, upto: usize) -> bool {
    (0..upto as i64).all(|l1| {
        let theta = theta_matrix(sigma, l1, -l1 - 2).expect("valid shape");
        rank(&theta.entries) == (l1 + 1) as usize
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaMatrix {
    pub d1: i64,
    pub d3: i64,
    /// Row `r` is output exponent `j = d3 + 1 + r`; column `i` is `s_i`.
    pub entries: Vec<Vec<Rational>>,
}

impl ThetaMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        (self.d1 + 1) as usize
    }

    pub fn entry(&self, j: i64, i: i64) -> &Rational {
        &self.entries[(j - self.d3 - 1) as usize][i as usize]
    }
}

pub fn theta_matrix(sigma: &SigmaVector, d1: i64, d3: i64) -> Result<ThetaMatrix> {
    if d1 < 0 || d3 > -2 {
        return Err(Error::BadShape { d1, d3 });
    }
    let entries = (d3 + 1..=-1)
        .map(|j| (0..=d1).map(|i| sigma.at(j - i)).collect())
        .collect();
    Ok(ThetaMatrix { d1, d3, entries })
}

/// Rank by exact Gaussian elimination.
pub fn rank(matrix: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = matrix.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].checked_div(&pivot).expect("nonzero pivot");
            for k in c..cols {
                let delta = &factor * &m[r][k];
                m[i][k] = &m[i][k] - &delta;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

pub fn delta_injective(sigma: &SigmaVector, d1: i64, d3: i64) -> Result<bool> {
    let theta = theta_matrix(sigma, d1, d3)?;
    Ok(rank(&theta.entries) == theta.cols())
}

/// Dimension of the kernel of the coboundary, which is `h^0` of the twisted
/// extension when the sub-line-bundle has no sections.
pub fn h0_extension_twist(sigma: &SigmaVector, d1: i64, d3: i64) -> Result<u64> {
    let theta = theta_matrix(sigma, d1, d3)?;
    Ok((theta.cols() - rank(&theta.entries)) as u64)
}

/// The combinatorial criterion `d1 + 1 <= min(-d2 - 1, -d3 - 1)`.
pub fn injectivity_predicate(d1: i64, d2: i64, d3: i64) -> bool {
    d1 + 1 <= (-d2 - 1).min(-d3 - 1)
}

/// Inductive integer sweep: `sigma_{-1} = 1`, then each further coefficient
/// is the least positive integer keeping every square block seen so far
/// nonsingular (later coefficients held at zero). The last step sees the
/// full vector, so its acceptance certifies the result.
pub fn construct_generic_sigma(d2: i64) -> Result<SigmaVector> {
    if d2 > -2 {
        return Err(Error::BadDegree(d2));
    }
    let len = (-d2 - 1) as usize;
    let budget = 10 * (d2 * d2) as usize;
    let mut tried = 0usize;
    let mut sigma = SigmaVector::zero(d2)?;
    sigma.coeffs[0] = Rational::one();
    for k in 1..len {
        let mut candidate = 1i64;
        loop {
            tried += 1;
            if tried > budget {
                return Err(Error::SearchExhausted(budget));
            }
            sigma.coeffs[k] = Rational::from(candidate);
            if square_blocks_nonsingular(&sigma, k + 1) {
                break;
            }
            candidate += 1;
        }
    }
    if !sigma.blocks_nonsingular() {
        return Err(Error::SearchExhausted(budget));
    }
    sigma.certified = true;
    Ok(sigma)
}

/// Random integer coefficients in `[-1000, 1000]`, reproducible from `rng`.
pub fn random_sigma(d2: i64, rng: &mut ChaCha8Rng) -> Result<SigmaVector> {
    let len = (-d2 - 1).max(0) as usize;
    let coeffs = (0..len).map(|_| Rational::from(rng.gen_range(-1000i64..=1000))).collect();
    SigmaVector::new(d2, coeffs)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCell {
    pub d1: i64,
    pub d3: i64,
    pub predicate: bool,
    pub injective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanReport {
    pub d2: i64,
    pub sigma: Vec<Rational>,
    pub cells: Vec<ScanCell>,
    pub mismatches: u64,
    pub seed: u64,
    pub random_sigmas: usize,
    /// Cells outside the predicate where some random sigma was injective.
    pub random_necessity_failures: u64,
}

/// Compares exact-rank injectivity with the predicate on
/// `0 <= d1 <= d1_max`, `-d1_max - 3 <= d3 <= -2`.
///
/// A generic cell counts as a mismatch when the verdicts differ. Every cell
/// where the predicate fails is also tried with `random_count` seeded
/// random vectors, none of which may be injective there.
pub fn lemma_equivalence_scan(d2: i64, d1_max: i64, random_count: usize, seed: u64) -> Result<ScanReport> {
    if d1_max < 0 {
        return Err(Error::BadShape { d1: d1_max, d3: -2 });
    }
    let sigma = construct_generic_sigma(d2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let randoms = (0..random_count)
        .map(|_| random_sigma(d2, &mut rng))
        .collect::<Result<Vec<_>>>()?;

    let shapes: Vec<(i64, i64)> = (0..=d1_max)
        .flat_map(|d1| (-d1_max - 3..=-2).rev().map(move |d3| (d1, d3)))
        .collect();
    let results: Vec<(ScanCell, bool)> = shapes
        .into_par_iter()
        .map(|(d1, d3)| {
            let predicate = injectivity_predicate(d1, d2, d3);
            let injective = delta_injective(&sigma, d1, d3).expect("valid shape");
            let random_injective = !predicate
                && randoms
                    .iter()
                    .any(|r| delta_injective(r, d1, d3).expect("valid shape"));
            (
                ScanCell {
                    d1,
                    d3,
                    predicate,
                    injective,
                },
                random_injective,
            )
        })
        .collect();

    let mismatches = results.iter().filter(|(c, _)| c.predicate != c.injective).count() as u64;
    let random_necessity_failures = results.iter().filter(|(_, bad)| *bad).count() as u64;
    Ok(ScanReport {
        d2,
        sigma: sigma.coeffs.clone(),
        cells: results.into_iter().map(|(c, _)| c).collect(),
        mismatches,
        seed,
        random_sigmas: random_count,
        random_necessity_failures,
    })
}

impl ScanReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches == 0 && self.random_necessity_failures == 0
    }
}
