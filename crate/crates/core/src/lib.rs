//! Exact orbifold Toledo invariants of semisimple U(2,1) representations
//! of the base orbifold of a Seifert fibered homology 3-sphere, computed
//! from vertical divisor data on the associated elliptic surface.

pub mod cech;
pub mod divisor;
pub mod error;
pub mod families;
pub mod rational;
pub mod seifert;
pub mod spectrum;

pub use divisor::{
    canonical_divisor, star_certificate, star_certificate_floorform, FloorWitness, PairSum, StarCertificate,
    VerticalDivisor,
};
pub use error::{Error, Result};
pub use families::{
    admissible_c_tuples, check_reducible_ternary, check_stable_binary, check_stable_ternary, derived_quantities,
    toledo_of_witness, ConditionId, DerivedQuantities, Family, FamilyWitness, Verdict,
};
pub use rational::Rational;
pub use seifert::{validate_signature, SeifertSignature};
pub use spectrum::{
    completeness_margin_check, enumerate_family, enumeration_bounds, toledo_spectrum, toledo_spectrum_with, Bounds,
    DirectSign, GroupVariant, SpectrumOptions, SpectrumReport, ToledoValue, WitnessRecord,
};
pub use cech::{
    construct_generic_sigma, delta_injective, h0_extension_twist, injectivity_predicate, lemma_equivalence_scan,
    theta_matrix, ScanCell, ScanReport, SigmaVector, ThetaMatrix,
};
