//! Lévy triplets, characteristic exponents and decoherence factors.

mod audit;
mod condition;
mod exponent;
mod triplet;

pub use audit::{cf_property_audit, cf_property_audit_with_tol, AuditReport};
pub use condition::{levy_condition_check, Condition, LevyReport};
pub use exponent::{
    build_exponent, build_exponent_numeric, cf_at_time, eval_exponent, ActiveTerms, CharacteristicExponent,
    DecoherenceFactor,
};
pub use triplet::{ComplexFn, JumpWeight, LevyTriplet, RealFn};
