//! Quivers with real weights 2cos(πm/d): exact arithmetic, mutation,
//! mutation-class enumeration, rank-4 series and geometric realizations.

pub mod canon;
pub mod cyclo;
pub mod document;
pub mod dot;
pub mod error;
pub mod explore;
pub mod quiver;
pub mod rational;
pub mod realization;
pub mod report;
pub mod series;
pub mod tables;

pub use canon::{canonical_form, canonical_labeling, canonical_labelings, CanonicalKey};
pub use cyclo::{minimal_poly, AngleLabel, CycloField, CycloReal};
pub use error::{QmutError, Result};
pub use explore::{
    acyclic_orbits, check_triangle_condition, classify_rank3, explore, extend_classification, find_mutation_path, ClassReport,
    ExploreBudget, NormalForm, Rank3Classification, Rule, Verdict, Witness,
};
pub use quiver::{ChordlessCycle, LabelFailure, Quiver};
pub use rational::Rational;
pub use realization::{
    acute_sign_flip, admissible_sign_assignment, check_admissible, check_compatibility, gram_corank, initial_realization,
    mutate_realization, unrealizable_integer_classes, verify_class_realization, Realization, RealizationReport, SignAssignment,
    UnrealizableClass,
};
