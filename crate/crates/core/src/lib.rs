//! catloc: a workbench for localising finite categories.
//!
//! Builds comma categories and slices, decides low-degree connectivity of
//! nerves with replayable certificates, checks the sufficient-hypothesis
//! sets that make the induced functor on localised categories an
//! equivalence, computes the localisations where decidable (fractions or
//! confluent rewriting) and constructs the equivalence certificate
//! explicitly.

pub mod budget;
pub mod category;
pub mod comma;
pub mod connectivity;
pub mod diagram;
pub mod dsl;
pub mod envelope;
pub mod error;
pub mod fixtures;
pub mod fuzz;
pub mod hypotheses;
pub mod localisation;
pub mod report;
pub mod sat;
pub mod setup;
pub mod words;

pub use category::{
    has_finite_products, opposite, validate_category, validate_class, validate_functor,
    FinCategory, FinPoset, FunctorData, FunctorReport, MorphClass, Morphism, ProductsReport,
    ValidationReport, Violation,
};
pub use error::{Error, Result};
