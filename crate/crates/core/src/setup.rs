//! The ambient data everything downstream works over: a functor T between
//! two finite categories together with the morphism classes to invert on
//! each side.

use std::sync::Arc;

use crate::budget::SizeBudget;
use crate::category::{
    validate_category, validate_class, validate_functor, FinCategory, FinPoset, FunctorData,
    MorphClass, ValidationReport,
};
use crate::diagram::{functor_category, lift_functor, DiagramCategory};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LocalisationSetup {
    pub c: Arc<FinCategory>,
    pub d: Arc<FinCategory>,
    /// T : C → D
    pub t: FunctorData,
    /// Class to invert in C.
    pub s: MorphClass,
    /// Class to invert in D.
    pub sprime: MorphClass,
}

impl LocalisationSetup {
    pub fn new(
        t: FunctorData,
        s: MorphClass,
        sprime: MorphClass,
    ) -> Result<LocalisationSetup> {
        if s.carrier.as_ref() != t.source.as_ref() {
            return Err(Error::Invalid("class S must live in the source of T".into()));
        }
        if sprime.carrier.as_ref() != t.target.as_ref() {
            return Err(Error::Invalid("class S′ must live in the target of T".into()));
        }
        Ok(LocalisationSetup {
            c: t.source.clone(),
            d: t.target.clone(),
            t,
            s,
            sprime,
        })
    }

    /// Both categories, both classes, the functor, and T(S) ⊆ S′.
    pub fn validate(&self) -> ValidationReport {
        let mut report = validate_category(&self.c);
        report.merge(validate_category(&self.d));
        report.merge(validate_class(&self.s));
        report.merge(validate_class(&self.sprime));
        let fr = validate_functor(&self.t, Some((&self.s, &self.sprime)));
        report.merge(fr.report);
        if fr.maps_class == Some(false) {
            report.push("class-preservation", vec!["T(S) ⊄ S′".into()]);
        }
        report
    }

    /// The induced setup T^E : C^E → D^E with the pointwise classes.
    pub fn lift(&self, shape: &FinPoset, budget: &SizeBudget) -> Result<LiftedSetup> {
        let c_diag = functor_category(self.c.clone(), shape, budget)?;
        let d_diag = functor_category(self.d.clone(), shape, budget)?;
        let t = lift_functor(&self.t, &c_diag, &d_diag)?;
        let s = c_diag.lift_class(&self.s);
        let sprime = d_diag.lift_class(&self.sprime);
        let setup = LocalisationSetup::new(t, s, sprime)?;
        Ok(LiftedSetup { setup, c_diag, d_diag })
    }
}

#[derive(Debug, Clone)]
pub struct LiftedSetup {
    pub setup: LocalisationSetup,
    pub c_diag: DiagramCategory,
    pub d_diag: DiagramCategory,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_setup_validates() {
        let c = fixtures::par();
        let t = FunctorData::identity(c.clone());
        let s = MorphClass::identities(c.clone());
        let sp = MorphClass::identities(c);
        let setup = LocalisationSetup::new(t, s, sp).unwrap();
        assert!(setup.validate().pass());
    }

    #[test]
    fn class_preservation_failure_reported() {
        // T = Id on Arrow, S inverts f but S′ only contains identities
        let c = fixtures::arrow();
        let t = FunctorData::identity(c.clone());
        let s = MorphClass::all(c.clone());
        let sp = MorphClass::identities(c);
        let setup = LocalisationSetup::new(t, s, sp).unwrap();
        let report = setup.validate();
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.law == "class-preservation"));
    }

    #[test]
    fn lift_over_interval() {
        let setup = fixtures::riou_fix();
        let lifted = setup.lift(&FinPoset::chain(1), &SizeBudget::default()).unwrap();
        assert!(lifted.setup.validate().pass());
        // D = Arrow has three objects in D^Δ¹; C = {1} has one
        assert_eq!(lifted.setup.c.object_count(), 1);
        assert_eq!(lifted.setup.d.object_count(), 3);
    }
}
