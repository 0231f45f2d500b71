//! A decided localisation: the quotient category materialised as an
//! explicit finite category, the quotient functor from the base, and for
//! every morphism of the model an expression in base morphisms and formal
//! inverses so that functors out of the model can be evaluated.

use std::sync::Arc;

use crate::category::{FinCategory, FunctorData, MorphClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Fractions,
    Rewriting,
}

/// One step of an expression: a base morphism, possibly formally inverted.
pub type ExprStep = (usize, bool);

#[derive(Debug, Clone)]
pub struct LocModel {
    pub base: Arc<FinCategory>,
    pub class: MorphClass,
    pub category: Arc<FinCategory>,
    /// Quotient functor base → model.
    pub p: FunctorData,
    pub engine: Engine,
    /// Per model morphism, a witnessing expression in diagrammatic order
    /// (first step applied first).
    pub expr: Vec<Vec<ExprStep>>,
}

impl LocModel {
    /// The two-sided inverse of a model morphism, if it has one.
    pub fn inverse_in_model(&self, m: usize) -> Option<usize> {
        let c = &self.category;
        let mm = c.morphism(m);
        c.hom(mm.dst, mm.src).into_iter().find(|&w| {
            c.compose(w, m) == Some(c.identity_of(mm.src))
                && c.compose(m, w) == Some(c.identity_of(mm.dst))
        })
    }

    pub fn is_iso_in_model(&self, m: usize) -> bool {
        self.inverse_in_model(m).is_some()
    }

    /// Evaluate an expression in base morphisms, starting at the model
    /// object `src`. Inverted steps must be invertible in the model.
    pub fn eval_expr(&self, expr: &[ExprStep], src: usize) -> Result<usize> {
        let mut acc = self.category.identity_of(src);
        for &(base_mor, inverted) in expr {
            let step = if inverted {
                let img = self.p.apply_mor(base_mor);
                self.inverse_in_model(img).ok_or_else(|| {
                    Error::NotInverting(self.base.morphism(base_mor).id.clone())
                })?
            } else {
                self.p.apply_mor(base_mor)
            };
            acc = self.category.compose(step, acc).ok_or_else(|| {
                Error::Invalid(format!(
                    "expression step `{}` is not composable",
                    self.base.morphism(base_mor).id
                ))
            })?;
        }
        Ok(acc)
    }

    /// Model objects carry the base object names; translate an index.
    pub fn model_object(&self, base_obj: usize) -> usize {
        self.p.apply_obj(base_obj)
    }

    /// Two model objects are isomorphic when some morphism between them is
    /// invertible.
    pub fn isomorphic_objects(&self, x: usize, y: usize) -> bool {
        x == y || self.category.hom(x, y).into_iter().any(|m| self.is_iso_in_model(m))
    }
}
