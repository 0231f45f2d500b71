//! Explicit size budgets for constructed categories. Budgets are always
//! passed as parameters, never read from globals.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeBudget {
    pub max_objects: usize,
    pub max_morphisms: usize,
}

impl Default for SizeBudget {
    fn default() -> Self {
        SizeBudget { max_objects: 10_000, max_morphisms: 10_000 }
    }
}

impl SizeBudget {
    pub fn new(max_objects: usize, max_morphisms: usize) -> Self {
        SizeBudget { max_objects, max_morphisms }
    }
}
