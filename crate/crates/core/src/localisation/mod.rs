//! Localisation of a finite category at a marked class, by two independent
//! engines: an exact span calculus when the fraction axioms hold, and
//! typed-word rewriting with critical-pair completion otherwise. Decided
//! localisations are materialised as finite categories; on top of them sit
//! the equivalence certificate, the extension construction, and a
//! brute-force equivalence oracle.

pub mod certificate;
pub mod fractions;
pub mod kan;
pub mod model;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::category::{identity_name, FinCategory, FunctorData, MorphClass};
use crate::error::Result;
use crate::setup::LocalisationSetup;
use crate::words::{Alphabet, Gen, RewriteBudget, RewriteSystem, Word};

pub use fractions::{fraction_model, hom_fractions, ore_check, OreReport};
pub use model::{Engine, LocModel};

#[derive(Debug, Clone)]
pub struct LocPresentation {
    pub alphabet: Alphabet,
    pub equations: Vec<(Word, Word)>,
    /// Per alphabet generator: underlying base morphism and whether the
    /// generator is its formal inverse.
    pub gen_origin: Vec<(usize, bool)>,
}

/// Generators: every non-identity morphism, plus a formal inverse for each
/// non-identity marked morphism (inverse symbols sort last). Relators: the
/// composition table and the two inverse laws.
pub fn loc_presentation(base: &FinCategory, class: &MorphClass) -> LocPresentation {
    let mut gens = Vec::new();
    let mut gen_origin = Vec::new();
    for m in 0..base.morphism_count() {
        if base.is_identity(m) {
            continue;
        }
        let mm = base.morphism(m);
        gens.push(Gen { name: mm.id.clone(), src: mm.src, dst: mm.dst });
        gen_origin.push((m, false));
    }
    for m in 0..base.morphism_count() {
        if base.is_identity(m) || !class.contains(m) {
            continue;
        }
        let mm = base.morphism(m);
        gens.push(Gen { name: format!("{}~", mm.id), src: mm.dst, dst: mm.src });
        gen_origin.push((m, true));
    }
    let alphabet = Alphabet { objects: base.objects().to_vec(), gens };

    let single = |g: usize| Word { letters: vec![g], src: alphabet.gens[g].src };
    let plain_idx: BTreeMap<usize, usize> = gen_origin
        .iter()
        .enumerate()
        .filter(|(_, &(_, inv))| !inv)
        .map(|(g, &(m, _))| (m, g))
        .collect();
    let inv_idx: BTreeMap<usize, usize> = gen_origin
        .iter()
        .enumerate()
        .filter(|(_, &(_, inv))| inv)
        .map(|(g, &(m, _))| (m, g))
        .collect();

    let mut equations = Vec::new();
    for (g, f) in base.composable_pairs() {
        if base.is_identity(g) || base.is_identity(f) {
            continue;
        }
        let h = base.compose(g, f).expect("total");
        let lhs = single(plain_idx[&f]).then(&single(plain_idx[&g]));
        let rhs = if base.is_identity(h) {
            Word::empty(base.morphism(f).src)
        } else {
            single(plain_idx[&h])
        };
        equations.push((lhs, rhs));
    }
    for (&m, &gi) in &inv_idx {
        let s = plain_idx[&m];
        let mm = base.morphism(m);
        equations.push((single(s).then(&single(gi)), Word::empty(mm.src)));
        equations.push((single(gi).then(&single(s)), Word::empty(mm.dst)));
    }

    LocPresentation { alphabet, equations, gen_origin }
}

pub fn kb_complete(p: &LocPresentation, budget: &RewriteBudget) -> RewriteSystem {
    RewriteSystem::complete_from_equations(p.alphabet.clone(), p.equations.clone(), budget)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocBudget {
    pub rewrite: RewriteBudget,
    pub max_model_morphisms: usize,
    pub max_word_len: usize,
}

impl Default for LocBudget {
    fn default() -> Self {
        LocBudget {
            rewrite: RewriteBudget::default_budget(),
            max_model_morphisms: 10_000,
            max_word_len: 32,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Localised {
    Model(LocModel),
    Undecided { reason: String },
}

impl Localised {
    pub fn model(&self) -> Option<&LocModel> {
        match self {
            Localised::Model(m) => Some(m),
            Localised::Undecided { .. } => None,
        }
    }
}

fn word_name(base: &FinCategory, alpha: &Alphabet, w: &Word) -> String {
    if w.letters.is_empty() {
        identity_name(base.object_id(w.src))
    } else {
        w.letters.iter().rev().map(|&g| alpha.gens[g].name.as_str()).collect::<Vec<_>>().join("*")
    }
}

/// Materialise the localisation through completed rewriting; None when the
/// system does not complete or the model is not finite within budget.
pub fn rewrite_model(
    base: &Arc<FinCategory>,
    class: &MorphClass,
    budget: &LocBudget,
) -> Result<Option<LocModel>> {
    let pres = loc_presentation(base, class);
    let sys = kb_complete(&pres, &budget.rewrite);
    if !sys.complete {
        return Ok(None);
    }

    let mut words: Vec<Word> = Vec::new();
    for o in 0..base.object_count() {
        match sys.irreducible_words_from(o, budget.max_model_morphisms + 1, budget.max_word_len)
        {
            Ok(ws) => words.extend(ws),
            Err(e) if e.is_budget() => return Ok(None),
            Err(e) => return Err(e),
        }
        if words.len() > budget.max_model_morphisms {
            return Ok(None);
        }
    }

    let mut mors = Vec::new();
    let mut expr_by_name: BTreeMap<String, Vec<(usize, bool)>> = BTreeMap::new();
    for w in &words {
        if w.is_empty() {
            continue;
        }
        let name = word_name(base, &pres.alphabet, w);
        mors.push((
            name.clone(),
            base.object_id(w.src).to_string(),
            base.object_id(w.dst(&pres.alphabet)).to_string(),
        ));
        expr_by_name.insert(name, w.letters.iter().map(|&g| pres.gen_origin[g]).collect());
    }
    let mut comps = Vec::new();
    for w1 in &words {
        for w2 in &words {
            if w1.is_empty() || w2.is_empty() || w1.dst(&pres.alphabet) != w2.src {
                continue;
            }
            let h = sys.reduce(&w1.then(w2));
            comps.push((
                word_name(base, &pres.alphabet, w2),
                word_name(base, &pres.alphabet, w1),
                word_name(base, &pres.alphabet, &h),
            ));
        }
    }
    let category = Arc::new(FinCategory::from_parts(base.objects().to_vec(), mors, comps)?);

    let omap: BTreeMap<String, String> =
        base.objects().iter().map(|o| (o.clone(), o.clone())).collect();
    let mut mmap: BTreeMap<String, String> = BTreeMap::new();
    let plain: BTreeMap<usize, usize> = pres
        .gen_origin
        .iter()
        .enumerate()
        .filter(|(_, &(_, inv))| !inv)
        .map(|(g, &(m, _))| (m, g))
        .collect();
    for m in 0..base.morphism_count() {
        if base.is_identity(m) {
            continue;
        }
        let w = sys.reduce(&Word { letters: vec![plain[&m]], src: base.morphism(m).src });
        mmap.insert(base.morphism(m).id.clone(), word_name(base, &pres.alphabet, &w));
    }
    let p = FunctorData::from_maps(base.clone(), category.clone(), &omap, &mmap)?;

    let mut expr = vec![Vec::new(); category.morphism_count()];
    for (name, e) in expr_by_name {
        if let Some(i) = category.morphism_idx(&name) {
            expr[i] = e;
        }
    }

    Ok(Some(LocModel {
        base: base.clone(),
        class: class.clone(),
        category,
        p,
        engine: Engine::Rewriting,
        expr,
    }))
}

/// Compute the localisation, preferring the exact span calculus when its
/// axioms hold.
pub fn localize(
    base: &Arc<FinCategory>,
    class: &MorphClass,
    budget: &LocBudget,
) -> Result<Localised> {
    if ore_check(base, class).holds {
        return Ok(Localised::Model(fraction_model(base, class)?));
    }
    match rewrite_model(base, class, budget)? {
        Some(m) => Ok(Localised::Model(m)),
        None => Ok(Localised::Undecided {
            reason: "fraction axioms fail and rewriting did not complete".into(),
        }),
    }
}

#[derive(Debug, Clone)]
pub struct SaturationResult {
    pub members: MorphClass,
    /// True when computed inside a decided model; otherwise a lower
    /// approximation by closure.
    pub exact: bool,
}

/// The strong saturation: morphisms that become invertible in the
/// localisation.
pub fn saturation(
    base: &Arc<FinCategory>,
    class: &MorphClass,
    budget: &LocBudget,
) -> Result<SaturationResult> {
    match localize(base, class, budget)? {
        Localised::Model(model) => {
            let idxs: Vec<usize> = (0..base.morphism_count())
                .filter(|&m| model.is_iso_in_model(model.p.apply_mor(m)))
                .collect();
            Ok(SaturationResult {
                members: MorphClass::from_indices(base.clone(), &idxs),
                exact: true,
            })
        }
        Localised::Undecided { .. } => {
            // lower bound: marked arrows, isomorphisms, and composites
            let mut members = vec![false; base.morphism_count()];
            for m in 0..base.morphism_count() {
                let mm = base.morphism(m);
                let iso = base.hom(mm.dst, mm.src).into_iter().any(|w| {
                    base.compose(w, m) == Some(base.identity_of(mm.src))
                        && base.compose(m, w) == Some(base.identity_of(mm.dst))
                });
                if iso || class.contains(m) {
                    members[m] = true;
                }
            }
            loop {
                let mut grew = false;
                for (g, f) in base.composable_pairs() {
                    if members[g] && members[f] {
                        let h = base.compose(g, f).expect("total");
                        if !members[h] {
                            members[h] = true;
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            let idxs: Vec<usize> =
                (0..base.morphism_count()).filter(|&m| members[m]).collect();
            Ok(SaturationResult {
                members: MorphClass::from_indices(base.clone(), &idxs),
                exact: false,
            })
        }
    }
}

/// The functor induced on decided localisation models by T.
pub fn induced_functor(
    setup: &LocalisationSetup,
    cm: &LocModel,
    dm: &LocModel,
) -> Result<FunctorData> {
    let mut omap = vec![0usize; cm.category.object_count()];
    for x in 0..cm.category.object_count() {
        // model objects carry the base object names in identical order
        omap[x] = dm.model_object(setup.t.apply_obj(x));
    }
    let mut mmap = vec![0usize; cm.category.morphism_count()];
    for m in 0..cm.category.morphism_count() {
        let src = cm.category.morphism(m).src;
        let mapped: Vec<(usize, bool)> = cm.expr[m]
            .iter()
            .map(|&(b, inv)| (setup.t.apply_mor(b), inv))
            .collect();
        mmap[m] = dm.eval_expr(&mapped, omap[src])?;
    }
    Ok(FunctorData { source: cm.category.clone(), target: dm.category.clone(), omap, mmap })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    Equivalence,
    NotEquivalence { witness: String },
    Undecided { reason: String },
}

/// Direct check that the induced functor on decided models is an
/// equivalence: essential surjectivity plus full faithfulness.
pub fn equivalence_oracle(setup: &LocalisationSetup, budget: &LocBudget) -> Result<EquivalenceVerdict> {
    let cm = match localize(&setup.c, &setup.s, budget)? {
        Localised::Model(m) => m,
        Localised::Undecided { reason } => return Ok(EquivalenceVerdict::Undecided { reason }),
    };
    let dm = match localize(&setup.d, &setup.sprime, budget)? {
        Localised::Model(m) => m,
        Localised::Undecided { reason } => return Ok(EquivalenceVerdict::Undecided { reason }),
    };
    let tbar = induced_functor(setup, &cm, &dm)?;

    for y in 0..dm.category.object_count() {
        let hit = (0..cm.category.object_count())
            .any(|x| dm.isomorphic_objects(tbar.apply_obj(x), y));
        if !hit {
            return Ok(EquivalenceVerdict::NotEquivalence {
                witness: format!(
                    "object `{}` is not in the essential image",
                    dm.category.object_id(y)
                ),
            });
        }
    }

    for x in 0..cm.category.object_count() {
        for y in 0..cm.category.object_count() {
            let hom = cm.category.hom(x, y);
            let mut images: Vec<usize> = hom.iter().map(|&m| tbar.apply_mor(m)).collect();
            images.sort_unstable();
            let before = images.len();
            images.dedup();
            if images.len() != before {
                return Ok(EquivalenceVerdict::NotEquivalence {
                    witness: format!(
                        "not faithful on hom({}, {})",
                        cm.category.object_id(x),
                        cm.category.object_id(y)
                    ),
                });
            }
            let target_hom = dm.category.hom(tbar.apply_obj(x), tbar.apply_obj(y));
            if images.len() != target_hom.len() {
                return Ok(EquivalenceVerdict::NotEquivalence {
                    witness: format!(
                        "not full on hom({}, {})",
                        cm.category.object_id(x),
                        cm.category.object_id(y)
                    ),
                });
            }
        }
    }

    Ok(EquivalenceVerdict::Equivalence)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::validate_category;
    use crate::fixtures;

    #[test]
    fn presentation_with_identities_completes_to_base() {
        let c = fixtures::chain2();
        let s = MorphClass::identities(c.clone());
        let model = rewrite_model(&c, &s, &LocBudget::default()).unwrap().unwrap();
        assert!(validate_category(&model.category).pass());
        assert_eq!(model.category.morphism_count(), c.morphism_count());
    }

    #[test]
    fn arrow_inverted_has_four_normal_forms() {
        let c = fixtures::arrow();
        let s = MorphClass::all(c.clone());
        let model = rewrite_model(&c, &s, &LocBudget::default()).unwrap().unwrap();
        assert_eq!(model.category.morphism_count(), 4);
        let f = c.morphism_idx("f").unwrap();
        assert!(model.is_iso_in_model(model.p.apply_mor(f)));
    }

    #[test]
    fn par_with_both_inverted_is_undecided() {
        // inverting both parallel arrows gives a free loop: infinite model
        let c = fixtures::par();
        let s = MorphClass::all(c.clone());
        match localize(&c, &s, &LocBudget::default()).unwrap() {
            Localised::Undecided { .. } => {}
            Localised::Model(m) => panic!("expected undecided, got {} morphisms", m.category.morphism_count()),
        }
    }

    #[test]
    fn engines_agree_on_hom_cardinalities() {
        // Arrow with everything inverted satisfies Ore and also completes
        let c = fixtures::arrow();
        let s = MorphClass::all(c.clone());
        let frac = fraction_model(&c, &s).unwrap();
        let rw = rewrite_model(&c, &s, &LocBudget::default()).unwrap().unwrap();
        for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                assert_eq!(
                    frac.category.hom(x, y).len(),
                    rw.category.hom(x, y).len(),
                    "hom({x},{y})"
                );
            }
        }
    }

    #[test]
    fn saturation_of_identities_is_isos() {
        let c = fixtures::ind(3);
        let s = MorphClass::identities(c.clone());
        let r = saturation(&c, &s, &LocBudget::default()).unwrap();
        assert!(r.exact);
        // in an indiscrete category everything is invertible already
        assert_eq!(r.members.len(), c.morphism_count());

        let c = fixtures::chain2();
        let s = MorphClass::identities(c.clone());
        let r = saturation(&c, &s, &LocBudget::default()).unwrap();
        assert_eq!(r.members.len(), c.object_count()); // identities only
    }

    #[test]
    fn saturation_of_inverted_arrow_is_everything() {
        let c = fixtures::arrow();
        let s = MorphClass::all(c.clone());
        let r = saturation(&c, &s, &LocBudget::default()).unwrap();
        assert!(r.exact);
        assert_eq!(r.members.len(), c.morphism_count());
    }

    #[test]
    fn oracle_certifies_terminal_inclusion() {
        let setup = fixtures::riou_fix();
        let v = equivalence_oracle(&setup, &LocBudget::default()).unwrap();
        assert_eq!(v, EquivalenceVerdict::Equivalence);
    }

    #[test]
    fn oracle_rejects_point_into_two_points() {
        let setup = fixtures::pt_into_pt_pt();
        match equivalence_oracle(&setup, &LocBudget::default()).unwrap() {
            EquivalenceVerdict::NotEquivalence { witness } => {
                assert!(witness.contains("essential image"), "{witness}");
            }
            v => panic!("expected NotEquivalence, got {v:?}"),
        }
    }

    #[test]
    fn oracle_accepts_identity_setup() {
        let setup = fixtures::identity_setup(fixtures::par());
        let v = equivalence_oracle(&setup, &LocBudget::default()).unwrap();
        assert_eq!(v, EquivalenceVerdict::Equivalence);
    }
}
