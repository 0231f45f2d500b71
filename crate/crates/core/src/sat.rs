//! Convenience loader: a category presented by generators and declared
//! composites is closed into a total table by word saturation, or rejected
//! when the table does not close within the morphism cap.

use std::collections::BTreeMap;

use crate::category::{identity_name, FinCategory, ID_PREFIX};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Gen, RewriteBudget, RewriteSystem, Word};

#[derive(Debug)]
pub struct SaturatedCategory {
    pub category: FinCategory,
    /// Declared morphism name → canonical morphism id in the closed
    /// category (relations may identify generators).
    pub canonical: BTreeMap<String, String>,
}

fn word_name(objects: &[String], w: &Word, alpha: &Alphabet) -> String {
    if w.letters.is_empty() {
        identity_name(&objects[w.src])
    } else {
        // application order: g∘f prints as g*f
        w.letters.iter().rev().map(|&g| alpha.gens[g].name.as_str()).collect::<Vec<_>>().join("*")
    }
}

/// Close a generators-and-relations presentation into a total composition
/// table. `comps` entries are `(g, f, h)` meaning `g ∘ f = h`; `h` may be an
/// identity. Missing composites are synthesised as reduced words named
/// `g*f`.
pub fn close_category(
    objects: Vec<String>,
    mors: Vec<(String, String, String)>,
    comps: Vec<(String, String, String)>,
    morphism_cap: usize,
) -> Result<SaturatedCategory> {
    let mut objects = objects;
    objects.sort();
    objects.dedup();
    let obj_idx = |name: &str| -> Result<usize> {
        objects
            .binary_search_by(|o| o.as_str().cmp(name))
            .map_err(|_| Error::UnresolvedRef { kind: "object", name: name.to_string() })
    };

    let mut gens = Vec::new();
    for (id, src, dst) in &mors {
        if id.starts_with(ID_PREFIX) {
            return Err(Error::Invalid(format!(
                "morphism id `{id}` uses the reserved identity prefix"
            )));
        }
        if id.contains('*') {
            return Err(Error::Invalid(format!("morphism id `{id}` may not contain `*`")));
        }
        gens.push(Gen { name: id.clone(), src: obj_idx(src)?, dst: obj_idx(dst)? });
    }
    gens.sort_by(|a, b| a.name.cmp(&b.name));
    for w in gens.windows(2) {
        if w[0].name == w[1].name {
            return Err(Error::Invalid(format!("duplicate morphism `{}`", w[0].name)));
        }
    }
    let alpha = Alphabet { objects: objects.clone(), gens };

    let as_word = |name: &str| -> Result<Word> {
        if let Some(obj) = name.strip_prefix(ID_PREFIX) {
            return Ok(Word::empty(obj_idx(obj)?));
        }
        let g = alpha
            .gens
            .iter()
            .position(|x| x.name == name)
            .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: name.to_string() })?;
        Ok(Word::single(&alpha, g))
    };

    let mut equations = Vec::new();
    for (g, f, h) in &comps {
        let wf = as_word(f)?;
        let wg = as_word(g)?;
        let wh = as_word(h)?;
        if wf.dst(&alpha) != wg.src && !wg.is_empty() {
            return Err(Error::Invalid(format!("`{g}` and `{f}` are not composable")));
        }
        let lhs = wf.then(&wg);
        if lhs.src != wh.src || lhs.dst(&alpha) != wh.dst(&alpha) {
            return Err(Error::Invalid(format!(
                "composite `{h}` has the wrong endpoints for `{g} ∘ {f}`"
            )));
        }
        equations.push((lhs, wh));
    }

    let budget = RewriteBudget {
        max_rules: morphism_cap.max(64),
        max_word_len: 48,
        max_passes: 200,
    };
    let sys = RewriteSystem::complete_from_equations(alpha.clone(), equations, &budget);
    if !sys.complete {
        return Err(Error::Invalid(
            "composition table does not close: completion budget exhausted".into(),
        ));
    }

    let mut words: Vec<Word> = Vec::new();
    for o in 0..objects.len() {
        let from_o = sys.irreducible_words_from(o, morphism_cap + 1, 48).map_err(|_| {
            Error::Invalid(format!(
                "composition table does not close within the {morphism_cap}-morphism cap"
            ))
        })?;
        words.extend(from_o);
        if words.len() > morphism_cap {
            return Err(Error::Invalid(format!(
                "composition table does not close within the {morphism_cap}-morphism cap"
            )));
        }
    }

    let mut mor_decls = Vec::new();
    for w in &words {
        if !w.is_empty() {
            mor_decls.push((
                word_name(&objects, w, &alpha),
                objects[w.src].clone(),
                objects[w.dst(&alpha)].clone(),
            ));
        }
    }
    let mut comp_decls = Vec::new();
    for w1 in &words {
        for w2 in &words {
            if w1.dst(&alpha) == w2.src && !w1.is_empty() && !w2.is_empty() {
                let composite = sys.reduce(&w1.then(w2));
                comp_decls.push((
                    word_name(&objects, w2, &alpha),
                    word_name(&objects, w1, &alpha),
                    word_name(&objects, &composite, &alpha),
                ));
            }
        }
    }
    let category = FinCategory::from_parts(objects.clone(), mor_decls, comp_decls)?;

    let mut canonical = BTreeMap::new();
    for o in &objects {
        canonical.insert(identity_name(o), identity_name(o));
    }
    for (g, gen) in alpha.gens.iter().enumerate() {
        let nf = sys.reduce(&Word::single(&alpha, g));
        canonical.insert(gen.name.clone(), word_name(&objects, &nf, &alpha));
    }

    Ok(SaturatedCategory { category, canonical })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::validate_category;

    fn s(x: &str) -> String {
        x.into()
    }

    #[test]
    fn declared_chain_closes_to_three_morphisms() {
        // 0 -> 1 -> 2 without the composite declared: it is synthesised
        let out = close_category(
            vec![s("0"), s("1"), s("2")],
            vec![(s("f"), s("0"), s("1")), (s("g"), s("1"), s("2"))],
            vec![],
            100,
        )
        .unwrap();
        let c = &out.category;
        assert!(validate_category(c).pass());
        assert_eq!(c.morphism_count(), 3 + 3);
        assert!(c.morphism_idx("g*f").is_some());
    }

    #[test]
    fn loop_without_relations_rejected() {
        let err = close_category(
            vec![s("x")],
            vec![(s("a"), s("x"), s("x"))],
            vec![],
            50,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn idempotent_loop_closes() {
        let out = close_category(
            vec![s("x")],
            vec![(s("a"), s("x"), s("x"))],
            vec![(s("a"), s("a"), s("a"))],
            50,
        )
        .unwrap();
        assert!(validate_category(&out.category).pass());
        assert_eq!(out.category.morphism_count(), 2);
    }

    #[test]
    fn composite_to_identity_gives_group() {
        // a: x -> x with a∘a = id: Z/2 as a one-object category
        let out = close_category(
            vec![s("x")],
            vec![(s("a"), s("x"), s("x"))],
            vec![(s("a"), s("a"), s("id_x"))],
            50,
        )
        .unwrap();
        assert!(validate_category(&out.category).pass());
        assert_eq!(out.category.morphism_count(), 2);
        assert_eq!(out.canonical["a"], "a");
    }

    #[test]
    fn generator_identified_with_composite() {
        let out = close_category(
            vec![s("0"), s("1"), s("2")],
            vec![(s("f"), s("0"), s("1")), (s("g"), s("1"), s("2")), (s("h"), s("0"), s("2"))],
            vec![(s("g"), s("f"), s("h"))],
            100,
        )
        .unwrap();
        let c = &out.category;
        assert!(validate_category(c).pass());
        assert_eq!(c.morphism_count(), 6);
        // g∘f reduces to h, not to a synthesised name
        let g = c.morphism_idx("g").unwrap();
        let f = c.morphism_idx("f").unwrap();
        assert_eq!(c.compose(g, f), c.morphism_idx("h"));
    }
}
