//! Calculus-of-fractions engine. When the marked class admits the square
//! and cancellation axioms (checked exhaustively), the localisation is
//! computed exactly: morphisms are equivalence classes of spans with the
//! backwards leg marked, composed through square completion.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::category::{identity_name, FinCategory, FunctorData, MorphClass};
use crate::error::{Error, Result};

use super::model::{Engine, LocModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OreReport {
    pub holds: bool,
    /// Cospans (f, s) admitting no marked square completion.
    pub square_failures: Vec<(String, String)>,
    /// Equalised parallel pairs admitting no marked co-equalising arrow.
    pub cancellation_failures: Vec<(String, String)>,
}

/// Precomputed lookup tables; the raw accessors scan all morphisms, which
/// is too slow inside the nested span searches.
struct Tables {
    /// hom[x][y], ascending morphism indices.
    hom: Vec<Vec<Vec<usize>>>,
    /// All morphisms grouped by target.
    into: Vec<Vec<usize>>,
    /// Marked morphisms grouped by target.
    marked_into: Vec<Vec<usize>>,
}

impl Tables {
    fn build(c: &FinCategory, s: &MorphClass) -> Tables {
        let n = c.object_count();
        let mut hom = vec![vec![Vec::new(); n]; n];
        let mut into = vec![Vec::new(); n];
        let mut marked_into = vec![Vec::new(); n];
        for m in 0..c.morphism_count() {
            let mor = c.morphism(m);
            hom[mor.src][mor.dst].push(m);
            into[mor.dst].push(m);
            if s.contains(m) {
                marked_into[mor.dst].push(m);
            }
        }
        Tables { hom, into, marked_into }
    }
}

/// Exhaustive check of the two fraction axioms for (C, S): every cospan
/// `f : a → y ← s : b` with s marked completes to a commutative square
/// with a marked leg at a, and whenever `s∘f = s∘g` with s marked there is
/// a marked t with `f∘t = g∘t`.
pub fn ore_check(c: &FinCategory, s: &MorphClass) -> OreReport {
    let tables = Tables::build(c, s);
    let mut square_failures = Vec::new();
    for y in 0..c.object_count() {
        for &f in &tables.into[y] {
            for &sm in &tables.marked_into[y] {
                let (mf, ms) = (c.morphism(f), c.morphism(sm));
                let mut found = false;
                'search: for &t in &tables.marked_into[mf.src] {
                    let w = c.morphism(t).src;
                    for &g in &tables.hom[w][ms.src] {
                        if c.compose(f, t) == c.compose(sm, g) {
                            found = true;
                            break 'search;
                        }
                    }
                }
                if !found {
                    square_failures.push((mf.id.clone(), ms.id.clone()));
                }
            }
        }
    }

    let marked = s.member_indices();
    let mut cancellation_failures = Vec::new();
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            let hom = &tables.hom[x][y];
            for (i, &f) in hom.iter().enumerate() {
                for &g in &hom[i + 1..] {
                    let equalised = marked
                        .iter()
                        .any(|&sm| c.morphism(sm).src == y && c.compose(sm, f) == c.compose(sm, g));
                    if !equalised {
                        continue;
                    }
                    let coequalised = tables.marked_into[x]
                        .iter()
                        .any(|&t| c.compose(f, t) == c.compose(g, t));
                    if !coequalised {
                        cancellation_failures
                            .push((c.morphism(f).id.clone(), c.morphism(g).id.clone()));
                    }
                }
            }
        }
    }

    OreReport {
        holds: square_failures.is_empty() && cancellation_failures.is_empty(),
        square_failures,
        cancellation_failures,
    }
}

/// All spans x ← w → y with the backwards leg marked, as (marked, forward)
/// morphism indices.
fn spans(c: &FinCategory, tables: &Tables, x: usize, y: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for &sm in &tables.marked_into[x] {
        let w = c.morphism(sm).src;
        for &f in &tables.hom[w][y] {
            out.push((sm, f));
        }
    }
    out.sort();
    out
}

#[cfg(test)]
fn span_equivalent(
    c: &FinCategory,
    s: &MorphClass,
    tables: &Tables,
    a: (usize, usize),
    b: (usize, usize),
) -> bool {
    let w1 = c.morphism(a.0).src;
    let w2 = c.morphism(b.0).src;
    for &t1 in &tables.into[w1] {
        let w = c.morphism(t1).src;
        for &t2 in &tables.hom[w][w2] {
            let left1 = c.compose(a.0, t1);
            let left2 = c.compose(b.0, t2);
            if left1 != left2 {
                continue;
            }
            if !s.contains(left1.expect("total")) {
                continue;
            }
            if c.compose(a.1, t1) == c.compose(b.1, t2) {
                return true;
            }
        }
    }
    false
}

/// Equivalence classes of marked spans from x to y; each class sorted,
/// classes ordered by least member.
pub fn hom_fractions(
    c: &FinCategory,
    s: &MorphClass,
    x: usize,
    y: usize,
) -> Vec<Vec<(usize, usize)>> {
    hom_fractions_with(c, s, &Tables::build(c, s), x, y)
}

fn hom_fractions_with(
    c: &FinCategory,
    s: &MorphClass,
    tables: &Tables,
    x: usize,
    y: usize,
) -> Vec<Vec<(usize, usize)>> {
    let all = spans(c, tables, x, y);
    let n = all.len();
    let index: HashMap<(usize, usize), usize> =
        all.iter().enumerate().map(|(i, &sp)| (sp, i)).collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    // two spans are equivalent iff they share a refinement, so the classes
    // are the components under one-step refinement (s, f) ↦ (s∘t, f∘t)
    // with the refined backwards leg still marked
    for i in 0..n {
        let (sm, f) = all[i];
        let w = c.morphism(sm).src;
        for &t in &tables.into[w] {
            let left = c.compose(sm, t).expect("total");
            if !s.contains(left) {
                continue;
            }
            let fwd = c.compose(f, t).expect("total");
            let j = index[&(left, fwd)];
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                parent[hi] = lo;
            }
        }
    }
    let mut buckets: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        buckets.entry(r).or_default().push(all[i]);
    }
    let mut classes: Vec<Vec<(usize, usize)>> = buckets.into_values().collect();
    for cl in &mut classes {
        cl.sort();
    }
    classes.sort();
    classes
}

fn rep_key(c: &FinCategory, cl: &[(usize, usize)]) -> (String, String) {
    cl.iter()
        .map(|&(sm, f)| (c.morphism(sm).id.clone(), c.morphism(f).id.clone()))
        .min()
        .expect("nonempty class")
}

/// Materialise S⁻¹C as a finite category via the span calculus. Requires
/// `ore_check` to hold.
pub fn fraction_model(base: &Arc<FinCategory>, class: &MorphClass) -> Result<LocModel> {
    let report = ore_check(base, class);
    if !report.holds {
        return Err(Error::Precondition(format!(
            "fraction axioms fail: {:?} {:?}",
            report.square_failures, report.cancellation_failures
        )));
    }

    let tables = Tables::build(base, class);

    // classes per hom pair, with stable names from canonical representatives
    let mut class_of_span: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let mut class_names: Vec<(String, usize, usize)> = Vec::new(); // (name, x, y)
    let mut exprs: BTreeMap<String, Vec<(usize, bool)>> = BTreeMap::new();
    for x in 0..base.object_count() {
        for y in 0..base.object_count() {
            for cl in hom_fractions_with(base, class, &tables, x, y) {
                let identity = x == y
                    && cl.contains(&(base.identity_of(x), base.identity_of(x)));
                let name = if identity {
                    identity_name(base.object_id(x))
                } else {
                    let (s_id, f_id) = rep_key(base, &cl);
                    format!("<{s_id}|{f_id}>")
                };
                if !identity {
                    let &(sm, f) = cl.first().expect("nonempty");
                    let mut e = Vec::new();
                    if !base.is_identity(sm) {
                        e.push((sm, true));
                    }
                    if !base.is_identity(f) {
                        e.push((f, false));
                    }
                    exprs.insert(name.clone(), e);
                    class_names.push((name.clone(), x, y));
                }
                for &span in &cl {
                    class_of_span.insert(span, name.clone());
                }
            }
        }
    }

    let compose_spans = |a: (usize, usize), b: (usize, usize)| -> Result<(usize, usize)> {
        // a : x → y then b : y → z; complete the cospan (a.1, b.0)
        let w1 = base.morphism(a.0).src;
        let w2 = base.morphism(b.0).src;
        for &t in &tables.marked_into[w1] {
            let w = base.morphism(t).src;
            for &g in &tables.hom[w][w2] {
                if base.compose(a.1, t) == base.compose(b.0, g) {
                    let left = base.compose(a.0, t).expect("total");
                    let fwd = base.compose(b.1, g).expect("total");
                    return Ok((left, fwd));
                }
            }
        }
        Err(Error::Invalid("fraction composition found no square".into()))
    };

    let mut mors = Vec::new();
    for (name, x, y) in &class_names {
        mors.push((
            name.clone(),
            base.object_id(*x).to_string(),
            base.object_id(*y).to_string(),
        ));
    }

    // canonical representative span per class name
    let mut rep: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (&span, name) in &class_of_span {
        rep.entry(name.clone()).or_insert(span);
    }
    for x in 0..base.object_count() {
        rep.insert(
            identity_name(base.object_id(x)),
            (base.identity_of(x), base.identity_of(x)),
        );
    }

    let mut comps = Vec::new();
    let all_names: Vec<&String> = rep.keys().collect();
    for n1 in &all_names {
        for n2 in &all_names {
            let a = rep[*n1];
            let b = rep[*n2];
            if base.morphism(a.1).dst != base.morphism(b.0).dst {
                continue;
            }
            let composite = compose_spans(a, b)?;
            let name = class_of_span
                .get(&composite)
                .ok_or_else(|| Error::Invalid("composite span escapes the class table".into()))?;
            comps.push(((**n2).clone(), (**n1).clone(), name.clone()));
        }
    }

    let category = Arc::new(FinCategory::from_parts(
        base.objects().to_vec(),
        mors,
        comps,
    )?);

    let omap: BTreeMap<String, String> =
        base.objects().iter().map(|o| (o.clone(), o.clone())).collect();
    let mut mmap: BTreeMap<String, String> = BTreeMap::new();
    for f in 0..base.morphism_count() {
        if base.is_identity(f) {
            continue;
        }
        let span = (base.identity_of(base.morphism(f).src), f);
        let name = class_of_span
            .get(&span)
            .ok_or_else(|| Error::Invalid("morphism span missing from class table".into()))?;
        mmap.insert(base.morphism(f).id.clone(), name.clone());
    }
    let p = FunctorData::from_maps(base.clone(), category.clone(), &omap, &mmap)?;

    let mut expr = vec![Vec::new(); category.morphism_count()];
    for (name, e) in exprs {
        if let Some(i) = category.morphism_idx(&name) {
            expr[i] = e;
        }
    }

    Ok(LocModel { base: base.clone(), class: class.clone(), category, p, engine: Engine::Fractions, expr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{validate_category, validate_functor};
    use crate::fixtures;

    #[test]
    fn identities_always_satisfy_ore() {
        for c in [fixtures::par(), fixtures::span(), fixtures::cospan()] {
            let s = MorphClass::identities(c.clone());
            assert!(ore_check(&c, &s).holds);
        }
    }

    #[test]
    fn cancellation_failure_detected() {
        // collapse Par by inverting f only: s∘-equalisation happens at the
        // identity of b, nothing coequalises f and g at the source
        let c = fixtures::par();
        let f = c.morphism_idx("f").unwrap();
        let s = MorphClass::from_indices(
            c.clone(),
            &[f, c.identity_of(0), c.identity_of(1)],
        );
        // f,g are never equalised by a marked arrow except identities when
        // f ≠ g, so cancellation is vacuous; the square axiom fails instead:
        // cospan (g, f) has no completion through a marked arrow into a
        let r = ore_check(&c, &s);
        assert!(!r.holds);
    }

    #[test]
    fn refinement_components_agree_with_direct_equivalence() {
        for c in [fixtures::arrow(), fixtures::chain2(), fixtures::ind(3)] {
            let s = MorphClass::all(c.clone());
            let tables = Tables::build(&c, &s);
            for x in 0..c.object_count() {
                for y in 0..c.object_count() {
                    let classes = hom_fractions(&c, &s, x, y);
                    let of_span: HashMap<(usize, usize), usize> = classes
                        .iter()
                        .enumerate()
                        .flat_map(|(i, cl)| cl.iter().map(move |&sp| (sp, i)))
                        .collect();
                    // directly equivalent spans always share a class
                    let all: Vec<(usize, usize)> = of_span.keys().copied().collect();
                    for &a in &all {
                        for &b in &all {
                            if span_equivalent(&c, &s, &tables, a, b) {
                                assert_eq!(of_span[&a], of_span[&b]);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn trivial_class_reproduces_hom_sets() {
        let c = fixtures::chain2();
        let s = MorphClass::identities(c.clone());
        for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                assert_eq!(hom_fractions(&c, &s, x, y).len(), c.hom(x, y).len());
            }
        }
    }

    #[test]
    fn inverting_arrow_gives_contractible_groupoid() {
        let c = fixtures::arrow();
        let s = MorphClass::all(c.clone());
        let model = fraction_model(&c, &s).unwrap();
        assert!(validate_category(&model.category).pass());
        assert!(validate_functor(&model.p, None).report.pass());
        assert_eq!(model.category.object_count(), 2);
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(model.category.hom(x, y).len(), 1, "hom({x},{y})");
            }
        }
        // the image of f is invertible in the model
        let f = c.morphism_idx("f").unwrap();
        assert!(model.is_iso_in_model(model.p.apply_mor(f)));
    }

    #[test]
    fn identity_class_model_is_the_base() {
        let c = fixtures::chain2();
        let s = MorphClass::identities(c.clone());
        let model = fraction_model(&c, &s).unwrap();
        assert!(validate_category(&model.category).pass());
        assert_eq!(model.category.morphism_count(), c.morphism_count());
        for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                assert_eq!(model.category.hom(x, y).len(), c.hom(x, y).len());
            }
        }
    }

    #[test]
    fn expressions_evaluate_back_to_their_morphism() {
        let c = fixtures::arrow();
        let s = MorphClass::all(c.clone());
        let model = fraction_model(&c, &s).unwrap();
        for m in 0..model.category.morphism_count() {
            let src = model.category.morphism(m).src;
            assert_eq!(model.eval_expr(&model.expr[m].clone(), src).unwrap(), m);
        }
    }
}
