//! Diagram categories `C^E` for a finite poset shape `E`: objects are
//! functors `E → C`, morphisms are natural transformations, and marked
//! classes lift pointwise. For `E = Δⁿ` this is the category of `n`-chains
//! of composable arrows.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::budget::SizeBudget;
use crate::category::{FinCategory, FinPoset, FunctorData, MorphClass};
use crate::error::{Error, Result};

/// A functor `E → C`, stored as object and strict-pair arrow assignments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagObject {
    pub assign: Vec<usize>,
    /// Arrow per strict pair `(i, j)` with `i ≤ j`, `i ≠ j`.
    pub arrows: BTreeMap<(usize, usize), usize>,
}

/// A natural transformation, stored as per-element components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagMorphism {
    pub src: String,
    pub dst: String,
    pub components: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct DiagramCategory {
    pub base: Arc<FinCategory>,
    pub shape: FinPoset,
    pub carrier: Arc<FinCategory>,
    objects: BTreeMap<String, DiagObject>,
    morphisms: BTreeMap<String, DiagMorphism>,
}

fn strict_pairs(shape: &FinPoset) -> Vec<(usize, usize)> {
    let n = shape.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && shape.leq(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn encode_diag_object(shape: &FinPoset, base: &FinCategory, obj: &DiagObject) -> String {
    let objs = shape
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| format!("{e}={}", base.object_id(obj.assign[i])))
        .collect::<Vec<_>>()
        .join(",");
    let arrows = obj
        .arrows
        .iter()
        .map(|(&(i, j), &m)| {
            format!("{}<{}={}", shape.elements()[i], shape.elements()[j], base.morphism(m).id)
        })
        .collect::<Vec<_>>()
        .join(",");
    format!("{{{objs}|{arrows}}}")
}

fn encode_diag_morphism(
    shape: &FinPoset,
    base: &FinCategory,
    src: &str,
    dst: &str,
    components: &[usize],
) -> String {
    let comps = shape
        .elements()
        .iter()
        .enumerate()
        .map(|(i, e)| format!("{e}={}", base.morphism(components[i]).id))
        .collect::<Vec<_>>()
        .join(",");
    format!("nt{{{comps}}}:{src}=>{dst}")
}

fn enumerate_functors(
    base: &FinCategory,
    shape: &FinPoset,
    budget: &SizeBudget,
) -> Result<Vec<DiagObject>> {
    let n = shape.len();
    let pairs = strict_pairs(shape);
    let mut out = Vec::new();
    let mut assign = vec![0usize; n];

    fn arrows_rec(
        base: &FinCategory,
        pairs: &[(usize, usize)],
        assign: &[usize],
        at: usize,
        arrows: &mut BTreeMap<(usize, usize), usize>,
        out: &mut Vec<DiagObject>,
        budget: &SizeBudget,
    ) -> Result<()> {
        if at == pairs.len() {
            out.push(DiagObject { assign: assign.to_vec(), arrows: arrows.clone() });
            if out.len() > budget.max_objects {
                return Err(Error::budget(
                    "enumerating diagram objects",
                    format!("more than {} functors", budget.max_objects),
                ));
            }
            return Ok(());
        }
        let (a, b) = pairs[at];
        for m in base.hom(assign[a], assign[b]) {
            arrows.insert((a, b), m);
            // triangle constraints among assigned pairs
            let consistent = pairs[..=at].iter().all(|&(i, j)| {
                pairs[..=at].iter().all(|&(j2, k)| {
                    if j2 != j {
                        return true;
                    }
                    match arrows.get(&(i, k)) {
                        Some(&ik) => {
                            base.compose(arrows[&(j, k)], arrows[&(i, j)]) == Some(ik)
                        }
                        None => true,
                    }
                })
            });
            if consistent {
                arrows_rec(base, pairs, assign, at + 1, arrows, out, budget)?;
            }
            arrows.remove(&(a, b));
        }
        Ok(())
    }

    fn assign_rec(
        base: &FinCategory,
        shape: &FinPoset,
        pairs: &[(usize, usize)],
        assign: &mut Vec<usize>,
        at: usize,
        out: &mut Vec<DiagObject>,
        budget: &SizeBudget,
    ) -> Result<()> {
        if at == assign.len() {
            let mut arrows = BTreeMap::new();
            return arrows_rec(base, pairs, assign, 0, &mut arrows, out, budget);
        }
        for o in 0..base.object_count() {
            assign[at] = o;
            assign_rec(base, shape, pairs, assign, at + 1, out, budget)?;
        }
        Ok(())
    }

    if n == 0 {
        out.push(DiagObject { assign: vec![], arrows: BTreeMap::new() });
        return Ok(out);
    }
    assign_rec(base, shape, &pairs, &mut assign, 0, &mut out, budget)?;
    Ok(out)
}

fn natural_transformations(
    base: &FinCategory,
    shape: &FinPoset,
    u: &DiagObject,
    v: &DiagObject,
) -> Vec<Vec<usize>> {
    let n = shape.len();
    let pairs = strict_pairs(shape);
    let mut out = Vec::new();
    let mut comp = vec![0usize; n];

    fn rec(
        base: &FinCategory,
        pairs: &[(usize, usize)],
        u: &DiagObject,
        v: &DiagObject,
        comp: &mut Vec<usize>,
        at: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if at == comp.len() {
            out.push(comp.clone());
            return;
        }
        for m in base.hom(u.assign[at], v.assign[at]) {
            comp[at] = m;
            // naturality squares whose two components are assigned
            let ok = pairs.iter().all(|&(i, j)| {
                if i > at || j > at {
                    return true;
                }
                base.compose(v.arrows[&(i, j)], comp[i]) == base.compose(comp[j], u.arrows[&(i, j)])
            });
            if ok {
                rec(base, pairs, u, v, comp, at + 1, out);
            }
        }
    }

    if n == 0 {
        return vec![vec![]];
    }
    rec(base, &pairs, u, v, &mut comp, 0, &mut out);
    out
}

/// Build the diagram category `C^E`.
pub fn functor_category(
    base: Arc<FinCategory>,
    shape: &FinPoset,
    budget: &SizeBudget,
) -> Result<DiagramCategory> {
    let functors = enumerate_functors(&base, shape, budget)?;
    let mut objects: BTreeMap<String, DiagObject> = BTreeMap::new();
    for f in functors {
        objects.insert(encode_diag_object(shape, &base, &f), f);
    }

    let mut morphisms: BTreeMap<String, DiagMorphism> = BTreeMap::new();
    for (src_id, u) in &objects {
        for (dst_id, v) in &objects {
            for comp in natural_transformations(&base, shape, u, v) {
                let is_identity =
                    src_id == dst_id && comp.iter().all(|&m| base.is_identity(m));
                if is_identity {
                    continue; // auto-generated by the carrier
                }
                let id = encode_diag_morphism(shape, &base, src_id, dst_id, &comp);
                morphisms.insert(
                    id,
                    DiagMorphism { src: src_id.clone(), dst: dst_id.clone(), components: comp },
                );
                if morphisms.len() + objects.len() > budget.max_morphisms {
                    return Err(Error::budget(
                        "enumerating natural transformations",
                        format!("more than {} morphisms", budget.max_morphisms),
                    ));
                }
            }
        }
    }

    let mor_decls: Vec<(String, String, String)> = morphisms
        .iter()
        .map(|(id, m)| (id.clone(), m.src.clone(), m.dst.clone()))
        .collect();

    let mut comp_decls = Vec::new();
    for (id1, t1) in &morphisms {
        for (id2, t2) in &morphisms {
            if t1.dst != t2.src {
                continue;
            }
            let composed: Vec<usize> = t1
                .components
                .iter()
                .zip(&t2.components)
                .map(|(&a, &b)| base.compose(b, a).expect("componentwise composite"))
                .collect();
            let h_id = if t1.src == t2.dst && composed.iter().all(|&m| base.is_identity(m)) {
                crate::category::identity_name(&t1.src)
            } else {
                encode_diag_morphism(shape, &base, &t1.src, &t2.dst, &composed)
            };
            comp_decls.push((id2.clone(), id1.clone(), h_id));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(
        objects.keys().cloned().collect(),
        mor_decls,
        comp_decls,
    )?);

    Ok(DiagramCategory { base, shape: shape.clone(), carrier, objects, morphisms })
}

impl DiagramCategory {
    pub fn decode_object(&self, id: &str) -> Option<&DiagObject> {
        self.objects.get(id)
    }

    pub fn object_encoding(&self, obj: &DiagObject) -> String {
        encode_diag_object(&self.shape, &self.base, obj)
    }

    /// Components of a carrier morphism (identities included).
    pub fn morphism_components(&self, mor_id: &str) -> Option<Vec<usize>> {
        if let Some(m) = self.morphisms.get(mor_id) {
            return Some(m.components.clone());
        }
        // identity morphism of a diagram object
        let obj_id = mor_id.strip_prefix(crate::category::ID_PREFIX)?;
        let obj = self.objects.get(obj_id)?;
        Some(obj.assign.iter().map(|&o| self.base.identity_of(o)).collect())
    }

    /// The pointwise lift `S(E)`: a transformation is marked iff every
    /// component is in `S`.
    pub fn lift_class(&self, s: &MorphClass) -> MorphClass {
        debug_assert_eq!(s.carrier.as_ref(), self.base.as_ref());
        let mut idxs = Vec::new();
        for m in 0..self.carrier.morphism_count() {
            let id = &self.carrier.morphism(m).id;
            let comps = self.morphism_components(id).expect("decodable morphism");
            if comps.iter().all(|&c| s.contains(c)) {
                idxs.push(m);
            }
        }
        MorphClass::from_indices(self.carrier.clone(), &idxs)
    }

    /// Find the carrier object for an explicit functor assignment.
    pub fn object_index(&self, obj: &DiagObject) -> Option<usize> {
        self.carrier.object_idx(&self.object_encoding(obj))
    }

    /// The object of `C^{Δⁿ}` given an `n`-chain of composable arrows.
    /// All composites must exist in the base table.
    pub fn chain_object(&self, chain: &[usize]) -> Result<usize> {
        let n = self.shape.len();
        if chain.len() + 1 != n {
            return Err(Error::Invalid(format!(
                "chain of length {} does not fit shape of {} elements",
                chain.len(),
                n
            )));
        }
        let mut assign = Vec::with_capacity(n);
        if let Some(&first) = chain.first() {
            assign.push(self.base.morphism(first).src);
            for &m in chain {
                assign.push(self.base.morphism(m).dst);
            }
        }
        let mut arrows = BTreeMap::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let mut acc = self.base.identity_of(assign[i]);
                for &m in &chain[i..j] {
                    acc = self
                        .base
                        .compose(m, acc)
                        .ok_or_else(|| Error::Invalid("missing composite in chain".into()))?;
                }
                arrows.insert((i, j), acc);
            }
        }
        let obj = DiagObject { assign, arrows };
        self.object_index(&obj)
            .ok_or_else(|| Error::Invalid("chain object not found in diagram category".into()))
    }

    pub fn objects_iter(&self) -> impl Iterator<Item = (&String, &DiagObject)> {
        self.objects.iter()
    }
}

/// Lift `T : C → D` to `T^E : C^E → D^E` between two built diagram
/// categories over the same shape.
pub fn lift_functor(
    t: &FunctorData,
    source: &DiagramCategory,
    target: &DiagramCategory,
) -> Result<FunctorData> {
    if source.shape != target.shape {
        return Err(Error::Invalid("diagram shapes differ".into()));
    }
    let mut omap = vec![usize::MAX; source.carrier.object_count()];
    for (id, obj) in &source.objects {
        let image = DiagObject {
            assign: obj.assign.iter().map(|&o| t.apply_obj(o)).collect(),
            arrows: obj.arrows.iter().map(|(&k, &m)| (k, t.apply_mor(m))).collect(),
        };
        let si = source.carrier.object_idx(id).unwrap();
        let ti = target
            .object_index(&image)
            .ok_or_else(|| Error::Invalid(format!("image of `{id}` missing in target")))?;
        omap[si] = ti;
    }
    let mut mmap = vec![usize::MAX; source.carrier.morphism_count()];
    for m in 0..source.carrier.morphism_count() {
        let mor = source.carrier.morphism(m);
        let comps = source.morphism_components(&mor.id).unwrap();
        let image_comps: Vec<usize> = comps.iter().map(|&c| t.apply_mor(c)).collect();
        let src_enc = &target.carrier.objects()[omap[mor.src]];
        let dst_enc = &target.carrier.objects()[omap[mor.dst]];
        let image_id = if omap[mor.src] == omap[mor.dst]
            && image_comps.iter().all(|&c| target.base.is_identity(c))
        {
            crate::category::identity_name(src_enc)
        } else {
            encode_diag_morphism(&target.shape, &target.base, src_enc, dst_enc, &image_comps)
        };
        mmap[m] = target
            .carrier
            .morphism_idx(&image_id)
            .ok_or_else(|| Error::Invalid(format!("image morphism `{image_id}` missing")))?;
    }
    Ok(FunctorData {
        source: source.carrier.clone(),
        target: target.carrier.clone(),
        omap,
        mmap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{validate_category, validate_class, validate_functor};
    use crate::fixtures;

    #[test]
    fn singleton_shape_is_isomorphic_to_base() {
        let base = fixtures::par();
        let dc = functor_category(base.clone(), &FinPoset::singleton(), &SizeBudget::default())
            .unwrap();
        assert_eq!(dc.carrier.object_count(), base.object_count());
        assert_eq!(dc.carrier.morphism_count(), base.morphism_count());
        assert!(validate_category(&dc.carrier).pass());
        // S(E) = S through the identification
        let s = MorphClass::from_ids(base, &["f".into()], true).unwrap();
        let lifted = dc.lift_class(&s);
        assert_eq!(lifted.len(), s.len());
        assert!(validate_class(&lifted).pass());
    }

    #[test]
    fn pt_to_any_shape_is_pt() {
        let dc = functor_category(fixtures::pt(), &FinPoset::chain(2), &SizeBudget::default())
            .unwrap();
        assert_eq!(dc.carrier.object_count(), 1);
        assert_eq!(dc.carrier.morphism_count(), 1);
    }

    #[test]
    fn arrow_delta1_is_commutative_square_category() {
        let dc = functor_category(fixtures::arrow(), &FinPoset::chain(1), &SizeBudget::default())
            .unwrap();
        // objects are the three arrows of Arrow: id_0, id_1, f
        assert_eq!(dc.carrier.object_count(), 3);
        assert!(validate_category(&dc.carrier).pass());
        // commuting ladders: id_0 -> id_1 has exactly one (via f, f),
        // id_0 -> f has one, f -> id_1 has one, id_1 -> id_0 none
        let arrow = fixtures::arrow();
        let f = arrow.morphism_idx("f").unwrap();
        let o_id0 = dc.chain_object(&[arrow.identity_of(0)]).unwrap();
        let o_id1 = dc.chain_object(&[arrow.identity_of(1)]).unwrap();
        let o_f = dc.chain_object(&[f]).unwrap();
        assert_eq!(dc.carrier.hom(o_id0, o_id1).len(), 1);
        assert_eq!(dc.carrier.hom(o_id0, o_f).len(), 1);
        assert_eq!(dc.carrier.hom(o_f, o_id1).len(), 1);
        assert_eq!(dc.carrier.hom(o_id1, o_id0).len(), 0);
        assert_eq!(dc.carrier.hom(o_id1, o_f).len(), 0);
    }

    #[test]
    fn chain2_delta2_objects_are_composable_pairs() {
        let base = fixtures::chain2();
        let dc =
            functor_category(base.clone(), &FinPoset::chain(2), &SizeBudget::default()).unwrap();
        // composable pairs of chain2 (6 morphisms): all (g,f) with matching ends
        let expected = base.composable_pairs().filter(|&(g, f)| base.compose(g, f).is_some()).count();
        assert_eq!(dc.carrier.object_count(), expected);
        assert!(validate_category(&dc.carrier).pass());
    }

    #[test]
    fn lifted_identity_functor_validates() {
        let base = fixtures::span();
        let shape = FinPoset::chain(1);
        let dc = functor_category(base.clone(), &shape, &SizeBudget::default()).unwrap();
        let t = lift_functor(&FunctorData::identity(base), &dc, &dc).unwrap();
        let rep = validate_functor(&t, None);
        assert!(rep.report.pass());
        assert!(rep.fully_faithful);
    }

    #[test]
    fn product_shape_counts_match_iterated() {
        // (C^E)^F vs C^(E×F) on a small fixture: counts agree
        let base = fixtures::arrow();
        let e = FinPoset::chain(1);
        let exf = e.product(&e);
        let big = functor_category(base.clone(), &exf, &SizeBudget::default()).unwrap();
        let inner = functor_category(base, &e, &SizeBudget::default()).unwrap();
        let outer = functor_category(inner.carrier.clone(), &e, &SizeBudget::default()).unwrap();
        assert_eq!(big.carrier.object_count(), outer.carrier.object_count());
        assert_eq!(big.carrier.morphism_count(), outer.carrier.morphism_count());
    }

    #[test]
    fn budget_exceeded_reported() {
        let base = fixtures::ind(3);
        let err = functor_category(base, &FinPoset::chain(2), &SizeBudget::new(5, 5)).unwrap_err();
        assert!(err.is_budget());
    }
}
