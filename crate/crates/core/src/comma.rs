//! Comma categories and the slice categories that index every hypothesis
//! check: for an object d of the target, the category of objects of C
//! placed under d through T by an invertible-to-be arrow, the plain
//! under-category of d, and the two-legged refinement used for the
//! two-out-of-three style conditions.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::category::{FinCategory, FunctorData, MorphClass};
use crate::connectivity::pi0;
use crate::error::{Error, Result};
use crate::setup::LocalisationSetup;

/// The functor constant at `obj`.
pub fn constant_functor(
    source: Arc<FinCategory>,
    target: Arc<FinCategory>,
    obj: usize,
) -> FunctorData {
    let omap = vec![obj; source.object_count()];
    let mmap = vec![target.identity_of(obj); source.morphism_count()];
    FunctorData { source, target, omap, mmap }
}

#[derive(Debug, Clone)]
pub struct CommaCategory {
    pub carrier: Arc<FinCategory>,
    /// Projection to the source of F.
    pub proj_left: FunctorData,
    /// Projection to the source of G.
    pub proj_right: FunctorData,
    /// Object id → (a, b, h) with h : F(a) → G(b).
    objects: BTreeMap<String, (usize, usize, usize)>,
    /// Morphism id → (φ, ψ).
    morphisms: BTreeMap<String, (usize, usize)>,
    /// Object ids whose comparison arrow h is an identity.
    pub one_fibred: Vec<String>,
    /// The common target of the two functors.
    pub ambient: Arc<FinCategory>,
}

fn comma_obj_id(f: &FunctorData, g: &FunctorData, a: usize, b: usize, h: usize) -> String {
    format!(
        "({},{},{})",
        f.source.object_id(a),
        g.source.object_id(b),
        f.target.morphism(h).id
    )
}

/// The comma category F ↓ G for functors F : A → X, G : B → X.
pub fn comma(f: &FunctorData, g: &FunctorData) -> Result<CommaCategory> {
    if f.target.as_ref() != g.target.as_ref() {
        return Err(Error::Invalid("comma requires functors with a common target".into()));
    }
    let a_cat = &f.source;
    let b_cat = &g.source;
    let x_cat = &f.target;

    let mut objects: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for a in 0..a_cat.object_count() {
        for b in 0..b_cat.object_count() {
            for h in x_cat.hom(f.apply_obj(a), g.apply_obj(b)) {
                objects.insert(comma_obj_id(f, g, a, b, h), (a, b, h));
            }
        }
    }

    let mor_id = |phi: usize, psi: usize, src: &str, dst: &str| {
        format!(
            "({},{}):{}->{}",
            a_cat.morphism(phi).id,
            b_cat.morphism(psi).id,
            src,
            dst
        )
    };

    let mut morphisms: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut mors = Vec::new();
    let obj_list: Vec<(&String, &(usize, usize, usize))> = objects.iter().collect();
    for (src_id, &(a0, b0, h0)) in &obj_list {
        for (dst_id, &(a1, b1, h1)) in &obj_list {
            for phi in a_cat.hom(a0, a1) {
                for psi in b_cat.hom(b0, b1) {
                    let lhs = x_cat.compose(g.apply_mor(psi), h0).expect("total");
                    let rhs = x_cat.compose(h1, f.apply_mor(phi)).expect("total");
                    if lhs != rhs {
                        continue;
                    }
                    if a_cat.is_identity(phi) && b_cat.is_identity(psi) && src_id == dst_id {
                        continue;
                    }
                    let id = mor_id(phi, psi, src_id, dst_id);
                    morphisms.insert(id.clone(), (phi, psi));
                    mors.push((id, (*src_id).clone(), (*dst_id).clone(), phi, psi));
                }
            }
        }
    }

    let mut comps = Vec::new();
    for (id1, s1, d1, phi1, psi1) in &mors {
        for (id2, s2, d2, phi2, psi2) in &mors {
            if d1 != s2 {
                continue;
            }
            let phi = a_cat.compose(*phi2, *phi1).expect("total");
            let psi = b_cat.compose(*psi2, *psi1).expect("total");
            let h = if a_cat.is_identity(phi) && b_cat.is_identity(psi) && s1 == d2 {
                crate::category::identity_name(s1)
            } else {
                mor_id(phi, psi, s1, d2)
            };
            comps.push((id2.clone(), id1.clone(), h));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(
        objects.keys().cloned().collect(),
        mors.iter().map(|(id, s, d, _, _)| (id.clone(), s.clone(), d.clone())).collect(),
        comps,
    )?);

    let omap_left: BTreeMap<String, String> = objects
        .iter()
        .map(|(id, &(a, _, _))| (id.clone(), a_cat.object_id(a).to_string()))
        .collect();
    let mmap_left: BTreeMap<String, String> = morphisms
        .iter()
        .map(|(id, &(phi, _))| (id.clone(), a_cat.morphism(phi).id.clone()))
        .collect();
    let proj_left = FunctorData::from_maps(carrier.clone(), a_cat.clone(), &omap_left, &mmap_left)?;

    let omap_right: BTreeMap<String, String> = objects
        .iter()
        .map(|(id, &(_, b, _))| (id.clone(), b_cat.object_id(b).to_string()))
        .collect();
    let mmap_right: BTreeMap<String, String> = morphisms
        .iter()
        .map(|(id, &(_, psi))| (id.clone(), b_cat.morphism(psi).id.clone()))
        .collect();
    let proj_right =
        FunctorData::from_maps(carrier.clone(), b_cat.clone(), &omap_right, &mmap_right)?;

    let one_fibred = objects
        .iter()
        .filter(|(_, &(_, _, h))| x_cat.is_identity(h))
        .map(|(id, _)| id.clone())
        .collect();

    Ok(CommaCategory {
        carrier,
        proj_left,
        proj_right,
        objects,
        morphisms,
        one_fibred,
        ambient: x_cat.clone(),
    })
}

impl CommaCategory {
    pub fn decode_object(&self, id: &str) -> Option<(usize, usize, usize)> {
        self.objects.get(id).copied()
    }

    pub fn decode_morphism(&self, id: &str) -> Option<(usize, usize)> {
        self.morphisms.get(id).copied()
    }

    pub fn object_id_of(&self, a: usize, b: usize, h: usize) -> String {
        format!(
            "({},{},{})",
            self.proj_left.target.object_id(a),
            self.proj_right.target.object_id(b),
            self.ambient.morphism(h).id
        )
    }

    /// The full subcategory on objects whose comparison arrow is an
    /// identity, with its inclusion.
    pub fn one_fibred_subcategory(&self) -> Result<(Arc<FinCategory>, FunctorData)> {
        let idxs: Vec<usize> =
            self.one_fibred.iter().filter_map(|id| self.carrier.object_idx(id)).collect();
        crate::category::full_subcategory(&self.carrier, &idxs)
    }
}

/// The under-category x\C as a comma category of the constant functor along
/// the identity.
pub fn under_category(c: &Arc<FinCategory>, x: usize) -> Result<CommaCategory> {
    let pt = crate::fixtures::pt();
    comma(&constant_functor(pt, c.clone(), x), &FunctorData::identity(c.clone()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceKind {
    /// Objects (c, s : d → T(c)) with s in S′; morphisms from S.
    I,
    /// Objects: arrows out of d; morphisms: commuting triangles in D.
    J {
        /// Keep only arrows landing in the object-image of T.
        restrict_to_image: bool,
    },
    /// Objects (u, c, j : u → d, s : u → T(c)) with j, s in S′; morphisms
    /// are pairs (t in S′, σ in S) commuting with both legs.
    Underline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SliceObj {
    /// C-object for kinds I and Underline; D-target object for kind J.
    pub c: usize,
    /// The structural arrow: s for I, j for J, s for Underline.
    pub s: usize,
    /// Underline only: (u, j).
    pub leg: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SliceCategory {
    pub carrier: Arc<FinCategory>,
    /// To C for kinds I and Underline, to D for kind J.
    pub forgetful: FunctorData,
    pub kind: SliceKind,
    pub index_object: usize,
    objects: BTreeMap<String, SliceObj>,
}

impl SliceCategory {
    pub fn decode_object(&self, id: &str) -> Option<SliceObj> {
        self.objects.get(id).copied()
    }

    pub fn objects_iter(&self) -> impl Iterator<Item = (&String, &SliceObj)> {
        self.objects.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn object_id_of(&self, obj: &SliceObj) -> Option<String> {
        self.objects
            .iter()
            .find(|(_, o)| *o == obj)
            .map(|(id, _)| id.clone())
    }
}

fn i_obj_id(setup: &LocalisationSetup, c: usize, s: usize) -> String {
    format!("({},{})", setup.c.object_id(c), setup.d.morphism(s).id)
}

/// The slice I_d: ways of resolving d by an object of C through an
/// arrow of S′, with S-morphisms between them.
pub fn slice_i(setup: &LocalisationSetup, d: usize) -> Result<SliceCategory> {
    let mut objects: BTreeMap<String, SliceObj> = BTreeMap::new();
    for c in 0..setup.c.object_count() {
        for s in setup.d.hom(d, setup.t.apply_obj(c)) {
            if setup.sprime.contains(s) {
                objects.insert(i_obj_id(setup, c, s), SliceObj { c, s, leg: None });
            }
        }
    }

    let mor_id = |sigma: usize, src: &str, dst: &str| {
        format!("{}:{}->{}", setup.c.morphism(sigma).id, src, dst)
    };

    let obj_list: Vec<(&String, &SliceObj)> = objects.iter().collect();
    let mut mors = Vec::new();
    let mut mor_data = Vec::new();
    for (src_id, o0) in &obj_list {
        for (dst_id, o1) in &obj_list {
            for sigma in setup.c.hom(o0.c, o1.c) {
                if !setup.s.contains(sigma) {
                    continue;
                }
                if setup.d.compose(setup.t.apply_mor(sigma), o0.s) != Some(o1.s) {
                    continue;
                }
                if setup.c.is_identity(sigma) && src_id == dst_id {
                    continue;
                }
                let id = mor_id(sigma, src_id, dst_id);
                mors.push((id.clone(), (*src_id).clone(), (*dst_id).clone()));
                mor_data.push((id, (*src_id).clone(), (*dst_id).clone(), sigma));
            }
        }
    }

    let mut comps = Vec::new();
    for (id1, s1, d1, sg1) in &mor_data {
        for (id2, s2, d2, sg2) in &mor_data {
            if d1 != s2 {
                continue;
            }
            let sg = setup.c.compose(*sg2, *sg1).expect("total");
            let h = if setup.c.is_identity(sg) && s1 == d2 {
                crate::category::identity_name(s1)
            } else {
                mor_id(sg, s1, d2)
            };
            comps.push((id2.clone(), id1.clone(), h));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(
        objects.keys().cloned().collect(),
        mors,
        comps,
    )?);

    let omap: BTreeMap<String, String> = objects
        .iter()
        .map(|(id, o)| (id.clone(), setup.c.object_id(o.c).to_string()))
        .collect();
    let mmap: BTreeMap<String, String> = mor_data
        .iter()
        .map(|(id, _, _, sg)| (id.clone(), setup.c.morphism(*sg).id.clone()))
        .collect();
    let forgetful = FunctorData::from_maps(carrier.clone(), setup.c.clone(), &omap, &mmap)?;

    Ok(SliceCategory { carrier, forgetful, kind: SliceKind::I, index_object: d, objects })
}

/// The under-category J_d of arrows out of d, optionally restricted to
/// arrows landing in the object-image of T.
pub fn slice_j(
    setup: &LocalisationSetup,
    d: usize,
    restrict_to_image: bool,
) -> Result<SliceCategory> {
    let in_image: Vec<bool> = {
        let mut v = vec![false; setup.d.object_count()];
        for c in 0..setup.c.object_count() {
            v[setup.t.apply_obj(c)] = true;
        }
        v
    };
    let mut objects: BTreeMap<String, SliceObj> = BTreeMap::new();
    for j in 0..setup.d.morphism_count() {
        let m = setup.d.morphism(j);
        if m.src != d {
            continue;
        }
        if restrict_to_image && !in_image[m.dst] {
            continue;
        }
        objects.insert(m.id.clone(), SliceObj { c: m.dst, s: j, leg: None });
    }

    let mor_id = |h: usize, src: &str, dst: &str| {
        format!("{}:{}->{}", setup.d.morphism(h).id, src, dst)
    };

    let obj_list: Vec<(&String, &SliceObj)> = objects.iter().collect();
    let mut mors = Vec::new();
    let mut mor_data = Vec::new();
    for (src_id, o0) in &obj_list {
        for (dst_id, o1) in &obj_list {
            for h in setup.d.hom(o0.c, o1.c) {
                if setup.d.compose(h, o0.s) != Some(o1.s) {
                    continue;
                }
                if setup.d.is_identity(h) && src_id == dst_id {
                    continue;
                }
                let id = mor_id(h, src_id, dst_id);
                mors.push((id.clone(), (*src_id).clone(), (*dst_id).clone()));
                mor_data.push((id, (*src_id).clone(), (*dst_id).clone(), h));
            }
        }
    }

    let mut comps = Vec::new();
    for (id1, s1, d1, h1) in &mor_data {
        for (id2, s2, d2, h2) in &mor_data {
            if d1 != s2 {
                continue;
            }
            let h = setup.d.compose(*h2, *h1).expect("total");
            let name = if setup.d.is_identity(h) && s1 == d2 {
                crate::category::identity_name(s1)
            } else {
                mor_id(h, s1, d2)
            };
            comps.push((id2.clone(), id1.clone(), name));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(
        objects.keys().cloned().collect(),
        mors,
        comps,
    )?);

    let omap: BTreeMap<String, String> = objects
        .iter()
        .map(|(id, o)| (id.clone(), setup.d.object_id(o.c).to_string()))
        .collect();
    let mmap: BTreeMap<String, String> = mor_data
        .iter()
        .map(|(id, _, _, h)| (id.clone(), setup.d.morphism(*h).id.clone()))
        .collect();
    let forgetful = FunctorData::from_maps(carrier.clone(), setup.d.clone(), &omap, &mmap)?;

    Ok(SliceCategory {
        carrier,
        forgetful,
        kind: SliceKind::J { restrict_to_image },
        index_object: d,
        objects,
    })
}

fn u_obj_id(setup: &LocalisationSetup, u: usize, c: usize, j: usize, s: usize) -> String {
    format!(
        "({},{},{},{})",
        setup.d.object_id(u),
        setup.c.object_id(c),
        setup.d.morphism(j).id,
        setup.d.morphism(s).id
    )
}

/// The refined slice: objects are wedges u → d, u → T(c) with both legs in
/// S′; morphisms are pairs (t ∈ S′, σ ∈ S) compatible with both legs.
pub fn slice_i_underline(setup: &LocalisationSetup, d: usize) -> Result<SliceCategory> {
    let mut objects: BTreeMap<String, SliceObj> = BTreeMap::new();
    for u in 0..setup.d.object_count() {
        for j in setup.d.hom(u, d) {
            if !setup.sprime.contains(j) {
                continue;
            }
            for c in 0..setup.c.object_count() {
                for s in setup.d.hom(u, setup.t.apply_obj(c)) {
                    if setup.sprime.contains(s) {
                        objects
                            .insert(u_obj_id(setup, u, c, j, s), SliceObj { c, s, leg: Some((u, j)) });
                    }
                }
            }
        }
    }

    let mor_id = |t: usize, sigma: usize, src: &str, dst: &str| {
        format!(
            "({},{}):{}->{}",
            setup.d.morphism(t).id,
            setup.c.morphism(sigma).id,
            src,
            dst
        )
    };

    let obj_list: Vec<(&String, &SliceObj)> = objects.iter().collect();
    let mut mors = Vec::new();
    let mut mor_data = Vec::new();
    for (src_id, o0) in &obj_list {
        let (u0, j0) = o0.leg.unwrap();
        for (dst_id, o1) in &obj_list {
            let (u1, j1) = o1.leg.unwrap();
            for t in setup.d.hom(u0, u1) {
                if !setup.sprime.contains(t) {
                    continue;
                }
                if setup.d.compose(j1, t) != Some(j0) {
                    continue;
                }
                for sigma in setup.c.hom(o0.c, o1.c) {
                    if !setup.s.contains(sigma) {
                        continue;
                    }
                    // naturality square between the two resolutions
                    let lhs = setup.d.compose(o1.s, t);
                    let rhs = setup.d.compose(setup.t.apply_mor(sigma), o0.s);
                    if lhs != rhs {
                        continue;
                    }
                    if setup.d.is_identity(t) && setup.c.is_identity(sigma) && src_id == dst_id
                    {
                        continue;
                    }
                    let id = mor_id(t, sigma, src_id, dst_id);
                    mors.push((id.clone(), (*src_id).clone(), (*dst_id).clone()));
                    mor_data.push((id, (*src_id).clone(), (*dst_id).clone(), t, sigma));
                }
            }
        }
    }

    let mut comps = Vec::new();
    for (id1, s1, d1, t1, sg1) in &mor_data {
        for (id2, s2, d2, t2, sg2) in &mor_data {
            if d1 != s2 {
                continue;
            }
            let t = setup.d.compose(*t2, *t1).expect("total");
            let sg = setup.c.compose(*sg2, *sg1).expect("total");
            let name = if setup.d.is_identity(t) && setup.c.is_identity(sg) && s1 == d2 {
                crate::category::identity_name(s1)
            } else {
                mor_id(t, sg, s1, d2)
            };
            comps.push((id2.clone(), id1.clone(), name));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(
        objects.keys().cloned().collect(),
        mors,
        comps,
    )?);

    let omap: BTreeMap<String, String> = objects
        .iter()
        .map(|(id, o)| (id.clone(), setup.c.object_id(o.c).to_string()))
        .collect();
    let mmap: BTreeMap<String, String> = mor_data
        .iter()
        .map(|(id, _, _, _, sg)| (id.clone(), setup.c.morphism(*sg).id.clone()))
        .collect();
    let forgetful = FunctorData::from_maps(carrier.clone(), setup.c.clone(), &omap, &mmap)?;

    Ok(SliceCategory { carrier, forgetful, kind: SliceKind::Underline, index_object: d, objects })
}

/// The comparison functor Φ_d : I_d → J_d sending a resolution to its
/// underlying arrow; returns both slices with the functor.
pub fn phi_comparison(
    setup: &LocalisationSetup,
    d: usize,
    restrict_to_image: bool,
) -> Result<(SliceCategory, SliceCategory, FunctorData)> {
    let i = slice_i(setup, d)?;
    let j = slice_j(setup, d, restrict_to_image)?;

    let mut omap: BTreeMap<String, String> = BTreeMap::new();
    for (id, o) in i.objects_iter() {
        let arrow_id = setup.d.morphism(o.s).id.clone();
        if j.carrier.object_idx(&arrow_id).is_none() {
            return Err(Error::Invalid(format!(
                "comparison target is missing the arrow `{arrow_id}`"
            )));
        }
        omap.insert(id.clone(), arrow_id);
    }

    let mut mmap: BTreeMap<String, String> = BTreeMap::new();
    for m in 0..i.carrier.morphism_count() {
        if i.carrier.is_identity(m) {
            continue;
        }
        let mm = i.carrier.morphism(m);
        let sigma = i.forgetful.apply_mor(m);
        let o0 = i.decode_object(i.carrier.object_id(mm.src)).expect("decodable");
        let o1 = i.decode_object(i.carrier.object_id(mm.dst)).expect("decodable");
        let h = setup.t.apply_mor(sigma);
        let src = &setup.d.morphism(o0.s).id;
        let dst = &setup.d.morphism(o1.s).id;
        let target_id = if setup.d.is_identity(h) && src == dst {
            crate::category::identity_name(src)
        } else {
            format!("{}:{}->{}", setup.d.morphism(h).id, src, dst)
        };
        if j.carrier.morphism_idx(&target_id).is_none() {
            return Err(Error::Invalid(format!(
                "comparison target is missing the triangle `{target_id}`"
            )));
        }
        mmap.insert(mm.id.clone(), target_id);
    }

    let phi = FunctorData::from_maps(i.carrier.clone(), j.carrier.clone(), &omap, &mmap)?;
    Ok((i, j, phi))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofinalityReport {
    pub cofinal: bool,
    /// Target objects whose fibre L/j fails 0-connectedness, with the
    /// component count found.
    pub failures: Vec<(String, usize)>,
}

/// L : I → J is cofinal when every fibre L/j is nonempty and connected.
pub fn is_cofinal(l: &FunctorData) -> Result<CofinalityReport> {
    let mut failures = Vec::new();
    for j in 0..l.target.object_count() {
        let pt = crate::fixtures::pt();
        let fibre = comma(l, &constant_functor(pt, l.target.clone(), j))?;
        let comps = pi0(&fibre.carrier).len();
        if comps != 1 {
            failures.push((l.target.object_id(j).to_string(), comps));
        }
    }
    Ok(CofinalityReport { cofinal: failures.is_empty(), failures })
}

/// Restriction of a class along a slice's forgetful functor: the slice
/// morphisms whose underlying morphism is marked.
pub fn pull_class(slice: &SliceCategory, class: &MorphClass) -> MorphClass {
    let idxs: Vec<usize> = (0..slice.carrier.morphism_count())
        .filter(|&m| class.contains(slice.forgetful.apply_mor(m)))
        .collect();
    MorphClass::from_indices(slice.carrier.clone(), &idxs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::SizeBudget;
    use crate::category::{validate_category, validate_functor, FinPoset};
    use crate::fixtures;

    #[test]
    fn comma_of_identities_is_twisted_arrows_shape() {
        // Id ↓ Id over Arrow: objects are the morphisms of Arrow
        let c = fixtures::arrow();
        let idf = FunctorData::identity(c.clone());
        let k = comma(&idf, &idf).unwrap();
        assert!(validate_category(&k.carrier).pass());
        assert_eq!(k.carrier.object_count(), 3);
        assert_eq!(k.one_fibred.len(), 2);
        assert!(validate_functor(&k.proj_left, None).report.pass());
        assert!(validate_functor(&k.proj_right, None).report.pass());
    }

    #[test]
    fn under_category_of_initial_object_covers_everything() {
        let c = fixtures::chain2();
        let x = c.object_idx("0").unwrap();
        let k = under_category(&c, x).unwrap();
        assert!(validate_category(&k.carrier).pass());
        // one object per arrow out of 0
        assert_eq!(k.carrier.object_count(), 3);
    }

    #[test]
    fn slice_i_on_terminal_inclusion() {
        let setup = fixtures::riou_fix();
        let d0 = setup.d.object_idx("0").unwrap();
        let d1 = setup.d.object_idx("1").unwrap();

        let i0 = slice_i(&setup, d0).unwrap();
        assert!(validate_category(&i0.carrier).pass());
        assert_eq!(i0.carrier.object_count(), 1);
        assert_eq!(i0.carrier.morphism_count(), 1);

        let i1 = slice_i(&setup, d1).unwrap();
        assert_eq!(i1.carrier.object_count(), 1);
        assert!(validate_functor(&i1.forgetful, None).report.pass());
    }

    #[test]
    fn slice_i_empty_when_nothing_resolves() {
        // Pt ↪ Pt⊔Pt: the second point sees no resolution
        let setup = fixtures::pt_into_pt_pt();
        let b = setup.d.object_idx("b").unwrap();
        let i = slice_i(&setup, b).unwrap();
        assert!(i.is_empty());
    }

    #[test]
    fn slice_j_full_and_restricted() {
        let setup = fixtures::riou_fix();
        let d0 = setup.d.object_idx("0").unwrap();
        let full = slice_j(&setup, d0, false).unwrap();
        assert_eq!(full.carrier.object_count(), 2); // id_0 and f
        let restricted = slice_j(&setup, d0, true).unwrap();
        assert_eq!(restricted.carrier.object_count(), 1); // only f lands in T-image
    }

    #[test]
    fn underline_slice_on_terminal_inclusion() {
        let setup = fixtures::riou_fix();
        let d1 = setup.d.object_idx("1").unwrap();
        let u = slice_i_underline(&setup, d1).unwrap();
        assert!(validate_category(&u.carrier).pass());
        // wedges: (1,id_1,id_1) and (0,f,f)
        assert_eq!(u.carrier.object_count(), 2);
        assert_eq!(pi0(&u.carrier).len(), 1);
    }

    #[test]
    fn underline_reduces_to_plain_slice_when_nothing_is_inverted() {
        // with S′ = identities the wedge leg forces u = d
        let setup = fixtures::identity_setup(fixtures::chain2());
        for d in 0..setup.d.object_count() {
            let i = slice_i(&setup, d).unwrap();
            let u = slice_i_underline(&setup, d).unwrap();
            assert_eq!(i.carrier.object_count(), u.carrier.object_count());
            assert_eq!(i.carrier.morphism_count(), u.carrier.morphism_count());
        }
    }

    #[test]
    fn comparison_functor_validates() {
        let setup = fixtures::riou_fix();
        for d in 0..setup.d.object_count() {
            let (_, _, phi) = phi_comparison(&setup, d, false).unwrap();
            assert!(validate_functor(&phi, None).report.pass());
        }
    }

    #[test]
    fn cofinality_of_object_inclusions() {
        // {0} ↪ Arrow is cofinal: L/0 = {id_0}, L/1 = {f}
        let d = fixtures::arrow();
        let zero = d.object_idx("0").unwrap();
        let (_, inc0) = crate::category::full_subcategory(&d, &[zero]).unwrap();
        let report = is_cofinal(&inc0).unwrap();
        assert!(report.cofinal, "{:?}", report.failures);

        // {1} ↪ Arrow is not: L/0 is empty
        let setup = fixtures::riou_fix();
        let report = is_cofinal(&setup.t).unwrap();
        assert!(!report.cofinal);
        assert_eq!(report.failures, vec![("0".to_string(), 0)]);

        // identities are always cofinal
        let report = is_cofinal(&FunctorData::identity(fixtures::par())).unwrap();
        assert!(report.cofinal);
    }

    #[test]
    fn squares_slice_matches_comparison_comma() {
        // I over an arrow of D agrees with the comma of the two comparison
        // functors into the under-category of its source
        let setup = fixtures::riou_fix();
        let lifted = setup.lift(&FinPoset::chain(1), &SizeBudget::default()).unwrap();

        let f = setup.d.morphism_idx("f").unwrap();
        let d_arrow = lifted.d_diag.chain_object(&[f]).unwrap();
        let i_f = slice_i(&lifted.setup, d_arrow).unwrap();
        assert!(validate_category(&i_f.carrier).pass());

        let d0 = setup.d.object_idx("0").unwrap();
        let d1 = setup.d.object_idx("1").unwrap();
        let i0 = slice_i(&setup, d0).unwrap();
        let i1 = slice_i(&setup, d1).unwrap();

        // d0 ↓ T with C-morphisms: comma(const_{d0}, T)
        let pt = fixtures::pt();
        let under0 = comma(&constant_functor(pt, setup.d.clone(), d0), &setup.t).unwrap();

        // Φ′ : I_{d0} → d0↓T and precompose-by-f ∘ Φ′ : I_{d1} → d0↓T
        let embed = |i_slice: &SliceCategory, precompose: Option<usize>| -> FunctorData {
            let mut omap = BTreeMap::new();
            for (id, o) in i_slice.objects_iter() {
                let s = match precompose {
                    Some(f) => setup.d.compose(o.s, f).unwrap(),
                    None => o.s,
                };
                omap.insert(
                    id.clone(),
                    format!("(*,{},{})", setup.c.object_id(o.c), setup.d.morphism(s).id),
                );
            }
            let mut mmap = BTreeMap::new();
            for m in 0..i_slice.carrier.morphism_count() {
                if i_slice.carrier.is_identity(m) {
                    continue;
                }
                let mm = i_slice.carrier.morphism(m);
                let sigma = i_slice.forgetful.apply_mor(m);
                let src = &omap[i_slice.carrier.object_id(mm.src)];
                let dst = &omap[i_slice.carrier.object_id(mm.dst)];
                mmap.insert(
                    mm.id.clone(),
                    format!("(id_*,{}):{}->{}", setup.c.morphism(sigma).id, src, dst),
                );
            }
            FunctorData::from_maps(
                i_slice.carrier.clone(),
                under0.carrier.clone(),
                &omap,
                &mmap,
            )
            .unwrap()
        };

        let phi0 = embed(&i0, None);
        let phi1_shifted = embed(&i1, Some(f));
        let k = comma(&phi0, &phi1_shifted).unwrap();
        assert_eq!(k.carrier.object_count(), i_f.carrier.object_count());
        assert_eq!(k.carrier.morphism_count(), i_f.carrier.morphism_count());
    }
}
