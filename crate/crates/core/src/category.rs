//! Finite categories as explicit total composition tables, together with
//! functors, marked morphism classes and finite posets.
//!
//! Every check here is exhaustive: a category is a finite table, so the
//! axioms are decidable by scanning pairs and triples.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reserved prefix for auto-generated identity morphisms.
pub const ID_PREFIX: &str = "id_";

pub fn identity_name(object: &str) -> String {
    format!("{ID_PREFIX}{object}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Morphism {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite category: objects, morphisms and a total composition table over
/// composable pairs. Identity morphisms are always auto-generated with the
/// reserved `id_<object>` names.
///
/// The structure itself may violate the category axioms; `validate_category`
/// reports every violation instead of erroring.
#[derive(Debug, Clone)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    obj_index: HashMap<String, usize>,
    mor_index: HashMap<String, usize>,
    identity: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
}

impl PartialEq for FinCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identity == other.identity
            && self.compose == other.compose
    }
}
impl Eq for FinCategory {}

impl FinCategory {
    /// Assemble a category from object names, non-identity morphisms
    /// `(id, src, dst)` and composition entries `(g, f, h)` meaning
    /// `g ∘ f = h`. Identities and their composition entries are generated;
    /// explicit entries override generated ones, which lets tests represent
    /// broken tables.
    pub fn from_parts(
        objects: Vec<String>,
        mors: Vec<(String, String, String)>,
        comps: Vec<(String, String, String)>,
    ) -> Result<FinCategory> {
        let mut objects = objects;
        objects.sort();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Invalid(format!("duplicate object `{}`", w[0])));
            }
        }
        let obj_index: HashMap<String, usize> =
            objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();

        let mut all: Vec<Morphism> = Vec::new();
        for o in &objects {
            let i = obj_index[o];
            all.push(Morphism { id: identity_name(o), src: i, dst: i });
        }
        for (id, src, dst) in mors {
            if id.starts_with(ID_PREFIX) {
                return Err(Error::Invalid(format!(
                    "morphism id `{id}` uses the reserved identity prefix"
                )));
            }
            let s = *obj_index
                .get(&src)
                .ok_or_else(|| Error::UnresolvedRef { kind: "object", name: src.clone() })?;
            let d = *obj_index
                .get(&dst)
                .ok_or_else(|| Error::UnresolvedRef { kind: "object", name: dst.clone() })?;
            all.push(Morphism { id, src: s, dst: d });
        }
        all.sort_by(|a, b| a.id.cmp(&b.id));
        for w in all.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Invalid(format!("duplicate morphism `{}`", w[0].id)));
            }
        }
        let mor_index: HashMap<String, usize> =
            all.iter().enumerate().map(|(i, m)| (m.id.clone(), i)).collect();
        let identity: Vec<usize> =
            objects.iter().map(|o| mor_index[&identity_name(o)]).collect();

        let mut compose: HashMap<(usize, usize), usize> = HashMap::new();
        // generated identity entries: id_dst ∘ f = f and f ∘ id_src = f
        for (fi, f) in all.iter().enumerate() {
            compose.insert((identity[f.dst], fi), fi);
            compose.insert((fi, identity[f.src]), fi);
        }
        for (g, f, h) in comps {
            let gi = *mor_index
                .get(&g)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: g.clone() })?;
            let fi = *mor_index
                .get(&f)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: f.clone() })?;
            let hi = *mor_index
                .get(&h)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: h.clone() })?;
            compose.insert((gi, fi), hi);
        }

        Ok(FinCategory { objects, morphisms: all, obj_index, mor_index, identity, compose })
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn object_id(&self, i: usize) -> &str {
        &self.objects[i]
    }

    pub fn morphism(&self, i: usize) -> &Morphism {
        &self.morphisms[i]
    }

    pub fn object_idx(&self, id: &str) -> Option<usize> {
        self.obj_index.get(id).copied()
    }

    pub fn morphism_idx(&self, id: &str) -> Option<usize> {
        self.mor_index.get(id).copied()
    }

    pub fn identity_of(&self, obj: usize) -> usize {
        self.identity[obj]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.morphisms[m].src] == m
    }

    /// `g ∘ f`, defined when `src(g) = dst(f)` and the table has an entry.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub fn composable(&self, g: usize, f: usize) -> bool {
        self.morphisms[g].src == self.morphisms[f].dst
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        self.morphisms
            .iter()
            .enumerate()
            .filter(|(_, m)| m.src == x && m.dst == y)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn non_identity_morphisms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.morphisms.len()).filter(|&m| !self.is_identity(m))
    }

    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.morphisms.len();
        (0..n).flat_map(move |g| (0..n).filter(move |&f| self.composable(g, f)).map(move |f| (g, f)))
    }

    /// Raw table access for tests that need to break a law deliberately.
    pub fn set_compose_raw(&mut self, g: usize, f: usize, h: usize) {
        self.compose.insert((g, f), h);
    }

    pub fn remove_compose_raw(&mut self, g: usize, f: usize) {
        self.compose.remove(&(g, f));
    }

    pub fn compose_entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.compose.iter().map(|(&(g, f), &h)| (g, f, h))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: String,
    pub ids: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, law: impl Into<String>, ids: Vec<String>) {
        self.violations.push(Violation { law: law.into(), ids });
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }
}

/// Check every identity, associativity and typing requirement of the table.
pub fn validate_category(c: &FinCategory) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = c.morphism_count();

    // typing: entries defined exactly on composable pairs, endpoints match
    for g in 0..n {
        for f in 0..n {
            let entry = c.compose(g, f);
            if c.composable(g, f) {
                match entry {
                    None => report.push(
                        "composition totality",
                        vec![c.morphism(g).id.clone(), c.morphism(f).id.clone()],
                    ),
                    Some(h) => {
                        let (mf, mg, mh) = (c.morphism(f), c.morphism(g), c.morphism(h));
                        if mh.src != mf.src || mh.dst != mg.dst {
                            report.push(
                                "composition typing",
                                vec![mg.id.clone(), mf.id.clone(), mh.id.clone()],
                            );
                        }
                    }
                }
            } else if entry.is_some() {
                report.push(
                    "composition domain",
                    vec![c.morphism(g).id.clone(), c.morphism(f).id.clone()],
                );
            }
        }
    }

    for f in 0..n {
        let m = c.morphism(f);
        let idd = c.identity_of(m.dst);
        let ids = c.identity_of(m.src);
        if c.compose(idd, f) != Some(f) || c.compose(f, ids) != Some(f) {
            report.push("identity law", vec![m.id.clone()]);
        }
    }

    // associativity over all composable triples
    for h in 0..n {
        for g in 0..n {
            if !c.composable(h, g) {
                continue;
            }
            let hg = match c.compose(h, g) {
                Some(x) => x,
                None => continue,
            };
            for f in 0..n {
                if !c.composable(g, f) {
                    continue;
                }
                let gf = match c.compose(g, f) {
                    Some(x) => x,
                    None => continue,
                };
                if c.compose(h, gf) != c.compose(hg, f) {
                    report.push(
                        "associativity",
                        vec![
                            c.morphism(h).id.clone(),
                            c.morphism(g).id.clone(),
                            c.morphism(f).id.clone(),
                        ],
                    );
                }
            }
        }
    }

    report
}

/// Swap sources and targets, reversing the composition table.
pub fn opposite(c: &FinCategory) -> FinCategory {
    let mut op = c.clone();
    for m in &mut op.morphisms {
        std::mem::swap(&mut m.src, &mut m.dst);
    }
    op.compose = c.compose.iter().map(|(&(g, f), &h)| ((f, g), h)).collect();
    op
}

/// The full subcategory on the given objects, together with the inclusion
/// functor. Morphism and object ids are kept.
pub fn full_subcategory(
    c: &Arc<FinCategory>,
    objects: &[usize],
) -> Result<(Arc<FinCategory>, FunctorData)> {
    let mut keep = vec![false; c.object_count()];
    for &o in objects {
        keep[o] = true;
    }
    let objs: Vec<String> =
        (0..c.object_count()).filter(|&o| keep[o]).map(|o| c.object_id(o).to_string()).collect();
    let mors: Vec<(String, String, String)> = (0..c.morphism_count())
        .filter(|&m| {
            let mm = c.morphism(m);
            !c.is_identity(m) && keep[mm.src] && keep[mm.dst]
        })
        .map(|m| {
            let mm = c.morphism(m);
            (mm.id.clone(), c.object_id(mm.src).to_string(), c.object_id(mm.dst).to_string())
        })
        .collect();
    let mut comps = Vec::new();
    for (g, f, h) in c.compose_entries() {
        if c.is_identity(g) || c.is_identity(f) {
            continue;
        }
        let (mf, mg) = (c.morphism(f), c.morphism(g));
        if keep[mf.src] && keep[mf.dst] && keep[mg.dst] {
            comps.push((
                mg.id.clone(),
                mf.id.clone(),
                c.morphism(h).id.clone(),
            ));
        }
    }
    let sub = Arc::new(FinCategory::from_parts(objs, mors, comps)?);
    let omap: BTreeMap<String, String> =
        sub.objects().iter().map(|o| (o.clone(), o.clone())).collect();
    let mmap: BTreeMap<String, String> = sub
        .morphisms()
        .iter()
        .filter(|m| !m.id.starts_with(ID_PREFIX))
        .map(|m| (m.id.clone(), m.id.clone()))
        .collect();
    let inc = FunctorData::from_maps(sub.clone(), c.clone(), &omap, &mmap)?;
    Ok((sub, inc))
}

/// A wide subcategory marked for inversion: contains identities, closed
/// under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphClass {
    pub carrier: Arc<FinCategory>,
    members: Vec<bool>,
}

impl MorphClass {
    pub fn identities(carrier: Arc<FinCategory>) -> MorphClass {
        let members = (0..carrier.morphism_count()).map(|m| carrier.is_identity(m)).collect();
        MorphClass { carrier, members }
    }

    pub fn all(carrier: Arc<FinCategory>) -> MorphClass {
        let members = vec![true; carrier.morphism_count()];
        MorphClass { carrier, members }
    }

    /// Mark the listed morphisms; identities are added when
    /// `with_identities` is set (the DSL always sets it).
    pub fn from_ids(
        carrier: Arc<FinCategory>,
        ids: &[String],
        with_identities: bool,
    ) -> Result<MorphClass> {
        let mut members = vec![false; carrier.morphism_count()];
        if with_identities {
            for m in 0..carrier.morphism_count() {
                if carrier.is_identity(m) {
                    members[m] = true;
                }
            }
        }
        for id in ids {
            let i = carrier
                .morphism_idx(id)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: id.clone() })?;
            members[i] = true;
        }
        Ok(MorphClass { carrier, members })
    }

    pub fn from_indices(carrier: Arc<FinCategory>, idxs: &[usize]) -> MorphClass {
        let mut members = vec![false; carrier.morphism_count()];
        for &i in idxs {
            members[i] = true;
        }
        MorphClass { carrier, members }
    }

    pub fn contains(&self, m: usize) -> bool {
        self.members[m]
    }

    pub fn insert(&mut self, m: usize) {
        self.members[m] = true;
    }

    pub fn remove(&mut self, m: usize) {
        self.members[m] = false;
    }

    pub fn member_indices(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&m| self.members[m]).collect()
    }

    pub fn member_ids(&self) -> Vec<String> {
        self.member_indices().iter().map(|&m| self.carrier.morphism(m).id.clone()).collect()
    }

    pub fn non_identity_member_ids(&self) -> Vec<String> {
        self.member_indices()
            .iter()
            .filter(|&&m| !self.carrier.is_identity(m))
            .map(|&m| self.carrier.morphism(m).id.clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest composition-closed superset containing the identities.
    pub fn closure(&self) -> MorphClass {
        let mut members = self.members.clone();
        for m in 0..self.carrier.morphism_count() {
            if self.carrier.is_identity(m) {
                members[m] = true;
            }
        }
        loop {
            let mut changed = false;
            let cur: Vec<usize> = (0..members.len()).filter(|&m| members[m]).collect();
            for &g in &cur {
                for &f in &cur {
                    if let Some(h) = self.carrier.compose(g, f) {
                        if self.carrier.composable(g, f) && !members[h] {
                            members[h] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        MorphClass { carrier: self.carrier.clone(), members }
    }
}

/// Pass iff the class contains every identity and is composition-closed.
pub fn validate_class(s: &MorphClass) -> ValidationReport {
    let mut report = ValidationReport::default();
    let c = &s.carrier;
    for o in 0..c.object_count() {
        let id = c.identity_of(o);
        if !s.contains(id) {
            report.push("class contains identities", vec![c.morphism(id).id.clone()]);
        }
    }
    let members = s.member_indices();
    for &g in &members {
        for &f in &members {
            if c.composable(g, f) {
                if let Some(h) = c.compose(g, f) {
                    if !s.contains(h) {
                        report.push(
                            "class composition-closed",
                            vec![
                                c.morphism(g).id.clone(),
                                c.morphism(f).id.clone(),
                                c.morphism(h).id.clone(),
                            ],
                        );
                    }
                }
            }
        }
    }
    report
}

/// A functor between explicit finite categories, given by total object and
/// morphism maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorData {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub omap: Vec<usize>,
    pub mmap: Vec<usize>,
}

impl FunctorData {
    pub fn identity(c: Arc<FinCategory>) -> FunctorData {
        let omap = (0..c.object_count()).collect();
        let mmap = (0..c.morphism_count()).collect();
        FunctorData { source: c.clone(), target: c, omap, mmap }
    }

    /// Build from id-level maps; identity morphisms are mapped according to
    /// the object map and need not be listed.
    pub fn from_maps(
        source: Arc<FinCategory>,
        target: Arc<FinCategory>,
        omap_ids: &BTreeMap<String, String>,
        mmap_ids: &BTreeMap<String, String>,
    ) -> Result<FunctorData> {
        let mut omap = vec![usize::MAX; source.object_count()];
        for (a, x) in omap_ids {
            let ai = source
                .object_idx(a)
                .ok_or_else(|| Error::UnresolvedRef { kind: "object", name: a.clone() })?;
            let xi = target
                .object_idx(x)
                .ok_or_else(|| Error::UnresolvedRef { kind: "object", name: x.clone() })?;
            omap[ai] = xi;
        }
        for (ai, &v) in omap.iter().enumerate() {
            if v == usize::MAX {
                return Err(Error::Invalid(format!(
                    "functor object map is missing `{}`",
                    source.object_id(ai)
                )));
            }
        }
        let mut mmap = vec![usize::MAX; source.morphism_count()];
        for m in 0..source.morphism_count() {
            if source.is_identity(m) {
                let o = source.morphism(m).src;
                mmap[m] = target.identity_of(omap[o]);
            }
        }
        for (f, u) in mmap_ids {
            let fi = source
                .morphism_idx(f)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: f.clone() })?;
            let ui = target
                .morphism_idx(u)
                .ok_or_else(|| Error::UnresolvedRef { kind: "morphism", name: u.clone() })?;
            mmap[fi] = ui;
        }
        for (fi, &v) in mmap.iter().enumerate() {
            if v == usize::MAX {
                return Err(Error::Invalid(format!(
                    "functor morphism map is missing `{}`",
                    source.morphism(fi).id
                )));
            }
        }
        Ok(FunctorData { source, target, omap, mmap })
    }

    pub fn apply_obj(&self, o: usize) -> usize {
        self.omap[o]
    }

    pub fn apply_mor(&self, m: usize) -> usize {
        self.mmap[m]
    }

    pub fn compose_with(&self, outer: &FunctorData) -> FunctorData {
        debug_assert_eq!(self.target.as_ref(), outer.source.as_ref());
        FunctorData {
            source: self.source.clone(),
            target: outer.target.clone(),
            omap: self.omap.iter().map(|&o| outer.omap[o]).collect(),
            mmap: self.mmap.iter().map(|&m| outer.mmap[m]).collect(),
        }
    }

    /// Image of a class: the marked morphisms hit by members of `s`.
    pub fn class_image(&self, s: &MorphClass) -> MorphClass {
        let idxs: Vec<usize> = s.member_indices().iter().map(|&m| self.mmap[m]).collect();
        MorphClass::from_indices(self.target.clone(), &idxs)
    }

    pub fn is_fully_faithful(&self) -> bool {
        self.is_full() && self.is_faithful()
    }

    pub fn is_faithful(&self) -> bool {
        for x in 0..self.source.object_count() {
            for y in 0..self.source.object_count() {
                let hom = self.source.hom(x, y);
                let images: BTreeSet<usize> = hom.iter().map(|&m| self.mmap[m]).collect();
                if images.len() != hom.len() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_full(&self) -> bool {
        for x in 0..self.source.object_count() {
            for y in 0..self.source.object_count() {
                let images: BTreeSet<usize> =
                    self.source.hom(x, y).iter().map(|&m| self.mmap[m]).collect();
                let target_hom = self.target.hom(self.omap[x], self.omap[y]);
                if !target_hom.iter().all(|m| images.contains(m)) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorReport {
    pub report: ValidationReport,
    pub faithful: bool,
    pub full: bool,
    pub fully_faithful: bool,
    /// `Some(b)`: classes were supplied and `b` says whether T(S) ⊆ S′.
    pub maps_class: Option<bool>,
}

/// Functor laws checked exhaustively, with a full-faithfulness sub-check and
/// an optional T(S) ⊆ S′ check.
pub fn validate_functor(
    t: &FunctorData,
    classes: Option<(&MorphClass, &MorphClass)>,
) -> FunctorReport {
    let mut report = ValidationReport::default();
    let (src, tgt) = (&t.source, &t.target);

    for m in 0..src.morphism_count() {
        let f = src.morphism(m);
        let im = tgt.morphism(t.mmap[m]);
        if im.src != t.omap[f.src] || im.dst != t.omap[f.dst] {
            report.push("functor preserves endpoints", vec![f.id.clone()]);
        }
    }
    for o in 0..src.object_count() {
        if t.mmap[src.identity_of(o)] != tgt.identity_of(t.omap[o]) {
            report.push("functor preserves identities", vec![src.object_id(o).to_string()]);
        }
    }
    for (g, f) in src.composable_pairs() {
        if let Some(h) = src.compose(g, f) {
            let lhs = tgt.compose(t.mmap[g], t.mmap[f]);
            if lhs != Some(t.mmap[h]) {
                report.push(
                    "functor preserves composition",
                    vec![src.morphism(g).id.clone(), src.morphism(f).id.clone()],
                );
            }
        }
    }

    let faithful = t.is_faithful();
    let full = t.is_full();
    let maps_class = classes.map(|(s, sp)| s.member_indices().iter().all(|&m| sp.contains(t.mmap[m])));

    FunctorReport { report, faithful, full, fully_faithful: faithful && full, maps_class }
}

/// A finite partial order; doubles as the index shape for diagram
/// categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPoset {
    elements: Vec<String>,
    leq: Vec<bool>,
}

impl FinPoset {
    /// Build from strict generating pairs `a < b`; the reflexive-transitive
    /// closure is taken, and antisymmetry is checked.
    pub fn from_pairs(elements: Vec<String>, pairs: &[(String, String)]) -> Result<FinPoset> {
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        let n = elements.len();
        let index: HashMap<&str, usize> =
            elements.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for (a, b) in pairs {
            let ai = *index
                .get(a.as_str())
                .ok_or_else(|| Error::UnresolvedRef { kind: "poset element", name: a.clone() })?;
            let bi = *index
                .get(b.as_str())
                .ok_or_else(|| Error::UnresolvedRef { kind: "poset element", name: b.clone() })?;
            leq[ai * n + bi] = true;
        }
        // transitive closure
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(Error::Invalid(format!(
                        "antisymmetry fails between `{}` and `{}`",
                        elements[i], elements[j]
                    )));
                }
            }
        }
        Ok(FinPoset { elements, leq })
    }

    pub fn singleton() -> FinPoset {
        FinPoset::from_pairs(vec!["0".into()], &[]).unwrap()
    }

    /// The chain `Δⁿ` on elements `0 … n`.
    pub fn chain(n: usize) -> FinPoset {
        let elements: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = (0..n).map(|i| (i.to_string(), (i + 1).to_string())).collect();
        FinPoset::from_pairs(elements, &pairs).unwrap()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.elements.len() + j]
    }

    pub fn product(&self, other: &FinPoset) -> FinPoset {
        let mut elements = Vec::new();
        for a in &self.elements {
            for b in &other.elements {
                elements.push(format!("({a},{b})"));
            }
        }
        let mut pairs = Vec::new();
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in other.elements.iter().enumerate() {
                for (i2, a2) in self.elements.iter().enumerate() {
                    for (j2, b2) in other.elements.iter().enumerate() {
                        if self.leq(i, i2) && other.leq(j, j2) && (i != i2 || j != j2) {
                            pairs.push((format!("({a},{b})"), format!("({a2},{b2})")));
                        }
                    }
                }
            }
        }
        FinPoset::from_pairs(elements, &pairs).unwrap()
    }

    /// The poset as a category, one morphism `le_a_b` per strict pair.
    pub fn as_category(&self) -> FinCategory {
        let n = self.elements.len();
        let mut mors = Vec::new();
        let name = |i: usize, j: usize| format!("le_{}_{}", self.elements[i], self.elements[j]);
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq(i, j) {
                    mors.push((name(i, j), self.elements[i].clone(), self.elements[j].clone()));
                }
            }
        }
        let mut comps = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k && self.leq(i, j) && self.leq(j, k) {
                        comps.push((name(j, k), name(i, j), name(i, k)));
                    }
                }
            }
        }
        FinCategory::from_parts(self.elements.clone(), mors, comps).unwrap()
    }

    pub fn validate(&self) -> ValidationReport {
        // construction enforces the axioms; re-check for raw tampering
        let mut report = ValidationReport::default();
        let n = self.elements.len();
        for i in 0..n {
            if !self.leq(i, i) {
                report.push("poset reflexivity", vec![self.elements[i].clone()]);
            }
            for j in 0..n {
                if i != j && self.leq(i, j) && self.leq(j, i) {
                    report.push(
                        "poset antisymmetry",
                        vec![self.elements[i].clone(), self.elements[j].clone()],
                    );
                }
                for k in 0..n {
                    if self.leq(i, j) && self.leq(j, k) && !self.leq(i, k) {
                        report.push(
                            "poset transitivity",
                            vec![
                                self.elements[i].clone(),
                                self.elements[j].clone(),
                                self.elements[k].clone(),
                            ],
                        );
                    }
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductWitness {
    pub left: String,
    pub right: String,
    pub apex: String,
    pub proj_left: String,
    pub proj_right: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductsReport {
    pub has_products: bool,
    pub terminal: Option<String>,
    pub witnesses: Vec<ProductWitness>,
    /// First pair with no product, when `has_products` is false.
    pub failing_pair: Option<(String, String)>,
}

fn is_terminal(c: &FinCategory, t: usize) -> bool {
    (0..c.object_count()).all(|x| c.hom(x, t).len() == 1)
}

fn product_of(c: &FinCategory, x: usize, y: usize) -> Option<(usize, usize, usize)> {
    for p in 0..c.object_count() {
        for &p1 in &c.hom(p, x) {
            'proj: for &p2 in &c.hom(p, y) {
                // universal property of (p, p1, p2)
                for z in 0..c.object_count() {
                    for &f in &c.hom(z, x) {
                        for &g in &c.hom(z, y) {
                            let mediating: Vec<usize> = c
                                .hom(z, p)
                                .into_iter()
                                .filter(|&h| {
                                    c.compose(p1, h) == Some(f) && c.compose(p2, h) == Some(g)
                                })
                                .collect();
                            if mediating.len() != 1 {
                                continue 'proj;
                            }
                        }
                    }
                }
                return Some((p, p1, p2));
            }
        }
    }
    None
}

/// Brute-force search for a terminal object and binary products.
pub fn has_finite_products(c: &FinCategory) -> ProductsReport {
    let terminal = (0..c.object_count()).find(|&t| is_terminal(c, t));
    let mut witnesses = Vec::new();
    let mut failing_pair = None;
    'outer: for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            match product_of(c, x, y) {
                Some((p, p1, p2)) => witnesses.push(ProductWitness {
                    left: c.object_id(x).to_string(),
                    right: c.object_id(y).to_string(),
                    apex: c.object_id(p).to_string(),
                    proj_left: c.morphism(p1).id.clone(),
                    proj_right: c.morphism(p2).id.clone(),
                }),
                None => {
                    failing_pair = Some((c.object_id(x).to_string(), c.object_id(y).to_string()));
                    break 'outer;
                }
            }
        }
    }
    let has_products = terminal.is_some() && failing_pair.is_none();
    ProductsReport {
        has_products,
        terminal: terminal.map(|t| c.object_id(t).to_string()),
        witnesses,
        failing_pair,
    }
}

/// Does `t` carry terminal object and binary product witnesses of its source
/// to witnesses in its target?
pub fn preserves_finite_products(t: &FunctorData) -> bool {
    let src_report = has_finite_products(&t.source);
    if !src_report.has_products {
        return false;
    }
    if let Some(term) = &src_report.terminal {
        let ti = t.source.object_idx(term).unwrap();
        if !is_terminal(&t.target, t.omap[ti]) {
            return false;
        }
    }
    for w in &src_report.witnesses {
        let p1 = t.mmap[t.source.morphism_idx(&w.proj_left).unwrap()];
        let p2 = t.mmap[t.source.morphism_idx(&w.proj_right).unwrap()];
        let p = t.omap[t.source.object_idx(&w.apex).unwrap()];
        let x = t.omap[t.source.object_idx(&w.left).unwrap()];
        let y = t.omap[t.source.object_idx(&w.right).unwrap()];
        // (p, p1, p2) must be universal in the target
        let c = &t.target;
        for z in 0..c.object_count() {
            for &f in &c.hom(z, x) {
                for &g in &c.hom(z, y) {
                    let mediating: Vec<usize> = c
                        .hom(z, p)
                        .into_iter()
                        .filter(|&h| c.compose(p1, h) == Some(f) && c.compose(p2, h) == Some(g))
                        .collect();
                    if mediating.len() != 1 {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn pt_is_valid() {
        assert!(validate_category(&fixtures::pt()).pass());
    }

    #[test]
    fn broken_identity_entry_reported() {
        let mut arrow = (*fixtures::arrow()).clone();
        let f = arrow.morphism_idx("f").unwrap();
        let id0 = arrow.morphism_idx("id_0").unwrap();
        arrow.set_compose_raw(f, id0, id0); // wrong: should be f, and typing breaks too
        let report = validate_category(&arrow);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.law == "identity law" && v.ids == ["f"]));
    }

    #[test]
    fn broken_associativity_triple_listed() {
        // chain 0 -> 1 -> 2 with composite declared to a wrong but well-typed value:
        // add a second arrow 0 -> 2 and point h∘(g∘f) mismatch through it
        let c = FinCategory::from_parts(
            vec!["0".into(), "1".into(), "2".into()],
            vec![
                ("f".into(), "0".into(), "1".into()),
                ("g".into(), "1".into(), "2".into()),
                ("h".into(), "0".into(), "2".into()),
                ("k".into(), "0".into(), "2".into()),
            ],
            vec![("g".into(), "f".into(), "h".into())],
        )
        .unwrap();
        let mut c = c;
        // id_2 ∘ g = g holds; break associativity by redefining (g ∘ f) ∘ id_0
        let g = c.morphism_idx("g").unwrap();
        let f = c.morphism_idx("f").unwrap();
        let k = c.morphism_idx("k").unwrap();
        let id0 = c.morphism_idx("id_0").unwrap();
        // f ∘ id_0 stays f, but declare h ∘ id_0 = k so that
        // (g∘f)∘id_0 = k while g∘(f∘id_0) = h
        let h = c.morphism_idx("h").unwrap();
        c.set_compose_raw(h, id0, k);
        let report = validate_category(&c);
        assert!(!report.pass());
        let assoc: Vec<_> =
            report.violations.iter().filter(|v| v.law == "associativity").collect();
        assert!(assoc.iter().any(|v| v.ids == ["g", "f", "id_0"]));
        let _ = (g, f);
    }

    #[test]
    fn identities_only_class_passes() {
        for c in [fixtures::pt(), fixtures::par(), fixtures::chain2()] {
            let s = MorphClass::identities(c);
            assert!(validate_class(&s).pass());
        }
    }

    #[test]
    fn parallel_pair_class_passes() {
        let par = fixtures::par();
        let s = MorphClass::from_ids(par, &["f".into()], true).unwrap();
        assert!(validate_class(&s).pass());
    }

    #[test]
    fn class_missing_composite_fails() {
        let c = fixtures::chain2();
        let s = MorphClass::from_ids(c, &["f".into(), "g".into()], true).unwrap();
        let report = validate_class(&s);
        assert!(!report.pass());
        assert!(report.violations.iter().any(|v| v.law == "class composition-closed"));
        assert!(validate_class(&s.closure()).pass());
    }

    #[test]
    fn identity_functor_on_ind3_passes_fully_faithful() {
        let c = fixtures::ind(3);
        let t = FunctorData::identity(c);
        let rep = validate_functor(&t, None);
        assert!(rep.report.pass());
        assert!(rep.fully_faithful);
    }

    #[test]
    fn constant_functor_par_to_pt_not_faithful() {
        let par = fixtures::par();
        let pt = fixtures::pt();
        let omap: std::collections::BTreeMap<String, String> =
            [("a".into(), "*".into()), ("b".into(), "*".into())].into();
        let mmap: std::collections::BTreeMap<String, String> =
            [("f".into(), "id_*".into()), ("g".into(), "id_*".into())].into();
        let t = FunctorData::from_maps(par, pt, &omap, &mmap).unwrap();
        let rep = validate_functor(&t, None);
        assert!(rep.report.pass());
        assert!(!rep.faithful);
    }

    #[test]
    fn inclusion_of_one_into_arrow_fully_faithful() {
        let arrow = fixtures::arrow();
        let one = FinCategory::from_parts(vec!["1".into()], vec![], vec![]).unwrap();
        let omap: std::collections::BTreeMap<String, String> = [("1".into(), "1".into())].into();
        let t = FunctorData::from_maps(Arc::new(one), arrow, &omap, &Default::default()).unwrap();
        let rep = validate_functor(&t, None);
        assert!(rep.report.pass());
        assert!(rep.fully_faithful);
    }

    #[test]
    fn opposite_involution_and_span_cospan() {
        for c in [fixtures::pt(), fixtures::arrow(), fixtures::span(), fixtures::chain2()] {
            let op = opposite(&c);
            assert!(validate_category(&op).pass());
            assert_eq!(opposite(&op), *c);
        }
        let op = opposite(&fixtures::span());
        // two arrows into the middle object
        let f = op.morphism_idx("f").unwrap();
        assert_eq!(op.object_id(op.morphism(f).src), "b");
        assert_eq!(op.object_id(op.morphism(f).dst), "a");
    }

    #[test]
    fn products_pt_and_lattice() {
        let rep = has_finite_products(&fixtures::pt());
        assert!(rep.has_products);
        assert_eq!(rep.terminal.as_deref(), Some("*"));

        let rep = has_finite_products(&fixtures::span());
        assert!(!rep.has_products);

        let lattice = fixtures::square_lattice();
        let rep = has_finite_products(&lattice);
        assert!(rep.has_products, "lattice products are meets: {rep:?}");
        assert_eq!(rep.terminal.as_deref(), Some("11"));
        let w = rep
            .witnesses
            .iter()
            .find(|w| w.left == "01" && w.right == "10")
            .expect("meet witness");
        assert_eq!(w.apex, "00");
    }

    #[test]
    fn poset_axioms_and_chain() {
        let d1 = FinPoset::chain(1);
        assert_eq!(d1.len(), 2);
        assert!(d1.leq(0, 1));
        assert!(!d1.leq(1, 0));
        assert!(d1.validate().pass());
        let cat = FinPoset::chain(2).as_category();
        assert!(validate_category(&cat).pass());
        assert_eq!(cat.morphism_count(), 3 + 3);
        let bad = FinPoset::from_pairs(
            vec!["a".into(), "b".into()],
            &[("a".into(), "b".into()), ("b".into(), "a".into())],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn poset_product_counts() {
        let p = FinPoset::chain(1).product(&FinPoset::chain(1));
        assert_eq!(p.len(), 4);
        let c = p.as_category();
        assert!(validate_category(&c).pass());
        assert_eq!(c.morphism_count(), 4 + 5);
    }
}
