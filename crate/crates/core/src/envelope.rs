//! Free finite-coproduct completion, truncated at family size `k`:
//! objects are tuples of base objects, morphisms an index map plus a
//! component for each position. The truncation keeps everything finite;
//! every claim downstream is "at truncation k".

use std::collections::HashMap;
use std::sync::Arc;

use crate::budget::SizeBudget;
use crate::category::{FinCategory, FunctorData, MorphClass};
use crate::error::{Error, Result};
use crate::localisation::certificate::{build_equivalence, CertBudget, CertStatus};
use crate::localisation::{equivalence_oracle, localize, EquivalenceVerdict, Localised, LocModel};
use crate::setup::LocalisationSetup;

pub struct EnvelopeCategory {
    pub base: Arc<FinCategory>,
    pub k: usize,
    pub carrier: Arc<FinCategory>,
    /// Canonical inclusion sending `c` to the one-element family `(c)`.
    pub inclusion: FunctorData,
    families: Vec<Vec<usize>>,
    data: Vec<(Vec<usize>, Vec<usize>)>,
}

fn family_id(base: &FinCategory, fam: &[usize]) -> String {
    let names: Vec<&str> = fam.iter().map(|&o| base.object_id(o)).collect();
    format!("[{}]", names.join(","))
}

fn mor_id(base: &FinCategory, src: &str, dst: &str, map: &[usize], comps: &[usize]) -> String {
    let parts: Vec<String> = map
        .iter()
        .zip(comps)
        .map(|(&j, &c)| format!("{j}:{}", base.morphism(c).id))
        .collect();
    format!("{src}->{dst}{{{}}}", parts.join(";"))
}

fn is_identity_data(base: &FinCategory, src: &[usize], dst: &[usize], map: &[usize], comps: &[usize]) -> bool {
    src == dst
        && map.iter().enumerate().all(|(i, &j)| i == j)
        && comps.iter().all(|&c| base.is_identity(c))
}

/// All tuples of base objects with length `0..=k`.
fn all_families(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for fam in &layer {
            for o in 0..n {
                let mut f = fam.clone();
                f.push(o);
                next.push(f);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

fn index_maps(src_len: usize, dst_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..src_len {
        let mut next = Vec::new();
        for m in &out {
            for j in 0..dst_len {
                let mut mm = m.clone();
                mm.push(j);
                next.push(mm);
            }
        }
        out = next;
    }
    out
}

pub fn coproduct_envelope(
    base: &Arc<FinCategory>,
    k: usize,
    budget: &SizeBudget,
) -> Result<EnvelopeCategory> {
    let fams = all_families(base.object_count(), k);
    if fams.len() > budget.max_objects {
        return Err(Error::budget(
            "building the coproduct completion",
            format!("{} families exceed {} objects", fams.len(), budget.max_objects),
        ));
    }
    let ids: Vec<String> = fams.iter().map(|f| family_id(base, f)).collect();

    // morphisms: an index map plus, per position, an element of the
    // relevant base hom-set; the case matching the identity is skipped
    // because the carrier generates it
    let mut mors: Vec<(String, String, String)> = Vec::new();
    let mut by_data: HashMap<(usize, usize, Vec<usize>, Vec<usize>), String> = HashMap::new();
    for (ai, a) in fams.iter().enumerate() {
        for (bi, b) in fams.iter().enumerate() {
            for map in index_maps(a.len(), b.len()) {
                let mut comp_choices: Vec<Vec<usize>> = vec![Vec::new()];
                for (i, &src_o) in a.iter().enumerate() {
                    let hom = base.hom(src_o, b[map[i]]);
                    let mut next = Vec::new();
                    for c in &comp_choices {
                        for &h in &hom {
                            let mut cc = c.clone();
                            cc.push(h);
                            next.push(cc);
                        }
                    }
                    comp_choices = next;
                }
                for comps in comp_choices {
                    let id = if is_identity_data(base, a, b, &map, &comps) {
                        crate::category::identity_name(&ids[ai])
                    } else {
                        let id = mor_id(base, &ids[ai], &ids[bi], &map, &comps);
                        mors.push((id.clone(), ids[ai].clone(), ids[bi].clone()));
                        id
                    };
                    by_data.insert((ai, bi, map.clone(), comps), id);
                    if mors.len() + fams.len() > budget.max_morphisms {
                        return Err(Error::budget(
                            "building the coproduct completion",
                            format!("more than {} morphisms", budget.max_morphisms),
                        ));
                    }
                }
            }
        }
    }

    // componentwise composition over the shared middle family
    let mut datas: Vec<(usize, usize, Vec<usize>, Vec<usize>, String)> = by_data
        .iter()
        .map(|((a, b, m, c), id)| (*a, *b, m.clone(), c.clone(), id.clone()))
        .collect();
    datas.sort_by(|x, y| x.4.cmp(&y.4));
    let mut comps_table: Vec<(String, String, String)> = Vec::new();
    for f in &datas {
        for g in &datas {
            if f.1 != g.0 {
                continue;
            }
            let fid = &f.4;
            let gid = &g.4;
            if fid.starts_with(crate::category::ID_PREFIX)
                || gid.starts_with(crate::category::ID_PREFIX)
            {
                continue;
            }
            let map: Vec<usize> = f.2.iter().map(|&j| g.2[j]).collect();
            let comps: Vec<usize> = f
                .3
                .iter()
                .enumerate()
                .map(|(i, &c)| base.compose(g.3[f.2[i]], c).unwrap())
                .collect();
            let hid = by_data[&(f.0, g.1, map, comps)].clone();
            comps_table.push((gid.clone(), fid.clone(), hid));
        }
    }

    let carrier = Arc::new(FinCategory::from_parts(ids.clone(), mors, comps_table)?);

    let mut families = vec![Vec::new(); carrier.object_count()];
    for (fam, id) in fams.iter().zip(&ids) {
        families[carrier.object_idx(id).unwrap()] = fam.clone();
    }
    let mut data = vec![(Vec::new(), Vec::new()); carrier.morphism_count()];
    for (_, _, map, comps, id) in &datas {
        data[carrier.morphism_idx(id).unwrap()] = (map.clone(), comps.clone());
    }

    let mut omap = vec![0; base.object_count()];
    for o in 0..base.object_count() {
        omap[o] = carrier.object_idx(&family_id(base, &[o])).unwrap();
    }
    let mut mmap = vec![0; base.morphism_count()];
    for m in 0..base.morphism_count() {
        let mor = base.morphism(m);
        mmap[m] = if base.is_identity(m) {
            carrier.identity_of(omap[mor.src])
        } else {
            let id = mor_id(
                base,
                &family_id(base, &[mor.src]),
                &family_id(base, &[mor.dst]),
                &[0],
                &[m],
            );
            carrier.morphism_idx(&id).unwrap()
        };
    }
    let inclusion =
        FunctorData { source: base.clone(), target: carrier.clone(), omap, mmap };

    Ok(EnvelopeCategory { base: base.clone(), k, carrier, inclusion, families, data })
}

impl EnvelopeCategory {
    pub fn family(&self, obj: usize) -> &[usize] {
        &self.families[obj]
    }

    pub fn object_of(&self, fam: &[usize]) -> Option<usize> {
        self.carrier.object_idx(&family_id(&self.base, fam))
    }

    /// Initial object: the empty family.
    pub fn initial(&self) -> usize {
        self.object_of(&[]).unwrap()
    }

    /// Index map and per-position components of a carrier morphism.
    pub fn morphism_data(&self, m: usize) -> (&[usize], &[usize]) {
        (&self.data[m].0, &self.data[m].1)
    }

    pub fn morphism_of(
        &self,
        src: usize,
        dst: usize,
        map: &[usize],
        comps: &[usize],
    ) -> Option<usize> {
        let a = &self.families[src];
        let b = &self.families[dst];
        if is_identity_data(&self.base, a, b, map, comps) {
            return Some(self.carrier.identity_of(src));
        }
        let id = mor_id(
            &self.base,
            self.carrier.object_id(src),
            self.carrier.object_id(dst),
            map,
            comps,
        );
        self.carrier.morphism_idx(&id)
    }

    /// Concatenated family, when it stays within the truncation.
    pub fn concat(&self, a: usize, b: usize) -> Option<usize> {
        let mut fam = self.families[a].clone();
        fam.extend_from_slice(&self.families[b]);
        if fam.len() > self.k {
            return None;
        }
        self.object_of(&fam)
    }

    /// The two inclusions `a → a ⊔ b` and `b → a ⊔ b`.
    pub fn coprojections(&self, a: usize, b: usize) -> Option<(usize, usize)> {
        let apex = self.concat(a, b)?;
        let la = self.families[a].len();
        let lb = self.families[b].len();
        let map1: Vec<usize> = (0..la).collect();
        let comps1: Vec<usize> =
            self.families[a].iter().map(|&o| self.base.identity_of(o)).collect();
        let map2: Vec<usize> = (la..la + lb).collect();
        let comps2: Vec<usize> =
            self.families[b].iter().map(|&o| self.base.identity_of(o)).collect();
        Some((
            self.morphism_of(a, apex, &map1, &comps1)?,
            self.morphism_of(b, apex, &map2, &comps2)?,
        ))
    }
}

/// Lift of a class: bijective index map with every component a member.
pub fn envelope_class(env: &EnvelopeCategory, s: &MorphClass) -> Result<MorphClass> {
    if s.carrier.as_ref() != env.base.as_ref() {
        return Err(Error::Precondition("class does not live on the envelope base".into()));
    }
    let mut members = Vec::new();
    for m in 0..env.carrier.morphism_count() {
        if env.carrier.is_identity(m) {
            members.push(m);
            continue;
        }
        let (map, comps) = env.morphism_data(m);
        let mor = env.carrier.morphism(m);
        let bijective = env.family(mor.src).len() == env.family(mor.dst).len() && {
            let mut seen = vec![false; env.family(mor.dst).len()];
            map.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        };
        if bijective && comps.iter().all(|&c| s.contains(c)) {
            members.push(m);
        }
    }
    Ok(MorphClass::from_indices(env.carrier.clone(), &members))
}

/// Componentwise lift of a functor between the two envelopes.
pub fn envelope_functor(
    env_c: &EnvelopeCategory,
    env_d: &EnvelopeCategory,
    t: &FunctorData,
) -> Result<FunctorData> {
    if t.source.as_ref() != env_c.base.as_ref() || t.target.as_ref() != env_d.base.as_ref() {
        return Err(Error::Precondition("functor does not match the envelope bases".into()));
    }
    let mut omap = vec![0; env_c.carrier.object_count()];
    for o in 0..env_c.carrier.object_count() {
        let fam: Vec<usize> = env_c.family(o).iter().map(|&x| t.apply_obj(x)).collect();
        omap[o] = env_d
            .object_of(&fam)
            .ok_or_else(|| Error::Invalid("image family missing from the envelope".into()))?;
    }
    let mut mmap = vec![0; env_c.carrier.morphism_count()];
    for m in 0..env_c.carrier.morphism_count() {
        let mor = env_c.carrier.morphism(m);
        if env_c.carrier.is_identity(m) {
            mmap[m] = env_d.carrier.identity_of(omap[mor.src]);
            continue;
        }
        let (map, comps) = env_c.morphism_data(m);
        let t_comps: Vec<usize> = comps.iter().map(|&c| t.apply_mor(c)).collect();
        mmap[m] = env_d
            .morphism_of(omap[mor.src], omap[mor.dst], map, &t_comps)
            .ok_or_else(|| Error::Invalid("image morphism missing from the envelope".into()))?;
    }
    Ok(FunctorData {
        source: env_c.carrier.clone(),
        target: env_d.carrier.clone(),
        omap,
        mmap,
    })
}

/// The whole localisation problem transported to the truncated envelopes.
pub fn envelope_setup(
    setup: &LocalisationSetup,
    k: usize,
    budget: &SizeBudget,
) -> Result<(EnvelopeCategory, EnvelopeCategory, LocalisationSetup)> {
    let env_c = coproduct_envelope(&setup.c, k, budget)?;
    let env_d = coproduct_envelope(&setup.d, k, budget)?;
    let t = envelope_functor(&env_c, &env_d, &setup.t)?;
    let s = envelope_class(&env_c, &setup.s)?;
    let sprime = envelope_class(&env_d, &setup.sprime)?;
    let lifted = LocalisationSetup::new(t, s, sprime)?;
    Ok((env_c, env_d, lifted))
}

fn is_initial_in_model(model: &LocModel, obj: usize) -> bool {
    let apex = model.p.apply_obj(obj);
    (0..model.category.object_count()).all(|x| model.category.hom(apex, x).len() == 1)
}

fn is_coproduct_in_model(model: &LocModel, apex: usize, j1: usize, j2: usize) -> bool {
    let cat = &model.category;
    let (a, b) = (cat.morphism(j1).src, cat.morphism(j2).src);
    for x in 0..cat.object_count() {
        let from_a = cat.hom(a, x);
        let from_b = cat.hom(b, x);
        let from_apex = cat.hom(apex, x);
        for &u in &from_a {
            for &v in &from_b {
                let matched = from_apex
                    .iter()
                    .filter(|&&w| cat.compose(w, j1) == Some(u) && cat.compose(w, j2) == Some(v))
                    .count();
                if matched != 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Concatenation computes binary coproducts in the localised model, for
/// every pair within the truncation; the empty family stays initial.
fn coproducts_descend(env: &EnvelopeCategory, model: &LocModel) -> bool {
    if !is_initial_in_model(model, env.initial()) {
        return false;
    }
    for a in 0..env.carrier.object_count() {
        for b in 0..env.carrier.object_count() {
            let Some((j1, j2)) = env.coprojections(a, b) else { continue };
            let apex = model.p.apply_obj(env.concat(a, b).unwrap());
            if !is_coproduct_in_model(model, apex, model.p.apply_mor(j1), model.p.apply_mor(j2)) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct EnvelopeLiftReport {
    pub k: usize,
    /// Localising commutes with the (truncated) coproducts on both sides.
    pub coproducts: bool,
    pub verdict: EquivalenceVerdict,
    pub status: CertStatus,
}

/// Check that the equivalence survives the coproduct completion at
/// truncation `k`. Requires the base problem to carry a certified
/// equivalence first.
pub fn check_envelope_lift(
    setup: &LocalisationSetup,
    k: usize,
    budget: &CertBudget,
) -> Result<EnvelopeLiftReport> {
    let cert = build_equivalence(setup, budget)?;
    if cert.status != CertStatus::Certified {
        return Err(Error::Precondition("base equivalence is not certified".into()));
    }
    let (env_c, env_d, lifted) = envelope_setup(setup, k, &SizeBudget::default())?;

    let cm = match localize(&lifted.c, &lifted.s, &budget.loc)? {
        Localised::Model(m) => m,
        Localised::Undecided { reason } => {
            return Ok(EnvelopeLiftReport {
                k,
                coproducts: false,
                verdict: EquivalenceVerdict::Undecided { reason: reason.clone() },
                status: CertStatus::Unverified { reason },
            })
        }
    };
    let dm = match localize(&lifted.d, &lifted.sprime, &budget.loc)? {
        Localised::Model(m) => m,
        Localised::Undecided { reason } => {
            return Ok(EnvelopeLiftReport {
                k,
                coproducts: false,
                verdict: EquivalenceVerdict::Undecided { reason: reason.clone() },
                status: CertStatus::Unverified { reason },
            })
        }
    };

    let coproducts = coproducts_descend(&env_c, &cm) && coproducts_descend(&env_d, &dm);
    let verdict = equivalence_oracle(&lifted, &budget.loc)?;
    let status = if coproducts && verdict == EquivalenceVerdict::Equivalence {
        CertStatus::Certified
    } else {
        let reason = if !coproducts {
            "coproducts are not computed by concatenation in the localised envelope".to_string()
        } else {
            format!("lifted functor: {verdict:?}")
        };
        CertStatus::Unverified { reason }
    };
    Ok(EnvelopeLiftReport { k, coproducts, verdict, status })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{validate_category, validate_class};
    use crate::fixtures;

    #[test]
    fn point_envelope_counts_maps_of_finite_sets() {
        let env = coproduct_envelope(&fixtures::pt(), 2, &SizeBudget::default()).unwrap();
        assert_eq!(env.carrier.object_count(), 3);
        assert!(validate_category(&env.carrier).pass());
        for m in 0..=2usize {
            for n in 0..=2usize {
                let a = env.object_of(&vec![0; m]).unwrap();
                let b = env.object_of(&vec![0; n]).unwrap();
                assert_eq!(env.carrier.hom(a, b).len(), n.pow(m as u32), "hom({m},{n})");
            }
        }
        let one = env.object_of(&[0]).unwrap();
        assert_eq!(env.concat(one, one), env.object_of(&[0, 0]));
    }

    #[test]
    fn truncation_one_adds_exactly_an_initial_object() {
        for base in [fixtures::arrow(), fixtures::chain2(), fixtures::par()] {
            let env = coproduct_envelope(&base, 1, &SizeBudget::default()).unwrap();
            assert_eq!(env.carrier.object_count(), base.object_count() + 1);
            let init = env.initial();
            for x in 0..env.carrier.object_count() {
                assert_eq!(env.carrier.hom(init, x).len(), 1);
            }
            assert!(env.inclusion.is_fully_faithful());
        }
    }

    #[test]
    fn morphism_count_matches_direct_enumeration() {
        let base = fixtures::arrow();
        let env = coproduct_envelope(&base, 2, &SizeBudget::default()).unwrap();
        assert!(validate_category(&env.carrier).pass());
        // independent count: sum over family pairs and index maps of the
        // product of base hom sizes
        let fams = all_families(base.object_count(), 2);
        let mut expected = 0usize;
        for a in &fams {
            for b in &fams {
                for map in index_maps(a.len(), b.len()) {
                    expected += a
                        .iter()
                        .enumerate()
                        .map(|(i, &o)| base.hom(o, b[map[i]]).len())
                        .product::<usize>();
                }
            }
        }
        assert_eq!(env.carrier.morphism_count(), expected);
        assert!(env.inclusion.is_fully_faithful());
    }

    #[test]
    fn identity_class_lifts_to_relabelings() {
        let base = fixtures::pt();
        let env = coproduct_envelope(&base, 2, &SizeBudget::default()).unwrap();
        let lifted = envelope_class(&env, &MorphClass::identities(base)).unwrap();
        assert!(validate_class(&lifted).pass());
        // identities on the three families plus the swap on the pair
        assert_eq!(lifted.len(), 4);
        let swap = lifted
            .member_indices()
            .into_iter()
            .find(|&m| !env.carrier.is_identity(m))
            .unwrap();
        let (map, comps) = env.morphism_data(swap);
        assert_eq!(map, &[1, 0]);
        assert!(comps.iter().all(|&c| env.base.is_identity(c)));
    }

    #[test]
    fn certified_base_lifts_to_the_envelope() {
        let setup = fixtures::riou_fix();
        let report = check_envelope_lift(&setup, 2, &CertBudget::default()).unwrap();
        assert!(report.coproducts);
        assert_eq!(report.verdict, EquivalenceVerdict::Equivalence);
        assert_eq!(report.status, CertStatus::Certified);
    }

    #[test]
    fn uncertified_base_is_rejected() {
        let setup = fixtures::pt_into_pt_pt();
        assert!(check_envelope_lift(&setup, 2, &CertBudget::default()).is_err());
    }
}
