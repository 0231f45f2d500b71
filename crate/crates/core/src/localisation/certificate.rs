//! The explicit equivalence data between the two localised categories: a
//! chosen resolution per object, canonical comparison zig-zags between
//! resolutions, the transported arrow map, and the verifications that make
//! the whole package a certificate rather than a construction.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::category::{validate_functor, FinPoset, FunctorData};
use crate::comma::{slice_i, SliceCategory, SliceObj};
use crate::error::{Error, Result};
use crate::hypotheses::{all_hold, check_t0, CheckBudget};
use crate::setup::{LiftedSetup, LocalisationSetup};

use super::model::{ExprStep, LocModel};
use super::{induced_functor, localize, LocBudget, Localised};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertStatus {
    Certified,
    Unverified { reason: String },
}

#[derive(Debug, Clone)]
pub struct PhiEntry {
    /// The arrow of D this entry transports.
    pub f: String,
    /// Chosen object of the slice over the arrow.
    pub representative: String,
    /// The transported arrow as a word over C, inverted steps marked.
    pub word: Vec<ExprStep>,
    /// The word evaluated in the source model.
    pub value: usize,
}

#[derive(Debug, Clone)]
pub struct EquivalenceCertificate {
    pub cm: LocModel,
    pub dm: LocModel,
    /// Per object of D, the chosen resolution (an object id of its slice).
    pub sections: Vec<String>,
    /// Comparison zig-zags between slice objects, keyed `d|from|to`, as
    /// words over C with inverted steps marked.
    pub gamma: BTreeMap<String, Vec<ExprStep>>,
    /// Per morphism of D, the transported arrow.
    pub phi: Vec<PhiEntry>,
    /// The transport D → model of S⁻¹C on the nose.
    pub f_data: FunctorData,
    /// The induced functor between the models.
    pub fbar: FunctorData,
    /// Per object of C, the natural isomorphism F̄T̄(c) → c in the model.
    pub unit: Vec<usize>,
    /// Per object of D, the natural isomorphism d → T̄F̄(d) in the model.
    pub counit: Vec<usize>,
    /// Named verification outcomes, in order.
    pub checks: Vec<(String, bool)>,
    pub status: CertStatus,
}

#[derive(Debug, Clone)]
pub struct CertBudget {
    pub check: CheckBudget,
    pub loc: LocBudget,
    /// Rotates every canonical choice; used to test choice independence.
    pub seed: usize,
}

impl Default for CertBudget {
    fn default() -> CertBudget {
        CertBudget { check: CheckBudget::default(), loc: LocBudget::default(), seed: 0 }
    }
}

/// Undirected path between two slice objects, as a word over the base
/// category under the forgetful functor.
fn zig_zag(slice: &SliceCategory, from: usize, to: usize) -> Option<Vec<ExprStep>> {
    let c = &slice.carrier;
    let mut prev: Vec<Option<(usize, usize, bool)>> = vec![None; c.object_count()];
    let mut seen = vec![false; c.object_count()];
    let mut queue = VecDeque::new();
    seen[from] = true;
    queue.push_back(from);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for m in 0..c.morphism_count() {
            if c.is_identity(m) {
                continue;
            }
            let mor = c.morphism(m);
            for (next, inverted) in [(mor.dst, false), (mor.src, true)] {
                let here = if inverted { mor.dst } else { mor.src };
                if here == x && !seen[next] {
                    seen[next] = true;
                    prev[next] = Some((x, m, inverted));
                    queue.push_back(next);
                }
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let mut steps = Vec::new();
    let mut at = to;
    while at != from {
        let (back, m, inverted) = prev[at].expect("reached object has a predecessor");
        steps.push((slice.forgetful.apply_mor(m), inverted));
        at = back;
    }
    steps.reverse();
    Some(steps)
}

fn invert_word(word: &[ExprStep]) -> Vec<ExprStep> {
    word.iter().rev().map(|&(m, inv)| (m, !inv)).collect()
}

struct Builder<'a> {
    setup: &'a LocalisationSetup,
    cm: LocModel,
    object_slices: Vec<SliceCategory>,
    lifted1: LiftedSetup,
    arrow_slices: Vec<SliceCategory>,
    sections: Vec<usize>,
}

struct ArrowFace {
    g_arrow: usize,
    /// Indices in the slices over the source and target objects.
    dg: usize,
    rg: usize,
}

impl<'a> Builder<'a> {
    fn face(&self, f: usize, g_obj: usize) -> ArrowFace {
        let slice = &self.arrow_slices[f];
        let obj = slice
            .decode_object(slice.carrier.object_id(g_obj))
            .expect("decodable slice object");
        let c_id = self.lifted1.setup.c.object_id(obj.c);
        let diag = self.lifted1.c_diag.decode_object(c_id).expect("diagram object");
        let s_id = &self.lifted1.setup.d.morphism(obj.s).id;
        let comps = self.lifted1.d_diag.morphism_components(s_id).expect("components");
        let mor = self.setup.d.morphism(f);
        let locate = |d: usize, c: usize, s: usize| {
            let id = self.object_slices[d]
                .object_id_of(&SliceObj { c, s, leg: None })
                .expect("face object in slice");
            self.object_slices[d].carrier.object_idx(&id).expect("indexed")
        };
        ArrowFace {
            g_arrow: diag.arrows[&(0, 1)],
            dg: locate(mor.src, diag.assign[0], comps[0]),
            rg: locate(mor.dst, diag.assign[1], comps[1]),
        }
    }

    fn carrier_of(&self, d: usize, slice_obj: usize) -> usize {
        self.object_slices[d].forgetful.apply_obj(slice_obj)
    }

    /// The transported word for f between chosen resolutions, through a
    /// chosen slice object over f.
    fn phi_word(&self, f: usize, c1: usize, c0: usize, g_obj: usize) -> Result<Vec<ExprStep>> {
        let mor = self.setup.d.morphism(f);
        let face = self.face(f, g_obj);
        let into = zig_zag(&self.object_slices[mor.src], c0, face.dg)
            .ok_or_else(|| Error::Invalid("slice over the source is disconnected".into()))?;
        let out = zig_zag(&self.object_slices[mor.dst], c1, face.rg)
            .ok_or_else(|| Error::Invalid("slice over the target is disconnected".into()))?;
        let mut word = into;
        word.push((face.g_arrow, false));
        word.extend(invert_word(&out));
        Ok(word)
    }

    fn eval(&self, word: &[ExprStep], d: usize, c0: usize) -> Result<usize> {
        self.cm.eval_expr(word, self.cm.model_object(self.carrier_of(d, c0)))
    }
}

fn model_or_reason(loc: Localised) -> std::result::Result<LocModel, String> {
    match loc {
        Localised::Model(m) => Ok(m),
        Localised::Undecided { reason } => Err(reason),
    }
}

/// Build the transport F, the induced functor between the models, and the
/// natural isomorphisms on both sides, verifying every identity the
/// construction relies on by evaluation in the decided models.
pub fn build_equivalence(
    setup: &LocalisationSetup,
    budget: &CertBudget,
) -> Result<EquivalenceCertificate> {
    let t0 = check_t0(setup, &budget.check)?;
    if !all_hold(&t0) {
        let offender = t0.iter().find(|r| !r.status.is_holds()).expect("some grade failed");
        return Err(Error::Precondition(format!(
            "connectivity grade {} does not hold: {}",
            offender.id, offender.status
        )));
    }

    let cm = match model_or_reason(localize(&setup.c, &setup.s, &budget.loc)?) {
        Ok(m) => m,
        Err(reason) => return unverified(setup, reason),
    };
    let dm = match model_or_reason(localize(&setup.d, &setup.sprime, &budget.loc)?) {
        Ok(m) => m,
        Err(reason) => return unverified(setup, reason),
    };

    let mut object_slices = Vec::new();
    for d in 0..setup.d.object_count() {
        object_slices.push(slice_i(setup, d)?);
    }
    let lifted1 = setup.lift(&FinPoset::chain(1), &budget.check.size)?;
    let mut arrow_slices = Vec::new();
    for f in 0..setup.d.morphism_count() {
        let d_obj = lifted1.d_diag.chain_object(&[f])?;
        arrow_slices.push(slice_i(&lifted1.setup, d_obj)?);
    }

    // canonical choices: carrier object ids are sorted, so index 0 is the
    // lexicographic least; the seed rotates the choice
    let sections: Vec<usize> = object_slices
        .iter()
        .map(|s| budget.seed % s.carrier.object_count())
        .collect();
    let reps: Vec<usize> = arrow_slices
        .iter()
        .map(|s| budget.seed % s.carrier.object_count())
        .collect();

    let b = Builder { setup, cm, object_slices, lifted1, arrow_slices, sections };

    let mut checks: Vec<(String, bool)> = Vec::new();
    let push = |checks: &mut Vec<(String, bool)>, name: &str, ok: bool| {
        checks.push((name.to_string(), ok));
    };

    // the transported arrows between the chosen resolutions
    let mut phi = Vec::new();
    let mut phi_value = Vec::new();
    for f in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(f);
        let word = b.phi_word(f, b.sections[mor.dst], b.sections[mor.src], reps[f])?;
        let value = b.eval(&word, mor.src, b.sections[mor.src])?;
        phi_value.push(value);
        phi.push(PhiEntry {
            f: mor.id.clone(),
            representative: b.arrow_slices[f].carrier.object_id(reps[f]).to_string(),
            word,
            value,
        });
    }

    // independence from the slice representative
    let mut independent = true;
    for f in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(f);
        for g_obj in 0..b.arrow_slices[f].carrier.object_count() {
            let word = b.phi_word(f, b.sections[mor.dst], b.sections[mor.src], g_obj)?;
            if b.eval(&word, mor.src, b.sections[mor.src])? != phi_value[f] {
                independent = false;
            }
        }
    }
    push(&mut checks, "phi-independence", independent);

    // change of resolutions: the value conjugates by the comparison words
    let mut gamma: BTreeMap<String, Vec<ExprStep>> = BTreeMap::new();
    for d in 0..setup.d.object_count() {
        let slice = &b.object_slices[d];
        for x in 0..slice.carrier.object_count() {
            for y in 0..slice.carrier.object_count() {
                let word = zig_zag(slice, x, y)
                    .ok_or_else(|| Error::Invalid("slice is disconnected".into()))?;
                gamma.insert(
                    format!(
                        "{}|{}|{}",
                        setup.d.object_id(d),
                        slice.carrier.object_id(x),
                        slice.carrier.object_id(y)
                    ),
                    word,
                );
            }
        }
    }
    let mut change_ok = true;
    for f in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(f);
        for c0 in 0..b.object_slices[mor.src].carrier.object_count() {
            for c1 in 0..b.object_slices[mor.dst].carrier.object_count() {
                let direct = b.eval(&b.phi_word(f, c1, c0, reps[f])?, mor.src, c0)?;
                let into = zig_zag(&b.object_slices[mor.src], c0, b.sections[mor.src])
                    .expect("connected");
                let out = zig_zag(&b.object_slices[mor.dst], c1, b.sections[mor.dst])
                    .expect("connected");
                let mut word = into;
                word.extend(phi[f].word.iter().copied());
                word.extend(invert_word(&out));
                if b.eval(&word, mor.src, c0)? != direct {
                    change_ok = false;
                }
            }
        }
    }
    push(&mut checks, "change-of-resolution", change_ok);

    // identity and cocycle rules make the transport a functor
    let mut omap_ids: BTreeMap<String, String> = BTreeMap::new();
    for d in 0..setup.d.object_count() {
        let c = b.carrier_of(d, b.sections[d]);
        omap_ids.insert(
            setup.d.object_id(d).to_string(),
            b.cm.category.object_id(b.cm.model_object(c)).to_string(),
        );
    }
    let mut identity_ok = true;
    for d in 0..setup.d.object_count() {
        let f = setup.d.identity_of(d);
        let c = b.cm.model_object(b.carrier_of(d, b.sections[d]));
        if phi_value[f] != b.cm.category.identity_of(c) {
            identity_ok = false;
        }
    }
    push(&mut checks, "identity-rule", identity_ok);

    let mut cocycle_ok = true;
    for f1 in 0..setup.d.morphism_count() {
        for f2 in 0..setup.d.morphism_count() {
            if setup.d.morphism(f2).src != setup.d.morphism(f1).dst {
                continue;
            }
            let f21 = setup.d.compose(f2, f1).expect("total");
            if b.cm.category.compose(phi_value[f2], phi_value[f1]) != Some(phi_value[f21]) {
                cocycle_ok = false;
            }
        }
    }
    push(&mut checks, "cocycle-rule", cocycle_ok);

    // marked arrows are transported to isomorphisms
    let mut inverts = true;
    for f in setup.sprime.member_indices() {
        if b.cm.inverse_in_model(phi_value[f]).is_none() {
            inverts = false;
        }
    }
    push(&mut checks, "marked-inverted", inverts);

    let mut mmap_ids: BTreeMap<String, String> = BTreeMap::new();
    for f in 0..setup.d.morphism_count() {
        mmap_ids.insert(
            setup.d.morphism(f).id.clone(),
            b.cm.category.morphism(phi_value[f]).id.clone(),
        );
    }
    let f_data =
        FunctorData::from_maps(setup.d.clone(), b.cm.category.clone(), &omap_ids, &mmap_ids)?;
    push(&mut checks, "functor-laws", validate_functor(&f_data, None).report.pass());

    // descend along the quotient of D: evaluate every model expression
    // through the transport
    let mut fbar_omap = vec![0usize; dm.category.object_count()];
    for d in 0..setup.d.object_count() {
        fbar_omap[dm.model_object(d)] = f_data.omap[d];
    }
    let mut fbar_mmap = vec![0usize; dm.category.morphism_count()];
    let mut descent_ok = true;
    for m in 0..dm.category.morphism_count() {
        let src = dm.category.morphism(m).src;
        let mut acc = b.cm.category.identity_of(fbar_omap[src]);
        for &(step, inverted) in &dm.expr[m] {
            let mut img = phi_value[step];
            if inverted {
                match b.cm.inverse_in_model(img) {
                    Some(inv) => img = inv,
                    None => {
                        descent_ok = false;
                        continue;
                    }
                }
            }
            match b.cm.category.compose(img, acc) {
                Some(next) => acc = next,
                None => descent_ok = false,
            }
        }
        fbar_mmap[m] = acc;
    }
    let fbar = FunctorData {
        source: dm.category.clone(),
        target: b.cm.category.clone(),
        omap: fbar_omap,
        mmap: fbar_mmap,
    };
    let fbar_valid = descent_ok && validate_functor(&fbar, None).report.pass();
    push(&mut checks, "descent", fbar_valid);

    // unit: compare c, seen as its own resolution of T(c), with the
    // chosen resolution
    let mut unit = Vec::new();
    let mut unit_ok = true;
    for c in 0..setup.c.object_count() {
        let d = setup.t.apply_obj(c);
        let slice = &b.object_slices[d];
        let self_id = slice
            .object_id_of(&SliceObj { c, s: setup.d.identity_of(d), leg: None })
            .ok_or_else(|| Error::Invalid("object is not its own resolution".into()))?;
        let self_idx = slice.carrier.object_idx(&self_id).expect("indexed");
        let word = zig_zag(slice, self_idx, b.sections[d]).expect("connected");
        let to_section = b.eval(&word, d, self_idx)?;
        match b.cm.inverse_in_model(to_section) {
            Some(inv) => unit.push(inv),
            None => {
                unit_ok = false;
                unit.push(to_section);
            }
        }
    }
    for m in 0..setup.c.morphism_count() {
        let mor = setup.c.morphism(m);
        let lhs = b.cm.category.compose(unit[mor.dst], f_data.apply_mor(setup.t.apply_mor(m)));
        let rhs = b.cm.category.compose(b.cm.p.apply_mor(m), unit[mor.src]);
        if lhs != rhs || lhs.is_none() {
            unit_ok = false;
        }
    }
    push(&mut checks, "unit-natural", unit_ok);

    // counit: the chosen resolution arrows become isomorphisms downstairs
    let tbar = induced_functor(setup, &b.cm, &dm)?;
    let mut counit = Vec::new();
    let mut counit_ok = true;
    for d in 0..setup.d.object_count() {
        let s_d = b.object_slices[d]
            .decode_object(b.object_slices[d].carrier.object_id(b.sections[d]))
            .expect("decodable")
            .s;
        let q_s = dm.p.apply_mor(s_d);
        if dm.inverse_in_model(q_s).is_none() {
            counit_ok = false;
        }
        counit.push(q_s);
    }
    for f in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(f);
        let lhs = dm.category.compose(tbar.apply_mor(fbar.mmap[dm.p.apply_mor(f)]), counit[mor.src]);
        let rhs = dm.category.compose(counit[mor.dst], dm.p.apply_mor(f));
        if lhs != rhs || lhs.is_none() {
            counit_ok = false;
        }
    }
    push(&mut checks, "counit-natural", counit_ok);

    let sections: Vec<String> = (0..setup.d.object_count())
        .map(|d| b.object_slices[d].carrier.object_id(b.sections[d]).to_string())
        .collect();
    let status = match checks.iter().find(|(_, ok)| !ok) {
        None => CertStatus::Certified,
        Some((name, _)) => CertStatus::Unverified { reason: format!("check `{name}` failed") },
    };

    Ok(EquivalenceCertificate {
        cm: b.cm,
        dm,
        sections,
        gamma,
        phi,
        f_data,
        fbar,
        unit,
        counit,
        checks,
        status,
    })
}

fn unverified(setup: &LocalisationSetup, reason: String) -> Result<EquivalenceCertificate> {
    // no decided model: return an empty shell carrying the reason
    let cm = LocModel {
        base: setup.c.clone(),
        class: setup.s.clone(),
        category: setup.c.clone(),
        p: FunctorData::identity(setup.c.clone()),
        engine: super::model::Engine::Rewriting,
        expr: Vec::new(),
    };
    let dm = LocModel {
        base: setup.d.clone(),
        class: setup.sprime.clone(),
        category: setup.d.clone(),
        p: FunctorData::identity(setup.d.clone()),
        engine: super::model::Engine::Rewriting,
        expr: Vec::new(),
    };
    Ok(EquivalenceCertificate {
        cm,
        dm,
        sections: Vec::new(),
        gamma: BTreeMap::new(),
        phi: Vec::new(),
        f_data: FunctorData::identity(setup.d.clone()),
        fbar: FunctorData::identity(setup.d.clone()),
        unit: Vec::new(),
        counit: Vec::new(),
        checks: Vec::new(),
        status: CertStatus::Unverified { reason },
    })
}

/// Two certificates over the same setup differ only by canonical choices:
/// exhibit the comparison isomorphism between their transports from the
/// stored zig-zag data and check its naturality.
pub fn choice_comparison(
    a: &EquivalenceCertificate,
    b: &EquivalenceCertificate,
    setup: &LocalisationSetup,
) -> Result<bool> {
    let cm = &a.cm;
    if cm.category.as_ref() != b.cm.category.as_ref() {
        return Ok(false);
    }
    let mut comp = Vec::new();
    for d in 0..setup.d.object_count() {
        let key = format!("{}|{}|{}", setup.d.object_id(d), a.sections[d], b.sections[d]);
        let word = a
            .gamma
            .get(&key)
            .ok_or_else(|| Error::Invalid(format!("missing comparison `{key}`")))?;
        let src = a.f_data.omap[d];
        comp.push(cm.eval_expr(word, src)?);
    }
    for f in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(f);
        let lhs = cm.category.compose(comp[mor.dst], a.f_data.mmap[f]);
        let rhs = cm.category.compose(b.f_data.mmap[f], comp[mor.src]);
        if lhs != rhs || lhs.is_none() {
            return Ok(false);
        }
    }
    Ok(comp.iter().all(|&m| {
        let mm = cm.category.morphism(m);
        cm.category.hom(mm.dst, mm.src).into_iter().any(|w| {
            cm.category.compose(w, m) == Some(cm.category.identity_of(mm.src))
                && cm.category.compose(m, w) == Some(cm.category.identity_of(mm.dst))
        })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localisation::{equivalence_oracle, EquivalenceVerdict};

    #[test]
    fn embedding_fixture_is_certified() {
        let setup = fixtures::riou_fix();
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        assert_eq!(cert.status, CertStatus::Certified, "{:?}", cert.checks);
        // both objects transport onto the single resolution carrier
        assert_eq!(cert.f_data.omap[0], cert.f_data.omap[1]);
        assert!(matches!(
            equivalence_oracle(&setup, &LocBudget::default()).unwrap(),
            EquivalenceVerdict::Equivalence
        ));
    }

    #[test]
    fn identity_setup_is_certified() {
        let setup = fixtures::identity_setup(fixtures::chain2());
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        assert_eq!(cert.status, CertStatus::Certified, "{:?}", cert.checks);
    }

    #[test]
    fn failing_grade_blocks_the_build() {
        let setup = fixtures::pt_into_pt_pt();
        assert!(build_equivalence(&setup, &CertBudget::default()).is_err());
    }

    #[test]
    fn all_inverted_identity_setup_certifies() {
        // S = S′ = everything on Arrow: localisation is the contractible
        // groupoid on two objects
        let c = fixtures::arrow();
        let setup = crate::setup::LocalisationSetup::new(
            FunctorData::identity(c.clone()),
            crate::category::MorphClass::all(c.clone()),
            crate::category::MorphClass::all(c),
        )
        .unwrap();
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        assert_eq!(cert.status, CertStatus::Certified, "{:?}", cert.checks);
    }

    #[test]
    fn reseeded_choices_stay_naturally_isomorphic() {
        let setup = fixtures::riou_fix();
        let a = build_equivalence(&setup, &CertBudget::default()).unwrap();
        let b = build_equivalence(
            &setup,
            &CertBudget { seed: 1, ..CertBudget::default() },
        )
        .unwrap();
        assert!(choice_comparison(&a, &b, &setup).unwrap());
    }
}
