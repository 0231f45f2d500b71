//! Extending a functor out of D along the quotient to the localised
//! model: the extension is the descended functor composed with a chosen
//! quasi-inverse, and the comparison transformation is assembled from the
//! resolution arrows.

use crate::category::FunctorData;
use crate::error::{Error, Result};
use crate::setup::LocalisationSetup;

use super::certificate::{CertStatus, EquivalenceCertificate};

#[derive(Debug, Clone)]
pub struct KanExtensionResult {
    /// The extension out of the model of S′⁻¹D.
    pub rf: FunctorData,
    /// Per object of D, the comparison morphism F(d) → RF(Q(d)).
    pub eta: Vec<usize>,
    /// The comparison recomputed from every resolution agrees.
    pub independent: bool,
    /// The comparison commutes with every arrow of D.
    pub natural: bool,
}

fn iso_in(c: &crate::category::FinCategory, m: usize) -> Option<usize> {
    let mm = c.morphism(m);
    c.hom(mm.dst, mm.src)
        .into_iter()
        .find(|&w| {
            c.compose(w, m) == Some(c.identity_of(mm.src))
                && c.compose(m, w) == Some(c.identity_of(mm.dst))
        })
}

/// Extend `f : D → E` along the quotient, given `g` on the model of S⁻¹C
/// with g∘P = f∘T on the nose. Requires a certified equivalence; fails
/// with NotInverting when f∘T does not invert the marked class.
pub fn kan_extend(
    setup: &LocalisationSetup,
    cert: &EquivalenceCertificate,
    f: &FunctorData,
    g: &FunctorData,
) -> Result<KanExtensionResult> {
    if cert.status != CertStatus::Certified {
        return Err(Error::Precondition("equivalence certificate is not certified".into()));
    }
    if f.source.as_ref() != setup.d.as_ref() {
        return Err(Error::Precondition("functor must start from D".into()));
    }
    if g.source.as_ref() != cert.cm.category.as_ref() {
        return Err(Error::Precondition("comparison functor must start from the model".into()));
    }
    if f.target.as_ref() != g.target.as_ref() {
        return Err(Error::Precondition("both functors must land in the same category".into()));
    }
    let e = &f.target;

    for s in setup.s.member_indices() {
        let image = f.apply_mor(setup.t.apply_mor(s));
        if iso_in(e, image).is_none() {
            return Err(Error::NotInverting(setup.c.morphism(s).id.clone()));
        }
    }

    // strict factorisation g∘P = f∘T
    let gp = cert.cm.p.compose_with(g);
    let ft = setup.t.compose_with(f);
    if gp.omap != ft.omap || gp.mmap != ft.mmap {
        return Err(Error::Precondition(
            "the comparison functor does not factor f∘T through the quotient".into(),
        ));
    }

    let rf = cert.fbar.compose_with(g);

    // η_d through a resolution d → T(c): F(s), then the inverted unit,
    // then the inverted image of Q(s)
    let component = |c: usize, s: usize| -> Result<usize> {
        let fs = f.apply_mor(s);
        let unit_inv = cert
            .cm
            .inverse_in_model(cert.unit[c])
            .ok_or_else(|| Error::Invalid("unit component is not invertible".into()))?;
        let qs_inv = cert
            .dm
            .inverse_in_model(cert.dm.p.apply_mor(s))
            .ok_or_else(|| Error::NotInverting(setup.d.morphism(s).id.clone()))?;
        let step2 = g.apply_mor(unit_inv);
        let step3 = g.apply_mor(cert.fbar.apply_mor(qs_inv));
        let half = e
            .compose(step2, fs)
            .ok_or_else(|| Error::Invalid("comparison chain does not compose".into()))?;
        e.compose(step3, half)
            .ok_or_else(|| Error::Invalid("comparison chain does not compose".into()))
    };

    let mut eta = Vec::new();
    let mut independent = true;
    for d in 0..setup.d.object_count() {
        let slice = crate::comma::slice_i(setup, d)?;
        let mut chosen = None;
        for (id, o) in slice.objects_iter() {
            let value = component(o.c, o.s)?;
            match chosen {
                None => chosen = Some((id.clone(), value)),
                Some((_, v)) if v != value => independent = false,
                Some(_) => {}
            }
        }
        let (_, value) =
            chosen.ok_or_else(|| Error::Invalid("no resolution available".into()))?;
        eta.push(value);
    }

    let mut natural = true;
    for m in 0..setup.d.morphism_count() {
        let mor = setup.d.morphism(m);
        let lhs = e.compose(eta[mor.dst], f.apply_mor(m));
        let rhs = e.compose(rf.apply_mor(cert.dm.p.apply_mor(m)), eta[mor.src]);
        if lhs != rhs || lhs.is_none() {
            natural = false;
        }
    }

    Ok(KanExtensionResult { rf, eta, independent, natural })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::localisation::certificate::{build_equivalence, CertBudget};

    #[test]
    fn extending_the_embedding_recovers_the_resolutions() {
        // f = Q∘T viewed into the model of S′⁻¹D, g = T̄
        let setup = fixtures::riou_fix();
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        let f = cert.dm.p.clone();
        let g = crate::localisation::induced_functor(&setup, &cert.cm, &cert.dm).unwrap();
        let result = kan_extend(&setup, &cert, &f, &g).unwrap();
        assert!(result.independent);
        assert!(result.natural);
        // the comparison components are the resolution arrows downstairs
        for (d, &m) in result.eta.iter().enumerate() {
            assert!(cert.dm.inverse_in_model(m).is_some(), "component over {d} not invertible");
        }
    }

    #[test]
    fn collapsing_target_gives_a_constant_extension() {
        let setup = fixtures::identity_setup(fixtures::chain2());
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        let pt = fixtures::pt();
        let to_pt = |src: std::sync::Arc<crate::category::FinCategory>| FunctorData {
            source: src.clone(),
            target: pt.clone(),
            omap: vec![0; src.object_count()],
            mmap: vec![0; src.morphism_count()],
        };
        let f = to_pt(setup.d.clone());
        let g = to_pt(cert.cm.category.clone());
        let result = kan_extend(&setup, &cert, &f, &g).unwrap();
        assert!(result.independent);
        assert!(result.natural);
        assert!(result.eta.iter().all(|&m| pt.is_identity(m)));
    }

    #[test]
    fn non_inverting_functor_is_rejected() {
        // S inverts everything in Arrow but the identity functor into
        // Arrow itself inverts nothing
        let c = fixtures::arrow();
        let setup = crate::setup::LocalisationSetup::new(
            FunctorData::identity(c.clone()),
            crate::category::MorphClass::all(c.clone()),
            crate::category::MorphClass::all(c.clone()),
        )
        .unwrap();
        let cert = build_equivalence(&setup, &CertBudget::default()).unwrap();
        let f = FunctorData::identity(c.clone());
        let g = FunctorData {
            source: cert.cm.category.clone(),
            target: c.clone(),
            omap: (0..cert.cm.category.object_count()).collect(),
            mmap: vec![0; cert.cm.category.morphism_count()],
        };
        match kan_extend(&setup, &cert, &f, &g) {
            Err(Error::NotInverting(id)) => assert_eq!(id, "f"),
            other => panic!("expected a NotInverting error, got {other:?}"),
        }
    }
}
