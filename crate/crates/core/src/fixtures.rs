//! Small standard categories used throughout the tests and docs.

use std::sync::Arc;

use crate::category::{full_subcategory, FinCategory, FunctorData, MorphClass};
use crate::setup::LocalisationSetup;

fn cat(
    objects: &[&str],
    mors: &[(&str, &str, &str)],
    comps: &[(&str, &str, &str)],
) -> Arc<FinCategory> {
    Arc::new(
        FinCategory::from_parts(
            objects.iter().map(|s| s.to_string()).collect(),
            mors.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect(),
            comps.iter().map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string())).collect(),
        )
        .unwrap(),
    )
}

/// One object, identity only.
pub fn pt() -> Arc<FinCategory> {
    cat(&["*"], &[], &[])
}

/// Two isolated objects.
pub fn pt_pt() -> Arc<FinCategory> {
    cat(&["a", "b"], &[], &[])
}

/// `0 → 1`.
pub fn arrow() -> Arc<FinCategory> {
    cat(&["0", "1"], &[("f", "0", "1")], &[])
}

/// Two parallel arrows `f, g : a → b`.
pub fn par() -> Arc<FinCategory> {
    cat(&["a", "b"], &[("f", "a", "b"), ("g", "a", "b")], &[])
}

/// `b ← a → c`.
pub fn span() -> Arc<FinCategory> {
    cat(&["a", "b", "c"], &[("f", "a", "b"), ("g", "a", "c")], &[])
}

/// `x → z ← y`.
pub fn cospan() -> Arc<FinCategory> {
    cat(&["x", "y", "z"], &[("f", "x", "z"), ("g", "y", "z")], &[])
}

/// `0 → 1 → 2` with the composite.
pub fn chain2() -> Arc<FinCategory> {
    cat(
        &["0", "1", "2"],
        &[("f", "0", "1"), ("g", "1", "2"), ("h", "0", "2")],
        &[("g", "f", "h")],
    )
}

/// Indiscrete category on `n` objects: exactly one morphism between any
/// ordered pair.
pub fn ind(n: usize) -> Arc<FinCategory> {
    let objects: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let mut mors = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                mors.push((format!("u_{i}_{j}"), format!("o{i}"), format!("o{j}")));
            }
        }
    }
    let name = |i: usize, j: usize| {
        if i == j {
            format!("id_o{i}")
        } else {
            format!("u_{i}_{j}")
        }
    };
    let mut comps = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                comps.push((name(j, k), name(i, j), name(i, k)));
            }
        }
    }
    Arc::new(
        FinCategory::from_parts(
            objects,
            mors.into_iter().map(|(a, b, c)| (a, b, c)).collect(),
            comps,
        )
        .unwrap(),
    )
}

/// T = Id on `c`, inverting nothing on either side.
pub fn identity_setup(c: Arc<FinCategory>) -> LocalisationSetup {
    let t = FunctorData::identity(c.clone());
    let s = MorphClass::identities(c.clone());
    let sp = MorphClass::identities(c);
    LocalisationSetup::new(t, s, sp).unwrap()
}

/// The terminal-object inclusion `{1} ↪ (0 → 1)` with everything in the
/// target inverted. The induced functor on localisations is an equivalence
/// even though the inclusion is nowhere near one.
pub fn riou_fix() -> LocalisationSetup {
    let d = arrow();
    let one = d.object_idx("1").unwrap();
    let (c, inc) = full_subcategory(&d, &[one]).unwrap();
    let s = MorphClass::identities(c);
    let sp = MorphClass::all(d);
    LocalisationSetup::new(inc, s, sp).unwrap()
}

/// `Pt ↪ Pt ⊔ Pt` onto the first point, nothing inverted: not an
/// equivalence after localisation (the target stays disconnected).
pub fn pt_into_pt_pt() -> LocalisationSetup {
    let c = pt();
    let d = pt_pt();
    let omap = [("*".to_string(), "a".to_string())].into_iter().collect();
    let t = FunctorData::from_maps(c.clone(), d.clone(), &omap, &Default::default()).unwrap();
    let s = MorphClass::identities(c);
    let sp = MorphClass::identities(d);
    LocalisationSetup::new(t, s, sp).unwrap()
}

/// The lattice `{0,1}²` as a poset category.
pub fn square_lattice() -> Arc<FinCategory> {
    use crate::category::FinPoset;
    let p = FinPoset::from_pairs(
        vec!["00".into(), "01".into(), "10".into(), "11".into()],
        &[
            ("00".into(), "01".into()),
            ("00".into(), "10".into()),
            ("01".into(), "11".into()),
            ("10".into(), "11".into()),
        ],
    )
    .unwrap();
    Arc::new(p.as_category())
}
