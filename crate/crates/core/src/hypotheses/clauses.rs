//! Clause-by-clause checkers: the filtering-slice clauses, the
//! good-position pushout clauses, and the two-out-of-three refinement on
//! the wedge slices.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::category::{has_finite_products, preserves_finite_products, FinCategory};
use crate::comma::{comma, constant_functor, phi_comparison, slice_i, slice_i_underline};
use crate::connectivity::{filtering_check, is_filtering};
use crate::error::Result;
use crate::setup::LocalisationSetup;

use super::{
    aggregate, arrow_slices_with, grade_arrows_with, grade_objects_with, grade_pairs_with,
    pair_slices_with, pushouts, CheckBudget, HypothesisReport, Status,
};

/// A choice of intermediate objects K_d between the resolutions and the
/// full under-category, given per D-object as ids of arrows out of it.
/// Objects of D without an entry default to the image of the comparison
/// functor.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KSelector {
    pub selected: BTreeMap<String, Vec<String>>,
}

fn cofiltering_status(c: &FinCategory, label: &str) -> Status {
    let report = filtering_check(c);
    if report.cofiltering {
        Status::Holds
    } else {
        let why = report.witnesses.first().cloned().unwrap_or_default();
        Status::fails(format!("{label} is not cofiltering: {why}"))
    }
}

/// Binary product of two objects, by universality scan.
fn binary_product(c: &FinCategory, x: usize, y: usize) -> Option<usize> {
    for p in 0..c.object_count() {
        for &p1 in &c.hom(p, x) {
            'cand: for &p2 in &c.hom(p, y) {
                for z in 0..c.object_count() {
                    for &f in &c.hom(z, x) {
                        for &g in &c.hom(z, y) {
                            let mediating = c
                                .hom(z, p)
                                .into_iter()
                                .filter(|&h| {
                                    c.compose(p1, h) == Some(f) && c.compose(p2, h) == Some(g)
                                })
                                .count();
                            if mediating != 1 {
                                continue 'cand;
                            }
                        }
                    }
                }
                return Some(p);
            }
        }
    }
    None
}

/// The filtering-slice clauses: cofiltering slices and fibres, faithfulness
/// after precomposition with a marked arrow, joint fibre nonemptiness, and
/// the product-closure conditions on a selector.
pub fn check_p1(
    setup: &LocalisationSetup,
    k: Option<&KSelector>,
) -> Result<Vec<HypothesisReport>> {
    let pt = crate::fixtures::pt();
    let mut a1 = Vec::new();
    let mut a2 = Vec::new();
    let mut b3 = Vec::new();
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let mut b2 = Vec::new();

    let products_ok = has_finite_products(&setup.c).has_products
        && preserves_finite_products(&setup.t);

    for d in 0..setup.d.object_count() {
        let d_id = setup.d.object_id(d);
        let (i_slice, j_slice, phi) = phi_comparison(setup, d, false)?;
        a1.push(cofiltering_status(&i_slice.carrier, &format!("slice over `{d_id}`")));
        b2.push(super::nonempty_status(&i_slice, &format!("slice over `{d_id}`")));

        let fibre_nonempty = |j: usize| -> Result<bool> {
            let fibre = comma(&phi, &constant_functor(pt.clone(), j_slice.carrier.clone(), j))?;
            Ok(fibre.carrier.object_count() > 0)
        };

        for j in 0..j_slice.carrier.object_count() {
            let j_id = j_slice.carrier.object_id(j);
            let fibre = comma(&phi, &constant_functor(pt.clone(), j_slice.carrier.clone(), j))?;
            if fibre.carrier.object_count() == 0 {
                a2.push(Status::fails(format!(
                    "fibre over `{j_id}` in the under-category of `{d_id}` is empty"
                )));
            } else {
                a2.push(cofiltering_status(
                    &fibre.carrier,
                    &format!("fibre over `{j_id}` in the under-category of `{d_id}`"),
                ));
            }
        }

        // joint fibre: some resolution mapping into i with its arrow under j
        for i in 0..i_slice.carrier.object_count() {
            for j in 0..j_slice.carrier.object_count() {
                let found = (0..i_slice.carrier.object_count()).any(|x| {
                    !i_slice.carrier.hom(x, i).is_empty()
                        && !j_slice.carrier.hom(phi.apply_obj(x), j).is_empty()
                });
                if !found {
                    b3.push(Status::fails(format!(
                        "no resolution of `{d_id}` dominating `{}` and `{}`",
                        i_slice.carrier.object_id(i),
                        j_slice.carrier.object_id(j)
                    )));
                }
            }
        }

        // the selector clauses
        let image: BTreeSet<usize> =
            (0..i_slice.carrier.object_count()).map(|x| phi.apply_obj(x)).collect();
        let selected: BTreeSet<usize> = match k.and_then(|k| k.selected.get(d_id)) {
            Some(ids) => {
                let mut set = BTreeSet::new();
                for id in ids {
                    match j_slice.carrier.object_idx(id) {
                        Some(idx) => {
                            set.insert(idx);
                        }
                        None => c1.push(Status::fails(format!(
                            "selected arrow `{id}` is not an object of the under-category of `{d_id}`"
                        ))),
                    }
                }
                set
            }
            None => image.clone(),
        };
        if !products_ok {
            c1.push(Status::unknown("finite products unavailable or not preserved"));
            c2.push(Status::unknown("finite products unavailable or not preserved"));
            continue;
        }
        if selected.is_empty() {
            c1.push(Status::fails(format!("selection over `{d_id}` is empty")));
        }
        for x in &image {
            if !selected.contains(x) {
                c1.push(Status::fails(format!(
                    "resolution arrow `{}` of `{d_id}` is not selected",
                    j_slice.carrier.object_id(*x)
                )));
            }
        }
        for &kk in &selected {
            if !fibre_nonempty(kk)? {
                c1.push(Status::fails(format!(
                    "no resolution of `{d_id}` under selected arrow `{}`",
                    j_slice.carrier.object_id(kk)
                )));
            }
            for j in 0..j_slice.carrier.object_count() {
                match binary_product(&j_slice.carrier, j, kk) {
                    Some(p) if selected.contains(&p) => {}
                    Some(p) => c2.push(Status::fails(format!(
                        "product `{}` of `{}` and `{}` over `{d_id}` is not selected",
                        j_slice.carrier.object_id(p),
                        j_slice.carrier.object_id(j),
                        j_slice.carrier.object_id(kk)
                    ))),
                    None => c2.push(Status::fails(format!(
                        "`{}` and `{}` have no product in the under-category of `{d_id}`",
                        j_slice.carrier.object_id(j),
                        j_slice.carrier.object_id(kk)
                    ))),
                }
            }
        }
    }

    // cancellation after precomposition with a marked arrow
    let mut b1 = Status::Holds;
    'b1: for s in setup.sprime.member_indices() {
        let e = setup.d.morphism(s).dst;
        for f in 0..setup.c.morphism_count() {
            if setup.t.apply_obj(setup.c.morphism(f).src) != e {
                continue;
            }
            for g in 0..setup.c.morphism_count() {
                if g == f || setup.t.apply_obj(setup.c.morphism(g).src) != e {
                    continue;
                }
                let lhs = setup.d.compose(setup.t.apply_mor(f), s);
                let rhs = setup.d.compose(setup.t.apply_mor(g), s);
                if lhs.is_some() && lhs == rhs {
                    b1 = Status::fails(format!(
                        "`{}` and `{}` agree after `{}`",
                        setup.c.morphism(f).id,
                        setup.c.morphism(g).id,
                        setup.d.morphism(s).id
                    ));
                    break 'b1;
                }
            }
        }
    }

    Ok(vec![
        HypothesisReport::new("p1.a1", aggregate(a1)),
        HypothesisReport::new("p1.a2", aggregate(a2)),
        HypothesisReport::new("p1.b1", b1),
        HypothesisReport::new("p1.b2", aggregate(b2)),
        HypothesisReport::new("p1.b3", aggregate(b3)),
        HypothesisReport::new("p1.c1", aggregate(c1)),
        HypothesisReport::new("p1.c2", aggregate(c2)),
    ])
}

/// A marked arrow s is in good position with respect to f when their
/// pushout exists and some universal completion keeps the pushed copy of s
/// marked.
pub fn good_position(setup: &LocalisationSetup, s: usize, f: usize) -> bool {
    pushouts(&setup.d, s, f).iter().any(|&(_, _, s1)| setup.sprime.contains(s1))
}

/// The good-position clauses: marked arrows are epis among marked arrows,
/// marked pairs admit marked pushouts, good position descends along
/// composition, classes match across the embedding, and every arrow admits
/// a well-positioned resolution. Also samples the conclusion shape: the
/// slice families are ordered and filtering.
pub fn check_p2(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    let d = &setup.d;
    let marked = setup.sprime.member_indices();

    let mut d1 = Status::Holds;
    'd1: for &e in &marked {
        let mid = d.morphism(e).dst;
        for &u in &marked {
            if d.morphism(u).src != mid {
                continue;
            }
            for &v in &marked {
                if v == u || d.morphism(v).src != mid {
                    continue;
                }
                if d.compose(u, e) == d.compose(v, e) {
                    d1 = Status::fails(format!(
                        "`{}` and `{}` agree after `{}`",
                        d.morphism(u).id,
                        d.morphism(v).id,
                        d.morphism(e).id
                    ));
                    break 'd1;
                }
            }
        }
    }

    let mut d2 = Status::Holds;
    'd2: for &s in &marked {
        for &f in &marked {
            if d.morphism(f).src != d.morphism(s).src {
                continue;
            }
            if !good_position(setup, s, f) {
                d2 = Status::fails(format!(
                    "`{}` is not in good position with respect to `{}`",
                    d.morphism(s).id,
                    d.morphism(f).id
                ));
                break 'd2;
            }
        }
    }

    let mut d3 = Status::Holds;
    'd3: for f in 0..d.morphism_count() {
        for g in 0..d.morphism_count() {
            if d.morphism(g).src != d.morphism(f).dst {
                continue;
            }
            let gf = d.compose(g, f).expect("total");
            for &s in &marked {
                if d.morphism(s).src != d.morphism(f).src {
                    continue;
                }
                if good_position(setup, s, gf) && !good_position(setup, s, f) {
                    d3 = Status::fails(format!(
                        "`{}` is in good position for `{}` but not for its factor `{}`",
                        d.morphism(s).id,
                        d.morphism(gf).id,
                        d.morphism(f).id
                    ));
                    break 'd3;
                }
            }
        }
    }

    let d4 = super::riou_i(setup);

    let mut d5 = Status::Holds;
    'd5: for f in 0..d.morphism_count() {
        let src = d.morphism(f).src;
        let slice = slice_i(setup, src)?;
        let found = slice.objects_iter().any(|(_, o)| good_position(setup, o.s, f));
        if !found {
            d5 = Status::fails(format!(
                "no resolution of `{}` in good position with respect to `{}`",
                d.object_id(src),
                d.morphism(f).id
            ));
            break 'd5;
        }
    }

    // conclusion shape on the slice families up to composable pairs
    let mut shape = Vec::new();
    for dd in 0..d.object_count() {
        let slice = slice_i(setup, dd)?;
        let report = filtering_check(&slice.carrier);
        if !report.ordered || !is_filtering(&slice.carrier) {
            shape.push(Status::fails(format!(
                "slice over `{}` is not ordered and filtering",
                d.object_id(dd)
            )));
        }
    }
    for family in [
        arrow_slices_with(setup, &budget.size, slice_i),
        pair_slices_with(setup, &budget.size, slice_i),
    ] {
        match family {
            Ok(slices) => {
                for (label, slice) in slices {
                    let report = filtering_check(&slice.carrier);
                    if !report.ordered || !is_filtering(&slice.carrier) {
                        shape.push(Status::fails(format!(
                            "slice over `{label}` is not ordered and filtering"
                        )));
                    }
                }
            }
            Err(e) => shape.push(super::budget_unknown(&e)),
        }
    }

    Ok(vec![
        HypothesisReport::new("p2.d1", d1),
        HypothesisReport::new("p2.d2", d2),
        HypothesisReport::new("p2.d3", d3),
        HypothesisReport::new("p2.d4", d4),
        HypothesisReport::new("p2.d5", d5),
        HypothesisReport::new("p2.conclusion", aggregate(shape)),
    ])
}

/// The refinement over wedge slices: the two-out-of-three property of the
/// marked class, then the three connectivity grades on the wedge slices.
pub fn check_tu0(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    let d = &setup.d;
    let mut star = Status::Holds;
    'star: for s in setup.sprime.member_indices() {
        for t in 0..d.morphism_count() {
            if d.morphism(t).dst != d.morphism(s).src {
                continue;
            }
            let st = d.compose(s, t).expect("total");
            if setup.sprime.contains(st) && !setup.sprime.contains(t) {
                star = Status::fails(format!(
                    "`{}` and `{}` are marked but the factor `{}` is not",
                    d.morphism(s).id,
                    d.morphism(st).id,
                    d.morphism(t).id
                ));
                break 'star;
            }
        }
    }

    Ok(vec![
        HypothesisReport::new("tu0.*", star),
        HypothesisReport::new(
            "tu0.0",
            grade_objects_with(setup, budget, slice_i_underline)?,
        ),
        HypothesisReport::new("tu0.1", grade_arrows_with(setup, budget, slice_i_underline)),
        HypothesisReport::new("tu0.2", grade_pairs_with(setup, budget, slice_i_underline)),
    ])
}
