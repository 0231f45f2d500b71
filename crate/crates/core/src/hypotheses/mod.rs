//! Checkers for the sufficient-hypothesis sets under which the induced
//! functor between the localised categories is an equivalence, together
//! with an auditor for the implications between the checkers.

pub mod audit;
pub mod clauses;
pub mod weak;

use std::fmt;

use crate::budget::SizeBudget;
use crate::category::{FinCategory, FinPoset};
use crate::comma::{is_cofinal, phi_comparison, slice_i, SliceCategory};
use crate::connectivity::{connectivity, pi0, Pi1Budget};
use crate::error::Result;
use crate::setup::{LiftedSetup, LocalisationSetup};

pub use audit::{implication_audit, AuditReport};
pub use clauses::{check_p1, check_p2, check_tu0, KSelector};
pub use weak::{check_c1, check_t1v, WeakReplacement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails { witness: String },
    Unknown { reason: String },
}

impl Status {
    pub fn fails(witness: impl Into<String>) -> Status {
        Status::Fails { witness: witness.into() }
    }

    pub fn unknown(reason: impl Into<String>) -> Status {
        Status::Unknown { reason: reason.into() }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Status::Holds)
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Status::Fails { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Status::Unknown { .. })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Holds => write!(f, "holds"),
            Status::Fails { witness } => write!(f, "fails ({witness})"),
            Status::Unknown { reason } => write!(f, "unknown ({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisReport {
    pub id: String,
    pub status: Status,
}

impl HypothesisReport {
    pub fn new(id: impl Into<String>, status: Status) -> HypothesisReport {
        HypothesisReport { id: id.into(), status }
    }
}

pub fn all_hold(reports: &[HypothesisReport]) -> bool {
    reports.iter().all(|r| r.status.is_holds())
}

pub fn find<'a>(reports: &'a [HypothesisReport], id: &str) -> Option<&'a HypothesisReport> {
    reports.iter().find(|r| r.id == id)
}

/// A failure beats an undecided verdict, which beats a pass.
pub fn aggregate(statuses: impl IntoIterator<Item = Status>) -> Status {
    let mut unknown = None;
    for s in statuses {
        match s {
            Status::Holds => {}
            Status::Fails { .. } => return s,
            Status::Unknown { .. } => {
                if unknown.is_none() {
                    unknown = Some(s);
                }
            }
        }
    }
    unknown.unwrap_or(Status::Holds)
}

#[derive(Debug, Clone)]
pub struct CheckBudget {
    pub pi1: Pi1Budget,
    pub size: SizeBudget,
    /// Largest poset over which setups are lifted by the shape-quantified
    /// checkers.
    pub poset_bound: usize,
}

impl Default for CheckBudget {
    fn default() -> CheckBudget {
        CheckBudget { pi1: Pi1Budget::default(), size: SizeBudget::default(), poset_bound: 2 }
    }
}

/// Nonempty and a single zig-zag component.
pub(crate) fn zero_connected_status(c: &FinCategory, label: &str) -> Status {
    if c.object_count() == 0 {
        return Status::fails(format!("{label} is empty"));
    }
    let comps = pi0(c).len();
    if comps == 1 {
        Status::Holds
    } else {
        Status::fails(format!("{label} has {comps} components"))
    }
}

pub(crate) fn one_connected_status(c: &FinCategory, pi1: &Pi1Budget, label: &str) -> Status {
    let report = connectivity(c, pi1);
    if !report.nonempty() {
        return Status::fails(format!("{label} is empty"));
    }
    if !report.zero_connected() {
        return Status::fails(format!("{label} has {} components", report.components.len()));
    }
    match report.one_connected() {
        Some(true) => Status::Holds,
        Some(false) => Status::fails(format!("{label} has nontrivial fundamental group")),
        None => Status::unknown(format!("fundamental group of {label} undecided within budget")),
    }
}

pub(crate) fn nonempty_status(slice: &SliceCategory, label: &str) -> Status {
    if slice.is_empty() {
        Status::fails(format!("{label} is empty"))
    } else {
        Status::Holds
    }
}

fn slice_label(kind: &str, over: &str) -> String {
    format!("{kind} over `{over}`")
}

/// The slice over each arrow of D, via the lift across the interval.
pub(crate) fn arrow_slices_with(
    setup: &LocalisationSetup,
    size: &SizeBudget,
    build: impl Fn(&LocalisationSetup, usize) -> Result<SliceCategory>,
) -> Result<Vec<(String, SliceCategory)>> {
    let lifted = setup.lift(&FinPoset::chain(1), size)?;
    let mut out = Vec::new();
    for f in 0..setup.d.morphism_count() {
        let d_obj = lifted.d_diag.chain_object(&[f])?;
        let slice = build(&lifted.setup, d_obj)?;
        out.push((setup.d.morphism(f).id.clone(), slice));
    }
    Ok(out)
}

/// The slice over each composable pair of D, via the lift across the
/// 2-chain. Pairs are reported as (second, first).
pub(crate) fn pair_slices_with(
    setup: &LocalisationSetup,
    size: &SizeBudget,
    build: impl Fn(&LocalisationSetup, usize) -> Result<SliceCategory>,
) -> Result<Vec<(String, SliceCategory)>> {
    let lifted = setup.lift(&FinPoset::chain(2), size)?;
    let mut out = Vec::new();
    for f1 in 0..setup.d.morphism_count() {
        for f2 in 0..setup.d.morphism_count() {
            if setup.d.morphism(f2).src != setup.d.morphism(f1).dst {
                continue;
            }
            let d_obj = lifted.d_diag.chain_object(&[f1, f2])?;
            let slice = build(&lifted.setup, d_obj)?;
            let label =
                format!("({},{})", setup.d.morphism(f2).id, setup.d.morphism(f1).id);
            out.push((label, slice));
        }
    }
    Ok(out)
}

pub(crate) fn budget_unknown(e: &crate::error::Error) -> Status {
    Status::unknown(format!("{e}"))
}

/// Grade 0: each slice over an object of D is 1-connected.
pub(crate) fn grade_objects_with(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
    build: impl Fn(&LocalisationSetup, usize) -> Result<SliceCategory>,
) -> Result<Status> {
    let mut statuses = Vec::new();
    for d in 0..setup.d.object_count() {
        let slice = build(setup, d)?;
        let label = slice_label("slice", setup.d.object_id(d));
        statuses.push(one_connected_status(&slice.carrier, &budget.pi1, &label));
    }
    Ok(aggregate(statuses))
}

/// Grade 1: each slice over an arrow of D is 0-connected.
pub(crate) fn grade_arrows_with(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
    build: impl Fn(&LocalisationSetup, usize) -> Result<SliceCategory>,
) -> Status {
    match arrow_slices_with(setup, &budget.size, build) {
        Ok(slices) => aggregate(slices.iter().map(|(id, s)| {
            zero_connected_status(&s.carrier, &slice_label("slice", id))
        })),
        Err(e) => budget_unknown(&e),
    }
}

/// Grade 2: each slice over a composable pair of D is nonempty.
pub(crate) fn grade_pairs_with(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
    build: impl Fn(&LocalisationSetup, usize) -> Result<SliceCategory>,
) -> Status {
    match pair_slices_with(setup, &budget.size, build) {
        Ok(slices) => aggregate(
            slices.iter().map(|(id, s)| nonempty_status(s, &slice_label("slice", id))),
        ),
        Err(e) => budget_unknown(&e),
    }
}

fn grade_objects(setup: &LocalisationSetup, budget: &CheckBudget) -> Result<Status> {
    grade_objects_with(setup, budget, slice_i)
}

fn grade_arrows(setup: &LocalisationSetup, budget: &CheckBudget) -> Status {
    grade_arrows_with(setup, budget, slice_i)
}

fn grade_pairs(setup: &LocalisationSetup, budget: &CheckBudget) -> Status {
    grade_pairs_with(setup, budget, slice_i)
}

/// The three connectivity grades on the slice families: 1-connected over
/// objects, 0-connected over arrows, nonempty over composable pairs.
pub fn check_t0(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    Ok(vec![
        HypothesisReport::new("t0.0", grade_objects(setup, budget)?),
        HypothesisReport::new("t0.1", grade_arrows(setup, budget)),
        HypothesisReport::new("t0.2", grade_pairs(setup, budget)),
    ])
}

/// Grade 0 plus cofinality of the comparison functor into the
/// under-category of each object of D.
pub fn check_c2(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    let mut cof = Vec::new();
    for d in 0..setup.d.object_count() {
        let (_, _, phi) = phi_comparison(setup, d, false)?;
        let report = is_cofinal(&phi)?;
        if report.cofinal {
            cof.push(Status::Holds);
        } else {
            let (j, comps) = &report.failures[0];
            cof.push(Status::fails(format!(
                "fibre over `{j}` in the under-category of `{}` has {comps} components",
                setup.d.object_id(d)
            )));
        }
    }
    Ok(vec![
        HypothesisReport::new("c2.0", grade_objects(setup, budget)?),
        HypothesisReport::new("c2.1'", aggregate(cof)),
    ])
}

/// All universal cocones completing the span s : x → y, f : x → z; each
/// witness is (apex, y → apex, z → apex).
pub fn pushouts(c: &FinCategory, s: usize, f: usize) -> Vec<(usize, usize, usize)> {
    let y = c.morphism(s).dst;
    let z = c.morphism(f).dst;
    let mut out = Vec::new();
    for p in 0..c.object_count() {
        for &f1 in &c.hom(y, p) {
            'cand: for &s1 in &c.hom(z, p) {
                if c.compose(f1, s) != c.compose(s1, f) {
                    continue;
                }
                for q in 0..c.object_count() {
                    for &u in &c.hom(y, q) {
                        for &v in &c.hom(z, q) {
                            if c.compose(u, s) != c.compose(v, f) {
                                continue;
                            }
                            let mediating = c
                                .hom(p, q)
                                .into_iter()
                                .filter(|&w| {
                                    c.compose(w, f1) == Some(u) && c.compose(w, s1) == Some(v)
                                })
                                .count();
                            if mediating != 1 {
                                continue 'cand;
                            }
                        }
                    }
                }
                out.push((p, f1, s1));
            }
        }
    }
    out
}

pub(crate) fn riou_i(setup: &LocalisationSetup) -> Status {
    if !setup.t.is_fully_faithful() {
        return Status::fails("T is not fully faithful");
    }
    for m in 0..setup.c.morphism_count() {
        let marked = setup.s.contains(m);
        let image_marked = setup.sprime.contains(setup.t.apply_mor(m));
        if marked != image_marked {
            return Status::fails(format!(
                "`{}` {} marked but its image {} marked",
                setup.c.morphism(m).id,
                if marked { "is" } else { "is not" },
                if image_marked { "is" } else { "is not" }
            ));
        }
    }
    Status::Holds
}

fn riou_ii(setup: &LocalisationSetup) -> Status {
    let d = &setup.d;
    for s in setup.sprime.member_indices() {
        if d.is_identity(s) {
            continue;
        }
        let x = d.morphism(s).src;
        for f in 0..d.morphism_count() {
            if d.morphism(f).src != x {
                continue;
            }
            let candidates = pushouts(d, s, f);
            if candidates.is_empty() {
                return Status::fails(format!(
                    "no pushout of `{}` along `{}`",
                    d.morphism(s).id,
                    d.morphism(f).id
                ));
            }
            if !candidates.iter().any(|&(_, _, s1)| setup.sprime.contains(s1)) {
                return Status::fails(format!(
                    "pushout of `{}` along `{}` is not marked",
                    d.morphism(s).id,
                    d.morphism(f).id
                ));
            }
        }
    }
    Status::Holds
}

fn riou_iii(setup: &LocalisationSetup) -> Status {
    let mut in_image = vec![false; setup.d.object_count()];
    for c in 0..setup.c.object_count() {
        in_image[setup.t.apply_obj(c)] = true;
    }
    for s in setup.sprime.member_indices() {
        let m = setup.d.morphism(s);
        if in_image[m.src] && !in_image[m.dst] {
            return Status::fails(format!("`{}` leaves the object-image of T", m.id));
        }
    }
    Status::Holds
}

fn riou_iv(setup: &LocalisationSetup) -> Result<Status> {
    let mut statuses = Vec::new();
    for d in 0..setup.d.object_count() {
        let slice = slice_i(setup, d)?;
        statuses.push(nonempty_status(&slice, &slice_label("slice", setup.d.object_id(d))));
    }
    Ok(aggregate(statuses))
}

/// Full faithfulness with matching classes, marked pushouts, image
/// stability (informational only; downstream consumers ignore it), and
/// nonempty slices.
pub fn check_riou(setup: &LocalisationSetup) -> Result<Vec<HypothesisReport>> {
    Ok(vec![
        HypothesisReport::new("riou.i", riou_i(setup)),
        HypothesisReport::new("riou.ii", riou_ii(setup)),
        HypothesisReport::new("riou.iii", riou_iii(setup)),
        HypothesisReport::new("riou.iv", riou_iv(setup)?),
    ])
}

/// Whether the required clauses (i, ii, iv) all hold; iii is advisory.
pub fn riou_applies(reports: &[HypothesisReport]) -> bool {
    ["riou.i", "riou.ii", "riou.iv"]
        .iter()
        .all(|id| find(reports, id).is_some_and(|r| r.status.is_holds()))
}

fn poset_iso(a: &FinPoset, b: &FinPoset, perm: &[usize]) -> bool {
    let n = a.len();
    (0..n).all(|i| (0..n).all(|j| a.leq(i, j) == b.leq(perm[i], perm[j])))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// All posets with up to `bound` elements, one per isomorphism class.
pub fn posets_up_to(bound: usize) -> Vec<FinPoset> {
    let mut out: Vec<FinPoset> = Vec::new();
    for n in 1..=bound {
        let elements: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j)
            .collect();
        let perms = permutations(n);
        for mask in 0u32..(1 << pairs.len()) {
            let chosen: Vec<(String, String)> = pairs
                .iter()
                .enumerate()
                .filter(|(k, _)| mask & (1 << k) != 0)
                .map(|(_, &(i, j))| (i.to_string(), j.to_string()))
                .collect();
            let Ok(p) = FinPoset::from_pairs(elements.clone(), &chosen) else {
                continue;
            };
            // closure may add pairs; keep only relations that are already
            // transitive so each poset appears once per labelling
            let closed = (0..n).all(|i| {
                (0..n).all(|j| {
                    p.leq(i, j)
                        == (i == j || chosen.iter().any(|(a, b)| {
                            a == &i.to_string() && b == &j.to_string()
                        }))
                })
            });
            if !closed {
                continue;
            }
            let duplicate = out
                .iter()
                .filter(|q| q.len() == n)
                .any(|q| perms.iter().any(|perm| poset_iso(&p, q, perm)));
            if !duplicate {
                out.push(p);
            }
        }
    }
    out
}

fn shape_label(e: &FinPoset) -> String {
    let relations: Vec<String> = (0..e.len())
        .flat_map(|i| (0..e.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && e.leq(i, j))
        .map(|(i, j)| format!("{}<{}", e.elements()[i], e.elements()[j]))
        .collect();
    if relations.is_empty() {
        format!("discrete({})", e.len())
    } else {
        relations.join(",")
    }
}

fn lifted_or_unknown(
    setup: &LocalisationSetup,
    e: &FinPoset,
    size: &SizeBudget,
) -> std::result::Result<LiftedSetup, Status> {
    setup.lift(e, size).map_err(|err| budget_unknown(&err))
}

/// Lifts the setup over every small poset shape (and its products with the
/// 1- and 2-chains) and re-runs the nonemptiness and connectivity grades.
/// Requires the marked-pushout hypotheses on the base first.
pub fn check_p3(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    let riou = check_riou(setup)?;
    if !riou_applies(&riou) {
        let offender = riou
            .iter()
            .find(|r| r.id != "riou.iii" && !r.status.is_holds())
            .expect("some required clause failed");
        return Ok(vec![HypothesisReport::new(
            "p3.pre",
            Status::fails(format!("precondition `{}` does not hold", offender.id)),
        )]);
    }

    // product shapes already play the role of the arrow and pair lifts, so
    // they only get the nonemptiness and grade-0 checks; nesting a chain
    // lift on top of them would blow the size budget for nothing
    let mut shapes = Vec::new();
    for e in posets_up_to(budget.poset_bound) {
        shapes.push((shape_label(&e), e.clone(), true));
        for n in 1..=2 {
            let prod = e.product(&FinPoset::chain(n));
            shapes.push((format!("{}×chain({n})", shape_label(&e)), prod, false));
        }
    }

    let mut iv = Vec::new();
    let mut grades = Vec::new();
    for (label, e, full) in &shapes {
        match lifted_or_unknown(setup, e, &budget.size) {
            Ok(lifted) => {
                let tag = |s: Status| match s {
                    Status::Holds => Status::Holds,
                    Status::Fails { witness } => {
                        Status::fails(format!("shape {label}: {witness}"))
                    }
                    Status::Unknown { reason } => {
                        Status::unknown(format!("shape {label}: {reason}"))
                    }
                };
                iv.push(tag(riou_iv(&lifted.setup)?));
                if *full {
                    for r in check_t0(&lifted.setup, budget)? {
                        grades.push(tag(r.status));
                    }
                } else {
                    grades.push(tag(grade_objects(&lifted.setup, budget)?));
                }
            }
            Err(s) => {
                iv.push(s.clone());
                grades.push(s);
            }
        }
    }

    Ok(vec![
        HypothesisReport::new("p3.pre", Status::Holds),
        HypothesisReport::new("p3.iv", aggregate(iv)),
        HypothesisReport::new("p3.t0", aggregate(grades)),
    ])
}

/// The bounded diagram hypothesis: the slice over every diagram of D over
/// every small poset shape is 0-connected. Also cross-checks the bounded
/// consequence, 1-connectedness of the slices over objects.
pub fn check_referee(
    setup: &LocalisationSetup,
    budget: &CheckBudget,
) -> Result<Vec<HypothesisReport>> {
    let mut hyp = Vec::new();
    for e in posets_up_to(budget.poset_bound) {
        let label = shape_label(&e);
        match lifted_or_unknown(setup, &e, &budget.size) {
            Ok(lifted) => {
                for dd in 0..lifted.setup.d.object_count() {
                    let slice = slice_i(&lifted.setup, dd)?;
                    let obj = lifted.setup.d.object_id(dd);
                    hyp.push(zero_connected_status(
                        &slice.carrier,
                        &format!("slice over `{obj}` (shape {label})"),
                    ));
                }
            }
            Err(s) => hyp.push(s),
        }
    }
    Ok(vec![
        HypothesisReport::new("referee.hypothesis", aggregate(hyp)),
        HypothesisReport::new("referee.conclusion", grade_objects(setup, budget)?),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{FunctorData, MorphClass};
    use crate::fixtures;

    #[test]
    fn grades_hold_on_identity_point_setup() {
        let setup = fixtures::identity_setup(fixtures::pt());
        let reports = check_t0(&setup, &CheckBudget::default()).unwrap();
        assert!(all_hold(&reports), "{reports:?}");
    }

    #[test]
    fn grades_hold_on_embedding_fixture() {
        let setup = fixtures::riou_fix();
        let reports = check_t0(&setup, &CheckBudget::default()).unwrap();
        assert!(all_hold(&reports), "{reports:?}");
    }

    #[test]
    fn empty_slice_fails_lowest_grade() {
        let setup = fixtures::pt_into_pt_pt();
        let reports = check_t0(&setup, &CheckBudget::default()).unwrap();
        // object `b` outside the image has no resolution at all
        assert!(find(&reports, "t0.0").unwrap().status.is_fails());
        assert!(find(&reports, "t0.2").unwrap().status.is_fails());
    }

    #[test]
    fn cofinality_clause_on_fixtures() {
        let setup = fixtures::riou_fix();
        let reports = check_c2(&setup, &CheckBudget::default()).unwrap();
        assert!(find(&reports, "c2.0").unwrap().status.is_holds());
        // over object 0 the only resolution is f while J_0 also contains
        // id_0, whose fibre under Φ is empty
        assert!(find(&reports, "c2.1'").unwrap().status.is_fails());

        let id_setup = fixtures::identity_setup(fixtures::pt());
        let reports = check_c2(&id_setup, &CheckBudget::default()).unwrap();
        assert!(all_hold(&reports), "{reports:?}");
    }

    #[test]
    fn embedding_fixture_satisfies_pushout_clauses() {
        let setup = fixtures::riou_fix();
        let reports = check_riou(&setup).unwrap();
        assert!(all_hold(&reports), "{reports:?}");
        assert!(riou_applies(&reports));
    }

    #[test]
    fn class_mismatch_fails_first_clause() {
        // T = Id on Arrow, S = identities, S′ = everything
        let c = fixtures::arrow();
        let t = FunctorData::identity(c.clone());
        let s = MorphClass::identities(c.clone());
        let sp = MorphClass::all(c);
        let setup = LocalisationSetup::new(t, s, sp).unwrap();
        let reports = check_riou(&setup).unwrap();
        assert!(find(&reports, "riou.i").unwrap().status.is_fails());
    }

    #[test]
    fn span_without_completion_fails_pushout_clause() {
        // in Span the two legs have no common completion
        let d = fixtures::span();
        let setup = LocalisationSetup::new(
            FunctorData::identity(d.clone()),
            MorphClass::all(d.clone()),
            MorphClass::all(d),
        )
        .unwrap();
        let reports = check_riou(&setup).unwrap();
        let r = find(&reports, "riou.ii").unwrap();
        assert!(r.status.is_fails(), "{r:?}");
    }

    #[test]
    fn pushout_search_finds_cospan_completion() {
        // commuting square: pushout of the two legs is the far corner
        let c = fixtures::square_lattice();
        let f = c.morphism_idx("le_00_01").unwrap();
        let g = c.morphism_idx("le_00_10").unwrap();
        let cands = pushouts(&c, f, g);
        assert_eq!(cands.len(), 1);
        assert_eq!(c.object_id(cands[0].0), "11");
    }

    #[test]
    fn poset_enumeration_matches_known_counts() {
        // unlabelled posets: 1 on one element, 2 on two, 5 on three
        assert_eq!(posets_up_to(1).len(), 1);
        assert_eq!(posets_up_to(2).len(), 3);
        assert_eq!(posets_up_to(3).len(), 8);
    }

    #[test]
    fn lifted_checks_hold_on_embedding_fixture() {
        let setup = fixtures::riou_fix();
        let reports = check_p3(&setup, &CheckBudget::default()).unwrap();
        assert!(all_hold(&reports), "{reports:?}");
    }

    #[test]
    fn lift_skipped_when_precondition_fails() {
        let setup = fixtures::pt_into_pt_pt();
        let reports = check_p3(&setup, &CheckBudget::default()).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].status.is_fails());
    }

    #[test]
    fn bounded_diagram_hypothesis_on_fixtures() {
        let setup = fixtures::riou_fix();
        let reports = check_referee(&setup, &CheckBudget::default()).unwrap();
        assert!(all_hold(&reports), "{reports:?}");

        let bad = fixtures::pt_into_pt_pt();
        let reports = check_referee(&bad, &CheckBudget::default()).unwrap();
        assert!(find(&reports, "referee.hypothesis").unwrap().status.is_fails());
    }
}
