//! Low-degree connectivity of the nerve of a finite category.
//!
//! Degree -1 and 0 are decided exactly (nonemptiness, zig-zag components).
//! Degree 1 goes through a finite presentation of the fundamental group and
//! a three-stage decision pipeline: Tietze simplification, abelianization
//! via Smith normal form, and bounded coset enumeration, with a small
//! quotient search as a last resort. Verdicts are three-valued; Unknown
//! carries the exhausted budget. ∞-connectedness is only ever reported via
//! named sufficient conditions (cofiltering, terminal or initial object).

pub mod coset;
pub mod edge_path;
pub mod snf;

use crate::category::{opposite, FinCategory};
use coset::{enumerate_cosets, CosetOutcome};
use snf::smith_normal_form;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    /// Words in signed 1-based generator indices: `+(g+1)` is generator `g`,
    /// `-(g+1)` its inverse.
    pub relators: Vec<Vec<i32>>,
}

impl GroupPresentation {
    pub fn empty() -> Self {
        GroupPresentation { generators: Vec::new(), relators: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pi1Budget {
    pub max_cosets: usize,
    /// Largest symmetric-group order tried in the quotient search.
    pub max_quotient_order: usize,
}

impl Default for Pi1Budget {
    fn default() -> Self {
        Pi1Budget { max_cosets: 100_000, max_quotient_order: 24 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialityCertificate {
    /// Tietze moves reduced the presentation to no generators.
    Collapsed,
    /// Coset enumeration over the trivial subgroup closed with index 1.
    CosetTable { cosets_defined: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NontrivialityCertificate {
    /// The abelianization is nonzero.
    Abelianization { free_rank: usize, torsion: Vec<i64> },
    /// Coset enumeration closed: the group is finite of this order > 1.
    FiniteOrder { order: usize },
    /// A surjection-free witness: some homomorphism to the named group has
    /// nontrivial image.
    Quotient { target: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pi1Verdict {
    Trivial(TrivialityCertificate),
    Nontrivial(NontrivialityCertificate),
    Unknown { reason: String },
}

impl Pi1Verdict {
    pub fn is_trivial(&self) -> bool {
        matches!(self, Pi1Verdict::Trivial(_))
    }
    pub fn is_nontrivial(&self) -> bool {
        matches!(self, Pi1Verdict::Nontrivial(_))
    }
    pub fn is_unknown(&self) -> bool {
        matches!(self, Pi1Verdict::Unknown { .. })
    }
}

/// Zig-zag components of the object set; each component sorted, components
/// ordered by their least object index.
pub fn pi0(c: &FinCategory) -> Vec<Vec<usize>> {
    let n = c.object_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for m in c.morphisms() {
        let a = find(&mut parent, m.src);
        let b = find(&mut parent, m.dst);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); n];
    for x in 0..n {
        let r = find(&mut parent, x);
        buckets[r].push(x);
    }
    buckets.into_iter().filter(|b| !b.is_empty()).collect()
}

/// Edge-path presentation of π₁ of the nerve restricted to one zig-zag
/// component: one generator per non-identity morphism, a length-1 relator
/// per spanning-tree edge, and `f·g·(g∘f)⁻¹` per composable pair.
pub fn pi1_presentation(c: &FinCategory, component: &[usize]) -> GroupPresentation {
    let in_comp: Vec<bool> = {
        let mut v = vec![false; c.object_count()];
        for &x in component {
            v[x] = true;
        }
        v
    };
    let mut generators = Vec::new();
    let mut gen_of_mor = vec![None; c.morphism_count()];
    for (i, m) in c.morphisms().iter().enumerate() {
        if !c.is_identity(i) && in_comp[m.src] && in_comp[m.dst] {
            gen_of_mor[i] = Some(generators.len() as i32 + 1);
            generators.push(m.id.clone());
        }
    }

    // spanning tree by BFS over undirected morphism edges, lowest morphism
    // index first
    let mut relators = Vec::new();
    if let Some(&root) = component.iter().min() {
        let mut seen = vec![false; c.object_count()];
        seen[root] = true;
        let mut frontier = vec![root];
        while let Some(x) = frontier.pop() {
            for (i, m) in c.morphisms().iter().enumerate() {
                let lit = match gen_of_mor[i] {
                    Some(l) => l,
                    None => continue,
                };
                let other = if m.src == x && !seen[m.dst] {
                    Some(m.dst)
                } else if m.dst == x && !seen[m.src] {
                    Some(m.src)
                } else {
                    None
                };
                if let Some(y) = other {
                    seen[y] = true;
                    frontier.push(y);
                    relators.push(vec![lit]);
                }
            }
        }
    }

    for (g, f) in c.composable_pairs() {
        let (lf, lg) = match (gen_of_mor[f], gen_of_mor[g]) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        let h = c.compose(g, f).expect("total table");
        let mut word = vec![lf, lg];
        if let Some(lh) = gen_of_mor[h] {
            word.push(-lh);
        }
        relators.push(word);
    }

    GroupPresentation { generators, relators }
}

fn free_cyclic_reduce(w: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    while out.len() >= 2 && *out.first().unwrap() == -*out.last().unwrap() {
        out.pop();
        out.remove(0);
    }
    out
}

/// Tietze simplification: free/cyclic reduction, elimination of generators
/// forced trivial (length-1 relators) or equal to another generator's
/// inverse power (length-2 relators), and removal of generators occurring
/// exactly once in exactly one relator.
pub fn tietze_simplify(p: &GroupPresentation) -> GroupPresentation {
    let mut gens: Vec<String> = p.generators.clone();
    let mut rels: Vec<Vec<i32>> = p.relators.clone();

    for _pass in 0..10 * (gens.len() + rels.len() + 1) {
        rels = rels.iter().map(|r| free_cyclic_reduce(r)).filter(|r| !r.is_empty()).collect();
        rels.sort();
        rels.dedup();

        let mut changed = false;

        // g = 1
        if let Some(r) = rels.iter().find(|r| r.len() == 1) {
            let g = r[0].abs();
            rels = rels
                .iter()
                .map(|r| r.iter().copied().filter(|l| l.abs() != g).collect())
                .collect();
            remove_generator(&mut gens, &mut rels, g);
            changed = true;
        }

        // a·b = 1 with distinct generators: b := a⁻¹
        if !changed {
            if let Some(r) =
                rels.iter().find(|r| r.len() == 2 && r[0].abs() != r[1].abs()).cloned()
            {
                let (a, b) = (r[0], r[1]);
                let gb = b.abs();
                // b^sign(b) = a⁻¹, so an occurrence +gb becomes a to the
                // power -sign(a·b)
                let repl = if b > 0 { -a } else { a };
                rels = rels
                    .iter()
                    .map(|w| {
                        w.iter()
                            .map(|&l| {
                                if l.abs() == gb {
                                    if l > 0 { repl } else { -repl }
                                } else {
                                    l
                                }
                            })
                            .collect()
                    })
                    .collect();
                remove_generator(&mut gens, &mut rels, gb);
                changed = true;
            }
        }

        // generator used exactly once overall: its relator defines it
        if !changed {
            let mut count = vec![0usize; gens.len() + 1];
            for w in &rels {
                for &l in w {
                    count[l.unsigned_abs() as usize] += 1;
                }
            }
            if let Some(g) = (1..=gens.len()).find(|&g| count[g] == 1) {
                let g = g as i32;
                rels.retain(|w| w.iter().all(|l| l.abs() != g));
                remove_generator(&mut gens, &mut rels, g);
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }

    GroupPresentation { generators: gens, relators: rels }
}

fn remove_generator(gens: &mut Vec<String>, rels: &mut Vec<Vec<i32>>, g: i32) {
    let idx = (g - 1) as usize;
    gens.remove(idx);
    for w in rels.iter_mut() {
        for l in w.iter_mut() {
            let a = l.abs();
            debug_assert!(a != g);
            if a > g {
                *l = if *l > 0 { a - 1 } else { -(a - 1) };
            }
        }
    }
}

fn abelianization_matrix(p: &GroupPresentation) -> Vec<Vec<i64>> {
    p.relators
        .iter()
        .map(|w| {
            let mut row = vec![0i64; p.generators.len()];
            for &l in w {
                let g = (l.unsigned_abs() - 1) as usize;
                row[g] += if l > 0 { 1 } else { -1 };
            }
            row
        })
        .collect()
}

fn symmetric_group(n: usize) -> Vec<Vec<u8>> {
    let mut elems = Vec::new();
    let mut base: Vec<u8> = (0..n as u8).collect();
    permute(&mut base, 0, &mut elems);
    elems
}

fn permute(v: &mut Vec<u8>, k: usize, out: &mut Vec<Vec<u8>>) {
    if k == v.len() {
        out.push(v.clone());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, out);
        v.swap(k, i);
    }
}

fn perm_apply(p: &[u8], x: u8) -> u8 {
    p[x as usize]
}

fn perm_inverse(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u8;
    }
    inv
}

fn find_small_quotient(p: &GroupPresentation, max_order: usize) -> Option<String> {
    for n in [3usize, 4] {
        let order: usize = (1..=n).product();
        if order > max_order {
            continue;
        }
        let elems = symmetric_group(n);
        let k = p.generators.len();
        if k == 0 {
            continue;
        }
        // cap the brute-force assignment space
        if (order as f64).powi(k as i32) > 2_000_000.0 {
            continue;
        }
        let mut assign: Vec<usize> = vec![0; k];
        'outer: loop {
            let images: Vec<&Vec<u8>> = assign.iter().map(|&i| &elems[i]).collect();
            let ok = p.relators.iter().all(|w| {
                let mut cur: Vec<u8> = (0..n as u8).collect();
                for &l in w {
                    let g = (l.unsigned_abs() - 1) as usize;
                    let step =
                        if l > 0 { images[g].clone() } else { perm_inverse(images[g]) };
                    cur = cur.iter().map(|&x| perm_apply(&step, x)).collect();
                }
                cur.iter().enumerate().all(|(i, &x)| x as usize == i)
            });
            let nontrivial =
                images.iter().any(|im| im.iter().enumerate().any(|(i, &x)| x as usize != i));
            if ok && nontrivial {
                return Some(format!("S{n}"));
            }
            // next assignment
            let mut pos = 0;
            loop {
                if pos == k {
                    break 'outer;
                }
                assign[pos] += 1;
                if assign[pos] < elems.len() {
                    break;
                }
                assign[pos] = 0;
                pos += 1;
            }
        }
    }
    None
}

/// Decide triviality of a finitely presented group within the given budget.
pub fn decide_triviality(p: &GroupPresentation, budget: &Pi1Budget) -> Pi1Verdict {
    let simp = tietze_simplify(p);
    if simp.generators.is_empty() {
        return Pi1Verdict::Trivial(TrivialityCertificate::Collapsed);
    }

    if simp.relators.is_empty() {
        // nontrivial free group
        return Pi1Verdict::Nontrivial(NontrivialityCertificate::Abelianization {
            free_rank: simp.generators.len(),
            torsion: Vec::new(),
        });
    }
    if let Some(snf) = smith_normal_form(&abelianization_matrix(&simp)) {
        if !snf.cokernel_trivial() {
            return Pi1Verdict::Nontrivial(NontrivialityCertificate::Abelianization {
                free_rank: snf.free_rank(),
                torsion: snf.torsion(),
            });
        }
    }

    match enumerate_cosets(simp.generators.len(), &simp.relators, budget.max_cosets) {
        CosetOutcome::Closed { index: 1, cosets_defined } => {
            return Pi1Verdict::Trivial(TrivialityCertificate::CosetTable { cosets_defined })
        }
        CosetOutcome::Closed { index, .. } => {
            return Pi1Verdict::Nontrivial(NontrivialityCertificate::FiniteOrder {
                order: index,
            })
        }
        CosetOutcome::Exhausted { .. } => {}
    }

    if let Some(target) = find_small_quotient(&simp, budget.max_quotient_order) {
        return Pi1Verdict::Nontrivial(NontrivialityCertificate::Quotient { target });
    }

    Pi1Verdict::Unknown {
        reason: format!(
            "coset budget {} exhausted and no quotient of order ≤ {} found",
            budget.max_cosets, budget.max_quotient_order
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteringReport {
    /// At most one morphism between any ordered pair of objects.
    pub ordered: bool,
    pub cofiltering: bool,
    /// Human-readable witnesses for the first few failures.
    pub witnesses: Vec<String>,
}

/// Cofiltering per the cone-pointing-in convention: nonempty, every pair of
/// objects admits a common source, every parallel pair admits an equalising
/// arrow from some source.
pub fn filtering_check(c: &FinCategory) -> FilteringReport {
    let mut witnesses = Vec::new();
    let mut ordered = true;
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            if c.hom(x, y).len() > 1 {
                ordered = false;
                witnesses.push(format!(
                    "parallel morphisms from {} to {}",
                    c.objects()[x],
                    c.objects()[y]
                ));
            }
        }
    }

    let mut cofiltering = c.object_count() > 0;
    if !cofiltering {
        witnesses.push("empty category".into());
    }
    'pairs: for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            let has_source = (0..c.object_count())
                .any(|z| !c.hom(z, x).is_empty() && !c.hom(z, y).is_empty());
            if !has_source {
                cofiltering = false;
                witnesses.push(format!(
                    "no common source for {} and {}",
                    c.objects()[x],
                    c.objects()[y]
                ));
                break 'pairs;
            }
        }
    }
    if cofiltering {
        'par: for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                let fs = c.hom(x, y);
                for i in 0..fs.len() {
                    for j in i + 1..fs.len() {
                        let equalised = (0..c.object_count()).any(|w| {
                            c.hom(w, x).iter().any(|&h| {
                                c.compose(fs[i], h) == c.compose(fs[j], h)
                            })
                        });
                        if !equalised {
                            cofiltering = false;
                            witnesses.push(format!(
                                "no equalising arrow for {} and {}",
                                c.morphism(fs[i]).id,
                                c.morphism(fs[j]).id
                            ));
                            break 'par;
                        }
                    }
                }
            }
        }
    }

    FilteringReport { ordered, cofiltering, witnesses }
}

/// Dual check: the category is filtering iff its opposite is cofiltering.
pub fn is_filtering(c: &FinCategory) -> bool {
    filtering_check(&opposite(c)).cofiltering
}

fn terminal_object(c: &FinCategory) -> Option<usize> {
    (0..c.object_count()).find(|&t| (0..c.object_count()).all(|x| c.hom(x, t).len() == 1))
}

fn initial_object(c: &FinCategory) -> Option<usize> {
    (0..c.object_count()).find(|&i| (0..c.object_count()).all(|x| c.hom(i, x).len() == 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivityReport {
    /// Object ids per zig-zag component.
    pub components: Vec<Vec<String>>,
    /// One verdict per component, same order.
    pub pi1: Vec<Pi1Verdict>,
    pub filtering: FilteringReport,
    /// Named sufficient condition for ∞-connectedness, when one applies.
    pub infinity: Option<String>,
}

impl ConnectivityReport {
    pub fn nonempty(&self) -> bool {
        !self.components.is_empty()
    }

    pub fn zero_connected(&self) -> bool {
        self.components.len() == 1
    }

    /// Some(true)/Some(false) when decided, None when the verdict for the
    /// unique component is Unknown (or the category is not 0-connected in a
    /// decided way).
    pub fn one_connected(&self) -> Option<bool> {
        if self.components.len() != 1 {
            return Some(false);
        }
        match &self.pi1[0] {
            Pi1Verdict::Trivial(_) => Some(true),
            Pi1Verdict::Nontrivial(_) => Some(false),
            Pi1Verdict::Unknown { .. } => None,
        }
    }
}

pub fn connectivity(c: &FinCategory, budget: &Pi1Budget) -> ConnectivityReport {
    let comps = pi0(c);
    let components: Vec<Vec<String>> = comps
        .iter()
        .map(|comp| comp.iter().map(|&x| c.objects()[x].clone()).collect())
        .collect();
    let pi1: Vec<Pi1Verdict> = comps
        .iter()
        .map(|comp| decide_triviality(&pi1_presentation(c, comp), budget))
        .collect();
    let filtering = filtering_check(c);
    let infinity = if filtering.cofiltering {
        Some("cofiltering".to_string())
    } else if terminal_object(c).is_some() {
        Some("terminal object".to_string())
    } else if initial_object(c).is_some() {
        Some("initial object".to_string())
    } else if is_filtering(c) {
        Some("filtering".to_string())
    } else {
        None
    };
    ConnectivityReport { components, pi1, filtering, infinity }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn pi0_counts_zig_zag_components() {
        assert_eq!(pi0(&fixtures::pt()).len(), 1);
        assert_eq!(pi0(&fixtures::pt_pt()).len(), 2);
        assert_eq!(pi0(&fixtures::par()).len(), 1);
        assert_eq!(pi0(&fixtures::span()).len(), 1);
    }

    #[test]
    fn parallel_pair_gives_integers() {
        // nerve of Par is a circle: π₁ = Z, detected by abelianization
        let c = fixtures::par();
        let comp = pi0(&c).remove(0);
        let p = pi1_presentation(&c, &comp);
        assert_eq!(p.generators.len(), 2);
        match decide_triviality(&p, &Pi1Budget::default()) {
            Pi1Verdict::Nontrivial(NontrivialityCertificate::Abelianization {
                free_rank,
                torsion,
            }) => {
                assert_eq!(free_rank, 1);
                assert!(torsion.is_empty());
            }
            v => panic!("expected Z via abelianization, got {v:?}"),
        }
    }

    #[test]
    fn indiscrete_categories_are_simply_connected() {
        for n in 2..=5 {
            let c = fixtures::ind(n);
            let comp = pi0(&c).remove(0);
            let p = pi1_presentation(&c, &comp);
            let v = decide_triviality(&p, &Pi1Budget::default());
            assert!(v.is_trivial(), "Ind({n}) gave {v:?}");
        }
    }

    #[test]
    fn terminal_object_collapses_presentation() {
        for c in [fixtures::arrow(), fixtures::chain2(), fixtures::span(), fixtures::cospan()]
        {
            let comp = pi0(&c).remove(0);
            let p = pi1_presentation(&c, &comp);
            let v = decide_triviality(&p, &Pi1Budget::default());
            assert!(v.is_trivial(), "{v:?}");
        }
    }

    #[test]
    fn square_lattice_simply_connected() {
        let c = fixtures::square_lattice();
        let comp = pi0(&c).remove(0);
        let v = decide_triviality(&pi1_presentation(&c, &comp), &Pi1Budget::default());
        assert!(v.is_trivial(), "{v:?}");
    }

    #[test]
    fn connectivity_report_on_fixtures() {
        let r = connectivity(&fixtures::pt(), &Pi1Budget::default());
        assert!(r.nonempty() && r.zero_connected());
        assert_eq!(r.one_connected(), Some(true));
        assert!(r.infinity.is_some());

        let r = connectivity(&fixtures::pt_pt(), &Pi1Budget::default());
        assert!(!r.zero_connected());
        assert_eq!(r.one_connected(), Some(false));

        let r = connectivity(&fixtures::ind(2), &Pi1Budget::default());
        assert_eq!(r.one_connected(), Some(true));
        assert_eq!(r.infinity.as_deref(), Some("cofiltering"));

        let r = connectivity(&fixtures::par(), &Pi1Budget::default());
        assert_eq!(r.one_connected(), Some(false));
        assert!(r.infinity.is_none());
    }

    #[test]
    fn filtering_check_on_fixtures() {
        let r = filtering_check(&fixtures::pt());
        assert!(r.ordered && r.cofiltering);

        let r = filtering_check(&fixtures::span());
        assert!(r.cofiltering, "{:?}", r.witnesses);

        let r = filtering_check(&fixtures::par());
        assert!(!r.ordered && !r.cofiltering);
    }

    #[test]
    fn tietze_collapses_tree_relators() {
        // a,b with a=1 and ab=1 forces everything trivial
        let p = GroupPresentation {
            generators: vec!["a".into(), "b".into()],
            relators: vec![vec![1], vec![1, 2]],
        };
        let s = tietze_simplify(&p);
        assert!(s.generators.is_empty());
    }

    #[test]
    fn perfect_group_detected_by_coset_enumeration() {
        // (2,3,5) triangle quotient <a,b | a^5, b^3, (ab)^2> = A5: perfect,
        // so abelianization is silent and coset enumeration must decide
        let p = GroupPresentation {
            generators: vec!["a".into(), "b".into()],
            relators: vec![vec![1; 5], vec![2; 3], vec![1, 2, 1, 2]],
        };
        match decide_triviality(&p, &Pi1Budget::default()) {
            Pi1Verdict::Nontrivial(NontrivialityCertificate::FiniteOrder { order }) => {
                assert_eq!(order, 60)
            }
            v => panic!("expected finite order 60, got {v:?}"),
        }
    }
}
