//! Independent fundamental-group presentation, built the classical
//! edge-path way: generators only for morphisms outside a spanning tree
//! (the tree is contracted up front rather than killed by relators), one
//! relator per non-degenerate 2-simplex of the nerve. The tree is grown
//! depth-first preferring the highest morphism index, deliberately
//! different from the breadth-first lowest-index tree of the main
//! presentation, so the two paths share no construction choices.

use crate::category::FinCategory;

use super::{decide_triviality, GroupPresentation, Pi1Budget, Pi1Verdict};

pub fn edge_path_presentation(c: &FinCategory, component: &[usize]) -> GroupPresentation {
    let mut in_comp = vec![false; c.object_count()];
    for &x in component {
        in_comp[x] = true;
    }
    let edges: Vec<usize> = (0..c.morphism_count())
        .filter(|&i| {
            let m = c.morphism(i);
            !c.is_identity(i) && in_comp[m.src] && in_comp[m.dst]
        })
        .collect();

    // depth-first spanning tree, highest morphism index first
    let mut tree = vec![false; c.morphism_count()];
    if let Some(&root) = component.iter().max() {
        let mut seen = vec![false; c.object_count()];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &e in edges.iter().rev() {
                let m = c.morphism(e);
                let other = if m.src == x && !seen[m.dst] {
                    Some(m.dst)
                } else if m.dst == x && !seen[m.src] {
                    Some(m.src)
                } else {
                    None
                };
                if let Some(y) = other {
                    seen[y] = true;
                    tree[e] = true;
                    stack.push(y);
                }
            }
        }
    }

    let mut generators = Vec::new();
    let mut lit = vec![0i32; c.morphism_count()];
    for &e in &edges {
        if !tree[e] {
            generators.push(c.morphism(e).id.clone());
            lit[e] = generators.len() as i32;
        }
    }

    let mut relators = Vec::new();
    for (g, f) in c.composable_pairs() {
        if c.is_identity(g) || c.is_identity(f) {
            continue;
        }
        let mf = c.morphism(f);
        if !in_comp[mf.src] || !in_comp[c.morphism(g).dst] {
            continue;
        }
        let h = c.compose(g, f).expect("total table");
        let mut word = Vec::new();
        if lit[f] != 0 {
            word.push(lit[f]);
        }
        if lit[g] != 0 {
            word.push(lit[g]);
        }
        if !c.is_identity(h) && lit[h] != 0 {
            word.push(-lit[h]);
        }
        relators.push(word);
    }
    relators.retain(|w| !w.is_empty());
    relators.sort();
    relators.dedup();

    GroupPresentation { generators, relators }
}

pub fn edge_path_verdict(
    c: &FinCategory,
    component: &[usize],
    budget: &Pi1Budget,
) -> Pi1Verdict {
    decide_triviality(&edge_path_presentation(c, component), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectivity::{pi0, pi1_presentation, NontrivialityCertificate};
    use crate::fixtures;

    #[test]
    fn parallel_pair_is_a_circle_here_too() {
        let c = fixtures::par();
        let comp = pi0(&c).remove(0);
        let p = edge_path_presentation(&c, &comp);
        // one edge enters the tree, one survives as a free generator
        assert_eq!(p.generators.len(), 1);
        match edge_path_verdict(&c, &comp, &Pi1Budget::default()) {
            Pi1Verdict::Nontrivial(NontrivialityCertificate::Abelianization {
                free_rank,
                ..
            }) => assert_eq!(free_rank, 1),
            v => panic!("expected Z, got {v:?}"),
        }
    }

    #[test]
    fn agrees_with_main_presentation_on_fixtures() {
        let budget = Pi1Budget::default();
        for c in [
            fixtures::pt(),
            fixtures::arrow(),
            fixtures::chain2(),
            fixtures::span(),
            fixtures::cospan(),
            fixtures::square_lattice(),
            fixtures::ind(3),
            fixtures::ind(5),
        ] {
            let comp = pi0(&c).remove(0);
            let main = decide_triviality(&pi1_presentation(&c, &comp), &budget);
            let oracle = edge_path_verdict(&c, &comp, &budget);
            assert_eq!(main.is_trivial(), oracle.is_trivial(), "{main:?} vs {oracle:?}");
        }
    }
}
