//! Typed words over a generating graph, with ground Knuth-Bendix
//! completion.
//!
//! A word is a composable sequence of generators written in diagrammatic
//! order (the word `[f, g]` denotes `g ∘ f`). Rules rewrite subwords and
//! always decrease the length-lexicographic order, so rewriting terminates;
//! completion resolves critical pairs until the system is confluent or a
//! budget runs out.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gen {
    pub name: String,
    pub src: usize,
    pub dst: usize,
}

/// Typed generating alphabet over a finite object set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    pub objects: Vec<String>,
    pub gens: Vec<Gen>,
}

impl Alphabet {
    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }
}

/// A typed word in diagrammatic order; the empty word sits at `at`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    pub letters: Vec<usize>,
    /// Source object; redundant for nonempty words but needed for empty
    /// ones.
    pub src: usize,
}

impl Word {
    pub fn empty(at: usize) -> Word {
        Word { letters: Vec::new(), src: at }
    }

    pub fn single(alpha: &Alphabet, g: usize) -> Word {
        Word { letters: vec![g], src: alpha.gens[g].src }
    }

    pub fn dst(&self, alpha: &Alphabet) -> usize {
        match self.letters.last() {
            Some(&g) => alpha.gens[g].dst,
            None => self.src,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// `self` then `other` (so `other ∘ self` in application order).
    pub fn then(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters, src: if self.letters.is_empty() { other.src } else { self.src } }
    }

    pub fn well_typed(&self, alpha: &Alphabet) -> bool {
        self.letters
            .windows(2)
            .all(|w| alpha.gens[w[0]].dst == alpha.gens[w[1]].src)
            && self.letters.first().map_or(true, |&g| alpha.gens[g].src == self.src)
    }

    pub fn display(&self, alpha: &Alphabet) -> String {
        if self.letters.is_empty() {
            format!("1_{}", alpha.objects[self.src])
        } else {
            self.letters.iter().map(|&g| alpha.gens[g].name.as_str()).collect::<Vec<_>>().join("*")
        }
    }
}

/// Length-lexicographic comparison; generator precedence is the alphabet
/// index order.
pub fn word_order(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
    /// Source object of both sides (needed when rhs is empty).
    pub src: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RewriteBudget {
    pub max_rules: usize,
    pub max_word_len: usize,
    pub max_passes: usize,
}

impl RewriteBudget {
    pub fn default_budget() -> RewriteBudget {
        RewriteBudget { max_rules: 2000, max_word_len: 64, max_passes: 200 }
    }
}

/// An oriented string rewriting system over a typed alphabet.
#[derive(Debug, Clone)]
pub struct RewriteSystem {
    pub alphabet: Alphabet,
    pub rules: Vec<Rule>,
    pub complete: bool,
}

impl RewriteSystem {
    /// Orient a set of equations into reducing rules and complete them.
    /// On budget exhaustion the partial system is returned with
    /// `complete = false`.
    pub fn complete_from_equations(
        alphabet: Alphabet,
        equations: Vec<(Word, Word)>,
        budget: &RewriteBudget,
    ) -> RewriteSystem {
        let mut sys = RewriteSystem { alphabet, rules: Vec::new(), complete: false };
        let mut pending: Vec<(Vec<usize>, Vec<usize>, usize)> = equations
            .into_iter()
            .map(|(a, b)| {
                debug_assert!(a.well_typed(&sys.alphabet) && b.well_typed(&sys.alphabet));
                (a.letters, b.letters, a.src)
            })
            .collect();

        let mut passes = 0usize;
        loop {
            passes += 1;
            if passes > budget.max_passes {
                return sys;
            }
            // orient all pending equations
            while let Some((a, b, src)) = pending.pop() {
                let a = sys.reduce_letters(&a);
                let b = sys.reduce_letters(&b);
                if a == b {
                    continue;
                }
                if a.len() > budget.max_word_len || b.len() > budget.max_word_len {
                    return sys;
                }
                let (lhs, rhs) = match word_order(&a, &b) {
                    std::cmp::Ordering::Greater => (a, b),
                    std::cmp::Ordering::Less => (b, a),
                    std::cmp::Ordering::Equal => unreachable!(),
                };
                sys.rules.push(Rule { lhs, rhs, src });
                if sys.rules.len() > budget.max_rules {
                    return sys;
                }
                // existing rules may now be joinable differently; keep them,
                // reduction handles redundancy
            }
            // critical pairs
            let mut new_pairs = Vec::new();
            let rules = sys.rules.clone();
            for r1 in &rules {
                for r2 in &rules {
                    for (w1, w2, src) in superpositions(r1, r2) {
                        let n1 = sys.reduce_letters(&w1);
                        let n2 = sys.reduce_letters(&w2);
                        if n1 != n2 {
                            new_pairs.push((n1, n2, src));
                        }
                    }
                }
            }
            if new_pairs.is_empty() {
                sys.dedup_rules();
                sys.complete = true;
                return sys;
            }
            pending = new_pairs;
        }
    }

    fn dedup_rules(&mut self) {
        let mut seen = BTreeSet::new();
        self.rules.retain(|r| seen.insert((r.lhs.clone(), r.rhs.clone())));
        self.rules.sort_by(|a, b| word_order(&a.lhs, &b.lhs).then_with(|| word_order(&a.rhs, &b.rhs)));
    }

    pub fn reduce_letters(&self, letters: &[usize]) -> Vec<usize> {
        let mut w = letters.to_vec();
        'outer: loop {
            for r in &self.rules {
                if r.lhs.len() > w.len() {
                    continue;
                }
                for i in 0..=(w.len() - r.lhs.len()) {
                    if w[i..i + r.lhs.len()] == r.lhs[..] {
                        let mut next = w[..i].to_vec();
                        next.extend_from_slice(&r.rhs);
                        next.extend_from_slice(&w[i + r.lhs.len()..]);
                        w = next;
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    pub fn reduce(&self, word: &Word) -> Word {
        Word { letters: self.reduce_letters(&word.letters), src: word.src }
    }

    pub fn is_irreducible(&self, letters: &[usize]) -> bool {
        for r in &self.rules {
            if r.lhs.len() <= letters.len() {
                for i in 0..=(letters.len() - r.lhs.len()) {
                    if letters[i..i + r.lhs.len()] == r.lhs[..] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Words equal modulo the congruence; decided exactly when the system is
    /// complete.
    pub fn equal(&self, a: &Word, b: &Word) -> bool {
        self.reduce(a) == self.reduce(b)
    }

    /// All irreducible words with source `src`, by prefix-closed DFS.
    ///
    /// Irreducible words are prefix-closed, so the search is exhaustive; it
    /// errors when more than `max_words` words (or a word longer than
    /// `max_len`) would be produced, which signals an infinite or oversized
    /// hom-set.
    pub fn irreducible_words_from(
        &self,
        src: usize,
        max_words: usize,
        max_len: usize,
    ) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        let mut stack = vec![Word::empty(src)];
        while let Some(w) = stack.pop() {
            if out.len() >= max_words {
                return Err(Error::budget(
                    "enumerating irreducible words",
                    format!("more than {max_words} words from {}", self.alphabet.objects[src]),
                ));
            }
            out.push(w.clone());
            if w.len() >= max_len {
                return Err(Error::budget(
                    "enumerating irreducible words",
                    format!("word longer than {max_len}"),
                ));
            }
            let at = w.dst(&self.alphabet);
            // deterministic order: extend by generator index
            for g in (0..self.alphabet.gen_count()).rev() {
                if self.alphabet.gens[g].src == at {
                    let mut letters = w.letters.clone();
                    letters.push(g);
                    if self.is_irreducible(&letters) {
                        stack.push(Word { letters, src });
                    }
                }
            }
        }
        out.sort_by(|a, b| word_order(&a.letters, &b.letters));
        Ok(out)
    }
}

/// Superposition words of two rules: overlaps of a suffix of `r1.lhs` with a
/// prefix of `r2.lhs`, and containments of `r2.lhs` in `r1.lhs`. Each yields
/// the two one-step reducts of the superposed word.
fn superpositions(r1: &Rule, r2: &Rule) -> Vec<(Vec<usize>, Vec<usize>, usize)> {
    let mut out = Vec::new();
    let (l1, l2) = (&r1.lhs, &r2.lhs);
    // overlap: suffix of l1 of length k equals prefix of l2 of length k
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            // w = l1 + l2[k..]
            let mut left = r1.rhs.clone();
            left.extend_from_slice(&l2[k..]);
            let mut right = l1[..l1.len() - k].to_vec();
            right.extend_from_slice(&r2.rhs);
            out.push((left, right, r1.src));
        }
    }
    // containment: l2 occurs inside l1 (proper)
    if l2.len() < l1.len() {
        for i in 0..=(l1.len() - l2.len()) {
            if l1[i..i + l2.len()] == l2[..] {
                let left = r1.rhs.clone();
                let mut right = l1[..i].to_vec();
                right.extend_from_slice(&r2.rhs);
                right.extend_from_slice(&l1[i + l2.len()..]);
                out.push((left, right, r1.src));
            }
        }
    } else if l1 == l2 && r1.rhs != r2.rhs {
        out.push((r1.rhs.clone(), r2.rhs.clone(), r1.src));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free_loop() -> Alphabet {
        Alphabet {
            objects: vec!["x".into()],
            gens: vec![Gen { name: "a".into(), src: 0, dst: 0 }],
        }
    }

    #[test]
    fn no_relations_is_complete() {
        let sys = RewriteSystem::complete_from_equations(
            free_loop(),
            vec![],
            &RewriteBudget::default_budget(),
        );
        assert!(sys.complete);
        assert!(sys.irreducible_words_from(0, 10, 5).is_err()); // infinite monoid
    }

    #[test]
    fn idempotent_relation_closes() {
        // a*a = a
        let alpha = free_loop();
        let eqs = vec![(
            Word { letters: vec![0, 0], src: 0 },
            Word { letters: vec![0], src: 0 },
        )];
        let sys =
            RewriteSystem::complete_from_equations(alpha, eqs, &RewriteBudget::default_budget());
        assert!(sys.complete);
        let words = sys.irreducible_words_from(0, 10, 5).unwrap();
        assert_eq!(words.len(), 2); // empty word and a
    }

    #[test]
    fn group_inverse_relations() {
        // generators a, abar with a*abar = abar*a = empty: Z, infinite
        let alpha = Alphabet {
            objects: vec!["x".into()],
            gens: vec![
                Gen { name: "a".into(), src: 0, dst: 0 },
                Gen { name: "abar".into(), src: 0, dst: 0 },
            ],
        };
        let eqs = vec![
            (Word { letters: vec![0, 1], src: 0 }, Word::empty(0)),
            (Word { letters: vec![1, 0], src: 0 }, Word::empty(0)),
        ];
        let sys =
            RewriteSystem::complete_from_equations(alpha, eqs, &RewriteBudget::default_budget());
        assert!(sys.complete);
        // irreducible words are a^n and abar^n
        let words = sys.irreducible_words_from(0, 7, 3).err().expect("infinite");
        assert!(words.is_budget());
    }

    #[test]
    fn torsion_group_closes() {
        // a^3 = empty on top of the inverse relations: Z/3
        let alpha = Alphabet {
            objects: vec!["x".into()],
            gens: vec![
                Gen { name: "a".into(), src: 0, dst: 0 },
                Gen { name: "abar".into(), src: 0, dst: 0 },
            ],
        };
        let eqs = vec![
            (Word { letters: vec![0, 1], src: 0 }, Word::empty(0)),
            (Word { letters: vec![1, 0], src: 0 }, Word::empty(0)),
            (Word { letters: vec![0, 0, 0], src: 0 }, Word::empty(0)),
        ];
        let sys =
            RewriteSystem::complete_from_equations(alpha, eqs, &RewriteBudget::default_budget());
        assert!(sys.complete);
        let words = sys.irreducible_words_from(0, 100, 50).unwrap();
        assert_eq!(words.len(), 3);
    }

    #[test]
    fn typed_chain_composite() {
        // f: x -> y, g: y -> z, h: x -> z with g∘f = h
        let alpha = Alphabet {
            objects: vec!["x".into(), "y".into(), "z".into()],
            gens: vec![
                Gen { name: "f".into(), src: 0, dst: 1 },
                Gen { name: "g".into(), src: 1, dst: 2 },
                Gen { name: "h".into(), src: 0, dst: 2 },
            ],
        };
        let eqs = vec![(
            Word { letters: vec![0, 1], src: 0 },
            Word { letters: vec![2], src: 0 },
        )];
        let sys =
            RewriteSystem::complete_from_equations(alpha, eqs, &RewriteBudget::default_budget());
        assert!(sys.complete);
        let words = sys.irreducible_words_from(0, 10, 5).unwrap();
        // empty@x, f, h — the word f·g reduces to h
        assert_eq!(words.len(), 3);
    }
}
