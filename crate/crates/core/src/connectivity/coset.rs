//! Bounded Todd–Coxeter coset enumeration over the trivial subgroup. A
//! closed table of index 1 certifies triviality; a closed table of larger
//! index certifies a proper finite quotient of nothing smaller than the
//! group itself, i.e. the group is nontrivial. Running out of the coset
//! budget is reported as such.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CosetOutcome {
    /// The table closed; the group has exactly this many elements.
    Closed { index: usize, cosets_defined: usize },
    Exhausted { cosets_defined: usize },
}

/// Relators are words in signed generator indices: `+(g+1)` for `g`,
/// `-(g+1)` for its inverse.
pub fn enumerate_cosets(
    generators: usize,
    relators: &[Vec<i32>],
    max_cosets: usize,
) -> CosetOutcome {
    if generators == 0 {
        return CosetOutcome::Closed { index: 1, cosets_defined: 1 };
    }
    let width = 2 * generators;
    let slot = |letter: i32| -> usize {
        let g = (letter.unsigned_abs() as usize) - 1;
        if letter > 0 { 2 * g } else { 2 * g + 1 }
    };
    let inv_slot = |s: usize| -> usize { s ^ 1 };

    let mut table: Vec<Vec<Option<usize>>> = vec![vec![None; width]];
    let mut parent: Vec<usize> = vec![0];
    let mut defined = 1usize;

    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    // merge queue processing: replace `b` by `a` everywhere
    let mut queue: Vec<(usize, usize)> = Vec::new();
    macro_rules! process_coincidences {
        () => {
            while let Some((x, y)) = queue.pop() {
                let a = find(&mut parent, x);
                let b = find(&mut parent, y);
                if a == b {
                    continue;
                }
                let (keep, drop) = if a < b { (a, b) } else { (b, a) };
                parent[drop] = keep;
                for s in 0..width {
                    if let Some(t) = table[drop][s] {
                        let t = find(&mut parent, t);
                        match table[keep][s] {
                            None => {
                                table[keep][s] = Some(t);
                                // keep tables involutive
                                if table[t][inv_slot(s)].is_none() {
                                    table[t][inv_slot(s)] = Some(keep);
                                }
                            }
                            Some(u) => {
                                let u = find(&mut parent, u);
                                if u != t {
                                    queue.push((u, t));
                                }
                            }
                        }
                    }
                }
            }
        };
    }

    loop {
        process_coincidences!();

        // find the first live coset with an incomplete relator scan or an
        // undefined slot, HLT style: scan every relator at every live coset,
        // defining new cosets as needed
        let mut progressed = false;
        let mut coset = 0;
        while coset < table.len() {
            if find(&mut parent, coset) != coset {
                coset += 1;
                continue;
            }
            for rel in relators {
                if rel.is_empty() {
                    continue;
                }
                let mut cur = coset;
                let mut filled = false;
                for &letter in rel {
                    let s = slot(letter);
                    cur = find(&mut parent, cur);
                    match table[cur][s] {
                        Some(next) => cur = find(&mut parent, next),
                        None => {
                            if defined >= max_cosets {
                                return CosetOutcome::Exhausted { cosets_defined: defined };
                            }
                            let fresh = table.len();
                            table.push(vec![None; width]);
                            parent.push(fresh);
                            defined += 1;
                            table[cur][s] = Some(fresh);
                            table[fresh][inv_slot(s)] = Some(cur);
                            cur = fresh;
                            filled = true;
                        }
                    }
                }
                let start = find(&mut parent, coset);
                let end = find(&mut parent, cur);
                if end != start {
                    queue.push((start, end));
                }
                if filled || !queue.is_empty() {
                    progressed = true;
                }
                process_coincidences!();
            }
            // every generator must also act totally on live cosets
            let base = find(&mut parent, coset);
            if base == coset {
                for s in 0..width {
                    if table[base][s].is_none() {
                        if defined >= max_cosets {
                            return CosetOutcome::Exhausted { cosets_defined: defined };
                        }
                        let fresh = table.len();
                        table.push(vec![None; width]);
                        parent.push(fresh);
                        defined += 1;
                        table[base][s] = Some(fresh);
                        table[fresh][inv_slot(s)] = Some(base);
                        progressed = true;
                    }
                }
            }
            coset += 1;
        }

        if !progressed && queue.is_empty() {
            let index = (0..table.len()).filter(|&i| find(&mut parent, i) == i).count();
            return CosetOutcome::Closed { index, cosets_defined: defined };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_exhausts() {
        let out = enumerate_cosets(1, &[], 100);
        assert!(matches!(out, CosetOutcome::Exhausted { .. }));
    }

    #[test]
    fn cyclic_three_closes() {
        let out = enumerate_cosets(1, &[vec![1, 1, 1]], 100);
        match out {
            CosetOutcome::Closed { index, .. } => assert_eq!(index, 3),
            _ => panic!("expected closed table, got {out:?}"),
        }
    }

    #[test]
    fn trivialised_generator_gives_index_one() {
        let out = enumerate_cosets(2, &[vec![1], vec![2, 2], vec![2]], 100);
        match out {
            CosetOutcome::Closed { index, .. } => assert_eq!(index, 1),
            _ => panic!("expected closed table, got {out:?}"),
        }
    }

    #[test]
    fn symmetric_three_closes_at_six() {
        // <a,b | a², b², (ab)³>
        let out = enumerate_cosets(2, &[vec![1, 1], vec![2, 2], vec![1, 2, 1, 2, 1, 2]], 1000);
        match out {
            CosetOutcome::Closed { index, .. } => assert_eq!(index, 6),
            _ => panic!("expected closed table, got {out:?}"),
        }
    }

    #[test]
    fn quaternion_group_closes_at_eight() {
        // <a,b | a⁴, a²b⁻², b⁻¹aba>
        let out = enumerate_cosets(
            1 + 1,
            &[vec![1, 1, 1, 1], vec![1, 1, -2, -2], vec![-2, 1, 2, 1]],
            5000,
        );
        match out {
            CosetOutcome::Closed { index, .. } => assert_eq!(index, 8),
            _ => panic!("expected closed table, got {out:?}"),
        }
    }
}
