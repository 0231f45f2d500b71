//! Integer Smith normal form, used to read off abelianizations of finite
//! presentations. Matrices here are tiny (one row per relator), so a plain
//! elimination with minimal-pivot selection is enough; arithmetic is checked
//! and overflow surfaces as `None`.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithResult {
    /// Nonzero diagonal invariant factors `d1 | d2 | …`, all positive.
    pub factors: Vec<i64>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithResult {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Rank of the cokernel's free part for a relator matrix with `cols`
    /// generators.
    pub fn free_rank(&self) -> usize {
        self.cols - self.factors.len()
    }

    pub fn torsion(&self) -> Vec<i64> {
        self.factors.iter().copied().filter(|&d| d > 1).collect()
    }

    /// The presented abelian group is trivial iff every generator is killed
    /// by a unit factor.
    pub fn cokernel_trivial(&self) -> bool {
        self.free_rank() == 0 && self.torsion().is_empty()
    }
}

pub fn smith_normal_form(matrix: &[Vec<i64>]) -> Option<SmithResult> {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<i64>> = matrix.to_vec();
    let mut factors = Vec::new();
    let mut top = 0usize;

    while top < rows.min(cols) {
        // find minimal nonzero |entry| in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in top..rows {
            for j in top..cols {
                if m[i][j] != 0
                    && pivot.map_or(true, |(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let (pi, pj) = match pivot {
            Some(p) => p,
            None => break,
        };
        m.swap(top, pi);
        for row in m.iter_mut() {
            row.swap(top, pj);
        }

        // clear the pivot row and column
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in top + 1..rows {
                if m[i][top] != 0 {
                    let q = m[i][top].checked_div(m[top][top])?;
                    for j in top..cols {
                        let t = q.checked_mul(m[top][j])?;
                        m[i][j] = m[i][j].checked_sub(t)?;
                    }
                    if m[i][top] != 0 {
                        m.swap(top, i);
                        dirty = true;
                    }
                }
            }
            for j in top + 1..cols {
                if m[top][j] != 0 {
                    let q = m[top][j].checked_div(m[top][top])?;
                    for row in m.iter_mut().take(rows).skip(top) {
                        let t = q.checked_mul(row[top])?;
                        row[j] = row[j].checked_sub(t)?;
                    }
                    if m[top][j] != 0 {
                        for row in m.iter_mut() {
                            row.swap(top, j);
                        }
                        dirty = true;
                    }
                }
            }
        }

        // divisibility fix: pivot must divide every later entry
        let mut fixed = false;
        'scan: for i in top + 1..rows {
            for j in top + 1..cols {
                if m[i][j] % m[top][top] != 0 {
                    for k in top..cols {
                        m[top][k] = m[top][k].checked_add(m[i][k])?;
                    }
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue;
        }
        factors.push(m[top][top].abs());
        top += 1;
    }

    Some(SmithResult { factors, rows, cols })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_has_no_factors() {
        let r = smith_normal_form(&[vec![0, 0], vec![0, 0]]).unwrap();
        assert_eq!(r.factors, Vec::<i64>::new());
        assert_eq!(r.free_rank(), 2);
    }

    #[test]
    fn identity_matrix_is_trivial_cokernel() {
        let r = smith_normal_form(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(r.cokernel_trivial());
    }

    #[test]
    fn torsion_detected() {
        // Z² / <(2,0),(0,3)> = Z/6: invariant factors 1, 6
        let r = smith_normal_form(&[vec![2, 0], vec![0, 3]]).unwrap();
        assert_eq!(r.factors, vec![1, 6]);
        assert_eq!(r.torsion(), vec![6]);
        assert_eq!(r.free_rank(), 0);
    }

    #[test]
    fn mixed_example() {
        // <(2,4)> in Z²: factors [2], free rank 1
        let r = smith_normal_form(&[vec![2, 4]]).unwrap();
        assert_eq!(r.factors, vec![2]);
        assert_eq!(r.free_rank(), 1);
    }
}
