//! Smith normal form of integer matrices and groupification of monoid
//! presentations.
//!
//! The groupification of a presentation with n generators and relations
//! (L_k, R_k) is the abelian group Z^n / <L_k - R_k>. Its invariant factors
//! come out of the Smith normal form of the relation matrix and classify the
//! group as Z^rank + sum Z/d_i with d_1 | d_2 | ... This backs the
//! torsion-freeness test for cokernels of groupified monoid homomorphisms.

#![allow(clippy::needless_range_loop)] // explicit indexing mirrors the row/column operations

use serde::{Deserialize, Serialize};

/// Finitely generated abelian group in invariant-factor form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupPresentation {
    /// Free rank.
    pub rank: usize,
    /// Invariant factors >= 2, each dividing the next.
    pub torsion_divisors: Vec<u64>,
}

impl AbelianGroupPresentation {
    pub fn is_torsion_free(&self) -> bool {
        self.torsion_divisors.is_empty()
    }
}

/// Invariant factors (non-negative, divisibility chain) of an integer matrix.
///
/// Returns the diagonal of the Smith normal form restricted to its nonzero
/// entries. Rows are relations, columns are generators.
pub fn invariant_factors(rows: usize, cols: usize, entries: &[i128]) -> Vec<u64> {
    assert_eq!(entries.len(), rows * cols);
    let mut m: Vec<Vec<i128>> = (0..rows)
        .map(|i| entries[i * cols..(i + 1) * cols].to_vec())
        .collect();
    let mut factors = Vec::new();
    let mut t = 0usize;
    let dim = rows.min(cols);
    while t < dim {
        // Locate the entry of minimal nonzero absolute value in the
        // remaining submatrix.
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if m[i][j] != 0 {
                    match pivot {
                        Some((pi, pj)) if m[pi][pj].abs() <= m[i][j].abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        // Euclidean reduction of row and column t.
        let mut clean = true;
        for i in t + 1..rows {
            let q = m[i][t].div_euclid(m[t][t]);
            if q != 0 {
                for j in t..cols {
                    m[i][j] -= q * m[t][j];
                }
            }
            if m[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = m[t][j].div_euclid(m[t][t]);
            if q != 0 {
                for i in t..rows {
                    m[i][j] -= q * m[i][t];
                }
            }
            if m[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility: the pivot must divide every remaining entry.
        let p = m[t][t];
        let mut offender = None;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if m[i][j] % p != 0 {
                    offender = Some(i);
                    break 'scan;
                }
            }
        }
        if let Some(i) = offender {
            for j in t..cols {
                let v = m[i][j];
                m[t][j] += v;
            }
            continue;
        }
        factors.push(p.unsigned_abs() as u64);
        t += 1;
    }
    factors
}

/// Abelian group Z^cols / row span.
pub fn cokernel(rows: usize, cols: usize, entries: &[i128]) -> AbelianGroupPresentation {
    let factors = invariant_factors(rows, cols, entries);
    AbelianGroupPresentation {
        rank: cols - factors.len(),
        torsion_divisors: factors.into_iter().filter(|&d| d >= 2).collect(),
    }
}
