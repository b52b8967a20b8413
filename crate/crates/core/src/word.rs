//! Exponent-vector words and the term order used throughout the crate.
//!
//! Elements of a finitely presented commutative monoid are words, i.e.
//! exponent vectors over the generator list. The term order is graded
//! (total degree first); ties are broken by reading the word as a sorted
//! string of generator names and comparing those strings lexicographically.
//! Concretely, at the first generator (in name order) where two words of
//! equal degree differ, the word with the *larger* exponent is the smaller
//! word. Under this order `2u1 < 2u2` when `u1 < u2` by name, so the normal
//! form of the class `{2u1, 2u2}` is `2u1`.

use std::cmp::Ordering;

/// Exponent vector over the generators of some presentation.
pub type Word = Vec<u32>;

/// Total degree of a word.
pub fn degree(w: &[u32]) -> u32 {
    w.iter().sum()
}

/// Componentwise sum.
pub fn add(a: &[u32], b: &[u32]) -> Word {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Componentwise difference; caller must ensure `b <= a`.
pub fn sub(a: &[u32], b: &[u32]) -> Word {
    debug_assert!(le(b, a));
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Componentwise order `a <= b`.
pub fn le(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Componentwise maximum (the overlap of two rewrite rule left-hand sides).
pub fn join(a: &[u32], b: &[u32]) -> Word {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

/// Scalar multiple `n * w`.
pub fn scale(w: &[u32], n: u32) -> Word {
    w.iter().map(|x| x * n).collect()
}

pub fn is_zero(w: &[u32]) -> bool {
    w.iter().all(|&x| x == 0)
}

pub fn support(w: &[u32]) -> Vec<usize> {
    w.iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(i, _)| i)
        .collect()
}

pub fn supports_disjoint(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x == 0 || y == 0)
}

/// Unit word `e_i` of length `n`.
pub fn unit(n: usize, i: usize) -> Word {
    let mut w = vec![0; n];
    w[i] = 1;
    w
}

/// Graded term order. `positions` lists generator indices sorted by name;
/// comparisons scan in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrder {
    positions: Vec<usize>,
}

impl TermOrder {
    /// Order induced by sorting the generator names lexicographically.
    pub fn from_names(names: &[String]) -> Self {
        let mut positions: Vec<usize> = (0..names.len()).collect();
        positions.sort_by(|&i, &j| names[i].cmp(&names[j]));
        TermOrder { positions }
    }

    /// Compares two words. Degree first; on ties the word with the larger
    /// exponent at the first differing generator (in name order) is smaller.
    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        match degree(a).cmp(&degree(b)) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for &i in &self.positions {
            match a[i].cmp(&b[i]) {
                Ordering::Equal => {}
                // more copies of an earlier generator = earlier string
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

/// All words of length `n` with total degree exactly `d`, in lexicographic
/// enumeration order.
pub fn words_of_degree(n: usize, d: u32) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = vec![0u32; n];
    fn rec(cur: &mut Word, idx: usize, rem: u32, out: &mut Vec<Word>) {
        if idx + 1 == cur.len() {
            cur[idx] = rem;
            out.push(cur.clone());
            cur[idx] = 0;
            return;
        }
        for v in 0..=rem {
            cur[idx] = v;
            rec(cur, idx + 1, rem - v, out);
        }
        cur[idx] = 0;
    }
    rec(&mut cur, 0, d, &mut out);
    out
}

/// All words of length `n` with total degree at most `d`.
pub fn words_up_to(n: usize, d: u32) -> Vec<Word> {
    (0..=d).flat_map(|k| words_of_degree(n, k)).collect()
}
