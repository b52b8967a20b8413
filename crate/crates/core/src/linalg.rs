//! Dense linear algebra over F_p, enough for truncated-module oracles:
//! row reduction, rank, row-space membership, kernels and subspace
//! intersection.

/// Row-major matrix over F_p with u8 entries.
#[derive(Debug, Clone)]
pub struct FpMat {
    pub p: u8,
    pub cols: usize,
    pub rows: Vec<Vec<u8>>,
}

fn inv_mod(a: u8, p: u8) -> u8 {
    (1..p)
        .find(|&x| (u16::from(a) * u16::from(x)) % u16::from(p) == 1)
        .expect("unit mod p")
}

impl FpMat {
    pub fn new(p: u8, cols: usize) -> Self {
        FpMat {
            p,
            cols,
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<u8>) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    fn row_sub_scaled(p: u8, target: &mut [u8], source: &[u8], factor: u8) {
        let p = u16::from(p);
        let f = u16::from(factor);
        for (t, &s) in target.iter_mut().zip(source) {
            let v = (u16::from(*t) + p * p - f * u16::from(s) % p) % p;
            *t = v as u8;
        }
    }

    /// Reduced row echelon form in place. Columns are processed in the given
    /// `column_order` (defaults to 0..cols). Returns the pivot columns.
    pub fn rref_ordered(&mut self, column_order: &[usize]) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for &c in column_order {
            if r == self.rows.len() {
                break;
            }
            let Some(pivot_row) = (r..self.rows.len()).find(|&i| self.rows[i][c] != 0) else {
                continue;
            };
            self.rows.swap(r, pivot_row);
            let inv = inv_mod(self.rows[r][c], p);
            for v in self.rows[r].iter_mut() {
                *v = ((u16::from(*v) * u16::from(inv)) % u16::from(p)) as u8;
            }
            let pivot = std::mem::take(&mut self.rows[r]);
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && !row.is_empty() && row[c] != 0 {
                    let f = row[c];
                    Self::row_sub_scaled(p, row, &pivot, f);
                }
            }
            self.rows[r] = pivot;
            pivots.push(c);
            r += 1;
        }
        self.rows.retain(|row| row.iter().any(|&v| v != 0));
        pivots
    }

    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.rref_ordered(&order)
    }

    pub fn rank(&mut self) -> usize {
        self.rref();
        self.rows.len()
    }

    /// Whether `v` lies in the row space. The matrix must already be in RREF
    /// with the returned pivot list.
    pub fn contains_reduced(&self, pivots: &[usize], v: &[u8]) -> bool {
        let mut v = v.to_vec();
        let p = self.p;
        for (row, &c) in self.rows.iter().zip(pivots) {
            if v[c] != 0 {
                let f = v[c];
                let pu = u16::from(p);
                for (t, &s) in v.iter_mut().zip(row) {
                    let val = (u16::from(*t) + pu * pu - u16::from(f) * u16::from(s) % pu) % pu;
                    *t = val as u8;
                }
            }
        }
        v.iter().all(|&x| x == 0)
    }

    /// Basis of the right kernel {x : rows . x = 0}.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let p = self.p;
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![0u8; self.cols];
            v[fc] = 1;
            for (row, &pc) in m.rows.iter().zip(&pivots) {
                // pivot coordinate = -row[fc]
                v[pc] = (p - row[fc] % p) % p;
            }
            basis.push(v);
        }
        basis
    }
}

/// Dimension of the intersection of two row spaces, via
/// dim U + dim W - dim(U + W).
pub fn intersection_dim(p: u8, cols: usize, u: &[Vec<u8>], w: &[Vec<u8>]) -> usize {
    let mut mu = FpMat::new(p, cols);
    for r in u {
        mu.push_row(r.clone());
    }
    let du = mu.rank();
    let mut mw = FpMat::new(p, cols);
    for r in w {
        mw.push_row(r.clone());
    }
    let dw = mw.rank();
    let mut both = FpMat::new(p, cols);
    for r in u.iter().chain(w) {
        both.push_row(r.clone());
    }
    let ds = both.rank();
    du + dw - ds
}
