//! Exact rank of matrices over Q(zeta_M) by fraction-free elimination.
//!
//! Bareiss one-step elimination: every division is by the previous pivot and
//! is exact, which keeps intermediate entries at minor size instead of
//! letting rational coefficients blow up.

use std::sync::Arc;

use super::cyclotomic::{Cyc, CycField};

#[derive(Clone)]
pub struct CycMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Cyc>,
}

impl CycMatrix {
    pub fn zero(field: &Arc<CycField>, rows: usize, cols: usize) -> Self {
        CycMatrix {
            rows,
            cols,
            data: vec![Cyc::zero(field); rows * cols],
        }
    }

    pub fn from_fn(
        field: &Arc<CycField>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Cyc,
    ) -> Self {
        let _ = field;
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CycMatrix { rows, cols, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &Cyc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cyc) {
        self.data[i * self.cols + j] = v;
    }

    /// Exact rank by Bareiss elimination with row swaps and column skips.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let field = self.data[0].field.clone();
        let mut a = self.data.clone();
        let cols = self.cols;
        let mut prev_inv = Cyc::one(&field);
        let mut rank = 0usize;
        let mut row = 0usize;
        for col in 0..cols {
            // find pivot in this column at or below `row`
            let mut piv = None;
            for i in row..self.rows {
                if !a[i * cols + col].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let piv = match piv {
                None => continue,
                Some(p) => p,
            };
            if piv != row {
                for j in 0..cols {
                    a.swap(piv * cols + j, row * cols + j);
                }
            }
            let pivot = a[row * cols + col].clone();
            for i in (row + 1)..self.rows {
                let head = a[i * cols + col].clone();
                for j in (col + 1)..cols {
                    let t = pivot
                        .mul(&a[i * cols + j])
                        .sub(&head.mul(&a[row * cols + j]));
                    a[i * cols + j] = t.mul(&prev_inv);
                }
                a[i * cols + col] = Cyc::zero(&field);
            }
            prev_inv = pivot.inverse().expect("pivot is nonzero");
            rank += 1;
            row += 1;
            if row == self.rows {
                break;
            }
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of the right kernel, by Gauss-Jordan elimination.
    pub fn kernel_basis(&self) -> Vec<Vec<Cyc>> {
        if self.rows == 0 || self.cols == 0 {
            return Vec::new();
        }
        let field = self.data[0].field.clone();
        let cols = self.cols;
        let mut a = self.data.clone();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
        let mut row = 0usize;
        for col in 0..cols {
            let mut piv = None;
            for i in row..self.rows {
                if !a[i * cols + col].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let piv = match piv {
                None => continue,
                Some(p) => p,
            };
            if piv != row {
                for j in 0..cols {
                    a.swap(piv * cols + j, row * cols + j);
                }
            }
            let inv = a[row * cols + col].inverse().unwrap();
            for j in col..cols {
                let t = a[row * cols + j].mul(&inv);
                a[row * cols + j] = t;
            }
            for i in 0..self.rows {
                if i == row || a[i * cols + col].is_zero() {
                    continue;
                }
                let factor = a[i * cols + col].clone();
                for j in col..cols {
                    let t = a[i * cols + j].sub(&factor.mul(&a[row * cols + j]));
                    a[i * cols + j] = t;
                }
            }
            pivot_of_col[col] = Some(row);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        let mut basis = Vec::new();
        for free in 0..cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![Cyc::zero(&field); cols];
            v[free] = Cyc::one(&field);
            for col in 0..cols {
                if let Some(r) = pivot_of_col[col] {
                    v[col] = a[r * cols + free].neg();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Row-reduced span of a set of vectors over Q(zeta), with membership tests
/// and coordinate extraction.
pub struct SpanChecker {
    field: Arc<CycField>,
    dim: usize,
    /// rows in echelon form with unit leading entries
    rows: Vec<Vec<Cyc>>,
    lead: Vec<usize>,
    /// coordinates of each echelon row in terms of the original generators
    coords: Vec<Vec<Cyc>>,
}

impl SpanChecker {
    pub fn new(field: &Arc<CycField>, dim: usize, vectors: &[Vec<Cyc>]) -> Self {
        let mut s = SpanChecker {
            field: field.clone(),
            dim,
            rows: Vec::new(),
            lead: Vec::new(),
            coords: Vec::new(),
        };
        for (i, v) in vectors.iter().enumerate() {
            let mut coord = vec![Cyc::zero(field); vectors.len()];
            coord[i] = Cyc::one(field);
            s.insert(v.clone(), coord);
        }
        s
    }

    fn insert(&mut self, mut v: Vec<Cyc>, mut coord: Vec<Cyc>) -> bool {
        for (k, row) in self.rows.iter().enumerate() {
            let l = self.lead[k];
            if !v[l].is_zero() {
                let f = v[l].clone();
                for j in 0..self.dim {
                    let t = v[j].sub(&f.mul(&row[j]));
                    v[j] = t;
                }
                for j in 0..coord.len().min(self.coords[k].len()) {
                    let t = coord[j].sub(&f.mul(&self.coords[k][j]));
                    coord[j] = t;
                }
            }
        }
        let lead = (0..self.dim).find(|&j| !v[j].is_zero());
        match lead {
            None => false,
            Some(l) => {
                let inv = v[l].inverse().unwrap();
                for j in 0..self.dim {
                    let t = v[j].mul(&inv);
                    v[j] = t;
                }
                for c in coord.iter_mut() {
                    let t = c.mul(&inv);
                    *c = t;
                }
                self.rows.push(v);
                self.lead.push(l);
                self.coords.push(coord);
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Coordinates of `v` in terms of the original generator list, or None
    /// when v is outside the span.
    pub fn coordinates(&self, v: &[Cyc]) -> Option<Vec<Cyc>> {
        let mut v = v.to_vec();
        let ngen = self.coords.first().map_or(0, |c| c.len());
        let mut coord = vec![Cyc::zero(&self.field); ngen];
        for (k, row) in self.rows.iter().enumerate() {
            let l = self.lead[k];
            if !v[l].is_zero() {
                let f = v[l].clone();
                for j in 0..self.dim {
                    let t = v[j].sub(&f.mul(&row[j]));
                    v[j] = t;
                }
                for j in 0..ngen {
                    let t = coord[j].add(&f.mul(&self.coords[k][j]));
                    coord[j] = t;
                }
            }
        }
        if v.iter().all(|c| c.is_zero()) {
            Some(coord)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[Cyc]) -> bool {
        self.coordinates(v).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::rational::BigRational;
    use num::BigInt;

    fn field() -> Arc<CycField> {
        CycField::get(4)
    }

    #[test]
    fn identity_is_invertible() {
        let f = field();
        let m = CycMatrix::from_fn(&f, 3, 3, |i, j| {
            if i == j {
                Cyc::one(&f)
            } else {
                Cyc::zero(&f)
            }
        });
        assert!(m.is_invertible());
    }

    #[test]
    fn zero_row_not_invertible() {
        let f = field();
        let m = CycMatrix::from_fn(&f, 2, 2, |i, _| {
            if i == 0 {
                Cyc::one(&f)
            } else {
                Cyc::zero(&f)
            }
        });
        assert!(!m.is_invertible());
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn diag_zeta_and_one_minus_zeta_invertible() {
        // diag(zeta_4, 1 - zeta_4): both entries nonzero in Q(i)
        let f = field();
        let z = Cyc::root_of_unity(&f, 1);
        let mut m = CycMatrix::zero(&f, 2, 2);
        m.set(0, 0, z.clone());
        m.set(1, 1, Cyc::one(&f).sub(&z));
        assert!(m.is_invertible());
    }

    /// Plain rational Gaussian elimination oracle for rank.
    fn gauss_rank(m: &CycMatrix) -> usize {
        let field = m.at(0, 0).field.clone();
        let mut a: Vec<Cyc> = (0..m.rows * m.cols)
            .map(|k| m.data[k].clone())
            .collect();
        let cols = m.cols;
        let mut rank = 0;
        let mut row = 0;
        for col in 0..cols {
            let mut piv = None;
            for i in row..m.rows {
                if !a[i * cols + col].is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let piv = match piv {
                None => continue,
                Some(p) => p,
            };
            for j in 0..cols {
                a.swap(piv * cols + j, row * cols + j);
            }
            let inv = a[row * cols + col].inverse().unwrap();
            for i in (row + 1)..m.rows {
                let factor = a[i * cols + col].mul(&inv);
                for j in col..cols {
                    let t = a[i * cols + j].sub(&factor.mul(&a[row * cols + j]));
                    a[i * cols + j] = t;
                }
            }
            let _ = &field;
            rank += 1;
            row += 1;
            if row == m.rows {
                break;
            }
        }
        rank
    }

    #[test]
    fn bareiss_matches_gauss_on_random() {
        let f = CycField::get(3);
        let mut state = 99u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 40) as i64 % 5) - 2
        };
        for _ in 0..30 {
            let rows = 1 + (next().unsigned_abs() as usize % 5);
            let cols = 1 + (next().unsigned_abs() as usize % 5);
            let m = CycMatrix::from_fn(&f, rows, cols, |_, _| {
                let mut c = Cyc::zero(&f);
                for k in 0..f.phi {
                    c.coeffs[k] = BigRational::from(BigInt::from(next()));
                }
                c
            });
            assert_eq!(m.rank(), gauss_rank(&m));
        }
    }
}
