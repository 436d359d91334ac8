//! Dense arbitrary-precision integer matrices and Smith normal form.

use num::bigint::BigInt;
use num::traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    out[i] += &self[(i, j)] * &v[j];
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row a += c * row b
    fn add_mul_row(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self[(b, j)] * c;
            self[(a, j)] += t;
        }
    }

    /// col a += c * col b
    fn add_mul_col(&mut self, a: usize, b: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = &self[(i, b)] * c;
            self[(i, a)] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let t = -self[(a, j)].clone();
            self[(a, j)] = t;
        }
    }

    fn negate_col(&mut self, a: usize) {
        for i in 0..self.rows {
            let t = -self[(i, a)].clone();
            self[(i, a)] = t;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl std::fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// U * A * V = D with U, V unimodular and D diagonal with d_i | d_{i+1}.
pub struct SmithNormalForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithNormalForm {
    /// Diagonal entries (length min(rows, cols)).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .collect()
    }
}

struct SnfWork {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfWork {
    // A' = E A, U' = E U, U_inv' = U_inv E^{-1}
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_mul_row(dst, src, c);
        self.u.add_mul_row(dst, src, c);
        let neg = -c.clone();
        self.u_inv.add_mul_col(src, dst, &neg);
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.a.add_mul_col(dst, src, c);
        self.v.add_mul_col(dst, src, c);
        let neg = -c.clone();
        self.v_inv.add_mul_row(src, dst, &neg);
    }

    fn row_swap(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.u.swap_rows(x, y);
        self.u_inv.swap_cols(x, y);
    }

    fn col_swap(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
        self.v_inv.swap_rows(x, y);
    }

    fn row_negate(&mut self, x: usize) {
        self.a.negate_row(x);
        self.u.negate_row(x);
        self.u_inv.negate_col(x);
    }
}

/// Smith normal form with full unimodular transforms.
///
/// The returned decomposition satisfies `u * a * v = d` exactly, with the
/// diagonal non-negative and forming a divisibility chain; this is asserted
/// in debug builds on every call.
pub fn smith_normal_form(a: &IntMatrix) -> SmithNormalForm {
    let mut w = SnfWork {
        a: a.clone(),
        u: IntMatrix::identity(a.rows),
        u_inv: IntMatrix::identity(a.rows),
        v: IntMatrix::identity(a.cols),
        v_inv: IntMatrix::identity(a.cols),
    };
    let n = a.rows.min(a.cols);

    for t in 0..n {
        loop {
            // pivot selection: minimal nonzero |entry| in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..w.a.rows {
                for j in t..w.a.cols {
                    if w.a[(i, j)].is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if w.a[(i, j)].abs() < w.a[(bi, bj)].abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let (pi, pj) = match best {
                None => break,
                Some(p) => p,
            };
            w.row_swap(t, pi);
            w.col_swap(t, pj);

            // clear column t and row t by nearest-integer division
            let mut dirty = false;
            for i in (t + 1)..w.a.rows {
                if !w.a[(i, t)].is_zero() {
                    let q = div_round(&w.a[(i, t)], &w.a[(t, t)]);
                    let neg = -q;
                    w.row_add(i, t, &neg);
                    if !w.a[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in (t + 1)..w.a.cols {
                if !w.a[(t, j)].is_zero() {
                    let q = div_round(&w.a[(t, j)], &w.a[(t, t)]);
                    let neg = -q;
                    w.col_add(j, t, &neg);
                    if !w.a[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue; // leftover remainders become the new (smaller) pivot
            }
            // pivot must divide every entry of the trailing block
            let mut bad: Option<usize> = None;
            'scan: for i in (t + 1)..w.a.rows {
                for j in (t + 1)..w.a.cols {
                    if !(&w.a[(i, j)] % &w.a[(t, t)]).is_zero() {
                        bad = Some(i);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    w.row_add(t, i, &one);
                }
                None => break,
            }
        }
        if w.a[(t, t)].is_negative() {
            w.row_negate(t);
        }
    }

    debug_assert!(verify_snf(a, &w));
    SmithNormalForm {
        d: w.a,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
    }
}

fn verify_snf(a: &IntMatrix, w: &SnfWork) -> bool {
    let uav = w.u.mul(a).mul(&w.v);
    if uav != w.a {
        return false;
    }
    let n = a.rows.min(a.cols);
    for i in 0..w.a.rows {
        for j in 0..w.a.cols {
            if i != j && !w.a[(i, j)].is_zero() {
                return false;
            }
        }
    }
    for i in 1..n {
        let prev = &w.a[(i - 1, i - 1)];
        let cur = &w.a[(i, i)];
        if prev.is_zero() {
            if !cur.is_zero() {
                return false;
            }
        } else if !(cur % prev).is_zero() {
            return false;
        }
    }
    w.u.mul(&w.u_inv) == IntMatrix::identity(a.rows)
        && w.v.mul(&w.v_inv) == IntMatrix::identity(a.cols)
}

/// Nearest-integer quotient; remainder magnitude is at most |b|/2.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num::Integer::div_mod_floor(a, b);
    if &(&r * &two).abs() > &b.abs() {
        q + BigInt::one()
    } else {
        q
    }
}

/// One solution of `A x = b (mod m)` plus a spanning set of the homogeneous
/// solutions, or `None` when no solution exists.
pub struct ModSolution {
    pub x: Vec<BigInt>,
    pub kernel: Vec<Vec<BigInt>>,
}

pub fn solve_linear_mod(a: &IntMatrix, b: &[BigInt], m: &BigInt) -> Result<Option<ModSolution>> {
    if m < &BigInt::from(2) {
        return Err(Error::Linalg(format!("modulus must be >= 2, got {m}")));
    }
    if b.len() != a.rows {
        return Err(Error::Linalg("rhs length mismatch".into()));
    }
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let n = a.rows.min(a.cols);
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        let d = if i < n { snf.d[(i, i)].clone() } else { BigInt::zero() };
        let rhs = ub[i].mod_floor_big(m);
        if d.is_zero() {
            if !rhs.is_zero() {
                return Ok(None);
            }
            continue;
        }
        let g = num::Integer::gcd(&d, m);
        if !(&rhs % &g).is_zero() {
            return Ok(None);
        }
        // (d/g) y = rhs/g (mod m/g), with d/g invertible mod m/g
        let mg = m / &g;
        let dg = (&d / &g).mod_floor_big(&mg);
        let inv = mod_inverse_big(&dg, &mg)
            .ok_or_else(|| Error::Linalg("internal: d/g not invertible mod m/g".into()))?;
        y[i] = ((&rhs / &g) * inv).mod_floor_big(&mg);
    }
    let x: Vec<BigInt> = snf.v.mul_vec(&y).iter().map(|t| t.mod_floor_big(m)).collect();
    // kernel spanning set: (m / gcd(d_i, m)) * v_i
    let mut kernel = Vec::new();
    for i in 0..a.cols {
        let d = if i < n { snf.d[(i, i)].clone() } else { BigInt::zero() };
        let g = if d.is_zero() { m.clone() } else { num::Integer::gcd(&d, m) };
        let w = m / &g;
        if &w == m {
            continue; // generator is 0 mod m
        }
        let gen: Vec<BigInt> = (0..a.cols)
            .map(|r| (&snf.v[(r, i)] * &w).mod_floor_big(m))
            .collect();
        if gen.iter().any(|t| !t.is_zero()) {
            kernel.push(gen);
        }
    }
    Ok(Some(ModSolution { x, kernel }))
}

fn mod_inverse_big(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = num::Integer::extended_gcd(a, m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor_big(m))
}

trait ModFloorExt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloorExt for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        num::Integer::mod_floor(self, m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn diag_of(snf: &SmithNormalForm) -> Vec<i64> {
        snf.diagonal()
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn snf_zero_matrix() {
        let a = IntMatrix::zero(3, 2);
        let s = smith_normal_form(&a);
        assert_eq!(diag_of(&s), vec![0, 0]);
    }

    #[test]
    fn snf_identity() {
        let a = IntMatrix::identity(3);
        let s = smith_normal_form(&a);
        assert_eq!(diag_of(&s), vec![1, 1, 1]);
    }

    #[test]
    fn snf_2_3_diag() {
        // hand elimination: diag(2,3) ~ diag(1,6)
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let s = smith_normal_form(&a);
        assert_eq!(diag_of(&s), vec![1, 6]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn solve_mod_no_solution_parity() {
        let a = IntMatrix::from_i64(&[&[2]]);
        let m = BigInt::from(4);
        let sol = solve_linear_mod(&a, &[BigInt::from(1)], &m).unwrap();
        assert!(sol.is_none());
    }

    #[test]
    fn solve_mod_2x_eq_2_mod_4() {
        let a = IntMatrix::from_i64(&[&[2]]);
        let m = BigInt::from(4);
        let sol = solve_linear_mod(&a, &[BigInt::from(2)], &m).unwrap().unwrap();
        let x = i64::try_from(&sol.x[0]).unwrap();
        assert_eq!((2 * x) % 4, 2);
        // homogeneous solutions are exactly {0, 2}
        let mut elems = std::collections::BTreeSet::new();
        elems.insert(0i64);
        for g in &sol.kernel {
            let v = i64::try_from(&g[0]).unwrap();
            for k in 0..4 {
                elems.insert((v * k) % 4);
            }
        }
        assert_eq!(elems.into_iter().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn solve_mod_zero_system() {
        let a = IntMatrix::zero(1, 1);
        let m = BigInt::from(5);
        let sol = solve_linear_mod(&a, &[BigInt::zero()], &m).unwrap().unwrap();
        assert!(sol.x[0].is_zero());
        assert_eq!(sol.kernel.len(), 1); // full space
    }

    /// Exhaustive oracle: all solutions of Ax = b mod m by enumeration.
    fn enumerate_solutions(a: &IntMatrix, b: &[i64], m: i64) -> Vec<Vec<i64>> {
        let n = a.cols;
        let total = (m as u64).pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut x = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                x.push((c % m as u64) as i64);
                c /= m as u64;
            }
            let ok = (0..a.rows).all(|i| {
                let mut s = 0i64;
                for j in 0..n {
                    s += i64::try_from(&a[(i, j)]).unwrap() * x[j];
                }
                (s - b[i]).rem_euclid(m) == 0
            });
            if ok {
                out.push(x);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn snf_postconditions_random(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i64 % 10) - 5
            };
            let a = IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(next()));
            let s = smith_normal_form(&a);
            prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
            prop_assert_eq!(s.u.mul(&s.u_inv), IntMatrix::identity(rows));
            prop_assert_eq!(s.v.mul(&s.v_inv), IntMatrix::identity(cols));
            let diag = s.diagonal();
            for i in 1..diag.len() {
                if !diag[i - 1].is_zero() {
                    prop_assert!((&diag[i] % &diag[i - 1]).is_zero());
                }
            }
        }

        #[test]
        fn solve_mod_matches_enumeration(rows in 1usize..3, cols in 1usize..3,
                                         m in 2i64..5, seed in any::<u64>()) {
            // n*log2(M) <= 20 bits comfortably
            let mut state = seed;
            let mut next = || {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as i64 % 7) - 3
            };
            let a = IntMatrix::from_fn(rows, cols, |_, _| BigInt::from(next()));
            let b: Vec<i64> = (0..rows).map(|_| next().rem_euclid(m)).collect();
            let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            let all = enumerate_solutions(&a, &b, m);
            let sol = solve_linear_mod(&a, &bb, &BigInt::from(m)).unwrap();
            match sol {
                None => prop_assert!(all.is_empty()),
                Some(s) => {
                    let x: Vec<i64> = s.x.iter().map(|t| i64::try_from(t).unwrap()).collect();
                    prop_assert!(all.contains(&x));
                    // kernel spans all homogeneous solutions
                    let hom = enumerate_solutions(&a, &vec![0; rows], m);
                    let mut span = std::collections::BTreeSet::new();
                    span.insert(vec![0i64; cols]);
                    loop {
                        let cur: Vec<Vec<i64>> = span.iter().cloned().collect();
                        let mut grew = false;
                        for v in &cur {
                            for g in &s.kernel {
                                let w: Vec<i64> = (0..cols)
                                    .map(|j| (v[j] + i64::try_from(&g[j]).unwrap()).rem_euclid(m))
                                    .collect();
                                if span.insert(w) { grew = true; }
                            }
                        }
                        if !grew { break; }
                    }
                    prop_assert_eq!(span.len(), hom.len());
                }
            }
        }
    }
}
