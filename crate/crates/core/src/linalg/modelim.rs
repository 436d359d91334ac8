//! Diagonalizing elimination over Z/M for large sparse-ish systems.
//!
//! Keeps every entry in the balanced residue system, logs row operations so
//! that fresh right-hand sides can be solved without storing the (possibly
//! huge) row transform, and tracks the column transform for kernel and
//! solution recovery.  Only diagonality is produced, not the divisibility
//! chain; kernels and solutions mod M need no more.

use crate::arith::{egcd, mod_inverse};

#[derive(Clone, Copy, Debug)]
enum RowOp {
    Swap(u32, u32),
    /// row a += c * row b
    AddMul(u32, u32, i64),
}

pub struct ModElim {
    pub m: i64,
    pub rows: usize,
    pub cols: usize,
    /// diagonal entries after elimination, length `cols` (0 where no pivot)
    diag: Vec<i64>,
    row_ops: Vec<RowOp>,
    /// column transform, cols x cols row-major
    v: Vec<i64>,
}

#[inline]
fn balance(x: i64, m: i64) -> i64 {
    let mut r = x.rem_euclid(m);
    if 2 * r > m {
        r -= m;
    }
    r
}

#[inline]
fn mul_mod(a: i64, b: i64, m: i64) -> i64 {
    balance(((a as i128 * b as i128).rem_euclid(m as i128)) as i64, m)
}

impl ModElim {
    /// `a` is rows x cols, row major; entries arbitrary i64 (reduced mod m).
    pub fn new(rows: usize, cols: usize, a: &[i64], m: i64) -> Self {
        assert!(m >= 2);
        assert_eq!(a.len(), rows * cols);
        let mut w: Vec<i64> = a.iter().map(|&x| balance(x, m)).collect();
        let mut v = vec![0i64; cols * cols];
        for i in 0..cols {
            v[i * cols + i] = 1;
        }
        let mut ops = Vec::new();
        let at = |w: &Vec<i64>, i: usize, j: usize| w[i * cols + j];

        let n = rows.min(cols);
        let mut diag = vec![0i64; cols];
        for t in 0..n {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..rows {
                    for j in t..cols {
                        let x = at(&w, i, j);
                        if x == 0 {
                            continue;
                        }
                        match best {
                            None => best = Some((i, j)),
                            Some((bi, bj)) => {
                                if x.abs() < at(&w, bi, bj).abs() {
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
                if pi != t {
                    for j in 0..cols {
                        w.swap(pi * cols + j, t * cols + j);
                    }
                    ops.push(RowOp::Swap(pi as u32, t as u32));
                }
                if pj != t {
                    for i in 0..rows {
                        w.swap(i * cols + pj, i * cols + t);
                    }
                    for i in 0..cols {
                        v.swap(i * cols + pj, i * cols + t);
                    }
                }

                let mut dirty = false;
                let p = at(&w, t, t);
                // clear column t
                for i in (t + 1)..rows {
                    let x = at(&w, i, t);
                    if x == 0 {
                        continue;
                    }
                    let q = div_round_i64(x, p);
                    if q != 0 {
                        for j in t..cols {
                            let delta = mul_mod(q, at(&w, t, j), m);
                            w[i * cols + j] = balance(at(&w, i, j) - delta, m);
                        }
                        ops.push(RowOp::AddMul(i as u32, t as u32, balance(-q, m)));
                    }
                    if at(&w, i, t) != 0 {
                        dirty = true;
                    }
                }
                // clear row t
                let p = at(&w, t, t);
                for j in (t + 1)..cols {
                    let x = at(&w, t, j);
                    if x == 0 {
                        continue;
                    }
                    let q = div_round_i64(x, p);
                    if q != 0 {
                        for i in 0..rows {
                            let delta = mul_mod(q, at(&w, i, t), m);
                            w[i * cols + j] = balance(at(&w, i, j) - delta, m);
                        }
                        for i in 0..cols {
                            let delta = mul_mod(q, v[i * cols + t], m);
                            v[i * cols + j] = balance(v[i * cols + j] - delta, m);
                        }
                    }
                    if at(&w, t, j) != 0 {
                        dirty = true;
                    }
                }
                if !dirty && at(&w, t, t) != 0 {
                    // column and row are clean
                    let col_clean = ((t + 1)..rows).all(|i| at(&w, i, t) == 0);
                    let row_clean = ((t + 1)..cols).all(|j| at(&w, t, j) == 0);
                    if col_clean && row_clean {
                        break;
                    }
                }
            }
            diag[t] = at(&w, t, t).rem_euclid(m);
        }

        ModElim {
            m,
            rows,
            cols,
            diag,
            row_ops: ops,
            v,
        }
    }

    fn apply_row_ops(&self, b: &mut [i64]) {
        let m = self.m;
        for op in &self.row_ops {
            match *op {
                RowOp::Swap(x, y) => b.swap(x as usize, y as usize),
                RowOp::AddMul(a, src, c) => {
                    let delta = mul_mod(c, b[src as usize], m);
                    b[a as usize] = balance(b[a as usize] + delta, m);
                }
            }
        }
    }

    /// One solution of `A x = b (mod m)`, or None.
    pub fn solve(&self, b: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(b.len(), self.rows);
        let m = self.m;
        let mut ub: Vec<i64> = b.iter().map(|&x| balance(x, m)).collect();
        self.apply_row_ops(&mut ub);
        let mut y = vec![0i64; self.cols];
        for t in 0..self.rows {
            let rhs = ub[t].rem_euclid(m);
            let d = if t < self.cols { self.diag[t] } else { 0 };
            if d == 0 {
                if rhs % m != 0 {
                    return None;
                }
                continue;
            }
            let g = num::integer::gcd(d, m);
            if rhs % g != 0 {
                return None;
            }
            let mg = m / g;
            if mg == 1 {
                y[t] = 0;
            } else {
                let inv = mod_inverse((d / g).rem_euclid(mg), mg)?;
                y[t] = ((rhs / g) as i128 * inv as i128).rem_euclid(mg as i128) as i64;
            }
        }
        // x = V y
        let mut x = vec![0i64; self.cols];
        for i in 0..self.cols {
            let mut acc: i128 = 0;
            for j in 0..self.cols {
                acc += self.v[i * self.cols + j] as i128 * y[j] as i128;
            }
            x[i] = acc.rem_euclid(self.m as i128) as i64;
        }
        Some(x)
    }

    /// Spanning set of `{x : A x = 0 (mod m)}` as vectors mod m.
    pub fn kernel(&self) -> Vec<Vec<i64>> {
        let m = self.m;
        let mut out = Vec::new();
        for t in 0..self.cols {
            let d = self.diag[t];
            let g = if d == 0 { m } else { num::integer::gcd(d, m) };
            let w = m / g;
            if w == m {
                continue;
            }
            let gen: Vec<i64> = (0..self.cols)
                .map(|i| mul_mod(self.v[i * self.cols + t], w, m).rem_euclid(m))
                .collect();
            if gen.iter().any(|&x| x != 0) {
                out.push(gen);
            }
        }
        out
    }
}

/// Nearest-integer quotient over i64 (b != 0).
fn div_round_i64(a: i64, b: i64) -> i64 {
    let q = a.div_euclid(b);
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + if (r < 0) == (b < 0) { 1 } else { -1 }
    } else {
        q
    }
}

#[allow(dead_code)]
fn sanity_egcd(a: i64, b: i64) -> i64 {
    egcd(a as i128, b as i128).0 as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_kernel_spans(rows: usize, cols: usize, a: &[i64], m: i64) {
        let elim = ModElim::new(rows, cols, a, m);
        let gens = elim.kernel();
        // closure of gens under addition
        let mut span = std::collections::BTreeSet::new();
        span.insert(vec![0i64; cols]);
        loop {
            let cur: Vec<Vec<i64>> = span.iter().cloned().collect();
            let mut grew = false;
            for v in &cur {
                for g in &gens {
                    let w: Vec<i64> = (0..cols).map(|j| (v[j] + g[j]).rem_euclid(m)).collect();
                    if span.insert(w) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        // exhaustive homogeneous solutions
        let total = (m as u64).pow(cols as u32);
        let mut count = 0u64;
        for code in 0..total {
            let mut x = Vec::with_capacity(cols);
            let mut c = code;
            for _ in 0..cols {
                x.push((c % m as u64) as i64);
                c /= m as u64;
            }
            let ok = (0..rows).all(|i| {
                let s: i64 = (0..cols).map(|j| a[i * cols + j] * x[j]).sum();
                s.rem_euclid(m) == 0
            });
            if ok {
                assert!(span.contains(&x), "kernel misses {:?}", x);
                count += 1;
            }
        }
        assert_eq!(span.len() as u64, count);
    }

    #[test]
    fn kernel_matches_enumeration() {
        check_kernel_spans(1, 1, &[2], 4);
        check_kernel_spans(2, 2, &[2, 0, 0, 3], 6);
        check_kernel_spans(2, 3, &[1, 2, 3, 2, 4, 6], 5);
        check_kernel_spans(3, 2, &[1, 1, 2, 2, 3, 3], 4);
        check_kernel_spans(1, 3, &[0, 0, 0], 3);
    }

    #[test]
    fn solve_agrees_with_snf_solver() {
        use super::super::snf::{solve_linear_mod, IntMatrix};
        use num::bigint::BigInt;
        let cases: Vec<(usize, usize, Vec<i64>, Vec<i64>, i64)> = vec![
            (2, 2, vec![2, 1, 0, 3], vec![1, 0], 4),
            (2, 2, vec![2, 0, 0, 2], vec![1, 1], 4),
            (3, 2, vec![1, 2, 3, 4, 5, 6], vec![1, 2, 3], 7),
            (1, 1, vec![2], vec![2], 4),
        ];
        for (r, c, a, b, m) in cases {
            let elim = ModElim::new(r, c, &a, m);
            let x = elim.solve(&b);
            let am = IntMatrix::from_fn(r, c, |i, j| BigInt::from(a[i * c + j]));
            let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            let x2 = solve_linear_mod(&am, &bb, &BigInt::from(m)).unwrap();
            assert_eq!(x.is_some(), x2.is_some(), "case {:?}", (r, c, &a, &b, m));
            if let Some(x) = x {
                for i in 0..r {
                    let s: i64 = (0..c).map(|j| a[i * c + j] * x[j]).sum();
                    assert_eq!((s - b[i]).rem_euclid(m), 0);
                }
            }
        }
    }

    #[test]
    fn div_round_small() {
        assert_eq!(div_round_i64(7, 2), 3); // ties round toward floor
        assert_eq!(div_round_i64(-7, 2), -4);
        assert_eq!(div_round_i64(6, 2), 3);
        assert_eq!(div_round_i64(5, -2), -2);
    }
}
