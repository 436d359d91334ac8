//! Structure of a subquotient Z/B of (Z/M)^n given by generating sets.
//!
//! Z is presented as the image of Z^k -> (Z/M)^n on the generator columns.
//! The relation lattice { y : Zmat y in B (mod M) } is computed from the
//! mod-M kernel of [Zmat | Bmat] (projected to the y block, plus M Z^k), and
//! its integer Smith normal form yields the invariant factors together with
//! a canonical coordinate map.

use num::bigint::BigInt;
use num::traits::Zero;

use super::modelim::ModElim;
use super::snf::{smith_normal_form, IntMatrix};
use crate::error::{Error, Result};

pub struct AbelianGroupStructure {
    pub modulus: i64,
    pub ambient_dim: usize,
    /// invariant factors d_1 | d_2 | ..., all > 1
    pub invariant_factors: Vec<i64>,
    num_gens: usize,
    z_elim: Option<ModElim>,
    zgens: Vec<Vec<i64>>,
    /// rows of the relation-SNF row transform giving nontrivial coordinates
    kept: Vec<(usize, i64)>,
    u: IntMatrix,
    u_inv: IntMatrix,
}

impl AbelianGroupStructure {
    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().map(|&d| d as u64).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    /// Canonical coset coordinates of a member vector, or None if the vector
    /// does not lie in Z.  Two vectors get equal coordinates iff they differ
    /// by an element of B.
    pub fn class_of(&self, v: &[i64]) -> Option<Vec<i64>> {
        assert_eq!(v.len(), self.ambient_dim);
        let y = match &self.z_elim {
            None => {
                // Z is trivial: only the zero vector belongs
                if v.iter().all(|&x| x.rem_euclid(self.modulus) == 0) {
                    return Some(Vec::new());
                }
                return None;
            }
            Some(e) => e.solve(v)?,
        };
        Some(self.coords_of_gen_combination(&y))
    }

    /// Coordinates of the class of `sum_i y_i * zgen_i`.
    pub fn coords_of_gen_combination(&self, y: &[i64]) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.kept.len());
        for &(row, d) in &self.kept {
            let mut acc = BigInt::zero();
            for j in 0..self.num_gens {
                if y[j] != 0 {
                    acc += &self.u[(row, j)] * BigInt::from(y[j]);
                }
            }
            let c = num::Integer::mod_floor(&acc, &BigInt::from(d));
            out.push(i64::try_from(&c).unwrap());
        }
        out
    }

    /// A member vector with the given canonical coordinates.
    pub fn representative(&self, coords: &[i64]) -> Vec<i64> {
        assert_eq!(coords.len(), self.kept.len());
        let mut target = vec![BigInt::zero(); self.num_gens];
        for (idx, &(row, _)) in self.kept.iter().enumerate() {
            target[row] = BigInt::from(coords[idx]);
        }
        let y = self.u_inv.mul_vec(&target);
        let m = self.modulus;
        let mut v = vec![0i64; self.ambient_dim];
        for (j, gen) in self.zgens.iter().enumerate() {
            let yj = num::Integer::mod_floor(&y[j], &BigInt::from(m));
            let yj = i64::try_from(&yj).unwrap();
            if yj == 0 {
                continue;
            }
            for (r, &g) in gen.iter().enumerate() {
                v[r] = (v[r] + (yj as i128 * g as i128).rem_euclid(m as i128) as i64)
                    .rem_euclid(m);
            }
        }
        v
    }

    /// All canonical coordinate tuples in lexicographic order.
    pub fn enumerate(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for &d in &self.invariant_factors {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for prefix in &out {
                for c in 0..d {
                    let mut t = prefix.clone();
                    t.push(c);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }
}

/// Structure of Z/B for Z, B subgroups of (Z/M)^n given by generators.
/// Errors if B is not contained in Z.
pub fn subquotient_invariants(
    m: i64,
    n: usize,
    zgens: &[Vec<i64>],
    bgens: &[Vec<i64>],
) -> Result<AbelianGroupStructure> {
    assert!(m >= 2);
    for g in zgens.iter().chain(bgens) {
        assert_eq!(g.len(), n);
    }
    let k = zgens.len();
    let l = bgens.len();

    if k == 0 {
        for b in bgens {
            if b.iter().any(|&x| x.rem_euclid(m) != 0) {
                return Err(Error::Linalg("B is not contained in Z".into()));
            }
        }
        return Ok(AbelianGroupStructure {
            modulus: m,
            ambient_dim: n,
            invariant_factors: Vec::new(),
            num_gens: 0,
            z_elim: None,
            zgens: Vec::new(),
            kept: Vec::new(),
            u: IntMatrix::identity(0),
            u_inv: IntMatrix::identity(0),
        });
    }

    // Zmat: n x k, columns are the generators
    let mut zmat = vec![0i64; n * k];
    for (j, g) in zgens.iter().enumerate() {
        for (i, &x) in g.iter().enumerate() {
            zmat[i * k + j] = x;
        }
    }
    let z_elim = ModElim::new(n, k, &zmat, m);

    // membership of B in Z
    for b in bgens {
        if z_elim.solve(b).is_none() {
            return Err(Error::Linalg("B is not contained in Z".into()));
        }
    }

    // relation lattice via kernel of [Zmat | Bmat]
    let kl = k + l;
    let mut zb = vec![0i64; n * kl];
    for i in 0..n {
        for j in 0..k {
            zb[i * kl + j] = zmat[i * k + j];
        }
        for (j, b) in bgens.iter().enumerate() {
            zb[i * kl + k + j] = b[i];
        }
    }
    let zb_elim = ModElim::new(n, kl, &zb, m);
    let kernel = zb_elim.kernel();

    // relation matrix: projections of kernel generators plus M e_i
    let num_rel = kernel.len() + k;
    let rel = IntMatrix::from_fn(k, num_rel, |i, j| {
        if j < kernel.len() {
            BigInt::from(kernel[j][i])
        } else if j - kernel.len() == i {
            BigInt::from(m)
        } else {
            BigInt::zero()
        }
    });
    let snf = smith_normal_form(&rel);
    let mut kept = Vec::new();
    let mut invariant_factors = Vec::new();
    for i in 0..k {
        let d = if i < snf.d.cols {
            i64::try_from(&snf.d[(i, i)]).map_err(|_| Error::Linalg("factor overflow".into()))?
        } else {
            0
        };
        if d == 0 {
            return Err(Error::Linalg("internal: quotient not finite".into()));
        }
        if d > 1 {
            kept.push((i, d));
            invariant_factors.push(d);
        }
    }

    Ok(AbelianGroupStructure {
        modulus: m,
        ambient_dim: n,
        invariant_factors,
        num_gens: k,
        z_elim: Some(z_elim),
        zgens: zgens.to_vec(),
        kept,
        u: snf.u,
        u_inv: snf.u_inv,
    })
}
