//! Normalized 2-cocycles with values in mu_M (exponent tables over Z/M), the
//! modified second cohomology groups H^2_{g1,g2} = Z^2_{g1} / B^2_{g2}, the
//! epsilon invariant, the pairing B_sigma, and the direct-product
//! decomposition of the cohomology of a product group.
//!
//! Two engines compute H^2_{g1,g2}: a dense cochain engine (kernel of the
//! cocycle-law system over all normalized cochains, any group within caps)
//! and a structured engine for abelian groups (carry cocycles per cyclic
//! factor plus bicharacters, which together with coboundaries generate all
//! cocycles).  Both present the quotient through `subquotient_invariants`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupAutomorphism};
use crate::linalg::cyclotomic::{Cyc, CycField};
use crate::linalg::modelim::ModElim;
use crate::linalg::snf::{smith_normal_form, IntMatrix};
use crate::linalg::subquotient::{subquotient_invariants, AbelianGroupStructure};

pub const DENSE_ENGINE_CAP: usize = 16;

/// A normalized mu_M-valued 2-cocycle stored as an exponent table:
/// sigma(a,b) = zeta_M^{table[a*n+b]}.
#[derive(Clone)]
pub struct CocycleVector {
    pub group: Arc<FiniteGroup>,
    pub modulus: i64,
    table: Vec<i64>,
}

impl PartialEq for CocycleVector {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.table == other.table
    }
}
impl Eq for CocycleVector {}

impl CocycleVector {
    pub fn trivial(group: &Arc<FiniteGroup>, modulus: i64) -> Self {
        CocycleVector {
            group: group.clone(),
            modulus,
            table: vec![0; group.order * group.order],
        }
    }

    pub fn from_table(group: &Arc<FiniteGroup>, modulus: i64, table: Vec<i64>) -> Result<Self> {
        let c = CocycleVector {
            group: group.clone(),
            modulus,
            table: table.iter().map(|&x| x.rem_euclid(modulus)).collect(),
        };
        c.verify()?;
        Ok(c)
    }

    /// Additive exponent of sigma(a, b).
    pub fn value(&self, a: u32, b: u32) -> i64 {
        self.table[a as usize * self.group.order + b as usize]
    }

    fn set(&mut self, a: u32, b: u32, v: i64) {
        self.table[a as usize * self.group.order + b as usize] = v.rem_euclid(self.modulus);
    }

    /// Normalization and the cocycle law on all triples.
    pub fn verify(&self) -> Result<()> {
        let n = self.group.order as u32;
        let m = self.modulus;
        if self.table.len() != (n as usize) * (n as usize) {
            return Err(Error::InvalidCocycle("table size".into()));
        }
        let e = self.group.identity;
        for a in 0..n {
            if self.value(e, a) != 0 || self.value(a, e) != 0 {
                return Err(Error::InvalidCocycle("not normalized".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.group.mul(a, b);
                for x in 0..n {
                    let bx = self.group.mul(b, x);
                    let lhs = self.value(a, b) + self.value(ab, x);
                    let rhs = self.value(b, x) + self.value(a, bx);
                    if (lhs - rhs).rem_euclid(m) != 0 {
                        return Err(Error::InvalidCocycle(format!(
                            "cocycle law fails at ({a},{b},{x})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Coboundary of a normalized 1-cochain mu (exponents per element,
    /// mu(1) must be 0): (d mu)(a,b) = mu(a) + mu(b) - mu(ab).
    pub fn coboundary(group: &Arc<FiniteGroup>, modulus: i64, mu: &[i64]) -> Self {
        assert_eq!(mu.len(), group.order);
        assert_eq!(mu[group.identity as usize].rem_euclid(modulus), 0);
        let n = group.order as u32;
        let mut c = Self::trivial(group, modulus);
        for a in 0..n {
            for b in 0..n {
                let ab = group.mul(a, b);
                c.set(a, b, mu[a as usize] + mu[b as usize] - mu[ab as usize]);
            }
        }
        c
    }

    /// Pointwise product (sum of exponents).
    pub fn mul(&self, other: &CocycleVector) -> CocycleVector {
        assert_eq!(self.modulus, other.modulus);
        CocycleVector {
            group: self.group.clone(),
            modulus: self.modulus,
            table: self
                .table
                .iter()
                .zip(&other.table)
                .map(|(&a, &b)| (a + b).rem_euclid(self.modulus))
                .collect(),
        }
    }

    pub fn inv(&self) -> CocycleVector {
        CocycleVector {
            group: self.group.clone(),
            modulus: self.modulus,
            table: self
                .table
                .iter()
                .map(|&a| (-a).rem_euclid(self.modulus))
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> CocycleVector {
        CocycleVector {
            group: self.group.clone(),
            modulus: self.modulus,
            table: self
                .table
                .iter()
                .map(|&a| (a as i128 * k as i128).rem_euclid(self.modulus as i128) as i64)
                .collect(),
        }
    }

    /// sigma o (u x u)
    pub fn compose_aut(&self, u: &GroupAutomorphism) -> CocycleVector {
        let n = self.group.order as u32;
        let mut c = Self::trivial(&self.group, self.modulus);
        for a in 0..n {
            for b in 0..n {
                c.set(a, b, self.value(u.apply(a), u.apply(b)));
            }
        }
        c
    }

    /// Restriction to a subgroup given by its element list and its own
    /// group object (indices aligned with `elems`).
    pub fn restrict(&self, elems: &[u32], sub: &Arc<FiniteGroup>) -> CocycleVector {
        assert_eq!(elems.len(), sub.order);
        let mut c = Self::trivial(sub, self.modulus);
        for (i, &a) in elems.iter().enumerate() {
            for (j, &b) in elems.iter().enumerate() {
                c.set(i as u32, j as u32, self.value(a, b));
            }
        }
        c
    }

    /// Exponent of B_sigma(a, h) = sigma(a,h) sigma(h,a)^{-1}.
    pub fn b_value(&self, a: u32, h: u32) -> i64 {
        (self.value(a, h) - self.value(h, a)).rem_euclid(self.modulus)
    }

    /// sigma(g, h) = sigma(h, g) for all h.
    pub fn is_symmetric_at(&self, g: u32) -> bool {
        (0..self.group.order as u32).all(|h| self.b_value(g, h) == 0)
    }

    /// epsilon exponent: sum_{i=1}^{o(g)-1} c(g, g^i).
    pub fn epsilon_exponent(&self, g: u32) -> i64 {
        let n = self.group.element_order(g);
        let mut acc = 0i64;
        let mut p = g;
        for _ in 1..n {
            acc += self.value(g, p);
            p = self.group.mul(p, g);
        }
        acc.rem_euclid(self.modulus)
    }

    /// sigma(a, b) as an element of Q(zeta_F), F a multiple of the modulus.
    pub fn value_cyc(&self, field: &Arc<CycField>, a: u32, b: u32) -> Cyc {
        let scale = (field.modulus / self.modulus as u64) as i64;
        Cyc::root_of_unity(field, self.value(a, b) * scale)
    }

    /// Coordinates with the identity row and column dropped.
    pub fn reduced_coords(&self) -> Vec<i64> {
        let n = self.group.order;
        let id = self.group.identity as usize;
        let mut out = Vec::with_capacity((n - 1) * (n - 1));
        for a in 0..n {
            if a == id {
                continue;
            }
            for b in 0..n {
                if b == id {
                    continue;
                }
                out.push(self.table[a * n + b]);
            }
        }
        out
    }

    pub fn from_reduced_coords(group: &Arc<FiniteGroup>, modulus: i64, coords: &[i64]) -> Self {
        let n = group.order;
        let id = group.identity as usize;
        assert_eq!(coords.len(), (n - 1) * (n - 1));
        let mut c = Self::trivial(group, modulus);
        let mut it = coords.iter();
        for a in 0..n {
            if a == id {
                continue;
            }
            for b in 0..n {
                if b == id {
                    continue;
                }
                c.table[a * n + b] = it.next().unwrap().rem_euclid(modulus);
            }
        }
        c
    }
}

impl std::fmt::Debug for CocycleVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CocycleVector(mod {}, {:?})", self.modulus, &self.table)
    }
}

/// The standard cyclic cocycle f_a on a cyclic group with chosen generator:
/// f_a(y^i, y^j) = a when i + j >= N and 0 otherwise.
pub fn cyclic_standard_cocycle(
    group: &Arc<FiniteGroup>,
    generator: u32,
    a: i64,
    modulus: i64,
) -> Result<CocycleVector> {
    let n = group.order;
    if group.element_order(generator) != n as u64 {
        return Err(Error::InvalidCocycle("element does not generate".into()));
    }
    let mut log = vec![usize::MAX; n];
    let mut cur = group.identity;
    for i in 0..n {
        log[cur as usize] = i;
        cur = group.mul(cur, generator);
    }
    let mut c = CocycleVector::trivial(group, modulus);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            if log[x as usize] + log[y as usize] >= n {
                c.set(x, y, a);
            }
        }
    }
    c.verify()?;
    Ok(c)
}

/// Cocycle on an abelian group assembled from per-factor carry exponents and
/// a bicharacter matrix: sigma(x, y) = prod_i f_{a_i}(x_i, y_i) *
/// prod_{(i,j)} zeta^{b_ij x_i y_j}.  Off-diagonal entries are allowed on
/// both sides of the diagonal; each b_ij must kill both factor orders mod M.
pub fn abelian_cocycle_assemble(
    group: &Arc<FiniteGroup>,
    modulus: i64,
    carries: &[i64],
    bichar: &[(usize, usize, i64)],
) -> Result<CocycleVector> {
    let ab = group
        .abelian
        .as_ref()
        .ok_or_else(|| Error::InvalidCocycle("group is not abelian".into()))?;
    let r = ab.factors.len();
    if carries.len() != r {
        return Err(Error::InvalidCocycle("carry count != factor count".into()));
    }
    for &(i, j, v) in bichar {
        if i >= r || j >= r || i == j {
            return Err(Error::InvalidCocycle(format!(
                "bad bicharacter index ({i},{j})"
            )));
        }
        let ni = ab.factors[i] as i128;
        let nj = ab.factors[j] as i128;
        if (v as i128 * ni) % modulus as i128 != 0 || (v as i128 * nj) % modulus as i128 != 0 {
            return Err(Error::InvalidCocycle(format!(
                "bicharacter entry {v} at ({i},{j}) does not kill the factor orders mod {modulus}"
            )));
        }
    }
    let n = group.order;
    let mut c = CocycleVector::trivial(group, modulus);
    for x in 0..n as u32 {
        for y in 0..n as u32 {
            let ex = &ab.exponents[x as usize];
            let ey = &ab.exponents[y as usize];
            let mut acc: i128 = 0;
            for i in 0..r {
                if ex[i] + ey[i] >= ab.factors[i] {
                    acc += carries[i] as i128;
                }
            }
            for &(i, j, v) in bichar {
                acc += v as i128 * ex[i] as i128 * ey[j] as i128;
            }
            c.set(x, y, acc.rem_euclid(modulus as i128) as i64);
        }
    }
    c.verify()?;
    Ok(c)
}

/// Pairing table of B_sigma against a central subgroup H: entry (a, k) is
/// the exponent of B_sigma(a, h_k).
pub fn pairing_of_class(sigma: &CocycleVector, h_elems: &[u32]) -> Result<Vec<Vec<i64>>> {
    for &h in h_elems {
        if !sigma.group.is_central(h) {
            return Err(Error::InvalidCocycle(format!("element {h} is not central")));
        }
    }
    let n = sigma.group.order as u32;
    Ok((0..n)
        .map(|a| h_elems.iter().map(|&h| sigma.b_value(a, h)).collect())
        .collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Engine {
    Auto,
    Dense,
    Structured,
}

/// The modified cohomology group H^2_{g1,g2}(G, mu_M) with class
/// canonicalization and representative lifts.
pub struct CohomologyGroup {
    pub group: Arc<FiniteGroup>,
    pub modulus: i64,
    pub g1: u32,
    pub g2: u32,
    structure: AbelianGroupStructure,
}

impl CohomologyGroup {
    pub fn invariant_factors(&self) -> Vec<u64> {
        self.structure
            .invariant_factors
            .iter()
            .map(|&d| d as u64)
            .collect()
    }

    pub fn order(&self) -> u64 {
        self.structure.order()
    }

    /// Canonical coordinates of the class of sigma; None when sigma is not a
    /// cocycle in Z^2_{g1}.
    pub fn class_of(&self, sigma: &CocycleVector) -> Option<Vec<i64>> {
        if sigma.modulus != self.modulus {
            return None;
        }
        self.structure.class_of(&sigma.reduced_coords())
    }

    pub fn representative(&self, coords: &[i64]) -> CocycleVector {
        let v = self.structure.representative(coords);
        CocycleVector::from_reduced_coords(&self.group, self.modulus, &v)
    }

    pub fn enumerate_classes(&self) -> Vec<Vec<i64>> {
        self.structure.enumerate()
    }

    pub fn zero_class(&self) -> Vec<i64> {
        vec![0; self.structure.invariant_factors.len()]
    }

    /// Coordinate sum (the group law in canonical coordinates).
    pub fn add_classes(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter()
            .zip(b)
            .zip(&self.structure.invariant_factors)
            .map(|((&x, &y), &d)| (x + y).rem_euclid(d))
            .collect()
    }

    pub fn neg_class(&self, a: &[i64]) -> Vec<i64> {
        a.iter()
            .zip(&self.structure.invariant_factors)
            .map(|(&x, &d)| (-x).rem_euclid(d))
            .collect()
    }

    /// epsilon on H^2_{1,g}: class representative independence holds because
    /// coboundaries vanishing at g contribute o(g) * mu(g) = 0.
    pub fn epsilon(&self, coords: &[i64]) -> i64 {
        self.representative(coords).epsilon_exponent(self.g2)
    }
}

/// Compute H^2_{g1,g2}(G, mu_M).  `g1` is the symmetry constraint (identity
/// for none), `g2` the coboundary basepoint (identity for plain B^2).
pub fn modified_h2(
    group: &Arc<FiniteGroup>,
    g1: u32,
    g2: u32,
    modulus: i64,
    engine: Engine,
) -> Result<CohomologyGroup> {
    if modulus < 2 {
        return Err(Error::InvalidCocycle("modulus must be >= 2".into()));
    }
    if !group.is_central(g1) || !group.is_central(g2) {
        return Err(Error::InvalidCocycle(
            "constraint elements must be central".into(),
        ));
    }
    let use_dense = match engine {
        Engine::Dense => true,
        Engine::Structured => false,
        Engine::Auto => group.order <= DENSE_ENGINE_CAP || group.abelian.is_none(),
    };
    let zgens = if use_dense {
        if group.order > DENSE_ENGINE_CAP {
            return Err(Error::CapExceeded {
                what: "dense cochain engine",
                cap: DENSE_ENGINE_CAP,
                got: group.order,
            });
        }
        dense_generators(group, g1, modulus)?
    } else {
        structured_generators(group, g1, modulus)?
    };
    let n = group.order;
    let bgens_pointed: Vec<Vec<i64>> = (0..n as u32)
        .filter(|&h| h != group.identity && h != g2)
        .map(|h| coboundary_gen(group, modulus, h))
        .collect();
    let structure = subquotient_invariants(modulus, (n - 1) * (n - 1), &zgens, &bgens_pointed)?;
    Ok(CohomologyGroup {
        group: group.clone(),
        modulus,
        g1,
        g2,
        structure,
    })
}

fn coboundary_gen(group: &Arc<FiniteGroup>, modulus: i64, h: u32) -> Vec<i64> {
    let mut mu = vec![0i64; group.order];
    mu[h as usize] = 1;
    CocycleVector::coboundary(group, modulus, &mu).reduced_coords()
}

/// Z^2_{g1} generators from the kernel of the cocycle-law (+ symmetry)
/// system over normalized cochains.
fn dense_generators(group: &Arc<FiniteGroup>, g1: u32, modulus: i64) -> Result<Vec<Vec<i64>>> {
    let n = group.order;
    let id = group.identity;
    let nn = n - 1;
    let ncoords = nn * nn;
    let rid = |e: u32| -> usize {
        let e = e as usize;
        if e < id as usize {
            e
        } else {
            e - 1
        }
    };
    let coord = |a: u32, b: u32| -> Option<usize> {
        if a == id || b == id {
            None
        } else {
            Some(rid(a) * nn + rid(b))
        }
    };
    let push_term = |row: &mut Vec<i64>, a: u32, b: u32, c: i64| {
        if let Some(k) = coord(a, b) {
            row[k] += c;
        }
    };
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for a in 0..n as u32 {
        if a == id {
            continue;
        }
        for b in 0..n as u32 {
            if b == id {
                continue;
            }
            let ab = group.mul(a, b);
            for x in 0..n as u32 {
                if x == id {
                    continue;
                }
                let bx = group.mul(b, x);
                let mut row = vec![0i64; ncoords];
                push_term(&mut row, a, b, 1);
                push_term(&mut row, ab, x, 1);
                push_term(&mut row, b, x, -1);
                push_term(&mut row, a, bx, -1);
                if row.iter().any(|&c| c != 0) {
                    rows.push(row);
                }
            }
        }
    }
    if g1 != id {
        for h in 0..n as u32 {
            if h == id || h == g1 {
                continue;
            }
            let mut row = vec![0i64; ncoords];
            push_term(&mut row, g1, h, 1);
            push_term(&mut row, h, g1, -1);
            if row.iter().any(|&c| c != 0) {
                rows.push(row);
            }
        }
    }
    let flat: Vec<i64> = rows.iter().flatten().copied().collect();
    let elim = ModElim::new(rows.len(), ncoords, &flat, modulus);
    Ok(elim.kernel())
}

/// Structured abelian generators: carries and bicharacters restricted to the
/// g1-symmetric sublattice, together with all coboundaries.
fn structured_generators(
    group: &Arc<FiniteGroup>,
    g1: u32,
    modulus: i64,
) -> Result<Vec<Vec<i64>>> {
    let ab = group.abelian.as_ref().ok_or_else(|| Error::CapExceeded {
        what: "structured engine requires an abelian group",
        cap: DENSE_ENGINE_CAP,
        got: group.order,
    })?;
    let r = ab.factors.len();
    let mut fam: Vec<CocycleVector> = Vec::new();
    for i in 0..r {
        let mut carries = vec![0i64; r];
        carries[i] = 1;
        fam.push(abelian_cocycle_assemble(group, modulus, &carries, &[])?);
    }
    for i in 0..r {
        for j in 0..i {
            let g = crate::arith::gcd(
                modulus as u64,
                crate::arith::gcd(ab.factors[i], ab.factors[j]),
            );
            let unit = modulus / g as i64;
            fam.push(abelian_cocycle_assemble(
                group,
                modulus,
                &vec![0i64; r],
                &[(i, j, unit)],
            )?);
        }
    }
    let gens: Vec<CocycleVector> = if g1 == group.identity {
        fam
    } else {
        // kernel of y -> B_{fam(y)}(g1, e_j) over the generator constraints
        let k = fam.len();
        let mut rows = Vec::new();
        for &ej in &ab.generators {
            let mut row = Vec::with_capacity(k);
            for f in &fam {
                row.push(f.b_value(g1, ej));
            }
            rows.push(row);
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        let elim = ModElim::new(rows.len(), k, &flat, modulus);
        elim.kernel()
            .into_iter()
            .map(|y| {
                let mut acc = CocycleVector::trivial(group, modulus);
                for (f, &c) in fam.iter().zip(&y) {
                    acc = acc.mul(&f.pow(c));
                }
                acc
            })
            .collect()
    };
    let mut zgens: Vec<Vec<i64>> = gens.iter().map(|c| c.reduced_coords()).collect();
    for h in 0..group.order as u32 {
        if h != group.identity {
            zgens.push(coboundary_gen(group, modulus, h));
        }
    }
    Ok(zgens)
}

/// Generators of Z^2(G, mu_M) up to coboundary: the carry/bicharacter family
/// for abelian groups, the dense kernel otherwise.  Every cohomology class
/// contains a product of powers of these.
pub fn z2_class_generators(group: &Arc<FiniteGroup>, modulus: i64) -> Result<Vec<CocycleVector>> {
    if let Some(ab) = group.abelian.as_ref() {
        let r = ab.factors.len();
        let mut fam = Vec::new();
        for i in 0..r {
            let mut carries = vec![0i64; r];
            carries[i] = 1;
            fam.push(abelian_cocycle_assemble(group, modulus, &carries, &[])?);
        }
        for i in 0..r {
            for j in 0..i {
                let g = crate::arith::gcd(
                    modulus as u64,
                    crate::arith::gcd(ab.factors[i], ab.factors[j]),
                );
                let unit = modulus / g as i64;
                fam.push(abelian_cocycle_assemble(
                    group,
                    modulus,
                    &vec![0i64; r],
                    &[(i, j, unit)],
                )?);
            }
        }
        Ok(fam)
    } else {
        let gens = dense_generators(group, group.identity, modulus)?;
        Ok(gens
            .into_iter()
            .map(|v| CocycleVector::from_reduced_coords(group, modulus, &v))
            .collect())
    }
}

/// Invariant factors of the quotient of an abelian group by the cyclic
/// subgroup generated by `g`, plus exponent vectors of the images of the
/// group generators in the quotient basis.
pub fn abelian_quotient_by_cyclic(
    group: &Arc<FiniteGroup>,
    g: u32,
) -> Result<(Vec<u64>, Vec<Vec<u64>>)> {
    let ab = group
        .abelian
        .as_ref()
        .ok_or_else(|| Error::InvalidGroup("quotient needs an abelian group".into()))?;
    let r = ab.factors.len();
    let gv = &ab.exponents[g as usize];
    // relation lattice: diag(N_i) and the vector of g
    let rel = IntMatrix::from_fn(r, r + 1, |i, j| {
        if j < r {
            if i == j {
                num::BigInt::from(ab.factors[i])
            } else {
                num::BigInt::from(0)
            }
        } else {
            num::BigInt::from(gv[i])
        }
    });
    let snf = smith_normal_form(&rel);
    let mut rows = Vec::new();
    let mut factors = Vec::new();
    for i in 0..r {
        let d =
            u64::try_from(&snf.d[(i, i)]).map_err(|_| Error::InvalidGroup("overflow".into()))?;
        if d > 1 {
            rows.push(i);
            factors.push(d);
        }
    }
    let gen_images: Vec<Vec<u64>> = (0..r)
        .map(|j| {
            rows.iter()
                .zip(&factors)
                .map(|(&row, &d)| {
                    let c = num::Integer::mod_floor(&snf.u[(row, j)], &num::BigInt::from(d));
                    u64::try_from(&c).unwrap()
                })
                .collect()
        })
        .collect();
    Ok((factors, gen_images))
}

/// The decomposition H^2_{g,h}(G1 x G2) = H^2_{g,h}(G1) x H^2(G2) x
/// P(G1/<g> x G2) with explicit mutually inverse maps at the class level.
pub struct YamazakiDecomposition {
    pub product_group: Arc<FiniteGroup>,
    /// product element -> [G1 part, G2 part]
    pub coords: Vec<Vec<u32>>,
    pub embed1: Vec<u32>,
    pub embed2: Vec<u32>,
    pub h2_product: CohomologyGroup,
    pub h2_factor1: CohomologyGroup,
    pub h2_factor2: CohomologyGroup,
    /// orders of the pairing coordinates, indexed by (G1 quotient gen, G2 gen)
    pub pairing_orders: Vec<Vec<u64>>,
    g1_group: Arc<FiniteGroup>,
    g2_group: Arc<FiniteGroup>,
    modulus: i64,
}

pub fn yamazaki_decompose(
    group1: &Arc<FiniteGroup>,
    group2: &Arc<FiniteGroup>,
    g: u32,
    h: u32,
    modulus: i64,
) -> Result<YamazakiDecomposition> {
    if group1.abelian.is_none() || group2.abelian.is_none() {
        return Err(Error::InvalidGroup(
            "decomposition expects abelian factors".into(),
        ));
    }
    let (product_group, coords) = crate::groups::direct_product(group1, group2)?;
    let n2 = group2.order as u32;
    let embed1: Vec<u32> = (0..group1.order as u32).map(|a| a * n2).collect();
    let embed2: Vec<u32> = (0..group2.order as u32).collect();
    let pg = embed1[g as usize];
    let ph = embed1[h as usize];
    let h2_product = modified_h2(&product_group, pg, ph, modulus, Engine::Auto)?;
    let h2_factor1 = modified_h2(group1, g, h, modulus, Engine::Auto)?;
    let h2_factor2 = modified_h2(
        group2,
        group2.identity,
        group2.identity,
        modulus,
        Engine::Auto,
    )?;
    let (qfactors, _) = abelian_quotient_by_cyclic(group1, g)?;
    let ab2 = group2.abelian.as_ref().unwrap();
    let mut pairing_orders = Vec::new();
    for &qi in &qfactors {
        let row: Vec<u64> = ab2
            .factors
            .iter()
            .map(|&nj| crate::arith::gcd(modulus as u64, crate::arith::gcd(qi, nj)))
            .collect();
        pairing_orders.push(row);
    }
    Ok(YamazakiDecomposition {
        product_group,
        coords,
        embed1,
        embed2,
        h2_product,
        h2_factor1,
        h2_factor2,
        pairing_orders,
        g1_group: group1.clone(),
        g2_group: group2.clone(),
        modulus,
    })
}

impl YamazakiDecomposition {
    /// Forward map: restrictions plus the pairing values on generator pairs
    /// (values of B_sigma(gen1_i, gen2_j)).
    pub fn forward(&self, sigma: &CocycleVector) -> (Vec<i64>, Vec<i64>, Vec<Vec<i64>>) {
        let s1 = sigma.restrict(&self.embed1, &self.g1_group);
        let s2 = sigma.restrict(&self.embed2, &self.g2_group);
        let c1 = self
            .h2_factor1
            .class_of(&s1)
            .expect("restriction is a cocycle");
        let c2 = self
            .h2_factor2
            .class_of(&s2)
            .expect("restriction is a cocycle");
        let ab1 = self.g1_group.abelian.as_ref().unwrap();
        let ab2 = self.g2_group.abelian.as_ref().unwrap();
        let pairing: Vec<Vec<i64>> = ab1
            .generators
            .iter()
            .map(|&a| {
                ab2.generators
                    .iter()
                    .map(|&b| sigma.b_value(self.embed1[a as usize], self.embed2[b as usize]))
                    .collect()
            })
            .collect();
        (c1, c2, pairing)
    }

    /// Backward assembly: sigma(a1 a2, b1 b2) = s1(a1,b1) + s2(a2,b2) +
    /// B(a1, b2) with B read off generator exponents.
    pub fn backward(&self, c1: &[i64], c2: &[i64], pairing: &[Vec<i64>]) -> Result<CocycleVector> {
        let s1 = self.h2_factor1.representative(c1);
        let s2 = self.h2_factor2.representative(c2);
        let ab1 = self.g1_group.abelian.as_ref().unwrap();
        let ab2 = self.g2_group.abelian.as_ref().unwrap();
        let n = self.product_group.order;
        let m = self.modulus;
        let mut table = vec![0i64; n * n];
        for x in 0..n as u32 {
            for y in 0..n as u32 {
                let (x1, x2) = (self.coords[x as usize][0], self.coords[x as usize][1]);
                let (y1, y2) = (self.coords[y as usize][0], self.coords[y as usize][1]);
                let mut acc = s1.value(x1, y1) as i128 + s2.value(x2, y2) as i128;
                let e1 = &ab1.exponents[x1 as usize];
                let e2 = &ab2.exponents[y2 as usize];
                for (i, &a) in e1.iter().enumerate() {
                    for (j, &b) in e2.iter().enumerate() {
                        acc += pairing[i][j] as i128 * a as i128 * b as i128;
                    }
                }
                table[x as usize * n + y as usize] = acc.rem_euclid(m as i128) as i64;
            }
        }
        CocycleVector::from_table(&self.product_group, m, table)
    }

    /// Round-trip check over every class of the product cohomology group.
    pub fn verify_round_trip(&self) -> Result<()> {
        for coords in self.h2_product.enumerate_classes() {
            let rep = self.h2_product.representative(&coords);
            let (c1, c2, pairing) = self.forward(&rep);
            let back = self.backward(&c1, &c2, &pairing)?;
            let back_class = self
                .h2_product
                .class_of(&back)
                .ok_or_else(|| Error::VerificationFailed("assembly not in Z^2_{g1}".into()))?;
            if back_class != coords {
                return Err(Error::VerificationFailed(format!(
                    "round trip failed at class {coords:?}"
                )));
            }
            let (d1, d2, p2) = self.forward(&back);
            if d1 != c1 || d2 != c2 || p2 != pairing {
                return Err(Error::VerificationFailed(
                    "forward data not reproduced".into(),
                ));
            }
        }
        Ok(())
    }

    /// |H^2_{g,h}(G1 x G2)| must equal the product of the factor orders.
    pub fn verify_order(&self) -> Result<()> {
        let pairing_count: u64 = self.pairing_orders.iter().flatten().product();
        let expected = self.h2_factor1.order() * self.h2_factor2.order() * pairing_count;
        if self.h2_product.order() != expected {
            return Err(Error::VerificationFailed(format!(
                "order mismatch: |H2(product)| = {}, factors give {}",
                self.h2_product.order(),
                expected
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::build_group_from_factors;

    /// Exhaustive oracle: classify all normalized cochains, filter cocycles
    /// (optionally g1-symmetric), quotient by pointed coboundaries; returns
    /// (class count, multiset of element orders in the quotient).
    fn exhaustive_h2(
        group: &Arc<FiniteGroup>,
        g1: u32,
        g2: u32,
        m: i64,
    ) -> (usize, std::collections::BTreeMap<u64, usize>) {
        let n = group.order;
        let nn = (n - 1) * (n - 1);
        let total = (m as u64).pow(nn as u32);
        assert!(total <= 1 << 22, "oracle too large");
        let mut cocycles: Vec<Vec<i64>> = Vec::new();
        for code in 0..total {
            let mut coords = Vec::with_capacity(nn);
            let mut c = code;
            for _ in 0..nn {
                coords.push((c % m as u64) as i64);
                c /= m as u64;
            }
            let cv = CocycleVector::from_reduced_coords(group, m, &coords);
            if cv.verify().is_ok() && cv.is_symmetric_at(g1) {
                cocycles.push(coords);
            }
        }
        let mut boundaries = std::collections::BTreeSet::new();
        let free: Vec<u32> = (0..n as u32)
            .filter(|&h| h != group.identity && h != g2)
            .collect();
        let btotal = (m as u64).pow(free.len() as u32);
        for code in 0..btotal {
            let mut mu = vec![0i64; n];
            let mut c = code;
            for &h in &free {
                mu[h as usize] = (c % m as u64) as i64;
                c /= m as u64;
            }
            boundaries.insert(CocycleVector::coboundary(group, m, &mu).reduced_coords());
        }
        let key = |v: &Vec<i64>| -> Vec<i64> {
            let mut best: Option<Vec<i64>> = None;
            for b in &boundaries {
                let w: Vec<i64> = v
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| (x + y).rem_euclid(m))
                    .collect();
                if best.as_ref().map_or(true, |cur| w < *cur) {
                    best = Some(w);
                }
            }
            best.unwrap()
        };
        let mut classes: std::collections::BTreeMap<Vec<i64>, Vec<i64>> =
            std::collections::BTreeMap::new();
        for c in &cocycles {
            classes.entry(key(c)).or_insert_with(|| c.clone());
        }
        let count = classes.len();
        let zero = key(&vec![0i64; nn]);
        let mut orders: std::collections::BTreeMap<u64, usize> = std::collections::BTreeMap::new();
        for r in classes.keys() {
            let mut t = 1u64;
            let mut cur = r.clone();
            while key(&cur) != zero {
                cur = cur
                    .iter()
                    .zip(r)
                    .map(|(&x, &y)| (x + y).rem_euclid(m))
                    .collect();
                t += 1;
            }
            *orders.entry(t).or_insert(0) += 1;
        }
        (count, orders)
    }

    fn engine_orders(h2: &CohomologyGroup) -> std::collections::BTreeMap<u64, usize> {
        let mut orders = std::collections::BTreeMap::new();
        for class in h2.enumerate_classes() {
            let mut t = 1u64;
            let mut cur = class.clone();
            while cur.iter().any(|&x| x != 0) {
                cur = h2.add_classes(&cur, &class);
                t += 1;
            }
            *orders.entry(t).or_insert(0) += 1;
        }
        orders
    }

    #[test]
    fn h2_c2_is_z2() {
        let g = build_group_from_factors(&[2]).unwrap();
        let h2 = modified_h2(&g, g.identity, g.identity, 2, Engine::Dense).unwrap();
        assert_eq!(h2.invariant_factors(), vec![2]);
        let (count, _) = exhaustive_h2(&g, g.identity, g.identity, 2);
        assert_eq!(count, 2);
    }

    #[test]
    fn h2_klein_four_is_z2_cubed() {
        let g = build_group_from_factors(&[2, 2]).unwrap();
        let h2 = modified_h2(&g, g.identity, g.identity, 2, Engine::Dense).unwrap();
        assert_eq!(h2.order(), 8);
        assert_eq!(h2.invariant_factors(), vec![2, 2, 2]);
    }

    #[test]
    fn h2_1g_c4_m2_has_order_4() {
        let g = build_group_from_factors(&[4]).unwrap();
        let gen = g.abelian.as_ref().unwrap().generators[0];
        let gsq = g.mul(gen, gen); // order 2
        let h2 = modified_h2(&g, g.identity, gsq, 2, Engine::Dense).unwrap();
        assert_eq!(h2.order(), 4);
    }

    #[test]
    fn dense_engine_matches_exhaustive_oracle() {
        let cases: Vec<(Vec<u64>, i64)> = vec![(vec![2], 2), (vec![3], 3), (vec![4], 2), (vec![2, 2], 2)];
        for (factors, m) in cases {
            let g = build_group_from_factors(&factors).unwrap();
            for g1 in g.elements() {
                for g2 in g.elements() {
                    let flavors_ok = (g1 == g.identity && g2 == g.identity)
                        || (g1 == g.identity)
                        || (g1 == g2);
                    if !flavors_ok {
                        continue;
                    }
                    let h2 = modified_h2(&g, g1, g2, m, Engine::Dense).unwrap();
                    let (count, orders) = exhaustive_h2(&g, g1, g2, m);
                    assert_eq!(
                        h2.order() as usize,
                        count,
                        "{factors:?} m={m} g1={g1} g2={g2}"
                    );
                    assert_eq!(
                        engine_orders(&h2),
                        orders,
                        "structure mismatch {factors:?} m={m} g1={g1} g2={g2}"
                    );
                }
            }
        }
    }

    #[test]
    fn structured_engine_agrees_with_dense() {
        for (factors, m) in [(vec![2u64, 2], 2i64), (vec![4], 4), (vec![4, 2], 4), (vec![6], 6)] {
            let g = build_group_from_factors(&factors).unwrap();
            for g1 in [g.identity, g.abelian.as_ref().unwrap().generators[0]] {
                for g2 in [g.identity, g.abelian.as_ref().unwrap().generators[0]] {
                    let dense = modified_h2(&g, g1, g2, m, Engine::Dense).unwrap();
                    let structured = modified_h2(&g, g1, g2, m, Engine::Structured).unwrap();
                    assert_eq!(
                        dense.invariant_factors(),
                        structured.invariant_factors(),
                        "{factors:?} m={m} g1={g1} g2={g2}"
                    );
                }
            }
        }
    }

    #[test]
    fn h2_cyclic_order_is_gcd() {
        for n in 2u64..=6 {
            for m in 2i64..=6 {
                let g = build_group_from_factors(&[n]).unwrap();
                let h2 = modified_h2(&g, g.identity, g.identity, m, Engine::Dense).unwrap();
                assert_eq!(h2.order(), crate::arith::gcd(n, m as u64), "N={n} M={m}");
            }
        }
    }

    #[test]
    fn canonicalizer_constant_on_coboundary_orbits() {
        let g = build_group_from_factors(&[4]).unwrap();
        let gen = g.abelian.as_ref().unwrap().generators[0];
        let m = 4i64;
        let h2 = modified_h2(&g, g.identity, gen, m, Engine::Dense).unwrap();
        let mut state = 7u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 33) % m as u64) as i64
        };
        for coords in h2.enumerate_classes() {
            let rep = h2.representative(&coords);
            assert_eq!(h2.class_of(&rep), Some(coords.clone()));
            for _ in 0..5 {
                let mut mu = vec![0i64; g.order];
                for h in 0..g.order as u32 {
                    if h != g.identity && h != gen {
                        mu[h as usize] = next();
                    }
                }
                let perturbed = rep.mul(&CocycleVector::coboundary(&g, m, &mu));
                assert_eq!(h2.class_of(&perturbed), Some(coords.clone()));
            }
        }
    }

    #[test]
    fn epsilon_of_standard_cocycle() {
        // f_a on C_N with g = y^{N/n}: epsilon exponent is a
        for (n_total, ord) in [(4u64, 2u64), (6, 3), (4, 4)] {
            let g = build_group_from_factors(&[n_total]).unwrap();
            let y = g.abelian.as_ref().unwrap().generators[0];
            let gelt = g.pow(y, (n_total / ord) as i64);
            let m = n_total as i64;
            for a in 0..m {
                let f = cyclic_standard_cocycle(&g, y, a, m).unwrap();
                assert_eq!(
                    f.epsilon_exponent(gelt),
                    a.rem_euclid(m),
                    "N={n_total} n={ord} a={a}"
                );
            }
        }
    }

    #[test]
    fn epsilon_is_class_invariant_and_additive() {
        let g = build_group_from_factors(&[4]).unwrap();
        let gen = g.abelian.as_ref().unwrap().generators[0];
        let m = 4i64;
        let h2 = modified_h2(&g, g.identity, gen, m, Engine::Dense).unwrap();
        for c1 in h2.enumerate_classes() {
            for c2 in h2.enumerate_classes() {
                let e1 = h2.epsilon(&c1);
                let e2 = h2.epsilon(&c2);
                let sum = h2.add_classes(&c1, &c2);
                assert_eq!(h2.epsilon(&sum), (e1 + e2).rem_euclid(m));
            }
        }
        let cls = h2.enumerate_classes();
        let rep = h2.representative(&cls[cls.len() - 1]);
        let mut mu = vec![0i64; g.order];
        mu[g.mul(gen, gen) as usize] = 3;
        let perturbed = rep.mul(&CocycleVector::coboundary(&g, m, &mu));
        assert_eq!(rep.epsilon_exponent(gen), perturbed.epsilon_exponent(gen));
    }

    #[test]
    fn pairing_basics() {
        let g = build_group_from_factors(&[4]).unwrap();
        let m = 4i64;
        let f = cyclic_standard_cocycle(&g, g.abelian.as_ref().unwrap().generators[0], 3, m)
            .unwrap();
        let elems: Vec<u32> = g.elements().collect();
        let table = pairing_of_class(&f, &elems).unwrap();
        assert!(table.iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn pairing_alternating_on_powers_and_class_invariant() {
        let g = build_group_from_factors(&[4, 4]).unwrap();
        let m = 4i64;
        let sigma = abelian_cocycle_assemble(&g, m, &[0, 0], &[(0, 1, 1)]).unwrap();
        let x = g.abelian.as_ref().unwrap().generators[0];
        for k in 0..4 {
            assert_eq!(sigma.b_value(x, g.pow(x, k)), 0);
        }
        let mut mu = vec![0i64; g.order];
        mu[3] = 2;
        mu[7] = 1;
        mu[g.identity as usize] = 0;
        let perturbed = sigma.mul(&CocycleVector::coboundary(&g, m, &mu));
        for a in g.elements() {
            for h in g.elements() {
                assert_eq!(sigma.b_value(a, h), perturbed.b_value(a, h));
            }
        }
    }

    #[test]
    fn example_3_11_bicharacter_pairing() {
        // G = C16 x C4, sigma(x^a h^b, x^a' h^b') = q^{a b'}, q of order 4;
        // with g = x^2: sigma(g,h) = q^2, sigma(h,g) = 1
        let g = build_group_from_factors(&[16, 4]).unwrap();
        let m = 16i64;
        let q_scale = m / 4;
        let sigma = abelian_cocycle_assemble(&g, m, &[0, 0], &[(0, 1, q_scale)]).unwrap();
        let ab = g.abelian.as_ref().unwrap();
        let x = ab.generators[0];
        let h = ab.generators[1];
        let gelt = g.mul(x, x);
        assert_eq!(sigma.value(gelt, h), 2 * q_scale);
        assert_eq!(sigma.value(h, gelt), 0);
        assert_eq!(sigma.b_value(h, gelt), (-2 * q_scale).rem_euclid(m));
    }

    #[test]
    fn standard_cocycle_class_arithmetic() {
        let g = build_group_from_factors(&[2]).unwrap();
        let y = g.abelian.as_ref().unwrap().generators[0];
        let h2 = modified_h2(&g, g.identity, g.identity, 2, Engine::Dense).unwrap();
        let f0 = cyclic_standard_cocycle(&g, y, 0, 2).unwrap();
        let f1 = cyclic_standard_cocycle(&g, y, 1, 2).unwrap();
        assert_eq!(h2.class_of(&f0), Some(h2.zero_class()));
        assert_ne!(h2.class_of(&f1), Some(h2.zero_class()));
        let g4 = build_group_from_factors(&[4]).unwrap();
        let y4 = g4.abelian.as_ref().unwrap().generators[0];
        let h24 = modified_h2(&g4, g4.identity, g4.identity, 4, Engine::Dense).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let fa = cyclic_standard_cocycle(&g4, y4, a, 4).unwrap();
                let fb = cyclic_standard_cocycle(&g4, y4, b, 4).unwrap();
                let fab = cyclic_standard_cocycle(&g4, y4, a + b, 4).unwrap();
                assert_eq!(h24.class_of(&fa.mul(&fb)), h24.class_of(&fab), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn assemble_hits_all_classes_small() {
        // C2 x C2, M = 2: the 8 assemblies hit all 8 classes
        let g = build_group_from_factors(&[2, 2]).unwrap();
        let h2 = modified_h2(&g, g.identity, g.identity, 2, Engine::Dense).unwrap();
        assert_eq!(h2.order(), 8);
        let mut seen = std::collections::BTreeSet::new();
        for a0 in 0..2 {
            for a1 in 0..2 {
                for b in 0..2 {
                    let sigma = abelian_cocycle_assemble(&g, 2, &[a0, a1], &[(1, 0, b)]).unwrap();
                    seen.insert(h2.class_of(&sigma).unwrap());
                }
            }
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn assemble_family_surjects_up_to_order_16() {
        for factors in [vec![2u64, 2], vec![4, 2], vec![2, 2, 2], vec![4, 4]] {
            let g = build_group_from_factors(&factors).unwrap();
            let m = 2i64;
            let h2 = modified_h2(&g, g.identity, g.identity, m, Engine::Dense).unwrap();
            let r = factors.len();
            let mut seen = std::collections::BTreeSet::new();
            let npar = r + r * (r - 1) / 2;
            let total = (m as u64).pow(npar as u32);
            for code in 0..total {
                let mut c = code;
                let mut carries = vec![0i64; r];
                for slot in carries.iter_mut() {
                    *slot = (c % m as u64) as i64;
                    c /= m as u64;
                }
                let mut bichar = Vec::new();
                for i in 0..r {
                    for j in 0..i {
                        let gd = crate::arith::gcd(
                            m as u64,
                            crate::arith::gcd(factors[i], factors[j]),
                        );
                        let unit = m / gd as i64;
                        let v = ((c % m as u64) as i64) * unit;
                        c /= m as u64;
                        bichar.push((i, j, v));
                    }
                }
                let sigma = abelian_cocycle_assemble(&g, m, &carries, &bichar).unwrap();
                seen.insert(h2.class_of(&sigma).unwrap());
            }
            assert_eq!(seen.len() as u64, h2.order(), "factors {factors:?}");
        }
    }

    #[test]
    fn yamazaki_trivial_second_factor() {
        let g1 = build_group_from_factors(&[4]).unwrap();
        let g2 = build_group_from_factors(&[1]).unwrap();
        let gen = g1.abelian.as_ref().unwrap().generators[0];
        let d = yamazaki_decompose(&g1, &g2, gen, gen, 4).unwrap();
        d.verify_order().unwrap();
        d.verify_round_trip().unwrap();
        assert_eq!(d.h2_product.order(), d.h2_factor1.order());
    }

    #[test]
    fn yamazaki_klein_four() {
        let g1 = build_group_from_factors(&[2]).unwrap();
        let g2 = build_group_from_factors(&[2]).unwrap();
        let d = yamazaki_decompose(&g1, &g2, g1.identity, g1.identity, 2).unwrap();
        assert_eq!(d.h2_factor1.order(), 2);
        assert_eq!(d.h2_factor2.order(), 2);
        let pairing_total: u64 = d.pairing_orders.iter().flatten().product();
        assert_eq!(pairing_total, 2);
        d.verify_order().unwrap();
        d.verify_round_trip().unwrap();
    }

    #[test]
    fn yamazaki_order_check_c4_c2() {
        let g1 = build_group_from_factors(&[4]).unwrap();
        let g2 = build_group_from_factors(&[2]).unwrap();
        let gen = g1.abelian.as_ref().unwrap().generators[0];
        let gsq = g1.mul(gen, gen);
        let d = yamazaki_decompose(&g1, &g2, gsq, gsq, 4).unwrap();
        d.verify_order().unwrap();
        d.verify_round_trip().unwrap();
    }
}
