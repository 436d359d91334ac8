//! Finite groups with dense Cayley tables, characters valued in roots of
//! unity (stored by exponent), and automorphism enumeration.

use std::collections::HashMap;
use std::sync::Arc;

use num::bigint::BigInt;
use num::traits::Zero;

use crate::arith::{gcd, lcm};
use crate::error::{Error, Result};
use crate::linalg::snf::{smith_normal_form, IntMatrix};

pub const ASSOC_CAP: usize = 64;
pub const NONABELIAN_AUT_CAP: usize = 24;

/// Extra structure carried by abelian groups: a cyclic decomposition with a
/// generator per factor and the exponent vector of every element.
#[derive(Clone)]
pub struct AbelianData {
    /// orders of the cyclic factors (not necessarily a divisibility chain)
    pub factors: Vec<u64>,
    /// one generator element per factor
    pub generators: Vec<u32>,
    /// exponent vector of each element in the factor basis
    pub exponents: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, u32>,
}

impl AbelianData {
    pub fn element_of(&self, exps: &[u64]) -> u32 {
        let key: Vec<u64> = exps
            .iter()
            .zip(&self.factors)
            .map(|(&e, &n)| e % n)
            .collect();
        self.index[&key]
    }
}

pub struct FiniteGroup {
    pub order: usize,
    cayley: Vec<u32>,
    pub identity: u32,
    pub inverse: Vec<u32>,
    pub abelian: Option<AbelianData>,
}

impl FiniteGroup {
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.cayley[a as usize * self.order + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn pow(&self, a: u32, e: i64) -> u32 {
        let o = self.element_order(a) as i64;
        let mut e = e.rem_euclid(o) as u64;
        let mut base = a;
        let mut acc = self.identity;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn element_order(&self, a: u32) -> u64 {
        let mut t = 1u64;
        let mut cur = a;
        while cur != self.identity {
            cur = self.mul(cur, a);
            t += 1;
        }
        t
    }

    pub fn is_central(&self, a: u32) -> bool {
        (0..self.order as u32).all(|h| self.mul(a, h) == self.mul(h, a))
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian.is_some()
            || (0..self.order as u32)
                .all(|a| (0..self.order as u32).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order as u32).fold(1, |acc, a| lcm(acc, self.element_order(a)))
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    pub fn cyclic_subgroup(&self, g: u32) -> Vec<u32> {
        let mut out = vec![self.identity];
        let mut cur = g;
        while cur != self.identity {
            out.push(cur);
            cur = self.mul(cur, g);
        }
        out
    }

    pub fn subgroup_generated(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        seen[self.identity as usize] = true;
        let mut frontier = vec![self.identity];
        while let Some(a) = frontier.pop() {
            for &g in gens {
                let b = self.mul(a, g);
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    frontier.push(b);
                }
            }
        }
        (0..self.order as u32).filter(|&x| seen[x as usize]).collect()
    }

    /// Cayley table restricted to a subset (which must be a subgroup),
    /// reindexed densely in the order given.
    pub fn subgroup_as_group(&self, elems: &[u32]) -> Result<Arc<FiniteGroup>> {
        let mut idx = HashMap::new();
        for (i, &e) in elems.iter().enumerate() {
            idx.insert(e, i as u32);
        }
        let n = elems.len();
        let mut table = vec![vec![0u32; n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = self.mul(elems[i], elems[j]);
                let q = idx
                    .get(&p)
                    .ok_or_else(|| Error::InvalidGroup("subset is not closed".into()))?;
                table[i][j] = *q;
            }
        }
        build_group_from_table(&table)
    }
}

/// Group construction input.
pub enum GroupSpec<'a> {
    CyclicFactors(&'a [u64]),
    CayleyTable(&'a [Vec<u32>]),
}

pub fn build_group(spec: GroupSpec) -> Result<Arc<FiniteGroup>> {
    match spec {
        GroupSpec::CyclicFactors(f) => build_group_from_factors(f),
        GroupSpec::CayleyTable(t) => build_group_from_table(t),
    }
}

pub fn build_group_from_factors(factors: &[u64]) -> Result<Arc<FiniteGroup>> {
    if factors.iter().any(|&n| n == 0) {
        return Err(Error::InvalidGroup("zero cyclic factor".into()));
    }
    let factors: Vec<u64> = factors.to_vec();
    let order: u64 = factors.iter().product();
    let order = usize::try_from(order).unwrap();
    if order == 0 || order > 1 << 20 {
        return Err(Error::CapExceeded {
            what: "group order",
            cap: 1 << 20,
            got: order,
        });
    }
    let r = factors.len();
    // mixed-radix encoding, first factor varies slowest
    let strides: Vec<u64> = {
        let mut s = vec![1u64; r];
        for i in (0..r.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * factors[i + 1];
        }
        s
    };
    let exps_of = |e: u32| -> Vec<u64> {
        let mut v = Vec::with_capacity(r);
        let mut rem = e as u64;
        for i in 0..r {
            v.push(rem / strides[i]);
            rem %= strides[i];
        }
        v
    };
    let mut exponents = Vec::with_capacity(order);
    let mut index = HashMap::new();
    for e in 0..order as u32 {
        let v = exps_of(e);
        index.insert(v.clone(), e);
        exponents.push(v);
    }
    let mut cayley = vec![0u32; order * order];
    for a in 0..order as u32 {
        for b in 0..order as u32 {
            let v: Vec<u64> = exponents[a as usize]
                .iter()
                .zip(&exponents[b as usize])
                .zip(&factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect();
            cayley[a as usize * order + b as usize] = index[&v];
        }
    }
    let inverse: Vec<u32> = (0..order as u32)
        .map(|a| {
            let v: Vec<u64> = exponents[a as usize]
                .iter()
                .zip(&factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect();
            index[&v]
        })
        .collect();
    let generators: Vec<u32> = (0..r)
        .map(|i| {
            let mut v = vec![0u64; r];
            v[i] = 1 % factors[i];
            index[&v]
        })
        .collect();
    Ok(Arc::new(FiniteGroup {
        order,
        cayley,
        identity: index[&vec![0u64; r]],
        inverse,
        abelian: Some(AbelianData {
            factors,
            generators,
            exponents,
            index,
        }),
    }))
}

pub fn build_group_from_table(table: &[Vec<u32>]) -> Result<Arc<FiniteGroup>> {
    let n = table.len();
    if n == 0 {
        return Err(Error::InvalidGroup("empty table".into()));
    }
    if n > ASSOC_CAP {
        return Err(Error::CapExceeded {
            what: "cayley table order",
            cap: ASSOC_CAP,
            got: n,
        });
    }
    for row in table {
        if row.len() != n || row.iter().any(|&x| x as usize >= n) {
            return Err(Error::InvalidGroup("table is not square or out of range".into()));
        }
    }
    // Latin square
    for i in 0..n {
        let mut seen_row = vec![false; n];
        let mut seen_col = vec![false; n];
        for j in 0..n {
            if seen_row[table[i][j] as usize] || seen_col[table[j][i] as usize] {
                return Err(Error::InvalidGroup("table is not a Latin square".into()));
            }
            seen_row[table[i][j] as usize] = true;
            seen_col[table[j][i] as usize] = true;
        }
    }
    let flat: Vec<u32> = table.iter().flatten().copied().collect();
    let mul = |a: u32, b: u32| flat[a as usize * n + b as usize];
    // identity
    let identity = (0..n as u32)
        .find(|&e| (0..n as u32).all(|a| mul(e, a) == a && mul(a, e) == a))
        .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
    // inverses
    let mut inverse = vec![u32::MAX; n];
    for a in 0..n as u32 {
        let inv = (0..n as u32)
            .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
            .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no two-sided inverse")))?;
        inverse[a as usize] = inv;
    }
    // associativity on all triples
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            for c in 0..n as u32 {
                if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                    return Err(Error::InvalidGroup(format!(
                        "non-associative triple ({a},{b},{c})"
                    )));
                }
            }
        }
    }
    let mut group = FiniteGroup {
        order: n,
        cayley: flat,
        identity,
        inverse,
        abelian: None,
    };
    let commutative =
        (0..n as u32).all(|a| (0..n as u32).all(|b| group.mul(a, b) == group.mul(b, a)));
    if commutative {
        group.abelian = Some(abelian_structure_from_table(&group)?);
    }
    Ok(Arc::new(group))
}

/// Invariant factor structure of an abelian group given by its table, via
/// Smith normal form of the full relation lattice on all elements.
fn abelian_structure_from_table(g: &FiniteGroup) -> Result<AbelianData> {
    let n = g.order;
    // relations: e_a + e_b - e_{ab} = 0 for all pairs
    let mut cols: Vec<Vec<(usize, i64)>> = Vec::with_capacity(n * n);
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let ab = g.mul(a, b);
            let mut col: HashMap<usize, i64> = HashMap::new();
            *col.entry(a as usize).or_insert(0) += 1;
            *col.entry(b as usize).or_insert(0) += 1;
            *col.entry(ab as usize).or_insert(0) -= 1;
            let col: Vec<(usize, i64)> = col.into_iter().filter(|&(_, c)| c != 0).collect();
            cols.push(col);
        }
    }
    let rel = IntMatrix::from_fn(n, cols.len(), |i, j| {
        cols[j]
            .iter()
            .find(|&&(r, _)| r == i)
            .map(|&(_, c)| BigInt::from(c))
            .unwrap_or_else(BigInt::zero)
    });
    let snf = smith_normal_form(&rel);
    let mut factor_rows = Vec::new();
    let mut factors = Vec::new();
    for i in 0..n {
        let d = if i < snf.d.cols {
            u64::try_from(&snf.d[(i, i)]).map_err(|_| Error::InvalidGroup("snf overflow".into()))?
        } else {
            0
        };
        if d == 0 {
            return Err(Error::InvalidGroup("relation lattice not full rank".into()));
        }
        if d > 1 {
            factor_rows.push(i);
            factors.push(d);
        }
    }
    // exponent vector of element h: rows of U * e_h reduced mod the factors
    let mut exponents = Vec::with_capacity(n);
    let mut index = HashMap::new();
    for h in 0..n {
        let v: Vec<u64> = factor_rows
            .iter()
            .zip(&factors)
            .map(|(&row, &d)| {
                let c = num::Integer::mod_floor(&snf.u[(row, h)], &BigInt::from(d));
                u64::try_from(&c).unwrap()
            })
            .collect();
        if index.insert(v.clone(), h as u32).is_some() {
            return Err(Error::InvalidGroup(
                "exponent encoding is not injective".into(),
            ));
        }
        exponents.push(v);
    }
    // generators: preimages of the unit vectors under U
    let mut generators = Vec::new();
    for (k, &row) in factor_rows.iter().enumerate() {
        let mut target = vec![BigInt::zero(); n];
        target[row] = BigInt::from(1);
        let y = snf.u_inv.mul_vec(&target);
        let mut acc = g.identity;
        for (h, c) in y.iter().enumerate() {
            let e = num::Integer::mod_floor(c, &BigInt::from(g.element_order(h as u32)));
            let e = i64::try_from(&e).unwrap();
            acc = g.mul(acc, g.pow(h as u32, e));
        }
        // sanity: the generator must map to the unit exponent vector
        let got = &exponents[acc as usize];
        let want: Vec<u64> = (0..factors.len()).map(|i| u64::from(i == k)).collect();
        if *got != want {
            return Err(Error::InvalidGroup("generator reconstruction failed".into()));
        }
        generators.push(acc);
    }
    // homomorphism check: encoding must be an isomorphism onto the product
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            let ab = g.mul(a, b);
            let sum: Vec<u64> = exponents[a as usize]
                .iter()
                .zip(&exponents[b as usize])
                .zip(&factors)
                .map(|((&x, &y), &d)| (x + y) % d)
                .collect();
            if exponents[ab as usize] != sum {
                return Err(Error::InvalidGroup("exponent encoding not a morphism".into()));
            }
        }
    }
    Ok(AbelianData {
        factors,
        generators,
        exponents,
        index,
    })
}

/// Direct product, with embeddings of the factor elements.
pub fn direct_product(
    g1: &Arc<FiniteGroup>,
    g2: &Arc<FiniteGroup>,
) -> Result<(Arc<FiniteGroup>, Vec<Vec<u32>>)> {
    let n1 = g1.order;
    let n2 = g2.order;
    let n = n1 * n2;
    let code = |a: u32, b: u32| a * n2 as u32 + b;
    let mut table = vec![vec![0u32; n]; n];
    for a1 in 0..n1 as u32 {
        for b1 in 0..n2 as u32 {
            for a2 in 0..n1 as u32 {
                for b2 in 0..n2 as u32 {
                    table[code(a1, b1) as usize][code(a2, b2) as usize] =
                        code(g1.mul(a1, a2), g2.mul(b1, b2));
                }
            }
        }
    }
    let g = build_group_from_table(&table)?;
    let coords = (0..n as u32)
        .map(|e| vec![e / n2 as u32, e % n2 as u32])
        .collect();
    Ok((g, coords))
}

/// A character G -> mu_M stored by exponent: h maps to zeta_M^{exponents[h]}.
#[derive(Clone)]
pub struct Character {
    pub modulus: u64,
    pub exponents: Vec<u64>,
}

impl Character {
    pub fn new(group: &FiniteGroup, modulus: u64, exponents: Vec<u64>) -> Result<Self> {
        if modulus < 1 {
            return Err(Error::InvalidCharacter("modulus must be >= 1".into()));
        }
        if exponents.len() != group.order {
            return Err(Error::InvalidCharacter("wrong exponent count".into()));
        }
        let chi = Character {
            modulus,
            exponents: exponents.iter().map(|e| e % modulus).collect(),
        };
        if chi.exponents[group.identity as usize] != 0 {
            return Err(Error::InvalidCharacter("chi(1) != 1".into()));
        }
        for a in 0..group.order as u32 {
            for b in 0..group.order as u32 {
                let ab = group.mul(a, b);
                if (chi.exponents[a as usize] + chi.exponents[b as usize]) % modulus
                    != chi.exponents[ab as usize]
                {
                    return Err(Error::InvalidCharacter(format!(
                        "not multiplicative at ({a},{b})"
                    )));
                }
            }
        }
        Ok(chi)
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Character {
            modulus: 1,
            exponents: vec![0; group.order],
        }
    }

    /// Character of an abelian group from exponents on the cyclic generators.
    pub fn from_generator_exponents(
        group: &FiniteGroup,
        modulus: u64,
        gen_exps: &[u64],
    ) -> Result<Self> {
        let ab = group
            .abelian
            .as_ref()
            .ok_or_else(|| Error::InvalidCharacter("group is not abelian".into()))?;
        if gen_exps.len() != ab.factors.len() {
            return Err(Error::InvalidCharacter("wrong generator count".into()));
        }
        for (i, (&c, &n)) in gen_exps.iter().zip(&ab.factors).enumerate() {
            if (c as u128 * n as u128) % modulus as u128 != 0 {
                return Err(Error::InvalidCharacter(format!(
                    "exponent {c} on generator {i} incompatible with order {n} mod {modulus}"
                )));
            }
        }
        let exponents: Vec<u64> = (0..group.order)
            .map(|h| {
                ab.exponents[h]
                    .iter()
                    .zip(gen_exps)
                    .fold(0u64, |acc, (&e, &c)| {
                        (acc + (e as u128 * c as u128 % modulus as u128) as u64) % modulus
                    })
            })
            .collect();
        Character::new(group, modulus, exponents)
    }

    pub fn value(&self, h: u32) -> u64 {
        self.exponents[h as usize]
    }

    /// Order of the root of unity chi(h).
    pub fn value_order(&self, h: u32) -> u64 {
        self.modulus / gcd(self.modulus, self.exponents[h as usize])
    }

    /// Order of chi in the character group.
    pub fn order(&self) -> u64 {
        let g = self
            .exponents
            .iter()
            .fold(self.modulus, |acc, &e| gcd(acc, e));
        self.modulus / g
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// chi^k
    pub fn pow(&self, k: u64) -> Character {
        Character {
            modulus: self.modulus,
            exponents: self
                .exponents
                .iter()
                .map(|&e| (e as u128 * k as u128 % self.modulus as u128) as u64)
                .collect(),
        }
    }

    pub fn compose(&self, u: &GroupAutomorphism) -> Character {
        Character {
            modulus: self.modulus,
            exponents: u.perm.iter().map(|&img| self.exponents[img as usize]).collect(),
        }
    }

    /// Same character with exponents rescaled into mu_M2 (modulus | M2).
    pub fn promote(&self, m2: u64) -> Result<Character> {
        if m2 % self.modulus != 0 {
            return Err(Error::ModulusMismatch(self.modulus, m2));
        }
        let k = m2 / self.modulus;
        Ok(Character {
            modulus: m2,
            exponents: self.exponents.iter().map(|&e| e * k).collect(),
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupAutomorphism {
    /// perm[h] = u(h)
    pub perm: Vec<u32>,
}

impl GroupAutomorphism {
    pub fn identity(group: &FiniteGroup) -> Self {
        GroupAutomorphism {
            perm: (0..group.order as u32).collect(),
        }
    }

    pub fn apply(&self, h: u32) -> u32 {
        self.perm[h as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// (self o other)(h) = self(other(h))
    pub fn compose(&self, other: &GroupAutomorphism) -> GroupAutomorphism {
        GroupAutomorphism {
            perm: other.perm.iter().map(|&h| self.perm[h as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> GroupAutomorphism {
        let mut inv = vec![0u32; self.perm.len()];
        for (i, &x) in self.perm.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        GroupAutomorphism { perm: inv }
    }

    pub fn verify(&self, group: &FiniteGroup) -> bool {
        let n = group.order;
        if self.perm.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &x in &self.perm {
            if seen[x as usize] {
                return false;
            }
            seen[x as usize] = true;
        }
        if self.perm[group.identity as usize] != group.identity {
            return false;
        }
        for a in 0..n as u32 {
            for b in 0..n as u32 {
                if self.perm[group.mul(a, b) as usize]
                    != group.mul(self.perm[a as usize], self.perm[b as usize])
                {
                    return false;
                }
            }
        }
        true
    }
}

/// All automorphisms u with u(g) = g and, when given, chi o u = chi.
pub fn automorphisms_fixing(
    group: &Arc<FiniteGroup>,
    g: u32,
    chi: Option<&Character>,
) -> Result<Vec<GroupAutomorphism>> {
    let all = if group.abelian.is_some() {
        abelian_endomorphism_search(group, Some(g))?
    } else {
        nonabelian_automorphism_search(group)?
    };
    Ok(all
        .into_iter()
        .filter(|u| u.apply(g) == g)
        .filter(|u| match chi {
            None => true,
            Some(c) => c.compose(u).exponents == c.exponents,
        })
        .collect())
}

/// Enumerate automorphisms of an abelian group through endomorphism
/// matrices: entry (i,j) ranges over Hom(C_{N_j}, C_{N_i}).
fn abelian_endomorphism_search(
    group: &Arc<FiniteGroup>,
    must_fix: Option<u32>,
) -> Result<Vec<GroupAutomorphism>> {
    let ab = group.abelian.as_ref().unwrap();
    let r = ab.factors.len();
    if r == 0 {
        return Ok(vec![GroupAutomorphism::identity(group)]);
    }
    // choices per matrix entry
    let mut entry_choices: Vec<Vec<u64>> = Vec::with_capacity(r * r);
    let mut total: u64 = 1;
    for i in 0..r {
        for j in 0..r {
            let ni = ab.factors[i];
            let nj = ab.factors[j];
            let g = gcd(ni, nj);
            let step = ni / g;
            let choices: Vec<u64> = (0..g).map(|t| t * step).collect();
            total = total.saturating_mul(choices.len() as u64);
            entry_choices.push(choices);
        }
    }
    if total > 4_000_000 {
        return Err(Error::CapExceeded {
            what: "abelian automorphism enumeration",
            cap: 4_000_000,
            got: total as usize,
        });
    }
    let mut out = Vec::new();
    let mut counters = vec![0usize; r * r];
    loop {
        // build matrix columns: image of generator j has exponents col[j][i]
        let mat: Vec<u64> = counters
            .iter()
            .zip(&entry_choices)
            .map(|(&c, ch)| ch[c])
            .collect();
        // candidate map on elements
        let fix_ok = match must_fix {
            None => true,
            Some(g) => {
                let img = apply_matrix(ab, &mat, &ab.exponents[g as usize]);
                ab.element_of(&img) == g
            }
        };
        if fix_ok {
            let mut perm = Vec::with_capacity(group.order);
            let mut seen = vec![false; group.order];
            let mut bijective = true;
            for h in 0..group.order {
                let img = apply_matrix(ab, &mat, &ab.exponents[h]);
                let e = ab.element_of(&img);
                if seen[e as usize] {
                    bijective = false;
                    break;
                }
                seen[e as usize] = true;
                perm.push(e);
            }
            if bijective {
                out.push(GroupAutomorphism { perm });
            }
        }
        // increment counters
        let mut k = 0;
        loop {
            if k == counters.len() {
                return Ok(out);
            }
            counters[k] += 1;
            if counters[k] < entry_choices[k].len() {
                break;
            }
            counters[k] = 0;
            k += 1;
        }
    }
}

fn apply_matrix(ab: &AbelianData, mat: &[u64], exps: &[u64]) -> Vec<u64> {
    let r = ab.factors.len();
    (0..r)
        .map(|i| {
            let mut acc = 0u128;
            for j in 0..r {
                acc += mat[i * r + j] as u128 * exps[j] as u128;
            }
            (acc % ab.factors[i] as u128) as u64
        })
        .collect()
}

/// All homomorphisms between two abelian groups, as element maps.
pub fn abelian_homomorphisms(
    source: &Arc<FiniteGroup>,
    target: &Arc<FiniteGroup>,
) -> Result<Vec<Vec<u32>>> {
    let abs = source
        .abelian
        .as_ref()
        .ok_or_else(|| Error::InvalidGroup("source not abelian".into()))?;
    let abt = target
        .abelian
        .as_ref()
        .ok_or_else(|| Error::InvalidGroup("target not abelian".into()))?;
    let rs = abs.factors.len();
    let rt = abt.factors.len();
    if rs == 0 {
        return Ok(vec![vec![target.identity; source.order]]);
    }
    // image of source generator j: exponent vector v with N_j * v = 0
    let mut entry_choices: Vec<Vec<u64>> = Vec::new();
    let mut total = 1u64;
    for j in 0..rs {
        for i in 0..rt {
            let g = gcd(abt.factors[i], abs.factors[j]);
            let step = abt.factors[i] / g;
            let choices: Vec<u64> = (0..g).map(|t| t * step).collect();
            total = total.saturating_mul(choices.len() as u64);
            entry_choices.push(choices);
        }
    }
    if total > 4_000_000 {
        return Err(Error::CapExceeded {
            what: "abelian homomorphism enumeration",
            cap: 4_000_000,
            got: total as usize,
        });
    }
    let mut out = Vec::new();
    let mut counters = vec![0usize; rs * rt];
    loop {
        let cols: Vec<Vec<u64>> = (0..rs)
            .map(|j| {
                (0..rt)
                    .map(|i| entry_choices[j * rt + i][counters[j * rt + i]])
                    .collect()
            })
            .collect();
        let map: Vec<u32> = (0..source.order)
            .map(|h| {
                let e = &abs.exponents[h];
                let img: Vec<u64> = (0..rt)
                    .map(|i| {
                        let mut acc = 0u128;
                        for j in 0..rs {
                            acc += cols[j][i] as u128 * e[j] as u128;
                        }
                        (acc % abt.factors[i] as u128) as u64
                    })
                    .collect();
                abt.element_of(&img)
            })
            .collect();
        out.push(map);
        let mut k = 0;
        loop {
            if k == counters.len() {
                return Ok(out);
            }
            counters[k] += 1;
            if counters[k] < entry_choices[k].len() {
                break;
            }
            counters[k] = 0;
            k += 1;
        }
    }
}

/// All isomorphisms source -> target as element maps.
pub fn isomorphisms_between(
    source: &Arc<FiniteGroup>,
    target: &Arc<FiniteGroup>,
) -> Result<Vec<Vec<u32>>> {
    if source.order != target.order {
        return Ok(Vec::new());
    }
    if source.abelian.is_some() != target.abelian.is_some() {
        return Ok(Vec::new());
    }
    if source.abelian.is_some() {
        let homs = abelian_homomorphisms(source, target)?;
        Ok(homs
            .into_iter()
            .filter(|map| {
                let mut seen = vec![false; target.order];
                map.iter().all(|&x| {
                    if seen[x as usize] {
                        false
                    } else {
                        seen[x as usize] = true;
                        true
                    }
                })
            })
            .collect())
    } else {
        // backtracking over generator images in the target
        let n = source.order;
        if n > NONABELIAN_AUT_CAP {
            return Err(Error::CapExceeded {
                what: "nonabelian isomorphism search",
                cap: NONABELIAN_AUT_CAP,
                got: n,
            });
        }
        let mut gens: Vec<u32> = Vec::new();
        let mut current = vec![source.identity];
        while current.len() < n {
            let next = (0..n as u32)
                .filter(|h| !current.contains(h))
                .max_by_key(|&h| source.element_order(h))
                .unwrap();
            gens.push(next);
            let mut with = gens.clone();
            with.push(source.identity);
            current = source.subgroup_generated(&with);
        }
        let mut out = Vec::new();
        let mut images = vec![0u32; gens.len()];
        cross_search_images(source, target, &gens, 0, &mut images, &mut out);
        Ok(out)
    }
}

fn cross_search_images(
    source: &Arc<FiniteGroup>,
    target: &Arc<FiniteGroup>,
    gens: &[u32],
    depth: usize,
    images: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if depth == gens.len() {
        if let Some(map) = try_build_cross_hom(source, target, gens, images) {
            let mut seen = vec![false; target.order];
            let bijective = map.iter().all(|&x| {
                if seen[x as usize] {
                    false
                } else {
                    seen[x as usize] = true;
                    true
                }
            });
            if bijective {
                out.push(map);
            }
        }
        return;
    }
    let want_order = source.element_order(gens[depth]);
    for h in 0..target.order as u32 {
        if target.element_order(h) != want_order {
            continue;
        }
        images[depth] = h;
        cross_search_images(source, target, gens, depth + 1, images, out);
    }
}

fn try_build_cross_hom(
    source: &Arc<FiniteGroup>,
    target: &Arc<FiniteGroup>,
    gens: &[u32],
    images: &[u32],
) -> Option<Vec<u32>> {
    let n = source.order;
    let mut map = vec![u32::MAX; n];
    map[source.identity as usize] = target.identity;
    let mut queue: Vec<u32> = vec![source.identity];
    for (&g, &img) in gens.iter().zip(images) {
        if map[g as usize] == u32::MAX {
            map[g as usize] = img;
            queue.push(g);
        } else if map[g as usize] != img {
            return None;
        }
    }
    while let Some(a) = queue.pop() {
        for &g in gens {
            let ag = source.mul(a, g);
            let img = target.mul(map[a as usize], map[g as usize]);
            if map[ag as usize] == u32::MAX {
                map[ag as usize] = img;
                queue.push(ag);
            } else if map[ag as usize] != img {
                return None;
            }
        }
    }
    if map.iter().any(|&x| x == u32::MAX) {
        return None;
    }
    // full multiplicativity
    for a in 0..n as u32 {
        for b in 0..n as u32 {
            if map[source.mul(a, b) as usize] != target.mul(map[a as usize], map[b as usize]) {
                return None;
            }
        }
    }
    Some(map)
}

/// Backtracking over generator images for nonabelian groups.
fn nonabelian_automorphism_search(group: &Arc<FiniteGroup>) -> Result<Vec<GroupAutomorphism>> {
    let n = group.order;
    if n > NONABELIAN_AUT_CAP {
        return Err(Error::CapExceeded {
            what: "nonabelian automorphism search",
            cap: NONABELIAN_AUT_CAP,
            got: n,
        });
    }
    // greedy generating sequence
    let mut gens: Vec<u32> = Vec::new();
    let mut current = vec![group.identity];
    while current.len() < n {
        let next = (0..n as u32)
            .filter(|h| !current.contains(h))
            .max_by_key(|&h| group.element_order(h))
            .unwrap();
        gens.push(next);
        let mut with = gens.clone();
        with.push(group.identity);
        current = group.subgroup_generated(&with);
    }
    let mut out = Vec::new();
    let mut images = vec![0u32; gens.len()];
    search_images(group, &gens, 0, &mut images, &mut out);
    Ok(out)
}

fn search_images(
    group: &Arc<FiniteGroup>,
    gens: &[u32],
    depth: usize,
    images: &mut Vec<u32>,
    out: &mut Vec<GroupAutomorphism>,
) {
    if depth == gens.len() {
        if let Some(perm) = try_build_hom(group, gens, images) {
            let u = GroupAutomorphism { perm };
            if u.verify(group) {
                out.push(u);
            }
        }
        return;
    }
    let want_order = group.element_order(gens[depth]);
    for h in 0..group.order as u32 {
        if group.element_order(h) != want_order {
            continue;
        }
        images[depth] = h;
        search_images(group, gens, depth + 1, images, out);
    }
}

/// Attempt to extend gens -> images to a total map by closing under
/// multiplication; None on any inconsistency.
fn try_build_hom(group: &Arc<FiniteGroup>, gens: &[u32], images: &[u32]) -> Option<Vec<u32>> {
    let n = group.order;
    let mut map = vec![u32::MAX; n];
    map[group.identity as usize] = group.identity;
    let mut known: Vec<u32> = vec![group.identity];
    let mut queue: Vec<u32> = vec![group.identity];
    for (&g, &img) in gens.iter().zip(images) {
        if map[g as usize] == u32::MAX {
            map[g as usize] = img;
            known.push(g);
            queue.push(g);
        } else if map[g as usize] != img {
            return None;
        }
    }
    while let Some(a) = queue.pop() {
        for &g in gens {
            let ag = group.mul(a, g);
            let img = group.mul(map[a as usize], map[g as usize]);
            if map[ag as usize] == u32::MAX {
                map[ag as usize] = img;
                known.push(ag);
                queue.push(ag);
            } else if map[ag as usize] != img {
                return None;
            }
        }
    }
    if map.iter().any(|&x| x == u32::MAX) {
        return None;
    }
    Some(map)
}
