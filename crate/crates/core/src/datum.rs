//! Group data (G, g, chi, mu), the six-type classifier, companion data,
//! isomorphism of data, and the type V/VI reductions to type III.

use std::sync::Arc;

use crate::arith::lcm;
use crate::cohomology::{z2_class_generators, CocycleVector};
use crate::error::{Error, Result};
use crate::groups::{isomorphisms_between, Character, FiniteGroup};
use crate::linalg::cyclotomic::{Cyc, CycField};
use crate::linalg::modelim::ModElim;

/// A group datum: finite group, central element g, character chi with
/// chi(g) != 1, and a scalar mu constrained by the orders d = o(chi(g)),
/// n = o(g), m = o(chi).
#[derive(Clone)]
pub struct GroupDatum {
    pub group: Arc<FiniteGroup>,
    pub g: u32,
    pub chi: Character,
    pub mu: Cyc,
    pub d: u64,
    pub n: u64,
    pub m: u64,
}

impl GroupDatum {
    /// Scalar field large enough for chi values and mu.
    pub fn field(&self) -> Arc<CycField> {
        let f = lcm(self.chi.modulus, self.mu.field.modulus);
        CycField::get(f)
    }

    /// chi(h) inside the given field (modulus a multiple of chi's).
    pub fn chi_cyc(&self, field: &Arc<CycField>, h: u32) -> Cyc {
        let scale = (field.modulus / self.chi.modulus) as i64;
        Cyc::root_of_unity(field, self.chi.value(h) as i64 * scale)
    }

    /// Default coefficient modulus for cohomology computations:
    /// lcm(exp(G), o(chi(g))).
    pub fn default_modulus(&self) -> i64 {
        lcm(self.group.exponent(), self.d) as i64
    }

    pub fn is_cyclic(&self) -> bool {
        self.group
            .elements()
            .any(|z| self.group.element_order(z) == self.group.order as u64)
    }
}

pub fn make_datum(group: &Arc<FiniteGroup>, g: u32, chi: Character, mu: Cyc) -> Result<GroupDatum> {
    if (g as usize) >= group.order {
        return Err(Error::InvalidDatum("g out of range".into()));
    }
    if !group.is_central(g) {
        return Err(Error::InvalidDatum("g is not central".into()));
    }
    if chi.exponents.len() != group.order {
        return Err(Error::InvalidDatum("chi does not match the group".into()));
    }
    if chi.value(g) == 0 {
        return Err(Error::InvalidDatum("chi(g) = 1".into()));
    }
    let d = chi.value_order(g);
    let n = group.element_order(g);
    let m = chi.order();
    if n == d && !mu.is_zero() {
        return Err(Error::InvalidDatum(
            "mu must vanish when o(g) = o(chi(g))".into(),
        ));
    }
    if !mu.is_zero() && m != d {
        return Err(Error::InvalidDatum(
            "mu != 0 requires chi^{o(chi(g))} = 1".into(),
        ));
    }
    Ok(GroupDatum {
        group: group.clone(),
        g,
        chi,
        mu,
        d,
        n,
        m,
    })
}

/// The six types of group data.  Type V carries a witness cocycle sigma with
/// chi^d(h) = sigma(g^d, h) sigma(h, g^d)^{-1} for all h.
#[derive(Clone)]
pub enum DatumType {
    I,
    II,
    III,
    IV,
    V { witness: CocycleVector },
    VI,
}

impl DatumType {
    pub fn tag(&self) -> &'static str {
        match self {
            DatumType::I => "I",
            DatumType::II => "II",
            DatumType::III => "III",
            DatumType::IV => "IV",
            DatumType::V { .. } => "V",
            DatumType::VI => "VI",
        }
    }
}

impl std::fmt::Debug for DatumType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.tag())
    }
}

impl PartialEq for DatumType {
    fn eq(&self, other: &Self) -> bool {
        self.tag() == other.tag()
    }
}
impl Eq for DatumType {}

/// Classify a datum.  The IV-vs-V decision searches cohomology classes of
/// H^2(G, mu_M) for one whose pairing satisfies B_sigma(g^d, h) = chi^d(h)
/// for all h; the search modulus defaults to lcm(exp(G), o(chi(g))) and the
/// equations are solved in mu_L with L = lcm(M, o(chi)).
pub fn classify_type(datum: &GroupDatum, search_modulus: Option<i64>) -> Result<DatumType> {
    if !datum.mu.is_zero() {
        return Ok(DatumType::VI);
    }
    let chi_d_trivial = datum.m == datum.d;
    if datum.d == datum.n {
        return Ok(if chi_d_trivial {
            DatumType::I
        } else {
            DatumType::II
        });
    }
    if chi_d_trivial {
        return Ok(DatumType::III);
    }
    // type IV or V
    match symmetric_extension_witness(datum, search_modulus)? {
        Some(witness) => Ok(DatumType::V { witness }),
        None => Ok(DatumType::IV),
    }
}

/// Search for sigma in Z^2(G, mu_M) with chi^d(h) = B_sigma(g^d, h) for all
/// h.  Complete at class level because B_sigma is a class invariant.  For
/// abelian G with exp(G) | M this search is equivalent to the one over the
/// full field.
pub fn symmetric_extension_witness(
    datum: &GroupDatum,
    search_modulus: Option<i64>,
) -> Result<Option<CocycleVector>> {
    let m_search = search_modulus.unwrap_or_else(|| datum.default_modulus());
    let l = lcm(m_search as u64, datum.chi.modulus) as i64;
    let gens = z2_class_generators(&datum.group, m_search)?;
    let k = gens.len();
    let gd = datum.group.pow(datum.g, datum.d as i64);
    let n = datum.group.order;
    let scale_b = l / m_search;
    let scale_chi = (l as u64 / datum.chi.modulus) as i64;
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for h in datum.group.elements() {
        let mut row = Vec::with_capacity(k);
        for gen in &gens {
            row.push((gen.b_value(gd, h) * scale_b).rem_euclid(l));
        }
        rows.push(row);
        let chid = (datum.d as i64 * datum.chi.value(h) as i64 * scale_chi).rem_euclid(l);
        rhs.push(chid);
    }
    let flat: Vec<i64> = rows.iter().flatten().copied().collect();
    let elim = ModElim::new(n, k, &flat, l);
    let sol = match elim.solve(&rhs) {
        None => return Ok(None),
        Some(y) => y,
    };
    let mut sigma = CocycleVector::trivial(&datum.group, m_search);
    for (gen, &c) in gens.iter().zip(&sol) {
        sigma = sigma.mul(&gen.pow(c));
    }
    // verify the defining identity exactly
    for h in datum.group.elements() {
        let lhs = (sigma.b_value(gd, h) * scale_b).rem_euclid(l);
        let rhs = (datum.d as i64 * datum.chi.value(h) as i64 * scale_chi).rem_euclid(l);
        if lhs != rhs {
            return Err(Error::VerificationFailed(
                "type V witness failed its defining identity".into(),
            ));
        }
    }
    Ok(Some(sigma))
}

/// chi'(h) = sigma(g,h)^{-1} sigma(h,g) chi(h) as a character mod
/// lcm(M_sigma, M_chi).
pub fn companion_character(datum: &GroupDatum, sigma: &CocycleVector) -> Result<Character> {
    let l = lcm(sigma.modulus as u64, datum.chi.modulus);
    let scale_b = (l / sigma.modulus as u64) as i64;
    let scale_chi = (l / datum.chi.modulus) as i64;
    let exponents: Vec<u64> = datum
        .group
        .elements()
        .map(|h| {
            let b = sigma.b_value(h, datum.g) * scale_b;
            let c = datum.chi.value(h) as i64 * scale_chi;
            (b + c).rem_euclid(l as i64) as u64
        })
        .collect();
    Character::new(&datum.group, l, exponents)
}

/// The companion datum (G, g, chi') of a type III or IV datum along sigma
/// (mu stays 0).  Type IV yields type IV; type III yields type III or V.
pub fn companion_datum(datum: &GroupDatum, sigma: &CocycleVector) -> Result<GroupDatum> {
    let ty = classify_type(datum, None)?;
    match ty {
        DatumType::III | DatumType::IV => {}
        other => {
            return Err(Error::TypeMismatch {
                expected: "III or IV".into(),
                got: other.tag().into(),
            })
        }
    }
    let chi2 = companion_character(datum, sigma)?;
    let field = datum.field();
    make_datum(&datum.group, datum.g, chi2, Cyc::zero(&field))
}

/// The type VI companion of Proposition-style data: a type III datum with a
/// Galois pair (sigma, a), a != 0, yields (G, g, chi', mu') with
/// mu' = -a * (sigma(g,g) ... sigma(g,g^{d-1}))^{-1}.
pub fn companion_vi(datum: &GroupDatum, sigma: &CocycleVector, a: &Cyc) -> Result<GroupDatum> {
    let ty = classify_type(datum, None)?;
    if ty != DatumType::III {
        return Err(Error::TypeMismatch {
            expected: "III".into(),
            got: ty.tag().into(),
        });
    }
    if a.is_zero() {
        return Err(Error::InvalidDatum("type VI companion needs a != 0".into()));
    }
    let gd = datum.group.pow(datum.g, datum.d as i64);
    if !sigma.is_symmetric_at(gd) {
        return Err(Error::InvalidDatum(
            "sigma must be symmetric at g^d (Galois requirement)".into(),
        ));
    }
    let chi2 = companion_character(datum, sigma)?;
    let field = CycField::get(lcm(
        lcm(a.field.modulus, sigma.modulus as u64),
        chi2.modulus,
    ));
    let a = a.promote(&field)?;
    // product sigma(g,g) ... sigma(g,g^{d-1})
    let mut prod = Cyc::one(&field);
    let mut p = datum.g;
    for _ in 1..datum.d {
        prod = prod.mul(&sigma.value_cyc(&field, datum.g, p));
        p = datum.group.mul(p, datum.g);
    }
    let mu = a.neg().mul(&prod.inverse()?);
    make_datum(&datum.group, datum.g, chi2, mu)
}

/// Witness of isomorphism of group data: a group isomorphism f with
/// f(g1) = g2 and chi2 o f = chi1, and a scalar delta with mu1 = delta^d mu2.
pub struct DatumIsomorphism {
    /// element map G1 -> G2
    pub map: Vec<u32>,
    pub delta: Cyc,
}

/// Search for an isomorphism of data.  delta is searched over the roots of
/// unity of the common field plus caller-provided samples, the declared
/// surrogate for the full multiplicative group.
pub fn datum_isomorphic(
    d1: &GroupDatum,
    d2: &GroupDatum,
    delta_samples: &[Cyc],
) -> Result<Option<DatumIsomorphism>> {
    if d1.group.order != d2.group.order || d1.d != d2.d || d1.n != d2.n || d1.m != d2.m {
        return Ok(None);
    }
    let l = lcm(d1.chi.modulus, d2.chi.modulus);
    let s1 = (l / d1.chi.modulus) as i64;
    let s2 = (l / d2.chi.modulus) as i64;
    let isos = isomorphisms_between(&d1.group, &d2.group)?;
    let mut found_map: Option<Vec<u32>> = None;
    for map in isos {
        if map[d1.g as usize] != d2.g {
            continue;
        }
        let chi_ok = d1.group.elements().all(|h| {
            let lhs = d2.chi.value(map[h as usize]) as i64 * s2;
            let rhs = d1.chi.value(h) as i64 * s1;
            (lhs - rhs).rem_euclid(l as i64) == 0
        });
        if chi_ok {
            found_map = Some(map);
            break;
        }
    }
    let map = match found_map {
        None => return Ok(None),
        Some(m) => m,
    };
    // scalar part
    let field = CycField::get(lcm(
        lcm(d1.mu.field.modulus, d2.mu.field.modulus),
        delta_samples
            .iter()
            .fold(1u64, |acc, s| lcm(acc, s.field.modulus)),
    ));
    let mu1 = d1.mu.promote(&field)?;
    let mu2 = d2.mu.promote(&field)?;
    if mu1.is_zero() && mu2.is_zero() {
        return Ok(Some(DatumIsomorphism {
            map,
            delta: Cyc::one(&field),
        }));
    }
    if mu1.is_zero() != mu2.is_zero() {
        return Ok(None);
    }
    let mut candidates: Vec<Cyc> = (0..field.modulus)
        .map(|e| Cyc::root_of_unity(&field, e as i64))
        .collect();
    for s in delta_samples {
        candidates.push(s.promote(&field)?);
    }
    for delta in candidates {
        if delta.is_zero() {
            continue;
        }
        if delta.pow(d1.d).mul(&mu2) == mu1 {
            return Ok(Some(DatumIsomorphism { map, delta }));
        }
    }
    Ok(None)
}

pub enum ReduceMode<'a> {
    TypeV { witness: &'a CocycleVector },
    TypeVI,
}

/// Reduction to type III: Corollary-style.  For a type V datum with its
/// symmetric-extension witness sigma, the reduced datum is (G, g, chi_sigma)
/// with chi_sigma(h) = sigma(g,h)^{-1} sigma(h,g) chi(h); for a type VI
/// datum it is (G, g, chi) with mu dropped.
pub fn reduce(datum: &GroupDatum, mode: ReduceMode) -> Result<GroupDatum> {
    let ty = classify_type(datum, None)?;
    let reduced = match (&ty, mode) {
        (DatumType::V { .. }, ReduceMode::TypeV { witness }) => {
            // the witness must satisfy chi^d(h) = B_sigma(g^d, h)
            let gd = datum.group.pow(datum.g, datum.d as i64);
            let l = lcm(witness.modulus as u64, datum.chi.modulus) as i64;
            let sb = l / witness.modulus;
            let sc = (l as u64 / datum.chi.modulus) as i64;
            for h in datum.group.elements() {
                let lhs = (witness.b_value(gd, h) * sb).rem_euclid(l);
                let rhs = (datum.d as i64 * datum.chi.value(h) as i64 * sc).rem_euclid(l);
                if lhs != rhs {
                    return Err(Error::VerificationFailed(
                        "witness fails its defining identity".into(),
                    ));
                }
            }
            let chi2 = companion_character(datum, witness)?;
            make_datum(&datum.group, datum.g, chi2, Cyc::zero(&datum.field()))?
        }
        (DatumType::VI, ReduceMode::TypeVI) => {
            let field = datum.field();
            make_datum(&datum.group, datum.g, datum.chi.clone(), Cyc::zero(&field))?
        }
        (other, ReduceMode::TypeV { .. }) => {
            return Err(Error::TypeMismatch {
                expected: "V".into(),
                got: other.tag().into(),
            })
        }
        (other, ReduceMode::TypeVI) => {
            return Err(Error::TypeMismatch {
                expected: "VI".into(),
                got: other.tag().into(),
            })
        }
    };
    let rty = classify_type(&reduced, None)?;
    if rty != DatumType::III {
        return Err(Error::VerificationFailed(format!(
            "reduction produced type {} instead of III",
            rty.tag()
        )));
    }
    Ok(reduced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::abelian_cocycle_assemble;
    use crate::groups::build_group_from_factors;

    fn cyclic_datum(nn: u64, g_power: u64, chi_gen_exp: u64, chi_mod: u64) -> GroupDatum {
        let g = build_group_from_factors(&[nn]).unwrap();
        let z = g.abelian.as_ref().unwrap().generators[0];
        let gelt = g.pow(z, g_power as i64);
        let chi = Character::from_generator_exponents(&g, chi_mod, &[chi_gen_exp]).unwrap();
        let field = CycField::get(chi_mod);
        make_datum(&g, gelt, chi, Cyc::zero(&field)).unwrap()
    }

    #[test]
    fn taft_datum_is_type_i() {
        // C[N,N,N,1,q]: chi faithful, g generator
        for n in [2u64, 3, 4] {
            let d = cyclic_datum(n, 1, 1, n);
            assert_eq!(d.d, n);
            assert_eq!(d.n, n);
            assert_eq!(d.m, n);
            assert_eq!(classify_type(&d, None).unwrap(), DatumType::I);
        }
    }

    #[test]
    fn chi_at_g_must_be_nontrivial() {
        let g = build_group_from_factors(&[4]).unwrap();
        let z = g.abelian.as_ref().unwrap().generators[0];
        let gsq = g.mul(z, z);
        // chi(z) = -1 makes chi(z^2) = 1
        let chi = Character::from_generator_exponents(&g, 2, &[1]).unwrap();
        let field = CycField::get(2);
        assert!(make_datum(&g, gsq, chi, Cyc::zero(&field)).is_err());
    }

    #[test]
    fn mu_constraints_enforced() {
        let g = build_group_from_factors(&[2]).unwrap();
        let z = g.abelian.as_ref().unwrap().generators[0];
        let chi = Character::from_generator_exponents(&g, 2, &[1]).unwrap();
        let field = CycField::get(2);
        // o(g) = o(chi(g)) = 2: mu must vanish
        assert!(make_datum(&g, z, chi.clone(), Cyc::one(&field)).is_err());
        // type VI shape: C4, g = z, chi(g) = -1 (d=2 < n=4), chi^2 = 1, mu = 1
        let g4 = build_group_from_factors(&[4]).unwrap();
        let z4 = g4.abelian.as_ref().unwrap().generators[0];
        let chi4 = Character::from_generator_exponents(&g4, 2, &[1]).unwrap();
        let d = make_datum(&g4, z4, chi4, Cyc::one(&field)).unwrap();
        assert_eq!(classify_type(&d, None).unwrap(), DatumType::VI);
        // mu != 0 with chi^d != 1 rejected: chi of order 4 on C4 with g = z
        // has d = 4 = n, forcing mu = 0; use C8 with g = z^2 instead
        let g8 = build_group_from_factors(&[8]).unwrap();
        let z8 = g8.abelian.as_ref().unwrap().generators[0];
        let gsq = g8.mul(z8, z8); // order 4
        let chi8 = Character::from_generator_exponents(&g8, 8, &[1]).unwrap();
        // chi(g) = zeta_8^2 = i, d = 4 = o(g): mu forced 0; try g = z^4
        let g4th = g8.pow(z8, 4);
        // chi(z^4) = zeta_8^4 = -1: d = 2, n = 2 = d: mu forced 0
        let field8 = CycField::get(8);
        assert!(make_datum(&g8, g4th, chi8.clone(), Cyc::one(&field8)).is_err());
        // g = z^2: d = o(i) = 4 < 8... o(g) = 4 = d, mu forced 0
        assert!(make_datum(&g8, gsq, chi8, Cyc::one(&field8)).is_err());
    }

    #[test]
    fn cyclic_type_table() {
        // C[2,2,4,1,i]: type II
        let d2 = cyclic_datum(4, 2, 1, 4);
        assert_eq!((d2.d, d2.n, d2.m), (2, 2, 4));
        assert_eq!(classify_type(&d2, None).unwrap(), DatumType::II);
        // C[2,4,4,1,-1]: type III
        let d3 = cyclic_datum(4, 1, 2, 4);
        assert_eq!((d3.d, d3.n, d3.m), (2, 4, 2));
        assert_eq!(classify_type(&d3, None).unwrap(), DatumType::III);
    }

    #[test]
    fn no_cyclic_datum_is_type_v() {
        // exhaustive over cyclic data with N <= 12: classify never returns V,
        // and IV appears exactly when d < n and d < m (Lemma-level table)
        for nn in 2u64..=12 {
            let g = build_group_from_factors(&[nn]).unwrap();
            let z = g.abelian.as_ref().unwrap().generators[0];
            for gp in 1..nn {
                let gelt = g.pow(z, gp as i64);
                let n_ord = g.element_order(gelt);
                if n_ord < 2 {
                    continue;
                }
                for chi_exp in 1..nn {
                    let Ok(chi) = Character::from_generator_exponents(&g, nn, &[chi_exp]) else {
                        continue;
                    };
                    if chi.value(gelt) == 0 {
                        continue;
                    }
                    let field = CycField::get(nn);
                    let datum = make_datum(&g, gelt, chi, Cyc::zero(&field)).unwrap();
                    let ty = classify_type(&datum, None).unwrap();
                    assert_ne!(ty.tag(), "V", "N={nn} g=z^{gp} chi_exp={chi_exp}");
                    let expect_iv = datum.d < datum.n && datum.d < datum.m;
                    assert_eq!(ty.tag() == "IV", expect_iv, "N={nn} g=z^{gp} {chi_exp}");
                }
            }
        }
    }

    fn example_3_11_datum() -> GroupDatum {
        // d = 2: G = C16 x C4, g = x^2, chi(x) = q primitive 4th root
        let g = build_group_from_factors(&[16, 4]).unwrap();
        let x = g.abelian.as_ref().unwrap().generators[0];
        let gelt = g.mul(x, x);
        let chi = Character::from_generator_exponents(&g, 4, &[1, 0]).unwrap();
        let field = CycField::get(4);
        make_datum(&g, gelt, chi, Cyc::zero(&field)).unwrap()
    }

    fn example_3_11_sigma(datum: &GroupDatum, m: i64) -> CocycleVector {
        let q_scale = m / 4;
        abelian_cocycle_assemble(&datum.group, m, &[0, 0], &[(0, 1, q_scale)]).unwrap()
    }

    #[test]
    fn example_3_11_is_type_iv() {
        let datum = example_3_11_datum();
        assert_eq!((datum.d, datum.n, datum.m), (2, 8, 4));
        assert_eq!(classify_type(&datum, None).unwrap(), DatumType::IV);
    }

    #[test]
    fn example_3_11_companion_not_isomorphic() {
        let datum = example_3_11_datum();
        let sigma = example_3_11_sigma(&datum, 16);
        let companion = companion_datum(&datum, &sigma).unwrap();
        assert_eq!(classify_type(&companion, None).unwrap(), DatumType::IV);
        assert!(datum_isomorphic(&datum, &companion, &[]).unwrap().is_none());
    }

    fn example_3_14_datum() -> GroupDatum {
        // d = 2: G = C4 x C2, g first generator, chi(g) = -1, chi(h) = 1
        let g = build_group_from_factors(&[4, 2]).unwrap();
        let gelt = g.abelian.as_ref().unwrap().generators[0];
        let chi = Character::from_generator_exponents(&g, 2, &[1, 0]).unwrap();
        let field = CycField::get(2);
        make_datum(&g, gelt, chi, Cyc::zero(&field)).unwrap()
    }

    #[test]
    fn example_3_14_companion_type_iii_not_isomorphic() {
        let datum = example_3_14_datum();
        assert_eq!(classify_type(&datum, None).unwrap(), DatumType::III);
        // sigma(g^a h^b, g^a' h^b') = q^{a b'}, q = -1 primitive d-th root
        let m = 4i64; // exp(G)
        let q_scale = m / 2;
        let sigma =
            abelian_cocycle_assemble(&datum.group, m, &[0, 0], &[(0, 1, q_scale)]).unwrap();
        let companion = companion_datum(&datum, &sigma).unwrap();
        assert_eq!(classify_type(&companion, None).unwrap(), DatumType::III);
        assert!(datum_isomorphic(&datum, &companion, &[]).unwrap().is_none());
    }

    fn example_3_15_datum() -> GroupDatum {
        // d = 2: G = C4 x C4, g first generator, chi(g) = q^2 = -1, q = i
        let g = build_group_from_factors(&[4, 4]).unwrap();
        let gelt = g.abelian.as_ref().unwrap().generators[0];
        let chi = Character::from_generator_exponents(&g, 2, &[1, 0]).unwrap();
        let field = CycField::get(2);
        make_datum(&g, gelt, chi, Cyc::zero(&field)).unwrap()
    }

    #[test]
    fn example_3_15_companion_is_type_v() {
        let datum = example_3_15_datum();
        assert_eq!(classify_type(&datum, None).unwrap(), DatumType::III);
        let m = 4i64;
        let q_scale = m / 4; // q = i = zeta_4
        let sigma =
            abelian_cocycle_assemble(&datum.group, m, &[0, 0], &[(0, 1, q_scale)]).unwrap();
        let companion = companion_datum(&datum, &sigma).unwrap();
        let ty = classify_type(&companion, None).unwrap();
        assert_eq!(ty.tag(), "V");
        // reduce back to type III and recover a datum isomorphic to the start
        if let DatumType::V { witness } = ty {
            let red = reduce(&companion, ReduceMode::TypeV { witness: &witness }).unwrap();
            assert_eq!(classify_type(&red, None).unwrap(), DatumType::III);
        }
    }

    #[test]
    fn companion_with_symmetric_sigma_is_identity() {
        let datum = example_3_14_datum();
        let sigma = CocycleVector::trivial(&datum.group, 4);
        let companion = companion_datum(&datum, &sigma).unwrap();
        // chi' = chi (up to modulus scaling)
        let l = lcm(companion.chi.modulus, datum.chi.modulus);
        for h in datum.group.elements() {
            assert_eq!(
                companion.chi.value(h) as u64 * (l / companion.chi.modulus),
                datum.chi.value(h) as u64 * (l / datum.chi.modulus)
            );
        }
        let iso = datum_isomorphic(&datum, &companion, &[]).unwrap();
        assert!(iso.is_some());
    }

    #[test]
    fn companion_round_trip_restores_chi() {
        let datum = example_3_14_datum();
        let m = 4i64;
        let sigma =
            abelian_cocycle_assemble(&datum.group, m, &[0, 0], &[(0, 1, 2)]).unwrap();
        let companion = companion_datum(&datum, &sigma).unwrap();
        let back = companion_datum(&companion, &sigma.inv()).unwrap();
        let iso = datum_isomorphic(&datum, &back, &[]).unwrap();
        assert!(iso.is_some());
        let l = lcm(back.chi.modulus, datum.chi.modulus);
        for h in datum.group.elements() {
            assert_eq!(
                back.chi.value(h) as u64 * (l / back.chi.modulus),
                datum.chi.value(h) as u64 * (l / datum.chi.modulus)
            );
        }
    }

    #[test]
    fn self_isomorphism_found() {
        let d = cyclic_datum(4, 1, 1, 4);
        let iso = datum_isomorphic(&d, &d, &[]).unwrap().unwrap();
        assert!(iso.delta.is_one());
    }

    #[test]
    fn different_orders_not_isomorphic() {
        let d1 = cyclic_datum(4, 1, 1, 4);
        let d2 = cyclic_datum(2, 1, 1, 2);
        assert!(datum_isomorphic(&d1, &d2, &[]).unwrap().is_none());
    }

    #[test]
    fn classify_invariant_under_relabeling() {
        // rebuild the same group with a permuted table; classification and
        // invariants must be preserved through an explicit isomorphism
        let d1 = cyclic_datum(4, 1, 2, 4); // type III
        let perm: Vec<u32> = vec![2, 0, 3, 1]; // old index -> new index
        let mut table = vec![vec![0u32; 4]; 4];
        for a in 0..4u32 {
            for b in 0..4u32 {
                table[perm[a as usize] as usize][perm[b as usize] as usize] =
                    perm[d1.group.mul(a, b) as usize];
            }
        }
        let g2 = crate::groups::build_group_from_table(&table).unwrap();
        let chi2 = Character::new(
            &g2,
            d1.chi.modulus,
            {
                let mut v = vec![0u64; 4];
                for h in 0..4u32 {
                    v[perm[h as usize] as usize] = d1.chi.value(h);
                }
                v
            },
        )
        .unwrap();
        let d2 = make_datum(
            &g2,
            perm[d1.g as usize],
            chi2,
            Cyc::zero(&CycField::get(4)),
        )
        .unwrap();
        assert_eq!(
            classify_type(&d1, None).unwrap(),
            classify_type(&d2, None).unwrap()
        );
        assert!(datum_isomorphic(&d1, &d2, &[]).unwrap().is_some());
    }

    #[test]
    fn reduce_type_vi() {
        let g4 = build_group_from_factors(&[4]).unwrap();
        let z4 = g4.abelian.as_ref().unwrap().generators[0];
        let chi4 = Character::from_generator_exponents(&g4, 2, &[1]).unwrap();
        let field = CycField::get(2);
        let vi = make_datum(&g4, z4, chi4, Cyc::one(&field)).unwrap();
        let red = reduce(&vi, ReduceMode::TypeVI).unwrap();
        assert_eq!(classify_type(&red, None).unwrap(), DatumType::III);
        assert!(red.mu.is_zero());
        // wrong-mode error
        assert!(reduce(&red, ReduceMode::TypeVI).is_err());
        let w = CocycleVector::trivial(&red.group, 4);
        assert!(reduce(&red, ReduceMode::TypeV { witness: &w }).is_err());
    }
}
