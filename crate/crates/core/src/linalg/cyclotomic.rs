//! Exact arithmetic in cyclotomic fields Q(zeta_M).
//!
//! Elements are vectors of rationals of length phi(M) in the power basis,
//! reduced modulo the M-th cyclotomic polynomial, so equality is coefficient
//! equality.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::arith::euler_phi;
use crate::error::{Error, Result};

/// The field Q(zeta_M); shared, immutable, cached per modulus.
pub struct CycField {
    pub modulus: u64,
    pub phi: usize,
    /// monic cyclotomic polynomial Phi_M, coefficients c_0..c_phi, c_phi = 1
    pub poly: Vec<BigInt>,
}

static FIELDS: Lazy<Mutex<HashMap<u64, Arc<CycField>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

impl CycField {
    pub fn get(modulus: u64) -> Arc<CycField> {
        assert!(modulus >= 1);
        let mut cache = FIELDS.lock().unwrap();
        cache
            .entry(modulus)
            .or_insert_with(|| {
                Arc::new(CycField {
                    modulus,
                    phi: euler_phi(modulus) as usize,
                    poly: cyclotomic_polynomial(modulus),
                })
            })
            .clone()
    }
}

/// Integer-coefficient Phi_M by dividing x^M - 1 by Phi_d for proper d | M.
fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    let mut num = vec![BigInt::zero(); m as usize + 1];
    num[0] = -BigInt::one();
    num[m as usize] = BigInt::one();
    for d in crate::arith::divisors(m) {
        if d == m {
            continue;
        }
        let phi_d = cyclotomic_polynomial(d);
        num = poly_div_exact(&num, &phi_d);
    }
    num
}

/// Exact division of integer polynomials (divisor monic).
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    assert!(b[db].is_one());
    let da = rem.len() - 1;
    let mut quot = vec![BigInt::zero(); da - db + 1];
    for i in (db..=da).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - db] = c.clone();
        for j in 0..=db {
            let t = &b[j] * &c;
            rem[i - db + j] -= t;
        }
    }
    assert!(rem.iter().all(|x| x.is_zero()), "non-exact poly division");
    quot
}

/// An element of Q(zeta_M).
#[derive(Clone)]
pub struct Cyc {
    pub field: Arc<CycField>,
    /// length phi(M)
    pub coeffs: Vec<BigRational>,
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Self) -> bool {
        self.field.modulus == other.field.modulus && self.coeffs == other.coeffs
    }
}
impl Eq for Cyc {}

impl std::fmt::Debug for Cyc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self)
    }
}

impl std::fmt::Display for Cyc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = match i {
                0 => format!("{c}"),
                1 => {
                    if c.is_one() {
                        "z".into()
                    } else {
                        format!("{c}*z")
                    }
                }
                _ => {
                    if c.is_one() {
                        format!("z^{i}")
                    } else {
                        format!("{c}*z^{i}")
                    }
                }
            };
            parts.push(term);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl Cyc {
    pub fn zero(field: &Arc<CycField>) -> Self {
        Cyc {
            field: field.clone(),
            coeffs: vec![BigRational::zero(); field.phi],
        }
    }

    pub fn one(field: &Arc<CycField>) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_rational(field: &Arc<CycField>, q: BigRational) -> Self {
        let mut c = Self::zero(field);
        if field.phi > 0 {
            c.coeffs[0] = q;
        }
        c
    }

    pub fn from_i64(field: &Arc<CycField>, n: i64) -> Self {
        Self::from_rational(field, BigRational::from(BigInt::from(n)))
    }

    /// zeta_M^e
    pub fn root_of_unity(field: &Arc<CycField>, e: i64) -> Self {
        let m = field.modulus as i64;
        let e = e.rem_euclid(m) as usize;
        let mut raw = vec![BigRational::zero(); e + 1];
        raw[e] = BigRational::one();
        Self::reduce_raw(field, raw)
    }

    fn reduce_raw(field: &Arc<CycField>, mut raw: Vec<BigRational>) -> Self {
        let phi = field.phi;
        let poly = &field.poly;
        let mut deg = raw.len();
        while deg > phi {
            let i = deg - 1;
            let c = raw[i].clone();
            if !c.is_zero() {
                raw[i] = BigRational::zero();
                for j in 0..phi {
                    let t = BigRational::from(poly[j].clone()) * &c;
                    raw[i - phi + j] -= t;
                }
            }
            deg -= 1;
        }
        raw.resize(phi, BigRational::zero());
        Cyc {
            field: field.clone(),
            coeffs: raw,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        if self.field.phi == 0 {
            return true;
        }
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        assert_eq!(self.field.modulus, other.field.modulus);
        Cyc {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        assert_eq!(self.field.modulus, other.field.modulus);
        Cyc {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        assert_eq!(self.field.modulus, other.field.modulus);
        let phi = self.field.phi;
        if phi == 0 {
            return Self::zero(&self.field);
        }
        let mut raw = vec![BigRational::zero(); 2 * phi];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] += a * b;
            }
        }
        Self::reduce_raw(&self.field, raw)
    }

    pub fn scale(&self, q: &BigRational) -> Cyc {
        Cyc {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|a| a * q).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Cyc {
        let mut base = self.clone();
        let mut acc = Cyc::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via extended Euclid in Q[x] modulo Phi_M.
    pub fn inverse(&self) -> Result<Cyc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let phi = self.field.phi;
        let modulus: Vec<BigRational> = self
            .field
            .poly
            .iter()
            .map(|c| BigRational::from(c.clone()))
            .collect();
        // extended gcd of (self, Phi): s*self + t*Phi = gcd (a unit)
        let mut r0 = modulus;
        let mut r1: Vec<BigRational> = self.coeffs.clone();
        trim(&mut r1);
        let mut s0 = vec![BigRational::zero()];
        let mut s1 = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            trim(&mut r1);
        }
        // r0 is the gcd: must be a nonzero constant since Phi_M is irreducible
        if r0.len() != 1 {
            return Err(Error::Linalg(
                "cyclotomic inverse: gcd not constant".into(),
            ));
        }
        let c = r0[0].clone();
        let inv_coeffs: Vec<BigRational> = s0.iter().map(|a| a / &c).collect();
        Ok(Self::reduce_raw(&self.field, inv_coeffs).truncate(phi))
    }

    fn truncate(mut self, phi: usize) -> Self {
        self.coeffs.resize(phi, BigRational::zero());
        self
    }

    /// Reinterpret in Q(zeta_M2) for M | M2 via zeta_M = zeta_M2^{M2/M}.
    pub fn promote(&self, field2: &Arc<CycField>) -> Result<Cyc> {
        let m = self.field.modulus;
        let m2 = field2.modulus;
        if m == m2 {
            return Ok(Cyc {
                field: field2.clone(),
                coeffs: self.coeffs.clone(),
            });
        }
        if m2 % m != 0 {
            return Err(Error::ModulusMismatch(m, m2));
        }
        let k = (m2 / m) as usize;
        let mut raw = vec![BigRational::zero(); (self.field.phi - 1).max(0) * k + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                raw[i * k] = c.clone();
            }
        }
        Ok(Self::reduce_raw(field2, raw))
    }

    /// Common denominator of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        let mut d = BigInt::one();
        for c in &self.coeffs {
            d = num::Integer::lcm(&d, c.denom());
        }
        d.abs()
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while let Some(last) = p.last() {
        if last.is_zero() {
            p.pop();
        } else {
            break;
        }
    }
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    let mut out = out;
    trim(&mut out);
    out
}

fn poly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem: Vec<BigRational> = a.to_vec();
    trim(&mut rem);
    let db = b.len() - 1;
    let lead = &b[db];
    if rem.len() <= db {
        return (vec![], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (db..rem.len()).rev() {
        let c = &rem[i] / lead;
        if c.is_zero() {
            continue;
        }
        quot[i - db] = c.clone();
        for j in 0..=db {
            let t = &b[j] * &c;
            rem[i - db + j] -= t;
        }
    }
    trim(&mut rem);
    (quot, rem)
}
