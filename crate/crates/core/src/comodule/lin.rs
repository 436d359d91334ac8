//! Sparse linear combinations over a cyclotomic field, keyed by basis index
//! (or index pairs/triples for tensor squares and cubes).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::linalg::cyclotomic::{Cyc, CycField};

pub type Lin = BTreeMap<usize, Cyc>;
pub type Lin2 = BTreeMap<(usize, usize), Cyc>;
pub type Lin3 = BTreeMap<(usize, usize, usize), Cyc>;

pub fn lin_insert<K: Ord>(map: &mut BTreeMap<K, Cyc>, key: K, val: Cyc) {
    if val.is_zero() {
        return;
    }
    match map.remove(&key) {
        None => {
            map.insert(key, val);
        }
        Some(cur) => {
            let sum = cur.add(&val);
            if !sum.is_zero() {
                map.insert(key, sum);
            }
        }
    }
}

pub fn lin_scale<K: Ord + Clone>(map: &BTreeMap<K, Cyc>, c: &Cyc) -> BTreeMap<K, Cyc> {
    if c.is_zero() {
        return BTreeMap::new();
    }
    map.iter()
        .map(|(k, v)| (k.clone(), v.mul(c)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

pub fn lin_add<K: Ord + Clone>(a: &BTreeMap<K, Cyc>, b: &BTreeMap<K, Cyc>) -> BTreeMap<K, Cyc> {
    let mut out = a.clone();
    for (k, v) in b {
        lin_insert(&mut out, k.clone(), v.clone());
    }
    out
}

pub fn lin_eq<K: Ord>(a: &BTreeMap<K, Cyc>, b: &BTreeMap<K, Cyc>) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|((k1, v1), (k2, v2))| k1 == k2 && v1 == v2)
}

pub fn lin_single(field: &Arc<CycField>, k: usize) -> Lin {
    let mut m = BTreeMap::new();
    m.insert(k, Cyc::one(field));
    m
}

/// Bilinear extension of a basis product to linear combinations.
pub fn lin_mul(a: &Lin, b: &Lin, mut basis_mul: impl FnMut(usize, usize) -> Lin) -> Lin {
    let mut out = Lin::new();
    for (&p, ca) in a {
        for (&q, cb) in b {
            let c = ca.mul(cb);
            for (k, v) in basis_mul(p, q) {
                lin_insert(&mut out, k, v.mul(&c));
            }
        }
    }
    out
}

/// Product in a tensor-square algebra: components multiply independently.
pub fn lin2_mul(
    a: &Lin2,
    b: &Lin2,
    mut mul_left: impl FnMut(usize, usize) -> Lin,
    mut mul_right: impl FnMut(usize, usize) -> Lin,
) -> Lin2 {
    let mut out = Lin2::new();
    for (&(p1, p2), ca) in a {
        for (&(q1, q2), cb) in b {
            let c = ca.mul(cb);
            let left = mul_left(p1, q1);
            let right = mul_right(p2, q2);
            for (&k1, v1) in &left {
                for (&k2, v2) in &right {
                    lin_insert(&mut out, (k1, k2), v1.mul(v2).mul(&c));
                }
            }
        }
    }
    out
}
