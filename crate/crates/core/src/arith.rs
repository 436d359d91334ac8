//! Small integer arithmetic helpers used throughout the crate.

/// Greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Extended gcd over i128: returns (g, x, y) with a*x + b*y = g, g >= 0.
pub fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Inverse of `a` modulo `m` (m >= 1), if gcd(a, m) = 1.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = egcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some((x.rem_euclid(m as i128)) as i64)
}

/// Euler totient by trial division.
pub fn euler_phi(n: u64) -> u64 {
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant factors d_1 | d_2 | ... of the direct sum of cyclic groups of
/// the given orders (orders 1 are dropped).
pub fn invariant_factors_of_cyclic_orders(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    // per prime, exponents sorted descending
    let mut by_prime: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in orders {
        for (p, e) in factorize(n) {
            by_prime.entry(p).or_default().push(e);
        }
    }
    let mut depth = 0;
    for v in by_prime.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
        depth = depth.max(v.len());
    }
    // factor k (0 = largest) = product of k-th largest prime powers
    let mut factors = vec![1u64; depth];
    for (p, exps) in &by_prime {
        for (k, &e) in exps.iter().enumerate() {
            factors[k] *= p.pow(e);
        }
    }
    factors.retain(|&d| d > 1);
    factors.reverse(); // ascending: d_1 | d_2 | ...
    factors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_lcm_basics() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(gcd(0, 5), 5);
        assert_eq!(lcm(4, 6), 12);
    }

    #[test]
    fn egcd_identity() {
        for a in -20i128..20 {
            for b in -20i128..20 {
                let (g, x, y) = egcd(a, b);
                assert_eq!(a * x + b * y, g);
                assert!(g >= 0);
            }
        }
    }

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(euler_phi(16), 8);
        assert_eq!(euler_phi(17), 16);
    }

    #[test]
    fn invariant_factor_merge() {
        assert_eq!(invariant_factors_of_cyclic_orders(&[16, 4]), vec![4, 16]);
        assert_eq!(invariant_factors_of_cyclic_orders(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors_of_cyclic_orders(&[2, 2]), vec![2, 2]);
        assert_eq!(invariant_factors_of_cyclic_orders(&[1, 1]), Vec::<u64>::new());
        assert_eq!(invariant_factors_of_cyclic_orders(&[6, 4]), vec![2, 12]);
    }
}
