//! Dense polynomials over the base field, used only to validate moduli.

use alloc::vec;
use alloc::vec::Vec;

use super::{BaseField, Field};

fn trim(mut a: Vec<u16>) -> Vec<u16> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn rem(f: &BaseField, a: &[u16], m: &[u16]) -> Vec<u16> {
    let mut a = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = f.inv(m[dm]).expect("modulus is nonzero");
    while a.len() > dm {
        let da = a.len() - 1;
        let c = f.mul(a[da], lead_inv);
        for (j, &mj) in m.iter().enumerate() {
            let idx = da - dm + j;
            a[idx] = f.sub(a[idx], f.mul(c, mj));
        }
        a = trim(a);
    }
    a
}

fn mulmod(f: &BaseField, a: &[u16], b: &[u16], m: &[u16]) -> Vec<u16> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u16; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = f.add(prod[i + j], f.mul(ai, bj));
        }
    }
    rem(f, &prod, m)
}

fn powmod(f: &BaseField, a: &[u16], mut e: u64, m: &[u16]) -> Vec<u16> {
    let mut result = vec![1u16];
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(f, &result, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    result
}

fn gcd(f: &BaseField, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    a
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's test: `modulus` (little-endian, monic of degree m >= 1) is
/// irreducible iff `x^(q^m) = x mod f` and `gcd(x^(q^(m/r)) - x, f) = 1` for
/// every prime `r | m`.
pub(crate) fn is_irreducible(f: &BaseField, modulus: &[u16]) -> bool {
    let modulus = trim(modulus.to_vec());
    if modulus.len() < 2 {
        return false;
    }
    let m = modulus.len() - 1;
    if m == 1 {
        return true;
    }
    let q = f.order() as u64;
    let x = vec![0u16, 1];
    // frob[i] = x^(q^i) mod f
    let mut frob = Vec::with_capacity(m + 1);
    frob.push(rem(f, &x, &modulus));
    for i in 0..m {
        let next = powmod(f, &frob[i], q, &modulus);
        frob.push(next);
    }
    if frob[m] != rem(f, &x, &modulus) {
        return false;
    }
    for r in prime_divisors(m) {
        let mut h = frob[m / r].clone();
        h.resize(h.len().max(2), 0);
        h[1] = f.sub(h[1], 1);
        let g = gcd(f, &trim(h), &modulus);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classifies_small_binary_polynomials() {
        let f = BaseField::binary();
        assert!(is_irreducible(&f, &[1, 1, 0, 1])); // x^3 + x + 1
        assert!(is_irreducible(&f, &[1, 1, 1])); // x^2 + x + 1
        assert!(!is_irreducible(&f, &[1, 0, 1])); // (x + 1)^2
        assert!(!is_irreducible(&f, &[1, 1, 1, 1, 1, 1, 1])); // x^6+..+1 = (x^7-1)/(x-1)
        assert!(!is_irreducible(&f, &[1, 0, 1, 0, 1])); // (x^2+x+1)^2
    }

    #[test]
    fn matches_brute_force_count_over_gf3() {
        // Number of monic irreducible quadratics and cubics over F_3: 3 and 8.
        let f = BaseField::new(3).unwrap();
        for (deg, expected) in [(2usize, 3usize), (3, 8)] {
            let mut count = 0;
            for code in 0..3usize.pow(deg as u32) {
                let mut p: Vec<u16> = (0..deg)
                    .map(|i| ((code / 3usize.pow(i as u32)) % 3) as u16)
                    .collect();
                p.push(1);
                if is_irreducible(&f, &p) {
                    count += 1;
                }
            }
            assert_eq!(count, expected);
        }
    }
}
