use alloc::vec;
use alloc::vec::Vec;

use super::poly::is_irreducible;
use super::BaseField;

/// Middle exponents of the default binary moduli: entry `m - 1` lists the
/// exponents strictly between `0` and `m` of `x^m + ... + 1`: the irreducible
/// trinomial with the smallest middle exponent, otherwise the pentanomial
/// whose middle exponents are smallest compared from the top down.
const BINARY: &[&[u8]] = &[
    &[],
    &[1],
    &[1],
    &[1],
    &[2],
    &[1],
    &[1],
    &[1, 3, 4],
    &[1],
    &[3],
    &[2],
    &[3],
    &[1, 3, 4],
    &[5],
    &[1],
    &[1, 3, 5],
    &[3],
    &[3],
    &[1, 2, 5],
    &[3],
    &[2],
    &[1],
    &[5],
    &[1, 3, 4],
    &[3],
    &[1, 3, 4],
    &[1, 2, 5],
    &[1],
    &[2],
    &[1],
    &[3],
    &[2, 3, 7],
    &[10],
    &[7],
    &[2],
    &[9],
    &[1, 4, 6],
    &[1, 5, 6],
    &[4],
    &[3, 4, 5],
    &[3],
    &[7],
    &[3, 4, 6],
    &[5],
    &[1, 3, 4],
    &[1],
    &[5],
    &[2, 3, 5],
    &[9],
    &[2, 3, 4],
    &[1, 3, 6],
    &[3],
    &[1, 2, 6],
    &[9],
    &[7],
    &[2, 4, 7],
    &[4],
    &[19],
    &[2, 4, 7],
    &[1],
    &[1, 2, 5],
    &[29],
    &[1],
    &[1, 3, 4],
];

/// Exponents (excluding `m` and `0`) of the default binary modulus of degree `m`.
pub fn binary_modulus_exponents(m: usize) -> Option<&'static [u8]> {
    BINARY.get(m.checked_sub(1)?).copied()
}

pub(crate) fn default_modulus(base: &BaseField, m: usize) -> Vec<u16> {
    if base.order() == 2 {
        if let Some(exps) = binary_modulus_exponents(m) {
            let mut f = vec![0u16; m + 1];
            f[0] = 1;
            f[m] = 1;
            for &e in exps {
                f[e as usize] = 1;
            }
            return f;
        }
    }
    smallest_irreducible(base, m)
}

/// Smallest monic irreducible of degree `m` in graded order: candidates are
/// grouped by their largest coefficient label `h = 1, 2, ...` and, within a
/// group, ordered as base-`(h + 1)` integers with the constant term least
/// significant. For small `q` this keeps low-label coefficients, and for large
/// `q` it avoids sweeping the whole field through one coefficient.
pub(crate) fn smallest_irreducible(base: &BaseField, m: usize) -> Vec<u16> {
    let q = base.order() as u64;
    for h in 1..q {
        let radix = h + 1;
        let total = radix.saturating_pow(m as u32);
        for code in 0..total {
            let mut f = Vec::with_capacity(m + 1);
            let mut c = code;
            for _ in 0..m {
                f.push((c % radix) as u16);
                c /= radix;
            }
            if !f.contains(&(h as u16)) || f[0] == 0 {
                continue;
            }
            f.push(1);
            if is_irreducible(base, &f) {
                return f;
            }
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

#[cfg(test)]
pub(crate) fn lowest_weight_binary(m: usize) -> Vec<u8> {
    let base = BaseField::binary();
    let build = |exps: &[usize]| {
        let mut f = vec![0u16; m + 1];
        f[0] = 1;
        f[m] = 1;
        for &e in exps {
            f[e] = 1;
        }
        f
    };
    for a in 1..m {
        if is_irreducible(&base, &build(&[a])) {
            return vec![a as u8];
        }
    }
    for c in 3..m {
        for b in 2..c {
            for a in 1..b {
                if is_irreducible(&base, &build(&[a, b, c])) {
                    return vec![a as u8, b as u8, c as u8];
                }
            }
        }
    }
    unreachable!("a pentanomial exists for every degree up to 64")
}
