use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::Field;
use crate::error::{Error, Result};

/// The prime-power field `F_q`, `q <= 2^16`, with log/exp tables.
///
/// Elements are integers in `[0, q)`: the base-`p` digits are the
/// coefficients of a polynomial in a primitive element (little-endian).
#[derive(Debug, Clone)]
pub struct BaseField {
    p: u32,
    e: u32,
    q: u32,
    exp: Vec<u16>,
    log: Vec<u32>,
}

const MAX_Q: u32 = 1 << 16;

impl BaseField {
    pub fn new(q: u32) -> Result<Self> {
        if !(2..=MAX_Q).contains(&q) {
            return Err(Error::InvalidField(format!("q = {q} outside [2, 65536]")));
        }
        let p = smallest_prime_factor(q);
        let mut e = 0;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
            e += 1;
        }
        if r != 1 {
            return Err(Error::InvalidField(format!("q = {q} is not a prime power")));
        }
        let (exp, log) = if e == 1 {
            prime_tables(p)
        } else {
            extension_tables(p, e)
        };
        Ok(BaseField { p, e, q, exp, log })
    }

    pub fn binary() -> Self {
        BaseField::new(2).expect("GF(2) is valid")
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of bits needed to store one element.
    pub fn bit_width(&self) -> u32 {
        32 - (self.q - 1).leading_zeros()
    }

    /// Integer `n` mapped into the prime subfield.
    pub fn from_int(&self, n: u64) -> u16 {
        (n % self.p as u64) as u16
    }

    pub fn pow(&self, a: u16, mut n: u64) -> u16 {
        if a == 0 {
            return if n == 0 { 1 } else { 0 };
        }
        n %= (self.q - 1) as u64;
        let l = (self.log[a as usize] as u64 * n) % (self.q - 1) as u64;
        self.exp[l as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        (0..self.q).map(|v| v as u16)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u16 {
        rng.gen_range(0..self.q) as u16
    }
}

impl Field for BaseField {
    type Elem = u16;

    fn one(&self) -> u16 {
        1
    }

    fn add(&self, a: u16, b: u16) -> u16 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.e == 1 {
            return ((a as u32 + b as u32) % self.p) as u16;
        }
        let (mut x, mut y, mut out, mut place) = (a as u32, b as u32, 0u32, 1u32);
        for _ in 0..self.e {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        out as u16
    }

    fn neg(&self, a: u16) -> u16 {
        if self.p == 2 {
            return a;
        }
        if self.e == 1 {
            return ((self.p - a as u32) % self.p) as u16;
        }
        let (mut x, mut out, mut place) = (a as u32, 0u32, 1u32);
        for _ in 0..self.e {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        out as u16
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    fn inv(&self, a: u16) -> Option<u16> {
        if a == 0 {
            return None;
        }
        let l = self.log[a as usize];
        Some(self.exp[((self.q - 1 - l) % (self.q - 1)) as usize])
    }
}

fn smallest_prime_factor(n: u32) -> u32 {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

// exp is doubled so that exp[log a + log b] needs no reduction.
fn build_tables(q: u32, seq: impl Iterator<Item = u32>) -> (Vec<u16>, Vec<u32>) {
    let order = (q - 1) as usize;
    let mut exp = Vec::with_capacity(2 * order);
    let mut log = alloc::vec![0u32; q as usize];
    for (i, v) in seq.take(order).enumerate() {
        exp.push(v as u16);
        log[v as usize] = i as u32;
    }
    let head = exp.clone();
    exp.extend_from_slice(&head);
    (exp, log)
}

fn prime_tables(p: u32) -> (Vec<u16>, Vec<u32>) {
    let g = (1..p)
        .find(|&g| multiplicative_order(p, g) == p - 1)
        .expect("prime fields are cyclic");
    let seq = core::iter::successors(Some(1u32), move |&x| Some(x * g % p));
    build_tables(p, seq)
}

fn multiplicative_order(p: u32, g: u32) -> u32 {
    let mut x = g % p;
    let mut k = 1;
    while x != 1 {
        x = x * g % p;
        k += 1;
        if k > p {
            return 0;
        }
    }
    k
}

// Multiply a base-p digit vector (an element of F_p[x]/(f)) by x.
fn times_x(v: u32, p: u32, e: u32, f: &[u32]) -> u32 {
    let place = p.pow(e - 1);
    let top = v / place;
    let shifted = (v % place) * p;
    if top == 0 {
        return shifted;
    }
    let (mut out, mut pl, mut s) = (0u32, 1u32, shifted);
    for &fi in f.iter().take(e as usize) {
        let d = s % p;
        s /= p;
        let sub = (top * fi) % p;
        out += ((d + p - sub) % p) * pl;
        pl *= p;
    }
    out
}

fn extension_tables(p: u32, e: u32) -> (Vec<u16>, Vec<u32>) {
    let q = p.pow(e);
    // Monic f = x^e + sum f_i x^i; search the lexicographically smallest primitive one.
    for code in 1..q {
        let f: Vec<u32> = (0..e).map(|i| (code / p.pow(i)) % p).collect();
        if f[0] == 0 {
            continue;
        }
        let mut x = 1u32;
        let mut order = 0u32;
        loop {
            x = times_x(x, p, e, &f);
            order += 1;
            if x == 1 || order >= q - 1 {
                break;
            }
        }
        if x == 1 && order == q - 1 {
            let seq = core::iter::successors(Some(1u32), move |&v| Some(times_x(v, p, e, &f)));
            return build_tables(q, seq);
        }
    }
    unreachable!("a primitive polynomial exists for every degree")
}
