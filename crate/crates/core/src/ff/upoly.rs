//! Dense univariate polynomials over a prime field, low degree first.
//!
//! Only what the irreducibility test and the schoolbook extension-field
//! multiply need. Every function returns a trimmed vector (no trailing
//! zeros); the zero polynomial is the empty vector.

pub(crate) fn trim(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn sub(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let n = f.len().max(g.len());
    let out = (0..n)
        .map(|i| {
            let a = f.get(i).copied().unwrap_or(0);
            let b = g.get(i).copied().unwrap_or(0);
            (a + p - b) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of `f` divided by `g` (`g` nonzero).
pub(crate) fn rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let g = trim(g.to_vec());
    assert!(!g.is_empty(), "division by the zero polynomial");
    let mut r = trim(f.to_vec());
    let lead_inv = mod_inv(*g.last().unwrap(), p);
    while r.len() >= g.len() {
        let shift = r.len() - g.len();
        let factor = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &c) in g.iter().enumerate() {
            let idx = shift + i;
            r[idx] = (r[idx] + p - mul_mod(factor, c, p)) % p;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(f.to_vec());
    let mut b = trim(g.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        let inv = mod_inv(lead, p);
        for c in a.iter_mut() {
            *c = mul_mod(*c, inv, p);
        }
    }
    a
}

/// `t^(p^k) mod f` by repeated p-th powering.
fn frobenius_power(f: &[u64], k: u64, p: u64) -> Vec<u64> {
    let mut x = rem(&[0, 1], f, p);
    for _ in 0..k {
        x = pow_mod_poly(&x, p, f, p);
    }
    x
}

pub(crate) fn pow_mod_poly(base: &[u64], mut exp: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], f, p);
    let mut b = rem(base, f, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &b, p), f, p);
        }
        b = rem(&mul(&b, &b, p), f, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `f` by the extended Euclidean algorithm, if it exists.
pub(crate) fn inv_mod_poly(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    // invariant: s_i * a = r_i (mod f)
    let (mut r0, mut r1) = (trim(f.to_vec()), rem(a, f, p));
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (quot, r2) = div_rem(&r0, &r1, p);
        let s2 = sub(&s0, &mul(&quot, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = mod_inv(r0[0], p);
    Some(rem(&s0.iter().map(|&c| mul_mod(c, inv, p)).collect::<Vec<_>>(), f, p))
}

fn div_rem(f: &[u64], g: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = trim(f.to_vec());
    if r.len() < g.len() {
        return (Vec::new(), r);
    }
    let mut quot = vec![0u64; r.len() - g.len() + 1];
    let lead_inv = mod_inv(*g.last().unwrap(), p);
    while r.len() >= g.len() {
        let shift = r.len() - g.len();
        let factor = mul_mod(*r.last().unwrap(), lead_inv, p);
        quot[shift] = factor;
        for (i, &c) in g.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - mul_mod(factor, c, p)) % p;
        }
        r = trim(r);
    }
    (trim(quot), r)
}

pub(crate) fn prime_divisors(mut n: u64) -> Vec<u64> {
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

/// Rabin's test: `f` (monic, degree m) divides `t^(p^m) - t` and is coprime to
/// `t^(p^(m/d)) - t` for every prime `d | m`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let f = trim(f.to_vec());
    if f.len() < 2 {
        return false;
    }
    let m = (f.len() - 1) as u64;
    let t = [0, 1];
    let full = sub(&frobenius_power(&f, m, p), &t, p);
    if !rem(&full, &f, p).is_empty() {
        return false;
    }
    for d in prime_divisors(m) {
        let partial = sub(&frobenius_power(&f, m / d, p), &t, p);
        if gcd(&f, &partial, p).len() != 1 {
            return false;
        }
    }
    true
}

pub(crate) fn has_root(f: &[u64], p: u64) -> bool {
    (0..p).any(|x| {
        let v = f.iter().rev().fold(0u64, |acc, &c| (mul_mod(acc, x, p) + c) % p);
        v == 0
    })
}
