//! Finite fields `F_{p^k}` with log/exp tables.
//!
//! An element is encoded as the integer whose base-`p` digits are its
//! coefficients in the power basis `1, z, …, z^{k-1}`, where `z` is a root of
//! the field's defining polynomial. The defining polynomial is the
//! lexicographically smallest monic primitive polynomial of degree `k`, so
//! `z` generates the multiplicative group.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::field::Field;
use crate::error::{Error, Result};

/// Largest field order built with tables.
pub const MAX_ORDER: u64 = 1 << 22;

pub struct GF {
    pub p: u64,
    pub k: u32,
    pub q: u64,
    /// Coefficients `c_0..c_{k-1}` of the defining polynomial `z^k + Σ c_i z^i`.
    pub modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for GF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for GF {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}
impl Eq for GF {}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn digits(mut x: u64, p: u64, k: u32) -> Vec<u64> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u64], p: u64) -> u64 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Multiplies a digit vector by `z` modulo the defining polynomial.
fn times_z(v: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = v.len();
    let top = v[k - 1];
    let mut out = vec![0; k];
    for i in (1..k).rev() {
        out[i] = v[i - 1];
    }
    for i in 0..k {
        out[i] = (out[i] + p - (top * modulus[i]) % p) % p;
    }
    out
}

impl GF {
    /// Shared instance of `F_{p^k}`.
    pub fn get(p: u64, k: u32) -> Result<Arc<GF>> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u32), Arc<GF>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&(p, k)) {
            return Ok(f.clone());
        }
        let f = Arc::new(GF::build(p, k)?);
        cache.lock().unwrap().insert((p, k), f.clone());
        Ok(f)
    }

    fn build(p: u64, k: u32) -> Result<GF> {
        if !is_prime(p) || k == 0 {
            return Err(Error::Input(format!("F_{p}^{k} is not a finite field")));
        }
        let q = p
            .checked_pow(k)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::UnsupportedResidue(format!("F_{p}^{k} is too large")))?;
        for code in 0..q {
            let modulus = digits(code, p, k);
            if modulus[0] == 0 {
                continue;
            }
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut log = vec![u32::MAX; q as usize];
            let mut cur = digits(1, p, k);
            let mut ok = true;
            for i in 0..q - 1 {
                let c = undigits(&cur, p);
                if log[c as usize] != u32::MAX {
                    ok = false;
                    break;
                }
                log[c as usize] = i as u32;
                exp.push(c as u32);
                cur = times_z(&cur, &modulus, p);
            }
            if ok && undigits(&cur, p) == 1 {
                return Ok(GF { p, k, q, modulus, exp, log });
            }
        }
        unreachable!("a primitive polynomial always exists")
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q as u32
    }

    /// The generator `z` (a root of the defining polynomial).
    pub fn generator(&self) -> u32 {
        if self.k == 1 {
            self.exp[1 % self.exp.len()]
        } else {
            self.p as u32
        }
    }

    pub fn digits_of(&self, a: u32) -> Vec<u64> {
        digits(a as u64, self.p, self.k)
    }

    /// Element with the given power-basis coefficients (at most `k` of them).
    pub fn from_digits(&self, d: &[u64]) -> u32 {
        assert!(d.len() <= self.k as usize, "too many digits");
        let v: Vec<u64> = d.iter().map(|c| c % self.p).collect();
        undigits(&v, self.p) as u32
    }

    /// Whether `a` lies in the subfield `F_{p^j}`.
    pub fn in_subfield(&self, a: u32, j: u32) -> bool {
        self.f_pow(&a, self.p.pow(j)) == a
    }

    /// Embedding table `F_{p^a} → self` for `a | k`, sending the generator of
    /// the small field to the smallest root of its defining polynomial.
    pub fn embedding_from(&self, small: &GF) -> Result<Vec<u32>> {
        if small.p != self.p || self.k % small.k != 0 {
            return Err(Error::ResidueMismatch);
        }
        if small.k == 1 {
            return Ok((0..small.q as u32).collect());
        }
        let root = self
            .elements()
            .find(|&r| {
                let mut acc = self.f_pow(&r, small.k as u64);
                let mut rp = 1u32;
                for &c in &small.modulus {
                    acc = self.f_add(&acc, &self.f_mul(&(c as u32), &rp));
                    rp = self.f_mul(&rp, &r);
                }
                acc == 0
            })
            .expect("subfield root exists");
        Ok((0..small.q as u32)
            .map(|x| {
                let d = small.digits_of(x);
                let mut acc = 0u32;
                let mut rp = 1u32;
                for c in d {
                    acc = self.f_add(&acc, &self.f_mul(&(c as u32), &rp));
                    rp = self.f_mul(&rp, &root);
                }
                acc
            })
            .collect())
    }

    pub fn format(&self, a: u32) -> String {
        if self.k == 1 {
            return a.to_string();
        }
        let d = self.digits_of(a);
        let mut parts = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            parts.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }

    /// Parses the output of [`GF::format`], or a plain integer mod `p`.
    pub fn parse(&self, s: &str) -> Result<u32> {
        let s = s.trim();
        let bad = || Error::Input(format!("not an element of F_{}^{}: {s:?}", self.p, self.k));
        let mut d = vec![0u64; self.k as usize];
        for term in s.split('+') {
            let term = term.trim();
            let (c, mono) = match term.split_once('*') {
                Some((c, m)) => (c.trim().parse::<i64>().map_err(|_| bad())?, m.trim()),
                None if term.starts_with('z') => (1, term),
                None => (term.parse::<i64>().map_err(|_| bad())?, ""),
            };
            let i = match mono {
                "" => 0,
                "z" => 1,
                m => m.strip_prefix("z^").and_then(|e| e.parse().ok()).ok_or_else(bad)?,
            };
            if i >= self.k as usize {
                return Err(bad());
            }
            d[i] = (d[i] + c.rem_euclid(self.p as i64) as u64) % self.p;
        }
        Ok(undigits(&d, self.p) as u32)
    }
}

impl GF {

    pub fn f_add(&self, a: &u32, b: &u32) -> u32 {
        let (p, mut x, mut y) = (self.p as u32, *a, *b);
        if p == 2 {
            return x ^ y;
        }
        if self.k == 1 {
            return (x + y) % p;
        }
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        out
    }
    pub fn f_neg(&self, a: &u32) -> u32 {
        let (p, mut x) = (self.p as u32, *a);
        if p == 2 {
            return x;
        }
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        out
    }
    pub fn f_mul(&self, a: &u32, b: &u32) -> u32 {
        if *a == 0 || *b == 0 {
            return 0;
        }
        let n = self.q as usize - 1;
        let i = (self.log[*a as usize] as usize + self.log[*b as usize] as usize) % n;
        self.exp[i]
    }
    pub fn f_inv(&self, a: &u32) -> Option<u32> {
        if *a == 0 {
            return None;
        }
        let n = self.q as usize - 1;
        Some(self.exp[(n - self.log[*a as usize] as usize) % n])
    }
    pub fn f_pow(&self, a: &u32, k: u64) -> u32 {
        if k == 0 {
            return 1;
        }
        if *a == 0 {
            return 0;
        }
        let n = (self.q - 1) as u128;
        let i = (self.log[*a as usize] as u128 * (k as u128 % n)) % n;
        self.exp[i as usize]
    }
}

impl Field for Arc<GF> {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.f_add(a, b)
    }
    fn neg(&self, a: &u32) -> u32 {
        self.f_neg(a)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.f_mul(a, b)
    }
    fn inv(&self, a: &u32) -> Option<u32> {
        self.f_inv(a)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn pow(&self, a: &u32, k: u64) -> u32 {
        self.f_pow(a, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for (p, k) in [(2, 1), (2, 2), (3, 2), (5, 1), (2, 4)] {
            let f = GF::get(p, k).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(&a, &f.neg(&a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(&a, &b), f.add(&b, &a));
                    let c = f.generator();
                    assert_eq!(
                        f.mul(&a, &f.add(&b, &c)),
                        f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                    );
                }
            }
        }
    }

    #[test]
    fn f4_is_z_squared_plus_z_plus_one() {
        let f = GF::get(2, 2).unwrap();
        assert_eq!(f.modulus, vec![1, 1]);
        let z = f.generator();
        assert_eq!(f.add(&f.add(&f.mul(&z, &z), &z), &1), 0);
        assert!(!f.in_subfield(z, 1));
        assert!(f.in_subfield(1, 1));
    }

    #[test]
    fn prime_field_encoding_is_the_integer() {
        let f = GF::get(7, 1).unwrap();
        assert_eq!(f.mul(&3, &5), 1);
        assert_eq!(f.add(&6, &3), 2);
        assert_eq!(f.from_int(-1), 6);
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let big = GF::get(2, 4).unwrap();
        let small = GF::get(2, 2).unwrap();
        let emb = big.embedding_from(&small).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb[small.mul(&a, &b) as usize], big.mul(&emb[a as usize], &emb[b as usize]));
                assert_eq!(emb[small.add(&a, &b) as usize], big.add(&emb[a as usize], &emb[b as usize]));
            }
        }
        assert!(big.embedding_from(&GF::get(2, 3).unwrap()).is_err());
    }

    #[test]
    fn format_parse_round_trip() {
        let f = GF::get(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse(&f.format(a)).unwrap(), a);
        }
    }
}
