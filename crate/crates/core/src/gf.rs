//! Arithmetic in GF(p^e), polynomial basis over GF(p).
//!
//! Elements are coefficient vectors of length `e`, least significant
//! first. The modulus is the lexicographically smallest monic irreducible
//! polynomial of degree `e`, found by trial division.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("element {0:?} does not belong to {1}")]
    Mismatch(Vec<u32>, String),
    #[error("zero has no inverse")]
    DivisionByZero,
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power_decomposition(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Polynomials over GF(p) as coefficient vectors, least significant first,
/// trimmed of trailing zeros.
mod poly {
    pub fn trim(mut a: Vec<u32>) -> Vec<u32> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(base: u32, mut exp: u32, p: u32) -> u32 {
        let mut acc = 1u64;
        let mut b = base as u64 % p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * b % p as u64;
            }
            b = b * b % p as u64;
            exp >>= 1;
        }
        acc as u32
    }

    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p) as u64;
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let factor = *r.last().unwrap() as u64 * lead_inv % p as u64;
            for (i, &c) in m.iter().enumerate() {
                let sub = factor * c as u64 % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            r = trim(r);
        }
        r
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        trim(out.into_iter().map(|x| x as u32).collect())
    }

    /// The `index`-th monic polynomial of the given degree, counting the
    /// lower coefficients as base-p digits with the constant term least
    /// significant.
    pub fn monic(degree: usize, p: u32, index: u64) -> Vec<u32> {
        let mut c = Vec::with_capacity(degree + 1);
        let mut x = index;
        for _ in 0..degree {
            c.push((x % p as u64) as u32);
            x /= p as u64;
        }
        c.push(1);
        c
    }

    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let degree = f.len() - 1;
        for d in 1..=degree / 2 {
            let count = (p as u64).pow(d as u32);
            for idx in 0..count {
                if rem(f, &monic(d, p, idx), p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    /// Monic irreducible modulus, `e + 1` coefficients, constant first.
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    pub fn new(q: u64) -> Result<Self, GfError> {
        let (p, e) = prime_power_decomposition(q).ok_or(GfError::NotPrimePower(q))?;
        let p = p as u32;
        let count = (p as u64).pow(e);
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..count)
                .map(|idx| poly::monic(e as usize, p, idx))
                .find(|f| poly::is_irreducible(f, p))
                .expect("irreducible polynomials exist in every degree")
        };
        Ok(FieldSpec { p, e, modulus })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { coeffs: vec![0; self.e as usize] }
    }

    pub fn one(&self) -> FieldElement {
        let mut c = vec![0; self.e as usize];
        c[0] = 1;
        FieldElement { coeffs: c }
    }

    /// The `index`-th element: base-p digits of `index`, constant term
    /// least significant.
    pub fn element(&self, index: u64) -> FieldElement {
        let mut x = index % self.order();
        let coeffs = (0..self.e)
            .map(|_| {
                let d = (x % self.p as u64) as u32;
                x /= self.p as u64;
                d
            })
            .collect();
        FieldElement { coeffs }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn index_of(&self, a: &FieldElement) -> u64 {
        a.coeffs.iter().rev().fold(0, |acc, &c| acc * self.p as u64 + c as u64)
    }

    fn check(&self, a: &FieldElement) -> Result<(), GfError> {
        if a.coeffs.len() != self.e as usize || a.coeffs.iter().any(|&c| c >= self.p) {
            return Err(GfError::Mismatch(a.coeffs.clone(), self.to_string()));
        }
        Ok(())
    }

    fn reduce_poly(&self, mut c: Vec<u32>) -> FieldElement {
        c.resize(self.e as usize, 0);
        FieldElement { coeffs: c }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % self.p).collect();
        Ok(FieldElement { coeffs })
    }

    pub fn neg(&self, a: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        Ok(FieldElement { coeffs: a.coeffs.iter().map(|&x| (self.p - x) % self.p).collect() })
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.add(a, &self.neg(b)?)
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        self.check(b)?;
        let product = poly::mul(&poly::trim(a.coeffs.clone()), &poly::trim(b.coeffs.clone()), self.p);
        Ok(self.reduce_poly(poly::rem(&product, &self.modulus, self.p)))
    }

    pub fn pow(&self, a: &FieldElement, mut exp: u64) -> Result<FieldElement, GfError> {
        let mut acc = self.one();
        let mut base = a.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            base = self.mul(&base, &base)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement, GfError> {
        self.check(a)?;
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        self.pow(a, self.order() - 2)
    }
}

/// Printed as `GF(p^e) mod <coeffs>`.
impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.e, self.modulus)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub coeffs: Vec<u32>,
}

impl FieldElement {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// The least prime power `q >= m`, with its field.
pub fn smallest_prime_power_at_least(m: u64) -> FieldSpec {
    let q = (m.max(2)..).find(|&q| prime_power_decomposition(q).is_some()).expect("prime powers are unbounded");
    FieldSpec::new(q).expect("q is a prime power")
}

/// Addition and multiplication tables on element indices, for hot loops.
#[derive(Debug, Clone)]
pub struct FieldTables {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl FieldTables {
    pub fn new(spec: &FieldSpec) -> Self {
        let q = spec.order() as usize;
        let elems: Vec<FieldElement> = spec.elements().collect();
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = spec.index_of(&spec.add(&elems[i], &elems[j]).unwrap()) as u32;
                mul[i * q + j] = spec.index_of(&spec.mul(&elems[i], &elems[j]).unwrap()) as u32;
            }
        }
        FieldTables { q, add, mul }
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        let neg_b = (0..self.q as u32).find(|&x| self.add(b, x) == 0).expect("additive inverse");
        self.add(a, neg_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_decomposition(16), Some((2, 4)));
        assert_eq!(prime_power_decomposition(27), Some((3, 3)));
        assert_eq!(prime_power_decomposition(12), None);
        assert_eq!(prime_power_decomposition(1), None);
        assert!(is_prime(23) && !is_prime(21));
        assert!(FieldSpec::new(6).is_err());
    }

    #[test]
    fn smallest_prime_power_examples() {
        let f = smallest_prime_power_at_least(7);
        assert_eq!((f.p, f.e), (7, 1));
        let f = smallest_prime_power_at_least(15);
        assert_eq!((f.p, f.e), (2, 4));
        assert_eq!(smallest_prime_power_at_least(21).order(), 23);
        assert_eq!(smallest_prime_power_at_least(2).order(), 2);
    }

    #[test]
    fn field_orders_for_small_n() {
        let row: Vec<u64> = (2..=11).map(|n| smallest_prime_power_at_least(2 * n + 1).order()).collect();
        assert_eq!(row, vec![5, 7, 9, 11, 13, 16, 17, 19, 23, 23]);
    }

    #[test]
    fn small_products() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.mul(&f5.element(3), &f5.element(4)).unwrap(), f5.element(2));
        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!(f4.modulus, vec![1, 1, 1]);
        let x = f4.element(2);
        // x * x = x + 1
        assert_eq!(f4.mul(&x, &x).unwrap().coeffs, vec![1, 1]);
        assert_eq!(f4.to_string(), "GF(2^2) mod [1, 1, 1]");
    }

    #[test]
    fn moduli_are_smallest_irreducible() {
        assert_eq!(FieldSpec::new(8).unwrap().modulus, vec![1, 1, 0, 1]);
        assert_eq!(FieldSpec::new(9).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(FieldSpec::new(16).unwrap().modulus, vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn mismatched_elements_rejected() {
        let f4 = FieldSpec::new(4).unwrap();
        let f5 = FieldSpec::new(5).unwrap();
        assert!(matches!(f4.add(&f5.element(3), &f4.one()), Err(GfError::Mismatch(..))));
        assert!(matches!(f5.mul(&f4.element(3), &f5.one()), Err(GfError::Mismatch(..))));
        assert_eq!(f5.inv(&f5.zero()), Err(GfError::DivisionByZero));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = FieldSpec::new(q).unwrap();
            let t = FieldTables::new(&f);
            let q = q as u32;
            for a in 0..q {
                assert_eq!(t.add(a, 0), a);
                assert_eq!(t.mul(a, 1), a);
                if a != 0 {
                    let inv = f.inv(&f.element(a as u64)).unwrap();
                    assert_eq!(t.mul(a, f.index_of(&inv) as u32), 1, "q={q} a={a}");
                }
                for b in 0..q {
                    assert_eq!(t.add(a, b), t.add(b, a));
                    assert_eq!(t.mul(a, b), t.mul(b, a));
                    for c in 0..q {
                        assert_eq!(t.add(t.add(a, b), c), t.add(a, t.add(b, c)));
                        assert_eq!(t.mul(t.mul(a, b), c), t.mul(a, t.mul(b, c)));
                        assert_eq!(t.mul(a, t.add(b, c)), t.add(t.mul(a, b), t.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn no_zero_divisors_up_to_32() {
        for q in (2u64..=32).filter(|&q| prime_power_decomposition(q).is_some()) {
            let t = FieldTables::new(&FieldSpec::new(q).unwrap());
            for a in 1..q as u32 {
                for b in 1..q as u32 {
                    assert_ne!(t.mul(a, b), 0, "q={q}: {a}*{b}");
                }
            }
        }
    }
}
