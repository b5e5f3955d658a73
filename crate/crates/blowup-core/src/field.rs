//! Prime-field arithmetic on residues stored in a single machine word.

use crate::error::CoreError;

/// The ground field GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
}

impl FieldSpec {
    /// Largest characteristic accepted; keeps every product of two residues inside `u64`.
    pub const MAX_P: u64 = 1 << 31;

    pub fn new(p: u64) -> Result<Self, CoreError> {
        if p > Self::MAX_P {
            return Err(CoreError::FieldTooLarge(p));
        }
        if !is_prime(p) {
            return Err(CoreError::NotPrime(p));
        }
        Ok(FieldSpec { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduces a signed integer into `[0, p)`.
    #[inline]
    pub fn reduce(&self, c: i64) -> u64 {
        c.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        a %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse of a nonzero residue (Fermat).
    pub fn inv(&self, a: u64) -> u64 {
        assert!(
            !a.is_multiple_of(self.p),
            "inverse of zero in GF({})",
            self.p
        );
        self.pow(a, self.p - 2)
    }

    /// `binom(n, k) mod p` via Lucas' theorem; valid for arbitrarily large `n`.
    pub fn binom(&self, mut n: u64, mut k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let mut r = 1 % self.p;
        while k > 0 || n > 0 {
            let (ni, ki) = (n % self.p, k % self.p);
            if ki > ni {
                return 0;
            }
            r = self.mul(r, self.small_binom(ni, ki));
            n /= self.p;
            k /= self.p;
        }
        r
    }

    fn small_binom(&self, n: u64, k: u64) -> u64 {
        let k = k.min(n - k);
        let (mut num, mut den) = (1 % self.p, 1 % self.p);
        for i in 0..k {
            num = self.mul(num, (n - i) % self.p);
            den = self.mul(den, (i + 1) % self.p);
        }
        self.mul(num, self.inv(den))
    }

    /// Symmetric representative in `(-p/2, p/2]`, used for printing.
    pub fn signed(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// p-adic valuation of a positive integer.
    pub fn valuation(&self, mut n: u64) -> u32 {
        assert!(n > 0);
        let mut v = 0;
        while n.is_multiple_of(self.p) {
            n /= self.p;
            v += 1;
        }
        v
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites() {
        assert_eq!(FieldSpec::new(4), Err(CoreError::NotPrime(4)));
        assert_eq!(FieldSpec::new(1), Err(CoreError::NotPrime(1)));
        assert!(FieldSpec::new(2).is_ok());
        assert!(FieldSpec::new(101).is_ok());
    }

    #[test]
    fn lucas_matches_pascal() {
        for p in [2u64, 3, 5, 7] {
            let f = FieldSpec::new(p).unwrap();
            let mut row = vec![1u64];
            for n in 0..40u64 {
                for k in 0..=n {
                    assert_eq!(f.binom(n, k), row[k as usize] % p, "p={p} n={n} k={k}");
                }
                let mut next = vec![1u64; row.len() + 1];
                for k in 1..row.len() {
                    next[k] = (row[k - 1] + row[k]) % p;
                }
                row = next;
            }
        }
    }

    #[test]
    fn inverse_and_signed() {
        let f = FieldSpec::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.signed(6), -1);
        assert_eq!(f.signed(3), 3);
        assert_eq!(f.reduce(-1), 6);
        assert_eq!(f.valuation(98), 2);
    }
}
