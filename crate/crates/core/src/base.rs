//! The p-adic valuation on `Q`, normalized so that `v(p) = 1`, and its residue map onto `F_p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{domain, Error, Result};
use crate::value::{Value, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseValuation {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn ord(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

impl BaseValuation {
    pub fn new(p: u64) -> Result<BaseValuation> {
        if !is_prime(p) {
            return Err(Error::InvalidChain(format!("{p} is not a prime")));
        }
        Ok(BaseValuation { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// `v_p(a)` as an integer; `None` for `a = 0`.
    pub fn ord(&self, a: &Q) -> Option<i64> {
        if a.is_zero() {
            return None;
        }
        let p = self.p_big();
        Some(ord(a.numer(), &p) - ord(a.denom(), &p))
    }

    pub fn vp(&self, a: &Q) -> Value {
        match self.ord(a) {
            Some(k) => Value::int(k),
            None => Value::Infinity,
        }
    }

    /// Reduction of an element of the valuation ring into `F_p`, as an integer in `[0, p)`.
    pub fn residue(&self, a: &Q) -> Result<u64> {
        match self.ord(a) {
            None => Ok(0),
            Some(k) if k < 0 => domain(format!(
                "residue of {a} is undefined: v_{}({a}) = {k} < 0",
                self.p
            )),
            Some(k) if k > 0 => Ok(0),
            Some(_) => {
                let p = self.p_big();
                let n = a.numer().mod_floor(&p);
                let d = a.denom().mod_floor(&p);
                let inv = d.modpow(&(&p - 2u32), &p);
                Ok((n * inv).mod_floor(&p).to_u64().unwrap())
            }
        }
    }

    /// Representative of a residue class in `{0, ..., p-1}`.
    pub fn lift(&self, z: u64) -> Q {
        Q::from_integer(BigInt::from(z % self.p))
    }

    /// `p^k` as a rational.
    pub fn p_pow(&self, k: i64) -> Q {
        let p = Q::from_integer(self.p_big());
        num_traits::pow::Pow::pow(&p, k as i32)
    }
}
