//! Dense univariate polynomials over `Q`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::value::{parse_rational, q_int, Q};

/// Coefficients in increasing degree; the top coefficient is never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Poly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Poly {
        Poly::new(coeffs.iter().map(|&c| q_int(c)).collect())
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn x() -> Poly {
        Poly::monomial(Q::one(), 1)
    }

    pub fn constant(c: Q) -> Poly {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Q, k: usize) -> Poly {
        let mut coeffs = vec![Q::zero(); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg(0) = 0`; callers that care handle zero separately.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&Q> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, c: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Q::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    pub fn pow(&self, k: usize) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some(l) => self.scale(&(Q::one() / l)),
            None => Poly::zero(),
        }
    }

    /// Quotient and remainder by a monic divisor of positive degree.
    pub fn divmod(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if !g.is_monic() || g.deg() == 0 {
            return domain(format!("divisor {g} must be monic of positive degree"));
        }
        Ok(self.divmod_unchecked(g))
    }

    fn divmod_unchecked(&self, g: &Poly) -> (Poly, Poly) {
        let n = g.deg();
        let lead = g.leading().unwrap().clone();
        if self.coeffs.len() <= n {
            return (Poly::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![Q::zero(); r.len() - n];
        for k in (n..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = &r[k] / &lead;
            for (j, gj) in g.coeffs.iter().enumerate() {
                if !gj.is_zero() {
                    r[k - n + j] -= &c * gj;
                }
            }
            q[k - n] = c;
        }
        r.truncate(n);
        (Poly::new(q), Poly::new(r))
    }

    /// Division by any non-zero polynomial (field coefficients).
    pub fn divmod_general(&self, g: &Poly) -> Result<(Poly, Poly)> {
        if g.is_zero() {
            return domain("division by the zero polynomial");
        }
        if g.deg() == 0 {
            return Ok((self.scale(&(Q::one() / g.leading().unwrap())), Poly::zero()));
        }
        Ok(self.divmod_unchecked(g))
    }

    pub fn rem(&self, g: &Poly) -> Result<Poly> {
        Ok(self.divmod(g)?.1)
    }

    /// Base-`g` digits of `self`: `self = sum f_s g^s` with `deg f_s < deg g`.
    pub fn expand(&self, g: &Poly) -> Result<Vec<Poly>> {
        if !g.is_monic() || g.deg() == 0 {
            return domain(format!(
                "expansion base {g} must be monic of positive degree"
            ));
        }
        let mut digits = Vec::new();
        let mut rest = self.clone();
        while !rest.is_zero() {
            let (q, r) = rest.divmod_unchecked(g);
            digits.push(r);
            rest = q;
        }
        if digits.is_empty() {
            digits.push(Poly::zero());
        }
        Ok(digits)
    }

    /// Recombines base-`g` digits.
    pub fn from_expansion(digits: &[Poly], g: &Poly) -> Poly {
        digits
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, d| &(&acc * g) + d)
    }

    /// Monic gcd with Bezout cofactors: `s*self + t*other = gcd`.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod_general(&r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = Q::one() / l;
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
            None => (Poly::zero(), s0, t0),
        }
    }

    pub fn eval(&self, a: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * a + c)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Poly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn fmt_coeff(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                write!(f, "{}", fmt_coeff(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_coeff(&abs))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    /// Accepts sums of terms `c*x^k`, `cx^k`, `x^k`, `x`, `c` with integer or
    /// rational `c`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Poly> {
        let src: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |msg: &str| Error::Parse(format!("{msg} in polynomial `{s}`"));
        if src.is_empty() {
            return Err(err("empty input"));
        }
        let mut terms: Vec<Q> = Vec::new();
        let mut i = 0;
        let digits = |i: &mut usize| -> String {
            let start = *i;
            while *i < src.len() && src[*i].is_ascii_digit() {
                *i += 1;
            }
            src[start..*i].iter().collect()
        };
        while i < src.len() {
            let mut sign = Q::one();
            if src[i] == '+' || src[i] == '-' {
                if src[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            } else if !terms.is_empty() || i > 0 {
                return Err(err("expected `+` or `-`"));
            }
            let mut coef: Option<Q> = None;
            let num = digits(&mut i);
            if !num.is_empty() {
                let mut text = num;
                if i < src.len() && src[i] == '/' {
                    i += 1;
                    let den = digits(&mut i);
                    if den.is_empty() {
                        return Err(err("missing denominator"));
                    }
                    text = format!("{text}/{den}");
                }
                coef = Some(parse_rational(&text)?);
                if i < src.len() && src[i] == '*' {
                    i += 1;
                    if i >= src.len() || src[i] != 'x' {
                        return Err(err("expected `x` after `*`"));
                    }
                }
            }
            let mut exp = 0usize;
            if i < src.len() && src[i] == 'x' {
                i += 1;
                exp = 1;
                if i < src.len() && src[i] == '^' {
                    i += 1;
                    let e = digits(&mut i);
                    exp = e.parse().map_err(|_| err("bad exponent"))?;
                }
            } else if coef.is_none() {
                return Err(err("expected a coefficient or `x`"));
            }
            let c = sign * coef.unwrap_or_else(Q::one);
            if terms.len() <= exp {
                terms.resize(exp + 1, Q::zero());
            }
            terms[exp] += c;
        }
        Ok(Poly::new(terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q_frac;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    #[test]
    fn divmod_examples() {
        let (q, r) = p("x^4+4").divmod(&p("x^2+2")).unwrap();
        assert_eq!(q, p("x^2-2"));
        assert_eq!(r, p("8"));
        let (q, r) = p("x").divmod(&p("x")).unwrap();
        assert_eq!((q, r), (Poly::one(), Poly::zero()));
        let (q, r) = p("5").divmod(&p("x^2+2")).unwrap();
        assert_eq!((q, r), (Poly::zero(), p("5")));
    }

    #[test]
    fn divmod_rejects_bad_divisors() {
        assert!(p("x^3").divmod(&p("2x+1")).is_err());
        assert!(p("x^3").divmod(&p("1")).is_err());
    }

    #[test]
    fn expansion_examples() {
        let e = p("x^4+4").expand(&p("x^2+2")).unwrap();
        assert_eq!(e, vec![p("8"), p("-4"), p("1")]);
        let e = p("x^2+2").expand(&p("x^2+2")).unwrap();
        assert_eq!(e, vec![Poly::zero(), p("1")]);
        let e = p("x^3+4x").expand(&p("x")).unwrap();
        assert_eq!(e, vec![Poly::zero(), p("4"), Poly::zero(), p("1")]);
        assert_eq!(Poly::from_expansion(&e, &p("x")), p("x^3+4x"));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(p("x^4 + 4"), Poly::from_ints(&[4, 0, 0, 0, 1]));
        assert_eq!(
            p("2x^2-3*x+1/2"),
            Poly::new(vec![q_frac(1, 2), q_int(-3), q_int(2)])
        );
        assert_eq!(p("-x"), Poly::from_ints(&[0, -1]));
        assert_eq!(p("3/4x"), Poly::new(vec![Q::zero(), q_frac(3, 4)]));
        assert_eq!(p("x+x"), p("2x"));
        assert_eq!(p("0"), Poly::zero());
        assert!("x^".parse::<Poly>().is_err());
        assert!("2**x".parse::<Poly>().is_err());
        assert!("".parse::<Poly>().is_err());
        assert!("y+1".parse::<Poly>().is_err());
    }

    #[test]
    fn display_is_descending_and_reparses() {
        let f = p("1/2 - 3x + x^3 - 2/3x^2");
        assert_eq!(f.to_string(), "x^3 - 2/3*x^2 - 3*x + 1/2");
        assert_eq!(p(&f.to_string()), f);
        assert_eq!(p("-x^2+1").to_string(), "-x^2 + 1");
        assert_eq!(Poly::zero().to_string(), "0");
    }

    #[test]
    fn bezout() {
        let a = p("x^2+2");
        let b = p("x+1");
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, Poly::one());
        assert_eq!(&(&s * &a) + &(&t * &b), Poly::one());
        let (g, _, _) = p("x^2-1").ext_gcd(&p("2x-2"));
        assert_eq!(g, p("x-1"));
    }
}
