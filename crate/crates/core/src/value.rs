//! Exact values in lexicographically ordered `Q` or `Q^2`, plus infinity.
//!
//! Rank-one values mixed with rank-two values are embedded as `q -> (0, q)`,
//! so a fresh `(1, 0)` dominates every rank-one value. Chains that need the
//! opposite convention embed their base values explicitly through
//! [`Embedding::Major`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

#[derive(Clone, Debug)]
pub enum Value {
    Rank1(Q),
    /// `(major, minor)`, compared lexicographically.
    Rank2(Q, Q),
    Infinity,
}

/// Placement of rank-one values inside `Q^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Embedding {
    /// `q -> (0, q)`: a new rank-two value with non-zero major part is infinitely large.
    #[default]
    Minor,
    /// `q -> (q, 0)`: a new rank-two value `(0, b)` is infinitesimal.
    Major,
}

impl Embedding {
    pub fn embed(self, q: Q) -> Value {
        match self {
            Embedding::Minor => Value::Rank2(Q::zero(), q),
            Embedding::Major => Value::Rank2(q, Q::zero()),
        }
    }

    /// The rank-one coordinate of `v`, when `v` lies on the embedded base line.
    pub fn base_part(self, v: &Value) -> Option<Q> {
        match (self, v) {
            (_, Value::Rank1(q)) => Some(q.clone()),
            (Embedding::Minor, Value::Rank2(a, b)) if a.is_zero() => Some(b.clone()),
            (Embedding::Major, Value::Rank2(a, b)) if b.is_zero() => Some(a.clone()),
            _ => None,
        }
    }

    /// Picks the embedding under which an explicitly rank-two `gamma` is off the base line.
    pub fn infer(gamma: &Value) -> Embedding {
        match gamma {
            Value::Rank2(a, b) if a.is_zero() && !b.is_zero() => Embedding::Major,
            _ => Embedding::Minor,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Embedding::Minor => "minor",
            Embedding::Major => "major",
        }
    }
}

impl FromStr for Embedding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "minor" => Ok(Embedding::Minor),
            "major" => Ok(Embedding::Major),
            other => Err(Error::Parse(format!("unknown embedding `{other}`"))),
        }
    }
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

impl Value {
    pub fn zero() -> Value {
        Value::Rank1(Q::zero())
    }

    pub fn int(n: i64) -> Value {
        Value::Rank1(q_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Value {
        Value::Rank1(q_frac(n, d))
    }

    pub fn pair(a: Q, b: Q) -> Value {
        Value::Rank2(a, b)
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Value::Infinity)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinity)
    }

    pub fn rank(&self) -> Option<u8> {
        match self {
            Value::Rank1(_) => Some(1),
            Value::Rank2(..) => Some(2),
            Value::Infinity => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Rank1(q) => q.is_zero(),
            Value::Rank2(a, b) => a.is_zero() && b.is_zero(),
            Value::Infinity => false,
        }
    }

    /// Coordinates as a `Q^2` pair under the default (minor) embedding.
    fn as_pair(&self) -> Option<(Q, Q)> {
        match self {
            Value::Rank1(q) => Some((Q::zero(), q.clone())),
            Value::Rank2(a, b) => Some((a.clone(), b.clone())),
            Value::Infinity => None,
        }
    }

    fn map(&self, f: impl Fn(&Q) -> Q) -> Value {
        match self {
            Value::Rank1(q) => Value::Rank1(f(q)),
            Value::Rank2(a, b) => Value::Rank2(f(a), f(b)),
            Value::Infinity => Value::Infinity,
        }
    }

    pub fn mul_int(&self, m: i64) -> Value {
        self.mul_big(&BigInt::from(m))
    }

    /// Integer multiple; `0 * inf` is taken to be `0`.
    pub fn mul_big(&self, m: &BigInt) -> Value {
        if m.is_zero() {
            return match self {
                Value::Rank2(..) => Value::Rank2(Q::zero(), Q::zero()),
                _ => Value::zero(),
            };
        }
        assert!(
            self.is_finite() || m.is_positive(),
            "negative multiple of infinity"
        );
        let m = Q::from_integer(m.clone());
        self.map(|q| q * &m)
    }

    pub fn mul_q(&self, m: &Q) -> Value {
        self.map(|q| q * m)
    }

    pub fn div_int(&self, d: i64) -> Value {
        let d = q_int(d);
        self.map(|q| q / &d)
    }

    pub fn lex_cmp(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Infinity, Value::Infinity) => Ordering::Equal,
            (Value::Infinity, _) => Ordering::Greater,
            (_, Value::Infinity) => Ordering::Less,
            (Value::Rank1(a), Value::Rank1(b)) => a.cmp(b),
            _ => {
                let (a0, a1) = self.as_pair().unwrap();
                let (b0, b1) = other.as_pair().unwrap();
                a0.cmp(&b0).then_with(|| a1.cmp(&b1))
            }
        }
    }

    /// Componentwise rational coordinates (`None` for infinity).
    pub fn coords(&self) -> Option<Vec<Q>> {
        match self {
            Value::Rank1(q) => Some(vec![q.clone()]),
            Value::Rank2(a, b) => Some(vec![a.clone(), b.clone()]),
            Value::Infinity => None,
        }
    }

    pub fn min(a: Value, b: Value) -> Value {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Value) -> bool {
        self.lex_cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Value) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Value) -> Ordering {
        self.lex_cmp(other)
    }
}

impl Add for &Value {
    type Output = Value;
    fn add(self, rhs: &Value) -> Value {
        match (self, rhs) {
            (Value::Infinity, _) | (_, Value::Infinity) => Value::Infinity,
            (Value::Rank1(a), Value::Rank1(b)) => Value::Rank1(a + b),
            _ => {
                let (a0, a1) = self.as_pair().unwrap();
                let (b0, b1) = rhs.as_pair().unwrap();
                Value::Rank2(a0 + b0, a1 + b1)
            }
        }
    }
}

impl Add for Value {
    type Output = Value;
    fn add(self, rhs: Value) -> Value {
        &self + &rhs
    }
}

impl Neg for &Value {
    type Output = Value;
    fn neg(self) -> Value {
        assert!(self.is_finite(), "negation of infinity");
        self.map(|q| -q)
    }
}

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        -&self
    }
}

impl Sub for &Value {
    type Output = Value;
    fn sub(self, rhs: &Value) -> Value {
        if self.is_infinite() {
            assert!(rhs.is_finite(), "inf - inf");
            return Value::Infinity;
        }
        self + &(-rhs)
    }
}

impl Sub for Value {
    type Output = Value;
    fn sub(self, rhs: Value) -> Value {
        &self - &rhs
    }
}

/// `m*a + n*b`, exact; infinity absorbs.
pub fn combine(a: &Value, b: &Value, m: i64, n: i64) -> Value {
    &a.mul_int(m) + &b.mul_int(n)
}

pub fn lex_cmp(a: &Value, b: &Value) -> Ordering {
    a.lex_cmp(b)
}

fn fmt_q(q: &Q, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Rank1(q) => fmt_q(q, f),
            Value::Rank2(a, b) => {
                write!(f, "(")?;
                fmt_q(a, f)?;
                write!(f, ", ")?;
                fmt_q(b, f)?;
                write!(f, ")")
            }
            Value::Infinity => write!(f, "inf"),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl FromStr for Value {
    type Err = Error;
    fn from_str(s: &str) -> Result<Value> {
        let t = s.trim();
        if matches!(t, "inf" | "infinity" | "Infinity" | "∞") {
            return Ok(Value::Infinity);
        }
        if let Some(inner) = t.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let parts: Vec<&str> = inner.split(',').collect();
            return match parts.as_slice() {
                [a] => Ok(Value::Rank1(parse_rational(a)?)),
                [a, b] => Ok(Value::Rank2(parse_rational(a)?, parse_rational(b)?)),
                _ => Err(Error::Parse(format!("values have rank 1 or 2, got `{t}`"))),
            };
        }
        Ok(Value::Rank1(parse_rational(t)?))
    }
}

/// Generators of a finitely generated subgroup of `Q^r`.
#[derive(Clone, Debug)]
pub struct GroupGens {
    gens: Vec<Value>,
}

impl GroupGens {
    pub fn new(gens: Vec<Value>) -> Result<GroupGens> {
        if gens.is_empty() {
            return Err(Error::Domain(
                "a subgroup needs at least one generator".into(),
            ));
        }
        if gens.iter().any(Value::is_infinite) {
            return Err(Error::Domain("subgroup generators must be finite".into()));
        }
        Ok(GroupGens { gens })
    }

    pub fn gens(&self) -> &[Value] {
        &self.gens
    }

    pub fn contains(&self, gamma: &Value) -> bool {
        subgroup_index(gamma, self) == Some(1)
    }

    /// Integer coefficients `c` with `sum c_i * gens_i == target`, if `target` is in the group.
    pub fn solve(&self, target: &Value) -> Option<Vec<BigInt>> {
        let lat = Lattice::build(target, self);
        lat.solve()
    }
}

/// Generator lattice after clearing denominators, reduced to echelon form.
struct Lattice {
    /// target as an integer vector
    w: [BigInt; 2],
    /// echelon rows `(a, b)` and `(0, c)`, each with the combination of generators producing it
    top: (BigInt, BigInt, Vec<BigInt>),
    bottom: (BigInt, Vec<BigInt>),
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

impl Lattice {
    fn build(target: &Value, gens: &GroupGens) -> Lattice {
        assert!(target.is_finite(), "subgroup queries need a finite value");
        let coords = |v: &Value| -> (Q, Q) {
            match v {
                Value::Rank1(q) => (Q::zero(), q.clone()),
                Value::Rank2(a, b) => (a.clone(), b.clone()),
                Value::Infinity => unreachable!(),
            }
        };
        let mut l = BigInt::one();
        let all: Vec<(Q, Q)> = std::iter::once(target)
            .chain(gens.gens.iter())
            .map(coords)
            .collect();
        for (a, b) in &all {
            l = l.lcm(a.denom()).lcm(b.denom());
        }
        let lq = Q::from_integer(l);
        let to_int = |q: &Q| (q * &lq).to_integer();
        let ints: Vec<[BigInt; 2]> = all.iter().map(|(a, b)| [to_int(a), to_int(b)]).collect();
        let k = gens.gens.len();
        // rows carry (first, second, combination)
        let mut rows: Vec<(BigInt, BigInt, Vec<BigInt>)> = ints[1..]
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut c = vec![BigInt::zero(); k];
                c[i] = BigInt::one();
                (v[0].clone(), v[1].clone(), c)
            })
            .collect();
        // gcd-combine the first column into rows[0]
        for i in 1..rows.len() {
            if rows[i].0.is_zero() {
                continue;
            }
            let (a0, b0, c0) = rows[0].clone();
            let (ai, bi, ci) = rows[i].clone();
            let (g, x, y) = ext_gcd(&a0, &ai);
            let (p, q) = (&a0 / &g, &ai / &g);
            let comb = |u: &BigInt, s: &BigInt, v: &BigInt, t: &BigInt| u * s + v * t;
            let new0 = (
                g.clone(),
                comb(&b0, &x, &bi, &y),
                c0.iter()
                    .zip(&ci)
                    .map(|(u, v)| comb(u, &x, v, &y))
                    .collect(),
            );
            // (ai/g) * row0 - (a0/g) * rowi has zero first entry
            let newi = (
                BigInt::zero(),
                &bi * &p - &b0 * &q,
                c0.iter().zip(&ci).map(|(u, v)| v * &p - u * &q).collect(),
            );
            rows[0] = new0;
            rows[i] = newi;
        }
        let (a, b, ca) = rows[0].clone();
        let (top, rest) = if a.is_zero() {
            (
                (BigInt::zero(), BigInt::zero(), vec![BigInt::zero(); k]),
                &rows[..],
            )
        } else {
            ((a, b, ca), &rows[1..])
        };
        let mut bottom = (BigInt::zero(), vec![BigInt::zero(); k]);
        for (_, bi, ci) in rest {
            if bi.is_zero() {
                continue;
            }
            if bottom.0.is_zero() {
                bottom = (bi.clone(), ci.clone());
                continue;
            }
            let (g, x, y) = ext_gcd(&bottom.0, bi);
            let c = bottom
                .1
                .iter()
                .zip(ci)
                .map(|(u, v)| u * &x + v * &y)
                .collect();
            bottom = (g, c);
        }
        Lattice {
            w: ints[0].clone(),
            top,
            bottom,
        }
    }

    fn index(&self) -> Option<BigInt> {
        let [w1, w2] = &self.w;
        let (a, b) = (&self.top.0, &self.top.1);
        let c = &self.bottom.0;
        if a.is_zero() {
            if !w1.is_zero() {
                return None;
            }
            if c.is_zero() {
                return if w2.is_zero() {
                    Some(BigInt::one())
                } else {
                    None
                };
            }
            return Some(c.abs() / c.gcd(w2));
        }
        // e must make a | e*w1
        let e1 = a.abs() / a.gcd(w1);
        let k1 = &e1 * w1 / a;
        let r1 = &e1 * w2 - &k1 * b;
        if c.is_zero() {
            return if r1.is_zero() { Some(e1) } else { None };
        }
        Some(e1 * (c.abs() / c.gcd(&r1)))
    }

    fn solve(&self) -> Option<Vec<BigInt>> {
        if self.index()? != BigInt::one() {
            return None;
        }
        let [w1, w2] = &self.w;
        let (a, b, ca) = &self.top;
        let (c, cc) = &self.bottom;
        let k = if a.is_zero() { BigInt::zero() } else { w1 / a };
        let rem = w2 - &k * b;
        let t = if c.is_zero() {
            BigInt::zero()
        } else {
            &rem / c
        };
        Some(ca.iter().zip(cc).map(|(u, v)| u * &k + v * &t).collect())
    }
}

/// Least `e >= 1` with `e * gamma` in the subgroup generated by `gens`.
pub fn subgroup_index(gamma: &Value, gens: &GroupGens) -> Option<u64> {
    use num_traits::ToPrimitive;
    Lattice::build(gamma, gens).index().and_then(|e| e.to_u64())
}

/// Whether some positive multiple of `gamma` lies in the `Q`-span of `gens`.
pub fn is_commensurable(gamma: &Value, gens: &GroupGens) -> bool {
    Lattice::build(gamma, gens).index().is_some()
}
