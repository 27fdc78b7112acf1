//! Towers of finite fields `F_p[z1]/(m1)[z2]/(m2)...` and polynomials over them.
//!
//! An element of height `h` is stored as a flat digit vector of length at most
//! `N_h = deg m1 * ... * deg mh`: chunk `t` (of length `N_{h-1}`) holds the
//! coefficient of `z_h^t`. Trailing zeros are trimmed, so an element of a
//! subfield is literally the same vector in every larger field.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::is_prime;
use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TowerElem(Vec<u64>);

impl TowerElem {
    pub fn zero() -> TowerElem {
        TowerElem(vec![])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn digits(&self) -> &[u64] {
        &self.0
    }

    fn from_digits(mut d: Vec<u64>) -> TowerElem {
        while d.last() == Some(&0) {
            d.pop();
        }
        TowerElem(d)
    }
}

/// Polynomial in `y` over a tower; coefficients in increasing degree, top coefficient non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ResPoly {
    coeffs: Vec<TowerElem>,
}

impl ResPoly {
    pub fn new(mut coeffs: Vec<TowerElem>) -> ResPoly {
        while coeffs.last().is_some_and(TowerElem::is_zero) {
            coeffs.pop();
        }
        ResPoly { coeffs }
    }

    pub fn zero() -> ResPoly {
        ResPoly { coeffs: vec![] }
    }

    pub fn constant(c: TowerElem) -> ResPoly {
        ResPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[TowerElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> TowerElem {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&TowerElem> {
        self.coeffs.last()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].0 == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.0 == [1])
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerField {
    p: u64,
    /// `mods[h]` is the monic modulus of `z_{h+1}` over the field of height `h`.
    mods: Vec<ResPoly>,
    /// `sizes[h] = N_h`, the degree over `F_p` of the field of height `h`.
    sizes: Vec<usize>,
}

impl TowerField {
    pub fn new(p: u64) -> Result<TowerField> {
        if !is_prime(p) {
            return domain(format!("{p} is not a prime"));
        }
        Ok(TowerField {
            p,
            mods: vec![],
            sizes: vec![1],
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn height(&self) -> usize {
        self.mods.len()
    }

    /// Degree over the prime field.
    pub fn degree(&self) -> usize {
        *self.sizes.last().unwrap()
    }

    pub fn moduli(&self) -> &[ResPoly] {
        &self.mods
    }

    /// Number of elements.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.degree() as u32)
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.p.checked_pow(self.degree() as u32)
    }

    /// Restriction to the first `h` levels.
    pub fn truncate(&self, h: usize) -> TowerField {
        TowerField {
            p: self.p,
            mods: self.mods[..h].to_vec(),
            sizes: self.sizes[..=h].to_vec(),
        }
    }

    /// Adjoins a root of `psi`. Linear moduli collapse: the field is unchanged and
    /// the returned generator image is the root `-psi(0)`.
    pub fn extend(&self, psi: &ResPoly) -> Result<(TowerField, TowerElem)> {
        if !psi.is_monic() || psi.deg() == 0 {
            return domain(format!(
                "extension modulus {} must be monic of positive degree",
                self.fmt_poly(psi, "y")
            ));
        }
        if psi.deg() == 1 {
            return Ok((self.clone(), self.neg(&psi.coeffs[0])));
        }
        if !self.is_irreducible(psi)? {
            return domain(format!(
                "extension modulus {} is reducible over {}",
                self.fmt_poly(psi, "y"),
                self
            ));
        }
        let mut next = self.clone();
        next.mods.push(psi.clone());
        next.sizes.push(self.degree() * psi.deg());
        let z = next.gen(next.height());
        Ok((next, z))
    }

    // ---- elements ----

    pub fn zero(&self) -> TowerElem {
        TowerElem::zero()
    }

    pub fn one(&self) -> TowerElem {
        TowerElem(vec![1])
    }

    pub fn from_int(&self, n: i64) -> TowerElem {
        let p = self.p as i128;
        let r = (n as i128).rem_euclid(p) as u64;
        TowerElem::from_digits(vec![r])
    }

    /// The generator `z_h`, `1 <= h <= height`.
    pub fn gen(&self, h: usize) -> TowerElem {
        assert!(h >= 1 && h <= self.height(), "no generator z{h}");
        let mut d = vec![0; self.sizes[h - 1] + 1];
        d[self.sizes[h - 1]] = 1;
        TowerElem(d)
    }

    /// Elements in a fixed order: index digits base `p`, least significant first.
    pub fn element(&self, mut idx: u64) -> TowerElem {
        let mut d = Vec::with_capacity(self.degree());
        for _ in 0..self.degree() {
            d.push(idx % self.p);
            idx /= self.p;
        }
        TowerElem::from_digits(d)
    }

    pub fn random_elem<R: Rng>(&self, rng: &mut R) -> TowerElem {
        TowerElem::from_digits(
            (0..self.degree())
                .map(|_| rng.gen_range(0..self.p))
                .collect(),
        )
    }

    /// Whether `a` lies in the field (digits in range, length within the degree).
    pub fn contains(&self, a: &TowerElem) -> bool {
        a.0.len() <= self.degree() && a.0.iter().all(|&d| d < self.p)
    }

    /// Least height of a subfield containing `a`.
    pub fn elem_height(&self, a: &TowerElem) -> usize {
        self.sizes
            .iter()
            .position(|&n| a.0.len() <= n)
            .expect("element outside the tower")
    }

    pub fn add(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        let n = a.0.len().max(b.0.len());
        let get = |v: &TowerElem, i: usize| v.0.get(i).copied().unwrap_or(0);
        TowerElem::from_digits((0..n).map(|i| (get(a, i) + get(b, i)) % self.p).collect())
    }

    pub fn neg(&self, a: &TowerElem) -> TowerElem {
        TowerElem::from_digits(a.0.iter().map(|&d| (self.p - d) % self.p).collect())
    }

    pub fn sub(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        self.add(a, &self.neg(b))
    }

    /// Coordinates of `a` over the field of height `h - 1`, as coefficients of powers of `z_h`.
    pub fn chunks(&self, a: &TowerElem, h: usize) -> ResPoly {
        let n = self.sizes[h - 1];
        ResPoly::new(
            a.0.chunks(n)
                .map(|c| TowerElem::from_digits(c.to_vec()))
                .collect(),
        )
    }

    fn flatten(&self, c: &ResPoly, h: usize) -> TowerElem {
        let n = self.sizes[h - 1];
        let mut d = vec![0; n * c.coeffs.len()];
        for (t, ct) in c.coeffs.iter().enumerate() {
            d[t * n..t * n + ct.0.len()].copy_from_slice(&ct.0);
        }
        TowerElem::from_digits(d)
    }

    pub fn mul(&self, a: &TowerElem, b: &TowerElem) -> TowerElem {
        if a.is_zero() || b.is_zero() {
            return TowerElem::zero();
        }
        let h = self.elem_height(a).max(self.elem_height(b));
        if h == 0 {
            let r = (a.0[0] as u128 * b.0[0] as u128 % self.p as u128) as u64;
            return TowerElem::from_digits(vec![r]);
        }
        let prod = self.pmul(&self.chunks(a, h), &self.chunks(b, h));
        let red = self.prem_monic(&prod, &self.mods[h - 1]);
        self.flatten(&red, h)
    }

    pub fn inv(&self, a: &TowerElem) -> Result<TowerElem> {
        if a.is_zero() {
            return domain("inverse of zero in a finite field");
        }
        let h = self.elem_height(a);
        if h == 0 {
            return Ok(TowerElem::from_digits(vec![
                self.pow_u64(a, self.p - 2).0[0],
            ]));
        }
        let (g, s, _) = self.pext_gcd(&self.chunks(a, h), &self.mods[h - 1]);
        debug_assert!(g.is_one());
        Ok(self.flatten(&s, h))
    }

    pub fn div(&self, a: &TowerElem, b: &TowerElem) -> Result<TowerElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn pow_u64(&self, a: &TowerElem, e: u64) -> TowerElem {
        self.pow(a, &BigUint::from(e))
    }

    pub fn pow(&self, a: &TowerElem, e: &BigUint) -> TowerElem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Signed integer power; negative exponents invert.
    pub fn pow_i(&self, a: &TowerElem, e: i64) -> Result<TowerElem> {
        let base = if e < 0 { self.inv(a)? } else { a.clone() };
        Ok(self.pow(&base, &BigUint::from(e.unsigned_abs())))
    }

    /// The unique `p`-th root, `a^(q/p)`.
    pub fn pth_root(&self, a: &TowerElem) -> TowerElem {
        let e = BigUint::from(self.p).pow(self.degree() as u32 - 1);
        self.pow(a, &e)
    }

    // ---- polynomials ----

    pub fn y(&self) -> ResPoly {
        ResPoly::new(vec![self.zero(), self.one()])
    }

    pub fn padd(&self, f: &ResPoly, g: &ResPoly) -> ResPoly {
        let n = f.coeffs.len().max(g.coeffs.len());
        ResPoly::new((0..n).map(|i| self.add(&f.coeff(i), &g.coeff(i))).collect())
    }

    pub fn psub(&self, f: &ResPoly, g: &ResPoly) -> ResPoly {
        let n = f.coeffs.len().max(g.coeffs.len());
        ResPoly::new((0..n).map(|i| self.sub(&f.coeff(i), &g.coeff(i))).collect())
    }

    pub fn pscale(&self, f: &ResPoly, c: &TowerElem) -> ResPoly {
        ResPoly::new(f.coeffs.iter().map(|a| self.mul(a, c)).collect())
    }

    pub fn pmul(&self, f: &ResPoly, g: &ResPoly) -> ResPoly {
        if f.is_zero() || g.is_zero() {
            return ResPoly::zero();
        }
        let mut out = vec![TowerElem::zero(); f.coeffs.len() + g.coeffs.len() - 1];
        for (i, a) in f.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = self.add(&out[i + j], &self.mul(a, b));
                }
            }
        }
        ResPoly::new(out)
    }

    pub fn ppow(&self, f: &ResPoly, k: usize) -> ResPoly {
        let mut acc = ResPoly::constant(self.one());
        for _ in 0..k {
            acc = self.pmul(&acc, f);
        }
        acc
    }

    pub fn pmonic(&self, f: &ResPoly) -> ResPoly {
        match f.leading() {
            Some(l) => self.pscale(f, &self.inv(l).unwrap()),
            None => ResPoly::zero(),
        }
    }

    fn prem_monic(&self, f: &ResPoly, m: &ResPoly) -> ResPoly {
        self.pdivrem_monic(f, m).1
    }

    fn pdivrem_monic(&self, f: &ResPoly, m: &ResPoly) -> (ResPoly, ResPoly) {
        let d = m.deg();
        if f.coeffs.len() <= d {
            return (ResPoly::zero(), f.clone());
        }
        let mut r = f.coeffs.clone();
        let mut q = vec![TowerElem::zero(); r.len() - d];
        for k in (d..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = r[k].clone();
            for (j, mj) in m.coeffs.iter().enumerate() {
                if !mj.is_zero() {
                    r[k - d + j] = self.sub(&r[k - d + j], &self.mul(&c, mj));
                }
            }
            q[k - d] = c;
        }
        r.truncate(d);
        (ResPoly::new(q), ResPoly::new(r))
    }

    pub fn pdivrem(&self, f: &ResPoly, g: &ResPoly) -> Result<(ResPoly, ResPoly)> {
        let Some(l) = g.leading() else {
            return domain("division by the zero polynomial");
        };
        let linv = self.inv(l)?;
        let (q, r) = self.pdivrem_monic(f, &self.pscale(g, &linv));
        Ok((self.pscale(&q, &linv), r))
    }

    pub fn prem(&self, f: &ResPoly, g: &ResPoly) -> Result<ResPoly> {
        Ok(self.pdivrem(f, g)?.1)
    }

    /// Exact quotient when `g | f`.
    pub fn pdiv_exact(&self, f: &ResPoly, g: &ResPoly) -> Result<ResPoly> {
        let (q, r) = self.pdivrem(f, g)?;
        if !r.is_zero() {
            return domain(format!(
                "{} does not divide {}",
                self.fmt_poly(g, "y"),
                self.fmt_poly(f, "y")
            ));
        }
        Ok(q)
    }

    pub fn pdivides(&self, f: &ResPoly, g: &ResPoly) -> bool {
        if f.is_zero() {
            return g.is_zero();
        }
        self.prem(g, f).unwrap().is_zero()
    }

    /// Monic gcd with cofactors `s*f + t*g = gcd`.
    pub fn pext_gcd(&self, f: &ResPoly, g: &ResPoly) -> (ResPoly, ResPoly, ResPoly) {
        let one = ResPoly::constant(self.one());
        let (mut r0, mut r1) = (f.clone(), g.clone());
        let (mut s0, mut s1) = (one.clone(), ResPoly::zero());
        let (mut t0, mut t1) = (ResPoly::zero(), one);
        while !r1.is_zero() {
            let (q, r) = self.pdivrem(&r0, &r1).unwrap();
            r0 = std::mem::replace(&mut r1, r);
            let s = self.psub(&s0, &self.pmul(&q, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.psub(&t0, &self.pmul(&q, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.leading().cloned() {
            Some(l) => {
                let inv = self.inv(&l).unwrap();
                (
                    self.pscale(&r0, &inv),
                    self.pscale(&s0, &inv),
                    self.pscale(&t0, &inv),
                )
            }
            None => (ResPoly::zero(), s0, t0),
        }
    }

    pub fn pgcd(&self, f: &ResPoly, g: &ResPoly) -> ResPoly {
        let (mut a, mut b) = (f.clone(), g.clone());
        while !b.is_zero() {
            let r = self.prem(&a, &b).unwrap();
            a = std::mem::replace(&mut b, r);
        }
        self.pmonic(&a)
    }

    pub fn pderiv(&self, f: &ResPoly) -> ResPoly {
        ResPoly::new(
            f.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.mul(&self.from_int((i as u64 % self.p) as i64), c))
                .collect(),
        )
    }

    pub fn peval(&self, f: &ResPoly, a: &TowerElem) -> TowerElem {
        f.coeffs
            .iter()
            .rev()
            .fold(self.zero(), |acc, c| self.add(&self.mul(&acc, a), c))
    }

    /// `f(c*y)`.
    pub fn pcompose_scale(&self, f: &ResPoly, c: &TowerElem) -> ResPoly {
        let mut pw = self.one();
        let mut out = Vec::with_capacity(f.coeffs.len());
        for a in &f.coeffs {
            out.push(self.mul(a, &pw));
            pw = self.mul(&pw, c);
        }
        ResPoly::new(out)
    }

    /// `f(y + c)`.
    pub fn pshift(&self, f: &ResPoly, c: &TowerElem) -> ResPoly {
        let lin = ResPoly::new(vec![c.clone(), self.one()]);
        f.coeffs.iter().rev().fold(ResPoly::zero(), |acc, a| {
            self.padd(&self.pmul(&acc, &lin), &ResPoly::constant(a.clone()))
        })
    }

    fn ppowmod(&self, f: &ResPoly, e: &BigUint, m: &ResPoly) -> ResPoly {
        let base = self.prem_monic(f, m);
        let mut acc = self.prem_monic(&ResPoly::constant(self.one()), m);
        for i in (0..e.bits()).rev() {
            acc = self.prem_monic(&self.pmul(&acc, &acc), m);
            if e.bit(i) {
                acc = self.prem_monic(&self.pmul(&acc, &base), m);
            }
        }
        acc
    }

    // ---- irreducibility and factorization ----

    /// Rabin's test over the whole tower.
    pub fn is_irreducible(&self, psi: &ResPoly) -> Result<bool> {
        if psi.is_constant() {
            return domain("irreducibility of a constant polynomial is undefined");
        }
        let f = self.pmonic(psi);
        let n = f.deg();
        if n == 1 {
            return Ok(true);
        }
        let q = self.order();
        let y = self.y();
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(self.prem_monic(&y, &f));
        for k in 1..=n {
            let next = self.ppowmod(&frob[k - 1], &q, &f);
            frob.push(next);
        }
        for r in prime_divisors(n) {
            let g = self.pgcd(&f, &self.psub(&frob[n / r], &y));
            if !g.is_one() {
                return Ok(false);
            }
        }
        Ok(frob[n] == self.prem_monic(&y, &f))
    }

    /// Complete factorization of the monic part of `psi` into monic irreducibles with
    /// multiplicities, sorted by degree then coefficients.
    pub fn factor(&self, psi: &ResPoly, seed: u64) -> Result<Vec<(ResPoly, usize)>> {
        if psi.is_constant() {
            return domain("factorization of a constant polynomial is undefined");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out: Vec<(ResPoly, usize)> = Vec::new();
        for (sq, m) in self.squarefree(&self.pmonic(psi)) {
            for (g, d) in self.distinct_degree(&sq) {
                for h in self.equal_degree(&g, d, &mut rng) {
                    out.push((h, m));
                }
            }
        }
        out.sort_by(|a, b| (a.0.deg(), &a.0).cmp(&(b.0.deg(), &b.0)));
        let mut merged: Vec<(ResPoly, usize)> = Vec::new();
        for (f, m) in out {
            match merged.last_mut() {
                Some((g, k)) if *g == f => *k += m,
                _ => merged.push((f, m)),
            }
        }
        Ok(merged)
    }

    fn squarefree(&self, f: &ResPoly) -> Vec<(ResPoly, usize)> {
        let mut out = Vec::new();
        if f.deg() == 0 {
            return out;
        }
        let mut c = self.pgcd(f, &self.pderiv(f));
        let mut w = self.pdiv_exact(f, &c).unwrap();
        let mut i = 1;
        while !w.is_one() {
            let y = self.pgcd(&w, &c);
            let fac = self.pdiv_exact(&w, &y).unwrap();
            if !fac.is_one() {
                out.push((fac, i));
            }
            c = self.pdiv_exact(&c, &y).unwrap();
            w = y;
            i += 1;
        }
        if !c.is_one() {
            let p = self.p as usize;
            let root = ResPoly::new(
                c.coeffs
                    .iter()
                    .step_by(p)
                    .map(|a| self.pth_root(a))
                    .collect(),
            );
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * p));
            }
        }
        out
    }

    fn distinct_degree(&self, f: &ResPoly) -> Vec<(ResPoly, usize)> {
        let mut out = Vec::new();
        let q = self.order();
        let y = self.y();
        let mut rest = f.clone();
        let mut h = self.prem_monic(&y, &rest);
        let mut i = 1;
        while rest.deg() >= 2 * i {
            h = self.ppowmod(&h, &q, &rest);
            let g = self.pgcd(&rest, &self.psub(&h, &y));
            if !g.is_one() {
                rest = self.pdiv_exact(&rest, &g).unwrap();
                h = self.prem_monic(&h, &rest);
                out.push((g, i));
            }
            i += 1;
        }
        if rest.deg() > 0 {
            let d = rest.deg();
            out.push((rest, d));
        }
        out
    }

    fn equal_degree(&self, g: &ResPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<ResPoly> {
        let n = g.deg();
        if n == d {
            return vec![g.clone()];
        }
        let q = self.order();
        loop {
            let a = ResPoly::new((0..n).map(|_| self.random_elem(rng)).collect());
            if a.is_constant() {
                continue;
            }
            let b = if self.p == 2 {
                // absolute trace from F_{q^d} down to F_2
                let mut t = a.clone();
                let mut acc = a.clone();
                for _ in 1..self.degree() * d {
                    t = self.prem_monic(&self.pmul(&t, &t), g);
                    acc = self.padd(&acc, &t);
                }
                acc
            } else {
                let e = (q.pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
                let r = self.ppowmod(&a, &e, g);
                self.psub(&r, &ResPoly::constant(self.one()))
            };
            let h = self.pgcd(g, &b);
            if h.deg() > 0 && h.deg() < n {
                let other = self.pdiv_exact(g, &h).unwrap();
                let mut out = self.equal_degree(&h, d, rng);
                out.extend(self.equal_degree(&other, d, rng));
                return out;
            }
        }
    }

    /// Monic polynomials of degree `d` in lexicographic order of `(c_{d-1}, ..., c_0)`.
    pub fn monic_polys(&self, d: usize) -> Result<impl Iterator<Item = ResPoly> + '_> {
        let q = self
            .order_u64()
            .ok_or_else(|| Error::Resource("residue field too large to enumerate".into()))?;
        let total = q
            .checked_pow(d as u32)
            .ok_or_else(|| Error::Resource("too many candidate polynomials".into()))?;
        Ok((0..total).map(move |mut idx| {
            let mut c = vec![TowerElem::zero(); d + 1];
            c[d] = self.one();
            for j in 0..d {
                c[j] = self.element(idx % q);
                idx /= q;
            }
            ResPoly::new(c)
        }))
    }

    // ---- text ----

    pub fn fmt_elem(&self, a: &TowerElem) -> String {
        let h = self.elem_height(a);
        if h == 0 {
            return a.0.first().copied().unwrap_or(0).to_string();
        }
        let c = self.chunks(a, h);
        let mut terms = Vec::new();
        for (t, ct) in c.coeffs.iter().enumerate().rev() {
            if ct.is_zero() {
                continue;
            }
            terms.push(self.term(ct, &format!("z{h}"), t, false));
        }
        terms.join(" + ")
    }

    fn term(&self, c: &TowerElem, var: &str, t: usize, bracket: bool) -> String {
        let mono = match t {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{t}"),
        };
        let simple = self.elem_height(c) == 0;
        let cs = self.fmt_elem(c);
        let wrapped = if simple {
            cs
        } else if bracket {
            format!("[{cs}]")
        } else if cs.contains('+') {
            format!("({cs})")
        } else {
            cs
        };
        if t == 0 {
            if bracket {
                wrapped
            } else {
                self.fmt_elem(c)
            }
        } else if c.0 == [1] {
            mono
        } else {
            format!("{wrapped}*{mono}")
        }
    }

    /// Polynomial in `var` with bracketed tower coefficients.
    pub fn fmt_poly(&self, f: &ResPoly, var: &str) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (t, c) in f.coeffs.iter().enumerate().rev() {
            if !c.is_zero() {
                terms.push(self.term(c, var, t, true));
            }
        }
        terms.join(" + ")
    }

    /// Parses an element written in `z1, z2, ...` (no `y`).
    pub fn parse_elem(&self, s: &str) -> Result<TowerElem> {
        let f = self.parse_poly(s)?;
        if !f.is_constant() {
            return Err(Error::Parse(format!(
                "`{s}` is not a residue field element"
            )));
        }
        Ok(f.coeff(0))
    }

    /// Parses a polynomial in `y` whose coefficients are expressions in `z1, z2, ...`.
    /// Brackets and parentheses group; juxtaposition multiplies.
    pub fn parse_poly(&self, s: &str) -> Result<ResPoly> {
        let src: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut parser = Parser {
            k: self,
            src: &src,
            pos: 0,
            text: s,
        };
        if src.is_empty() {
            return Err(parser.err("empty input"));
        }
        let f = parser.expr()?;
        if parser.pos != src.len() {
            return Err(parser.err("unexpected trailing input"));
        }
        Ok(f)
    }

    /// Display of a `y`-polynomial with the default variable.
    pub fn show(&self, f: &ResPoly) -> String {
        self.fmt_poly(f, "y")
    }
}

impl std::fmt::Display for TowerField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = format!("F_{}", self.p);
        for (h, m) in self.mods.iter().enumerate() {
            let var = format!("z{}", h + 1);
            let _ = write!(s, "[{var}]/({})", self.truncate(h).fmt_poly(m, &var));
        }
        write!(f, "{s}")
    }
}

struct Parser<'a> {
    k: &'a TowerField,
    src: &'a [char],
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.text))
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.src[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected a number"))
    }

    fn expr(&mut self) -> Result<ResPoly> {
        let mut acc = match self.peek() {
            Some('-') => {
                self.pos += 1;
                let t = self.term()?;
                self.k.psub(&ResPoly::zero(), &t)
            }
            Some('+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' {
                self.k.padd(&acc, &t)
            } else {
                self.k.psub(&acc, &t)
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ResPoly> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = self.k.pmul(&acc, &f);
                }
                Some('/') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    if !f.is_constant() || f.is_zero() {
                        return Err(self.err("division needs a non-zero constant"));
                    }
                    let inv = self.k.inv(&f.coeff(0))?;
                    acc = self.k.pscale(&acc, &inv);
                }
                Some(c) if c.is_ascii_digit() || matches!(c, 'y' | 'z' | '(' | '[') => {
                    let f = self.factor()?;
                    acc = self.k.pmul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<ResPoly> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.number()?;
            return Ok(self.k.ppow(&base, e as usize));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ResPoly> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.number()?;
                Ok(ResPoly::constant(self.k.from_int((n % self.k.p) as i64)))
            }
            Some('y') => {
                self.pos += 1;
                Ok(self.k.y())
            }
            Some('z') => {
                self.pos += 1;
                let h = self.number()? as usize;
                if h == 0 || h > self.k.height() {
                    return Err(self.err(&format!("unknown generator z{h}")));
                }
                Ok(ResPoly::constant(self.k.gen(h)))
            }
            Some(open @ ('(' | '[')) => {
                self.pos += 1;
                let inner = self.expr()?;
                let close = if open == '(' { ')' } else { ']' };
                if self.peek() != Some(close) {
                    return Err(self.err(&format!("expected `{close}`")));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some('-') => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(self.k.psub(&ResPoly::zero(), &f))
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
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
