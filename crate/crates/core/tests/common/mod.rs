//! Fixtures, random generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use keypoly::augment::ContinuousChain;
use keypoly::value::{q_frac, q_int};
use keypoly::{InductiveValuation, Poly, ResPoly, TowerElem, TowerField, Value};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn p(s: &str) -> Poly {
    s.parse().unwrap()
}

pub fn v(s: &str) -> Value {
    s.parse().unwrap()
}

pub fn chain(prime: u64, steps: &[(&str, &str)]) -> InductiveValuation {
    let steps: Vec<(Poly, Value)> = steps.iter().map(|(f, g)| (p(f), v(g))).collect();
    InductiveValuation::new(prime, &steps, None).unwrap()
}

pub fn nu1() -> InductiveValuation {
    chain(2, &[("x", "1/2")])
}

pub fn nu2() -> InductiveValuation {
    chain(2, &[("x", "1/2"), ("x^2+2", "3/2")])
}

/// Incommensurable: `[(x, (0, 1))]` over `v_2`.
pub fn nu_inf() -> InductiveValuation {
    chain(2, &[("x", "(0,1)")])
}

pub fn nu_p3() -> InductiveValuation {
    chain(3, &[("x", "1/2")])
}

pub fn gauss2() -> InductiveValuation {
    chain(2, &[("x", "1")])
}

/// Residue field F_4.
pub fn nu3() -> InductiveValuation {
    chain(2, &[("x", "1/2"), ("x^4+2x^2+4", "5/2")])
}

/// Residue field F_9 with `e = 2` at the top.
pub fn nu_p3b() -> InductiveValuation {
    chain(3, &[("x", "1/2"), ("x^4+9", "9/4")])
}

pub fn named_commensurable() -> Vec<(&'static str, InductiveValuation)> {
    vec![
        ("nu1", nu1()),
        ("nu2", nu2()),
        ("nu_p3", nu_p3()),
        ("gauss2", gauss2()),
        ("nu3", nu3()),
        ("nu_p3b", nu_p3b()),
    ]
}

/// `phi_i = x - (2^(i+1) - 2)`, `gamma_i = i + 1` over `v_2`.
pub fn lambda(len: usize) -> ContinuousChain {
    let family: Vec<(Poly, Value)> = (1..=len as i64)
        .map(|i| {
            let c = (1i64 << (i + 1)) - 2;
            (Poly::new(vec![q_int(-c), q_int(1)]), Value::int(i + 1))
        })
        .collect();
    ContinuousChain::new(2, &[], &family, 0).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator and denominator of absolute value at most `h`; integers half
/// of the time, and denominators biased towards powers of `p`.
pub fn rand_q(r: &mut ChaCha8Rng, h: i64, p: u64) -> keypoly::Q {
    let n = r.gen_range(-h..=h);
    match r.gen_range(0..4) {
        0 | 1 => q_int(n),
        2 => {
            let mut d = 1i64;
            while d * (p as i64) <= h && r.gen_bool(0.5) {
                d *= p as i64;
            }
            q_frac(n, d)
        }
        _ => q_frac(n, r.gen_range(1..=h)),
    }
}

/// A non-zero polynomial of degree at most `deg`.
pub fn rand_poly(r: &mut ChaCha8Rng, deg: usize, h: i64, p: u64) -> Poly {
    loop {
        let d = r.gen_range(0..=deg);
        let f = Poly::new((0..=d).map(|_| rand_q(r, h, p)).collect());
        if !f.is_zero() {
            return f;
        }
    }
}

/// Random polynomial that is often divisible by a power of `phi` or by an equivalent of it,
/// so that `s(f) > 0` and multiple residual factors show up.
pub fn rand_structured(r: &mut ChaCha8Rng, nu: &InductiveValuation, deg: usize, h: i64) -> Poly {
    let mut f = rand_poly(r, deg, h, nu.p());
    if r.gen_bool(0.3) {
        f = &f * &nu.phi().pow(r.gen_range(1..=2));
    }
    if r.gen_bool(0.3) {
        let bump = Poly::new(vec![keypoly::value::q_int(nu.p() as i64)]);
        f = &f * &(nu.phi() + &bump);
    }
    f
}

pub fn rand_monic(r: &mut ChaCha8Rng, deg: usize, h: i64, p: u64) -> Poly {
    let mut c: Vec<_> = (0..deg).map(|_| rand_q(r, h, p)).collect();
    c.push(q_int(1));
    Poly::new(c)
}

pub fn f4() -> TowerField {
    let f2 = TowerField::new(2).unwrap();
    let psi = f2.parse_poly("y^2 + y + 1").unwrap();
    f2.extend(&psi).unwrap().0
}

/// The small finite fields used by the finite-field checks, with their orders.
pub fn small_fields() -> Vec<(&'static str, TowerField)> {
    let f2 = TowerField::new(2).unwrap();
    let f3 = TowerField::new(3).unwrap();
    let f5 = TowerField::new(5).unwrap();
    let f7 = TowerField::new(7).unwrap();
    let f4 = f4();
    let f8 = f2.extend(&f2.parse_poly("y^3 + y + 1").unwrap()).unwrap().0;
    let f9 = f3.extend(&f3.parse_poly("y^2 + 1").unwrap()).unwrap().0;
    let f16 = f4
        .extend(&f4.parse_poly("y^2 + y + z1").unwrap())
        .unwrap()
        .0;
    vec![
        ("F2", f2),
        ("F3", f3),
        ("F4", f4),
        ("F5", f5),
        ("F7", f7),
        ("F8", f8),
        ("F9", f9),
        ("F16", f16),
    ]
}

pub fn rand_respoly(k: &TowerField, r: &mut ChaCha8Rng, deg: usize, monic: bool) -> ResPoly {
    let mut c: Vec<TowerElem> = (0..deg).map(|_| k.random_elem(r)).collect();
    c.push(if monic { k.one() } else { nonzero(k, r) });
    ResPoly::new(c)
}

pub fn nonzero(k: &TowerField, r: &mut ChaCha8Rng) -> TowerElem {
    loop {
        let a = k.random_elem(r);
        if !a.is_zero() {
            return a;
        }
    }
}

/// Irreducibility by trial division against every monic polynomial of degree `1..=deg/2`.
pub fn irreducible_by_trial_division(k: &TowerField, f: &ResPoly) -> bool {
    let n = f.deg();
    for d in 1..=n / 2 {
        for g in k.monic_polys(d).unwrap() {
            if k.pdivides(&g, f) {
                return false;
            }
        }
    }
    true
}

/// `f | g` in the graded algebra by search: some `h = sum_s c_s phi^s` with each `c_s` of
/// degree `< n` and homogeneous of the forced value satisfies `mu(g - f h) > mu(g)`.
/// Candidates run over every residue of every coefficient, so this enumerates all
/// homogeneous elements of the right degree up to the bound. The bound
/// `max(deg g - deg f + 2, deg g + n - 1)` is never binding: a quotient has `phi`-index at
/// most `s'(g) <= deg g / n`.
pub fn divides_by_search(nu: &InductiveValuation, f: &Poly, g: &Poly) -> bool {
    let n = nu.degree();
    let bound = (g.deg() + 2).saturating_sub(f.deg()).max(g.deg() + n - 1);
    let beta = &nu.mu(g) - &nu.mu(f);
    let r = nu.len();
    let k = nu.field();
    let q = k.order_u64().unwrap();
    // Terms c_s phi^s available at value beta.
    let mut slots: Vec<Vec<Poly>> = Vec::new();
    for s in 0..=bound / n {
        let target = &beta - &nu.gamma().mul_int(s as i64);
        if nu.canonical_monomial_at(r, &target).is_err() {
            continue;
        }
        let phis = nu.phi().pow(s);
        let mut options = vec![Poly::zero()];
        for idx in 1..q {
            let unit = keypoly::HomogeneousUnit::new(target.clone(), k.element(idx));
            let c = nu.lift_at(r, &unit).unwrap();
            let term = &c * &phis;
            if term.deg() <= bound {
                options.push(term);
            }
        }
        slots.push(options);
    }
    let mut idx = vec![0usize; slots.len()];
    let goal = nu.mu(g);
    loop {
        let h = slots
            .iter()
            .zip(&idx)
            .fold(Poly::zero(), |acc, (opts, &i)| &acc + &opts[i]);
        if !h.is_zero() && nu.mu(&(g - &(f * &h))) > goal {
            return true;
        }
        let mut j = 0;
        loop {
            if j == slots.len() {
                return false;
            }
            idx[j] += 1;
            if idx[j] < slots[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `v_p` of a non-zero integer, independently of the library.
pub fn vp_int(mut n: BigInt, p: u64) -> i64 {
    let p = BigInt::from(p);
    let mut k = 0;
    while (&n % &p) == BigInt::from(0) {
        n /= &p;
        k += 1;
    }
    k
}

/// Degree-two family over `[(x, 1/2)]`: `phi_i = x^2 - 2 (4^i - 1) / 3`, `gamma_i = 2 i + 1`.
/// The constants converge 2-adically to `-2/3`, so `x^2 + 2/3` is unstable.
pub fn family2(len: usize) -> ContinuousChain {
    let base = vec![(p("x"), v("1/2"))];
    let family: Vec<(Poly, Value)> = (1..=len as i64)
        .map(|i| {
            let b = 2 * ((1i64 << (2 * i)) - 1) / 3;
            (
                Poly::new(vec![q_int(-b), q_int(0), q_int(1)]),
                Value::int(2 * i + 1),
            )
        })
        .collect();
    ContinuousChain::new(2, &base, &family, 0).unwrap()
}
