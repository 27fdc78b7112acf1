//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use keypoly::augment::{augment, limit_augment, Stability};
use keypoly::keys::{divides_mu, enumerate_keys, graded_factorization, is_key, lift_key};
use keypoly::value::q_int;
use keypoly::{HomogeneousUnit, InductiveValuation, Poly, ResPoly, Value};
use rand::Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(start: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    let took = start.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(())
}

fn fixture_pipeline() -> Check {
    let start = Instant::now();
    let n1 = nu1();
    let k = n1.field().clone();
    ensure!(
        n1.ram_data().map_err(err)? == (2, p("1/2")),
        "nu1: (e, u) = {:?}",
        n1.ram_data()
    );
    let r = n1.residual_poly(&p("x^2+2")).map_err(err)?;
    ensure!(
        r == k.parse_poly("y+1").unwrap(),
        "nu1: R(x^2+2) = {}",
        k.show(&r)
    );
    ensure!(
        is_key(&n1, &p("x^2+2")).map_err(err)?,
        "nu1: x^2+2 is not a key"
    );

    let n2 = nu2();
    ensure!(
        n2.ram_data().map_err(err)? == (1, p("1/4*x")),
        "nu2: (e, u) = {:?}",
        n2.ram_data()
    );
    let f = p("x^4+4");
    ensure!(n2.mu(&f) == v("3"), "nu2: mu(x^4+4) = {}", n2.mu(&f));
    let r = n2.residual_poly(&f).map_err(err)?;
    let y1 = k.parse_poly("y+1").unwrap();
    ensure!(r == k.ppow(&y1, 2), "nu2: R(x^4+4) = {}", k.show(&r));
    let chi = lift_key(&n2, &y1).map_err(err)?;
    ensure!(chi == p("x^2+2x+2"), "nu2: lift_key(y+1) = {chi}");
    let gf = graded_factorization(&n2, &f, 0).map_err(err)?;
    ensure!(
        gf.factors == vec![(p("x^2+2x+2"), 2)],
        "nu2: factors {:?}",
        gf.factors
    );
    ensure!(
        gf.total_value(&n2) == n2.mu(&f),
        "nu2: accounting {}",
        gf.accounting(&n2)
    );
    ensure!(
        &p("x^2+2x+2") * &p("x^2-2x+2") == f,
        "(x^2+2x+2)(x^2-2x+2) != x^4+4"
    );
    within(start, Duration::from_secs(1), "pipeline")?;
    Ok(format!("{:?}", start.elapsed()))
}

fn valuation_axioms() -> Check {
    let start = Instant::now();
    let mut r = rng(2);
    let chains = [
        ("nu1", nu1()),
        ("nu2", nu2()),
        ("nu_inf", nu_inf()),
        ("nu_p3", nu_p3()),
    ];
    for (name, nu) in &chains {
        for _ in 0..500 {
            let f = rand_poly(&mut r, 24, 10_000, nu.p());
            let g = rand_poly(&mut r, 24, 10_000, nu.p());
            let (mf, mg) = (nu.mu(&f), nu.mu(&g));
            ensure!(
                nu.mu(&(&f * &g)) == &mf + &mg,
                "{name}: mu(fg) != mu(f) + mu(g) for f = {f}, g = {g}"
            );
            ensure!(
                nu.mu(&(&f + &g)) >= Value::min(mf, mg),
                "{name}: mu(f+g) < min for f = {f}, g = {g}"
            );
        }
    }
    within(start, Duration::from_secs(30), "axioms")?;
    Ok(format!("4 chains x 500 pairs, {:?}", start.elapsed()))
}

fn residual_operator() -> Check {
    let start = Instant::now();
    let mut r = rng(3);
    for (name, nu) in named_commensurable() {
        let k = nu.field().clone();
        let e = nu.e().unwrap() as usize;
        let top = nu.len();
        for _ in 0..300 {
            let f = rand_structured(&mut r, &nu, 8, 50);
            let g = rand_structured(&mut r, &nu, 8, 50);
            let fg = &f * &g;
            let (df, dg, dfg) = (
                nu.hmu_decompose(&f).map_err(err)?,
                nu.hmu_decompose(&g).map_err(err)?,
                nu.hmu_decompose(&fg).map_err(err)?,
            );
            ensure!(
                dfg.r == k.pmul(&df.r, &dg.r),
                "{name}: R(fg) != R(f)R(g) for f = {f}, g = {g}"
            );
            ensure!(
                df.r.deg() * e == df.s_prime - df.s,
                "{name}: deg R(f) != (s' - s)/e for {f}"
            );
            ensure!(!df.r.coeff(0).is_zero(), "{name}: R(f)(0) = 0 for {f}");
            ensure!(dfg.s == df.s + dg.s, "{name}: s not additive");
            ensure!(
                dfg.s_prime == df.s_prime + dg.s_prime,
                "{name}: s' not additive"
            );
            let prod = nu.unit_mul_at(top, &df.nlc, &dg.nlc).map_err(err)?;
            ensure!(
                dfg.nlc == prod,
                "{name}: nlc not multiplicative for f = {f}, g = {g}"
            );
        }
    }
    Ok(format!("6 chains x 300 pairs, {:?}", start.elapsed()))
}

fn divisibility_oracle() -> Check {
    let start = Instant::now();
    let mut r = rng(4);
    let (mut yes, mut no) = (0, 0);
    for nu in [nu1(), nu2()] {
        for t in 0..100 {
            // Random monic divisors are mostly units; a phi factor makes them not.
            let f = if r.gen_bool(0.5) {
                let d = r.gen_range(0..=3 - nu.degree());
                &rand_monic(&mut r, d, 8, 2) * nu.phi()
            } else {
                let d = r.gen_range(1..=3);
                rand_monic(&mut r, d, 8, 2)
            };
            let g = if t % 2 == 0 {
                // Often divisible: f times a cofactor plus noise of high value.
                let h = rand_poly(&mut r, 6 - f.deg(), 8, 2);
                let noise = &rand_poly(&mut r, 5, 8, 2) * &Poly::constant(q_int(64));
                &(&f * &h) + &noise
            } else {
                rand_poly(&mut r, 6, 8, 2)
            };
            if g.is_zero() {
                continue;
            }
            let fast = divides_mu(&nu, &f, &g).map_err(err)?;
            let slow = divides_by_search(&nu, &f, &g);
            ensure!(
                fast == slow,
                "{nu}: divides_mu({f}, {g}) = {fast}, search says {slow}"
            );
            if fast {
                yes += 1;
            } else {
                no += 1;
            }
        }
    }
    ensure!(
        yes >= 20 && no >= 20,
        "unbalanced sample: {yes} divisible, {no} not"
    );
    Ok(format!(
        "{} pairs ({yes} divisible), {:?}",
        yes + no,
        start.elapsed()
    ))
}

fn bijection_slice() -> Check {
    let nu = nu1();
    let keys = enumerate_keys(&nu, 2).map_err(err)?;
    ensure!(keys.len() == 3, "expected 3 classes, got {keys:?}");
    ensure!(keys[0] == p("x") && keys[1] == p("x^2+2"), "keys {keys:?}");
    ensure!(
        keys[2].deg() == 4,
        "third key {} is not of degree 4",
        keys[2]
    );
    let k = nu.field();
    let quad = k.parse_poly("y^2+y+1").unwrap();
    ensure!(
        nu.residual_poly(&keys[2]).map_err(err)? == quad,
        "R of {} is not y^2+y+1",
        keys[2]
    );
    let e = nu.e().unwrap() as usize;
    let mut ideals = Vec::new();
    for (i, a) in keys.iter().enumerate() {
        for b in &keys[i + 1..] {
            ensure!(!nu.is_equivalent(a, b), "{a} ~ {b}");
        }
        ideals.push(nu.residual_ideal(a).map_err(err)?);
        if a != nu.phi() {
            let rd = nu.residual_poly(a).map_err(err)?.deg();
            ensure!(a.deg() == e * nu.degree() * rd, "deg {a} != e n deg R");
        }
        ensure!(
            nu.mu(a).div_int(a.deg() as i64) == nu.cmu(),
            "mu({a})/deg != C(mu)"
        );
    }
    for (i, a) in ideals.iter().enumerate() {
        ensure!(
            !ideals[i + 1..].contains(a),
            "repeated residual ideal {}",
            nu.fmt_ideal(a)
        );
    }
    Ok(keys
        .iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(", "))
}

/// `u*` with the right value and a random residue, or `phi*` a nearby key of the same degree.
fn random_alternatives(nu: &InductiveValuation, r: &mut rand_chacha::ChaCha8Rng) -> (Poly, Poly) {
    let top = nu.len();
    let k = nu.field();
    let e = nu.e().unwrap() as i64;
    let target = -nu.gamma().mul_int(e);
    let u_star = nu
        .lift_at(top, &HomogeneousUnit::new(target, nonzero(k, r)))
        .unwrap();
    let shift = if r.gen_bool(0.5) && nu.canonical_monomial_at(top, nu.gamma()).is_ok() {
        nu.lift_at(
            top,
            &HomogeneousUnit::new(nu.gamma().clone(), k.random_elem(r)),
        )
        .unwrap()
    } else {
        let a = rand_poly(r, nu.degree() - 1, 20, nu.p());
        let gap = nu.gamma() - &nu.mu(&a);
        let Value::Rank1(q) = gap else { unreachable!() };
        let c = q.ceil().to_integer();
        let c: i64 = c.try_into().unwrap();
        &a * &Poly::constant(nu.base().p_pow(c.max(0) + r.gen_range(0..2)))
    };
    (u_star, nu.phi() + &shift)
}

fn transform_laws() -> Check {
    let start = Instant::now();
    let n1 = nu1();
    let t = n1.transform_u(&p("x^2+2"), &p("3/2")).map_err(err)?;
    let k2 = n1.field();
    ensure!(
        t.holds() && t.factor == k2.one() && t.observed == k2.parse_poly("y+1").unwrap(),
        "nu1 with u* = 3/2: {t:?}"
    );
    let n3 = nu_p3();
    let k3 = n3.field();
    let t = n3.transform_u(&p("x^2+3"), &p("2/3")).map_err(err)?;
    ensure!(
        t.holds() && t.observed == k3.parse_poly("y+2").unwrap(),
        "p = 3 with u* = 2/3: {t:?}"
    );
    ensure!(
        n3.residual_poly(&p("x^2+3")).map_err(err)? == k3.parse_poly("y+1").unwrap(),
        "p = 3: R"
    );
    let g = gauss2();
    let t = g.transform_phi(&p("x"), &p("x+2")).map_err(err)?;
    ensure!(
        t.holds()
            && t.factor == k2.one()
            && t.observed_s == 0
            && t.observed == k2.parse_poly("y+1").unwrap(),
        "gauss with phi* = x+2: {t:?}"
    );
    let d = g.hmu_decompose(&p("x")).map_err(err)?;
    ensure!(
        d.s == 1 && d.r.is_one(),
        "gauss: s(x), R(x) = {}, {:?}",
        d.s,
        d.r
    );

    let mut r = rng(6);
    let mut counts = Vec::new();
    for (name, nu) in named_commensurable() {
        let (mut nu_checks, mut nphi_checks, mut nontrivial) = (0, 0, 0);
        let mut tries = 0;
        while (nu_checks < 100 || nphi_checks < 100) && tries < 2000 {
            tries += 1;
            let f = rand_structured(&mut r, &nu, 8, 30);
            let (u_star, phi_star) = random_alternatives(&nu, &mut r);
            if nu_checks < 100 {
                let t = nu.transform_u(&f, &u_star).map_err(err)?;
                ensure!(
                    t.holds(),
                    "{name}: u-law fails for f = {f}, u* = {u_star}: {t:?}"
                );
                nu_checks += 1;
            }
            if nphi_checks < 100 && is_key(&nu, &phi_star).map_err(err)? {
                let t = nu.transform_phi(&f, &phi_star).map_err(err)?;
                ensure!(
                    t.holds(),
                    "{name}: phi-law fails for f = {f}, phi* = {phi_star}: {t:?}"
                );
                if !t.factor.is_zero() {
                    nontrivial += 1;
                }
                nphi_checks += 1;
            }
        }
        ensure!(
            nu_checks >= 100 && nphi_checks >= 100,
            "{name}: only {nu_checks}/{nphi_checks} checks"
        );
        counts.push(format!("{name} tau!=0: {nontrivial}"));
    }
    Ok(format!("{}; {:?}", counts.join(", "), start.elapsed()))
}

fn augmentation_contract() -> Check {
    let n1 = nu1();
    let chi = p("x^2+2");
    let n2 = augment(&n1, &chi, &v("3/2")).map_err(err)?;
    ensure!(
        n2.steps() == nu2().steps(),
        "augment(nu1, x^2+2, 3/2) = {n2}"
    );
    let mut r = rng(7);
    let mut strict = 0;
    for _ in 0..500 {
        let mut f = rand_poly(&mut r, 10, 100, 2);
        if r.gen_bool(0.4) {
            f = &f * &chi.pow(r.gen_range(1..=2));
        }
        let (a, b) = (n1.mu(&f), n2.mu(&f));
        ensure!(a <= b, "mu1({f}) = {a} > mu2 = {b}");
        let div = divides_mu(&n1, &chi, &f).map_err(err)?;
        ensure!(
            (a == b) == !div,
            "{f}: mu1 = {a}, mu2 = {b}, chi | f is {div}"
        );
        if a < b {
            strict += 1;
        }
    }
    ensure!(strict >= 50, "only {strict} strict increases in the sample");
    Ok(format!("500 samples, {strict} strict"))
}

fn limit_fixture() -> Check {
    let start = Instant::now();
    let l = lambda(6);
    let st = l.stability(&p("x")).map_err(err)?;
    ensure!(
        st == Stability::Stable {
            value: v("1"),
            witness: 1
        },
        "stability(x) = {st:?}"
    );
    let st = l.stability(&p("x+2")).map_err(err)?;
    let want: Vec<Value> = (2..=7).map(Value::int).collect();
    ensure!(
        st == Stability::UnstableWithinPrefix { values: want },
        "stability(x+2) = {st:?}"
    );
    let lim = limit_augment(&l, &p("x+2"), Some(&v("(1,0)")), 0).map_err(err)?;
    for (f, want) in [("x+2", "(1,0)"), ("x", "(0,1)"), ("x^2+2x", "(1,1)")] {
        let got = lim.eval(&p(f)).map_err(err)?;
        ensure!(got == v(want), "limit eval({f}) = {got}, expected {want}");
    }
    let mut r = rng(8);
    for _ in 0..200 {
        let f = rand_poly(&mut r, 8, 1000, 2);
        let g = rand_poly(&mut r, 8, 1000, 2);
        let (ef, eg) = (lim.eval(&f).map_err(err)?, lim.eval(&g).map_err(err)?);
        ensure!(
            lim.eval(&(&f * &g)).map_err(err)? == &ef + &eg,
            "limit: eval(fg) for {f}, {g}"
        );
        ensure!(
            lim.eval(&(&f + &g)).map_err(err)? >= Value::min(ef.clone(), eg),
            "limit: eval(f+g)"
        );
        for a in 1..=l.len() {
            ensure!(
                l.member(a).mu(&f) <= ef,
                "mu_{a}({f}) exceeds the limit value"
            );
        }
    }
    within(start, Duration::from_secs(5), "limit")?;
    Ok(format!("{:?}", start.elapsed()))
}

fn incommensurable_fixture() -> Check {
    let nu = nu_inf();
    let mut r = rng(9);
    for _ in 0..200 {
        let f = rand_poly(&mut r, 12, 1000, 2);
        let rep = nu.expansion(&f).map_err(err)?;
        ensure!(rep.argmin.len() == 1, "argmin of {f} is {:?}", rep.argmin);
    }
    let mut keys_seen = 0;
    for _ in 0..200 {
        let chi = if r.gen_bool(0.7) {
            Poly::new(vec![rand_q(&mut r, 64, 2), q_int(1)])
        } else {
            {
                let d = r.gen_range(2..=4);
                rand_monic(&mut r, d, 16, 2)
            }
        };
        let closed = chi.deg() == 1 && {
            let a = chi.coeff(0);
            a == q_int(0) || nu.base().ord(&a).unwrap() >= 1
        };
        let got = is_key(&nu, &chi).map_err(err)?;
        ensure!(got == closed, "is_key({chi}) = {got}");
        keys_seen += closed as usize;
    }
    let keys = enumerate_keys(&nu, 3).map_err(err)?;
    ensure!(keys == vec![p("x")], "enumerate_keys = {keys:?}");
    Ok(format!("{keys_seen} keys among 200 candidates"))
}

fn finite_fields() -> Check {
    let start = Instant::now();
    let mut r = rng(10);
    let fields = small_fields();
    for (name, k) in fields
        .iter()
        .filter(|(n, _)| ["F2", "F3", "F4"].contains(n))
    {
        for _ in 0..500 {
            let deg = r.gen_range(1..=12);
            let monic = r.gen_bool(0.5);
            let f = rand_respoly(k, &mut r, deg, monic);
            let fs = k.factor(&f, r.gen()).map_err(err)?;
            let mut prod = ResPoly::constant(f.leading().unwrap().clone());
            for (g, m) in &fs {
                ensure!(
                    g.is_monic() && k.is_irreducible(g).map_err(err)?,
                    "{name}: bad factor {}",
                    k.show(g)
                );
                prod = k.pmul(&prod, &k.ppow(g, *m));
            }
            ensure!(
                prod == f,
                "{name}: factors of {} multiply to {}",
                k.show(&f),
                k.show(&prod)
            );
        }
    }
    let mut checked = 0;
    for (name, k) in &fields {
        let q = k.order_u64().unwrap();
        for d in 1..=6usize {
            let polys: Vec<ResPoly> = if q.pow(d as u32) <= 4096 {
                k.monic_polys(d).map_err(err)?.collect()
            } else {
                (0..30).map(|_| rand_respoly(k, &mut r, d, true)).collect()
            };
            for f in polys {
                let fast = k.is_irreducible(&f).map_err(err)?;
                ensure!(
                    fast == irreducible_by_trial_division(k, &f),
                    "{name}: {}",
                    k.show(&f)
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} irreducibility checks, {:?}",
        start.elapsed()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("fixture pipeline nu1 -> nu2", fixture_pipeline),
        ("valuation axioms on four chains", valuation_axioms),
        ("residual polynomial operator laws", residual_operator),
        ("graded divisibility vs search oracle", divisibility_oracle),
        (
            "key classes for nu1 up to residual degree 2",
            bijection_slice,
        ),
        ("change of normalizer and of last key", transform_laws),
        ("augmentation contract nu1 -> nu2", augmentation_contract),
        (
            "limit augmentation over the family x - (2^(i+1) - 2)",
            limit_fixture,
        ),
        (
            "incommensurable chain [(x, (0, 1))]",
            incommensurable_fixture,
        ),
        ("finite field factoring and irreducibility", finite_fields),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2}: PASS  {title} [{detail}] ({took:.2?})",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {title}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
