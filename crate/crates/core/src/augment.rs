//! Ordinary augmentations, continuous families of augmentations, stability of
//! polynomials along a family, and limit augmentations.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chain::InductiveValuation;
use crate::error::{domain, Error, Result};
use crate::keys::{classify_key, divides_mu, KeyVerdict};
use crate::poly::Poly;
use crate::value::{q_int, Embedding, Value};

/// `[nu; chi, gamma]`. A key equivalent to the top key replaces the top step.
pub fn augment(nu: &InductiveValuation, chi: &Poly, gamma: &Value) -> Result<InductiveValuation> {
    if gamma.is_infinite() {
        return domain("augmentation precondition violated: gamma must be finite");
    }
    let verdict = classify_key(nu, chi)?;
    if let KeyVerdict::NotKey(reason) = &verdict {
        return domain(format!(
            "augmentation precondition violated: {chi} is not a key polynomial ({reason})"
        ));
    }
    let emb = if nu.is_rank2() {
        nu.embedding()
    } else {
        Embedding::infer(gamma)
    };
    let lift = |v: &Value| match v {
        Value::Rank1(q) if nu.is_rank2() || gamma.rank() == Some(2) => emb.embed(q.clone()),
        _ => v.clone(),
    };
    let mu = nu.mu(chi);
    if lift(gamma) <= lift(&mu) {
        return domain(format!(
            "augmentation precondition violated: gamma {gamma} must exceed mu(chi) = {mu}"
        ));
    }
    let mut steps = nu.steps();
    let replace = matches!(
        verdict,
        KeyVerdict::EquivalentToPhi | KeyVerdict::Incommensurable
    );
    if replace {
        steps.pop();
    }
    steps.push((chi.clone(), gamma.clone()));
    let explicit = (nu.is_rank2() || gamma.rank() == Some(2)).then_some(emb);
    InductiveValuation::new(nu.p(), &steps, explicit).map_err(|err| match err {
        Error::InvalidChain(msg) => {
            Error::Domain(format!("augmentation precondition violated: {msg}"))
        }
        other => other,
    })
}

/// `(mu(f), mu'(f), mu(f) == mu'(f))` for `nu'` obtained from `nu` by one augmentation.
pub fn compare_augmented(
    nu: &InductiveValuation,
    nu_prime: &InductiveValuation,
    f: &Poly,
) -> Result<(Value, Value, bool)> {
    let a = nu.steps();
    let b = nu_prime.steps();
    let appended = b.len() == a.len() + 1 && b[..a.len()] == a[..];
    let replaced = b.len() == a.len()
        && b[..a.len() - 1] == a[..a.len() - 1]
        && b[a.len() - 1].0.deg() == a[a.len() - 1].0.deg()
        && nu.is_equivalent(&b[a.len() - 1].0, &a[a.len() - 1].0);
    if nu.p() != nu_prime.p() || !(appended || replaced) {
        return domain("the second valuation is not an augmentation of the first");
    }
    let m = nu.mu(f);
    let mp = nu_prime.mu(f);
    let equal = nu_prime.normalize(&m) == mp;
    Ok((m, mp, equal))
}

/// Whether `nu'` agrees with `nu` on `f` exactly when the new key does not divide `f`.
pub fn augmentation_contract(
    nu: &InductiveValuation,
    chi: &Poly,
    nu_prime: &InductiveValuation,
    f: &Poly,
) -> Result<bool> {
    let (m, mp, equal) = compare_augmented(nu, nu_prime, f)?;
    if f.is_zero() {
        return Ok(equal);
    }
    let le = nu_prime.normalize(&m) <= mp;
    Ok(le && equal != divides_mu(nu, chi, f)?)
}

/// A finite strictly increasing prefix of a continuous family `mu_alpha = [mu_0; phi_alpha, gamma_alpha]`.
#[derive(Clone, Debug)]
pub struct ContinuousChain {
    prime: u64,
    base: Vec<(Poly, Value)>,
    family: Vec<(Poly, Value)>,
    members: Vec<InductiveValuation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability {
    /// `mu_alpha(f)` is constant from the 1-based index `witness` on.
    Stable { value: Value, witness: usize },
    /// `mu_alpha(f)` for every index of the prefix, strictly increasing.
    UnstableWithinPrefix { values: Vec<Value> },
}

impl ContinuousChain {
    /// Checks equal degrees, strictly increasing values, and for `alpha < beta` that
    /// `phi_beta` is a key for `mu_alpha`, not equivalent to `phi_alpha`, with
    /// `mu_beta = [mu_alpha; phi_beta, gamma_beta]` on sample polynomials. Adjacent pairs are
    /// always checked; a few non-adjacent pairs are sampled with `seed`.
    pub fn new(
        prime: u64,
        base: &[(Poly, Value)],
        family: &[(Poly, Value)],
        seed: u64,
    ) -> Result<ContinuousChain> {
        let bad = |msg: String| Err(Error::InvalidChain(msg));
        if family.len() < 2 {
            return bad("a continuous family needs at least two members".into());
        }
        let d = family[0].0.deg();
        for (a, (phi, _)) in family.iter().enumerate().skip(1) {
            if phi.deg() != d {
                return bad(format!(
                    "family degrees differ: deg(phi_1) = {d} but deg(phi_{}) = {}",
                    a + 1,
                    phi.deg()
                ));
            }
        }
        for a in 1..family.len() {
            if family[a].1 <= family[a - 1].1 {
                return bad(format!(
                    "family values must increase strictly: gamma_{} = {} after gamma_{} = {}",
                    a + 1,
                    family[a].1,
                    a,
                    family[a - 1].1
                ));
            }
        }
        let mut members = Vec::with_capacity(family.len());
        for (a, step) in family.iter().enumerate() {
            let mut steps = base.to_vec();
            steps.push(step.clone());
            let nu = InductiveValuation::new(prime, &steps, None)
                .map_err(|err| Error::InvalidChain(format!("member {}: {err}", a + 1)))?;
            if nu.is_rank2() {
                return bad(format!(
                    "member {}: family values must have rank one",
                    a + 1
                ));
            }
            members.push(nu);
        }
        let chain = ContinuousChain {
            prime,
            base: base.to_vec(),
            family: family.to_vec(),
            members,
        };
        let n = family.len();
        let mut pairs: Vec<(usize, usize)> = (0..n - 1).map(|a| (a, a + 1)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if n > 2 {
            for _ in 0..n.min(8) {
                let a = rng.gen_range(0..n - 2);
                let b = rng.gen_range(a + 2..n);
                pairs.push((a, b));
            }
        }
        for (a, b) in pairs {
            chain.check_pair(a, b, &mut rng)?;
        }
        Ok(chain)
    }

    fn check_pair(&self, a: usize, b: usize, rng: &mut ChaCha8Rng) -> Result<()> {
        let (ia, ib) = (a + 1, b + 1);
        let mu_a = &self.members[a];
        let mu_b = &self.members[b];
        let (phi_a, _) = &self.family[a];
        let (phi_b, gamma_b) = &self.family[b];
        let bad = |msg: String| Err(Error::InvalidChain(msg));
        if !crate::keys::is_key(mu_a, phi_b)? {
            return bad(format!(
                "phi_{ib} = {phi_b} is not a key polynomial for mu_{ia}"
            ));
        }
        if mu_a.is_equivalent(phi_b, phi_a) {
            return bad(format!(
                "phi_{ib} = {phi_b} is mu_{ia}-equivalent to phi_{ia}"
            ));
        }
        let mut steps = mu_a.steps();
        steps.push((phi_b.clone(), gamma_b.clone()));
        let aug = InductiveValuation::new(self.prime, &steps, None).map_err(|err| {
            Error::InvalidChain(format!("mu_{ib} is not an augmentation of mu_{ia}: {err}"))
        })?;
        let deg = 2 * phi_a.deg() + 2;
        for _ in 0..16 {
            let f = random_poly(rng, deg, 64);
            if aug.mu(&f) != mu_b.mu(&f) {
                return bad(format!(
                    "mu_{ib} differs from [mu_{ia}; phi_{ib}, gamma_{ib}] at {f}"
                ));
            }
        }
        Ok(())
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn base(&self) -> &[(Poly, Value)] {
        &self.base
    }

    pub fn family(&self) -> &[(Poly, Value)] {
        &self.family
    }

    /// `mu_alpha`, 1-based.
    pub fn member(&self, alpha: usize) -> &InductiveValuation {
        &self.members[alpha - 1]
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.family[0].0.deg()
    }

    pub fn stability(&self, f: &Poly) -> Result<Stability> {
        if f.is_zero() {
            return domain("stability of the zero polynomial is undefined");
        }
        let mut values = Vec::with_capacity(self.len());
        for (a, mu) in self.members.iter().enumerate() {
            let rep = mu.expansion(f)?;
            if rep.argmin == [0] {
                return Ok(Stability::Stable {
                    value: rep.mu,
                    witness: a + 1,
                });
            }
            values.push(rep.mu);
        }
        for a in 1..values.len() {
            if values[a] <= values[a - 1] {
                return domain(format!(
                    "{f} has no stability witness but mu_{}(f) = {} does not exceed mu_{}(f) = {}",
                    a + 1,
                    values[a],
                    a,
                    values[a - 1]
                ));
            }
        }
        Ok(Stability::UnstableWithinPrefix { values })
    }

    /// The stable value `mu_A(f)`, or a resource error when no member of the prefix
    /// witnesses stability.
    pub fn stable_value(&self, f: &Poly) -> Result<Value> {
        if f.is_zero() {
            return Ok(Value::Infinity);
        }
        match self.stability(f)? {
            Stability::Stable { value, .. } => Ok(value),
            Stability::UnstableWithinPrefix { .. } => Err(Error::Resource(format!(
                "{f} is not stable within the given {} family members; supply a longer prefix",
                self.len()
            ))),
        }
    }
}

/// `[mu_A; phi, gamma]` for a continuous family `A`.
#[derive(Clone, Debug)]
pub struct LimitValuation {
    chain: ContinuousChain,
    phi: Poly,
    gamma: Value,
}

/// Limit augmentation; `gamma` defaults to `(1, 0)`, above every rank-one value.
pub fn limit_augment(
    chain: &ContinuousChain,
    phi: &Poly,
    gamma: Option<&Value>,
    seed: u64,
) -> Result<LimitValuation> {
    if !phi.is_monic() || phi.is_constant() {
        return domain(format!("limit key {phi} must be monic and non-constant"));
    }
    let values = match chain.stability(phi)? {
        Stability::Stable { value, witness } => {
            return domain(format!(
                "limit key {phi} is stable (value {value} from member {witness} on)"
            ))
        }
        Stability::UnstableWithinPrefix { values } => values,
    };
    if phi.deg() > chain.degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let deg = rng.gen_range(chain.degree()..phi.deg());
            let mut g = random_poly(&mut rng, deg.saturating_sub(1), 16);
            g = &g + &Poly::monomial(q_int(1), deg);
            if let Stability::UnstableWithinPrefix { .. } = chain.stability(&g)? {
                return domain(format!(
                    "limit key {phi} is not of minimal degree: {g} is also unstable"
                ));
            }
        }
    }
    let gamma = gamma
        .cloned()
        .unwrap_or_else(|| Value::pair(q_int(1), q_int(0)));
    if gamma.is_infinite() {
        return domain("limit value must be finite");
    }
    let top = values.last().unwrap();
    // Rank-one values compare as minor coordinates of rank-two ones.
    if gamma <= *top {
        return domain(format!(
            "limit value {gamma} must exceed every mu_alpha(phi); mu_{}(phi) = {top}",
            values.len()
        ));
    }
    Ok(LimitValuation {
        chain: chain.clone(),
        phi: phi.clone(),
        gamma,
    })
}

impl LimitValuation {
    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    pub fn gamma(&self) -> &Value {
        &self.gamma
    }

    pub fn chain(&self) -> &ContinuousChain {
        &self.chain
    }

    /// `min_s mu_A(g_s) + s * gamma` over the `phi`-expansion of `g`.
    pub fn eval(&self, g: &Poly) -> Result<Value> {
        if g.is_zero() {
            return Ok(Value::Infinity);
        }
        let mut best = Value::Infinity;
        for (s, c) in g.expand(&self.phi)?.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = &self.chain.stable_value(c)? + &self.gamma.mul_int(s as i64);
            best = Value::min(best, v);
        }
        Ok(best)
    }
}

/// Random polynomial of degree at most `deg` with integer coefficients in `[-h, h]`.
fn random_poly(rng: &mut ChaCha8Rng, deg: usize, h: i64) -> Poly {
    Poly::new((0..=deg).map(|_| q_int(rng.gen_range(-h..=h))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        s.parse().unwrap()
    }

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn chain(prime: u64, steps: &[(&str, &str)]) -> InductiveValuation {
        let steps: Vec<(Poly, Value)> = steps.iter().map(|(f, g)| (p(f), v(g))).collect();
        InductiveValuation::new(prime, &steps, None).unwrap()
    }

    fn lambda(len: usize) -> ContinuousChain {
        let family: Vec<(Poly, Value)> = (1..=len as i64)
            .map(|i| {
                let c = (1i64 << (i + 1)) - 2;
                (Poly::new(vec![q_int(-c), q_int(1)]), Value::int(i + 1))
            })
            .collect();
        ContinuousChain::new(2, &[], &family, 0).unwrap()
    }

    #[test]
    fn augment_examples() {
        let n1 = chain(2, &[("x", "1/2")]);
        let n2 = augment(&n1, &p("x^2+2"), &v("3/2")).unwrap();
        assert_eq!(
            n2.steps(),
            chain(2, &[("x", "1/2"), ("x^2+2", "3/2")]).steps()
        );
        let err = augment(&n1, &p("x^2+2"), &v("1/2")).unwrap_err();
        assert_eq!(
            err,
            Error::Domain(
                "augmentation precondition violated: gamma 1/2 must exceed mu(chi) = 1".into()
            )
        );
        assert!(augment(&n1, &p("x"), &v("(0,1)")).is_err());
        let ni = augment(&n1, &p("x^2+2"), &v("(2,0)")).unwrap();
        assert!(!ni.is_commensurable());
        assert_eq!(ni.mu(&p("x^2+2")), v("(2,0)"));
        let replaced = augment(&n1, &p("x+4"), &v("3/2")).unwrap();
        assert_eq!(replaced.steps(), vec![(p("x+4"), v("3/2"))]);
        assert!(augment(&n1, &p("x^2+x"), &v("3")).is_err());
    }

    #[test]
    fn compare_examples() {
        let n1 = chain(2, &[("x", "1/2")]);
        let n2 = chain(2, &[("x", "1/2"), ("x^2+2", "3/2")]);
        assert_eq!(
            compare_augmented(&n1, &n2, &p("x")).unwrap(),
            (v("1/2"), v("1/2"), true)
        );
        assert_eq!(
            compare_augmented(&n1, &n2, &p("x^2+2")).unwrap(),
            (v("1"), v("3/2"), false)
        );
        assert_eq!(
            compare_augmented(&n1, &n2, &p("1")).unwrap(),
            (v("0"), v("0"), true)
        );
        let other = chain(3, &[("x", "1/2")]);
        assert!(compare_augmented(&n1, &other, &p("x")).is_err());
    }

    #[test]
    fn continuous_validation() {
        assert_eq!(lambda(4).len(), 4);
        let mixed = vec![(p("x"), v("1")), (p("x^2+2"), v("2"))];
        let err = ContinuousChain::new(2, &[], &mixed, 0).unwrap_err();
        assert!(err.to_string().contains("degrees differ"), "{err}");
        let decreasing = vec![(p("x-2"), v("3")), (p("x-6"), v("2"))];
        let err = ContinuousChain::new(2, &[], &decreasing, 0).unwrap_err();
        assert!(err.to_string().contains("increase strictly"), "{err}");
        let equivalent = vec![(p("x-2"), v("2")), (p("x-10"), v("3"))];
        assert!(ContinuousChain::new(2, &[], &equivalent, 0).is_err());
    }

    #[test]
    fn stability_examples() {
        let l = lambda(4);
        assert_eq!(
            l.stability(&p("x")).unwrap(),
            Stability::Stable {
                value: v("1"),
                witness: 1
            }
        );
        assert_eq!(
            l.stability(&p("x+2")).unwrap(),
            Stability::UnstableWithinPrefix {
                values: vec![v("2"), v("3"), v("4"), v("5")]
            }
        );
        assert_eq!(
            l.stability(&p("5")).unwrap(),
            Stability::Stable {
                value: v("0"),
                witness: 1
            }
        );
        assert!(l.stability(&Poly::zero()).is_err());
    }

    #[test]
    fn limit_examples() {
        let l = lambda(6);
        let lim = limit_augment(&l, &p("x+2"), None, 0).unwrap();
        assert_eq!(lim.eval(&p("x+2")).unwrap(), v("(1,0)"));
        assert_eq!(lim.eval(&p("x")).unwrap(), v("(0,1)"));
        assert_eq!(lim.eval(&p("x^2+2x")).unwrap(), v("(1,1)"));
        assert!(limit_augment(&l, &p("x"), None, 0).is_err());
        assert!(limit_augment(&l, &p("x+2"), Some(&v("3")), 0).is_err());
    }
}
