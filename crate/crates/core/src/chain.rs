//! Inductive valuations `[(phi_1, gamma_1), ..., (phi_r, gamma_r)]` on `Q[x]` over `v_p`.
//!
//! Levels are numbered from 1; `mu_i` is the valuation of the first `i` steps and
//! level 0 is the base valuation on constants.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::base::BaseValuation;
use crate::error::{domain, Error, Result};
use crate::ff::{ResPoly, TowerElem, TowerField};
use crate::poly::Poly;
use crate::value::{subgroup_index, Embedding, GroupGens, Value, Q};

/// Laurent monomial `p^c * phi_1^m_1 * ... * phi_k^m_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub c: i64,
    pub m: Vec<i64>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { c: 0, m: vec![] }
    }

    pub fn exp(&self, j: usize) -> i64 {
        self.m.get(j - 1).copied().unwrap_or(0)
    }

    fn trimmed(mut self) -> Monomial {
        while self.m.last() == Some(&0) {
            self.m.pop();
        }
        self
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.m.len().max(other.m.len());
        Monomial {
            c: self.c + other.c,
            m: (1..=n).map(|j| self.exp(j) + other.exp(j)).collect(),
        }
        .trimmed()
    }

    pub fn pow(&self, k: i64) -> Monomial {
        Monomial {
            c: self.c * k,
            m: self.m.iter().map(|x| x * k).collect(),
        }
        .trimmed()
    }

    pub fn inv(&self) -> Monomial {
        self.pow(-1)
    }

    /// Drops the `phi_j` factor, returning the rest and the dropped exponent.
    pub fn split(&self, j: usize) -> (Monomial, i64) {
        let mut rest = self.clone();
        let m = self.exp(j);
        if j <= rest.m.len() {
            rest.m[j - 1] = 0;
        }
        (rest.trimmed(), m)
    }
}

#[derive(Clone, Debug)]
pub struct Level {
    pub phi: Poly,
    /// Value of `phi`, embedded into rank two when the chain has rank two.
    pub gamma: Value,
    /// `gamma` as written in the input.
    pub raw_gamma: Value,
    pub degree: usize,
    /// Values of polynomials of degree `< degree`: `<1, gamma_1, ..., gamma_{i-1}>`.
    pub group: GroupGens,
    /// Least `e` with `e * gamma` in `group`; `None` for an incommensurable step.
    pub e: Option<u64>,
    /// Canonical monomial of value `-e * gamma`.
    pub u: Option<Monomial>,
    /// Height of this level's residue field in the chain's tower.
    pub height: usize,
    /// Residual polynomial of the next key, when there is a next level.
    pub psi: Option<ResPoly>,
    /// Image of `xi` in the next residue field.
    pub z: Option<TowerElem>,
}

#[derive(Clone, Debug)]
pub struct InductiveValuation {
    base: BaseValuation,
    embedding: Embedding,
    rank2: bool,
    explicit_embedding: bool,
    levels: Vec<Level>,
    field: TowerField,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionReport {
    pub coeffs: Vec<Poly>,
    /// `mu(f_s phi^s)`, infinite where `f_s = 0`.
    pub monomial_values: Vec<Value>,
    pub mu: Value,
    pub argmin: Vec<usize>,
    pub s: usize,
    pub s_prime: usize,
}

impl InductiveValuation {
    /// Validates a chain step by step. `embedding` fixes how rank-one values sit inside
    /// a rank-two chain; by default it is inferred from the first rank-two value.
    pub fn new(
        p: u64,
        steps: &[(Poly, Value)],
        embedding: Option<Embedding>,
    ) -> Result<InductiveValuation> {
        let base = BaseValuation::new(p)?;
        let Some((phi1, gamma1)) = steps.first() else {
            return Err(Error::InvalidChain(
                "a chain needs at least one step".into(),
            ));
        };
        for (k, (_, g)) in steps.iter().enumerate() {
            if g.is_infinite() {
                return Err(Error::InvalidChain(format!(
                    "step {}: gamma must be finite",
                    k + 1
                )));
            }
        }
        let first_rank2 = steps.iter().map(|(_, g)| g).find(|g| g.rank() == Some(2));
        let rank2 = first_rank2.is_some();
        let emb = embedding
            .or_else(|| first_rank2.map(Embedding::infer))
            .unwrap_or_default();
        if phi1.deg() != 1 || !phi1.is_monic() {
            return Err(Error::InvalidChain(format!(
                "step 1: phi_1 = {phi1} must be monic of degree 1"
            )));
        }
        let mut nu = InductiveValuation {
            base: base.clone(),
            embedding: emb,
            rank2,
            explicit_embedding: embedding.is_some(),
            levels: vec![],
            field: TowerField::new(p)?,
        };
        let gamma = nu.normalize(gamma1);
        let group = GroupGens::new(vec![nu.base_value(Q::one())])?;
        let e = subgroup_index(&gamma, &group);
        nu.levels.push(Level {
            phi: phi1.clone(),
            gamma,
            raw_gamma: gamma1.clone(),
            degree: 1,
            group,
            e,
            u: None,
            height: 0,
            psi: None,
            z: None,
        });
        nu.fill_u()?;
        for (k, (phi, gamma)) in steps.iter().enumerate().skip(1) {
            nu = nu.push_step(phi, gamma, k + 1)?;
        }
        Ok(nu)
    }

    fn fill_u(&mut self) -> Result<()> {
        let r = self.len();
        let top = &self.levels[r - 1];
        if let Some(e) = top.e {
            let target = -top.gamma.mul_int(e as i64);
            let u = self.canonical_monomial_at(r, &target)?;
            self.levels[r - 1].u = Some(u);
        }
        Ok(())
    }

    fn push_step(&self, phi: &Poly, raw_gamma: &Value, k: usize) -> Result<InductiveValuation> {
        let r = self.len();
        let top = self.top();
        let bad = |msg: String| Err(Error::InvalidChain(format!("step {k}: {msg}")));
        if top.e.is_none() {
            return bad(format!(
                "only the last step may have a value incommensurable with the earlier ones (step {r} has gamma {})",
                top.raw_gamma
            ));
        }
        if !phi.is_monic() {
            return bad(format!("phi_{k} = {phi} must be monic"));
        }
        let n = phi.deg();
        if n < top.degree || n % top.degree != 0 {
            return bad(format!(
                "deg(phi_{k}) = {n} must be a multiple of deg(phi_{r}) = {}",
                top.degree
            ));
        }
        let gamma = self.normalize(raw_gamma);
        let mu = self.mu(phi);
        if gamma <= mu {
            return bad(format!(
                "gamma {raw_gamma} must exceed mu_{r}(phi_{k}) = {}",
                mu
            ));
        }
        if n == top.degree && self.is_equivalent(phi, &top.phi) {
            return bad(format!(
                "phi_{k} = {phi} is equivalent to phi_{r}; merge the two steps"
            ));
        }
        let psi = match crate::keys::key_check(self, phi)? {
            Ok(psi) => psi,
            Err(reason) => {
                return bad(format!(
                    "phi_{k} = {phi} is not a key polynomial for the valuation of steps 1..{r}: {reason}"
                ))
            }
        };
        let psi = psi.expect("commensurable keys carry a residual polynomial");
        let (field, z) = self.field.extend(&psi)?;
        let mut gens = top.group.gens().to_vec();
        gens.push(top.gamma.clone());
        let group = GroupGens::new(gens)?;
        let e = subgroup_index(&gamma, &group);
        let mut next = self.clone();
        next.levels[r - 1].psi = Some(psi);
        next.levels[r - 1].z = Some(z);
        next.field = field;
        next.levels.push(Level {
            phi: phi.clone(),
            gamma,
            raw_gamma: raw_gamma.clone(),
            degree: n,
            group,
            e,
            u: None,
            height: next.field.height(),
            psi: None,
            z: None,
        });
        next.fill_u()?;
        Ok(next)
    }

    // ---- accessors ----

    pub fn base(&self) -> &BaseValuation {
        &self.base
    }

    pub fn p(&self) -> u64 {
        self.base.p()
    }

    pub fn embedding(&self) -> Embedding {
        self.embedding
    }

    pub fn is_rank2(&self) -> bool {
        self.rank2
    }

    pub fn has_explicit_embedding(&self) -> bool {
        self.explicit_embedding
    }

    /// Number of steps `r`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `i`, 1-based.
    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i - 1]
    }

    pub fn top(&self) -> &Level {
        self.levels.last().unwrap()
    }

    pub fn phi(&self) -> &Poly {
        &self.top().phi
    }

    pub fn gamma(&self) -> &Value {
        &self.top().gamma
    }

    pub fn degree(&self) -> usize {
        self.top().degree
    }

    /// The steps as given, with their original values.
    pub fn steps(&self) -> Vec<(Poly, Value)> {
        self.levels
            .iter()
            .map(|l| (l.phi.clone(), l.raw_gamma.clone()))
            .collect()
    }

    /// Residue field of the top level.
    pub fn field(&self) -> &TowerField {
        &self.field
    }

    /// Residue field of level `i`.
    pub fn field_at(&self, i: usize) -> TowerField {
        self.field.truncate(self.level(i).height)
    }

    pub fn is_commensurable(&self) -> bool {
        self.top().e.is_some()
    }

    /// The prefix valuation `mu_i`.
    pub fn prefix(&self, i: usize) -> InductiveValuation {
        assert!(i >= 1 && i <= self.len());
        let mut levels = self.levels[..i].to_vec();
        let h = levels[i - 1].height;
        levels[i - 1].psi = None;
        levels[i - 1].z = None;
        InductiveValuation {
            base: self.base.clone(),
            embedding: self.embedding,
            rank2: self.rank2,
            explicit_embedding: self.explicit_embedding,
            levels,
            field: self.field.truncate(h),
        }
    }

    // ---- values ----

    /// A rank-one base value placed according to the chain's embedding.
    pub fn base_value(&self, q: Q) -> Value {
        if self.rank2 {
            self.embedding.embed(q)
        } else {
            Value::Rank1(q)
        }
    }

    pub fn normalize(&self, v: &Value) -> Value {
        match v {
            Value::Rank1(q) if self.rank2 => self.embedding.embed(q.clone()),
            _ => v.clone(),
        }
    }

    pub fn const_value(&self, a: &Q) -> Value {
        match self.base.ord(a) {
            Some(k) => self.base_value(Q::from_integer(BigInt::from(k))),
            None => Value::Infinity,
        }
    }

    /// `mu_i(f)`; level 0 values constants by `v_p`.
    pub fn mu_at(&self, i: usize, f: &Poly) -> Value {
        if f.is_zero() {
            return Value::Infinity;
        }
        if i == 0 {
            assert!(f.is_constant(), "level 0 only values constants");
            return self.const_value(&f.coeff(0));
        }
        let lv = &self.levels[i - 1];
        if f.deg() < lv.degree {
            return self.mu_at(i - 1, f);
        }
        let coeffs = f.expand(&lv.phi).expect("keys are monic");
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(s, c)| &self.mu_at(i - 1, c) + &lv.gamma.mul_int(s as i64))
            .min()
            .unwrap()
    }

    pub fn mu(&self, f: &Poly) -> Value {
        self.mu_at(self.len(), f)
    }

    pub fn expansion_at(&self, i: usize, f: &Poly) -> Result<ExpansionReport> {
        if f.is_zero() {
            return domain("expansion of the zero polynomial");
        }
        let lv = self.level(i);
        let coeffs = f.expand(&lv.phi)?;
        let monomial_values: Vec<Value> = coeffs
            .iter()
            .enumerate()
            .map(|(s, c)| {
                if c.is_zero() {
                    Value::Infinity
                } else {
                    &self.mu_at(i - 1, c) + &lv.gamma.mul_int(s as i64)
                }
            })
            .collect();
        let mu = monomial_values.iter().min().unwrap().clone();
        let argmin: Vec<usize> = (0..coeffs.len())
            .filter(|&s| monomial_values[s] == mu)
            .collect();
        Ok(ExpansionReport {
            s: argmin[0],
            s_prime: *argmin.last().unwrap(),
            coeffs,
            monomial_values,
            mu,
            argmin,
        })
    }

    /// Expansion relative to the top key.
    pub fn expansion(&self, f: &Poly) -> Result<ExpansionReport> {
        self.expansion_at(self.len(), f)
    }

    pub fn is_equivalent_at(&self, i: usize, f: &Poly, g: &Poly) -> bool {
        if f.is_zero() || g.is_zero() {
            return f.is_zero() && g.is_zero();
        }
        let mg = self.mu_at(i, g);
        self.mu_at(i, f) == mg && self.mu_at(i, &(f - g)) > mg
    }

    pub fn is_equivalent(&self, f: &Poly, g: &Poly) -> bool {
        self.is_equivalent_at(self.len(), f, g)
    }

    pub fn is_unit(&self, f: &Poly) -> Result<bool> {
        let rep = self.expansion(f)?;
        Ok(rep.argmin == [0])
    }

    pub fn is_minimal(&self, f: &Poly) -> Result<bool> {
        if f.is_constant() {
            return domain("minimality is defined for non-constant polynomials");
        }
        let rep = self.expansion(f)?;
        Ok(f.deg() == rep.s_prime * self.degree())
    }

    /// `C(mu) = gamma_r / deg(phi_r)`.
    pub fn cmu(&self) -> Value {
        self.gamma().div_int(self.degree() as i64)
    }

    /// `(e, u)` of the top level.
    pub fn ram_data(&self) -> Result<(u64, Poly)> {
        let top = self.top();
        match (top.e, &top.u) {
            (Some(e), Some(u)) => Ok((e, self.monomial_poly(u))),
            _ => domain(format!(
                "the top step value {} is incommensurable with the earlier values",
                top.raw_gamma
            )),
        }
    }

    pub fn e(&self) -> Option<u64> {
        self.top().e
    }

    /// Value group of the whole valuation, `<1, gamma_1, ..., gamma_r>`.
    pub fn value_group(&self) -> GroupGens {
        let mut gens = self.top().group.gens().to_vec();
        gens.push(self.gamma().clone());
        GroupGens::new(gens).unwrap()
    }

    pub fn monomial_value(&self, m: &Monomial) -> Value {
        let mut v = self.base_value(Q::from_integer(BigInt::from(m.c)));
        for (j, &mj) in m.m.iter().enumerate() {
            v = &v + &self.levels[j].gamma.mul_int(mj);
        }
        v
    }

    /// The monomial as a polynomial; exponents of the keys must be non-negative.
    pub fn monomial_poly(&self, m: &Monomial) -> Poly {
        let mut f = Poly::constant(self.base.p_pow(m.c));
        for (j, &mj) in m.m.iter().enumerate() {
            assert!(mj >= 0, "negative key exponent in a polynomial monomial");
            if mj > 0 {
                f = &f * &self.levels[j].phi.pow(mj as usize);
            }
        }
        f
    }

    /// Canonical monomial of value `beta` among polynomials of degree `< n_i`: the exponent
    /// of each `phi_j` is reduced into `[0, e_j)`, from `j = i - 1` downwards.
    pub fn canonical_monomial_at(&self, i: usize, beta: &Value) -> Result<Monomial> {
        let lv = self.level(i);
        let outside = || {
            domain(format!(
                "value {beta} is not attained by polynomials of degree < {}",
                lv.degree
            ))
        };
        if beta.is_infinite() || !lv.group.contains(beta) {
            return outside();
        }
        let mut rest = beta.clone();
        let mut m = vec![0i64; i - 1];
        for j in (1..i).rev() {
            let lj = self.level(j);
            let e = lj.e.expect("inner steps are commensurable");
            let found = (0..e as i64).find(|&k| {
                let cand = &rest - &lj.gamma.mul_int(k);
                lj.group.contains(&cand)
            });
            let Some(k) = found else {
                return outside();
            };
            m[j - 1] = k;
            rest = &rest - &lj.gamma.mul_int(k);
        }
        let c = self
            .embedding
            .base_part(&rest)
            .filter(|q| q.is_integer())
            .and_then(|q| q.to_integer().to_i64());
        let Some(c) = c else {
            return outside();
        };
        Ok(Monomial { c, m }.trimmed())
    }

    pub fn canonical_monomial(&self, beta: &Value) -> Result<Poly> {
        Ok(self.monomial_poly(&self.canonical_monomial_at(self.len(), beta)?))
    }

    /// `v_chi(f) = mu(f mod chi)` for a key `chi`.
    pub fn semivaluation_vchi(&self, chi: &Poly, f: &Poly) -> Result<Value> {
        if !crate::keys::is_key(self, chi)? {
            return domain(format!("{chi} is not a key polynomial"));
        }
        let r = f.rem(chi)?;
        Ok(self.mu(&r))
    }
}

impl fmt::Display for InductiveValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, l) in self.levels.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", l.phi, l.raw_gamma)?;
        }
        write!(f, "] over v_{}", self.p())
    }
}

/// Integer quotient helper for exact divisions of exponents.
pub(crate) fn exact_div(a: i64, b: i64) -> Option<i64> {
    (b != 0 && a % b == 0).then(|| a / b)
}
