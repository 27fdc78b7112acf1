//! Residues of units, homogeneous units, the residual polynomial operator and its
//! inverse construction.
//!
//! A homogeneous unit `(beta; rho)` at level `i` stands for `rho * H(m)` where `m` is the
//! canonical monomial of value `beta` and `rho` lies in the residue field of level `i`.

use num_traits::ToPrimitive;

use crate::chain::{exact_div, InductiveValuation, Monomial};
use crate::error::{domain, Error, Result};
use crate::ff::{ResPoly, TowerElem};
use crate::poly::Poly;
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomogeneousUnit {
    pub value: Value,
    pub residue: TowerElem,
}

impl HomogeneousUnit {
    pub fn new(value: Value, residue: TowerElem) -> HomogeneousUnit {
        HomogeneousUnit { value, residue }
    }
}

/// `H(f) = nlc * q^s * R(xi)`, together with the expansion indices it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub s: usize,
    pub s_prime: usize,
    pub nlc: HomogeneousUnit,
    pub r: ResPoly,
}

/// The ideal `xi^k * psi(xi)` of the degree-zero graded piece.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualIdeal {
    pub xi_power: usize,
    pub psi: ResPoly,
}

/// Both sides of a change-of-data law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformCheck {
    /// `sigma` for a change of `u`, `tau` for a change of the last key.
    pub factor: TowerElem,
    pub predicted_s: usize,
    pub predicted: ResPoly,
    pub observed_s: usize,
    pub observed: ResPoly,
}

impl TransformCheck {
    pub fn holds(&self) -> bool {
        self.predicted_s == self.observed_s && self.predicted == self.observed
    }
}

impl InductiveValuation {
    fn need_nonzero(&self, f: &Poly) -> Result<()> {
        if f.is_zero() {
            return domain("the zero polynomial has no residual data");
        }
        Ok(())
    }

    /// Residue of the value-zero Laurent monomial `m` in the residue field of level `i`.
    pub fn monomial_residue(&self, i: usize, m: &Monomial) -> Result<TowerElem> {
        let k = self.field();
        if i == 1 {
            if m.c != 0 || m.m.iter().any(|&x| x != 0) {
                return Err(Error::Domain(format!(
                    "monomial {m:?} does not have value zero at level 1"
                )));
            }
            return Ok(k.one());
        }
        let (rest, exp) = m.split(i - 1);
        let lv = self.level(i - 1);
        let e = lv.e.expect("inner steps are commensurable") as i64;
        let Some(q) = exact_div(exp, e) else {
            return domain(format!(
                "exponent {exp} of phi_{} is not a multiple of e = {e}",
                i - 1
            ));
        };
        let u = lv.u.as_ref().unwrap();
        let below = rest.mul(&u.pow(-q));
        let r = self.monomial_residue(i - 1, &below)?;
        let z = lv.z.as_ref().expect("inner levels carry the image of xi");
        Ok(k.mul(&r, &k.pow_i(z, q)?))
    }

    /// Residue at level `i` of a non-zero `a` with `deg a < n_i`, relative to the canonical
    /// monomial of value `mu_i(a)`.
    pub fn small_residue(&self, i: usize, a: &Poly) -> Result<TowerElem> {
        self.need_nonzero(a)?;
        let lv = self.level(i);
        if a.deg() >= lv.degree {
            return domain(format!(
                "{a} has degree >= {}, so it is not a small unit at level {i}",
                lv.degree
            ));
        }
        let k = self.field();
        if i == 1 {
            let c = a.coeff(0);
            let ord = self.base().ord(&c).unwrap();
            let unit = &c / self.base().p_pow(ord);
            return Ok(k.from_int(self.base().residue(&unit)? as i64));
        }
        let beta = self.mu_at(i - 1, a);
        let cm = self.canonical_monomial_at(i, &beta)?;
        let (rest, m) = cm.split(i - 1);
        let rest_inv = rest.inv();
        let below = self.level(i - 1);
        let e = below.e.unwrap() as i64;
        let u = below.u.as_ref().unwrap();
        let z = below.z.as_ref().unwrap();
        let rep = self.expansion_at(i - 1, a)?;
        let mut acc = k.zero();
        for &t in &rep.argmin {
            let at = &rep.coeffs[t];
            let q = exact_div(t as i64 - m, e).ok_or_else(|| {
                Error::Domain(format!("index {t} is not congruent to {m} modulo {e}"))
            })?;
            let vt = self.mu_at(i - 1, at);
            let n = self
                .canonical_monomial_at(i - 1, &vt)?
                .mul(&u.pow(-q))
                .mul(&rest_inv);
            let term = k.mul(
                &self.small_residue(i - 1, at)?,
                &self.monomial_residue(i - 1, &n)?,
            );
            acc = k.add(&acc, &k.mul(&term, &k.pow_i(z, q)?));
        }
        if acc.is_zero() {
            return domain(format!("residue of {a} at level {i} vanished"));
        }
        Ok(acc)
    }

    /// `H(a)` for `deg a < n_i`.
    pub fn small_unit(&self, i: usize, a: &Poly) -> Result<HomogeneousUnit> {
        Ok(HomogeneousUnit::new(
            self.mu_at(i, a),
            self.small_residue(i, a)?,
        ))
    }

    pub fn unit_mul_at(
        &self,
        i: usize,
        a: &HomogeneousUnit,
        b: &HomogeneousUnit,
    ) -> Result<HomogeneousUnit> {
        let k = self.field();
        let value = &a.value + &b.value;
        let ca = self.canonical_monomial_at(i, &a.value)?;
        let cb = self.canonical_monomial_at(i, &b.value)?;
        let cab = self.canonical_monomial_at(i, &value)?;
        let n = ca.mul(&cb).mul(&cab.inv());
        let r = k.mul(
            &k.mul(&a.residue, &b.residue),
            &self.monomial_residue(i, &n)?,
        );
        Ok(HomogeneousUnit::new(value, r))
    }

    pub fn unit_inv_at(&self, i: usize, a: &HomogeneousUnit) -> Result<HomogeneousUnit> {
        let k = self.field();
        let neg = -&a.value;
        let n = self
            .canonical_monomial_at(i, &a.value)?
            .mul(&self.canonical_monomial_at(i, &neg)?);
        let r = k.inv(&k.mul(&a.residue, &self.monomial_residue(i, &n)?))?;
        Ok(HomogeneousUnit::new(neg, r))
    }

    pub fn unit_pow_at(&self, i: usize, a: &HomogeneousUnit, e: i64) -> Result<HomogeneousUnit> {
        let base = if e < 0 {
            self.unit_inv_at(i, a)?
        } else {
            a.clone()
        };
        let mut acc = HomogeneousUnit::new(Value::zero(), self.field().one());
        for _ in 0..e.unsigned_abs() {
            acc = self.unit_mul_at(i, &acc, &base)?;
        }
        Ok(acc)
    }

    /// Residue of a value-zero homogeneous unit.
    fn degree_zero_residue(&self, a: &HomogeneousUnit) -> Result<TowerElem> {
        if !a.value.is_zero() {
            return domain(format!(
                "homogeneous unit of value {} is not of degree zero",
                a.value
            ));
        }
        Ok(a.residue.clone())
    }

    /// `H(u)` at level `i`.
    pub fn u_unit(&self, i: usize) -> Result<HomogeneousUnit> {
        let lv = self.level(i);
        let Some(u) = &lv.u else {
            return domain(format!(
                "the value {} of step {i} is incommensurable; there is no residual operator",
                lv.raw_gamma
            ));
        };
        Ok(HomogeneousUnit::new(
            self.monomial_value(u),
            self.field().one(),
        ))
    }

    /// Residue of a unit `f` (top-level expansion dominated by the constant term).
    pub fn unit_residue(&self, f: &Poly) -> Result<HomogeneousUnit> {
        let rep = self.expansion(f)?;
        if rep.argmin != [0] {
            return domain(format!("{f} is not a unit: I(f) = {:?}", rep.argmin));
        }
        self.small_unit(self.len(), &rep.coeffs[0])
    }

    /// The decomposition at level `i`, normalized by the homogeneous unit `uu` in place
    /// of `H(u_i)`.
    pub fn decompose_with(
        &self,
        i: usize,
        f: &Poly,
        uu: &HomogeneousUnit,
    ) -> Result<Decomposition> {
        self.need_nonzero(f)?;
        let lv = self.level(i);
        let Some(e) = lv.e else {
            return domain(format!(
                "the value {} of step {i} is incommensurable; there is no residual operator",
                lv.raw_gamma
            ));
        };
        let k = self.field();
        let rep = self.expansion_at(i, f)?;
        let (s, sp) = (rep.s, rep.s_prime);
        let e = e as usize;
        if (sp - s) % e != 0 {
            return domain(format!(
                "s'(f) - s(f) = {} is not a multiple of e = {e}",
                sp - s
            ));
        }
        let d = (sp - s) / e;
        let top = self.small_unit(i, &rep.coeffs[sp])?;
        let top_inv = self.unit_inv_at(i, &top)?;
        let mut zeta = vec![k.zero(); d + 1];
        for j in 0..=d {
            let t = s + j * e;
            if !rep.argmin.contains(&t) {
                continue;
            }
            let h = self.small_unit(i, &rep.coeffs[t])?;
            let w = self.unit_pow_at(i, uu, (d - j) as i64)?;
            let z = self.unit_mul_at(i, &self.unit_mul_at(i, &top_inv, &w)?, &h)?;
            zeta[j] = self.degree_zero_residue(&z)?;
        }
        let r = ResPoly::new(zeta);
        debug_assert!(r.is_monic() && !r.coeff(0).is_zero());
        let nlc = self.unit_mul_at(i, &top, &self.unit_pow_at(i, uu, -(d as i64))?)?;
        Ok(Decomposition {
            s,
            s_prime: sp,
            nlc,
            r,
        })
    }

    pub fn decompose_at(&self, i: usize, f: &Poly) -> Result<Decomposition> {
        let uu = self.u_unit(i)?;
        self.decompose_with(i, f, &uu)
    }

    /// `(s(f), nlc(f), R(f))` at the top level.
    pub fn hmu_decompose(&self, f: &Poly) -> Result<Decomposition> {
        self.decompose_at(self.len(), f)
    }

    pub fn residual_poly_at(&self, i: usize, f: &Poly) -> Result<ResPoly> {
        Ok(self.decompose_at(i, f)?.r)
    }

    pub fn residual_poly(&self, f: &Poly) -> Result<ResPoly> {
        self.residual_poly_at(self.len(), f)
    }

    pub fn nlc(&self, f: &Poly) -> Result<HomogeneousUnit> {
        Ok(self.hmu_decompose(f)?.nlc)
    }

    pub fn residual_ideal(&self, f: &Poly) -> Result<ResidualIdeal> {
        let d = self.hmu_decompose(f)?;
        let e = self.e().unwrap() as usize;
        Ok(ResidualIdeal {
            xi_power: d.s.div_ceil(e),
            psi: d.r,
        })
    }

    /// A polynomial `a` with `deg a < n_i` and `H(a) = unit`; zero for a zero residue.
    pub fn lift_at(&self, i: usize, unit: &HomogeneousUnit) -> Result<Poly> {
        if unit.residue.is_zero() {
            return Ok(Poly::zero());
        }
        let k = self.field();
        if !k.contains(&unit.residue) || k.elem_height(&unit.residue) > self.level(i).height {
            return domain(format!(
                "{} is not in the residue field of level {i}",
                k.fmt_elem(&unit.residue)
            ));
        }
        let beta = &unit.value;
        let cm = self.canonical_monomial_at(i, beta)?;
        if i == 1 {
            let r = unit.residue.digits()[0];
            return Ok(Poly::constant(
                self.base().lift(r) * self.base().p_pow(cm.c),
            ));
        }
        let (rest, m) = cm.split(i - 1);
        let rest_inv = rest.inv();
        let below = self.level(i - 1);
        let e = below.e.unwrap() as i64;
        let u = below.u.as_ref().unwrap();
        let h = self.level(i).height;
        let coords: Vec<TowerElem> = if h == below.height {
            vec![unit.residue.clone()]
        } else {
            k.chunks(&unit.residue, h).coeffs().to_vec()
        };
        let mut out = Poly::zero();
        for (t, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = t as i64;
            let power = m + t * e;
            let bt = beta - &below.gamma.mul_int(power);
            let n = self
                .canonical_monomial_at(i - 1, &bt)?
                .mul(&u.pow(-t))
                .mul(&rest_inv);
            let rho = k.div(c, &self.monomial_residue(i - 1, &n)?)?;
            let b = self.lift_at(i - 1, &HomogeneousUnit::new(bt, rho))?;
            out = &out + &(&b * &below.phi.pow(power.to_usize().unwrap()));
        }
        Ok(out)
    }

    /// `f = phi^s * sum_j a_j phi^(j e)` with `a_d = lift(zeta)` and
    /// `H(a_j) = zeta * psi_j * H(u)^(j - d)`, so that `s(f) = s`, `R(f) = psi` and
    /// `nlc(f) = zeta * H(u)^(-d)`.
    pub fn construct_from_residual(
        &self,
        s: usize,
        zeta: &TowerElem,
        psi: &ResPoly,
    ) -> Result<Poly> {
        let k = self.field();
        if zeta.is_zero() {
            return domain("the leading residue must be non-zero");
        }
        if !psi.is_monic() {
            return domain(format!("{} must be monic", k.show(psi)));
        }
        if psi.coeff(0).is_zero() {
            return domain(format!(
                "{} must have a non-zero constant term",
                k.show(psi)
            ));
        }
        let r = self.len();
        let e = self.e().ok_or_else(|| {
            Error::Domain("incommensurable top step: no residual construction".into())
        })? as usize;
        let uu = self.u_unit(r)?;
        let d = psi.deg();
        let zu = HomogeneousUnit::new(Value::zero(), zeta.clone());
        let phi = self.phi();
        let mut f = Poly::zero();
        for (j, c) in psi.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = self.unit_pow_at(r, &uu, j as i64 - d as i64)?;
            let mut target = self.unit_mul_at(r, &zu, &w)?;
            target.residue = k.mul(&target.residue, c);
            let a = self.lift_at(r, &target)?;
            f = &f + &(&a * &phi.pow(s + j * e));
        }
        Ok(f)
    }

    /// Change of the normalizing polynomial `u` to `u_star`: `R*(y) = sigma^d R(y / sigma)`.
    pub fn transform_u(&self, f: &Poly, u_star: &Poly) -> Result<TransformCheck> {
        let r = self.len();
        let k = self.field();
        let (e, _) = self.ram_data()?;
        if u_star.is_zero() || u_star.deg() >= self.degree() {
            return domain(format!(
                "alternative u = {u_star} must be non-zero of degree < {}",
                self.degree()
            ));
        }
        let ustar = self.small_unit(r, u_star)?;
        let target = -self.gamma().mul_int(e as i64);
        if ustar.value != target {
            return domain(format!(
                "alternative u = {u_star} has value {}, but mu(u phi^e) = 0 needs {target}",
                ustar.value
            ));
        }
        let uu = self.u_unit(r)?;
        let sigma_unit = self.unit_mul_at(r, &uu, &self.unit_inv_at(r, &ustar)?)?;
        let sigma = self.degree_zero_residue(&sigma_unit)?;
        let base = self.decompose_with(r, f, &uu)?;
        let d = base.r.deg();
        let scaled = k.pcompose_scale(&base.r, &k.inv(&sigma)?);
        let predicted = k.pscale(&scaled, &k.pow_i(&sigma, d as i64)?);
        let observed = self.decompose_with(r, f, &ustar)?;
        Ok(TransformCheck {
            factor: sigma,
            predicted_s: base.s,
            predicted,
            observed_s: observed.s,
            observed: observed.r,
        })
    }

    /// Change of the last key to `phi_star` of the same degree and value:
    /// `y^s R(y) = (y + tau)^(s*) R*(y + tau)` with `tau = H(u (phi* - phi))`.
    pub fn transform_phi(&self, f: &Poly, phi_star: &Poly) -> Result<TransformCheck> {
        let r = self.len();
        let k = self.field();
        self.ram_data()?;
        if phi_star.deg() != self.degree() || !crate::keys::is_key(self, phi_star)? {
            return domain(format!(
                "alternative key {phi_star} must be a key polynomial of degree {}",
                self.degree()
            ));
        }
        let mut steps = self.steps();
        steps[r - 1].0 = phi_star.clone();
        let emb = self.is_rank2().then(|| self.embedding());
        let alt = InductiveValuation::new(self.p(), &steps, emb).map_err(|err| {
            Error::Domain(format!(
                "alternative key {phi_star} does not give a valid chain: {err}"
            ))
        })?;
        let diff = phi_star - self.phi();
        // Only a difference of value exactly gamma moves y; that forces e = 1, and then
        // u (phi* - phi) has value 0.
        let tau = if diff.is_zero() {
            k.zero()
        } else {
            let d = self.small_unit(r, &diff)?;
            match d.value.cmp(self.gamma()) {
                std::cmp::Ordering::Greater => k.zero(),
                std::cmp::Ordering::Equal => self.unit_mul_at(r, &self.u_unit(r)?, &d)?.residue,
                std::cmp::Ordering::Less => {
                    return domain(format!("mu({phi_star} - phi) is below the value of phi"))
                }
            }
        };
        let base = self.hmu_decompose(f)?;
        // (y - tau)^s R(y - tau) = y^(s*) R*(y)
        let neg = k.neg(&tau);
        let lhs = k.pmul(
            &k.ppow(&ResPoly::new(vec![neg.clone(), k.one()]), base.s),
            &k.pshift(&base.r, &neg),
        );
        let predicted_s = lhs.coeffs().iter().take_while(|c| c.is_zero()).count();
        let predicted = ResPoly::new(lhs.coeffs()[predicted_s..].to_vec());
        let observed = alt.hmu_decompose(f)?;
        Ok(TransformCheck {
            factor: tau,
            predicted_s,
            predicted,
            observed_s: observed.s,
            observed: observed.r,
        })
    }

    pub fn fmt_unit(&self, a: &HomogeneousUnit) -> String {
        format!("({}; {})", a.value, self.field().fmt_elem(&a.residue))
    }

    pub fn fmt_ideal(&self, a: &ResidualIdeal) -> String {
        format!("xi^{} * ({})(xi)", a.xi_power, self.field().show(&a.psi))
    }
}
