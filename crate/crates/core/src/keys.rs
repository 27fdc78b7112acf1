//! Key polynomials: recognition, lifting from residual polynomials, enumeration of
//! equivalence classes and graded factorization.

use crate::chain::InductiveValuation;
use crate::error::{domain, Error, Result};
use crate::ff::ResPoly;
use crate::poly::Poly;
use crate::residue::HomogeneousUnit;
use crate::value::Value;

/// Default bound on the number of candidate residual polynomials examined per degree.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeyVerdict {
    /// Equivalent to the top key of the chain.
    EquivalentToPhi,
    /// Incommensurable top step: `deg chi = n` and `mu(chi - phi) > gamma`.
    Incommensurable,
    /// `s(chi) = 0`, `R(chi)` irreducible and `deg chi = e n deg R(chi)`.
    Residual(ResPoly),
    NotKey(String),
}

impl KeyVerdict {
    pub fn is_key(&self) -> bool {
        !matches!(self, KeyVerdict::NotKey(_))
    }
}

/// The verdict with its reason.
pub fn classify_key(nu: &InductiveValuation, chi: &Poly) -> Result<KeyVerdict> {
    if !chi.is_monic() || chi.is_constant() {
        return domain(format!("{chi} must be monic and non-constant"));
    }
    let n = nu.degree();
    if !nu.is_commensurable() {
        if chi.deg() != n {
            return Ok(KeyVerdict::NotKey(format!(
                "all key polynomials have degree {n}, got {}",
                chi.deg()
            )));
        }
        let diff = nu.mu(&(chi - nu.phi()));
        return Ok(if diff > *nu.gamma() {
            KeyVerdict::Incommensurable
        } else {
            KeyVerdict::NotKey(format!(
                "mu(chi - phi) = {diff} does not exceed gamma = {}",
                nu.gamma()
            ))
        });
    }
    if chi.deg() == n && nu.is_equivalent(chi, nu.phi()) {
        return Ok(KeyVerdict::EquivalentToPhi);
    }
    let dec = nu.hmu_decompose(chi)?;
    if dec.s != 0 {
        return Ok(KeyVerdict::NotKey(format!("s(chi) = {} is not 0", dec.s)));
    }
    let k = nu.field();
    if dec.r.is_constant() {
        return Ok(KeyVerdict::NotKey("R(chi) = 1 is constant".into()));
    }
    if !k.is_irreducible(&dec.r)? {
        return Ok(KeyVerdict::NotKey(format!(
            "R(chi) = {} is reducible",
            k.show(&dec.r)
        )));
    }
    let e = nu.e().unwrap() as usize;
    let expected = e * n * dec.r.deg();
    if chi.deg() != expected {
        return Ok(KeyVerdict::NotKey(format!(
            "deg(chi) = {} differs from e * n * deg R(chi) = {expected}",
            chi.deg()
        )));
    }
    Ok(KeyVerdict::Residual(dec.r))
}

/// Inner result: `Ok(Some(psi))` for a key with residual polynomial `psi`, `Ok(None)` for a
/// key equivalent to the top key, `Err(reason)` otherwise.
pub(crate) fn key_check(
    nu: &InductiveValuation,
    chi: &Poly,
) -> Result<std::result::Result<Option<ResPoly>, String>> {
    Ok(match classify_key(nu, chi)? {
        KeyVerdict::Residual(r) => Ok(Some(r)),
        KeyVerdict::EquivalentToPhi | KeyVerdict::Incommensurable => Ok(None),
        KeyVerdict::NotKey(reason) => Err(reason),
    })
}

pub fn is_key(nu: &InductiveValuation, chi: &Poly) -> Result<bool> {
    Ok(classify_key(nu, chi)?.is_key())
}

/// `f | g` in the graded algebra: `s(f) <= s(g)` and `R(f) | R(g)`.
pub fn divides_mu(nu: &InductiveValuation, f: &Poly, g: &Poly) -> Result<bool> {
    if f.is_zero() || g.is_zero() {
        return domain("divisibility is tested between non-zero polynomials");
    }
    if !nu.is_commensurable() {
        return Ok(nu.expansion(f)?.s <= nu.expansion(g)?.s);
    }
    let df = nu.hmu_decompose(f)?;
    let dg = nu.hmu_decompose(g)?;
    Ok(df.s <= dg.s && nu.field().pdivides(&df.r, &dg.r))
}

/// A key polynomial with residual polynomial `psi`; `psi = y` gives the top key.
pub fn lift_key(nu: &InductiveValuation, psi: &ResPoly) -> Result<Poly> {
    let k = nu.field();
    if *psi == k.y() {
        return Ok(nu.phi().clone());
    }
    if !nu.is_commensurable() {
        return domain("incommensurable top step: the top key is the only key class");
    }
    if !psi.is_monic() || psi.is_constant() {
        return domain(format!("{} must be monic and non-constant", k.show(psi)));
    }
    if !k.is_irreducible(psi)? {
        return domain(format!("{} is reducible over {}", k.show(psi), k));
    }
    let chi = nu.construct_from_residual(0, &k.one(), psi)?;
    match classify_key(nu, &chi)? {
        KeyVerdict::Residual(r) if r == *psi => Ok(chi),
        other => Err(Error::Domain(format!(
            "lift {chi} of {} failed the key test: {other:?}",
            k.show(psi)
        ))),
    }
}

/// One key per equivalence class with residual degree at most `max_res_deg`: the top key,
/// then lifts of the monic irreducible residual polynomials in enumeration order.
pub fn enumerate_keys(nu: &InductiveValuation, max_res_deg: usize) -> Result<Vec<Poly>> {
    enumerate_keys_capped(nu, max_res_deg, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_keys_capped(
    nu: &InductiveValuation,
    max_res_deg: usize,
    cap: u64,
) -> Result<Vec<Poly>> {
    if max_res_deg == 0 {
        return domain("the residual degree bound must be at least 1");
    }
    let mut keys = vec![nu.phi().clone()];
    if !nu.is_commensurable() {
        return Ok(keys);
    }
    let k = nu.field();
    let too_big = || {
        Error::Resource(format!(
            "{k} has too many monic polynomials of degree {max_res_deg} to enumerate (cap {cap})"
        ))
    };
    let q = k.order_u64().ok_or_else(too_big)?;
    if q.checked_pow(max_res_deg as u32).is_none_or(|c| c > cap) {
        return Err(too_big());
    }
    let y = k.y();
    let mut seen: Vec<ResPoly> = Vec::new();
    for d in 1..=max_res_deg {
        for psi in k.monic_polys(d)? {
            if psi == y || !k.is_irreducible(&psi)? {
                continue;
            }
            let chi = lift_key(nu, &psi)?;
            debug_assert!(!seen.contains(&psi));
            seen.push(psi);
            keys.push(chi);
        }
    }
    Ok(keys)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedFactorization {
    pub unit: HomogeneousUnit,
    pub factors: Vec<(Poly, usize)>,
}

/// `f ~ unit * prod chi^a`, where the unit is `H(f_{s'})`.
pub fn graded_factorization(
    nu: &InductiveValuation,
    f: &Poly,
    seed: u64,
) -> Result<GradedFactorization> {
    let dec = nu.hmu_decompose(f)?;
    let rep = nu.expansion(f)?;
    let unit = nu.small_unit(nu.len(), &rep.coeffs[dec.s_prime])?;
    let mut factors = Vec::new();
    if dec.s > 0 {
        factors.push((nu.phi().clone(), dec.s));
    }
    if !dec.r.is_constant() {
        for (psi, m) in nu.field().factor(&dec.r, seed)? {
            factors.push((lift_key(nu, &psi)?, m));
        }
    }
    Ok(GradedFactorization { unit, factors })
}

impl GradedFactorization {
    /// `value(unit) + sum a * mu(chi)`.
    pub fn total_value(&self, nu: &InductiveValuation) -> Value {
        self.factors
            .iter()
            .fold(self.unit.value.clone(), |acc, (chi, a)| {
                &acc + &nu.mu(chi).mul_int(*a as i64)
            })
    }

    /// The product of the factors (without the unit).
    pub fn product(&self) -> Poly {
        self.factors
            .iter()
            .fold(Poly::one(), |acc, (chi, a)| &acc * &chi.pow(*a))
    }

    pub fn render(&self, nu: &InductiveValuation) -> String {
        let mut s = nu.fmt_unit(&self.unit);
        for (chi, a) in &self.factors {
            s.push_str(&format!(" ⊙ ({chi})^{a}"));
        }
        s
    }

    pub fn accounting(&self, nu: &InductiveValuation) -> String {
        let mut parts = vec![self.unit.value.to_string()];
        for (chi, a) in &self.factors {
            parts.push(format!("{a}*{}", nu.mu(chi)));
        }
        format!("{} = {}", self.total_value(nu), parts.join(" + "))
    }
}
