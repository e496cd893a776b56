//! Witt-vector data `f = Σ p^i Σ_j [a_ij] [X]^j` of a `Z_p`-tower and its
//! closed-form invariants.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, UnramElem};
use crate::scalar::{ceil_log, rat_int};

#[derive(Clone, Debug)]
pub struct TowerSpec {
    field: Arc<FieldCtx>,
    /// `(i, j) -> a_ij` in the basis of the field modulus
    coeffs: BTreeMap<(u32, u64), Vec<u64>>,
    levels: BTreeMap<u32, u64>,
}

impl PartialEq for TowerSpec {
    fn eq(&self, o: &Self) -> bool {
        *self.field == *o.field && self.coeffs == o.coeffs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerInvariants {
    pub delta: BigRational,
    pub m: u32,
    pub d_m: u64,
    pub genus_stable: bool,
    pub w: BigRational,
    pub c_thm_b: BigRational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityConstants {
    pub delta_x: BTreeMap<(u32, u64), BigRational>,
    pub relevant: BTreeSet<(u32, u64)>,
    pub n: Option<u32>,
    pub m_prime: Option<u32>,
}

/// Per-level test `d_i <= (p^i - W) δ` for levels above `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelBound {
    pub level: u32,
    pub degree: u64,
    pub bound: BigRational,
    pub holds: bool,
}

pub fn validate(field: Arc<FieldCtx>, coeffs: BTreeMap<(u32, u64), Vec<u64>>) -> Result<TowerSpec> {
    let p = field.p();
    let a = field.a();
    for (&(i, j), v) in &coeffs {
        if v.len() != a {
            return Err(Error::BadCoefficient {
                i,
                j,
                msg: format!("expected {a} coordinates over F_p, got {}", v.len()),
            });
        }
        if v.iter().any(|&c| c >= p) {
            return Err(Error::BadCoefficient {
                i,
                j,
                msg: format!("coordinates must lie in [0, {p})"),
            });
        }
        if v.iter().all(|&c| c == 0) {
            return Err(Error::ZeroCoefficient { i, j });
        }
        if j >= 1 && j % p == 0 {
            return Err(Error::ForbiddenExponent { i, j });
        }
    }
    let mut levels: BTreeMap<u32, u64> = BTreeMap::new();
    for &(i, j) in coeffs.keys() {
        let d = levels.entry(i).or_insert(0);
        *d = (*d).max(j);
    }
    if levels.get(&0).copied().unwrap_or(0) < 1 {
        return Err(Error::EmptyLevelZero);
    }
    for (&i, &d) in &levels {
        if d >= 1 && d % p == 0 {
            return Err(Error::DegreeDivisibleByP { i, d });
        }
    }
    let spec = TowerSpec {
        field,
        coeffs,
        levels,
    };
    let delta = spec.delta_and_level().0;
    for &(i, j) in spec.coeffs.keys() {
        let bound = &delta * rat_int(p.pow(i) as i64);
        if rat_int(j as i64) > bound {
            return Err(Error::OutsideX { i, j });
        }
    }
    Ok(spec)
}

fn pow_rat(p: u64, e: i64) -> BigRational {
    let base = BigRational::from_integer(BigInt::from(p));
    if e >= 0 {
        num_traits::pow(base, e as usize)
    } else {
        BigRational::one() / num_traits::pow(base, (-e) as usize)
    }
}

impl TowerSpec {
    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    pub fn a(&self) -> usize {
        self.field.a()
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn coeffs(&self) -> &BTreeMap<(u32, u64), Vec<u64>> {
        &self.coeffs
    }

    /// Degree `d_i` of each level present.
    pub fn levels(&self) -> &BTreeMap<u32, u64> {
        &self.levels
    }

    pub fn top_level(&self) -> u32 {
        *self.levels.keys().next_back().unwrap()
    }

    fn delta_and_level(&self) -> (BigRational, u32, u64) {
        let p = self.p();
        let mut best: Option<(BigRational, u32, u64)> = None;
        for (&i, &d) in &self.levels {
            if d == 0 {
                continue;
            }
            let r = BigRational::new(BigInt::from(d), BigInt::from(p.pow(i)));
            if best.as_ref().is_none_or(|b| r > b.0) {
                best = Some((r, i, d));
            }
        }
        best.expect("level 0 has positive degree")
    }

    pub fn invariants(&self) -> TowerInvariants {
        let (delta, m, d_m) = self.delta_and_level();
        let a = self.a() as i64;
        let p = self.p() as i64;
        let sq = (d_m as i64 - 1) * (d_m as i64 - 1);
        let c = BigRational::new(BigInt::from(a * (p - 1) * sq), BigInt::from(8));
        let w = &c / &delta;
        TowerInvariants {
            delta,
            m,
            d_m,
            genus_stable: true,
            w,
            c_thm_b: c,
        }
    }

    /// `v_p(c_j) = min{i : a_ij != 0}` for each exponent `j >= 1`.
    pub fn leading_levels(&self) -> BTreeMap<u64, u32> {
        let mut out = BTreeMap::new();
        for &(i, j) in self.coeffs.keys() {
            if j == 0 {
                continue;
            }
            let e = out.entry(j).or_insert(i);
            *e = (*e).min(i);
        }
        out
    }

    /// Conductor exponent at infinity of `C_{m'} / C_0`.
    pub fn conductor(&self, m_prime: u32) -> u64 {
        let inv = self.invariants();
        let p = self.p();
        if m_prime > inv.m {
            1 + inv.d_m * p.pow(m_prime - inv.m - 1)
        } else {
            self.conductor_general(m_prime)
        }
    }

    /// `max{1 + j p^{m'-v_p(c_j)-1}}` over exponents with `v_p(c_j) < m'`.
    pub fn conductor_general(&self, m_prime: u32) -> u64 {
        let p = self.p();
        self.leading_levels()
            .into_iter()
            .filter(|&(_, v)| v < m_prime)
            .map(|(j, v)| 1 + j * p.pow(m_prime - v - 1))
            .max()
            .unwrap_or(0)
    }

    /// Degree of `L(χ, s)` for χ of conductor `p^{m_chi}`.
    pub fn degree_l(&self, m_chi: u32) -> u64 {
        let inv = self.invariants();
        if m_chi > inv.m {
            let v = &inv.delta * rat_int(self.p().pow(m_chi - 1) as i64) - BigRational::one();
            v.to_integer().to_u64().unwrap()
        } else {
            self.degree_l_general(m_chi)
        }
    }

    /// `-1 + p^{m_chi-1} max{j / p^{v_p(c_j)} : v_p(c_j) < m_chi}`.
    pub fn degree_l_general(&self, m_chi: u32) -> u64 {
        let p = self.p();
        let best = self
            .leading_levels()
            .into_iter()
            .filter(|&(_, v)| v < m_chi)
            .map(|(j, v)| BigRational::new(BigInt::from(j), BigInt::from(p.pow(v))))
            .max()
            .unwrap_or_else(BigRational::zero);
        let d = best * rat_int(p.pow(m_chi - 1) as i64) - BigRational::one();
        assert!(d.is_integer() && !d.is_negative());
        d.to_integer().to_u64().unwrap()
    }

    /// `c_j = Σ_i p^i [a_ij]` in `Z_q / p^prec`.
    pub fn c_coeffs(&self, prec: u32) -> BTreeMap<u64, UnramElem> {
        self.c_coeffs_in(1, prec)
    }

    /// The `c_j` lifted into `Z_{q^k} / p^prec`.
    pub fn c_coeffs_in(&self, k: usize, prec: u32) -> BTreeMap<u64, UnramElem> {
        let ring = self.field.ring(k, prec);
        let ext = ring.ext().clone();
        let mut out: BTreeMap<u64, UnramElem> = BTreeMap::new();
        let p = self.p();
        for (&(i, j), a) in &self.coeffs {
            if i >= prec {
                continue;
            }
            let t = ring.teichmuller(&ext.embed_base(a));
            let term = t.scale(p.pow(i));
            let e = out.entry(j).or_insert_with(|| ring.from_int(0));
            *e = e.add(&term);
        }
        out
    }

    pub fn delta_x(&self, i: u32, j: u64) -> BigRational {
        let delta = self.invariants().delta;
        rat_int(self.p().pow(i) as i64) - rat_int(j as i64) / delta
    }

    pub fn stability_constants(&self) -> StabilityConstants {
        let inv = self.invariants();
        let p = self.p();
        let delta_x: BTreeMap<_, _> = self
            .coeffs
            .keys()
            .map(|&(i, j)| ((i, j), self.delta_x(i, j)))
            .collect();
        let relevant: BTreeSet<_> = delta_x
            .iter()
            .filter(|(_, d)| **d < inv.w)
            .map(|(k, _)| *k)
            .collect();
        if inv.w.is_zero() {
            return StabilityConstants {
                delta_x,
                relevant,
                n: None,
                m_prime: Some(1),
            };
        }
        let n = relevant.iter().map(|&(i, _)| i).max();
        let m_prime = n.map(|n| {
            let arg = (rat_int(p.pow(n) as i64) + &inv.w) / rat_int(p as i64 - 1);
            (1 + ceil_log(p, &arg)) as u32
        });
        StabilityConstants {
            delta_x,
            relevant,
            n,
            m_prime,
        }
    }

    /// Whether coefficients above level `m` can still be polygon-relevant:
    /// for `i > m` the smallest `Δ` in the region is `1/δ`.
    pub fn higher_levels_can_matter(&self) -> bool {
        let inv = self.invariants();
        inv.w > BigRational::one() / inv.delta
    }

    /// Smallest `Δ_{(i,j)}` over the admissible region at level `i`.
    pub fn min_delta_at_level(&self, i: u32) -> BigRational {
        let inv = self.invariants();
        let p = self.p();
        let cap = (&inv.delta * rat_int(p.pow(i) as i64)).floor().to_integer();
        let mut j = cap.to_u64().unwrap();
        while j >= 1 && j.is_multiple_of(p) {
            j -= 1;
        }
        self.delta_x(i, j)
    }

    pub fn level_bounds(&self) -> Vec<LevelBound> {
        let inv = self.invariants();
        let p = self.p();
        self.levels
            .iter()
            .filter(|(&i, _)| i > inv.m)
            .map(|(&i, &d)| {
                let bound = (rat_int(p.pow(i) as i64) - &inv.w) * &inv.delta;
                LevelBound {
                    level: i,
                    degree: d,
                    holds: rat_int(d as i64) <= bound,
                    bound,
                }
            })
            .collect()
    }

    /// The value a coefficient table entry takes, if present.
    pub fn coeff(&self, i: u32, j: u64) -> Option<&[u64]> {
        self.coeffs.get(&(i, j)).map(|v| v.as_slice())
    }

    /// Scale factor `a (p-1) p^{m-1}` from `π_χ`-units to `q`-units.
    pub fn units_per_q(&self, m_chi: u32) -> BigRational {
        rat_int((self.a() as u64 * (self.p() - 1) * self.p().pow(m_chi - 1)) as i64)
    }

    pub fn pow_p(&self, e: i64) -> BigRational {
        pow_rat(self.p(), e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_field;
    use crate::scalar::rat;

    fn f2() -> Arc<FieldCtx> {
        Arc::new(make_field(2, 1, &[1, 1]).unwrap())
    }

    fn spec(entries: &[(u32, u64)]) -> Result<TowerSpec> {
        validate(f2(), entries.iter().map(|&k| (k, vec![1])).collect())
    }

    #[test]
    fn validation_errors() {
        assert!(spec(&[(0, 3)]).is_ok());
        assert_eq!(
            spec(&[(0, 4)]).unwrap_err(),
            Error::ForbiddenExponent { i: 0, j: 4 }
        );
        assert_eq!(spec(&[(1, 3)]).unwrap_err(), Error::EmptyLevelZero);
        assert_eq!(spec(&[(0, 0)]).unwrap_err(), Error::EmptyLevelZero);
        assert!(matches!(
            validate(f2(), [((0, 3), vec![0])].into_iter().collect()),
            Err(Error::ZeroCoefficient { .. })
        ));
    }

    #[test]
    fn x_cubed_invariants() {
        let s = spec(&[(0, 3)]).unwrap();
        let inv = s.invariants();
        assert_eq!(inv.delta, rat(3, 1));
        assert_eq!(inv.m, 0);
        assert_eq!(inv.d_m, 3);
        assert_eq!(inv.w, rat(1, 6));
        assert_eq!(inv.c_thm_b, rat(1, 2));
        assert_eq!(s.conductor(1), 4);
        assert_eq!(s.conductor(2), 7);
        assert_eq!(
            (1..=3).map(|m| s.degree_l(m)).collect::<Vec<_>>(),
            vec![2, 5, 11]
        );
        let st = s.stability_constants();
        assert_eq!(st.delta_x[&(0, 3)], rat(0, 1));
        assert_eq!(st.n, Some(0));
        assert_eq!(st.m_prime, Some(2));
    }

    #[test]
    fn linear_tower_is_fully_determined() {
        let s = spec(&[(0, 1)]).unwrap();
        let inv = s.invariants();
        assert_eq!(inv.delta, rat(1, 1));
        assert_eq!(inv.w, rat(0, 1));
        assert_eq!(s.stability_constants().m_prime, Some(1));
    }

    #[test]
    fn irrelevant_higher_term() {
        let s = spec(&[(0, 3), (1, 5)]).unwrap();
        let st = s.stability_constants();
        assert_eq!(st.delta_x[&(1, 5)], rat(1, 3));
        assert!(!st.relevant.contains(&(1, 5)));
    }

    #[test]
    fn c_coefficients() {
        let s = spec(&[(0, 3), (1, 3)]).unwrap();
        let c = s.c_coeffs(5);
        assert_eq!(c[&3].coords(), &[3]);
        let s = spec(&[(0, 1), (1, 5)]).unwrap();
        assert_eq!(s.leading_levels()[&5], 1);
    }

    #[test]
    fn general_branch_below_m() {
        // f_0 = X, f_1 = X^3: δ = 3/2 at level 1
        let s = spec(&[(0, 1), (1, 3)]).unwrap();
        assert_eq!(s.invariants().m, 1);
        assert_eq!(s.degree_l(1), 0);
        assert_eq!(s.conductor(1), 2);
        assert_eq!(s.degree_l(2), 2);
        assert_eq!(s.degree_l_general(2), 2);
    }
}
