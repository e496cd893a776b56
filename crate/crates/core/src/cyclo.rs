//! The ring `Z[ζ]` for `ζ` a primitive `p^m`-th root of unity, written in the
//! basis `1, π, π^2, ...` with `π = ζ - 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::{checked_prime_power, PAdicInt, Scalar, Valuation, Zpm};

pub struct CycloCtx {
    p: u64,
    m: u32,
    phi: usize,
    /// Eisenstein modulus `Σ_{l<p} (1+π)^{l p^{m-1}}`, monic, length phi+1
    modulus: Vec<BigInt>,
    modulus_small: Option<Vec<i64>>,
    /// `ζ^r` for `0 <= r < p^m`
    zeta: Vec<Vec<BigInt>>,
}

impl PartialEq for CycloCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m
    }
}

impl fmt::Debug for CycloCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O_{}(p={})", self.m, self.p)
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn make_cyclo(p: u64, m: u32) -> Arc<CycloCtx> {
    assert!(m >= 1, "conductor exponent must be positive");
    let order = checked_prime_power(p, m).expect("p^m too large") as usize;
    let step = order / p as usize;
    let phi = (p as usize - 1) * step;
    let mut modulus = vec![BigInt::zero(); phi + 1];
    for l in 0..p {
        let e = l * step as u64;
        for (j, c) in modulus.iter_mut().enumerate().take(e as usize + 1) {
            *c += binomial(e, j as u64);
        }
    }
    debug_assert!(One::is_one(&modulus[phi]));
    let modulus_small = modulus.iter().map(|c| c.to_i64()).collect();
    let mut ctx = CycloCtx {
        p,
        m,
        phi,
        modulus,
        modulus_small,
        zeta: Vec::new(),
    };
    let mut table = Vec::with_capacity(order);
    let mut cur = vec![BigInt::zero(); phi];
    cur[0] = BigInt::one();
    let mut zeta1 = vec![BigInt::zero(); phi];
    zeta1[0] = BigInt::one();
    if phi > 1 {
        zeta1[1] = BigInt::one();
    } else {
        // phi = 1 (p = 2, m = 1): π = -2
        zeta1[0] = BigInt::from(-1);
    }
    for _ in 0..order {
        table.push(cur.clone());
        cur = ctx.mul_reduce(&cur, &zeta1, &BigInt::zero());
    }
    ctx.zeta = table;
    Arc::new(ctx)
}

impl CycloCtx {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    /// Order of the character group, `p^m`.
    pub fn order(&self) -> u64 {
        self.zeta.len() as u64
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    fn mul_reduce<C: Scalar>(&self, x: &[C], y: &[C], zero: &C) -> Vec<C> {
        let phi = self.phi;
        let mut r = vec![zero.clone(); 2 * phi - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                r[i + j] = r[i + j].clone() + a.clone() * b.clone();
            }
        }
        let modc: Vec<C> = match &self.modulus_small {
            Some(v) => v[..phi].iter().map(|&c| zero.embed_i64(c)).collect(),
            None => self.modulus[..phi]
                .iter()
                .map(|c| zero.embed_int(c))
                .collect(),
        };
        for top in (phi..r.len()).rev() {
            let c = r[top].clone();
            if c.is_zero() {
                continue;
            }
            for (i, mc) in modc.iter().enumerate() {
                let idx = top - phi + i;
                r[idx] = r[idx].clone() - c.clone() * mc.clone();
            }
        }
        r.truncate(phi);
        r
    }

    pub fn zero(self: &Arc<Self>) -> ExactCyclo {
        CycloElem {
            ctx: self.clone(),
            coords: vec![BigInt::zero(); self.phi],
        }
    }

    pub fn one(self: &Arc<Self>) -> ExactCyclo {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> ExactCyclo {
        let mut z = self.zero();
        z.coords[0] = BigInt::from(v);
        z
    }

    /// The uniformizer `π = ζ - 1`.
    pub fn pi(self: &Arc<Self>) -> ExactCyclo {
        let mut z = self.zero();
        if self.phi > 1 {
            z.coords[1] = BigInt::one();
        } else {
            z.coords[0] = BigInt::from(-2);
        }
        z
    }

    /// `χ(n) = ζ^n = (1+π)^n`.
    pub fn chi_of(self: &Arc<Self>, n: i64) -> ExactCyclo {
        let r = n.rem_euclid(self.order() as i64) as usize;
        CycloElem {
            ctx: self.clone(),
            coords: self.zeta[r].clone(),
        }
    }

    /// `ζ^r` in the ring of `sample`'s coordinates.
    pub fn zeta_like<C: Scalar>(self: &Arc<Self>, r: u64, sample: &C) -> CycloElem<C> {
        let r = (r % self.order()) as usize;
        CycloElem {
            ctx: self.clone(),
            coords: self.zeta[r].iter().map(|c| sample.embed_int(c)).collect(),
        }
    }
}

/// Element of `O_m` with coordinates in `C` (exact integers or residues).
#[derive(Clone)]
pub struct CycloElem<C> {
    ctx: Arc<CycloCtx>,
    coords: Vec<C>,
}

pub type ExactCyclo = CycloElem<BigInt>;
pub type TruncCyclo = CycloElem<Zpm>;

impl<C: fmt::Debug> fmt::Debug for CycloElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl<C: PartialEq> PartialEq for CycloElem<C> {
    fn eq(&self, o: &Self) -> bool {
        (Arc::ptr_eq(&self.ctx, &o.ctx) || (self.ctx.p == o.ctx.p && self.ctx.m == o.ctx.m))
            && self.coords == o.coords
    }
}

impl<C: Scalar> CycloElem<C> {
    pub fn from_coords(ctx: &Arc<CycloCtx>, coords: Vec<C>) -> Self {
        assert_eq!(coords.len(), ctx.phi, "coordinate count must equal phi");
        CycloElem {
            ctx: ctx.clone(),
            coords,
        }
    }

    pub fn ctx(&self) -> &Arc<CycloCtx> {
        &self.ctx
    }

    pub fn coords(&self) -> &[C] {
        &self.coords
    }

    fn map2(&self, o: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        CycloElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        CycloElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().map(|a| a.clone() * c.clone()).collect(),
        }
    }
}

impl<C: PAdicInt> CycloElem<C> {
    /// π-adic valuation: `min_j (phi * v_p(a_j) + j)`.
    pub fn vpi(&self) -> Valuation {
        let p = self.ctx.p;
        let phi = self.ctx.phi as u64;
        let best = self
            .coords
            .iter()
            .enumerate()
            .filter_map(|(j, c)| c.vp(p).map(|v| phi * v + j as u64))
            .min();
        match (best, self.coords[0].precision()) {
            (Some(v), _) => Valuation::Finite(BigRational::from_integer(BigInt::from(v))),
            (None, None) => Valuation::Infinite,
            (None, Some(prec)) => Valuation::AtLeast(BigRational::from_integer(BigInt::from(
                prec as u64 * phi,
            ))),
        }
    }
}

impl ExactCyclo {
    pub fn to_trunc(&self, prec: u32) -> TruncCyclo {
        let pm = checked_prime_power(self.ctx.p, prec).expect("p^M too large");
        let z = Zpm::new(0, pm, prec);
        CycloElem {
            ctx: self.ctx.clone(),
            coords: self.coords.iter().map(|c| z.embed_int(c)).collect(),
        }
    }
}

impl<C: Scalar> Add for CycloElem<C> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.map2(&o, |a, b| a.clone() + b.clone())
    }
}

impl<C: Scalar> Sub for CycloElem<C> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.map2(&o, |a, b| a.clone() - b.clone())
    }
}

impl<C: Scalar> Neg for CycloElem<C> {
    type Output = Self;
    fn neg(self) -> Self {
        CycloElem {
            coords: self.coords.into_iter().map(|a| -a).collect(),
            ctx: self.ctx,
        }
    }
}

impl<C: Scalar> Mul for CycloElem<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let zero = self.coords[0].zero_like();
        CycloElem {
            coords: self.ctx.mul_reduce(&self.coords, &o.coords, &zero),
            ctx: self.ctx,
        }
    }
}

impl<C: Scalar> Scalar for CycloElem<C> {
    fn zero_like(&self) -> Self {
        CycloElem {
            ctx: self.ctx.clone(),
            coords: vec![self.coords[0].zero_like(); self.ctx.phi],
        }
    }
    fn one_like(&self) -> Self {
        let mut z = self.zero_like();
        z.coords[0] = self.coords[0].one_like();
        z
    }
    fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
    fn embed_int(&self, v: &BigInt) -> Self {
        let mut z = self.zero_like();
        z.coords[0] = self.coords[0].embed_int(v);
        z
    }
}

/// Convert a `π_χ`-adic valuation into `q`-adic units.
pub fn vq_normalize(v: &BigRational, a: usize, p: u64, m: u32) -> BigRational {
    let units = BigInt::from(a as u64 * (p - 1) * p.pow(m - 1));
    v / BigRational::from_integer(units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn eisenstein_moduli() {
        assert_eq!(make_cyclo(2, 1).modulus(), ints(&[2, 1]).as_slice());
        assert_eq!(make_cyclo(2, 2).modulus(), ints(&[2, 2, 1]).as_slice());
        assert_eq!(make_cyclo(3, 1).modulus(), ints(&[3, 3, 1]).as_slice());
    }

    #[test]
    fn valuations_of_basic_elements() {
        let c = make_cyclo(3, 2);
        let pi = c.pi();
        assert_eq!(
            (pi.clone() * pi.clone()).vpi(),
            Valuation::Finite(rat(2, 1))
        );
        assert_eq!(c.from_int(3).vpi(), Valuation::Finite(rat(6, 1)));
        assert_eq!(c.zero().vpi(), Valuation::Infinite);
        assert_eq!(
            c.zero().to_trunc(4).vpi(),
            Valuation::AtLeast(rat(24, 1))
        );
        let c21 = make_cyclo(2, 1);
        assert_eq!(c21.from_int(2).vpi(), Valuation::Finite(rat(1, 1)));
    }

    #[test]
    fn characters() {
        let c = make_cyclo(2, 1);
        assert_eq!(c.chi_of(1), c.from_int(-1));
        assert_eq!(c.chi_of(0), c.one());
        let c = make_cyclo(3, 2);
        let d = c.chi_of(1) - c.one();
        assert_eq!(d.vpi(), Valuation::Finite(rat(1, 1)));
        assert_eq!(c.chi_of(4) * c.chi_of(7), c.chi_of(11));
    }

    #[test]
    fn normalization() {
        assert_eq!(vq_normalize(&rat(4, 1), 2, 3, 1), rat(1, 1));
        assert_eq!(vq_normalize(&rat(0, 1), 1, 2, 1), rat(0, 1));
        assert_eq!(vq_normalize(&rat(1, 1), 1, 2, 2), rat(1, 2));
    }

    #[test]
    fn truncated_matches_exact() {
        let c = make_cyclo(2, 3);
        let x = c.chi_of(3) + c.from_int(5);
        let y = c.chi_of(5) - c.pi();
        assert_eq!((x.clone() * y.clone()).to_trunc(6), x.to_trunc(6) * y.to_trunc(6));
    }
}
