//! Exact `L(χ, s)` and `L*(χ, s)` from the Euler product over closed points.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::cyclo::{CycloCtx, ExactCyclo};
use crate::error::{Error, Result};
use crate::field::FqkElem;
use crate::scalar::{checked_prime_power, Scalar, Valuation};
use crate::tower::TowerSpec;

/// Largest total number of field elements the Euler path will enumerate.
pub const ENUMERATION_LIMIT: u128 = 1 << 20;

/// Distribution of Frobenius values over closed points of `A^1 - {0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCensus {
    pub p: u64,
    /// Frobenius values are known mod `p^prec`
    pub prec: u32,
    /// `counts[d][r]`: points of degree `d` with `Frob(x) ≡ r`, index 0 unused
    pub counts: Vec<Vec<u64>>,
    /// `Frob(0)`
    pub frob0: u64,
}

impl PointCensus {
    pub fn max_degree(&self) -> usize {
        self.counts.len() - 1
    }

    /// The same census with Frobenius values reduced mod `p^prec`.
    pub fn reduce(&self, prec: u32) -> PointCensus {
        assert!(prec <= self.prec);
        let m = self.p.pow(prec) as usize;
        let counts = self
            .counts
            .iter()
            .map(|row| {
                let mut out = vec![0u64; if row.is_empty() { 0 } else { m }];
                for (r, &n) in row.iter().enumerate() {
                    out[r % m] += n;
                }
                out
            })
            .collect();
        PointCensus {
            p: self.p,
            prec,
            counts,
            frob0: self.frob0 % m as u64,
        }
    }

    /// Number of closed points of each degree, excluding 0.
    pub fn point_counts(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }
}

/// `Tr_{Z_{q^d}/Z_p}(Σ_j c_j [x]^j)` mod `p^prec` for `x ∈ F_{q^d}`.
pub fn frob(spec: &TowerSpec, x: &FqkElem, prec: u32) -> u64 {
    let c = spec.c_coeffs_in(x.k, prec);
    frob_with(&c, spec, x, prec)
}

fn frob_with(
    c: &std::collections::BTreeMap<u64, crate::field::UnramElem>,
    spec: &TowerSpec,
    x: &FqkElem,
    prec: u32,
) -> u64 {
    let ring = spec.field().ring(x.k, prec);
    let t = ring.teichmuller(x);
    // Horner over exponents in descending order
    let top = c.keys().next_back().copied().unwrap_or(0);
    let mut acc = ring.from_int(0);
    for j in (0..=top).rev() {
        acc = acc.mul(&t);
        if let Some(cj) = c.get(&j) {
            acc = acc.add(cj);
        }
    }
    acc.trace_linear()
}

pub fn enumeration_cost(q: u64, max_degree: usize) -> u128 {
    (1..=max_degree).map(|d| (q as u128).saturating_pow(d as u32)).sum()
}

/// Census of closed points of degree `1..=max_degree` with Frobenius mod `p^prec`.
pub fn census(spec: &TowerSpec, max_degree: usize, prec: u32) -> Result<PointCensus> {
    let q = spec.q();
    let cost = enumeration_cost(q, max_degree);
    if cost > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(format!(
            "{cost} field elements for points up to degree {max_degree} over F_{q}"
        )));
    }
    let p = spec.p();
    let pm = checked_prime_power(p, prec)
        .ok_or_else(|| Error::TooLarge(format!("character group of order {p}^{prec}")))?
        as usize;
    let field = spec.field();
    let mut counts = vec![Vec::new()];
    let mut frob0 = 0;
    for d in 1..=max_degree {
        let ext = field.ext(d);
        let mut pts = Vec::new();
        ext.for_each_closed_point(|x| pts.push(x));
        let c = spec.c_coeffs_in(d, prec);
        let values: Vec<u64> = pts
            .par_iter()
            .map(|x| frob_with(&c, spec, x, prec))
            .collect();
        let mut row = vec![0u64; pm];
        for (x, v) in pts.iter().zip(values) {
            if d == 1 && x.coords.iter().all(|&c| c == 0) {
                frob0 = v;
            } else {
                row[v as usize] += 1;
            }
        }
        counts.push(row);
    }
    Ok(PointCensus {
        p,
        prec,
        counts,
        frob0,
    })
}

/// Polynomial in `s` with coefficients in `O_m`, constant term 1.
#[derive(Clone, Debug, PartialEq)]
pub struct LPolynomial {
    pub cctx: Arc<CycloCtx>,
    pub coeffs: Vec<ExactCyclo>,
}

impl LPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn valuations(&self) -> Vec<Valuation> {
        self.coeffs.iter().map(|c| c.vpi()).collect()
    }

    /// Multiply by `1 - c s`.
    pub fn times_linear(&self, c: &ExactCyclo) -> LPolynomial {
        let mut out = self.coeffs.clone();
        out.push(self.cctx.zero());
        for i in (1..out.len()).rev() {
            out[i] = out[i].clone() - c.clone() * self.coeffs[i - 1].clone();
        }
        LPolynomial {
            cctx: self.cctx.clone(),
            coeffs: out,
        }
    }
}

fn binom(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n + k - 1 - i) / BigInt::from(i + 1);
    }
    debug_assert!(n > 0 || k == 0);
    acc
}

/// `Π (1 - ζ^{u r} s^d)^{-n}` over the census (and the point 0) mod `s^{len}`.
pub fn euler_product(
    cctx: &Arc<CycloCtx>,
    census: &PointCensus,
    twist: u64,
    len: usize,
    include_zero: bool,
) -> Vec<ExactCyclo> {
    let mut poly = vec![cctx.zero(); len];
    poly[0] = cctx.one();
    let census = census.reduce(cctx.m());
    let mut factors: Vec<(usize, u64, u64)> = Vec::new();
    for (d, row) in census.counts.iter().enumerate().skip(1) {
        if d >= len {
            break;
        }
        for (r, &n) in row.iter().enumerate() {
            if n > 0 {
                factors.push((d, r as u64, n));
            }
        }
    }
    if include_zero {
        factors.push((1, census.frob0, 1));
    }
    for (d, r, n) in factors {
        // (1 - z s^d)^{-n} = Σ_k C(n+k-1, k) z^k s^{dk}
        let kmax = (len - 1) / d;
        let terms: Vec<ExactCyclo> = (1..=kmax as u64)
            .map(|k| {
                let z = cctx.chi_of(((twist * r * k) % cctx.order()) as i64);
                z.scale(&binom(n, k))
            })
            .collect();
        for i in (1..len).rev() {
            let mut acc = poly[i].clone();
            for (k, t) in terms.iter().enumerate() {
                let shift = (k + 1) * d;
                if shift > i {
                    break;
                }
                acc = acc + poly[i - shift].clone() * t.clone();
            }
            poly[i] = acc;
        }
    }
    poly
}

/// `L(χ_u, s)` for χ_u(n) = ζ^{un}, with an optional `tail` of extra
/// degrees in which the Euler product must vanish.
pub fn l_full_from_census(
    spec: &TowerSpec,
    cctx: &Arc<CycloCtx>,
    census: &PointCensus,
    twist: u64,
    tail: usize,
) -> Result<LPolynomial> {
    let deg = spec.degree_l(cctx.m()) as usize;
    let len = deg + 1 + tail;
    if census.max_degree() + 1 < len {
        return Err(Error::InvalidArgument(format!(
            "census covers degree {} but {} is required",
            census.max_degree(),
            len - 1
        )));
    }
    let mut poly = euler_product(cctx, census, twist, len, true);
    if poly[deg + 1..].iter().any(|c| !c.is_zero()) || poly[deg].is_zero() {
        return Err(Error::DegreeMismatch(deg));
    }
    poly.truncate(deg + 1);
    Ok(LPolynomial {
        cctx: cctx.clone(),
        coeffs: poly,
    })
}

pub fn l_full(spec: &TowerSpec, cctx: &Arc<CycloCtx>) -> Result<LPolynomial> {
    let deg = spec.degree_l(cctx.m()) as usize;
    let c = census(spec, deg, cctx.m())?;
    l_full_from_census(spec, cctx, &c, 1, 0)
}

/// `L* = (1 - χ(Frob 0) s) L`.
pub fn l_star_from(l: &LPolynomial, census: &PointCensus, twist: u64) -> LPolynomial {
    let cctx = &l.cctx;
    let r = census.reduce(cctx.m()).frob0;
    l.times_linear(&cctx.chi_of(((twist * r) % cctx.order()) as i64))
}

pub fn l_star(spec: &TowerSpec, cctx: &Arc<CycloCtx>) -> Result<LPolynomial> {
    let deg = spec.degree_l(cctx.m()) as usize;
    let c = census(spec, deg.max(1), cctx.m())?;
    let l = l_full_from_census(spec, cctx, &c, 1, 0)?;
    Ok(l_star_from(&l, &c, 1))
}

/// `S*(k, χ_u) = Σ_{x ∈ F_{q^k}^*} χ_u(Tr f([x]))`, by direct enumeration.
pub fn exp_sum_twisted(spec: &TowerSpec, cctx: &Arc<CycloCtx>, k: usize, twist: u64) -> Result<ExactCyclo> {
    let prec = cctx.m();
    let ext = spec.field().ext(k);
    let size = ext
        .order()
        .filter(|&s| (s as u128) <= ENUMERATION_LIMIT)
        .ok_or_else(|| Error::TooLarge(format!("F_(q^{k}) is too large to enumerate")))?;
    let c = spec.c_coeffs_in(k, prec);
    let order = cctx.order();
    let hist = (1..size)
        .into_par_iter()
        .fold(
            || vec![0u64; order as usize],
            |mut h, idx| {
                let x = ext.from_index(idx);
                h[frob_with(&c, spec, &x, prec) as usize] += 1;
                h
            },
        )
        .reduce(
            || vec![0u64; order as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let mut acc = cctx.zero();
    for (r, n) in hist.into_iter().enumerate() {
        if n > 0 {
            let z = cctx.chi_of(((twist * r as u64) % order) as i64);
            acc = acc + z.scale(&BigInt::from(n));
        }
    }
    Ok(acc)
}

pub fn exp_sum(spec: &TowerSpec, cctx: &Arc<CycloCtx>, k: usize) -> Result<ExactCyclo> {
    exp_sum_twisted(spec, cctx, k, 1)
}

/// Check `j c_j = Σ_{i=1}^{j} S*(i) c_{j-i}` for the given sums, the
/// logarithmic-derivative form of `L* = exp(Σ S*(k) s^k / k)`.
pub fn power_sums_match(l_star: &LPolynomial, sums: &[ExactCyclo]) -> bool {
    let zero = l_star.cctx.zero();
    let c = |i: usize| l_star.coeffs.get(i).cloned().unwrap_or_else(|| zero.clone());
    (1..=sums.len()).all(|j| {
        let lhs = c(j).scale(&BigInt::from(j));
        let mut rhs = zero.clone();
        for i in 1..=j {
            rhs = rhs + sums[i - 1].clone() * c(j - i);
        }
        lhs == rhs
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::make_cyclo;
    use crate::field::make_field;
    use crate::tower::validate;

    fn x_cubed() -> TowerSpec {
        let f = Arc::new(make_field(2, 1, &[1, 1]).unwrap());
        validate(f, [((0, 3), vec![1])].into_iter().collect()).unwrap()
    }

    #[test]
    fn frobenius_examples() {
        let s = x_cubed();
        let f = s.field();
        let e1 = f.ext(1);
        assert_eq!(frob(&s, &e1.zero(), 3), 0);
        assert_eq!(frob(&s, &e1.one(), 3), 1);
        let w = f.ext(2).from_index(2);
        assert_eq!(frob(&s, &w, 1), 0);
    }

    #[test]
    fn exp_sum_single_term() {
        let s = x_cubed();
        let c = make_cyclo(2, 1);
        assert_eq!(exp_sum(&s, &c, 1).unwrap(), c.from_int(-1));
        // trivial character
        assert_eq!(exp_sum_twisted(&s, &c, 3, 0).unwrap(), c.from_int(7));
    }

    #[test]
    fn l_star_has_the_zero_factor() {
        let s = x_cubed();
        let c = make_cyclo(2, 1);
        let ls = l_star(&s, &c).unwrap();
        let expect: Vec<_> = [1, -1, 2, -2].iter().map(|&v| c.from_int(v)).collect();
        assert_eq!(ls.coeffs, expect);
    }

    #[test]
    fn census_reduction_preserves_counts() {
        let s = x_cubed();
        let c = census(&s, 4, 3).unwrap();
        let r = c.reduce(1);
        assert_eq!(c.point_counts(), r.point_counts());
        assert_eq!(r.point_counts()[1..], [1, 1, 2, 3]);
    }
}
