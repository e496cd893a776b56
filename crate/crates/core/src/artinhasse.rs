//! The Artin-Hasse exponential `E(T) = exp(Σ T^{p^i}/p^i)`, its
//! compositional inverse, and the values `π_i(π_χ)` in `O_m`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::cyclo::{CycloCtx, TruncCyclo};
use crate::error::{Error, Result};
use crate::scalar::{checked_prime_power, rational_mod, PAdicInt, Scalar, Valuation, Zpm};
use crate::series::TruncSeries;

type ECache = Mutex<HashMap<u64, Arc<Vec<BigRational>>>>;
type PiCache = Mutex<HashMap<(u64, usize, u32), Arc<TruncSeries<Zpm>>>>;

fn e_cache() -> &'static ECache {
    static C: OnceLock<ECache> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn pi_cache() -> &'static PiCache {
    static C: OnceLock<PiCache> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Exact coefficients `e_0..e_{prec-1}`, shared across calls.
fn e_coeffs(p: u64, prec: usize) -> Result<Arc<Vec<BigRational>>> {
    if let Some(v) = e_cache().lock().unwrap().get(&p) {
        if v.len() >= prec {
            return Ok(v.clone());
        }
    }
    let mut e: Vec<BigRational> = vec![BigRational::one()];
    let pb = BigInt::from(p);
    while e.len() < prec {
        let n = e.len();
        let mut acc = BigRational::zero();
        let mut pk = 1usize;
        while pk <= n {
            acc += &e[n - pk];
            pk = match pk.checked_mul(p as usize) {
                Some(v) => v,
                None => break,
            };
        }
        let en = acc / BigRational::from_integer(BigInt::from(n));
        if en.denom().is_multiple_of(&pb) {
            return Err(Error::NonIntegralCoefficient { p, n });
        }
        e.push(en);
    }
    let arc = Arc::new(e);
    let mut cache = e_cache().lock().unwrap();
    let keep = match cache.get(&p) {
        Some(old) if old.len() >= arc.len() => old.clone(),
        _ => {
            cache.insert(p, arc.clone());
            arc
        }
    };
    Ok(keep)
}

/// `E(T)` mod `T^prec` with exact rational coefficients.
pub fn artin_hasse_series(p: u64, prec: usize) -> Result<TruncSeries<BigRational>> {
    let e = e_coeffs(p, prec.max(1))?;
    Ok(TruncSeries::new(e[..prec.max(1)].to_vec()))
}

fn zpm_sample(p: u64, prec: u32) -> Result<Zpm> {
    let pm = checked_prime_power(p, prec)
        .ok_or_else(|| Error::TooLarge(format!("{p}^{prec} exceeds the residue range")))?;
    Ok(Zpm::new(0, pm, prec))
}

/// The first `n` coefficients of `E` reduced mod `p^prec`.
pub fn artin_hasse_mod(p: u64, n: usize, prec: u32) -> Result<Vec<Zpm>> {
    let z = zpm_sample(p, prec)?;
    let e = e_coeffs(p, n.max(1))?;
    e[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| {
            rational_mod(c, z.modulus())
                .map(|v| Zpm::new(v, z.modulus(), prec))
                .ok_or(Error::NonIntegralCoefficient { p, n: i })
        })
        .collect()
}

/// `E(h)` for `h` with zero constant term.
pub fn ah_compose(h: &TruncSeries<Zpm>, p: u64) -> Result<TruncSeries<Zpm>> {
    let z = h.coeff(0);
    let prec = z.precision().unwrap();
    let e = artin_hasse_mod(p, h.prec(), prec)?;
    Ok(TruncSeries::new(e).compose(h))
}

/// The series `h` with `E(h) = target`, one coefficient at a time.
///
/// The coefficient of `T^j` in `E(h)` is `h_j` plus a polynomial in
/// `h_1..h_{j-1}`; the table `pw[n][j] = [T^j] h^n` is filled column by
/// column so each digit is available as soon as it is needed.
pub fn ah_inverse(target: &TruncSeries<Zpm>, p: u64) -> Result<TruncSeries<Zpm>> {
    assert!(target.coeff(0).is_one(), "target must have constant term 1");
    let n = target.prec();
    let z = target.coeff(0).zero_like();
    let prec = z.precision().unwrap();
    let e = artin_hasse_mod(p, n, prec)?;
    let mut h = vec![z; n];
    // pw[k][j] for k >= 1; pw[1] is h itself
    let mut pw: Vec<Vec<Zpm>> = vec![vec![z; n]; n];
    for j in 1..n {
        let mut rest = z;
        for k in 2..=j {
            let mut c = z;
            for i in 1..=(j + 1 - k) {
                if h[i].is_zero() {
                    continue;
                }
                c = c + h[i] * pw[k - 1][j - i];
            }
            pw[k][j] = c;
            rest = rest + e[k] * c;
        }
        h[j] = *target.coeff(j) - rest;
        pw[1][j] = h[j];
    }
    Ok(TruncSeries::new(h))
}

/// `π_0(T) = E^{-1}(1 + T)` mod `(p^prec_p, T^n)`.
pub fn pi0_series(p: u64, n: usize, prec_p: u32) -> Result<Arc<TruncSeries<Zpm>>> {
    let key = (p, n, prec_p);
    if let Some(s) = pi_cache().lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let z = zpm_sample(p, prec_p)?;
    let mut t = TruncSeries::one(&z, n.max(2));
    t.set(1, z.one_like());
    let s = Arc::new(ah_inverse(&t.truncate(n.max(1)), p)?);
    pi_cache().lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// `π_i(T) = E^{-1}((1+T)^{p^i})` as a series.
pub fn pi_i_series(p: u64, i: u32, n: usize, prec_p: u32) -> Result<TruncSeries<Zpm>> {
    let z = zpm_sample(p, prec_p)?;
    let pi = p.pow(i) as usize;
    let coeffs = (0..n)
        .map(|j| {
            if j > pi {
                z
            } else {
                z.embed_int(&binom(pi, j))
            }
        })
        .collect();
    ah_inverse(&TruncSeries::new(coeffs), p)
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub enum PiValue {
    /// `π_i(π_χ) = 0` exactly (level at or above the conductor).
    ExactZero,
    Value(TruncCyclo),
}

/// `π_i(π_χ) = π_0((1+π)^{p^i} - 1)` in `O_m / p^prec_p`.
pub fn pi_i_at_chi(cctx: &Arc<CycloCtx>, i: u32, prec_p: u32) -> Result<PiValue> {
    if i >= cctx.m() {
        return Ok(PiValue::ExactZero);
    }
    let p = cctx.p();
    let ceiling = prec_p as u64 * cctx.phi() as u64;
    let pi = p.pow(i);
    if pi >= ceiling {
        return Err(Error::SaturatedPrecision(format!(
            "pi_{i}(pi_chi) has valuation {pi} >= ceiling {ceiling}"
        )));
    }
    let y = cctx.chi_of(pi as i64) - cctx.one();
    let vy = y.vpi();
    let vy = vy.finite().and_then(|v| v.to_integer().to_u64()).unwrap_or(0);
    assert!(vy >= 1, "argument of pi_0 must be non-unit");
    // terms b_n y^n with n * v(y) >= ceiling vanish mod p^prec_p
    let terms = ceiling.div_ceil(vy) as usize;
    let series = pi0_series(p, terms, prec_p)?;
    let yt = y.to_trunc(prec_p);
    let value = series.eval(&yt, |c| yt.embed_int(&BigInt::from(c.value())));
    Ok(PiValue::Value(value))
}

/// `E(z)` for `z` of positive valuation in `O_m / p^prec`.
pub fn artin_hasse_at(z: &TruncCyclo, p: u64) -> Result<TruncCyclo> {
    let prec = z.coords()[0].precision().unwrap();
    let ceiling = prec as u64 * z.ctx().phi() as u64;
    let v = match z.vpi() {
        Valuation::Finite(v) => v.to_integer().to_u64().unwrap(),
        _ => return Ok(z.one_like()),
    };
    if v == 0 {
        return Err(Error::InvalidArgument("E evaluated at a unit".into()));
    }
    let terms = ceiling.div_ceil(v) as usize;
    let e = artin_hasse_mod(p, terms, prec)?;
    Ok(TruncSeries::new(e).eval(z, |c| z.embed_int(&BigInt::from(c.value()))))
}
