//! Finite fields `F_{q^k}`, closed points of the affine line, and the
//! unramified rings `Z_{q^k} / p^M` with Teichmüller lifts and Frobenius.
//!
//! Polynomials over `F_p` are coefficient vectors, lowest degree first.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::scalar::{checked_prime_power, inv_mod, mul_mod};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomial arithmetic over `F_p`.
pub mod fp {
    use super::*;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    /// Remainder and quotient of `a` by a nonzero `m`.
    pub fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let dm = degree(m).expect("division by zero polynomial");
        let lead_inv = inv_mod(m[dm], p).expect("leading coefficient invertible");
        let mut r = trim(a.to_vec());
        if r.len() <= dm {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - dm];
        while let Some(dr) = degree(&r) {
            if dr < dm {
                break;
            }
            let c = r[dr] * lead_inv % p;
            q[dr - dm] = c;
            for i in 0..=dm {
                r[dr - dm + i] = (r[dr - dm + i] + p - c * m[i] % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        divrem(a, m, p).1
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        rem(&mul(a, b, p), m, p)
    }

    pub fn powmod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            e >>= 1;
            if e > 0 {
                b = mulmod(&b, &b, m, p);
            }
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(d) = degree(&a) {
            let inv = inv_mod(a[d], p).unwrap();
            for c in a.iter_mut() {
                *c = *c * inv % p;
            }
        }
        a
    }

    /// Inverse of `a` modulo an irreducible `m`.
    pub fn invmod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        // extended Euclid tracking the coefficient of `a`
        let mut r0 = trim(m.to_vec());
        let mut r1 = rem(a, m, p);
        let mut s0: Vec<u64> = Vec::new();
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if degree(&r0) != Some(0) {
            return None;
        }
        let inv = inv_mod(r0[0], p)?;
        let out: Vec<u64> = s0.iter().map(|c| c * inv % p).collect();
        Some(rem(&out, m, p))
    }

    /// `x^(p^k) mod m`.
    fn x_pow_p_pow(m: &[u64], k: usize, p: u64) -> Vec<u64> {
        let mut acc = rem(&[0, 1], m, p);
        for _ in 0..k {
            acc = powmod(&acc, p as u128, m, p);
        }
        acc
    }

    /// Rabin's irreducibility test for a polynomial of positive degree.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let n = match degree(f) {
            Some(n) if n >= 1 => n,
            _ => return false,
        };
        let f = trim(f.to_vec());
        let x = vec![0, 1];
        if sub(&x_pow_p_pow(&f, n, p), &rem(&x, &f, p), p) != Vec::<u64>::new() {
            return false;
        }
        for r in prime_factors(n as u64) {
            let h = sub(&x_pow_p_pow(&f, n / r as usize, p), &x, p);
            if degree(&gcd(&f, &h, p)) != Some(0) {
                return false;
            }
        }
        true
    }

    /// First monic irreducible of degree `n`, scanning the lower coefficients
    /// as the base-p integer `c_0 + c_1 p + ...` in increasing order.
    pub fn first_irreducible(n: usize, p: u64) -> Vec<u64> {
        let mut idx: u128 = 0;
        loop {
            let mut f = vec![0u64; n + 1];
            f[n] = 1;
            let mut t = idx;
            for c in f.iter_mut().take(n) {
                *c = (t % p as u128) as u64;
                t /= p as u128;
            }
            if is_irreducible(&f, p) {
                return f;
            }
            idx += 1;
        }
    }
}

/// `F_q` together with its deterministic tower of extension moduli.
pub struct FieldCtx {
    p: u64,
    a: usize,
    modulus: Vec<u64>,
    overrides: BTreeMap<usize, Vec<u64>>,
    exts: Mutex<HashMap<usize, Arc<ExtField>>>,
    rings: Mutex<HashMap<(usize, u32), Arc<UnramRing>>>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("a", &self.a)
            .field("modulus", &self.modulus)
            .field("overrides", &self.overrides)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, o: &Self) -> bool {
        self.p == o.p && self.a == o.a && self.modulus == o.modulus && self.overrides == o.overrides
    }
}

fn check_modulus(p: u64, deg: usize, modulus: &[u64]) -> Result<()> {
    if modulus.len() != deg + 1 || modulus[deg] != 1 {
        return Err(Error::BadModulus(format!(
            "expected a monic polynomial of degree {deg} ({} coefficients, leading 1)",
            deg + 1
        )));
    }
    if modulus.iter().any(|&c| c >= p) {
        return Err(Error::BadModulus(format!("coefficients must lie in [0, {p})")));
    }
    if !fp::is_irreducible(modulus, p) {
        return Err(Error::ReducibleModulus);
    }
    Ok(())
}

pub fn make_field(p: u64, a: usize, modulus: &[u64]) -> Result<FieldCtx> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("a must be at least 1".into()));
    }
    if checked_prime_power(p, a as u32).is_none() {
        return Err(Error::TooLarge(format!("q = {p}^{a}")));
    }
    check_modulus(p, a, modulus)?;
    Ok(FieldCtx {
        p,
        a,
        modulus: modulus.to_vec(),
        overrides: BTreeMap::new(),
        exts: Mutex::new(HashMap::new()),
        rings: Mutex::new(HashMap::new()),
    })
}

impl FieldCtx {
    /// Fix the modulus used for `F_{q^k}` (degree `a*k` over `F_p`).
    pub fn with_extension_modulus(mut self, k: usize, modulus: &[u64]) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        check_modulus(self.p, self.a * k, modulus)?;
        if k == 1 && modulus != self.modulus.as_slice() {
            return Err(Error::BadModulus(
                "the degree-1 extension modulus must equal field_modulus".into(),
            ));
        }
        self.overrides.insert(k, modulus.to_vec());
        Ok(self)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.a as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn overrides(&self) -> &BTreeMap<usize, Vec<u64>> {
        &self.overrides
    }

    /// Modulus of `F_{q^k}` over `F_p`.
    pub fn extension_modulus(&self, k: usize) -> Vec<u64> {
        if k == 1 {
            return self.modulus.clone();
        }
        if let Some(m) = self.overrides.get(&k) {
            return m.clone();
        }
        fp::first_irreducible(self.a * k, self.p)
    }

    /// The field `F_{q^k}`, constructed once and cached.
    pub fn ext(&self, k: usize) -> Arc<ExtField> {
        assert!(k >= 1);
        if let Some(e) = self.exts.lock().unwrap().get(&k) {
            return e.clone();
        }
        let built = Arc::new(ExtField::build(self, k));
        self.exts.lock().unwrap().entry(k).or_insert(built).clone()
    }

    /// `Z_{q^k} / p^prec`, constructed once and cached.
    pub fn ring(&self, k: usize, prec: u32) -> Arc<UnramRing> {
        assert!(prec >= 1);
        if let Some(r) = self.rings.lock().unwrap().get(&(k, prec)) {
            return r.clone();
        }
        let built = Arc::new(UnramRing::build(self.ext(k), prec));
        self.rings
            .lock()
            .unwrap()
            .entry((k, prec))
            .or_insert(built)
            .clone()
    }

    pub fn closed_points(&self, d: usize) -> Vec<FqkElem> {
        let mut out = Vec::new();
        self.ext(d).for_each_closed_point(|x| out.push(x));
        out
    }

    pub fn teichmuller(&self, x: &FqkElem, prec: u32) -> UnramElem {
        self.ring(x.k, prec).teichmuller(x)
    }
}

/// Element of `F_{q^k}`; `coords` are over `F_p` in the power basis of the
/// extension modulus.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqkElem {
    pub k: usize,
    pub coords: Vec<u64>,
}

pub struct ExtField {
    p: u64,
    a: usize,
    k: usize,
    n: usize,
    modulus: Vec<u64>,
    /// images of `t^i` under `x -> x^q`
    frob_q: Vec<Vec<u64>>,
    /// image of the generator of `F_q` (root of the base modulus)
    base_root: Vec<u64>,
}

impl std::fmt::Debug for ExtField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_({}^{}) mod {:?}", self.p, self.n, self.modulus)
    }
}

impl ExtField {
    fn build(ctx: &FieldCtx, k: usize) -> ExtField {
        let p = ctx.p;
        let n = ctx.a * k;
        let modulus = ctx.extension_modulus(k);
        let q = ctx.q() as u128;
        let t = vec![0, 1];
        let tq = fp::powmod(&t, q, &modulus, p);
        let mut frob_q = Vec::with_capacity(n);
        let mut cur = vec![1u64];
        for _ in 0..n {
            frob_q.push(pad(&cur, n));
            cur = fp::mulmod(&cur, &tq, &modulus, p);
        }
        let base_root = if ctx.a == 1 {
            pad(&[0], n)
        } else if k == 1 {
            pad(&t, n)
        } else {
            pad(&find_base_root(p, n, &modulus, &ctx.modulus, ctx.q()), n)
        };
        ExtField {
            p,
            a: ctx.a,
            k,
            n,
            modulus,
            frob_q,
            base_root,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Degree over `F_p`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Number of elements, if it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        checked_prime_power(self.p, self.n as u32)
    }

    pub fn zero(&self) -> FqkElem {
        FqkElem {
            k: self.k,
            coords: vec![0; self.n],
        }
    }

    pub fn one(&self) -> FqkElem {
        let mut z = self.zero();
        z.coords[0] = 1;
        z
    }

    fn wrap(&self, v: Vec<u64>) -> FqkElem {
        FqkElem {
            k: self.k,
            coords: pad(&v, self.n),
        }
    }

    pub fn add(&self, x: &FqkElem, y: &FqkElem) -> FqkElem {
        let coords = x
            .coords
            .iter()
            .zip(&y.coords)
            .map(|(a, b)| (a + b) % self.p)
            .collect();
        FqkElem { k: self.k, coords }
    }

    pub fn mul(&self, x: &FqkElem, y: &FqkElem) -> FqkElem {
        self.wrap(fp::mulmod(&x.coords, &y.coords, &self.modulus, self.p))
    }

    pub fn pow(&self, x: &FqkElem, e: u128) -> FqkElem {
        self.wrap(fp::powmod(&x.coords, e, &self.modulus, self.p))
    }

    /// `x -> x^q`, the generator of `Gal(F_{q^k}/F_q)`.
    pub fn frob_q(&self, x: &FqkElem) -> FqkElem {
        let mut out = vec![0u64; self.n];
        for (i, &c) in x.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.frob_q[i]) {
                *o = (*o + c * b) % self.p;
            }
        }
        FqkElem {
            k: self.k,
            coords: out,
        }
    }

    /// `Σ coords[i] p^i`; the order used to pick orbit representatives.
    pub fn index(&self, x: &FqkElem) -> u64 {
        x.coords.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn from_index(&self, mut idx: u64) -> FqkElem {
        let mut coords = vec![0u64; self.n];
        for c in coords.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FqkElem { k: self.k, coords }
    }

    /// Image of an element of `F_q` given in the basis of the base modulus.
    pub fn embed_base(&self, c: &[u64]) -> FqkElem {
        assert_eq!(c.len(), self.a);
        if self.a == 1 {
            let mut z = self.zero();
            z.coords[0] = c[0] % self.p;
            return z;
        }
        let root = FqkElem {
            k: self.k,
            coords: self.base_root.clone(),
        };
        let mut acc = self.zero();
        let mut pw = self.one();
        for &ci in c {
            let term = FqkElem {
                k: self.k,
                coords: pw.coords.iter().map(|v| v * ci % self.p).collect(),
            };
            acc = self.add(&acc, &term);
            pw = self.mul(&pw, &root);
        }
        acc
    }

    /// Degree over `F_q` of the point `x`: its orbit length under `frob_q`.
    pub fn degree_of(&self, x: &FqkElem) -> usize {
        let mut y = self.frob_q(x);
        let mut d = 1;
        while y != *x {
            y = self.frob_q(&y);
            d += 1;
        }
        d
    }

    /// Trace down to `F_p`.
    pub fn trace_fp(&self, x: &FqkElem) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for _ in 0..self.n {
            acc = self.add(&acc, &y);
            y = self.pow(&y, self.p as u128);
        }
        debug_assert!(acc.coords[1..].iter().all(|&c| c == 0));
        acc.coords[0]
    }

    /// Visit one representative (smallest index) of each Frobenius orbit
    /// whose length is exactly `k`.
    pub fn for_each_closed_point<F: FnMut(FqkElem)>(&self, mut f: F) {
        let size = self
            .order()
            .expect("field too large to enumerate") as usize;
        let mut seen = vec![0u64; size.div_ceil(64)];
        for idx in 0..size {
            if seen[idx / 64] >> (idx % 64) & 1 == 1 {
                continue;
            }
            let x = self.from_index(idx as u64);
            let mut y = x.clone();
            let mut len = 0;
            loop {
                let j = self.index(&y) as usize;
                seen[j / 64] |= 1 << (j % 64);
                len += 1;
                y = self.frob_q(&y);
                if y == x {
                    break;
                }
            }
            if len == self.k {
                f(x);
            }
        }
    }
}

fn pad(v: &[u64], n: usize) -> Vec<u64> {
    let mut out = v.to_vec();
    out.resize(n, 0);
    out
}

/// A root in `F_{p^n}` of the base modulus (degree a > 1): search the
/// multiplicative group of the subfield `F_q` through a generator.
fn find_base_root(p: u64, n: usize, ext_mod: &[u64], base_mod: &[u64], q: u64) -> Vec<u64> {
    let order = checked_prime_power(p, n as u32)
        .map(|v| v as u128)
        .unwrap_or_else(|| (p as u128).pow(n as u32));
    let cof = (order - 1) / (q as u128 - 1);
    let factors = prime_factors(q - 1);
    let mut idx: u128 = 1;
    let h = loop {
        idx += 1;
        let mut y = Vec::new();
        let mut t = idx;
        while t > 0 {
            y.push((t % p as u128) as u64);
            t /= p as u128;
        }
        let h = fp::powmod(&y, cof, ext_mod, p);
        if h.is_empty() {
            continue;
        }
        let generates = factors
            .iter()
            .all(|&r| fp::powmod(&h, ((q - 1) / r) as u128, ext_mod, p) != vec![1]);
        if generates {
            break h;
        }
    };
    let mut he = vec![1u64];
    for _ in 0..q - 1 {
        // evaluate the base modulus at h^e by Horner
        let mut acc: Vec<u64> = Vec::new();
        for &c in base_mod.iter().rev() {
            acc = fp::mulmod(&acc, &he, ext_mod, p);
            acc = fp::sub(&acc, &fp::trim(vec![(p - c) % p]), p);
        }
        if acc.is_empty() {
            return he;
        }
        he = fp::mulmod(&he, &h, ext_mod, p);
    }
    unreachable!("irreducible base modulus has a root in every extension")
}

/// `Z_{q^k} / p^M` presented as `(Z/p^M)[t] / G(t)`.
pub struct UnramRing {
    p: u64,
    n: usize,
    prec: u32,
    pm: u64,
    /// monic lift of the extension modulus, coefficients in `[0, p)`
    g: Vec<u64>,
    /// coordinates of `σ(t)^i`
    sigma_cols: Vec<Vec<u64>>,
    /// `Tr(t^i)` for `i < n`
    traces: Vec<u64>,
    ext: Arc<ExtField>,
}

impl std::fmt::Debug for UnramRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Z_({}^{})/{}^{}", self.p, self.n, self.p, self.prec)
    }
}

impl UnramRing {
    fn build(ext: Arc<ExtField>, prec: u32) -> UnramRing {
        let p = ext.p;
        let n = ext.n;
        let pm = checked_prime_power(p, prec).expect("p^M must stay below 2^60");
        let mut ring = UnramRing {
            p,
            n,
            prec,
            pm,
            g: ext.modulus.clone(),
            sigma_cols: Vec::new(),
            traces: Vec::new(),
            ext,
        };
        ring.traces = ring.power_sums();
        let st = ring.solve_sigma_t();
        let mut cols = Vec::with_capacity(n);
        let mut cur = ring.one_coords();
        for _ in 0..n {
            cols.push(cur.clone());
            cur = ring.mul_coords(&cur, &st);
        }
        ring.sigma_cols = cols;
        ring
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn modulus_pm(&self) -> u64 {
        self.pm
    }

    pub fn lifted_modulus(&self) -> &[u64] {
        &self.g
    }

    pub fn ext(&self) -> &Arc<ExtField> {
        &self.ext
    }

    pub fn sigma_t(&self) -> &[u64] {
        if self.n == 1 {
            &self.sigma_cols[0]
        } else {
            &self.sigma_cols[1]
        }
    }

    fn one_coords(&self) -> Vec<u64> {
        let mut v = vec![0; self.n];
        v[0] = 1 % self.pm;
        v
    }

    /// Newton identities for the roots of `G`.
    fn power_sums(&self) -> Vec<u64> {
        let n = self.n;
        let m = self.pm;
        let g = &self.g;
        let mut s = vec![0u64; n];
        s[0] = n as u64 % m;
        for k in 1..n {
            let mut acc = mul_mod(k as u64 % m, g[n - k], m);
            for i in 1..k {
                acc = (acc + mul_mod(g[n - i], s[k - i], m)) % m;
            }
            s[k] = (m - acc) % m;
        }
        s
    }

    pub(crate) fn mul_coords(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let n = self.n;
        let m = self.pm;
        let mut acc = vec![0u128; 2 * n - 1];
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                acc[i + j] += a as u128 * b as u128;
            }
            if i % 64 == 63 {
                for v in acc.iter_mut() {
                    *v %= m as u128;
                }
            }
        }
        let mut r: Vec<u64> = acc.into_iter().map(|v| (v % m as u128) as u64).collect();
        for top in (n..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            for i in 0..n {
                let idx = top - n + i;
                r[idx] = (r[idx] + m - mul_mod(c, self.g[i], m)) % m;
            }
        }
        r.truncate(n);
        r
    }

    fn eval_g(&self, r: &[u64], deriv: bool) -> Vec<u64> {
        let m = self.pm;
        let mut acc = vec![0u64; self.n];
        let top = if deriv { self.n - 1 } else { self.n };
        for k in (0..=top).rev() {
            acc = self.mul_coords(&acc, r);
            let c = if deriv {
                mul_mod(self.g[k + 1], (k as u64 + 1) % m, m)
            } else {
                self.g[k]
            };
            acc[0] = (acc[0] + c) % m;
        }
        acc
    }

    fn inverse_unit(&self, u: &[u64]) -> Vec<u64> {
        let red: Vec<u64> = u.iter().map(|c| c % self.p).collect();
        let inv0 = fp::invmod(&red, &self.ext.modulus, self.p).expect("unit");
        let mut y = pad(&inv0, self.n);
        let mut digits = 1;
        while digits < self.prec {
            // y <- y (2 - u y)
            let uy = self.mul_coords(u, &y);
            let mut two_minus = uy.iter().map(|c| (self.pm - c) % self.pm).collect::<Vec<_>>();
            two_minus[0] = (two_minus[0] + 2) % self.pm;
            y = self.mul_coords(&y, &two_minus);
            digits *= 2;
        }
        y
    }

    /// Root of `G` congruent to `t^p`, by Newton iteration.
    fn solve_sigma_t(&self) -> Vec<u64> {
        if self.n == 1 {
            return self.one_coords();
        }
        let mut t = vec![0u64; self.n];
        t[1] = 1;
        let mut r = self.pow_coords(&t, self.p);
        for _ in 0..128 {
            let gv = self.eval_g(&r, false);
            if gv.iter().all(|&c| c == 0) {
                return r;
            }
            let dv = self.eval_g(&r, true);
            let step = self.mul_coords(&gv, &self.inverse_unit(&dv));
            r = r
                .iter()
                .zip(&step)
                .map(|(a, b)| (a + self.pm - b) % self.pm)
                .collect();
        }
        panic!("Frobenius lift did not converge");
    }

    fn pow_coords(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one_coords();
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_coords(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul_coords(&b, &b);
            }
        }
        acc
    }

    pub(crate) fn sigma_coords(&self, x: &[u64]) -> Vec<u64> {
        let m = self.pm;
        let mut out = vec![0u128; self.n];
        for (i, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(&self.sigma_cols[i]) {
                *o = (*o + c as u128 * b as u128) % m as u128;
            }
        }
        out.into_iter().map(|v| v as u64).collect()
    }

    /// `Tr(x)` computed from the power-sum vector.
    pub(crate) fn trace_coords(&self, x: &[u64]) -> u64 {
        let m = self.pm as u128;
        (x.iter()
            .zip(&self.traces)
            .map(|(&a, &b)| a as u128 * b as u128 % m)
            .sum::<u128>()
            % m) as u64
    }

    pub fn elem(self: &Arc<Self>, coords: Vec<u64>) -> UnramElem {
        assert_eq!(coords.len(), self.n);
        UnramElem {
            ring: self.clone(),
            coords: coords.into_iter().map(|c| c % self.pm).collect(),
        }
    }

    pub fn from_int(self: &Arc<Self>, v: i64) -> UnramElem {
        let mut c = vec![0; self.n];
        c[0] = v.rem_euclid(self.pm as i64) as u64;
        self.elem(c)
    }

    /// Lift with coordinates in `[0, p)`.
    pub fn lift(self: &Arc<Self>, x: &FqkElem) -> UnramElem {
        self.elem(x.coords.clone())
    }

    pub fn teichmuller(self: &Arc<Self>, x: &FqkElem) -> UnramElem {
        assert_eq!(x.coords.len(), self.n, "element from a different extension");
        let mut z = x.coords.clone();
        for _ in 1..self.prec {
            for _ in 0..self.n {
                z = self.pow_coords(&z, self.p);
            }
        }
        self.elem(z)
    }
}

#[derive(Clone)]
pub struct UnramElem {
    ring: Arc<UnramRing>,
    coords: Vec<u64>,
}

impl std::fmt::Debug for UnramElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} in {:?}", self.coords, self.ring)
    }
}

impl PartialEq for UnramElem {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &o.ring) && self.coords == o.coords
    }
}

impl UnramElem {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn ring(&self) -> &Arc<UnramRing> {
        &self.ring
    }

    pub fn k(&self) -> usize {
        self.ring.ext.k
    }

    pub fn prec(&self) -> u32 {
        self.ring.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, o: &UnramElem) -> UnramElem {
        let m = self.ring.pm;
        UnramElem {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| (a + b) % m)
                .collect(),
        }
    }

    pub fn sub(&self, o: &UnramElem) -> UnramElem {
        let m = self.ring.pm;
        UnramElem {
            ring: self.ring.clone(),
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| (a + m - b) % m)
                .collect(),
        }
    }

    pub fn mul(&self, o: &UnramElem) -> UnramElem {
        UnramElem {
            ring: self.ring.clone(),
            coords: self.ring.mul_coords(&self.coords, &o.coords),
        }
    }

    pub fn scale(&self, c: u64) -> UnramElem {
        let m = self.ring.pm;
        UnramElem {
            ring: self.ring.clone(),
            coords: self.coords.iter().map(|&a| mul_mod(a, c % m, m)).collect(),
        }
    }

    pub fn pow(&self, e: u64) -> UnramElem {
        UnramElem {
            ring: self.ring.clone(),
            coords: self.ring.pow_coords(&self.coords, e),
        }
    }

    pub fn frobenius(&self) -> UnramElem {
        UnramElem {
            ring: self.ring.clone(),
            coords: self.ring.sigma_coords(&self.coords),
        }
    }

    /// `Σ_l σ^l(z)`, which must land in `Z_p / p^M`.
    pub fn trace_to_zp(&self) -> Result<u64> {
        let m = self.ring.pm;
        let mut acc = vec![0u64; self.ring.n];
        let mut y = self.coords.clone();
        for _ in 0..self.ring.n {
            for (a, b) in acc.iter_mut().zip(&y) {
                *a = (*a + b) % m;
            }
            y = self.ring.sigma_coords(&y);
        }
        if acc[1..].iter().any(|&c| c != 0) {
            return Err(Error::TraceNotRational);
        }
        Ok(acc[0])
    }

    pub fn trace_linear(&self) -> u64 {
        self.ring.trace_coords(&self.coords)
    }

    pub fn reduce(&self) -> FqkElem {
        FqkElem {
            k: self.ring.ext.k,
            coords: self.coords.iter().map(|c| c % self.ring.p).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> FieldCtx {
        make_field(2, 2, &[1, 1, 1]).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(make_field(2, 2, &[1, 1, 1]).is_ok());
        assert!(make_field(3, 1, &[1, 1]).is_ok());
        assert_eq!(
            make_field(2, 2, &[1, 0, 1]).unwrap_err(),
            Error::ReducibleModulus
        );
        assert_eq!(make_field(4, 1, &[1, 1]).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(
            make_field(2, 2, &[1, 1]).unwrap_err(),
            Error::BadModulus(_)
        ));
    }

    #[test]
    fn small_closed_point_counts() {
        let f2 = make_field(2, 1, &[1, 1]).unwrap();
        let pts = f2.closed_points(1);
        assert_eq!(pts.len(), 2);
        assert_eq!(f2.closed_points(2).len(), 1);
        assert_eq!(f2.closed_points(3).len(), 2);
    }

    #[test]
    fn representative_is_orbit_minimum() {
        let ctx = make_field(3, 1, &[1, 1]).unwrap();
        let e = ctx.ext(3);
        e.for_each_closed_point(|x| {
            let mut y = e.frob_q(&x);
            while y != x {
                assert!(e.index(&y) > e.index(&x));
                y = e.frob_q(&y);
            }
        });
    }

    #[test]
    fn extension_moduli_are_deterministic() {
        let ctx = f4();
        assert_eq!(ctx.extension_modulus(2), fp::first_irreducible(4, 2));
        // x^4 + x + 1 is the first irreducible quartic over F_2
        assert_eq!(ctx.extension_modulus(2), vec![1, 1, 0, 0, 1]);
        let overridden = f4().with_extension_modulus(2, &[1, 0, 0, 1, 1]).unwrap();
        assert_eq!(overridden.extension_modulus(2), vec![1, 0, 0, 1, 1]);
    }

    #[test]
    fn embedding_is_a_root_of_the_base_modulus() {
        let ctx = f4();
        for k in 1..=3 {
            let e = ctx.ext(k);
            let w = e.embed_base(&[0, 1]);
            // w^2 + w + 1 = 0
            let lhs = e.add(&e.add(&e.mul(&w, &w), &w), &e.one());
            assert_eq!(lhs, e.zero());
        }
    }

    #[test]
    fn teichmuller_of_f4_generator() {
        let ctx = f4();
        let e = ctx.ext(1);
        let w = e.from_index(2);
        let z = ctx.teichmuller(&w, 8);
        assert_eq!(z.pow(3), z.ring().from_int(1));
        assert_eq!(z.reduce(), w);
        // [w] is a root of z^2 + z + 1, so its trace is -1
        assert_eq!(z.trace_to_zp().unwrap(), 255);
        // sigma([w]) = [w]^2
        assert_eq!(z.frobenius(), z.pow(2));
    }

    #[test]
    fn f2_teichmuller_in_degree_two() {
        let ctx = make_field(2, 1, &[1, 1]).unwrap();
        let e = ctx.ext(2);
        let w = e.from_index(2);
        let z = ctx.teichmuller(&w, 8);
        assert_eq!(z.pow(3), z.ring().from_int(1));
    }

    #[test]
    fn traces_of_constants() {
        let ctx = f4();
        let r = ctx.ring(3, 5);
        assert_eq!(r.from_int(1).trace_to_zp().unwrap(), 6);
        assert_eq!(r.from_int(0).trace_to_zp().unwrap(), 0);
        let z = r.from_int(7);
        assert_eq!(z.frobenius(), z);
    }

    #[test]
    fn sigma_has_order_n() {
        let ctx = make_field(3, 2, &[2, 2, 1]).unwrap();
        let r = ctx.ring(2, 6);
        let z = r.elem(vec![5, 17, 100, 3]);
        let mut y = z.clone();
        for _ in 0..4 {
            y = y.frobenius();
        }
        assert_eq!(y, z);
        assert_ne!(z.frobenius(), z);
    }
}
