//! Dwork's path: the specialized splitting series, the matrix of `ψ^a`,
//! its Fredholm determinant `C*(χ, s)` and the recovered `L*(χ, s)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::artinhasse::{artin_hasse_mod, pi_i_at_chi, PiValue};
use crate::cyclo::{CycloCtx, ExactCyclo, TruncCyclo};
use crate::error::{Error, Result};
use crate::field::UnramRing;
use crate::linalg::{det_one_minus_sa, power_traces, Matrix};
use crate::scalar::{bigint_mod, checked_prime_power, mul_mod, rat_int, Scalar, Valuation, Zpm};
use crate::series::TruncSeries;
use crate::tower::TowerSpec;

/// `(O_m ⊗ Z_q) / p^M`; elements are `a` blocks of `phi` coordinates,
/// block `u` holding the `O_m`-coefficient of `t^u`.
pub struct DworkRing {
    cctx: Arc<CycloCtx>,
    unram: Arc<UnramRing>,
    a: usize,
    phi: usize,
    p: u64,
    prec: u32,
    pm: u64,
    /// low coefficients of the cyclotomic modulus mod p^M
    cmod: Vec<u64>,
}

impl fmt::Debug for DworkRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ⊗ {:?}", self.cctx, self.unram)
    }
}

pub fn make_dwork_ring(spec: &TowerSpec, cctx: &Arc<CycloCtx>, prec: u32) -> Result<Arc<DworkRing>> {
    let p = spec.p();
    let pm = checked_prime_power(p, prec)
        .ok_or_else(|| Error::TooLarge(format!("{p}^{prec} exceeds the residue range")))?;
    let phi = cctx.phi();
    if phi > 255 {
        return Err(Error::TooLarge("conductor too large for the Dwork path".into()));
    }
    let cmod = cctx.modulus()[..phi]
        .iter()
        .map(|c| bigint_mod(c, pm))
        .collect();
    Ok(Arc::new(DworkRing {
        cctx: cctx.clone(),
        unram: spec.field().ring(1, prec),
        a: spec.a(),
        phi,
        p,
        prec,
        pm,
        cmod,
    }))
}

impl DworkRing {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn cctx(&self) -> &Arc<CycloCtx> {
        &self.cctx
    }

    /// Valuation ceiling `M * phi` in `π_χ`-units.
    pub fn ceiling(&self) -> u64 {
        self.prec as u64 * self.phi as u64
    }

    pub fn zero(self: &Arc<Self>) -> DworkElem {
        DworkElem {
            ring: self.clone(),
            c: vec![0; self.a * self.phi],
        }
    }

    pub fn from_int(self: &Arc<Self>, v: &BigInt) -> DworkElem {
        let mut z = self.zero();
        z.c[0] = bigint_mod(v, self.pm);
        z
    }

    pub fn from_cyclo(self: &Arc<Self>, x: &TruncCyclo) -> DworkElem {
        let mut z = self.zero();
        for (i, c) in x.coords().iter().enumerate() {
            z.c[i] = c.value() % self.pm;
        }
        z
    }

    pub fn from_exact(self: &Arc<Self>, x: &ExactCyclo) -> DworkElem {
        let mut z = self.zero();
        for (i, c) in x.coords().iter().enumerate() {
            z.c[i] = bigint_mod(c, self.pm);
        }
        z
    }

    /// Embed an element of `Z_q / p^M` given by its `t`-coordinates.
    pub fn from_unram(self: &Arc<Self>, coords: &[u64]) -> DworkElem {
        let mut z = self.zero();
        for (u, &c) in coords.iter().enumerate() {
            z.c[u * self.phi] = c % self.pm;
        }
        z
    }

    fn mul_raw(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let (a, phi, m) = (self.a, self.phi, self.pm);
        let w = 2 * phi - 1;
        let mut acc = vec![0u128; (2 * a - 1) * w];
        for u in 0..a {
            let xu = &x[u * phi..(u + 1) * phi];
            if xu.iter().all(|&c| c == 0) {
                continue;
            }
            for v in 0..a {
                let yv = &y[v * phi..(v + 1) * phi];
                let row = &mut acc[(u + v) * w..(u + v + 1) * w];
                for (i, &xi) in xu.iter().enumerate() {
                    if xi == 0 {
                        continue;
                    }
                    for (j, &yj) in yv.iter().enumerate() {
                        row[i + j] += xi as u128 * yj as u128;
                    }
                }
            }
            for c in acc.iter_mut() {
                *c %= m as u128;
            }
        }
        // reduce π-degree in every t-row
        let mut rows: Vec<Vec<u64>> = acc
            .chunks(w)
            .map(|r| {
                let mut r: Vec<u64> = r.iter().map(|&v| v as u64).collect();
                for top in (phi..w).rev() {
                    let c = r[top];
                    if c == 0 {
                        continue;
                    }
                    for i in 0..phi {
                        let idx = top - phi + i;
                        r[idx] = (r[idx] + m - mul_mod(c, self.cmod[i], m)) % m;
                    }
                }
                r.truncate(phi);
                r
            })
            .collect();
        // reduce t-degree with the lifted modulus G
        let g = self.unram.lifted_modulus();
        for top in (a..rows.len()).rev() {
            let hi = std::mem::take(&mut rows[top]);
            if hi.iter().all(|&c| c == 0) {
                continue;
            }
            for (i, &gi) in g.iter().take(a).enumerate() {
                if gi == 0 {
                    continue;
                }
                let dst = &mut rows[top - a + i];
                for (d, &h) in dst.iter_mut().zip(&hi) {
                    *d = (*d + m - mul_mod(h, gi, m)) % m;
                }
            }
        }
        rows.truncate(a);
        rows.concat()
    }
}

#[derive(Clone)]
pub struct DworkElem {
    ring: Arc<DworkRing>,
    c: Vec<u64>,
}

impl fmt::Debug for DworkElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.c)
    }
}

impl PartialEq for DworkElem {
    fn eq(&self, o: &Self) -> bool {
        self.c == o.c
    }
}

impl DworkElem {
    pub fn ring(&self) -> &Arc<DworkRing> {
        &self.ring
    }

    pub fn raw(&self) -> &[u64] {
        &self.c
    }

    /// `σ` on the `Z_q` factor, trivial on `π`.
    pub fn sigma(&self) -> DworkElem {
        let r = &self.ring;
        if r.a == 1 {
            return self.clone();
        }
        let mut out = vec![0u64; self.c.len()];
        for i in 0..r.phi {
            let tcoords: Vec<u64> = (0..r.a).map(|u| self.c[u * r.phi + i]).collect();
            let s = r.unram.sigma_coords(&tcoords);
            for (u, v) in s.into_iter().enumerate() {
                out[u * r.phi + i] = v;
            }
        }
        DworkElem {
            ring: self.ring.clone(),
            c: out,
        }
    }

    /// `O_m`-coefficient of `t^u`.
    pub fn component(&self, u: usize) -> TruncCyclo {
        let r = &self.ring;
        let coords = self.c[u * r.phi..(u + 1) * r.phi]
            .iter()
            .map(|&v| Zpm::new(v, r.pm, r.prec))
            .collect();
        TruncCyclo::from_coords(&r.cctx, coords)
    }

    /// Gauss valuation: minimum over the `t`-components.
    pub fn vpi(&self) -> Valuation {
        let mut best: Option<BigRational> = None;
        for u in 0..self.ring.a {
            if let Valuation::Finite(v) = self.component(u).vpi() {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(rat_int(self.ring.ceiling() as i64)),
        }
    }

    /// Valuation of the non-constant `t`-components.
    pub fn off_constant_vpi(&self) -> Valuation {
        let mut best: Option<BigRational> = None;
        for u in 1..self.ring.a {
            if let Valuation::Finite(v) = self.component(u).vpi() {
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(rat_int(self.ring.ceiling() as i64)),
        }
    }
}

impl Add for DworkElem {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let m = self.ring.pm;
        DworkElem {
            c: self.c.iter().zip(&o.c).map(|(x, y)| (x + y) % m).collect(),
            ring: self.ring,
        }
    }
}

impl Sub for DworkElem {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        let m = self.ring.pm;
        DworkElem {
            c: self.c.iter().zip(&o.c).map(|(x, y)| (x + m - y) % m).collect(),
            ring: self.ring,
        }
    }
}

impl Neg for DworkElem {
    type Output = Self;
    fn neg(self) -> Self {
        let m = self.ring.pm;
        DworkElem {
            c: self.c.iter().map(|x| (m - x) % m).collect(),
            ring: self.ring,
        }
    }
}

impl Mul for DworkElem {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        DworkElem {
            c: self.ring.mul_raw(&self.c, &o.c),
            ring: self.ring,
        }
    }
}

impl Scalar for DworkElem {
    fn zero_like(&self) -> Self {
        self.ring.zero()
    }
    fn one_like(&self) -> Self {
        let mut z = self.ring.zero();
        z.c[0] = 1 % self.ring.pm;
        z
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }
    fn embed_int(&self, v: &BigInt) -> Self {
        self.ring.from_int(v)
    }
}

pub type DworkSeries = TruncSeries<DworkElem>;

/// `Σ e_n c^n X^{jn}` mod `X^len`, stopping once `c^n` vanishes.
fn ah_factor(ring: &Arc<DworkRing>, c: &DworkElem, j: usize, len: usize) -> Result<DworkSeries> {
    let nmax = (len - 1)
        .checked_div(j)
        .map_or(ring.ceiling() as usize + 1, |n| n + 1);
    let e = artin_hasse_mod(ring.p, nmax, ring.prec)?;
    let mut out = DworkSeries::zero(&ring.zero(), len);
    let mut pw = c.one_like();
    let mut constant = ring.zero();
    for (n, en) in e.iter().enumerate() {
        if pw.is_zero() {
            break;
        }
        let term = pw.clone() * ring.from_int(&BigInt::from(en.value()));
        if j == 0 {
            constant = constant + term;
        } else {
            out.set(n * j, term);
        }
        pw = pw * c.clone();
    }
    if j == 0 {
        out.set(0, constant);
    }
    Ok(out)
}

/// `Ê(X) = Π E(π_i(π_χ) [a_ij] X^j)` mod `(p^M, X^len)`.
pub fn ef_series(spec: &TowerSpec, ring: &Arc<DworkRing>, len: usize) -> Result<DworkSeries> {
    let cctx = &ring.cctx;
    let teich = ring.unram.clone();
    let ext = teich.ext().clone();
    let mut acc = DworkSeries::one(&ring.zero(), len);
    for (&(i, j), a) in spec.coeffs() {
        let pi = match pi_i_at_chi(cctx, i, ring.prec)? {
            PiValue::ExactZero => continue,
            PiValue::Value(v) => v,
        };
        let t = teich.teichmuller(&ext.embed_base(a));
        let c = ring.from_cyclo(&pi) * ring.from_unram(t.coords());
        let factor = ah_factor(ring, &c, j as usize, len)?;
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct NuclearMatrix {
    pub dim: usize,
    pub entries: Matrix<DworkElem>,
}

/// Matrix `β_{qi-j}` of `ψ^a` on the basis `X^0..X^{dim-1}`.
pub fn psi_matrix(spec: &TowerSpec, ring: &Arc<DworkRing>, dim: usize) -> Result<NuclearMatrix> {
    let q = spec.q() as usize;
    let p = spec.p() as usize;
    let len = q * (dim - 1) + 1;
    let e = ef_series(spec, ring, len)?;
    let mut b = e.clone();
    let mut conj = e;
    let mut step = 1;
    for _ in 1..spec.a() {
        step *= p;
        conj = conj.map(|c| c.sigma());
        b = b.mul(&conj.substitute_power(step));
    }
    let entries: Matrix<DworkElem> = (0..dim)
        .into_par_iter()
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let idx = (q * i) as i64 - j as i64;
                    if idx < 0 {
                        ring.zero()
                    } else {
                        b.coeff(idx as usize).clone()
                    }
                })
                .collect()
        })
        .collect();
    Ok(NuclearMatrix { dim, entries })
}

/// Lower bound for `v_π(A[i][j])`: `(qi - j) / (p^{a-1} δ)`.
pub fn entry_bound(spec: &TowerSpec, i: usize, j: usize) -> BigRational {
    let q = spec.q() as i64;
    let denom = rat_int(spec.p().pow(spec.a() as u32 - 1) as i64) * spec.invariants().delta;
    rat_int(q * i as i64 - j as i64) / denom
}

pub fn char_series(a: &NuclearMatrix, k: usize) -> DworkSeries {
    TruncSeries::new(det_one_minus_sa(&a.entries, k))
}

/// `C(s) / C(qs)` mod `s^{K+1}`.
pub fn l_star_from_c(c: &DworkSeries, q: u64, k: usize) -> DworkSeries {
    let c = c.truncate(k + 1);
    let qv = c.coeff(0).embed_int(&BigInt::from(q));
    let inv = c.rescale_var(&qv).inverse_unit();
    c.mul(&inv)
}

#[derive(Clone, Debug)]
pub struct DworkResult {
    pub dim: usize,
    pub prec: u32,
    pub c_star: Vec<DworkElem>,
    pub l_star: Vec<TruncCyclo>,
    pub l_star_vals: Vec<Valuation>,
    pub c_star_vals: Vec<Valuation>,
    /// smallest valuation of a non-`O_m` component in `L*`
    pub leak: Valuation,
    /// lower bound for the truncation error in each `L*` coefficient
    pub error_floor: Vec<BigRational>,
    pub stable: bool,
    pub certified: bool,
    pub dims_tried: Vec<usize>,
}

/// Truncation-error floor for `L*_n`, in `π_χ`-units: a minor meeting an
/// index `>= dim` has valuation at least `(q-1) Σ indices / (p^{a-1} δ)`.
pub fn error_floors(spec: &TowerSpec, m_chi: u32, dim: usize, k: usize) -> Vec<BigRational> {
    let q = spec.q() as i64;
    let denom = rat_int(spec.p().pow(spec.a() as u32 - 1) as i64) * spec.invariants().delta;
    let unit = spec.units_per_q(m_chi);
    let e = |j: usize| {
        let s = dim as i64 + ((j as i64 - 1) * (j as i64 - 2)) / 2;
        rat_int((q - 1) * s) / &denom
    };
    (0..=k)
        .map(|n| {
            (1..=n.max(1))
                .map(|j| e(j) + &unit * rat_int(n.saturating_sub(j) as i64))
                .min()
                .unwrap()
        })
        .collect()
}

fn run_at(spec: &TowerSpec, ring: &Arc<DworkRing>, dim: usize, k: usize) -> Result<(Vec<DworkElem>, DworkSeries)> {
    let a = psi_matrix(spec, ring, dim)?;
    let c = char_series(&a, k);
    let l = l_star_from_c(&c, spec.q(), k);
    Ok((c.into_coeffs(), l))
}

/// Default dimension `max(deg L + 2 d_m, 8)`.
pub fn default_dim(spec: &TowerSpec, m_chi: u32) -> usize {
    (spec.degree_l(m_chi) as usize + 2 * spec.invariants().d_m as usize).max(8)
}

/// Default precision `ceil(a deg L / 2) + 4` digits.
pub fn default_prec(spec: &TowerSpec, m_chi: u32) -> u32 {
    let d = spec.degree_l(m_chi) as usize * spec.a();
    d.div_ceil(2) as u32 + 4
}

/// `L*` through the Dwork path. The dimension starts at `dim` and doubles
/// until two consecutive truncations give the same `C*` valuations and the
/// truncation-error floor clears every valuation read off `L*`.
pub fn l_star_dwork(
    spec: &TowerSpec,
    cctx: &Arc<CycloCtx>,
    dim: Option<usize>,
    prec: Option<u32>,
    max_dim: usize,
) -> Result<DworkResult> {
    let m_chi = cctx.m();
    let k = spec.degree_l(m_chi) as usize + 1;
    let prec = prec.unwrap_or_else(|| default_prec(spec, m_chi));
    let ring = make_dwork_ring(spec, cctx, prec)?;
    let mut dim = dim.unwrap_or_else(|| default_dim(spec, m_chi)).max(k);
    let mut dims_tried = vec![dim];
    let (mut c_prev, _) = run_at(spec, &ring, dim, k)?;
    loop {
        let next = dim * 2;
        dims_tried.push(next);
        let (c, l) = run_at(spec, &ring, next, k)?;
        let stable = c.iter().map(|x| x.vpi()).collect::<Vec<_>>()
            == c_prev.iter().map(|x| x.vpi()).collect::<Vec<_>>();
        let floors = error_floors(spec, m_chi, next, k);
        let l_vals: Vec<Valuation> = l.coeffs().iter().map(|x| x.component(0).vpi()).collect();
        let certified = l_vals.iter().zip(&floors).all(|(v, f)| match v {
            Valuation::Finite(v) => v < f,
            _ => true,
        });
        let done = (stable && certified) || next * 2 > max_dim;
        if done {
            let leak = l
                .coeffs()
                .iter()
                .map(|x| x.off_constant_vpi())
                .min_by_key(val_key)
                .unwrap_or(Valuation::Infinite);
            // a non-rational component is a witness for the truncation
            // error, so it must sit above the value read at that index
            for (n, (x, v)) in l.coeffs().iter().zip(&l_vals).enumerate() {
                if let (Valuation::Finite(lv), Some(v)) = (x.off_constant_vpi(), v.finite()) {
                    if lv <= *v {
                        return Err(Error::SaturatedPrecision(format!(
                            "L*_{n} has a non-rational component of valuation {lv}"
                        )));
                    }
                }
            }
            return Ok(DworkResult {
                dim: next,
                prec,
                c_star_vals: c.iter().map(|x| x.vpi()).collect(),
                c_star: c,
                l_star: l.coeffs().iter().map(|x| x.component(0)).collect(),
                l_star_vals: l_vals,
                leak,
                error_floor: floors,
                stable,
                certified,
                dims_tried,
            });
        }
        dim = next;
        c_prev = c;
    }
}

fn val_key(v: &Valuation) -> (bool, BigRational) {
    match v.lower_bound() {
        Some(b) => (false, b.clone()),
        None => (true, BigRational::zero()),
    }
}

#[derive(Clone, Debug)]
pub struct TraceCheck {
    pub k: usize,
    pub dim: usize,
    pub prec: u32,
    /// `v_π((q^k - 1) Tr(A^k) - S*(k))`; `AtLeast(ceiling)` means equal mod `p^M`
    pub difference: Valuation,
    pub holds: bool,
}

/// Dimension at which every closed walk through an omitted index is
/// divisible by `p^M`: `(q-1) dim / (p^{a-1} δ) >= M phi`.
pub fn exact_trace_dim(spec: &TowerSpec, phi: usize, prec: u32) -> usize {
    let q = spec.q() as i64;
    let need = rat_int(prec as i64 * phi as i64)
        * rat_int(spec.p().pow(spec.a() as u32 - 1) as i64)
        * spec.invariants().delta
        / rat_int(q - 1);
    need.ceil().to_integer().to_usize().unwrap().max(1)
}

/// `(q^k - 1) Tr(A^k) ≡ S*(k)` for `k = 1..=kmax`.
pub fn trace_formula_check(
    spec: &TowerSpec,
    cctx: &Arc<CycloCtx>,
    kmax: usize,
    prec: u32,
    sums: &[ExactCyclo],
) -> Result<Vec<TraceCheck>> {
    let ring = make_dwork_ring(spec, cctx, prec)?;
    let dim = exact_trace_dim(spec, cctx.phi(), prec);
    let a = psi_matrix(spec, &ring, dim)?;
    let traces = power_traces(&a.entries, kmax);
    let q = spec.q();
    Ok(traces
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let k = i + 1;
            let factor = ring.from_int(&(BigInt::from(q).pow(k as u32) - 1));
            let diff = factor * t - ring.from_exact(&sums[i]);
            let difference = diff.vpi();
            TraceCheck {
                k,
                dim,
                prec,
                holds: diff.is_zero(),
                difference,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::make_cyclo;
    use crate::field::make_field;
    use crate::scalar::rat;
    use crate::tower::validate;

    fn x_cubed() -> TowerSpec {
        let f = Arc::new(make_field(2, 1, &[1, 1]).unwrap());
        validate(f, [((0, 3), vec![1])].into_iter().collect()).unwrap()
    }

    #[test]
    fn splitting_series_shape() {
        let s = x_cubed();
        let c = make_cyclo(2, 1);
        let ring = make_dwork_ring(&s, &c, 8).unwrap();
        let e = ef_series(&s, &ring, 13).unwrap();
        assert!(e.coeff(0).is_one());
        for (n, x) in e.coeffs().iter().enumerate() {
            if n % 3 != 0 {
                assert!(x.is_zero());
            }
        }
        assert_eq!(e.coeff(3).vpi(), Valuation::Finite(rat(1, 1)));
    }

    #[test]
    fn matrix_shape() {
        let s = x_cubed();
        let c = make_cyclo(2, 1);
        let ring = make_dwork_ring(&s, &c, 8).unwrap();
        let a = psi_matrix(&s, &ring, 6).unwrap();
        assert!(a.entries[0][0].is_one());
        assert!(a.entries[0][3].is_zero());
        for i in 0..6 {
            for j in 0..6 {
                if let Valuation::Finite(v) = a.entries[i][j].vpi() {
                    assert!(v >= entry_bound(&s, i, j));
                }
            }
        }
    }

    #[test]
    fn trivial_l_star_from_c() {
        let s = x_cubed();
        let c = make_cyclo(2, 1);
        let ring = make_dwork_ring(&s, &c, 8).unwrap();
        let one = DworkSeries::one(&ring.zero(), 4);
        assert_eq!(l_star_from_c(&one, 2, 3), one);
    }
}
