//! Newton polygons and the slope checks run on computed L-functions.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cyclo::{make_cyclo, ExactCyclo};
use crate::error::{Error, Result};
use crate::lfun;
use crate::scalar::{rat, rat_int, Valuation};
use crate::tower::TowerSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonPolygon {
    pub points: Vec<(i64, Valuation)>,
    pub vertices: Vec<(i64, BigRational)>,
    pub slopes: Vec<BigRational>,
}

fn cross(o: &(i64, BigRational), a: &(i64, BigRational), b: &(i64, BigRational)) -> BigRational {
    rat_int(a.0 - o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * rat_int(b.0 - o.0)
}

/// Lower convex hull of the finite points; a saturated point is accepted
/// only when its lower bound already lies on or above the hull.
pub fn newton_polygon(points: &[(i64, Valuation)]) -> Result<NewtonPolygon> {
    let mut finite: Vec<(i64, BigRational)> = points
        .iter()
        .filter_map(|(i, v)| v.finite().map(|v| (*i, v.clone())))
        .collect();
    finite.sort_by_key(|p| p.0);
    let mut hull: Vec<(i64, BigRational)> = Vec::new();
    for pt in finite {
        while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], &pt).is_positive() {
            hull.pop();
        }
        hull.push(pt);
    }
    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let run = w[1].0 - w[0].0;
        let s = (&w[1].1 - &w[0].1) / rat_int(run);
        slopes.extend(std::iter::repeat_n(s, run as usize));
    }
    let np = NewtonPolygon {
        points: points.to_vec(),
        vertices: hull,
        slopes,
    };
    for (i, v) in points {
        if let Valuation::AtLeast(b) = v {
            match np.value_at(*i) {
                Some(h) if *b >= h => {}
                _ => return Err(Error::PrecisionHole(*i)),
            }
        }
    }
    Ok(np)
}

impl NewtonPolygon {
    pub fn first_index(&self) -> Option<i64> {
        self.vertices.first().map(|v| v.0)
    }

    pub fn last_index(&self) -> Option<i64> {
        self.vertices.last().map(|v| v.0)
    }

    /// Height of the polygon at `i`, inside its span.
    pub fn value_at(&self, i: i64) -> Option<BigRational> {
        let w = self
            .vertices
            .windows(2)
            .find(|w| w[0].0 <= i && i <= w[1].0);
        match w {
            Some(w) => {
                let t = rat_int(i - w[0].0) / rat_int(w[1].0 - w[0].0);
                Some(&w[0].1 + t * (&w[1].1 - &w[0].1))
            }
            None if self.vertices.len() == 1 && self.vertices[0].0 == i => {
                Some(self.vertices[0].1.clone())
            }
            None => None,
        }
    }

    /// Divide all heights by `by` (unit change).
    pub fn rescale(&self, by: &BigRational) -> NewtonPolygon {
        let inv = BigRational::one() / by;
        NewtonPolygon {
            points: self.points.iter().map(|(i, v)| (*i, v.scale(&inv))).collect(),
            vertices: self.vertices.iter().map(|(i, v)| (*i, v * &inv)).collect(),
            slopes: self.slopes.iter().map(|s| s * &inv).collect(),
        }
    }

    /// Polygon with vertex `(0, 0)` and the given slopes, sorted.
    pub fn from_slopes(slopes: &[BigRational]) -> NewtonPolygon {
        let mut slopes = slopes.to_vec();
        slopes.sort();
        let mut vertices = vec![(0, BigRational::zero())];
        let mut h = BigRational::zero();
        for (i, s) in slopes.iter().enumerate() {
            h += s;
            if slopes.get(i + 1) != Some(s) {
                vertices.push((i as i64 + 1, h.clone()));
            }
        }
        NewtonPolygon {
            points: Vec::new(),
            vertices,
            slopes,
        }
    }
}

/// Points `(i, v(c_i))` of a coefficient list.
pub fn points_of(vals: &[Valuation]) -> Vec<(i64, Valuation)> {
    vals.iter().enumerate().map(|(i, v)| (i as i64, v.clone())).collect()
}

/// `a(p-1) k(k-1) / (2δ)`, in `π_χ`-units.
pub fn hodge_lower(spec: &TowerSpec, k: i64) -> BigRational {
    let inv = spec.invariants();
    let a = spec.a() as i64;
    let p = spec.p() as i64;
    rat_int(a * (p - 1) * k * (k - 1)) / (rat_int(2) * inv.delta)
}

/// Forced upper vertices: the Hodge points at `k ≡ 0, 1 mod d_m`, `k <= kmax`.
pub fn upper_vertices(spec: &TowerSpec, kmax: i64) -> Vec<(i64, BigRational)> {
    let d = spec.invariants().d_m as i64;
    (0..=kmax)
        .filter(|k| k % d == 0 || k % d == 1 % d)
        .map(|k| (k, hodge_lower(spec, k)))
        .collect()
}

fn interpolate(vs: &[(i64, BigRational)], k: i64) -> Option<BigRational> {
    if let Some(v) = vs.iter().find(|v| v.0 == k) {
        return Some(v.1.clone());
    }
    let w = vs.windows(2).find(|w| w[0].0 < k && k < w[1].0)?;
    let t = rat_int(k - w[0].0) / rat_int(w[1].0 - w[0].0);
    Some(&w[0].1 + t * (&w[1].1 - &w[0].1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEntry {
    pub k: i64,
    pub lower: BigRational,
    pub upper: Option<BigRational>,
    pub observed: Option<BigRational>,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
    pub forced: Vec<i64>,
    pub max_gap: BigRational,
    pub gap_ok: bool,
    pub pass: bool,
}

/// Hodge lower bound, forced upper vertices and the `W` gap for a polygon in
/// `π_χ`-units over `0..=kmax`; the upper side is skipped when `with_upper`
/// is false.
pub fn check_bounds(spec: &TowerSpec, np: &NewtonPolygon, kmax: i64, with_upper: bool) -> BoundReport {
    let upper = upper_vertices(spec, kmax);
    let w = spec.invariants().w;
    let mut entries = Vec::new();
    let mut max_gap = BigRational::zero();
    for k in 0..=kmax {
        let lower = hodge_lower(spec, k);
        let up = if with_upper { interpolate(&upper, k) } else { None };
        let observed = np.value_at(k);
        if let Some(u) = &up {
            let g = u - &lower;
            if g > max_gap {
                max_gap = g;
            }
        }
        let lower_ok = observed.as_ref().is_some_and(|o| *o >= lower);
        let upper_ok = match (&up, &observed) {
            (Some(u), Some(o)) => o <= u,
            (None, _) => true,
            (Some(_), None) => false,
        };
        entries.push(BoundEntry {
            k,
            lower,
            upper: up,
            observed,
            lower_ok,
            upper_ok,
        });
    }
    let gap_ok = max_gap <= w;
    let pass = gap_ok && entries.iter().all(|e| e.lower_ok && e.upper_ok);
    BoundReport {
        entries,
        forced: upper.iter().map(|v| v.0).collect(),
        max_gap,
        gap_ok,
        pass,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCheck {
    pub index: i64,
    pub expected: BigRational,
    pub observed: Option<BigRational>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowCheck {
    pub window: u64,
    pub lo: BigRational,
    pub hi: BigRational,
    pub at_lo: usize,
    pub inside: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm444Report {
    pub points: Vec<PointCheck>,
    pub windows: Vec<WindowCheck>,
    pub stray: usize,
    pub pass: bool,
}

/// Vertex families and window structure of the `L` polygon (in `q`-units)
/// for `m_chi > m`. The second family is checked where its index stays
/// within `deg L`.
pub fn check_thm444(spec: &TowerSpec, m_chi: u32, np: &NewtonPolygon) -> Thm444Report {
    let inv = spec.invariants();
    assert!(m_chi > inv.m);
    let p = spec.p();
    let d = inv.d_m as i64;
    let e = p.pow(m_chi - inv.m - 1);
    let pe = rat_int(e as i64);
    let deg = np.last_index().unwrap_or(0);
    let mut points = Vec::new();
    for n in 1..=e as i64 {
        let i1 = n * d - 1;
        let v1 = rat_int(n * (n * d - 1)) / (rat_int(2) * &pe);
        let i2 = n * d;
        let v2 = rat_int(n * (n * d + 1)) / (rat_int(2) * &pe);
        for (i, v) in [(i1, v1), (i2, v2)] {
            if i > deg {
                continue;
            }
            let observed = np.value_at(i);
            points.push(PointCheck {
                index: i,
                ok: observed.as_ref() == Some(&v),
                expected: v,
                observed,
            });
        }
    }
    let mut windows = Vec::new();
    let mut used = 0;
    for w in 1..=e {
        let lo = rat_int(w as i64 - 1) / &pe;
        let hi = rat_int(w as i64) / &pe;
        let at_lo = np.slopes.iter().filter(|s| **s == lo).count();
        let inside = np.slopes.iter().filter(|s| **s > lo && **s < hi).count();
        used += at_lo + inside;
        let want_lo = if w == 1 { 0 } else { 1 };
        windows.push(WindowCheck {
            window: w,
            ok: at_lo == want_lo && inside == d as usize - 1,
            lo,
            hi,
            at_lo,
            inside,
        });
    }
    let stray = np.slopes.len() - used;
    let pass = stray == 0 && points.iter().all(|c| c.ok) && windows.iter().all(|w| w.ok);
    Thm444Report {
        points,
        windows,
        stray,
        pass,
    }
}

/// `sup |F_n - F|` between the empirical CDF of the slopes and the uniform
/// CDF on `[0, 1]`, evaluated at the jumps.
pub fn uniformity_stat(slopes: &[BigRational]) -> Result<BigRational> {
    if slopes.is_empty() {
        return Err(Error::EmptySlopes);
    }
    let mut s = slopes.to_vec();
    s.sort();
    let n = rat_int(s.len() as i64);
    let mut best = BigRational::zero();
    for (i, v) in s.iter().enumerate() {
        let above = rat_int(i as i64 + 1) / &n - v;
        let below = v - rat_int(i as i64) / &n;
        for c in [above, below] {
            if c > best {
                best = c;
            }
        }
    }
    Ok(best)
}

/// Multiset generated from base slopes after `e` steps up the tower:
/// `∪_{i<p^e} {i/p^e} ∪ {(b+i)/p^e}` with one 0 removed.
pub fn predicted_slopes(base: &[BigRational], p: u64, e: u32) -> Vec<BigRational> {
    let pe = p.pow(e) as i64;
    let mut out = Vec::new();
    for i in 0..pe {
        out.push(rat(i, pe));
        for b in base {
            out.push((b + rat_int(i)) / rat_int(pe));
        }
    }
    if let Some(pos) = out.iter().position(|v| v.is_zero()) {
        out.remove(pos);
    }
    out.sort();
    out
}

pub fn check_stability(base: &[BigRational], slopes: &[BigRational], p: u64, e: u32) -> (bool, Vec<BigRational>) {
    let predicted = predicted_slopes(base, p, e);
    let mut got = slopes.to_vec();
    got.sort();
    (got == predicted, predicted)
}

/// Slopes symmetric under `v -> 1 - v` and summing to `deg / 2`.
pub fn check_functional_eq(np: &NewtonPolygon, deg: usize) -> bool {
    let mut s = np.slopes.clone();
    s.sort();
    let mut r: Vec<BigRational> = s.iter().map(|v| BigRational::one() - v).collect();
    r.sort();
    let sum: BigRational = s.iter().cloned().sum();
    s.len() == deg && s == r && sum == rat(deg as i64, 2)
}

/// `Π_{i<terms} L*(q^i s)` mod `s^{k+1}` with exact coefficients.
pub fn c_star_from_l_star(l: &[ExactCyclo], q: u64, k: usize, terms: usize) -> Vec<ExactCyclo> {
    let cctx = l[0].ctx().clone();
    let mut acc = vec![cctx.zero(); k + 1];
    acc[0] = cctx.one();
    for i in 0..terms {
        let qi = BigInt::from(q).pow(i as u32);
        let mut scaled = Vec::with_capacity(k + 1);
        let mut pw = BigInt::one();
        for n in 0..=k {
            let c = l.get(n).cloned().unwrap_or_else(|| cctx.zero());
            scaled.push(c.scale(&pw));
            pw *= &qi;
        }
        let mut next = vec![cctx.zero(); k + 1];
        for (x, ax) in acc.iter().enumerate() {
            if ax.coords().iter().all(|c| c.is_zero()) {
                continue;
            }
            for (y, sy) in scaled.iter().enumerate().take(k + 1 - x) {
                next[x + y] = next[x + y].clone() + ax.clone() * sy.clone();
            }
        }
        acc = next;
    }
    acc
}

/// Valuations of the truncated `C*`: values at or above `ceiling` could
/// still move once the omitted factors are included.
pub fn c_star_valuations(c: &[ExactCyclo], ceiling: &BigRational) -> Vec<Valuation> {
    c.iter()
        .map(|x| match x.vpi() {
            Valuation::Finite(v) if v < *ceiling => Valuation::Finite(v),
            _ => Valuation::AtLeast(ceiling.clone()),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Om2Report {
    pub m_chi: u32,
    pub range: usize,
    pub relevant: BTreeSet<(u32, u64)>,
    pub polygon_a: NewtonPolygon,
    pub polygon_b: NewtonPolygon,
    pub identical: bool,
}

/// Coefficients that can affect the polygon, in either spec.
pub fn relevant_union(a: &TowerSpec, b: &TowerSpec) -> BTreeSet<(u32, u64)> {
    let mut out = a.stability_constants().relevant;
    out.extend(b.stability_constants().relevant);
    out
}

/// C*-polygon of a spec over `0..=range`, assembled from the exact `L*`.
pub fn c_star_polygon(spec: &TowerSpec, m_chi: u32, range: usize) -> Result<NewtonPolygon> {
    let cctx = make_cyclo(spec.p(), m_chi);
    let ls = lfun::l_star(spec, &cctx)?;
    let terms = range + 2;
    let c = c_star_from_l_star(&ls.coeffs, spec.q(), range, terms);
    let ceiling = rat_int(terms as i64) * spec.units_per_q(m_chi);
    newton_polygon(&points_of(&c_star_valuations(&c, &ceiling)))
}

pub fn compare_om2(a: &TowerSpec, b: &TowerSpec, m_chi: u32) -> Result<Om2Report> {
    if a.field() != b.field() && **a.field() != **b.field() {
        return Err(Error::Incomparable("towers are over different fields".into()));
    }
    let (ia, ib) = (a.invariants(), b.invariants());
    if ia.delta != ib.delta || ia.m != ib.m {
        return Err(Error::Incomparable("delta and m must agree".into()));
    }
    let relevant = relevant_union(a, b);
    let mismatched: Vec<(u32, u64)> = relevant
        .iter()
        .filter(|&&(i, j)| a.coeff(i, j) != b.coeff(i, j))
        .copied()
        .collect();
    if !mismatched.is_empty() {
        return Err(Error::RelevantSetMismatch(mismatched));
    }
    let range = a.degree_l(m_chi) as usize + 1;
    let pa = c_star_polygon(a, m_chi, range)?;
    let pb = c_star_polygon(b, m_chi, range)?;
    let identical = pa.vertices == pb.vertices && pa.slopes == pb.slopes;
    Ok(Om2Report {
        m_chi,
        range,
        relevant,
        polygon_a: pa,
        polygon_b: pb,
        identical,
    })
}

/// Everything checked on one exact `L(χ, s)`.
#[derive(Clone, Debug)]
pub struct LAnalysis {
    pub m_chi: u32,
    pub degree: usize,
    pub l: lfun::LPolynomial,
    pub l_star: lfun::LPolynomial,
    pub valuations: Vec<Valuation>,
    /// `q`-adic polygon of `L`
    pub polygon: NewtonPolygon,
    pub functional_eq: bool,
    pub integral: bool,
    pub leading_ok: bool,
    /// bounds on the `π_χ`-adic polygon of `L*`
    pub bounds: BoundReport,
    pub thm444: Option<Thm444Report>,
    pub uniformity: Option<BigRational>,
}

impl LAnalysis {
    pub fn pass(&self) -> bool {
        self.functional_eq
            && self.integral
            && self.leading_ok
            && self.bounds.pass
            && self.thm444.as_ref().is_none_or(|t| t.pass)
    }
}

pub fn analyze_l(spec: &TowerSpec, l: lfun::LPolynomial, l_star: lfun::LPolynomial) -> Result<LAnalysis> {
    let m_chi = l.cctx.m();
    let unit = spec.units_per_q(m_chi);
    let valuations = l.valuations();
    let pi_poly = newton_polygon(&points_of(&valuations))?;
    let polygon = pi_poly.rescale(&unit);
    let deg = l.degree();
    let functional_eq = check_functional_eq(&polygon, deg);
    let integral = valuations
        .iter()
        .all(|v| v.lower_bound().is_none_or(|b| !b.is_negative()));
    let leading_ok = valuations[deg]
        .finite()
        .is_some_and(|v| v / &unit == rat(deg as i64, 2));
    let star_np = newton_polygon(&points_of(&l_star.valuations()))?;
    let inv = spec.invariants();
    let with_upper = m_chi > inv.m;
    let bounds = check_bounds(spec, &star_np, deg as i64 + 1, with_upper);
    let thm444 = with_upper.then(|| check_thm444(spec, m_chi, &polygon));
    let uniformity = uniformity_stat(&polygon.slopes).ok();
    Ok(LAnalysis {
        m_chi,
        degree: deg,
        valuations,
        polygon,
        functional_eq,
        integral,
        leading_ok,
        bounds,
        thm444,
        uniformity,
        l,
        l_star,
    })
}

/// Checks that only need the `π_χ`-adic valuations of `L*`, as the Dwork
/// path provides them. The `L` polygon drops one unit-root slope.
#[derive(Clone, Debug)]
pub struct StarAnalysis {
    pub m_chi: u32,
    pub degree: usize,
    pub star_valuations: Vec<Valuation>,
    pub polygon: NewtonPolygon,
    pub functional_eq: bool,
    pub bounds: BoundReport,
    pub thm444: Option<Thm444Report>,
    pub uniformity: Option<BigRational>,
}

impl StarAnalysis {
    pub fn pass(&self) -> bool {
        self.functional_eq && self.bounds.pass && self.thm444.as_ref().is_none_or(|t| t.pass)
    }
}

pub fn analyze_l_star(spec: &TowerSpec, m_chi: u32, star_valuations: Vec<Valuation>) -> Result<StarAnalysis> {
    let unit = spec.units_per_q(m_chi);
    let star_np = newton_polygon(&points_of(&star_valuations))?;
    let mut slopes: Vec<BigRational> = star_np.slopes.iter().map(|s| s / &unit).collect();
    match slopes.iter().position(|s| s.is_zero()) {
        Some(pos) => {
            slopes.remove(pos);
        }
        None => return Err(Error::DegreeMismatch(slopes.len())),
    }
    let polygon = NewtonPolygon::from_slopes(&slopes);
    let degree = slopes.len();
    let with_upper = m_chi > spec.invariants().m;
    Ok(StarAnalysis {
        m_chi,
        degree,
        functional_eq: check_functional_eq(&polygon, degree),
        bounds: check_bounds(spec, &star_np, degree as i64 + 1, with_upper),
        thm444: with_upper.then(|| check_thm444(spec, m_chi, &polygon)),
        uniformity: uniformity_stat(&polygon.slopes).ok(),
        polygon,
        star_valuations,
    })
}

/// Exact `L` and `L*` at one conductor from a single census.
pub fn l_and_l_star(spec: &TowerSpec, m_chi: u32) -> Result<(lfun::LPolynomial, lfun::LPolynomial)> {
    let deg = spec.degree_l(m_chi).max(1) as usize;
    let census = lfun::census(spec, deg, m_chi)?;
    let cctx = make_cyclo(spec.p(), m_chi);
    let l = lfun::l_full_from_census(spec, &cctx, &census, 1, 0)?;
    let ls = lfun::l_star_from(&l, &census, 1);
    Ok((l, ls))
}

/// Exact `L` and `L*` for each conductor `1..=m_max` from one census.
pub fn l_functions_upto(spec: &TowerSpec, m_max: u32) -> Result<Vec<(lfun::LPolynomial, lfun::LPolynomial)>> {
    let dmax = (1..=m_max).map(|m| spec.degree_l(m)).max().unwrap_or(0).max(1) as usize;
    let census = lfun::census(spec, dmax, m_max)?;
    (1..=m_max)
        .map(|m| {
            let cctx: Arc<_> = make_cyclo(spec.p(), m);
            let l = lfun::l_full_from_census(spec, &cctx, &census, 1, 0)?;
            let ls = lfun::l_star_from(&l, &census, 1);
            Ok((l, ls))
        })
        .collect()
}
