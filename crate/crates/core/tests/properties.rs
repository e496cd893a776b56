mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use aswl::analysis::{self, newton_polygon, predicted_slopes, NewtonPolygon};
use aswl::artinhasse::{ah_compose, ah_inverse};
use aswl::cli::spec::{parse_spec_str, serialize_spec};
use aswl::cyclo::{make_cyclo, CycloElem};
use aswl::field::{make_field, FieldCtx};
use aswl::lfun;
use aswl::scalar::{rat, rat_int};
use aswl::series::TruncSeries;
use aswl::tower::{validate, TowerSpec};
use aswl::{ExactCyclo, Valuation, Zpm};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn field(q: u64) -> FieldCtx {
    match q {
        2 => make_field(2, 1, &[1, 1]).unwrap(),
        3 => make_field(3, 1, &[1, 1]).unwrap(),
        4 => make_field(2, 2, &[1, 1, 1]).unwrap(),
        _ => unreachable!(),
    }
}

fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

#[test]
fn closed_point_counts_follow_mobius() {
    for q in [2u64, 3, 4] {
        let f = field(q);
        for d in 1..=12 {
            let mut n = 0u64;
            f.ext(d).for_each_closed_point(|_| n += 1);
            let expected: i64 = (1..=d as u64)
                .filter(|e| (d as u64).is_multiple_of(*e))
                .map(|e| mobius(d as u64 / e) * (q as i64).pow(e as u32))
                .sum::<i64>()
                / d as i64;
            assert_eq!(n as i64, expected, "q={q} d={d}");
        }
    }
}

/// Lower hull height at `x` by brute force over all pairs of points.
fn hull_oracle(pts: &[(i64, BigRational)], x: i64) -> Option<BigRational> {
    let mut best: Option<BigRational> = None;
    for (a, va) in pts {
        for (b, vb) in pts {
            if !(*a <= x && x <= *b) {
                continue;
            }
            let h = if a == b {
                va.clone()
            } else {
                va + (vb - va) * rat_int(x - a) / rat_int(b - a)
            };
            if best.as_ref().is_none_or(|c| h < *c) {
                best = Some(h);
            }
        }
    }
    best
}

fn random_tower() -> impl Strategy<Value = TowerSpec> {
    (
        prop::sample::select(vec![2u64, 3]),
        prop::sample::select(vec![1u64, 2, 4, 5]),
        prop::option::of(1u64..5),
        prop::option::of(1u64..12),
        0u64..3,
    )
        .prop_filter_map("invalid tower", |(p, d0, lower, lvl1, c)| {
            let f = Arc::new(make_field(p, 1, &[1, 1]).unwrap());
            let mut coeffs = BTreeMap::new();
            coeffs.insert((0, d0), vec![1 + c % (p - 1).max(1)]);
            if let Some(j) = lower {
                if j < d0 {
                    coeffs.insert((0, j), vec![1]);
                }
            }
            if let Some(j) = lvl1 {
                coeffs.insert((1, j), vec![1]);
            }
            validate(f, coeffs).ok()
        })
}

fn cheap(spec: &TowerSpec, m_chi: u32) -> bool {
    lfun::enumeration_cost(spec.q(), spec.degree_l(m_chi).max(1) as usize) <= 1 << 13
}

fn trunc_cases() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #[test]
    fn teichmuller_is_multiplicative(q in prop::sample::select(vec![2u64, 3, 4]), k in 1usize..=3, x in any::<u64>(), y in any::<u64>(), prec in 1u32..=5) {
        let f = field(q);
        let ext = f.ext(k);
        let order = ext.order().unwrap();
        let (x, y) = (ext.from_index(x % order), ext.from_index(y % order));
        let tx = f.teichmuller(&x, prec);
        let ty = f.teichmuller(&y, prec);
        let txy = f.teichmuller(&ext.mul(&x, &y), prec);
        let prod = tx.mul(&ty);
        prop_assert_eq!(prod.coords(), txy.coords());
        // fixed by the q^k-power map
        let fixed = tx.pow(order);
        prop_assert_eq!(fixed.coords(), tx.coords());
    }

    #[test]
    fn valuation_axioms(p in prop::sample::select(vec![2u64, 3]), m in 1u32..=2,
                        xs in prop::collection::vec(-40i64..40, 6), ys in prop::collection::vec(-40i64..40, 6)) {
        let c = make_cyclo(p, m);
        let mk = |v: &[i64]| -> ExactCyclo {
            CycloElem::from_coords(&c, v[..c.phi()].iter().map(|&x| BigInt::from(x)).collect())
        };
        let (x, y) = (mk(&xs), mk(&ys));
        let (vx, vy) = (x.vpi(), y.vpi());
        let vxy = (x.clone() * y.clone()).vpi();
        match (vx.finite(), vy.finite()) {
            (Some(a), Some(b)) => prop_assert_eq!(vxy, Valuation::Finite(a + b)),
            _ => prop_assert_eq!(vxy, Valuation::Infinite),
        }
        let vs = (x + y).vpi();
        if let (Some(a), Some(b)) = (vx.finite(), vy.finite()) {
            let lo = a.min(b).clone();
            prop_assert!(vs.finite().is_none_or(|s| *s >= lo));
        }
        prop_assert_eq!(c.from_int(p as i64).vpi(), Valuation::Finite(rat_int(c.phi() as i64)));
    }

    #[test]
    fn artin_hasse_round_trip(p in prop::sample::select(vec![2u64, 3, 5]), prec in 1u32..=6,
                              coeffs in prop::collection::vec(any::<u64>(), 2..20)) {
        let pm = p.pow(prec);
        let mut h: Vec<Zpm> = coeffs.iter().map(|&c| Zpm::new(c % pm, pm, prec)).collect();
        h[0] = Zpm::new(0, pm, prec);
        let h = TruncSeries::new(h);
        let e = ah_compose(&h, p).unwrap();
        prop_assert_eq!(ah_inverse(&e, p).unwrap(), h);
    }

    #[test]
    fn hull_matches_brute_force(vals in prop::collection::vec(prop::option::of(0i64..30), 1..12), scale in 1i64..5) {
        let mut pts: Vec<(i64, Valuation)> = vals.iter().enumerate().map(|(i, v)| {
            (i as i64, v.map(|v| Valuation::Finite(rat(v, 2))).unwrap_or(Valuation::Infinite))
        }).collect();
        pts[0].1 = Valuation::Finite(rat_int(0));
        let np = newton_polygon(&pts).unwrap();
        let finite: Vec<(i64, BigRational)> = pts.iter().filter_map(|(i, v)| v.finite().map(|v| (*i, v.clone()))).collect();
        let last = finite.last().unwrap().0;
        prop_assert_eq!(np.slopes.len() as i64, last);
        prop_assert!(np.slopes.windows(2).all(|w| w[0] <= w[1]));
        for w in np.vertices.windows(3) {
            let s1 = (&w[1].1 - &w[0].1) / rat_int(w[1].0 - w[0].0);
            let s2 = (&w[2].1 - &w[1].1) / rat_int(w[2].0 - w[1].0);
            prop_assert!(s1 < s2, "vertices not strictly convex");
        }
        for x in 0..=last {
            prop_assert_eq!(np.value_at(x), hull_oracle(&finite, x));
        }
        // scaling every valuation scales the slopes
        let c = rat_int(scale);
        let scaled: Vec<_> = pts.iter().map(|(i, v)| (*i, v.scale(&c))).collect();
        let ns = newton_polygon(&scaled).unwrap();
        prop_assert_eq!(ns.slopes, np.slopes.iter().map(|s| s * &c).collect::<Vec<_>>());
        prop_assert_eq!(NewtonPolygon::from_slopes(&np.slopes).vertices, np.vertices);
    }

    #[test]
    fn predicted_multiset_size(base in prop::collection::vec(0i64..8, 0..6), p in prop::sample::select(vec![2u64, 3]), e in 0u32..3) {
        let base: Vec<BigRational> = base.iter().map(|&b| rat(b, 8)).collect();
        let pred = predicted_slopes(&base, p, e);
        prop_assert_eq!(pred.len() as u64, (base.len() as u64 + 1) * p.pow(e) - 1);
    }
}

proptest! {
    #![proptest_config(trunc_cases())]

    #[test]
    fn spec_round_trip(spec in random_tower()) {
        let text = serialize_spec(&spec);
        prop_assert_eq!(parse_spec_str(&text).unwrap(), spec);
    }

    #[test]
    fn polygon_checks_hold(spec in random_tower(), m_chi in 1u32..=2) {
        prop_assume!(spec.invariants().genus_stable && cheap(&spec, m_chi));
        let (l, ls) = analysis::l_and_l_star(&spec, m_chi).unwrap();
        let an = analysis::analyze_l(&spec, l, ls).unwrap();
        prop_assert!(an.functional_eq, "functional equation");
        prop_assert!(an.integral && an.leading_ok);
        prop_assert!(an.bounds.entries.iter().all(|e| e.lower_ok), "Hodge bound");
        prop_assert!(an.bounds.pass, "bounds {:?}", an.bounds);
        if let Some(t) = &an.thm444 {
            prop_assert!(t.pass, "vertex structure {:?}", t);
        }
        for u in &an.bounds.forced {
            let d = spec.invariants().d_m as i64;
            prop_assert!(u % d == 0 || u % d == 1 % d);
        }
    }

    #[test]
    fn valuations_do_not_depend_on_the_character(spec in random_tower(), u in 1u64..9) {
        let m_chi = 2;
        prop_assume!(spec.invariants().genus_stable && cheap(&spec, m_chi));
        let p = spec.p();
        prop_assume!(u % p != 0 && u < p * p);
        let cctx = make_cyclo(p, m_chi);
        let deg = spec.degree_l(m_chi).max(1) as usize;
        let census = lfun::census(&spec, deg, m_chi).unwrap();
        let l1 = lfun::l_full_from_census(&spec, &cctx, &census, 1, 0).unwrap();
        let lu = lfun::l_full_from_census(&spec, &cctx, &census, u, 0).unwrap();
        prop_assert_eq!(l1.valuations(), lu.valuations());
    }
}
