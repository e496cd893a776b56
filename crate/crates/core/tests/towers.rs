mod common;

use aswl::scalar::rat;
use aswl::Error;
use common::tower;

#[test]
fn level_one_term_of_degree_seven_is_valid() {
    // d_1 / 2 = 7/2 > 3, so level 1 sets δ and (1, 7) sits on the boundary
    let s = tower(2, 1, &[1, 1], &[(0, 3, &[1]), (1, 7, &[1])]);
    let inv = s.invariants();
    assert_eq!(inv.delta, rat(7, 2));
    assert_eq!(inv.m, 1);
    assert_eq!(inv.d_m, 7);
    assert_eq!(s.delta_x(1, 7), rat(0, 1));
}

#[test]
fn truncated_example_tower() {
    // [X]^3 + 2[X]^5 + 4[X]^11
    let s = tower(2, 1, &[1, 1], &[(0, 3, &[1]), (1, 5, &[1]), (2, 11, &[1])]);
    let inv = s.invariants();
    assert_eq!((inv.delta.clone(), inv.m, inv.d_m), (rat(3, 1), 0, 3));
    let st = s.stability_constants();
    assert_eq!(st.delta_x[&(1, 5)], rat(1, 3));
    assert_eq!(st.delta_x[&(2, 11)], rat(1, 3));
    assert_eq!(st.relevant.len(), 1);
}

#[test]
fn excess_is_zero_only_at_the_leading_term() {
    for s in common::bounds_suite().into_iter().map(|t| t.1).chain([
        tower(2, 1, &[1, 1], &[(0, 3, &[1]), (1, 5, &[1]), (2, 11, &[1])]),
        tower(3, 1, &[1, 1], &[(0, 2, &[1]), (0, 1, &[2]), (1, 5, &[1])]),
    ]) {
        let inv = s.invariants();
        for (&(i, j), d) in &s.stability_constants().delta_x {
            assert!(*d >= rat(0, 1));
            assert_eq!(d == &rat(0, 1), (i, j) == (inv.m, inv.d_m), "({i},{j})");
        }
    }
}

#[test]
fn degree_and_conductor_agree() {
    for (name, s) in common::bounds_suite() {
        let m = s.invariants().m;
        for m_chi in m + 1..=m + 4 {
            assert_eq!(s.degree_l(m_chi), s.degree_l_general(m_chi), "{name} m_chi={m_chi}");
            assert_eq!(s.degree_l(m_chi) + 2, s.conductor(m_chi), "{name} m_chi={m_chi}");
        }
    }
}

#[test]
fn conductor_at_first_level_above_m() {
    for (_, s) in common::bounds_suite() {
        let inv = s.invariants();
        assert_eq!(s.conductor(inv.m + 1), 1 + inv.d_m);
    }
}

#[test]
fn level_bound_is_reported_per_level() {
    let s = tower(2, 1, &[1, 1], &[(0, 3, &[1]), (1, 5, &[1])]);
    let lb = s.level_bounds();
    assert_eq!(lb.len(), 1);
    // 5 <= (2 - 1/6) * 3
    assert_eq!((lb[0].level, lb[0].degree, lb[0].holds), (1, 5, true));
    assert_eq!(lb[0].bound, rat(11, 2));
}

#[test]
fn validation_reports_locations() {
    use aswl::cli::spec::parse_spec_str;
    let e = parse_spec_str(r#"{"p":3,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":2,"a_ij":[1]},{"i":1,"j":6,"a_ij":[1]}]}"#)
        .unwrap_err();
    assert_eq!(e, Error::ForbiddenExponent { i: 1, j: 6 });
    let e = parse_spec_str(r#"{"p":3,"a":1,"field_modulus":[1,1],"coeffs":[{"i":0,"j":2,"a_ij":[1]},{"i":1,"j":3,"a_ij":[0]}]}"#)
        .unwrap_err();
    assert_eq!(e, Error::ZeroCoefficient { i: 1, j: 3 });
    let e = parse_spec_str(r#"{"p":2,"a":2,"field_modulus":[1,0,1],"coeffs":[{"i":0,"j":3,"a_ij":[1,0]}]}"#)
        .unwrap_err();
    assert_eq!(e, Error::ReducibleModulus);
    let e = parse_spec_str(r#"{"p":4,"a":1,"field_modulus":[1,1],"coeffs":[]}"#).unwrap_err();
    assert_eq!(e, Error::NotPrime(4));
}
