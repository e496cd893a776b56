//! The Euler-product L-function against brute-force point counts.

mod common;

use aswl::cyclo::make_cyclo;
use common::curve::{count_points, zeta_numerator};
use aswl::lfun;
use num_bigint::BigInt;

fn l_as_ints(spec: &aswl::tower::TowerSpec) -> Vec<BigInt> {
    let cctx = make_cyclo(2, 1);
    let l = lfun::l_full(spec, &cctx).unwrap();
    l.coeffs
        .iter()
        .map(|c| {
            assert_eq!(c.coords().len(), 1);
            c.coords()[0].clone()
        })
        .collect()
}

#[test]
fn oracle_counts() {
    // F_2, F_4 = F_2[x]/(x^2+x+1), F_16 = F_2[x]/(x^4+x+1)
    assert_eq!(count_points(1, 0b11), 3);
    assert_eq!(count_points(2, 0b111), 9);
    assert_eq!(count_points(4, 0b10011), 9);
}

#[test]
fn l_over_f2_matches_point_counts() {
    let p = zeta_numerator(2, count_points(1, 0b11), count_points(2, 0b111));
    assert_eq!(p, [1, 0, 2]);
    let l = l_as_ints(&common::x_cubed());
    assert_eq!(l, p.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
}

#[test]
fn l_over_f4_matches_point_counts() {
    let p = zeta_numerator(4, count_points(2, 0b111), count_points(4, 0b10011));
    let l = l_as_ints(&common::x_cubed_f4());
    assert_eq!(l, p.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
}
