#![allow(dead_code)]

pub mod curve;

use std::collections::BTreeMap;
use std::sync::Arc;

use aswl::field::make_field;
use aswl::tower::{validate, TowerSpec};

pub fn tower(p: u64, a: usize, modulus: &[u64], coeffs: &[(u32, u64, &[u64])]) -> TowerSpec {
    let f = Arc::new(make_field(p, a, modulus).unwrap());
    let c: BTreeMap<(u32, u64), Vec<u64>> = coeffs.iter().map(|&(i, j, v)| ((i, j), v.to_vec())).collect();
    validate(f, c).unwrap()
}

/// `f = [X]^3` over `F_2`.
pub fn x_cubed() -> TowerSpec {
    tower(2, 1, &[1, 1], &[(0, 3, &[1])])
}

/// `f = [X]^3` over `F_4`.
pub fn x_cubed_f4() -> TowerSpec {
    tower(2, 2, &[1, 1, 1], &[(0, 3, &[1, 0])])
}

/// The five towers of the bounds suite: (name, spec).
pub fn bounds_suite() -> Vec<(&'static str, TowerSpec)> {
    vec![
        ("x3/F2", x_cubed()),
        ("x5+x3/F2", tower(2, 1, &[1, 1], &[(0, 5, &[1]), (0, 3, &[1])])),
        ("x+w[x]^3 lvl1/F4", tower(2, 2, &[1, 1, 1], &[(0, 1, &[1, 0]), (1, 3, &[0, 1])])),
        ("x+[x]^4 lvl1/F3", tower(3, 1, &[1, 1], &[(0, 1, &[1]), (1, 4, &[1])])),
        ("x+w[x]^2 lvl1/F9", tower(3, 2, &[2, 2, 1], &[(0, 1, &[1, 0]), (1, 2, &[0, 1])])),
    ]
}
