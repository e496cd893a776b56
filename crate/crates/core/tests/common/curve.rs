//! Brute-force point counts on y^2 + y = x^3, independent of the library's
//! field and ring code.

/// Carry-less product in F_2[x] / (modulus), elements as bit masks.
pub fn gf2_mul(mut a: u32, mut b: u32, modulus: u32, n: u32) -> u32 {
    let mut r = 0;
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> n & 1 == 1 {
            a ^= modulus;
        }
    }
    r
}

/// Projective points of y^2 + y = x^3 over F_{2^n}.
pub fn count_points(n: u32, modulus: u32) -> i64 {
    let size = 1u32 << n;
    let mut count = 1; // the point at infinity
    for x in 0..size {
        let x3 = gf2_mul(gf2_mul(x, x, modulus, n), x, modulus, n);
        for y in 0..size {
            if gf2_mul(y, y, modulus, n) ^ y == x3 {
                count += 1;
            }
        }
    }
    count
}

/// `1 + c_1 s + q s^2` from `N_1`, checked against `N_2`.
pub fn zeta_numerator(q: i64, n1: i64, n2: i64) -> [i64; 3] {
    let trace = q + 1 - n1;
    let power2 = trace * trace - 2 * q;
    assert_eq!(n2, q * q + 1 - power2, "counts are not consistent with genus 1");
    [1, -trace, q]
}
