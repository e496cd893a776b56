//! Dense matrices over a commutative ring and the division-free
//! characteristic polynomial.

use crate::scalar::Scalar;

pub type Matrix<R> = Vec<Vec<R>>;

pub fn mat_mul<R: Scalar>(a: &Matrix<R>, b: &Matrix<R>) -> Matrix<R> {
    let n = a.len();
    let m = b[0].len();
    let zero = a[0][0].zero_like();
    let mut out = vec![vec![zero; m]; n];
    for (i, row) in a.iter().enumerate() {
        for (k, aik) in row.iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for (j, bkj) in b[k].iter().enumerate() {
                if bkj.is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].clone() + aik.clone() * bkj.clone();
            }
        }
    }
    out
}

pub fn trace<R: Scalar>(a: &Matrix<R>) -> R {
    a.iter()
        .enumerate()
        .fold(a[0][0].zero_like(), |acc, (i, row)| acc + row[i].clone())
}

/// `Tr(A^k)` for `k = 1..=kmax`.
pub fn power_traces<R: Scalar>(a: &Matrix<R>, kmax: usize) -> Vec<R> {
    let mut out = Vec::with_capacity(kmax);
    let mut pw = a.clone();
    for k in 1..=kmax {
        out.push(trace(&pw));
        if k < kmax {
            pw = mat_mul(&pw, a);
        }
    }
    out
}

/// Coefficients `c_0..c_K` of `det(I - sA) = Σ c_k s^k`, by Berkowitz's
/// recursion over leading principal submatrices. Only the first `K+1`
/// coefficients are carried, so no Toeplitz column beyond `K` is formed.
pub fn det_one_minus_sa<R: Scalar>(a: &Matrix<R>, kmax: usize) -> Vec<R> {
    let n = a.len();
    let zero = a[0][0].zero_like();
    let one = zero.one_like();
    let len = kmax + 1;
    // coefficients of det(xI - A_r), highest power first, truncated
    let mut poly = vec![zero.clone(); len];
    poly[0] = one.clone();
    for r in 0..n {
        // column of the Toeplitz factor: 1, -a_rr, -R S, -R A S, ...
        let mut col = vec![zero.clone(); len];
        col[0] = one.clone();
        if len > 1 {
            col[1] = -a[r][r].clone();
        }
        let mut v: Vec<R> = (0..r).map(|i| a[i][r].clone()).collect();
        for c in col.iter_mut().skip(2) {
            if r == 0 {
                break;
            }
            let rs = (0..r).fold(zero.clone(), |acc, j| {
                if v[j].is_zero() || a[r][j].is_zero() {
                    acc
                } else {
                    acc + a[r][j].clone() * v[j].clone()
                }
            });
            *c = -rs;
            let mut next = vec![zero.clone(); r];
            for (i, nx) in next.iter_mut().enumerate() {
                let mut acc = zero.clone();
                for (j, vj) in v.iter().enumerate() {
                    if vj.is_zero() || a[i][j].is_zero() {
                        continue;
                    }
                    acc = acc + a[i][j].clone() * vj.clone();
                }
                *nx = acc;
            }
            v = next;
        }
        let mut out = vec![zero.clone(); len];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = zero.clone();
            for j in 0..=i.min(r) {
                if poly[j].is_zero() || col[i - j].is_zero() {
                    continue;
                }
                acc = acc + col[i - j].clone() * poly[j].clone();
            }
            *o = acc;
        }
        poly = out;
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: &[&[i64]]) -> Matrix<BigInt> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_closed_forms() {
        assert_eq!(det_one_minus_sa(&m(&[&[0]]), 1), v(&[1, 0]));
        assert_eq!(det_one_minus_sa(&m(&[&[5]]), 1), v(&[1, -5]));
        // 1 - (a+d)s + (ad-bc)s^2
        assert_eq!(
            det_one_minus_sa(&m(&[&[2, 3], &[5, 7]]), 2),
            v(&[1, -9, -1])
        );
    }

    #[test]
    fn truncation_keeps_leading_coefficients() {
        let a = m(&[&[1, 2, 0, 4], &[3, -1, 2, 0], &[0, 5, 2, 1], &[1, 1, 1, 1]]);
        let full = det_one_minus_sa(&a, 4);
        assert_eq!(det_one_minus_sa(&a, 2), full[..3].to_vec());
        assert_eq!(power_traces(&a, 1)[0], BigInt::from(3));
    }
}
