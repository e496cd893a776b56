//! Power series truncated at a fixed order in the formal variable.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<R> {
    coeffs: Vec<R>,
}

impl<R: Scalar> TruncSeries<R> {
    /// `coeffs` must be nonempty; its length is the truncation order.
    pub fn new(coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        TruncSeries { coeffs }
    }

    pub fn zero(sample: &R, prec: usize) -> Self {
        Self::new(vec![sample.zero_like(); prec.max(1)])
    }

    pub fn one(sample: &R, prec: usize) -> Self {
        let mut s = Self::zero(sample, prec);
        s.coeffs[0] = sample.one_like();
        s
    }

    /// `X` (or zero when `prec == 1`).
    pub fn var(sample: &R, prec: usize) -> Self {
        let mut s = Self::zero(sample, prec);
        if prec > 1 {
            s.coeffs[1] = sample.one_like();
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &R {
        &self.coeffs[i]
    }

    pub fn set(&mut self, i: usize, v: R) {
        self.coeffs[i] = v;
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Lowest index with a nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn truncate(&self, prec: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(prec.max(1), self.coeffs[0].zero_like());
        Self::new(c)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Self::new(
            (0..n)
                .map(|i| self.coeffs[i].clone() + o.coeffs[i].clone())
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        Self::new(
            (0..n)
                .map(|i| self.coeffs[i].clone() - o.coeffs[i].clone())
                .collect(),
        )
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Product truncated to the smaller of the two orders.
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.prec().min(o.prec());
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().take(n - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    /// `f(X^k)` at the same truncation order.
    pub fn substitute_power(&self, k: usize) -> Self {
        assert!(k >= 1);
        let n = self.prec();
        let mut out = vec![self.coeffs[0].zero_like(); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * k >= n {
                break;
            }
            out[i * k] = c.clone();
        }
        Self::new(out)
    }

    /// `f(cX)`.
    pub fn rescale_var(&self, c: &R) -> Self {
        let mut pw = c.one_like();
        let mut out = Vec::with_capacity(self.prec());
        for a in &self.coeffs {
            out.push(a.clone() * pw.clone());
            pw = pw * c.clone();
        }
        Self::new(out)
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&R) -> S) -> TruncSeries<S> {
        TruncSeries::new(self.coeffs.iter().map(f).collect())
    }

    /// Inverse of a series with constant term 1, by the recurrence
    /// `u_n = -Σ_{k>=1} c_k u_{n-k}`.
    pub fn inverse_unit(&self) -> Self {
        assert!(self.coeffs[0].is_one(), "constant term must be 1");
        let n = self.prec();
        let mut u = vec![self.coeffs[0].zero_like(); n];
        u[0] = self.coeffs[0].one_like();
        for i in 1..n {
            let mut acc = self.coeffs[0].zero_like();
            for k in 1..=i {
                if self.coeffs[k].is_zero() {
                    continue;
                }
                acc = acc + self.coeffs[k].clone() * u[i - k].clone();
            }
            u[i] = -acc;
        }
        Self::new(u)
    }

    /// `Σ c_i x^i` for the truncated coefficients (Horner).
    pub fn eval<T: Scalar>(&self, x: &T, embed: impl Fn(&R) -> T) -> T {
        let mut acc = x.zero_like();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + embed(c);
        }
        acc
    }

    /// `self(h)` for `h` with zero constant term, by Horner.
    pub fn compose(&self, h: &Self) -> Self {
        assert!(h.coeffs[0].is_zero(), "inner series must have zero constant term");
        let n = self.prec().min(h.prec());
        let mut acc = Self::zero(&self.coeffs[0], n);
        for c in self.coeffs.iter().take(n).rev() {
            acc = acc.mul(&h.truncate(n));
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn s(v: &[i64]) -> TruncSeries<BigInt> {
        TruncSeries::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn product_and_inverse() {
        let a = s(&[1, 2, 3, 0]);
        let inv = a.inverse_unit();
        assert_eq!(a.mul(&inv), s(&[1, 0, 0, 0]));
        assert_eq!(s(&[1, 1, 0]).mul(&s(&[1, 1, 0])), s(&[1, 2, 1]));
    }

    #[test]
    fn substitution_and_composition() {
        assert_eq!(s(&[1, 2, 3, 4, 5]).substitute_power(2), s(&[1, 0, 2, 0, 3]));
        // (1 + X)^2 composed with X + X^2
        let f = s(&[1, 2, 1, 0]);
        let h = s(&[0, 1, 1, 0]);
        assert_eq!(f.compose(&h), s(&[1, 2, 3, 2]));
        assert_eq!(s(&[1, 1, 1]).rescale_var(&BigInt::from(2)), s(&[1, 2, 4]));
    }

    #[test]
    fn horner_eval() {
        let f = s(&[1, 2, 3]);
        assert_eq!(f.eval(&BigInt::from(2), |c| c.clone()), BigInt::from(17));
    }
}
