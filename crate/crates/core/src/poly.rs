//! Dense truncated polynomials over an exact or floating scalar.
//!
//! Bivariate polynomials are stored by total degree (triangular layout), which
//! matches how jet data is indexed everywhere else in the crate. All products
//! truncate explicitly; nothing here grows degree silently.

use num_traits::{FromPrimitive, One, Zero};
use std::ops::{Div, Neg, Sub};

/// Exact rational scalar used for jet arithmetic.
pub type Rat = num_rational::BigRational;

/// Scalar ring with integer embedding and division (field, in practice:
/// `f64` or [`Rat`]).
pub trait Scalar:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + FromPrimitive
{
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer embeds in scalar")
    }
    fn div_int(self, n: i64) -> Self {
        self / Self::from_int(n)
    }
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + std::fmt::Debug
        + Zero
        + One
        + Neg<Output = Self>
        + Sub<Output = Self>
        + Div<Output = Self>
        + FromPrimitive
{
}

fn tri(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Univariate polynomial, coefficient of `t^k` at index `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1<T: Scalar> {
    pub c: Vec<T>,
}

impl<T: Scalar> Poly1<T> {
    pub fn new(c: Vec<T>) -> Self {
        assert!(!c.is_empty());
        Poly1 { c }
    }

    pub fn zero() -> Self {
        Poly1 { c: vec![T::zero()] }
    }

    pub fn deg(&self) -> usize {
        self.c.len() - 1
    }

    pub fn eval(&self, t: &T) -> T {
        let mut acc = T::zero();
        for k in (0..self.c.len()).rev() {
            acc = acc * t.clone() + self.c[k].clone();
        }
        acc
    }

    pub fn derivative(&self) -> Poly1<T> {
        if self.c.len() == 1 {
            return Poly1::zero();
        }
        let c = (1..self.c.len())
            .map(|k| self.c[k].clone() * T::from_int(k as i64))
            .collect();
        Poly1 { c }
    }

    /// `k`-th derivative evaluated at `t`.
    pub fn derivative_at(&self, k: usize, t: &T) -> T {
        let mut p = self.clone();
        for _ in 0..k {
            p = p.derivative();
        }
        p.eval(t)
    }
}

/// Bivariate polynomial truncated at total degree `deg`.
///
/// Coefficient of `x^i y^j` lives at `tri(i + j) + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2<T: Scalar> {
    deg: usize,
    c: Vec<T>,
}

impl<T: Scalar> Poly2<T> {
    pub fn zero(deg: usize) -> Self {
        Poly2 {
            deg,
            c: vec![T::zero(); tri(deg + 1)],
        }
    }

    pub fn constant(deg: usize, v: T) -> Self {
        let mut p = Poly2::zero(deg);
        p.set(0, 0, v);
        p
    }

    pub fn monomial(deg: usize, i: usize, j: usize, v: T) -> Self {
        let mut p = Poly2::zero(deg);
        p.set(i, j, v);
        p
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        if i + j > self.deg {
            return T::zero();
        }
        self.c[tri(i + j) + i].clone()
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(i + j <= self.deg, "({i},{j}) exceeds degree {}", self.deg);
        self.c[tri(i + j) + i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.is_zero())
    }

    /// Iterate `(i, j, coeff)` over stored terms.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let deg = self.deg;
        (0..=deg).flat_map(move |d| (0..=d).map(move |i| (i, d - i, &self.c[tri(d) + i])))
    }

    pub fn truncate(&self, deg: usize) -> Poly2<T> {
        let mut out = Poly2::zero(deg);
        for (i, j, v) in self.terms() {
            if i + j <= deg {
                out.set(i, j, v.clone());
            }
        }
        out
    }

    pub fn add(&self, o: &Poly2<T>) -> Poly2<T> {
        let deg = self.deg.max(o.deg);
        let mut out = Poly2::zero(deg);
        for (i, j, v) in self.terms() {
            out.set(i, j, v.clone());
        }
        for (i, j, v) in o.terms() {
            let cur = out.get(i, j);
            out.set(i, j, cur + v.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly2<T>) -> Poly2<T> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly2<T> {
        let mut out = self.clone();
        for v in &mut out.c {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, s: &T) -> Poly2<T> {
        let mut out = self.clone();
        for v in &mut out.c {
            *v = v.clone() * s.clone();
        }
        out
    }

    /// Product truncated at total degree `deg`.
    pub fn mul_trunc(&self, o: &Poly2<T>, deg: usize) -> Poly2<T> {
        let mut out = Poly2::zero(deg);
        for (i1, j1, v1) in self.terms() {
            if v1.is_zero() || i1 + j1 > deg {
                continue;
            }
            for (i2, j2, v2) in o.terms() {
                if i1 + j1 + i2 + j2 > deg || v2.is_zero() {
                    continue;
                }
                let cur = out.get(i1 + i2, j1 + j2);
                out.set(i1 + i2, j1 + j2, cur + v1.clone() * v2.clone());
            }
        }
        out
    }

    pub fn diff_x(&self) -> Poly2<T> {
        let deg = self.deg.saturating_sub(1);
        let mut out = Poly2::zero(deg);
        for (i, j, v) in self.terms() {
            if i >= 1 {
                out.set(i - 1, j, v.clone() * T::from_int(i as i64));
            }
        }
        out
    }

    pub fn diff_y(&self) -> Poly2<T> {
        let deg = self.deg.saturating_sub(1);
        let mut out = Poly2::zero(deg);
        for (i, j, v) in self.terms() {
            if j >= 1 {
                out.set(i, j - 1, v.clone() * T::from_int(j as i64));
            }
        }
        out
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        let mut xp = vec![T::one(); self.deg + 1];
        let mut yp = vec![T::one(); self.deg + 1];
        for k in 1..=self.deg {
            xp[k] = xp[k - 1].clone() * x.clone();
            yp[k] = yp[k - 1].clone() * y.clone();
        }
        let mut acc = T::zero();
        for (i, j, v) in self.terms() {
            if !v.is_zero() {
                acc = acc + v.clone() * xp[i].clone() * yp[j].clone();
            }
        }
        acc
    }

    /// Coefficient-wise scalar conversion.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly2<U> {
        Poly2 {
            deg: self.deg,
            c: self.c.iter().map(f).collect(),
        }
    }

    /// Taylor shift: returns `q` with `q(x, y) = p(x + a, y + b)`.
    pub fn shift(&self, a: &T, b: &T) -> Poly2<T> {
        let n = self.deg;
        let mut binom = vec![vec![T::zero(); n + 1]; n + 1];
        for p in 0..=n {
            binom[p][0] = T::one();
            for q in 1..=p {
                binom[p][q] = binom[p - 1][q - 1].clone()
                    + if q <= p - 1 {
                        binom[p - 1][q].clone()
                    } else {
                        T::zero()
                    };
            }
        }
        let mut ap = vec![T::one(); n + 1];
        let mut bp = vec![T::one(); n + 1];
        for k in 1..=n {
            ap[k] = ap[k - 1].clone() * a.clone();
            bp[k] = bp[k - 1].clone() * b.clone();
        }
        let mut out = Poly2::zero(n);
        for (p, q, v) in self.terms() {
            if v.is_zero() {
                continue;
            }
            for i in 0..=p {
                for j in 0..=q {
                    let cur = out.get(i, j);
                    let term = v.clone()
                        * binom[p][i].clone()
                        * binom[q][j].clone()
                        * ap[p - i].clone()
                        * bp[q - j].clone();
                    out.set(i, j, cur + term);
                }
            }
        }
        out
    }
}

/// Convenience constructor for rational scalars.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p_from(deg: usize, entries: &[(usize, usize, i64)]) -> Poly2<Rat> {
        let mut p = Poly2::zero(deg);
        for &(i, j, v) in entries {
            p.set(i, j, rat(v, 1));
        }
        p
    }

    #[test]
    fn square_of_linear() {
        let p = p_from(1, &[(0, 0, 1), (1, 0, 1), (0, 1, 1)]);
        let sq = p.mul_trunc(&p, 2);
        let expect = p_from(
            2,
            &[(0, 0, 1), (1, 0, 2), (0, 1, 2), (2, 0, 1), (1, 1, 2), (0, 2, 1)],
        );
        assert_eq!(sq, expect);
    }

    #[test]
    fn truncation_drops_high_terms() {
        let p = p_from(2, &[(2, 0, 1), (0, 1, 1)]);
        let q = p.mul_trunc(&p, 2);
        assert_eq!(q, p_from(2, &[(0, 2, 1)]));
    }

    #[test]
    fn derivative_of_product_obeys_leibniz() {
        let p = p_from(2, &[(1, 0, 2), (0, 2, 1)]);
        let q = p_from(2, &[(0, 1, 3), (1, 1, 1)]);
        let lhs = p.mul_trunc(&q, 3).diff_x();
        let rhs = p.diff_x().mul_trunc(&q, 3).add(&p.mul_trunc(&q.diff_x(), 3));
        assert_eq!(lhs.truncate(2), rhs.truncate(2));
    }

    #[test]
    fn shift_matches_expansion() {
        // (x + 1)^2 = x^2 + 2x + 1
        let p = p_from(2, &[(2, 0, 1)]);
        let s = p.shift(&rat(1, 1), &rat(0, 1));
        assert_eq!(s, p_from(2, &[(0, 0, 1), (1, 0, 2), (2, 0, 1)]));
    }

    #[test]
    fn shift_then_eval_agrees_with_eval_at_offset() {
        let p = p_from(3, &[(1, 2, 5), (3, 0, -2), (0, 1, 7)]);
        let (a, b) = (rat(1, 2), rat(-1, 3));
        let s = p.shift(&a, &b);
        let (x, y) = (rat(2, 7), rat(3, 5));
        assert_eq!(
            s.eval(&x, &y),
            p.eval(&(x.clone() + a), &(y.clone() + b))
        );
    }

    #[test]
    fn univariate_derivative_at() {
        // t^3 - 2t: second derivative at t = 1/2 is 3.
        let p = Poly1::new(vec![rat(0, 1), rat(-2, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(p.derivative_at(2, &rat(1, 2)), rat(3, 1));
        assert_eq!(p.eval(&rat(1, 2)), rat(-7, 8));
    }
}
