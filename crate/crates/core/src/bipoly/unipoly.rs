use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

/// Dense univariate polynomial over the rationals, lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        UniPoly { coeffs: v }
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn lc(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        UniPoly { coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(BigInt::from(k)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    /// Quotient and remainder. Panics when `d` is zero.
    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let Some(dn) = self.degree() else {
            return (Self::zero(), Self::zero());
        };
        if dn < dd {
            return (Self::zero(), self.clone());
        }
        if let Some(qr) = self.divrem_integral(d, dn, dd) {
            return qr;
        }
        let lc_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        let mut q = vec![Rational::zero(); dn - dd + 1];
        for i in (dd..=dn).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = &r[i] * &lc_inv;
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i - dd + j] -= &f * dc;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Long division over the integers after clearing denominators, when every
    /// step divides exactly.
    fn divrem_integral(&self, d: &UniPoly, dn: usize, dd: usize) -> Option<(UniPoly, UniPoly)> {
        let (mut r, la) = self.scaled_integers();
        let (dc, ld) = d.scaled_integers();
        let lc = &dc[dd];
        let mut q = vec![BigInt::zero(); dn - dd + 1];
        for i in (dd..=dn).rev() {
            if r[i].is_zero() {
                continue;
            }
            let (f, rest) = r[i].div_rem(lc);
            if !rest.is_zero() {
                return None;
            }
            for (j, c) in dc.iter().enumerate() {
                r[i - dd + j] -= &f * c;
            }
            q[i - dd] = f;
        }
        r.truncate(dd);
        let qs = Rational::new(ld, la.clone());
        let q = Self::new(q.into_iter().map(|c| Rational::from_integer(c) * &qs).collect());
        let r = Self::new(r.into_iter().map(|c| Rational::new(c, la.clone())).collect());
        Some((q, r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &UniPoly) -> Option<UniPoly> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.divrem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> UniPoly {
        match self.lc() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (a.primitive(), b.primitive());
        while !b.is_zero() {
            let r = a.rem(&b).primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Integer-coefficient primitive representative with positive leading coefficient.
    pub fn primitive(&self) -> UniPoly {
        if self.is_zero() {
            return Self::zero();
        }
        let ints = self.integer_coeffs();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        let g = g * sign;
        Self::new(ints.into_iter().map(|c| Rational::from_integer(c / &g)).collect())
    }

    /// Coefficients times the lcm of their denominators, and that lcm.
    fn scaled_integers(&self) -> (Vec<BigInt>, BigInt) {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            if !c.denom().is_one() {
                l = l.lcm(c.denom());
            }
        }
        let v = if l.is_one() {
            self.coeffs.iter().map(|c| c.numer().clone()).collect()
        } else {
            self.coeffs.iter().map(|c| c.numer() * (&l / c.denom())).collect()
        };
        (v, l)
    }

    /// Coefficients scaled by the lcm of denominators.
    pub fn integer_coeffs(&self) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for c in &self.coeffs {
            l = l.lcm(c.denom());
        }
        self.coeffs.iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect()
    }

    pub fn squarefree_part(&self) -> UniPoly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = Self::gcd(self, &self.derivative());
        self.div_exact(&g).expect("gcd divides")
    }

    /// `p(x + a)`
    pub fn shift(&self, a: &Rational) -> UniPoly {
        let lin = UniPoly::new(vec![a.clone(), Rational::one()]);
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &lin) + &UniPoly::constant(c.clone());
        }
        acc
    }

    pub fn fmt_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { "-" } else { "+" });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

pub fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_var("x"))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, o: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(match (self.coeffs.get(k), o.coeffs.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        UniPoly::new(v)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, o: &UniPoly) -> UniPoly {
        self + &(-o)
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, o: &UniPoly) -> UniPoly {
        if self.is_zero() || o.is_zero() {
            return UniPoly::zero();
        }
        let (a, la) = self.scaled_integers();
        let (b, lb) = o.scaled_integers();
        let mut v = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                v[i + j] += x * y;
            }
        }
        let l = la * lb;
        if l.is_one() {
            return UniPoly::new(v.into_iter().map(Rational::from_integer).collect());
        }
        UniPoly::new(v.into_iter().map(|c| Rational::new(c, l.clone())).collect())
    }
}

macro_rules! forward_owned {
    ($t:ty, $tr:ident, $m:ident) => {
        impl $tr for $t {
            type Output = $t;
            fn $m(self, o: $t) -> $t {
                <&$t as $tr<&$t>>::$m(&self, &o)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, o: &$t) -> $t {
                <&$t as $tr<&$t>>::$m(&self, o)
            }
        }
    };
}
pub(crate) use forward_owned;

forward_owned!(UniPoly, Add, add);
forward_owned!(UniPoly, Sub, sub);
forward_owned!(UniPoly, Mul, mul);

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::rat;

    #[test]
    fn divrem_roundtrip() {
        let a = UniPoly::from_ints(&[1, 0, -3, 2, 5]);
        let b = UniPoly::from_ints(&[-1, 2, 3]);
        let (q, r) = a.divrem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap() < 2);
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let f = UniPoly::from_ints(&[-1, 1]);
        let a = &f * &UniPoly::from_ints(&[2, 0, 1]);
        let b = &f * &UniPoly::from_ints(&[3, 1]);
        assert_eq!(UniPoly::gcd(&a, &b), f);
    }

    #[test]
    fn squarefree_and_shift() {
        let f = UniPoly::from_ints(&[-1, 1]).pow(3);
        assert_eq!(f.squarefree_part().monic(), UniPoly::from_ints(&[-1, 1]));
        let g = UniPoly::from_ints(&[0, 0, 1]).shift(&rat(1, 1));
        assert_eq!(g, UniPoly::from_ints(&[1, 2, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(UniPoly::from_ints(&[1, -6, 1]).fmt_var("z"), "z^2-6*z+1");
    }
}
