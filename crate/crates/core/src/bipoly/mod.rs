//! Exact bivariate polynomials over the rationals.
//!
//! A [`BiPoly`] is stored as its coefficient rows `l_j(v)`, so that
//! `L(u, v) = sum_j l_j(v) u^j`.

mod canon;
pub mod factor;
mod json;
mod parse;
mod unipoly;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

pub use canon::{bigcd, MAX_DEGREE};
pub use json::PolyJson;
pub use unipoly::{rat_to_f64, UniPoly};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiPoly {
    u: Arc<str>,
    v: Arc<str>,
    rows: Vec<UniPoly>,
}

/// A slice `L(u, z0)` with complex coefficients, lowest degree first.
#[derive(Clone, Debug)]
pub struct Slice {
    pub coeffs: Vec<Complex64>,
    /// The nominal leading coefficient `l_Du(z0)` vanished.
    pub degree_dropped: bool,
}

impl BiPoly {
    pub fn new(u: &str, v: &str, rows: Vec<UniPoly>) -> Self {
        Self::with_labels(Arc::from(u), Arc::from(v), rows)
    }

    fn with_labels(u: Arc<str>, v: Arc<str>, mut rows: Vec<UniPoly>) -> Self {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        BiPoly { u, v, rows }
    }

    /// Build from the coefficient matrix, `coeffs[j][k]` multiplying `u^j v^k`.
    pub fn from_matrix(u: &str, v: &str, coeffs: Vec<Vec<Rational>>) -> Self {
        Self::new(u, v, coeffs.into_iter().map(UniPoly::new).collect())
    }

    /// Parse a polynomial written in the two given variables, e.g. `"m^2+z*m+1"`.
    pub fn parse(text: &str, u: &str, v: &str) -> Result<Self> {
        parse::parse_bipoly(text, u, v)
    }

    pub fn zero_like(&self) -> Self {
        Self::with_labels(self.u.clone(), self.v.clone(), Vec::new())
    }

    pub fn constant_like(&self, c: Rational) -> Self {
        self.from_rows(vec![UniPoly::constant(c)])
    }

    /// Same labels as `self`, new rows.
    pub fn from_rows(&self, rows: Vec<UniPoly>) -> Self {
        Self::with_labels(self.u.clone(), self.v.clone(), rows)
    }

    /// `p(v)` viewed as a polynomial of degree 0 in `u`.
    pub fn from_v_poly(&self, p: UniPoly) -> Self {
        self.from_rows(vec![p])
    }

    /// The polynomial `u`.
    pub fn u_var(&self) -> Self {
        self.from_rows(vec![UniPoly::zero(), UniPoly::one()])
    }

    /// The polynomial `v`.
    pub fn v_var(&self) -> Self {
        self.from_rows(vec![UniPoly::x()])
    }

    pub fn u_label(&self) -> &str {
        &self.u
    }

    pub fn v_label(&self) -> &str {
        &self.v
    }

    pub fn same_labels(&self, o: &BiPoly) -> bool {
        self.u == o.u && self.v == o.v
    }

    pub fn check_labels(&self, o: &BiPoly) -> Result<()> {
        if self.same_labels(o) {
            Ok(())
        } else {
            Err(Error::LabelMismatch(
                format!("{},{}", self.u, self.v),
                format!("{},{}", o.u, o.v),
            ))
        }
    }

    pub fn relabel(&self, u: &str, v: &str) -> Self {
        Self::new(u, v, self.rows.clone())
    }

    pub fn rows(&self) -> &[UniPoly] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<UniPoly> {
        self.rows
    }

    pub fn row(&self, j: usize) -> UniPoly {
        self.rows.get(j).cloned().unwrap_or_default()
    }

    pub fn coeff(&self, j: usize, k: usize) -> Rational {
        self.rows.get(j).map(|r| r.coeff(k)).unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn deg_u(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.degree()).max()
    }

    /// Coefficient matrix with `(deg_u+1) x (deg_v+1)` entries.
    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        let w = self.deg_v().map_or(0, |d| d + 1);
        self.rows.iter().map(|r| (0..w).map(|k| r.coeff(k)).collect()).collect()
    }

    pub fn checked_add(&self, o: &BiPoly) -> Result<BiPoly> {
        self.check_labels(o)?;
        Ok(self + o)
    }

    pub fn checked_mul(&self, o: &BiPoly) -> Result<BiPoly> {
        self.check_labels(o)?;
        Ok(self * o)
    }

    pub fn scale(&self, q: &Rational) -> BiPoly {
        self.from_rows(self.rows.iter().map(|r| r.scale(q)).collect())
    }

    pub fn mul_v_poly(&self, p: &UniPoly) -> BiPoly {
        self.from_rows(self.rows.iter().map(|r| r * p).collect())
    }

    /// Multiply by `u^k`.
    pub fn shift_u(&self, k: usize) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut rows = vec![UniPoly::zero(); k];
        rows.extend(self.rows.iter().cloned());
        self.from_rows(rows)
    }

    pub fn pow(&self, k: usize) -> BiPoly {
        let mut out = self.constant_like(Rational::one());
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

    pub fn derivative_u(&self) -> BiPoly {
        self.from_rows(
            self.rows
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, r)| r.scale(&int(j as i64)))
                .collect(),
        )
    }

    pub fn derivative_v(&self) -> BiPoly {
        self.from_rows(self.rows.iter().map(|r| r.derivative()).collect())
    }

    /// `L(u, v0)` as a polynomial in `u`.
    pub fn eval_v(&self, v0: &Rational) -> UniPoly {
        UniPoly::new(self.rows.iter().map(|r| r.eval(v0)).collect())
    }

    /// `L(u0, v)` as a polynomial in `v`.
    pub fn eval_u(&self, u0: &Rational) -> UniPoly {
        let mut acc = UniPoly::zero();
        for r in self.rows.iter().rev() {
            acc = &acc.scale(u0) + r;
        }
        acc
    }

    /// Numeric slice `L(u, z0)`.
    pub fn eval_slice(&self, z0: Complex64) -> Result<Slice> {
        let mut coeffs: Vec<Complex64> = self.rows.iter().map(|r| r.eval_complex(z0)).collect();
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularSlice);
        }
        let tiny = 1e-14 * scale;
        let exact_zero = |j: usize| {
            z0.im == 0.0 && {
                let r = &self.rows[j];
                num_rational::BigRational::from_float(z0.re).is_some_and(|q| r.eval(&q).is_zero())
            }
        };
        let mut dropped = false;
        while coeffs.len() > 1 {
            let j = coeffs.len() - 1;
            if coeffs[j].norm() <= tiny || exact_zero(j) {
                coeffs.pop();
                dropped = true;
            } else {
                break;
            }
        }
        Ok(Slice { coeffs, degree_dropped: dropped })
    }

    /// `l_Du(v)`.
    pub fn leading_coeff_u(&self) -> UniPoly {
        self.rows.last().cloned().unwrap_or_default()
    }

    /// Exchange the roles of the two variables.
    pub fn swap_vars(&self) -> BiPoly {
        let dv = self.deg_v().map_or(0, |d| d + 1);
        let rows = (0..dv)
            .map(|k| UniPoly::new(self.rows.iter().map(|r| r.coeff(k)).collect()))
            .collect();
        Self::with_labels(self.v.clone(), self.u.clone(), rows)
    }

    /// True when `L(u, -v) = L(u, v)`.
    pub fn is_even_in_v(&self) -> bool {
        self.rows.iter().all(|r| r.coeffs().iter().enumerate().all(|(k, c)| k % 2 == 0 || c.is_zero()))
    }

    /// For a polynomial even in `v`, rewrite `v^2 -> v`.
    pub fn halve_v_degrees(&self) -> Option<BiPoly> {
        if !self.is_even_in_v() {
            return None;
        }
        Some(self.from_rows(
            self.rows
                .iter()
                .map(|r| UniPoly::new(r.coeffs().iter().step_by(2).cloned().collect()))
                .collect(),
        ))
    }

    /// `v -> v^2`
    pub fn square_v(&self) -> BiPoly {
        self.from_rows(
            self.rows
                .iter()
                .map(|r| {
                    let mut c = vec![Rational::zero(); r.coeffs().len() * 2];
                    for (k, x) in r.coeffs().iter().enumerate() {
                        c[2 * k] = x.clone();
                    }
                    UniPoly::new(c)
                })
                .collect(),
        )
    }

    /// `L(-u, v)`
    pub fn negate_u(&self) -> BiPoly {
        self.from_rows(
            self.rows
                .iter()
                .enumerate()
                .map(|(j, r)| if j % 2 == 1 { -r } else { r.clone() })
                .collect(),
        )
    }

    pub fn neg(&self) -> BiPoly {
        -self
    }

    /// Apply `f` to every row.
    pub fn map_rows(&self, f: impl Fn(&UniPoly) -> UniPoly) -> BiPoly {
        self.from_rows(self.rows.iter().map(f).collect())
    }

    /// Pretty form such as `m^2+z*m+1`.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (j, r) in self.rows.iter().enumerate().rev() {
            if r.is_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => self.u.to_string(),
                _ => format!("{}^{}", self.u, j),
            };
            let body = r.fmt_var(&self.v);
            let nterms = r.coeffs().iter().filter(|c| !c.is_zero()).count();
            let piece = if mono.is_empty() {
                body
            } else if nterms > 1 {
                format!("({body})*{mono}")
            } else if body == "1" {
                mono
            } else if body == "-1" {
                format!("-{mono}")
            } else {
                format!("{body}*{mono}")
            };
            if !out.is_empty() && !piece.starts_with('-') {
                out.push('+');
            }
            out.push_str(&piece);
        }
        out
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        debug_assert!(self.same_labels(o));
        let n = self.rows.len().max(o.rows.len());
        let rows = (0..n)
            .map(|j| match (self.rows.get(j), o.rows.get(j)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.from_rows(rows)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.from_rows(self.rows.iter().map(|r| -r).collect())
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        self + &(-o)
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        debug_assert!(self.same_labels(o));
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        let mut rows = vec![UniPoly::zero(); self.rows.len() + o.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.rows.iter().enumerate() {
                if !b.is_zero() {
                    rows[i + j] = &rows[i + j] + &(a * b);
                }
            }
        }
        self.from_rows(rows)
    }
}

unipoly::forward_owned!(BiPoly, Add, add);
unipoly::forward_owned!(BiPoly, Sub, sub);
unipoly::forward_owned!(BiPoly, Mul, mul);

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}

/// Sign of the leading coefficient under lexicographic `u > v` order.
pub(crate) fn leading_sign_negative(p: &BiPoly) -> bool {
    p.rows.last().and_then(|r| r.lc()).is_some_and(|c| c.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BiPoly {
        BiPoly::parse(s, "m", "z").unwrap()
    }

    #[test]
    fn add_cancels() {
        assert_eq!(p("m^2+z*m+1").checked_add(&p("-m^2")).unwrap(), p("z*m+1"));
        assert_eq!(p("m").checked_add(&p("1")).unwrap(), p("m+1"));
        let mp2 = p("2*z*m^2-(1-2-z)*m+1");
        assert_eq!(mp2.checked_add(&p("0")).unwrap(), p("2*z*m^2+(1+z)*m+1"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("m-z").checked_mul(&p("m+z")).unwrap(), p("m^2-z^2"));
        assert_eq!(p("m+1").checked_mul(&p("1")).unwrap(), p("m+1"));
        assert_eq!(p("m^2+z*m+1").checked_mul(&p("m")).unwrap(), p("m^3+z*m^2+m"));
    }

    #[test]
    fn label_mismatch() {
        let g = BiPoly::parse("g+z", "g", "z").unwrap();
        assert!(matches!(p("m").checked_add(&g), Err(Error::LabelMismatch(..))));
        assert!(p("m").checked_mul(&g).is_err());
    }

    #[test]
    fn slices() {
        let s = p("m^2+z*m+1").eval_slice(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.coeffs, vec![1.0.into(), 0.0.into(), 1.0.into()]);
        assert!(!s.degree_dropped);
        let s = p("2*z*m^2+(1+z)*m+1").eval_slice(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(s.coeffs.len(), 2);
        assert!(s.degree_dropped);
        let s = p("m^2+z*m+1").eval_slice(Complex64::new(3.0, 0.0)).unwrap();
        assert_eq!(s.coeffs, vec![1.0.into(), 3.0.into(), 1.0.into()]);
        assert!(p("z*m").eval_slice(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn leading_coeff() {
        assert_eq!(p("2*z*m^2+(1+z)*m+1").leading_coeff_u(), UniPoly::from_ints(&[0, 2]));
        assert_eq!(p("m^2+z*m+1").leading_coeff_u(), UniPoly::one());
        assert_eq!(p("m*(2*z^2-2*z)-(1-2*z)").leading_coeff_u(), UniPoly::from_ints(&[0, -2, 2]));
    }

    #[test]
    fn pretty_roundtrip() {
        for s in ["m^3+(z+2)*m^2+(2*z-1)*m+2", "-m^2+z", "z^2*m^2-m+1", "(1/2*z-3)*m"] {
            let a = p(s);
            assert_eq!(p(&a.pretty()), a, "{s}");
        }
        assert_eq!(p("m^3+(z+2)*m^2+(2*z-1)*m+2").pretty(), "m^3+(z+2)*m^2+(2*z-1)*m+2");
    }

    #[test]
    fn swap_and_parity() {
        let a = p("m^2*z+m+z^3");
        assert_eq!(a.swap_vars().swap_vars(), a);
        assert!(p("m*z^2+1").is_even_in_v());
        assert_eq!(p("m*z^2+z^4").halve_v_degrees().unwrap(), p("m*z+z^2"));
        assert_eq!(p("m*z+z^2").square_v(), p("m*z^2+z^4"));
    }
}
