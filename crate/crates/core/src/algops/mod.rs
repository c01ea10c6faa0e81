//! Sums and products of algebraic functions: `L1 ⊞u L2` has the roots
//! `u1(v) + u2(v)`, `L1 ⊠u L2` the roots `u1(v) u2(v)`.

mod matrix;

pub use matrix::{PolyMatrix, Ring};

use num_traits::{One, Zero};

use crate::bipoly::{int, BiPoly, Rational, UniPoly};
use crate::error::{Error, Result};

/// Which construction `alg_add` / `alg_mul` should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Kronecker companion determinant when both inputs coincide, resultant otherwise.
    #[default]
    Auto,
    Resultant,
    Companion,
}

/// Companion matrix with respect to `u`, stored as `num / den` with the
/// common denominator `den = l_Du(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionMatrix {
    pub num: PolyMatrix<UniPoly>,
    pub den: UniPoly,
}

impl CompanionMatrix {
    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    /// Entry `(i, j)` as a pair `(numerator, denominator)` in lowest terms.
    pub fn entry(&self, i: usize, j: usize) -> (UniPoly, UniPoly) {
        let n = self.num.get(i, j).clone();
        if n.is_zero() {
            return (n, UniPoly::one());
        }
        let g = UniPoly::gcd(&n, &self.den);
        let (a, b) = (n.div_exact(&g).unwrap(), self.den.div_exact(&g).unwrap());
        let s = b.lc().unwrap().recip();
        (a.scale(&s), b.scale(&s))
    }

    /// `den^D det(u I - C)`, a polynomial in `u` and `v`.
    pub fn characteristic(&self, proto: &BiPoly) -> BiPoly {
        let d = self.dim();
        let u_den = proto.u_var().mul_v_poly(&self.den);
        let m = PolyMatrix::from_fn(d, |i, j| {
            let e = proto.from_v_poly(self.num.get(i, j).clone());
            if i == j {
                &u_den - &e
            } else {
                -e
            }
        });
        m.det()
    }
}

pub fn companion_of(l: &BiPoly) -> Result<CompanionMatrix> {
    let d = l.deg_u().unwrap_or(0);
    if d == 0 {
        return Err(Error::DegreeTooLow(l.u_label().to_string()));
    }
    let den = l.leading_coeff_u();
    let num = PolyMatrix::from_fn(d, |i, j| {
        if j == d - 1 {
            -&l.row(i)
        } else if i == j + 1 {
            den.clone()
        } else {
            UniPoly::zero()
        }
    });
    Ok(CompanionMatrix { num, den })
}

/// Resultant in the outer variable of two polynomials whose coefficients
/// (lowest degree first) lie in a ring `R`.
pub fn resultant<R: Ring>(a: &[R], b: &[R]) -> Result<R> {
    let a = trimmed(a);
    let b = trimmed(b);
    if a.is_empty() || b.is_empty() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(sylvester(a, b).det())
}

fn trimmed<R: Ring>(a: &[R]) -> &[R] {
    let mut n = a.len();
    while n > 0 && a[n - 1].is_zero() {
        n -= 1;
    }
    &a[..n]
}

/// The `(n+m) x (n+m)` Sylvester matrix of `a` (degree `n`) and `b` (degree `m`).
pub fn sylvester<R: Ring>(a: &[R], b: &[R]) -> PolyMatrix<R> {
    let n = a.len() - 1;
    let m = b.len() - 1;
    let zero = a[n].zero_like();
    let dim = n + m;
    if dim == 0 {
        return PolyMatrix::from_fn(1, |_, _| a[0].one_like());
    }
    PolyMatrix::from_fn(dim, |i, j| {
        if i < m {
            if j >= i && j - i <= n {
                a[n - (j - i)].clone()
            } else {
                zero.clone()
            }
        } else {
            let r = i - m;
            if j >= r && j - r <= m {
                b[m - (j - r)].clone()
            } else {
                zero.clone()
            }
        }
    })
}

fn binomial(n: usize, k: usize) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * int((n - i) as i64) / int((i + 1) as i64);
    }
    r
}

/// `L1 ⊞u L2`: polynomial whose roots in `u` are the pairwise sums.
pub fn alg_add(l1: &BiPoly, l2: &BiPoly, strategy: Strategy) -> Result<BiPoly> {
    l1.check_labels(l2)?;
    let (d1, d2) = degrees(l1, l2)?;
    let use_companion = match strategy {
        Strategy::Auto => l1 == l2,
        Strategy::Resultant => false,
        Strategy::Companion => true,
    };
    let raw = if use_companion {
        kronecker(l1, l2, false)?
    } else {
        // Coefficients in u of L1(t - u, v), each a polynomial in (t, v).
        let a: Vec<BiPoly> = (0..=d1)
            .map(|i| {
                let sign = if i % 2 == 1 { -Rational::one() } else { Rational::one() };
                let rows = (i..=d1).map(|j| l1.row(j).scale(&(binomial(j, i) * &sign))).collect();
                l1.from_rows(rows)
            })
            .collect();
        let b: Vec<BiPoly> = (0..=d2).map(|i| l1.from_v_poly(l2.row(i))).collect();
        resultant(&a, &b)?
    };
    finish(raw)
}

/// `L1 ⊠u L2`: polynomial whose roots in `u` are the pairwise products.
pub fn alg_mul(l1: &BiPoly, l2: &BiPoly, strategy: Strategy) -> Result<BiPoly> {
    l1.check_labels(l2)?;
    let (d1, d2) = degrees(l1, l2)?;
    let use_companion = match strategy {
        Strategy::Auto => l1 == l2,
        Strategy::Resultant => false,
        Strategy::Companion => true,
    };
    let mut raw = if use_companion {
        kronecker(l1, l2, true)?
    } else {
        // u^D1 L1(t/u, v): the coefficient of u^(D1-j) is l_j(v) t^j.
        let a: Vec<BiPoly> = (0..=d1).map(|i| l1.from_v_poly(l1.row(d1 - i)).shift_u(d1 - i)).collect();
        let b: Vec<BiPoly> = (0..=d2).map(|i| l1.from_v_poly(l2.row(i))).collect();
        resultant(&a, &b)?
    };
    if !l1.row(0).is_zero() && !l2.row(0).is_zero() {
        // Neither input has the root u = 0, so a factor t^k is spurious.
        let k = raw.rows().iter().take_while(|r| r.is_zero()).count();
        raw = raw.from_rows(raw.rows()[k..].to_vec());
    }
    finish(raw)
}

fn degrees(l1: &BiPoly, l2: &BiPoly) -> Result<(usize, usize)> {
    match (l1.deg_u(), l2.deg_u()) {
        (Some(a), Some(b)) if a >= 1 && b >= 1 => Ok((a, b)),
        (None, _) | (_, None) => Err(Error::ZeroPolynomial),
        _ => Err(Error::DegreeTooLow(l1.u_label().to_string())),
    }
}

fn finish(raw: BiPoly) -> Result<BiPoly> {
    if raw.is_zero() {
        return Err(Error::Degenerate("resultant vanished identically".into()));
    }
    let out = raw.canonicalize()?;
    if out.deg_u().unwrap_or(0) == 0 {
        return Err(Error::Degenerate("result has no roots".into()));
    }
    Ok(out)
}

/// `det(t l1 l2 I - K)` with `K = l2 C1'⊗I + l1 I⊗C2'` (sum) or `C1'⊗C2'`
/// (product), where `Ci' = l_i Ci` are the scaled companion matrices.
fn kronecker(l1: &BiPoly, l2: &BiPoly, product: bool) -> Result<BiPoly> {
    let c1 = companion_of(l1)?;
    let c2 = companion_of(l2)?;
    let (n1, n2) = (c1.dim(), c2.dim());
    let dim = n1 * n2;
    let lam = &c1.den * &c2.den;
    let t_lam = l1.u_var().mul_v_poly(&lam);
    let entry = |i: usize, j: usize| -> UniPoly {
        let (a, b) = (i / n2, i % n2);
        let (c, d) = (j / n2, j % n2);
        if product {
            c1.num.get(a, c) * c2.num.get(b, d)
        } else {
            let mut e = UniPoly::zero();
            if b == d {
                e = &e + &(c1.num.get(a, c) * &c2.den);
            }
            if a == c {
                e = &e + &(c2.num.get(b, d) * &c1.den);
            }
            e
        }
    };
    let m = PolyMatrix::from_fn(dim, |i, j| {
        let k = l1.from_v_poly(entry(i, j));
        if i == j {
            &t_lam - &k
        } else {
            -k
        }
    });
    Ok(m.det())
}

/// Roots of `p(x) = 0` at the rational `v0`, used by the numeric oracle tests.
pub fn slice_at(l: &BiPoly, v0: &Rational) -> UniPoly {
    l.eval_v(v0)
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        (!Zero::is_zero(o)).then(|| self / o)
    }
}

impl Ring for UniPoly {
    fn zero_like(&self) -> Self {
        UniPoly::zero()
    }
    fn one_like(&self) -> Self {
        UniPoly::one()
    }
    fn is_zero(&self) -> bool {
        UniPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        UniPoly::div_exact(self, o)
    }
}

impl Ring for BiPoly {
    fn zero_like(&self) -> Self {
        BiPoly::zero_like(self)
    }
    fn one_like(&self) -> Self {
        self.constant_like(Rational::one())
    }
    fn is_zero(&self) -> bool {
        BiPoly::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        BiPoly::div_exact(self, o)
    }
}
