use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{leading_sign_negative, BiPoly, Rational, UniPoly};
use crate::algops::resultant;
use crate::error::{Error, Result};

/// Largest degree accepted in either variable after canonicalization.
pub const MAX_DEGREE: usize = 64;

impl BiPoly {
    /// Monic gcd of the coefficient rows.
    pub fn content_v(&self) -> UniPoly {
        let mut g = UniPoly::zero();
        for r in self.rows() {
            g = UniPoly::gcd(&g, r);
            if g.is_constant() && !g.is_zero() {
                break;
            }
        }
        g
    }

    /// Divide out [`BiPoly::content_v`].
    pub fn primitive_u(&self) -> BiPoly {
        let c = self.content_v();
        if c.is_zero() || c.is_constant() {
            return self.clone();
        }
        self.map_rows(|r| r.div_exact(&c).expect("content divides every row"))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide.
    pub fn div_exact(&self, d: &BiPoly) -> Option<BiPoly> {
        let dd = d.deg_u()?;
        if self.is_zero() {
            return Some(self.clone());
        }
        let mut r: Vec<UniPoly> = self.rows().to_vec();
        let dn = r.len() - 1;
        if dn < dd {
            return None;
        }
        let lc = &d.rows()[dd];
        let mut q = vec![UniPoly::zero(); dn - dd + 1];
        for i in (dd..=dn).rev() {
            if r[i].is_zero() {
                continue;
            }
            let f = r[i].div_exact(lc)?;
            for (j, drow) in d.rows().iter().enumerate() {
                if !drow.is_zero() {
                    r[i - dd + j] = &r[i - dd + j] - &(&f * drow);
                }
            }
            q[i - dd] = f;
        }
        if r.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(self.from_rows(q))
    }

    /// Pseudo-remainder with respect to `u`.
    pub fn prem(&self, d: &BiPoly) -> BiPoly {
        let dd = d.deg_u().expect("pseudo-division by zero");
        let lc_d = d.leading_coeff_u();
        let mut r = self.clone();
        let mut e = match self.deg_u() {
            Some(n) if n >= dd => n - dd + 1,
            _ => return self.clone(),
        };
        while let Some(n) = r.deg_u() {
            if n < dd {
                break;
            }
            let lc_r = r.leading_coeff_u();
            let t = d.mul_v_poly(&lc_r).shift_u(n - dd);
            r = &r.mul_v_poly(&lc_d) - &t;
            e -= 1;
        }
        if e > 0 {
            r = r.mul_v_poly(&lc_d.pow(e));
        }
        r
    }

    /// Integer coefficients with content 1 and positive leading coefficient.
    pub fn integer_normalize(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for r in self.rows() {
            for c in r.coeffs() {
                l = l.lcm(c.denom());
            }
        }
        let mut g = BigInt::zero();
        for r in self.rows() {
            for c in r.coeffs() {
                g = g.gcd(&(c * Rational::from_integer(l.clone())).to_integer());
            }
        }
        let mut f = Rational::new(l, g);
        if leading_sign_negative(self) {
            f = -f;
        }
        self.scale(&f)
    }

    /// Canonical representative: no common `v` factor among rows, square-free,
    /// integer content 1, positive leading coefficient.
    pub fn canonicalize(&self) -> Result<BiPoly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut p = self.primitive_u();
        if p.deg_u().unwrap_or(0) >= 1 && !separable_at_some_slice(&p) {
            let d = bigcd(&p, &p.derivative_u());
            if d.deg_u().unwrap_or(0) >= 1 {
                p = p.div_exact(&d).expect("gcd divides");
            }
        }
        let p = p.integer_normalize();
        let (du, dv) = (p.deg_u().unwrap_or(0), p.deg_v().unwrap_or(0));
        if du.max(dv) > MAX_DEGREE {
            return Err(Error::DegreeCap(du.max(dv), MAX_DEGREE));
        }
        Ok(p)
    }

    pub fn is_canonical(&self) -> bool {
        self.canonicalize().is_ok_and(|c| &c == self)
    }

    /// `Qu^Du Qv^Dv L(Pu/Qu, Pv/Qv)` without canonicalization. All four
    /// arguments live in the target variables.
    pub fn substitute_raw(&self, pu: &BiPoly, qu: &BiPoly, pv: &BiPoly, qv: &BiPoly) -> Result<BiPoly> {
        for x in [qu, pv, qv] {
            pu.check_labels(x)?;
        }
        if qu.is_zero() || qv.is_zero() {
            return Err(Error::InvalidParameter("zero denominator in substitution".into()));
        }
        let Some(du) = self.deg_u() else {
            return Ok(pu.zero_like());
        };
        let dv = self.deg_v().unwrap_or(0);
        let one = pu.constant_like(Rational::one());
        let powers = |b: &BiPoly, n: usize| {
            let mut v = vec![one.clone()];
            for k in 1..=n {
                v.push(&v[k - 1] * b);
            }
            v
        };
        let (pv_p, qv_p) = (powers(pv, dv), powers(qv, dv));
        let (pu_p, qu_p) = (powers(pu, du), powers(qu, du));
        let mut acc = pu.zero_like();
        for (j, row) in self.rows().iter().enumerate() {
            if row.is_zero() {
                continue;
            }
            let mut h = pu.zero_like();
            for (k, c) in row.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    h = &h + &(&pv_p[k] * &qv_p[dv - k]).scale(c);
                }
            }
            acc = &acc + &(&h * &(&pu_p[j] * &qu_p[du - j]));
        }
        Ok(acc)
    }

    /// Substitute `u -> Pu/Qu`, `v -> Pv/Qv`, clear denominators and canonicalize.
    pub fn substitute_rational(&self, pu: &BiPoly, qu: &BiPoly, pv: &BiPoly, qv: &BiPoly) -> Result<BiPoly> {
        let raw = self.substitute_raw(pu, qu, pv, qv)?;
        if raw.is_zero() {
            return Err(Error::Degenerate("substitution produced the zero polynomial".into()));
        }
        raw.canonicalize()
    }

    /// Equality of canonical forms up to sign. Two square-free polynomials
    /// without `v`-only factors share a zero set exactly when they agree here.
    pub fn equivalent(&self, o: &BiPoly) -> bool {
        if !self.same_labels(o) {
            return false;
        }
        match (self.canonicalize(), o.canonicalize()) {
            (Ok(a), Ok(b)) => a == b || a == -&b,
            (Err(_), Err(_)) => self.is_zero() && o.is_zero(),
            _ => false,
        }
    }

    /// Discriminant in `u`: `(-1)^(n(n-1)/2) Res_u(L, dL/du) / l_n`.
    pub fn discriminant_u(&self) -> Result<UniPoly> {
        let n = self.deg_u().unwrap_or(0);
        if n < 2 {
            return Err(Error::DegreeTooLow(self.u_label().to_string()));
        }
        let res = resultant(self.rows(), self.derivative_u().rows())?;
        let d = res.div_exact(&self.leading_coeff_u()).expect("leading coefficient divides the resultant");
        Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
    }
}

/// Greatest common divisor in `Q[v][u]` by the subresultant remainder sequence.
pub fn bigcd(a: &BiPoly, b: &BiPoly) -> BiPoly {
    if a.is_zero() {
        return b.primitive_u().integer_normalize();
    }
    if b.is_zero() {
        return a.primitive_u().integer_normalize();
    }
    let c = UniPoly::gcd(&a.content_v(), &b.content_v());
    let (mut p, mut q) = (a.primitive_u(), b.primitive_u());
    if p.deg_u() < q.deg_u() {
        std::mem::swap(&mut p, &mut q);
    }
    let (mut g, mut h) = (UniPoly::one(), UniPoly::one());
    loop {
        if q.deg_u() == Some(0) {
            return a.from_v_poly(c);
        }
        let delta = p.deg_u().unwrap() - q.deg_u().unwrap();
        let r = p.prem(&q);
        if r.is_zero() {
            return q.primitive_u().mul_v_poly(&c).integer_normalize();
        }
        let d = &g * &h.pow(delta);
        p = q;
        q = r.map_rows(|x| x.div_exact(&d).expect("subresultant division is exact"));
        g = p.leading_coeff_u();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
}

/// True when some slice `v = v0` with nonvanishing leading coefficient is
/// square-free in `u`. The gcd with the derivative can only grow under
/// specialization, so this proves the bivariate gcd is free of `u`.
fn separable_at_some_slice(p: &BiPoly) -> bool {
    let lc = p.leading_coeff_u();
    let dp = p.derivative_u();
    (1..=8)
        .map(|k| Rational::new(BigInt::from(2 * k + 1), BigInt::from(k + 3)))
        .filter(|v0| !lc.eval(v0).is_zero())
        .take(2)
        .any(|v0| UniPoly::gcd(&p.eval_v(&v0), &dp.eval_v(&v0)).degree() == Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::{int, rat};

    fn p(s: &str) -> BiPoly {
        BiPoly::parse(s, "m", "z").unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(p("(m^2+z*m+1)^2").canonicalize().unwrap(), p("m^2+z*m+1"));
        assert_eq!(p("2*m+2*z").canonicalize().unwrap(), p("m+z"));
        assert_eq!(p("z*(m+1)").canonicalize().unwrap(), p("m+1"));
        assert_eq!(p("-1/2*m+3/4").canonicalize().unwrap(), p("2*m-3"));
        assert!(p("0").canonicalize().is_err());
    }

    #[test]
    fn canonicalize_keeps_u_only_factors() {
        let a = p("m*(z*m+1)");
        assert_eq!(a.canonicalize().unwrap(), a);
        assert_eq!(p("(m-z)^2*(m+1)^3*(z^2+1)").canonicalize().unwrap(), p("(m-z)*(m+1)"));
    }

    #[test]
    fn gcd_and_division() {
        let f = p("z*m^2+m-3");
        let a = &f * &p("m+z^2");
        let b = &f * &p("2*m^3-z");
        assert_eq!(bigcd(&a, &b), f.integer_normalize());
        assert_eq!(a.div_exact(&f).unwrap(), p("m+z^2"));
        assert!(a.div_exact(&p("m+1")).is_none());
    }

    #[test]
    fn substitution_examples() {
        let atomic = p("m*(2*z^2-2*z)-(1-2*z)");
        let g = |s: &str| BiPoly::parse(s, "g", "z").unwrap();
        let gz = atomic.substitute_rational(&g("-g"), &g("1"), &g("z"), &g("1")).unwrap();
        assert!(gz.equivalent(&g("-g*(2*z^2-2*z)-(1-2*z)")));
        let rg = |s: &str| BiPoly::parse(s, "r", "g").unwrap();
        let lgz = g("-g*(2*z^2-2*z)-(1-2*z)");
        let out = lgz.substitute_rational(&rg("g"), &rg("1"), &rg("r*g+1"), &rg("g")).unwrap();
        assert!(out.equivalent(&rg("-1+2*g*r^2+(2-2*g)*r")));
        let m = p("m");
        assert_eq!(m.substitute_rational(&p("m"), &p("1"), &p("z"), &p("1")).unwrap(), m);
        assert!(p("m-z").substitute_rational(&p("z"), &p("1"), &p("z"), &p("1")).is_err());
    }

    #[test]
    fn discriminants() {
        assert_eq!(p("m^2+z*m+1").discriminant_u().unwrap(), UniPoly::from_ints(&[-4, 0, 1]));
        assert_eq!(p("2*z*m^2+(1+z)*m+1").discriminant_u().unwrap(), UniPoly::from_ints(&[1, -6, 1]));
        assert_eq!(p("m^2-1").discriminant_u().unwrap(), UniPoly::constant(int(4)));
        assert!(p("z*m+1").discriminant_u().is_err());
        let cubic = p("m^3-z");
        assert_eq!(cubic.discriminant_u().unwrap(), UniPoly::new(vec![int(0), int(0), int(-27)]));
        let _ = rat(1, 2);
    }

    #[test]
    fn equivalence() {
        assert!(p("m^2+z*m+1").equivalent(&p("3*m^2+3*z*m+3")));
        assert!(!p("m^2+z*m+1").equivalent(&p("m^2+z*m+2")));
        let intro = p("m*(m^2+z*m+1)*(1+1/2*m)-1/2*m*(1+1/2*m)+1/2*(m^2+z*m+1)");
        assert!(intro.equivalent(&intro.canonicalize().unwrap()));
    }
}
