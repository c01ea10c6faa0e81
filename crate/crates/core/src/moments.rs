//! Exact moment and free cumulant series from the `muz` and `rg` encodings,
//! and P-recursive recurrences fitted to them.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::bipoly::factor::factor_univariate;
use crate::bipoly::{BiPoly, Rational, UniPoly};
use crate::density::DensityProfile;
use crate::encodings::{EncodedDistribution, Kind};
use crate::error::{Error, Result};

const HELD_OUT: usize = 8;
const MAX_LIFTS: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSeries {
    pub kind: Kind,
    pub coefficients: Vec<Rational>,
    source: Option<EncodedDistribution>,
}

impl MomentSeries {
    pub fn from_terms(kind: Kind, coefficients: Vec<Rational>) -> Self {
        MomentSeries { kind, coefficients, source: None }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// The same series with `n + 1` terms, when it was computed from a polynomial.
    pub fn regenerate(&self, n: usize) -> Option<Result<MomentSeries>> {
        let src = self.source.as_ref()?;
        Some(match self.kind {
            Kind::Rg => cumulant_series(src, n),
            _ => moment_series(src, n),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.name(),
            "coefficients": self.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// `p(s(v), v) mod v^n` where `u` is replaced by the truncated series `s`.
fn eval_series(p: &BiPoly, s: &[Rational], n: usize) -> Vec<Rational> {
    let rows = p.rows();
    let mut acc = vec![Rational::zero(); n];
    for row in rows.iter().rev() {
        let mut next = vec![Rational::zero(); n];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in s.iter().enumerate().take(n - i) {
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        for (k, c) in row.coeffs().iter().enumerate().take(n) {
            next[k] += c;
        }
        acc = next;
    }
    acc
}

/// `p(seed + v w, v) / v^r` with the largest possible `r`, in labels `(w, v)`.
fn lift(p: &BiPoly, seed: &Rational) -> BiPoly {
    let v = p.v_label().to_string();
    let step = BiPoly::new("w", &v, vec![UniPoly::constant(seed.clone()), UniPoly::x()]);
    let mut out = BiPoly::new("w", &v, Vec::new());
    let mut power = BiPoly::new("w", &v, vec![UniPoly::one()]);
    for row in p.rows() {
        out = &out + &power.mul_v_poly(row);
        power = &power * &step;
    }
    let val = out
        .rows()
        .iter()
        .filter_map(|r| r.coeffs().iter().position(|c| !c.is_zero()))
        .min()
        .unwrap_or(0);
    out.map_rows(|r| UniPoly::new(r.coeffs().iter().skip(val).cloned().collect()))
}

fn rational_roots(p: &UniPoly) -> Vec<Rational> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let mut out: Vec<Rational> = factor_univariate(&p.squarefree_part())
        .into_iter()
        .filter(|f| f.degree() == Some(1))
        .map(|f| -(f.coeff(0) / f.coeff(1)))
        .collect();
    out.sort();
    out
}

/// Power series root `u(v) = a_0 + a_1 v + ... + a_n v^n` of `p(u, v) = 0`
/// with `a_0 = seed`. Each admissible series is returned; more than one only
/// when the seed is a multiple root and several rational lifts exist.
fn series_roots(p: &BiPoly, seed: &Rational, n: usize, depth: usize) -> Result<Vec<Vec<Rational>>> {
    let at0: Vec<Rational> = p.rows().iter().map(|r| r.coeff(0)).collect();
    let p0 = UniPoly::new(at0);
    if !p0.eval(seed).is_zero() {
        return Ok(Vec::new());
    }
    let dp = p0.derivative().eval(seed);
    if !dp.is_zero() {
        let mut a = vec![seed.clone()];
        for k in 1..=n {
            let mut s = a.clone();
            s.push(Rational::zero());
            let r = eval_series(p, &s, k + 1);
            a.push(-(&r[k] / &dp));
        }
        return Ok(vec![a]);
    }
    if depth >= MAX_LIFTS {
        return Err(Error::AmbiguousSeed(format!("seed {seed} is still a multiple root after {MAX_LIFTS} lifts")));
    }
    if n == 0 {
        return Ok(vec![vec![seed.clone()]]);
    }
    let q = lift(p, seed);
    let q0 = UniPoly::new(q.rows().iter().map(|r| r.coeff(0)).collect());
    let mut out = Vec::new();
    for c in rational_roots(&q0) {
        for tail in series_roots(&q, &c, n - 1, depth + 1)? {
            let mut a = vec![seed.clone()];
            a.extend(tail);
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    Ok(out)
}

fn even_moments_nonneg(a: &[Rational]) -> bool {
    a.iter().step_by(2).all(|x| !x.is_negative())
}

/// `M_0, ..., M_n` from the branch of `Lmuz` through `mu(0) = 1`.
pub fn moment_series(d: &EncodedDistribution, n: usize) -> Result<MomentSeries> {
    let l = d.convert(Kind::MuZ)?;
    let mut found = series_roots(l.poly(), &Rational::one(), n, 0)?;
    if found.len() > 1 {
        found.retain(|a| even_moments_nonneg(a));
    }
    match found.len() {
        0 => Err(Error::NoAdmissibleSeed("no branch of the moment series with mu(0) = 1".into())),
        1 => Ok(MomentSeries { kind: Kind::MuZ, coefficients: found.pop().unwrap(), source: Some(d.clone()) }),
        _ => Err(Error::AmbiguousSeed(format!("{} moment series pass mu(0) = 1", found.len()))),
    }
}

/// Free cumulants `K_1, ..., K_{n+1}` as the coefficients of `r(g)`, seeded
/// with `r(0) = K_1 = M_1`.
pub fn cumulant_series(d: &EncodedDistribution, n: usize) -> Result<MomentSeries> {
    let m1 = moment_series(d, 1)?.coefficients[1].clone();
    let l = d.convert(Kind::Rg)?;
    let mut found = series_roots(l.poly(), &m1, n, 0)?;
    match found.len() {
        0 => Err(Error::NoAdmissibleSeed(format!("no branch of r(g) with r(0) = {m1}"))),
        1 => Ok(MomentSeries { kind: Kind::Rg, coefficients: found.pop().unwrap(), source: Some(d.clone()) }),
        _ => Err(Error::AmbiguousSeed(format!("{} cumulant series pass r(0) = {m1}", found.len()))),
    }
}

/// `sum_i P_i(n) a(n + i) = 0` for all `n >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence {
    pub coefficients: Vec<UniPoly>,
}

impl Recurrence {
    pub fn new(coefficients: Vec<UniPoly>) -> Self {
        Recurrence { coefficients }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    pub fn residual(&self, terms: &[Rational], n: usize) -> Rational {
        let x = Rational::from_integer(n.into());
        self.coefficients.iter().enumerate().map(|(i, p)| p.eval(&x) * &terms[n + i]).sum()
    }

    /// Whether the recurrence holds at every shift the terms allow.
    pub fn holds(&self, terms: &[Rational]) -> bool {
        let e = self.order();
        terms.len() > e && (0..terms.len() - e).all(|n| self.residual(terms, n).is_zero())
    }

    /// Equal up to a non-zero scalar.
    pub fn same_as(&self, o: &Recurrence) -> bool {
        self.coefficients.len() == o.coefficients.len() && self.normalized() == o.normalized()
    }

    fn normalized(&self) -> Vec<UniPoly> {
        let flat: Vec<Rational> = self.coefficients.iter().flat_map(|p| p.coeffs().to_vec()).collect();
        let s = flat.iter().rev().find(|c| !c.is_zero()).cloned().unwrap_or_else(Rational::one);
        self.coefficients.iter().map(|p| p.scale(&(Rational::one() / &s))).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order(),
            "degree": self.degree(),
            "coefficients": self
                .coefficients
                .iter()
                .map(|p| p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "text": self.to_string(),
        })
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.coefficients.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let arg = if i == 0 { "n".to_string() } else { format!("n+{i}") };
            write!(f, "({})*a({arg})", p.fmt_var("n"))?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " = 0")
    }
}

/// Integer, content-free scaling with a positive leading coefficient of `P_e`.
fn integer_normal(v: Vec<Rational>, e: usize, d: usize) -> Recurrence {
    let mut c = UniPoly::new(v).primitive().coeffs().to_vec();
    c.resize((e + 1) * (d + 1), Rational::zero());
    Recurrence::new(c.chunks(d + 1).map(|b| UniPoly::new(b.to_vec())).collect())
}

/// Basis of the right nullspace of `a` over the rationals.
fn nullspace(mut a: Vec<Vec<Rational>>, cols: usize) -> Vec<Vec<Rational>> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else { continue };
        a.swap(row, p);
        let inv = Rational::one() / &a[row][col];
        for c in col..cols {
            a[row][c] = &a[row][c] * &inv;
        }
        for r in 0..a.len() {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..cols {
                    let t = &f * &a[row][c];
                    a[r][c] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == a.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[r][f].clone();
            }
            v
        })
        .collect()
}

fn fit_exact(terms: &[Rational], e: usize, d: usize) -> Option<Recurrence> {
    let unknowns = (e + 1) * (d + 1);
    if terms.len() < e + unknowns + 2 {
        return None;
    }
    let rows: Vec<Vec<Rational>> = (0..terms.len() - e)
        .map(|n| {
            let x = Rational::from_integer(n.into());
            let mut row = Vec::with_capacity(unknowns);
            for i in 0..=e {
                let mut pw = Rational::one();
                for _ in 0..=d {
                    row.push(&pw * &terms[n + i]);
                    pw *= &x;
                }
            }
            row
        })
        .collect();
    nullspace(rows, unknowns)
        .into_iter()
        .map(|v| integer_normal(v, e, d))
        .find(|r| !r.coefficients[e].is_zero() && r.holds(terms))
}

/// Smallest-order, then smallest-degree recurrence for a bare sequence. The
/// last eight terms are held out and must also satisfy it.
pub fn fit_recurrence_terms(terms: &[Rational], max_order: usize, max_degree: usize) -> Result<Recurrence> {
    if terms.len() <= HELD_OUT {
        return Err(Error::NoRecurrence(max_order, max_degree));
    }
    let (fit, _) = terms.split_at(terms.len() - HELD_OUT);
    for e in 1..=max_order {
        for d in 0..=max_degree {
            if let Some(r) = fit_exact(fit, e, d) {
                if r.holds(terms) {
                    return Ok(r);
                }
            }
        }
    }
    Err(Error::NoRecurrence(max_order, max_degree))
}

/// Terms needed by `fit_recurrence` for the given bounds.
pub fn terms_needed(max_order: usize, max_degree: usize) -> usize {
    (max_order + 1) * (max_degree + 1) + max_order + HELD_OUT
}

/// Fit on every supplied coefficient, then verify on eight fresh ones
/// generated from the source polynomial.
pub fn fit_recurrence(series: &MomentSeries, max_order: usize, max_degree: usize) -> Result<Recurrence> {
    let need = terms_needed(max_order, max_degree);
    if series.len() < need {
        return match series.regenerate(need - 1) {
            Some(longer) => fit_recurrence(&longer?, max_order, max_degree),
            None => Err(Error::InvalidParameter(format!(
                "{} coefficients supplied, {need} needed for order {max_order} and degree {max_degree}",
                series.len()
            ))),
        };
    }
    let Some(fresh) = series.regenerate(series.len() + HELD_OUT - 1) else {
        return fit_recurrence_terms(&series.coefficients, max_order, max_degree);
    };
    let all = fresh?.coefficients;
    for e in 1..=max_order {
        for d in 0..=max_degree {
            if let Some(r) = fit_exact(&series.coefficients, e, d) {
                if r.holds(&all) {
                    return Ok(r);
                }
            }
        }
    }
    Err(Error::NoRecurrence(max_order, max_degree))
}

/// `int x^j f(x) dx + sum p_i l_i^j` for `j = 0..=k`.
pub fn moments_from_density(p: &DensityProfile, k: usize) -> Vec<f64> {
    (0..=k)
        .map(|j| {
            let cont: f64 = p.quadrature.iter().map(|(x, w)| w * x.powi(j as i32)).sum();
            cont + p.atoms.iter().map(|a| a.weight * a.location.powi(j as i32)).sum::<f64>()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::{int, rat};
    use crate::density::density_grid;
    use crate::encodings::{atomic, marcenko_pastur, point_mass, semicircle};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn mp_moments() {
        let s = moment_series(&marcenko_pastur(&rat(2, 1)).unwrap(), 4).unwrap();
        assert_eq!(s.coefficients, ints(&[1, 1, 3, 11, 45]));
    }

    #[test]
    fn semicircle_moments() {
        let s = moment_series(&semicircle(), 8).unwrap();
        assert_eq!(s.coefficients, ints(&[1, 0, 1, 0, 2, 0, 5, 0, 14]));
    }

    #[test]
    fn atomic_moments_need_lifts() {
        let hh = atomic(&[(rat(1, 2), rat(0, 1)), (rat(1, 2), rat(1, 1))]).unwrap();
        let s = moment_series(&hh, 4).unwrap();
        assert_eq!(s.coefficients, vec![int(1), rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn cumulants() {
        let c = rat(3, 7);
        let s = cumulant_series(&marcenko_pastur(&c).unwrap(), 3).unwrap();
        let want: Vec<Rational> = (0..4).map(|k| num_traits::pow(c.clone(), k)).collect();
        assert_eq!(s.coefficients, want);
        assert_eq!(cumulant_series(&semicircle(), 3).unwrap().coefficients, ints(&[0, 1, 0, 0]));
        assert_eq!(cumulant_series(&point_mass(&rat(5, 2)), 2).unwrap().coefficients, vec![rat(5, 2), int(0), int(0)]);
    }

    #[test]
    fn cauchy_has_no_moments() {
        let l = EncodedDistribution::parse(Kind::Mz, "(z^2+1)*m^2+2*z*m+1").unwrap();
        assert!(moment_series(&l, 3).is_err());
    }

    #[test]
    fn mp_recurrence() {
        let mp = marcenko_pastur(&rat(2, 1)).unwrap();
        let s = moment_series(&mp, terms_needed(3, 3) + 2).unwrap();
        let r = fit_recurrence(&s, 3, 3).unwrap();
        let want = Recurrence::new(vec![UniPoly::from_ints(&[0, 1]), UniPoly::from_ints(&[-9, -6]), UniPoly::from_ints(&[3, 1])]);
        assert!(r.same_as(&want), "{r}");
        assert_eq!(r.to_string(), "(n)*a(n) + (-6*n-9)*a(n+1) + (n+3)*a(n+2) = 0");
    }

    #[test]
    fn catalan_recurrence() {
        let s = moment_series(&semicircle(), 60).unwrap();
        let even: Vec<Rational> = s.coefficients.iter().step_by(2).cloned().collect();
        let r = fit_recurrence_terms(&even, 2, 2).unwrap();
        let want = Recurrence::new(vec![UniPoly::from_ints(&[2, 4]), UniPoly::from_ints(&[-2, -1])]);
        assert!(r.same_as(&want), "{r}");
    }

    #[test]
    fn too_few_terms() {
        let s = MomentSeries::from_terms(Kind::MuZ, ints(&[1, 1, 2]));
        assert!(fit_recurrence(&s, 2, 2).is_err());
        let geometric: Vec<Rational> = (0..20).map(|k| int(1 << k)).collect();
        let r = fit_recurrence_terms(&geometric, 2, 2).unwrap();
        assert_eq!((r.order(), r.degree()), (1, 0));
    }

    #[test]
    fn numeric_moments() {
        let p = density_grid(&semicircle(), -2.5, 2.5, 1000).unwrap();
        let m = moments_from_density(&p, 4);
        for (a, b) in m.iter().zip([1.0, 0.0, 1.0, 0.0, 2.0]) {
            assert!((a - b).abs() < 1e-3, "{m:?}");
        }
        let hh = atomic(&[(rat(1, 2), rat(0, 1)), (rat(1, 2), rat(1, 1))]).unwrap();
        let p = density_grid(&hh, -0.5, 1.5, 200).unwrap();
        let m = moments_from_density(&p, 3);
        for (a, b) in m.iter().zip([1.0, 0.5, 0.5, 0.5]) {
            assert!((a - b).abs() < 1e-6, "{m:?}");
        }
    }

    #[test]
    fn json_uses_strings() {
        let s = moment_series(&marcenko_pastur(&rat(1, 2)).unwrap(), 2).unwrap();
        assert_eq!(s.to_json()["coefficients"][2], "3/2");
    }
}
