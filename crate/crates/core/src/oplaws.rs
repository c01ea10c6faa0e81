//! Operational laws: matrix transformations as polynomial transformations of
//! `Lmz`. Every function accepts any encoding, works on `mz` and returns `mz`.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::algops::{alg_add, alg_mul, Strategy};
use crate::bipoly::factor::irreducible_factors;
use crate::bipoly::{BiPoly, Rational};
use crate::encodings::{EncodedDistribution, Kind};
use crate::error::{Error, Result};
use crate::numeric::aberth;

/// Parameters of `(pA + qI) / (rA + sI)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MobiusParams {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

impl MobiusParams {
    pub fn new(p: Rational, q: Rational, r: Rational, s: Rational) -> Self {
        MobiusParams { p, q, r, s }
    }

    pub fn inverse() -> Self {
        Self::new(Rational::zero(), Rational::one(), Rational::one(), Rational::zero())
    }

    pub fn scale(a: Rational) -> Self {
        Self::new(a, Rational::zero(), Rational::zero(), Rational::one())
    }

    pub fn shift(a: Rational) -> Self {
        Self::new(Rational::one(), a, Rational::zero(), Rational::one())
    }

    pub fn det(&self) -> Rational {
        &self.p * &self.s - &self.q * &self.r
    }

    /// The map `x -> self(other(x))`.
    pub fn compose(&self, other: &MobiusParams) -> MobiusParams {
        MobiusParams::new(
            &self.p * &other.p + &self.q * &other.r,
            &self.p * &other.q + &self.q * &other.s,
            &self.r * &other.p + &self.s * &other.r,
            &self.r * &other.q + &self.s * &other.s,
        )
    }
}

/// Finitely many atoms given as `(weight, location)`.
pub type AtomicSpec = Vec<(Rational, Rational)>;

fn hub(d: &EncodedDistribution) -> Result<BiPoly> {
    Ok(d.convert(Kind::Mz)?.into_poly())
}

fn mzp(s: &str) -> BiPoly {
    BiPoly::parse(s, "m", "z").expect("law expression")
}

fn konst(c: &Rational) -> BiPoly {
    mzp("1").scale(c)
}

/// Substitute and clear denominators, then drop the factors of `spurious`.
fn law(l: &BiPoly, pu: &BiPoly, qu: &BiPoly, pv: &BiPoly, qv: &BiPoly, spurious: &[&BiPoly]) -> Result<EncodedDistribution> {
    let mut raw = l.substitute_raw(pu, qu, pv, qv)?;
    if raw.is_zero() {
        return Err(Error::Degenerate("operational law produced the zero polynomial".into()));
    }
    for d in spurious {
        if d.deg_u().unwrap_or(0) == 0 {
            continue;
        }
        while let Some(q) = raw.div_exact(d) {
            raw = q;
        }
    }
    EncodedDistribution::mz(raw)
}

fn positive(name: &str, c: &Rational) -> Result<()> {
    if *c <= Rational::zero() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {c}")));
    }
    Ok(())
}

/// `(pA + qI) / (rA + sI)`. The caller is responsible for `A` having no atom at `-s/r`.
pub fn mobius(d: &EncodedDistribution, t: &MobiusParams) -> Result<EncodedDistribution> {
    let det = t.det();
    if det.is_zero() {
        return Err(Error::InvalidParameter(format!(
            "degenerate Mobius map ({}, {}, {}, {}): ps - qr = 0",
            t.p, t.q, t.r, t.s
        )));
    }
    let l = hub(d)?;
    let m = mzp("m");
    let z = mzp("z");
    let prz = &konst(&t.p) - &z.scale(&t.r);
    let pu = &(&(&m * &prz) - &konst(&t.r)) * &prz;
    let pv = &z.scale(&t.s) - &konst(&t.q);
    law(&l, &pu, &konst(&det), &pv, &prz, &[])
}

pub fn inverse(d: &EncodedDistribution) -> Result<EncodedDistribution> {
    mobius(d, &MobiusParams::inverse())
}

pub fn scale(d: &EncodedDistribution, a: &Rational) -> Result<EncodedDistribution> {
    mobius(d, &MobiusParams::scale(a.clone()))
}

pub fn shift(d: &EncodedDistribution, a: &Rational) -> Result<EncodedDistribution> {
    mobius(d, &MobiusParams::shift(a.clone()))
}

/// From the limit of `XX'` to that of `X'X`, where `c` is the ratio of the
/// dimension of `XX'` to that of `X'X`.
pub fn transpose_swap(d: &EncodedDistribution, c: &Rational) -> Result<EncodedDistribution> {
    positive("transpose ratio c", c)?;
    let l = hub(d)?;
    let pu = &mzp("z*m") - &konst(&(c - Rational::one()));
    let qu = mzp("z").scale(c);
    law(&l, &pu, &qu, &mzp("z"), &mzp("1"), &[])
}

/// `A^2`.
pub fn square(d: &EncodedDistribution) -> Result<EncodedDistribution> {
    let l = hub(d)?.relabel("m", "w");
    let mw = |s: &str| BiPoly::parse(s, "m", "w").unwrap();
    let one = mw("1");
    let l1 = l.substitute_raw(&mw("2*m*w"), &one, &mw("w"), &one)?;
    let l2 = l.substitute_raw(&mw("-2*m*w"), &one, &mw("-w"), &one)?;
    let sum = alg_add(&l1.canonicalize()?, &l2.canonicalize()?, Strategy::Auto)?;
    let halved = sum
        .halve_v_degrees()
        .ok_or_else(|| Error::Numeric("square: sum of branches is not even in sqrt(z)".into()))?;
    stieltjes_factor(&halved.relabel("m", "z"))
}

/// `diag(A, B)` where `A` takes the fraction `c` of the rows.
pub fn block_diag(a: &EncodedDistribution, b: &EncodedDistribution, c: &Rational) -> Result<EncodedDistribution> {
    if *c <= Rational::zero() || *c >= Rational::one() {
        return Err(Error::InvalidParameter(format!("block fraction must lie in (0, 1), got {c}")));
    }
    let (la, lb) = (hub(a)?, hub(b)?);
    let (m, z, one) = (mzp("m"), mzp("z"), mzp("1"));
    let ta = la.substitute_raw(&m, &konst(c), &z, &one)?.canonicalize()?;
    let tb = lb.substitute_raw(&m, &konst(&(Rational::one() - c)), &z, &one)?.canonicalize()?;
    stieltjes_factor(&alg_add(&ta, &tb, Strategy::Auto)?)
}

/// The upper-left block `B` of `A = diag(B, alpha I)`, where
/// `c = dim(A) / dim(B) >= 1`.
pub fn corner(d: &EncodedDistribution, c: &Rational, alpha: &Rational) -> Result<EncodedDistribution> {
    if *c < Rational::one() {
        return Err(Error::InvalidParameter(format!("corner ratio must be at least 1, got {c}")));
    }
    let l = hub(d)?;
    let az = &konst(alpha) - &mzp("z");
    let pu = &(&mzp("m") * &az) + &konst(&(c - Rational::one()));
    let qu = az.scale(c);
    law(&l, &pu, &qu, &mzp("z"), &mzp("1"), &[])
}

/// `A + G' T G` with `T` atomic and `G` Gaussian, `c` the ratio of the
/// dimension of `T` to that of `A`.
pub fn add_atomic_wishart(d: &EncodedDistribution, c: &Rational, t: &[(Rational, Rational)]) -> Result<EncodedDistribution> {
    positive("Wishart ratio c", c)?;
    check_atomic(t)?;
    let l = hub(d)?;
    // z - c sum p_i l_i / (1 + l_i m)
    let factors: Vec<BiPoly> = t.iter().map(|(_, lam)| &mzp("1") + &mzp("m").scale(lam)).collect();
    let den = factors.iter().fold(mzp("1"), |acc, f| &acc * f);
    let mut num = mzp("0");
    for (i, (p, lam)) in t.iter().enumerate() {
        let others = factors.iter().enumerate().filter(|&(j, _)| j != i).fold(mzp("1"), |acc, (_, f)| &acc * f);
        num = &num + &others.scale(&(p * lam * c));
    }
    let pv = &(&mzp("z") * &den) - &num;
    let spurious: Vec<&BiPoly> = factors.iter().collect();
    law(&l, &mzp("m"), &mzp("1"), &pv, &den, &spurious)
}

/// `A W(c)` for a Wishart matrix `W(c)` of ratio `c`.
pub fn multiply_wishart(d: &EncodedDistribution, c: &Rational) -> Result<EncodedDistribution> {
    positive("Wishart ratio c", c)?;
    let l = hub(d)?;
    let alpha = &konst(&(Rational::one() - c)) - &mzp("z*m").scale(c);
    let pu = &alpha * &mzp("m");
    law(&l, &pu, &mzp("1"), &mzp("z"), &alpha, &[&alpha])
}

/// `(A^(1/2) + sqrt(s) G)(A^(1/2) + sqrt(s) G)'`.
pub fn info_plus_noise(d: &EncodedDistribution, c: &Rational, s: &Rational) -> Result<EncodedDistribution> {
    positive("ratio c", c)?;
    if *s < Rational::zero() {
        return Err(Error::InvalidParameter(format!("noise variance must be non-negative, got {s}")));
    }
    let l = hub(d)?;
    let alpha = &mzp("1") + &mzp("m").scale(&(s * c));
    let pv = &(&(&alpha * &alpha) * &mzp("z")) + &alpha.scale(&(s * (c - Rational::one())));
    law(&l, &mzp("m"), &alpha, &pv, &mzp("1"), &[&alpha])
}

/// `A + Q B Q'` with `Q` Haar distributed.
pub fn free_add(a: &EncodedDistribution, b: &EncodedDistribution) -> Result<EncodedDistribution> {
    let ra = a.convert(Kind::Rg)?;
    let rb = b.convert(Kind::Rg)?;
    let sum = alg_add(ra.poly(), rb.poly(), Strategy::Auto)?;
    let back = EncodedDistribution::new(Kind::Rg, sum)?.convert(Kind::Mz)?;
    stieltjes_factor(back.poly())
}

/// `A Q B Q'` with `Q` Haar distributed.
pub fn free_mul(a: &EncodedDistribution, b: &EncodedDistribution) -> Result<EncodedDistribution> {
    let sa = a.convert(Kind::Sy)?;
    let sb = b.convert(Kind::Sy)?;
    let prod = alg_mul(sa.poly(), sb.poly(), Strategy::Auto)?;
    let back = EncodedDistribution::new(Kind::Sy, prod)?.convert(Kind::Mz)?;
    stieltjes_factor(back.poly())
}

/// Upper `cN x cN` block of `Q A Q'`.
pub fn compress(d: &EncodedDistribution, c: &Rational) -> Result<EncodedDistribution> {
    if *c <= Rational::zero() || *c > Rational::one() {
        return Err(Error::InvalidParameter(format!("compression factor must lie in (0, 1], got {c}")));
    }
    let rg = d.convert(Kind::Rg)?;
    let p = rg.poly();
    let x = |s: &str| BiPoly::parse(s, "r", "g").unwrap();
    let out = p.substitute_rational(&x("r"), &x("1"), &x("g").scale(c), &x("1"))?;
    EncodedDistribution::new(Kind::Rg, out)?.convert(Kind::Mz)
}

/// `A^(1/2) G B G' A^(1/2)` with `A` of size `n`, `B` of size `N`, `G` of size
/// `n x N` with entries of variance `1/N`, and `c = n / N`.
pub fn wishart_covariance(a: &EncodedDistribution, b: &EncodedDistribution, c: &Rational) -> Result<EncodedDistribution> {
    positive("ratio c", c)?;
    let inv_c = c.recip();
    let wide = scale(&multiply_wishart(b, &inv_c)?, c)?;
    let t = transpose_swap(&wide, &inv_c)?;
    free_mul(a, &t)
}

fn check_atomic(t: &[(Rational, Rational)]) -> Result<()> {
    crate::encodings::atomic(t).map(|_| ())
}

/// Among the irreducible factors of `l`, the one whose solution set contains
/// a Stieltjes transform, recognised by a root behaving like `-1/z` far up
/// the imaginary axis.
pub fn stieltjes_factor(l: &BiPoly) -> Result<EncodedDistribution> {
    let factors = irreducible_factors(l)?;
    let candidates: Vec<BiPoly> = factors.into_iter().filter(|f| f.deg_u().unwrap_or(0) >= 1).collect();
    if candidates.len() == 1 {
        return EncodedDistribution::mz(candidates.into_iter().next().unwrap());
    }
    let mut best: Option<(f64, BiPoly)> = None;
    for f in candidates {
        let s = tail_score(&f);
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, f));
        }
    }
    match best {
        Some((s, f)) if s < 0.1 => EncodedDistribution::mz(f),
        _ => Err(Error::NoAdmissibleBranch("no factor has a root behaving like -1/z".into())),
    }
}

/// `min |z m + 1|` over the roots `m` at a point far up the imaginary axis.
fn tail_score(f: &BiPoly) -> f64 {
    let z = Complex64::new(0.37, 1e4);
    match f.eval_slice(z) {
        Ok(slice) => aberth(&slice.coeffs, None)
            .into_iter()
            .map(|m| (z * m + 1.0).norm())
            .fold(f64::INFINITY, f64::min),
        Err(_) => f64::INFINITY,
    }
}
