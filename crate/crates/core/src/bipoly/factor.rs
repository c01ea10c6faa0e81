//! Factorization into irreducibles over the rationals.
//!
//! Univariate: Berlekamp modulo a small prime, Hensel lifting, subset
//! recombination. Bivariate: specialize `v`, factor, lift `t = v - v0` adically,
//! recombine by trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BiPoly, Rational, UniPoly};
use crate::error::Result;

type Fp = Vec<u64>;

fn trim(a: &mut Fp) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_mul(a: &Fp, b: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    trim(&mut r);
    r
}

fn fp_sub(a: &Fp, b: &Fp, p: u64) -> Fp {
    let n = a.len().max(b.len());
    let mut r: Fp = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut r);
    r
}

fn fp_inv(a: u64, p: u64) -> u64 {
    fp_pow(a, p - 2, p)
}

fn fp_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

fn fp_divrem(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let db = b.len() - 1;
    if a.len() < b.len() {
        return (Vec::new(), a.clone());
    }
    let inv = fp_inv(b[db], p);
    let mut r = a.clone();
    let mut q = vec![0u64; a.len() - db];
    for i in (db..a.len()).rev() {
        let f = r[i] * inv % p;
        if f == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            r[i - db + j] = (r[i - db + j] + p - f * bj % p) % p;
        }
        q[i - db] = f;
    }
    r.truncate(db);
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

fn fp_monic(a: &Fp, p: u64) -> Fp {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let inv = fp_inv(l, p);
            a.iter().map(|x| x * inv % p).collect()
        }
    }
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = fp_divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    fp_monic(&a, p)
}

/// `s*a + t*b = 1 (mod p)` for coprime `a`, `b`.
fn fp_bezout(a: &Fp, b: &Fp, p: u64) -> (Fp, Fp) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (Fp, Fp) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Fp, Fp) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let inv = fp_inv(r0[0], p);
    let sc = |v: &Fp| -> Fp { v.iter().map(|x| x * inv % p).collect() };
    (sc(&s0), sc(&t0))
}

fn fp_from(f: &[BigInt], p: u64) -> Fp {
    let pb = BigInt::from(p);
    let mut r: Fp = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    trim(&mut r);
    r
}

fn fp_derivative(a: &Fp, p: u64) -> Fp {
    let mut r: Fp = a.iter().enumerate().skip(1).map(|(k, c)| (k as u64 % p) * c % p).collect();
    trim(&mut r);
    r
}

/// Distinct monic irreducible factors of a monic square-free `f` modulo `p`.
fn berlekamp(f: &Fp, p: u64) -> Vec<Fp> {
    let n = f.len() - 1;
    if n <= 1 {
        return vec![f.clone()];
    }
    // q[i] = x^(i p) mod f
    let xp = {
        let mut base: Fp = vec![0, 1];
        let mut r: Fp = vec![1];
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                r = fp_divrem(&fp_mul(&r, &base, p), f, p).1;
            }
            base = fp_divrem(&fp_mul(&base, &base, p), f, p).1;
            e >>= 1;
        }
        r
    };
    let mut q: Vec<Fp> = vec![vec![1]];
    for i in 1..n {
        q.push(fp_divrem(&fp_mul(&q[i - 1], &xp, p), f, p).1);
    }
    // Solve (Q^T - I) g = 0.
    let mut m = vec![vec![0u64; n]; n];
    for (i, qi) in q.iter().enumerate() {
        for j in 0..n {
            m[j][i] = qi.get(j).copied().unwrap_or(0);
        }
        m[i][i] = (m[i][i] + p - 1) % p;
    }
    let basis = nullspace_mod_p(m, p);
    let r = basis.len();
    let mut factors = vec![f.clone()];
    for v in &basis {
        if factors.len() == r {
            break;
        }
        let mut v = v.clone();
        trim(&mut v);
        if v.len() <= 1 {
            continue;
        }
        let mut next = Vec::new();
        for h in factors {
            if h.len() <= 2 {
                next.push(h);
                continue;
            }
            let mut pieces = vec![h];
            for s in 0..p {
                let mut vs = v.clone();
                vs[0] = (vs[0] + p - s) % p;
                let mut split = Vec::new();
                for piece in pieces {
                    let g = fp_gcd(&piece, &vs, p);
                    if g.len() > 1 && g.len() < piece.len() {
                        let other = fp_divrem(&piece, &g, p).0;
                        split.push(g);
                        split.push(fp_monic(&other, p));
                    } else {
                        split.push(piece);
                    }
                }
                pieces = split;
            }
            next.extend(pieces);
        }
        factors = next;
    }
    factors
}

fn nullspace_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let rows = m.len();
    let cols = m[0].len();
    let mut pivot_col = vec![usize::MAX; rows];
    let mut is_pivot = vec![false; cols];
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, pr);
        let inv = fp_inv(m[r][c], p);
        for x in m[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p - f * m[r][j] % p) % p;
                }
            }
        }
        pivot_col[r] = c;
        is_pivot[c] = true;
        r += 1;
        if r == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for i in 0..r {
            v[pivot_col[i]] = (p - m[i][free]) % p;
        }
        basis.push(v);
    }
    basis
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    a.iter().map(|c| c.mod_floor(m)).collect()
}

fn fp_to_z(a: &Fp) -> Vec<BigInt> {
    a.iter().map(|&x| BigInt::from(x)).collect()
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.mod_floor(m).extended_gcd(m);
    e.x.mod_floor(m)
}

/// Lift `f = g0 h0 (mod p)` with `h0` monic to `f = G H (mod p^k)`.
fn hensel_two(f: &[BigInt], g0: &Fp, h0: &Fp, p: u64, k: u32) -> (Vec<BigInt>, Vec<BigInt>) {
    let pb = BigInt::from(p);
    let pk = pb.pow(k);
    let (s, _t) = fp_bezout(g0, h0, p);
    let mut g = fp_to_z(g0);
    let lead = f.last().unwrap().mod_floor(&pk);
    *g.last_mut().unwrap() = lead;
    let mut h = fp_to_z(h0);
    let mut pj = pb.clone();
    for _ in 1..k {
        let pj1 = &pj * &pb;
        let prod = zmul(&g, &h);
        let n = f.len().max(prod.len());
        let diff: Vec<BigInt> = (0..n)
            .map(|i| {
                let a = f.get(i).cloned().unwrap_or_default();
                let b = prod.get(i).cloned().unwrap_or_default();
                (a - b).mod_floor(&pj1) / &pj
            })
            .collect();
        let e = fp_from(&diff, p);
        if !e.is_empty() {
            let r = fp_divrem(&fp_mul(&s, &e, p), h0, p).1;
            let rest = fp_sub(&e, &fp_mul(g0, &r, p), p);
            let (dg, rem) = fp_divrem(&rest, h0, p);
            debug_assert!(rem.is_empty());
            for (i, c) in dg.iter().enumerate() {
                if i >= g.len() {
                    g.push(BigInt::zero());
                }
                g[i] = (&g[i] + &pj * BigInt::from(*c)).mod_floor(&pk);
            }
            for (i, c) in r.iter().enumerate() {
                h[i] = (&h[i] + &pj * BigInt::from(*c)).mod_floor(&pk);
            }
        }
        pj = pj1;
    }
    (zmod(&g, &pk), zmod(&h, &pk))
}

fn hensel_multi(f: &[BigInt], facs: &[Fp], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let pk = BigInt::from(p).pow(k);
    let lc = f.last().unwrap().clone();
    if facs.len() == 1 {
        let inv = mod_inverse(&lc, &pk);
        return vec![f.iter().map(|c| (c * &inv).mod_floor(&pk)).collect()];
    }
    let lcp = lc.mod_floor(&BigInt::from(p)).to_u64().unwrap();
    let g0: Fp = facs[0].iter().map(|x| x * lcp % p).collect();
    let mut h0: Fp = vec![1];
    for q in &facs[1..] {
        h0 = fp_mul(&h0, q, p);
    }
    let (g, h) = hensel_two(f, &g0, &h0, p, k);
    let inv = mod_inverse(&lc, &pk);
    let mut out = vec![g.iter().map(|c| (c * &inv).mod_floor(&pk)).collect::<Vec<_>>()];
    out.extend(hensel_multi(&h, &facs[1..], p, k));
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let c = c.mod_floor(m);
            if c > half {
                c - m
            } else {
                c
            }
        })
        .collect()
}

fn to_uni(a: &[BigInt]) -> UniPoly {
    UniPoly::new(a.iter().map(|c| Rational::from_integer(c.clone())).collect())
}

const PRIMES: [u64; 40] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107,
    109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179,
];

/// Irreducible factors over the rationals of a square-free univariate polynomial,
/// each primitive with positive leading coefficient.
pub fn factor_univariate(f: &UniPoly) -> Vec<UniPoly> {
    let f = f.primitive();
    let n = match f.degree() {
        Some(d) if d >= 2 => d,
        Some(1) => return vec![f],
        _ => return Vec::new(),
    };
    let fz = f.integer_coeffs();
    let lc = fz[n].clone();
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for &p in PRIMES.iter() {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = fp_from(&fz, p);
        if fp_gcd(&fp, &fp_derivative(&fp, p), p).len() != 1 {
            continue;
        }
        let facs = berlekamp(&fp_monic(&fp, p), p);
        if facs.len() == 1 {
            return vec![f];
        }
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 4 {
            break;
        }
    }
    let Some((p, facs)) = best else {
        return vec![f];
    };
    // Coefficient bound for any factor times the leading coefficient.
    let norm2: f64 = fz.iter().map(|c| c.to_f64().unwrap_or(f64::MAX).powi(2)).sum::<f64>().sqrt();
    let bits = (norm2.log2() + n as f64 + lc.abs().to_f64().unwrap_or(f64::MAX).log2() + 2.0).ceil();
    let k = ((bits / (p as f64).log2()).ceil() as u32).max(1);
    let pk = BigInt::from(p).pow(k);
    let lifted = hensel_multi(&fz, &facs, p, k);

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut cur = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in combinations(&remaining, size) {
            let lcc = cur.integer_coeffs().last().unwrap().clone();
            let mut prod = vec![lcc];
            for &i in &subset {
                prod = zmod(&zmul(&prod, &lifted[i]), &pk);
            }
            let cand = to_uni(&symmetric(&prod, &pk)).primitive();
            if let Some(q) = cur.div_exact(&cand) {
                out.push(cand);
                cur = q.primitive();
                remaining.retain(|i| !subset.contains(i));
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if cur.degree().unwrap_or(0) >= 1 {
        out.push(cur.primitive());
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn go(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Truncated power series in `t` with coefficients in `Q[u]`.
type Series = Vec<UniPoly>;

fn series_mul(a: &Series, b: &Series, order: usize) -> Series {
    let mut r = vec![UniPoly::zero(); order];
    for (i, x) in a.iter().enumerate().take(order) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order - i) {
            if !y.is_zero() {
                r[i + j] = &r[i + j] + &(x * y);
            }
        }
    }
    r
}

/// Rows in `u` of `L(u, t + v0)` rearranged as a series in `t`.
fn to_series(l: &BiPoly) -> Series {
    let dv = l.deg_v().unwrap_or(0);
    (0..=dv).map(|k| UniPoly::new(l.rows().iter().map(|r| r.coeff(k)).collect())).collect()
}

/// Inverse of a power series in `t` with rational coefficients.
fn scalar_series_inv(a: &[Rational], order: usize) -> Vec<Rational> {
    let mut inv = vec![Rational::zero(); order];
    inv[0] = a[0].recip();
    for n in 1..order {
        let mut s = Rational::zero();
        for k in 1..=n.min(a.len() - 1) {
            s += &a[k] * &inv[n - k];
        }
        inv[n] = -s * &inv[0];
    }
    inv
}

/// Irreducible factors over the rationals of a bivariate polynomial, each
/// canonical. The input is canonicalized first, so repeated factors and
/// factors free of `u` are dropped.
pub fn irreducible_factors(l: &BiPoly) -> Result<Vec<BiPoly>> {
    let l = l.canonicalize()?;
    let du = l.deg_u().unwrap_or(0);
    if du <= 1 {
        return Ok(vec![l]);
    }
    let lc = l.leading_coeff_u();
    let mut choice: Option<(Rational, Vec<UniPoly>)> = None;
    for step in 0..40i64 {
        let v0 = Rational::from_integer(BigInt::from(if step % 2 == 0 { step / 2 } else { -(step + 1) / 2 }));
        if lc.eval(&v0).is_zero() {
            continue;
        }
        let f0 = l.eval_v(&v0);
        if UniPoly::gcd(&f0, &f0.derivative()).degree() != Some(0) {
            continue;
        }
        let facs = factor_univariate(&f0);
        if facs.len() == 1 {
            return Ok(vec![l]);
        }
        if choice.as_ref().is_none_or(|(_, c)| facs.len() < c.len()) {
            choice = Some((v0, facs));
        }
        if step >= 6 {
            break;
        }
    }
    let Some((v0, facs)) = choice else {
        return Ok(vec![l]);
    };
    let shifted = l.map_rows(|r| r.shift(&v0));
    let order = shifted.deg_v().unwrap_or(0) + 1;

    // Monic target M = L / lc(t) modulo t^order.
    let lc_t: Vec<Rational> = (0..order).map(|k| shifted.leading_coeff_u().coeff(k)).collect();
    let lc_inv = scalar_series_inv(&lc_t, order);
    let l_series = to_series(&shifted);
    let lc_inv_series: Series = lc_inv.iter().map(|c| UniPoly::constant(c.clone())).collect();
    let target = series_mul(&l_series, &lc_inv_series, order);

    let g0: Vec<UniPoly> = facs.iter().map(|f| f.monic()).collect();
    let mut prod0 = UniPoly::one();
    for g in &g0 {
        prod0 = &prod0 * g;
    }
    let bez: Vec<UniPoly> = g0
        .iter()
        .map(|g| {
            let cof = prod0.div_exact(g).unwrap();
            uni_inverse_mod(&cof, g)
        })
        .collect();
    let mut lifted: Vec<Series> = g0.iter().map(|g| vec![g.clone()]).collect();
    for k in 1..order {
        let mut prod: Series = vec![UniPoly::one()];
        for g in &lifted {
            prod = series_mul(&prod, g, k + 1);
        }
        let e = &target.get(k).cloned().unwrap_or_default() - &prod.get(k).cloned().unwrap_or_default();
        if e.is_zero() {
            continue;
        }
        for (i, g) in lifted.iter_mut().enumerate() {
            let d = (&e * &bez[i]).rem(&g0[i]);
            g.resize(k + 1, UniPoly::zero());
            g[k] = d;
        }
    }

    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut cur = shifted.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let mut found = false;
        for subset in combinations(&remaining, size) {
            let lcc = cur.leading_coeff_u();
            let mut prod: Series = vec![UniPoly::constant(Rational::one())];
            for &i in &subset {
                prod = series_mul(&prod, &lifted[i], order);
            }
            let lc_series: Series = (0..order).map(|k| UniPoly::constant(lcc.coeff(k))).collect();
            prod = series_mul(&prod, &lc_series, order);
            let du_c = prod.iter().filter_map(|c| c.degree()).max().unwrap_or(0);
            let rows: Vec<UniPoly> =
                (0..=du_c).map(|j| UniPoly::new(prod.iter().map(|c| c.coeff(j)).collect())).collect();
            let cand = cur.from_rows(rows).primitive_u();
            if cand.deg_u().unwrap_or(0) == 0 {
                continue;
            }
            if let Some(q) = cur.div_exact(&cand) {
                out.push(cand);
                cur = q;
                remaining.retain(|i| !subset.contains(i));
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if cur.deg_u().unwrap_or(0) >= 1 {
        out.push(cur);
    }
    let back = -v0;
    out.into_iter().map(|f| f.map_rows(|r| r.shift(&back)).canonicalize()).collect()
}

/// `a^{-1} mod m` for coprime univariate polynomials.
fn uni_inverse_mod(a: &UniPoly, m: &UniPoly) -> UniPoly {
    let (mut r0, mut r1) = (m.clone(), a.rem(m));
    let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let t2 = &t0 - &(&q * &t1);
        r0 = std::mem::replace(&mut r1, r);
        t0 = std::mem::replace(&mut t1, t2);
    }
    let c = r0.coeff(0).recip();
    t0.scale(&c).rem(m)
}
