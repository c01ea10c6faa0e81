//! Monte Carlo realizations of matrix expressions, their eigenvalue
//! histograms, and distances to a symbolic density profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bipoly::{rat_to_f64, Rational};
use crate::density::DensityProfile;
use crate::dsl::Expr;
use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Mat {
        Mat { rows, cols, a: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Mat {
        Mat::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Mat {
        let mut m = Mat::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = *x;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let cols = rows.first().map_or(0, Vec::len);
        Mat { rows: rows.len(), cols, a: rows.concat() }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let mut c = Mat::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            let out = &mut c.a[i * o.cols..(i + 1) * o.cols];
            for k in 0..self.cols {
                let x = self.a[i * self.cols + k];
                if x == 0.0 {
                    continue;
                }
                for (o_ij, b) in out.iter_mut().zip(&o.a[k * o.cols..(k + 1) * o.cols]) {
                    *o_ij += x * b;
                }
            }
        }
        c
    }

    /// `self * self'`.
    pub fn gram(&self) -> Mat {
        let n = self.rows;
        let mut g = Mat::zeros(n, n);
        for i in 0..n {
            let ri = &self.a[i * self.cols..(i + 1) * self.cols];
            for j in 0..=i {
                let rj = &self.a[j * self.cols..(j + 1) * self.cols];
                let s: f64 = ri.iter().zip(rj).map(|(x, y)| x * y).sum();
                g[(i, j)] = s;
                g[(j, i)] = s;
            }
        }
        g
    }

    pub fn scale(&self, s: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        Mat { rows: self.rows, cols: self.cols, a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect() }
    }

    pub fn add_diag(&self, d: &[f64]) -> Mat {
        let mut m = self.clone();
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] += x;
        }
        m
    }

    /// `diag(l) * self * diag(r)`.
    pub fn scale_rows_cols(&self, l: &[f64], r: &[f64]) -> Mat {
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] *= l[i] * r[j];
            }
        }
        m
    }

    pub fn scale_cols(&self, r: &[f64]) -> Mat {
        self.scale_rows_cols(&vec![1.0; self.rows], r)
    }

    pub fn block(&self, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            m.a[i * cols..(i + 1) * cols].copy_from_slice(&self.a[i * self.cols..i * self.cols + cols]);
        }
        m
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn norm_fro(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let s = tol * (1.0 + self.norm_fro());
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= s))
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.a[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.a[i * self.cols + j]
    }
}

/// Householder reduction to tridiagonal form, lower triangle only; returns
/// the diagonal and the subdiagonal (`e[0] = 0`).
fn tridiagonalize(mut a: Mat) -> (Vec<f64>, Vec<f64>) {
    let n = a.rows;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[(i, k)] /= scale;
                h += a[(i, k)] * a[(i, k)];
            }
            let f = a[(i, l)];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[(i, l)] = f - g;
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[(j, k)] * a[(i, k)];
                }
                for k in j + 1..=l {
                    g += a[(k, j)] * a[(i, k)];
                }
                e[j] = g / h;
                f += e[j] * a[(i, j)];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[(i, j)];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[(j, k)] -= f * e[k] + g * a[(i, k)];
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[(i, i)];
    }
    (d, e)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
fn tridiagonal_ql(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Numeric("QL iteration did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn eigenvalues_sym(m: &Mat) -> Result<Vec<f64>> {
    if m.rows != m.cols {
        return Err(Error::Sampling(format!("{}x{} matrix is not square", m.rows, m.cols)));
    }
    if !m.is_symmetric(1e-12) {
        return Err(Error::Sampling("matrix is not symmetric".into()));
    }
    let (d, e) = tridiagonalize(m.clone());
    let mut ev = tridiagonal_ql(d, e)?;
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numeric("non-finite eigenvalue".into()));
    }
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Householder QR of an `m x k` matrix with `m >= k`: the `k x k` factor `R`
/// and, if asked, the thin `Q` with orthonormal columns.
pub fn qr(a: &Mat, want_q: bool) -> (Mat, Option<Mat>) {
    let (m, k) = (a.rows, a.cols);
    assert!(m >= k);
    let mut w: Vec<Vec<f64>> = (0..k).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    let mut vs: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let norm = w[j][j..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = if w[j][j] >= 0.0 { -norm } else { norm };
        let mut v = w[j][j..].to_vec();
        v[0] -= alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if vn > 0.0 {
            v.iter_mut().for_each(|x| *x /= vn);
            for col in w[j..].iter_mut() {
                reflect(&v, &mut col[j..]);
            }
        }
        vs.push(v);
    }
    let mut r = Mat::zeros(k, k);
    for (j, col) in w.iter().enumerate() {
        for i in 0..=j {
            r[(i, j)] = col[i];
        }
    }
    let q = want_q.then(|| {
        let mut cols: Vec<Vec<f64>> = (0..k)
            .map(|c| {
                let mut e = vec![0.0; m];
                e[c] = 1.0;
                e
            })
            .collect();
        for (j, v) in vs.iter().enumerate().rev() {
            for col in cols.iter_mut() {
                reflect(v, &mut col[j..]);
            }
        }
        let mut q = Mat::zeros(m, k);
        for (c, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                q[(i, c)] = *x;
            }
        }
        q
    });
    (r, q)
}

/// `x -= 2 v (v . x)` for a unit `v`.
fn reflect(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    if dot != 0.0 {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi -= 2.0 * vi * dot;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Entries {
    /// Standard normal entries.
    #[default]
    Normal,
    /// Random signs.
    Sign,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub entries: Entries,
}

pub struct Sampler {
    rng: ChaCha8Rng,
    opts: Options,
}

impl Sampler {
    /// Stream `trial` of the generator seeded by `seed`.
    pub fn new(seed: u64, trial: u64, opts: Options) -> Sampler {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        Sampler { rng, opts }
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn entry(&mut self) -> f64 {
        match self.opts.entries {
            Entries::Normal => self.normal(),
            Entries::Sign => {
                if self.rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    pub fn gaussian(&mut self, rows: usize, cols: usize) -> Mat {
        let mut m = Mat::zeros(rows, cols);
        for x in m.a.iter_mut() {
            *x = self.entry();
        }
        m
    }

    /// `n x k` matrix with Haar-distributed orthonormal columns.
    pub fn haar_frame(&mut self, n: usize, k: usize) -> Mat {
        let mut g = Mat::zeros(n, k);
        for x in g.a.iter_mut() {
            *x = self.normal();
        }
        let (r, q) = qr(&g, true);
        let signs: Vec<f64> = (0..k).map(|i| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }).collect();
        q.unwrap().scale_cols(&signs)
    }

    /// `Q diag(d) Q'` with `Q` Haar orthogonal.
    pub fn haar_conjugate(&mut self, d: &[f64]) -> Mat {
        let q = self.haar_frame(d.len(), d.len());
        q.scale_cols(d).mul(&q.transpose())
    }
}

/// A realization of one node. `mat` or `factor` (with `mat = F F'`) is an
/// actual matrix; a draw is `free` when that matrix is orthogonally invariant
/// in distribution, so it can be combined with any independent partner as is.
#[derive(Clone, Debug)]
struct Draw {
    n: usize,
    eig: Option<Vec<f64>>,
    mat: Option<Mat>,
    factor: Option<Mat>,
    invariant: bool,
    scalar: Option<f64>,
}

impl Draw {
    fn spectrum(n: usize, eig: Vec<f64>, invariant: bool) -> Draw {
        Draw { n, eig: Some(eig), mat: None, factor: None, invariant, scalar: None }
    }

    fn matrix(m: Mat, invariant: bool) -> Draw {
        Draw { n: m.rows, eig: None, mat: Some(m), factor: None, invariant, scalar: None }
    }

    fn scalar(n: usize, s: f64) -> Draw {
        Draw { n, eig: Some(vec![s; n]), mat: None, factor: None, invariant: true, scalar: Some(s) }
    }

    fn free(&self) -> bool {
        self.invariant && (self.mat.is_some() || self.factor.is_some() || self.scalar.is_some())
    }

    fn eig(&mut self) -> Result<&[f64]> {
        if self.eig.is_none() {
            let e = if let Some(m) = &self.mat {
                eigenvalues_sym(m)?
            } else if let Some(f) = &self.factor {
                if f.cols < f.rows {
                    let mut e = eigenvalues_sym(&f.transpose().gram())?;
                    e.resize(f.rows, 0.0);
                    e.sort_by(f64::total_cmp);
                    e
                } else {
                    eigenvalues_sym(&f.gram())?
                }
            } else {
                return Err(Error::Sampling("draw has no realization".into()));
            };
            self.eig = Some(e);
        }
        Ok(self.eig.as_deref().unwrap())
    }

    fn mat(&mut self) -> Result<Mat> {
        if let Some(m) = &self.mat {
            return Ok(m.clone());
        }
        if let Some(f) = &self.factor {
            let m = f.gram();
            self.mat = Some(m.clone());
            return Ok(m);
        }
        Ok(Mat::diag(self.eig()?))
    }

    fn psd(&mut self) -> Result<bool> {
        if self.factor.is_some() {
            return Ok(true);
        }
        let e = self.eig()?;
        let top = e.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        Ok(e.iter().all(|x| *x >= -1e-10 * (1.0 + top)))
    }

    fn sqrt_eig(&mut self) -> Result<Vec<f64>> {
        Ok(self.eig()?.iter().map(|x| x.max(0.0).sqrt()).collect())
    }

    fn map_spectrum(mut self, f: impl Fn(f64) -> f64) -> Result<Draw> {
        let e: Vec<f64> = self.eig()?.iter().map(|x| f(*x)).collect();
        if e.iter().any(|x| !x.is_finite()) {
            return Err(Error::Sampling("spectral map hit a pole".into()));
        }
        let s = self.scalar.map(&f);
        Ok(Draw { n: self.n, eig: Some(e), mat: None, factor: None, invariant: self.invariant, scalar: s })
    }

    fn affine(mut self, a: f64, b: f64) -> Result<Draw> {
        if let Some(s) = self.scalar {
            return Ok(Draw::scalar(self.n, a * s + b));
        }
        let mat = match (&self.mat, &self.factor) {
            (Some(m), _) => Some(m.scale(a).add_diag(&vec![b; self.n])),
            (None, Some(f)) if b == 0.0 && a > 0.0 => {
                self.factor = Some(f.scale(a.sqrt()));
                None
            }
            _ => None,
        };
        let eig = self.eig.take().map(|e| e.iter().map(|x| a * x + b).collect::<Vec<f64>>());
        let factor = if b == 0.0 && a > 0.0 { self.factor.take() } else { None };
        let mut out = Draw { n: self.n, eig, mat, factor, invariant: self.invariant, scalar: None };
        if a < 0.0 {
            if let Some(e) = out.eig.as_mut() {
                e.reverse();
            }
        }
        if out.eig.is_none() && out.mat.is_none() && out.factor.is_none() {
            return Err(Error::Sampling("affine map lost the realization".into()));
        }
        Ok(out)
    }
}

fn dims(n: usize, ratio: f64, what: &str) -> Result<usize> {
    let k = (n as f64 * ratio).round();
    if !(k >= 1.0) || !k.is_finite() {
        return Err(Error::Sampling(format!("{what}: dimension {n} x {ratio} rounds to zero")));
    }
    Ok(k as usize)
}

fn atom_counts(t: &[(Rational, Rational)], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    for (k, (p, l)) in t.iter().enumerate() {
        acc += rat_to_f64(p);
        let upto = if k + 1 == t.len() { n } else { ((acc * n as f64).round() as usize).min(n) };
        let lam = rat_to_f64(l);
        while out.len() < upto {
            out.push(lam);
        }
    }
    out
}

/// Drops the `k` eigenvalues closest to `at`.
fn drop_nearest(mut e: Vec<f64>, at: f64, k: usize) -> Vec<f64> {
    for _ in 0..k {
        let i = (0..e.len()).min_by(|&i, &j| (e[i] - at).abs().total_cmp(&(e[j] - at).abs())).unwrap();
        e.remove(i);
    }
    e
}

fn f(q: &Rational) -> f64 {
    rat_to_f64(q)
}

impl Sampler {
    fn wishart_factor(&mut self, n: usize, c: f64) -> Result<Mat> {
        let l = dims(n, 1.0 / c, "wishart")?;
        Ok(self.gaussian(n, l).scale(1.0 / (l as f64).sqrt()))
    }

    fn add(&mut self, mut a: Draw, mut b: Draw) -> Result<Draw> {
        if a.n != b.n {
            return Err(Error::Sampling(format!("dimension mismatch {} vs {}", a.n, b.n)));
        }
        if let Some(s) = a.scalar {
            return b.affine(1.0, s);
        }
        if let Some(s) = b.scalar {
            return a.affine(1.0, s);
        }
        let invariant = a.invariant && b.invariant;
        let m = if a.free() || b.free() {
            if a.mat.is_some() || a.factor.is_some() {
                if b.mat.is_some() || b.factor.is_some() {
                    return Ok(Draw::matrix(a.mat()?.add(&b.mat()?), invariant));
                }
                a.mat()?.add_diag(b.eig()?)
            } else {
                b.mat()?.add_diag(a.eig()?)
            }
        } else {
            let rot = self.haar_conjugate(b.eig()?);
            rot.add_diag(a.eig()?)
        };
        Ok(Draw::spectrum(a.n, eigenvalues_sym(&m)?, invariant))
    }

    fn mul(&mut self, mut a: Draw, mut b: Draw) -> Result<Draw> {
        if a.n != b.n {
            return Err(Error::Sampling(format!("dimension mismatch {} vs {}", a.n, b.n)));
        }
        if let Some(s) = a.scalar {
            return b.affine(s, 0.0);
        }
        if let Some(s) = b.scalar {
            return a.affine(s, 0.0);
        }
        let n = a.n;
        let invariant = a.invariant && b.invariant;
        // D^{1/2} X D^{1/2} with D a psd spectrum and X a free partner.
        for swap in [false, true] {
            let (p, x) = if swap { (&mut b, &mut a) } else { (&mut a, &mut b) };
            if x.free() && p.psd()? {
                let s = p.sqrt_eig()?;
                let m = x.mat()?.scale_rows_cols(&s, &s);
                return Ok(Draw::spectrum(n, eigenvalues_sym(&m)?, invariant));
            }
        }
        // F' X F with F a factor of a free psd partner.
        for swap in [false, true] {
            let (p, x) = if swap { (&mut b, &mut a) } else { (&mut a, &mut b) };
            if p.free() && p.psd()? {
                let fac = match &p.factor {
                    Some(fm) => fm.clone(),
                    None => Mat::diag(&p.sqrt_eig()?),
                };
                let xm = x.mat()?;
                return Ok(Draw::spectrum(n, factor_product(&xm, &fac)?, invariant));
            }
        }
        // Neither is free: conjugate the psd side by a Haar matrix.
        for swap in [false, true] {
            let (p, x) = if swap { (&mut b, &mut a) } else { (&mut a, &mut b) };
            if p.psd()? {
                let s = p.sqrt_eig()?;
                let fac = self.haar_frame(n, n).scale_cols(&s);
                let xm = Mat::diag(x.eig()?);
                return Ok(Draw::spectrum(n, factor_product(&xm, &fac)?, invariant));
            }
        }
        Err(Error::Sampling("product needs a positive semidefinite factor".into()))
    }

    fn draw(&mut self, e: &Expr, n: usize) -> Result<Draw> {
        use Expr::*;
        Ok(match e {
            Identity => Draw::scalar(n, 1.0),
            Atomic(t) => {
                if t.len() == 1 {
                    Draw::scalar(n, f(&t[0].1))
                } else {
                    Draw::spectrum(n, atom_counts(t, n), false)
                }
            }
            Wigner => {
                let g = self.gaussian(n, n);
                let m = g.add(&g.transpose()).scale(1.0 / (2.0 * n as f64).sqrt());
                Draw::matrix(m, self.opts.entries == Entries::Normal)
            }
            Wishart(c) => {
                let fac = self.wishart_factor(n, f(c))?;
                Draw { n, eig: None, mat: None, factor: Some(fac), invariant: self.opts.entries == Entries::Normal, scalar: None }
            }
            Mobius(a, t) => {
                let (p, q, r, s) = (f(&t.p), f(&t.q), f(&t.r), f(&t.s));
                let d = self.draw(a, n)?;
                if r == 0.0 {
                    d.affine(p / s, q / s)?
                } else {
                    d.map_spectrum(|x| (p * x + q) / (r * x + s))?
                }
            }
            Inv(a) => self.draw(a, n)?.map_spectrum(|x| 1.0 / x)?,
            Scale(a, s) => self.draw(a, n)?.affine(f(s), 0.0)?,
            Shift(a, s) => self.draw(a, n)?.affine(1.0, f(s))?,
            Square(a) => self.draw(a, n)?.map_spectrum(|x| x * x)?,
            BlockDiag(a, b, c) => {
                let n1 = dims(n, f(c), "blockdiag")?;
                if n1 >= n {
                    return Err(Error::Sampling(format!("blockdiag: dimension {n} too small for ratio {c}")));
                }
                let mut e = self.draw(a, n1)?.eig()?.to_vec();
                e.extend(self.draw(b, n - n1)?.eig()?);
                Draw::spectrum(n, e, false)
            }
            Corner(a, c, al) => {
                let m = dims(n, f(c), "corner")?;
                if m < n {
                    return Err(Error::Sampling("corner: ratio below one".into()));
                }
                let e = self.draw(a, m)?.eig()?.to_vec();
                Draw::spectrum(n, drop_nearest(e, f(al), m - n), false)
            }
            TransposeSwap(a, c) => {
                let k = dims(n, f(c), "transposeswap")?;
                let mut e = self.draw(a, k)?.eig()?.to_vec();
                if k < n {
                    e.resize(n, 0.0);
                } else {
                    e = drop_nearest(e, 0.0, k - n);
                }
                Draw::spectrum(n, e, false)
            }
            AddAtomicWishart(a, c, t) => {
                let k = dims(n, f(c), "addatomicwishart")?;
                let tv = atom_counts(t, k);
                let g = self.gaussian(k, n).scale(1.0 / (n as f64).sqrt());
                let gt = g.transpose();
                let m = gt.scale_cols(&tv).mul(&g);
                let w = Draw::matrix(m, self.opts.entries == Entries::Normal);
                let base = self.draw(a, n)?;
                self.add(base, w)?
            }
            MulWishart(a, c) => {
                let fac = self.wishart_factor(n, f(c))?;
                let w = Draw { n, eig: None, mat: None, factor: Some(fac), invariant: self.opts.entries == Entries::Normal, scalar: None };
                let base = self.draw(a, n)?;
                self.mul(base, w)?
            }
            InfoPlusNoise(a, c, s) => {
                let cf = f(c);
                if cf > 1.0 {
                    return Err(Error::Sampling("infoplusnoise sampling needs c <= 1".into()));
                }
                let l = dims(n, 1.0 / cf, "infoplusnoise")?;
                let mut base = self.draw(a, n)?;
                if !base.psd()? {
                    return Err(Error::Sampling("infoplusnoise needs a positive semidefinite signal".into()));
                }
                let root = base.sqrt_eig()?;
                let mut x = self.gaussian(n, l).scale((f(s) / l as f64).sqrt());
                for (i, r) in root.iter().enumerate() {
                    x[(i, i)] += r;
                }
                Draw::spectrum(n, eigenvalues_sym(&x.gram())?, false)
            }
            FreeAdd(a, b) => {
                let (x, y) = (self.draw(a, n)?, self.draw(b, n)?);
                self.add(x, y)?
            }
            FreeMul(a, b) => {
                let (x, y) = (self.draw(a, n)?, self.draw(b, n)?);
                self.mul(x, y)?
            }
            Compress(a, c) => {
                let m = dims(n, 1.0 / f(c), "compress")?;
                if m < n {
                    return Err(Error::Sampling("compress: ratio above one".into()));
                }
                let mut d = self.draw(a, m)?;
                if let Some(s) = d.scalar {
                    Draw::scalar(n, s)
                } else if d.free() {
                    if let Some(fac) = &d.factor {
                        let top = fac.block(n, fac.cols);
                        Draw { n, eig: None, mat: None, factor: Some(top), invariant: true, scalar: None }
                    } else {
                        Draw::matrix(d.mat()?.block(n, n), true)
                    }
                } else {
                    let h = self.haar_frame(m, n);
                    let m2 = h.transpose().scale_cols(d.eig()?).mul(&h);
                    Draw::matrix(m2, true)
                }
            }
            WishartCov(a, b, c) => {
                let l = dims(n, 1.0 / f(c), "wishartcov")?;
                let mut da = self.draw(a, n)?;
                let mut db = self.draw(b, l)?;
                if !da.psd()? || !db.psd()? {
                    return Err(Error::Sampling("wishartcov needs positive semidefinite inputs".into()));
                }
                let ra = da.sqrt_eig()?;
                let rb = db.sqrt_eig()?;
                let h = self.gaussian(n, l).scale_rows_cols(&ra, &rb).scale(1.0 / (l as f64).sqrt());
                Draw::spectrum(n, eigenvalues_sym(&h.gram())?, false)
            }
        })
    }
}

/// Eigenvalues of `X F F'` through the symmetric `F' X F`, for an `n x k` factor.
fn factor_product(x: &Mat, fac: &Mat) -> Result<Vec<f64>> {
    let n = fac.rows;
    let fac = if fac.cols > n {
        // F F' = R' R with R from the QR factorization of F'.
        let (r, _) = qr(&fac.transpose(), false);
        r.transpose()
    } else {
        fac.clone()
    };
    let m = fac.transpose().mul(x).mul(&fac);
    let mut e = eigenvalues_sym(&symmetrize(m))?;
    e.resize(n, 0.0);
    e.sort_by(f64::total_cmp);
    Ok(e)
}

fn symmetrize(mut m: Mat) -> Mat {
    for i in 0..m.rows {
        for j in 0..i {
            let s = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = s;
            m[(j, i)] = s;
        }
    }
    m
}

#[derive(Clone, Debug)]
pub struct EnsembleSample {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub seed: u64,
    pub trial: u64,
    pub expr: Expr,
}

/// One realization of `expr` at dimension `n`.
pub fn sample_ensemble(expr: &Expr, n: usize, seed: u64) -> Result<EnsembleSample> {
    sample_trial(expr, n, seed, 0, Options::default())
}

pub fn sample_trial(expr: &Expr, n: usize, seed: u64, trial: u64, opts: Options) -> Result<EnsembleSample> {
    if n == 0 {
        return Err(Error::Sampling("dimension must be positive".into()));
    }
    let mut s = Sampler::new(seed, trial, opts);
    let mut d = s.draw(expr, n)?;
    let mut e = d.eig()?.to_vec();
    e.sort_by(f64::total_cmp);
    if e.len() != n || e.iter().any(|x| !x.is_finite()) {
        return Err(Error::Sampling(format!("expected {n} finite eigenvalues, got {}", e.len())));
    }
    Ok(EnsembleSample { dim: n, eigenvalues: e, seed, trial, expr: expr.clone() })
}

/// Eigenvalues of `trials` independent realizations, in trial order.
pub fn run_trials(expr: &Expr, n: usize, trials: usize, seed: u64, opts: Options) -> Result<Vec<Vec<f64>>> {
    let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(trials.max(1));
    let chunk = trials.div_ceil(workers);
    let parts: Vec<Result<Vec<Vec<f64>>>> = std::thread::scope(|sc| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                sc.spawn(move || {
                    (w * chunk..((w + 1) * chunk).min(trials))
                        .map(|t| sample_trial(expr, n, seed, t as u64, opts).map(|s| s.eigenvalues))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sampling thread panicked")).collect()
    });
    let mut out = Vec::with_capacity(trials);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalHistogram {
    pub edges: Vec<f64>,
    /// Continuous part: fraction of all eigenvalues per unit length.
    pub density: Vec<f64>,
    /// `(location, fraction)` of eigenvalues matching a known atom.
    pub atoms: Vec<(f64, f64)>,
    /// Fraction outside the binned range and not in an atom.
    pub outside: f64,
    /// Empirical distribution function at each edge.
    pub cdf: Vec<f64>,
    pub trials: usize,
    pub count: usize,
}

pub const ATOM_TOL: f64 = 1e-8;

pub fn histogram(eigs: &[f64], trials: usize, lo: f64, hi: f64, bins: usize, atom_at: &[f64]) -> Result<EmpiricalHistogram> {
    if eigs.is_empty() {
        return Err(Error::Sampling("empty histogram".into()));
    }
    if !(lo < hi) || bins == 0 {
        return Err(Error::InvalidParameter(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
    }
    let w = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + w * i as f64).collect();
    let mut counts = vec![0usize; bins];
    let mut atoms = vec![0usize; atom_at.len()];
    let mut outside = 0usize;
    let mut sorted = eigs.to_vec();
    sorted.sort_by(f64::total_cmp);
    for &x in &sorted {
        if let Some(k) = atom_at.iter().position(|a| (x - a).abs() <= ATOM_TOL) {
            atoms[k] += 1;
        } else if x < lo || x > hi {
            outside += 1;
        } else {
            counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
        }
    }
    let total = eigs.len() as f64;
    let cdf = edges.iter().map(|e| sorted.partition_point(|x| x <= e) as f64 / total).collect();
    Ok(EmpiricalHistogram {
        edges,
        density: counts.iter().map(|c| *c as f64 / (total * w)).collect(),
        atoms: atom_at.iter().zip(&atoms).map(|(a, c)| (*a, *c as f64 / total)).collect(),
        outside: outside as f64 / total,
        cdf,
        trials,
        count: eigs.len(),
    })
}

impl EmpiricalHistogram {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lo,hi,density\n");
        for (i, d) in self.density.iter().enumerate() {
            s.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], d));
        }
        for (a, p) in &self.atoms {
            s.push_str(&format!("{a},{a},atom:{p}\n"));
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub l1: f64,
    pub ks: f64,
}

/// L1 distance between the histogram and the profile's bin averages (atoms
/// and out-of-range mass included), and the KS distance at the bin edges.
pub fn compare(h: &EmpiricalHistogram, p: &DensityProfile) -> Result<Comparison> {
    if h.count == 0 {
        return Err(Error::Sampling("empty histogram".into()));
    }
    let atom_mass = |x: f64| p.atoms.iter().filter(|a| a.location <= x).map(|a| a.weight).sum::<f64>();
    let cont = |x: f64| p.cdf(x) - atom_mass(x);
    let mut l1 = h.outside;
    for (i, d) in h.density.iter().enumerate() {
        let (a, b) = (h.edges[i], h.edges[i + 1]);
        l1 += (d * (b - a) - (cont(b) - cont(a))).abs();
    }
    for at in &p.atoms {
        let emp = h.atoms.iter().find(|(x, _)| (x - at.location).abs() <= ATOM_TOL).map_or(0.0, |a| a.1);
        l1 += (emp - at.weight).abs();
    }
    for (x, w) in &h.atoms {
        if !p.atoms.iter().any(|a| (a.location - x).abs() <= ATOM_TOL) {
            l1 += w;
        }
    }
    let ks = h.edges.iter().zip(&h.cdf).map(|(x, e)| (e - p.cdf(*x)).abs()).fold(0.0, f64::max);
    Ok(Comparison { l1, ks })
}
