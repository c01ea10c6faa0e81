//! Numerical reading of the curve `Lmz(m, z) = 0`: atoms at the poles,
//! support edges from the discriminant, and the density `Im m(x + i0) / pi`
//! along the branch that is a Stieltjes transform.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::bipoly::BiPoly;
use crate::encodings::{EncodedDistribution, Kind};
use crate::error::{Error, Result};
use crate::numeric::{aberth, real_roots};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SupportInfo {
    /// Real roots of the discriminant in `m`.
    pub endpoints: Vec<f64>,
    /// Real roots of the leading coefficient in `m`.
    pub poles: Vec<f64>,
    /// Candidates where the density switches between zero and non-zero.
    pub edges: Vec<f64>,
    /// Maximal intervals carrying continuous mass.
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Clone, Debug)]
pub struct RootsAt {
    pub roots: Vec<Complex64>,
    pub degree_dropped: bool,
}

#[derive(Clone, Debug)]
pub struct DensityProfile {
    pub grid: Vec<f64>,
    /// All roots at each grid point, ordered consistently along the grid.
    pub branches: Vec<Vec<Complex64>>,
    /// Index into `branches[i]` of the Stieltjes branch; `None` at skipped points.
    pub selected: Vec<Option<usize>>,
    pub density: Vec<f64>,
    pub atoms: Vec<Atom>,
    pub support: SupportInfo,
    /// Continuous mass inside the grid range plus the atoms inside it.
    pub total_mass: f64,
    /// Quadrature nodes `(x, w f(x))` of the continuous part inside the grid range.
    pub quadrature: Vec<(f64, f64)>,
    /// Trapezoid rule on the grid values plus atoms.
    pub grid_mass: f64,
    pub warnings: Vec<String>,
}

/// The curve with the data needed to evaluate its Stieltjes branch.
pub struct Curve {
    poly: BiPoly,
    poles: Vec<f64>,
    height: f64,
}

const POLE_GAP: f64 = 1e-8;

impl Curve {
    pub fn new(d: &EncodedDistribution) -> Result<Curve> {
        let poly = d.convert(Kind::Mz)?.into_poly();
        if poly.deg_u().unwrap_or(0) == 0 {
            return Err(Error::DegreeTooLow("m".into()));
        }
        let poles = find_poles(&poly);
        let span = poles.iter().chain(discriminant_roots(&poly).iter()).fold(1.0f64, |a, x| a.max(x.abs()));
        Ok(Curve { poly, poles, height: 20.0 * (1.0 + span) })
    }

    pub fn poly(&self) -> &BiPoly {
        &self.poly
    }

    fn roots(&self, z: Complex64, warm: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
        let s = self.poly.eval_slice(z)?;
        Ok(aberth(&s.coeffs, warm))
    }

    /// Rows of `L(m, x + t)` as polynomials in `t`, exact up to rounding of
    /// each coefficient.
    fn line(&self, x: f64) -> Vec<Vec<f64>> {
        let q = num_rational::BigRational::from_float(x).unwrap_or_default();
        self.poly.rows().iter().map(|r| r.shift(&q).to_f64_coeffs()).collect()
    }

    fn roots_on(&self, line: &[Vec<f64>], y: f64, warm: Option<&[Complex64]>) -> Result<Vec<Complex64>> {
        let t = Complex64::new(0.0, y);
        let mut coeffs: Vec<Complex64> =
            line.iter().map(|r| r.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)).collect();
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return Err(Error::SingularSlice);
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= 1e-14 * scale) {
            coeffs.pop();
        }
        Ok(aberth(&coeffs, warm))
    }

    fn near_pole(&self, x: f64) -> bool {
        self.poles.iter().any(|p| (p - x).abs() <= POLE_GAP * (1.0 + p.abs()))
    }

    /// Follow the Stieltjes branch down the vertical line through `x` to
    /// `x + i y_end`, returning the value and the roots there.
    fn track(&self, x: f64, y_end: f64) -> Result<(Complex64, Vec<Complex64>)> {
        let mut y = self.height * 1.0137;
        let z = Complex64::new(x, y);
        let line = self.line(x);
        let mut roots = self.roots_on(&line, y, None)?;
        let mut cur = *roots
            .iter()
            .min_by(|a, b| (z * **a + 1.0).norm().total_cmp(&(z * **b + 1.0).norm()))
            .ok_or_else(|| Error::Numeric(format!("no roots at {z}")))?;
        // Candidate predictions for the next value: the current one, a secant
        // in y, and secants of y m in sqrt(y) and in y, which are accurate
        // near a pole. The one that predicted the previous step best is used.
        let mut last: Option<(f64, Complex64)> = None;
        let mut errs = [0.0, f64::INFINITY, f64::INFINITY, f64::INFINITY];
        let mut step = 0.35;
        let mut guard = 0;
        while y > y_end {
            guard += 1;
            if guard > 4000 {
                return Err(Error::Numeric(format!("branch tracking stalled at x = {x}")));
            }
            let y_next = (y * step).max(y_end);
            let next = self.roots_on(&line, y_next, Some(&roots))?;
            let guesses = match last {
                Some((yp, mp)) => {
                    let (tp, t, tn) = (yp.sqrt(), y.sqrt(), y_next.sqrt());
                    let (vp, v) = (mp * yp, cur * y);
                    let dy = (y_next - y) / (y - yp);
                    [cur, cur + (cur - mp) * dy, (v + (v - vp) * ((tn - t) / (t - tp))) / y_next, (v + (v - vp) * dy) / y_next]
                }
                None => [cur; 4],
            };
            let pick = (0..4).min_by(|&a, &b| errs[a].total_cmp(&errs[b])).unwrap();
            let (best, d1, d2) = nearest_admissible(&next, guesses[pick], y_next);
            let scale = 1e-12 * (1.0 + cur.norm());
            if d1 > 0.25 * d2 && d1 > scale && step < 0.999 {
                step = step.sqrt();
                continue;
            }
            let m = next[best];
            if last.is_some() {
                errs = guesses.map(|g| (m - g).norm());
            }
            last = Some((y, cur));
            cur = m;
            roots = next;
            y = y_next;
            step = (step * step).max(0.05);
        }
        Ok((cur, roots))
    }

    /// Value of the Stieltjes branch at the real point `x`.
    pub fn stieltjes_at(&self, x: f64) -> Result<Complex64> {
        let eta = 1e-9 * (1.0 + x.abs());
        let (m, roots) = self.track(x, eta)?;
        let at = self.roots(Complex64::new(x, 0.0), Some(&roots))?;
        if at.is_empty() {
            return Ok(m);
        }
        let (i, _, _) = nearest(&at, m);
        Ok(at[i])
    }

    /// Continuous density at `x`; `None` at a pole.
    pub fn density_at(&self, x: f64) -> Result<Option<f64>> {
        if self.near_pole(x) {
            return Ok(None);
        }
        Ok(Some(self.stieltjes_at(x)?.im / PI))
    }

    fn density_or_zero(&self, x: f64) -> Result<f64> {
        Ok(self.density_at(x)?.unwrap_or(0.0).max(0.0))
    }

    /// Atom at a pole `z0` from `eps Im m(z0 + i eps)`, extrapolated to `eps -> 0`.
    pub fn atom_at(&self, z0: f64) -> Result<Option<f64>> {
        let scale = 1.0 + z0.abs();
        let eps = [1e-4 * scale, 1e-5 * scale, 1e-6 * scale];
        let mut w = [0.0; 3];
        for (k, e) in eps.iter().enumerate() {
            w[k] = e * self.track(z0, *e)?.0.im;
        }
        // w(eps) = w0 + a sqrt(eps) + b eps
        let rows: Vec<[f64; 3]> = eps.iter().map(|e| [1.0, e.sqrt(), *e]).collect();
        let w0 = solve3(&rows, &w).map(|s| s[0]).unwrap_or(w[2]);
        if !w0.is_finite() || !(-1e-4..=1.0 + 1e-4).contains(&w0) {
            return Ok(None);
        }
        Ok(Some(w0.clamp(0.0, 1.0)))
    }
}

fn nearest(roots: &[Complex64], target: Complex64) -> (usize, f64, f64) {
    let mut d: Vec<(usize, f64)> = roots.iter().enumerate().map(|(i, r)| (i, (r - target).norm())).collect();
    d.sort_by(|a, b| a.1.total_cmp(&b.1));
    let d2 = d.get(1).map_or(f64::INFINITY, |x| x.1);
    (d[0].0, d[0].1, d2)
}

/// Like [`nearest`], restricted to roots a Stieltjes transform can take at
/// height `y`: `Im m > 0` and `|m| <= 1/y`, up to rounding.
fn nearest_admissible(roots: &[Complex64], target: Complex64, y: f64) -> (usize, f64, f64) {
    let ok = |r: &Complex64| r.im > -1e-10 * (1.0 + r.norm()) && r.norm() * y <= 1.0 + 1e-6;
    let keep: Vec<usize> = (0..roots.len()).filter(|&i| ok(&roots[i])).collect();
    if keep.is_empty() {
        return nearest(roots, target);
    }
    let sub: Vec<Complex64> = keep.iter().map(|&i| roots[i]).collect();
    let (i, d1, d2) = nearest(&sub, target);
    (keep[i], d1, d2)
}

fn solve3(a: &[[f64; 3]], b: &[f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for k in 0..3 {
        let p = (k..3).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))?;
        m.swap(k, p);
        if m[k][k] == 0.0 {
            return None;
        }
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..4 {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = [0.0; 3];
    for k in (0..3).rev() {
        let s: f64 = (k + 1..3).map(|j| m[k][j] * x[j]).sum();
        x[k] = (m[k][3] - s) / m[k][k];
    }
    Some(x)
}

/// All roots of `L(m, z0) = 0`.
pub fn roots_at(l: &BiPoly, z0: Complex64) -> Result<RootsAt> {
    let s = l.eval_slice(z0)?;
    Ok(RootsAt { roots: aberth(&s.coeffs, None), degree_dropped: s.degree_dropped })
}

/// Real roots of the leading coefficient in `m`.
pub fn find_poles(l: &BiPoly) -> Vec<f64> {
    real_roots(&l.leading_coeff_u())
}

fn discriminant_roots(l: &BiPoly) -> Vec<f64> {
    l.discriminant_u().map(|d| real_roots(&d)).unwrap_or_default()
}

pub fn atom_weights(d: &EncodedDistribution) -> Result<(Vec<Atom>, Vec<String>)> {
    let curve = Curve::new(d)?;
    atoms_of(&curve)
}

fn atoms_of(curve: &Curve) -> Result<(Vec<Atom>, Vec<String>)> {
    let mut atoms = Vec::new();
    let mut warnings = Vec::new();
    for &p in &curve.poles {
        match curve.atom_at(p) {
            Ok(Some(w)) if w > 1e-6 => atoms.push(Atom { location: p, weight: w }),
            Ok(_) => {}
            Err(e) => match residue_fallback(curve, p) {
                Some(w) => {
                    warnings.push(format!(
                        "branch tracking failed at the pole {p} ({e}); used the largest admissible residue {w}"
                    ));
                    atoms.push(Atom { location: p, weight: w });
                }
                None => warnings.push(format!("no admissible atom weight at the pole {p}: {e}")),
            },
        }
    }
    Ok((atoms, warnings))
}

/// Candidate residues over all branches; the largest admissible one below 1.
fn residue_fallback(curve: &Curve, z0: f64) -> Option<f64> {
    let eps = 1e-7 * (1.0 + z0.abs());
    let roots = curve.roots(Complex64::new(z0, eps), None).ok()?;
    let mut ws: Vec<f64> = roots.iter().map(|m| eps * m.im).filter(|w| (0.0..1.0).contains(w)).collect();
    ws.sort_by(f64::total_cmp);
    ws.pop().filter(|w| *w > 1e-6)
}

/// Discriminant roots, poles and the intervals where the density is positive.
pub fn support_endpoints(d: &EncodedDistribution) -> Result<SupportInfo> {
    let curve = Curve::new(d)?;
    support_of(&curve)
}

fn support_of(curve: &Curve) -> Result<SupportInfo> {
    let l = &curve.poly;
    let endpoints = if l.deg_u().unwrap_or(0) >= 2 { real_roots(&l.discriminant_u()?) } else { Vec::new() };
    let poles = curve.poles.clone();
    let mut breaks: Vec<f64> = endpoints.iter().chain(poles.iter()).copied().collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    let mut bounds = vec![f64::NEG_INFINITY];
    bounds.extend(&breaks);
    bounds.push(f64::INFINITY);
    for w in bounds.windows(2) {
        let (a, b) = (w[0], w[1]);
        let probe = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (false, true) => b - 1.0 - b.abs(),
            (true, false) => a + 1.0 + a.abs(),
            (false, false) => 0.0,
        };
        if curve.density_or_zero(probe)? > 1e-10 {
            match pieces.last_mut() {
                Some(last) if last.1 == a => last.1 = b,
                _ => pieces.push((a, b)),
            }
        }
    }
    let mut edges: Vec<f64> = pieces.iter().flat_map(|&(a, b)| [a, b]).filter(|x| x.is_finite()).collect();
    edges.dedup();
    Ok(SupportInfo { endpoints, poles, edges, intervals: pieces })
}

/// Default plotting range: the candidate endpoints and poles padded by 1/2.
pub fn default_range(d: &EncodedDistribution) -> Result<(f64, f64)> {
    let curve = Curve::new(d)?;
    let s = support_of(&curve)?;
    let pts: Vec<f64> = s.edges.iter().chain(s.poles.iter()).copied().collect();
    if pts.is_empty() {
        return Ok((-5.0, 5.0));
    }
    let lo = pts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let unbounded = s.intervals.iter().any(|(a, b)| !a.is_finite() || !b.is_finite());
    let pad = if unbounded { 5.0 } else { 0.5 };
    Ok((lo - pad, hi + pad))
}

/// Integral of the density over `[a, b]`, with square-root or inverse
/// square-root behaviour allowed at both ends.
fn integrate(curve: &Curve, a: f64, b: f64, n: usize, nodes: &mut Vec<(f64, f64)>) -> Result<()> {
    let h = PI / n as f64;
    for k in 0..n {
        let th = (k as f64 + 0.5) * h;
        let x = a + 0.5 * (b - a) * (1.0 - th.cos());
        nodes.push((x, curve.density_or_zero(x)? * 0.5 * (b - a) * th.sin() * h));
    }
    Ok(())
}

fn continuous_nodes(curve: &Curve, support: &SupportInfo, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    let mut nodes = Vec::new();
    for &(a, b) in &support.intervals {
        let a = a.max(lo);
        let b = b.min(hi);
        if b <= a {
            continue;
        }
        // Poles inside an interval split it; the density may blow up there.
        let mut cuts = vec![a];
        cuts.extend(support.poles.iter().copied().filter(|p| *p > a && *p < b));
        cuts.push(b);
        for w in cuts.windows(2) {
            integrate(curve, w[0], w[1], 400, &mut nodes)?;
        }
    }
    Ok(nodes)
}

/// Density profile on `n` equally spaced points of `[z_min, z_max]`.
pub fn density_grid(d: &EncodedDistribution, z_min: f64, z_max: f64, n: usize) -> Result<DensityProfile> {
    if !(z_min < z_max) || n < 2 {
        return Err(Error::InvalidParameter(format!("bad grid [{z_min}, {z_max}] with {n} points")));
    }
    let curve = Curve::new(d)?;
    let support = support_of(&curve)?;
    let (atoms, mut warnings) = atoms_of(&curve)?;
    let grid: Vec<f64> = (0..n).map(|i| z_min + (z_max - z_min) * i as f64 / (n - 1) as f64).collect();
    let mut branches: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut selected = Vec::with_capacity(n);
    let mut density = Vec::with_capacity(n);
    let mut prev: Option<Vec<Complex64>> = None;
    for &x in &grid {
        if curve.near_pole(x) {
            branches.push(Vec::new());
            selected.push(None);
            density.push(f64::NAN);
            continue;
        }
        let m = curve.stieltjes_at(x)?;
        let mut roots = curve.roots(Complex64::new(x, 0.0), prev.as_deref())?;
        if let Some(p) = &prev {
            if p.len() == roots.len() {
                let perm = assignment(p, &roots);
                roots = perm.into_iter().map(|j| roots[j]).collect();
            }
        }
        let (idx, _, _) = nearest(&roots, m);
        selected.push(Some(idx));
        density.push(m.im / PI);
        prev = Some(roots.clone());
        branches.push(roots);
    }
    // Fill skipped points by linear interpolation of their neighbours.
    for i in 0..n {
        if density[i].is_nan() {
            let left = (0..i).rev().find(|&j| !density[j].is_nan());
            let right = (i + 1..n).find(|&j| !density[j].is_nan());
            density[i] = match (left, right) {
                (Some(a), Some(b)) => {
                    let t = (grid[i] - grid[a]) / (grid[b] - grid[a]);
                    density[a] + t * (density[b] - density[a])
                }
                (Some(a), None) => density[a],
                (None, Some(b)) => density[b],
                (None, None) => 0.0,
            };
        }
    }
    if let Some(x) = density.iter().zip(&grid).find(|(f, _)| **f < -1e-9).map(|(_, x)| *x) {
        warnings.push(format!("selected branch has negative imaginary part near x = {x}"));
    }
    let in_range: f64 = atoms.iter().filter(|a| a.location >= z_min && a.location <= z_max).map(|a| a.weight).sum();
    let quadrature = continuous_nodes(&curve, &support, z_min, z_max)?;
    let total_mass = quadrature.iter().map(|q| q.1).sum::<f64>() + in_range;
    let trap: f64 = grid.windows(2).zip(density.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum();
    Ok(DensityProfile {
        grid,
        branches,
        selected,
        density,
        atoms,
        support,
        total_mass,
        quadrature,
        grid_mass: trap + in_range,
        warnings,
    })
}

/// `|total_mass - 1|`.
pub fn normalization_check(p: &DensityProfile) -> f64 {
    (p.total_mass - 1.0).abs()
}

impl DensityProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z,f\n");
        for (x, f) in self.grid.iter().zip(&self.density) {
            let _ = writeln!(s, "{x},{f}");
        }
        s
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "atoms": self.atoms,
            "endpoints": self.support.endpoints,
            "edges": self.support.edges,
            "poles": self.support.poles,
            "intervals": self.support.intervals,
            "total_mass": self.total_mass,
            "grid_mass": self.grid_mass,
            "points": self.grid.len(),
            "warnings": self.warnings,
        })
    }

    /// Cumulative distribution at `x` from the grid values and the atoms.
    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            let (a, b) = (self.grid[i - 1], self.grid[i]);
            if a >= x {
                break;
            }
            let (fa, fb) = (self.density[i - 1].max(0.0), self.density[i].max(0.0));
            if b <= x {
                acc += 0.5 * (b - a) * (fa + fb);
            } else {
                let fx = fa + (fb - fa) * (x - a) / (b - a);
                acc += 0.5 * (x - a) * (fa + fx);
            }
        }
        acc + self.atoms.iter().filter(|t| t.location <= x).map(|t| t.weight).sum::<f64>()
    }

    /// Linear interpolation of the continuous density.
    pub fn density_interp(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x < self.grid[0] || x > self.grid[n - 1] {
            return 0.0;
        }
        let h = (self.grid[n - 1] - self.grid[0]) / (n - 1) as f64;
        let i = (((x - self.grid[0]) / h) as usize).min(n - 2);
        let t = (x - self.grid[i]) / h;
        (self.density[i] + t * (self.density[i + 1] - self.density[i])).max(0.0)
    }
}

/// Minimum-cost matching of `prev` to `next` (Hungarian algorithm);
/// `out[i]` is the index in `next` matched to `prev[i]`.
pub fn assignment(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let n = prev.len();
    let cost = |i: usize, j: usize| (prev[i] - next[j]).norm();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out = vec![0; n];
    for j in 1..=n {
        out[p[j] - 1] = j - 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipoly::rat;
    use crate::encodings::{atomic, marcenko_pastur, semicircle};

    fn mz(s: &str) -> EncodedDistribution {
        EncodedDistribution::parse(Kind::Mz, s).unwrap()
    }

    #[test]
    fn slices() {
        let l = semicircle().into_poly();
        let mut r = roots_at(&l, Complex64::new(0.0, 0.0)).unwrap().roots;
        r.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        let mut r = roots_at(&l, Complex64::new(3.0, 0.0)).unwrap().roots;
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0].re + 2.618033988749895).abs() < 1e-12);
        assert!((r[1].re + 0.381966011250105).abs() < 1e-12);
        let mp2 = marcenko_pastur(&rat(2, 1)).unwrap().into_poly();
        assert!(roots_at(&mp2, Complex64::new(0.0, 0.0)).unwrap().degree_dropped);
    }

    #[test]
    fn poles() {
        assert_eq!(find_poles(marcenko_pastur(&rat(2, 1)).unwrap().poly()), vec![0.0]);
        assert_eq!(find_poles(mz("m*(2*z^2-2*z)-(1-2*z)").poly()), vec![0.0, 1.0]);
        assert!(find_poles(semicircle().poly()).is_empty());
    }

    #[test]
    fn atoms() {
        let (a, _) = atom_weights(&marcenko_pastur(&rat(2, 1)).unwrap()).unwrap();
        assert_eq!(a.len(), 1);
        assert!(a[0].location.abs() < 1e-12 && (a[0].weight - 0.5).abs() < 1e-3);
        let hh = atomic(&[(rat(1, 2), rat(0, 1)), (rat(1, 2), rat(1, 1))]).unwrap();
        let (a, _) = atom_weights(&hh).unwrap();
        assert_eq!(a.len(), 2);
        assert!(a.iter().all(|t| (t.weight - 0.5).abs() < 1e-6));
    }

    #[test]
    fn endpoints() {
        let s = support_endpoints(&semicircle()).unwrap();
        assert!((s.endpoints[0] + 2.0).abs() < 1e-12 && (s.endpoints[1] - 2.0).abs() < 1e-12);
        assert_eq!(s.intervals.len(), 1);
        let s = support_endpoints(&marcenko_pastur(&rat(2, 1)).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        assert!((s.endpoints[0] - (1.0 - r2).powi(2)).abs() < 1e-12);
        assert!((s.endpoints[1] - (1.0 + r2).powi(2)).abs() < 1e-12);
        assert_eq!(s.edges.len(), 2);
    }

    #[test]
    fn densities() {
        let c = Curve::new(&semicircle()).unwrap();
        assert!((c.density_at(0.0).unwrap().unwrap() - 1.0 / PI).abs() < 1e-9);
        let mp = Curve::new(&marcenko_pastur(&rat(2, 1)).unwrap()).unwrap();
        let r2 = 2f64.sqrt();
        let (a, b) = ((1.0 - r2).powi(2), (1.0 + r2).powi(2));
        let exact = ((2.0 - a) * (b - 2.0)).sqrt() / (2.0 * PI * 2.0 * 2.0);
        assert!((mp.density_at(2.0).unwrap().unwrap() - exact).abs() < 1e-9);
        let cauchy = Curve::new(&mz("(z^2+1)*m^2+2*z*m+1")).unwrap();
        assert!((cauchy.density_at(0.0).unwrap().unwrap() - 1.0 / PI).abs() < 1e-9);
    }

    #[test]
    fn normalization() {
        let p = density_grid(&semicircle(), -2.5, 2.5, 2000).unwrap();
        assert!(normalization_check(&p) <= 1e-3);
        assert!((p.grid_mass - 1.0).abs() <= 1e-3);
        let mp = marcenko_pastur(&rat(2, 1)).unwrap();
        let (lo, hi) = default_range(&mp).unwrap();
        let p = density_grid(&mp, lo, hi, 1000).unwrap();
        assert!(normalization_check(&p) <= 1e-3, "{}", p.total_mass);
        let p = density_grid(&semicircle(), 0.0, 1.0, 500).unwrap();
        assert!(normalization_check(&p) > 0.2);
    }

    #[test]
    fn hungarian() {
        let a: Vec<Complex64> = [0.0, 1.0, 2.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let b: Vec<Complex64> = [2.1, -0.1, 0.9].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        assert_eq!(assignment(&a, &b), vec![1, 2, 0]);
    }
}
