//! Polynomial root finding in floating point.

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::bipoly::{Rational, UniPoly};

const MAX_ITER: usize = 600;

fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * x + p;
        p = p * x + a;
    }
    (p, dp)
}

/// All roots of `sum c_k x^k` (lowest degree first) by Aberth-Ehrlich
/// iteration. `init` supplies warm starts; missing entries start on a circle
/// of radius given by the Cauchy bound.
pub fn aberth(coeffs: &[Complex64], init: Option<&[Complex64]>) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.len() > 1 && c.last().unwrap().norm() == 0.0 {
        c.pop();
    }
    let mut zeros = 0;
    while c.len() > 1 && c[0].norm() == 0.0 {
        c.remove(0);
        zeros += 1;
    }
    let n = c.len() - 1;
    let mut out = vec![Complex64::zero(); zeros];
    if n == 0 {
        return out;
    }
    let lead = c[n];
    for a in c.iter_mut() {
        *a /= lead;
    }
    if n == 1 {
        out.push(-c[0]);
        return out;
    }
    let bound = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let lower = {
        let m = c[1..].iter().map(|a| a.norm()).fold(0.0, f64::max);
        c[0].norm() / (c[0].norm() + m)
    };
    let radius = (bound * lower).sqrt().clamp(lower, bound);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let given = init.and_then(|s| s.get(k)).copied().filter(|w| w.is_finite());
            given.unwrap_or_else(|| {
                let th = std::f64::consts::TAU * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(radius, th)
            })
        })
        .collect();
    // Coincident warm starts stall the iteration.
    for i in 0..n {
        for j in 0..i {
            if (z[i] - z[j]).norm() < 1e-12 * (1.0 + z[i].norm()) {
                let nudge = Complex64::new(1e-7, 1e-7) * (1.0 + z[i].norm()) * (i as f64 + 1.0);
                z[i] += nudge;
            }
        }
    }
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::zero();
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                let nudge = Complex64::new(1e-6, 1e-6) * (1.0 + z[i].norm());
                z[i] += nudge;
                all = false;
                continue;
            }
            z[i] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(1e-300) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    out.extend(z);
    out
}

/// Roots of a rational polynomial.
pub fn roots(p: &UniPoly) -> Vec<Complex64> {
    let c: Vec<Complex64> = p.to_f64_coeffs().into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    if c.len() <= 1 {
        return Vec::new();
    }
    aberth(&c, None)
}

/// Number of distinct real roots, from the exact Sturm sequence.
pub fn sturm_count(p: &UniPoly) -> usize {
    let Some(n) = p.degree() else { return 0 };
    if n == 0 {
        return 0;
    }
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let k = seq.len();
        let r = seq[k - 2].rem(&seq[k - 1]);
        if r.is_zero() {
            break;
        }
        // Only positive rescaling keeps the sign pattern intact.
        let q = r.primitive();
        seq.push(if r.lc().unwrap().is_positive() { -q } else { q });
    }
    let sign_changes = |signs: Vec<i32>| {
        let s: Vec<i32> = signs.into_iter().filter(|&x| x != 0).collect();
        s.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sgn = |q: &Rational| if q.is_positive() { 1 } else if q.is_negative() { -1 } else { 0 };
    let at_pos: Vec<i32> = seq.iter().map(|q| sgn(q.lc().unwrap())).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|q| {
            let s = sgn(q.lc().unwrap());
            if q.degree().unwrap() % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    sign_changes(at_neg) - sign_changes(at_pos)
}

/// Distinct real roots of a rational polynomial, sorted ascending.
pub fn real_roots(p: &UniPoly) -> Vec<f64> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let sf = p.squarefree_part();
    let count = sturm_count(&sf);
    if count == 0 {
        return Vec::new();
    }
    let mut cand = roots(&sf);
    cand.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let coeffs = sf.to_f64_coeffs();
    let mut out: Vec<f64> = cand.iter().take(count).map(|z| polish_real(&coeffs, z.re)).collect();
    out.sort_by(f64::total_cmp);
    out
}

fn polish_real(c: &[f64], mut x: f64) -> f64 {
    for _ in 0..8 {
        let (mut p, mut dp) = (0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        if dp == 0.0 {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn quadratic_roots() {
        // m^2 + 3m + 1
        let r = sorted_re(roots(&UniPoly::from_ints(&[1, 3, 1])));
        assert!((r[0].re + 2.618033988749895).abs() < 1e-13);
        assert!((r[1].re + 0.3819660112501051).abs() < 1e-13);
        let r = sorted_re(roots(&UniPoly::from_ints(&[1, 0, 1])));
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn high_degree_and_zero_roots() {
        // x^3 (x^5 - 1)
        let p = UniPoly::from_ints(&[0, 0, 0, -1, 0, 0, 0, 0, 1]);
        let r = roots(&p);
        assert_eq!(r.len(), 8);
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 3);
        for z in r.iter().filter(|z| z.norm() > 0.0) {
            assert!((z.powi(5) - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn warm_start_is_used() {
        let c = [Complex64::new(-2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let r = aberth(&c, Some(&[Complex64::new(1.4, 0.0), Complex64::new(-1.4, 0.0)]));
        assert!((r[0].re - 2f64.sqrt()).abs() < 1e-14);
        assert!((r[1].re + 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn sturm_and_real_roots() {
        // z^2 - 6z + 1 has roots (1 +- sqrt 2)^2
        let p = UniPoly::from_ints(&[1, -6, 1]);
        assert_eq!(sturm_count(&p), 2);
        let r = real_roots(&p);
        assert!((r[0] - (1.0 - 2f64.sqrt()).powi(2)).abs() < 1e-15);
        assert!((r[1] - (1.0 + 2f64.sqrt()).powi(2)).abs() < 1e-14);
        // (x^2 + 1)(x - 3)^2 x
        let q = &(&UniPoly::from_ints(&[1, 0, 1]) * &UniPoly::from_ints(&[9, -6, 1])) * &UniPoly::x();
        assert_eq!(real_roots(&q), vec![0.0, 3.0]);
        assert!(real_roots(&UniPoly::from_ints(&[4])).is_empty());
    }
}
