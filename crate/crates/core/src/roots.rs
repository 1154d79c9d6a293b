//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Brent's method on a bracket [a, b] with f(a)·f(b) < 0.
///
/// Converges when the bracket width is below `xtol·max(|x|, tiny)`.
pub fn brent<F>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { what, lo: a, hi: b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol * b.abs().max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::convergence("brent", format!("{what}: no convergence in {max_iter} iterations")))
}

/// Bisection down to relative width `switch_tol`, then a secant polish kept
/// inside the bracket.
pub fn bisect_secant<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    switch_tol: f64,
    xtol: f64,
    max_iter: usize,
    what: &'static str,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = (lo.min(hi), lo.max(hi));
    let mut flo = f(lo)?;
    let mut fhi = f(hi)?;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { what, lo, hi });
    }
    let scale = |a: f64, b: f64| a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    let mut iter = 0;
    while (hi - lo) > switch_tol * scale(lo, hi) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        iter += 1;
        if iter >= max_iter {
            return Err(Error::convergence("bisect_secant", format!("{what}: bisection stalled")));
        }
    }
    while iter < max_iter {
        let mut x = hi - fhi * (hi - lo) / (fhi - flo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = f(x)?;
        if fx == 0.0 || (hi - lo) <= xtol * scale(lo, hi) {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            let step = x - lo;
            lo = x;
            flo = fx;
            if step <= xtol * scale(lo, hi) {
                return Ok(x);
            }
        } else {
            let step = hi - x;
            hi = x;
            fhi = fx;
            if step <= xtol * scale(lo, hi) {
                return Ok(x);
            }
        }
        iter += 1;
    }
    Err(Error::convergence("bisect_secant", format!("{what}: no convergence in {max_iter} iterations")))
}

/// Count sign changes of `f` on `pieces` equal subintervals of [lo, hi].
pub fn count_sign_changes<F>(mut f: F, lo: f64, hi: f64, pieces: usize) -> Result<usize>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut prev = f(lo)?;
    let mut changes = 0;
    for i in 1..=pieces {
        let x = lo + (hi - lo) * i as f64 / pieces as f64;
        let v = f(x)?;
        if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
            changes += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    Ok(changes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cos_root() {
        let r = brent(|x| Ok(x.cos() - x), 0.0, 1.0, 1e-15, 100, "test").unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-14);
    }

    #[test]
    fn bisect_secant_finds_cubic_root() {
        let r = bisect_secant(|x| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-6, 1e-15, 200, "test").unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn no_sign_change_is_an_error() {
        assert!(matches!(
            brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50, "test"),
            Err(Error::NoSignChange { .. })
        ));
        assert!(matches!(
            bisect_secant(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-6, 1e-12, 50, "test"),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn sign_change_count() {
        let n = count_sign_changes(|x| Ok((x).sin()), 0.1, 10.0, 200).unwrap();
        assert_eq!(n, 3);
    }
}
