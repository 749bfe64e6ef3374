//! Small unconstrained optimizers used by the likelihood fits.
//!
//! [`bfgs_minimize`] is a dense BFGS with a backtracking line search for
//! low-dimensional smooth problems. [`find_decreasing_root`] brackets and
//! polishes the root of a one-dimensional derivative with Brent's method.

/// Objective value with its gradient; `None` marks a point outside the
/// region where the objective is finite.
pub type Evaluation<const N: usize> = Option<(f64, [f64; N])>;

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub grad_tol: f64,
    pub max_iter: usize,
    /// Largest coordinate change allowed in a single step.
    pub max_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            grad_tol: 1e-8,
            max_iter: 200,
            max_step: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Minimum<const N: usize> {
    pub x: [f64; N],
    pub value: f64,
    pub grad: [f64; N],
    pub iterations: usize,
    pub converged: bool,
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs<const N: usize>(a: &[f64; N]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn identity<const N: usize>() -> [[f64; N]; N] {
    let mut h = [[0.0; N]; N];
    for (i, row) in h.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    h
}

/// Minimizes `f` from `x0`. Returns `None` only when `f` is not finite at `x0`.
pub fn bfgs_minimize<const N: usize, F>(
    mut f: F,
    x0: [f64; N],
    opts: &BfgsOptions,
) -> Option<Minimum<N>>
where
    F: FnMut(&[f64; N]) -> Evaluation<N>,
{
    const ARMIJO: f64 = 1e-4;
    let (mut fx, mut g) = f(&x0)?;
    let mut x = x0;
    let mut h = identity::<N>();
    let mut fresh = true;

    for iter in 0..opts.max_iter {
        if max_abs(&g) <= opts.grad_tol {
            return Some(Minimum {
                x,
                value: fx,
                grad: g,
                iterations: iter,
                converged: true,
            });
        }

        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = -dot(&h[i], &g);
        }
        let mut slope = dot(&g, &d);
        if slope.is_nan() || slope >= 0.0 {
            h = identity();
            fresh = true;
            d = g.map(|v| -v);
            slope = dot(&g, &d);
        }
        let longest = max_abs(&d);
        if longest > opts.max_step {
            let shrink = opts.max_step / longest;
            d = d.map(|v| v * shrink);
            slope *= shrink;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial = x;
            for i in 0..N {
                trial[i] += t * d[i];
            }
            if let Some((ft, gt)) = f(&trial) {
                if ft.is_finite() && gt.iter().all(|v| v.is_finite()) {
                    let armijo = ft <= fx + ARMIJO * t * slope;
                    // Near the optimum the decrease drops below rounding in f;
                    // a smaller gradient is the only usable progress signal there.
                    let noise = 1e-13 * (1.0 + fx.abs());
                    let flat = (ft - fx).abs() <= noise && max_abs(&gt) < max_abs(&g);
                    if armijo || flat {
                        accepted = Some((trial, ft, gt));
                        break;
                    }
                }
            }
            t *= 0.5;
        }

        let Some((x_new, f_new, g_new)) = accepted else {
            if fresh {
                return Some(Minimum {
                    x,
                    value: fx,
                    grad: g,
                    iterations: iter,
                    converged: false,
                });
            }
            h = identity();
            fresh = true;
            continue;
        };

        let mut s = [0.0; N];
        let mut y = [0.0; N];
        for i in 0..N {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g[i];
        }
        let sy = dot(&s, &y);
        if sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                // rescale the identity to the observed curvature before the first update
                let scale = sy / dot(&y, &y);
                for row in h.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= scale;
                    }
                }
            }
            let rho = 1.0 / sy;
            let mut hy = [0.0; N];
            for i in 0..N {
                hy[i] = dot(&h[i], &y);
            }
            let yhy = dot(&y, &hy);
            for i in 0..N {
                for j in 0..N {
                    h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        x = x_new;
        fx = f_new;
        g = g_new;
    }

    Some(Minimum {
        x,
        value: fx,
        converged: max_abs(&g) <= opts.grad_tol,
        grad: g,
        iterations: opts.max_iter,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub derivative: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Finds `x` with `g(x) = 0` where `g` crosses from positive to negative,
/// i.e. a stationary maximum of a function whose derivative is `g`.
///
/// The crossing is bracketed by geometric expansion from `x0`, then refined
/// with Brent's method until `|g| <= tol`.
pub fn find_decreasing_root<G>(mut g: G, x0: f64, tol: f64, max_iter: usize) -> Option<Root>
where
    G: FnMut(f64) -> Option<f64>,
{
    let g0 = g(x0).filter(|v| v.is_finite())?;
    if g0.abs() <= tol {
        return Some(Root {
            x: x0,
            derivative: g0,
            iterations: 0,
            converged: true,
        });
    }

    // Walk uphill until the derivative changes sign.
    let direction = if g0 > 0.0 { 1.0 } else { -1.0 };
    let (mut lo, mut g_lo) = (x0, g0);
    let mut step = 0.125;
    let mut far = None;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let x1 = lo + direction * step;
        match g(x1).filter(|v| v.is_finite()) {
            Some(g1) if g1.abs() <= tol => {
                return Some(Root {
                    x: x1,
                    derivative: g1,
                    iterations,
                    converged: true,
                });
            }
            Some(g1) if g1.signum() != g0.signum() => {
                far = Some((x1, g1));
                break;
            }
            Some(g1) => {
                lo = x1;
                g_lo = g1;
                step *= 2.0;
            }
            // overshot into a non-finite region: retreat
            None => step *= 0.25,
        }
    }
    let (hi, g_hi) = far?;
    brent(&mut g, (lo, g_lo), (hi, g_hi), tol, max_iter, iterations)
}

fn brent<G>(
    g: &mut G,
    (a0, fa0): (f64, f64),
    (b0, fb0): (f64, f64),
    tol: f64,
    max_iter: usize,
    used: usize,
) -> Option<Root>
where
    G: FnMut(f64) -> Option<f64>,
{
    let (mut a, mut fa, mut b, mut fb) = (a0, fa0, b0, fb0);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for iter in used..max_iter {
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
        let xtol = 2.0 * f64::EPSILON * b.abs() + 0.5e-300;
        let half = 0.5 * (c - b);
        if fb.abs() <= tol || half.abs() <= xtol {
            return Some(Root {
                x: b,
                derivative: fb,
                iterations: iter,
                converged: fb.abs() <= tol,
            });
        }
        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * half * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > xtol {
            d
        } else {
            xtol.copysign(half)
        };
        fb = g(b).filter(|v| v.is_finite())?;
    }
    Some(Root {
        x: b,
        derivative: fb,
        iterations: max_iter,
        converged: fb.abs() <= tol,
    })
}
