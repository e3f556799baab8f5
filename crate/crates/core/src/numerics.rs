//! Root finding for the implicit right-division equations and the
//! least-squares fitter for the functional equation
//! `f(z2) + e^{-z2} f(z1) = f(z1 + z2)`, whose continuous solutions are
//! `K (1 - e^{-z})`.
//!
//! Nothing here certifies roots globally: `root1d` finds sign changes on a
//! grid (tangential roots can be missed) and `root2d` finds what a multistart
//! Newton iteration converges to.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box, `lower[i] < upper[i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox<const D: usize> {
    #[serde(with = "serde_arrays")]
    pub lower: [f64; D],
    #[serde(with = "serde_arrays")]
    pub upper: [f64; D],
}

impl<const D: usize> SearchBox<D> {
    pub fn new(lower: [f64; D], upper: [f64; D]) -> Result<Self> {
        for i in 0..D {
            if !lower[i].is_finite() || !upper[i].is_finite() || lower[i] >= upper[i] {
                return Err(Error::InvalidBox(format!(
                    "dimension {i}: [{}, {}]",
                    lower[i], upper[i]
                )));
            }
        }
        Ok(SearchBox { lower, upper })
    }

    /// `[-half_width, half_width]^D`
    pub fn cube(half_width: f64) -> Result<Self> {
        Self::new([-half_width; D], [half_width; D])
    }

    /// Same centre, every side scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = *self;
        for i in 0..D {
            let c = 0.5 * (self.lower[i] + self.upper[i]);
            let h = 0.5 * (self.upper[i] - self.lower[i]) * factor;
            out.lower[i] = c - h;
            out.upper[i] = c + h;
        }
        out
    }

    pub fn contains(&self, p: &[f64; D], slack: f64) -> bool {
        (0..D).all(|i| p[i] >= self.lower[i] - slack && p[i] <= self.upper[i] + slack)
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }
}

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(v: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        v.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(
        d: De,
    ) -> Result<[f64; D], De::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"box dimension"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Number of grid intervals.
    pub resolution: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            resolution: 10_000,
            tol: 1e-12,
        }
    }
}

/// Roots closer than this are merged.
pub const ROOT1D_DEDUP: f64 = 1e-9;

/// All roots of `f` on the interval that show up as a sign change (or an
/// exact zero) on the scan grid, refined by bisection and sorted.
pub fn root1d(f: impl Fn(f64) -> f64, interval: &SearchBox<1>, cfg: &ScanConfig) -> Vec<f64> {
    let (lo, hi) = (interval.lower[0], interval.upper[0]);
    let n = cfg.resolution.max(1);
    let step = (hi - lo) / n as f64;
    let node = |i: usize| if i == n { hi } else { lo + step * i as f64 };

    let mut roots: Vec<f64> = Vec::new();
    let mut x_prev = node(0);
    let mut f_prev = f(x_prev);
    if f_prev == 0.0 {
        roots.push(x_prev);
    }
    for i in 1..=n {
        let x = node(i);
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if f_prev.is_finite() && fx.is_finite() && f_prev * fx < 0.0 {
            roots.push(bisect(&f, x_prev, f_prev, x, cfg.tol));
        }
        x_prev = x;
        f_prev = fx;
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() <= ROOT1D_DEDUP);
    roots
}

fn bisect(f: &impl Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64, tol: f64) -> f64 {
    let mut fb = f(b);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    if fa.abs() <= fb.abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Starts per dimension of the multistart grid.
    pub grid: usize,
    pub fd_step: f64,
    /// Residual (max-norm) at which an iterate counts as a root.
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Roots closer than this are merged.
    pub dedup: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            grid: 5,
            fd_step: 1e-6,
            tol: 1e-10,
            max_iter: 100,
            max_halvings: 30,
            dedup: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root2dResult {
    /// Distinct roots inside the box, sorted lexicographically.
    pub roots: Vec<[f64; 2]>,
    pub starts: usize,
    pub converged_starts: usize,
}

impl Root2dResult {
    pub fn nonconvergent(&self) -> bool {
        self.converged_starts == 0
    }
}

fn max_norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

/// Central-difference Jacobian, `J[i][j] = ∂f_i/∂x_j`.
pub fn fd_jacobian(f: &impl Fn([f64; 2]) -> [f64; 2], x: [f64; 2], h: f64) -> [[f64; 2]; 2] {
    let mut jac = [[0.0; 2]; 2];
    for j in 0..2 {
        let hj = h * x[j].abs().max(1.0);
        let mut xp = x;
        let mut xm = x;
        xp[j] += hj;
        xm[j] -= hj;
        let (fp, fm) = (f(xp), f(xm));
        for i in 0..2 {
            jac[i][j] = (fp[i] - fm[i]) / (xp[j] - xm[j]);
        }
    }
    jac
}

/// Damped Newton from `x0`; `None` if the iteration stalls, hits a singular
/// Jacobian or leaves the finite reals.
pub fn damped_newton(
    f: &impl Fn([f64; 2]) -> [f64; 2],
    x0: [f64; 2],
    cfg: &NewtonConfig,
) -> Option<[f64; 2]> {
    let mut x = x0;
    let mut fx = f(x);
    let mut res = max_norm(fx);
    if !res.is_finite() {
        return None;
    }
    let mut polish = 2;
    for _ in 0..cfg.max_iter {
        if res <= cfg.tol {
            if polish == 0 {
                return Some(x);
            }
            polish -= 1;
        }
        let j = fd_jacobian(f, x, cfg.fd_step);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = j.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
        if !det.is_finite() || det.abs() <= 1e-14 * scale * scale {
            return (res <= cfg.tol).then_some(x);
        }
        let dx = [
            (j[1][1] * fx[0] - j[0][1] * fx[1]) / det,
            (j[0][0] * fx[1] - j[1][0] * fx[0]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=cfg.max_halvings {
            let trial = [x[0] - lambda * dx[0], x[1] - lambda * dx[1]];
            let ft = f(trial);
            let rt = max_norm(ft);
            if rt.is_finite() && rt < res {
                x = trial;
                fx = ft;
                res = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return (res <= cfg.tol).then_some(x);
        }
    }
    (res <= cfg.tol).then_some(x)
}

/// Multistart damped Newton over a `grid × grid` lattice spanning the box.
pub fn root2d(
    f: impl Fn([f64; 2]) -> [f64; 2] + Sync,
    bx: &SearchBox<2>,
    cfg: &NewtonConfig,
) -> Root2dResult {
    let g = cfg.grid.max(1);
    let coord = |i: usize, d: usize| {
        if g == 1 {
            0.5 * (bx.lower[d] + bx.upper[d])
        } else {
            bx.lower[d] + bx.width(d) * i as f64 / (g - 1) as f64
        }
    };
    let starts: Vec<[f64; 2]> = (0..g * g)
        .map(|s| [coord(s / g, 0), coord(s % g, 1)])
        .collect();
    let outcomes: Vec<Option<[f64; 2]>> = starts
        .par_iter()
        .map(|&x0| damped_newton(&f, x0, cfg))
        .collect();

    let converged_starts = outcomes.iter().filter(|o| o.is_some()).count();
    let slack = 1e-9 * bx.width(0).max(bx.width(1));
    let mut roots: Vec<[f64; 2]> = Vec::new();
    for r in outcomes.into_iter().flatten() {
        if !bx.contains(&r, slack) {
            continue;
        }
        if roots
            .iter()
            .all(|k| max_norm([k[0] - r[0], k[1] - r[1]]) > cfg.dedup)
        {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    Root2dResult {
        roots,
        starts: starts.len(),
        converged_starts,
    }
}

/// Samples with `|z|` below this are excluded from the fit (removable 0/0).
pub const FIT_MIN_ABS_Z: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(rename = "K")]
    pub k: f64,
    pub rms_residual: f64,
    pub max_residual: f64,
    pub n_samples: usize,
}

/// Least-squares fit of `f(z) ≈ K (1 - e^{-z})`.
pub fn functional_fit(samples: &[(f64, f64)]) -> Result<FitResult> {
    fit_against(samples, |z| -(-z).exp_m1())
}

/// Least-squares fit of `f(z) ≈ K basis(z)` over samples with `|z| ≥ 1e-3`.
pub fn fit_against(samples: &[(f64, f64)], basis: impl Fn(f64) -> f64) -> Result<FitResult> {
    let used: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(z, _)| z.abs() >= FIT_MIN_ABS_Z)
        .map(|&(z, fz)| (basis(z), fz))
        .collect();
    if used.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: used.len(),
        });
    }
    let num: f64 = used.iter().map(|(b, fz)| b * fz).sum();
    let den: f64 = used.iter().map(|(b, _)| b * b).sum();
    let k = num / den;
    let (mut sq, mut worst) = (0.0, 0.0f64);
    for (b, fz) in &used {
        let r = (fz - k * b).abs();
        sq += r * r;
        worst = worst.max(r);
    }
    Ok(FitResult {
        k,
        rms_residual: (sq / used.len() as f64).sqrt(),
        max_residual: worst,
        n_samples: used.len(),
    })
}

/// `max |f(z2) + e^{-z2} f(z1) - f(z1 + z2)|` over all ordered pairs.
pub fn functional_equation_defect(f: impl Fn(f64) -> f64, zs: &[f64]) -> f64 {
    let values: Vec<f64> = zs.iter().map(|&z| f(z)).collect();
    let mut worst: f64 = 0.0;
    for (i, &z1) in zs.iter().enumerate() {
        for (j, &z2) in zs.iter().enumerate() {
            let lhs = values[j] + (-z2).exp() * values[i];
            worst = worst.max((lhs - f(z1 + z2)).abs());
        }
    }
    worst
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(lo: f64, hi: f64) -> SearchBox<1> {
        SearchBox::new([lo], [hi]).unwrap()
    }

    #[test]
    fn box_validation() {
        assert!(SearchBox::new([1.0], [1.0]).is_err());
        assert!(SearchBox::new([0.0, 2.0], [1.0, 1.0]).is_err());
        let b = SearchBox::<2>::cube(10.0).unwrap().scaled(2.0);
        assert_eq!(b.lower, [-20.0, -20.0]);
    }

    #[test]
    fn root1d_examples() {
        let cfg = ScanConfig::default();
        assert_eq!(root1d(|x| x, &unit(-1.0, 1.0), &cfg), vec![0.0]);
        let r = root1d(|x| x * x - 2.0, &unit(0.0, 2.0), &cfg);
        assert_eq!(r.len(), 1);
        // frozen bisection oracle value
        assert!((r[0] - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(root1d(|x| x * x + 1.0, &unit(-3.0, 3.0), &cfg).is_empty());
    }

    #[test]
    fn root1d_finds_every_sign_change() {
        let r = root1d(f64::sin, &unit(-10.0, 10.0), &ScanConfig::default());
        assert_eq!(r.len(), 7);
        for (k, x) in (-3..=3).zip(&r) {
            assert!((x - k as f64 * std::f64::consts::PI).abs() < 1e-11);
        }
    }

    #[test]
    fn newton_linear_system() {
        let f = |v: [f64; 2]| [2.0 * v[0] + v[1] - 3.0, v[0] - v[1]];
        let res = root2d(f, &SearchBox::cube(10.0).unwrap(), &NewtonConfig::default());
        assert_eq!(res.roots.len(), 1);
        assert!(max_norm([res.roots[0][0] - 1.0, res.roots[0][1] - 1.0]) < 1e-10);
    }

    #[test]
    fn newton_two_roots() {
        // circle meets the line y = x twice
        let f = |v: [f64; 2]| [v[0] * v[0] + v[1] * v[1] - 2.0, v[0] - v[1]];
        let res = root2d(f, &SearchBox::cube(3.0).unwrap(), &NewtonConfig::default());
        assert_eq!(res.roots.len(), 2);
        assert!((res.roots[0][0] + 1.0).abs() < 1e-9 && (res.roots[1][0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn newton_no_root() {
        let f = |v: [f64; 2]| [v[0] * v[0] + 1.0, v[1]];
        let res = root2d(f, &SearchBox::cube(3.0).unwrap(), &NewtonConfig::default());
        assert!(res.roots.is_empty());
        assert!(res.nonconvergent());
    }

    #[test]
    fn fd_jacobian_matches_analytic() {
        let f = |v: [f64; 2]| [v[0] * v[0] * v[1] + 3.0 * v[1], v[0].powi(3) - v[1] * v[1]];
        for x in [[1.0, 2.0], [-3.0, 0.5], [0.1, -4.0]] {
            let j = fd_jacobian(&f, x, 1e-6);
            let exact = [
                [2.0 * x[0] * x[1], x[0] * x[0] + 3.0],
                [3.0 * x[0] * x[0], -2.0 * x[1]],
            ];
            for i in 0..2 {
                for k in 0..2 {
                    let e = exact[i][k];
                    assert!(
                        (j[i][k] - e).abs() <= 1e-6 * e.abs().max(1.0),
                        "{j:?} vs {exact:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn fit_recovers_family_constant() {
        let samples: Vec<(f64, f64)> = linspace(-5.0, 5.0, 50)
            .into_iter()
            .map(|z| (z, 2.0 * (1.0 - (-z).exp())))
            .collect();
        let fit = functional_fit(&samples).unwrap();
        assert!((fit.k - 2.0).abs() < 1e-12);
        assert!(fit.rms_residual <= 1e-12);
        assert_eq!(fit.n_samples, 50);
    }

    #[test]
    fn fit_needs_samples() {
        assert_eq!(
            functional_fit(&[(0.0, 0.0), (1e-4, 0.0), (1.0, 0.5)]),
            Err(Error::InsufficientSamples { needed: 2, got: 1 })
        );
    }

    #[test]
    fn functional_equation_examples() {
        let f = |z: f64| 2.0 * (1.0 - (-z).exp());
        let lhs = f(3.0) + (-3.0f64).exp() * f(1.0);
        assert!((lhs - 2.0 * (1.0 - (-4.0f64).exp())).abs() < 1e-15);
        let zs = linspace(-2.0, 2.0, 20);
        assert!(functional_equation_defect(f, &zs) < 1e-12);
        let g = |z: f64| 2.0 * (1.0 - (-z).exp()) + 0.01 * z * z;
        assert!(functional_equation_defect(g, &zs) > 1e-4);
    }
}
