//! Shared numerical kernels: adaptive quadrature, bracketing root search and
//! Richardson-extrapolated finite differences.
//!
//! Everything here is a pure function of its inputs. Geometry modules prefer
//! analytic derivatives and only fall back to [`derivative`] when a profile
//! does not supply them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::NumericsError;

/// Numerical knobs shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Absolute quadrature tolerance.
    pub quad_tol: f64,
    /// Final bracket width for root refinement.
    pub root_tol: f64,
    /// Base step for finite differences.
    pub fd_step: f64,
    /// Default radial sample count.
    pub grid_n: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: 1e-10,
            root_tol: 1e-12,
            fd_step: 1e-6,
            grid_n: 2048,
        }
    }
}

impl Tolerances {
    pub const MIN_GRID_N: usize = 16;

    pub fn validate(&self) -> Result<(), NumericsError> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(NumericsError::InvalidTolerance { name, value: v })
            }
        };
        positive("quad_tol", self.quad_tol)?;
        positive("root_tol", self.root_tol)?;
        positive("fd_step", self.fd_step)?;
        if self.grid_n < Self::MIN_GRID_N {
            return Err(NumericsError::InvalidTolerance {
                name: "grid_n",
                value: self.grid_n as f64,
            });
        }
        Ok(())
    }

    pub fn with_grid_n(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }

    /// Uniform grid of `grid_n` nodes on `[a, b]`, endpoints included.
    pub fn uniform_grid(&self, a: f64, b: f64) -> Vec<f64> {
        uniform_grid(a, b, self.grid_n)
    }
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => {
            let h = (b - a) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_SEGMENTS: usize = 4000;

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, NumericsError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { x, value: y })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += w * pair;
        // Odd Kronrod nodes coincide with the Gauss nodes.
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    // Floor the estimate at roundoff level of the segment contribution.
    let error = error.max(50.0 * f64::EPSILON * value.abs());
    Ok(Segment { a, b, value, error })
}

/// Adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
///
/// Segments with the largest error estimate are bisected until the summed
/// estimate falls below `tol.quad_tol`. The integrand is never evaluated at
/// the endpoints.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerances,
) -> Result<f64, NumericsError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(NumericsError::BadInterval { lo: a, hi: b });
    }
    if a == b {
        return Ok(0.0);
    }
    let first = gauss_kronrod(&f, a, b)?;
    let mut total_err = first.error;
    let mut heap = BinaryHeap::from([first]);
    while total_err > tol.quad_tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(NumericsError::QuadratureStalled {
                lo: a,
                hi: b,
                estimate: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty here");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Cannot split further in floating point; accept what we have.
            heap.push(worst);
            break;
        }
        let left = gauss_kronrod(&f, worst.a, mid)?;
        let right = gauss_kronrod(&f, mid, worst.b)?;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    Ok(heap.iter().map(|s| s.value).sum())
}

/// A root located by [`find_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    /// The function touches zero without changing sign (double root within
    /// `root_tol`).
    pub tangential: bool,
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, width: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if !fm.is_finite() {
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section search for the extremum of `f` on `[a, b]` whose value is
/// closest to zero; `maximize` selects the direction.
fn golden_extremum<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, maximize: bool) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let key = |y: f64| if maximize { -y } else { y };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if key(fc) < key(fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if key(fc) < key(fd) {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Locates every root of `f` on `[lo, hi]`.
///
/// The interval is cut into `n_seed` uniform brackets. Sign changes are
/// refined by bisection down to `tol.root_tol`. Where the samples show a
/// local extremum heading towards zero without a sign change, the extremum
/// is located; if it crosses zero the two roots are bisected separately, and
/// if it touches zero within `root_tol` a single root is reported with
/// `tangential = true`. Non-finite samples are skipped.
/// Tightens a simple root to adjacent floating-point numbers by bisection on
/// `[x - w, x + w]`. Returns `x` unchanged if that interval has no sign change.
pub fn polish_root<F: Fn(f64) -> f64>(f: F, x: f64, w: f64) -> f64 {
    let (a, b) = (x - w, x + w);
    let (fa, fb) = (f(a), f(b));
    if !(fa.is_finite() && fb.is_finite()) || fa == 0.0 || fb == 0.0 || fa.signum() == fb.signum() {
        return x;
    }
    bisect(&f, a, b, fa, 0.0)
}

pub fn find_roots<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    n_seed: usize,
    tol: &Tolerances,
) -> Result<Vec<Root>, NumericsError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::BadInterval { lo, hi });
    }
    let n = n_seed.max(2);
    let xs = uniform_grid(lo, hi, n + 1);
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    if ys.iter().all(|y| !y.is_finite()) {
        return Err(NumericsError::NoFiniteSamples { lo, hi });
    }

    let mut roots: Vec<Root> = Vec::new();
    for i in 0..n {
        let (y0, y1) = (ys[i], ys[i + 1]);
        if !(y0.is_finite() && y1.is_finite()) {
            continue;
        }
        if y0 == 0.0 {
            roots.push(Root { x: xs[i], tangential: false });
        } else if y1 != 0.0 && y0.signum() != y1.signum() {
            let x = bisect(&f, xs[i], xs[i + 1], y0, tol.root_tol);
            roots.push(Root { x, tangential: false });
        }
    }
    if ys[n] == 0.0 {
        roots.push(Root { x: xs[n], tangential: false });
    }

    // Hidden pairs and touching roots between samples of equal sign.
    for i in 1..n {
        let (ya, yb, yc) = (ys[i - 1], ys[i], ys[i + 1]);
        if !(ya.is_finite() && yb.is_finite() && yc.is_finite()) {
            continue;
        }
        if ya == 0.0 || yb == 0.0 || yc == 0.0 {
            continue;
        }
        let same_sign = ya.signum() == yb.signum() && yb.signum() == yc.signum();
        if !same_sign {
            continue;
        }
        let toward_zero = (yb.abs() <= ya.abs()) && (yb.abs() <= yc.abs());
        if !toward_zero || (yb == ya && yb == yc) {
            continue;
        }
        let maximize = yb < 0.0;
        let (xe, ye) = golden_extremum(&f, xs[i - 1], xs[i + 1], maximize);
        if !ye.is_finite() {
            continue;
        }
        if ye.abs() <= tol.root_tol {
            roots.push(Root { x: xe, tangential: true });
        } else if ye.signum() != yb.signum() {
            roots.push(Root {
                x: bisect(&f, xs[i - 1], xe, ya, tol.root_tol),
                tangential: false,
            });
            roots.push(Root {
                x: bisect(&f, xe, xs[i + 1], ye, tol.root_tol),
                tangential: false,
            });
        }
    }

    roots.sort_by(|a, b| a.x.total_cmp(&b.x));
    let merge_width = 4.0 * tol.root_tol;
    roots.dedup_by(|later, earlier| {
        if (later.x - earlier.x).abs() <= merge_width {
            earlier.tangential |= later.tangential;
            true
        } else {
            false
        }
    });
    Ok(roots)
}

/// Finite-difference derivative of order 1 or 2 at `x`.
///
/// Ridders' scheme: a tableau of central differences with shrinking steps,
/// Richardson-extrapolated, returning the entry with the smallest error
/// estimate.
pub fn derivative<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    order: u8,
    tol: &Tolerances,
) -> Result<f64, NumericsError> {
    if order != 1 && order != 2 {
        return Err(NumericsError::UnsupportedOrder(order));
    }
    let eval = |t: f64| {
        let y = f(t);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFinite { x: t, value: y })
        }
    };
    let central = |h: f64| -> Result<f64, NumericsError> {
        match order {
            1 => Ok((eval(x + h)? - eval(x - h)?) / (2.0 * h)),
            _ => Ok((eval(x + h)? - 2.0 * eval(x)? + eval(x - h)?) / (h * h)),
        }
    };

    const LEVELS: usize = 10;
    const SHRINK: f64 = 1.4;
    let shrink2 = SHRINK * SHRINK;
    let mut h = 1e3 * tol.fd_step * x.abs().max(1.0);
    let mut table = [[0.0f64; LEVELS]; LEVELS];
    table[0][0] = central(h)?;
    let mut best = table[0][0];
    let mut best_err = f64::INFINITY;
    for i in 1..LEVELS {
        h /= SHRINK;
        table[0][i] = central(h)?;
        let mut fac = shrink2;
        for j in 1..=i {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= shrink2;
            let err = (table[j][i] - table[j - 1][i])
                .abs()
                .max((table[j][i] - table[j - 1][i - 1]).abs());
            if err <= best_err {
                best_err = err;
                best = table[j][i];
            }
        }
        if (table[i][i] - table[i - 1][i - 1]).abs() >= 2.0 * best_err {
            break;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn integrate_examples() {
        assert!((integrate(|x| x, 0.0, 1.0, &tol()).unwrap() - 0.5).abs() < 1e-15);
        let pi = integrate(|x| 4.0 / (1.0 + x * x), 0.0, 1.0, &tol()).unwrap();
        assert!((pi - PI).abs() < 1e-10);
        let two = integrate(f64::sin, 0.0, PI, &tol()).unwrap();
        assert!((two - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrate_reports_offending_abscissa() {
        let err = integrate(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &tol()).unwrap_err();
        match err {
            NumericsError::NonFinite { x, .. } => assert!(x > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integrate_empty_and_reversed() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, &tol()).unwrap(), 0.0);
        assert!(integrate(|x| x, 1.0, 0.0, &tol()).is_err());
    }

    #[test]
    fn root_examples() {
        let r = find_roots(|x| x * x - 1.0, 0.0, 2.0, 512, &tol()).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].x - 1.0).abs() < 1e-12);
        assert!(find_roots(|x| x * x + 1.0, 0.0, 2.0, 512, &tol()).unwrap().is_empty());
        let r = find_roots(f64::sin, 1.0, 7.0, 512, &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].x - PI).abs() < 1e-12);
        assert!((r[1].x - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn tangential_root_is_flagged() {
        // Double root at 0.3 + 1/7, between seeds.
        let c = 0.3 + 1.0 / 7.0;
        let r = find_roots(|x| (x - c) * (x - c), 0.0, 1.0, 16, &tol()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].tangential);
        assert!((r[0].x - c).abs() < 1e-6);
    }

    #[test]
    fn hidden_pair_between_seeds_is_split() {
        // Two roots 1e-3 apart inside one seed bracket of width 1/16.
        let f = |x: f64| -((x - 0.52) * (x - 0.521));
        let r = find_roots(f, 0.0, 1.0, 16, &tol()).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].x - 0.52).abs() < 1e-11);
        assert!((r[1].x - 0.521).abs() < 1e-11);
        assert!(!r[0].tangential && !r[1].tangential);
    }

    #[test]
    fn roots_require_some_finite_sample() {
        assert!(matches!(
            find_roots(|_| f64::NAN, 0.0, 1.0, 8, &tol()),
            Err(NumericsError::NoFiniteSamples { .. })
        ));
    }

    #[test]
    fn derivative_examples() {
        let d1 = derivative(|x| x * x * x, 2.0, 1, &tol()).unwrap();
        assert!((d1 - 12.0).abs() < 1e-7, "{d1}");
        let d2 = derivative(|x| x * x * x, 2.0, 2, &tol()).unwrap();
        assert!((d2 - 12.0).abs() < 1e-5, "{d2}");
        assert_eq!(derivative(|_| 3.5, 0.7, 1, &tol()).unwrap(), 0.0);
    }

    #[test]
    fn derivative_relative_accuracy() {
        let d = derivative(f64::exp, 1.3, 1, &tol()).unwrap();
        assert!(((d - 1.3f64.exp()) / d).abs() < 1e-8);
        let d = derivative(f64::sin, 0.4, 2, &tol()).unwrap();
        assert!((d + 0.4f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn derivative_out_of_domain() {
        assert!(derivative(f64::sqrt, 0.0, 1, &tol()).is_err());
        assert!(derivative(|x| x, 0.0, 3, &tol()).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerances::default().validate().is_ok());
        assert!(Tolerances::default().with_grid_n(8).validate().is_err());
        let bad = Tolerances { quad_tol: 0.0, ..Tolerances::default() };
        assert!(bad.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn integrate_is_linear(alpha in -3.0f64..3.0, beta in -3.0f64..3.0, b in 0.1f64..4.0) {
                let t = tol();
                let f = |x: f64| (x * 1.7).sin() + x * x;
                let g = |x: f64| (-x).exp() / (1.0 + x);
                let lhs = integrate(|x| alpha * f(x) + beta * g(x), 0.0, b, &t).unwrap();
                let rhs = alpha * integrate(f, 0.0, b, &t).unwrap() + beta * integrate(g, 0.0, b, &t).unwrap();
                prop_assert!((lhs - rhs).abs() <= 3.0 * t.quad_tol);
            }

            #[test]
            fn monotone_function_has_one_root(c in 0.05f64..1.95, k in 0.2f64..5.0) {
                let r = find_roots(|x| (x - c) * k + (x - c).powi(3), 0.0, 2.0, 512, &tol()).unwrap();
                prop_assert_eq!(r.len(), 1);
                prop_assert!((r[0].x - c).abs() < 1e-11);
            }

            #[test]
            fn derivative_inverts_quadrature(x in 0.2f64..2.8) {
                let t = tol();
                let f = |s: f64| (s * s).cos() + 0.5 * s;
                let antiderivative = |s: f64| integrate(f, 0.0, s, &t).unwrap();
                let d = derivative(antiderivative, x, 1, &t).unwrap();
                prop_assert!((d - f(x)).abs() < 1e-6);
            }
        }
    }
}
