//! Rotationally symmetric conformal metrics `h = E(r)^2 (dr^2 + r^2 dphi^2)`
//! on a disc of radius `r_b`, with their intrinsic curvature.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeometryError, Hypothesis, Result};
use crate::numerics::{self, uniform_grid, Tolerances};

/// Boundary radius of the stereographic image of a polar cap of angle pi/4.
pub const CAP_RADIUS: f64 = SQRT_2 - 1.0;

/// Sample count used when testing `K > 0` for admissibility.
pub const ADMISSIBILITY_SAMPLES: usize = 256;

/// Tolerance on `|k_h - 1|` for admissibility.
pub const UNIT_GEODESIC_TOL: f64 = 1e-8;

/// A radial conformal factor together with its first two derivatives.
///
/// Profiles are even in `r`, so `d1(0) == 0` and `d1(r) / r` has the finite
/// axis limit `d2(0)`.
pub trait RadialProfile: fmt::Debug + Send + Sync {
    fn value(&self, r: f64) -> f64;
    fn d1(&self, r: f64) -> f64;
    fn d2(&self, r: f64) -> f64;

    /// `E'(r) / r`, continuous through the axis.
    fn d1_over_r(&self, r: f64) -> f64 {
        if r == 0.0 {
            self.d2(0.0)
        } else {
            self.d1(r) / r
        }
    }

    /// Whether derivatives are closed-form rather than finite differences.
    fn is_analytic(&self) -> bool {
        true
    }
}

/// The round unit-sphere factor `2 / (1 + r^2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CapProfile;

impl RadialProfile for CapProfile {
    fn value(&self, r: f64) -> f64 {
        2.0 / (1.0 + r * r)
    }
    fn d1(&self, r: f64) -> f64 {
        r * self.d1_over_r(r)
    }
    fn d2(&self, r: f64) -> f64 {
        let u = 1.0 / (1.0 + r * r);
        -4.0 * u * u + 16.0 * r * r * u * u * u
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        let u = 1.0 / (1.0 + r * r);
        -4.0 * u * u
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantProfile(pub f64);

impl RadialProfile for ConstantProfile {
    fn value(&self, _r: f64) -> f64 {
        self.0
    }
    fn d1(&self, _r: f64) -> f64 {
        0.0
    }
    fn d2(&self, _r: f64) -> f64 {
        0.0
    }
    fn d1_over_r(&self, _r: f64) -> f64 {
        0.0
    }
}

/// `c * E(r)`.
#[derive(Debug, Clone)]
pub struct ScaledProfile {
    pub inner: Arc<dyn RadialProfile>,
    pub factor: f64,
}

impl RadialProfile for ScaledProfile {
    fn value(&self, r: f64) -> f64 {
        self.factor * self.inner.value(r)
    }
    fn d1(&self, r: f64) -> f64 {
        self.factor * self.inner.d1(r)
    }
    fn d2(&self, r: f64) -> f64 {
        self.factor * self.inner.d2(r)
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        self.factor * self.inner.d1_over_r(r)
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
}

/// Reparametrisation `rho = r / s`: the same metric written as
/// `(s E(s rho))^2 (drho^2 + rho^2 dphi^2)`.
#[derive(Debug, Clone)]
pub struct RescaledProfile {
    pub inner: Arc<dyn RadialProfile>,
    pub s: f64,
}

impl RadialProfile for RescaledProfile {
    fn value(&self, rho: f64) -> f64 {
        self.s * self.inner.value(self.s * rho)
    }
    fn d1(&self, rho: f64) -> f64 {
        self.s * self.s * self.inner.d1(self.s * rho)
    }
    fn d2(&self, rho: f64) -> f64 {
        self.s.powi(3) * self.inner.d2(self.s * rho)
    }
    fn d1_over_r(&self, rho: f64) -> f64 {
        self.s.powi(3) * self.inner.d1_over_r(self.s * rho)
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
}

/// `E(r) (1 + eps r^2)`: a smooth deformation that breaks `k_h = 1`.
#[derive(Debug, Clone)]
pub struct QuadraticPerturbation {
    pub inner: Arc<dyn RadialProfile>,
    pub eps: f64,
}

impl RadialProfile for QuadraticPerturbation {
    fn value(&self, r: f64) -> f64 {
        self.inner.value(r) * (1.0 + self.eps * r * r)
    }
    fn d1(&self, r: f64) -> f64 {
        self.inner.d1(r) * (1.0 + self.eps * r * r) + 2.0 * self.eps * r * self.inner.value(r)
    }
    fn d2(&self, r: f64) -> f64 {
        let e = self.eps;
        self.inner.d2(r) * (1.0 + e * r * r)
            + 4.0 * e * r * self.inner.d1(r)
            + 2.0 * e * self.inner.value(r)
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        self.inner.d1_over_r(r) * (1.0 + self.eps * r * r) + 2.0 * self.eps * self.inner.value(r)
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
}

/// Harmonic interpolation `E_t = E_0 E_1 / ((1 - t) E_1 + t E_0)`, i.e.
/// `1 / E_t = (1 - t) / E_0 + t / E_1`.
#[derive(Debug, Clone)]
pub struct HarmonicPath {
    pub start: Arc<dyn RadialProfile>,
    pub end: Arc<dyn RadialProfile>,
    pub t: f64,
}

impl HarmonicPath {
    // w = 1/E_t and its derivatives.
    fn reciprocal(&self, r: f64) -> (f64, f64, f64) {
        let t = self.t;
        let part = |p: &Arc<dyn RadialProfile>| {
            let (e, e1, e2) = (p.value(r), p.d1(r), p.d2(r));
            (1.0 / e, -e1 / (e * e), -e2 / (e * e) + 2.0 * e1 * e1 / (e * e * e))
        };
        let (a0, a1, a2) = part(&self.start);
        let (b0, b1, b2) = part(&self.end);
        (
            (1.0 - t) * a0 + t * b0,
            (1.0 - t) * a1 + t * b1,
            (1.0 - t) * a2 + t * b2,
        )
    }
}

impl RadialProfile for HarmonicPath {
    fn value(&self, r: f64) -> f64 {
        let (e0, e1) = (self.start.value(r), self.end.value(r));
        e0 * e1 / ((1.0 - self.t) * e1 + self.t * e0)
    }
    fn d1(&self, r: f64) -> f64 {
        let (w, w1, _) = self.reciprocal(r);
        -w1 / (w * w)
    }
    fn d2(&self, r: f64) -> f64 {
        let (w, w1, w2) = self.reciprocal(r);
        -w2 / (w * w) + 2.0 * w1 * w1 / (w * w * w)
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        let t = self.t;
        let (e0, e1) = (self.start.value(r), self.end.value(r));
        let et = self.value(r);
        et * et
            * ((1.0 - t) * self.start.d1_over_r(r) / (e0 * e0)
                + t * self.end.d1_over_r(r) / (e1 * e1))
    }
    fn is_analytic(&self) -> bool {
        self.start.is_analytic() && self.end.is_analytic()
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A profile given only by its values; derivatives come from finite
/// differences of the even extension `E(|r|)`.
#[derive(Clone)]
pub struct SampledProfile {
    f: ScalarFn,
    tol: Tolerances,
}

impl SampledProfile {
    // Below this radius `E'(r)/r` is replaced by `E''(r)`; they differ by
    // O(r^2).
    const AXIS_BAND: f64 = 1e-4;

    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, tol: Tolerances) -> Self {
        Self { f: Arc::new(f), tol }
    }

    fn even(&self) -> impl Fn(f64) -> f64 + '_ {
        move |r: f64| (self.f)(r.abs())
    }
}

impl fmt::Debug for SampledProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledProfile").field("tol", &self.tol).finish()
    }
}

impl RadialProfile for SampledProfile {
    fn value(&self, r: f64) -> f64 {
        (self.f)(r.abs())
    }
    fn d1(&self, r: f64) -> f64 {
        if r == 0.0 {
            // One-sided, so an odd term at the axis stays visible.
            let h = 1e-5;
            let f = |x: f64| (self.f)(x);
            return (-3.0 * f(0.0) + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
        }
        numerics::derivative(self.even(), r, 1, &self.tol).unwrap_or(f64::NAN)
    }
    fn d2(&self, r: f64) -> f64 {
        numerics::derivative(self.even(), r, 2, &self.tol).unwrap_or(f64::NAN)
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        if r.abs() < Self::AXIS_BAND {
            self.d2(r)
        } else {
            self.d1(r) / r
        }
    }
    fn is_analytic(&self) -> bool {
        false
    }
}

/// The metric `E(r)^2 (dr^2 + r^2 dphi^2)` on the disc `r <= r_b`.
#[derive(Debug, Clone)]
pub struct RadialConformalMetric {
    profile: Arc<dyn RadialProfile>,
    r_b: f64,
    label: String,
}

impl RadialConformalMetric {
    /// Validates positivity of `E` on the closed disc and evenness at the axis.
    pub fn new(
        profile: Arc<dyn RadialProfile>,
        r_b: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !(r_b.is_finite() && r_b > 0.0) {
            return Err(GeometryError::domain("r_b", r_b, "(0, inf)"));
        }
        for r in uniform_grid(0.0, r_b, 65) {
            let e = profile.value(r);
            if !(e.is_finite() && e > 0.0) {
                return Err(GeometryError::domain("E(r)", e, format!("(0, inf) at r = {r}")));
            }
        }
        let e0 = profile.value(0.0);
        let slope = profile.d1(0.0);
        if !(slope.abs() <= 1e-8 * e0.max(1.0)) {
            return Err(GeometryError::domain("E'(0)", slope, "{0} (smooth axis)"));
        }
        Ok(Self {
            profile,
            r_b,
            label: label.into(),
        })
    }

    /// Unit-sphere cap of polar angle pi/4.
    pub fn cap() -> Self {
        Self::new(Arc::new(CapProfile), CAP_RADIUS, "cap").expect("cap profile is valid")
    }

    pub fn flat(r_b: f64) -> Result<Self> {
        Self::new(Arc::new(ConstantProfile(1.0)), r_b, "flat")
    }

    pub fn from_fn(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r_b: f64,
        tol: Tolerances,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::new(Arc::new(SampledProfile::new(f, tol)), r_b, label)
    }

    /// `c * E`, the metric scaled by `c^2`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            Arc::new(ScaledProfile {
                inner: self.profile.clone(),
                factor,
            }),
            self.r_b,
            format!("{} x {factor}", self.label),
        )
    }

    /// The same metric in the coordinate `rho = r / r_b`, so the boundary
    /// sits at `rho = 1`.
    pub fn unit_disc(&self) -> Self {
        Self {
            profile: Arc::new(RescaledProfile {
                inner: self.profile.clone(),
                s: self.r_b,
            }),
            r_b: 1.0,
            label: format!("{} (unit disc)", self.label),
        }
    }

    pub fn perturbed(&self, eps: f64) -> Result<Self> {
        Self::new(
            Arc::new(QuadraticPerturbation {
                inner: self.profile.clone(),
                eps,
            }),
            self.r_b,
            format!("{} (1 + {eps} r^2)", self.label),
        )
    }

    pub fn r_b(&self) -> f64 {
        self.r_b
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn profile(&self) -> &Arc<dyn RadialProfile> {
        &self.profile
    }
    pub fn e(&self, r: f64) -> f64 {
        self.profile.value(r)
    }
    pub fn de(&self, r: f64) -> f64 {
        self.profile.d1(r)
    }
    pub fn d2e(&self, r: f64) -> f64 {
        self.profile.d2(r)
    }
    pub fn de_over_r(&self, r: f64) -> f64 {
        self.profile.d1_over_r(r)
    }

    pub(crate) fn check_radius(&self, r: f64) -> Result<()> {
        if r.is_finite() && (0.0..=self.r_b * (1.0 + 1e-12)).contains(&r) {
            Ok(())
        } else {
            Err(GeometryError::domain("r", r, format!("[0, {}]", self.r_b)))
        }
    }
}

/// Gauss curvature `K = -(1/E^2) Lap log E`, with the Laplacian taken in the
/// flat polar chart. On the axis `(log E)'/r` is replaced by its limit.
pub fn gauss_curvature(m: &RadialConformalMetric, r: f64) -> Result<f64> {
    m.check_radius(r)?;
    let e = m.e(r);
    let e1 = m.de(r);
    let e2 = m.d2e(r);
    let q = m.de_over_r(r);
    let log_dd = e2 / e - (e1 / e).powi(2);
    let log_d_over_r = q / e;
    Ok(-(log_dd + log_d_over_r) / (e * e))
}

/// Geodesic curvature of the circle `r = radius`, oriented by the inner
/// normal: `k = (1/E) (1/R + E'(R)/E(R))`.
pub fn geodesic_curvature(m: &RadialConformalMetric, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(GeometryError::domain("R", radius, format!("(0, {}]", m.r_b)));
    }
    m.check_radius(radius)?;
    let e = m.e(radius);
    Ok((1.0 / radius + m.de(radius) / e) / e)
}

/// `int_D K dA + oint k ds - 2 pi`; zero for any smooth disc metric.
pub fn gauss_bonnet_residual(m: &RadialConformalMetric, tol: &Tolerances) -> Result<f64> {
    // K E^2 r = -(r (log E)'' + (log E)'), smooth through the axis.
    let integrand = |r: f64| {
        let e = m.e(r);
        let l1 = m.de(r) / e;
        let l2 = m.d2e(r) / e - l1 * l1;
        -(r * l2 + l1)
    };
    let area_term = 2.0 * PI * numerics::integrate(integrand, 0.0, m.r_b, tol)?;
    let r_b = m.r_b;
    let length = 2.0 * PI * r_b * m.e(r_b);
    let boundary_term = length * geodesic_curvature(m, r_b)?;
    Ok(area_term + boundary_term - 2.0 * PI)
}

/// The harmonic interpolation between two factors at time `t`.
pub fn interpolate_path(
    m0: &RadialConformalMetric,
    m1: &RadialConformalMetric,
    t: f64,
) -> Result<RadialConformalMetric> {
    if !(0.0..=1.0).contains(&t) {
        return Err(GeometryError::domain("t", t, "[0, 1]"));
    }
    if m0.r_b != m1.r_b {
        return Err(GeometryError::domain(
            "r_b",
            m1.r_b,
            format!("{{{}}} (endpoints must share the disc)", m0.r_b),
        ));
    }
    RadialConformalMetric::new(
        Arc::new(HarmonicPath {
            start: m0.profile.clone(),
            end: m1.profile.clone(),
            t,
        }),
        m0.r_b,
        format!("path({}, {}; t = {t})", m0.label, m1.label),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub t: f64,
    /// `(r, K(r))` pairs.
    pub samples: Vec<(f64, f64)>,
    pub min_k: f64,
    pub k_boundary: f64,
    pub gauss_bonnet_residual: f64,
}

impl CurvatureReport {
    pub fn compute(
        m: &RadialConformalMetric,
        t: f64,
        n_r: usize,
        tol: &Tolerances,
    ) -> Result<Self> {
        let samples = uniform_grid(0.0, m.r_b, n_r.max(2))
            .into_iter()
            .map(|r| gauss_curvature(m, r).map(|k| (r, k)))
            .collect::<Result<Vec<_>>>()?;
        let min_k = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        Ok(Self {
            t,
            samples,
            min_k,
            k_boundary: geodesic_curvature(m, m.r_b)?,
            gauss_bonnet_residual: gauss_bonnet_residual(m, tol)?,
        })
    }
}

/// Checks `K > 0` on `n_r` samples and `|k_h - 1| <= 1e-8` at the boundary.
pub fn check_admissible(m: &RadialConformalMetric, n_r: usize) -> Result<()> {
    for r in uniform_grid(0.0, m.r_b, n_r.max(2)) {
        let k = gauss_curvature(m, r)?;
        if !(k > 0.0) {
            return Err(GeometryError::hypothesis(
                Hypothesis::PositiveGaussCurvature,
                format!("K = {k:e} at r = {r} for metric `{}`", m.label),
            ));
        }
    }
    let kb = geodesic_curvature(m, m.r_b)?;
    if !((kb - 1.0).abs() <= UNIT_GEODESIC_TOL) {
        return Err(GeometryError::hypothesis(
            Hypothesis::UnitGeodesicCurvature,
            format!("k_h = {kb} at r_b = {} for metric `{}`", m.r_b, m.label),
        ));
    }
    Ok(())
}

/// Curvature reports along the harmonic path at `n_t` uniform times.
///
/// Both endpoints must be admissible; the reports let the caller confirm
/// that every intermediate metric is too.
pub fn path_invariant_report(
    m0: &RadialConformalMetric,
    m1: &RadialConformalMetric,
    n_t: usize,
    n_r: usize,
    tol: &Tolerances,
) -> Result<Vec<CurvatureReport>> {
    check_admissible(m0, ADMISSIBILITY_SAMPLES)?;
    check_admissible(m1, ADMISSIBILITY_SAMPLES)?;
    let times = match n_t {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => uniform_grid(0.0, 1.0, n_t),
    };
    times
        .into_iter()
        .map(|t| CurvatureReport::compute(&interpolate_path(m0, m1, t)?, t, n_r, tol))
        .collect()
}
