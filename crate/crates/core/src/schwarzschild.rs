//! A polar cap of the coordinate sphere `|x - (0, 0, sqrt2 gamma)| = gamma`
//! inside the spatial Schwarzschild metric `g = phi^4 g_e`,
//! `phi = 1 + m / (2 |x|)`.
//!
//! The cap `0 <= theta <= pi/4` meets the coordinate sphere `|x| = gamma`
//! orthogonally. Stereographic coordinates with `cos theta = 2/(1 + r^2) - 1`
//! make its induced metric conformally flat on the disc `r <= sqrt2 - 1`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::sync::Arc;

use serde::Serialize;

use crate::conformal_disc::{RadialConformalMetric, RadialProfile, CAP_RADIUS};
use crate::embedding::{extrinsic_at, free_boundary_residuals, FreeBoundaryResiduals, RevolutionEmbedding};
use crate::error::{GeometryError, Result};
use crate::numerics::{self, Root, Tolerances};
use crate::series::ExactRational;

const THREE_PLUS_TWO_SQRT2: f64 = 3.0 + 2.0 * SQRT_2;
const TWO_POW_5_2: f64 = 4.0 * SQRT_2;
const TWO_POW_3_2: f64 = 2.0 * SQRT_2;

/// Root-search seeds over the `gamma` bracket.
pub const GAMMA_SEEDS: usize = 512;
/// Upper end of the `gamma` bracket; admissible roots satisfy `gamma < 1`.
pub const GAMMA_BRACKET_MAX: f64 = 10.0;
/// Allowed disagreement between the conformal-law trace and its
/// finite-difference oracle.
pub const TRACE_ORACLE_TOL: f64 = 1e-5;

/// Mass where the two admissible `gamma` branches merge, `3^{-3/2}`.
pub fn critical_mass() -> f64 {
    1.0 / 27f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchwarzschildParams {
    pub m_adm: f64,
    pub gamma: f64,
}

impl SchwarzschildParams {
    pub fn new(m_adm: f64, gamma: f64) -> Result<Self> {
        if !(m_adm.is_finite() && m_adm >= 0.0) {
            return Err(GeometryError::domain("m_adm", m_adm, "[0, inf)"));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(GeometryError::domain("gamma", gamma, "(0, inf)"));
        }
        Ok(Self { m_adm, gamma })
    }

    /// `m = 3/16`, `gamma = 9/32`, which has `k_h = 1`.
    pub fn example() -> Self {
        Self {
            m_adm: 3.0 / 16.0,
            gamma: 9.0 / 32.0,
        }
    }

    /// Conformal factor `phi` at Euclidean distance `rho` from the origin.
    pub fn phi(&self, rho: f64) -> f64 {
        1.0 + self.m_adm / (2.0 * rho)
    }

    pub fn is_admissible(&self) -> bool {
        (geodesic_curvature_closed_form(self) - 1.0).abs() <= crate::conformal_disc::UNIT_GEODESIC_TOL
    }

    fn check_disc_radius(r: f64) -> Result<()> {
        if (0.0..=CAP_RADIUS * (1.0 + 1e-12)).contains(&r) {
            Ok(())
        } else {
            Err(GeometryError::domain("r", r, format!("[0, {CAP_RADIUS}]")))
        }
    }
}

/// Euclidean distance `|x|` of the disc point with stereographic radius `r`:
/// `|x|^2 = gamma^2 (3 + 2^{3/2} - 2^{5/2} / (1 + r^2))`.
pub fn coordinate_radius(p: &SchwarzschildParams, r: f64) -> f64 {
    let u = 1.0 / (1.0 + r * r);
    p.gamma * (THREE_PLUS_TWO_SQRT2 - TWO_POW_5_2 * u).sqrt()
}

/// `E(r) = phi(|x|)^2 2 gamma / (1 + r^2)` with closed-form derivatives.
#[derive(Debug, Clone, Copy)]
pub struct SchwarzschildProfile {
    pub params: SchwarzschildParams,
}

struct ProfileJet {
    value: f64,
    d1: f64,
    d1_over_r: f64,
    d2: f64,
}

impl SchwarzschildProfile {
    fn jet(&self, r: f64) -> ProfileJet {
        let SchwarzschildParams { m_adm: m, gamma: g } = self.params;
        let g2 = g * g;
        let u = 1.0 / (1.0 + r * r);
        let du_over_r = -2.0 * u * u;
        let du = r * du_over_r;
        let d2u = -2.0 * u * u + 8.0 * r * r * u * u * u;

        let rho = g * (THREE_PLUS_TWO_SQRT2 - TWO_POW_5_2 * u).sqrt();
        let drho_over_r = -g2 * TWO_POW_5_2 * du_over_r / (2.0 * rho);
        let drho = r * drho_over_r;
        let d2rho2 = -g2 * TWO_POW_5_2 * d2u;
        let d2rho = (d2rho2 - 2.0 * drho * drho) / (2.0 * rho);

        let phi = 1.0 + m / (2.0 * rho);
        let dphi_over_r = -m * drho_over_r / (2.0 * rho * rho);
        let dphi = r * dphi_over_r;
        let d2phi = -0.5 * m * (d2rho / (rho * rho) - 2.0 * drho * drho / rho.powi(3));

        let c = 2.0 * g;
        ProfileJet {
            value: c * phi * phi * u,
            d1: c * (2.0 * phi * dphi * u + phi * phi * du),
            d1_over_r: c * (2.0 * phi * dphi_over_r * u + phi * phi * du_over_r),
            d2: c * (2.0 * dphi * dphi * u
                + 2.0 * phi * d2phi * u
                + 4.0 * phi * dphi * du
                + phi * phi * d2u),
        }
    }
}

impl RadialProfile for SchwarzschildProfile {
    fn value(&self, r: f64) -> f64 {
        self.jet(r).value
    }
    fn d1(&self, r: f64) -> f64 {
        self.jet(r).d1
    }
    fn d2(&self, r: f64) -> f64 {
        self.jet(r).d2
    }
    fn d1_over_r(&self, r: f64) -> f64 {
        self.jet(r).d1_over_r
    }
}

pub fn conformal_profile(p: &SchwarzschildParams) -> RadialConformalMetric {
    RadialConformalMetric::new(
        Arc::new(SchwarzschildProfile { params: *p }),
        CAP_RADIUS,
        format!("schwarzschild(m = {}, gamma = {})", p.m_adm, p.gamma),
    )
    .expect("Schwarzschild factor is positive and even")
}

/// `k_h = (1 / (gamma phi(gamma)^2)) (1 - m / (gamma phi(gamma)))`.
pub fn geodesic_curvature_closed_form(p: &SchwarzschildParams) -> f64 {
    let phi = p.phi(p.gamma);
    (1.0 - p.m_adm / (p.gamma * phi)) / (p.gamma * phi * phi)
}

/// All `gamma > 0` with `k_h(m, gamma) = 1`, ascending. A double root at the
/// critical mass is reported once with `tangential = true`.
pub fn admissible_gammas(m: f64, tol: &Tolerances) -> Result<Vec<Root>> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(GeometryError::domain("m_adm", m, "[0, inf)"));
    }
    let k_minus_one = |gamma: f64| {
        geodesic_curvature_closed_form(&SchwarzschildParams { m_adm: m, gamma }) - 1.0
    };
    let lo = m / 2.0 + 1e-9;
    let mut roots = numerics::find_roots(k_minus_one, lo, GAMMA_BRACKET_MAX, GAMMA_SEEDS, tol)?;
    // Near gamma = m/2 the slope of k_h is of order 1/m^2, so an absolute
    // root tolerance is not enough to keep k_h = 1 to 1e-8.
    for r in roots.iter_mut().filter(|r| !r.tangential) {
        let w = (4.0 * tol.root_tol).min(0.5 * (r.x - m / 2.0));
        r.x = numerics::polish_root(k_minus_one, r.x, w);
    }
    Ok(roots)
}

/// Cosine between the Euclidean radial direction and the downward unit
/// normal of the cap (pointing away from the sphere centre).
pub fn radial_normal_component(p: &SchwarzschildParams, r: f64) -> Result<f64> {
    SchwarzschildParams::check_disc_radius(r)?;
    let u = 1.0 / (1.0 + r * r);
    Ok(p.gamma / coordinate_radius(p, r) * (1.0 + SQRT_2 - TWO_POW_3_2 * u))
}

/// Mean curvature of the cap in `(R^3, phi^4 g_e)` with respect to the
/// normal pointing into the sphere:
/// `H = phi^{-2} (2/gamma - 2 m / (phi |x|^2) d_r . nu_e)`.
pub fn intrinsic_mean_curvature(p: &SchwarzschildParams, r: f64) -> Result<f64> {
    let cos = radial_normal_component(p, r)?;
    let rho = coordinate_radius(p, r);
    let phi = p.phi(rho);
    Ok((2.0 / p.gamma - 2.0 * p.m_adm / (phi * rho * rho) * cos) / (phi * phi))
}

/// Mean and Gauss curvature of the coordinate sphere `|x| = gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportSphere {
    pub mean_curvature: f64,
    pub gauss_curvature: f64,
}

pub fn support_sphere_data(p: &SchwarzschildParams) -> SupportSphere {
    let a = p.gamma;
    let phi = p.phi(a);
    let areal = a * phi * phi;
    SupportSphere {
        mean_curvature: (2.0 / a - 2.0 * p.m_adm / (a * a * phi)) / (phi * phi),
        gauss_curvature: 1.0 / (areal * areal),
    }
}

/// [`support_sphere_data`] in exact arithmetic for rational parameters,
/// returned as `(H^S, K^S)`.
pub fn support_sphere_data_exact(m: &ExactRational, gamma: &ExactRational) -> (ExactRational, ExactRational) {
    let two = ExactRational::integer(2);
    let phi = &ExactRational::one() + &(m / &(&two * gamma));
    let phi2 = &phi * &phi;
    let inv_a = gamma.recip();
    let term = m / &(&(gamma * gamma) * &phi);
    let mean = &(&(&two * &inv_a) - &(&two * &term)) / &phi2;
    let areal = gamma * &phi2;
    let gauss = (&areal * &areal).recip();
    (mean, gauss)
}

/// Closed-form `k_h` in exact arithmetic.
pub fn geodesic_curvature_exact(m: &ExactRational, gamma: &ExactRational) -> ExactRational {
    let two = ExactRational::integer(2);
    let phi = &ExactRational::one() + &(m / &(&two * gamma));
    let gp = gamma * &phi;
    &(&ExactRational::one() - &(m / &gp)) / &(&gp * &phi)
}

/// Second fundamental form `A(T, T)` of a surface in `(R^3, phi^4 g_e)`
/// along a curve lying in it, by finite differences.
///
/// `curve` parametrises the curve in Euclidean coordinates, `normal_e` is the
/// Euclidean unit normal of the surface at `curve(s)`. The covariant
/// derivative uses the Christoffel symbols of `e^{2w} g_e`, `w = 2 log phi`,
/// with `grad w` differentiated numerically.
pub fn fd_normal_curvature(
    p: &SchwarzschildParams,
    curve: impl Fn(f64) -> [f64; 3],
    s: f64,
    normal_e: [f64; 3],
    tol: &Tolerances,
) -> Result<f64> {
    let x = curve(s);
    let w = |y: [f64; 3]| {
        let rho = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        2.0 * p.phi(rho).ln()
    };
    let mut grad_w = [0.0; 3];
    let mut vel = [0.0; 3];
    let mut acc = [0.0; 3];
    for k in 0..3 {
        grad_w[k] = numerics::derivative(
            |t| {
                let mut y = x;
                y[k] = t;
                w(y)
            },
            x[k],
            1,
            tol,
        )?;
        vel[k] = numerics::derivative(|t| curve(t)[k], s, 1, tol)?;
        acc[k] = numerics::derivative(|t| curve(t)[k], s, 2, tol)?;
    }
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let speed2 = dot(vel, vel);
    let vel_dw = dot(vel, grad_w);
    let mut cov = [0.0; 3];
    for k in 0..3 {
        cov[k] = acc[k] + 2.0 * vel[k] * vel_dw - speed2 * grad_w[k];
    }
    Ok((-w(x)).exp() * dot(cov, normal_e) / speed2)
}

/// Boundary second-fundamental-form traces of the cap along its edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryData {
    /// `A_e(T, T)` of the Euclidean free-boundary embedding.
    pub tr_ae: f64,
    /// `A(T, T)` of the cap in the Schwarzschild metric.
    pub tr_a: f64,
    /// Finite-difference value of `tr_a`.
    pub tr_a_oracle: f64,
    pub gap: f64,
    pub fb_residuals: FreeBoundaryResiduals,
}

/// Edge of the cap: the circle of Euclidean radius `gamma / sqrt2` at height
/// `gamma / sqrt2`.
fn boundary_circle(p: &SchwarzschildParams) -> impl Fn(f64) -> [f64; 3] {
    let c = p.gamma * FRAC_1_SQRT_2;
    move |s: f64| [c * s.sin(), c * s.cos(), c]
}

/// Euclidean unit normal of the cap pointing into its sphere.
pub fn inward_sphere_normal(p: &SchwarzschildParams, x: [f64; 3]) -> [f64; 3] {
    let g = p.gamma;
    [-x[0] / g, -x[1] / g, (SQRT_2 * g - x[2]) / g]
}

pub fn boundary_traces(
    p: &SchwarzschildParams,
    e: &RevolutionEmbedding,
    tol: &Tolerances,
) -> Result<BoundaryData> {
    let rb = e.r_b();
    let expected = conformal_profile(p).e(rb);
    if (e.metric.e(rb) - expected).abs() > 1e-12 * expected {
        return Err(GeometryError::Consistency(format!(
            "embedding of `{}` does not belong to m = {}, gamma = {}",
            e.metric.label(),
            p.m_adm,
            p.gamma
        )));
    }
    let eb = e.metric.e(rb);
    let tr_ae = extrinsic_at(&e.metric, rb)?.a_pp / (eb * eb * rb * rb);

    // Conformal law for g = e^{2w} g_e on unit tangents:
    // A(T, T) = e^{-w} (A_e(T_e, T_e) - d_n w), n the inner sphere normal.
    let rho = coordinate_radius(p, rb);
    let phi = p.phi(rho);
    let cos_inner = -radial_normal_component(p, rb)?;
    let dphi_drho = -p.m_adm / (2.0 * rho * rho);
    let dn_w = 2.0 * dphi_drho * cos_inner / phi;
    let tr_a = (1.0 / p.gamma - dn_w) / (phi * phi);

    let circle = boundary_circle(p);
    let x0 = circle(0.0);
    let tr_a_oracle = fd_normal_curvature(p, &circle, 0.0, inward_sphere_normal(p, x0), tol)?;
    if (tr_a - tr_a_oracle).abs() > TRACE_ORACLE_TOL {
        return Err(GeometryError::Consistency(format!(
            "boundary trace {tr_a} disagrees with finite-difference oracle {tr_a_oracle}"
        )));
    }
    Ok(BoundaryData {
        tr_ae,
        tr_a,
        tr_a_oracle,
        gap: tr_ae - tr_a,
        fb_residuals: free_boundary_residuals(e),
    })
}
