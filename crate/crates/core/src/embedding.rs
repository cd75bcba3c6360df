//! Free-boundary isometric embedding of a radial disc metric into the unit
//! ball as a surface of revolution
//! `F(r, phi) = (Psi(r) sin phi, Psi(r) cos phi, Z(r))`.
//!
//! The angular isometry condition fixes `Psi = E r`; the radial one fixes
//! `Z'^2 = E^2 - Psi'^2`. Writing `q = E'/r` the radicand factors as
//! `E^2 - Psi'^2 = -r^2 q (2E + E' r)`, so `Z' = r s` with
//! `s = sqrt(-q (2E + E' r))`, which stays accurate on the axis where the
//! naive difference cancels.

use serde::Serialize;

use crate::conformal_disc::{check_admissible, gauss_curvature, RadialConformalMetric, ADMISSIBILITY_SAMPLES};
use crate::error::{GeometryError, Hypothesis, Result};
use crate::numerics::{self, Tolerances};

/// Radicand values above `-RADICAND_TOL` are clamped to zero.
pub const RADICAND_TOL: f64 = 1e-12;

/// Meridian data at a single radius, all closed-form in the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeridianJet {
    pub r: f64,
    pub e: f64,
    pub psi: f64,
    pub dpsi: f64,
    pub d2psi: f64,
    /// `Z' / r`; finite on the axis.
    pub slope_over_r: f64,
    pub dz: f64,
    pub d2z: f64,
}

impl MeridianJet {
    pub fn at(m: &RadialConformalMetric, r: f64) -> Result<Self> {
        m.check_radius(r)?;
        let e = m.e(r);
        let e1 = m.de(r);
        let e2 = m.d2e(r);
        let q = m.de_over_r(r);

        let b = 2.0 * e + e1 * r;
        let scaled_radicand = -q * b;
        let radicand = r * r * scaled_radicand;
        if !scaled_radicand.is_finite() || radicand < -RADICAND_TOL {
            return Err(GeometryError::NonEmbeddable { node: r, radicand });
        }
        let s = scaled_radicand.max(0.0).sqrt();
        // r S' where S = -q (2E + E' r); needs only E, E', E'', q.
        let r_ds = -(e2 - q) * b - q * r * (3.0 * e1 + e2 * r);
        let d2z = if s > 0.0 { s + r_ds / (2.0 * s) } else { 0.0 };
        Ok(Self {
            r,
            e,
            psi: e * r,
            dpsi: e + e1 * r,
            d2psi: 2.0 * e1 + e2 * r,
            slope_over_r: s,
            dz: r * s,
            d2z,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RevolutionEmbedding {
    pub grid: Vec<f64>,
    pub psi: Vec<f64>,
    pub z: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub dz: Vec<f64>,
    pub d2psi: Vec<f64>,
    pub d2z: Vec<f64>,
    pub metric: RadialConformalMetric,
    tol: Tolerances,
}

impl RevolutionEmbedding {
    pub fn r_b(&self) -> f64 {
        self.metric.r_b()
    }

    pub fn jet(&self, r: f64) -> Result<MeridianJet> {
        MeridianJet::at(&self.metric, r)
    }

    /// Height of the meridian at any radius, integrating `Z'` from the
    /// nearest grid node at or beyond `r`.
    pub fn z_at(&self, r: f64) -> Result<f64> {
        self.metric.check_radius(r)?;
        let idx = self.grid.partition_point(|&x| x < r).min(self.grid.len() - 1);
        let node = self.grid[idx];
        if node == r {
            return Ok(self.z[idx]);
        }
        let m = &self.metric;
        let piece = numerics::integrate(
            |x| MeridianJet::at(m, x).map(|j| j.dz).unwrap_or(f64::NAN),
            r.min(node),
            node.max(r),
            &self.tol,
        )?;
        Ok(if node >= r { self.z[idx] - piece } else { self.z[idx] + piece })
    }

    /// `F(r, phi)` in Cartesian coordinates.
    pub fn point(&self, r: f64, phi: f64) -> Result<[f64; 3]> {
        let psi = self.metric.e(r) * r;
        let z = self.z_at(r)?;
        Ok([psi * phi.sin(), psi * phi.cos(), z])
    }
}

/// Integrates the meridian inwards from the unit sphere.
///
/// The boundary height is fixed by `|F(r_b)| = 1` with `Z > 0`; orthogonality
/// to the sphere is not imposed and is checked by
/// [`free_boundary_residuals`].
pub fn solve_embedding(m: &RadialConformalMetric, tol: &Tolerances) -> Result<RevolutionEmbedding> {
    tol.validate()?;
    check_admissible(m, ADMISSIBILITY_SAMPLES)?;
    integrate_meridian(m, tol)
}

/// The same quadrature as [`solve_embedding`] without requiring `k_h = 1`.
///
/// Only `K > 0` is checked. For a boundary curvature other than one the
/// result still ends on the unit sphere but meets it at an angle, which
/// [`free_boundary_residuals`] reports.
pub fn integrate_meridian(m: &RadialConformalMetric, tol: &Tolerances) -> Result<RevolutionEmbedding> {
    tol.validate()?;
    for r in numerics::uniform_grid(0.0, m.r_b(), ADMISSIBILITY_SAMPLES) {
        let k = gauss_curvature(m, r)?;
        if !(k > 0.0) {
            return Err(GeometryError::hypothesis(
                Hypothesis::PositiveGaussCurvature,
                format!("K = {k:e} at r = {r} for metric `{}`", m.label()),
            ));
        }
    }
    let grid = tol.uniform_grid(0.0, m.r_b());
    let jets = grid
        .iter()
        .map(|&r| MeridianJet::at(m, r))
        .collect::<Result<Vec<_>>>()?;

    let boundary = jets.last().expect("grid has at least 16 nodes");
    if boundary.psi > 1.0 {
        return Err(GeometryError::BoundaryOutsideBall { radius: boundary.psi });
    }
    let z_b = (1.0 - boundary.psi * boundary.psi).sqrt();

    let n = grid.len();
    let cell_tol = Tolerances {
        quad_tol: tol.quad_tol / n as f64,
        ..*tol
    };
    let mut z = vec![0.0; n];
    z[n - 1] = z_b;
    for i in (0..n - 1).rev() {
        let rise = numerics::integrate(
            |x| MeridianJet::at(m, x).map(|j| j.dz).unwrap_or(f64::NAN),
            grid[i],
            grid[i + 1],
            &cell_tol,
        )?;
        z[i] = z[i + 1] - rise;
    }

    Ok(RevolutionEmbedding {
        psi: jets.iter().map(|j| j.psi).collect(),
        dpsi: jets.iter().map(|j| j.dpsi).collect(),
        d2psi: jets.iter().map(|j| j.d2psi).collect(),
        dz: jets.iter().map(|j| j.dz).collect(),
        d2z: jets.iter().map(|j| j.d2z).collect(),
        z,
        grid,
        metric: m.clone(),
        tol: *tol,
    })
}

/// Deviations from the free-boundary conditions at `r_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FreeBoundaryResiduals {
    /// `| |F|^2 - 1 |`
    pub sphere: f64,
    /// `| Psi' - E Psi |`
    pub radial_psi: f64,
    /// `| Z' - E Z |`
    pub radial_z: f64,
}

impl FreeBoundaryResiduals {
    pub fn max(&self) -> f64 {
        self.sphere.max(self.radial_psi).max(self.radial_z)
    }
}

pub fn free_boundary_residuals(e: &RevolutionEmbedding) -> FreeBoundaryResiduals {
    let last = e.grid.len() - 1;
    let eb = e.metric.e(e.grid[last]);
    let (psi, z) = (e.psi[last], e.z[last]);
    FreeBoundaryResiduals {
        sphere: (psi * psi + z * z - 1.0).abs(),
        radial_psi: (e.dpsi[last] - eb * psi).abs(),
        radial_z: (e.dz[last] - eb * z).abs(),
    }
}

/// Second fundamental form and curvatures at one radius.
///
/// The normal `nu = (-Z', Psi') / E` (radial and axial components in the
/// meridian plane) makes `A` positive definite for the upward-opening
/// convex caps produced by [`solve_embedding`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtrinsicData {
    pub a_rr: f64,
    pub a_pp: f64,
    pub h_e: f64,
    /// Larger principal curvature.
    pub kappa1: f64,
    pub kappa2: f64,
    /// Principal curvature along the meridian.
    pub kappa_meridian: f64,
    /// Principal curvature along the parallel.
    pub kappa_parallel: f64,
    pub nu_radial: f64,
    pub nu_axial: f64,
}

pub fn extrinsic_at(m: &RadialConformalMetric, r: f64) -> Result<ExtrinsicData> {
    let j = MeridianJet::at(m, r)?;
    if r > 0.0 && j.psi <= 0.0 {
        return Err(GeometryError::Degenerate { r });
    }
    let e = j.e;
    let a_rr = (j.d2z * j.dpsi - j.d2psi * j.dz) / e;
    // Psi Z' / E = r^2 s.
    let a_pp = r * r * j.slope_over_r;
    let kappa_meridian = a_rr / (e * e);
    // A_pp / Psi^2 = s / E^2, also the axis limit.
    let kappa_parallel = j.slope_over_r / (e * e);
    Ok(ExtrinsicData {
        a_rr,
        a_pp,
        h_e: kappa_meridian + kappa_parallel,
        kappa1: kappa_meridian.max(kappa_parallel),
        kappa2: kappa_meridian.min(kappa_parallel),
        kappa_meridian,
        kappa_parallel,
        nu_radial: -j.dz / e,
        nu_axial: j.dpsi / e,
    })
}

pub fn extrinsic_geometry(e: &RevolutionEmbedding, r: f64) -> Result<ExtrinsicData> {
    extrinsic_at(&e.metric, r)
}

/// Euclidean mean curvature written through the meridian functions of the
/// scaled embedding `F = gamma (psi sin phi, psi cos phi, zeta)`, with
/// `psi = Psi / gamma`, `zeta = Z / gamma` and `E = E~ / gamma`:
///
/// `H_e = -zeta' / (gamma sqrt(psi'^2 + zeta'^2))
///        (-psi / (E^2 r^2) + (psi'' - psi' zeta'' / zeta') / E^2)`.
///
/// The leading minus orients it by the same normal as [`extrinsic_geometry`].
/// Singular on the axis, where `zeta' = 0`.
pub fn meridian_mean_curvature(e: &RevolutionEmbedding, r: f64, gamma: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeometryError::domain("r", r, format!("(0, {}]", e.r_b())));
    }
    let j = e.jet(r)?;
    let psi = j.psi / gamma;
    let dpsi = j.dpsi / gamma;
    let d2psi = j.d2psi / gamma;
    let dzeta = j.dz / gamma;
    let d2zeta = j.d2z / gamma;
    let big_e = j.e / gamma;
    let e2 = big_e * big_e;
    let bracket = -psi / (e2 * r * r) + (d2psi - dpsi * d2zeta / dzeta) / e2;
    Ok(-dzeta / (gamma * (dpsi * dpsi + dzeta * dzeta).sqrt()) * bracket)
}

/// Principal curvatures from mean and Gauss curvature, larger first.
pub fn principal_curvatures(h: f64, k: f64) -> Result<(f64, f64)> {
    let disc = h * h / 4.0 - k;
    if disc < -RADICAND_TOL {
        return Err(GeometryError::NonReal { discriminant: disc });
    }
    let root = disc.max(0.0).sqrt();
    Ok((h / 2.0 + root, h / 2.0 - root))
}

/// Residuals of the Monge-Ampere identity for the potential
/// `f = |F|^2 / 2`:
///
/// `det(Hess_h f - h) - det(h) K (F . nu)^2` at `r`, and the Neumann
/// condition `df/dr(r_b) - E(r_b)`.
pub fn monge_ampere_residual(e: &RevolutionEmbedding, r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(GeometryError::domain("r", r, format!("(0, {}]", e.r_b())));
    }
    let m = &e.metric;
    let j = e.jet(r)?;
    let z = e.z_at(r)?;
    let big_e = j.e;
    let log_slope = m.de(r) / big_e;
    let df = j.psi * j.dpsi + z * j.dz;
    // f'' - E^2 with Psi'^2 + Z'^2 = E^2 cancelled analytically.
    let hess_rr = j.psi * j.d2psi + z * j.d2z - log_slope * df;
    let hess_pp = r * (1.0 + r * log_slope) * df - big_e * big_e * r * r;
    let f_dot_nu = (-j.psi * j.dz + z * j.dpsi) / big_e;
    let det_h = big_e.powi(4) * r * r;
    let k = gauss_curvature(m, r)?;
    let interior = hess_rr * hess_pp - det_h * k * f_dot_nu * f_dot_nu;

    let last = e.grid.len() - 1;
    let rb = e.grid[last];
    let df_b = e.psi[last] * e.dpsi[last] + e.z[last] * e.dz[last];
    let boundary = df_b - m.e(rb);
    Ok((interior, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal_disc::CAP_RADIUS;
    use crate::error::Hypothesis;
    use std::f64::consts::SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn cos_theta(r: f64) -> f64 {
        (1.0 - r * r) / (1.0 + r * r)
    }

    #[test]
    fn cap_reproduces_spherical_cap() {
        let e = solve_embedding(&RadialConformalMetric::cap(), &tol()).unwrap();
        for (i, &r) in e.grid.iter().enumerate() {
            let c = cos_theta(r);
            let s = (1.0 - c * c).sqrt();
            assert!((e.psi[i] - s).abs() < 1e-12);
            assert!((e.z[i] - (SQRT_2 - c)).abs() < 1e-10, "r = {r}");
        }
        let fb = free_boundary_residuals(&e);
        assert!(fb.max() < 1e-10, "{fb:?}");
    }

    #[test]
    fn isometry_holds_on_grid() {
        let m = RadialConformalMetric::cap().perturbed(0.05).unwrap();
        // Perturbed caps lose k_h = 1, so check the jets directly.
        for r in numerics::uniform_grid(0.0, CAP_RADIUS, 64) {
            let j = MeridianJet::at(&m, r).unwrap();
            assert!((j.dpsi * j.dpsi + j.dz * j.dz - j.e * j.e).abs() < 1e-12);
            assert!(j.dz >= 0.0);
        }
    }

    #[test]
    fn flat_disc_is_rejected() {
        let flat = RadialConformalMetric::flat(CAP_RADIUS).unwrap();
        let err = solve_embedding(&flat, &tol()).unwrap_err();
        assert_eq!(err.violated(), Some(Hypothesis::PositiveGaussCurvature));
    }

    #[test]
    fn negative_radicand_is_named() {
        // Growing factor: E' > 0 makes the radicand negative off the axis.
        let m = RadialConformalMetric::from_fn(|r| 1.0 + r * r, 0.5, tol(), "bowl").unwrap();
        match MeridianJet::at(&m, 0.3) {
            Err(GeometryError::NonEmbeddable { node, radicand }) => {
                assert_eq!(node, 0.3);
                assert!(radicand < 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn meridian_second_derivative_matches_fd() {
        let m = RadialConformalMetric::cap().perturbed(-0.2).unwrap();
        let dz = |r: f64| MeridianJet::at(&m, r).unwrap().dz;
        for r in [0.05, 0.2, 0.4] {
            let fd = numerics::derivative(dz, r, 1, &tol()).unwrap();
            assert!((MeridianJet::at(&m, r).unwrap().d2z - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn cap_extrinsic_geometry_is_umbilic() {
        let m = RadialConformalMetric::cap();
        for r in numerics::uniform_grid(0.0, CAP_RADIUS, 17) {
            let x = extrinsic_at(&m, r).unwrap();
            assert!((x.h_e - 2.0).abs() < 1e-12);
            assert!((x.kappa1 - 1.0).abs() < 1e-12 && (x.kappa2 - 1.0).abs() < 1e-12);
            assert!(x.a_rr > 0.0);
        }
    }

    #[test]
    fn axis_value_is_the_limit() {
        let m = RadialConformalMetric::cap().perturbed(-0.3).unwrap();
        let h0 = extrinsic_at(&m, 0.0).unwrap().h_e;
        let h_near = extrinsic_at(&m, 1e-4).unwrap().h_e;
        assert!(h0.is_finite());
        assert!((h0 - h_near).abs() < 1e-6);
    }

    #[test]
    fn principal_curvature_examples() {
        assert_eq!(principal_curvatures(2.0, 1.0).unwrap(), (1.0, 1.0));
        assert_eq!(principal_curvatures(3.0, 2.0).unwrap(), (2.0, 1.0));
        assert!(matches!(principal_curvatures(2.0, 2.0), Err(GeometryError::NonReal { .. })));
    }

    #[test]
    fn cap_monge_ampere() {
        let e = solve_embedding(&RadialConformalMetric::cap(), &tol()).unwrap();
        let (interior, boundary) = monge_ampere_residual(&e, 0.2).unwrap();
        assert!(interior.abs() < 1e-8);
        assert!(boundary.abs() < 1e-8);
        assert!(monge_ampere_residual(&e, 0.0).is_err());
    }

    #[test]
    fn z_between_nodes_matches_closed_form() {
        let e = solve_embedding(&RadialConformalMetric::cap(), &tol().with_grid_n(16)).unwrap();
        for r in [0.0, 0.0123, 0.2, 0.3999, CAP_RADIUS] {
            assert!((e.z_at(r).unwrap() - (SQRT_2 - cos_theta(r))).abs() < 1e-12);
        }
    }

    #[test]
    fn meridian_form_matches_fundamental_forms_on_cap() {
        let e = solve_embedding(&RadialConformalMetric::cap(), &tol()).unwrap();
        for r in [0.05, 0.2, CAP_RADIUS] {
            let h = meridian_mean_curvature(&e, r, 1.0).unwrap();
            assert!((h - 2.0).abs() < 1e-10);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn principal_pair_reconstructs(k1 in 0.01f64..10.0, k2 in 0.01f64..10.0) {
                let (h, k) = (k1 + k2, k1 * k2);
                let (a, b) = principal_curvatures(h, k).unwrap();
                prop_assert!((a + b - h).abs() <= 1e-10 * h.max(1.0));
                prop_assert!((a * b - k).abs() <= 1e-10 * k.max(1.0) * h.max(1.0));
                prop_assert!(a >= b);
            }

            #[test]
            fn gauss_equation_on_perturbed_caps(eps in -0.4f64..0.1, r in 0.0f64..CAP_RADIUS) {
                let m = RadialConformalMetric::cap().perturbed(eps).unwrap();
                let x = extrinsic_at(&m, r).unwrap();
                let k = gauss_curvature(&m, r).unwrap();
                prop_assert!((x.kappa_meridian * x.kappa_parallel - k).abs() <= 1e-7);
            }
        }
    }
}
