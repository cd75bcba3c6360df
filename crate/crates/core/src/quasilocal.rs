//! Free-boundary Brown-York mass of the Schwarzschild caps and
//! parameter scans over the admissible family.

use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal_disc::{gauss_curvature, geodesic_curvature, RadialConformalMetric};
use crate::embedding::{extrinsic_at, solve_embedding};
use crate::error::{GeometryError, Hypothesis, Result};
use crate::numerics::{self, uniform_grid, Tolerances};
use crate::schwarzschild::{
    admissible_gammas, boundary_traces, conformal_profile, intrinsic_mean_curvature, SchwarzschildParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    /// `int_Sigma H_e dA`
    pub int_he: f64,
    /// `int_Sigma H dA`
    pub int_h: f64,
    /// `int_Sigma (H_e - H) dA`
    pub mass_fb_by: f64,
    /// `int_Sigma (H_e^2 / H - H) dA`
    pub hm_lhs: f64,
    /// `2 oint (tr A_e - tr A) ds`
    pub hm_rhs: f64,
    /// `oint (tr A_e - tr A) ds`
    pub boundary_gap: f64,
}

fn area_integral(
    m: &RadialConformalMetric,
    tol: &Tolerances,
    density: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let integrand = |r: f64| match density(r) {
        Ok(v) => v * m.e(r).powi(2) * r,
        Err(_) => f64::NAN,
    };
    Ok(2.0 * PI * numerics::integrate(integrand, 0.0, m.r_b(), tol)?)
}

/// Mass integrals for an admissible pair.
pub fn mass_report(p: &SchwarzschildParams, tol: &Tolerances) -> Result<MassReport> {
    let metric = conformal_profile(p);
    let embedding = solve_embedding(&metric, tol)?;

    for &r in &embedding.grid {
        let h = intrinsic_mean_curvature(p, r)?;
        if !(h > 0.0) {
            return Err(GeometryError::hypothesis(
                Hypothesis::MeanConvexity,
                format!("H = {h:e} at r = {r} (m = {}, gamma = {})", p.m_adm, p.gamma),
            ));
        }
    }

    let h_e = |r: f64| extrinsic_at(&metric, r).map(|x| x.h_e);
    let h = |r: f64| intrinsic_mean_curvature(p, r);
    let int_he = area_integral(&metric, tol, h_e)?;
    let int_h = area_integral(&metric, tol, h)?;
    let hm_lhs = area_integral(&metric, tol, |r| {
        let (he, hh) = (h_e(r)?, h(r)?);
        Ok(he * he / hh - hh)
    })?;

    let traces = boundary_traces(p, &embedding, tol)?;
    let rb = metric.r_b();
    let length = 2.0 * PI * metric.e(rb) * rb;
    let boundary_gap = traces.gap * length;

    Ok(MassReport {
        int_he,
        int_h,
        mass_fb_by: int_he - int_h,
        hm_lhs,
        hm_rhs: 2.0 * boundary_gap,
        boundary_gap,
    })
}

/// One admissible `(m, gamma)` pair of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m_adm: f64,
    /// 0 for the smaller `gamma`.
    #[serde(rename = "branch")]
    pub gamma_branch_index: u32,
    pub gamma: f64,
    pub k_h: f64,
    #[serde(rename = "min_K")]
    pub min_k: f64,
    #[serde(rename = "int_He")]
    pub int_he: f64,
    #[serde(rename = "int_H")]
    pub int_h: f64,
    pub mass_fb_by: f64,
    pub hm_lhs: f64,
    pub hm_rhs: f64,
    pub boundary_gap: f64,
}

impl ScanRow {
    pub fn compute(p: &SchwarzschildParams, branch: u32, tol: &Tolerances) -> Result<Self> {
        let metric = conformal_profile(p);
        let k_h = geodesic_curvature(&metric, metric.r_b())?;
        let min_k = uniform_grid(0.0, metric.r_b(), tol.grid_n)
            .into_iter()
            .map(|r| gauss_curvature(&metric, r))
            .try_fold(f64::INFINITY, |acc, k| k.map(|k| acc.min(k)))?;
        let report = mass_report(p, tol)?;
        Ok(Self {
            m_adm: p.m_adm,
            gamma_branch_index: branch,
            gamma: p.gamma,
            k_h,
            min_k,
            int_he: report.int_he,
            int_h: report.int_h,
            mass_fb_by: report.mass_fb_by,
            hm_lhs: report.hm_lhs,
            hm_rhs: report.hm_rhs,
            boundary_gap: report.boundary_gap,
        })
    }

    pub fn report(&self) -> MassReport {
        MassReport {
            int_he: self.int_he,
            int_h: self.int_h,
            mass_fb_by: self.mass_fb_by,
            hm_lhs: self.hm_lhs,
            hm_rhs: self.hm_rhs,
            boundary_gap: self.boundary_gap,
        }
    }
}

/// Branch index of `gamma` among the admissible roots for `m`.
pub fn branch_of(p: &SchwarzschildParams, tol: &Tolerances) -> Result<Option<u32>> {
    let roots = admissible_gammas(p.m_adm, tol)?;
    Ok(roots
        .iter()
        .position(|r| (r.x - p.gamma).abs() <= 1e-6 * p.gamma.max(1.0))
        .map(|i| i as u32))
}

fn rows_for_mass(m: f64, tol: &Tolerances) -> Vec<ScanRow> {
    let roots = match admissible_gammas(m, tol) {
        Ok(r) => r,
        Err(err) => {
            warn!("skipping m = {m}: root search failed: {err}");
            return Vec::new();
        }
    };
    roots
        .iter()
        .enumerate()
        .filter_map(|(branch, root)| {
            let p = SchwarzschildParams { m_adm: m, gamma: root.x };
            match ScanRow::compute(&p, branch as u32, tol) {
                Ok(row) => Some(row),
                Err(err) => {
                    warn!("skipping m = {m}, gamma = {}: {err}", root.x);
                    None
                }
            }
        })
        .collect()
}

/// Rows for every admissible branch at each of the given masses, ordered by
/// mass then branch. `workers = 0` uses the global rayon pool.
pub fn scan_masses(masses: &[f64], tol: &Tolerances, workers: usize) -> Result<Vec<ScanRow>> {
    tol.validate()?;
    let run = || -> Vec<ScanRow> {
        masses
            .par_iter()
            .map(|&m| rows_for_mass(m, tol))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    if workers == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| GeometryError::Consistency(format!("thread pool: {e}")))?;
    Ok(pool.install(run))
}

/// `n_m` uniformly spaced masses on `[m_lo, m_hi]`.
pub fn scan(m_lo: f64, m_hi: f64, n_m: usize, tol: &Tolerances) -> Result<Vec<ScanRow>> {
    scan_with_workers(m_lo, m_hi, n_m, tol, 0)
}

pub fn scan_with_workers(
    m_lo: f64,
    m_hi: f64,
    n_m: usize,
    tol: &Tolerances,
    workers: usize,
) -> Result<Vec<ScanRow>> {
    let crit = crate::schwarzschild::critical_mass();
    if !(0.0 <= m_lo && m_lo < m_hi && m_hi < crit) {
        return Err(GeometryError::domain(
            "m range",
            m_hi,
            format!("0 <= m_lo < m_hi < {crit} (got m_lo = {m_lo})"),
        ));
    }
    scan_masses(&uniform_grid(m_lo, m_hi, n_m), tol, workers)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn example_mass_report() {
        let r = mass_report(&SchwarzschildParams::example(), &tol()).unwrap();
        assert!((r.int_he - 3.46).abs() < 0.01, "{r:?}");
        assert!((r.int_h - 3.37).abs() < 0.01, "{r:?}");
        assert!((r.mass_fb_by - 0.09).abs() < 0.01);
        assert_eq!(r.mass_fb_by, r.int_he - r.int_h);
        assert_eq!(r.hm_rhs, 2.0 * r.boundary_gap);
        // Converged values of this implementation.
        assert!((r.int_he - 3.457_167_257).abs() < 1e-8, "{}", r.int_he);
        assert!((r.int_h - 3.371_630_450).abs() < 1e-8, "{}", r.int_h);
        assert!((r.hm_lhs - 0.221_632_874).abs() < 1e-8, "{}", r.hm_lhs);
        assert!((r.hm_rhs - 2.868_997_482).abs() < 1e-8, "{}", r.hm_rhs);
        // Hoelder chain.
        assert!(r.hm_lhs >= r.mass_fb_by * r.mass_fb_by / r.int_h);
    }

    #[test]
    fn flat_mass_vanishes() {
        let r = mass_report(&SchwarzschildParams::new(0.0, 1.0).unwrap(), &tol()).unwrap();
        assert!(r.mass_fb_by.abs() < 1e-8);
        assert!(r.hm_lhs.abs() < 1e-8);
        assert!(r.hm_rhs.abs() < 1e-8);
    }

    #[test]
    fn inadmissible_pair_is_rejected() {
        let p = SchwarzschildParams::new(3.0 / 16.0, 0.4).unwrap();
        let err = mass_report(&p, &tol()).unwrap_err();
        assert_eq!(err.violated(), Some(Hypothesis::UnitGeodesicCurvature));
    }

    #[test]
    fn grid_refinement_is_stable() {
        let p = SchwarzschildParams::example();
        let coarse = mass_report(&p, &tol()).unwrap();
        let fine = mass_report(&p, &tol().with_grid_n(4096)).unwrap();
        assert!(((coarse.int_he - fine.int_he) / fine.int_he).abs() < 1e-6);
        assert!(((coarse.int_h - fine.int_h) / fine.int_h).abs() < 1e-6);
    }

    #[test]
    fn scan_small_mass() {
        let rows = scan_masses(&[1e-4], &tol(), 0).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.mass_fb_by > 0.0 && row.mass_fb_by < 1e-2, "{row:?}");
        }
    }

    #[test]
    fn scan_rejects_bad_range() {
        assert!(scan(0.1, 0.05, 3, &tol()).is_err());
        assert!(scan(0.1, 0.2, 3, &tol()).is_err());
    }

    #[test]
    fn branch_lookup() {
        let p = SchwarzschildParams::example();
        assert_eq!(branch_of(&p, &tol()).unwrap(), Some(0));
        let other = SchwarzschildParams::new(3.0 / 16.0, 0.3).unwrap();
        assert_eq!(branch_of(&other, &tol()).unwrap(), None);
    }
}
