//! Self-check suite run by `fbweyl check`.

use serde::Serialize;

use crate::conformal_disc::{
    gauss_bonnet_residual, gauss_curvature, geodesic_curvature, interpolate_path, path_invariant_report,
    RadialConformalMetric, CAP_RADIUS,
};
use crate::embedding::{
    extrinsic_geometry, free_boundary_residuals, meridian_mean_curvature, monge_ampere_residual,
    principal_curvatures, solve_embedding,
};
use crate::error::Result;
use crate::numerics::{uniform_grid, Tolerances};
use crate::quasilocal::mass_report;
use crate::schwarzschild::{
    admissible_gammas, boundary_traces, conformal_profile, geodesic_curvature_closed_form,
    radial_normal_component, support_sphere_data, SchwarzschildParams,
};
use crate::series::{catalan, majorant_product, recurrence_check, ExactRational};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, result: Result<(bool, String)>) -> CheckOutcome {
    match result {
        Ok((passed, detail)) => CheckOutcome { name, passed, detail },
        Err(err) => CheckOutcome {
            name,
            passed: false,
            detail: format!("error: {err}"),
        },
    }
}

/// A handful of admissible pairs across both branches.
pub fn admissible_corpus(tol: &Tolerances) -> Result<Vec<SchwarzschildParams>> {
    let mut out = Vec::new();
    for m in [0.02, 0.08, 0.14, 3.0 / 16.0] {
        for root in admissible_gammas(m, tol)? {
            out.push(SchwarzschildParams::new(m, root.x)?);
        }
    }
    Ok(out)
}

pub fn run_suite(tol: &Tolerances) -> Vec<CheckOutcome> {
    let example = SchwarzschildParams::example();
    let cap = RadialConformalMetric::cap();
    let mut out = Vec::new();

    out.push(outcome("cap curvature", (|| {
        let worst = uniform_grid(0.0, CAP_RADIUS, 64)
            .into_iter()
            .map(|r| gauss_curvature(&cap, r).map(|k| (k - 1.0).abs()))
            .try_fold(0.0f64, |a, k| k.map(|k| a.max(k)))?;
        let kb = (geodesic_curvature(&cap, CAP_RADIUS)? - 1.0).abs();
        let gb = gauss_bonnet_residual(&cap, tol)?.abs();
        Ok((worst <= 1e-10 && kb <= 1e-12 && gb <= 1e-8, format!("|K-1| {worst:.1e}, |k-1| {kb:.1e}, GB {gb:.1e}")))
    })()));

    out.push(outcome("scaling covariance", (|| {
        let m = cap.perturbed(-0.2)?;
        let s = m.scaled(1.7)?;
        let mut worst = 0.0f64;
        for r in uniform_grid(0.01, CAP_RADIUS, 16) {
            worst = worst.max((gauss_curvature(&s, r)? - gauss_curvature(&m, r)? / (1.7 * 1.7)).abs());
            worst = worst.max((geodesic_curvature(&s, r)? - geodesic_curvature(&m, r)? / 1.7).abs());
        }
        Ok((worst <= 1e-10, format!("max deviation {worst:.1e}")))
    })()));

    out.push(outcome("harmonic path symmetry", (|| {
        let m1 = conformal_profile(&example);
        let mut worst = 0.0f64;
        for t in uniform_grid(0.0, 1.0, 11) {
            let a = interpolate_path(&cap, &m1, t)?;
            let b = interpolate_path(&m1, &cap, 1.0 - t)?;
            for r in uniform_grid(0.0, CAP_RADIUS, 16) {
                worst = worst.max((a.e(r) - b.e(r)).abs());
            }
        }
        Ok((worst <= 1e-14, format!("max deviation {worst:.1e}")))
    })()));

    out.push(outcome("path keeps K>0 and k_h=1", (|| {
        let reports = path_invariant_report(&cap, &conformal_profile(&example), 11, 256, tol)?;
        let ok = reports
            .iter()
            .all(|r| r.min_k > 0.0 && (r.k_boundary - 1.0).abs() <= 1e-8 && r.gauss_bonnet_residual.abs() <= 1e-6);
        let min_k = reports.iter().map(|r| r.min_k).fold(f64::INFINITY, f64::min);
        Ok((ok, format!("{} reports, min K {min_k:.4}", reports.len())))
    })()));

    out.push(outcome("emergent free boundary", (|| {
        let mut worst = 0.0f64;
        let corpus = admissible_corpus(tol)?;
        for p in &corpus {
            let e = solve_embedding(&conformal_profile(p), tol)?;
            worst = worst.max(free_boundary_residuals(&e).max());
        }
        Ok((worst <= 1e-8, format!("{} profiles, max residual {worst:.1e}", corpus.len())))
    })()));

    out.push(outcome("gauss-bonnet on admissible profiles", (|| {
        let mut worst = 0.0f64;
        for p in admissible_corpus(tol)? {
            worst = worst.max(gauss_bonnet_residual(&conformal_profile(&p), tol)?.abs());
        }
        Ok((worst <= 1e-6, format!("max residual {worst:.1e}")))
    })()));

    out.push(outcome("isometry and gauss equation", (|| {
        let m = conformal_profile(&example);
        let e = solve_embedding(&m, tol)?;
        let (mut iso, mut gauss, mut trace) = (0.0f64, 0.0f64, 0.0f64);
        for (i, &r) in e.grid.iter().enumerate() {
            let big_e = m.e(r);
            iso = iso.max((e.dpsi[i].powi(2) + e.dz[i].powi(2) - big_e * big_e).abs());
            iso = iso.max((e.psi[i] - big_e * r).abs());
            let x = extrinsic_geometry(&e, r)?;
            let k = gauss_curvature(&m, r)?;
            if r > 0.0 {
                let det = x.a_rr * x.a_pp / (big_e.powi(4) * r * r);
                gauss = gauss.max((det - k).abs());
            }
            let (k1, k2) = principal_curvatures(x.h_e, k)?;
            trace = trace.max((k1 + k2 - x.h_e).abs());
        }
        Ok((iso <= 1e-9 && gauss <= 1e-7 && trace <= 1e-12, format!("isometry {iso:.1e}, gauss {gauss:.1e}, trace {trace:.1e}")))
    })()));

    out.push(outcome("mean curvature oracle", (|| {
        let e = solve_embedding(&conformal_profile(&example), tol)?;
        let mut worst = 0.0f64;
        for r in uniform_grid(CAP_RADIUS / 16.0, CAP_RADIUS, 64) {
            let h = extrinsic_geometry(&e, r)?.h_e;
            let h_meridian = meridian_mean_curvature(&e, r, example.gamma)?;
            worst = worst.max(((h - h_meridian) / h).abs());
        }
        Ok((worst <= 1e-8, format!("max relative deviation {worst:.1e}")))
    })()));

    out.push(outcome("monge-ampere residual", (|| {
        let mut worst = (0.0f64, 0.0f64);
        for m in [cap.clone(), conformal_profile(&example)] {
            let e = solve_embedding(&m, tol)?;
            for r in uniform_grid(CAP_RADIUS / 16.0, CAP_RADIUS, 16) {
                let (interior, boundary) = monge_ampere_residual(&e, r)?;
                worst = (worst.0.max(interior.abs()), worst.1.max(boundary.abs()));
            }
        }
        Ok((worst.0 <= 1e-6 && worst.1 <= 1e-8, format!("interior {:.1e}, boundary {:.1e}", worst.0, worst.1)))
    })()));

    out.push(outcome("admissible count monotone in m", (|| {
        let mut last = usize::MAX;
        let mut ok = true;
        for m in uniform_grid(0.25 / 200.0, 0.25, 200) {
            let n = admissible_gammas(m, tol)?.len();
            ok &= n <= last;
            last = n;
        }
        Ok((ok, "200 masses on (0, 0.25]".to_string()))
    })()));

    out.push(outcome("schwarzschild boundary identities", (|| {
        let mut worst = 0.0f64;
        for p in admissible_corpus(tol)? {
            worst = worst.max(radial_normal_component(&p, CAP_RADIUS)?.abs());
            let s = support_sphere_data(&p);
            worst = worst.max((s.mean_curvature - 2.0 * geodesic_curvature_closed_form(&p)).abs());
            worst = worst.max(
                (geodesic_curvature(&conformal_profile(&p), CAP_RADIUS)? - geodesic_curvature_closed_form(&p)).abs(),
            );
        }
        Ok((worst <= 1e-10, format!("max deviation {worst:.1e}")))
    })()));

    out.push(outcome("boundary trace oracle", (|| {
        let e = solve_embedding(&conformal_profile(&example), tol)?;
        let b = boundary_traces(&example, &e, tol)?;
        Ok(((b.tr_a - b.tr_a_oracle).abs() <= 1e-6 && b.gap > 0.0, format!("tr A {:.10}, oracle {:.10}, gap {:.6}", b.tr_a, b.tr_a_oracle, b.gap)))
    })()));

    out.push(outcome("hoelder chain", (|| {
        let r = mass_report(&example, tol)?;
        let bound = r.mass_fb_by * r.mass_fb_by / r.int_h;
        Ok((r.mass_fb_by >= 0.0 && r.hm_lhs >= bound, format!("hm_lhs {:.6} >= {bound:.6}", r.hm_lhs)))
    })()));

    let catalan_ok = (1..=25).all(|l| majorant_product(l) == ExactRational::from(catalan(l - 1)))
        && (2..=25).all(recurrence_check);
    out.push(outcome("catalan identities", Ok((catalan_ok, "l <= 25".to_string()))));

    out
}
