//! Analytical upper bounds on the overall type I error of the two-stage
//! design under the global null.

use crate::error::{Error, Result};
use crate::stats::{integrate, normal_cdf, normal_pdf, normal_quantile, Quadrature};

fn check_prob(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0,1), got {x}")))
    }
}

/// Bound on the Phase III false-positive rate when the best of `n_doses`
/// interim statistics is carried forward at information fraction `t`.
///
/// Equals `alpha` when `n_doses == 1`.
pub fn alpha3_upper_bound(n_doses: u32, t: f64, alpha: f64) -> Result<f64> {
    check_prob("alpha", alpha)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("t must lie in (0,1], got {t}")));
    }
    if n_doses == 0 {
        return Err(Error::Domain("n_doses must be at least 1".into()));
    }
    let z_alpha = normal_quantile(alpha)?;
    let (st, sc) = (t.sqrt(), (1.0 - t).sqrt());
    let k = f64::from(n_doses);
    integrate(
        |z| {
            let p = normal_cdf((z_alpha - sc * z) / st);
            // 1 - (1-p)^k without cancellation for tiny p.
            -f64::exp_m1(k * (-p).ln_1p()) * normal_pdf(z)
        },
        &Quadrature::real_line(),
    )
}

/// Probability bound attached to the Phase II pathway for control response
/// rate `p0`, `n0` patients per arm and futility settings `(tau0, s0)`.
///
/// Works with the normal approximation of each arm's response estimate,
/// `sd = sqrt(p0 (1-p0) / n0)`, so the integrand is centred on `p0`.
pub fn a2_probability(n_doses: u32, n0: u32, p0: f64, tau0: f64, s0: f64) -> Result<f64> {
    check_prob("p0", p0)?;
    check_prob("s0", s0)?;
    if n0 == 0 || n_doses == 0 {
        return Err(Error::Domain("n0 and n_doses must be at least 1".into()));
    }
    let sd = (p0 * (1.0 - p0) / f64::from(n0)).sqrt();
    let c = tau0 + normal_quantile(s0)? * std::f64::consts::SQRT_2 * sd;
    let shift = c / sd;
    let k = n_doses as i32;
    let all_below = integrate(
        |z| normal_cdf(z + shift).powi(k) * normal_pdf(z),
        &Quadrature::real_line(),
    )?;
    Ok(0.975 - all_below)
}

/// Overall bound `alpha * a2 + alpha * alpha3`.
pub fn overall_type1_bound(n_doses: u32, t: f64, n0: u32, p0: f64, tau0: f64, s0: f64, alpha: f64) -> Result<f64> {
    let a2 = a2_probability(n_doses, n0, p0, tau0, s0)?;
    let a3 = alpha3_upper_bound(n_doses, t, alpha)?;
    Ok(combine_bound(alpha, a2, a3))
}

/// Composes precomputed components into the overall bound.
pub fn combine_bound(alpha: f64, a2: f64, alpha3: f64) -> f64 {
    alpha * a2 + alpha * alpha3
}
