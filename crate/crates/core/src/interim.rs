//! Interim Bayesian analysis: per-dose posteriors for ORR and the OS log
//! hazard ratio, optimal-dose selection, and the terminate / continue /
//! expand decision.
//!
//! ORR uses a Beta-binomial update summarised by its exact mean and
//! variance; the log hazard ratio uses a normal prior `N(mu, 4/sigma)`
//! combined with the `N(log h, 4/M1)` likelihood approximation. The two
//! are joined as a bivariate normal with a fixed correlation `rho1`.

use serde::{Deserialize, Serialize};

use crate::design::{DesignSpec, DosePrior, DoseScoring, InterimAction};
use crate::error::{Error, Result};
use crate::stats::normal_cdf;

/// Interim data for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmInterimData {
    /// Patients with mature response.
    pub n: u32,
    /// Responders among them.
    pub y: u32,
    /// OS events pooled over this arm and control.
    pub m1: u32,
    /// Estimated log hazard ratio versus control; ignored when `m1 == 0`.
    pub log_hr_hat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrrPosterior {
    pub a_post: f64,
    pub b_post: f64,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrPosterior {
    pub mean: f64,
    pub variance: f64,
}

/// Bivariate normal posterior over `(p_i, theta_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointPosterior {
    pub mu_p: f64,
    pub mu_theta: f64,
    pub sd_p: f64,
    pub sd_theta: f64,
    pub rho1: f64,
}

impl JointPosterior {
    pub fn covariance(&self) -> f64 {
        self.rho1 * self.sd_p * self.sd_theta
    }
}

/// Outcome of the interim analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterimDecision {
    /// 0-based index into the design's dose levels.
    pub selected_dose: usize,
    pub action: InterimAction,
    /// `P(p* - p0 >= tau0 | theta*)`.
    pub futility_prob: f64,
    /// `P(p* - p0 >= tau1 | theta*)`.
    pub significance_prob: f64,
    /// Re-estimated post-interim OS events, set only on expansion.
    pub adjusted_m2: Option<u32>,
    /// PPoS evaluated at `adjusted_m2`.
    pub ppos_at_adjusted: Option<f64>,
    /// Expansion with PPoS at or above the accelerated-approval threshold.
    pub aa_supportable: bool,
}

pub fn orr_posterior(a: f64, b: f64, n: u32, y: u32) -> Result<OrrPosterior> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("Beta prior needs a, b > 0, got ({a}, {b})")));
    }
    if y > n {
        return Err(Error::Domain(format!("responders {y} exceed patients {n}")));
    }
    let a_post = a + f64::from(y);
    let b_post = b + f64::from(n - y);
    let total = a_post + b_post;
    Ok(OrrPosterior {
        a_post,
        b_post,
        mean: a_post / total,
        variance: a_post * b_post / ((total + 1.0) * total * total),
    })
}

pub fn hr_posterior(log_hr_hat: f64, m1: u32, mu_d: f64, sigma_d: f64) -> HrPosterior {
    let events = f64::from(m1);
    let data_term = if m1 == 0 { 0.0 } else { log_hr_hat * events };
    HrPosterior {
        mean: (data_term + sigma_d * mu_d) / (events + sigma_d),
        variance: 4.0 / (events + sigma_d),
    }
}

pub fn joint_posterior(orr: &OrrPosterior, hr: &HrPosterior, rho1: f64) -> Result<JointPosterior> {
    if !(rho1 > -1.0 && rho1 < 1.0) {
        return Err(Error::Domain(format!("rho1 must lie in (-1,1), got {rho1}")));
    }
    Ok(JointPosterior {
        mu_p: orr.mean,
        mu_theta: hr.mean,
        sd_p: orr.variance.sqrt(),
        sd_theta: hr.variance.sqrt(),
        rho1,
    })
}

/// Conditional posterior mean of the response rate used to rank doses.
pub fn dose_score(jp: &JointPosterior, scoring: DoseScoring) -> f64 {
    match scoring {
        DoseScoring::Anchored => jp.mu_p + jp.rho1 * (jp.sd_p / jp.sd_theta) * jp.mu_theta,
        DoseScoring::Literal => jp.mu_p,
    }
}

/// Index of the highest-scoring dose; ties go to the lowest dose.
pub fn select_optimal_dose(posteriors: &[JointPosterior], scoring: DoseScoring) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, jp) in posteriors.iter().enumerate() {
        let s = dose_score(jp, scoring);
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::Domain("cannot select a dose from an empty list".into()))
}

/// `P(p_sel - p0 >= tau)` with `p_sel | theta ~ N(score, sd_p^2 (1 - rho^2))`
/// and an independent `p0 ~ N(control.mean, control.variance)`.
pub fn exceedance_probability(
    selected: &JointPosterior,
    control: &OrrPosterior,
    scoring: DoseScoring,
    tau: f64,
) -> f64 {
    let cond_var = selected.sd_p * selected.sd_p * (1.0 - selected.rho1 * selected.rho1);
    let diff_mean = dose_score(selected, scoring) - control.mean;
    let sd = (cond_var + control.variance).sqrt();
    normal_cdf((diff_mean - tau) / sd)
}

/// Applies the futility and significance gates to the selected dose.
///
/// `selected_dose` is only recorded; re-estimation fields are left empty.
pub fn decide(
    selected_dose: usize,
    selected: &JointPosterior,
    control: &OrrPosterior,
    spec: &DesignSpec,
) -> InterimDecision {
    let futility_prob = exceedance_probability(selected, control, spec.dose_scoring, spec.tau0);
    let significance_prob = exceedance_probability(selected, control, spec.dose_scoring, spec.tau1);
    let action = if futility_prob <= spec.s0 {
        InterimAction::Terminate
    } else if significance_prob >= spec.s1 {
        InterimAction::ExpandPhaseIII
    } else {
        InterimAction::ContinuePhaseII
    };
    InterimDecision {
        selected_dose,
        action,
        futility_prob,
        significance_prob,
        adjusted_m2: None,
        ppos_at_adjusted: None,
        aa_supportable: false,
    }
}

/// Posteriors for every dose plus the control ORR posterior.
#[derive(Debug, Clone, PartialEq)]
pub struct InterimPosteriors {
    pub doses: Vec<JointPosterior>,
    pub control: OrrPosterior,
}

pub fn interim_posteriors(
    spec: &DesignSpec,
    control: (u32, u32),
    arms: &[ArmInterimData],
) -> Result<InterimPosteriors> {
    if arms.len() != spec.n_doses() {
        return Err(Error::Domain(format!(
            "{} arms of interim data for {} doses",
            arms.len(),
            spec.n_doses()
        )));
    }
    let c = spec.priors.control;
    let control = orr_posterior(c.a, c.b, control.0, control.1)?;
    let doses = spec
        .dose_levels
        .iter()
        .zip(arms)
        .map(|(&d, arm)| {
            let prior: DosePrior = crate::design::prior_at(&spec.priors, d);
            let orr = orr_posterior(prior.a, prior.b, arm.n, arm.y)?;
            let hr = hr_posterior(arm.log_hr_hat, arm.m1, prior.mu, prior.sigma);
            joint_posterior(&orr, &hr, spec.rho1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InterimPosteriors { doses, control })
}

/// Dose selection followed by the interim decision.
pub fn analyze_interim(spec: &DesignSpec, posteriors: &InterimPosteriors) -> Result<InterimDecision> {
    let sel = select_optimal_dose(&posteriors.doses, spec.dose_scoring)?;
    Ok(decide(sel, &posteriors.doses[sel], &posteriors.control, spec))
}
