//! Predictive probability of success (PPoS) and Phase III event-size
//! re-estimation.
//!
//! Success at the final analysis means `Z(1) <= z_alpha` with
//! `z_alpha = Φ⁻¹(alpha) < 0`, so a beneficial treatment has a negative
//! log hazard ratio. `Z(1) = sqrt(t) Z(t) + sqrt(1-t) Z(1-t)` combines the
//! interim and post-interim statistics.

use serde::{Deserialize, Serialize};

use crate::design::{DosePrior, InformationFraction};
use crate::error::{Error, Result};
use crate::stats::{normal_cdf, normal_quantile};

/// Interim quantities that PPoS depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PposInputs {
    /// OS events at the interim in the selected arm plus control.
    pub m1: u32,
    pub log_hr_hat: f64,
    pub mu_d: f64,
    pub sigma_d: f64,
    /// `Φ⁻¹(alpha)`, negative.
    pub z_alpha: f64,
    /// Interim standardized statistic `Z(t)`.
    pub z_t: f64,
}

impl PposInputs {
    /// Builds the inputs from interim data, deriving `z_alpha` and `Z(t)`.
    pub fn from_interim(m1: u32, log_hr_hat: f64, prior: &DosePrior, alpha: f64) -> Result<Self> {
        if m1 == 0 {
            return Err(Error::Domain("PPoS needs at least one interim OS event".into()));
        }
        if !(prior.sigma > 0.0) {
            return Err(Error::Domain("prior sigma must be positive".into()));
        }
        Ok(Self {
            m1,
            log_hr_hat,
            mu_d: prior.mu,
            sigma_d: prior.sigma,
            z_alpha: normal_quantile(alpha)?,
            z_t: interim_z(log_hr_hat, m1),
        })
    }

    /// Posterior mean of the log hazard ratio at the interim.
    pub fn posterior_mean(&self) -> f64 {
        let m1 = f64::from(self.m1);
        (self.log_hr_hat * m1 + self.sigma_d * self.mu_d) / (m1 + self.sigma_d)
    }

    pub fn posterior_variance(&self) -> f64 {
        4.0 / (f64::from(self.m1) + self.sigma_d)
    }

    /// `P(theta < 0)` under the interim posterior, the limit of PPoS as the
    /// post-interim event count grows without bound.
    pub fn posterior_benefit_probability(&self) -> f64 {
        normal_cdf(-self.posterior_mean() / self.posterior_variance().sqrt())
    }
}

/// Standardized log-rank-type statistic at the interim, using `se ≈ 2/√M`.
pub fn interim_z(log_hr_hat: f64, m1: u32) -> f64 {
    log_hr_hat * f64::from(m1).sqrt() / 2.0
}

/// PPoS for a given post-interim event count and information fraction `t`.
pub fn ppos_at_fraction(inputs: &PposInputs, m2_tilde: f64, t: f64) -> f64 {
    let bound = 2.0 * (inputs.z_alpha - t.sqrt() * inputs.z_t) / ((1.0 - t) * m2_tilde).sqrt();
    let spread = (4.0 / m2_tilde + inputs.posterior_variance()).sqrt();
    normal_cdf((bound - inputs.posterior_mean()) / spread)
}

/// PPoS with `t = M1 / (M1 + M2~)`.
pub fn ppos(inputs: &PposInputs, m2_tilde: u64) -> f64 {
    let m1 = f64::from(inputs.m1);
    let m2 = m2_tilde as f64;
    ppos_at_fraction(inputs, m2, m1 / (m1 + m2))
}

/// PPoS under the chosen information-fraction convention.
pub fn ppos_with(inputs: &PposInputs, m2_tilde: u64, mode: InformationFraction, m2_planned: u32) -> f64 {
    match mode {
        InformationFraction::PerCandidate => ppos(inputs, m2_tilde),
        InformationFraction::Planned => {
            let m1 = f64::from(inputs.m1);
            let t = m1 / (m1 + f64::from(m2_planned));
            ppos_at_fraction(inputs, m2_tilde as f64, t)
        }
    }
}

/// Smallest post-interim event count in `[m2_planned, m2_max]` whose PPoS
/// reaches `power_target`, or `m2_max` when none does.
///
/// PPoS need not be monotone in the event count, so the range is scanned
/// one event at a time and the first crossing wins.
pub fn reestimate_events(inputs: &PposInputs, m2_planned: u32, m2_max: u32, power_target: f64) -> u32 {
    reestimate_events_with(inputs, m2_planned, m2_max, power_target, InformationFraction::PerCandidate)
}

pub fn reestimate_events_with(
    inputs: &PposInputs,
    m2_planned: u32,
    m2_max: u32,
    power_target: f64,
    mode: InformationFraction,
) -> u32 {
    (m2_planned..=m2_max)
        .find(|&m2| ppos_with(inputs, u64::from(m2), mode, m2_planned) >= power_target)
        .unwrap_or(m2_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::RandomStream;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    const Z_ALPHA: f64 = -1.959_963_984_540_054;

    fn worked() -> PposInputs {
        PposInputs {
            m1: 68,
            log_hr_hat: 0.7f64.ln(),
            mu_d: 0.0,
            sigma_d: 8.0,
            z_alpha: Z_ALPHA,
            z_t: -1.4706,
        }
    }

    /// Predictive simulation: draw theta from the interim posterior, then the
    /// post-interim estimate, then combine the two stage statistics.
    fn ppos_monte_carlo(inputs: &PposInputs, m2: f64, draws: usize, seed: u64) -> (f64, f64) {
        let mut rs = RandomStream::new(seed, 0, 0);
        let m1 = f64::from(inputs.m1);
        let t = m1 / (m1 + m2);
        let post_sd = (4.0 / (m1 + inputs.sigma_d)).sqrt();
        let mut hits = 0usize;
        for _ in 0..draws {
            let z1: f64 = StandardNormal.sample(&mut rs);
            let z2: f64 = StandardNormal.sample(&mut rs);
            let theta = inputs.posterior_mean() + post_sd * z1;
            let theta_hat_later = theta + (4.0 / m2).sqrt() * z2;
            let z_later = theta_hat_later / (4.0 / m2).sqrt();
            let z_final = t.sqrt() * inputs.z_t + (1.0 - t).sqrt() * z_later;
            if z_final <= inputs.z_alpha {
                hits += 1;
            }
        }
        let p = hits as f64 / draws as f64;
        (p, (p * (1.0 - p) / draws as f64).sqrt())
    }

    #[test]
    fn interim_z_examples() {
        assert_eq!(interim_z(0.0, 50), 0.0);
        assert!((interim_z(0.7f64.ln(), 68) + 1.4706).abs() < 1e-4);
        assert!((interim_z(0.5f64.ln(), 100) + 3.4657).abs() < 1e-4);
    }

    #[test]
    fn worked_example_closed_form() {
        // Independent evaluation of the closed form (scipy) gives 0.686729.
        let p = ppos(&worked(), 226);
        assert!((p - 0.686_729).abs() < 1e-5, "ppos = {p}");
    }

    #[test]
    fn worked_example_matches_predictive_simulation() {
        let (mc, se) = ppos_monte_carlo(&worked(), 226.0, 200_000, 17);
        let p = ppos(&worked(), 226);
        assert!((p - mc).abs() < 0.01);
        assert!((p - mc).abs() < 4.0 * se);
    }

    #[test]
    fn overwhelming_interim_evidence() {
        let inputs = PposInputs { z_t: -10.0, log_hr_hat: -10.0 / (68f64.sqrt() / 2.0), ..worked() };
        for m2 in [100, 226, 400, 507] {
            assert!(ppos(&inputs, m2) > 0.999);
        }
    }

    #[test]
    fn large_event_limit_is_posterior_benefit_probability() {
        let inputs = worked();
        let limit = inputs.posterior_benefit_probability();
        assert!((limit - 0.917_896).abs() < 1e-5);
        assert!((ppos(&inputs, 1_000_000_000_000) - limit).abs() < 1e-4);
        // The gap shrinks like M2^(-1/2).
        let g6 = (ppos(&inputs, 1_000_000) - limit).abs();
        let g8 = (ppos(&inputs, 100_000_000) - limit).abs();
        assert!((g6 / g8 - 10.0).abs() < 0.5, "ratio {}", g6 / g8);
    }

    #[test]
    fn planned_fraction_agrees_at_planned_size() {
        let inputs = worked();
        let a = ppos_with(&inputs, 226, InformationFraction::Planned, 226);
        assert_eq!(a, ppos(&inputs, 226));
        let b = ppos_with(&inputs, 400, InformationFraction::Planned, 226);
        assert_ne!(b, ppos(&inputs, 400));
    }

    #[test]
    fn reestimation_branches() {
        let strong = PposInputs { log_hr_hat: 0.4f64.ln(), z_t: interim_z(0.4f64.ln(), 68), ..worked() };
        assert!(ppos(&strong, 226) >= 0.9);
        assert_eq!(reestimate_events(&strong, 226, 507, 0.9), 226);

        let weak = PposInputs { log_hr_hat: 0.98f64.ln(), z_t: interim_z(0.98f64.ln(), 68), ..worked() };
        assert!((226..=507).all(|m| ppos(&weak, m) < 0.9));
        assert_eq!(reestimate_events(&weak, 226, 507, 0.9), 507);
    }

    #[test]
    fn reestimation_matches_exhaustive_scan() {
        for hr in [0.55, 0.6, 0.62, 0.65, 0.68, 0.7, 0.72, 0.75] {
            for m1 in [40u32, 68, 90] {
                let lh = f64::ln(hr);
                let inputs = PposInputs { m1, log_hr_hat: lh, z_t: interim_z(lh, m1), ..worked() };
                let mut expected = 507;
                for m in 226..=507u32 {
                    if ppos(&inputs, u64::from(m)) >= 0.9 {
                        expected = m;
                        break;
                    }
                }
                assert_eq!(reestimate_events(&inputs, 226, 507, 0.9), expected);
            }
        }
    }

    #[test]
    fn from_interim_requires_events() {
        let prior = DosePrior { a: 2.0, b: 2.0, mu: 0.0, sigma: 8.0 };
        assert!(PposInputs::from_interim(0, -0.2, &prior, 0.025).is_err());
        let i = PposInputs::from_interim(68, 0.7f64.ln(), &prior, 0.025).unwrap();
        assert!((i.z_alpha - Z_ALPHA).abs() < 1e-12);
        assert!((i.z_t + 1.4706).abs() < 1e-4);
    }

    proptest! {
        #[test]
        fn reestimate_within_range(
            lh in -1.5f64..0.5, m1 in 1u32..200, planned in 50u32..300, extra in 0u32..300
        ) {
            let inputs = PposInputs { m1, log_hr_hat: lh, z_t: interim_z(lh, m1), ..worked() };
            let m = reestimate_events(&inputs, planned, planned + extra, 0.9);
            prop_assert!(m >= planned && m <= planned + extra);
        }

        #[test]
        fn ppos_decreasing_in_posterior_mean(
            mu in -1.0f64..1.0, step in 0.01f64..0.5, m2 in 10u64..1000
        ) {
            let a = PposInputs { mu_d: mu, ..worked() };
            let b = PposInputs { mu_d: mu + step, ..worked() };
            let (pa, pb) = (ppos(&a, m2), ppos(&b, m2));
            prop_assert!(pb < pa || pa == 0.0 || pb == 1.0);
        }
    }
}
