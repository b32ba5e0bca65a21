use serde::{Deserialize, Serialize};

use super::prior::{prior_at, PriorFunctions};

/// How the dose-selection score conditions on the log hazard ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DoseScoring {
    /// `mu_p + rho * (sd_p / sd_theta) * mu_theta`: the conditional mean of the
    /// response rate given `theta = mu_theta`, measured from the null log HR of 0.
    #[default]
    Anchored,
    /// Conditioning on the posterior mean itself, which reduces to `mu_p`.
    Literal,
}

/// Information fraction used inside the PPoS formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InformationFraction {
    /// `t = M1 / (M1 + M2~)` recomputed for every candidate `M2~`.
    #[default]
    PerCandidate,
    /// `t = M1 / (M1 + M2)` frozen at the planned Phase III event size.
    Planned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    LowestDose,
}

/// Static description of a seamless Phase II/III dose-optimization design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DesignSpec {
    /// Candidate dose levels, strictly increasing.
    pub dose_levels: Vec<f64>,
    pub priors: PriorFunctions,
    /// Assumed posterior correlation between ORR and the OS log hazard ratio.
    pub rho1: f64,
    /// Futility confidence level.
    pub s0: f64,
    /// Significance confidence level.
    pub s1: f64,
    /// Futility margin on the ORR difference.
    pub tau0: f64,
    /// Significance margin on the ORR difference.
    pub tau1: f64,
    /// Pooled PFS events (selected arm + control) for the Phase II analysis.
    pub phase2_events: u32,
    /// Planned post-interim OS events for Phase III.
    pub m2_planned: u32,
    /// Cap on the re-estimated post-interim OS events.
    pub m2_max: u32,
    pub alpha_one_sided: f64,
    /// Desired power `1 - beta`, also the PPoS target for re-estimation.
    pub power_target: f64,
    /// Mature-ORR patients required in every arm before the interim.
    pub interim_orr_n_per_arm: u32,
    /// Control-arm OS events required before the interim.
    pub interim_min_control_os_events: u32,
    pub argmax_tie_break: TieBreak,
    pub dose_scoring: DoseScoring,
    pub information_fraction: InformationFraction,
    /// PPoS level at which an expansion is flagged as supporting accelerated
    /// approval; defaults to `power_target`.
    pub aa_ppos_threshold: Option<f64>,
}

impl Default for DesignSpec {
    fn default() -> Self {
        Self {
            dose_levels: vec![1.0, 2.0, 3.0],
            priors: PriorFunctions::default(),
            rho1: -0.5,
            s0: 0.9,
            s1: 0.9,
            tau0: -0.05,
            tau1: 0.10,
            phase2_events: 140,
            m2_planned: 226,
            m2_max: 507,
            alpha_one_sided: 0.025,
            power_target: 0.90,
            interim_orr_n_per_arm: 60,
            interim_min_control_os_events: 30,
            argmax_tie_break: TieBreak::LowestDose,
            dose_scoring: DoseScoring::Anchored,
            information_fraction: InformationFraction::PerCandidate,
            aa_ppos_threshold: None,
        }
    }
}

impl DesignSpec {
    pub fn n_doses(&self) -> usize {
        self.dose_levels.len()
    }

    pub fn aa_threshold(&self) -> f64 {
        self.aa_ppos_threshold.unwrap_or(self.power_target)
    }

    /// Same design with `n` equally spaced doses `1..=n`.
    pub fn with_dose_count(&self, n: usize) -> Self {
        Self {
            dose_levels: (1..=n).map(|d| d as f64).collect(),
            ..self.clone()
        }
    }
}

/// Default latent correlation over (response, PFS, OS).
pub const DEFAULT_LATENT_CORR: [[f64; 3]; 3] = [[1.0, 0.5, 0.5], [0.5, 1.0, 0.7], [0.5, 0.7, 1.0]];

/// Ground-truth data-generating world for one simulated trial.
///
/// Per-arm vectors put the control arm first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    pub orr: Vec<f64>,
    pub hr_pfs: Vec<f64>,
    pub hr_os: Vec<f64>,
    pub control_median_os_months: f64,
    pub control_median_pfs_months: f64,
    /// Total accrual across all open arms.
    pub accrual_rate_per_month: f64,
    /// Total accrual across the two arms kept after the interim; defaults
    /// to `accrual_rate_per_month`.
    pub post_interim_accrual_rate_per_month: Option<f64>,
    pub response_readout_lag_months: f64,
    pub latent_corr: [[f64; 3]; 3],
    pub max_enrollment_per_arm: u32,
    /// 1-based doses regarded as truly optimal. When absent, every dose with
    /// the smallest OS hazard ratio qualifies.
    pub true_optimal_doses: Option<Vec<usize>>,
    /// Force `OS >= PFS` for each simulated patient.
    pub clamp_os_to_pfs: bool,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            name: "global_null".into(),
            orr: vec![0.2; 4],
            hr_pfs: vec![1.0; 4],
            hr_os: vec![1.0; 4],
            control_median_os_months: 12.0,
            control_median_pfs_months: 6.0,
            accrual_rate_per_month: 20.0,
            post_interim_accrual_rate_per_month: None,
            response_readout_lag_months: 4.2,
            latent_corr: DEFAULT_LATENT_CORR,
            max_enrollment_per_arm: 400,
            true_optimal_doses: None,
            clamp_os_to_pfs: false,
        }
    }
}

impl ScenarioSpec {
    /// Scenario with the given per-arm effects and default timing.
    pub fn new(name: &str, orr: &[f64], hr_pfs: &[f64], hr_os: &[f64]) -> Self {
        Self {
            name: name.into(),
            orr: orr.to_vec(),
            hr_pfs: hr_pfs.to_vec(),
            hr_os: hr_os.to_vec(),
            ..Self::default()
        }
    }

    pub fn n_arms(&self) -> usize {
        self.orr.len()
    }

    pub fn post_interim_accrual(&self) -> f64 {
        self.post_interim_accrual_rate_per_month
            .unwrap_or(self.accrual_rate_per_month)
    }

    /// 0-based indices of the truly optimal doses.
    pub fn true_optimal_set(&self) -> Vec<usize> {
        if let Some(doses) = &self.true_optimal_doses {
            return doses.iter().map(|d| d - 1).collect();
        }
        let treated = self.hr_os.get(1..).unwrap_or(&[]);
        let best = treated.iter().copied().fold(f64::INFINITY, f64::min);
        treated
            .iter()
            .enumerate()
            .filter(|(_, &hr)| (hr - best).abs() <= 1e-12)
            .map(|(i, _)| i)
            .collect()
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

/// Every invariant a configuration violates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationErrors(pub Vec<FieldError>);

impl ValidationErrors {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.0.push(FieldError {
            path: path.into(),
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FieldError> {
        self.0.iter()
    }

    fn into_result(self) -> Result<(), ValidationErrors> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl std::fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} invalid field(s)", self.0.len())?;
        for e in &self.0 {
            write!(f, "; {}: {}", e.path, e.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationErrors {}

fn open_unit(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

impl DesignSpec {
    pub fn validate(&self) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        self.check(&mut errs);
        errs.into_result()
    }

    fn check(&self, errs: &mut ValidationErrors) {
        if self.dose_levels.is_empty() {
            errs.push("design.dose_levels", "dose_levels must not be empty");
        }
        if self.dose_levels.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            errs.push("design.dose_levels", "dose_levels must be positive");
        }
        if self.dose_levels.windows(2).any(|w| !(w[0] < w[1])) {
            errs.push("design.dose_levels", "dose_levels not strictly increasing");
        }
        for (i, &d) in self.dose_levels.iter().enumerate() {
            let p = prior_at(&self.priors, d);
            for (name, value) in [("a", p.a), ("b", p.b), ("sigma", p.sigma)] {
                if !(value.is_finite() && value > 0.0) {
                    errs.push(
                        format!("design.priors.{name}"),
                        format!("{name}(d) = {value} is not positive at dose_levels[{i}] = {d}"),
                    );
                }
            }
            if !p.mu.is_finite() {
                errs.push("design.priors.mu", format!("mu(d) is not finite at dose {d}"));
            }
        }
        let c = self.priors.control;
        if !(c.a > 0.0 && c.b > 0.0) {
            errs.push("design.priors.control", "control Beta parameters must be positive");
        }
        if !(self.rho1 > -1.0 && self.rho1 < 1.0) {
            errs.push("design.rho1", "rho1 outside (-1,1)");
        }
        for (name, v) in [("s0", self.s0), ("s1", self.s1)] {
            if !open_unit(v) {
                errs.push(format!("design.{name}"), format!("{name} outside (0,1)"));
            }
        }
        for (name, v) in [("tau0", self.tau0), ("tau1", self.tau1)] {
            if !(-1.0..=1.0).contains(&v) {
                errs.push(format!("design.{name}"), format!("{name} outside [-1,1]"));
            }
        }
        if self.tau0 > self.tau1 {
            errs.push("design.tau0", "tau0 must not exceed tau1");
        }
        if self.phase2_events == 0 {
            errs.push("design.phase2_events", "phase2_events must be positive");
        }
        if self.m2_planned == 0 {
            errs.push("design.m2_planned", "m2_planned must be positive");
        }
        if self.m2_planned > self.m2_max {
            errs.push("design.m2_max", "m2_planned exceeds m2_max");
        }
        if !(self.alpha_one_sided > 0.0 && self.alpha_one_sided < 0.5) {
            errs.push("design.alpha_one_sided", "alpha_one_sided outside (0,0.5)");
        }
        if !open_unit(self.power_target) {
            errs.push("design.power_target", "power_target outside (0,1)");
        }
        if self.interim_orr_n_per_arm == 0 {
            errs.push("design.interim_orr_n_per_arm", "interim_orr_n_per_arm must be positive");
        }
        if let Some(t) = self.aa_ppos_threshold {
            if !open_unit(t) {
                errs.push("design.aa_ppos_threshold", "aa_ppos_threshold outside (0,1)");
            }
        }
    }
}

impl ScenarioSpec {
    /// Checks the scenario against a design with `n_doses` candidate doses.
    pub fn validate(&self, n_doses: usize) -> Result<(), ValidationErrors> {
        let mut errs = ValidationErrors::default();
        self.check(n_doses, &mut errs);
        errs.into_result()
    }

    fn check(&self, n_doses: usize, errs: &mut ValidationErrors) {
        let arms = n_doses + 1;
        for (name, v) in [("orr", &self.orr), ("hr_pfs", &self.hr_pfs), ("hr_os", &self.hr_os)] {
            if v.len() != arms {
                errs.push(
                    format!("scenario.{name}"),
                    format!("{name} has {} entries, expected {arms} (control first)", v.len()),
                );
            }
        }
        if self.orr.iter().any(|&p| !open_unit(p)) {
            errs.push("scenario.orr", "orr entries must lie in (0,1)");
        }
        for (name, v) in [("hr_pfs", &self.hr_pfs), ("hr_os", &self.hr_os)] {
            if v.iter().any(|&h| !(h.is_finite() && h > 0.0)) {
                errs.push(format!("scenario.{name}"), format!("{name} entries must be positive"));
            }
        }
        for (name, v) in [
            ("control_median_os_months", self.control_median_os_months),
            ("control_median_pfs_months", self.control_median_pfs_months),
            ("accrual_rate_per_month", self.accrual_rate_per_month),
            ("response_readout_lag_months", self.response_readout_lag_months),
        ] {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("scenario.{name}"), format!("{name} must be positive"));
            }
        }
        if let Some(r) = self.post_interim_accrual_rate_per_month {
            if !(r.is_finite() && r > 0.0) {
                errs.push(
                    "scenario.post_interim_accrual_rate_per_month",
                    "post_interim_accrual_rate_per_month must be positive",
                );
            }
        }
        if let Err(msg) = check_correlation(&self.latent_corr) {
            errs.push("scenario.latent_corr", msg);
        }
        if self.max_enrollment_per_arm == 0 {
            errs.push("scenario.max_enrollment_per_arm", "max_enrollment_per_arm must be positive");
        }
        if let Some(doses) = &self.true_optimal_doses {
            if doses.is_empty() || doses.iter().any(|&d| d == 0 || d > n_doses) {
                errs.push(
                    "scenario.true_optimal_doses",
                    format!("true_optimal_doses must be 1-based indices in 1..={n_doses}"),
                );
            }
        }
    }
}

fn check_correlation(m: &[[f64; 3]; 3]) -> Result<(), String> {
    for i in 0..3 {
        if (m[i][i] - 1.0).abs() > 1e-12 {
            return Err("latent_corr must have a unit diagonal".into());
        }
        for j in 0..3 {
            if (m[i][j] - m[j][i]).abs() > 1e-12 {
                return Err("latent_corr must be symmetric".into());
            }
        }
    }
    if cholesky3(m).is_none() {
        return Err("latent_corr is not positive definite".into());
    }
    Ok(())
}

/// Lower-triangular Cholesky factor of a 3x3 matrix, if positive definite.
pub fn cholesky3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = m[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                if !(s > 1e-12) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Some(l)
}

/// Validates a design and scenario together, reporting every violation.
pub fn validate(
    design: DesignSpec,
    scenario: ScenarioSpec,
) -> Result<(DesignSpec, ScenarioSpec), ValidationErrors> {
    let mut errs = ValidationErrors::default();
    design.check(&mut errs);
    scenario.check(design.n_doses(), &mut errs);
    if scenario.max_enrollment_per_arm < design.interim_orr_n_per_arm {
        errs.push(
            "scenario.max_enrollment_per_arm",
            "max_enrollment_per_arm is below interim_orr_n_per_arm",
        );
    }
    errs.into_result().map(|()| (design, scenario))
}
