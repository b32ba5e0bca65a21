use serde::{Deserialize, Serialize};

/// A prior hyperparameter as a function of dose level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorFunction {
    Constant {
        value: f64,
    },
    Linear {
        intercept: f64,
        slope: f64,
    },
    /// `c0 + c1 d + c2 d^2`; a negative `c2` gives a bell-shaped dose response.
    Quadratic {
        c0: f64,
        c1: f64,
        c2: f64,
    },
    /// `lower + (upper - lower) / (1 + exp(-steepness (d - midpoint)))`.
    Sigmoid {
        lower: f64,
        upper: f64,
        midpoint: f64,
        steepness: f64,
    },
}

impl PriorFunction {
    pub fn eval(&self, dose: f64) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Linear { intercept, slope } => intercept + slope * dose,
            Self::Quadratic { c0, c1, c2 } => c0 + dose * (c1 + dose * c2),
            Self::Sigmoid {
                lower,
                upper,
                midpoint,
                steepness,
            } => lower + (upper - lower) / (1.0 + (-steepness * (dose - midpoint)).exp()),
        }
    }

    /// Quadratic through three `(dose, value)` points.
    pub fn quadratic_through(points: [(f64, f64); 3]) -> Self {
        let [(x0, y0), (x1, y1), (x2, y2)] = points;
        let d01 = (y1 - y0) / (x1 - x0);
        let d12 = (y2 - y1) / (x2 - x1);
        let c2 = (d12 - d01) / (x2 - x0);
        let c1 = d01 - c2 * (x0 + x1);
        let c0 = y0 - x0 * (c1 + x0 * c2);
        Self::Quadratic { c0, c1, c2 }
    }

    /// Line through two `(dose, value)` points.
    pub fn linear_through(points: [(f64, f64); 2]) -> Self {
        let [(x0, y0), (x1, y1)] = points;
        let slope = (y1 - y0) / (x1 - x0);
        Self::Linear {
            intercept: y0 - slope * x0,
            slope,
        }
    }
}

/// Beta prior for the control-arm response rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaPrior {
    pub a: f64,
    pub b: f64,
}

impl Default for BetaPrior {
    fn default() -> Self {
        Self { a: 2.0, b: 2.0 }
    }
}

/// Dose-indexed prior families.
///
/// `p_i ~ Beta(a(d_i), b(d_i))` and `theta_i ~ N(mu(d_i), 4 / sigma(d_i))`,
/// so `sigma` acts as a prior event count on the log hazard ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorFunctions {
    pub a: PriorFunction,
    pub b: PriorFunction,
    pub mu: PriorFunction,
    pub sigma: PriorFunction,
    pub control: BetaPrior,
}

impl Default for PriorFunctions {
    /// Beta(2,2) on every response rate and N(0, 0.5) on every log hazard ratio.
    fn default() -> Self {
        Self {
            a: PriorFunction::Constant { value: 2.0 },
            b: PriorFunction::Constant { value: 2.0 },
            mu: PriorFunction::Constant { value: 0.0 },
            sigma: PriorFunction::Constant { value: 8.0 },
            control: BetaPrior::default(),
        }
    }
}

/// Prior hyperparameters evaluated at one dose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DosePrior {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub sigma: f64,
}

impl DosePrior {
    pub fn log_hr_variance(&self) -> f64 {
        4.0 / self.sigma
    }
}

pub fn prior_at(priors: &PriorFunctions, dose: f64) -> DosePrior {
    DosePrior {
        a: priors.a.eval(dose),
        b: priors.b.eval(dose),
        mu: priors.mu.eval(dose),
        sigma: priors.sigma.eval(dose),
    }
}
