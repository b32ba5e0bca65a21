//! Grid-search calibration of the futility and significance margins.
//!
//! Both searches simulate interim snapshots once and then sweep the grid
//! over the same snapshots, so neighbouring grid points see common random
//! numbers.

use serde::{Deserialize, Serialize};

use crate::design::{DesignSpec, ScenarioSpec};
use crate::engine::{map_indexed, simulate_interim};
use crate::error::{Error, Result};
use crate::interim::{exceedance_probability, select_optimal_dose, JointPosterior, OrrPosterior};
use crate::stats::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationTarget {
    /// Cap on P(terminate) when one dose is effective.
    pub false_negative_cap: f64,
    /// Cap on P(expand) under the global null.
    pub false_positive_cap: f64,
    /// ORR gain of the effective dose in the false-negative scenario.
    pub orr_shift_for_fn: f64,
    pub control_orr: f64,
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_step: f64,
    pub n_sims_per_point: usize,
}

impl Default for CalibrationTarget {
    fn default() -> Self {
        Self {
            false_negative_cap: 0.05,
            false_positive_cap: 0.025,
            orr_shift_for_fn: 0.15,
            control_orr: 0.2,
            grid_lo: -1.0,
            grid_hi: 1.0,
            grid_step: 0.01,
            n_sims_per_point: 10_000,
        }
    }
}

impl CalibrationTarget {
    pub fn validate(&self) -> Result<()> {
        let prob = |x: f64| x > 0.0 && x <= 1.0;
        if !(self.grid_lo < self.grid_hi) {
            return Err(Error::Domain("grid_lo must be below grid_hi".into()));
        }
        if !(self.grid_step > 0.0) {
            return Err(Error::Domain("grid_step must be positive".into()));
        }
        if !prob(self.false_negative_cap) || !prob(self.false_positive_cap) {
            return Err(Error::Domain("caps must lie in (0,1]".into()));
        }
        if !(self.control_orr > 0.0 && self.control_orr + self.orr_shift_for_fn < 1.0) {
            return Err(Error::Domain("control_orr and shift must keep ORR inside (0,1)".into()));
        }
        if self.n_sims_per_point == 0 {
            return Err(Error::Domain("n_sims_per_point must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.grid_hi - self.grid_lo) / self.grid_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| {
                let v = self.grid_lo + k as f64 * self.grid_step;
                (v * 1e10).round() / 1e10
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub value: f64,
    /// Estimated error rate at `value`.
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub rate_se: f64,
    /// False when no grid point met the cap and a boundary was returned.
    pub attained: bool,
    pub n_sims: usize,
    pub n_trigger_failed: usize,
    /// `(tau, rate)` over the whole grid.
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
struct Selected {
    dose: JointPosterior,
    control: OrrPosterior,
}

/// Scenario with every arm at the control ORR and unit hazard ratios,
/// optionally lifting the last dose by `shift`.
pub fn calibration_scenario(template: &ScenarioSpec, n_doses: usize, control_orr: f64, shift: f64) -> ScenarioSpec {
    let mut orr = vec![control_orr; n_doses + 1];
    if let Some(last) = orr.last_mut() {
        *last += shift;
    }
    ScenarioSpec {
        name: if shift == 0.0 { "calibration-null".into() } else { "calibration-one-effective".into() },
        orr,
        hr_pfs: vec![1.0; n_doses + 1],
        hr_os: vec![1.0; n_doses + 1],
        true_optimal_doses: None,
        ..template.clone()
    }
}

fn interim_draws(
    spec: &DesignSpec,
    scen: &ScenarioSpec,
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<(Vec<Selected>, usize)> {
    let (spec, scen) = crate::design::validate(spec.clone(), scen.clone())?;
    let snaps = map_indexed(n, workers, |r| {
        let Some(s) = simulate_interim(&spec, &scen, &RandomStream::new(seed, r as u64, 0))? else {
            return Ok(None);
        };
        let sel = select_optimal_dose(&s.posteriors.doses, spec.dose_scoring)?;
        Ok(Some(Selected { dose: s.posteriors.doses[sel], control: s.posteriors.control }))
    })?;
    let failed = snaps.iter().filter(|s| s.is_none()).count();
    Ok((snaps.into_iter().flatten().collect(), failed))
}

fn finish(
    grid: &[f64],
    rates: Vec<f64>,
    cap: f64,
    pick_largest: bool,
    n: usize,
    failed: usize,
) -> CalibrationResult {
    let ok = |i: &usize| rates[*i] <= cap;
    let chosen = if pick_largest {
        (0..grid.len()).rev().find(ok)
    } else {
        (0..grid.len()).find(ok)
    };
    let attained = chosen.is_some();
    let i = chosen.unwrap_or(if pick_largest { 0 } else { grid.len() - 1 });
    let r = rates[i];
    CalibrationResult {
        value: grid[i],
        rate: r,
        rate_se: if n > 0 { (r * (1.0 - r) / n as f64).sqrt() } else { 0.0 },
        attained,
        n_sims: n,
        n_trigger_failed: failed,
        curve: grid.iter().copied().zip(rates).collect(),
    }
}

/// Largest grid `tau0` whose early-termination rate stays within the cap
/// when only the highest dose is effective.
pub fn calibrate_tau0_with(
    spec: &DesignSpec,
    target: &CalibrationTarget,
    template: &ScenarioSpec,
    seed: u64,
    workers: usize,
) -> Result<CalibrationResult> {
    target.validate()?;
    let scen = calibration_scenario(template, spec.n_doses(), target.control_orr, target.orr_shift_for_fn);
    let (draws, failed) = interim_draws(spec, &scen, target.n_sims_per_point, seed, workers)?;
    let grid = target.grid();
    let n = draws.len();
    let rates = grid
        .iter()
        .map(|&tau| {
            let hits = draws
                .iter()
                .filter(|s| exceedance_probability(&s.dose, &s.control, spec.dose_scoring, tau) <= spec.s0)
                .count();
            if n == 0 { 1.0 } else { hits as f64 / n as f64 }
        })
        .collect();
    Ok(finish(&grid, rates, target.false_negative_cap, true, n, failed))
}

/// Smallest grid `tau1` whose Phase III entry rate under the global null
/// stays within the cap. Futility uses `min(spec.tau0, tau1)`.
pub fn calibrate_tau1_with(
    spec: &DesignSpec,
    target: &CalibrationTarget,
    template: &ScenarioSpec,
    seed: u64,
    workers: usize,
) -> Result<CalibrationResult> {
    target.validate()?;
    let scen = calibration_scenario(template, spec.n_doses(), target.control_orr, 0.0);
    let (draws, failed) = interim_draws(spec, &scen, target.n_sims_per_point, seed, workers)?;
    let grid = target.grid();
    let n = draws.len();
    let rates = grid
        .iter()
        .map(|&tau| {
            let tau0 = spec.tau0.min(tau);
            let hits = draws
                .iter()
                .filter(|s| {
                    let q = |t| exceedance_probability(&s.dose, &s.control, spec.dose_scoring, t);
                    q(tau0) > spec.s0 && q(tau) >= spec.s1
                })
                .count();
            if n == 0 { 1.0 } else { hits as f64 / n as f64 }
        })
        .collect();
    Ok(finish(&grid, rates, target.false_positive_cap, false, n, failed))
}

pub fn calibrate_tau0(spec: &DesignSpec, target: &CalibrationTarget, seed: u64) -> Result<CalibrationResult> {
    calibrate_tau0_with(spec, target, &ScenarioSpec::default(), seed, 0)
}

pub fn calibrate_tau1(spec: &DesignSpec, target: &CalibrationTarget, seed: u64) -> Result<CalibrationResult> {
    calibrate_tau1_with(spec, target, &ScenarioSpec::default(), seed, 0)
}

/// Calibrates `tau0`, then `tau1` with the futility gate at the new `tau0`.
pub fn calibrate_margins(
    spec: &DesignSpec,
    target: &CalibrationTarget,
    template: &ScenarioSpec,
    seed: u64,
    workers: usize,
) -> Result<(CalibrationResult, CalibrationResult)> {
    let tau0 = calibrate_tau0_with(spec, target, template, seed, workers)?;
    let with_tau0 = DesignSpec { tau0: tau0.value, ..spec.clone() };
    let tau1 = calibrate_tau1_with(&with_tau0, target, template, seed, workers)?;
    Ok((tau0, tau1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_doses: usize,
    pub tau0: CalibrationResult,
    pub tau1: CalibrationResult,
}

/// Calibrates both margins for each dose count, with doses `1..=n`.
pub fn sweep_dose_counts(
    spec: &DesignSpec,
    target: &CalibrationTarget,
    template: &ScenarioSpec,
    dose_counts: &[usize],
    seed: u64,
    workers: usize,
) -> Result<Vec<SweepPoint>> {
    dose_counts
        .iter()
        .map(|&k| {
            let (tau0, tau1) = calibrate_margins(&spec.with_dose_count(k), target, template, seed, workers)?;
            Ok(SweepPoint { n_doses: k, tau0, tau1 })
        })
        .collect()
}
