use crate::error::{Error, Result};
use crate::stats::normal::normal_quantile;

/// Schoenfeld's required number of events for a 1:1 two-arm survival
/// comparison: `ceil(4 (z_{1-α} + z_power)^2 / ln(hr)^2)`.
pub fn schoenfeld_events(hr_alt: f64, alpha_one_sided: f64, power: f64) -> Result<u64> {
    if !(hr_alt > 0.0 && hr_alt < 1.0) {
        return Err(Error::Domain(format!(
            "hazard ratio under the alternative must lie in (0,1), got {hr_alt}"
        )));
    }
    let z_alpha = normal_quantile(1.0 - alpha_one_sided)?;
    let z_power = normal_quantile(power)?;
    let events = 4.0 * (z_alpha + z_power).powi(2) / hr_alt.ln().powi(2);
    Ok(events.ceil() as u64)
}
