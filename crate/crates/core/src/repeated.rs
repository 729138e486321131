use crate::error::{GameError, Result};

/// Discounted total of a finite stream of stage payoffs, `Σ δ^(t-1) · u_t`.
pub fn discounted_sum(stage_payoffs: &[f64], delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(GameError::invalid(format!(
            "discount factor must lie in (0, 1], got {delta}"
        )));
    }
    let mut weight = 1.0;
    let mut total = 0.0;
    for &u in stage_payoffs {
        total += weight * u;
        weight *= delta;
    }
    Ok(total)
}
