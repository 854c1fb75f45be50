use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::thermal_lindblad::{pure_state, trace_norm, Propagator};
use crate::{Error, Result};

/// Default trace-distance threshold for leaving a state.
pub const DELTA_THRESHOLD: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalTime {
    pub time: f64,
    /// The threshold was not crossed before the horizon; `time` is the horizon.
    pub beyond_horizon: bool,
}

/// `||rho(t) - rho0||_1`.
pub fn departure(prop: &Propagator<'_>, rho0: &Mat<Complex64>, t: f64) -> Result<f64> {
    trace_norm(&(prop.evolve(rho0, t)? - rho0))
}

/// First time at which `|psi><psi|` has moved a trace distance `delta` away.
///
/// The crossing is bracketed by doubling from `1e-3` and refined by geometric
/// bisection to a relative width of `1e-4`.
pub fn survival_time(psi: &[Complex64], prop: &Propagator<'_>, delta: f64, horizon: f64) -> Result<SurvivalTime> {
    if !(delta > 0.0) || !(horizon > 0.0) {
        return Err(Error::InvalidArgument("delta and horizon must be positive".into()));
    }
    let rho0 = pure_state(psi);
    let mut lo = 0.0;
    let mut hi = 1e-3f64.min(horizon);
    loop {
        if departure(prop, &rho0, hi)? >= delta {
            break;
        }
        if hi >= horizon {
            return Ok(SurvivalTime { time: horizon, beyond_horizon: true });
        }
        lo = hi;
        hi = (2.0 * hi).min(horizon);
    }
    while hi - lo > 1e-4 * hi {
        let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
        if departure(prop, &rho0, mid)? >= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(SurvivalTime { time: hi, beyond_horizon: false })
}
