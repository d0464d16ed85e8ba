use rand::Rng as _;

use super::{kendall_tau, StatsError};
use crate::exec::Exec;
use crate::seed::{derive_seed, rng_from};

/// Consecutive degenerate (constant) resamples tolerated before giving up.
pub const BOOTSTRAP_MAX_REDRAWS: usize = 1000;

/// Standard deviation of Kendall's tau over `n` paired resamples drawn with
/// replacement. Resample `k` uses its own seeded stream, so the result does
/// not depend on the execution strategy.
pub fn bootstrap_se(x: &[f64], y: &[f64], n: usize, seed: u64, exec: Exec) -> Result<f64, StatsError> {
    kendall_tau(x, y)?;
    if n < 2 {
        return Err(StatsError::TooShort { n, min: 2 });
    }
    let m = x.len();
    let taus = exec.try_map_range(n, |k| {
        let mut rng = rng_from(derive_seed(seed, &[b"bootstrap", &(k as u64).to_le_bytes()]));
        let (mut xs, mut ys) = (vec![0.0; m], vec![0.0; m]);
        for _ in 0..BOOTSTRAP_MAX_REDRAWS {
            for i in 0..m {
                let j = rng.random_range(0..m);
                xs[i] = x[j];
                ys[i] = y[j];
            }
            match kendall_tau(&xs, &ys) {
                Ok(t) => return Ok(t.tau),
                Err(StatsError::Constant) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(StatsError::BootstrapDegenerate { redraws: BOOTSTRAP_MAX_REDRAWS })
    })?;
    let mean = taus.iter().sum::<f64>() / n as f64;
    let var = taus.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(var.sqrt())
}
