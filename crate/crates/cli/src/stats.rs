//! Summary statistics over trajectories and seed batches.

use lieobs::dynamics::Trajectory;
use lieobs::invariant::{decay_rate_fit_windowed, DECAY_FIT_FLOOR};

/// Time average of `‖X̂ − X‖` over records with `t ≥ t_end / 2`.
///
/// Uses the trapezoid rule on the output grid; `None` if the run ended
/// before reaching the window.
pub fn late_mean_error(traj: &Trajectory, t_end: f64) -> Option<f64> {
    let start = 0.5 * t_end;
    let window: Vec<(f64, f64)> = traj
        .records
        .iter()
        .filter(|r| r.t >= start - 1e-12)
        .map(|r| (r.t, r.norms.state))
        .collect();
    match window.as_slice() {
        [] => None,
        [(_, v)] => Some(*v),
        [first, .., last] => {
            let area: f64 = window
                .windows(2)
                .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
                .sum();
            Some(area / (last.0 - first.0))
        }
    }
}

/// Decay rate of `‖X̂ − X‖` over the samples before it first reaches the fit floor.
pub fn fitted_rate(traj: &Trajectory) -> Option<f64> {
    let samples: Vec<(f64, f64)> = traj
        .records
        .iter()
        .map(|r| (r.t, r.norms.state))
        .take_while(|&(_, v)| v > DECAY_FIT_FLOOR)
        .collect();
    decay_rate_fit_windowed(&samples).ok().map(|f| f.rate)
}

/// Sample mean and standard deviation (`n − 1` denominator; zero for one sample).
pub fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Some((mean, var.sqrt()))
}

/// Welch's t statistic for the difference of means `a − b`.
pub fn welch_t(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let (ma, sa) = mean_std(a)?;
    let (mb, sb) = mean_std(b)?;
    let se = (sa * sa / a.len() as f64 + sb * sb / b.len() as f64).sqrt();
    (se > 0.0).then(|| (ma - mb) / se)
}
