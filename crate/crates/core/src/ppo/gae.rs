use crate::error::{Error, Result};

/// Generalized advantage estimation over one response. The value after
/// the final token is taken as zero, so
/// `delta_t = r_t + gamma * v_{t+1} - v_t` and advantages accumulate
/// backwards as `A_t = delta_t + gamma * lambda * A_{t+1}`. Returns the
/// advantages together with the value targets `A_t + v_t`.
pub fn gae_advantages(
    rewards: &[f64],
    values: &[f64],
    gamma: f64,
    lambda: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if rewards.len() != values.len() {
        return Err(Error::Dimension(format!(
            "rewards ({}) and values ({}) must have equal length",
            rewards.len(),
            values.len()
        )));
    }
    let n = rewards.len();
    let mut advantages = vec![0.0; n];
    let mut carry = 0.0;
    for t in (0..n).rev() {
        let next_value = if t + 1 < n { values[t + 1] } else { 0.0 };
        let delta = rewards[t] + gamma * next_value - values[t];
        carry = delta + gamma * lambda * carry;
        advantages[t] = carry;
    }
    let returns = advantages
        .iter()
        .zip(values)
        .map(|(a, v)| a + v)
        .collect();
    Ok((advantages, returns))
}

/// Shift to zero mean and scale to unit variance. Inputs with fewer
/// than two elements or zero variance are only centered, since a scale
/// is not defined for them.
pub fn whiten(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return xs.iter().map(|x| x - mean).collect();
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var <= 0.0 {
        return xs.iter().map(|x| x - mean).collect();
    }
    let std = var.sqrt();
    xs.iter().map(|x| (x - mean) / std).collect()
}
