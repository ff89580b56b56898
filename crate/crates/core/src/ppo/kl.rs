use crate::error::{Error, Result};

/// Per-token KL estimate between the current policy and the frozen
/// reference: the difference of their log-probabilities at each
/// sampled token. Summing the result gives the sequence-level KL used
/// by the adaptive controller.
pub fn per_token_kl(policy_logp: &[f64], ref_logp: &[f64]) -> Result<Vec<f64>> {
    if policy_logp.len() != ref_logp.len() {
        return Err(Error::Dimension(format!(
            "log-probability lengths differ: policy {} vs reference {}",
            policy_logp.len(),
            ref_logp.len()
        )));
    }
    Ok(policy_logp
        .iter()
        .zip(ref_logp)
        .map(|(p, r)| p - r)
        .collect())
}

/// Proportional controller for the KL penalty weight. The relative
/// error against the target is clipped to +/-20% and the coefficient
/// scaled by `1 + error * n_samples / horizon`, so larger horizons
/// adapt more slowly.
pub fn adaptive_kl_update(
    coef: f64,
    observed_kl: f64,
    target_kl: f64,
    n_samples: usize,
    horizon: usize,
) -> f64 {
    let error = ((observed_kl - target_kl) / target_kl).clamp(-0.2, 0.2);
    coef * (1.0 + error * n_samples as f64 / horizon as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_token_kl_is_logprob_difference() {
        let kl = per_token_kl(&[-1.0, -2.0], &[-1.5, -2.5]).unwrap();
        assert_eq!(kl, vec![0.5, 0.5]);
    }

    #[test]
    fn per_token_kl_rejects_length_mismatch() {
        let err = per_token_kl(&[-1.0], &[-1.0, -2.0]).unwrap_err();
        assert!(err.to_string().contains("lengths differ"));
    }

    #[test]
    fn identical_policies_give_zero_kl() {
        let logp = [-0.3, -1.7, -0.01];
        let kl = per_token_kl(&logp, &logp).unwrap();
        assert!(kl.iter().all(|&k| k == 0.0));
    }

    #[test]
    fn adaptive_update_raises_coef_when_kl_exceeds_target() {
        let next = adaptive_kl_update(0.1, 12.0, 6.0, 8, 8);
        assert!((next - 0.12).abs() < 1e-12);
    }

    #[test]
    fn adaptive_update_lowers_coef_when_kl_below_target() {
        let next = adaptive_kl_update(0.1, 0.0, 6.0, 8, 8);
        assert!((next - 0.08).abs() < 1e-12);
    }

    #[test]
    fn error_is_clipped_to_twenty_percent() {
        let explode = adaptive_kl_update(1.0, 600.0, 6.0, 10, 10);
        assert!((explode - 1.2).abs() < 1e-12);
        let collapse = adaptive_kl_update(1.0, 1e-9, 6.0, 10, 10);
        assert!((collapse - 0.8).abs() < 1e-12);
    }

    #[test]
    fn horizon_scales_step_size() {
        let slow = adaptive_kl_update(0.1, 12.0, 6.0, 8, 800);
        assert!((slow - 0.1002).abs() < 1e-12);
    }

    #[test]
    fn on_target_leaves_coef_unchanged() {
        let same = adaptive_kl_update(0.37, 6.0, 6.0, 8, 64);
        assert!((same - 0.37).abs() < 1e-15);
    }
}
