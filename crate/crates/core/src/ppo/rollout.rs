use crate::error::{Error, Result};
use crate::scoring::RewardBreakdown;

use super::kl::per_token_kl;

/// One sampled prompt/response pair with everything the optimizer needs:
/// the response token ids, per-token log-probabilities under the policy
/// that sampled it and under the frozen reference, per-token value
/// estimates, and the terminal composite reward with its parts.
#[derive(Debug, Clone)]
pub struct RolloutRecord {
    pub prompt: Vec<String>,
    pub response_ids: Vec<usize>,
    pub policy_logp: Vec<f64>,
    pub ref_logp: Vec<f64>,
    pub values: Vec<f64>,
    pub reward: RewardBreakdown,
}

impl RolloutRecord {
    /// All per-token vectors must cover each response token exactly once.
    pub fn validate(&self) -> Result<()> {
        let n = self.response_ids.len();
        if n == 0 {
            return Err(Error::Dimension("rollout has an empty response".into()));
        }
        for (name, len) in [
            ("policy_logp", self.policy_logp.len()),
            ("ref_logp", self.ref_logp.len()),
            ("values", self.values.len()),
        ] {
            if len != n {
                return Err(Error::Dimension(format!(
                    "rollout field {name} has {len} entries for {n} response tokens"
                )));
            }
        }
        let finite = self
            .policy_logp
            .iter()
            .chain(&self.ref_logp)
            .chain(&self.values)
            .all(|x| x.is_finite());
        if !finite || !self.reward.composite.is_finite() {
            return Err(Error::NonFinite {
                component: "rollout".into(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.response_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.response_ids.is_empty()
    }
}

/// Dense per-token rewards from a sparse terminal reward: each token is
/// penalized by the weighted KL to the reference at that position, and
/// the terminal reward lands on the final token.
pub fn shape_rewards(kl: &[f64], terminal: f64, kl_coef: f64) -> Vec<f64> {
    let mut rewards: Vec<f64> = kl.iter().map(|k| -kl_coef * k).collect();
    if let Some(last) = rewards.last_mut() {
        *last += terminal;
    }
    rewards
}

/// Shaped rewards for a rollout using its recorded composite reward.
pub fn shaped_token_rewards(record: &RolloutRecord, kl_coef: f64) -> Result<Vec<f64>> {
    record.validate()?;
    let kl = per_token_kl(&record.policy_logp, &record.ref_logp)?;
    Ok(shape_rewards(&kl, record.reward.composite, kl_coef))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(policy: Vec<f64>, reference: Vec<f64>, composite: f64) -> RolloutRecord {
        let n = policy.len();
        RolloutRecord {
            prompt: vec!["we".to_string()],
            response_ids: vec![5; n],
            policy_logp: policy,
            ref_logp: reference,
            values: vec![0.0; n],
            reward: RewardBreakdown {
                r1: composite,
                r2: 0.0,
                r3: 0.0,
                composite,
            },
        }
    }

    #[test]
    fn kl_penalty_with_terminal_bonus_by_hand() {
        let r = record(vec![-1.0, -2.0], vec![-1.5, -2.5], 1.0);
        let shaped = shaped_token_rewards(&r, 0.2).unwrap();
        assert!((shaped[0] - -0.1).abs() < 1e-12);
        assert!((shaped[1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn shaped_rewards_sum_telescopes() {
        let r = record(
            vec![-0.1, -0.7, -2.2, -0.4],
            vec![-0.3, -0.5, -2.0, -1.1],
            0.85,
        );
        let coef = 0.37;
        let shaped = shaped_token_rewards(&r, coef).unwrap();
        let kl_sum: f64 = per_token_kl(&r.policy_logp, &r.ref_logp)
            .unwrap()
            .iter()
            .sum();
        let total: f64 = shaped.iter().sum();
        assert!((total - (r.reward.composite - coef * kl_sum)).abs() < 1e-12);
    }

    #[test]
    fn zero_coef_leaves_only_terminal_reward() {
        let r = record(vec![-1.0, -2.0, -3.0], vec![-2.0, -1.0, -4.0], 0.5);
        let shaped = shaped_token_rewards(&r, 0.0).unwrap();
        assert_eq!(shaped, vec![0.0, 0.0, 0.5]);
    }

    #[test]
    fn validation_catches_length_mismatch() {
        let mut r = record(vec![-1.0, -2.0], vec![-1.5, -2.5], 1.0);
        r.values = vec![0.0];
        let err = r.validate().unwrap_err();
        assert!(err.to_string().contains("values"));
        assert!(shaped_token_rewards(&r, 0.1).is_err());
    }

    #[test]
    fn validation_catches_empty_and_non_finite() {
        let mut empty = record(vec![], vec![], 1.0);
        empty.response_ids.clear();
        assert!(empty.validate().is_err());
        let mut bad = record(vec![-1.0], vec![-1.0], 1.0);
        bad.reward.composite = f64::NAN;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_token_response_gets_full_terminal() {
        let r = record(vec![-0.5], vec![-0.5], 0.8);
        let shaped = shaped_token_rewards(&r, 0.3).unwrap();
        assert_eq!(shaped.len(), 1);
        assert!((shaped[0] - 0.8).abs() < 1e-12);
    }
}
