use ndarray::Array2;

use crate::error::{Error, Result};
use crate::nn::{AdamConfig, Graph, Var};

use super::config::PPOConfig;
use super::policy::PolicyModel;
use super::rollout::RolloutRecord;

/// A rollout with its advantage estimates and value targets attached,
/// ready for optimization.
#[derive(Debug, Clone)]
pub struct ProcessedRollout {
    pub record: RolloutRecord,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

/// Diagnostics of one optimizer update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PPOStepStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    /// Fraction of tokens whose probability ratio left the trust band.
    pub clip_fraction: f64,
    /// Mean of `old_logp - new_logp` over tokens.
    pub approx_kl: f64,
}

/// Cap on `|new_logp - old_logp|` before exponentiation. Ratios beyond
/// e^20 are deep inside the clip region already; the cap keeps extreme
/// off-policy tokens from overflowing or blowing up the gradient.
const LOG_RATIO_BOUND: f64 = 20.0;

/// Per-token clipped surrogate: the pessimistic minimum of the raw and
/// ratio-clipped policy objectives.
pub fn clipped_objective(ratio: f64, advantage: f64, eps: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - eps, 1.0 + eps) * advantage;
    (ratio * advantage).min(clipped)
}

/// Per-token value error with the update clipped to stay within `eps`
/// of the rollout-time estimate; the worse of the two errors counts.
pub fn clipped_value_error(v_new: f64, v_old: f64, ret: f64, eps: f64) -> f64 {
    let v_clip = v_old + (v_new - v_old).clamp(-eps, eps);
    (v_new - ret).powi(2).max((v_clip - ret).powi(2))
}

/// One gradient update on a mini-batch of processed rollouts: maximizes
/// the clipped surrogate, regresses values onto returns with clipping,
/// and applies Adam at the given learning rate. Statistics reflect the
/// state before the parameter update.
pub fn ppo_step(
    policy: &mut PolicyModel,
    minibatch: &[ProcessedRollout],
    cfg: &PPOConfig,
    lr: f64,
) -> Result<PPOStepStats> {
    if minibatch.is_empty() {
        return Err(Error::Config("ppo minibatch is empty".into()));
    }
    let eps = cfg.clip_epsilon;
    let mut g = Graph::new();
    let mut surrogate_sum: Option<Var> = None;
    let mut value_sum: Option<Var> = None;
    let mut n_tokens = 0usize;
    let mut n_clipped = 0usize;
    let mut kl_sum = 0.0;

    for rollout in minibatch {
        rollout.record.validate()?;
        let n = rollout.record.len();
        if rollout.advantages.len() != n || rollout.returns.len() != n {
            return Err(Error::Dimension(format!(
                "rollout has {n} tokens but {} advantages and {} returns",
                rollout.advantages.len(),
                rollout.returns.len()
            )));
        }
        let src_ids = policy.model.source_ids(&rollout.record.prompt);
        let (logp_new, v_new) =
            policy.response_forward(&mut g, &src_ids, &rollout.record.response_ids)?;

        let old = g.constant(col(&rollout.record.policy_logp));
        let diff = g.sub(logp_new, old);
        let diff = g.clamp(diff, -LOG_RATIO_BOUND, LOG_RATIO_BOUND);
        let ratio = g.exp(diff);
        for (t, r) in g.value(ratio).column(0).iter().enumerate() {
            if (r - 1.0).abs() > eps {
                n_clipped += 1;
            }
            kl_sum += rollout.record.policy_logp[t] - g.value(logp_new)[(t, 0)];
        }
        let adv = g.constant(col(&rollout.advantages));
        let unclipped = g.mul_elem(ratio, adv);
        let banded = g.clamp(ratio, 1.0 - eps, 1.0 + eps);
        let clipped = g.mul_elem(banded, adv);
        let pessimistic = g.min_elem(unclipped, clipped);
        let s = g.sum_all(pessimistic);
        surrogate_sum = Some(match surrogate_sum {
            Some(acc) => g.add(acc, s),
            None => s,
        });

        let v_old = g.constant(col(&rollout.record.values));
        let ret = g.constant(col(&rollout.returns));
        let dv = g.sub(v_new, v_old);
        let dv_clipped = g.clamp(dv, -eps, eps);
        let v_clip = g.add(v_old, dv_clipped);
        let e_raw = g.sub(v_new, ret);
        let e_raw = g.mul_elem(e_raw, e_raw);
        let e_clip = g.sub(v_clip, ret);
        let e_clip = g.mul_elem(e_clip, e_clip);
        let worse = g.max_elem(e_raw, e_clip);
        let vs = g.sum_all(worse);
        value_sum = Some(match value_sum {
            Some(acc) => g.add(acc, vs),
            None => vs,
        });
        n_tokens += n;
    }

    let inv_n = 1.0 / n_tokens as f64;
    let policy_loss = g.scale(surrogate_sum.expect("minibatch not empty"), -inv_n);
    let value_loss = g.scale(value_sum.expect("minibatch not empty"), inv_n);
    let weighted_value = g.scale(value_loss, cfg.vf_coef);
    let total = g.add(policy_loss, weighted_value);

    let stats = PPOStepStats {
        policy_loss: g.scalar(policy_loss),
        value_loss: g.scalar(value_loss),
        clip_fraction: n_clipped as f64 / n_tokens as f64,
        approx_kl: kl_sum / n_tokens as f64,
    };
    if !stats.policy_loss.is_finite() || !stats.value_loss.is_finite() {
        return Err(Error::NonFinite {
            component: "ppo step".into(),
        });
    }

    let grads = g.backward(total);
    policy.model.store.adam_step(
        &grads,
        &AdamConfig {
            lr,
            max_grad_norm: Some(cfg.max_grad_norm),
            ..Default::default()
        },
    );
    Ok(stats)
}

fn col(xs: &[f64]) -> Array2<f64> {
    Array2::from_shape_vec((xs.len(), 1), xs.to_vec()).expect("column shape")
}
