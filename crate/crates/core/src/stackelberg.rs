//! Leader commitment in two-player games.
//!
//! The leader (player 0) commits to a mixed strategy taken from a regular grid
//! on the probability simplex; the follower (player 1) observes it and plays a
//! pure best response, breaking ties in the leader's favour.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{MixedStrategy, NormalFormGame};

/// Hard cap on the number of simplex grid points visited.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Follower best-response ties are resolved within this tolerance.
const FOLLOWER_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackelbergSolution {
    pub leader_strategy: MixedStrategy,
    pub follower_action: usize,
    pub leader_value: f64,
    pub follower_value: f64,
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Visit every composition of `total` into `parts` non-negative parts, in
/// lexicographic order.
fn for_each_composition(total: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    let mut current = vec![0; parts];
    fn rec(idx: usize, remaining: usize, current: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if idx + 1 == current.len() {
            current[idx] = remaining;
            f(current);
            return;
        }
        for take in (0..=remaining).rev() {
            current[idx] = take;
            rec(idx + 1, remaining - take, current, f);
        }
    }
    rec(0, total, &mut current, &mut f);
}

/// Strong Stackelberg commitment over a simplex grid with spacing at most
/// `grid_resolution`.
pub fn solve_stackelberg(
    game: &NormalFormGame,
    grid_resolution: f64,
) -> Result<StackelbergSolution> {
    if game.num_players() != 2 {
        return Err(GameError::invalid(format!(
            "stackelberg commitment needs exactly 2 players, got {}",
            game.num_players()
        )));
    }
    if !(grid_resolution > 0.0 && grid_resolution <= 0.5) {
        return Err(GameError::invalid(format!(
            "grid resolution must lie in (0, 0.5], got {grid_resolution}"
        )));
    }
    let leader_n = game.action_counts()[0];
    let follower_n = game.action_counts()[1];
    let steps = (1.0 / grid_resolution - 1e-9).ceil() as usize;
    let points = binomial(steps + leader_n - 1, leader_n - 1)
        .filter(|&p| p <= MAX_GRID_POINTS)
        .ok_or_else(|| {
            GameError::Size(format!(
                "simplex grid at resolution {grid_resolution} exceeds {MAX_GRID_POINTS} points"
            ))
        })?;
    debug_assert!(points > 0);

    // payoffs[(l * follower_n + f) * 2 + player]
    let tensor = game.payoff_tensor();
    let mut leader_vals = vec![0.0; follower_n];
    let mut follower_vals = vec![0.0; follower_n];
    let mut best: Option<(Vec<usize>, usize, f64, f64)> = None;

    for_each_composition(steps, leader_n, |comp| {
        leader_vals.iter_mut().for_each(|v| *v = 0.0);
        follower_vals.iter_mut().for_each(|v| *v = 0.0);
        for (l, &k) in comp.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let p = k as f64 / steps as f64;
            for f in 0..follower_n {
                let base = (l * follower_n + f) * 2;
                leader_vals[f] += p * tensor[base];
                follower_vals[f] += p * tensor[base + 1];
            }
        }
        let top = follower_vals
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let mut choice: Option<usize> = None;
        for f in 0..follower_n {
            if follower_vals[f] >= top - FOLLOWER_TIE_TOL
                && choice.is_none_or(|c| leader_vals[f] > leader_vals[c])
            {
                choice = Some(f);
            }
        }
        let f = choice.expect("follower has at least one action");
        if best
            .as_ref()
            .is_none_or(|(_, _, lv, _)| leader_vals[f] > *lv)
        {
            best = Some((comp.to_vec(), f, leader_vals[f], follower_vals[f]));
        }
    });

    let (comp, follower_action, leader_value, follower_value) =
        best.ok_or(GameError::InfeasibleResolution(grid_resolution))?;
    let probs = comp.iter().map(|&k| k as f64 / steps as f64).collect();
    Ok(StackelbergSolution {
        leader_strategy: MixedStrategy::new(probs)?,
        follower_action,
        leader_value,
        follower_value,
    })
}
