//! Finite normal-form games, mixed strategies and the equilibrium checks built
//! on top of them.
//!
//! Payoffs are stored densely. Joint pure profiles are enumerated in row-major
//! order: player 0's action is the most significant digit and the last
//! player's action varies fastest.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Upper bound on the number of joint pure profiles a game may have.
pub const MAX_PROFILES: usize = 10_000_000;

/// Tolerance on the probability mass of a mixed strategy.
pub const PROB_TOL: f64 = 1e-9;

/// Default tolerance for equilibrium checks on small exact games.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

/// A finite game in normal form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalFormGame {
    action_counts: Vec<usize>,
    /// `payoffs[profile_index * num_players + player]`
    payoffs: Vec<f64>,
}

impl NormalFormGame {
    /// Build a game from per-player action counts and a flat payoff vector laid
    /// out as `profile_index * num_players + player`.
    pub fn new(action_counts: Vec<usize>, payoffs: Vec<f64>) -> Result<Self> {
        let profiles = profile_count(&action_counts)?;
        let n = action_counts.len();
        if payoffs.len() != profiles * n {
            return Err(GameError::invalid(format!(
                "payoff tensor has {} entries, expected {} ({} profiles x {} players)",
                payoffs.len(),
                profiles * n,
                profiles,
                n
            )));
        }
        if let Some(pos) = payoffs.iter().position(|p| !p.is_finite()) {
            return Err(GameError::invalid(format!(
                "payoff entry {pos} is not finite"
            )));
        }
        Ok(Self {
            action_counts,
            payoffs,
        })
    }

    /// Build a game by evaluating `payoff` at every joint pure profile.
    pub fn from_fn<F>(action_counts: Vec<usize>, mut payoff: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let profiles = profile_count(&action_counts)?;
        let n = action_counts.len();
        let mut payoffs = Vec::with_capacity(profiles * n);
        for profile in ProfileIter::new(&action_counts) {
            let row = payoff(&profile);
            if row.len() != n {
                return Err(GameError::invalid(format!(
                    "payoff function returned {} values for {} players",
                    row.len(),
                    n
                )));
            }
            payoffs.extend(row);
        }
        Self::new(action_counts, payoffs)
    }

    /// Two-player game from a row-player matrix and a column-player matrix.
    pub fn bimatrix(row: &[Vec<f64>], col: &[Vec<f64>]) -> Result<Self> {
        let rows = row.len();
        let cols = row.first().map_or(0, Vec::len);
        let shape_ok = col.len() == rows
            && row.iter().all(|r| r.len() == cols)
            && col.iter().all(|r| r.len() == cols);
        if !shape_ok {
            return Err(GameError::invalid(
                "bimatrix payoff matrices must be rectangular and share a shape",
            ));
        }
        Self::from_fn(vec![rows, cols], |p| vec![row[p[0]][p[1]], col[p[0]][p[1]]])
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len() / self.num_players()
    }

    /// Flat payoff tensor, `profile_index * num_players + player`.
    pub fn payoff_tensor(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn profile_index(&self, profile: &[usize]) -> Result<usize> {
        if profile.len() != self.num_players() {
            return Err(GameError::invalid(format!(
                "profile has {} actions, game has {} players",
                profile.len(),
                self.num_players()
            )));
        }
        let mut index = 0;
        for (player, (&a, &count)) in profile.iter().zip(&self.action_counts).enumerate() {
            if a >= count {
                return Err(GameError::invalid(format!(
                    "action {a} out of range for player {player} ({count} actions)"
                )));
            }
            index = index * count + a;
        }
        Ok(index)
    }

    /// Payoff vector (one entry per player) at a joint pure profile.
    pub fn payoffs_at(&self, profile: &[usize]) -> Result<&[f64]> {
        let n = self.num_players();
        let idx = self.profile_index(profile)?;
        Ok(&self.payoffs[idx * n..(idx + 1) * n])
    }

    pub fn payoff(&self, profile: &[usize], player: usize) -> Result<f64> {
        self.check_player(player)?;
        Ok(self.payoffs_at(profile)?[player])
    }

    pub fn profiles(&self) -> ProfileIter {
        ProfileIter::new(&self.action_counts)
    }

    pub(crate) fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(GameError::invalid(format!(
                "player {player} out of range ({} players)",
                self.num_players()
            )));
        }
        Ok(())
    }
}

/// Number of joint pure profiles, checked against [`MAX_PROFILES`].
pub fn profile_count(action_counts: &[usize]) -> Result<usize> {
    if action_counts.is_empty() {
        return Err(GameError::invalid("a game needs at least one player"));
    }
    let mut total: usize = 1;
    for (player, &count) in action_counts.iter().enumerate() {
        if count == 0 {
            return Err(GameError::invalid(format!(
                "player {player} has no actions"
            )));
        }
        total = total
            .checked_mul(count)
            .filter(|&t| t <= MAX_PROFILES)
            .ok_or_else(|| {
                GameError::Size(format!(
                    "joint action space exceeds {MAX_PROFILES} profiles"
                ))
            })?;
    }
    Ok(total)
}

/// Odometer over joint pure profiles in row-major order.
#[derive(Debug, Clone)]
pub struct ProfileIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(counts: &[usize]) -> Self {
        let next = if counts.iter().all(|&c| c > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        Self {
            counts: counts.to_vec(),
            next,
        }
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carry = true;
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.counts[i] {
                carry = false;
                break;
            }
            succ[i] = 0;
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(GameError::invalid("mixed strategy has no actions"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(GameError::invalid(
                "mixed strategy probabilities must be finite and non-negative",
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(GameError::invalid(format!(
                "mixed strategy sums to {total}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn pure(num_actions: usize, action: usize) -> Result<Self> {
        if action >= num_actions {
            return Err(GameError::invalid(format!(
                "action {action} out of range ({num_actions} actions)"
            )));
        }
        let mut probs = vec![0.0; num_actions];
        probs[action] = 1.0;
        Ok(Self { probs })
    }

    pub fn uniform(num_actions: usize) -> Result<Self> {
        if num_actions == 0 {
            return Err(GameError::invalid("mixed strategy has no actions"));
        }
        Ok(Self {
            probs: vec![1.0 / num_actions as f64; num_actions],
        })
    }

    /// Normalise a vector of non-negative counts into a strategy.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let total: f64 = counts.iter().sum();
        if total.is_nan() || total <= 0.0 {
            return Err(GameError::invalid("counts must have positive mass"));
        }
        Self::new(counts.iter().map(|c| c / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = GameError;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.probs
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    strategies: Vec<MixedStrategy>,
}

impl StrategyProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self { strategies }
    }

    /// Profile of pure strategies.
    pub fn pure(game: &NormalFormGame, actions: &[usize]) -> Result<Self> {
        game.profile_index(actions)?;
        let strategies = actions
            .iter()
            .zip(game.action_counts())
            .map(|(&a, &n)| MixedStrategy::pure(n, a))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { strategies })
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy {
        &self.strategies[player]
    }

    pub fn validate_for(&self, game: &NormalFormGame) -> Result<()> {
        if self.strategies.len() != game.num_players() {
            return Err(GameError::invalid(format!(
                "profile has {} strategies, game has {} players",
                self.strategies.len(),
                game.num_players()
            )));
        }
        for (player, (s, &n)) in self.strategies.iter().zip(game.action_counts()).enumerate() {
            if s.len() != n {
                return Err(GameError::invalid(format!(
                    "strategy for player {player} has {} entries, player has {n} actions",
                    s.len()
                )));
            }
        }
        Ok(())
    }
}

fn profile_weight(profile: &StrategyProfile, actions: &[usize], skip: Option<usize>) -> f64 {
    actions
        .iter()
        .enumerate()
        .filter(|(p, _)| Some(*p) != skip)
        .map(|(p, &a)| profile.strategies[p].probs[a])
        .product()
}

/// Exact expected payoff of `player` under a mixed profile.
pub fn expected_utility(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<f64> {
    profile.validate_for(game)?;
    game.check_player(player)?;
    let n = game.num_players();
    let mut total = 0.0;
    for (idx, actions) in game.profiles().enumerate() {
        let w = profile_weight(profile, &actions, None);
        if w != 0.0 {
            total += w * game.payoffs[idx * n + player];
        }
    }
    Ok(total)
}

/// Expected payoff of each pure action of `player` against the opponents'
/// mixed strategies in `profile`. The player's own entry is ignored.
pub fn action_values(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<Vec<f64>> {
    profile.validate_for(game)?;
    game.check_player(player)?;
    let n = game.num_players();
    let mut values = vec![0.0; game.action_counts[player]];
    for (idx, actions) in game.profiles().enumerate() {
        let w = profile_weight(profile, &actions, Some(player));
        if w != 0.0 {
            values[actions[player]] += w * game.payoffs[idx * n + player];
        }
    }
    Ok(values)
}

/// Index of the maximum entry; ties go to the lowest index.
pub fn argmax_lowest(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Pure best response of `player` to the other players' mixed strategies.
pub fn best_response(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    player: usize,
) -> Result<(usize, f64)> {
    let values = action_values(game, profile, player)?;
    let best = argmax_lowest(&values).expect("players have at least one action");
    Ok((best, values[best]))
}

/// For each player, best-response value minus current expected utility.
pub fn deviation_gains(game: &NormalFormGame, profile: &StrategyProfile) -> Result<Vec<f64>> {
    (0..game.num_players())
        .map(|player| {
            let (_, br) = best_response(game, profile, player)?;
            Ok(br - expected_utility(game, profile, player)?)
        })
        .collect()
}

/// True when no player can gain more than `epsilon` by a unilateral deviation.
pub fn is_epsilon_nash(
    game: &NormalFormGame,
    profile: &StrategyProfile,
    epsilon: f64,
) -> Result<bool> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(GameError::invalid(format!(
            "epsilon must be non-negative, got {epsilon}"
        )));
    }
    profile.validate_for(game)?;
    for player in 0..game.num_players() {
        let (_, br) = best_response(game, profile, player)?;
        if br > expected_utility(game, profile, player)? + epsilon {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All pure-strategy ε-Nash equilibria, in profile order.
pub fn pure_nash_equilibria(game: &NormalFormGame, epsilon: f64) -> Result<Vec<Vec<usize>>> {
    let mut found = Vec::new();
    for actions in game.profiles() {
        let profile = StrategyProfile::pure(game, &actions)?;
        if is_epsilon_nash(game, &profile, epsilon)? {
            found.push(actions);
        }
    }
    Ok(found)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Prisoner's dilemma with T=5, R=3, P=1, S=0; action 0 = Cooperate.
    pub fn prisoners_dilemma() -> NormalFormGame {
        NormalFormGame::bimatrix(
            &[vec![3.0, 0.0], vec![5.0, 1.0]],
            &[vec![3.0, 5.0], vec![0.0, 1.0]],
        )
        .unwrap()
    }

    pub fn matching_pennies() -> NormalFormGame {
        NormalFormGame::bimatrix(
            &[vec![1.0, -1.0], vec![-1.0, 1.0]],
            &[vec![-1.0, 1.0], vec![1.0, -1.0]],
        )
        .unwrap()
    }
}
