//! Independent tabular Q-learning for several agents sharing one discrete
//! state, plus environments it can be trained on.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{
    observe_user, BeliefState, ModerationAction, ModerationPayoffs, ModerationScenario, UserType,
};
use crate::error::{GameError, Result};
use crate::game::{argmax_lowest, NormalFormGame};

/// Outcome of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub next_state: usize,
    pub payoffs: Vec<f64>,
    pub terminal: bool,
}

/// Discrete environment with a global state observed by every agent.
pub trait TabularEnvironment {
    fn n_agents(&self) -> usize;
    fn state_count(&self) -> usize;
    fn action_count(&self, agent: usize) -> usize;
    fn reset(&mut self, rng: &mut dyn RngCore) -> Result<usize>;
    fn step(
        &mut self,
        state: usize,
        actions: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<Transition>;
}

/// State-action values of one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    states: usize,
    actions: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn zeros(states: usize, actions: usize) -> Result<Self> {
        if states == 0 || actions == 0 {
            return Err(GameError::invalid(
                "q-table needs at least one state and one action",
            ));
        }
        let len = states
            .checked_mul(actions)
            .filter(|&l| l <= crate::game::MAX_PROFILES)
            .ok_or_else(|| GameError::Size("q-table too large".into()))?;
        Ok(Self {
            states,
            actions,
            values: vec![0.0; len],
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> usize {
        self.actions
    }

    fn check(&self, state: usize, action: usize) -> Result<()> {
        if state >= self.states || action >= self.actions {
            return Err(GameError::invalid(format!(
                "(state {state}, action {action}) outside a {}x{} q-table",
                self.states, self.actions
            )));
        }
        Ok(())
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.actions + action]
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.values[state * self.actions..(state + 1) * self.actions]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn greedy_action(&self, state: usize) -> usize {
        argmax_lowest(self.row(state)).expect("non-empty row")
    }
}

/// Training hyper-parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LearningConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon_start: f64,
    /// Multiplicative decay applied once per episode.
    pub epsilon_decay: f64,
    pub epsilon_min: f64,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            episodes: 10_000,
            learning_rate: 0.1,
            discount: 0.95,
            epsilon_start: 1.0,
            epsilon_decay: 0.999,
            epsilon_min: 0.05,
            max_steps: 100,
            seed: 0,
        }
    }
}

impl LearningConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GameError::invalid(m.to_string()));
        if self.episodes == 0 {
            return bad("episodes must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must lie in (0, 1]");
        }
        if !(0.0..1.0).contains(&self.discount) {
            return bad("discount must lie in [0, 1)");
        }
        for (name, v) in [
            ("epsilon_start", self.epsilon_start),
            ("epsilon_decay", self.epsilon_decay),
            ("epsilon_min", self.epsilon_min),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(GameError::invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        Ok(())
    }

    /// Exploration rate used during episode `episode` (0-based).
    pub fn epsilon_at(&self, episode: usize) -> f64 {
        let e = self.epsilon_start
            * self
                .epsilon_decay
                .powi(episode.min(i32::MAX as usize) as i32);
        e.max(self.epsilon_min)
    }
}

/// Temporal-difference update of a single entry. Returns the new value.
pub fn q_update(
    q: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    terminal: bool,
    config: &LearningConfig,
) -> Result<f64> {
    q.check(state, action)?;
    if next_state >= q.states {
        return Err(GameError::invalid(format!(
            "next state {next_state} outside {} states",
            q.states
        )));
    }
    let bootstrap = if terminal {
        0.0
    } else {
        q.row(next_state)
            .iter()
            .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    };
    let target = reward + config.discount * bootstrap;
    let idx = state * q.actions + action;
    let old = q.values[idx];
    q.values[idx] = old + config.learning_rate * (target - old);
    Ok(q.values[idx])
}

/// ε-greedy choice; greedy ties go to the lowest index.
pub fn select_action<R: Rng + ?Sized>(q_row: &[f64], epsilon: f64, rng: &mut R) -> Result<usize> {
    if q_row.is_empty() {
        return Err(GameError::invalid("cannot select from an empty q-row"));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(GameError::invalid(format!(
            "epsilon must lie in [0, 1], got {epsilon}"
        )));
    }
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        return Ok(rng.random_range(0..q_row.len()));
    }
    Ok(argmax_lowest(q_row).expect("non-empty"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeRecord {
    /// 1-based episode index.
    pub episode: usize,
    /// Payoffs summed over agents and steps.
    pub reward_sum: f64,
    pub epsilon: f64,
    pub steps: usize,
    /// Hit `max_steps` without reaching a terminal state.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub tables: Vec<QTable>,
    pub curve: Vec<EpisodeRecord>,
}

impl TrainingOutcome {
    pub fn truncated_episodes(&self) -> usize {
        self.curve.iter().filter(|r| r.truncated).count()
    }
}

fn check_transition<E: TabularEnvironment + ?Sized>(env: &E, t: &Transition) -> Result<()> {
    if t.next_state >= env.state_count() {
        return Err(GameError::invalid(format!(
            "environment returned state {} of {}",
            t.next_state,
            env.state_count()
        )));
    }
    if t.payoffs.len() != env.n_agents() || t.payoffs.iter().any(|p| !p.is_finite()) {
        return Err(GameError::invalid(
            "environment must return one finite payoff per agent",
        ));
    }
    Ok(())
}

/// Train one Q-table per agent. Deterministic for a fixed `config.seed`.
pub fn train<E: TabularEnvironment + ?Sized>(
    env: &mut E,
    config: &LearningConfig,
) -> Result<TrainingOutcome> {
    config.validate()?;
    let n = env.n_agents();
    if n == 0 {
        return Err(GameError::invalid("environment has no agents"));
    }
    let mut tables = (0..n)
        .map(|i| QTable::zeros(env.state_count(), env.action_count(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut curve = Vec::with_capacity(config.episodes);
    let mut actions = vec![0; n];

    for episode in 0..config.episodes {
        let epsilon = config.epsilon_at(episode);
        let mut state = env.reset(&mut rng)?;
        if state >= env.state_count() {
            return Err(GameError::invalid(format!("reset returned state {state}")));
        }
        let mut reward_sum = 0.0;
        let mut steps = 0;
        let mut terminal = false;
        while steps < config.max_steps {
            for (i, a) in actions.iter_mut().enumerate() {
                *a = select_action(tables[i].row(state), epsilon, &mut rng)?;
            }
            let t = env.step(state, &actions, &mut rng)?;
            check_transition(env, &t)?;
            for (i, table) in tables.iter_mut().enumerate() {
                q_update(
                    table,
                    state,
                    actions[i],
                    t.payoffs[i],
                    t.next_state,
                    t.terminal,
                    config,
                )?;
            }
            reward_sum += t.payoffs.iter().sum::<f64>();
            steps += 1;
            state = t.next_state;
            if t.terminal {
                terminal = true;
                break;
            }
        }
        curve.push(EpisodeRecord {
            episode: episode + 1,
            reward_sum,
            epsilon,
            steps,
            truncated: !terminal,
        });
    }
    Ok(TrainingOutcome { tables, curve })
}

/// Deterministic single-agent environment given by explicit tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEnvironment {
    pub start: usize,
    /// `transitions[state][action] = (next_state, reward, terminal)`
    pub transitions: Vec<Vec<(usize, f64, bool)>>,
}

impl TableEnvironment {
    pub fn new(start: usize, transitions: Vec<Vec<(usize, f64, bool)>>) -> Result<Self> {
        let states = transitions.len();
        let actions = transitions.first().map_or(0, Vec::len);
        if states == 0 || actions == 0 || transitions.iter().any(|r| r.len() != actions) {
            return Err(GameError::invalid(
                "transition table must be non-empty with the same actions in every state",
            ));
        }
        if start >= states {
            return Err(GameError::invalid("start state out of range"));
        }
        for row in &transitions {
            for &(next, r, _) in row {
                if next >= states || !r.is_finite() {
                    return Err(GameError::invalid("transition target or reward invalid"));
                }
            }
        }
        Ok(Self { start, transitions })
    }
}

impl TabularEnvironment for TableEnvironment {
    fn n_agents(&self) -> usize {
        1
    }

    fn state_count(&self) -> usize {
        self.transitions.len()
    }

    fn action_count(&self, _agent: usize) -> usize {
        self.transitions[0].len()
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Result<usize> {
        Ok(self.start)
    }

    fn step(
        &mut self,
        state: usize,
        actions: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<Transition> {
        let &(next_state, reward, terminal) = self
            .transitions
            .get(state)
            .and_then(|r| r.get(actions[0]))
            .ok_or_else(|| GameError::invalid("state or action out of range"))?;
        Ok(Transition {
            next_state,
            payoffs: vec![reward],
            terminal,
        })
    }
}

/// A normal-form game played repeatedly for `horizon` rounds per episode.
/// There is a single state.
#[derive(Debug, Clone)]
pub struct MatrixGameEnv {
    game: NormalFormGame,
    horizon: usize,
    played: usize,
}

impl MatrixGameEnv {
    pub fn new(game: NormalFormGame, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(GameError::invalid("horizon must be at least 1"));
        }
        Ok(Self {
            game,
            horizon,
            played: 0,
        })
    }
}

impl TabularEnvironment for MatrixGameEnv {
    fn n_agents(&self) -> usize {
        self.game.num_players()
    }

    fn state_count(&self) -> usize {
        1
    }

    fn action_count(&self, agent: usize) -> usize {
        self.game.action_counts()[agent]
    }

    fn reset(&mut self, _rng: &mut dyn RngCore) -> Result<usize> {
        self.played = 0;
        Ok(0)
    }

    fn step(
        &mut self,
        _state: usize,
        actions: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<Transition> {
        let payoffs = self.game.payoffs_at(actions)?.to_vec();
        self.played += 1;
        Ok(Transition {
            next_state: 0,
            payoffs,
            terminal: self.played >= self.horizon,
        })
    }
}

/// The moderation game seen by a learning moderator.
///
/// Each episode is one user: on reset a user is drawn, its signals are folded
/// into the prior, and the state is the posterior's bucket. The single step
/// pays the moderator according to the (label-adjusted) payoff table.
#[derive(Debug, Clone)]
pub struct ModerationEnv {
    scenario: ModerationScenario,
    table: ModerationPayoffs,
    prior: BeliefState,
    buckets: usize,
    current: Option<UserType>,
}

impl ModerationEnv {
    pub fn new(scenario: ModerationScenario, belief_buckets: usize) -> Result<Self> {
        scenario.validate()?;
        if belief_buckets < 2 {
            return Err(GameError::Config(
                "belief_buckets must be at least 2".into(),
            ));
        }
        let prior = BeliefState::new(scenario.prior_beta)?;
        Ok(Self {
            table: scenario.effective_payoffs(),
            scenario,
            prior,
            buckets: belief_buckets,
            current: None,
        })
    }

    /// Equal-width bucket of a belief.
    pub fn bucket(&self, beta: f64) -> usize {
        ((beta * self.buckets as f64) as usize).min(self.buckets - 1)
    }

    pub fn buckets(&self) -> usize {
        self.buckets
    }
}

impl TabularEnvironment for ModerationEnv {
    fn n_agents(&self) -> usize {
        1
    }

    fn state_count(&self) -> usize {
        self.buckets
    }

    fn action_count(&self, _agent: usize) -> usize {
        ModerationAction::ALL.len()
    }

    fn reset(&mut self, rng: &mut dyn RngCore) -> Result<usize> {
        let (user, _, post) = observe_user(
            rng,
            self.scenario.arrival_p,
            self.prior,
            &self.scenario.signal_model,
            self.scenario.signals_per_user,
        )?;
        self.current = Some(user);
        Ok(self.bucket(post.value()))
    }

    fn step(
        &mut self,
        state: usize,
        actions: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<Transition> {
        let user = self
            .current
            .take()
            .ok_or_else(|| GameError::invalid("step called before reset"))?;
        let action = ModerationAction::from_index(actions[0]).ok_or_else(|| {
            GameError::invalid(format!("unknown moderation action {}", actions[0]))
        })?;
        Ok(Transition {
            next_state: state,
            payoffs: vec![self.table.moderator_payoff(user, action)],
            terminal: true,
        })
    }
}
