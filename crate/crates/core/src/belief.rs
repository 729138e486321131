//! Repeated Bayesian moderation.
//!
//! A moderator faces a stream of users, each either legitimate or
//! adversarial. For every arriving user it starts from a prior belief that the
//! user is adversarial, folds a few noisy "suspicious label" signals through
//! Bayes' rule, and then refuses, filters or allows according to the belief
//! weighted payoff table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::lang::{LabelOffsetTable, LabelSpace};

/// Beliefs are kept inside `[BELIEF_FLOOR, 1 - BELIEF_FLOOR]`.
pub const BELIEF_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserType {
    Legitimate,
    Adversarial,
}

impl UserType {
    pub const ALL: [UserType; 2] = [UserType::Legitimate, UserType::Adversarial];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserType::Legitimate => "legitimate",
            UserType::Adversarial => "adversarial",
        }
    }
}

/// Moderator actions in declaration (and tie-break) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModerationAction {
    Refuse,
    Filter,
    Allow,
}

impl ModerationAction {
    pub const ALL: [ModerationAction; 3] = [
        ModerationAction::Refuse,
        ModerationAction::Filter,
        ModerationAction::Allow,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModerationAction::Refuse => "refuse",
            ModerationAction::Filter => "filter",
            ModerationAction::Allow => "allow",
        }
    }
}

/// Posterior probability that the current user is adversarial.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BeliefState(f64);

impl BeliefState {
    /// Clamp a probability into the admissible belief range.
    pub fn new(beta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(GameError::invalid(format!(
                "belief must be a probability, got {beta}"
            )));
        }
        Ok(Self(beta.clamp(BELIEF_FLOOR, 1.0 - BELIEF_FLOOR)))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Type-conditional probabilities of emitting a suspicious signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalModel {
    pub q_adv: f64,
    pub q_leg: f64,
}

impl Default for SignalModel {
    fn default() -> Self {
        Self {
            q_adv: 0.7,
            q_leg: 0.2,
        }
    }
}

impl SignalModel {
    pub fn new(q_adv: f64, q_leg: f64) -> Result<Self> {
        let m = Self { q_adv, q_leg };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, q) in [("q_adv", self.q_adv), ("q_leg", self.q_leg)] {
            if !(0.0..=1.0).contains(&q) {
                return Err(GameError::invalid(format!(
                    "{name} must lie in [0, 1], got {q}"
                )));
            }
        }
        Ok(())
    }

    /// Likelihood of `suspicious` under each type, `(adversarial, legitimate)`.
    pub fn likelihoods(&self, suspicious: bool) -> (f64, f64) {
        if suspicious {
            (self.q_adv, self.q_leg)
        } else {
            (1.0 - self.q_adv, 1.0 - self.q_leg)
        }
    }

    pub fn q(&self, user: UserType) -> f64 {
        match user {
            UserType::Legitimate => self.q_leg,
            UserType::Adversarial => self.q_adv,
        }
    }
}

/// One Bayes step on the adversarial-type posterior.
pub fn bayes_update(
    beta: BeliefState,
    suspicious: bool,
    model: &SignalModel,
) -> Result<BeliefState> {
    model.validate()?;
    let (l_adv, l_leg) = model.likelihoods(suspicious);
    let b = beta.value();
    let num = b * l_adv;
    let den = num + (1.0 - b) * l_leg;
    if den <= 0.0 {
        return Err(GameError::DegenerateLikelihood);
    }
    BeliefState::new(num / den)
}

/// Moderator and user payoffs indexed `[user type][action]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModerationPayoffs {
    pub moderator: [[f64; 3]; 2],
    pub user: [[f64; 3]; 2],
}

impl Default for ModerationPayoffs {
    /// The reference refuse/filter/allow table.
    fn default() -> Self {
        Self {
            moderator: [[2.0, 1.0, 3.0], [3.0, -1.0, -6.0]],
            user: [[0.0, 2.0, 5.0], [-2.0, 1.0, 6.0]],
        }
    }
}

impl ModerationPayoffs {
    pub fn validate(&self) -> Result<()> {
        if self
            .moderator
            .iter()
            .chain(&self.user)
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(GameError::invalid("moderation payoffs must be finite"));
        }
        Ok(())
    }

    pub fn moderator_payoff(&self, user: UserType, action: ModerationAction) -> f64 {
        self.moderator[user.index()][action.index()]
    }

    pub fn user_payoff(&self, user: UserType, action: ModerationAction) -> f64 {
        self.user[user.index()][action.index()]
    }
}

/// Moderator expected payoff of each action under belief `beta`, in
/// refuse/filter/allow order.
pub fn expected_action_values(beta: BeliefState, table: &ModerationPayoffs) -> [f64; 3] {
    let b = beta.value();
    let [leg, adv] = &table.moderator;
    std::array::from_fn(|a| (1.0 - b) * leg[a] + b * adv[a])
}

/// Greedy action under `beta`; ties go to the earliest of refuse, filter, allow.
pub fn belief_best_response(beta: BeliefState, table: &ModerationPayoffs) -> ModerationAction {
    let values = expected_action_values(beta, table);
    let best = crate::game::argmax_lowest(&values).expect("three actions");
    ModerationAction::ALL[best]
}

/// Labels attached to moderation outcomes and the offsets they carry.
///
/// Player 0 of the label table is the moderator, player 1 the user. The
/// moderator attaches a fixed label to each action and each user type
/// attaches a fixed label to its request.
#[derive(Debug, Clone, PartialEq)]
pub struct ModerationLabels {
    table: LabelOffsetTable,
    action_labels: [usize; 3],
    user_labels: [usize; 2],
}

impl Default for ModerationLabels {
    fn default() -> Self {
        Self {
            table: LabelOffsetTable::new(LabelSpace::unlabeled(2)),
            action_labels: [0; 3],
            user_labels: [0; 2],
        }
    }
}

impl ModerationLabels {
    pub fn new<S: AsRef<str>>(
        table: LabelOffsetTable,
        action_labels: [S; 3],
        user_labels: [S; 2],
    ) -> Result<Self> {
        let space = table.space();
        if space.num_players() != 2 {
            return Err(GameError::invalid(
                "moderation label space must have two players (moderator, user)",
            ));
        }
        let mut a = [0; 3];
        for (slot, l) in a.iter_mut().zip(&action_labels) {
            *slot = space.index_of(0, l.as_ref())?;
        }
        let mut u = [0; 2];
        for (slot, l) in u.iter_mut().zip(&user_labels) {
            *slot = space.index_of(1, l.as_ref())?;
        }
        Ok(Self {
            table,
            action_labels: a,
            user_labels: u,
        })
    }

    pub fn table(&self) -> &LabelOffsetTable {
        &self.table
    }

    pub fn action_label(&self, action: ModerationAction) -> &str {
        &self.table.space().labels(0)[self.action_labels[action.index()]]
    }

    pub fn user_label(&self, user: UserType) -> &str {
        &self.table.space().labels(1)[self.user_labels[user.index()]]
    }

    /// `(moderator, user)` offsets for an outcome.
    pub fn offsets(&self, user: UserType, action: ModerationAction) -> (f64, f64) {
        let profile = [
            self.action_labels[action.index()],
            self.user_labels[user.index()],
        ];
        (
            self.table.offset_at(0, &profile),
            self.table.offset_at(1, &profile),
        )
    }

    /// Fold the label offsets into a payoff table.
    pub fn apply(&self, base: &ModerationPayoffs) -> ModerationPayoffs {
        let mut out = base.clone();
        for user in UserType::ALL {
            for action in ModerationAction::ALL {
                let (m, u) = self.offsets(user, action);
                out.moderator[user.index()][action.index()] += m;
                out.user[user.index()][action.index()] += u;
            }
        }
        out
    }
}

/// Everything needed to run a moderation simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModerationScenario {
    pub payoffs: ModerationPayoffs,
    pub arrival_p: f64,
    pub prior_beta: f64,
    pub signal_model: SignalModel,
    pub labels: ModerationLabels,
    pub rounds: usize,
    pub signals_per_user: usize,
    pub seed: u64,
    /// Probability of replacing the greedy action with a uniform random one.
    pub exploration: f64,
}

impl Default for ModerationScenario {
    fn default() -> Self {
        Self {
            payoffs: ModerationPayoffs::default(),
            arrival_p: 0.15,
            prior_beta: 0.2,
            signal_model: SignalModel::default(),
            labels: ModerationLabels::default(),
            rounds: 10_000,
            signals_per_user: 3,
            seed: 0,
            exploration: 0.0,
        }
    }
}

impl ModerationScenario {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(GameError::Config(m));
        for (name, v) in [
            ("arrival_p", self.arrival_p),
            ("prior_beta", self.prior_beta),
            ("exploration", self.exploration),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return cfg(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if self.rounds == 0 {
            return cfg("rounds must be at least 1".into());
        }
        if self.signals_per_user == 0 {
            return cfg("signals_per_user must be at least 1".into());
        }
        self.signal_model
            .validate()
            .and_then(|_| self.payoffs.validate())
            .map_err(|e| GameError::Config(e.to_string()))
    }

    /// Payoff table with label offsets folded in.
    pub fn effective_payoffs(&self) -> ModerationPayoffs {
        self.labels.apply(&self.payoffs)
    }
}

/// One moderated interaction.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    /// 1-based round index.
    pub round: usize,
    pub user_type: UserType,
    /// Number of suspicious signals among the `signals_per_user` observed.
    pub suspicious: usize,
    pub belief_pre: f64,
    pub belief_post: f64,
    pub action: ModerationAction,
    pub moderator_payoff: f64,
    pub user_payoff: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationTrace {
    pub rows: Vec<TraceRow>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn moderator_payoffs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.moderator_payoff).collect()
    }

    /// Fraction of rounds on which each action was taken.
    pub fn overall_frequencies(&self) -> [f64; 3] {
        let mut counts = [0usize; 3];
        for r in &self.rows {
            counts[r.action.index()] += 1;
        }
        let n = self.rows.len().max(1) as f64;
        counts.map(|c| c as f64 / n)
    }
}

/// Draw a user type and its signal sequence, then fold the signals into the
/// prior. Shared by the simulator and the learning adapter.
pub(crate) fn observe_user<R: Rng + ?Sized>(
    rng: &mut R,
    arrival_p: f64,
    prior: BeliefState,
    model: &SignalModel,
    signals: usize,
) -> Result<(UserType, usize, BeliefState)> {
    let user = if rng.random::<f64>() < arrival_p {
        UserType::Adversarial
    } else {
        UserType::Legitimate
    };
    let q = model.q(user);
    let mut belief = prior;
    let mut suspicious = 0;
    for _ in 0..signals {
        let s = rng.random::<f64>() < q;
        suspicious += usize::from(s);
        belief = bayes_update(belief, s, model)?;
    }
    Ok((user, suspicious, belief))
}

/// Run the round loop: draw a user, observe signals, update the belief,
/// act, and record realized payoffs. Deterministic for a fixed seed.
pub fn simulate_moderation(scenario: &ModerationScenario) -> Result<SimulationTrace> {
    scenario.validate()?;
    let table = scenario.effective_payoffs();
    let prior = BeliefState::new(scenario.prior_beta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut rows = Vec::with_capacity(scenario.rounds);
    for round in 1..=scenario.rounds {
        let (user, suspicious, post) = observe_user(
            &mut rng,
            scenario.arrival_p,
            prior,
            &scenario.signal_model,
            scenario.signals_per_user,
        )?;
        let mut action = belief_best_response(post, &table);
        if scenario.exploration > 0.0 && rng.random::<f64>() < scenario.exploration {
            action = ModerationAction::ALL[rng.random_range(0..3)];
        }
        rows.push(TraceRow {
            round,
            user_type: user,
            suspicious,
            belief_pre: prior.value(),
            belief_post: post.value(),
            action,
            moderator_payoff: table.moderator_payoff(user, action),
            user_payoff: table.user_payoff(user, action),
        });
    }
    Ok(SimulationTrace { rows })
}

/// Action frequencies over one bucket of rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyRow {
    /// Last round (1-based) covered by the bucket.
    pub round: usize,
    pub refuse: f64,
    pub filter: f64,
    pub allow: f64,
}

/// Action frequencies over consecutive disjoint buckets of `window` rounds.
/// A trailing partial bucket is reported over its actual length.
pub fn action_frequencies(trace: &SimulationTrace, window: usize) -> Result<Vec<FrequencyRow>> {
    if window == 0 {
        return Err(GameError::invalid("frequency window must be at least 1"));
    }
    if window > trace.len() {
        return Err(GameError::invalid(format!(
            "frequency window {window} exceeds trace length {}",
            trace.len()
        )));
    }
    Ok(trace
        .rows
        .chunks(window)
        .map(|bucket| {
            let mut counts = [0usize; 3];
            for r in bucket {
                counts[r.action.index()] += 1;
            }
            let n = bucket.len() as f64;
            FrequencyRow {
                round: bucket.last().map_or(0, |r| r.round),
                refuse: counts[0] as f64 / n,
                filter: counts[1] as f64 / n,
                allow: counts[2] as f64 / n,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: f64) -> BeliefState {
        BeliefState::new(x).unwrap()
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn suspicious_signal_raises_belief() {
        let m = SignalModel::new(0.7, 0.2).unwrap();
        let post = bayes_update(b(0.2), true, &m).unwrap().value();
        assert!((post - 0.14 / 0.30).abs() < TOL);
    }

    #[test]
    fn clean_signal_lowers_belief() {
        let m = SignalModel::new(0.7, 0.2).unwrap();
        let post = bayes_update(b(0.5), false, &m).unwrap().value();
        assert!((post - 0.3 / 1.1).abs() < TOL);
    }

    #[test]
    fn uninformative_signal() {
        let m = SignalModel::new(0.4, 0.4).unwrap();
        for s in [true, false] {
            assert_eq!(bayes_update(b(0.3), s, &m).unwrap().value(), 0.3);
        }
    }

    #[test]
    fn impossible_signal() {
        let m = SignalModel::new(0.0, 0.0).unwrap();
        assert_eq!(
            bayes_update(b(0.3), true, &m),
            Err(GameError::DegenerateLikelihood)
        );
    }

    #[test]
    fn belief_is_clamped() {
        assert_eq!(b(0.0).value(), BELIEF_FLOOR);
        assert_eq!(b(1.0).value(), 1.0 - BELIEF_FLOOR);
        assert!(BeliefState::new(1.2).is_err());
        let m = SignalModel::new(1.0, 0.0).unwrap();
        assert_eq!(
            bayes_update(b(0.2), true, &m).unwrap().value(),
            1.0 - BELIEF_FLOOR
        );
    }

    #[test]
    fn expected_values_at_extremes() {
        let t = ModerationPayoffs::default();
        // exact at the clamp-free interior; use the linear form directly
        let [leg, adv] = t.moderator;
        assert_eq!(leg, [2.0, 1.0, 3.0]);
        assert_eq!(adv, [3.0, -1.0, -6.0]);
        let v = expected_action_values(b(0.15), &t);
        for (got, want) in v.iter().zip([2.15, 0.70, 1.65]) {
            assert!((got - want).abs() < 1e-12);
        }
        let v0 = expected_action_values(b(0.0), &t);
        for (got, want) in v0.iter().zip([2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-5);
        }
        let v1 = expected_action_values(b(1.0), &t);
        for (got, want) in v1.iter().zip([3.0, -1.0, -6.0]) {
            assert!((got - want).abs() < 1e-5);
        }
    }

    #[test]
    fn greedy_actions() {
        let t = ModerationPayoffs::default();
        assert_eq!(belief_best_response(b(0.05), &t), ModerationAction::Allow);
        assert_eq!(belief_best_response(b(0.15), &t), ModerationAction::Refuse);
        assert_eq!(belief_best_response(b(0.1), &t), ModerationAction::Refuse);
    }

    #[test]
    fn reference_table_user_payoffs() {
        let t = ModerationPayoffs::default();
        assert_eq!(t.user, [[0.0, 2.0, 5.0], [-2.0, 1.0, 6.0]]);
    }

    #[test]
    fn all_legitimate_all_allowed() {
        let s = ModerationScenario {
            arrival_p: 0.0,
            prior_beta: 0.0,
            signal_model: SignalModel::new(0.0, 0.0).unwrap(),
            rounds: 200,
            ..Default::default()
        };
        let trace = simulate_moderation(&s).unwrap();
        assert_eq!(trace.len(), 200);
        for r in &trace.rows {
            assert_eq!(r.action, ModerationAction::Allow);
            assert_eq!((r.moderator_payoff, r.user_payoff), (3.0, 5.0));
        }
    }

    #[test]
    fn all_adversarial_all_refused() {
        let s = ModerationScenario {
            arrival_p: 1.0,
            signal_model: SignalModel::new(1.0, 0.0).unwrap(),
            signals_per_user: 1,
            rounds: 200,
            ..Default::default()
        };
        let trace = simulate_moderation(&s).unwrap();
        for r in &trace.rows {
            assert_eq!(r.action, ModerationAction::Refuse);
            assert_eq!(r.moderator_payoff, 3.0);
            assert_eq!(r.belief_post, 1.0 - BELIEF_FLOOR);
        }
    }

    #[test]
    fn apology_label_reaches_trace() {
        let mut table = LabelOffsetTable::new(
            LabelSpace::new(vec![
                vec!["none".into(), "apology".into()],
                vec!["none".into(), "benign_request".into()],
            ])
            .unwrap(),
        );
        table.set(1, &["apology", "none"], 1.0).unwrap();
        let labels = ModerationLabels::new(
            table,
            ["apology", "none", "none"],
            ["none", "benign_request"],
        )
        .unwrap();
        let s = ModerationScenario {
            arrival_p: 0.0,
            prior_beta: 0.9,
            labels,
            rounds: 50,
            ..Default::default()
        };
        let trace = simulate_moderation(&s).unwrap();
        let refused: Vec<_> = trace
            .rows
            .iter()
            .filter(|r| r.action == ModerationAction::Refuse)
            .collect();
        assert!(!refused.is_empty());
        for r in refused {
            assert_eq!(r.user_payoff, 1.0);
        }
    }

    #[test]
    fn scenario_validation() {
        let bad = [
            ModerationScenario {
                arrival_p: 1.5,
                ..Default::default()
            },
            ModerationScenario {
                prior_beta: -0.1,
                ..Default::default()
            },
            ModerationScenario {
                rounds: 0,
                ..Default::default()
            },
            ModerationScenario {
                signals_per_user: 0,
                ..Default::default()
            },
            ModerationScenario {
                signal_model: SignalModel {
                    q_adv: 2.0,
                    q_leg: 0.1,
                },
                ..Default::default()
            },
        ];
        for s in bad {
            assert!(matches!(simulate_moderation(&s), Err(GameError::Config(_))));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let s = ModerationScenario {
            rounds: 2000,
            seed: 9,
            ..Default::default()
        };
        assert_eq!(
            simulate_moderation(&s).unwrap(),
            simulate_moderation(&s).unwrap()
        );
        let other = ModerationScenario {
            seed: 10,
            ..s.clone()
        };
        assert_ne!(
            simulate_moderation(&s).unwrap(),
            simulate_moderation(&other).unwrap()
        );
    }

    #[test]
    fn exploration_visits_filter() {
        let s = ModerationScenario {
            rounds: 3000,
            exploration: 0.3,
            seed: 1,
            ..Default::default()
        };
        let f = simulate_moderation(&s).unwrap().overall_frequencies();
        assert!(f[1] > 0.05);
    }

    fn trace_of(actions: &[ModerationAction]) -> SimulationTrace {
        SimulationTrace {
            rows: actions
                .iter()
                .enumerate()
                .map(|(i, &action)| TraceRow {
                    round: i + 1,
                    user_type: UserType::Legitimate,
                    suspicious: 0,
                    belief_pre: 0.2,
                    belief_post: 0.2,
                    action,
                    moderator_payoff: 0.0,
                    user_payoff: 0.0,
                })
                .collect(),
        }
    }

    #[test]
    fn constant_trace_frequencies() {
        let t = trace_of(&[ModerationAction::Allow; 100]);
        let rows = action_frequencies(&t, 10).unwrap();
        assert_eq!(rows.len(), 10);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.round, (i + 1) * 10);
            assert_eq!((r.refuse, r.filter, r.allow), (0.0, 0.0, 1.0));
        }
    }

    #[test]
    fn alternating_trace_frequencies() {
        let acts: Vec<_> = (0..20)
            .map(|i| {
                if i % 2 == 0 {
                    ModerationAction::Refuse
                } else {
                    ModerationAction::Filter
                }
            })
            .collect();
        for r in action_frequencies(&trace_of(&acts), 2).unwrap() {
            assert_eq!((r.refuse, r.filter, r.allow), (0.5, 0.5, 0.0));
        }
    }

    #[test]
    fn window_validation() {
        let t = trace_of(&[ModerationAction::Allow; 5]);
        assert!(action_frequencies(&t, 0).is_err());
        assert!(action_frequencies(&t, 6).is_err());
        let rows = action_frequencies(&t, 2).unwrap();
        assert_eq!(rows.last().unwrap().round, 5);
    }

    proptest! {
        #[test]
        fn monotone_in_signal(beta in 0.0f64..=1.0, qa in 0.0f64..=1.0, ql in 0.0f64..=1.0) {
            prop_assume!(qa > ql);
            let m = SignalModel::new(qa, ql).unwrap();
            let prior = b(beta);
            if let Ok(up) = bayes_update(prior, true, &m) {
                prop_assert!(up.value() >= prior.value());
            }
            if let Ok(down) = bayes_update(prior, false, &m) {
                prop_assert!(down.value() <= prior.value());
            }
        }

        #[test]
        fn frequencies_sum_to_one(seed in 0u64..1000, window in 1usize..300) {
            let s = ModerationScenario { rounds: 300, seed, exploration: 0.2, ..Default::default() };
            let trace = simulate_moderation(&s).unwrap();
            for r in action_frequencies(&trace, window).unwrap() {
                prop_assert!((r.refuse + r.filter + r.allow - 1.0).abs() <= 1e-12);
            }
        }
    }
}
