//! Scenario files.
//!
//! A scenario is a TOML document with a `kind`, a mandatory `seed`, an
//! optional `output` directory and exactly one payload table named after the
//! kind. Unknown keys are rejected everywhere. Loading fills every default so
//! that the serialized form of a loaded config is a complete, reproducible
//! description of the run.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::belief::{ModerationLabels, ModerationPayoffs, ModerationScenario, SignalModel};
use crate::coalition::{
    apply_trust, CharacteristicFunction, Coalition, SabotageModel, TrustSchedule,
};
use crate::error::RunError;
use crate::game::{MixedStrategy, NormalFormGame};
use crate::lang::{LabelOffsetTable, LabelSpace, OffsetEntry};
use crate::marl::{LearningConfig, TableEnvironment};
use crate::zero_sum::ZeroSumGame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    NormalForm,
    ZeroSum,
    Stackelberg,
    Moderation,
    Coalition,
    Qlearning,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::NormalForm => "normal_form",
            Kind::ZeroSum => "zero_sum",
            Kind::Stackelberg => "stackelberg",
            Kind::Moderation => "moderation",
            Kind::Coalition => "coalition",
            Kind::Qlearning => "qlearning",
        }
    }
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

// ---------------------------------------------------------------- payloads

/// Label space and offsets for a normal-form game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelConfig {
    /// `players[i]` lists the labels player `i` may attach.
    pub players: Vec<Vec<String>>,
    #[serde(default)]
    pub offsets: Vec<OffsetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalFormPayload {
    pub actions: Vec<usize>,
    /// One row per pure profile in row-major order, one entry per player.
    pub payoffs: Vec<Vec<f64>>,
    #[serde(default)]
    pub epsilon: f64,
    /// Mixed profile to analyse, one probability vector per player.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<LabelConfig>,
}

fn default_zs_tol() -> f64 {
    1e-2
}

fn default_max_iter() -> usize {
    10_000_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroSumPayload {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default = "default_zs_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_grid() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackelbergPayload {
    /// `[leader actions, follower actions]`
    pub actions: Vec<usize>,
    pub payoffs: Vec<Vec<f64>>,
    #[serde(default = "default_grid")]
    pub grid_resolution: f64,
}

/// A single arrival probability or a sweep over several.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ArrivalP {
    Single(f64),
    Sweep(Vec<f64>),
}

impl ArrivalP {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ArrivalP::Single(p) => vec![*p],
            ArrivalP::Sweep(ps) => ps.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalModelConfig {
    pub q_adv: f64,
    pub q_leg: f64,
}

/// `[type][action]` tables, types ordered (legitimate, adversarial) and
/// actions ordered (refuse, filter, allow).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffTableConfig {
    pub moderator: [[f64; 3]; 2],
    pub user: [[f64; 3]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModerationLabelConfig {
    pub moderator: Vec<String>,
    pub user: Vec<String>,
    /// Moderator label attached to refuse, filter and allow.
    pub action_labels: [String; 3],
    /// User label attached by legitimate and adversarial users.
    pub user_labels: [String; 2],
    #[serde(default)]
    pub offsets: Vec<OffsetEntry>,
}

fn default_rounds() -> usize {
    10_000
}
fn default_arrival() -> ArrivalP {
    ArrivalP::Single(0.15)
}
fn default_prior() -> f64 {
    0.2
}
fn default_signals() -> usize {
    3
}
fn default_window() -> usize {
    1_000
}
fn default_signal_model() -> SignalModelConfig {
    let d = SignalModel::default();
    SignalModelConfig {
        q_adv: d.q_adv,
        q_leg: d.q_leg,
    }
}
fn default_payoff_table() -> PayoffTableConfig {
    let d = ModerationPayoffs::default();
    PayoffTableConfig {
        moderator: d.moderator,
        user: d.user,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModerationPayload {
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_arrival")]
    pub arrival_p: ArrivalP,
    #[serde(default = "default_prior")]
    pub prior_beta: f64,
    #[serde(default = "default_signals")]
    pub signals_per_user: usize,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub exploration: f64,
    /// Bucket length of the action-frequency series.
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_signal_model")]
    pub signal_model: SignalModelConfig,
    #[serde(default = "default_payoff_table")]
    pub payoffs: PayoffTableConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<ModerationLabelConfig>,
}

impl Default for ModerationPayload {
    fn default() -> Self {
        Self {
            rounds: default_rounds(),
            arrival_p: default_arrival(),
            prior_beta: default_prior(),
            signals_per_user: default_signals(),
            exploration: 0.0,
            window: default_window(),
            signal_model: default_signal_model(),
            payoffs: default_payoff_table(),
            labels: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionValue {
    /// 1-based agent numbers.
    pub agents: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionCost {
    pub agents: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrustConfig {
    pub alpha0: f64,
    pub rho: f64,
    #[serde(default)]
    pub alpha_min: f64,
    /// Number of passed integrity checks.
    pub verified_rounds: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoalitionPayload {
    pub n_agents: usize,
    /// Pair weight `w`: every coalition of size `k` is worth `w * k(k-1)/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairwise: Option<f64>,
    /// Explicit values; unlisted coalitions are worth 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<CoalitionValue>>,
    /// 1-based malicious agents.
    #[serde(default)]
    pub malicious: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub costs: Option<Vec<CoalitionCost>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trust: Option<TrustConfig>,
    /// Allocation to test for core membership; the Shapley value is tested
    /// when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEnvConfig {
    pub actions: Vec<usize>,
    pub payoffs: Vec<Vec<f64>>,
    #[serde(default = "one")]
    pub horizon: usize,
}

fn one() -> usize {
    1
}

fn default_buckets() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QLearningPayload {
    #[serde(default = "d_episodes")]
    pub episodes: usize,
    #[serde(default = "d_lr")]
    pub learning_rate: f64,
    #[serde(default = "d_discount")]
    pub discount: f64,
    #[serde(default = "d_eps_start")]
    pub epsilon_start: f64,
    #[serde(default = "d_eps_decay")]
    pub epsilon_decay: f64,
    #[serde(default = "d_eps_min")]
    pub epsilon_min: f64,
    #[serde(default = "d_max_steps")]
    pub max_steps: usize,
    /// State discretization of the moderation environment.
    #[serde(default = "default_buckets")]
    pub belief_buckets: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moderation: Option<ModerationPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixEnvConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableEnvironment>,
}

fn d_episodes() -> usize {
    LearningConfig::default().episodes
}
fn d_lr() -> f64 {
    LearningConfig::default().learning_rate
}
fn d_discount() -> f64 {
    LearningConfig::default().discount
}
fn d_eps_start() -> f64 {
    LearningConfig::default().epsilon_start
}
fn d_eps_decay() -> f64 {
    LearningConfig::default().epsilon_decay
}
fn d_eps_min() -> f64 {
    LearningConfig::default().epsilon_min
}
fn d_max_steps() -> usize {
    LearningConfig::default().max_steps
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    NormalForm(NormalFormPayload),
    ZeroSum(ZeroSumPayload),
    Stackelberg(StackelbergPayload),
    Moderation(ModerationPayload),
    Coalition(CoalitionPayload),
    Qlearning(QLearningPayload),
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::NormalForm(_) => Kind::NormalForm,
            Payload::ZeroSum(_) => Kind::ZeroSum,
            Payload::Stackelberg(_) => Kind::Stackelberg,
            Payload::Moderation(_) => Kind::Moderation,
            Payload::Coalition(_) => Kind::Coalition,
            Payload::Qlearning(_) => Kind::Qlearning,
        }
    }
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub payload: Payload,
}

impl ScenarioConfig {
    pub fn kind(&self) -> Kind {
        self.payload.kind()
    }

    /// The resolved scenario as TOML; loading it yields an equal config.
    pub fn to_toml(&self) -> String {
        let mut w = Wire {
            kind: Some(self.kind()),
            seed: Some(self.seed),
            output: self
                .output
                .as_ref()
                .map(|p| p.to_string_lossy().into_owned()),
            ..Wire::default()
        };
        match &self.payload {
            Payload::NormalForm(p) => w.normal_form = Some(p.clone()),
            Payload::ZeroSum(p) => w.zero_sum = Some(p.clone()),
            Payload::Stackelberg(p) => w.stackelberg = Some(p.clone()),
            Payload::Moderation(p) => w.moderation = Some(p.clone()),
            Payload::Coalition(p) => w.coalition = Some(p.clone()),
            Payload::Qlearning(p) => w.qlearning = Some(p.clone()),
        }
        toml::to_string(&w).expect("scenario configs always serialize")
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<Kind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normal_form: Option<NormalFormPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    zero_sum: Option<ZeroSumPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stackelberg: Option<StackelbergPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    moderation: Option<ModerationPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coalition: Option<CoalitionPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    qlearning: Option<QLearningPayload>,
}

// ---------------------------------------------------------------- loading

/// A validation failure at a dotted field path.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

fn fe(field: impl Into<String>, message: impl Display) -> FieldError {
    FieldError {
        field: field.into(),
        message: message.to_string(),
    }
}

type FieldResult<T> = std::result::Result<T, FieldError>;

/// Read and validate a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, RunError> {
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// Validate scenario text; `path` is only used in error messages.
pub fn parse_config(text: &str, path: &Path) -> Result<ScenarioConfig, RunError> {
    let wire: Wire = toml::from_str(text).map_err(|e| RunError::Parse {
        path: path.to_path_buf(),
        message: e.to_string().trim_end().to_string(),
    })?;
    let field_err = |e: FieldError| RunError::Field {
        path: path.to_path_buf(),
        field: e.field,
        message: e.message,
    };
    let config = resolve(wire).map_err(field_err)?;
    validate(&config).map_err(field_err)?;
    Ok(config)
}

fn resolve(w: Wire) -> FieldResult<ScenarioConfig> {
    let kind = w.kind.ok_or_else(|| fe("kind", "kind required"))?;
    let seed = w.seed.ok_or_else(|| fe("seed", "seed required"))?;
    let present: Vec<&str> = [
        ("normal_form", w.normal_form.is_some()),
        ("zero_sum", w.zero_sum.is_some()),
        ("stackelberg", w.stackelberg.is_some()),
        ("moderation", w.moderation.is_some()),
        ("coalition", w.coalition.is_some()),
        ("qlearning", w.qlearning.is_some()),
    ]
    .into_iter()
    .filter_map(|(name, on)| on.then_some(name))
    .collect();
    if present.iter().any(|&p| p != kind.as_str()) {
        return Err(fe(
            "kind",
            format!(
                "kind `{}` admits only a `[{}]` table, found [{}]",
                kind.as_str(),
                kind.as_str(),
                present.join(", ")
            ),
        ));
    }
    let missing = || {
        fe(
            kind.as_str(),
            format!("`[{}]` table required for this kind", kind.as_str()),
        )
    };
    let payload = match kind {
        Kind::NormalForm => Payload::NormalForm(w.normal_form.ok_or_else(missing)?),
        Kind::ZeroSum => Payload::ZeroSum(w.zero_sum.ok_or_else(missing)?),
        Kind::Stackelberg => Payload::Stackelberg(w.stackelberg.ok_or_else(missing)?),
        // every moderation field has a default
        Kind::Moderation => Payload::Moderation(w.moderation.unwrap_or_default()),
        Kind::Coalition => Payload::Coalition(w.coalition.ok_or_else(missing)?),
        Kind::Qlearning => Payload::Qlearning(w.qlearning.ok_or_else(missing)?),
    };
    if seed > i64::MAX as u64 {
        return Err(fe("seed", "seed must not exceed 9223372036854775807"));
    }
    Ok(ScenarioConfig {
        seed,
        output: w.output.map(PathBuf::from),
        payload,
    })
}

fn validate(c: &ScenarioConfig) -> FieldResult<()> {
    match &c.payload {
        Payload::NormalForm(p) => p.build("normal_form").map(drop),
        Payload::ZeroSum(p) => p.build("zero_sum").map(drop),
        Payload::Stackelberg(p) => p.build("stackelberg").map(drop),
        Payload::Moderation(p) => p.build("moderation", c.seed).map(drop),
        Payload::Coalition(p) => p.build("coalition").map(drop),
        Payload::Qlearning(p) => p.build("qlearning", c.seed).map(drop),
    }
}

// ---------------------------------------------------------------- building

fn path(prefix: &str, field: &str) -> String {
    format!("{prefix}.{field}")
}

fn build_game(
    prefix: &str,
    actions: &[usize],
    payoffs: &[Vec<f64>],
) -> FieldResult<NormalFormGame> {
    let n = actions.len();
    for (i, row) in payoffs.iter().enumerate() {
        if row.len() != n {
            return Err(fe(
                format!("{prefix}.payoffs[{i}]"),
                format!("expected {n} entries (one per player), got {}", row.len()),
            ));
        }
    }
    let flat = payoffs.iter().flatten().copied().collect();
    NormalFormGame::new(actions.to_vec(), flat).map_err(|e| fe(path(prefix, "payoffs"), e))
}

/// Objects described by a normal-form payload.
#[derive(Debug, Clone)]
pub struct NormalFormSetup {
    pub game: NormalFormGame,
    pub labels: Option<LabelOffsetTable>,
    pub profile: Option<Vec<MixedStrategy>>,
}

impl NormalFormPayload {
    pub fn build(&self, prefix: &str) -> FieldResult<NormalFormSetup> {
        let game = build_game(prefix, &self.actions, &self.payoffs)?;
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(fe(
                path(prefix, "epsilon"),
                "must be finite and non-negative",
            ));
        }
        let labels = match &self.labels {
            None => None,
            Some(l) => {
                let space = LabelSpace::new(l.players.clone())
                    .map_err(|e| fe(format!("{prefix}.labels.players"), e))?;
                if space.num_players() != game.num_players() {
                    return Err(fe(
                        format!("{prefix}.labels.players"),
                        format!(
                            "{} label lists for {} players",
                            space.num_players(),
                            game.num_players()
                        ),
                    ));
                }
                Some(
                    LabelOffsetTable::from_entries(space, &l.offsets)
                        .map_err(|e| fe(format!("{prefix}.labels.offsets"), e))?,
                )
            }
        };
        let profile = match &self.profile {
            None => None,
            Some(rows) => {
                let counts = match &labels {
                    None => game.action_counts().to_vec(),
                    Some(t) => game
                        .action_counts()
                        .iter()
                        .zip(t.space().label_counts())
                        .map(|(a, l)| a * l)
                        .collect(),
                };
                if rows.len() != counts.len() {
                    return Err(fe(
                        path(prefix, "profile"),
                        format!("{} strategies for {} players", rows.len(), counts.len()),
                    ));
                }
                let mut out = Vec::with_capacity(rows.len());
                for (i, (r, &k)) in rows.iter().zip(&counts).enumerate() {
                    let at = format!("{prefix}.profile[{i}]");
                    if r.len() != k {
                        return Err(fe(
                            at,
                            format!("expected {k} probabilities, got {}", r.len()),
                        ));
                    }
                    out.push(MixedStrategy::new(r.clone()).map_err(|e| fe(at, e))?);
                }
                Some(out)
            }
        };
        Ok(NormalFormSetup {
            game,
            labels,
            profile,
        })
    }
}

impl ZeroSumPayload {
    pub fn build(&self, prefix: &str) -> FieldResult<ZeroSumGame> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(fe(path(prefix, "tol"), "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(fe(path(prefix, "max_iter"), "must be at least 1"));
        }
        ZeroSumGame::new(self.matrix.clone()).map_err(|e| fe(path(prefix, "matrix"), e))
    }
}

impl StackelbergPayload {
    pub fn build(&self, prefix: &str) -> FieldResult<NormalFormGame> {
        if self.actions.len() != 2 {
            return Err(fe(path(prefix, "actions"), "exactly two players required"));
        }
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 0.5) {
            return Err(fe(path(prefix, "grid_resolution"), "must lie in (0, 0.5]"));
        }
        build_game(prefix, &self.actions, &self.payoffs)
    }
}

impl ModerationPayload {
    /// One scenario per arrival probability.
    pub fn build(&self, prefix: &str, seed: u64) -> FieldResult<Vec<ModerationScenario>> {
        let ps = self.arrival_p.values();
        if ps.is_empty() {
            return Err(fe(
                path(prefix, "arrival_p"),
                "sweep must list at least one value",
            ));
        }
        let signal_model = SignalModel::new(self.signal_model.q_adv, self.signal_model.q_leg)
            .map_err(|e| fe(path(prefix, "signal_model"), e))?;
        let payoffs = ModerationPayoffs {
            moderator: self.payoffs.moderator,
            user: self.payoffs.user,
        };
        payoffs
            .validate()
            .map_err(|e| fe(path(prefix, "payoffs"), e))?;
        let labels = match &self.labels {
            None => ModerationLabels::default(),
            Some(l) => {
                let at = path(prefix, "labels");
                let space = LabelSpace::new(vec![l.moderator.clone(), l.user.clone()])
                    .map_err(|e| fe(&at, e))?;
                let table = LabelOffsetTable::from_entries(space, &l.offsets)
                    .map_err(|e| fe(format!("{at}.offsets"), e))?;
                ModerationLabels::new(table, l.action_labels.clone(), l.user_labels.clone())
                    .map_err(|e| fe(&at, e))?
            }
        };
        if self.window == 0 || self.window > self.rounds {
            return Err(fe(
                path(prefix, "window"),
                format!("must lie in [1, rounds = {}]", self.rounds),
            ));
        }
        let mut out = Vec::with_capacity(ps.len());
        for (i, &p) in ps.iter().enumerate() {
            let scenario = ModerationScenario {
                payoffs: payoffs.clone(),
                arrival_p: p,
                prior_beta: self.prior_beta,
                signal_model,
                labels: labels.clone(),
                rounds: self.rounds,
                signals_per_user: self.signals_per_user,
                seed,
                exploration: self.exploration,
            };
            if let Err(e) = scenario.validate() {
                let msg = e.to_string();
                let field = [
                    "arrival_p",
                    "prior_beta",
                    "exploration",
                    "rounds",
                    "signals_per_user",
                ]
                .into_iter()
                .find(|f| msg.contains(f))
                .unwrap_or("arrival_p");
                let field = match (&self.arrival_p, field) {
                    (ArrivalP::Sweep(_), "arrival_p") => format!("{prefix}.arrival_p[{i}]"),
                    _ => path(prefix, field),
                };
                return Err(fe(field, msg));
            }
            out.push(scenario);
        }
        Ok(out)
    }
}

/// Objects described by a coalition payload.
#[derive(Debug, Clone)]
pub struct CoalitionSetup {
    pub cf: CharacteristicFunction,
    pub sabotage: Option<SabotageModel>,
    /// Sabotage fraction after trust decay, when a schedule is given.
    pub effective_alpha: Option<f64>,
    pub allocation: Option<Vec<f64>>,
}

impl CoalitionPayload {
    pub fn build(&self, prefix: &str) -> FieldResult<CoalitionSetup> {
        let n = self.n_agents;
        let coalition = |field: String, agents: &[usize]| -> FieldResult<Coalition> {
            if let Some(&a) = agents.iter().find(|&&a| a == 0 || a > n) {
                return Err(fe(field, format!("agent {a} outside 1..={n}")));
            }
            Coalition::from_agents(agents).map_err(|e| fe(field, e))
        };
        let cf = match (self.pairwise, &self.values) {
            (Some(w), None) => CharacteristicFunction::pairwise(n, w),
            (None, Some(vals)) => {
                let mut map = BTreeMap::new();
                for (i, v) in vals.iter().enumerate() {
                    let s = coalition(format!("{prefix}.values[{i}].agents"), &v.agents)?;
                    if map.insert(s, v.value).is_some() {
                        return Err(fe(
                            format!("{prefix}.values[{i}]"),
                            format!("coalition {s} listed twice"),
                        ));
                    }
                }
                CharacteristicFunction::explicit(n, &map)
            }
            _ => {
                return Err(fe(
                    prefix,
                    "exactly one of `pairwise` or `values` is required",
                ))
            }
        }
        .map_err(|e| fe(path(prefix, "n_agents"), e))?;

        let malicious = coalition(path(prefix, "malicious"), &self.malicious)?;
        let specified = [
            self.alpha.is_some(),
            self.costs.is_some(),
            self.trust.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if specified > 1 {
            return Err(fe(
                prefix,
                "at most one of `alpha`, `costs` or `trust` may be given",
            ));
        }
        let mut effective_alpha = None;
        let sabotage = if let Some(a) = self.alpha {
            Some(
                SabotageModel::fractional(malicious, a)
                    .map_err(|e| fe(path(prefix, "alpha"), e))?,
            )
        } else if let Some(t) = &self.trust {
            let sched = TrustSchedule::new(t.alpha0, t.rho, t.alpha_min)
                .map_err(|e| fe(path(prefix, "trust"), e))?;
            let a = apply_trust(&sched, t.verified_rounds);
            effective_alpha = Some(a);
            Some(
                SabotageModel::fractional(malicious, a)
                    .map_err(|e| fe(path(prefix, "trust"), e))?,
            )
        } else if let Some(costs) = &self.costs {
            let mut map = BTreeMap::new();
            for (i, c) in costs.iter().enumerate() {
                let s = coalition(format!("{prefix}.costs[{i}].agents"), &c.agents)?;
                if map.insert(s, c.cost).is_some() {
                    return Err(fe(
                        format!("{prefix}.costs[{i}]"),
                        format!("coalition {s} listed twice"),
                    ));
                }
            }
            Some(
                SabotageModel::explicit(malicious, map)
                    .map_err(|e| fe(path(prefix, "costs"), e))?,
            )
        } else {
            if !self.malicious.is_empty() {
                return Err(fe(
                    path(prefix, "malicious"),
                    "malicious agents need one of `alpha`, `costs` or `trust`",
                ));
            }
            None
        };
        if let Some(x) = &self.allocation {
            if x.len() != n {
                return Err(fe(
                    path(prefix, "allocation"),
                    format!("{} entries for {n} agents", x.len()),
                ));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(fe(path(prefix, "allocation"), "entries must be finite"));
            }
        }
        Ok(CoalitionSetup {
            cf,
            sabotage,
            effective_alpha,
            allocation: self.allocation.clone(),
        })
    }
}

/// The environment a learning payload trains on.
#[derive(Debug, Clone)]
pub enum EnvSetup {
    Moderation(ModerationScenario, usize),
    Matrix(NormalFormGame, usize),
    Table(TableEnvironment),
}

impl QLearningPayload {
    pub fn learning_config(&self, seed: u64) -> LearningConfig {
        LearningConfig {
            episodes: self.episodes,
            learning_rate: self.learning_rate,
            discount: self.discount,
            epsilon_start: self.epsilon_start,
            epsilon_decay: self.epsilon_decay,
            epsilon_min: self.epsilon_min,
            max_steps: self.max_steps,
            seed,
        }
    }

    pub fn build(&self, prefix: &str, seed: u64) -> FieldResult<(LearningConfig, EnvSetup)> {
        let cfg = self.learning_config(seed);
        if let Err(e) = cfg.validate() {
            let msg = e.to_string();
            let field = [
                "episodes",
                "learning_rate",
                "discount",
                "epsilon_start",
                "epsilon_decay",
                "epsilon_min",
                "max_steps",
            ]
            .into_iter()
            .find(|f| msg.contains(f))
            .unwrap_or("episodes");
            return Err(fe(path(prefix, field), msg));
        }
        let env =
            match (&self.moderation, &self.matrix, &self.table) {
                (Some(m), None, None) => {
                    let at = path(prefix, "moderation");
                    if matches!(m.arrival_p, ArrivalP::Sweep(_)) {
                        return Err(fe(
                            format!("{at}.arrival_p"),
                            "sweeps are not supported here",
                        ));
                    }
                    if self.belief_buckets < 2 {
                        return Err(fe(path(prefix, "belief_buckets"), "must be at least 2"));
                    }
                    let scenario = m.build(&at, seed)?.remove(0);
                    EnvSetup::Moderation(scenario, self.belief_buckets)
                }
                (None, Some(m), None) => {
                    let at = path(prefix, "matrix");
                    if m.horizon == 0 {
                        return Err(fe(format!("{at}.horizon"), "must be at least 1"));
                    }
                    EnvSetup::Matrix(build_game(&at, &m.actions, &m.payoffs)?, m.horizon)
                }
                (None, None, Some(t)) => EnvSetup::Table(
                    TableEnvironment::new(t.start, t.transitions.clone())
                        .map_err(|e| fe(path(prefix, "table"), e))?,
                ),
                _ => return Err(fe(
                    prefix,
                    "exactly one environment table (`moderation`, `matrix` or `table`) is required",
                )),
            };
        Ok((cfg, env))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coalition::{best_coalition, value};

    fn parse(text: &str) -> Result<ScenarioConfig, RunError> {
        parse_config(text, Path::new("test.toml"))
    }

    fn field_of(e: RunError) -> String {
        match e {
            RunError::Field { field, .. } => field,
            other => panic!("expected a field error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_moderation_gets_default_table() {
        let c = parse("kind = \"moderation\"\nseed = 42\n").unwrap();
        assert_eq!(c.seed, 42);
        let Payload::Moderation(m) = &c.payload else {
            panic!()
        };
        assert_eq!(m.payoffs.moderator, [[2.0, 1.0, 3.0], [3.0, -1.0, -6.0]]);
        assert_eq!(m.payoffs.user, [[0.0, 2.0, 5.0], [-2.0, 1.0, 6.0]]);
        assert_eq!(m.rounds, 10_000);
        assert_eq!(m.arrival_p, ArrivalP::Single(0.15));
        assert_eq!(m.window, 1000);
    }

    #[test]
    fn seed_is_required() {
        let err = parse("kind = \"moderation\"\n").unwrap_err();
        assert!(err.to_string().contains("seed required"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn coalition_payload_reproduces_five_agent_game() {
        let c = parse(
            "kind = \"coalition\"\nseed = 1\n[coalition]\nn_agents = 5\npairwise = 5\nmalicious = [3]\nalpha = 0.4\n",
        )
        .unwrap();
        let Payload::Coalition(p) = &c.payload else {
            panic!()
        };
        let s = p.build("coalition").unwrap();
        let sab = s.sabotage.as_ref();
        let four = Coalition::from_agents(&[1, 2, 4, 5]).unwrap();
        assert_eq!(value(&s.cf, sab, four).unwrap(), 30.0);
        assert_eq!(value(&s.cf, sab, Coalition::grand(5)).unwrap(), 30.0);
        assert_eq!(best_coalition(&s.cf, sab), (four, 30.0));
    }

    #[test]
    fn parse_error_has_line_number() {
        let err = parse("kind = \"moderation\"\nseed = \n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, RunError::Parse { .. }));
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = parse("kind = \"moderation\"\nseed = 1\n[moderation]\nround = 5\n").unwrap_err();
        assert!(err.to_string().contains("round"), "{err}");
        assert!(parse("kind = \"moderation\"\nseed = 1\nsede = 2\n").is_err());
    }

    #[test]
    fn payload_must_match_kind() {
        let err = parse("kind = \"zero_sum\"\nseed = 1\n[moderation]\n").unwrap_err();
        assert_eq!(field_of(err), "kind");
        let err = parse("kind = \"zero_sum\"\nseed = 1\n").unwrap_err();
        assert_eq!(field_of(err), "zero_sum");
    }

    #[test]
    fn field_paths_for_invariant_violations() {
        let err =
            parse("kind = \"moderation\"\nseed = 1\n[moderation]\narrival_p = 1.5\n").unwrap_err();
        assert_eq!(field_of(err), "moderation.arrival_p");
        let err = parse("kind = \"moderation\"\nseed = 1\n[moderation]\narrival_p = [0.1, -0.2]\n")
            .unwrap_err();
        assert_eq!(field_of(err), "moderation.arrival_p[1]");
        let err = parse(
            "kind = \"normal_form\"\nseed = 1\n[normal_form]\nactions = [2]\npayoffs = [[1], [1, 2]]\n",
        )
        .unwrap_err();
        assert_eq!(field_of(err), "normal_form.payoffs[1]");
        let err = parse("kind = \"coalition\"\nseed = 1\n[coalition]\nn_agents = 3\npairwise = 1\nmalicious = [4]\nalpha = 0.1\n").unwrap_err();
        assert_eq!(field_of(err), "coalition.malicious");
        let err = parse("kind = \"qlearning\"\nseed = 1\n[qlearning]\ndiscount = 1.5\n[qlearning.matrix]\nactions = [2]\npayoffs = [[1], [0]]\n").unwrap_err();
        assert_eq!(field_of(err), "qlearning.discount");
    }

    #[test]
    fn echo_round_trips() {
        let sources = [
            "kind = \"moderation\"\nseed = 7\n[moderation]\narrival_p = [0.05, 0.15, 0.5]\n",
            "kind = \"moderation\"\nseed = 7\n[moderation.labels]\nmoderator = [\"plain\", \"apologetic\"]\nuser = [\"plain\"]\naction_labels = [\"apologetic\", \"plain\", \"plain\"]\nuser_labels = [\"plain\", \"plain\"]\noffsets = [{ player = 0, labels = [\"apologetic\", \"plain\"], offset = 1.0 }]\n",
            "kind = \"zero_sum\"\nseed = 0\noutput = \"out/zs\"\n[zero_sum]\nmatrix = [[1, -1], [-1, 1]]\n",
            "kind = \"coalition\"\nseed = 3\n[coalition]\nn_agents = 3\nvalues = [{ agents = [1, 2], value = 4 }]\nmalicious = [3]\ntrust = { alpha0 = 0.4, rho = 0.5, verified_rounds = 2 }\nallocation = [2, 2, 0]\n",
            "kind = \"qlearning\"\nseed = 5\n[qlearning]\nepisodes = 10\n[qlearning.table]\nstart = 0\ntransitions = [[[1, 0.0, false], [0, 0.1, false]], [[1, 1.0, true], [0, 0.0, false]]]\n",
            "kind = \"normal_form\"\nseed = 9\n[normal_form]\nactions = [2, 2]\npayoffs = [[3, 3], [0, 5], [5, 0], [1, 1]]\nprofile = [[0.5, 0.5], [1, 0]]\n",
            "kind = \"stackelberg\"\nseed = 9\n[stackelberg]\nactions = [2, 2]\npayoffs = [[2, 1], [4, 0], [1, 0], [3, 1]]\n",
        ];
        for src in sources {
            let c = parse(src).unwrap();
            let echoed = c.to_toml();
            let again = parse(&echoed).unwrap_or_else(|e| panic!("{e}\n{echoed}"));
            assert_eq!(c, again, "{echoed}");
        }
    }

    #[test]
    fn large_seed_round_trips() {
        let c = parse("kind = \"moderation\"\nseed = 9223372036854775807\n").unwrap();
        assert_eq!(parse(&c.to_toml()).unwrap(), c);
        assert!(parse("kind = \"moderation\"\nseed = -1\n").is_err());
    }
}
